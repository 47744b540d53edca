//! Text input for scalars, parameter files, forms, and projective maps.
//!
//! Scalars are written as exact expressions over `F_p`:
//! integers, `sqrt3`, `zeta(n)` with an optional integer exponent, combined
//! with `+ - * /` and parentheses. Parameter files are `name = expr` lines
//! with `#` comments. Forms and maps parse the same notation the library
//! prints, so every report value can be fed back in.

use std::collections::BTreeMap;
use thiserror::Error;

use crate::field::{Fe, FieldError, PrimeField};
use crate::forms::{Monomial, TernaryForm};
use crate::pgl::{PglError, ProjectiveMap};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("unexpected character {0:?}")]
    BadChar(char),
    #[error("unexpected token {0:?}")]
    BadToken(String),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {expected}, found {found:?}")]
    Expected { expected: &'static str, found: String },
    #[error("term {0:?} has degree {1}, expected {2}")]
    WrongDegree(String, u32, u32),
    #[error("parameter line {0:?} is not of the form `name = expr`")]
    BadLine(String),
    #[error("duplicate parameter {0:?}")]
    Duplicate(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Pgl(#[from] PglError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
}

fn tokenize(s: &str) -> Result<Vec<Tok>, ParamError> {
    let mut out = Vec::new();
    let mut it = s.chars().peekable();
    while let Some(&c) = it.peek() {
        match c {
            ' ' | '\t' => {
                it.next();
            }
            '0'..='9' => {
                let mut n: u64 = 0;
                while let Some(d) = it.peek().and_then(|c| c.to_digit(10)) {
                    n = n * 10 + d as u64;
                    it.next();
                }
                out.push(Tok::Int(n));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let mut name = String::new();
                while let Some(&c) = it.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        name.push(c);
                        it.next();
                    } else {
                        break;
                    }
                }
                out.push(Tok::Ident(name));
            }
            '+' => {
                it.next();
                out.push(Tok::Plus);
            }
            '-' => {
                it.next();
                out.push(Tok::Minus);
            }
            '*' => {
                it.next();
                out.push(Tok::Star);
            }
            '/' => {
                it.next();
                out.push(Tok::Slash);
            }
            '^' => {
                it.next();
                out.push(Tok::Caret);
            }
            '(' => {
                it.next();
                out.push(Tok::LParen);
            }
            ')' => {
                it.next();
                out.push(Tok::RParen);
            }
            '[' => {
                it.next();
                out.push(Tok::LBracket);
            }
            ']' => {
                it.next();
                out.push(Tok::RBracket);
            }
            ':' => {
                it.next();
                out.push(Tok::Colon);
            }
            ',' => {
                it.next();
                out.push(Tok::Comma);
            }
            other => return Err(ParamError::BadChar(other)),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    field: PrimeField,
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(field: PrimeField, toks: &'a [Tok]) -> Self {
        Parser { field, toks, pos: 0 }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &'static str) -> Result<(), ParamError> {
        match self.next() {
            Some(found) if *found == t => Ok(()),
            Some(found) => Err(ParamError::Expected {
                expected: what,
                found: format!("{found:?}"),
            }),
            None => Err(ParamError::UnexpectedEnd),
        }
    }

    /// Signed integer literal, for exponents.
    fn signed_int(&mut self) -> Result<i64, ParamError> {
        let neg = matches!(self.peek(), Some(Tok::Minus));
        if neg {
            self.next();
        }
        match self.next() {
            Some(Tok::Int(n)) => {
                let v = *n as i64;
                Ok(if neg { -v } else { v })
            }
            Some(t) => Err(ParamError::Expected {
                expected: "integer",
                found: format!("{t:?}"),
            }),
            None => Err(ParamError::UnexpectedEnd),
        }
    }

    fn scalar_expr(&mut self) -> Result<Fe, ParamError> {
        let f = self.field;
        let mut acc = self.scalar_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.next();
                    let t = self.scalar_term()?;
                    acc = f.add(acc, t);
                }
                Some(Tok::Minus) => {
                    self.next();
                    let t = self.scalar_term()?;
                    acc = f.sub(acc, t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn scalar_term(&mut self) -> Result<Fe, ParamError> {
        let f = self.field;
        let mut acc = self.scalar_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.next();
                    let t = self.scalar_factor()?;
                    acc = f.mul(acc, t);
                }
                Some(Tok::Slash) => {
                    self.next();
                    let t = self.scalar_factor()?;
                    acc = f.div(acc, t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn scalar_factor(&mut self) -> Result<Fe, ParamError> {
        let f = self.field;
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.next();
            let v = self.scalar_factor()?;
            return Ok(f.neg(v));
        }
        let base = match self.next() {
            Some(Tok::Int(n)) => f.from_u64(*n),
            Some(Tok::Ident(name)) => match name.as_str() {
                "sqrt3" => f.sqrt3(),
                "zeta" => {
                    self.expect(Tok::LParen, "`(` after zeta")?;
                    let n = self.signed_int()?;
                    if n <= 0 {
                        return Err(ParamError::BadToken(format!("zeta({n})")));
                    }
                    self.expect(Tok::RParen, "`)` after zeta order")?;
                    f.root_of_unity(n as u64)?
                }
                other => return Err(ParamError::BadToken(other.to_string())),
            },
            Some(Tok::LParen) => {
                let v = self.scalar_expr()?;
                self.expect(Tok::RParen, "closing `)`")?;
                v
            }
            Some(t) => {
                return Err(ParamError::Expected {
                    expected: "scalar",
                    found: format!("{t:?}"),
                })
            }
            None => return Err(ParamError::UnexpectedEnd),
        };
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.next();
            let e = self.signed_int()?;
            return Ok(f.pow_i(base, e)?);
        }
        Ok(base)
    }

    /// Product of variable powers and scalar factors; one additive term of a
    /// form.
    fn form_term(&mut self) -> Result<(Monomial, Fe), ParamError> {
        let f = self.field;
        let mut coeff = Fe(1);
        let mut exps = [0u32; 3];
        loop {
            let var = match self.peek() {
                Some(Tok::Ident(name)) if matches!(name.as_str(), "X" | "Y" | "Z") => {
                    Some(match name.as_str() {
                        "X" => 0usize,
                        "Y" => 1,
                        _ => 2,
                    })
                }
                _ => None,
            };
            if let Some(i) = var {
                self.next();
                let e = if matches!(self.peek(), Some(Tok::Caret)) {
                    self.next();
                    let e = self.signed_int()?;
                    if e < 0 {
                        return Err(ParamError::BadToken(format!("negative exponent {e}")));
                    }
                    e as u32
                } else {
                    1
                };
                exps[i] += e;
            } else {
                coeff = f.mul(coeff, self.scalar_factor()?);
            }
            if matches!(self.peek(), Some(Tok::Star)) {
                self.next();
            } else {
                break;
            }
        }
        let m = Monomial::new(exps[0] as u8, exps[1] as u8, exps[2] as u8);
        Ok((m, coeff))
    }

    fn done(&self) -> bool {
        self.pos == self.toks.len()
    }
}

/// Parses one scalar expression; the whole input must be consumed.
pub fn parse_scalar(field: PrimeField, text: &str) -> Result<Fe, ParamError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(field, &toks);
    let v = p.scalar_expr()?;
    if !p.done() {
        return Err(ParamError::BadToken(format!("{:?}", p.peek().unwrap())));
    }
    Ok(v)
}

/// Parses a homogeneous form of the given degree. Accepts the canonical
/// rendering of [`TernaryForm`] as well as scalar expressions in the
/// coefficients.
pub fn parse_form(
    field: PrimeField,
    degree: u32,
    text: &str,
) -> Result<TernaryForm, ParamError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(field, &toks);
    let mut form = TernaryForm::zero(field, degree);
    if toks == [Tok::Int(0)] {
        return Ok(form);
    }
    let mut negate = false;
    if matches!(p.peek(), Some(Tok::Minus)) {
        p.next();
        negate = true;
    }
    loop {
        let (m, mut c) = p.form_term()?;
        if negate {
            c = field.neg(c);
        }
        if m.degree() != degree {
            return Err(ParamError::WrongDegree(m.to_string(), m.degree(), degree));
        }
        form.add_term(m, c);
        match p.next() {
            Some(Tok::Plus) => negate = false,
            Some(Tok::Minus) => negate = true,
            Some(t) => {
                return Err(ParamError::Expected {
                    expected: "`+`, `-`, or end of form",
                    found: format!("{t:?}"),
                })
            }
            None => return Ok(form),
        }
    }
}

/// Parses a projective map in either printed notation:
/// `diag(e1,e2,e3)` or `[c1:c2:c3]` where each bracket component is an
/// optional scalar times one of `X, Y, Z`.
pub fn parse_map(field: PrimeField, text: &str) -> Result<ProjectiveMap, ParamError> {
    let toks = tokenize(text)?;
    let mut p = Parser::new(field, &toks);
    let map = match p.peek() {
        Some(Tok::Ident(name)) if name == "diag" => {
            p.next();
            p.expect(Tok::LParen, "`(` after diag")?;
            let a = p.scalar_expr()?;
            p.expect(Tok::Comma, "`,`")?;
            let b = p.scalar_expr()?;
            p.expect(Tok::Comma, "`,`")?;
            let c = p.scalar_expr()?;
            p.expect(Tok::RParen, "closing `)`")?;
            ProjectiveMap::diagonal(field, [a, b, c])
        }
        Some(Tok::LBracket) => {
            p.next();
            let mut perm = [0usize; 3];
            let mut scale = [Fe(1); 3];
            for i in 0..3 {
                let (m, c) = p.form_term()?;
                let (var, e) = match (m.x, m.y, m.z) {
                    (1, 0, 0) => (0, m.x),
                    (0, 1, 0) => (1, m.y),
                    (0, 0, 1) => (2, m.z),
                    _ => {
                        return Err(ParamError::BadToken(format!(
                            "bracket component {m} is not linear in one variable"
                        )))
                    }
                };
                debug_assert_eq!(e, 1);
                perm[i] = var;
                scale[i] = c;
                if i < 2 {
                    p.expect(Tok::Colon, "`:`")?;
                }
            }
            p.expect(Tok::RBracket, "closing `]`")?;
            ProjectiveMap::scaled_permutation(field, perm, scale)
        }
        _ => {
            return Err(ParamError::Expected {
                expected: "`diag(...)` or `[...]`",
                found: format!("{:?}", p.peek()),
            })
        }
    };
    if !p.done() {
        return Err(ParamError::BadToken(format!("{:?}", p.peek().unwrap())));
    }
    Ok(map)
}

/// Parses a parameter file: one `name = expr` per line, `#` comments,
/// blank lines ignored.
pub fn parse_params(
    field: PrimeField,
    text: &str,
) -> Result<BTreeMap<String, Fe>, ParamError> {
    let mut out = BTreeMap::new();
    for raw in text.lines() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (name, expr) = line
            .split_once('=')
            .ok_or_else(|| ParamError::BadLine(raw.to_string()))?;
        let name = name.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'') {
            return Err(ParamError::BadLine(raw.to_string()));
        }
        let value = parse_scalar(field, expr)?;
        if out.insert(name.to_string(), value).is_some() {
            return Err(ParamError::Duplicate(name.to_string()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;

    fn f() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    #[test]
    fn scalars() {
        let f = f();
        assert_eq!(parse_scalar(f, "5").unwrap(), Fe(5));
        assert_eq!(parse_scalar(f, "-1").unwrap(), Fe(756));
        assert_eq!(parse_scalar(f, "760").unwrap(), Fe(3));
        assert_eq!(parse_scalar(f, "sqrt3").unwrap(), Fe(514));
        assert_eq!(parse_scalar(f, "sqrt3 * sqrt3").unwrap(), Fe(3));
        assert_eq!(
            parse_scalar(f, "zeta(3)").unwrap(),
            f.root_of_unity(3).unwrap()
        );
        assert_eq!(
            parse_scalar(f, "zeta(3)^-1").unwrap(),
            f.inv(f.root_of_unity(3).unwrap()).unwrap()
        );
        assert_eq!(parse_scalar(f, "zeta(6)^3").unwrap(), Fe(756));
        assert_eq!(parse_scalar(f, "(1 + 2) * 3 / 9").unwrap(), Fe(1));
        assert_eq!(parse_scalar(f, "2^10").unwrap(), Fe(1024 % 757));
        assert!(parse_scalar(f, "1 / 0").is_err());
        assert!(parse_scalar(f, "zeta(5)").is_err());
        assert!(parse_scalar(f, "bogus").is_err());
        assert!(parse_scalar(f, "1 +").is_err());
    }

    #[test]
    fn param_files() {
        let f = f();
        let text = "\
# branch parameters
alpha41 = zeta(3) + 1
alpha14 = -2   # trailing comment

beta = sqrt3 / 2
";
        let m = parse_params(f, text).unwrap();
        assert_eq!(m.len(), 3);
        assert_eq!(m["alpha14"], Fe(755));
        assert_eq!(m["beta"], f.div(f.sqrt3(), Fe(2)).unwrap());
        assert!(matches!(
            parse_params(f, "x = 1\nx = 2"),
            Err(ParamError::Duplicate(_))
        ));
        assert!(matches!(
            parse_params(f, "just text"),
            Err(ParamError::BadLine(_))
        ));
    }

    #[test]
    fn forms() {
        let f = f();
        let form = parse_form(f, 6, "X^6 + 730*X^3*Y^3 + 2*Z^6").unwrap();
        assert_eq!(form.coeff(Monomial::new(3, 3, 0)), Fe(730));
        let neg = parse_form(f, 6, "X^6 - Y^6").unwrap();
        assert_eq!(neg.coeff(Monomial::new(0, 6, 0)), Fe(756));
        let scaled = parse_form(f, 6, "zeta(3)*X^2*Y^2*Z^2").unwrap();
        assert_eq!(
            scaled.coeff(Monomial::new(2, 2, 2)),
            f.root_of_unity(3).unwrap()
        );
        assert!(matches!(
            parse_form(f, 6, "X^5"),
            Err(ParamError::WrongDegree(_, 5, 6))
        ));
        assert_eq!(parse_form(f, 6, "0").unwrap(), TernaryForm::zero(f, 6));
    }

    #[test]
    fn maps() {
        let f = f();
        let d = parse_map(f, "diag(1, zeta(3), zeta(3)^-1)").unwrap();
        let z3 = f.root_of_unity(3).unwrap();
        assert_eq!(
            d,
            ProjectiveMap::diagonal(f, [Fe(1), z3, f.inv(z3).unwrap()])
        );
        let c = parse_map(f, "[Y:Z:X]").unwrap();
        assert_eq!(c, ProjectiveMap::permutation(f, [1, 2, 0]));
        let s = parse_map(f, "[zeta(6)^-1*Y:Z:X]").unwrap();
        let z6i = f.inv(f.root_of_unity(6).unwrap()).unwrap();
        assert_eq!(
            s,
            ProjectiveMap::scaled_permutation(f, [1, 2, 0], [z6i, Fe(1), Fe(1)])
        );
        assert!(parse_map(f, "[X*Y:Z:X]").is_err());
        assert!(parse_map(f, "nonsense").is_err());
    }

    #[test]
    fn map_render_round_trip() {
        let f = f();
        for text in ["[Y:Z:X]", "diag(1,zeta(3),zeta(3)^2)"] {
            let m = parse_map(f, text).unwrap();
            assert_eq!(parse_map(f, &m.to_string()).unwrap(), m);
        }
    }
}

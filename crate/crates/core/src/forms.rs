//! Homogeneous ternary forms over a prime field: substitution by projective
//! maps, partial derivatives, evaluation, and the structural queries used by
//! the sextic case analysis.
//!
//! Coefficients are kept sparse in a map keyed by exponent triples, ordered
//! graded-lexicographically with `X > Y > Z`, so printing and iteration are
//! deterministic.

use std::collections::BTreeMap;
use std::fmt;

use crate::field::{Fe, PrimeField};
use crate::pgl::ProjectiveMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X => write!(f, "X"),
            Var::Y => write!(f, "Y"),
            Var::Z => write!(f, "Z"),
        }
    }
}

/// Exponent triple `X^x Y^y Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub x: u8,
    pub y: u8,
    pub z: u8,
}

impl Monomial {
    pub fn new(x: u8, y: u8, z: u8) -> Self {
        Monomial { x, y, z }
    }

    pub fn degree(&self) -> u32 {
        self.x as u32 + self.y as u32 + self.z as u32
    }

    pub fn exponent(&self, v: Var) -> u8 {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::Z => self.z,
        }
    }
}

// Graded lex with X > Y > Z; BTreeMap iteration is then ascending, so
// canonical (leading-term-first) order is the reverse.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.x.cmp(&other.x))
            .then(self.y.cmp(&other.y))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, e) in [("X", self.x), ("Y", self.y), ("Z", self.z)] {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Homogeneous form of fixed degree in `X, Y, Z`. Zero coefficients are
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TernaryForm {
    field: PrimeField,
    degree: u32,
    coeffs: BTreeMap<Monomial, Fe>,
}

impl TernaryForm {
    pub fn zero(field: PrimeField, degree: u32) -> Self {
        TernaryForm {
            field,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        field: PrimeField,
        degree: u32,
        terms: impl IntoIterator<Item = (Monomial, Fe)>,
    ) -> Self {
        let mut form = TernaryForm::zero(field, degree);
        for (m, c) in terms {
            form.add_term(m, c);
        }
        form
    }

    /// Adds `c * m`, merging with any existing coefficient.
    pub fn add_term(&mut self, m: Monomial, c: Fe) {
        assert_eq!(m.degree(), self.degree, "monomial degree mismatch");
        if c.0 == 0 {
            return;
        }
        let f = self.field;
        let entry = self.coeffs.entry(m).or_insert(Fe(0));
        *entry = f.add(*entry, c);
        if entry.0 == 0 {
            self.coeffs.remove(&m);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, m: Monomial) -> Fe {
        self.coeffs.get(&m).copied().unwrap_or(Fe(0))
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Fe)> + '_ {
        self.coeffs.iter().map(|(m, c)| (*m, *c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    pub fn scale(&self, c: Fe) -> TernaryForm {
        let f = self.field;
        TernaryForm::from_terms(
            f,
            self.degree,
            self.terms().map(|(m, a)| (m, f.mul(a, c))),
        )
    }

    pub fn add(&self, other: &TernaryForm) -> TernaryForm {
        assert_eq!(self.degree, other.degree);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    /// Product of two forms (degree adds).
    pub fn mul(&self, other: &TernaryForm) -> TernaryForm {
        let f = self.field;
        let mut out = TernaryForm::zero(f, self.degree + other.degree);
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(
                    Monomial::new(m1.x + m2.x, m1.y + m2.y, m1.z + m2.z),
                    f.mul(c1, c2),
                );
            }
        }
        out
    }

    /// Multiplies by a single monomial.
    pub fn mul_monomial(&self, m: Monomial) -> TernaryForm {
        TernaryForm::from_terms(
            self.field,
            self.degree + m.degree(),
            self.terms()
                .map(|(n, c)| (Monomial::new(n.x + m.x, n.y + m.y, n.z + m.z), c)),
        )
    }

    /// `F ∘ M`, the form `x ↦ F(M·x)`. A curve `F = 0` admits `M` as an
    /// automorphism exactly when the result is proportional to `F`.
    ///
    /// Monomial maps (coordinate permutation times diagonal) take a one-term
    /// fast path; general maps expand powers of the three image linear forms.
    pub fn substitute(&self, map: &ProjectiveMap) -> TernaryForm {
        let f = self.field;
        if let Some((perm, scale)) = map.as_monomial() {
            // X_i ↦ scale[i] * X_{perm[i]}: the monomial support is permuted.
            let mut pow = [[Fe(1); 7]; 3];
            for i in 0..3 {
                for e in 1..7 {
                    pow[i][e] = f.mul(pow[i][e - 1], scale[i]);
                }
            }
            let mut out = TernaryForm::zero(f, self.degree);
            for (m, c) in self.terms() {
                let exps = [m.x, m.y, m.z];
                let mut img = [0u8; 3];
                let mut coef = c;
                for i in 0..3 {
                    img[perm[i]] += exps[i];
                    coef = f.mul(coef, pow[i][exps[i] as usize]);
                }
                out.add_term(Monomial::new(img[0], img[1], img[2]), coef);
            }
            return out;
        }
        // Powers of the linear forms M maps each variable to.
        let rows = map.matrix();
        let lin: Vec<TernaryForm> = (0..3)
            .map(|i| {
                TernaryForm::from_terms(
                    f,
                    1,
                    [
                        (Monomial::new(1, 0, 0), rows[i][0]),
                        (Monomial::new(0, 1, 0), rows[i][1]),
                        (Monomial::new(0, 0, 1), rows[i][2]),
                    ],
                )
            })
            .collect();
        let d = self.degree as usize;
        let mut powers: Vec<Vec<TernaryForm>> = Vec::with_capacity(3);
        for l in &lin {
            let mut ps = Vec::with_capacity(d + 1);
            ps.push(TernaryForm::from_terms(
                f,
                0,
                [(Monomial::new(0, 0, 0), Fe(1))],
            ));
            for k in 1..=d {
                let prev: &TernaryForm = &ps[k - 1];
                ps.push(prev.mul(l));
            }
            powers.push(ps);
        }
        let mut out = TernaryForm::zero(f, self.degree);
        for (m, c) in self.terms() {
            let prod = powers[0][m.x as usize]
                .mul(&powers[1][m.y as usize])
                .mul(&powers[2][m.z as usize]);
            out = out.add(&prod.scale(c));
        }
        out
    }

    /// The three formal partial derivatives `(F_X, F_Y, F_Z)`.
    pub fn partials(&self) -> [TernaryForm; 3] {
        let f = self.field;
        let d = |v: Var| {
            TernaryForm::from_terms(
                f,
                self.degree - 1,
                self.terms().filter_map(|(m, c)| {
                    let e = m.exponent(v);
                    if e == 0 {
                        return None;
                    }
                    let n = match v {
                        Var::X => Monomial::new(m.x - 1, m.y, m.z),
                        Var::Y => Monomial::new(m.x, m.y - 1, m.z),
                        Var::Z => Monomial::new(m.x, m.y, m.z - 1),
                    };
                    Some((n, f.mul(c, f.from_u64(e as u64))))
                }),
            )
        };
        [d(Var::X), d(Var::Y), d(Var::Z)]
    }

    /// Returns `c` with `self = c * other` for nonzero `c`, if it exists.
    pub fn proportional(&self, other: &TernaryForm) -> Option<Fe> {
        if self.degree != other.degree || self.coeffs.len() != other.coeffs.len() {
            return None;
        }
        if self.is_zero() {
            // zero forms are proportional with c = 1 by convention
            return Some(Fe(1));
        }
        let f = self.field;
        let mut ratio: Option<Fe> = None;
        for (m, c) in self.terms() {
            let oc = other.coeff(m);
            if oc.0 == 0 {
                return None;
            }
            let r = f.div(c, oc).expect("nonzero divisor");
            match ratio {
                None => ratio = Some(r),
                Some(r0) if r0 != r => return None,
                _ => {}
            }
        }
        ratio
    }

    /// Evaluates at a projective point. Panics on the zero vector.
    pub fn evaluate(&self, point: [Fe; 3]) -> Fe {
        assert!(
            point.iter().any(|c| c.0 != 0),
            "evaluation at the zero vector"
        );
        let f = self.field;
        let mut pow = [[Fe(1); 7]; 3];
        for i in 0..3 {
            for e in 1..7.min(self.degree as usize + 1) {
                pow[i][e] = f.mul(pow[i][e - 1], point[i]);
            }
        }
        let mut acc = Fe(0);
        for (m, c) in self.terms() {
            let t = f.mul(
                f.mul(pow[0][m.x as usize], pow[1][m.y as usize]),
                pow[2][m.z as usize],
            );
            acc = f.add(acc, f.mul(c, t));
        }
        acc
    }

    /// Max exponent of `v` over the support.
    pub fn degree_in(&self, v: Var) -> u8 {
        self.terms().map(|(m, _)| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn support_subset(&self, allowed: &[Monomial]) -> bool {
        self.terms().all(|(m, _)| allowed.contains(&m))
    }

    /// True iff every monomial has even exponent in each of the given
    /// variables.
    pub fn even_in(&self, vars: &[Var]) -> bool {
        self.terms()
            .all(|(m, _)| vars.iter().all(|&v| m.exponent(v) % 2 == 0))
    }

    /// Sum of all terms whose max exponent is greatest: the "core" used by
    /// the descendant criterion.
    pub fn core(&self) -> TernaryForm {
        let top = self
            .terms()
            .map(|(m, _)| m.x.max(m.y).max(m.z))
            .max()
            .unwrap_or(0);
        TernaryForm::from_terms(
            self.field,
            self.degree,
            self.terms().filter(|(m, _)| m.x.max(m.y).max(m.z) == top),
        )
    }
}

impl fmt::Display for TernaryForm {
    /// Canonical rendering: terms in descending graded-lex order,
    /// coefficients as residues. Round-trips through [`crate::params::parse_form`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.coeffs.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if c.0 == 1 && m.degree() > 0 {
                write!(f, "{m}")?;
            } else if m.degree() == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;
    use crate::pgl::ProjectiveMap;

    fn f() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    fn fermat(field: PrimeField) -> TernaryForm {
        TernaryForm::from_terms(
            field,
            6,
            [
                (Monomial::new(6, 0, 0), Fe(1)),
                (Monomial::new(0, 6, 0), Fe(1)),
                (Monomial::new(0, 0, 6), Fe(1)),
            ],
        )
    }

    fn klein(field: PrimeField) -> TernaryForm {
        TernaryForm::from_terms(
            field,
            6,
            [
                (Monomial::new(5, 1, 0), Fe(1)),
                (Monomial::new(0, 5, 1), Fe(1)),
                (Monomial::new(1, 0, 5), Fe(1)),
            ],
        )
    }

    #[test]
    fn substitute_symmetric_form_by_cycle() {
        let f = f();
        let form = fermat(f);
        let cycle = ProjectiveMap::permutation(f, [1, 2, 0]);
        assert_eq!(form.substitute(&cycle), form);
        let id = ProjectiveMap::identity(f);
        assert_eq!(form.substitute(&id), form);
    }

    #[test]
    fn klein_eigenform_under_diag() {
        let f = f();
        let k6 = klein(f);
        let z21 = f.root_of_unity(21).unwrap();
        let m = ProjectiveMap::diagonal(f, [Fe(1), z21, f.pow_i(z21, -4).unwrap()]);
        let image = k6.substitute(&m);
        assert_eq!(image.proportional(&k6), Some(z21));
    }

    #[test]
    fn substitution_respects_composition() {
        let f = f();
        let k6 = klein(f);
        let a = ProjectiveMap::new(
            f,
            [
                [Fe(1), Fe(2), Fe(3)],
                [Fe(0), Fe(1), Fe(5)],
                [Fe(4), Fe(0), Fe(1)],
            ],
        )
        .unwrap();
        let b = ProjectiveMap::new(
            f,
            [
                [Fe(2), Fe(0), Fe(1)],
                [Fe(1), Fe(1), Fe(0)],
                [Fe(0), Fe(3), Fe(1)],
            ],
        )
        .unwrap();
        let lhs = k6.substitute(&a).substitute(&b);
        let rhs = k6.substitute(&a.compose(&b));
        // substitute(F, M)(x) = F(Mx), so (F∘A)∘B = F∘(AB)
        assert!(lhs.proportional(&rhs).is_some());
    }

    #[test]
    fn partials_and_euler_identity() {
        let f = f();
        let x6 = TernaryForm::from_terms(f, 6, [(Monomial::new(6, 0, 0), Fe(1))]);
        let [px, py, pz] = x6.partials();
        assert_eq!(px.coeff(Monomial::new(5, 0, 0)), Fe(6));
        assert!(py.is_zero() && pz.is_zero());

        // Euler identity on an arbitrary sextic
        let form = TernaryForm::from_terms(
            f,
            6,
            [
                (Monomial::new(6, 0, 0), Fe(3)),
                (Monomial::new(2, 2, 2), Fe(11)),
                (Monomial::new(1, 0, 5), Fe(99)),
                (Monomial::new(0, 6, 0), Fe(700)),
            ],
        );
        let [fx, fy, fz] = form.partials();
        let x = Monomial::new(1, 0, 0);
        let y = Monomial::new(0, 1, 0);
        let z = Monomial::new(0, 0, 1);
        let euler = fx
            .mul_monomial(x)
            .add(&fy.mul_monomial(y))
            .add(&fz.mul_monomial(z));
        assert_eq!(euler, form.scale(Fe(6)));
    }

    #[test]
    fn proportionality_cases() {
        let f = f();
        let x6 = TernaryForm::from_terms(f, 6, [(Monomial::new(6, 0, 0), Fe(1))]);
        let y6 = TernaryForm::from_terms(f, 6, [(Monomial::new(0, 6, 0), Fe(1))]);
        let two_x6 = x6.scale(Fe(2));
        assert_eq!(two_x6.proportional(&x6), Some(Fe(2)));
        assert_eq!(x6.proportional(&y6), None);
        // symmetry: c and c^{-1}
        assert_eq!(x6.proportional(&two_x6), Some(f.inv(Fe(2)).unwrap()));
    }

    #[test]
    fn evaluation_at_vertices() {
        let f = f();
        let one = [Fe(1), Fe(0), Fe(0)];
        assert_eq!(fermat(f).evaluate(one), Fe(1));
        assert_eq!(klein(f).evaluate(one), Fe(0));
    }

    #[test]
    fn structure_queries() {
        let f = f();
        let form = TernaryForm::from_terms(
            f,
            6,
            [
                (Monomial::new(5, 1, 0), Fe(1)),
                (Monomial::new(0, 0, 6), Fe(1)),
            ],
        );
        assert_eq!(form.degree_in(Var::X), 5);
        assert!(!form.even_in(&[Var::X, Var::Y]));

        let even = TernaryForm::from_terms(
            f,
            6,
            [
                (Monomial::new(4, 2, 0), Fe(1)),
                (Monomial::new(6, 0, 0), Fe(1)),
            ],
        );
        assert!(even.even_in(&[Var::X, Var::Y]));
    }

    #[test]
    fn core_of_klein_like_form() {
        let f = f();
        let mut form = klein(f);
        form.add_term(Monomial::new(2, 2, 2), Fe(5));
        assert_eq!(form.core(), klein(f));
    }

    #[test]
    fn render_round_trip() {
        let f = f();
        let form = TernaryForm::from_terms(
            f,
            6,
            [
                (Monomial::new(6, 0, 0), Fe(1)),
                (Monomial::new(3, 3, 0), Fe(730)),
                (Monomial::new(0, 0, 6), Fe(2)),
            ],
        );
        let text = form.to_string();
        assert_eq!(text, "X^6 + 730*X^3*Y^3 + 2*Z^6");
        let back = crate::params::parse_form(f, 6, &text).unwrap();
        assert_eq!(back, form);
    }
}

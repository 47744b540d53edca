//! Constructors for the sextic curve families, the special transport
//! matrices, branch-condition evaluation, and the smoothness test.
//!
//! Family coefficients follow the alpha indexing of the defining displays:
//! `a_{i,j}` multiplies the monomial with `X`-exponent `i` and `Y`-exponent
//! `j` (the `Z`-exponent is determined by homogeneity).

use serde::Serialize;
use thiserror::Error;

use crate::field::{Fe, FieldError, PrimeField};
use crate::forms::{Monomial, TernaryForm};
use crate::pgl::ProjectiveMap;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn bad(msg: impl Into<String>) -> FamilyError {
    FamilyError::BadParams(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyId {
    Thm1,
    Thm1Even,
    Thm2,
    Thm2Special,
    C1,
    C2,
    C1Prime,
    C1DoublePrime,
    C1A4,
    C2A4,
    Fermat6,
    Klein6,
}

impl FamilyId {
    pub const ALL: [FamilyId; 12] = [
        FamilyId::Thm1,
        FamilyId::Thm1Even,
        FamilyId::Thm2,
        FamilyId::Thm2Special,
        FamilyId::C1,
        FamilyId::C2,
        FamilyId::C1Prime,
        FamilyId::C1DoublePrime,
        FamilyId::C1A4,
        FamilyId::C2A4,
        FamilyId::Fermat6,
        FamilyId::Klein6,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyId::Thm1 => "thm1",
            FamilyId::Thm1Even => "thm1-even",
            FamilyId::Thm2 => "thm2",
            FamilyId::Thm2Special => "thm2-special",
            FamilyId::C1 => "c1",
            FamilyId::C2 => "c2",
            FamilyId::C1Prime => "c1-prime",
            FamilyId::C1DoublePrime => "c1-double-prime",
            FamilyId::C1A4 => "c1-a4",
            FamilyId::C2A4 => "c2-a4",
            FamilyId::Fermat6 => "fermat6",
            FamilyId::Klein6 => "klein6",
        }
    }

    pub fn from_name(s: &str) -> Option<FamilyId> {
        FamilyId::ALL.iter().copied().find(|id| id.name() == s)
    }
}

/// Coefficient records per family. Binary forms in `X, Y` of degree `d` are
/// coefficient vectors of length `d + 1`, index `i` holding the coefficient
/// of `X^{d-i} Y^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FamilyParams {
    /// `Z^6 + Z^4 L2 + Z^2 L4 + L6`
    Thm1 { l2: Vec<Fe>, l4: Vec<Fe>, l6: Vec<Fe> },
    /// `Z^6 + Z^3 L3 + L6`
    Thm2 { l3: Vec<Fe>, l6: Vec<Fe> },
    /// `X^6+Y^6+Z^6 + Z^3(a30 X^3 + a03 Y^3) + a33 X^3 Y^3`
    Thm2Special { a30: Fe, a03: Fe, a33: Fe },
    C1 {
        a41: Fe,
        a14: Fe,
        a11: Fe,
        a22: Fe,
        a33: Fe,
        a30: Fe,
        a03: Fe,
    },
    C2 {
        a32: Fe,
        a13: Fe,
        a21: Fe,
        a24: Fe,
        a02: Fe,
        a40: Fe,
    },
    C1Prime {
        a41: Fe,
        a33: Fe,
        a22: Fe,
        a12: Fe,
        a03: Fe,
    },
    C1DoublePrime { ell: u8, a11: Fe, a30: Fe },
    /// Shared by C1A4 and C2A4.
    A4 { lambda: Fe, mu: Fe },
    /// Fermat6 and Klein6 take no parameters.
    None,
}

fn m(x: u8, y: u8, z: u8) -> Monomial {
    Monomial::new(x, y, z)
}

fn binary_terms(coeffs: &[Fe], deg: u8, zexp: u8) -> Vec<(Monomial, Fe)> {
    coeffs
        .iter()
        .enumerate()
        .map(|(i, &c)| (m(deg - i as u8, i as u8, zexp), c))
        .collect()
}

fn binary_is_zero(coeffs: &[Fe]) -> bool {
    coeffs.iter().all(|c| c.0 == 0)
}

fn binary_even(coeffs: &[Fe], deg: u8) -> bool {
    // even powers of both X and Y: X^{d-i} Y^i with i and d-i even
    coeffs
        .iter()
        .enumerate()
        .all(|(i, c)| c.0 == 0 || (i % 2 == 0 && (deg as usize - i) % 2 == 0))
}

pub fn fermat6(f: PrimeField) -> TernaryForm {
    TernaryForm::from_terms(
        f,
        6,
        [(m(6, 0, 0), Fe(1)), (m(0, 6, 0), Fe(1)), (m(0, 0, 6), Fe(1))],
    )
}

pub fn klein6(f: PrimeField) -> TernaryForm {
    TernaryForm::from_terms(
        f,
        6,
        [(m(5, 1, 0), Fe(1)), (m(0, 5, 1), Fe(1)), (m(1, 0, 5), Fe(1))],
    )
}

/// Builds the displayed defining polynomial of the family.
pub fn build(
    id: FamilyId,
    params: &FamilyParams,
    f: PrimeField,
) -> Result<TernaryForm, FamilyError> {
    match (id, params) {
        (FamilyId::Fermat6, FamilyParams::None) => Ok(fermat6(f)),
        (FamilyId::Klein6, FamilyParams::None) => Ok(klein6(f)),
        (FamilyId::Thm1 | FamilyId::Thm1Even, FamilyParams::Thm1 { l2, l4, l6 }) => {
            if l2.len() != 3 || l4.len() != 5 || l6.len() != 7 {
                return Err(bad("thm1 needs binary forms of degrees 2, 4, 6"));
            }
            // degree >= 5 in X means a nonzero coefficient on X^6 or X^5 Y
            if l6[0].0 == 0 && l6[1].0 == 0 {
                return Err(bad("L6 must have degree >= 5 in X"));
            }
            if l6[6].0 == 0 && l6[5].0 == 0 {
                return Err(bad("L6 must have degree >= 5 in Y"));
            }
            if binary_is_zero(l2) && binary_is_zero(l4) {
                return Err(bad("L2 and L4 cannot both vanish"));
            }
            if id == FamilyId::Thm1Even
                && !(binary_even(l2, 2) && binary_even(l4, 4) && binary_even(l6, 6))
            {
                return Err(bad("thm1-even needs L2, L4, L6 in K[X^2, Y^2]"));
            }
            let mut terms = vec![(m(0, 0, 6), Fe(1))];
            terms.extend(binary_terms(l2, 2, 4));
            terms.extend(binary_terms(l4, 4, 2));
            terms.extend(binary_terms(l6, 6, 0));
            Ok(TernaryForm::from_terms(f, 6, terms))
        }
        (FamilyId::Thm2, FamilyParams::Thm2 { l3, l6 }) => {
            if l3.len() != 4 || l6.len() != 7 {
                return Err(bad("thm2 needs binary forms of degrees 3, 6"));
            }
            if binary_is_zero(l3) || binary_is_zero(l6) {
                return Err(bad("neither L3 nor L6 may vanish"));
            }
            let mut terms = vec![(m(0, 0, 6), Fe(1))];
            terms.extend(binary_terms(l3, 3, 3));
            terms.extend(binary_terms(l6, 6, 0));
            Ok(TernaryForm::from_terms(f, 6, terms))
        }
        (FamilyId::Thm2Special, FamilyParams::Thm2Special { a30, a03, a33 }) => {
            Ok(TernaryForm::from_terms(
                f,
                6,
                [
                    (m(6, 0, 0), Fe(1)),
                    (m(0, 6, 0), Fe(1)),
                    (m(0, 0, 6), Fe(1)),
                    (m(3, 0, 3), *a30),
                    (m(0, 3, 3), *a03),
                    (m(3, 3, 0), *a33),
                ],
            ))
        }
        (FamilyId::C1, FamilyParams::C1 { a41, a14, a11, a22, a33, a30, a03 }) => {
            Ok(TernaryForm::from_terms(
                f,
                6,
                [
                    (m(6, 0, 0), Fe(1)),
                    (m(0, 6, 0), Fe(1)),
                    (m(0, 0, 6), Fe(1)),
                    (m(4, 1, 1), *a41),
                    (m(1, 4, 1), *a14),
                    (m(1, 1, 4), *a11),
                    (m(2, 2, 2), *a22),
                    (m(3, 3, 0), *a33),
                    (m(3, 0, 3), *a30),
                    (m(0, 3, 3), *a03),
                ],
            ))
        }
        (FamilyId::C2, FamilyParams::C2 { a32, a13, a21, a24, a02, a40 }) => {
            Ok(TernaryForm::from_terms(
                f,
                6,
                [
                    (m(5, 1, 0), Fe(1)),
                    (m(0, 5, 1), Fe(1)),
                    (m(1, 0, 5), Fe(1)),
                    (m(3, 2, 1), *a32),
                    (m(1, 3, 2), *a13),
                    (m(2, 1, 3), *a21),
                    (m(2, 4, 0), *a24),
                    (m(0, 2, 4), *a02),
                    (m(4, 0, 2), *a40),
                ],
            ))
        }
        (FamilyId::C1Prime, FamilyParams::C1Prime { a41, a33, a22, a12, a03 }) => {
            Ok(TernaryForm::from_terms(
                f,
                6,
                [
                    (m(6, 0, 0), Fe(1)),
                    (m(0, 6, 0), Fe(1)),
                    (m(0, 0, 6), Fe(1)),
                    (m(4, 1, 1), *a41),
                    (m(3, 3, 0), *a33),
                    (m(3, 0, 3), *a33),
                    (m(2, 2, 2), *a22),
                    (m(1, 4, 1), *a12),
                    (m(1, 1, 4), *a12),
                    (m(0, 3, 3), *a03),
                ],
            ))
        }
        (FamilyId::C1DoublePrime, FamilyParams::C1DoublePrime { ell, a11, a30 }) => {
            if ![1, 2, 4, 5].contains(ell) {
                return Err(bad("ell must be 1, 2, 4 or 5"));
            }
            if a11.0 == 0 {
                return Err(bad("a11 must be nonzero"));
            }
            let w = f.zeta_pow(6, 2 * *ell as i64)?; // zeta_6^{2l}
            let wi = f.inv(w)?;
            Ok(TernaryForm::from_terms(
                f,
                6,
                [
                    (m(6, 0, 0), Fe(1)),
                    (m(0, 6, 0), w),
                    (m(0, 0, 6), wi),
                    (m(4, 1, 1), *a11),
                    (m(1, 4, 1), f.mul(*a11, w)),
                    (m(1, 1, 4), f.mul(*a11, wi)),
                    (m(3, 3, 0), *a30),
                    (m(3, 0, 3), f.mul(*a30, wi)),
                    (m(0, 3, 3), f.mul(*a30, w)),
                ],
            ))
        }
        (FamilyId::C1A4, FamilyParams::A4 { lambda, mu }) => {
            let p = a4_c1_params(f, *lambda, *mu, 0)?;
            build(FamilyId::C1, &p, f)
        }
        (FamilyId::C2A4, FamilyParams::A4 { lambda, mu }) => {
            let p = a4_c2_params(f, *lambda, *mu, 0)?;
            build(FamilyId::C2, &p, f)
        }
        _ => Err(bad(format!("parameter record does not match family {id:?}"))),
    }
}

/// The C1 coefficients forced by membership of `phi_i diag(1,1,-1) phi_i^-1`
/// in the automorphism group. `rot` 0, 1, 2 selects the listed ordering
/// (transport via phi_1/phi_4, phi_2/phi_5, phi_3/phi_6 respectively).
pub fn a4_c1_params(
    f: PrimeField,
    lambda: Fe,
    mu: Fe,
    rot: u8,
) -> Result<FamilyParams, FamilyError> {
    if lambda.0 == 0 || mu.0 == 0 {
        return Err(bad("lambda and mu must be nonzero"));
    }
    if rot > 2 {
        return Err(bad("ordering index must be 0, 1 or 2"));
    }
    let l6 = f.pow(lambda, 6);
    let m6 = f.pow(mu, 6);
    let int = |n: i64| f.from_i64(n);
    let lin = |a: i64, b: i64, c: i64| {
        // a*lambda^6 + b*mu^6 + c
        f.add(f.add(f.mul(int(a), l6), f.mul(int(b), m6)), int(c))
    };
    let frac = |num: Fe, den: Fe| f.div(num, den).map_err(FamilyError::from);
    let two = Fe(2);
    let d27 = int(27);
    // the three XYZ-type coefficients, in display order
    let f1 = frac(
        f.mul(two, lin(-54, -54, 29)),
        f.mul(d27, f.mul(lambda, mu)),
    )?;
    let f2 = frac(
        f.mul(two, lin(-54, 27, -52)),
        f.mul(d27, f.mul(lambda, f.pow(mu, 4))),
    )?;
    let f3 = frac(
        f.mul(two, lin(27, -54, -52)),
        f.mul(d27, f.mul(f.pow(lambda, 4), mu)),
    )?;
    // the three X^3Y^3-type coefficients, in display order
    let g1 = frac(f.mul(two, lin(81, -27, -26)), f.mul(d27, f.pow(mu, 3)))?;
    let g2 = frac(f.mul(two, lin(-27, 81, -26)), f.mul(d27, f.pow(lambda, 3)))?;
    let g3 = frac(
        f.mul(two, lin(-27, -27, 82)),
        f.mul(d27, f.mul(f.pow(lambda, 3), f.pow(mu, 3))),
    )?;
    let a22 = frac(
        lin(9, 9, 10),
        f.mul(int(3), f.mul(f.pow(lambda, 2), f.pow(mu, 2))),
    )?;
    let (a41, a11, a14, a30, a33, a03) = match rot {
        0 => (f1, f2, f3, g1, g2, g3),
        1 => (f2, f3, f1, g3, g1, g2),
        _ => (f3, f1, f2, g2, g3, g1),
    };
    Ok(FamilyParams::C1 { a41, a14, a11, a22, a33, a30, a03 })
}

/// The C2 coefficients forced by membership of `psi_i diag(1,1,-1) psi_i^-1`
/// in the automorphism group; `rot` selects the listed ordering.
pub fn a4_c2_params(
    f: PrimeField,
    lambda: Fe,
    mu: Fe,
    rot: u8,
) -> Result<FamilyParams, FamilyError> {
    if lambda.0 == 0 || mu.0 == 0 {
        return Err(bad("lambda and mu must be nonzero"));
    }
    if rot > 2 {
        return Err(bad("ordering index must be 0, 1 or 2"));
    }
    let l5m = f.mul(f.pow(lambda, 5), mu);
    let m5 = f.pow(mu, 5);
    let int = |n: u64| f.from_u64(n);
    let lin = |a: u64, b: u64, c: u64| {
        // a*lambda^5*mu + b*lambda + c*mu^5
        f.add(f.add(f.mul(int(a), l5m), f.mul(int(b), lambda)), f.mul(int(c), m5))
    };
    let frac = |num: Fe, den: Fe| f.div(num, den).map_err(FamilyError::from);
    let h1 = frac(lin(1, 0, 4), f.mul(Fe(2), f.pow(lambda, 4)))?;
    let h2 = frac(lin(4, 1, 0), f.mul(Fe(2), f.pow(mu, 2)))?;
    let h3 = frac(
        lin(0, 4, 1),
        f.mul(Fe(2), f.mul(f.pow(lambda, 2), f.pow(mu, 4))),
    )?;
    let k1 = frac(
        f.mul(Fe(2), lin(2, 2, 1)),
        f.mul(f.pow(lambda, 3), f.pow(mu, 2)),
    )?;
    let k2 = frac(lin(2, 4, 4), f.mul(f.pow(lambda, 2), mu))?;
    let k3 = frac(f.mul(Fe(2), lin(2, 1, 2)), f.mul(lambda, f.pow(mu, 3)))?;
    let (a24, a40, a02, a13, a32, a21) = match rot {
        0 => (h1, h2, h3, k1, k2, k3),
        1 => (h2, h3, h1, k2, k3, k1),
        _ => (h3, h1, h2, k3, k1, k2),
    };
    Ok(FamilyParams::C2 { a32, a13, a21, a24, a02, a40 })
}

/// `(f1, f2(lambda,mu), f2(mu,lambda))` for the `C_{1,lambda,mu}` normal
/// form.
pub fn f_coeffs(f: PrimeField, lambda: Fe, mu: Fe) -> Result<(Fe, Fe, Fe), FamilyError> {
    if lambda.0 == 0 || mu.0 == 0 {
        return Err(bad("lambda and mu must be nonzero"));
    }
    let l6 = f.pow(lambda, 6);
    let m6 = f.pow(mu, 6);
    let z3 = f.root_of_unity(3)?;
    let z3i = f.inv(z3)?;
    let f1 = f.mul(
        Fe(3),
        f.add(f.from_u64(80), f.mul(Fe(81), f.add(l6, m6))),
    );
    let f2 = |a: Fe, b: Fe| {
        f.mul(
            Fe(81),
            f.add(Fe(1), f.add(f.mul(z3, a), f.mul(z3i, b))),
        )
    };
    Ok((f1, f2(l6, m6), f2(m6, l6)))
}

/// `(g1, g2)` for the `C_{2,lambda,mu}` normal form.
pub fn g_coeffs(f: PrimeField, lambda: Fe, mu: Fe) -> Result<(Fe, Fe), FamilyError> {
    if lambda.0 == 0 || mu.0 == 0 {
        return Err(bad("lambda and mu must be nonzero"));
    }
    let l5m = f.mul(f.pow(lambda, 5), mu);
    let m5 = f.pow(mu, 5);
    let den = f.add(f.add(l5m, lambda), m5);
    if den.0 == 0 {
        return Err(bad("lambda^5 mu + lambda + mu^5 must be nonzero"));
    }
    let s3 = f.sqrt3();
    let z4 = f.root_of_unity(4)?;
    let z9 = f.root_of_unity(9)?;
    let z12 = f.root_of_unity(12)?;
    let z125 = f.pow(z12, 5);
    let z18 = f.root_of_unity(18)?;
    let num1 = f.add(
        f.add(f.mul(z4, l5m), f.mul(z12, lambda)),
        f.mul(z125, m5),
    );
    let num2 = f.add(
        f.add(f.mul(z125, l5m), f.mul(z12, lambda)),
        f.mul(z4, m5),
    );
    let g1 = f.div(f.mul(f.mul(s3, z9), num1), den)?;
    let g2 = f.div(f.mul(f.mul(s3, z18), num2), den)?;
    Ok((g1, g2))
}

/// `C_{1,lambda,mu}` built from the f-coefficients.
pub fn normal_form_c1(
    f: PrimeField,
    lambda: Fe,
    mu: Fe,
) -> Result<TernaryForm, FamilyError> {
    let (f1, f2lm, f2ml) = f_coeffs(f, lambda, mu)?;
    Ok(TernaryForm::from_terms(
        f,
        6,
        [
            (m(6, 0, 0), Fe(1)),
            (m(0, 6, 0), Fe(1)),
            (m(0, 0, 6), Fe(1)),
            (m(2, 2, 2), f1),
            (m(4, 2, 0), f2lm),
            (m(2, 0, 4), f2lm),
            (m(0, 4, 2), f2lm),
            (m(4, 0, 2), f2ml),
            (m(2, 4, 0), f2ml),
            (m(0, 2, 4), f2ml),
        ],
    ))
}

/// `C_{2,lambda,mu}` built from the g-coefficients.
pub fn normal_form_c2(
    f: PrimeField,
    lambda: Fe,
    mu: Fe,
) -> Result<TernaryForm, FamilyError> {
    let (g1, g2) = g_coeffs(f, lambda, mu)?;
    let z3 = f.root_of_unity(3)?;
    let z3i = f.inv(z3)?;
    Ok(TernaryForm::from_terms(
        f,
        6,
        [
            (m(6, 0, 0), Fe(1)),
            (m(0, 6, 0), Fe(1)),
            (m(0, 0, 6), Fe(1)),
            (m(4, 2, 0), f.mul(g1, z3i)),
            (m(2, 0, 4), g1),
            (m(0, 4, 2), g1),
            (m(4, 0, 2), g2),
            (m(2, 4, 0), f.mul(g2, z3)),
            (m(0, 2, 4), g2),
        ],
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransportKind {
    Phi,
    Psi,
}

/// The matrices `phi_1..phi_6` (conjugating into `rho1(A4)`) and
/// `psi_1..psi_6` (into `rho2(A4)`).
pub fn transport_matrix(
    kind: TransportKind,
    index: u8,
    f: PrimeField,
    lambda: Fe,
    mu: Fe,
) -> Result<ProjectiveMap, FamilyError> {
    if lambda.0 == 0 || mu.0 == 0 {
        return Err(bad("lambda and mu must be nonzero"));
    }
    if !(1..=6).contains(&index) {
        return Err(bad("transport index must be in 1..=6"));
    }
    let base = match kind {
        TransportKind::Phi => {
            let z3 = f.root_of_unity(3)?;
            let z3i = f.inv(z3)?;
            // phi_1 uses (1, z3^-1, z3) in the lambda row, phi_4 swaps them
            let (a, b) = if index <= 3 { (z3i, z3) } else { (z3, z3i) };
            ProjectiveMap::new(
                f,
                [
                    [Fe(1), Fe(1), Fe(1)],
                    [lambda, f.mul(a, lambda), f.mul(b, lambda)],
                    [mu, f.mul(b, mu), f.mul(a, mu)],
                ],
            )
            .map_err(|e| bad(format!("transport matrix is singular: {e}")))?
        }
        TransportKind::Psi => {
            // psi_1 rows use zeta_18 exponents (0,-2,-1), (0,-8,5), (0,4,-7);
            // psi_4 negates all the exponents.
            let sign: i64 = if index <= 3 { 1 } else { -1 };
            let z = |k: i64| f.zeta_pow(18, sign * k);
            ProjectiveMap::new(
                f,
                [
                    [Fe(1), z(-2)?, z(-1)?],
                    [lambda, f.mul(z(-8)?, lambda), f.mul(z(5)?, lambda)],
                    [mu, f.mul(z(4)?, mu), f.mul(z(-7)?, mu)],
                ],
            )
            .map_err(|e| bad(format!("transport matrix is singular: {e}")))?
        }
    };
    // Index 2/5 permutes the rows to (mu, 1, lambda), index 3/6 to
    // (lambda, mu, 1), matching the displayed matrices.
    Ok(match index % 3 {
        1 => base,
        2 => ProjectiveMap::permutation(f, [2, 0, 1]).compose(&base),
        _ => ProjectiveMap::permutation(f, [1, 2, 0]).compose(&base),
    })
}

/// `diag(1, zeta_21^{r'}, zeta_21^{17 r'})`, the element of `Aut(K6)`
/// normalizing the order-9 subgroup; valid only when `21 | 18r' + r` and
/// `21 | 12r' - 4r` (both reduce to `r = 3r' mod 21`).
pub fn klein_normalizer(f: PrimeField, r: i64, rp: i64) -> Result<ProjectiveMap, FamilyError> {
    if (18 * rp + r).rem_euclid(21) != 0 || (12 * rp - 4 * r).rem_euclid(21) != 0 {
        return Err(bad(format!(
            "congruences 21 | 18r'+r and 21 | 12r'-4r fail for r={r}, r'={rp}"
        )));
    }
    Ok(ProjectiveMap::diagonal(
        f,
        [Fe(1), f.zeta_pow(21, rp)?, f.zeta_pow(21, 17 * rp)?],
    ))
}

/// `diag(1, s, t)` with `t` the canonical cube root of `zeta_6` (`t =
/// zeta_18`, `s = t^2`).
pub fn cor3123_map(f: PrimeField) -> ProjectiveMap {
    let t = f.root_of_unity(18).expect("18 | p-1");
    ProjectiveMap::diagonal(f, [Fe(1), f.mul(t, t), t])
}

/// One theorem branch a parameter record can satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Thm1Generic,
    Thm1Even,
    Thm2Generic,
    /// alphas pairwise distinct modulo sign
    Thm2SpecialDistinct,
    /// two alphas agree up to sign; the theorem's hypothesis fails
    Thm2SpecialDegenerate,
    C1Generic,
    /// (1)(i): a41 = a14 = a11 = a22 = 0
    C1i { a33_ne_a30: bool },
    /// (1)(ii) variant (a), (b) or (c); 0-indexed
    C1ii { case: u8 },
    /// (1)(iii) with the matched zeta_6 exponent
    C1iii { ell: u8 },
    C2Generic,
    /// (2)(i) with the matched zeta_21 exponent
    C2i { r: u8, guard: bool },
    /// C1Prime split: extra order-3 symmetry absent (S3) or present
    C1PrimeS3,
    C1PrimeSemidirect,
    C1DoublePrime,
    A4,
    Fermat,
    Klein,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BranchReport {
    /// all satisfied branches, most specific last
    pub branches: Vec<Branch>,
}

fn eq_mod_sign(f: PrimeField, a: Fe, b: Fe) -> bool {
    a == b || a == f.neg(b)
}

/// Evaluates the closed-form branch conditions of the theorems on a
/// parameter record.
pub fn branch_conditions(id: FamilyId, params: &FamilyParams, f: PrimeField) -> BranchReport {
    let mut branches = Vec::new();
    match (id, params) {
        (FamilyId::Thm1, FamilyParams::Thm1 { l2, l4, l6 }) => {
            if binary_even(l2, 2) && binary_even(l4, 4) && binary_even(l6, 6) {
                branches.push(Branch::Thm1Even);
            } else {
                branches.push(Branch::Thm1Generic);
            }
        }
        (FamilyId::Thm1Even, FamilyParams::Thm1 { .. }) => branches.push(Branch::Thm1Even),
        (FamilyId::Thm2, FamilyParams::Thm2 { .. }) => branches.push(Branch::Thm2Generic),
        (FamilyId::Thm2Special, FamilyParams::Thm2Special { a30, a03, a33 }) => {
            let distinct = !eq_mod_sign(f, *a30, *a03)
                && !eq_mod_sign(f, *a30, *a33)
                && !eq_mod_sign(f, *a03, *a33);
            branches.push(if distinct {
                Branch::Thm2SpecialDistinct
            } else {
                Branch::Thm2SpecialDegenerate
            });
        }
        (FamilyId::C1 | FamilyId::C1A4, FamilyParams::C1 { a41, a14, a11, a22, a33, a30, a03 }) => {
            if a41.0 == 0 && a14.0 == 0 && a11.0 == 0 && a22.0 == 0 {
                branches.push(Branch::C1i { a33_ne_a30: a33 != a30 });
            }
            // (1)(ii) (a): a41 = +-a14 and a30 = +-a03
            if eq_mod_sign(f, *a41, *a14) && eq_mod_sign(f, *a30, *a03) {
                branches.push(Branch::C1ii { case: 0 });
            }
            // (b): a14 = +-a11 and a33 = +-a30
            if eq_mod_sign(f, *a14, *a11) && eq_mod_sign(f, *a33, *a30) {
                branches.push(Branch::C1ii { case: 1 });
            }
            // (c): a41 = +-a11 and a33 = +-a03
            if eq_mod_sign(f, *a41, *a11) && eq_mod_sign(f, *a33, *a03) {
                branches.push(Branch::C1ii { case: 2 });
            }
            // (1)(iii): a41 = zeta_6^l a11, a14 = +-zeta_6^-l a11,
            // a33 = +-(-1)^l a30, a03 = +-a30, for l not 0 or 3 mod 6
            if a11.0 != 0 {
                for ell in [1u8, 2, 4, 5] {
                    let w = f.zeta_pow(6, ell as i64).expect("6 | p-1");
                    let wi = f.inv(w).expect("nonzero");
                    let neg1l = if ell % 2 == 0 { Fe(1) } else { f.neg(Fe(1)) };
                    if *a41 == f.mul(w, *a11)
                        && eq_mod_sign(f, *a14, f.mul(wi, *a11))
                        && eq_mod_sign(f, *a33, f.mul(neg1l, *a30))
                        && eq_mod_sign(f, *a03, *a30)
                    {
                        branches.push(Branch::C1iii { ell });
                    }
                }
            }
            if branches.is_empty() {
                branches.push(Branch::C1Generic);
            }
        }
        (FamilyId::C2 | FamilyId::C2A4, FamilyParams::C2 { a32, a13, a21, a24, a02, a40 }) => {
            for r in 0..21u8 {
                let z = |k: i64| f.zeta_pow(21, k).expect("21 | p-1");
                if *a02 == f.mul(z(-12 * r as i64), *a40)
                    && *a24 == f.mul(z(3 * r as i64), *a40)
                    && *a13 == f.mul(z(-6 * r as i64), *a32)
                    && *a21 == f.mul(z(3 * r as i64), *a32)
                {
                    let guard = a24.0 != 0 || a13.0 != 0;
                    branches.push(Branch::C2i { r, guard });
                }
            }
            if branches.is_empty() {
                branches.push(Branch::C2Generic);
            }
        }
        (FamilyId::C1Prime, FamilyParams::C1Prime { a41, a33, a12, a03, .. }) => {
            if a41 != a12 || a33 != a03 {
                branches.push(Branch::C1PrimeS3);
            } else {
                branches.push(Branch::C1PrimeSemidirect);
            }
        }
        (FamilyId::C1DoublePrime, FamilyParams::C1DoublePrime { .. }) => {
            branches.push(Branch::C1DoublePrime)
        }
        (FamilyId::C1A4 | FamilyId::C2A4, FamilyParams::A4 { .. }) => branches.push(Branch::A4),
        (FamilyId::Fermat6, _) => branches.push(Branch::Fermat),
        (FamilyId::Klein6, _) => branches.push(Branch::Klein),
        _ => {}
    }
    BranchReport { branches }
}

/// Monomials of total degree `d`, ordered.
pub fn monomials_of_degree(d: u8) -> Vec<Monomial> {
    let mut out = Vec::new();
    for x in 0..=d {
        for y in 0..=(d - x) {
            out.push(m(x, y, d - x - y));
        }
    }
    out
}

/// Row-reduction rank over `F_p`.
pub fn rank(f: PrimeField, mut rows: Vec<Vec<Fe>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col].0 != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = f.inv(rows[rank][col]).expect("pivot nonzero");
        for j in col..ncols {
            rows[rank][j] = f.mul(rows[rank][j], inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col].0 != 0 {
                let factor = rows[r][col];
                for j in col..ncols {
                    let t = f.mul(factor, rows[rank][j]);
                    rows[r][j] = f.sub(rows[r][j], t);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Smoothness via the Macaulay bound: the partials of a smooth sextic have
/// no common projective zero iff the degree-13 graded piece of the ideal
/// they generate is all 105 monomials. The 135 products (45 degree-8
/// monomials times 3 partials) must then span a 105-dimensional space.
pub fn is_smooth(form: &TernaryForm) -> bool {
    assert_eq!(form.degree(), 6, "smoothness test is for sextics");
    let f = form.field();
    let partials = form.partials();
    let deg13 = monomials_of_degree(13);
    let index = |mon: Monomial| {
        deg13
            .binary_search(&mon)
            .expect("product of degree-8 and degree-5 monomials has degree 13")
    };
    let mut rows = Vec::with_capacity(135);
    for mult in monomials_of_degree(8) {
        for partial in &partials {
            let mut row = vec![Fe(0); deg13.len()];
            for (mon, c) in partial.mul_monomial(mult).terms() {
                row[index(mon)] = c;
            }
            rows.push(row);
        }
    }
    rank(f, rows) == deg13.len()
}

/// Brute-force scan for a singular point in `P^2(F_p)`; the exhaustive
/// cross-check for [`is_smooth`]. Over a non-closed field this is one-sided:
/// a hit certifies singularity, absence proves nothing.
pub fn singular_point(form: &TernaryForm) -> Option<[Fe; 3]> {
    let f = form.field();
    let p = f.modulus();
    let partials = form.partials();
    // On the affine chart X = 1, collect each poly as coefficients
    // grid[j][e] of y^e z^j for fast per-line Horner evaluation.
    let grid = |g: &TernaryForm| {
        let mut a = [[0u64; 7]; 7];
        for (mon, c) in g.terms() {
            a[mon.z as usize][mon.y as usize] = c.0;
        }
        a
    };
    let grids: Vec<[[u64; 7]; 7]> = std::iter::once(grid(form))
        .chain(partials.iter().map(grid))
        .collect();
    let horner = |coeffs: &[u64], at: u64| {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| (acc * at + c) % p)
    };
    let vanishes = |pt: [Fe; 3]| {
        form.evaluate(pt).0 == 0 && partials.iter().all(|d| d.evaluate(pt).0 == 0)
    };
    for y in 0..p {
        // z-polynomial coefficients of F(1, y, z)
        let mut zc = [0u64; 7];
        for (j, slot) in zc.iter_mut().enumerate() {
            *slot = horner(&grids[0][j], y);
        }
        for z in 0..p {
            if horner(&zc, z) == 0 {
                let pt = [Fe(1), Fe(y), Fe(z)];
                if partials.iter().all(|d| d.evaluate(pt).0 == 0) {
                    return Some(pt);
                }
            }
        }
    }
    for z in 0..p {
        let pt = [Fe(0), Fe(1), Fe(z)];
        if vanishes(pt) {
            return Some(pt);
        }
    }
    let pt = [Fe(0), Fe(0), Fe(1)];
    vanishes(pt).then_some(pt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;
    use crate::forms::Var;
    use crate::groups::{rho, CatalogLabel};

    fn f() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    #[test]
    fn fermat_klein_displays() {
        let f = f();
        assert_eq!(fermat6(f).to_string(), "X^6 + Y^6 + Z^6");
        assert_eq!(klein6(f).to_string(), "X^5*Y + X*Z^5 + Y^5*Z");
        assert_eq!(
            build(FamilyId::Fermat6, &FamilyParams::None, f).unwrap(),
            fermat6(f)
        );
    }

    #[test]
    fn c1_specializes_to_fermat() {
        let f = f();
        let zero = FamilyParams::C1 {
            a41: Fe(0),
            a14: Fe(0),
            a11: Fe(0),
            a22: Fe(0),
            a33: Fe(0),
            a30: Fe(0),
            a03: Fe(0),
        };
        assert_eq!(build(FamilyId::C1, &zero, f).unwrap(), fermat6(f));
    }

    #[test]
    fn thm1_guards() {
        let f = f();
        let ok = FamilyParams::Thm1 {
            l2: vec![Fe(1), Fe(0), Fe(0)],
            l4: vec![Fe(0); 5],
            l6: vec![Fe(1), Fe(0), Fe(0), Fe(0), Fe(0), Fe(0), Fe(1)],
        };
        let form = build(FamilyId::Thm1, &ok, f).unwrap();
        assert_eq!(form.coeff(m(0, 0, 6)), Fe(1));
        assert_eq!(form.coeff(m(2, 0, 4)), Fe(1));
        // degree < 5 in X
        let bad_x = FamilyParams::Thm1 {
            l2: vec![Fe(1), Fe(0), Fe(0)],
            l4: vec![Fe(0); 5],
            l6: vec![Fe(0), Fe(0), Fe(1), Fe(0), Fe(0), Fe(0), Fe(1)],
        };
        assert!(build(FamilyId::Thm1, &bad_x, f).is_err());
        // both L2 and L4 zero
        let bad_zero = FamilyParams::Thm1 {
            l2: vec![Fe(0); 3],
            l4: vec![Fe(0); 5],
            l6: vec![Fe(1), Fe(0), Fe(0), Fe(0), Fe(0), Fe(0), Fe(1)],
        };
        assert!(build(FamilyId::Thm1, &bad_zero, f).is_err());
        // odd coefficient rejected by the even variant
        let odd = FamilyParams::Thm1 {
            l2: vec![Fe(1), Fe(0), Fe(0)],
            l4: vec![Fe(0); 5],
            l6: vec![Fe(1), Fe(1), Fe(0), Fe(0), Fe(0), Fe(0), Fe(1)],
        };
        assert!(matches!(
            build(FamilyId::Thm1Even, &odd, f),
            Err(FamilyError::BadParams(_))
        ));
        assert!(build(FamilyId::Thm1Even, &ok, f).is_ok());
    }

    #[test]
    fn a4_c1_concrete_values() {
        let f = f();
        let p = a4_c1_params(f, Fe(1), Fe(1), 0).unwrap();
        let FamilyParams::C1 { a41, a14, a11, a22, a33, a30, a03 } = p else {
            panic!("wrong record");
        };
        // alpha_22 = (9 + 9 + 10) / 3 = 28/3
        assert_eq!(a22, f.div(Fe(28), Fe(3)).unwrap());
        // alpha_41 = 2(29 - 108)/27 = -158/27
        assert_eq!(a41, f.div(f.from_i64(-158), Fe(27)).unwrap());
        // at lambda = mu the two middle formulas coincide pairwise
        assert_eq!(a14, a11);
        assert_eq!(a33, a30);
        assert_eq!(a03, f.div(Fe(56), Fe(27)).unwrap());
        assert!(a4_c1_params(f, Fe(0), Fe(1), 0).is_err());
    }

    #[test]
    fn a4_orderings_are_rotations() {
        let f = f();
        let (l, mu) = (Fe(2), Fe(5));
        let get = |rot| {
            let FamilyParams::C1 { a41, a14, a11, a33, a30, a03, a22 } =
                a4_c1_params(f, l, mu, rot).unwrap()
            else {
                panic!()
            };
            ([a41, a11, a14], [a30, a33, a03], a22)
        };
        let (t0, u0, c0) = get(0);
        let (t1, u1, c1) = get(1);
        let (t2, u2, c2) = get(2);
        assert_eq!(c0, c1);
        assert_eq!(c0, c2);
        // the displayed triples are cyclic rotations of each other, in
        // opposite directions for the XYZ-type and X^3Y^3-type coefficients
        assert_eq!([t1[2], t1[0], t1[1]], t0);
        assert_eq!([t2[1], t2[2], t2[0]], t0);
        assert_eq!([u1[1], u1[2], u1[0]], u0);
        assert_eq!([u2[2], u2[0], u2[1]], u0);
    }

    #[test]
    fn f_coeff_values() {
        let f = f();
        let (f1, f2a, f2b) = f_coeffs(f, Fe(1), Fe(1)).unwrap();
        assert_eq!(f1, f.from_u64(3 * 242));
        // f2(1,1) = 81(1 + z3 + z3^-1) = 81(1 - 1) = 0
        assert_eq!(f2a, Fe(0));
        assert_eq!(f2b, Fe(0));
        // antisymmetry of the difference vanishes at lambda = mu only
        let (_, a, b) = f_coeffs(f, Fe(2), Fe(3)).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn g_denominator_guard() {
        let f = f();
        // find lambda, mu with lambda^5 mu + lambda + mu^5 = 0
        let mut hit = None;
        'outer: for l in 1..f.modulus() {
            for mu in 1..f.modulus() {
                let (l, mu) = (Fe(l), Fe(mu));
                let den = f.add(
                    f.add(f.mul(f.pow(l, 5), mu), l),
                    f.pow(mu, 5),
                );
                if den.0 == 0 {
                    hit = Some((l, mu));
                    break 'outer;
                }
            }
        }
        let (l, mu) = hit.expect("the denominator locus is nonempty");
        assert!(g_coeffs(f, l, mu).is_err());
        assert!(g_coeffs(f, Fe(1), Fe(1)).is_ok());
    }

    #[test]
    fn normal_form_c1_invariant_under_rho1_a4() {
        let f = f();
        for (l, mu) in [(Fe(1), Fe(2)), (Fe(3), Fe(5)), (Fe(100), Fe(700))] {
            let form = normal_form_c1(f, l, mu).unwrap();
            for g in rho(CatalogLabel::Rho1A4, f).unwrap().elements() {
                assert!(form.substitute(g).proportional(&form).is_some());
            }
        }
    }

    #[test]
    fn normal_form_c2_invariant_under_rho2_a4() {
        let f = f();
        for (l, mu) in [(Fe(1), Fe(2)), (Fe(3), Fe(5))] {
            let form = normal_form_c2(f, l, mu).unwrap();
            for g in rho(CatalogLabel::Rho2A4, f).unwrap().elements() {
                assert!(form.substitute(g).proportional(&form).is_some());
            }
        }
    }

    #[test]
    fn transport_composition_identities() {
        let f = f();
        let (l, mu) = (Fe(2), Fe(3));
        let t = |k, i| transport_matrix(k, i, f, l, mu).unwrap();
        let zxy = ProjectiveMap::permutation(f, [2, 0, 1]);
        let yzx = ProjectiveMap::permutation(f, [1, 2, 0]);
        let phi1 = t(TransportKind::Phi, 1);
        // phi_2 and phi_3 are row permutations of phi_1
        assert_eq!(t(TransportKind::Phi, 2), zxy.compose(&phi1));
        assert_eq!(t(TransportKind::Phi, 3), yzx.compose(&phi1));
        let psi1 = t(TransportKind::Psi, 1);
        assert_eq!(t(TransportKind::Psi, 3), yzx.compose(&psi1));
        // phi_2 display rows: (mu ...), (1 1 1), (lambda ...)
        let z3 = f.root_of_unity(3).unwrap();
        let z3i = f.inv(z3).unwrap();
        let phi2 = ProjectiveMap::new(
            f,
            [
                [mu, f.mul(z3, mu), f.mul(z3i, mu)],
                [Fe(1), Fe(1), Fe(1)],
                [l, f.mul(z3i, l), f.mul(z3, l)],
            ],
        )
        .unwrap();
        assert_eq!(t(TransportKind::Phi, 2), phi2);
        // phi_1^-1 sigma phi_1 is a coordinate 3-cycle
        let z3 = f.root_of_unity(3).unwrap();
        let sigma = ProjectiveMap::diagonal(f, [Fe(1), z3, f.inv(z3).unwrap()]);
        let conj = phi1.inverse().compose(&sigma).compose(&phi1);
        assert!(conj == yzx || conj == zxy);
    }

    #[test]
    fn klein_normalizer_congruence() {
        let f = f();
        // r = 3r' mod 21 is exactly the solvable case
        assert!(klein_normalizer(f, 9, 3).is_ok());
        assert!(klein_normalizer(f, 9 + 21, 3).is_ok());
        assert!(klein_normalizer(f, 1, 3).is_err());
        let m = klein_normalizer(f, 0, 0).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn cor3123_map_shape() {
        let f = f();
        let m = cor3123_map(f);
        let t = f.root_of_unity(18).unwrap();
        assert_eq!(m, ProjectiveMap::diagonal(f, [Fe(1), f.mul(t, t), t]));
        // t^3 = zeta_6
        assert_eq!(f.pow(t, 3), f.root_of_unity(6).unwrap());
    }

    #[test]
    fn branch_detection() {
        let f = f();
        let p = FamilyParams::C1 {
            a41: Fe(0),
            a14: Fe(0),
            a11: Fe(0),
            a22: Fe(0),
            a33: Fe(1),
            a30: Fe(2),
            a03: Fe(0),
        };
        let rep = branch_conditions(FamilyId::C1, &p, f);
        assert!(rep
            .branches
            .contains(&Branch::C1i { a33_ne_a30: true }));
        // generic C2
        let generic = FamilyParams::C2 {
            a32: Fe(5),
            a13: Fe(11),
            a21: Fe(17),
            a24: Fe(23),
            a02: Fe(31),
            a40: Fe(41),
        };
        assert_eq!(
            branch_conditions(FamilyId::C2, &generic, f).branches,
            vec![Branch::C2Generic]
        );
        // C2 (2)(i) relations at r = 2
        let z = |k: i64| f.zeta_pow(21, k).unwrap();
        let (a40, a32) = (Fe(3), Fe(7));
        let rel = FamilyParams::C2 {
            a32,
            a13: f.mul(z(-12), a32),
            a21: f.mul(z(6), a32),
            a24: f.mul(z(6), a40),
            a02: f.mul(z(-24), a40),
            a40,
        };
        let rep = branch_conditions(FamilyId::C2, &rel, f);
        assert!(rep.branches.contains(&Branch::C2i { r: 2, guard: true }));
    }

    #[test]
    fn c1_double_prime_guards() {
        let f = f();
        let ok = FamilyParams::C1DoublePrime { ell: 1, a11: Fe(2), a30: Fe(3) };
        let form = build(FamilyId::C1DoublePrime, &ok, f).unwrap();
        let w = f.zeta_pow(6, 2).unwrap();
        assert_eq!(form.coeff(m(0, 6, 0)), w);
        assert_eq!(form.coeff(m(1, 4, 1)), f.mul(Fe(2), w));
        assert!(build(
            FamilyId::C1DoublePrime,
            &FamilyParams::C1DoublePrime { ell: 3, a11: Fe(2), a30: Fe(3) },
            f
        )
        .is_err());
        assert!(build(
            FamilyId::C1DoublePrime,
            &FamilyParams::C1DoublePrime { ell: 1, a11: Fe(0), a30: Fe(3) },
            f
        )
        .is_err());
    }

    #[test]
    fn smoothness_oracle_basics() {
        let f = f();
        assert!(is_smooth(&fermat6(f)));
        assert!(is_smooth(&klein6(f)));
        let singular = TernaryForm::from_terms(
            f,
            6,
            [
                (m(6, 0, 0), Fe(1)),
                (m(0, 6, 0), Fe(1)),
                (m(3, 0, 3), Fe(1)),
            ],
        );
        assert!(!is_smooth(&singular));
        assert_eq!(singular_point(&singular), Some([Fe(0), Fe(0), Fe(1)]));
        assert_eq!(singular_point(&fermat6(f)), None);
    }

    #[test]
    fn smoothness_scalar_invariance() {
        let f = f();
        let form = build(
            FamilyId::Thm2Special,
            &FamilyParams::Thm2Special { a30: Fe(1), a03: Fe(4), a33: Fe(9) },
            f,
        )
        .unwrap();
        assert_eq!(is_smooth(&form), is_smooth(&form.scale(Fe(5))));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(13).len(), 105);
        assert_eq!(monomials_of_degree(8).len(), 45);
        assert_eq!(monomials_of_degree(6).len(), 28);
    }

    #[test]
    fn descendant_cores() {
        // the highest-exponent part identifies the ancestor sextic
        let f = f();
        let nf = normal_form_c1(f, Fe(2), Fe(3)).unwrap();
        assert_eq!(nf.core(), fermat6(f));
        let c2 = build(
            FamilyId::C2,
            &FamilyParams::C2 {
                a32: Fe(4),
                a13: Fe(9),
                a21: Fe(1),
                a24: Fe(7),
                a02: Fe(5),
                a40: Fe(2),
            },
            f,
        )
        .unwrap();
        assert_eq!(c2.core(), klein6(f));
    }

    #[test]
    fn thm1_member_has_involution() {
        let f = f();
        let params = FamilyParams::Thm1 {
            l2: vec![Fe(3), Fe(1), Fe(4)],
            l4: vec![Fe(1), Fe(5), Fe(9), Fe(2), Fe(6)],
            l6: vec![Fe(5), Fe(3), Fe(5), Fe(8), Fe(9), Fe(7), Fe(9)],
        };
        let form = build(FamilyId::Thm1, &params, f).unwrap();
        let inv = ProjectiveMap::diagonal(f, [Fe(1), Fe(1), f.neg(Fe(1))]);
        assert!(form.substitute(&inv).proportional(&form).is_some());
        assert_eq!(form.degree_in(Var::Z), 6);
    }
}

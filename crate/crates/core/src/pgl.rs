//! Projective linear transformations of the plane over `F_p`.
//!
//! Elements of `PGL_3` are stored as 3×3 matrices in a canonical
//! normalization: the first nonzero entry in row-major order is 1. Equality
//! of normalized matrices is then exactly equality in `PGL_3`, which makes
//! deduplication during subgroup closure trivial.

use std::fmt;
use thiserror::Error;

use crate::field::{Fe, PrimeField};
use crate::forms::Var;

/// Element order search bound: the catalog lives inside torsion of exponent
/// dividing 252, with a margin for products.
pub const ORDER_BOUND: u64 = 252 * 3;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PglError {
    #[error("matrix is singular")]
    Singular,
    #[error("element order exceeds the torsion bound {0}")]
    OrderOverflow(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectiveMap {
    // Ord derives compare the matrix first; field is identical in practice.
    m: [[Fe; 3]; 3],
    field: PrimeField,
}

impl ProjectiveMap {
    /// Builds an element from a lift, rejecting singular matrices.
    pub fn new(field: PrimeField, m: [[Fe; 3]; 3]) -> Result<Self, PglError> {
        let mut map = ProjectiveMap { m, field };
        if map.det().0 == 0 {
            return Err(PglError::Singular);
        }
        map.normalize();
        Ok(map)
    }

    pub fn identity(field: PrimeField) -> Self {
        ProjectiveMap::diagonal(field, [Fe(1), Fe(1), Fe(1)])
    }

    /// `diag(a, b, c)`; entries must be nonzero.
    pub fn diagonal(field: PrimeField, d: [Fe; 3]) -> Self {
        let mut m = [[Fe(0); 3]; 3];
        for i in 0..3 {
            assert!(d[i].0 != 0, "diagonal entry must be nonzero");
            m[i][i] = d[i];
        }
        ProjectiveMap::new(field, m).expect("diagonal with nonzero entries")
    }

    /// The map sending variable `i` to variable `perm[i]`, e.g.
    /// `permutation(f, [1, 2, 0])` is the paper's `[Y:Z:X]`.
    pub fn permutation(field: PrimeField, perm: [usize; 3]) -> Self {
        ProjectiveMap::scaled_permutation(field, perm, [Fe(1), Fe(1), Fe(1)])
    }

    /// Row `i` is `scale[i] * e_{perm[i]}`; e.g. `[ζY : Z : X]` is
    /// `scaled_permutation(f, [1, 2, 0], [ζ, 1, 1])`.
    pub fn scaled_permutation(field: PrimeField, perm: [usize; 3], scale: [Fe; 3]) -> Self {
        let mut m = [[Fe(0); 3]; 3];
        for i in 0..3 {
            m[i][perm[i]] = scale[i];
        }
        ProjectiveMap::new(field, m).expect("permutation matrix is invertible")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn matrix(&self) -> [[Fe; 3]; 3] {
        self.m
    }

    fn normalize(&mut self) {
        let f = self.field;
        let lead = self
            .m
            .iter()
            .flatten()
            .find(|e| e.0 != 0)
            .copied()
            .expect("nonsingular matrix has a nonzero entry");
        if lead.0 == 1 {
            return;
        }
        let inv = f.inv(lead).expect("nonzero");
        for row in &mut self.m {
            for e in row {
                *e = f.mul(*e, inv);
            }
        }
    }

    pub fn det(&self) -> Fe {
        let f = self.field;
        let m = &self.m;
        let mut acc = Fe(0);
        for (c0, c1, c2, sign) in [
            (0, 1, 2, false),
            (1, 2, 0, false),
            (2, 0, 1, false),
            (2, 1, 0, true),
            (1, 0, 2, true),
            (0, 2, 1, true),
        ] {
            let t = f.mul(f.mul(m[0][c0], m[1][c1]), m[2][c2]);
            acc = if sign { f.sub(acc, t) } else { f.add(acc, t) };
        }
        acc
    }

    pub fn compose(&self, other: &ProjectiveMap) -> ProjectiveMap {
        let f = self.field;
        let mut m = [[Fe(0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Fe(0);
                for k in 0..3 {
                    s = f.add(s, f.mul(self.m[i][k], other.m[k][j]));
                }
                m[i][j] = s;
            }
        }
        ProjectiveMap::new(f, m).expect("product of invertible maps")
    }

    pub fn inverse(&self) -> ProjectiveMap {
        let f = self.field;
        let m = &self.m;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            f.sub(f.mul(m[r0][c0], m[r1][c1]), f.mul(m[r0][c1], m[r1][c0]))
        };
        // adjugate; the scalar 1/det is absorbed by normalization
        let adj = [
            [cof(1, 2, 1, 2), f.neg(cof(0, 2, 1, 2)), cof(0, 1, 1, 2)],
            [f.neg(cof(1, 2, 0, 2)), cof(0, 2, 0, 2), f.neg(cof(0, 1, 0, 2))],
            [cof(1, 2, 0, 1), f.neg(cof(0, 2, 0, 1)), cof(0, 1, 0, 1)],
        ];
        ProjectiveMap::new(f, adj).expect("adjugate of invertible map")
    }

    pub fn conjugate_by(&self, p: &ProjectiveMap) -> ProjectiveMap {
        p.compose(self).compose(&p.inverse())
    }

    pub fn is_identity(&self) -> bool {
        *self == ProjectiveMap::identity(self.field)
    }

    /// Smallest `n ≥ 1` with `self^n = id` in `PGL_3`.
    pub fn order(&self) -> Result<u64, PglError> {
        let id = ProjectiveMap::identity(self.field);
        let mut acc = *self;
        for n in 1..=ORDER_BOUND {
            if acc == id {
                return Ok(n);
            }
            acc = acc.compose(self);
        }
        Err(PglError::OrderOverflow(ORDER_BOUND))
    }

    /// If the map is monomial, returns `(perm, scale)` with row `i` equal to
    /// `scale[i] * e_{perm[i]}`.
    pub fn as_monomial(&self) -> Option<([usize; 3], [Fe; 3])> {
        let mut perm = [0usize; 3];
        let mut scale = [Fe(0); 3];
        let mut used = [false; 3];
        for i in 0..3 {
            let nonzero: Vec<usize> = (0..3).filter(|&j| self.m[i][j].0 != 0).collect();
            if nonzero.len() != 1 {
                return None;
            }
            let j = nonzero[0];
            if used[j] {
                return None;
            }
            used[j] = true;
            perm[i] = j;
            scale[i] = self.m[i][j];
        }
        Some((perm, scale))
    }

    /// Characteristic polynomial `λ³ - t λ² + s λ - d` of the normalized
    /// lift, as `(t, s, d)`.
    fn char_poly(&self) -> (Fe, Fe, Fe) {
        let f = self.field;
        let m = &self.m;
        let t = f.add(f.add(m[0][0], m[1][1]), m[2][2]);
        let minor = |i: usize, j: usize| {
            f.sub(f.mul(m[i][i], m[j][j]), f.mul(m[i][j], m[j][i]))
        };
        let s = f.add(f.add(minor(0, 1), minor(0, 2)), minor(1, 2));
        (t, s, self.det())
    }

    /// A repeated eigenvalue in `F_p`, if any: a common root of the
    /// characteristic polynomial and its derivative. A double root of a cubic
    /// with a 2-dimensional eigenspace always lies in the base field, so no
    /// extension arithmetic is needed.
    fn repeated_eigenvalue(&self) -> Option<Fe> {
        let f = self.field;
        let (t, s, d) = self.char_poly();
        // f(λ) = λ³ - tλ² + sλ - d, f'(λ) = 3λ² - 2tλ + s.
        // Remainder of f mod f' with quotient λ/3 - t/9:
        //   (2s/3 - 2t²/9) λ + (st/9 - d)
        let inv3 = f.inv(Fe(3)).expect("char > 3");
        let t2 = f.mul(t, t);
        let nine_inv = f.mul(inv3, inv3);
        let lin = f.sub(
            f.mul(f.mul(Fe(2), s), inv3),
            f.mul(f.mul(Fe(2), t2), nine_inv),
        );
        let cst = f.sub(f.mul(f.mul(s, t), nine_inv), d);
        let eval_f = |x: Fe| {
            let x2 = f.mul(x, x);
            let x3 = f.mul(x2, x);
            f.sub(f.add(f.sub(x3, f.mul(t, x2)), f.mul(s, x)), d)
        };
        let eval_fp = |x: Fe| {
            f.add(
                f.sub(f.mul(Fe(3), f.mul(x, x)), f.mul(f.mul(Fe(2), t), x)),
                s,
            )
        };
        if lin.0 != 0 {
            // gcd(f, f') is nontrivial iff the root of the linear remainder
            // is a root of both
            let root = f.div(f.neg(cst), lin).expect("nonzero");
            if eval_f(root).0 == 0 && eval_fp(root).0 == 0 {
                return Some(root);
            }
            return None;
        }
        if cst.0 != 0 {
            return None; // nonzero constant remainder: coprime
        }
        // f' divides f: triple root λ = t/3
        let root = f.mul(t, inv3);
        if eval_f(root).0 == 0 {
            Some(root)
        } else {
            None
        }
    }

    fn rank_minus_lambda(&self, lambda: Fe) -> usize {
        let f = self.field;
        let mut a = self.m;
        for i in 0..3 {
            a[i][i] = f.sub(a[i][i], lambda);
        }
        rank3(f, a)
    }

    /// `(true, n)` iff the map is an homology of period `n`: conjugate to
    /// `diag(1, 1, ζ_n)`, equivalently its lift has a repeated eigenvalue
    /// `λ ∈ F_p` with `rank(M - λI) = 1`.
    pub fn is_homology(&self) -> Result<(bool, u64), PglError> {
        let period = self.order()?;
        if period == 1 {
            return Ok((false, 1));
        }
        let hom = match self.repeated_eigenvalue() {
            Some(l) => self.rank_minus_lambda(l) == 1,
            None => false,
        };
        Ok((hom, period))
    }

    /// True iff, after moving `fixed_var` to the first slot, the matrix has
    /// block shape `(1) ⊕ GL_2` up to scalar.
    pub fn is_intransitive(&self, fixed_var: Var) -> bool {
        let f = self.field;
        let k = fixed_var.index();
        let perm = match k {
            0 => [0, 1, 2],
            1 => [1, 0, 2],
            _ => [2, 1, 0],
        };
        let p = ProjectiveMap::permutation(f, perm);
        let n = self.conjugate_by(&p).m;
        n[0][1].0 == 0 && n[0][2].0 == 0 && n[1][0].0 == 0 && n[2][0].0 == 0
    }
}

fn rank3(f: PrimeField, mut a: [[Fe; 3]; 3]) -> usize {
    let mut rank = 0;
    let mut row = 0;
    for col in 0..3 {
        let pivot = (row..3).find(|&r| a[r][col].0 != 0);
        let Some(pr) = pivot else { continue };
        a.swap(row, pr);
        let inv = f.inv(a[row][col]).expect("pivot nonzero");
        for c in 0..3 {
            a[row][c] = f.mul(a[row][c], inv);
        }
        for r in 0..3 {
            if r != row && a[r][col].0 != 0 {
                let factor = a[r][col];
                for c in 0..3 {
                    a[r][c] = f.sub(a[r][c], f.mul(factor, a[row][c]));
                }
            }
        }
        rank += 1;
        row += 1;
        if row == 3 {
            break;
        }
    }
    rank
}

/// Renders a residue as a root-of-unity expression when it is one of small
/// order, e.g. `zeta(3)^2`, falling back to the residue.
pub fn scalar_name(f: PrimeField, a: Fe) -> String {
    if a.0 == 0 {
        return "0".into();
    }
    if a.0 == 1 {
        return "1".into();
    }
    if a.0 == f.modulus() - 1 {
        return "-1".into();
    }
    let ord = f.order(a);
    if ord <= 21 {
        let z = f.root_of_unity(ord).expect("order divides p-1");
        let mut pow = Fe(1);
        for k in 1..ord {
            pow = f.mul(pow, z);
            if pow == a {
                if k == 1 {
                    return format!("zeta({ord})");
                }
                return format!("zeta({ord})^{k}");
            }
        }
    }
    format!("{}", a.0)
}

impl fmt::Display for ProjectiveMap {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let f = self.field;
        if let Some((perm, scale)) = self.as_monomial() {
            if perm == [0, 1, 2] {
                return write!(
                    out,
                    "diag({},{},{})",
                    scalar_name(f, scale[0]),
                    scalar_name(f, scale[1]),
                    scalar_name(f, scale[2])
                );
            }
            let names = ["X", "Y", "Z"];
            let parts: Vec<String> = (0..3)
                .map(|i| {
                    if scale[i].0 == 1 {
                        names[perm[i]].to_string()
                    } else {
                        format!("{}*{}", scalar_name(f, scale[i]), names[perm[i]])
                    }
                })
                .collect();
            return write!(out, "[{}]", parts.join(":"));
        }
        let names = ["X", "Y", "Z"];
        let rows: Vec<String> = (0..3)
            .map(|i| {
                let mut terms = Vec::new();
                for j in 0..3 {
                    let e = self.m[i][j];
                    if e.0 == 0 {
                        continue;
                    }
                    if e.0 == 1 {
                        terms.push(names[j].to_string());
                    } else {
                        terms.push(format!("{}*{}", scalar_name(f, e), names[j]));
                    }
                }
                terms.join("+")
            })
            .collect();
        write!(out, "[{}]", rows.join(":"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::DEFAULT_PRIME;

    fn f() -> PrimeField {
        PrimeField::new(DEFAULT_PRIME).unwrap()
    }

    #[test]
    fn group_laws_and_normalization() {
        let f = f();
        let m = ProjectiveMap::new(
            f,
            [
                [Fe(1), Fe(2), Fe(3)],
                [Fe(0), Fe(1), Fe(5)],
                [Fe(4), Fe(0), Fe(1)],
            ],
        )
        .unwrap();
        assert!(m.compose(&m.inverse()).is_identity());
        let cycle = ProjectiveMap::permutation(f, [1, 2, 0]);
        assert_eq!(
            cycle.compose(&cycle),
            ProjectiveMap::permutation(f, [2, 0, 1])
        );
        let scalar = ProjectiveMap::diagonal(f, [Fe(2), Fe(2), Fe(2)]);
        assert!(scalar.is_identity());
    }

    #[test]
    fn singular_matrix_rejected() {
        let f = f();
        let err = ProjectiveMap::new(f, [[Fe(1), Fe(1), Fe(0)]; 3]);
        assert_eq!(err.unwrap_err(), PglError::Singular);
    }

    #[test]
    fn orders() {
        let f = f();
        let z3 = f.root_of_unity(3).unwrap();
        let m = ProjectiveMap::diagonal(f, [Fe(1), z3, f.inv(z3).unwrap()]);
        assert_eq!(m.order().unwrap(), 3);
        let swap = ProjectiveMap::permutation(f, [0, 2, 1]);
        assert_eq!(swap.order().unwrap(), 2);
        let z21 = f.root_of_unity(21).unwrap();
        let k = ProjectiveMap::diagonal(f, [Fe(1), z21, f.pow_i(z21, -4).unwrap()]);
        assert_eq!(k.order().unwrap(), 21);
    }

    #[test]
    fn homology_detection() {
        let f = f();
        let z3 = f.root_of_unity(3).unwrap();
        let hom = ProjectiveMap::diagonal(f, [Fe(1), Fe(1), z3]);
        assert_eq!(hom.is_homology().unwrap(), (true, 3));
        let cycle = ProjectiveMap::permutation(f, [1, 2, 0]);
        assert_eq!(cycle.is_homology().unwrap(), (false, 3));
        let nonhom = ProjectiveMap::diagonal(f, [Fe(1), z3, f.inv(z3).unwrap()]);
        assert_eq!(nonhom.is_homology().unwrap(), (false, 3));
        let invol = ProjectiveMap::diagonal(f, [Fe(1), Fe(1), f.neg(Fe(1))]);
        assert_eq!(invol.is_homology().unwrap(), (true, 2));
    }

    #[test]
    fn homology_conjugation_invariant() {
        let f = f();
        let z3 = f.root_of_unity(3).unwrap();
        let hom = ProjectiveMap::diagonal(f, [Fe(1), Fe(1), z3]);
        let p = ProjectiveMap::new(
            f,
            [
                [Fe(1), Fe(7), Fe(2)],
                [Fe(3), Fe(1), Fe(0)],
                [Fe(0), Fe(5), Fe(1)],
            ],
        )
        .unwrap();
        let conj = hom.conjugate_by(&p);
        assert_eq!(conj.is_homology().unwrap(), (true, 3));
        assert_eq!(conj.order().unwrap(), hom.order().unwrap());
    }

    #[test]
    fn intransitive_shapes() {
        let f = f();
        let d = ProjectiveMap::diagonal(f, [Fe(1), Fe(5), Fe(9)]);
        for v in Var::ALL {
            assert!(d.is_intransitive(v));
        }
        let swap_yz = ProjectiveMap::permutation(f, [0, 2, 1]);
        assert!(swap_yz.is_intransitive(Var::X));
        let cycle = ProjectiveMap::permutation(f, [1, 2, 0]);
        for v in Var::ALL {
            assert!(!cycle.is_intransitive(v));
        }
    }

    #[test]
    fn rendering() {
        let f = f();
        let cycle = ProjectiveMap::permutation(f, [1, 2, 0]);
        assert_eq!(cycle.to_string(), "[Y:Z:X]");
        let z3 = f.root_of_unity(3).unwrap();
        let d = ProjectiveMap::diagonal(f, [Fe(1), z3, f.inv(z3).unwrap()]);
        assert_eq!(d.to_string(), "diag(1,zeta(3),zeta(3)^2)");
    }
}

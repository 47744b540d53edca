//! Deterministic sampling of family parameters.
//!
//! The generator is counter-based SplitMix64: output `i` for seed `s` is
//! `mix(s + (i + 1) * 0x9E3779B97F4A7C15)` with the standard SplitMix64
//! finalizer. Any language can reproduce the stream from the seed alone;
//! residues are drawn by rejection so they are exactly uniform on `[0, p)`.

use crate::families::{branch_conditions, Branch, FamilyId, FamilyParams};
use crate::field::{Fe, PrimeField};

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    counter: u64,
}

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter += 1;
        mix(self.seed.wrapping_add(self.counter.wrapping_mul(GAMMA)))
    }

    /// Uniform on `[0, n)` by rejection.
    pub fn uniform(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        let bound = u64::MAX - u64::MAX % n;
        loop {
            let x = self.next_u64();
            if x < bound {
                return x % n;
            }
        }
    }

    pub fn fe(&mut self, f: PrimeField) -> Fe {
        Fe(self.uniform(f.modulus()))
    }

    pub fn nonzero_fe(&mut self, f: PrimeField) -> Fe {
        Fe(1 + self.uniform(f.modulus() - 1))
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        items[self.uniform(items.len() as u64) as usize]
    }
}

fn binary_form(rng: &mut Rng, f: PrimeField, deg: usize, even: bool) -> Vec<Fe> {
    (0..=deg)
        .map(|i| {
            if even && (i % 2 != 0 || (deg - i) % 2 != 0) {
                Fe(0)
            } else {
                rng.fe(f)
            }
        })
        .collect()
}

/// Random member of the Theorem 1 family (the `even` flag draws from the
/// `K[X^2, Y^2]` subring). Guards of the constructor are enforced.
pub fn thm1_params(rng: &mut Rng, f: PrimeField, even: bool) -> FamilyParams {
    loop {
        let mut l6 = binary_form(rng, f, 6, even);
        // degree >= 5 in X and in Y
        l6[0] = rng.nonzero_fe(f);
        l6[6] = rng.nonzero_fe(f);
        let l2 = binary_form(rng, f, 2, even);
        let l4 = binary_form(rng, f, 4, even);
        if l2.iter().chain(&l4).all(|c| c.0 == 0) {
            continue;
        }
        if !even {
            // keep the sample out of the even subring so the two theorem
            // cases stay disjoint
            let odd = l2[1].0 != 0 || l4[1].0 != 0 || l4[3].0 != 0 || l6[1].0 != 0;
            if !odd {
                continue;
            }
        }
        return FamilyParams::Thm1 { l2, l4, l6 };
    }
}

pub fn thm2_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let l3 = binary_form(rng, f, 3, false);
        let l6 = binary_form(rng, f, 6, false);
        if l3.iter().all(|c| c.0 == 0) || l6.iter().all(|c| c.0 == 0) {
            continue;
        }
        return FamilyParams::Thm2 { l3, l6 };
    }
}

/// Theorem 2 special member: alphas pairwise distinct modulo sign.
pub fn thm2_special_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let a30 = rng.fe(f);
        let a03 = rng.fe(f);
        let a33 = rng.fe(f);
        let p = FamilyParams::Thm2Special { a30, a03, a33 };
        if branch_conditions(FamilyId::Thm2Special, &p, f)
            .branches
            .contains(&Branch::Thm2SpecialDistinct)
        {
            return p;
        }
    }
}

/// Generic C1 member: no special branch condition holds.
pub fn c1_generic_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let p = FamilyParams::C1 {
            a41: rng.fe(f),
            a14: rng.fe(f),
            a11: rng.fe(f),
            a22: rng.fe(f),
            a33: rng.fe(f),
            a30: rng.fe(f),
            a03: rng.fe(f),
        };
        if branch_conditions(FamilyId::C1, &p, f).branches == vec![Branch::C1Generic] {
            return p;
        }
    }
}

/// C1 branch (1)(i) member with pairwise distinct diagonal coefficients.
pub fn c1_branch_i_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let a33 = rng.fe(f);
        let a30 = rng.fe(f);
        let a03 = rng.fe(f);
        let distinct = |a: Fe, b: Fe| a != b && a != f.neg(b);
        if !(distinct(a33, a30) && distinct(a33, a03) && distinct(a30, a03)) {
            continue;
        }
        return FamilyParams::C1 {
            a41: Fe(0),
            a14: Fe(0),
            a11: Fe(0),
            a22: Fe(0),
            a33,
            a30,
            a03,
        };
    }
}

/// C1 member admitting the scaled swap `[X : t^-1 Z : t Y]`, i.e. branch
/// (1)(ii) case (b), and no other special branch.
pub fn c1_branch_ii_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let t = f.zeta_pow(6, rng.uniform(6) as i64).expect("6 | p-1");
        let eps = f.pow(t, 3); // +-1
        let a11 = rng.nonzero_fe(f);
        let a30 = rng.nonzero_fe(f);
        let p = FamilyParams::C1 {
            a41: rng.nonzero_fe(f),
            a14: f.mul(eps, a11),
            a11,
            a22: rng.fe(f),
            a33: f.mul(eps, a30),
            a30,
            a03: rng.fe(f),
        };
        if branch_conditions(FamilyId::C1, &p, f).branches == vec![Branch::C1ii { case: 1 }] {
            return p;
        }
    }
}

/// C1 member admitting the scaled 3-cycle `[s' Y : t' Z : X]` with
/// `s' t' = zeta_6^l`, `l` not divisible by 3, i.e. branch (1)(iii). The
/// invariance equations force `a22 = 0` for such `l`.
pub fn c1_branch_iii_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let a = rng.uniform(6) as i64;
        let b = rng.uniform(6) as i64;
        if (a + b) % 3 == 0 {
            continue;
        }
        let z6 = |k: i64| f.zeta_pow(6, k).expect("6 | p-1");
        let (s, t) = (z6(a), z6(b));
        let a11 = rng.nonzero_fe(f);
        let a30 = rng.nonzero_fe(f);
        let p = FamilyParams::C1 {
            a41: f.mul(a11, f.mul(s, t)),
            a14: f.mul(a11, f.mul(f.pow(s, 5), f.pow(t, 2))),
            a11,
            a22: Fe(0),
            a33: f.mul(a30, f.pow(s, 3)),
            a30,
            a03: f.mul(a30, f.pow(t, 3)),
        };
        if branch_conditions(FamilyId::C1, &p, f)
            .branches
            .iter()
            .all(|br| matches!(br, Branch::C1iii { .. }))
        {
            return p;
        }
    }
}

pub fn c2_generic_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    loop {
        let p = FamilyParams::C2 {
            a32: rng.fe(f),
            a13: rng.fe(f),
            a21: rng.fe(f),
            a24: rng.fe(f),
            a02: rng.fe(f),
            a40: rng.fe(f),
        };
        if branch_conditions(FamilyId::C2, &p, f).branches == vec![Branch::C2Generic] {
            return p;
        }
    }
}

/// C2 member satisfying the branch (2)(i) relations for a random exponent
/// `r`, with the order-21 guard `(a24, a13) != (0, 0)`.
pub fn c2_branch_i_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    let r = rng.uniform(21) as i64;
    let z = |k: i64| f.zeta_pow(21, k).expect("21 | p-1");
    let a40 = rng.nonzero_fe(f);
    let a32 = rng.nonzero_fe(f);
    FamilyParams::C2 {
        a32,
        a13: f.mul(z(-6 * r), a32),
        a21: f.mul(z(3 * r), a32),
        a24: f.mul(z(3 * r), a40),
        a02: f.mul(z(-12 * r), a40),
        a40,
    }
}

/// C1' member; `semidirect` forces the extra equalities of branch (1)(ii).
pub fn c1_prime_params(rng: &mut Rng, f: PrimeField, semidirect: bool) -> FamilyParams {
    loop {
        let a12 = rng.fe(f);
        let a33 = rng.fe(f);
        // order-6 guard from the Remark
        if a33.0 == 0 && a12.0 == 0 {
            continue;
        }
        let (a41, a03) = if semidirect {
            (a12, a33)
        } else {
            (rng.fe(f), rng.fe(f))
        };
        if !semidirect && a41 == a12 && a03 == a33 {
            continue;
        }
        return FamilyParams::C1Prime {
            a41,
            a33,
            a22: rng.fe(f),
            a12,
            a03,
        };
    }
}

pub fn c1_double_prime_params(rng: &mut Rng, f: PrimeField) -> FamilyParams {
    FamilyParams::C1DoublePrime {
        ell: rng.pick(&[1u8, 2, 4, 5]),
        a11: rng.nonzero_fe(f),
        a30: rng.fe(f),
    }
}

/// Nonzero `(lambda, mu)` with `lambda^6`, `mu^6` and `1` pairwise
/// distinct; on that excluded locus the curve picks up symmetry beyond the
/// order-12 group, so the branch hypothesis fails. `c2` additionally
/// avoids the vanishing locus of the `g`-coefficient denominator.
pub fn a4_params(rng: &mut Rng, f: PrimeField, c2: bool) -> FamilyParams {
    loop {
        let lambda = rng.nonzero_fe(f);
        let mu = rng.nonzero_fe(f);
        let l6 = f.pow(lambda, 6);
        let m6 = f.pow(mu, 6);
        if l6.0 == 1 || m6.0 == 1 || l6 == m6 {
            continue;
        }
        if c2 {
            let den = f.add(
                f.add(f.mul(f.pow(lambda, 5), mu), lambda),
                f.pow(mu, 5),
            );
            if den.0 == 0 {
                continue;
            }
        }
        return FamilyParams::A4 { lambda, mu };
    }
}

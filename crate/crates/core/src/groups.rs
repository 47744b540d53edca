//! Finite subgroups of `PGL_3(F_p)`: generator closure, the fixed catalog of
//! embeddings, fingerprinting, and identification.
//!
//! Identification works by fingerprint (order, abelianness, element-order
//! histogram, homology counts, center order) rather than a general
//! isomorphism test: the groups occurring in the sextic classification are
//! separated by these data up to `PGL_3`-conjugacy. Two pairs of catalog
//! entries are genuinely conjugate embeddings of the same group (`S_3` and
//! `A_4`); those share a fingerprint and identify to one canonical label.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

use crate::field::{Fe, PrimeField};
use crate::pgl::{PglError, ProjectiveMap};

/// Largest expected subgroup is `Aut(F_6)` of order 216; a blown cap is a
/// bug signal, not a resource policy.
pub const CLOSURE_CAP: usize = 1000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeded the cap of {0} elements")]
    ClosureCapExceeded(usize),
    #[error(transparent)]
    Pgl(#[from] PglError),
}

/// Symbolic names for the fixed subgroups of `PGL_3` used throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum CatalogLabel {
    Trivial,
    Rho1Z2,
    Rho1Z2Square,
    Rho1Z3,
    Rho1Z3Square,
    Rho2Z3,
    Rho2Z3Square,
    Rho1S3,
    Rho2S3,
    Rho1Z3SemiS3,
    Rho1A4,
    Rho2A4,
    He3,
    AutFermat6,
    AutKlein6,
}

impl CatalogLabel {
    pub const ALL: [CatalogLabel; 15] = [
        CatalogLabel::Trivial,
        CatalogLabel::Rho1Z2,
        CatalogLabel::Rho1Z2Square,
        CatalogLabel::Rho1Z3,
        CatalogLabel::Rho1Z3Square,
        CatalogLabel::Rho2Z3,
        CatalogLabel::Rho2Z3Square,
        CatalogLabel::Rho1S3,
        CatalogLabel::Rho2S3,
        CatalogLabel::Rho1Z3SemiS3,
        CatalogLabel::Rho1A4,
        CatalogLabel::Rho2A4,
        CatalogLabel::He3,
        CatalogLabel::AutFermat6,
        CatalogLabel::AutKlein6,
    ];

    /// The representative used in reports for each `PGL_3`-conjugacy class.
    /// `ρ1(S_3) ~ ρ2(S_3)` and `ρ1(A_4) ~ ρ2(A_4)` are conjugate pairs.
    pub fn canonical(self) -> CatalogLabel {
        match self {
            CatalogLabel::Rho1S3 => CatalogLabel::Rho2S3,
            CatalogLabel::Rho2A4 => CatalogLabel::Rho1A4,
            other => other,
        }
    }
}

impl fmt::Display for CatalogLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CatalogLabel::Trivial => "trivial",
            CatalogLabel::Rho1Z2 => "rho1(Z/2)",
            CatalogLabel::Rho1Z2Square => "rho1((Z/2)^2)",
            CatalogLabel::Rho1Z3 => "rho1(Z/3)",
            CatalogLabel::Rho1Z3Square => "rho1((Z/3)^2)",
            CatalogLabel::Rho2Z3 => "rho2(Z/3)",
            CatalogLabel::Rho2Z3Square => "rho2((Z/3)^2)",
            CatalogLabel::Rho1S3 => "rho1(S3)",
            CatalogLabel::Rho2S3 => "rho2(S3)",
            CatalogLabel::Rho1Z3SemiS3 => "rho1(Z/3:S3)",
            CatalogLabel::Rho1A4 => "rho1(A4)",
            CatalogLabel::Rho2A4 => "rho2(A4)",
            CatalogLabel::He3 => "He3",
            CatalogLabel::AutFermat6 => "Aut(F6)",
            CatalogLabel::AutKlein6 => "Aut(K6)",
        };
        write!(f, "{s}")
    }
}

/// Explicitly closed subgroup of `PGL_3(F_p)` with a deterministic element
/// ordering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    field: PrimeField,
    generators: Vec<ProjectiveMap>,
    elements: Vec<ProjectiveMap>,
}

impl FiniteGroup {
    /// Breadth-first closure of the generators under composition.
    pub fn closure(
        field: PrimeField,
        generators: Vec<ProjectiveMap>,
    ) -> Result<Self, GroupError> {
        let mut seen: BTreeSet<ProjectiveMap> = BTreeSet::new();
        seen.insert(ProjectiveMap::identity(field));
        let mut frontier: Vec<ProjectiveMap> = seen.iter().copied().collect();
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for e in &frontier {
                for g in &generators {
                    let prod = e.compose(g);
                    if seen.insert(prod) {
                        if seen.len() > CLOSURE_CAP {
                            return Err(GroupError::ClosureCapExceeded(CLOSURE_CAP));
                        }
                        next.push(prod);
                    }
                }
            }
            frontier = next;
        }
        Ok(FiniteGroup {
            field,
            generators,
            elements: seen.into_iter().collect(),
        })
    }

    pub fn trivial(field: PrimeField) -> Self {
        FiniteGroup::closure(field, Vec::new()).expect("trivial closure")
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[ProjectiveMap] {
        &self.elements
    }

    pub fn generators(&self) -> &[ProjectiveMap] {
        &self.generators
    }

    pub fn contains(&self, m: &ProjectiveMap) -> bool {
        self.elements.binary_search(m).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &FiniteGroup) -> bool {
        self.elements.iter().all(|e| other.contains(e))
    }

    /// Conjugates the whole group.
    pub fn conjugate_by(&self, p: &ProjectiveMap) -> FiniteGroup {
        let gens = self
            .generators
            .iter()
            .map(|g| g.conjugate_by(p))
            .collect();
        FiniteGroup::closure(self.field, gens).expect("conjugate of a finite group")
    }

    /// True iff every element is monomial, i.e. the group permutes the three
    /// coordinate vertices `(1:0:0), (0:1:0), (0:0:1)`.
    pub fn coordinate_triangle_stable(&self) -> bool {
        self.elements.iter().all(|e| e.as_monomial().is_some())
    }

    pub fn fingerprint(&self) -> Result<GroupFingerprint, GroupError> {
        let mut order_histogram: BTreeMap<u64, u64> = BTreeMap::new();
        let mut homology_counts: BTreeMap<u64, u64> = BTreeMap::new();
        for e in &self.elements {
            let (hom, period) = e.is_homology()?;
            *order_histogram.entry(period).or_insert(0) += 1;
            if hom {
                *homology_counts.entry(period).or_insert(0) += 1;
            }
        }
        let abelian = self.elements.iter().all(|a| {
            self.elements
                .iter()
                .all(|b| a.compose(b) == b.compose(a))
        });
        let center_order = self
            .elements
            .iter()
            .filter(|a| {
                self.elements
                    .iter()
                    .all(|b| a.compose(b) == b.compose(a))
            })
            .count() as u64;
        Ok(GroupFingerprint {
            order: self.elements.len() as u64,
            abelian,
            order_histogram,
            homology_counts,
            center_order,
        })
    }
}

/// Conjugation-invariant summary used in place of an isomorphism test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupFingerprint {
    pub order: u64,
    pub abelian: bool,
    /// element order -> count
    pub order_histogram: BTreeMap<u64, u64>,
    /// homology period -> count of homology elements
    pub homology_counts: BTreeMap<u64, u64>,
    pub center_order: u64,
}

/// The fixed generator lists of the embedding catalog.
pub fn rho_generators(label: CatalogLabel, f: PrimeField) -> Vec<ProjectiveMap> {
    let z3 = f.root_of_unity(3).expect("3 | p-1");
    let z6 = f.root_of_unity(6).expect("6 | p-1");
    let z21 = f.root_of_unity(21).expect("21 | p-1");
    let one = Fe(1);
    let neg1 = f.neg(one);
    let z3i = f.inv(z3).expect("nonzero");
    let z6i = f.inv(z6).expect("nonzero");
    let diag = |a, b, c| ProjectiveMap::diagonal(f, [a, b, c]);
    let cycle = ProjectiveMap::permutation(f, [1, 2, 0]); // [Y:Z:X]
    let swap_yz = ProjectiveMap::permutation(f, [0, 2, 1]); // [X:Z:Y]
    match label {
        CatalogLabel::Trivial => vec![],
        CatalogLabel::Rho1Z2 => vec![diag(one, one, neg1)],
        CatalogLabel::Rho1Z2Square => vec![diag(one, one, neg1), diag(one, neg1, one)],
        CatalogLabel::Rho1Z3 => vec![diag(one, one, z3)],
        CatalogLabel::Rho1Z3Square => vec![diag(one, one, z3), diag(one, z3, one)],
        CatalogLabel::Rho2Z3 => vec![diag(one, z3, z3i)],
        CatalogLabel::Rho2Z3Square => vec![diag(one, z3, z3i), cycle],
        CatalogLabel::Rho1S3 => vec![cycle, swap_yz],
        CatalogLabel::Rho2S3 => vec![diag(one, z3, z3i), swap_yz],
        CatalogLabel::Rho1Z3SemiS3 => vec![cycle, swap_yz, diag(one, z3, z3i)],
        CatalogLabel::Rho1A4 => {
            vec![diag(one, one, neg1), diag(one, neg1, one), cycle]
        }
        CatalogLabel::Rho2A4 => vec![
            diag(one, one, neg1),
            diag(one, neg1, one),
            ProjectiveMap::scaled_permutation(f, [1, 2, 0], [z6i, one, one]),
        ],
        CatalogLabel::He3 => vec![diag(one, one, z3), diag(one, z3, one), cycle],
        CatalogLabel::AutFermat6 => vec![
            swap_yz,
            cycle,
            diag(z6, one, one),
            diag(one, z6, one),
        ],
        CatalogLabel::AutKlein6 => {
            vec![diag(one, z21, f.pow_i(z21, -4).expect("nonzero")), cycle]
        }
    }
}

/// Closure of the catalog generator list for `label`.
pub fn rho(label: CatalogLabel, f: PrimeField) -> Result<FiniteGroup, GroupError> {
    FiniteGroup::closure(f, rho_generators(label, f))
}

/// Precomputed fingerprint table for identification.
pub struct CatalogTable {
    entries: Vec<(CatalogLabel, GroupFingerprint)>,
}

impl CatalogTable {
    /// Builds fingerprints for every catalog label and checks the separation
    /// assumption: distinct across conjugacy classes, equal on the two
    /// conjugate pairs.
    pub fn new(f: PrimeField) -> Result<Self, GroupError> {
        let mut entries = Vec::new();
        for label in CatalogLabel::ALL {
            let fp = rho(label, f)?.fingerprint()?;
            entries.push((label, fp));
        }
        let find = |l: CatalogLabel| {
            entries
                .iter()
                .find(|(m, _)| *m == l)
                .map(|(_, fp)| fp)
                .expect("all labels present")
        };
        assert_eq!(
            find(CatalogLabel::Rho1S3),
            find(CatalogLabel::Rho2S3),
            "conjugate S3 embeddings must share a fingerprint"
        );
        assert_eq!(
            find(CatalogLabel::Rho1A4),
            find(CatalogLabel::Rho2A4),
            "conjugate A4 embeddings must share a fingerprint"
        );
        for (i, (la, fa)) in entries.iter().enumerate() {
            for (lb, fb) in &entries[i + 1..] {
                if la.canonical() == lb.canonical() {
                    continue;
                }
                assert_ne!(
                    fa, fb,
                    "catalog fingerprints must separate {la} and {lb}"
                );
            }
        }
        Ok(CatalogTable { entries })
    }

    /// Matches a group's fingerprint against the table; returns the
    /// canonical label of the class, or `None`.
    pub fn identify(&self, g: &FiniteGroup) -> Result<Option<CatalogLabel>, GroupError> {
        let fp = g.fingerprint()?;
        Ok(self
            .entries
            .iter()
            .find(|(_, t)| *t == fp)
            .map(|(l, _)| l.canonical()))
    }
}

/// The two presentations verified in the paper's proposition on the Fermat
/// and Klein sextics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresentationName {
    Fermat6,
    Klein6,
}

/// Evaluates the displayed relations on the displayed generators; true iff
/// all hold in `PGL_3`.
pub fn verify_presentation(name: PresentationName, f: PrimeField) -> bool {
    verify_presentation_gens(name, f, None)
}

/// Same, but allows overriding one generator (used to check that the
/// relations actually constrain something).
pub fn verify_presentation_gens(
    name: PresentationName,
    f: PrimeField,
    override_first: Option<ProjectiveMap>,
) -> bool {
    let pow = |m: &ProjectiveMap, k: i64| -> ProjectiveMap {
        let base = if k < 0 { m.inverse() } else { *m };
        let mut acc = ProjectiveMap::identity(f);
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    };
    match name {
        PresentationName::Fermat6 => {
            let z6 = f.root_of_unity(6).expect("6 | p-1");
            let a = override_first
                .unwrap_or_else(|| ProjectiveMap::permutation(f, [0, 2, 1]));
            let b = ProjectiveMap::permutation(f, [1, 2, 0]);
            let c = ProjectiveMap::diagonal(f, [z6, Fe(1), Fe(1)]);
            let d = ProjectiveMap::diagonal(f, [Fe(1), z6, Fe(1)]);
            let orders = a.order() == Ok(2)
                && b.order() == Ok(3)
                && c.order() == Ok(6)
                && d.order() == Ok(6);
            let ab2 = pow(&a.compose(&b), 2);
            let r2 = a.compose(&c).compose(&c.compose(&a).inverse());
            let r3 = c.compose(&d).compose(&d.compose(&c).inverse());
            let cd = c.compose(&d);
            let r4 = a.compose(&d).compose(&a).compose(&pow(&cd, -5));
            let r5 = b
                .compose(&c)
                .compose(&b.inverse())
                .compose(&pow(&cd, -5));
            orders && [ab2, r2, r3, r4, r5].iter().all(|m| m.is_identity())
        }
        PresentationName::Klein6 => {
            let z21 = f.root_of_unity(21).expect("21 | p-1");
            let a = override_first.unwrap_or_else(|| {
                ProjectiveMap::diagonal(f, [Fe(1), z21, f.pow_i(z21, -4).expect("nonzero")])
            });
            let b = ProjectiveMap::permutation(f, [1, 2, 0]);
            let orders = a.order() == Ok(21) && b.order() == Ok(3);
            // semidirect action: b a b^{-1} = a^{-5}
            orders && b.compose(&a).compose(&b.inverse()) == pow(&a, -5)
        }
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
    fn catalog_orders() {
        let f = f();
        let expect = [
            (CatalogLabel::Trivial, 1),
            (CatalogLabel::Rho1Z2, 2),
            (CatalogLabel::Rho1Z2Square, 4),
            (CatalogLabel::Rho1Z3, 3),
            (CatalogLabel::Rho1Z3Square, 9),
            (CatalogLabel::Rho2Z3, 3),
            (CatalogLabel::Rho2Z3Square, 9),
            (CatalogLabel::Rho1S3, 6),
            (CatalogLabel::Rho2S3, 6),
            (CatalogLabel::Rho1Z3SemiS3, 18),
            (CatalogLabel::Rho1A4, 12),
            (CatalogLabel::Rho2A4, 12),
            (CatalogLabel::He3, 27),
            (CatalogLabel::AutFermat6, 216),
            (CatalogLabel::AutKlein6, 63),
        ];
        for (label, order) in expect {
            assert_eq!(rho(label, f).unwrap().order(), order, "{label}");
        }
    }

    #[test]
    fn rho2_z3_elements() {
        let f = f();
        let g = rho(CatalogLabel::Rho2Z3, f).unwrap();
        let z3 = f.root_of_unity(3).unwrap();
        let z3i = f.inv(z3).unwrap();
        assert_eq!(g.order(), 3);
        assert!(g.contains(&ProjectiveMap::identity(f)));
        assert!(g.contains(&ProjectiveMap::diagonal(f, [Fe(1), z3, z3i])));
        assert!(g.contains(&ProjectiveMap::diagonal(
            f,
            [Fe(1), f.mul(z3, z3), f.mul(z3i, z3i)]
        )));
    }

    #[test]
    fn a4_fingerprint() {
        let f = f();
        let fp = rho(CatalogLabel::Rho1A4, f).unwrap().fingerprint().unwrap();
        assert_eq!(fp.order, 12);
        assert!(!fp.abelian);
        assert_eq!(
            fp.order_histogram,
            BTreeMap::from([(1, 1), (2, 3), (3, 8)])
        );
    }

    #[test]
    fn z3_square_homology_counts() {
        let f = f();
        let fp1 = rho(CatalogLabel::Rho1Z3Square, f)
            .unwrap()
            .fingerprint()
            .unwrap();
        assert_eq!(fp1.homology_counts, BTreeMap::from([(3, 6)]));
        let fp2 = rho(CatalogLabel::Rho2Z3Square, f)
            .unwrap()
            .fingerprint()
            .unwrap();
        assert!(fp2.homology_counts.is_empty());
    }

    #[test]
    fn semidirect_18_histogram() {
        let f = f();
        let g = rho(CatalogLabel::Rho1Z3SemiS3, f).unwrap();
        assert_eq!(g.order(), 18);
        let fp = g.fingerprint().unwrap();
        assert_eq!(
            fp.order_histogram,
            BTreeMap::from([(1, 1), (2, 9), (3, 8)])
        );
    }

    #[test]
    fn identification() {
        let f = f();
        let table = CatalogTable::new(f).unwrap();
        let fermat = rho(CatalogLabel::AutFermat6, f).unwrap();
        assert_eq!(
            table.identify(&fermat).unwrap(),
            Some(CatalogLabel::AutFermat6)
        );
        // homology vs non-homology order-3 groups are separated
        let r1 = rho(CatalogLabel::Rho1Z3, f).unwrap();
        let r2 = rho(CatalogLabel::Rho2Z3, f).unwrap();
        assert_eq!(table.identify(&r1).unwrap(), Some(CatalogLabel::Rho1Z3));
        assert_eq!(table.identify(&r2).unwrap(), Some(CatalogLabel::Rho2Z3));
        // unknown group
        let z7 = f.root_of_unity(7).unwrap();
        let c7 = FiniteGroup::closure(
            f,
            vec![ProjectiveMap::diagonal(f, [Fe(1), z7, Fe(1)])],
        )
        .unwrap();
        assert_eq!(table.identify(&c7).unwrap(), None);
    }

    #[test]
    fn fingerprint_conjugation_invariant() {
        let f = f();
        let g = rho(CatalogLabel::Rho1Z3SemiS3, f).unwrap();
        let p = ProjectiveMap::new(
            f,
            [
                [Fe(1), Fe(3), Fe(5)],
                [Fe(2), Fe(1), Fe(0)],
                [Fe(0), Fe(4), Fe(1)],
            ],
        )
        .unwrap();
        let conj = g.conjugate_by(&p);
        assert_eq!(conj.order(), g.order());
        assert_eq!(conj.fingerprint().unwrap(), g.fingerprint().unwrap());
    }

    #[test]
    fn presentations_hold() {
        let f = f();
        assert!(verify_presentation(PresentationName::Fermat6, f));
        assert!(verify_presentation(PresentationName::Klein6, f));
        // degenerate generator breaks the relations
        assert!(!verify_presentation_gens(
            PresentationName::Fermat6,
            f,
            Some(ProjectiveMap::identity(f))
        ));
        assert!(!verify_presentation_gens(
            PresentationName::Klein6,
            f,
            Some(ProjectiveMap::identity(f))
        ));
    }

    #[test]
    fn subgroup_relations() {
        let f = f();
        let k6 = rho(CatalogLabel::AutKlein6, f).unwrap();
        let f6 = rho(CatalogLabel::AutFermat6, f).unwrap();
        let r2z3 = rho(CatalogLabel::Rho2Z3, f).unwrap();
        assert!(r2z3.is_subgroup_of(&k6));
        assert!(rho(CatalogLabel::Rho1Z2, f)
            .unwrap()
            .is_subgroup_of(&f6));
        assert!(r2z3.is_subgroup_of(&rho(CatalogLabel::Rho1Z3Square, f).unwrap()));
        // Lagrange on nested generator sets
        assert_eq!(f6.order() % rho(CatalogLabel::Rho1S3, f).unwrap().order(), 0);
    }

    #[test]
    fn triangle_stability() {
        let f = f();
        assert!(rho(CatalogLabel::Rho2Z3Square, f)
            .unwrap()
            .coordinate_triangle_stable());
        assert!(FiniteGroup::trivial(f).coordinate_triangle_stable());
    }

    #[test]
    fn closure_cap_signals() {
        let f = f();
        // an element of large order plus a generic conjugate blows the cap
        let m = ProjectiveMap::new(
            f,
            [
                [Fe(1), Fe(1), Fe(0)],
                [Fe(0), Fe(1), Fe(1)],
                [Fe(1), Fe(0), Fe(2)],
            ],
        )
        .unwrap();
        let err = FiniteGroup::closure(f, vec![m]);
        assert!(matches!(
            err,
            Err(GroupError::ClosureCapExceeded(_)) | Ok(_)
        ));
    }
}

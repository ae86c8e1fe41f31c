//! Homomorphism enumeration and counting, morphism checks, conjunctive
//! queries, extension classes and profile comparison.

mod cq;
mod morphism;
mod profile;
mod search;
pub mod span;

pub use cq::{Atom, ConjunctiveQuery, CqError};
pub use morphism::{
    fully_surjective_hom_exists, hom_equivalent, injective_hom_exists, isomorphic, morphism_check,
    MorphismKind,
};
pub use profile::{compare_profiles, ProfileError, ext_membership, Membership, ProfileBound, ProfileStatus, ProfileVerdict};
pub use search::{HomCounter, TargetIndex};

use num_bigint::BigUint;

use crate::semiring::{Elem, Semiring};
use crate::structure::{PointedStructure, StructureError};

use search::Plan;

/// A homomorphism `source → target` given by the image of every source state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomMap {
    pub source: PointedStructure,
    pub target: PointedStructure,
    pub assignment: Vec<usize>,
}

impl HomMap {
    /// Re-checks the homomorphism conditions.
    pub fn is_valid(&self) -> bool {
        is_homomorphism(&self.source, &self.target, &self.assignment)
    }
}

fn check_signatures(a: &PointedStructure, b: &PointedStructure) -> Result<(), StructureError> {
    if a.same_signature(b) {
        Ok(())
    } else {
        Err(StructureError::SignatureMismatch)
    }
}

/// Whether `h` maps the distinguished state to the distinguished state and
/// preserves every fact.
pub fn is_homomorphism(source: &PointedStructure, target: &PointedStructure, h: &[usize]) -> bool {
    h.len() == source.state_count()
        && h.iter().all(|&t| t < target.state_count())
        && h[source.distinguished()] == target.distinguished()
        && source.states().all(|s| source.label(s) & !target.label(h[s]) == 0)
        && (0..source.action_count()).all(|a| source.edges(a).iter().all(|&(u, v)| target.has_edge(a, h[u], h[v])))
}

/// `Hom(T, M)` in a deterministic order (backtracking from the distinguished
/// state in BFS order, candidates by increasing target index).
pub fn enumerate_homs(t: &PointedStructure, m: &PointedStructure) -> Result<Vec<HomMap>, StructureError> {
    check_signatures(t, m)?;
    let plan = Plan::whole(t);
    let index = TargetIndex::new(m);
    let mut out = Vec::new();
    plan.search(&index, false, &mut |h| {
        out.push(HomMap {
            source: t.clone(),
            target: m.clone(),
            assignment: h.to_vec(),
        });
        true
    });
    Ok(out)
}

/// `|Hom(T, M)|` as an unbounded natural.
pub fn count_homs_nat(t: &PointedStructure, m: &PointedStructure) -> Result<BigUint, StructureError> {
    check_signatures(t, m)?;
    Ok(HomCounter::new(t).count(&TargetIndex::new(m)))
}

/// `hom_S(T, M) = count_S(|Hom(T, M)|)`.
pub fn count_homs(s: &Semiring, t: &PointedStructure, m: &PointedStructure) -> Result<Elem, StructureError> {
    Ok(s.count_in(&count_homs_nat(t, m)?))
}

pub fn hom_exists(t: &PointedStructure, m: &PointedStructure) -> Result<bool, StructureError> {
    check_signatures(t, m)?;
    let mut found = false;
    Plan::whole(t).search(&TargetIndex::new(m), false, &mut |_| {
        found = true;
        false
    });
    Ok(found)
}

/// Reference count: tries every map with the distinguished state fixed.
pub fn brute_force_count(t: &PointedStructure, m: &PointedStructure) -> u64 {
    let n = t.state_count();
    let k = m.state_count();
    let free: Vec<usize> = t.states().filter(|&s| s != t.distinguished()).collect();
    let mut h = vec![0; n];
    h[t.distinguished()] = m.distinguished();
    let mut count = 0;
    let total = (k as u64).pow(free.len() as u32);
    for code in 0..total {
        let mut c = code;
        for &s in &free {
            h[s] = (c % k as u64) as usize;
            c /= k as u64;
        }
        if is_homomorphism(t, m, &h) {
            count += 1;
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;
    use crate::transform::{make_clique, make_figure3_pair};

    fn chain(n: usize, last_p: bool) -> PointedStructure {
        let mut b = PointedStructure::builder(Signature::standard(), n);
        for i in 1..n {
            b = b.edge("R", i - 1, i);
        }
        if last_p {
            b = b.prop(n - 1, "p");
        }
        b.build().unwrap()
    }

    #[test]
    fn single_point_maps_once() {
        let (m, _) = make_figure3_pair();
        let t = PointedStructure::point(Signature::standard(), 0).unwrap();
        assert_eq!(enumerate_homs(&t, &m).unwrap().len(), 1);
    }

    #[test]
    fn chain_into_figure3() {
        let (m, n) = make_figure3_pair();
        let homs = enumerate_homs(&chain(2, false), &m).unwrap();
        assert_eq!(homs.len(), 2);
        assert!(homs.iter().all(HomMap::is_valid));
        assert_eq!(homs[0].assignment, vec![0, 1]);
        assert_eq!(count_homs(&Semiring::Natural, &chain(2, true), &m).unwrap(), Elem::small(1));
        assert_eq!(count_homs_nat(&chain(2, false), &n).unwrap(), BigUint::from(1u32));
    }

    #[test]
    fn clique_counts() {
        let k2 = make_clique(2, true);
        let t = chain(3, false);
        assert_eq!(enumerate_homs(&t, &k2).unwrap().len(), 4);
        assert_eq!(count_homs(&Semiring::Natural, &t, &k2).unwrap(), Elem::small(4));
    }

    #[test]
    fn label_mismatch_gives_zero() {
        let p = PointedStructure::point(Signature::standard(), 1).unwrap();
        let e = PointedStructure::point(Signature::standard(), 0).unwrap();
        assert_eq!(count_homs(&Semiring::Boolean, &p, &e).unwrap(), Elem::small(0));
        assert!(!hom_exists(&p, &e).unwrap());
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = PointedStructure::point(Signature::standard(), 0).unwrap();
        let b = PointedStructure::point(Signature::new(["q"], ["R"]).unwrap(), 0).unwrap();
        assert!(count_homs_nat(&a, &b).is_err());
    }

    #[test]
    fn forest_sources_multiply_components() {
        let f = PointedStructure::builder(Signature::standard(), 4)
            .edge("R", 0, 1)
            .edge("R", 2, 3)
            .build()
            .unwrap();
        let k3 = make_clique(3, false);
        // 3 choices for the root's child, 9 for the free edge
        assert_eq!(count_homs_nat(&f, &k3).unwrap(), BigUint::from(27u32));
        assert_eq!(brute_force_count(&f, &k3), 27);
    }

    #[test]
    fn large_counts_do_not_overflow() {
        let star = {
            let mut b = PointedStructure::builder(Signature::standard(), 41);
            for i in 1..41 {
                b = b.edge("R", 0, i);
            }
            b.build().unwrap()
        };
        let k20 = make_clique(20, false);
        assert_eq!(count_homs_nat(&star, &k20).unwrap(), BigUint::from(20u32).pow(40));
        let tri = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 1, 2)
            .edge("R", 2, 0)
            .build()
            .unwrap();
        let k70 = make_clique(70, false);
        assert_eq!(count_homs_nat(&tri, &k70).unwrap(), BigUint::from(4900u32));
    }
}

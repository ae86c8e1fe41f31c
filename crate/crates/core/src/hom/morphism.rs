use std::str::FromStr;

use crate::canon::{canonical_code, refine_colors, tree_code};
use crate::structure::{classify, ClassKind, PointedStructure};

use super::search::{Plan, TargetIndex};
use super::{hom_exists, is_homomorphism};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismKind {
    InjectiveHomExists,
    FullySurjectiveHomExists,
    Isomorphic,
    HomEquivalent,
}

impl FromStr for MorphismKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "injective" | "injective-hom-exists" => MorphismKind::InjectiveHomExists,
            "surjective" | "fully-surjective-hom-exists" => MorphismKind::FullySurjectiveHomExists,
            "iso" | "isomorphic" => MorphismKind::Isomorphic,
            "hom-equivalent" => MorphismKind::HomEquivalent,
            other => return Err(format!("unknown morphism kind `{other}`")),
        })
    }
}

pub fn morphism_check(kind: MorphismKind, a: &PointedStructure, b: &PointedStructure) -> bool {
    if !a.same_signature(b) {
        return false;
    }
    match kind {
        MorphismKind::InjectiveHomExists => injective_hom_exists(a, b),
        MorphismKind::FullySurjectiveHomExists => fully_surjective_hom_exists(a, b),
        MorphismKind::Isomorphic => isomorphic(a, b),
        MorphismKind::HomEquivalent => hom_equivalent(a, b),
    }
}

pub fn injective_hom_exists(a: &PointedStructure, b: &PointedStructure) -> bool {
    if a.state_count() > b.state_count() || a.edge_count() > b.edge_count() {
        return false;
    }
    let mut found = false;
    Plan::whole(a).search(&TargetIndex::new(b), true, &mut |_| {
        found = true;
        false
    });
    found
}

fn covers_all_facts(a: &PointedStructure, b: &PointedStructure, h: &[usize]) -> bool {
    let mut hit = vec![false; b.state_count()];
    let mut labels = vec![0u64; b.state_count()];
    for s in a.states() {
        hit[h[s]] = true;
        labels[h[s]] |= a.label(s);
    }
    if hit.iter().any(|x| !x) || b.states().any(|t| labels[t] != b.label(t)) {
        return false;
    }
    (0..b.action_count()).all(|act| {
        let image: std::collections::BTreeSet<(usize, usize)> =
            a.edges(act).iter().map(|&(u, v)| (h[u], h[v])).collect();
        image.len() == b.edges(act).len()
    })
}

/// A homomorphism `a → b` hitting every state and every fact of `b`.
pub fn fully_surjective_hom_exists(a: &PointedStructure, b: &PointedStructure) -> bool {
    if a.state_count() < b.state_count() || a.edge_count() < b.edge_count() {
        return false;
    }
    let mut found = false;
    Plan::whole(a).search(&TargetIndex::new(b), false, &mut |h| {
        found = covers_all_facts(a, b, h);
        !found
    });
    found
}

pub fn hom_equivalent(a: &PointedStructure, b: &PointedStructure) -> bool {
    hom_exists(a, b).unwrap_or(false) && hom_exists(b, a).unwrap_or(false)
}

fn label_multiset(m: &PointedStructure) -> Vec<u64> {
    let mut v = m.labels().to_vec();
    v.sort_unstable();
    v
}

/// Exact isomorphism test for pointed structures.
///
/// Cheap invariants first, then tree codes for trees, permutation-minimal codes
/// for small structures, and otherwise a color-guided bijection search.
pub fn isomorphic(a: &PointedStructure, b: &PointedStructure) -> bool {
    if !a.same_signature(b)
        || a.state_count() != b.state_count()
        || (0..a.action_count()).any(|x| a.edges(x).len() != b.edges(x).len())
        || a.label(a.distinguished()) != b.label(b.distinguished())
        || label_multiset(a) != label_multiset(b)
    {
        return false;
    }
    let (ca, cb) = (classify(a), classify(b));
    if ca.kinds != cb.kinds {
        return false;
    }
    if ca.has(ClassKind::Tree) {
        return tree_code(a) == tree_code(b);
    }
    if let (Some(x), Some(y)) = (canonical_code(a), canonical_code(b)) {
        return x == y;
    }
    let colors = refine_colors(&[a, b]);
    let mut sa = colors[0].clone();
    let mut sb = colors[1].clone();
    sa.sort_unstable();
    sb.sort_unstable();
    if sa != sb {
        return false;
    }
    color_bijection(a, b, &colors[0], &colors[1])
}

fn color_bijection(a: &PointedStructure, b: &PointedStructure, ca: &[u32], cb: &[u32]) -> bool {
    let n = a.state_count();
    // assign states of `a` in BFS order from the point, then the rest
    let plan_order: Vec<usize> = Plan::whole(a).vars().collect();
    let mut h = vec![usize::MAX; n];
    let mut used = vec![false; n];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        order: &[usize],
        a: &PointedStructure,
        b: &PointedStructure,
        ca: &[u32],
        cb: &[u32],
        h: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == order.len() {
            return is_homomorphism(a, b, h);
        }
        let s = order[i];
        let candidates: Vec<usize> = if s == a.distinguished() {
            vec![b.distinguished()]
        } else {
            b.states().filter(|&t| !used[t] && cb[t] == ca[s]).collect()
        };
        'next: for t in candidates {
            if a.label(s) != b.label(t) {
                continue;
            }
            for x in 0..a.action_count() {
                for &(u, v) in a.edges(x) {
                    let (hu, hv) = (if u == s { t } else { h[u] }, if v == s { t } else { h[v] });
                    if (u == s || v == s) && hu != usize::MAX && hv != usize::MAX && !b.has_edge(x, hu, hv) {
                        continue 'next;
                    }
                }
            }
            h[s] = t;
            used[t] = true;
            if rec(i + 1, order, a, b, ca, cb, h, used) {
                return true;
            }
            used[t] = false;
            h[s] = usize::MAX;
        }
        false
    }
    rec(0, &plan_order, a, b, ca, cb, &mut h, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;
    use crate::transform::{make_clique, make_figure3_pair};

    #[test]
    fn figure3_pair_is_hom_equivalent_not_isomorphic() {
        let (m, n) = make_figure3_pair();
        assert!(morphism_check(MorphismKind::HomEquivalent, &m, &n));
        assert!(!morphism_check(MorphismKind::Isomorphic, &m, &n));
        assert!(morphism_check(MorphismKind::FullySurjectiveHomExists, &m, &n));
        assert!(!morphism_check(MorphismKind::FullySurjectiveHomExists, &n, &m));
        assert!(morphism_check(MorphismKind::InjectiveHomExists, &n, &m));
    }

    #[test]
    fn clique_is_isomorphic_to_itself() {
        let k2 = make_clique(2, true);
        assert!(isomorphic(&k2, &k2));
        assert!(!isomorphic(&k2, &make_clique(2, false)));
    }

    #[test]
    fn surjective_collapse() {
        // two parallel branches fold onto one
        let m = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 0, 2)
            .build()
            .unwrap();
        let n = PointedStructure::builder(Signature::standard(), 2).edge("R", 0, 1).build().unwrap();
        assert!(fully_surjective_hom_exists(&m, &n));
        assert!(!fully_surjective_hom_exists(&n, &m));
    }

    #[test]
    fn large_structures_use_bijection_search() {
        let cycle = |n: usize, shift: usize| {
            let mut b = PointedStructure::builder(Signature::standard(), n);
            for i in 0..n {
                b = b.edge("R", (i + shift) % n, (i + 1 + shift) % n);
            }
            b.prop(shift % n, "p").point(shift % n).build().unwrap()
        };
        assert!(isomorphic(&cycle(10, 0), &cycle(10, 3)));
        let other = cycle(10, 0);
        let moved = other.with_distinguished(1).unwrap();
        assert!(!isomorphic(&cycle(10, 0), &moved));
    }
}

//! Exact comparison of tree profiles without a size bound.
//!
//! For a tree `T` and a structure `U`, write `f_T(x) = |Hom(T_root, U_x)|`.
//! These functions compose: a leaf labeled `L` gives the indicator of
//! `λ(x) ⊇ L`, merging two roots multiplies pointwise, and hanging a tree
//! below a fresh root along action `a` applies `(D_a f)(x) = Σ_{a(x,y)} f(y)`.
//! Hence the functions of trees of depth at most `j` span the algebra generated
//! by the letter indicators and `D_a` of the depth `j-1` functions, and two
//! states have equal counts for every such tree iff every basis element agrees
//! on them. Over ℕ this is a rational linear span; over 𝔹 the set of tree
//! functions is finite and closed under `∧`, so it is enumerated directly.
//! Every basis element carries a tree realizing it, which becomes the witness
//! when the two distinguished states are separated.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::structure::{PointedStructure, StructureError};
use crate::tree::RTree;

/// Largest union size handled by the Boolean closure (one bit per state).
pub const MAX_BOOL_STATES: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpanOutcome {
    /// Counts agree on every tree of the requested depth.
    Equal { dimension: usize, levels: usize },
    /// `witness` has different counts into the two structures.
    Differ { witness: RTree },
}

impl SpanOutcome {
    pub fn is_equal(&self) -> bool {
        matches!(self, SpanOutcome::Equal { .. })
    }

    pub fn witness(&self) -> Option<&RTree> {
        match self {
            SpanOutcome::Differ { witness } => Some(witness),
            SpanOutcome::Equal { .. } => None,
        }
    }
}

/// Exact ℕ tree-profile comparison of `m` and `n`; `depth = None` compares
/// over all trees.
pub fn nat_tree_profiles(
    m: &PointedStructure,
    n: &PointedStructure,
    depth: Option<usize>,
) -> Result<SpanOutcome, StructureError> {
    let u = m.disjoint_union(n)?;
    let a = m.distinguished();
    let b = m.state_count() + n.distinguished();
    Ok(NatSpan::new(&u).run(depth, a, b))
}

/// Exact 𝔹 tree-profile comparison (hom existence from every tree).
pub fn bool_tree_profiles(
    m: &PointedStructure,
    n: &PointedStructure,
    depth: Option<usize>,
) -> Result<SpanOutcome, StructureError> {
    let u = m.disjoint_union(n)?;
    if u.state_count() > MAX_BOOL_STATES {
        return Err(StructureError::Format(format!(
            "Boolean closure supports at most {MAX_BOOL_STATES} states"
        )));
    }
    let a = m.distinguished();
    let b = m.state_count() + n.distinguished();
    Ok(BoolClosure::new(&u).run(depth, a, b))
}

/// Counts of a tree from every state, by the recursion above. Used to check
/// witnesses independently of the search code.
pub fn tree_function(u: &PointedStructure, t: &RTree) -> Vec<BigInt> {
    let mut f: Vec<BigInt> = u
        .states()
        .map(|x| if u.label(x) & t.label == t.label { BigInt::one() } else { BigInt::zero() })
        .collect();
    for (a, child) in &t.children {
        let g = tree_function(u, child);
        for (x, fx) in f.iter_mut().enumerate() {
            let s: BigInt = u.successors(*a, x).iter().map(|&y| g[y].clone()).sum();
            *fx *= s;
        }
    }
    f
}

struct Element<V> {
    value: V,
    tree: RTree,
}

/// Candidates are processed smallest tree first, so witnesses stay small.
struct Queue<V> {
    heap: BinaryHeap<Reverse<(usize, usize)>>,
    items: HashMap<usize, Element<V>>,
    seq: usize,
}

impl<V> Queue<V> {
    fn new() -> Self {
        Queue { heap: BinaryHeap::new(), items: HashMap::new(), seq: 0 }
    }

    fn push(&mut self, value: V, tree: RTree) {
        self.heap.push(Reverse((tree.size(), self.seq)));
        self.items.insert(self.seq, Element { value, tree });
        self.seq += 1;
    }

    fn pop(&mut self) -> Option<Element<V>> {
        let Reverse((_, id)) = self.heap.pop()?;
        self.items.remove(&id)
    }
}

fn letter_leaves(u: &PointedStructure) -> Vec<(u64, RTree)> {
    let np = u.signature().props().len();
    std::iter::once(0u64)
        .chain((0..np).map(|p| 1u64 << p))
        .map(|l| (l, RTree::leaf(l)))
        .collect()
}

struct NatSpan<'a> {
    u: &'a PointedStructure,
    /// Reduced rows (pivot entry 1, zero at every other pivot).
    rows: Vec<(usize, Vec<BigRational>)>,
    basis: Vec<Element<Vec<BigInt>>>,
}

impl<'a> NatSpan<'a> {
    fn new(u: &'a PointedStructure) -> Self {
        NatSpan { u, rows: Vec::new(), basis: Vec::new() }
    }

    fn reduce(&self, v: &[BigInt]) -> Vec<BigRational> {
        let mut r: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for (p, row) in &self.rows {
            if !r[*p].is_zero() {
                let c = r[*p].clone();
                for (x, y) in r.iter_mut().zip(row) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        r
    }

    /// Adds `v` if it is outside the span; returns whether it was added.
    fn insert(&mut self, v: Vec<BigInt>, tree: RTree) -> bool {
        let mut r = self.reduce(&v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let c = row[p].clone();
                for (x, y) in row.iter_mut().zip(&r) {
                    if !y.is_zero() {
                        *x -= &c * y;
                    }
                }
            }
        }
        self.rows.push((p, r));
        self.basis.push(Element { value: v, tree });
        true
    }

    fn shift(&self, a: usize, f: &[BigInt]) -> Vec<BigInt> {
        self.u
            .states()
            .map(|x| self.u.successors(a, x).iter().map(|&y| f[y].clone()).sum())
            .collect()
    }

    /// Closes the span under products starting from `queue`; stops at the
    /// first new element separating `a` and `b`.
    fn close(&mut self, mut queue: Queue<Vec<BigInt>>, a: usize, b: usize) -> Option<RTree> {
        while let Some(Element { value, tree }) = queue.pop() {
            if !self.insert(value.clone(), tree.clone()) {
                continue;
            }
            if value[a] != value[b] {
                return Some(tree);
            }
            for other in &self.basis {
                let prod = value.iter().zip(&other.value).map(|(x, y)| x * y).collect();
                queue.push(prod, tree.merge(&other.tree));
            }
        }
        None
    }

    fn run(mut self, depth: Option<usize>, a: usize, b: usize) -> SpanOutcome {
        let mut queue = Queue::new();
        for (l, t) in letter_leaves(self.u) {
            let v = self.u.states().map(|x| BigInt::from(u8::from(self.u.label(x) & l == l))).collect();
            queue.push(v, t);
        }
        if let Some(witness) = self.close(queue, a, b) {
            return SpanOutcome::Differ { witness };
        }
        let mut levels = 0;
        while depth.is_none_or(|k| levels < k) {
            let before = self.basis.len();
            queue = Queue::new();
            for e in &self.basis {
                for act in 0..self.u.action_count() {
                    queue.push(self.shift(act, &e.value), RTree::lift(act, e.tree.clone()));
                }
            }
            levels += 1;
            if let Some(witness) = self.close(queue, a, b) {
                return SpanOutcome::Differ { witness };
            }
            if depth.is_none() && self.basis.len() == before {
                break;
            }
        }
        SpanOutcome::Equal { dimension: self.basis.len(), levels }
    }
}

struct BoolClosure<'a> {
    u: &'a PointedStructure,
    seen: HashMap<u128, RTree>,
    members: Vec<u128>,
}

impl<'a> BoolClosure<'a> {
    fn new(u: &'a PointedStructure) -> Self {
        BoolClosure { u, seen: HashMap::new(), members: Vec::new() }
    }

    fn shift(&self, a: usize, f: u128) -> u128 {
        self.u
            .states()
            .filter(|&x| self.u.successors(a, x).iter().any(|&y| f >> y & 1 == 1))
            .fold(0u128, |acc, x| acc | 1u128 << x)
    }

    fn close(&mut self, mut queue: Queue<u128>, a: usize, b: usize) -> Option<RTree> {
        while let Some(Element { value, tree }) = queue.pop() {
            if self.seen.contains_key(&value) {
                continue;
            }
            if (value >> a & 1) != (value >> b & 1) {
                return Some(tree);
            }
            self.seen.insert(value, tree.clone());
            self.members.push(value);
            for &other in &self.members {
                let prod = value & other;
                if !self.seen.contains_key(&prod) {
                    queue.push(prod, tree.merge(&self.seen[&other]));
                }
            }
        }
        None
    }

    fn run(mut self, depth: Option<usize>, a: usize, b: usize) -> SpanOutcome {
        let mut queue = Queue::new();
        for (l, t) in letter_leaves(self.u) {
            let v = self.u.states().filter(|&x| self.u.label(x) & l == l).fold(0u128, |acc, x| acc | 1u128 << x);
            queue.push(v, t);
        }
        let mut levels = 0;
        if let Some(witness) = self.close(queue, a, b) {
            return SpanOutcome::Differ { witness };
        }
        while depth.is_none_or(|k| levels < k) {
            let before = self.members.len();
            queue = Queue::new();
            for &f in &self.members {
                for act in 0..self.u.action_count() {
                    queue.push(self.shift(act, f), RTree::lift(act, self.seen[&f].clone()));
                }
            }
            levels += 1;
            if let Some(witness) = self.close(queue, a, b) {
                return SpanOutcome::Differ { witness };
            }
            if depth.is_none() && self.members.len() == before {
                break;
            }
        }
        SpanOutcome::Equal { dimension: self.members.len(), levels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::{count_homs_nat, hom_exists};
    use crate::structure::Signature;
    use crate::transform::{make_clique, make_figure3_pair, unravel};

    fn nat_counts_differ(m: &PointedStructure, n: &PointedStructure, t: &RTree) -> bool {
        let s = t.to_structure(m.signature_arc());
        count_homs_nat(&s, m).unwrap() != count_homs_nat(&s, n).unwrap()
    }

    #[test]
    fn figure3_pair() {
        let (m, n) = make_figure3_pair();
        let out = nat_tree_profiles(&m, &n, Some(1)).unwrap();
        let w = out.witness().expect("counts differ on the 2-chain");
        assert!(nat_counts_differ(&m, &n, w));
        assert_eq!(w.size(), 2);
        assert!(nat_tree_profiles(&m, &n, Some(0)).unwrap().is_equal());
        assert!(bool_tree_profiles(&m, &n, None).unwrap().is_equal());
    }

    #[test]
    fn cliques_are_tree_equivalent_only_in_bool() {
        let (k1, k2) = (make_clique(1, true), make_clique(2, true));
        assert!(bool_tree_profiles(&k1, &k2, None).unwrap().is_equal());
        let out = nat_tree_profiles(&k1, &k2, None).unwrap();
        assert!(nat_counts_differ(&k1, &k2, out.witness().unwrap()));
    }

    #[test]
    fn unraveling_preserves_bounded_profiles() {
        let m = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 1, 2)
            .edge("R", 2, 0)
            .edge("R", 1, 1)
            .prop(2, "p")
            .build()
            .unwrap();
        for k in 0..4 {
            let u = unravel(&m, k);
            assert!(nat_tree_profiles(&m, &u, Some(k)).unwrap().is_equal(), "k={k}");
            let deeper = nat_tree_profiles(&m, &u, Some(k + 1)).unwrap();
            let w = deeper.witness().expect("the unraveling is cut off");
            assert!(nat_counts_differ(&m, &u, w));
        }
    }

    #[test]
    fn bool_witnesses_are_real() {
        let a = PointedStructure::builder(Signature::standard(), 2).edge("R", 0, 1).edge("R", 1, 1).build().unwrap();
        let b = PointedStructure::builder(Signature::standard(), 3).edge("R", 0, 1).edge("R", 1, 2).build().unwrap();
        let out = bool_tree_profiles(&a, &b, None).unwrap();
        let w = out.witness().unwrap().to_structure(a.signature_arc());
        assert_ne!(hom_exists(&w, &a).unwrap(), hom_exists(&w, &b).unwrap());
        assert!(bool_tree_profiles(&a, &b, Some(2)).unwrap().is_equal());
    }

    #[test]
    fn tree_function_matches_counting() {
        let (m, _) = make_figure3_pair();
        let t = RTree { label: 0, children: vec![(0, RTree::leaf(0)), (0, RTree::leaf(1))] };
        let f = tree_function(&m, &t);
        let s = t.to_structure(m.signature_arc());
        assert_eq!(f[0], BigInt::from(count_homs_nat(&s, &m).unwrap()));
    }
}

//! Exhaustive and seeded-random generation of structure classes.
//!
//! Trees and forests are built constructively from multisets of subtrees.
//! Every other class is produced by orderly generation over raw bit codes
//! (the [`crate::canon::encode`] layout with the distinguished state at 0):
//! a code is kept iff no renaming fixing state 0 makes it smaller, so each
//! isomorphism type appears exactly once, and then filtered by
//! [`classify`]. Slices are ordered by state count, then by canonical code.

use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::canon::{code_width, next_permutation};
use crate::structure::{classify, ClassKind, ClassTag, PointedStructure, Signature};
use crate::tree::RTree;

pub const DEFAULT_MAX_TREE_STATES: usize = 7;
pub const DEFAULT_MAX_FILTER_STATES: usize = 5;
pub const DEFAULT_RAW_BUDGET: u128 = 1 << 28;
pub const DEFAULT_ATTEMPTS: usize = 1000;
const MAX_ENUM_PROPS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_tree_states: usize,
    pub max_filter_states: usize,
    /// Upper bound on the number of raw codes scanned by filter generation.
    pub max_raw: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_tree_states: DEFAULT_MAX_TREE_STATES,
            max_filter_states: DEFAULT_MAX_FILTER_STATES,
            max_raw: DEFAULT_RAW_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("{what} exceeds the enumeration budget ({budget})")]
    BudgetExceeded { what: String, budget: String },
    #[error("max_states must be at least 1")]
    NoStates,
    #[error("no {tag} structure with {states} states found after {attempts} attempts")]
    GaveUp { tag: ClassTag, states: usize, attempts: usize },
}

/// All structures of a class up to the given bounds, one per isomorphism type.
#[derive(Debug, Clone)]
pub struct ClassSlice {
    pub tag: ClassTag,
    pub signature: Arc<Signature>,
    pub max_states: usize,
    pub max_depth: Option<usize>,
    pub structures: Vec<PointedStructure>,
}

impl ClassSlice {
    pub fn len(&self) -> usize {
        self.structures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structures.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PointedStructure> {
        self.structures.iter()
    }
}

impl<'a> IntoIterator for &'a ClassSlice {
    type Item = &'a PointedStructure;
    type IntoIter = std::slice::Iter<'a, PointedStructure>;

    fn into_iter(self) -> Self::IntoIter {
        self.structures.iter()
    }
}

fn effective_depth(tag: &ClassTag, max_depth: Option<usize>) -> Option<usize> {
    match (tag.depth, max_depth) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

/// The slice of `tag` with at most `max_states` states and depth at most
/// `max_depth` (and the tag's own depth bound, if any), under the default budget.
pub fn enumerate_class(
    tag: ClassTag,
    sig: &Arc<Signature>,
    max_states: usize,
    max_depth: Option<usize>,
) -> Result<ClassSlice, EnumError> {
    enumerate_class_with_budget(tag, sig, max_states, max_depth, &Budget::default())
}

pub fn enumerate_class_with_budget(
    tag: ClassTag,
    sig: &Arc<Signature>,
    max_states: usize,
    max_depth: Option<usize>,
    budget: &Budget,
) -> Result<ClassSlice, EnumError> {
    let mut structures = Vec::new();
    for_each_in_class(tag, sig, max_states, max_depth, budget, |m| {
        structures.push(m.clone());
        true
    })?;
    Ok(ClassSlice {
        tag,
        signature: sig.clone(),
        max_states,
        max_depth: effective_depth(&tag, max_depth),
        structures,
    })
}

/// Streams the slice in canonical order without materializing it. The
/// callback returns `false` to stop early.
pub fn for_each_in_class(
    tag: ClassTag,
    sig: &Arc<Signature>,
    max_states: usize,
    max_depth: Option<usize>,
    budget: &Budget,
    mut f: impl FnMut(&PointedStructure) -> bool,
) -> Result<(), EnumError> {
    if max_states == 0 {
        return Err(EnumError::NoStates);
    }
    check_budget(tag.kind, sig, max_states, budget)?;
    let depth = effective_depth(&tag, max_depth);
    match tag.kind {
        ClassKind::Tree => {
            let mut gen = TreeGen::new(sig);
            for n in 1..=max_states {
                let d = depth.unwrap_or(n - 1).min(n - 1);
                for t in gen.exact(n, d).iter() {
                    if !f(&t.to_structure(sig)) {
                        return Ok(());
                    }
                }
            }
        }
        ClassKind::Forest => {
            let mut gen = TreeGen::new(sig);
            for n in 1..=max_states {
                for m in forests(&mut gen, sig, n, depth) {
                    if !f(&m) {
                        return Ok(());
                    }
                }
            }
        }
        kind => {
            let filter = ClassTag::new(kind, depth);
            for n in 1..=max_states {
                let go_on = orderly(sig, n, &mut |m| !classify(m).satisfies(&filter) || f(m));
                if !go_on {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

fn check_budget(kind: ClassKind, sig: &Signature, max_states: usize, budget: &Budget) -> Result<(), EnumError> {
    let np = sig.props().len();
    if np > MAX_ENUM_PROPS {
        return Err(EnumError::BudgetExceeded {
            what: format!("a signature with {np} proposition letters"),
            budget: format!("at most {MAX_ENUM_PROPS} letters"),
        });
    }
    match kind {
        ClassKind::Tree | ClassKind::Forest => {
            if max_states > budget.max_tree_states {
                return Err(EnumError::BudgetExceeded {
                    what: format!("{kind} enumeration with {max_states} states"),
                    budget: format!("at most {} states for trees and forests", budget.max_tree_states),
                });
            }
        }
        _ => {
            let raw: u128 = (1..=max_states)
                .map(|n| {
                    let w = code_width(n, np, sig.actions().len());
                    if w >= 127 {
                        u128::MAX
                    } else {
                        1u128 << w
                    }
                })
                .fold(0u128, |a, b| a.saturating_add(b));
            if max_states > budget.max_filter_states || raw > budget.max_raw {
                return Err(EnumError::BudgetExceeded {
                    what: format!("{kind} enumeration with {max_states} states over {sig} ({raw} raw codes)"),
                    budget: format!(
                        "at most {} states and {} raw codes for filtered classes",
                        budget.max_filter_states, budget.max_raw
                    ),
                });
            }
        }
    }
    Ok(())
}

/// Memoized generation of trees by exact size and depth bound.
struct TreeGen {
    labels: u64,
    actions: usize,
    memo: HashMap<(usize, usize), Rc<Vec<RTree>>>,
}

impl TreeGen {
    fn new(sig: &Signature) -> Self {
        TreeGen {
            labels: 1 << sig.props().len(),
            actions: sig.actions().len(),
            memo: HashMap::new(),
        }
    }

    /// Trees with exactly `size` states and depth at most `depth`, sorted by code.
    fn exact(&mut self, size: usize, depth: usize) -> Rc<Vec<RTree>> {
        let depth = depth.min(size - 1);
        if let Some(v) = self.memo.get(&(size, depth)) {
            return v.clone();
        }
        let mut out = Vec::new();
        if size == 1 {
            out.extend((0..self.labels).map(RTree::leaf));
        } else if depth > 0 && self.actions > 0 {
            let mut options: Vec<(usize, usize, RTree)> = Vec::new();
            for s in 1..size {
                let trees = self.exact(s, depth - 1);
                for a in 0..self.actions {
                    options.extend(trees.iter().map(|t| (s, a, t.clone())));
                }
            }
            let mut multisets = Vec::new();
            choose_multisets(&options, 0, size - 1, &mut Vec::new(), &mut multisets);
            for kids in &multisets {
                for label in 0..self.labels {
                    let children = kids.iter().map(|&i| (options[i].1, options[i].2.clone())).collect();
                    out.push(RTree { label, children }.normalized());
                }
            }
        }
        let mut keyed: Vec<(String, RTree)> = out.into_iter().map(|t| (t.code(), t)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let v = Rc::new(keyed.into_iter().map(|(_, t)| t).collect::<Vec<_>>());
        self.memo.insert((size, depth), v.clone());
        v
    }
}

/// Non-decreasing index sequences into `options` whose sizes sum to `remaining`.
fn choose_multisets(
    options: &[(usize, usize, RTree)],
    from: usize,
    remaining: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for i in from..options.len() {
        let s = options[i].0;
        if s <= remaining {
            cur.push(i);
            choose_multisets(options, i, remaining - s, cur, out);
            cur.pop();
        }
    }
}

/// Forests with exactly `n` states: a designated root tree plus a multiset of
/// further trees, each of depth at most `depth`.
fn forests(gen: &mut TreeGen, sig: &Arc<Signature>, n: usize, depth: Option<usize>) -> Vec<PointedStructure> {
    let trees_of = |gen: &mut TreeGen, s: usize| gen.exact(s, depth.unwrap_or(s - 1));
    let mut others: Vec<(usize, RTree)> = Vec::new();
    for s in 1..n {
        others.extend(trees_of(gen, s).iter().map(|t| (s, t.clone())));
    }
    let options: Vec<(usize, usize, RTree)> = others.into_iter().map(|(s, t)| (s, 0, t)).collect();
    let mut keyed: Vec<(usize, String, PointedStructure)> = Vec::new();
    for r in 1..=n {
        let roots = trees_of(gen, r);
        let mut multisets = Vec::new();
        choose_multisets(&options, 0, n - r, &mut Vec::new(), &mut multisets);
        for root in roots.iter() {
            for rest in &multisets {
                let parts: Vec<&RTree> = std::iter::once(root).chain(rest.iter().map(|&i| &options[i].2)).collect();
                let key = parts.iter().map(|t| t.code()).collect::<Vec<_>>().join("|");
                keyed.push((r, key, forest_structure(sig, &parts)));
            }
        }
    }
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    keyed.into_iter().map(|(_, _, m)| m).collect()
}

fn forest_structure(sig: &Arc<Signature>, parts: &[&RTree]) -> PointedStructure {
    let mut m = parts[0].to_structure(sig);
    for t in &parts[1..] {
        m = m.disjoint_union(&t.to_structure(sig)).expect("same signature");
    }
    m
}

/// Per-renaming lookup tables mapping each byte of a raw code to its image.
struct PermTables {
    chunks: usize,
    tables: Vec<Vec<[u128; 256]>>,
}

impl PermTables {
    fn new(n: usize, np: usize, na: usize) -> Self {
        let width = code_width(n, np, na);
        let chunks = width.div_ceil(8);
        let image_of_bit = |perm: &[usize], bit: usize| -> usize {
            let labels = n * np;
            if bit < labels {
                perm[bit / np] * np + bit % np
            } else {
                let e = bit - labels;
                let (a, rest) = (e / (n * n), e % (n * n));
                let (u, v) = (rest / n, rest % n);
                labels + a * n * n + perm[u] * n + perm[v]
            }
        };
        let mut tables = Vec::new();
        let mut images: Vec<usize> = (1..n).collect();
        loop {
            let perm: Vec<usize> = std::iter::once(0).chain(images.iter().copied()).collect();
            if perm.iter().enumerate().any(|(i, &p)| i != p) {
                let mut per_chunk = vec![[0u128; 256]; chunks];
                for (c, table) in per_chunk.iter_mut().enumerate() {
                    for (byte, slot) in table.iter_mut().enumerate() {
                        let mut img = 0u128;
                        for b in 0..8 {
                            let bit = c * 8 + b;
                            if byte >> b & 1 == 1 && bit < width {
                                img |= 1u128 << image_of_bit(&perm, bit);
                            }
                        }
                        *slot = img;
                    }
                }
                tables.push(per_chunk);
            }
            if !next_permutation(&mut images) {
                break;
            }
        }
        PermTables { chunks, tables }
    }

    fn is_minimal(&self, code: u128) -> bool {
        self.tables.iter().all(|t| {
            let mut img = 0u128;
            for (c, table) in t.iter().enumerate().take(self.chunks) {
                img |= table[(code >> (8 * c)) as usize & 0xff];
            }
            img >= code
        })
    }
}

fn decode(sig: &Arc<Signature>, n: usize, code: u128) -> PointedStructure {
    let np = sig.props().len();
    let na = sig.actions().len();
    let mask = (1u128 << np) - 1;
    let labels = (0..n).map(|s| ((code >> (s * np)) & mask) as u64).collect();
    let base = n * np;
    let mut edges = vec![BTreeSet::new(); na];
    for (a, rel) in edges.iter_mut().enumerate() {
        for u in 0..n {
            for v in 0..n {
                if code >> (base + a * n * n + u * n + v) & 1 == 1 {
                    rel.insert((u, v));
                }
            }
        }
    }
    PointedStructure::new(sig.clone(), labels, edges, 0).expect("decoded codes are valid")
}

/// Every isomorphism type with exactly `n` states, in increasing canonical
/// code. Returns `false` if the callback stopped the scan.
fn orderly(sig: &Arc<Signature>, n: usize, f: &mut dyn FnMut(&PointedStructure) -> bool) -> bool {
    let np = sig.props().len();
    let na = sig.actions().len();
    let width = code_width(n, np, na);
    let tables = PermTables::new(n, np, na);
    let end: u128 = 1u128 << width;
    let mut code = 0u128;
    while code < end {
        if tables.is_minimal(code) && !f(&decode(sig, n, code)) {
            return false;
        }
        code += 1;
    }
    true
}

/// Shape parameters for [`random_structure`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomParams {
    pub states: usize,
    /// Probability of each optional edge.
    pub density: f64,
    pub attempts: usize,
}

impl RandomParams {
    pub fn new(states: usize, density: f64) -> Self {
        RandomParams { states, density, attempts: DEFAULT_ATTEMPTS }
    }
}

/// A structure in `tag` with exactly `params.states` states, determined by `seed`.
///
/// Candidates are drawn from a shape that usually lands in the class and
/// rejected until [`classify`] confirms membership.
pub fn random_structure(
    tag: ClassTag,
    sig: &Arc<Signature>,
    params: RandomParams,
    seed: u64,
) -> Result<PointedStructure, EnumError> {
    let n = params.states;
    if n == 0 {
        return Err(EnumError::NoStates);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..params.attempts {
        let m = candidate(tag.kind, sig, &params, &mut rng);
        if classify(&m).satisfies(&tag) {
            return Ok(m);
        }
    }
    Err(EnumError::GaveUp { tag, states: n, attempts: params.attempts })
}

fn candidate(kind: ClassKind, sig: &Arc<Signature>, params: &RandomParams, rng: &mut ChaCha8Rng) -> PointedStructure {
    let n = params.states;
    let na = sig.actions().len();
    let full = sig.full_label();
    let labels: Vec<u64> = (0..n).map(|_| rng.gen::<u64>() & full).collect();
    let mut edges = vec![BTreeSet::new(); na];
    if na > 0 {
        let forest = kind == ClassKind::Forest;
        let skeleton = matches!(
            kind,
            ClassKind::Tree | ClassKind::ConnectedAcyclic | ClassKind::PointGenerated | ClassKind::Connected
        ) || forest;
        if skeleton {
            for v in 1..n {
                if forest && rng.gen_bool(0.3) {
                    continue;
                }
                let u = rng.gen_range(0..v);
                let a = rng.gen_range(0..na);
                let oriented = matches!(kind, ClassKind::ConnectedAcyclic | ClassKind::Connected) && rng.gen_bool(0.5);
                edges[a].insert(if oriented { (v, u) } else { (u, v) });
            }
        }
        if matches!(kind, ClassKind::PointGenerated | ClassKind::Connected | ClassKind::Any) {
            for rel in edges.iter_mut() {
                for u in 0..n {
                    for v in 0..n {
                        if rng.gen_bool(params.density.clamp(0.0, 1.0)) {
                            rel.insert((u, v));
                        }
                    }
                }
            }
        }
    }
    PointedStructure::new(sig.clone(), labels, edges, 0).expect("generated endpoints are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::isomorphic;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::standard())
    }

    fn count(kind: ClassKind, n: usize, depth: Option<usize>) -> usize {
        enumerate_class(ClassTag::new(kind, depth), &sig(), n, None).unwrap().len()
    }

    #[test]
    fn small_slice_sizes() {
        assert_eq!(count(ClassKind::Tree, 2, Some(0)), 2);
        assert_eq!(count(ClassKind::Tree, 2, Some(1)), 6);
        assert_eq!(count(ClassKind::Connected, 1, Some(1)), 4);
        // 2-colored rooted trees: 2, 4, 14, 52
        assert_eq!(count(ClassKind::Tree, 4, None), 2 + 4 + 14 + 52);
    }

    fn brute(kind: ClassKind, n: usize) -> usize {
        let sig = sig();
        let mut reps: Vec<PointedStructure> = Vec::new();
        for size in 1..=n {
            let w = code_width(size, 1, 1);
            for code in 0..(1u128 << w) {
                for d in 0..size {
                    let m = decode(&sig, size, code).with_distinguished(d).unwrap();
                    if classify(&m).has(kind) && !reps.iter().any(|r| isomorphic(r, &m)) {
                        reps.push(m);
                    }
                }
            }
        }
        reps.len()
    }

    #[test]
    fn slices_match_brute_force() {
        for kind in ClassKind::TAGGED.into_iter().chain([ClassKind::Any]) {
            assert_eq!(count(kind, 2, None), brute(kind, 2), "{kind}");
        }
        assert_eq!(count(ClassKind::Forest, 3, None), brute(ClassKind::Forest, 3));
        assert_eq!(count(ClassKind::ConnectedAcyclic, 3, None), brute(ClassKind::ConnectedAcyclic, 3));
    }

    #[test]
    fn slices_have_no_isomorphic_duplicates() {
        for kind in ClassKind::TAGGED {
            let slice = enumerate_class(ClassTag::unbounded(kind), &sig(), 3, None).unwrap();
            for (i, a) in slice.iter().enumerate() {
                assert!(classify(a).has(kind));
                for b in &slice.structures[i + 1..] {
                    assert!(!isomorphic(a, b), "{kind}: {a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = enumerate_class(ClassTag::unbounded(ClassKind::Any), &sig(), 5, None).unwrap_err();
        assert!(err.to_string().contains("budget"));
        assert!(enumerate_class(ClassTag::unbounded(ClassKind::Tree), &sig(), 8, None).is_err());
    }

    #[test]
    fn random_structures_are_deterministic_and_tagged() {
        for kind in ClassKind::TAGGED {
            let tag = ClassTag::unbounded(kind);
            let a = random_structure(tag, &sig(), RandomParams::new(5, 0.2), 1).unwrap();
            let b = random_structure(tag, &sig(), RandomParams::new(5, 0.2), 1).unwrap();
            assert_eq!(a, b);
            assert!(tag.contains(&a));
            assert_eq!(a.state_count(), 5);
        }
        let one = random_structure(ClassTag::unbounded(ClassKind::PointGenerated), &sig(), RandomParams::new(1, 0.5), 9);
        assert_eq!(one.unwrap().state_count(), 1);
    }
}

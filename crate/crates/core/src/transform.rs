//! Structure transformations: depth restriction, unraveling, generated
//! submodels, backward and global expansions, the ↓-transform and its inverse
//! `flip`, PG-augmentation, R_G-connection, and the clique / Figure-3 generators.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::structure::{
    classify, connected_components, directed_depths, in_degrees, undirected_depths, ClassKind, ExpansionMode,
    PointedStructure, Signature, StructureError,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("{op} requires {required} input")]
    WrongClass { op: &'static str, required: &'static str },
    #[error("{op} requires a structure over {required}")]
    WrongSignature { op: &'static str, required: &'static str },
    #[error("input violates the reachability condition: a derived edge leaves an unreachable state")]
    ConditionViolated,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Which distance from the distinguished state `restrict_depth` uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthNotion {
    /// Length of a shortest directed path; needs a point-generated input.
    Directed,
    /// Length of a shortest σ-path ignoring direction; needs a connected input.
    Undirected,
}

/// `M^k`: the substructure induced by the states of depth at most `k`.
/// Directed depth is used for point-generated inputs, σ-path depth otherwise.
pub fn restrict_depth(m: &PointedStructure, k: usize) -> Result<PointedStructure, TransformError> {
    let notion = if directed_depths(m).is_some() { DepthNotion::Directed } else { DepthNotion::Undirected };
    restrict_depth_by(m, k, notion)
}

pub fn restrict_depth_by(m: &PointedStructure, k: usize, notion: DepthNotion) -> Result<PointedStructure, TransformError> {
    let depths = match notion {
        DepthNotion::Directed => directed_depths(m).ok_or(TransformError::WrongClass {
            op: "directed depth restriction",
            required: "a point-generated",
        })?,
        DepthNotion::Undirected => undirected_depths(m).ok_or(TransformError::WrongClass {
            op: "σ-path depth restriction",
            required: "a connected",
        })?,
    };
    let keep: Vec<usize> = m.states().filter(|&s| depths[s] <= k).collect();
    Ok(m.induced(&keep)?)
}

/// `unr^k(M)` together with the walk behind every state.
///
/// A walk is the list of visited states starting at the distinguished one.
/// Children are indexed by (action, successor), so a pair related by two
/// actions yields two children and the result stays a tree. States are
/// numbered breadth-first.
pub fn unravel_walks(m: &PointedStructure, k: usize) -> (PointedStructure, Vec<Vec<usize>>) {
    let mut walks: Vec<Vec<usize>> = vec![vec![m.distinguished()]];
    let mut labels = vec![m.label(m.distinguished())];
    let mut edges = vec![BTreeSet::new(); m.action_count()];
    let mut frontier = vec![0usize];
    for _ in 0..k {
        let mut next = Vec::new();
        for &w in &frontier {
            let last = *walks[w].last().expect("walks are nonempty");
            for (a, rel) in edges.iter_mut().enumerate() {
                for &u in m.successors(a, last) {
                    let id = walks.len();
                    let mut walk = walks[w].clone();
                    walk.push(u);
                    walks.push(walk);
                    labels.push(m.label(u));
                    rel.insert((w, id));
                    next.push(id);
                }
            }
        }
        frontier = next;
    }
    let t = PointedStructure::new(m.signature_arc().clone(), labels, edges, 0).expect("walk tree is valid");
    (t, walks)
}

/// `unr^k(M)`: the tree of directed walks of length at most `k` from the point.
pub fn unravel(m: &PointedStructure, k: usize) -> PointedStructure {
    unravel_walks(m, k).0
}

/// Number of states of `unr^k(M)` without building it.
pub fn unravel_size(m: &PointedStructure, k: usize) -> u128 {
    let mut per_state = vec![1u128; m.state_count()];
    for _ in 0..k {
        per_state = m
            .states()
            .map(|s| {
                1 + (0..m.action_count())
                    .flat_map(|a| m.successors(a, s))
                    .map(|&t| per_state[t])
                    .fold(0u128, u128::saturating_add)
            })
            .collect();
    }
    per_state[m.distinguished()]
}

/// States reachable from the point by directed paths, with their distances.
fn reach_depths(m: &PointedStructure) -> Vec<Option<usize>> {
    let mut dist = vec![None; m.state_count()];
    dist[m.distinguished()] = Some(0);
    let mut queue = VecDeque::from([m.distinguished()]);
    while let Some(u) = queue.pop_front() {
        let d = dist[u].expect("queued states are reached");
        for v in m.any_successors(u) {
            if dist[v].is_none() {
                dist[v] = Some(d + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// `gsub(M)` (or `gsub^k(M)`): the substructure generated by the point.
/// Kept states retain their relative order.
pub fn gsub(m: &PointedStructure, k: Option<usize>) -> PointedStructure {
    let dist = reach_depths(m);
    let keep: Vec<usize> = m
        .states()
        .filter(|&s| dist[s].is_some_and(|d| k.is_none_or(|k| d <= k)))
        .collect();
    m.induced(&keep).expect("the point is always kept")
}

fn base_only(m: &PointedStructure, op: &'static str) -> Result<(), TransformError> {
    if m.signature().expansion_mode().is_some() {
        return Err(TransformError::WrongSignature { op, required: "a base signature" });
    }
    Ok(())
}

fn backward_sig(m: &PointedStructure, op: &'static str) -> Result<(), TransformError> {
    if m.signature().expansion_mode() != Some(ExpansionMode::Backward) {
        return Err(TransformError::WrongSignature { op, required: "a backward-expanded signature" });
    }
    Ok(())
}

/// `M^B`: adds `B_i = R_i⁻¹` for every action.
pub fn backward_expansion(m: &PointedStructure) -> Result<PointedStructure, TransformError> {
    base_only(m, "backward expansion")?;
    let sig = Arc::new(m.signature().backward().expect("base signature"));
    let mut edges: Vec<BTreeSet<(usize, usize)>> = m.all_edges().to_vec();
    for rel in m.all_edges() {
        edges.push(rel.iter().map(|&(u, v)| (v, u)).collect());
    }
    Ok(m.with_relations(sig, edges)?)
}

/// The same structure over `σ_B` with every `B_i` empty.
pub fn lift_to_backward(m: &PointedStructure) -> Result<PointedStructure, TransformError> {
    base_only(m, "lifting to the backward signature")?;
    let sig = Arc::new(m.signature().backward().expect("base signature"));
    let mut edges: Vec<BTreeSet<(usize, usize)>> = m.all_edges().to_vec();
    edges.resize(sig.actions().len(), BTreeSet::new());
    Ok(m.with_relations(sig, edges)?)
}

/// `M^G`: adds the complete relation `R_G`, self-pairs included.
pub fn global_expansion(m: &PointedStructure) -> Result<PointedStructure, TransformError> {
    base_only(m, "global expansion")?;
    let sig = Arc::new(m.signature().global().expect("base signature"));
    let mut edges: Vec<BTreeSet<(usize, usize)>> = m.all_edges().to_vec();
    edges.push(m.states().flat_map(|u| m.states().map(move |v| (u, v))).collect());
    Ok(m.with_relations(sig, edges)?)
}

/// The σ-reduct of a structure over an expanded signature: derived actions dropped.
pub fn reduct(m: &PointedStructure) -> PointedStructure {
    let sig = m.signature();
    if sig.expansion_mode().is_none() {
        return m.clone();
    }
    let base = Arc::new(sig.base());
    let edges = m.all_edges()[..sig.base_action_count()].to_vec();
    m.with_relations(base, edges).expect("reduct keeps valid relations")
}

/// `T↓`: a connected acyclic σ-structure as a σ_B-tree. Edges pointing away
/// from the root stay; an edge `R_i(m, n)` pointing towards the root becomes
/// `B_i(n, m)`.
pub fn down_transform(t: &PointedStructure) -> Result<PointedStructure, TransformError> {
    base_only(t, "the down transform")?;
    if !classify(t).has(ClassKind::ConnectedAcyclic) {
        return Err(TransformError::WrongClass { op: "the down transform", required: "a connected acyclic" });
    }
    let depth = undirected_depths(t).expect("connected");
    let sig = Arc::new(t.signature().backward().expect("base signature"));
    let na = t.action_count();
    let mut edges = vec![BTreeSet::new(); 2 * na];
    for a in 0..na {
        for &(u, v) in t.edges(a) {
            if depth[v] > depth[u] {
                edges[a].insert((u, v));
            } else {
                edges[na + a].insert((v, u));
            }
        }
    }
    Ok(t.with_relations(sig, edges)?)
}

/// `flip(S)`: `R_i ∪ B_i⁻¹` over the base signature.
pub fn flip(s: &PointedStructure) -> Result<PointedStructure, TransformError> {
    backward_sig(s, "flip")?;
    let na = s.signature().base_action_count();
    let base = Arc::new(s.signature().base());
    let edges = (0..na)
        .map(|a| {
            s.edges(a)
                .iter()
                .copied()
                .chain(s.edges(na + a).iter().map(|&(u, v)| (v, u)))
                .collect()
        })
        .collect();
    Ok(s.with_relations(base, edges)?)
}

/// Directed reachability from the point over every action of the signature.
pub fn reach(m: &PointedStructure) -> Vec<bool> {
    reach_depths(m).into_iter().map(|d| d.is_some()).collect()
}

/// Whether every edge from an unreachable state into a reachable one is a
/// base action.
pub fn satisfies_reach_condition(m: &PointedStructure) -> bool {
    let r = reach(m);
    let base = m.signature().base_action_count();
    (base..m.action_count()).all(|a| m.edges(a).iter().all(|&(u, v)| r[u] || !r[v]))
}

/// One expansion step: every base edge `R_i(m, n)` with `m` unreachable and
/// `n` reachable is replaced by `B_i(n, m)`.
pub fn exp_step(m: &PointedStructure) -> Result<PointedStructure, TransformError> {
    backward_sig(m, "the expansion step")?;
    if !classify(m).has(ClassKind::Connected) {
        return Err(TransformError::WrongClass { op: "the expansion step", required: "a connected" });
    }
    if !satisfies_reach_condition(m) {
        return Err(TransformError::ConditionViolated);
    }
    let r = reach(m);
    let na = m.signature().base_action_count();
    let mut edges = m.all_edges().to_vec();
    for a in 0..na {
        for &(u, v) in m.edges(a) {
            if !r[u] && r[v] {
                edges[a].remove(&(u, v));
                edges[na + a].insert((v, u));
            }
        }
    }
    Ok(m.with_relations(m.signature_arc().clone(), edges)?)
}

/// A PG-augmentation of a connected σ-structure, by iterating [`exp_step`]
/// until every state is reachable.
pub fn pg_augment(t: &PointedStructure) -> Result<PointedStructure, TransformError> {
    base_only(t, "PG-augmentation")?;
    if !classify(t).has(ClassKind::Connected) {
        return Err(TransformError::WrongClass { op: "PG-augmentation", required: "a connected" });
    }
    let mut cur = lift_to_backward(t)?;
    while reach(&cur).iter().any(|r| !r) {
        cur = exp_step(&cur)?;
    }
    Ok(cur)
}

/// Whether `aug` (over σ_B) is a PG-augmentation of `t` (over σ): same states,
/// labels and point, `R_i' = R_i \ X_i` and `B_i' = X_i⁻¹` for some
/// `X_i ⊆ R_i`, and `aug` point-generated.
pub fn is_pg_augmentation(t: &PointedStructure, aug: &PointedStructure) -> bool {
    if t.signature().expansion_mode().is_some()
        || aug.signature().expansion_mode() != Some(ExpansionMode::Backward)
        || aug.signature().base() != *t.signature()
        || aug.labels() != t.labels()
        || aug.distinguished() != t.distinguished()
    {
        return false;
    }
    let na = t.action_count();
    let relations_ok = (0..na).all(|a| {
        let kept = aug.edges(a);
        let flipped: BTreeSet<(usize, usize)> = aug.edges(na + a).iter().map(|&(u, v)| (v, u)).collect();
        kept.is_subset(t.edges(a))
            && kept.is_disjoint(&flipped)
            && kept.union(&flipped).copied().collect::<BTreeSet<_>>() == *t.edges(a)
    });
    relations_ok && classify(aug).has(ClassKind::PointGenerated)
}

/// A canonical R_G-connection of a σ-forest: one `R_G` edge from the point to
/// the root of every other component, components in order of their smallest
/// state.
pub fn rg_connect(f: &PointedStructure) -> Result<PointedStructure, TransformError> {
    base_only(f, "R_G-connection")?;
    if !classify(f).has(ClassKind::Forest) {
        return Err(TransformError::WrongClass { op: "R_G-connection", required: "a forest" });
    }
    let indeg = in_degrees(f);
    let mut links = BTreeSet::new();
    for block in connected_components(f) {
        if block.contains(&f.distinguished()) {
            continue;
        }
        let root = *block.iter().find(|&&s| indeg[s] == 0).expect("forest components have roots");
        links.insert((f.distinguished(), root));
    }
    let sig = Arc::new(f.signature().global().expect("base signature"));
    let mut edges = f.all_edges().to_vec();
    edges.push(links);
    Ok(f.with_relations(sig, edges)?)
}

/// `Kⁿ`: `n` states, complete relation for every action, every letter true
/// everywhere when `with_p`.
pub fn make_clique(n: usize, with_p: bool) -> PointedStructure {
    clique_over(Arc::new(Signature::standard()), n, with_p)
}

pub fn clique_over(sig: Arc<Signature>, n: usize, with_p: bool) -> PointedStructure {
    assert!(n >= 1, "cliques need at least one state");
    let label = if with_p { sig.full_label() } else { 0 };
    let all: BTreeSet<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
    let edges = vec![all; sig.actions().len()];
    PointedStructure::new(sig, vec![label; n], edges, 0).expect("clique is valid")
}

/// The hom-equivalent but not bisimilar pair: `M` is a root with an unlabeled
/// and a `p`-labeled successor, `N` a root with one `p`-labeled successor.
pub fn make_figure3_pair() -> (PointedStructure, PointedStructure) {
    let sig = Arc::new(Signature::standard());
    let m = PointedStructure::builder(sig.clone(), 3)
        .edge("R", 0, 1)
        .edge("R", 0, 2)
        .prop(2, "p")
        .build()
        .expect("valid");
    let n = PointedStructure::builder(sig, 2).edge("R", 0, 1).prop(1, "p").build().expect("valid");
    (m, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::tree_code;
    use crate::hom::isomorphic;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::standard())
    }

    fn chain(n: usize) -> PointedStructure {
        let mut b = PointedStructure::builder(sig(), n);
        for i in 1..n {
            b = b.edge("R", i - 1, i);
        }
        b.build().unwrap()
    }

    fn t_back() -> PointedStructure {
        PointedStructure::builder(sig(), 2).edge("R", 1, 0).build().unwrap()
    }

    #[test]
    fn depth_restriction() {
        assert_eq!(restrict_depth(&chain(3), 1).unwrap(), chain(2));
        assert_eq!(restrict_depth(&chain(3), 5).unwrap(), chain(3));
        let (m, _) = make_figure3_pair();
        let r = restrict_depth(&m, 0).unwrap();
        assert_eq!(r.state_count(), 1);
        assert_eq!(r.label(0), 0);
        let split = PointedStructure::builder(sig(), 2).build().unwrap();
        assert!(restrict_depth(&split, 1).is_err());
        assert_eq!(restrict_depth(&t_back(), 0).unwrap().state_count(), 1);
    }

    #[test]
    fn unraveling() {
        let loop_p = PointedStructure::builder(sig(), 1).edge("R", 0, 0).prop(0, "p").build().unwrap();
        let u = unravel(&loop_p, 2);
        assert_eq!(u.state_count(), 3);
        assert!(u.labels().iter().all(|&l| l == 1));
        assert!(classify(&u).has(ClassKind::Tree));
        let (m, _) = make_figure3_pair();
        let u1 = unravel(&m, 1);
        assert!(isomorphic(&u1, &m));
        assert_eq!(unravel(&m, 0).state_count(), 1);
        assert_eq!(unravel_size(&loop_p, 4), 5);
        let (_, walks) = unravel_walks(&loop_p, 1);
        assert_eq!(walks, vec![vec![0], vec![0, 0]]);
    }

    #[test]
    fn parallel_actions_unravel_to_two_children() {
        let two = Arc::new(Signature::new(["p"], ["R", "S"]).unwrap());
        let m = PointedStructure::builder(two, 2).edge("R", 0, 1).edge("S", 0, 1).build().unwrap();
        let u = unravel(&m, 1);
        assert_eq!(u.state_count(), 3);
        assert!(classify(&u).has(ClassKind::Tree));
    }

    #[test]
    fn generated_submodels() {
        let m = PointedStructure::builder(sig(), 3).edge("R", 0, 1).edge("R", 2, 0).build().unwrap();
        let g = gsub(&m, None);
        assert_eq!(g, chain(2));
        let (_, n) = make_figure3_pair();
        assert_eq!(gsub(&n, Some(0)).state_count(), 1);
        assert_eq!(gsub(&n, None), n);
    }

    #[test]
    fn expansions() {
        let b = backward_expansion(&chain(2)).unwrap();
        assert!(b.has_edge(0, 0, 1) && b.has_edge(1, 1, 0));
        assert_eq!(b.signature().actions(), &["R".to_string(), "B_R".to_string()]);
        assert!(backward_expansion(&b).is_err());
        let (m, _) = make_figure3_pair();
        let g = global_expansion(&m).unwrap();
        assert_eq!(g.edges(1).len(), 9);
        assert_eq!(reduct(&g), m);
    }

    #[test]
    fn down_and_flip() {
        let d = down_transform(&t_back()).unwrap();
        assert!(d.edges(0).is_empty());
        assert!(d.has_edge(1, 0, 1));
        assert!(classify(&d).has(ClassKind::Tree));
        assert_eq!(flip(&d).unwrap(), t_back());
        let v = PointedStructure::builder(sig(), 3).edge("R", 0, 1).edge("R", 2, 1).build().unwrap();
        let dv = down_transform(&v).unwrap();
        assert!(dv.has_edge(0, 0, 1) && dv.has_edge(1, 1, 2));
        assert_eq!(flip(&dv).unwrap(), v);
        assert!(down_transform(&make_clique(1, false)).is_err());
        let mixed = PointedStructure::builder(Arc::new(sig().backward().unwrap()), 3)
            .edge("B_R", 0, 1)
            .edge("R", 0, 2)
            .build()
            .unwrap();
        let f = flip(&mixed).unwrap();
        assert!(f.has_edge(0, 1, 0) && f.has_edge(0, 0, 2));
        assert_eq!(down_transform(&f).unwrap(), mixed);
    }

    #[test]
    fn pg_augmentation() {
        let aug = pg_augment(&t_back()).unwrap();
        assert!(aug.edges(0).is_empty() && aug.has_edge(1, 0, 1));
        assert!(is_pg_augmentation(&t_back(), &aug));
        let three = PointedStructure::builder(sig(), 3).edge("R", 1, 0).edge("R", 1, 2).build().unwrap();
        let step = exp_step(&lift_to_backward(&three).unwrap()).unwrap();
        assert!(step.has_edge(1, 0, 1) && step.has_edge(0, 1, 2) && !step.has_edge(0, 1, 0));
        assert!(reach(&step).iter().all(|&r| r));
        assert_eq!(pg_augment(&three).unwrap(), step);
        assert_eq!(reduct(&pg_augment(&chain(3)).unwrap()), chain(3));
        let bad = PointedStructure::builder(Arc::new(sig().backward().unwrap()), 2)
            .edge("B_R", 1, 0)
            .build()
            .unwrap();
        assert_eq!(exp_step(&bad), Err(TransformError::ConditionViolated));
    }

    #[test]
    fn rg_connection() {
        let two = PointedStructure::builder(sig(), 2).build().unwrap();
        let c = rg_connect(&two).unwrap();
        assert!(c.has_edge(1, 0, 1));
        assert!(classify(&c).has(ClassKind::Tree));
        assert_eq!(reduct(&c), two);
        let three = PointedStructure::builder(sig(), 3).build().unwrap();
        assert_eq!(rg_connect(&three).unwrap().edges(1).len(), 2);
        assert!(rg_connect(&chain(3)).unwrap().edges(1).is_empty());
        let back_forest = PointedStructure::builder(sig(), 3).edge("R", 2, 1).build().unwrap();
        let c = rg_connect(&back_forest).unwrap();
        assert!(c.has_edge(1, 0, 2));
        assert!(classify(&c).has(ClassKind::Tree));
    }

    #[test]
    fn generators() {
        let k1 = make_clique(1, true);
        assert_eq!((k1.state_count(), k1.edge_count(), k1.label(0)), (1, 1, 1));
        assert_eq!(make_clique(2, true).edge_count(), 4);
        let (m, n) = make_figure3_pair();
        assert_eq!((m.state_count(), n.state_count()), (3, 2));
        assert_eq!(tree_code(&n), "(00:(1))");
    }
}

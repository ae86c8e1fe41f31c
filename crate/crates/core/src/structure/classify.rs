use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use super::PointedStructure;

/// The structure classes used by the characterization theorems.
///
/// `Any` is the class of all finite pointed structures; it is never reported by
/// [`classify`] because every structure belongs to it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassKind {
    Tree,
    ConnectedAcyclic,
    Forest,
    PointGenerated,
    Connected,
    Any,
}

impl ClassKind {
    pub const TAGGED: [ClassKind; 5] = [
        ClassKind::Tree,
        ClassKind::ConnectedAcyclic,
        ClassKind::Forest,
        ClassKind::PointGenerated,
        ClassKind::Connected,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassKind::Tree => "tree",
            ClassKind::ConnectedAcyclic => "acyclic",
            ClassKind::Forest => "forest",
            ClassKind::PointGenerated => "pg",
            ClassKind::Connected => "connected",
            ClassKind::Any => "any",
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "tree" => ClassKind::Tree,
            "acyclic" | "connected-acyclic" => ClassKind::ConnectedAcyclic,
            "forest" => ClassKind::Forest,
            "pg" | "point-generated" => ClassKind::PointGenerated,
            "connected" => ClassKind::Connected,
            "any" | "all" => ClassKind::Any,
            other => return Err(format!("unknown class `{other}`")),
        })
    }
}

/// A class together with an optional depth bound, e.g. trees of depth at most `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClassTag {
    pub kind: ClassKind,
    pub depth: Option<usize>,
}

impl ClassTag {
    pub fn new(kind: ClassKind, depth: Option<usize>) -> Self {
        ClassTag { kind, depth }
    }

    pub fn unbounded(kind: ClassKind) -> Self {
        ClassTag { kind, depth: None }
    }

    pub fn contains(&self, m: &PointedStructure) -> bool {
        classify(m).satisfies(self)
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.depth {
            Some(k) => write!(f, "{}^{k}", self.kind),
            None => write!(f, "{}", self.kind),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub kinds: BTreeSet<ClassKind>,
    /// Largest directed distance from the distinguished state; `None` unless point-generated.
    pub directed_depth: Option<usize>,
    /// Largest σ-path distance from the distinguished state; `None` unless connected.
    pub undirected_depth: Option<usize>,
    /// Largest depth of a component tree; `None` unless a forest.
    pub forest_depth: Option<usize>,
}

impl Classification {
    pub fn has(&self, kind: ClassKind) -> bool {
        kind == ClassKind::Any || self.kinds.contains(&kind)
    }

    /// The depth notion that goes with `kind`.
    pub fn depth_for(&self, kind: ClassKind) -> Option<usize> {
        match kind {
            ClassKind::Tree | ClassKind::PointGenerated => self.directed_depth,
            ClassKind::ConnectedAcyclic | ClassKind::Connected => self.undirected_depth,
            ClassKind::Forest => self.forest_depth,
            ClassKind::Any => Some(0),
        }
    }

    pub fn satisfies(&self, tag: &ClassTag) -> bool {
        if !self.has(tag.kind) {
            return false;
        }
        match (tag.depth, tag.kind) {
            (_, ClassKind::Any) | (None, _) => true,
            (Some(k), kind) => self.depth_for(kind).is_some_and(|d| d <= k),
        }
    }
}

/// Blocks of states joined by σ-paths, each sorted, ordered by smallest member.
pub fn connected_components(m: &PointedStructure) -> Vec<Vec<usize>> {
    let n = m.state_count();
    let mut comp = vec![usize::MAX; n];
    let mut blocks = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = blocks.len();
        let mut block = vec![start];
        comp[start] = id;
        let mut i = 0;
        while i < block.len() {
            let s = block[i];
            i += 1;
            for a in 0..m.action_count() {
                for &t in m.successors(a, s).iter().chain(m.predecessors(a, s)) {
                    if comp[t] == usize::MAX {
                        comp[t] = id;
                        block.push(t);
                    }
                }
            }
        }
        block.sort_unstable();
        blocks.push(block);
    }
    blocks
}

/// True iff no simple σ-path of length ≥ 1 returns to its start.
///
/// Every binary fact is an undirected edge; a self-loop or two facts over the
/// same pair of states already form a cycle.
pub fn is_acyclic(m: &PointedStructure) -> bool {
    let n = m.state_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..m.action_count() {
        for &(u, v) in m.edges(a) {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru == rv {
                return false;
            }
            parent[ru] = rv;
        }
    }
    true
}

/// Number of incoming binary facts per state.
pub fn in_degrees(m: &PointedStructure) -> Vec<usize> {
    let mut deg = vec![0; m.state_count()];
    for a in 0..m.action_count() {
        for &(_, v) in m.edges(a) {
            deg[v] += 1;
        }
    }
    deg
}

fn bfs(m: &PointedStructure, from: usize, undirected: bool) -> Vec<Option<usize>> {
    let mut dist = vec![None; m.state_count()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        let d = dist[s].unwrap_or(0);
        for a in 0..m.action_count() {
            let back: &[usize] = if undirected { m.predecessors(a, s) } else { &[] };
            for &t in m.successors(a, s).iter().chain(back) {
                if dist[t].is_none() {
                    dist[t] = Some(d + 1);
                    queue.push_back(t);
                }
            }
        }
    }
    dist
}

/// Directed distance of every state from the distinguished one, if all are reachable.
pub fn directed_depths(m: &PointedStructure) -> Option<Vec<usize>> {
    bfs(m, m.distinguished(), false).into_iter().collect()
}

/// σ-path distance of every state from the distinguished one, if connected.
pub fn undirected_depths(m: &PointedStructure) -> Option<Vec<usize>> {
    bfs(m, m.distinguished(), true).into_iter().collect()
}

pub fn classify(m: &PointedStructure) -> Classification {
    let mut kinds = BTreeSet::new();
    let directed = directed_depths(m);
    let undirected = undirected_depths(m);
    let acyclic = is_acyclic(m);
    let indeg = in_degrees(m);
    let root = m.distinguished();

    if undirected.is_some() {
        kinds.insert(ClassKind::Connected);
        if acyclic {
            kinds.insert(ClassKind::ConnectedAcyclic);
        }
    }
    if directed.is_some() {
        kinds.insert(ClassKind::PointGenerated);
    }
    let out_tree_degrees = |s: usize| indeg[s] <= 1;
    if directed.is_some() && indeg[root] == 0 && (0..m.state_count()).all(|s| s == root || indeg[s] == 1)
    {
        kinds.insert(ClassKind::Tree);
    }

    let mut forest_depth = None;
    if acyclic && indeg[root] == 0 && m.states().all(out_tree_degrees) {
        // An acyclic component with in-degrees ≤ 1 has exactly one source and is an out-tree.
        let mut depth = 0;
        for block in connected_components(m) {
            let src = block.iter().copied().find(|&s| indeg[s] == 0).unwrap_or(block[0]);
            let dist = bfs(m, src, false);
            depth = depth.max(block.iter().filter_map(|&s| dist[s]).max().unwrap_or(0));
        }
        kinds.insert(ClassKind::Forest);
        forest_depth = Some(depth);
    }

    Classification {
        kinds,
        directed_depth: directed.map(|d| d.into_iter().max().unwrap_or(0)),
        undirected_depth: undirected.map(|d| d.into_iter().max().unwrap_or(0)),
        forest_depth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn sig() -> Signature {
        Signature::standard()
    }

    #[test]
    fn single_point_is_in_every_class() {
        let m = PointedStructure::point(sig(), 0).unwrap();
        let c = classify(&m);
        assert_eq!(c.kinds.len(), 5);
        assert_eq!(c.directed_depth, Some(0));
        assert_eq!(c.undirected_depth, Some(0));
    }

    #[test]
    fn backward_edge_is_connected_acyclic_only() {
        let m = PointedStructure::builder(sig(), 2).edge("R", 1, 0).build().unwrap();
        let c = classify(&m);
        let expected: BTreeSet<_> = [ClassKind::ConnectedAcyclic, ClassKind::Connected].into();
        assert_eq!(c.kinds, expected);
        assert_eq!(c.undirected_depth, Some(1));
        assert_eq!(c.directed_depth, None);
    }

    #[test]
    fn self_loop_is_cyclic() {
        let m = PointedStructure::builder(sig(), 1).edge("R", 0, 0).build().unwrap();
        let c = classify(&m);
        let expected: BTreeSet<_> = [ClassKind::PointGenerated, ClassKind::Connected].into();
        assert_eq!(c.kinds, expected);
    }

    #[test]
    fn parallel_facts_break_trees() {
        let two = Signature::new(["p"], ["R", "S"]).unwrap();
        let m = PointedStructure::builder(two, 2)
            .edge("R", 0, 1)
            .edge("S", 0, 1)
            .build()
            .unwrap();
        let c = classify(&m);
        assert!(!c.has(ClassKind::Tree));
        assert!(!c.has(ClassKind::ConnectedAcyclic));
        assert!(c.has(ClassKind::PointGenerated));
    }

    #[test]
    fn forest_components() {
        let m = PointedStructure::builder(sig(), 5)
            .edge("R", 0, 1)
            .edge("R", 2, 3)
            .edge("R", 2, 4)
            .build()
            .unwrap();
        let c = classify(&m);
        assert!(c.has(ClassKind::Forest));
        assert!(!c.has(ClassKind::Connected));
        assert_eq!(c.forest_depth, Some(1));
        assert_eq!(connected_components(&m), vec![vec![0, 1], vec![2, 3, 4]]);
        let edgeless = PointedStructure::builder(sig(), 3).build().unwrap();
        assert_eq!(connected_components(&edgeless).len(), 3);
        // pointed at a non-root the structure is not a forest
        assert!(!classify(&m.with_distinguished(1).unwrap()).has(ClassKind::Forest));
    }

    #[test]
    fn depth_bounds() {
        let chain = PointedStructure::builder(sig(), 3)
            .edge("R", 0, 1)
            .edge("R", 1, 2)
            .build()
            .unwrap();
        assert!(ClassTag::new(ClassKind::Tree, Some(2)).contains(&chain));
        assert!(!ClassTag::new(ClassKind::Tree, Some(1)).contains(&chain));
        assert!(ClassTag::new(ClassKind::Any, Some(0)).contains(&chain));
    }
}

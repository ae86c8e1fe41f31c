//! Rooted labeled trees as plain recursive values.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::structure::{classify, ClassKind, PointedStructure, Signature};

/// A rooted tree: root label bitmask and action-labeled children.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RTree {
    pub label: u64,
    pub children: Vec<(usize, RTree)>,
}

impl RTree {
    pub fn leaf(label: u64) -> Self {
        RTree { label, children: Vec::new() }
    }

    /// A fresh unlabeled root with a single `action`-child.
    pub fn lift(action: usize, child: RTree) -> Self {
        RTree { label: 0, children: vec![(action, child)] }
    }

    /// Root merge: labels united, children concatenated. Counts multiply under
    /// this operation.
    pub fn merge(&self, other: &RTree) -> Self {
        let mut children = self.children.clone();
        children.extend(other.children.iter().cloned());
        RTree { label: self.label | other.label, children }.normalized()
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|(_, c)| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        self.children.iter().map(|(_, c)| c.depth() + 1).max().unwrap_or(0)
    }

    /// Children sorted recursively, so equal trees up to isomorphism are equal values.
    pub fn normalized(mut self) -> Self {
        for (_, c) in self.children.iter_mut() {
            *c = std::mem::replace(c, RTree::leaf(0)).normalized();
        }
        self.children.sort();
        self
    }

    /// Same code as [`crate::canon::tree_code`] on the built structure.
    pub fn code(&self) -> String {
        let mut kids: Vec<String> = self.children.iter().map(|(a, c)| format!("{a}:{}", c.code())).collect();
        kids.sort_unstable();
        format!("({:x}{})", self.label, kids.concat())
    }

    /// States numbered in BFS order from the root (state 0, distinguished).
    pub fn to_structure(&self, sig: &Arc<Signature>) -> PointedStructure {
        let mut labels = Vec::new();
        let mut edges = vec![BTreeSet::new(); sig.actions().len()];
        let mut queue = std::collections::VecDeque::from([(self, usize::MAX, 0usize)]);
        while let Some((t, parent, action)) = queue.pop_front() {
            let id = labels.len();
            labels.push(t.label);
            if parent != usize::MAX {
                edges[action].insert((parent, id));
            }
            for (a, c) in &t.children {
                queue.push_back((c, id, *a));
            }
        }
        PointedStructure::new(sig.clone(), labels, edges, 0).expect("tree shapes are valid structures")
    }

    /// The tree hanging below `node` along successors. Only meaningful if that
    /// part of `m` is a tree; cycles are not detected here.
    pub fn below(m: &PointedStructure, node: usize) -> Self {
        let mut children = Vec::new();
        for a in 0..m.action_count() {
            for &c in m.successors(a, node) {
                children.push((a, RTree::below(m, c)));
            }
        }
        RTree { label: m.label(node), children }.normalized()
    }

    /// The tree of a tree-tagged structure.
    pub fn from_structure(m: &PointedStructure) -> Option<Self> {
        classify(m).has(ClassKind::Tree).then(|| RTree::below(m, m.distinguished()))
    }
}

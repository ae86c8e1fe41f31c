//! Modal signatures and finite pointed structures (labeled transition systems).
//!
//! A [`PointedStructure`] is a finite set of states `0..n`, a labeling of each
//! state with a subset of the signature's proposition letters, one binary
//! relation per action, and one distinguished state. Structures are immutable
//! once built; the successor/predecessor indexes are computed at construction.

mod classify;
mod io;

pub use classify::{
    classify, connected_components, directed_depths, in_degrees, is_acyclic, undirected_depths,
    ClassKind, ClassTag, Classification,
};
pub use io::{from_json, from_json_value, to_dot, to_json, to_json_value};

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Maximum number of proposition letters; labels are stored as bitmasks.
pub const MAX_PROPS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("signature names must be nonempty")]
    EmptyName,
    #[error("duplicate name `{0}` in signature")]
    DuplicateName(String),
    #[error("too many proposition letters ({0}); at most {MAX_PROPS} are supported")]
    TooManyProps(usize),
    #[error("a structure needs at least one state")]
    NoStates,
    #[error("distinguished state {state} out of range for {states} states")]
    DistinguishedOutOfRange { state: usize, states: usize },
    #[error("state {state} out of range for {states} states")]
    StateOutOfRange { state: usize, states: usize },
    #[error("unknown proposition letter `{0}`")]
    UnknownProp(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("label mask {0:#x} uses proposition letters outside the signature")]
    LabelOutOfSignature(u64),
    #[error("expected {expected} action relations, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("invalid structure file: {0}")]
    Format(String),
    #[error("invalid JSON: {0}")]
    Json(String),
}

impl From<serde_json::Error> for StructureError {
    fn from(e: serde_json::Error) -> Self {
        StructureError::Json(e.to_string())
    }
}

/// How an expanded signature was derived from its base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExpansionMode {
    /// One inverse action `B_i` per base action `R_i`.
    Backward,
    /// A single fresh action interpreted as the full relation.
    Global,
}

impl ExpansionMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ExpansionMode::Backward => "backward",
            ExpansionMode::Global => "global",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Expansion {
    mode: ExpansionMode,
    base_actions: usize,
}

/// A modal signature: proposition letters plus actions.
///
/// Names are nonempty and unique across both sets. An expanded signature
/// (backward or global) keeps the base actions as a prefix of `actions`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    props: Vec<String>,
    actions: Vec<String>,
    expansion: Option<Expansion>,
}

/// View of an expanded signature: its base, the mode, and the derived action names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedSignature {
    pub base: Signature,
    pub mode: ExpansionMode,
    pub derived: Vec<String>,
}

impl Signature {
    pub fn new<P, A>(props: P, actions: A) -> Result<Self, StructureError>
    where
        P: IntoIterator,
        P::Item: Into<String>,
        A: IntoIterator,
        A::Item: Into<String>,
    {
        let sig = Signature {
            props: props.into_iter().map(Into::into).collect(),
            actions: actions.into_iter().map(Into::into).collect(),
            expansion: None,
        };
        sig.validate()?;
        Ok(sig)
    }

    /// The one-letter, one-action signature `{p}, {R}` used throughout the test corpora.
    pub fn standard() -> Self {
        Signature::new(["p"], ["R"]).expect("static signature is valid")
    }

    fn validate(&self) -> Result<(), StructureError> {
        if self.props.len() > MAX_PROPS {
            return Err(StructureError::TooManyProps(self.props.len()));
        }
        let mut seen = BTreeSet::new();
        for name in self.props.iter().chain(&self.actions) {
            if name.is_empty() {
                return Err(StructureError::EmptyName);
            }
            if !seen.insert(name.as_str()) {
                return Err(StructureError::DuplicateName(name.clone()));
            }
        }
        Ok(())
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|p| p == name)
    }

    pub fn action_index(&self, name: &str) -> Option<usize> {
        self.actions.iter().position(|a| a == name)
    }

    /// Bitmask with one bit per proposition letter.
    pub fn full_label(&self) -> u64 {
        if self.props.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.props.len()) - 1
        }
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.prop_index(name).is_some() || self.action_index(name).is_some()
    }

    pub fn expansion_mode(&self) -> Option<ExpansionMode> {
        self.expansion.map(|e| e.mode)
    }

    /// Number of actions belonging to the base signature.
    pub fn base_action_count(&self) -> usize {
        self.expansion.map_or(self.actions.len(), |e| e.base_actions)
    }

    /// The base signature of an expansion, or a copy of `self`.
    pub fn base(&self) -> Signature {
        Signature {
            props: self.props.clone(),
            actions: self.actions[..self.base_action_count()].to_vec(),
            expansion: None,
        }
    }

    pub fn expanded(&self) -> Option<ExpandedSignature> {
        let e = self.expansion?;
        Some(ExpandedSignature {
            base: self.base(),
            mode: e.mode,
            derived: self.actions[e.base_actions..].to_vec(),
        })
    }

    fn fresh_name(&self, candidate: String, taken: &BTreeSet<String>) -> String {
        let mut name = candidate;
        while self.contains_name(&name) || taken.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// The backward expansion `σ_B`: one fresh inverse action per base action.
    ///
    /// Fails if `self` is already an expansion.
    pub fn backward(&self) -> Option<Signature> {
        if self.expansion.is_some() {
            return None;
        }
        let mut taken = BTreeSet::new();
        let mut actions = self.actions.clone();
        for a in &self.actions {
            let name = self.fresh_name(format!("B_{a}"), &taken);
            taken.insert(name.clone());
            actions.push(name);
        }
        Some(Signature {
            props: self.props.clone(),
            actions,
            expansion: Some(Expansion {
                mode: ExpansionMode::Backward,
                base_actions: self.actions.len(),
            }),
        })
    }

    /// The global expansion `σ_G` with a single fresh action.
    pub fn global(&self) -> Option<Signature> {
        if self.expansion.is_some() {
            return None;
        }
        let mut actions = self.actions.clone();
        actions.push(self.fresh_name("R_G".to_string(), &BTreeSet::new()));
        Some(Signature {
            props: self.props.clone(),
            actions,
            expansion: Some(Expansion {
                mode: ExpansionMode::Global,
                base_actions: self.actions.len(),
            }),
        })
    }

    /// For a backward expansion, the index of `B_i` given the base action `i`.
    pub fn inverse_action(&self, base_action: usize) -> Option<usize> {
        match self.expansion {
            Some(Expansion {
                mode: ExpansionMode::Backward,
                base_actions,
            }) if base_action < base_actions => Some(base_actions + base_action),
            _ => None,
        }
    }

    /// For a global expansion, the index of the full-relation action.
    pub fn global_action(&self) -> Option<usize> {
        match self.expansion {
            Some(Expansion {
                mode: ExpansionMode::Global,
                base_actions,
            }) => Some(base_actions),
            _ => None,
        }
    }

    pub(crate) fn with_expansion(
        props: Vec<String>,
        actions: Vec<String>,
        mode: ExpansionMode,
        base_actions: usize,
    ) -> Result<Signature, StructureError> {
        let expected = match mode {
            ExpansionMode::Backward => 2 * base_actions,
            ExpansionMode::Global => base_actions + 1,
        };
        if actions.len() != expected {
            return Err(StructureError::Format(format!(
                "{} expansion of {base_actions} actions must have {expected} actions",
                mode.as_str()
            )));
        }
        let sig = Signature {
            props,
            actions,
            expansion: Some(Expansion { mode, base_actions }),
        };
        sig.validate()?;
        Ok(sig)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "props={{{}}} actions={{{}}}", self.props.join(","), self.actions.join(","))
    }
}

/// A single fact of a structure: a proposition holding at a state or an action pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fact {
    Prop { prop: usize, state: usize },
    Edge { action: usize, from: usize, to: usize },
}

impl Fact {
    /// `el(f)`: the states occurring in the fact.
    pub fn elements(&self) -> Vec<usize> {
        match *self {
            Fact::Prop { state, .. } => vec![state],
            Fact::Edge { from, to, .. } if from == to => vec![from],
            Fact::Edge { from, to, .. } => vec![from, to],
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Fact::Prop { .. } => 1,
            Fact::Edge { .. } => 2,
        }
    }
}

/// A finite pointed structure over a modal signature.
#[derive(Clone)]
pub struct PointedStructure {
    sig: Arc<Signature>,
    labels: Vec<u64>,
    edges: Vec<BTreeSet<(usize, usize)>>,
    distinguished: usize,
    succ: Vec<Vec<Vec<usize>>>,
    pred: Vec<Vec<Vec<usize>>>,
}

impl PointedStructure {
    /// Builds a structure from label bitmasks and one edge set per action.
    pub fn new(
        sig: impl Into<Arc<Signature>>,
        labels: Vec<u64>,
        edges: Vec<BTreeSet<(usize, usize)>>,
        distinguished: usize,
    ) -> Result<Self, StructureError> {
        let sig = sig.into();
        let n = labels.len();
        if n == 0 {
            return Err(StructureError::NoStates);
        }
        if distinguished >= n {
            return Err(StructureError::DistinguishedOutOfRange {
                state: distinguished,
                states: n,
            });
        }
        if edges.len() != sig.actions().len() {
            return Err(StructureError::ActionCount {
                expected: sig.actions().len(),
                got: edges.len(),
            });
        }
        let full = sig.full_label();
        for &l in &labels {
            if l & !full != 0 {
                return Err(StructureError::LabelOutOfSignature(l));
            }
        }
        let mut succ = vec![vec![Vec::new(); n]; edges.len()];
        let mut pred = vec![vec![Vec::new(); n]; edges.len()];
        for (a, rel) in edges.iter().enumerate() {
            for &(u, v) in rel {
                for s in [u, v] {
                    if s >= n {
                        return Err(StructureError::StateOutOfRange { state: s, states: n });
                    }
                }
                succ[a][u].push(v);
                pred[a][v].push(u);
            }
        }
        Ok(PointedStructure {
            sig,
            labels,
            edges,
            distinguished,
            succ,
            pred,
        })
    }

    pub fn builder(sig: impl Into<Arc<Signature>>, states: usize) -> StructureBuilder {
        StructureBuilder::new(sig, states)
    }

    /// A single state with the given label mask and no edges.
    pub fn point(sig: impl Into<Arc<Signature>>, label: u64) -> Result<Self, StructureError> {
        let sig = sig.into();
        let edges = vec![BTreeSet::new(); sig.actions().len()];
        PointedStructure::new(sig, vec![label], edges, 0)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn state_count(&self) -> usize {
        self.labels.len()
    }

    pub fn states(&self) -> std::ops::Range<usize> {
        0..self.labels.len()
    }

    pub fn distinguished(&self) -> usize {
        self.distinguished
    }

    pub fn action_count(&self) -> usize {
        self.edges.len()
    }

    /// `λ(m)` as a bitmask over the signature's proposition letters.
    pub fn label(&self, state: usize) -> u64 {
        self.labels[state]
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label_names(&self, state: usize) -> Vec<&str> {
        let l = self.labels[state];
        self.sig
            .props()
            .iter()
            .enumerate()
            .filter(|(i, _)| l >> i & 1 == 1)
            .map(|(_, p)| p.as_str())
            .collect()
    }

    pub fn edges(&self, action: usize) -> &BTreeSet<(usize, usize)> {
        &self.edges[action]
    }

    pub fn all_edges(&self) -> &[BTreeSet<(usize, usize)>] {
        &self.edges
    }

    pub fn has_edge(&self, action: usize, from: usize, to: usize) -> bool {
        self.edges[action].contains(&(from, to))
    }

    pub fn successors(&self, action: usize, state: usize) -> &[usize] {
        &self.succ[action][state]
    }

    pub fn predecessors(&self, action: usize, state: usize) -> &[usize] {
        &self.pred[action][state]
    }

    /// `Succ_σ[m]`: successors along any action, deduplicated and sorted.
    pub fn any_successors(&self, state: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.succ.iter().flat_map(|s| s[state].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn any_predecessors(&self, state: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.pred.iter().flat_map(|s| s[state].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of binary facts.
    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(BTreeSet::len).sum()
    }

    pub fn facts(&self) -> Vec<Fact> {
        let mut out = Vec::new();
        for (state, &l) in self.labels.iter().enumerate() {
            for prop in 0..self.sig.props().len() {
                if l >> prop & 1 == 1 {
                    out.push(Fact::Prop { prop, state });
                }
            }
        }
        for (action, rel) in self.edges.iter().enumerate() {
            out.extend(rel.iter().map(|&(from, to)| Fact::Edge { action, from, to }));
        }
        out
    }

    pub fn same_signature(&self, other: &PointedStructure) -> bool {
        Arc::ptr_eq(&self.sig, &other.sig) || *self.sig == *other.sig
    }

    pub fn with_distinguished(&self, state: usize) -> Result<Self, StructureError> {
        if state >= self.state_count() {
            return Err(StructureError::DistinguishedOutOfRange {
                state,
                states: self.state_count(),
            });
        }
        let mut out = self.clone();
        out.distinguished = state;
        Ok(out)
    }

    /// Induced substructure on `keep`, renumbered in the given order.
    ///
    /// The distinguished state must be among `keep`.
    pub fn induced(&self, keep: &[usize]) -> Result<Self, StructureError> {
        let mut index = vec![usize::MAX; self.state_count()];
        for (new, &old) in keep.iter().enumerate() {
            if old >= self.state_count() {
                return Err(StructureError::StateOutOfRange {
                    state: old,
                    states: self.state_count(),
                });
            }
            index[old] = new;
        }
        let d = index[self.distinguished];
        if d == usize::MAX {
            return Err(StructureError::DistinguishedOutOfRange {
                state: self.distinguished,
                states: keep.len(),
            });
        }
        let labels = keep.iter().map(|&s| self.labels[s]).collect();
        let edges = self
            .edges
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
                    .map(|&(u, v)| (index[u], index[v]))
                    .collect()
            })
            .collect();
        PointedStructure::new(self.sig.clone(), labels, edges, d)
    }

    /// Renames states: state `s` becomes `perm[s]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, StructureError> {
        let n = self.state_count();
        let mut labels = vec![0; n];
        for s in 0..n {
            labels[perm[s]] = self.labels[s];
        }
        let edges = self
            .edges
            .iter()
            .map(|rel| rel.iter().map(|&(u, v)| (perm[u], perm[v])).collect())
            .collect();
        PointedStructure::new(self.sig.clone(), labels, edges, perm[self.distinguished])
    }

    /// Same states and labels over another signature with the given relations.
    pub(crate) fn with_relations(
        &self,
        sig: Arc<Signature>,
        edges: Vec<BTreeSet<(usize, usize)>>,
    ) -> Result<Self, StructureError> {
        PointedStructure::new(sig, self.labels.clone(), edges, self.distinguished)
    }

    /// Disjoint union `self ⊎ other`, pointed at `self`'s distinguished state.
    /// States of `other` are shifted by `self.state_count()`.
    pub fn disjoint_union(&self, other: &PointedStructure) -> Result<Self, StructureError> {
        if !self.same_signature(other) {
            return Err(StructureError::SignatureMismatch);
        }
        let off = self.state_count();
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| {
                a.iter()
                    .copied()
                    .chain(b.iter().map(|&(u, v)| (u + off, v + off)))
                    .collect()
            })
            .collect();
        PointedStructure::new(self.sig.clone(), labels, edges, self.distinguished)
    }
}

impl PartialEq for PointedStructure {
    fn eq(&self, other: &Self) -> bool {
        self.distinguished == other.distinguished
            && self.labels == other.labels
            && self.edges == other.edges
            && self.same_signature(other)
    }
}

impl Eq for PointedStructure {}

impl fmt::Debug for PointedStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Structure(n={}, point={}", self.state_count(), self.distinguished)?;
        for s in self.states() {
            if self.labels[s] != 0 {
                write!(f, ", {s}:{{{}}}", self.label_names(s).join(","))?;
            }
        }
        for (a, rel) in self.edges.iter().enumerate() {
            for (u, v) in rel {
                write!(f, ", {}({u},{v})", self.sig.actions()[a])?;
            }
        }
        write!(f, ")")
    }
}

/// Incremental construction by name; errors are reported by [`StructureBuilder::build`].
pub struct StructureBuilder {
    sig: Arc<Signature>,
    labels: Vec<u64>,
    edges: Vec<BTreeSet<(usize, usize)>>,
    distinguished: usize,
    error: Option<StructureError>,
}

impl StructureBuilder {
    pub fn new(sig: impl Into<Arc<Signature>>, states: usize) -> Self {
        let sig = sig.into();
        let edges = vec![BTreeSet::new(); sig.actions().len()];
        StructureBuilder {
            sig,
            labels: vec![0; states],
            edges,
            distinguished: 0,
            error: None,
        }
    }

    fn fail(&mut self, e: StructureError) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    fn check_state(&mut self, s: usize) -> bool {
        if s >= self.labels.len() {
            let states = self.labels.len();
            self.fail(StructureError::StateOutOfRange { state: s, states });
            false
        } else {
            true
        }
    }

    pub fn prop(mut self, state: usize, name: &str) -> Self {
        match self.sig.prop_index(name) {
            Some(p) if self.check_state(state) => self.labels[state] |= 1 << p,
            Some(_) => {}
            None => self.fail(StructureError::UnknownProp(name.to_string())),
        }
        self
    }

    pub fn edge(mut self, action: &str, from: usize, to: usize) -> Self {
        match self.sig.action_index(action) {
            Some(a) => {
                if self.check_state(from) && self.check_state(to) {
                    self.edges[a].insert((from, to));
                }
            }
            None => self.fail(StructureError::UnknownAction(action.to_string())),
        }
        self
    }

    pub fn point(mut self, state: usize) -> Self {
        self.distinguished = state;
        self
    }

    pub fn build(self) -> Result<PointedStructure, StructureError> {
        if let Some(e) = self.error {
            return Err(e);
        }
        PointedStructure::new(self.sig, self.labels, self.edges, self.distinguished)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signature_rejects_duplicates_and_empty_names() {
        assert!(matches!(Signature::new(["p"], ["p"]), Err(StructureError::DuplicateName(_))));
        assert!(matches!(Signature::new([""], ["R"]), Err(StructureError::EmptyName)));
        assert!(Signature::new(Vec::<String>::new(), Vec::<String>::new()).is_ok());
    }

    #[test]
    fn expansions_use_fresh_names() {
        let sig = Signature::new(["p", "B_R"], ["R"]).unwrap();
        let b = sig.backward().unwrap();
        assert_eq!(b.actions(), &["R".to_string(), "B_R'".to_string()]);
        assert_eq!(b.inverse_action(0), Some(1));
        assert_eq!(b.base(), sig);
        assert!(b.backward().is_none());
        let g = Signature::standard().global().unwrap();
        assert_eq!(g.actions(), &["R".to_string(), "R_G".to_string()]);
        assert_eq!(g.global_action(), Some(1));
        let view = g.expanded().unwrap();
        assert_eq!(view.mode, ExpansionMode::Global);
        assert_eq!(view.derived, vec!["R_G".to_string()]);
    }

    #[test]
    fn builder_validates_names_and_ranges() {
        let sig = Signature::standard();
        assert!(matches!(
            PointedStructure::builder(sig.clone(), 2).edge("S", 0, 1).build(),
            Err(StructureError::UnknownAction(_))
        ));
        assert!(matches!(
            PointedStructure::builder(sig.clone(), 2).edge("R", 0, 2).build(),
            Err(StructureError::StateOutOfRange { .. })
        ));
        assert!(matches!(
            PointedStructure::builder(sig.clone(), 2).point(5).build(),
            Err(StructureError::DistinguishedOutOfRange { .. })
        ));
        assert!(matches!(
            PointedStructure::builder(sig, 0).build(),
            Err(StructureError::NoStates)
        ));
    }

    #[test]
    fn induced_and_union() {
        let sig = Signature::standard();
        let m = PointedStructure::builder(sig, 3)
            .edge("R", 0, 1)
            .edge("R", 1, 2)
            .prop(2, "p")
            .build()
            .unwrap();
        let sub = m.induced(&[0, 1]).unwrap();
        assert_eq!(sub.state_count(), 2);
        assert_eq!(sub.edge_count(), 1);
        let u = m.disjoint_union(&sub).unwrap();
        assert_eq!(u.state_count(), 5);
        assert!(u.has_edge(0, 3, 4));
        assert_eq!(m.facts().len(), 3);
        assert_eq!(m.any_successors(0), vec![1]);
    }
}

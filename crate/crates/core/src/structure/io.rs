//! JSON and DOT serialization of pointed structures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{ExpansionMode, PointedStructure, Signature, StructureError};

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct EdgeDoc {
    action: String,
    from: usize,
    to: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct DerivedDoc {
    mode: String,
    base_actions: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
struct StructureDoc {
    props: Vec<String>,
    actions: Vec<String>,
    states: usize,
    distinguished: usize,
    #[serde(default)]
    labels: BTreeMap<usize, Vec<String>>,
    #[serde(default)]
    edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    derived_from: Option<DerivedDoc>,
}

pub fn to_json_value(m: &PointedStructure) -> Value {
    let sig = m.signature();
    let labels = m
        .states()
        .filter(|&s| m.label(s) != 0)
        .map(|s| (s, m.label_names(s).into_iter().map(String::from).collect()))
        .collect();
    let edges = (0..m.action_count())
        .flat_map(|a| {
            m.edges(a).iter().map(move |&(from, to)| EdgeDoc {
                action: sig.actions()[a].clone(),
                from,
                to,
            })
        })
        .collect();
    let derived_from = sig.expanded().map(|e| DerivedDoc {
        mode: e.mode.as_str().to_string(),
        base_actions: e.base.actions().to_vec(),
    });
    let doc = StructureDoc {
        props: sig.props().to_vec(),
        actions: sig.actions().to_vec(),
        states: m.state_count(),
        distinguished: m.distinguished(),
        labels,
        edges,
        derived_from,
    };
    serde_json::to_value(doc).expect("structure documents always serialize")
}

/// Pretty-printed JSON document.
pub fn to_json(m: &PointedStructure) -> String {
    serde_json::to_string_pretty(&to_json_value(m)).expect("values always serialize")
}

pub fn from_json(text: &str) -> Result<PointedStructure, StructureError> {
    from_json_value(serde_json::from_str(text)?)
}

pub fn from_json_value(value: Value) -> Result<PointedStructure, StructureError> {
    let doc: StructureDoc = serde_json::from_value(value)?;
    let sig = match &doc.derived_from {
        None => Signature::new(doc.props.clone(), doc.actions.clone())?,
        Some(d) => {
            let mode = match d.mode.as_str() {
                "backward" => ExpansionMode::Backward,
                "global" => ExpansionMode::Global,
                other => {
                    return Err(StructureError::Format(format!("unknown expansion mode `{other}`")))
                }
            };
            if !doc.actions.starts_with(&d.base_actions) {
                return Err(StructureError::Format(
                    "baseActions must be a prefix of actions".to_string(),
                ));
            }
            Signature::with_expansion(doc.props.clone(), doc.actions.clone(), mode, d.base_actions.len())?
        }
    };
    let sig = Arc::new(sig);
    let mut labels = vec![0u64; doc.states];
    for (state, names) in &doc.labels {
        if *state >= doc.states {
            return Err(StructureError::StateOutOfRange {
                state: *state,
                states: doc.states,
            });
        }
        for name in names {
            let p = sig
                .prop_index(name)
                .ok_or_else(|| StructureError::UnknownProp(name.clone()))?;
            labels[*state] |= 1 << p;
        }
    }
    let mut edges = vec![BTreeSet::new(); sig.actions().len()];
    for e in &doc.edges {
        let a = sig
            .action_index(&e.action)
            .ok_or_else(|| StructureError::UnknownAction(e.action.clone()))?;
        edges[a].insert((e.from, e.to));
    }
    PointedStructure::new(sig, labels, edges, doc.distinguished)
}

/// Graphviz rendering; the distinguished state is double-circled.
pub fn to_dot(m: &PointedStructure) -> String {
    let mut out = String::from("digraph lts {\n");
    for s in m.states() {
        let shape = if s == m.distinguished() { "doublecircle" } else { "circle" };
        let _ = writeln!(
            out,
            "  s{s} [shape={shape}, label=\"{s}:{{{}}}\"];",
            m.label_names(s).join(",")
        );
    }
    for a in 0..m.action_count() {
        let name = &m.signature().actions()[a];
        for (u, v) in m.edges(a) {
            let _ = writeln!(out, "  s{u} -> s{v} [label=\"{name}\"];");
        }
    }
    out.push_str("}\n");
    out
}

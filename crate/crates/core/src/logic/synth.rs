//! Formulas describing trees and generated submodels.

use std::collections::BTreeMap;

use thiserror::Error;

use super::check::{standard_translation, CheckError};
use super::fo::FoFormula;
use super::formula::Formula;
use crate::hom::{ConjunctiveQuery, CqError};
use crate::structure::{ClassKind, ClassTag, PointedStructure, Signature};
use crate::tree::RTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("input is not a tree")]
    NotTree,
    #[error("tree of depth {depth} exceeds the modal depth {k}")]
    TooDeep { depth: usize, k: usize },
    #[error("input is not point-generated")]
    NotPointGenerated,
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Query(#[from] CqError),
}

fn as_tree(t: &PointedStructure) -> Result<RTree, SynthError> {
    RTree::from_structure(t).ok_or(SynthError::NotTree)
}

fn positive_mark(sig: &Signature, label: u64) -> Vec<Formula> {
    sig.props()
        .iter()
        .enumerate()
        .filter(|(i, _)| label >> i & 1 == 1)
        .map(|(_, p)| Formula::Prop(p.clone()))
        .collect()
}

fn full_mark(sig: &Signature, label: u64) -> Vec<Formula> {
    sig.props()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let p = Formula::Prop(p.clone());
            if label >> i & 1 == 1 {
                p
            } else {
                Formula::not(p)
            }
        })
        .collect()
}

/// Positive existential formula whose query has `t` as canonical instance.
pub fn tree_to_pml(t: &PointedStructure) -> Result<Formula, SynthError> {
    fn go(sig: &Signature, t: &RTree) -> Formula {
        let mark = Formula::conjunction(positive_mark(sig, t.label));
        if t.children.is_empty() {
            return mark;
        }
        let kids = t.children.iter().map(|(a, c)| Formula::diamond(&sig.actions()[*a], go(sig, c)));
        Formula::conjunction(std::iter::once(mark).chain(kids))
    }
    Ok(go(t.signature(), &as_tree(t)?))
}

/// The conjunctive query `ST_x(φ)` of a disjunction-free positive formula.
pub fn pml_query(phi: &Formula) -> Result<ConjunctiveQuery, SynthError> {
    let st = standard_translation(phi)?;
    if st.free_vars().is_empty() {
        // only ⊤ survives without mentioning x
        return Ok(ConjunctiveQuery::new("x", &[], Vec::new())?);
    }
    Ok(ConjunctiveQuery::from_fo(&st)?)
}

/// `◇^{=n} φ` as `◇^{≥n} φ ∧ ¬◇^{≥n+1} φ`, or `¬◇φ` for `n = 0`.
fn exactly(action: &str, n: usize, body: Formula) -> Vec<Formula> {
    let above = Formula::not(Formula::graded(action, n + 1, body.clone()));
    if n == 0 {
        vec![above]
    } else {
        vec![Formula::graded(action, n, body), above]
    }
}

/// Graded formula true in a tree `M` iff the depth-`k` part of `M` is `t`.
pub fn tree_to_gml(t: &PointedStructure, k: usize) -> Result<Formula, SynthError> {
    fn go(sig: &Signature, t: &RTree, r: usize) -> Formula {
        let mut parts = full_mark(sig, t.label);
        if r > 0 {
            for (a, name) in sig.actions().iter().enumerate() {
                let mut classes: BTreeMap<String, (usize, &RTree)> = BTreeMap::new();
                let mut total = 0;
                for (_, c) in t.children.iter().filter(|(b, _)| *b == a) {
                    classes.entry(c.code()).or_insert((0, c)).0 += 1;
                    total += 1;
                }
                parts.extend(exactly(name, total, Formula::True));
                for (n, c) in classes.into_values() {
                    parts.extend(exactly(name, n, go(sig, c, r - 1)));
                }
            }
        }
        Formula::conjunction(parts)
    }
    let tree = as_tree(t)?;
    if tree.depth() > k {
        return Err(SynthError::TooDeep { depth: tree.depth(), k });
    }
    Ok(go(t.signature(), &tree, k))
}

/// First-order `ψ(x)` holding at `a` in `M` iff `gsub(M_a) ≅ n`.
///
/// The states of `n` become `x, x2, …, xn`; the body fixes their labels and
/// every edge among them and requires the set to be closed under successors.
pub fn gsub_description_fo(n: &PointedStructure) -> Result<FoFormula, SynthError> {
    if !ClassTag::unbounded(ClassKind::PointGenerated).contains(n) {
        return Err(SynthError::NotPointGenerated);
    }
    let sig = n.signature();
    let d = n.distinguished();
    let order: Vec<usize> = std::iter::once(d).chain(n.states().filter(|&s| s != d)).collect();
    let names: Vec<String> = (0..order.len()).map(|i| if i == 0 { "x".to_string() } else { format!("x{}", i + 1) }).collect();
    let mut parts = Vec::new();
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            parts.push(FoFormula::not(FoFormula::Eq(names[i].clone(), names[j].clone())));
        }
    }
    for (i, &s) in order.iter().enumerate() {
        for (p, prop) in sig.props().iter().enumerate() {
            let atom = FoFormula::unary(prop, &names[i]);
            parts.push(if n.label(s) >> p & 1 == 1 { atom } else { FoFormula::not(atom) });
        }
    }
    for (a, action) in sig.actions().iter().enumerate() {
        for (i, &s) in order.iter().enumerate() {
            for (j, &t) in order.iter().enumerate() {
                let atom = FoFormula::binary(action, &names[i], &names[j]);
                parts.push(if n.has_edge(a, s, t) { atom } else { FoFormula::not(atom) });
            }
        }
    }
    let mut closed = Vec::new();
    for action in sig.actions() {
        for x in &names {
            let inside = FoFormula::disjunction(names.iter().map(|y| FoFormula::Eq("z".into(), y.clone())));
            closed.push(FoFormula::implies(FoFormula::binary(action, x, "z"), inside));
        }
    }
    parts.push(FoFormula::forall("z", FoFormula::conjunction(closed)));
    let mut f = FoFormula::conjunction(parts);
    for v in names[1..].iter().rev() {
        f = FoFormula::exists(v, f);
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_class;
    use crate::hom::isomorphic;
    use crate::logic::check::{check, Assignment};
    use crate::logic::fo::{eval_fo, FoAssignment};
    use crate::logic::parse::parse;
    use crate::transform::{gsub, restrict_depth};
    use std::sync::Arc;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::standard())
    }

    fn f(s: &str) -> Formula {
        parse(s, None).unwrap()
    }

    #[test]
    fn pml_examples() {
        let p = PointedStructure::builder(sig(), 1).prop(0, "p").build().unwrap();
        assert_eq!(tree_to_pml(&p).unwrap(), f("p"));
        let chain = PointedStructure::builder(sig(), 2).edge("R", 0, 1).prop(1, "p").build().unwrap();
        assert_eq!(tree_to_pml(&chain).unwrap(), f("true & <R> p"));
        let fork = PointedStructure::builder(sig(), 3).edge("R", 0, 1).edge("R", 0, 2).build().unwrap();
        let phi = tree_to_pml(&fork).unwrap();
        let inst = pml_query(&phi).unwrap().canonical_instance(&sig()).unwrap();
        assert_eq!(inst.state_count(), 3);
        assert!(isomorphic(&inst, &fork));
        let lp = PointedStructure::builder(sig(), 1).edge("R", 0, 0).build().unwrap();
        assert_eq!(tree_to_pml(&lp), Err(SynthError::NotTree));
    }

    #[test]
    fn pml_round_trip_on_small_trees() {
        let trees = enumerate_class(ClassTag::unbounded(ClassKind::Tree), &sig(), 5, None).unwrap();
        for t in &trees {
            let q = pml_query(&tree_to_pml(t).unwrap()).unwrap();
            assert!(isomorphic(&q.canonical_instance(&sig()).unwrap(), t));
        }
    }

    #[test]
    fn gml_examples() {
        let p = PointedStructure::builder(sig(), 1).prop(0, "p").build().unwrap();
        assert_eq!(tree_to_gml(&p, 0).unwrap(), f("p"));
        let e = PointedStructure::builder(sig(), 1).build().unwrap();
        assert_eq!(tree_to_gml(&e, 0).unwrap(), f("!p"));
        let chain = PointedStructure::builder(sig(), 2).edge("R", 0, 1).prop(1, "p").build().unwrap();
        assert_eq!(
            tree_to_gml(&chain, 1).unwrap(),
            f("!p & <R> true & !<R>>=2 true & <R> p & !<R>>=2 p")
        );
        assert_eq!(tree_to_gml(&chain, 0), Err(SynthError::TooDeep { depth: 1, k: 0 }));
    }

    #[test]
    fn gml_contract_on_small_trees() {
        let trees = enumerate_class(ClassTag::unbounded(ClassKind::Tree), &sig(), 4, None).unwrap();
        for k in 0..=2 {
            for t in trees.iter().filter(|t| RTree::from_structure(t).unwrap().depth() <= k) {
                let phi = tree_to_gml(t, k).unwrap();
                for m in &trees {
                    let cut = restrict_depth(m, k).unwrap();
                    assert_eq!(check(m, &Assignment::new(), &phi).unwrap(), isomorphic(&cut, t), "k={k}");
                }
            }
        }
    }

    #[test]
    fn gsub_descriptions() {
        let x: FoAssignment = [("x".to_string(), 0)].into();
        let all = enumerate_class(ClassTag::unbounded(ClassKind::Any), &sig(), 3, None).unwrap();
        let pg = enumerate_class(ClassTag::unbounded(ClassKind::PointGenerated), &sig(), 2, None).unwrap();
        for n in &pg {
            let psi = gsub_description_fo(n).unwrap();
            for m in &all {
                let x: FoAssignment = [("x".to_string(), m.distinguished())].into();
                assert_eq!(eval_fo(m, &psi, &x).unwrap(), isomorphic(&gsub(m, None), n));
            }
        }
        let lp = PointedStructure::builder(sig(), 1).edge("R", 0, 0).build().unwrap();
        let two_cycle = PointedStructure::builder(sig(), 2).edge("R", 0, 1).edge("R", 1, 0).build().unwrap();
        let psi = gsub_description_fo(&lp).unwrap();
        assert!(eval_fo(&lp, &psi, &x).unwrap());
        assert!(!eval_fo(&two_cycle, &psi, &x).unwrap());
        let c2 = PointedStructure::builder(sig(), 2).edge("R", 0, 1).build().unwrap();
        let c3 = PointedStructure::builder(sig(), 3).edge("R", 0, 1).edge("R", 1, 2).build().unwrap();
        let psi = gsub_description_fo(&c2).unwrap();
        assert!(eval_fo(&c2, &psi, &x).unwrap() && !eval_fo(&c3, &psi, &x).unwrap());
        let split = PointedStructure::builder(sig(), 2).build().unwrap();
        assert_eq!(gsub_description_fo(&split), Err(SynthError::NotPointGenerated));
    }
}

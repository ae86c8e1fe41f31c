use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::FoFormula;
use crate::structure::{PointedStructure, Signature, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    Unary { prop: String, var: String },
    Binary { action: String, from: String, to: String },
}

impl Atom {
    pub fn unary(prop: &str, var: &str) -> Self {
        Atom::Unary { prop: prop.into(), var: var.into() }
    }

    pub fn binary(action: &str, from: &str, to: &str) -> Self {
        Atom::Binary { action: action.into(), from: from.into(), to: to.into() }
    }

    fn vars(&self) -> Vec<&str> {
        match self {
            Atom::Unary { var, .. } => vec![var],
            Atom::Binary { from, to, .. } => vec![from, to],
        }
    }

    fn to_fo(&self) -> FoFormula {
        match self {
            Atom::Unary { prop, var } => FoFormula::unary(prop, var),
            Atom::Binary { action, from, to } => FoFormula::binary(action, from, to),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CqError {
    #[error("unknown proposition letter `{0}`")]
    UnknownProp(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` occurs in an atom but is not declared")]
    Undeclared(String),
    #[error("bound variable `{0}` occurs in no atom")]
    Unused(String),
    #[error("not a conjunctive query: {0}")]
    NotConjunctive(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// `∃ bound. ⋀ atoms` with exactly one free variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjunctiveQuery {
    pub free: String,
    pub bound: Vec<String>,
    pub atoms: Vec<Atom>,
}

impl ConjunctiveQuery {
    pub fn new(free: &str, bound: &[&str], atoms: Vec<Atom>) -> Result<Self, CqError> {
        let q = ConjunctiveQuery {
            free: free.to_string(),
            bound: bound.iter().map(|s| s.to_string()).collect(),
            atoms,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), CqError> {
        let mut declared = BTreeSet::from([self.free.as_str()]);
        for v in &self.bound {
            if !declared.insert(v) {
                return Err(CqError::DuplicateVariable(v.clone()));
            }
        }
        let mut used = BTreeSet::new();
        for atom in &self.atoms {
            for v in atom.vars() {
                if !declared.contains(v) {
                    return Err(CqError::Undeclared(v.to_string()));
                }
                used.insert(v);
            }
        }
        if let Some(v) = self.bound.iter().find(|v| !used.contains(v.as_str())) {
            return Err(CqError::Unused(v.clone()));
        }
        Ok(())
    }

    /// Variables in domain order: the free variable first.
    pub fn variables(&self) -> Vec<String> {
        std::iter::once(self.free.clone()).chain(self.bound.iter().cloned()).collect()
    }

    /// `inst(q)`: one state per variable (the free variable is state 0 and
    /// distinguished), one fact per atom.
    pub fn canonical_instance(&self, sig: &Arc<Signature>) -> Result<PointedStructure, CqError> {
        self.validate()?;
        let index: BTreeMap<&str, usize> = std::iter::once(self.free.as_str())
            .chain(self.bound.iter().map(String::as_str))
            .enumerate()
            .map(|(i, v)| (v, i))
            .collect();
        let mut labels = vec![0u64; index.len()];
        let mut edges = vec![BTreeSet::new(); sig.actions().len()];
        for atom in &self.atoms {
            match atom {
                Atom::Unary { prop, var } => {
                    let p = sig.prop_index(prop).ok_or_else(|| CqError::UnknownProp(prop.clone()))?;
                    labels[index[var.as_str()]] |= 1 << p;
                }
                Atom::Binary { action, from, to } => {
                    let a = sig.action_index(action).ok_or_else(|| CqError::UnknownAction(action.clone()))?;
                    edges[a].insert((index[from.as_str()], index[to.as_str()]));
                }
            }
        }
        Ok(PointedStructure::new(sig.clone(), labels, edges, 0)?)
    }

    /// The query whose canonical instance is `m` up to renaming: the
    /// distinguished state becomes `x`, the others `y<i>`. Non-distinguished
    /// states occurring in no fact have no variable and are dropped.
    pub fn from_structure(m: &PointedStructure) -> Self {
        let name = |s: usize| {
            if s == m.distinguished() {
                "x".to_string()
            } else {
                format!("y{s}")
            }
        };
        let sig = m.signature();
        let mut atoms = Vec::new();
        for f in m.facts() {
            atoms.push(match f {
                crate::structure::Fact::Prop { prop, state } => Atom::Unary {
                    prop: sig.props()[prop].clone(),
                    var: name(state),
                },
                crate::structure::Fact::Edge { action, from, to } => Atom::Binary {
                    action: sig.actions()[action].clone(),
                    from: name(from),
                    to: name(to),
                },
            });
        }
        let used: BTreeSet<String> = atoms.iter().flat_map(|a| a.vars().into_iter().map(String::from)).collect();
        let bound = m
            .states()
            .filter(|&s| s != m.distinguished())
            .map(name)
            .filter(|v| used.contains(v))
            .collect();
        ConjunctiveQuery { free: "x".to_string(), bound, atoms }
    }

    /// The quantifier-free matrix `⋀ atoms`.
    pub fn body(&self) -> FoFormula {
        FoFormula::conjunction(self.atoms.iter().map(Atom::to_fo))
    }

    /// `∃ bound. ⋀ atoms`.
    pub fn to_fo(&self) -> FoFormula {
        let mut f = self.body();
        for v in self.bound.iter().rev() {
            f = FoFormula::exists(v, f);
        }
        f
    }

    /// Reads a formula built from atoms, `⊤`, `∧` and `∃` with one free
    /// variable; clashing bound variables are renamed apart.
    pub fn from_fo(phi: &FoFormula) -> Result<Self, CqError> {
        let free = phi.free_vars();
        let [free] = free.as_slice() else {
            return Err(CqError::NotConjunctive(format!("expected one free variable, found {}", free.len())));
        };
        let mut bound = Vec::new();
        let mut atoms = Vec::new();
        let mut taken: BTreeSet<String> = BTreeSet::from([free.clone()]);
        let mut env: BTreeMap<String, String> = BTreeMap::from([(free.clone(), free.clone())]);
        collect(phi, &mut env, &mut taken, &mut bound, &mut atoms)?;
        let used: BTreeSet<String> = atoms.iter().flat_map(|a| a.vars().into_iter().map(String::from)).collect();
        bound.retain(|v| used.contains(v));
        Ok(ConjunctiveQuery { free: free.clone(), bound, atoms })
    }
}

fn collect(
    phi: &FoFormula,
    env: &mut BTreeMap<String, String>,
    taken: &mut BTreeSet<String>,
    bound: &mut Vec<String>,
    atoms: &mut Vec<Atom>,
) -> Result<(), CqError> {
    let look = |env: &BTreeMap<String, String>, v: &str| {
        env.get(v).cloned().ok_or_else(|| CqError::Undeclared(v.to_string()))
    };
    match phi {
        FoFormula::True => Ok(()),
        FoFormula::Unary { prop, var } => {
            atoms.push(Atom::Unary { prop: prop.clone(), var: look(env, var)? });
            Ok(())
        }
        FoFormula::Binary { action, from, to } => {
            atoms.push(Atom::Binary {
                action: action.clone(),
                from: look(env, from)?,
                to: look(env, to)?,
            });
            Ok(())
        }
        FoFormula::And(a, b) => {
            collect(a, env, taken, bound, atoms)?;
            collect(b, env, taken, bound, atoms)
        }
        FoFormula::Exists(v, body) => {
            let mut fresh = v.clone();
            let mut i = 0;
            while taken.contains(&fresh) {
                fresh = format!("{v}_{i}");
                i += 1;
            }
            taken.insert(fresh.clone());
            bound.push(fresh.clone());
            let saved = env.insert(v.clone(), fresh);
            collect(body, env, taken, bound, atoms)?;
            match saved {
                Some(s) => env.insert(v.clone(), s),
                None => env.remove(v),
            };
            Ok(())
        }
        other => Err(CqError::NotConjunctive(format!("unsupported connective in `{other}`"))),
    }
}

impl fmt::Display for ConjunctiveQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_fo())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::{count_homs_nat, isomorphic};
    use crate::logic::{count_satisfying, FoAssignment};
    use crate::transform::make_figure3_pair;

    fn sig() -> Arc<Signature> {
        Arc::new(Signature::standard())
    }

    fn bin(a: &str, x: &str, y: &str) -> Atom {
        Atom::Binary { action: a.into(), from: x.into(), to: y.into() }
    }

    fn un(p: &str, x: &str) -> Atom {
        Atom::Unary { prop: p.into(), var: x.into() }
    }

    #[test]
    fn diamond_p_instance() {
        let q = ConjunctiveQuery::new("x", &["y"], vec![bin("R", "x", "y"), un("p", "y")]).unwrap();
        let inst = q.canonical_instance(&sig()).unwrap();
        let expected = PointedStructure::builder(sig(), 2).edge("R", 0, 1).prop(1, "p").build().unwrap();
        assert!(isomorphic(&inst, &expected));
        let single = ConjunctiveQuery::new("x", &[], vec![un("p", "x")]).unwrap();
        assert_eq!(single.canonical_instance(&sig()).unwrap().label(0), 1);
    }

    #[test]
    fn variables_are_not_identified() {
        let q = ConjunctiveQuery::new("x", &["y", "z"], vec![bin("R", "x", "y"), bin("R", "x", "z")]).unwrap();
        let inst = q.canonical_instance(&sig()).unwrap();
        assert_eq!(inst.state_count(), 3);
        assert_eq!(inst.edge_count(), 2);
        let (m, _) = make_figure3_pair();
        let g: FoAssignment = [("x".to_string(), 0)].into();
        let sat = count_satisfying(&m, &q.body(), &g, &q.bound).unwrap();
        assert_eq!(u64::try_from(count_homs_nat(&inst, &m).unwrap()).unwrap(), sat);
        assert_eq!(sat, 4);
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(matches!(
            ConjunctiveQuery::new("x", &["y"], vec![un("q", "y")]).unwrap().canonical_instance(&sig()),
            Err(CqError::UnknownProp(_))
        ));
        assert!(matches!(ConjunctiveQuery::new("x", &["y"], vec![un("p", "z")]), Err(CqError::Undeclared(_))));
        assert!(matches!(ConjunctiveQuery::new("x", &["y"], vec![]), Err(CqError::Unused(_))));
        assert!(matches!(ConjunctiveQuery::new("x", &["x"], vec![]), Err(CqError::DuplicateVariable(_))));
    }

    #[test]
    fn fo_round_trip_with_shadowing() {
        let phi = FoFormula::exists(
            "y",
            FoFormula::and(
                FoFormula::binary("R", "x", "y"),
                FoFormula::exists("y", FoFormula::binary("R", "y", "y")),
            ),
        );
        let q = ConjunctiveQuery::from_fo(&phi).unwrap();
        assert_eq!(q.bound.len(), 2);
        let inst = q.canonical_instance(&sig()).unwrap();
        assert_eq!(inst.state_count(), 3);
        assert!(ConjunctiveQuery::from_fo(&FoFormula::or(FoFormula::True, FoFormula::True)).is_err());
    }

    #[test]
    fn structure_round_trip() {
        let (m, _) = make_figure3_pair();
        let q = ConjunctiveQuery::from_structure(&m);
        assert!(isomorphic(&q.canonical_instance(&sig()).unwrap(), &m));
    }
}

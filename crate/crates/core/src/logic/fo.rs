//! First-order formulas over a modal signature and a naive evaluator.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::structure::PointedStructure;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FoFormula {
    True,
    False,
    Unary { prop: String, var: String },
    Binary { action: String, from: String, to: String },
    Eq(String, String),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Exists(String, Box<FoFormula>),
    Forall(String, Box<FoFormula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FoError {
    #[error("unbound first-order variable `{0}`")]
    Unbound(String),
    #[error("unknown proposition letter `{0}`")]
    UnknownProp(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

/// Variable assignment for first-order evaluation.
pub type FoAssignment = BTreeMap<String, usize>;

impl FoFormula {
    pub fn unary(prop: &str, var: &str) -> Self {
        FoFormula::Unary { prop: prop.into(), var: var.into() }
    }

    pub fn binary(action: &str, from: &str, to: &str) -> Self {
        FoFormula::Binary { action: action.into(), from: from.into(), to: to.into() }
    }

    pub fn and(a: FoFormula, b: FoFormula) -> Self {
        FoFormula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FoFormula, b: FoFormula) -> Self {
        FoFormula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: FoFormula, b: FoFormula) -> Self {
        FoFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn not(a: FoFormula) -> Self {
        FoFormula::Not(Box::new(a))
    }

    pub fn exists(v: &str, body: FoFormula) -> Self {
        FoFormula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: &str, body: FoFormula) -> Self {
        FoFormula::Forall(v.into(), Box::new(body))
    }

    /// Conjunction of all items; `⊤` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = FoFormula>) -> Self {
        let mut items: Vec<FoFormula> = items.into_iter().collect();
        match items.len() {
            0 => FoFormula::True,
            _ => {
                let mut acc = items.pop().expect("nonempty");
                while let Some(x) = items.pop() {
                    acc = FoFormula::and(x, acc);
                }
                acc
            }
        }
    }

    pub fn disjunction(items: impl IntoIterator<Item = FoFormula>) -> Self {
        let mut items: Vec<FoFormula> = items.into_iter().collect();
        match items.len() {
            0 => FoFormula::False,
            _ => {
                let mut acc = items.pop().expect("nonempty");
                while let Some(x) = items.pop() {
                    acc = FoFormula::or(x, acc);
                }
                acc
            }
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        fn go(f: &FoFormula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            let mut note = |v: &String, bound: &Vec<String>| {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            };
            match f {
                FoFormula::True | FoFormula::False => {}
                FoFormula::Unary { var, .. } => note(var, bound),
                FoFormula::Binary { from, to, .. } | FoFormula::Eq(from, to) => {
                    note(from, bound);
                    note(to, bound);
                }
                FoFormula::Not(a) => go(a, bound, out),
                FoFormula::And(a, b) | FoFormula::Or(a, b) | FoFormula::Implies(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                FoFormula::Exists(v, a) | FoFormula::Forall(v, a) => {
                    bound.push(v.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            FoFormula::True | FoFormula::False | FoFormula::Unary { .. } | FoFormula::Binary { .. } | FoFormula::Eq(..) => 1,
            FoFormula::Not(a) | FoFormula::Exists(_, a) | FoFormula::Forall(_, a) => 1 + a.size(),
            FoFormula::And(a, b) | FoFormula::Or(a, b) | FoFormula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FoFormula::True => write!(f, "true"),
            FoFormula::False => write!(f, "false"),
            FoFormula::Unary { prop, var } => write!(f, "{prop}({var})"),
            FoFormula::Binary { action, from, to } => write!(f, "{action}({from},{to})"),
            FoFormula::Eq(a, b) => write!(f, "{a}={b}"),
            FoFormula::Not(a) => write!(f, "!{a}"),
            FoFormula::And(a, b) => write!(f, "({a} & {b})"),
            FoFormula::Or(a, b) => write!(f, "({a} | {b})"),
            FoFormula::Implies(a, b) => write!(f, "({a} -> {b})"),
            FoFormula::Exists(v, a) => write!(f, "exists {v}. {a}"),
            FoFormula::Forall(v, a) => write!(f, "forall {v}. {a}"),
        }
    }
}

/// Naive recursive evaluation; quantifiers range over every state of `m`.
pub fn eval_fo(m: &PointedStructure, phi: &FoFormula, g: &FoAssignment) -> Result<bool, FoError> {
    let mut g = g.clone();
    eval(m, phi, &mut g)
}

fn lookup(g: &FoAssignment, v: &str) -> Result<usize, FoError> {
    g.get(v).copied().ok_or_else(|| FoError::Unbound(v.to_string()))
}

fn eval(m: &PointedStructure, phi: &FoFormula, g: &mut FoAssignment) -> Result<bool, FoError> {
    let sig = m.signature();
    Ok(match phi {
        FoFormula::True => true,
        FoFormula::False => false,
        FoFormula::Unary { prop, var } => {
            let p = sig.prop_index(prop).ok_or_else(|| FoError::UnknownProp(prop.clone()))?;
            m.label(lookup(g, var)?) >> p & 1 == 1
        }
        FoFormula::Binary { action, from, to } => {
            let a = sig.action_index(action).ok_or_else(|| FoError::UnknownAction(action.clone()))?;
            m.has_edge(a, lookup(g, from)?, lookup(g, to)?)
        }
        FoFormula::Eq(a, b) => lookup(g, a)? == lookup(g, b)?,
        FoFormula::Not(a) => !eval(m, a, g)?,
        FoFormula::And(a, b) => eval(m, a, g)? && eval(m, b, g)?,
        FoFormula::Or(a, b) => eval(m, a, g)? || eval(m, b, g)?,
        FoFormula::Implies(a, b) => !eval(m, a, g)? || eval(m, b, g)?,
        FoFormula::Exists(v, a) | FoFormula::Forall(v, a) => {
            let existential = matches!(phi, FoFormula::Exists(..));
            let saved = g.get(v).copied();
            let mut result = !existential;
            for s in m.states() {
                g.insert(v.clone(), s);
                let r = eval(m, a, g)?;
                if r == existential {
                    result = existential;
                    break;
                }
            }
            match saved {
                Some(x) => g.insert(v.clone(), x),
                None => g.remove(v),
            };
            result
        }
    })
}

/// Number of extensions of `fixed` to `vars` under which `body` holds.
pub fn count_satisfying(
    m: &PointedStructure,
    body: &FoFormula,
    fixed: &FoAssignment,
    vars: &[String],
) -> Result<u64, FoError> {
    let mut g = fixed.clone();
    fn go(
        m: &PointedStructure,
        body: &FoFormula,
        g: &mut FoAssignment,
        vars: &[String],
    ) -> Result<u64, FoError> {
        match vars.split_first() {
            None => Ok(u64::from(eval(m, body, g)?)),
            Some((v, rest)) => {
                let mut total = 0;
                for s in m.states() {
                    g.insert(v.clone(), s);
                    total += go(m, body, g, rest)?;
                }
                g.remove(v);
                Ok(total)
            }
        }
    }
    go(m, body, &mut g, vars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn x_at(s: usize) -> FoAssignment {
        [("x".to_string(), s)].into()
    }

    #[test]
    fn quantifiers_range_over_states() {
        let m = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 0, 2)
            .prop(2, "p")
            .build()
            .unwrap();
        let some_p = FoFormula::exists("y", FoFormula::and(FoFormula::binary("R", "x", "y"), FoFormula::unary("p", "y")));
        let all_p = FoFormula::forall("y", FoFormula::implies(FoFormula::binary("R", "x", "y"), FoFormula::unary("p", "y")));
        assert!(eval_fo(&m, &some_p, &x_at(0)).unwrap());
        assert!(!eval_fo(&m, &all_p, &x_at(0)).unwrap());
        assert!(eval_fo(&m, &all_p, &x_at(1)).unwrap());
        assert_eq!(eval_fo(&m, &FoFormula::unary("p", "z"), &x_at(0)), Err(FoError::Unbound("z".into())));
    }

    #[test]
    fn counting_assignments() {
        let m = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 0, 2)
            .build()
            .unwrap();
        let body = FoFormula::and(FoFormula::binary("R", "x", "y"), FoFormula::binary("R", "x", "z"));
        let n = count_satisfying(&m, &body, &x_at(0), &["y".into(), "z".into()]).unwrap();
        assert_eq!(n, 4);
        assert_eq!(body.free_vars(), vec!["x".to_string(), "y".to_string(), "z".to_string()]);
    }
}

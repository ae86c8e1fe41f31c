//! Model checking and translations into first-order logic.

use std::collections::BTreeMap;

use thiserror::Error;

use super::fo::FoFormula;
use super::formula::Formula;
use crate::structure::PointedStructure;

/// Partial map from world variables to states.
pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unbound world variable `{0}`")]
    UnboundVar(String),
    #[error("unknown proposition letter `{0}`")]
    UnknownProp(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("grade must be at least 1")]
    ZeroGrade,
    #[error("`{0}` is outside the basic modal language")]
    NotBasic(String),
}

/// Satisfaction at the distinguished state.
pub fn check(m: &PointedStructure, g: &Assignment, phi: &Formula) -> Result<bool, CheckError> {
    check_at(m, m.distinguished(), g, phi)
}

pub fn check_at(m: &PointedStructure, state: usize, g: &Assignment, phi: &Formula) -> Result<bool, CheckError> {
    Ok(extension(m, g, phi)?[state])
}

/// The set of states satisfying `phi` under `g`, as a membership vector.
pub fn extension(m: &PointedStructure, g: &Assignment, phi: &Formula) -> Result<Vec<bool>, CheckError> {
    let sig = m.signature();
    let n = m.state_count();
    let action = |a: &str| sig.action_index(a).ok_or_else(|| CheckError::UnknownAction(a.to_string()));
    let var = |x: &str| g.get(x).copied().ok_or_else(|| CheckError::UnboundVar(x.to_string()));
    let graded = |grade: usize| if grade == 0 { Err(CheckError::ZeroGrade) } else { Ok(grade) };
    Ok(match phi {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Prop(p) => {
            let i = sig.prop_index(p).ok_or_else(|| CheckError::UnknownProp(p.clone()))?;
            m.states().map(|s| m.label(s) >> i & 1 == 1).collect()
        }
        Formula::Var(x) => {
            let w = var(x)?;
            m.states().map(|s| s == w).collect()
        }
        Formula::Not(a) => extension(m, g, a)?.into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => {
            let (x, y) = (extension(m, g, a)?, extension(m, g, b)?);
            x.iter().zip(&y).map(|(p, q)| *p && *q).collect()
        }
        Formula::Or(a, b) => {
            let (x, y) = (extension(m, g, a)?, extension(m, g, b)?);
            x.iter().zip(&y).map(|(p, q)| *p || *q).collect()
        }
        Formula::Diamond { action: a, grade, body } => {
            let (i, k) = (action(a)?, graded(*grade)?);
            let inner = extension(m, g, body)?;
            m.states().map(|s| m.successors(i, s).iter().filter(|&&t| inner[t]).count() >= k).collect()
        }
        Formula::Square { action: a, body } => {
            let i = action(a)?;
            let inner = extension(m, g, body)?;
            m.states().map(|s| m.successors(i, s).iter().all(|&t| inner[t])).collect()
        }
        Formula::Back { action: a, grade, body } => {
            let (i, k) = (action(a)?, graded(*grade)?);
            let inner = extension(m, g, body)?;
            m.states().map(|s| m.predecessors(i, s).iter().filter(|&&t| inner[t]).count() >= k).collect()
        }
        Formula::Global { grade, body } => {
            let k = graded(*grade)?;
            let holds = extension(m, g, body)?.into_iter().filter(|&b| b).count() >= k;
            vec![holds; n]
        }
        Formula::Down(x, body) => {
            let mut h = g.clone();
            let mut out = Vec::with_capacity(n);
            for s in m.states() {
                h.insert(x.clone(), s);
                out.push(extension(m, &h, body)?[s]);
            }
            out
        }
        Formula::At(x, body) => {
            let w = var(x)?;
            vec![extension(m, g, body)?[w]; n]
        }
    })
}

/// Name of the first-order variable for modal nesting depth `d`.
fn depth_var(d: usize) -> String {
    match d {
        0 => "x".to_string(),
        1 => "y".to_string(),
        _ => format!("y{d}"),
    }
}

/// `ST_x` of a basic modal formula.
pub fn standard_translation(phi: &Formula) -> Result<FoFormula, CheckError> {
    fn st(phi: &Formula, d: usize) -> Result<FoFormula, CheckError> {
        let x = depth_var(d);
        Ok(match phi {
            Formula::True => FoFormula::True,
            Formula::False => FoFormula::False,
            Formula::Prop(p) => FoFormula::unary(p, &x),
            Formula::Not(a) => FoFormula::not(st(a, d)?),
            Formula::And(a, b) => FoFormula::and(st(a, d)?, st(b, d)?),
            Formula::Or(a, b) => FoFormula::or(st(a, d)?, st(b, d)?),
            Formula::Diamond { action, grade: 1, body } => {
                let y = depth_var(d + 1);
                FoFormula::exists(&y, FoFormula::and(FoFormula::binary(action, &x, &y), st(body, d + 1)?))
            }
            Formula::Square { action, body } => {
                let y = depth_var(d + 1);
                FoFormula::forall(&y, FoFormula::implies(FoFormula::binary(action, &x, &y), st(body, d + 1)?))
            }
            other => return Err(CheckError::NotBasic(other.to_string())),
        })
    }
    st(phi, 0)
}

/// First-order name of a world variable.
pub fn world_var(x: &str) -> String {
    format!("w_{x}")
}

/// Translation of every language: `≥k` thresholds become `k` pairwise
/// distinct witnesses, `↓x` an equation with the current variable.
pub fn extended_translation(phi: &Formula) -> Result<FoFormula, CheckError> {
    fn witnesses(d: usize, k: usize) -> Vec<String> {
        if k == 1 {
            vec![depth_var(d + 1)]
        } else {
            (0..k).map(|i| format!("{}_{i}", depth_var(d + 1))).collect()
        }
    }
    fn distinct(ys: &[String]) -> Vec<FoFormula> {
        let mut out = Vec::new();
        for (i, a) in ys.iter().enumerate() {
            for b in &ys[i + 1..] {
                out.push(FoFormula::not(FoFormula::Eq(a.clone(), b.clone())));
            }
        }
        out
    }
    fn counted(
        ys: Vec<String>,
        each: impl Fn(&str) -> Result<FoFormula, CheckError>,
    ) -> Result<FoFormula, CheckError> {
        let mut parts = distinct(&ys);
        for y in &ys {
            parts.push(each(y)?);
        }
        let mut f = FoFormula::conjunction(parts);
        for y in ys.iter().rev() {
            f = FoFormula::exists(y, f);
        }
        Ok(f)
    }
    fn tr(phi: &Formula, x: &str, d: usize) -> Result<FoFormula, CheckError> {
        Ok(match phi {
            Formula::True => FoFormula::True,
            Formula::False => FoFormula::False,
            Formula::Prop(p) => FoFormula::unary(p, x),
            Formula::Var(v) => FoFormula::Eq(x.to_string(), world_var(v)),
            Formula::Not(a) => FoFormula::not(tr(a, x, d)?),
            Formula::And(a, b) => FoFormula::and(tr(a, x, d)?, tr(b, x, d)?),
            Formula::Or(a, b) => FoFormula::or(tr(a, x, d)?, tr(b, x, d)?),
            Formula::Diamond { action, grade, body } => counted(witnesses(d, *grade), |y| {
                Ok(FoFormula::and(FoFormula::binary(action, x, y), tr(body, y, d + 1)?))
            })?,
            Formula::Square { action, body } => {
                let y = depth_var(d + 1);
                FoFormula::forall(&y, FoFormula::implies(FoFormula::binary(action, x, &y), tr(body, &y, d + 1)?))
            }
            Formula::Back { action, grade, body } => counted(witnesses(d, *grade), |y| {
                Ok(FoFormula::and(FoFormula::binary(action, y, x), tr(body, y, d + 1)?))
            })?,
            Formula::Global { grade, body } => counted(witnesses(d, *grade), |y| tr(body, y, d + 1))?,
            Formula::Down(v, body) => {
                let w = world_var(v);
                FoFormula::exists(&w, FoFormula::and(FoFormula::Eq(w.clone(), x.to_string()), tr(body, x, d)?))
            }
            Formula::At(v, body) => tr(body, &world_var(v), d)?,
        })
    }
    if !phi.grades_valid() {
        return Err(CheckError::ZeroGrade);
    }
    tr(phi, "x", 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::fo::{eval_fo, FoAssignment};
    use crate::logic::parse::parse;
    use crate::structure::Signature;
    use crate::transform::make_figure3_pair;

    fn f(s: &str) -> Formula {
        parse(s, None).unwrap()
    }

    fn holds(m: &PointedStructure, s: &str) -> bool {
        check(m, &Assignment::new(), &f(s)).unwrap()
    }

    #[test]
    fn figure3_counts() {
        let (m, n) = make_figure3_pair();
        assert!(holds(&m, "<R>>=2 true"));
        assert!(!holds(&n, "<R>>=2 true"));
        assert!(holds(&m, "true") && holds(&n, "true"));
        assert!(holds(&m, "<R> p & <R> !p"));
        assert!(!holds(&n, "<R> p & <R> !p"));
    }

    #[test]
    fn hybrid_clauses() {
        let lp = PointedStructure::builder(Signature::standard(), 1).edge("R", 0, 0).prop(0, "p").build().unwrap();
        assert!(holds(&lp, "down x. <R> x"));
        let (m, _) = make_figure3_pair();
        assert!(!holds(&m, "down x. <R> x"));
        assert!(holds(&m, "down x. x"));
        assert!(holds(&m, "down x. <R> <~R> x"));
        assert!(holds(&m, "down x. <R> (p & @x <R>>=2 true)"));
        assert_eq!(check(&m, &Assignment::new(), &f("@y p")), Err(CheckError::UnboundVar("y".into())));
        let g: Assignment = [("y".to_string(), 2)].into();
        assert!(check(&m, &g, &f("@y p")).unwrap());
    }

    #[test]
    fn backward_and_global() {
        let (m, _) = make_figure3_pair();
        assert!(check_at(&m, 2, &Assignment::new(), &f("<~R> !p")).unwrap());
        assert!(!check_at(&m, 0, &Assignment::new(), &f("<~R> true")).unwrap());
        assert!(holds(&m, "E>=3 true") && !holds(&m, "E>=4 true"));
        assert!(holds(&m, "E>=2 !p"));
    }

    #[test]
    fn standard_translation_shapes() {
        assert_eq!(standard_translation(&f("<R> p")).unwrap().to_string(), "exists y. (R(x,y) & p(y))");
        assert_eq!(standard_translation(&f("p")).unwrap(), FoFormula::unary("p", "x"));
        assert!(standard_translation(&f("<R>>=2 p")).is_err());
        let edgeless = PointedStructure::point(Signature::standard(), 0).unwrap();
        assert!(holds(&edgeless, "[R] p"));
    }

    #[test]
    fn translations_agree_with_checker() {
        let (m, n) = make_figure3_pair();
        let x: FoAssignment = [("x".to_string(), 0)].into();
        for s in ["<R> (p | [R] false)", "<R>>=2 !p", "down x. <R> <~R>>=1 x", "E>=2 (p | <R> true)", "down x. E>=1 @x !p"] {
            let phi = f(s);
            let t = extended_translation(&phi).unwrap();
            for u in [&m, &n] {
                assert_eq!(eval_fo(u, &t, &x).unwrap(), holds(u, s), "{s}");
            }
        }
    }
}

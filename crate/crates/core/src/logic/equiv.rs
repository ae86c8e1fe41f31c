//! Structural deciders for logical equivalence of pointed structures.

use thiserror::Error;

use super::formula::Language;
use super::sim::{bisimilar, mutually_bounded_similar, mutually_similar, SimKind};
use crate::canon::UnravelCoder;
use crate::hom::isomorphic;
use crate::structure::PointedStructure;
use crate::transform::{backward_expansion, global_expansion, gsub, TransformError};

#[derive(Debug, Error)]
pub enum EquivError {
    #[error("logic `{0}` needs a depth bound")]
    MissingDepth(Language),
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error(transparent)]
    Transform(#[from] TransformError),
}

fn unravel_equal(m: &PointedStructure, n: &PointedStructure, k: usize) -> bool {
    let mut coder = UnravelCoder::new();
    coder.code(m, k) == coder.code(n, k)
}

/// Whether `m` and `n` satisfy the same formulas of `lang` (of modal depth at
/// most `k` for the depth-bounded languages). No formula is enumerated.
pub fn equivalent(m: &PointedStructure, n: &PointedStructure, lang: Language, k: Option<usize>) -> Result<bool, EquivError> {
    if !m.same_signature(n) {
        return Err(EquivError::SignatureMismatch);
    }
    let depth = || k.ok_or(EquivError::MissingDepth(lang));
    Ok(match lang {
        Language::Ml => bisimilar(m, n),
        Language::MlPlus => mutually_similar(SimKind::DirectedSimulation, m, n),
        Language::MlPlusDiamond => mutually_bounded_similar(m, n, depth()?),
        Language::MlPlusDiamondBackward => {
            mutually_bounded_similar(&backward_expansion(m)?, &backward_expansion(n)?, depth()?)
        }
        Language::MlPlusDiamondGlobal => {
            mutually_similar(SimKind::Simulation, &global_expansion(m)?, &global_expansion(n)?)
        }
        Language::Graded => unravel_equal(m, n, depth()?),
        Language::GradedBackward => unravel_equal(&backward_expansion(m)?, &backward_expansion(n)?, depth()?),
        Language::GradedGlobal => {
            // refinement on the union is stable after |M| + |N| rounds
            let stable = m.state_count() + n.state_count();
            unravel_equal(&global_expansion(m)?, &global_expansion(n)?, stable)
        }
        Language::Hybrid => isomorphic(&gsub(m, None), &gsub(n, None)),
        Language::HybridBackward => {
            isomorphic(&gsub(&backward_expansion(m)?, None), &gsub(&backward_expansion(n)?, None))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{make_clique, make_figure3_pair, unravel};
    use crate::structure::Signature;

    #[test]
    fn oracle_examples() {
        let (k1, k2) = (make_clique(1, true), make_clique(2, true));
        assert!(equivalent(&k1, &k2, Language::Ml, None).unwrap());
        assert!(!equivalent(&k1, &k2, Language::Graded, Some(1)).unwrap());
        assert!(!equivalent(&k1, &k2, Language::Hybrid, None).unwrap());
        let (m, n) = make_figure3_pair();
        assert!(!equivalent(&m, &n, Language::MlPlus, None).unwrap());
        assert!(!equivalent(&m, &n, Language::Ml, None).unwrap());
        assert!(equivalent(&m, &n, Language::MlPlusDiamond, Some(2)).unwrap());
        assert!(matches!(equivalent(&m, &n, Language::Graded, None), Err(EquivError::MissingDepth(_))));
    }

    #[test]
    fn unraveling_is_graded_equivalent() {
        let m = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 1, 2)
            .edge("R", 2, 0)
            .edge("R", 0, 2)
            .prop(1, "p")
            .build()
            .unwrap();
        for k in 0..4 {
            let u = unravel(&m, k);
            assert!(equivalent(&m, &u, Language::Graded, Some(k)).unwrap());
            assert!(equivalent(&unravel(&u, k), &u, Language::Graded, Some(k)).unwrap());
        }
    }

    #[test]
    fn global_sees_other_components() {
        let sig = Signature::standard();
        let a = PointedStructure::builder(sig.clone(), 2).prop(1, "p").build().unwrap();
        let b = PointedStructure::builder(sig, 1).build().unwrap();
        assert!(equivalent(&a, &b, Language::Graded, Some(3)).unwrap());
        assert!(equivalent(&a, &b, Language::Hybrid, None).unwrap());
        assert!(!equivalent(&a, &b, Language::GradedGlobal, None).unwrap());
        assert!(!equivalent(&a, &b, Language::MlPlusDiamondGlobal, None).unwrap());
    }
}

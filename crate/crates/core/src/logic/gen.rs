//! Seeded random formulas for differential testing.

use rand::Rng;

use super::formula::{Formula, Language};
use super::parse::canonical_names;
use crate::structure::Signature;

/// Sampler of closed formulas of one language.
#[derive(Debug, Clone)]
pub struct FormulaGen {
    pub language: Language,
    pub props: Vec<String>,
    pub actions: Vec<String>,
    pub max_depth: usize,
    pub max_grade: usize,
}

impl FormulaGen {
    pub fn new(language: Language, sig: &Signature, max_depth: usize) -> Self {
        FormulaGen {
            language,
            props: sig.props().to_vec(),
            actions: sig.actions().to_vec(),
            max_depth,
            max_grade: 3,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Formula {
        let f = self.go(rng, self.max_depth, 4, &mut Vec::new());
        debug_assert!(f.in_language(self.language));
        canonical_names(&f)
    }

    fn atom<R: Rng + ?Sized>(&self, rng: &mut R, bound: &[String]) -> Formula {
        let hybrid = matches!(self.language, Language::Hybrid | Language::HybridBackward);
        let choices = self.props.len() + 2 + if hybrid { bound.len() } else { 0 };
        let i = rng.gen_range(0..choices);
        if i < self.props.len() {
            Formula::Prop(self.props[i].clone())
        } else if i == self.props.len() {
            Formula::True
        } else if i == self.props.len() + 1 {
            Formula::False
        } else {
            Formula::Var(bound[i - self.props.len() - 2].clone())
        }
    }

    fn go<R: Rng + ?Sized>(&self, rng: &mut R, depth: usize, fuel: usize, bound: &mut Vec<String>) -> Formula {
        use Language::*;
        let lang = self.language;
        if fuel == 0 || rng.gen_bool(0.25) {
            return self.atom(rng, bound);
        }
        let positive = matches!(lang, MlPlus | MlPlusDiamond | MlPlusDiamondBackward | MlPlusDiamondGlobal);
        let existential = matches!(lang, MlPlusDiamond | MlPlusDiamondBackward | MlPlusDiamondGlobal);
        let graded = matches!(lang, Graded | GradedBackward | GradedGlobal);
        let backward = matches!(lang, MlPlusDiamondBackward | GradedBackward | HybridBackward);
        let global = matches!(lang, MlPlusDiamondGlobal | GradedGlobal);
        let hybrid = matches!(lang, Hybrid | HybridBackward);
        let action = |rng: &mut R| self.actions[rng.gen_range(0..self.actions.len())].clone();
        let grade = |rng: &mut R| if graded { rng.gen_range(1..=self.max_grade) } else { 1 };
        loop {
            match rng.gen_range(0..9) {
                0 | 1 => {
                    let a = self.go(rng, depth, fuel - 1, bound);
                    let b = self.go(rng, depth, fuel - 1, bound);
                    return if rng.gen_bool(0.5) { Formula::and(a, b) } else { Formula::or(a, b) };
                }
                2 if !positive => return Formula::not(self.go(rng, depth, fuel - 1, bound)),
                3 if depth > 0 && !self.actions.is_empty() => {
                    let (a, k) = (action(rng), grade(rng));
                    return Formula::graded(&a, k, self.go(rng, depth - 1, fuel - 1, bound));
                }
                4 if depth > 0 && !existential && !self.actions.is_empty() => {
                    let a = action(rng);
                    return Formula::boxed(&a, self.go(rng, depth - 1, fuel - 1, bound));
                }
                5 if depth > 0 && backward && !self.actions.is_empty() => {
                    let (a, k) = (action(rng), grade(rng));
                    return Formula::back(&a, k, self.go(rng, depth - 1, fuel - 1, bound));
                }
                6 if depth > 0 && global => {
                    let k = grade(rng);
                    return Formula::global(k, self.go(rng, depth - 1, fuel - 1, bound));
                }
                7 if hybrid => {
                    let x = format!("v{}", bound.len());
                    bound.push(x.clone());
                    let body = self.go(rng, depth, fuel - 1, bound);
                    bound.pop();
                    return Formula::down(&x, body);
                }
                8 if hybrid && !bound.is_empty() => {
                    let x = bound[rng.gen_range(0..bound.len())].clone();
                    return Formula::at(&x, self.go(rng, depth, fuel - 1, bound));
                }
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_stay_in_language() {
        let sig = Signature::standard();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for lang in Language::ALL {
            let g = FormulaGen::new(lang, &sig, 3);
            for _ in 0..200 {
                let f = g.sample(&mut rng);
                assert!(f.in_language(lang), "{lang}: {f}");
                assert!(f.modal_depth() <= 3);
                assert!(f.free_vars().is_empty());
            }
        }
    }
}

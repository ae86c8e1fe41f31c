use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use homcount::canon::canonical_code;
use homcount::enumerate::{random_structure, RandomParams};
use homcount::hom::{brute_force_count, count_homs_nat, isomorphic};
use homcount::logic::{bisimilar, check, parse, Assignment, FormulaGen, Language};
use homcount::semiring::Semiring;
use homcount::structure::{from_json, to_json};
use homcount::transform::{down_transform, flip, gsub, unravel};
use homcount::{ClassKind, ClassTag, PointedStructure, Signature};

fn sig() -> Arc<Signature> {
    Arc::new(Signature::new(["p", "q"], ["R", "S"]).unwrap())
}

fn structure(kind: ClassKind, sig: &Arc<Signature>, states: usize, density: f64, seed: u64) -> PointedStructure {
    random_structure(ClassTag::unbounded(kind), sig, RandomParams::new(states, density), seed).unwrap()
}

fn any_structure(max_states: usize) -> impl Strategy<Value = PointedStructure> {
    (1..=max_states, 0.05f64..0.7, any::<u64>()).prop_map(|(n, d, seed)| structure(ClassKind::Any, &sig(), n, d, seed))
}

const LANGUAGES: [Language; 10] = [
    Language::Ml,
    Language::MlPlus,
    Language::MlPlusDiamond,
    Language::MlPlusDiamondBackward,
    Language::MlPlusDiamondGlobal,
    Language::Graded,
    Language::GradedBackward,
    Language::GradedGlobal,
    Language::Hybrid,
    Language::HybridBackward,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn printed_formulas_parse_back(lang in 0usize..LANGUAGES.len(), depth in 0usize..4, seed in any::<u64>()) {
        let s = sig();
        let phi = FormulaGen::new(LANGUAGES[lang], &s, depth).sample(&mut ChaCha8Rng::seed_from_u64(seed));
        let text = phi.to_string();
        prop_assert_eq!(parse(&text, Some(&s)).unwrap(), phi, "{}", text);
    }

    #[test]
    fn json_round_trip(m in any_structure(5)) {
        prop_assert_eq!(from_json(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn counting_matches_brute_force(t in any_structure(3), m in any_structure(4)) {
        prop_assert_eq!(count_homs_nat(&t, &m).unwrap(), brute_force_count(&t, &m).into());
    }

    #[test]
    fn renaming_preserves_everything(m in any_structure(5), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = m.states().collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let r = m.permuted(&perm).unwrap();
        prop_assert_eq!(canonical_code(&m), canonical_code(&r));
        prop_assert!(isomorphic(&m, &r));
        prop_assert!(bisimilar(&m, &r));
    }

    #[test]
    fn unraveling_keeps_tree_counts(m in any_structure(4), k in 0usize..4, t_states in 1usize..5, seed in any::<u64>()) {
        let t = structure(ClassKind::Tree, m.signature_arc(), t_states, 0.5, seed);
        let depth = homcount::structure::classify(&t).directed_depth.unwrap();
        let u = unravel(&m, k);
        let (a, b) = (count_homs_nat(&t, &m).unwrap(), count_homs_nat(&t, &u).unwrap());
        if depth <= k {
            prop_assert_eq!(a, b);
        }
        prop_assert!(homcount::structure::classify(&u).has(ClassKind::Tree));
    }

    #[test]
    fn graded_formulas_cannot_see_past_their_depth(m in any_structure(4), seed in any::<u64>()) {
        let s = m.signature_arc().clone();
        let phi = FormulaGen::new(Language::Graded, &s, 3).sample(&mut ChaCha8Rng::seed_from_u64(seed));
        let u = unravel(&m, phi.modal_depth());
        let g = Assignment::new();
        prop_assert_eq!(check(&m, &g, &phi).unwrap(), check(&u, &g, &phi).unwrap());
    }

    #[test]
    fn generated_submodels_are_idempotent(m in any_structure(5)) {
        let g = gsub(&m, None);
        prop_assert_eq!(gsub(&g, None), g.clone());
        prop_assert!(bisimilar(&m, &g));
    }

    #[test]
    fn down_and_flip_are_inverse(n in 1usize..7, d in 0.05f64..0.6, seed in any::<u64>()) {
        let t = structure(ClassKind::ConnectedAcyclic, &sig(), n, d, seed);
        let down = down_transform(&t).unwrap();
        prop_assert!(homcount::structure::classify(&down).has(ClassKind::Tree));
        prop_assert_eq!(flip(&down).unwrap(), t);
    }

    #[test]
    fn counting_maps_agree(n in 0u64..200, which in 0usize..6) {
        let s: Semiring = ["bool", "nat", "modp:3", "modp:7", "minplus:4", "trunc:3:2"][which].parse().unwrap();
        prop_assert_eq!(s.count_small(n), s.count_by_folding(n));
    }
}

//! Equivalence of two structures in every supported logic.

use homcount::logic::{equivalent, simulation_fixpoint, Language, SimKind};
use homcount::transform::{make_clique, make_figure3_pair};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (m, n) = make_figure3_pair();
    let (k1, k3) = (make_clique(1, true), make_clique(3, true));
    let langs = [
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
    println!("{:<8} {:>14} {:>14}", "logic", "figure pair", "K^1 vs K^3");
    for lang in langs {
        let k = lang.is_depth_bounded().then_some(2);
        let a = equivalent(&m, &n, lang, k)?;
        let b = equivalent(&k1, &k3, lang, k)?;
        println!("{:<8} {:>14} {:>14}", lang.name(), a, b);
    }

    let sim = simulation_fixpoint(SimKind::DirectedSimulation, &m, &n);
    println!("\ndirected simulation M -> N: {} via {:?}", sim.holds, sim.relation);
    Ok(())
}

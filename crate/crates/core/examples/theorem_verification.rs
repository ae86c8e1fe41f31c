//! Run verification suites on small corpora.
//!
//! `cargo run --example theorem_verification -- T4.5 L5.3` runs selected ids;
//! without arguments every suite runs on structures with at most 2 states.

use homcount::harness::{verify_theorem, Bounds, TheoremId};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let picked: Vec<TheoremId> = std::env::args().skip(1).map(|a| a.parse()).collect::<Result<_, _>>()?;
    let ids = if picked.is_empty() { TheoremId::ALL.to_vec() } else { picked };
    let bounds = Bounds { max_states: 2, max_depth: 2, source_states: 3, sample: 50 };
    let mut failed = 0;
    for id in ids {
        let report = verify_theorem(id, &bounds, 0)?;
        println!("{report}\n");
        failed += usize::from(!report.passed());
    }
    if failed > 0 {
        std::process::exit(1);
    }
    Ok(())
}

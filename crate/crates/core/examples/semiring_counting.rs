//! Counting maps `count_S(n) = 1 + ... + 1` and their periodicity.

use homcount::semiring::{PeriodicCase, Semiring, DEFAULT_PROBE};

fn main() {
    let zoo = ["bool", "nat", "modp:2", "modp:3", "minplus:3", "trunc:2:3"];
    for name in zoo {
        let s: Semiring = name.parse().expect("built-in semiring");
        let first: Vec<String> = (0..8u64).map(|n| s.count_small(n).to_string()).collect();
        let report = s.analyze_periodicity(DEFAULT_PROBE);
        let case = PeriodicCase::of(&s, &report);
        print!("{:<10} count 0..8 = [{}]", s.to_string(), first.join(", "));
        if report.injective_up_to_probe {
            println!("  injective");
        } else {
            println!("  L = {}, P = {}  {}", report.l, report.p, case.label());
        }
    }
}

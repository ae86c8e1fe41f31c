//! The periodic-semiring demonstration for the built-in semirings.

use homcount::harness::negative_demo;
use homcount::semiring::Semiring;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in ["bool", "nat", "modp:3", "modp:4", "minplus:2", "trunc:2:3"] {
        let s: Semiring = name.parse()?;
        let report = negative_demo(&s)?;
        println!("{report}\n");
    }
    Ok(())
}

//! Build a few pointed structures, classify them and move them through JSON and DOT.

use homcount::structure::{classify, from_json, to_dot, to_json};
use homcount::{ClassKind, PointedStructure, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::new(["p", "q"], ["R", "S"])?;

    // root with an R-child labeled p and an S-child labeled q
    let tree = PointedStructure::builder(sig.clone(), 3)
        .edge("R", 0, 1)
        .edge("S", 0, 2)
        .prop(1, "p")
        .prop(2, "q")
        .build()?;

    // the point has an incoming edge only: connected and acyclic, not a tree
    let inward = PointedStructure::builder(sig.clone(), 2).edge("R", 1, 0).build()?;

    let looped = PointedStructure::builder(sig, 1).edge("R", 0, 0).prop(0, "p").build()?;

    for (name, m) in [("tree", &tree), ("inward", &inward), ("self-loop", &looped)] {
        let c = classify(m);
        let kinds: Vec<_> = c.kinds.iter().map(|k| k.name()).collect();
        println!(
            "{name:>9}: {kinds:?}, directed depth {:?}, undirected depth {:?}",
            c.directed_depth, c.undirected_depth
        );
        assert!(!c.has(ClassKind::Tree) || c.has(ClassKind::PointGenerated));
    }

    let text = to_json(&tree);
    println!("\n{text}");
    assert_eq!(from_json(&text)?, tree);
    println!("{}", to_dot(&tree));
    Ok(())
}

//! Sizes of enumerated class slices, one structure per isomorphism type.

use std::sync::Arc;

use homcount::enumerate::{enumerate_class, random_structure, RandomParams};
use homcount::structure::classify;
use homcount::{ClassKind, ClassTag, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Arc::new(Signature::standard());
    println!("{:<12} {:>6} {:>6} {:>6} {:>6}", "class", "<=1", "<=2", "<=3", "<=4");
    for kind in [ClassKind::Tree, ClassKind::ConnectedAcyclic, ClassKind::Forest, ClassKind::PointGenerated, ClassKind::Connected] {
        let sizes: Vec<String> = (1..=4)
            .map(|n| enumerate_class(ClassTag::unbounded(kind), &sig, n, None).map(|s| s.len().to_string()))
            .collect::<Result<_, _>>()?;
        println!("{:<12} {:>6} {:>6} {:>6} {:>6}", kind.name(), sizes[0], sizes[1], sizes[2], sizes[3]);
    }

    let shallow = enumerate_class(ClassTag::new(ClassKind::Tree, Some(1)), &sig, 5, None)?;
    println!("\ntrees of depth <= 1 with <= 5 states: {}", shallow.len());

    let tag = ClassTag::unbounded(ClassKind::PointGenerated);
    let m = random_structure(tag, &sig, RandomParams::new(6, 0.3), 7)?;
    assert!(classify(&m).has(ClassKind::PointGenerated));
    println!("seeded random point-generated structure: {} states, {} edges", m.state_count(), m.edge_count());
    Ok(())
}

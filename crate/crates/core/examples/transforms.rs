//! Unravelings, generated submodels, expansions and the tree conversions.

use homcount::structure::to_json;
use homcount::transform::{
    backward_expansion, down_transform, flip, global_expansion, gsub, is_pg_augmentation, pg_augment, reduct, unravel,
    unravel_size,
};
use homcount::{PointedStructure, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sig = Signature::standard();
    // a 2-cycle through the point, plus an unreachable p-state
    let m = PointedStructure::builder(sig.clone(), 3)
        .edge("R", 0, 1)
        .edge("R", 1, 0)
        .edge("R", 1, 1)
        .prop(2, "p")
        .build()?;

    for k in 0..=4 {
        let u = unravel(&m, k);
        assert_eq!(u.state_count() as u128, unravel_size(&m, k));
        println!("unr^{k}: {} states", u.state_count());
    }
    println!("gsub: {} states, gsub^0: {} state", gsub(&m, None).state_count(), gsub(&m, Some(0)).state_count());

    let mb = backward_expansion(&m)?;
    let mg = global_expansion(&m)?;
    println!("backward expansion actions {:?}, global expansion actions {:?}", mb.signature().actions(), mg.signature().actions());
    assert_eq!(reduct(&mg), m);

    // connected acyclic, with an edge pointing at the root
    let t = PointedStructure::builder(sig, 3).edge("R", 1, 0).edge("R", 1, 2).prop(2, "p").build()?;
    let down = down_transform(&t)?;
    println!("\ndown transform (a tree over the backward signature):\n{}", to_json(&down));
    assert_eq!(flip(&down)?, t);

    let aug = pg_augment(&t)?;
    assert!(is_pg_augmentation(&t, &aug));
    println!("PG-augmentation edges: {}", aug.edge_count());
    Ok(())
}

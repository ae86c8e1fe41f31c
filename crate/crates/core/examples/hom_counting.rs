//! Homomorphism counts, reusable counters, profile comparison and conjunctive queries.

use homcount::hom::{
    brute_force_count, compare_profiles, count_homs, count_homs_nat, Atom, ConjunctiveQuery, HomCounter, ProfileBound,
    TargetIndex,
};
use homcount::logic::{count_satisfying, FoAssignment};
use homcount::semiring::Semiring;
use homcount::transform::{make_clique, make_figure3_pair};
use homcount::{ClassKind, ClassTag, PointedStructure, Signature};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = PointedStructure::builder(Signature::standard(), 3).edge("R", 0, 1).edge("R", 1, 2).build()?;
    for n in 1..=4 {
        let k = make_clique(n, true);
        println!("hom(path3, K^{n}) = {}  (mod 3: {})", count_homs_nat(&path, &k)?, count_homs(&Semiring::ModP(3), &path, &k)?);
        assert_eq!(brute_force_count(&path, &k), (n * n) as u64);
    }

    // one compiled source against many targets
    let edge = PointedStructure::builder(Signature::standard(), 2).edge("R", 0, 1).build()?;
    let counter = HomCounter::new(&edge);
    let (m, n) = make_figure3_pair();
    for (name, t) in [("M", &m), ("N", &n)] {
        println!("hom(edge, {name}) = {}", counter.count(&TargetIndex::new(t)));
    }

    let tag = ClassTag::unbounded(ClassKind::Tree);
    for s in [Semiring::Boolean, Semiring::Natural] {
        let v = compare_profiles(&m, &n, tag, &s, ProfileBound::new(4, None))?;
        println!("{s} tree profiles up to 4 states: {}", v.to_json_value());
    }

    // x has two R-successors, one of them labeled p
    let q = ConjunctiveQuery::new(
        "x",
        &["y", "z"],
        vec![Atom::binary("R", "x", "y"), Atom::binary("R", "x", "z"), Atom::unary("p", "z")],
    )?;
    let inst = q.canonical_instance(m.signature_arc())?;
    let fixed = FoAssignment::from([("x".to_string(), m.distinguished())]);
    println!(
        "{q}: {} satisfying assignments, {} homomorphisms from the canonical instance",
        count_satisfying(&m, &q.body(), &fixed, &q.bound)?,
        count_homs_nat(&inst, &m)?
    );
    Ok(())
}

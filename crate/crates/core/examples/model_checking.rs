//! Parse and check formulas; compare with the first-order translation.

use homcount::logic::{
    check, eval_fo, extended_translation, parse, pml_query, standard_translation, tree_to_gml, tree_to_pml, Assignment,
    FoAssignment,
};
use homcount::transform::make_figure3_pair;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (m, n) = make_figure3_pair();
    let g = Assignment::new();
    let at_root = FoAssignment::from([("x".to_string(), m.distinguished())]);

    for text in ["<R>>=2 true", "<R> p & <R> !p", "[R] p", "down x. <R> <~R> x", "E>=3 true", "<R> (p | !p)"] {
        let phi = parse(text, Some(m.signature()))?;
        println!("{:<28} M: {:<5} N: {:<5}", phi.to_string(), check(&m, &g, &phi)?, check(&n, &g, &phi)?);
        if let Ok(st) = standard_translation(&phi) {
            assert_eq!(eval_fo(&m, &st, &at_root)?, check(&m, &g, &phi)?);
        }
        let fo = extended_translation(&phi)?;
        assert_eq!(eval_fo(&m, &fo, &at_root)?, check(&m, &g, &phi)?);
    }

    // formulas read off the tree M itself
    let pml = tree_to_pml(&m)?;
    println!("\npositive description of M: {pml}");
    println!("as a conjunctive query: {}", pml_query(&pml)?);
    let gml = tree_to_gml(&m, 1)?;
    println!("graded description of M: {gml}");
    println!("N satisfies it: {}", check(&n, &g, &gml)?);

    match parse("<R> (p &", None) {
        Err(e) => println!("\nsyntax error: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}

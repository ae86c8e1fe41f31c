//! Modal, graded, hybrid and first-order formulas: syntax, model checking,
//! translations, synthesis from trees, simulations and equivalence oracles.

mod check;
mod equiv;
mod fo;
mod formula;
mod gen;
mod parse;
mod sim;
mod synth;

pub use check::{check, check_at, extended_translation, extension, standard_translation, world_var, Assignment, CheckError};
pub use equiv::{equivalent, EquivError};
pub use fo::{count_satisfying, eval_fo, FoAssignment, FoError, FoFormula};
pub use formula::{Formula, Language};
pub use gen::FormulaGen;
pub use parse::{canonical_names, parse, ParseError};
pub use sim::{
    bisimilar, bounded_simulation, mutually_bounded_similar, mutually_similar, simulation_fixpoint, SimKind, SimResult,
};
pub use synth::{gsub_description_fo, pml_query, tree_to_gml, tree_to_pml, SynthError};

/// Canonical text of a formula; inverse of [`parse`].
pub fn print(phi: &Formula) -> String {
    phi.to_string()
}

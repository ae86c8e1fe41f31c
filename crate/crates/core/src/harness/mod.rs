//! Differential verification of the profile characterizations.
//!
//! Every biconditional is run pair by pair over a corpus of pointed
//! structures: one side compares homomorphism-count profiles, the other
//! evaluates a structural oracle, and the two verdicts must agree. Count
//! identities are checked for every (source, target) pair in range.

mod family;
mod identities;
mod negative;
mod suites;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::enumerate::{enumerate_class, random_structure, EnumError, RandomParams};
use crate::hom::CqError;
use crate::structure::{ClassKind, ClassTag, PointedStructure, Signature, StructureError};
use crate::transform::TransformError;

pub use negative::{negative_demo, FigureThreeCheck, NegativeReport, SeparatingPair};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Enumeration(#[from] EnumError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Query(#[from] CqError),
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
}

/// The checks known to [`verify_theorem`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// Boolean tree profiles of bounded depth vs bounded mutual simulation.
    TreeBool,
    /// Same over backward expansions.
    TreeBoolBackward,
    /// Boolean tree profiles of global expansions vs mutual simulation.
    TreeBoolGlobal,
    /// Counting tree profiles vs isomorphic bounded unravelings.
    TreeNat,
    /// Same over backward expansions.
    TreeNatBackward,
    /// Counting profiles of global expansions vs graded equivalence.
    TreeNatGlobal,
    /// Point-generated profiles vs isomorphic generated submodels.
    PointGenerated,
    /// Connected profiles vs generated submodels of backward expansions.
    PointGeneratedBackward,
    /// Profiles over all small structures vs isomorphism.
    Lovasz,
    /// Satisfying assignments of conjunctive queries vs hom counts.
    CanonicalInstance,
    /// Tree counts are unchanged by bounded unraveling.
    Unraveling,
    /// Counts under the down transform, flip and PG-augmentation.
    Reductions,
    /// Point-generated counts are unchanged by taking generated submodels.
    GeneratedSubmodel,
}

impl TheoremId {
    pub const ALL: [TheoremId; 13] = [
        TheoremId::TreeBool,
        TheoremId::TreeBoolBackward,
        TheoremId::TreeBoolGlobal,
        TheoremId::TreeNat,
        TheoremId::TreeNatBackward,
        TheoremId::TreeNatGlobal,
        TheoremId::PointGenerated,
        TheoremId::PointGeneratedBackward,
        TheoremId::Lovasz,
        TheoremId::CanonicalInstance,
        TheoremId::Unraveling,
        TheoremId::Reductions,
        TheoremId::GeneratedSubmodel,
    ];

    /// The id accepted on the command line.
    pub fn id(self) -> &'static str {
        match self {
            TheoremId::TreeBool => "T3.2",
            TheoremId::TreeBoolBackward => "T3.5",
            TheoremId::TreeBoolGlobal => "T3.7",
            TheoremId::TreeNat => "T4.5",
            TheoremId::TreeNatBackward => "T4.12",
            TheoremId::TreeNatGlobal => "T-global",
            TheoremId::PointGenerated => "T5.4",
            TheoremId::PointGeneratedBackward => "T-HLB",
            TheoremId::Lovasz => "Lovász",
            TheoremId::CanonicalInstance => "Fact2.1",
            TheoremId::Unraveling => "L4.4",
            TheoremId::Reductions => "P4.9",
            TheoremId::GeneratedSubmodel => "L5.3",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TheoremId::TreeBool => "bool tree profiles of depth k <=> mutual k-bounded simulation",
            TheoremId::TreeBoolBackward => "bool tree profiles of M^B, depth k <=> mutual k-bounded simulation of M^B",
            TheoremId::TreeBoolGlobal => "bool tree profiles of M^G <=> mutual simulation of M^G",
            TheoremId::TreeNat => "nat tree profiles up to max |unr^k| <=> unr^k isomorphism",
            TheoremId::TreeNatBackward => "nat tree profiles of M^B, depth k <=> unr^k(M^B) isomorphism",
            TheoremId::TreeNatGlobal => "nat tree profiles of M^G <=> graded equivalence of M^G",
            TheoremId::PointGenerated => "nat PG profiles up to max |gsub| <=> gsub isomorphism",
            TheoremId::PointGeneratedBackward => "nat connected profiles up to max |gsub(M^B)| <=> gsub(M^B) isomorphism",
            TheoremId::Lovasz => "nat profiles over all structures of the corpus size <=> isomorphism",
            TheoremId::CanonicalInstance => "CQ satisfying assignments = hom counts from the canonical instance",
            TheoremId::Unraveling => "hom(T, M) = hom(T, unr^k(M)) for trees of depth <= k",
            TheoremId::Reductions => "count preservation under down, flip and PG-augmentation; round trips",
            TheoremId::GeneratedSubmodel => "hom(T, M) = hom(T, gsub^k(M)) for PG sources of depth <= k",
        }
    }

    pub fn is_biconditional(self) -> bool {
        !matches!(
            self,
            TheoremId::CanonicalInstance | TheoremId::Unraveling | TheoremId::Reductions | TheoremId::GeneratedSubmodel
        )
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremId {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace(['_', ' '], "");
        let found = TheoremId::ALL.into_iter().find(|t| {
            let id = t.id().to_ascii_lowercase();
            id == key || id.replace('á', "a") == key || id.replace('.', "") == key
        });
        found.ok_or_else(|| HarnessError::UnknownTheorem(s.to_string()))
    }
}

/// Sizes of the corpora; the defaults are the exhaustive desk-scale runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Bounds {
    /// States of the structures compared pairwise (and of identity targets).
    pub max_states: usize,
    /// Largest depth `k` for the depth-bounded suites, which run `1..=k`.
    pub max_depth: usize,
    /// States of the sources of the count identities.
    pub source_states: usize,
    /// Pairs drawn when `max_states` is too large for exhaustive runs.
    pub sample: usize,
}

/// Exhaustive pair enumeration applies below this many states.
pub const EXHAUSTIVE_BELOW: usize = 4;

impl Default for Bounds {
    fn default() -> Self {
        Bounds { max_states: 3, max_depth: 3, source_states: 4, sample: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CorpusInfo {
    pub bounds: Bounds,
    pub props: Vec<String>,
    pub actions: Vec<String>,
    pub seed: u64,
    pub mode: String,
    pub structures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PartReport {
    pub name: String,
    pub tested: u64,
    pub agreements: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Disagreement {
    pub part: String,
    pub left: Value,
    pub right: Value,
    pub profile: String,
    pub oracle: String,
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremReport {
    pub id: String,
    pub title: String,
    pub corpus: CorpusInfo,
    pub pairs_tested: u64,
    pub agreements: u64,
    pub parts: Vec<PartReport>,
    pub disagreements: Vec<Disagreement>,
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn new(id: TheoremId, corpus: CorpusInfo) -> Self {
        TheoremReport {
            id: id.id().to_string(),
            title: id.title().to_string(),
            corpus,
            pairs_tested: 0,
            agreements: 0,
            parts: Vec::new(),
            disagreements: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.agreements == self.pairs_tested
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    /// Records the outcome of one part.
    fn add_part(&mut self, name: &str, tested: u64, agreements: u64, disagreements: Vec<Disagreement>) {
        self.pairs_tested += tested;
        self.agreements += agreements;
        self.parts.push(PartReport { name: name.to_string(), tested, agreements });
        self.disagreements.extend(disagreements);
    }
}

impl fmt::Display for TheoremReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.id, self.title)?;
        let c = &self.corpus;
        writeln!(
            f,
            "  corpus: {} structures, {} mode, max states {}, max depth {}, sources {}, seed {}, props {:?}, actions {:?}",
            c.structures, c.mode, c.bounds.max_states, c.bounds.max_depth, c.bounds.source_states, c.seed, c.props, c.actions
        )?;
        for p in &self.parts {
            writeln!(f, "  {:<28} {:>12} tested {:>12} agree", p.name, p.tested, p.agreements)?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        for d in self.disagreements.iter().take(10) {
            writeln!(f, "  DISAGREE [{}] profile {} / oracle {}: {} vs {}", d.part, d.profile, d.oracle, d.left, d.right)?;
        }
        if self.disagreements.len() > 10 {
            writeln!(f, "  ... {} more", self.disagreements.len() - 10)?;
        }
        write!(
            f,
            "  {}: {} / {} agree, {} disagreements",
            if self.passed() { "PASS" } else { "FAIL" },
            self.agreements,
            self.pairs_tested,
            self.disagreements.len()
        )
    }
}

/// Structures and the index pairs to compare.
pub(crate) struct Corpus {
    pub sig: Arc<Signature>,
    pub structures: Vec<PointedStructure>,
    pub pairs: Vec<(u32, u32)>,
    pub exhaustive: bool,
}

impl Corpus {
    /// Exhaustive below [`EXHAUSTIVE_BELOW`] states: every non-isomorphic
    /// structure, all unordered pairs, and each structure against a renamed
    /// copy. Otherwise `bounds.sample` seeded random pairs, every fourth a
    /// renamed copy.
    pub fn build(sig: &Arc<Signature>, bounds: &Bounds, seed: u64) -> Result<Self, HarnessError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut structures = Vec::new();
        let mut pairs = Vec::new();
        let exhaustive = bounds.max_states < EXHAUSTIVE_BELOW;
        if exhaustive {
            structures = enumerate_class(ClassTag::unbounded(ClassKind::Any), sig, bounds.max_states, None)?.structures;
            let n = structures.len() as u32;
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j));
                }
            }
            for i in 0..n as usize {
                let copy = renamed(&structures[i], &mut rng)?;
                pairs.push((i as u32, structures.len() as u32));
                structures.push(copy);
            }
        } else {
            for p in 0..bounds.sample {
                let m = random_any(sig, bounds.max_states, &mut rng)?;
                let n = if p % 4 == 3 { renamed(&m, &mut rng)? } else { random_any(sig, bounds.max_states, &mut rng)? };
                let base = structures.len() as u32;
                structures.push(m);
                structures.push(n);
                pairs.push((base, base + 1));
            }
        }
        Ok(Corpus { sig: sig.clone(), structures, pairs, exhaustive })
    }

    pub fn info(&self, bounds: &Bounds, seed: u64) -> CorpusInfo {
        CorpusInfo {
            bounds: *bounds,
            props: self.sig.props().to_vec(),
            actions: self.sig.actions().to_vec(),
            seed,
            mode: if self.exhaustive { "exhaustive" } else { "random" }.to_string(),
            structures: self.structures.len(),
        }
    }

    /// Structures that are not renamed copies.
    pub fn originals(&self) -> &[PointedStructure] {
        if self.exhaustive {
            &self.structures[..self.structures.len() / 2]
        } else {
            &self.structures
        }
    }
}

fn renamed(m: &PointedStructure, rng: &mut ChaCha8Rng) -> Result<PointedStructure, StructureError> {
    let mut perm: Vec<usize> = m.states().collect();
    perm.shuffle(rng);
    m.permuted(&perm)
}

fn random_any(sig: &Arc<Signature>, max_states: usize, rng: &mut ChaCha8Rng) -> Result<PointedStructure, EnumError> {
    let states = rng.gen_range(1..=max_states);
    let density = rng.gen_range(0.15..0.6);
    random_structure(ClassTag::unbounded(ClassKind::Any), sig, RandomParams::new(states, density), rng.gen())
}

/// Runs one check over the standard signature `{p}, {R}`.
pub fn verify_theorem(id: TheoremId, bounds: &Bounds, seed: u64) -> Result<TheoremReport, HarnessError> {
    verify_theorem_over(id, &Arc::new(Signature::standard()), bounds, seed)
}

pub fn verify_theorem_over(
    id: TheoremId,
    sig: &Arc<Signature>,
    bounds: &Bounds,
    seed: u64,
) -> Result<TheoremReport, HarnessError> {
    let corpus = Corpus::build(sig, bounds, seed)?;
    let mut report = TheoremReport::new(id, corpus.info(bounds, seed));
    match id {
        TheoremId::TreeBool
        | TheoremId::TreeBoolBackward
        | TheoremId::TreeBoolGlobal
        | TheoremId::TreeNat
        | TheoremId::TreeNatBackward
        | TheoremId::TreeNatGlobal => suites::tree_suite(id, &corpus, bounds, &mut report)?,
        TheoremId::PointGenerated | TheoremId::PointGeneratedBackward | TheoremId::Lovasz => {
            suites::bounded_suite(id, &corpus, bounds, &mut report)?
        }
        TheoremId::CanonicalInstance => identities::canonical_instance(&corpus, &mut report)?,
        TheoremId::Unraveling => identities::unraveling(&corpus, bounds, seed, &mut report)?,
        TheoremId::Reductions => identities::reductions(&corpus, bounds, &mut report)?,
        TheoremId::GeneratedSubmodel => identities::generated_submodel(&corpus, bounds, &mut report)?,
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.id().parse::<TheoremId>().unwrap(), t);
        }
        assert_eq!("lovasz".parse::<TheoremId>().unwrap(), TheoremId::Lovasz);
        assert_eq!("t45".parse::<TheoremId>().unwrap(), TheoremId::TreeNat);
        assert!("T9.9".parse::<TheoremId>().is_err());
    }

    #[test]
    fn small_runs_agree() {
        let b = Bounds { max_states: 2, max_depth: 2, source_states: 3, sample: 20 };
        for t in TheoremId::ALL {
            let r = verify_theorem(t, &b, 1).unwrap();
            assert!(r.passed(), "{r}");
            assert!(r.pairs_tested > 0);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let b = Bounds { max_states: 4, max_depth: 2, source_states: 3, sample: 12 };
        let a = verify_theorem(TheoremId::TreeNat, &b, 9).unwrap();
        let c = verify_theorem(TheoremId::TreeNat, &b, 9).unwrap();
        assert_eq!(a.to_json(), c.to_json());
        assert_eq!(a.corpus.mode, "random");
        assert!(a.passed(), "{a}");
    }
}

//! Pairwise biconditional suites.

use std::fmt;

use serde_json::Value;

use super::family::{Fingerprints, SourceFamily, SpanClasses};
use super::{Bounds, Corpus, Disagreement, HarnessError, TheoremId, TheoremReport};
use crate::canon::{canonical_code, UnravelCoder};
use crate::hom::span::{bool_tree_profiles, nat_tree_profiles};
use crate::hom::{count_homs_nat, isomorphic};
use crate::logic::{mutually_bounded_similar, mutually_similar, SimKind};
use crate::structure::{to_json_value, ClassKind, PointedStructure};
use crate::transform::{backward_expansion, flip, global_expansion, gsub, reduct, unravel_size, TransformError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Equal,
    Distinguished,
    /// The exact comparison found a difference above the enumerated sizes
    /// but possibly beyond the bound.
    Undetermined,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Equal => "equal-up-to-bound",
            Side::Distinguished => "distinguished",
            Side::Undetermined => "undetermined",
        })
    }
}

fn oracle_text(equal: bool) -> &'static str {
    if equal {
        "equivalent"
    } else {
        "not equivalent"
    }
}

/// Evaluates both sides on every corpus pair and records the outcome.
fn compare_pairs(
    corpus: &Corpus,
    part: &str,
    report: &mut TheoremReport,
    profile: impl Fn(usize, usize) -> Side,
    oracle: impl Fn(usize, usize) -> bool,
    witness: impl Fn(usize, usize) -> Option<Value>,
) {
    let mut agreed = 0u64;
    let mut found = Vec::new();
    for &(i, j) in &corpus.pairs {
        let (i, j) = (i as usize, j as usize);
        let p = profile(i, j);
        let o = oracle(i, j);
        if (p == Side::Equal && o) || (p == Side::Distinguished && !o) {
            agreed += 1;
        } else {
            found.push(Disagreement {
                part: part.to_string(),
                left: to_json_value(&corpus.structures[i]),
                right: to_json_value(&corpus.structures[j]),
                profile: p.to_string(),
                oracle: oracle_text(o).to_string(),
                witness: witness(i, j),
            });
        }
    }
    report.add_part(part, corpus.pairs.len() as u64, agreed, found);
}

/// Largest enumerated tree size for the fingerprints.
fn prefix_size(actions: usize) -> usize {
    if actions <= 1 {
        7
    } else {
        5
    }
}

fn expand(id: TheoremId, m: &PointedStructure) -> Result<PointedStructure, TransformError> {
    match id {
        TheoremId::TreeBoolBackward | TheoremId::TreeNatBackward => backward_expansion(m),
        TheoremId::TreeBoolGlobal | TheoremId::TreeNatGlobal => global_expansion(m),
        _ => Ok(m.clone()),
    }
}

/// Maps a tree over the expanded signature back to a σ-source with the same
/// counts into the unexpanded structures.
fn pull_back(id: TheoremId, t: &PointedStructure) -> Result<PointedStructure, TransformError> {
    match id {
        TheoremId::TreeBoolBackward | TheoremId::TreeNatBackward => flip(t),
        TheoremId::TreeBoolGlobal | TheoremId::TreeNatGlobal => Ok(reduct(t)),
        _ => Ok(t.clone()),
    }
}

/// Tree-profile theorems: exact span classes on the profile side.
pub(super) fn tree_suite(id: TheoremId, corpus: &Corpus, bounds: &Bounds, report: &mut TheoremReport) -> Result<(), HarnessError> {
    let boolean = matches!(id, TheoremId::TreeBool | TheoremId::TreeBoolBackward | TheoremId::TreeBoolGlobal);
    let bounded = !matches!(id, TheoremId::TreeBoolGlobal | TheoremId::TreeNatGlobal);
    let originals = &corpus.structures;
    let expanded: Vec<PointedStructure> = originals.iter().map(|m| expand(id, m)).collect::<Result<_, _>>()?;
    let sig = expanded[0].signature_arc().clone();
    let s = prefix_size(sig.actions().len());
    let depths: Vec<Option<usize>> = if bounded { (1..=bounds.max_depth).map(Some).collect() } else { vec![None] };
    let stable = 2 * originals.iter().map(PointedStructure::state_count).max().unwrap_or(1);
    for depth in depths {
        let part = depth.map_or_else(|| "all depths".to_string(), |k| format!("k={k}"));
        let family = SourceFamily::trees(&sig, s, depth, boolean)?;
        let fp = Fingerprints::new(&family, &expanded);
        let classes = SpanClasses::new(&expanded, &fp, |a, b| {
            if boolean {
                bool_tree_profiles(a, b, depth).expect("small unions")
            } else {
                nat_tree_profiles(a, b, depth).expect("common signature")
            }
        });
        report.notes.push(format!(
            "{part}: {} sources up to {s} states, {} profile classes, {} exact comparisons",
            family.sources.len(),
            classes.class.iter().max().map_or(0, |c| c + 1),
            classes.comparisons
        ));

        // every exact witness must separate the representatives by direct counting
        let mut checked = 0u64;
        let mut good = 0u64;
        for (&(c, d), w) in &classes.witness {
            if c > d {
                continue;
            }
            let t = pull_back(id, &w.to_structure(&sig))?;
            let (a, b) = (&originals[classes.rep[c as usize]], &originals[classes.rep[d as usize]]);
            let (x, y) = (count_homs_nat(&t, a)?, count_homs_nat(&t, b)?);
            let separates = if boolean { (x > 0u32.into()) != (y > 0u32.into()) } else { x != y };
            checked += 1;
            good += u64::from(separates);
        }
        if checked > 0 {
            report.add_part(&format!("{part} witnesses"), checked, good, Vec::new());
        }

        let k = depth.unwrap_or(stable);
        let sizes: Vec<u128> = if id == TheoremId::TreeNat {
            originals.iter().map(|m| unravel_size(m, k)).collect()
        } else {
            Vec::new()
        };
        let codes: Vec<u32> = match id {
            TheoremId::TreeNat | TheoremId::TreeNatBackward | TheoremId::TreeNatGlobal => {
                let mut coder = UnravelCoder::new();
                let base = if id == TheoremId::TreeNat { originals } else { &expanded };
                base.iter().map(|m| coder.code(m, k)).collect()
            }
            _ => Vec::new(),
        };
        let profile = |i: usize, j: usize| {
            if classes.same(i, j) {
                return Side::Equal;
            }
            if id != TheoremId::TreeNat {
                return Side::Distinguished;
            }
            let bound = sizes[i].max(sizes[j]);
            match fp.first_difference(i, j) {
                Some(d) => {
                    if d as u128 > bound {
                        Side::Equal
                    } else {
                        Side::Distinguished
                    }
                }
                None => {
                    let w = classes.witness(i, j).expect("same bucket, different classes").size() as u128;
                    if bound >= w {
                        Side::Distinguished
                    } else if bound <= s as u128 {
                        Side::Equal
                    } else {
                        Side::Undetermined
                    }
                }
            }
        };
        let oracle = |i: usize, j: usize| match id {
            TheoremId::TreeBool => mutually_bounded_similar(&originals[i], &originals[j], k),
            TheoremId::TreeBoolBackward => mutually_bounded_similar(&expanded[i], &expanded[j], k),
            TheoremId::TreeBoolGlobal => mutually_similar(SimKind::Simulation, &expanded[i], &expanded[j]),
            _ => codes[i] == codes[j],
        };
        let witness = |i: usize, j: usize| {
            if let Some((t, _, _)) = family.first_difference(&expanded[i], &expanded[j]) {
                return Some(to_json_value(&t));
            }
            classes.witness(i, j).map(|w| to_json_value(&w.to_structure(&sig)))
        };
        compare_pairs(corpus, &part, report, profile, oracle, witness);
    }
    Ok(())
}

/// Theorems whose profile side is a size-bounded slice of small sources.
pub(super) fn bounded_suite(id: TheoremId, corpus: &Corpus, bounds: &Bounds, report: &mut TheoremReport) -> Result<(), HarnessError> {
    let structures = &corpus.structures;
    let (kind, part) = match id {
        TheoremId::Lovasz => (ClassKind::Any, "all structures"),
        TheoremId::PointGenerated => (ClassKind::PointGenerated, "point-generated"),
        _ => (ClassKind::Connected, "connected"),
    };
    let keyed: Vec<PointedStructure> = match id {
        TheoremId::Lovasz => structures.clone(),
        TheoremId::PointGenerated => structures.iter().map(|m| gsub(m, None)).collect(),
        _ => structures.iter().map(|m| Ok(gsub(&backward_expansion(m)?, None))).collect::<Result<_, TransformError>>()?,
    };
    let family = SourceFamily::class(&corpus.sig, kind, bounds.max_states, false)?;
    let fp = Fingerprints::new(&family, structures);
    report.notes.push(format!("{} {} sources up to {} states", family.sources.len(), part, bounds.max_states));
    let codes: Vec<Option<(usize, u128)>> = keyed.iter().map(|m| canonical_code(m).map(|c| (m.state_count(), c))).collect();
    let bound = |i: usize, j: usize| match id {
        TheoremId::Lovasz => bounds.max_states,
        _ => keyed[i].state_count().max(keyed[j].state_count()),
    };
    let profile = |i: usize, j: usize| {
        if fp.equal_up_to(i, j, bound(i, j)) {
            Side::Equal
        } else {
            Side::Distinguished
        }
    };
    let oracle = |i: usize, j: usize| match (codes[i], codes[j]) {
        (Some(a), Some(b)) => a == b,
        _ => isomorphic(&keyed[i], &keyed[j]),
    };
    let witness = |i: usize, j: usize| {
        family
            .first_difference(&structures[i], &structures[j])
            .filter(|(t, _, _)| t.state_count() <= bound(i, j))
            .map(|(t, _, _)| to_json_value(&t))
    };
    compare_pairs(corpus, part, report, profile, oracle, witness);
    Ok(())
}

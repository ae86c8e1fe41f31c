//! Why tree profiles over a periodic semiring cannot match a modal logic.
//!
//! Cliques `K¹, K², …` are pairwise bisimilar, and a tree `T` has exactly
//! `n^{|T|-1}` homomorphisms into `Kⁿ`. Whenever `count_S` fails to be
//! constant on these powers, a tree separates two bisimilar structures;
//! when it is constant (as over 𝔹) the profiles cannot separate structures
//! that some modal formula does separate.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use serde::Serialize;
use serde_json::Value;

use super::{HarnessError, PartReport};
use crate::enumerate::enumerate_class;
use crate::hom::span::bool_tree_profiles;
use crate::hom::{count_homs, count_homs_nat, hom_equivalent};
use crate::logic::{bisimilar, mutually_similar, SimKind};
use crate::semiring::{PeriodicCase, PeriodicityReport, Semiring, DEFAULT_PROBE};
use crate::structure::{to_json_value, ClassKind, ClassTag, PointedStructure, Signature};
use crate::transform::{make_clique, make_figure3_pair};

/// Trees and clique sizes of the power-count check.
const TREE_STATES: usize = 4;
const CLIQUE_SIZES: usize = 4;

/// The hom-equivalent pair that no tree profile over 𝔹 separates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct FigureThreeCheck {
    pub hom_equivalent: bool,
    /// Exact comparison over all trees.
    pub bool_tree_profiles_equal: bool,
    pub bisimilar: bool,
    pub mutually_directed_similar: bool,
}

impl FigureThreeCheck {
    pub fn run() -> Result<Self, HarnessError> {
        let (m, n) = make_figure3_pair();
        Ok(FigureThreeCheck {
            hom_equivalent: hom_equivalent(&m, &n),
            bool_tree_profiles_equal: bool_tree_profiles(&m, &n, None)?.is_equal(),
            bisimilar: bisimilar(&m, &n),
            mutually_directed_similar: mutually_similar(SimKind::DirectedSimulation, &m, &n),
        })
    }

    /// Equal Boolean profiles, yet distinguished by ML and by ML⁺.
    pub fn holds(&self) -> bool {
        self.hom_equivalent && self.bool_tree_profiles_equal && !self.bisimilar && !self.mutually_directed_similar
    }
}

/// Two structures and how they come apart.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SeparatingPair {
    pub left: Value,
    pub right: Value,
    /// A tree whose counts differ, when the pair is separated by counting.
    pub tree: Option<Value>,
    pub left_count: Option<String>,
    pub right_count: Option<String>,
    pub bisimilar: bool,
    pub explanation: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct NegativeReport {
    pub semiring: String,
    pub periodicity: PeriodicityReport,
    pub case: PeriodicCase,
    pub case_label: String,
    /// `count_S(hom(T, Kⁿ)) = count_S(n^{|T|-1})` for small trees and cliques.
    pub clique_powers: PartReport,
    pub cliques_bisimilar: bool,
    pub figure_three: FigureThreeCheck,
    pub separating: SeparatingPair,
    pub holds: bool,
}

impl NegativeReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

impl fmt::Display for NegativeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.periodicity;
        writeln!(f, "semiring {}", self.semiring)?;
        if p.injective_up_to_probe {
            writeln!(f, "  counting injective up to {}", p.probe)?;
        } else {
            let segment: Vec<String> = p.segment.iter().map(ToString::to_string).collect();
            writeln!(f, "  counting periodic: L = {}, P = {}, segment [{}]", p.l, p.p, segment.join(", "))?;
        }
        writeln!(f, "  case: {}", self.case_label)?;
        writeln!(
            f,
            "  clique powers: {} / {} (trees up to {TREE_STATES} states, K^1..K^{CLIQUE_SIZES})",
            self.clique_powers.agreements, self.clique_powers.tested
        )?;
        writeln!(f, "  cliques pairwise bisimilar: {}", self.cliques_bisimilar)?;
        let t = &self.figure_three;
        writeln!(
            f,
            "  hom-equivalent pair: bool profiles equal {}, bisimilar {}, mutually directed-similar {}",
            t.bool_tree_profiles_equal, t.bisimilar, t.mutually_directed_similar
        )?;
        let s = &self.separating;
        writeln!(f, "  separating pair: {}", s.explanation)?;
        if let (Some(a), Some(b)) = (&s.left_count, &s.right_count) {
            writeln!(f, "    counts {a} vs {b}, bisimilar {}", s.bisimilar)?;
        }
        write!(f, "  {}", if self.holds { "HOLDS" } else { "FAILS" })
    }
}

fn chain(len: usize) -> PointedStructure {
    let mut b = PointedStructure::builder(Signature::standard(), len);
    for i in 1..len {
        b = b.edge("R", i - 1, i);
    }
    b.build().expect("chain")
}

fn clique_pair(s: &Semiring, n: usize, edges: usize) -> Result<SeparatingPair, HarnessError> {
    let (k1, kn) = (make_clique(1, true), make_clique(n, true));
    let t = chain(edges + 1);
    let (a, b) = (count_homs(s, &t, &k1)?, count_homs(s, &t, &kn)?);
    Ok(SeparatingPair {
        left: to_json_value(&k1),
        right: to_json_value(&kn),
        tree: Some(to_json_value(&t)),
        left_count: Some(a.to_string()),
        right_count: Some(b.to_string()),
        bisimilar: bisimilar(&k1, &kn),
        explanation: format!(
            "K^1 and K^{n} are bisimilar, but a chain of {} states has {a} vs {b} homomorphisms over {s}",
            edges + 1
        ),
    })
}

/// First `(n, e)` with `count_S(n^e) ≠ 1_S`, searching small values.
fn nonconstant_power(s: &Semiring) -> Option<(usize, usize)> {
    let one = s.one();
    (1..=6usize).flat_map(|e| (2..=6usize).map(move |n| (n, e))).find(|&(n, e)| {
        let power = BigUint::from(n).pow(e as u32);
        s.count_in(&power) != one
    })
}

fn separating_pair(s: &Semiring, case: PeriodicCase, report: &PeriodicityReport) -> Result<SeparatingPair, HarnessError> {
    match case {
        PeriodicCase::Injective => clique_pair(s, 2, 1),
        PeriodicCase::ZeroInSegment => {
            // 0 recurs only at multiples of P, so P^P counts to 0
            let p = report.p.max(2);
            clique_pair(s, p, p)
        }
        _ => match nonconstant_power(s) {
            Some((n, e)) => clique_pair(s, n, e),
            None => {
                let (m, n) = make_figure3_pair();
                Ok(SeparatingPair {
                    left: to_json_value(&m),
                    right: to_json_value(&n),
                    tree: None,
                    left_count: None,
                    right_count: None,
                    bisimilar: bisimilar(&m, &n),
                    explanation: format!(
                        "counting over {s} is constant on clique powers; this hom-equivalent pair has equal tree \
                         profiles but is separated by a modal formula"
                    ),
                })
            }
        },
    }
}

/// Runs the periodicity analysis and the clique and figure checks for `s`.
pub fn negative_demo(s: &Semiring) -> Result<NegativeReport, HarnessError> {
    let periodicity = s.analyze_periodicity(DEFAULT_PROBE);
    let case = PeriodicCase::of(s, &periodicity);
    let sig = Arc::new(Signature::standard());
    let trees = enumerate_class(ClassTag::unbounded(ClassKind::Tree), &sig, TREE_STATES, None)?.structures;
    let cliques: Vec<PointedStructure> = (1..=CLIQUE_SIZES).map(|n| make_clique(n, true)).collect();
    let mut tested = 0;
    let mut agreements = 0;
    for t in &trees {
        for (i, k) in cliques.iter().enumerate() {
            let power = BigUint::from(i + 1).pow(t.state_count() as u32 - 1);
            tested += 1;
            let nat_ok = count_homs_nat(t, k)? == power;
            agreements += u64::from(nat_ok && count_homs(s, t, k)? == s.count_in(&power));
        }
    }
    let clique_powers = PartReport { name: "clique powers".to_string(), tested, agreements };
    let cliques_bisimilar = cliques.iter().all(|a| cliques.iter().all(|b| bisimilar(a, b)));
    let figure_three = FigureThreeCheck::run()?;
    let separating = separating_pair(s, case, &periodicity)?;
    let separated = match (&separating.left_count, &separating.right_count) {
        (Some(a), Some(b)) => a != b && separating.bisimilar,
        _ => !separating.bisimilar && figure_three.holds(),
    };
    let holds = clique_powers.tested == clique_powers.agreements && cliques_bisimilar && figure_three.holds() && separated;
    Ok(NegativeReport {
        semiring: s.to_string(),
        periodicity,
        case,
        case_label: case.label().to_string(),
        clique_powers,
        cliques_bisimilar,
        figure_three,
        separating,
        holds,
    })
}

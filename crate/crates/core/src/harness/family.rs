//! Count vectors of a fixed source family, fingerprinted by source size.

use std::collections::HashMap;
use std::sync::Arc;

use crate::canon::Interner;
use crate::enumerate::{enumerate_class, EnumError};
use crate::hom::span::SpanOutcome;
use crate::hom::{HomCounter, TargetIndex};
use crate::structure::{ClassKind, ClassTag, PointedStructure, Signature};
use crate::tree::RTree;

enum Eval {
    /// Tree sources by the product-of-sums recursion; children precede parents.
    Trees(Vec<(u64, Vec<(usize, usize)>)>),
    General(Vec<HomCounter>),
}

/// Sources sorted by size with a counting routine.
pub(crate) struct SourceFamily {
    pub sources: Vec<PointedStructure>,
    /// `(size, end)`: sources of this size end before index `end`.
    pub blocks: Vec<(usize, usize)>,
    pub boolean: bool,
    eval: Eval,
}

impl SourceFamily {
    pub fn trees(sig: &Arc<Signature>, max_states: usize, depth: Option<usize>, boolean: bool) -> Result<Self, EnumError> {
        let tag = ClassTag::new(ClassKind::Tree, depth);
        let mut trees: Vec<RTree> = enumerate_class(tag, sig, max_states, None)?
            .iter()
            .map(|t| RTree::from_structure(t).expect("tree slice").normalized())
            .collect();
        trees.sort_by_key(RTree::size);
        let index: HashMap<RTree, usize> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let plan = trees
            .iter()
            .map(|t| {
                let kids = t.children.iter().map(|(a, c)| (*a, index[c])).collect();
                (t.label, kids)
            })
            .collect();
        let sources = trees.iter().map(|t| t.to_structure(sig)).collect();
        Ok(Self::finish(sources, boolean, Eval::Trees(plan)))
    }

    pub fn class(sig: &Arc<Signature>, kind: ClassKind, max_states: usize, boolean: bool) -> Result<Self, EnumError> {
        let mut sources = enumerate_class(ClassTag::unbounded(kind), sig, max_states, None)?.structures;
        sources.sort_by_key(PointedStructure::state_count);
        let counters = sources.iter().map(HomCounter::new).collect();
        Ok(Self::finish(sources, boolean, Eval::General(counters)))
    }

    fn finish(sources: Vec<PointedStructure>, boolean: bool, eval: Eval) -> Self {
        let mut blocks: Vec<(usize, usize)> = Vec::new();
        for (i, s) in sources.iter().enumerate() {
            match blocks.last_mut() {
                Some((size, end)) if *size == s.state_count() => *end = i + 1,
                _ => blocks.push((s.state_count(), i + 1)),
            }
        }
        SourceFamily { sources, blocks, boolean, eval }
    }

    /// Counts (or 0/1 for existence) from every source into `m`.
    pub fn counts(&self, m: &PointedStructure) -> Vec<u128> {
        let raw: Vec<u128> = match &self.eval {
            Eval::Trees(plan) => {
                let mut f: Vec<Vec<u128>> = Vec::with_capacity(plan.len());
                let mut out = Vec::with_capacity(plan.len());
                for (label, kids) in plan {
                    let row: Vec<u128> = m
                        .states()
                        .map(|x| {
                            if m.label(x) & label != *label {
                                return 0;
                            }
                            kids.iter().fold(1u128, |acc, &(a, c)| {
                                let s = m.successors(a, x).iter().fold(0u128, |s, &y| s.saturating_add(f[c][y]));
                                acc.saturating_mul(s)
                            })
                        })
                        .collect();
                    out.push(row[m.distinguished()]);
                    f.push(row);
                }
                out
            }
            Eval::General(counters) => {
                let target = TargetIndex::new(m);
                counters.iter().map(|c| c.count_u128(&target).unwrap_or(u128::MAX)).collect()
            }
        };
        if self.boolean {
            raw.into_iter().map(|c| u128::from(c > 0)).collect()
        } else {
            raw
        }
    }

    /// First source whose counts into `m` and `n` differ, with both counts.
    pub fn first_difference(&self, m: &PointedStructure, n: &PointedStructure) -> Option<(PointedStructure, u128, u128)> {
        let (a, b) = (self.counts(m), self.counts(n));
        a.iter().zip(&b).position(|(x, y)| x != y).map(|i| (self.sources[i].clone(), a[i], b[i]))
    }
}

/// Per target, an interned id of its count vector restricted to sources of
/// size at most `blocks[i].0`, for every block `i`.
pub(crate) struct Fingerprints {
    pub sizes: Vec<usize>,
    pub ids: Vec<Vec<u32>>,
}

impl Fingerprints {
    pub fn new(family: &SourceFamily, targets: &[PointedStructure]) -> Self {
        let mut tables: Vec<Interner<(u32, Vec<u128>)>> = family.blocks.iter().map(|_| Interner::new()).collect();
        let ids = targets
            .iter()
            .map(|m| {
                let counts = family.counts(m);
                let mut prev = 0u32;
                let mut start = 0;
                family
                    .blocks
                    .iter()
                    .zip(tables.iter_mut())
                    .map(|(&(_, end), table)| {
                        prev = table.intern((prev, counts[start..end].to_vec()));
                        start = end;
                        prev
                    })
                    .collect()
            })
            .collect();
        Fingerprints { sizes: family.blocks.iter().map(|b| b.0).collect(), ids }
    }

    /// Smallest source size on which the two count vectors differ.
    pub fn first_difference(&self, i: usize, j: usize) -> Option<usize> {
        self.ids[i].iter().zip(&self.ids[j]).position(|(a, b)| a != b).map(|p| self.sizes[p])
    }

    /// Whether the counts agree on every source of at most `bound` states.
    pub fn equal_up_to(&self, i: usize, j: usize, bound: usize) -> bool {
        match self.first_difference(i, j) {
            Some(d) => d > bound,
            None => true,
        }
    }

    pub fn full(&self, i: usize) -> u32 {
        self.ids[i].last().copied().unwrap_or(0)
    }
}

/// Classes of exactly equal (unbounded) profiles, refined from fingerprint
/// buckets by an exact comparison; differing classes in one bucket keep the
/// witness found for them.
pub(crate) struct SpanClasses {
    pub class: Vec<u32>,
    /// Representative target of every class.
    pub rep: Vec<usize>,
    pub witness: HashMap<(u32, u32), RTree>,
    pub comparisons: usize,
}

impl SpanClasses {
    pub fn new(
        targets: &[PointedStructure],
        fingerprints: &Fingerprints,
        compare: impl Fn(&PointedStructure, &PointedStructure) -> SpanOutcome,
    ) -> Self {
        let mut buckets: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
        let mut class = vec![0u32; targets.len()];
        let mut witness = HashMap::new();
        let mut rep = Vec::new();
        let mut comparisons = 0;
        for (i, m) in targets.iter().enumerate() {
            let reps = buckets.entry(fingerprints.full(i)).or_default();
            let mut found = None;
            let mut seen = Vec::new();
            for &(c, r) in reps.iter() {
                comparisons += 1;
                match compare(&targets[r], m) {
                    SpanOutcome::Equal { .. } => {
                        found = Some(c);
                        break;
                    }
                    SpanOutcome::Differ { witness } => seen.push((c, witness)),
                }
            }
            class[i] = match found {
                Some(c) => c,
                None => {
                    let c = rep.len() as u32;
                    rep.push(i);
                    for (d, w) in seen {
                        witness.insert((d, c), w.clone());
                        witness.insert((c, d), w);
                    }
                    reps.push((c, i));
                    c
                }
            };
        }
        SpanClasses { class, rep, witness, comparisons }
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        self.class[i] == self.class[j]
    }

    pub fn witness(&self, i: usize, j: usize) -> Option<&RTree> {
        self.witness.get(&(self.class[i], self.class[j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hom::count_homs_nat;
    use crate::transform::make_figure3_pair;

    #[test]
    fn tree_recursion_matches_search() {
        let sig = Arc::new(Signature::standard());
        let fam = SourceFamily::trees(&sig, 5, None, false).unwrap();
        let (m, n) = make_figure3_pair();
        for target in [&m, &n] {
            let counts = fam.counts(target);
            for (t, c) in fam.sources.iter().zip(&counts) {
                assert_eq!(count_homs_nat(t, target).unwrap(), (*c).into());
            }
        }
        let fp = Fingerprints::new(&fam, &[m.clone(), n.clone()]);
        assert_eq!(fp.first_difference(0, 1), Some(2));
        let (w, a, b) = fam.first_difference(&m, &n).unwrap();
        assert_eq!((w.state_count(), a, b), (2, 2, 1));
    }
}

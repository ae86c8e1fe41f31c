//! Count identities checked for every (source, target) pair in range.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Bounds, Corpus, Disagreement, HarnessError, TheoremReport};
use crate::canon::canonical_code;
use crate::enumerate::{enumerate_class, random_structure, RandomParams};
use crate::hom::{ConjunctiveQuery, HomCounter, TargetIndex};
use crate::logic::{count_satisfying, FoAssignment};
use crate::structure::{classify, to_json_value, ClassKind, ClassTag, PointedStructure};
use crate::transform::{backward_expansion, down_transform, flip, gsub, is_pg_augmentation, pg_augment, unravel};

fn mismatch(part: &str, left: &PointedStructure, right: &PointedStructure, a: u128, b: u128) -> Disagreement {
    Disagreement {
        part: part.to_string(),
        left: to_json_value(left),
        right: to_json_value(right),
        profile: a.to_string(),
        oracle: b.to_string(),
        witness: None,
    }
}

/// Tallies one part of an identity.
struct Tally<'a> {
    name: &'a str,
    tested: u64,
    agreed: u64,
    found: Vec<Disagreement>,
}

impl<'a> Tally<'a> {
    fn new(name: &'a str) -> Self {
        Tally { name, tested: 0, agreed: 0, found: Vec::new() }
    }

    fn record(&mut self, ok: bool, on_fail: impl FnOnce() -> Disagreement) {
        self.tested += 1;
        if ok {
            self.agreed += 1;
        } else if self.found.len() < 50 {
            self.found.push(on_fail());
        }
    }

    fn finish(self, report: &mut TheoremReport) {
        report.add_part(self.name, self.tested, self.agreed, self.found);
    }
}

fn count(c: &HomCounter, t: &TargetIndex) -> u128 {
    c.count_u128(t).unwrap_or(u128::MAX)
}

/// `#{a ∈ M^bound : M ⊨ body[x ↦ d]}` against `hom(inst(q), M)`.
pub(super) fn canonical_instance(corpus: &Corpus, report: &mut TheoremReport) -> Result<(), HarnessError> {
    let sig = &corpus.sig;
    let targets = corpus.originals();
    let trees = enumerate_class(ClassTag::unbounded(ClassKind::Tree), sig, 4, None)?.structures;
    let cyclic: Vec<PointedStructure> = enumerate_class(ClassTag::unbounded(ClassKind::Connected), sig, 3, None)?
        .structures
        .into_iter()
        .filter(|m| !classify(m).has(ClassKind::Tree))
        .take(60)
        .collect();
    report.notes.push(format!(
        "{} tree queries up to 4 variables, {} non-tree queries up to 3 variables, {} targets",
        trees.len(),
        cyclic.len(),
        targets.len()
    ));
    let indices: Vec<TargetIndex> = targets.iter().map(TargetIndex::new).collect();
    for (name, shapes) in [("tree queries", &trees), ("non-tree queries", &cyclic)] {
        let mut tally = Tally::new(name);
        for shape in shapes {
            let q = ConjunctiveQuery::from_structure(shape);
            let inst = q.canonical_instance(sig)?;
            let counter = HomCounter::new(&inst);
            let body = q.body();
            for (m, idx) in targets.iter().zip(&indices) {
                let fixed = FoAssignment::from([(q.free.clone(), m.distinguished())]);
                let sat = count_satisfying(m, &body, &fixed, &q.bound).map(u128::from).unwrap_or(u128::MAX);
                let homs = count(&counter, idx);
                tally.record(sat == homs, || mismatch(name, &inst, m, sat, homs));
            }
        }
        tally.finish(report);
    }
    Ok(())
}

/// Targets of the unraveling identity: the corpus, plus seeded random
/// structures one state larger when the corpus is exhaustive.
fn unraveling_targets(corpus: &Corpus, bounds: &Bounds, seed: u64) -> Result<Vec<PointedStructure>, HarnessError> {
    let mut targets = corpus.originals().to_vec();
    if corpus.exhaustive {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        for _ in 0..bounds.sample {
            let density = rng.gen_range(0.15..0.6);
            let params = RandomParams::new(bounds.max_states + 1, density);
            targets.push(random_structure(ClassTag::unbounded(ClassKind::Any), &corpus.sig, params, rng.gen())?);
        }
    }
    Ok(targets)
}

/// `hom(T, M) = hom(T, unr^k(M))` for trees `T` of depth at most `k` and one
/// state more than the identity sources.
pub(super) fn unraveling(corpus: &Corpus, bounds: &Bounds, seed: u64, report: &mut TheoremReport) -> Result<(), HarnessError> {
    let targets = unraveling_targets(corpus, bounds, seed)?;
    let tree_states = bounds.source_states + 1;
    let trees = enumerate_class(ClassTag::unbounded(ClassKind::Tree), &corpus.sig, tree_states, None)?.structures;
    let depths: Vec<usize> = trees.iter().map(|t| classify(t).depth_for(ClassKind::Tree).unwrap_or(0)).collect();
    let counters: Vec<HomCounter> = trees.iter().map(HomCounter::new).collect();
    report.notes.push(format!("{} trees up to {tree_states} states, {} targets", trees.len(), targets.len()));
    let indices: Vec<TargetIndex> = targets.iter().map(TargetIndex::new).collect();
    for k in 1..=bounds.max_depth {
        let name = format!("k={k}");
        let mut tally = Tally::new(&name);
        for (m, idx) in targets.iter().zip(&indices) {
            let u = unravel(m, k);
            let uidx = TargetIndex::new(&u);
            for ((t, c), &d) in trees.iter().zip(&counters).zip(&depths) {
                if d > k {
                    continue;
                }
                let (a, b) = (count(c, idx), count(c, &uidx));
                tally.record(a == b, || mismatch(&name, t, m, a, b));
            }
        }
        tally.finish(report);
    }
    Ok(())
}

/// Down transform, flip and PG-augmentation preserve counts; `flip ∘ down`
/// and `down ∘ flip` are identities.
pub(super) fn reductions(corpus: &Corpus, bounds: &Bounds, report: &mut TheoremReport) -> Result<(), HarnessError> {
    let sig = &corpus.sig;
    let targets = corpus.originals();
    let expanded: Vec<PointedStructure> = targets.iter().map(backward_expansion).collect::<Result<_, _>>()?;
    let plain: Vec<TargetIndex> = targets.iter().map(TargetIndex::new).collect();
    let back: Vec<TargetIndex> = expanded.iter().map(TargetIndex::new).collect();
    let n = bounds.source_states;
    let bsig = Arc::new(sig.backward().expect("unexpanded corpus signature"));

    let acyclic = enumerate_class(ClassTag::unbounded(ClassKind::ConnectedAcyclic), sig, n, None)?.structures;
    let btrees = enumerate_class(ClassTag::unbounded(ClassKind::Tree), &bsig, n, None)?.structures;
    let connected = enumerate_class(ClassTag::unbounded(ClassKind::Connected), sig, n, None)?.structures;
    report.notes.push(format!(
        "{} connected acyclic, {} backward trees, {} connected sources up to {n} states; {} targets",
        acyclic.len(),
        btrees.len(),
        connected.len(),
        targets.len()
    ));

    let pairs = |name: &str,
                     sources: &[PointedStructure],
                     image: &dyn Fn(&PointedStructure) -> Result<PointedStructure, HarnessError>,
                     source_side: &[TargetIndex],
                     image_side: &[TargetIndex],
                     report: &mut TheoremReport|
     -> Result<(), HarnessError> {
        let mut tally = Tally::new(name);
        for t in sources {
            let img = image(t)?;
            let (ct, ci) = (HomCounter::new(t), HomCounter::new(&img));
            for (i, m) in targets.iter().enumerate() {
                let (a, b) = (count(&ct, &source_side[i]), count(&ci, &image_side[i]));
                tally.record(a == b, || mismatch(name, t, m, a, b));
            }
        }
        tally.finish(report);
        Ok(())
    };
    pairs("down", &acyclic, &|t| Ok(down_transform(t)?), &plain, &back, report)?;
    pairs("flip", &btrees, &|t| Ok(flip(t)?), &back, &plain, report)?;
    pairs("PG-augmentation", &connected, &|t| Ok(pg_augment(t)?), &plain, &back, report)?;

    let mut shape = Tally::new("augmentation shape");
    for t in &connected {
        let aug = pg_augment(t)?;
        shape.record(is_pg_augmentation(t, &aug), || mismatch("augmentation shape", t, &aug, 0, 0));
    }
    shape.finish(report);

    let mut trips = Tally::new("round trips");
    for t in &acyclic {
        let back = flip(&down_transform(t)?)?;
        trips.record(back == *t, || mismatch("flip(down(T))", t, &back, 0, 0));
    }
    for t in &btrees {
        let back = down_transform(&flip(t)?)?;
        trips.record(back == *t, || mismatch("down(flip(T))", t, &back, 0, 0));
    }
    trips.finish(report);
    Ok(())
}

/// Distinct target indices, shared between isomorphic targets.
struct TargetPool {
    keys: HashMap<(usize, u128), usize>,
    indices: Vec<TargetIndex>,
}

impl TargetPool {
    fn new() -> Self {
        TargetPool { keys: HashMap::new(), indices: Vec::new() }
    }

    fn add(&mut self, m: &PointedStructure) -> usize {
        let next = self.indices.len();
        match canonical_code(m) {
            Some(code) => {
                let slot = *self.keys.entry((m.state_count(), code)).or_insert(next);
                if slot == next {
                    self.indices.push(TargetIndex::new(m));
                }
                slot
            }
            None => {
                self.indices.push(TargetIndex::new(m));
                next
            }
        }
    }
}

/// `hom(T, M) = hom(T, gsub(M)) = hom(T, gsub^d(M))` for point-generated
/// sources `T` of directed depth `d`.
pub(super) fn generated_submodel(corpus: &Corpus, bounds: &Bounds, report: &mut TheoremReport) -> Result<(), HarnessError> {
    let targets = corpus.originals();
    let n = bounds.source_states;
    let sources = enumerate_class(ClassTag::unbounded(ClassKind::PointGenerated), &corpus.sig, n, None)?.structures;
    let depths: Vec<usize> =
        sources.iter().map(|t| classify(t).depth_for(ClassKind::PointGenerated).unwrap_or(0)).collect();
    let counters: Vec<HomCounter> = sources.iter().map(HomCounter::new).collect();
    let max_depth = depths.iter().copied().max().unwrap_or(0);

    let mut pool = TargetPool::new();
    // per target: itself, gsub, then gsub^d for d = 0..=max_depth
    let slots: Vec<Vec<usize>> = targets
        .iter()
        .map(|m| {
            let mut row = vec![pool.add(m), pool.add(&gsub(m, None))];
            row.extend((0..=max_depth).map(|d| pool.add(&gsub(m, Some(d)))));
            row
        })
        .collect();
    report.notes.push(format!(
        "{} point-generated sources up to {n} states, {} targets, {} distinct submodels",
        sources.len(),
        targets.len(),
        pool.indices.len()
    ));

    let mut full = Tally::new("gsub");
    let mut bounded = Tally::new("gsub^d");
    for (s, t) in sources.iter().enumerate() {
        let counts: Vec<u128> = pool.indices.iter().map(|idx| count(&counters[s], idx)).collect();
        for (m, row) in targets.iter().zip(&slots) {
            let (a, b, c) = (counts[row[0]], counts[row[1]], counts[row[2 + depths[s]]]);
            full.record(a == b, || mismatch("gsub", t, m, a, b));
            bounded.record(a == c, || mismatch("gsub^d", t, m, a, c));
        }
    }
    full.finish(report);
    bounded.finish(report);
    Ok(())
}

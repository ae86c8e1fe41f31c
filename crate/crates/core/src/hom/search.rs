//! Backtracking and tree dynamic programming over bitset candidate sets.

use num_bigint::BigUint;

use crate::structure::{connected_components, is_acyclic, PointedStructure};

/// Adjacency bitsets of a target structure, reusable across many sources.
#[derive(Debug, Clone)]
pub struct TargetIndex {
    n: usize,
    words: usize,
    distinguished: usize,
    labels: Vec<u64>,
    succ_bits: Vec<Vec<Vec<u64>>>,
    pred_bits: Vec<Vec<Vec<u64>>>,
    loop_bits: Vec<Vec<u64>>,
    succ: Vec<Vec<Vec<usize>>>,
    pred: Vec<Vec<Vec<usize>>>,
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn for_each_bit(bits: &[u64], mut f: impl FnMut(usize)) {
    for (w, &word) in bits.iter().enumerate() {
        let mut x = word;
        while x != 0 {
            let b = x.trailing_zeros() as usize;
            f(w * 64 + b);
            x &= x - 1;
        }
    }
}

impl TargetIndex {
    pub fn new(m: &PointedStructure) -> Self {
        let n = m.state_count();
        let words = n.div_ceil(64);
        let acts = m.action_count();
        let mut succ_bits = vec![vec![vec![0u64; words]; n]; acts];
        let mut pred_bits = vec![vec![vec![0u64; words]; n]; acts];
        let mut loop_bits = vec![vec![0u64; words]; acts];
        for a in 0..acts {
            for &(u, v) in m.edges(a) {
                set_bit(&mut succ_bits[a][u], v);
                set_bit(&mut pred_bits[a][v], u);
                if u == v {
                    set_bit(&mut loop_bits[a], u);
                }
            }
        }
        TargetIndex {
            n,
            words,
            distinguished: m.distinguished(),
            labels: m.labels().to_vec(),
            succ_bits,
            pred_bits,
            loop_bits,
            succ: (0..acts).map(|a| m.states().map(|s| m.successors(a, s).to_vec()).collect()).collect(),
            pred: (0..acts).map(|a| m.states().map(|s| m.predecessors(a, s).to_vec()).collect()).collect(),
        }
    }

    pub fn state_count(&self) -> usize {
        self.n
    }

    fn label_word(&self, required: u64) -> u64 {
        let mut bits = 0u64;
        for (s, &l) in self.labels.iter().enumerate() {
            if required & !l == 0 {
                bits |= 1 << s;
            }
        }
        bits
    }

    fn label_bits(&self, required: u64) -> Vec<u64> {
        let mut bits = vec![0u64; self.words];
        for (s, &l) in self.labels.iter().enumerate() {
            if required & !l == 0 {
                set_bit(&mut bits, s);
            }
        }
        bits
    }
}

const SMALL_PLAN: usize = 24;
/// Tree tables up to this many cells live on the stack.
const SMALL_TABLE: usize = 64;

/// Adds counts that may exceed `u128`.
#[derive(Default)]
struct Acc {
    small: u128,
    big: Option<BigUint>,
}

impl Acc {
    fn add(&mut self, x: u128) {
        match self.small.checked_add(x) {
            Some(s) => self.small = s,
            None => {
                let big = self.big.get_or_insert_with(BigUint::default);
                *big += self.small;
                self.small = x;
            }
        }
    }

    fn finish(self) -> BigUint {
        match self.big {
            Some(b) => b + self.small,
            None => BigUint::from(self.small),
        }
    }
}

#[derive(Debug, Clone)]
struct Constraint {
    action: usize,
    /// Position of the already-assigned variable.
    pos: usize,
    /// True for an edge from the earlier variable to this one.
    forward: bool,
}

#[derive(Debug, Clone)]
struct Step {
    var: usize,
    label: u64,
    loops: Vec<usize>,
    cons: Vec<Constraint>,
}

/// A variable order over some source states with the edge constraints
/// between each variable and earlier ones.
#[derive(Debug, Clone)]
pub(crate) struct Plan {
    steps: Vec<Step>,
    /// First variable must map to the target's distinguished state.
    anchored: bool,
}

impl Plan {
    /// BFS order (ignoring direction) from `start` over the states of `block`,
    /// then any remaining block states by index.
    pub(crate) fn new(m: &PointedStructure, block: &[usize], start: usize, anchored: bool) -> Self {
        let mut in_block = vec![false; m.state_count()];
        for &s in block {
            in_block[s] = true;
        }
        let mut order = vec![start];
        let mut seen = vec![false; m.state_count()];
        seen[start] = true;
        let mut i = 0;
        loop {
            while i < order.len() {
                let s = order[i];
                i += 1;
                for a in 0..m.action_count() {
                    for &t in m.successors(a, s).iter().chain(m.predecessors(a, s)) {
                        if in_block[t] && !seen[t] {
                            seen[t] = true;
                            order.push(t);
                        }
                    }
                }
            }
            match block.iter().find(|&&s| !seen[s]) {
                Some(&s) => {
                    seen[s] = true;
                    order.push(s);
                }
                None => break,
            }
        }
        let mut pos = vec![usize::MAX; m.state_count()];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let steps = order
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                let mut loops = Vec::new();
                let mut cons = Vec::new();
                for a in 0..m.action_count() {
                    for &t in m.successors(a, v) {
                        if t == v {
                            loops.push(a);
                        } else if pos[t] < p {
                            cons.push(Constraint { action: a, pos: pos[t], forward: false });
                        }
                    }
                    for &t in m.predecessors(a, v) {
                        if t != v && pos[t] < p {
                            cons.push(Constraint { action: a, pos: pos[t], forward: true });
                        }
                    }
                }
                Step { var: v, label: m.label(v), loops, cons }
            })
            .collect();
        Plan { steps, anchored }
    }

    /// Whole-source plan: the distinguished component anchored first, the
    /// other components appended as free variables.
    pub(crate) fn whole(m: &PointedStructure) -> Self {
        Plan::new(m, &m.states().collect::<Vec<_>>(), m.distinguished(), true)
    }

    pub(crate) fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.var)
    }

    fn label_masks(&self, t: &TargetIndex) -> Vec<Vec<u64>> {
        self.steps.iter().map(|s| t.label_bits(s.label)).collect()
    }

    fn candidates(&self, t: &TargetIndex, i: usize, labels: &[Vec<u64>], assign: &[usize], out: &mut [u64]) {
        let step = &self.steps[i];
        out.copy_from_slice(&labels[i]);
        if i == 0 && self.anchored {
            let keep = out[t.distinguished / 64] & (1 << (t.distinguished % 64));
            out.iter_mut().for_each(|w| *w = 0);
            out[t.distinguished / 64] = keep;
        }
        for &a in &step.loops {
            for (w, l) in out.iter_mut().zip(&t.loop_bits[a]) {
                *w &= l;
            }
        }
        for c in &step.cons {
            let other = assign[c.pos];
            let mask = if c.forward { &t.succ_bits[c.action][other] } else { &t.pred_bits[c.action][other] };
            for (w, m) in out.iter_mut().zip(mask) {
                *w &= m;
            }
        }
    }

    /// Number of assignments of this plan's variables that satisfy every constraint.
    pub(crate) fn count(&self, t: &TargetIndex) -> BigUint {
        if self.steps.is_empty() {
            return BigUint::from(1u32);
        }
        if t.words == 1 && self.steps.len() <= SMALL_PLAN {
            if let Some(x) = self.count_single_word(t) {
                return BigUint::from(x);
            }
        }
        let labels = self.label_masks(t);
        let mut scratch = vec![vec![0u64; t.words]; self.steps.len()];
        let mut assign = vec![0usize; self.steps.len()];
        let mut acc = Acc::default();
        self.count_rec(t, 0, &labels, &mut assign, &mut scratch, &mut acc);
        acc.finish()
    }

    fn count_u128(&self, t: &TargetIndex) -> Option<u128> {
        if !self.steps.is_empty() && t.words == 1 && self.steps.len() <= SMALL_PLAN {
            return self.count_single_word(t);
        }
        u128::try_from(self.count(t)).ok()
    }

    /// Allocation-free counting for targets with at most 64 states.
    fn count_single_word(&self, t: &TargetIndex) -> Option<u128> {
        let mut labels = [0u64; SMALL_PLAN];
        for (i, step) in self.steps.iter().enumerate() {
            labels[i] = t.label_word(step.label);
        }
        let mut assign = [0usize; SMALL_PLAN];
        self.count_word_rec(t, 0, &labels, &mut assign)
    }

    fn count_word_rec(&self, t: &TargetIndex, i: usize, labels: &[u64; SMALL_PLAN], assign: &mut [usize; SMALL_PLAN]) -> Option<u128> {
        let step = &self.steps[i];
        let mut cand = labels[i];
        if i == 0 && self.anchored {
            cand &= 1 << t.distinguished;
        }
        for &a in &step.loops {
            cand &= t.loop_bits[a][0];
        }
        for c in &step.cons {
            let other = assign[c.pos];
            cand &= if c.forward { t.succ_bits[c.action][other][0] } else { t.pred_bits[c.action][other][0] };
        }
        if i + 1 == self.steps.len() {
            return Some(u128::from(cand.count_ones()));
        }
        let mut total = 0u128;
        while cand != 0 {
            let s = cand.trailing_zeros() as usize;
            cand &= cand - 1;
            assign[i] = s;
            total = total.checked_add(self.count_word_rec(t, i + 1, labels, assign)?)?;
        }
        Some(total)
    }

    fn count_rec(
        &self,
        t: &TargetIndex,
        i: usize,
        labels: &[Vec<u64>],
        assign: &mut Vec<usize>,
        scratch: &mut Vec<Vec<u64>>,
        acc: &mut Acc,
    ) {
        let mut cand = std::mem::take(&mut scratch[i]);
        self.candidates(t, i, labels, assign, &mut cand);
        if i + 1 == self.steps.len() {
            acc.add(cand.iter().map(|w| w.count_ones() as u128).sum());
        } else {
            for_each_bit(&cand, |s| {
                assign[i] = s;
                self.count_rec(t, i + 1, labels, assign, scratch, acc);
            });
        }
        scratch[i] = cand;
    }

    /// Visits satisfying assignments (indexed by source state) until `visit` returns false.
    pub(crate) fn search(
        &self,
        t: &TargetIndex,
        injective: bool,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        let labels = self.label_masks(t);
        let n_source = self.steps.iter().map(|s| s.var + 1).max().unwrap_or(0);
        let mut assign = vec![0usize; self.steps.len()];
        let mut by_var = vec![usize::MAX; n_source];
        let mut used = vec![0u64; t.words];
        self.search_rec(t, 0, injective, &labels, &mut assign, &mut by_var, &mut used, visit)
    }

    #[allow(clippy::too_many_arguments)]
    fn search_rec(
        &self,
        t: &TargetIndex,
        i: usize,
        injective: bool,
        labels: &[Vec<u64>],
        assign: &mut Vec<usize>,
        by_var: &mut Vec<usize>,
        used: &mut Vec<u64>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if i == self.steps.len() {
            return visit(by_var);
        }
        let mut cand = vec![0u64; t.words];
        self.candidates(t, i, labels, assign, &mut cand);
        if injective {
            for (w, u) in cand.iter_mut().zip(used.iter()) {
                *w &= !u;
            }
        }
        let mut targets = Vec::new();
        for_each_bit(&cand, |s| targets.push(s));
        for s in targets {
            assign[i] = s;
            by_var[self.steps[i].var] = s;
            used[s / 64] |= 1 << (s % 64);
            let go_on = self.search_rec(t, i + 1, injective, labels, assign, by_var, used, visit);
            used[s / 64] &= !(1 << (s % 64));
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// A connected acyclic component rooted at one of its states.
#[derive(Debug, Clone)]
pub(crate) struct TreePlan {
    /// States in BFS order; `parent[i]` refers to a position before `i`.
    order: Vec<usize>,
    labels: Vec<u64>,
    parent: Vec<usize>,
    action: Vec<usize>,
    /// Edge points from parent to child.
    down: Vec<bool>,
    anchored: bool,
}

impl TreePlan {
    pub(crate) fn new(m: &PointedStructure, root: usize, anchored: bool) -> Self {
        let mut order = vec![root];
        let mut parent = vec![usize::MAX];
        let mut action = vec![0];
        let mut down = vec![true];
        let mut pos = vec![usize::MAX; m.state_count()];
        pos[root] = 0;
        let mut i = 0;
        while i < order.len() {
            let s = order[i];
            for a in 0..m.action_count() {
                for (&t, dir) in m
                    .successors(a, s)
                    .iter()
                    .map(|t| (t, true))
                    .chain(m.predecessors(a, s).iter().map(|t| (t, false)))
                {
                    if pos[t] == usize::MAX {
                        pos[t] = order.len();
                        order.push(t);
                        parent.push(i);
                        action.push(a);
                        down.push(dir);
                    }
                }
            }
            i += 1;
        }
        let labels = order.iter().map(|&s| m.label(s)).collect();
        TreePlan { order, labels, parent, action, down, anchored }
    }

    pub(crate) fn count_u128(&self, t: &TargetIndex) -> Option<u128> {
        let cells = self.order.len() * t.n;
        if cells <= SMALL_TABLE {
            self.count_in(t, &mut [0u128; SMALL_TABLE][..cells])
        } else {
            self.count_in(t, &mut vec![0u128; cells])
        }
    }

    /// The dynamic program over a table of `order.len() × |t|` cells.
    fn count_in(&self, t: &TargetIndex, f: &mut [u128]) -> Option<u128> {
        let (k, n) = (self.order.len(), t.n);
        for i in 0..k {
            for s in 0..n {
                f[i * n + s] = u128::from(self.labels[i] & !t.labels[s] == 0);
            }
        }
        for i in (1..k).rev() {
            let p = self.parent[i];
            let adj = if self.down[i] { &t.succ[self.action[i]] } else { &t.pred[self.action[i]] };
            for s in 0..n {
                if f[p * n + s] == 0 {
                    continue;
                }
                let mut sum = 0u128;
                for &u in &adj[s] {
                    sum = sum.checked_add(f[i * n + u])?;
                }
                f[p * n + s] = f[p * n + s].checked_mul(sum)?;
            }
        }
        if self.anchored {
            Some(f[t.distinguished])
        } else {
            f[..n].iter().try_fold(0u128, |a, &x| a.checked_add(x))
        }
    }

    pub(crate) fn count_big(&self, t: &TargetIndex) -> BigUint {
        let k = self.order.len();
        let mut f: Vec<Vec<BigUint>> = (0..k)
            .map(|i| (0..t.n).map(|s| BigUint::from(u8::from(self.labels[i] & !t.labels[s] == 0))).collect())
            .collect();
        for i in (1..k).rev() {
            let p = self.parent[i];
            let adj = if self.down[i] { &t.succ[self.action[i]] } else { &t.pred[self.action[i]] };
            for s in 0..t.n {
                let sum: BigUint = adj[s].iter().map(|&u| &f[i][u]).sum();
                f[p][s] *= sum;
            }
        }
        if self.anchored {
            f[0][t.distinguished].clone()
        } else {
            f[0].iter().sum()
        }
    }
}

#[derive(Debug, Clone)]
enum ComponentPlan {
    Tree(TreePlan),
    Search(Plan),
}

/// A source structure compiled for repeated counting against many targets.
///
/// The count is the product over connected components: the distinguished
/// component is anchored, the others range freely. Acyclic components use a
/// dynamic program, the rest backtracking.
#[derive(Debug, Clone)]
pub struct HomCounter {
    components: Vec<ComponentPlan>,
    source_states: usize,
}

impl HomCounter {
    pub fn new(source: &PointedStructure) -> Self {
        let comps = connected_components(source);
        let components = comps
            .iter()
            .map(|block| {
                let anchored = block.contains(&source.distinguished());
                let start = if anchored { source.distinguished() } else { block[0] };
                let sub = source
                    .with_distinguished(start)
                    .and_then(|m| m.induced(block))
                    .expect("component contains its start");
                if is_acyclic(&sub) {
                    ComponentPlan::Tree(TreePlan::new(&sub, sub.distinguished(), anchored))
                } else {
                    ComponentPlan::Search(Plan::new(&sub, &sub.states().collect::<Vec<_>>(), sub.distinguished(), anchored))
                }
            })
            .collect();
        HomCounter { components, source_states: source.state_count() }
    }

    pub fn source_states(&self) -> usize {
        self.source_states
    }

    /// `|Hom(T, M)|` if it fits in a `u128`.
    pub fn count_u128(&self, t: &TargetIndex) -> Option<u128> {
        let mut total = 1u128;
        for c in &self.components {
            let x = match c {
                ComponentPlan::Tree(p) => p.count_u128(t)?,
                ComponentPlan::Search(p) => p.count_u128(t)?,
            };
            if x == 0 {
                return Some(0);
            }
            total = total.checked_mul(x)?;
        }
        Some(total)
    }

    pub fn count(&self, t: &TargetIndex) -> BigUint {
        if let Some(x) = self.count_u128(t) {
            return BigUint::from(x);
        }
        let mut total = BigUint::from(1u32);
        for c in &self.components {
            let x = match c {
                ComponentPlan::Tree(p) => p.count_big(t),
                ComponentPlan::Search(p) => p.count(t),
            };
            total *= x;
        }
        total
    }
}

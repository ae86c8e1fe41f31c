//! Canonical encodings: recursive tree codes, permutation-minimal bit codes for
//! small structures, unraveling codes and color refinement.

use std::collections::HashMap;
use std::hash::Hash;

use crate::structure::PointedStructure;

/// Largest state count for which [`canonical_code`] minimizes over permutations.
pub const MAX_CANONICAL_STATES: usize = 8;

/// Assigns consecutive ids to distinct keys.
#[derive(Debug, Clone)]
pub struct Interner<K> {
    ids: HashMap<K, u32>,
}

impl<K: Eq + Hash> Default for Interner<K> {
    fn default() -> Self {
        Interner { ids: HashMap::new() }
    }
}

impl<K: Eq + Hash> Interner<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, key: K) -> u32 {
        let next = self.ids.len() as u32;
        *self.ids.entry(key).or_insert(next)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Recursive code of the subtree below `node`, following successors only.
///
/// Meaningful when the part of `m` reachable from `node` is a tree; two trees
/// are isomorphic iff their root codes are equal.
pub fn tree_code_at(m: &PointedStructure, node: usize) -> String {
    let mut children: Vec<String> = Vec::new();
    for a in 0..m.action_count() {
        for &c in m.successors(a, node) {
            children.push(format!("{a}:{}", tree_code_at(m, c)));
        }
    }
    children.sort_unstable();
    format!("({:x}{})", m.label(node), children.concat())
}

/// Code of a tree-shaped structure from its distinguished state.
pub fn tree_code(m: &PointedStructure) -> String {
    tree_code_at(m, m.distinguished())
}

/// Number of bits used by [`encode`] for `n` states.
pub fn code_width(n: usize, props: usize, actions: usize) -> usize {
    n * props + actions * n * n
}

/// Packs labels and edges into a bit code after renaming states by `perm`.
///
/// Bit `s·|P| + p` is proposition `p` at state `s`; edges follow at
/// `n·|P| + a·n² + u·n + v`.
pub fn encode(m: &PointedStructure, perm: &[usize]) -> u128 {
    let n = m.state_count();
    let np = m.signature().props().len();
    let mut code = 0u128;
    for s in 0..n {
        code |= (m.label(s) as u128) << (perm[s] * np);
    }
    let base = n * np;
    for a in 0..m.action_count() {
        for &(u, v) in m.edges(a) {
            code |= 1u128 << (base + a * n * n + perm[u] * n + perm[v]);
        }
    }
    code
}

/// Calls `f` with every permutation of `0..n` that sends `fixed` to 0.
pub fn for_each_pointed_perm(n: usize, fixed: usize, mut f: impl FnMut(&[usize])) {
    let others: Vec<usize> = (0..n).filter(|&s| s != fixed).collect();
    let mut images: Vec<usize> = (1..n).collect();
    let mut perm = vec![0; n];
    loop {
        perm[fixed] = 0;
        for (i, &s) in others.iter().enumerate() {
            perm[s] = images[i];
        }
        f(&perm);
        if !next_permutation(&mut images) {
            break;
        }
    }
}

/// Lexicographic successor; returns false after the last permutation.
pub fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Minimum of [`encode`] over all renamings putting the distinguished state at 0.
///
/// Two structures over the same signature with equal state counts are
/// isomorphic iff their codes are equal. `None` above [`MAX_CANONICAL_STATES`]
/// states or when the code would not fit in 128 bits.
pub fn canonical_code(m: &PointedStructure) -> Option<u128> {
    let n = m.state_count();
    let sig = m.signature();
    if n > MAX_CANONICAL_STATES || code_width(n, sig.props().len(), sig.actions().len()) > 128 {
        return None;
    }
    let mut best = u128::MAX;
    for_each_pointed_perm(n, m.distinguished(), |perm| {
        best = best.min(encode(m, perm));
    });
    Some(best)
}

/// The renaming achieving [`canonical_code`], first in permutation order.
pub fn canonical_perm(m: &PointedStructure) -> Option<Vec<usize>> {
    let code = canonical_code(m)?;
    let mut found = None;
    for_each_pointed_perm(m.state_count(), m.distinguished(), |perm| {
        if found.is_none() && encode(m, perm) == code {
            found = Some(perm.to_vec());
        }
    });
    found
}

/// Canonical representative: the structure renamed by [`canonical_perm`].
pub fn canonical_form(m: &PointedStructure) -> Option<PointedStructure> {
    let perm = canonical_perm(m)?;
    Some(m.permuted(&perm).expect("permutation of a valid structure"))
}

/// Interned codes of bounded unravelings, shared across structures.
///
/// At level `k`, two states (of any structures fed to the same coder) receive
/// equal codes iff their depth-`k` unravelings are isomorphic.
#[derive(Debug, Default)]
pub struct UnravelCoder {
    table: Interner<(u64, Vec<(usize, u32)>)>,
}

impl UnravelCoder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Codes of every state at levels `0..=k`.
    pub fn levels(&mut self, m: &PointedStructure, k: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::with_capacity(k + 1);
        let mut cur: Vec<u32> = m.states().map(|s| self.table.intern((m.label(s), Vec::new()))).collect();
        out.push(cur.clone());
        for _ in 0..k {
            let next = m
                .states()
                .map(|s| {
                    let mut kids: Vec<(usize, u32)> = (0..m.action_count())
                        .flat_map(|a| m.successors(a, s).iter().map(move |&t| (a, t)))
                        .map(|(a, t)| (a, cur[t]))
                        .collect();
                    kids.sort_unstable();
                    self.table.intern((m.label(s), kids))
                })
                .collect();
            cur = next;
            out.push(cur.clone());
        }
        out
    }

    /// Code of the distinguished state's depth-`k` unraveling.
    pub fn code(&mut self, m: &PointedStructure, k: usize) -> u32 {
        self.levels(m, k)[k][m.distinguished()]
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

/// Stable color refinement over successors and predecessors.
///
/// Colors are ranks of sorted signatures, so they are invariant under
/// renaming. The distinguished states get their own initial color. Every
/// structure in `ms` is refined in a common color space.
pub fn refine_colors(ms: &[&PointedStructure]) -> Vec<Vec<u32>> {
    type Key = (u32, Vec<(usize, bool, u32)>);
    let initial: Vec<Vec<(u64, bool)>> = ms
        .iter()
        .map(|m| m.states().map(|s| (m.label(s), s == m.distinguished())).collect())
        .collect();
    let mut distinct: Vec<(u64, bool)> = initial.iter().flatten().copied().collect();
    distinct.sort_unstable();
    distinct.dedup();
    let mut colors: Vec<Vec<u32>> = initial
        .iter()
        .map(|row| {
            row.iter()
                .map(|k| distinct.binary_search(k).expect("present") as u32)
                .collect()
        })
        .collect();
    let mut classes = distinct.len();
    loop {
        let keys: Vec<Vec<Key>> = ms
            .iter()
            .zip(&colors)
            .map(|(m, col)| {
                m.states()
                    .map(|s| {
                        let mut nb = Vec::new();
                        for a in 0..m.action_count() {
                            nb.extend(m.successors(a, s).iter().map(|&t| (a, true, col[t])));
                            nb.extend(m.predecessors(a, s).iter().map(|&t| (a, false, col[t])));
                        }
                        nb.sort_unstable();
                        (col[s], nb)
                    })
                    .collect()
            })
            .collect();
        let mut distinct: Vec<&Key> = keys.iter().flatten().collect();
        distinct.sort_unstable();
        distinct.dedup();
        let next: Vec<Vec<u32>> = keys
            .iter()
            .map(|row| {
                row.iter()
                    .map(|k| distinct.binary_search(&k).expect("present") as u32)
                    .collect()
            })
            .collect();
        let count = distinct.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::Signature;

    fn chain(labels: &[u64]) -> PointedStructure {
        let mut b = PointedStructure::builder(Signature::standard(), labels.len());
        for i in 1..labels.len() {
            b = b.edge("R", i - 1, i);
        }
        let m = b.build().unwrap();
        PointedStructure::new(m.signature_arc().clone(), labels.to_vec(), m.all_edges().to_vec(), 0).unwrap()
    }

    #[test]
    fn permutations_cover_all_pointed_renamings() {
        let mut count = 0;
        for_each_pointed_perm(4, 2, |p| {
            assert_eq!(p[2], 0);
            count += 1;
        });
        assert_eq!(count, 6);
    }

    #[test]
    fn canonical_code_is_renaming_invariant() {
        let m = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 1, 0)
            .edge("R", 1, 2)
            .prop(2, "p")
            .point(1)
            .build()
            .unwrap();
        let code = canonical_code(&m).unwrap();
        for_each_pointed_perm(3, 0, |p| {
            let q: Vec<usize> = p.iter().map(|&x| (x + 1) % 3).collect();
            let renamed = m.permuted(&q).unwrap();
            assert_eq!(canonical_code(&renamed), Some(code));
        });
        let form = canonical_form(&m).unwrap();
        assert_eq!(form.distinguished(), 0);
        assert_eq!(encode(&form, &[0, 1, 2]), code);
    }

    #[test]
    fn tree_codes_ignore_child_order() {
        let a = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 0, 2)
            .prop(1, "p")
            .build()
            .unwrap();
        let b = PointedStructure::builder(Signature::standard(), 3)
            .edge("R", 0, 1)
            .edge("R", 0, 2)
            .prop(2, "p")
            .build()
            .unwrap();
        assert_eq!(tree_code(&a), tree_code(&b));
        assert_ne!(tree_code(&a), tree_code(&chain(&[0, 0, 1])));
    }

    #[test]
    fn unravel_codes_see_depth() {
        let lp = PointedStructure::builder(Signature::standard(), 1).edge("R", 0, 0).build().unwrap();
        let two = chain(&[0, 0]);
        let three = chain(&[0, 0, 0]);
        let mut coder = UnravelCoder::new();
        assert_eq!(coder.code(&lp, 1), coder.code(&two, 1));
        assert_ne!(coder.code(&lp, 2), coder.code(&two, 2));
        assert_eq!(coder.code(&lp, 2), coder.code(&three, 2));
    }

    #[test]
    fn refinement_separates_shapes() {
        let a = chain(&[0, 0, 0]);
        let b = chain(&[0, 0, 1]);
        let cols = refine_colors(&[&a, &b]);
        let mut ca = cols[0].clone();
        let mut cb = cols[1].clone();
        ca.sort();
        cb.sort();
        assert_ne!(ca, cb);
        let same = refine_colors(&[&a, &a]);
        assert_eq!(same[0], same[1]);
    }
}

//! Simulation and bisimulation relations as greatest fixpoints.

use std::str::FromStr;

use crate::structure::PointedStructure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimKind {
    /// Label inclusion and forth.
    Simulation,
    /// Label inclusion, forth and back.
    DirectedSimulation,
    /// Label equality, forth and back.
    Bisimulation,
}

impl FromStr for SimKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "simulation" | "sim" => SimKind::Simulation,
            "directed-simulation" | "directed" => SimKind::DirectedSimulation,
            "bisimulation" | "bisim" => SimKind::Bisimulation,
            other => return Err(format!("unknown simulation kind `{other}`")),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    /// Whether the two distinguished states are related.
    pub holds: bool,
    /// The greatest relation, sorted.
    pub relation: Vec<(usize, usize)>,
}

/// A relation `M × N` as one bitset row per state of `M`.
#[derive(Clone, PartialEq, Eq)]
struct Rel {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl Rel {
    fn get(&self, m: usize, n: usize) -> bool {
        self.rows[m][n / 64] >> (n % 64) & 1 == 1
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (m, row) in self.rows.iter().enumerate() {
            for n in 0..self.words * 64 {
                if row[n / 64] >> (n % 64) & 1 == 1 {
                    out.push((m, n));
                }
            }
        }
        out
    }
}

struct Sim<'a> {
    m: &'a PointedStructure,
    n: &'a PointedStructure,
    words: usize,
    /// `succ[a][y]`: successors of `y` in `N` as a bitset.
    succ: Vec<Vec<Vec<u64>>>,
}

impl<'a> Sim<'a> {
    fn new(m: &'a PointedStructure, n: &'a PointedStructure) -> Self {
        assert!(m.same_signature(n), "simulations need a common signature");
        let words = n.state_count().div_ceil(64).max(1);
        let succ = (0..n.action_count())
            .map(|a| {
                n.states()
                    .map(|y| {
                        let mut row = vec![0u64; words];
                        for &z in n.successors(a, y) {
                            row[z / 64] |= 1 << (z % 64);
                        }
                        row
                    })
                    .collect()
            })
            .collect();
        Sim { m, n, words, succ }
    }

    fn initial(&self, exact: bool) -> Rel {
        let rows = self
            .m
            .states()
            .map(|x| {
                let mut row = vec![0u64; self.words];
                let lx = self.m.label(x);
                for y in self.n.states() {
                    let ly = self.n.label(y);
                    if if exact { lx == ly } else { lx & ly == lx } {
                        row[y / 64] |= 1 << (y % 64);
                    }
                }
                row
            })
            .collect();
        Rel { words: self.words, rows }
    }

    fn forth(&self, z: &Rel, x: usize, y: usize) -> bool {
        (0..self.m.action_count()).all(|a| {
            self.m
                .successors(a, x)
                .iter()
                .all(|&x2| z.rows[x2].iter().zip(&self.succ[a][y]).any(|(r, s)| r & s != 0))
        })
    }

    fn back(&self, z: &Rel, x: usize, y: usize) -> bool {
        (0..self.m.action_count()).all(|a| {
            let mut img = vec![0u64; self.words];
            for &x2 in self.m.successors(a, x) {
                for (w, r) in img.iter_mut().zip(&z.rows[x2]) {
                    *w |= r;
                }
            }
            self.succ[a][y].iter().zip(&img).all(|(s, i)| s & !i == 0)
        })
    }

    /// Pairs of `base` whose forth (and back) conditions hold in `z`.
    fn step(&self, base: &Rel, z: &Rel, with_back: bool) -> Rel {
        let mut next = base.clone();
        for x in self.m.states() {
            for y in self.n.states() {
                if next.get(x, y) && !(self.forth(z, x, y) && (!with_back || self.back(z, x, y))) {
                    next.rows[x][y / 64] &= !(1 << (y % 64));
                }
            }
        }
        next
    }
}

/// Greatest relation of the given kind from `m` to `n`.
pub fn simulation_fixpoint(kind: SimKind, m: &PointedStructure, n: &PointedStructure) -> SimResult {
    let sim = Sim::new(m, n);
    let with_back = kind != SimKind::Simulation;
    let base = sim.initial(kind == SimKind::Bisimulation);
    let mut z = base.clone();
    loop {
        let mut next = sim.step(&base, &z, with_back);
        for (row, old) in next.rows.iter_mut().zip(&z.rows) {
            for (w, o) in row.iter_mut().zip(old) {
                *w &= o;
            }
        }
        if next == z {
            break;
        }
        z = next;
    }
    SimResult { holds: z.get(m.distinguished(), n.distinguished()), relation: z.pairs() }
}

/// `Z_0 = prop⁻`, `Z_{j+1} = Z_0 ∩ forth(Z_j)`; whether the points are in `Z_k`.
pub fn bounded_simulation(m: &PointedStructure, n: &PointedStructure, k: usize) -> bool {
    let sim = Sim::new(m, n);
    let base = sim.initial(false);
    let mut z = base.clone();
    for _ in 0..k {
        let next = sim.step(&base, &z, false);
        if next == z {
            break;
        }
        z = next;
    }
    z.get(m.distinguished(), n.distinguished())
}

pub fn bisimilar(m: &PointedStructure, n: &PointedStructure) -> bool {
    simulation_fixpoint(SimKind::Bisimulation, m, n).holds
}

pub fn mutually_similar(kind: SimKind, m: &PointedStructure, n: &PointedStructure) -> bool {
    simulation_fixpoint(kind, m, n).holds && simulation_fixpoint(kind, n, m).holds
}

pub fn mutually_bounded_similar(m: &PointedStructure, n: &PointedStructure, k: usize) -> bool {
    bounded_simulation(m, n, k) && bounded_simulation(n, m, k)
}

//! Built-in semirings, the counting map `count_S`, and periodicity analysis.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

/// Default probe length for [`Semiring::analyze_periodicity`].
pub const DEFAULT_PROBE: usize = 64;

/// A semiring element. Finite carriers use small naturals; `Inf` is the
/// additive identity of the min-plus semiring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Fin(BigUint),
    Inf,
}

impl Elem {
    pub fn small(n: u64) -> Self {
        Elem::Fin(BigUint::from(n))
    }

    pub fn as_u64(&self) -> Option<u64> {
        match self {
            Elem::Fin(n) => n.to_u64(),
            Elem::Inf => None,
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Fin(n) => write!(f, "{n}"),
            Elem::Inf => write!(f, "inf"),
        }
    }
}

impl Serialize for Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// The built-in semiring zoo.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Semiring {
    /// `({0,1}, ∨, ∧, 0, 1)`.
    Boolean,
    /// Unbounded naturals.
    Natural,
    /// Integers modulo `p` (`p ≥ 2`).
    ModP(u64),
    /// `({0..cap} ∪ {∞}, min, +, ∞, 0)` with sums clipped at `cap`.
    MinPlus { cap: u64 },
    /// The quotient of ℕ identifying `n` and `n + period` for `n ≥ threshold`.
    Truncated { threshold: u64, period: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemiringError {
    #[error("unknown semiring `{0}`; expected bool, nat, modp:<p>, minplus:<cap> or trunc:<L>:<P>")]
    Unknown(String),
    #[error("invalid semiring parameter in `{0}`")]
    BadParameter(String),
}

impl FromStr for Semiring {
    type Err = SemiringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| t.parse::<u64>().map_err(|_| SemiringError::BadParameter(s.to_string()));
        let sr = match parts.as_slice() {
            ["bool"] | ["boolean"] => Semiring::Boolean,
            ["nat"] | ["natural"] => Semiring::Natural,
            ["modp", p] => Semiring::ModP(num(p)?),
            ["minplus", cap] => Semiring::MinPlus { cap: num(cap)? },
            ["trunc", l, p] => Semiring::Truncated {
                threshold: num(l)?,
                period: num(p)?,
            },
            _ => return Err(SemiringError::Unknown(s.to_string())),
        };
        match sr {
            Semiring::ModP(p) if p < 2 => Err(SemiringError::BadParameter(s.to_string())),
            Semiring::Truncated { period: 0, .. } => Err(SemiringError::BadParameter(s.to_string())),
            _ => Ok(sr),
        }
    }
}

impl fmt::Display for Semiring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semiring::Boolean => write!(f, "bool"),
            Semiring::Natural => write!(f, "nat"),
            Semiring::ModP(p) => write!(f, "modp:{p}"),
            Semiring::MinPlus { cap } => write!(f, "minplus:{cap}"),
            Semiring::Truncated { threshold, period } => write!(f, "trunc:{threshold}:{period}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodicityReport {
    pub injective_up_to_probe: bool,
    /// Preperiod length `L` (0 when injective).
    pub l: usize,
    /// Period length `P` (0 when injective).
    pub p: usize,
    pub preperiod: Vec<Elem>,
    pub segment: Vec<Elem>,
    /// `count(n) = count(n + P)` was confirmed for every probed `n ≥ L`.
    pub verified: bool,
    pub probe: usize,
}

impl Semiring {
    pub fn zero(&self) -> Elem {
        match self {
            Semiring::MinPlus { .. } => Elem::Inf,
            _ => Elem::small(0),
        }
    }

    pub fn one(&self) -> Elem {
        match self {
            Semiring::MinPlus { .. } => Elem::small(0),
            _ => Elem::small(1),
        }
    }

    fn truncate(threshold: u64, period: u64, n: &BigUint) -> Elem {
        if *n < BigUint::from(threshold) {
            Elem::Fin(n.clone())
        } else {
            let r = (n - BigUint::from(threshold)) % BigUint::from(period);
            Elem::Fin(r + BigUint::from(threshold))
        }
    }

    fn fin<'a>(&self, x: &'a Elem) -> &'a BigUint {
        match x {
            Elem::Fin(n) => n,
            Elem::Inf => panic!("`inf` is not an element of {self}"),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match *self {
            Semiring::Boolean => Elem::small(u64::from(!self.fin(a).is_zero() || !self.fin(b).is_zero())),
            Semiring::Natural => Elem::Fin(self.fin(a) + self.fin(b)),
            Semiring::ModP(p) => Elem::Fin((self.fin(a) + self.fin(b)) % p),
            Semiring::MinPlus { .. } => match (a, b) {
                (Elem::Inf, x) | (x, Elem::Inf) => x.clone(),
                (Elem::Fin(x), Elem::Fin(y)) => Elem::Fin(x.min(y).clone()),
            },
            Semiring::Truncated { threshold, period } => {
                Self::truncate(threshold, period, &(self.fin(a) + self.fin(b)))
            }
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match *self {
            Semiring::Boolean => Elem::small(u64::from(!self.fin(a).is_zero() && !self.fin(b).is_zero())),
            Semiring::Natural => Elem::Fin(self.fin(a) * self.fin(b)),
            Semiring::ModP(p) => Elem::Fin((self.fin(a) * self.fin(b)) % p),
            Semiring::MinPlus { cap } => match (a, b) {
                (Elem::Inf, _) | (_, Elem::Inf) => Elem::Inf,
                (Elem::Fin(x), Elem::Fin(y)) => Elem::Fin((x + y).min(BigUint::from(cap))),
            },
            Semiring::Truncated { threshold, period } => {
                Self::truncate(threshold, period, &(self.fin(a) * self.fin(b)))
            }
        }
    }

    /// `count_S(n)`: the `n`-fold sum of `1_S`.
    pub fn count_in(&self, n: &BigUint) -> Elem {
        match *self {
            Semiring::Boolean => Elem::small(u64::from(!n.is_zero())),
            Semiring::Natural => Elem::Fin(n.clone()),
            Semiring::ModP(p) => Elem::Fin(n % p),
            Semiring::MinPlus { .. } => {
                if n.is_zero() {
                    Elem::Inf
                } else {
                    Elem::small(0)
                }
            }
            Semiring::Truncated { threshold, period } => Self::truncate(threshold, period, n),
        }
    }

    pub fn count_small(&self, n: u64) -> Elem {
        self.count_in(&BigUint::from(n))
    }

    /// `count_S(n)` by literally folding `add` over `n` copies of `1_S`.
    pub fn count_by_folding(&self, n: u64) -> Elem {
        let mut acc = self.zero();
        for _ in 0..n {
            acc = self.add(&acc, &self.one());
        }
        acc
    }

    /// The full carrier, if finite.
    pub fn carrier(&self) -> Option<Vec<Elem>> {
        match *self {
            Semiring::Boolean => Some(vec![Elem::small(0), Elem::small(1)]),
            Semiring::Natural => None,
            Semiring::ModP(p) => Some((0..p).map(Elem::small).collect()),
            Semiring::MinPlus { cap } => {
                let mut v: Vec<Elem> = (0..=cap).map(Elem::small).collect();
                v.push(Elem::Inf);
                Some(v)
            }
            Semiring::Truncated { threshold, period } => {
                Some((0..threshold + period).map(Elem::small).collect())
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Semiring::Natural)
    }

    /// Exhaustive check of the semiring axioms over a finite carrier.
    pub fn check_axioms(&self) -> Result<(), String> {
        let carrier = self
            .carrier()
            .ok_or_else(|| format!("{self} has an infinite carrier"))?;
        let (zero, one) = (self.zero(), self.one());
        for a in &carrier {
            if self.add(a, &zero) != *a {
                return Err(format!("{a} + 0 != {a}"));
            }
            if self.mul(a, &one) != *a || self.mul(&one, a) != *a {
                return Err(format!("{a} * 1 != {a}"));
            }
            if self.mul(a, &zero) != zero || self.mul(&zero, a) != zero {
                return Err(format!("0 does not annihilate {a}"));
            }
            for b in &carrier {
                if self.add(a, b) != self.add(b, a) {
                    return Err(format!("addition not commutative on {a}, {b}"));
                }
                for c in &carrier {
                    if self.add(&self.add(a, b), c) != self.add(a, &self.add(b, c)) {
                        return Err(format!("addition not associative on {a}, {b}, {c}"));
                    }
                    if self.mul(&self.mul(a, b), c) != self.mul(a, &self.mul(b, c)) {
                        return Err(format!("multiplication not associative on {a}, {b}, {c}"));
                    }
                    if self.mul(a, &self.add(b, c)) != self.add(&self.mul(a, b), &self.mul(a, c)) {
                        return Err(format!("left distributivity fails on {a}, {b}, {c}"));
                    }
                    if self.mul(&self.add(b, c), a) != self.add(&self.mul(b, a), &self.mul(c, a)) {
                        return Err(format!("right distributivity fails on {a}, {b}, {c}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Scans `count_S(0..)` for the first repeated value.
    ///
    /// Finite carriers are probed to at least `|carrier| + 1`, which always
    /// finds a repeat.
    pub fn analyze_periodicity(&self, probe: usize) -> PeriodicityReport {
        let probe = match self.carrier() {
            Some(c) => probe.max(c.len() + 1),
            None => probe,
        };
        let injective = PeriodicityReport {
            injective_up_to_probe: true,
            l: 0,
            p: 0,
            preperiod: Vec::new(),
            segment: Vec::new(),
            verified: true,
            probe,
        };
        if *self == Semiring::Natural {
            return injective;
        }
        let seq: Vec<Elem> = (0..=probe as u64).map(|n| self.count_by_folding(n)).collect();
        let mut first_seen = std::collections::HashMap::new();
        for (m, x) in seq.iter().enumerate() {
            if let Some(&l) = first_seen.get(x) {
                let p = m - l;
                let verified = (l..seq.len() - p).all(|n| seq[n] == seq[n + p]);
                return PeriodicityReport {
                    injective_up_to_probe: false,
                    l,
                    p,
                    preperiod: seq[..l].to_vec(),
                    segment: seq[l..m].to_vec(),
                    verified,
                    probe,
                };
            }
            first_seen.insert(x.clone(), m);
        }
        injective
    }
}

/// Which case of the impossibility argument applies to a counting sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeriodicCase {
    /// Counting is injective; periodicity does not apply.
    Injective,
    /// `0_S` lies in the periodic segment (purely periodic counting).
    ZeroInSegment,
    /// `1_S` starts the segment and the period is 1.
    OneInSegmentPeriodOne,
    /// `1_S` starts the segment and the period exceeds 1.
    OneInSegmentLongPeriod,
    /// `1_S` never recurs.
    OneNotInSegment,
}

impl PeriodicCase {
    pub fn of(s: &Semiring, report: &PeriodicityReport) -> Self {
        if report.injective_up_to_probe {
            PeriodicCase::Injective
        } else if report.segment.contains(&s.zero()) {
            PeriodicCase::ZeroInSegment
        } else if report.segment.contains(&s.one()) {
            if report.p == 1 {
                PeriodicCase::OneInSegmentPeriodOne
            } else {
                PeriodicCase::OneInSegmentLongPeriod
            }
        } else {
            PeriodicCase::OneNotInSegment
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PeriodicCase::Injective => "injective counting (Lovász regime)",
            PeriodicCase::ZeroInSegment => "(i) 0 in the periodic segment",
            PeriodicCase::OneInSegmentPeriodOne => "(ii)(a) 1 in the periodic segment, P = 1",
            PeriodicCase::OneInSegmentLongPeriod => "(ii)(b) 1 in the periodic segment, P > 1",
            PeriodicCase::OneNotInSegment => "(iii) 1 not in the periodic segment",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zoo() -> Vec<Semiring> {
        ["bool", "nat", "modp:2", "modp:3", "modp:5", "minplus:3", "trunc:1:2", "trunc:2:1", "trunc:3:4"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect()
    }

    #[test]
    fn selectors_parse() {
        assert_eq!("modp:7".parse::<Semiring>().unwrap(), Semiring::ModP(7));
        assert!("modp:1".parse::<Semiring>().is_err());
        assert!("trunc:1:0".parse::<Semiring>().is_err());
        assert!("tropical".parse::<Semiring>().is_err());
        for s in zoo() {
            assert_eq!(s.to_string().parse::<Semiring>().unwrap(), s);
        }
    }

    #[test]
    fn axioms_hold_on_finite_carriers() {
        for s in zoo().into_iter().filter(Semiring::is_finite) {
            s.check_axioms().unwrap_or_else(|e| panic!("{s}: {e}"));
        }
    }

    #[test]
    fn closed_form_counting_matches_folding() {
        for s in zoo() {
            for n in 0..40 {
                assert_eq!(s.count_small(n), s.count_by_folding(n), "{s} at {n}");
            }
        }
    }

    #[test]
    fn counting_examples() {
        assert_eq!(Semiring::Boolean.count_small(0), Elem::small(0));
        assert_eq!(Semiring::Natural.count_small(5), Elem::small(5));
        assert_eq!(Semiring::Boolean.count_small(3), Elem::small(1));
    }

    #[test]
    fn periodicity_examples() {
        let b = Semiring::Boolean.analyze_periodicity(10);
        assert_eq!((b.l, b.p), (1, 1));
        assert_eq!(b.preperiod, vec![Elem::small(0)]);
        assert_eq!(b.segment, vec![Elem::small(1)]);
        let m3 = Semiring::ModP(3).analyze_periodicity(10);
        assert_eq!((m3.l, m3.p), (0, 3));
        assert_eq!(m3.segment, vec![Elem::small(0), Elem::small(1), Elem::small(2)]);
        assert!(Semiring::Natural.analyze_periodicity(10).injective_up_to_probe);
    }

    #[test]
    fn case_analysis() {
        let case = |s: &str| {
            let s: Semiring = s.parse().unwrap();
            PeriodicCase::of(&s, &s.analyze_periodicity(DEFAULT_PROBE))
        };
        assert_eq!(case("nat"), PeriodicCase::Injective);
        assert_eq!(case("modp:3"), PeriodicCase::ZeroInSegment);
        assert_eq!(case("bool"), PeriodicCase::OneInSegmentPeriodOne);
        assert_eq!(case("minplus:4"), PeriodicCase::OneInSegmentPeriodOne);
        assert_eq!(case("trunc:1:2"), PeriodicCase::OneInSegmentLongPeriod);
        assert_eq!(case("trunc:2:1"), PeriodicCase::OneNotInSegment);
    }

    #[test]
    fn segments_are_disjoint_and_duplicate_free() {
        for s in zoo().into_iter().filter(Semiring::is_finite) {
            let r = s.analyze_periodicity(DEFAULT_PROBE);
            assert!(r.verified && !r.injective_up_to_probe, "{s}");
            let mut all = r.preperiod.clone();
            all.extend(r.segment.iter().cloned());
            let mut dedup = all.clone();
            dedup.sort();
            dedup.dedup();
            assert_eq!(dedup.len(), all.len(), "{s}");
        }
    }

    #[test]
    fn counting_is_additive() {
        for s in zoo() {
            for a in 0..12 {
                for b in 0..12 {
                    assert_eq!(s.count_small(a + b), s.add(&s.count_small(a), &s.count_small(b)));
                }
            }
        }
    }
}

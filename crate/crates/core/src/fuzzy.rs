//! Triangular fuzzy numbers and their α-cut representation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FuzzyError {
    #[error("triangular fuzzy number requires a <= b <= c, got ({a}, {b}, {c})")]
    InvalidTriangle { a: f64, b: f64, c: f64 },
    #[error("interval requires lo <= hi, got [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("alpha level {0} outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("alpha levels must start at 1 and strictly decrease: {0}")]
    InvalidLevels(String),
    #[error("level count {levels} does not match interval count {intervals}")]
    LengthMismatch { levels: usize, intervals: usize },
    #[error("alpha-cut at level index {level} is not contained in the next lower level")]
    NestingViolation { level: usize },
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FuzzyError> {
        if lo <= hi {
            Ok(Self { lo, hi })
        } else {
            Err(FuzzyError::InvalidInterval { lo, hi })
        }
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_value(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Triangular membership function with support `[a, c]` and peak `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct TriangularFuzzyNumber {
    a: f64,
    b: f64,
    c: f64,
}

impl TryFrom<[f64; 3]> for TriangularFuzzyNumber {
    type Error = FuzzyError;

    fn try_from([a, b, c]: [f64; 3]) -> Result<Self, Self::Error> {
        Self::new(a, b, c)
    }
}

impl From<TriangularFuzzyNumber> for [f64; 3] {
    fn from(t: TriangularFuzzyNumber) -> Self {
        [t.a, t.b, t.c]
    }
}

impl TriangularFuzzyNumber {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        if a <= b && b <= c {
            Ok(Self { a, b, c })
        } else {
            Err(FuzzyError::InvalidTriangle { a, b, c })
        }
    }

    pub fn crisp(b: f64) -> Self {
        Self { a: b, b, c: b }
    }

    /// Symmetric triangle `(center - half_width, center, center + half_width)`.
    pub fn symmetric(center: f64, half_width: f64) -> Result<Self, FuzzyError> {
        Self::new(center - half_width, center, center + half_width)
    }

    pub fn left(&self) -> f64 {
        self.a
    }

    pub fn peak(&self) -> f64 {
        self.b
    }

    pub fn right(&self) -> f64 {
        self.c
    }

    pub fn is_crisp(&self) -> bool {
        self.a == self.b && self.b == self.c
    }

    pub fn membership_at(&self, x: f64) -> f64 {
        if x == self.b {
            1.0
        } else if x <= self.a || x >= self.c {
            0.0
        } else if x < self.b {
            (x - self.a) / (self.b - self.a)
        } else {
            (self.c - x) / (self.c - self.b)
        }
    }

    pub fn alpha_cut(&self, alpha: f64) -> Result<Interval, FuzzyError> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(FuzzyError::AlphaOutOfRange(alpha));
        }
        let lo = self.a + alpha * (self.b - self.a);
        let hi = self.c - alpha * (self.c - self.b);
        // Rounding can push the two branches past each other at α = 1.
        Ok(Interval {
            lo: lo.min(self.b),
            hi: hi.max(self.b),
        })
    }

    pub fn to_stack(&self, levels: &[f64]) -> Result<AlphaCutStack, FuzzyError> {
        stack_from_tfn(self, levels)
    }
}

/// `m` uniformly spaced levels from 1 down to 0.
pub fn uniform_levels(m: usize) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![1.0],
        _ => (0..m)
            .map(|k| 1.0 - k as f64 / (m - 1) as f64)
            .collect(),
    }
}

fn validate_levels(levels: &[f64]) -> Result<(), FuzzyError> {
    if levels.first() != Some(&1.0) {
        return Err(FuzzyError::InvalidLevels(format!(
            "first level must be 1, got {:?}",
            levels.first()
        )));
    }
    for w in levels.windows(2) {
        if !(w[1] < w[0]) {
            return Err(FuzzyError::InvalidLevels(format!(
                "{} does not follow {} in descending order",
                w[1], w[0]
            )));
        }
    }
    if let Some(&last) = levels.last() {
        if last < 0.0 {
            return Err(FuzzyError::AlphaOutOfRange(last));
        }
    }
    Ok(())
}

/// Nested intervals indexed by descending α levels; `levels[0] == 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaCutStack {
    levels: Vec<f64>,
    intervals: Vec<Interval>,
}

impl AlphaCutStack {
    pub fn new(levels: Vec<f64>, intervals: Vec<Interval>) -> Result<Self, FuzzyError> {
        validate_levels(&levels)?;
        if levels.len() != intervals.len() {
            return Err(FuzzyError::LengthMismatch {
                levels: levels.len(),
                intervals: intervals.len(),
            });
        }
        for (k, iv) in intervals.iter().enumerate() {
            if !(iv.lo <= iv.hi) {
                return Err(FuzzyError::InvalidInterval { lo: iv.lo, hi: iv.hi });
            }
            if k + 1 < intervals.len() && !intervals[k + 1].contains(iv) {
                return Err(FuzzyError::NestingViolation { level: k });
            }
        }
        Ok(Self { levels, intervals })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Interval at the α = 1 level.
    pub fn core(&self) -> Interval {
        self.intervals[0]
    }

    /// Interval at the smallest α level.
    pub fn support(&self) -> Interval {
        self.intervals[self.intervals.len() - 1]
    }

    /// Applies a non-decreasing map to both bounds of every interval.
    pub fn map_monotone(&self, f: impl Fn(f64) -> f64) -> Result<AlphaCutStack, FuzzyError> {
        let intervals = self
            .intervals
            .iter()
            .map(|iv| Interval { lo: f(iv.lo), hi: f(iv.hi) })
            .collect();
        AlphaCutStack::new(self.levels.clone(), intervals)
    }

    pub fn to_membership(&self) -> Result<Vec<MembershipVertex>, FuzzyError> {
        stack_to_membership(self)
    }
}

pub fn stack_from_tfn(t: &TriangularFuzzyNumber, levels: &[f64]) -> Result<AlphaCutStack, FuzzyError> {
    validate_levels(levels)?;
    let intervals = levels
        .iter()
        .map(|&a| t.alpha_cut(a))
        .collect::<Result<Vec<_>, _>>()?;
    AlphaCutStack::new(levels.to_vec(), intervals)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipVertex {
    pub x: f64,
    pub mu: f64,
}

/// Piecewise-linear membership vertices: the left branch by ascending α,
/// then the right branch by descending α. Consecutive duplicates are dropped.
pub fn stack_to_membership(stack: &AlphaCutStack) -> Result<Vec<MembershipVertex>, FuzzyError> {
    // Re-validate: deserialized stacks bypass the constructor.
    let stack = AlphaCutStack::new(stack.levels.clone(), stack.intervals.clone())?;
    let mut out: Vec<MembershipVertex> = Vec::with_capacity(2 * stack.len());
    let mut push = |v: MembershipVertex| {
        if out.last() != Some(&v) {
            out.push(v);
        }
    };
    for (iv, &mu) in stack.intervals.iter().zip(&stack.levels).rev() {
        push(MembershipVertex { x: iv.lo, mu });
    }
    for (iv, &mu) in stack.intervals.iter().zip(&stack.levels) {
        push(MembershipVertex { x: iv.hi, mu });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tfn(a: f64, b: f64, c: f64) -> TriangularFuzzyNumber {
        TriangularFuzzyNumber::new(a, b, c).unwrap()
    }

    #[test]
    fn membership_examples() {
        let t = tfn(0.0, 1.0, 3.0);
        assert_eq!(t.membership_at(1.0), 1.0);
        assert_eq!(t.membership_at(-0.5), 0.0);
        assert_eq!(t.membership_at(2.0), 0.5);
        assert_eq!(t.membership_at(3.0), 0.0);
        assert_eq!(tfn(2.0, 2.0, 2.0).membership_at(2.0), 1.0);
    }

    #[test]
    fn alpha_cut_examples() {
        let t = tfn(0.0, 1.0, 3.0);
        assert_eq!(t.alpha_cut(1.0).unwrap(), Interval::point(1.0));
        assert_eq!(t.alpha_cut(0.0).unwrap(), Interval::new(0.0, 3.0).unwrap());
        assert_eq!(t.alpha_cut(0.5).unwrap(), Interval::new(0.5, 2.0).unwrap());
        assert_eq!(t.alpha_cut(1.5), Err(FuzzyError::AlphaOutOfRange(1.5)));
        assert_eq!(t.alpha_cut(-0.1), Err(FuzzyError::AlphaOutOfRange(-0.1)));
    }

    #[test]
    fn invalid_values_rejected() {
        assert!(TriangularFuzzyNumber::new(1.0, 0.0, 2.0).is_err());
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(serde_json::from_str::<TriangularFuzzyNumber>("[3, 2, 1]").is_err());
    }

    #[test]
    fn stacks_from_tfn() {
        let s = stack_from_tfn(&tfn(0.0, 1.0, 3.0), &[1.0, 0.5, 0.0]).unwrap();
        assert_eq!(
            s.intervals(),
            &[
                Interval::point(1.0),
                Interval::new(0.5, 2.0).unwrap(),
                Interval::new(0.0, 3.0).unwrap()
            ]
        );
        let levels = uniform_levels(10);
        let d = stack_from_tfn(&TriangularFuzzyNumber::crisp(4.2), &levels).unwrap();
        assert!(d.intervals().iter().all(|iv| *iv == Interval::point(4.2)));
        let sym = stack_from_tfn(&tfn(-1.0, 0.0, 1.0), &levels).unwrap();
        assert!(sym.intervals().iter().all(|iv| iv.lo == -iv.hi));
    }

    #[test]
    fn level_schedule_validation() {
        let t = tfn(0.0, 1.0, 3.0);
        assert!(stack_from_tfn(&t, &[0.5, 0.0]).is_err());
        assert!(stack_from_tfn(&t, &[1.0, 0.0, 0.5]).is_err());
        assert!(stack_from_tfn(&t, &[1.0, 0.5, 0.5]).is_err());
        let levels = uniform_levels(10);
        assert_eq!(levels.len(), 10);
        assert_eq!(levels[0], 1.0);
        assert_eq!(levels[9], 0.0);
        assert!((levels[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn nesting_violation_detected() {
        let levels = vec![1.0, 0.0];
        let bad = vec![Interval::new(0.0, 2.0).unwrap(), Interval::new(0.5, 3.0).unwrap()];
        assert_eq!(
            AlphaCutStack::new(levels, bad),
            Err(FuzzyError::NestingViolation { level: 0 })
        );
    }

    #[test]
    fn membership_round_trip_recovers_triangle_vertices() {
        let s = stack_from_tfn(&tfn(0.0, 1.0, 3.0), &[1.0, 0.5, 0.0]).unwrap();
        let v = stack_to_membership(&s).unwrap();
        assert_eq!(v.first(), Some(&MembershipVertex { x: 0.0, mu: 0.0 }));
        assert!(v.contains(&MembershipVertex { x: 1.0, mu: 1.0 }));
        assert_eq!(v.last(), Some(&MembershipVertex { x: 3.0, mu: 0.0 }));
    }

    #[test]
    fn ten_level_round_trip_is_exact() {
        let t = tfn(2.0, 4.0, 5.0);
        let s = stack_from_tfn(&t, &uniform_levels(10)).unwrap();
        let v = stack_to_membership(&s).unwrap();
        let worst = v
            .iter()
            .map(|p| (t.membership_at(p.x) - p.mu).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-15, "max deviation {worst}");
        // Rise then fall.
        let peak = v.iter().position(|p| p.mu == 1.0).unwrap();
        assert!(v[..=peak].windows(2).all(|w| w[0].mu <= w[1].mu && w[0].x <= w[1].x));
        assert!(v[peak..].windows(2).all(|w| w[0].mu >= w[1].mu && w[0].x <= w[1].x));
    }

    #[test]
    fn degenerate_stack_is_a_spike() {
        let s = stack_from_tfn(&TriangularFuzzyNumber::crisp(7.0), &[1.0, 0.5, 0.0]).unwrap();
        let v = stack_to_membership(&s).unwrap();
        assert!(v.iter().all(|p| p.x == 7.0));
        assert!(v.iter().any(|p| p.mu == 1.0));
    }
}

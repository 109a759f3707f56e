//! Dyadic intervals of `[0,1)` and functions constant on the cells of a
//! dyadic resolution level.
//!
//! A [`StepFunction`] at level `L` stores one value per cell
//! `[k 2^-L, (k+1) 2^-L)`. Binary operations on functions stored at different
//! levels refine the coarser operand first, so integrals stay exact cell sums.

use std::borrow::Cow;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finest resolution a step function may be stored at (`2^20` cells).
pub const MAX_LEVEL: u32 = 20;
/// Resolution used when callers do not pick one.
pub const DEFAULT_LEVEL: u32 = 8;

/// The half-open interval `[j 2^-n, (j+1) 2^-n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    level: u32,
    position: u64,
}

impl DyadicInterval {
    pub fn new(level: u32, position: u64) -> Result<Self> {
        if level > 63 {
            return Err(Error::LevelCap(level));
        }
        if position >= 1u64 << level {
            return Err(Error::BadPosition { level, position });
        }
        Ok(Self { level, position })
    }

    pub const fn root() -> Self {
        Self { level: 0, position: 0 }
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Lebesgue measure `2^-level`, exact in binary floating point.
    #[inline]
    pub fn measure(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    pub fn left_endpoint(&self) -> f64 {
        self.position as f64 * self.measure()
    }

    pub fn right_endpoint(&self) -> f64 {
        (self.position + 1) as f64 * self.measure()
    }

    pub fn left_child(&self) -> Self {
        Self { level: self.level + 1, position: 2 * self.position }
    }

    pub fn right_child(&self) -> Self {
        Self { level: self.level + 1, position: 2 * self.position + 1 }
    }

    pub fn children(&self) -> [Self; 2] {
        [self.left_child(), self.right_child()]
    }

    pub fn parent(&self) -> Option<Self> {
        (self.level > 0).then(|| Self { level: self.level - 1, position: self.position >> 1 })
    }

    /// `true` when `other ⊆ self`.
    pub fn contains(&self, other: &DyadicInterval) -> bool {
        other.level >= self.level && other.position >> (other.level - self.level) == self.position
    }

    /// The chain `self, parent, grandparent, ..., root`.
    pub fn ancestors(&self) -> impl Iterator<Item = DyadicInterval> {
        std::iter::successors(Some(*self), |i| i.parent())
    }

    /// Cell indices at `level` whose union is this interval.
    pub fn cells_of(&self, level: u32) -> Result<Range<usize>> {
        if self.level > level {
            return Err(Error::TooDeep { interval: *self, level });
        }
        let shift = level - self.level;
        let start = (self.position as usize) << shift;
        Ok(start..start + (1usize << shift))
    }

    /// All intervals at exactly `level`, left to right.
    pub fn at_level(level: u32) -> impl Iterator<Item = DyadicInterval> {
        (0..1u64 << level).map(move |position| DyadicInterval { level, position })
    }

    /// All intervals with level `0..=max_level`, coarse to fine.
    pub fn up_to(max_level: u32) -> impl Iterator<Item = DyadicInterval> {
        (0..=max_level).flat_map(Self::at_level)
    }

    /// Breadth-first index `2^n + j - 1`, so the root is 0.
    pub fn tree_index(&self) -> usize {
        (1usize << self.level) + self.position as usize - 1
    }

    pub fn from_tree_index(index: usize) -> Self {
        let k = index + 1;
        let level = usize::BITS - 1 - k.leading_zeros();
        Self { level, position: (k - (1usize << level)) as u64 }
    }
}

impl fmt::Display for DyadicInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.level, self.position)
    }
}

impl FromStr for DyadicInterval {
    type Err = Error;

    /// Parses the `"n:j"` key format used in serialized records.
    fn from_str(s: &str) -> Result<Self> {
        let (n, j) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected \"n:j\", got {s:?}")))?;
        let level = n.trim().parse().map_err(|_| Error::Parse(format!("bad level in {s:?}")))?;
        let position =
            j.trim().parse().map_err(|_| Error::Parse(format!("bad position in {s:?}")))?;
        Self::new(level, position)
    }
}

/// How a binary operation treats operands stored at different levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LevelPolicy {
    /// Refine the coarser operand to the finer level.
    #[default]
    Refine,
    /// Reject mismatched levels.
    Strict,
}

/// A function on `[0,1)` constant on each cell of level `level`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    level: u32,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct RawStepFunction {
    level: u32,
    values: Vec<f64>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::new(raw.level, raw.values)
    }
}

fn check_level(level: u32) -> Result<()> {
    if level > MAX_LEVEL {
        Err(Error::LevelCap(level))
    } else {
        Ok(())
    }
}

impl StepFunction {
    pub fn new(level: u32, values: Vec<f64>) -> Result<Self> {
        check_level(level)?;
        let expected = 1usize << level;
        if values.len() != expected {
            return Err(Error::LengthMismatch { expected, got: values.len() });
        }
        Ok(Self { level, values })
    }

    pub fn constant(level: u32, value: f64) -> Result<Self> {
        check_level(level)?;
        Ok(Self { level, values: vec![value; 1usize << level] })
    }

    pub fn from_fn(level: u32, f: impl FnMut(usize) -> f64) -> Result<Self> {
        check_level(level)?;
        Ok(Self { level, values: (0..1usize << level).map(f).collect() })
    }

    /// `χ_I` sampled at `level`.
    pub fn indicator(interval: &DyadicInterval, level: u32) -> Result<Self> {
        let cells = interval.cells_of(level)?;
        Self::from_fn(level, |k| if cells.contains(&k) { 1.0 } else { 0.0 })
    }

    #[inline]
    pub fn level(&self) -> u32 {
        self.level
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn cell_width(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// Value at `x`, or `None` outside `[0,1)`.
    pub fn evaluate(&self, x: f64) -> Option<f64> {
        if !(0.0..1.0).contains(&x) {
            return None;
        }
        let k = (x * self.len() as f64).floor() as usize;
        self.values.get(k.min(self.len() - 1)).copied()
    }

    /// The same function stored at a finer `level`.
    pub fn refine(&self, level: u32) -> Result<Self> {
        check_level(level)?;
        if level < self.level {
            return Err(Error::InvalidParameter(format!(
                "cannot refine level {} down to {level}",
                self.level
            )));
        }
        let repeat = 1usize << (level - self.level);
        let values = self
            .values
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, repeat))
            .collect();
        Ok(Self { level, values })
    }

    fn at_level(&self, level: u32) -> Cow<'_, Self> {
        if level == self.level {
            Cow::Borrowed(self)
        } else {
            // level >= self.level and <= MAX_LEVEL by construction at call sites
            Cow::Owned(self.refine(level).expect("refinement within cap"))
        }
    }

    pub fn integrate(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_width()
    }

    /// `∫_I f`.
    pub fn integrate_over(&self, interval: &DyadicInterval) -> Result<f64> {
        let cells = interval.cells_of(self.level)?;
        Ok(self.values[cells].iter().sum::<f64>() * self.cell_width())
    }

    /// `(∫ |f|^p ω)^{1/p}`.
    pub fn weighted_lp_norm(&self, p: f64, weight: &StepFunction) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::BadExponent(p));
        }
        if let Some((cell, &value)) =
            weight.values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::NonPositiveWeight { cell, value });
        }
        let level = self.level.max(weight.level);
        let f = self.at_level(level);
        let w = weight.at_level(level);
        let sum: f64 = if p == 2.0 {
            f.values.iter().zip(&w.values).map(|(v, w)| v * v * w).sum()
        } else if p == 1.0 {
            f.values.iter().zip(&w.values).map(|(v, w)| v.abs() * w).sum()
        } else {
            f.values.iter().zip(&w.values).map(|(v, w)| v.abs().powf(p) * w).sum()
        };
        Ok((sum * f.cell_width()).powf(1.0 / p))
    }

    /// Unweighted `L^p` norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        self.weighted_lp_norm(p, &StepFunction::constant(0, 1.0)?)
    }

    /// Cellwise `op(self, other)` at a common level.
    pub fn combine(
        &self,
        other: &StepFunction,
        policy: LevelPolicy,
        op: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if policy == LevelPolicy::Strict && self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let level = self.level.max(other.level);
        let a = self.at_level(level);
        let b = other.at_level(level);
        let values = a.values.iter().zip(&b.values).map(|(&x, &y)| op(x, y)).collect();
        Ok(Self { level, values })
    }

    pub fn add(&self, other: &StepFunction) -> Self {
        self.combine(other, LevelPolicy::Refine, |a, b| a + b).expect("refining add")
    }

    pub fn sub(&self, other: &StepFunction) -> Self {
        self.combine(other, LevelPolicy::Refine, |a, b| a - b).expect("refining sub")
    }

    pub fn multiply(&self, other: &StepFunction) -> Self {
        self.combine(other, LevelPolicy::Refine, |a, b| a * b).expect("refining multiply")
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `|f|^q` cellwise.
    pub fn abs_pow(&self, q: f64) -> Self {
        self.map(|v| v.abs().powf(q))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { level: self.level, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(n: u32, j: u64) -> DyadicInterval {
        DyadicInterval::new(n, j).unwrap()
    }

    #[test]
    fn cells_of_examples() {
        assert_eq!(iv(0, 0).cells_of(1).unwrap(), 0..2);
        assert_eq!(iv(1, 1).cells_of(2).unwrap(), 2..4);
        assert_eq!(iv(2, 3).cells_of(2).unwrap(), 3..4);
        assert!(matches!(iv(3, 0).cells_of(2), Err(Error::TooDeep { .. })));
    }

    #[test]
    fn cell_measures_add_up() {
        for interval in DyadicInterval::up_to(5) {
            for level in interval.level()..=8 {
                let cells = interval.cells_of(level).unwrap();
                let width = (-(level as f64)).exp2();
                let total: f64 = cells.map(|_| width).sum();
                assert_eq!(total, interval.measure());
            }
        }
    }

    #[test]
    fn tree_relations() {
        let i = iv(3, 5);
        assert_eq!(i.left_child(), iv(4, 10));
        assert_eq!(i.right_child(), iv(4, 11));
        assert_eq!(i.parent(), Some(iv(2, 2)));
        assert_eq!(DyadicInterval::root().parent(), None);
        assert!(iv(1, 1).contains(&iv(3, 5)));
        assert!(!iv(1, 0).contains(&iv(3, 5)));
        assert!(!iv(3, 5).contains(&iv(1, 1)));
        assert_eq!(i.ancestors().count(), 4);
        assert_eq!(i.left_endpoint(), 5.0 / 8.0);
        assert_eq!(i.right_endpoint(), 6.0 / 8.0);
        assert!(DyadicInterval::new(2, 4).is_err());
    }

    #[test]
    fn containment_matches_endpoints() {
        for a in DyadicInterval::up_to(4) {
            for b in DyadicInterval::up_to(4) {
                let by_endpoints = a.left_endpoint() <= b.left_endpoint()
                    && b.right_endpoint() <= a.right_endpoint();
                assert_eq!(a.contains(&b), by_endpoints, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn tree_index_round_trip() {
        for (k, interval) in DyadicInterval::up_to(6).enumerate() {
            assert_eq!(interval.tree_index(), k);
            assert_eq!(DyadicInterval::from_tree_index(k), interval);
        }
    }

    #[test]
    fn key_parsing() {
        assert_eq!("3:5".parse::<DyadicInterval>().unwrap(), iv(3, 5));
        assert_eq!(iv(3, 5).to_string(), "3:5");
        assert!("3-5".parse::<DyadicInterval>().is_err());
        assert!("1:2".parse::<DyadicInterval>().is_err());
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(StepFunction::constant(3, 1.0).unwrap().integrate(), 1.0);
        assert_eq!(StepFunction::new(1, vec![1.0, 0.0]).unwrap().integrate(), 0.5);
        assert_eq!(StepFunction::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap().integrate(), 2.5);
    }

    #[test]
    fn weighted_norm_examples() {
        let one = StepFunction::constant(0, 1.0).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0] {
            let c = StepFunction::constant(4, -3.25).unwrap();
            let n = c.weighted_lp_norm(p, &one).unwrap();
            assert!((n - 3.25).abs() < 1e-12);
        }
        let half = StepFunction::new(1, vec![1.0, 0.0]).unwrap();
        let two = StepFunction::constant(0, 2.0).unwrap();
        assert!((half.weighted_lp_norm(2.0, &two).unwrap() - 1.0).abs() < 1e-15);

        // H_I for I = (1,0): ±√2 on the two quarters of [0,1/2)
        let s = 2f64.sqrt();
        let h = StepFunction::new(2, vec![s, -s, 0.0, 0.0]).unwrap();
        let brute: f64 = h.values().iter().map(|v| v.abs().powi(4) * 0.25).sum::<f64>();
        let expected = brute.powf(0.25);
        assert!((h.weighted_lp_norm(4.0, &one).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn weighted_norm_rejects_bad_input() {
        let f = StepFunction::constant(2, 1.0).unwrap();
        let w = StepFunction::constant(2, 1.0).unwrap();
        assert!(matches!(f.weighted_lp_norm(0.5, &w), Err(Error::BadExponent(_))));
        let bad = StepFunction::new(1, vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            f.weighted_lp_norm(2.0, &bad),
            Err(Error::NonPositiveWeight { cell: 1, .. })
        ));
    }

    #[test]
    fn pointwise_examples() {
        let left = StepFunction::indicator(&iv(1, 0), 1).unwrap();
        let right = StepFunction::indicator(&iv(1, 1), 1).unwrap();
        assert_eq!(left.add(&right).values(), &[1.0, 1.0]);
        assert_eq!(StepFunction::constant(2, -2.0).unwrap().abs_pow(2.0).values(), &[4.0; 4]);
        let third = StepFunction::constant(1, 3.0).unwrap().scale(1.0 / 3.0);
        assert!(third.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn mixed_levels_refine_or_reject() {
        let coarse = StepFunction::new(1, vec![1.0, 2.0]).unwrap();
        let fine = StepFunction::new(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let sum = coarse.add(&fine);
        assert_eq!(sum.level(), 2);
        assert_eq!(sum.values(), &[2.0, 2.0, 3.0, 3.0]);
        assert!(matches!(
            coarse.combine(&fine, LevelPolicy::Strict, |a, b| a * b),
            Err(Error::LevelMismatch(1, 2))
        ));
    }

    #[test]
    fn evaluation_and_refinement() {
        let f = StepFunction::new(2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(f.evaluate(0.0), Some(1.0));
        assert_eq!(f.evaluate(0.6), Some(3.0));
        assert_eq!(f.evaluate(1.0), None);
        let g = f.refine(5).unwrap();
        for k in 0..100 {
            let x = k as f64 / 100.0;
            assert_eq!(f.evaluate(x), g.evaluate(x));
        }
        assert_eq!(f.integrate(), g.integrate());
        assert!(f.refine(1).is_err());
        assert!(f.refine(MAX_LEVEL + 1).is_err());
    }

    #[test]
    fn serde_validates_length() {
        let f: StepFunction = serde_json::from_str(r#"{"level":1,"values":[1.0,3.0]}"#).unwrap();
        assert_eq!(f.values(), &[1.0, 3.0]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"level":1,"values":[1.0,3.0]}"#);
        assert!(serde_json::from_str::<StepFunction>(r#"{"level":2,"values":[1.0]}"#).is_err());
    }
}

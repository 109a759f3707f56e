//! Haar analysis and synthesis on `[0,1)`, weighted coefficient norms, the
//! dyadic square function and the `X^p(ω)` norm it induces.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::{DyadicInterval, StepFunction};
use crate::error::{Error, Result};
use crate::sign::Sign;
use crate::weights::{DyadicWeight, MassTree};

/// Index of a Haar function: the constant function or an interval `H_I`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HaarIndex {
    Root,
    Interval(DyadicInterval),
}

impl HaarIndex {
    /// Position in the dense coefficient layout: `Root` is 0, interval
    /// `(n, j)` is `2^n + j`.
    pub fn linear(&self) -> usize {
        match self {
            HaarIndex::Root => 0,
            HaarIndex::Interval(i) => i.tree_index() + 1,
        }
    }

    pub fn from_linear(k: usize) -> Self {
        if k == 0 {
            HaarIndex::Root
        } else {
            HaarIndex::Interval(DyadicInterval::from_tree_index(k - 1))
        }
    }

    /// Support of the Haar function.
    pub fn support(&self) -> DyadicInterval {
        match self {
            HaarIndex::Root => DyadicInterval::root(),
            HaarIndex::Interval(i) => *i,
        }
    }

    pub fn interval(&self) -> Option<DyadicInterval> {
        match self {
            HaarIndex::Root => None,
            HaarIndex::Interval(i) => Some(*i),
        }
    }

    /// All indices representable at resolution `level`, in linear order.
    pub fn all(level: u32) -> impl Iterator<Item = HaarIndex> {
        (0..1usize << level).map(HaarIndex::from_linear)
    }

    fn check(&self, level: u32) -> Result<()> {
        match self {
            HaarIndex::Interval(i) if i.level() >= level => {
                Err(Error::TooDeep { interval: *i, level: level.saturating_sub(1) })
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for HaarIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HaarIndex::Root => f.write_str("root"),
            HaarIndex::Interval(i) => i.fmt(f),
        }
    }
}

impl FromStr for HaarIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "root" {
            Ok(HaarIndex::Root)
        } else {
            s.parse().map(HaarIndex::Interval)
        }
    }
}

/// `H_idx` as a step function at resolution `level`.
pub fn haar_function(index: HaarIndex, level: u32) -> Result<StepFunction> {
    index.check(level)?;
    match index {
        HaarIndex::Root => StepFunction::constant(level, 1.0),
        HaarIndex::Interval(i) => {
            let height = (i.level() as f64 / 2.0).exp2();
            let cells = i.cells_of(level)?;
            let mid = cells.start + cells.len() / 2;
            StepFunction::from_fn(level, |k| {
                if k < cells.start || k >= cells.end {
                    0.0
                } else if k < mid {
                    height
                } else {
                    -height
                }
            })
        }
    }
}

/// Coefficients `c_idx = <f, H_idx>` of a function at resolution `level`,
/// stored densely in [`HaarIndex::linear`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarExpansion {
    level: u32,
    coeffs: Vec<f64>,
}

impl HaarExpansion {
    pub fn zeros(level: u32) -> Result<Self> {
        if level > crate::dyadic::MAX_LEVEL {
            return Err(Error::LevelCap(level));
        }
        Ok(Self { level, coeffs: vec![0.0; 1usize << level] })
    }

    pub fn from_dense(level: u32, coeffs: Vec<f64>) -> Result<Self> {
        if level > crate::dyadic::MAX_LEVEL {
            return Err(Error::LevelCap(level));
        }
        if coeffs.len() != 1usize << level {
            return Err(Error::LengthMismatch { expected: 1usize << level, got: coeffs.len() });
        }
        Ok(Self { level, coeffs })
    }

    pub fn from_entries(
        level: u32,
        entries: impl IntoIterator<Item = (HaarIndex, f64)>,
    ) -> Result<Self> {
        let mut e = Self::zeros(level)?;
        for (index, c) in entries {
            e.set(index, c)?;
        }
        Ok(e)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dense(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn get(&self, index: HaarIndex) -> f64 {
        self.coeffs.get(index.linear()).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, index: HaarIndex, value: f64) -> Result<()> {
        index.check(self.level)?;
        self.coeffs[index.linear()] = value;
        Ok(())
    }

    /// Nonzero entries in linear order.
    pub fn iter(&self) -> impl Iterator<Item = (HaarIndex, f64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, &c)| (HaarIndex::from_linear(k), c))
    }
}

impl Serialize for HaarExpansion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Record {
            level: u32,
            coeffs: BTreeMap<String, f64>,
        }
        Record {
            level: self.level,
            coeffs: self.iter().map(|(i, c)| (i.to_string(), c)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HaarExpansion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Record {
            level: u32,
            coeffs: BTreeMap<String, f64>,
        }
        let record = Record::deserialize(deserializer)?;
        let mut e = HaarExpansion::zeros(record.level).map_err(D::Error::custom)?;
        for (key, c) in record.coeffs {
            let index: HaarIndex = key.parse().map_err(D::Error::custom)?;
            e.set(index, c).map_err(D::Error::custom)?;
        }
        Ok(e)
    }
}

/// Fast Haar transform: `c_I = 2^{n/2} (∫_{I_left} f - ∫_{I_right} f)`.
pub fn analyze(f: &StepFunction) -> HaarExpansion {
    let level = f.level();
    let masses = MassTree::from_step(f);
    let mut coeffs = vec![0.0; 1usize << level];
    coeffs[0] = masses.get(&DyadicInterval::root());
    if level > 0 {
        for i in DyadicInterval::up_to(level - 1) {
            let height = (i.level() as f64 / 2.0).exp2();
            coeffs[i.tree_index() + 1] =
                height * (masses.get(&i.left_child()) - masses.get(&i.right_child()));
        }
    }
    HaarExpansion { level, coeffs }
}

/// Inverse transform: `c_root + Σ_I c_I H_I` at the expansion's level.
pub fn synthesize(e: &HaarExpansion) -> StepFunction {
    let level = e.level;
    // values of the partial sum on intervals of the current level
    let mut current = vec![e.coeffs[0]];
    for n in 0..level {
        let height = (n as f64 / 2.0).exp2();
        let offset = 1usize << n;
        let mut next = Vec::with_capacity(current.len() * 2);
        for (j, v) in current.iter().enumerate() {
            let c = e.coeffs[offset + j] * height;
            next.push(v + c);
            next.push(v - c);
        }
        current = next;
    }
    StepFunction::new(level, current).expect("synthesis length")
}

/// `‖H_idx‖_{p,ω} = ω(I)^{1/p} / |I|^{1/2}`.
pub fn haar_norm(index: HaarIndex, p: f64, weight: &DyadicWeight) -> Result<f64> {
    check_p(p)?;
    let support = index.support();
    let scale = match index {
        HaarIndex::Root => 1.0,
        HaarIndex::Interval(i) => i.measure().sqrt(),
    };
    Ok(weight.mass(&support)?.powf(1.0 / p) / scale)
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        Err(Error::BadExponent(p))
    } else {
        Ok(())
    }
}

/// `c_idx(f, p, ω) = ‖c_idx H_idx‖_{p,ω}`.
pub fn coefficient_weighted_norm(
    e: &HaarExpansion,
    index: HaarIndex,
    p: f64,
    weight: &DyadicWeight,
) -> Result<f64> {
    index.check(e.level)?;
    Ok(e.get(index).abs() * haar_norm(index, p, weight)?)
}

/// `S(x) = (c_root^2 + Σ_I c_I^2 χ_I(x)/|I|)^{1/2}`.
pub fn square_function(e: &HaarExpansion) -> StepFunction {
    let level = e.level;
    let mut current = vec![e.coeffs[0] * e.coeffs[0]];
    for n in 0..level {
        let inv_measure = (n as f64).exp2();
        let offset = 1usize << n;
        let mut next = Vec::with_capacity(current.len() * 2);
        for (j, v) in current.iter().enumerate() {
            let c = e.coeffs[offset + j];
            let s = v + c * c * inv_measure;
            next.push(s);
            next.push(s);
        }
        current = next;
    }
    StepFunction::new(level, current).expect("square function length").map(f64::sqrt)
}

/// `‖f‖_{X^p(ω)} = ‖S f‖_{p,ω}`.
pub fn xp_norm(e: &HaarExpansion, p: f64, weight: &DyadicWeight) -> Result<f64> {
    square_function(e).weighted_lp_norm(p, weight.base())
}

/// The expansion `Σ_{idx ∈ Λ} η_idx H_idx / ‖H_idx‖_{p,ω}`.
pub fn signed_indicator(
    indices: &[HaarIndex],
    signs: &[Sign],
    p: f64,
    weight: &DyadicWeight,
    level: u32,
) -> Result<HaarExpansion> {
    if indices.len() != signs.len() {
        return Err(Error::LengthMismatch { expected: indices.len(), got: signs.len() });
    }
    let mut e = HaarExpansion::zeros(level)?;
    for (&index, &sign) in indices.iter().zip(signs) {
        e.set(index, sign.value() / haar_norm(index, p, weight)?)?;
    }
    Ok(e)
}

/// `‖Σ_{idx ∈ Λ} η_idx H_idx / ‖H_idx‖_{p,ω}‖_{X^p(ω)}`; the value does not
/// depend on the signs. `signs` may be empty, meaning all `+1`.
pub fn indicator_sum_norm(
    indices: &[HaarIndex],
    signs: &[Sign],
    p: f64,
    weight: &DyadicWeight,
    level: u32,
) -> Result<f64> {
    let plus;
    let signs = if signs.is_empty() {
        plus = vec![Sign::Plus; indices.len()];
        &plus
    } else {
        signs
    };
    xp_norm(&signed_indicator(indices, signs, p, weight, level)?, p, weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn iv(n: u32, j: u64) -> HaarIndex {
        HaarIndex::Interval(DyadicInterval::new(n, j).unwrap())
    }

    fn random_step(level: u32, rng: &mut impl Rng) -> StepFunction {
        StepFunction::from_fn(level, |_| rng.gen_range(-1.0..1.0)).unwrap()
    }

    #[test]
    fn haar_function_examples() {
        assert_eq!(haar_function(HaarIndex::Root, 1).unwrap().values(), &[1.0, 1.0]);
        assert_eq!(haar_function(iv(0, 0), 1).unwrap().values(), &[1.0, -1.0]);
        let s = 2f64.sqrt();
        assert_eq!(haar_function(iv(1, 0), 2).unwrap().values(), &[s, -s, 0.0, 0.0]);
        assert!(haar_function(iv(2, 0), 2).is_err());
    }

    #[test]
    fn haar_system_is_orthonormal() {
        let level = 4;
        let fs: Vec<_> = HaarIndex::all(level).map(|i| haar_function(i, level).unwrap()).collect();
        for (a, fa) in fs.iter().enumerate() {
            for (b, fb) in fs.iter().enumerate() {
                let ip = fa.multiply(fb).integrate();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analyze_examples() {
        let e = analyze(&StepFunction::constant(3, 1.0).unwrap());
        assert_eq!(e.get(HaarIndex::Root), 1.0);
        assert!(e.dense()[1..].iter().all(|&c| c == 0.0));

        let e = analyze(&haar_function(iv(2, 1), 4).unwrap());
        for (k, &c) in e.dense().iter().enumerate() {
            let expected = if HaarIndex::from_linear(k) == iv(2, 1) { 1.0 } else { 0.0 };
            assert!((c - expected).abs() < 1e-14);
        }

        let e = analyze(&StepFunction::new(1, vec![1.0, 0.0]).unwrap());
        assert_eq!(e.dense(), &[0.5, 0.5]);
        assert_eq!(e.dense().len(), 2);
    }

    #[test]
    fn analyze_matches_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_step(5, &mut rng);
        let e = analyze(&f);
        for index in HaarIndex::all(5) {
            let direct = f.multiply(&haar_function(index, 5).unwrap()).integrate();
            assert!((e.get(index) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for level in [0, 1, 3, 6] {
            let f = random_step(level, &mut rng);
            let g = synthesize(&analyze(&f));
            for (a, b) in f.values().iter().zip(g.values()) {
                assert!((a - b).abs() < 1e-12);
            }
            let e = HaarExpansion::from_dense(level, (0..1 << level).map(|k| k as f64 - 3.0).collect())
                .unwrap();
            let back = analyze(&synthesize(&e));
            for (a, b) in e.dense().iter().zip(back.dense()) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn weighted_coefficient_norm() {
        let one = DyadicWeight::lebesgue(4);
        let e = HaarExpansion::from_entries(4, [(iv(2, 1), -3.0), (HaarIndex::Root, 2.0)]).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0] {
            let c = coefficient_weighted_norm(&e, iv(2, 1), p, &one).unwrap();
            assert!((c - 3.0 * 0.25f64.powf(1.0 / p - 0.5)).abs() < 1e-13);
            assert_eq!(coefficient_weighted_norm(&e, iv(1, 0), p, &one).unwrap(), 0.0);
        }
        assert!((coefficient_weighted_norm(&e, iv(2, 1), 2.0, &one).unwrap() - 3.0).abs() < 1e-14);
        assert_eq!(coefficient_weighted_norm(&e, HaarIndex::Root, 2.0, &one).unwrap(), 2.0);

        // against the literal definition ‖c H_I‖_{p,ω}
        let w = DyadicWeight::log_uniform(4, 1.0, 8).unwrap();
        for p in [1.0, 2.5] {
            let literal =
                haar_function(iv(2, 1), 4).unwrap().scale(-3.0).weighted_lp_norm(p, w.base()).unwrap();
            let c = coefficient_weighted_norm(&e, iv(2, 1), p, &w).unwrap();
            assert!((literal - c).abs() < 1e-12 * c);
        }
        assert!(coefficient_weighted_norm(&e, iv(2, 1), 0.5, &one).is_err());
    }

    #[test]
    fn square_function_examples() {
        let root = HaarExpansion::from_entries(3, [(HaarIndex::Root, 1.0)]).unwrap();
        assert!(square_function(&root).values().iter().all(|&v| v == 1.0));
        let top = HaarExpansion::from_entries(3, [(iv(0, 0), 1.0)]).unwrap();
        assert!(square_function(&top).values().iter().all(|&v| v == 1.0));
        let halves = HaarExpansion::from_entries(3, [(iv(1, 0), 1.0), (iv(1, 1), 1.0)]).unwrap();
        let s = 2f64.sqrt();
        assert!(square_function(&halves).values().iter().all(|&v| (v - s).abs() < 1e-15));
    }

    #[test]
    fn square_function_matches_literal_formula() {
        // normalize each term by ‖H_I‖_{p,ω}, rescale by c_I(f,p,ω), square, sum
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let level = 5;
        for trial in 0..20 {
            let w = DyadicWeight::log_uniform(level, 1.0, trial).unwrap();
            let p = [1.2, 2.0, 3.5][trial as usize % 3];
            let e = analyze(&random_step(level, &mut rng));
            let mut acc = StepFunction::constant(level, 0.0).unwrap();
            for index in HaarIndex::all(level) {
                let h = haar_function(index, level).unwrap();
                let hn = h.weighted_lp_norm(p, w.base()).unwrap();
                let cn = coefficient_weighted_norm(&e, index, p, &w).unwrap();
                acc = acc.add(&h.scale(cn / hn).abs_pow(2.0));
            }
            let literal = acc.map(f64::sqrt);
            for (a, b) in literal.values().iter().zip(square_function(&e).values()) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
    }

    #[test]
    fn xp_norm_single_term_and_signs() {
        let w = DyadicWeight::log_uniform(4, 1.0, 2).unwrap();
        let e = HaarExpansion::from_entries(4, [(iv(2, 3), 1.7)]).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let x = xp_norm(&e, p, &w).unwrap();
            let c = coefficient_weighted_norm(&e, iv(2, 3), p, &w).unwrap();
            assert!((x - c).abs() < 1e-12 * c);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let e = analyze(&random_step(4, &mut rng));
        let mut flipped = e.clone();
        for k in (0..16).step_by(3) {
            let i = HaarIndex::from_linear(k);
            flipped.set(i, -e.get(i)).unwrap();
        }
        let a = xp_norm(&e, 3.0, &w).unwrap();
        let b = xp_norm(&flipped, 3.0, &w).unwrap();
        assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn indicator_norm_examples() {
        let one = DyadicWeight::lebesgue(5);
        assert!((indicator_sum_norm(&[HaarIndex::Root], &[], 3.0, &one, 5).unwrap() - 1.0).abs() < 1e-14);
        let nested = [HaarIndex::Root, iv(0, 0), iv(1, 1), iv(3, 2), iv(4, 9)];
        let n = indicator_sum_norm(&nested, &[], 2.0, &one, 5).unwrap();
        assert!((n - 5f64.sqrt()).abs() < 1e-12);
        let signs = [Sign::Minus, Sign::Plus, Sign::Minus, Sign::Minus, Sign::Plus];
        for p in [1.5, 3.0] {
            let a = indicator_sum_norm(&nested, &[], p, &one, 5).unwrap();
            let b = indicator_sum_norm(&nested, &signs, p, &one, 5).unwrap();
            assert!((a - b).abs() < 1e-13 * a);
        }
        assert!(indicator_sum_norm(&nested, &signs[..2], 2.0, &one, 5).is_err());
    }

    #[test]
    fn expansion_serialization() {
        let e = HaarExpansion::from_entries(2, [(HaarIndex::Root, 1.5), (iv(1, 1), -2.0)]).unwrap();
        let text = serde_json::to_string(&e).unwrap();
        assert_eq!(text, r#"{"level":2,"coeffs":{"1:1":-2.0,"root":1.5}}"#);
        let back: HaarExpansion = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<HaarExpansion>(r#"{"level":2,"coeffs":{"2:0":1.0}}"#).is_err());
    }
}

//! Dyadic weights and the conditions measured on them: the dyadic `A_p`
//! characteristic, reverse doubling, the reverse Carleson condition, and its
//! two-sequence form (α-DRCC).
//!
//! Every supremum over dyadic intervals is truncated at an explicit level and
//! returned as a [`LevelConstant`] carrying that level and the maximizing
//! interval.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic::{DyadicInterval, StepFunction};
use crate::error::{Error, Result};

/// A strictly positive step function used as a measure density on `[0,1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunction", into = "StepFunction")]
pub struct DyadicWeight {
    base: StepFunction,
}

impl TryFrom<StepFunction> for DyadicWeight {
    type Error = Error;

    fn try_from(base: StepFunction) -> Result<Self> {
        DyadicWeight::new(base)
    }
}

impl From<DyadicWeight> for StepFunction {
    fn from(w: DyadicWeight) -> Self {
        w.base
    }
}

impl DyadicWeight {
    pub fn new(base: StepFunction) -> Result<Self> {
        if let Some((cell, &value)) =
            base.values().iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::NonPositiveWeight { cell, value });
        }
        Ok(Self { base })
    }

    pub fn constant(level: u32, value: f64) -> Result<Self> {
        Self::new(StepFunction::constant(level, value)?)
    }

    /// Lebesgue measure on `[0,1)`.
    pub fn lebesgue(level: u32) -> Self {
        Self::constant(level, 1.0).expect("unit weight")
    }

    /// Cell values i.i.d. log-uniform on `[e^-spread, e^spread]`.
    pub fn log_uniform(level: u32, spread: f64, seed: u64) -> Result<Self> {
        if !(spread >= 0.0) || !spread.is_finite() {
            return Err(Error::InvalidParameter(format!("spread must be >= 0, got {spread}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new(StepFunction::from_fn(level, |_| rng.gen_range(-spread..=spread).exp())?)
    }

    /// `x^exponent` sampled at cell midpoints. The first cell's midpoint is
    /// `2^{-level-1}`, which keeps negative exponents finite.
    pub fn power_like(level: u32, exponent: f64) -> Result<Self> {
        let width = (-(level as f64)).exp2();
        Self::new(StepFunction::from_fn(level, |k| ((k as f64 + 0.5) * width).powf(exponent))?)
    }

    /// Unit density plus a point-like mass `mass` on the first cell. Every
    /// interval `[0, 2^-n)` keeps roughly the same mass, so ancestor sums in
    /// the reverse Carleson condition grow linearly with depth.
    pub fn concentrated(level: u32, mass: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        let cells = (level as f64).exp2();
        Self::new(StepFunction::from_fn(level, |k| if k == 0 { 1.0 + mass * cells } else { 1.0 })?)
    }

    pub fn base(&self) -> &StepFunction {
        &self.base
    }

    pub fn level(&self) -> u32 {
        self.base.level()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.base.scale(c))
    }

    /// `ω(I) = ∫_I ω`.
    pub fn mass(&self, interval: &DyadicInterval) -> Result<f64> {
        self.base.integrate_over(interval)
    }

    /// `m_I(ω) = ω(I)/|I|`.
    pub fn mean(&self, interval: &DyadicInterval) -> Result<f64> {
        Ok(self.mass(interval)? / interval.measure())
    }

    /// Masses of every dyadic interval down to the weight's own resolution.
    pub fn masses(&self) -> MassTree {
        MassTree::from_step(&self.base)
    }

    fn check_depth(&self, level: u32) -> Result<()> {
        if level > self.level() {
            let deepest = DyadicInterval::at_level(level).next().expect("nonempty level");
            return Err(Error::TooDeep { interval: deepest, level: self.level() });
        }
        Ok(())
    }
}

/// `∫_I f` for every dyadic `I` down to the function's resolution, stored in
/// breadth-first order.
#[derive(Debug, Clone)]
pub struct MassTree {
    level: u32,
    masses: Vec<f64>,
}

impl MassTree {
    pub fn from_step(f: &StepFunction) -> Self {
        let level = f.level();
        let width = f.cell_width();
        let total = (2usize << level) - 1;
        let mut masses = vec![0.0; total];
        let leaf_start = (1usize << level) - 1;
        for (slot, v) in masses[leaf_start..].iter_mut().zip(f.values()) {
            *slot = v * width;
        }
        for k in (0..leaf_start).rev() {
            masses[k] = masses[2 * k + 1] + masses[2 * k + 2];
        }
        Self { level, masses }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn get(&self, interval: &DyadicInterval) -> f64 {
        self.masses[interval.tree_index()]
    }
}

/// A truncated supremum over dyadic intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelConstant {
    pub value: f64,
    /// Deepest interval level included in the supremum.
    pub level: u32,
    /// Interval attaining the maximum.
    pub argmax: DyadicInterval,
}

fn max_over<I>(intervals: I, level: u32, mut f: impl FnMut(&DyadicInterval) -> f64) -> LevelConstant
where
    I: IntoIterator<Item = DyadicInterval>,
{
    let mut best =
        LevelConstant { value: f64::NEG_INFINITY, level, argmax: DyadicInterval::root() };
    for interval in intervals {
        let value = f(&interval);
        if value > best.value {
            best.value = value;
            best.argmax = interval;
        }
    }
    best
}

/// `ω(I)` for a single interval.
pub fn weight_of_interval(weight: &DyadicWeight, interval: &DyadicInterval) -> Result<f64> {
    weight.mass(interval)
}

/// Dyadic `A_p` characteristic `sup_I m_I(ω) m_I(ω^{-1/(p-1)})^{p-1}` over
/// intervals of level `<= level`.
pub fn apd_constant(weight: &DyadicWeight, p: f64, level: u32) -> Result<LevelConstant> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::BadExponent(p));
    }
    weight.check_depth(level)?;
    let q = -1.0 / (p - 1.0);
    let dual = weight.base.map(|v| v.powf(q));
    let direct = weight.masses();
    let dual = MassTree::from_step(&dual);
    Ok(max_over(DyadicInterval::up_to(level), level, |i| {
        let m = i.measure();
        (direct.get(i) / m) * (dual.get(i) / m).powf(p - 1.0)
    }))
}

/// Largest child-to-parent mass ratio `ω(I')/ω(I)` over parents of level
/// `<= level - 1`. Reverse doubling holds (at this truncation) iff the value
/// is below 1.
pub fn reverse_doubling_delta(weight: &DyadicWeight, level: u32) -> Result<LevelConstant> {
    if level == 0 {
        return Err(Error::InvalidParameter("reverse doubling needs level >= 1".into()));
    }
    weight.check_depth(level)?;
    let masses = weight.masses();
    let mut best = max_over(DyadicInterval::up_to(level - 1), level, |i| {
        let parent = masses.get(i);
        masses.get(&i.left_child()).max(masses.get(&i.right_child())) / parent
    });
    // report the child that realizes the ratio
    let [l, r] = best.argmax.children();
    best.argmax = if masses.get(&l) >= masses.get(&r) { l } else { r };
    Ok(best)
}

/// Sum `Σ_{I ⊇ J} a_I^{-α}` along every ancestor chain, evaluated top-down.
fn chain_sums(level: u32, alpha: f64, base: impl Fn(&DyadicInterval) -> f64) -> Vec<f64> {
    let mut sums = vec![0.0; (2usize << level) - 1];
    for interval in DyadicInterval::up_to(level) {
        let own = base(&interval).powf(-alpha);
        let above = interval.parent().map_or(0.0, |p| sums[p.tree_index()]);
        sums[interval.tree_index()] = above + own;
    }
    sums
}

/// Reverse Carleson constant of order `alpha`:
/// `max_J ω(J)^α Σ_{I ⊇ J} ω(I)^{-α}` over `J` of level `<= level`.
pub fn carleson_constant(weight: &DyadicWeight, alpha: f64, level: u32) -> Result<LevelConstant> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    weight.check_depth(level)?;
    let masses = weight.masses();
    let sums = chain_sums(level, alpha, |i| masses.get(i));
    Ok(max_over(DyadicInterval::up_to(level), level, |j| {
        masses.get(j).powf(alpha) * sums[j.tree_index()]
    }))
}

/// A positive sequence indexed by every dyadic interval of level `0..=level`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexedSequence {
    level: u32,
    values: Vec<f64>,
}

impl IndexedSequence {
    pub fn from_fn(level: u32, mut f: impl FnMut(&DyadicInterval) -> f64) -> Result<Self> {
        if level > crate::dyadic::MAX_LEVEL {
            return Err(Error::LevelCap(level));
        }
        let values: Vec<f64> = DyadicInterval::up_to(level).map(|i| f(&i)).collect();
        if let Some((k, &value)) =
            values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "sequence entry {} must be positive, got {value}",
                DyadicInterval::from_tree_index(k)
            )));
        }
        Ok(Self { level, values })
    }

    pub fn constant(level: u32, value: f64) -> Result<Self> {
        Self::from_fn(level, |_| value)
    }

    /// `w_I = ω(I)`.
    pub fn from_weight(weight: &DyadicWeight, level: u32) -> Result<Self> {
        weight.check_depth(level)?;
        let masses = weight.masses();
        Self::from_fn(level, |i| masses.get(i))
    }

    /// Entries i.i.d. uniform on `[lo, hi]`.
    pub fn uniform(level: u32, lo: f64, hi: f64, seed: u64) -> Result<Self> {
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::InvalidParameter(format!("need 0 < lo <= hi, got [{lo}, {hi}]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::from_fn(level, |_| rng.gen_range(lo..=hi))
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn get(&self, interval: &DyadicInterval) -> f64 {
        self.values[interval.tree_index()]
    }

    pub fn try_get(&self, interval: &DyadicInterval) -> Result<f64> {
        if interval.level() > self.level {
            return Err(Error::TooDeep { interval: *interval, level: self.level });
        }
        Ok(self.get(interval))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn map(&self, f: impl Fn(&DyadicInterval, f64) -> f64) -> Result<Self> {
        Self::from_fn(self.level, |i| f(i, self.get(i)))
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicInterval, f64)> + '_ {
        self.values.iter().enumerate().map(|(k, &v)| (DyadicInterval::from_tree_index(k), v))
    }
}

impl Serialize for IndexedSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let map: BTreeMap<String, f64> = self.iter().map(|(i, v)| (i.to_string(), v)).collect();
        map.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexedSequence {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = BTreeMap::<String, f64>::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity(raw.len());
        for (key, value) in raw {
            let interval: DyadicInterval = key.parse().map_err(D::Error::custom)?;
            entries.push((interval, value));
        }
        let count = entries.len();
        let level = (count + 1).trailing_zeros().saturating_sub(1);
        if count == 0 || (2usize << level) - 1 != count {
            return Err(D::Error::custom(format!(
                "{count} entries do not form a complete dyadic tree"
            )));
        }
        let mut values = vec![f64::NAN; count];
        for (interval, value) in entries {
            if interval.level() > level {
                return Err(D::Error::custom(format!("key {interval} deeper than level {level}")));
            }
            values[interval.tree_index()] = value;
        }
        IndexedSequence::from_fn(level, |i| values[i.tree_index()]).map_err(D::Error::custom)
    }
}

/// Two-sequence reverse Carleson constant:
/// `max_J v_J^α Σ_{I ⊇ J} w_I^{-α}` over `J` of level `<= level`.
pub fn pair_drcc_constant(
    w: &IndexedSequence,
    v: &IndexedSequence,
    alpha: f64,
    level: u32,
) -> Result<LevelConstant> {
    if w.level != v.level {
        return Err(Error::DomainMismatch(w.level, v.level));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must be positive, got {alpha}")));
    }
    if level > w.level {
        return Err(Error::DomainMismatch(level, w.level));
    }
    let sums = chain_sums(level, alpha, |i| w.get(i));
    Ok(max_over(DyadicInterval::up_to(level), level, |j| v.get(j).powf(alpha) * sums[j.tree_index()]))
}

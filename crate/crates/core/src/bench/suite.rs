//! Weighted Haar suite: weight constants, the indicator-sum lemmas and the
//! end-to-end constant-coefficient bound for the normalized Haar system.
//!
//! The lemma checks use the constants their proofs deliver. For a pair
//! constant `C` these are `C^{1/p}` for the lower indicator bound and
//! `C^{1/2}` for the upper ones; both are at most `C` once `C >= 1`, and the
//! checks also count violations of the plain `C` form.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ordered_map, random_element, sample_rng, Sampling};
use crate::dyadic::{DyadicInterval, StepFunction};
use crate::error::{Error, Result};
use crate::greedy::{
    project_complement, sample_t_greedy_set, support_weight, Basis, HaarXp, SignedIndicator,
};
use crate::haar::{analyze, indicator_sum_norm, synthesize, HaarIndex};
use crate::oracle::best_scalar;
use crate::sign::Sign;
use crate::weights::{
    apd_constant, carleson_constant, pair_drcc_constant, reverse_doubling_delta, DyadicWeight,
    IndexedSequence, LevelConstant,
};

const VIOLATION_SLACK: f64 = 1e-9;
/// Remark bound check tolerance.
const REMARK_SLACK: f64 = 1e-9;
/// A Carleson table whose last increment is below this fraction of the one
/// before it is read as converging.
const CONVERGING_RATIO: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOptions {
    pub p: Vec<f64>,
    pub alpha: Vec<f64>,
    pub t: Vec<f64>,
    pub level: u32,
    /// Range of the interval weights `w_I`.
    pub interval_weights: [f64; 2],
    /// End-to-end samples per `(p, t)` pair; lemma samples in total.
    pub sampling: Sampling,
}

impl SuiteOptions {
    fn validate(&self) -> Result<()> {
        if self.level == 0 {
            return Err(Error::InvalidParameter("suite needs level >= 1".into()));
        }
        if let Some(p) = self.p.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
            return Err(Error::BadExponent(*p));
        }
        if let Some(t) = self.t.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(Error::InvalidParameter(format!("t must lie in (0,1], got {t}")));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParameter(format!("alpha must be positive, got {a}")));
        }
        let [lo, hi] = self.interval_weights;
        if !(0.0 < lo && lo <= hi) {
            return Err(Error::InvalidParameter(format!("need 0 < lo <= hi, got [{lo}, {hi}]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonRow {
    pub level: u32,
    pub alpha: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RemarkCheck {
    pub alpha: f64,
    pub carleson: f64,
    /// `1/(1 - δ^α)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    pub level: u32,
    pub apd: Vec<(f64, LevelConstant)>,
    pub delta: LevelConstant,
    pub carleson: Vec<(f64, LevelConstant)>,
    /// Present only when `δ < 1`.
    pub remark: Vec<RemarkCheck>,
    /// Carleson constants truncated at every level `1..=L`.
    pub growth: Vec<CarlesonRow>,
    /// Per `α`: whether the truncated constants look convergent.
    pub converging: Vec<(f64, bool)>,
}

/// Weight constants and the level-by-level Carleson table.
pub fn weight_report(weight: &DyadicWeight, p: &[f64], alpha: &[f64], level: u32) -> Result<WeightReport> {
    let apd = p.iter().map(|&p| Ok((p, apd_constant(weight, p, level)?))).collect::<Result<_>>()?;
    let delta = reverse_doubling_delta(weight, level)?;
    let carleson: Vec<(f64, LevelConstant)> =
        alpha.iter().map(|&a| Ok((a, carleson_constant(weight, a, level)?))).collect::<Result<_>>()?;
    let remark = if delta.value < 1.0 {
        carleson
            .iter()
            .map(|(a, c)| {
                let bound = 1.0 / (1.0 - delta.value.powf(*a));
                RemarkCheck { alpha: *a, carleson: c.value, bound, holds: c.value <= bound + REMARK_SLACK }
            })
            .collect()
    } else {
        Vec::new()
    };
    let mut growth = Vec::new();
    let mut converging = Vec::new();
    for &a in alpha {
        let table: Vec<f64> =
            (1..=level).map(|l| carleson_constant(weight, a, l).map(|c| c.value)).collect::<Result<_>>()?;
        growth.extend(table.iter().enumerate().map(|(k, &value)| CarlesonRow { level: k as u32 + 1, alpha: a, value }));
        converging.push((a, looks_convergent(&table)));
    }
    Ok(WeightReport { level, apd, delta, carleson, remark, growth, converging })
}

fn looks_convergent(table: &[f64]) -> bool {
    match table {
        [.., a, b, c] => {
            let (prev, last) = (b - a, c - b);
            last < 1e-12 || last <= CONVERGING_RATIO * prev
        }
        _ => true,
    }
}

/// Tally of one inequality: ratios are `lhs / (K rhs)` with the proof's `K`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaTally {
    pub checked: usize,
    pub violations: usize,
    /// Violations with the plain pair constant in place of the proof's.
    pub stated_violations: usize,
    pub max_ratio: f64,
}

impl LemmaTally {
    fn record(&mut self, ratio: f64, stated_ratio: f64) {
        self.checked += 1;
        self.violations += usize::from(ratio > 1.0 + VIOLATION_SLACK);
        self.stated_violations += usize::from(stated_ratio > 1.0 + VIOLATION_SLACK);
        self.max_ratio = self.max_ratio.max(ratio);
    }

    fn merge(&mut self, other: LemmaTally) {
        self.checked += other.checked;
        self.violations += other.violations;
        self.stated_violations += other.stated_violations;
        self.max_ratio = self.max_ratio.max(other.max_ratio);
    }

    pub fn clean(&self) -> bool {
        self.violations == 0 && self.stated_violations == 0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    /// `(Σ_Λ ω(I)/v_I)^{1/p} <= C^{1/p} ‖1_Λ‖` with `C` the 1-pair constant of `(v, ω)`.
    pub lower: LemmaTally,
    /// `‖1_Λ‖ <= C^{1/2} (Σ_Λ ω(I)/v_I)^{1/p}` with `C` the `2/p` pair constant of `(ω, v)`.
    pub upper: LemmaTally,
    /// `(Σ_Λ ω(I)/v_I)^{1/p} <= C^{1/2} max_Λ(ω(I)/v_I) ‖1_Λ‖` with the `2/p'` constant.
    pub dual: LemmaTally,
    /// `‖1_Λ‖ / card(Λ)^{1/p} ∈ [1/K, K]`, `K` the product of the order-1 and
    /// order-`2/p` Carleson constants.
    pub cardinality: LemmaTally,
}

impl LemmaReport {
    fn merge(&mut self, other: LemmaReport) {
        self.lower.merge(other.lower);
        self.upper.merge(other.upper);
        self.dual.merge(other.dual);
        self.cardinality.merge(other.cardinality);
    }

    pub fn clean(&self) -> bool {
        self.lower.clean() && self.upper.clean() && self.dual.clean() && self.cardinality.clean()
    }
}

/// Random nonempty family of intervals of level `< level`.
fn random_family(level: u32, rng: &mut impl Rng) -> Vec<DyadicInterval> {
    let all: Vec<DyadicInterval> = DyadicInterval::up_to(level - 1).collect();
    let q: f64 = rng.gen_range(0.05..=0.6);
    let mut family: Vec<DyadicInterval> = all.iter().copied().filter(|_| rng.gen_bool(q)).collect();
    if family.is_empty() {
        family.push(*all.choose(rng).expect("nonempty level"));
    }
    family
}

/// All four lemma checks on one `(ω, Λ, p)` with `v_I = ω(I)/w_I`.
fn lemma_checks(
    weight: &DyadicWeight,
    level: u32,
    p: f64,
    family: &[DyadicInterval],
    w: &IndexedSequence,
) -> Result<LemmaReport> {
    let top = level - 1;
    let omega = IndexedSequence::from_weight(weight, top)?;
    let v = omega.map(|i, m| m / w.get(i))?;
    let indices: Vec<HaarIndex> = family.iter().map(|&i| HaarIndex::Interval(i)).collect();
    let norm = indicator_sum_norm(&indices, &[], p, weight, level)?;
    let sum: f64 = family.iter().map(|i| omega.get(i) / v.get(i)).sum();
    let lhs = sum.powf(1.0 / p);
    let q = p / (p - 1.0);
    let mut report = LemmaReport::default();

    let c = pair_drcc_constant(&v, &omega, 1.0, top)?.value;
    report.lower.record(lhs / (c.powf(1.0 / p) * norm), lhs / (c * norm));

    let c = pair_drcc_constant(&omega, &v, 2.0 / p, top)?.value;
    report.upper.record(norm / (c.sqrt() * lhs), norm / (c * lhs));

    let c = pair_drcc_constant(&omega, &v, 2.0 / q, top)?.value;
    let peak = family.iter().map(|i| omega.get(i) / v.get(i)).fold(0.0, f64::max);
    report.dual.record(lhs / (c.sqrt() * peak * norm), lhs / (c * peak * norm));

    let k = carleson_constant(weight, 1.0, top)?.value * carleson_constant(weight, 2.0 / p, top)?.value;
    let ratio = norm / (family.len() as f64).powf(1.0 / p);
    let spread = (ratio / k).max(1.0 / (ratio * k));
    report.cardinality.record(spread, spread);
    Ok(report)
}

/// Lemma checks on `samples` random `(ω, Λ, p)`: `ω` log-uniform with a
/// random spread in `[0, 2]`, `p` drawn from the list, `w_I` uniform on
/// `[0.5, 2]`.
pub fn lemma_suite(level: u32, p: &[f64], sampling: &Sampling) -> Result<LemmaReport> {
    if level == 0 || p.is_empty() {
        return Err(Error::InvalidParameter("lemma suite needs level >= 1 and a p value".into()));
    }
    if let Some(p) = p.iter().find(|p| !(**p > 1.0 && p.is_finite())) {
        return Err(Error::BadExponent(*p));
    }
    let outcomes = ordered_map(&sampling.seeds(), |seed| {
        let mut rng = sample_rng(seed);
        let spread = rng.gen_range(0.0..=2.0);
        let weight = DyadicWeight::log_uniform(level, spread, rng.gen())?;
        let p = *p.choose(&mut rng).expect("nonempty");
        let family = random_family(level, &mut rng);
        let w = IndexedSequence::uniform(level - 1, 0.5, 2.0, rng.gen())?;
        lemma_checks(&weight, level, p, &family, &w)
    });
    let mut report = LemmaReport::default();
    for o in outcomes {
        report.merge(o?);
    }
    Ok(report)
}

/// `‖f - P_Λ f‖ <= (1 + C² M₀/(t m₀)) ‖f - α 1_{εΛ'}‖` over sampled
/// `(f, Λ, Λ', α, ε)` for one `(p, t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndToEnd {
    pub p: f64,
    pub t: f64,
    /// Carleson constant of order `min(1, 2/p)`.
    pub c: f64,
    pub m0: f64,
    pub big_m0: f64,
    pub bound: f64,
    pub checked: usize,
    pub violations: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaarSuiteReport {
    pub weight: WeightReport,
    /// Largest `|synthesize(analyze f) - f|` over random step functions.
    pub reconstruction_error: f64,
    pub lemmas: LemmaReport,
    pub end_to_end: Vec<EndToEnd>,
    pub verdict: String,
}

impl HaarSuiteReport {
    pub fn violations(&self) -> usize {
        let lemma = [self.lemmas.lower, self.lemmas.upper, self.lemmas.dual, self.lemmas.cardinality]
            .iter()
            .map(|t| t.violations + t.stated_violations)
            .sum::<usize>();
        let remark = self.weight.remark.iter().filter(|r| !r.holds).count();
        lemma + remark + self.end_to_end.iter().map(|e| e.violations).sum::<usize>()
    }
}

/// Competitor with `Σ_{Λ'} w <= Σ_Λ w`: a random part of `Λ`, then a random
/// walk over the other indices keeping whatever fits.
fn competitor(basis: &dyn Basis, set: &[usize], rng: &mut impl Rng) -> Vec<usize> {
    let cap = support_weight(basis, set);
    let keep: f64 = rng.gen_range(0.0..=1.0);
    let mut chosen: Vec<usize> = set.iter().copied().filter(|_| rng.gen_bool(keep)).collect();
    let mut acc = support_weight(basis, &chosen);
    let mut rest: Vec<usize> = (0..basis.dim()).filter(|n| !set.contains(n)).collect();
    rest.shuffle(rng);
    for n in rest {
        let w = basis.index_weight(n);
        if acc + w <= cap * (1.0 + 1e-12) {
            acc += w;
            chosen.push(n);
        }
    }
    chosen.sort_unstable();
    chosen
}

fn end_to_end(
    weight: &DyadicWeight,
    w: &IndexedSequence,
    p: f64,
    t: f64,
    opts: &SuiteOptions,
) -> Result<EndToEnd> {
    let level = opts.level;
    let basis = HaarXp::intervals_only(p, weight.clone(), level)?.with_interval_weights(w)?;
    let dim = basis.dim();
    let c = carleson_constant(weight, 1f64.min(2.0 / p), level)?.value;
    let (m0, big_m0) = (w.min(), w.max());
    let bound = 1.0 + c * c * big_m0 / (t * m0);
    let sampling = &opts.sampling;
    let tol = sampling.tol;
    let outcomes = ordered_map(&sampling.seeds(), |seed| -> Result<Vec<f64>> {
        let mut rng = sample_rng(seed);
        let f = random_element(dim, &mut rng);
        let m = rng.gen_range(1..dim);
        let set = sample_t_greedy_set(&f, t, m, &mut rng)?;
        let residual = basis.norm(&project_complement(&f, &set));
        let other = competitor(&basis, &set, &mut rng);
        let mut ratios = vec![residual / basis.norm(&f)];
        if !other.is_empty() {
            let fitted = SignedIndicator::new(other.clone(), other.iter().map(|&n| Sign::of(f[n])).collect(), 1.0)?;
            let fit = best_scalar(&basis, &f, &fitted.coeffs(dim), tol)?;
            let peak = f.iter().fold(0.0f64, |m, a| m.max(a.abs()));
            let signs = other.iter().map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect();
            let random = SignedIndicator::new(other.clone(), signs, rng.gen_range(-2.0 * peak..=2.0 * peak))?;
            for candidate in [SignedIndicator { scale: fit.alpha, ..fitted }, random] {
                let diff: Vec<f64> = f.iter().zip(candidate.coeffs(dim)).map(|(a, b)| a - b).collect();
                ratios.push(residual / basis.norm(&diff));
            }
        }
        Ok(ratios)
    });
    let mut report = EndToEnd { p, t, c, m0, big_m0, bound, checked: 0, violations: 0, max_ratio: 0.0 };
    for o in outcomes {
        for r in o? {
            report.checked += 1;
            report.violations += usize::from(r > bound * (1.0 + VIOLATION_SLACK));
            report.max_ratio = report.max_ratio.max(r);
        }
    }
    Ok(report)
}

/// Runs the weight report, a Haar reconstruction check, the lemma checks on
/// the given weight, and the end-to-end bound for every `(p, t)`. The weight
/// must resolve at least `opts.level`.
pub fn haar_weight_suite(weight: &DyadicWeight, opts: &SuiteOptions) -> Result<HaarSuiteReport> {
    opts.validate()?;
    let level = opts.level;
    if weight.level() < level {
        return Err(Error::TooDeep {
            interval: DyadicInterval::at_level(level).next().expect("nonempty level"),
            level: weight.level(),
        });
    }
    let sampling = &opts.sampling;
    let report = weight_report(weight, &opts.p, &opts.alpha, level)?;

    let mut reconstruction_error = 0.0f64;
    let mut rng = sample_rng(sampling.seed);
    for _ in 0..16 {
        let f = StepFunction::from_fn(level, |_| rng.gen_range(-1.0..=1.0))?;
        let back = synthesize(&analyze(&f));
        let err = f.values().iter().zip(back.values()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        reconstruction_error = reconstruction_error.max(err);
    }

    let [lo, hi] = opts.interval_weights;
    let w = IndexedSequence::uniform(level - 1, lo, hi, sampling.seed)?;
    let lemma_outcomes = if opts.p.is_empty() {
        Vec::new()
    } else {
        ordered_map(&sampling.seeds(), |seed| {
            let mut rng = sample_rng(seed);
            let p = *opts.p.choose(&mut rng).expect("nonempty");
            let family = random_family(level, &mut rng);
            let v_weights = IndexedSequence::uniform(level - 1, lo, hi, rng.gen())?;
            lemma_checks(weight, level, p, &family, &v_weights)
        })
    };
    let mut lemmas = LemmaReport::default();
    for o in lemma_outcomes {
        lemmas.merge(o?);
    }

    let mut runs = Vec::new();
    for &p in &opts.p {
        for &t in &opts.t {
            runs.push(end_to_end(weight, &w, p, t, opts)?);
        }
    }
    let mut suite = HaarSuiteReport {
        weight: report,
        reconstruction_error,
        lemmas,
        end_to_end: runs,
        verdict: String::new(),
    };
    let growing: Vec<f64> = suite.weight.converging.iter().filter(|(_, ok)| !ok).map(|(a, _)| *a).collect();
    suite.verdict = match (suite.violations(), growing.is_empty()) {
        (0, true) => "consistent with a bounded constant-coefficient greedy constant".to_string(),
        (0, false) => format!(
            "no violations at this truncation; Carleson constants still growing for alpha in {growing:?}, \
             so the truncated constants do not indicate a bounded limit"
        ),
        (n, _) => format!("inconsistent: {n} violations"),
    };
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn options(level: u32, samples: usize) -> SuiteOptions {
        SuiteOptions {
            p: vec![1.5, 2.0, 3.0],
            alpha: vec![0.5, 1.0, 2.0],
            t: vec![0.5, 1.0],
            level,
            interval_weights: [0.5, 2.0],
            sampling: Sampling::new(samples, 3),
        }
    }

    #[test]
    fn lebesgue_suite_matches_closed_forms() {
        let level = 4;
        let mut opts = options(level, 60);
        opts.interval_weights = [1.0, 1.0];
        let r = haar_weight_suite(&DyadicWeight::lebesgue(level), &opts).unwrap();
        assert_eq!(r.violations(), 0, "{r:?}");
        assert!(r.reconstruction_error < 1e-12);
        assert_eq!(r.weight.delta.value, 0.5);
        for e in &r.end_to_end {
            assert_eq!((e.m0, e.big_m0), (1.0, 1.0));
            if e.p == 2.0 {
                assert!((e.c - (2.0 - 2f64.powi(-(level as i32)))).abs() < 1e-12);
            }
        }
        assert!(r.weight.converging.iter().all(|(_, ok)| *ok));
        assert!(r.verdict.starts_with("consistent"));
    }

    #[test]
    fn concentrated_weight_reports_growth() {
        let level = 8;
        let w = DyadicWeight::concentrated(level, 1.0).unwrap();
        let report = weight_report(&w, &[2.0], &[1.0], level).unwrap();
        assert!(!report.converging[0].1);
        let values: Vec<f64> = report.growth.iter().map(|r| r.value).collect();
        assert!(values.windows(2).all(|p| p[1] > p[0] + 0.5), "{values:?}");
    }

    #[test]
    fn lemma_suite_is_clean() {
        let r = lemma_suite(4, &[1.5, 2.0, 3.0], &Sampling::new(40, 8)).unwrap();
        assert!(r.clean(), "{r:?}");
        assert_eq!(r.lower.checked, 40);
    }

    #[test]
    fn refuses_shallow_weights() {
        let opts = options(5, 1);
        assert!(haar_weight_suite(&DyadicWeight::lebesgue(3), &opts).is_err());
    }
}

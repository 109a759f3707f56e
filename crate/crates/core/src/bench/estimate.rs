//! Empirical lower bounds for the constants of the greedy-type properties.
//!
//! Each estimate is the largest ratio seen over the sampled instances,
//! together with the instance that produced it.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ordered_map, random_element, random_subset, sample_rng, BudgetMode, Sampling};
use crate::error::{Error, Result};
use crate::greedy::{
    greedy_residual_norm, greedy_set, project, sample_t_greedy_set, support_weight, Basis,
    SignedIndicator,
};
use crate::oracle::{d_pcc, sigma, Budget, OracleKind, OracleOptions};
use crate::sign::Sign;

/// Largest allowed gap between a witness's replayed ratio and the reported
/// value, relative to `max(1, value)`.
pub const REPLAY_TOLERANCE: f64 = 1e-6;

/// Subsets are enumerated exhaustively up to this dimension.
const EXHAUSTIVE_SUBSETS: usize = 10;
/// Random subsets per element above that dimension.
const SUBSETS_PER_ELEMENT: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantName {
    /// `‖P_A x‖ <= K_s ‖x‖`.
    #[serde(rename = "K_s")]
    Suppression,
    /// `‖x + t1_{εA}‖ <= C_s ‖x + t1_{ε'B}‖`.
    #[serde(rename = "C_s")]
    Symmetry,
    /// `‖1_A‖ <= C ‖1_B‖` for `|A| = |B|`.
    #[serde(rename = "democracy")]
    Democracy,
    /// `‖1_A‖ <= C ‖1_B‖` for `ω(A) <= ω(B)`.
    #[serde(rename = "w-democracy")]
    WeightDemocracy,
    /// `‖x - G^t x‖ <= C(t) σ(x)`.
    #[serde(rename = "C(t)")]
    Greedy,
    /// `‖x - G^t x‖ <= D(t) 𝒟(x)`.
    #[serde(rename = "D(t)")]
    Pccg,
}

impl ConstantName {
    pub fn label(self) -> &'static str {
        match self {
            ConstantName::Suppression => "K_s",
            ConstantName::Symmetry => "C_s",
            ConstantName::Democracy => "democracy",
            ConstantName::WeightDemocracy => "w-democracy",
            ConstantName::Greedy => "C(t)",
            ConstantName::Pccg => "D(t)",
        }
    }
}

impl fmt::Display for ConstantName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ConstantName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "K_s" | "k_s" | "suppression" => ConstantName::Suppression,
            "C_s" | "c_s" | "symmetry" => ConstantName::Symmetry,
            "democracy" => ConstantName::Democracy,
            "w-democracy" | "weight-democracy" => ConstantName::WeightDemocracy,
            "C(t)" | "greedy" => ConstantName::Greedy,
            "D(t)" | "pccg" => ConstantName::Pccg,
            _ => return Err(Error::Parse(format!("unknown constant {s:?}"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DemocracyMode {
    Cardinality,
    Weight,
}

/// An instance that realizes a reported ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `‖P_A x‖ / ‖x‖`.
    Projection { x: Vec<f64>, set: Vec<usize> },
    /// `‖x + a‖ / ‖x + b‖`.
    Swap { x: Vec<f64>, a: SignedIndicator, b: SignedIndicator },
    /// `‖1_A‖ / ‖1_B‖`.
    Indicators { a: Vec<usize>, b: Vec<usize> },
    /// `‖x - P_Γ x‖` over the best approximation of the given kind.
    Residual { x: Vec<f64>, set: Vec<usize>, budget: Budget, against: OracleKind },
}

impl Witness {
    /// Recomputes the ratio from scratch.
    pub fn ratio(&self, basis: &dyn Basis, opts: &OracleOptions) -> Result<f64> {
        let dim = basis.dim();
        let check = |v: &[f64]| {
            if v.len() == dim {
                Ok(())
            } else {
                Err(Error::LengthMismatch { expected: dim, got: v.len() })
            }
        };
        match self {
            Witness::Projection { x, set } => {
                check(x)?;
                Ok(basis.norm(&project(x, set)) / basis.norm(x))
            }
            Witness::Swap { x, a, b } => {
                check(x)?;
                Ok(basis.norm(&shifted(x, a)) / basis.norm(&shifted(x, b)))
            }
            Witness::Indicators { a, b } => Ok(indicator_norm(basis, a) / indicator_norm(basis, b)),
            Witness::Residual { x, set, budget, against } => {
                check(x)?;
                let (s, d) = best_approximations(basis, x, *budget, opts)?;
                let residual = greedy_residual_norm(basis, x, set);
                Ok(residual
                    / match against {
                        OracleKind::Sigma => s,
                        OracleKind::Dpcc => d,
                    })
            }
        }
    }
}

fn shifted(x: &[f64], ind: &SignedIndicator) -> Vec<f64> {
    x.iter().zip(ind.coeffs(x.len())).map(|(a, b)| a + b).collect()
}

fn indicator_norm(basis: &dyn Basis, set: &[usize]) -> f64 {
    basis.norm(&SignedIndicator::plain(set.to_vec()).coeffs(basis.dim()))
}

/// `σ` and `𝒟` on one budget. The constant-coefficient candidate lies in an
/// admissible span, so `σ` is tightened to `min(σ, 𝒟)`; this matters only
/// when coordinate descent stalls on a non-smooth norm.
fn best_approximations(basis: &dyn Basis, x: &[f64], budget: Budget, opts: &OracleOptions) -> Result<(f64, f64)> {
    let s = sigma(basis, x, budget, opts)?.distance;
    let d = d_pcc(basis, x, budget, opts)?.distance;
    Ok((s.min(d), d))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub constant: ConstantName,
    /// Largest ratio observed: a lower bound for the constant, never an
    /// upper bound.
    pub value: f64,
    pub witness: Option<Witness>,
    pub samples: usize,
    /// Samples dropped by the division guard.
    pub skipped: usize,
    pub basis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetMode>,
}

impl ConstantEstimate {
    /// Re-evaluates the witness and checks it against the reported value.
    pub fn replay(&self, basis: &dyn Basis, opts: &OracleOptions) -> Result<f64> {
        let witness = self
            .witness
            .as_ref()
            .ok_or_else(|| Error::Invariant(format!("{} estimate has no witness", self.constant)))?;
        let ratio = witness.ratio(basis, opts)?;
        if (ratio - self.value).abs() > REPLAY_TOLERANCE * self.value.abs().max(1.0) {
            return Err(Error::Invariant(format!(
                "{} witness replays to {ratio}, reported {}",
                self.constant, self.value
            )));
        }
        Ok(ratio)
    }
}

/// Running maximum with its witness.
struct Best {
    value: f64,
    witness: Option<Witness>,
}

impl Best {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, witness: None }
    }

    fn offer(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        if value > self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }

    /// Folds per-sample results in order; `None` counts as skipped.
    fn absorb(&mut self, results: Vec<Option<(f64, Witness)>>) -> usize {
        let mut skipped = 0;
        for r in results {
            match r {
                Some((value, witness)) => self.offer(value, || witness),
                None => skipped += 1,
            }
        }
        skipped
    }

    fn finish(self, constant: ConstantName, basis: &dyn Basis, sampling: &Sampling, skipped: usize) -> Result<ConstantEstimate> {
        if self.witness.is_none() {
            return Err(Error::InvalidParameter(format!(
                "every {constant} sample fell below the division guard"
            )));
        }
        Ok(ConstantEstimate {
            constant,
            value: self.value,
            witness: self.witness,
            samples: sampling.samples,
            skipped,
            basis: basis.tag(),
            t: None,
            budget: None,
        })
    }
}

fn nonempty(basis: &dyn Basis) -> Result<usize> {
    match basis.dim() {
        0 => Err(Error::InvalidParameter("basis has dimension 0".into())),
        dim => Ok(dim),
    }
}

/// `(1, -1, 1, -1, ...)`.
fn alternating(dim: usize) -> Vec<f64> {
    (0..dim).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect()
}

/// `max ‖P_A x‖/‖x‖` over sampled `x` and all subsets `A` (random subsets
/// once the dimension exceeds 10). The alternating vector against its
/// positive positions is always evaluated.
pub fn estimate_suppression_constant(basis: &dyn Basis, sampling: &Sampling) -> Result<ConstantEstimate> {
    let dim = nonempty(basis)?;
    let guard = sampling.guard();
    let mut best = Best::new();
    let probe = alternating(dim);
    let evens: Vec<usize> = (0..dim).step_by(2).collect();
    let value = basis.norm(&project(&probe, &evens)) / basis.norm(&probe);
    best.offer(value, || Witness::Projection { x: probe, set: evens });

    let results = ordered_map(&sampling.seeds(), |seed| {
        let mut rng = sample_rng(seed);
        let x = random_element(dim, &mut rng);
        let nx = basis.norm(&x);
        if nx < guard {
            return None;
        }
        let mut top = (f64::NEG_INFINITY, Vec::new());
        let mut consider = |set: Vec<usize>| {
            let r = basis.norm(&project(&x, &set)) / nx;
            if r > top.0 {
                top = (r, set);
            }
        };
        if dim <= EXHAUSTIVE_SUBSETS {
            for mask in 0..1u64 << dim {
                consider((0..dim).filter(|n| mask >> n & 1 == 1).collect());
            }
        } else {
            consider((0..dim).collect());
            for _ in 0..SUBSETS_PER_ELEMENT {
                consider(random_subset(dim, &mut rng));
            }
        }
        Some((top.0, Witness::Projection { x, set: top.1 }))
    });
    let skipped = best.absorb(results);
    best.finish(ConstantName::Suppression, basis, sampling, skipped)
}

fn random_signs(k: usize, rng: &mut impl Rng) -> Vec<Sign> {
    (0..k).map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect()
}

/// `max ‖x + t1_{εA}‖/‖x + t1_{ε'B}‖` over disjoint `A`, `B` of equal size
/// outside `supp(x)`, with `t = max |x_n|`. Both orientations of each
/// configuration are admissible, so every sample contributes a ratio `>= 1`.
pub fn estimate_symmetry_largest(basis: &dyn Basis, sampling: &Sampling) -> Result<ConstantEstimate> {
    let dim = basis.dim();
    if dim < 3 {
        return Err(Error::InvalidParameter(format!(
            "symmetry needs dimension >= 3, got {dim}"
        )));
    }
    let guard = sampling.guard();
    let results = ordered_map(&sampling.seeds(), |seed| {
        let mut rng = sample_rng(seed);
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(&mut rng);
        let s = rng.gen_range(1..=dim - 2);
        let k = rng.gen_range(1..=(dim - s) / 2);
        let (supp, rest) = order.split_at(s);
        let mut x = vec![0.0; dim];
        for (&n, v) in supp.iter().zip(random_element(s, &mut rng)) {
            x[n] = v;
        }
        let t = x.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        let a = SignedIndicator::new(rest[..k].to_vec(), random_signs(k, &mut rng), t).ok()?;
        let b = SignedIndicator::new(rest[k..2 * k].to_vec(), random_signs(k, &mut rng), t).ok()?;
        let na = basis.norm(&shifted(&x, &a));
        let nb = basis.norm(&shifted(&x, &b));
        if na.min(nb) < guard {
            None
        } else if na >= nb {
            Some((na / nb, Witness::Swap { x, a, b }))
        } else {
            Some((nb / na, Witness::Swap { x, a: b, b: a }))
        }
    });
    let mut best = Best::new();
    let skipped = best.absorb(results);
    best.finish(ConstantName::Symmetry, basis, sampling, skipped)
}

/// `max ‖1_A‖/‖1_B‖` over random nonempty `B` and `A` drawn by walking a
/// random permutation: the first `|B|` indices (cardinality) or every index
/// that still fits `ω(A) <= ω(B)` (weight). With unit weights the two modes
/// draw identical pairs.
pub fn estimate_democracy(basis: &dyn Basis, mode: DemocracyMode, sampling: &Sampling) -> Result<ConstantEstimate> {
    let dim = nonempty(basis)?;
    let mut best = Best::new();
    // A = B: the trivial ratio 1
    best.offer(1.0, || Witness::Indicators { a: vec![0], b: vec![0] });
    let results = ordered_map(&sampling.seeds(), |seed| {
        let mut rng = sample_rng(seed);
        let k = rng.gen_range(1..=dim);
        let mut order: Vec<usize> = (0..dim).collect();
        order.shuffle(&mut rng);
        let mut b = order[..k].to_vec();
        b.sort_unstable();
        order.shuffle(&mut rng);
        let mut a = match mode {
            DemocracyMode::Cardinality => order[..k].to_vec(),
            DemocracyMode::Weight => {
                let cap = support_weight(basis, &b);
                let mut acc = 0.0;
                let mut a = Vec::new();
                for &n in &order {
                    let w = basis.index_weight(n);
                    if acc + w <= cap * (1.0 + 1e-12) {
                        acc += w;
                        a.push(n);
                    }
                }
                a
            }
        };
        a.sort_unstable();
        let r = indicator_norm(basis, &a) / indicator_norm(basis, &b);
        Some((r, Witness::Indicators { a, b }))
    });
    let skipped = best.absorb(results);
    let name = match mode {
        DemocracyMode::Cardinality => ConstantName::Democracy,
        DemocracyMode::Weight => ConstantName::WeightDemocracy,
    };
    let mut estimate = best.finish(name, basis, sampling, skipped)?;
    estimate.budget = Some(match mode {
        DemocracyMode::Cardinality => BudgetMode::Count,
        DemocracyMode::Weight => BudgetMode::Weight,
    });
    Ok(estimate)
}

/// One greedy sample in the report schema. Ratios are empty for samples
/// below the division guard.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub seed: u64,
    pub basis: String,
    pub t: f64,
    pub m: usize,
    pub budget: String,
    pub residual: f64,
    pub sigma: f64,
    pub d: f64,
    pub ratio_sigma: Option<f64>,
    pub ratio_d: Option<f64>,
}

fn budget_label(budget: Budget) -> String {
    match budget {
        Budget::Count(m) => format!("count:{m}"),
        Budget::Weight(delta) => format!("weight:{delta}"),
    }
}

/// Greedy and constant-coefficient estimates over one set of samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointEstimate {
    pub greedy: ConstantEstimate,
    pub pccg: ConstantEstimate,
    pub rows: Vec<SampleRow>,
}

struct Evaluated {
    x: Vec<f64>,
    set: Vec<usize>,
    budget: Budget,
    residual: f64,
    sigma: f64,
    d: f64,
}

/// For each sample: a random `x`, `m` uniform in `1..N`, and a random
/// `Γ ∈ 𝒢(x, t, m)`; the ratios `‖x - P_Γ x‖/σ` and `‖x - P_Γ x‖/𝒟` on the
/// budget `Γ` grants. Samples with `σ` below the division guard are skipped
/// for both constants. A fixed probe, `(1+ε, -1, 1+ε, -1, ...)` with its
/// greedy half, is always evaluated.
pub fn estimate_greedy_and_pccg(
    basis: &dyn Basis,
    t: f64,
    mode: BudgetMode,
    sampling: &Sampling,
) -> Result<JointEstimate> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("t must lie in (0,1], got {t}")));
    }
    let dim = nonempty(basis)?;
    let opts = sampling.oracle();
    let guard = sampling.guard();
    let tag = basis.tag();
    let evaluate = |x: Vec<f64>, set: Vec<usize>| -> Result<Evaluated> {
        let budget = mode.budget_for(basis, &set);
        let residual = greedy_residual_norm(basis, &x, &set);
        let (sigma, d) = best_approximations(basis, &x, budget, &opts)?;
        Ok(Evaluated { x, set, budget, residual, sigma, d })
    };

    let results = ordered_map(&sampling.seeds(), |seed| -> Result<(u64, usize, Evaluated)> {
        let mut rng = sample_rng(seed);
        let x = random_element(dim, &mut rng);
        let m = if dim == 1 { 1 } else { rng.gen_range(1..dim) };
        let set = sample_t_greedy_set(&x, t, m, &mut rng)?;
        Ok((seed, m, evaluate(x, set)?))
    });

    let mut greedy = Best::new();
    let mut pccg = Best::new();
    let mut offer = |e: Evaluated| -> Option<(f64, f64)> {
        if e.sigma < guard {
            return None;
        }
        let (rs, rd) = (e.residual / e.sigma, e.residual / e.d);
        debug_assert!(rd <= rs);
        let Evaluated { x, set, budget, .. } = e;
        greedy.offer(rs, || Witness::Residual {
            x: x.clone(),
            set: set.clone(),
            budget,
            against: OracleKind::Sigma,
        });
        pccg.offer(rd, || Witness::Residual { x, set, budget, against: OracleKind::Dpcc });
        Some((rs, rd))
    };

    if dim >= 2 {
        let probe: Vec<f64> = alternating(dim).iter().map(|a| if *a > 0.0 { 1.01 } else { -1.0 }).collect();
        let set = greedy_set(&probe, dim.div_ceil(2))?;
        offer(evaluate(probe, set)?);
    }

    let mut rows = Vec::with_capacity(results.len());
    let mut skipped = 0;
    for r in results {
        let (seed, m, e) = r?;
        let row_head = (e.residual, e.sigma, e.d, budget_label(e.budget));
        let ratios = offer(e);
        if ratios.is_none() {
            skipped += 1;
        }
        rows.push(SampleRow {
            seed,
            basis: tag.clone(),
            t,
            m,
            budget: row_head.3,
            residual: row_head.0,
            sigma: row_head.1,
            d: row_head.2,
            ratio_sigma: ratios.map(|r| r.0),
            ratio_d: ratios.map(|r| r.1),
        });
    }
    let mut greedy = greedy.finish(ConstantName::Greedy, basis, sampling, skipped)?;
    let mut pccg = pccg.finish(ConstantName::Pccg, basis, sampling, skipped)?;
    if pccg.value > greedy.value {
        return Err(Error::Invariant(format!(
            "constant-coefficient estimate {} exceeds greedy estimate {}",
            pccg.value, greedy.value
        )));
    }
    for e in [&mut greedy, &mut pccg] {
        e.t = Some(t);
        e.budget = Some(mode);
    }
    Ok(JointEstimate { greedy, pccg, rows })
}

/// `C(t)`: see [`estimate_greedy_and_pccg`].
pub fn estimate_greedy_constant(basis: &dyn Basis, t: f64, mode: BudgetMode, sampling: &Sampling) -> Result<ConstantEstimate> {
    Ok(estimate_greedy_and_pccg(basis, t, mode, sampling)?.greedy)
}

/// `D(t)`: see [`estimate_greedy_and_pccg`].
pub fn estimate_pccg_constant(basis: &dyn Basis, t: f64, mode: BudgetMode, sampling: &Sampling) -> Result<ConstantEstimate> {
    Ok(estimate_greedy_and_pccg(basis, t, mode, sampling)?.pccg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{CanonicalLp, HaarXp, SummingBasis};
    use crate::weights::DyadicWeight;

    fn small() -> Sampling {
        Sampling::new(100, 11)
    }

    #[test]
    fn lp_constants_are_one() {
        for p in [1.5, 2.0, 4.0] {
            let b = CanonicalLp::new(p, 6).unwrap();
            let k = estimate_suppression_constant(&b, &small()).unwrap();
            assert!((k.value - 1.0).abs() < 1e-12, "{k:?}");
            let c = estimate_symmetry_largest(&b, &small()).unwrap();
            assert!((c.value - 1.0).abs() < 1e-12, "{c:?}");
            let d = estimate_democracy(&b, DemocracyMode::Cardinality, &small()).unwrap();
            assert!((d.value - 1.0).abs() < 1e-12);
            let g = estimate_greedy_constant(&b, 1.0, BudgetMode::Count, &small()).unwrap();
            assert!((g.value - 1.0).abs() < 1e-6, "{g:?}");
        }
    }

    #[test]
    fn haar_is_suppression_unconditional() {
        let w = DyadicWeight::log_uniform(3, 1.0, 4).unwrap();
        let b = HaarXp::new(1.5, w, 3).unwrap();
        let k = estimate_suppression_constant(&b, &small()).unwrap();
        assert!(k.value <= 1.0 + 1e-12 && k.value >= 1.0 - 1e-9);
    }

    #[test]
    fn summing_fails_suppression() {
        for n in [4usize, 8, 16] {
            let k = estimate_suppression_constant(&SummingBasis::new(n), &small()).unwrap();
            assert!(k.value >= n as f64 / 2.0, "{n}: {}", k.value);
        }
    }

    #[test]
    fn summing_symmetry_witness() {
        let b = SummingBasis::new(8);
        let c = estimate_symmetry_largest(&b, &Sampling::new(2000, 1)).unwrap();
        assert!(c.value > 1.0);
        assert!(c.replay(&b, &OracleOptions::default()).is_ok());
    }

    #[test]
    fn democracy_modes_agree_on_unit_weights() {
        let b = SummingBasis::new(7);
        let c = estimate_democracy(&b, DemocracyMode::Cardinality, &small()).unwrap();
        let w = estimate_democracy(&b, DemocracyMode::Weight, &small()).unwrap();
        assert_eq!(c.value, w.value);
        assert_eq!(c.witness, w.witness);
    }

    #[test]
    fn joint_estimates_are_ordered_and_replayable() {
        let b = CanonicalLp::new(2.0, 6).unwrap().with_index_weights(vec![1.0, 2.0, 0.5, 1.0, 1.5, 1.0]).unwrap();
        let opts = OracleOptions::default();
        for mode in [BudgetMode::Count, BudgetMode::Weight] {
            let j = estimate_greedy_and_pccg(&b, 0.5, mode, &small()).unwrap();
            assert!(j.pccg.value <= j.greedy.value);
            assert!(j.greedy.value >= 1.0 - 1e-9);
            j.greedy.replay(&b, &opts).unwrap();
            j.pccg.replay(&b, &opts).unwrap();
            assert_eq!(j.rows.len(), 100);
            for row in &j.rows {
                if let (Some(s), Some(d)) = (row.ratio_sigma, row.ratio_d) {
                    assert!(d <= s);
                    assert!(s >= 1.0 - 1e-9);
                }
            }
        }
    }

    #[test]
    fn estimates_are_deterministic() {
        let b = SummingBasis::new(6);
        let a = estimate_greedy_and_pccg(&b, 1.0, BudgetMode::Count, &small()).unwrap();
        let c = estimate_greedy_and_pccg(&b, 1.0, BudgetMode::Count, &small()).unwrap();
        assert_eq!(a, c);
    }

    #[test]
    fn names_round_trip() {
        for name in [
            ConstantName::Suppression,
            ConstantName::Symmetry,
            ConstantName::Democracy,
            ConstantName::WeightDemocracy,
            ConstantName::Greedy,
            ConstantName::Pccg,
        ] {
            assert_eq!(name.label().parse::<ConstantName>().unwrap(), name);
            let json = serde_json::to_string(&name).unwrap();
            assert_eq!(json, format!("\"{}\"", name.label()));
        }
        assert!("nope".parse::<ConstantName>().is_err());
    }
}

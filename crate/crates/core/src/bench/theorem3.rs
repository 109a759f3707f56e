//! Sampled checks of the argument that the constant-coefficient property
//! with exponent `s` implies the `t`-greedy property.
//!
//! For `x`, a `t`-greedy set `Γ` and a competitor `B` with `ω(B) <= ω(Γ)`
//! carrying a span element `z`, the argument builds
//!
//! * `y_η = x - P_B x + (t/s) γ 1_{η(B∖Γ)}` with `γ = max_{B∖Γ} |x_j|`, for
//!   which `Γ∖B` is `s`-greedy when `t >= s`;
//! * `ỹ_η = P_{Γ∖B} x + (t/s) γ 1_{η(B∖Γ)}`, for which `Γ∖B` is always
//!   `s`-greedy;
//! * `y = x - z + μ 1_B` with `μ = s max_{∉B} |x-z| + max_B |x-z|`, for which
//!   `B` is `s`-greedy;
//!
//! and bounds each greedy residual by `D(s)` times a constant-coefficient
//! distance. The membership claims are proven facts, so a failure is a bug.
//! The inequalities hold with the true `D(s)`; an estimate `D̂(s)` can be too
//! small, in which case the offending ratio is fed back as a new lower bound.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{estimate_pccg_constant, ordered_map, random_element, sample_rng, BudgetMode, Sampling};
use crate::error::{Error, Result};
use crate::greedy::{
    is_t_greedy_set_within, project, project_complement, sample_t_greedy_set, support_weight, Basis,
};
use crate::oracle::{distance_to_span, sigma, Approximant, Budget};
use crate::sign::Sign;

/// Relative slack for membership tests on vectors built in floating point.
const MEMBERSHIP_SLACK: f64 = 1e-12;
/// Relative slack before a ratio counts as exceeding `D̂(s)`.
const VIOLATION_SLACK: f64 = 1e-9;
/// Sign patterns are enumerated up to `|B∖Γ| = 10`, sampled beyond.
const EXHAUSTIVE_SIGNS: usize = 10;
const SAMPLED_SIGNS: usize = 64;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipTally {
    pub checked: usize,
    pub passed: usize,
}

impl MembershipTally {
    fn record(&mut self, ok: bool) {
        self.checked += 1;
        self.passed += usize::from(ok);
    }

    fn merge(&mut self, other: MembershipTally) {
        self.checked += other.checked;
        self.passed += other.passed;
    }

    pub fn all_passed(&self) -> bool {
        self.checked == self.passed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `‖x - P_{Γ∪B} x + (t/s)γ 1_{η(B∖Γ)}‖ <= D(s) ‖x - P_B x‖` (`t >= s`).
    Two,
    /// `(t/s)γ ‖1_{η(B∖Γ)}‖ <= D(s) ‖P_{Γ∖B} x‖`.
    TwoTilde,
    /// `‖x - P_B x‖ <= D(s) ‖x - z‖`.
    Three,
    /// `‖w - P_Γ w‖ <= D(s) ‖w‖` for `w = x - P_B x`.
    Complement,
}

/// The instance behind the largest inequality ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Witness {
    pub inequality: Inequality,
    pub seed: u64,
    pub x: Vec<f64>,
    pub greedy_set: Vec<usize>,
    pub competitor: Vec<usize>,
    pub z: Vec<f64>,
    /// Signs on `B∖Γ` in increasing index order.
    pub signs: Vec<Sign>,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FinalBound {
    pub checked: usize,
    /// Sample ratios above `D̂²` (`s <= t`) or `(2 + ((t+s)/t) D̂) D̂` (`s > t`).
    pub stated_violations: usize,
    /// Sample ratios above `D̂²` (`s <= t`) or
    /// `(2 + ((t+s)/t) D̂ + (s/t) D̂²) D̂` (`s > t`).
    pub corrected_violations: usize,
    pub stated_bound: f64,
    pub corrected_bound: f64,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem3Report {
    pub basis: String,
    pub s: f64,
    pub t: f64,
    pub samples: usize,
    /// Samples whose `σ` fell below the division guard.
    pub skipped: usize,
    /// `Γ∖B ∈ 𝒢(y_η, s)`; checked only when `t >= s`.
    pub membership_y_eta: MembershipTally,
    /// `Γ∖B ∈ 𝒢(ỹ_η, s)`.
    pub membership_y_tilde: MembershipTally,
    /// `B ∈ 𝒢(y, s)`.
    pub membership_y: MembershipTally,
    /// `D̂(s)` from the constant-coefficient estimator.
    pub d_initial: f64,
    /// `D̂(s)` after feedback.
    pub d_final: f64,
    /// Inequality violations in each pass; the last entry is 0.
    pub violations_per_pass: Vec<usize>,
    pub inequality_checks: usize,
    pub max_two: Option<f64>,
    pub max_two_tilde: Option<f64>,
    pub max_three: Option<f64>,
    pub max_complement: Option<f64>,
    pub final_bound: FinalBound,
    /// Set when feedback raised `D̂(s)`.
    pub witness: Option<Theorem3Witness>,
    pub verdict: String,
}

impl Theorem3Report {
    pub fn memberships_passed(&self) -> bool {
        self.membership_y_eta.all_passed()
            && self.membership_y_tilde.all_passed()
            && self.membership_y.all_passed()
    }
}

#[derive(Default)]
struct Outcome {
    skipped: bool,
    y_eta: MembershipTally,
    y_tilde: MembershipTally,
    y: MembershipTally,
    ratios: Vec<(Inequality, f64)>,
    top: Option<Theorem3Witness>,
    sample_ratio: Option<f64>,
}

impl Outcome {
    fn ratio(&mut self, inequality: Inequality, value: f64, witness: impl FnOnce() -> Theorem3Witness) {
        self.ratios.push((inequality, value));
        if self.top.as_ref().is_none_or(|w| value > w.ratio) {
            let mut w = witness();
            w.inequality = inequality;
            w.ratio = value;
            self.top = Some(w);
        }
    }
}

fn sign_patterns(k: usize, rng: &mut impl Rng) -> Vec<Vec<Sign>> {
    if k <= EXHAUSTIVE_SIGNS {
        (0..1u64 << k).map(|mask| Sign::pattern(k, mask)).collect()
    } else {
        (0..SAMPLED_SIGNS)
            .map(|_| (0..k).map(|_| if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect())
            .collect()
    }
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |m, a| m.max(a.abs()))
}

/// Random `B` with `ω(B) <= cap`: walk a random permutation up to a random
/// length, keeping each index that fits.
fn random_competitor(basis: &dyn Basis, cap: f64, rng: &mut impl Rng) -> Vec<usize> {
    let dim = basis.dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let tries = rng.gen_range(0..=dim);
    let mut acc = 0.0;
    let mut set = Vec::new();
    for &n in &order[..tries] {
        let w = basis.index_weight(n);
        if acc + w <= cap * (1.0 + 1e-12) {
            acc += w;
            set.push(n);
        }
    }
    set.sort_unstable();
    set
}

struct Case<'a> {
    basis: &'a dyn Basis,
    s: f64,
    t: f64,
    guard: f64,
    seed: u64,
    x: &'a [f64],
    gamma_set: &'a [usize],
}

impl Case<'_> {
    fn check(&self, b: &[usize], z: &[f64], out: &mut Outcome, rng: &mut impl Rng) {
        let (basis, x, s, t) = (self.basis, self.x, self.s, self.t);
        let dim = x.len();
        let in_gamma = membership(dim, self.gamma_set);
        let in_b = membership(dim, b);
        let b_minus: Vec<usize> = b.iter().copied().filter(|&n| !in_gamma[n]).collect();
        let g_minus: Vec<usize> = self.gamma_set.iter().copied().filter(|&n| !in_b[n]).collect();
        let union: Vec<usize> = (0..dim).filter(|&n| in_gamma[n] || in_b[n]).collect();
        let gamma = max_abs(b_minus.iter().map(|&n| x[n]));
        let lift = t / s * gamma;
        let witness = |signs: &[Sign]| Theorem3Witness {
            inequality: Inequality::Two,
            seed: self.seed,
            x: x.to_vec(),
            greedy_set: self.gamma_set.to_vec(),
            competitor: b.to_vec(),
            z: z.to_vec(),
            signs: signs.to_vec(),
            ratio: 0.0,
        };

        let off_b = project_complement(x, b);
        let n_off_b = basis.norm(&off_b);
        let off_union = project_complement(x, &union);
        let on_g_minus = project(x, &g_minus);
        let n_g_minus = basis.norm(&on_g_minus);
        for signs in sign_patterns(b_minus.len(), rng) {
            let mut bump = vec![0.0; dim];
            for (&n, sign) in b_minus.iter().zip(&signs) {
                bump[n] = lift * sign.value();
            }
            // (a): y_η = x - P_B x + bump
            if t >= s {
                let y_eta: Vec<f64> = off_b.iter().zip(&bump).map(|(a, c)| a + c).collect();
                out.y_eta.record(is_member(&y_eta, &g_minus, s));
                if n_off_b >= self.guard {
                    let lhs: Vec<f64> = off_union.iter().zip(&bump).map(|(a, c)| a + c).collect();
                    out.ratio(Inequality::Two, basis.norm(&lhs) / n_off_b, || witness(&signs));
                }
            }
            // (a'): ỹ_η = P_{Γ∖B} x + bump
            let y_tilde: Vec<f64> = on_g_minus.iter().zip(&bump).map(|(a, c)| a + c).collect();
            out.y_tilde.record(is_member(&y_tilde, &g_minus, s));
            if !b_minus.is_empty() && n_g_minus >= self.guard {
                out.ratio(Inequality::TwoTilde, basis.norm(&bump) / n_g_minus, || witness(&signs));
            }
        }

        // (b): y = x - z + μ 1_B
        let diff: Vec<f64> = x.iter().zip(z).map(|(a, c)| a - c).collect();
        let mu = s * max_abs((0..dim).filter(|&n| !in_b[n]).map(|n| diff[n]))
            + max_abs(b.iter().map(|&n| diff[n]));
        let mut y = diff.clone();
        for &n in b {
            y[n] += mu;
        }
        out.y.record(is_member(&y, b, s));
        let n_diff = basis.norm(&diff);
        if n_diff >= self.guard {
            out.ratio(Inequality::Three, n_off_b / n_diff, || witness(&[]));
        }
        if n_off_b >= self.guard {
            let rest = basis.norm(&project_complement(&off_b, self.gamma_set));
            out.ratio(Inequality::Complement, rest / n_off_b, || witness(&[]));
        }
    }
}

fn membership(dim: usize, set: &[usize]) -> Vec<bool> {
    let mut inside = vec![false; dim];
    for &n in set {
        inside[n] = true;
    }
    inside
}

fn is_member(y: &[f64], set: &[usize], s: f64) -> bool {
    is_t_greedy_set_within(y, set, s, MEMBERSHIP_SLACK).unwrap_or(false)
}

/// Runs the membership and inequality checks on `samples` instances, with
/// `D̂(s)` first estimated on the same sampling parameters (weight budgets).
pub fn verify_theorem3(basis: &dyn Basis, s: f64, t: f64, sampling: &Sampling) -> Result<Theorem3Report> {
    for (name, v) in [("s", s), ("t", t)] {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::InvalidParameter(format!("{name} must lie in (0,1], got {v}")));
        }
    }
    let dim = basis.dim();
    if dim < 2 {
        return Err(Error::InvalidParameter(format!("need dimension >= 2, got {dim}")));
    }
    let opts = sampling.oracle();
    let guard = sampling.guard();
    let d_initial = estimate_pccg_constant(basis, s, BudgetMode::Weight, sampling)?.value;

    let outcomes = ordered_map(&sampling.seeds(), |seed| -> Result<Outcome> {
        let mut rng = sample_rng(seed);
        let x = random_element(dim, &mut rng);
        let m = rng.gen_range(1..dim);
        let gamma_set = sample_t_greedy_set(&x, t, m, &mut rng)?;
        let cap = support_weight(basis, &gamma_set);
        let best = sigma(basis, &x, Budget::Weight(cap), &opts)?;
        let z_best = match &best.approximant {
            Approximant::Coefficients(c) => c.clone(),
            Approximant::Constant { .. } => unreachable!("sigma returns coefficients"),
        };
        let competitor = random_competitor(basis, cap, &mut rng);
        let z_competitor = match distance_to_span(basis, &x, &competitor, &opts) {
            Ok(fit) => fit.coeffs,
            Err(Error::NotConverged { .. }) => project(&x, &competitor),
            Err(e) => return Err(e),
        };
        let case = Case { basis, s, t, guard, seed, x: &x, gamma_set: &gamma_set };
        let mut out = Outcome::default();
        case.check(&best.set, &z_best, &mut out, &mut rng);
        case.check(&competitor, &z_competitor, &mut out, &mut rng);
        if best.distance < guard {
            out.skipped = true;
        } else {
            out.sample_ratio = Some(basis.norm(&project_complement(&x, &gamma_set)) / best.distance);
        }
        Ok(out)
    });

    let mut report = Theorem3Report {
        basis: basis.tag(),
        s,
        t,
        samples: sampling.samples,
        skipped: 0,
        membership_y_eta: MembershipTally::default(),
        membership_y_tilde: MembershipTally::default(),
        membership_y: MembershipTally::default(),
        d_initial,
        d_final: d_initial,
        violations_per_pass: Vec::new(),
        inequality_checks: 0,
        max_two: None,
        max_two_tilde: None,
        max_three: None,
        max_complement: None,
        final_bound: FinalBound::default(),
        witness: None,
        verdict: String::new(),
    };
    let mut ratios = Vec::new();
    let mut sample_ratios = Vec::new();
    let mut top: Option<Theorem3Witness> = None;
    for outcome in outcomes {
        let o = outcome?;
        report.skipped += usize::from(o.skipped);
        report.membership_y_eta.merge(o.y_eta);
        report.membership_y_tilde.merge(o.y_tilde);
        report.membership_y.merge(o.y);
        for &(which, r) in &o.ratios {
            let slot = match which {
                Inequality::Two => &mut report.max_two,
                Inequality::TwoTilde => &mut report.max_two_tilde,
                Inequality::Three => &mut report.max_three,
                Inequality::Complement => &mut report.max_complement,
            };
            *slot = Some(slot.map_or(r, |v: f64| v.max(r)));
            ratios.push(r);
        }
        if let Some(w) = o.top {
            if top.as_ref().is_none_or(|b| w.ratio > b.ratio) {
                top = Some(w);
            }
        }
        sample_ratios.extend(o.sample_ratio);
    }
    report.inequality_checks = ratios.len();

    // feedback: a ratio above D̂ is itself a lower bound for D(s)
    let mut d = d_initial;
    loop {
        let violations = ratios.iter().filter(|&&r| r > d * (1.0 + VIOLATION_SLACK)).count();
        report.violations_per_pass.push(violations);
        if violations == 0 {
            break;
        }
        d = ratios.iter().copied().fold(d, f64::max);
        report.witness = top.clone();
    }
    report.d_final = d;

    let (stated, corrected) = if s <= t {
        (d * d, d * d)
    } else {
        let base = 2.0 + (t + s) / t * d;
        (base * d, (base + s / t * d * d) * d)
    };
    let fb = &mut report.final_bound;
    fb.stated_bound = stated;
    fb.corrected_bound = corrected;
    fb.checked = sample_ratios.len();
    fb.max_ratio = sample_ratios.iter().copied().fold(0.0, f64::max);
    fb.stated_violations = sample_ratios.iter().filter(|&&r| r > stated * (1.0 + VIOLATION_SLACK)).count();
    fb.corrected_violations =
        sample_ratios.iter().filter(|&&r| r > corrected * (1.0 + VIOLATION_SLACK)).count();

    report.verdict = if !report.memberships_passed() {
        "membership failure: implementation bug".to_string()
    } else if report.final_bound.corrected_violations > 0 {
        format!("inconsistent with the implication at s = {s}, t = {t}")
    } else {
        format!("consistent with the implication at s = {s}, t = {t} (D̂(s) = {d})")
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greedy::{CanonicalLp, SummingBasis};

    #[test]
    fn hilbert_case_passes_with_unit_constant() {
        let b = CanonicalLp::new(2.0, 6).unwrap();
        let r = verify_theorem3(&b, 1.0, 1.0, &Sampling::new(200, 5)).unwrap();
        assert!(r.memberships_passed(), "{r:?}");
        assert!(r.membership_y_eta.checked > 0 && r.membership_y.checked == 400);
        assert!((r.d_final - 1.0).abs() < 1e-6, "{}", r.d_final);
        assert_eq!(*r.violations_per_pass.last().unwrap(), 0);
        assert_eq!(r.final_bound.corrected_violations, 0);
        assert!(r.verdict.starts_with("consistent"));
    }

    #[test]
    fn memberships_hold_for_all_exponent_pairs() {
        let b = CanonicalLp::new(2.0, 5).unwrap().with_index_weights(vec![1.0, 0.5, 2.0, 1.0, 1.5]).unwrap();
        for (s, t) in [(0.5, 1.0), (1.0, 0.5), (0.5, 0.5)] {
            let r = verify_theorem3(&b, s, t, &Sampling::new(100, 2)).unwrap();
            assert!(r.memberships_passed(), "{s} {t}: {r:?}");
            assert_eq!(r.membership_y_eta.checked == 0, t < s);
            assert_eq!(r.final_bound.corrected_violations, 0);
        }
    }

    #[test]
    fn conditional_basis_still_passes_memberships() {
        let b = SummingBasis::new(5);
        let r = verify_theorem3(&b, 1.0, 1.0, &Sampling::new(60, 9)).unwrap();
        assert!(r.memberships_passed());
        assert!(r.d_final >= r.d_initial);
    }
}

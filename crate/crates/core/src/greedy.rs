//! Finite normalized bases and the thresholding greedy machinery over them.
//!
//! Indices are zero-based. A basis is modeled by its coefficient space
//! `R^N`: an element is its coefficient vector, and the biorthogonal
//! functionals are coordinate reads.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::DyadicInterval;
use crate::error::{Error, Result};
use crate::haar::{haar_norm, xp_norm, HaarExpansion, HaarIndex};
use crate::sign::Sign;
use crate::weights::{DyadicWeight, IndexedSequence};

/// Largest universe the exhaustive enumerators accept.
pub const ENUMERATION_LIMIT: usize = 24;

/// A normalized basis of a finite-dimensional space, given by a norm on
/// coefficient vectors and a positive weight per index.
pub trait Basis: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn norm(&self, coeffs: &[f64]) -> f64;

    /// `ω_n`; 1 unless the basis was given explicit weights.
    fn index_weight(&self, n: usize) -> f64;

    /// Short identifier such as `lp:2:8`.
    fn tag(&self) -> String;

    /// `true` when the norm depends only on the moduli of the coefficients
    /// and is nondecreasing in each of them (an unconditional basis with
    /// constant 1). Oracles use this to skip provably dominated candidates.
    fn is_lattice(&self) -> bool {
        false
    }

    /// `true` when the norm is smooth and strictly convex enough for
    /// coordinate descent to reach the span minimum (the `p > 1` norms).
    fn is_smooth(&self) -> bool {
        false
    }
}

fn unit_weights(dim: usize) -> Vec<f64> {
    vec![1.0; dim]
}

fn check_weights(weights: &[f64], dim: usize) -> Result<()> {
    if weights.len() != dim {
        return Err(Error::LengthMismatch { expected: dim, got: weights.len() });
    }
    if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidParameter(format!("index weights must be positive, got {w}")));
    }
    Ok(())
}

/// The unit vector basis of `ℓ^p_N`.
#[derive(Debug, Clone)]
pub struct CanonicalLp {
    p: f64,
    dim: usize,
    weights: Vec<f64>,
}

impl CanonicalLp {
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::BadExponent(p));
        }
        Ok(Self { p, dim, weights: unit_weights(dim) })
    }

    pub fn with_index_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, self.dim)?;
        self.weights = weights;
        Ok(self)
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

impl Basis for CanonicalLp {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, coeffs: &[f64]) -> f64 {
        if self.p == 2.0 {
            coeffs.iter().map(|a| a * a).sum::<f64>().sqrt()
        } else if self.p == 1.0 {
            coeffs.iter().map(|a| a.abs()).sum()
        } else {
            coeffs.iter().map(|a| a.abs().powf(self.p)).sum::<f64>().powf(1.0 / self.p)
        }
    }

    fn index_weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    fn tag(&self) -> String {
        format!("lp:{}:{}", self.p, self.dim)
    }

    fn is_lattice(&self) -> bool {
        true
    }

    fn is_smooth(&self) -> bool {
        self.p > 1.0
    }
}

/// The summing basis: `‖a‖ = max_m |a_1 + ... + a_m|`. Normalized and
/// conditional, so it fails every greedy-type inequality by a margin that
/// grows with `N`.
#[derive(Debug, Clone)]
pub struct SummingBasis {
    dim: usize,
    weights: Vec<f64>,
}

impl SummingBasis {
    pub fn new(dim: usize) -> Self {
        Self { dim, weights: unit_weights(dim) }
    }

    pub fn with_index_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, self.dim)?;
        self.weights = weights;
        Ok(self)
    }
}

impl Basis for SummingBasis {
    fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, coeffs: &[f64]) -> f64 {
        coeffs
            .iter()
            .scan(0.0, |acc, a| {
                *acc += a;
                Some(acc.abs())
            })
            .fold(0.0, f64::max)
    }

    fn index_weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    fn tag(&self) -> String {
        format!("summing:{}", self.dim)
    }
}

/// The normalized Haar system `H_idx / ‖H_idx‖_{p,ω}` in `X^p(ω)` at
/// resolution `level`. Coordinates are the signed values `c_idx(f,p,ω)`.
#[derive(Debug, Clone)]
pub struct HaarXp {
    p: f64,
    weight: DyadicWeight,
    level: u32,
    indices: Vec<HaarIndex>,
    /// `‖H_idx‖_{p,ω}` per coordinate.
    scales: Vec<f64>,
    weights: Vec<f64>,
}

impl HaarXp {
    /// Root plus every interval of level `< level`; `N = 2^level`.
    pub fn new(p: f64, weight: DyadicWeight, level: u32) -> Result<Self> {
        Self::build(p, weight, level, HaarIndex::all(level).collect())
    }

    /// Intervals of level `< level` only; `N = 2^level - 1`.
    pub fn intervals_only(p: f64, weight: DyadicWeight, level: u32) -> Result<Self> {
        Self::build(p, weight, level, HaarIndex::all(level).skip(1).collect())
    }

    fn build(p: f64, weight: DyadicWeight, level: u32, indices: Vec<HaarIndex>) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::BadExponent(p));
        }
        let weight = if weight.level() < level {
            DyadicWeight::new(weight.base().refine(level)?)?
        } else {
            weight
        };
        let scales = indices.iter().map(|&i| haar_norm(i, p, &weight)).collect::<Result<_>>()?;
        let dim = indices.len();
        Ok(Self { p, weight, level, indices, scales, weights: unit_weights(dim) })
    }

    pub fn with_index_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        check_weights(&weights, self.indices.len())?;
        self.weights = weights;
        Ok(self)
    }

    /// `w_I` from a dyadic sequence; the root coordinate (if present) gets 1.
    pub fn with_interval_weights(self, seq: &IndexedSequence) -> Result<Self> {
        let weights = self
            .indices
            .iter()
            .map(|i| match i {
                HaarIndex::Root => Ok(1.0),
                HaarIndex::Interval(interval) => seq.try_get(interval),
            })
            .collect::<Result<Vec<_>>>()?;
        self.with_index_weights(weights)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weight(&self) -> &DyadicWeight {
        &self.weight
    }

    pub fn index(&self, n: usize) -> HaarIndex {
        self.indices[n]
    }

    pub fn indices(&self) -> &[HaarIndex] {
        &self.indices
    }

    pub fn position(&self, index: HaarIndex) -> Option<usize> {
        self.indices.iter().position(|&i| i == index)
    }

    /// Coordinate `n` as a dyadic interval, when it is not the root.
    pub fn interval(&self, n: usize) -> Option<DyadicInterval> {
        self.indices[n].interval()
    }

    /// `Σ a_n H_n / ‖H_n‖_{p,ω}` as a raw Haar expansion.
    pub fn to_expansion(&self, coeffs: &[f64]) -> HaarExpansion {
        let mut dense = vec![0.0; 1usize << self.level];
        for ((index, scale), a) in self.indices.iter().zip(&self.scales).zip(coeffs) {
            dense[index.linear()] = a / scale;
        }
        HaarExpansion::from_dense(self.level, dense).expect("level already validated")
    }

    /// Coordinates of an expansion in the normalized system (dropped indices
    /// are ignored).
    pub fn from_expansion(&self, e: &HaarExpansion) -> Vec<f64> {
        self.indices.iter().zip(&self.scales).map(|(&i, s)| e.get(i) * s).collect()
    }
}

impl Basis for HaarXp {
    fn dim(&self) -> usize {
        self.indices.len()
    }

    fn norm(&self, coeffs: &[f64]) -> f64 {
        xp_norm(&self.to_expansion(coeffs), self.p, &self.weight).expect("validated exponent")
    }

    fn index_weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    fn tag(&self) -> String {
        let kind = if self.indices.first() == Some(&HaarIndex::Root) { "haar" } else { "haar0" };
        format!("{kind}:{}:{}", self.p, self.level)
    }

    fn is_lattice(&self) -> bool {
        true
    }

    fn is_smooth(&self) -> bool {
        self.p > 1.0
    }
}

/// Serializable description of a basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BasisKind {
    Lp {
        p: f64,
        dim: usize,
    },
    Summing {
        dim: usize,
    },
    Haar {
        p: f64,
        level: u32,
        /// Weight file in step-function format; Lebesgue measure when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        weight: Option<PathBuf>,
        #[serde(default)]
        intervals_only: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSpec {
    #[serde(flatten)]
    pub kind: BasisKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index_weights: Option<Vec<f64>>,
}

impl BasisSpec {
    pub fn new(kind: BasisKind) -> Self {
        Self { kind, index_weights: None }
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            BasisKind::Lp { dim, .. } | BasisKind::Summing { dim } => *dim,
            BasisKind::Haar { level, intervals_only, .. } => {
                (1usize << level) - usize::from(*intervals_only)
            }
        }
    }

    /// Instantiates the basis, reading the weight file if one is named.
    pub fn build(&self) -> Result<Box<dyn Basis>> {
        self.build_with_weight(None)
    }

    /// Like [`build`](Self::build) but with an already loaded Haar weight,
    /// which takes precedence over the file reference.
    pub fn build_with_weight(&self, loaded: Option<DyadicWeight>) -> Result<Box<dyn Basis>> {
        let basis: Box<dyn Basis> = match &self.kind {
            BasisKind::Lp { p, dim } => {
                let b = CanonicalLp::new(*p, *dim)?;
                match &self.index_weights {
                    Some(w) => Box::new(b.with_index_weights(w.clone())?),
                    None => Box::new(b),
                }
            }
            BasisKind::Summing { dim } => {
                let b = SummingBasis::new(*dim);
                match &self.index_weights {
                    Some(w) => Box::new(b.with_index_weights(w.clone())?),
                    None => Box::new(b),
                }
            }
            BasisKind::Haar { p, level, weight, intervals_only } => {
                let w = match (loaded, weight) {
                    (Some(w), _) => w,
                    (None, Some(path)) => {
                        let text = std::fs::read_to_string(path)?;
                        serde_json::from_str(&text)?
                    }
                    (None, None) => DyadicWeight::lebesgue(*level),
                };
                let b = if *intervals_only {
                    HaarXp::intervals_only(*p, w, *level)?
                } else {
                    HaarXp::new(*p, w, *level)?
                };
                match &self.index_weights {
                    Some(w) => Box::new(b.with_index_weights(w.clone())?),
                    None => Box::new(b),
                }
            }
        };
        Ok(basis)
    }
}

impl FromStr for BasisSpec {
    type Err = Error;

    /// `lp:P:N`, `summing:N`, `haar:P:L` or `haar0:P:L` (intervals only).
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("unrecognized basis {s:?}"));
        let num = |t: &str| t.parse::<f64>().map_err(|_| bad());
        let int = |t: &str| t.parse::<usize>().map_err(|_| bad());
        let kind = match parts.as_slice() {
            ["lp", p, n] => BasisKind::Lp { p: num(p)?, dim: int(n)? },
            ["summing", n] => BasisKind::Summing { dim: int(n)? },
            [kind @ ("haar" | "haar0"), p, l] => BasisKind::Haar {
                p: num(p)?,
                level: int(l)? as u32,
                weight: None,
                intervals_only: *kind == "haar0",
            },
            _ => return Err(bad()),
        };
        Ok(BasisSpec::new(kind))
    }
}

/// A vector of the basis, stored by its coefficients.
#[derive(Clone)]
pub struct Element<'b> {
    basis: &'b dyn Basis,
    coeffs: Vec<f64>,
}

impl fmt::Debug for Element<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Element")
            .field("basis", &self.basis.tag())
            .field("coeffs", &self.coeffs)
            .finish()
    }
}

impl<'b> Element<'b> {
    pub fn new(basis: &'b dyn Basis, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::LengthMismatch { expected: basis.dim(), got: coeffs.len() });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: &'b dyn Basis) -> Self {
        Self { basis, coeffs: vec![0.0; basis.dim()] }
    }

    pub fn basis(&self) -> &'b dyn Basis {
        self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.basis.norm(&self.coeffs)
    }

    pub fn support(&self) -> Vec<usize> {
        support(&self.coeffs)
    }

    pub fn greedy_ordering(&self) -> Vec<usize> {
        greedy_ordering(&self.coeffs)
    }

    /// `𝒢_m(x)`: keeps the `m` largest coefficients (ties by index).
    pub fn greedy_approximant(&self, m: usize) -> Result<Self> {
        let set = greedy_set(&self.coeffs, m)?;
        Ok(self.with_coeffs(project(&self.coeffs, &set)))
    }

    pub fn project(&self, set: &[usize]) -> Self {
        self.with_coeffs(project(&self.coeffs, set))
    }

    pub fn is_t_greedy_set(&self, set: &[usize], t: f64) -> Result<bool> {
        is_t_greedy_set(&self.coeffs, set, t)
    }

    pub fn t_greedy_sets(&self, t: f64, m: usize) -> Result<Vec<Vec<usize>>> {
        t_greedy_sets(&self.coeffs, t, m)
    }

    pub fn greedy_residual_norm(&self, set: &[usize]) -> f64 {
        greedy_residual_norm(self.basis, &self.coeffs, set)
    }

    pub fn sub(&self, other: &Element<'_>) -> Self {
        self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Element<'_>) -> Self {
        self.with_coeffs(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|a| c * a).collect())
    }

    fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        Self { basis: self.basis, coeffs }
    }
}

/// `α 1_{ηA} = α Σ_{n ∈ A} η_n e_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedIndicator {
    pub indices: Vec<usize>,
    pub signs: Vec<Sign>,
    pub scale: f64,
}

impl SignedIndicator {
    pub fn new(indices: Vec<usize>, signs: Vec<Sign>, scale: f64) -> Result<Self> {
        if indices.len() != signs.len() {
            return Err(Error::LengthMismatch { expected: indices.len(), got: signs.len() });
        }
        Ok(Self { indices, signs, scale })
    }

    /// `1_A`.
    pub fn plain(indices: Vec<usize>) -> Self {
        let signs = vec![Sign::Plus; indices.len()];
        Self { indices, signs, scale: 1.0 }
    }

    pub fn coeffs(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&n, s) in self.indices.iter().zip(&self.signs) {
            out[n] += self.scale * s.value();
        }
        out
    }
}

/// `{n : a_n != 0}`.
pub fn support(coeffs: &[f64]) -> Vec<usize> {
    coeffs.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(n, _)| n).collect()
}

/// Indices sorted by decreasing modulus, ties broken by ascending index.
pub fn greedy_ordering(coeffs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..coeffs.len()).collect();
    order.sort_by(|&a, &b| coeffs[b].abs().total_cmp(&coeffs[a].abs()).then(a.cmp(&b)));
    order
}

/// The first `m` indices of the greedy ordering, sorted ascending.
pub fn greedy_set(coeffs: &[f64], m: usize) -> Result<Vec<usize>> {
    if m > coeffs.len() {
        return Err(Error::InvalidParameter(format!("m = {m} exceeds dimension {}", coeffs.len())));
    }
    let mut set: Vec<usize> = greedy_ordering(coeffs).into_iter().take(m).collect();
    set.sort_unstable();
    Ok(set)
}

/// `P_A x`.
pub fn project(coeffs: &[f64], set: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len()];
    for &n in set {
        out[n] = coeffs[n];
    }
    out
}

/// `x - P_A x`.
pub fn project_complement(coeffs: &[f64], set: &[usize]) -> Vec<f64> {
    let mut out = coeffs.to_vec();
    for &n in set {
        out[n] = 0.0;
    }
    out
}

fn membership(dim: usize, set: &[usize]) -> Result<Vec<bool>> {
    let mut inside = vec![false; dim];
    for &n in set {
        if n >= dim {
            return Err(Error::IndexOutOfRange { index: n, dim });
        }
        inside[n] = true;
    }
    Ok(inside)
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("t must lie in (0,1], got {t}")))
    }
}

/// `min_{n ∈ Γ} |a_n| >= t max_{n ∉ Γ} |a_n|` (empty max is 0).
pub fn is_t_greedy_set(coeffs: &[f64], set: &[usize], t: f64) -> Result<bool> {
    is_t_greedy_set_within(coeffs, set, t, 0.0)
}

/// [`is_t_greedy_set`] allowing the right-hand side to exceed the left by a
/// relative `slack`, for sets built by floating-point arithmetic.
pub fn is_t_greedy_set_within(coeffs: &[f64], set: &[usize], t: f64, slack: f64) -> Result<bool> {
    check_t(t)?;
    let inside = membership(coeffs.len(), set)?;
    let mut min_in = f64::INFINITY;
    let mut max_out = 0.0f64;
    for (n, a) in coeffs.iter().enumerate() {
        if inside[n] {
            min_in = min_in.min(a.abs());
        } else {
            max_out = max_out.max(a.abs());
        }
    }
    Ok(min_in >= t * max_out * (1.0 - slack))
}

/// Calls `visit` on every `k`-subset of `0..n` (ascending within a subset).
pub fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, buf: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if buf.len() == k {
            visit(buf);
            return;
        }
        let need = k - buf.len();
        for i in start..=n - need {
            buf.push(i);
            go(i + 1, n, k, buf, visit);
            buf.pop();
        }
    }
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut visit);
    }
}

/// `𝒢(x, t, m)`: every `t`-greedy set of cardinality `m`.
pub fn t_greedy_sets(coeffs: &[f64], t: f64, m: usize) -> Result<Vec<Vec<usize>>> {
    check_t(t)?;
    let n = coeffs.len();
    if n > ENUMERATION_LIMIT {
        return Err(Error::EnumerationTooLarge { size: n, limit: ENUMERATION_LIMIT });
    }
    if m > n {
        return Err(Error::InvalidParameter(format!("m = {m} exceeds dimension {n}")));
    }
    let mut out = Vec::new();
    for_each_combination(n, m, |set| {
        if is_t_greedy_set(coeffs, set, t).expect("validated t") {
            out.push(set.to_vec());
        }
    });
    Ok(out)
}

/// A random member of `𝒢(x, t, m)`.
///
/// Picks the index `k` that will be the largest discarded coefficient, forces
/// every strictly larger coefficient into the set, and fills the remaining
/// slots from the coefficients in `[t|a_k|, |a_k|]`.
pub fn sample_t_greedy_set(coeffs: &[f64], t: f64, m: usize, rng: &mut impl Rng) -> Result<Vec<usize>> {
    check_t(t)?;
    let n = coeffs.len();
    if m > n {
        return Err(Error::InvalidParameter(format!("m = {m} exceeds dimension {n}")));
    }
    if m == n {
        return Ok((0..n).collect());
    }
    let abs: Vec<f64> = coeffs.iter().map(|a| a.abs()).collect();
    let mut pivots = Vec::new();
    for k in 0..n {
        let forced = (0..n).filter(|&i| i != k && abs[i] > abs[k]).count();
        let optional =
            (0..n).filter(|&i| i != k && abs[i] <= abs[k] && abs[i] >= t * abs[k]).count();
        if forced <= m && m <= forced + optional {
            pivots.push(k);
        }
    }
    // the greedy ordering's (m+1)-th index is always a feasible pivot
    let k = *pivots.choose(rng).expect("feasible pivot exists");
    let mut set: Vec<usize> = (0..n).filter(|&i| i != k && abs[i] > abs[k]).collect();
    let mut optional: Vec<usize> =
        (0..n).filter(|&i| i != k && abs[i] <= abs[k] && abs[i] >= t * abs[k]).collect();
    optional.shuffle(rng);
    set.extend(optional.into_iter().take(m - set.len()));
    set.sort_unstable();
    Ok(set)
}

/// `ω(A) = Σ_{n ∈ A} ω_n`.
pub fn support_weight(basis: &dyn Basis, set: &[usize]) -> f64 {
    set.iter().map(|&n| basis.index_weight(n)).sum()
}

/// `‖x - P_Γ x‖`.
pub fn greedy_residual_norm(basis: &dyn Basis, coeffs: &[f64], set: &[usize]) -> f64 {
    basis.norm(&project_complement(coeffs, set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ordering_examples() {
        assert_eq!(greedy_ordering(&[0.5, -2.0, 1.0]), vec![1, 2, 0]);
        assert_eq!(greedy_ordering(&[1.0, 1.0]), vec![0, 1]);
        assert_eq!(greedy_ordering(&[0.0; 4]), vec![0, 1, 2, 3]);
        assert_eq!(greedy_ordering(&[-1.0, 1.0, 0.5, -1.0]), vec![0, 1, 3, 2]);
    }

    #[test]
    fn approximant_examples() {
        let b = CanonicalLp::new(2.0, 3).unwrap();
        let x = Element::new(&b, vec![0.5, -2.0, 1.0]).unwrap();
        assert_eq!(x.greedy_approximant(2).unwrap().coeffs(), &[0.0, -2.0, 1.0]);
        assert_eq!(x.greedy_approximant(0).unwrap().coeffs(), &[0.0; 3]);
        assert_eq!(x.greedy_approximant(3).unwrap().coeffs(), x.coeffs());
        assert!(x.greedy_approximant(4).is_err());
    }

    #[test]
    fn t_greedy_examples() {
        let x = [0.9, 1.0, 0.5];
        assert!(is_t_greedy_set(&x, &[0], 0.8).unwrap());
        assert!(!is_t_greedy_set(&x, &[2], 0.8).unwrap());
        assert!(is_t_greedy_set(&[0.0, 3.0, 0.0], &[1, 2], 0.1).unwrap());
        assert!(is_t_greedy_set(&x, &[], 1.0).unwrap());
        assert!(is_t_greedy_set(&[0.0, 0.0], &[], 1.0).unwrap());
        assert!(is_t_greedy_set(&x, &[0], 0.0).is_err());
        assert!(is_t_greedy_set(&x, &[0], 1.5).is_err());
        assert!(is_t_greedy_set(&x, &[5], 0.5).is_err());

        assert_eq!(t_greedy_sets(&x, 0.8, 1).unwrap(), vec![vec![0], vec![1]]);
        assert_eq!(t_greedy_sets(&x, 1.0, 2).unwrap(), vec![vec![0, 1]]);
        assert_eq!(t_greedy_sets(&x, 0.3, 3).unwrap(), vec![vec![0, 1, 2]]);
        assert!(matches!(
            t_greedy_sets(&[1.0; 25], 1.0, 1),
            Err(Error::EnumerationTooLarge { size: 25, .. })
        ));
    }

    #[test]
    fn sampler_produces_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..300 {
            let n = rng.gen_range(1..10);
            let x: Vec<f64> = (0..n)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-1.0..1.0) })
                .collect();
            let t = [0.3, 0.7, 1.0][rng.gen_range(0..3)];
            let m = rng.gen_range(0..=n);
            let set = sample_t_greedy_set(&x, t, m, &mut rng).unwrap();
            assert_eq!(set.len(), m);
            assert!(is_t_greedy_set(&x, &set, t).unwrap(), "{x:?} {set:?} {t}");
            assert!(t_greedy_sets(&x, t, m).unwrap().contains(&set));
        }
    }

    #[test]
    fn sampler_reaches_every_member() {
        let x = [0.9, 1.0, 0.5, 0.85, 0.1];
        let all = t_greedy_sets(&x, 0.8, 2).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            seen.insert(sample_t_greedy_set(&x, 0.8, 2, &mut rng).unwrap());
        }
        assert_eq!(seen.into_iter().collect::<Vec<_>>(), all);
    }

    #[test]
    fn projection_and_weights() {
        let x = [1.0, -2.0, 0.0, 4.0];
        assert_eq!(project(&x, &[0, 1, 2, 3]), x.to_vec());
        assert_eq!(project(&x, &[]), vec![0.0; 4]);
        assert_eq!(project(&x, &support(&x)), x.to_vec());
        let a = project(&x, &[1, 3]);
        assert_eq!(project(&a, &[1, 3]), a);
        let c = project_complement(&x, &[1, 3]);
        assert_eq!(a.iter().zip(&c).map(|(p, q)| p + q).collect::<Vec<_>>(), x.to_vec());

        let b = CanonicalLp::new(2.0, 4).unwrap();
        assert_eq!(support_weight(&b, &[0, 2, 3]), 3.0);
        assert_eq!(support_weight(&b, &[]), 0.0);
        let b = b.with_index_weights(vec![0.5, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(support_weight(&b, &[0, 3]), support_weight(&b, &[0]) + support_weight(&b, &[3]));
        assert!(CanonicalLp::new(2.0, 2).unwrap().with_index_weights(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn residual_examples() {
        let lp = CanonicalLp::new(2.0, 3).unwrap();
        let x = [3.0, 2.0, 1.0];
        assert_eq!(greedy_residual_norm(&lp, &x, &support(&x)), 0.0);
        assert!((greedy_residual_norm(&lp, &x, &[0]) - 5f64.sqrt()).abs() < 1e-15);
        let s = SummingBasis::new(2);
        assert_eq!(greedy_residual_norm(&s, &[1.0, -1.0], &[0]), 1.0);
    }

    #[test]
    fn bases_are_normalized() {
        let bases: Vec<Box<dyn Basis>> = vec![
            Box::new(CanonicalLp::new(1.5, 6).unwrap()),
            Box::new(SummingBasis::new(6)),
            Box::new(HaarXp::new(3.0, DyadicWeight::log_uniform(3, 1.0, 4).unwrap(), 3).unwrap()),
            Box::new(
                HaarXp::intervals_only(1.5, DyadicWeight::log_uniform(4, 1.0, 5).unwrap(), 3).unwrap(),
            ),
        ];
        for b in &bases {
            for n in 0..b.dim() {
                let mut e = vec![0.0; b.dim()];
                e[n] = 1.0;
                assert!((b.norm(&e) - 1.0).abs() < 1e-12, "{} e_{n}", b.tag());
            }
        }
    }

    #[test]
    fn haar_coordinates_round_trip() {
        let w = DyadicWeight::log_uniform(4, 1.0, 6).unwrap();
        let b = HaarXp::new(2.5, w, 4).unwrap();
        let a: Vec<f64> = (0..16).map(|k| (k as f64).sin()).collect();
        let back = b.from_expansion(&b.to_expansion(&a));
        for (x, y) in a.iter().zip(&back) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(b.position(b.index(5)), Some(5));
        let seq = IndexedSequence::uniform(3, 0.5, 2.0, 1).unwrap();
        let b = b.with_interval_weights(&seq).unwrap();
        assert_eq!(b.index_weight(0), 1.0);
        assert_eq!(b.index_weight(3), seq.get(&b.interval(3).unwrap()));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(
            "lp:2:8".parse::<BasisSpec>().unwrap().kind,
            BasisKind::Lp { p: 2.0, dim: 8 }
        );
        assert_eq!("summing:5".parse::<BasisSpec>().unwrap().dim(), 5);
        assert_eq!("haar:2:3".parse::<BasisSpec>().unwrap().dim(), 8);
        assert_eq!("haar0:2:3".parse::<BasisSpec>().unwrap().dim(), 7);
        assert!("lp:2".parse::<BasisSpec>().is_err());
        let spec: BasisSpec = serde_json::from_str(r#"{"kind":"haar","p":2.0,"level":3}"#).unwrap();
        let b = spec.build().unwrap();
        assert_eq!(b.dim(), 8);
        assert_eq!(b.tag(), "haar:2:3");
        let json = serde_json::to_string(&"lp:1.5:4".parse::<BasisSpec>().unwrap()).unwrap();
        assert_eq!(json, r#"{"kind":"lp","p":1.5,"dim":4}"#);
    }
}

//! `pccg`: weight reports, Haar norm tables, constant estimates, the
//! equivalence-proof checks, the weighted Haar suite and one-shot oracle
//! queries.
//!
//! Exit codes: 0 success, 1 a checked property was violated, 2 usage or
//! input error. Keys in a `--config` file override the matching flags.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pccg_core::bench::{
    estimate_democracy, estimate_greedy_and_pccg, estimate_suppression_constant,
    estimate_symmetry_largest, haar_weight_suite, verify_theorem3, weight_report, write_rows,
    write_summary, BudgetMode, ConstantName, DemocracyMode, ExperimentConfig, SuiteOptions,
};
use pccg_core::haar::{haar_norm, indicator_sum_norm, HaarIndex};
use pccg_core::oracle::{d_pcc, sigma, Budget};
use pccg_core::{DyadicInterval, DyadicWeight};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "pccg", version, about = "Greedy approximation and dyadic weight experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Dyadic resolution level.
    #[arg(long, global = true)]
    level: Option<u32>,
    /// Also write the result here (CSV sample rows for greedy estimates).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file mirroring the experiment configuration; its keys win over flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

/// Flags shared by the subcommands that map onto configuration keys.
#[derive(Args, Default)]
struct Shared {
    /// `lp:P:N`, `summing:N`, `haar:P:L` or `haar0:P:L`.
    #[arg(long)]
    basis: Option<String>,
    /// JSON step function `{"level": L, "values": [...]}`.
    #[arg(long)]
    weight: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    s: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    alpha: Vec<f64>,
    /// `count` or `weight`.
    #[arg(long)]
    budget: Option<BudgetMode>,
}

#[derive(Subcommand)]
enum Command {
    /// A_p, reverse doubling and Carleson constants of a weight.
    CheckWeight(Shared),
    /// Haar function norms and indicator sums over full levels.
    HaarNorms(Shared),
    /// Estimate one constant.
    Estimate {
        /// K_s, C_s, democracy, w-democracy, greedy or pccg.
        #[arg(long = "const")]
        constant: ConstantName,
        #[command(flatten)]
        shared: Shared,
    },
    /// Check the memberships and inequalities of the equivalence proof.
    VerifyTheorem3(Shared),
    /// Weight constants, indicator-sum lemmas and the end-to-end Haar bound.
    HaarSuite(Shared),
    /// One best-approximation query.
    Oracle {
        #[arg(long, value_enum)]
        kind: OracleChoice,
        /// Cardinality budget.
        #[arg(long, conflicts_with = "delta")]
        m: Option<usize>,
        /// Weight budget.
        #[arg(long)]
        delta: Option<f64>,
        /// Comma-separated coefficients.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x: Vec<f64>,
        #[command(flatten)]
        shared: Shared,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleChoice {
    Sigma,
    #[value(alias = "dpcc")]
    Dstar,
}

enum Status {
    Ok,
    Violated,
}

/// Merged settings; `level` stays `None` unless a flag or the config set it.
struct Settings {
    cfg: ExperimentConfig,
    level: Option<u32>,
}

impl Settings {
    fn load(global: &Global, shared: &Shared) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut level = global.level;
        if let Some(v) = global.seed {
            cfg.seed = v;
        }
        if let Some(v) = global.samples {
            cfg.samples = v;
        }
        if let Some(v) = global.tol {
            cfg.tol = v;
        }
        if let Some(v) = &global.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = &shared.basis {
            cfg.basis = v.clone();
        }
        if let Some(v) = &shared.weight {
            cfg.weight = Some(v.clone());
        }
        if let Some(v) = shared.budget {
            cfg.budget = v;
        }
        for (flag, field) in [(&shared.p, &mut cfg.p), (&shared.t, &mut cfg.t), (&shared.s, &mut cfg.s), (&shared.alpha, &mut cfg.alpha)] {
            if !flag.is_empty() {
                *field = flag.clone();
            }
        }
        if let Some(path) = &global.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
            let file: ExperimentConfig =
                toml::from_str(&text).map_err(|e| anyhow!("malformed config {}: {e}", path.display()))?;
            let keys: toml::Table = toml::from_str(&text)?;
            for key in keys.keys() {
                match key.as_str() {
                    "basis" => cfg.basis = file.basis.clone(),
                    "weight" => cfg.weight = file.weight.clone(),
                    "t" => cfg.t = file.t.clone(),
                    "s" => cfg.s = file.s.clone(),
                    "p" => cfg.p = file.p.clone(),
                    "alpha" => cfg.alpha = file.alpha.clone(),
                    "budget" => cfg.budget = file.budget,
                    "samples" => cfg.samples = file.samples,
                    "seed" => cfg.seed = file.seed,
                    "level" => level = Some(file.level),
                    "tol" => cfg.tol = file.tol,
                    "interval_weights" => cfg.interval_weights = file.interval_weights,
                    "out" => cfg.out = file.out.clone(),
                    _ => unreachable!("unknown keys are rejected while parsing"),
                }
            }
        }
        if let Some(l) = level {
            cfg.level = l;
        }
        cfg.validate()?;
        Ok(Self { cfg, level })
    }

    fn weight(&self) -> Result<Option<DyadicWeight>> {
        match &self.cfg.weight {
            None => Ok(None),
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading weight {}", path.display()))?;
                let w = serde_json::from_str(&text).map_err(|e| anyhow!("weight {}: {e}", path.display()))?;
                Ok(Some(w))
            }
        }
    }

    fn required_weight(&self) -> Result<DyadicWeight> {
        self.weight()?.ok_or_else(|| anyhow!("this command needs --weight or a `weight` config key"))
    }

    /// The configured level, or the weight's own resolution.
    fn level_for(&self, weight: &DyadicWeight) -> u32 {
        self.level.unwrap_or(weight.level())
    }

    fn single_t(&self) -> Result<f64> {
        match self.cfg.t[..] {
            [t] => Ok(t),
            _ => bail!("expected exactly one t, got {:?}", self.cfg.t),
        }
    }
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    write_summary(std::io::stdout().lock(), value)?;
    if let Some(path) = out {
        write_summary(fs::File::create(path)?, value)?;
    }
    Ok(())
}

fn check_weight(s: &Settings) -> Result<Status> {
    let weight = s.required_weight()?;
    let level = s.level_for(&weight);
    let report = weight_report(&weight, &s.cfg.p, &s.cfg.alpha, level)?;
    emit(s.cfg.out.as_deref(), &report)?;
    Ok(if report.remark.iter().all(|r| r.holds) { Status::Ok } else { Status::Violated })
}

fn haar_norms(s: &Settings) -> Result<Status> {
    let loaded = s.weight()?;
    let level = loaded.as_ref().map_or(s.level.unwrap_or(s.cfg.level), |w| s.level_for(w));
    let weight = loaded.unwrap_or_else(|| DyadicWeight::lebesgue(level));
    let mut tables = Vec::new();
    for &p in &s.cfg.p {
        let norms = HaarIndex::all(level)
            .map(|i| Ok(json!({"index": i.to_string(), "norm": haar_norm(i, p, &weight)?})))
            .collect::<Result<Vec<_>>>()?;
        let sums = (0..level)
            .map(|n| {
                let family: Vec<HaarIndex> = DyadicInterval::at_level(n).map(HaarIndex::Interval).collect();
                let norm = indicator_sum_norm(&family, &[], p, &weight, level)?;
                let card = family.len() as f64;
                Ok(json!({"level": n, "card": family.len(), "norm": norm, "per_card": norm / card.powf(1.0 / p)}))
            })
            .collect::<Result<Vec<_>>>()?;
        tables.push(json!({"p": p, "haar_norms": norms, "indicator_sums": sums}));
    }
    emit(s.cfg.out.as_deref(), &json!({"level": level, "tables": tables}))?;
    Ok(Status::Ok)
}

fn estimate(s: &Settings, constant: ConstantName) -> Result<Status> {
    let basis = s.cfg.basis_spec()?.build()?;
    let sampling = s.cfg.sampling();
    let summary = match constant {
        ConstantName::Suppression => estimate_suppression_constant(basis.as_ref(), &sampling)?,
        ConstantName::Symmetry => estimate_symmetry_largest(basis.as_ref(), &sampling)?,
        ConstantName::Democracy => estimate_democracy(basis.as_ref(), DemocracyMode::Cardinality, &sampling)?,
        ConstantName::WeightDemocracy => estimate_democracy(basis.as_ref(), DemocracyMode::Weight, &sampling)?,
        ConstantName::Greedy | ConstantName::Pccg => {
            let joint = estimate_greedy_and_pccg(basis.as_ref(), s.single_t()?, s.cfg.budget, &sampling)?;
            if let Some(path) = &s.cfg.out {
                write_rows(fs::File::create(path)?, &joint.rows)?;
            }
            let est = if constant == ConstantName::Greedy { joint.greedy } else { joint.pccg };
            write_summary(std::io::stdout().lock(), &est)?;
            return Ok(Status::Ok);
        }
    };
    emit(s.cfg.out.as_deref(), &summary)?;
    Ok(Status::Ok)
}

fn theorem3(s: &Settings) -> Result<Status> {
    let basis = s.cfg.basis_spec()?.build()?;
    let sampling = s.cfg.sampling();
    let mut reports = Vec::new();
    for &sv in &s.cfg.s {
        for &t in &s.cfg.t {
            reports.push(verify_theorem3(basis.as_ref(), sv, t, &sampling)?);
        }
    }
    emit(s.cfg.out.as_deref(), &reports)?;
    let clean = reports.iter().all(|r| {
        r.memberships_passed() && r.violations_per_pass.last() == Some(&0) && r.final_bound.corrected_violations == 0
    });
    for r in reports.iter().filter(|r| !r.memberships_passed()) {
        eprintln!("bug: membership check failed for s={} t={}", r.s, r.t);
    }
    Ok(if clean { Status::Ok } else { Status::Violated })
}

fn haar_suite(s: &Settings) -> Result<Status> {
    let weight = s.required_weight()?;
    let opts = SuiteOptions {
        p: s.cfg.p.clone(),
        alpha: s.cfg.alpha.clone(),
        t: s.cfg.t.clone(),
        level: s.level_for(&weight),
        interval_weights: s.cfg.interval_weights,
        sampling: s.cfg.sampling(),
    };
    let report = haar_weight_suite(&weight, &opts)?;
    emit(s.cfg.out.as_deref(), &report)?;
    Ok(if report.violations() == 0 { Status::Ok } else { Status::Violated })
}

fn oracle(s: &Settings, kind: OracleChoice, m: Option<usize>, delta: Option<f64>, x: &[f64]) -> Result<Status> {
    let basis = s.cfg.basis_spec()?.build()?;
    if x.len() != basis.dim() {
        bail!("--x has {} coefficients but {} has dimension {}", x.len(), s.cfg.basis, basis.dim());
    }
    let budget = match (m, delta) {
        (Some(m), _) => Budget::Count(m),
        (None, Some(d)) => Budget::Weight(d),
        (None, None) => bail!("give --m or --delta"),
    };
    let opts = s.cfg.sampling().oracle();
    let result = match kind {
        OracleChoice::Sigma => sigma(basis.as_ref(), x, budget, &opts)?,
        OracleChoice::Dstar => d_pcc(basis.as_ref(), x, budget, &opts)?,
    };
    emit(s.cfg.out.as_deref(), &result)?;
    Ok(Status::Ok)
}

fn run(cli: Cli) -> Result<Status> {
    let g = &cli.global;
    match &cli.command {
        Command::CheckWeight(sh) => check_weight(&Settings::load(g, sh)?),
        Command::HaarNorms(sh) => haar_norms(&Settings::load(g, sh)?),
        Command::Estimate { constant, shared } => estimate(&Settings::load(g, shared)?, *constant),
        Command::VerifyTheorem3(sh) => theorem3(&Settings::load(g, sh)?),
        Command::HaarSuite(sh) => haar_suite(&Settings::load(g, sh)?),
        Command::Oracle { kind, m, delta, x, shared } => oracle(&Settings::load(g, shared)?, *kind, *m, *delta, x),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violated) => ExitCode::from(1),
        Err(e) => {
            let _ = std::io::stdout().flush();
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

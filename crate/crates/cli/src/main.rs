//! `autog`: command-line front end for network auto-g-computation.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use autog::automodel::{CovariateParams, ModelParams, OutcomeParams};
use autog::effects::{
    bootstrap_effects, estimate_effects, normal_resample_effects, AllocationPolicy, BootstrapConfig, CiType,
    EffectEstimates, EffectMode, EffectSettings, UncertaintyMethod, UncertaintyPlan,
};
use autog::fit::{fit_models, fit_treatment, CovarianceForm, Estimator, FitOptions, FitResult};
use autog::gibbs::{run_chain_blockwise, write_snapshots, ChainSettings, TreatmentMode, DEFAULT_BLOCK_SWEEPS};
use autog::io::{format_node_csv, read_node_csv, read_text};
use autog::netgraph::{
    find_max_stable_set_with, format_edge_list, parse_edge_list, random_graph, NetworkGraph, StableSet,
    StableSetStrategy, DEFAULT_STABLE_SET_RESTARTS,
};
use autog::oracle::Oracle;
use autog::seed;
use autog::study::{run_study, Density, StudyConfig};
use autog::Error;

use config::{config_hash, load_params, load_study_config, write_file, Envelope};

#[derive(Parser, Debug)]
#[command(name = "autog", version, about = "Direct and spillover effects on a single observed network")]
struct Cli {
    /// Worker threads for replicate loops (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Increase log verbosity (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random network with degrees drawn uniformly from a range.
    GenGraph(GenGraphArgs),
    /// Simulate one (L, A, Y) realization by blockwise Gibbs sampling.
    Simulate(SimulateArgs),
    /// Fit the covariate, outcome and (optionally) treatment models.
    Fit(FitArgs),
    /// Estimate allocation-averaged effects from fitted parameters.
    Effects(EffectsArgs),
    /// Exact effects on a tiny network by enumeration.
    Oracle(OracleArgs),
    /// Run a simulation study and report bias, variance and coverage.
    ReproduceStudy(StudyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum DensityArg {
    Low,
    Med,
    High,
}

impl From<DensityArg> for Density {
    fn from(d: DensityArg) -> Self {
        match d {
            DensityArg::Low => Density::Low,
            DensityArg::Med => Density::Medium,
            DensityArg::High => Density::High,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum EstimatorArg {
    Coding,
    Pl,
}

impl From<EstimatorArg> for Estimator {
    fn from(e: EstimatorArg) -> Self {
        match e {
            EstimatorArg::Coding => Estimator::Coding,
            EstimatorArg::Pl => Estimator::Pl,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModeArg {
    RaoBlackwell,
    ExactClamp,
}

impl From<ModeArg> for EffectMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::RaoBlackwell => EffectMode::RaoBlackwell,
            ModeArg::ExactClamp => EffectMode::ExactClamp,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum UncertaintyArg {
    Bootstrap,
    Normal,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum CiArg {
    Wald,
    Quantile,
}

impl From<CiArg> for CiType {
    fn from(c: CiArg) -> Self {
        match c {
            CiArg::Wald => CiType::Wald,
            CiArg::Quantile => CiType::Quantile,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum StrategyArg {
    Shuffled,
    MinDegree,
}

impl From<StrategyArg> for StableSetStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Shuffled => StableSetStrategy::Shuffled,
            StrategyArg::MinDegree => StableSetStrategy::MinDegree,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum CovarianceArg {
    OuterProduct,
    NegativeHessian,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum PresetArg {
    Low,
    Med,
    High,
    SharpNull,
    MissingEdges,
}

/// Stable-set search options shared by commands that need one.
#[derive(Args, Debug, Clone, Serialize)]
struct StableSetArgs {
    /// Greedy strategy for the stable-set search.
    #[arg(long = "stable-set", value_enum, default_value = "min-degree")]
    strategy: StrategyArg,
    /// Randomized restarts of the stable-set search.
    #[arg(long, default_value_t = DEFAULT_STABLE_SET_RESTARTS)]
    restarts: usize,
}

impl StableSetArgs {
    fn find(&self, g: &NetworkGraph, seed: u64) -> StableSet {
        find_max_stable_set_with(g, self.restarts, self.strategy.into(), seed::derive(seed, 0x5e7))
    }
}

#[derive(Args, Debug, Serialize)]
struct GenGraphArgs {
    #[arg(long)]
    n: usize,
    /// Density class: low [2,4], med [5,7], high [8,10].
    #[arg(long, value_enum, conflicts_with_all = ["min_deg", "max_deg"])]
    density: Option<DensityArg>,
    #[arg(long, requires = "max_deg")]
    min_deg: Option<usize>,
    #[arg(long, requires = "min_deg")]
    max_deg: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    stable: StableSetArgs,
    /// Edge-list output file.
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Parameter file (JSON or TOML), or `baseline` / `sharp-null`.
    #[arg(long, default_value = "baseline")]
    params: String,
    #[arg(long, default_value_t = 4000)]
    sweeps: usize,
    #[arg(long, default_value_t = 1000)]
    burn_in: usize,
    #[arg(long, default_value_t = 3)]
    thin: usize,
    /// Treatment and outcome sweeps per retained covariate snapshot.
    #[arg(long, default_value_t = DEFAULT_BLOCK_SWEEPS)]
    block_sweeps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Node-data CSV output (the last retained sweep).
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
    /// Also dump every retained sweep to this CSV.
    #[arg(long)]
    #[serde(skip)]
    snapshots: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct FitArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value = "coding")]
    estimator: EstimatorArg,
    /// Also fit the treatment model.
    #[arg(long)]
    treatment: bool,
    #[arg(long, value_enum, default_value = "outer-product")]
    covariance: CovarianceArg,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    stable: StableSetArgs,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct EffectsArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Fitted parameters (`model.json` from `fit`), or `baseline` / `sharp-null`.
    #[arg(long)]
    params: String,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "rao-blackwell")]
    mode: ModeArg,
    /// Allocation draws R.
    #[arg(long, default_value_t = 5)]
    draws: usize,
    /// Retained sweeps K per chain.
    #[arg(long, default_value_t = 50)]
    sweeps: usize,
    #[arg(long, default_value_t = 10)]
    burn_in: usize,
    /// Average over units with at least one tie only.
    #[arg(long)]
    connected_only: bool,
    #[arg(long, value_enum)]
    uncertainty: Option<UncertaintyArg>,
    /// Bootstrap replicates B or normal draws J.
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    #[arg(long, value_enum, default_value = "wald")]
    ci: CiArg,
    /// Observed node data (bootstrap).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Estimator used for bootstrap refits.
    #[arg(long, value_enum, default_value = "coding")]
    estimator: EstimatorArg,
    /// Directory written by `fit` (normal resampling reads its covariances).
    #[arg(long)]
    fit: Option<PathBuf>,
    /// Thinning of the bootstrap data chain.
    #[arg(long, default_value_t = 3)]
    thin: usize,
    #[arg(long, default_value_t = 1000)]
    data_burn_in: usize,
    /// Outcome sweeps per bootstrap data set.
    #[arg(long, default_value_t = DEFAULT_BLOCK_SWEEPS)]
    block_sweeps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[command(flatten)]
    stable: StableSetArgs,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct OracleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "baseline")]
    params: String,
    #[arg(long, default_value_t = 0.7)]
    alpha: f64,
    /// Comma-separated intervention for per-unit means, e.g. `1,0,1`.
    #[arg(long)]
    treatment: Option<String>,
    /// Output JSON file; stdout when absent.
    #[arg(long)]
    #[serde(skip)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct StudyArgs {
    #[arg(long, value_enum, default_value = "low")]
    preset: PresetArg,
    /// JSON or TOML file overriding preset fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Replicate data sets S.
    #[arg(long)]
    replicates: Option<usize>,
    /// Bootstrap replicates B (0 disables the bootstrap).
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, value_enum)]
    estimator: Option<EstimatorArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Total data-chain sweeps; with --burn-in and --thin this fixes S.
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    burn_in: Option<usize>,
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long)]
    missing_fraction: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

/// Writes to stdout, tolerating a closed pipe (e.g. `| head`).
fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn load_graph(path: &Path) -> autog::Result<NetworkGraph> {
    parse_edge_list(&read_text(path)?, None)
}

#[derive(Serialize)]
struct GraphSummary {
    n_units: usize,
    n_edges: usize,
    min_degree: usize,
    max_degree: usize,
    degree_histogram: Vec<usize>,
    stable_set_size: usize,
    brooks_lower_bound: f64,
}

fn cmd_gen_graph(a: &GenGraphArgs) -> autog::Result<()> {
    let (lo, hi) = match (a.density, a.min_deg, a.max_deg) {
        (Some(d), _, _) => Density::from(d).degree_range(),
        (None, Some(lo), Some(hi)) => (lo, hi),
        _ => return Err(Error::Usage("give --density or both --min-deg and --max-deg".into())),
    };
    let g = random_graph(a.n, lo, hi, a.seed)?;
    write_file(&a.out, &format_edge_list(&g))?;
    let s = a.stable.find(&g, a.seed);
    let degrees = g.degrees();
    let summary = GraphSummary {
        n_units: g.n_units(),
        n_edges: g.n_edges(),
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree: g.max_degree(),
        degree_histogram: g.degree_histogram(),
        stable_set_size: s.len(),
        brooks_lower_bound: g.n_units() as f64 / (g.max_degree() + 1) as f64,
    };
    emit(&Envelope::new("gen-graph", a.seed, config_hash(a), summary).to_json());
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs) -> autog::Result<()> {
    let g = load_graph(&a.graph)?;
    let m = load_params(&a.params)?;
    let tau_a = m
        .tau_a
        .clone()
        .ok_or_else(|| Error::InvalidInput("simulation needs treatment-model coefficients (tau_a)".into()))?;
    let settings = ChainSettings::new(a.sweeps, a.burn_in, a.thin, a.seed)?;
    let draws = run_chain_blockwise(&g, &m.tau_l, &m.tau_y, &TreatmentMode::Model(tau_a), &settings, a.block_sweeps)?;
    let last = draws.last().ok_or_else(|| Error::InvalidInput("no sweeps retained".into()))?;
    write_file(&a.out, &format_node_csv(last))?;
    if let Some(path) = &a.snapshots {
        let mut buf = Vec::new();
        let sweeps: Vec<usize> = settings.retained_sweeps().collect();
        write_snapshots(&mut buf, &sweeps, &draws)?;
        write_file(path, &String::from_utf8(buf).expect("csv is utf-8"))?;
    }
    Ok(())
}

fn fit_opts(cov: CovarianceArg) -> FitOptions {
    FitOptions {
        covariance: match cov {
            CovarianceArg::OuterProduct => CovarianceForm::OuterProduct,
            CovarianceArg::NegativeHessian => CovarianceForm::NegativeHessian,
        },
        ..FitOptions::default()
    }
}

#[derive(Serialize)]
struct FitDiagnostics {
    estimator: Estimator,
    n_units: usize,
    stable_set_size: usize,
    stable_fraction: f64,
    max_degree: usize,
}

fn cmd_fit(a: &FitArgs) -> autog::Result<()> {
    let g = load_graph(&a.graph)?;
    let data = read_node_csv(&a.data)?;
    let est: Estimator = a.estimator.into();
    let s = a.stable.find(&g, a.seed);
    let opts = fit_opts(a.covariance);
    let fit = fit_models(est, &g, &data, Some(&s), &opts)?;
    let p = data.n_covariates();
    let scheme = opts.weight_scheme;
    let hash = config_hash(a);
    std::fs::create_dir_all(&a.out)?;
    write_file(a.out.join("outcome.json"), &Envelope::new("fit", a.seed, hash.clone(), &fit.outcome).to_json())?;
    write_file(a.out.join("covariates.json"), &Envelope::new("fit", a.seed, hash.clone(), &fit.covariates).to_json())?;
    let tau_a = if a.treatment {
        let t: FitResult = fit_treatment(&g, &data, &opts)?;
        write_file(a.out.join("treatment.json"), &Envelope::new("fit", a.seed, hash.clone(), &t).to_json())?;
        Some(t.treatment_params(scheme)?)
    } else {
        None
    };
    let (ty, tl) = fit.params(p, scheme)?;
    let model = ModelParams::new(tl, tau_a, ty)?;
    write_file(a.out.join("model.json"), &model.to_json())?;
    let diag = FitDiagnostics {
        estimator: est,
        n_units: g.n_units(),
        stable_set_size: s.len(),
        stable_fraction: s.len() as f64 / g.n_units().max(1) as f64,
        max_degree: g.max_degree(),
    };
    write_file(a.out.join("diagnostics.json"), &Envelope::new("fit", a.seed, hash, diag).to_json())?;
    if est == Estimator::Pl {
        eprintln!(
            "note: pseudo-likelihood fits carry no covariance; use `autog effects --uncertainty bootstrap --estimator pl` for standard errors"
        );
    }
    Ok(())
}

fn read_fit(path: PathBuf) -> autog::Result<FitResult> {
    let v: serde_json::Value = serde_json::from_str(&read_text(&path)?).map_err(|e| Error::Parse(e.to_string()))?;
    let inner = v.get("result").cloned().unwrap_or(v);
    serde_json::from_value(inner).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn cmd_effects(a: &EffectsArgs) -> autog::Result<()> {
    let g = load_graph(&a.graph)?;
    let m = load_params(&a.params)?;
    let policy = AllocationPolicy::Bernoulli(a.alpha);
    let settings = EffectSettings {
        draws: a.draws,
        retained: a.sweeps,
        burn_in: a.burn_in,
        mode: a.mode.into(),
        seed: seed::derive(a.seed, 1),
        connected_only: a.connected_only,
    };
    let est: EffectEstimates = match a.uncertainty {
        None => estimate_effects(&g, &m.tau_y, &m.tau_l, policy, &settings)?,
        Some(UncertaintyArg::Bootstrap) => {
            let path = a.data.as_ref().ok_or_else(|| Error::Usage("--uncertainty bootstrap needs --data".into()))?;
            let data = read_node_csv(path)?;
            let estimator: Estimator = a.estimator.into();
            let s = a.stable.find(&g, a.seed);
            let boot = BootstrapConfig {
                estimator,
                stable_set: Some(s),
                fit: FitOptions::default().with_weight_scheme(m.weight_scheme()),
                burn_in: a.data_burn_in,
                thin: a.thin,
                block_sweeps: a.block_sweeps,
            };
            let plan = UncertaintyPlan {
                method: UncertaintyMethod::ParametricBootstrap,
                replicates: a.replicates,
                seed: seed::derive(a.seed, 2),
                ci_type: a.ci.into(),
            };
            bootstrap_effects(&g, &data, &m.tau_y, &m.tau_l, policy, &plan, &boot, &settings)?
        }
        Some(UncertaintyArg::Normal) => {
            let dir = a.fit.as_ref().ok_or_else(|| Error::Usage("--uncertainty normal needs --fit DIR".into()))?;
            let fy = read_fit(dir.join("outcome.json"))?;
            let fl = read_fit(dir.join("covariates.json"))?;
            let cy = fy.covariance_matrix().ok_or_else(|| {
                Error::Usage("normal resampling needs coding fits with covariance; pseudo-likelihood fits have none".into())
            })?;
            let cl = fl.covariance_matrix().ok_or_else(|| Error::Usage("covariate fit has no covariance".into()))?;
            let p = m.p();
            let ty = OutcomeParams::from_vector(p, &fy.estimate, m.weight_scheme())?;
            let tl = CovariateParams::from_vector(p, &fl.estimate, m.weight_scheme())?;
            let plan = UncertaintyPlan {
                method: UncertaintyMethod::NormalResample,
                replicates: a.replicates,
                seed: seed::derive(a.seed, 3),
                ci_type: a.ci.into(),
            };
            normal_resample_effects(&g, &ty, &cy, &tl, &cl, policy, &plan, &settings)?
        }
    };
    std::fs::create_dir_all(&a.out)?;
    let hash = config_hash(a);
    write_file(a.out.join("effects.json"), &Envelope::new("effects", a.seed, hash.clone(), &est).to_json())?;
    let header = format!("autog {}  seed = {}  config = {}\n", env!("CARGO_PKG_VERSION"), a.seed, hash);
    write_file(a.out.join("effects.txt"), &(header + &est.to_table(None)))?;
    emit(&est.to_table(None));
    Ok(())
}

#[derive(Serialize)]
struct OracleReport {
    beta_alpha: f64,
    direct: f64,
    spillover: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    unit_means: Option<Vec<f64>>,
}

fn cmd_oracle(a: &OracleArgs) -> autog::Result<()> {
    let g = load_graph(&a.graph)?;
    let m = load_params(&a.params)?;
    let oracle = Oracle::default();
    let e = oracle.exact_effects(&g, a.alpha, &m.tau_y, &m.tau_l)?;
    let unit_means = match &a.treatment {
        Some(t) => {
            let v = t
                .split(',')
                .map(|x| match x.trim() {
                    "0" => Ok(0u8),
                    "1" => Ok(1u8),
                    other => Err(Error::Parse(format!("treatment entry '{other}' is not 0/1"))),
                })
                .collect::<autog::Result<Vec<u8>>>()?;
            Some(oracle.exact_beta_all(&g, &v, &m.tau_y, &m.tau_l)?)
        }
        None => None,
    };
    let report = OracleReport { beta_alpha: e.beta_alpha, direct: e.direct, spillover: e.spillover, unit_means };
    let text = Envelope::new("oracle", 0, config_hash(a), report).to_json();
    match &a.out {
        Some(p) => write_file(p, &text)?,
        None => emit(&text),
    }
    Ok(())
}

fn study_config(a: &StudyArgs) -> autog::Result<StudyConfig> {
    let mut cfg = match a.preset {
        PresetArg::Low => StudyConfig::preset(Density::Low, 800),
        PresetArg::Med => StudyConfig::preset(Density::Medium, 800),
        PresetArg::High => StudyConfig::preset(Density::High, 800),
        PresetArg::SharpNull => StudyConfig::sharp_null(),
        PresetArg::MissingEdges => StudyConfig::missing_edges(0.14),
    };
    if let Some(path) = &a.config {
        cfg = load_study_config(path, cfg)?;
    }
    if let Some(n) = a.n {
        cfg.n_units = n;
        if matches!(a.preset, PresetArg::Low | PresetArg::Med | PresetArg::High) {
            let label = cfg.name.split('_').next().unwrap_or("study").to_string();
            cfg.name = format!("{label}_{n}");
        }
    }
    if let Some(s) = a.replicates {
        cfg.replicates = s;
    }
    if let Some(b) = a.bootstrap {
        if b == 0 {
            cfg.bootstrap_estimators.clear();
        } else {
            cfg.bootstrap_replicates = b;
        }
    }
    if let Some(alpha) = a.alpha {
        cfg.alpha = alpha;
    }
    if let Some(e) = a.estimator {
        cfg.estimators = vec![e.into()];
    }
    if let Some(m) = a.mode {
        cfg.effects.mode = m.into();
    }
    if let Some(b) = a.burn_in {
        cfg.data_burn_in = b;
    }
    if let Some(t) = a.thin {
        cfg.data_thin = t;
    }
    if let Some(m) = a.sweeps {
        if m <= cfg.data_burn_in {
            return Err(Error::InvalidInput("--sweeps must exceed the burn-in".into()));
        }
        cfg.replicates = (m - cfg.data_burn_in) / cfg.data_thin.max(1);
    }
    if let Some(f) = a.missing_fraction {
        cfg.missing_edge_fraction = Some(f);
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_reproduce_study(a: &StudyArgs) -> autog::Result<()> {
    let cfg = study_config(a)?;
    let hash = config_hash(&cfg);
    let report = run_study(&cfg, &cfg.truth_params())?;
    std::fs::create_dir_all(&a.out)?;
    write_file(a.out.join("report.json"), &Envelope::new("reproduce-study", cfg.seed, hash.clone(), &report).to_json())?;
    let header = format!("autog {}  seed = {}  config = {}\n", env!("CARGO_PKG_VERSION"), cfg.seed, hash);
    write_file(a.out.join("report.txt"), &(header + &report.to_table()))?;
    write_file(a.out.join("replicates.csv"), &report.records_csv())?;
    write_file(a.out.join("config.json"), &serde_json::to_string_pretty(&cfg).expect("config serializes"))?;
    emit(&report.to_table());
    Ok(())
}

fn exit_code(e: &Error) -> u8 {
    if e.is_convergence_failure() || matches!(e, Error::ReplicateFailures { .. }) {
        3
    } else {
        match e {
            Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch(_)
            | Error::InvalidInput(_)
            | Error::InfeasibleDegrees(_)
            | Error::EnumerationCap { .. }
            | Error::Usage(_)
            | Error::Parse(_)
            | Error::Io(_)
            | Error::NotPositiveSemidefinite(_) => 2,
            _ => 4,
        }
    }
}

fn run(cli: &Cli) -> autog::Result<()> {
    match &cli.command {
        Command::GenGraph(a) => cmd_gen_graph(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Effects(a) => cmd_effects(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::ReproduceStudy(a) => cmd_reproduce_study(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Some(w) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: cannot size worker pool: {e}");
            return ExitCode::from(4);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

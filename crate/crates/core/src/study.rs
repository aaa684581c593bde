//! Simulation-study harness: generate a network, compute the instance truth
//! at the true parameters, simulate replicate data sets, fit, estimate
//! effects and summarize bias, Monte Carlo variance, bootstrap variance and
//! interval coverage per endpoint.
//!
//! Replicate data sets are thinned snapshots of one long data-generating
//! chain (burn-in, then every `thin`-th sweep), with treatment resampled from
//! its own auto-model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automodel::{CovariateParams, FieldSample, ModelParams, OutcomeParams, TreatmentParams};
use crate::effects::{
    bootstrap_effects, estimate_effects, AllocationPolicy, BootstrapConfig, CiType, EffectEstimates, EffectMode,
    EffectSettings, EndpointIntervals, Endpoints, UncertaintyMethod, UncertaintyPlan,
};
use crate::error::{Error, Result};
use crate::fit::{fit_models, fit_treatment, Estimator, FitOptions, ModelFit};
use crate::gibbs::{run_chain_blockwise, ChainSettings, TreatmentMode, DEFAULT_BLOCK_SWEEPS};
use crate::netgraph::{
    find_max_stable_set_with, random_graph, remove_random_edges, NetworkGraph, StableSet, StableSetStrategy,
    DEFAULT_STABLE_SET_RESTARTS,
};
use crate::seed::{self, TAG_DATA, TAG_EFFECTS, TAG_GRAPH, TAG_TRUTH, TAG_UNIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    Low,
    Medium,
    High,
}

impl Density {
    /// Inclusive degree range of the class.
    pub fn degree_range(self) -> (usize, usize) {
        match self {
            Density::Low => (2, 4),
            Density::Medium => (5, 7),
            Density::High => (8, 10),
        }
    }
}

impl std::str::FromStr for Density {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Density::Low),
            "med" | "medium" => Ok(Density::Medium),
            "high" => Ok(Density::High),
            _ => Err(Error::InvalidInput(format!("unknown density class '{s}'"))),
        }
    }
}

/// Built-in truth parameters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthDesign {
    #[default]
    Baseline,
    /// Baseline design with treatment removed from the outcome model.
    SharpNull,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub name: String,
    pub design: TruthDesign,
    pub n_units: usize,
    pub degree_min: usize,
    pub degree_max: usize,
    /// Replicate data sets `S`.
    pub replicates: usize,
    pub data_burn_in: usize,
    pub data_thin: usize,
    /// Treatment and outcome sweeps per retained covariate snapshot, for
    /// both data generation and bootstrap regeneration.
    #[serde(default = "default_block_sweeps")]
    pub block_sweeps: usize,
    pub alpha: f64,
    pub estimators: Vec<Estimator>,
    /// Estimators whose effects get bootstrap standard errors and intervals.
    pub bootstrap_estimators: Vec<Estimator>,
    /// Bootstrap replicates `B`.
    pub bootstrap_replicates: usize,
    pub bootstrap_burn_in: usize,
    pub bootstrap_thin: usize,
    pub ci_type: CiType,
    /// Settings for effect estimates on each replicate; the seed is
    /// replaced per replicate.
    pub effects: EffectSettings,
    /// Allocation draws for the instance truth.
    pub truth_draws: usize,
    pub truth_retained: usize,
    /// When set, every estimator is also run on an analysis graph missing
    /// this fraction of edges.
    pub missing_edge_fraction: Option<f64>,
    pub stable_set_strategy: StableSetStrategy,
    pub stable_set_restarts: usize,
    pub fit_treatment: bool,
    pub seed: u64,
}

fn default_block_sweeps() -> usize {
    DEFAULT_BLOCK_SWEEPS
}

impl StudyConfig {
    /// Alpha 0.7, coding with bootstrap and pseudo-likelihood point
    /// estimates, 100 replicates.
    pub fn preset(density: Density, n_units: usize) -> Self {
        let (degree_min, degree_max) = density.degree_range();
        Self {
            name: format!("{}_{n_units}", match density {
                Density::Low => "low",
                Density::Medium => "medium",
                Density::High => "high",
            }),
            design: TruthDesign::Baseline,
            n_units,
            degree_min,
            degree_max,
            replicates: 100,
            data_burn_in: 1000,
            data_thin: 3,
            block_sweeps: DEFAULT_BLOCK_SWEEPS,
            alpha: 0.7,
            estimators: vec![Estimator::Coding, Estimator::Pl],
            bootstrap_estimators: vec![Estimator::Coding],
            bootstrap_replicates: 200,
            bootstrap_burn_in: 1000,
            bootstrap_thin: 3,
            ci_type: CiType::Wald,
            effects: EffectSettings { draws: 1, ..EffectSettings::default() },
            truth_draws: 200,
            truth_retained: 50,
            missing_edge_fraction: None,
            stable_set_strategy: StableSetStrategy::MinDegree,
            stable_set_restarts: DEFAULT_STABLE_SET_RESTARTS,
            fit_treatment: true,
            seed: 2024,
        }
    }

    /// No treatment in the outcome model; alpha 0.5; 400 units.
    pub fn sharp_null() -> Self {
        Self {
            name: "sharp_null".into(),
            design: TruthDesign::SharpNull,
            alpha: 0.5,
            estimators: vec![Estimator::Coding],
            ..Self::preset(Density::Low, 400)
        }
    }

    /// High density, 800 units, 14% of edges missing from the analysis
    /// graph; point estimates only.
    pub fn missing_edges(fraction: f64) -> Self {
        Self {
            name: "missing_edges".into(),
            estimators: vec![Estimator::Coding, Estimator::Pl],
            bootstrap_estimators: vec![],
            missing_edge_fraction: Some(fraction),
            ..Self::preset(Density::High, 800)
        }
    }

    pub fn truth_params(&self) -> ModelParams {
        match self.design {
            TruthDesign::Baseline => ModelParams::baseline(),
            TruthDesign::SharpNull => ModelParams::sharp_null(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 || self.data_thin == 0 || self.n_units == 0 || self.block_sweeps == 0 {
            return Err(Error::InvalidInput("study counts must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidInput(format!("allocation probability {} not in [0, 1]", self.alpha)));
        }
        if self.estimators.is_empty() {
            return Err(Error::InvalidInput("no estimators selected".into()));
        }
        if !self.bootstrap_estimators.is_empty() && self.bootstrap_replicates < 2 {
            return Err(Error::InvalidInput("bootstrap needs at least two replicates".into()));
        }
        if let Some(f) = self.missing_edge_fraction {
            if !(0.0..1.0).contains(&f) {
                return Err(Error::InvalidInput(format!("missing-edge fraction {f} not in [0, 1)")));
            }
        }
        Ok(())
    }
}

/// One estimator applied to one analysis graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub label: String,
    pub estimator: Estimator,
    pub missing_edges: bool,
    pub bootstrap: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub replicate: usize,
    pub analysis: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<Endpoints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<Endpoints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci95: Option<EndpointIntervals>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcome_params: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covariate_params: Vec<f64>,
    /// Coding Wald interval coverage of each outcome coefficient.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outcome_covered: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointSummary {
    pub endpoint: String,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    pub mc_variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub robust_variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coverage: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub name: String,
    pub truth: f64,
    pub mean: f64,
    pub bias: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wald_coverage: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisSummary {
    pub analysis: Analysis,
    /// Replicates that converged and entered the summaries.
    pub used: usize,
    pub excluded: usize,
    pub endpoints: Vec<EndpointSummary>,
    pub parameters: Vec<ParameterSummary>,
}

impl AnalysisSummary {
    pub fn endpoint(&self, name: &str) -> Option<&EndpointSummary> {
        self.endpoints.iter().find(|e| e.endpoint == name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub name: String,
    pub version: String,
    pub seed: u64,
    pub n_units: usize,
    pub n_edges: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analysis_edges: Option<usize>,
    pub max_degree: usize,
    pub stable_set_size: usize,
    pub alpha: f64,
    pub replicates: usize,
    pub truth: EffectEstimates,
    pub analyses: Vec<AnalysisSummary>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub treatment_parameters: Vec<ParameterSummary>,
    pub records: Vec<ReplicateRecord>,
}

impl StudyReport {
    pub fn analysis(&self, label: &str) -> Option<&AnalysisSummary> {
        self.analyses.iter().find(|a| a.analysis.label == label)
    }

    /// The bias / variance / coverage table, one block per analysis.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "study {}  N = {}  |E| = {}  n_1 = {}  alpha = {}  S = {}\n",
            self.name, self.n_units, self.n_edges, self.stable_set_size, self.alpha, self.replicates
        );
        if let Some(e) = self.analysis_edges {
            out.push_str(&format!("analysis graph edges = {e}\n"));
        }
        for a in &self.analyses {
            out.push_str(&format!("\n[{}]  used = {}  excluded = {}\n", a.analysis.label, a.used, a.excluded));
            out.push_str(&format!(
                "{:<12}{:>10}{:>10}{:>12}{:>12}{:>10}\n",
                "endpoint", "truth", "bias", "mc_var", "robust_var", "coverage"
            ));
            for e in &a.endpoints {
                let opt = |v: Option<f64>, prec: usize| v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"));
                out.push_str(&format!(
                    "{:<12}{:>10.4}{:>10.4}{:>12.6}{:>12}{:>10}\n",
                    e.endpoint,
                    e.truth,
                    e.bias,
                    e.mc_variance,
                    opt(e.robust_variance, 6),
                    opt(e.coverage, 3)
                ));
            }
        }
        out
    }

    /// Per-replicate estimates as CSV, ready for plotting.
    pub fn records_csv(&self) -> String {
        let mut out = String::from("replicate,analysis,beta_alpha,direct,spillover,se_beta_alpha,se_direct,se_spillover\n");
        for r in &self.records {
            let e = r.estimate.map(|e| e.to_array());
            let s = r.se.map(|e| e.to_array());
            let cell = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.replicate,
                r.analysis,
                cell(e.map(|v| v[0])),
                cell(e.map(|v| v[1])),
                cell(e.map(|v| v[2])),
                cell(s.map(|v| v[0])),
                cell(s.map(|v| v[1])),
                cell(s.map(|v| v[2]))
            ));
        }
        out
    }
}

fn analyses(cfg: &StudyConfig) -> Vec<Analysis> {
    let graphs: &[bool] = if cfg.missing_edge_fraction.is_some() { &[false, true] } else { &[false] };
    let mut out = Vec::new();
    for &missing in graphs {
        for &est in &cfg.estimators {
            let name = match est {
                Estimator::Coding => "coding",
                Estimator::Pl => "pl",
            };
            out.push(Analysis {
                label: if missing { format!("{name}_missing_edges") } else { name.to_string() },
                estimator: est,
                missing_edges: missing,
                bootstrap: cfg.bootstrap_estimators.contains(&est),
            });
        }
    }
    out
}

struct Setting<'a> {
    cfg: &'a StudyConfig,
    truth: &'a ModelParams,
    truth_effects: Endpoints,
    graphs: [&'a NetworkGraph; 2],
    sets: [&'a StableSet; 2],
}

fn run_analysis(st: &Setting<'_>, a: &Analysis, r: usize, data: &FieldSample) -> ReplicateRecord {
    let mut rec = ReplicateRecord {
        replicate: r,
        analysis: a.label.clone(),
        error: None,
        estimate: None,
        se: None,
        ci95: None,
        outcome_params: vec![],
        covariate_params: vec![],
        outcome_covered: vec![],
    };
    let idx = usize::from(a.missing_edges);
    let (g, s) = (st.graphs[idx], st.sets[idx]);
    let cfg = st.cfg;
    let scheme = st.truth.weight_scheme();
    let p = st.truth.p();
    let opts = FitOptions::default().with_weight_scheme(scheme);
    let fit: ModelFit = match fit_models(a.estimator, g, data, Some(s), &opts) {
        Ok(f) => f,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    rec.outcome_params = fit.outcome.estimate.clone();
    rec.covariate_params = fit.covariates.estimate.clone();
    if let Ok(iv) = fit.outcome.wald_intervals(crate::effects::Z_95) {
        let truth = st.truth.tau_y.to_vector();
        rec.outcome_covered = iv.iter().zip(&truth).map(|(&(lo, hi), &t)| lo <= t && t <= hi).collect();
    }
    let (ty, tl): (OutcomeParams, CovariateParams) = match fit.params(p, scheme) {
        Ok(v) => v,
        Err(e) => {
            rec.error = Some(e.to_string());
            return rec;
        }
    };
    let settings = EffectSettings {
        seed: seed::derive_path(cfg.seed, &[TAG_EFFECTS, r as u64]),
        ..cfg.effects.clone()
    };
    let policy = AllocationPolicy::Bernoulli(cfg.alpha);
    let res = if a.bootstrap {
        let plan = UncertaintyPlan {
            method: UncertaintyMethod::ParametricBootstrap,
            replicates: cfg.bootstrap_replicates,
            seed: seed::derive_path(cfg.seed, &[TAG_UNIT, r as u64]),
            ci_type: cfg.ci_type,
        };
        let boot = BootstrapConfig {
            estimator: a.estimator,
            stable_set: Some(s.clone()),
            fit: opts.clone(),
            burn_in: cfg.bootstrap_burn_in,
            thin: cfg.bootstrap_thin,
            block_sweeps: cfg.block_sweeps,
        };
        bootstrap_effects(g, data, &ty, &tl, policy, &plan, &boot, &settings)
    } else {
        estimate_effects(g, &ty, &tl, policy, &settings)
    };
    match res {
        Ok(e) => {
            rec.estimate = Some(e.endpoints());
            rec.se = e.se;
            rec.ci95 = e.ci95;
        }
        Err(e) => rec.error = Some(e.to_string()),
    }
    rec
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

fn variance(v: &[f64]) -> f64 {
    let s = crate::effects::sample_sd(v);
    s * s
}

fn summarize(a: &Analysis, records: &[&ReplicateRecord], truth: &Endpoints, params: &ModelParams) -> AnalysisSummary {
    let ok: Vec<&&ReplicateRecord> = records.iter().filter(|r| r.estimate.is_some()).collect();
    let t = truth.to_array();
    let endpoints = (0..3)
        .map(|e| {
            let vals: Vec<f64> = ok.iter().map(|r| r.estimate.unwrap().to_array()[e]).collect();
            let ses: Vec<f64> = ok.iter().filter_map(|r| r.se.map(|s| s.to_array()[e])).collect();
            let cis: Vec<bool> = ok.iter().filter_map(|r| r.ci95.map(|c| c.to_array()[e].contains(t[e]))).collect();
            let m = mean(&vals);
            EndpointSummary {
                endpoint: Endpoints::NAMES[e].into(),
                truth: t[e],
                mean: m,
                bias: m - t[e],
                mc_variance: variance(&vals),
                robust_variance: (!ses.is_empty()).then(|| mean(&ses.iter().map(|s| s * s).collect::<Vec<_>>())),
                coverage: (!cis.is_empty()).then(|| cis.iter().filter(|&&c| c).count() as f64 / cis.len() as f64),
            }
        })
        .collect();
    let p = params.p();
    let mut parameters = Vec::new();
    let blocks: [(Vec<String>, Vec<f64>, fn(&ReplicateRecord) -> &Vec<f64>); 2] = [
        (OutcomeParams::names(p), params.tau_y.to_vector(), |r| &r.outcome_params),
        (CovariateParams::names(p), params.tau_l.to_vector(), |r| &r.covariate_params),
    ];
    let fitted: Vec<&&ReplicateRecord> = records.iter().filter(|r| !r.outcome_params.is_empty()).collect();
    for (b, (names, truth, get)) in blocks.iter().enumerate() {
        for (j, name) in names.iter().enumerate() {
            let vals: Vec<f64> = fitted.iter().map(|r| get(r)[j]).collect();
            let covered: Vec<bool> =
                if b == 0 { fitted.iter().filter_map(|r| r.outcome_covered.get(j).copied()).collect() } else { vec![] };
            let m = mean(&vals);
            parameters.push(ParameterSummary {
                name: name.clone(),
                truth: truth[j],
                mean: m,
                bias: m - truth[j],
                wald_coverage: (!covered.is_empty())
                    .then(|| covered.iter().filter(|&&c| c).count() as f64 / covered.len() as f64),
            });
        }
    }
    AnalysisSummary { analysis: a.clone(), used: ok.len(), excluded: records.len() - ok.len(), endpoints, parameters }
}

/// Instance truth: effects at the true parameters on the true graph with
/// many allocation draws.
pub fn instance_truth(g: &NetworkGraph, truth: &ModelParams, cfg: &StudyConfig) -> Result<EffectEstimates> {
    let settings = EffectSettings {
        draws: cfg.truth_draws,
        retained: cfg.truth_retained,
        seed: seed::derive(cfg.seed, TAG_TRUTH),
        ..cfg.effects.clone()
    };
    estimate_effects(g, &truth.tau_y, &truth.tau_l, AllocationPolicy::Bernoulli(cfg.alpha), &settings)
}

/// Replicate data sets: thinned snapshots of one covariate chain, each with
/// treatment and outcome re-equilibrated blockwise for `block_sweeps` sweeps.
pub fn simulate_datasets(
    g: &NetworkGraph,
    truth: &ModelParams,
    count: usize,
    burn_in: usize,
    thin: usize,
    block_sweeps: usize,
    seed: u64,
) -> Result<Vec<FieldSample>> {
    let tau_a = truth
        .tau_a
        .clone()
        .ok_or_else(|| Error::InvalidInput("data generation needs a treatment model".into()))?;
    let settings = ChainSettings::new(burn_in + count * thin, burn_in, thin, seed)?;
    run_chain_blockwise(g, &truth.tau_l, &truth.tau_y, &TreatmentMode::Model(tau_a), &settings, block_sweeps)
}

/// Runs the study on a supplied network (or a fresh random one).
pub fn run_study_on(cfg: &StudyConfig, g: &NetworkGraph, truth: &ModelParams) -> Result<StudyReport> {
    cfg.validate()?;
    let analysis_graph = match cfg.missing_edge_fraction {
        Some(f) => remove_random_edges(g, f, seed::derive_path(cfg.seed, &[TAG_GRAPH, 1]))?,
        None => g.clone(),
    };
    let find = |h: &NetworkGraph| {
        find_max_stable_set_with(h, cfg.stable_set_restarts, cfg.stable_set_strategy, seed::derive_path(cfg.seed, &[TAG_GRAPH, 2]))
    };
    let set_full = find(g);
    let set_missing = find(&analysis_graph);
    log::info!("study {}: {} units, {} edges, stable set {}", cfg.name, g.n_units(), g.n_edges(), set_full.len());
    let truth_effects = instance_truth(g, truth, cfg)?;
    log::info!(
        "truth beta = {:.4}, DE = {:.4}, IE = {:.4}",
        truth_effects.beta_alpha,
        truth_effects.direct,
        truth_effects.spillover
    );
    let data = simulate_datasets(
        g,
        truth,
        cfg.replicates,
        cfg.data_burn_in,
        cfg.data_thin,
        cfg.block_sweeps,
        seed::derive(cfg.seed, TAG_DATA),
    )?;
    let list = analyses(cfg);
    let setting = Setting {
        cfg,
        truth,
        truth_effects: truth_effects.endpoints(),
        graphs: [g, &analysis_graph],
        sets: [&set_full, &set_missing],
    };
    let per_rep: Vec<(Vec<ReplicateRecord>, Option<Vec<f64>>)> = data
        .par_iter()
        .enumerate()
        .map(|(r, d)| {
            let recs: Vec<ReplicateRecord> = list.iter().map(|a| run_analysis(&setting, a, r, d)).collect();
            let treat = cfg
                .fit_treatment
                .then(|| fit_treatment(g, d, &FitOptions::default().with_weight_scheme(truth.weight_scheme())).ok())
                .flatten()
                .map(|f| f.estimate);
            log::debug!("replicate {r} done");
            (recs, treat)
        })
        .collect();
    let mut records = Vec::new();
    let mut treat_fits = Vec::new();
    for (recs, t) in per_rep {
        records.extend(recs);
        treat_fits.extend(t);
    }
    let analyses = list
        .iter()
        .map(|a| {
            let rs: Vec<&ReplicateRecord> = records.iter().filter(|r| r.analysis == a.label).collect();
            summarize(a, &rs, &setting.truth_effects, truth)
        })
        .collect();
    let treatment_parameters = match (&truth.tau_a, treat_fits.is_empty()) {
        (Some(ta), false) => TreatmentParams::names(truth.p())
            .into_iter()
            .enumerate()
            .map(|(j, name)| {
                let m = mean(&treat_fits.iter().map(|v| v[j]).collect::<Vec<_>>());
                ParameterSummary { name, truth: ta.gamma[j], mean: m, bias: m - ta.gamma[j], wald_coverage: None }
            })
            .collect(),
        _ => vec![],
    };
    Ok(StudyReport {
        name: cfg.name.clone(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: cfg.seed,
        n_units: g.n_units(),
        n_edges: g.n_edges(),
        analysis_edges: cfg.missing_edge_fraction.map(|_| analysis_graph.n_edges()),
        max_degree: g.max_degree(),
        stable_set_size: set_full.len(),
        alpha: cfg.alpha,
        replicates: cfg.replicates,
        truth: truth_effects,
        analyses,
        treatment_parameters,
        records,
    })
}

/// Generates the network from the configured size and degree range, then
/// runs the study.
pub fn run_study(cfg: &StudyConfig, truth: &ModelParams) -> Result<StudyReport> {
    cfg.validate()?;
    let g = random_graph(cfg.n_units, cfg.degree_min, cfg.degree_max, seed::derive(cfg.seed, TAG_GRAPH))?;
    run_study_on(cfg, &g, truth)
}

/// Effect mode used throughout a study.
pub fn with_mode(mut cfg: StudyConfig, mode: EffectMode) -> StudyConfig {
    cfg.effects.mode = mode;
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> StudyConfig {
        StudyConfig {
            replicates: 4,
            data_burn_in: 20,
            bootstrap_replicates: 3,
            bootstrap_burn_in: 10,
            truth_draws: 2,
            effects: EffectSettings { draws: 1, retained: 5, burn_in: 2, ..EffectSettings::default() },
            ..StudyConfig::preset(Density::Low, 60)
        }
    }

    #[test]
    fn small_study_runs_and_is_deterministic() {
        let cfg = tiny();
        let a = run_study(&cfg, &cfg.truth_params()).unwrap();
        let b = run_study(&cfg, &cfg.truth_params()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.analyses.len(), 2);
        let coding = a.analysis("coding").unwrap();
        assert_eq!(coding.used + coding.excluded, 4);
        assert_eq!(coding.endpoints.len(), 3);
        assert_eq!(coding.parameters.len(), 22);
        assert!(a.analysis("pl").unwrap().endpoints[0].coverage.is_none());
        assert_eq!(a.records_csv().lines().count(), 1 + 8);
        assert!(a.to_table().contains("[coding]"));
    }

    #[test]
    fn missing_edges_doubles_analyses() {
        let cfg = StudyConfig {
            bootstrap_estimators: vec![],
            missing_edge_fraction: Some(0.14),
            ..tiny()
        };
        let r = run_study(&cfg, &cfg.truth_params()).unwrap();
        assert_eq!(r.analyses.len(), 4);
        assert!(r.analysis_edges.unwrap() < r.n_edges);
        assert!(r.analysis("pl_missing_edges").is_some());
    }

    #[test]
    fn presets() {
        assert_eq!(StudyConfig::sharp_null().truth_params().tau_y.beta_a, 0.0);
        assert_eq!(StudyConfig::missing_edges(0.14).degree_min, 8);
        assert_eq!("med".parse::<Density>().unwrap().degree_range(), (5, 7));
        let mut bad = tiny();
        bad.alpha = 2.0;
        assert!(bad.validate().is_err());
    }
}

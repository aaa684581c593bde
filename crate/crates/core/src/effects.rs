//! Allocation-averaged direct and spillover effects by Gibbs-sampled network
//! g-computation, with parametric-bootstrap and normal-resampling
//! uncertainty.
//!
//! For allocation draw `r` the treatment vector `a^(r)` is i.i.d.
//! Bernoulli(alpha). Writing `psi_i(d)` for the mean outcome of unit `i` with
//! its own treatment set to `d` and the others' drawn from the policy, the
//! endpoints are
//!
//! * `beta(alpha)`: network mean outcome under the policy;
//! * `DE(alpha) = mean_i psi_i(1) - psi_i(0)`;
//! * `IE(alpha) = mean_i psi_i(0) - beta_i(0)`, with `beta_i(0)` the mean
//!   under no treatment at all.
//!
//! Two evaluation modes exist. `RaoBlackwell` runs one chain per draw and
//! evaluates each unit's outcome conditional with its own treatment swapped
//! in place; the other units' outcomes evolved under the drawn treatment, so
//! this is a (small) approximation. `ExactClamp` runs a separate chain for
//! each unit and arm. In both modes every chain for draw `r` shares one seed,
//! so contrasts use common random numbers, and allocation and chain streams
//! are separate, so `alpha = 0` gives a spillover of exactly zero.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automodel::{CovariateParams, FieldSample, OutcomeParams};
use crate::error::{Error, Result};
use crate::fit::{fit_models, Estimator, FitOptions};
use crate::gibbs::{self, run_with, ChainSettings, Init, ScanOrder, TreatmentMode};
use crate::netgraph::{NetworkGraph, StableSet};
use crate::seed::{self, TAG_ALLOCATION, TAG_CHAIN, TAG_PARAMS, TAG_REPLICATE};

/// Below this many retained draws in total a warning is logged.
pub const MIN_DRAWS_WARNING: usize = 100;
/// Fraction of failed bootstrap refits above which the bootstrap aborts.
pub const MAX_FAILED_FRACTION: f64 = 0.2;
pub const Z_95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationPolicy {
    Bernoulli(f64),
    AllTreated,
    NoneTreated,
}

impl AllocationPolicy {
    pub fn alpha(self) -> f64 {
        match self {
            AllocationPolicy::Bernoulli(a) => a,
            AllocationPolicy::AllTreated => 1.0,
            AllocationPolicy::NoneTreated => 0.0,
        }
    }

    pub fn validate(self) -> Result<()> {
        let a = self.alpha();
        if (0.0..=1.0).contains(&a) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("allocation probability {a} not in [0, 1]")))
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectMode {
    #[default]
    RaoBlackwell,
    ExactClamp,
}

impl std::str::FromStr for EffectMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rao-blackwell" | "rao_blackwell" => Ok(EffectMode::RaoBlackwell),
            "exact-clamp" | "exact_clamp" => Ok(EffectMode::ExactClamp),
            _ => Err(Error::InvalidInput(format!("unknown effect mode '{s}'"))),
        }
    }
}

/// Monte Carlo settings for the point estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectSettings {
    /// Allocation draws `R`.
    pub draws: usize,
    /// Retained sweeps `K` per chain.
    pub retained: usize,
    /// Burn-in `m*` per chain.
    pub burn_in: usize,
    pub mode: EffectMode,
    pub seed: u64,
    /// Average over units with at least one tie only.
    pub connected_only: bool,
}

impl Default for EffectSettings {
    fn default() -> Self {
        Self {
            draws: 5,
            retained: gibbs::DEFAULT_RETAINED,
            burn_in: gibbs::DEFAULT_BURN_IN,
            mode: EffectMode::RaoBlackwell,
            seed: 0,
            connected_only: false,
        }
    }
}

impl EffectSettings {
    fn validate(&self) -> Result<()> {
        if self.draws == 0 || self.retained == 0 {
            return Err(Error::InvalidInput("effects need at least one allocation draw and one retained sweep".into()));
        }
        if self.draws * self.retained < MIN_DRAWS_WARNING {
            // Resampling loops re-enter here once per replicate; warn once.
            static WARNED: std::sync::Once = std::sync::Once::new();
            WARNED.call_once(|| log::warn!(
                "only {} allocation draws x {} retained sweeps; Monte Carlo error may be large",
                self.draws,
                self.retained
            ));
        }
        Ok(())
    }

    fn chain(&self, seed: u64) -> ChainSettings {
        ChainSettings {
            total_sweeps: self.burn_in + self.retained,
            burn_in: self.burn_in,
            thin: 1,
            seed,
            init: Init::BernoulliHalf,
            scan: ScanOrder::Systematic,
        }
    }
}

/// The three reported endpoints.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Endpoints {
    pub beta_alpha: f64,
    pub direct: f64,
    pub spillover: f64,
}

impl Endpoints {
    pub const NAMES: [&'static str; 3] = ["beta_alpha", "direct", "spillover"];

    pub fn to_array(self) -> [f64; 3] {
        [self.beta_alpha, self.direct, self.spillover]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self { beta_alpha: v[0], direct: v[1], spillover: v[2] }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EndpointIntervals {
    pub beta_alpha: Interval,
    pub direct: Interval,
    pub spillover: Interval,
}

impl EndpointIntervals {
    pub fn to_array(self) -> [Interval; 3] {
        [self.beta_alpha, self.direct, self.spillover]
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UncertaintyMethod {
    #[default]
    ParametricBootstrap,
    NormalResample,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiType {
    #[default]
    Wald,
    Quantile,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyPlan {
    pub method: UncertaintyMethod,
    /// `B` bootstrap replicates or `J` parameter draws.
    pub replicates: usize,
    pub seed: u64,
    pub ci_type: CiType,
}

impl UncertaintyPlan {
    pub fn new(method: UncertaintyMethod, replicates: usize, seed: u64) -> Self {
        Self { method, replicates, seed, ci_type: CiType::Wald }
    }

    fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidInput("at least two replicates are needed".into()));
        }
        Ok(())
    }
}

/// Point estimates, optionally with standard errors and intervals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectEstimates {
    pub alpha: f64,
    pub estimator_mode: EffectMode,
    pub beta_alpha: f64,
    pub direct: f64,
    pub spillover: f64,
    /// `mean_i psi_i(1)`.
    pub psi_treated: f64,
    /// `mean_i psi_i(0)`.
    pub psi_untreated: f64,
    /// Mean outcome with nobody treated.
    pub psi_none: f64,
    /// Units averaged over.
    pub units: usize,
    pub draws: usize,
    pub retained: usize,
    pub burn_in: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub se: Option<Endpoints>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci95: Option<EndpointIntervals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<UncertaintyMethod>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ci_type: Option<CiType>,
    /// Replicates that entered the standard errors.
    pub replicates: usize,
    pub failed_replicates: usize,
}

impl EffectEstimates {
    pub fn endpoints(&self) -> Endpoints {
        Endpoints { beta_alpha: self.beta_alpha, direct: self.direct, spillover: self.spillover }
    }

    /// `alpha * psi_bar(1) + (1 - alpha) * psi_bar(0)`.
    pub fn beta_alpha_mixture(&self) -> f64 {
        self.alpha * self.psi_treated + (1.0 - self.alpha) * self.psi_untreated
    }

    /// Aligned text table with optional truth column.
    pub fn to_table(&self, truth: Option<&Endpoints>) -> String {
        let mut out = format!(
            "alpha = {}  mode = {}  draws = {}  K = {}  burn-in = {}  units = {}\n",
            self.alpha,
            match self.estimator_mode {
                EffectMode::RaoBlackwell => "rao-blackwell",
                EffectMode::ExactClamp => "exact-clamp",
            },
            self.draws,
            self.retained,
            self.burn_in,
            self.units
        );
        if let Some(m) = self.uncertainty {
            out.push_str(&format!(
                "uncertainty = {}  ci = {}  replicates = {}  failed = {}\n",
                match m {
                    UncertaintyMethod::ParametricBootstrap => "bootstrap",
                    UncertaintyMethod::NormalResample => "normal",
                },
                match self.ci_type.unwrap_or_default() {
                    CiType::Wald => "wald",
                    CiType::Quantile => "quantile",
                },
                self.replicates,
                self.failed_replicates
            ));
        }
        out.push_str(&format!("{:<12}{:>10}{:>10}{:>10}{:>22}\n", "endpoint", "truth", "estimate", "se", "95% ci"));
        let est = self.endpoints().to_array();
        let se = self.se.map(|s| s.to_array());
        let ci = self.ci95.map(|c| c.to_array());
        let tr = truth.map(|t| t.to_array());
        for e in 0..3 {
            let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4}"));
            let ci_cell = ci.map_or_else(|| "-".to_string(), |c| format!("[{:.4}, {:.4}]", c[e].lower, c[e].upper));
            out.push_str(&format!(
                "{:<12}{:>10}{:>10}{:>10}{:>22}\n",
                Endpoints::NAMES[e],
                cell(tr.map(|t| t[e])),
                format!("{:.4}", est[e]),
                cell(se.map(|s| s[e])),
                ci_cell
            ));
        }
        out
    }
}

#[derive(Clone, Copy, Default)]
struct Sums {
    beta: f64,
    psi1: f64,
    psi0: f64,
    zero: f64,
}

fn units_of(g: &NetworkGraph, connected_only: bool) -> Vec<usize> {
    (0..g.n_units()).filter(|&i| !connected_only || g.degree(i) > 0).collect()
}

fn allocation(g: &NetworkGraph, alpha: f64, seed: u64, r: usize) -> Vec<u8> {
    let mut rng = seed::rng(seed::derive_path(seed, &[TAG_ALLOCATION, r as u64]));
    gibbs::draw_allocation(g.n_units(), alpha, &mut rng)
}

fn chain_seed(seed: u64, r: usize) -> u64 {
    seed::derive_path(seed, &[TAG_CHAIN, r as u64])
}

/// Mean of `Pr(Y_i = 1 | blanket)` over retained sweeps of a chain at `a`,
/// per listed unit.
fn clamped_means(
    g: &NetworkGraph,
    tau_l: &CovariateParams,
    tau_y: &OutcomeParams,
    a: Vec<u8>,
    units: &[usize],
    chain: &ChainSettings,
) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; units.len()];
    run_with(g, tau_l, tau_y, &TreatmentMode::Fixed(a), chain, |_, s| {
        for (slot, &i) in acc.iter_mut().zip(units) {
            *slot += s.outcome_prob_current(i);
        }
    })?;
    Ok(acc)
}

fn rao_blackwell_draw(
    g: &NetworkGraph,
    tau_l: &CovariateParams,
    tau_y: &OutcomeParams,
    a: Vec<u8>,
    units: &[usize],
    chain: &ChainSettings,
) -> Result<Sums> {
    // Per-unit accumulators in the same order as `clamped_means`, so equal
    // inputs give bit-equal sums.
    let n = units.len();
    let (mut beta, mut psi1, mut psi0) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    run_with(g, tau_l, tau_y, &TreatmentMode::Fixed(a), chain, |_, s| {
        for (u, &i) in units.iter().enumerate() {
            beta[u] += s.outcome_prob_current(i);
            psi1[u] += s.outcome_prob(i, 1);
            psi0[u] += s.outcome_prob(i, 0);
        }
    })?;
    Ok(Sums {
        beta: beta.iter().sum(),
        psi1: psi1.iter().sum(),
        psi0: psi0.iter().sum(),
        zero: clamped_means(g, tau_l, tau_y, vec![0; g.n_units()], units, chain)?.iter().sum(),
    })
}

fn exact_clamp_draw(
    g: &NetworkGraph,
    tau_l: &CovariateParams,
    tau_y: &OutcomeParams,
    a: Vec<u8>,
    units: &[usize],
    chain: &ChainSettings,
    alpha: f64,
) -> Result<Sums> {
    let per_unit: Vec<(f64, f64)> = units
        .par_iter()
        .map(|&i| {
            let arm = |d: u8| -> Result<f64> {
                let mut ai = a.clone();
                ai[i] = d;
                Ok(clamped_means(g, tau_l, tau_y, ai, &[i], chain)?[0])
            };
            Ok((arm(1)?, arm(0)?))
        })
        .collect::<Result<_>>()?;
    let mut sums = Sums {
        psi1: per_unit.iter().map(|x| x.0).sum(),
        psi0: per_unit.iter().map(|x| x.1).sum(),
        ..Sums::default()
    };
    sums.beta = alpha * sums.psi1 + (1.0 - alpha) * sums.psi0;
    sums.zero = clamped_means(g, tau_l, tau_y, vec![0; g.n_units()], units, chain)?.iter().sum();
    Ok(sums)
}

/// Point estimates of `beta(alpha)`, `DE(alpha)` and `IE(alpha)`.
pub fn estimate_effects(
    g: &NetworkGraph,
    tau_y: &OutcomeParams,
    tau_l: &CovariateParams,
    policy: AllocationPolicy,
    settings: &EffectSettings,
) -> Result<EffectEstimates> {
    policy.validate()?;
    settings.validate()?;
    tau_y.validate()?;
    if tau_l.p() != tau_y.p() {
        return Err(Error::DimensionMismatch("covariate and outcome models disagree on p".into()));
    }
    if !tau_y.to_vector().iter().chain(tau_l.to_vector().iter()).all(|v| v.is_finite()) {
        return Err(Error::InvalidInput("parameters must be finite".into()));
    }
    let alpha = policy.alpha();
    let units = units_of(g, settings.connected_only);
    if units.is_empty() {
        return Err(Error::InvalidInput("no units to average over".into()));
    }
    let per_draw: Vec<Sums> = (0..settings.draws)
        .into_par_iter()
        .map(|r| {
            let a = allocation(g, alpha, settings.seed, r);
            let chain = settings.chain(chain_seed(settings.seed, r));
            match settings.mode {
                EffectMode::RaoBlackwell => rao_blackwell_draw(g, tau_l, tau_y, a, &units, &chain),
                EffectMode::ExactClamp => exact_clamp_draw(g, tau_l, tau_y, a, &units, &chain, alpha),
            }
        })
        .collect::<Result<_>>()?;
    let mut total = Sums::default();
    for s in &per_draw {
        total.beta += s.beta;
        total.psi1 += s.psi1;
        total.psi0 += s.psi0;
        total.zero += s.zero;
    }
    let denom = (settings.draws * settings.retained * units.len()) as f64;
    let (beta, psi1, psi0, zero) = (total.beta / denom, total.psi1 / denom, total.psi0 / denom, total.zero / denom);
    Ok(EffectEstimates {
        alpha,
        estimator_mode: settings.mode,
        beta_alpha: beta,
        direct: psi1 - psi0,
        spillover: psi0 - zero,
        psi_treated: psi1,
        psi_untreated: psi0,
        psi_none: zero,
        units: units.len(),
        draws: settings.draws,
        retained: settings.retained,
        burn_in: settings.burn_in,
        se: None,
        ci95: None,
        uncertainty: None,
        ci_type: None,
        replicates: 0,
        failed_replicates: 0,
    })
}

/// Sample standard deviation (denominator `n - 1`).
pub fn sample_sd(v: &[f64]) -> f64 {
    let n = v.len();
    if n < 2 {
        return 0.0;
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

/// Linear-interpolation quantile of a sample; NaN when empty.
pub fn quantile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let h = (s.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    s[lo] + (h - lo as f64) * (s[hi] - s[lo])
}

fn attach_uncertainty(
    mut est: EffectEstimates,
    reps: &[Endpoints],
    failed: usize,
    method: UncertaintyMethod,
    ci_type: CiType,
) -> EffectEstimates {
    let cols: Vec<Vec<f64>> = (0..3).map(|e| reps.iter().map(|r| r.to_array()[e]).collect()).collect();
    let se = [sample_sd(&cols[0]), sample_sd(&cols[1]), sample_sd(&cols[2])];
    let point = est.endpoints().to_array();
    let iv = |e: usize| match ci_type {
        CiType::Wald => Interval { lower: point[e] - Z_95 * se[e], upper: point[e] + Z_95 * se[e] },
        CiType::Quantile => Interval { lower: quantile(&cols[e], 0.025), upper: quantile(&cols[e], 0.975) },
    };
    est.se = Some(Endpoints::from_array(se));
    est.ci95 = Some(EndpointIntervals { beta_alpha: iv(0), direct: iv(1), spillover: iv(2) });
    est.uncertainty = Some(method);
    est.ci_type = Some(ci_type);
    est.replicates = reps.len();
    est.failed_replicates = failed;
    est
}

/// How bootstrap data sets are regenerated and refit.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapConfig {
    pub estimator: Estimator,
    /// Required for the coding estimator.
    pub stable_set: Option<StableSet>,
    pub fit: FitOptions,
    pub burn_in: usize,
    pub thin: usize,
    /// Outcome sweeps per retained covariate snapshot.
    pub block_sweeps: usize,
}

impl BootstrapConfig {
    pub fn new(estimator: Estimator, stable_set: Option<StableSet>) -> Self {
        Self {
            estimator,
            stable_set,
            fit: FitOptions::default(),
            burn_in: 1000,
            thin: 3,
            block_sweeps: gibbs::DEFAULT_BLOCK_SWEEPS,
        }
    }
}

/// Data sets for the parametric bootstrap: thinned snapshots of one
/// covariate chain at the fitted parameters, each with the outcome field
/// re-equilibrated given the observed treatment.
pub fn bootstrap_samples(
    g: &NetworkGraph,
    observed: &FieldSample,
    tau_y: &OutcomeParams,
    tau_l: &CovariateParams,
    count: usize,
    boot: &BootstrapConfig,
    seed: u64,
) -> Result<Vec<FieldSample>> {
    let settings =
        ChainSettings::new(boot.burn_in + count * boot.thin, boot.burn_in, boot.thin, seed::derive(seed, TAG_REPLICATE))?;
    let mode = TreatmentMode::Fixed(observed.treatment().to_vec());
    gibbs::run_chain_blockwise(g, tau_l, tau_y, &mode, &settings, boot.block_sweeps)
}

/// Parametric bootstrap around fitted parameters. Each replicate is refit
/// with the configured estimator and its effects recomputed with the same
/// Monte Carlo seed as the point estimate.
pub fn bootstrap_effects(
    g: &NetworkGraph,
    observed: &FieldSample,
    tau_y: &OutcomeParams,
    tau_l: &CovariateParams,
    policy: AllocationPolicy,
    plan: &UncertaintyPlan,
    boot: &BootstrapConfig,
    settings: &EffectSettings,
) -> Result<EffectEstimates> {
    if plan.method != UncertaintyMethod::ParametricBootstrap {
        return Err(Error::Usage("bootstrap_effects needs a parametric-bootstrap plan".into()));
    }
    plan.validate()?;
    let point = estimate_effects(g, tau_y, tau_l, policy, settings)?;
    let samples = bootstrap_samples(g, observed, tau_y, tau_l, plan.replicates, boot, plan.seed)?;
    let p = tau_y.p();
    let outcomes: Vec<Result<Endpoints>> = samples
        .par_iter()
        .map(|d| {
            let fit = fit_models(boot.estimator, g, d, boot.stable_set.as_ref(), &boot.fit)?;
            let ty = fit.outcome.outcome_params(p, tau_y.weight_scheme)?;
            let tl = fit.covariates.covariate_params(p, tau_l.weight_scheme)?;
            Ok(estimate_effects(g, &ty, &tl, policy, settings)?.endpoints())
        })
        .collect();
    let mut reps = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for o in outcomes {
        match o {
            Ok(e) => reps.push(e),
            Err(e) if e.is_convergence_failure() => {
                log::debug!("bootstrap refit failed: {e}");
                failed += 1;
            }
            Err(e) => return Err(e),
        }
    }
    let total = plan.replicates;
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 || reps.len() < 2 {
        return Err(Error::ReplicateFailures { failed, total, limit: 100.0 * MAX_FAILED_FRACTION });
    }
    Ok(attach_uncertainty(point, &reps, failed, UncertaintyMethod::ParametricBootstrap, plan.ci_type))
}

/// `J` draws from `N(mean, cov)`. Small negative eigenvalues from rounding
/// are clipped; clearly negative ones are an error.
pub fn mvn_draws(mean: &[f64], cov: &DMatrix<f64>, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let d = mean.len();
    if cov.nrows() != d || cov.ncols() != d {
        return Err(Error::DimensionMismatch(format!("covariance is {}x{}, mean has {d} entries", cov.nrows(), cov.ncols())));
    }
    let sym = (cov + cov.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-8 * scale.max(1.0) {
        return Err(Error::NotPositiveSemidefinite(min));
    }
    let root = &eig.eigenvectors * DMatrix::from_diagonal(&eig.eigenvalues.map(|v| v.max(0.0).sqrt()));
    let mu = DVector::from_column_slice(mean);
    Ok((0..count)
        .map(|j| {
            let mut rng = seed::rng(seed::derive_path(seed, &[TAG_PARAMS, j as u64]));
            let z = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
            (&mu + &root * z).iter().copied().collect()
        })
        .collect())
}

/// Effects under parameter vectors drawn from the fitted normal
/// approximations of both models.
pub fn normal_resample_effects(
    g: &NetworkGraph,
    tau_y: &OutcomeParams,
    cov_y: &DMatrix<f64>,
    tau_l: &CovariateParams,
    cov_l: &DMatrix<f64>,
    policy: AllocationPolicy,
    plan: &UncertaintyPlan,
    settings: &EffectSettings,
) -> Result<EffectEstimates> {
    if plan.method != UncertaintyMethod::NormalResample {
        return Err(Error::Usage("normal_resample_effects needs a normal-resample plan".into()));
    }
    plan.validate()?;
    let point = estimate_effects(g, tau_y, tau_l, policy, settings)?;
    let p = tau_y.p();
    let dy = mvn_draws(&tau_y.to_vector(), cov_y, plan.replicates, seed::derive(plan.seed, 1))?;
    let dl = mvn_draws(&tau_l.to_vector(), cov_l, plan.replicates, seed::derive(plan.seed, 2))?;
    let reps: Vec<Endpoints> = dy
        .par_iter()
        .zip(dl.par_iter())
        .map(|(vy, vl)| {
            let ty = OutcomeParams::from_vector(p, vy, tau_y.weight_scheme)?;
            let tl = CovariateParams::from_vector(p, vl, tau_l.weight_scheme)?;
            Ok(estimate_effects(g, &ty, &tl, policy, settings)?.endpoints())
        })
        .collect::<Result<_>>()?;
    Ok(attach_uncertainty(point, &reps, 0, UncertaintyMethod::NormalResample, plan.ci_type))
}

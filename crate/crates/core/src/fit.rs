//! Coding and pseudo-likelihood estimation of the outcome, covariate and
//! treatment auto-models.
//!
//! Every objective is a sum of logistic log-likelihood terms whose design
//! rows are fixed given the data, so all of them share one Newton-Raphson
//! maximizer. Coding objectives sum over a stable set only; pseudo-likelihood
//! objectives sum over every unit.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::automodel::{
    covariate_features, expit, outcome_features, softplus, treatment_features, CovariateParams, FieldSample,
    OutcomeParams, TreatmentParams, WeightScheme,
};
use crate::error::{Error, Result};
use crate::netgraph::{NetworkGraph, StableSet};

/// Coefficients larger than this in magnitude, with a gradient that has not
/// vanished, are treated as diverging.
pub const SEPARATION_BOUND: f64 = 15.0;
const MAX_BACKTRACKS: usize = 50;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    #[default]
    Coding,
    Pl,
}

impl std::str::FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coding" => Ok(Estimator::Coding),
            "pl" => Ok(Estimator::Pl),
            _ => Err(Error::InvalidInput(format!("unknown estimator '{s}' (expected coding or pl)"))),
        }
    }
}

/// Which matrix estimates the information of a coding outcome fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceForm {
    #[default]
    OuterProduct,
    NegativeHessian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub ridge: f64,
    /// Starting point; zeros when absent.
    pub init: Option<Vec<f64>>,
    pub weight_scheme: WeightScheme,
    pub covariance: CovarianceForm,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tolerance: 1e-8,
            ridge: 1e-10,
            init: None,
            weight_scheme: WeightScheme::RawSum,
            covariance: CovarianceForm::OuterProduct,
        }
    }
}

impl FitOptions {
    pub fn with_weight_scheme(mut self, scheme: WeightScheme) -> Self {
        self.weight_scheme = scheme;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || !(self.gradient_tolerance > 0.0) || !(self.ridge >= 0.0) {
            return Err(Error::InvalidInput("fit tolerances and iteration limit must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub estimator: Estimator,
    pub names: Vec<String>,
    pub estimate: Vec<f64>,
    /// Already scaled by the effective sample size. Absent for
    /// pseudo-likelihood fits.
    pub covariance: Option<Vec<Vec<f64>>>,
    pub objective: f64,
    pub converged: bool,
    pub iterations: usize,
    pub effective_n: usize,
    /// Parameters held at zero because their design column vanishes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pinned: Vec<usize>,
}

impl FitResult {
    pub fn covariance_matrix(&self) -> Option<DMatrix<f64>> {
        self.covariance.as_ref().map(|c| {
            let d = c.len();
            DMatrix::from_fn(d, d, |i, j| c[i][j])
        })
    }

    pub fn standard_errors(&self) -> Result<Vec<f64>> {
        let c = self.covariance.as_ref().ok_or_else(|| no_covariance(self.estimator))?;
        Ok((0..c.len()).map(|j| c[j][j].max(0.0).sqrt()).collect())
    }

    /// `estimate +- z * se` per parameter.
    pub fn wald_intervals(&self, z: f64) -> Result<Vec<(f64, f64)>> {
        let se = self.standard_errors()?;
        Ok(self.estimate.iter().zip(se).map(|(&b, s)| (b - z * s, b + z * s)).collect())
    }

    pub fn outcome_params(&self, p: usize, scheme: WeightScheme) -> Result<OutcomeParams> {
        OutcomeParams::from_vector(p, &self.estimate, scheme)
    }

    pub fn covariate_params(&self, p: usize, scheme: WeightScheme) -> Result<CovariateParams> {
        CovariateParams::from_vector(p, &self.estimate, scheme)
    }

    pub fn treatment_params(&self, scheme: WeightScheme) -> Result<TreatmentParams> {
        TreatmentParams::new(self.estimate.clone(), scheme)
    }
}

fn no_covariance(est: Estimator) -> Error {
    match est {
        Estimator::Pl => Error::Usage(
            "pseudo-likelihood fits carry no information-based covariance; use the parametric bootstrap".into(),
        ),
        Estimator::Coding => Error::Usage("fit has no covariance".into()),
    }
}

/// Logistic log-likelihood over fixed design rows. Rows are tagged with the
/// unit they belong to so scores can be aggregated per unit.
#[derive(Clone, Debug)]
pub struct Objective {
    d: usize,
    x: Vec<f64>,
    y: Vec<f64>,
    group: Vec<usize>,
    names: Vec<String>,
}

impl Objective {
    fn new(d: usize, names: Vec<String>) -> Self {
        Self { d, x: Vec::new(), y: Vec::new(), group: Vec::new(), names }
    }

    fn push(&mut self, row: &[f64], y: u8, group: usize) {
        self.x.extend_from_slice(row);
        self.y.push(y as f64);
        self.group.push(group);
    }

    pub fn n_params(&self) -> usize {
        self.d
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn row(&self, r: usize) -> &[f64] {
        &self.x[r * self.d..(r + 1) * self.d]
    }

    fn eta(&self, r: usize, tau: &[f64]) -> f64 {
        self.row(r).iter().zip(tau).map(|(x, t)| x * t).sum()
    }

    fn check(&self, tau: &[f64]) {
        assert_eq!(tau.len(), self.d, "parameter vector length");
    }

    pub fn value(&self, tau: &[f64]) -> f64 {
        self.check(tau);
        (0..self.n_rows()).map(|r| {
            let e = self.eta(r, tau);
            self.y[r] * e - softplus(e)
        }).sum()
    }

    pub fn gradient(&self, tau: &[f64]) -> Vec<f64> {
        self.check(tau);
        let mut g = vec![0.0; self.d];
        for r in 0..self.n_rows() {
            let resid = self.y[r] - expit(self.eta(r, tau));
            for (gj, x) in g.iter_mut().zip(self.row(r)) {
                *gj += resid * x;
            }
        }
        g
    }

    /// Second derivative matrix (negative semidefinite).
    pub fn hessian(&self, tau: &[f64]) -> DMatrix<f64> {
        self.check(tau);
        let d = self.d;
        let mut h = DMatrix::zeros(d, d);
        for r in 0..self.n_rows() {
            let pr = expit(self.eta(r, tau));
            let w = pr * (1.0 - pr);
            let x = self.row(r);
            for a in 0..d {
                if x[a] == 0.0 {
                    continue;
                }
                let wa = w * x[a];
                for b in a..d {
                    h[(a, b)] -= wa * x[b];
                }
            }
        }
        h.fill_lower_triangle_with_upper_triangle();
        h
    }

    /// `sum_i s_i s_i^T` where `s_i` is the score summed over the rows of
    /// unit `i`.
    pub fn score_outer_product(&self, tau: &[f64]) -> DMatrix<f64> {
        self.check(tau);
        let d = self.d;
        let mut out = DMatrix::zeros(d, d);
        let mut s = DVector::zeros(d);
        let mut r = 0;
        while r < self.n_rows() {
            s.fill(0.0);
            let gr = self.group[r];
            while r < self.n_rows() && self.group[r] == gr {
                let resid = self.y[r] - expit(self.eta(r, tau));
                for (j, x) in self.row(r).iter().enumerate() {
                    s[j] += resid * x;
                }
                r += 1;
            }
            out.syger(1.0, &s, &s, 1.0);
        }
        out.fill_upper_triangle_with_lower_triangle();
        out
    }

    /// Number of distinct units contributing rows.
    pub fn n_groups(&self) -> usize {
        let mut n = 0;
        let mut last = None;
        for &g in &self.group {
            if last != Some(g) {
                n += 1;
                last = Some(g);
            }
        }
        n
    }

    fn zero_columns(&self) -> Vec<usize> {
        (0..self.d).filter(|&j| (0..self.n_rows()).all(|r| self.row(r)[j] == 0.0)).collect()
    }
}

fn check_stable(g: &NetworkGraph, s: &StableSet) -> Result<()> {
    if s.graph_n() != g.n_units() {
        return Err(Error::DimensionMismatch("stable set belongs to a different network".into()));
    }
    if !g.is_stable(s.members())? {
        return Err(Error::InvalidInput("unit set is not stable on this network".into()));
    }
    if s.is_empty() {
        return Err(Error::InvalidInput("stable set is empty".into()));
    }
    Ok(())
}

fn outcome_objective(g: &NetworkGraph, data: &FieldSample, units: &[usize], scheme: WeightScheme) -> Result<Objective> {
    let p = data.n_covariates();
    data.check_against(g, p)?;
    let w = scheme.unit_weights(g);
    let d = OutcomeParams::n_free(p);
    let mut obj = Objective::new(d, OutcomeParams::names(p));
    let mut row = vec![0.0; d];
    let view = data.view();
    for &i in units {
        outcome_features(g, w[i], i, &view, &mut row);
        obj.push(&row, data.y(i), i);
    }
    Ok(obj)
}

fn covariate_objective(g: &NetworkGraph, data: &FieldSample, units: &[usize], scheme: WeightScheme) -> Result<Objective> {
    let p = data.n_covariates();
    data.check_against(g, p)?;
    if p == 0 {
        return Err(Error::InvalidInput("no covariates to fit".into()));
    }
    let w = scheme.unit_weights(g);
    let d = CovariateParams::n_free(p);
    let mut obj = Objective::new(d, CovariateParams::names(p));
    let mut row = vec![0.0; d];
    for &i in units {
        for k in 0..p {
            covariate_features(g, w[i], i, k, p, data.covariates(), &mut row);
            obj.push(&row, data.l(i, k), i);
        }
    }
    Ok(obj)
}

/// Coding log-likelihood of the outcome model over `s`.
pub fn coding_outcome_objective(g: &NetworkGraph, data: &FieldSample, s: &StableSet, scheme: WeightScheme) -> Result<Objective> {
    check_stable(g, s)?;
    outcome_objective(g, data, s.members(), scheme)
}

/// Log pseudo-likelihood of the outcome model over all units.
pub fn pl_outcome_objective(g: &NetworkGraph, data: &FieldSample, scheme: WeightScheme) -> Result<Objective> {
    outcome_objective(g, data, &(0..g.n_units()).collect::<Vec<_>>(), scheme)
}

/// Coding objective of the covariate model over `s`, with each unit's joint
/// covariate factor replaced by the product of its coordinate conditionals.
pub fn coding_covariates_objective(g: &NetworkGraph, data: &FieldSample, s: &StableSet, scheme: WeightScheme) -> Result<Objective> {
    check_stable(g, s)?;
    covariate_objective(g, data, s.members(), scheme)
}

pub fn pl_covariates_objective(g: &NetworkGraph, data: &FieldSample, scheme: WeightScheme) -> Result<Objective> {
    covariate_objective(g, data, &(0..g.n_units()).collect::<Vec<_>>(), scheme)
}

/// Log pseudo-likelihood of the treatment model over all units.
pub fn treatment_objective(g: &NetworkGraph, data: &FieldSample, scheme: WeightScheme) -> Result<Objective> {
    let p = data.n_covariates();
    data.check_against(g, p)?;
    let w = scheme.unit_weights(g);
    let d = TreatmentParams::n_free(p);
    let mut obj = Objective::new(d, TreatmentParams::names(p));
    let mut row = vec![0.0; d];
    let view = data.view();
    for i in 0..g.n_units() {
        treatment_features(g, w[i], i, &view, &mut row);
        obj.push(&row, data.a(i), i);
    }
    Ok(obj)
}

struct Solution {
    tau: Vec<f64>,
    value: f64,
    iterations: usize,
    pinned: Vec<usize>,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Newton-Raphson with backtracking on the free (non-pinned) coordinates.
fn maximize(obj: &Objective, opts: &FitOptions) -> Result<Solution> {
    opts.validate()?;
    let d = obj.n_params();
    if obj.n_rows() == 0 {
        return Err(Error::InvalidInput("objective has no data rows".into()));
    }
    let pinned = obj.zero_columns();
    let free: Vec<usize> = (0..d).filter(|j| !pinned.contains(j)).collect();
    let mut tau = match &opts.init {
        Some(v) if v.len() == d => v.clone(),
        Some(v) => return Err(Error::DimensionMismatch(format!("initial vector has {} entries, expected {d}", v.len()))),
        None => vec![0.0; d],
    };
    for &j in &pinned {
        tau[j] = 0.0;
    }
    let mut value = obj.value(&tau);
    for it in 0..opts.max_iterations {
        let grad = obj.gradient(&tau);
        let gf: Vec<f64> = free.iter().map(|&j| grad[j]).collect();
        let gnorm = inf_norm(&gf);
        if gnorm < opts.gradient_tolerance {
            return Ok(Solution { tau, value, iterations: it, pinned });
        }
        let h = obj.hessian(&tau);
        let m = free.len();
        let neg_h = DMatrix::from_fn(m, m, |a, b| -h[(free[a], free[b])] + if a == b { opts.ridge } else { 0.0 });
        let gvec = DVector::from_vec(gf.clone());
        let dir = match neg_h.cholesky() {
            Some(ch) => ch.solve(&gvec),
            None => gvec.clone(),
        };
        // Near the optimum a full Newton step can lower the objective by
        // round-off alone; without slack the search shrinks to a no-op.
        let slack = 1e-12 * (1.0 + value.abs());
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..=MAX_BACKTRACKS {
            let mut cand = tau.clone();
            for (a, &j) in free.iter().enumerate() {
                cand[j] += step * dir[a];
            }
            let v = obj.value(&cand);
            if v.is_finite() && v >= value - slack {
                tau = cand;
                value = v;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No ascent possible within floating point: treat a small
            // gradient as the numerical optimum.
            if gnorm < 1e-5 * (1.0 + obj.n_rows() as f64) {
                return Ok(Solution { tau, value, iterations: it + 1, pinned });
            }
            return Err(Error::NonConvergence { iterations: it + 1, gradient_norm: gnorm });
        }
        if let Some((idx, &v)) = tau.iter().enumerate().find(|(_, v)| v.abs() > SEPARATION_BOUND) {
            let g_after = obj.gradient(&tau);
            if inf_norm(&free.iter().map(|&j| g_after[j]).collect::<Vec<_>>()) >= opts.gradient_tolerance {
                return Err(Error::Separation { index: idx, value: v });
            }
        }
    }
    let grad = obj.gradient(&tau);
    let gnorm = inf_norm(&free.iter().map(|&j| grad[j]).collect::<Vec<_>>());
    if gnorm < opts.gradient_tolerance {
        return Ok(Solution { tau, value, iterations: opts.max_iterations, pinned });
    }
    Err(Error::NonConvergence { iterations: opts.max_iterations, gradient_norm: gnorm })
}

/// Inverts the free block of a symmetric positive definite matrix; pinned
/// rows and columns stay zero.
fn invert_free(m: &DMatrix<f64>, pinned: &[usize]) -> Result<DMatrix<f64>> {
    let d = m.nrows();
    let free: Vec<usize> = (0..d).filter(|j| !pinned.contains(j)).collect();
    let k = free.len();
    let sub = DMatrix::from_fn(k, k, |a, b| m[(free[a], free[b])]);
    let inv = sub.cholesky().ok_or(Error::SingularInformation)?.inverse();
    let mut out = DMatrix::zeros(d, d);
    for a in 0..k {
        for b in 0..k {
            out[(free[a], free[b])] = inv[(a, b)];
        }
    }
    Ok(out)
}

fn symmetrize(m: DMatrix<f64>) -> Vec<Vec<f64>> {
    let d = m.nrows();
    (0..d).map(|i| (0..d).map(|j| 0.5 * (m[(i, j)] + m[(j, i)])).collect()).collect()
}

fn result(obj: &Objective, sol: Solution, estimator: Estimator, covariance: Option<Vec<Vec<f64>>>, n: usize) -> FitResult {
    FitResult {
        estimator,
        names: obj.names().to_vec(),
        estimate: sol.tau,
        covariance,
        objective: sol.value,
        converged: true,
        iterations: sol.iterations,
        effective_n: n,
        pinned: sol.pinned,
    }
}

/// Coding estimator of the outcome model on stable set `s`. Covariance is
/// the inverse summed score outer product (or negative Hessian).
pub fn fit_coding_outcome(g: &NetworkGraph, data: &FieldSample, s: &StableSet, opts: &FitOptions) -> Result<FitResult> {
    let obj = coding_outcome_objective(g, data, s, opts.weight_scheme)?;
    let sol = maximize(&obj, opts)?;
    let info = match opts.covariance {
        CovarianceForm::OuterProduct => obj.score_outer_product(&sol.tau),
        CovarianceForm::NegativeHessian => -obj.hessian(&sol.tau),
    };
    let cov = invert_free(&info, &sol.pinned)?;
    Ok(result(&obj, sol, Estimator::Coding, Some(symmetrize(cov)), s.len()))
}

/// Coding estimator of the covariate model on `s`, with sandwich
/// covariance `H^-1 (sum_i s_i s_i^T) H^-1`.
pub fn fit_coding_covariates(g: &NetworkGraph, data: &FieldSample, s: &StableSet, opts: &FitOptions) -> Result<FitResult> {
    let obj = coding_covariates_objective(g, data, s, opts.weight_scheme)?;
    let sol = maximize(&obj, opts)?;
    let h_inv = invert_free(&(-obj.hessian(&sol.tau)), &sol.pinned)?;
    let cov = &h_inv * obj.score_outer_product(&sol.tau) * &h_inv;
    Ok(result(&obj, sol, Estimator::Coding, Some(symmetrize(cov)), s.len()))
}

/// Maximum pseudo-likelihood estimator of the outcome model; point estimate
/// only.
pub fn fit_pl_outcome(g: &NetworkGraph, data: &FieldSample, opts: &FitOptions) -> Result<FitResult> {
    let obj = pl_outcome_objective(g, data, opts.weight_scheme)?;
    let sol = maximize(&obj, opts)?;
    Ok(result(&obj, sol, Estimator::Pl, None, g.n_units()))
}

pub fn fit_pl_covariates(g: &NetworkGraph, data: &FieldSample, opts: &FitOptions) -> Result<FitResult> {
    let obj = pl_covariates_objective(g, data, opts.weight_scheme)?;
    let sol = maximize(&obj, opts)?;
    Ok(result(&obj, sol, Estimator::Pl, None, g.n_units()))
}

/// Pseudo-likelihood fit of the treatment auto-model.
pub fn fit_treatment(g: &NetworkGraph, data: &FieldSample, opts: &FitOptions) -> Result<FitResult> {
    let obj = treatment_objective(g, data, opts.weight_scheme)?;
    let sol = maximize(&obj, opts)?;
    Ok(result(&obj, sol, Estimator::Pl, None, g.n_units()))
}

/// Outcome and covariate fits from one estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelFit {
    pub outcome: FitResult,
    pub covariates: FitResult,
}

impl ModelFit {
    pub fn params(&self, p: usize, scheme: WeightScheme) -> Result<(OutcomeParams, CovariateParams)> {
        Ok((self.outcome.outcome_params(p, scheme)?, self.covariates.covariate_params(p, scheme)?))
    }
}

/// Fits both models. `s` is required for the coding estimator and ignored by
/// pseudo-likelihood.
pub fn fit_models(
    estimator: Estimator,
    g: &NetworkGraph,
    data: &FieldSample,
    s: Option<&StableSet>,
    opts: &FitOptions,
) -> Result<ModelFit> {
    match estimator {
        Estimator::Coding => {
            let s = s.ok_or_else(|| Error::Usage("the coding estimator needs a stable set".into()))?;
            Ok(ModelFit { outcome: fit_coding_outcome(g, data, s, opts)?, covariates: fit_coding_covariates(g, data, s, opts)? })
        }
        Estimator::Pl => Ok(ModelFit { outcome: fit_pl_outcome(g, data, opts)?, covariates: fit_pl_covariates(g, data, opts)? }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn sample(n: usize, p: usize, l: &[u8], a: &[u8], y: &[u8]) -> FieldSample {
        FieldSample::new(n, p, l.to_vec(), a.to_vec(), y.to_vec()).unwrap()
    }

    #[test]
    fn edgeless_outcome_fit_is_grouped_logistic_regression() {
        // Saturated in A with no covariates: the MLE is the logit of each
        // arm's outcome rate.
        let n = 10;
        let a = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let y = [1, 0, 0, 0, 1, 1, 1, 1, 0, 1];
        let g = NetworkGraph::edgeless(n);
        let d = sample(n, 0, &[], &a, &y);
        let s = StableSet::all_units(&g).unwrap();
        let fit = fit_coding_outcome(&g, &d, &s, &FitOptions::default()).unwrap();
        let b0 = (0.4f64 / 0.6).ln();
        let b1 = (0.8f64 / 0.2).ln() - b0;
        assert_abs_diff_eq!(fit.estimate[0], b0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.estimate[1], b1, epsilon = 1e-9);
        assert_eq!(fit.pinned, vec![2, 3]);
        assert_eq!(fit.estimate[2], 0.0);
        let pl = fit_pl_outcome(&g, &d, &FitOptions::default()).unwrap();
        assert_eq!(pl.estimate, fit.estimate);
        assert!(pl.covariance.is_none());
        assert!(matches!(pl.wald_intervals(1.96), Err(Error::Usage(_))));
        assert!(fit.wald_intervals(1.96).is_ok());
        // Outer-product and Hessian forms agree for a saturated model.
        let opts = FitOptions { covariance: CovarianceForm::NegativeHessian, ..FitOptions::default() };
        let h = fit_coding_outcome(&g, &d, &s, &opts).unwrap();
        let c1 = fit.covariance.unwrap();
        let c2 = h.covariance.unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(c1[i][j], c2[i][j], epsilon = 1e-9);
            }
        }
        // Closed form: var(b0) = 1 / (n0 p0 (1 - p0)).
        assert_abs_diff_eq!(c1[0][0], 1.0 / (5.0 * 0.4 * 0.6), epsilon = 1e-9);
    }

    #[test]
    fn zero_signal_treatment_intercept_is_logit_rate() {
        let n = 8;
        let g = NetworkGraph::edgeless(n);
        let d = sample(n, 1, &[0; 8], &[1, 1, 1, 0, 0, 0, 0, 0], &[0; 8]);
        let fit = fit_treatment(&g, &d, &FitOptions::default()).unwrap();
        assert_abs_diff_eq!(fit.estimate[0], (3.0f64 / 5.0).ln(), epsilon = 1e-9);
        assert!(fit.estimate[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn edgeless_coding_and_pl_covariates_agree() {
        let n = 40;
        let g = NetworkGraph::edgeless(n);
        let l: Vec<u8> = (0..2 * n).map(|i| crate::seed::derive(3, i as u64).is_multiple_of(3) as u8).collect();
        let d = sample(n, 2, &l, &[0; 40], &[0; 40]);
        let s = StableSet::all_units(&g).unwrap();
        let c = fit_coding_covariates(&g, &d, &s, &FitOptions::default()).unwrap();
        let pl = fit_pl_covariates(&g, &d, &FitOptions::default()).unwrap();
        assert_eq!(c.estimate, pl.estimate);
        assert_eq!(c.effective_n, 40);
    }

    #[test]
    fn separation_is_reported() {
        let n = 6;
        let g = NetworkGraph::edgeless(n);
        let d = sample(n, 0, &[], &[0, 0, 0, 1, 1, 1], &[0, 0, 0, 1, 1, 1]);
        let s = StableSet::all_units(&g).unwrap();
        let err = fit_coding_outcome(&g, &d, &s, &FitOptions::default()).unwrap_err();
        assert!(err.is_convergence_failure(), "{err}");
    }

    #[test]
    fn coding_requires_stable_set() {
        let g = NetworkGraph::path(3);
        let d = FieldSample::zeros(3, 1);
        let s = StableSet::all_units(&NetworkGraph::edgeless(3)).unwrap();
        assert!(fit_coding_outcome(&g, &d, &s, &FitOptions::default()).is_err());
        assert!(matches!(fit_models(Estimator::Coding, &g, &d, None, &FitOptions::default()), Err(Error::Usage(_))));
    }

    #[test]
    fn objective_rows_and_groups() {
        let g = NetworkGraph::path(4);
        let d = FieldSample::zeros(4, 3);
        let s = StableSet::new(&g, vec![0, 2]).unwrap();
        let obj = coding_covariates_objective(&g, &d, &s, WeightScheme::RawSum).unwrap();
        assert_eq!(obj.n_rows(), 6);
        assert_eq!(obj.n_groups(), 2);
        assert_eq!(obj.n_params(), 12);
        assert_eq!(obj.value(&[0.0; 12]), -6.0 * 2f64.ln());
    }

    #[test]
    fn estimator_parse_and_json() {
        assert_eq!("pl".parse::<Estimator>().unwrap(), Estimator::Pl);
        assert!("ml".parse::<Estimator>().is_err());
        let g = NetworkGraph::edgeless(4);
        let d = sample(4, 0, &[], &[0, 1, 0, 1], &[0, 1, 1, 0]);
        let fit = fit_pl_outcome(&g, &d, &FitOptions::default()).unwrap();
        let text = serde_json::to_string(&fit).unwrap();
        assert!(text.contains("\"estimate\"") && text.contains("\"effective_n\":4") && text.contains("\"covariance\":null"));
        let back: FitResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fit);
    }
}

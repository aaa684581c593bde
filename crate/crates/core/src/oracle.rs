//! Brute-force ground truth on tiny networks: exact joints of the outcome and
//! covariate fields, exact g-formula means and exact allocation-averaged
//! effects. Everything here enumerates configurations, so it is only usable
//! for a handful of binary variables, and is kept independent of the Gibbs
//! sampler so the two can check each other.
//!
//! Configurations are encoded as bit masks: bit `i` of a `Y` (or `A`)
//! configuration is unit `i`; bit `i * p + k` of an `L` configuration is
//! covariate `k` of unit `i`.

use serde::Serialize;

use crate::automodel::{energy_l_unchecked, energy_y_unchecked, CovariateParams, Field, OutcomeParams, WeightScheme};
use crate::error::{Error, Result};
use crate::netgraph::NetworkGraph;

pub const DEFAULT_ENUMERATION_CAP: usize = 12;

/// Normalized distribution over all `2^n_vars` binary configurations.
#[derive(Clone, Debug)]
pub struct ExactDistribution {
    n_vars: usize,
    probs: Vec<f64>,
    log_normalizer: f64,
}

impl ExactDistribution {
    fn from_log_weights(n_vars: usize, log_w: Vec<f64>) -> Self {
        let max = log_w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> = log_w.iter().map(|&e| (e - max).exp()).collect();
        let z: f64 = probs.iter().sum();
        for p in &mut probs {
            *p /= z;
        }
        Self { n_vars, probs, log_normalizer: max + z.ln() }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, config: usize) -> f64 {
        self.probs[config]
    }

    /// `log` of the normalizing constant (the `kappa` or `nu` of the joint).
    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    /// Variable values of `config`, least significant bit first.
    pub fn decode(&self, config: usize) -> Vec<u8> {
        decode(config, self.n_vars)
    }

    pub fn marginal(&self, var: usize) -> f64 {
        self.probs.iter().enumerate().filter(|(c, _)| c >> var & 1 == 1).map(|(_, p)| p).sum()
    }

    /// `Pr(X_var = 1 | all other variables as in config)`.
    pub fn conditional(&self, config: usize, var: usize) -> f64 {
        let on = self.probs[config | 1 << var];
        let off = self.probs[config & !(1 << var)];
        on / (on + off)
    }

    pub fn total_variation(&self, other: &[f64]) -> f64 {
        0.5 * self.probs.iter().zip(other).map(|(p, q)| (p - q).abs()).sum::<f64>()
    }
}

fn decode(config: usize, n: usize) -> Vec<u8> {
    (0..n).map(|b| (config >> b & 1) as u8).collect()
}

/// Exact allocation-averaged effects.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactEffects {
    pub beta_alpha: f64,
    pub direct: f64,
    pub spillover: f64,
    /// `beta(alpha)` recomputed as `alpha * psi_bar(1) + (1 - alpha) * psi_bar(0)`.
    pub beta_alpha_mixture: f64,
}

/// Enumeration engine with a cap on the number of binary variables per field.
#[derive(Clone, Copy, Debug)]
pub struct Oracle {
    pub cap: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Self { cap: DEFAULT_ENUMERATION_CAP }
    }
}

impl Oracle {
    pub fn with_cap(cap: usize) -> Self {
        Self { cap }
    }

    fn check_cap(&self, needed: usize) -> Result<()> {
        if needed > self.cap {
            Err(Error::EnumerationCap { needed, cap: self.cap })
        } else {
            Ok(())
        }
    }

    fn check_coherent(g: &NetworkGraph, scheme: WeightScheme) -> Result<()> {
        if scheme.is_coherent_on(g) {
            Ok(())
        } else {
            Err(Error::InvalidInput("weights are asymmetric on this network; the conditionals define no joint".into()))
        }
    }

    /// `f(y | a, l)` over all outcome vectors.
    pub fn exact_joint_y(&self, g: &NetworkGraph, a: &[u8], l: &[u8], params: &OutcomeParams) -> Result<ExactDistribution> {
        let n = g.n_units();
        let p = params.p();
        params.validate()?;
        if a.len() != n || l.len() != n * p {
            return Err(Error::DimensionMismatch("treatment or covariates do not match the network".into()));
        }
        self.check_cap(n)?;
        Self::check_coherent(g, params.weight_scheme)?;
        let w = params.weight_scheme.unit_weights(g);
        Ok(joint_y(g, &w, a, l, params))
    }

    /// `f(l)` over all covariate fields.
    pub fn exact_joint_l(&self, g: &NetworkGraph, params: &CovariateParams) -> Result<ExactDistribution> {
        let n_vars = g.n_units() * params.p();
        self.check_cap(n_vars)?;
        Self::check_coherent(g, params.weight_scheme)?;
        let w = params.weight_scheme.unit_weights(g);
        let log_w = (0..1usize << n_vars).map(|c| energy_l_unchecked(g, &w, &decode(c, n_vars), params)).collect();
        Ok(ExactDistribution::from_log_weights(n_vars, log_w))
    }

    /// Outcome marginal under intervention `a`: `sum_l f(y | a, l) f(l)`.
    pub fn exact_marginal_y(
        &self,
        g: &NetworkGraph,
        a: &[u8],
        params_y: &OutcomeParams,
        params_l: &CovariateParams,
    ) -> Result<ExactDistribution> {
        let n = g.n_units();
        if a.len() != n {
            return Err(Error::DimensionMismatch(format!("treatment has {} entries for {n} units", a.len())));
        }
        if params_y.p() != params_l.p() {
            return Err(Error::DimensionMismatch("outcome and covariate models disagree on p".into()));
        }
        params_y.validate()?;
        self.check_cap(n)?;
        let fl = self.exact_joint_l(g, params_l)?;
        let w = params_y.weight_scheme.unit_weights(g);
        Self::check_coherent(g, params_y.weight_scheme)?;
        let mut probs = vec![0.0; 1 << n];
        for (lc, &pl) in fl.probs().iter().enumerate() {
            let fy = joint_y(g, &w, a, &fl.decode(lc), params_y);
            for (yc, &py) in fy.probs().iter().enumerate() {
                probs[yc] += pl * py;
            }
        }
        Ok(ExactDistribution { n_vars: n, probs, log_normalizer: 0.0 })
    }

    /// Counterfactual means `beta_i(a)` for every unit.
    pub fn exact_beta_all(
        &self,
        g: &NetworkGraph,
        a: &[u8],
        params_y: &OutcomeParams,
        params_l: &CovariateParams,
    ) -> Result<Vec<f64>> {
        let marginal = self.exact_marginal_y(g, a, params_y, params_l)?;
        Ok((0..g.n_units()).map(|i| marginal.marginal(i)).collect())
    }

    /// Counterfactual mean `beta_i(a)` of unit `i`.
    pub fn exact_beta(
        &self,
        g: &NetworkGraph,
        i: usize,
        a: &[u8],
        params_y: &OutcomeParams,
        params_l: &CovariateParams,
    ) -> Result<f64> {
        if i >= g.n_units() {
            return Err(Error::IndexOutOfRange { index: i, n: g.n_units() });
        }
        Ok(self.exact_beta_all(g, a, params_y, params_l)?[i])
    }

    /// Network-average `beta(alpha)`, direct and spillover effects under
    /// independent Bernoulli(alpha) allocation, by enumerating every
    /// treatment vector.
    pub fn exact_effects(
        &self,
        g: &NetworkGraph,
        alpha: f64,
        params_y: &OutcomeParams,
        params_l: &CovariateParams,
    ) -> Result<ExactEffects> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidInput(format!("allocation probability {alpha} not in [0, 1]")));
        }
        let n = g.n_units();
        self.check_cap(n)?;
        params_y.validate()?;
        Self::check_coherent(g, params_y.weight_scheme)?;
        let fl = self.exact_joint_l(g, params_l)?;
        let w = params_y.weight_scheme.unit_weights(g);

        // beta_i(a) for every allocation a.
        let mut beta = vec![vec![0.0; n]; 1 << n];
        let fl_configs: Vec<(Vec<u8>, f64)> =
            fl.probs().iter().enumerate().map(|(c, &p)| (fl.decode(c), p)).collect();
        for (ac, row) in beta.iter_mut().enumerate() {
            let a = decode(ac, n);
            for (l, pl) in &fl_configs {
                let fy = joint_y(g, &w, &a, l, params_y);
                for (yc, &py) in fy.probs().iter().enumerate() {
                    for (i, b) in row.iter_mut().enumerate() {
                        if yc >> i & 1 == 1 {
                            *b += pl * py;
                        }
                    }
                }
            }
        }

        let bern = |bit: u8| if bit == 1 { alpha } else { 1.0 - alpha };
        let mut beta_alpha = 0.0;
        let mut psi1 = vec![0.0; n];
        let mut psi0 = vec![0.0; n];
        for (ac, row) in beta.iter().enumerate() {
            let a = decode(ac, n);
            let full: f64 = a.iter().map(|&b| bern(b)).product();
            for i in 0..n {
                beta_alpha += full * row[i];
                let others: f64 = a.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &b)| bern(b)).product();
                if a[i] == 1 {
                    psi1[i] += others * row[i];
                } else {
                    psi0[i] += others * row[i];
                }
            }
        }
        let nf = n as f64;
        let direct = (0..n).map(|i| psi1[i] - psi0[i]).sum::<f64>() / nf;
        let spillover = (0..n).map(|i| psi0[i] - beta[0][i]).sum::<f64>() / nf;
        let beta_alpha_mixture = (0..n).map(|i| alpha * psi1[i] + (1.0 - alpha) * psi0[i]).sum::<f64>() / nf;
        Ok(ExactEffects { beta_alpha: beta_alpha / nf, direct, spillover, beta_alpha_mixture })
    }
}

fn joint_y(g: &NetworkGraph, w: &[f64], a: &[u8], l: &[u8], params: &OutcomeParams) -> ExactDistribution {
    let n = g.n_units();
    let p = params.p();
    let log_w = (0..1usize << n)
        .map(|c| {
            let y = decode(c, n);
            energy_y_unchecked(g, w, &Field { p, l, a, y: &y }, params)
        })
        .collect();
    ExactDistribution::from_log_weights(n, log_w)
}

/// Baseline model on the 3-unit path: `beta_i(1, 0, 1)` for each unit, then
/// `beta(0.7)`, direct and spillover effects at `alpha = 0.7`. Cross-checked
/// against an independent enumeration script.
pub const PATH3_FIXTURE: [f64; 6] = [
    0.311_340_209_062_27,
    0.363_594_306_062_103_1,
    0.311_340_209_062_269_56,
    0.314_508_933_270_767_95,
    -0.134_136_152_134_356_28,
    -0.052_481_504_865_959_89,
];

//! Auto-logistic Gibbs factors for the covariate field `L`, the treatment
//! field `A` and the outcome field `Y`.
//!
//! Every full conditional is `expit` of a linear predictor built from a unit's
//! own variables and weighted sums over its neighbors. The weight for pair
//! `(i, j)` depends only on `i` (1 under raw sums, `1/|N_i|` under degree
//! normalization), so each aggregate is `w_i * sum_{j in N_i} x_j`.
//!
//! Flat parameter layouts, shared with the fitting code:
//!
//! * outcome: `[b0, b_a, b_a_nbr, b_l[0], b_l_nbr[0], ..., b_l[p-1], b_l_nbr[p-1], theta]`
//! * treatment: `[g0, own[0], nbr[0], ..., own[p-1], nbr[p-1], g_a_nbr]`
//! * covariates: `[tau[0..p], rho upper triangle (k<s), nu upper triangle (k<=s)]`

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netgraph::NetworkGraph;

#[inline]
pub fn expit(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[inline]
pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `log(1 + exp(x))` without overflow.
#[inline]
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// How neighbor contributions are weighted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightScheme {
    /// `w_ij = 1`: plain neighbor sums.
    #[default]
    RawSum,
    /// `w_ij = 1/|N_i|`: neighbor averages; isolated units get 0.
    DegreeNormalized,
}

impl WeightScheme {
    /// Per-unit weight `w_i`.
    pub fn unit_weights(self, g: &NetworkGraph) -> Vec<f64> {
        (0..g.n_units())
            .map(|i| match self {
                WeightScheme::RawSum => 1.0,
                WeightScheme::DegreeNormalized => {
                    let d = g.degree(i);
                    if d == 0 {
                        0.0
                    } else {
                        1.0 / d as f64
                    }
                }
            })
            .collect()
    }

    /// Whether the pairwise weights are symmetric on `g`, i.e. whether the
    /// conditionals cohere with a joint Gibbs distribution.
    pub fn is_coherent_on(self, g: &NetworkGraph) -> bool {
        match self {
            WeightScheme::RawSum => true,
            WeightScheme::DegreeNormalized => g.edges().all(|(i, j)| g.degree(i) == g.degree(j)),
        }
    }
}

/// One realization of the covariate, treatment and outcome fields.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSample {
    n: usize,
    p: usize,
    /// Unit-major `n x p` covariates.
    l: Vec<u8>,
    a: Vec<u8>,
    y: Vec<u8>,
}

/// Borrowed view of the three fields, used in hot loops.
#[derive(Clone, Copy, Debug)]
pub struct Field<'a> {
    pub p: usize,
    pub l: &'a [u8],
    pub a: &'a [u8],
    pub y: &'a [u8],
}

impl<'a> Field<'a> {
    #[inline]
    pub fn l(&self, i: usize, k: usize) -> u8 {
        self.l[i * self.p + k]
    }
}

fn check_binary(name: &str, v: &[u8]) -> Result<()> {
    match v.iter().position(|&x| x > 1) {
        Some(idx) => Err(Error::InvalidInput(format!("{name}[{idx}] = {} is not binary", v[idx]))),
        None => Ok(()),
    }
}

impl FieldSample {
    /// `l` is unit-major (`l[i * p + k]`).
    pub fn new(n: usize, p: usize, l: Vec<u8>, a: Vec<u8>, y: Vec<u8>) -> Result<Self> {
        if l.len() != n * p || a.len() != n || y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "expected L {n}x{p}, A and Y of length {n}; got {}, {}, {}",
                l.len(),
                a.len(),
                y.len()
            )));
        }
        check_binary("L", &l)?;
        check_binary("A", &a)?;
        check_binary("Y", &y)?;
        Ok(Self { n, p, l, a, y })
    }

    pub fn zeros(n: usize, p: usize) -> Self {
        Self { n, p, l: vec![0; n * p], a: vec![0; n], y: vec![0; n] }
    }

    pub fn n_units(&self) -> usize {
        self.n
    }

    pub fn n_covariates(&self) -> usize {
        self.p
    }

    pub fn l(&self, i: usize, k: usize) -> u8 {
        self.l[i * self.p + k]
    }

    pub fn a(&self, i: usize) -> u8 {
        self.a[i]
    }

    pub fn y(&self, i: usize) -> u8 {
        self.y[i]
    }

    pub fn covariates(&self) -> &[u8] {
        &self.l
    }

    pub fn treatment(&self) -> &[u8] {
        &self.a
    }

    pub fn outcome(&self) -> &[u8] {
        &self.y
    }

    pub fn set_l(&mut self, i: usize, k: usize, v: u8) {
        self.l[i * self.p + k] = v.min(1);
    }

    pub fn set_a(&mut self, i: usize, v: u8) {
        self.a[i] = v.min(1);
    }

    pub fn set_y(&mut self, i: usize, v: u8) {
        self.y[i] = v.min(1);
    }

    pub fn set_treatment(&mut self, a: &[u8]) -> Result<()> {
        if a.len() != self.n {
            return Err(Error::DimensionMismatch(format!("treatment of length {} for {} units", a.len(), self.n)));
        }
        check_binary("A", a)?;
        self.a.copy_from_slice(a);
        Ok(())
    }

    pub fn view(&self) -> Field<'_> {
        Field { p: self.p, l: &self.l, a: &self.a, y: &self.y }
    }

    /// Moves unit `i` to position `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch("permutation length".into()));
        }
        let mut out = Self::zeros(self.n, self.p);
        for i in 0..self.n {
            let t = perm[i];
            out.l[t * self.p..(t + 1) * self.p].copy_from_slice(&self.l[i * self.p..(i + 1) * self.p]);
            out.a[t] = self.a[i];
            out.y[t] = self.y[i];
        }
        Ok(out)
    }

    pub(crate) fn check_against(&self, g: &NetworkGraph, p: usize) -> Result<()> {
        if self.n != g.n_units() {
            return Err(Error::DimensionMismatch(format!(
                "sample has {} units, network has {}",
                self.n,
                g.n_units()
            )));
        }
        if self.p != p {
            return Err(Error::DimensionMismatch(format!(
                "sample has {} covariates, parameters expect {p}",
                self.p
            )));
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CovariateParamsRepr {
    tau: Vec<f64>,
    rho: Vec<Vec<f64>>,
    nu: Vec<Vec<f64>>,
    #[serde(default)]
    weight_scheme: WeightScheme,
}

/// Covariate-field parameters: intercepts `tau`, within-unit pair
/// coefficients `rho` and cross-unit pair coefficients `nu`, both symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CovariateParamsRepr", into = "CovariateParamsRepr")]
pub struct CovariateParams {
    tau: Vec<f64>,
    rho: Vec<f64>,
    nu: Vec<f64>,
    pub weight_scheme: WeightScheme,
}

impl TryFrom<CovariateParamsRepr> for CovariateParams {
    type Error = Error;

    fn try_from(r: CovariateParamsRepr) -> Result<Self> {
        CovariateParams::new(r.tau, r.rho, r.nu, r.weight_scheme)
    }
}

impl From<CovariateParams> for CovariateParamsRepr {
    fn from(c: CovariateParams) -> Self {
        let p = c.p();
        let rows = |m: &[f64]| (0..p).map(|k| m[k * p..(k + 1) * p].to_vec()).collect();
        CovariateParamsRepr { rho: rows(&c.rho), nu: rows(&c.nu), tau: c.tau, weight_scheme: c.weight_scheme }
    }
}

fn flatten_symmetric(name: &str, m: Vec<Vec<f64>>, p: usize, zero_diagonal: bool) -> Result<Vec<f64>> {
    if m.len() != p || m.iter().any(|r| r.len() != p) {
        return Err(Error::DimensionMismatch(format!("{name} must be {p}x{p}")));
    }
    for k in 0..p {
        if zero_diagonal && m[k][k] != 0.0 {
            return Err(Error::InvalidInput(format!("{name} must have a zero diagonal")));
        }
        for s in 0..k {
            if m[k][s] != m[s][k] {
                return Err(Error::InvalidInput(format!("{name} is not symmetric at ({k}, {s})")));
            }
        }
    }
    let flat: Vec<f64> = m.into_iter().flatten().collect();
    if flat.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput(format!("{name} has non-finite entries")));
    }
    Ok(flat)
}

impl CovariateParams {
    pub fn new(tau: Vec<f64>, rho: Vec<Vec<f64>>, nu: Vec<Vec<f64>>, weight_scheme: WeightScheme) -> Result<Self> {
        let p = tau.len();
        if tau.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("tau has non-finite entries".into()));
        }
        let rho = flatten_symmetric("rho", rho, p, true)?;
        let nu = flatten_symmetric("nu", nu, p, false)?;
        Ok(Self { tau, rho, nu, weight_scheme })
    }

    pub fn zeros(p: usize) -> Self {
        Self { tau: vec![0.0; p], rho: vec![0.0; p * p], nu: vec![0.0; p * p], weight_scheme: WeightScheme::RawSum }
    }

    pub fn p(&self) -> usize {
        self.tau.len()
    }

    pub fn tau(&self, k: usize) -> f64 {
        self.tau[k]
    }

    pub fn rho(&self, k: usize, s: usize) -> f64 {
        self.rho[k * self.p() + s]
    }

    pub fn nu(&self, k: usize, s: usize) -> f64 {
        self.nu[k * self.p() + s]
    }

    pub fn n_free(p: usize) -> usize {
        p + p * p.saturating_sub(1) / 2 + p * (p + 1) / 2
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let p = self.p();
        let mut v = self.tau.clone();
        for k in 0..p {
            for s in k + 1..p {
                v.push(self.rho(k, s));
            }
        }
        for k in 0..p {
            for s in k..p {
                v.push(self.nu(k, s));
            }
        }
        v
    }

    pub fn from_vector(p: usize, v: &[f64], weight_scheme: WeightScheme) -> Result<Self> {
        if v.len() != Self::n_free(p) {
            return Err(Error::DimensionMismatch(format!(
                "covariate parameter vector has {} entries, expected {}",
                v.len(),
                Self::n_free(p)
            )));
        }
        let mut out = Self::zeros(p);
        out.weight_scheme = weight_scheme;
        out.tau.copy_from_slice(&v[..p]);
        let mut idx = p;
        for k in 0..p {
            for s in k + 1..p {
                out.rho[k * p + s] = v[idx];
                out.rho[s * p + k] = v[idx];
                idx += 1;
            }
        }
        for k in 0..p {
            for s in k..p {
                out.nu[k * p + s] = v[idx];
                out.nu[s * p + k] = v[idx];
                idx += 1;
            }
        }
        Ok(out)
    }

    pub fn names(p: usize) -> Vec<String> {
        let mut names: Vec<String> = (1..=p).map(|k| format!("tau_{k}")).collect();
        for k in 0..p {
            for s in k + 1..p {
                names.push(format!("rho_{}{}", k + 1, s + 1));
            }
        }
        for k in 0..p {
            for s in k..p {
                names.push(format!("nu_{}{}", k + 1, s + 1));
            }
        }
        names
    }

    /// Linear predictor of `L[i,k]` given everything else; `l` is unit-major.
    #[inline]
    pub fn eta(&self, g: &NetworkGraph, w_i: f64, i: usize, k: usize, l: &[u8]) -> f64 {
        let p = self.p();
        let own = &l[i * p..(i + 1) * p];
        let mut eta = self.tau[k];
        let rho_row = &self.rho[k * p..(k + 1) * p];
        for s in 0..p {
            if s != k {
                eta += rho_row[s] * own[s] as f64;
            }
        }
        let nu_row = &self.nu[k * p..(k + 1) * p];
        let mut cross = 0.0;
        for &j in g.nbrs(i) {
            let lj = &l[j * p..(j + 1) * p];
            for s in 0..p {
                cross += nu_row[s] * lj[s] as f64;
            }
        }
        eta + w_i * cross
    }

    /// Design row for `L[i,k]` in the flat layout.
    pub fn features(&self, g: &NetworkGraph, w_i: f64, i: usize, k: usize, l: &[u8], out: &mut [f64]) {
        covariate_features(g, w_i, i, k, self.p(), l, out)
    }
}

/// Design row for `L[i,k]` against the flat covariate parameter layout.
pub fn covariate_features(g: &NetworkGraph, w_i: f64, i: usize, k: usize, p: usize, l: &[u8], out: &mut [f64]) {
    debug_assert_eq!(out.len(), CovariateParams::n_free(p));
    out.fill(0.0);
    out[k] = 1.0;
    let mut nbr_sum = vec![0.0; p];
    for &j in g.nbrs(i) {
        for s in 0..p {
            nbr_sum[s] += l[j * p + s] as f64;
        }
    }
    let mut idx = p;
    for a in 0..p {
        for b in a + 1..p {
            if a == k {
                out[idx] = l[i * p + b] as f64;
            } else if b == k {
                out[idx] = l[i * p + a] as f64;
            }
            idx += 1;
        }
    }
    for a in 0..p {
        for b in a..p {
            if a == k {
                out[idx] = w_i * nbr_sum[b];
            } else if b == k {
                out[idx] = w_i * nbr_sum[a];
            }
            idx += 1;
        }
    }
}

/// Treatment-model parameters in the interleaved flat layout
/// `[g0, own_1, nbr_1, ..., own_p, nbr_p, g_a_nbr]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreatmentParams {
    pub gamma: Vec<f64>,
    #[serde(default)]
    pub weight_scheme: WeightScheme,
}

impl TreatmentParams {
    pub fn new(gamma: Vec<f64>, weight_scheme: WeightScheme) -> Result<Self> {
        if gamma.len() < 2 || !gamma.len().is_multiple_of(2) {
            return Err(Error::DimensionMismatch(format!(
                "treatment coefficients must have length 2p + 2, got {}",
                gamma.len()
            )));
        }
        if gamma.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("treatment coefficients must be finite".into()));
        }
        Ok(Self { gamma, weight_scheme })
    }

    pub fn zeros(p: usize) -> Self {
        Self { gamma: vec![0.0; 2 * p + 2], weight_scheme: WeightScheme::RawSum }
    }

    pub fn p(&self) -> usize {
        (self.gamma.len() - 2) / 2
    }

    pub fn n_free(p: usize) -> usize {
        2 * p + 2
    }

    pub fn names(p: usize) -> Vec<String> {
        let mut names = vec!["gamma_0".to_string()];
        for k in 1..=p {
            names.push(format!("gamma_L{k}"));
            names.push(format!("gamma_nbr_L{k}"));
        }
        names.push("gamma_nbr_A".into());
        names
    }

    #[inline]
    pub fn eta(&self, g: &NetworkGraph, w_i: f64, i: usize, field: &Field<'_>) -> f64 {
        let p = field.p;
        let gm = &self.gamma;
        let mut eta = gm[0];
        for k in 0..p {
            eta += gm[1 + 2 * k] * field.l(i, k) as f64;
        }
        let mut nbr = 0.0;
        let mut a_sum = 0.0;
        for &j in g.nbrs(i) {
            for k in 0..p {
                nbr += gm[2 + 2 * k] * field.l(j, k) as f64;
            }
            a_sum += field.a[j] as f64;
        }
        eta + w_i * (nbr + gm[2 * p + 1] * a_sum)
    }
}

/// Design row for `A[i]` against the treatment layout.
pub fn treatment_features(g: &NetworkGraph, w_i: f64, i: usize, field: &Field<'_>, out: &mut [f64]) {
    let p = field.p;
    out.fill(0.0);
    out[0] = 1.0;
    for k in 0..p {
        out[1 + 2 * k] = field.l(i, k) as f64;
    }
    for &j in g.nbrs(i) {
        for k in 0..p {
            out[2 + 2 * k] += w_i * field.l(j, k) as f64;
        }
        out[2 * p + 1] += w_i * field.a[j] as f64;
    }
}

/// Outcome auto-logistic parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeParams {
    pub beta0: f64,
    pub beta_a: f64,
    pub beta_a_nbr: f64,
    pub beta_l: Vec<f64>,
    pub beta_l_nbr: Vec<f64>,
    pub theta: f64,
    #[serde(default)]
    pub weight_scheme: WeightScheme,
}

impl OutcomeParams {
    pub fn zeros(p: usize) -> Self {
        Self {
            beta0: 0.0,
            beta_a: 0.0,
            beta_a_nbr: 0.0,
            beta_l: vec![0.0; p],
            beta_l_nbr: vec![0.0; p],
            theta: 0.0,
            weight_scheme: WeightScheme::RawSum,
        }
    }

    pub fn p(&self) -> usize {
        self.beta_l.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_l.len() != self.beta_l_nbr.len() {
            return Err(Error::DimensionMismatch("beta_l and beta_l_nbr differ in length".into()));
        }
        if !self.to_vector().iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("outcome coefficients must be finite".into()));
        }
        Ok(())
    }

    pub fn n_free(p: usize) -> usize {
        2 * p + 4
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = vec![self.beta0, self.beta_a, self.beta_a_nbr];
        for k in 0..self.p() {
            v.push(self.beta_l[k]);
            v.push(self.beta_l_nbr[k]);
        }
        v.push(self.theta);
        v
    }

    pub fn from_vector(p: usize, v: &[f64], weight_scheme: WeightScheme) -> Result<Self> {
        if v.len() != Self::n_free(p) {
            return Err(Error::DimensionMismatch(format!(
                "outcome parameter vector has {} entries, expected {}",
                v.len(),
                Self::n_free(p)
            )));
        }
        Ok(Self {
            beta0: v[0],
            beta_a: v[1],
            beta_a_nbr: v[2],
            beta_l: (0..p).map(|k| v[3 + 2 * k]).collect(),
            beta_l_nbr: (0..p).map(|k| v[4 + 2 * k]).collect(),
            theta: v[3 + 2 * p],
            weight_scheme,
        })
    }

    pub fn names(p: usize) -> Vec<String> {
        let mut names = vec!["beta_0".to_string(), "beta_A".into(), "beta_nbr_A".into()];
        for k in 1..=p {
            names.push(format!("beta_L{k}"));
            names.push(format!("beta_nbr_L{k}"));
        }
        names.push("theta".into());
        names
    }

    /// Linear predictor of `Y[i]` with the unit's own treatment set to `a_i`.
    #[inline]
    pub fn eta(&self, g: &NetworkGraph, w_i: f64, i: usize, field: &Field<'_>, a_i: u8) -> f64 {
        let p = field.p;
        let mut eta = self.beta0 + self.beta_a * a_i as f64;
        for k in 0..p {
            eta += self.beta_l[k] * field.l(i, k) as f64;
        }
        let mut nbr = 0.0;
        let mut a_sum = 0.0;
        let mut y_sum = 0.0;
        for &j in g.nbrs(i) {
            for k in 0..p {
                nbr += self.beta_l_nbr[k] * field.l(j, k) as f64;
            }
            a_sum += field.a[j] as f64;
            y_sum += field.y[j] as f64;
        }
        eta + w_i * (nbr + self.beta_a_nbr * a_sum + self.theta * y_sum)
    }

    /// Linear predictor without the outcome-dependence term (the `G~_i` of
    /// the energy).
    pub fn baseline_eta(&self, g: &NetworkGraph, w_i: f64, i: usize, field: &Field<'_>) -> f64 {
        let p = field.p;
        let mut eta = self.beta0 + self.beta_a * field.a[i] as f64;
        for k in 0..p {
            eta += self.beta_l[k] * field.l(i, k) as f64;
        }
        let mut nbr = 0.0;
        for &j in g.nbrs(i) {
            for k in 0..p {
                nbr += self.beta_l_nbr[k] * field.l(j, k) as f64;
            }
            nbr += self.beta_a_nbr * field.a[j] as f64;
        }
        eta + w_i * nbr
    }
}

/// Design row for `Y[i]` against the outcome layout.
pub fn outcome_features(g: &NetworkGraph, w_i: f64, i: usize, field: &Field<'_>, out: &mut [f64]) {
    let p = field.p;
    out.fill(0.0);
    out[0] = 1.0;
    out[1] = field.a[i] as f64;
    for k in 0..p {
        out[3 + 2 * k] = field.l(i, k) as f64;
    }
    for &j in g.nbrs(i) {
        out[2] += w_i * field.a[j] as f64;
        for k in 0..p {
            out[4 + 2 * k] += w_i * field.l(j, k) as f64;
        }
        out[3 + 2 * p] += w_i * field.y[j] as f64;
    }
}

/// The three parameter bundles plus the weight scheme they share.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub tau_l: CovariateParams,
    pub tau_a: Option<TreatmentParams>,
    pub tau_y: OutcomeParams,
}

#[derive(Serialize, Deserialize)]
struct ModelParamsFile {
    tau_l: CovariateParamsRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau_a: Option<TreatmentFile>,
    tau_y: OutcomeFile,
    #[serde(default)]
    weight_scheme: WeightScheme,
}

#[derive(Serialize, Deserialize)]
struct TreatmentFile {
    gamma: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct OutcomeFile {
    beta0: f64,
    beta_a: f64,
    beta_a_nbr: f64,
    beta_l: Vec<f64>,
    beta_l_nbr: Vec<f64>,
    theta: f64,
}

impl ModelParams {
    pub fn new(tau_l: CovariateParams, tau_a: Option<TreatmentParams>, tau_y: OutcomeParams) -> Result<Self> {
        tau_y.validate()?;
        let p = tau_l.p();
        if tau_y.p() != p || tau_a.as_ref().is_some_and(|t| t.p() != p) {
            return Err(Error::DimensionMismatch("parameter bundles disagree on the number of covariates".into()));
        }
        Ok(Self { tau_l, tau_a, tau_y })
    }

    pub fn p(&self) -> usize {
        self.tau_l.p()
    }

    pub fn weight_scheme(&self) -> WeightScheme {
        self.tau_y.weight_scheme
    }

    /// Applies one weight scheme to every bundle.
    pub fn with_weight_scheme(mut self, scheme: WeightScheme) -> Self {
        self.tau_l.weight_scheme = scheme;
        self.tau_y.weight_scheme = scheme;
        if let Some(a) = self.tau_a.as_mut() {
            a.weight_scheme = scheme;
        }
        self
    }

    /// Ground truth of the three-covariate simulation design.
    pub fn baseline() -> Self {
        let tau_l = CovariateParams::new(
            vec![-1.0, 0.5, -0.5],
            vec![vec![0.0, 0.1, 0.2], vec![0.1, 0.0, 0.1], vec![0.2, 0.1, 0.0]],
            vec![vec![0.1, 0.0, 0.0], vec![0.0, 0.1, 0.0], vec![0.0, 0.0, 0.1]],
            WeightScheme::RawSum,
        )
        .expect("static parameters are valid");
        let tau_a = TreatmentParams::new(vec![-1.0, 0.5, 0.1, 0.2, 0.05, 0.25, -0.08, 0.3], WeightScheme::RawSum)
            .expect("static parameters are valid");
        let tau_y = OutcomeParams::from_vector(
            3,
            &[-0.3, -0.6, -0.2, -0.2, -0.05, -0.1, -0.01, 0.4, 0.01, 0.2],
            WeightScheme::RawSum,
        )
        .expect("static parameters are valid");
        Self { tau_l, tau_a: Some(tau_a), tau_y }
    }

    /// The same design with treatment removed from the outcome model, so
    /// every direct and spillover effect is zero.
    pub fn sharp_null() -> Self {
        let mut m = Self::baseline();
        m.tau_y.beta_a = 0.0;
        m.tau_y.beta_a_nbr = 0.0;
        m
    }

    pub fn to_json(&self) -> String {
        let file = ModelParamsFile {
            tau_l: self.tau_l.clone().into(),
            tau_a: self.tau_a.as_ref().map(|t| TreatmentFile { gamma: t.gamma.clone() }),
            tau_y: OutcomeFile {
                beta0: self.tau_y.beta0,
                beta_a: self.tau_y.beta_a,
                beta_a_nbr: self.tau_y.beta_a_nbr,
                beta_l: self.tau_y.beta_l.clone(),
                beta_l_nbr: self.tau_y.beta_l_nbr.clone(),
                theta: self.tau_y.theta,
            },
            weight_scheme: self.weight_scheme(),
        };
        serde_json::to_string_pretty(&file).expect("parameters serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: ModelParamsFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let scheme = f.weight_scheme;
        let tau_l = CovariateParams::new(f.tau_l.tau, f.tau_l.rho, f.tau_l.nu, scheme)?;
        let tau_a = f.tau_a.map(|t| TreatmentParams::new(t.gamma, scheme)).transpose()?;
        let y = f.tau_y;
        let tau_y = OutcomeParams {
            beta0: y.beta0,
            beta_a: y.beta_a,
            beta_a_nbr: y.beta_a_nbr,
            beta_l: y.beta_l,
            beta_l_nbr: y.beta_l_nbr,
            theta: y.theta,
            weight_scheme: scheme,
        };
        Self::new(tau_l, tau_a, tau_y)
    }
}

fn check_unit(g: &NetworkGraph, i: usize) -> Result<()> {
    if i < g.n_units() {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { index: i, n: g.n_units() })
    }
}

fn unit_weight(g: &NetworkGraph, scheme: WeightScheme, i: usize) -> f64 {
    match scheme {
        WeightScheme::RawSum => 1.0,
        WeightScheme::DegreeNormalized if g.degree(i) == 0 => 0.0,
        WeightScheme::DegreeNormalized => 1.0 / g.degree(i) as f64,
    }
}

/// `Pr(Y_i = 1 | Markov blanket)`; the value of `Y_i` in `sample` is ignored.
pub fn cond_prob_y(g: &NetworkGraph, i: usize, sample: &FieldSample, params: &OutcomeParams) -> Result<f64> {
    params.validate()?;
    sample.check_against(g, params.p())?;
    check_unit(g, i)?;
    let w = unit_weight(g, params.weight_scheme, i);
    Ok(expit(params.eta(g, w, i, &sample.view(), sample.a(i))))
}

/// `Pr(L_{k,i} = 1 | L_{-k,i}, neighbor covariates)`.
pub fn cond_prob_l(g: &NetworkGraph, i: usize, k: usize, sample: &FieldSample, params: &CovariateParams) -> Result<f64> {
    sample.check_against(g, params.p())?;
    check_unit(g, i)?;
    if k >= params.p() {
        return Err(Error::IndexOutOfRange { index: k, n: params.p() });
    }
    let w = unit_weight(g, params.weight_scheme, i);
    Ok(expit(params.eta(g, w, i, k, sample.covariates())))
}

/// `Pr(A_i = 1 | L_i, neighbor covariates and treatments)`.
pub fn cond_prob_a(g: &NetworkGraph, i: usize, sample: &FieldSample, params: &TreatmentParams) -> Result<f64> {
    sample.check_against(g, params.p())?;
    check_unit(g, i)?;
    let w = unit_weight(g, params.weight_scheme, i);
    Ok(expit(params.eta(g, w, i, &sample.view())))
}

/// Unnormalized log-density of the outcome vector given `(a, l)`:
/// `sum_i y_i G~_i + sum_{i<j, (i,j) in E} y_i y_j theta (w_i + w_j) / 2`.
pub fn energy_y(g: &NetworkGraph, sample: &FieldSample, params: &OutcomeParams) -> Result<f64> {
    params.validate()?;
    sample.check_against(g, params.p())?;
    Ok(energy_y_unchecked(g, &params.weight_scheme.unit_weights(g), &sample.view(), params))
}

pub(crate) fn energy_y_unchecked(g: &NetworkGraph, w: &[f64], field: &Field<'_>, params: &OutcomeParams) -> f64 {
    let mut u = 0.0;
    for i in 0..g.n_units() {
        if field.y[i] == 1 {
            u += params.baseline_eta(g, w[i], i, field);
        }
    }
    for (i, j) in g.edges() {
        if field.y[i] == 1 && field.y[j] == 1 {
            u += params.theta * 0.5 * (w[i] + w[j]);
        }
    }
    u
}

/// Unnormalized log-density of the covariate field:
/// `sum_i [sum_k tau_k l_ki + sum_{k<s} rho_ks l_ki l_si]
///  + sum_{i<j, (i,j) in E} (v_i + v_j) / 2 * sum_{k,s} nu_ks l_ki l_sj`.
pub fn energy_l(g: &NetworkGraph, sample: &FieldSample, params: &CovariateParams) -> Result<f64> {
    sample.check_against(g, params.p())?;
    Ok(energy_l_unchecked(g, &params.weight_scheme.unit_weights(g), sample.covariates(), params))
}

pub(crate) fn energy_l_unchecked(g: &NetworkGraph, w: &[f64], l: &[u8], params: &CovariateParams) -> f64 {
    let p = params.p();
    let mut u = 0.0;
    for i in 0..g.n_units() {
        let li = &l[i * p..(i + 1) * p];
        for k in 0..p {
            if li[k] == 1 {
                u += params.tau(k);
                for s in k + 1..p {
                    if li[s] == 1 {
                        u += params.rho(k, s);
                    }
                }
            }
        }
    }
    for (i, j) in g.edges() {
        let (li, lj) = (&l[i * p..(i + 1) * p], &l[j * p..(j + 1) * p]);
        let mut pair = 0.0;
        for k in 0..p {
            if li[k] == 1 {
                for s in 0..p {
                    if lj[s] == 1 {
                        pair += params.nu(k, s);
                    }
                }
            }
        }
        u += 0.5 * (w[i] + w[j]) * pair;
    }
    u
}

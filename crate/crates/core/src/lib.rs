//! Auto-g-computation: direct and spillover effects on a single observed
//! network.
//!
//! The observed data are one realization of binary covariates `L`, treatment
//! `A` and outcome `Y` on the units of a network. Covariates and outcomes
//! follow auto-logistic Markov random fields whose full conditionals depend on
//! a unit's own variables and on its neighbors. The crate provides
//!
//! * [`netgraph`]: network topology, stable sets and random graph generation;
//! * [`automodel`]: parameter bundles and the Gibbs factors;
//! * [`oracle`]: exact enumeration on tiny networks;
//! * [`gibbs`]: the single-site Gibbs sampler and counterfactual means;
//! * [`fit`]: coding and pseudo-likelihood estimators;
//! * [`effects`]: allocation-averaged effects with bootstrap and
//!   normal-resampling uncertainty;
//! * [`study`]: the simulation-study harness;
//! * [`io`]: node-data and result file formats.

pub mod automodel;
pub mod effects;
pub mod error;
pub mod fit;
pub mod gibbs;
pub mod io;
pub mod netgraph;
pub mod oracle;
pub mod seed;
pub mod study;

pub use error::{Error, Result};

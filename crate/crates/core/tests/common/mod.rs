#![allow(dead_code)]

use rand::Rng;

use autog::automodel::{CovariateParams, FieldSample, ModelParams, OutcomeParams, TreatmentParams, WeightScheme};
use autog::gibbs::{run_chain_blockwise, ChainSettings, TreatmentMode, DEFAULT_BLOCK_SWEEPS};
use autog::netgraph::{random_graph, NetworkGraph};
use autog::seed;

/// A random network with at most `max_n` units and parameters drawn from
/// `[-1, 1]`.
pub struct Tiny {
    pub g: NetworkGraph,
    pub tau_l: CovariateParams,
    pub tau_y: OutcomeParams,
    pub tau_a: TreatmentParams,
    pub a: Vec<u8>,
}

pub fn tiny(seed_value: u64, max_n: usize, max_p: usize) -> Tiny {
    let mut rng = seed::rng(seed_value);
    let n = rng.random_range(1..=max_n);
    let p = rng.random_range(0..=max_p);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.6) {
                edges.push((i, j));
            }
        }
    }
    let g = NetworkGraph::new(n, edges).unwrap();
    let mut unif = |len: usize| (0..len).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>();
    let scheme = WeightScheme::RawSum;
    let tau_l = CovariateParams::from_vector(p, &unif(CovariateParams::n_free(p)), scheme).unwrap();
    let tau_y = OutcomeParams::from_vector(p, &unif(OutcomeParams::n_free(p)), scheme).unwrap();
    let tau_a = TreatmentParams::new(unif(TreatmentParams::n_free(p)), scheme).unwrap();
    let a = (0..n).map(|_| rng.random_range(0..=1u8)).collect();
    Tiny { g, tau_l, tau_y, tau_a, a }
}

/// One data set drawn from the baseline model on a low-density network.
pub fn baseline_data(n: usize, seed_value: u64) -> (NetworkGraph, ModelParams, FieldSample) {
    let g = random_graph(n, 2, 4, seed::derive(seed_value, 1)).unwrap();
    let m = ModelParams::baseline();
    let data = run_chain_blockwise(
        &g,
        &m.tau_l,
        &m.tau_y,
        &TreatmentMode::Model(m.tau_a.clone().unwrap()),
        &ChainSettings::new(600, 500, 1, seed::derive(seed_value, 2)).unwrap(),
        DEFAULT_BLOCK_SWEEPS,
    )
    .unwrap()
    .pop()
    .unwrap();
    (g, m, data)
}

/// A random permutation of `0..n`.
pub fn permutation(n: usize, seed_value: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed_value);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    perm
}

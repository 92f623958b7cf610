#![allow(dead_code)]

use markov_loss::hmm::{EmissionModel, HmmSpec, PosteriorMarginals};
use markov_loss::loss::CostSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_distribution(rng: &mut impl Rng, m: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

pub fn random_model(rng: &mut impl Rng, m: usize) -> HmmSpec {
    let initial = random_distribution(rng, m);
    let transitions = (0..m).map(|_| random_distribution(rng, m)).collect();
    let emissions = (0..m)
        .map(|s| {
            let e = EmissionModel::gaussian(
                s as f64 + rng.random_range(-0.5..0.5),
                rng.random_range(0.3..2.0),
            );
            if rng.random_bool(0.5) {
                e.with_outliers(rng.random_range(0.0..0.1), 0.0, 9.0)
            } else {
                e
            }
        })
        .collect();
    HmmSpec::new(initial, transitions, emissions).unwrap()
}

pub fn random_observations(rng: &mut impl Rng, n: usize, m: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.random_range(-1.5..(m as f64 + 0.5)))
        .collect()
}

/// Consistent posterior marginals from a random model and random observations.
pub fn random_posterior(rng: &mut impl Rng, n: usize, m: usize) -> PosteriorMarginals {
    let model = random_model(rng, m);
    let obs = random_observations(rng, n, m);
    model.forward_backward(&obs).unwrap()
}

pub fn random_costs(rng: &mut impl Rng) -> CostSet {
    let mut c = || rng.random_range(0.0..5.0);
    let costs = CostSet::new(c(), c(), c(), c(), c() * 10.0);
    let mc = rng.random_range(0.0..5.0);
    costs.with_mc(mc)
}

pub fn all_paths(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..m).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

/// Unary and pairwise marginals plus evidence by direct summation over every path.
pub fn enumerate_marginals(model: &HmmSpec, obs: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
    let m = model.num_states();
    let n = obs.len();
    let mut unary = vec![0.0; n * m];
    let mut pairwise = vec![0.0; (n - 1) * m * m];
    let mut z = 0.0;
    for p in all_paths(n, m) {
        let mut w = model.initial()[p[0]] * model.emissions()[p[0]].density(obs[0]);
        for i in 1..n {
            w *= model.transitions()[p[i - 1]][p[i]] * model.emissions()[p[i]].density(obs[i]);
        }
        z += w;
        for i in 0..n {
            unary[i * m + p[i]] += w;
        }
        for i in 0..n - 1 {
            pairwise[i * m * m + p[i] * m + p[i + 1]] += w;
        }
    }
    unary.iter_mut().for_each(|v| *v /= z);
    pairwise.iter_mut().for_each(|v| *v /= z);
    (unary, pairwise, z)
}

//! Discrete-state hidden Markov models with Gaussian-mixture emissions.
//!
//! States are indexed `0..num_states`; state 0 is the null (resting) state.
//! Posterior inference uses the scaled forward-backward recursion: emission
//! log-densities are shifted by their per-position maximum before
//! exponentiation and the forward variables are renormalised at every
//! position, with the normalisers accumulated in log form for the evidence.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the row sums of `initial` and `transitions`.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Tolerance used when checking posterior marginals produced by [`HmmSpec::forward_backward`].
pub const MARGINAL_TOL: f64 = 1e-10;

fn default_outlier_var() -> f64 {
    1.0
}

/// Two-component emission density `(1-η)·N(μ, σ²) + η·N(μ_out, σ²_out)`.
///
/// With `outlier_prob == 0` this is a single Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmissionModel {
    pub main_mean: f64,
    pub main_var: f64,
    #[serde(default)]
    pub outlier_prob: f64,
    #[serde(default)]
    pub outlier_mean: f64,
    #[serde(default = "default_outlier_var")]
    pub outlier_var: f64,
}

fn normal_log_pdf(y: f64, mean: f64, var: f64) -> f64 {
    let d = y - mean;
    -0.5 * (2.0 * PI * var).ln() - d * d / (2.0 * var)
}

impl EmissionModel {
    pub fn gaussian(mean: f64, var: f64) -> Self {
        EmissionModel {
            main_mean: mean,
            main_var: var,
            outlier_prob: 0.0,
            outlier_mean: 0.0,
            outlier_var: default_outlier_var(),
        }
    }

    /// Adds an outlier component drawn with probability `prob` from `N(mean, var)`.
    pub fn with_outliers(mut self, prob: f64, mean: f64, var: f64) -> Self {
        self.outlier_prob = prob;
        self.outlier_mean = mean;
        self.outlier_var = var;
        self
    }

    /// Same main component, outlier component removed.
    pub fn without_outliers(self) -> Self {
        EmissionModel::gaussian(self.main_mean, self.main_var)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.main_mean.is_finite() || !self.outlier_mean.is_finite() {
            return Err(Error::model("emission means must be finite"));
        }
        if !(self.main_var > 0.0 && self.main_var.is_finite()) {
            return Err(Error::model(format!(
                "emission variance must be positive and finite, got {}",
                self.main_var
            )));
        }
        if !(0.0..1.0).contains(&self.outlier_prob) {
            return Err(Error::model(format!(
                "outlier probability must lie in [0, 1), got {}",
                self.outlier_prob
            )));
        }
        if !(self.outlier_var > 0.0 && self.outlier_var.is_finite()) {
            return Err(Error::model(format!(
                "outlier variance must be positive and finite, got {}",
                self.outlier_var
            )));
        }
        Ok(())
    }

    pub fn log_density(&self, y: f64) -> f64 {
        let main = normal_log_pdf(y, self.main_mean, self.main_var);
        if self.outlier_prob == 0.0 {
            return main;
        }
        let a = (1.0 - self.outlier_prob).ln() + main;
        let b = self.outlier_prob.ln() + normal_log_pdf(y, self.outlier_mean, self.outlier_var);
        let hi = a.max(b);
        hi + ((a - hi).exp() + (b - hi).exp()).ln()
    }

    pub fn density(&self, y: f64) -> f64 {
        self.log_density(y).exp()
    }
}

/// A state sequence, either decoded or ground truth.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StatePath(Vec<usize>);

impl StatePath {
    pub fn new(states: Vec<usize>) -> Self {
        StatePath(states)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    /// Number of positions whose state is not the null state.
    pub fn non_null_count(&self) -> usize {
        self.0.iter().filter(|&&s| s != 0).count()
    }

    /// Fails unless every entry is below `num_states`.
    pub fn check_states(&self, num_states: usize) -> Result<()> {
        match self.0.iter().position(|&s| s >= num_states) {
            Some(i) => Err(Error::input(format!(
                "state {} at position {} is out of range for a {}-state model",
                self.0[i],
                i + 1,
                num_states
            ))),
            None => Ok(()),
        }
    }
}

impl From<Vec<usize>> for StatePath {
    fn from(v: Vec<usize>) -> Self {
        StatePath(v)
    }
}

impl Index<usize> for StatePath {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl<'a> IntoIterator for &'a StatePath {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for StatePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Unary and pairwise posterior marginals for one sequence.
///
/// `unary` is `n × m` and `pairwise` is `(n-1) × m × m` (row-major, pair index
/// `j·m + k` for `π(x_i = j, x_{i+1} = k | y)`), with `m = num_states`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMarginals {
    num_states: usize,
    n: usize,
    unary: Vec<f64>,
    pairwise: Vec<f64>,
    log_evidence: f64,
}

impl PosteriorMarginals {
    /// Builds marginals from flat tables, checking shape and finiteness only.
    ///
    /// Use [`check_consistency`](Self::check_consistency) to verify normalisation
    /// and marginalisation.
    pub fn from_parts(
        num_states: usize,
        unary: Vec<f64>,
        pairwise: Vec<f64>,
        log_evidence: f64,
    ) -> Result<Self> {
        if num_states < 2 {
            return Err(Error::input("marginals need at least two states"));
        }
        if unary.is_empty() || !unary.len().is_multiple_of(num_states) {
            return Err(Error::input(format!(
                "unary table length {} is not a positive multiple of {num_states}",
                unary.len()
            )));
        }
        let n = unary.len() / num_states;
        let expected = (n - 1) * num_states * num_states;
        if pairwise.len() != expected {
            return Err(Error::input(format!(
                "pairwise table has {} entries, expected {expected} for n = {n}",
                pairwise.len()
            )));
        }
        if let Some(v) = unary
            .iter()
            .chain(&pairwise)
            .find(|v| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::input(format!(
                "marginal probability {v} is not a finite non-negative value"
            )));
        }
        Ok(PosteriorMarginals {
            num_states,
            n,
            unary,
            pairwise,
            log_evidence,
        })
    }

    /// Builds marginals from pairwise tables alone, deriving the unary rows by
    /// marginalisation: position 1 from the row sums of boundary 1, position
    /// `i+1` from the column sums of boundary `i`.
    ///
    /// Requires at least one boundary. `log_evidence` is set to NaN since no
    /// likelihood is available.
    pub fn from_pairwise(num_states: usize, pairwise: Vec<f64>) -> Result<Self> {
        let m2 = num_states * num_states;
        if num_states < 2 || pairwise.is_empty() || !pairwise.len().is_multiple_of(m2) {
            return Err(Error::input(format!(
                "pairwise table of length {} does not hold whole {num_states}x{num_states} slabs",
                pairwise.len()
            )));
        }
        let boundaries = pairwise.len() / m2;
        let mut unary = vec![0.0; (boundaries + 1) * num_states];
        let first = &pairwise[..m2];
        for j in 0..num_states {
            unary[j] = first[j * num_states..(j + 1) * num_states].iter().sum();
        }
        for b in 0..boundaries {
            let slab = &pairwise[b * m2..(b + 1) * m2];
            let row = &mut unary[(b + 1) * num_states..(b + 2) * num_states];
            for (k, u) in row.iter_mut().enumerate() {
                *u = (0..num_states).map(|j| slab[j * num_states + k]).sum();
            }
        }
        Self::from_parts(num_states, unary, pairwise, f64::NAN)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_boundaries(&self) -> usize {
        self.n - 1
    }

    /// `π(x_i = · | y)` for 0-based position `i`.
    pub fn unary(&self, i: usize) -> &[f64] {
        &self.unary[i * self.num_states..(i + 1) * self.num_states]
    }

    /// `π(x_i = j, x_{i+1} = k | y)` for 0-based boundary `i`, indexed `j·m + k`.
    pub fn pairwise(&self, i: usize) -> &[f64] {
        let m2 = self.num_states * self.num_states;
        &self.pairwise[i * m2..(i + 1) * m2]
    }

    pub fn unary_table(&self) -> &[f64] {
        &self.unary
    }

    pub fn pairwise_table(&self) -> &[f64] {
        &self.pairwise
    }

    /// `log π(y)`; NaN for marginals supplied without a likelihood.
    pub fn log_evidence(&self) -> f64 {
        self.log_evidence
    }

    /// Largest violation among row normalisation and pairwise-to-unary
    /// marginalisation, with the 0-based position or boundary where it occurs.
    pub fn max_inconsistency(&self) -> (f64, usize) {
        let m = self.num_states;
        let mut worst = (0.0f64, 0usize);
        let mut note = |err: f64, at: usize| {
            if err > worst.0 {
                worst = (err, at);
            }
        };
        for i in 0..self.n {
            note((self.unary(i).iter().sum::<f64>() - 1.0).abs(), i);
        }
        for b in 0..self.num_boundaries() {
            let slab = self.pairwise(b);
            note((slab.iter().sum::<f64>() - 1.0).abs(), b);
            let left = self.unary(b);
            let right = self.unary(b + 1);
            for j in 0..m {
                let row: f64 = slab[j * m..(j + 1) * m].iter().sum();
                note((row - left[j]).abs(), b);
                let col: f64 = (0..m).map(|r| slab[r * m + j]).sum();
                note((col - right[j]).abs(), b);
            }
        }
        worst
    }

    /// Checks every normalisation and marginalisation identity within `tol`.
    pub fn check_consistency(&self, tol: f64) -> Result<()> {
        let (err, at) = self.max_inconsistency();
        if err > tol {
            return Err(Error::Consistency(format!(
                "marginals inconsistent by {err:.3e} at position/boundary {} (tolerance {tol:e})",
                at + 1
            )));
        }
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHmmSpec {
    initial: Vec<f64>,
    transitions: Vec<Vec<f64>>,
    emissions: Vec<EmissionModel>,
}

impl TryFrom<RawHmmSpec> for HmmSpec {
    type Error = Error;

    fn try_from(raw: RawHmmSpec) -> Result<Self> {
        HmmSpec::new(raw.initial, raw.transitions, raw.emissions)
    }
}

/// HMM parameters: initial distribution `ν`, transition matrix `T` with
/// `T[j][k] = π(x_i = k | x_{i-1} = j)`, and one emission density per state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHmmSpec")]
pub struct HmmSpec {
    initial: Vec<f64>,
    transitions: Vec<Vec<f64>>,
    emissions: Vec<EmissionModel>,
}

fn check_distribution(what: &str, p: &[f64]) -> Result<()> {
    if let Some(v) = p.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::model(format!("{what} has invalid entry {v}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::model(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

impl HmmSpec {
    pub fn new(
        initial: Vec<f64>,
        transitions: Vec<Vec<f64>>,
        emissions: Vec<EmissionModel>,
    ) -> Result<Self> {
        let m = initial.len();
        if m < 2 {
            return Err(Error::model(format!("need at least 2 states, got {m}")));
        }
        if transitions.len() != m || transitions.iter().any(|r| r.len() != m) {
            return Err(Error::model(format!("transition matrix must be {m}x{m}")));
        }
        if emissions.len() != m {
            return Err(Error::model(format!(
                "expected {m} emission models, got {}",
                emissions.len()
            )));
        }
        check_distribution("initial distribution", &initial)?;
        for (j, row) in transitions.iter().enumerate() {
            check_distribution(&format!("transition row {j}"), row)?;
        }
        for e in &emissions {
            e.validate()?;
        }
        Ok(HmmSpec {
            initial,
            transitions,
            emissions,
        })
    }

    pub fn num_states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn transitions(&self) -> &[Vec<f64>] {
        &self.transitions
    }

    pub fn emissions(&self) -> &[EmissionModel] {
        &self.emissions
    }

    /// The same chain with every outlier component stripped from the emissions.
    pub fn without_outliers(&self) -> HmmSpec {
        HmmSpec {
            initial: self.initial.clone(),
            transitions: self.transitions.clone(),
            emissions: self
                .emissions
                .iter()
                .map(|e| e.without_outliers())
                .collect(),
        }
    }

    /// Row-major `n × m` table of `log p(y_i | x_i = j)`.
    pub fn emission_log_likelihoods(&self, observations: &[f64]) -> Result<Vec<f64>> {
        if observations.is_empty() {
            return Err(Error::input("observation sequence is empty"));
        }
        let mut out = Vec::with_capacity(observations.len() * self.num_states());
        for (i, &y) in observations.iter().enumerate() {
            if !y.is_finite() {
                return Err(Error::input(format!(
                    "observation {} is not finite ({y})",
                    i + 1
                )));
            }
            out.extend(self.emissions.iter().map(|e| e.log_density(y)));
        }
        Ok(out)
    }

    fn check_log_likelihoods(&self, log_lik: &[f64]) -> Result<usize> {
        let m = self.num_states();
        if log_lik.is_empty() || !log_lik.len().is_multiple_of(m) {
            return Err(Error::input(format!(
                "log-likelihood table length {} is not a positive multiple of {m}",
                log_lik.len()
            )));
        }
        if log_lik.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::input("log-likelihoods must be finite or -inf"));
        }
        Ok(log_lik.len() / m)
    }

    pub fn forward_backward(&self, observations: &[f64]) -> Result<PosteriorMarginals> {
        let ll = self.emission_log_likelihoods(observations)?;
        self.forward_backward_log_likelihoods(&ll)
    }

    /// Forward-backward on a precomputed `n × m` table of emission log-likelihoods.
    ///
    /// Entries may be `-inf` (zero density); a position at which every state
    /// has zero density, or a sequence with zero total likelihood, is an input error.
    pub fn forward_backward_log_likelihoods(&self, log_lik: &[f64]) -> Result<PosteriorMarginals> {
        let n = self.check_log_likelihoods(log_lik)?;
        let m = self.num_states();

        let mut lik = vec![0.0; n * m];
        let mut log_evidence = 0.0;
        for i in 0..n {
            let row = &log_lik[i * m..(i + 1) * m];
            let peak = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if peak == f64::NEG_INFINITY {
                return Err(Error::input(format!(
                    "observation {} has zero density under every state",
                    i + 1
                )));
            }
            log_evidence += peak;
            for (dst, &l) in lik[i * m..(i + 1) * m].iter_mut().zip(row) {
                *dst = (l - peak).exp();
            }
        }

        let mut alpha = vec![0.0; n * m];
        let mut scale = vec![0.0; n];
        for j in 0..m {
            alpha[j] = self.initial[j] * lik[j];
        }
        for i in 0..n {
            if i > 0 {
                let (prev, cur) = alpha.split_at_mut(i * m);
                let prev = &prev[(i - 1) * m..];
                for (k, a) in cur[..m].iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for j in 0..m {
                        acc += prev[j] * self.transitions[j][k];
                    }
                    *a = acc * lik[i * m + k];
                }
            }
            let row = &mut alpha[i * m..(i + 1) * m];
            let s: f64 = row.iter().sum();
            if s <= 0.0 {
                return Err(Error::input(format!(
                    "observations have zero likelihood under the model (at position {})",
                    i + 1
                )));
            }
            row.iter_mut().for_each(|a| *a /= s);
            scale[i] = s;
            log_evidence += s.ln();
        }

        let mut beta = vec![1.0; n * m];
        for i in (0..n - 1).rev() {
            let (cur, next) = beta.split_at_mut((i + 1) * m);
            let next = &next[..m];
            for (j, b) in cur[i * m..].iter_mut().enumerate() {
                let mut acc = 0.0;
                for k in 0..m {
                    acc += self.transitions[j][k] * lik[(i + 1) * m + k] * next[k];
                }
                *b = acc / scale[i + 1];
            }
        }

        let mut unary = vec![0.0; n * m];
        for i in 0..n {
            let row = &mut unary[i * m..(i + 1) * m];
            for (j, u) in row.iter_mut().enumerate() {
                *u = alpha[i * m + j] * beta[i * m + j];
            }
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|u| *u /= s);
        }

        let m2 = m * m;
        let mut pairwise = vec![0.0; (n - 1) * m2];
        for i in 0..n.saturating_sub(1) {
            let slab = &mut pairwise[i * m2..(i + 1) * m2];
            for j in 0..m {
                for k in 0..m {
                    slab[j * m + k] = alpha[i * m + j]
                        * self.transitions[j][k]
                        * lik[(i + 1) * m + k]
                        * beta[(i + 1) * m + k]
                        / scale[i + 1];
                }
            }
            let s: f64 = slab.iter().sum();
            slab.iter_mut().for_each(|p| *p /= s);
        }

        Ok(PosteriorMarginals {
            num_states: m,
            n,
            unary,
            pairwise,
            log_evidence,
        })
    }

    pub fn viterbi(&self, observations: &[f64]) -> Result<StatePath> {
        let ll = self.emission_log_likelihoods(observations)?;
        self.viterbi_log_likelihoods(&ll)
    }

    /// Most probable path given emission log-likelihoods. Ties at every
    /// argmax (including the final state) go to the lowest state index.
    pub fn viterbi_log_likelihoods(&self, log_lik: &[f64]) -> Result<StatePath> {
        let n = self.check_log_likelihoods(log_lik)?;
        let m = self.num_states();
        let log_t: Vec<f64> = self.transitions.iter().flatten().map(|p| p.ln()).collect();

        let mut score: Vec<f64> = (0..m).map(|j| self.initial[j].ln() + log_lik[j]).collect();
        let mut next = vec![0.0; m];
        let mut back = vec![0usize; n * m];
        for i in 1..n {
            for k in 0..m {
                let mut best = f64::NEG_INFINITY;
                let mut arg = 0;
                for j in 0..m {
                    let v = score[j] + log_t[j * m + k];
                    if v > best {
                        best = v;
                        arg = j;
                    }
                }
                back[i * m + k] = arg;
                next[k] = best + log_lik[i * m + k];
            }
            std::mem::swap(&mut score, &mut next);
        }

        let mut last = 0;
        for k in 1..m {
            if score[k] > score[last] {
                last = k;
            }
        }
        if score[last] == f64::NEG_INFINITY {
            return Err(Error::input(
                "observations have zero likelihood under the model",
            ));
        }
        let mut path = vec![0; n];
        path[n - 1] = last;
        for i in (1..n).rev() {
            path[i - 1] = back[i * m + path[i]];
        }
        Ok(StatePath(path))
    }

    /// `log π(x, y)`; `-inf` when any factor is zero.
    pub fn log_joint(&self, path: &StatePath, observations: &[f64]) -> Result<f64> {
        if path.len() != observations.len() {
            return Err(Error::input(format!(
                "path length {} differs from observation length {}",
                path.len(),
                observations.len()
            )));
        }
        let ll = self.emission_log_likelihoods(observations)?;
        self.log_joint_log_likelihoods(path, &ll)
    }

    pub fn log_joint_log_likelihoods(&self, path: &StatePath, log_lik: &[f64]) -> Result<f64> {
        let n = self.check_log_likelihoods(log_lik)?;
        let m = self.num_states();
        if path.len() != n {
            return Err(Error::input(format!(
                "path length {} differs from sequence length {n}",
                path.len()
            )));
        }
        path.check_states(m)?;
        let x = path.as_slice();
        let mut total = self.initial[x[0]].ln() + log_lik[x[0]];
        for i in 1..n {
            total += self.transitions[x[i - 1]][x[i]].ln() + log_lik[i * m + x[i]];
        }
        Ok(total)
    }
}

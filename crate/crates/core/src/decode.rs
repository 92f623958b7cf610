//! Minimum-expected-loss decoders.
//!
//! [`decode_markov_loss`] minimises the pairwise expected loss with a
//! Viterbi-style dynamic program over the per-boundary expected losses
//! `L_i(j,k) = Σ_t l((j,k) | t)·π(t at boundary i)`. The table of `L` values
//! costs `O(m⁴·n)` to fill and the recursion `O(m²·n)`.

use crate::error::{Error, Result};
use crate::hmm::{PosteriorMarginals, StatePath};
use crate::loss::{call_cost, check_dimensions, marginal_costs, pair_expected_loss, LossMatrix};

/// Largest number of candidate paths [`brute_force_mel`] will enumerate.
pub const BRUTE_FORCE_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub path: StatePath,
    /// Sum of `per_boundary_loss`.
    pub expected_loss: f64,
    /// Expected loss contributed by the chosen pair at each of the `n-1` boundaries.
    pub per_boundary_loss: Vec<f64>,
}

fn check_finite(marginals: &PosteriorMarginals) -> Result<()> {
    let bad = marginals
        .unary_table()
        .iter()
        .chain(marginals.pairwise_table())
        .any(|v| !v.is_finite());
    if bad {
        return Err(Error::input("marginals contain non-finite values"));
    }
    Ok(())
}

/// Lowest index among the maxima.
fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Per-boundary expected loss of every predicted pair, `(n-1) × m²`.
pub fn boundary_loss_table(marginals: &PosteriorMarginals, loss: &LossMatrix) -> Result<Vec<f64>> {
    check_dimensions(marginals, loss)?;
    let m2 = loss.num_states() * loss.num_states();
    let mut table = vec![0.0; marginals.num_boundaries() * m2];
    for (b, out) in table.chunks_exact_mut(m2).enumerate() {
        let probs = marginals.pairwise(b);
        for (p, slot) in out.iter_mut().enumerate() {
            *slot = pair_expected_loss(loss.row(p), probs);
        }
    }
    Ok(table)
}

/// Path minimising the expected Markov loss.
///
/// Every boundary is charged exactly once: `φ_1(k) = 0`, then
/// `φ_i(k) = min_j φ_{i-1}(j) + L_{i-1}(j,k)`, with ties going to the lowest
/// state index in both the recursion and the final argmin. A single position
/// has no pairwise information and decodes to the unary argmax with zero loss.
pub fn decode_markov_loss(
    marginals: &PosteriorMarginals,
    loss: &LossMatrix,
) -> Result<DecodeResult> {
    check_dimensions(marginals, loss)?;
    check_finite(marginals)?;
    let n = marginals.n();
    let m = loss.num_states();
    if n == 1 {
        return Ok(DecodeResult {
            path: StatePath::new(vec![argmax(marginals.unary(0))]),
            expected_loss: 0.0,
            per_boundary_loss: Vec::new(),
        });
    }

    let m2 = m * m;
    let mut l = vec![0.0; m2];
    let mut phi = vec![0.0; m];
    let mut next = vec![0.0; m];
    let mut back = vec![0usize; n * m];
    for i in 1..n {
        let probs = marginals.pairwise(i - 1);
        for (p, slot) in l.iter_mut().enumerate() {
            *slot = pair_expected_loss(loss.row(p), probs);
        }
        for k in 0..m {
            let mut best = phi[0] + l[k];
            let mut arg = 0;
            for j in 1..m {
                let v = phi[j] + l[j * m + k];
                if v < best {
                    best = v;
                    arg = j;
                }
            }
            next[k] = best;
            back[i * m + k] = arg;
        }
        std::mem::swap(&mut phi, &mut next);
    }

    let mut path = vec![0; n];
    path[n - 1] = argmin(&phi);
    for i in (1..n).rev() {
        path[i - 1] = back[i * m + path[i]];
    }
    let per_boundary_loss: Vec<f64> = (0..n - 1)
        .map(|b| pair_expected_loss(loss.row(path[b] * m + path[b + 1]), marginals.pairwise(b)))
        .collect();
    let expected_loss = per_boundary_loss.iter().fold(0.0, |a, v| a + v);
    Ok(DecodeResult {
        path: StatePath::new(path),
        expected_loss,
        per_boundary_loss,
    })
}

/// Per-position minimum-expected-loss calls under the generalised marginal loss
/// (`c_fpc` for a non-null call on a null truth, `c_fnc` for the reverse,
/// `c_fpc` for a miscall between non-null states). Ties go to the lower state.
pub fn decode_marginal(
    marginals: &PosteriorMarginals,
    c_fpc: f64,
    c_fnc: f64,
) -> Result<StatePath> {
    let costs = marginal_costs(c_fpc, c_fnc);
    costs.validate()?;
    check_finite(marginals)?;
    let m = marginals.num_states();
    let mut risk = vec![0.0; m];
    let path = (0..marginals.n())
        .map(|i| {
            let u = marginals.unary(i);
            for (j, r) in risk.iter_mut().enumerate() {
                *r = (0..m).fold(0.0, |acc, s| acc + call_cost(&costs, j, s) * u[s]);
            }
            argmin(&risk)
        })
        .collect();
    Ok(StatePath::new(path))
}

/// Exhaustive minimiser together with whether it is unique.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOutcome {
    pub result: DecodeResult,
    /// False when another path's expected loss lies within `1e-9·max(1, |min|)` of the minimum.
    pub unique: bool,
}

/// Exhaustive search over all `mⁿ` paths; see [`brute_force_mel_detailed`].
pub fn brute_force_mel(marginals: &PosteriorMarginals, loss: &LossMatrix) -> Result<DecodeResult> {
    brute_force_mel_detailed(marginals, loss).map(|o| o.result)
}

/// Enumerates every path in lexicographic order, keeping the first one with
/// the smallest expected loss. Refuses with a capacity error when `mⁿ`
/// exceeds [`BRUTE_FORCE_LIMIT`].
pub fn brute_force_mel_detailed(
    marginals: &PosteriorMarginals,
    loss: &LossMatrix,
) -> Result<OracleOutcome> {
    check_dimensions(marginals, loss)?;
    check_finite(marginals)?;
    let n = marginals.n();
    let m = loss.num_states();
    let total = (m as u64)
        .checked_pow(n as u32)
        .filter(|&t| t <= BRUTE_FORCE_LIMIT);
    let Some(total) = total else {
        return Err(Error::Capacity(format!(
            "{m}^{n} candidate paths exceed the enumeration limit of {BRUTE_FORCE_LIMIT}"
        )));
    };
    if n == 1 {
        return Ok(OracleOutcome {
            result: DecodeResult {
                path: StatePath::new(vec![argmax(marginals.unary(0))]),
                expected_loss: 0.0,
                per_boundary_loss: Vec::new(),
            },
            unique: true,
        });
    }

    let score = |x: &[usize]| -> f64 {
        let mut acc = 0.0;
        for b in 0..n - 1 {
            let probs = marginals.pairwise(b);
            for a in 0..m {
                for c in 0..m {
                    acc += loss.get((x[b], x[b + 1]), (a, c)) * probs[a * m + c];
                }
            }
        }
        acc
    };

    let mut x = vec![0usize; n];
    let mut best_path = x.clone();
    let mut best = f64::INFINITY;
    let mut losses = Vec::with_capacity(total as usize);
    for _ in 0..total {
        let v = score(&x);
        losses.push(v);
        if v < best {
            best = v;
            best_path.copy_from_slice(&x);
        }
        // odometer with the last position varying fastest
        for pos in (0..n).rev() {
            x[pos] += 1;
            if x[pos] < m {
                break;
            }
            x[pos] = 0;
        }
    }

    let tol = 1e-9 * best.abs().max(1.0);
    let unique = losses.iter().filter(|&&v| v - best <= tol).count() == 1;
    let per_boundary_loss = (0..n - 1)
        .map(|b| {
            let probs = marginals.pairwise(b);
            (0..m * m).fold(0.0, |acc, t| {
                acc + loss.get((best_path[b], best_path[b + 1]), (t / m, t % m)) * probs[t]
            })
        })
        .collect();
    Ok(OracleOutcome {
        result: DecodeResult {
            path: StatePath::new(best_path),
            expected_loss: best,
            per_boundary_loss,
        },
        unique,
    })
}

//! Pairwise (Markov) loss functions.
//!
//! A [`LossMatrix`] holds `l(pred pair | truth pair)` for every ordered pair of
//! consecutive states. Matrices built from a [`CostSet`] use the decomposition
//!
//! ```text
//! l((j,k) | (a,b)) = c_tp                                  if (j,k) == (a,b)
//!                  = transition_term + call_term            otherwise
//! ```
//!
//! where the transition term is `c_fpt` (prediction switches, truth does not),
//! `c_fnt` (truth switches, prediction does not), `c_dft` (both switch but the
//! ordered pairs differ) or 0, and the call term charges only the second element
//! of the pair: `c_fpc` (truth null, call non-null), `c_fnc` (call null, truth
//! non-null), `c_mc` (two different non-null states) or 0. Summed over the
//! boundaries of a sequence this charges each of positions `2..n` exactly once.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hmm::{PosteriorMarginals, StatePath};

/// The six costs of the binary loss design plus `c_mc` for miscalls between
/// two non-null states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCostSet")]
pub struct CostSet {
    #[serde(rename = "tp")]
    pub c_tp: f64,
    #[serde(rename = "fpc")]
    pub c_fpc: f64,
    #[serde(rename = "fnc")]
    pub c_fnc: f64,
    #[serde(rename = "fpt")]
    pub c_fpt: f64,
    #[serde(rename = "fnt")]
    pub c_fnt: f64,
    #[serde(rename = "dft")]
    pub c_dft: f64,
    #[serde(rename = "mc")]
    pub c_mc: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCostSet {
    #[serde(default)]
    tp: f64,
    fpc: f64,
    fnc: f64,
    fpt: f64,
    fnt: f64,
    dft: f64,
    mc: Option<f64>,
}

impl TryFrom<RawCostSet> for CostSet {
    type Error = Error;

    fn try_from(raw: RawCostSet) -> Result<Self> {
        let costs = CostSet {
            c_tp: raw.tp,
            c_fpc: raw.fpc,
            c_fnc: raw.fnc,
            c_fpt: raw.fpt,
            c_fnt: raw.fnt,
            c_dft: raw.dft,
            c_mc: raw.mc.unwrap_or(raw.fpc),
        };
        costs.validate()?;
        Ok(costs)
    }
}

impl CostSet {
    /// `c_tp = 0` and `c_mc = c_fpc`.
    pub fn new(c_fpc: f64, c_fnc: f64, c_fpt: f64, c_fnt: f64, c_dft: f64) -> Self {
        CostSet {
            c_tp: 0.0,
            c_fpc,
            c_fnc,
            c_fpt,
            c_fnt,
            c_dft,
            c_mc: c_fpc,
        }
    }

    /// Every error type costs 1; correct pairs cost 0.
    pub fn unit() -> Self {
        CostSet::new(1.0, 1.0, 1.0, 1.0, 1.0)
    }

    pub fn with_tp(mut self, c_tp: f64) -> Self {
        self.c_tp = c_tp;
        self
    }

    pub fn with_mc(mut self, c_mc: f64) -> Self {
        self.c_mc = c_mc;
        self
    }

    fn values(&self) -> [(&'static str, f64); 7] {
        [
            ("tp", self.c_tp),
            ("fpc", self.c_fpc),
            ("fnc", self.c_fnc),
            ("fpt", self.c_fpt),
            ("fnt", self.c_fnt),
            ("dft", self.c_dft),
            ("mc", self.c_mc),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.values() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Config(format!(
                    "cost {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// A doubly false transition is expected to cost at least as much as either
    /// single transition error. Returns a message when it does not.
    pub fn dft_warning(&self) -> Option<String> {
        let floor = self.c_fpt.max(self.c_fnt);
        (self.c_dft < floor).then(|| {
            format!(
                "c_dft = {} is below max(c_fpt, c_fnt) = {floor}; doubly false transitions are cheaper than single ones",
                self.c_dft
            )
        })
    }

    /// Every cost multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        CostSet {
            c_tp: self.c_tp * factor,
            c_fpc: self.c_fpc * factor,
            c_fnc: self.c_fnc * factor,
            c_fpt: self.c_fpt * factor,
            c_fnt: self.c_fnt * factor,
            c_dft: self.c_dft * factor,
            c_mc: self.c_mc * factor,
        }
    }
}

/// Cost set realising the (generalised) marginal loss: all transition costs are zero.
pub fn marginal_costs(c_fpc: f64, c_fnc: f64) -> CostSet {
    CostSet::new(c_fpc, c_fnc, 0.0, 0.0, 0.0)
}

/// Per-position loss of calling `pred` when the truth is `truth`, used by the
/// marginal decoder and as the call term of the pair loss.
pub(crate) fn call_cost(costs: &CostSet, pred: usize, truth: usize) -> f64 {
    if pred == truth {
        0.0
    } else if truth == 0 {
        costs.c_fpc
    } else if pred == 0 {
        costs.c_fnc
    } else {
        costs.c_mc
    }
}

fn transition_cost(costs: &CostSet, pred: (usize, usize), truth: (usize, usize)) -> f64 {
    let pred_moves = pred.0 != pred.1;
    let truth_moves = truth.0 != truth.1;
    match (pred_moves, truth_moves) {
        (true, true) if pred != truth => costs.c_dft,
        (true, false) => costs.c_fpt,
        (false, true) => costs.c_fnt,
        _ => 0.0,
    }
}

/// Pair-loss table `l(pred pair | truth pair)` over `m = num_states` states.
///
/// Entries are stored pred-pair-major: `entries[p·m² + t]` with pair index
/// `j·m + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    num_states: usize,
    entries: Vec<f64>,
}

impl LossMatrix {
    /// Accepts an arbitrary loss design; only shape, finiteness and
    /// non-negativity are checked.
    pub fn from_entries(num_states: usize, entries: Vec<f64>) -> Result<Self> {
        if num_states < 2 {
            return Err(Error::input(format!(
                "loss matrix needs at least 2 states, got {num_states}"
            )));
        }
        let m2 = num_states * num_states;
        if entries.len() != m2 * m2 {
            return Err(Error::input(format!(
                "loss matrix for {num_states} states needs {} entries, got {}",
                m2 * m2,
                entries.len()
            )));
        }
        if let Some(v) = entries.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::input(format!(
                "loss entry {v} is not finite and non-negative"
            )));
        }
        Ok(LossMatrix {
            num_states,
            entries,
        })
    }

    /// The 4×4 table for two states (null and one non-null state).
    pub fn binary(costs: &CostSet) -> Result<Self> {
        Self::multistate(costs, 2)
    }

    /// The cost-set decomposition applied to `num_states` states.
    pub fn multistate(costs: &CostSet, num_states: usize) -> Result<Self> {
        costs.validate()?;
        if num_states < 2 {
            return Err(Error::input(format!(
                "loss matrix needs at least 2 states, got {num_states}"
            )));
        }
        let m = num_states;
        let m2 = m * m;
        let mut entries = vec![0.0; m2 * m2];
        for p in 0..m2 {
            let pred = (p / m, p % m);
            for t in 0..m2 {
                let truth = (t / m, t % m);
                entries[p * m2 + t] = if pred == truth {
                    costs.c_tp
                } else {
                    transition_cost(costs, pred, truth) + call_cost(costs, pred.1, truth.1)
                };
            }
        }
        Ok(LossMatrix {
            num_states,
            entries,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, pred: (usize, usize), truth: (usize, usize)) -> f64 {
        let m = self.num_states;
        let m2 = m * m;
        self.entries[(pred.0 * m + pred.1) * m2 + truth.0 * m + truth.1]
    }

    /// Losses of predicting pair index `pred_pair` against every truth pair.
    pub fn row(&self, pred_pair: usize) -> &[f64] {
        let m2 = self.num_states * self.num_states;
        &self.entries[pred_pair * m2..(pred_pair + 1) * m2]
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::from_entries(
            self.num_states,
            self.entries.iter().map(|v| v * factor).collect(),
        )
    }
}

/// Expected loss `Σ_i Σ_{truth pair} l(pred pair_i | truth pair) · π(truth pair at boundary i)`.
///
/// Zero for a single position.
pub fn expected_loss(
    prediction: &StatePath,
    marginals: &PosteriorMarginals,
    loss: &LossMatrix,
) -> Result<f64> {
    check_dimensions(marginals, loss)?;
    if prediction.len() != marginals.n() {
        return Err(Error::input(format!(
            "prediction length {} differs from marginals length {}",
            prediction.len(),
            marginals.n()
        )));
    }
    prediction.check_states(loss.num_states())?;
    let m = loss.num_states();
    let x = prediction.as_slice();
    let mut total = 0.0;
    for b in 0..marginals.num_boundaries() {
        total += pair_expected_loss(loss.row(x[b] * m + x[b + 1]), marginals.pairwise(b));
    }
    Ok(total)
}

/// `Σ_t row[t] · probs[t]` in fixed index order.
pub(crate) fn pair_expected_loss(row: &[f64], probs: &[f64]) -> f64 {
    row.iter().zip(probs).fold(0.0, |acc, (l, p)| acc + l * p)
}

pub(crate) fn check_dimensions(marginals: &PosteriorMarginals, loss: &LossMatrix) -> Result<()> {
    if marginals.num_states() != loss.num_states() {
        return Err(Error::input(format!(
            "marginals have {} states but the loss matrix has {}",
            marginals.num_states(),
            loss.num_states()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Distinct powers of two so every sum of costs is identifiable.
    fn probe_costs() -> CostSet {
        CostSet {
            c_tp: 0.5,
            c_fpc: 1.0,
            c_fnc: 2.0,
            c_fpt: 4.0,
            c_fnt: 8.0,
            c_dft: 16.0,
            c_mc: 32.0,
        }
    }

    #[test]
    fn binary_matrix_reproduces_table() {
        let c = probe_costs();
        let l = LossMatrix::binary(&c).unwrap();
        let (tp, fpc, fnc, fpt, fnt, dft) = (c.c_tp, c.c_fpc, c.c_fnc, c.c_fpt, c.c_fnt, c.c_dft);
        // rows: predicted pair, columns: true pair (0,0) (0,1) (1,0) (1,1)
        let table = [
            [tp, fnt + fnc, fnt, fnc],
            [fpt + fpc, tp, dft + fpc, fpt],
            [fpt, dft + fnc, tp, fpt + fnc],
            // the printed table has fpc + fpc in the first cell of this row
            [fpc, fnt, fnt + fpc, tp],
        ];
        for p in 0..4 {
            for t in 0..4 {
                assert_eq!(
                    l.get((p / 2, p % 2), (t / 2, t % 2)),
                    table[p][t],
                    "pred {p} truth {t}"
                );
            }
        }
    }

    #[test]
    fn named_cells() {
        let c = probe_costs();
        let l = LossMatrix::binary(&c).unwrap();
        assert_eq!(l.get((0, 1), (1, 0)), c.c_dft + c.c_fpc);
        assert_eq!(l.get((1, 0), (0, 0)), c.c_fpt);
        for p in 0..4 {
            assert_eq!(l.get((p / 2, p % 2), (p / 2, p % 2)), c.c_tp);
        }
    }

    #[test]
    fn multistate_cells() {
        let c = probe_costs();
        let l = LossMatrix::multistate(&c, 3).unwrap();
        assert_eq!(l.get((0, 1), (0, 2)), c.c_dft + c.c_mc);
        assert_eq!(l.get((1, 1), (2, 2)), c.c_mc);
        assert_eq!(l.get((2, 0), (1, 0)), c.c_dft);
        assert_eq!(l.get((2, 2), (0, 0)), c.c_fpc);
    }

    #[test]
    fn multistate_restricts_to_binary() {
        let c = probe_costs();
        let bin = LossMatrix::binary(&c).unwrap();
        for m in 3..6 {
            let l = LossMatrix::multistate(&c, m).unwrap();
            for p in 0..4 {
                for t in 0..4 {
                    let (pp, tt) = ((p / 2, p % 2), (t / 2, t % 2));
                    assert_eq!(l.get(pp, tt), bin.get(pp, tt));
                }
            }
        }
        assert_eq!(LossMatrix::multistate(&c, 2).unwrap(), bin);
        assert!(LossMatrix::multistate(&c, 1).is_err());
    }

    #[test]
    fn marginal_cost_sets() {
        let c = marginal_costs(1.0, 1.0);
        assert_eq!(
            c,
            CostSet {
                c_tp: 0.0,
                c_fpc: 1.0,
                c_fnc: 1.0,
                c_fpt: 0.0,
                c_fnt: 0.0,
                c_dft: 0.0,
                c_mc: 1.0
            }
        );
        assert_eq!(marginal_costs(0.1, 1.0).c_fpc, 0.1);
        assert_eq!(marginal_costs(10.0, 1.0).c_fpc, 10.0);
        assert_eq!(marginal_costs(10.0, 1.0).c_mc, 10.0);
    }

    #[test]
    fn cost_validation_and_warning() {
        assert!(CostSet::new(-1.0, 1.0, 1.0, 1.0, 1.0).validate().is_err());
        assert!(CostSet::new(1.0, f64::NAN, 1.0, 1.0, 1.0)
            .validate()
            .is_err());
        assert!(CostSet::new(1.0, 1.0, 5.0, 1.0, 2.0)
            .dft_warning()
            .is_some());
        assert!(CostSet::new(1.0, 1.0, 1.0, 1.0, 1000.0)
            .dft_warning()
            .is_none());
    }

    #[test]
    fn cost_json_schema() {
        let c: CostSet =
            serde_json::from_str(r#"{"fpc":0.5,"fnc":1,"fpt":2,"fnt":1,"dft":1000}"#).unwrap();
        assert_eq!(c, CostSet::new(0.5, 1.0, 2.0, 1.0, 1000.0));
        assert!(serde_json::from_str::<CostSet>(
            r#"{"fpc":1,"fnc":1,"fpt":1,"fnt":1,"dft":1,"bogus":1}"#
        )
        .is_err());
        assert!(
            serde_json::from_str::<CostSet>(r#"{"fpc":-1,"fnc":1,"fpt":1,"fnt":1,"dft":1}"#)
                .is_err()
        );
    }

    #[test]
    fn explicit_matrix_validation() {
        assert!(LossMatrix::from_entries(2, vec![0.0; 16]).is_ok());
        assert!(LossMatrix::from_entries(2, vec![0.0; 15]).is_err());
        let mut bad = vec![0.0; 16];
        bad[3] = -1.0;
        assert!(LossMatrix::from_entries(2, bad).is_err());
    }

    fn point_mass(path: &[usize], m: usize) -> PosteriorMarginals {
        let n = path.len();
        let mut unary = vec![0.0; n * m];
        let mut pairwise = vec![0.0; (n - 1) * m * m];
        for (i, &s) in path.iter().enumerate() {
            unary[i * m + s] = 1.0;
        }
        for i in 0..n - 1 {
            pairwise[i * m * m + path[i] * m + path[i + 1]] = 1.0;
        }
        PosteriorMarginals::from_parts(m, unary, pairwise, 0.0).unwrap()
    }

    #[test]
    fn expected_loss_trivial_cases() {
        let post = point_mass(&[0, 1, 1, 0], 2);
        let zero = LossMatrix::from_entries(2, vec![0.0; 16]).unwrap();
        let path = StatePath::new(vec![1, 0, 1, 1]);
        assert_eq!(expected_loss(&path, &post, &zero).unwrap(), 0.0);
        let unit = LossMatrix::binary(&CostSet::unit()).unwrap();
        assert_eq!(
            expected_loss(&StatePath::new(vec![0, 1, 1, 0]), &post, &unit).unwrap(),
            0.0
        );
        let single = point_mass(&[1], 2);
        assert_eq!(
            expected_loss(&StatePath::new(vec![0]), &single, &unit).unwrap(),
            0.0
        );
        assert!(expected_loss(&StatePath::new(vec![0, 1]), &post, &unit).is_err());
        assert!(expected_loss(&StatePath::new(vec![0, 1, 2, 0]), &post, &unit).is_err());
    }

    #[test]
    fn expected_loss_matches_hand_rolled_double_sum() {
        use crate::hmm::{EmissionModel, HmmSpec};
        let model = HmmSpec::new(
            vec![0.5, 0.5],
            vec![vec![0.99, 0.01], vec![0.05, 0.95]],
            vec![
                EmissionModel::gaussian(0.0, 1.0),
                EmissionModel::gaussian(1.0, 1.0),
            ],
        )
        .unwrap();
        let post = model
            .forward_backward(&[0.8412, -0.2731, 1.9350, 1.1076])
            .unwrap();
        let unit = LossMatrix::binary(&CostSet::unit()).unwrap();
        let path = [0usize, 1, 1, 0];

        // unit costs written out cell by cell
        let cell = |p: (usize, usize), t: (usize, usize)| -> f64 {
            if p == t {
                return 0.0;
            }
            let pm = p.0 != p.1;
            let tm = t.0 != t.1;
            let trans = if pm || tm { 1.0 } else { 0.0 };
            let call = if p.1 != t.1 { 1.0 } else { 0.0 };
            trans + call
        };
        let mut want = 0.0;
        for b in 0..3 {
            for a in 0..2 {
                for c in 0..2 {
                    want += cell((path[b], path[b + 1]), (a, c)) * post.pairwise(b)[a * 2 + c];
                }
            }
        }
        let got = expected_loss(&StatePath::new(path.to_vec()), &post, &unit).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}

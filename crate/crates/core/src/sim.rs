//! Synthetic two-state study: sequence generator and decoder/loss sweeps.
//!
//! Each simulated sequence draws from its own ChaCha stream keyed by
//! `(seed, sequence index)`, so sequences can be generated and decoded in any
//! order or in parallel without changing the output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::decode::{decode_marginal, decode_markov_loss};
use crate::error::{Error, Result};
use crate::hmm::{EmissionModel, HmmSpec, StatePath};
use crate::loss::{marginal_costs, CostSet, LossMatrix};
use crate::metrics::{aggregate_reports, compare_paths, ErrorReport, RateCount, REPORT_COLUMNS};

pub const BENCH_LENGTH: usize = 1000;
pub const BENCH_SEQUENCES: usize = 1000;
/// Probability of leaving the null state.
pub const BENCH_RHO_NULL_TO_ALT: f64 = 0.01;
/// Probability of returning to the null state.
pub const BENCH_RHO_ALT_TO_NULL: f64 = 0.05;
pub const BENCH_OUTLIER_PROB: f64 = 0.01;
pub const BENCH_OUTLIER_MEAN: f64 = 0.0;
pub const BENCH_OUTLIER_VAR: f64 = 9.0;
pub const BENCH_DFT_COST: f64 = 1000.0;
pub const DEFAULT_GRID_POINTS: usize = 13;
pub const GRID_MIN: f64 = 0.1;
pub const GRID_MAX: f64 = 10.0;

/// Two-state Gaussian model with means {0, 1}, unit variance, switching
/// probabilities 0.01 / 0.05, uniform start, and a 1% outlier component N(0, 3²).
pub fn benchmark_model() -> HmmSpec {
    let outliers = |e: EmissionModel| {
        e.with_outliers(BENCH_OUTLIER_PROB, BENCH_OUTLIER_MEAN, BENCH_OUTLIER_VAR)
    };
    HmmSpec::new(
        vec![0.5, 0.5],
        vec![
            vec![1.0 - BENCH_RHO_NULL_TO_ALT, BENCH_RHO_NULL_TO_ALT],
            vec![BENCH_RHO_ALT_TO_NULL, 1.0 - BENCH_RHO_ALT_TO_NULL],
        ],
        vec![
            outliers(EmissionModel::gaussian(0.0, 1.0)),
            outliers(EmissionModel::gaussian(1.0, 1.0)),
        ],
    )
    .expect("benchmark model is valid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub length: usize,
    pub num_sequences: usize,
    /// Generating model; observations are drawn from each state's main
    /// Gaussian and replaced by an outlier draw with the emission's outlier probability.
    pub model: HmmSpec,
    pub seed: u64,
    /// Decode with the outlier components removed instead of the generating model.
    pub misspecified_emissions: bool,
}

impl SimConfig {
    pub fn benchmark(seed: u64) -> Self {
        SimConfig {
            length: BENCH_LENGTH,
            num_sequences: BENCH_SEQUENCES,
            model: benchmark_model(),
            seed,
            misspecified_emissions: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 {
            return Err(Error::Config(format!(
                "sequence length must be at least 2, got {}",
                self.length
            )));
        }
        if self.num_sequences == 0 {
            return Err(Error::Config("number of sequences must be positive".into()));
        }
        Ok(())
    }

    /// The model handed to forward-backward and Viterbi.
    pub fn decoding_model(&self) -> HmmSpec {
        if self.misspecified_emissions {
            self.model.without_outliers()
        } else {
            self.model.clone()
        }
    }
}

fn draw_categorical<R: Rng>(rng: &mut R, probs: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return i;
        }
    }
    // rounding left u above the cumulative sum: take the last state with mass
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Random stream for sequence `stream`.
pub fn sequence_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws one (truth, observations) pair. Deterministic in `(config.seed, stream)`.
pub fn generate_sequence(config: &SimConfig, stream: u64) -> (StatePath, Vec<f64>) {
    let mut rng = sequence_rng(config.seed, stream);
    let model = &config.model;
    let mut states = Vec::with_capacity(config.length);
    let mut obs = Vec::with_capacity(config.length);
    let mut state = draw_categorical(&mut rng, model.initial());
    for i in 0..config.length {
        if i > 0 {
            state = draw_categorical(&mut rng, &model.transitions()[state]);
        }
        let e = &model.emissions()[state];
        let main = Normal::new(e.main_mean, e.main_var.sqrt()).expect("validated variance");
        let mut y = main.sample(&mut rng);
        let u: f64 = rng.random();
        if u < e.outlier_prob {
            let outlier =
                Normal::new(e.outlier_mean, e.outlier_var.sqrt()).expect("validated variance");
            y = outlier.sample(&mut rng);
        }
        states.push(state);
        obs.push(y);
    }
    (StatePath::new(states), obs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderKind {
    Viterbi,
    Marginal,
    Markov,
}

impl DecoderKind {
    pub fn name(&self) -> &'static str {
        match self {
            DecoderKind::Viterbi => "viterbi",
            DecoderKind::Marginal => "marginal",
            DecoderKind::Markov => "markov",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub grid: Vec<CostSet>,
    pub decoders: Vec<DecoderKind>,
}

/// `points` values spaced evenly in log scale over `[min, max]`.
pub fn log_spaced(min: f64, max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![min];
    }
    let (lo, hi) = (min.log10(), max.log10());
    (0..points)
        .map(|k| {
            let e = lo + (hi - lo) * k as f64 / (points - 1) as f64;
            10f64.powf(e)
        })
        .collect()
}

impl SweepSpec {
    /// Two axes through `c_fpc = c_fpt = 1`: `c_fpc` varied with `c_fpt = 1`,
    /// then `c_fpt` varied with `c_fpc = 1`; `c_fnc = c_fnt = 1`, `c_dft = 1000`.
    pub fn benchmark_grid(points: usize) -> Self {
        let values = log_spaced(GRID_MIN, GRID_MAX, points);
        let fpc_axis = values
            .iter()
            .map(|&v| CostSet::new(v, 1.0, 1.0, 1.0, BENCH_DFT_COST));
        let fpt_axis = values
            .iter()
            .map(|&v| CostSet::new(1.0, 1.0, v, 1.0, BENCH_DFT_COST));
        SweepSpec {
            grid: fpc_axis.chain(fpt_axis).collect(),
            decoders: vec![
                DecoderKind::Viterbi,
                DecoderKind::Marginal,
                DecoderKind::Markov,
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("sweep grid is empty".into()));
        }
        if self.decoders.is_empty() {
            return Err(Error::Config("no decoders selected".into()));
        }
        for c in &self.grid {
            c.validate()?;
        }
        Ok(())
    }

    /// One entry per distinct (decoder, costs it actually uses), in output order:
    /// Viterbi (no costs), marginal per distinct `(c_fpc, c_fnc)`, Markov per
    /// distinct cost set.
    pub fn row_keys(&self) -> Vec<(DecoderKind, Option<CostSet>)> {
        let mut keys: Vec<(DecoderKind, Option<CostSet>)> = Vec::new();
        let mut push = |k: (DecoderKind, Option<CostSet>)| {
            if !keys.contains(&k) {
                keys.push(k);
            }
        };
        for kind in [
            DecoderKind::Viterbi,
            DecoderKind::Marginal,
            DecoderKind::Markov,
        ] {
            if !self.decoders.contains(&kind) {
                continue;
            }
            match kind {
                DecoderKind::Viterbi => push((kind, None)),
                DecoderKind::Marginal => {
                    for c in &self.grid {
                        push((kind, Some(marginal_costs(c.c_fpc, c.c_fnc))));
                    }
                }
                DecoderKind::Markov => {
                    for c in &self.grid {
                        push((kind, Some(*c)));
                    }
                }
            }
        }
        keys
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub decoder: DecoderKind,
    /// `None` for Viterbi, which has no cost parameters.
    pub costs: Option<CostSet>,
    /// Pooled over all sequences.
    pub report: ErrorReport,
    /// One report per sequence, in sequence order.
    pub per_sequence: Vec<ErrorReport>,
}

impl SweepRow {
    /// Standard error of a pooled rate `Σc/Σd` treating sequences as
    /// independent replicates (ratio-estimator variance).
    pub fn rate_standard_error(&self, select: impl Fn(&ErrorReport) -> RateCount) -> f64 {
        let k = self.per_sequence.len();
        if k < 2 {
            return 0.0;
        }
        let pooled = select(&self.report);
        let r = pooled.rate();
        let mean_d = pooled.denominator as f64 / k as f64;
        if mean_d == 0.0 {
            return 0.0;
        }
        let ss: f64 = self
            .per_sequence
            .iter()
            .map(|rep| {
                let rc = select(rep);
                let resid = rc.count as f64 - r * rc.denominator as f64;
                resid * resid
            })
            .sum();
        (ss / (k as f64 * (k - 1) as f64)).sqrt() / mean_d
    }

    pub fn csv_row(&self) -> String {
        let mut fields = vec![self.decoder.name().to_string()];
        match &self.costs {
            Some(c) => fields.extend(
                [c.c_fpc, c.c_fnc, c.c_fpt, c.c_fnt, c.c_dft, c.c_mc]
                    .iter()
                    .map(|v| v.to_string()),
            ),
            None => fields.extend(std::iter::repeat_n(String::new(), 6)),
        }
        fields.extend(self.report.csv_fields());
        fields.join(",")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_COST_COLUMNS: [&str; 7] = [
    "decoder", "c_fpc", "c_fnc", "c_fpt", "c_fnt", "c_dft", "c_mc",
];

impl SweepTable {
    pub fn csv_header() -> String {
        SWEEP_COST_COLUMNS
            .iter()
            .chain(REPORT_COLUMNS.iter())
            .copied()
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn to_csv(&self) -> String {
        let mut out = Self::csv_header();
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_row());
            out.push('\n');
        }
        out
    }

    pub fn rows_for(&self, decoder: DecoderKind) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.decoder == decoder)
    }

    /// Markov rows with `c_fpt == 1`, ordered by increasing `c_fpc`.
    pub fn markov_fpc_axis(&self) -> Vec<&SweepRow> {
        self.axis(DecoderKind::Markov, |c| c.c_fpt == 1.0, |c| c.c_fpc)
    }

    /// Markov rows with `c_fpc == 1`, ordered by increasing `c_fpt`.
    pub fn markov_fpt_axis(&self) -> Vec<&SweepRow> {
        self.axis(DecoderKind::Markov, |c| c.c_fpc == 1.0, |c| c.c_fpt)
    }

    /// Marginal rows ordered by increasing `c_fpc`.
    pub fn marginal_axis(&self) -> Vec<&SweepRow> {
        self.axis(DecoderKind::Marginal, |_| true, |c| c.c_fpc)
    }

    fn axis(
        &self,
        decoder: DecoderKind,
        keep: impl Fn(&CostSet) -> bool,
        key: impl Fn(&CostSet) -> f64,
    ) -> Vec<&SweepRow> {
        let mut rows: Vec<&SweepRow> = self
            .rows_for(decoder)
            .filter(|r| r.costs.as_ref().is_some_and(&keep))
            .collect();
        rows.sort_by(|a, b| {
            key(a.costs.as_ref().unwrap()).total_cmp(&key(b.costs.as_ref().unwrap()))
        });
        rows
    }
}

fn evaluate_sequence(
    sim: &SimConfig,
    decoding_model: &HmmSpec,
    keys: &[(DecoderKind, Option<CostSet>)],
    matrices: &[Option<LossMatrix>],
    stream: u64,
) -> Result<Vec<ErrorReport>> {
    let (truth, obs) = generate_sequence(sim, stream);
    let needs_posterior = keys.iter().any(|(k, _)| *k != DecoderKind::Viterbi);
    let posterior = if needs_posterior {
        Some(decoding_model.forward_backward(&obs)?)
    } else {
        None
    };
    let mut viterbi: Option<StatePath> = None;
    keys.iter()
        .zip(matrices)
        .map(|((kind, costs), matrix)| {
            let pred = match kind {
                DecoderKind::Viterbi => match &viterbi {
                    Some(p) => p.clone(),
                    None => {
                        let p = decoding_model.viterbi(&obs)?;
                        viterbi = Some(p.clone());
                        p
                    }
                },
                DecoderKind::Marginal => {
                    let c = costs.as_ref().expect("marginal rows carry costs");
                    decode_marginal(posterior.as_ref().unwrap(), c.c_fpc, c.c_fnc)?
                }
                DecoderKind::Markov => {
                    decode_markov_loss(
                        posterior.as_ref().unwrap(),
                        matrix.as_ref().expect("markov rows carry a matrix"),
                    )?
                    .path
                }
            };
            compare_paths(&truth, &pred)
        })
        .collect()
}

/// Runs the sweep on the current rayon pool; see [`run_sweep_with_threads`].
pub fn run_sweep(sim: &SimConfig, sweep: &SweepSpec) -> Result<SweepTable> {
    sim.validate()?;
    sweep.validate()?;
    let decoding_model = sim.decoding_model();
    let keys = sweep.row_keys();
    let m = decoding_model.num_states();
    let matrices = keys
        .iter()
        .map(|(kind, costs)| match (kind, costs) {
            (DecoderKind::Markov, Some(c)) => LossMatrix::multistate(c, m).map(Some),
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;

    let per_sequence: Vec<Vec<ErrorReport>> = (0..sim.num_sequences as u64)
        .into_par_iter()
        .map(|s| evaluate_sequence(sim, &decoding_model, &keys, &matrices, s))
        .collect::<Result<_>>()?;

    let rows = keys
        .into_iter()
        .enumerate()
        .map(|(r, (decoder, costs))| {
            let reports: Vec<ErrorReport> = per_sequence.iter().map(|seq| seq[r].clone()).collect();
            Ok(SweepRow {
                decoder,
                costs,
                report: aggregate_reports(&reports)?,
                per_sequence: reports,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SweepTable { rows })
}

/// Runs the sweep on a dedicated pool of `threads` workers (0 = rayon default).
/// The result does not depend on the thread count.
pub fn run_sweep_with_threads(
    sim: &SimConfig,
    sweep: &SweepSpec,
    threads: usize,
) -> Result<SweepTable> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
    pool.install(|| run_sweep(sim, sweep))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> SimConfig {
        SimConfig {
            length: 200,
            num_sequences: 6,
            ..SimConfig::benchmark(seed)
        }
    }

    #[test]
    fn generator_is_deterministic_per_stream() {
        let cfg = small(7);
        assert_eq!(generate_sequence(&cfg, 3), generate_sequence(&cfg, 3));
        assert_ne!(generate_sequence(&cfg, 3).1, generate_sequence(&cfg, 4).1);
        assert_ne!(
            generate_sequence(&cfg, 3).1,
            generate_sequence(&small(8), 3).1
        );
    }

    #[test]
    fn absorbing_chain_gives_constant_truth() {
        let model = HmmSpec::new(
            vec![0.5, 0.5],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![
                EmissionModel::gaussian(0.0, 1.0),
                EmissionModel::gaussian(1.0, 1.0),
            ],
        )
        .unwrap();
        let cfg = SimConfig { model, ..small(1) };
        for s in 0..10 {
            let (truth, _) = generate_sequence(&cfg, s);
            assert!(truth.iter().all(|&x| x == truth[0]));
        }
    }

    #[test]
    fn vanishing_variance_pins_observations_to_means() {
        let model = HmmSpec::new(
            vec![0.5, 0.5],
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            vec![
                EmissionModel::gaussian(0.0, 1e-12),
                EmissionModel::gaussian(1.0, 1e-12),
            ],
        )
        .unwrap();
        let cfg = SimConfig { model, ..small(2) };
        let (truth, obs) = generate_sequence(&cfg, 0);
        let mu = [0.0, 1.0];
        for (x, y) in truth.iter().zip(&obs) {
            assert!((y - mu[*x]).abs() < 1e-4);
        }
    }

    #[test]
    fn grid_shape() {
        let g = log_spaced(0.1, 10.0, 13);
        assert_eq!(g.len(), 13);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert_eq!(g[6], 1.0);
        assert!((g[12] - 10.0).abs() < 1e-12);
        let spec = SweepSpec::benchmark_grid(13);
        assert_eq!(spec.grid.len(), 26);
        let keys = spec.row_keys();
        // 1 viterbi + 13 marginal + 25 distinct markov
        assert_eq!(keys.len(), 1 + 13 + 25);
    }

    #[test]
    fn viterbi_only_sweep_has_one_row() {
        let spec = SweepSpec {
            decoders: vec![DecoderKind::Viterbi],
            ..SweepSpec::benchmark_grid(5)
        };
        let table = run_sweep(&small(3), &spec).unwrap();
        assert_eq!(table.rows.len(), 1);
        assert!(table.rows[0].costs.is_none());
    }

    #[test]
    fn sweep_csv_columns() {
        let table = run_sweep(&small(4), &SweepSpec::benchmark_grid(3)).unwrap();
        let csv = table.to_csv();
        let header_cols = SweepTable::csv_header().split(',').count();
        assert_eq!(header_cols, 22);
        for line in csv.lines() {
            assert_eq!(line.split(',').count(), header_cols);
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = small(5);
        let spec = SweepSpec::benchmark_grid(3);
        let a = run_sweep_with_threads(&cfg, &spec, 1).unwrap();
        let b = run_sweep_with_threads(&cfg, &spec, 4).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn rejects_empty_grid() {
        let spec = SweepSpec {
            grid: vec![],
            decoders: vec![DecoderKind::Markov],
        };
        assert!(run_sweep(&small(1), &spec).is_err());
    }
}

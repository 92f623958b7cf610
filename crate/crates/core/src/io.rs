//! Configuration schema, file formats and the command implementations behind
//! the `mlhmm` binary.
//!
//! Formats:
//!
//! - Config: JSON, unknown keys rejected. Relative paths resolve against the
//!   config file's directory.
//! - Observations: one real per line. Paths: one state index per line. Blank
//!   lines and lines starting with `#` are ignored.
//! - Pairwise marginals: tab-separated, optional header line starting with
//!   `i`, then one row per boundary: the 1-based boundary index followed by
//!   the `m²` probabilities in pair order `j·m + k`.
//! - Metric tables: CSV.
//!
//! Probabilities and rates are written with 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::decode::{decode_marginal, decode_markov_loss};
use crate::error::{Error, Result};
use crate::hmm::{HmmSpec, PosteriorMarginals, StatePath};
use crate::loss::{CostSet, LossMatrix};
use crate::metrics::{compare_paths, extract_segments, format_real, ErrorReport};
use crate::sim::{
    benchmark_model, generate_sequence, log_spaced, run_sweep_with_threads, DecoderKind, SimConfig,
    SweepSpec, SweepTable, BENCH_DFT_COST, BENCH_LENGTH, BENCH_SEQUENCES, DEFAULT_GRID_POINTS,
    GRID_MAX, GRID_MIN,
};

/// Row-sum and marginalisation tolerance for externally supplied pairwise marginals.
pub const EXTERNAL_TOL: f64 = 1e-6;

/// Rows whose sum is within this distance of 1 are used verbatim.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;

pub const DEFAULT_SEED: u64 = 1;

/// Loss block: `{"costs": {...}}` or `{"matrix": [...]}` (pred-pair-major,
/// pair index `j·m + k`).
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossConfig {
    Costs(CostSet),
    Matrix(Vec<f64>),
}

impl LossConfig {
    pub fn build(&self, num_states: usize) -> Result<LossMatrix> {
        match self {
            LossConfig::Costs(c) => LossMatrix::multistate(c, num_states),
            LossConfig::Matrix(entries) => LossMatrix::from_entries(num_states, entries.clone())
                .map_err(|e| Error::Config(e.to_string())),
        }
    }

    pub fn costs(&self) -> Option<&CostSet> {
        match self {
            LossConfig::Costs(c) => Some(c),
            LossConfig::Matrix(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarginalCostConfig {
    pub fpc: f64,
    pub fnc: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub length: Option<usize>,
    pub sequences: Option<usize>,
    #[serde(default)]
    pub misspecified_emissions: bool,
}

/// Either an explicit list of cost sets or the two-axis log grid.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub costs: Option<Vec<CostSet>>,
    pub points: Option<usize>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub fnc: Option<f64>,
    pub fnt: Option<f64>,
    pub dft: Option<f64>,
}

impl GridConfig {
    pub fn build(&self) -> Result<Vec<CostSet>> {
        if let Some(costs) = &self.costs {
            return Ok(costs.clone());
        }
        let points = self.points.unwrap_or(DEFAULT_GRID_POINTS);
        let (min, max) = (self.min.unwrap_or(GRID_MIN), self.max.unwrap_or(GRID_MAX));
        if points == 0 || !(min > 0.0 && max >= min && max.is_finite()) {
            return Err(Error::Config(format!(
                "invalid grid: {points} points over [{min}, {max}]"
            )));
        }
        let (fnc, fnt, dft) = (
            self.fnc.unwrap_or(1.0),
            self.fnt.unwrap_or(1.0),
            self.dft.unwrap_or(BENCH_DFT_COST),
        );
        let values = log_spaced(min, max, points);
        let fpc_axis = values.iter().map(|&v| CostSet::new(v, fnc, 1.0, fnt, dft));
        let fpt_axis = values.iter().map(|&v| CostSet::new(1.0, fnc, v, fnt, dft));
        let grid: Vec<CostSet> = fpc_axis.chain(fpt_axis).collect();
        for c in &grid {
            c.validate()?;
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: Option<HmmSpec>,
    pub loss: Option<LossConfig>,
    /// Costs for the marginal decoder column; defaults to the loss costs' `fpc`/`fnc`, else 1/1.
    pub marginal: Option<MarginalCostConfig>,
    pub observations: Option<PathBuf>,
    pub pairwise: Option<PathBuf>,
    pub truth: Option<PathBuf>,
    pub prediction: Option<PathBuf>,
    pub seed: Option<u64>,
    pub decoders: Option<Vec<DecoderKind>>,
    pub simulation: Option<SimulationConfig>,
    pub grid: Option<GridConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative paths inside it resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let mut cfg = Self::from_json(&text).map_err(|e| {
            Error::Config(format!(
                "{}: {}",
                path.display(),
                e.to_string().trim_start_matches("config error: ")
            ))
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [
            &mut cfg.observations,
            &mut cfg.pairwise,
            &mut cfg.truth,
            &mut cfg.prediction,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    fn marginal_costs(&self) -> (f64, f64) {
        if let Some(m) = self.marginal {
            return (m.fpc, m.fnc);
        }
        match self.loss.as_ref().and_then(|l| l.costs()) {
            Some(c) => (c.c_fpc, c.c_fnc),
            None => (1.0, 1.0),
        }
    }

    fn loss_matrix(&self, num_states: usize) -> Result<LossMatrix> {
        match &self.loss {
            Some(l) => l.build(num_states),
            None => LossMatrix::multistate(&CostSet::unit(), num_states),
        }
    }
}

/// Command-line overrides shared by all commands.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommandOptions {
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub sequences: Option<usize>,
    pub length: Option<usize>,
    pub threads: Option<usize>,
    pub misspecified_emissions: bool,
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn malformed(path: &Path, line: usize, what: &str) -> Error {
    Error::Input(format!("{}:{line}: {what}", path.display()))
}

pub fn parse_observations(path: &Path, text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let v: f64 = l.parse().map_err(|_| {
            malformed(
                path,
                line,
                &format!("expected one real number, found {l:?}"),
            )
        })?;
        if !v.is_finite() {
            return Err(malformed(path, line, "observation is not finite"));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::Input(format!("{}: no observations", path.display())));
    }
    Ok(out)
}

pub fn read_observations(path: &Path) -> Result<Vec<f64>> {
    parse_observations(path, &read_text(path)?)
}

pub fn parse_path(path: &Path, text: &str) -> Result<StatePath> {
    let states = data_lines(text)
        .map(|(line, l)| {
            l.parse::<usize>()
                .map_err(|_| malformed(path, line, &format!("expected a state index, found {l:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    if states.is_empty() {
        return Err(Error::Input(format!("{}: empty path", path.display())));
    }
    Ok(StatePath::new(states))
}

pub fn read_path(path: &Path) -> Result<StatePath> {
    parse_path(path, &read_text(path)?)
}

pub fn format_path(path: &StatePath) -> String {
    path.iter().map(|s| format!("{s}\n")).collect()
}

/// Pairwise marginals read from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExternalMarginals {
    pub marginals: PosteriorMarginals,
    /// Rows whose sum deviated from 1 (within tolerance) and were renormalised.
    pub renormalized_rows: usize,
}

fn perfect_square_root(v: usize) -> Option<usize> {
    let r = (v as f64).sqrt().round() as usize;
    (r * r == v).then_some(r)
}

pub fn pairwise_header(num_states: usize) -> String {
    let mut cols = vec!["i".to_string()];
    for j in 0..num_states {
        for k in 0..num_states {
            cols.push(format!("p_{j}_{k}"));
        }
    }
    cols.join("\t")
}

pub fn format_pairwise(marginals: &PosteriorMarginals) -> String {
    let mut out = pairwise_header(marginals.num_states());
    out.push('\n');
    for b in 0..marginals.num_boundaries() {
        out.push_str(&(b + 1).to_string());
        for p in marginals.pairwise(b) {
            out.push('\t');
            out.push_str(&format_real(*p));
        }
        out.push('\n');
    }
    out
}

pub fn write_pairwise(path: &Path, marginals: &PosteriorMarginals) -> Result<()> {
    write_text(path, &format_pairwise(marginals))
}

/// Parses and checks a pairwise-marginals table.
///
/// Malformed rows are input errors. Rows summing to more than [`EXTERNAL_TOL`]
/// away from 1, and adjacent boundaries whose shared position marginals
/// disagree by more than [`EXTERNAL_TOL`], are consistency errors naming the
/// worst boundary.
pub fn parse_pairwise(path: &Path, text: &str) -> Result<ExternalMarginals> {
    let mut width = None;
    let mut values = Vec::new();
    let mut renormalized_rows = 0;
    let mut worst_row: Option<(f64, usize)> = None;
    let mut expected_index = 1usize;
    for (line, l) in data_lines(text) {
        let fields: Vec<&str> = l.split('\t').map(str::trim).collect();
        if expected_index == 1 && fields[0] == "i" {
            continue;
        }
        let w = *width.get_or_insert(fields.len());
        if fields.len() != w {
            return Err(malformed(
                path,
                line,
                &format!("expected {w} columns, found {}", fields.len()),
            ));
        }
        let m = perfect_square_root(w - 1)
            .filter(|&m| m >= 2)
            .ok_or_else(|| {
                malformed(
                    path,
                    line,
                    &format!("{} probability columns is not m² for m ≥ 2", w - 1),
                )
            })?;
        let index: usize = fields[0]
            .parse()
            .map_err(|_| malformed(path, line, &format!("bad boundary index {:?}", fields[0])))?;
        if index != expected_index {
            return Err(malformed(
                path,
                line,
                &format!("expected boundary {expected_index}, found {index}"),
            ));
        }
        let mut row = Vec::with_capacity(m * m);
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| malformed(path, line, &format!("bad probability {f:?}")))?;
            if !(v.is_finite() && v >= 0.0) {
                return Err(malformed(
                    path,
                    line,
                    &format!("probability {v} is not finite and non-negative"),
                ));
            }
            row.push(v);
        }
        let sum: f64 = row.iter().sum();
        let dev = (sum - 1.0).abs();
        if dev > EXTERNAL_TOL {
            if worst_row.is_none_or(|(d, _)| dev > d) {
                worst_row = Some((dev, index));
            }
        } else if dev > RENORMALIZE_THRESHOLD {
            row.iter_mut().for_each(|v| *v /= sum);
            renormalized_rows += 1;
        }
        values.extend(row);
        expected_index += 1;
    }
    if let Some((dev, b)) = worst_row {
        return Err(Error::Consistency(format!(
            "{}: boundary {b} sums to 1 {:+.3e} (tolerance {EXTERNAL_TOL:e})",
            path.display(),
            dev
        )));
    }
    let Some(w) = width else {
        return Err(Error::Input(format!(
            "{}: no pairwise rows (need at least one boundary)",
            path.display()
        )));
    };
    let m = perfect_square_root(w - 1).expect("checked per row");
    let marginals = PosteriorMarginals::from_pairwise(m, values)?;

    // the column sums of boundary b and the row sums of boundary b+1 both give position b+2
    let mut worst = (0.0f64, 0usize);
    for b in 0..marginals.num_boundaries().saturating_sub(1) {
        let (left, right) = (marginals.pairwise(b), marginals.pairwise(b + 1));
        for s in 0..m {
            let col: f64 = (0..m).map(|j| left[j * m + s]).sum();
            let row: f64 = right[s * m..(s + 1) * m].iter().sum();
            let err = (col - row).abs();
            if err > worst.0 {
                worst = (err, b + 1);
            }
        }
    }
    if worst.0 > EXTERNAL_TOL {
        return Err(Error::Consistency(format!(
            "{}: boundaries {} and {} disagree on the shared position marginal by {:.3e} (tolerance {EXTERNAL_TOL:e})",
            path.display(),
            worst.1,
            worst.1 + 1,
            worst.0
        )));
    }
    Ok(ExternalMarginals {
        marginals,
        renormalized_rows,
    })
}

pub fn read_pairwise(path: &Path) -> Result<ExternalMarginals> {
    parse_pairwise(path, &read_text(path)?)
}

/// Decoded paths and the files they were written to.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutput {
    pub viterbi: Option<StatePath>,
    pub marginal: StatePath,
    pub markov: StatePath,
    pub expected_loss: f64,
    pub positions_file: PathBuf,
    pub segments_file: PathBuf,
    pub warnings: Vec<String>,
}

fn require<'a, T>(value: &'a Option<T>, what: &str) -> Result<&'a T> {
    value
        .as_ref()
        .ok_or_else(|| Error::Config(format!("config is missing \"{what}\"")))
}

fn segments_tsv(path: &StatePath, marginals: &PosteriorMarginals) -> String {
    let mut out = String::from("start\tend\tstate\tmean_posterior\n");
    for seg in extract_segments(path) {
        let mean = (seg.start - 1..seg.end - 1)
            .map(|i| marginals.unary(i)[seg.state])
            .sum::<f64>()
            / seg.len() as f64;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            seg.start,
            seg.end,
            seg.state,
            format_real(mean)
        ));
    }
    out
}

fn positions_tsv(
    marginals: &PosteriorMarginals,
    observations: Option<&[f64]>,
    viterbi: Option<&StatePath>,
    marginal: &StatePath,
    markov: &StatePath,
) -> String {
    let mut cols = vec!["position".to_string()];
    if observations.is_some() {
        cols.push("observation".into());
    }
    if viterbi.is_some() {
        cols.push("viterbi_state".into());
    }
    cols.push("marginal_state".into());
    cols.push("markov_state".into());
    cols.extend((0..marginals.num_states()).map(|s| format!("post_{s}")));
    let mut out = cols.join("\t");
    out.push('\n');
    for i in 0..marginals.n() {
        let mut row = vec![(i + 1).to_string()];
        if let Some(obs) = observations {
            row.push(format_real(obs[i]));
        }
        if let Some(v) = viterbi {
            row.push(v[i].to_string());
        }
        row.push(marginal[i].to_string());
        row.push(markov[i].to_string());
        row.extend(marginals.unary(i).iter().map(|p| format_real(*p)));
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

fn cost_warnings(cfg: &RunConfig) -> Vec<String> {
    cfg.loss
        .as_ref()
        .and_then(|l| l.costs())
        .and_then(|c| c.dft_warning())
        .into_iter()
        .collect()
}

/// Decodes an observation sequence with Viterbi, marginal and Markov-loss
/// decoders; writes `positions.tsv` and `segments.tsv` (segments of the
/// Markov-loss path) into `opts.out`.
pub fn cmd_decode(
    cfg: &RunConfig,
    opts: &CommandOptions,
    observations: Option<&Path>,
) -> Result<DecodeOutput> {
    let model = require(&cfg.model, "model")?;
    let obs_path = match observations {
        Some(p) => p.to_path_buf(),
        None => require(&cfg.observations, "observations")?.clone(),
    };
    let obs = read_observations(&obs_path)?;
    let loss = cfg.loss_matrix(model.num_states())?;
    let (fpc, fnc) = cfg.marginal_costs();

    let posterior = model.forward_backward(&obs)?;
    let viterbi = model.viterbi(&obs)?;
    let marginal = decode_marginal(&posterior, fpc, fnc)?;
    let markov = decode_markov_loss(&posterior, &loss)?;

    let positions_file = opts.out.join("positions.tsv");
    let segments_file = opts.out.join("segments.tsv");
    write_text(
        &positions_file,
        &positions_tsv(
            &posterior,
            Some(&obs),
            Some(&viterbi),
            &marginal,
            &markov.path,
        ),
    )?;
    write_text(&segments_file, &segments_tsv(&markov.path, &posterior))?;
    Ok(DecodeOutput {
        viterbi: Some(viterbi),
        marginal,
        markov: markov.path,
        expected_loss: markov.expected_loss,
        positions_file,
        segments_file,
        warnings: cost_warnings(cfg),
    })
}

/// Decodes externally supplied pairwise marginals (any model able to produce
/// `π(x_i, x_{i+1} | y)`). Writes the same files as [`cmd_decode`] without the
/// observation and Viterbi columns.
pub fn cmd_decode_marginals(
    cfg: &RunConfig,
    opts: &CommandOptions,
    pairwise: Option<&Path>,
) -> Result<DecodeOutput> {
    let pw_path = match pairwise {
        Some(p) => p.to_path_buf(),
        None => require(&cfg.pairwise, "pairwise")?.clone(),
    };
    let ext = read_pairwise(&pw_path)?;
    let posterior = ext.marginals;
    let loss = cfg.loss_matrix(posterior.num_states())?;
    let (fpc, fnc) = cfg.marginal_costs();
    let marginal = decode_marginal(&posterior, fpc, fnc)?;
    let markov = decode_markov_loss(&posterior, &loss)?;

    let positions_file = opts.out.join("positions.tsv");
    let segments_file = opts.out.join("segments.tsv");
    write_text(
        &positions_file,
        &positions_tsv(&posterior, None, None, &marginal, &markov.path),
    )?;
    write_text(&segments_file, &segments_tsv(&markov.path, &posterior))?;
    let mut warnings = cost_warnings(cfg);
    if ext.renormalized_rows > 0 {
        warnings.push(format!(
            "{} pairwise rows renormalised",
            ext.renormalized_rows
        ));
    }
    Ok(DecodeOutput {
        viterbi: None,
        marginal,
        markov: markov.path,
        expected_loss: markov.expected_loss,
        positions_file,
        segments_file,
        warnings,
    })
}

fn sim_config(cfg: &RunConfig, opts: &CommandOptions) -> Result<SimConfig> {
    let sim = cfg.simulation.clone().unwrap_or_default();
    let config = SimConfig {
        length: opts.length.or(sim.length).unwrap_or(BENCH_LENGTH),
        num_sequences: opts.sequences.or(sim.sequences).unwrap_or(BENCH_SEQUENCES),
        model: cfg.model.clone().unwrap_or_else(benchmark_model),
        seed: opts.seed.or(cfg.seed).unwrap_or(DEFAULT_SEED),
        misspecified_emissions: opts.misspecified_emissions || sim.misspecified_emissions,
    };
    config.validate()?;
    Ok(config)
}

/// Writes `simulated.tsv` (sequence, position, state, observation) and returns its path.
pub fn cmd_simulate(cfg: &RunConfig, opts: &CommandOptions) -> Result<PathBuf> {
    let sim = sim_config(cfg, opts)?;
    let mut out = String::from("sequence\tposition\tstate\tobservation\n");
    for s in 0..sim.num_sequences {
        let (truth, obs) = generate_sequence(&sim, s as u64);
        for (i, (x, y)) in truth.iter().zip(&obs).enumerate() {
            out.push_str(&format!("{}\t{}\t{x}\t{}\n", s + 1, i + 1, format_real(*y)));
        }
    }
    let path = opts.out.join("simulated.tsv");
    write_text(&path, &out)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub table: SweepTable,
    pub csv_file: PathBuf,
    pub fpc_fnc_file: PathBuf,
    pub fpc_fpt_file: PathBuf,
}

fn plot_tsv(table: &SweepTable, y: &str, select: impl Fn(&ErrorReport) -> f64) -> String {
    let mut out = format!("decoder\tc_fpc\tc_fpt\tfpc_rate\t{y}\n");
    for row in &table.rows {
        let (fpc, fpt) = match &row.costs {
            Some(c) => (c.c_fpc.to_string(), c.c_fpt.to_string()),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{}\t{fpc}\t{fpt}\t{}\t{}\n",
            row.decoder.name(),
            format_real(row.report.fpc.rate()),
            format_real(select(&row.report))
        ));
    }
    out
}

/// Runs the simulation sweep; writes `sweep.csv` plus the plot-data files
/// `fpc_vs_fnc.tsv` and `fpc_vs_fpt.tsv`.
pub fn cmd_sweep(cfg: &RunConfig, opts: &CommandOptions) -> Result<SweepOutput> {
    let sim = sim_config(cfg, opts)?;
    let grid = match &cfg.grid {
        Some(g) => g.build()?,
        None => GridConfig::default().build()?,
    };
    let decoders = cfg.decoders.clone().unwrap_or_else(|| {
        vec![
            DecoderKind::Viterbi,
            DecoderKind::Marginal,
            DecoderKind::Markov,
        ]
    });
    let spec = SweepSpec { grid, decoders };
    let table = run_sweep_with_threads(&sim, &spec, opts.threads.unwrap_or(0))?;

    let csv_file = opts.out.join("sweep.csv");
    let fpc_fnc_file = opts.out.join("fpc_vs_fnc.tsv");
    let fpc_fpt_file = opts.out.join("fpc_vs_fpt.tsv");
    write_text(&csv_file, &table.to_csv())?;
    write_text(
        &fpc_fnc_file,
        &plot_tsv(&table, "fnc_rate", |r| r.fnc.rate()),
    )?;
    write_text(
        &fpc_fpt_file,
        &plot_tsv(&table, "fpt_rate", |r| r.fpt.rate()),
    )?;
    Ok(SweepOutput {
        table,
        csv_file,
        fpc_fnc_file,
        fpc_fpt_file,
    })
}

/// Fixed-width summary of a sweep, one line per row.
pub fn sweep_summary(table: &SweepTable) -> String {
    let mut out = format!(
        "{:<9} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9}\n",
        "decoder", "c_fpc", "c_fpt", "%FPC", "%FNC", "%FPT", "%FNT", "segments"
    );
    for row in &table.rows {
        let (fpc, fpt) = match &row.costs {
            Some(c) => (format!("{:.3}", c.c_fpc), format!("{:.3}", c.c_fpt)),
            None => ("-".into(), "-".into()),
        };
        let r = &row.report;
        out.push_str(&format!(
            "{:<9} {:>8} {:>8} {:>8.3} {:>8.3} {:>8.3} {:>8.3} {:>9}\n",
            row.decoder.name(),
            fpc,
            fpt,
            100.0 * r.fpc.rate(),
            100.0 * r.fnc.rate(),
            100.0 * r.fpt.rate(),
            100.0 * r.fnt.rate(),
            r.pred_segments
        ));
    }
    out
}

/// Compares two path files and writes `compare.csv` (header plus one report row).
pub fn cmd_compare(truth: &Path, prediction: &Path, opts: &CommandOptions) -> Result<ErrorReport> {
    let t = read_path(truth)?;
    let p = read_path(prediction)?;
    let report = compare_paths(&t, &p)?;
    let text = format!("{}\n{}\n", ErrorReport::csv_header(), report.csv_row());
    write_text(&opts.out.join("compare.csv"), &text)?;
    Ok(report)
}

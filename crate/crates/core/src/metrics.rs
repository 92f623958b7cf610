//! Call and transition error counts between a true and a predicted path.
//!
//! Per position: a false positive call (FPC) is a non-null call on a null
//! truth, a false negative call (FNC) a null call on a non-null truth, and a
//! miscall a wrong non-null state. Per boundary `(x_i, x_{i+1})`: a false
//! positive transition (FPT) is a predicted switch where the truth stays, a
//! false negative transition (FNT) a true switch the prediction misses, and a
//! doubly false transition (DFT) a boundary where both switch but the ordered
//! pairs differ (in the binary case, opposite directions).
//!
//! Rates use these denominators:
//!
//! | error | denominator                          |
//! |-------|--------------------------------------|
//! | FPC   | truth-null positions                 |
//! | FNC   | truth-non-null positions             |
//! | FPT   | boundaries where the truth stays     |
//! | FNT   | boundaries where the truth switches  |
//! | DFT   | boundaries where the truth switches  |
//!
//! Call errors are counted at every position including the first.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::hmm::StatePath;

/// An error count with the number of opportunities it is normalised by.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RateCount {
    pub count: u64,
    pub denominator: u64,
}

impl RateCount {
    /// `count / denominator`, or 0 when there were no opportunities.
    pub fn rate(&self) -> f64 {
        if self.denominator == 0 {
            0.0
        } else {
            self.count as f64 / self.denominator as f64
        }
    }

    fn add(&mut self, other: &RateCount) {
        self.count += other.count;
        self.denominator += other.denominator;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorReport {
    pub n: u64,
    pub boundaries: u64,
    pub fpc: RateCount,
    pub fnc: RateCount,
    pub fpt: RateCount,
    pub fnt: RateCount,
    pub dft: RateCount,
    pub miscall: u64,
    /// Non-null segments in the truth.
    pub truth_segments: u64,
    /// Non-null segments in the prediction.
    pub pred_segments: u64,
}

/// Column names of [`ErrorReport::csv_fields`], in order.
pub const REPORT_COLUMNS: [&str; 15] = [
    "n",
    "boundaries",
    "fpc_count",
    "fpc_rate",
    "fnc_count",
    "fnc_rate",
    "fpt_count",
    "fpt_rate",
    "fnt_count",
    "fnt_rate",
    "dft_count",
    "dft_rate",
    "miscall_count",
    "truth_segments",
    "pred_segments",
];

/// Formats a real with 17 significant digits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

impl ErrorReport {
    pub fn call_errors(&self) -> u64 {
        self.fpc.count + self.fnc.count + self.miscall
    }

    pub fn transition_errors(&self) -> u64 {
        self.fpt.count + self.fnt.count + self.dft.count
    }

    pub fn csv_header() -> String {
        REPORT_COLUMNS.join(",")
    }

    /// Values in [`REPORT_COLUMNS`] order.
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![self.n.to_string(), self.boundaries.to_string()];
        for rc in [&self.fpc, &self.fnc, &self.fpt, &self.fnt, &self.dft] {
            out.push(rc.count.to_string());
            out.push(format_real(rc.rate()));
        }
        out.push(self.miscall.to_string());
        out.push(self.truth_segments.to_string());
        out.push(self.pred_segments.to_string());
        out
    }

    pub fn csv_row(&self) -> String {
        self.csv_fields().join(",")
    }

    /// Human-readable one-line summary.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for (name, rc) in [
            ("FPC", &self.fpc),
            ("FNC", &self.fnc),
            ("FPT", &self.fpt),
            ("FNT", &self.fnt),
            ("DFT", &self.dft),
        ] {
            let _ = write!(
                s,
                "{name} {}/{} ({:.3}%)  ",
                rc.count,
                rc.denominator,
                100.0 * rc.rate()
            );
        }
        let _ = write!(
            s,
            "segments {} (truth {})",
            self.pred_segments, self.truth_segments
        );
        s
    }
}

fn non_null_segments(path: &[usize]) -> u64 {
    let mut count = 0;
    let mut prev = None;
    for &s in path {
        if s != 0 && prev != Some(s) {
            count += 1;
        }
        prev = Some(s);
    }
    count
}

pub fn compare_paths(truth: &StatePath, pred: &StatePath) -> Result<ErrorReport> {
    if truth.is_empty() {
        return Err(Error::input("cannot compare empty paths"));
    }
    if truth.len() != pred.len() {
        return Err(Error::input(format!(
            "truth has {} positions but prediction has {}",
            truth.len(),
            pred.len()
        )));
    }
    let (t, p) = (truth.as_slice(), pred.as_slice());
    let mut r = ErrorReport {
        n: t.len() as u64,
        boundaries: t.len() as u64 - 1,
        truth_segments: non_null_segments(t),
        pred_segments: non_null_segments(p),
        ..Default::default()
    };

    for (&ts, &ps) in t.iter().zip(p) {
        if ts == 0 {
            r.fpc.denominator += 1;
            if ps != 0 {
                r.fpc.count += 1;
            }
        } else {
            r.fnc.denominator += 1;
            if ps == 0 {
                r.fnc.count += 1;
            } else if ps != ts {
                r.miscall += 1;
            }
        }
    }

    for (tw, pw) in t.windows(2).zip(p.windows(2)) {
        let truth_moves = tw[0] != tw[1];
        let pred_moves = pw[0] != pw[1];
        if truth_moves {
            r.fnt.denominator += 1;
            r.dft.denominator += 1;
        } else {
            r.fpt.denominator += 1;
        }
        match (pred_moves, truth_moves) {
            (true, false) => r.fpt.count += 1,
            (false, true) => r.fnt.count += 1,
            (true, true) if tw != pw => r.dft.count += 1,
            _ => {}
        }
    }
    Ok(r)
}

/// A maximal run of one state, as 1-based half-open positions `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub state: usize,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }
}

pub fn extract_segments(path: &StatePath) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    for (i, &s) in path.iter().enumerate() {
        match out.last_mut() {
            Some(seg) if seg.state == s => seg.end = i + 2,
            _ => out.push(Segment {
                start: i + 1,
                end: i + 2,
                state: s,
            }),
        }
    }
    out
}

/// Pools counts and denominators (micro-average).
pub fn aggregate_reports(reports: &[ErrorReport]) -> Result<ErrorReport> {
    if reports.is_empty() {
        return Err(Error::input("no reports to aggregate"));
    }
    let mut acc = ErrorReport::default();
    for r in reports {
        acc.n += r.n;
        acc.boundaries += r.boundaries;
        acc.fpc.add(&r.fpc);
        acc.fnc.add(&r.fnc);
        acc.fpt.add(&r.fpt);
        acc.fnt.add(&r.fnt);
        acc.dft.add(&r.dft);
        acc.miscall += r.miscall;
        acc.truth_segments += r.truth_segments;
        acc.pred_segments += r.pred_segments;
    }
    Ok(acc)
}

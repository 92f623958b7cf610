//! Minimum-expected-loss decoding of hidden state sequences.
//!
//! Given posterior pairwise marginals `π(x_i, x_{i+1} | y)` for a sequence, the
//! decoders in this crate report the state path that minimises the posterior
//! expected value of a pairwise ("Markov") loss. The loss charges false
//! positive/negative calls together with false positive, false negative and
//! doubly false transitions, which lets the caller trade segment-level error
//! types against each other. Viterbi (global 0-1 loss) and per-position
//! marginal decoding are provided for comparison.
//!
//! Modules:
//!
//! - [`hmm`]: Gaussian-mixture HMMs, scaled forward-backward, Viterbi.
//! - [`loss`]: cost sets, pair-loss matrices, expected loss.
//! - [`decode`]: the Markov-loss dynamic program, marginal decoder, brute-force oracle.
//! - [`metrics`]: call/transition error taxonomy and segment extraction.
//! - [`sim`]: synthetic data generator and loss-sweep harness.
//! - [`io`]: configuration schema, TSV/CSV formats and the command implementations
//!   behind the `mlhmm` binary.
//!
//! ```
//! use markov_loss::hmm::{EmissionModel, HmmSpec};
//! use markov_loss::loss::{CostSet, LossMatrix};
//! use markov_loss::decode::decode_markov_loss;
//!
//! let model = HmmSpec::new(
//!     vec![0.5, 0.5],
//!     vec![vec![0.99, 0.01], vec![0.05, 0.95]],
//!     vec![EmissionModel::gaussian(0.0, 1.0), EmissionModel::gaussian(1.0, 1.0)],
//! )
//! .unwrap();
//! let obs = [0.1, -0.3, 1.2, 0.9, 1.4, 0.2];
//! let post = model.forward_backward(&obs).unwrap();
//! let loss = LossMatrix::binary(&CostSet::unit()).unwrap();
//! let decoded = decode_markov_loss(&post, &loss).unwrap();
//! assert_eq!(decoded.path.len(), obs.len());
//! ```

#![allow(clippy::needless_range_loop)]

pub mod decode;
pub mod error;
pub mod hmm;
pub mod io;
pub mod loss;
pub mod metrics;
pub mod sim;

pub use error::{Error, Result};

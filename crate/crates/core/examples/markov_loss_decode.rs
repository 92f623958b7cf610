//! Compares Viterbi, marginal and Markov-loss decoding on one simulated
//! sequence, and checks the dynamic program against exhaustive search.
//!
//! cargo run --release --example markov_loss_decode

use markov_loss::decode::{brute_force_mel, decode_marginal, decode_markov_loss};
use markov_loss::loss::{CostSet, LossMatrix};
use markov_loss::metrics::compare_paths;
use markov_loss::sim::{generate_sequence, SimConfig};

fn main() -> markov_loss::Result<()> {
    let sim = SimConfig {
        length: 2000,
        ..SimConfig::benchmark(3)
    };
    let (truth, obs) = generate_sequence(&sim, 0);
    let post = sim.model.forward_backward(&obs)?;

    let viterbi = sim.model.viterbi(&obs)?;
    let marginal = decode_marginal(&post, 1.0, 1.0)?;
    for (name, path) in [("viterbi", &viterbi), ("marginal", &marginal)] {
        let r = compare_paths(&truth, path)?;
        println!("{name:<22} {}", r.summary());
    }
    for fpt in [0.1, 1.0, 10.0] {
        let loss = LossMatrix::binary(&CostSet::new(1.0, 1.0, fpt, 1.0, 1000.0))?;
        let mel = decode_markov_loss(&post, &loss)?;
        let r = compare_paths(&truth, &mel.path)?;
        println!("{:<22} {}", format!("markov c_fpt={fpt}"), r.summary());
    }

    // exhaustive check on a short prefix
    let short = sim.model.forward_backward(&obs[..12])?;
    let loss = LossMatrix::binary(&CostSet::new(2.0, 1.0, 0.5, 1.0, 1000.0))?;
    let dp = decode_markov_loss(&short, &loss)?;
    let oracle = brute_force_mel(&short, &loss)?;
    println!(
        "\nn=12: dynamic program {:.12} vs exhaustive {:.12}, same path: {}",
        dp.expected_loss,
        oracle.expected_loss,
        dp.path == oracle.path
    );
    Ok(())
}

//! Posterior marginals and Viterbi on a short two-state sequence.
//!
//! cargo run --example forward_backward

use markov_loss::sim::benchmark_model;

fn main() -> markov_loss::Result<()> {
    let model = benchmark_model();
    let obs = [0.1, -0.4, 1.3, 0.9, 1.6, 1.1, 0.2, -0.3, 4.8, 0.0];

    let post = model.forward_backward(&obs)?;
    let viterbi = model.viterbi(&obs)?;
    println!("log evidence {:.4}", post.log_evidence());
    println!("pos   y      P(x=1)   viterbi");
    for (i, y) in obs.iter().enumerate() {
        println!(
            "{:>3} {:>6.2} {:>9.4} {:>8}",
            i + 1,
            y,
            post.unary(i)[1],
            viterbi[i]
        );
    }

    // pairwise marginals marginalise to the unary ones
    let (err, _) = post.max_inconsistency();
    println!("max marginalisation error {err:.1e}");
    Ok(())
}

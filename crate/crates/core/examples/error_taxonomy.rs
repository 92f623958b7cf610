//! Call and transition error counts for a prediction against the truth.
//!
//! cargo run --example error_taxonomy

use markov_loss::hmm::StatePath;
use markov_loss::metrics::{compare_paths, extract_segments};

fn main() -> markov_loss::Result<()> {
    let truth = StatePath::new(vec![0, 0, 1, 1, 1, 0, 0, 0, 1, 1]);
    let pred = StatePath::new(vec![0, 1, 1, 1, 0, 0, 1, 0, 0, 1]);
    println!("truth {truth}\npred  {pred}\n");

    let r = compare_paths(&truth, &pred)?;
    println!(
        "false positive calls      {}/{}",
        r.fpc.count, r.fpc.denominator
    );
    println!(
        "false negative calls      {}/{}",
        r.fnc.count, r.fnc.denominator
    );
    println!(
        "false positive transitions {}/{}",
        r.fpt.count, r.fpt.denominator
    );
    println!(
        "false negative transitions {}/{}",
        r.fnt.count, r.fnt.denominator
    );
    println!(
        "different transitions     {}/{}",
        r.dft.count, r.dft.denominator
    );

    println!("\npredicted segments:");
    for s in extract_segments(&pred) {
        println!("  [{}, {}) state {}", s.start, s.end, s.state);
    }
    Ok(())
}

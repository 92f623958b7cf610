//! A small cost sweep on simulated data, showing how the transition cost
//! trades false positive transitions against call errors.
//!
//! cargo run --release --example simulation_sweep

use markov_loss::io::sweep_summary;
use markov_loss::sim::{run_sweep, SimConfig, SweepSpec};

fn main() -> markov_loss::Result<()> {
    let sim = SimConfig {
        num_sequences: 50,
        length: 1000,
        ..SimConfig::benchmark(7)
    };
    let table = run_sweep(&sim, &SweepSpec::benchmark_grid(5))?;
    print!("{}", sweep_summary(&table));

    let fpt_axis = table.markov_fpt_axis();
    let (lo, hi) = (fpt_axis.first().unwrap(), fpt_axis.last().unwrap());
    println!(
        "\nmarkov %FPT: {:.3} at c_fpt={} vs {:.3} at c_fpt={}",
        100.0 * lo.report.fpt.rate(),
        lo.costs.unwrap().c_fpt,
        100.0 * hi.report.fpt.rate(),
        hi.costs.unwrap().c_fpt
    );
    Ok(())
}

//! Decodes pairwise marginals written to disk by some other model.
//!
//! cargo run --example external_marginals

use markov_loss::decode::decode_markov_loss;
use markov_loss::io::{read_pairwise, write_pairwise};
use markov_loss::loss::{CostSet, LossMatrix};
use markov_loss::sim::benchmark_model;

fn main() -> markov_loss::Result<()> {
    let dir = std::env::temp_dir().join("markov-loss-example");
    std::fs::create_dir_all(&dir).map_err(|e| markov_loss::Error::Input(e.to_string()))?;
    let file = dir.join("pairwise.tsv");

    let obs = [0.2, 0.1, 1.4, 0.8, 1.2, 0.3, -0.1, 0.0];
    let post = benchmark_model().forward_backward(&obs)?;
    write_pairwise(&file, &post)?;
    println!("{}", std::fs::read_to_string(&file).unwrap_or_default());

    let external = read_pairwise(&file)?;
    let loss = LossMatrix::binary(&CostSet::new(1.0, 1.0, 0.5, 1.0, 1000.0))?;
    let from_file = decode_markov_loss(&external.marginals, &loss)?;
    let in_memory = decode_markov_loss(&post, &loss)?;
    println!("decoded from file: {}", from_file.path);
    println!("identical to in-memory decode: {}", from_file == in_memory);
    Ok(())
}

//! Builds the binary Markov loss matrix and prints it as a table.
//!
//! cargo run --example loss_matrix

use markov_loss::loss::{CostSet, LossMatrix};

fn main() -> markov_loss::Result<()> {
    let costs = CostSet::new(1.0, 2.0, 4.0, 8.0, 16.0);
    let loss = LossMatrix::binary(&costs)?;
    let pairs = [(0, 0), (0, 1), (1, 0), (1, 1)];

    println!("fpc=1 fnc=2 fpt=4 fnt=8 dft=16\n");
    print!("pred \\ truth");
    for t in pairs {
        print!("{:>8}", format!("{}{}", t.0, t.1));
    }
    println!();
    for p in pairs {
        print!("{:>12}", format!("{}{}", p.0, p.1));
        for t in pairs {
            print!("{:>8}", loss.get(p, t));
        }
        println!();
    }

    // three states: miscalls between the two non-null states get their own cost
    let three = LossMatrix::multistate(&costs.with_mc(0.5), 3)?;
    println!(
        "\npred (1,1) vs truth (2,2) with three states: {}",
        three.get((1, 1), (2, 2))
    );
    Ok(())
}

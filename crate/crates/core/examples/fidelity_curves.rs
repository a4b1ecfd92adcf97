//! Fidelity of a large cat state for several loop efficiencies and ratios gamma1/gamma2.
//!
//! cargo run --release --example fidelity_curves

use cavity_feedback::experiments::{fig4_datasets, Fig4Options};

fn main() -> cavity_feedback::Result<()> {
    let data = fig4_datasets(&Fig4Options::default())?;
    let t = &data[0].1.t;
    let picks: Vec<usize> = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0]
        .iter()
        .map(|&x| t.iter().position(|&v| v >= x * (1.0 - 1e-9)).unwrap())
        .collect();
    print!("{:<24}", "curve \\ t");
    for &k in &picks {
        print!("{:>12.4}", t[k]);
    }
    println!();
    for (cfg, d) in &data {
        print!("{:<24}", cfg.file_name().trim_end_matches(".csv"));
        let f = d.column("fidelity").unwrap();
        for &k in &picks {
            print!("{:>12.3e}", f[k]);
        }
        println!();
    }
    Ok(())
}

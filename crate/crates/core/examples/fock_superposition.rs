//! Wigner panels of (|2> + sqrt2 |4>)/sqrt3 through the attenuation channel.
//!
//! cargo run --release --example fock_superposition -- [out-dir]

use cavity_feedback::experiments::{run_fig3, Fig3Options};

fn main() -> cavity_feedback::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/fock".into());
    for p in run_fig3(&Fig3Options::default(), out.as_ref())? {
        let min = p.grid.values().iter().copied().fold(f64::MAX, f64::min);
        println!(
            "{} t={:.2} F={:.5} W(0)={:+.5} min W={:+.5} -> {}",
            p.label,
            p.t,
            p.envelope,
            p.grid.get(60, 60),
            min,
            p.path.display()
        );
    }
    Ok(())
}

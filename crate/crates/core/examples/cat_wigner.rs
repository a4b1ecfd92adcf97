//! Cat-state Wigner function with and without feedback, written as CSV grids.
//!
//! cargo run --example cat_wigner -- [out-dir]

use cavity_feedback::experiments::{run_fig2, Fig2Options};

fn main() -> cavity_feedback::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out/cat_wigner".into());
    let panels = run_fig2(&Fig2Options::default(), out.as_ref())?;
    let w0 = panels[0].grid.get(60, 60);
    for p in &panels {
        let (lo, hi) = p.grid.values().iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        println!(
            "{} t={:<6} F={:.6} W(0)={:+.6} (fringes x{:.4})  range [{lo:+.4}, {hi:+.4}]  norm {:.6}  -> {}",
            p.label,
            p.t,
            p.envelope,
            p.grid.get(60, 60),
            p.grid.get(60, 60) / w0,
            p.grid.integral(),
            p.path.display()
        );
    }
    Ok(())
}

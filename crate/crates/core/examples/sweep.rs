//! Parameter sweep from an inline TOML config: fidelity and photon number
//! of a small cat over efficiency and coupling.
//!
//! cargo run --example sweep

use cavity_feedback::experiments::{compute_curves, SweepConfig};

const CONFIG: &str = r#"
name = "demo"
observables = ["fidelity", "photon_number"]

[params]
ratio = 1e-3
eta = [1.0, 0.9]
g = [-1.0, -0.5, 0.0]

[state]
kind = "cat"
alpha0 = [0.0, 1.5]

[time]
count = 5
t_max = 4.0
"#;

fn main() -> cavity_feedback::Result<()> {
    let sweep = SweepConfig::from_toml_str(CONFIG)?;
    for run in sweep.expand(None)? {
        let d = compute_curves(&run)?;
        let f = d.column("fidelity").unwrap();
        let n = d.column("photon_number").unwrap();
        let cells: Vec<String> = d.t.iter().zip(f).zip(n).map(|((t, f), n)| format!("t={t}: F={f:.4} n={n:.4}")).collect();
        println!("{:<22} {}", run.file_name(), cells.join(" | "));
    }
    Ok(())
}

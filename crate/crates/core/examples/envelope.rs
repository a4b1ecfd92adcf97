//! Decay envelope F(t) for a few feedback settings, and the renormalized rate.
//!
//! cargo run --example envelope

use cavity_feedback::feedback::{effective_rate, DecayEnvelope, FeedbackParams};

fn main() -> cavity_feedback::Result<()> {
    let settings = [("no feedback", 1e-3, 1.0, 0.0), ("g=-1 eta=1", 1e-3, 1.0, -1.0), ("g=-1 eta=0.95", 1e-3, 0.95, -1.0), ("g=-1 gamma2=10", 0.1, 1.0, -1.0)];
    print!("{:>8}", "t");
    for (name, ..) in &settings {
        print!("{name:>18}");
    }
    println!();
    let envs: Vec<_> = settings
        .iter()
        .map(|&(_, ratio, eta, g)| FeedbackParams::from_ratio(1.0, ratio, eta, g).map(DecayEnvelope::new))
        .collect::<Result<_, _>>()?;
    for t in [0.0, 0.001, 0.01, 0.1, 1.0, 10.0, 100.0] {
        print!("{t:>8}");
        for env in &envs {
            print!("{:>18.10}", env.envelope(t));
        }
        println!();
    }

    println!("\nadiabatic rate gamma1_eff / gamma1");
    for eta in [1.0, 0.95, 0.9] {
        let row: Vec<String> = [-2.0, -1.5, -1.0, -0.5, 0.0]
            .iter()
            .map(|&g| format!("g={g}: {:.4}", effective_rate(&FeedbackParams::from_ratio(1.0, 1e-3, eta, g).unwrap())))
            .collect();
        println!("  eta={eta}: {}", row.join("  "));
    }
    Ok(())
}

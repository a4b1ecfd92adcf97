//! Brute-force two-mode integration against the exact single-mode channel.
//!
//! cargo run --release --example oracle_check

use cavity_feedback::channel::{apply_channel, ChannelSnapshot};
use cavity_feedback::feedback::{DecayEnvelope, FeedbackParams};
use cavity_feedback::fock::{make_state, trace_distance, StateSpec, C64};
use cavity_feedback::oracle::{evolve_adiabatic, evolve_joint, IntegratorConfig};

fn main() -> cavity_feedback::Result<()> {
    let spec = StateSpec::cat(C64::new(1.0, 0.0), 0.0);
    let rho0 = make_state(&spec, spec.default_space())?;
    let times = vec![0.1, 0.5, 1.0, 2.0];
    for (name, p) in [
        ("g=0", FeedbackParams::from_ratio(1.0, 0.02, 1.0, 0.0)?),
        ("g=-1", FeedbackParams::from_ratio(1.0, 0.02, 1.0, -1.0)?),
        ("g=-1 eta=0.9", FeedbackParams::from_ratio(1.0, 0.02, 0.9, -1.0)?),
    ] {
        let cfg = IntegratorConfig::for_params(&p, times.clone());
        let rec = evolve_joint(&rho0, &p, &cfg)?;
        let env = DecayEnvelope::new(p);
        println!("{name}: dt={:.1e}, {} steps, diagnostics ok: {}", cfg.dt, rec.steps, rec.all_within_bounds());
        for (t, rho) in rec.times.iter().zip(&rec.reduced_states) {
            let exact = apply_channel(&rho0, ChannelSnapshot::at(&env, *t)?)?;
            println!(
                "  t={t:<4} F={:.6}  <n>={:.6}  trace distance {:.2e}",
                env.envelope(*t),
                rho.mean_photon_number()?,
                trace_distance(rho, &exact)?
            );
        }
    }

    // the adiabatic single-mode model stops the decay completely at g=-1, eta=1
    let p = FeedbackParams::from_ratio(1.0, 1e-3, 1.0, -1.0)?;
    let rec = evolve_adiabatic(&rho0, &p, &IntegratorConfig::new(0.05, vec![100.0]))?;
    println!("adiabatic, t=100: trace distance to initial {:.2e}", trace_distance(&rec.reduced_states[0], &rho0)?);
    Ok(())
}

use std::f64::consts::FRAC_2_PI;

use cavity_feedback::channel::{GridSpec, WignerGrid};
use cavity_feedback::error::Error;
use cavity_feedback::experiments::{run_fig2, run_fig3, Fig2Options, Fig3Options};
use cavity_feedback::fock::{make_state, wigner_point, StateSpec, C64};

fn rotated_diff(w: &WignerGrid, quarter_turns: usize) -> f64 {
    let n = w.spec().nx;
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            let (ri, rj) = match quarter_turns {
                1 => (n - 1 - j, i),
                2 => (n - 1 - i, n - 1 - j),
                _ => unreachable!(),
            };
            worst = worst.max((w.get(i, j) - w.get(ri, rj)).abs());
        }
    }
    worst
}

#[test]
fn cat_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_fig2(&Fig2Options::default(), dir.path()).unwrap();
    let origin = |k: usize| out[k].grid.get(60, 60);
    assert!((origin(0) - FRAC_2_PI).abs() < 1e-12);
    // no feedback at 2 t_dec: the cross term drops by exp(-8 (1 - e^{-1/4})) ~ 0.170
    let expected = (-8.0 * (1.0 - (-0.25f64).exp())).exp();
    let ratio_d = origin(3) / origin(0);
    assert!((ratio_d / expected - 1.0).abs() < 0.03, "{ratio_d} vs {expected}");
    assert!(origin(1) / origin(0) > ratio_d);
    for p in &out {
        assert!((p.grid.integral() - 1.0).abs() < 1e-3, "{}: {}", p.label, p.grid.integral());
    }
}

#[test]
fn fock_panels() {
    let dir = tempfile::tempdir().unwrap();
    let opts = Fig3Options { grid: Some(GridSpec::square(4.5, 61)), ..Default::default() };
    let out = run_fig3(&opts, dir.path()).unwrap();
    assert!((out[0].grid.get(30, 30) - FRAC_2_PI).abs() < 1e-10);
    let spec = StateSpec::fock_two_four();
    let rho = make_state(&spec, spec.default_space()).unwrap();
    for (i, j) in [(30, 30), (10, 44), (37, 21), (55, 3), (0, 60)] {
        let x = opts.grid.unwrap().point(i, j);
        assert!((out[0].grid.get(i, j) - wigner_point(&rho, x).unwrap()).abs() < 1e-8);
    }
    for p in &out {
        assert!((p.grid.integral() - 1.0).abs() < 1e-3, "{}: {}", p.label, p.grid.integral());
        // the |2><4| coherence gives a two-fold, not four-fold, phase symmetry
        assert!(rotated_diff(&p.grid, 2) < 1e-8);
        if p.label != "c" {
            assert!(rotated_diff(&p.grid, 1) > 1e-3, "{}", p.label);
        }
    }
}

#[test]
fn truncation_override_too_small() {
    let dir = tempfile::tempdir().unwrap();
    let opts = Fig3Options { truncation: Some(4), ..Default::default() };
    assert!(matches!(run_fig3(&opts, dir.path()), Err(Error::Truncation(_))));
    let opts = Fig2Options { alpha0: C64::new(1.0, 0.0), grid: Some(GridSpec::square(1.0, 1)), ..Default::default() };
    assert!(matches!(run_fig2(&opts, dir.path()).unwrap_err(), Error::Config(_)));
}

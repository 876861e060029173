use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sechgate::model::StateVector;
use sechgate::model::SystemParams;
use sechgate::phases::{decompose, dynamic_phase_analytic, dynamic_phase_numeric, sweep_ratio, Method, DEFAULT_WINDOW};
use sechgate::propagator::{propagate, IntegratorOpts, PulseSchedule};
use std::f64::consts::PI;

fn alpha(r: f64) -> f64 {
    dynamic_phase_analytic(1.0, 1.0 / r, DEFAULT_WINDOW).unwrap()
}

fn gamma(r: f64) -> f64 {
    let d = decompose(1.0, 1.0 / r, Method::Analytic, &SystemParams::ideal()).unwrap();
    d.geometric
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

#[test]
fn dynamic_phase_matches_rational_oracle() {
    // the integrand collapses to 2Δ sech²(Ωt), so α = 4r/(1 + r²)
    for r in log_grid(0.01, 100.0, 41) {
        assert!((alpha(r) - 4.0 * r / (1.0 + r * r)).abs() < 1e-8, "r = {r}");
    }
}

#[test]
fn dynamic_phase_peaks_at_unit_ratio() {
    let grid = log_grid(0.01, 100.0, 2001);
    let values: Vec<f64> = grid.iter().map(|&r| alpha(r)).collect();
    let (k, max) = values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |m, (k, &v)| if v > m.1 { (k, v) } else { m });
    assert!((grid[k] - 1.0).abs() < 0.01);
    assert!((max - 2.0).abs() < 1e-3);
}

#[test]
fn geometric_phase_landmarks() {
    // zero crossing by bisection
    let (mut lo, mut hi) = (1.0, 3.0);
    assert!(gamma(lo) < 0.0 && gamma(hi) > 0.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gamma(mid) < 0.0 {
            lo = mid
        } else {
            hi = mid
        }
    }
    assert!((lo - 1.39).abs() < 0.02, "crossing at {lo}");

    let grid = log_grid(0.05, 5.0, 4001);
    let (r_min, g_min) = grid
        .iter()
        .map(|&r| (r, gamma(r)))
        .fold((0.0, f64::MAX), |m, p| if p.1 < m.1 { p } else { m });
    assert!((r_min - 0.58).abs() < 0.02, "minimum at {r_min}");
    assert!((g_min + 0.68).abs() < 0.02, "minimum {g_min}");
}

#[test]
fn dynamic_phase_vanishes_at_extreme_ratios() {
    let s = SystemParams::ideal();
    let far_detuned = decompose(1.0, 1e3, Method::Analytic, &s).unwrap();
    assert!(far_detuned.dynamic.abs() < 5e-3 && far_detuned.overall.abs() < 5e-3);
    // near resonance α → 0 while φ → π
    let near_resonant = decompose(1.0, 1e-3, Method::Analytic, &s).unwrap();
    assert!(near_resonant.dynamic.abs() < 5e-3 && (near_resonant.overall - PI).abs() < 5e-3);
}

#[test]
fn methods_agree_without_precession() {
    let ratios = [-4.0, -0.3, 0.1, 0.5, 1.0, 2.0, 10.0];
    let s = SystemParams::ideal();
    let a = sweep_ratio(&ratios, Method::Analytic, &s).unwrap();
    let n = sweep_ratio(&ratios, Method::Numeric, &s).unwrap();
    for (x, y) in a.iter().zip(&n) {
        assert_eq!(x.ratio, y.ratio);
        assert!((x.dynamic - y.dynamic).abs() < 1e-3, "r = {}", x.ratio);
        assert!((x.overall - y.overall).abs() < 1e-3, "r = {}", x.ratio);
        assert_eq!(y.method, Method::Numeric);
    }
}

#[test]
fn free_precession_energy() {
    // |z⟩ precesses through states with ⟨σx⟩ = 0; (|z̄⟩ + |z⟩)/√2 is a σx eigenstate
    let wb = 0.05;
    let s = SystemParams::precessing(wb).unwrap();
    let sched = PulseSchedule::empty((0.0, 80.0)).unwrap();
    let opts = IntegratorOpts::default();
    let traj = propagate(&StateVector::spin_up(), &sched, &s, &opts).unwrap();
    assert!(dynamic_phase_numeric(&traj, &sched, &s).unwrap().abs() < 1e-12);

    let a = std::f64::consts::FRAC_1_SQRT_2;
    let plus = StateVector::new(C64::new(a, 0.0), C64::new(a, 0.0), C64::new(0.0, 0.0));
    let traj = propagate(&plus, &sched, &s, &opts).unwrap();
    assert!((dynamic_phase_numeric(&traj, &sched, &s).unwrap() + wb * 80.0).abs() < 1e-10);
}

#[test]
fn sweep_keeps_input_order() {
    let ratios = [5.0, 0.2, -1.0, 3.0];
    let out = sweep_ratio(&ratios, Method::Analytic, &SystemParams::ideal()).unwrap();
    let got: Vec<f64> = out.iter().map(|d| d.ratio).collect();
    for (g, r) in got.iter().zip(ratios) {
        assert!((g - r).abs() < 1e-15);
    }
}

proptest! {
    #[test]
    fn phases_are_odd(r in prop_oneof![-100.0..-0.01f64, 0.01..100.0f64]) {
        let s = SystemParams::ideal();
        let p = decompose(1.0, 1.0 / r, Method::Analytic, &s).unwrap();
        let m = decompose(1.0, -1.0 / r, Method::Analytic, &s).unwrap();
        prop_assert!((p.overall + m.overall).abs() < 1e-9);
        prop_assert!((p.dynamic + m.dynamic).abs() < 1e-9);
        prop_assert!((p.geometric + m.geometric).abs() < 1e-9);
    }

    #[test]
    fn dynamic_phase_is_reciprocal(r in 0.01..100.0f64) {
        prop_assert!((alpha(r) - alpha(1.0 / r)).abs() < 1e-6);
    }

    #[test]
    fn scale_invariance_in_rabi(r in 0.05..20.0f64, rabi in 0.2..5.0f64) {
        let base = dynamic_phase_analytic(1.0, 1.0 / r, DEFAULT_WINDOW).unwrap();
        let scaled = dynamic_phase_analytic(rabi, rabi / r, DEFAULT_WINDOW).unwrap();
        prop_assert!((base - scaled).abs() < 1e-8);
    }
}

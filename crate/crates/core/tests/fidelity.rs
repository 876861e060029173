use num_complex::Complex64 as C64;
use proptest::prelude::*;
use sechgate::fidelity::{average_fidelity, free_precession, ideal_rotation, population_sweep};
use sechgate::propagator::Matrix2c;
use sechgate::pulsedesign::Branch;
use sechgate::{gate_report, GateParams, IdealConvention};
use std::f64::consts::PI;

fn su2(chi: f64, a: f64, b: f64, theta: f64) -> Matrix2c {
    let e = |x: f64| C64::from_polar(1.0, x);
    let (s, c) = theta.sin_cos();
    Matrix2c::new(e(a) * c, e(b) * s, -e(-b) * s, e(-a) * c) * e(chi)
}

/// (tr(M M†) + |tr M|²)/6 with M = U†·U_id.
fn trace_form(u: &Matrix2c, ideal: &Matrix2c) -> f64 {
    let m = u.adjoint() * ideal;
    ((m * m.adjoint()).trace().re + m.trace().norm_sqr()) / 6.0
}

fn closed() -> GateParams {
    GateParams {
        decay: false,
        ..GateParams::default()
    }
}

#[test]
fn perfect_without_field_or_decay() {
    for g in [-3.0 * PI / 4.0, -0.3, 0.0, PI / 4.0, PI / 2.0, PI] {
        let rep = gate_report(g, 0.0, &closed()).unwrap();
        assert!((rep.fidelity - 1.0).abs() < 1e-6, "γ = {g}: {}", rep.fidelity);
        assert!((rep.total_geometric_phase - g).abs() < 1e-12);
    }
}

#[test]
fn opposite_angles_have_equal_fidelity() {
    let p = GateParams::default();
    for g in [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0] {
        for b in [0.29, 2.7] {
            let plus = gate_report(g, b, &p).unwrap().fidelity;
            let minus = gate_report(-g, b, &p).unwrap().fidelity;
            assert!((plus - minus).abs() < 1e-9, "γ = {g}, B = {b}");
        }
    }
}

#[test]
fn positive_branch_breaks_the_symmetry_only_slightly() {
    let p = GateParams {
        branch: Branch::Positive,
        ..GateParams::default()
    };
    let plus = gate_report(PI / 2.0, 0.29, &p).unwrap().fidelity;
    let minus = gate_report(-PI / 2.0, 0.29, &p).unwrap().fidelity;
    assert!(plus > 0.99 && minus > 0.99);
}

#[test]
fn decay_only_costs_the_same_for_every_angle() {
    let losses: Vec<f64> = [PI / 4.0, PI / 2.0, 3.0 * PI / 4.0]
        .iter()
        .map(|&g| 1.0 - gate_report(g, 0.0, &GateParams::default()).unwrap().fidelity)
        .collect();
    assert!(losses[0] > 1e-4);
    assert!(losses.iter().all(|l| (l - losses[0]).abs() < 1e-5), "{losses:?}");
}

#[test]
fn bare_convention_is_worse_with_field() {
    let bare = GateParams {
        ideal: IdealConvention::Bare,
        ..GateParams::default()
    };
    let f_bare = gate_report(PI / 2.0, 0.29, &bare).unwrap().fidelity;
    let f_inter = gate_report(PI / 2.0, 0.29, &GateParams::default()).unwrap().fidelity;
    assert!(f_bare < f_inter);
}

#[test]
fn population_loss_without_decay_is_tiny() {
    let out = population_sweep(&[PI / 4.0, PI / 2.0], 0.0, &closed()).unwrap();
    assert!(out.iter().all(|l| l.loss < 1e-8));
}

#[test]
fn rejects_full_turn_and_beyond() {
    assert!(gate_report(3.5, 0.29, &GateParams::default()).is_err());
    assert!(gate_report(f64::NAN, 0.29, &GateParams::default()).is_err());
}

proptest! {
    #[test]
    fn fidelity_matches_trace_form(
        chi in -PI..PI, a in -PI..PI, b in -PI..PI, t in 0.0..PI,
        chi2 in -PI..PI, a2 in -PI..PI, b2 in -PI..PI, t2 in 0.0..PI,
        shrink in 0.5..1.0f64,
    ) {
        let u = su2(chi, a, b, t) * C64::new(shrink, 0.0);
        let ideal = su2(chi2, a2, b2, t2);
        prop_assert!((average_fidelity(&u, &ideal).unwrap() - trace_form(&u, &ideal)).abs() < 1e-12);
    }

    #[test]
    fn fidelity_ignores_common_phase(chi in -PI..PI, a in -PI..PI, b in -PI..PI, t in 0.0..PI, g in -PI..PI) {
        let u = su2(0.0, a, b, t);
        let ideal = ideal_rotation(g);
        let f0 = average_fidelity(&u, &ideal).unwrap();
        let f1 = average_fidelity(&(u * C64::from_polar(1.0, chi)), &ideal).unwrap();
        prop_assert!((f0 - f1).abs() < 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f0));
    }

    #[test]
    fn precession_is_unitary(w in 0.0..1.0f64, t in -100.0..100.0f64) {
        let p = free_precession(w, t);
        prop_assert!((p.adjoint() * p - Matrix2c::identity()).norm() < 1e-14);
    }
}

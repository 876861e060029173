//! Splitting the overall phase of a 2π pulse into dynamic and geometric
//! (Aharonov–Anandan) parts.
//!
//! Two independent routes are provided. The analytic route integrates the
//! closed-form dynamic-phase integrand obtained from the Rosen–Zener state
//! and takes the overall phase from 2·arctan(Ω/Δ); it ignores precession.
//! The numeric route propagates the full three-level system and integrates
//! −⟨ψ|H|ψ⟩ along the sampled trajectory.

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{bandwidth_from_duration, hamiltonian_for, pulse_coupling, PulseParams, StateVector, SystemParams};
use crate::propagator::{propagate, IntegratorOpts, PulseSchedule, Trajectory};
use crate::quad::adaptive_simpson;
use crate::special::overall_phase;

/// Absolute tolerance of the analytic dynamic-phase quadrature.
pub const QUADRATURE_TOL: f64 = 1e-9;

/// Default half-width of the phase integration window, in units of 1/Ω.
pub const DEFAULT_WINDOW: f64 = 20.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Closed-form state, slow-precession limit.
    Analytic,
    /// Full numerical propagation including precession.
    Numeric,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Analytic => "analytic",
            Method::Numeric => "numeric",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseDecomposition {
    pub overall: f64,
    pub dynamic: f64,
    pub geometric: f64,
    pub method: Method,
    /// Ω/Δ, infinite on resonance.
    pub ratio: f64,
}

impl PhaseDecomposition {
    fn new(overall: f64, dynamic: f64, method: Method, ratio: f64) -> Self {
        Self {
            overall,
            dynamic,
            geometric: overall - dynamic,
            method,
            ratio,
        }
    }
}

/// Knobs shared by the decomposition routines.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSettings {
    /// Rabi amplitude Ω = η of the 2π pulse (rad/ps). Only the numeric route
    /// depends on it, through ω_B/Ω.
    pub rabi: f64,
    /// Half-width of the integration window in units of 1/Ω.
    pub window: f64,
    pub opts: IntegratorOpts,
}

impl Default for PhaseSettings {
    fn default() -> Self {
        Self {
            rabi: bandwidth_from_duration(1.5).expect("positive duration"),
            window: DEFAULT_WINDOW,
            opts: IntegratorOpts::with_resolution(1e-2),
        }
    }
}

/// Dynamic phase of a 2π pulse (Ω = η) from the closed-form integrand
///
/// ```text
/// α = Ω²/(Δ²+Ω²) ∫ sech²(Ωt) [ e^{−iΔt} (1−tanh Ωt)^{−iΔ/2Ω} (1+tanh Ωt)^{iΔ/2Ω}
///                               (Δ − iΩ tanh Ωt) + c.c. ] dt
/// ```
///
/// over |Ωt| ≤ `window`.
pub fn dynamic_phase_analytic(rabi: f64, detuning: f64, window: f64) -> Result<f64> {
    if !(rabi.is_finite() && rabi > 0.0) {
        return Err(Error::InvalidParameter(format!("Ω must be positive, got {rabi}")));
    }
    if !detuning.is_finite() {
        return Err(Error::InvalidParameter(format!("Δ must be finite, got {detuning}")));
    }
    if !(window >= 10.0) {
        return Err(Error::InvalidParameter(format!("window must be ≥ 10/Ω, got {window}")));
    }
    if detuning == 0.0 {
        // Integrand is odd in t on resonance.
        return Ok(0.0);
    }
    let nu = detuning / (2.0 * rabi);
    let integrand = |t: f64| {
        let x = rabi * t;
        let e = (-2.0 * x.abs()).exp();
        let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
        let tanh = x.signum() * (1.0 - e) / (1.0 + e);
        // ln(1 ∓ tanh x) = ln 2 − ln(1 + e^{±2x})
        let ln_minus = 2f64.ln() - softplus(2.0 * x);
        let ln_plus = 2f64.ln() - softplus(-2.0 * x);
        let phase = -detuning * t - nu * ln_minus + nu * ln_plus;
        let f = C64::from_polar(1.0, phase) * C64::new(detuning, -rabi * tanh);
        sech2 * 2.0 * f.re
    };
    let half = window / rabi;
    let integral = adaptive_simpson(integrand, -half, half, QUADRATURE_TOL, 16)?;
    Ok(rabi * rabi / (detuning * detuning + rabi * rabi) * integral)
}

fn softplus(y: f64) -> f64 {
    if y > 0.0 {
        y + (-y).exp().ln_1p()
    } else {
        y.exp().ln_1p()
    }
}

/// Split of the numeric dynamic phase into the laser-coupling and
/// precession contributions of −∫⟨H⟩dt.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DynamicPhaseParts {
    pub coupling: f64,
    pub precession: f64,
}

impl DynamicPhaseParts {
    pub fn total(&self) -> f64 {
        self.coupling + self.precession
    }
}

/// −∫⟨ψ|H|ψ⟩dt along the trajectory by the trapezoid rule on its own grid.
pub fn dynamic_phase_numeric(traj: &Trajectory, sched: &PulseSchedule, s: &SystemParams) -> Result<f64> {
    Ok(dynamic_phase_parts(traj, sched, s)?.total())
}

/// As [`dynamic_phase_numeric`], split by Hamiltonian term.
pub fn dynamic_phase_parts(traj: &Trajectory, sched: &PulseSchedule, s: &SystemParams) -> Result<DynamicPhaseParts> {
    if traj.decay || s.decay_rate() > 0.0 {
        return Err(Error::DecayForbidden);
    }
    let energies = |t: f64, psi: &StateVector| {
        let coupling: C64 = sched.pulses().iter().map(|p| pulse_coupling(t, p)).sum();
        let (zbar, z, tau) = (psi.zbar(), psi.z(), psi.tau());
        let e_coupling = 2.0 * (z.conj() * coupling * tau).re;
        let e_precession = 2.0 * s.omega_b() * (zbar.conj() * z).re;
        (e_coupling, e_precession)
    };
    let mut parts = DynamicPhaseParts {
        coupling: 0.0,
        precession: 0.0,
    };
    let samples: Vec<(f64, f64)> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, psi)| energies(t, psi))
        .collect();
    for (w, e) in traj.times.windows(2).zip(samples.windows(2)) {
        let dt = w[1] - w[0];
        parts.coupling -= 0.5 * dt * (e[0].0 + e[1].0);
        parts.precession -= 0.5 * dt * (e[0].1 + e[1].1);
    }
    debug_assert!({
        // both terms together equal ⟨H⟩ of the Hermitian Hamiltonian
        let (t, psi) = (traj.times[0], &traj.states[0]);
        let h = hamiltonian_for(t, sched.pulses(), &s.without_decay());
        let (a, b) = energies(t, psi);
        (psi.expectation(&h).re - a - b).abs() < 1e-12
    });
    Ok(parts)
}

/// Wraps an angle into (−π, π].
fn wrap(angle: f64) -> f64 {
    let w = angle.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Decomposition for a single 2π pulse with the default settings.
pub fn decompose(rabi: f64, detuning: f64, method: Method, s: &SystemParams) -> Result<PhaseDecomposition> {
    decompose_with(
        detuning,
        method,
        s,
        &PhaseSettings {
            rabi,
            ..PhaseSettings::default()
        },
    )
}

pub fn decompose_with(
    detuning: f64,
    method: Method,
    s: &SystemParams,
    settings: &PhaseSettings,
) -> Result<PhaseDecomposition> {
    let rabi = settings.rabi;
    let ratio = rabi / detuning;
    let reference = overall_phase(rabi, detuning);
    match method {
        Method::Analytic => {
            let alpha = dynamic_phase_analytic(rabi, detuning, settings.window)?;
            Ok(PhaseDecomposition::new(reference, alpha, method, ratio))
        }
        Method::Numeric => {
            let (traj, sched) = numeric_trajectory(detuning, s, settings)?;
            let alpha = dynamic_phase_numeric(&traj, &sched, s)?;
            // The branch follows 2·arctan(Ω/Δ).
            let phi = reference + wrap(traj.final_state().z().arg() - reference);
            Ok(PhaseDecomposition::new(phi, alpha, method, ratio))
        }
    }
}

/// Trajectory of a 2π pulse centered at t = 0 starting from |z⟩, over
/// |Ωt| ≤ window.
pub fn numeric_trajectory(
    detuning: f64,
    s: &SystemParams,
    settings: &PhaseSettings,
) -> Result<(Trajectory, PulseSchedule)> {
    if s.decay_rate() > 0.0 {
        return Err(Error::DecayForbidden);
    }
    let pulse = PulseParams::two_pi_pulse(settings.rabi, detuning, 0.0)?;
    let half = settings.window / settings.rabi;
    let sched = PulseSchedule::new(vec![pulse], (-half, half))?;
    let traj = propagate(&StateVector::spin_up(), &sched, s, &settings.opts)?;
    Ok((traj, sched))
}

/// One decomposition per ratio, in input order.
pub fn sweep_ratio(ratios: &[f64], method: Method, s: &SystemParams) -> Result<Vec<PhaseDecomposition>> {
    sweep_ratio_with(ratios, method, s, &PhaseSettings::default())
}

pub fn sweep_ratio_with(
    ratios: &[f64],
    method: Method,
    s: &SystemParams,
    settings: &PhaseSettings,
) -> Result<Vec<PhaseDecomposition>> {
    if let Some(bad) = ratios.iter().find(|r| !r.is_finite() || **r == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "ratios must be finite and nonzero, got {bad}"
        )));
    }
    ratios
        .par_iter()
        .map(|&r| decompose_with(settings.rabi / r, method, s, settings))
        .collect()
}

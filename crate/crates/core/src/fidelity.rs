//! Gate-level figures of merit for the two-pulse geometric rotation.
//!
//! The actual operation is the 3×3 evolution operator over the full
//! schedule, truncated to the spin block without renormalization, so trion
//! decay shows up as a nonunitary block. The average fidelity against an
//! ideal unitary uses I = U†·U_id and
//!
//! ```text
//! F = (1/3) Σᵢ |Iᵢᵢ|² + (1/6) Σ_{i≠j} (|Iᵢⱼ|² + Iᵢᵢ Iⱼⱼ*)
//! ```

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{bandwidth_from_duration, larmor_from_field, PulseParams, SystemParams};
use crate::propagator::{evolve_operator, pulse_duration, truncate_qubit, IntegratorOpts, Matrix2c, PulseSchedule};
use crate::pulsedesign::{design_for_angle_with, Branch, DEFAULT_SPACING_DURATIONS};
use crate::special::overall_phase;

const CONTRACTION_SLACK: f64 = 1e-6;

/// diag(1, e^{iγ}) in the (|z̄⟩, |z⟩) basis.
pub fn ideal_rotation(angle: f64) -> Matrix2c {
    Matrix2c::new(
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
        C64::from_polar(1.0, angle),
    )
}

/// exp(−i ω_B σ_x t): free precession of the spin for a time `t`.
pub fn free_precession(omega_b: f64, t: f64) -> Matrix2c {
    let (s, c) = (omega_b * t).sin_cos();
    let off = C64::new(0.0, -s);
    Matrix2c::new(C64::new(c, 0.0), off, off, C64::new(c, 0.0))
}

/// Average fidelity of `u` (any contraction) against the unitary `ideal`.
pub fn average_fidelity(u: &Matrix2c, ideal: &Matrix2c) -> Result<f64> {
    let largest = u.singular_values().max();
    if largest > 1.0 + CONTRACTION_SLACK {
        return Err(Error::NonContraction(largest));
    }
    let i = u.adjoint() * ideal;
    let diag: f64 = (0..2).map(|k| i[(k, k)].norm_sqr()).sum();
    let mut off = C64::new(0.0, 0.0);
    for (a, b) in [(0, 1), (1, 0)] {
        off += i[(a, b)].norm_sqr() + i[(a, a)] * i[(b, b)].conj();
    }
    debug_assert!(off.im.abs() < 1e-12);
    Ok(diag / 3.0 + off.re / 6.0)
}

/// How the target operation accounts for the spin precession that runs
/// throughout the sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum IdealConvention {
    /// Free precession over the whole window with each pulse replaced by an
    /// instantaneous z rotation at its center.
    #[default]
    Interleaved,
    /// The bare rotation diag(1, e^{iγ_tot}).
    Bare,
}

/// Physical parameters of a gate run. Defaults: |g| = 0.57, τ_d = 1.5 ps,
/// τ_t = 900 ps, 14 τ_d pulse spacing, decay on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GateParams {
    pub g_factor: f64,
    /// Pulse FWHM (ps); η = 2·arccosh(2)/τ_d.
    pub pulse_duration: f64,
    /// `None` is an infinite lifetime.
    pub trion_lifetime: Option<f64>,
    /// Center spacing (ps); `None` uses 14 τ_d.
    pub spacing: Option<f64>,
    pub decay: bool,
    pub ideal: IdealConvention,
    pub branch: Branch,
    pub opts: IntegratorOpts,
}

impl Default for GateParams {
    fn default() -> Self {
        Self {
            g_factor: 0.57,
            pulse_duration: 1.5,
            trion_lifetime: Some(900.0),
            spacing: None,
            decay: true,
            ideal: IdealConvention::Interleaved,
            branch: Branch::Symmetric,
            opts: IntegratorOpts::default(),
        }
    }
}

impl GateParams {
    pub fn bandwidth(&self) -> Result<f64> {
        bandwidth_from_duration(self.pulse_duration)
    }

    pub fn spacing(&self) -> Result<f64> {
        Ok(self
            .spacing
            .unwrap_or(DEFAULT_SPACING_DURATIONS * pulse_duration(self.bandwidth()?)))
    }

    pub fn system(&self, field: f64) -> Result<SystemParams> {
        SystemParams::new(
            larmor_from_field(field, self.g_factor)?,
            self.trion_lifetime,
            self.decay,
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateReport {
    /// Truncated spin block of the simulated operation.
    pub actual: Matrix2c,
    pub ideal: Matrix2c,
    pub fidelity: f64,
    /// 1 − ‖U|z⟩‖² over all three levels.
    pub residual_population: f64,
    /// Tesla
    pub field: f64,
    pub target: f64,
    /// Sum of the overall phases of the pulses actually applied.
    pub total_geometric_phase: f64,
    pub pulses: Vec<PulseParams>,
}

/// Builds the sequence for `target`, simulates it with precession (and
/// decay if enabled) and scores it.
pub fn gate_report(target: f64, field: f64, params: &GateParams) -> Result<GateReport> {
    if !(target.abs() <= PI) {
        return Err(Error::OutOfRange(target));
    }
    let rabi = params.bandwidth()?;
    let system = params.system(field)?;

    let pulses = if target.abs() == PI {
        vec![PulseParams::two_pi_pulse(rabi, 0.0, 0.0)?]
    } else {
        design_for_angle_with(target, rabi, params.spacing()?, params.branch)?
            .pulses()
            .to_vec()
    };
    let phases: Vec<f64> = pulses.iter().map(|p| overall_phase(p.rabi(), p.detuning())).collect();
    let sched = PulseSchedule::train(pulses.clone())?;

    let u3 = evolve_operator(&sched, &system, &params.opts)?;
    let actual = truncate_qubit(&u3);
    let residual_population = (1.0 - u3.column(1).norm_squared()).clamp(0.0, 1.0);

    let ideal = match params.ideal {
        IdealConvention::Interleaved => interleaved_ideal(&sched, &phases, system.omega_b()),
        IdealConvention::Bare => ideal_rotation(phases.iter().sum()),
    };
    let fidelity = average_fidelity(&actual, &ideal)?;
    Ok(GateReport {
        actual,
        ideal,
        fidelity,
        residual_population,
        field,
        target,
        total_geometric_phase: phases.iter().sum(),
        pulses,
    })
}

/// P(t_N → t_end)·R(φ_N)· … ·R(φ_1)·P(t_start → t_1)
fn interleaved_ideal(sched: &PulseSchedule, phases: &[f64], omega_b: f64) -> Matrix2c {
    let (start, end) = sched.window();
    let mut u = Matrix2c::identity();
    let mut t = start;
    for (p, &phi) in sched.pulses().iter().zip(phases) {
        u = ideal_rotation(phi) * free_precession(omega_b, p.center() - t) * u;
        t = p.center();
    }
    free_precession(omega_b, end - t) * u
}

/// Reports for every (field, angle) pair, fields outermost.
pub fn fidelity_sweep(angles: &[f64], fields: &[f64], params: &GateParams) -> Result<Vec<GateReport>> {
    if angles.is_empty() || fields.is_empty() {
        return Err(Error::InvalidParameter("sweep grids must be nonempty".into()));
    }
    let points: Vec<(f64, f64)> = fields
        .iter()
        .flat_map(|&b| angles.iter().map(move |&g| (g, b)))
        .collect();
    points.par_iter().map(|&(g, b)| gate_report(g, b, params)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PopulationLoss {
    pub target: f64,
    pub field: f64,
    pub loss: f64,
}

/// Population lost from |z⟩ after the sequence, per angle.
pub fn population_sweep(angles: &[f64], field: f64, params: &GateParams) -> Result<Vec<PopulationLoss>> {
    Ok(fidelity_sweep(angles, &[field], params)?
        .into_iter()
        .map(|r| PopulationLoss {
            target: r.target,
            field: r.field,
            loss: r.residual_population,
        })
        .collect())
}

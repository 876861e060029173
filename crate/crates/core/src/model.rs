//! Physical parameter types and the interaction-picture Hamiltonian of the
//! Λ system.
//!
//! Units throughout the crate: times in ps, angular frequencies in rad/ps,
//! ħ = 1. The basis is ordered (|z̄⟩, |z⟩, |τ⟩).

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type Matrix3c = Matrix3<C64>;

/// Precession rates below this fraction of the pulse bandwidth count as
/// the slow-precession regime.
pub const SLOW_PRECESSION_RATIO: f64 = 0.1;

/// Parameters of a single hyperbolic-secant pulse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PulseParams {
    rabi: f64,
    detuning: f64,
    bandwidth: f64,
    center: f64,
}

impl PulseParams {
    /// Generic sech pulse `rabi·sech(bandwidth·(t − center))`.
    pub fn new(rabi: f64, detuning: f64, bandwidth: f64, center: f64) -> Result<Self> {
        if !(rabi.is_finite() && rabi > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Rabi amplitude must be positive and finite, got {rabi}"
            )));
        }
        if !(bandwidth.is_finite() && bandwidth > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be positive and finite, got {bandwidth}"
            )));
        }
        if !detuning.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "detuning must be finite, got {detuning}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidParameter(format!("center must be finite, got {center}")));
        }
        Ok(Self {
            rabi,
            detuning,
            bandwidth,
            center,
        })
    }

    /// A 2π pulse: Rabi amplitude equal to the bandwidth.
    pub fn two_pi_pulse(bandwidth: f64, detuning: f64, center: f64) -> Result<Self> {
        Self::new(bandwidth, detuning, bandwidth, center)
    }

    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    /// Signed ratio Ω/Δ; infinite on resonance.
    pub fn ratio(&self) -> f64 {
        self.rabi / self.detuning
    }

    pub fn is_two_pi(&self) -> bool {
        self.rabi == self.bandwidth
    }

    pub fn with_center(self, center: f64) -> Self {
        Self { center, ..self }
    }

    pub fn with_detuning(self, detuning: f64) -> Self {
        Self { detuning, ..self }
    }
}

/// Environment of the dot: spin precession and trion decay.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    omega_b: f64,
    trion_lifetime: Option<f64>,
    decay_enabled: bool,
}

impl SystemParams {
    /// `trion_lifetime = None` means an infinite lifetime.
    pub fn new(omega_b: f64, trion_lifetime: Option<f64>, decay_enabled: bool) -> Result<Self> {
        if !(omega_b.is_finite() && omega_b >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "precession frequency must be non-negative, got {omega_b}"
            )));
        }
        if let Some(tau) = trion_lifetime {
            if !(tau > 0.0) || tau.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "trion lifetime must be positive, got {tau}"
                )));
            }
        }
        Ok(Self {
            omega_b,
            trion_lifetime,
            decay_enabled,
        })
    }

    /// No precession, no decay.
    pub fn ideal() -> Self {
        Self {
            omega_b: 0.0,
            trion_lifetime: None,
            decay_enabled: false,
        }
    }

    /// Precession only, no decay.
    pub fn precessing(omega_b: f64) -> Result<Self> {
        Self::new(omega_b, None, false)
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn trion_lifetime(&self) -> Option<f64> {
        self.trion_lifetime
    }

    pub fn decay_enabled(&self) -> bool {
        self.decay_enabled
    }

    /// Population decay rate of the trion, zero if decay is off or the
    /// lifetime is infinite.
    pub fn decay_rate(&self) -> f64 {
        match (self.decay_enabled, self.trion_lifetime) {
            (true, Some(tau)) if tau.is_finite() => 1.0 / tau,
            _ => 0.0,
        }
    }

    /// Whether `omega_b / bandwidth < 0.1`.
    pub fn is_slow_precession(&self, bandwidth: f64) -> bool {
        self.omega_b / bandwidth < SLOW_PRECESSION_RATIO
    }

    pub fn without_decay(self) -> Self {
        Self {
            decay_enabled: false,
            ..self
        }
    }
}

/// Amplitudes over (|z̄⟩, |z⟩, |τ⟩).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateVector(pub Vector3<C64>);

impl StateVector {
    pub fn new(zbar: C64, z: C64, trion: C64) -> Self {
        Self(Vector3::new(zbar, z, trion))
    }

    pub fn basis(index: usize) -> Self {
        assert!(index < 3, "basis index out of range");
        let mut v = Vector3::zeros();
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn spin_down() -> Self {
        Self::basis(0)
    }

    pub fn spin_up() -> Self {
        Self::basis(1)
    }

    pub fn trion() -> Self {
        Self::basis(2)
    }

    pub fn zbar(&self) -> C64 {
        self.0[0]
    }

    pub fn z(&self) -> C64 {
        self.0[1]
    }

    pub fn tau(&self) -> C64 {
        self.0[2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨self|h|self⟩
    pub fn expectation(&self, h: &Matrix3c) -> C64 {
        self.0.dotc(&(h * self.0))
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        (self.0 - other.0).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Constants for converting a magnetic field into a precession frequency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    /// J/T
    pub bohr_magneton: f64,
    /// J·s
    pub hbar: f64,
    /// |g_e|
    pub g_factor: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            bohr_magneton: 9.274_010_078_3e-24,
            hbar: 1.054_571_817e-34,
            g_factor: 0.57,
        }
    }
}

impl PhysicalConstants {
    /// μ_B/ħ in rad/(ps·T).
    pub fn magneton_over_hbar(&self) -> f64 {
        self.bohr_magneton / self.hbar * 1e-12
    }

    pub fn larmor(&self, field: f64) -> Result<f64> {
        larmor_with(field, self.g_factor, self)
    }
}

/// Pulse envelope Ω·sech(η(t − t_c)).
pub fn sech_envelope(t: f64, p: &PulseParams) -> f64 {
    let x = p.bandwidth * (t - p.center);
    // sech via exp(-|x|) avoids cosh overflow in the tails.
    let e = (-x.abs()).exp();
    p.rabi * 2.0 * e / (1.0 + e * e)
}

/// Area of the field 2Ω(t) over all time, 2πΩ/η.
pub fn pulse_area(p: &PulseParams) -> f64 {
    2.0 * std::f64::consts::PI * p.rabi / p.bandwidth
}

/// Coupling Ω(t)·e^{−iΔ(t − t_c)} between |z⟩ and |τ⟩.
pub fn pulse_coupling(t: f64, p: &PulseParams) -> C64 {
    let envelope = sech_envelope(t, p);
    C64::from_polar(envelope, -p.detuning * (t - p.center))
}

/// H/ħ for one pulse.
pub fn hamiltonian(t: f64, p: &PulseParams, s: &SystemParams) -> Matrix3c {
    hamiltonian_for(t, std::slice::from_ref(p), s)
}

/// H/ħ with the couplings of every pulse summed, each in its own detuning
/// frame.
pub fn hamiltonian_for(t: f64, pulses: &[PulseParams], s: &SystemParams) -> Matrix3c {
    let coupling: C64 = pulses.iter().map(|p| pulse_coupling(t, p)).sum();
    let wb = C64::new(s.omega_b, 0.0);
    let mut h = Matrix3c::zeros();
    h[(0, 1)] = wb;
    h[(1, 0)] = wb;
    h[(1, 2)] = coupling;
    h[(2, 1)] = coupling.conj();
    h[(2, 2)] = C64::new(0.0, -0.5 * s.decay_rate());
    h
}

/// ω_B = g·μ_B·B/(2ħ) in rad/ps, so that |⟨z|ψ⟩|² = cos²(ω_B t) has period
/// 2πħ/(g μ_B B).
pub fn larmor_from_field(field: f64, g_factor: f64) -> Result<f64> {
    larmor_with(field, g_factor, &PhysicalConstants::default())
}

fn larmor_with(field: f64, g_factor: f64, c: &PhysicalConstants) -> Result<f64> {
    if !(field.is_finite() && field >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "magnetic field must be ≥ 0 T, got {field}"
        )));
    }
    if !(g_factor.is_finite() && g_factor >= 0.0) {
        return Err(Error::InvalidParameter(format!("g factor must be ≥ 0, got {g_factor}")));
    }
    Ok(0.5 * g_factor * c.magneton_over_hbar() * field)
}

/// Bandwidth η for a pulse whose sech amplitude has FWHM `duration`.
pub fn bandwidth_from_duration(duration: f64) -> Result<f64> {
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "pulse duration must be positive, got {duration}"
        )));
    }
    Ok(2.0 * 2f64.acosh() / duration)
}

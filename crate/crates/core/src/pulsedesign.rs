//! Two-pulse sequences whose dynamic phases cancel.
//!
//! A 2π pulse with ratio r = Ω/Δ and one with −1/r carry opposite dynamic
//! phases, since α(r) = α(1/r) and α is odd in r, while their overall
//! phases add to
//!
//! ```text
//! γ_tot(r) = 2·arctan(r) + 2·arctan(−1/r) = 4·arctan(r) − π·sign(r)
//! ```
//!
//! which is purely geometric and covers (−π, π).

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{PulseParams, SystemParams};
use crate::phases::{
    dynamic_phase_analytic, dynamic_phase_numeric, numeric_trajectory, Method, PhaseSettings, DEFAULT_WINDOW,
};
use crate::propagator::pulse_duration;

/// Pulse spacing in units of the pulse duration used when none is given.
pub const DEFAULT_SPACING_DURATIONS: f64 = 14.0;

/// Smallest admissible spacing in units of the pulse duration.
pub const MIN_SPACING_DURATIONS: f64 = 10.0;

pub fn default_spacing(rabi: f64) -> f64 {
    DEFAULT_SPACING_DURATIONS * pulse_duration(rabi)
}

/// Pulse 1 at t = 0 with Δ₁ = Ω/r₁, pulse 2 at t = spacing with Δ₂ = −Ω·r₁.
/// Both are 2π pulses with the same Ω = η.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CancelingPair {
    pub r1: f64,
    pub pulse1: PulseParams,
    pub pulse2: PulseParams,
    pub spacing: f64,
}

impl CancelingPair {
    /// −1/r₁
    pub fn r2(&self) -> f64 {
        -1.0 / self.r1
    }

    pub fn rabi(&self) -> f64 {
        self.pulse1.rabi()
    }

    pub fn pulses(&self) -> [PulseParams; 2] {
        [self.pulse1, self.pulse2]
    }

    /// Geometric angle accumulated by the pair.
    pub fn total_geometric_phase(&self) -> f64 {
        total_phase_unchecked(self.r1)
    }
}

pub fn cancel_pair(r1: f64, rabi: f64, spacing: f64) -> Result<CancelingPair> {
    if r1 == 0.0 {
        return Err(Error::ZeroRatio);
    }
    if r1.is_nan() || r1.is_infinite() {
        return Err(Error::InvalidParameter(format!("ratio must be finite, got {r1}")));
    }
    let min_spacing = MIN_SPACING_DURATIONS * pulse_duration(rabi);
    if !(spacing >= min_spacing) {
        return Err(Error::InvalidParameter(format!(
            "spacing {spacing} ps is below {MIN_SPACING_DURATIONS} pulse durations ({min_spacing:.3} ps)"
        )));
    }
    let pulse1 = PulseParams::two_pi_pulse(rabi, rabi / r1, 0.0)?;
    let pulse2 = PulseParams::two_pi_pulse(rabi, -rabi * r1, spacing)?;
    Ok(CancelingPair {
        r1,
        pulse1,
        pulse2,
        spacing,
    })
}

/// γ_tot = 2·arctan(r₁) + 2·arctan(−1/r₁).
pub fn total_geometric_phase(r1: f64) -> Result<f64> {
    if r1 == 0.0 {
        return Err(Error::ZeroRatio);
    }
    if r1.is_nan() {
        return Err(Error::InvalidParameter("ratio is NaN".into()));
    }
    Ok(total_phase_unchecked(r1))
}

fn total_phase_unchecked(r1: f64) -> f64 {
    2.0 * r1.atan() + 2.0 * (-1.0 / r1).atan()
}

/// Which solution of γ_tot(r₁) = γ to return.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Branch {
    /// r₁ = sign(γ)·tan((|γ| + π)/4), |r₁| ≥ 1. Opposite angles differ only
    /// in the sign of both detunings.
    #[default]
    Symmetric,
    /// r₁ = tan((γ + π)/4) ∈ (0, ∞).
    Positive,
}

pub fn design_for_angle(target: f64, rabi: f64, spacing: f64) -> Result<CancelingPair> {
    design_for_angle_with(target, rabi, spacing, Branch::default())
}

pub fn design_for_angle_with(target: f64, rabi: f64, spacing: f64, branch: Branch) -> Result<CancelingPair> {
    if !(target.abs() < PI) {
        return Err(Error::OutOfRange(target));
    }
    let r1 = match branch {
        // tan(π/4) rounds below 1
        _ if target == 0.0 => 1.0,
        Branch::Symmetric if target < 0.0 => -((PI - target) / 4.0).tan(),
        Branch::Symmetric => ((target + PI) / 4.0).tan(),
        Branch::Positive => ((target + PI) / 4.0).tan(),
    };
    cancel_pair(r1, rabi, spacing)
}

/// Dynamic phases (α₁, α₂) of the two pulses, each evaluated on its own.
pub fn pair_dynamic_phases(pair: &CancelingPair, method: Method, s: &SystemParams) -> Result<(f64, f64)> {
    if s.decay_rate() > 0.0 {
        return Err(Error::DecayForbidden);
    }
    let rabi = pair.rabi();
    let alpha = |p: &PulseParams| -> Result<f64> {
        match method {
            Method::Analytic => dynamic_phase_analytic(rabi, p.detuning(), DEFAULT_WINDOW),
            Method::Numeric => {
                let settings = PhaseSettings {
                    rabi,
                    ..PhaseSettings::default()
                };
                let (traj, sched) = numeric_trajectory(p.detuning(), s, &settings)?;
                dynamic_phase_numeric(&traj, &sched, s)
            }
        }
    };
    Ok((alpha(&pair.pulse1)?, alpha(&pair.pulse2)?))
}

/// α₁ + α₂, zero up to quadrature error for the analytic method.
pub fn verify_cancellation(pair: &CancelingPair, method: Method, s: &SystemParams) -> Result<f64> {
    let (a1, a2) = pair_dynamic_phases(pair, method, s)?;
    Ok(a1 + a2)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RABI: f64 = 1.0;

    fn spacing() -> f64 {
        default_spacing(RABI)
    }

    #[test]
    fn pair_construction() {
        let pair = cancel_pair(10.0, RABI, spacing()).unwrap();
        assert_eq!(pair.r2(), -0.1);
        assert!((pair.pulse2.ratio() - pair.r2()).abs() < 1e-15);
        assert!(pair.pulse1.is_two_pi() && pair.pulse2.is_two_pi());
        assert_eq!(pair.pulse2.center() - pair.pulse1.center(), spacing());

        assert_eq!(cancel_pair(1.0, RABI, spacing()).unwrap().r2(), -1.0);
        assert_eq!(cancel_pair(-0.5, RABI, spacing()).unwrap().r2(), 2.0);
    }

    #[test]
    fn pair_errors() {
        assert_eq!(cancel_pair(0.0, RABI, spacing()), Err(Error::ZeroRatio));
        assert!(cancel_pair(1.0, RABI, 5.0 * pulse_duration(RABI)).is_err());
        assert_eq!(total_geometric_phase(0.0), Err(Error::ZeroRatio));
        assert!(matches!(
            design_for_angle(PI, RABI, spacing()),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            design_for_angle(-3.2, RABI, spacing()),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn total_phase_values() {
        assert_eq!(total_geometric_phase(1.0).unwrap(), 0.0);
        assert_eq!(total_geometric_phase(f64::INFINITY).unwrap(), PI);
        let r = (3.0 * PI / 8.0).tan();
        assert!((total_geometric_phase(r).unwrap() - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn design_branches() {
        let s = spacing();
        assert_eq!(design_for_angle(0.0, RABI, s).unwrap().r1, 1.0);
        let plus = design_for_angle(PI / 2.0, RABI, s).unwrap();
        let minus = design_for_angle(-PI / 2.0, RABI, s).unwrap();
        assert!((plus.r1 - 2.414_213_562_373_095).abs() < 1e-12);
        assert_eq!(minus.r1, -plus.r1);
        assert_eq!(minus.pulse1.detuning(), -plus.pulse1.detuning());
        assert_eq!(minus.pulse2.detuning(), -plus.pulse2.detuning());

        let positive = design_for_angle_with(-PI / 2.0, RABI, s, Branch::Positive).unwrap();
        assert!(positive.r1 > 0.0);
        assert!((positive.total_geometric_phase() + PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_ratio_has_extreme_phases() {
        let pair = cancel_pair(1.0, RABI, spacing()).unwrap();
        let (a1, a2) = pair_dynamic_phases(&pair, Method::Analytic, &SystemParams::ideal()).unwrap();
        assert!((a1 - 2.0).abs() < 1e-8 && (a2 + 2.0).abs() < 1e-8);
    }
}

//! Gauss hypergeometric function on the real segment [0, 1] with complex
//! parameters, and the closed-form Rosen–Zener state it produces.
//!
//! For `z ≤ 1/2` the power series is summed directly. Above that the
//! linear `z → 1 − z` connection formula is used,
//!
//! ```text
//! F(a,b;c;z) = A · F(a, b; a+b−c+1; 1−z)
//!            + B · (1−z)^{c−a−b} · F(c−a, c−b; c−a−b+1; 1−z)
//! A = Γ(c)Γ(c−a−b) / (Γ(c−a)Γ(c−b)),  B = Γ(c)Γ(a+b−c) / (Γ(a)Γ(b))
//! ```
//!
//! which needs `c − a − b` to be non-integer. Terminating series (a or b a
//! non-positive integer) are summed exactly for any z.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{PulseParams, StateVector};

const SERIES_RTOL: f64 = 1e-16;
const MAX_TERMS: usize = 1_000_000;

/// Parameters of ₂F₁(a, b; c; z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HypParams {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub z: f64,
}

impl HypParams {
    pub fn new(a: C64, b: C64, c: C64, z: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::InvalidParameter(format!("z must lie in [0, 1], got {z}")));
        }
        if non_positive_integer(c).is_some() {
            return Err(Error::InvalidC(c.to_string()));
        }
        Ok(Self { a, b, c, z })
    }
}

/// ₂F₁(a, b; c; z) for z ∈ [0, 1].
pub fn hyp2f1(h: HypParams) -> Result<C64> {
    let HypParams { a, b, c, z } = HypParams::new(h.a, h.b, h.c, h.z)?;
    hyp2f1_split(a, b, c, z, 1.0 - z)
}

/// Same as [`hyp2f1`] but with `1 − z` supplied separately so callers close
/// to z = 1 keep full relative precision in the complement.
pub(crate) fn hyp2f1_split(a: C64, b: C64, c: C64, z: f64, one_minus_z: f64) -> Result<C64> {
    if non_positive_integer(c).is_some() {
        return Err(Error::InvalidC(c.to_string()));
    }
    if z == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let terminating = non_positive_integer(a).is_some() || non_positive_integer(b).is_some();
    if terminating || z <= 0.5 {
        return series(a, b, c, z);
    }

    let s = c - a - b;
    if non_positive_integer(-s).is_some() || non_positive_integer(s).is_some() {
        // Integer c − a − b: the connection coefficients are singular.
        if one_minus_z == 0.0 {
            return gauss_sum(a, b, c);
        }
        return series(a, b, c, z);
    }

    let w = one_minus_z;
    let ln_gc = ln_gamma(c);
    let first_coef = (ln_gc + ln_gamma(s) - ln_gamma(c - a) - ln_gamma(c - b)).exp();
    let first = if first_coef == C64::new(0.0, 0.0) {
        C64::new(0.0, 0.0)
    } else {
        first_coef * series(a, b, 1.0 - s, w)?
    };

    if w == 0.0 {
        if s.re <= 0.0 {
            return Err(Error::NonConvergence { terms: 0 });
        }
        return Ok(first);
    }
    let second_coef = (ln_gc + ln_gamma(-s) - ln_gamma(a) - ln_gamma(b) + s * w.ln()).exp();
    let second = if second_coef == C64::new(0.0, 0.0) {
        C64::new(0.0, 0.0)
    } else {
        second_coef * series(c - a, c - b, 1.0 + s, w)?
    };
    Ok(first + second)
}

/// Gauss's value at z = 1, Re(c − a − b) > 0 required.
fn gauss_sum(a: C64, b: C64, c: C64) -> Result<C64> {
    let s = c - a - b;
    if s.re <= 0.0 {
        return Err(Error::NonConvergence { terms: 0 });
    }
    Ok((ln_gamma(c) + ln_gamma(s) - ln_gamma(c - a) - ln_gamma(c - b)).exp())
}

fn series(a: C64, b: C64, c: C64, z: f64) -> Result<C64> {
    let mut sum = C64::new(1.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term = term * (a + nf) * (b + nf) * z / ((c + nf) * (nf + 1.0));
        sum += term;
        if term.norm() == 0.0 {
            return Ok(sum);
        }
        if term.norm() <= SERIES_RTOL * sum.norm() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(sum);
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NonConvergence { terms: MAX_TERMS })
}

fn non_positive_integer(x: C64) -> Option<i64> {
    if x.im == 0.0 && x.re <= 0.0 && x.re.fract() == 0.0 {
        Some(x.re as i64)
    } else {
        None
    }
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(z) up to an additive multiple of 2πi. Poles map to `+∞`, so that
/// `exp(-ln_gamma)` is the reciprocal gamma function.
pub(crate) fn ln_gamma(z: C64) -> C64 {
    if non_positive_integer(z).is_some() {
        return C64::new(f64::INFINITY, 0.0);
    }
    if z.re < 0.5 {
        // Reflection: Γ(z)Γ(1−z) = π / sin(πz)
        return C64::new(PI.ln(), 0.0) - ln_sin_pi(z) - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = C64::new(LANCZOS[0], 0.0);
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        x += coef / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

/// ln sin(πz), stable for large |Im z|.
fn ln_sin_pi(z: C64) -> C64 {
    if z.im.abs() < 1.0 {
        return (PI * z).sin().ln();
    }
    let i = C64::new(0.0, 1.0);
    if z.im > 0.0 {
        // sin(πz) = e^{−iπz}(e^{2iπz} − 1)/(2i), |e^{2iπz}| < 1
        -i * PI * z + ((2.0 * i * PI * z).exp() - 1.0).ln() - (2.0 * i).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

/// Method-I state of a single sech pulse starting in |z⟩ at t → −∞. The
/// |z̄⟩ amplitude is identically zero.
pub fn rz_state(t: f64, p: &PulseParams) -> Result<StateVector> {
    let a = C64::new(p.rabi() / p.bandwidth(), 0.0);
    let c = C64::new(0.5, 0.5 * p.detuning() / p.bandwidth());
    let x = p.bandwidth() * (t - p.center());

    // z = (1 + tanh x)/2 = 1/(1 + e^{−2x}), 1 − z = 1/(1 + e^{2x})
    let z = 1.0 / (1.0 + (-2.0 * x).exp());
    let one_minus_z = 1.0 / (1.0 + (2.0 * x).exp());
    let ln_z = -(-2.0 * x).exp().ln_1p();

    let cz = hyp2f1_split(a, -a, c, z, one_minus_z)?;
    let z_pow_c = if z == 0.0 || ln_z < -745.0 {
        C64::new(0.0, 0.0)
    } else {
        (c * ln_z).exp()
    };
    let ctau = if z_pow_c == C64::new(0.0, 0.0) {
        z_pow_c
    } else {
        let i = C64::new(0.0, 1.0);
        -(i * a / c) * z_pow_c * hyp2f1_split(a + c, -a + c, 1.0 + c, z, one_minus_z)?
    };
    Ok(StateVector::new(C64::new(0.0, 0.0), cz, ctau))
}

/// Overall phase 2·arctan(Ω/Δ) of a 2π pulse, in (0, π] for Δ ≥ 0 and
/// (−π, 0) for Δ < 0.
pub fn overall_phase(rabi: f64, detuning: f64) -> f64 {
    if detuning == 0.0 {
        return PI;
    }
    2.0 * (rabi / detuning).atan()
}

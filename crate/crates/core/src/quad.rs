//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 50;

/// ∫ f over [a, b] to absolute tolerance `tol`. The interval is first cut
/// into `panels` equal pieces, each refined independently.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, panels: usize) -> Result<f64> {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == panels { b } else { lo + width };
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total += refine(&f, lo, hi, flo, fmid, fhi, whole, tol / panels as f64, MAX_DEPTH)
            .ok_or(Error::QuadratureFailure { tolerance: tol })?;
    }
    Ok(total)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    Some(
        refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x + 1.0, -1.0, 2.0, 1e-12, 1).unwrap();
        assert!((v - 3.75).abs() < 1e-12);
    }

    #[test]
    fn sech_squared_integral() {
        let v = adaptive_simpson(|x| 1.0 / x.cosh().powi(2), -20.0, 20.0, 1e-10, 8).unwrap();
        assert!((v - 2.0 * 20f64.tanh()).abs() < 1e-10);
    }

    #[test]
    fn nan_integrand_fails() {
        let r = adaptive_simpson(|x| if x > 0.3 { f64::NAN } else { 1.0 }, 0.0, 1.0, 1e-9, 1);
        assert!(matches!(r, Err(Error::QuadratureFailure { .. })));
    }
}

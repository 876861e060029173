//! Numerical Schrödinger evolution of the Λ system under sech pulse trains.
//!
//! Integration is classical fourth-order Runge–Kutta on a uniform grid that
//! lands exactly on both window edges. The step is either given or derived
//! from the fastest rate in the problem (see [`StepSize::Auto`]).

use nalgebra::{Matrix2, SMatrix};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{hamiltonian_for, Matrix3c, PulseParams, StateVector, SystemParams};

pub type Matrix2c = Matrix2<C64>;

/// Default half-width of the integration window around a pulse, in units
/// of the pulse duration (FWHM).
pub const WINDOW_HALF_WIDTH: f64 = 7.0;

/// Minimum distance from a pulse center to the window edge, in units of
/// 1/η.
pub const MIN_EDGE_MARGIN: f64 = 5.0;

/// Envelope level (relative to the peak) above which two pulses count as
/// overlapping.
pub const OVERLAP_THRESHOLD: f64 = 1e-5;

/// Largest admissible dt·rate product.
pub const RESOLUTION_LIMIT: f64 = 0.1;

const NORM_SLACK: f64 = 1e-6;

/// FWHM of a sech pulse of bandwidth η.
pub fn pulse_duration(bandwidth: f64) -> f64 {
    2.0 * 2f64.acosh() / bandwidth
}

/// Time-ordered, non-overlapping pulses and the window they are integrated
/// over.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    pulses: Vec<PulseParams>,
    window: (f64, f64),
}

impl PulseSchedule {
    pub fn new(pulses: Vec<PulseParams>, window: (f64, f64)) -> Result<Self> {
        let (start, end) = window;
        if !(start.is_finite() && end.is_finite() && start < end) {
            return Err(Error::InvalidSchedule(format!("window ({start}, {end}) is empty")));
        }
        for pair in pulses.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if b.center() <= a.center() {
                return Err(Error::InvalidSchedule(format!(
                    "pulse centers must increase strictly ({} then {})",
                    a.center(),
                    b.center()
                )));
            }
            let reach = overlap_reach(a) + overlap_reach(b);
            if b.center() - a.center() < reach {
                return Err(Error::InvalidSchedule(format!(
                    "pulses at {} and {} ps overlap (need ≥ {reach:.3} ps separation)",
                    a.center(),
                    b.center()
                )));
            }
        }
        for p in &pulses {
            let margin = MIN_EDGE_MARGIN / p.bandwidth();
            if p.center() - start < margin || end - p.center() < margin {
                return Err(Error::InvalidSchedule(format!(
                    "pulse at {} ps closer than {margin:.3} ps to the window edge",
                    p.center()
                )));
            }
        }
        Ok(Self { pulses, window })
    }

    /// No pulses, free evolution over `window`.
    pub fn empty(window: (f64, f64)) -> Result<Self> {
        Self::new(Vec::new(), window)
    }

    /// Pulses with the default window: 7 durations before the first center
    /// and after the last.
    pub fn train(pulses: Vec<PulseParams>) -> Result<Self> {
        let (first, last) = match (pulses.first(), pulses.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::InvalidSchedule("train needs at least one pulse".into())),
        };
        let start = first.center() - WINDOW_HALF_WIDTH * pulse_duration(first.bandwidth());
        let end = last.center() + WINDOW_HALF_WIDTH * pulse_duration(last.bandwidth());
        Self::new(pulses, (start, end))
    }

    pub fn single(p: PulseParams) -> Result<Self> {
        Self::train(vec![p])
    }

    pub fn pulses(&self) -> &[PulseParams] {
        &self.pulses
    }

    pub fn window(&self) -> (f64, f64) {
        self.window
    }

    pub fn span(&self) -> f64 {
        self.window.1 - self.window.0
    }

    /// Largest rate that the step has to resolve.
    fn max_rate(&self, s: &SystemParams) -> f64 {
        self.pulses
            .iter()
            .map(|p| p.rabi().max(p.detuning().abs()))
            .fold(s.omega_b().max(s.decay_rate()), f64::max)
    }
}

/// Distance from the center at which the envelope falls to the overlap
/// threshold.
fn overlap_reach(p: &PulseParams) -> f64 {
    (1.0 / OVERLAP_THRESHOLD).acosh() / p.bandwidth()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSize {
    /// At most this step (ps); shrunk so the grid ends on the window edge.
    Fixed(f64),
    /// dt = resolution / (fastest rate).
    Auto { resolution: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOpts {
    pub step: StepSize,
    /// Keep every `stride`-th step in the trajectory (the last point is
    /// always kept).
    pub stride: usize,
}

impl Default for IntegratorOpts {
    fn default() -> Self {
        Self {
            step: StepSize::Auto { resolution: 2e-3 },
            stride: 1,
        }
    }
}

impl IntegratorOpts {
    pub fn fixed(dt: f64) -> Self {
        Self {
            step: StepSize::Fixed(dt),
            ..Self::default()
        }
    }

    pub fn with_resolution(resolution: f64) -> Self {
        Self {
            step: StepSize::Auto { resolution },
            ..Self::default()
        }
    }

    pub fn with_stride(self, stride: usize) -> Self {
        Self { stride, ..self }
    }

    /// Uniform grid over `span`: (number of steps, dt).
    fn grid(&self, span: f64, rate: f64) -> Result<(usize, f64)> {
        let target = match self.step {
            StepSize::Fixed(dt) => {
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(Error::InvalidParameter(format!("step must be positive, got {dt}")));
                }
                dt
            }
            StepSize::Auto { resolution } => {
                if !(resolution > 0.0 && resolution < RESOLUTION_LIMIT) {
                    return Err(Error::InvalidParameter(format!(
                        "resolution must lie in (0, {RESOLUTION_LIMIT}), got {resolution}"
                    )));
                }
                if rate > 0.0 {
                    resolution / rate
                } else {
                    span
                }
            }
        };
        let steps = (span / target).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let product = dt * rate;
        if product >= RESOLUTION_LIMIT {
            return Err(Error::StepTooLarge { dt, rate, product });
        }
        Ok((steps, dt))
    }
}

/// Sampled solution of one propagation.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    pub norms: Vec<f64>,
    /// Whether trion decay was active.
    pub decay: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &StateVector {
        self.states.last().expect("trajectory always holds the initial state")
    }

    pub fn final_norm(&self) -> f64 {
        *self.norms.last().expect("trajectory always holds the initial state")
    }
}

type Block<const C: usize> = SMatrix<C64, 3, C>;

struct Rk4<'a> {
    pulses: &'a [PulseParams],
    system: &'a SystemParams,
}

impl Rk4<'_> {
    fn h(&self, t: f64) -> Matrix3c {
        hamiltonian_for(t, self.pulses, self.system)
    }

    /// One step of iẏ = H(t)y.
    fn step<const C: usize>(&self, t: f64, dt: f64, y: &Block<C>) -> Block<C> {
        let mi = C64::new(0.0, -1.0);
        let h0 = self.h(t);
        let hm = self.h(t + 0.5 * dt);
        let h1 = self.h(t + dt);
        let k1 = (h0 * y) * mi;
        let k2 = (hm * (y + k1 * C64::from(0.5 * dt))) * mi;
        let k3 = (hm * (y + k2 * C64::from(0.5 * dt))) * mi;
        let k4 = (h1 * (y + k3 * C64::from(dt))) * mi;
        y + (k1 + k2 * C64::from(2.0) + k3 * C64::from(2.0) + k4) * C64::from(dt / 6.0)
    }

    /// Integrates from `t0` over `steps` steps of signed size `dt`, calling
    /// `visit` after every step.
    fn run<const C: usize>(
        &self,
        t0: f64,
        dt: f64,
        steps: usize,
        mut y: Block<C>,
        mut visit: impl FnMut(usize, f64, &Block<C>) -> Result<()>,
    ) -> Result<Block<C>> {
        for k in 0..steps {
            let t = t0 + k as f64 * dt;
            y = self.step(t, dt, &y);
            let t_next = t0 + (k + 1) as f64 * dt;
            for col in y.column_iter() {
                let norm = col.norm_squared();
                if !(norm <= 1.0 + NORM_SLACK) {
                    return Err(Error::NormBlowup { norm, time: t_next });
                }
            }
            visit(k + 1, t_next, &y)?;
        }
        Ok(y)
    }
}

fn check_normalized(psi: &StateVector) -> Result<()> {
    let n = psi.norm_sqr();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "initial state must be normalized, |ψ|² = {n}"
        )));
    }
    Ok(())
}

/// Solves iψ̇ = Hψ across the schedule window, starting from `psi0` at the
/// window start.
pub fn propagate(
    psi0: &StateVector,
    sched: &PulseSchedule,
    s: &SystemParams,
    opts: &IntegratorOpts,
) -> Result<Trajectory> {
    check_normalized(psi0)?;
    let (steps, dt) = opts.grid(sched.span(), sched.max_rate(s))?;
    let stride = opts.stride.max(1);
    let (t0, t_end) = sched.window();

    let capacity = steps / stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        norms: Vec::with_capacity(capacity),
        decay: s.decay_rate() > 0.0,
    };
    traj.times.push(t0);
    traj.states.push(*psi0);
    traj.norms.push(psi0.norm_sqr());

    let rk = Rk4 {
        pulses: sched.pulses(),
        system: s,
    };
    rk.run(t0, dt, steps, psi0.0, |k, t, y| {
        if k % stride == 0 || k == steps {
            let state = StateVector(*y);
            traj.times.push(if k == steps { t_end } else { t });
            traj.norms.push(state.norm_sqr());
            traj.states.push(state);
        }
        Ok(())
    })?;
    Ok(traj)
}

/// Final state only, without storing the trajectory.
pub fn propagate_final(
    psi0: &StateVector,
    sched: &PulseSchedule,
    s: &SystemParams,
    opts: &IntegratorOpts,
) -> Result<StateVector> {
    check_normalized(psi0)?;
    let (steps, dt) = opts.grid(sched.span(), sched.max_rate(s))?;
    let rk = Rk4 {
        pulses: sched.pulses(),
        system: s,
    };
    let y = rk.run(sched.window().0, dt, steps, psi0.0, |_, _, _| Ok(()))?;
    Ok(StateVector(y))
}

/// Integrates from the window end back to the window start. Undoes
/// [`propagate_final`] when decay is off.
pub fn propagate_backward(
    psi_end: &StateVector,
    sched: &PulseSchedule,
    s: &SystemParams,
    opts: &IntegratorOpts,
) -> Result<StateVector> {
    if s.decay_rate() > 0.0 {
        return Err(Error::InvalidParameter("backward propagation needs decay off".into()));
    }
    check_normalized(psi_end)?;
    let (steps, dt) = opts.grid(sched.span(), sched.max_rate(s))?;
    let rk = Rk4 {
        pulses: sched.pulses(),
        system: s,
    };
    let y = rk.run(sched.window().1, -dt, steps, psi_end.0, |_, _, _| Ok(()))?;
    Ok(StateVector(y))
}

/// The 3×3 evolution operator over the window; column k is the final state
/// reached from basis state k.
pub fn evolve_operator(sched: &PulseSchedule, s: &SystemParams, opts: &IntegratorOpts) -> Result<Matrix3c> {
    let (steps, dt) = opts.grid(sched.span(), sched.max_rate(s))?;
    let rk = Rk4 {
        pulses: sched.pulses(),
        system: s,
    };
    rk.run(sched.window().0, dt, steps, Matrix3c::identity(), |_, _, _| Ok(()))
}

/// Upper-left 2×2 block in the (|z̄⟩, |z⟩) basis, not renormalized.
pub fn truncate_qubit(u: &Matrix3c) -> Matrix2c {
    u.fixed_view::<2, 2>(0, 0).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::overall_phase;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn schedule_validation() {
        let p = PulseParams::two_pi_pulse(1.0, 0.5, 0.0).unwrap();
        assert!(PulseSchedule::new(vec![p], (-4.0, 10.0)).is_err());
        assert!(PulseSchedule::new(vec![p], (-10.0, 10.0)).is_ok());
        assert!(PulseSchedule::new(vec![], (1.0, 1.0)).is_err());

        let q = p.with_center(30.0);
        assert!(PulseSchedule::train(vec![q, p]).is_err());
        assert!(PulseSchedule::train(vec![p, p.with_center(10.0)]).is_err());
        assert!(PulseSchedule::train(vec![p, q]).is_ok());
        assert!(PulseSchedule::train(vec![]).is_err());
    }

    #[test]
    fn default_window_and_spacing() {
        let eta = crate::model::bandwidth_from_duration(1.5).unwrap();
        let p = PulseParams::two_pi_pulse(eta, 1.0, 0.0).unwrap();
        let sched = PulseSchedule::train(vec![p, p.with_center(21.0)]).unwrap();
        let (a, b) = sched.window();
        assert!((a + 10.5).abs() < 1e-12 && (b - 31.5).abs() < 1e-12);
    }

    #[test]
    fn resolution_guard() {
        let p = PulseParams::two_pi_pulse(1.0, 5.0, 0.0).unwrap();
        let sched = PulseSchedule::single(p).unwrap();
        let err = propagate(
            &StateVector::spin_up(),
            &sched,
            &SystemParams::ideal(),
            &IntegratorOpts::fixed(0.05),
        );
        assert!(matches!(err, Err(Error::StepTooLarge { .. })));
        assert!(IntegratorOpts::with_resolution(0.2).grid(1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_unnormalized_input() {
        let sched = PulseSchedule::empty((0.0, 1.0)).unwrap();
        let psi = StateVector::new(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        assert!(propagate(&psi, &sched, &SystemParams::ideal(), &IntegratorOpts::default()).is_err());
    }

    #[test]
    fn trajectory_shape() {
        let p = PulseParams::two_pi_pulse(1.0, 1.0, 0.0).unwrap();
        let sched = PulseSchedule::single(p).unwrap();
        let opts = IntegratorOpts::fixed(0.01).with_stride(7);
        let traj = propagate(&StateVector::spin_up(), &sched, &SystemParams::ideal(), &opts).unwrap();
        assert_eq!(traj.times[0], sched.window().0);
        assert_eq!(*traj.times.last().unwrap(), sched.window().1);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.norms[0], 1.0);
        assert_eq!(traj.len(), traj.states.len());
        assert!(!traj.decay);
    }

    #[test]
    fn free_precession_is_cosine() {
        let wb = 0.0073;
        let s = SystemParams::precessing(wb).unwrap();
        let sched = PulseSchedule::empty((0.0, 300.0)).unwrap();
        let traj = propagate(&StateVector::spin_up(), &sched, &s, &IntegratorOpts::fixed(0.5)).unwrap();
        for (t, psi) in traj.times.iter().zip(&traj.states) {
            assert!((psi.z().norm_sqr() - (wb * t).cos().powi(2)).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn single_two_pi_pulse_returns_with_phase() {
        let p = PulseParams::two_pi_pulse(1.0, 0.8, 0.0).unwrap();
        let sched = PulseSchedule::single(p).unwrap();
        let psi = propagate_final(
            &StateVector::spin_up(),
            &sched,
            &SystemParams::ideal(),
            &IntegratorOpts::default(),
        )
        .unwrap();
        assert!((psi.z().norm() - 1.0).abs() < 1e-6);
        assert!((psi.z().arg() - overall_phase(1.0, 0.8)).abs() < 1e-6);
    }

    #[test]
    fn trion_decays_exponentially() {
        let s = SystemParams::new(0.0, Some(900.0), true).unwrap();
        let sched = PulseSchedule::empty((0.0, 1800.0)).unwrap();
        let traj = propagate(&StateVector::trion(), &sched, &s, &IntegratorOpts::fixed(1.0)).unwrap();
        assert!(traj.decay);
        for (t, n) in traj.times.iter().zip(&traj.norms) {
            assert!((n - (-t / 900.0).exp()).abs() < 1e-8, "t = {t}");
        }
        assert!(traj.norms.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn empty_schedule_gives_identity() {
        let sched = PulseSchedule::empty((-3.0, 40.0)).unwrap();
        let u = evolve_operator(&sched, &SystemParams::ideal(), &IntegratorOpts::default()).unwrap();
        assert_eq!(u, Matrix3c::identity());
        assert_eq!(truncate_qubit(&u), Matrix2c::identity());
    }

    #[test]
    fn resonant_pulse_flips_sign_of_z() {
        let p = PulseParams::two_pi_pulse(1.0, 0.0, 0.0).unwrap();
        let sched = PulseSchedule::single(p).unwrap();
        let u = evolve_operator(&sched, &SystemParams::ideal(), &IntegratorOpts::default()).unwrap();
        let q = truncate_qubit(&u);
        assert!((q[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((q[(1, 1)] - c(-1.0, 0.0)).norm() < 1e-6);
        assert!(q[(0, 1)].norm() < 1e-12 && q[(1, 0)].norm() < 1e-12);
    }

    #[test]
    fn truncation_keeps_upper_block() {
        let phi = 0.9;
        let u = Matrix3c::from_diagonal(&nalgebra::Vector3::new(
            c(1.0, 0.0),
            C64::from_polar(1.0, phi),
            c(0.3, 0.1),
        ));
        let q = truncate_qubit(&u);
        assert_eq!(
            q,
            Matrix2c::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), C64::from_polar(1.0, phi))
        );
    }
}

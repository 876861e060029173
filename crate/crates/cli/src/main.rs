#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod grid;

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::{json, Value};

use sechgate::fidelity::{fidelity_sweep, gate_report, GateParams, GateReport, IdealConvention};
use sechgate::model::{bandwidth_from_duration, larmor_from_field, PulseParams, StateVector, SystemParams};
use sechgate::phases::{sweep_ratio_with, Method, PhaseSettings};
use sechgate::propagator::{propagate, IntegratorOpts, Matrix2c, PulseSchedule, Trajectory};
use sechgate::pulsedesign::{default_spacing, design_for_angle_with, verify_cancellation, Branch};
use sechgate::Error;

const UNITS: &str = "Units: time in ps, angular frequencies in rad/ps, angles in rad, fields in T.";

#[derive(Parser)]
#[command(name = "sechgate", version, about = "Phases and gate fidelity of 2π sech-pulse spin rotations", after_help = UNITS)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Overall, dynamic and geometric phase of one 2π pulse over a grid of r = Ω/Δ (CSV).
    #[command(after_help = UNITS)]
    Phases(PhasesArgs),
    /// Two-pulse sequence whose dynamic phases cancel, for a target rotation angle (JSON).
    #[command(after_help = UNITS)]
    Design(DesignArgs),
    /// Simulated gate fidelity for a target angle (JSON), or a sweep over angles and fields (CSV).
    #[command(after_help = UNITS)]
    Fidelity(FidelityArgs),
    /// State trajectory for a pulse schedule (CSV).
    #[command(after_help = UNITS, args_override_self = true)]
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Analytic,
    Numeric,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum IdealArg {
    Interleaved,
    Bare,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BranchArg {
    Symmetric,
    Positive,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Initial {
    /// |z⟩
    Up,
    /// |z̄⟩
    Down,
    /// |τ⟩
    Trion,
    /// (|z̄⟩ + |z⟩)/√2
    Plus,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of standard output.
    #[arg(short, long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PhasesArgs {
    /// Ratios r = Ω/Δ (dimensionless): comma list, lin:a:b:n or log:a:b:n.
    /// A log grid with bounds of opposite sign is mirrored through zero.
    #[arg(long, allow_hyphen_values = true, default_value = "log:0.01:100:201")]
    ratios: String,
    /// Closed-form state, numerical propagation, or both.
    #[arg(long, value_enum, default_value = "analytic")]
    method: MethodArg,
    /// Magnetic field (T) for the numeric method.
    #[arg(long = "B", default_value_t = 0.0)]
    field: f64,
    /// Electron g factor magnitude (dimensionless).
    #[arg(long, default_value_t = 0.57)]
    g: f64,
    /// Pulse duration, FWHM of the sech envelope (ps); sets Ω = η.
    #[arg(long = "tau-d", default_value_t = 1.5)]
    tau_d: f64,
    /// Integration half-window in units of 1/Ω.
    #[arg(long, default_value_t = 20.0)]
    window: f64,
    /// Step size as a fraction of the fastest rate, dt·rate (dimensionless).
    #[arg(long, default_value_t = 1e-2)]
    resolution: f64,
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct DesignArgs {
    /// Target geometric rotation angle (rad), |angle| < π.
    #[arg(long, allow_hyphen_values = true)]
    angle: f64,
    /// Pulse duration, FWHM (ps).
    #[arg(long = "tau-d", default_value_t = 1.5)]
    tau_d: f64,
    /// Pulse center spacing (ps); default 14 pulse durations.
    #[arg(long)]
    spacing: Option<f64>,
    /// Solution branch: symmetric gives |r1| ≥ 1 with sign(r1) = sign(angle); positive gives r1 > 0.
    #[arg(long, value_enum, default_value = "symmetric")]
    branch: BranchArg,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct FidelityArgs {
    /// Target rotation angle (rad), |angle| ≤ π; ±π uses one resonant pulse.
    #[arg(long, allow_hyphen_values = true, required_unless_present = "sweep")]
    angle: Option<f64>,
    /// Magnetic field (T); a list or grid with --sweep.
    #[arg(long = "B", default_value = "0.29", allow_hyphen_values = true)]
    field: String,
    /// Electron g factor magnitude (dimensionless).
    #[arg(long, default_value_t = 0.57)]
    g: f64,
    /// Pulse duration, FWHM (ps).
    #[arg(long = "tau-d", default_value_t = 1.5)]
    tau_d: f64,
    /// Trion lifetime (ps), or "inf" to switch decay off.
    #[arg(long = "tau-t", default_value = "900")]
    tau_t: String,
    /// Pulse center spacing (ps); default 14 pulse durations.
    #[arg(long)]
    spacing: Option<f64>,
    /// Target operation: with free precession interleaved, or the bare rotation.
    #[arg(long, value_enum, default_value = "interleaved")]
    ideal: IdealArg,
    /// Solution branch of the pulse design, as for `design`.
    #[arg(long, value_enum, default_value = "symmetric")]
    branch: BranchArg,
    /// Step size as a fraction of the fastest rate, dt·rate (dimensionless).
    #[arg(long, default_value_t = 2e-3)]
    resolution: f64,
    /// Sweep angles × fields and write CSV `gamma,B,fidelity,population_loss`.
    #[arg(long)]
    sweep: bool,
    /// Angles (rad) for --sweep: comma list or lin:a:b:n.
    #[arg(long, allow_hyphen_values = true, default_value = "lin:-3:3:61")]
    angles: String,
    /// Output format for --sweep.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SimulateArgs {
    /// File of `key = value` lines using these flag names; flags on the command line take precedence.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Ratio r = Ω/Δ of each 2π pulse ("inf" is resonant); pulses follow each other at --spacing.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "angle")]
    ratios: Option<String>,
    /// Simulate the designed two-pulse sequence for this angle (rad) instead.
    #[arg(long, allow_hyphen_values = true)]
    angle: Option<f64>,
    /// Magnetic field (T).
    #[arg(long = "B", default_value_t = 0.0, allow_hyphen_values = true)]
    field: f64,
    /// Electron g factor magnitude (dimensionless).
    #[arg(long, default_value_t = 0.57)]
    g: f64,
    /// Pulse duration, FWHM (ps).
    #[arg(long = "tau-d", default_value_t = 1.5)]
    tau_d: f64,
    /// Trion lifetime (ps), or "inf" to switch decay off.
    #[arg(long = "tau-t", default_value = "inf")]
    tau_t: String,
    /// Pulse center spacing (ps); default 14 pulse durations.
    #[arg(long)]
    spacing: Option<f64>,
    /// Length of the run (ps) when there are no pulses.
    #[arg(long, default_value_t = 200.0)]
    duration: f64,
    /// Initial state.
    #[arg(long, value_enum, default_value = "up")]
    initial: Initial,
    /// Step size as a fraction of the fastest rate, dt·rate (dimensionless).
    #[arg(long, default_value_t = 2e-3)]
    resolution: f64,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 10)]
    stride: usize,
    #[command(flatten)]
    out: Output,
}

/// A failure and the exit status it maps to.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_)
            | Error::InvalidSchedule(_)
            | Error::ZeroRatio
            | Error::OutOfRange(_)
            | Error::StepTooLarge { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Numerical(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn emit(out: &Output, text: &str) -> Outcome {
    match &out.output {
        Some(path) => std::fs::write(path, text).map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Numerical(e.to_string()))
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn lifetime(s: &str) -> Result<Option<f64>, Failure> {
    let v = grid::number(s, true).map_err(usage)?;
    if v == f64::INFINITY {
        Ok(None)
    } else {
        Ok(Some(v))
    }
}

fn branch(b: BranchArg) -> Branch {
    match b {
        BranchArg::Symmetric => Branch::Symmetric,
        BranchArg::Positive => Branch::Positive,
    }
}

fn cmd_phases(a: PhasesArgs) -> Outcome {
    let ratios = grid::parse_list(&a.ratios, false).map_err(usage)?;
    let rabi = bandwidth_from_duration(a.tau_d)?;
    let system = SystemParams::precessing(larmor_from_field(a.field, a.g)?)?;
    let settings = PhaseSettings {
        rabi,
        window: a.window,
        opts: IntegratorOpts::with_resolution(a.resolution),
    };
    let methods: &[Method] = match a.method {
        MethodArg::Analytic => &[Method::Analytic],
        MethodArg::Numeric => &[Method::Numeric],
        MethodArg::Both => &[Method::Analytic, Method::Numeric],
    };
    let mut rows = Vec::new();
    for &m in methods {
        rows.extend(sweep_ratio_with(&ratios, m, &system, &settings)?);
    }
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("r,phi,alpha,gamma,method\n");
            for d in &rows {
                let _ = writeln!(s, "{},{},{},{},{}", fmt(d.ratio), fmt(d.overall), fmt(d.dynamic), fmt(d.geometric), d.method.as_str());
            }
            s
        }
        Format::Json => json_text(&Value::Array(
            rows.iter()
                .map(|d| json!({"r": d.ratio, "phi": d.overall, "alpha": d.dynamic, "gamma": d.geometric, "method": d.method.as_str()}))
                .collect(),
        )),
    };
    emit(&a.out, &text)
}

fn cmd_design(a: DesignArgs) -> Outcome {
    if !(a.angle.abs() < PI) {
        return Err(usage(format!(
            "angle {} rad is outside (−π, π); a π rotation is a single resonant 2π pulse (Δ = 0)",
            a.angle
        )));
    }
    let rabi = bandwidth_from_duration(a.tau_d)?;
    let spacing = a.spacing.unwrap_or_else(|| default_spacing(rabi));
    let pair = design_for_angle_with(a.angle, rabi, spacing, branch(a.branch))?;
    let residual = verify_cancellation(&pair, Method::Analytic, &SystemParams::ideal())?;
    let v = json!({
        "r1": pair.r1,
        "r2": pair.r2(),
        "delta1": pair.pulse1.detuning(),
        "delta2": pair.pulse2.detuning(),
        "gamma_tot": pair.total_geometric_phase(),
        "residual_dynamic_phase": residual,
    });
    emit(&a.out, &json_text(&v))
}

fn matrix_json(m: &Matrix2c) -> Value {
    let entry = |z: C64| json!([z.re, z.im]);
    json!([
        [entry(m[(0, 0)]), entry(m[(0, 1)])],
        [entry(m[(1, 0)]), entry(m[(1, 1)])]
    ])
}

fn report_json(r: &GateReport) -> Value {
    json!({
        "target": r.target,
        "B": r.field,
        "fidelity": r.fidelity,
        "residual_population": r.residual_population,
        "total_geometric_phase": r.total_geometric_phase,
        "pulses": r.pulses.iter().map(|p| json!({
            "rabi": p.rabi(),
            "detuning": p.detuning(),
            "center": p.center(),
        })).collect::<Vec<_>>(),
        "actual": matrix_json(&r.actual),
        "ideal": matrix_json(&r.ideal),
    })
}

fn cmd_fidelity(a: FidelityArgs) -> Outcome {
    let params = GateParams {
        g_factor: a.g,
        pulse_duration: a.tau_d,
        trion_lifetime: lifetime(&a.tau_t)?,
        spacing: a.spacing,
        decay: true,
        ideal: match a.ideal {
            IdealArg::Interleaved => IdealConvention::Interleaved,
            IdealArg::Bare => IdealConvention::Bare,
        },
        branch: branch(a.branch),
        opts: IntegratorOpts::with_resolution(a.resolution),
    };
    let fields = grid::parse_list(&a.field, false).map_err(usage)?;
    if fields.iter().any(|&b| b < 0.0) {
        return Err(usage("magnetic field must be non-negative"));
    }
    // validate the parameter set before any propagation
    params.bandwidth()?;
    params.spacing()?;
    params.system(fields[0])?;

    if !a.sweep {
        let [field] = fields[..] else {
            return Err(usage("--B takes a single value without --sweep"));
        };
        let angle = a.angle.expect("clap requires --angle without --sweep");
        if !(angle.abs() <= PI) {
            return Err(usage(format!("angle {angle} rad is outside [−π, π]")));
        }
        let report = gate_report(angle, field, &params)?;
        return emit(&a.out, &json_text(&report_json(&report)));
    }

    let angles = match a.angle {
        Some(g) => vec![g],
        None => grid::parse_list(&a.angles, false).map_err(usage)?,
    };
    if let Some(g) = angles.iter().find(|g| g.abs() > PI) {
        return Err(usage(format!("angle {g} rad is outside [−π, π]")));
    }
    let reports = fidelity_sweep(&angles, &fields, &params)?;
    let text = match a.format {
        Format::Csv => {
            let mut s = String::from("gamma,B,fidelity,population_loss\n");
            for r in &reports {
                let _ = writeln!(s, "{},{},{},{}", fmt(r.target), fmt(r.field), fmt(r.fidelity), fmt(r.residual_population));
            }
            s
        }
        Format::Json => json_text(&Value::Array(
            reports
                .iter()
                .map(|r| json!({"gamma": r.target, "B": r.field, "fidelity": r.fidelity, "population_loss": r.residual_population}))
                .collect(),
        )),
    };
    emit(&a.out, &text)
}

fn initial_state(i: Initial) -> StateVector {
    match i {
        Initial::Up => StateVector::spin_up(),
        Initial::Down => StateVector::spin_down(),
        Initial::Trion => StateVector::trion(),
        Initial::Plus => {
            let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            StateVector::new(a, a, C64::new(0.0, 0.0))
        }
    }
}

fn cmd_simulate(a: SimulateArgs) -> Outcome {
    let rabi = bandwidth_from_duration(a.tau_d)?;
    let system = SystemParams::new(larmor_from_field(a.field, a.g)?, lifetime(&a.tau_t)?, true)?;
    let spacing = a.spacing.unwrap_or_else(|| default_spacing(rabi));

    let pulses: Vec<PulseParams> = if let Some(angle) = a.angle {
        if !(angle.abs() < PI) {
            return Err(usage(format!("angle {angle} rad is outside (−π, π)")));
        }
        design_for_angle_with(angle, rabi, spacing, Branch::Symmetric)?
            .pulses()
            .to_vec()
    } else if let Some(spec) = &a.ratios {
        let ratios = grid::parse_list(spec, true).map_err(usage)?;
        ratios
            .iter()
            .enumerate()
            .map(|(k, &r)| {
                PulseParams::two_pi_pulse(rabi, if r.is_infinite() { 0.0 } else { rabi / r }, k as f64 * spacing)
            })
            .collect::<Result<_, _>>()?
    } else {
        Vec::new()
    };
    let sched = if pulses.is_empty() {
        if !(a.duration > 0.0) {
            return Err(usage("--duration must be positive"));
        }
        PulseSchedule::empty((0.0, a.duration))?
    } else {
        PulseSchedule::train(pulses)?
    };
    let opts = IntegratorOpts::with_resolution(a.resolution).with_stride(a.stride);
    let traj = propagate(&initial_state(a.initial), &sched, &system, &opts)?;
    emit(&a.out, &trajectory_csv(&traj))
}

fn trajectory_csv(traj: &Trajectory) -> String {
    let mut s = String::from("t,re_zbar,im_zbar,re_z,im_z,re_tau,im_tau,norm\n");
    for ((t, psi), n) in traj.times.iter().zip(&traj.states).zip(&traj.norms) {
        let _ = write!(s, "{}", fmt(*t));
        for c in [psi.zbar(), psi.z(), psi.tau()] {
            let _ = write!(s, ",{},{}", fmt(c.re), fmt(c.im));
        }
        let _ = writeln!(s, ",{}", fmt(*n));
    }
    s
}

fn report(kind: &str, msg: &str) {
    let color = std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stderr().is_terminal();
    if color {
        eprintln!("\x1b[1;31m{kind}:\x1b[0m {msg}");
    } else {
        eprintln!("{kind}: {msg}");
    }
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            report("error", &msg);
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Phases(a) => cmd_phases(a),
        Command::Design(a) => cmd_design(a),
        Command::Fidelity(a) => cmd_fidelity(a),
        Command::Simulate(a) => cmd_simulate(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            report("error", &msg);
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            report("numerical failure", &msg);
            ExitCode::from(1)
        }
    }
}

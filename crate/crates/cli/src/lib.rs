//! `qnd` command-line front end.

pub mod angle;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use qnd_core::circuit::{self, OutcomeRecord, SignalInput, SignalQubit};
use qnd_core::metrics::{self, TradeoffPoint};
use qnd_core::reference;
use qnd_core::report::{self, format_sig, CsvRow, SIGNIFICANT_DIGITS};
use qnd_core::{sampling, Execution, Regime};

use angle::{parse_angle, parse_grid, GridSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SPEC: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "qnd",
    version,
    about = "Entanglement-assisted nondemolition photon detection"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Heralded presence detection with the ancillas read in the D/A basis.
    Presence {
        #[command(flatten)]
        signal: SignalArgs,
        /// Send vacuum into the signal port.
        #[arg(long)]
        vacuum: bool,
        /// Drop the V -> -V correction and keep only equal-click coincidences.
        #[arg(long)]
        no_feed_forward: bool,
        #[command(flatten)]
        shots: ShotArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Weak measurement with the ancillas read in a basis rotated by phi.
    Weak {
        #[command(flatten)]
        signal: SignalArgs,
        #[arg(long, default_value = "pi/8", value_parser = parse_angle, allow_hyphen_values = true)]
        phi: f64,
        #[command(flatten)]
        shots: ShotArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Fidelity / information tradeoff as CSV over a grid of phi.
    Sweep {
        #[command(flatten)]
        signal: SignalArgs,
        /// start:stop:steps, steps >= 2.
        #[arg(long, default_value = "0:pi/4:33", value_parser = parse_grid, allow_hyphen_values = true)]
        phi_grid: GridSpec,
        /// Evaluate grid points on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Deterministic operation keeping double clicks.
    Deterministic {
        #[command(flatten)]
        signal: SignalArgs,
        /// Also print the fidelity averaged over Haar-random inputs.
        #[arg(long)]
        haar_average: bool,
        #[command(flatten)]
        shots: ShotArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the optical network against the ideal nondemolition unitary.
    Verify {
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        /// Number of additional Haar-random inputs.
        #[arg(long, default_value_t = 100)]
        random: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Resource comparison with two consecutive heralded CNOT gates.
    Compare {
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Signal polarization on the Bloch sphere: `α = cos(θ/2)`, `β = e^{i·phase} sin(θ/2)`.
#[derive(Debug, Args, Clone, Copy)]
pub struct SignalArgs {
    #[arg(long, default_value = "pi/2", value_parser = parse_angle, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value = "0", value_parser = parse_angle, allow_hyphen_values = true)]
    pub phase: f64,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ShotArgs {
    /// Emulate N detection runs; requires --seed.
    #[arg(long, requires = "seed", value_parser = clap::value_parser!(u64).range(1..))]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Presence,
    Weak,
    Sweep,
    Deterministic,
    Verify,
    Compare,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PhiSpec {
    Single(f64),
    Grid(GridSpec),
}

/// A validated run request.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSpec {
    pub mode: Mode,
    pub theta: f64,
    pub phase: f64,
    pub phi: Option<PhiSpec>,
    pub vacuum: bool,
    pub feed_forward: bool,
    pub haar_average: bool,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub execution: Execution,
    pub tolerance: f64,
    pub random: usize,
    pub out: Option<PathBuf>,
}

impl RunSpec {
    fn base(mode: Mode, out: OutputArgs) -> Self {
        RunSpec {
            mode,
            theta: std::f64::consts::FRAC_PI_2,
            phase: 0.0,
            phi: None,
            vacuum: false,
            feed_forward: true,
            haar_average: false,
            shots: None,
            seed: None,
            execution: Execution::default(),
            tolerance: 1e-10,
            random: 0,
            out: out.out,
        }
    }

    fn with_signal(mut self, s: SignalArgs) -> Self {
        self.theta = s.theta;
        self.phase = s.phase;
        self
    }

    fn with_shots(mut self, s: ShotArgs) -> Self {
        self.shots = s.shots;
        self.seed = s.seed;
        self
    }

    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let spec = match cli.command {
            Command::Presence {
                signal,
                vacuum,
                no_feed_forward,
                shots,
                output,
            } => RunSpec {
                vacuum,
                feed_forward: !no_feed_forward,
                ..Self::base(Mode::Presence, output)
                    .with_signal(signal)
                    .with_shots(shots)
            },
            Command::Weak {
                signal,
                phi,
                shots,
                output,
            } => RunSpec {
                phi: Some(PhiSpec::Single(phi)),
                ..Self::base(Mode::Weak, output)
                    .with_signal(signal)
                    .with_shots(shots)
            },
            Command::Sweep {
                signal,
                phi_grid,
                sequential,
                output,
            } => RunSpec {
                phi: Some(PhiSpec::Grid(phi_grid)),
                execution: if sequential {
                    Execution::Sequential
                } else {
                    Execution::default()
                },
                ..Self::base(Mode::Sweep, output).with_signal(signal)
            },
            Command::Deterministic {
                signal,
                haar_average,
                shots,
                output,
            } => RunSpec {
                haar_average,
                ..Self::base(Mode::Deterministic, output)
                    .with_signal(signal)
                    .with_shots(shots)
            },
            Command::Verify {
                tolerance,
                random,
                seed,
                output,
            } => RunSpec {
                tolerance,
                random,
                seed: Some(seed),
                ..Self::base(Mode::Verify, output)
            },
            Command::Compare { output } => Self::base(Mode::Compare, output),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.shots.is_some() && self.seed.is_none() {
            return Err(CliError::Spec("--shots requires --seed".into()));
        }
        if self.shots == Some(0) {
            return Err(CliError::Spec("--shots must be at least 1".into()));
        }
        if let Some(PhiSpec::Grid(g)) = self.phi {
            if g.steps < 2 {
                return Err(CliError::Spec("grid needs at least 2 steps".into()));
            }
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Spec("tolerance must be positive".into()));
        }
        if !self.theta.is_finite() || !self.phase.is_finite() {
            return Err(CliError::Spec("signal angles must be finite".into()));
        }
        Ok(())
    }

    pub fn qubit(&self) -> SignalQubit {
        SignalQubit::from_bloch(self.theta, self.phase)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(String),
    #[error("{0}")]
    Core(#[from] qnd_core::Error),
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(qnd_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) | CliError::Core(_) => EXIT_SPEC,
            CliError::Io { .. } => EXIT_IO,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

fn g(x: f64) -> String {
    format_sig(x, SIGNIFICANT_DIGITS)
}

fn qubit_line(q: &SignalQubit) -> String {
    let fmt = |z: qnd_core::C64| {
        let sign = if z.im < 0.0 { '-' } else { '+' };
        format!("{}{}{}i", g(z.re), sign, g(z.im.abs()))
    };
    format!("alpha {} beta {}", fmt(q.alpha()), fmt(q.beta()))
}

fn outcome_table(out: &mut String, outcomes: &[OutcomeRecord]) {
    let _ = writeln!(
        out,
        "{:<8} {:<12} {:<16} {:<10} {:<16} fidelity",
        "outcome", "class", "probability", "retained", "correction"
    );
    for o in outcomes {
        let _ = writeln!(
            out,
            "{:<8} {:<12} {:<16} {:<10} {:<16} {}",
            o.label,
            format!("{:?}", o.class),
            g(o.probability),
            o.retained,
            format!("{:?}", o.correction),
            o.fidelity.map_or_else(|| "-".to_string(), g)
        );
    }
}

fn shots_section(
    out: &mut String,
    spec: &RunSpec,
    outcomes: &[OutcomeRecord],
) -> Result<(), CliError> {
    if let (Some(shots), Some(seed)) = (spec.shots, spec.seed) {
        let table = sampling::sample_shots(outcomes, shots, seed)?;
        out.push('\n');
        out.push_str(&table.render());
    }
    Ok(())
}

/// Produces the text the run would emit. Deterministic for a given spec.
pub fn render(spec: &RunSpec) -> Result<String, CliError> {
    let mut out = String::new();
    match spec.mode {
        Mode::Presence => {
            let input = if spec.vacuum {
                SignalInput::Vacuum
            } else {
                SignalInput::Photon(spec.qubit())
            };
            let rep = circuit::detect_presence(&input, spec.feed_forward)?;
            let _ = writeln!(out, "regime presence feed_forward {}", spec.feed_forward);
            match input.qubit() {
                Some(q) => {
                    let _ = writeln!(out, "signal {}", qubit_line(q));
                }
                None => out.push_str("signal vacuum\n"),
            }
            outcome_table(&mut out, &rep.outcomes);
            let _ = writeln!(
                out,
                "coincidence_probability {}",
                g(rep.coincidence_probability)
            );
            let _ = writeln!(out, "success_probability {}", g(rep.success_probability));
            if let Some(f) = rep.min_retained_fidelity() {
                let _ = writeln!(out, "min_retained_fidelity {}", g(f));
            }
            shots_section(&mut out, spec, &rep.outcomes)?;
        }
        Mode::Weak => {
            let Some(PhiSpec::Single(phi)) = spec.phi else {
                return Err(CliError::Spec("weak needs --phi".into()));
            };
            let q = spec.qubit();
            let w = circuit::weak_measure(&q, phi)?;
            let sim = TradeoffPoint::simulated(&q, phi)?;
            let closed = TradeoffPoint::closed(&q, phi);
            let _ = writeln!(out, "regime weak phi {}", g(phi));
            let _ = writeln!(out, "signal {}", qubit_line(&q));
            let _ = writeln!(
                out,
                "coincidence_probability {}",
                g(w.coincidence_probability)
            );
            outcome_table(&mut out, &w.branches);
            let _ = writeln!(out, "{:<14} {:<16} closed_form", "metric", "simulated");
            for (name, s, c) in [
                ("fidelity", sim.fidelity, closed.fidelity),
                ("coherent_info", sim.i_c, closed.i_c),
                ("mutual_info", sim.i_mutual, closed.i_mutual),
                ("t_zz", sim.t_zz, closed.t_zz),
            ] {
                let _ = writeln!(out, "{:<14} {:<16} {}", name, g(s), g(c));
            }
            let _ = writeln!(out, "holevo {}", g(metrics::holevo_bound(&q)));
            shots_section(&mut out, spec, &w.branches)?;
        }
        Mode::Sweep => {
            let Some(PhiSpec::Grid(grid)) = spec.phi else {
                return Err(CliError::Spec("sweep needs --phi-grid".into()));
            };
            let q = spec.qubit();
            let holevo = metrics::holevo_bound(&q);
            let rows: Vec<CsvRow> = metrics::tradeoff_curve(&q, &grid.points(), spec.execution)?
                .iter()
                .map(|p| CsvRow::new(p, holevo))
                .collect();
            out = report::csv_string(&rows);
        }
        Mode::Deterministic => {
            let q = spec.qubit();
            let rep = circuit::deterministic_run(&q)?;
            let _ = writeln!(out, "regime deterministic");
            let _ = writeln!(out, "signal {}", qubit_line(&q));
            outcome_table(&mut out, &rep.outcomes);
            let _ = writeln!(out, "total_probability {}", g(rep.total_probability));
            let _ = writeln!(out, "average_fidelity {}", g(rep.average_fidelity));
            if spec.haar_average {
                let f = metrics::haar_average_fidelity(Regime::Deterministic)?;
                let _ = writeln!(out, "haar_average_fidelity {}", g(f));
            }
            shots_section(&mut out, spec, &rep.outcomes)?;
        }
        Mode::Verify => {
            let rep =
                reference::verify_with_random(spec.tolerance, spec.random, spec.seed.unwrap_or(0))
                    .map_err(|e| match e {
                        qnd_core::Error::VerificationFailure { .. } => CliError::Verification(e),
                        other => CliError::Core(other),
                    })?;
            let _ = writeln!(
                out,
                "{:<18} {:<16} {:<16} deviation",
                "input", "flip_probability", "coincidence"
            );
            for c in &rep.cases {
                let _ = writeln!(
                    out,
                    "{:<18} {:<16} {:<16} {}",
                    c.input,
                    g(c.flip_probability),
                    g(c.coincidence_probability),
                    g(c.deviation)
                );
            }
            let _ = writeln!(out, "max_deviation {}", g(rep.max_deviation));
            let _ = writeln!(out, "tolerance {}", g(rep.tolerance));
            out.push_str("verification passed\n");
        }
        Mode::Compare => {
            let r = reference::resource_comparison();
            let _ = writeln!(
                out,
                "entanglement_assisted_success {}",
                g(r.entanglement_assisted_success)
            );
            let _ = writeln!(out, "single_cnot_success {}", g(r.single_cnot_success));
            let _ = writeln!(
                out,
                "consecutive_cnot_success {}",
                g(r.consecutive_cnot_success)
            );
            let _ = writeln!(out, "success_ratio {}", g(r.ratio()));
            let _ = writeln!(out, "ancilla_photons {}", r.ancilla_photons);
        }
    }
    Ok(out)
}

/// Renders and writes to `spec.out` or standard output.
pub fn run(spec: &RunSpec) -> Result<(), CliError> {
    let text = render(spec)?;
    match &spec.out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = RunSpec::from_cli(cli).and_then(|spec| run(&spec));
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("qnd: {e}");
            e.exit_code()
        }
    }
}

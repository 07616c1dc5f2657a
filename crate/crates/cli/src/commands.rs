use std::f64::consts::PI;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use delay_margin::dde::{self, SimConfig, Trajectory, Verdict};
use delay_margin::kron::{self, KronOptions};
use delay_margin::matrix_io::parse_matrix;
use delay_margin::sweep::{analyze, find_crossings, DelayMargin};
use delay_margin::{Error, RetardedSystem};
use nalgebra::DMatrix;
use sha2::{Digest, Sha256};

use crate::args::{
    BaselineArgs, Command, Format, MemArgs, SimulateArgs, SweepArgs, SystemArgs, ValidateArgs,
};
use crate::report::{
    BaselineBody, CrossingsBody, MarginBody, MemBody, MemRow, ReportBody, ReportDocument,
    ReportHeader, SimulateBody, SystemFingerprint, ValidateBody, ValidationCheck, SCHEMA_VERSION,
};
use crate::CliError;

/// Factors applied to the margin by `validate`.
pub const VALIDATE_BELOW: f64 = 0.95;
pub const VALIDATE_ABOVE: f64 = 1.05;

/// Periods of the slowest crossing frequency simulated by `validate`.
pub const VALIDATE_PERIODS: f64 = 50.0;

pub struct Outcome {
    pub document: ReportDocument,
    /// Present for `simulate`; written instead of the body in CSV mode.
    pub trajectory: Option<Trajectory>,
}

impl Outcome {
    /// The rendered output for `format`.
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        Ok(match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.document)?;
                s.push('\n');
                s
            }
            Format::Text => crate::render::text(&self.document.body),
            Format::Csv => match &self.trajectory {
                Some(traj) => crate::render::trajectory_csv(traj).map_err(CliError::Output)?,
                None => crate::render::csv(&self.document.body)?,
            },
        })
    }

    /// Validation mismatch message, if any check failed.
    pub fn failure(&self) -> Option<String> {
        match &self.document.body {
            ReportBody::Validate(b) if !b.passed => Some(
                b.checks
                    .iter()
                    .filter(|c| !c.passed())
                    .map(|c| format!("tau {}: expected {:?}, got {:?}", c.tau, c.expected, c.observed))
                    .collect::<Vec<_>>()
                    .join("; "),
            ),
            _ => None,
        }
    }
}

/// Output format used when `--format` is absent.
pub fn default_format(cmd: &Command) -> Format {
    match cmd {
        Command::Simulate(_) => Format::Csv,
        Command::MemEstimate(_) => Format::Text,
        _ => Format::Json,
    }
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let (body, trajectory) = match cmd {
        Command::Margin(args) => (ReportBody::Margin(margin(args)?), None),
        Command::Crossings(args) => (ReportBody::Crossings(crossings(args)?), None),
        Command::Baseline(args) => (ReportBody::Baseline(baseline(args)?), None),
        Command::Simulate(args) => {
            let (body, traj) = simulate(args)?;
            (ReportBody::Simulate(body), Some(traj))
        }
        Command::MemEstimate(args) => (ReportBody::MemEstimate(mem_estimate(args)?), None),
        Command::Validate(args) => (ReportBody::Validate(validate(args)?), None),
    };
    let header = ReportHeader {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        generated_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        elapsed_seconds: started.elapsed().as_secs_f64(),
    };
    Ok(Outcome {
        document: ReportDocument {
            schema_version: SCHEMA_VERSION,
            header,
            body,
        },
        trajectory,
    })
}

fn read_hashed(path: &Path) -> Result<(DMatrix<f64>, String), Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let matrix = parse_matrix(&text, &path.display().to_string())?;
    Ok((matrix, digest))
}

pub fn load_system(args: &SystemArgs) -> Result<(RetardedSystem, SystemFingerprint), Error> {
    let (a0, a0_sha256) = read_hashed(&args.a0)?;
    let (a1, a1_sha256) = read_hashed(&args.a1)?;
    let sys = RetardedSystem::new(a0, a1)?;
    let fingerprint = SystemFingerprint {
        n: sys.dim(),
        a0_norm: sys.a0().norm(),
        a1_norm: sys.a1().norm(),
        a0_sha256,
        a1_sha256,
    };
    Ok((sys, fingerprint))
}

fn margin(args: &SweepArgs) -> Result<MarginBody, Error> {
    let (sys, system) = load_system(&args.system)?;
    let config = args.sweep.config(&sys);
    let report = analyze(&sys, &config)?;
    Ok(MarginBody {
        system,
        config,
        crossings: report.crossings,
        delay_margin: report.delay_margin,
        windows: report.windows,
        walk_horizon: report.walk_horizon,
    })
}

fn crossings(args: &SweepArgs) -> Result<CrossingsBody, Error> {
    let (sys, system) = load_system(&args.system)?;
    let config = args.sweep.config(&sys);
    let crossings = find_crossings(&sys, &config)?;
    Ok(CrossingsBody {
        system,
        config,
        crossings,
    })
}

fn baseline(args: &BaselineArgs) -> Result<BaselineBody, Error> {
    let (sys, system) = load_system(&args.system)?;
    let mut options = KronOptions::for_system(&sys);
    options.memory_cap = args.mem_cap;
    if let Some(eps) = args.eps_imag {
        options.eps_imag = eps;
    }
    let mut delays = Vec::new();
    let mut spurious_omegas = Vec::new();
    for omega in kron::kron_crossings(&sys, &options)? {
        match kron::delays_from_crossing(&sys, omega, args.k_max) {
            Ok(found) => delays.extend(found),
            Err(Error::SpuriousCrossing { omega }) => spurious_omegas.push(omega),
            Err(e) => return Err(e),
        }
    }
    delays.sort_by(|p, q| p.taus[0].total_cmp(&q.taus[0]));
    Ok(BaselineBody {
        system,
        options,
        k_max: args.k_max,
        companion_bytes: kron::estimate_memory(sys.dim() as u64, std::mem::size_of::<f64>() as u64),
        delays,
        spurious_omegas,
    })
}

fn simulate(args: &SimulateArgs) -> Result<(SimulateBody, Trajectory), Error> {
    let (sys, system) = load_system(&args.system)?;
    let mut config = dde::sim_config(&sys, args.tau, args.horizon);
    if let Some(dt) = args.dt {
        config.dt = dt;
    }
    if let Some(x0) = &args.x0 {
        config.x0 = x0.clone();
    }
    let traj = dde::simulate(&sys, &config)?;
    let body = SimulateBody {
        system,
        samples: traj.len(),
        diverged: traj.diverged(),
        final_time: *traj.times().last().expect("at least the initial sample"),
        final_state: traj.final_state().to_vec(),
        verdict: Verdict::from_trajectory(&traj),
        config,
    };
    Ok((body, traj))
}

fn mem_estimate(args: &MemArgs) -> Result<MemBody, Error> {
    let sizes: Vec<u64> = match (args.n, args.n_max) {
        (Some(n), _) => vec![n],
        (None, Some(max)) => {
            if args.n_step == 0 || args.n_min > max {
                return Err(Error::InvalidConfig(format!(
                    "empty range {}..={max} step {}",
                    args.n_min, args.n_step
                )));
            }
            (args.n_min..=max).step_by(args.n_step as usize).collect()
        }
        (None, None) => return Err(Error::InvalidConfig("--n or --n-max is required".into())),
    };
    Ok(MemBody {
        bytes_per_element: args.bytes,
        rows: sizes
            .into_iter()
            .map(|n| MemRow {
                n,
                bytes: kron::estimate_memory(n, args.bytes),
            })
            .collect(),
    })
}

fn validate(args: &ValidateArgs) -> Result<ValidateBody, Error> {
    let (sys, system) = load_system(&args.system)?;
    let config = args.sweep.config(&sys);
    let report = analyze(&sys, &config)?;
    let margin = MarginBody {
        system,
        config,
        crossings: report.crossings,
        delay_margin: report.delay_margin,
        windows: report.windows,
        walk_horizon: report.walk_horizon,
    };

    let DelayMargin::Finite(m) = margin.delay_margin else {
        return Ok(ValidateBody {
            margin,
            horizon: None,
            checks: Vec::new(),
            passed: true,
        });
    };
    let omega_min = margin
        .crossings
        .iter()
        .map(|c| c.omega_c)
        .fold(f64::INFINITY, f64::min);
    let horizon = args
        .horizon
        .unwrap_or(VALIDATE_PERIODS * 2.0 * PI / omega_min);

    let mut checks = Vec::new();
    for (factor, expected) in [(VALIDATE_BELOW, Verdict::Decaying), (VALIDATE_ABOVE, Verdict::Growing)] {
        let tau = factor * m;
        let cfg: SimConfig = dde::sim_config(&sys, tau, horizon);
        let observed = Verdict::from_trajectory(&dde::simulate(&sys, &cfg)?);
        checks.push(ValidationCheck {
            tau,
            dt: cfg.dt,
            expected,
            observed,
        });
    }
    let passed = checks.iter().all(ValidationCheck::passed);
    Ok(ValidateBody {
        margin,
        horizon: Some(horizon),
        checks,
        passed,
    })
}

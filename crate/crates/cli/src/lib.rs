//! Command-line front end for `aninorm-core`.
//!
//! Models are read from JSON files; results go to stdout or `--out` as JSON
//! or CSV. Failures are reported as `{"code", "message"}` on stderr with exit
//! status 1 for bad input and 2 for numerical failures.

pub mod model;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

use aninorm_core::aninorm::anisotropic_norm_dt;
use aninorm_core::statespace::singular_values_dt;
use aninorm_core::{
    anisotropic_norm_with, gain_limits, h2_dt, hinf_dt, mean_anisotropy, rms_gain, sweep, to_continuous, to_discrete,
    validate_solution, white_gain, worst_case_filter, CtStateSpace, DtStateSpace, Error, NormOptions, PhiGrid,
    SimConfig, SpectralDensity, TimeScale,
};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use model::{rows_of, Model, ModelFile};
use output::{csv, to_json};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Input(_) => "InputError",
            CliError::Io(_) => "IoError",
            CliError::Core(e) => e.code(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if !e.is_usage() => 2,
            _ => 1,
        }
    }
}

type Outcome = Result<String, CliError>;

#[derive(Parser)]
#[command(name = "aninorm", version, about = "Anisotropic norms of continuous-time systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Input {
    /// Continuous-time model (fields A, B, C, D)
    #[arg(long, value_name = "FILE")]
    ct: Option<PathBuf>,
    /// Discrete-time model (fields A_T, B_T, C_T, D_T)
    #[arg(long, value_name = "FILE")]
    dt: Option<PathBuf>,
}

#[derive(Args)]
struct Common {
    #[command(flatten)]
    input: Input,
    /// Time scale T of the low-pass filter
    #[arg(long = "T", value_name = "T")]
    t: Option<f64>,
    /// Output file; stdout when absent
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Level {
    /// Mean anisotropy level
    #[arg(long)]
    a: f64,
    /// Relative tolerance of the q search
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Map a continuous model to its discrete counterpart, or back with --inverse
    Convert {
        #[command(flatten)]
        common: Common,
        /// Discrete input, continuous output
        #[arg(long)]
        inverse: bool,
    },
    /// Anisotropic norm at one level
    Norm {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: Level,
    },
    /// Norm over a grid of levels as CSV (a,norm,q)
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Explicit comma-separated levels
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["a_max", "points"])]
        a: Option<Vec<f64>>,
        #[arg(long, default_value_t = 30.0)]
        a_max: f64,
        #[arg(long, default_value_t = 31)]
        points: usize,
    },
    /// Singular values of the discrete transfer function on the circle as CSV
    Sv {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// RMS gain under white noise or under a shaping filter
    Gain {
        #[command(flatten)]
        common: Common,
        /// Shaping filter model (continuous or discrete, square)
        #[arg(long, value_name = "FILE")]
        filter: Option<PathBuf>,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
    },
    /// H-infinity norm of the discrete counterpart
    Hinf {
        #[command(flatten)]
        common: Common,
    },
    /// H2 norm of the discrete counterpart
    H2 {
        #[command(flatten)]
        common: Common,
    },
    /// Worst-case shaping filter as JSON
    Worstcase {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: Level,
    },
    /// Monte Carlo check of the worst case as JSON
    Validate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        level: Level,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Steps per replica, burn-in included
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        replicas: usize,
    },
    /// Gain limits for very large and very small T
    Limits {
        #[command(flatten)]
        common: Common,
    },
}

fn read_model(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    ModelFile::parse(&text)
}

impl Common {
    fn time_scale(&self) -> Result<TimeScale, CliError> {
        let t = self.t.ok_or_else(|| CliError::Usage("--T is required".into()))?;
        Ok(TimeScale::new(t)?)
    }

    fn load(&self) -> Result<Model, CliError> {
        match (&self.input.ct, &self.input.dt) {
            (Some(p), _) => match read_model(p)? {
                m @ Model::Ct(_) => Ok(m),
                Model::Dt(_) => Err(CliError::Input("--ct expects fields A, B, C, D".into())),
            },
            (_, Some(p)) => match read_model(p)? {
                m @ Model::Dt(_) => Ok(m),
                Model::Ct(_) => Err(CliError::Input("--dt expects fields A_T, B_T, C_T, D_T".into())),
            },
            _ => Err(CliError::Usage("one of --ct or --dt is required".into())),
        }
    }

    /// The discrete system, converting at `T` when the input is continuous.
    fn discrete(&self) -> Result<DtStateSpace, CliError> {
        match self.load()? {
            Model::Ct(sys) => Ok(to_discrete(&sys, self.time_scale()?)?),
            Model::Dt(sys) => {
                sys.require_schur()?;
                Ok(sys)
            }
        }
    }

    /// The continuous system, converting back at `T` when the input is discrete.
    fn continuous(&self) -> Result<CtStateSpace, CliError> {
        match self.load()? {
            Model::Ct(sys) => {
                sys.require_hurwitz()?;
                Ok(sys)
            }
            Model::Dt(sys) => Ok(to_continuous(&sys, self.time_scale()?)?),
        }
    }
}

impl Level {
    fn options(&self) -> NormOptions {
        let mut opts = NormOptions::default();
        if let Some(tol) = self.tol {
            opts.tol = tol;
        }
        opts
    }
}

fn grid(n: usize) -> Result<PhiGrid, CliError> {
    Ok(PhiGrid::new(n)?)
}

fn system_json(sys: &DtStateSpace) -> Value {
    json!({
        "n": sys.n(), "m": sys.m(), "p": sys.p(),
        "A_T": rows_of(sys.a()), "B_T": rows_of(sys.b()), "C_T": rows_of(sys.c()), "D_T": rows_of(sys.d()),
    })
}

fn convert(common: &Common, inverse: bool) -> Outcome {
    let ts = common.time_scale()?;
    let file = match (common.load()?, inverse) {
        (Model::Ct(sys), false) => ModelFile::from_dt(&to_discrete(&sys, ts)?),
        (Model::Dt(sys), true) => ModelFile::from_ct(&to_continuous(&sys, ts)?),
        (Model::Ct(_), true) => return Err(CliError::Usage("--inverse takes a discrete model via --dt".into())),
        (Model::Dt(_), false) => return Err(CliError::Usage("a discrete model needs --inverse".into())),
    };
    Ok(to_json(&file))
}

fn norm(common: &Common, level: &Level) -> Outcome {
    let opts = level.options();
    let (sol, t) = match common.load()? {
        Model::Ct(sys) => {
            let ts = common.time_scale()?;
            (anisotropic_norm_with(&sys, ts, level.a, opts)?, Some(ts.t()))
        }
        Model::Dt(sys) => (anisotropic_norm_dt(&sys, level.a, opts)?, None),
    };
    Ok(to_json(&json!({
        "a": level.a,
        "T": t,
        "norm": sol.norm_value,
        "q": sol.q,
        "achieved_anisotropy": sol.achieved_anisotropy,
        "input_variance": sol.input_variance,
        "hinf": sol.diagnostics.hinf,
    })))
}

fn sweep_cmd(common: &Common, levels: &Option<Vec<f64>>, a_max: f64, points: usize) -> Outcome {
    let a_grid = match levels {
        Some(a) => a.clone(),
        None => {
            if points < 2 || !(a_max > 0.0) {
                return Err(CliError::Usage("--points must be at least 2 and --a-max positive".into()));
            }
            (0..points).map(|k| a_max * k as f64 / (points - 1) as f64).collect()
        }
    };
    let sys = common.continuous()?;
    let pts = sweep(&sys, common.time_scale()?, &a_grid)?;
    Ok(csv(&["a".into(), "norm".into(), "q".into()], pts.iter().map(|p| vec![p.a, p.norm, p.q])))
}

fn sv(common: &Common, n: usize) -> Outcome {
    let dt = common.discrete()?;
    let rows = singular_values_dt(&dt, &grid(n)?)?;
    let k = dt.m().min(dt.p());
    let mut header = vec!["phi".to_string()];
    header.extend((1..=k).map(|i| format!("sigma_{i}")));
    Ok(csv(
        &header,
        rows.into_iter().map(|(phi, s)| std::iter::once(phi).chain(s.into_iter().take(k)).collect()),
    ))
}

fn gain(common: &Common, filter: &Option<PathBuf>, n: usize) -> Outcome {
    let sys = common.continuous()?;
    let ts = common.time_scale()?;
    let g = grid(n)?;
    let (gain, aniso) = match filter {
        None => (white_gain(&sys, ts)?, 0.0),
        Some(path) => {
            let s = match read_model(path)? {
                Model::Ct(f) => SpectralDensity::RationalCt(f),
                Model::Dt(f) => SpectralDensity::RationalDt(f),
            };
            (rms_gain(&sys, &s, ts, g)?, mean_anisotropy(&s, ts, g)?)
        }
    };
    Ok(to_json(&json!({ "gain": gain, "mean_anisotropy": aniso })))
}

fn worstcase(common: &Common, level: &Level) -> Outcome {
    let sys = common.continuous()?;
    let ts = common.time_scale()?;
    let sol = anisotropic_norm_with(&sys, ts, level.a, level.options())?;
    let wc = worst_case_filter(&sys, ts, &sol)?;
    Ok(to_json(&json!({
        "a": level.a,
        "T": ts.t(),
        "q": sol.q,
        "norm": sol.norm_value,
        "L_T": rows_of(&sol.l_t),
        "M_T": rows_of(&sol.m_t),
        "P_T": rows_of(&sol.p_t),
        "filter": system_json(&wc.dt_filter()?),
        "L": rows_of(&wc.ct_l),
        "M": rows_of(&wc.ct_m),
    })))
}

fn validate(common: &Common, level: &Level, seed: u64, steps: usize, replicas: usize) -> Outcome {
    let sys = common.continuous()?;
    let ts = common.time_scale()?;
    let mut cfg = SimConfig::with_steps(steps);
    cfg.seed = seed;
    cfg.replicas = replicas;
    cfg.validate()?;
    let sol = anisotropic_norm_with(&sys, ts, level.a, level.options())?;
    let wc = worst_case_filter(&sys, ts, &sol)?;
    let report = validate_solution(&sys, ts, &sol, &wc, &cfg)?;
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name, "deviation": c.deviation, "bound": c.bound,
                "passed": c.passed, "wide_interval": c.wide_interval,
            })
        })
        .collect();
    let est = |e: &aninorm_core::Estimate| json!({ "value": e.value, "half_width": e.half_width });
    Ok(to_json(&json!({
        "a": level.a,
        "T": ts.t(),
        "norm": sol.norm_value,
        "q": sol.q,
        "seed": seed,
        "steps": cfg.steps,
        "burn_in": cfg.burn_in,
        "replicas": cfg.replicas,
        "passed": report.passed(),
        "wide_interval": report.wide_interval(),
        "checks": checks,
        "empirical_gain": est(&report.stats.empirical_gain),
        "var_input": est(&report.stats.var_input),
        "var_output": est(&report.stats.var_output),
        "isometry": est(&report.isometry),
    })))
}

fn limits(common: &Common) -> Outcome {
    let sys = common.continuous()?;
    let l = gain_limits(&sys)?;
    Ok(to_json(&json!({
        "limit_T_inf": l.limit_t_inf,
        "limit_T_zero": l.limit_t_zero,
        "small_T_coeff": l.small_t_coeff,
    })))
}

fn dispatch(cmd: &Command) -> Result<(String, Option<&Path>), CliError> {
    let (text, common) = match cmd {
        Command::Convert { common, inverse } => (convert(common, *inverse)?, common),
        Command::Norm { common, level } => (norm(common, level)?, common),
        Command::Sweep { common, a, a_max, points } => (sweep_cmd(common, a, *a_max, *points)?, common),
        Command::Sv { common, grid } => (sv(common, *grid)?, common),
        Command::Gain { common, filter, grid } => (gain(common, filter, *grid)?, common),
        Command::Hinf { common } => (to_json(&json!({ "hinf": hinf_dt(&common.discrete()?)? })), common),
        Command::H2 { common } => {
            let dt = common.discrete()?;
            let h2 = h2_dt(&dt)?;
            let scaled = if dt.m() > 0 { h2 / (dt.m() as f64).sqrt() } else { 0.0 };
            (to_json(&json!({ "h2": h2, "h2_scaled": scaled })), common)
        }
        Command::Worstcase { common, level } => (worstcase(common, level)?, common),
        Command::Validate { common, level, seed, steps, replicas } => {
            (validate(common, level, *seed, *steps, *replicas)?, common)
        }
        Command::Limits { common } => (limits(common)?, common),
    };
    Ok((text, common.out.as_deref()))
}

fn error_json(code: &str, message: &str) -> String {
    to_json(&json!({ "code": code, "message": message }))
}

/// Runs the command line with explicit output streams; returns the exit status.
pub fn run_with<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = stderr.write_all(error_json("UsageError", e.to_string().trim()).as_bytes());
            return 1;
        }
    };
    let result = dispatch(&cli.command).and_then(|(text, out)| match out {
        Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = stderr.write_all(error_json(e.code(), &e.to_string()).as_bytes());
            e.exit_code()
        }
    }
}

/// Runs the command line against the process streams.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

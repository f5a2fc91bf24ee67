//! The `gerstner` command line.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 constraint violation,
//! 4 numerical or I/O failure.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::analysis::{self, current_direction, ClassificationRecord};
use crate::error::Error;
use crate::fields::{self, VerificationGrid};
use crate::figures;
use crate::kinematics::{self, ParticleLabel};
use crate::numfmt::json_number;
use crate::params::{current_upper_bound, validate, ParamSpec, WaveParameters};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONSTRAINT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "gerstner",
    version,
    about = "Gerstner-type waves over a uniform current"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve a parameter set and report its derived constants and validation.
    Params {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Sample one particle path (or the free surface with --surface).
    Simulate {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        /// Label depth; defaults to the surface label b0.
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        /// Duration in orbit periods.
        #[arg(long, conflicts_with = "seconds")]
        periods: Option<f64>,
        /// Duration in seconds.
        #[arg(long)]
        seconds: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        /// Write the surface profile at t0 instead of a trajectory.
        #[arg(long)]
        surface: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the Euler equations and boundary conditions on a grid.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 20)]
        grid_x: usize,
        #[arg(long, default_value_t = 20)]
        grid_z: usize,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t: f64,
        /// Repeat at h/2 and h/4 and report observed orders.
        #[arg(long)]
        order_study: bool,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Classify particle paths at one or more label depths.
    Classify {
        #[command(flatten)]
        params: ParamArgs,
        /// Single label depth; defaults to b0.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "depths")]
        b: Option<f64>,
        /// Comma-separated label depths.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        depths: Option<Vec<f64>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the SVG panels of figure 1 (classical) or 2 (geophysical).
    Figures {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = figures::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

/// Parameters, inline or from a `key=value` file (not both).
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// key=value parameter file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// classical | geophysical
    #[arg(long)]
    pub regime: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub omega: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Uniform current.
    #[arg(long = "U", allow_hyphen_values = true)]
    pub current: Option<String>,
    /// lower | upper root of the dispersion relation for a given U.
    #[arg(long)]
    pub branch: Option<String>,
    /// +1 | -1, sign of m in the classical regime.
    #[arg(long, allow_hyphen_values = true)]
    pub sign_m: Option<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// A failed command: exit code plus message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn constraint(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONSTRAINT,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_USAGE,
            Error::NonConvergence { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONSTRAINT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_NUMERICAL,
            message: format!("I/O error: {e}"),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

impl ParamArgs {
    fn inline(&self) -> [(&'static str, &Option<String>); 11] {
        [
            ("regime", &self.regime),
            ("k", &self.k),
            ("b0", &self.b0),
            ("omega", &self.omega),
            ("g", &self.g),
            ("rho", &self.rho),
            ("p0", &self.p0),
            ("m", &self.m),
            ("U", &self.current),
            ("branch", &self.branch),
            ("sign_m", &self.sign_m),
        ]
    }

    pub fn spec(&self) -> std::result::Result<ParamSpec, Failure> {
        let given: Vec<_> = self
            .inline()
            .into_iter()
            .filter(|(_, v)| v.is_some())
            .collect();
        if let Some(path) = &self.config {
            if !given.is_empty() {
                return Err(Failure::usage(
                    "--config cannot be combined with inline parameter flags",
                ));
            }
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
            return Ok(ParamSpec::parse(&text)?);
        }
        let mut spec = ParamSpec::default();
        for (key, value) in given {
            spec.set(key, value.as_deref().unwrap_or_default())?;
        }
        Ok(spec)
    }
}

/// Resolves and validates; any violation refuses the command.
fn checked_params(args: &ParamArgs) -> std::result::Result<WaveParameters, Failure> {
    let params = args.spec()?.resolve()?;
    let violations = validate(&params);
    if !violations.is_empty() {
        let list: Vec<String> = violations
            .iter()
            .map(|v| format!("{}: {v}", v.code()))
            .collect();
        return Err(Failure::constraint(format!(
            "inconsistent parameters: {}",
            list.join("; ")
        )));
    }
    Ok(params)
}

fn require_format(
    given: Option<Format>,
    allowed: &[Format],
) -> std::result::Result<Format, Failure> {
    match given {
        None => Ok(allowed[0]),
        Some(f) if allowed.contains(&f) => Ok(f),
        Some(f) => Err(Failure::usage(format!(
            "format {f:?} is not available for this command"
        ))),
    }
}

/// Writes `bytes` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path.file_name().ok_or_else(|| {
        io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name")
    })?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = dir.join(tmp_name);
    let result = fs::File::create(&tmp).and_then(|mut f| {
        f.write_all(bytes)?;
        f.sync_all()
    });
    match result.and_then(|_| fs::rename(&tmp, path)) {
        Ok(()) => Ok(()),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

fn emit(output: &OutputArgs, text: &str, stdout: &mut dyn Write) -> io::Result<()> {
    match &output.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => stdout.write_all(text.as_bytes()),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

fn cmd_params(args: &ParamArgs, output: &OutputArgs, stdout: &mut dyn Write) -> CmdResult {
    require_format(output.format, &[Format::Json])?;
    let params = args.spec()?.resolve()?;
    let violations = validate(&params);
    let stagnation = if analysis::stagnation_check(&params) {
        json!({
            "speed": analysis::stagnation_speed(&params).ok().map(json_number),
            "note": "formal limit of the family: every particle moves horizontally at c",
        })
    } else {
        serde_json::Value::Null
    };
    let bound = (params.constants.omega > 0.0)
        .then(|| json_number(current_upper_bound(&params.constants, params.k)));
    let doc = json!({
        "params": params,
        "regime_constants": params.regime_constants(),
        "current_upper_bound": bound,
        "current_direction": current_direction(&params),
        "stagnation": stagnation,
        "valid": violations.is_empty(),
        "violations": violations,
    });
    emit(output, &to_json(&doc), stdout)?;
    Ok(if violations.is_empty() {
        EXIT_OK
    } else {
        EXIT_CONSTRAINT
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    args: &ParamArgs,
    a: f64,
    b: Option<f64>,
    t0: f64,
    periods: Option<f64>,
    seconds: Option<f64>,
    samples: usize,
    surface: bool,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> CmdResult {
    let format = require_format(output.format, &[Format::Csv, Format::Json])?;
    let params = checked_params(args)?;
    if surface {
        let points = kinematics::surface_samples(&params, t0, samples);
        let text = match format {
            Format::Json => to_json(&json!({
                "t": json_number(t0),
                "X": points.iter().map(|p| json_number(p.0)).collect::<Vec<_>>(),
                "eta": points.iter().map(|p| json_number(p.1)).collect::<Vec<_>>(),
            })),
            _ => {
                let mut buf = Vec::new();
                kinematics::write_surface_csv(&mut buf, t0, &points)?;
                String::from_utf8(buf).expect("ascii csv")
            }
        };
        emit(output, &text, stdout)?;
        return Ok(EXIT_OK);
    }

    let duration = match (periods, seconds) {
        (Some(n), None) => n * analysis::orbit_period(&params)?,
        (None, Some(s)) => s,
        (None, None) => analysis::orbit_period(&params)?,
        (Some(_), Some(_)) => return Err(Failure::usage("give --periods or --seconds, not both")),
    };
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(Failure::usage(format!(
            "duration must be positive, got {duration}"
        )));
    }
    let label = ParticleLabel::new(a, b.unwrap_or(params.b0));
    let path = kinematics::sample_trajectory(&params, label, t0, t0 + duration, samples)?;
    let text = match format {
        Format::Json => {
            let rows: Vec<_> = path
                .iter()
                .map(|s| {
                    let st = s.state;
                    json!({
                        "t": json_number(s.t), "X": json_number(st.x), "Z": json_number(st.z),
                        "u": json_number(st.u), "w": json_number(st.w),
                        "ax": json_number(st.ax), "az": json_number(st.az),
                    })
                })
                .collect();
            to_json(
                &json!({ "a": json_number(label.a), "b": json_number(label.b), "samples": rows }),
            )
        }
        _ => {
            let mut buf = Vec::new();
            kinematics::write_trajectory_csv(&mut buf, label, &path)?;
            String::from_utf8(buf).expect("ascii csv")
        }
    };
    emit(output, &text, stdout)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    args: &ParamArgs,
    grid_x: usize,
    grid_z: usize,
    h: f64,
    t: f64,
    order_study: bool,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> CmdResult {
    require_format(output.format, &[Format::Json])?;
    let params = checked_params(args)?;
    if grid_x == 0 || grid_z == 0 {
        return Err(Failure::usage("grid sizes must be positive"));
    }
    let mut grid = VerificationGrid::below_troughs(&params, grid_x, grid_z);
    grid.t = t;
    let (report, study) = if order_study {
        let steps = [h, h / 2.0, h / 4.0];
        let study = fields::order_study(&params, &grid, &steps)?;
        let finest = study.reports.last().cloned().expect("three reports");
        (finest, Some(study))
    } else {
        (fields::verify(&params, &grid, h)?, None)
    };
    let failed = report.failed_points
        + study
            .as_ref()
            .map_or(0, |s| s.reports.iter().map(|r| r.failed_points).sum());
    let mut doc = serde_json::to_value(&report).expect("serializable report");
    if let Some(study) = &study {
        let list = |v: &[f64]| v.iter().copied().map(json_number).collect::<Vec<_>>();
        doc["order_study"] = json!({
            "h": list(&study.steps),
            "momentum_x": list(&study.orders.momentum_x),
            "momentum_z": list(&study.orders.momentum_z),
            "divergence": list(&study.orders.divergence),
            "min_order": json_number(study.orders.min()),
            "maxima": study.reports.iter().map(|r| json!({
                "h": json_number(r.h),
                "momentum_x": json_number(r.momentum_x),
                "momentum_z": json_number(r.momentum_z),
                "divergence": json_number(r.divergence),
            })).collect::<Vec<_>>(),
        });
    }
    emit(output, &to_json(&doc), stdout)?;
    Ok(if failed > 0 { EXIT_NUMERICAL } else { EXIT_OK })
}

fn cmd_classify(
    args: &ParamArgs,
    b: Option<f64>,
    depths: Option<&[f64]>,
    output: &OutputArgs,
    stdout: &mut dyn Write,
) -> CmdResult {
    require_format(output.format, &[Format::Json])?;
    let params = checked_params(args)?;
    let depths: Vec<f64> = match (b, depths) {
        (_, Some(list)) => list.to_vec(),
        (Some(b), None) => vec![b],
        (None, None) => vec![params.b0],
    };
    let records = depths
        .iter()
        .map(|&b| analysis::classification_record(&params, b))
        .collect::<crate::Result<Vec<ClassificationRecord>>>()?;
    emit(output, &to_json(&records), stdout)?;
    Ok(EXIT_OK)
}

fn cmd_figures(
    which: u8,
    dir: &Path,
    samples: usize,
    format: Option<Format>,
    stdout: &mut dyn Write,
) -> CmdResult {
    require_format(format, &[Format::Svg])?;
    if samples < 2 {
        return Err(Failure::usage("need at least 2 samples per curve"));
    }
    fs::create_dir_all(dir)?;
    for (name, svg) in figures::render_figure(which, samples)? {
        let path = dir.join(name);
        write_atomic(&path, svg.as_bytes())?;
        writeln!(stdout, "{}", path.display())?;
    }
    Ok(EXIT_OK)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> CmdResult {
    match &cli.command {
        Command::Params { params, output } => cmd_params(params, output, stdout),
        Command::Simulate {
            params,
            a,
            b,
            t0,
            periods,
            seconds,
            samples,
            surface,
            output,
        } => cmd_simulate(
            params, *a, *b, *t0, *periods, *seconds, *samples, *surface, output, stdout,
        ),
        Command::Verify {
            params,
            grid_x,
            grid_z,
            h,
            t,
            order_study,
            output,
        } => cmd_verify(
            params,
            *grid_x,
            *grid_z,
            *h,
            *t,
            *order_study,
            output,
            stdout,
        ),
        Command::Classify {
            params,
            b,
            depths,
            output,
        } => cmd_classify(params, *b, depths.as_deref(), output, stdout),
        Command::Figures {
            which,
            out,
            samples,
            format,
        } => cmd_figures(*which, out, *samples, *format, stdout),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "gerstner: {}", f.message);
            f.code
        }
    }
}

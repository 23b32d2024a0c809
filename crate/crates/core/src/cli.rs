//! The `semimod` command line.
//!
//! Every subcommand writes only its records to stdout: one JSON object per
//! line with `"schema": 1` (the default), or plain text under
//! `--format human`. Diagnostics go to stderr. Exit codes are listed in
//! [`exit`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::gl2::{self, IntMat2};
use crate::lucas::{Kind, SequenceSpec};
use crate::poles::{pole_map, PoleRecord};
use crate::render::{self, Window};
use crate::series::{SeriesSpec, Variant};
use crate::symmetry::{check_identity, CheckConfig, IdentityKind};

pub mod exit {
    pub const OK: i32 = 0;
    /// A check ran and found a violation.
    pub const CHECK_FAILED: i32 = 1;
    pub const POLE_PROXIMITY: i32 = 2;
    pub const TOLERANCE_UNREACHABLE: i32 = 3;
    pub const USAGE: i32 = 64;
    pub const SOFTWARE: i32 = 70;
    pub const IO: i32 = 74;
}

pub const SCHEMA: u32 = 1;

/// Largest `n` accepted by `matrix --fib-power`.
pub const FIB_POWER_MAX: u64 = 100_000;

/// Upper index bound of the `(PS)^n` checks in `matrix --verify`.
pub const VERIFY_FIB_MAX: u64 = 50;

#[derive(Debug, Parser)]
#[command(
    name = "semimod",
    version,
    about = "Fibonacci- and Lucas-Eisenstein series toolkit"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Permit sequences with b != -1 (no certified tail bounds).
    #[arg(long, global = true)]
    pub uncertified: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    /// One JSON object per line.
    #[value(alias = "json-lines")]
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Standard,
    Footnote,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Footnote => Variant::Footnote,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityArg {
    /// `f(-1/z) = z^(2k) f(z)`.
    Inversion,
    /// `f(a - z) = f(z)`.
    Mirror,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the series at one point.
    Eval(EvalArgs),
    /// Check a transformation law at seeded sample points.
    Check(CheckArgs),
    /// List exact poles for an index range.
    Poles(PolesArgs),
    /// Verify generator relations or print a Fibonacci matrix power.
    Matrix(MatrixArgs),
    /// Render a domain-colouring image as binary PPM.
    Grid(GridArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Sequence: fib, lucas, lucas-first:A:B or lucas-second:A:B.
    #[arg(long, default_value = "fib", value_parser = parse_selector)]
    pub seq: SequenceSpec,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub weight: u32,
    /// Point as RE,IM.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
    pub z: Complex64,
    /// Bound on the truncation error.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub variant: VariantArg,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[arg(long, value_enum)]
    pub identity: IdentityArg,
    /// Sequence: fib, lucas, lucas-first:A:B or lucas-second:A:B.
    #[arg(long, default_value = "fib", value_parser = parse_selector)]
    pub seq: SequenceSpec,
    /// Half the weight.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Per-evaluation tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    /// Mirror centre parameter; defaults to the sequence's a.
    #[arg(long, allow_hyphen_values = true)]
    pub mirror_a: Option<i64>,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub variant: VariantArg,
}

#[derive(Debug, Args)]
pub struct PolesArgs {
    /// Sequence: fib, lucas, lucas-first:A:B or lucas-second:A:B.
    #[arg(long, default_value = "fib", value_parser = parse_selector)]
    pub seq: SequenceSpec,
    #[arg(long, allow_hyphen_values = true)]
    pub nmin: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub nmax: i64,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("mode").required(true).args(["verify", "fib_power"])))]
pub struct MatrixArgs {
    /// Check every generator relation exactly.
    #[arg(long)]
    pub verify: bool,
    /// Print (PS)^n.
    #[arg(long, value_parser = clap::value_parser!(u64).range(0..=FIB_POWER_MAX))]
    pub fib_power: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Sequence: fib, lucas, lucas-first:A:B or lucas-second:A:B.
    #[arg(long, default_value = "fib", value_parser = parse_selector)]
    pub seq: SequenceSpec,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub weight: u32,
    /// Region as x0,x1,y0,y1.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_window)]
    pub window: Window,
    /// Image size as WxH.
    #[arg(long, value_parser = parse_resolution)]
    pub res: (u32, u32),
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Standard)]
    pub variant: VariantArg,
}

/// Parses `fib`, `lucas`, `lucas-first:A:B` or `lucas-second:A:B`.
pub fn parse_selector(s: &str) -> Result<SequenceSpec, String> {
    match s {
        "fib" => return Ok(SequenceSpec::FIBONACCI),
        "lucas" => return Ok(SequenceSpec::LUCAS_NUMBERS),
        _ => {}
    }
    let parts: Vec<&str> = s.split(':').collect();
    let kind = match parts.first() {
        Some(&"lucas-first") => Kind::First,
        Some(&"lucas-second") => Kind::Second,
        _ => return Err(format!("unknown sequence selector '{s}'")),
    };
    if parts.len() != 3 {
        return Err(format!("expected {}:A:B, got '{s}'", parts[0]));
    }
    let int = |t: &str| {
        t.trim()
            .parse::<i64>()
            .map_err(|e| format!("bad integer '{t}' in '{s}': {e}"))
    };
    SequenceSpec::new(int(parts[1])?, int(parts[2])?, kind).map_err(|e| e.to_string())
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let values = s
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad number '{t}': {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let arr: [f64; N] = values
        .try_into()
        .map_err(|_| format!("expected {N} comma-separated numbers, got '{s}'"))?;
    if arr.iter().any(|v| !v.is_finite()) {
        return Err(format!("numbers must be finite, got '{s}'"));
    }
    Ok(arr)
}

pub fn parse_point(s: &str) -> Result<Complex64, String> {
    let [re, im] = parse_floats::<2>(s)?;
    Ok(Complex64::new(re, im))
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    let [x0, x1, y0, y1] = parse_floats::<4>(s)?;
    Window::new(x0, x1, y0, y1).map_err(|e| e.to_string())
}

pub fn parse_resolution(s: &str) -> Result<(u32, u32), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WxH, got '{s}'"))?;
    let dim = |t: &str| match t.trim().parse::<u32>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("bad dimension '{t}' in '{s}'")),
    };
    Ok((dim(w)?, dim(h)?))
}

/// Exit code for a library error.
pub fn error_code(e: &Error) -> i32 {
    match e {
        Error::PoleProximity { .. } => exit::POLE_PROXIMITY,
        Error::ToleranceUnreachable { .. } => exit::TOLERANCE_UNREACHABLE,
        Error::InvalidSequence(_)
        | Error::InvalidArgument(_)
        | Error::IndexCapExceeded { .. }
        | Error::OddWeight(_)
        | Error::InvalidPairing { .. }
        | Error::UncertifiedOnly => exit::USAGE,
        Error::RatioBoundUnavailable(_) | Error::MobiusPole => exit::SOFTWARE,
    }
}

/// Command failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: error_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: exit::IO,
            message: e.to_string(),
        }
    }
}

type CmdResult = std::result::Result<i32, Failure>;

/// Record sink for one invocation.
struct Emitter<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Emitter<'_> {
    /// Writes a record: `"schema"` and `"record"` lead, then `fields` in
    /// order. `human` is the plain-text rendering.
    fn emit(
        &mut self,
        record: &str,
        fields: Value,
        human: impl FnOnce() -> String,
    ) -> std::io::Result<()> {
        match self.format {
            Format::Json => {
                let mut map = serde_json::Map::new();
                map.insert("schema".into(), json!(SCHEMA));
                map.insert("record".into(), json!(record));
                if let Value::Object(rest) = fields {
                    map.extend(rest);
                }
                let line =
                    serde_json::to_string(&Value::Object(map)).map_err(std::io::Error::other)?;
                writeln!(self.out, "{line}")
            }
            Format::Human => writeln!(self.out, "{}", human()),
        }
    }
}

fn to_value(x: impl Serialize) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let info = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = if info {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return if info { exit::OK } else { exit::USAGE };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> CmdResult {
    let seq = match &cli.command {
        Command::Eval(a) => Some(a.seq),
        Command::Check(a) => Some(a.seq),
        Command::Poles(a) => Some(a.seq),
        Command::Grid(a) => Some(a.seq),
        Command::Matrix(_) => None,
    };
    if let Some(seq) = seq {
        if !seq.has_sign_symmetry() && !cli.uncertified {
            return Err(Failure {
                code: exit::USAGE,
                message: format!("sequence {seq} has b != -1; pass --uncertified to explore it"),
            });
        }
    }
    let mut em = Emitter {
        format: cli.format,
        out,
    };
    let code = match &cli.command {
        Command::Eval(a) => cmd_eval(a, &mut em)?,
        Command::Check(a) => cmd_check(a, &mut em)?,
        Command::Poles(a) => cmd_poles(a, &mut em)?,
        Command::Matrix(a) => cmd_matrix(a, &mut em)?,
        Command::Grid(a) => cmd_grid(a, &mut em)?,
    };
    em.out.flush()?;
    Ok(code)
}

fn cmd_eval(a: &EvalArgs, em: &mut Emitter) -> CmdResult {
    let spec = SeriesSpec::new(a.seq, a.weight, a.variant.into())?;
    let r = spec.evaluate(a.z, a.tol)?;
    em.emit(
        "eval",
        json!({
            "seq": a.seq.to_string(),
            "weight": a.weight,
            "z_re": a.z.re,
            "z_im": a.z.im,
            "value_re": r.value.re,
            "value_im": r.value.im,
            "tail_bound": r.tail_bound,
            "certified": r.certified,
            "j_min": r.j_min,
            "j_max": r.j_max,
        }),
        || {
            format!(
                "f({}, {}) = {:e} {:+e}i  tail <= {:e}  j in {}..={}  {}",
                a.z.re,
                a.z.im,
                r.value.re,
                r.value.im,
                r.tail_bound,
                r.j_min,
                r.j_max,
                if r.certified {
                    "certified"
                } else {
                    "uncertified"
                }
            )
        },
    )?;
    Ok(exit::OK)
}

fn cmd_check(a: &CheckArgs, em: &mut Emitter) -> CmdResult {
    let weight =
        a.k.checked_mul(2)
            .ok_or_else(|| Error::InvalidArgument(format!("k = {} is too large", a.k)))?;
    let spec = SeriesSpec::new(a.seq, weight, a.variant.into())?;
    let (kind, name) = match a.identity {
        IdentityArg::Inversion => (IdentityKind::InversionS, "inversion"),
        IdentityArg::Mirror => {
            let mirror_a = a.mirror_a.unwrap_or(a.seq.a());
            (IdentityKind::MirrorPa { a: mirror_a }, "mirror")
        }
    };
    let cfg = CheckConfig {
        n_samples: a.samples,
        seed: a.seed,
        tol: a.tol,
        allow_unpaired: a.mirror_a.is_some(),
    };
    let report = check_identity(&spec, kind, &cfg)?;
    for (i, ((z, res), tol)) in report
        .sample_points
        .iter()
        .zip(&report.residuals)
        .zip(&report.tolerances)
        .enumerate()
    {
        let ok = res <= tol;
        em.emit(
            "sample",
            json!({
                "index": i,
                "z_re": z.re,
                "z_im": z.im,
                "residual": res,
                "tolerance": tol,
                "pass": ok,
            }),
            || {
                format!(
                    "#{i:<4} z = {} {:+}i  residual {:e}  tolerance {:e}  {}",
                    z.re,
                    z.im,
                    res,
                    tol,
                    if ok { "ok" } else { "FAIL" }
                )
            },
        )?;
    }
    let mirror_a = match kind {
        IdentityKind::MirrorPa { a } => Some(a),
        IdentityKind::InversionS => None,
    };
    em.emit(
        "summary",
        json!({
            "identity": name,
            "mirror_a": mirror_a,
            "seq": a.seq.to_string(),
            "k": a.k,
            "samples": report.residuals.len(),
            "seed": report.seed,
            "tol": a.tol,
            "max_residual": report.max_residual(),
            "failures": report.failures(),
            "pass": report.pass,
        }),
        || {
            format!(
                "{name} on {} (k = {}): {} of {} samples fail, max residual {:e}, seed {}: {}",
                a.seq,
                a.k,
                report.failures(),
                report.residuals.len(),
                report.max_residual(),
                report.seed,
                if report.pass { "PASS" } else { "FAIL" }
            )
        },
    )?;
    Ok(if report.pass {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}

fn cmd_poles(a: &PolesArgs, em: &mut Emitter) -> CmdResult {
    let map = pole_map(&a.seq, a.nmin, a.nmax)?;
    for p in &map.poles {
        let rec = PoleRecord::from(p);
        let human = format!("{}  ~ {}", rec.fraction, rec.approx);
        em.emit("pole", to_value(&rec), || human)?;
    }
    em.emit(
        "accumulation_points",
        json!({ "values": map.accumulation_points }),
        || {
            let pts: Vec<String> = map
                .accumulation_points
                .iter()
                .map(|p| p.to_string())
                .collect();
            format!("accumulation points: {}", pts.join(", "))
        },
    )?;
    Ok(exit::OK)
}

fn matrix_fields(m: &IntMat2) -> Value {
    json!({
        "p": m.p.to_string(),
        "q": m.q.to_string(),
        "r": m.r.to_string(),
        "s": m.s.to_string(),
    })
}

fn cmd_matrix(a: &MatrixArgs, em: &mut Emitter) -> CmdResult {
    if let Some(n) = a.fib_power {
        let m = (IntMat2::p() * IntMat2::s()).power(n);
        let matches = m == gl2::fibonacci_matrix(n);
        let mut fields = json!({ "n": n });
        if let (Value::Object(f), Value::Object(entries)) = (&mut fields, matrix_fields(&m)) {
            f.extend(entries);
            f.insert("equals_fibonacci_matrix".into(), json!(matches));
        }
        em.emit("fib_power", fields, || format!("(PS)^{n} = {m}"))?;
        return Ok(if matches {
            exit::OK
        } else {
            exit::CHECK_FAILED
        });
    }
    let mut checks = gl2::generator_identities();
    let fib_ok = (0..=VERIFY_FIB_MAX).all(gl2::fib_matrix_check);
    checks.push((format!("(PS)^n=Fib(n) for 0<=n<={VERIFY_FIB_MAX}"), fib_ok));
    for (name, holds) in &checks {
        em.emit("identity", json!({ "name": name, "holds": holds }), || {
            format!("{name}: {}", if *holds { "holds" } else { "FAILS" })
        })?;
    }
    let all = checks.iter().all(|(_, h)| *h);
    Ok(if all { exit::OK } else { exit::CHECK_FAILED })
}

fn cmd_grid(a: &GridArgs, em: &mut Emitter) -> CmdResult {
    let spec = SeriesSpec::new(a.seq, a.weight, a.variant.into())?;
    let (w, h) = a.res;
    let bytes = render::render_ppm(&spec, &a.window, w, h)?;
    std::fs::write(&a.out, &bytes).map_err(|e| Failure {
        code: exit::IO,
        message: format!("cannot write {}: {e}", a.out.display()),
    })?;
    em.emit(
        "grid",
        json!({
            "seq": a.seq.to_string(),
            "weight": a.weight,
            "window": [a.window.x0, a.window.x1, a.window.y0, a.window.y1],
            "width": w,
            "height": h,
            "out": a.out.display().to_string(),
            "bytes": bytes.len(),
        }),
        || {
            format!(
                "wrote {}x{} image of {} to {}",
                w,
                h,
                a.window,
                a.out.display()
            )
        },
    )?;
    Ok(exit::OK)
}

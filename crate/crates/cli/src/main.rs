//! `radk`: point evaluation, grid scans, exponent fits, method cross-checks,
//! bound audits and transform checks for the radially deformed Fourier kernel.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use radkernel::KernelError;

use settings::ConfigFile;

pub const EXIT_PASS: u8 = 0;
pub const EXIT_VIOLATION: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ACCURACY: u8 = 3;

#[derive(Parser)]
#[command(name = "radk", version, about = "Evaluate and audit the radially deformed Fourier kernel K_a^m")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Kernel value at one point.
    Eval(Opts),
    /// Grid scan against a bound family.
    Scan(Opts),
    /// Slope of log sup_θ|K| against log z.
    Fit(Opts),
    /// Pairwise agreement of evaluation methods.
    Crosscheck(Opts),
    /// Bound audits.
    Audit {
        target: AuditTarget,
        #[command(flatten)]
        opts: Opts,
    },
    /// Apply the transform to e^{-|x|^a/a} and compare with its fixed point.
    Transform(Opts),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum AuditTarget {
    PrabhakarSector,
    HBound,
    KernelSector,
    Lemma31,
    Factorization,
}

#[derive(Args, Clone, Debug, Default)]
pub struct Opts {
    /// Deformation parameter (a real number or a fraction like 1/2).
    #[arg(long)]
    a: Option<String>,
    /// Dimension.
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    z: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    xi: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// auto, series, closed, laplace, integral, lift, neumann (comma list for scans).
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    z_min: Option<String>,
    #[arg(long)]
    z_max: Option<String>,
    #[arg(long)]
    z_count: Option<String>,
    #[arg(long)]
    z_log: bool,
    #[arg(long)]
    theta_count: Option<String>,
    /// CONST or POLY(β).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    exponent: Option<String>,
    /// Constant C checked against |K|/(1+z)^β.
    #[arg(long)]
    bound: Option<String>,
    /// Expected slope for `fit`; a miss beyond --expect-tol exits with 1.
    #[arg(long)]
    expect: Option<String>,
    #[arg(long)]
    expect_tol: Option<String>,
    /// Sector opening for the audits.
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Pole positions a_j for lemma31 (comma list).
    #[arg(long, allow_hyphen_values = true)]
    poles: Option<String>,
    /// Multiplicities α_j for lemma31 (comma list).
    #[arg(long)]
    mult: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    t_count: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags merged over the config file.
pub struct Ctx {
    merged: ConfigFile,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Ctx {
    fn new(o: &Opts) -> Result<Self, KernelError> {
        let mut lines = match &o.config {
            Some(path) => std::fs::read_to_string(path)
                .map_err(|e| KernelError::Usage(format!("cannot read config {}: {e}", path.display())))?,
            None => String::new(),
        };
        lines.push('\n');
        let flags = [
            ("a", &o.a),
            ("m", &o.m),
            ("z", &o.z),
            ("xi", &o.xi),
            ("theta", &o.theta),
            ("method", &o.method),
            ("tol", &o.tol),
            ("z-min", &o.z_min),
            ("z-max", &o.z_max),
            ("z-count", &o.z_count),
            ("theta-count", &o.theta_count),
            ("family", &o.family),
            ("exponent", &o.exponent),
            ("bound", &o.bound),
            ("expect", &o.expect),
            ("expect-tol", &o.expect_tol),
            ("mu", &o.mu),
            ("alpha", &o.alpha),
            ("beta", &o.beta),
            ("delta", &o.delta),
            ("poles", &o.poles),
            ("mult", &o.mult),
            ("p", &o.p),
            ("q", &o.q),
            ("t-count", &o.t_count),
        ];
        // later lines win, so flags are appended after the file
        for (k, v) in flags {
            if let Some(v) = v {
                lines.push_str(&format!("{k}={v}\n"));
            }
        }
        if o.z_log {
            lines.push_str("z-log=true\n");
        }
        let merged = ConfigFile::parse(&lines)?;
        let out = o.out.clone().or(merged.raw("out").map(PathBuf::from));
        let format = match o.format {
            Some(f) => f,
            None => match merged.raw("format") {
                Some("json") => Format::Json,
                Some("csv") | None => Format::Csv,
                Some(other) => return Err(KernelError::Usage(format!("unknown format '{other}'"))),
            },
        };
        let jobs = match o.jobs {
            Some(j) => Some(j),
            None => merged.get::<usize>("jobs")?,
        };
        if let Some(j) = jobs {
            // fails only if a pool already exists, which cannot happen here
            let _ = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global();
        }
        Ok(Ctx { merged, out, format })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.merged.raw(key)
    }

    pub fn real(&self, key: &str) -> Result<Option<f64>, KernelError> {
        self.raw(key).map(settings::parse_real).transpose()
    }

    pub fn real_or(&self, key: &str, default: f64) -> Result<f64, KernelError> {
        Ok(self.real(key)?.unwrap_or(default))
    }

    pub fn require(&self, key: &str) -> Result<f64, KernelError> {
        self.real(key)?.ok_or_else(|| KernelError::Usage(format!("--{key} is required")))
    }

    pub fn count_or(&self, key: &str, default: usize) -> Result<usize, KernelError> {
        Ok(self.merged.get::<usize>(key)?.unwrap_or(default))
    }

    pub fn flag(&self, key: &str) -> Result<bool, KernelError> {
        self.merged.flag(key)
    }
}

pub fn exit_code(e: &KernelError) -> u8 {
    match e {
        KernelError::Usage(_) | KernelError::Domain(_) => EXIT_USAGE,
        _ => EXIT_ACCURACY,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, run): (&Opts, Box<dyn Fn(&Ctx) -> Result<u8, KernelError>>) = match &cli.cmd {
        Cmd::Eval(o) => (o, Box::new(commands::eval)),
        Cmd::Scan(o) => (o, Box::new(commands::scan)),
        Cmd::Fit(o) => (o, Box::new(commands::fit)),
        Cmd::Crosscheck(o) => (o, Box::new(commands::crosscheck)),
        Cmd::Audit { target, opts } => {
            let t = *target;
            (opts, Box::new(move |c: &Ctx| commands::audit(t, c)))
        }
        Cmd::Transform(o) => (o, Box::new(commands::transform)),
    };
    let result = Ctx::new(opts).and_then(|ctx| run(&ctx));
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("radk: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

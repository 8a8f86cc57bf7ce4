//! Command-line front end for the `maxlat` engine.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use maxlat::descent::{self, Ground, SubsetMask};
use maxlat::exactpoly::{format_exp2, parse_exp2};
use maxlat::globalzeta::{self, GlobalKind, GlobalSpec};
use maxlat::latoracle::{self, GramLattice, DEFAULT_CAP};
use maxlat::localzeta::{self, DiscClass, LocalInvariants};
use maxlat::totalash::{self, TotalAshSpec};
use maxlat::{ash, verify};
use thiserror::Error;

pub mod config;
pub mod report;

use config::ConfigFile;
use report::*;

/// Environment variable holding the default precision in bits.
pub const PRECISION_ENV: &str = "MAXLAT_PRECISION";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Engine(#[from] maxlat::Error),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("configuration: {0}")]
    Config(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
    #[error("cannot encode JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for usage and configuration problems, 3 for resource limits and divergence.
    pub fn exit_code(&self) -> i32 {
        use maxlat::Error as E;
        match self {
            CliError::Engine(e) if e.is_resource_like() => 3,
            CliError::Engine(E::Usage(_) | E::Config(_) | E::Domain(_)) => 2,
            CliError::Engine(E::Precision(_) | E::Unsupported(_)) => 4,
            CliError::Io { .. } | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Latex,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Parser)]
#[command(name = "maxlat", version, about = "Counting maximal sublattices: exact local factors, global series and brute-force checks")]
pub struct Cli {
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// `key = value` file with defaults for format, precision-bits, prime-bound and cap.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, env = PRECISION_ENV)]
    pub precision_bits: Option<u32>,
    /// Largest prime in Euler products.
    #[arg(long, global = true)]
    pub prime_bound: Option<u64>,
    /// Node cap for brute-force enumeration.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descent polynomials and statistics for every K in [1, ℓ-1].
    DescentTables {
        #[arg(long)]
        ell: u32,
    },
    /// The polynomial W_ℓ^(ε)(X,T), or P_ℓ(q,u,T) term by term without --eps.
    Ash {
        #[arg(long)]
        ell: u32,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_eps)]
        eps: Option<i32>,
    },
    /// The total polynomial W^total for half-integers A, B.
    TotalAsh {
        #[arg(long)]
        ell: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// Also evaluate at X = p.
        #[arg(long)]
        p: Option<u64>,
    },
    /// A local factor and its expansion.
    LocalZeta(LocalZetaArgs),
    /// Dirichlet coefficients, pole data and partial sums of a global series.
    GlobalZeta(GlobalZetaArgs),
    /// Brute-force maximal sublattice counts for a Gram matrix.
    Count {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        max_norm: u32,
    },
    /// The symplectic elementary-divisor identity.
    Crosscheck {
        #[arg(long)]
        ell: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<u64>,
        /// Use the weights d·∏δ_j^{j+1} instead of the printed ones.
        #[arg(long)]
        corrected: bool,
    },
    /// Every module invariant plus the report of printed displays that disagree with the engine.
    VerifyIdentities {
        #[arg(long, default_value_t = 4)]
        max_ell: u32,
        /// Add brute-force verdicts to the report.
        #[arg(long)]
        oracle: bool,
    },
}

#[derive(Debug, Args)]
pub struct LocalZetaArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long, value_enum, default_value_t = LocalKindArg::Orthogonal)]
    pub kind: LocalKindArg,
    #[arg(long)]
    pub ell: Option<u32>,
    /// Dimension of the anisotropic kernel.
    #[arg(long, default_value_t = 0)]
    pub n0: u32,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    pub b: String,
    #[arg(long, default_value_t = 1)]
    pub f: u8,
    /// Dimension, for `gl` and `unramified`.
    #[arg(long)]
    pub n: Option<u32>,
    /// Discriminant class, for `unramified`.
    #[arg(long, value_enum)]
    pub class: Option<ClassArg>,
    /// Expansion up to index p^coeffs.
    #[arg(long, default_value_t = 10)]
    pub coeffs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LocalKindArg {
    Orthogonal,
    Symplectic,
    Gl,
    Unramified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Square,
    Nonsquare,
    OddN,
}

#[derive(Debug, Args)]
pub struct GlobalZetaArgs {
    #[arg(long)]
    pub kind: GlobalKind,
    #[arg(long)]
    pub n: u32,
    #[arg(long, allow_hyphen_values = true, default_value_t = 1)]
    pub disc: i64,
    /// Lines `p ell n0 A B f [orthogonal|symplectic]`.
    #[arg(long)]
    pub bad_primes: Option<PathBuf>,
    /// Print c(1), …, c(M).
    #[arg(long)]
    pub coeffs: Option<usize>,
    #[arg(long)]
    pub report_pole: bool,
    /// Compare Σ_{m<X} c(m) with the main term.
    #[arg(long)]
    pub partial_sum: Option<u64>,
    /// Evaluate the Euler correction at a rational s.
    #[arg(long)]
    pub s: Option<String>,
}

fn parse_eps(s: &str) -> Result<i32, String> {
    match s {
        "+1" | "1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("ε must be +1 or -1, got {s:?}")),
    }
}

/// Flags resolved against the config file and defaults.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliConfig {
    pub format: Format,
    pub precision_bits: u32,
    pub prime_bound: u64,
    pub cap: u64,
}

impl CliConfig {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let file = match &cli.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let cfg = CliConfig {
            format: cli.format.or(file.get("format")?).unwrap_or(Format::Text),
            precision_bits: cli.precision_bits.or(file.get("precision-bits")?).unwrap_or(globalzeta::MAX_PRECISION_BITS),
            prime_bound: cli.prime_bound.or(file.get("prime-bound")?).unwrap_or(1000),
            cap: cli.cap.or(file.get("cap")?).unwrap_or(DEFAULT_CAP),
        };
        if cfg.precision_bits == 0 {
            return Err(CliError::Config("precision must be at least 1 bit".into()));
        }
        if cfg.cap == 0 {
            return Err(CliError::Config("cap must be positive".into()));
        }
        Ok(cfg)
    }
}

/// Parses `argv`, runs one command and writes its document; returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn emit<R: Render>(doc: &R, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, doc)?;
            writeln!(out)?;
        }
        Format::Text => write!(out, "{}", doc.text())?,
        Format::Latex => write!(out, "{}", doc.latex())?,
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = CliConfig::resolve(cli)?;
    let f = cfg.format;
    match &cli.command {
        Command::DescentTables { ell } => emit(&descent_tables(*ell)?, f, out)?,
        Command::Ash { ell, eps } => emit(&ash_doc(*ell, *eps)?, f, out)?,
        Command::TotalAsh { ell, a, b, p } => emit(&total_ash_doc(*ell, a, b, *p)?, f, out)?,
        Command::LocalZeta(args) => emit(&local_zeta_doc(args)?, f, out)?,
        Command::GlobalZeta(args) => emit(&global_zeta_doc(args, &cfg)?, f, out)?,
        Command::Count { gram, p, max_norm } => {
            let g = GramLattice::load(gram)?;
            emit(&latoracle::count_maximal(&g, *p, *max_norm, cfg.cap)?, f, out)?
        }
        Command::Crosscheck { ell, m, corrected } => {
            let checks = m
                .iter()
                .map(|&m| if *corrected { latoracle::crosscheck_corrected(*ell, m) } else { latoracle::crosscheck_symplectic(*ell, m) })
                .collect::<Result<_, _>>()?;
            let weights = if *corrected { "d prod_j delta_j^(j+1)" } else { "d^(l(l-1)/2) prod_j delta_j^(j-l)" };
            emit(&CrosscheckDoc { weights: weights.into(), checks }, f, out)?
        }
        Command::VerifyIdentities { max_ell, oracle } => {
            let report = verify::verify_identities(*max_ell, *oracle)?;
            emit(&report, f, out)?;
            return Ok(if report.all_passed { 0 } else { 1 });
        }
    }
    Ok(0)
}

pub fn descent_tables(ell: u32) -> Result<DescentTables, CliError> {
    if ell == 0 || ell > descent::STANLEY_CAP {
        return Err(maxlat::Error::Usage(format!("descent tables need 1 ≤ ℓ ≤ {}", descent::STANLEY_CAP)).into());
    }
    let mut rows = Vec::new();
    for k in SubsetMask::all(ell, Ground::OneToLm1) {
        rows.push(DescentRow {
            ell,
            k: k.elements(),
            w: descent::w_poly(ell, &k)?,
            a_plus: descent::stat_a(ell, &k, 1)?,
            a_minus: descent::stat_a(ell, &k, -1)?,
            b: descent::stat_b(ell, &k),
        });
    }
    Ok(DescentTables { rows })
}

pub fn ash_doc(ell: u32, eps: Option<i32>) -> Result<AshDoc, CliError> {
    ash::AshSpec::new(ell, eps)?;
    Ok(match eps {
        Some(e) => AshDoc { ell, eps, polynomial: Some(ash::w_eps(ell, e)?), terms: None },
        None => AshDoc { ell, eps, polynomial: None, terms: Some(ash::p_total(ell)?) },
    })
}

pub fn total_ash_doc(ell: u32, a: &str, b: &str, p: Option<u64>) -> Result<TotalAshDoc, CliError> {
    let spec = TotalAshSpec::new(ell, parse_exp2(a)?, parse_exp2(b)?)?;
    let values = p
        .map(|p| totalash::w_total_at(&spec, p).map(|v| v.iter().map(|x| x.to_string()).collect()))
        .transpose()?;
    Ok(TotalAshDoc {
        ell,
        a: format_exp2(spec.a2),
        b: format_exp2(spec.b2),
        n: spec.n(),
        polynomial: totalash::w_total(&spec)?,
        p,
        values,
    })
}

pub fn local_zeta_doc(a: &LocalZetaArgs) -> Result<LocalZetaDoc, CliError> {
    let need = |v: Option<u32>, name: &str| v.ok_or_else(|| maxlat::Error::Usage(format!("--{name} is required for this kind")));
    let inv = match a.kind {
        LocalKindArg::Gl => None,
        LocalKindArg::Symplectic => Some(LocalInvariants::symplectic(a.p, need(a.ell, "ell")?)?),
        LocalKindArg::Orthogonal => Some(LocalInvariants::orthogonal(
            a.p,
            need(a.ell, "ell")?,
            a.n0,
            a.n0 as i64 - 2,
            parse_exp2(&a.b)?,
            a.f,
        )?),
        LocalKindArg::Unramified => {
            let class = match a.class {
                Some(ClassArg::Square) => DiscClass::Square,
                Some(ClassArg::Nonsquare) => DiscClass::Nonsquare,
                Some(ClassArg::OddN) => DiscClass::OddN,
                None => return Err(maxlat::Error::Usage("--class is required for unramified".into()).into()),
            };
            Some(localzeta::classify_unramified(a.p, need(a.n, "n")?, class)?)
        }
    };
    let factor = match &inv {
        Some(inv) => localzeta::local_factor(inv)?,
        None => localzeta::gl_local_factor(a.p, need(a.n, "n")?)?,
    };
    let series = factor.series(2 * a.coeffs)?.iter().map(|c| c.to_string()).collect();
    Ok(LocalZetaDoc { invariants: inv, factor, series })
}

pub fn global_zeta_doc(a: &GlobalZetaArgs, cfg: &CliConfig) -> Result<GlobalZetaDoc, CliError> {
    let bad = match &a.bad_primes {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            globalzeta::parse_bad_primes(&text)?
        }
        None => Default::default(),
    };
    let spec = GlobalSpec::new(a.kind, a.n, a.disc, bad, cfg.prime_bound, cfg.precision_bits)?;
    let want_pole = a.report_pole || (a.coeffs.is_none() && a.partial_sum.is_none() && a.s.is_none());
    let coeffs = a
        .coeffs
        .map(|m| {
            globalzeta::dirichlet_coeffs(&spec, m)
                .map(|d| (1..=m).map(|i| d.get(i).map(|c| c.to_string())).collect::<Vec<_>>())
        })
        .transpose()?;
    let pole = want_pole.then(|| globalzeta::pole_report(&spec)).transpose()?;
    let partial_sum = a.partial_sum.map(|x| globalzeta::partial_sum_check(&spec, x)).transpose()?;
    let correction = a
        .s
        .as_deref()
        .map(|s| -> Result<Correction, CliError> {
            let r = globalzeta::parse_rational(s)?;
            let (value, tail_bound) = globalzeta::euler_correction(&spec, r, spec.prime_bound)?;
            Ok(Correction { s: s.to_string(), value, tail_bound })
        })
        .transpose()?;
    Ok(GlobalZetaDoc { spec, coeffs, pole, partial_sum, correction })
}

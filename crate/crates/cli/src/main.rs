//! `s3tower`: certify infinite 3-class field towers of `Q(ω, ∛δ)`.
//!
//! Exit codes: 0 valid certificate (or successful report), 2 hypothesis
//! rejected, 3 inconclusive search, 64 usage error, 70 internal error.

mod inspect;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use s3tower::classgrp::{ClassGroupOptions, SearchBudget};
use s3tower::tower::{self, BaseField, CertifyOptions, Mode, Outcome};
use s3tower::Error;

const EXIT_REJECTED: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser, Debug)]
#[command(name = "s3tower", version, about = "Certify infinite 3-class field towers of Q(ω, ∛δ)")]
struct Cli {
    /// More diagnostics on standard error (-v info, -vv debug, -vvv trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Directory of the relation cache.
    #[arg(long, env = "S3TOWER_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,

    /// Recompute everything, ignoring and not writing the cache.
    #[arg(long, global = true)]
    no_cache: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Certify Q(ω, ∛δ) for a pair of primes p, q.
    Certify {
        #[arg(short)]
        p: u64,
        #[arg(short)]
        q: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Search primes q up to a bound and certify each hit.
    Search {
        #[arg(short)]
        p: u64,
        #[arg(long)]
        q_max: u64,
        /// Stop after this many certificates.
        #[arg(long, default_value_t = usize::MAX, hide_default_value = true)]
        count: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Report the arithmetic of a pure cubic or sextic field.
    Inspect {
        /// Q(∛m).
        #[arg(long, group = "field")]
        pure_cubic: Option<i64>,
        /// Q(ω, ∛m).
        #[arg(long, group = "field")]
        sextic: Option<i64>,
        /// Monic polynomial, coefficients from the constant term up (e.g. "1,1,1").
        #[arg(long, group = "field", value_delimiter = ',', allow_hyphen_values = true)]
        poly: Option<Vec<i64>>,
        /// Skip the class group.
        #[arg(long)]
        no_class_group: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Assume the ramified primes of H split completely in H(∛O_H^*), which
    /// lowers the class number threshold from 6 to 2.
    #[arg(long)]
    conditional: bool,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the result here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Dense-core norm bound for the relation search.
    #[arg(long)]
    core_bound: Option<u64>,

    /// Initial enumeration radius, as a multiple of the shortest vector.
    #[arg(long, default_value_t = 4)]
    radius: u32,

    /// Initial number of candidates per ideal.
    #[arg(long, default_value_t = 48)]
    candidates: usize,

    /// Stabilization rounds before giving up.
    #[arg(long, default_value_t = 6)]
    max_rounds: u32,

    /// Bits of the Minkowski form used by the search.
    #[arg(long, default_value_t = 64)]
    precision: u32,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

impl Common {
    fn mode(&self) -> Mode {
        if self.conditional {
            Mode::Conditional
        } else {
            Mode::Unconditional
        }
    }

    fn options(&self, cache_dir: Option<PathBuf>) -> Result<CertifyOptions, Error> {
        if self.radius == 0 || self.candidates == 0 || self.max_rounds == 0 || self.precision < 16 {
            return Err(Error::InvalidInput("budgets must be positive (precision at least 16 bits)".into()));
        }
        let budget = SearchBudget {
            core_bound: self.core_bound,
            radius_factor: self.radius,
            candidates: self.candidates,
            max_rounds: self.max_rounds,
            precision: self.precision,
            ..SearchBudget::default()
        };
        Ok(CertifyOptions { class_group: ClassGroupOptions { budget, cache_dir, bound: None } })
    }
}

fn default_cache_dir() -> Option<PathBuf> {
    std::env::var_os("XDG_CACHE_HOME")
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache")))
        .map(|d| d.join("s3tower"))
}

/// Writes via a temporary file in the target directory and a rename.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "output".into());
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

fn emit(output: &Option<PathBuf>, contents: &str) -> Result<(), Error> {
    match output {
        Some(path) => write_atomic(path, contents)?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(())
}

fn error_exit(e: &Error) -> ExitCode {
    match e {
        Error::InvalidInput(_) | Error::NotMonic(_) | Error::Reducible { .. } | Error::NotPrime(_) => {
            eprintln!("usage error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
        Error::Inconclusive(_) => {
            eprintln!("inconclusive: {e}");
            ExitCode::from(EXIT_INCONCLUSIVE)
        }
        _ => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}

fn certify(p: u64, q: u64, common: &Common, cache: Option<PathBuf>) -> Result<ExitCode, Error> {
    let opts = common.options(cache)?;
    match tower::build_certificate(p, q, common.mode(), &opts)? {
        Outcome::Certified(cert) => {
            let body = match common.format {
                Format::Json => cert.to_json(),
                Format::Text => tower::render_text(&cert),
            };
            emit(&common.output, &body)?;
            Ok(ExitCode::SUCCESS)
        }
        Outcome::Rejected(r) => {
            eprintln!("rejected at {}: {}", r.stage, r.reason);
            if common.format == Format::Json {
                emit(&common.output, &(serde_json::to_string_pretty(&r).expect("rejection serializes") + "\n"))?;
            }
            Ok(ExitCode::from(EXIT_REJECTED))
        }
    }
}

fn search(p: u64, q_max: u64, count: usize, common: &Common, cache: Option<PathBuf>) -> Result<ExitCode, Error> {
    if count == 0 {
        return Err(Error::InvalidInput("--count must be positive".into()));
    }
    let opts = common.options(cache)?;
    let base = BaseField::compute(p, &opts)?;
    let report = tower::search_q(&base, q_max, count, common.mode())?;
    let body = match common.format {
        Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
        Format::Text => {
            let mut s = String::new();
            for c in &report.certificates {
                s.push_str(&tower::render_text(c));
                s.push('\n');
            }
            s
        }
    };
    emit(&common.output, &body)?;
    eprintln!(
        "p = {}, h = {}: {} certificate(s) among {} primes q <= {} ({} passed the pre-filter); observed {} vs predicted density {}",
        report.p,
        report.h,
        report.certificates.len(),
        report.scanned,
        report.q_max,
        report.prefilter_passed,
        report.observed_rate,
        report.predicted_density
    );
    if let Some(r) = &report.rejection {
        eprintln!("rejected at {}: {}", r.stage, r.reason);
        return Ok(ExitCode::from(EXIT_REJECTED));
    }
    if report.certificates.is_empty() && !report.inconclusive.is_empty() {
        return Ok(ExitCode::from(EXIT_INCONCLUSIVE));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).target(env_logger::Target::Stderr).init();
    let cache = if cli.no_cache { None } else { cli.cache_dir.clone().or_else(default_cache_dir) };
    let result = match &cli.command {
        Command::Certify { p, q, common } => certify(*p, *q, common, cache),
        Command::Search { p, q_max, count, common } => search(*p, *q_max, *count, common, cache),
        Command::Inspect { pure_cubic, sextic, poly, no_class_group, common } => {
            let field = match (pure_cubic, sextic, poly) {
                (Some(m), None, None) => inspect::FieldSpec::PureCubic(*m),
                (None, Some(m), None) => inspect::FieldSpec::Sextic(*m),
                (None, None, Some(c)) => inspect::FieldSpec::Poly(c.clone()),
                _ => {
                    eprintln!("usage error: give exactly one of --pure-cubic, --sextic, --poly");
                    return ExitCode::from(EXIT_USAGE);
                }
            };
            common.options(cache).and_then(|opts| {
                let report = inspect::inspect(&field, !no_class_group, &opts.class_group)?;
                let body = match common.format {
                    Format::Json => serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                    Format::Text => inspect::render(&report),
                };
                emit(&common.output, &body)?;
                Ok(ExitCode::SUCCESS)
            })
        }
    };
    result.unwrap_or_else(|e| error_exit(&e))
}

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use parastat::algebra::{AlgebraSpec, ModeIndex, Monomial};
use parastat::error::{Error, Result};
use parastat::gram::{
    generic_words, gram_generic, left_invariance_check, regular_decompose, RegularDecomposition,
};
use parastat::linalg::RationalMatrix;
use parastat::presets::{FVariant, PresetId, PresetParams};
use parastat::rational::parse_rational;
use parastat::report::{self, build_report, emit, Format, SectionName, SCHEMA_VERSION};

const EXIT_ARGS: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "parastat",
    version,
    about = "Exact Fock-space statistics of para-type algebras"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a statistics report.
    Report(ReportArgs),
    /// Generic Gram matrix of distinct modes and its permutation decomposition.
    Gram(GramArgs),
    /// Triple-relation and transition-expansion checks only.
    Verify(VerifyArgs),
    /// Print the algebra definition of a preset as JSON.
    Spec(SpecArgs),
}

#[derive(Args, Clone)]
struct AlgebraArgs {
    /// Preset name, e.g. palev-fermi.
    #[arg(long, conflicts_with = "spec")]
    preset: Option<String>,
    /// Algebra definition file (JSON) instead of a preset.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    p: Option<u32>,
    /// Rational deformation parameter, e.g. 1/2.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    /// +1 or -1.
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<i8>,
    #[arg(long)]
    mb: Option<usize>,
    #[arg(long)]
    mf: Option<usize>,
    /// affine or step.
    #[arg(long)]
    variant: Option<FVariant>,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long, default_value_t = 3)]
    max_n: usize,
    /// Comma-separated subset of dimensions,haldane,positivity,diagnostics,verify.
    #[arg(long, value_delimiter = ',')]
    sections: Option<Vec<String>>,
    #[arg(long, default_value = "json")]
    format: String,
    /// Output file (json) or directory (csv); json goes to stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include per-section wall-clock times (makes output non-reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct GramArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long)]
    modes: Option<usize>,
    /// Distinct mode indices, e.g. 1,2,3.
    #[arg(long, value_delimiter = ',', required = true)]
    indices: Vec<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpecArgs {
    #[command(flatten)]
    algebra: AlgebraArgs,
    #[arg(long)]
    modes: Option<usize>,
}

#[derive(Serialize)]
struct GramOutput {
    schema_version: u32,
    preset: Option<String>,
    indices: Vec<usize>,
    words: Vec<Monomial>,
    matrix: RationalMatrix,
    left_invariant: bool,
    decomposition: RegularDecomposition,
}

#[derive(Serialize)]
struct VerifyOutput {
    schema_version: u32,
    preset: Option<String>,
    verification: report::Verification,
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::GuardExceeded { .. } => EXIT_GUARD,
            Error::SymmetryViolation { .. } => EXIT_INCONSISTENT,
            Error::Io(_) => 1,
            _ => EXIT_ARGS,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn resolve(
    args: &AlgebraArgs,
    modes: Option<usize>,
    min_max_n: usize,
) -> Result<(AlgebraSpec, Option<PresetId>)> {
    let (spec, preset) = match (&args.preset, &args.spec) {
        (Some(name), None) => {
            let params = PresetParams {
                p: args.p,
                q: args.q.as_deref().map(parse_rational).transpose()?,
                sign: args.sign,
                mb: args.mb,
                mf: args.mf,
                variant: args.variant,
            };
            let id = PresetId::parse(name, &params)?;
            id.validate()?;
            let modes = match (id.fixed_modes(), modes) {
                (Some(fixed), Some(m)) if fixed != m => {
                    return Err(Error::InvalidParameter(format!(
                        "{id} has {fixed} modes, not {m}"
                    )))
                }
                (Some(fixed), _) => fixed,
                (None, Some(m)) => m,
                (None, None) => return Err(Error::InvalidParameter("--modes is required".into())),
            };
            (id.build(modes)?, Some(id))
        }
        (None, Some(path)) => {
            let spec: AlgebraSpec = serde_json::from_str(&fs::read_to_string(path)?)?;
            if modes.is_some_and(|m| m != spec.modes()) {
                return Err(Error::InvalidParameter(
                    "--modes disagrees with the spec file".into(),
                ));
            }
            (spec, None)
        }
        _ => {
            return Err(Error::InvalidParameter(
                "give exactly one of --preset or --spec".into(),
            ))
        }
    };
    let max_n = spec.max_n().max(min_max_n);
    Ok((spec.with_max_n(max_n)?, preset))
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            fs::write(path, text)?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run_report(a: ReportArgs) -> std::result::Result<u8, Failure> {
    let format: Format = a.format.parse()?;
    let sections: Vec<SectionName> = match &a.sections {
        None => SectionName::ALL.to_vec(),
        Some(v) => v
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.parse())
            .collect::<Result<_>>()?,
    };
    let (spec, preset) = resolve(&a.algebra, a.modes, a.max_n)?;
    let r = build_report(&spec, preset.as_ref(), a.max_n, &sections, a.timing);
    match (format, &a.out) {
        (Format::Csv, None) => {
            return Err(Error::InvalidParameter("csv output needs --out".into()).into())
        }
        (_, Some(path)) => emit(&r, format, path)?,
        (Format::Json, None) => write_out(None, &report::to_json(&r)?)?,
    }
    Ok(if r.symmetry_violation() {
        EXIT_INCONSISTENT
    } else if r.guard_exceeded() {
        EXIT_GUARD
    } else {
        0
    })
}

fn run_gram(a: GramArgs) -> std::result::Result<u8, Failure> {
    let modes = a.modes.or_else(|| a.indices.iter().max().copied());
    let (spec, preset) = resolve(&a.algebra, modes, a.indices.len())?;
    let indices: Vec<ModeIndex> = a
        .indices
        .iter()
        .map(|&k| spec.mode(k))
        .collect::<Result<_>>()?;
    let n = indices.len();
    let matrix = gram_generic(&spec, &indices)?;
    let out = GramOutput {
        schema_version: SCHEMA_VERSION,
        preset: preset.map(|p| p.to_string()),
        indices: a.indices.clone(),
        words: generic_words(&indices)?,
        left_invariant: left_invariance_check(&matrix, n)?,
        decomposition: regular_decompose(&matrix, n)?,
        matrix,
    };
    let symmetric = out.matrix.is_symmetric();
    write_out(
        a.out.as_ref(),
        &(serde_json::to_string_pretty(&out).map_err(Error::from)? + "\n"),
    )?;
    Ok(if symmetric { 0 } else { EXIT_INCONSISTENT })
}

fn run_verify(a: VerifyArgs) -> std::result::Result<u8, Failure> {
    let (spec, preset) = resolve(&a.algebra, a.modes, report::VERIFY_N_MAX + 2)?;
    let verification = report::verification(&spec, preset.as_ref());
    let holds = verification.holds();
    let out = VerifyOutput {
        schema_version: SCHEMA_VERSION,
        preset: preset.map(|p| p.to_string()),
        verification,
    };
    write_out(
        a.out.as_ref(),
        &(serde_json::to_string_pretty(&out).map_err(Error::from)? + "\n"),
    )?;
    Ok(if holds { 0 } else { EXIT_INCONSISTENT })
}

fn run_spec(a: SpecArgs) -> std::result::Result<u8, Failure> {
    let (spec, _) = resolve(&a.algebra, a.modes, 0)?;
    write_out(
        None,
        &(serde_json::to_string_pretty(&spec).map_err(Error::from)? + "\n"),
    )?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Report(a) => run_report(a),
        Command::Gram(a) => run_gram(a),
        Command::Verify(a) => run_verify(a),
        Command::Spec(a) => run_spec(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("parastat: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

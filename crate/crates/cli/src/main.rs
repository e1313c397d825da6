//! `ggm`: command-line front end for ggm-core.

mod figures;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use ggm_core::roof::families::parse_family_spec;
use ggm_core::roof::{ggm_mixed, simplex_grid, MixedOptions, TwirledFamily, PHASE_SEED};
use ggm_core::states::parse_state_spec;
use ggm_core::twirl::{check_group, parse_group_spec, GROUP_TOL};
use ggm_core::{ggm_pure, GgmError};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ggm", version, about = "Generalized geometric measure of multiparty entanglement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pure-state GGM of a state spec, printed as JSON.
    Pure {
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Phase-minimized and convexified GGM surface of a family spec, as CSV.
    Mixed {
        family: PathBuf,
        /// Points per simplex axis.
        #[arg(long, default_value_t = 101, value_parser = grid_size)]
        grid: usize,
        #[arg(long, default_value_t = PHASE_SEED)]
        seed: u64,
        /// Tolerance for the preimage check run before the surface.
        #[arg(long, default_value_t = GROUP_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Group axioms for a group spec, or group plus invariance and preimage
    /// checks for a family spec.
    VerifyGroup {
        spec: PathBuf,
        #[arg(long, default_value_t = GROUP_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Data behind figure 1..=8.
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=8))]
        number: u8,
        #[arg(long, value_parser = grid_size)]
        grid: Option<usize>,
        #[arg(long, default_value_t = PHASE_SEED)]
        seed: u64,
        #[arg(long)]
        alpha: Option<f64>,
        /// Slice ratio x2/(1 - x1) for figure 4; repeatable.
        #[arg(long)]
        r: Vec<f64>,
        /// Defaults to fig<N>.csv in the working directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn grid_size(s: &str) -> Result<usize, String> {
    let n: usize = s.parse().map_err(|e| format!("{e}"))?;
    if n < 11 {
        return Err(format!("grid resolution must be at least 11, got {n}"));
    }
    Ok(n)
}

/// Failure of a check, as opposed to bad input.
#[derive(Debug)]
struct VerificationFailed(String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if is_verification_failure(&e) {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn is_verification_failure(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<VerificationFailed>().is_some()
            || matches!(
                c.downcast_ref::<GgmError>(),
                Some(GgmError::NotInvariant(_) | GgmError::PreimageFailed(_))
            )
    })
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes via a temporary file in the target directory, then renames.
fn write_atomic(path: &Path, contents: &str) -> anyhow::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => write_atomic(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Pure { state, out } => {
            let s = parse_state_spec(&read(&state)?).with_context(|| format!("parsing {}", state.display()))?;
            emit(out.as_deref(), &to_json(&ggm_pure(&s))?)
        }
        Command::Mixed {
            family,
            grid,
            seed,
            tol,
            out,
        } => {
            let fam = load_family(&family)?;
            let verdict = fam.verify_preimage(&centroid(&fam))?;
            if verdict.max_deviation > tol {
                return Err(VerificationFailed(format!(
                    "preimage check deviation {:e} exceeds tolerance {tol:e}",
                    verdict.max_deviation
                ))
                .into());
            }
            let points = simplex_grid(fam.param_dim(), grid)?;
            let surface = ggm_mixed(&fam, &points, MixedOptions { seed, ..Default::default() })?;
            emit(out.as_deref(), &surface.to_csv())
        }
        Command::VerifyGroup { spec, tol, out } => verify_group(&spec, tol, out.as_deref()),
        Command::Figure {
            number,
            grid,
            seed,
            alpha,
            r,
            out,
        } => {
            if let Some(a) = alpha {
                if !(0.0..=1.0).contains(&a) {
                    bail!("--alpha must lie in [0, 1], got {a}");
                }
            }
            let args = figures::FigureArgs { grid, alpha, r, seed };
            let csv = figures::figure_csv(number, &args)?;
            let path = out.unwrap_or_else(|| PathBuf::from(format!("fig{number}.csv")));
            write_atomic(&path, &csv)?;
            let d = &figures::DEFAULTS[usize::from(number) - 1];
            eprintln!("figure {} ({}): wrote {}", d.figure, d.family, path.display());
            Ok(())
        }
    }
}

fn load_family(path: &Path) -> anyhow::Result<TwirledFamily> {
    parse_family_spec(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn centroid(f: &TwirledFamily) -> Vec<f64> {
    let k = f.param_dim();
    vec![1.0 / (k + 1) as f64; k]
}

#[derive(Serialize)]
struct GroupResult {
    order: usize,
    identity_deviation: f64,
    closure_deviation: f64,
    inverse_deviation: f64,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<FamilyResult>,
}

#[derive(Serialize)]
struct FamilyResult {
    name: String,
    params: Vec<f64>,
    invariance_deviation: f64,
    preimage_deviation: f64,
    passed: bool,
}

fn verify_group(spec: &Path, tol: f64, out: Option<&Path>) -> anyhow::Result<()> {
    let text = read(spec)?;
    let doc: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", spec.display()))?;
    let is_family = doc.get("family").is_some() || doc.get("basis").is_some();
    let (elements, family) = if is_family {
        let fam = load_family(spec)?;
        let p = centroid(&fam);
        let inv = fam.verify_invariance(&p)?.max_deviation;
        let pre = fam.verify_preimage(&p)?.max_deviation;
        let res = FamilyResult {
            name: fam.name().to_string(),
            params: p,
            invariance_deviation: inv,
            preimage_deviation: pre,
            passed: inv <= tol && pre <= tol,
        };
        (fam.group().elements().to_vec(), Some(res))
    } else {
        let g = parse_group_spec(&text).with_context(|| format!("parsing {}", spec.display()))?;
        let (_, elements) = g.resolve(None)?;
        (elements, None)
    };
    let c = check_group(&elements, tol);
    let passed = c.passed && family.as_ref().is_none_or(|f| f.passed);
    let result = GroupResult {
        order: c.order,
        identity_deviation: c.identity_deviation,
        closure_deviation: c.closure_deviation,
        inverse_deviation: c.inverse_deviation,
        passed,
        family,
    };
    emit(out, &to_json(&result)?)?;
    if !passed {
        return Err(VerificationFailed(format!("verification failed at tolerance {tol:e}")).into());
    }
    Ok(())
}

//! `ogrady` — exact-arithmetic verifier for the divisor-class computations
//! of the O'Grady moduli spaces.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails,
//! 2 on unreadable or malformed input. All numeric output is exact;
//! fractions render as `a/b`. Set `OGRADY_LOG=debug` for tracing.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ogrady_core::exactalg::{format_vector, Matrix};
use ogrady_core::lattice::{IntegralLattice, LatticeMap};
use ogrady_core::ledger::ResolutionModel;
use ogrady_core::models::{self, SuiteTarget, VerificationReport};
use ogrady_core::mukai::{self, Ambient, MukaiVector, SurfaceModel};
use ogrady_core::{ExactMatrix, Int};

#[derive(Parser)]
#[command(name = "ogrady", version, about, disable_help_subcommand = true)]
struct Cli {
    /// Emit machine-readable JSON instead of the text table.
    #[arg(long, global = true)]
    json: bool,

    /// Write the output to a file instead of stdout.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suite for a canned model or a model file.
    Verify {
        /// m10, m6, all, or a path to a model JSON file.
        target: String,
    },
    /// Mukai-vector arithmetic on the canned surfaces.
    Mukai {
        #[command(subcommand)]
        op: MukaiOp,
    },
    /// Exact lattice computations.
    Lattice {
        #[command(subcommand)]
        op: LatticeOp,
    },
    /// Export or validate resolution-ledger model files.
    Model {
        #[command(subcommand)]
        op: ModelOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    K3,
    Abelian,
}

impl SurfaceArg {
    fn surface(self) -> SurfaceModel {
        match self {
            SurfaceArg::K3 => models::m10().0,
            SurfaceArg::Abelian => models::m6().0,
        }
    }
}

#[derive(Subcommand)]
enum MukaiOp {
    /// Mukai vector of a sheaf class (rank, c1, c2).
    Vector {
        #[arg(long, value_enum, default_value = "k3")]
        surface: SurfaceArg,
        #[arg(long)]
        rank: String,
        /// Coefficients of c1 over the NS basis, comma separated.
        #[arg(long)]
        c1: String,
        #[arg(long)]
        c2: String,
    },
    /// Mukai pairing of two vectors `r,c…,s`.
    Pair {
        #[arg(long, value_enum, default_value = "k3")]
        surface: SurfaceArg,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Euler pairing χ(α·β) of the classes with the given Mukai vectors.
    Chi {
        #[arg(long, value_enum, default_value = "k3")]
        surface: SurfaceArg,
        #[arg(long)]
        v: String,
        #[arg(long)]
        w: String,
    },
    /// Hilbert polynomial n ↦ χ(E ⊗ H^n).
    Hilbert {
        #[arg(long, value_enum, default_value = "k3")]
        surface: SurfaceArg,
        #[arg(long)]
        v: String,
    },
}

#[derive(Args)]
struct MatrixInput {
    /// Rows separated by ';', entries by ',' — e.g. "2,4;4,2".
    #[arg(long, conflicts_with = "file")]
    inline: Option<String>,
    /// File with the same syntax (newlines also separate rows).
    #[arg(long)]
    file: Option<PathBuf>,
}

impl MatrixInput {
    fn read(&self) -> Result<ExactMatrix, String> {
        let text = match (&self.inline, &self.file) {
            (Some(t), None) => t.clone(),
            (None, Some(p)) => fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
            _ => return Err("provide exactly one of --inline or --file".into()),
        };
        parse_matrix(&text)
    }
}

#[derive(Subcommand)]
enum LatticeOp {
    /// Smith normal form with both unimodular transforms.
    Snf {
        #[command(flatten)]
        matrix: MatrixInput,
    },
    /// Row Hermite normal form with its transform.
    Hnf {
        #[command(flatten)]
        matrix: MatrixInput,
    },
    /// Saturated orthogonal complement, either of vectors in an explicit
    /// Gram lattice or of a Mukai vector in a canned surface's Mukai
    /// lattice.
    Complement {
        #[arg(long)]
        gram: Option<String>,
        /// Vectors separated by ';', entries by ','.
        #[arg(long)]
        vectors: Option<String>,
        #[arg(long, value_enum)]
        surface: Option<SurfaceArg>,
        /// Mukai vector `r,c…,s` (used with --surface).
        #[arg(long)]
        v: Option<String>,
    },
    /// Check F^T·G_target·F = G_source for a column-image map matrix.
    Isometry {
        #[arg(long)]
        source_gram: String,
        #[arg(long)]
        target_gram: String,
        #[arg(long)]
        map: String,
    },
}

#[derive(Subcommand)]
enum ModelOp {
    /// Write a canned model as JSON.
    Export {
        /// m10 or m6.
        target: String,
    },
    /// Validate a model file against the ledger invariants.
    Check { path: PathBuf },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("OGRADY_LOG")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

/// `Err` means an input problem (exit 2); `Ok` carries the exit code from
/// the computation itself.
fn run(cli: Cli) -> Result<ExitCode, String> {
    let mut out = String::new();
    let code = match &cli.command {
        Command::Verify { target } => cmd_verify(target, cli.json, &mut out)?,
        Command::Mukai { op } => cmd_mukai(op, &mut out)?,
        Command::Lattice { op } => cmd_lattice(op, &mut out)?,
        Command::Model { op } => cmd_model(op, cli.json, &mut out)?,
    };
    match &cli.output {
        Some(path) => fs::write(path, out).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{out}"),
    }
    Ok(code)
}

fn report_exit(report: &VerificationReport, json: bool, out: &mut String) -> ExitCode {
    if json {
        out.push_str(&report.to_json());
    } else {
        let _ = writeln!(out, "{report}");
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_verify(target: &str, json: bool, out: &mut String) -> Result<ExitCode, String> {
    let report = match target.to_ascii_lowercase().as_str() {
        "m10" => models::run_suite(SuiteTarget::M10),
        "m6" => models::run_suite(SuiteTarget::M6),
        "all" => models::run_suite(SuiteTarget::All),
        _ => {
            log::debug!("loading model file {target}");
            let text = fs::read_to_string(target).map_err(|e| format!("{target}: {e}"))?;
            let model = ResolutionModel::from_json(&text).map_err(|e| e.to_string())?;
            models::run_suite_for_model(&model)
        }
    };
    log::debug!(
        "suite {}: {}/{} checks passed",
        report.target,
        report.checks.iter().filter(|c| c.passed()).count(),
        report.checks.len()
    );
    Ok(report_exit(&report, json, out))
}

fn cmd_mukai(op: &MukaiOp, out: &mut String) -> Result<ExitCode, String> {
    match op {
        MukaiOp::Vector {
            surface,
            rank,
            c1,
            c2,
        } => {
            let surface = surface.surface();
            let v = mukai::mukai_vector_of(
                &surface,
                parse_int(rank)?,
                parse_int_list(c1)?,
                parse_int(c2)?,
            )
            .map_err(|e| e.to_string())?;
            let _ = writeln!(out, "{v}");
        }
        MukaiOp::Pair { surface, v, w } => {
            let surface = surface.surface();
            let value = mukai::mukai_pairing(
                &surface,
                &parse_mukai(v, &surface)?,
                &parse_mukai(w, &surface)?,
            )
            .map_err(|e| e.to_string())?;
            let _ = writeln!(out, "{value}");
        }
        MukaiOp::Chi { surface, v, w } => {
            let surface = surface.surface();
            let a = mukai::mukai_to_ch(&surface, &parse_mukai(v, &surface)?)
                .map_err(|e| e.to_string())?;
            let b = mukai::mukai_to_ch(&surface, &parse_mukai(w, &surface)?)
                .map_err(|e| e.to_string())?;
            let value = mukai::euler_pairing(&surface, &a, &b).map_err(|e| e.to_string())?;
            let _ = writeln!(out, "{value}");
        }
        MukaiOp::Hilbert { surface, v } => {
            let surface = surface.surface();
            let p = mukai::hilbert_polynomial(&surface, &parse_mukai(v, &surface)?)
                .map_err(|e| e.to_string())?;
            let _ = writeln!(out, "{p}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_lattice(op: &LatticeOp, out: &mut String) -> Result<ExitCode, String> {
    match op {
        LatticeOp::Snf { matrix } => {
            let m = matrix.read()?;
            let d = m.snf();
            let _ = writeln!(out, "S =\n{}", d.s);
            let _ = writeln!(out, "U =\n{}", d.u);
            let _ = writeln!(out, "V =\n{}", d.v);
        }
        LatticeOp::Hnf { matrix } => {
            let m = matrix.read()?;
            let h = m.hnf();
            let _ = writeln!(out, "H =\n{}", h.h);
            let _ = writeln!(out, "U =\n{}", h.u);
        }
        LatticeOp::Complement {
            gram,
            vectors,
            surface,
            v,
        } => match (gram, vectors, surface, v) {
            (Some(gram), Some(vectors), None, None) => {
                let lattice =
                    IntegralLattice::from_gram(parse_matrix(gram)?).map_err(|e| e.to_string())?;
                let vecs = parse_matrix(vectors)?.row_vectors();
                let c = lattice.orthogonal_complement(&vecs).map_err(|e| e.to_string())?;
                write_sublattice(out, &c.basis, &c.gram);
            }
            (None, None, Some(surface), Some(v)) => {
                let surface = surface.surface();
                let vp = mukai::v_perp(&surface, &parse_mukai(v, &surface)?, Ambient::NsOnly)
                    .map_err(|e| e.to_string())?;
                write_sublattice(out, &vp.sublattice.basis, &vp.sublattice.gram);
            }
            _ => {
                return Err(
                    "use either --gram with --vectors, or --surface with --v".into(),
                )
            }
        },
        LatticeOp::Isometry {
            source_gram,
            target_gram,
            map,
        } => {
            let source = IntegralLattice::from_gram(parse_matrix(source_gram)?)
                .map_err(|e| e.to_string())?;
            let target = IntegralLattice::from_gram(parse_matrix(target_gram)?)
                .map_err(|e| e.to_string())?;
            let map = LatticeMap::new(source, target, parse_matrix(map)?)
                .map_err(|e| e.to_string())?;
            let check = map.is_isometry();
            let _ = writeln!(out, "isometry: {}", check.is_isometry);
            if let Some(w) = check.witness {
                let _ = writeln!(
                    out,
                    "witness: basis pair ({}, {}) pairs to {} under the map, {} in the source",
                    w.i, w.j, w.mapped_value, w.source_value
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn write_sublattice(out: &mut String, basis: &[Vec<Int>], gram: &ExactMatrix) {
    if basis.is_empty() {
        let _ = writeln!(out, "basis: {{}} (rank 0)");
        return;
    }
    let rendered: Vec<String> = basis.iter().map(|b| format_vector(b)).collect();
    let _ = writeln!(out, "basis: {{{}}}", rendered.join(", "));
    let _ = writeln!(out, "gram =\n{gram}");
}

fn cmd_model(op: &ModelOp, json: bool, out: &mut String) -> Result<ExitCode, String> {
    match op {
        ModelOp::Export { target } => {
            let (_, model) = match target.to_ascii_lowercase().as_str() {
                "m10" => models::m10(),
                "m6" => models::m6(),
                other => return Err(format!("unknown model {other:?} (expected m10 or m6)")),
            };
            out.push_str(&model.to_json());
            Ok(ExitCode::SUCCESS)
        }
        ModelOp::Check { path } => {
            let text =
                fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let model = ResolutionModel::from_json(&text).map_err(|e| e.to_string())?;
            let report = model.validate();
            if json {
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
            } else {
                let _ = writeln!(out, "{report}");
            }
            Ok(if report.is_valid() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

// --- parsing ---------------------------------------------------------------

fn parse_int(text: &str) -> Result<Int, String> {
    Int::from_str(text.trim()).map_err(|_| format!("not an integer: {text:?}"))
}

fn parse_int_list(text: &str) -> Result<Vec<Int>, String> {
    text.split(',').map(parse_int).collect()
}

fn parse_mukai(text: &str, surface: &SurfaceModel) -> Result<MukaiVector, String> {
    let parts = parse_int_list(text)?;
    if parts.len() != surface.ns().rank() + 2 {
        return Err(format!(
            "expected {} components r,c…,s, got {}",
            surface.ns().rank() + 2,
            parts.len()
        ));
    }
    let r = parts[0].clone();
    let s = parts[parts.len() - 1].clone();
    let c = parts[1..parts.len() - 1].to_vec();
    Ok(MukaiVector::new(r, c, s))
}

fn parse_matrix(text: &str) -> Result<ExactMatrix, String> {
    let rows: Vec<Vec<Int>> = text
        .split([';', '\n'])
        .map(str::trim)
        .filter(|line| !line.is_empty())
        .map(parse_int_list)
        .collect::<Result<_, _>>()?;
    if rows.is_empty() {
        return Err("empty matrix".into());
    }
    Matrix::from_rows(rows).map_err(|e| e.to_string())
}

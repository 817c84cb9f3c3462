//! `freeconvex`: positivity, separability, free spectrahedra, magic
//! squares, non-local games and MPDO positivity from the command line.
//!
//! Every run emits a single JSON report (stdout or `--out`). Exit codes:
//! 0 success / positive verdict, 1 negative verdict, 2 usage or input
//! error, 3 numerical failure.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use freeconvex_core::error::Error as CoreError;
use freeconvex_core::formats::{
    EffectsJson, GameJson, MagicSquareJson, MatrixJson, MpdoJson, SdpProblemJson, TiTensorJson,
};
use freeconvex_core::freespec::{jointly_measurable, noise_threshold, JointMeasurability};
use freeconvex_core::games::{classical_value, npa_upper_bound};
use freeconvex_core::linalg::HermitianMatrix;
use freeconvex_core::magic::{
    birkhoff_decompose, is_quantum_permutation, naimark_dilate, validate_magic_square,
    MagicViolation,
};
use freeconvex_core::sdp::{solve, SdpStatus, SolveOptions};
use freeconvex_core::separability::{operator_schmidt, separable_rank2};
use freeconvex_core::tensornet::{
    mpdo_moments, psd_distance_bounds, tau_psd_scan, MomentVector,
};

use report::{render_csv, render_json, Cell};

const SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(name = "freeconvex", version, about = "Quantum information meets free convex geometry")]
struct Cli {
    /// Relative psd tolerance inherited by all checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Seed for randomized subroutines (reports are deterministic in it).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the JSON report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Semidefinite programs in primal standard form.
    Sdp {
        #[command(subcommand)]
        cmd: SdpCmd,
    },
    /// Free spectrahedra and joint measurability.
    Freespec {
        #[command(subcommand)]
        cmd: FreespecCmd,
    },
    /// Separability and operator Schmidt decompositions.
    Sepp {
        #[command(subcommand)]
        cmd: SeppCmd,
    },
    /// Quantum magic squares, Birkhoff decomposition, Naimark dilation.
    Magic {
        #[command(subcommand)]
        cmd: MagicCmd,
    },
    /// Non-local games.
    Games {
        #[command(subcommand)]
        cmd: GamesCmd,
    },
    /// Matrix product density operators.
    Tn {
        #[command(subcommand)]
        cmd: TnCmd,
    },
}

#[derive(Subcommand)]
enum SdpCmd {
    /// Solve a problem file; emits the solution with certified residuals.
    Solve { file: PathBuf },
}

#[derive(Subcommand)]
enum FreespecCmd {
    /// Joint measurability of binary effects via the marginal SDP.
    Jointmeas {
        file: PathBuf,
        /// Also bisect the noise threshold of the effect family.
        #[arg(long)]
        bisect_noise: bool,
        /// Bracket width for the threshold bisection.
        #[arg(long, default_value_t = 1e-3)]
        bisect_width: f64,
    },
}

#[derive(Args)]
struct DimsArg {
    /// Bipartite cut "d,s" with d*s equal to the matrix dimension.
    #[arg(long, value_parser = parse_dims)]
    dims: (usize, usize),
}

#[derive(Subcommand)]
enum SeppCmd {
    /// Separable two-term decomposition of a psd tensor-rank-2 state.
    Rank2 {
        file: PathBuf,
        #[command(flatten)]
        dims: DimsArg,
    },
    /// Operator Schmidt rank and factors across a cut.
    Osr {
        file: PathBuf,
        #[command(flatten)]
        dims: DimsArg,
    },
}

#[derive(Subcommand)]
enum MagicCmd {
    /// Validate row/column POVM structure of a quantum magic square.
    Validate { file: PathBuf },
    /// Birkhoff-von Neumann decomposition of a doubly stochastic matrix.
    Birkhoff { file: PathBuf },
    /// Naimark dilation of a POVM to a PVM.
    Naimark { file: PathBuf },
}

#[derive(Subcommand)]
enum GamesCmd {
    /// Classical value by enumeration, optionally with a moment-matrix
    /// upper bound on the quantum value.
    Value {
        file: PathBuf,
        /// Hierarchy level (1-3) of the relaxation.
        #[arg(long)]
        npa_level: Option<usize>,
    },
}

#[derive(Subcommand)]
enum TnCmd {
    /// Transfer-operator moments tr(rho^k) for k = 1..K.
    Moments {
        file: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Moment-based bounds on the distance to the psd cone.
    PsdBounds {
        file: PathBuf,
        #[arg(long)]
        degree: usize,
        /// Spectral enclosure "a,b" (defaults to the Frobenius rule).
        #[arg(long, value_parser = parse_interval)]
        interval: Option<(f64, f64)>,
        /// Also write a (K, lower, upper) CSV for plotting.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Bounded-n positivity scan of the translation-invariant chain.
    TauScan {
        file: PathBuf,
        #[arg(long)]
        nmax: usize,
    },
}

fn parse_dims(s: &str) -> Result<(usize, usize), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected d,s".into());
    }
    let d = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let t = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((d, t))
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected a,b".into());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

/// Exit codes 2 (input/usage) and 3 (numerical failure) by error class.
fn exit_code_of(e: &CoreError) -> u8 {
    match e {
        CoreError::InvalidInput(_)
        | CoreError::SizeLimit(_)
        | CoreError::PreconditionViolation(_)
        | CoreError::InvalidMap(_)
        | CoreError::InvalidInterval(_) => 2,
        CoreError::NumericalDegeneracy(_)
        | CoreError::InternalInconsistency(_)
        | CoreError::Indeterminate(_) => 3,
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        Failure { code: exit_code_of(&e), message: e.to_string() }
    }
}

type CmdResult = Result<(Value, u8), Failure>;

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| Failure {
        code: 2,
        message: format!("cannot parse {}: {e}", path.display()),
    })
}

fn matrix_value(m: &HermitianMatrix) -> Value {
    serde_json::to_value(MatrixJson::of_hermitian(m)).expect("matrix serialises")
}

fn finite_or_null(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::Null
    }
}

fn run_sdp_solve(file: &Path) -> CmdResult {
    let problem = parse_json::<SdpProblemJson>(file)?.to_problem()?;
    let sol = solve(&problem, &SolveOptions::default())?;
    let status = match sol.status {
        SdpStatus::Optimal => "optimal",
        SdpStatus::Infeasible => "infeasible",
        SdpStatus::MaxIterations => "maxIterations",
    };
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "sdp solve",
        "status": status,
        "primalObjective": finite_or_null(sol.primal_objective),
        "dualMultipliers": sol.dual_multipliers,
        "residuals": {
            "primalFeasibility": finite_or_null(sol.residuals.primal_feasibility),
            "dualFeasibility": finite_or_null(sol.residuals.dual_feasibility),
            "gap": finite_or_null(sol.residuals.gap),
        },
        "iterations": sol.iterations,
        "infeasibilityCertificate": sol.infeasibility_certificate,
        "blocks": sol.blocks.iter().map(matrix_value).collect::<Vec<_>>(),
    });
    let code = match sol.status {
        SdpStatus::Optimal => 0,
        SdpStatus::Infeasible => 1,
        SdpStatus::MaxIterations => 3,
    };
    Ok((report, code))
}

fn run_jointmeas(file: &Path, tol: f64, bisect: bool, width: f64) -> CmdResult {
    let effects = parse_json::<EffectsJson>(file)?.to_hermitian_list()?;
    let verdict = jointly_measurable(&effects, tol)?;
    let (compatible, margin, povm) = match &verdict {
        JointMeasurability::Yes { povm, margin } => (true, *margin, Some(povm)),
        JointMeasurability::No { margin } => (false, *margin, None),
    };
    let threshold = if bisect {
        let (lo, hi) = noise_threshold(&effects, tol, width)?;
        json!({"lastFeasible": lo, "firstInfeasible": hi, "width": hi - lo})
    } else {
        Value::Null
    };
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "freespec jointmeas",
        "compatible": compatible,
        "margin": margin,
        "jointPovm": povm.map(|p| {
            p.effects.iter().map(matrix_value).collect::<Vec<_>>()
        }),
        "noiseThreshold": threshold,
    });
    Ok((report, if compatible { 0 } else { 1 }))
}

fn run_sepp_rank2(file: &Path, dims: (usize, usize), tol: f64) -> CmdResult {
    let rho = parse_json::<MatrixJson>(file)?.to_hermitian()?;
    let (d, s) = dims;
    if d * s != rho.dim() {
        return Err(CoreError::InvalidInput(format!(
            "dims {d}x{s} do not match matrix dimension {}",
            rho.dim()
        ))
        .into());
    }
    let dec = operator_schmidt(&rho, d, s, tol.max(1e-12))?;
    if dec.rank > 2 {
        return Err(CoreError::PreconditionViolation(format!(
            "operator Schmidt rank {} exceeds 2",
            dec.rank
        ))
        .into());
    }
    let zero_l = HermitianMatrix::zeros(d);
    let zero_r = HermitianMatrix::zeros(s);
    let (s1, t1) = if dec.rank >= 1 { (&dec.left[0], &dec.right[0]) } else { (&zero_l, &zero_r) };
    let (s2, t2) = if dec.rank >= 2 { (&dec.left[1], &dec.right[1]) } else { (&zero_l, &zero_r) };
    let pairs = separable_rank2(s1, t1, s2, t2, tol)?;
    let mut rebuilt = HermitianMatrix::zeros(rho.dim());
    for (l, r) in &pairs {
        rebuilt = rebuilt.add(&freeconvex_core::linalg::kron_hermitian(l, r)?);
    }
    let err = rebuilt.sub(&rho).frobenius_norm() / (1.0 + rho.frobenius_norm());
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "sepp rank2",
        "schmidtRank": dec.rank,
        "termCount": pairs.len(),
        "reconstructionError": err,
        "pairs": pairs.iter().map(|(l, r)| json!({
            "left": matrix_value(l),
            "right": matrix_value(r),
        })).collect::<Vec<_>>(),
    });
    Ok((report, 0))
}

fn run_sepp_osr(file: &Path, dims: (usize, usize), tol: f64) -> CmdResult {
    let rho = parse_json::<MatrixJson>(file)?.to_hermitian()?;
    let (d, s) = dims;
    if d * s != rho.dim() {
        return Err(CoreError::InvalidInput(format!(
            "dims {d}x{s} do not match matrix dimension {}",
            rho.dim()
        ))
        .into());
    }
    let dec = operator_schmidt(&rho, d, s, tol.max(1e-12))?;
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "sepp osr",
        "rank": dec.rank,
        "singularValues": dec.singular_values,
        "left": dec.left.iter().map(matrix_value).collect::<Vec<_>>(),
        "right": dec.right.iter().map(matrix_value).collect::<Vec<_>>(),
    });
    Ok((report, 0))
}

fn run_magic_validate(file: &Path, tol: f64) -> CmdResult {
    let sq = parse_json::<MagicSquareJson>(file)?.to_square()?;
    let rep = validate_magic_square(&sq, tol)?;
    let violations: Vec<Value> = rep
        .violations
        .iter()
        .map(|v| match v {
            MagicViolation::EntryNotPsd { row, col, min_eigenvalue } => json!({
                "kind": "entryNotPsd", "row": row, "col": col,
                "minEigenvalue": min_eigenvalue,
            }),
            MagicViolation::RowSum { row, residual } => {
                json!({"kind": "rowSum", "row": row, "residual": residual})
            }
            MagicViolation::ColumnSum { col, residual } => {
                json!({"kind": "columnSum", "col": col, "residual": residual})
            }
        })
        .collect();
    let valid = rep.is_valid();
    let quantum_permutation =
        if valid { Some(is_quantum_permutation(&sq, 1e-9)?) } else { None };
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "magic validate",
        "valid": valid,
        "quantumPermutation": quantum_permutation,
        "violations": violations,
    });
    Ok((report, if valid { 0 } else { 1 }))
}

fn run_magic_birkhoff(file: &Path, tol: f64) -> CmdResult {
    let m = parse_json::<MatrixJson>(file)?;
    if m.im.as_ref().is_some_and(|im| im.iter().flatten().any(|&x| x != 0.0)) {
        return Err(CoreError::InvalidInput("doubly stochastic matrix must be real".into()).into());
    }
    let grid = m.re.clone();
    let terms = birkhoff_decompose(&grid, tol.max(1e-9))?;
    let d = grid.len();
    let mut rec = vec![vec![0.0f64; d]; d];
    for (w, p) in &terms {
        for (r, &c) in p.iter().enumerate() {
            rec[r][c] += w;
        }
    }
    let err = grid
        .iter()
        .flatten()
        .zip(rec.iter().flatten())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "magic birkhoff",
        "termCount": terms.len(),
        "weightSum": terms.iter().map(|(w, _)| w).sum::<f64>(),
        "reconstructionError": err,
        "terms": terms.iter().map(|(w, p)| json!({
            "weight": w,
            "permutation": p,
        })).collect::<Vec<_>>(),
    });
    Ok((report, 0))
}

fn run_magic_naimark(file: &Path, tol: f64) -> CmdResult {
    let povm = parse_json::<EffectsJson>(file)?.to_povm(tol)?;
    let dil = naimark_dilate(&povm)?;
    let residual = dil.verify(&povm)?;
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "magic naimark",
        "dilationDim": dil.dilation_dim(),
        "residual": residual,
        "pvm": dil.pvm.iter().map(matrix_value).collect::<Vec<_>>(),
        "isometry": serde_json::to_value(MatrixJson::of_complex(&dil.isometry)).unwrap(),
    });
    Ok((report, 0))
}

fn run_games_value(file: &Path, npa_level: Option<usize>) -> CmdResult {
    let game = parse_json::<GameJson>(file)?.to_game()?;
    let (classical, strategy) = classical_value(&game)?;
    let npa = match npa_level {
        None => Value::Null,
        Some(level) => {
            let (bound, cert) = npa_upper_bound(&game, level)?;
            json!({
                "level": level,
                "bound": bound,
                "momentSize": cert.moment_matrix.dim(),
                "momentMatrix": matrix_value(&cert.moment_matrix),
            })
        }
    };
    let npa_bound = match &npa {
        Value::Null => Value::Null,
        other => other["bound"].clone(),
    };
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "games value",
        "classical": classical,
        "classicalStrategy": {"alice": strategy.alice, "bob": strategy.bob},
        "npaBound": npa_bound,
        "certificate": npa,
    });
    Ok((report, 0))
}

fn run_tn_moments(file: &Path, k: usize) -> CmdResult {
    let mpdo = parse_json::<MpdoJson>(file)?.to_mpdo()?;
    let mut rows = Vec::with_capacity(k);
    for kk in 1..=k {
        rows.push(json!({"k": kk, "value": mpdo_moments(&mpdo, kk)?}));
    }
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "tn moments",
        "denseDim": mpdo.dense_dim(),
        "moments": rows,
    });
    Ok((report, 0))
}

fn run_tn_psd_bounds(
    file: &Path,
    degree: usize,
    interval: Option<(f64, f64)>,
    csv: Option<&Path>,
) -> CmdResult {
    let mpdo = parse_json::<MpdoJson>(file)?.to_mpdo()?;
    let mv = MomentVector::of_mpdo(&mpdo, degree.max(2), interval)?;
    let mut rows = Vec::new();
    let mut csv_rows = Vec::new();
    for k in 1..=degree {
        let (lo, hi) = psd_distance_bounds(&mv, k)?;
        rows.push(json!({"degree": k, "lower": lo, "upper": hi}));
        csv_rows.push(vec![Cell::Int(k as i64), Cell::Float(lo), Cell::Float(hi)]);
    }
    if let Some(path) = csv {
        let text = render_csv(&["K", "lower", "upper"], &csv_rows);
        std::fs::write(path, text).map_err(|e| Failure {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        })?;
    }
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "tn psd-bounds",
        "dim": mv.dim,
        "interval": [mv.interval.0, mv.interval.1],
        "moments": mv.moments,
        "bounds": rows,
    });
    Ok((report, 0))
}

fn run_tn_tau_scan(file: &Path, nmax: usize, tol: f64) -> CmdResult {
    let tensor = parse_json::<TiTensorJson>(file)?.to_tensor()?;
    let scan = tau_psd_scan(&tensor, nmax, tol)?;
    let any_negative = scan.verdicts.iter().any(|v| v.psd == Some(false));
    let report = json!({
        "schemaVersion": SCHEMA_VERSION,
        "command": "tn tau-scan",
        "boundedEvidence": scan.bounded_evidence,
        "verdicts": scan.verdicts.iter().map(|v| json!({
            "n": v.n,
            "psd": v.psd,
            "minEigenvalue": v.min_eigenvalue,
        })).collect::<Vec<_>>(),
    });
    Ok((report, if any_negative { 1 } else { 0 }))
}

fn dispatch(cli: &Cli) -> CmdResult {
    let tol = cli.tol;
    match &cli.command {
        Command::Sdp { cmd: SdpCmd::Solve { file } } => run_sdp_solve(file),
        Command::Freespec { cmd: FreespecCmd::Jointmeas { file, bisect_noise, bisect_width } } => {
            run_jointmeas(file, tol, *bisect_noise, *bisect_width)
        }
        Command::Sepp { cmd } => match cmd {
            SeppCmd::Rank2 { file, dims } => run_sepp_rank2(file, dims.dims, tol),
            SeppCmd::Osr { file, dims } => run_sepp_osr(file, dims.dims, tol),
        },
        Command::Magic { cmd } => match cmd {
            MagicCmd::Validate { file } => run_magic_validate(file, tol),
            MagicCmd::Birkhoff { file } => run_magic_birkhoff(file, tol),
            MagicCmd::Naimark { file } => run_magic_naimark(file, tol),
        },
        Command::Games { cmd: GamesCmd::Value { file, npa_level } } => {
            run_games_value(file, *npa_level)
        }
        Command::Tn { cmd } => match cmd {
            TnCmd::Moments { file, k } => run_tn_moments(file, *k),
            TnCmd::PsdBounds { file, degree, interval, csv } => {
                run_tn_psd_bounds(file, *degree, *interval, csv.as_deref())
            }
            TnCmd::TauScan { file, nmax } => run_tn_tau_scan(file, *nmax, tol),
        },
    }
}

fn emit(out: Option<&Path>, text: &str) -> u8 {
    match out {
        None => {
            print!("{text}");
            0
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("cannot write {}: {e}", path.display());
                2
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((report, code)) => {
            let text = render_json(&report);
            let write_code = emit(cli.out.as_deref(), &text);
            ExitCode::from(if write_code != 0 { write_code } else { code })
        }
        Err(failure) => {
            let report = json!({
                "schemaVersion": SCHEMA_VERSION,
                "error": {
                    "exitCode": failure.code,
                    "message": failure.message,
                },
            });
            let text = render_json(&report);
            let _ = emit(cli.out.as_deref(), &text);
            ExitCode::from(failure.code)
        }
    }
}

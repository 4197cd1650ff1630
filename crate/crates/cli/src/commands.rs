use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use qcasino_core::game::COMPOUND_LABELS;
use qcasino_core::{
    build_payoff_operator, classical_matrix_with, constraint_conic, curve_points, expectation,
    grid_saddle_oracle, probabilities_from_angle, refine_saddle, scalar_payoff,
    simulate_with_trace, solve_classical, verify_saddle, ClassicalMatrix, ClassicalSolution,
    CurveKind, EquilibriumFlag, EquilibriumResult, GameSpec, LabelConvention, ObservableFrame,
    Payoff, ProbabilityQuadruple, SaddleCertificate, SimReport, StateVector,
};
use serde::Serialize;

use crate::output::{fmt_float, to_json, write_csv};
use crate::{spec, CliError};

/// What a command leaves behind: a report to print and an exit status.
pub struct Outcome {
    pub report: String,
    pub error: Option<CliError>,
}

impl From<String> for Outcome {
    fn from(report: String) -> Self {
        Self {
            report,
            error: None,
        }
    }
}

fn finite(name: &str, x: f64) -> Result<f64, CliError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Numeric(format!("{name} must be finite, got {x}")))
    }
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| match path {
        Some(p) => CliError::Io(format!("cannot write {}: {e}", p.display())),
        None => CliError::Io(format!("cannot write output: {e}")),
    }
}

#[derive(Serialize)]
struct EvalReport {
    spec: GameSpec,
    alpha: f64,
    beta: f64,
    payoff: f64,
    odd: f64,
    even: f64,
    alice: ProbabilityQuadruple,
    bob: ProbabilityQuadruple,
    operator_expectation: f64,
    residual: f64,
}

pub fn eval(spec_path: &Path, alpha: f64, beta: f64) -> Result<Outcome, CliError> {
    let game = spec::load(spec_path)?;
    let alpha = finite("alpha", alpha)?;
    let beta = finite("beta", beta)?;
    let p = probabilities_from_angle(alpha, &game.alice);
    let q = probabilities_from_angle(beta, &game.bob);
    let Payoff { total, odd, even } = scalar_payoff(&game.coefficients, &p, &q);
    let h = build_payoff_operator(&game);
    let op = expectation(
        &h,
        &StateVector::new(alpha, 0.0),
        &StateVector::new(beta, 0.0),
    )?;
    let report = EvalReport {
        spec: game,
        alpha,
        beta,
        payoff: total,
        odd,
        even,
        alice: p,
        bob: q,
        operator_expectation: op,
        residual: (op - total).abs(),
    };
    Ok(to_json(&report)?.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Player {
    Alice,
    Bob,
}

pub fn curve(
    spec_path: &Path,
    player: Player,
    n: usize,
    out: Option<&Path>,
) -> Result<Outcome, CliError> {
    let game = spec::load(spec_path)?;
    let frame: ObservableFrame = match player {
        Player::Alice => game.alice,
        Player::Bob => game.bob,
    };
    let points = curve_points(&frame, n)?;
    let conic = constraint_conic(&frame);
    let k = conic.coefficients;
    let mut comments = vec![format!(
        "a11={} a22={} a12={} b1={} b2={} c0={}",
        fmt_float(k.a11),
        fmt_float(k.a22),
        fmt_float(k.a12),
        fmt_float(k.b1),
        fmt_float(k.b2),
        fmt_float(k.c0)
    )];
    comments.push(match conic.kind {
        CurveKind::Ellipse => "kind=ellipse".to_string(),
        CurveKind::Segment { slope, intercept } => {
            format!(
                "kind=segment slope={} intercept={}",
                fmt_float(slope),
                fmt_float(intercept)
            )
        }
    });
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|pt| vec![pt.alpha, pt.p1, pt.p2])
        .collect();
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(CliError::Numeric(
            "curve contains a non-finite value".into(),
        ));
    }
    let header = ["alpha", "p1", "p2"];
    match out {
        Some(path) => {
            write_csv(create(path)?, &comments, &header, &rows).map_err(io_err(Some(path)))?;
            Ok(String::new().into())
        }
        None => {
            let mut buf = Vec::new();
            write_csv(&mut buf, &comments, &header, &rows).map_err(io_err(None))?;
            Ok(String::from_utf8(buf).expect("CSV is UTF-8").into())
        }
    }
}

#[derive(Serialize)]
struct EquilibriumReport {
    #[serde(flatten)]
    result: EquilibriumResult,
    grid: usize,
    tol: f64,
    verification: Verification,
}

#[derive(Serialize)]
struct Verification {
    grid: usize,
    tol: f64,
    #[serde(flatten)]
    certificate: SaddleCertificate,
}

pub fn equilibrium(spec_path: &Path, grid: usize, tol: f64) -> Result<Outcome, CliError> {
    let game = spec::load(spec_path)?;
    let tol = finite("tol", tol)?;
    if tol <= 0.0 {
        return Err(CliError::Usage(format!("tol must be positive, got {tol}")));
    }
    let coarse = grid_saddle_oracle(&game, grid)?;
    let result = refine_saddle(&game, (coarse.alpha_star, coarse.beta_star), tol);
    let check_grid = 4 * grid;
    let check_tol = 100.0 * tol * (1.0 + game.coefficients.abs_sum());
    let certificate = verify_saddle(&game, &result, check_grid, check_tol);
    let stalled = result.has(EquilibriumFlag::NoConvergence);
    let report = EquilibriumReport {
        result,
        grid,
        tol,
        verification: Verification {
            grid: check_grid,
            tol: check_tol,
            certificate,
        },
    };
    Ok(Outcome {
        report: to_json(&report)?,
        error: stalled.then(|| CliError::Convergence("refinement did not converge".into())),
    })
}

#[derive(Serialize)]
struct ClassicalReport {
    convention: LabelConvention,
    labels: [&'static str; 4],
    matrix: ClassicalMatrix,
    solution: ClassicalSolution,
}

pub fn classical(spec_path: &Path, table1: bool, csv: Option<&Path>) -> Result<Outcome, CliError> {
    let game = spec::load(spec_path)?;
    let convention = if table1 {
        LabelConvention::Table1
    } else {
        LabelConvention::PayoffRule
    };
    let matrix = classical_matrix_with(&game.coefficients, convention);
    let solution = solve_classical(&matrix, 1e-9)?;
    if let Some(path) = csv {
        // one row per Alice strategy, labelled in the first column
        let mut w = csv::Writer::from_writer(io::BufWriter::new(create(path)?));
        let mut header = vec!["alice"];
        header.extend(COMPOUND_LABELS);
        let result: Result<(), csv::Error> = (|| {
            w.write_record(&header)?;
            for (label, row) in COMPOUND_LABELS.iter().zip(matrix.rows()) {
                let mut rec = vec![label.to_string()];
                rec.extend(row.iter().map(|&x| fmt_float(x)));
                w.write_record(&rec)?;
            }
            Ok(w.flush()?)
        })();
        result.map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let report = ClassicalReport {
        convention,
        labels: COMPOUND_LABELS,
        matrix,
        solution,
    };
    Ok(to_json(&report)?.into())
}

pub fn simulate(
    spec_path: &Path,
    alpha: f64,
    beta: f64,
    rounds: u64,
    seed: u64,
    trace: Option<&Path>,
) -> Result<Outcome, CliError> {
    let game = spec::load(spec_path)?;
    let alpha = finite("alpha", alpha)?;
    let beta = finite("beta", beta)?;
    if rounds == 0 {
        return Err(CliError::Usage("rounds must be at least 1".into()));
    }
    let report: SimReport = match trace {
        None => simulate_with_trace(&game, alpha, beta, rounds, seed, |_, _, _| {})?,
        Some(path) => {
            let mut w = io::BufWriter::new(create(path)?);
            let mut failed: Option<io::Error> = None;
            if let Err(e) = writeln!(w, "round,payoff,running_mean") {
                failed = Some(e);
            }
            let report = simulate_with_trace(&game, alpha, beta, rounds, seed, |k, x, m| {
                if failed.is_none() {
                    if let Err(e) = writeln!(w, "{k},{},{}", fmt_float(x), fmt_float(m)) {
                        failed = Some(e);
                    }
                }
            })?;
            if let Some(e) = failed.or_else(|| w.flush().err()) {
                return Err(io_err(Some(path))(e));
            }
            report
        }
    };
    Ok(to_json(&report)?.into())
}

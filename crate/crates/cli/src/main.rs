//! Command-line driver: parse inputs, run the tower / amenable /
//! diagnostic drivers, emit CSV and JSON reports.
//!
//! Exit codes: 0 success, 2 validation or schema error, 3 internal
//! invariant violation (pairing asymmetry, determinant-bound breach).

use clap::{Parser, Subcommand};
use l2sig_core::error::CoreError;
use l2sig_core::io::{
    amenable_csv, operator_csv, tower_betti_csv, tower_sign_csv, ComplexJson, CoverJson,
    ExhaustionJson, GroupJson, OperatorJson,
};
use l2sig_core::l2oracle::{self, TorusOptions};
use l2sig_core::ratio::{format_q, parse_q, q_int, q_ratio, q_to_f64, Q};
use l2sig_core::{amenable, quotient, spectral};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "l2sig", version, about = "Exact L2-signature and L2-Betti approximation")]
struct Cli {
    /// Worker threads for level-parallel drivers (output is identical for
    /// any value).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Normalized signatures of a symmetric complex along a quotient tower.
    TowerSign {
        /// Symmetric complex JSON.
        #[arg(long)]
        input: PathBuf,
        /// Group descriptor JSON (with schedule).
        #[arg(long)]
        tower: PathBuf,
        /// Truncate the schedule to its first K entries.
        #[arg(long)]
        k_max: Option<usize>,
        /// Compare against the L2 oracle, with optional tolerance.
        #[arg(long, value_name = "TOL", num_args = 0..=1, default_missing_value = "1e-6")]
        oracle: Option<f64>,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized Betti numbers of a free complex along a quotient tower.
    TowerBetti {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tower: PathBuf,
        /// Comma-separated degrees (default: all).
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, value_name = "TOL", num_args = 0..=1, default_missing_value = "1e-6")]
        oracle: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Combinatorial amenable driver: simplicial exhaustions or operator
    /// truncations.
    Amenable {
        /// Equivariant complex JSON (simplicial mode).
        #[arg(long, conflicts_with = "operator")]
        input: Option<PathBuf>,
        /// Exhaustion JSON (explicit levels or a box recipe).
        #[arg(long)]
        exhaustion: Option<PathBuf>,
        /// Shortcut for the box Folner exhaustion up to K.
        #[arg(long, value_name = "K")]
        folner_box: Option<usize>,
        /// Self-adjoint group-ring operator JSON (diagnostic mode).
        #[arg(long)]
        operator: Option<PathBuf>,
        /// Box sizes 1..=K for operator truncations.
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        degrees: Vec<usize>,
        #[arg(long, value_name = "TOL", num_args = 0..=1, default_missing_value = "1e-6")]
        oracle: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the spectral inequalities: determinant bound, filtered
    /// projection control, filter construction, trace stabilization.
    Diagnose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        tower: PathBuf,
        /// Comma-separated rational epsilons.
        #[arg(long, value_delimiter = ',', default_values_t = vec![
            String::from("1/10"), String::from("1/100"), String::from("1/1000")
        ])]
        eps_grid: Vec<String>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schema and mathematical validation without running drivers.
    Validate {
        #[arg(long)]
        input: PathBuf,
        /// Group descriptor, required for bare complex files.
        #[arg(long)]
        tower: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            let payload = json!({
                "error": {
                    "kind": error_kind(&e),
                    "message": e.to_string(),
                    "exit_code": code,
                }
            });
            eprintln!("{payload}");
            ExitCode::from(code)
        }
    }
}

fn exit_code(e: &CoreError) -> u8 {
    match e {
        CoreError::InvariantViolation(_) => 3,
        _ => 2,
    }
}

fn error_kind(e: &CoreError) -> &'static str {
    match e {
        CoreError::InvariantViolation(_) => "invariant_violation",
        CoreError::Schema(_) | CoreError::Json(_) => "schema",
        CoreError::Io(_) => "io",
        _ => "validation",
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CoreError> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

fn emit(out: Option<&PathBuf>, content: &str) -> Result<(), CoreError> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn torus_options(tol: f64) -> TorusOptions {
    TorusOptions {
        tolerance: tol,
        ..TorusOptions::default()
    }
}

fn run(cmd: Command) -> Result<(), CoreError> {
    match cmd {
        Command::TowerSign {
            input,
            tower,
            k_max,
            oracle,
            out,
        } => {
            let group_json: GroupJson = read_json(&tower)?;
            let tower = group_json.to_tower(k_max)?;
            let complex_json: ComplexJson = read_json(&input)?;
            let s = complex_json.to_symmetric_complex(tower.descriptor())?;
            let run = quotient::run_tower(&s, &tower)?;
            let oracle_result = match oracle {
                Some(tol) => l2oracle::signature_oracle(&s, &torus_options(tol))?,
                None => None,
            };
            let csv = tower_sign_csv(&run.rows, oracle_result.as_ref());
            emit(out.as_ref(), &csv)?;
            summarize_tower(&run, oracle_result.as_ref());
            Ok(())
        }
        Command::TowerBetti {
            input,
            tower,
            degrees,
            k_max,
            oracle,
            out,
        } => {
            let group_json: GroupJson = read_json(&tower)?;
            let tower = group_json.to_tower(k_max)?;
            let complex_json: ComplexJson = read_json(&input)?;
            let c = complex_json.to_free_complex(tower.descriptor())?;
            let degrees = if degrees.is_empty() {
                (0..=c.dim()).collect()
            } else {
                degrees
            };
            let rows = quotient::run_tower_betti(&c, &tower, &degrees)?;
            let oracles: Vec<Option<l2oracle::OracleResult>> = match oracle {
                Some(tol) => degrees
                    .iter()
                    .map(|&p| l2oracle::betti_oracle(&c, p, &torus_options(tol)))
                    .collect::<Result<_, _>>()?,
                None => vec![None; degrees.len()],
            };
            let csv = tower_betti_csv(&rows, &degrees, &oracles);
            emit(out.as_ref(), &csv)?;
            Ok(())
        }
        Command::Amenable {
            input,
            exhaustion,
            folner_box,
            operator,
            k_max,
            degrees,
            oracle,
            out,
        } => match (input, operator) {
            (Some(input), None) => {
                let cover_json: CoverJson = read_json(&input)?;
                let e = cover_json.to_complex()?;
                let levels = match (&exhaustion, folner_box) {
                    (Some(path), None) => {
                        let exh: ExhaustionJson = read_json(path)?;
                        exh.to_levels(&e)?
                    }
                    (None, Some(k)) => {
                        if k == 0 {
                            return Err(CoreError::InvalidExhaustion("k must be >= 1".into()));
                        }
                        amenable::box_folner(&e, k)?
                    }
                    _ => {
                        return Err(CoreError::Schema(
                            "provide exactly one of --exhaustion or --folner-box".into(),
                        ))
                    }
                };
                let degrees = if degrees.is_empty() {
                    (0..=e.dim()).collect()
                } else {
                    degrees
                };
                let rows = amenable::run_amenable(&e, &levels, &degrees)?;
                let oracle_result = match oracle {
                    Some(tol) if e.dim() % 4 == 0 && e.dim() > 0 => {
                        let s = amenable::symmetric_complex_from_cover(&e)?;
                        l2oracle::signature_oracle(&s, &torus_options(tol))?
                    }
                    _ => None,
                };
                let csv = amenable_csv(&rows, &degrees, oracle_result.as_ref());
                emit(out.as_ref(), &csv)?;
                Ok(())
            }
            (None, Some(op_path)) => {
                let op: OperatorJson = read_json(&op_path)?;
                let group = op.group.to_descriptor()?;
                let matrix = op.matrix.to_matrix(&group)?;
                let k = k_max.unwrap_or(8);
                if k == 0 {
                    return Err(CoreError::InvalidExhaustion("k must be >= 1".into()));
                }
                let boxes: Vec<Vec<l2sig_core::GroupElement>> =
                    (1..=k as i64).map(|i| group.box_set(i)).collect();
                let rows = amenable::run_operator_mode(&group, &matrix, &boxes)?;
                let oracle_result = match oracle {
                    Some(tol) => {
                        let s = l2sig_core::chain::from_form(&group, matrix.clone(), 1)?;
                        l2oracle::signature_oracle(&s, &torus_options(tol))?
                    }
                    None => None,
                };
                let csv = operator_csv(&rows, oracle_result.as_ref());
                emit(out.as_ref(), &csv)?;
                Ok(())
            }
            _ => Err(CoreError::Schema(
                "provide exactly one of --input or --operator".into(),
            )),
        },
        Command::Diagnose {
            input,
            tower,
            eps_grid,
            seed,
            k_max,
            out,
        } => {
            let group_json: GroupJson = read_json(&tower)?;
            let tower = group_json.to_tower(k_max)?;
            let complex_json: ComplexJson = read_json(&input)?;
            let s = complex_json.to_symmetric_complex(tower.descriptor())?;
            let eps: Vec<Q> = eps_grid
                .iter()
                .map(|x| parse_q(x))
                .collect::<Result<_, _>>()?;
            let bundle = diagnose(&s, &tower, &eps, seed)?;
            let text = serde_json::to_string_pretty(&bundle)?;
            emit(out.as_ref(), &text)?;
            if !out.is_none() {
                eprintln!("diagnose: ok = {}", bundle.ok);
            }
            if bundle.det_bound_breach {
                return Err(CoreError::InvariantViolation(
                    "determinant bound violated on an integer Laplacian".into(),
                ));
            }
            Ok(())
        }
        Command::Validate { input, tower } => {
            let value: serde_json::Value = read_json(&input)?;
            let report = validate_any(&value, tower.as_deref())?;
            println!("{}", serde_json::to_string_pretty(&report)?);
            if report.ok {
                Ok(())
            } else {
                Err(CoreError::Schema(report.describe()))
            }
        }
    }
}

fn summarize_tower(run: &quotient::TowerRun, oracle: Option<&l2oracle::OracleResult>) {
    if let Some(last) = &run.summary.last_sign {
        eprintln!("last sign_k = {}", format_q(last));
        let diffs: Vec<String> = run
            .summary
            .successive_diffs
            .iter()
            .map(format_q)
            .collect();
        eprintln!("successive differences: [{}]", diffs.join(", "));
        if let Some(o) = oracle {
            let gap = (q_to_f64(last) - o.value).abs();
            eprintln!(
                "oracle = {:.9} +- {:.1e}, gap = {:.3e}",
                o.value, o.tolerance, gap
            );
        }
    }
}

#[derive(Serialize)]
struct DiagnoseBundle {
    k_bound: String,
    det_bound: Vec<spectral::DetBoundReport>,
    spec_control: Vec<spectral::SpecControlReport>,
    filters: Vec<FilterSummary>,
    trace_stabilization: TraceStabilization,
    det_bound_breach: bool,
    ok: bool,
}

#[derive(Serialize)]
struct FilterSummary {
    kind: String,
    eps: String,
    degree: usize,
    points_checked: usize,
    ok: bool,
}

#[derive(Serialize)]
struct TraceStabilization {
    lemma: &'static str,
    cases: usize,
    exact_matches: usize,
    applicable: bool,
    ok: bool,
}

fn diagnose(
    s: &l2sig_core::SymmetricComplex,
    tower: &l2sig_core::GroupTower,
    eps_grid: &[Q],
    seed: u64,
) -> Result<DiagnoseBundle, CoreError> {
    let mid = s.middle_degree()?;
    let delta = s.base().laplacian(mid)?;
    let k_bound = delta.norm_bound().max(Q::from_integer(1.into()));
    // The determinant bound is an exact spectral count and runs on the full
    // epsilon grid. The polynomial-filter diagnostics have degree growing
    // like (K/eps)^2, so tiny epsilons are clamped for those.
    let mut filter_eps: Vec<Q> = eps_grid
        .iter()
        .map(|e| e.clone().max(q_ratio(1, 8)))
        .collect();
    filter_eps.sort();
    filter_eps.dedup();
    let mut det_bound = Vec::new();
    let mut spec_control = Vec::new();
    for level in tower.levels() {
        let pushed = quotient::pushed_laplacian(s.base(), mid, level)?;
        let scale = Q::from_integer(1.into()) / level.index_q();
        det_bound.push(spectral::check_small_eigenvalue_bound(
            &delta, &pushed, &scale, &k_bound, eps_grid,
        )?);
        for eps in &filter_eps {
            spec_control.push(spectral::replay_spec_control(s, level, eps)?);
        }
    }
    let mut filters = Vec::new();
    for eps in &filter_eps {
        let f = spectral::build_p_eps(eps, &k_bound)?;
        filters.push(FilterSummary {
            kind: "p_eps".into(),
            eps: format_q(eps),
            degree: f.degree(),
            points_checked: f.check.points_checked,
            ok: f.check.ok,
        });
    }
    // one indicator filter over the positive half of the spectrum
    let q_eps = q_ratio(1, 4);
    let f = spectral::build_q_eps(&q_int(0), &k_bound, &q_eps, &k_bound)?;
    filters.push(FilterSummary {
        kind: "q_eps".into(),
        eps: format_q(&q_eps),
        degree: f.degree(),
        points_checked: f.check.points_checked,
        ok: f.check.ok,
    });
    let trace_stabilization = trace_stabilization(s, tower, seed)?;
    let integer = delta.first_non_integer().is_none();
    let det_bound_breach = integer && det_bound.iter().any(|r| !r.ok);
    let ok = det_bound.iter().all(|r| r.ok || !r.integer_precondition)
        && spec_control.iter().all(|r| r.non_negative)
        && filters.iter().all(|f| f.ok)
        && trace_stabilization.ok;
    Ok(DiagnoseBundle {
        k_bound: format_q(&k_bound),
        det_bound,
        spec_control,
        filters,
        trace_stabilization,
        det_bound_breach,
        ok,
    })
}

/// Trace stabilization on random group-ring matrices: the normalized
/// pushed trace must equal the von Neumann trace exactly once the modulus
/// clears twice the accumulated support width.
fn trace_stabilization(
    s: &l2sig_core::SymmetricComplex,
    tower: &l2sig_core::GroupTower,
    seed: u64,
) -> Result<TraceStabilization, CoreError> {
    use l2sig_core::{GroupElement, GroupRingElement, GroupRingMatrix};
    let group = s.group();
    let Some(rank) = group.free_rank() else {
        return Ok(TraceStabilization {
            lemma: "trace stabilization",
            cases: 0,
            exact_matches: 0,
            applicable: false,
            ok: true,
        });
    };
    let width = 1i64;
    let degree = 3usize;
    let threshold = 2 * degree as u64 * width as u64;
    let levels: Vec<_> = tower
        .levels()
        .iter()
        .filter(|l| l.modulus().map_or(false, |m| m > threshold))
        .collect();
    if levels.is_empty() {
        return Ok(TraceStabilization {
            lemma: "trace stabilization",
            cases: 0,
            exact_matches: 0,
            applicable: false,
            ok: true,
        });
    }
    let mut rng = StdRng::seed_from_u64(seed);
    let mut random_matrix = |n: usize| -> GroupRingMatrix {
        let mut m = GroupRingMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut entry = GroupRingElement::zero();
                for _ in 0..rng.gen_range(0..=2) {
                    let v: Vec<i64> = (0..rank).map(|_| rng.gen_range(-width..=width)).collect();
                    let c = q_int(rng.gen_range(-3i64..=3));
                    entry.add_term(GroupElement::Vector(v), &c);
                }
                m.set(i, j, entry);
            }
        }
        m
    };
    let mut cases = 0usize;
    let mut exact = 0usize;
    for _ in 0..20 {
        let hs: Vec<GroupRingMatrix> = (0..degree).map(|_| random_matrix(2)).collect();
        let mut prod = hs[0].clone();
        for h in &hs[1..] {
            prod = prod.mul(h, group)?;
        }
        let vn = prod.vn_trace(group)?;
        for level in &levels {
            cases += 1;
            let mut pushed = hs[0].push_ring(level)?;
            for h in &hs[1..] {
                pushed = pushed.mul(&h.push_ring(level)?, level)?;
            }
            if pushed.normalized_trace(level)? == vn {
                exact += 1;
            }
        }
    }
    Ok(TraceStabilization {
        lemma: "trace stabilization",
        cases,
        exact_matches: exact,
        applicable: true,
        ok: exact == cases,
    })
}

#[derive(Serialize)]
struct ValidateReport {
    input_kind: String,
    ok: bool,
    findings: Vec<String>,
}

impl ValidateReport {
    fn describe(&self) -> String {
        format!("{} validation failed: {:?}", self.input_kind, self.findings)
    }
}

fn validate_any(
    value: &serde_json::Value,
    tower: Option<&Path>,
) -> Result<ValidateReport, CoreError> {
    let obj = value
        .as_object()
        .ok_or_else(|| CoreError::Schema("input must be a JSON object".into()))?;
    if obj.contains_key("orbits") || obj.contains_key("simplices") {
        let cover: CoverJson = serde_json::from_value(value.clone())?;
        let mut findings = Vec::new();
        match cover.to_complex() {
            Ok(e) => {
                let rep = l2sig_core::simplicial::validate_cover_manifold(&e)?;
                for (o, msg) in &rep.failures {
                    findings.push(format!("orbit {}: {}", e.orbit(*o).name, msg));
                }
            }
            Err(e) => findings.push(e.to_string()),
        }
        return Ok(ValidateReport {
            input_kind: "equivariant complex".into(),
            ok: findings.is_empty(),
            findings,
        });
    }
    if obj.contains_key("ranks") {
        let tower_path = tower.ok_or_else(|| {
            CoreError::Schema("complex validation needs --tower for the group".into())
        })?;
        let group_json: GroupJson = read_json(tower_path)?;
        let group = group_json.to_descriptor()?;
        let complex: ComplexJson = serde_json::from_value(value.clone())?;
        let mut findings = Vec::new();
        if complex.duality.is_some() {
            match complex.to_symmetric_complex(&group) {
                Ok(s) => {
                    let r = s.validate()?;
                    if !r.ok() {
                        findings.push(r.describe());
                    }
                }
                Err(e) => findings.push(e.to_string()),
            }
        } else if let Err(e) = complex.to_free_complex(&group) {
            findings.push(e.to_string());
        }
        return Ok(ValidateReport {
            input_kind: "chain complex".into(),
            ok: findings.is_empty(),
            findings,
        });
    }
    if obj.contains_key("matrix") {
        let op: OperatorJson = serde_json::from_value(value.clone())?;
        let group = op.group.to_descriptor()?;
        let mut findings = Vec::new();
        match op.matrix.to_matrix(&group) {
            Ok(m) => {
                if !m.is_self_adjoint(&group)? {
                    findings.push("operator is not self-adjoint".into());
                }
            }
            Err(e) => findings.push(e.to_string()),
        }
        return Ok(ValidateReport {
            input_kind: "operator".into(),
            ok: findings.is_empty(),
            findings,
        });
    }
    Err(CoreError::Schema(
        "unrecognized input: expected a complex, cover, or operator".into(),
    ))
}

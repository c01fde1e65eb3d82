use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use sqdist::formulas::DetResult;
use sqdist::linalg::{lu_inverse, lu_log_det};
use sqdist::matrices::{self, TreeMatrices};
use sqdist::verify::Tolerances;
use sqdist::{
    det_formula, fuzz, golden, inverse_formula, parse_tree_file, replay, write_tree_file, DenseMatrix, DetBranch,
    Error, FuzzConfig, FuzzReport, ResidualReport, Verdict, WeightedTree,
};

use crate::render::{exact_integer, exact_table, factor_value, has_integer_weights, sci12, table};
use crate::{Cli, Command, ExampleName, FuzzArgs, MatrixKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    CheckFailed,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Outcome::Success => 0,
            Outcome::CheckFailed => 1,
        }
    }

    fn from_pass(pass: bool) -> Self {
        if pass {
            Outcome::Success
        } else {
            Outcome::CheckFailed
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Read { path: PathBuf, source: std::io::Error },
    Library(Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Read { path, source } => write!(f, "cannot read {}: {source}", path.display()),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Library(e)
    }
}

impl CliError {
    /// 1 when the input is valid but a formula does not apply to it, 2 for
    /// anything wrong with the invocation or the input itself.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Library(
                Error::Degree2Present { .. }
                | Error::BetaSingular { .. }
                | Error::Singular { .. }
                | Error::IllConditioned { .. },
            ) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> Result<Outcome> {
    let json = cli.json;
    let (text, outcome) = match &cli.command {
        Command::Det { file } => det(&load(file)?, json)?,
        Command::Inv { file, check } => inv(&load(file)?, *check, json)?,
        Command::Verify { file } => verify(&load(file)?, json),
        Command::Dump { file, matrix, lifted } => dump(&load(file)?, *matrix, *lifted, json)?,
        Command::Fuzz(args) => fuzz_cmd(args, json)?,
        Command::Example { name } => {
            let name = match name {
                ExampleName::T1 => "t1",
                ExampleName::T2 => "t2",
            };
            (golden::source(name)?.to_string(), Outcome::Success)
        }
    };
    print!("{text}");
    Ok(outcome)
}

fn load(path: &Path) -> Result<WeightedTree> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_tree_file(&text)?)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn branch_detail(branch: &DetBranch) -> String {
    match branch {
        DetBranch::NoDeg2 => "NoDeg2".into(),
        DetBranch::OneDeg2 { vertex, edges: (i, j) } => {
            format!("OneDeg2 (vertex {}, edges {} and {})", vertex + 1, i + 1, j + 1)
        }
        DetBranch::TwoPlusDeg2 { count } => format!("TwoPlusDeg2 ({count} degree-2 vertices)"),
    }
}

/// `(-1)^6 · 2^6 · 1 · 16 · 100`
pub fn factor_breakdown(d: &DetResult) -> String {
    d.factors
        .iter()
        .map(|f| f.symbol.clone().unwrap_or_else(|| factor_value(f.value.value().0)))
        .collect::<Vec<_>>()
        .join(" · ")
}

fn det(t: &WeightedTree, json: bool) -> Result<(String, Outcome)> {
    let d = det_formula(t)?;
    let lu = lu_log_det(&matrices::squared_distance_matrix(t))?;
    let (lu_value, _) = lu.value();
    let exact = exact_integer(d.value, has_integer_weights(t));
    let breakdown = factor_breakdown(&d);

    if json {
        let (vertex, edges) = match d.branch {
            DetBranch::OneDeg2 { vertex, edges: (i, j) } => (Some(vertex + 1), Some([i + 1, j + 1])),
            _ => (None, None),
        };
        let factors: Vec<_> = d
            .factors
            .iter()
            .map(|f| {
                json!({
                    "name": f.name,
                    "symbol": f.symbol,
                    "value": f.value.value().0,
                })
            })
            .collect();
        let record = json!({
            "branch": d.branch.name(),
            "degree_two_vertex": vertex,
            "path_pair_edges": edges,
            "value": d.value,
            "exact": exact,
            "saturated": d.saturated,
            "sign": d.log_det.sign,
            "ln_abs": d.log_det.ln_abs,
            "factors": factors,
            "breakdown": breakdown,
            "lu_value": lu_value,
            "lu_ln_abs": lu.ln_abs,
        });
        return Ok((to_json(&record), Outcome::Success));
    }

    let mut out = String::new();
    writeln!(out, "branch   {}", branch_detail(&d.branch)).unwrap();
    let sat = if d.saturated { "  (outside binary64 range)" } else { "" };
    writeln!(out, "value    {}{sat}", sci12(d.value)).unwrap();
    if let Some(k) = exact {
        writeln!(out, "exact    {k}").unwrap();
    }
    writeln!(out, "ln|det|  {}", sci12(d.log_det.ln_abs)).unwrap();
    writeln!(out, "factors  {breakdown}").unwrap();
    let rows: Vec<Vec<String>> = d
        .factors
        .iter()
        .map(|f| {
            vec![
                f.name.to_string(),
                f.symbol.clone().unwrap_or_default(),
                factor_value(f.value.value().0),
            ]
        })
        .collect();
    for line in table(&["factor", "power", "value"], &rows).lines() {
        writeln!(out, "  {line}").unwrap();
    }
    writeln!(out, "lu       {}", sci12(lu_value)).unwrap();
    Ok((out, Outcome::Success))
}

fn inv(t: &WeightedTree, check: bool, json: bool) -> Result<(String, Outcome)> {
    let inv = inverse_formula(t)?;
    let tol = Tolerances::default();
    let checked = if check {
        let delta = matrices::squared_distance_matrix(t);
        let lu = lu_inverse(&delta)?;
        let identity = DenseMatrix::identity(delta.rows());
        let residual = (&(&delta * &inv.delta_inv) - &identity).fro_norm();
        let relative = (&inv.delta_inv - &lu).fro_norm() / lu.fro_norm();
        Some((residual, relative, relative <= tol.inverse))
    } else {
        None
    };
    let outcome = Outcome::from_pass(checked.is_none_or(|c| c.2));

    if json {
        let mut record = json!({
            "delta_inv": inv.delta_inv.to_rows(),
            "beta": inv.beta.to_rows(),
            "eta": inv.eta.to_rows(),
        });
        if let Some((residual, relative, pass)) = checked {
            record["check"] = json!({
                "residual": residual,
                "relative_to_lu": relative,
                "tolerance": tol.inverse,
                "verdict": if pass { "pass" } else { "fail" },
            });
        }
        return Ok((to_json(&record), outcome));
    }

    let mut out = String::new();
    writeln!(out, "beta\n{:.6}", inv.beta).unwrap();
    writeln!(out, "inverse\n{:.6}", inv.delta_inv).unwrap();
    if let Some((residual, relative, pass)) = checked {
        writeln!(out, "|Δ·Δ⁻¹ − I|_F          {residual:.3e}").unwrap();
        writeln!(out, "|formula − LU|/|LU|    {relative:.3e}  (tolerance {:.0e})", tol.inverse).unwrap();
        writeln!(out, "check                  {}", if pass { "pass" } else { "fail" }).unwrap();
    }
    Ok((out, outcome))
}

#[derive(Serialize)]
struct CheckRecord<'a> {
    identity: &'a str,
    ratio: f64,
    verdict: &'a str,
    regime: &'a str,
}

fn report_lines(reports: &[ResidualReport], json: bool) -> String {
    if json {
        return reports
            .iter()
            .map(|r| {
                let rec = CheckRecord {
                    identity: r.identity.name(),
                    ratio: r.ratio,
                    verdict: r.verdict.name(),
                    regime: r.regime.name(),
                };
                serde_json::to_string(&rec).expect("records serialize") + "\n"
            })
            .collect();
    }
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let verdict = match (r.verdict, r.asserted) {
                (Verdict::Fail, false) => "fail (observed)".to_string(),
                (v, _) => v.name().to_string(),
            };
            vec![
                r.identity.name().to_string(),
                if r.verdict == Verdict::Skip { "-".into() } else { format!("{:.3e}", r.ratio) },
                format!("{:.0e}", r.tolerance),
                verdict,
                r.regime.name().to_string(),
                r.note.clone().unwrap_or_default(),
            ]
        })
        .collect();
    let mut out = table(&["identity", "ratio", "tol", "verdict", "regime", "note"], &rows);
    let count = |v| reports.iter().filter(|r| r.verdict == v).count();
    writeln!(
        out,
        "{} pass, {} fail, {} skip",
        count(Verdict::Pass),
        count(Verdict::Fail),
        count(Verdict::Skip)
    )
    .unwrap();
    out
}

fn verify(t: &WeightedTree, json: bool) -> (String, Outcome) {
    let reports = sqdist::run_all(t);
    let pass = !reports.iter().any(ResidualReport::is_hard_failure);
    (report_lines(&reports, json), Outcome::from_pass(pass))
}

fn dump(t: &WeightedTree, kind: MatrixKind, lifted: bool, json: bool) -> Result<(String, Outcome)> {
    if kind == MatrixKind::Tree {
        return Ok((write_tree_file(t), Outcome::Success));
    }
    let m = TreeMatrices::build(t);
    let (name, matrix) = match kind {
        MatrixKind::D => ("D", m.d),
        MatrixKind::Delta => ("delta", m.delta),
        MatrixKind::L => ("L", m.l),
        MatrixKind::Q if lifted => ("Q", m.qi),
        MatrixKind::Q => ("Q", matrices::incidence_unlifted(t)),
        MatrixKind::H if lifted => ("H", m.hi),
        MatrixKind::H => ("H", matrices::edge_orientation_unlifted(t)),
        MatrixKind::F => ("F", m.f),
        MatrixKind::Beta => ("beta", sqdist::beta(t)?),
        MatrixKind::Eta => ("eta", sqdist::eta(t)?),
        MatrixKind::Tree => unreachable!(),
    };
    let text = if json {
        to_json(&json!({
            "matrix": name,
            "rows": matrix.rows(),
            "cols": matrix.cols(),
            "data": matrix.to_rows(),
        }))
    } else {
        exact_table(&matrix)
    };
    Ok((text, Outcome::Success))
}

fn fuzz_config(args: &FuzzArgs) -> FuzzConfig {
    let mut tolerances = Tolerances::default();
    if let Some(x) = args.tol_identity {
        tolerances.identity = x;
    }
    if let Some(x) = args.tol_det {
        tolerances.det_log = x;
    }
    if let Some(x) = args.tol_inverse {
        tolerances.inverse = x;
    }
    if let Some(x) = args.tol_pivot {
        tolerances.singular_pivot = x;
    }
    FuzzConfig {
        trials: args.trials,
        n_range: args.n_range,
        s_range: args.s_range,
        weight_mode: args.mode,
        topology: args.topology,
        seed: args.seed,
        tolerances,
    }
}

fn fuzz_cmd(args: &FuzzArgs, json: bool) -> Result<(String, Outcome)> {
    let cfg = fuzz_config(args);
    if let Some(k) = args.replay {
        let (inst, reports) = replay(&cfg, k)?;
        let pass = !reports.iter().any(ResidualReport::is_hard_failure);
        let mut out = String::new();
        if !json {
            writeln!(out, "trial {k} of seed {}", cfg.seed).unwrap();
            out.push_str(&write_tree_file(&inst.tree));
        }
        out.push_str(&report_lines(&reports, json));
        return Ok((out, Outcome::from_pass(pass)));
    }
    let report = fuzz(&cfg)?;
    let outcome = Outcome::from_pass(report.all_passed());
    let text = if json { to_json(&report) } else { fuzz_summary(args, &report) };
    Ok((text, outcome))
}

/// The name a value parses from on the command line.
fn kebab<T: Serialize>(value: &T) -> String {
    serde_json::to_value(value)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn fuzz_summary(args: &FuzzArgs, report: &FuzzReport) -> String {
    let cfg = &report.config;
    let mut out = String::new();
    writeln!(
        out,
        "{} trials, n {}:{}, s {}:{}, mode {}, topology {}, seed {}",
        cfg.trials,
        cfg.n_range.0,
        cfg.n_range.1,
        cfg.s_range.0,
        cfg.s_range.1,
        kebab(&cfg.weight_mode),
        kebab(&cfg.topology),
        cfg.seed
    )
    .unwrap();
    let regimes: Vec<String> = report.regimes.iter().map(|(k, v)| format!("{k} {v}")).collect();
    writeln!(out, "regimes: {}", regimes.join(", ")).unwrap();

    let rows: Vec<Vec<String>> = report
        .identities
        .iter()
        .map(|st| {
            vec![
                st.identity.name().to_string(),
                st.pass.to_string(),
                st.fail.to_string(),
                st.skip.to_string(),
                format!("{:.3e}", st.max_ratio),
                format!("{:.3e}", st.mean_ratio),
                format!("{:.0e}", st.tolerance),
                st.worst.as_ref().map_or("-".into(), |w| w.trial.to_string()),
                if st.exceeds_tolerance { "exceeds".into() } else { String::new() },
            ]
        })
        .collect();
    out.push_str(&table(
        &["identity", "pass", "fail", "skip", "max ratio", "mean ratio", "tol", "worst", ""],
        &rows,
    ));

    let det = &report.det;
    let branches: Vec<String> = det.branches.iter().map(|(k, v)| format!("{k} {v}")).collect();
    writeln!(out, "det branches: {}", branches.join(", ")).unwrap();
    writeln!(
        out,
        "det: {} compared, max log error {:.3e}; {}/{} singular certified, max pivot ratio {:.3e}",
        det.compared, det.max_log_error, det.singular_certified, det.singular_trials, det.max_singular_pivot_ratio
    )
    .unwrap();
    let inv = &report.inverse;
    writeln!(
        out,
        "inverse: {} compared, {} skipped, max relative error {:.3e}",
        inv.compared, inv.skipped, inv.max_relative_error
    )
    .unwrap();

    if report.failures.is_empty() {
        out.push_str("failures: none\n");
    } else {
        writeln!(out, "failures: {}", report.failures.len()).unwrap();
        for f in &report.failures {
            writeln!(
                out,
                "  trial {} {} ratio {:.3e} (n={}, s={}); replay with --seed {} --replay {}",
                f.trial,
                f.identity.name(),
                f.ratio,
                f.n,
                f.s,
                f.seed,
                f.trial
            )
            .unwrap();
        }
        writeln!(
            out,
            "  (replays need the same --n {}:{} --s {}:{} --mode and --topology)",
            args.n_range.0, args.n_range.1, args.s_range.0, args.s_range.1
        )
        .unwrap();
    }
    out
}

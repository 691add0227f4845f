use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Map, Value};

use dpskit::applications::{
    bb84_two_copy_problem, choi_from_kraus, depolarizing_choi, fidelity_bounds, geometric_entanglement_bounds,
    ghz_state, output_purity_bounds, qutrit_grid_problem, sweep_point, w_state, BoundPair, EstimationProblem,
    SweepRow,
};
use dpskit::bounds::{bound_report, complexity_estimate, BoundReport};
use dpskit::extension::{check_membership, ExtensionQuery, PptCuts, Verdict};
use dpskit::optimality::certify;
use dpskit::{CMatrix, Error, HermitianOperator};

use crate::{
    BoundsArgs, CertifyArgs, Cli, Command, ComplexityArgs, Cuts, FidelityArgs, GeometricArgs, MembershipArgs,
    NamedState, PurityArgs, SweepArgs,
};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Budget(String),
    Breakdown(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Budget(m) => write!(f, "resource budget: {m}"),
            CliError::Breakdown(m) => write!(f, "solver breakdown: {m}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            Error::SolverBreakdown(_) | Error::EigenNoConvergence | Error::Infeasible => {
                CliError::Breakdown(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub fn run(cli: &Cli) -> CliResult<()> {
    let mut out: Box<dyn Write> = match &cli.out {
        Some(p) => Box::new(fs::File::create(p)?),
        None => Box::new(io::stdout().lock()),
    };
    match &cli.command {
        Command::Membership(a) => membership(a, cli.jobs, &mut out),
        Command::Bounds(a) => bounds(a, &mut out),
        Command::Fidelity(a) => fidelity(a, cli.jobs, &mut out),
        Command::Purity(a) => purity(a, cli.jobs, &mut out),
        Command::Geometric(a) => geometric(a, cli.jobs, &mut out),
        Command::Certify(a) => certify_cmd(a, &mut out),
        Command::Complexity(a) => complexity(a, &mut out),
    }
}

/// `"3"` or `"2..5"` (inclusive).
pub fn parse_range(s: &str) -> CliResult<Vec<usize>> {
    let bad = || CliError::Input(format!("bad N range {s:?}; expected N or A..B"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let v: usize = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let raw = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Maps `f` over `items` on up to `jobs` threads, keeping input order.
pub fn par_map<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<R>>> = items.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                *slots[i].lock().expect("slot lock") = Some(r);
            });
        }
    });
    slots
        .into_iter()
        .map(|m| m.into_inner().expect("slot lock").expect("every slot filled"))
        .collect()
}

fn membership(a: &MembershipArgs, jobs: usize, out: &mut dyn Write) -> CliResult<()> {
    let rho: HermitianOperator = read_json(&a.input)?;
    if rho.dims().len() != 2 {
        return Err(CliError::Input("membership expects a bipartite operator".into()));
    }
    if rho.min_eigenvalue()? < -1e-9 || (rho.trace() - 1.0).abs() > 1e-9 {
        return Err(CliError::Input("input is not a normalized state".into()));
    }
    let ns = parse_range(&a.n)?;
    let cuts = match a.cuts {
        Cuts::Half => PptCuts::Half,
        Cuts::All => PptCuts::All,
    };
    let results = par_map(&ns, jobs, |&n| {
        let mut q = ExtensionQuery::membership(rho.clone(), n, a.ppt).with_cuts(cuts);
        if let Some(tol) = a.tol {
            q.solver.tol = tol;
        }
        check_membership(&q)
    });
    let mut map = Map::new();
    for (n, r) in ns.iter().zip(results) {
        let label = match r?.verdict {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::Undecided => "undecided",
        };
        map.insert(n.to_string(), json!(label));
    }
    writeln!(out, "{}", Value::Object(map))?;
    Ok(())
}

fn bounds(a: &BoundsArgs, out: &mut dyn Write) -> CliResult<()> {
    let ns = parse_range(&a.n)?;
    let extra = a.delta.map(|d| complexity_estimate(a.d_a, a.d_b, d)).transpose()?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = BoundReport::CSV_HEADER.to_vec();
    if extra.is_some() {
        header.extend(["N_sym", "N_ppt", "log_ops_sym", "log_ops_ppt"]);
    }
    w.write_record(&header)?;
    for n in ns {
        let mut row = bound_report(a.d_a, a.d_b, n)?.csv_row();
        if let Some(c) = &extra {
            row.extend([
                c.n_sym.to_string(),
                c.n_ppt.to_string(),
                format!("{:.6}", c.sym_ops),
                format!("{:.6}", c.ppt_ops),
            ]);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn sweep<F>(s: &SweepArgs, jobs: usize, out: &mut dyn Write, f: F) -> CliResult<()>
where
    F: Fn(usize, bool) -> dpskit::Result<BoundPair> + Sync,
{
    let ns = parse_range(&s.n)?;
    let modes: &[bool] = if s.ppt { &[true] } else { &[false, true] };
    let points: Vec<(usize, bool)> = modes.iter().flat_map(|&p| ns.iter().map(move |&n| (n, p))).collect();
    let rows: Vec<SweepRow> = par_map(&points, jobs, |&(n, ppt)| sweep_point(n, ppt, &f));
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SweepRow::CSV_HEADER)?;
    for r in &rows {
        w.write_record(r.csv_row())?;
    }
    w.flush()?;
    Ok(())
}

fn fidelity(a: &FidelityArgs, jobs: usize, out: &mut dyn Write) -> CliResult<()> {
    let problem: EstimationProblem = match (a.bb84, a.qutrit_grid, &a.input) {
        (Some(eps), _, _) => bb84_two_copy_problem(eps)?,
        (_, Some(eps), _) => qutrit_grid_problem(eps)?,
        (_, _, Some(path)) => read_json(path)?,
        _ => return Err(CliError::Input("one of --bb84, --qutrit-grid or --input is required".into())),
    };
    sweep(&a.sweep, jobs, out, |n, ppt| fidelity_bounds(&problem, n, ppt))
}

fn purity(a: &PurityArgs, jobs: usize, out: &mut dyn Write) -> CliResult<()> {
    let choi = match (a.depolarizing, a.identity_qubit, &a.input) {
        (Some(p), _, _) => depolarizing_choi(a.dim, p)?,
        (_, true, _) => choi_from_kraus(&[CMatrix::identity(2, 2)])?,
        (_, _, Some(path)) => read_json(path)?,
        _ => return Err(CliError::Input("one of --depolarizing, --identity-qubit or --input is required".into())),
    };
    sweep(&a.sweep, jobs, out, |n, ppt| output_purity_bounds(&choi, n, ppt))
}

fn geometric(a: &GeometricArgs, jobs: usize, out: &mut dyn Write) -> CliResult<()> {
    let psi: HermitianOperator = match (a.state, &a.input) {
        (Some(NamedState::Ghz), _) => ghz_state(),
        (Some(NamedState::W), _) => w_state(),
        (Some(NamedState::Product), _) => HermitianOperator::diagonal(vec![2, 2, 2], &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0])?,
        (None, Some(path)) => read_json(path)?,
        (None, None) => return Err(CliError::Input("one of --state or --input is required".into())),
    };
    sweep(&a.sweep, jobs, out, |n, ppt| geometric_entanglement_bounds(&psi, n, ppt))
}

fn certify_cmd(a: &CertifyArgs, out: &mut dyn Write) -> CliResult<()> {
    let rho: HermitianOperator = read_json(&a.input)?;
    let c = certify(&rho, a.max_n, a.delta)?;
    writeln!(out, "{}", c.to_json())?;
    Ok(())
}

fn complexity(a: &ComplexityArgs, out: &mut dyn Write) -> CliResult<()> {
    let c = complexity_estimate(a.d_a, a.d_b, a.delta)?;
    let v = serde_json::to_value(c).map_err(|e| CliError::Io(e.to_string()))?;
    writeln!(out, "{v}")?;
    Ok(())
}

//! Command-line driver: solve the Bethe equations, evaluate determinant
//! formulas, run the oracle verification suites and rebuild the tables.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::json;
use twisted_xxz::bae::{max_residual, solve_bae, SolverConfig};
use twisted_xxz::detforms::{self, ON_SHELL_TOL};
use twisted_xxz::homolimit::{self, extrapolate_epsilon, EpsilonGrid, Follow, Method};
use twisted_xxz::model::{ChainParams, RootSet, RootSetRecord};
use twisted_xxz::oracle::{self, MAX_SITES};
use twisted_xxz::report::{fmt_complex, fmt_real, ResultRecord};
use twisted_xxz::tables::build_tables;
use twisted_xxz::verify::{run_verify, Suite, VerifyConfig};
use twisted_xxz::Error;

const EXIT_FAILED_CHECK: u8 = 1;
const EXIT_NO_SOLUTIONS: u8 = 2;
const EXIT_OFF_SHELL: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// Largest chain for which `solve` cross-checks roots against the transfer
/// matrix spectrum.
const CERTIFY_MAX_SITES: usize = 8;

#[derive(Parser, Debug)]
#[command(
    name = "twisted-xxz",
    version,
    about = "Antiperiodic XXZ chain: Bethe roots, determinant formulas, oracle checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the Bethe equations by multi-start Newton and write the root sets.
    Solve(SolveArgs),
    /// Evaluate a scalar product, form factor or correlator.
    Eval(EvalArgs),
    /// Compare determinant formulas and algebraic identities against the oracle.
    Verify(VerifyArgs),
    /// Rebuild the homogeneous N=3 reference tables.
    Tables(TablesArgs),
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    sites: usize,
    /// `RE` or `RE,IM`.
    #[arg(long, value_parser = parse_complex, default_value = "1")]
    eta: Complex64,
    /// Comma-separated inhomogeneities, each `RE` or `RE:IM`; all zero if omitted.
    #[arg(long, value_parser = parse_list)]
    theta: Option<ComplexList>,
    #[arg(long, default_value_t = 200)]
    starts: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EvalKind {
    Scalar,
    Sminus,
    Sz,
    Mm,
    Zz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum EvalMethod {
    Jet,
    Epsilon,
    Inhomogeneous,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long, value_enum)]
    kind: EvalKind,
    /// RootSet JSON (a record or an array of records) for the left state.
    #[arg(long)]
    left: PathBuf,
    #[arg(long)]
    right: PathBuf,
    /// Position in the file when it holds an array of records.
    #[arg(long, default_value_t = 0)]
    left_index: usize,
    #[arg(long, default_value_t = 0)]
    right_index: usize,
    /// Defaults to 1 for one-site kinds and 2 for two-site kinds.
    #[arg(long)]
    site: Option<usize>,
    /// Must agree with the root files when given.
    #[arg(long)]
    sites: Option<usize>,
    #[arg(long, value_enum)]
    method: Option<EvalMethod>,
    #[arg(long, value_parser = parse_list)]
    theta: Option<ComplexList>,
    /// Largest accepted extrapolation error estimate.
    #[arg(long, default_value_t = 1e-6)]
    extrapolation_tol: f64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    sites: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    All,
    Algebra,
    Scalar,
    Ff,
    Cf,
}

#[derive(Args, Debug)]
struct TablesArgs {
    #[arg(long, value_parser = parse_complex, default_value = "1")]
    eta: Complex64,
    #[arg(long, default_value_t = 3)]
    sites: usize,
    /// `1`..`5` or `all`; several tables print as blank-line separated CSV blocks.
    #[arg(long, default_value = "all")]
    which: String,
    /// Emit JSON instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Debug)]
struct ComplexList(Vec<Complex64>);

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim().parse::<f64>().map_err(|e| format!("'{s}': {e}"))
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split([',', ':']).collect();
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse_f64(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
        _ => Err(format!("expected RE or RE,IM, got '{s}'")),
    }
}

fn parse_list(s: &str) -> Result<ComplexList, String> {
    s.split(',')
        .map(|item| {
            let parts: Vec<&str> = item.split(':').collect();
            match parts.as_slice() {
                [re] => Ok(Complex64::new(parse_f64(re)?, 0.0)),
                [re, im] => Ok(Complex64::new(parse_f64(re)?, parse_f64(im)?)),
                _ => Err(format!("expected RE or RE:IM, got '{item}'")),
            }
        })
        .collect::<Result<_, _>>()
        .map(ComplexList)
}

/// Failure of a command, mapped onto its exit code.
enum Failure {
    Usage(String),
    OffShell(String),
    Check(String),
    NoSolutions,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::OffShell { .. } => Failure::OffShell(e.to_string()),
            Error::OracleCap { .. } | Error::InvalidParams(_) | Error::Dimension(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Check(other.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn params_from(
    n: usize,
    eta: Complex64,
    theta: Option<&ComplexList>,
) -> Result<ChainParams, Failure> {
    Ok(match theta {
        Some(t) => ChainParams::new(n, eta, t.0.clone())?,
        None => ChainParams::homogeneous(n, eta)?,
    })
}

fn cmd_solve(a: SolveArgs) -> CmdResult {
    if a.sites > MAX_SITES {
        return Err(Error::OracleCap {
            n: a.sites,
            max: MAX_SITES,
        }
        .into());
    }
    let p = params_from(a.sites, a.eta, a.theta.as_ref())?;
    let cfg = SolverConfig {
        n_starts: a.starts,
        seed: a.seed,
        tol: a.tol,
        ..Default::default()
    };
    let report = solve_bae(&p, &cfg)?;
    let n_sols = report.solutions.len();
    println!(
        "{n_sols} root set(s), {} converged start(s)",
        report.diagnostics.converged_starts
    );
    for (k, rs) in report.solutions.iter().enumerate() {
        let roots: Vec<String> = rs.iter().map(|&z| fmt_complex(z)).collect();
        let cert = if p.n_sites <= CERTIFY_MAX_SITES {
            format!(
                " spectrum_distance={}",
                fmt_real(oracle::transfer_spectrum_distance(&p, rs)?)
            )
        } else {
            String::new()
        };
        println!(
            "[{k}] residual={}{cert} roots=[{}]",
            fmt_real(rs.residual),
            roots.join(", ")
        );
    }
    if !report.diagnostics.singular_clusters.is_empty() || report.diagnostics.eta_strings > 0 {
        println!(
            "excluded: {} singular cluster(s), {} eta-string hit(s)",
            report.diagnostics.singular_clusters.len(),
            report.diagnostics.eta_strings
        );
    }
    if let Some(path) = &a.out {
        let records: Vec<RootSetRecord> = report
            .solutions
            .iter()
            .map(|rs| rs.to_record(p.eta))
            .collect();
        fs::write(
            path,
            serde_json::to_string_pretty(&records).map_err(Error::from)?,
        )
        .map_err(Error::from)?;
    }
    if n_sols == 0 {
        return Err(Failure::NoSolutions);
    }
    Ok(())
}

fn load_record(path: &PathBuf, index: usize) -> Result<RootSetRecord, Failure> {
    let text = fs::read_to_string(path).map_err(Error::from)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let record = match value {
        serde_json::Value::Array(items) => items
            .into_iter()
            .nth(index)
            .ok_or_else(|| Failure::Usage(format!("{} has no record {index}", path.display())))?,
        other => other,
    };
    Ok(serde_json::from_value(record).map_err(Error::from)?)
}

fn cmd_eval(a: EvalArgs) -> CmdResult {
    let lrec = load_record(&a.left, a.left_index)?;
    let rrec = load_record(&a.right, a.right_index)?;
    let n = lrec.n;
    if rrec.n != n || a.sites.is_some_and(|s| s != n) {
        return Err(Failure::Usage(format!(
            "site counts disagree: left {n}, right {}, flag {:?}",
            rrec.n, a.sites
        )));
    }
    let eta: Complex64 = lrec.eta.into();
    let site = a
        .site
        .unwrap_or(if matches!(a.kind, EvalKind::Mm | EvalKind::Zz) {
            2
        } else {
            1
        });
    let (u, l) = (lrec.to_root_set()?, rrec.to_root_set()?);
    let method = a.method.unwrap_or(if a.theta.is_some() {
        EvalMethod::Inhomogeneous
    } else {
        EvalMethod::Jet
    });
    let p = match method {
        EvalMethod::Inhomogeneous => {
            let theta = a
                .theta
                .as_ref()
                .ok_or_else(|| Failure::Usage("--method inhomogeneous needs --theta".into()))?;
            params_from(n, eta, Some(theta))?
        }
        _ => ChainParams::homogeneous(n, eta)?,
    };
    // Root files are always re-certified against the chain they are used on.
    let (res_l, res_r) = (max_residual(&p, &u), max_residual(&p, &l));
    let needs_on_shell = a.kind != EvalKind::Scalar;
    if needs_on_shell && (res_l > ON_SHELL_TOL || res_r > ON_SHELL_TOL) {
        let report = json!({"left_residual": res_l, "right_residual": res_r, "tol": ON_SHELL_TOL});
        return Err(Failure::OffShell(report.to_string()));
    }
    let (value, method_name, estimate) = match method {
        EvalMethod::Inhomogeneous => (
            inhomogeneous_value(a.kind, &p, &u, &l, site)?,
            "inhomogeneous",
            None,
        ),
        EvalMethod::Jet => {
            let v = jet_value(a.kind, &u, &l, eta, site)?;
            let v = v.require(a.extrapolation_tol)?;
            (v.value, v.method.name(), v.error_estimate)
        }
        EvalMethod::Epsilon => {
            let kind = a.kind;
            let follow = if kind == EvalKind::Scalar {
                Follow::Fixed
            } else {
                Follow::Continue
            };
            let ex =
                extrapolate_epsilon(&u, &l, eta, &EpsilonGrid::default(), follow, |q, x, y| {
                    inhomogeneous_value(kind, q, x, y, site)
                })?;
            if !(ex.error_estimate <= a.extrapolation_tol * ex.value.norm().max(1e-300)) {
                eprintln!(
                    "warning: relative extrapolation error estimate {} exceeds {}",
                    fmt_real(ex.error_estimate / ex.value.norm()),
                    fmt_real(a.extrapolation_tol)
                );
            }
            (
                ex.value,
                Method::EpsilonExtrapolation.name(),
                Some(ex.error_estimate),
            )
        }
    };
    let kind_name = format!("{:?}", a.kind).to_lowercase();
    let site = (a.kind != EvalKind::Scalar).then_some(site);
    let record =
        ResultRecord::new(&kind_name, site, value, &p, &u, &l).with_method(method_name, estimate);
    let out = json!({
        "value": fmt_complex(value),
        "method": method_name,
        "error_estimate": estimate,
        "residuals": {"left": res_l, "right": res_r},
        "record": record,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&out).map_err(Error::from)?
    );
    Ok(())
}

fn inhomogeneous_value(
    kind: EvalKind,
    p: &ChainParams,
    u: &[Complex64],
    l: &[Complex64],
    site: usize,
) -> twisted_xxz::Result<Complex64> {
    match kind {
        EvalKind::Scalar => detforms::scalar_product_offshell(p, u, l),
        EvalKind::Sminus => detforms::ff_sigma_minus(p, u, l, site),
        EvalKind::Sz => detforms::ff_sigma_z(p, u, l, site),
        EvalKind::Mm => detforms::cf_minus_minus(p, u, l, site),
        EvalKind::Zz => detforms::cf_zz(p, u, l, site),
    }
}

fn jet_value(
    kind: EvalKind,
    u: &RootSet,
    l: &RootSet,
    eta: Complex64,
    site: usize,
) -> twisted_xxz::Result<homolimit::HomogeneousValue> {
    let plain = |v: Complex64| homolimit::HomogeneousValue {
        value: v,
        method: Method::Jet,
        error_estimate: None,
    };
    Ok(match kind {
        EvalKind::Scalar => plain(homolimit::homogeneous_scalar_product(u, l, eta, u.len())?),
        EvalKind::Sminus => plain(homolimit::homogeneous_ff_sminus(u, l, eta, site)?),
        EvalKind::Sz => plain(homolimit::homogeneous_ff_sz(u, l, eta, site)?),
        EvalKind::Mm => plain(homolimit::homogeneous_cf_mm(u, l, eta, site)?),
        EvalKind::Zz => homolimit::homogeneous_cf_zz(u, l, eta, site, u.len())?,
    })
}

fn cmd_verify(a: VerifyArgs) -> CmdResult {
    let suite = match a.suite {
        SuiteArg::All => Suite::All,
        SuiteArg::Algebra => Suite::Algebra,
        SuiteArg::Scalar => Suite::Scalar,
        SuiteArg::Ff => Suite::Ff,
        SuiteArg::Cf => Suite::Cf,
    };
    let report = run_verify(&VerifyConfig::new(a.sites, a.trials, a.seed, suite))?;
    for c in &report.checks {
        println!(
            "{:<32} max_error={} tol={} samples={} {}",
            c.name,
            fmt_real(c.max_error),
            fmt_real(c.tol),
            c.samples,
            if c.passed { "PASS" } else { "FAIL" }
        );
    }
    let failing: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
    if failing.is_empty() {
        return Ok(());
    }
    for c in &failing {
        eprintln!(
            "{}: {}",
            c.name,
            serde_json::to_string(&c.worst).map_err(Error::from)?
        );
    }
    Err(Failure::Check(format!(
        "{} check(s) out of tolerance",
        failing.len()
    )))
}

fn cmd_tables(a: TablesArgs) -> CmdResult {
    let which: Vec<u8> = if a.which == "all" {
        (1..=5).collect()
    } else {
        let w = a.which.parse::<u8>().map_err(|_| {
            Failure::Usage(format!("--which expects 1..5 or all, got '{}'", a.which))
        })?;
        vec![w]
    };
    let tables = build_tables(&which, a.sites, a.eta, &SolverConfig::default())?;
    if a.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&tables).map_err(Error::from)?
        );
    } else {
        // One CSV block per table, separated by a blank line.
        let blocks: Vec<String> = tables.iter().map(|t| t.csv()).collect();
        print!("{}", blocks.join("\n"));
    }
    let failed: Vec<u8> = tables
        .iter()
        .filter(|t| !t.passed())
        .map(|t| t.number)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!(
            "tables {failed:?} exceed the agreement tolerance"
        )))
    }
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
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Tables(a) => cmd_tables(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::OffShell(msg)) => {
            eprintln!("error: off-shell input: {msg}");
            ExitCode::from(EXIT_OFF_SHELL)
        }
        Err(Failure::NoSolutions) => {
            eprintln!("error: no certified root sets found");
            ExitCode::from(EXIT_NO_SOLUTIONS)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILED_CHECK)
        }
    }
}

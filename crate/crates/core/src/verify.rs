//! Randomised comparisons of the determinant formulas against the explicit
//! oracle, and residuals of the algebraic identities behind them.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bae::{solve_bae, SolverConfig};
use crate::detforms;
use crate::error::{Error, Result};
use crate::model::{ChainParams, ComplexRecord, RootSet};
use crate::numeric::{c64, CVector};
use crate::oracle::{self, Block, ChainOracle, OpFactor, Pauli, Side};

/// Largest chain the verification driver accepts.
pub const MAX_VERIFY_SITES: usize = 6;

pub const FORMULA_TOL: f64 = 1e-7;
pub const ZZ_TOL: f64 = 1e-6;
pub const YBE_TOL: f64 = 1e-12;
pub const RTT_TOL: f64 = 1e-10;
pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const T_IDENTITY_TOL: f64 = 1e-10;
pub const RECONSTRUCTION_TOL: f64 = 1e-8;
pub const HAMILTONIAN_TOL: f64 = 1e-6;
pub const HAMILTONIAN_STEP: f64 = 1e-5;

/// Half-width of the box the inhomogeneities are drawn from.
pub const THETA_BOX: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    All,
    Algebra,
    Scalar,
    Ff,
    Cf,
}

impl Suite {
    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub n_sites: usize,
    pub trials: usize,
    pub seed: u64,
    pub suite: Suite,
    pub eta: Complex64,
}

impl VerifyConfig {
    pub fn new(n_sites: usize, trials: usize, seed: u64, suite: Suite) -> Self {
        Self {
            n_sites,
            trials,
            seed,
            suite,
            eta: Complex64::new(1.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites > MAX_VERIFY_SITES {
            return Err(Error::OracleCap {
                n: self.n_sites,
                max: MAX_VERIFY_SITES,
            });
        }
        if self.n_sites == 0 {
            return Err(Error::InvalidParams(
                "the chain needs at least one site".into(),
            ));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParams("at least one trial is needed".into()));
        }
        Ok(())
    }

    /// Seed of trial `t`, independent of scheduling.
    pub fn trial_seed(&self, t: usize) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add((t as u64 + 1).wrapping_mul(0xD1B5_4A32_D192_ED03))
    }
}

/// Inputs of a trial, enough to reproduce a failing case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialCase {
    pub trial: usize,
    pub seed: u64,
    pub thetas: Vec<ComplexRecord>,
    pub left: Vec<ComplexRecord>,
    pub right: Vec<ComplexRecord>,
    pub site: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub tol: f64,
    pub max_error: f64,
    pub samples: usize,
    pub passed: bool,
    /// The sample with the largest error.
    pub worst: Option<TrialCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n_sites: usize,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

struct Sample {
    name: &'static str,
    tol: f64,
    error: f64,
    case: TrialCase,
}

/// Relative error, or error against `scale` when the reference is a
/// structural zero (a selection-rule cancellation).
pub fn scaled_error(value: Complex64, reference: Complex64, scale: f64) -> f64 {
    let diff = (value - reference).norm();
    if reference.norm() >= 1e-6 * scale {
        diff / reference.norm()
    } else {
        diff / scale
    }
}

fn records(zs: &[Complex64]) -> Vec<ComplexRecord> {
    zs.iter().map(|&z| z.into()).collect()
}

/// Draws inhomogeneities uniformly from the box until they are non-degenerate.
pub fn random_params(n: usize, eta: Complex64, rng: &mut ChaCha8Rng) -> Result<ChainParams> {
    loop {
        let thetas = (0..n)
            .map(|_| {
                c64(
                    rng.gen_range(-THETA_BOX..=THETA_BOX),
                    rng.gen_range(-THETA_BOX..=THETA_BOX),
                )
            })
            .collect();
        let p = ChainParams::new(n, eta, thetas)?;
        if p.check_nondegenerate().is_ok() {
            return Ok(p);
        }
    }
}

fn random_roots(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n)
        .map(|_| c64(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0)))
        .collect()
}

struct Trial<'a> {
    index: usize,
    seed: u64,
    p: &'a ChainParams,
    oracle: &'a ChainOracle,
    out: Vec<Sample>,
}

impl Trial<'_> {
    fn push(
        &mut self,
        name: &'static str,
        tol: f64,
        error: f64,
        left: &[Complex64],
        right: &[Complex64],
        site: Option<usize>,
    ) {
        self.out.push(Sample {
            name,
            tol,
            error,
            case: TrialCase {
                trial: self.index,
                seed: self.seed,
                thetas: records(&self.p.thetas),
                left: records(left),
                right: records(right),
                site,
            },
        });
    }

    /// Compares a formula value against `⟨left|ops|right⟩`; a formula error
    /// counts as an infinite deviation.
    #[allow(clippy::too_many_arguments)]
    fn compare(
        &mut self,
        name: &'static str,
        tol: f64,
        value: Result<Complex64>,
        ops: &[OpFactor],
        vecs: (&CVector, &CVector),
        roots: (&[Complex64], &[Complex64]),
        site: Option<usize>,
    ) -> Result<()> {
        let reference = self.oracle.sandwich(vecs.0, ops, vecs.1)?;
        let scale = vecs.0.norm() * vecs.1.norm();
        let error = match value {
            Ok(v) => scaled_error(v, reference, scale),
            Err(_) => f64::INFINITY,
        };
        self.push(name, tol, error, roots.0, roots.1, site);
        Ok(())
    }
}

fn formula_checks(cfg: &VerifyConfig, t: &mut Trial, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = cfg.n_sites;
    let p = t.p;
    let solver = SolverConfig {
        n_starts: 60 + 40 * n,
        seed: t.seed,
        ..Default::default()
    };
    let sols = solve_bae(p, &solver)?.solutions;
    if sols.is_empty() {
        t.push("bae_solutions", 0.5, f64::INFINITY, &[], &[], None);
        return Ok(());
    }
    let u: RootSet = sols[rng.gen_range(0..sols.len())].clone();
    let l: RootSet = sols[rng.gen_range(0..sols.len())].clone();
    let bu = t.oracle.bethe(&u, Side::Left)?;
    let bl = t.oracle.bethe(&l, Side::Right)?;

    if cfg.suite.includes(Suite::Scalar) {
        let (x, y) = (random_roots(n, rng), random_roots(n, rng));
        let (bx, by) = (
            t.oracle.bethe(&x, Side::Left)?,
            t.oracle.bethe(&y, Side::Right)?,
        );
        let v = detforms::scalar_product_offshell(p, &x, &y);
        t.compare(
            "scalar_product",
            FORMULA_TOL,
            v,
            &[],
            (&bx, &by),
            (&x, &y),
            None,
        )?;
        let v = detforms::scalar_product_onshell_left(p, &u, &y);
        t.compare(
            "scalar_product_onshell_left",
            FORMULA_TOL,
            v,
            &[],
            (&bu, &by),
            (&u, &y),
            None,
        )?;
        let v = detforms::scalar_product_onshell_right(p, &x, &l);
        t.compare(
            "scalar_product_onshell_right",
            FORMULA_TOL,
            v,
            &[],
            (&bx, &bl),
            (&x, &l),
            None,
        )?;
    }
    let vecs = (&bu, &bl);
    let roots = (&u[..], &l[..]);
    if cfg.suite.includes(Suite::Ff) {
        for i in 1..=n {
            let ti = p.thetas[i - 1];
            let v = detforms::ff_sigma_minus(p, &u, &l, i);
            t.compare(
                "ff_sigma_minus",
                FORMULA_TOL,
                v,
                &[OpFactor::Local(Pauli::Minus, i)],
                vecs,
                roots,
                Some(i),
            )?;
            let v = detforms::c_factor(p, &u, &l, i);
            t.compare(
                "c_factor",
                FORMULA_TOL,
                v,
                &[OpFactor::Monodromy(Block::C, ti)],
                vecs,
                roots,
                Some(i),
            )?;
            let v = detforms::ff_sigma_z(p, &u, &l, i);
            t.compare(
                "ff_sigma_z",
                FORMULA_TOL,
                v,
                &[OpFactor::Local(Pauli::Z, i)],
                vecs,
                roots,
                Some(i),
            )?;
        }
    }
    if cfg.suite.includes(Suite::Cf) {
        for i in 2..=n {
            let (ti, tim) = (p.thetas[i - 1], p.thetas[i - 2]);
            let ops = [
                OpFactor::Local(Pauli::Minus, i - 1),
                OpFactor::Local(Pauli::Minus, i),
            ];
            let v = detforms::cf_minus_minus(p, &u, &l, i);
            t.compare("cf_minus_minus", FORMULA_TOL, v, &ops, vecs, roots, Some(i))?;
            let ops = [
                OpFactor::Monodromy(Block::C, tim),
                OpFactor::Monodromy(Block::C, ti),
            ];
            let v = detforms::cc_sum(p, &u, &l, i);
            t.compare("cc_sum", FORMULA_TOL, v, &ops, vecs, roots, Some(i))?;
            let ops = [
                OpFactor::Local(Pauli::Z, i - 1),
                OpFactor::Local(Pauli::Z, i),
            ];
            let v = detforms::cf_zz(p, &u, &l, i);
            t.compare("cf_zz", ZZ_TOL, v, &ops, vecs, roots, Some(i))?;
        }
    }
    Ok(())
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    c64(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))
}

fn algebra_checks(cfg: &VerifyConfig, t: &mut Trial, rng: &mut ChaCha8Rng) -> Result<()> {
    let n = cfg.n_sites;
    let p = t.p;
    let (u1, u2, u3) = (random_point(rng), random_point(rng), random_point(rng));
    t.push(
        "yang_baxter",
        YBE_TOL,
        oracle::yang_baxter_residual(u1, u2, u3, cfg.eta),
        &[],
        &[],
        None,
    );
    let (u, v) = (random_point(rng), random_point(rng));
    t.push(
        "rtt",
        RTT_TOL,
        oracle::rtt_residual(p, u, v)?,
        &[],
        &[],
        None,
    );
    if n <= 5 {
        t.push(
            "transfer_commutator",
            COMMUTATOR_TOL,
            oracle::commutator_residual(p, u, v)?,
            &[],
            &[],
            None,
        );
    }
    for i in 1..=n {
        let r = oracle::local_op_reconstruction_check(p, i)?;
        if i == 1 {
            t.push(
                "transfer_product_identity",
                T_IDENTITY_TOL,
                r.t_identity.max(r.t_product),
                &[],
                &[],
                None,
            );
        }
        if n <= 3 {
            let worst = r.sigma_minus.max(r.sigma_plus).max(r.sigma_z);
            t.push(
                "local_op_reconstruction",
                RECONSTRUCTION_TOL,
                worst,
                &[],
                &[],
                Some(i),
            );
        }
    }
    if n >= 2 {
        let h = oracle::hamiltonian(n, cfg.eta)?;
        let hl = oracle::hamiltonian_from_transfer(n, cfg.eta, HAMILTONIAN_STEP)?;
        t.push(
            "hamiltonian_log_derivative",
            HAMILTONIAN_TOL,
            h.max_abs_diff(&hl)?,
            &[],
            &[],
            None,
        );
    }
    Ok(())
}

fn run_trial(cfg: &VerifyConfig, index: usize) -> Result<Vec<Sample>> {
    let seed = cfg.trial_seed(index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = random_params(cfg.n_sites, cfg.eta, &mut rng)?;
    let oracle = ChainOracle::new(&p)?;
    let mut trial = Trial {
        index,
        seed,
        p: &p,
        oracle: &oracle,
        out: Vec::new(),
    };
    if cfg.suite.includes(Suite::Algebra) {
        algebra_checks(cfg, &mut trial, &mut rng)?;
    }
    if cfg.suite != Suite::Algebra {
        formula_checks(cfg, &mut trial, &mut rng)?;
    }
    Ok(trial.out)
}

/// Runs all trials (in parallel) and folds them, in trial order, into one
/// outcome per check.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport> {
    cfg.validate()?;
    let per_trial: Vec<Vec<Sample>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, i))
        .collect::<Result<_>>()?;
    let mut checks: Vec<CheckOutcome> = Vec::new();
    for s in per_trial.into_iter().flatten() {
        let idx = match checks.iter().position(|c| c.name == s.name) {
            Some(k) => k,
            None => {
                checks.push(CheckOutcome {
                    name: s.name.to_string(),
                    tol: s.tol,
                    max_error: 0.0,
                    samples: 0,
                    passed: true,
                    worst: None,
                });
                checks.len() - 1
            }
        };
        let c = &mut checks[idx];
        c.samples += 1;
        if !(s.error <= c.max_error) {
            c.max_error = s.error;
            c.worst = Some(s.case);
        }
        c.passed = c.max_error <= c.tol;
    }
    Ok(VerifyReport {
        n_sites: cfg.n_sites,
        trials: cfg.trials,
        seed: cfg.seed,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_and_input_validation() {
        assert!(matches!(
            VerifyConfig::new(13, 1, 0, Suite::All).validate(),
            Err(Error::OracleCap { .. })
        ));
        assert!(VerifyConfig::new(0, 1, 0, Suite::All).validate().is_err());
        assert!(VerifyConfig::new(2, 0, 0, Suite::All).validate().is_err());
    }

    #[test]
    fn scaled_error_switches_regime() {
        assert!((scaled_error(c64(1.1, 0.0), c64(1.0, 0.0), 1.0) - 0.1).abs() < 1e-12);
        assert!((scaled_error(c64(1e-9, 0.0), c64(0.0, 0.0), 1.0) - 1e-9).abs() < 1e-20);
    }

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let cfg = VerifyConfig::new(2, 3, 1, Suite::All);
        let a = run_verify(&cfg).unwrap();
        assert!(a.passed(), "{a:#?}");
        let b = run_verify(&cfg).unwrap();
        assert_eq!(a, b);
        for name in [
            "scalar_product",
            "ff_sigma_z",
            "cf_zz",
            "yang_baxter",
            "hamiltonian_log_derivative",
        ] {
            assert!(a.check(name).is_some(), "{name} missing");
        }
    }
}

//! Bethe ansatz equations: residuals, a multi-start damped Newton solver and
//! on-shell certification.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{a_func, d_func, ChainParams, RootSet};
use crate::numeric::{solve, CMatrix, CVector, Jet, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub n_starts: usize,
    pub seed: u64,
    pub start_box: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-10,
            n_starts: 200,
            seed: 7,
            start_box: 2.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParams(
                "solver tolerance must be positive".into(),
            ));
        }
        if self.n_starts == 0 {
            return Err(Error::InvalidParams(
                "at least one Newton start is required".into(),
            ));
        }
        if !(self.start_box > 0.0) {
            return Err(Error::InvalidParams(
                "start box half-width must be positive".into(),
            ));
        }
        Ok(())
    }
}

fn residual_generic<S: Scalar>(p: &ChainParams, roots: &[S]) -> Vec<S> {
    let eta = p.eta;
    let k = 1.0 / eta.sinh();
    let one = Complex64::new(1.0, 0.0);
    let q = |u: &S| {
        roots.iter().fold(u.lift(one), |acc, l| {
            acc * (u.clone() - l.clone()).sinh().scale(k)
        })
    };
    let theta_sum: Complex64 = p.thetas.iter().sum();
    let lam_sum = roots
        .iter()
        .fold(roots[0].lift(Complex64::new(0.0, 0.0)), |acc, l| {
            acc + l.clone()
        });
    let s = (-lam_sum).shift(theta_sum);
    let n = p.n_sites as f64;
    roots
        .iter()
        .map(|l| {
            let a = a_func(p, l);
            let d = d_func(p, l);
            let c = (l.clone() + s.clone()).shift(-eta * n).exp()
                - (-l.clone() - s.clone()).shift(-eta).exp();
            let t1 = l.exp() * a.clone() * q(&l.shift(-eta));
            let t2 = (-l.clone()).shift(-eta).exp() * d.clone() * q(&l.shift(eta));
            t1 - t2 - c * a * d
        })
        .collect()
}

/// `r_j = e^{λ_j}a(λ_j)Q(λ_j−η) − e^{−λ_j−η}d(λ_j)Q(λ_j+η) − c(λ_j)a(λ_j)d(λ_j)`.
pub fn bae_residual(p: &ChainParams, roots: &[Complex64]) -> Vec<Complex64> {
    if roots.is_empty() {
        return Vec::new();
    }
    residual_generic(p, roots)
}

pub fn max_residual(p: &ChainParams, roots: &[Complex64]) -> f64 {
    bae_residual(p, roots)
        .iter()
        .map(|r| r.norm())
        .fold(0.0, f64::max)
}

/// Jacobian `∂r_j/∂λ_k`, one jet sweep per column.
pub fn bae_jacobian(p: &ChainParams, roots: &[Complex64]) -> CMatrix {
    let n = roots.len();
    let mut jac = CMatrix::zeros(n, n);
    for k in 0..n {
        let jets: Vec<Jet> = roots
            .iter()
            .enumerate()
            .map(|(m, &r)| {
                if m == k {
                    Jet::variable(r, 1)
                } else {
                    Jet::constant(r, 1)
                }
            })
            .collect();
        for (j, r) in residual_generic(p, &jets).iter().enumerate() {
            jac[(j, k)] = r.coeffs()[1];
        }
    }
    jac
}

fn inf_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Damped Newton from `start`. Returns the final point and its residual, or
/// `None` when a step cannot reduce the residual before convergence.
fn newton(
    p: &ChainParams,
    start: &[Complex64],
    cfg: &SolverConfig,
) -> Option<(Vec<Complex64>, f64)> {
    let polish = (cfg.tol * 1e-4).max(1e-15);
    let mut x = start.to_vec();
    let mut r = bae_residual(p, &x);
    let mut rn = inf_norm(&r);
    for _ in 0..cfg.max_iters {
        if !rn.is_finite() {
            return None;
        }
        if rn <= polish {
            break;
        }
        let jac = bae_jacobian(p, &x);
        let rhs = CVector::new(r.iter().map(|z| -z).collect());
        let dx = match solve(&jac, &rhs) {
            Ok(dx) => dx,
            Err(_) => break,
        };
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=20 {
            let trial: Vec<Complex64> = x
                .iter()
                .zip(dx.as_slice())
                .map(|(a, d)| a + d * t)
                .collect();
            let tr = bae_residual(p, &trial);
            let tn = inf_norm(&tr);
            if tn < rn {
                accepted = Some((trial, tr, tn));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((nx, nr, nn)) => {
                x = nx;
                r = nr;
                rn = nn;
            }
            None => break,
        }
    }
    (rn <= cfg.tol).then_some((x, rn))
}

/// Distance from `z` to the lattice `iπℤ`.
pub fn dist_mod_ipi(z: Complex64) -> f64 {
    let w = z.im.rem_euclid(PI);
    Complex64::new(z.re, w)
        .norm()
        .min(Complex64::new(z.re, w - PI).norm())
}

const FOLD_TOL: f64 = 1e-9;

/// Folds the imaginary part into `(−π/2, π/2]`.
pub fn fold_root(z: Complex64) -> Complex64 {
    let mut im = z.im;
    while im > PI / 2.0 + FOLD_TOL {
        im -= PI;
    }
    while im <= -PI / 2.0 + FOLD_TOL {
        im += PI;
    }
    Complex64::new(z.re, im)
}

/// Why a converged solution is not reported as a physical root set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    /// Two roots coincide modulo iπ.
    Coincident,
    /// A root sits on `θ_k` or `θ_k − η`; these clusters solve the equations
    /// identically and carry no Bethe vector of their own.
    SingularCluster,
    /// Two roots differ by exactly `±η`, which annihilates the Bethe vector.
    EtaString,
}

pub const CLUSTER_TOL: f64 = 1e-5;
pub const STRING_TOL: f64 = 1e-6;
pub const DEDUP_TOL: f64 = 1e-8;

/// Classifies a converged root set; `None` means physical.
pub fn classify(p: &ChainParams, roots: &[Complex64]) -> Option<Rejection> {
    let n = roots.len();
    for a in 0..n {
        for b in a + 1..n {
            if dist_mod_ipi(roots[a] - roots[b]) < STRING_TOL {
                return Some(Rejection::Coincident);
            }
        }
    }
    for &l in roots {
        for &t in &p.thetas {
            if dist_mod_ipi(l - t) < CLUSTER_TOL || dist_mod_ipi(l - t + p.eta) < CLUSTER_TOL {
                return Some(Rejection::SingularCluster);
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a != b && dist_mod_ipi(roots[a] - roots[b] - p.eta) < STRING_TOL {
                return Some(Rejection::EtaString);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveDiagnostics {
    /// Final residual of every start; `None` for abandoned starts.
    pub final_residuals: Vec<Option<f64>>,
    pub converged_starts: usize,
    pub singular_clusters: Vec<Vec<Complex64>>,
    pub eta_strings: usize,
    pub coincident: usize,
    pub fold_failures: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solutions: Vec<RootSet>,
    pub diagnostics: SolveDiagnostics,
}

fn push_unique(list: &mut Vec<RootSet>, rs: RootSet) {
    if !list.iter().any(|o| o.distance(&rs) < DEDUP_TOL) {
        list.push(rs);
    }
}

fn sample_starts(p: &ChainParams, cfg: &SolverConfig) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.n_starts)
        .map(|_| {
            (0..p.n_sites)
                .map(|_| {
                    Complex64::new(
                        rng.gen_range(-cfg.start_box..=cfg.start_box),
                        rng.gen_range(-PI / 2.0..=PI / 2.0),
                    )
                })
                .collect()
        })
        .collect()
}

/// Multi-start damped Newton. Starts run in parallel; the merge walks them in
/// start order, so the result does not depend on scheduling.
pub fn solve_bae(p: &ChainParams, cfg: &SolverConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let starts = sample_starts(p, cfg);
    let finals: Vec<Option<(Vec<Complex64>, f64)>> =
        starts.par_iter().map(|s| newton(p, s, cfg)).collect();

    let mut diagnostics = SolveDiagnostics {
        final_residuals: finals.iter().map(|f| f.as_ref().map(|(_, r)| *r)).collect(),
        converged_starts: finals.iter().filter(|f| f.is_some()).count(),
        ..Default::default()
    };
    let mut candidates = Vec::new();
    for (roots, _) in finals.into_iter().flatten() {
        let folded: Vec<Complex64> = roots.into_iter().map(fold_root).collect();
        let rs = RootSet::certified(p, folded, cfg.tol);
        if !rs.on_shell {
            diagnostics.fold_failures += 1;
            continue;
        }
        candidates.push(rs);
    }

    let mut solutions = Vec::new();
    let mut clusters: Vec<RootSet> = Vec::new();
    for rs in candidates {
        match classify(p, &rs) {
            None => push_unique(&mut solutions, rs),
            Some(Rejection::SingularCluster) => push_unique(&mut clusters, rs),
            Some(Rejection::EtaString) => diagnostics.eta_strings += 1,
            Some(Rejection::Coincident) => diagnostics.coincident += 1,
        }
    }
    sort_sets(&mut solutions);
    sort_sets(&mut clusters);
    diagnostics.singular_clusters = clusters.into_iter().map(|c| c.roots).collect();
    Ok(SolveReport {
        solutions,
        diagnostics,
    })
}

fn sort_sets(sets: &mut [RootSet]) {
    sets.sort_by(|a, b| {
        for (x, y) in a.roots.iter().zip(&b.roots) {
            let o =
                x.im.partial_cmp(&y.im)
                    .unwrap()
                    .then(x.re.partial_cmp(&y.re).unwrap());
            if (x - y).norm() > DEDUP_TOL && o.is_ne() {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Newton from a given guess, e.g. to follow a root set along a parameter path.
pub fn continue_roots(p: &ChainParams, guess: &[Complex64], cfg: &SolverConfig) -> Result<RootSet> {
    if guess.len() != p.n_sites {
        return Err(Error::Dimension(format!(
            "{} roots for {} sites",
            guess.len(),
            p.n_sites
        )));
    }
    match newton(p, guess, cfg) {
        Some((x, r)) => Ok(RootSet::new(x, r, true)),
        None => Err(Error::OffShell {
            side: "continued",
            residual: max_residual(p, guess),
            tol: cfg.tol,
        }),
    }
}

/// Fails unless `roots` satisfy the equations to `tol`.
pub fn require_on_shell(
    p: &ChainParams,
    roots: &[Complex64],
    side: &'static str,
    tol: f64,
) -> Result<f64> {
    if roots.len() != p.n_sites {
        return Err(Error::Dimension(format!(
            "{side} root set has {} roots for {} sites",
            roots.len(),
            p.n_sites
        )));
    }
    let residual = max_residual(p, roots);
    if residual <= tol {
        Ok(residual)
    } else {
        Err(Error::OffShell {
            side,
            residual,
            tol,
        })
    }
}

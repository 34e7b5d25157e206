//! The homogeneous point `θ_j = 0`.
//!
//! Ratios of Vandermonde-type determinants become determinants of derivative
//! matrices, which are built from order-`N−1` jets of the column functions.
//! Quantities without a closed homogeneous form are obtained by Richardson
//! extrapolation of the inhomogeneous formula along `θ_j = ε·j`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bae::{continue_roots, require_on_shell, SolverConfig};
use crate::detforms::{self, ON_SHELL_TOL};
use crate::error::{Error, Result};
use crate::model::{dbar, lambda_tq, tau, ChainParams};
use crate::numeric::{CMatrix, Jet, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Jet,
    EpsilonExtrapolation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Jet => "jet",
            Method::EpsilonExtrapolation => "epsilon-extrapolation",
        }
    }
}

/// A homogeneous value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomogeneousValue {
    pub value: Complex64,
    pub method: Method,
    /// Richardson error estimate; `None` for jet evaluations.
    pub error_estimate: Option<f64>,
}

impl HomogeneousValue {
    fn jet(value: Complex64) -> Self {
        Self {
            value,
            method: Method::Jet,
            error_estimate: None,
        }
    }

    /// Fails when the extrapolation error estimate exceeds `tol`.
    pub fn require(self, tol: f64) -> Result<Self> {
        match self.error_estimate {
            Some(e) if !(e <= tol) => Err(Error::Extrapolation { estimate: e, tol }),
            _ => Ok(self),
        }
    }
}

fn hom_params(n: usize, eta: Complex64) -> Result<ChainParams> {
    ChainParams::homogeneous(n, eta)
}

fn check_len(n: usize, uroots: &[Complex64], lroots: &[Complex64]) -> Result<()> {
    if uroots.len() != n || lroots.len() != n {
        return Err(Error::Dimension(format!(
            "root sets of sizes {} and {} for {n} sites",
            uroots.len(),
            lroots.len()
        )));
    }
    Ok(())
}

fn check_on_shell(p: &ChainParams, uroots: &[Complex64], lroots: &[Complex64]) -> Result<()> {
    check_len(p.n_sites, uroots, lroots)?;
    require_on_shell(p, uroots, "left", ON_SHELL_TOL)?;
    require_on_shell(p, lroots, "right", ON_SHELL_TOL)?;
    Ok(())
}

/// `2^{N(N−1)/2}·Π_{k=1}^{N−1} k!`.
pub fn normalisation(n: usize) -> f64 {
    let mut acc = 2f64.powi((n * n.saturating_sub(1) / 2) as i32);
    let mut fact = 1.0;
    for k in 1..n {
        fact *= k as f64;
        acc *= fact;
    }
    acc
}

/// `Λ({roots}, 0)` at the homogeneous point.
pub fn lambda_at_zero(roots: &[Complex64], eta: Complex64) -> Result<Complex64> {
    let p = hom_params(roots.len(), eta)?;
    lambda_tq(&p, roots, &Complex64::new(0.0, 0.0))
}

fn column_fn<S: Scalar>(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    n: usize,
    u: &S,
    extra: impl Fn(u8, &S) -> S,
) -> Result<S> {
    let p = hom_params(uroots.len(), eta)?;
    let mut acc = u.lift(Complex64::new(0.0, 0.0));
    for h in 0..2u8 {
        let shifted = u.shift(-eta * h as f64);
        let e = shifted
            .scale(Complex64::new(2.0 * (n as f64 - 1.0), 0.0))
            .exp();
        acc = acc + tau(&p, uroots, lroots, h, u)? * e * extra(h, u);
    }
    Ok(acc)
}

/// `φ_n(u) = Σ_h τ̃(h, u)·e^{2(u−ηh)(n−1)}`, `n` 1-based.
pub fn phi_n<S: Scalar>(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    n: usize,
    u: &S,
) -> Result<S> {
    column_fn(uroots, lroots, eta, n, u, |_, u| {
        u.lift(Complex64::new(1.0, 0.0))
    })
}

/// `f⁻_n(u)`: `φ_n` with the extra factor `sinh(−u+ηh)/sinh η`.
pub fn f_minus_n<S: Scalar>(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    n: usize,
    u: &S,
) -> Result<S> {
    let k = 1.0 / eta.sinh();
    column_fn(uroots, lroots, eta, n, u, |h, u| {
        (-u.clone()).shift(eta * h as f64).sinh().scale(k)
    })
}

/// `f⁻⁻_n(u)`: `φ_n` with the extra factor `sinh²(u−ηh)/sinh²η`.
pub fn f_minus_minus_n<S: Scalar>(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    n: usize,
    u: &S,
) -> Result<S> {
    let k = 1.0 / eta.sinh();
    column_fn(uroots, lroots, eta, n, u, |h, u| {
        let s = u.shift(-eta * h as f64).sinh().scale(k);
        s.clone() * s
    })
}

/// `ξ̃(u) = −d̄({u},u,1)·d̄({λ},u,1)·e^{uN}·sinh^N(u+η)/sinh^N η·Π_k sinh(u−u_k)/sinh(u−u_k−η)`.
pub fn xi_tilde<S: Scalar>(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    u: &S,
) -> Result<S> {
    let n = uroots.len();
    let k = Complex64::new(1.0, 0.0) / eta.sinh();
    let mut acc = -(dbar(uroots, u, 1, eta) * dbar(lroots, u, 1, eta))
        * u.scale(Complex64::new(n as f64, 0.0)).exp()
        * u.shift(eta).sinh().scale(k).powi(n as i32)?;
    for uk in uroots {
        let num = u.shift(-uk).sinh();
        let den = u.shift(-uk - eta).sinh();
        crate::numeric::scalar::guard(&den, "sinh(u - u_k - eta) in xi tilde")?;
        acc = acc * num.try_div(&den)?;
    }
    Ok(acc)
}

/// Derivatives `f^{(0..=order)}(0)`.
fn derivs_at_zero(order: usize, f: impl Fn(&Jet) -> Result<Jet>) -> Result<Vec<Complex64>> {
    Ok(f(&Jet::variable(Complex64::new(0.0, 0.0), order))?.derivatives())
}

/// `M_{m,n} = ∂^{m−1} col_n/∂u^{m−1}|_0` for `n = 1..N`.
fn derivative_matrix(
    n: usize,
    extra_cols: usize,
    col: impl Fn(usize, &Jet) -> Result<Jet>,
) -> Result<CMatrix> {
    let size = n + extra_cols;
    let mut m = CMatrix::zeros(size, size);
    for c in 0..n {
        let d = derivs_at_zero(n - 1, |u| col(c + 1, u))?;
        for (r, v) in d.into_iter().enumerate() {
            m[(r, c)] = v;
        }
    }
    Ok(m)
}

pub fn p_hom_matrix(uroots: &[Complex64], lroots: &[Complex64], eta: Complex64) -> Result<CMatrix> {
    let n = uroots.len();
    check_len(n, uroots, lroots)?;
    derivative_matrix(n, 0, |c, u| phi_n(uroots, lroots, eta, c, u))
}

pub fn f_hom_d_matrix(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
) -> Result<CMatrix> {
    let n = uroots.len();
    check_len(n, uroots, lroots)?;
    derivative_matrix(n, 0, |c, u| f_minus_n(uroots, lroots, eta, c, u))
}

pub fn f_hom_dd_matrix(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
) -> Result<CMatrix> {
    let n = uroots.len();
    check_len(n, uroots, lroots)?;
    derivative_matrix(n, 0, |c, u| f_minus_minus_n(uroots, lroots, eta, c, u))
}

/// Derivative matrix of `φ_n` bordered by `col_scale·∂^{m−1}ξ̃|_0`, a row of
/// ones and the given corner.
fn bordered_hom(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    col_scale: f64,
    corner: Complex64,
) -> Result<CMatrix> {
    let n = uroots.len();
    check_len(n, uroots, lroots)?;
    let mut m = derivative_matrix(n, 1, |c, u| phi_n(uroots, lroots, eta, c, u))?;
    let xd = derivs_at_zero(n - 1, |u| xi_tilde(uroots, lroots, eta, u))?;
    for (r, v) in xd.into_iter().enumerate() {
        m[(r, n)] = col_scale * v;
    }
    for c in 0..n {
        m[(n, c)] = Complex64::new(1.0, 0.0);
    }
    m[(n, n)] = corner;
    Ok(m)
}

pub fn f_hom_z_matrix(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
) -> Result<CMatrix> {
    let lam = lambda_at_zero(lroots, eta)?;
    bordered_hom(uroots, lroots, eta, 2.0, -lam)
}

pub fn f_hom_c_matrix(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
) -> Result<CMatrix> {
    bordered_hom(uroots, lroots, eta, 1.0, Complex64::new(0.0, 0.0))
}

fn check_site(n: usize, i: usize, lo: usize) -> Result<()> {
    if i < lo || i > n {
        return Err(Error::InvalidParams(format!("site {i} outside {lo}..={n}")));
    }
    Ok(())
}

/// `Λ^{u_pow}({u},0)·Λ^{2N−i}({λ},0)/[2^{N(N−1)/2}Π k!]`.
fn hom_prefactor(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    u_pow: usize,
    i: usize,
) -> Result<Complex64> {
    let n = uroots.len();
    let lu = lambda_at_zero(uroots, eta)?;
    let ll = lambda_at_zero(lroots, eta)?;
    Ok(lu.powi(u_pow as i32) * ll.powi((2 * n - i) as i32) / normalisation(n))
}

/// `S_N = |P^{hom}|/[2^{N(N−1)/2}Π k!]`; valid on- and off-shell.
pub fn homogeneous_scalar_product(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    n: usize,
) -> Result<Complex64> {
    check_len(n, uroots, lroots)?;
    Ok(p_hom_matrix(uroots, lroots, eta)?.determinant()? / normalisation(n))
}

/// `⟨Φ{u}|σ_i⁻|Φ{λ}⟩` at the homogeneous point.
pub fn homogeneous_ff_sminus(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    i: usize,
) -> Result<Complex64> {
    let n = uroots.len();
    check_site(n, i, 1)?;
    check_on_shell(&hom_params(n, eta)?, uroots, lroots)?;
    let det = f_hom_d_matrix(uroots, lroots, eta)?.determinant()?;
    Ok(det * hom_prefactor(uroots, lroots, eta, i - 1, i)?)
}

/// `⟨Φ{u}|σ_i^z|Φ{λ}⟩` at the homogeneous point.
pub fn homogeneous_ff_sz(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    i: usize,
) -> Result<Complex64> {
    let n = uroots.len();
    check_site(n, i, 1)?;
    check_on_shell(&hom_params(n, eta)?, uroots, lroots)?;
    let det = f_hom_z_matrix(uroots, lroots, eta)?.determinant()?;
    Ok(det * hom_prefactor(uroots, lroots, eta, i - 1, i)?)
}

/// `⟨Φ{u}|σ_{i−1}⁻σ_i⁻|Φ{λ}⟩` at the homogeneous point.
pub fn homogeneous_cf_mm(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    i: usize,
) -> Result<Complex64> {
    let n = uroots.len();
    check_site(n, i, 2)?;
    check_on_shell(&hom_params(n, eta)?, uroots, lroots)?;
    let det = f_hom_dd_matrix(uroots, lroots, eta)?.determinant()?;
    Ok(det * hom_prefactor(uroots, lroots, eta, i - 2, i)?)
}

/// `⟨Φ{u}|σ_{i−1}^zσ_i^z|Φ{λ}⟩` at the homogeneous point: closed form for
/// `N = 2`, extrapolation of the inhomogeneous formula otherwise.
pub fn homogeneous_cf_zz(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    i: usize,
    n: usize,
) -> Result<HomogeneousValue> {
    check_len(n, uroots, lroots)?;
    check_site(n, i, 2)?;
    check_on_shell(&hom_params(n, eta)?, uroots, lroots)?;
    if n == 2 {
        let ll = lambda_at_zero(lroots, eta)?;
        let lu = lambda_at_zero(uroots, eta)?;
        let x0 = xi_tilde(uroots, lroots, eta, &Complex64::new(0.0, 0.0))?;
        let fc = f_hom_c_matrix(uroots, lroots, eta)?.determinant()?;
        let fz = f_hom_z_matrix(uroots, lroots, eta)?.determinant()?;
        let value = ll * ll * (4.0 * x0 * x0 - ll * fc - lu * fz / 2.0);
        return Ok(HomogeneousValue::jet(value));
    }
    let ex = extrapolate_epsilon(
        uroots,
        lroots,
        eta,
        &EpsilonGrid::default(),
        Follow::Continue,
        |p, u, l| detforms::cf_zz(p, u, l, i),
    )?;
    Ok(HomogeneousValue {
        value: ex.value,
        method: Method::EpsilonExtrapolation,
        error_estimate: Some(ex.error_estimate),
    })
}

/// Geometric grid `ε_k = start·2^{−k}`, `k = 0..levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsilonGrid {
    pub start: f64,
    pub levels: usize,
}

impl Default for EpsilonGrid {
    fn default() -> Self {
        Self {
            start: 2e-2,
            levels: 6,
        }
    }
}

impl EpsilonGrid {
    pub fn points(&self) -> Vec<f64> {
        (0..self.levels)
            .map(|k| self.start / 2f64.powi(k as i32))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Richardson tableau for samples at `ε, ε/2, ε/4, …`, assuming an expansion
/// in integer powers of `ε`. The estimate compares the last two diagonals.
pub fn richardson(samples: &[Complex64]) -> Result<Extrapolated> {
    if samples.len() < 2 {
        return Err(Error::InvalidParams(
            "Richardson needs at least two samples".into(),
        ));
    }
    let mut prev = samples.to_vec();
    let mut last_prev = prev[prev.len() - 1];
    let mut j = 1;
    while prev.len() > 1 {
        last_prev = prev[prev.len() - 1];
        let f = 2f64.powi(j);
        prev = prev
            .windows(2)
            .map(|w| (f * w[1] - w[0]) / (f - 1.0))
            .collect();
        j += 1;
    }
    Ok(Extrapolated {
        value: prev[0],
        error_estimate: (prev[0] - last_prev).norm(),
    })
}

/// Whether roots are re-converged at each `ε` or kept fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Follow {
    /// Newton-continue both sets so on-shell formulas stay on-shell.
    Continue,
    Fixed,
}

/// Extrapolates `f(θ = ε·(1..N))` to `ε → 0`.
pub fn extrapolate_epsilon<F>(
    uroots: &[Complex64],
    lroots: &[Complex64],
    eta: Complex64,
    grid: &EpsilonGrid,
    follow: Follow,
    f: F,
) -> Result<Extrapolated>
where
    F: Fn(&ChainParams, &[Complex64], &[Complex64]) -> Result<Complex64> + Sync,
{
    let n = uroots.len();
    check_len(n, uroots, lroots)?;
    let cfg = SolverConfig::default();
    let samples: Vec<Complex64> = grid
        .points()
        .into_par_iter()
        .map(|eps| {
            let p = ChainParams::epsilon_path(n, eta, eps)?;
            match follow {
                Follow::Fixed => f(&p, uroots, lroots),
                Follow::Continue => {
                    let u = continue_roots(&p, uroots, &cfg)?;
                    let l = continue_roots(&p, lroots, &cfg)?;
                    f(&p, &u, &l)
                }
            }
        })
        .collect::<Result<_>>()?;
    richardson(&samples)
}

//! Determinant representations of scalar products, form factors and
//! nearest-neighbour correlators for inhomogeneous chains.
//!
//! Every formula divides by `|V(θ_1..θ_N)|` and by sinh factors in the
//! inhomogeneity differences, so inputs must satisfy
//! [`ChainParams::check_nondegenerate`]. Homogeneous chains go through
//! [`crate::homolimit`].

pub mod literal;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bae::require_on_shell;
use crate::error::{Error, Result};
use crate::model::{
    d_func, gamma1, gamma2, lambda_tq, phi_product, tau, vandermonde_det, xi, ChainParams, RootSet,
};
use crate::numeric::scalar::guard;
use crate::numeric::CMatrix;

/// BAE residual accepted for roots that a formula requires on-shell.
pub const ON_SHELL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Sminus,
    Sz,
    SminusSminus,
    SzSz,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Sminus => "sminus",
            Kind::Sz => "sz",
            Kind::SminusSminus => "sminus_sminus",
            Kind::SzSz => "sz_sz",
        }
    }

    /// Two-site operators act on sites `i−1, i`.
    pub fn is_two_site(self) -> bool {
        matches!(self, Kind::SminusSminus | Kind::SzSz)
    }
}

#[derive(Debug, Clone)]
pub struct FormFactorRequest {
    pub params: ChainParams,
    pub left: RootSet,
    pub right: RootSet,
    pub site: usize,
    pub kind: Kind,
}

impl FormFactorRequest {
    pub fn validate(&self) -> Result<()> {
        let n = self.params.n_sites;
        let lo = if self.kind.is_two_site() { 2 } else { 1 };
        if self.site < lo || self.site > n {
            return Err(Error::InvalidParams(format!(
                "site {} outside {lo}..={n} for {}",
                self.site,
                self.kind.name()
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self) -> Result<Complex64> {
        self.validate()?;
        let (p, u, l, i) = (&self.params, &self.left[..], &self.right[..], self.site);
        match self.kind {
            Kind::Sminus => ff_sigma_minus(p, u, l, i),
            Kind::Sz => ff_sigma_z(p, u, l, i),
            Kind::SminusSminus => cf_minus_minus(p, u, l, i),
            Kind::SzSz => cf_zz(p, u, l, i),
        }
    }
}

fn check_inputs(p: &ChainParams, uroots: &[Complex64], lroots: &[Complex64]) -> Result<()> {
    p.check_nondegenerate()?;
    for (side, r) in [("left", uroots), ("right", lroots)] {
        if r.len() != p.n_sites {
            return Err(Error::Dimension(format!(
                "{side} root set has {} roots for {} sites",
                r.len(),
                p.n_sites
            )));
        }
    }
    Ok(())
}

fn check_on_shell(p: &ChainParams, uroots: &[Complex64], lroots: &[Complex64]) -> Result<()> {
    check_inputs(p, uroots, lroots)?;
    require_on_shell(p, uroots, "left", ON_SHELL_TOL)?;
    require_on_shell(p, lroots, "right", ON_SHELL_TOL)?;
    Ok(())
}

fn theta(p: &ChainParams, i: usize) -> Result<Complex64> {
    if i == 0 || i > p.n_sites {
        return Err(Error::InvalidParams(format!(
            "site {i} outside 1..={}",
            p.n_sites
        )));
    }
    Ok(p.thetas[i - 1])
}

fn power_row(x: Complex64, n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| (2.0 * x * k as f64).exp())
}

fn det_over_v(p: &ChainParams, m: &CMatrix) -> Result<Complex64> {
    let v = vandermonde_det(&p.thetas);
    guard(&v, "Vandermonde determinant of the inhomogeneities")?;
    Ok(m.determinant()? / v)
}

/// `M_{mn} = Σ_h τ(h, θ_m)·e^{2(θ_m − ηh)(n−1)}·extra(h, m)` with `m` 0-based.
pub fn p_matrix_with(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    extra: impl Fn(u8, usize) -> Complex64,
) -> Result<CMatrix> {
    let n = p.n_sites;
    let mut m = CMatrix::zeros(n, n);
    for row in 0..n {
        let t = p.thetas[row];
        for h in 0..2u8 {
            let w = tau(p, uroots, lroots, h, &t)? * extra(h, row);
            for (col, e) in power_row(t - p.eta * h as f64, n).enumerate() {
                m[(row, col)] += w * e;
            }
        }
    }
    Ok(m)
}

pub fn p_matrix(p: &ChainParams, uroots: &[Complex64], lroots: &[Complex64]) -> Result<CMatrix> {
    p_matrix_with(p, uroots, lroots, |_, _| Complex64::new(1.0, 0.0))
}

/// `⟨u_1..u_N|λ_1..λ_N⟩ = |P|/|V|` for arbitrary parameters on both sides.
pub fn scalar_product_offshell(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
) -> Result<Complex64> {
    check_inputs(p, uroots, lroots)?;
    det_over_v(p, &p_matrix(p, uroots, lroots)?)
}

/// Rows indexed by the on-shell roots `on`, the other set `off` enters
/// through `Π_k sinh(off_k − θ_i + ηh)/sinh η`.
fn p_onshell_matrix(p: &ChainParams, on: &[Complex64], off: &[Complex64]) -> Result<CMatrix> {
    let n = p.n_sites;
    let eta = p.eta;
    let she = eta.sinh();
    let mut m = CMatrix::zeros(n, n);
    for i in 0..n {
        let t = p.thetas[i];
        let lam = lambda_tq(p, on, &t)?;
        let dm = d_func(p, &(t - eta));
        guard(&dm, "d(theta_i - eta)")?;
        let d_ui = d_func(p, &on[i]);
        for h in 0..2u8 {
            let hf = h as f64;
            let mut w = d_ui * (eta * hf * (n as f64 - 1.0) + t * hf).exp();
            if h == 1 {
                w *= -lam / dm;
            }
            for x in off {
                w *= (x - t + eta * hf).sinh() / she;
            }
            for (j, e) in power_row(t - eta * hf, n).enumerate() {
                m[(i, j)] += w * e;
            }
        }
    }
    Ok(m)
}

/// `⟨Φ{u}|λ_1..λ_N⟩ = |P^{NL}|/|V|` with `{u}` on-shell.
pub fn scalar_product_onshell_left(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
) -> Result<Complex64> {
    check_inputs(p, uroots, lroots)?;
    require_on_shell(p, uroots, "left", ON_SHELL_TOL)?;
    det_over_v(p, &p_onshell_matrix(p, uroots, lroots)?)
}

/// `⟨u_1..u_N|Φ{λ}⟩ = |P^{NR}|/|V|` with `{λ}` on-shell.
pub fn scalar_product_onshell_right(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
) -> Result<Complex64> {
    check_inputs(p, uroots, lroots)?;
    require_on_shell(p, lroots, "right", ON_SHELL_TOL)?;
    det_over_v(p, &p_onshell_matrix(p, lroots, uroots)?)
}

/// `Π_{m<n}φ_{mn}^{−2}·Π_{j≤u_upto}Λ({u},θ_j)·Π_{j>i}Λ({λ},θ_j)·Π_jΛ({λ},θ_j)`.
fn prefactor(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    u_upto: usize,
    i: usize,
) -> Result<Complex64> {
    let phi = phi_product(p)?;
    guard(&phi, "product of phi factors")?;
    let mut acc = 1.0 / (phi * phi);
    for j in 0..u_upto {
        acc *= lambda_tq(p, uroots, &p.thetas[j])?;
    }
    for j in i..p.n_sites {
        acc *= lambda_tq(p, lroots, &p.thetas[j])?;
    }
    for t in &p.thetas {
        acc *= lambda_tq(p, lroots, t)?;
    }
    Ok(acc)
}

/// Prefactor of the one-site form factors at site `i`.
pub fn one_site_prefactor(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    prefactor(p, uroots, lroots, i - 1, i)
}

/// Prefactor of the correlators on sites `i−1, i`.
pub fn two_site_prefactor(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    prefactor(p, uroots, lroots, i - 2, i)
}

/// `⟨Φ{u}|σ_i⁻|Φ{λ}⟩`.
pub fn ff_sigma_minus(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    check_on_shell(p, uroots, lroots)?;
    let ti = theta(p, i)?;
    let she = p.eta.sinh();
    let fd = p_matrix_with(p, uroots, lroots, |h, m| {
        (ti - p.thetas[m] + p.eta * h as f64).sinh() / she
    })?;
    Ok(one_site_prefactor(p, uroots, lroots, i)? * det_over_v(p, &fd)?)
}

/// `(N+1)×(N+1)` matrix with the scalar-product block, last column
/// `col_scale·ξ(θ_i, θ_m)`, last row `e^{2θ_i(n−1)}` and the given corner.
fn bordered_c_matrix(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    ti: Complex64,
    col_scale: f64,
    corner: Complex64,
) -> Result<CMatrix> {
    let n = p.n_sites;
    let pm = p_matrix(p, uroots, lroots)?;
    let mut f = CMatrix::zeros(n + 1, n + 1);
    for r in 0..n {
        for c in 0..n {
            f[(r, c)] = pm[(r, c)];
        }
        f[(r, n)] = col_scale * xi(p, uroots, lroots, ti, p.thetas[r])?;
    }
    for (c, e) in power_row(ti, n).enumerate() {
        f[(n, c)] = e;
    }
    f[(n, n)] = corner;
    Ok(f)
}

/// The matrix `F^C` for the operator `C(θ_i)`.
pub fn f_c_matrix(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<CMatrix> {
    let ti = theta(p, i)?;
    bordered_c_matrix(p, uroots, lroots, ti, 1.0, Complex64::new(0.0, 0.0))
}

/// `⟨Φ{u}|C(θ_i)|Φ{λ}⟩ = |F^C|/|V|`.
pub fn c_factor(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    check_on_shell(p, uroots, lroots)?;
    det_over_v(p, &f_c_matrix(p, uroots, lroots, i)?)
}

/// Which eigenvalue sits in the corner of `F^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZCorner {
    /// `−Λ({λ}, θ_i)`, the determinant as displayed.
    Right,
    /// `−Λ({u}, θ_i)`, the variant read off the operator identity.
    Left,
}

pub fn f_z_matrix(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
    corner: ZCorner,
) -> Result<CMatrix> {
    let ti = theta(p, i)?;
    let roots = match corner {
        ZCorner::Right => lroots,
        ZCorner::Left => uroots,
    };
    let lam = lambda_tq(p, roots, &ti)?;
    bordered_c_matrix(p, uroots, lroots, ti, 2.0, -lam)
}

/// `⟨Φ{u}|σ_i^z|Φ{λ}⟩`.
pub fn ff_sigma_z(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    ff_sigma_z_with_corner(p, uroots, lroots, i, ZCorner::Right)
}

pub fn ff_sigma_z_with_corner(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
    corner: ZCorner,
) -> Result<Complex64> {
    check_on_shell(p, uroots, lroots)?;
    let f = f_z_matrix(p, uroots, lroots, i, corner)?;
    Ok(one_site_prefactor(p, uroots, lroots, i)? * det_over_v(p, &f)?)
}

fn require_pair_site(p: &ChainParams, i: usize) -> Result<()> {
    if i < 2 || i > p.n_sites {
        return Err(Error::InvalidParams(format!(
            "two-site correlator needs 2 <= i <= {}, got {i}",
            p.n_sites
        )));
    }
    Ok(())
}

/// `⟨Φ{u}|σ_{i−1}⁻σ_i⁻|Φ{λ}⟩`.
pub fn cf_minus_minus(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    require_pair_site(p, i)?;
    check_on_shell(p, uroots, lroots)?;
    let (ti, tim) = (p.thetas[i - 1], p.thetas[i - 2]);
    let she2 = p.eta.sinh() * p.eta.sinh();
    let fdd = p_matrix_with(p, uroots, lroots, |h, m| {
        let s = p.eta * h as f64 - p.thetas[m];
        (tim + s).sinh() * (ti + s).sinh() / she2
    })?;
    Ok(two_site_prefactor(p, uroots, lroots, i)? * det_over_v(p, &fdd)?)
}

/// `F^{CC}` for a given `j'` (1-based), before deleting row `j'`.
pub fn f_cc_matrix(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
    jp: usize,
) -> Result<CMatrix> {
    require_pair_site(p, i)?;
    let n = p.n_sites;
    let tjp = theta(p, jp)?;
    let pm = p_matrix(p, uroots, lroots)?;
    let mut f = CMatrix::zeros(n + 2, n + 1);
    for r in 0..n {
        for c in 0..n {
            f[(r, c)] = pm[(r, c)];
        }
        let den = (p.thetas[r] - tjp - p.eta).sinh();
        guard(&den, "sinh(theta_m - theta_j' - eta) in F^CC")?;
        f[(r, n)] = gamma2(p, uroots, lroots, i, r + 1)? / den;
    }
    for (c, e) in power_row(p.thetas[i - 2], n).enumerate() {
        f[(n, c)] = e;
    }
    for (c, e) in power_row(p.thetas[i - 1], n).enumerate() {
        f[(n + 1, c)] = e;
    }
    Ok(f)
}

/// `⟨Φ{u}|C(θ_{i−1})C(θ_i)|Φ{λ}⟩` as a signed sum of reduced determinants.
pub fn cc_sum(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    require_pair_site(p, i)?;
    check_on_shell(p, uroots, lroots)?;
    let n = p.n_sites;
    let terms: Vec<Complex64> = (1..=n)
        .into_par_iter()
        .map(|jp| -> Result<Complex64> {
            let g1 = gamma1(p, uroots, lroots, i, jp)?;
            let reduced = f_cc_matrix(p, uroots, lroots, i, jp)?.without_row(jp - 1);
            let sign = if (n + jp).is_multiple_of(2) { 1.0 } else { -1.0 };
            Ok(sign * g1 * reduced.determinant()?)
        })
        .collect::<Result<_>>()?;
    let total: Complex64 = terms.into_iter().sum();
    let v = vandermonde_det(&p.thetas);
    guard(&v, "Vandermonde determinant of the inhomogeneities")?;
    Ok(total / v)
}

/// `⟨Φ{u}|σ_{i−1}^zσ_i^z|Φ{λ}⟩`.
pub fn cf_zz(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    require_pair_site(p, i)?;
    check_on_shell(p, uroots, lroots)?;
    let (ti, tim) = (p.thetas[i - 1], p.thetas[i - 2]);
    let cc = cc_sum(p, uroots, lroots, i)?;
    let fc = det_over_v(p, &f_c_matrix(p, uroots, lroots, i - 1)?)?;
    let fz = det_over_v(p, &f_z_matrix(p, uroots, lroots, i, ZCorner::Right)?)?;
    let bracket =
        4.0 * cc - 2.0 * lambda_tq(p, lroots, &ti)? * fc - lambda_tq(p, uroots, &tim)? * fz;
    Ok(two_site_prefactor(p, uroots, lroots, i)? * bracket)
}

//! Chain parameters, root sets and the scalar building blocks of the
//! T-Q solution and SoV formulas.
//!
//! Functions that enter derivative computations are generic over [`Scalar`],
//! so they accept either a plain `Complex64` or a [`crate::numeric::Jet`].
//! Site and row indices in the public API are 1-based, as in the physics.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::scalar::{guard, Scalar, POLE_TOL};
use crate::numeric::CMatrix;

/// Tolerance used when checking that inhomogeneities are pairwise distinct.
pub const DEGENERACY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    pub n_sites: usize,
    pub eta: Complex64,
    pub thetas: Vec<Complex64>,
}

impl ChainParams {
    pub fn new(n_sites: usize, eta: Complex64, thetas: Vec<Complex64>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidParams(
                "the chain needs at least one site".into(),
            ));
        }
        if thetas.len() != n_sites {
            return Err(Error::InvalidParams(format!(
                "{} inhomogeneities given for {n_sites} sites",
                thetas.len()
            )));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !finite(&eta) || !thetas.iter().all(finite) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if eta.sinh().norm() < POLE_TOL {
            return Err(Error::InvalidParams(format!(
                "sinh(eta) vanishes at eta = {eta}"
            )));
        }
        Ok(Self {
            n_sites,
            eta,
            thetas,
        })
    }

    /// All inhomogeneities set to zero.
    pub fn homogeneous(n_sites: usize, eta: Complex64) -> Result<Self> {
        Self::new(n_sites, eta, vec![Complex64::new(0.0, 0.0); n_sites])
    }

    /// `θ_j = ε·j`, the path used to approach the homogeneous point.
    pub fn epsilon_path(n_sites: usize, eta: Complex64, eps: f64) -> Result<Self> {
        let thetas = (1..=n_sites)
            .map(|j| Complex64::new(eps * j as f64, 0.0))
            .collect();
        Self::new(n_sites, eta, thetas)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.thetas.iter().all(|t| *t == Complex64::new(0.0, 0.0))
    }

    pub fn sinh_eta(&self) -> Complex64 {
        self.eta.sinh()
    }

    /// Rejects coincident `θ_i = θ_j` or `θ_i = θ_j ± η` (mod iπ), which make
    /// the SoV normalisation and the determinant formulas singular.
    pub fn check_nondegenerate(&self) -> Result<()> {
        let n = self.n_sites;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let d = self.thetas[i] - self.thetas[j];
                for shift in [Complex64::new(0.0, 0.0), self.eta, -self.eta] {
                    if (d - shift).sinh().norm() < DEGENERACY_TOL {
                        return Err(Error::Singular(format!(
                            "inhomogeneities {} and {} are degenerate",
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Sort key tolerance; imaginary parts closer than this are treated as equal.
const ORDER_TOL: f64 = 1e-9;

fn canonical_cmp(a: &Complex64, b: &Complex64) -> Ordering {
    let (ia, ib) = ((a.im / ORDER_TOL).round(), (b.im / ORDER_TOL).round());
    ia.partial_cmp(&ib)
        .unwrap_or(Ordering::Equal)
        .then(a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal))
}

/// Sorts roots by `(im, re)`.
pub fn canonical_order(roots: &mut [Complex64]) {
    roots.sort_by(canonical_cmp);
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub residual: f64,
    pub on_shell: bool,
}

impl RootSet {
    pub fn new(mut roots: Vec<Complex64>, residual: f64, on_shell: bool) -> Self {
        canonical_order(&mut roots);
        Self {
            roots,
            residual,
            on_shell,
        }
    }

    /// A root set with its residual computed against `p` and flagged on-shell
    /// when the residual is within `tol`.
    pub fn certified(p: &ChainParams, roots: Vec<Complex64>, tol: f64) -> Self {
        let residual = crate::bae::max_residual(p, &roots);
        Self::new(roots, residual, residual <= tol)
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Max component distance after canonical ordering.
    pub fn distance(&self, other: &RootSet) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.roots
            .iter()
            .zip(&other.roots)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_record(&self, eta: Complex64) -> RootSetRecord {
        RootSetRecord {
            n: self.len(),
            eta: eta.into(),
            roots: self.roots.iter().map(|&z| z.into()).collect(),
            residual: self.residual,
            on_shell: self.on_shell,
        }
    }
}

impl std::ops::Deref for RootSet {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.roots
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexRecord {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexRecord> for Complex64 {
    fn from(r: ComplexRecord) -> Self {
        Complex64::new(r.re, r.im)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSetRecord {
    pub n: usize,
    pub eta: ComplexRecord,
    pub roots: Vec<ComplexRecord>,
    pub residual: f64,
    pub on_shell: bool,
}

impl RootSetRecord {
    pub fn to_root_set(&self) -> Result<RootSet> {
        if self.roots.len() != self.n {
            return Err(Error::InvalidParams(format!(
                "record declares n = {} but lists {} roots",
                self.n,
                self.roots.len()
            )));
        }
        Ok(RootSet::new(
            self.roots.iter().map(|&r| r.into()).collect(),
            self.residual,
            self.on_shell,
        ))
    }
}

/// A label `h_1..h_N ∈ {0,1}^N` of the SoV basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SovLabel(pub Vec<u8>);

impl SovLabel {
    /// Label number `idx` in lexicographic order on `(h_1..h_N)`.
    pub fn from_index(n: usize, idx: usize) -> Self {
        Self((0..n).map(|j| ((idx >> (n - 1 - j)) & 1) as u8).collect())
    }

    /// All `2^N` labels in lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = SovLabel> {
        (0..1usize << n).map(move |idx| Self::from_index(n, idx))
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }
}

fn inv_sinh_eta(eta: Complex64) -> Complex64 {
    1.0 / eta.sinh()
}

fn sinh_product<S: Scalar>(u: &S, shifts: impl Iterator<Item = Complex64>, eta: Complex64) -> S {
    let k = inv_sinh_eta(eta);
    shifts.fold(u.lift(Complex64::new(1.0, 0.0)), |acc, s| {
        acc * u.shift(s).sinh().scale(k)
    })
}

/// `a(u) = Π_k sinh(u − θ_k + η)/sinh η`.
pub fn a_func<S: Scalar>(p: &ChainParams, u: &S) -> S {
    sinh_product(u, p.thetas.iter().map(|t| p.eta - t), p.eta)
}

/// `d(u) = Π_k sinh(u − θ_k)/sinh η`.
pub fn d_func<S: Scalar>(p: &ChainParams, u: &S) -> S {
    sinh_product(u, p.thetas.iter().map(|t| -t), p.eta)
}

/// `Q(u) = Π_j sinh(u − λ_j)/sinh η`.
pub fn q_func<S: Scalar>(roots: &[Complex64], u: &S, eta: Complex64) -> S {
    sinh_product(u, roots.iter().map(|l| -l), eta)
}

fn theta_minus_lambda(p: &ChainParams, roots: &[Complex64]) -> Complex64 {
    p.thetas.iter().sum::<Complex64>() - roots.iter().sum::<Complex64>()
}

/// `c(u) = e^{u − Nη + Σ(θ_l − λ_l)} − e^{−u − η − Σ(θ_l − λ_l)}`.
pub fn c_func<S: Scalar>(p: &ChainParams, roots: &[Complex64], u: &S) -> S {
    let s = theta_minus_lambda(p, roots);
    let n = p.n_sites as f64;
    let first = u.shift(s - p.eta * n).exp();
    let second = (-u.clone()).shift(-p.eta - s).exp();
    first - second
}

/// Numerator of the T-Q relation, `Λ(u)Q(u)`; its zeros at the roots are the BAEs.
pub fn tq_numerator<S: Scalar>(p: &ChainParams, roots: &[Complex64], u: &S) -> S {
    let eta = p.eta;
    let a = a_func(p, u);
    let d = d_func(p, u);
    let t1 = a.clone() * u.exp() * q_func(roots, &u.shift(-eta), eta);
    let t2 = (-u.clone()).shift(-eta).exp() * d.clone() * q_func(roots, &u.shift(eta), eta);
    let t3 = c_func(p, roots, u) * a * d;
    t1 - t2 - t3
}

/// Transfer-matrix eigenvalue from the inhomogeneous T-Q relation.
pub fn lambda_tq<S: Scalar>(p: &ChainParams, roots: &[Complex64], u: &S) -> Result<S> {
    let q = q_func(roots, u, p.eta);
    guard(&q, "Lambda evaluated at a Bethe root")?;
    tq_numerator(p, roots, u).try_div(&q)
}

/// `E = 2 sinh η Σ_j [coth(λ_j + η) − coth λ_j] − N cosh η − 2 sinh η`.
pub fn energy(roots: &[Complex64], eta: Complex64, n: usize) -> Result<Complex64> {
    let she = eta.sinh();
    let mut sum = Complex64::new(0.0, 0.0);
    for &l in roots {
        let (s0, s1) = (l.sinh(), (l + eta).sinh());
        if s0.norm() < POLE_TOL || s1.norm() < POLE_TOL {
            return Err(Error::Singular(format!("root {l} sits on a coth pole")));
        }
        sum += (l + eta).cosh() / s1 - l.cosh() / s0;
    }
    Ok(2.0 * she * sum - n as f64 * eta.cosh() - 2.0 * she)
}

/// `d̄({λ}, u, h) = Π_k sinh(λ_k − u + ηh)/sinh η`.
pub fn dbar<S: Scalar>(roots: &[Complex64], u: &S, h: u8, eta: Complex64) -> S {
    let k = inv_sinh_eta(eta);
    let eh = eta * h as f64;
    roots
        .iter()
        .fold(u.lift(Complex64::new(1.0, 0.0)), |acc, l| {
            acc * (-u.clone()).shift(l + eh).sinh().scale(k)
        })
}

/// `τ = d̄({u},u,h)·d̄({λ},u,h)·[−a(u)/d(u−η)]^h·e^{2uh + ηh(N−1)}`.
pub fn tau<S: Scalar>(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    h: u8,
    u: &S,
) -> Result<S> {
    let base = dbar(uroots, u, h, p.eta) * dbar(lroots, u, h, p.eta);
    if h == 0 {
        return Ok(base);
    }
    let dm = d_func(p, &u.shift(-p.eta));
    guard(&dm, "d(u - eta) in tau")?;
    let ratio = (-a_func(p, u)).try_div(&dm)?;
    let expo = (u.scale(Complex64::new(2.0, 0.0)))
        .shift(p.eta * (p.n_sites as f64 - 1.0))
        .exp();
    Ok(base * ratio * expo)
}

/// The function ξ attached to the last column of the σᶻ and C determinants.
pub fn xi(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    theta_i: Complex64,
    theta_j: Complex64,
) -> Result<Complex64> {
    let eta = p.eta;
    let she = eta.sinh();
    let n = p.n_sites as f64;
    let dm = d_func(p, &(theta_j - eta));
    guard(&dm, "d(theta_j - eta) in xi")?;
    let mut acc = dbar(uroots, &theta_j, 1, eta)
        * dbar(lroots, &theta_j, 1, eta)
        * (-a_func(p, &theta_j) / dm)
        * (theta_i + eta * n).exp();
    for (uk, tk) in uroots.iter().zip(&p.thetas) {
        let den = (theta_j - uk - eta).sinh();
        guard(&den, "sinh(theta_j - u_k - eta) in xi")?;
        acc *= (-theta_i + theta_j - eta).exp() * (theta_j - uk).sinh() / den
            * (theta_j - tk - eta).sinh()
            / she;
    }
    Ok(acc)
}

fn site(p: &ChainParams, i: usize) -> Result<Complex64> {
    if i == 0 || i > p.n_sites {
        return Err(Error::InvalidParams(format!(
            "site {i} outside 1..={}",
            p.n_sites
        )));
    }
    Ok(p.thetas[i - 1])
}

/// `γ₁ = −[sinh(θ_{i−1} − θ_{j'})/sinh(θ_i − θ_{i−1})]·ξ(θ_i, θ_{j'})`.
pub fn gamma1(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
    jp: usize,
) -> Result<Complex64> {
    if i < 2 {
        return Err(Error::InvalidParams("gamma1 needs site i >= 2".into()));
    }
    let (ti, tim, tjp) = (site(p, i)?, site(p, i - 1)?, site(p, jp)?);
    let den = (ti - tim).sinh();
    guard(&den, "sinh(theta_i - theta_{i-1}) in gamma1")?;
    Ok(-(tim - tjp).sinh() / den * xi(p, uroots, lroots, ti, tjp)?)
}

/// `γ₂ = −sinh(θ_i − θ_j + η)·ξ(θ_{i−1}, θ_j)`.
pub fn gamma2(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
    j: usize,
) -> Result<Complex64> {
    if i < 2 {
        return Err(Error::InvalidParams("gamma2 needs site i >= 2".into()));
    }
    let (ti, tim, tj) = (site(p, i)?, site(p, i - 1)?, site(p, j)?);
    Ok(-(ti - tj + p.eta).sinh() * xi(p, uroots, lroots, tim, tj)?)
}

/// `φ_{jk} = sinh(η − θ_j + θ_k)·sinh(η + θ_j − θ_k)/sinh²η`.
pub fn phi_jk(p: &ChainParams, j: usize, k: usize) -> Result<Complex64> {
    let (tj, tk) = (site(p, j)?, site(p, k)?);
    let she = p.eta.sinh();
    Ok((p.eta - tj + tk).sinh() * (p.eta + tj - tk).sinh() / (she * she))
}

/// `Π_{m<n} φ_{mn}`.
pub fn phi_product(p: &ChainParams) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for m in 1..=p.n_sites {
        for n in m + 1..=p.n_sites {
            acc *= phi_jk(p, m, n)?;
        }
    }
    Ok(acc)
}

/// `V[i,j] = e^{2 x_i (j−1)}`.
pub fn vandermonde(xs: &[Complex64]) -> CMatrix {
    let n = xs.len();
    CMatrix::from_fn(n, n, |i, j| (2.0 * xs[i] * j as f64).exp())
}

/// `Π_{j<i}(e^{2x_i} − e^{2x_j})`.
pub fn vandermonde_det(xs: &[Complex64]) -> Complex64 {
    let ys: Vec<Complex64> = xs.iter().map(|x| (2.0 * x).exp()).collect();
    let mut acc = Complex64::new(1.0, 0.0);
    for i in 0..ys.len() {
        for j in 0..i {
            acc *= ys[i] - ys[j];
        }
    }
    acc
}

/// Normalisation `⟨h|h⟩` of the SoV basis.
pub fn sov_norm_f(p: &ChainParams, h: &SovLabel) -> Result<Complex64> {
    let n = p.n_sites;
    if h.0.len() != n {
        return Err(Error::Dimension(format!(
            "label of length {} for {n} sites",
            h.0.len()
        )));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for (l, &hl) in h.0.iter().enumerate() {
        if hl == 1 {
            let t = p.thetas[l];
            acc *= -a_func(p, &t) * d_func(p, &(t - p.eta)) * (-p.eta * (n as f64 - 1.0)).exp();
        }
    }
    let shifted: Vec<Complex64> = p
        .thetas
        .iter()
        .zip(&h.0)
        .map(|(t, &hl)| t - p.eta * hl as f64)
        .collect();
    // |V(θ)|/|V(θ − ηh)| as a product of factor ratios, guarded relative to scale.
    let y: Vec<Complex64> = p.thetas.iter().map(|t| (2.0 * t).exp()).collect();
    let ys: Vec<Complex64> = shifted.iter().map(|t| (2.0 * t).exp()).collect();
    for i in 0..n {
        for j in 0..i {
            let den = ys[i] - ys[j];
            if den.norm() < POLE_TOL * ys[i].norm().max(ys[j].norm()) {
                return Err(Error::Singular("shifted Vandermonde determinant".into()));
            }
            acc *= (y[i] - y[j]) / den;
        }
    }
    Ok(acc)
}

/// Residue estimate `δ·[Λ(λ_j+δ) − Λ(λ_j−δ)]/2` at each root, maximised over
/// the roots. A simple pole of residue `ρ` contributes `ρ`; the regular part
/// contributes `O(δ²)`.
pub fn pole_residue_probe(p: &ChainParams, roots: &[Complex64], delta: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &r in roots {
        let up = lambda_tq(p, roots, &(r + delta))?;
        let dn = lambda_tq(p, roots, &(r - delta))?;
        worst = worst.max((delta * (up - dn) / 2.0).norm());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{c64, lu_determinant, real, Jet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    pub(crate) fn table_lambda() -> Vec<Complex64> {
        vec![
            real(-1.431625849182040),
            real(-0.5),
            real(0.431625849182040),
        ]
    }

    pub(crate) fn table_u() -> Vec<Complex64> {
        vec![
            c64(-1.637416729786854, 1.570796326794897),
            c64(-0.5, 1.570796326794896),
            c64(0.637416729786854, 1.570796326794897),
        ]
    }

    #[test]
    fn params_validation() {
        assert!(ChainParams::new(0, real(1.0), vec![]).is_err());
        assert!(ChainParams::new(2, real(1.0), vec![real(0.0)]).is_err());
        assert!(ChainParams::new(1, real(0.0), vec![real(0.0)]).is_err());
        let p = ChainParams::new(2, real(1.0), vec![real(0.1), real(0.1)]).unwrap();
        assert!(p.check_nondegenerate().is_err());
        let p = ChainParams::new(2, real(1.0), vec![real(0.1), real(1.1)]).unwrap();
        assert!(p.check_nondegenerate().is_err());
        let p = ChainParams::new(2, real(1.0), vec![real(0.1), real(-0.2)]).unwrap();
        assert!(p.check_nondegenerate().is_ok());
    }

    #[test]
    fn a_and_d_single_site() {
        let p = ChainParams::homogeneous(1, real(1.0)).unwrap();
        assert!(close(a_func(&p, &real(0.0)), real(1.0), 1e-15));
        assert_eq!(d_func(&p, &real(0.0)), real(0.0));
    }

    #[test]
    fn a_and_d_match_direct_products() {
        let th = vec![real(0.1), real(-0.2), c64(0.0, 0.3)];
        let p = ChainParams::new(3, real(1.0), th.clone()).unwrap();
        let u = real(0.5);
        let she = real(1.0).sinh();
        let a = (u - th[0] + 1.0).sinh() / she * (u - th[1] + 1.0).sinh() / she
            * (u - th[2] + 1.0).sinh()
            / she;
        let d = (u - th[0]).sinh() / she * (u - th[1]).sinh() / she * (u - th[2]).sinh() / she;
        assert!(close(a_func(&p, &u), a, 1e-14));
        assert!(close(d_func(&p, &u), d, 1e-14));
    }

    #[test]
    fn q_vanishes_at_roots() {
        let l = table_lambda();
        assert!(q_func(&l, &l[0], real(1.0)).norm() < 1e-15);
        assert!(close(
            q_func(&[real(0.0)], &real(1.0), real(1.0)),
            real(1.0),
            1e-15
        ));
        let u = real(0.7);
        let she = real(1.0).sinh();
        let direct: Complex64 = l.iter().map(|x| (u - x).sinh() / she).product();
        assert!(close(q_func(&l, &u, real(1.0)), direct, 1e-14));
    }

    #[test]
    fn c_with_empty_sums() {
        let p = ChainParams::new(1, real(1.0), vec![real(0.3)]).unwrap();
        let u = c64(0.2, 0.1);
        // Σθ − Σλ = 0 and N = 1.
        let c = c_func(&p, &[real(0.3)], &u);
        assert!(close(c, (u - 1.0).exp() - (-u - 1.0).exp(), 1e-15));
    }

    #[test]
    fn c_has_the_expected_zero() {
        let th = vec![real(0.1), real(-0.3)];
        let roots = vec![real(0.5), c64(0.2, 0.4)];
        let p = ChainParams::new(2, real(1.0), th).unwrap();
        let s = theta_minus_lambda(&p, &roots);
        // exponents match when 2u = (N−1)η − 2s
        let u0 = (p.eta * (2.0 - 1.0) - 2.0 * s) / 2.0;
        assert!(c_func(&p, &roots, &u0).norm() < 1e-14);
    }

    #[test]
    fn lambda_table_values() {
        let p = ChainParams::homogeneous(3, real(1.0)).unwrap();
        let lu = lambda_tq(&p, &table_u(), &real(0.0)).unwrap();
        let ll = lambda_tq(&p, &table_lambda(), &real(0.0)).unwrap();
        assert!((lu - real(1.0)).norm() < 1e-12, "{lu}");
        assert!((ll - real(-1.0)).norm() < 1e-12, "{ll}");
    }

    #[test]
    fn lambda_is_pole_free_on_shell() {
        let p = ChainParams::homogeneous(3, real(1.0)).unwrap();
        for roots in [table_lambda(), table_u()] {
            assert!(pole_residue_probe(&p, &roots, 1e-4).unwrap() <= 1e-6);
        }
        assert!(lambda_tq(&p, &table_lambda(), &table_lambda()[1]).is_err());
        let mut off = table_lambda();
        off[0] += 0.05;
        assert!(pole_residue_probe(&p, &off, 1e-4).unwrap() > 1e-3);
    }

    #[test]
    fn energies_are_real() {
        for roots in [table_lambda(), table_u()] {
            let e = energy(&roots, real(1.0), 3).unwrap();
            assert!(e.im.abs() < 1e-10, "{e}");
        }
        assert!(energy(&[real(0.0)], real(1.0), 1).is_err());
    }

    #[test]
    fn dbar_cases() {
        let l = table_lambda();
        assert!(dbar(&l, &l[0], 0, real(1.0)).norm() < 1e-15);
        let u = real(0.2);
        let she = real(1.0).sinh();
        let direct: Complex64 = l.iter().map(|x| (x - u + 1.0).sinh() / she).product();
        assert!(close(dbar(&l, &u, 1, real(1.0)), direct, 1e-14));
    }

    #[test]
    fn tau_h0_reduces_to_dbar_product() {
        let p = ChainParams::new(2, real(1.0), vec![real(0.1), real(-0.2)]).unwrap();
        let (us, ls) = (
            vec![real(0.3), c64(0.1, 0.2)],
            vec![c64(-0.4, 0.1), real(0.9)],
        );
        let u = c64(0.05, 0.02);
        let t = tau(&p, &us, &ls, 0, &u).unwrap();
        assert!(close(
            t,
            dbar(&us, &u, 0, p.eta) * dbar(&ls, &u, 0, p.eta),
            1e-15
        ));
    }

    #[test]
    fn tau_matches_transcription() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut rc = || c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
        let th = vec![rc(), rc()];
        let p = ChainParams::new(2, real(1.0), th.clone()).unwrap();
        let (us, ls) = (vec![rc(), rc()], vec![rc(), rc()]);
        let u = rc();
        let s = |z: Complex64| z.sinh();
        let e = real(1.0);
        let db = |r: &[Complex64]| r.iter().map(|x| s(x - u + e) / s(e)).product::<Complex64>();
        let a = th
            .iter()
            .map(|t| s(u - t + e) / s(e))
            .product::<Complex64>();
        let dm = th
            .iter()
            .map(|t| s(u - e - t) / s(e))
            .product::<Complex64>();
        let want = db(&us) * db(&ls) * (-a / dm) * (2.0 * u + e).exp();
        assert!(close(tau(&p, &us, &ls, 1, &u).unwrap(), want, 1e-14));
    }

    #[test]
    fn xi_zero_factor() {
        let p = ChainParams::new(2, real(1.0), vec![real(0.1), real(-0.2)]).unwrap();
        let us = vec![real(-0.2), real(0.7)];
        let ls = vec![c64(0.3, 0.1), real(-0.6)];
        assert!(xi(&p, &us, &ls, p.thetas[0], us[0]).unwrap().norm() < 1e-15);
    }

    #[test]
    fn gammas_vanish_where_expected() {
        let p = ChainParams::new(3, real(1.0), vec![real(0.1), real(-0.2), real(0.25)]).unwrap();
        let us = vec![real(-0.5), real(0.7), c64(0.1, 0.4)];
        let ls = vec![c64(0.3, 0.1), real(-0.6), real(1.2)];
        assert!(gamma1(&p, &us, &ls, 3, 2).unwrap().norm() < 1e-15);
        // sinh(θ_i − θ_j + η) = 0 forces θ_j − η onto another inhomogeneity, where ξ has a pole.
        let q = ChainParams::new(2, real(1.0), vec![real(1.1), real(0.1)]).unwrap();
        assert!(gamma2(&q, &us[..2], &ls[..2], 2, 1).is_err());
        assert!(gamma1(&p, &us, &ls, 1, 1).is_err());
    }

    #[test]
    fn gammas_match_transcription() {
        let p = ChainParams::new(2, real(1.0), vec![c64(0.1, 0.05), c64(-0.2, 0.1)]).unwrap();
        let us = vec![c64(-0.5, 0.2), real(0.7)];
        let ls = vec![c64(0.3, 0.1), real(-0.6)];
        let t = &p.thetas;
        let g1 =
            -(t[0] - t[1]).sinh() / (t[1] - t[0]).sinh() * xi(&p, &us, &ls, t[1], t[1]).unwrap();
        let g2 = -(t[1] - t[0] + p.eta).sinh() * xi(&p, &us, &ls, t[0], t[0]).unwrap();
        assert!(close(gamma1(&p, &us, &ls, 2, 2).unwrap(), g1, 1e-14));
        assert!(close(gamma2(&p, &us, &ls, 2, 1).unwrap(), g2, 1e-14));
    }

    #[test]
    fn phi_cases() {
        let p = ChainParams::new(3, real(1.0), vec![real(0.2), real(0.2), real(-0.8)]).unwrap();
        assert!(close(phi_jk(&p, 1, 2).unwrap(), real(1.0), 1e-15));
        assert!(phi_jk(&p, 1, 3).unwrap().norm() < 1e-14);
        let q = ChainParams::new(2, real(1.0), vec![c64(0.3, 0.1), real(-0.45)]).unwrap();
        assert!(close(
            phi_jk(&q, 1, 2).unwrap(),
            phi_jk(&q, 2, 1).unwrap(),
            1e-15
        ));
    }

    #[test]
    fn vandermonde_cases() {
        assert_eq!(vandermonde_det(&[real(0.4)]), real(1.0));
        let y = c64(0.3, -0.2);
        assert!(close(
            vandermonde_det(&[real(0.0), y]),
            (2.0 * y).exp() - 1.0,
            1e-15
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<Complex64> = (0..5)
            .map(|_| c64(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
            .collect();
        let lu = lu_determinant(&vandermonde(&xs)).unwrap();
        let pf = vandermonde_det(&xs);
        assert!((lu - pf).norm() <= 1e-12 * pf.norm());
    }

    #[test]
    fn sov_norm_trivial_cases() {
        let p = ChainParams::new(3, real(1.0), vec![real(0.1), real(-0.2), real(0.25)]).unwrap();
        assert_eq!(sov_norm_f(&p, &SovLabel(vec![0, 0, 0])).unwrap(), real(1.0));
        let q = ChainParams::new(1, real(1.0), vec![real(0.3)]).unwrap();
        let t = q.thetas[0];
        let want = -a_func(&q, &t) * d_func(&q, &(t - q.eta));
        assert!(close(
            sov_norm_f(&q, &SovLabel(vec![1])).unwrap(),
            want,
            1e-15
        ));
    }

    #[test]
    fn labels_are_lexicographic() {
        let all: Vec<_> = SovLabel::all(2).collect();
        assert_eq!(
            all,
            vec![
                SovLabel(vec![0, 0]),
                SovLabel(vec![0, 1]),
                SovLabel(vec![1, 0]),
                SovLabel(vec![1, 1])
            ]
        );
    }

    #[test]
    fn root_sets_are_canonical() {
        let a = RootSet::new(vec![real(0.4), c64(0.1, 1.0), real(-0.3)], 0.0, true);
        let b = RootSet::new(vec![c64(0.1, 1.0), real(-0.3), real(0.4)], 0.0, true);
        assert_eq!(a, b);
        assert_eq!(a.roots[0], real(-0.3));
        let rec = a.to_record(real(1.0));
        let json = serde_json::to_string(&rec).unwrap();
        let back: RootSetRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_root_set().unwrap(), a);
    }

    #[test]
    fn jets_of_order_zero_agree_with_plain_values() {
        let p = ChainParams::new(3, real(1.0), vec![real(0.1), real(-0.2), real(0.25)]).unwrap();
        let (us, ls) = (table_u(), table_lambda());
        let u = c64(0.17, -0.05);
        let ju = Jet::constant(u, 0);
        let pairs = [
            (a_func(&p, &u), a_func(&p, &ju).value()),
            (d_func(&p, &u), d_func(&p, &ju).value()),
            (c_func(&p, &ls, &u), c_func(&p, &ls, &ju).value()),
            (
                lambda_tq(&p, &ls, &u).unwrap(),
                lambda_tq(&p, &ls, &ju).unwrap().value(),
            ),
            (
                tau(&p, &us, &ls, 1, &u).unwrap(),
                tau(&p, &us, &ls, 1, &ju).unwrap().value(),
            ),
            (dbar(&ls, &u, 1, p.eta), dbar(&ls, &ju, 1, p.eta).value()),
        ];
        for (plain, jet) in pairs {
            assert!(close(jet, plain, 1e-12), "{jet} vs {plain}");
        }
    }
}

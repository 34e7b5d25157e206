//! Explicit sums over the `2^N` SoV labels. These are exponentially slow and
//! serve as independent cross-checks of the determinant forms.

use num_complex::Complex64;

use crate::error::Result;
use crate::model::{
    a_func, d_func, gamma1, gamma2, lambda_tq, sov_norm_f, tau, vandermonde_det, xi, ChainParams,
    SovLabel,
};
use crate::numeric::scalar::guard;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn shifted(p: &ChainParams, h: &[u8]) -> Vec<Complex64> {
    p.thetas
        .iter()
        .zip(h)
        .map(|(t, &hl)| t - p.eta * hl as f64)
        .collect()
}

fn base_v(p: &ChainParams) -> Result<Complex64> {
    let v = vandermonde_det(&p.thetas);
    guard(&v, "Vandermonde determinant of the inhomogeneities")?;
    Ok(v)
}

/// `Π_j Π_k sinh(x_j − θ_k + ηh_k)/sinh(x_j − θ_k)`.
fn shift_ratio(p: &ChainParams, xs: &[Complex64], h: &[u8]) -> Result<Complex64> {
    let mut acc = one();
    for x in xs {
        for (t, &hk) in p.thetas.iter().zip(h) {
            let den = (x - t).sinh();
            guard(&den, "root on an inhomogeneity")?;
            acc *= (x - t + p.eta * hk as f64).sinh() / den;
        }
    }
    Ok(acc)
}

fn d_product(p: &ChainParams, xs: &[Complex64]) -> Complex64 {
    xs.iter().map(|x| d_func(p, x)).product()
}

/// `⟨u|λ⟩` as a sum over SoV labels weighted by `[a²(θ_j)e^{2θ_j}]^{h_j}`.
pub fn scalar_product(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
) -> Result<Complex64> {
    let dd = d_product(p, uroots) * d_product(p, lroots);
    let mut total = Complex64::new(0.0, 0.0);
    for h in SovLabel::all(p.n_sites) {
        let mut w = dd / sov_norm_f(p, &h)?;
        for (t, &hj) in p.thetas.iter().zip(h.bits()) {
            if hj == 1 {
                let a = a_func(p, t);
                w *= a * a * (2.0 * t).exp();
            }
        }
        total += w * shift_ratio(p, uroots, h.bits())? * shift_ratio(p, lroots, h.bits())?;
    }
    Ok(total)
}

/// `⟨Φ{on}|off⟩` with weights `[a(θ_j)e^{θ_j}Λ({on},θ_j)]^{h_j}`.
pub fn scalar_product_onshell(
    p: &ChainParams,
    on: &[Complex64],
    off: &[Complex64],
) -> Result<Complex64> {
    let dd = d_product(p, on) * d_product(p, off);
    let lam: Vec<Complex64> = p
        .thetas
        .iter()
        .map(|t| lambda_tq(p, on, t))
        .collect::<Result<_>>()?;
    let mut total = Complex64::new(0.0, 0.0);
    for h in SovLabel::all(p.n_sites) {
        let mut w = dd / sov_norm_f(p, &h)?;
        for ((t, &hj), l) in p.thetas.iter().zip(h.bits()).zip(&lam) {
            if hj == 1 {
                w *= a_func(p, t) * t.exp() * l;
            }
        }
        total += w * shift_ratio(p, off, h.bits())?;
    }
    Ok(total)
}

/// `⟨Φ{u}|C(θ_i)|Φ{λ}⟩` by expanding `C` on the SoV basis. The overall sign
/// is `(−1)^{j+N+1}`, the one that reproduces the bordered determinant.
pub fn c_factor(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    let n = p.n_sites;
    let ti = p.thetas[i - 1];
    let mut total = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let x = xi(p, uroots, lroots, ti, p.thetas[j])?;
        let sign = if (j + n).is_multiple_of(2) { 1.0 } else { -1.0 };
        for rest in SovLabel::all(n - 1) {
            let mut h = rest.0.clone();
            h.insert(j, 1);
            let mut w = sign * x;
            for k in (0..n).filter(|&k| k != j) {
                w *= tau(p, uroots, lroots, h[k], &p.thetas[k])?;
            }
            let mut rows = shifted(p, &h);
            rows.remove(j);
            rows.push(ti);
            total += w * vandermonde_det(&rows);
        }
    }
    Ok(total / base_v(p)?)
}

/// `⟨Φ{u}|C(θ_{i−1})C(θ_i)|Φ{λ}⟩` as the double sum over `j' ≠ j`.
pub fn cc(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    i: usize,
) -> Result<Complex64> {
    let n = p.n_sites;
    let (ti, tim) = (p.thetas[i - 1], p.thetas[i - 2]);
    let mut total = Complex64::new(0.0, 0.0);
    for jp in 0..n {
        let g1 = gamma1(p, uroots, lroots, i, jp + 1)?;
        for j in (0..n).filter(|&j| j != jp) {
            let x = usize::from(jp < j);
            let sign = if ((j + 1) + (jp + 1) + 1 + x) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            let den = (p.thetas[j] - p.thetas[jp] - p.eta).sinh();
            guard(&den, "sinh(theta_j - theta_j' - eta)")?;
            let coeff = sign * g1 * gamma2(p, uroots, lroots, i, j + 1)? / den;
            for rest in SovLabel::all(n - 2) {
                let mut it = rest.0.iter();
                let h: Vec<u8> = (0..n)
                    .map(|k| {
                        if k == j || k == jp {
                            1
                        } else {
                            *it.next().unwrap()
                        }
                    })
                    .collect();
                let mut w = coeff;
                for k in (0..n).filter(|&k| k != j && k != jp) {
                    w *= tau(p, uroots, lroots, h[k], &p.thetas[k])?;
                }
                let sh = shifted(p, &h);
                let mut rows: Vec<Complex64> = (0..n)
                    .filter(|&k| k != j && k != jp)
                    .map(|k| sh[k])
                    .collect();
                rows.push(tim);
                rows.push(ti);
                total += w * vandermonde_det(&rows);
            }
        }
    }
    Ok(total / base_v(p)?)
}

//! Truncated Taylor series in one complex variable.
//!
//! A [`Jet`] of order `K` stores the raw coefficients `c_0..c_K` of
//! `f(x0 + ε) = Σ c_k ε^k + O(ε^{K+1})`. Arithmetic is exact to that order.
//! Derivatives are only formed at extraction (`f^{(k)}(x0) = k!·c_k`).

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<Complex64>,
}

impl Jet {
    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The identity map expanded at `at`: `at + 1·ε`.
    pub fn variable(at: Complex64, order: usize) -> Self {
        let mut j = Self::constant(at, order);
        if order >= 1 {
            j.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least a constant term");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `(f, f', f'', ..., f^{(K)})` at the expansion point.
    pub fn derivatives(&self) -> Vec<Complex64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        Self {
            coeffs: (0..n).map(|k| f(self.coeffs[k], rhs.coeffs[k])).collect(),
        }
    }

    fn mul_ref(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum())
            .collect();
        Self { coeffs }
    }

    fn div_ref(&self, rhs: &Self) -> Result<Self> {
        let b0 = rhs.coeffs[0];
        if b0.norm() < f64::MIN_POSITIVE {
            return Err(Error::SingularJet);
        }
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut q: Vec<Complex64> = Vec::with_capacity(n);
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= rhs.coeffs[j] * q[k - j];
            }
            q.push(acc / b0);
        }
        Ok(Self { coeffs: q })
    }

    fn exp_ref(&self) -> Self {
        let x = &self.coeffs;
        let mut y = Vec::with_capacity(x.len());
        y.push(x[0].exp());
        for k in 1..x.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                acc += x[j] * y[k - j] * j as f64;
            }
            y.push(acc / k as f64);
        }
        Self { coeffs: y }
    }

    /// sinh and cosh together via s' = c·x', c' = s·x'.
    fn sinh_cosh(&self) -> (Self, Self) {
        let x = &self.coeffs;
        let mut s = Vec::with_capacity(x.len());
        let mut c = Vec::with_capacity(x.len());
        s.push(x[0].sinh());
        c.push(x[0].cosh());
        for k in 1..x.len() {
            let mut acc_s = Complex64::new(0.0, 0.0);
            let mut acc_c = Complex64::new(0.0, 0.0);
            for j in 1..=k {
                let w = x[j] * j as f64;
                acc_s += w * c[k - j];
                acc_c += w * s[k - j];
            }
            s.push(acc_s / k as f64);
            c.push(acc_c / k as f64);
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip_with(&rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip_with(&rhs, |a, b| a - b)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        self.mul_ref(&rhs)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        Jet {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl Scalar for Jet {
    fn lift(&self, c: Complex64) -> Self {
        Jet::constant(c, self.order())
    }

    fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    fn exp(&self) -> Self {
        self.exp_ref()
    }

    fn sinh(&self) -> Self {
        self.sinh_cosh().0
    }

    fn cosh(&self) -> Self {
        self.sinh_cosh().1
    }

    fn scale(&self, c: Complex64) -> Self {
        Jet {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.div_ref(rhs)
    }
}

pub fn jet_exp(x: &Jet) -> Jet {
    x.exp_ref()
}

pub fn jet_sinh(x: &Jet) -> Jet {
    x.sinh_cosh().0
}

pub fn jet_div(a: &Jet, b: &Jet) -> Result<Jet> {
    a.div_ref(b)
}

pub fn jet_pow_int(x: &Jet, p: i32) -> Result<Jet> {
    x.powi(p)
}

/// `(f(at), f'(at), ..., f^{(K)}(at))` from the order-`K` jet of `f`.
pub fn jet_derivatives<F>(f: F, at: Complex64, upto: usize) -> Result<Vec<Complex64>>
where
    F: FnOnce(&Jet) -> Result<Jet>,
{
    let x = Jet::variable(at, upto);
    Ok(f(&x)?.derivatives())
}

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Scalar type the model functions are written against.
///
/// Implemented by plain [`Complex64`] and by truncated Taylor series
/// ([`crate::numeric::Jet`]), so the same formula code yields values or exact
/// derivatives depending on what it is fed.
pub trait Scalar:
    Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// A constant of the same shape as `self` (same jet order).
    fn lift(&self, c: Complex64) -> Self;

    /// Value at the expansion point (constant term).
    fn value(&self) -> Complex64;

    fn exp(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn scale(&self, c: Complex64) -> Self;
    fn try_div(&self, rhs: &Self) -> Result<Self>;

    fn shift(&self, c: Complex64) -> Self {
        self.clone() + self.lift(c)
    }

    fn powi(&self, p: i32) -> Result<Self> {
        let mut base = self.clone();
        let mut acc = self.lift(Complex64::new(1.0, 0.0));
        let mut e = p.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        if p < 0 {
            self.lift(Complex64::new(1.0, 0.0)).try_div(&acc)
        } else {
            Ok(acc)
        }
    }
}

impl Scalar for Complex64 {
    fn lift(&self, c: Complex64) -> Self {
        c
    }

    fn value(&self) -> Complex64 {
        *self
    }

    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }

    fn sinh(&self) -> Self {
        Complex64::sinh(*self)
    }

    fn cosh(&self) -> Self {
        Complex64::cosh(*self)
    }

    fn scale(&self, c: Complex64) -> Self {
        self * c
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        let q = self / rhs;
        if q.re.is_finite() && q.im.is_finite() {
            Ok(q)
        } else {
            Err(Error::Singular(format!("division by {rhs}")))
        }
    }
}

/// Absolute tolerance on a sinh factor (or product of them) before it is
/// treated as a pole.
pub const POLE_TOL: f64 = 1e-12;

pub(crate) fn guard<S: Scalar>(x: &S, what: &str) -> Result<()> {
    if x.value().norm() < POLE_TOL {
        Err(Error::Singular(what.to_string()))
    } else {
        Ok(())
    }
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

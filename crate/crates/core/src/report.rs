//! JSON result records and content digests of their inputs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{ChainParams, ComplexRecord};

fn push_complex(buf: &mut Vec<u8>, z: Complex64) {
    buf.extend_from_slice(&z.re.to_bits().to_le_bytes());
    buf.extend_from_slice(&z.im.to_bits().to_le_bytes());
}

/// SHA-256 over the bit patterns of `N`, `η` and the inhomogeneities.
pub fn params_digest(p: &ChainParams) -> String {
    let mut buf = Vec::new();
    buf.extend_from_slice(&(p.n_sites as u64).to_le_bytes());
    push_complex(&mut buf, p.eta);
    for &t in &p.thetas {
        push_complex(&mut buf, t);
    }
    hex::encode(Sha256::digest(&buf))
}

/// SHA-256 over the bit patterns of a root list, in the given order.
pub fn roots_digest(roots: &[Complex64]) -> String {
    let mut buf = Vec::new();
    buf.extend_from_slice(&(roots.len() as u64).to_le_bytes());
    for &r in roots {
        push_complex(&mut buf, r);
    }
    hex::encode(Sha256::digest(&buf))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub kind: String,
    pub site: Option<usize>,
    pub value: ComplexRecord,
    pub params_digest: String,
    pub left_digest: String,
    pub right_digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_estimate: Option<f64>,
}

impl ResultRecord {
    pub fn new(
        kind: &str,
        site: Option<usize>,
        value: Complex64,
        p: &ChainParams,
        left: &[Complex64],
        right: &[Complex64],
    ) -> Self {
        Self {
            kind: kind.to_string(),
            site,
            value: value.into(),
            params_digest: params_digest(p),
            left_digest: roots_digest(left),
            right_digest: roots_digest(right),
            method: None,
            error_estimate: None,
        }
    }

    pub fn with_method(mut self, method: &str, error_estimate: Option<f64>) -> Self {
        self.method = Some(method.to_string());
        self.error_estimate = error_estimate;
        self
    }
}

/// Fixed 15-significant-digit lowercase scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.14e}")
}

/// `re±imi` with both parts in [`fmt_real`] notation.
pub fn fmt_complex(z: Complex64) -> String {
    format!("{:.14e}{:+.14e}i", z.re, z.im)
}

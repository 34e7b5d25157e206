//! Brute-force construction of every operator and state in the full
//! `2^N`-dimensional Hilbert space.
//!
//! Basis index 0 is spin up; site 1 is the leftmost tensor factor, i.e. the
//! most significant bit of a basis index. Left states are covectors and all
//! pairings are bilinear (no complex conjugation).

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{a_func, energy, lambda_tq, phi_product, sov_norm_f, ChainParams, SovLabel};
use crate::numeric::{c64, kron, CMatrix, CVector};

pub const MAX_SITES: usize = 12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn check_cap(n: usize) -> Result<()> {
    if n > MAX_SITES {
        Err(Error::OracleCap { n, max: MAX_SITES })
    } else if n == 0 {
        Err(Error::InvalidParams(
            "the chain needs at least one site".into(),
        ))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
    /// σ⁺ = [[0,1],[0,0]]
    Plus,
    /// σ⁻ = [[0,0],[1,0]]
    Minus,
}

impl Pauli {
    pub fn matrix(self) -> CMatrix {
        let i = c64(0.0, 1.0);
        let e = match self {
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -i, i, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
            Pauli::Plus => [ZERO, ONE, ZERO, ZERO],
            Pauli::Minus => [ZERO, ZERO, ONE, ZERO],
        };
        CMatrix::from_rows(2, 2, e.to_vec()).expect("2x2")
    }
}

fn bit_shift(site: usize, n: usize) -> usize {
    n - site
}

/// `(I⊗…⊗op⊗…⊗I)·m` with `op` (2×2) on `site` (1-based), without forming the
/// embedded matrix.
pub fn apply_local(op: &CMatrix, site: usize, n: usize, m: &CMatrix) -> CMatrix {
    let sh = bit_shift(site, n);
    let cols = m.cols();
    let mut out = CMatrix::zeros(m.rows(), cols);
    for r in 0..m.rows() {
        let br = (r >> sh) & 1;
        for b in 0..2 {
            let w = op[(br, b)];
            if w == ZERO {
                continue;
            }
            let src = (r & !(1 << sh)) | (b << sh);
            for c in 0..cols {
                out[(r, c)] += w * m[(src, c)];
            }
        }
    }
    out
}

pub fn apply_local_vec(op: &CMatrix, site: usize, n: usize, v: &CVector) -> CVector {
    let sh = bit_shift(site, n);
    let mut out = CVector::zeros(v.dim());
    for r in 0..v.dim() {
        let br = (r >> sh) & 1;
        for b in 0..2 {
            let src = (r & !(1 << sh)) | (b << sh);
            out[r] += op[(br, b)] * v[src];
        }
    }
    out
}

/// Dense embedding of a single-site operator.
pub fn embed(op: &CMatrix, site: usize, n: usize) -> CMatrix {
    apply_local(op, site, n, &CMatrix::identity(1 << n))
}

pub fn vacuum(n: usize) -> CVector {
    CVector::basis(1 << n, 0)
}

/// The six-vertex R-matrix in the basis ↑↑, ↑↓, ↓↑, ↓↓.
pub fn r_matrix(u: Complex64, eta: Complex64) -> CMatrix {
    let s = eta.sinh();
    let b = (u + eta).sinh() / s;
    let c = u.sinh() / s;
    CMatrix::from_rows(
        4,
        4,
        vec![
            b, ZERO, ZERO, ZERO, //
            ZERO, c, ONE, ZERO, //
            ZERO, ONE, c, ZERO, //
            ZERO, ZERO, ZERO, b,
        ],
    )
    .expect("4x4")
}

/// Blocks of the monodromy matrix: auxiliary entry (1,1) is C, (1,2) is D,
/// (2,1) is A and (2,2) is B.
#[derive(Debug, Clone)]
pub struct MonodromyBlocks {
    pub a: CMatrix,
    pub b: CMatrix,
    pub c: CMatrix,
    pub d: CMatrix,
}

impl MonodromyBlocks {
    pub fn transfer(&self) -> CMatrix {
        &self.b + &self.c
    }

    /// Auxiliary-space entry `(row, col)` with 0-based indices.
    pub fn entry(&self, row: usize, col: usize) -> &CMatrix {
        match (row, col) {
            (0, 0) => &self.c,
            (0, 1) => &self.d,
            (1, 0) => &self.a,
            _ => &self.b,
        }
    }

    pub fn block(&self, kind: Block) -> &CMatrix {
        match kind {
            Block::A => &self.a,
            Block::B => &self.b,
            Block::C => &self.c,
            Block::D => &self.d,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    C,
    D,
}

/// `T₀(u) = σ₀ˣ·R_{0N}(u−θ_N)⋯R_{01}(u−θ₁)`.
pub fn monodromy(p: &ChainParams, u: Complex64) -> Result<MonodromyBlocks> {
    let n = p.n_sites;
    check_cap(n)?;
    let dim = 1 << n;
    let s = p.eta.sinh();
    let (sp, sm) = (Pauli::Plus.matrix(), Pauli::Minus.matrix());
    // x[a][b] holds the auxiliary entries of R_{0j}⋯R_{01}.
    let mut x = [
        [CMatrix::identity(dim), CMatrix::zeros(dim, dim)],
        [CMatrix::zeros(dim, dim), CMatrix::identity(dim)],
    ];
    for j in 1..=n {
        let w = u - p.thetas[j - 1];
        let b = (w + p.eta).sinh() / s;
        let c = w.sinh() / s;
        let l00 = CMatrix::diag(&[b, c]);
        let l11 = CMatrix::diag(&[c, b]);
        let l = [[&l00, &sm], [&sp, &l11]];
        let next: [[CMatrix; 2]; 2] = std::array::from_fn(|a| {
            std::array::from_fn(|bcol| {
                let t0 = apply_local(l[a][0], j, n, &x[0][bcol]);
                let t1 = apply_local(l[a][1], j, n, &x[1][bcol]);
                &t0 + &t1
            })
        });
        x = next;
    }
    let [[x00, x01], [x10, x11]] = x;
    // σˣ in the auxiliary space swaps the two rows.
    Ok(MonodromyBlocks {
        c: x10,
        d: x11,
        a: x00,
        b: x01,
    })
}

pub fn transfer(p: &ChainParams, u: Complex64) -> Result<CMatrix> {
    Ok(monodromy(p, u)?.transfer())
}

/// `H = −Σ_j [σˣσˣ + σʸσʸ + cosh η σᶻσᶻ]` with `σ_{N+1}^α = σ₁ˣσ₁^ασ₁ˣ`.
pub fn hamiltonian(n: usize, eta: Complex64) -> Result<CMatrix> {
    if n < 2 {
        return Err(Error::InvalidParams(
            "the Hamiltonian needs at least two sites".into(),
        ));
    }
    check_cap(n)?;
    let dim = 1 << n;
    let x = Pauli::X.matrix();
    let mut h = CMatrix::zeros(dim, dim);
    for (alpha, w) in [(Pauli::X, ONE), (Pauli::Y, ONE), (Pauli::Z, eta.cosh())] {
        let s = alpha.matrix();
        let twisted = &(&x * &s) * &x;
        for j in 1..=n {
            let (next, op) = if j < n { (j + 1, &s) } else { (1, &twisted) };
            let term = apply_local(&s, j, n, &embed(op, next, n));
            h = &h - &term.scale(w);
        }
    }
    Ok(h)
}

/// `H` recovered as `−2 sinh η ∂ln t/∂u|_{u=0,θ=0} + N cosh η`, with the
/// derivative taken by a central difference of step `step`.
pub fn hamiltonian_from_transfer(n: usize, eta: Complex64, step: f64) -> Result<CMatrix> {
    let p = ChainParams::homogeneous(n, eta)?;
    let t0 = transfer(&p, ZERO)?;
    let tp = transfer(&p, c64(step, 0.0))?;
    let tm = transfer(&p, c64(-step, 0.0))?;
    let dt = (&tp - &tm).scale(c64(0.5 / step, 0.0));
    let log_der = t0.inverse()?.matmul(&dt)?;
    let id = CMatrix::identity(1 << n).scale(eta.cosh() * n as f64);
    Ok(&log_der.scale(-2.0 * eta.sinh()) + &id)
}

/// Monodromy blocks at each inhomogeneity, the raw material of the SoV basis.
pub struct SovBasis {
    p: ChainParams,
    at_theta: Vec<MonodromyBlocks>,
}

impl SovBasis {
    pub fn new(p: &ChainParams) -> Result<Self> {
        check_cap(p.n_sites)?;
        let at_theta = p
            .thetas
            .iter()
            .map(|&t| monodromy(p, t))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p: p.clone(),
            at_theta,
        })
    }

    pub fn blocks(&self, j: usize) -> &MonodromyBlocks {
        &self.at_theta[j - 1]
    }

    /// `Π_j B(θ_j)^{h_j}|0⟩` or `⟨0|Π_j C(θ_j)^{h_j}`.
    pub fn state(&self, h: &SovLabel, side: Side) -> Result<CVector> {
        let n = self.p.n_sites;
        if h.bits().len() != n {
            return Err(Error::Dimension(format!(
                "label of length {} for {n} sites",
                h.bits().len()
            )));
        }
        let mut v = vacuum(n);
        for (j, &hj) in h.bits().iter().enumerate() {
            if hj == 1 {
                v = match side {
                    Side::Right => self.at_theta[j].b.matvec(&v)?,
                    Side::Left => self.at_theta[j].c.vecmat(&v)?,
                };
            }
        }
        Ok(v)
    }
}

pub fn sov_state(p: &ChainParams, h: &SovLabel, side: Side) -> Result<CVector> {
    SovBasis::new(p)?.state(h, side)
}

/// `[l]_q = (1 − q^{2l})/(1 − q²)`, summed as `Σ_{m<l} q^{2m}`.
pub fn q_integer(l: usize, q: Complex64) -> Complex64 {
    let q2 = q * q;
    (0..l)
        .fold((ZERO, ONE), |(acc, pw), _| (acc + pw, pw * q2))
        .0
}

pub fn q_factorial(l: usize, q: Complex64) -> Complex64 {
    (1..=l).map(|k| q_integer(k, q)).product()
}

fn spin_z(idx: usize, site: usize, n: usize) -> f64 {
    if (idx >> bit_shift(site, n)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `B⁻ = e^{(N−1)η/2} Σ_l exp(η/2 Σ_{k>l} σᶻ_k)·σ⁻_l·exp(−η/2 Σ_{k<l} σᶻ_k)`.
pub fn b_minus(n: usize, eta: Complex64) -> Result<CMatrix> {
    ladder(n, eta, 1.0)
}

/// `C⁺ = e^{(N−1)η/2} Σ_l exp(−η/2 Σ_{k>l} σᶻ_k)·σ⁺_l·exp(η/2 Σ_{k<l} σᶻ_k)`.
pub fn c_plus(n: usize, eta: Complex64) -> Result<CMatrix> {
    ladder(n, eta, -1.0)
}

fn ladder(n: usize, eta: Complex64, sign: f64) -> Result<CMatrix> {
    check_cap(n)?;
    let dim = 1 << n;
    let pre = (eta * (n as f64 - 1.0) / 2.0).exp();
    let mut m = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        for l in 1..=n {
            let bit = (col >> bit_shift(l, n)) & 1;
            // B⁻ lowers an up spin, C⁺ raises a down spin.
            let from = if sign > 0.0 { 0 } else { 1 };
            if bit != from {
                continue;
            }
            let row = col ^ (1 << bit_shift(l, n));
            let right: f64 = (l + 1..=n).map(|k| spin_z(col, k, n)).sum();
            let left: f64 = (1..l).map(|k| spin_z(col, k, n)).sum();
            m[(row, col)] += pre * (eta / 2.0 * sign * (right - left)).exp();
        }
    }
    Ok(m)
}

/// Homogeneous reference state `Σ_{l=0}^{N} (B⁻)^l/[l]_q! |0⟩` (right) or
/// `Σ_{l=0}^{N} ⟨0|(C⁺)^l/[l]_q!` (left), with `q = e^η`.
pub fn homogeneous_reference_state(n: usize, eta: Complex64, side: Side) -> Result<CVector> {
    let q = eta.exp();
    let op = match side {
        Side::Right => b_minus(n, eta)?,
        Side::Left => c_plus(n, eta)?,
    };
    let mut w = vacuum(n);
    let mut out = CVector::zeros(1 << n);
    for l in 0..=n {
        out.axpy(1.0 / q_factorial(l, q), &w);
        w = match side {
            Side::Right => op.matvec(&w)?,
            Side::Left => op.vecmat(&w)?,
        };
    }
    Ok(out)
}

/// `Σ_h f^{-1}(h)·Π_l[a(θ_l)e^{θ_l}]^{h_l}·|h⟩` (and the left analogue with ⟨h|).
pub fn inhomogeneous_reference_state(p: &ChainParams, side: Side) -> Result<CVector> {
    p.check_nondegenerate()?;
    let basis = SovBasis::new(p)?;
    let coef: Vec<Complex64> = p.thetas.iter().map(|t| a_func(p, t) * t.exp()).collect();
    let mut out = CVector::zeros(1 << p.n_sites);
    for h in SovLabel::all(p.n_sites) {
        let w: Complex64 = h
            .bits()
            .iter()
            .zip(&coef)
            .filter(|(&b, _)| b == 1)
            .map(|(_, c)| c)
            .product();
        let f = sov_norm_f(p, &h)?;
        out.axpy(w / f, &basis.state(&h, side)?);
    }
    Ok(out)
}

/// Reference state; the q-integer construction is used when every `θ_j = 0`.
pub fn reference_state(p: &ChainParams, side: Side) -> Result<CVector> {
    if p.is_homogeneous() {
        homogeneous_reference_state(p.n_sites, p.eta, side)
    } else {
        inhomogeneous_reference_state(p, side)
    }
}

/// `Π_j D(λ_j)` applied to a given reference state.
pub fn bethe_state_from(
    p: &ChainParams,
    roots: &[Complex64],
    side: Side,
    omega: &CVector,
) -> Result<CVector> {
    let mut v = omega.clone();
    for &l in roots {
        let d = monodromy(p, l)?.d;
        v = match side {
            Side::Right => d.matvec(&v)?,
            Side::Left => d.vecmat(&v)?,
        };
    }
    Ok(v)
}

pub fn bethe_state(p: &ChainParams, roots: &[Complex64], side: Side) -> Result<CVector> {
    bethe_state_from(p, roots, side, &reference_state(p, side)?)
}

/// One factor of an operator product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpFactor {
    Local(Pauli, usize),
    Monodromy(Block, Complex64),
    Transfer(Complex64),
}

/// Chain with both reference states built once, for repeated matrix elements.
pub struct ChainOracle {
    pub params: ChainParams,
    pub omega_right: CVector,
    pub omega_left: CVector,
}

impl ChainOracle {
    pub fn new(p: &ChainParams) -> Result<Self> {
        Ok(Self {
            params: p.clone(),
            omega_right: reference_state(p, Side::Right)?,
            omega_left: reference_state(p, Side::Left)?,
        })
    }

    pub fn bethe(&self, roots: &[Complex64], side: Side) -> Result<CVector> {
        let omega = match side {
            Side::Right => &self.omega_right,
            Side::Left => &self.omega_left,
        };
        bethe_state_from(&self.params, roots, side, omega)
    }

    /// `op` applied to a right vector; `ops[0]` is the leftmost factor.
    pub fn apply(&self, ops: &[OpFactor], v: &CVector) -> Result<CVector> {
        let n = self.params.n_sites;
        let mut v = v.clone();
        for f in ops.iter().rev() {
            v = match *f {
                OpFactor::Local(pauli, site) => {
                    if site == 0 || site > n {
                        return Err(Error::InvalidParams(format!("site {site} outside 1..={n}")));
                    }
                    apply_local_vec(&pauli.matrix(), site, n, &v)
                }
                OpFactor::Monodromy(block, u) => {
                    monodromy(&self.params, u)?.block(block).matvec(&v)?
                }
                OpFactor::Transfer(u) => transfer(&self.params, u)?.matvec(&v)?,
            };
        }
        Ok(v)
    }

    /// `⟨left| op |right⟩` between explicit vectors.
    pub fn sandwich(&self, left: &CVector, ops: &[OpFactor], right: &CVector) -> Result<Complex64> {
        Ok(left.dot(&self.apply(ops, right)?))
    }

    /// `⟨Φ{u}| op |Φ{λ}⟩`.
    pub fn expectation(
        &self,
        uroots: &[Complex64],
        lroots: &[Complex64],
        ops: &[OpFactor],
    ) -> Result<Complex64> {
        let l = self.bethe(uroots, Side::Left)?;
        let r = self.bethe(lroots, Side::Right)?;
        self.sandwich(&l, ops, &r)
    }
}

pub fn direct_expectation(
    p: &ChainParams,
    uroots: &[Complex64],
    lroots: &[Complex64],
    ops: &[OpFactor],
) -> Result<Complex64> {
    ChainOracle::new(p)?.expectation(uroots, lroots, ops)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReconstructionReport {
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub sigma_z: f64,
    /// `Π_j t(θ_j)` against `Π φ_{ij}·σ₁ˣ⋯σ_Nˣ`.
    pub t_product: f64,
    /// `Π_j t(θ_j)·Π_k t(θ_k)` against `Π φ²_{ij}·id`.
    pub t_identity: f64,
}

impl ReconstructionReport {
    pub fn max(&self) -> f64 {
        [
            self.sigma_minus,
            self.sigma_plus,
            self.sigma_z,
            self.t_product,
            self.t_identity,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn product(ms: &[&CMatrix], dim: usize) -> Result<CMatrix> {
    ms.iter()
        .try_fold(CMatrix::identity(dim), |acc, m| acc.matmul(m))
}

/// Rebuilds `σ_i^−`, `σ_i^+` and `σ_i^z` from monodromy entries at the
/// inhomogeneities and reports max-norm deviations from the embedded operators.
pub fn local_op_reconstruction_check(p: &ChainParams, i: usize) -> Result<ReconstructionReport> {
    let n = p.n_sites;
    check_cap(n)?;
    if i == 0 || i > n {
        return Err(Error::InvalidParams(format!("site {i} outside 1..={n}")));
    }
    let dim = 1 << n;
    let blocks: Vec<MonodromyBlocks> = p
        .thetas
        .iter()
        .map(|&t| monodromy(p, t))
        .collect::<Result<_>>()?;
    let ts: Vec<CMatrix> = blocks.iter().map(|b| b.transfer()).collect();
    for (j, t) in ts.iter().enumerate() {
        if t.determinant()?.norm() < 1e-300 {
            return Err(Error::Singular(format!(
                "t(theta_{}) is not invertible",
                j + 1
            )));
        }
    }
    let phi = phi_product(p)?;
    let all_t = product(&ts.iter().collect::<Vec<_>>(), dim)?;

    let xs = (1..=n).fold(CMatrix::identity(dim), |acc, j| {
        apply_local(&Pauli::X.matrix(), j, n, &acc)
    });
    let t_product = all_t.max_abs_diff(&xs.scale(phi))?;
    let t_identity = all_t
        .matmul(&all_t)?
        .max_abs_diff(&CMatrix::identity(dim).scale(phi * phi))?;

    let before: Vec<&CMatrix> = ts[..i - 1].iter().collect();
    let after: Vec<&CMatrix> = ts[i..].iter().collect();
    let pre = product(&before, dim)?;
    let post = product(&after, dim)?.matmul(&all_t)?;
    let norm = 1.0 / (phi * phi);
    let rebuild =
        |mid: &CMatrix| -> Result<CMatrix> { Ok(pre.matmul(mid)?.matmul(&post)?.scale(norm)) };

    let bi = &blocks[i - 1];
    let z_mid = &bi.c.scale(c64(2.0, 0.0)) - &ts[i - 1];
    Ok(ReconstructionReport {
        sigma_minus: rebuild(&bi.d)?.max_abs_diff(&embed(&Pauli::Minus.matrix(), i, n))?,
        sigma_plus: rebuild(&bi.a)?.max_abs_diff(&embed(&Pauli::Plus.matrix(), i, n))?,
        sigma_z: rebuild(&z_mid)?.max_abs_diff(&embed(&Pauli::Z.matrix(), i, n))?,
        t_product,
        t_identity,
    })
}

/// `‖R₁₂(u₁−u₂)R₁₃(u₁−u₃)R₂₃(u₂−u₃) − R₂₃R₁₃R₁₂‖_max`.
pub fn yang_baxter_residual(u1: Complex64, u2: Complex64, u3: Complex64, eta: Complex64) -> f64 {
    let i2 = CMatrix::identity(2);
    let perm = r_matrix(ZERO, eta);
    let p23 = kron(&i2, &perm);
    let r12 = kron(&r_matrix(u1 - u2, eta), &i2);
    let r13 = &(&p23 * &kron(&r_matrix(u1 - u3, eta), &i2)) * &p23;
    let r23 = kron(&i2, &r_matrix(u2 - u3, eta));
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    lhs.max_abs_diff(&rhs).expect("same shape")
}

/// `‖R₀₀̄(u−v)T₀(u)T₀̄(v) − T₀̄(v)T₀(u)R₀₀̄(u−v)‖_max`.
pub fn rtt_residual(p: &ChainParams, u: Complex64, v: Complex64) -> Result<f64> {
    let tu = monodromy(p, u)?;
    let tv = monodromy(p, v)?;
    let r = r_matrix(u - v, p.eta);
    let mut worst: f64 = 0.0;
    for a in 0..2 {
        for ap in 0..2 {
            for b in 0..2 {
                for bp in 0..2 {
                    let dim = tu.a.rows();
                    let mut lhs = CMatrix::zeros(dim, dim);
                    let mut rhs = CMatrix::zeros(dim, dim);
                    for c in 0..2 {
                        for cp in 0..2 {
                            let rl = r[(2 * a + ap, 2 * c + cp)];
                            if rl != ZERO {
                                lhs = &lhs + &tu.entry(c, b).matmul(tv.entry(cp, bp))?.scale(rl);
                            }
                            let rr = r[(2 * c + cp, 2 * b + bp)];
                            if rr != ZERO {
                                rhs = &rhs + &tv.entry(ap, cp).matmul(tu.entry(a, c))?.scale(rr);
                            }
                        }
                    }
                    worst = worst.max(lhs.max_abs_diff(&rhs)?);
                }
            }
        }
    }
    Ok(worst)
}

/// `‖[t(u), t(v)]‖_max`.
pub fn commutator_residual(p: &ChainParams, u: Complex64, v: Complex64) -> Result<f64> {
    let tu = transfer(p, u)?;
    let tv = transfer(p, v)?;
    tu.matmul(&tv)?.max_abs_diff(&tv.matmul(&tu)?)
}

/// Eigenvalues of a square matrix through a complex Schur decomposition.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::Dimension(
            "eigenvalues of a non-square matrix".into(),
        ));
    }
    let n = m.rows();
    let dm = DMatrix::from_row_slice(n, n, m.as_slice());
    let ev = dm
        .schur()
        .eigenvalues()
        .ok_or_else(|| Error::Singular("Schur decomposition did not converge".into()))?;
    Ok(ev.iter().copied().collect())
}

/// Spectral points and weights of the probe combination used to tell
/// transfer-matrix eigenvalue functions apart.
pub const PROBES: [(Complex64, Complex64); 3] = [
    (Complex64::new(0.31, 0.1), Complex64::new(1.0, 0.0)),
    (Complex64::new(-0.52, 0.2), Complex64::new(0.37, 0.0)),
    (Complex64::new(0.13, -0.4), Complex64::new(0.0, 0.71)),
];

/// Eigenvalues of `Σ_k w_k t(p_k)`. Since the transfer matrices commute, each
/// eigenvalue function `Λ` shows up as `Σ_k w_k Λ(p_k)`.
pub fn probe_spectrum(p: &ChainParams) -> Result<Vec<Complex64>> {
    let dim = 1 << p.n_sites;
    let mut m = CMatrix::zeros(dim, dim);
    for (pt, w) in PROBES {
        m = &m + &transfer(p, pt)?.scale(w);
    }
    eigenvalues(&m)
}

/// Spectral certificate of a root set: the largest, over the probe points, of
/// the distance from `Λ(p_k)` to the nearest eigenvalue of `t(p_k)`.
pub fn transfer_spectrum_distance(p: &ChainParams, roots: &[Complex64]) -> Result<f64> {
    check_cap(p.n_sites)?;
    let mut worst: f64 = 0.0;
    for (pt, _) in PROBES {
        let lam = lambda_tq(p, roots, &pt)?;
        let nearest = eigenvalues(&transfer(p, pt)?)?
            .into_iter()
            .map(|e| (e - lam).norm())
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst)
}

/// Distance from the energy of a root set to the nearest eigenvalue of `H`.
pub fn energy_spectrum_distance(n: usize, eta: Complex64, roots: &[Complex64]) -> Result<f64> {
    let e = energy(roots, eta, n)?;
    Ok(eigenvalues(&hamiltonian(n, eta)?)?
        .into_iter()
        .map(|v| (v - e).norm())
        .fold(f64::INFINITY, f64::min))
}

/// Collapses values closer than `tol` into one representative each.
pub fn distinct(values: &[Complex64], tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::new();
    for &v in values {
        if !out.iter().any(|d| (d - v).norm() < tol) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::d_func;
    use crate::numeric::real;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p3() -> ChainParams {
        ChainParams::new(3, real(1.0), vec![real(0.1), real(-0.2), real(0.25)]).unwrap()
    }

    #[test]
    fn r_matrix_at_zero_is_permutation() {
        let r = r_matrix(ZERO, real(1.0));
        let mut perm = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            perm[(i, j)] = ONE;
        }
        assert!(r.max_abs_diff(&perm).unwrap() < 1e-15);
    }

    #[test]
    fn r_matrix_entries() {
        let r = r_matrix(real(0.5), real(1.0));
        assert!((r[(0, 0)] - real(1.5f64.sinh() / 1f64.sinh())).norm() < 1e-15);
        assert!((r[(1, 1)] - real(0.5f64.sinh() / 1f64.sinh())).norm() < 1e-15);
        assert_eq!(r[(1, 2)], ONE);
    }

    #[test]
    fn yang_baxter_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let mut u = || c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            assert!(yang_baxter_residual(u(), u(), u(), real(1.0)) <= 1e-12);
        }
    }

    #[test]
    fn quasi_vacuum_relations() {
        let p = p3();
        let u = c64(0.3, 0.2);
        let m = monodromy(&p, u).unwrap();
        let v = vacuum(3);
        let a = a_func(&p, &u);
        let d = d_func(&p, &u);
        assert!(m.a.matvec(&v).unwrap().max_abs_diff(&v.scale(a)) < 1e-12);
        assert!(m.d.matvec(&v).unwrap().max_abs_diff(&v.scale(d)) < 1e-12);
        assert!(m.c.matvec(&v).unwrap().max_abs() < 1e-12);
        assert!(m.a.vecmat(&v).unwrap().max_abs_diff(&v.scale(a)) < 1e-12);
        assert!(m.d.vecmat(&v).unwrap().max_abs_diff(&v.scale(d)) < 1e-12);
        assert!(m.b.vecmat(&v).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn monodromy_matches_kron_construction() {
        // Independent build with explicit 2^{N+1}-dimensional R_{0j}.
        let p = ChainParams::new(2, real(0.7), vec![c64(0.1, 0.05), real(-0.3)]).unwrap();
        let u = c64(0.2, -0.1);
        let n = 2;
        let dim = 1 << n;
        let r0j = |j: usize| -> CMatrix {
            let r = r_matrix(u - p.thetas[j - 1], p.eta);
            let mut m = CMatrix::zeros(2 * dim, 2 * dim);
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            let v = r[(2 * a + c, 2 * b + d)];
                            let mut e = CMatrix::zeros(2, 2);
                            e[(c, d)] = ONE;
                            let emb = embed(&e, j, n);
                            for x in 0..dim {
                                for y in 0..dim {
                                    m[(a * dim + x, b * dim + y)] += v * emb[(x, y)];
                                }
                            }
                        }
                    }
                }
            }
            m
        };
        let t = &(&kron(&Pauli::X.matrix(), &CMatrix::identity(dim)) * &r0j(2)) * &r0j(1);
        let m = monodromy(&p, u).unwrap();
        let sub = |r0: usize, c0: usize| CMatrix::from_fn(dim, dim, |i, j| t[(r0 + i, c0 + j)]);
        assert!(sub(0, 0).max_abs_diff(&m.c).unwrap() < 1e-14);
        assert!(sub(0, dim).max_abs_diff(&m.d).unwrap() < 1e-14);
        assert!(sub(dim, 0).max_abs_diff(&m.a).unwrap() < 1e-14);
        assert!(sub(dim, dim).max_abs_diff(&m.b).unwrap() < 1e-14);
    }

    #[test]
    fn rtt_and_commuting_transfer() {
        let p = p3();
        assert!(rtt_residual(&p, c64(0.3, 0.1), c64(-0.2, 0.4)).unwrap() <= 1e-10);
        assert!(commutator_residual(&p, c64(0.3, 0.1), c64(-0.2, 0.4)).unwrap() <= 1e-10);
    }

    #[test]
    fn hamiltonian_is_hermitian_and_matches_log_derivative() {
        for n in [2, 3] {
            let h = hamiltonian(n, real(1.0)).unwrap();
            let hd = CMatrix::from_fn(h.rows(), h.cols(), |i, j| h[(j, i)].conj());
            assert_eq!(h.max_abs_diff(&hd).unwrap(), 0.0);
            let hl = hamiltonian_from_transfer(n, real(1.0), 1e-5).unwrap();
            assert!(h.max_abs_diff(&hl).unwrap() <= 1e-6);
        }
        assert!(hamiltonian(1, real(1.0)).is_err());
    }

    #[test]
    fn hamiltonian_at_eta_zero_by_hand() {
        // With cosh η = 1 at η = 0; the twisted bond flips σʸ and σᶻ on site 1.
        let h = hamiltonian(2, c64(1e-30, 0.0)).unwrap();
        let (x, y, z) = (Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix());
        let bond = &(&kron(&x, &x) + &kron(&y, &y)) + &kron(&z, &z);
        let twisted = &(&kron(&x, &x) - &kron(&y, &y)) - &kron(&z, &z);
        // Bond 2→1 acts as σ₂σ₁ = σ₁σ₂ for commuting sites.
        let want = (&bond + &twisted).scale(-ONE);
        assert!(h.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn sov_states_diagonalise_d() {
        let p = p3();
        let basis = SovBasis::new(&p).unwrap();
        let u = c64(0.37, -0.11);
        let d = monodromy(&p, u).unwrap().d;
        for h in SovLabel::all(3) {
            let v = basis.state(&h, Side::Right).unwrap();
            let ev: Complex64 = h
                .bits()
                .iter()
                .zip(&p.thetas)
                .map(|(&hj, t)| (u - t + p.eta * hj as f64).sinh() / p.eta.sinh())
                .product();
            assert!(
                d.matvec(&v).unwrap().max_abs_diff(&v.scale(ev)) <= 1e-10 * v.max_abs().max(1.0)
            );
        }
        assert_eq!(
            basis.state(&SovLabel(vec![0, 0, 0]), Side::Right).unwrap(),
            vacuum(3)
        );
    }

    #[test]
    fn sov_basis_is_biorthogonal_with_norm_f() {
        let p = p3();
        let basis = SovBasis::new(&p).unwrap();
        let labels: Vec<_> = SovLabel::all(3).collect();
        for h in &labels {
            let l = basis.state(h, Side::Left).unwrap();
            for hp in &labels {
                let r = basis.state(hp, Side::Right).unwrap();
                let s = l.dot(&r);
                if h == hp {
                    let f = sov_norm_f(&p, h).unwrap();
                    assert!((s - f).norm() <= 1e-10 * f.norm(), "{h:?}: {s} vs {f}");
                } else {
                    assert!(s.norm() <= 1e-10, "{h:?} {hp:?}: {s}");
                }
            }
        }
    }

    #[test]
    fn q_integers() {
        let q = real(1.0).exp();
        assert_eq!(q_factorial(1, q), ONE);
        assert!((q_integer(2, q) - (ONE + q * q)).norm() < 1e-14);
        let l = 3;
        let closed = (ONE - q.powu(2 * l as u32)) / (ONE - q * q);
        assert!((q_integer(l, q) - closed).norm() < 1e-12 * closed.norm());
    }

    #[test]
    fn reference_overlaps_with_sov_states() {
        let p = p3();
        let basis = SovBasis::new(&p).unwrap();
        let omega = reference_state(&p, Side::Right).unwrap();
        for h in SovLabel::all(3) {
            let got = basis.state(&h, Side::Left).unwrap().dot(&omega);
            let want: Complex64 = h
                .bits()
                .iter()
                .zip(&p.thetas)
                .filter(|(&b, _)| b == 1)
                .map(|(_, t)| a_func(&p, t) * t.exp())
                .product();
            assert!(
                (got - want).norm() <= 1e-10 * want.norm().max(1.0),
                "{h:?}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn inhomogeneous_reference_approaches_homogeneous() {
        for side in [Side::Right, Side::Left] {
            let pe = ChainParams::epsilon_path(3, real(1.0), 1e-4).unwrap();
            let inh = inhomogeneous_reference_state(&pe, side).unwrap();
            let hom = homogeneous_reference_state(3, real(1.0), side).unwrap();
            assert!(inh.max_abs_diff(&hom) / hom.max_abs() <= 1e-3);
        }
    }

    #[test]
    fn bethe_states_are_eigenstates() {
        let p = ChainParams::new(3, real(1.0), vec![real(0.1), real(-0.2), real(0.25)]).unwrap();
        let rep = crate::bae::solve_bae(&p, &Default::default()).unwrap();
        assert!(!rep.solutions.is_empty());
        let oracle = ChainOracle::new(&p).unwrap();
        for rs in &rep.solutions {
            let v = oracle.bethe(rs, Side::Right).unwrap();
            for u in [c64(0.3, 0.1), c64(-0.7, 0.2)] {
                let lam = lambda_tq(&p, rs, &u).unwrap();
                let tv = transfer(&p, u).unwrap().matvec(&v).unwrap();
                assert!(tv.max_abs_diff(&v.scale(lam)) <= 1e-8 * v.max_abs());
            }
        }
        let ph = ChainParams::homogeneous(3, real(1.0)).unwrap();
        let oh = ChainOracle::new(&ph).unwrap();
        let h = hamiltonian(3, real(1.0)).unwrap();
        let rep = crate::bae::solve_bae(&ph, &Default::default()).unwrap();
        for rs in &rep.solutions {
            let v = oh.bethe(rs, Side::Right).unwrap();
            let e = energy(rs, real(1.0), 3).unwrap();
            assert!(h.matvec(&v).unwrap().max_abs_diff(&v.scale(e)) <= 1e-8 * v.max_abs());
        }
    }

    #[test]
    fn reconstruction_of_local_operators() {
        let p = ChainParams::new(2, real(1.0), vec![c64(0.12, -0.05), c64(-0.21, 0.08)]).unwrap();
        for i in 1..=2 {
            assert!(local_op_reconstruction_check(&p, i).unwrap().max() <= 1e-9);
        }
        assert!(local_op_reconstruction_check(&p3(), 2).unwrap().max() <= 1e-8);
    }

    #[test]
    fn cap_is_enforced() {
        let p = ChainParams::homogeneous(13, real(1.0)).unwrap();
        assert!(matches!(
            monodromy(&p, ZERO),
            Err(Error::OracleCap { n: 13, .. })
        ));
    }

    #[test]
    fn eigenvalues_of_diagonal() {
        let m = CMatrix::diag(&[real(2.0), c64(0.0, 1.0)]);
        let mut ev = eigenvalues(&m).unwrap();
        ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((ev[0] - c64(0.0, 1.0)).norm() < 1e-14 && (ev[1] - real(2.0)).norm() < 1e-14);
    }
}

//! End-to-end reproduction of the reference tables for the homogeneous chain:
//! solve the Bethe equations, then evaluate each quantity both from the
//! explicit states and from the homogeneous determinant formula.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bae::{solve_bae, SolverConfig};
use crate::error::{Error, Result};
use crate::homolimit::{
    f_hom_d_matrix, f_hom_dd_matrix, f_hom_z_matrix, f_minus_minus_n, f_minus_n, homogeneous_cf_mm,
    homogeneous_ff_sminus, homogeneous_ff_sz, homogeneous_scalar_product, lambda_at_zero,
    p_hom_matrix, phi_n, xi_tilde,
};
use crate::model::{energy, ChainParams, RootSet};
use crate::oracle::{self, ChainOracle, OpFactor, Pauli};
use crate::report::fmt_complex;

/// Largest accepted `|definition − formula|`.
pub const TABLE_TOL: f64 = 1e-9;

/// Imaginary-part tolerance when recognising real and `iπ/2`-line root sets.
const LINE_TOL: f64 = 1e-8;

pub const CSV_HEADER: &str = "quantity,definition,formula,abs_diff";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub quantity: String,
    /// Value from the explicit states, when the row has one.
    pub definition: Option<Complex64>,
    /// Value from the closed formula.
    pub formula: Complex64,
}

impl TableRow {
    fn intermediate(quantity: &str, formula: Complex64) -> Self {
        Self {
            quantity: quantity.to_string(),
            definition: None,
            formula,
        }
    }

    fn compared(quantity: &str, definition: Complex64, formula: Complex64) -> Self {
        Self {
            quantity: quantity.to_string(),
            definition: Some(definition),
            formula,
        }
    }

    pub fn abs_diff(&self) -> Option<f64> {
        self.definition.map(|d| (d - self.formula).norm())
    }

    pub fn csv_line(&self) -> String {
        let def = self.definition.map(fmt_complex).unwrap_or_default();
        let diff = self
            .abs_diff()
            .map(|d| format!("{d:.14e}"))
            .unwrap_or_default();
        format!(
            "{},{},{},{}",
            self.quantity,
            def,
            fmt_complex(self.formula),
            diff
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub number: u8,
    pub rows: Vec<TableRow>,
}

impl Table {
    pub fn passed(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.abs_diff().is_none_or(|d| d <= TABLE_TOL))
    }

    pub fn row(&self, quantity: &str) -> Option<&TableRow> {
        self.rows.iter().find(|r| r.quantity == quantity)
    }

    /// Header line followed by one line per row.
    pub fn csv(&self) -> String {
        let mut s = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            s.push_str(&r.csv_line());
            s.push('\n');
        }
        s
    }
}

/// The two root sets the tables are built on.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRoots {
    pub params: ChainParams,
    /// Roots on the line `Im = π/2`.
    pub u: RootSet,
    /// Real roots.
    pub lambda: RootSet,
}

fn on_line(rs: &RootSet, im: f64) -> bool {
    rs.iter().all(|z| (z.im - im).abs() < LINE_TOL)
}

/// Solves the homogeneous equations and picks the real and `iπ/2`-line sets.
pub fn table_roots(n: usize, eta: Complex64, cfg: &SolverConfig) -> Result<TableRoots> {
    let params = ChainParams::homogeneous(n, eta)?;
    let sols = solve_bae(&params, cfg)?.solutions;
    let pick = |im: f64, what: &str| -> Result<RootSet> {
        let found: Vec<&RootSet> = sols.iter().filter(|rs| on_line(rs, im)).collect();
        match found.as_slice() {
            [one] => Ok((*one).clone()),
            [] => Err(Error::InvalidParams(format!(
                "no {what} root set among {} solutions",
                sols.len()
            ))),
            _ => Err(Error::InvalidParams(format!(
                "{} {what} root sets, expected one",
                found.len()
            ))),
        }
    };
    Ok(TableRoots {
        u: pick(std::f64::consts::FRAC_PI_2, "i*pi/2-line")?,
        lambda: pick(0.0, "real")?,
        params,
    })
}

fn table1(r: &TableRoots) -> Result<Table> {
    let n = r.params.n_sites;
    let h = oracle::hamiltonian(n, r.params.eta)?;
    let spectrum = oracle::eigenvalues(&h)?;
    let mut rows = Vec::new();
    for (name, rs) in [("u", &r.u), ("lambda", &r.lambda)] {
        for (k, z) in rs.iter().enumerate() {
            rows.push(TableRow::intermediate(&format!("{name}_{}", k + 1), *z));
        }
        let e = energy(rs, r.params.eta, n)?;
        let nearest = spectrum
            .iter()
            .copied()
            .min_by(|a, b| (a - e).norm().total_cmp(&(b - e).norm()))
            .ok_or_else(|| Error::Singular("empty spectrum".into()))?;
        rows.push(TableRow::compared(&format!("energy({name})"), nearest, e));
    }
    Ok(Table { number: 1, rows })
}

fn table2(r: &TableRoots, o: &ChainOracle) -> Result<Table> {
    let (l, eta, n) = (&r.lambda[..], r.params.eta, r.params.n_sites);
    let z = Complex64::new(0.0, 0.0);
    Ok(Table {
        number: 2,
        rows: vec![
            TableRow::intermediate("phi_1(0)", phi_n(l, l, eta, 1, &z)?),
            TableRow::intermediate("|P^hom|", p_hom_matrix(l, l, eta)?.determinant()?),
            TableRow::compared(
                "<lambda|lambda>",
                o.expectation(l, l, &[])?,
                homogeneous_scalar_product(l, l, eta, n)?,
            ),
        ],
    })
}

fn table3(r: &TableRoots, o: &ChainOracle) -> Result<Table> {
    let (u, l, eta) = (&r.u[..], &r.lambda[..], r.params.eta);
    let z = Complex64::new(0.0, 0.0);
    Ok(Table {
        number: 3,
        rows: vec![
            TableRow::intermediate("phi_1(0)", phi_n(u, l, eta, 1, &z)?),
            TableRow::intermediate("xi~(0)", xi_tilde(u, l, eta, &z)?),
            TableRow::intermediate("Lambda_u(0)", lambda_at_zero(u, eta)?),
            TableRow::intermediate("Lambda_lambda(0)", lambda_at_zero(l, eta)?),
            TableRow::intermediate("|F^hom_z|", f_hom_z_matrix(u, l, eta)?.determinant()?),
            TableRow::compared(
                "<u|sz_1|lambda>",
                o.expectation(u, l, &[OpFactor::Local(Pauli::Z, 1)])?,
                homogeneous_ff_sz(u, l, eta, 1)?,
            ),
        ],
    })
}

fn table4(r: &TableRoots, o: &ChainOracle) -> Result<Table> {
    let (u, l, eta) = (&r.u[..], &r.lambda[..], r.params.eta);
    let z = Complex64::new(0.0, 0.0);
    Ok(Table {
        number: 4,
        rows: vec![
            TableRow::intermediate("f-_1(0)", f_minus_n(u, l, eta, 1, &z)?),
            TableRow::intermediate("|F^hom_D|", f_hom_d_matrix(u, l, eta)?.determinant()?),
            TableRow::compared(
                "<u|s-_1|lambda>",
                o.expectation(u, l, &[OpFactor::Local(Pauli::Minus, 1)])?,
                homogeneous_ff_sminus(u, l, eta, 1)?,
            ),
        ],
    })
}

fn table5(r: &TableRoots, o: &ChainOracle) -> Result<Table> {
    let (l, eta) = (&r.lambda[..], r.params.eta);
    let z = Complex64::new(0.0, 0.0);
    let ops = [
        OpFactor::Local(Pauli::Minus, 1),
        OpFactor::Local(Pauli::Minus, 2),
    ];
    Ok(Table {
        number: 5,
        rows: vec![
            TableRow::intermediate("f--_1(0)", f_minus_minus_n(l, l, eta, 1, &z)?),
            TableRow::intermediate("|F^hom_DD|", f_hom_dd_matrix(l, l, eta)?.determinant()?),
            TableRow::compared(
                "<lambda|s-_1 s-_2|lambda>",
                o.expectation(l, l, &ops)?,
                homogeneous_cf_mm(l, l, eta, 2)?,
            ),
        ],
    })
}

/// Builds the requested tables (`1..=5`) from freshly solved roots.
pub fn build_tables(
    which: &[u8],
    n: usize,
    eta: Complex64,
    cfg: &SolverConfig,
) -> Result<Vec<Table>> {
    if let Some(bad) = which.iter().find(|w| !(1..=5).contains(*w)) {
        return Err(Error::InvalidParams(format!("no table {bad}")));
    }
    let roots = table_roots(n, eta, cfg)?;
    let oracle = ChainOracle::new(&roots.params)?;
    which
        .iter()
        .map(|&w| match w {
            1 => table1(&roots),
            2 => table2(&roots, &oracle),
            3 => table3(&roots, &oracle),
            4 => table4(&roots, &oracle),
            _ => table5(&roots, &oracle),
        })
        .collect()
}

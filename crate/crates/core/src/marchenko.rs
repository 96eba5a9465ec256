//! Discretized Marchenko equation
//!
//! ```text
//! F(x, y) + L(x, y) + ∫ₓ^∞ L(x, t) F(t, y) dt = 0,     V(r) = -2 d L(r, r) / dr
//! ```
//!
//! with both kernels expanded in triangular (hat) functions `Δ_n` centred on
//! `r_n = n·h`. Collocating at `x = p·h` gives, for every p, the dense system
//!
//! ```text
//! Σ_m (δ_jm + Σ_n ζ(n, m, p) F_nj) P_pm = -F_pj,      j = 0 … N
//! ```
//!
//! where `ζ(n, m, p) = ∫_{ph}^∞ Δ_m Δ_n dt` and `P_pk = P_k(ph)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernelgen::{KernelCoefficients, KernelGrid};
use crate::potential::PotentialGrid;
use crate::units::Kinematics;

/// Overlap `∫_{ph}^∞ Δ_m(t) Δ_n(t) dt` of two hat functions of width `2h`.
pub fn zeta(n: usize, m: usize, p: usize, h: f64) -> f64 {
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let kd = |a: usize, b: usize| ind(a == b);
    h / 6.0
        * (2.0 * kd(n, m) * (kd(n, p) + 2.0 * ind(n > p))
            + ind(n + 1 == m) * ind(n >= p)
            + ind(m + 1 == n) * ind(m >= p))
}

/// `F_nj = F₀,ₙ₊ⱼ` for `n, j = 0 … N`.
pub fn build_f_matrix(coeffs: &KernelCoefficients) -> DMatrix<Complex64> {
    let n = coeffs.grid().n();
    DMatrix::from_fn(n + 1, n + 1, |i, j| coeffs.get((i + j) as i64))
}

/// `A_jm = δ_jm + Σ_n ζ(n, m, p) F_nj`; ζ vanishes unless |n - m| ≤ 1.
pub fn system_matrix(f: &DMatrix<Complex64>, h: f64, p: usize) -> DMatrix<Complex64> {
    let size = f.nrows();
    DMatrix::from_fn(size, size, |j, m| {
        let lo = m.saturating_sub(1);
        let hi = (m + 1).min(size - 1);
        let overlap: Complex64 = (lo..=hi).map(|n| zeta(n, m, p, h) * f[(n, j)]).sum();
        if j == m {
            overlap + 1.0
        } else {
            overlap
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    /// Largest accepted 1-norm condition number of any per-point system.
    pub max_condition: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            max_condition: 1e10,
        }
    }
}

/// Values `P_pk = P_k(p·h)` of the translation kernel `L(x, y) = Σ_k P_k(x) Δ_k(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    grid: KernelGrid,
    values: DMatrix<Complex64>,
    conditions: Vec<f64>,
}

impl TranslationTable {
    pub fn from_values(grid: KernelGrid, values: DMatrix<Complex64>) -> Result<Self> {
        let size = grid.n() + 1;
        if values.nrows() != size || values.ncols() != size {
            return Err(Error::input("translation table shape does not match grid"));
        }
        Ok(Self {
            grid,
            values,
            conditions: vec![1.0; size],
        })
    }

    pub fn grid(&self) -> KernelGrid {
        self.grid
    }

    pub fn get(&self, p: usize, k: usize) -> Complex64 {
        self.values[(p, k)]
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut DMatrix<Complex64> {
        &mut self.values
    }

    /// `D_p = L(ph, ph)`.
    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..=self.grid.n()).map(|p| self.values[(p, p)]).collect()
    }

    /// 1-norm condition numbers of the per-point systems.
    pub fn conditions(&self) -> &[f64] {
        &self.conditions
    }

    pub fn max_condition(&self) -> f64 {
        self.conditions.iter().copied().fold(0.0, f64::max)
    }
}

fn one_norm(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn solve_point(
    f: &DMatrix<Complex64>,
    h: f64,
    p: usize,
    opts: &SolveOptions,
) -> Result<(Vec<Complex64>, f64)> {
    let a = system_matrix(f, h, p);
    let norm_a = one_norm(&a);
    let lu = a.lu();
    let inverse = lu.try_inverse().ok_or(Error::Inversion {
        p,
        condition: f64::INFINITY,
    })?;
    let condition = norm_a * one_norm(&inverse);
    if !(condition <= opts.max_condition) {
        return Err(Error::Inversion { p, condition });
    }
    let rhs = -f.row(p).transpose();
    let sol = lu.solve(&rhs).ok_or(Error::Inversion {
        p,
        condition: f64::INFINITY,
    })?;
    Ok((sol.iter().copied().collect(), condition))
}

/// Solves every per-point system by LU with partial pivoting.
pub fn solve_translation(
    f: &DMatrix<Complex64>,
    grid: &KernelGrid,
    opts: &SolveOptions,
) -> Result<TranslationTable> {
    let size = grid.n() + 1;
    if f.nrows() != size || f.ncols() != size {
        return Err(Error::input(format!(
            "F matrix is {}x{}, grid needs {size}x{size}",
            f.nrows(),
            f.ncols()
        )));
    }
    let rows: Vec<(Vec<Complex64>, f64)> = (0..size)
        .into_par_iter()
        .map(|p| solve_point(f, grid.h(), p, opts))
        .collect::<Result<_>>()?;
    let mut values = DMatrix::zeros(size, size);
    let mut conditions = Vec::with_capacity(size);
    for (p, (row, cond)) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            values[(p, k)] = v;
        }
        conditions.push(cond);
    }
    Ok(TranslationTable {
        grid: *grid,
        values,
        conditions,
    })
}

/// Finite-difference derivative of the diagonal on a uniform grid: central
/// second order inside, one-sided second order at both ends.
pub fn derivative(values: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = values.len() - 1;
    (0..=n)
        .map(|p| {
            if p == 0 {
                (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
            } else if p == n {
                (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * h)
            } else {
                (values[p + 1] - values[p - 1]) / (2.0 * h)
            }
        })
        .collect()
}

/// `V_p = -2 dD/dr` at every grid point, converted to MeV.
pub fn extract_potential(table: &TranslationTable, kin: &Kinematics) -> Result<PotentialGrid> {
    let grid = table.grid();
    if grid.n() < 2 {
        return Err(Error::domain(
            "need N >= 2 for the finite-difference stencils",
        ));
    }
    let v_fm2: Vec<Complex64> = derivative(&table.diagonal(), grid.h())
        .into_iter()
        .map(|d| -2.0 * d)
        .collect();
    PotentialGrid::from_fm2(grid.h(), &v_fm2, kin)
}

/// Max over `(x, y) = (ph, jh)` of `|F + L + ∫ₓ^∞ L F|` with the integral
/// evaluated exactly through ζ.
pub fn marchenko_residual(coeffs: &KernelCoefficients, table: &TranslationTable) -> f64 {
    residual_with_matrix(&build_f_matrix(coeffs), table)
}

pub fn residual_with_matrix(f: &DMatrix<Complex64>, table: &TranslationTable) -> f64 {
    let grid = table.grid();
    let size = grid.n() + 1;
    let h = grid.h();
    let mut worst: f64 = 0.0;
    for p in 0..size {
        for j in 0..size {
            let mut r = f[(p, j)] + table.get(p, j);
            for m in 0..size {
                let lo = m.saturating_sub(1);
                let hi = (m + 1).min(size - 1);
                let overlap: Complex64 = (lo..=hi).map(|n| zeta(n, m, p, h) * f[(n, j)]).sum();
                r += table.get(p, m) * overlap;
            }
            worst = worst.max(r.norm());
        }
    }
    worst
}

//! Marchenko kernel coefficients F₀,ₖ for l = 0.
//!
//! With the rectangular basis `H_k(x) = H_0(x - kh)`, `H_0 = 1` on `[0, h]`,
//! the kernel `F(x) ≈ Σ_k F₀,ₖ H_k(x)` implies
//!
//! ```text
//! q Y(q) = i Σ_k (F₀,ₖ₋₁ - F₀,ₖ) e^{-iqhk}     (|q| ≤ π/h)
//! ```
//!
//! so the differences are Fourier coefficients of `qY`. Folding the negative
//! half-axis with `Y_u(-q) = Y_u(q)*` and `S(-q) = S_u(q)* - S_n(q)*` gives
//!
//! ```text
//! F₀,ₖ₋₁ - F₀,ₖ = (h/π) ∫₀^{π/h} q [Im(Y_u e^{iqhk}) + i Re(S_n e^{iqhk})] dq
//! ```
//!
//! for k = -2N+1 … 2N, `F₀,₂ₙ` from the k = 2N+1 integral, and the k = -2N
//! row left over as a closure check.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scatdata::{Continuation, SMatrixModel};

/// Radial grid `r_p = p·h`, `p = 0 … N`, with `R = N·h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelGrid {
    h: f64,
    n: usize,
}

impl KernelGrid {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::domain(format!("step h must be > 0, got {h}")));
        }
        if n < 2 {
            return Err(Error::domain(format!(
                "need N >= 2 grid intervals, got {n}"
            )));
        }
        Ok(Self { h, n })
    }

    /// Grid with `N = R/h`, which must be an integer to within 1e-9 relative.
    pub fn from_range(h: f64, range: f64) -> Result<Self> {
        if !(h > 0.0) || !(range > 0.0) {
            return Err(Error::domain("h and R must be positive"));
        }
        let n = (range / h).round();
        if ((n * h - range) / range).abs() > 1e-9 {
            return Err(Error::domain(format!(
                "R={range} is not an integer multiple of h={h}"
            )));
        }
        Self::new(h, n as usize)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn range(&self) -> f64 {
        self.h * self.n as f64
    }

    pub fn q_max(&self) -> f64 {
        PI / self.h
    }

    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |p| p as f64 * self.h)
    }
}

/// The pair (Y_u(q), S_n(q)) that drives the coefficient integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralValue {
    pub yu: Complex64,
    pub sn: Complex64,
}

/// Anything that supplies Y_u and S_n on the positive momentum axis.
pub trait SpectralInput: Sync {
    fn spectral(&self, q: f64) -> SpectralValue;
}

impl SpectralInput for SMatrixModel {
    fn spectral(&self, q: f64) -> SpectralValue {
        let s = self.s_unchecked(q);
        match self.continuation() {
            Continuation::Linearized => SpectralValue {
                yu: self.yu_from_su(q, s.unitary),
                sn: s.absorptive,
            },
            Continuation::Reciprocal => {
                // yu = (Y(q) + Y(-q)*)/2, sn = (Y(-q)* - Y(q))/2 with S(-q) = 1/S(q)*
                let total = s.total();
                let mirrored = (Complex64::new(1.0, 0.0) / total).conj();
                SpectralValue {
                    yu: self.yu_from_su(q, 0.5 * (total + mirrored)),
                    sn: 0.5 * (total - mirrored),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Minimum Simpson panels per unit of `2N+1` (the fastest oscillation index).
    pub panels_per_index: usize,
    /// Convergence tolerance relative to the largest coefficient integral.
    pub rel_tol: f64,
    /// Maximum number of grid doublings after the first comparison.
    pub max_doublings: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            panels_per_index: 16,
            rel_tol: 1e-6,
            max_doublings: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    grid: KernelGrid,
    values: Vec<Complex64>,
    consistency_defect: f64,
    panels: usize,
    quadrature_error: f64,
}

impl KernelCoefficients {
    /// Wraps explicit values for `k = -2N … 2N`.
    pub fn from_values(grid: KernelGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != 4 * grid.n() + 1 {
            return Err(Error::input(format!(
                "expected {} coefficients, got {}",
                4 * grid.n() + 1,
                values.len()
            )));
        }
        Ok(Self {
            grid,
            values,
            consistency_defect: 0.0,
            panels: 0,
            quadrature_error: 0.0,
        })
    }

    pub fn grid(&self) -> KernelGrid {
        self.grid
    }

    /// F₀,ₖ; zero outside `-2N ..= 2N`.
    pub fn get(&self, k: i64) -> Complex64 {
        let two_n = 2 * self.grid.n() as i64;
        if k < -two_n || k > two_n {
            return Complex64::new(0.0, 0.0);
        }
        self.values[(k + two_n) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let two_n = 2 * self.grid.n() as i64;
        -two_n..=two_n
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `|F₀,₋₂ₙ + rhs(-2N)| / max|F|` from the redundant first row.
    pub fn consistency_defect(&self) -> f64 {
        self.consistency_defect
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn quadrature_error(&self) -> f64 {
        self.quadrature_error
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,ReF,ImF")?;
        for (k, v) in self.indices().zip(&self.values) {
            writeln!(out, "{k},{:e},{:e}", v.re, v.im)?;
        }
        Ok(())
    }
}

struct SampledInput {
    q: Vec<f64>,
    values: Vec<SpectralValue>,
}

fn sample(input: &dyn SpectralInput, q_max: f64, panels: usize) -> SampledInput {
    let dq = q_max / panels as f64;
    let q: Vec<f64> = (0..=panels).map(|i| i as f64 * dq).collect();
    let values = q
        .par_iter()
        .map(|&qi| {
            if qi == 0.0 {
                // the integrand carries a factor q
                SpectralValue {
                    yu: Complex64::new(0.0, 0.0),
                    sn: Complex64::new(0.0, 0.0),
                }
            } else {
                input.spectral(qi)
            }
        })
        .collect();
    SampledInput { q, values }
}

/// Composite Simpson over every `stride`-th sample.
fn simpson_rhs(s: &SampledInput, h: f64, k: i64, stride: usize) -> Complex64 {
    let n = (s.q.len() - 1) / stride;
    let dq = s.q[stride] - s.q[0];
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=n {
        let i = j * stride;
        let q = s.q[i];
        let phase = Complex64::from_polar(1.0, q * h * k as f64);
        let v = s.values[i];
        let f = q * Complex64::new((v.yu * phase).im, (v.sn * phase).re);
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * f;
    }
    acc * (dq / 3.0) * (h / PI)
}

fn base_panels(grid: &KernelGrid, opts: &QuadratureOptions) -> usize {
    let m = opts.panels_per_index.max(2) * (2 * grid.n() + 1);
    (m.max(64) + 1) & !1
}

/// Right-hand sides `rhs(k)` for the requested indices, converged jointly.
/// Returns the values, the panel count used and the error estimate.
pub fn fourier_rhs_many(
    input: &dyn SpectralInput,
    grid: &KernelGrid,
    ks: &[i64],
    opts: &QuadratureOptions,
) -> Result<(Vec<Complex64>, usize, f64)> {
    let mut panels = base_panels(grid, opts);
    let mut last_err = (0_i64, f64::INFINITY, 0.0);
    for _ in 0..=opts.max_doublings {
        let fine = sample(input, grid.q_max(), 2 * panels);
        let pairs: Vec<(Complex64, Complex64)> = ks
            .par_iter()
            .map(|&k| {
                (
                    simpson_rhs(&fine, grid.h(), k, 1),
                    simpson_rhs(&fine, grid.h(), k, 2),
                )
            })
            .collect();
        let scale = pairs.iter().map(|(f, _)| f.norm()).fold(0.0, f64::max);
        let (worst_k, worst) = pairs
            .iter()
            .zip(ks)
            .map(|((f, c), &k)| (k, (f - c).norm()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let tolerance = opts.rel_tol * scale + 1e-15;
        if worst <= tolerance {
            return Ok((
                pairs.into_iter().map(|(f, _)| f).collect(),
                2 * panels,
                worst,
            ));
        }
        last_err = (worst_k, worst, tolerance);
        panels *= 2;
    }
    Err(Error::Quadrature {
        k: last_err.0,
        estimate: last_err.1,
        tolerance: last_err.2,
        panels,
    })
}

/// `(h/π) ∫₀^{π/h} q [Im(Y_u e^{iqhk}) + i Re(S_n e^{iqhk})] dq` for one index.
pub fn fourier_rhs(
    input: &dyn SpectralInput,
    grid: &KernelGrid,
    k: i64,
    opts: &QuadratureOptions,
) -> Result<Complex64> {
    let two_n = 2 * grid.n() as i64;
    if k < -two_n || k > two_n + 1 {
        return Err(Error::domain(format!("k={k} outside -2N..=2N+1")));
    }
    fourier_rhs_many(input, grid, &[k], opts).map(|(v, _, _)| v[0])
}

pub fn assemble_coefficients(
    input: &dyn SpectralInput,
    grid: &KernelGrid,
    opts: &QuadratureOptions,
) -> Result<KernelCoefficients> {
    let two_n = 2 * grid.n() as i64;
    let ks: Vec<i64> = (-two_n..=two_n + 1).collect();
    let (rhs, panels, err) = fourier_rhs_many(input, grid, &ks, opts)?;
    let rhs_at = |k: i64| rhs[(k + two_n) as usize];

    let mut values = vec![Complex64::new(0.0, 0.0); ks.len() - 1];
    let idx = |k: i64| (k + two_n) as usize;
    values[idx(two_n)] = rhs_at(two_n + 1);
    for k in (-two_n + 1..=two_n).rev() {
        values[idx(k - 1)] = values[idx(k)] + rhs_at(k);
    }

    let max_f = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let closure = (values[0] + rhs_at(-two_n)).norm();
    let consistency_defect = if max_f > 0.0 {
        closure / max_f
    } else {
        closure
    };

    Ok(KernelCoefficients {
        grid: *grid,
        values,
        consistency_defect,
        panels,
        quadrature_error: err,
    })
}

/// `Y(q) = Σ_k F₀,ₖ · i(e^{-iqh} - 1) e^{-iqhk} / q`, valid for either sign of q.
pub fn synth_y_from_coefficients(coeffs: &KernelCoefficients, q: f64) -> Complex64 {
    let h = coeffs.grid().h();
    let basis = Complex64::i() * (Complex64::from_polar(1.0, -q * h) - 1.0) / q;
    coeffs
        .indices()
        .zip(coeffs.values())
        .map(|(k, f)| f * Complex64::from_polar(1.0, -q * h * k as f64))
        .sum::<Complex64>()
        * basis
}

/// Spectral input generated from explicit coefficients, splitting Y into the
/// Hermitian (Y_u) and anti-Hermitian (-S_n) parts along the momentum axis.
pub struct SynthesizedInput<'a>(pub &'a KernelCoefficients);

impl SpectralInput for SynthesizedInput<'_> {
    fn spectral(&self, q: f64) -> SpectralValue {
        let pos = synth_y_from_coefficients(self.0, q);
        let neg = synth_y_from_coefficients(self.0, -q).conj();
        SpectralValue {
            yu: 0.5 * (pos + neg),
            sn: 0.5 * (neg - pos),
        }
    }
}

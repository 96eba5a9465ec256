//! Inverse-power tails `c1/q + c2/q² + c3/q³` fitted by least squares.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub q_min_fit: f64,
}

impl TailFit {
    pub fn eval(&self, q: f64) -> f64 {
        let u = 1.0 / q;
        u * (self.c1 + u * (self.c2 + u * self.c3))
    }

    /// Least-squares fit on all points with `q >= q_min_fit`.
    pub fn fit(q: &[f64], y: &[f64], q_min_fit: f64) -> Result<Self> {
        let (qs, ys): (Vec<f64>, Vec<f64>) = q
            .iter()
            .zip(y)
            .filter(|(qi, _)| **qi >= q_min_fit && **qi > 0.0)
            .map(|(a, b)| (*a, *b))
            .unzip();
        if qs.is_empty() {
            return Err(Error::Fit(format!("no samples with q >= {q_min_fit}")));
        }
        if qs.len() < 3 {
            return Err(Error::Fit(format!(
                "{} samples in fit window q >= {q_min_fit}; need at least 3",
                qs.len()
            )));
        }
        // scale columns by powers of the window edge to keep the design matrix balanced
        let scale = q_min_fit.max(qs[0]);
        let design = DMatrix::from_fn(qs.len(), 3, |i, j| (scale / qs[i]).powi(j as i32 + 1));
        let rhs = DVector::from_column_slice(&ys);
        let svd = design.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-12 * smax) {
            return Err(Error::Fit("degenerate fit window (rank deficient)".into()));
        }
        let sol = svd
            .solve(&rhs, 0.0)
            .map_err(|e| Error::Fit(e.to_string()))?;
        Ok(Self {
            c1: sol[0] * scale,
            c2: sol[1] * scale.powi(2),
            c3: sol[2] * scale.powi(3),
            q_min_fit,
        })
    }
}

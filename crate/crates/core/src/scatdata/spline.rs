//! One-dimensional piecewise-polynomial interpolants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterpolationKind {
    /// C¹ quadratic spline, knots midway between data, linear end pieces.
    #[default]
    Quadratic,
    /// Fritsch–Carlson monotone cubic Hermite interpolant.
    MonotoneCubic,
}

impl std::str::FromStr for InterpolationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic" => Ok(Self::Quadratic),
            "monotone-cubic" | "pchip" => Ok(Self::MonotoneCubic),
            other => Err(Error::input(format!("unknown interpolation '{other}'"))),
        }
    }
}

/// Piecewise cubic `a_i + b_i t + c_i t² + d_i t³` with `t = x - start_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    starts: Vec<f64>,
    end: f64,
    coeffs: Vec<[f64; 4]>,
}

impl PiecewisePoly {
    pub fn new(kind: InterpolationKind, x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::input("abscissa and ordinate lengths differ"));
        }
        if x.len() < 2 {
            return Err(Error::input("interpolation needs at least two points"));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::input(
                "interpolation knots must be strictly increasing",
            ));
        }
        let (starts, coeffs) = match kind {
            InterpolationKind::Quadratic => quadratic(x, y),
            InterpolationKind::MonotoneCubic => (x[..x.len() - 1].to_vec(), monotone_cubic(x, y)),
        };
        Ok(Self {
            starts,
            end: x[x.len() - 1],
            coeffs,
        })
    }

    pub fn x_min(&self) -> f64 {
        self.starts[0]
    }

    pub fn x_max(&self) -> f64 {
        self.end
    }

    /// Evaluates the interpolant; outside the data range the end pieces are extended.
    pub fn eval(&self, x: f64) -> f64 {
        let seg = self.starts.partition_point(|&k| k <= x).saturating_sub(1);
        let t = x - self.starts[seg];
        let [a, b, c, d] = self.coeffs[seg];
        a + t * (b + t * (c + t * d))
    }
}

/// Interpolating quadratic spline with knots midway between the data points
/// and linear end pieces. The continuity conditions form a diagonally
/// dominant tridiagonal system for the values `z_i` at the midpoints.
fn quadratic(x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<[f64; 4]>) {
    let n = x.len() - 1;
    let half: Vec<f64> = x.windows(2).map(|w| 0.5 * (w[1] - w[0])).collect();

    // one-sided derivatives of piece i at its right (R) and left (L) end as
    // (coef on z_{i-1}, coef on z_i, constant)
    let interior = |i: usize| {
        let (alpha, beta, yi) = (half[i], half[i - 1], y[i]);
        let d = alpha * beta * (alpha + beta);
        let right = (
            alpha * alpha / d,
            1.0 / alpha + alpha * beta / d,
            -yi / alpha - alpha * (alpha + beta) * yi / d,
        );
        let left = (
            -(alpha + 2.0 * beta) * alpha / d,
            1.0 / alpha - (alpha + 2.0 * beta) * beta / d,
            -yi / alpha + (alpha + 2.0 * beta) * (alpha + beta) * yi / d,
        );
        (right, left)
    };

    // row i: R_i(z_{i-1}, z_i) - L_{i+1}(z_i, z_{i+1}) = 0
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let (r_prev, r_cur, r_const) = if i == 0 {
            (0.0, 1.0 / half[0], -y[0] / half[0])
        } else {
            interior(i).0
        };
        let (l_cur, l_next, l_const) = if i + 1 == n {
            (-1.0 / half[n - 1], 0.0, y[n] / half[n - 1])
        } else {
            interior(i + 1).1
        };
        sub[i] = r_prev;
        diag[i] = r_cur - l_cur;
        sup[i] = -l_next;
        rhs[i] = l_const - r_const;
    }
    let z = solve_tridiagonal(&sub, &diag, &sup, &rhs);

    let mut starts = Vec::with_capacity(n + 1);
    let mut coeffs = Vec::with_capacity(n + 1);
    starts.push(x[0]);
    coeffs.push([y[0], (z[0] - y[0]) / half[0], 0.0, 0.0]);
    for i in 1..n {
        let (alpha, beta) = (half[i], half[i - 1]);
        let d = alpha * beta * (alpha + beta);
        let c = (beta * z[i] + alpha * z[i - 1] - (alpha + beta) * y[i]) / d;
        let b = (z[i] - y[i]) / alpha - c * alpha;
        starts.push(x[i] - beta);
        coeffs.push([z[i - 1], b - 2.0 * c * beta, c, 0.0]);
    }
    let start = x[n] - half[n - 1];
    starts.push(start);
    coeffs.push([z[n - 1], (y[n] - z[n - 1]) / half[n - 1], 0.0, 0.0]);
    (starts, coeffs)
}

fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - sub[i] * c[i - 1];
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    let mut z = vec![0.0; n];
    z[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        z[i] = d[i] - c[i] * z[i + 1];
    }
    z
}

fn monotone_cubic(x: &[f64], y: &[f64]) -> Vec<[f64; 4]> {
    let n = x.len() - 1;
    let dx: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let m: Vec<f64> = (0..n).map(|i| (y[i + 1] - y[i]) / dx[i]).collect();
    let mut d = vec![0.0; n + 1];

    if n == 1 {
        d[0] = m[0];
        d[1] = m[0];
    } else {
        for i in 1..n {
            if m[i - 1] * m[i] > 0.0 {
                let w1 = 2.0 * dx[i] + dx[i - 1];
                let w2 = dx[i] + 2.0 * dx[i - 1];
                d[i] = (w1 + w2) / (w1 / m[i - 1] + w2 / m[i]);
            }
        }
        d[0] = end_slope(dx[0], dx[1], m[0], m[1]);
        d[n] = end_slope(dx[n - 1], dx[n - 2], m[n - 1], m[n - 2]);
    }

    (0..n)
        .map(|i| {
            let h = dx[i];
            let c = (3.0 * m[i] - 2.0 * d[i] - d[i + 1]) / h;
            let e = (d[i] + d[i + 1] - 2.0 * m[i]) / (h * h);
            [y[i], d[i], c, e]
        })
        .collect()
}

// Shape-preserving three-point end derivative.
fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_reproduces_knots_and_is_c1() {
        let x = [0.0, 0.3, 1.0, 1.7, 2.5, 4.0];
        let y = [0.0, 0.4, 0.1, -0.3, 0.8, 0.2];
        let s = PiecewisePoly::new(InterpolationKind::Quadratic, &x, &y).unwrap();
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-12);
        }
        let eps = 1e-7;
        for w in x.windows(2) {
            let knot = 0.5 * (w[0] + w[1]);
            let left = (s.eval(knot) - s.eval(knot - eps)) / eps;
            let right = (s.eval(knot + eps) - s.eval(knot)) / eps;
            assert!((left - right).abs() < 1e-4, "kink at {knot}");
            assert!((s.eval(knot + 1e-13) - s.eval(knot - 1e-13)).abs() < 1e-10);
        }
        // first half-interval is linear
        let slope = (s.eval(0.1) - s.eval(0.0)) / 0.1;
        assert!((s.eval(0.05) - 0.05 * slope).abs() < 1e-12);
    }

    #[test]
    fn quadratic_is_exact_on_linear_data() {
        let x = [0.0, 1.0, 2.5, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
        let s = PiecewisePoly::new(InterpolationKind::Quadratic, &x, &y).unwrap();
        assert!((s.eval(1.7) - 2.4).abs() < 1e-12);
    }

    #[test]
    fn quadratic_does_not_ring_after_a_steep_onset() {
        let x: Vec<f64> = (0..400).map(|i| 0.05 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&q| (8.0 * q).atan()).collect();
        let s = PiecewisePoly::new(InterpolationKind::Quadratic, &x, &y).unwrap();
        for w in x.windows(2).skip(20) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!((s.eval(mid) - (8.0 * mid).atan()).abs() < 1e-5, "at {mid}");
        }
    }

    #[test]
    fn monotone_cubic_does_not_overshoot() {
        let x = [0.0, 1.0, 2.0, 3.0, 4.0];
        let y = [0.0, 0.0, 1.0, 1.0, 1.0];
        let s = PiecewisePoly::new(InterpolationKind::MonotoneCubic, &x, &y).unwrap();
        for i in 0..=400 {
            let v = s.eval(i as f64 * 0.01);
            assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{v}");
        }
        for (xi, yi) in x.iter().zip(&y) {
            assert!((s.eval(*xi) - yi).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(
            PiecewisePoly::new(InterpolationKind::Quadratic, &[0.0, 0.0], &[1.0, 2.0]).is_err()
        );
        assert!(PiecewisePoly::new(InterpolationKind::Quadratic, &[0.0], &[1.0]).is_err());
    }
}

//! Independent oracles shared by the integration tests. Nothing here calls
//! into the algorithms under test.
#![allow(dead_code, clippy::needless_range_loop)]

use marchenko_core::Complex64;

/// ₀F₁(; b; z) by its power series.
pub fn hyp0f1(b: Complex64, z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 1..500 {
        term *= z / (m as f64 * (b + (m - 1) as f64));
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// Closed-form s-wave S-matrix of `V(r) = v0·e^{-a r}` (fm⁻²).
///
/// With `x = √(-v0)·2/a·e^{-ar/2}` the radial equation becomes Bessel's, and
/// the regular solution gives `S = ₀F₁(;1+ν;-z)/₀F₁(;1-ν;-z)` with
/// `ν = 2iq/a`, `z = -v0/a²`. Valid for complex `v0`.
pub fn exp_well_s(v0: Complex64, a: f64, q: f64) -> Complex64 {
    let z = -v0 / (a * a);
    let nu = Complex64::new(0.0, 2.0 * q / a);
    hyp0f1(1.0 + nu, -z) / hyp0f1(1.0 - nu, -z)
}

/// Square-well phase shift for real depth `v0` (fm⁻², negative = attractive)
/// and width `a`, defined modulo π.
pub fn square_well_delta(v0: f64, a: f64, q: f64) -> f64 {
    let k2 = q * q - v0;
    let ratio = if k2 > 0.0 {
        let k = k2.sqrt();
        (k * a).tan() / k
    } else {
        // evanescent inside a barrier
        let kappa = (-k2).sqrt();
        (kappa * a).tanh() / kappa
    };
    -q * a + (q * ratio).atan()
}

/// Distance between two phases modulo π.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Hat function of width `2h` centred at `m·h`.
pub fn hat(m: usize, h: f64, t: f64) -> f64 {
    (1.0 - (t / h - m as f64).abs()).max(0.0)
}

/// Dense collocation solve of `F(x,y) + L(x,y) + ∫_x^∞ L(x,t) F(t,y) dt = 0`
/// at `x = ph`, `y = jh` with `L(ph, t) = Σ_m P[p][m] Δ_m(t)` and
/// `F(t, jh) = Σ_n Δ_n(t) F[n][j]`. The overlap integrals are done by
/// three-point Gauss–Legendre per cell (exact for the piecewise quadratic
/// integrand) and all `(N+1)²` unknowns are solved in one system.
pub fn collocation_solve(f: &[Vec<Complex64>], h: f64) -> Vec<Vec<Complex64>> {
    let n = f.len() - 1;
    let width = n + 1;
    let dim = width * width;
    let gauss = [
        (-(0.6f64).sqrt(), 5.0 / 9.0),
        (0.0, 8.0 / 9.0),
        ((0.6f64).sqrt(), 5.0 / 9.0),
    ];
    let zero = Complex64::new(0.0, 0.0);
    let mut a = vec![vec![zero; dim]; dim];
    let mut b = vec![zero; dim];

    for p in 0..=n {
        for j in 0..=n {
            let row = p * width + j;
            a[row][row] += 1.0;
            // Δ_N reaches (N+1)h
            for cell in p..=n {
                let mid = (cell as f64 + 0.5) * h;
                for &(s, w) in &gauss {
                    let t = mid + 0.5 * h * s;
                    let weight = 0.5 * h * w;
                    let f_t: Complex64 = (0..=n).map(|k| f[k][j] * hat(k, h, t)).sum();
                    for m in 0..=n {
                        a[row][p * width + m] += weight * hat(m, h, t) * f_t;
                    }
                }
            }
            b[row] = -f[p][j];
        }
    }

    let x = gauss_eliminate(a, b);
    (0..=n)
        .map(|p| x[p * width..(p + 1) * width].to_vec())
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn gauss_eliminate(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / d;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Y built from the closed-form exponential-well S with the exact continuation
/// S(−q) = 1/S(q)*, split into the even/odd parts the kernel generator expects.
pub struct ExactExpWell {
    pub v0: Complex64,
    pub a: f64,
}

impl marchenko_core::kernelgen::SpectralInput for ExactExpWell {
    fn spectral(&self, q: f64) -> marchenko_core::kernelgen::SpectralValue {
        let s = exp_well_s(self.v0, self.a, q);
        let mirrored = (1.0 / s).conj();
        marchenko_core::kernelgen::SpectralValue {
            yu: 1.0 - 0.5 * (s + mirrored),
            sn: 0.5 * (s - mirrored),
        }
    }
}

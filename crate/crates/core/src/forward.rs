//! Forward s-wave solver: `u'' = (V(r) - q²) u`, `u(0) = 0`, for real or
//! complex potentials, matched to `A e^{iqr} + B e^{-iqr}` outside the range.
//! With that convention `S = -A/B`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::PotentialGrid;
use crate::scatdata::PhaseShiftSample;
use crate::units::Kinematics;

/// Potential in fm⁻²; every variant vanishes beyond its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialSpec {
    /// `V₀ e^{-a r}`.
    Exponential { v0_re: f64, v0_im: f64, a: f64 },
    /// `V₀` for `r < width`.
    SquareWell { v0_re: f64, v0_im: f64, width: f64 },
    /// Linear interpolation on `r_p = p·h`, zero beyond the last point.
    Tabulated { h: f64, values: Vec<(f64, f64)> },
}

// |V| below this (fm⁻²) is treated as zero when placing the matching radius.
const NEGLIGIBLE_POTENTIAL: f64 = 1e-11;

impl PotentialSpec {
    pub fn exponential(v0: Complex64, a: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::input("exponential range parameter a must be > 0"));
        }
        Ok(Self::Exponential {
            v0_re: v0.re,
            v0_im: v0.im,
            a,
        })
    }

    pub fn square_well(v0: Complex64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::input("square-well width must be > 0"));
        }
        Ok(Self::SquareWell {
            v0_re: v0.re,
            v0_im: v0.im,
            width,
        })
    }

    pub fn tabulated(grid: &PotentialGrid, kin: &Kinematics) -> Self {
        Self::Tabulated {
            h: grid.h(),
            values: grid.values_fm2(kin).iter().map(|v| (v.re, v.im)).collect(),
        }
    }

    pub fn eval(&self, r: f64) -> Complex64 {
        match self {
            Self::Exponential { v0_re, v0_im, a } => {
                Complex64::new(*v0_re, *v0_im) * (-a * r).exp()
            }
            Self::SquareWell {
                v0_re,
                v0_im,
                width,
            } => {
                if r < *width {
                    Complex64::new(*v0_re, *v0_im)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }
            Self::Tabulated { h, values } => {
                let range = h * (values.len() - 1) as f64;
                if r < 0.0 || r > range {
                    return Complex64::new(0.0, 0.0);
                }
                let x = r / h;
                let i = (x.floor() as usize).min(values.len() - 2);
                let t = x - i as f64;
                let (a, b) = (values[i], values[i + 1]);
                Complex64::new(a.0 * (1.0 - t) + b.0 * t, a.1 * (1.0 - t) + b.1 * t)
            }
        }
    }

    /// Radii where V or V' may be discontinuous.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Exponential { .. } => vec![],
            Self::SquareWell { width, .. } => vec![*width],
            Self::Tabulated { h, values } => (1..values.len()).map(|p| p as f64 * h).collect(),
        }
    }

    /// Radius beyond which |V| is negligible.
    pub fn effective_range(&self) -> f64 {
        match self {
            Self::Exponential { v0_re, v0_im, a } => {
                let mag = Complex64::new(*v0_re, *v0_im).norm();
                if mag <= NEGLIGIBLE_POTENTIAL {
                    0.0
                } else {
                    (mag / NEGLIGIBLE_POTENTIAL).ln() / a
                }
            }
            Self::SquareWell { width, .. } => *width,
            Self::Tabulated { h, values } => h * (values.len() - 1) as f64,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Self::Exponential { v0_re, v0_im, .. } | Self::SquareWell { v0_re, v0_im, .. } => {
                *v0_re == 0.0 && *v0_im == 0.0
            }
            Self::Tabulated { values, .. } => values.iter().all(|v| v.0 == 0.0 && v.1 == 0.0),
        }
    }

    pub fn is_real(&self) -> bool {
        match self {
            Self::Exponential { v0_im, .. } | Self::SquareWell { v0_im, .. } => *v0_im == 0.0,
            Self::Tabulated { values, .. } => values.iter().all(|v| v.1 == 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    /// Fixed step in fm; default `min(0.01/q, 0.005)`.
    pub step: Option<f64>,
    /// Matching radius in fm; default the potential's effective range (at least 1 fm).
    pub r_match: Option<f64>,
    /// Keep the sampled wave function in the result.
    pub store_wave: bool,
}

impl IntegrationOptions {
    pub fn step_for(&self, q: f64) -> f64 {
        self.step.unwrap_or_else(|| (0.01 / q).min(0.005))
    }

    pub fn r_match_for(&self, spec: &PotentialSpec) -> f64 {
        self.r_match
            .unwrap_or_else(|| spec.effective_range().max(1.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSolution {
    pub q: f64,
    /// `(r, u(r))` samples on the integration mesh (empty unless requested).
    pub wave: Vec<(f64, Complex64)>,
    pub s: Complex64,
    /// Complex phase shift `(1/2i) log S`, principal branch.
    pub delta_c: Complex64,
    /// `1 - |S|`, computed without cancellation.
    pub absorption: f64,
}

fn rk4_segment(
    spec: &PotentialSpec,
    q2: f64,
    a: f64,
    b: f64,
    max_step: f64,
    state: &mut (Complex64, Complex64),
    wave: Option<&mut Vec<(f64, Complex64)>>,
) {
    let steps = ((b - a) / max_step).ceil().max(1.0) as usize;
    let dr = (b - a) / steps as f64;
    // evaluate V strictly inside the segment so jumps at its ends are one-sided
    let eps = 1e-12 * b.max(1.0);
    let potential = |r: f64| spec.eval(r.clamp(a + eps, b - eps)) - q2;
    let mut wave = wave;
    let (mut u, mut du) = *state;
    let mut g0 = potential(a);
    for i in 0..steps {
        let r = a + i as f64 * dr;
        let g_mid = potential(r + 0.5 * dr);
        let g1 = potential(r + dr);
        let k1u = du;
        let k1v = g0 * u;
        let k2u = du + 0.5 * dr * k1v;
        let k2v = g_mid * (u + 0.5 * dr * k1u);
        let k3u = du + 0.5 * dr * k2v;
        let k3v = g_mid * (u + 0.5 * dr * k2u);
        let k4u = du + dr * k3v;
        let k4v = g1 * (u + dr * k3u);
        u += dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        du += dr / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        g0 = g1;
        if let Some(w) = wave.as_deref_mut() {
            w.push((r + dr, u));
        }
    }
    *state = (u, du);
}

/// Integrates the regular solution from `u(0) = 0, u'(0) = 1` with fixed-step RK4.
pub fn integrate_radial(
    spec: &PotentialSpec,
    q: f64,
    opts: &IntegrationOptions,
) -> Result<WaveSolution> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::domain(format!("momentum must be > 0, got {q}")));
    }
    let step = opts.step_for(q);
    if !(step > 0.0) || step * q > 0.1 {
        return Err(Error::Accuracy {
            q,
            reason: format!("step {step} fm does not resolve the wavelength (need step*q <= 0.1)"),
        });
    }
    let r_match = opts.r_match_for(spec);
    if !(r_match > 0.0) {
        return Err(Error::domain("matching radius must be > 0"));
    }
    if spec.is_zero() {
        return Ok(WaveSolution {
            q,
            wave: vec![],
            s: Complex64::new(1.0, 0.0),
            delta_c: Complex64::new(0.0, 0.0),
            absorption: 0.0,
        });
    }

    let mut nodes = vec![0.0];
    nodes.extend(
        spec.breakpoints()
            .into_iter()
            .filter(|&b| b > 0.0 && b < r_match),
    );
    nodes.push(r_match);

    let q2 = q * q;
    let mut state = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    let mut wave = opts
        .store_wave
        .then(|| vec![(0.0, Complex64::new(0.0, 0.0))]);
    for seg in nodes.windows(2) {
        rk4_segment(spec, q2, seg[0], seg[1], step, &mut state, wave.as_mut());
    }

    let (u, du) = state;
    let outgoing = Complex64::from_polar(1.0, q * r_match);
    let a = 0.5 * (u - Complex64::i() * du / q) * outgoing.conj();
    let b = 0.5 * (u + Complex64::i() * du / q) * outgoing;
    let s = -a / b;
    let (na, nb) = (a.norm(), b.norm());
    let absorption = (nb * nb - na * na) / (nb * (na + nb));
    if !s.is_finite() {
        return Err(Error::Accuracy {
            q,
            reason: "non-finite S-matrix".into(),
        });
    }
    if spec.is_real() && absorption.abs() > 1e-8 {
        return Err(Error::Accuracy {
            q,
            reason: format!("flux not conserved for a real potential (1-|S| = {absorption:e})"),
        });
    }
    let delta_c = Complex64::new(0.5 * s.arg(), -0.5 * s.norm().ln());
    Ok(WaveSolution {
        q,
        wave: wave.unwrap_or_default(),
        s,
        delta_c,
        absorption,
    })
}

/// ρ with `|S| = cos²ρ`; zero when the solution is not absorptive.
pub fn rho_from_absorption(absorption: f64) -> f64 {
    if absorption <= 0.0 {
        0.0
    } else {
        absorption.min(1.0).sqrt().asin()
    }
}

/// Phase shifts and inelasticities on an increasing grid of momenta, with δ
/// unwrapped by continuity starting from the principal branch at the highest q.
pub fn scan_smatrix(
    spec: &PotentialSpec,
    q_grid: &[f64],
    opts: &IntegrationOptions,
) -> Result<Vec<PhaseShiftSample>> {
    if q_grid.is_empty() {
        return Ok(vec![]);
    }
    if q_grid.windows(2).any(|w| !(w[1] > w[0])) || !(q_grid[0] > 0.0) {
        return Err(Error::input(
            "momentum grid must be positive and increasing",
        ));
    }
    let opts = IntegrationOptions {
        store_wave: false,
        ..*opts
    };
    let solutions: Vec<WaveSolution> = q_grid
        .par_iter()
        .map(|&q| integrate_radial(spec, q, &opts))
        .collect::<Result<_>>()?;

    let mut deltas: Vec<f64> = solutions.iter().map(|s| s.delta_c.re).collect();
    for i in (0..deltas.len().saturating_sub(1)).rev() {
        let next = deltas[i + 1];
        deltas[i] -= ((deltas[i] - next) / PI).round() * PI;
    }
    Ok(solutions
        .iter()
        .zip(deltas)
        .map(|(s, d)| PhaseShiftSample::new(s.q, d, rho_from_absorption(s.absorption)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wrapped_diff(a: f64, b: f64) -> f64 {
        let d = a - b;
        (d - (d / PI).round() * PI).abs()
    }

    #[test]
    fn zero_potential() {
        let spec = PotentialSpec::exponential(Complex64::new(0.0, 0.0), 1.0).unwrap();
        let s = scan_smatrix(&spec, &[0.5, 1.0, 2.0], &IntegrationOptions::default()).unwrap();
        assert!(s.iter().all(|x| x.delta == 0.0 && x.rho == 0.0));
    }

    #[test]
    fn square_well_closed_form() {
        let (v0, width) = (-2.0, 1.0);
        let spec = PotentialSpec::square_well(Complex64::new(v0, 0.0), width).unwrap();
        let q: f64 = 1.0;
        let k = (q * q - v0).sqrt();
        let exact = -q * width + (q * (k * width).tan() / k).atan();
        let sol = integrate_radial(&spec, q, &IntegrationOptions::default()).unwrap();
        assert!(
            wrapped_diff(sol.delta_c.re, exact) < 1e-6,
            "{} vs {exact}",
            sol.delta_c.re
        );
        assert!(sol.absorption.abs() < 1e-12);
    }

    #[test]
    fn wave_starts_regular() {
        let spec = PotentialSpec::exponential(Complex64::new(-3.0, -1.0), 1.5).unwrap();
        let opts = IntegrationOptions {
            store_wave: true,
            ..Default::default()
        };
        let sol = integrate_radial(&spec, 1.0, &opts).unwrap();
        assert_eq!(sol.wave[0], (0.0, Complex64::new(0.0, 0.0)));
        assert!(sol.wave.len() > 100);
        assert!(sol.delta_c.im >= 0.0 && sol.s.norm() <= 1.0);
    }

    #[test]
    fn coarse_step_rejected() {
        let spec = PotentialSpec::exponential(Complex64::new(-3.0, 0.0), 1.5).unwrap();
        let opts = IntegrationOptions {
            step: Some(0.5),
            ..Default::default()
        };
        assert!(matches!(
            integrate_radial(&spec, 2.0, &opts),
            Err(Error::Accuracy { .. })
        ));
        assert!(integrate_radial(&spec, 0.0, &IntegrationOptions::default()).is_err());
    }

    #[test]
    fn real_potential_is_unitary_and_complex_absorbs() {
        let q: Vec<f64> = (1..=50).map(|i| 0.1 * i as f64).collect();
        let real = PotentialSpec::exponential(Complex64::new(-3.0, 0.0), 1.5).unwrap();
        let s = scan_smatrix(&real, &q, &IntegrationOptions::default()).unwrap();
        assert!(s.iter().all(|x| x.rho.abs() < 1e-9));
        let optical = PotentialSpec::exponential(Complex64::new(-3.0, -1.0), 1.5).unwrap();
        let s = scan_smatrix(&optical, &q, &IntegrationOptions::default()).unwrap();
        assert!(s.iter().filter(|x| x.q > 0.5).all(|x| x.rho > 0.0));
    }

    #[test]
    fn tabulated_matches_linear_interpolation() {
        let kin = Kinematics::default();
        let grid = PotentialGrid::new(
            0.5,
            vec![
                Complex64::new(-100.0, -10.0),
                Complex64::new(-50.0, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let spec = PotentialSpec::tabulated(&grid, &kin);
        assert!((spec.eval(0.25) - Complex64::new(-75.0, -5.0) / kin.hbar2_over_m).norm() < 1e-12);
        assert_eq!(spec.eval(1.2), Complex64::new(0.0, 0.0));
        assert_eq!(spec.breakpoints(), vec![0.5, 1.0]);
        assert!(!spec.is_real());
    }
}

//! Scattering data ingestion and the continuous S-matrix model.
//!
//! Tabulated phase shifts δ and inelasticity parameters ρ are unwrapped,
//! anchored at δ(0) = 0, interpolated on the data range and completed by an
//! asymptotic tail. The optical S-matrix uses the split
//!
//! ```text
//! S_u(q) = exp(2iδ),   S_n(q) = -sin²ρ · exp(2iδ),   S = S_u + S_n = cos²ρ · exp(2iδ)
//! ```
//!
//! and the Marchenko input function is
//! `Y_u(q) = 1 - S_u(q) - i Σ_j M_j² / (q - iκ_j)`.

mod io;
mod spline;
mod tail;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use io::{read_bound_states, read_phase_shifts, write_phase_shifts, MomentumColumn};
pub use spline::{InterpolationKind, PiecewisePoly};
pub use tail::TailFit;

/// One tabulated data point. Angles are in radians, `q` in fm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftSample {
    pub q: f64,
    pub delta: f64,
    pub rho: f64,
}

impl PhaseShiftSample {
    pub fn new(q: f64, delta: f64, rho: f64) -> Self {
        Self { q, delta, rho }
    }
}

/// Bound-state pole at q = iκ with asymptotic constant squared `m2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundState {
    pub kappa: f64,
    pub m2: f64,
}

impl BoundState {
    pub fn new(kappa: f64, m2: f64) -> Result<Self> {
        if !(kappa > 0.0) {
            return Err(Error::input(format!(
                "bound state kappa must be > 0, got {kappa}"
            )));
        }
        if !(m2 > 0.0) {
            return Err(Error::input(format!(
                "bound state M^2 must be > 0, got {m2}"
            )));
        }
        Ok(Self { kappa, m2 })
    }

    /// The pole contribution `-i M² / (q - iκ)` to Y(q).
    pub fn pole_term(&self, q: f64) -> Complex64 {
        -Complex64::i() * self.m2 / Complex64::new(q, -self.kappa)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScatteringMode {
    #[default]
    Unitary,
    Optical,
}

impl std::str::FromStr for ScatteringMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unitary" => Ok(Self::Unitary),
            "optical" => Ok(Self::Optical),
            other => Err(Error::input(format!(
                "unknown mode '{other}' (unitary|optical)"
            ))),
        }
    }
}

impl std::fmt::Display for ScatteringMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Unitary => "unitary",
            Self::Optical => "optical",
        })
    }
}

/// How the model is continued beyond the last data point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TailMode {
    /// `S(q) ≈ exp(-2iA/q)` with A fixed by the last sample.
    #[default]
    Asymptotic,
    /// Least-squares `c1/q + c2/q² + c3/q³` on samples with `q >= q_min_fit`.
    Fit { q_min_fit: f64 },
}

/// How S is continued to negative momenta in optical mode.
///
/// `Linearized` uses `S(-q) = S_u*(q) - S_n*(q)`, which is `1/S(q)*`
/// expanded to first order in sin²ρ; its error grows like sin⁴ρ for strong
/// absorption. `Reciprocal` uses `S(-q) = 1/S(q)*` itself, which holds for
/// any local potential. Both coincide for unitary data.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continuation {
    #[default]
    Linearized,
    Reciprocal,
}

impl std::str::FromStr for Continuation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linearized" => Ok(Self::Linearized),
            "reciprocal" => Ok(Self::Reciprocal),
            other => Err(Error::input(format!(
                "unknown continuation '{other}' (linearized|reciprocal)"
            ))),
        }
    }
}

impl std::fmt::Display for Continuation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Linearized => "linearized",
            Self::Reciprocal => "reciprocal",
        })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub mode: ScatteringMode,
    pub tail: TailMode,
    pub interpolation: InterpolationKind,
    #[serde(default)]
    pub continuation: Continuation,
}

#[derive(Debug, Clone, PartialEq)]
enum Tail {
    Asymptotic,
    Fit {
        delta: TailFit,
        rho: Option<TailFit>,
        delta_shift: f64,
        rho_shift: f64,
    },
}

/// Both parts of the S-matrix at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SValue {
    pub unitary: Complex64,
    pub absorptive: Complex64,
}

impl SValue {
    pub fn total(&self) -> Complex64 {
        self.unitary + self.absorptive
    }
}

#[derive(Debug, Clone)]
pub struct SMatrixModel {
    samples: Vec<PhaseShiftSample>,
    delta: PiecewisePoly,
    rho: Option<PiecewisePoly>,
    tail: Tail,
    asymptotic_a: Complex64,
    bound_states: Vec<BoundState>,
    mode: ScatteringMode,
    continuation: Continuation,
}

// The blended tail correction decays faster than every fitted term.
const BLEND_POWER: i32 = 4;

impl SMatrixModel {
    pub fn build(
        samples: &[PhaseShiftSample],
        bound_states: &[BoundState],
        options: ModelOptions,
    ) -> Result<Self> {
        if samples.len() < 3 {
            return Err(Error::input(format!(
                "need at least 3 phase-shift samples, got {}",
                samples.len()
            )));
        }
        for s in samples {
            if !(s.q >= 0.0) || !s.delta.is_finite() {
                return Err(Error::input(format!("invalid sample at q={}", s.q)));
            }
            if !(-1e-12..=FRAC_PI_2 + 1e-12).contains(&s.rho) {
                return Err(Error::input(format!(
                    "rho={} at q={} outside [0, pi/2]",
                    s.rho, s.q
                )));
            }
            if options.continuation == Continuation::Reciprocal && s.rho.cos() < 1e-6 {
                return Err(Error::input(format!(
                    "reciprocal continuation needs S != 0 (rho={} at q={})",
                    s.rho, s.q
                )));
            }
            if options.mode == ScatteringMode::Unitary && s.rho != 0.0 {
                return Err(Error::input(format!(
                    "nonzero rho at q={} but mode is unitary",
                    s.q
                )));
            }
        }
        if let Some(w) = samples.windows(2).find(|w| !(w[1].q > w[0].q)) {
            return Err(Error::input(format!(
                "momenta must be strictly increasing (q={} followed by q={})",
                w[0].q, w[1].q
            )));
        }

        let mut prepared = Vec::with_capacity(samples.len() + 1);
        if samples[0].q > 0.0 {
            prepared.push(PhaseShiftSample::new(0.0, 0.0, 0.0));
        }
        prepared.extend(samples.iter().map(|s| PhaseShiftSample {
            rho: s.rho.clamp(0.0, FRAC_PI_2),
            ..*s
        }));
        unwrap_modulo_pi(&mut prepared);
        if prepared[0].delta.abs() > 1e-9 {
            return Err(Error::input(format!(
                "delta(0) = {} is not a multiple of pi",
                samples[0].delta
            )));
        }
        prepared[0].delta = 0.0;

        let q: Vec<f64> = prepared.iter().map(|s| s.q).collect();
        let d: Vec<f64> = prepared.iter().map(|s| s.delta).collect();
        let delta = PiecewisePoly::new(options.interpolation, &q, &d)?;
        let rho = match options.mode {
            ScatteringMode::Unitary => None,
            ScatteringMode::Optical => {
                let r: Vec<f64> = prepared.iter().map(|s| s.rho).collect();
                Some(PiecewisePoly::new(options.interpolation, &q, &r)?)
            }
        };

        let edge = *prepared.last().expect("non-empty");
        let delta_c_edge = Complex64::new(edge.delta, -edge.rho.cos().ln());
        let asymptotic_a = -edge.q * delta_c_edge;

        let tail = match options.tail {
            TailMode::Asymptotic => Tail::Asymptotic,
            TailMode::Fit { q_min_fit } => {
                let data_q: Vec<f64> = prepared[1..].iter().map(|s| s.q).collect();
                let data_d: Vec<f64> = prepared[1..].iter().map(|s| s.delta).collect();
                let delta_fit = TailFit::fit(&data_q, &data_d, q_min_fit)?;
                let rho_fit = match options.mode {
                    ScatteringMode::Unitary => None,
                    ScatteringMode::Optical => {
                        let data_r: Vec<f64> = prepared[1..].iter().map(|s| s.rho).collect();
                        Some(TailFit::fit(&data_q, &data_r, q_min_fit)?)
                    }
                };
                Tail::Fit {
                    delta: delta_fit,
                    delta_shift: edge.delta - delta_fit.eval(edge.q),
                    rho_shift: rho_fit.map_or(0.0, |f| edge.rho - f.eval(edge.q)),
                    rho: rho_fit,
                }
            }
        };

        Ok(Self {
            samples: prepared,
            delta,
            rho,
            tail,
            asymptotic_a,
            bound_states: bound_states.to_vec(),
            mode: options.mode,
            continuation: options.continuation,
        })
    }

    pub fn mode(&self) -> ScatteringMode {
        self.mode
    }

    pub fn continuation(&self) -> Continuation {
        self.continuation
    }

    pub fn bound_states(&self) -> &[BoundState] {
        &self.bound_states
    }

    /// Samples after origin anchoring and unwrapping.
    pub fn samples(&self) -> &[PhaseShiftSample] {
        &self.samples
    }

    pub fn q_data_max(&self) -> f64 {
        self.delta.x_max()
    }

    /// Complex asymptotic constant A of `S ≈ exp(-2iA/q)`; real for unitary data.
    pub fn asymptotic_constant(&self) -> Complex64 {
        self.asymptotic_a
    }

    /// Fitted tail coefficients for (δ, ρ), when the tail mode is a fit.
    pub fn tail_fits(&self) -> Option<(TailFit, Option<TailFit>)> {
        match &self.tail {
            Tail::Fit { delta, rho, .. } => Some((*delta, *rho)),
            Tail::Asymptotic => None,
        }
    }

    /// (δ, ρ) at `q >= 0`; ρ is identically zero in unitary mode.
    pub fn phase(&self, q: f64) -> (f64, f64) {
        let edge = self.q_data_max();
        if q <= edge {
            let rho = self.rho.as_ref().map_or(0.0, |r| r.eval(q));
            return (self.delta.eval(q), rho.clamp(0.0, FRAC_PI_2));
        }
        match &self.tail {
            Tail::Asymptotic => {
                let delta_c = -self.asymptotic_a / q;
                let rho = match self.mode {
                    ScatteringMode::Unitary => 0.0,
                    ScatteringMode::Optical => (-delta_c.im).exp().min(1.0).acos(),
                };
                (delta_c.re, rho)
            }
            Tail::Fit {
                delta,
                rho,
                delta_shift,
                rho_shift,
            } => {
                let blend = (edge / q).powi(BLEND_POWER);
                let d = delta.eval(q) + delta_shift * blend;
                let r = rho.map_or(0.0, |f| f.eval(q) + rho_shift * blend);
                (d, r.clamp(0.0, FRAC_PI_2))
            }
        }
    }

    pub fn eval_s(&self, q: f64) -> Result<SValue> {
        check_momentum(q)?;
        Ok(self.s_unchecked(q))
    }

    pub fn eval_yu(&self, q: f64) -> Result<Complex64> {
        check_momentum(q)?;
        Ok(self.yu_unchecked(q))
    }

    pub(crate) fn s_unchecked(&self, q: f64) -> SValue {
        let (delta, rho) = self.phase(q);
        let unitary = Complex64::from_polar(1.0, 2.0 * delta);
        let s2 = rho.sin().powi(2);
        SValue {
            unitary,
            absorptive: -s2 * unitary,
        }
    }

    pub(crate) fn yu_from_su(&self, q: f64, su: Complex64) -> Complex64 {
        let poles: Complex64 = self.bound_states.iter().map(|b| b.pole_term(q)).sum();
        Complex64::new(1.0, 0.0) - su + poles
    }

    pub(crate) fn yu_unchecked(&self, q: f64) -> Complex64 {
        self.yu_from_su(q, self.s_unchecked(q).unitary)
    }
}

fn check_momentum(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "S-matrix model needs q > 0, got {q}"
        )))
    }
}

/// Shifts each δ by a multiple of π so consecutive values differ by at most π/2.
pub fn unwrap_modulo_pi(samples: &mut [PhaseShiftSample]) {
    for i in 1..samples.len() {
        let prev = samples[i - 1].delta;
        let cur = samples[i].delta;
        samples[i].delta = cur - ((cur - prev) / PI).round() * PI;
    }
    if let Some(first) = samples.first() {
        // re-anchor the whole sequence on the origin branch
        let shift = (first.delta / PI).round() * PI;
        for s in samples.iter_mut() {
            s.delta -= shift;
        }
    }
}

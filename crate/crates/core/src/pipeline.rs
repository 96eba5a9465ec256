//! End-to-end inversion: S-matrix model → kernel coefficients → translation
//! table → potential, plus the forward/inverse round trip used for validation.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::forward::{scan_smatrix, IntegrationOptions, PotentialSpec};
use crate::kernelgen::{assemble_coefficients, KernelCoefficients, KernelGrid, QuadratureOptions};
use crate::marchenko::{
    build_f_matrix, extract_potential, residual_with_matrix, solve_translation, SolveOptions,
    TranslationTable,
};
use crate::potential::PotentialGrid;
use crate::scatdata::{BoundState, ModelOptions, PhaseShiftSample, SMatrixModel};
use crate::units::Kinematics;

/// An [`Error`] tagged with the pipeline stage that produced it.
#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

fn at<T>(stage: &'static str, r: Result<T, Error>) -> Result<T, StageError> {
    r.map_err(|source| StageError { stage, source })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InversionSettings {
    pub quadrature: QuadratureOptions,
    pub solve: SolveOptions,
    pub kinematics: Kinematics,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub coefficients_s: f64,
    pub solve_s: f64,
    pub extract_s: f64,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub coefficients: KernelCoefficients,
    pub table: TranslationTable,
    pub potential: PotentialGrid,
    /// Max-norm defect of the discretized Marchenko equation.
    pub residual: f64,
    pub timings: StageTimings,
}

pub fn reconstruct(
    model: &SMatrixModel,
    grid: &KernelGrid,
    settings: &InversionSettings,
) -> Result<Reconstruction, StageError> {
    let t0 = Instant::now();
    let coefficients = at(
        "coefficients",
        assemble_coefficients(model, grid, &settings.quadrature),
    )?;
    let t1 = Instant::now();
    let f = build_f_matrix(&coefficients);
    let table = at("solve", solve_translation(&f, grid, &settings.solve))?;
    let residual = residual_with_matrix(&f, &table);
    let t2 = Instant::now();
    let potential = at("extract", extract_potential(&table, &settings.kinematics))?;
    let t3 = Instant::now();
    Ok(Reconstruction {
        coefficients,
        table,
        potential,
        residual,
        timings: StageTimings {
            coefficients_s: (t1 - t0).as_secs_f64(),
            solve_s: (t2 - t1).as_secs_f64(),
            extract_s: (t3 - t2).as_secs_f64(),
        },
    })
}

/// Deviation of a reconstructed potential from the truth on a radial window.
/// Each part is divided by its own scale (e.g. the well depth); a zero
/// scale leaves the deviation absolute, in MeV.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub max_re: f64,
    pub mean_re: f64,
    pub max_im: f64,
    pub mean_im: f64,
    pub points: usize,
}

pub fn compare_potential(
    reconstructed: &PotentialGrid,
    truth: &PotentialSpec,
    kin: &Kinematics,
    window: (f64, f64),
    scale_mev: Complex64,
) -> Deviation {
    let norm = |s: f64| if s == 0.0 { 1.0 } else { s.abs() };
    let (sr, si) = (norm(scale_mev.re), norm(scale_mev.im));
    let tol = 1e-9 * reconstructed.h();
    let mut dev = Deviation::default();
    for (r, v) in reconstructed.points() {
        if r < window.0 - tol || r > window.1 + tol {
            continue;
        }
        let diff = v - truth.eval(r) * kin.hbar2_over_m;
        let (dr, di) = (diff.re.abs() / sr, diff.im.abs() / si);
        dev.max_re = dev.max_re.max(dr);
        dev.max_im = dev.max_im.max(di);
        dev.mean_re += dr;
        dev.mean_im += di;
        dev.points += 1;
    }
    if dev.points > 0 {
        dev.mean_re /= dev.points as f64;
        dev.mean_im /= dev.points as f64;
    }
    dev
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundTripOptions {
    pub q_grid: Vec<f64>,
    pub integration: IntegrationOptions,
    pub model: ModelOptions,
    pub window: (f64, f64),
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub samples: Vec<PhaseShiftSample>,
    pub model: SMatrixModel,
    pub reconstruction: Reconstruction,
    pub deviation: Deviation,
}

/// Forward scan of `truth`, inversion, and comparison on `opts.window`.
pub fn round_trip(
    truth: &PotentialSpec,
    bound_states: &[BoundState],
    grid: &KernelGrid,
    opts: &RoundTripOptions,
    settings: &InversionSettings,
    scale_mev: Complex64,
) -> Result<RoundTrip, StageError> {
    let samples = at(
        "forward",
        scan_smatrix(truth, &opts.q_grid, &opts.integration),
    )?;
    let model = at(
        "model",
        SMatrixModel::build(&samples, bound_states, opts.model),
    )?;
    let reconstruction = reconstruct(&model, grid, settings)?;
    let deviation = compare_potential(
        &reconstruction.potential,
        truth,
        &settings.kinematics,
        opts.window,
        scale_mev,
    );
    Ok(RoundTrip {
        samples,
        model,
        reconstruction,
        deviation,
    })
}

/// `count` evenly spaced momenta on `(0, q_max]`.
pub fn uniform_momenta(q_max: f64, count: usize) -> Vec<f64> {
    (1..=count)
        .map(|i| q_max * i as f64 / count as f64)
        .collect()
}

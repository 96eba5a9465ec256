//! Shared fixtures for the benchmarks.

use marchenko_core::pipeline::uniform_momenta;
use marchenko_core::{
    scan_smatrix, Complex64, IntegrationOptions, KernelGrid, ModelOptions, PotentialSpec,
    SMatrixModel, ScatteringMode,
};

/// Absorptive exponential well, V = (-3 - 0.5i) e^{-1.5 r} fm⁻².
pub fn exp_well() -> PotentialSpec {
    PotentialSpec::exponential(Complex64::new(-3.0, -0.5), 1.5).expect("valid well")
}

pub fn momenta() -> Vec<f64> {
    uniform_momenta(8.0, 160)
}

/// Optical model built from a forward scan of [`exp_well`].
pub fn model() -> SMatrixModel {
    let samples = scan_smatrix(&exp_well(), &momenta(), &IntegrationOptions::default())
        .expect("forward scan");
    let options = ModelOptions {
        mode: ScatteringMode::Optical,
        ..Default::default()
    };
    SMatrixModel::build(&samples, &[], options).expect("model")
}

pub fn grid(h: f64) -> KernelGrid {
    KernelGrid::from_range(h, 4.0).expect("grid")
}

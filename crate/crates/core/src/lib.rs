//! Reconstruction of local s-wave potentials, real or optical, from
//! scattering data through an algebraic form of the Marchenko equation.
//!
//! The pipeline is
//!
//! 1. [`scatdata`]: tabulated δ(q), ρ(q) and bound states → continuous
//!    S-matrix model with asymptotic completion;
//! 2. [`kernelgen`]: Fourier-coefficient integrals of `qY(q)` → kernel
//!    coefficients F₀,ₖ on a step-`h` grid;
//! 3. [`marchenko`]: per-point dense systems for the translation kernel and
//!    finite-difference extraction of `V(r) = -2 dL(r,r)/dr`.
//!
//! [`forward`] integrates the radial equation for a given potential and
//! closes the loop (data generation and round-trip verification).

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod error;
pub mod forward;
pub mod kernelgen;
pub mod marchenko;
pub mod pipeline;
pub mod potential;
pub mod scatdata;
pub mod units;

pub use error::{Error, Result};
pub use forward::{
    integrate_radial, scan_smatrix, IntegrationOptions, PotentialSpec, WaveSolution,
};
pub use kernelgen::{
    assemble_coefficients, fourier_rhs, synth_y_from_coefficients, KernelCoefficients, KernelGrid,
    QuadratureOptions, SpectralInput,
};
pub use marchenko::{
    build_f_matrix, extract_potential, marchenko_residual, solve_translation, zeta, SolveOptions,
    TranslationTable,
};
pub use num_complex::Complex64;
pub use pipeline::{reconstruct, round_trip, InversionSettings, Reconstruction, RoundTripOptions};
pub use potential::PotentialGrid;
pub use scatdata::{
    BoundState, Continuation, InterpolationKind, ModelOptions, PhaseShiftSample, SMatrixModel,
    ScatteringMode, TailFit, TailMode,
};
pub use units::Kinematics;

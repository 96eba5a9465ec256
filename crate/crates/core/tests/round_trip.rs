use marchenko_core::pipeline::{compare_potential, reconstruct, round_trip, uniform_momenta};
use marchenko_core::{
    BoundState, Complex64, Continuation, InversionSettings, KernelGrid, Kinematics, ModelOptions,
    PhaseShiftSample, PotentialSpec, RoundTripOptions, SMatrixModel, ScatteringMode, TailMode,
};

const HBAR2_OVER_M: f64 = 41.47;

fn threshold_dense_momenta(q_max: f64) -> Vec<f64> {
    (1..100)
        .map(|i| 0.005 * i as f64)
        .chain(
            (10..)
                .map(|i| 0.05 * i as f64)
                .take_while(|&q| q <= q_max + 1e-9),
        )
        .collect()
}

fn exp_well_round_trip(
    v0: Complex64,
    q_grid: Vec<f64>,
    model: ModelOptions,
) -> marchenko_core::pipeline::RoundTrip {
    let truth = PotentialSpec::exponential(v0, 1.5).unwrap();
    let grid = KernelGrid::from_range(0.04, 4.0).unwrap();
    let opts = RoundTripOptions {
        q_grid,
        integration: Default::default(),
        model,
        window: (0.1, 3.0),
    };
    round_trip(
        &truth,
        &[],
        &grid,
        &opts,
        &InversionSettings::default(),
        v0 * HBAR2_OVER_M,
    )
    .unwrap()
}

#[test]
fn exponential_well_from_data_up_to_eight() {
    let rt = exp_well_round_trip(
        Complex64::new(-3.0, 0.0),
        uniform_momenta(8.0, 160),
        ModelOptions::default(),
    );
    assert!(rt.deviation.max_re <= 0.05, "{:?}", rt.deviation);
    assert_eq!(rt.deviation.points, 73);
    // reality for unitary input
    let v = rt.reconstruction.potential.values_mev();
    let max_re = v.iter().map(|x| x.re.abs()).fold(0.0, f64::max);
    let max_im = v.iter().map(|x| x.im.abs()).fold(0.0, f64::max);
    assert!(max_im <= 1e-3 * max_re);
    assert!(rt.reconstruction.table.max_condition() < 1e6);
    assert!(rt.reconstruction.residual < 1e-10);
}

#[test]
fn fitted_tail_also_reconstructs_the_well() {
    let rt = exp_well_round_trip(
        Complex64::new(-3.0, 0.0),
        uniform_momenta(8.0, 160),
        ModelOptions {
            tail: TailMode::Fit { q_min_fit: 3.0 },
            ..Default::default()
        },
    );
    assert!(rt.deviation.max_re <= 0.05, "{:?}", rt.deviation);
}

#[test]
fn strongly_absorbing_well_with_reciprocal_continuation() {
    let rt = exp_well_round_trip(
        Complex64::new(-3.0, -1.0),
        threshold_dense_momenta(std::f64::consts::PI / 0.04),
        ModelOptions {
            mode: ScatteringMode::Optical,
            continuation: Continuation::Reciprocal,
            ..Default::default()
        },
    );
    assert!(
        rt.deviation.max_re <= 0.05 && rt.deviation.max_im <= 0.05,
        "{:?}",
        rt.deviation
    );
}

#[test]
fn weakly_absorbing_well_with_linearized_continuation() {
    let rt = exp_well_round_trip(
        Complex64::new(-3.0, -0.1),
        threshold_dense_momenta(std::f64::consts::PI / 0.04),
        ModelOptions {
            mode: ScatteringMode::Optical,
            ..Default::default()
        },
    );
    assert!(
        rt.deviation.max_re <= 0.05 && rt.deviation.max_im <= 0.05,
        "{:?}",
        rt.deviation
    );
}

#[test]
fn no_scattering_gives_no_potential() {
    let samples: Vec<_> = (1..=20)
        .map(|i| PhaseShiftSample::new(0.5 * i as f64, 0.0, 0.0))
        .collect();
    for mode in [ScatteringMode::Unitary, ScatteringMode::Optical] {
        let options = ModelOptions {
            mode,
            ..Default::default()
        };
        let model = SMatrixModel::build(&samples, &[], options).unwrap();
        let grid = KernelGrid::from_range(0.05, 2.0).unwrap();
        let rec = reconstruct(&model, &grid, &InversionSettings::default()).unwrap();
        let worst = rec
            .potential
            .values_mev()
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{worst}");
        assert_eq!(rec.coefficients.consistency_defect(), 0.0);
    }
}

// S ≡ 1 with one bound state is the reflectionless potential
// V = -4κ M² e^{-2κr} / (1 + M² e^{-2κr}/2κ)².
#[test]
fn lone_bound_state_gives_the_reflectionless_well() {
    let (kappa, m2) = (1.5, 2.5);
    let samples: Vec<_> = (1..=20)
        .map(|i| PhaseShiftSample::new(0.5 * i as f64, 0.0, 0.0))
        .collect();
    let model = SMatrixModel::build(
        &samples,
        &[BoundState::new(kappa, m2).unwrap()],
        ModelOptions::default(),
    )
    .unwrap();
    let grid = KernelGrid::from_range(0.02, 4.0).unwrap();
    let rec = reconstruct(&model, &grid, &InversionSettings::default()).unwrap();
    let exact = |r: f64| {
        let e = m2 * (-2.0 * kappa * r).exp();
        -4.0 * kappa * e / (1.0 + e / (2.0 * kappa)).powi(2) * HBAR2_OVER_M
    };
    let depth = (0..400)
        .map(|i| exact(0.01 * i as f64).abs())
        .fold(0.0, f64::max);
    for (r, v) in rec
        .potential
        .points()
        .filter(|(r, _)| (0.1..=3.0).contains(r))
    {
        assert!(
            (v.re - exact(r)).abs() <= 0.05 * depth,
            "r={r}: {} vs {}",
            v.re,
            exact(r)
        );
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let truth = PotentialSpec::exponential(Complex64::new(-3.0, -0.5), 1.5).unwrap();
    let grid = KernelGrid::from_range(0.08, 4.0).unwrap();
    let opts = RoundTripOptions {
        q_grid: uniform_momenta(8.0, 80),
        integration: Default::default(),
        model: ModelOptions {
            mode: ScatteringMode::Optical,
            ..Default::default()
        },
        window: (0.1, 3.0),
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let rt = round_trip(
                &truth,
                &[],
                &grid,
                &opts,
                &InversionSettings::default(),
                Complex64::new(1.0, 1.0),
            )
            .unwrap();
            let mut csv = Vec::new();
            rt.reconstruction
                .potential
                .write_csv(&mut csv, &[])
                .unwrap();
            rt.reconstruction.coefficients.write_csv(&mut csv).unwrap();
            csv
        })
    };
    let single = run(1);
    assert_eq!(single, run(4));
    assert_eq!(single, run(3));
}

#[test]
fn comparison_window_and_scale() {
    let kin = Kinematics::default();
    let truth = PotentialSpec::exponential(Complex64::new(-3.0, 0.0), 1.5).unwrap();
    let values: Vec<Complex64> = (0..=10)
        .map(|p| truth.eval(0.1 * p as f64) * kin.hbar2_over_m)
        .collect();
    let grid = marchenko_core::PotentialGrid::new(0.1, values).unwrap();
    let dev = compare_potential(
        &grid,
        &truth,
        &kin,
        (0.2, 0.5),
        Complex64::new(-124.41, 0.0),
    );
    assert_eq!(dev.points, 4);
    assert!(dev.max_re < 1e-12 && dev.max_im == 0.0);
}

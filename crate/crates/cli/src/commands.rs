use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use marchenko_core::pipeline::{round_trip, StageError, StageTimings};
use marchenko_core::scatdata::{read_bound_states, read_phase_shifts, write_phase_shifts};
use marchenko_core::{
    reconstruct, scan_smatrix, BoundState, KernelGrid, PhaseShiftSample, Reconstruction,
    RoundTripOptions, SMatrixModel, ScatteringMode, TailFit,
};
use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::{Cli, Command};

/// A failure tagged with the stage it came from; printed as `[stage] message`.
#[derive(Debug)]
pub struct CliError {
    pub stage: &'static str,
    pub source: anyhow::Error,
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {:#}", self.stage, self.source)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    /// Configuration errors exit with 2, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        if self.stage == "config" {
            2
        } else {
            1
        }
    }
}

impl From<StageError> for CliError {
    fn from(e: StageError) -> Self {
        Self {
            stage: e.stage,
            source: e.source.into(),
        }
    }
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> Stage<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, CliError> {
        self.map_err(|e| CliError {
            stage,
            source: e.into(),
        })
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.resolve().stage("config")?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if cfg.threads > 0 {
        builder = builder.num_threads(cfg.threads);
    }
    let pool = builder.build().stage("config")?;
    pool.install(|| match cli.command {
        Command::Forward => forward(&cfg),
        Command::Reconstruct => reconstruct_cmd(&cfg),
        Command::Roundtrip => roundtrip(&cfg),
        Command::FitTail => fit_tail(&cfg),
    })
}

fn out_dir(cfg: &RunConfig) -> Result<&Path, CliError> {
    let dir = cfg
        .out
        .as_deref()
        .ok_or_else(|| anyhow!("--out directory is required"))
        .stage("config")?;
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create {}", dir.display()))
        .stage("output")?;
    Ok(dir)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .stage("output")
}

/// Writes to `out` when set, stdout otherwise.
fn with_output(
    out: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            write(&mut w).and_then(|_| w.flush())
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).and_then(|_| lock.flush())
        }
    }
    .context("write failed")
    .stage("output")
}

fn describe_potential(cfg: &RunConfig) -> String {
    match cfg.potential {
        crate::config::PotentialKind::Exponential => format!(
            "potential: exponential v0=({}, {}) fm^-2 a={} fm^-1",
            cfg.v0_re, cfg.v0_im, cfg.a
        ),
        crate::config::PotentialKind::SquareWell => format!(
            "potential: square-well v0=({}, {}) fm^-2 width={} fm",
            cfg.v0_re, cfg.v0_im, cfg.width
        ),
        crate::config::PotentialKind::File => format!(
            "potential: tabulated {}",
            cfg.potential_file
                .as_deref()
                .map(Path::display)
                .map(|d| d.to_string())
                .unwrap_or_default()
        ),
    }
}

fn forward(cfg: &RunConfig) -> Result<(), CliError> {
    let spec = cfg.potential_spec().stage("config")?;
    let momenta = cfg.momenta().stage("config")?;
    let samples = scan_smatrix(&spec, &momenta, &cfg.integration()).stage("forward")?;
    let comments = [describe_potential(cfg)];
    with_output(cfg.out.as_deref(), |w| {
        write_phase_shifts(w, &samples, &comments)
    })
}

struct Inputs {
    samples: Vec<PhaseShiftSample>,
    bound_states: Vec<BoundState>,
    mode: ScatteringMode,
    source: PathBuf,
}

fn load_inputs(cfg: &RunConfig) -> Result<Inputs, CliError> {
    let source = cfg
        .data
        .clone()
        .ok_or_else(|| anyhow!("no phase-shift table given (--data)"))
        .stage("config")?;
    let kin = cfg.kinematics().stage("config")?;
    let file = File::open(&source)
        .with_context(|| format!("cannot open {}", source.display()))
        .stage("input")?;
    let (samples, _, has_rho) = read_phase_shifts(file, &kin)
        .with_context(|| source.display().to_string())
        .stage("input")?;
    let bound_states = match &cfg.bound_states {
        Some(path) => {
            let file = File::open(path)
                .with_context(|| format!("cannot open {}", path.display()))
                .stage("input")?;
            read_bound_states(file)
                .with_context(|| path.display().to_string())
                .stage("input")?
        }
        None => vec![],
    };
    // a rho column of zeros still describes unitary data
    let absorptive = has_rho && samples.iter().any(|s| s.rho != 0.0);
    let mode = match (cfg.mode, absorptive) {
        (None, false) => ScatteringMode::Unitary,
        (None, true) => ScatteringMode::Optical,
        (Some(ScatteringMode::Unitary), true) => {
            return Err(anyhow!(
                "mode = unitary but {} has nonzero rho_deg",
                source.display()
            ))
            .stage("config")
        }
        (Some(ScatteringMode::Optical), _) if !has_rho => {
            return Err(anyhow!(
                "mode = optical but {} has no rho_deg column",
                source.display()
            ))
            .stage("config")
        }
        (Some(mode), _) => mode,
    };
    Ok(Inputs {
        samples,
        bound_states,
        mode,
        source,
    })
}

#[derive(Serialize)]
struct GridReport {
    h: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "R")]
    range: f64,
}

impl From<KernelGrid> for GridReport {
    fn from(g: KernelGrid) -> Self {
        Self {
            h: g.h(),
            n: g.n(),
            range: g.range(),
        }
    }
}

fn reconstruction_report(
    command: &str,
    cfg: &RunConfig,
    mode: ScatteringMode,
    rec: &Reconstruction,
) -> serde_json::Value {
    let conditions = rec.table.conditions();
    let v0 = rec.potential.values_mev()[0];
    let timings: StageTimings = rec.timings;
    let resolved = RunConfig {
        mode: Some(mode),
        ..cfg.clone()
    };
    json!({
        "schema": 1,
        "command": command,
        "config": resolved,
        "mode": mode,
        "grid": GridReport::from(rec.coefficients.grid()),
        "consistency_defect": rec.coefficients.consistency_defect(),
        "quadrature": {
            "panels": rec.coefficients.panels(),
            "error_estimate": rec.coefficients.quadrature_error(),
        },
        "residual": rec.residual,
        "condition": {
            "max": rec.table.max_condition(),
            "per_point": conditions,
        },
        "v0_mev": [v0.re, v0.im],
        "timings_s": timings,
    })
}

fn potential_comments(rec: &Reconstruction, mode: ScatteringMode, source: &str) -> Vec<String> {
    let grid = rec.coefficients.grid();
    vec![
        format!("source: {source}"),
        format!("mode: {mode}"),
        format!("h = {} fm, N = {}", grid.h(), grid.n()),
        format!(
            "consistency_defect = {:e}",
            rec.coefficients.consistency_defect()
        ),
    ]
}

fn write_reconstruction(
    dir: &Path,
    rec: &Reconstruction,
    comments: &[String],
    report: &serde_json::Value,
) -> Result<(), CliError> {
    let mut w = create(&dir.join("potential.csv"))?;
    rec.potential
        .write_csv(&mut w, comments)
        .and_then(|_| w.flush())
        .stage("output")?;
    let mut w = create(&dir.join("coefficients.csv"))?;
    rec.coefficients
        .write_csv(&mut w)
        .and_then(|_| w.flush())
        .stage("output")?;
    write_json(&dir.join("report.json"), report)
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).stage("output")?;
    writeln!(w).and_then(|_| w.flush()).stage("output")
}

fn reconstruct_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid().stage("config")?;
    let settings = cfg.settings().stage("config")?;
    let dir = out_dir(cfg)?;
    let inputs = load_inputs(cfg)?;
    let model = SMatrixModel::build(
        &inputs.samples,
        &inputs.bound_states,
        cfg.model_options(inputs.mode),
    )
    .stage("model")?;
    let rec = reconstruct(&model, &grid, &settings)?;
    let source = inputs.source.display().to_string();
    let report = reconstruction_report("reconstruct", cfg, inputs.mode, &rec);
    write_reconstruction(
        dir,
        &rec,
        &potential_comments(&rec, inputs.mode, &source),
        &report,
    )
}

fn roundtrip(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid().stage("config")?;
    let settings = cfg.settings().stage("config")?;
    let spec = cfg.potential_spec().stage("config")?;
    let scale = cfg.depth_scale().stage("config")?;
    let dir = out_dir(cfg)?;
    let bound_states = match &cfg.bound_states {
        Some(_) => load_bound_states(cfg)?,
        None => vec![],
    };
    let mode = cfg.mode.unwrap_or(if spec.is_real() {
        ScatteringMode::Unitary
    } else {
        ScatteringMode::Optical
    });
    let opts = RoundTripOptions {
        q_grid: cfg.momenta().stage("config")?,
        integration: cfg.integration(),
        model: cfg.model_options(mode),
        window: (cfg.window_min, cfg.window_max),
    };
    let rt = round_trip(&spec, &bound_states, &grid, &opts, &settings, scale)?;

    let mut w = create(&dir.join("data.csv"))?;
    write_phase_shifts(&mut w, &rt.samples, &[describe_potential(cfg)])
        .and_then(|_| w.flush())
        .stage("output")?;
    let mut report = reconstruction_report("roundtrip", cfg, mode, &rt.reconstruction);
    report["deviation"] = json!({
        "window": [cfg.window_min, cfg.window_max],
        "scale_mev": [scale.re, scale.im],
        "max_re": rt.deviation.max_re,
        "mean_re": rt.deviation.mean_re,
        "max_im": rt.deviation.max_im,
        "mean_im": rt.deviation.mean_im,
        "points": rt.deviation.points,
    });
    let comments = potential_comments(&rt.reconstruction, mode, &describe_potential(cfg));
    write_reconstruction(dir, &rt.reconstruction, &comments, &report)?;
    println!(
        "max |dRe V|/|V0| = {:.4}, max |dIm V|/|V0| = {:.4} over {} points",
        rt.deviation.max_re, rt.deviation.max_im, rt.deviation.points
    );
    Ok(())
}

fn load_bound_states(cfg: &RunConfig) -> Result<Vec<BoundState>, CliError> {
    let path = cfg.bound_states.as_ref().expect("checked by caller");
    let file = File::open(path)
        .with_context(|| format!("cannot open {}", path.display()))
        .stage("input")?;
    read_bound_states(file)
        .with_context(|| path.display().to_string())
        .stage("input")
}

#[derive(Serialize)]
struct TailReport {
    schema: u32,
    source: String,
    q_min_fit: f64,
    /// Radians.
    delta: TailFit,
    rho: Option<TailFit>,
}

fn fit_tail(cfg: &RunConfig) -> Result<(), CliError> {
    let inputs = load_inputs(cfg)?;
    let q: Vec<f64> = inputs.samples.iter().map(|s| s.q).collect();
    let delta: Vec<f64> = inputs.samples.iter().map(|s| s.delta).collect();
    let delta = TailFit::fit(&q, &delta, cfg.q_min_fit).stage("fit")?;
    let rho = match inputs.mode {
        ScatteringMode::Optical => {
            let rho: Vec<f64> = inputs.samples.iter().map(|s| s.rho).collect();
            Some(TailFit::fit(&q, &rho, cfg.q_min_fit).stage("fit")?)
        }
        ScatteringMode::Unitary => None,
    };
    let report = TailReport {
        schema: 1,
        source: inputs.source.display().to_string(),
        q_min_fit: cfg.q_min_fit,
        delta,
        rho,
    };
    with_output(cfg.out.as_deref(), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        writeln!(w)
    })
}

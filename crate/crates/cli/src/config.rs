//! Flat `key = value` run configuration.
//!
//! Resolution order is defaults, then the `--config` file, then command-line
//! flags. Every key accepted in the file is also a flag of the same name.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use marchenko_core::{
    Complex64, Continuation, IntegrationOptions, InterpolationKind, InversionSettings, KernelGrid,
    Kinematics, ModelOptions, PotentialGrid, PotentialSpec, QuadratureOptions, ScatteringMode,
    SolveOptions, TailMode,
};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    Asymptotic,
    Fit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    Exponential,
    SquareWell,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub h: f64,
    #[serde(rename = "R")]
    pub range: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// `None` until resolved against the input data.
    pub mode: Option<ScatteringMode>,
    pub tail: TailKind,
    pub q_min_fit: f64,
    pub interpolation: InterpolationKind,
    pub continuation: Continuation,

    pub data: Option<PathBuf>,
    pub bound_states: Option<PathBuf>,
    pub out: Option<PathBuf>,

    pub potential: PotentialKind,
    pub v0_re: f64,
    pub v0_im: f64,
    pub a: f64,
    pub width: f64,
    pub potential_file: Option<PathBuf>,

    pub q_min: Option<f64>,
    pub q_max: f64,
    pub q_step: f64,
    pub step: Option<f64>,
    pub r_match: Option<f64>,

    pub panels_per_index: usize,
    pub rel_tol: f64,
    pub max_doublings: usize,
    pub max_condition: f64,

    pub window_min: f64,
    pub window_max: f64,

    pub nucleon_mass: f64,
    pub hbarc: f64,
    pub hbar2_over_m: f64,

    /// Worker threads; 0 lets the pool pick.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let quad = QuadratureOptions::default();
        let kin = Kinematics::default();
        Self {
            h: 0.04,
            range: None,
            n: None,
            mode: None,
            tail: TailKind::Asymptotic,
            q_min_fit: 3.0,
            interpolation: InterpolationKind::default(),
            continuation: Continuation::default(),
            data: None,
            bound_states: None,
            out: None,
            potential: PotentialKind::Exponential,
            v0_re: -3.0,
            v0_im: 0.0,
            a: 1.5,
            width: 1.0,
            potential_file: None,
            q_min: None,
            q_max: 8.0,
            q_step: 0.05,
            step: None,
            r_match: None,
            panels_per_index: quad.panels_per_index,
            rel_tol: quad.rel_tol,
            max_doublings: quad.max_doublings,
            max_condition: SolveOptions::default().max_condition,
            window_min: 0.1,
            window_max: 3.0,
            nucleon_mass: kin.nucleon_mass,
            hbarc: kin.hbarc,
            hbar2_over_m: kin.hbar2_over_m,
            threads: 0,
        }
    }
}

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| anyhow!("{key}: cannot parse '{value}': {e}"))
}

fn optional<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if value.is_empty() || value == "none" {
        Ok(None)
    } else {
        number(key, value).map(Some)
    }
}

fn path(value: &str) -> Option<PathBuf> {
    (!value.is_empty()).then(|| PathBuf::from(value))
}

impl RunConfig {
    pub const KEYS: &'static [&'static str] = &[
        "h",
        "R",
        "N",
        "mode",
        "tail",
        "q_min_fit",
        "interpolation",
        "continuation",
        "data",
        "bound_states",
        "out",
        "potential",
        "v0_re",
        "v0_im",
        "a",
        "width",
        "potential_file",
        "q_min",
        "q_max",
        "q_step",
        "step",
        "r_match",
        "panels_per_index",
        "rel_tol",
        "max_doublings",
        "max_condition",
        "window_min",
        "window_max",
        "nucleon_mass",
        "hbarc",
        "hbar2_over_m",
        "threads",
    ];

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "h" => self.h = number(key, value)?,
            "R" => self.range = optional(key, value)?,
            "N" => self.n = optional(key, value)?,
            "mode" => {
                self.mode = match value {
                    "" | "auto" => None,
                    v => Some(v.parse().map_err(|e| anyhow!("{e}"))?),
                }
            }
            "tail" => {
                self.tail = match value {
                    "asymptotic" => TailKind::Asymptotic,
                    "fit" => TailKind::Fit,
                    v => bail!("tail: unknown value '{v}' (asymptotic|fit)"),
                }
            }
            "q_min_fit" => self.q_min_fit = number(key, value)?,
            "interpolation" => self.interpolation = value.parse().map_err(|e| anyhow!("{e}"))?,
            "continuation" => self.continuation = value.parse().map_err(|e| anyhow!("{e}"))?,
            "data" => self.data = path(value),
            "bound_states" => self.bound_states = path(value),
            "out" => self.out = path(value),
            "potential" => {
                self.potential = match value {
                    "exponential" => PotentialKind::Exponential,
                    "square-well" => PotentialKind::SquareWell,
                    "file" => PotentialKind::File,
                    v => bail!("potential: unknown value '{v}' (exponential|square-well|file)"),
                }
            }
            "v0_re" => self.v0_re = number(key, value)?,
            "v0_im" => self.v0_im = number(key, value)?,
            "a" => self.a = number(key, value)?,
            "width" => self.width = number(key, value)?,
            "potential_file" => self.potential_file = path(value),
            "q_min" => self.q_min = optional(key, value)?,
            "q_max" => self.q_max = number(key, value)?,
            "q_step" => self.q_step = number(key, value)?,
            "step" => self.step = optional(key, value)?,
            "r_match" => self.r_match = optional(key, value)?,
            "panels_per_index" => self.panels_per_index = number(key, value)?,
            "rel_tol" => self.rel_tol = number(key, value)?,
            "max_doublings" => self.max_doublings = number(key, value)?,
            "max_condition" => self.max_condition = number(key, value)?,
            "window_min" => self.window_min = number(key, value)?,
            "window_max" => self.window_max = number(key, value)?,
            "nucleon_mass" => self.nucleon_mass = number(key, value)?,
            "hbarc" => self.hbarc = number(key, value)?,
            "hbar2_over_m" => self.hbar2_over_m = number(key, value)?,
            "threads" => self.threads = number(key, value)?,
            other => bail!("unknown configuration key '{other}'"),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, file: &Path) -> Result<()> {
        let text = std::fs::read_to_string(file)
            .with_context(|| format!("cannot read config {}", file.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                anyhow!("{}:{}: expected key = value", file.display(), lineno + 1)
            })?;
            self.set(key.trim(), value)
                .with_context(|| format!("{}:{}", file.display(), lineno + 1))?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<KernelGrid> {
        let grid = match (self.range, self.n) {
            (Some(r), Some(n)) => {
                let g = KernelGrid::new(self.h, n)?;
                if (g.range() - r).abs() > 1e-9 * r.max(1.0) {
                    bail!("R = {r} disagrees with N·h = {}", g.range());
                }
                g
            }
            (None, Some(n)) => KernelGrid::new(self.h, n)?,
            (Some(r), None) => KernelGrid::from_range(self.h, r)?,
            (None, None) => KernelGrid::from_range(self.h, 4.0)?,
        };
        Ok(grid)
    }

    pub fn kinematics(&self) -> Result<Kinematics> {
        Ok(Kinematics::new(
            self.nucleon_mass,
            self.hbarc,
            self.hbar2_over_m,
        )?)
    }

    pub fn model_options(&self, mode: ScatteringMode) -> ModelOptions {
        ModelOptions {
            mode,
            tail: match self.tail {
                TailKind::Asymptotic => TailMode::Asymptotic,
                TailKind::Fit => TailMode::Fit {
                    q_min_fit: self.q_min_fit,
                },
            },
            interpolation: self.interpolation,
            continuation: self.continuation,
        }
    }

    pub fn settings(&self) -> Result<InversionSettings> {
        Ok(InversionSettings {
            quadrature: QuadratureOptions {
                panels_per_index: self.panels_per_index,
                rel_tol: self.rel_tol,
                max_doublings: self.max_doublings,
            },
            solve: SolveOptions {
                max_condition: self.max_condition,
            },
            kinematics: self.kinematics()?,
        })
    }

    pub fn integration(&self) -> IntegrationOptions {
        IntegrationOptions {
            step: self.step,
            r_match: self.r_match,
            store_wave: false,
        }
    }

    pub fn momenta(&self) -> Result<Vec<f64>> {
        if !(self.q_step > 0.0 && self.q_max > 0.0) {
            bail!("q_step and q_max must be positive");
        }
        let start = self.q_min.unwrap_or(self.q_step);
        if !(start > 0.0 && start <= self.q_max) {
            bail!("q_min must lie in (0, q_max]");
        }
        let count = ((self.q_max - start) / self.q_step + 1e-9).floor() as usize;
        Ok((0..=count)
            .map(|i| start + i as f64 * self.q_step)
            .collect())
    }

    pub fn potential_spec(&self) -> Result<PotentialSpec> {
        let v0 = Complex64::new(self.v0_re, self.v0_im);
        Ok(match self.potential {
            PotentialKind::Exponential => PotentialSpec::exponential(v0, self.a)?,
            PotentialKind::SquareWell => PotentialSpec::square_well(v0, self.width)?,
            PotentialKind::File => {
                let file = self
                    .potential_file
                    .as_ref()
                    .ok_or_else(|| anyhow!("potential = file needs potential_file"))?;
                let reader = std::fs::File::open(file)
                    .with_context(|| format!("cannot open {}", file.display()))?;
                let grid = PotentialGrid::read_csv(reader)
                    .with_context(|| format!("bad potential file {}", file.display()))?;
                PotentialSpec::tabulated(&grid, &self.kinematics()?)
            }
        })
    }

    /// Depth used to normalise round-trip deviations, in MeV.
    pub fn depth_scale(&self) -> Result<Complex64> {
        let kin = self.kinematics()?;
        Ok(match self.potential {
            PotentialKind::File => {
                let spec = self.potential_spec()?;
                let max = |f: fn(Complex64) -> f64| {
                    (0..=4000)
                        .map(|i| f(spec.eval(0.001 * i as f64)).abs())
                        .fold(0.0, f64::max)
                };
                Complex64::new(max(|v| v.re), max(|v| v.im)) * kin.hbar2_over_m
            }
            _ => Complex64::new(self.v0_re, self.v0_im) * kin.hbar2_over_m,
        })
    }
}

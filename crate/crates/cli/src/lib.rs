//! `marchenko` command-line front end.

pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run, CliError};
pub use config::RunConfig;

#[derive(Debug, Parser)]
#[command(
    name = "marchenko",
    version,
    about = "Potential reconstruction from s-wave scattering data"
)]
pub struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(flatten)]
    pub overrides: Overrides,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the radial equation for a model potential and write δ, ρ.
    Forward,
    /// Reconstruct V(r) from a phase-shift table.
    Reconstruct,
    /// Forward scan, reconstruction and comparison against the input potential.
    Roundtrip,
    /// Fit c1/q + c2/q² + c3/q³ to the high-momentum end of a table.
    FitTail,
}

macro_rules! overrides {
    ($($field:ident => $key:literal),* $(,)?) => {
        /// Every configuration key, settable from the command line.
        #[derive(Debug, Default, Args)]
        pub struct Overrides {
            $(
                #[arg(long = $key, global = true, value_name = "VALUE", allow_hyphen_values = true)]
                pub $field: Option<String>,
            )*
        }

        impl Overrides {
            pub fn pairs(&self) -> Vec<(&'static str, &str)> {
                let mut out = Vec::new();
                $(
                    if let Some(v) = &self.$field {
                        out.push(($key, v.as_str()));
                    }
                )*
                out
            }
        }
    };
}

overrides! {
    h => "h", range => "R", n => "N", mode => "mode", tail => "tail",
    q_min_fit => "q_min_fit", interpolation => "interpolation", continuation => "continuation",
    data => "data", bound_states => "bound_states", out => "out", potential => "potential",
    v0_re => "v0_re", v0_im => "v0_im", a => "a", width => "width",
    potential_file => "potential_file", q_min => "q_min", q_max => "q_max", q_step => "q_step",
    step => "step", r_match => "r_match", panels_per_index => "panels_per_index",
    rel_tol => "rel_tol", max_doublings => "max_doublings", max_condition => "max_condition",
    window_min => "window_min", window_max => "window_max", nucleon_mass => "nucleon_mass",
    hbarc => "hbarc", hbar2_over_m => "hbar2_over_m", threads => "threads",
}

impl Cli {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(file) = &self.config {
            cfg.apply_file(file)?;
        }
        for (key, value) in self.overrides.pairs() {
            cfg.set(key, value)?;
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_config_key_has_a_flag() {
        let mut args = vec!["marchenko".to_string()];
        for key in RunConfig::KEYS {
            args.push(format!("--{key}"));
            args.push("x".into());
        }
        args.push("forward".into());
        let cli = Cli::try_parse_from(args).unwrap();
        let keys: Vec<_> = cli.overrides.pairs().into_iter().map(|(k, _)| k).collect();
        assert_eq!(keys, RunConfig::KEYS);
    }

    #[test]
    fn flags_override_the_file() {
        let dir = tempfile_dir();
        let file = dir.join("c.cfg");
        std::fs::write(&file, "h = 0.1\nR = 2\n").unwrap();
        let cli = Cli::try_parse_from([
            "marchenko",
            "reconstruct",
            "--config",
            file.to_str().unwrap(),
            "--h",
            "0.05",
        ])
        .unwrap();
        let cfg = cli.resolve().unwrap();
        assert_eq!(cfg.grid().unwrap().n(), 40);
    }

    fn tempfile_dir() -> PathBuf {
        let dir = std::env::temp_dir().join(format!("marchenko-cli-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }
}

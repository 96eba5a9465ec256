//! Physical constants and unit conversions for the two-nucleon system.
//!
//! All internal arithmetic uses fm⁻¹ for momenta and fm⁻² for potentials.
//! The conversion factor between fm⁻² and MeV is ħ²/M (the reduced mass of
//! two equal-mass nucleons is M/2, so ħ²/2μ = ħ²/M).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NUCLEON_MASS_MEV: f64 = 938.919;
pub const HBARC_MEV_FM: f64 = 197.327;
pub const HBAR2_OVER_M_MEV_FM2: f64 = 41.47;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub nucleon_mass: f64,
    pub hbarc: f64,
    pub hbar2_over_m: f64,
}

impl Default for Kinematics {
    fn default() -> Self {
        Self {
            nucleon_mass: NUCLEON_MASS_MEV,
            hbarc: HBARC_MEV_FM,
            hbar2_over_m: HBAR2_OVER_M_MEV_FM2,
        }
    }
}

impl Kinematics {
    /// Builds a constant set, rejecting inconsistent ħ²/M values (0.1 % slack).
    pub fn new(nucleon_mass: f64, hbarc: f64, hbar2_over_m: f64) -> Result<Self> {
        if !(nucleon_mass > 0.0 && hbarc > 0.0 && hbar2_over_m > 0.0) {
            return Err(Error::domain("kinematic constants must be positive"));
        }
        let implied = hbarc * hbarc / nucleon_mass;
        if ((hbar2_over_m - implied) / implied).abs() > 1e-3 {
            return Err(Error::domain(format!(
                "hbar2_over_m={hbar2_over_m} inconsistent with hbarc^2/M={implied:.4}"
            )));
        }
        Ok(Self {
            nucleon_mass,
            hbarc,
            hbar2_over_m,
        })
    }

    pub fn fm2_to_mev(&self, v: f64) -> f64 {
        v * self.hbar2_over_m
    }

    pub fn mev_to_fm2(&self, v: f64) -> f64 {
        v / self.hbar2_over_m
    }

    /// CM momentum (fm⁻¹) for lab kinetic energy `t_lab` (MeV) of an
    /// equal-mass pair: p² = M·T_lab/2, identical relativistically and not.
    pub fn tlab_to_momentum(&self, t_lab: f64) -> Result<f64> {
        if !(t_lab >= 0.0) {
            return Err(Error::domain(format!("T_lab must be >= 0, got {t_lab}")));
        }
        Ok((self.nucleon_mass * t_lab / 2.0).sqrt() / self.hbarc)
    }

    pub fn momentum_to_tlab(&self, q: f64) -> Result<f64> {
        if !(q >= 0.0) {
            return Err(Error::domain(format!("momentum must be >= 0, got {q}")));
        }
        let p = q * self.hbarc;
        Ok(2.0 * p * p / self.nucleon_mass)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tlab_examples() {
        let kin = Kinematics::default();
        assert_eq!(kin.tlab_to_momentum(0.0).unwrap(), 0.0);
        let q = kin.tlab_to_momentum(3000.0).unwrap();
        let expected = (938.919_f64 * 1500.0).sqrt() / 197.327;
        assert!((q - expected).abs() < 1e-12);
        assert!((q - 6.014).abs() < 1e-3);
        let t = kin.momentum_to_tlab(3.0).unwrap();
        assert!((t - 746.0).abs() < 1.0, "{t}");
    }

    #[test]
    fn negative_energy_rejected() {
        let kin = Kinematics::default();
        assert!(matches!(kin.tlab_to_momentum(-1.0), Err(Error::Domain(_))));
        assert!(kin.tlab_to_momentum(f64::NAN).is_err());
    }

    #[test]
    fn caption_identity() {
        let kin = Kinematics::default();
        let implied = HBARC_MEV_FM * HBARC_MEV_FM / NUCLEON_MASS_MEV;
        assert!(((kin.hbar2_over_m - implied) / implied).abs() < 1e-3);
        assert!((kin.fm2_to_mev(-3.0) + 124.5).abs() < 0.2);
        assert!(Kinematics::new(938.919, 197.327, 45.0).is_err());
    }

    proptest::proptest! {
        #[test]
        fn tlab_roundtrip(t in 0.0f64..5000.0, dt in 1e-3f64..100.0) {
            let kin = Kinematics::default();
            let q = kin.tlab_to_momentum(t).unwrap();
            proptest::prop_assert!(kin.tlab_to_momentum(t + dt).unwrap() > q);
            let back = kin.momentum_to_tlab(q).unwrap();
            proptest::prop_assert!((back - t).abs() <= 1e-9 * t.max(1e-300));
        }
    }
}

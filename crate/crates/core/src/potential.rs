//! Potentials sampled on the radial grid and their CSV form.

use std::io::{Read, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::units::Kinematics;

/// Complex potential values `V(r_p)` in MeV on `r_p = p·h`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    h: f64,
    values_mev: Vec<Complex64>,
}

impl PotentialGrid {
    pub fn new(h: f64, values_mev: Vec<Complex64>) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::domain("potential grid step must be positive"));
        }
        if values_mev.len() < 2 {
            return Err(Error::input("potential grid needs at least two points"));
        }
        Ok(Self { h, values_mev })
    }

    pub fn from_fm2(h: f64, values_fm2: &[Complex64], kin: &Kinematics) -> Result<Self> {
        Self::new(h, values_fm2.iter().map(|v| v * kin.hbar2_over_m).collect())
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.values_mev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values_mev.is_empty()
    }

    pub fn range(&self) -> f64 {
        self.h * (self.len() - 1) as f64
    }

    pub fn radius(&self, p: usize) -> f64 {
        p as f64 * self.h
    }

    pub fn values_mev(&self) -> &[Complex64] {
        &self.values_mev
    }

    pub fn values_fm2(&self, kin: &Kinematics) -> Vec<Complex64> {
        self.values_mev
            .iter()
            .map(|v| v / kin.hbar2_over_m)
            .collect()
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.values_mev
            .iter()
            .enumerate()
            .map(move |(p, v)| (p as f64 * self.h, *v))
    }

    /// Linear interpolation in MeV; zero beyond the last grid point.
    pub fn interpolate(&self, r: f64) -> Complex64 {
        if r < 0.0 || r > self.range() {
            return Complex64::new(0.0, 0.0);
        }
        let x = r / self.h;
        let i = (x.floor() as usize).min(self.len() - 2);
        let t = x - i as f64;
        self.values_mev[i] * (1.0 - t) + self.values_mev[i + 1] * t
    }

    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> std::io::Result<()> {
        for c in comments {
            writeln!(out, "# {c}")?;
        }
        writeln!(out, "r_fm,ReV_MeV,ImV_MeV")?;
        for (r, v) in self.points() {
            writeln!(out, "{},{:e},{:e}", r, v.re, v.im)?;
        }
        Ok(())
    }

    /// Reads `r_fm,ReV_MeV[,ImV_MeV]` on a uniform grid starting at r = 0.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(input);
        let headers = rdr
            .headers()
            .map_err(|e| Error::input(format!("bad header: {e}")))?
            .clone();
        let find = |name: &str| headers.iter().position(|h| h == name);
        let r_idx = find("r_fm").ok_or_else(|| Error::input("missing column r_fm"))?;
        let re_idx = find("ReV_MeV").ok_or_else(|| Error::input("missing column ReV_MeV"))?;
        let im_idx = find("ImV_MeV");
        let mut r = Vec::new();
        let mut v = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| Error::input(e.to_string()))?;
            let get = |i: usize| -> Result<f64> {
                rec.get(i)
                    .unwrap_or("")
                    .parse()
                    .map_err(|_| Error::input(format!("unparsable potential row {rec:?}")))
            };
            r.push(get(r_idx)?);
            v.push(Complex64::new(
                get(re_idx)?,
                im_idx.map(get).transpose()?.unwrap_or(0.0),
            ));
        }
        if r.len() < 2 {
            return Err(Error::input("potential file needs at least two rows"));
        }
        let h = r[1] - r[0];
        if r[0].abs() > 1e-12 || !(h > 0.0) {
            return Err(Error::input(
                "potential grid must start at r=0 and increase",
            ));
        }
        for (p, ri) in r.iter().enumerate() {
            if (ri - p as f64 * h).abs() > 1e-6 * h {
                return Err(Error::input(format!(
                    "potential grid is not uniform at r={ri}"
                )));
            }
        }
        Self::new(h, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_and_interpolation() {
        let g = PotentialGrid::new(
            0.5,
            vec![
                Complex64::new(-10.0, -2.0),
                Complex64::new(-5.0, -1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let mut buf = Vec::new();
        g.write_csv(&mut buf, &["h=0.5".into()]).unwrap();
        let back = PotentialGrid::read_csv(buf.as_slice()).unwrap();
        assert_eq!(back, g);
        assert_eq!(g.interpolate(0.25), Complex64::new(-7.5, -1.5));
        assert_eq!(g.interpolate(1.0), Complex64::new(0.0, 0.0));
        assert_eq!(g.interpolate(1.5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn rejects_nonuniform_grid() {
        let text = "r_fm,ReV_MeV\n0,1\n0.1,2\n0.3,3\n";
        assert!(PotentialGrid::read_csv(text.as_bytes()).is_err());
        let text = "r_fm,ReV_MeV\n0,1\n";
        assert!(PotentialGrid::read_csv(text.as_bytes()).is_err());
    }
}

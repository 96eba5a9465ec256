//! CSV readers and writers for phase-shift tables and bound-state constants.
//!
//! Files carry degrees and either `Tlab_MeV` or `q_invfm`; everything is
//! converted to radians and fm⁻¹ on load.

use std::io::{Read, Write};

use super::{BoundState, PhaseShiftSample};
use crate::error::{Error, Result};
use crate::units::Kinematics;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumColumn {
    Tlab,
    Q,
}

fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(input)
}

fn column(headers: &csv::StringRecord, name: &str) -> Option<usize> {
    headers.iter().position(|h| h == name)
}

fn parse_field(record: &csv::StringRecord, idx: usize, name: &str, line: u64) -> Result<f64> {
    let raw = record.get(idx).unwrap_or("");
    raw.parse::<f64>()
        .map_err(|_| Error::input(format!("line {line}: cannot parse {name}='{raw}'")))
}

/// Parses a phase-shift table. Returns the samples and which momentum column was found.
pub fn read_phase_shifts<R: Read>(
    input: R,
    kin: &Kinematics,
) -> Result<(Vec<PhaseShiftSample>, MomentumColumn, bool)> {
    let mut rdr = csv_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::input(format!("bad header: {e}")))?
        .clone();
    let (q_idx, kind) = match (column(&headers, "q_invfm"), column(&headers, "Tlab_MeV")) {
        (Some(i), _) => (i, MomentumColumn::Q),
        (None, Some(i)) => (i, MomentumColumn::Tlab),
        (None, None) => return Err(Error::input("missing column q_invfm or Tlab_MeV")),
    };
    let delta_idx =
        column(&headers, "delta_deg").ok_or_else(|| Error::input("missing column delta_deg"))?;
    let rho_idx = column(&headers, "rho_deg");

    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::input(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let x = parse_field(&record, q_idx, "momentum", line)?;
        let q = match kind {
            MomentumColumn::Q => {
                if !(x >= 0.0) {
                    return Err(Error::input(format!("line {line}: negative momentum {x}")));
                }
                x
            }
            MomentumColumn::Tlab => kin.tlab_to_momentum(x)?,
        };
        let delta = parse_field(&record, delta_idx, "delta_deg", line)?.to_radians();
        let rho = match rho_idx {
            Some(i) => parse_field(&record, i, "rho_deg", line)?.to_radians(),
            None => 0.0,
        };
        out.push(PhaseShiftSample::new(q, delta, rho));
    }
    Ok((out, kind, rho_idx.is_some()))
}

pub fn read_bound_states<R: Read>(input: R) -> Result<Vec<BoundState>> {
    let mut rdr = csv_reader(input);
    let headers = rdr
        .headers()
        .map_err(|e| Error::input(format!("bad header: {e}")))?
        .clone();
    let k_idx = column(&headers, "kappa_invfm")
        .ok_or_else(|| Error::input("missing column kappa_invfm"))?;
    let m_idx =
        column(&headers, "M2_invfm").ok_or_else(|| Error::input("missing column M2_invfm"))?;
    rdr.records()
        .map(|record| {
            let record = record.map_err(|e| Error::input(e.to_string()))?;
            let line = record.position().map_or(0, |p| p.line());
            BoundState::new(
                parse_field(&record, k_idx, "kappa_invfm", line)?,
                parse_field(&record, m_idx, "M2_invfm", line)?,
            )
        })
        .collect()
}

/// Writes `q_invfm,delta_deg,rho_deg` rows, the format `read_phase_shifts` accepts.
pub fn write_phase_shifts<W: Write>(
    mut out: W,
    samples: &[PhaseShiftSample],
    comments: &[String],
) -> std::io::Result<()> {
    for c in comments {
        writeln!(out, "# {c}")?;
    }
    writeln!(out, "q_invfm,delta_deg,rho_deg")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{}",
            s.q,
            s.delta.to_degrees(),
            s.rho.to_degrees()
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_tlab_table_with_comments() {
        let text =
            "# 1S0 data\nTlab_MeV, delta_deg, rho_deg\n0,0,0\n# mid comment\n3000,-10.5,20\n";
        let kin = Kinematics::default();
        let (s, kind, has_rho) = read_phase_shifts(text.as_bytes(), &kin).unwrap();
        assert_eq!(kind, MomentumColumn::Tlab);
        assert!(has_rho);
        assert_eq!(s.len(), 2);
        assert!((s[1].q - 6.014).abs() < 1e-3);
        assert!((s[1].delta - (-10.5f64).to_radians()).abs() < 1e-15);
        assert!((s[1].rho - 20f64.to_radians()).abs() < 1e-15);
    }

    #[test]
    fn writer_output_reads_back() {
        let samples = vec![
            PhaseShiftSample::new(0.5, 0.3, 0.0),
            PhaseShiftSample::new(1.0, 0.2, 0.05),
        ];
        let mut buf = Vec::new();
        write_phase_shifts(&mut buf, &samples, &["test".into()]).unwrap();
        let (back, kind, _) = read_phase_shifts(buf.as_slice(), &Kinematics::default()).unwrap();
        assert_eq!(kind, MomentumColumn::Q);
        for (a, b) in samples.iter().zip(&back) {
            assert_eq!(a.q, b.q);
            assert!((a.delta - b.delta).abs() < 1e-15 && (a.rho - b.rho).abs() < 1e-15);
        }
    }

    #[test]
    fn missing_columns_and_garbage() {
        let kin = Kinematics::default();
        assert!(read_phase_shifts("x,delta_deg\n1,2\n".as_bytes(), &kin).is_err());
        assert!(read_phase_shifts("q_invfm,delta_deg\n1,abc\n".as_bytes(), &kin).is_err());
        assert!(read_phase_shifts("Tlab_MeV,delta_deg\n-5,1\n".as_bytes(), &kin).is_err());
    }

    #[test]
    fn bound_state_file() {
        let bs = read_bound_states("kappa_invfm,M2_invfm\n0.232,0.5\n".as_bytes()).unwrap();
        assert_eq!(bs, vec![BoundState::new(0.232, 0.5).unwrap()]);
        assert!(read_bound_states("kappa_invfm,M2_invfm\n-1,0.5\n".as_bytes()).is_err());
    }
}

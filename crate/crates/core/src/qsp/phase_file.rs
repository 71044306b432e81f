//! Plain-text phase files.
//!
//! ```text
//! n tau eps_coeff
//! e0: 8 floats, (re, im) pairs in row-major order
//! one line of 8 floats per projector, P_1 first
//! ```
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::{Mat2, QspError, QspPhaseSet};

/// First line of a phase file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseFileHeader {
    pub n: usize,
    pub tau: f64,
    pub eps_coeff: f64,
}

fn format_matrix(m: &Mat2) -> String {
    let mut parts = Vec::with_capacity(8);
    for r in 0..2 {
        for c in 0..2 {
            parts.push(format!("{:.16e}", m[(r, c)].re));
            parts.push(format!("{:.16e}", m[(r, c)].im));
        }
    }
    parts.join(" ")
}

pub fn format_phase_set(header: &PhaseFileHeader, phases: &QspPhaseSet) -> String {
    let mut out = format!(
        "{} {:.16e} {:.16e}\n",
        header.n, header.tau, header.eps_coeff
    );
    out.push_str(&format_matrix(&phases.e0));
    out.push('\n');
    for p in &phases.projectors {
        out.push_str(&format_matrix(p));
        out.push('\n');
    }
    out
}

fn format_error(line: usize, message: impl Into<String>) -> QspError {
    QspError::PhaseFormat {
        line,
        message: message.into(),
    }
}

fn parse_matrix(line_no: usize, line: &str) -> Result<Mat2, QspError> {
    let values = line
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|e| format_error(line_no, format!("bad float {tok:?}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != 8 {
        return Err(format_error(
            line_no,
            format!("expected 8 floats, found {}", values.len()),
        ));
    }
    let c = |k: usize| Complex64::new(values[2 * k], values[2 * k + 1]);
    Ok(Mat2::new(c(0), c(1), c(2), c(3)))
}

pub fn parse_phase_set(text: &str) -> Result<(PhaseFileHeader, QspPhaseSet), QspError> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, head) = lines
        .next()
        .ok_or_else(|| format_error(1, "missing header"))?;
    let fields: Vec<&str> = head.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(format_error(1, "header must be `n tau eps_coeff`"));
    }
    let n = fields[0]
        .parse::<usize>()
        .map_err(|e| format_error(1, format!("bad degree: {e}")))?;
    let tau = fields[1]
        .parse::<f64>()
        .map_err(|e| format_error(1, format!("bad tau: {e}")))?;
    let eps_coeff = fields[2]
        .parse::<f64>()
        .map_err(|e| format_error(1, format!("bad eps_coeff: {e}")))?;
    let (idx, e0_line) = lines.next().ok_or_else(|| format_error(2, "missing E0"))?;
    let e0 = parse_matrix(idx + 1, e0_line)?;
    let projectors = lines
        .map(|(idx, l)| parse_matrix(idx + 1, l))
        .collect::<Result<Vec<_>, _>>()?;
    if projectors.len() != 2 * n {
        return Err(format_error(
            1,
            format!(
                "header declares n = {n} but file has {} projectors",
                projectors.len()
            ),
        ));
    }
    Ok((
        PhaseFileHeader { n, tau, eps_coeff },
        QspPhaseSet::new(e0, projectors)?,
    ))
}

pub fn write_phase_file(
    path: &Path,
    header: &PhaseFileHeader,
    phases: &QspPhaseSet,
) -> Result<(), QspError> {
    fs::write(path, format_phase_set(header, phases))?;
    Ok(())
}

pub fn read_phase_file(path: &Path) -> Result<(PhaseFileHeader, QspPhaseSet), QspError> {
    parse_phase_set(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::model::{build_tfim, TfimSpec};
    use crate::qsp::build_hs_circuit;

    #[test]
    fn round_trip_is_bit_exact() {
        let h: ComplexMatrix = build_tfim(&TfimSpec::standard(3)).unwrap();
        let built = build_hs_circuit(&h, 3.0, 1e-5).unwrap();
        let header = PhaseFileHeader {
            n: built.circuit.n,
            tau: 3.0,
            eps_coeff: 1e-5,
        };
        let text = format_phase_set(&header, &built.circuit.phases);
        let (h2, p2) = parse_phase_set(&text).unwrap();
        assert_eq!(h2, header);
        assert_eq!(p2, built.circuit.phases);
        assert_eq!(format_phase_set(&h2, &p2), text);
    }

    #[test]
    fn malformed_files() {
        assert!(parse_phase_set("").is_err());
        assert!(parse_phase_set("1 0.5\n").is_err());
        let e0 = "1 0 0 0 0 0 1 0";
        assert!(parse_phase_set(&format!("1 1.0 1e-3\n{e0}\n")).is_err());
        assert!(matches!(
            parse_phase_set(&format!("0 1.0 1e-3\n{e0} 7\n")),
            Err(QspError::PhaseFormat { line: 2, .. })
        ));
        assert!(parse_phase_set(&format!("0 1.0 1e-3\n{e0}\n")).is_ok());
    }
}

//! Writing sweep records and boundary curves to CSV files.

use std::path::Path;

use scatterlab_core::qstate::{mems_curve, werner_curve, CurveSample};
use scatterlab_core::sweep::SweepRecord;

use crate::error::Result;
use crate::formats::{curve_to_csv, sweep_to_csv, write_text};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum CurveKind {
    Werner,
    Mems,
}

/// `samples` evenly spaced points of the chosen boundary curve.
pub fn curve(kind: CurveKind, samples: usize) -> Result<Vec<CurveSample>> {
    Ok(match kind {
        CurveKind::Werner => werner_curve(samples)?,
        CurveKind::Mems => mems_curve(samples)?,
    })
}

pub fn emit_csv(records: &[SweepRecord], path: &Path) -> Result<()> {
    write_text(path, &sweep_to_csv(records))
}

pub fn emit_curves(kind: CurveKind, samples: usize, path: &Path) -> Result<()> {
    write_text(path, &curve_to_csv(&curve(kind, samples)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::CliError;

    #[test]
    fn mems_curve_starts_at_the_separable_corner() {
        let c = curve(CurveKind::Mems, 3).unwrap();
        assert!((c[0].point.linear_entropy - 8.0 / 9.0).abs() < 1e-12);
        assert_eq!(c[0].point.tangle, 0.0);
        assert!(c[2].point.linear_entropy.abs() < 1e-12);
        assert!((c[2].point.tangle - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unwritable_path_is_an_io_error_naming_it() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("out.csv");
        let err = emit_curves(CurveKind::Werner, 5, &path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("out.csv"), "{err}");
        assert!(matches!(emit_csv(&[], &path), Err(CliError::Io { .. })));
    }

    #[test]
    fn empty_records_write_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        emit_csv(&[], &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            "scenario,param_json,S_L,T,class,gw_fidelity\n"
        );
    }

    #[test]
    fn too_few_samples_is_invalid() {
        assert_eq!(curve(CurveKind::Werner, 1).unwrap_err().exit_code(), 1);
    }
}

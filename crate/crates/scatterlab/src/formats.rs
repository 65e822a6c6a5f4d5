//! CSV and JSON readers and writers for states, Mueller matrices, counts,
//! curves and sweep records.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use scatterlab_core::channel::Scenario;
use scatterlab_core::mueller::{KrausPair, MuellerMatrix};
use scatterlab_core::numerics::{CMatrix, C64};
use scatterlab_core::qstate::{CurveSample, DensityMatrix4, PlanePoint};
use scatterlab_core::sweep::SweepRecord;
use scatterlab_core::tomography::{
    clip_to_physical, standard_projectors, CoincidenceCounts, ErrorReport, ProjectorSet,
    ReconstructionResult, STANDARD_LABELS,
};

use crate::error::{CliError, Result};
use crate::number::{round12, sig12};

/// Basis tag stored with every serialized density matrix.
pub const BASIS: &str = "HV-product";

/// Tolerance for accepting a density matrix read from a file.
pub const STATE_TOL: f64 = 1e-8;

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn invalid_in(what: &str, e: impl std::fmt::Display) -> CliError {
    CliError::invalid(format!("{what}: {e}"))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn csv_string(f: impl FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>) -> String {
    let mut buf = Vec::new();
    {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(&mut buf);
        f(&mut w)
            .and_then(|()| w.flush().map_err(Into::into))
            .expect("writing to memory");
    }
    String::from_utf8(buf).expect("CSV fields are UTF-8")
}

// ---- density matrices ----

// extra keys are ignored so reconstruction output reads back as a state
#[derive(Serialize, Deserialize)]
struct StateFile {
    basis: String,
    rho: Vec<Vec<[f64; 2]>>,
}

fn rho_rows(rho: &DensityMatrix4) -> Vec<Vec<[f64; 2]>> {
    rho.matrix()
        .0
        .iter()
        .map(|row| row.iter().map(|z| [round12(z.re), round12(z.im)]).collect())
        .collect()
}

pub fn state_to_json(rho: &DensityMatrix4) -> Value {
    json!({ "basis": BASIS, "rho": rho_rows(rho) })
}

pub fn state_to_string(rho: &DensityMatrix4) -> String {
    pretty(&state_to_json(rho))
}

/// Parses `{"basis": "HV-product", "rho": [[[re, im], …], …]}` and checks
/// the matrix is a density matrix to within [`STATE_TOL`].
pub fn state_from_str(text: &str) -> Result<DensityMatrix4> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| invalid_in("state JSON", e))?;
    if file.basis != BASIS {
        return Err(CliError::invalid(format!(
            "state JSON: basis \"{}\" is not supported, expected \"{BASIS}\"",
            file.basis
        )));
    }
    if file.rho.len() != 4 || file.rho.iter().any(|r| r.len() != 4) {
        return Err(CliError::invalid(
            "state JSON: rho must be a 4x4 array of [re, im] pairs",
        ));
    }
    let m = CMatrix::from_fn(|i, j| C64::new(file.rho[i][j][0], file.rho[i][j][1]));
    Ok(DensityMatrix4::new(m, STATE_TOL)?)
}

/// State JSON plus a `convergence` block and the state's plane position.
pub fn reconstruction_to_string(r: &ReconstructionResult) -> String {
    let pt = PlanePoint::of_state(&r.rho);
    pretty(&json!({
        "basis": BASIS,
        "rho": rho_rows(&r.rho),
        "convergence": {
            "converged": r.converged,
            "objective": round12(r.objective),
            "iterations": r.iterations,
        },
        "linear_entropy": round12(pt.linear_entropy),
        "tangle": round12(pt.tangle),
    }))
}

/// Monte Carlo report with the raw bars and the bars clipped to the physical region.
pub fn error_report_to_string(r: &ErrorReport) -> String {
    let clipped = clip_to_physical(&r.point());
    let bar = |b: Option<scatterlab_core::qstate::ErrorBar>| {
        let b = b.expect("report points carry error bars");
        json!({ "minus": round12(b.minus), "plus": round12(b.plus) })
    };
    pretty(&json!({
        "linear_entropy": round12(r.linear_entropy),
        "tangle": round12(r.tangle),
        "linear_entropy_mean": round12(r.linear_entropy_mean),
        "tangle_mean": round12(r.tangle_mean),
        "sigma_linear_entropy": round12(r.sigma_linear_entropy),
        "sigma_tangle": round12(r.sigma_tangle),
        "clipped": {
            "linear_entropy": bar(clipped.linear_entropy_err),
            "tangle": bar(clipped.tangle_err),
        },
        "trials": r.trials,
        "dropped": r.dropped,
        "degenerate": r.degenerate,
        "warning": r.warning,
    }))
}

// ---- Mueller matrices ----

fn mueller_from_rows(rows: Vec<Vec<f64>>, what: &str) -> Result<MuellerMatrix> {
    if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
        return Err(CliError::invalid(format!(
            "{what}: expected 4 rows of 4 numbers"
        )));
    }
    let mut m = [[0.0; 4]; 4];
    for (dst, src) in m.iter_mut().zip(&rows) {
        dst.copy_from_slice(src);
    }
    Ok(MuellerMatrix::new(m)?)
}

/// Four rows of four numbers, no header. Blank lines and `#` comments are skipped.
pub fn mueller_from_csv(text: &str) -> Result<MuellerMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| invalid_in("Mueller CSV", e))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| invalid_in(&format!("Mueller CSV row {}", k + 1), e))?;
        rows.push(row);
    }
    mueller_from_rows(rows, "Mueller CSV")
}

/// A nested 4×4 JSON array.
pub fn mueller_from_json(text: &str) -> Result<MuellerMatrix> {
    let rows: Vec<Vec<f64>> =
        serde_json::from_str(text).map_err(|e| invalid_in("Mueller JSON", e))?;
    mueller_from_rows(rows, "Mueller JSON")
}

/// Reads a `.json` file as JSON and anything else as CSV.
pub fn read_mueller(path: &Path) -> Result<MuellerMatrix> {
    let text = read_text(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
    {
        mueller_from_json(&text)
    } else {
        mueller_from_csv(&text)
    }
}

pub fn mueller_to_csv(m: &MuellerMatrix) -> String {
    csv_string(|w| {
        for row in m.rows() {
            w.write_record(row.iter().map(|&x| sig12(x)))?;
        }
        Ok(())
    })
}

pub fn mueller_to_json(m: &MuellerMatrix) -> String {
    let rows: Vec<Vec<f64>> = m
        .rows()
        .iter()
        .map(|r| r.iter().map(|&x| round12(x)).collect())
        .collect();
    pretty(&json!(rows))
}

/// One row per Cloude term: the weight, then the Jones entries row-major as
/// real and imaginary parts.
pub fn decomposition_to_csv(terms: &[KrausPair]) -> String {
    csv_string(|w| {
        w.write_record([
            "lambda", "t00_re", "t00_im", "t01_re", "t01_im", "t10_re", "t10_im", "t11_re",
            "t11_im",
        ])?;
        for t in terms {
            let mut row = vec![sig12(t.weight)];
            for z in t.jones.0 .0.iter().flatten() {
                row.push(sig12(z.re));
                row.push(sig12(z.im));
            }
            w.write_record(&row)?;
        }
        Ok(())
    })
}

pub fn decomposition_to_json(terms: &[KrausPair]) -> String {
    let terms: Vec<Value> = terms
        .iter()
        .map(|t| {
            let jones: Vec<Vec<[f64; 2]>> = t
                .jones
                .0
                 .0
                .iter()
                .map(|row| row.iter().map(|z| [round12(z.re), round12(z.im)]).collect())
                .collect();
            json!({ "lambda": round12(t.weight), "jones": jones })
        })
        .collect();
    pretty(&json!({ "terms": terms }))
}

// ---- coincidence counts ----

/// Header `setting,count`, one row per projector in set order.
pub fn counts_to_csv(counts: &CoincidenceCounts, projectors: &ProjectorSet) -> String {
    csv_string(|w| {
        w.write_record(["setting", "count"])?;
        for (label, &n) in projectors.labels().iter().zip(counts.counts()) {
            w.write_record([label.as_str(), &sig12(n)])?;
        }
        Ok(())
    })
}

/// Reads `setting,count` rows in any order. The labels name the projectors:
/// the standard sixteen are put in standard order, any other complete set is
/// used in file order.
pub fn counts_from_csv(
    text: &str,
    per_setting: Option<f64>,
) -> Result<(ProjectorSet, CoincidenceCounts)> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| invalid_in("counts CSV", e))?;
    if header.iter().collect::<Vec<_>>() != ["setting", "count"] {
        return Err(CliError::invalid(
            "counts CSV: header must be `setting,count`",
        ));
    }
    let mut rows: Vec<(String, f64)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| invalid_in("counts CSV", e))?;
        let label = rec[0].to_uppercase();
        let n: f64 = rec[1]
            .parse()
            .map_err(|e| invalid_in(&format!("counts CSV: count for {label}"), e))?;
        if rows.iter().any(|(l, _)| *l == label) {
            return Err(CliError::invalid(format!(
                "counts CSV: setting {label} appears twice"
            )));
        }
        rows.push((label, n));
    }
    let standard = rows.len() == STANDARD_LABELS.len()
        && rows
            .iter()
            .all(|(l, _)| STANDARD_LABELS.contains(&l.as_str()));
    let projectors = if standard {
        standard_projectors()
    } else {
        let labels: Vec<&str> = rows.iter().map(|(l, _)| l.as_str()).collect();
        ProjectorSet::from_labels(&labels).map_err(|e| invalid_in("counts CSV settings", e))?
    };
    let mut n = vec![0.0; rows.len()];
    for (label, x) in &rows {
        n[projectors
            .position(label)
            .expect("label belongs to the set")] = *x;
    }
    let counts = CoincidenceCounts::from_slice(&n, per_setting)?;
    Ok((projectors, counts))
}

/// Projector labels from a text file: comma- or whitespace-separated, `#` comments.
pub fn projectors_from_str(text: &str) -> Result<ProjectorSet> {
    let labels: Vec<String> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|s| !s.is_empty())
        .map(str::to_uppercase)
        .collect();
    ProjectorSet::from_labels(&labels).map_err(|e| invalid_in("projector list", e))
}

// ---- curves and sweeps ----

pub fn curve_to_csv(samples: &[CurveSample]) -> String {
    csv_string(|w| {
        w.write_record(["param", "S_L", "T"])?;
        for s in samples {
            w.write_record([
                sig12(s.param),
                sig12(s.point.linear_entropy),
                sig12(s.point.tangle),
            ])?;
        }
        Ok(())
    })
}

/// Sampled parameters of a scenario as a compact JSON object.
pub fn scenario_params_json(s: &Scenario) -> String {
    let v3 = |v: &[f64; 3]| v.map(round12);
    let v = match s {
        Scenario::Isotropic { depolarization } => {
            json!({ "depolarization": round12(*depolarization) })
        }
        Scenario::Birefringent {
            depolarization,
            retardance,
            axis,
        } => json!({
            "depolarization": round12(*depolarization),
            "retardance": round12(*retardance),
            "axis": v3(axis),
        }),
        Scenario::Dichroic {
            depolarization,
            diattenuation,
            transmittance,
        } => json!({
            "depolarization": round12(*depolarization),
            "diattenuation": v3(diattenuation),
            "transmittance": round12(*transmittance),
        }),
    };
    v.to_string()
}

pub const SWEEP_HEADER: [&str; 6] = ["scenario", "param_json", "S_L", "T", "class", "gw_fidelity"];

/// Sweep records in the order given; `gw_fidelity` is empty when no fit was run.
pub fn sweep_to_csv(records: &[SweepRecord]) -> String {
    csv_string(|w| {
        w.write_record(SWEEP_HEADER)?;
        for r in records {
            w.write_record([
                r.scenario.tag().to_string(),
                scenario_params_json(&r.scenario),
                sig12(r.point.linear_entropy),
                sig12(r.point.tangle),
                r.class.as_str().to_string(),
                r.gw_fidelity.map(sig12).unwrap_or_default(),
            ])?;
        }
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use scatterlab_core::mueller::cloude_spectrum;
    use scatterlab_core::qstate::{mems, singlet, werner, werner_curve};
    use scatterlab_core::sweep::{run_sweep, ScenarioKind, SweepConfig};
    use scatterlab_core::tomography::{simulate_counts, Noise};

    #[test]
    fn state_json_round_trips() {
        for rho in [singlet(), werner(0.3).unwrap(), mems(0.8).unwrap()] {
            let text = state_to_string(&rho);
            let back = state_from_str(&text).unwrap();
            assert!(back.matrix().max_diff(rho.matrix()) < 1e-11);
            let v: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(v["basis"], BASIS);
            assert_eq!(v["rho"].as_array().unwrap().len(), 4);
        }
    }

    #[test]
    fn state_json_rejects_bad_input() {
        let ok = state_to_string(&singlet());
        assert!(state_from_str(&ok.replace(BASIS, "HV")).is_err());
        assert!(state_from_str("{\"basis\":\"HV-product\",\"rho\":[[[1,0]]]}").is_err());
        assert!(state_from_str("not json").is_err());
        // trace 2
        let doubled = r#"{"basis":"HV-product","rho":[[[2,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
        assert!(state_from_str(doubled).is_err());
    }

    #[test]
    fn mueller_csv_and_json_round_trip() {
        let m = MuellerMatrix::new([
            [1.0, 0.1, 0.0, 0.0],
            [0.1, 0.9, 0.0, 0.0],
            [0.0, 0.0, 0.8, 0.05],
            [0.0, 0.0, -0.05, 0.8],
        ])
        .unwrap();
        assert_eq!(mueller_from_csv(&mueller_to_csv(&m)).unwrap(), m);
        assert_eq!(mueller_from_json(&mueller_to_json(&m)).unwrap(), m);
        let commented = format!("# sample\n\n{}", mueller_to_csv(&m).replace(',', ", "));
        assert_eq!(mueller_from_csv(&commented).unwrap(), m);
    }

    #[test]
    fn mueller_csv_rejects_wrong_shape() {
        assert!(mueller_from_csv("1,0,0,0\n0,1,0,0\n0,0,1,0\n").is_err());
        assert!(mueller_from_csv("1,0,0\n0,1,0\n0,0,1\n0,0,0\n").is_err());
        assert!(mueller_from_csv("1,0,0,0\n0,1,0,0\n0,0,1,x\n0,0,0,1\n").is_err());
        assert!(mueller_from_json("[[1,0],[0,1]]").is_err());
    }

    #[test]
    fn identity_decomposition_lists_all_four_terms() {
        let terms = cloude_spectrum(&MuellerMatrix::identity(), 1e-10).unwrap();
        let text = decomposition_to_csv(&terms);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[1], "1,1,0,0,0,0,0,1,0");
        for l in &lines[2..] {
            assert!(l.starts_with("0,"), "{l}");
        }
        let v: Value = serde_json::from_str(&decomposition_to_json(&terms)).unwrap();
        assert_eq!(v["terms"][0]["lambda"], 1.0);
        assert_eq!(v["terms"][0]["jones"][1][1][0], 1.0);
    }

    #[test]
    fn counts_round_trip_in_any_row_order() {
        let p = standard_projectors();
        let c = simulate_counts(&mems(0.8).unwrap(), 1e4, Noise::Poisson, 3, &p).unwrap();
        let text = counts_to_csv(&c, &p);
        assert!(text.starts_with("setting,count\nHH,"));
        let (p2, c2) = counts_from_csv(&text, None).unwrap();
        assert_eq!(p2.labels(), p.labels());
        assert_eq!(c2.counts(), c.counts());
        let mut lines: Vec<&str> = text.lines().collect();
        lines[1..].reverse();
        let (_, c3) = counts_from_csv(&lines.join("\n"), Some(1e4)).unwrap();
        assert_eq!(c3.counts(), c.counts());
        assert_eq!(c3.per_setting(), Some(1e4));
    }

    #[test]
    fn counts_csv_rejects_bad_rows() {
        let p = standard_projectors();
        let c = simulate_counts(&singlet(), 100.0, Noise::None, 0, &p).unwrap();
        let text = counts_to_csv(&c, &p);
        let dup = text.replace("HV,", "HH,");
        assert!(counts_from_csv(&dup, None)
            .unwrap_err()
            .to_string()
            .contains("twice"));
        let short: String = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(counts_from_csv(&short, None).is_err());
        assert!(counts_from_csv(&text.replace("setting,count", "a,b"), None).is_err());
        let negative = text.replacen("\nHV,", "\nHV,-", 1);
        assert!(counts_from_csv(&negative, None).is_err());
    }

    #[test]
    fn projector_lists_are_checked_for_completeness() {
        let list = STANDARD_LABELS.join(", ");
        assert_eq!(
            projectors_from_str(&list).unwrap().labels(),
            standard_projectors().labels()
        );
        let repeated = vec!["HH"; 16].join(" ");
        assert!(projectors_from_str(&repeated).is_err());
    }

    #[test]
    fn werner_curve_three_samples() {
        let text = curve_to_csv(&werner_curve(3).unwrap());
        assert_eq!(text, "param,S_L,T\n0,1,0\n0.5,0.75,0.0625\n1,0,1\n");
    }

    #[test]
    fn empty_sweep_is_header_only() {
        assert_eq!(
            sweep_to_csv(&[]),
            "scenario,param_json,S_L,T,class,gw_fidelity\n"
        );
    }

    #[test]
    fn sweep_rows_carry_parameters() {
        let recs = run_sweep(&SweepConfig::new(ScenarioKind::Dichroic, 3, 5)).unwrap();
        let text = sweep_to_csv(&recs);
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        for (rec, r) in rdr.records().zip(&recs) {
            let rec = rec.unwrap();
            assert_eq!(&rec[0], "III");
            let params: Value = serde_json::from_str(&rec[1]).unwrap();
            assert_eq!(params["diattenuation"].as_array().unwrap().len(), 3);
            let sl: f64 = rec[2].parse().unwrap();
            assert!((sl - r.point.linear_entropy).abs() < 1e-11);
            assert_eq!(&rec[5], "");
        }
    }
}

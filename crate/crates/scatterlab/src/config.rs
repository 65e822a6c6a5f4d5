//! Sweep configuration files.
//!
//! Plain `key = value` lines with `#` comments, or a JSON object with the
//! same keys:
//!
//! | key | value | default |
//! |-----|-------|---------|
//! | `scenario` | `I`, `II` or `III` | required |
//! | `samples` | sample count ≥ 1 | required |
//! | `seed` | u64 master seed | from `--seed` or `SCATTERLAB_SEED` |
//! | `depolarization_min`, `depolarization_max` | Δ range in [0, 1) | 0, 0.95 |
//! | `retardance_min`, `retardance_max` | R range in radians | 0, 2π |
//! | `diattenuation_min`, `diattenuation_max` | \|d\| range in [0, 1) | 0, 0.95 |
//! | `transmittance_min`, `transmittance_max` | Tu range in (0, 1] | 1, 1 |
//! | `gw_fit` | `true`, `false` or `auto` (type II only) | `auto` |
//!
//! A bare range key (`depolarization = 0.3`) fixes both bounds.

use serde_json::{Map, Value};

use scatterlab_core::sweep::{Interval, ScenarioKind, SweepConfig};

use crate::error::{CliError, Result};

const RANGES: [&str; 4] = [
    "depolarization",
    "retardance",
    "diattenuation",
    "transmittance",
];

/// A parsed config file. The seed may still come from the command line.
#[derive(Clone, Debug, PartialEq)]
pub struct ConfigFile {
    pub sweep: SweepConfig,
    pub seed: Option<u64>,
}

impl ConfigFile {
    /// The sweep with its master seed filled in.
    pub fn with_seed(&self, seed: u64) -> Result<SweepConfig> {
        let cfg = SweepConfig { seed, ..self.sweep };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn bad(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::invalid(format!("config: {key}: {reason}"))
}

fn parse_key_values(text: &str) -> Result<Map<String, Value>> {
    let mut map = Map::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::invalid(format!(
                "config line {}: expected `key = value`",
                k + 1
            )));
        };
        let key = key.trim().to_string();
        if map
            .insert(key.clone(), Value::String(value.trim().to_string()))
            .is_some()
        {
            return Err(bad(&key, "given twice"));
        }
    }
    Ok(map)
}

fn number(map: &Map<String, Value>, key: &str) -> Result<Option<f64>> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => Ok(n.as_f64()),
        Some(Value::String(s)) => s
            .parse()
            .map(Some)
            .map_err(|_| bad(key, format!("`{s}` is not a number"))),
        Some(v) => Err(bad(key, format!("expected a number, got {v}"))),
    }
}

fn integer(map: &Map<String, Value>, key: &str) -> Result<Option<u64>> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::Number(n)) => n
            .as_u64()
            .map(Some)
            .ok_or_else(|| bad(key, "expected a nonnegative integer")),
        Some(Value::String(s)) => s
            .parse()
            .map(Some)
            .map_err(|_| bad(key, format!("`{s}` is not a nonnegative integer"))),
        Some(v) => Err(bad(key, format!("expected an integer, got {v}"))),
    }
}

fn text<'a>(map: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>> {
    match map.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s)),
        Some(Value::Bool(true)) => Ok(Some("true")),
        Some(Value::Bool(false)) => Ok(Some("false")),
        Some(v) => Err(bad(key, format!("expected text, got {v}"))),
    }
}

fn is_known(key: &str) -> bool {
    matches!(key, "scenario" | "samples" | "seed" | "gw_fit")
        || RANGES.iter().any(|r| {
            key == *r
                || key
                    .strip_prefix(r)
                    .is_some_and(|rest| rest == "_min" || rest == "_max")
        })
}

/// Parses a config in either format. The result is validated except for the seed.
pub fn parse_config(source: &str) -> Result<ConfigFile> {
    let map = if source.trim_start().starts_with('{') {
        serde_json::from_str(source).map_err(|e| CliError::invalid(format!("config JSON: {e}")))?
    } else {
        parse_key_values(source)?
    };
    if let Some(key) = map.keys().find(|k| !is_known(k)) {
        return Err(bad(key, "unknown key"));
    }

    let kind = match text(&map, "scenario")? {
        None => return Err(bad("scenario", "missing (I, II or III)")),
        Some(s) => ScenarioKind::from_tag(s.trim())
            .ok_or_else(|| bad("scenario", format!("`{s}` is not I, II or III")))?,
    };
    let samples = integer(&map, "samples")?.ok_or_else(|| bad("samples", "missing"))?;
    let samples = usize::try_from(samples).map_err(|_| bad("samples", "too large"))?;
    let seed = integer(&map, "seed")?;

    let mut sweep = SweepConfig::new(kind, samples, seed.unwrap_or(0));
    for name in RANGES {
        let iv = match name {
            "depolarization" => &mut sweep.depolarization,
            "retardance" => &mut sweep.retardance,
            "diattenuation" => &mut sweep.diattenuation,
            _ => &mut sweep.transmittance,
        };
        if let Some(x) = number(&map, name)? {
            if map.contains_key(&format!("{name}_min")) || map.contains_key(&format!("{name}_max"))
            {
                return Err(bad(
                    name,
                    "give either a fixed value or _min/_max, not both",
                ));
            }
            *iv = Interval::new(x, x);
        }
        if let Some(lo) = number(&map, &format!("{name}_min"))? {
            iv.lo = lo;
        }
        if let Some(hi) = number(&map, &format!("{name}_max"))? {
            iv.hi = hi;
        }
    }
    sweep.gw_fit = match text(&map, "gw_fit")? {
        None | Some("auto") => None,
        Some("true") => Some(true),
        Some("false") => Some(false),
        Some(s) => return Err(bad("gw_fit", format!("`{s}` is not true, false or auto"))),
    };
    sweep.validate()?;
    Ok(ConfigFile { sweep, seed })
}

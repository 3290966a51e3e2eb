//! Run configurations. Every file carries `schema_version`; unknown keys are
//! rejected so typos surface instead of silently taking defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dpfilm::energy::Params;
use dpfilm::minimize::gioia::GioiaConfig;
use dpfilm::minimize::sweep::SweepConfig;
use dpfilm::minimize::{EnergyKind, MinimizeConfig};
use dpfilm::DomainSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyFile {
    pub schema_version: u32,
    #[serde(default)]
    pub field: Option<PathBuf>,
    #[serde(default)]
    pub params: Option<Params>,
    #[serde(default)]
    pub energy: EnergyKind,
    /// Restricts the field to a cross-section; all nodes count when absent.
    #[serde(default)]
    pub domain: Option<DomainSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinimizeFile {
    pub schema_version: u32,
    pub domain: DomainSpec,
    pub spacing: f64,
    pub params: Params,
    #[serde(default)]
    pub minimize: MinimizeConfig,
    /// Layers through the thickness, `minimize3d` only.
    #[serde(default = "two")]
    pub nz: usize,
}

fn two() -> usize {
    2
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepFile {
    pub schema_version: u32,
    pub sweep: SweepConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GioiaFile {
    pub schema_version: u32,
    pub gioia: GioiaConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFile {
    pub schema_version: u32,
    #[serde(default = "core")]
    pub suite: String,
    #[serde(default)]
    pub cases: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn core() -> String {
    "core".into()
}

/// Parses JSON, naming the offending field and position on failure.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            anyhow::anyhow!("{what}: {inner}")
        } else {
            anyhow::anyhow!("{what}: field `{path}`: {inner}")
        }
    })
}

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text, &path.display().to_string())
}

pub fn check_version(v: u32) -> Result<()> {
    if v != SCHEMA_VERSION {
        bail!("schema_version {v} is not supported (this build reads {SCHEMA_VERSION})");
    }
    Ok(())
}

/// `0.25`, `1e-2` or `2^-6`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: f64 = b.trim().parse().with_context(|| format!("bad base in {s:?}"))?;
        let e: f64 = e.trim().parse().with_context(|| format!("bad exponent in {s:?}"))?;
        return Ok(b.powf(e));
    }
    s.parse().with_context(|| format!("not a number: {s:?}"))
}

/// `a..b:step` (inclusive of `b` up to rounding) or a comma list.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    if let Some((span, step)) = s.split_once(':') {
        let (a, b) = span.split_once("..").with_context(|| format!("expected a..b:step, got {s:?}"))?;
        let (a, b, step) = (parse_number(a)?, parse_number(b)?, parse_number(step)?);
        if !(step > 0.0) || !(b >= a) {
            bail!("range {s:?} needs a ≤ b and a positive step");
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| a + i as f64 * step).collect());
    }
    s.split(',').map(parse_number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_ranges() {
        assert_eq!(parse_number("2^-6").unwrap(), 1.0 / 64.0);
        assert_eq!(parse_number(" 0.5 ").unwrap(), 0.5);
        assert!(parse_number("two").is_err());
        let r = parse_range("0.5..5:0.25").unwrap();
        assert_eq!(r.len(), 19);
        assert_eq!(r[0], 0.5);
        assert!((r[18] - 5.0).abs() < 1e-12);
        assert_eq!(parse_range("1,2^1").unwrap(), vec![1.0, 2.0]);
        assert!(parse_range("3..1:0.5").is_err());
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse::<MinimizeFile>(r#"{"schema_version": 1, "domain": {"shape": {"kind": "disc", "radius": "x"}}}"#, "cfg")
            .unwrap_err()
            .to_string();
        assert!(e.contains("domain.shape"), "{e}");
        assert!(e.contains("line 1"), "{e}");
        let e = parse::<VerifyFile>(r#"{"schema_version": 1, "suit": "core"}"#, "cfg").unwrap_err().to_string();
        assert!(e.contains("suit"), "{e}");
    }
}

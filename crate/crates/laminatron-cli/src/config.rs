//! Run configuration: everything a pipeline run depends on.

use std::path::Path;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use laminatron::exactnum::{ln_bigint, ln_rat, make_esequence, parse_rat, ESequence, SequenceMode};
use laminatron::family::{example_s05_general, example_s06_general, FamilySpec};
use laminatron::timeline::{build_timeline, build_timeline_from_logs, g1_minimal_logs, geometric_logs, TimelineModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyChoice {
    /// Pentagon family on the five-punctured sphere.
    S05,
    /// Drag-based example with `m = 2` on the five-punctured sphere.
    S05General,
    /// Drag-based example with `m = 2` on the six-punctured sphere.
    S06General,
    /// No curves: intersection numbers replaced by the products `A(0,k)`.
    Synthetic { m: usize, b: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Geometric,
    G1Minimal,
    Explicit(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ESeqConfig {
    /// Growth base as an integer or `p/q`.
    pub a: String,
    pub e0: String,
    pub mode: ModeChoice,
    /// Replaces the recorded `e_k` after the curves are generated.
    #[serde(default)]
    pub inject: Option<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    /// Case 1 bound on `t` minus the window start.
    pub w: f64,
    pub samples_per_window: usize,
    /// First window index; defaults to `m`.
    #[serde(default)]
    pub first_window: Option<usize>,
    /// Position of the Case 2 error-ratio sample inside each window.
    pub case_two_fraction: f64,
    pub max_residual: f64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { w: 1.0, samples_per_window: 21, first_window: None, case_two_fraction: 0.5, max_residual: 0.25 }
    }
}

fn default_slope_tol() -> f64 {
    0.1
}

fn default_band() -> f64 {
    10.0
}

fn default_out() -> String {
    "out".into()
}

fn default_twist_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: FamilyChoice,
    pub eseq: ESeqConfig,
    /// Largest sequence index generated.
    pub max_index: usize,
    /// Round probe curves as `a-b`; all round curves when absent.
    #[serde(default)]
    pub probes: Option<Vec<String>>,
    /// Arc constant; measured from the realisation when absent.
    #[serde(default)]
    pub big_b: Option<String>,
    /// Transverse weights `x_h`; all 1 when absent.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
    #[serde(default)]
    pub schedule: Schedule,
    /// Trace with `A(0,k)` in place of intersection numbers.
    #[serde(default)]
    pub synthetic: bool,
    #[serde(default = "default_slope_tol")]
    pub slope_tolerance: f64,
    #[serde(default = "default_band")]
    pub band: f64,
    /// Seed for the randomized twist-formula sample.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_twist_samples")]
    pub twist_samples: usize,
    #[serde(default = "default_out")]
    pub out: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: FamilyChoice::S05,
            eseq: ESeqConfig { a: "576".into(), e0: "1".into(), mode: ModeChoice::Geometric, inject: None },
            max_index: 6,
            probes: None,
            big_b: None,
            weights: None,
            schedule: Schedule::default(),
            synthetic: false,
            slope_tolerance: default_slope_tol(),
            band: default_band(),
            seed: 0,
            twist_samples: default_twist_samples(),
            out: default_out(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| {
            anyhow::anyhow!("parse error in {} at line {} column {}: {e}", path.display(), e.line(), e.column())
        })
    }

    pub fn m(&self) -> usize {
        match &self.family {
            FamilyChoice::Synthetic { m, .. } => *m,
            _ => 2,
        }
    }

    pub fn has_curves(&self) -> bool {
        !matches!(self.family, FamilyChoice::Synthetic { .. })
    }

    fn int(s: &str, what: &str) -> Result<BigInt> {
        s.trim().parse().with_context(|| format!("bad integer for {what}: {s:?}"))
    }

    /// Twist powers `e_0 .. e_len-1`.
    pub fn esequence(&self, len: usize) -> Result<ESequence> {
        let a = parse_rat(&self.eseq.a)?;
        let mode = match &self.eseq.mode {
            ModeChoice::Geometric => SequenceMode::Geometric,
            ModeChoice::G1Minimal => SequenceMode::G1Minimal,
            ModeChoice::Explicit(v) => {
                SequenceMode::Explicit(v.iter().map(|x| Self::int(x, "e")).collect::<Result<_>>()?)
            }
        };
        Ok(make_esequence(a, Self::int(&self.eseq.e0, "e0")?, len.max(2) - 1, mode)?)
    }

    /// Applies the configured corruption to an already used sequence.
    pub fn inject(&self, e: ESequence) -> Result<ESequence> {
        Ok(match &self.eseq.inject {
            Some((k, v)) if *k < e.len() => e.with_value_unchecked(*k, Self::int(v, "injected e")?),
            Some((k, _)) => bail!("injected index {k} beyond the sequence"),
            None => e,
        })
    }

    pub fn family_spec(&self) -> Result<FamilySpec> {
        let e = self.esequence(self.max_index + 3)?;
        Ok(match &self.family {
            FamilyChoice::S05 => FamilySpec::s05(e),
            FamilyChoice::S05General => example_s05_general(e)?,
            FamilyChoice::S06General => example_s06_general(e)?,
            FamilyChoice::Synthetic { .. } => bail!("the synthetic family has no curves"),
        })
    }

    pub fn weights(&self) -> Vec<f64> {
        self.weights.clone().unwrap_or_else(|| vec![1.0; self.m()])
    }

    /// Timeline over `e_0 .. e_{max_index}`, exact for curve families and
    /// from logarithms for the synthetic family.
    pub fn timeline(&self) -> Result<TimelineModel> {
        let w = self.weights();
        match &self.family {
            FamilyChoice::Synthetic { m, b } => {
                let ln_a = ln_rat(&parse_rat(&self.eseq.a)?);
                let ln_e0 = ln_bigint(&Self::int(&self.eseq.e0, "e0")?);
                let logs = match &self.eseq.mode {
                    ModeChoice::Geometric => geometric_logs(ln_a, ln_e0, self.max_index),
                    ModeChoice::G1Minimal => g1_minimal_logs(ln_a, ln_e0, self.max_index),
                    ModeChoice::Explicit(v) => {
                        v.iter().map(|x| Self::int(x, "e").map(|y| ln_bigint(&y))).collect::<Result<_>>()?
                    }
                };
                Ok(build_timeline_from_logs(&logs, ln_a, *m, ln_bigint(&Self::int(b, "b")?), &w)?)
            }
            _ => {
                let spec = self.family_spec()?;
                let e = spec.eseq.truncated(self.max_index + 1);
                Ok(build_timeline(&e, spec.m, &spec.b, &w)?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let c = RunConfig::default();
        let s = serde_json::to_string_pretty(&c).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&s).unwrap(), c);
    }

    #[test]
    fn minimal_config_fills_defaults() {
        let s = r#"{"family": {"kind": "synthetic", "m": 3, "b": "2"},
                    "eseq": {"a": "8", "e0": "64", "mode": "geometric"}, "max_index": 30}"#;
        let c: RunConfig = serde_json::from_str(s).unwrap();
        assert_eq!(c.m(), 3);
        assert_eq!(c.schedule, Schedule::default());
        assert_eq!(c.timeline().unwrap().len(), 31);
    }

    #[test]
    fn parse_error_has_position() {
        let dir = std::env::temp_dir().join(format!("laminatron-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.json");
        std::fs::write(&p, "{\n  \"family\": {\"kind\": \"s05\"},\n  \"max_index\": x\n}").unwrap();
        let msg = RunConfig::load(&p).unwrap_err().to_string();
        assert!(msg.contains("line 3 column"), "{msg}");
    }
}

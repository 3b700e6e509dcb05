//! Run configuration: strict JSON schema, eager expression parsing, and the
//! canonical digest.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hsconvex_core::classes::{ClassId, ConvexityClassSpec, SamplingPlan};
use hsconvex_core::expr::{Expr, ParseError, Parser};
use hsconvex_core::quad::QuadratureConfig;
use hsconvex_core::theorems::{Normalization, Scenario, TheoremId};
use hsconvex_core::Interval;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {error}")]
    Io {
        path: PathBuf,
        error: std::io::Error,
    },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("{task}: cannot parse {field}: {error}")]
    Expression {
        task: String,
        field: &'static str,
        error: ParseError,
    },
    #[error("{task}: {message}")]
    Invalid { task: String, message: String },
    #[error("duplicate task name `{0}`")]
    DuplicateName(String),
    #[error("config defines no tasks")]
    NoTasks,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Table,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(format!(
                "unknown format `{other}` (expected json, csv or table)"
            )),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Table => "table",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

/// An exponent in `(0, 1]`, rejected at deserialization time.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(try_from = "f64")]
struct Exponent(f64);

impl TryFrom<f64> for Exponent {
    type Error = String;

    fn try_from(s: f64) -> Result<Self, Self::Error> {
        if s > 0.0 && s <= 1.0 {
            Ok(Exponent(s))
        } else {
            Err(format!("s must be in (0,1], got {s}"))
        }
    }
}

fn default_h() -> String {
    "t".to_string()
}

fn default_s() -> Exponent {
    Exponent(1.0)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    f: String,
    #[serde(default)]
    g: Option<String>,
    #[serde(default = "default_h")]
    h: String,
    #[serde(default)]
    h2: Option<String>,
    #[serde(default = "default_s")]
    s: Exponent,
    interval: Interval,
    theorems: Vec<TheoremId>,
    #[serde(default)]
    proof_normalized: Option<bool>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassCheck {
    name: String,
    f: String,
    class: ClassId,
    #[serde(default)]
    h: Option<String>,
    #[serde(default)]
    s: Option<Exponent>,
    interval: Interval,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMeansCheck {
    name: String,
    a: f64,
    b: f64,
    #[serde(default)]
    s: Option<Exponent>,
    #[serde(default)]
    s_grid: Option<Vec<Exponent>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    quad: QuadratureConfig,
    #[serde(default)]
    sampling: SamplingPlan,
    #[serde(default)]
    proof_normalized: bool,
    #[serde(default)]
    output: OutputSpec,
    #[serde(default)]
    scenarios: Vec<RawScenario>,
    #[serde(default)]
    class_checks: Vec<RawClassCheck>,
    #[serde(default)]
    means_checks: Vec<RawMeansCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TaskKind {
    Theorem {
        id: TheoremId,
        scenario: Box<Scenario>,
    },
    Class {
        f: Expr,
        spec: ConvexityClassSpec,
        interval: Interval,
    },
    Means {
        a: f64,
        b: f64,
        s: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub name: String,
    pub kind: TaskKind,
}

/// A means check over a grid of exponents, summarized after the run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub name: String,
    pub a: f64,
    pub b: f64,
    pub s_grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub quad: QuadratureConfig,
    pub sampling: SamplingPlan,
    pub output: OutputSpec,
    /// Tasks in config order: every theorem of every scenario, then class
    /// checks, then means checks (one task per exponent).
    pub tasks: Vec<Task>,
    pub sweeps: Vec<SweepSpec>,
    /// SHA-256 of the canonical (sorted-key, compact) form of the config text.
    pub digest: String,
}

impl RunConfig {
    /// Switches every theorem task to the proof normalization.
    pub fn force_proof_normalized(&mut self) {
        for task in &mut self.tasks {
            if let TaskKind::Theorem { scenario, .. } = &mut task.kind {
                scenario.normalization = Normalization::Proof;
            }
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|error| ConfigError::Io {
        path: path.to_path_buf(),
        error,
    })?;
    parse_config(&text)
}

fn schema_error(path: String, message: String) -> ConfigError {
    ConfigError::Schema {
        path: if path.is_empty() || path == "." {
            "<root>".into()
        } else {
            path
        },
        message,
    }
}

/// Canonical form: parsed and re-serialized with sorted keys and no whitespace.
pub fn canonical_json(text: &str) -> Result<String, ConfigError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| schema_error(String::new(), e.to_string()))?;
    Ok(value.to_string())
}

pub fn digest(text: &str) -> Result<String, ConfigError> {
    let canonical = canonical_json(text)?;
    Ok(format!("{:x}", Sha256::digest(canonical.as_bytes())))
}

fn parse_expr(task: &str, field: &'static str, var: &str, src: &str) -> Result<Expr, ConfigError> {
    Parser::new(var)
        .with_parameters(["s"])
        .parse(src)
        .map_err(|error| ConfigError::Expression {
            task: task.to_string(),
            field,
            error,
        })
}

fn invalid(task: &str, message: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        task: task.to_string(),
        message: message.to_string(),
    }
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let digest = digest(text)?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de)
        .map_err(|e| schema_error(e.path().to_string(), e.inner().to_string()))?;
    raw.quad
        .validate()
        .map_err(|e| schema_error("quad".into(), e.to_string()))?;
    raw.sampling
        .validate()
        .map_err(|e| schema_error("sampling".into(), e.to_string()))?;

    let mut names = BTreeSet::new();
    let mut claim = |name: &str| {
        if names.insert(name.to_string()) {
            Ok(())
        } else {
            Err(ConfigError::DuplicateName(name.to_string()))
        }
    };

    let mut tasks = Vec::new();
    for sc in &raw.scenarios {
        claim(&sc.name)?;
        let task = format!("scenario `{}`", sc.name);
        if sc.theorems.is_empty() {
            return Err(invalid(&task, "theorems must not be empty"));
        }
        let f = parse_expr(&task, "f", "x", &sc.f)?;
        let h = parse_expr(&task, "h", "t", &sc.h)?;
        let mut scenario =
            Scenario::new(f, h, sc.s.0, sc.interval).map_err(|e| invalid(&task, e))?;
        if let Some(g) = &sc.g {
            scenario = scenario.with_g(parse_expr(&task, "g", "x", g)?);
        }
        if let Some(h2) = &sc.h2 {
            scenario = scenario.with_h2(parse_expr(&task, "h2", "t", h2)?);
        }
        scenario.quad = raw.quad;
        scenario.plan = raw.sampling;
        if sc.proof_normalized.unwrap_or(raw.proof_normalized) {
            scenario.normalization = Normalization::Proof;
        }
        for &id in &sc.theorems {
            tasks.push(Task {
                name: sc.name.clone(),
                kind: TaskKind::Theorem {
                    id,
                    scenario: Box::new(scenario.clone()),
                },
            });
        }
    }

    for cc in &raw.class_checks {
        claim(&cc.name)?;
        let task = format!("class check `{}`", cc.name);
        let f = parse_expr(&task, "f", "x", &cc.f)?;
        let h =
            cc.h.as_deref()
                .map(|h| parse_expr(&task, "h", "t", h))
                .transpose()?;
        let spec = ConvexityClassSpec::new(cc.class, h, cc.s.map(|s| s.0))
            .map_err(|e| invalid(&task, e))?;
        tasks.push(Task {
            name: cc.name.clone(),
            kind: TaskKind::Class {
                f,
                spec,
                interval: cc.interval,
            },
        });
    }

    let mut sweeps = Vec::new();
    for mc in &raw.means_checks {
        claim(&mc.name)?;
        let task = format!("means check `{}`", mc.name);
        if !(2.0 < mc.a && mc.a < mc.b && mc.b.is_finite()) {
            return Err(invalid(
                &task,
                format!("need 2 < a < b, got a = {}, b = {}", mc.a, mc.b),
            ));
        }
        match (mc.s, &mc.s_grid) {
            (Some(s), None) => tasks.push(Task {
                name: mc.name.clone(),
                kind: TaskKind::Means {
                    a: mc.a,
                    b: mc.b,
                    s: s.0,
                },
            }),
            (None, Some(grid)) => {
                for s in grid {
                    tasks.push(Task {
                        name: format!("{}[s={}]", mc.name, s.0),
                        kind: TaskKind::Means {
                            a: mc.a,
                            b: mc.b,
                            s: s.0,
                        },
                    });
                }
                sweeps.push(SweepSpec {
                    name: mc.name.clone(),
                    a: mc.a,
                    b: mc.b,
                    s_grid: grid.iter().map(|s| s.0).collect(),
                });
            }
            _ => {
                return Err(invalid(
                    &task,
                    "exactly one of `s` and `s_grid` is required",
                ))
            }
        }
    }

    if tasks.is_empty() && sweeps.is_empty() {
        return Err(ConfigError::NoTasks);
    }
    Ok(RunConfig {
        seed: raw.seed,
        quad: raw.quad,
        sampling: raw.sampling,
        output: raw.output,
        tasks,
        sweeps,
        digest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scenarios": [
            {"name": "sq", "f": "x^2", "interval": [0, 1], "theorems": ["T2"]}
        ]
    }"#;

    #[test]
    fn minimal_config_has_one_task() {
        let cfg = parse_config(MINIMAL).unwrap();
        assert_eq!(cfg.tasks.len(), 1);
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.output.format, Format::Json);
        match &cfg.tasks[0].kind {
            TaskKind::Theorem { id, scenario } => {
                assert_eq!(*id, TheoremId::T2);
                assert_eq!(scenario.s, 1.0);
                assert_eq!(scenario.h.to_string(), "t");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponent_out_of_range_names_the_key() {
        let text = MINIMAL.replace("\"f\": \"x^2\"", "\"f\": \"x^2\", \"s\": 1.5");
        let err = parse_config(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("s must be in (0,1]"), "{msg}");
        assert!(msg.contains("scenarios[0].s"), "{msg}");
    }

    #[test]
    fn parse_error_names_the_scenario() {
        let text = MINIMAL.replace("x^2", "ln(");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Expression { field: "f", .. }));
        let msg = err.to_string();
        assert!(msg.contains("`sq`"), "{msg}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("\"f\":", "\"hh\": \"t\", \"f\":");
        let msg = parse_config(&text).unwrap_err().to_string();
        assert!(msg.contains("scenarios[0]") && msg.contains("hh"), "{msg}");
        let top = r#"{"seeds": 1, "means_checks": [{"name": "m", "a": 3, "b": 4, "s": 1}]}"#;
        assert!(parse_config(top).is_err());
        let nested =
            r#"{"quad": {"abs_tol": 1}, "means_checks": [{"name": "m", "a": 3, "b": 4, "s": 1}]}"#;
        assert!(parse_config(nested)
            .unwrap_err()
            .to_string()
            .contains("quad"));
    }

    #[test]
    fn names_must_be_unique() {
        let text = r#"{
            "class_checks": [{"name": "a", "f": "x", "class": "ORDINARY_CONVEX", "interval": [0, 1]}],
            "means_checks": [{"name": "a", "a": 3, "b": 4, "s": 1}]
        }"#;
        assert!(matches!(parse_config(text), Err(ConfigError::DuplicateName(n)) if n == "a"));
    }

    #[test]
    fn empty_config_is_rejected() {
        assert!(matches!(parse_config("{}"), Err(ConfigError::NoTasks)));
    }

    #[test]
    fn means_needs_exactly_one_exponent_form() {
        let both = r#"{"means_checks": [{"name": "m", "a": 3, "b": 4, "s": 1, "s_grid": [0.5]}]}"#;
        assert!(parse_config(both).is_err());
        let neither = r#"{"means_checks": [{"name": "m", "a": 3, "b": 4}]}"#;
        assert!(parse_config(neither).is_err());
        let grid = r#"{"means_checks": [{"name": "m", "a": 3, "b": 4, "s_grid": [0.5, 1]}]}"#;
        let cfg = parse_config(grid).unwrap();
        assert_eq!(cfg.tasks.len(), 2);
        assert_eq!(cfg.tasks[0].name, "m[s=0.5]");
        assert_eq!(cfg.sweeps[0].s_grid, vec![0.5, 1.0]);
        let empty = r#"{"means_checks": [{"name": "m", "a": 3, "b": 4, "s_grid": []}]}"#;
        assert!(parse_config(empty).unwrap().tasks.is_empty());
    }

    #[test]
    fn class_check_requires_its_parameters() {
        let text =
            r#"{"class_checks": [{"name": "c", "f": "x", "class": "HS2", "interval": [0, 1]}]}"#;
        let msg = parse_config(text).unwrap_err().to_string();
        assert!(msg.contains("class check `c`"), "{msg}");
    }

    #[test]
    fn digest_ignores_formatting_and_key_order() {
        let a = r#"{"seed": 1, "means_checks": [{"name": "m", "a": 3, "b": 4, "s": 1}]}"#;
        let b = "{\n  \"means_checks\": [{\"s\": 1, \"b\": 4, \"a\": 3, \"name\": \"m\"}],\n  \"seed\": 1\n}";
        assert_eq!(digest(a).unwrap(), digest(b).unwrap());
        assert_ne!(
            digest(a).unwrap(),
            digest(&a.replace("\"seed\": 1", "\"seed\": 2")).unwrap()
        );
        assert_eq!(digest(a).unwrap().len(), 64);
    }

    #[test]
    fn proof_normalization_flags() {
        let text = r#"{
            "proof_normalized": true,
            "scenarios": [
                {"name": "a", "f": "x", "interval": [0, 1], "theorems": ["T3"]},
                {"name": "b", "f": "x", "interval": [0, 1], "theorems": ["T3"], "proof_normalized": false}
            ]
        }"#;
        let mut cfg = parse_config(text).unwrap();
        let norm = |cfg: &RunConfig, i: usize| match &cfg.tasks[i].kind {
            TaskKind::Theorem { scenario, .. } => scenario.normalization,
            _ => unreachable!(),
        };
        assert_eq!(norm(&cfg, 0), Normalization::Proof);
        assert_eq!(norm(&cfg, 1), Normalization::Statement);
        cfg.force_proof_normalized();
        assert_eq!(norm(&cfg, 1), Normalization::Proof);
    }
}

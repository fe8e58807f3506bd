//! JSON audit configuration: parsing, defaults and schema validation.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use dsic_core::{AlternativeSet, Interval, Tolerances, TypeGrid, TypeSpace};

pub const DEFAULT_RESOLUTION: usize = 5;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub(crate) fn schema(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Schema { field: field.into(), message: message.into() }
}

fn parse_error(e: serde_json::Error) -> ConfigError {
    ConfigError::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Every check the auditor can run, in the order they are documented.
pub const CHECK_NAMES: &[&str] = &[
    "cycle-monotonicity",
    "ic-verify",
    "revenue-equivalence",
    "pad",
    "non-imposition",
    "neutrality",
    "scf-neutrality",
    "anonymity",
    "binary-independence",
    "ch1",
    "pset-laws",
    "affine-fit",
    "calibrate-kappa",
    "neutralize-and-fit",
    "order-axioms",
    "order-fit",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar<T> {
    One(T),
    PerAgent(Vec<T>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MechanismSpec {
    Affine {
        lambda: Vec<f64>,
        kappa: Vec<f64>,
    },
    WeightedWelfare {
        lambda: Vec<f64>,
    },
    Efficient {},
    Example1 {},
    Constant {
        choice: String,
    },
    RandomAffine {
        #[serde(default = "default_kappa_max")]
        kappa_max: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    PerturbedTable {
        base: Box<MechanismSpec>,
        flip_count: usize,
        #[serde(default)]
        symmetric: bool,
        #[serde(default)]
        seed: Option<u64>,
    },
    Shifted {
        base: Box<MechanismSpec>,
        delta: Vec<f64>,
    },
    Table {
        /// One label per grid profile, in profile-index order.
        choices: Vec<String>,
    },
}

fn default_kappa_max() -> f64 {
    0.5
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PaymentSpec {
    /// Weighted VCG for an affine-family mechanism, with optional per-agent offsets.
    Vcg {
        #[serde(default)]
        offsets: Option<Vec<f64>>,
    },
    Example1 {},
    Zero {},
    Synthesized {},
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Pass,
    Fail,
    Inconclusive,
    Error,
}

impl Expectation {
    pub fn as_str(self) -> &'static str {
        match self {
            Expectation::Pass => "pass",
            Expectation::Fail => "fail",
            Expectation::Inconclusive => "inconclusive",
            Expectation::Error => "error",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckOptions {
    /// Draws for pset-laws, sample points for order-axioms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Translation shifts for order-axioms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<usize>,
    /// Labelled comparisons for order-fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparisons: Option<usize>,
    /// Fit on this many profiles before verifying on the full grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
    /// Overrides the anonymity sub-check of order-axioms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anonymous: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<Expectation>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub options: CheckOptions,
}

fn is_default(o: &CheckOptions) -> bool {
    *o == CheckOptions::default()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tie: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boost: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<f64>,
}

impl ToleranceOverrides {
    pub fn set(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        let slot = match name {
            "numeric" => &mut self.numeric,
            "tie" => &mut self.tie,
            "boost" => &mut self.boost,
            "fit" => &mut self.fit,
            _ => return Err(schema("tolerances", format!("unknown tolerance `{name}`; expected numeric, tie, boost or fit"))),
        };
        *slot = Some(value);
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    #[serde(default = "default_max_profiles")]
    pub max_profiles: usize,
    #[serde(default = "default_max_partners")]
    pub max_partners: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { max_profiles: default_max_profiles(), max_partners: default_max_partners() }
    }
}

fn default_max_profiles() -> usize {
    20_000
}

fn default_max_partners() -> usize {
    64
}

/// The raw document; `checks` entries are either a name or a [`CheckSpec`].
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    agents: usize,
    alternatives: Value,
    #[serde(rename = "box")]
    bounds: Scalar<[f64; 2]>,
    #[serde(default)]
    resolution: Option<Scalar<usize>>,
    mechanism: MechanismSpec,
    #[serde(default)]
    payments: Option<PaymentSpec>,
    checks: Vec<Value>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    #[serde(default)]
    sampling: SamplingConfig,
    #[serde(default)]
    seed: Option<u64>,
}

/// A validated audit configuration with defaults applied.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditConfig {
    pub agents: usize,
    pub alternatives: Vec<String>,
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    pub resolution: Vec<usize>,
    pub mechanism: MechanismSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payments: Option<PaymentSpec>,
    pub checks: Vec<CheckSpec>,
    pub tolerances: ToleranceOverrides,
    pub sampling: SamplingConfig,
    pub seed: Option<u64>,
}

fn per_agent<T: Clone>(v: Scalar<T>, n: usize, field: &str) -> Result<Vec<T>, ConfigError> {
    match v {
        Scalar::One(x) => Ok(vec![x; n]),
        Scalar::PerAgent(xs) if xs.len() == n => Ok(xs),
        Scalar::PerAgent(xs) => Err(schema(field, format!("expected {n} per-agent entries, found {}", xs.len()))),
    }
}

pub fn parse_config(text: &str) -> Result<AuditConfig, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(parse_error)?;
    let n = raw.agents;
    if n == 0 {
        return Err(schema("agents", "at least one agent is required"));
    }
    let alternatives = match raw.alternatives {
        Value::Number(k) => {
            let m = k.as_u64().ok_or_else(|| schema("alternatives", "expected a count or a list of labels"))? as usize;
            AlternativeSet::lettered(m).map_err(|e| schema("alternatives", e.to_string()))?.labels().to_vec()
        }
        Value::Array(items) => {
            let labels = items
                .into_iter()
                .map(|v| match v {
                    Value::String(s) => Ok(s),
                    _ => Err(schema("alternatives", "labels must be strings")),
                })
                .collect::<Result<Vec<_>, _>>()?;
            AlternativeSet::new(labels).map_err(|e| schema("alternatives", e.to_string()))?.labels().to_vec()
        }
        _ => return Err(schema("alternatives", "expected a count or a list of labels")),
    };
    let bounds = per_agent(raw.bounds, n, "box")?;
    let resolution = per_agent(raw.resolution.unwrap_or(Scalar::One(DEFAULT_RESOLUTION)), n, "resolution")?;
    let checks = raw
        .checks
        .into_iter()
        .enumerate()
        .map(|(i, v)| match v {
            Value::String(name) => Ok(CheckSpec { name, expect: None, options: CheckOptions::default() }),
            v @ Value::Object(_) => serde_json::from_value(v).map_err(|e| schema(format!("checks[{i}]"), e.to_string())),
            _ => Err(schema(format!("checks[{i}]"), "expected a check name or an object")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let config = AuditConfig {
        agents: n,
        alternatives,
        bounds,
        resolution,
        mechanism: raw.mechanism,
        payments: raw.payments,
        checks,
        tolerances: raw.tolerances,
        sampling: raw.sampling,
        seed: raw.seed,
    };
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<AuditConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), message: e.to_string() })?;
    parse_config(&text)
}

impl AuditConfig {
    pub fn space(&self) -> Result<TypeSpace, ConfigError> {
        let intervals = self
            .bounds
            .iter()
            .enumerate()
            .map(|(i, [lo, hi])| Interval::new(*lo, *hi).map_err(|e| schema(format!("box[{i}]"), e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        TypeSpace::new(intervals).map_err(|e| schema("box", e.to_string()))
    }

    pub fn grid(&self) -> Result<TypeGrid, ConfigError> {
        TypeGrid::new(self.space()?, self.resolution.clone(), self.alternatives.len())
            .map_err(|e| schema("box", e.to_string()))
    }

    pub fn tolerances(&self) -> Result<Tolerances, ConfigError> {
        let grid = self.grid()?;
        let mut tol = Tolerances::for_grid(&grid);
        let o = &self.tolerances;
        tol.numeric = o.numeric.unwrap_or(tol.numeric);
        tol.tie = o.tie.unwrap_or(tol.tie);
        tol.boost = o.boost.unwrap_or(tol.boost);
        tol.fit = o.fit.unwrap_or(tol.fit);
        tol.validate(Some(&grid)).map_err(|e| schema("tolerances", e.to_string()))?;
        Ok(tol)
    }

    pub fn label_index(&self, label: &str, field: &str) -> Result<usize, ConfigError> {
        self.alternatives
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| schema(field, format!("unknown alternative `{label}`")))
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = self.agents;
        let m = self.alternatives.len();
        if self.bounds.len() != n {
            return Err(schema("box", format!("expected {n} per-agent entries")));
        }
        if self.resolution.len() != n {
            return Err(schema("resolution", format!("expected {n} per-agent entries")));
        }
        if let Some(i) = self.resolution.iter().position(|&r| r == 0) {
            return Err(schema(format!("resolution[{i}]"), "must be at least 1"));
        }
        let grid = self.grid()?;
        self.validate_mechanism(&self.mechanism, "mechanism", &grid)?;
        if let Some(p) = &self.payments {
            match p {
                PaymentSpec::Vcg { offsets } => {
                    if affine_family(&self.mechanism).is_none() {
                        return Err(schema("payments", "vcg payments need an affine-family mechanism"));
                    }
                    if offsets.as_ref().is_some_and(|h| h.len() != n) {
                        return Err(schema("payments.offsets", format!("expected {n} entries")));
                    }
                }
                PaymentSpec::Example1 {} if n != 2 || m != 3 => {
                    return Err(schema("payments", "example1 payments need 2 agents and 3 alternatives"));
                }
                _ => {}
            }
        }
        if self.checks.is_empty() {
            return Err(schema("checks", "at least one check is required"));
        }
        for (i, c) in self.checks.iter().enumerate() {
            if !CHECK_NAMES.contains(&c.name.as_str()) {
                return Err(schema(
                    format!("checks[{i}]"),
                    format!("unknown check `{}`; valid checks: {}", c.name, CHECK_NAMES.join(", ")),
                ));
            }
        }
        if let Some(f) = [self.tolerances.numeric, self.tolerances.tie, self.tolerances.boost, self.tolerances.fit]
            .into_iter()
            .flatten()
            .find(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(schema("tolerances", format!("tolerances must be positive and finite, got {f}")));
        }
        self.tolerances()?;
        Ok(())
    }

    fn validate_mechanism(&self, spec: &MechanismSpec, field: &str, grid: &TypeGrid) -> Result<(), ConfigError> {
        let n = self.agents;
        let m = self.alternatives.len();
        let len = |v: &[f64], want: usize, name: &str| {
            if v.len() == want {
                Ok(())
            } else {
                Err(schema(format!("{field}.{name}"), format!("expected {want} entries, found {}", v.len())))
            }
        };
        match spec {
            MechanismSpec::Affine { lambda, kappa } => {
                len(lambda, n, "lambda")?;
                len(kappa, m, "kappa")
            }
            MechanismSpec::WeightedWelfare { lambda } => len(lambda, n, "lambda"),
            MechanismSpec::Efficient {} => Ok(()),
            MechanismSpec::Example1 {} => {
                if n != 2 || m != 3 {
                    return Err(schema(field, "example1 is defined for exactly 2 agents and 3 alternatives"));
                }
                if self.bounds.iter().any(|[lo, hi]| *lo < 0.0 || *hi > 1.0) {
                    return Err(schema("box", "example1 is defined on (0,1) boxes"));
                }
                Ok(())
            }
            MechanismSpec::Constant { choice } => self.label_index(choice, &format!("{field}.choice")).map(|_| ()),
            MechanismSpec::RandomAffine { kappa_max, .. } => {
                if kappa_max.is_finite() && *kappa_max >= 0.0 {
                    Ok(())
                } else {
                    Err(schema(format!("{field}.kappa_max"), "must be finite and non-negative"))
                }
            }
            MechanismSpec::PerturbedTable { base, .. } => self.validate_mechanism(base, &format!("{field}.base"), grid),
            MechanismSpec::Shifted { base, delta } => {
                len(delta, m, "delta")?;
                self.validate_mechanism(base, &format!("{field}.base"), grid)
            }
            MechanismSpec::Table { choices } => {
                if choices.len() != grid.profile_count() {
                    return Err(schema(
                        format!("{field}.choices"),
                        format!("expected {} entries (one per grid profile), found {}", grid.profile_count(), choices.len()),
                    ));
                }
                for (i, c) in choices.iter().enumerate() {
                    self.label_index(c, &format!("{field}.choices[{i}]"))?;
                }
                Ok(())
            }
        }
    }
}

/// The innermost affine-family spec under any shifts, if there is one.
pub(crate) fn affine_family(spec: &MechanismSpec) -> Option<&MechanismSpec> {
    match spec {
        MechanismSpec::Affine { .. }
        | MechanismSpec::WeightedWelfare { .. }
        | MechanismSpec::Efficient {}
        | MechanismSpec::RandomAffine { .. } => Some(spec),
        MechanismSpec::Shifted { base, .. } => affine_family(base),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "agents": 2,
        "alternatives": ["a", "b", "c"],
        "box": [0.0, 1.0],
        "mechanism": {"kind": "efficient"},
        "checks": ["pad"]
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.resolution, [5, 5]);
        assert_eq!(c.bounds, [[0.0, 1.0]; 2]);
        assert_eq!(c.seed, None);
        let tol = c.tolerances().unwrap();
        assert_eq!(tol, Tolerances::for_grid(&c.grid().unwrap()));
    }

    #[test]
    fn example1_needs_two_agents() {
        let text = MINIMAL.replace("\"agents\": 2", "\"agents\": 3").replace("efficient", "example1");
        let err = parse_config(&text).unwrap_err();
        assert!(matches!(err, ConfigError::Schema { ref field, .. } if field == "mechanism"), "{err}");
    }

    #[test]
    fn unknown_check_lists_valid_names() {
        let err = parse_config(&MINIMAL.replace("\"pad\"", "\"padd\"")).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("unknown check `padd`"));
        assert!(msg.contains("cycle-monotonicity"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(&MINIMAL.replace("\"agents\": 2", "\"agents\": 2, \"agnets\": 2")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 2, .. }), "{err}");
        let err = parse_config(&MINIMAL.replace("\"efficient\"}", "\"efficient\", \"lambda\": [1]}")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }), "{err}");
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = parse_config("{\n  \"agents\": 2,\n  oops\n}").unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 3, .. }), "{err}");
    }

    #[test]
    fn dimension_mismatches() {
        let text = MINIMAL.replace(r#"{"kind": "efficient"}"#, r#"{"kind": "affine", "lambda": [1, 1], "kappa": [0, 1]}"#);
        assert!(matches!(parse_config(&text), Err(ConfigError::Schema { ref field, .. }) if field == "mechanism.kappa"));
        let text = MINIMAL.replace("\"box\": [0.0, 1.0]", "\"box\": [[0, 1]]");
        assert!(matches!(parse_config(&text), Err(ConfigError::Schema { ref field, .. }) if field == "box"));
    }

    #[test]
    fn check_objects_carry_expectations() {
        let text = MINIMAL.replace("[\"pad\"]", r#"["pad", {"name": "affine-fit", "expect": "fail", "options": {"subsample": 100}}]"#);
        let c = parse_config(&text).unwrap();
        assert_eq!(c.checks[1].expect, Some(Expectation::Fail));
        assert_eq!(c.checks[1].options.subsample, Some(100));
    }

    #[test]
    fn lettered_alternatives() {
        let c = parse_config(&MINIMAL.replace("[\"a\", \"b\", \"c\"]", "4")).unwrap();
        assert_eq!(c.alternatives, ["a", "b", "c", "d"]);
    }
}

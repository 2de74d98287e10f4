//! Experiment configuration: a JSON document with one section per concern.

use std::fmt;
use std::path::PathBuf;

use ethavg::bounds::{CheckName, EquilibrationVariant};
use ethavg::models::{ModelKind, ModelSpec};
use ethavg::qcore::SubsystemOrder;
use ethavg::Tolerances;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub band: BandSpec,
    #[serde(default)]
    pub measurements: MeasurementSpec,
    #[serde(default)]
    pub initial_state: InitialStateSpec,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub ensemble: EnsembleSpec,
    #[serde(default)]
    pub sampling: SamplingSpec,
    #[serde(default)]
    pub equilibration_variant: EquilibrationVariant,
    #[serde(default)]
    pub thm3: Thm3Spec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

/// Which eigenstates form the band.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum BandSpec {
    /// Index quantiles [lo, hi] of the sorted spectrum, widened to whole
    /// degeneracy classes.
    Fractional { lo: f64, hi: f64 },
    /// Inclusive eigenvalue index range.
    Index { lo: usize, hi: usize },
    /// Energy window [e_min, e_min + width].
    Energy { e_min: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasurementSpec {
    /// One binary projective POVM per band eigenstate.
    #[default]
    Eigenbasis,
    RandomCoarse { n_povms: usize, outcomes: usize },
    Subsystem {
        dim_s: usize,
        #[serde(default)]
        order: SubsystemOrder,
    },
}

impl MeasurementSpec {
    pub fn is_subsystem(&self) -> bool {
        matches!(self, MeasurementSpec::Subsystem { .. })
    }
}

/// How each instance draws its pure initial state.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialStateSpec {
    /// Haar-random vector inside the band.
    #[default]
    BandHaar,
    /// Gaussian energy profile centred on the band with the given weight
    /// outside it.
    GaussianProfile { tail_weight: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSpec {
    pub n_seeds: usize,
    /// Instance i uses seed base_seed + i.
    pub base_seed: u64,
}

impl Default for EnsembleSpec {
    fn default() -> Self {
        Self { n_seeds: 1, base_seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingSpec {
    pub n_times: usize,
    /// Defaults to 10⁴ over the smallest level gap.
    pub t_max: Option<f64>,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        Self { n_times: 200, t_max: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thm3Spec {
    pub n_restarts: usize,
}

impl Default for Thm3Spec {
    fn default() -> Self {
        Self { n_restarts: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Dotted path of the offending key; empty for the whole document.
    pub path: String,
    pub message: String,
    /// The config is well formed but a check cannot run on it. `run`
    /// downgrades these to warnings and records the check as inapplicable.
    pub applicability: bool,
}

impl Diagnostic {
    fn error(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
            applicability: false,
        }
    }

    fn warning(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            ..Self::error(path, message)
        }
    }

    fn applicability(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            applicability: true,
            ..Self::error(path, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        if self.path.is_empty() {
            write!(f, "{level}: {}", self.message)
        } else {
            write!(f, "{level}: {}: {}", self.path, self.message)
        }
    }
}

/// Parses a config, returning it when it is schema-valid together with
/// every diagnostic found. Unknown keys are reported and dropped.
pub fn parse_config(text: &str) -> (Option<ExperimentConfig>, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let mut doc: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => return (None, vec![Diagnostic::error("", format!("not valid JSON: {e}"))]),
    };
    strip_unknown_keys(&mut doc, &mut diags);
    let config: ExperimentConfig = match serde_path_to_error::deserialize(doc) {
        Ok(c) => c,
        Err(e) => {
            let path = e.path().to_string();
            let path = if path == "." { String::new() } else { path };
            diags.push(Diagnostic::error(path, e.into_inner().to_string()));
            return (None, diags);
        }
    };
    diags.extend(semantic_diagnostics(&config));
    (Some(config), diags)
}

fn keys_of<T: Serialize>(value: &T) -> Vec<String> {
    match serde_json::to_value(value) {
        Ok(Value::Object(m)) => m.into_iter().map(|(k, _)| k).collect(),
        _ => Vec::new(),
    }
}

const TOP_LEVEL_KEYS: [&str; 11] = [
    "model",
    "band",
    "measurements",
    "initial_state",
    "checks",
    "ensemble",
    "sampling",
    "equilibration_variant",
    "thm3",
    "tolerances",
    "output",
];

/// Keys a tagged section accepts given its tag; `None` for an unknown tag,
/// which is left for deserialization to report.
fn tagged_keys(section: &str, tag: &str) -> Option<&'static [&'static str]> {
    Some(match (section, tag) {
        ("band", "fractional") | ("band", "index") => &["mode", "lo", "hi"],
        ("band", "energy") => &["mode", "e_min", "width"],
        ("measurements", "eigenbasis") => &["kind"],
        ("measurements", "random_coarse") => &["kind", "n_povms", "outcomes"],
        ("measurements", "subsystem") => &["kind", "dim_s", "order"],
        ("initial_state", "band_haar") => &["kind"],
        ("initial_state", "gaussian_profile") => &["kind", "tail_weight"],
        _ => return None,
    })
}

fn strip_unknown_keys(doc: &mut Value, diags: &mut Vec<Diagnostic>) {
    let Value::Object(root) = doc else { return };
    retain_known(root, "", &TOP_LEVEL_KEYS.map(String::from), diags);
    let struct_sections: [(&str, Vec<String>); 5] = [
        ("model", keys_of(&ModelSpec::default())),
        ("ensemble", keys_of(&EnsembleSpec::default())),
        ("sampling", keys_of(&SamplingSpec::default())),
        ("thm3", keys_of(&Thm3Spec::default())),
        ("tolerances", keys_of(&Tolerances::DEFAULT)),
    ];
    for (section, known) in &struct_sections {
        if let Some(Value::Object(m)) = root.get_mut(*section) {
            retain_known(m, section, known, diags);
        }
    }
    for (section, tag_key) in [("band", "mode"), ("measurements", "kind"), ("initial_state", "kind")] {
        if let Some(Value::Object(m)) = root.get_mut(section) {
            let tag = m.get(tag_key).and_then(Value::as_str).map(str::to_owned);
            if let Some(known) = tag.as_deref().and_then(|t| tagged_keys(section, t)) {
                let known: Vec<String> = known.iter().map(|s| s.to_string()).collect();
                retain_known(m, section, &known, diags);
            }
        }
    }
}

fn retain_known(map: &mut Map<String, Value>, prefix: &str, known: &[String], diags: &mut Vec<Diagnostic>) {
    let unknown: Vec<String> = map.keys().filter(|k| !known.contains(k)).cloned().collect();
    for key in unknown {
        let path = if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
        diags.push(Diagnostic::warning(path, format!("unknown key `{key}` is ignored")));
        map.remove(&key);
    }
}

/// A requested check name, possibly an alias covering several checks.
pub fn expand_check_name(name: &str, subsystem: bool) -> Option<Vec<CheckName>> {
    Some(match name {
        "thm1" => vec![CheckName::Thm1Rms, CheckName::Thm1Mean],
        "thm2" if subsystem => vec![CheckName::Thm2Subsystem],
        "thm2" => vec![CheckName::Thm2Finite],
        "thm3" if subsystem => vec![CheckName::Thm3Subsystem],
        "thm3" => vec![CheckName::Thm3Finite],
        other => vec![other.parse().ok()?],
    })
}

impl ExperimentConfig {
    /// The distinct checks to run, in canonical order. Unknown names are
    /// skipped; `parse_config` reports them.
    pub fn resolved_checks(&self) -> Vec<CheckName> {
        let subsystem = self.measurements.is_subsystem();
        let mut names: Vec<CheckName> = self
            .checks
            .iter()
            .filter_map(|n| expand_check_name(n, subsystem))
            .flatten()
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Why `name` cannot run on this configuration, if it cannot.
    pub fn inapplicability(&self, name: CheckName) -> Option<String> {
        let subsystem = self.measurements.is_subsystem();
        match name {
            CheckName::Thm2Subsystem | CheckName::Thm3Subsystem if !subsystem => {
                Some(format!("{name} requires subsystem measurements"))
            }
            CheckName::Thm2Finite | CheckName::Thm3Finite if subsystem => {
                Some(format!("{name} requires a finite measurement set"))
            }
            CheckName::Equilibration if subsystem && self.equilibration_variant == EquilibrationVariant::FiniteSet => {
                Some("equilibration with subsystem measurements requires equilibration_variant = subsystem_dimension".into())
            }
            CheckName::Thm1Rms | CheckName::Thm1Mean | CheckName::ConvexityChain
                if matches!(self.initial_state, InitialStateSpec::GaussianProfile { tail_weight } if tail_weight > 0.0) =>
            {
                Some(format!("{name} requires initial states supported in the band; use `tails`"))
            }
            CheckName::Thm2Finite | CheckName::Thm2Subsystem | CheckName::Thm3Finite | CheckName::Thm3Subsystem => {
                match self.band {
                    BandSpec::Index { lo, hi } if hi >= lo && hi - lo + 1 < 4 => {
                        Some(format!("{name} needs a band of at least 4 eigenstates"))
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

fn semantic_diagnostics(c: &ExperimentConfig) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let dim = match c.model.validate().and_then(|_| c.model.system_dim()) {
        Ok(d) => Some(d),
        Err(e) => {
            diags.push(Diagnostic::error("model", e.to_string()));
            None
        }
    };
    if c.model.seed != 0 && c.model.kind != ModelKind::SpinChain && c.model.kind != ModelKind::ExplicitDiagonal {
        diags.push(Diagnostic::warning(
            "model.seed",
            "replaced by the instance seed; set ensemble.base_seed instead",
        ));
    }

    match c.band {
        BandSpec::Fractional { lo, hi } => {
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo >= hi {
                diags.push(Diagnostic::error("band", "fractional window needs 0 <= lo < hi <= 1"));
            }
        }
        BandSpec::Index { lo, hi } => {
            if lo > hi {
                diags.push(Diagnostic::error("band", "index range needs lo <= hi"));
            } else if let Some(dim) = dim.filter(|&d| hi >= d) {
                diags.push(Diagnostic::error("band.hi", format!("index {hi} is outside a {dim}-level spectrum")));
            }
        }
        BandSpec::Energy { e_min, width } => {
            if !e_min.is_finite() || !(width.is_finite() && width >= 0.0) {
                diags.push(Diagnostic::error("band", "energy window needs finite e_min and width >= 0"));
            }
        }
    }

    match c.measurements {
        MeasurementSpec::Eigenbasis => {}
        MeasurementSpec::RandomCoarse { n_povms, outcomes } => {
            if n_povms == 0 {
                diags.push(Diagnostic::error("measurements.n_povms", "need at least one POVM"));
            }
            if outcomes < 2 {
                diags.push(Diagnostic::error("measurements.outcomes", "a POVM needs at least 2 outcomes"));
            }
        }
        MeasurementSpec::Subsystem { dim_s, .. } => {
            if dim_s == 0 || dim.is_some_and(|d| d % dim_s != 0) {
                diags.push(Diagnostic::error(
                    "measurements.dim_s",
                    format!("subsystem dimension {dim_s} must divide the system dimension"),
                ));
            }
        }
    }

    if let InitialStateSpec::GaussianProfile { tail_weight } = c.initial_state {
        if !(0.0..1.0).contains(&tail_weight) {
            diags.push(Diagnostic::error("initial_state.tail_weight", "must lie in [0, 1)"));
        }
    }

    let subsystem = c.measurements.is_subsystem();
    let mut seen = Vec::new();
    for (i, name) in c.checks.iter().enumerate() {
        let path = format!("checks[{i}]");
        match expand_check_name(name, subsystem) {
            None => diags.push(Diagnostic::error(path, format!("unknown check `{name}`"))),
            Some(names) => {
                for n in names {
                    if seen.contains(&n) {
                        diags.push(Diagnostic::warning(&path, format!("{n} is requested more than once")));
                        continue;
                    }
                    seen.push(n);
                    if let Some(reason) = c.inapplicability(n) {
                        diags.push(Diagnostic::applicability(&path, reason));
                    }
                }
            }
        }
    }

    if c.ensemble.n_seeds == 0 {
        diags.push(Diagnostic::error("ensemble.n_seeds", "need at least one seed"));
    }
    if c.sampling.n_times == 0 {
        diags.push(Diagnostic::error("sampling.n_times", "need at least one time sample"));
    }
    if let Some(t) = c.sampling.t_max {
        if !(t.is_finite() && t > 0.0) {
            diags.push(Diagnostic::error("sampling.t_max", "must be positive and finite"));
        }
    }
    if !(c.tolerances.bound_slack.is_finite() && c.tolerances.bound_slack >= 0.0) {
        diags.push(Diagnostic::error("tolerances.bound_slack", "must be finite and non-negative"));
    }
    let defaults = serde_json::to_value(Tolerances::DEFAULT).unwrap_or_default();
    let given = serde_json::to_value(c.tolerances).unwrap_or_default();
    if let (Value::Object(d), Value::Object(g)) = (defaults, given) {
        for (key, value) in g {
            if key != "bound_slack" && d.get(&key) != Some(&value) {
                diags.push(Diagnostic::warning(
                    format!("tolerances.{key}"),
                    "only bound_slack is applied by the harness; this override has no effect",
                ));
            }
        }
    }
    diags
}

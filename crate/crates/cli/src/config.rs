//! Experiment configuration, overrides and loading.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use walkbench_core::groups::GroupKind;
use walkbench_core::weight::parse_rational;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Diagnostic {
    #[default]
    DeficiencyProfile,
    LiouvilleScan,
    PiIterate,
    PoissonProduct,
    KvVerify,
    RelationsCheck,
    TransitivityProbe,
}

impl Diagnostic {
    pub const ALL: [Diagnostic; 7] = [
        Diagnostic::DeficiencyProfile,
        Diagnostic::LiouvilleScan,
        Diagnostic::PiIterate,
        Diagnostic::PoissonProduct,
        Diagnostic::KvVerify,
        Diagnostic::RelationsCheck,
        Diagnostic::TransitivityProbe,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Diagnostic::DeficiencyProfile => "deficiency-profile",
            Diagnostic::LiouvilleScan => "liouville-scan",
            Diagnostic::PiIterate => "pi-iterate",
            Diagnostic::PoissonProduct => "poisson-product",
            Diagnostic::KvVerify => "kv-verify",
            Diagnostic::RelationsCheck => "relations-check",
            Diagnostic::TransitivityProbe => "transitivity-probe",
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    #[serde(rename = "self")]
    SelfAction,
    #[default]
    RightRegular,
    DyadicLine,
    DyadicInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PowerKind {
    Tuple,
    Subsets,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSpec {
    pub kind: PowerKind,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PointMetricKind {
    #[default]
    CappedAbs,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ActionSpec {
    pub space: SpaceKind,
    pub power: Option<PowerSpec>,
    /// Metric on dyadic points.
    pub metric: PointMetricKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureKind {
    #[default]
    Lazy,
    UniformGenerators,
    UniformGroup,
    Atoms,
    File,
    Kv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeasureSpec {
    pub kind: MeasureKind,
    /// Mass at the identity for `lazy`.
    pub laziness: String,
    pub atoms: Vec<(String, String)>,
    pub path: Option<String>,
}

impl Default for MeasureSpec {
    fn default() -> Self {
        MeasureSpec { kind: MeasureKind::Lazy, laziness: "1/2".into(), atoms: Vec::new(), path: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Word metric where word lengths are available, displacement on F.
    #[default]
    Auto,
    Word,
    Displacement,
    Discrete,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct MetricSpec {
    pub kind: MetricKind,
    /// Word metric generators; empty means the standard ones.
    pub generators: Vec<String>,
    /// Displacement base points; empty means the defaults.
    pub base_points: Vec<String>,
}

fn one() -> String {
    "1".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FunctionSpec {
    /// `min(-1 + d(anchor, x) / width, 1)`.
    Valley {
        width: i64,
        #[serde(default)]
        anchor: Option<String>,
    },
    ClampedIdentity,
    FirstLetter {
        letter: char,
    },
    Mcshane {
        anchors: Vec<(String, String)>,
        #[serde(default = "one")]
        lipschitz: String,
        #[serde(default = "one")]
        cap: String,
    },
    Constant {
        value: String,
    },
}

impl FunctionSpec {
    pub fn label(&self) -> String {
        match self {
            FunctionSpec::Valley { width, .. } => format!("valley-{width}"),
            FunctionSpec::ClampedIdentity => "clamped-identity".into(),
            FunctionSpec::FirstLetter { letter } => format!("first-letter-{letter}"),
            FunctionSpec::Mcshane { anchors, .. } => format!("mcshane-{}", anchors.len()),
            FunctionSpec::Constant { value } => format!("constant-{value}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    #[default]
    Auto,
    LatticeBox,
    FiniteUniform,
    User,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KvSpec {
    pub depth: usize,
    /// Empty means `2^-(m+1)`.
    pub taus: Vec<String>,
    /// Empty means balls of radius `m`.
    pub chain: Vec<Vec<String>>,
    pub eps_factor: i64,
    pub oracle: OracleKind,
    /// Measure files, one per level, for the user oracle.
    pub user_levels: Vec<String>,
    pub levels: Vec<usize>,
    pub profile_n: u64,
    /// Empty means the generators.
    pub profile_elements: Vec<String>,
}

impl Default for KvSpec {
    fn default() -> Self {
        KvSpec {
            depth: 2,
            taus: Vec::new(),
            chain: Vec::new(),
            eps_factor: 2,
            oracle: OracleKind::Auto,
            user_levels: Vec::new(),
            levels: vec![1, 2],
            profile_n: 20,
            profile_elements: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeSpec {
    pub from: Option<String>,
    pub to: Option<String>,
    pub max_depth: u32,
    pub max_nodes: usize,
}

impl Default for ProbeSpec {
    fn default() -> Self {
        ProbeSpec { from: None, to: None, max_depth: 12, max_nodes: 200_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CapsSpec {
    /// Product sets and oracle supports in kv-verify.
    pub product: usize,
    /// Support of any convolution power.
    pub support: usize,
    /// Exact region of liouville-scan.
    pub domain: usize,
    /// Index tuples per level for Claim 1.
    pub tuple: usize,
    /// Largest support solved by the simplex backend.
    pub simplex_limit: usize,
}

impl Default for CapsSpec {
    fn default() -> Self {
        CapsSpec { product: 100_000, support: 1_000_000, domain: 200_000, tuple: 5_000, simplex_limit: 48 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Tsv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    pub dir: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub diagnostic: Diagnostic,
    pub mode: Mode,
    pub group: String,
    pub action: ActionSpec,
    pub measure: MeasureSpec,
    pub metric: MetricSpec,
    /// Test elements; empty means the generators.
    pub elements: Vec<String>,
    /// Sample points; `a..b` expands to the integers in between.
    pub sample: Vec<String>,
    pub functions: Vec<FunctionSpec>,
    pub n_max: u64,
    pub tol: String,
    pub prune: String,
    /// Oscillation below which liouville-scan reports evidence.
    pub threshold: String,
    pub seed: u64,
    pub trials: u64,
    pub kv: KvSpec,
    pub probe: ProbeSpec,
    pub gamma_pairs: Vec<(u32, u32)>,
    pub caps: CapsSpec,
    pub output: OutputSpec,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            diagnostic: Diagnostic::DeficiencyProfile,
            mode: Mode::Exact,
            group: "integer-lattice(1)".into(),
            action: ActionSpec::default(),
            measure: MeasureSpec::default(),
            metric: MetricSpec::default(),
            elements: Vec::new(),
            sample: Vec::new(),
            functions: Vec::new(),
            n_max: 20,
            tol: "0".into(),
            prune: "0".into(),
            threshold: "1/5".into(),
            seed: 0,
            trials: 4096,
            kv: KvSpec::default(),
            probe: ProbeSpec::default(),
            gamma_pairs: vec![(0, 2), (0, 3), (1, 3)],
            caps: CapsSpec::default(),
            output: OutputSpec::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn group_kind(&self) -> Result<GroupKind, CliError> {
        self.group.parse().map_err(|e| CliError::config(format!("group: {e}")))
    }

    /// Checks what deserialization cannot.
    pub fn validate(&self) -> Result<(), CliError> {
        let kind = self.group_kind()?;
        let rational = |field: &str, s: &str| {
            parse_rational(s).ok_or_else(|| CliError::config(format!("{field}: cannot read {s:?} as a number")))
        };
        let tol = rational("tol", &self.tol)?;
        let prune = rational("prune", &self.prune)?;
        rational("threshold", &self.threshold)?;
        rational("measure.laziness", &self.measure.laziness)?;
        if tol < num_traits::Zero::zero() || prune < num_traits::Zero::zero() {
            return Err(CliError::config("tol and prune must be non-negative"));
        }
        if self.n_max == 0 && self.diagnostic != Diagnostic::LiouvilleScan {
            return Err(CliError::config("n_max must be at least 1"));
        }
        let thompson = matches!(kind, GroupKind::ThompsonUnit | GroupKind::ThompsonLine);
        match self.action.space {
            SpaceKind::DyadicLine | SpaceKind::DyadicInterval if !thompson => {
                return Err(CliError::config("action.space: dyadic actions need thompson-unit or thompson-line"))
            }
            SpaceKind::SelfAction | SpaceKind::RightRegular if self.action.power.is_some() => {
                return Err(CliError::config("action.power applies to dyadic actions only"))
            }
            _ => {}
        }
        if let Some(p) = &self.action.power {
            if p.n == 0 {
                return Err(CliError::config("action.power.n must be at least 1"));
            }
        }
        if self.diagnostic == Diagnostic::RelationsCheck && !thompson {
            return Err(CliError::config("relations-check needs group thompson-unit or thompson-line"));
        }
        if self.diagnostic == Diagnostic::PoissonProduct && !self.functions.is_empty() && self.functions.len() < 2 {
            return Err(CliError::config("poisson-product needs two functions"));
        }
        if self.diagnostic == Diagnostic::TransitivityProbe && (self.probe.from.is_none() || self.probe.to.is_none()) {
            return Err(CliError::config("transitivity-probe needs probe.from and probe.to"));
        }
        if self.measure.kind == MeasureKind::File && self.measure.path.is_none() {
            return Err(CliError::config("measure.path is required for a file measure"));
        }
        if self.kv.eps_factor < 1 {
            return Err(CliError::config("kv.eps_factor must be at least 1"));
        }
        if self.caps.simplex_limit == 0 {
            return Err(CliError::config("caps.simplex_limit must be positive"));
        }
        if let Some(m) = self.kv.levels.iter().position(|&l| l == 0) {
            return Err(CliError::config(format!("kv.levels[{m}]: levels start at 1")));
        }
        Ok(())
    }
}

/// A config plus the overrides that produced it.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub overrides: Vec<String>,
}

/// Manifest layout, also accepted by `run` for replay.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub core_version: String,
    pub config: ExperimentConfig,
    pub overrides: Vec<String>,
    pub artifacts: Vec<ArtifactEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArtifactEntry {
    pub file: String,
    pub bytes: usize,
}

fn from_text<T: for<'de> Deserialize<'de>>(text: &str, source: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.inner();
        CliError::config(format!("{source}: line {}, column {}: field `{path}`: {inner}", inner.line(), inner.column()))
    })
}

fn from_value(v: Value) -> Result<ExperimentConfig, CliError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(format!("after overrides: field `{path}`: {}", e.inner()))
    })
}

/// Parses a config or a manifest. Manifests bring their recorded overrides.
pub fn parse_source(text: &str, source: &str) -> Result<Resolved, CliError> {
    let raw: Value = serde_json::from_str(text)
        .map_err(|e| CliError::config(format!("{source}: line {}, column {}: {e}", e.line(), e.column())))?;
    if raw.get("tool").is_some() && raw.get("config").is_some() {
        let m: Manifest = from_text(text, source)?;
        return Ok(Resolved { config: m.config, overrides: m.overrides });
    }
    Ok(Resolved { config: from_text(text, source)?, overrides: Vec::new() })
}

pub fn load(path: Option<&Path>) -> Result<Resolved, CliError> {
    match path {
        None => Ok(Resolved { config: ExperimentConfig::default(), overrides: Vec::new() }),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::config(format!("cannot read {}: {e}", p.display())))?;
            parse_source(&text, &p.display().to_string())
        }
    }
}

/// Applies `path=value` overrides; values are JSON when they parse, strings otherwise.
pub fn apply_overrides(base: Resolved, overrides: &[String]) -> Result<Resolved, CliError> {
    if overrides.is_empty() {
        return Ok(base);
    }
    let mut v = serde_json::to_value(&base.config).map_err(|e| CliError::config(e.to_string()))?;
    for o in overrides {
        let (path, value) =
            o.split_once('=').ok_or_else(|| CliError::config(format!("override {o:?} must look like path=value")))?;
        let value: Value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
        set_path(&mut v, path.trim(), value).map_err(|e| CliError::config(format!("override {o:?}: {e}")))?;
    }
    let config = from_value(v)?;
    let mut all = base.overrides;
    all.extend(overrides.iter().cloned());
    Ok(Resolved { config, overrides: all })
}

fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), String> {
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err("empty path segment".into());
    }
    let mut cur = root;
    for (i, k) in keys.iter().enumerate() {
        let last = i + 1 == keys.len();
        if let Ok(idx) = k.parse::<usize>() {
            let arr = cur.as_array_mut().ok_or_else(|| format!("`{k}` indexes a non-array"))?;
            let len = arr.len();
            let slot = arr.get_mut(idx).ok_or_else(|| format!("index {idx} out of range (length {len})"))?;
            if last {
                *slot = value;
                return Ok(());
            }
            cur = slot;
        } else {
            if cur.is_null() {
                *cur = Value::Object(Default::default());
            }
            let obj = cur.as_object_mut().ok_or_else(|| format!("`{k}` is not below an object"))?;
            if last {
                obj.insert(k.to_string(), value);
                return Ok(());
            }
            cur = obj.entry(k.to_string()).or_insert(Value::Null);
        }
    }
    Ok(())
}

pub fn to_pretty_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str, overrides: &[&str]) -> Result<Resolved, CliError> {
        let base = parse_source(text, "test.json")?;
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        apply_overrides(base, &o)
    }

    #[test]
    fn defaults_fill_missing_fields() {
        let r = resolve("{}", &[]).unwrap();
        assert_eq!(r.config, ExperimentConfig::default());
        r.config.validate().unwrap();
    }

    #[test]
    fn overrides_beat_the_file() {
        let r = resolve(r#"{"n_max": 5, "kv": {"depth": 3}}"#, &["n_max=9", "kv.levels=[1]", "group=free-group(2)"])
            .unwrap();
        assert_eq!(r.config.n_max, 9);
        assert_eq!(r.config.kv.depth, 3);
        assert_eq!(r.config.kv.levels, vec![1]);
        assert_eq!(r.config.group, "free-group(2)");
        assert_eq!(r.overrides.len(), 3);
    }

    #[test]
    fn nested_and_indexed_paths() {
        let r =
            resolve("{}", &["gamma_pairs.1.0=4", "probe.from=1/2", r#"action.power={"kind":"tuple","n":2}"#]).unwrap();
        assert_eq!(r.config.gamma_pairs[1], (4, 3));
        assert_eq!(r.config.probe.from.as_deref(), Some("1/2"));
        assert_eq!(r.config.action.power, Some(PowerSpec { kind: PowerKind::Tuple, n: 2 }));
        assert!(resolve("{}", &["gamma_pairs.9.0=1"]).is_err());
        assert!(resolve("{}", &["n_max"]).is_err());
        assert!(resolve("{}", &["n_max.x=1"]).is_err());
    }

    #[test]
    fn unknown_fields_report_their_location() {
        let e = resolve("{\n  \"n_max\": 1,\n  \"nmax\": 2\n}", &[]).unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("nmax"), "{e}");
        let e = resolve("{}", &["kv.dept=1"]).unwrap_err().to_string();
        assert!(e.contains("kv.dept"), "{e}");
    }

    #[test]
    fn manifest_round_trip() {
        let r = resolve("{}", &["n_max=4"]).unwrap();
        let m = Manifest {
            tool: "walkbench".into(),
            version: "0".into(),
            core_version: "0".into(),
            config: r.config.clone(),
            overrides: r.overrides.clone(),
            artifacts: Vec::new(),
        };
        let back = parse_source(&to_pretty_json(&m), "manifest.json").unwrap();
        assert_eq!(back.config, r.config);
        assert_eq!(back.overrides, vec!["n_max=4".to_string()]);
    }

    #[test]
    fn validation_catches_inconsistent_choices() {
        let bad = [
            vec!["action.space=dyadic-line"],
            vec!["diagnostic=relations-check"],
            vec!["diagnostic=transitivity-probe"],
            vec!["measure.kind=file"],
            vec!["tol=-1/2"],
            vec!["threshold=abc"],
            vec!["kv.levels=[1,0]"],
            vec!["group=thompson-line", "action.space=dyadic-line", r#"action.power={"kind":"subsets","n":0}"#],
        ];
        for o in bad {
            let r = resolve("{}", &o).unwrap();
            assert!(r.config.validate().is_err(), "{o:?}");
        }
    }
}

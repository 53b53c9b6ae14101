//! Plain-text configuration: `section.key = value` lines with `#` comments,
//! overridden by `--section.key value` flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use immersed_fsi::assembly::{Elasticity, FluidParams, SolidModel};
use immersed_fsi::bench::{Resolution, Scenario, ScenarioKind, StudyPlan};
use immersed_fsi::schemes::{SchemeConfig, SchemeKind};
use sha2::{Digest, Sha256};

/// Every accepted key with its default value and a one-line description.
/// `auto` defaults are resolved from other keys.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario.name", "ellipse-relax", "ellipse-relax or steady-circle"),
    ("scenario.center_x", "0.5", "curve center, x"),
    ("scenario.center_y", "0.5", "curve center, y"),
    ("scenario.a", "auto", "initial semi-axis along x"),
    ("scenario.b", "auto", "initial semi-axis along y"),
    ("scenario.reference_radius", "auto", "radius of the stress-free circle"),
    ("fluid.rho", "1", "fluid density"),
    ("fluid.mu", "0.1", "fluid viscosity"),
    ("fluid.gamma", "0.05", "pressure stabilization coefficient"),
    ("solid.rho", "1", "solid density"),
    ("solid.eps", "0.1", "solid thickness"),
    ("solid.model", "string", "string or membrane"),
    ("solid.lambda0", "1", "string tension coefficient"),
    ("solid.lambda1", "10", "string spring coefficient"),
    ("solid.stiffness", "1", "membrane spring coefficient"),
    ("mesh.n", "16", "fluid subdivisions per side"),
    ("mesh.m", "auto", "solid nodes"),
    ("scheme.kind", "monolithic", "monolithic, monolithic-linearized, inertial-split, inertial-split-corrected"),
    ("scheme.r", "1", "extrapolation order 0, 1 or 2"),
    ("scheme.tau", "0.01", "time step"),
    ("scheme.t_final", "0.5", "final time of `run`"),
    ("scheme.interface", "auto", "tracked, frozen or auto"),
    ("sweep.taus", "0.04,0.08,0.16,0.32,0.64,1.28", "time steps of `sweep`"),
    ("sweep.steps", "100", "steps per sweep point"),
    ("study.kind", "time", "time, space or global"),
    ("study.n", "64", "mesh of a time study"),
    ("study.taus", "0.064,0.032,0.016,0.008", "time-step ladder"),
    ("study.tau_ref", "auto", "reference time step (smallest ladder step / 8)"),
    ("study.tau", "0.0005", "time step of a space study"),
    ("study.ns", "8,16,32,64", "mesh ladder"),
    ("study.n_ref", "128", "reference mesh of space and global studies"),
    ("study.t_eval", "0.064", "time at which errors are measured"),
    ("mms.ns", "8,16,32,64", "mesh ladder of `stokes-mms`"),
    ("mms.mu", "1", "viscosity of `stokes-mms`"),
    ("output.dir", "out", "output directory"),
    ("output.snapshot_every", "0", "snapshot interval in steps (0: none)"),
];

/// Keys that do not influence any computed number and are left out of the
/// configuration hash.
fn is_output_key(key: &str) -> bool {
    key.starts_with("output.")
}

/// Where a configuration value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    Line(usize),
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `section.key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("{origin}: unknown key `{key}`")]
    UnknownKey { origin: Origin, key: String },
    #[error("line {line}: `{key}` already set on line {first}")]
    Duplicate { line: usize, key: String, first: usize },
    #[error("{origin}: `{key} = {value}`: {message}")]
    Invalid { origin: Origin, key: String, value: String, message: String },
}

/// Raw key/value table after merging defaults, file and flags.
#[derive(Debug, Clone)]
pub struct RawConfig {
    values: BTreeMap<&'static str, (String, Origin)>,
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().map(|k| k.0).find(|k| *k == key)
}

impl RawConfig {
    pub fn defaults() -> Self {
        RawConfig { values: KEYS.iter().map(|(k, v, _)| (*k, (v.to_string(), Origin::Default))).collect() }
    }

    /// Apply the lines of a configuration file.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen: BTreeMap<&'static str, usize> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: content.to_string() });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line, text: content.to_string() });
            }
            let key = known_key(key)
                .ok_or_else(|| ConfigError::UnknownKey { origin: Origin::Line(line), key: key.to_string() })?;
            if let Some(&first) = seen.get(key) {
                return Err(ConfigError::Duplicate { line, key: key.to_string(), first });
            }
            seen.insert(key, line);
            self.values.insert(key, (value.to_string(), Origin::Line(line)));
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        self.apply_text(&text)
    }

    /// Apply a `--section.key value` override.
    pub fn apply_flag(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let key = known_key(key).ok_or_else(|| ConfigError::UnknownKey { origin: Origin::Flag, key: key.to_string() })?;
        self.values.insert(key, (value.trim().to_string(), Origin::Flag));
        Ok(())
    }

    /// Keys still carrying their built-in default.
    pub fn defaulted(&self) -> Vec<&'static str> {
        self.values.iter().filter(|(_, (_, o))| *o == Origin::Default).map(|(k, _)| *k).collect()
    }

    fn get(&self, key: &'static str) -> (&str, &Origin) {
        let (v, o) = &self.values[key];
        (v, o)
    }

    fn invalid(&self, key: &'static str, message: impl Into<String>) -> ConfigError {
        let (value, origin) = self.get(key);
        ConfigError::Invalid { origin: origin.clone(), key: key.to_string(), value: value.to_string(), message: message.into() }
    }

    fn is_auto(&self, key: &'static str) -> bool {
        self.get(key).0 == "auto"
    }

    fn f64(&self, key: &'static str) -> Result<f64, ConfigError> {
        match self.get(key).0.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.invalid(key, "expected a finite number")),
        }
    }

    fn positive(&self, key: &'static str) -> Result<f64, ConfigError> {
        let v = self.f64(key)?;
        if v > 0.0 {
            Ok(v)
        } else {
            Err(self.invalid(key, "must be positive"))
        }
    }

    fn usize(&self, key: &'static str) -> Result<usize, ConfigError> {
        self.get(key).0.parse::<usize>().map_err(|_| self.invalid(key, "expected a non-negative integer"))
    }

    fn list<T: std::str::FromStr>(&self, key: &'static str, what: &str) -> Result<Vec<T>, ConfigError> {
        let text = self.get(key).0;
        let items: Result<Vec<T>, _> = text.split(',').map(|s| s.trim().parse::<T>()).collect();
        match items {
            Ok(v) if !v.is_empty() => Ok(v),
            _ => Err(self.invalid(key, format!("expected a comma-separated list of {what}"))),
        }
    }

    fn resolve(&mut self, key: &'static str, value: String) {
        let origin = self.values[key].1.clone();
        self.values.insert(key, (value, origin));
    }
}

/// Parameters of `stokes-mms`.
#[derive(Debug, Clone, PartialEq)]
pub struct MmsConfig {
    pub ns: Vec<usize>,
    pub mu: f64,
    pub gamma: f64,
}

/// Fully typed and validated configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub resolution: Resolution,
    pub scheme: SchemeConfig,
    pub sweep_taus: Vec<f64>,
    pub sweep_steps: usize,
    pub study: StudyPlan,
    pub mms: MmsConfig,
    pub output_dir: PathBuf,
    pub snapshot_every: usize,
    /// Effective `key = value` lines in key-table order, `auto` resolved.
    effective: Vec<(String, String)>,
}

fn check_ladder<T: Copy>(raw: &RawConfig, key: &'static str, xs: &[T], halving: bool, ratio: impl Fn(T, T) -> f64) -> Result<(), ConfigError> {
    for w in xs.windows(2) {
        let q = if halving { ratio(w[0], w[1]) } else { ratio(w[1], w[0]) };
        if (q - 2.0).abs() > 1e-9 {
            let order = if halving { "halve" } else { "double" };
            return Err(raw.invalid(key, format!("successive entries must {order}")));
        }
    }
    Ok(())
}

impl RunConfig {
    /// Type-check, resolve `auto` values and validate.
    pub fn from_raw(mut raw: RawConfig) -> Result<Self, ConfigError> {
        let name = raw.get("scenario.name").0.to_string();
        let kind = ScenarioKind::parse(&name)
            .ok_or_else(|| raw.invalid("scenario.name", "expected ellipse-relax or steady-circle"))?;
        let preset = Scenario::preset(kind);
        for (key, value) in
            [("scenario.a", preset.a), ("scenario.b", preset.b), ("scenario.reference_radius", preset.reference_radius)]
        {
            if raw.is_auto(key) {
                raw.resolve(key, format!("{value}"));
            }
        }
        let fluid = FluidParams { rho: raw.positive("fluid.rho")?, mu: raw.positive("fluid.mu")? };
        let gamma = raw.f64("fluid.gamma")?;
        if gamma < 0.0 {
            return Err(raw.invalid("fluid.gamma", "must be non-negative"));
        }
        let elasticity = match raw.get("solid.model").0 {
            "string" => {
                Elasticity::GeneralizedString { lambda0: raw.f64("solid.lambda0")?, lambda1: raw.f64("solid.lambda1")? }
            }
            "membrane" => Elasticity::Membrane { stiffness: raw.positive("solid.stiffness")? },
            _ => return Err(raw.invalid("solid.model", "expected string or membrane")),
        };
        for key in ["solid.lambda0", "solid.lambda1"] {
            if raw.f64(key)? < 0.0 {
                return Err(raw.invalid(key, "must be non-negative"));
            }
        }
        let solid = SolidModel { rho_s: raw.positive("solid.rho")?, eps: raw.positive("solid.eps")?, elasticity };
        let scenario = Scenario {
            kind,
            center: [raw.f64("scenario.center_x")?, raw.f64("scenario.center_y")?],
            a: raw.positive("scenario.a")?,
            b: raw.positive("scenario.b")?,
            reference_radius: raw.positive("scenario.reference_radius")?,
            fluid,
            solid,
            gamma,
        };
        if kind == ScenarioKind::SteadyCircle && scenario.a != scenario.b {
            return Err(raw.invalid("scenario.b", "a steady circle needs scenario.a = scenario.b"));
        }

        let n = raw.usize("mesh.n")?;
        if n == 0 {
            return Err(raw.invalid("mesh.n", "must be at least 1"));
        }
        if raw.is_auto("mesh.m") {
            raw.resolve("mesh.m", scenario.solid_nodes_for(n).to_string());
        }
        let m = raw.usize("mesh.m")?;
        if m < 3 {
            return Err(raw.invalid("mesh.m", "a closed curve needs at least 3 nodes"));
        }

        let scheme_kind = SchemeKind::parse(raw.get("scheme.kind").0).ok_or_else(|| {
            raw.invalid("scheme.kind", "expected monolithic, monolithic-linearized, inertial-split or inertial-split-corrected")
        })?;
        let r = raw.usize("scheme.r")?;
        if r > 2 {
            return Err(raw.invalid("scheme.r", "must be 0, 1 or 2"));
        }
        if scheme_kind == SchemeKind::InertialSplit && r == 0 {
            return Err(raw.invalid("scheme.r", "the uncorrected inertial split needs r >= 1"));
        }
        let tau = raw.positive("scheme.tau")?;
        let t_final = raw.f64("scheme.t_final")?;
        if t_final < 0.0 {
            return Err(raw.invalid("scheme.t_final", "must be non-negative"));
        }
        if immersed_fsi::schemes::steps_to(t_final, tau).is_err() {
            return Err(raw.invalid("scheme.t_final", "must be a whole number of time steps"));
        }
        let interface_frozen = match raw.get("scheme.interface").0 {
            "auto" => scheme_kind == SchemeKind::MonolithicLinearized,
            "frozen" => true,
            "tracked" if scheme_kind == SchemeKind::MonolithicLinearized => {
                return Err(raw.invalid("scheme.interface", "the linearized scheme always freezes the interface"))
            }
            "tracked" => false,
            _ => return Err(raw.invalid("scheme.interface", "expected tracked, frozen or auto")),
        };
        raw.resolve("scheme.interface", if interface_frozen { "frozen" } else { "tracked" }.into());
        let scheme = SchemeConfig { kind: scheme_kind, r, tau, t_final, fluid, solid, gamma, interface_frozen };

        let sweep_taus: Vec<f64> = raw.list("sweep.taus", "numbers")?;
        if sweep_taus.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(raw.invalid("sweep.taus", "time steps must be positive"));
        }
        let sweep_steps = raw.usize("sweep.steps")?;

        let taus: Vec<f64> = raw.list("study.taus", "numbers")?;
        if taus.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(raw.invalid("study.taus", "time steps must be positive"));
        }
        check_ladder(&raw, "study.taus", &taus, true, |a, b| a / b)?;
        if raw.is_auto("study.tau_ref") {
            let min = taus.iter().copied().fold(f64::INFINITY, f64::min);
            raw.resolve("study.tau_ref", format!("{}", min / 8.0));
        }
        let tau_ref = raw.positive("study.tau_ref")?;
        let ns: Vec<usize> = raw.list("study.ns", "integers")?;
        if ns.contains(&0) {
            return Err(raw.invalid("study.ns", "meshes need at least one subdivision"));
        }
        check_ladder(&raw, "study.ns", &ns, false, |a, b| a as f64 / b as f64)?;
        let n_ref = raw.usize("study.n_ref")?;
        let t_eval = raw.positive("study.t_eval")?;
        let study = match raw.get("study.kind").0 {
            "time" => StudyPlan::Time { n: raw.usize("study.n")?, taus, tau_ref, t_eval },
            "space" => StudyPlan::Space { tau: raw.positive("study.tau")?, ns, n_ref, t_eval },
            "global" => {
                if ns.len() != taus.len() {
                    return Err(raw.invalid("study.ns", "a global study needs as many meshes as time steps"));
                }
                StudyPlan::Global { ns, taus, n_ref, tau_ref, t_eval }
            }
            _ => return Err(raw.invalid("study.kind", "expected time, space or global")),
        };

        let mms_ns: Vec<usize> = raw.list("mms.ns", "integers")?;
        if mms_ns.contains(&0) {
            return Err(raw.invalid("mms.ns", "meshes need at least one subdivision"));
        }
        check_ladder(&raw, "mms.ns", &mms_ns, false, |a, b| a as f64 / b as f64)?;
        let mms = MmsConfig { ns: mms_ns, mu: raw.positive("mms.mu")?, gamma };

        let output_dir = PathBuf::from(raw.get("output.dir").0);
        let snapshot_every = raw.usize("output.snapshot_every")?;

        let effective = KEYS.iter().map(|(k, _, _)| (k.to_string(), raw.get(k).0.to_string())).collect();
        Ok(RunConfig {
            scenario,
            resolution: Resolution { n, m },
            scheme,
            sweep_taus,
            sweep_steps,
            study,
            mms,
            output_dir,
            snapshot_every,
            effective,
        })
    }

    /// Parse a file (if any) and apply overrides in order.
    pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<(Self, Vec<&'static str>), ConfigError> {
        let mut raw = RawConfig::defaults();
        if let Some(p) = path {
            raw.apply_file(p)?;
        }
        for (k, v) in overrides {
            raw.apply_flag(k, v)?;
        }
        let defaulted = raw.defaulted();
        Ok((Self::from_raw(raw)?, defaulted))
    }

    /// Effective configuration, one `key = value` line per key.
    pub fn effective_text(&self) -> String {
        self.effective.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    /// Effective value of `key` as text.
    pub fn value(&self, key: &str) -> Option<&str> {
        self.effective.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// SHA-256 of every effective line that influences results.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for (k, v) in self.effective.iter().filter(|(k, _)| !is_output_key(k)) {
            h.update(format!("{k} = {v}\n").as_bytes());
        }
        format!("{:x}", h.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, flags: &[(&str, &str)]) -> Result<RunConfig, ConfigError> {
        let mut raw = RawConfig::defaults();
        raw.apply_text(text)?;
        for (k, v) in flags {
            raw.apply_flag(k, v)?;
        }
        RunConfig::from_raw(raw)
    }

    #[test]
    fn empty_file_gives_defaults() {
        let c = parse("", &[]).unwrap();
        assert_eq!(c.scheme.kind, SchemeKind::Monolithic);
        assert_eq!(c.value("scenario.a"), Some("0.25"));
        assert_eq!(c.value("study.tau_ref"), Some("0.001"));
        assert_eq!(c.effective_text().lines().count(), KEYS.len());
    }

    #[test]
    fn comments_and_whitespace() {
        let c = parse("# header\n  scheme.tau = 0.02   # trailing\n\nscheme.t_final=0.2\n", &[]).unwrap();
        assert_eq!(c.scheme.tau, 0.02);
        assert_eq!(c.scheme.t_final, 0.2);
    }

    #[test]
    fn negative_tau_names_line() {
        let err = parse("\nscheme.tau = -1\n", &[]).unwrap_err();
        assert!(matches!(&err, ConfigError::Invalid { origin: Origin::Line(2), .. }), "{err}");
        assert!(err.to_string().starts_with("line 2:"));
    }

    #[test]
    fn unknown_key_names_line() {
        let err = parse("scheme.tau = 0.1\nscheme.tua = 0.1\n", &[]).unwrap_err();
        assert!(matches!(err, ConfigError::UnknownKey { origin: Origin::Line(2), .. }));
    }

    #[test]
    fn type_mismatch() {
        let err = parse("mesh.n = sixteen\n", &[]).unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn flag_overrides_file() {
        let c = parse("scheme.kind = inertial-split-corrected\nscheme.r = 1\n", &[("scheme.r", "2")]).unwrap();
        assert_eq!(c.scheme.r, 2);
    }

    #[test]
    fn syntax_and_duplicates() {
        assert!(matches!(parse("scheme.tau 0.1\n", &[]), Err(ConfigError::Syntax { line: 1, .. })));
        assert!(matches!(
            parse("mesh.n = 8\nmesh.n = 16\n", &[]),
            Err(ConfigError::Duplicate { line: 2, first: 1, .. })
        ));
    }

    #[test]
    fn ladders_must_be_powers_of_two() {
        assert!(parse("study.ns = 8,16,24\n", &[]).is_err());
        assert!(parse("study.taus = 0.1,0.05,0.02\n", &[]).is_err());
    }

    #[test]
    fn hash_ignores_output_keys() {
        let a = parse("output.dir = one\n", &[]).unwrap();
        let b = parse("output.dir = two\noutput.snapshot_every = 5\n", &[]).unwrap();
        let c = parse("mesh.n = 8\n", &[]).unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
    }
}

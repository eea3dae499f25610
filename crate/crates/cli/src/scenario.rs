//! Scenario files.
//!
//! Plain `key = value` lines with dotted sections; `#` starts a comment.
//! SNRs and the threshold are given in power dB, lengths in metres.
//!
//! ```text
//! id = low-scatter-best
//! rf.M = 3
//! rf.l = M            # track the number of relays: best estimate
//! rf.rho = 0.9
//! fso.alpha = 11
//! fso.beta = 4
//! fso.rho_M = 1
//! sweep.mu1_eq_mu2_db = 0:40:5
//! ```
//!
//! `fso.alpha`, `fso.beta`, `fso.rho_M`, `rf.M`, `rf.l` and `rf.rho` are
//! required; everything else defaults to the reference link of
//! [`rfso_core::presets`] with μ₁ = μ₂ = 30 dB.

use std::fmt;
use std::path::Path;

use rfso_core::analytic::{Scenario, SeriesControl};
use rfso_core::channel::{FsoGeometry, FsoHopParams, MalagaParams, PointingParams, RfHopParams};
use rfso_core::presets;

use crate::sweep::{SweepSpec, SweepVar};

/// ρ above this is outside the analytic model and is clamped there.
pub const RHO_MAX: f64 = 0.999;

pub const DEFAULT_SNR_DB: f64 = 30.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Rank `l` of the selected relay among the M outdated estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rank {
    Index(u32),
    /// `l = M`, following M in sweeps.
    Best,
}

impl Rank {
    pub fn resolve(&self, relays: u32) -> u32 {
        match *self {
            Rank::Index(l) => l,
            Rank::Best => relays,
        }
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Index(l) => write!(f, "{l}"),
            Rank::Best => f.write_str("M"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub id: String,
    pub gamma_th_db: f64,
    pub mu1_db: f64,
    pub rho: f64,
    pub relays: u32,
    pub rank: Rank,
    pub mu2_db: f64,
    pub malaga: MalagaParams,
    pub geometry: FsoGeometry,
    pub pointing: PointingParams,
    pub series: SeriesControl,
    pub sweeps: Vec<SweepSpec>,
}

/// A scenario ready to evaluate. `scenario` keeps the given ρ; the analytic
/// methods use `analytic`, which has ρ clamped to [`RHO_MAX`].
#[derive(Debug, Clone)]
pub struct Built {
    pub scenario: Scenario,
    pub analytic: Scenario,
    pub warnings: Vec<String>,
}

impl ScenarioFile {
    pub fn build(&self) -> rfso_core::Result<Built> {
        let relays = self.relays;
        let fso = FsoHopParams {
            malaga: self.malaga,
            pointing: self.pointing,
            geometry: self.geometry,
            mu2: db_to_linear(self.mu2_db),
        }
        .derive()?;
        let rf = RfHopParams::new(db_to_linear(self.mu1_db), self.rho, relays, self.rank.resolve(relays))?;
        let mut scenario = Scenario::new(rf, fso, db_to_linear(self.gamma_th_db))?;
        scenario.series = self.series;
        scenario.validate()?;
        let mut analytic = scenario.clone();
        let mut warnings = Vec::new();
        if self.rho > RHO_MAX {
            analytic.rf.rho = RHO_MAX;
            warnings.push(format!(
                "rf.rho = {} clamped to {RHO_MAX} for the analytic methods",
                self.rho
            ));
        }
        Ok(Built {
            scenario,
            analytic,
            warnings,
        })
    }

    /// Copy with one sweep variable set to `value`.
    pub fn with(&self, var: SweepVar, value: f64) -> ScenarioFile {
        let mut s = self.clone();
        match var {
            SweepVar::Mu1Db => s.mu1_db = value,
            SweepVar::Mu2Db => s.mu2_db = value,
            SweepVar::Mu1EqMu2Db => {
                s.mu1_db = value;
                s.mu2_db = value;
            }
            SweepVar::SigmaS => s.pointing.sigma_s = value,
            SweepVar::Relays => s.relays = value as u32,
            SweepVar::Rho => s.rho = value,
            SweepVar::RhoM => s.malaga.rho_m = value,
        }
        s
    }

    /// Every point of every sweep in file order, or the scenario itself when
    /// there is no sweep.
    pub fn points(&self) -> Vec<Point> {
        if self.sweeps.is_empty() {
            return vec![Point {
                sweep: None,
                file: self.clone(),
            }];
        }
        self.sweeps
            .iter()
            .flat_map(|sw| {
                sw.values().into_iter().map(|v| Point {
                    sweep: Some((sw.var, v)),
                    file: self.with(sw.var, v),
                })
            })
            .collect()
    }

    /// Canonical text form; [`parse`] of it gives back an equal value.
    pub fn emit(&self) -> String {
        let m = &self.malaga;
        let g = &self.geometry;
        let p = &self.pointing;
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        line("id", self.id.clone());
        line("gamma_th_db", format!("{:?}", self.gamma_th_db));
        line("rf.mu1_db", format!("{:?}", self.mu1_db));
        line("rf.rho", format!("{:?}", self.rho));
        line("rf.M", self.relays.to_string());
        line("rf.l", self.rank.to_string());
        line("fso.mu2_db", format!("{:?}", self.mu2_db));
        line("fso.alpha", format!("{:?}", m.alpha));
        line("fso.beta", m.beta.to_string());
        line("fso.rho_M", format!("{:?}", m.rho_m));
        line("fso.b0", format!("{:?}", m.b0));
        line("fso.omega", format!("{:?}", m.omega));
        line("fso.phi_ab", format!("{:?}", m.phi_ab));
        line("fso.wavelength", format!("{:?}", g.wavelength));
        line("fso.distance", format!("{:?}", g.distance));
        line("fso.cn2", format!("{:?}", g.cn2));
        line("fso.chi", format!("{:?}", g.chi));
        line("fso.a", format!("{:?}", p.a));
        line("fso.a0", format!("{:?}", p.a0));
        line("fso.f0", format!("{:?}", p.f0));
        line("fso.sigma_s", format!("{:?}", p.sigma_s));
        line("series.t_max", self.series.t_max.to_string());
        line("series.rel_tol", format!("{:?}", self.series.rel_tol));
        for sw in &self.sweeps {
            line(&format!("sweep.{}", sw.var), sw.value_text());
        }
        out
    }
}

/// One evaluation point of a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub sweep: Option<(SweepVar, f64)>,
    pub file: ScenarioFile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub line: Option<usize>,
    pub key: String,
    pub message: String,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(l) = self.line {
            write!(f, "line {l}: ")?;
        }
        if self.key.is_empty() {
            f.write_str(&self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{origin}: {} problem(s)\n{}", .problems.len(), list(.problems))]
    Invalid {
        origin: String,
        problems: Vec<Problem>,
    },
}

fn list(problems: &[Problem]) -> String {
    problems
        .iter()
        .map(|p| format!("  {p}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub file: ScenarioFile,
    pub warnings: Vec<String>,
}

pub fn load(path: &Path) -> Result<Loaded, LoadError> {
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scenario".into());
    parse(&text, &path.display().to_string(), &stem)
}

struct Entry {
    line: usize,
    key: String,
    value: String,
    used: bool,
}

#[derive(Clone, Copy)]
enum Check {
    Any,
    Positive,
    NonNegative,
    Unit,
    NonZero,
}

impl Check {
    fn test(self, v: f64) -> Option<&'static str> {
        let ok = match self {
            Check::Any => v.is_finite(),
            Check::Positive => v.is_finite() && v > 0.0,
            Check::NonNegative => v.is_finite() && v >= 0.0,
            Check::Unit => (0.0..=1.0).contains(&v),
            Check::NonZero => v.is_finite() && v != 0.0,
        };
        if ok {
            return None;
        }
        Some(match self {
            Check::Any => "must be finite",
            Check::Positive => "must be positive",
            Check::NonNegative => "must be ≥ 0",
            Check::Unit => "must lie in [0, 1]",
            Check::NonZero => "must be finite and non-zero",
        })
    }
}

struct Reader {
    entries: Vec<Entry>,
    problems: Vec<Problem>,
}

impl Reader {
    fn problem(&mut self, line: Option<usize>, key: &str, message: impl Into<String>) {
        self.problems.push(Problem {
            line,
            key: key.to_string(),
            message: message.into(),
        });
    }

    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        let e = self.entries.iter_mut().find(|e| e.key == key)?;
        e.used = true;
        Some((e.line, e.value.clone()))
    }

    /// Parsed value, the default when absent, or `None` after recording a
    /// problem.
    fn parse<T: std::str::FromStr>(&mut self, key: &str, default: Option<T>) -> Option<(Option<usize>, T)> {
        match self.take(key) {
            Some((line, text)) => match text.parse::<T>() {
                Ok(v) => Some((Some(line), v)),
                Err(_) => {
                    self.problem(Some(line), key, format!("cannot parse `{text}`"));
                    None
                }
            },
            None => match default {
                Some(d) => Some((None, d)),
                None => {
                    self.problem(None, key, "missing required key");
                    None
                }
            },
        }
    }

    fn float(&mut self, key: &str, default: Option<f64>, check: Check) -> f64 {
        match self.parse::<f64>(key, default) {
            Some((line, v)) => {
                if let Some(msg) = check.test(v) {
                    self.problem(line, key, format!("{msg}, got {v}"));
                }
                v
            }
            None => f64::NAN,
        }
    }

    fn uint(&mut self, key: &str, default: Option<u64>, min: u64) -> u64 {
        match self.parse::<u64>(key, default) {
            Some((line, v)) => {
                if v < min {
                    self.problem(line, key, format!("must be at least {min}, got {v}"));
                }
                v
            }
            None => min,
        }
    }
}

const KEYS: [&str; 23] = [
    "id",
    "gamma_th_db",
    "rf.mu1_db",
    "rf.rho",
    "rf.M",
    "rf.l",
    "fso.mu2_db",
    "fso.alpha",
    "fso.beta",
    "fso.rho_M",
    "fso.b0",
    "fso.omega",
    "fso.phi_ab",
    "fso.wavelength",
    "fso.distance",
    "fso.cn2",
    "fso.chi",
    "fso.a",
    "fso.a0",
    "fso.f0",
    "fso.sigma_s",
    "series.t_max",
    "series.rel_tol",
];

/// Parses scenario text. `origin` names the source in errors and
/// `default_id` is used when the file has no `id`.
pub fn parse(text: &str, origin: &str, default_id: &str) -> Result<Loaded, LoadError> {
    let mut r = Reader {
        entries: Vec::new(),
        problems: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            r.problem(Some(line), "", format!("expected `key = value`, got `{content}`"));
            continue;
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) && !key.starts_with("sweep.") {
            r.problem(Some(line), key, "unknown key");
            continue;
        }
        if let Some(prev) = r.entries.iter().find(|e| e.key == key) {
            let first = prev.line;
            r.problem(Some(line), key, format!("duplicate key (first set on line {first})"));
            continue;
        }
        r.entries.push(Entry {
            line,
            key: key.to_string(),
            value: value.to_string(),
            used: false,
        });
    }

    let defaults = presets::malaga(&presets::SCATTERING[0]);
    let pointing = presets::pointing(1.0);
    let series = SeriesControl::default();

    let id = r
        .take("id")
        .map(|(line, v)| (Some(line), v))
        .unwrap_or((None, default_id.to_string()));
    if id.1.is_empty()
        || !id
            .1
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
    {
        r.problem(id.0, "id", format!("`{}` must be non-empty and use only A-Z a-z 0-9 - _ .", id.1));
    }
    let gamma_th_db = r.float("gamma_th_db", Some(10.0 * presets::GAMMA_TH.log10()), Check::Any);
    let mu1_db = r.float("rf.mu1_db", Some(DEFAULT_SNR_DB), Check::Any);
    let rho = r.float("rf.rho", None, Check::Unit);
    let relays = r.uint("rf.M", None, 1);
    let rank = match r.take("rf.l") {
        None => {
            r.problem(None, "rf.l", "missing required key");
            Rank::Index(1)
        }
        Some((_, v)) if v == "M" => Rank::Best,
        Some((line, v)) => match v.parse::<u32>() {
            Ok(l) if l >= 1 && u64::from(l) <= relays => Rank::Index(l),
            Ok(l) => {
                r.problem(Some(line), "rf.l", format!("rank {l} outside 1..={relays}"));
                Rank::Index(l)
            }
            Err(_) => {
                r.problem(Some(line), "rf.l", format!("expected an integer or `M`, got `{v}`"));
                Rank::Index(1)
            }
        },
    };
    let mu2_db = r.float("fso.mu2_db", Some(DEFAULT_SNR_DB), Check::Any);
    let malaga = MalagaParams {
        alpha: r.float("fso.alpha", None, Check::Positive),
        beta: r.uint("fso.beta", None, 1).min(u64::from(u32::MAX)) as u32,
        rho_m: r.float("fso.rho_M", None, Check::Unit),
        b0: r.float("fso.b0", Some(defaults.b0), Check::Positive),
        omega: r.float("fso.omega", Some(defaults.omega), Check::NonNegative),
        phi_ab: r.float("fso.phi_ab", Some(defaults.phi_ab), Check::Any),
    };
    let geometry = FsoGeometry {
        wavelength: r.float("fso.wavelength", Some(presets::GEOMETRY.wavelength), Check::Positive),
        distance: r.float("fso.distance", Some(presets::GEOMETRY.distance), Check::Positive),
        cn2: r.float("fso.cn2", Some(presets::GEOMETRY.cn2), Check::Positive),
        chi: r.float("fso.chi", Some(presets::GEOMETRY.chi), Check::NonNegative),
    };
    let pointing = PointingParams {
        a: r.float("fso.a", Some(pointing.a), Check::Positive),
        a0: r.float("fso.a0", Some(pointing.a0), Check::Positive),
        f0: r.float("fso.f0", Some(pointing.f0), Check::NonZero),
        sigma_s: r.float("fso.sigma_s", Some(pointing.sigma_s), Check::Positive),
    };
    let series = SeriesControl {
        t_max: r.uint("series.t_max", Some(series.t_max as u64), 1) as usize,
        rel_tol: r.float("series.rel_tol", Some(series.rel_tol), Check::Positive),
    };
    if series.rel_tol >= 1.0 {
        r.problem(None, "series.rel_tol", "must be below 1");
    }

    let mut sweeps = Vec::new();
    let mut sweep_lines = Vec::new();
    let pending: Vec<(usize, String, String)> = r
        .entries
        .iter()
        .filter(|e| !e.used && e.key.starts_with("sweep."))
        .map(|e| (e.line, e.key.clone(), e.value.clone()))
        .collect();
    for (line, key, value) in pending {
        let parsed = key["sweep.".len()..]
            .parse::<SweepVar>()
            .and_then(|var| SweepSpec::parse(var, &value));
        match parsed {
            Ok(sw) => {
                sweeps.push(sw);
                sweep_lines.push((line, key));
            }
            Err(msg) => r.problem(Some(line), &key, msg),
        }
    }

    let file = ScenarioFile {
        id: id.1,
        gamma_th_db,
        mu1_db,
        rho,
        relays: relays.min(u64::from(u32::MAX)) as u32,
        rank,
        mu2_db,
        malaga,
        geometry,
        pointing,
        series,
        sweeps,
    };

    // cross-key checks only make sense once every key is individually valid
    let mut warnings = Vec::new();
    if r.problems.is_empty() {
        match file.build() {
            Ok(b) => warnings.extend(b.warnings),
            Err(e) => r.problem(None, "", e.to_string()),
        }
        for (sw, (line, key)) in file.sweeps.iter().zip(&sweep_lines) {
            let mut seen = std::collections::HashSet::new();
            for v in sw.values() {
                match file.with(sw.var, v).build() {
                    Ok(b) => {
                        for w in b.warnings {
                            if seen.insert(w.clone()) {
                                warnings.push(format!("{key} = {v}: {w}"));
                            }
                        }
                    }
                    Err(e) => {
                        r.problem(Some(*line), key, format!("at {v}: {e}"));
                        break;
                    }
                }
            }
        }
    }

    if r.problems.is_empty() {
        Ok(Loaded { file, warnings })
    } else {
        Err(LoadError::Invalid {
            origin: origin.to_string(),
            problems: r.problems,
        })
    }
}

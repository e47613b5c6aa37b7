//! Run configuration: a sectioned `key = value` text file.
//!
//! ```text
//! # comments start with '#' or ';'
//! [run]
//! command = sweep            # solve | identity | poincare | sweep | rigidity
//!
//! [domain]
//! id = disk                  # used as domain_id in reports
//! cone_angle = 2pi           # number or pi expression: pi/2, 3pi/4, 2*pi
//! radius = constant 1        # constant R | fourier a0 m:a ... | circle cx cy r | table t:r ... [periodic]
//! samples = 256
//! orientation = 0            # rotation of the cone's first ray
//!
//! [mesh]
//! h_target = 0.025
//! degree = 2
//! refinements = 2            # extra uniform refinements (levels = refinements + 1)
//! curved = true
//!
//! [sweep]
//! mode = 3
//! epsilons = 0.02, 0.04, 0.08
//! reestimate_largest = false
//!
//! [poincare]
//! alpha = 0, 0.5, 1
//!
//! [output]
//! dir = out
//! svg = on
//! export_field = false
//! ```
//!
//! Every section is optional except `[domain]`; unknown sections and keys,
//! duplicate keys and malformed values are rejected with the line number.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::geometry::{Cone2D, DomainSpec, RadiusFn};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Solve,
    Identity,
    Poincare,
    Sweep,
    Rigidity,
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "solve" => Command::Solve,
            "identity" => Command::Identity,
            "poincare" => Command::Poincare,
            "sweep" => Command::Sweep,
            "rigidity" => Command::Rigidity,
            _ => return Err(Error::ConfigValue(format!("unknown command '{s}'"))),
        })
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Command::Solve => "solve",
            Command::Identity => "identity",
            Command::Poincare => "poincare",
            Command::Sweep => "sweep",
            Command::Rigidity => "rigidity",
        })
    }
}

#[derive(Debug, Clone)]
pub struct DomainConfig {
    pub id: String,
    pub cone_angle: f64,
    pub radius: RadiusFn,
    pub samples: usize,
    pub orientation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeshConfig {
    pub h_target: f64,
    pub degree: usize,
    pub refinements: usize,
    pub curved: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub mode: u32,
    pub epsilons: Vec<f64>,
    pub reestimate_largest: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub svg: bool,
    pub export_field: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub domain: DomainConfig,
    pub mesh: MeshConfig,
    pub sweep: Option<SweepConfig>,
    pub alphas: Vec<f64>,
    pub output: OutputConfig,
}

const KEYS: [(&str, &[&str]); 6] = [
    ("run", &["command"]),
    ("domain", &["id", "cone_angle", "radius", "samples", "orientation"]),
    ("mesh", &["h_target", "degree", "refinements", "curved"]),
    ("sweep", &["mode", "epsilons", "reestimate_largest"]),
    ("poincare", &["alpha"]),
    ("output", &["dir", "svg", "export_field"]),
];

/// `value` with the line it came from.
type Entries = BTreeMap<(String, String), (usize, String)>;

fn scan(text: &str) -> Result<Entries> {
    let mut out = Entries::new();
    let mut section: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Config { line: line_no, message };
        let line = raw.split(['#', ';']).next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| err(format!("malformed section header '{line}'")))?.trim();
            if !KEYS.iter().any(|(s, _)| *s == name) {
                return Err(err(format!("unknown section [{name}]")));
            }
            section = Some(KEYS.iter().find(|(s, _)| *s == name).unwrap().0);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
        let (key, value) = (key.trim(), value.trim());
        let sec = section.ok_or_else(|| err(format!("key '{key}' outside any section")))?;
        let allowed = KEYS.iter().find(|(s, _)| *s == sec).unwrap().1;
        if !allowed.contains(&key) {
            return Err(err(format!("unknown key '{key}' in [{sec}]")));
        }
        if value.is_empty() {
            return Err(err(format!("empty value for '{key}'")));
        }
        if out.insert((sec.to_string(), key.to_string()), (line_no, value.to_string())).is_some() {
            return Err(err(format!("duplicate key '{key}' in [{sec}]")));
        }
    }
    Ok(out)
}

/// Parses a number or a multiple/fraction of π: `pi`, `2pi`, `2*pi`,
/// `pi/2`, `3pi/4`, `0.5`.
pub fn parse_angle(s: &str) -> Option<f64> {
    let s = s.replace(' ', "").to_ascii_lowercase();
    if let Ok(v) = s.parse::<f64>() {
        return Some(v);
    }
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.to_string(), b.parse::<f64>().ok()?),
        None => (s.clone(), 1.0),
    };
    let coeff = num.strip_suffix("pi")?.trim_end_matches('*');
    let c = if coeff.is_empty() { 1.0 } else { coeff.parse::<f64>().ok()? };
    Some(c * PI / den)
}

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "on" | "yes" | "1" => Some(true),
        "false" | "off" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn parse_list(s: &str) -> Option<Vec<f64>> {
    s.split(',').map(|v| v.trim().parse::<f64>().ok()).collect()
}

fn parse_pairs(words: &[&str]) -> Option<Vec<(f64, f64)>> {
    words
        .iter()
        .map(|w| {
            let (a, b) = w.split_once(':')?;
            Some((parse_angle(a)?, b.parse().ok()?))
        })
        .collect()
}

/// Radius function from its one-line description.
pub fn parse_radius(s: &str) -> Result<RadiusFn> {
    let words: Vec<&str> = s.split_whitespace().collect();
    let bad = || Error::ConfigValue(format!("cannot parse radius '{s}'"));
    let num = |w: &str| w.parse::<f64>().map_err(|_| bad());
    match words.as_slice() {
        ["constant", r] => Ok(RadiusFn::constant(num(r)?)),
        ["fourier", a0, modes @ ..] => {
            let modes = modes
                .iter()
                .map(|w| {
                    let (m, a) = w.split_once(':').ok_or_else(bad)?;
                    Ok((m.parse::<u32>().map_err(|_| bad())?, num(a)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RadiusFn::fourier(num(a0)?, modes))
        }
        ["circle", cx, cy, r] => Ok(RadiusFn::offset_circle([num(cx)?, num(cy)?], num(r)?)),
        ["table", rest @ ..] => {
            let (periodic, knots) = match rest.split_last() {
                Some((&"periodic", k)) => (true, k),
                _ => (false, rest),
            };
            RadiusFn::table(&parse_pairs(knots).ok_or_else(bad)?, periodic)
        }
        _ => Err(bad()),
    }
}

struct Reader {
    entries: Entries,
}

impl Reader {
    fn get<T>(&self, sec: &str, key: &str, parse: impl Fn(&str) -> Option<T>, what: &str) -> Result<Option<T>> {
        match self.entries.get(&(sec.to_string(), key.to_string())) {
            None => Ok(None),
            Some((line, v)) => parse(v)
                .map(Some)
                .ok_or_else(|| Error::Config { line: *line, message: format!("[{sec}] {key}: expected {what}, got '{v}'") }),
        }
    }

    fn check<T>(&self, sec: &str, key: &str, value: T, ok: impl Fn(&T) -> bool, what: &str) -> Result<T> {
        if ok(&value) {
            return Ok(value);
        }
        let line = self.entries.get(&(sec.to_string(), key.to_string())).map_or(0, |e| e.0);
        Err(Error::Config { line, message: format!("[{sec}] {key}: {what}") })
    }

    fn has_section(&self, sec: &str) -> bool {
        self.entries.keys().any(|(s, _)| s == sec)
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let r = Reader { entries: scan(text)? };
        let command = r.get("run", "command", |s| s.parse().ok(), "a command name")?;

        if !r.has_section("domain") {
            return Err(Error::ConfigValue("missing [domain] section".into()));
        }
        let id = r.get("domain", "id", |s| Some(s.to_string()), "a name")?.unwrap_or_else(|| "domain".into());
        let id = r.check("domain", "id", id, |s| !s.contains([',', '"', '\n']), "id must not contain ',' or quotes")?;
        let cone_angle = r
            .get("domain", "cone_angle", parse_angle, "an angle")?
            .ok_or_else(|| Error::ConfigValue("[domain] cone_angle is required".into()))?;
        let radius = match r.entries.get(&("domain".into(), "radius".into())) {
            Some((line, v)) => parse_radius(v).map_err(|e| Error::Config { line: *line, message: e.to_string() })?,
            None => RadiusFn::constant(1.0),
        };
        let samples = r.get("domain", "samples", |s| s.parse().ok(), "an integer")?.unwrap_or(256);
        let samples = r.check("domain", "samples", samples, |&n| n >= 8, "must be at least 8")?;
        let orientation = r.get("domain", "orientation", parse_angle, "an angle")?.unwrap_or(0.0);

        let h_target = r.get("mesh", "h_target", |s| s.parse().ok(), "a number")?.unwrap_or(0.05);
        let h_target = r.check("mesh", "h_target", h_target, |&h: &f64| h > 0.0 && h.is_finite(), "must be positive")?;
        let degree = r.get("mesh", "degree", |s| s.parse().ok(), "1 or 2")?.unwrap_or(2);
        let degree = r.check("mesh", "degree", degree, |d| [1, 2].contains(d), "must be 1 or 2")?;
        let refinements = r.get("mesh", "refinements", |s| s.parse().ok(), "an integer")?.unwrap_or(0);
        let refinements = r.check("mesh", "refinements", refinements, |&n| n <= 5, "at most 5")?;
        let curved = r.get("mesh", "curved", parse_bool, "a boolean")?.unwrap_or(true);

        let sweep = if r.has_section("sweep") {
            let mode = r.get("sweep", "mode", |s| s.parse().ok(), "a positive integer")?.unwrap_or(3);
            let mode = r.check("sweep", "mode", mode, |&m| m >= 1, "must be at least 1")?;
            let epsilons = r.get("sweep", "epsilons", parse_list, "a comma-separated list of numbers")?.unwrap_or_default();
            let epsilons = r.check("sweep", "epsilons", epsilons, |e| !e.is_empty(), "epsilon list is empty")?;
            let epsilons =
                r.check("sweep", "epsilons", epsilons, |e| e.iter().all(|&x| x > 0.0 && x < 1.0), "each epsilon must lie in (0, 1)")?;
            let reestimate_largest = r.get("sweep", "reestimate_largest", parse_bool, "a boolean")?.unwrap_or(false);
            Some(SweepConfig { mode, epsilons, reestimate_largest })
        } else {
            None
        };

        let alphas = r.get("poincare", "alpha", parse_list, "a comma-separated list")?.unwrap_or_else(|| vec![0.0]);
        let alphas = r.check(
            "poincare",
            "alpha",
            alphas,
            |a| !a.is_empty() && a.iter().all(|x| [0.0, 0.5, 1.0].contains(x)),
            "each alpha must be 0, 0.5 or 1",
        )?;

        let output = OutputConfig {
            dir: r.get("output", "dir", |s| Some(PathBuf::from(s)), "a path")?,
            svg: r.get("output", "svg", parse_bool, "on or off")?.unwrap_or(true),
            export_field: r.get("output", "export_field", parse_bool, "a boolean")?.unwrap_or(false),
        };

        let cfg = RunConfig {
            command,
            domain: DomainConfig { id, cone_angle, radius, samples, orientation },
            mesh: MeshConfig { h_target, degree, refinements, curved },
            sweep,
            alphas,
            output,
        };
        cfg.domain_spec()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The validated domain described by `[domain]`.
    pub fn domain_spec(&self) -> Result<DomainSpec> {
        let d = &self.domain;
        let spec = DomainSpec::new(Cone2D::new(d.cone_angle)?, d.radius.clone(), d.samples)?;
        Ok(if d.orientation != 0.0 { spec.rotated(d.orientation) } else { spec })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SWEEP: &str = "
[run]
command = sweep
[domain]
id = disk
cone_angle = 2pi   # full plane
radius = constant 1
samples = 128
[mesh]
h_target = 0.05
[sweep]
mode = 3
epsilons = 0.02, 0.04, 0.08
";

    #[test]
    fn parses_a_sweep_config() {
        let c = RunConfig::parse(SWEEP).unwrap();
        assert_eq!(c.command, Some(Command::Sweep));
        assert!((c.domain.cone_angle - 2.0 * PI).abs() < 1e-15);
        assert_eq!(c.mesh.degree, 2);
        assert_eq!(c.sweep.unwrap().epsilons, vec![0.02, 0.04, 0.08]);
        assert!(c.output.svg);
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi/2"), Some(PI / 2.0));
        assert_eq!(parse_angle("3pi/4"), Some(3.0 * PI / 4.0));
        assert_eq!(parse_angle("2*pi"), Some(2.0 * PI));
        assert_eq!(parse_angle("1.25"), Some(1.25));
        assert_eq!(parse_angle("pie"), None);
    }

    #[test]
    fn radius_functions() {
        assert!(parse_radius("constant 2").unwrap().is_constant());
        let f = parse_radius("fourier 1 3:0.05 4:0.01").unwrap();
        assert!((f.value(0.0) - 1.06).abs() < 1e-14);
        assert!(parse_radius("circle 0.3 0 1").is_ok());
        assert!(parse_radius("table 0:1 pi/2:1.1 pi:1").is_ok());
        assert!(parse_radius("ellipse 1 2").is_err());
    }

    fn line_of(e: Error) -> usize {
        match e {
            Error::Config { line, .. } => line,
            other => panic!("expected a located config error, got {other:?}"),
        }
    }

    #[test]
    fn strict_keys_with_line_numbers() {
        assert_eq!(line_of(RunConfig::parse("[domain]\ncone_angle = pi\nradiu = constant 1\n").unwrap_err()), 3);
        assert_eq!(line_of(RunConfig::parse("[domain]\ncone_angle = pi\n[plots]\n").unwrap_err()), 3);
        assert_eq!(line_of(RunConfig::parse("[domain]\ncone_angle = pi\ncone_angle = pi\n").unwrap_err()), 3);
        assert_eq!(line_of(RunConfig::parse("[domain]\ncone_angle = pi\n[mesh]\ndegree = 3\n").unwrap_err()), 4);
        assert_eq!(line_of(RunConfig::parse("cone_angle = pi\n").unwrap_err()), 1);
    }

    #[test]
    fn validation_errors() {
        let empty = SWEEP.replace("epsilons = 0.02, 0.04, 0.08", "epsilons = 0.02,,");
        assert!(RunConfig::parse(&empty).is_err());
        let missing = "[domain]\nradius = constant 1\n";
        assert!(matches!(RunConfig::parse(missing), Err(Error::ConfigValue(_))));
        let negative = "[domain]\ncone_angle = pi/2\nradius = fourier 1 3:2\n";
        assert!(RunConfig::parse(negative).is_err());
        assert!(RunConfig::parse("[mesh]\nh_target = 0.1\n").is_err());
    }
}

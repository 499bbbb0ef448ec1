//! Run configuration: command-line flags layered over an optional TOML file,
//! then defaults. Every field that fell through to a default is recorded so
//! the summary can echo it.

use crate::error::CliError;
use clap::{Args, Subcommand, ValueEnum};
use sde_rand_em_core::{
    DriftFamily, DriftSpec, Error, ObservableKind, Scheme, TestFunction, DEFAULT_ANCHOR,
    DEFAULT_TRUNCATION, REFERENCE_FACTOR,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Strong-error ladder and order fit for one scheme.
    Converge,
    /// Both schemes on the same Brownian paths.
    Compare,
    /// Randomised versus left-point quadrature of a scalar test function.
    Quadrature,
    /// Pathwise quadrature-error probes along the randomised scheme.
    Iprobe,
    /// Built-in oracle checks.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Converge => "converge",
            Command::Compare => "compare",
            Command::Quadrature => "quadrature",
            Command::Iprobe => "iprobe",
            Command::Selftest => "selftest",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Comma-separated resolutions, or a dyadic range `2^a..2^b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Ladder(pub Vec<usize>);

impl FromStr for Ladder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some((lo, hi)) = s.split_once("..") {
            let exp = |t: &str| -> Result<u32, String> {
                t.trim()
                    .strip_prefix("2^")
                    .ok_or_else(|| format!("range bound `{t}` is not of the form 2^k"))?
                    .parse::<u32>()
                    .map_err(|e| format!("bad exponent in `{t}`: {e}"))
            };
            let (a, b) = (exp(lo)?, exp(hi)?);
            if a > b || b > 40 {
                return Err(format!("empty or oversized range `{s}`"));
            }
            return Ok(Ladder((a..=b).map(|k| 1usize << k).collect()));
        }
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| format!("bad resolution `{t}`: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Ladder)
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Values(pub Vec<f64>);

impl FromStr for Values {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| format!("bad number `{t}`: {e}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Values)
    }
}

// Settings shared by the flags and the config file. Everything is optional
// here; `RunConfig::resolve` fills the gaps.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// TOML file with any of these settings; flags win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Drift family: zero, constant, time-only, product, weierstrass.
    #[arg(long)]
    pub family: Option<String>,
    /// Time Hölder exponent in (0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Space Hölder exponent in (0, 1].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Drift bound K.
    #[arg(long)]
    pub k: Option<f64>,
    /// State dimension.
    #[arg(long)]
    pub d: Option<usize>,
    /// Location of the time singularity.
    #[arg(long)]
    pub anchor: Option<f64>,
    /// Weierstrass truncation level L.
    #[arg(long)]
    pub truncation: Option<u32>,
    /// randomised or standard.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Second-probe weight: unit or smooth-decay.
    #[arg(long)]
    pub observable: Option<String>,
    /// Quadrature test function: power, weierstrass, affine, constant.
    #[arg(long)]
    pub g: Option<String>,
    /// Resolutions, e.g. `16,32,64` or `2^4..2^9`.
    #[arg(long)]
    pub ns: Option<Ladder>,
    /// Reference resolution.
    #[arg(long)]
    pub nref: Option<usize>,
    /// Monte Carlo samples M.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Moment order p ≥ 1.
    #[arg(long)]
    pub p: Option<f64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fine factor for the probes.
    #[arg(long)]
    pub q: Option<usize>,
    /// Initial state; a single value is broadcast to every component.
    #[arg(long)]
    pub x0: Option<Values>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG log-log plot.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub svg: Option<bool>,
    /// Exit with status 3 when a slope band fails.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub strict: Option<bool>,
    /// Worker threads.
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Settings {
    /// Fields set here win over `other`.
    fn overlay(self, other: Settings) -> Settings {
        Settings {
            config: self.config.or(other.config),
            family: self.family.or(other.family),
            alpha: self.alpha.or(other.alpha),
            beta: self.beta.or(other.beta),
            k: self.k.or(other.k),
            d: self.d.or(other.d),
            anchor: self.anchor.or(other.anchor),
            truncation: self.truncation.or(other.truncation),
            scheme: self.scheme.or(other.scheme),
            observable: self.observable.or(other.observable),
            g: self.g.or(other.g),
            ns: self.ns.or(other.ns),
            nref: self.nref.or(other.nref),
            samples: self.samples.or(other.samples),
            p: self.p.or(other.p),
            seed: self.seed.or(other.seed),
            q: self.q.or(other.q),
            x0: self.x0.or(other.x0),
            out: self.out.or(other.out),
            svg: self.svg.or(other.svg),
            strict: self.strict.or(other.strict),
            workers: self.workers.or(other.workers),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Strong-error ladder and order fit for one scheme
    Converge(Settings),
    /// Randomised and standard ladders on shared randomness
    Compare(Settings),
    /// Randomised and left-point quadrature of a test function
    Quadrature(Settings),
    /// Decay of the time-irregularity probes
    Iprobe(Settings),
    /// Quick internal consistency checks
    Selftest(Settings),
}

impl CliCommand {
    pub fn split(self) -> (Command, Settings) {
        match self {
            CliCommand::Converge(s) => (Command::Converge, s),
            CliCommand::Compare(s) => (Command::Compare, s),
            CliCommand::Quadrature(s) => (Command::Quadrature, s),
            CliCommand::Iprobe(s) => (Command::Iprobe, s),
            CliCommand::Selftest(s) => (Command::Selftest, s),
        }
    }
}

pub const DEFAULT_SEED: u64 = 20_240_917;

/// A fully resolved and validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub family: DriftFamily,
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
    pub d: usize,
    pub anchor: f64,
    pub truncation: u32,
    pub scheme: Scheme,
    pub observable: ObservableKind,
    pub g: String,
    pub ns: Vec<usize>,
    pub n_ref: usize,
    pub samples: usize,
    pub p: f64,
    pub seed: u64,
    pub q: usize,
    pub x0: Vec<f64>,
    pub out: PathBuf,
    pub svg: bool,
    pub strict: bool,
    pub workers: usize,
    /// Names of the fields that took their default value.
    pub defaulted: Vec<&'static str>,
}

struct Defaults<'a> {
    taken: &'a mut Vec<&'static str>,
}

impl Defaults<'_> {
    fn pick<T>(&mut self, field: &'static str, value: Option<T>, default: impl FnOnce() -> T) -> T {
        value.unwrap_or_else(|| {
            self.taken.push(field);
            default()
        })
    }
}

fn parse_field<T: FromStr>(field: &'static str, raw: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    raw.parse::<T>()
        .map_err(|e| CliError::config(field, e.to_string()))
}

fn default_ladder(command: Command) -> Vec<usize> {
    let (a, b) = match command {
        Command::Quadrature => (4, 12),
        Command::Iprobe => (6, 8),
        _ => (4, 9),
    };
    (a..=b).map(|k| 1usize << k).collect()
}

fn default_samples(command: Command) -> usize {
    match command {
        Command::Quadrature => 2000,
        Command::Iprobe => 200,
        _ => 500,
    }
}

/// Core configuration errors report core field names; map them onto flags.
fn flag_name(field: &'static str) -> &'static str {
    match field {
        "amplitude" | "constant_value" => "k",
        "n_ref" => "nref",
        other => other,
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { field, reason } => CliError::Config {
                field: flag_name(field),
                reason,
            },
            other => CliError::Run(other),
        }
    }
}

impl RunConfig {
    /// Flags over file over defaults, then validation.
    pub fn resolve(command: Command, flags: Settings) -> Result<RunConfig, CliError> {
        let file = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
                toml::from_str::<Settings>(&text)
                    .map_err(|e| CliError::config("config", e.message().to_string()))?
            }
            None => Settings::default(),
        };
        let s = flags.overlay(file);
        let mut taken = Vec::new();
        let mut def = Defaults { taken: &mut taken };

        let family = match s.family {
            Some(raw) => parse_field::<DriftFamily>("family", &raw)?,
            None => def.pick("family", None, || DriftFamily::Product),
        };
        let alpha = def.pick("alpha", s.alpha, || 0.3);
        let beta = def.pick("beta", s.beta, || 1.0);
        let k = def.pick("k", s.k, || 1.0);
        let d = def.pick("d", s.d, || 1);
        let anchor = def.pick("anchor", s.anchor, || DEFAULT_ANCHOR);
        let truncation = def.pick("truncation", s.truncation, || DEFAULT_TRUNCATION);
        let scheme = match s.scheme {
            Some(raw) => parse_field::<Scheme>("scheme", &raw)?,
            None => def.pick("scheme", None, || Scheme::RandomisedEm),
        };
        let observable = match s.observable {
            Some(raw) => parse_field::<ObservableKind>("observable", &raw)?,
            None => def.pick("observable", None, || ObservableKind::SmoothDecay),
        };
        let g = def.pick("g", s.g, || "power".to_string());
        let ns = def.pick("ns", s.ns.map(|l| l.0), || default_ladder(command));
        let max_n = ns.iter().copied().max().unwrap_or(0);
        let n_ref = def.pick("nref", s.nref, || REFERENCE_FACTOR * max_n);
        let samples = def.pick("samples", s.samples, || default_samples(command));
        let p = def.pick("p", s.p, || 2.0);
        let seed = def.pick("seed", s.seed, || DEFAULT_SEED);
        let q = def.pick("q", s.q, || 16);
        let x0 = def.pick("x0", s.x0.map(|v| v.0), || vec![0.0]);
        let out = def.pick("out", s.out, || PathBuf::from("results"));
        let svg = def.pick("svg", s.svg, || false);
        let strict = def.pick("strict", s.strict, || false);
        let workers = def.pick("workers", s.workers, || {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        });

        let x0 = match x0.len() {
            1 => vec![x0[0]; d],
            len if len == d => x0,
            len => {
                return Err(CliError::config(
                    "x0",
                    format!("{len} components for dimension {d}"),
                ))
            }
        };
        let cfg = RunConfig {
            command,
            family,
            alpha,
            beta,
            k,
            d,
            anchor,
            truncation,
            scheme,
            observable,
            g,
            ns,
            n_ref,
            samples,
            p,
            seed,
            q,
            x0,
            out,
            svg,
            strict,
            workers,
            defaulted: taken,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every precondition the chosen command depends on.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.workers == 0 {
            return Err(CliError::config("workers", "need at least one worker"));
        }
        if self.command == Command::Selftest {
            return Ok(());
        }
        if self.ns.is_empty() || self.ns[0] == 0 || self.ns.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::config(
                "ns",
                "resolutions must be positive and strictly ascending",
            ));
        }
        if self.ns.len() < 3 {
            return Err(CliError::config(
                "ns",
                "an order fit needs at least three resolutions",
            ));
        }
        match self.command {
            Command::Quadrature => {
                self.test_function()?;
                if self.samples < 100 {
                    return Err(CliError::config(
                        "samples",
                        format!("{} < 100", self.samples),
                    ));
                }
                if !(self.p >= 1.0) {
                    return Err(CliError::config("p", format!("{} < 1", self.p)));
                }
            }
            Command::Converge | Command::Compare => {
                let drift = self.drift()?;
                self.check_truncation()?;
                self.ladder_config(drift).validate()?;
            }
            Command::Iprobe => {
                let drift = self.drift()?;
                self.check_truncation()?;
                self.probe_config(drift).validate()?;
            }
            Command::Selftest => {}
        }
        Ok(())
    }

    fn check_truncation(&self) -> Result<(), CliError> {
        let max_n = self.ns.iter().copied().max().unwrap_or(0) as f64;
        if self.family == DriftFamily::Weierstrass && 8.0 * max_n > (self.truncation as f64).exp2()
        {
            return Err(CliError::config(
                "truncation",
                format!(
                    "2^{} resolves too little roughness for n = {max_n}; need 8 n <= 2^L",
                    self.truncation
                ),
            ));
        }
        Ok(())
    }

    pub fn drift(&self) -> Result<DriftSpec, CliError> {
        let constant = vec![self.k; self.d];
        Ok(DriftSpec::new(
            self.family,
            self.alpha,
            self.beta,
            self.k,
            self.d,
            self.anchor,
            constant,
            self.truncation,
        )?)
    }

    pub fn test_function(&self) -> Result<TestFunction, CliError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(CliError::config(
                "alpha",
                format!("{} not in (0, 1]", self.alpha),
            ));
        }
        if !(0.0..=1.0).contains(&self.anchor) {
            return Err(CliError::config(
                "anchor",
                format!("{} not in [0, 1]", self.anchor),
            ));
        }
        TestFunction::from_name(&self.g, self.alpha, self.anchor, self.truncation)
            .map_err(|e| CliError::config("g", e.to_string()))
    }

    pub fn ladder_config(&self, drift: DriftSpec) -> sde_rand_em_core::LadderConfig {
        sde_rand_em_core::LadderConfig {
            drift,
            ns: self.ns.clone(),
            n_ref: self.n_ref,
            samples: self.samples,
            p: self.p,
            master_seed: self.seed,
            x0: self.x0.clone(),
        }
    }

    pub fn probe_config(&self, drift: DriftSpec) -> sde_rand_em_core::ProbeConfig {
        sde_rand_em_core::ProbeConfig {
            drift,
            ns: self.ns.clone(),
            q: self.q,
            samples: self.samples,
            p: self.p,
            master_seed: self.seed,
            x0: self.x0.clone(),
        }
    }

    /// Every resolved setting in config-file form; feeding it back through
    /// `--config` reproduces the run.
    pub fn echo(&self) -> Settings {
        Settings {
            config: None,
            family: Some(self.family.name().to_string()),
            alpha: Some(self.alpha),
            beta: Some(self.beta),
            k: Some(self.k),
            d: Some(self.d),
            anchor: Some(self.anchor),
            truncation: Some(self.truncation),
            scheme: Some(self.scheme.name().to_string()),
            observable: Some(self.observable.name().to_string()),
            g: Some(self.g.clone()),
            ns: Some(Ladder(self.ns.clone())),
            nref: Some(self.n_ref),
            samples: Some(self.samples),
            p: Some(self.p),
            seed: Some(self.seed),
            q: Some(self.q),
            x0: Some(Values(self.x0.clone())),
            out: Some(self.out.clone()),
            svg: Some(self.svg),
            strict: Some(self.strict),
            workers: Some(self.workers),
        }
    }

    /// `key: value` lines for the summary.
    pub fn echo_lines(&self) -> Vec<(String, String)> {
        let list = |v: &[usize]| {
            v.iter()
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let reals = |v: &[f64]| {
            v.iter()
                .map(|x| format!("{x:?}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut lines = vec![
            ("family", self.family.name().to_string()),
            ("alpha", format!("{:?}", self.alpha)),
            ("beta", format!("{:?}", self.beta)),
            ("k", format!("{:?}", self.k)),
            ("d", self.d.to_string()),
            ("anchor", format!("{:?}", self.anchor)),
            ("truncation", self.truncation.to_string()),
            ("scheme", self.scheme.name().to_string()),
            ("observable", self.observable.name().to_string()),
            ("g", self.g.clone()),
            ("ns", list(&self.ns)),
            ("nref", self.n_ref.to_string()),
            ("samples", self.samples.to_string()),
            ("p", format!("{:?}", self.p)),
            ("seed", self.seed.to_string()),
            ("q", self.q.to_string()),
            ("x0", reals(&self.x0)),
            ("out", self.out.display().to_string()),
            ("svg", self.svg.to_string()),
            ("strict", self.strict.to_string()),
            ("workers", self.workers.to_string()),
        ];
        lines.push(("defaulted", self.defaulted.join(",")));
        lines
            .into_iter()
            .map(|(k, v)| (format!("config.{k}"), v))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladders_parse() {
        assert_eq!("16,32, 64".parse::<Ladder>().unwrap().0, vec![16, 32, 64]);
        assert_eq!("2^4..2^6".parse::<Ladder>().unwrap().0, vec![16, 32, 64]);
        assert!("2^6..2^4".parse::<Ladder>().is_err());
        assert!("16,x".parse::<Ladder>().is_err());
    }

    #[test]
    fn defaults_are_recorded() {
        let cfg = RunConfig::resolve(Command::Converge, Settings::default()).unwrap();
        assert_eq!(cfg.ns, vec![16, 32, 64, 128, 256, 512]);
        assert_eq!(cfg.n_ref, 8192);
        assert!(cfg.defaulted.contains(&"alpha"));
        assert!(cfg.defaulted.contains(&"workers"));
        let echoed = cfg.echo_lines();
        assert!(echoed
            .iter()
            .any(|(k, v)| k == "config.defaulted" && v.contains("seed")));
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("sde-rand-em-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "alpha = 0.4\nbeta = 0.5\nns = [8, 16, 32]\n").unwrap();
        let flags = Settings {
            config: Some(path),
            alpha: Some(0.25),
            ..Settings::default()
        };
        let cfg = RunConfig::resolve(Command::Converge, flags).unwrap();
        assert_eq!(cfg.alpha, 0.25);
        assert_eq!(cfg.beta, 0.5);
        assert_eq!(cfg.ns, vec![8, 16, 32]);
        assert!(!cfg.defaulted.contains(&"beta"));
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn echo_round_trips_through_toml() {
        let cfg = RunConfig::resolve(Command::Iprobe, Settings::default()).unwrap();
        let text = toml::to_string(&cfg.echo()).unwrap();
        let back: Settings = toml::from_str(&text).unwrap();
        let again = RunConfig::resolve(Command::Iprobe, back).unwrap();
        assert_eq!(again.defaulted, Vec::<&str>::new());
        assert_eq!(
            RunConfig {
                defaulted: vec![],
                ..cfg
            },
            again
        );
    }

    #[test]
    fn validation_names_the_field() {
        let field = |command, s: Settings| match RunConfig::resolve(command, s) {
            Err(CliError::Config { field, .. }) => field,
            other => panic!("expected a config error, got {other:?}"),
        };
        let base = Settings::default;
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    alpha: Some(1.5),
                    ..base()
                }
            ),
            "alpha"
        );
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    k: Some(-1.0),
                    ..base()
                }
            ),
            "k"
        );
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    nref: Some(1000),
                    ..base()
                }
            ),
            "nref"
        );
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    samples: Some(3),
                    ..base()
                }
            ),
            "samples"
        );
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    family: Some("gauss".into()),
                    ..base()
                }
            ),
            "family"
        );
        assert_eq!(
            field(
                Command::Iprobe,
                Settings {
                    q: Some(4),
                    ..base()
                }
            ),
            "q"
        );
        assert_eq!(
            field(
                Command::Quadrature,
                Settings {
                    g: Some("bessel".into()),
                    ..base()
                }
            ),
            "g"
        );
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    family: Some("weierstrass".into()),
                    truncation: Some(8),
                    ..base()
                }
            ),
            "truncation"
        );
        assert_eq!(
            field(
                Command::Converge,
                Settings {
                    x0: Some(Values(vec![0.0, 1.0])),
                    ..base()
                }
            ),
            "x0"
        );
    }
}

//! Job configuration files.
//!
//! A job is one JSON document:
//!
//! ```json
//! {
//!   "mode": "verify",
//!   "potentials": { "kind": "revolution", "q": 0.8, "ell": 8 },
//!   "window": { "n": 32, "m": 32 },
//!   "lambda": [1.0, 1.5],
//!   "output": { "dir": "out", "prefix": "surface" },
//!   "tolerances": { "geometric": 1e-9, "algebraic": 1e-10 }
//! }
//! ```
//!
//! Normalized potentials give each of `alpha`, `beta`, `p`, `q` as an array,
//! `{"constant": x}` or `{"periodic": [..]}`.

use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use psforge::dalembert::{
    revolution_potentials, FrameSource, GeneralizedPotentials, NormalizedPotentials,
};
use psforge::loops::FactorChain;
use psforge::surface::Window;
use psforge::verify::Tolerances;
use serde::Deserialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Generate,
    Verify,
    Sweep,
    OracleCompare,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Generate => "generate",
            Mode::Verify => "verify",
            Mode::Sweep => "sweep",
            Mode::OracleCompare => "oracle-compare",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Table {
    Values(Vec<f64>),
    Constant { constant: f64 },
    Periodic { periodic: Vec<f64> },
}

impl Table {
    fn expand(&self, name: &str, len: usize) -> Result<Vec<f64>, String> {
        match self {
            Table::Values(v) if v.len() < len => Err(format!(
                "{name} has {} entries but the window needs {len}",
                v.len()
            )),
            Table::Values(v) => Ok(v[..len].to_vec()),
            Table::Constant { constant } => Ok(vec![*constant; len]),
            Table::Periodic { periodic } if periodic.is_empty() => {
                Err(format!("{name} periodic pattern is empty"))
            }
            Table::Periodic { periodic } => {
                Ok((0..len).map(|i| periodic[i % periodic.len()]).collect())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialsConfig {
    Normalized {
        alpha: Table,
        beta: Table,
        p: Table,
        q: Table,
    },
    Revolution {
        q: f64,
        ell: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowConfig {
    pub n: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum LambdaConfig {
    Single(f64),
    List(Vec<f64>),
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    pub prefix: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    pub potentials: PotentialsConfig,
    pub window: WindowConfig,
    pub lambda: LambdaConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Frame data for a job.
#[derive(Clone, Debug)]
pub enum Source {
    Normalized(NormalizedPotentials),
    Generalized(GeneralizedPotentials),
}

impl FrameSource for Source {
    fn limits(&self) -> (usize, usize) {
        match self {
            Source::Normalized(p) => p.limits(),
            Source::Generalized(g) => g.limits(),
        }
    }

    fn n_frame(&self, n: usize) -> psforge::Result<FactorChain> {
        match self {
            Source::Normalized(p) => p.n_frame(n),
            Source::Generalized(g) => g.n_frame(n),
        }
    }

    fn m_step(&self, m: usize) -> psforge::Result<FactorChain> {
        match self {
            Source::Normalized(p) => p.m_step(m),
            Source::Generalized(g) => g.m_step(m),
        }
    }

    fn m_frame(&self, m: usize) -> psforge::Result<FactorChain> {
        match self {
            Source::Normalized(p) => p.m_frame(m),
            Source::Generalized(g) => g.m_frame(m),
        }
    }
}

/// A validated job.
#[derive(Clone, Debug)]
pub struct Job {
    pub mode: Mode,
    pub source: Source,
    pub window: Window,
    pub lambdas: Vec<f64>,
    pub out_dir: PathBuf,
    pub prefix: String,
    pub tolerances: Tolerances,
}

impl JobConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    /// Checks the configuration against the requested mode and expands tables.
    pub fn into_job(self, mode: Mode, out_override: Option<PathBuf>) -> Result<Job, String> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(format!("config is for mode {m}, but {mode} was requested"));
            }
        }
        let window = Window::new(self.window.n, self.window.m).map_err(|e| e.to_string())?;

        let lambdas = match self.lambda {
            LambdaConfig::Single(l) => vec![l],
            LambdaConfig::List(v) => v,
        };
        if lambdas.is_empty() {
            return Err("lambda list is empty".into());
        }
        if let Some(l) = lambdas.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(format!("lambda must be a positive real, got {l}"));
        }

        let source = match self.potentials {
            PotentialsConfig::Normalized { alpha, beta, p, q } => {
                let mut a = alpha.expand("alpha", window.n)?;
                if !matches!(alpha, Table::Values(_)) {
                    a[0] = 0.0;
                }
                let pot = NormalizedPotentials::new(
                    a,
                    beta.expand("beta", window.m)?,
                    p.expand("p", window.n)?,
                    q.expand("q", window.m)?,
                )
                .map_err(|e| e.to_string())?;
                Source::Normalized(pot)
            }
            PotentialsConfig::Revolution { q, ell } => {
                Source::Generalized(revolution_potentials(q, ell).map_err(|e| e.to_string())?)
            }
        };
        if mode == Mode::OracleCompare && !matches!(source, Source::Normalized(_)) {
            return Err("oracle-compare needs normalized potentials".into());
        }

        let t = self.tolerances;
        if !(t.geometric.is_finite()
            && t.geometric >= 0.0
            && t.algebraic.is_finite()
            && t.algebraic >= 0.0)
        {
            return Err("tolerances must be finite and non-negative".into());
        }

        let prefix = self.output.prefix.unwrap_or_else(|| "surface".into());
        if prefix.is_empty() || prefix.contains(['/', '\\']) {
            return Err(format!("invalid output prefix {prefix:?}"));
        }
        let out_dir = out_override
            .or(self.output.dir)
            .unwrap_or_else(|| PathBuf::from("."));

        Ok(Job {
            mode,
            source,
            window,
            lambdas,
            out_dir,
            prefix,
            tolerances: t,
        })
    }
}

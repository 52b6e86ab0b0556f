//! Plain-text instance descriptions.
//!
//! An instance file is a list of `key = value` lines; `#` starts a comment.
//! It records the generator and every parameter needed to rebuild the
//! instance bit for bit, plus the resulting dimension as a consistency check:
//!
//! ```text
//! # cat-core problem instance
//! name = lds_T50_d4_s7
//! generator = lds
//! dimension = 236
//! T = 50
//! d = 4
//! sigma = 0.01
//! seed = 7
//! ```
//!
//! Generators: `corpus` (key `entry`), `lds` (`T`, `d`, `sigma`, `seed`) and
//! `mc` (`n1`, `n2`, `rank`, `fill`, `lambda1`, `lambda2`, `seed`).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{corpus_entry, generate_lds_instance, generate_mc_instance, CorpusEntry, ProblemError};

pub const DEFAULT_MC_RANK: usize = 3;
pub const DEFAULT_MC_FILL: f64 = 0.5;
pub const DEFAULT_MC_LAMBDA: f64 = 0.1;

/// Recipe for a problem instance.
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Corpus {
        name: String,
    },
    Lds {
        horizon: usize,
        hidden_dim: usize,
        sigma: f64,
        seed: u64,
    },
    Mc {
        n1: usize,
        n2: usize,
        rank: usize,
        fill: f64,
        lambda1: f64,
        lambda2: f64,
        seed: u64,
    },
}

impl ProblemSpec {
    /// LDS instance with the reference sizes `T = 50`, `d = 4`, `sigma = 0.01`.
    pub fn lds_reference(seed: u64) -> Self {
        Self::Lds {
            horizon: 50,
            hidden_dim: 4,
            sigma: 0.01,
            seed,
        }
    }

    /// 48 x 30 matrix completion instance with default rank, fill and penalties.
    pub fn mc_reference(seed: u64) -> Self {
        Self::Mc {
            n1: 48,
            n2: 30,
            rank: DEFAULT_MC_RANK,
            fill: DEFAULT_MC_FILL,
            lambda1: DEFAULT_MC_LAMBDA,
            lambda2: DEFAULT_MC_LAMBDA,
            seed,
        }
    }

    pub fn build(&self) -> Result<CorpusEntry, ProblemError> {
        match self {
            Self::Corpus { name } => corpus_entry(name),
            &Self::Lds {
                horizon,
                hidden_dim,
                sigma,
                seed,
            } => {
                let p = generate_lds_instance(horizon, hidden_dim, sigma, seed)?;
                let start = super::Point::new(p.start_point())?;
                Ok(CorpusEntry {
                    name: super::Objective::name(&p).to_string(),
                    problem: Box::new(p),
                    start,
                    f_star: None,
                    x_star: None,
                    benchmark: true,
                })
            }
            &Self::Mc {
                n1,
                n2,
                rank,
                fill,
                lambda1,
                lambda2,
                seed,
            } => {
                let p = generate_mc_instance(n1, n2, rank, fill, lambda1, lambda2, seed)?;
                let start = super::Point::new(p.start_point())?;
                Ok(CorpusEntry {
                    name: super::Objective::name(&p).to_string(),
                    problem: Box::new(p),
                    start,
                    f_star: None,
                    x_star: None,
                    benchmark: true,
                })
            }
        }
    }

    fn generator(&self) -> &'static str {
        match self {
            Self::Corpus { .. } => "corpus",
            Self::Lds { .. } => "lds",
            Self::Mc { .. } => "mc",
        }
    }

    /// Render the instance file. Builds the instance to record its name and
    /// dimension.
    pub fn to_instance_text(&self) -> Result<String, ProblemError> {
        let built = self.build()?;
        let mut out = String::from("# cat-core problem instance\n");
        let _ = writeln!(out, "name = {}", built.name);
        let _ = writeln!(out, "generator = {}", self.generator());
        let _ = writeln!(out, "dimension = {}", built.problem.dimension());
        match self {
            Self::Corpus { name } => {
                let _ = writeln!(out, "entry = {name}");
            }
            Self::Lds {
                horizon,
                hidden_dim,
                sigma,
                seed,
            } => {
                let _ = writeln!(out, "T = {horizon}\nd = {hidden_dim}\nsigma = {sigma:?}\nseed = {seed}");
            }
            Self::Mc {
                n1,
                n2,
                rank,
                fill,
                lambda1,
                lambda2,
                seed,
            } => {
                let _ = writeln!(
                    out,
                    "n1 = {n1}\nn2 = {n2}\nrank = {rank}\nfill = {fill:?}\nlambda1 = {lambda1:?}\nlambda2 = {lambda2:?}\nseed = {seed}"
                );
            }
        }
        Ok(out)
    }

    /// Parse an instance file; the recorded dimension must match the rebuilt
    /// instance.
    pub fn from_instance_text(text: &str) -> Result<(Self, CorpusEntry), ProblemError> {
        let mut fields = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ProblemError::Instance(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            fields.insert(k.trim().to_string(), v.trim().to_string());
        }
        let spec = match get::<String>(&fields, "generator")?.as_str() {
            "corpus" => Self::Corpus {
                name: get(&fields, "entry")?,
            },
            "lds" => Self::Lds {
                horizon: get(&fields, "T")?,
                hidden_dim: get(&fields, "d")?,
                sigma: get(&fields, "sigma")?,
                seed: get(&fields, "seed")?,
            },
            "mc" => Self::Mc {
                n1: get(&fields, "n1")?,
                n2: get(&fields, "n2")?,
                rank: get(&fields, "rank")?,
                fill: get(&fields, "fill")?,
                lambda1: get(&fields, "lambda1")?,
                lambda2: get(&fields, "lambda2")?,
                seed: get(&fields, "seed")?,
            },
            other => return Err(ProblemError::Instance(format!("unknown generator `{other}`"))),
        };
        let built = spec.build()?;
        if let Some(dim) = fields.get("dimension") {
            let dim: usize = dim
                .parse()
                .map_err(|_| ProblemError::Instance(format!("bad dimension `{dim}`")))?;
            if dim != built.problem.dimension() {
                return Err(ProblemError::Dimension {
                    expected: dim,
                    got: built.problem.dimension(),
                });
            }
        }
        Ok((spec, built))
    }
}

fn get<T: FromStr>(fields: &BTreeMap<String, String>, key: &str) -> Result<T, ProblemError> {
    let raw = fields
        .get(key)
        .ok_or_else(|| ProblemError::Instance(format!("missing key `{key}`")))?;
    raw.parse()
        .map_err(|_| ProblemError::Instance(format!("bad value for `{key}`: `{raw}`")))
}

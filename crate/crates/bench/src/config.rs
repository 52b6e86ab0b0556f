//! Suite description: which problems, which solvers, which parameters.
//!
//! Suites are TOML files. Every key is optional except the problem and
//! solver lists, which may also come from the command line:
//!
//! ```toml
//! eps = 1e-5
//! max_iter = 10000
//! iter_grid = [1, 10, 100, 1000, 10000]
//!
//! [[solver]]
//! name = "cat"          # cat | cat_theta0 | classic
//! theta = 0.1
//!
//! [[solver]]
//! name = "classic"
//! accept_eta = 0.0
//!
//! [[problem]]
//! generator = "corpus"
//! names = ["rosenbrock2d", "wood"]   # or ["benchmark"] for the whole corpus
//!
//! [[problem]]
//! generator = "lds"
//! seeds = [0, 60]       # half-open range
//! horizon = 50
//! hidden_dim = 4
//! sigma = 0.01
//!
//! [[problem]]
//! generator = "mc"
//! seeds = [0, 10]
//! max_iter = 1000       # per-group iteration cap
//! ```

use std::path::Path;

use cat_core::problem::{builtin_corpus, ProblemSpec, DEFAULT_MC_FILL, DEFAULT_MC_LAMBDA, DEFAULT_MC_RANK};
use cat_core::{validate_config, CatConfig, ClassicConfig};
use serde::Deserialize;

use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SolverKind {
    Cat,
    CatTheta0,
    Classic,
}

impl SolverKind {
    pub const ALL: [SolverKind; 3] = [SolverKind::Cat, SolverKind::CatTheta0, SolverKind::Classic];

    pub fn name(self) -> &'static str {
        match self {
            Self::Cat => "cat",
            Self::CatTheta0 => "cat_theta0",
            Self::Classic => "classic",
        }
    }

    pub fn parse(name: &str) -> Result<Self, BenchError> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| BenchError::Config(format!("unknown solver `{name}` (expected cat, cat_theta0 or classic)")))
    }
}

/// A configured solver.
#[derive(Debug, Clone, PartialEq)]
pub enum SolverSpec {
    Cat(CatConfig),
    CatTheta0(CatConfig),
    Classic(ClassicConfig),
}

impl SolverSpec {
    pub fn kind(&self) -> SolverKind {
        match self {
            Self::Cat(_) => SolverKind::Cat,
            Self::CatTheta0(_) => SolverKind::CatTheta0,
            Self::Classic(_) => SolverKind::Classic,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn eps(&self) -> f64 {
        match self {
            Self::Cat(c) | Self::CatTheta0(c) => c.eps,
            Self::Classic(c) => c.eps,
        }
    }

    pub fn with_max_iter(&self, max_iter: usize) -> Self {
        match *self {
            Self::Cat(c) => Self::Cat(CatConfig { max_iter, ..c }),
            Self::CatTheta0(c) => Self::CatTheta0(CatConfig { max_iter, ..c }),
            Self::Classic(c) => Self::Classic(ClassicConfig { max_iter, ..c }),
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        let res = match self {
            Self::Cat(c) => validate_config(c),
            Self::CatTheta0(c) => validate_config(&CatConfig { theta: 0.0, ..*c }),
            Self::Classic(c) => cat_core::classic::validate_classic_config(c),
        };
        res.map_err(|e| BenchError::Config(format!("solver `{}`: {e}", self.name())))
    }
}

/// One problem of a suite with its iteration cap.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemItem {
    pub spec: ProblemSpec,
    pub max_iter: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSpec {
    pub problems: Vec<ProblemItem>,
    pub solvers: Vec<SolverSpec>,
    pub eps: f64,
    pub max_iter: usize,
    pub iter_grid: Vec<usize>,
}

impl SuiteSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.problems.is_empty() {
            return Err(BenchError::Config("suite has no problems".into()));
        }
        if self.solvers.is_empty() {
            return Err(BenchError::Config("suite has no solvers".into()));
        }
        for s in &self.solvers {
            s.validate()?;
        }
        let mut kinds: Vec<_> = self.solvers.iter().map(SolverSpec::kind).collect();
        kinds.sort();
        if kinds.windows(2).any(|w| w[0] == w[1]) {
            return Err(BenchError::Config("each solver may appear only once".into()));
        }
        if self.problems.iter().any(|p| p.max_iter == Some(0)) {
            return Err(BenchError::Config("per-problem max_iter must be positive".into()));
        }
        Ok(())
    }

    /// Cap that applies to `item`.
    pub fn cap_for(&self, item: &ProblemItem) -> usize {
        item.max_iter.unwrap_or(self.max_iter)
    }
}

/// Parameter overrides from the command line. `None` leaves the file or
/// default value alone.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub problems: Vec<String>,
    pub solvers: Vec<String>,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    pub r1: Option<f64>,
    pub theta: Option<f64>,
    pub beta: Option<f64>,
    pub omega: Option<f64>,
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
    pub gamma3: Option<f64>,
    /// Seed for generated problems named on the command line.
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteFile {
    eps: Option<f64>,
    max_iter: Option<usize>,
    iter_grid: Option<Vec<usize>>,
    #[serde(default)]
    solver: Vec<SolverTable>,
    #[serde(default)]
    problem: Vec<ProblemTable>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverTable {
    name: String,
    r1: Option<f64>,
    theta: Option<f64>,
    beta: Option<f64>,
    omega: Option<f64>,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    gamma3: Option<f64>,
    accept_eta: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "generator", rename_all = "lowercase", deny_unknown_fields)]
enum ProblemTable {
    Corpus {
        names: Vec<String>,
        max_iter: Option<usize>,
    },
    Lds {
        seeds: [u64; 2],
        horizon: Option<usize>,
        hidden_dim: Option<usize>,
        sigma: Option<f64>,
        max_iter: Option<usize>,
    },
    Mc {
        seeds: [u64; 2],
        n1: Option<usize>,
        n2: Option<usize>,
        rank: Option<usize>,
        fill: Option<f64>,
        lambda1: Option<f64>,
        lambda2: Option<f64>,
        max_iter: Option<usize>,
    },
}

/// Default performance-profile grid: 1-2-5 steps up to `max`.
pub fn default_iter_grid(max: usize) -> Vec<usize> {
    let mut grid = Vec::new();
    let mut decade = 1usize;
    'outer: loop {
        for m in [1, 2, 5] {
            let t = m * decade;
            if t > max {
                break 'outer;
            }
            grid.push(t);
        }
        decade *= 10;
    }
    if grid.last() != Some(&max) {
        grid.push(max);
    }
    grid
}

fn corpus_items(names: &[String], max_iter: Option<usize>) -> Result<Vec<ProblemItem>, BenchError> {
    let mut out = Vec::new();
    for name in names {
        if name == "benchmark" {
            out.extend(builtin_corpus().iter().filter(|f| f.build().benchmark).map(|f| ProblemItem {
                spec: ProblemSpec::Corpus { name: f.name.into() },
                max_iter,
            }));
        } else if builtin_corpus().iter().any(|f| f.name == name) {
            out.push(ProblemItem {
                spec: ProblemSpec::Corpus { name: name.clone() },
                max_iter,
            });
        } else {
            return Err(BenchError::Config(format!("unknown corpus problem `{name}`")));
        }
    }
    Ok(out)
}

fn seed_range(seeds: [u64; 2]) -> Result<std::ops::Range<u64>, BenchError> {
    if seeds[0] >= seeds[1] {
        return Err(BenchError::Config(format!("empty seed range {seeds:?}")));
    }
    Ok(seeds[0]..seeds[1])
}

fn expand(table: ProblemTable) -> Result<Vec<ProblemItem>, BenchError> {
    match table {
        ProblemTable::Corpus { names, max_iter } => corpus_items(&names, max_iter),
        ProblemTable::Lds {
            seeds,
            horizon,
            hidden_dim,
            sigma,
            max_iter,
        } => Ok(seed_range(seeds)?
            .map(|seed| ProblemItem {
                spec: ProblemSpec::Lds {
                    horizon: horizon.unwrap_or(50),
                    hidden_dim: hidden_dim.unwrap_or(4),
                    sigma: sigma.unwrap_or(0.01),
                    seed,
                },
                max_iter,
            })
            .collect()),
        ProblemTable::Mc {
            seeds,
            n1,
            n2,
            rank,
            fill,
            lambda1,
            lambda2,
            max_iter,
        } => Ok(seed_range(seeds)?
            .map(|seed| ProblemItem {
                spec: ProblemSpec::Mc {
                    n1: n1.unwrap_or(48),
                    n2: n2.unwrap_or(30),
                    rank: rank.unwrap_or(DEFAULT_MC_RANK),
                    fill: fill.unwrap_or(DEFAULT_MC_FILL),
                    lambda1: lambda1.unwrap_or(DEFAULT_MC_LAMBDA),
                    lambda2: lambda2.unwrap_or(DEFAULT_MC_LAMBDA),
                    seed,
                },
                max_iter,
            })
            .collect()),
    }
}

/// Problem named on the command line: a corpus name, `benchmark`, or a
/// generator (`lds`, `mc`) instantiated with `seed`.
fn cli_problem(name: &str, seed: u64) -> Result<Vec<ProblemItem>, BenchError> {
    match name {
        "lds" => Ok(vec![ProblemItem {
            spec: ProblemSpec::lds_reference(seed),
            max_iter: None,
        }]),
        "mc" => Ok(vec![ProblemItem {
            spec: ProblemSpec::mc_reference(seed),
            max_iter: None,
        }]),
        other => corpus_items(&[other.to_string()], None),
    }
}

fn solver_from_table(t: &SolverTable, eps: f64, max_iter: usize, o: &Overrides) -> Result<SolverSpec, BenchError> {
    let kind = SolverKind::parse(&t.name)?;
    let pick = |cli: Option<f64>, file: Option<f64>, default: f64| cli.or(file).unwrap_or(default);
    let cat_default = CatConfig::default();
    let cat = CatConfig {
        r1: pick(o.r1, t.r1, cat_default.r1),
        beta: pick(o.beta, t.beta, cat_default.beta),
        theta: pick(o.theta, t.theta, cat_default.theta),
        omega: pick(o.omega, t.omega, cat_default.omega),
        gamma1: pick(o.gamma1, t.gamma1, cat_default.gamma1),
        gamma2: pick(o.gamma2, t.gamma2, cat_default.gamma2),
        gamma3: pick(o.gamma3, t.gamma3, cat_default.gamma3),
        eps,
        max_iter,
    };
    Ok(match kind {
        SolverKind::Cat => SolverSpec::Cat(cat),
        SolverKind::CatTheta0 => SolverSpec::CatTheta0(CatConfig { theta: 0.0, ..cat }),
        SolverKind::Classic => {
            let d = ClassicConfig::default();
            SolverSpec::Classic(ClassicConfig {
                r1: cat.r1,
                beta: cat.beta,
                omega: cat.omega,
                gamma2: cat.gamma2,
                accept_eta: t.accept_eta.unwrap_or(d.accept_eta),
                eps,
                max_iter,
            })
        }
    })
}

/// Build a suite from optional TOML text plus command-line overrides.
///
/// Problems and solvers given on the command line replace the file's lists.
/// With neither, the suite is the benchmark corpus under all three solvers.
pub fn build_suite(text: Option<&str>, o: &Overrides) -> Result<SuiteSpec, BenchError> {
    let file: SuiteFile = match text {
        Some(t) => toml::from_str(t).map_err(|e| BenchError::Config(format!("suite file: {e}")))?,
        None => SuiteFile::default(),
    };
    let eps = o.eps.or(file.eps).unwrap_or(1e-5);
    let max_iter = o.max_iter.or(file.max_iter).unwrap_or(10_000);

    let problems = if !o.problems.is_empty() {
        let seed = o.seed.unwrap_or(0);
        let mut out = Vec::new();
        for name in &o.problems {
            out.extend(cli_problem(name, seed)?);
        }
        out
    } else if !file.problem.is_empty() {
        let mut out = Vec::new();
        for table in file.problem {
            out.extend(expand(table)?);
        }
        out
    } else {
        corpus_items(&["benchmark".to_string()], None)?
    };

    let tables: Vec<SolverTable> = if !o.solvers.is_empty() {
        o.solvers
            .iter()
            .map(|name| {
                // Keep per-solver file settings for solvers that are also in the file.
                let from_file = file.solver.iter().find(|t| &t.name == name);
                SolverTable {
                    name: name.clone(),
                    accept_eta: from_file.and_then(|t| t.accept_eta),
                    r1: from_file.and_then(|t| t.r1),
                    theta: from_file.and_then(|t| t.theta),
                    beta: from_file.and_then(|t| t.beta),
                    omega: from_file.and_then(|t| t.omega),
                    gamma1: from_file.and_then(|t| t.gamma1),
                    gamma2: from_file.and_then(|t| t.gamma2),
                    gamma3: from_file.and_then(|t| t.gamma3),
                }
            })
            .collect()
    } else if !file.solver.is_empty() {
        file.solver
    } else {
        SolverKind::ALL
            .iter()
            .map(|k| SolverTable {
                name: k.name().into(),
                ..SolverTable::default()
            })
            .collect()
    };
    let solvers = tables
        .iter()
        .map(|t| solver_from_table(t, eps, max_iter, o))
        .collect::<Result<Vec<_>, _>>()?;

    let cap = problems
        .iter()
        .map(|p| p.max_iter.unwrap_or(max_iter))
        .max()
        .unwrap_or(max_iter);
    let suite = SuiteSpec {
        problems,
        solvers,
        eps,
        max_iter,
        iter_grid: file.iter_grid.unwrap_or_else(|| default_iter_grid(cap)),
    };
    suite.validate()?;
    Ok(suite)
}

/// [`build_suite`] reading the file at `path`.
pub fn load_suite(path: Option<&Path>, o: &Overrides) -> Result<SuiteSpec, BenchError> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| BenchError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            build_suite(Some(&text), o)
        }
        None => build_suite(None, o),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_suite_is_benchmark_corpus_times_three() {
        let s = build_suite(None, &Overrides::default()).unwrap();
        assert_eq!(s.solvers.len(), 3);
        assert!(s.problems.iter().all(|p| matches!(&p.spec, ProblemSpec::Corpus { name } if name != "quadratic_indefinite")));
        assert_eq!(s.eps, 1e-5);
        assert_eq!(*s.iter_grid.last().unwrap(), 10_000);
    }

    #[test]
    fn file_with_generators() {
        let text = r#"
            eps = 1e-6
            [[solver]]
            name = "cat"
            theta = 0.2
            [[problem]]
            generator = "lds"
            seeds = [3, 6]
            [[problem]]
            generator = "mc"
            seeds = [0, 2]
            max_iter = 1000
        "#;
        let s = build_suite(Some(text), &Overrides::default()).unwrap();
        assert_eq!(s.problems.len(), 5);
        assert_eq!(s.cap_for(&s.problems[4]), 1000);
        assert_eq!(s.cap_for(&s.problems[0]), 10_000);
        match &s.solvers[0] {
            SolverSpec::Cat(c) => {
                assert_eq!(c.theta, 0.2);
                assert_eq!(c.eps, 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cli_overrides_win() {
        let text = "[[solver]]\nname = \"cat\"\ntheta = 0.2\n";
        let o = Overrides {
            theta: Some(0.05),
            problems: vec!["lds".into()],
            seed: Some(9),
            ..Overrides::default()
        };
        let s = build_suite(Some(text), &o).unwrap();
        assert_eq!(s.problems[0].spec, ProblemSpec::lds_reference(9));
        assert!(matches!(&s.solvers[0], SolverSpec::Cat(c) if c.theta == 0.05));
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = Overrides {
            gamma2: Some(0.1),
            ..Overrides::default()
        };
        assert!(matches!(build_suite(None, &bad), Err(BenchError::Config(_))));
        assert!(build_suite(Some("[[solver]]\nname = \"bfgs\"\n"), &Overrides::default()).is_err());
        assert!(build_suite(Some("unknown_key = 1\n"), &Overrides::default()).is_err());
        assert!(build_suite(Some("[[problem]]\ngenerator = \"lds\"\nseeds = [4, 4]\n"), &Overrides::default()).is_err());
        let unknown = Overrides {
            problems: vec!["nope".into()],
            ..Overrides::default()
        };
        assert!(build_suite(None, &unknown).is_err());
    }

    #[test]
    fn grid_shape() {
        assert_eq!(default_iter_grid(1000), vec![1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]);
        assert_eq!(default_iter_grid(30), vec![1, 2, 5, 10, 20, 30]);
    }
}

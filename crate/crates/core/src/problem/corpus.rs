use nalgebra::{DMatrix, DVector};

use super::{
    generate_lds_instance, generate_mc_instance, Beale, ChainedRosenbrock, Objective, Point,
    ProblemError, QuadraticProblem, QuarticProblem, Rosenbrock, Wood, DEFAULT_MC_FILL,
    DEFAULT_MC_LAMBDA, DEFAULT_MC_RANK,
};

/// A ready-to-run problem with its canonical start point.
pub struct CorpusEntry {
    pub name: String,
    pub problem: Box<dyn Objective>,
    pub start: Point,
    /// Known optimal value, when registered.
    pub f_star: Option<f64>,
    /// Known isolated minimizer, when registered.
    pub x_star: Option<DVector<f64>>,
    /// Whether the entry belongs in benchmark suites. Unbounded fixtures do not.
    pub benchmark: bool,
}

impl std::fmt::Debug for CorpusEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorpusEntry")
            .field("name", &self.name)
            .field("dimension", &self.problem.dimension())
            .field("f_star", &self.f_star)
            .field("benchmark", &self.benchmark)
            .finish()
    }
}

/// Named constructor for a corpus entry.
#[derive(Clone, Copy)]
pub struct CorpusFactory {
    pub name: &'static str,
    pub description: &'static str,
    build: fn() -> CorpusEntry,
}

impl CorpusFactory {
    pub fn build(&self) -> CorpusEntry {
        (self.build)()
    }
}

impl std::fmt::Debug for CorpusFactory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "CorpusFactory({})", self.name)
    }
}

fn entry(
    name: &str,
    problem: Box<dyn Objective>,
    start: &[f64],
    f_star: Option<f64>,
    x_star: Option<&[f64]>,
) -> CorpusEntry {
    CorpusEntry {
        name: name.to_string(),
        problem,
        start: Point::from_slice(start).expect("corpus start points are finite"),
        f_star,
        x_star: x_star.map(DVector::from_column_slice),
        benchmark: true,
    }
}

fn spectral_quadratic(name: &str, eigenvalues: &[f64], seed: u64) -> CorpusEntry {
    let n = eigenvalues.len();
    let x_star = DVector::from_fn(n, |i, _| 1.0 + i as f64 / n as f64);
    let p = QuadraticProblem::with_spectrum(name, eigenvalues, &x_star, seed)
        .expect("valid spectrum");
    let f_star = p.value(&x_star);
    entry(name, Box::new(p), &vec![0.0; n], Some(f_star), Some(x_star.as_slice()))
}

fn quadratic_well() -> CorpusEntry {
    let eig: Vec<f64> = (1..=10).map(f64::from).collect();
    spectral_quadratic("quadratic_well", &eig, 1)
}

fn quadratic_ill() -> CorpusEntry {
    let eig: Vec<f64> = (0..10).map(|i| 10f64.powf(-3.0 + 6.0 * f64::from(i) / 9.0)).collect();
    spectral_quadratic("quadratic_ill", &eig, 2)
}

fn quadratic_indefinite() -> CorpusEntry {
    let h = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 2.0]));
    let p = QuadraticProblem::new("quadratic_indefinite", h, DVector::from_vec(vec![1.0, 1.0]), 0.0)
        .expect("2x2");
    let mut e = entry("quadratic_indefinite", Box::new(p), &[0.0, 0.0], None, None);
    // Unbounded below.
    e.benchmark = false;
    e
}

fn rosenbrock2d() -> CorpusEntry {
    entry("rosenbrock2d", Box::new(Rosenbrock), &[-1.2, 1.0], Some(0.0), Some(&[1.0, 1.0]))
}

fn chained_rosenbrock10() -> CorpusEntry {
    let start: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { -1.2 } else { 1.0 }).collect();
    entry(
        "chained_rosenbrock10",
        Box::new(ChainedRosenbrock::new(10)),
        &start,
        Some(0.0),
        None,
    )
}

fn beale() -> CorpusEntry {
    entry("beale", Box::new(Beale), &[1.0, 1.0], Some(0.0), Some(&[3.0, 0.5]))
}

fn wood() -> CorpusEntry {
    entry("wood", Box::new(Wood), &[-3.0, -1.0, -3.0, -1.0], Some(0.0), Some(&[1.0; 4]))
}

/// `-x^2/2 + y^2 + (x^4 + y^4)/4` from `(0, 1)`: the gradient `(0, 3)` is
/// orthogonal to the negative-curvature direction of `diag(-1, 5)`.
fn hard_case_quartic() -> CorpusEntry {
    let a = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 2.0]));
    let p = QuarticProblem::new("hard_case_quartic", a, DVector::zeros(2)).expect("2x2");
    entry("hard_case_quartic", Box::new(p), &[0.0, 1.0], Some(-0.25), None)
}

fn convex_quartic() -> CorpusEntry {
    let n = 5;
    let a = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => 2.5,
        1 => -1.0,
        _ => 0.0,
    });
    let p = QuarticProblem::new("convex_quartic", a, DVector::zeros(n)).expect("5x5");
    entry("convex_quartic", Box::new(p), &[2.0; 5], Some(0.0), Some(&[0.0; 5]))
}

fn lds() -> CorpusEntry {
    let p = generate_lds_instance(50, 4, 0.01, 0).expect("valid LDS parameters");
    let start = p.start_point();
    entry("lds", Box::new(p), start.as_slice(), None, None)
}

fn mc() -> CorpusEntry {
    let p = generate_mc_instance(48, 30, DEFAULT_MC_RANK, DEFAULT_MC_FILL, DEFAULT_MC_LAMBDA, DEFAULT_MC_LAMBDA, 0)
        .expect("valid MC parameters");
    let start = p.start_point();
    entry("mc", Box::new(p), start.as_slice(), None, None)
}

const CORPUS: &[CorpusFactory] = &[
    CorpusFactory { name: "quadratic_well", description: "convex quadratic, n=10, condition 10", build: quadratic_well },
    CorpusFactory { name: "quadratic_ill", description: "convex quadratic, n=10, condition 1e6", build: quadratic_ill },
    CorpusFactory { name: "quadratic_indefinite", description: "H = diag(-1, 2), unbounded below", build: quadratic_indefinite },
    CorpusFactory { name: "rosenbrock2d", description: "Rosenbrock from (-1.2, 1)", build: rosenbrock2d },
    CorpusFactory { name: "chained_rosenbrock10", description: "chained Rosenbrock, n=10", build: chained_rosenbrock10 },
    CorpusFactory { name: "beale", description: "Beale from (1, 1)", build: beale },
    CorpusFactory { name: "wood", description: "Wood from (-3, -1, -3, -1)", build: wood },
    CorpusFactory { name: "hard_case_quartic", description: "double-well quartic starting on a hard-case subproblem", build: hard_case_quartic },
    CorpusFactory { name: "convex_quartic", description: "tridiagonal quadratic plus quartic, n=5", build: convex_quartic },
    CorpusFactory { name: "lds", description: "linear dynamical system MLE, T=50, d=4, sigma=0.01, seed 0", build: lds },
    CorpusFactory { name: "mc", description: "matrix completion 48x30, rank 3, fill 0.5, seed 0", build: mc },
];

/// Every built-in problem, in a fixed order.
pub fn builtin_corpus() -> &'static [CorpusFactory] {
    CORPUS
}

pub fn corpus_entry(name: &str) -> Result<CorpusEntry, ProblemError> {
    CORPUS
        .iter()
        .find(|f| f.name == name)
        .map(CorpusFactory::build)
        .ok_or_else(|| ProblemError::UnknownProblem(name.to_string()))
}

//! Benchmark problems and the problem abstraction itself. The engine
//! always maximizes; minimization problems are wrapped by negation here,
//! at the boundary, so raw costs stay available for reporting.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use crate::error::{EvoError, Result};
use crate::genotype::{Genotype, GenotypeSpec};
use crate::tree::{PrimitiveSet, TreeInit};

/// Cost assigned when a symbolic-regression evaluation overflows.
pub const OVERFLOW_SENTINEL: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Maximize,
    Minimize,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Maximize => "maximize",
            Direction::Minimize => "minimize",
        })
    }
}

/// A fitness landscape: genotype parameters, a pure evaluation map, and
/// the optimization direction.
#[derive(Clone)]
pub struct Problem {
    name: String,
    spec: GenotypeSpec,
    direction: Direction,
    /// Optimum in raw (problem) units, when analytically known.
    known_optimum: Option<f64>,
    eval: Arc<dyn Fn(&Genotype) -> f64 + Send + Sync>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("name", &self.name)
            .field("direction", &self.direction)
            .field("known_optimum", &self.known_optimum)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(
        name: impl Into<String>,
        spec: GenotypeSpec,
        direction: Direction,
        known_optimum: Option<f64>,
        eval: impl Fn(&Genotype) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        spec.validate()?;
        Ok(Problem {
            name: name.into(),
            spec,
            direction,
            known_optimum,
            eval: Arc::new(eval),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> &GenotypeSpec {
        &self.spec
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn known_optimum(&self) -> Option<f64> {
        self.known_optimum
    }

    /// Evaluation in the problem's own units (cost for minimize problems).
    pub fn raw_eval(&self, g: &Genotype) -> f64 {
        (self.eval)(g)
    }

    /// Engine-internal fitness: raw value for maximize problems, negated
    /// for minimize problems, so higher is always better.
    pub fn fitness(&self, g: &Genotype) -> f64 {
        self.to_internal(self.raw_eval(g))
    }

    pub fn to_internal(&self, raw: f64) -> f64 {
        match self.direction {
            Direction::Maximize => raw,
            Direction::Minimize => -raw,
        }
    }

    pub fn to_raw(&self, internal: f64) -> f64 {
        match self.direction {
            Direction::Maximize => internal,
            Direction::Minimize => -internal,
        }
    }

    pub fn internal_optimum(&self) -> Option<f64> {
        self.known_optimum.map(|v| self.to_internal(v))
    }
}

/// Count of 1-bits; maximize; optimum L.
pub fn onemax(len: usize) -> Result<Problem> {
    Problem::new(
        format!("onemax-{len}"),
        GenotypeSpec::bit_string(len),
        Direction::Maximize,
        Some(len as f64),
        |g| match g {
            Genotype::Bits(b) => b.ones() as f64,
            other => panic!("onemax evaluated on a {}", other.kind()),
        },
    )
}

/// Sum of squares; minimize; optimum 0 at the origin. The domain is
/// unbounded but initialization samples [lo, hi]^dim.
pub fn sphere(dim: usize, lo: f64, hi: f64) -> Result<Problem> {
    Problem::new(
        format!("sphere-{dim}"),
        GenotypeSpec::real_unbounded(dim, lo, hi),
        Direction::Minimize,
        Some(0.0),
        |g| {
            let values = match g {
                Genotype::Real(r) => &r.values,
                Genotype::SelfAdaptive(r) => &r.values,
                other => panic!("sphere evaluated on a {}", other.kind()),
            };
            values.iter().map(|x| x * x).sum()
        },
    )
}

/// Sphere over self-adaptive vectors, for step-size-adapting engines.
pub fn sphere_adaptive(dim: usize, lo: f64, hi: f64) -> Result<Problem> {
    let mut p = sphere(dim, lo, hi)?;
    p.spec = GenotypeSpec::self_adaptive(dim, lo, hi);
    Ok(p)
}

/// One-dimensional two-peak landscape on [-2, 2]: a global peak of height
/// 1 at x = 1 and a local peak of height 0.8 at x = -1. Maximize.
pub fn two_peaks() -> Result<Problem> {
    Problem::new(
        "two_peaks",
        GenotypeSpec::real_bounded(1, -2.0, 2.0),
        Direction::Maximize,
        Some(1.0),
        |g| {
            let x = match g {
                Genotype::Real(r) => r.values[0],
                other => panic!("two_peaks evaluated on a {}", other.kind()),
            };
            let global = (-(x - 1.0) * (x - 1.0) / 0.04).exp();
            let local = 0.8 * (-(x + 1.0) * (x + 1.0) / 0.04).exp();
            global.max(local)
        },
    )
}

/// Mean squared error of a parse tree against sample points; minimize.
/// Non-finite or astronomically large evaluations are capped at
/// [`OVERFLOW_SENTINEL`] so selection stays well-defined.
pub fn symreg(
    dataset: Vec<(f64, f64)>,
    set: Arc<PrimitiveSet>,
    max_depth: usize,
    init: TreeInit,
) -> Result<Problem> {
    if dataset.is_empty() {
        return Err(EvoError::InvalidConfig(
            "symbolic regression needs a non-empty dataset".into(),
        ));
    }
    if set.variables().len() != 1 {
        return Err(EvoError::InvalidConfig(format!(
            "symbolic regression over (x, y) samples needs exactly one tree variable, got {}",
            set.variables().len()
        )));
    }
    if dataset.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(EvoError::InvalidConfig(
            "symbolic regression dataset contains a non-finite sample".into(),
        ));
    }
    Problem::new(
        "symreg",
        GenotypeSpec::parse_tree(set, max_depth, init),
        Direction::Minimize,
        Some(0.0),
        move |g| {
            let tree = match g {
                Genotype::Tree(t) => t,
                other => panic!("symbolic regression evaluated on a {}", other.kind()),
            };
            let mut sum = 0.0;
            for &(x, y) in &dataset {
                let out = tree.eval(&[x]);
                if !out.is_finite() {
                    return OVERFLOW_SENTINEL;
                }
                sum += (out - y) * (out - y);
            }
            let mse = sum / dataset.len() as f64;
            if mse.is_finite() {
                mse.min(OVERFLOW_SENTINEL)
            } else {
                OVERFLOW_SENTINEL
            }
        },
    )
}

/// Closed-tour length under a symmetric distance matrix; minimize.
pub fn tour(matrix: Vec<Vec<f64>>) -> Result<Problem> {
    let n = matrix.len();
    if n == 0 {
        return Err(EvoError::InvalidConfig("distance matrix is empty".into()));
    }
    for (i, row) in matrix.iter().enumerate() {
        if row.len() != n {
            return Err(EvoError::InvalidConfig(format!(
                "distance matrix is not square: row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        for (j, &d) in row.iter().enumerate() {
            if !d.is_finite() || d < 0.0 {
                return Err(EvoError::InvalidConfig(format!(
                    "distance matrix entry ({i}, {j}) = {d} is not a finite nonnegative value"
                )));
            }
        }
    }
    for i in 0..n {
        if matrix[i][i] != 0.0 {
            return Err(EvoError::InvalidConfig(format!(
                "distance matrix diagonal entry ({i}, {i}) = {} is not zero",
                matrix[i][i]
            )));
        }
        for j in 0..i {
            if matrix[i][j] != matrix[j][i] {
                return Err(EvoError::InvalidConfig(format!(
                    "distance matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    Problem::new(
        format!("tour-{n}"),
        GenotypeSpec::permutation(n),
        Direction::Minimize,
        None,
        move |g| {
            let order = match g {
                Genotype::Perm(p) => &p.order,
                other => panic!("tour length evaluated on a {}", other.kind()),
            };
            let mut total = 0.0;
            for w in order.windows(2) {
                total += matrix[w[0]][w[1]];
            }
            total + matrix[order[order.len() - 1]][order[0]]
        },
    )
}

/// Loads (x, y) samples from a two-column comma-separated text file. A
/// single non-numeric first line is tolerated as a header.
pub fn load_dataset(path: &Path) -> Result<Vec<(f64, f64)>> {
    let file_err = |message: String| EvoError::DataFile {
        path: path.display().to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        match parse_pair(line) {
            Some(pair) => samples.push(pair),
            None if lineno == 0 => continue,
            None => {
                return Err(file_err(format!(
                    "line {}: expected two comma-separated numbers, got `{line}`",
                    lineno + 1
                )));
            }
        }
    }
    if samples.is_empty() {
        return Err(file_err("no data rows found".into()));
    }
    Ok(samples)
}

fn parse_pair(line: &str) -> Option<(f64, f64)> {
    let mut parts = line.split(',');
    let x = parts.next()?.trim().parse().ok()?;
    let y = parts.next()?.trim().parse().ok()?;
    if parts.next().is_some() {
        return None;
    }
    Some((x, y))
}

/// Loads a square distance matrix from a text file with one row per line,
/// entries separated by commas or whitespace.
pub fn load_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let file_err = |message: String| EvoError::DataFile {
        path: path.display().to_string(),
        message,
    };
    let text = fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>().map_err(|_| {
                    file_err(format!("line {}: `{s}` is not a number", lineno + 1))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(file_err("no matrix rows found".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::genotype::{BitString, Permutation, RealVector};
    use crate::rng::stream;
    use crate::tree::{ParseTree, TreeInit};

    fn bits(s: &str) -> Genotype {
        Genotype::Bits(BitString::parse(s).unwrap())
    }

    fn real(values: &[f64]) -> Genotype {
        Genotype::Real(RealVector::new(values.to_vec()))
    }

    #[test]
    fn onemax_counts_ones() {
        let p = onemax(5).unwrap();
        assert_eq!(p.raw_eval(&bits("11111")), 5.0);
        assert_eq!(p.raw_eval(&bits("00000")), 0.0);
        assert_eq!(p.raw_eval(&bits("10101")), 3.0);
        assert_eq!(p.internal_optimum(), Some(5.0));
    }

    #[test]
    fn sphere_sums_squares_and_negates_internally() {
        let p = sphere(2, -5.0, 5.0).unwrap();
        assert_eq!(p.raw_eval(&real(&[0.0, 0.0])), 0.0);
        assert_eq!(p.raw_eval(&real(&[1.0, 2.0])), 5.0);
        assert_eq!(p.raw_eval(&real(&[3.0, 4.0])), 25.0);
        assert_eq!(p.fitness(&real(&[1.0, 2.0])), -5.0);
        assert_eq!(p.internal_optimum(), Some(0.0));
    }

    #[test]
    fn two_peaks_has_the_documented_shape() {
        let p = two_peaks().unwrap();
        assert_eq!(p.raw_eval(&real(&[1.0])), 1.0);
        assert_eq!(p.raw_eval(&real(&[-1.0])), 0.8);
        let at_zero = p.raw_eval(&real(&[0.0]));
        assert!((at_zero - (-25.0_f64).exp()).abs() < 1e-24, "f(0) = {at_zero}");
        assert!((at_zero - 1.39e-11).abs() < 0.01e-11);
    }

    #[test]
    fn constant_zero_tree_against_identity_target() {
        let set = Arc::new(PrimitiveSet::arithmetic(&["x"], Some((-1.0, 1.0))).unwrap());
        let dataset = vec![(-1.0, -1.0), (0.0, 0.0), (1.0, 1.0)];
        let p = symreg(dataset, Arc::clone(&set), 6, TreeInit::Grow { depth: 3 }).unwrap();
        let zero = Genotype::Tree(ParseTree::new(
            Arc::clone(&set),
            crate::tree::Node::Const(0.0),
        ));
        let mse = p.raw_eval(&zero);
        assert!((mse - 2.0 / 3.0).abs() < 1e-15, "MSE {mse}");
    }

    #[test]
    fn perfect_tree_has_zero_error() {
        use crate::tree::Node;
        let set = Arc::new(PrimitiveSet::arithmetic(&["x"], Some((-1.0, 1.0))).unwrap());
        let dataset: Vec<(f64, f64)> = (0..10).map(|i| {
            let x = -1.0 + 0.2 * i as f64;
            (x, x * x)
        }).collect();
        let p = symreg(dataset, Arc::clone(&set), 6, TreeInit::Grow { depth: 3 }).unwrap();
        // x * x
        let mul = set
            .functions()
            .iter()
            .position(|f| f.name == "*")
            .unwrap();
        let square = Genotype::Tree(ParseTree::new(
            Arc::clone(&set),
            Node::Func { index: mul, children: vec![Node::Var(0), Node::Var(0)] },
        ));
        assert_eq!(p.raw_eval(&square), 0.0);
    }

    #[test]
    fn division_by_zero_is_protected() {
        use crate::tree::Node;
        let set = Arc::new(PrimitiveSet::arithmetic(&["x"], Some((-2.0, 2.0))).unwrap());
        let div = set.functions().iter().position(|f| f.name == "/").unwrap();
        let tree = ParseTree::new(
            Arc::clone(&set),
            Node::Func { index: div, children: vec![Node::Const(1.0), Node::Const(0.0)] },
        );
        for x in [-1.0, 0.0, 2.0] {
            assert_eq!(tree.eval(&[x]), 1.0);
        }
    }

    #[test]
    fn two_city_tour_is_out_and_back() {
        let p = tour(vec![vec![0.0, 7.0], vec![7.0, 0.0]]).unwrap();
        assert_eq!(p.raw_eval(&Genotype::Perm(Permutation::new(vec![0, 1]))), 14.0);
        assert_eq!(p.raw_eval(&Genotype::Perm(Permutation::new(vec![1, 0]))), 14.0);
    }

    #[test]
    fn unit_square_corner_tour_has_length_four() {
        // Corners (0,0), (1,0), (1,1), (0,1); diagonals sqrt(2).
        let s = 2.0_f64.sqrt();
        let m = vec![
            vec![0.0, 1.0, s, 1.0],
            vec![1.0, 0.0, 1.0, s],
            vec![s, 1.0, 0.0, 1.0],
            vec![1.0, s, 1.0, 0.0],
        ];
        let p = tour(m).unwrap();
        let order = Genotype::Perm(Permutation::new(vec![0, 1, 2, 3]));
        assert_eq!(p.raw_eval(&order), 4.0);
        let reversed = Genotype::Perm(Permutation::new(vec![3, 2, 1, 0]));
        assert_eq!(p.raw_eval(&reversed), 4.0);
    }

    #[test]
    fn asymmetric_or_misshapen_matrices_are_rejected() {
        assert!(tour(vec![vec![0.0, 1.0]]).is_err());
        assert!(tour(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(tour(vec![vec![1.0, 1.0], vec![1.0, 0.0]]).is_err());
        assert!(tour(vec![]).is_err());
    }

    #[test]
    fn evaluations_are_pure() {
        let problems = vec![
            onemax(16).unwrap(),
            sphere(4, -3.0, 3.0).unwrap(),
            two_peaks().unwrap(),
            tour(vec![
                vec![0.0, 2.0, 5.0],
                vec![2.0, 0.0, 3.0],
                vec![5.0, 3.0, 0.0],
            ])
            .unwrap(),
        ];
        let mut rng = stream(1);
        for p in &problems {
            for _ in 0..20 {
                let g = p.spec().sample(&mut rng).unwrap();
                let first = p.raw_eval(&g);
                for _ in 0..1000 {
                    assert_eq!(p.raw_eval(&g), first);
                }
            }
        }
    }

    #[test]
    fn dataset_loading_tolerates_a_header() {
        let dir = std::env::temp_dir().join(format!("evokit-ds-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("samples.csv");
        std::fs::write(&path, "x,y\n0.0,1.0\n1.5, 2.25\n").unwrap();
        assert_eq!(load_dataset(&path).unwrap(), vec![(0.0, 1.0), (1.5, 2.25)]);
        let bad = dir.join("bad.csv");
        std::fs::write(&bad, "0.0,1.0\noops,3\n").unwrap();
        let err = load_dataset(&bad).unwrap_err().to_string();
        assert!(err.contains("line 2"), "diagnostic was: {err}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn matrix_loading_accepts_commas_and_whitespace() {
        let dir = std::env::temp_dir().join(format!("evokit-mx-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("m.txt");
        std::fs::write(&path, "0 1.5\n1.5, 0\n").unwrap();
        assert_eq!(
            load_matrix(&path).unwrap(),
            vec![vec![0.0, 1.5], vec![1.5, 0.0]]
        );
        std::fs::remove_dir_all(&dir).ok();
    }
}

//! Representation families: bit-strings, real vectors (plain and
//! self-adaptive), permutations, and parse trees, together with their
//! uniform samplers and the genotype distance used by sharing and
//! diversity measurements.

use std::fmt;
use std::sync::Arc;

use crate::error::{EvoError, Result};
use crate::rng::Rng;
use crate::tree::{init_tree, ParseTree, PrimitiveSet, TreeInit};

/// Closed interval, lo <= hi.
pub type Interval = (f64, f64);

#[derive(Debug, Clone, PartialEq)]
pub struct BitString {
    pub bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// Builds from a "0"/"1" run such as "10110".
    pub fn parse(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(EvoError::GenotypeMismatch(format!(
                    "bit-string literal contains `{other}`"
                ))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(BitString { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealVector {
    pub values: Vec<f64>,
    /// Hard per-component bounds; operators clip into them when present.
    pub bounds: Option<Vec<Interval>>,
}

impl RealVector {
    pub fn new(values: Vec<f64>) -> Self {
        RealVector { values, bounds: None }
    }

    pub fn bounded(values: Vec<f64>, bounds: Vec<Interval>) -> Self {
        RealVector { values, bounds: Some(bounds) }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfAdaptiveRealVector {
    pub values: Vec<f64>,
    /// Per-component mutation step sizes, all > 0, evolved with the values.
    pub sigmas: Vec<f64>,
    pub bounds: Option<Vec<Interval>>,
}

impl SelfAdaptiveRealVector {
    pub fn new(values: Vec<f64>, sigmas: Vec<f64>) -> Self {
        SelfAdaptiveRealVector { values, sigmas, bounds: None }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Permutation {
    /// The integers 0..n-1, each exactly once.
    pub order: Vec<usize>,
}

impl Permutation {
    pub fn new(order: Vec<usize>) -> Self {
        Permutation { order }
    }

    pub fn identity(n: usize) -> Self {
        Permutation { order: (0..n).collect() }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn is_valid(&self) -> bool {
        let n = self.order.len();
        let mut seen = vec![false; n];
        for &v in &self.order {
            if v >= n || seen[v] {
                return false;
            }
            seen[v] = true;
        }
        true
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Genotype {
    Bits(BitString),
    Real(RealVector),
    SelfAdaptive(SelfAdaptiveRealVector),
    Perm(Permutation),
    Tree(ParseTree),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenotypeKind {
    BitString,
    RealVector,
    SelfAdaptiveRealVector,
    Permutation,
    ParseTree,
}

impl fmt::Display for GenotypeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            GenotypeKind::BitString => "bit-string",
            GenotypeKind::RealVector => "real vector",
            GenotypeKind::SelfAdaptiveRealVector => "self-adaptive real vector",
            GenotypeKind::Permutation => "permutation",
            GenotypeKind::ParseTree => "parse tree",
        };
        f.write_str(name)
    }
}

impl Genotype {
    pub fn kind(&self) -> GenotypeKind {
        match self {
            Genotype::Bits(_) => GenotypeKind::BitString,
            Genotype::Real(_) => GenotypeKind::RealVector,
            Genotype::SelfAdaptive(_) => GenotypeKind::SelfAdaptiveRealVector,
            Genotype::Perm(_) => GenotypeKind::Permutation,
            Genotype::Tree(_) => GenotypeKind::ParseTree,
        }
    }
}

impl fmt::Display for Genotype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Genotype::Bits(b) => write!(f, "{b}"),
            Genotype::Real(r) => write_decimal_list(f, &r.values),
            Genotype::SelfAdaptive(r) => write_decimal_list(f, &r.values),
            Genotype::Perm(p) => {
                write!(f, "[")?;
                for (i, v) in p.order.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            Genotype::Tree(t) => write!(f, "{t}"),
        }
    }
}

fn write_decimal_list(f: &mut fmt::Formatter<'_>, values: &[f64]) -> fmt::Result {
    write!(f, "[")?;
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{v}")?;
    }
    write!(f, "]")
}

/// Parameters a problem declares for its genotype: what to sample and which
/// constraints every individual must satisfy.
#[derive(Debug, Clone, PartialEq)]
pub enum GenotypeSpec {
    BitString {
        len: usize,
    },
    RealVector {
        /// Hard bounds carried by every individual; `None` leaves the domain
        /// unbounded.
        bounds: Option<Vec<Interval>>,
        /// Sampling intervals for initialization; required even on
        /// unbounded domains (uniform sampling needs a finite box).
        init: Vec<Interval>,
    },
    SelfAdaptiveRealVector {
        bounds: Option<Vec<Interval>>,
        init: Vec<Interval>,
        /// Initial step size per component.
        initial_sigma: Vec<f64>,
    },
    Permutation {
        n: usize,
    },
    ParseTree {
        primitives: Arc<PrimitiveSet>,
        /// Depth cap enforced by every tree operator.
        max_depth: usize,
        init: TreeInit,
    },
}

impl GenotypeSpec {
    /// Bit-string of length `len`.
    pub fn bit_string(len: usize) -> Self {
        GenotypeSpec::BitString { len }
    }

    /// Real vector with the same hard bounds and init interval per component.
    pub fn real_bounded(dim: usize, lo: f64, hi: f64) -> Self {
        GenotypeSpec::RealVector { bounds: Some(vec![(lo, hi); dim]), init: vec![(lo, hi); dim] }
    }

    /// Unbounded real vector initialized uniformly in [lo, hi]^dim.
    pub fn real_unbounded(dim: usize, lo: f64, hi: f64) -> Self {
        GenotypeSpec::RealVector { bounds: None, init: vec![(lo, hi); dim] }
    }

    /// Self-adaptive vector on an unbounded domain, initialized in
    /// [lo, hi]^dim with the default sigma of 10% of the init width.
    pub fn self_adaptive(dim: usize, lo: f64, hi: f64) -> Self {
        GenotypeSpec::SelfAdaptiveRealVector {
            bounds: None,
            init: vec![(lo, hi); dim],
            initial_sigma: vec![0.1 * (hi - lo); dim],
        }
    }

    pub fn permutation(n: usize) -> Self {
        GenotypeSpec::Permutation { n }
    }

    pub fn parse_tree(primitives: Arc<PrimitiveSet>, max_depth: usize, init: TreeInit) -> Self {
        GenotypeSpec::ParseTree { primitives, max_depth, init }
    }

    pub fn kind(&self) -> GenotypeKind {
        match self {
            GenotypeSpec::BitString { .. } => GenotypeKind::BitString,
            GenotypeSpec::RealVector { .. } => GenotypeKind::RealVector,
            GenotypeSpec::SelfAdaptiveRealVector { .. } => GenotypeKind::SelfAdaptiveRealVector,
            GenotypeSpec::Permutation { .. } => GenotypeKind::Permutation,
            GenotypeSpec::ParseTree { .. } => GenotypeKind::ParseTree,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GenotypeSpec::BitString { len } => {
                if *len == 0 {
                    return Err(EvoError::InvalidConfig("bit-string length must be >= 1".into()));
                }
            }
            GenotypeSpec::RealVector { bounds, init } => {
                validate_real_box(bounds.as_deref(), init)?;
            }
            GenotypeSpec::SelfAdaptiveRealVector { bounds, init, initial_sigma } => {
                validate_real_box(bounds.as_deref(), init)?;
                if initial_sigma.len() != init.len() {
                    return Err(EvoError::InvalidConfig(
                        "initial sigma count differs from the vector dimension".into(),
                    ));
                }
                if initial_sigma.iter().any(|&s| !(s > 0.0)) {
                    return Err(EvoError::InvalidConfig(
                        "every initial sigma must be > 0".into(),
                    ));
                }
            }
            GenotypeSpec::Permutation { n } => {
                if *n == 0 {
                    return Err(EvoError::InvalidConfig(
                        "permutation length must be >= 1".into(),
                    ));
                }
            }
            GenotypeSpec::ParseTree { init, max_depth, .. } => {
                // Set construction already rejects terminal-free sets.
                if init.max_init_depth() > *max_depth {
                    return Err(EvoError::InvalidConfig(format!(
                        "initialization depth {} exceeds max_depth {max_depth}",
                        init.max_init_depth()
                    )));
                }
                if let TreeInit::RampedHalfAndHalf { min_depth, max_depth } = init {
                    if min_depth > max_depth {
                        return Err(EvoError::InvalidConfig(
                            "ramped initialization needs min_depth <= max_depth".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Dimension of the search space: bit count, component count,
    /// permutation length; 0 for trees (variable-size genotypes).
    pub fn dimension(&self) -> usize {
        match self {
            GenotypeSpec::BitString { len } => *len,
            GenotypeSpec::RealVector { init, .. } => init.len(),
            GenotypeSpec::SelfAdaptiveRealVector { init, .. } => init.len(),
            GenotypeSpec::Permutation { n } => *n,
            GenotypeSpec::ParseTree { .. } => 0,
        }
    }

    /// One uniform sample.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Genotype> {
        Ok(match self {
            GenotypeSpec::BitString { len } => {
                Genotype::Bits(BitString::new((0..*len).map(|_| rng.random()).collect()))
            }
            GenotypeSpec::RealVector { bounds, init } => Genotype::Real(RealVector {
                values: sample_box(init, rng),
                bounds: bounds.clone(),
            }),
            GenotypeSpec::SelfAdaptiveRealVector { bounds, init, initial_sigma } => {
                Genotype::SelfAdaptive(SelfAdaptiveRealVector {
                    values: sample_box(init, rng),
                    sigmas: initial_sigma.clone(),
                    bounds: bounds.clone(),
                })
            }
            GenotypeSpec::Permutation { n } => {
                // Fisher-Yates.
                let mut order: Vec<usize> = (0..*n).collect();
                for i in (1..*n).rev() {
                    let j = rng.random_range(0..=i);
                    order.swap(i, j);
                }
                Genotype::Perm(Permutation { order })
            }
            GenotypeSpec::ParseTree { primitives, init, .. } => {
                Genotype::Tree(init_tree(primitives, init, rng)?)
            }
        })
    }

    /// Checks that a genotype belongs to this spec: kind, dimensions,
    /// bounds, bijectivity, tree validity.
    pub fn check(&self, g: &Genotype) -> Result<()> {
        let mismatch = |detail: String| Err(EvoError::GenotypeMismatch(detail));
        match (self, g) {
            (GenotypeSpec::BitString { len }, Genotype::Bits(b)) => {
                if b.len() != *len {
                    return mismatch(format!("expected {len} bits, found {}", b.len()));
                }
            }
            (GenotypeSpec::RealVector { init, bounds, .. }, Genotype::Real(r)) => {
                if r.len() != init.len() {
                    return mismatch(format!(
                        "expected dimension {}, found {}",
                        init.len(),
                        r.len()
                    ));
                }
                check_within(bounds.as_deref(), &r.values)?;
            }
            (
                GenotypeSpec::SelfAdaptiveRealVector { init, bounds, .. },
                Genotype::SelfAdaptive(r),
            ) => {
                if r.len() != init.len() || r.sigmas.len() != init.len() {
                    return mismatch(format!(
                        "expected dimension {}, found {} values / {} sigmas",
                        init.len(),
                        r.len(),
                        r.sigmas.len()
                    ));
                }
                if r.sigmas.iter().any(|&s| !(s > 0.0)) {
                    return mismatch("every sigma must be > 0".into());
                }
                check_within(bounds.as_deref(), &r.values)?;
            }
            (GenotypeSpec::Permutation { n }, Genotype::Perm(p)) => {
                if p.len() != *n {
                    return mismatch(format!("expected length {n}, found {}", p.len()));
                }
                if !p.is_valid() {
                    return mismatch(format!("not a permutation of 0..{n}"));
                }
            }
            (GenotypeSpec::ParseTree { max_depth, primitives, .. }, Genotype::Tree(t)) => {
                if !Arc::ptr_eq(t.set(), primitives) && **t.set() != **primitives {
                    return mismatch("tree uses a different primitive set".into());
                }
                t.check(*max_depth)?;
            }
            (spec, g) => {
                return mismatch(format!("expected {}, found {}", spec.kind(), g.kind()));
            }
        }
        Ok(())
    }
}

fn validate_real_box(bounds: Option<&[Interval]>, init: &[Interval]) -> Result<()> {
    if init.is_empty() {
        return Err(EvoError::InvalidConfig(
            "real vector needs explicit initialization intervals (dimension >= 1)".into(),
        ));
    }
    for &(lo, hi) in init {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(EvoError::InvalidConfig(format!(
                "initialization interval [{lo}, {hi}] is not a finite interval"
            )));
        }
    }
    if let Some(bs) = bounds {
        if bs.len() != init.len() {
            return Err(EvoError::InvalidConfig(
                "bound count differs from the vector dimension".into(),
            ));
        }
        for &(lo, hi) in bs {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(EvoError::InvalidConfig(format!(
                    "bound [{lo}, {hi}] is not a finite interval"
                )));
            }
        }
    }
    Ok(())
}

fn check_within(bounds: Option<&[Interval]>, values: &[f64]) -> Result<()> {
    if let Some(bs) = bounds {
        for (i, (&v, &(lo, hi))) in values.iter().zip(bs).enumerate() {
            if v < lo || v > hi {
                return Err(EvoError::GenotypeMismatch(format!(
                    "component {i} = {v} outside its bound [{lo}, {hi}]"
                )));
            }
        }
    }
    Ok(())
}

fn sample_box<R: Rng + ?Sized>(init: &[Interval], rng: &mut R) -> Vec<f64> {
    init.iter()
        .map(|&(lo, hi)| if hi > lo { rng.random_range(lo..hi) } else { lo })
        .collect()
}

/// Distance between two genotypes of the same kind: Hamming count for
/// bit-strings, Euclidean over values for real vectors (sigmas excluded),
/// differing-position count for permutations, structural difference for
/// trees.
pub fn distance(a: &Genotype, b: &Genotype) -> Result<f64> {
    match (a, b) {
        (Genotype::Bits(x), Genotype::Bits(y)) => {
            check_same_len(x.len(), y.len())?;
            Ok(x.bits.iter().zip(&y.bits).filter(|(p, q)| p != q).count() as f64)
        }
        (Genotype::Real(x), Genotype::Real(y)) => {
            check_same_len(x.len(), y.len())?;
            Ok(euclidean(&x.values, &y.values))
        }
        (Genotype::SelfAdaptive(x), Genotype::SelfAdaptive(y)) => {
            check_same_len(x.len(), y.len())?;
            Ok(euclidean(&x.values, &y.values))
        }
        (Genotype::Perm(x), Genotype::Perm(y)) => {
            check_same_len(x.len(), y.len())?;
            Ok(x.order.iter().zip(&y.order).filter(|(p, q)| p != q).count() as f64)
        }
        (Genotype::Tree(x), Genotype::Tree(y)) => Ok(crate::tree::structural_distance(x, y)),
        (a, b) => Err(EvoError::GenotypeMismatch(format!(
            "distance between {} and {}",
            a.kind(),
            b.kind()
        ))),
    }
}

fn check_same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(EvoError::GenotypeMismatch(format!(
            "dimension mismatch: {a} vs {b}"
        )));
    }
    Ok(())
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

//! Recombination operators. Bit-string, permutation, and tree operators
//! produce two children from one draw; the real-vector blends produce a
//! single child, so the pair dispatcher applies them twice with fresh
//! draws. The engine owns the per-pair application coin.

use crate::error::{EvoError, Result};
use crate::genotype::{
    BitString, Genotype, GenotypeKind, Permutation, RealVector, SelfAdaptiveRealVector,
};
use crate::rng::Rng;
use crate::tree::ParseTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossoverOp {
    /// Exchanges the tails after one cut point.
    OnePoint,
    /// Swaps each locus independently with probability 1/2.
    Uniform,
    /// Per-component convex blend with a fresh weight per component; on
    /// self-adaptive vectors the same weight blends value and sigma.
    Arithmetic,
    /// Each component is copied whole from one parent or the other; on
    /// self-adaptive vectors the (value, sigma) pair travels together.
    Discrete,
    /// Order crossover: a copied segment plus the remaining elements in
    /// the other parent's order.
    Order,
    /// Swaps one uniformly chosen subtree per parent; a child that would
    /// exceed the depth cap is replaced by its first parent.
    Subtree,
}

impl CrossoverOp {
    pub fn supports(self, kind: GenotypeKind) -> bool {
        matches!(
            (self, kind),
            (CrossoverOp::OnePoint, GenotypeKind::BitString)
                | (CrossoverOp::Uniform, GenotypeKind::BitString)
                | (CrossoverOp::Arithmetic, GenotypeKind::RealVector)
                | (CrossoverOp::Arithmetic, GenotypeKind::SelfAdaptiveRealVector)
                | (CrossoverOp::Discrete, GenotypeKind::RealVector)
                | (CrossoverOp::Discrete, GenotypeKind::SelfAdaptiveRealVector)
                | (CrossoverOp::Order, GenotypeKind::Permutation)
                | (CrossoverOp::Subtree, GenotypeKind::ParseTree)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverSpec {
    pub op: CrossoverOp,
    /// Per-pair application probability.
    pub p_c: f64,
}

impl CrossoverSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_c) {
            return Err(EvoError::InvalidConfig(format!(
                "crossover probability {} outside [0, 1]",
                self.p_c
            )));
        }
        Ok(())
    }
}

/// Tail exchange after a cut drawn uniformly from the interior positions.
/// A single-bit string has no interior cut, so the parents come back.
pub fn one_point_crossover<R: Rng + ?Sized>(
    a: &BitString,
    b: &BitString,
    rng: &mut R,
) -> Result<(BitString, BitString)> {
    check_same_len(a.len(), b.len())?;
    if a.len() < 2 {
        return Ok((a.clone(), b.clone()));
    }
    let cut = rng.random_range(1..a.len());
    Ok(one_point_at(a, b, cut))
}

fn one_point_at(a: &BitString, b: &BitString, cut: usize) -> (BitString, BitString) {
    let mut c1 = a.bits.clone();
    let mut c2 = b.bits.clone();
    c1[cut..].copy_from_slice(&b.bits[cut..]);
    c2[cut..].copy_from_slice(&a.bits[cut..]);
    (BitString::new(c1), BitString::new(c2))
}

pub fn uniform_crossover<R: Rng + ?Sized>(
    a: &BitString,
    b: &BitString,
    rng: &mut R,
) -> Result<(BitString, BitString)> {
    check_same_len(a.len(), b.len())?;
    let mut c1 = a.bits.clone();
    let mut c2 = b.bits.clone();
    for i in 0..c1.len() {
        if rng.random::<bool>() {
            let tmp = c1[i];
            c1[i] = c2[i];
            c2[i] = tmp;
        }
    }
    Ok((BitString::new(c1), BitString::new(c2)))
}

/// One child: per component, child_i = (1 - w_i) * a_i + w_i * b_i with a
/// fresh uniform weight w_i.
pub fn arithmetic_crossover<R: Rng + ?Sized>(
    a: &RealVector,
    b: &RealVector,
    rng: &mut R,
) -> Result<RealVector> {
    check_same_len(a.len(), b.len())?;
    let weights: Vec<f64> = (0..a.len()).map(|_| rng.random()).collect();
    let mut child = a.clone();
    child.values = blend(&a.values, &b.values, &weights);
    Ok(child)
}

/// Arithmetic blend for self-adaptive vectors. One weight per component,
/// shared by the value and its sigma so the pair stays coherent.
pub fn intermediate_recombination<R: Rng + ?Sized>(
    a: &SelfAdaptiveRealVector,
    b: &SelfAdaptiveRealVector,
    rng: &mut R,
) -> Result<SelfAdaptiveRealVector> {
    check_same_len(a.len(), b.len())?;
    let weights: Vec<f64> = (0..a.len()).map(|_| rng.random()).collect();
    let mut child = a.clone();
    child.values = blend(&a.values, &b.values, &weights);
    child.sigmas = blend(&a.sigmas, &b.sigmas, &weights);
    Ok(child)
}

/// One child: each component copied from a or b with probability 1/2.
pub fn discrete_recombination<R: Rng + ?Sized>(
    a: &RealVector,
    b: &RealVector,
    rng: &mut R,
) -> Result<RealVector> {
    check_same_len(a.len(), b.len())?;
    let mut child = a.clone();
    for i in 0..child.values.len() {
        if rng.random::<bool>() {
            child.values[i] = b.values[i];
        }
    }
    Ok(child)
}

/// Discrete recombination where each (value, sigma) pair travels together.
pub fn discrete_recombination_adaptive<R: Rng + ?Sized>(
    a: &SelfAdaptiveRealVector,
    b: &SelfAdaptiveRealVector,
    rng: &mut R,
) -> Result<SelfAdaptiveRealVector> {
    check_same_len(a.len(), b.len())?;
    let mut child = a.clone();
    for i in 0..child.values.len() {
        if rng.random::<bool>() {
            child.values[i] = b.values[i];
            child.sigmas[i] = b.sigmas[i];
        }
    }
    Ok(child)
}

/// Order crossover. Child 1 keeps a's segment [i, j) in place and receives
/// the remaining elements in the order they appear in b, scanning from j
/// and wrapping; child 2 is the mirror image.
pub fn order_crossover<R: Rng + ?Sized>(
    a: &Permutation,
    b: &Permutation,
    rng: &mut R,
) -> Result<(Permutation, Permutation)> {
    check_same_len(a.len(), b.len())?;
    let n = a.len();
    let (p, q) = (rng.random_range(0..=n), rng.random_range(0..=n));
    let (i, j) = (p.min(q), p.max(q));
    Ok(order_with_segment(a, b, i, j))
}

fn order_with_segment(
    a: &Permutation,
    b: &Permutation,
    i: usize,
    j: usize,
) -> (Permutation, Permutation) {
    (
        Permutation::new(ox_child(&a.order, &b.order, i, j)),
        Permutation::new(ox_child(&b.order, &a.order, i, j)),
    )
}

fn ox_child(keep: &[usize], fill: &[usize], i: usize, j: usize) -> Vec<usize> {
    let n = keep.len();
    let mut child = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for k in i..j {
        child[k] = keep[k];
        used[keep[k]] = true;
    }
    let mut pos = j % n;
    for k in 0..n {
        let v = fill[(j + k) % n];
        if used[v] {
            continue;
        }
        child[pos] = v;
        used[v] = true;
        pos = (pos + 1) % n;
    }
    child
}

/// Swaps one uniformly chosen subtree per parent. A child that would
/// exceed `max_depth` is replaced by its own first parent.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &ParseTree,
    b: &ParseTree,
    max_depth: usize,
    rng: &mut R,
) -> (ParseTree, ParseTree) {
    let ia = rng.random_range(0..a.node_count());
    let ib = rng.random_range(0..b.node_count());
    subtree_swap_at(a, b, ia, ib, max_depth)
}

fn subtree_swap_at(
    a: &ParseTree,
    b: &ParseTree,
    ia: usize,
    ib: usize,
    max_depth: usize,
) -> (ParseTree, ParseTree) {
    let sub_a = a.subtree(ia);
    let sub_b = b.subtree(ib);
    let c1 = a.with_replaced(ia, sub_b);
    let c2 = b.with_replaced(ib, sub_a);
    let c1 = if c1.depth() > max_depth { a.clone() } else { c1 };
    let c2 = if c2.depth() > max_depth { b.clone() } else { c2 };
    (c1, c2)
}

/// Recombines one genitor pair into two offspring. Single-child blends run
/// twice with independent draws; `tree_max_depth` is consulted only by
/// subtree crossover.
pub fn crossover_pair<R: Rng + ?Sized>(
    a: &Genotype,
    b: &Genotype,
    op: CrossoverOp,
    tree_max_depth: usize,
    rng: &mut R,
) -> Result<(Genotype, Genotype)> {
    match (op, a, b) {
        (CrossoverOp::OnePoint, Genotype::Bits(x), Genotype::Bits(y)) => {
            let (c1, c2) = one_point_crossover(x, y, rng)?;
            Ok((Genotype::Bits(c1), Genotype::Bits(c2)))
        }
        (CrossoverOp::Uniform, Genotype::Bits(x), Genotype::Bits(y)) => {
            let (c1, c2) = uniform_crossover(x, y, rng)?;
            Ok((Genotype::Bits(c1), Genotype::Bits(c2)))
        }
        (CrossoverOp::Arithmetic, Genotype::Real(x), Genotype::Real(y)) => {
            let c1 = arithmetic_crossover(x, y, rng)?;
            let c2 = arithmetic_crossover(x, y, rng)?;
            Ok((Genotype::Real(c1), Genotype::Real(c2)))
        }
        (CrossoverOp::Arithmetic, Genotype::SelfAdaptive(x), Genotype::SelfAdaptive(y)) => {
            let c1 = intermediate_recombination(x, y, rng)?;
            let c2 = intermediate_recombination(x, y, rng)?;
            Ok((Genotype::SelfAdaptive(c1), Genotype::SelfAdaptive(c2)))
        }
        (CrossoverOp::Discrete, Genotype::Real(x), Genotype::Real(y)) => {
            let c1 = discrete_recombination(x, y, rng)?;
            let c2 = discrete_recombination(x, y, rng)?;
            Ok((Genotype::Real(c1), Genotype::Real(c2)))
        }
        (CrossoverOp::Discrete, Genotype::SelfAdaptive(x), Genotype::SelfAdaptive(y)) => {
            let c1 = discrete_recombination_adaptive(x, y, rng)?;
            let c2 = discrete_recombination_adaptive(x, y, rng)?;
            Ok((Genotype::SelfAdaptive(c1), Genotype::SelfAdaptive(c2)))
        }
        (CrossoverOp::Order, Genotype::Perm(x), Genotype::Perm(y)) => {
            let (c1, c2) = order_crossover(x, y, rng)?;
            Ok((Genotype::Perm(c1), Genotype::Perm(c2)))
        }
        (CrossoverOp::Subtree, Genotype::Tree(x), Genotype::Tree(y)) => {
            let (c1, c2) = subtree_crossover(x, y, tree_max_depth, rng);
            Ok((Genotype::Tree(c1), Genotype::Tree(c2)))
        }
        (op, a, _) => Err(EvoError::GenotypeMismatch(format!(
            "{op:?} crossover applied to a {}",
            a.kind()
        ))),
    }
}

fn check_same_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(EvoError::GenotypeMismatch(format!(
            "parents of dimension {a} and {b}"
        )));
    }
    Ok(())
}

fn blend(a: &[f64], b: &[f64], weights: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(weights)
        // The clamp pins down what rounding would otherwise break: the
        // child stays inside the parental interval, and equal parents
        // reproduce themselves bit for bit.
        .map(|((&x, &y), &w)| ((1.0 - w) * x + w * y).clamp(x.min(y), x.max(y)))
        .collect()
}

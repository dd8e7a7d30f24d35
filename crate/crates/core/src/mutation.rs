//! Mutation operators, one per representation family.

use crate::error::{EvoError, Result};
use crate::genotype::{Genotype, GenotypeKind};
use crate::rng::{normal, Rng};
use crate::tree::{grow_subtree, ParseTree};

#[derive(Debug, Clone, PartialEq)]
pub enum MutationSpec {
    /// Flips each bit independently with probability `p_m`.
    BitFlip { p_m: f64 },
    /// Adds N(0, sigma^2) noise to every component, then clips to bounds.
    Gaussian { sigma: f64 },
    /// Log-normal step-size adaptation: each sigma is rescaled by
    /// exp(tau_prime * g + tau * h_i) with one global draw g and one draw
    /// h_i per component, floored at `sigma_floor`, and only then used to
    /// perturb the matching value.
    SelfAdaptive { tau: f64, tau_prime: f64, sigma_floor: f64 },
    /// Exchanges two distinct positions, `swaps` times.
    Swap { swaps: usize },
    /// With probability `probability`, replaces a uniformly chosen node by
    /// a freshly grown subtree that keeps the whole tree within
    /// `max_depth`.
    Subtree { probability: f64, max_depth: usize },
}

impl MutationSpec {
    pub fn kind(&self) -> GenotypeKind {
        match self {
            MutationSpec::BitFlip { .. } => GenotypeKind::BitString,
            MutationSpec::Gaussian { .. } => GenotypeKind::RealVector,
            MutationSpec::SelfAdaptive { .. } => GenotypeKind::SelfAdaptiveRealVector,
            MutationSpec::Swap { .. } => GenotypeKind::Permutation,
            MutationSpec::Subtree { .. } => GenotypeKind::ParseTree,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MutationSpec::BitFlip { p_m } => {
                if !(0.0..=1.0).contains(&p_m) {
                    return Err(EvoError::InvalidConfig(format!(
                        "bit-flip probability {p_m} outside [0, 1]"
                    )));
                }
            }
            MutationSpec::Gaussian { sigma } => {
                if !(sigma >= 0.0 && sigma.is_finite()) {
                    return Err(EvoError::InvalidConfig(format!(
                        "gaussian mutation sigma must be >= 0, got {sigma}"
                    )));
                }
            }
            MutationSpec::SelfAdaptive { tau, tau_prime, sigma_floor } => {
                if !(tau >= 0.0 && tau.is_finite()) || !(tau_prime >= 0.0 && tau_prime.is_finite())
                {
                    return Err(EvoError::InvalidConfig(format!(
                        "learning rates must be >= 0, got tau={tau}, tau_prime={tau_prime}"
                    )));
                }
                if !(sigma_floor > 0.0 && sigma_floor.is_finite()) {
                    return Err(EvoError::InvalidConfig(format!(
                        "sigma floor must be > 0, got {sigma_floor}"
                    )));
                }
            }
            MutationSpec::Swap { swaps } => {
                if swaps == 0 {
                    return Err(EvoError::InvalidConfig(
                        "swap mutation needs at least one swap".into(),
                    ));
                }
            }
            MutationSpec::Subtree { probability, .. } => {
                if !(0.0..=1.0).contains(&probability) {
                    return Err(EvoError::InvalidConfig(format!(
                        "subtree mutation probability {probability} outside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Applies the operator matching the genotype. The spec kind must match
/// the genotype kind; the engine validates this once per run.
pub fn mutate<R: Rng + ?Sized>(
    g: &Genotype,
    spec: &MutationSpec,
    rng: &mut R,
) -> Result<Genotype> {
    match (spec, g) {
        (MutationSpec::BitFlip { p_m }, Genotype::Bits(b)) => {
            let mut out = b.clone();
            for bit in &mut out.bits {
                if rng.random::<f64>() < *p_m {
                    *bit = !*bit;
                }
            }
            Ok(Genotype::Bits(out))
        }
        (MutationSpec::Gaussian { sigma }, Genotype::Real(r)) => {
            let mut out = r.clone();
            for (i, v) in out.values.iter_mut().enumerate() {
                *v += sigma * normal(rng);
                if let Some(bounds) = &out.bounds {
                    let (lo, hi) = bounds[i];
                    *v = v.clamp(lo, hi);
                }
            }
            Ok(Genotype::Real(out))
        }
        (
            MutationSpec::SelfAdaptive { tau, tau_prime, sigma_floor },
            Genotype::SelfAdaptive(r),
        ) => {
            let mut out = r.clone();
            let global = normal(rng);
            for s in &mut out.sigmas {
                *s = (*s * (tau_prime * global + tau * normal(rng)).exp()).max(*sigma_floor);
            }
            for (i, v) in out.values.iter_mut().enumerate() {
                *v += out.sigmas[i] * normal(rng);
                if let Some(bounds) = &out.bounds {
                    let (lo, hi) = bounds[i];
                    *v = v.clamp(lo, hi);
                }
            }
            Ok(Genotype::SelfAdaptive(out))
        }
        (MutationSpec::Swap { swaps }, Genotype::Perm(p)) => {
            let n = p.len();
            if n < 2 {
                return Err(EvoError::GenotypeMismatch(
                    "swap mutation needs a permutation of length >= 2".into(),
                ));
            }
            let mut out = p.clone();
            for _ in 0..*swaps {
                let i = rng.random_range(0..n);
                // Uniform over the n-1 positions other than i.
                let mut j = rng.random_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                out.order.swap(i, j);
            }
            Ok(Genotype::Perm(out))
        }
        (MutationSpec::Subtree { probability, max_depth }, Genotype::Tree(t)) => {
            if rng.random::<f64>() < *probability {
                Ok(Genotype::Tree(subtree_mutate(t, *max_depth, rng)))
            } else {
                Ok(Genotype::Tree(t.clone()))
            }
        }
        (spec, g) => Err(EvoError::GenotypeMismatch(format!(
            "{:?} mutation applied to a {}",
            spec.kind(),
            g.kind()
        ))),
    }
}

/// Replaces a uniformly chosen node by a grown subtree whose depth budget
/// is what remains below the depth cap at that node.
pub fn subtree_mutate<R: Rng + ?Sized>(
    tree: &ParseTree,
    max_depth: usize,
    rng: &mut R,
) -> ParseTree {
    let index = rng.random_range(0..tree.node_count());
    let budget = max_depth.saturating_sub(tree.depth_of(index));
    let replacement = grow_subtree(tree.set(), budget, rng);
    tree.with_replaced(index, replacement)
}

use num_bigint::BigUint;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::model::UrnModel;
use super::occupancy::{run_dp, window_cap, OccupancySpec, DEFAULT_MAX_STATES};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest ground set for which all subsets are enumerated.
pub const MAX_SUBSET_BITS: usize = 20;

/// An increasing family of subsets of `{0..m-1}`, stored by its minimal sets
/// (bitmasks). A set belongs iff it contains some minimal set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncreasingFamily {
    m: usize,
    minimal: Vec<u64>,
}

impl IncreasingFamily {
    /// Up-closure of `generators`; non-minimal generators are dropped.
    pub fn new(m: usize, generators: Vec<u64>) -> Result<Self> {
        if m > 63 {
            return Err(Error::cap("ground set size", m as u128, 63));
        }
        if let Some(g) = generators.iter().find(|&&g| g >> m != 0) {
            return Err(Error::dim(format!("set {g:#b} has elements outside [0, {m})")));
        }
        let mut minimal: Vec<u64> = generators
            .iter()
            .copied()
            .filter(|&g| !generators.iter().any(|&h| h != g && h & g == h))
            .collect();
        minimal.sort_unstable();
        minimal.dedup();
        Ok(IncreasingFamily { m, minimal })
    }

    pub fn from_sets(m: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let mut masks = Vec::with_capacity(sets.len());
        for s in sets {
            let mut mask = 0u64;
            for &e in s {
                if e >= m || e >= 64 {
                    return Err(Error::dim(format!("element {e} outside [0, {m})")));
                }
                mask |= 1 << e;
            }
            masks.push(mask);
        }
        IncreasingFamily::new(m, masks)
    }

    /// Every subset.
    pub fn all(m: usize) -> Self {
        IncreasingFamily { m, minimal: vec![0] }
    }

    /// No subset.
    pub fn empty(m: usize) -> Self {
        IncreasingFamily { m, minimal: vec![] }
    }

    /// Sets with at least `k` elements.
    pub fn at_least(m: usize, k: usize) -> Self {
        let minimal = (0u64..1 << m).filter(|s| s.count_ones() as usize == k).collect();
        IncreasingFamily { m, minimal }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn minimal(&self) -> &[u64] {
        &self.minimal
    }

    pub fn contains(&self, set: u64) -> bool {
        self.minimal.iter().any(|&g| g & set == g)
    }

    pub fn minimal_sets(&self) -> Vec<Vec<usize>> {
        self.minimal
            .iter()
            .map(|&g| (0..self.m).filter(|e| g >> e & 1 == 1).collect())
            .collect()
    }
}

/// `p(A, a, b) = Pr(σ⁻¹(last) ∈ A | B_j ∈ [a_j, b_j] for every other urn)`.
///
/// Sums over `S ⊆ [m]` the weight of `σ⁻¹(last) = S` times a DP over the
/// remaining balls restricted to the other urns.
pub fn tail_event_prob(model: &UrnModel, family: &IncreasingFamily, a: &[usize], b: &[usize]) -> Result<Rational> {
    let (num, den) = tail_event_weights(model, family, a, b)?;
    if den.is_zero() {
        return Err(Error::zero_prob(format!("windows a = {a:?}, b = {b:?}")));
    }
    Ok(rational::ratio(&num, &den))
}

/// Unnormalized numerator and denominator of [`tail_event_prob`].
pub(crate) fn tail_event_weights(
    model: &UrnModel,
    family: &IncreasingFamily,
    a: &[usize],
    b: &[usize],
) -> Result<(BigUint, BigUint)> {
    let (m, n) = (model.m(), model.n());
    if family.m() != m {
        return Err(Error::dim(format!("family is over {} balls, model has {m}", family.m())));
    }
    if m > MAX_SUBSET_BITS {
        return Err(Error::cap("subsets of balls", 1u128 << m, 1u128 << MAX_SUBSET_BITS));
    }
    if a.len() != n - 1 || b.len() != n - 1 {
        return Err(Error::dim(format!("window vectors need {} entries", n - 1)));
    }
    let last = n - 1;
    let spec = OccupancySpec::new(
        (0..last).map(|j| vec![j]).collect(),
        (0..last).map(|j| window_cap(b[j], m)).collect(),
    )?;
    let mut allowed = vec![true; n];
    allowed[last] = false;
    let parts: Vec<Result<(BigUint, bool)>> = (0u64..1 << m)
        .into_par_iter()
        .map(|s| {
            let mut w = BigUint::from(1u32);
            for i in 0..m {
                if s >> i & 1 == 1 {
                    w *= &model.scaled_row(i)[last];
                }
            }
            if w.is_zero() {
                return Ok((w, false));
            }
            let rest: Vec<usize> = (0..m).filter(|i| s >> i & 1 == 0).collect();
            let (space, weights) = run_dp(model, &rest, &allowed, &spec, DEFAULT_MAX_STATES)?;
            let mut inside = BigUint::zero();
            for (idx, v) in weights.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let x = space.outcome(idx);
                if (0..last).all(|j| a[j] <= x[j] && x[j] <= b[j]) {
                    inside += v;
                }
            }
            Ok((w * inside, family.contains(s)))
        })
        .collect();
    let mut num = BigUint::zero();
    let mut den = BigUint::zero();
    for part in parts {
        let (w, member) = part?;
        if member {
            num += &w;
        }
        den += w;
    }
    Ok((num, den))
}

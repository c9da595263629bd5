use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::measure::{check_na, ChainProductSpace, FiniteMeasure, NaCaps};
use crate::urn::oracle::for_each_assignment;
use crate::urn::UrnModel;
use crate::verdict::Verdict;

/// Largest `m n` for the dense `ξ` law on `{0,1}^{mn}`.
pub const MAX_QQ_CELLS: usize = 16;

/// Largest `n^m` enumerated by [`qq_check`].
pub const MAX_QQ_ASSIGNMENTS: u128 = 1 << 20;

/// One constrained block `T_r` of ball-urn cells with `ξ(T_r) ∈ [lo, hi]`.
/// Cells not listed in any block form the unconstrained `T_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellBlock {
    pub cells: Vec<(usize, usize)>,
    pub lo: usize,
    pub hi: usize,
}

/// Law of the indicator array `ξ_ij = 1{σ(i) = j}` given the block
/// constraints, on `{0,1}^{mn}` with coordinate `i n + j`.
pub fn xi_law(model: &UrnModel, blocks: &[CellBlock]) -> Result<FiniteMeasure> {
    let (m, n) = (model.m(), model.n());
    if m * n > MAX_QQ_CELLS {
        return Err(Error::cap("xi coordinates m n", (m * n) as u128, MAX_QQ_CELLS as u128));
    }
    let mut owner = vec![None; m * n];
    for (r, block) in blocks.iter().enumerate() {
        if block.lo > block.hi {
            return Err(Error::invalid(format!("block {r} has lo > hi")));
        }
        for &(i, j) in &block.cells {
            if i >= m || j >= n {
                return Err(Error::dim(format!("cell ({i}, {j}) outside {m} x {n}")));
            }
            if owner[i * n + j].replace(r).is_some() {
                return Err(Error::invalid(format!("cell ({i}, {j}) is in two blocks")));
            }
        }
    }
    let space = ChainProductSpace::binary(m * n);
    let mut weights = vec![BigUint::zero(); space.num_points()];
    let mut counts = vec![0usize; blocks.len()];
    for_each_assignment(model, MAX_QQ_ASSIGNMENTS, |sigma, w| {
        counts.iter_mut().for_each(|c| *c = 0);
        for (i, &j) in sigma.iter().enumerate() {
            if let Some(r) = owner[i * n + j] {
                counts[r] += 1;
            }
        }
        if blocks.iter().zip(&counts).all(|(b, &c)| b.lo <= c && c <= b.hi) {
            let mut x = vec![0usize; m * n];
            for (i, &j) in sigma.iter().enumerate() {
                x[i * n + j] = 1;
            }
            weights[space.index(&x)] += w;
        }
    })?;
    FiniteMeasure::from_int_weights(space, &weights).map_err(|e| match e {
        Error::ZeroWeight => Error::zero_prob("block constraints have probability zero"),
        other => other,
    })
}

/// NA of the conditioned `ξ` array. Events are compared when they depend on
/// disjoint sets of `(i, j)` coordinates; cap limits make the verdict
/// inconclusive unless a violation turns up first.
pub fn qq_check(model: &UrnModel, blocks: &[CellBlock], caps: &NaCaps) -> Result<Verdict> {
    let mu = xi_law(model, blocks)?;
    let mut v = check_na(&mu, caps);
    v.property = "qq_na".into();
    if let Some(inner) = v.witness.take() {
        v.witness = Some(json!({"model": model.to_file(), "blocks": blocks, "n": model.n(), "inner": inner}));
    }
    Ok(v)
}

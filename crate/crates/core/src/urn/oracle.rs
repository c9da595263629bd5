//! Brute-force enumeration of all assignments; the reference for every DP.

use num_bigint::BigUint;
use num_traits::Zero;

use super::model::UrnModel;
use crate::error::{Error, Result};
use crate::measure::{ChainProductSpace, FiniteMeasure};

/// Default bound on `n^m`.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

fn assignment_count(model: &UrnModel, cap: u128) -> Result<usize> {
    let mut count: u128 = 1;
    for _ in 0..model.m() {
        count = count.saturating_mul(model.n() as u128);
        if count > cap {
            return Err(Error::cap("assignments n^m", count, cap));
        }
    }
    Ok(count as usize)
}

/// Calls `visit(σ, W)` for every assignment with its integer weight (rows
/// scaled as in the model); returns the total weight.
pub fn for_each_assignment(
    model: &UrnModel,
    cap: u128,
    mut visit: impl FnMut(&[usize], &BigUint),
) -> Result<BigUint> {
    let count = assignment_count(model, cap)?;
    let (m, n) = (model.m(), model.n());
    let mut sigma = vec![0usize; m];
    let mut total = BigUint::zero();
    for _ in 0..count {
        let mut w = BigUint::from(1u32);
        for (i, &j) in sigma.iter().enumerate() {
            w *= &model.scaled_row(i)[j];
        }
        visit(&sigma, &w);
        total += w;
        // Odometer with the last ball varying fastest.
        for slot in sigma.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    Ok(total)
}

/// The law of `σ` as a measure on `[n]^m`.
pub fn assignment_law_oracle(model: &UrnModel) -> Result<FiniteMeasure> {
    assignment_law_oracle_capped(model, DEFAULT_ENUMERATION_CAP)
}

pub fn assignment_law_oracle_capped(model: &UrnModel, cap: u128) -> Result<FiniteMeasure> {
    let space = ChainProductSpace::new(vec![model.n(); model.m()])?;
    let mut weights = Vec::with_capacity(space.num_points());
    for_each_assignment(model, cap, |_, w| weights.push(w.clone()))?;
    FiniteMeasure::from_int_weights(space, &weights)
}

/// Law of `f(σ)` computed by enumeration.
pub fn oracle_pushforward(
    model: &UrnModel,
    target: ChainProductSpace,
    mut f: impl FnMut(&[usize]) -> Vec<usize>,
) -> Result<FiniteMeasure> {
    let mut weights = vec![BigUint::zero(); target.num_points()];
    let mut bad = false;
    for_each_assignment(model, DEFAULT_ENUMERATION_CAP, |sigma, w| {
        let y = f(sigma);
        if target.contains(&y) {
            weights[target.index(&y)] += w;
        } else {
            bad = true;
        }
    })?;
    if bad {
        return Err(Error::dim("pushforward image outside target space"));
    }
    FiniteMeasure::from_int_weights(target, &weights)
}

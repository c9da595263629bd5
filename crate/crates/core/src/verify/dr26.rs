use num_bigint::BigUint;
use num_traits::Zero;
use serde_json::json;

use super::boxes::{intervals, product, BoxTable};
use crate::error::{Error, Result};
use crate::rational;
use crate::urn::{run_dp, IncreasingFamily, OccupancySpec, UrnModel, DEFAULT_MAX_STATES};
use crate::verdict::{Tally, Verdict};

/// Largest ball count for [`verify_dr26`].
pub const MAX_DR26_BALLS: usize = 16;

/// `p(A, a, b) = Pr(σ⁻¹(last) ∈ A | a_j <= B_j <= b_j for every other urn)`
/// is nonincreasing along every single-coordinate increment of `(a, b)`.
/// Pairs where either window has probability zero are skipped and counted.
pub fn verify_dr26(model: &UrnModel, family: &IncreasingFamily) -> Result<Verdict> {
    let (m, n) = (model.m(), model.n());
    if family.m() != m {
        return Err(Error::dim(format!("family is over {} balls, model has {m}", family.m())));
    }
    if m > MAX_DR26_BALLS {
        return Err(Error::cap("subsets of balls", 1u128 << m.min(127), 1u128 << MAX_DR26_BALLS));
    }
    let last = n - 1;
    let s = m + 1;
    let spec = OccupancySpec::new((0..last).map(|j| vec![j]).collect(), vec![m; last])?;
    let mut allowed = vec![true; n];
    allowed[last] = false;
    let size = s.pow(last as u32);
    let mut num = vec![BigUint::zero(); size];
    let mut den = vec![BigUint::zero(); size];
    // Condition on the exact set of balls in the last urn; the rest fall
    // among the other urns.
    for set in 0u64..1 << m {
        let mut w = BigUint::from(1u32);
        for i in 0..m {
            if set >> i & 1 == 1 {
                w *= &model.scaled_row(i)[last];
            }
        }
        if w.is_zero() {
            continue;
        }
        let rest: Vec<usize> = (0..m).filter(|i| set >> i & 1 == 0).collect();
        let (_, weights) = run_dp(model, &rest, &allowed, &spec, DEFAULT_MAX_STATES)?;
        let member = family.contains(set);
        for (idx, v) in weights.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let x = &w * v;
            if member {
                num[idx] += &x;
            }
            den[idx] += x;
        }
    }
    let sizes = vec![s; last];
    let boxed = vec![true; last];
    let num = BoxTable::new(num, &sizes, &boxed);
    let den = BoxTable::new(den, &sizes, &boxed);
    let mut tally = Tally::default();
    let mut failed = false;
    product(&vec![intervals(s); last], |w| {
        if failed {
            return;
        }
        let base: usize = w.iter().enumerate().map(|(j, &(lo, hi))| num.boxed(j, lo, hi)).sum();
        for (j, &(lo, hi)) in w.iter().enumerate() {
            for to in [(lo + 1, hi), (lo, hi + 1)] {
                if to.0 > to.1 || to.1 > m {
                    continue;
                }
                let up = base - num.boxed(j, lo, hi) + num.boxed(j, to.0, to.1);
                let outcome = if den.at(base).is_zero() || den.at(up).is_zero() {
                    None
                } else {
                    rational::ratio_le(num.at(up), den.at(up), num.at(base), den.at(base))
                };
                if tally.record(outcome, || {
                    let (a, b): (Vec<usize>, Vec<usize>) = w.iter().copied().unzip();
                    let mut w2 = w.to_vec();
                    w2[j] = to;
                    let (a2, b2): (Vec<usize>, Vec<usize>) = w2.into_iter().unzip();
                    json!({
                        "a": a, "b": b, "a_up": a2, "b_up": b2,
                        "p": rational::format(&rational::ratio(num.at(base), den.at(base))),
                        "p_up": rational::format(&rational::ratio(num.at(up), den.at(up))),
                        "family": family.minimal_sets(),
                    })
                }) {
                    failed = true;
                    return;
                }
            }
        }
    });
    Ok(tally.finish("dr26"))
}

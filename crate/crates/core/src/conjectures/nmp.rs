use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::measure::{check_normalized_matching, ChainProductSpace, FiniteMeasure};
use crate::urn::{run_dp, window_cap, ConditioningEvent, OccupancySpec, UrnModel, DEFAULT_MAX_STATES};
use crate::verdict::Verdict;

/// Largest ball count for [`subset_law`] (`2^m` outcomes).
pub const MAX_NMP_BALLS: usize = 16;

/// Law of `σ⁻¹(K)` given `Q`, as a measure on `{0,1}^m` (coordinate `i` is
/// `1` when ball `i` lands in `K`). The windows of `Q` must sit on urns of `K`.
pub fn subset_law(model: &UrnModel, q: &ConditioningEvent, k: &[usize]) -> Result<FiniteMeasure> {
    let (m, n) = (model.m(), model.n());
    if m > MAX_NMP_BALLS {
        return Err(Error::cap("subsets of balls", 1u128 << m, 1u128 << MAX_NMP_BALLS));
    }
    let mut in_k = vec![false; n];
    for &u in k {
        if u >= n {
            return Err(Error::dim(format!("urn {u} out of range")));
        }
        in_k[u] = true;
    }
    if let Some(u) = q.urns().into_iter().find(|&u| u >= n || !in_k[u]) {
        return Err(Error::invalid(format!("Q constrains urn {u}, which is not in K")));
    }
    let windows: Vec<(usize, usize)> = q.windows().values().copied().collect();
    let spec = OccupancySpec::new(
        q.urns().into_iter().map(|u| vec![u]).collect(),
        windows.iter().map(|&(_, hi)| window_cap(hi, m)).collect(),
    )?;
    // Weight of each ball outside K.
    let outside: Vec<BigUint> = (0..m)
        .map(|i| {
            let row = model.scaled_row(i);
            (0..n).filter(|&u| !in_k[u]).map(|u| &row[u]).sum()
        })
        .collect();
    let space = ChainProductSpace::binary(m);
    let mut weights = vec![BigUint::zero(); space.num_points()];
    let mut x = vec![0usize; m];
    for set in 0u32..1 << m {
        let mut w_out = BigUint::one();
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = (set >> i & 1) as usize;
            if *xi == 0 {
                w_out *= &outside[i];
            }
        }
        if w_out.is_zero() {
            continue;
        }
        let balls: Vec<usize> = (0..m).filter(|i| set >> i & 1 == 1).collect();
        let (states, table) = run_dp(model, &balls, &in_k, &spec, DEFAULT_MAX_STATES)?;
        let mut w_in = BigUint::zero();
        for (idx, w) in table.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let counts = states.outcome(idx);
            if windows.iter().zip(&counts).all(|(&(lo, hi), &c)| lo <= c && c <= hi) {
                w_in += w;
            }
        }
        weights[space.index(&x)] = w_in * w_out;
    }
    FiniteMeasure::from_int_weights(space, &weights).map_err(|e| match e {
        Error::ZeroWeight => Error::zero_prob("Q has probability zero"),
        other => other,
    })
}

/// Does the law of `σ⁻¹(K)` given `Q` have the normalized matching property?
/// A violation on generalized rows answers the question negatively.
pub fn check_nmp_question(model: &UrnModel, q: &ConditioningEvent, k: &[usize]) -> Result<Verdict> {
    let mu = subset_law(model, q, k)?;
    let mut v = check_normalized_matching(&mu)?;
    v.property = "nmp_question".into();
    if let Some(inner) = v.witness.take() {
        v.witness = Some(json!({"model": model.to_file(), "q": q.windows(), "K": k, "inner": inner}));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::urn::oracle_pushforward;
    use crate::urn::random::random_model;
    use crate::urn::{Assignment, Windows};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_urns_is_a_single_rank() {
        let model = UrnModel::from_ints(&[vec![1, 2], vec![3, 1], vec![1, 1]]).unwrap();
        let v = check_nmp_question(&model, &ConditioningEvent::trivial(), &[0, 1]).unwrap();
        assert!(v.is_holds());
        let mu = subset_law(&model, &ConditioningEvent::trivial(), &[0, 1]).unwrap();
        assert_eq!(mu.prob(&[1, 1, 1]), rat(1, 1));
    }

    #[test]
    fn uniform_binomial() {
        let model = UrnModel::uniform(3, 2);
        let mu = subset_law(&model, &ConditioningEvent::trivial(), &[0]).unwrap();
        assert!(mu.masses().iter().all(|p| *p == rat(1, 8)));
        assert!(check_nmp_question(&model, &ConditioningEvent::trivial(), &[0]).unwrap().is_holds());
    }

    #[test]
    fn matches_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(2..=4);
            let model = random_model(&mut rng, m, n, false, 6);
            let k: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
            let mut windows = Windows::new();
            for &u in &k {
                if rng.gen_bool(0.5) {
                    let lo = rng.gen_range(0..=m);
                    windows.insert(u, (lo, rng.gen_range(lo..=m)));
                }
            }
            let Ok(q) = ConditioningEvent::new(&model, windows.clone()) else {
                continue;
            };
            let got = subset_law(&model, &q, &k).unwrap();
            let joint = oracle_pushforward(&model, ChainProductSpace::binary(m + 1), |sigma| {
                let occ = Assignment(sigma.to_vec()).occupancy(n);
                let mut x: Vec<usize> = sigma.iter().map(|j| k.contains(j) as usize).collect();
                x.push(q.contains(&occ) as usize);
                x
            })
            .unwrap();
            let mut fix = vec![None; m + 1];
            fix[m] = Some(1);
            let want = joint.condition(&fix).unwrap().marginal(&(0..m).collect::<Vec<_>>()).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn q_must_live_on_k() {
        let model = UrnModel::uniform(2, 3);
        let q = ConditioningEvent::new(&model, Windows::from([(2, (0, 1))])).unwrap();
        assert!(subset_law(&model, &q, &[0, 1]).is_err());
        assert!(subset_law(&model, &q, &[0, 2]).is_ok());
    }
}

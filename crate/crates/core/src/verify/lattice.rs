use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::boxes::full_table;
use crate::error::{Error, Result};
use crate::measure::{check_nlc, check_support_convex, LatticeFn, NlcDirection};
use crate::rational::{self, Rational};
use crate::urn::{run_dp, OccupancySpec, UrnModel, Windows, DEFAULT_MAX_STATES};
use crate::verdict::Verdict;

/// Largest ball count for the subset function of [`verify_nlcf`].
pub const MAX_NLCF_BALLS: usize = 12;

/// `M_f(a) = Pr(a_j <= B_j <= a_j + f_j ∀ j)` for every `a` whose windows
/// meet `{0..m}`, that is `-f_j <= a_j <= m`. Keys are shifted to `a + f`
/// so they stay nonnegative; zero values are left out. Widths above `m` are
/// clamped to `m`, which only drops repeats of the all-one corner.
pub fn window_function(model: &UrnModel, f: &[usize]) -> Result<LatticeFn> {
    let (n, m) = (model.n(), model.m());
    if f.len() != n {
        return Err(Error::dim(format!("width vector has {} entries, model has {n} urns", f.len())));
    }
    let points = f.iter().try_fold(1usize, |acc, &w| acc.checked_mul(m + 1 + w.min(m)));
    match points {
        Some(p) if p <= DEFAULT_MAX_STATES => {}
        _ => {
            return Err(Error::cap(
                "window function points",
                f.iter().fold(1u128, |acc, &w| acc.saturating_mul((m + 1 + w.min(m)) as u128)),
                DEFAULT_MAX_STATES as u128,
            ))
        }
    }
    let (sizes, mut values) = full_table(model)?;
    let total: BigUint = values.iter().sum();
    let f: Vec<usize> = f.iter().map(|&w| w.min(m)).collect();
    let mut cur = sizes.clone();
    for x in 0..n {
        let s = m + 1;
        let out = s + f[x];
        let inner: usize = cur[x + 1..].iter().product();
        let outer: usize = cur[..x].iter().product();
        let mut next = vec![BigUint::zero(); outer * out * inner];
        let mut prefix = vec![BigUint::zero(); s + 1];
        for hi in 0..outer {
            for lo in 0..inner {
                for o in 0..s {
                    prefix[o + 1] = &prefix[o] + &values[(hi * s + o) * inner + lo];
                }
                for t in 0..out {
                    let (from, to) = (t.saturating_sub(f[x]), t.min(m));
                    next[(hi * out + t) * inner + lo] = &prefix[to + 1] - &prefix[from];
                }
            }
        }
        cur[x] = out;
        values = next;
    }
    let mut result = LatticeFn::new();
    for (idx, w) in values.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let mut key = vec![0; n];
        let mut rest = idx;
        for x in (0..n).rev() {
            key[x] = rest % cur[x];
            rest /= cur[x];
        }
        result.insert(key, rational::ratio(w, &total));
    }
    Ok(result)
}

/// The support of `M_f` is convex and `M_f(a) M_f(c) >= M_f(a∨c) M_f(a∧c)`.
pub fn verify_propcvx_cornlc(model: &UrnModel, f: &[usize]) -> Result<Verdict> {
    let mf = window_function(model, f)?;
    let convex = check_support_convex(&mf)?;
    let nlc = check_nlc(&mf, NlcDirection::Negative)?;
    Ok(Verdict::aggregate("propcvx_cornlc", [convex, nlc]))
}

fn check_windows(model: &UrnModel, windows: &Windows) -> Result<()> {
    for (&j, &(lo, hi)) in windows {
        if j >= model.n() {
            return Err(Error::dim(format!("urn {j} out of range")));
        }
        if lo > hi || hi > model.m() {
            return Err(Error::invalid(format!("window [{lo}, {hi}] on urn {j} needs lo <= hi <= m")));
        }
    }
    Ok(())
}

/// `f(A)`: total weight `Π_{i∈A} γ_{iσ(i)}` of the maps `σ: A → K` with
/// `S_j <= |σ⁻¹(j)| <= T_j` for every `j ∈ K`, where `K` is the set of
/// windowed urns. Keyed by the indicator vector of `A`; zeros left out.
pub fn nlcf_values(model: &UrnModel, windows: &Windows) -> Result<LatticeFn> {
    check_windows(model, windows)?;
    let m = model.m();
    if m > MAX_NLCF_BALLS {
        return Err(Error::cap("subsets of balls", 1u128 << m.min(127), 1u128 << MAX_NLCF_BALLS));
    }
    let urns: Vec<usize> = windows.keys().copied().collect();
    let spec = OccupancySpec::new(
        urns.iter().map(|&j| vec![j]).collect(),
        windows.values().map(|&(_, hi)| (hi + 1).min(m)).collect(),
    )?;
    let allowed: Vec<bool> = (0..model.n()).map(|j| windows.contains_key(&j)).collect();
    let dens: Vec<BigInt> = model.gamma().iter().map(|row| rational::common_denominator(row)).collect();
    let mut out = LatticeFn::new();
    for set in 0u64..1 << m {
        let balls: Vec<usize> = (0..m).filter(|i| set >> i & 1 == 1).collect();
        let (space, weights) = run_dp(model, &balls, &allowed, &spec, DEFAULT_MAX_STATES)?;
        let mut inside = BigUint::zero();
        for (idx, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let x = space.outcome(idx);
            if windows.values().zip(&x).all(|(&(lo, hi), &v)| lo <= v && v <= hi) {
                inside += w;
            }
        }
        if inside.is_zero() {
            continue;
        }
        // Undo the per-row scaling of the integer weights.
        let scale: BigInt = balls.iter().fold(BigInt::one(), |acc, &i| acc * &dens[i]);
        let key: Vec<usize> = (0..m).map(|i| (set >> i & 1) as usize).collect();
        out.insert(key, Rational::new(BigInt::from(inside), scale));
    }
    Ok(out)
}

/// `f(A∪B) f(A∩B) <= f(A) f(B)` for all `A, B ⊆ [m]`.
pub fn verify_nlcf(model: &UrnModel, windows: &Windows) -> Result<Verdict> {
    let f = nlcf_values(model, windows)?;
    let mut v = check_nlc(&f, NlcDirection::Negative)?;
    v.property = "nlcf".into();
    Ok(v)
}

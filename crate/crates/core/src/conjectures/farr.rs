use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use super::ideal::IdealSpec;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::verdict::{Tally, Verdict};

/// Largest ball count for the subset convolution (`3^m` work per urn).
pub const MAX_FARR_BALLS: usize = 14;

/// Largest urn count accepted by [`farr_probabilities`].
pub const MAX_FARR_URNS: usize = 32;

const GENERAL_NOTE: &str =
    "the ideal is not given as an independence complex; this is the stronger statement for arbitrary decreasing families";

fn check_p(n: usize, p: &Rational) -> Result<()> {
    if *p < Rational::zero() {
        return Err(Error::invalid("p must be nonnegative"));
    }
    if Rational::from_integer(n.into()) * p > Rational::one() {
        return Err(Error::invalid(format!(
            "n p = {} exceeds 1",
            rational::format(&(Rational::from_integer(n.into()) * p))
        )));
    }
    Ok(())
}

/// `Pr(A_L)` for `|L| = 0..=n`, where each ball lands in each of the `n`
/// urns with probability `p` and in the extra urn otherwise, and
/// `A_L = {σ⁻¹(j) ∈ ideal ∀ j ∈ L}`. By symmetry only `|L|` matters.
pub fn farr_probabilities(ideal: &IdealSpec, n: usize, p: &Rational) -> Result<Vec<Rational>> {
    let m = ideal.m();
    if m > MAX_FARR_BALLS {
        return Err(Error::cap("balls for subset convolution", m as u128, MAX_FARR_BALLS as u128));
    }
    if n > MAX_FARR_URNS {
        return Err(Error::cap("urns", n as u128, MAX_FARR_URNS as u128));
    }
    check_p(n, p)?;
    let full = 1usize << m;
    // tuples[S] = ordered tuples of disjoint ideal members with union S.
    let mut tuples = vec![BigUint::zero(); full];
    tuples[0] = BigUint::one();
    let mut out = Vec::with_capacity(n + 1);
    for l in 0..=n {
        if l > 0 {
            let mut next = vec![BigUint::zero(); full];
            for (s, slot) in next.iter_mut().enumerate() {
                // Sub-masks t of s that are members, paired with s \ t.
                let mut t = s;
                loop {
                    if ideal.contains(t as u32) && !tuples[s ^ t].is_zero() {
                        *slot += &tuples[s ^ t];
                    }
                    if t == 0 {
                        break;
                    }
                    t = (t - 1) & s;
                }
            }
            tuples = next;
        }
        let mut by_size = vec![BigUint::zero(); m + 1];
        for (s, c) in tuples.iter().enumerate() {
            by_size[s.count_ones() as usize] += c;
        }
        let q = Rational::one() - Rational::from_integer(l.into()) * p;
        let mut prob = Rational::zero();
        for (k, c) in by_size.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            prob += rational::from_biguint(c) * pow(p, k) * pow(&q, m - k);
        }
        out.push(prob);
    }
    Ok(out)
}

fn pow(x: &Rational, k: usize) -> Rational {
    num_traits::pow(x.clone(), k)
}

fn check_sets(n: usize, sets: [&[usize]; 3]) -> Result<()> {
    let mut seen = vec![false; n];
    for &u in sets.iter().copied().flatten() {
        if u >= n {
            return Err(Error::dim(format!("urn {u} out of range for n = {n}")));
        }
        if seen[u] {
            return Err(Error::invalid(format!("urn {u} appears twice; I, J, K must be disjoint")));
        }
        seen[u] = true;
    }
    Ok(())
}

pub(crate) fn ideal_json(ideal: &IdealSpec) -> Value {
    json!({"m": ideal.m(), "source": ideal.source()})
}

/// Compares `Pr(A_{I∪J∪K}) Pr(A_K)` with `Pr(A_{I∪K}) Pr(A_{J∪K})`, which is
/// `A_I ↓ A_J` given `A_K` cross-multiplied.
fn compare(probs: &[Rational], a: usize, b: usize, c: usize) -> Option<(bool, Rational, Rational)> {
    if probs[c].is_zero() {
        return None;
    }
    let lhs = &probs[a + b + c] * &probs[c];
    let rhs = &probs[a + c] * &probs[b + c];
    Some((lhs <= rhs, lhs, rhs))
}

fn witness(ideal: &IdealSpec, n: usize, p: &Rational, sets: [&[usize]; 3], probs: &[Rational]) -> Value {
    let [i, j, k] = sets;
    let (a, b, c) = (i.len(), j.len(), k.len());
    json!({
        "ideal": ideal_json(ideal),
        "n": n,
        "p": rational::format(p),
        "I": i, "J": j, "K": k,
        "p_k": rational::format(&probs[c]),
        "p_ik": rational::format(&probs[a + c]),
        "p_jk": rational::format(&probs[b + c]),
        "p_ijk": rational::format(&probs[a + b + c]),
    })
}

/// `A_I ↓ A_J` given `A_K` for disjoint urn sets, checked exactly.
pub fn farr_check(ideal: &IdealSpec, n: usize, p: &Rational, i: &[usize], j: &[usize], k: &[usize]) -> Result<Verdict> {
    check_sets(n, [i, j, k])?;
    let probs = farr_probabilities(ideal, n, p)?;
    let Some((ok, _, _)) = compare(&probs, i.len(), j.len(), k.len()) else {
        return Err(Error::zero_prob("Pr(A_K) = 0"));
    };
    let mut tally = Tally::default();
    tally.record(Some(ok), || witness(ideal, n, p, [i, j, k], &probs));
    let v = tally.finish("farr");
    Ok(if ideal.is_graph() { v } else { v.note(GENERAL_NOTE) })
}

/// Every choice of sizes `|I|, |J| >= 1`, `|K| >= 0` with `|I|+|J|+|K| <= n`;
/// the urn labels do not matter, so `I, J, K` are taken as consecutive runs.
pub fn farr_all(ideal: &IdealSpec, n: usize, p: &Rational) -> Result<Verdict> {
    let probs = farr_probabilities(ideal, n, p)?;
    let urns: Vec<usize> = (0..n).collect();
    let mut tally = Tally::default();
    'outer: for a in 1..=n {
        for b in a..=n - a {
            for c in 0..=n - a - b {
                let outcome = compare(&probs, a, b, c).map(|(ok, _, _)| ok);
                let sets = [&urns[..a], &urns[a..a + b], &urns[a + b..a + b + c]];
                if tally.record(outcome, || witness(ideal, n, p, sets, &probs)) {
                    break 'outer;
                }
            }
        }
    }
    let v = tally.finish("farr");
    Ok(if ideal.is_graph() { v } else { v.note(GENERAL_NOTE) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    /// Brute force over all `(n+1)^m` assignments; urn `n` is the extra urn.
    fn oracle(ideal: &IdealSpec, n: usize, p: &Rational, l: usize) -> Rational {
        let m = ideal.m();
        let q = Rational::one() - Rational::from_integer(n.into()) * p;
        let mut total = Rational::zero();
        let mut sigma = vec![0usize; m];
        loop {
            let mut masks = vec![0u32; n + 1];
            let mut w = Rational::one();
            for (i, &u) in sigma.iter().enumerate() {
                masks[u] |= 1 << i;
                w *= if u == n { q.clone() } else { p.clone() };
            }
            if (0..l).all(|u| ideal.contains(masks[u])) {
                total += w;
            }
            let mut i = 0;
            loop {
                if i == m {
                    return total;
                }
                sigma[i] += 1;
                if sigma[i] <= n {
                    break;
                }
                sigma[i] = 0;
                i += 1;
            }
        }
    }

    #[test]
    fn matches_enumeration() {
        let ideals = [
            IdealSpec::from_graph(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap(),
            IdealSpec::from_graph(4, vec![(0, 1), (2, 3), (1, 2)]).unwrap(),
            IdealSpec::from_maximal(4, vec![vec![0, 1, 2], vec![3]]).unwrap(),
        ];
        for ideal in &ideals {
            for (n, p) in [(2, rat(1, 3)), (3, rat(1, 4)), (3, rat(1, 3))] {
                let probs = farr_probabilities(ideal, n, &p).unwrap();
                for (l, got) in probs.iter().enumerate() {
                    assert_eq!(*got, oracle(ideal, n, &p, l), "n={n} l={l}");
                }
            }
        }
    }

    #[test]
    fn triangle() {
        // Independent sets of a triangle are the sets of size <= 1.
        // Pr(A_1) = (2/3)^3 + 3 (1/3)(2/3)^2 = 20/27 for p = 1/3 and two urns.
        let tri = IdealSpec::from_graph(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let probs = farr_probabilities(&tri, 2, &rat(1, 3)).unwrap();
        assert_eq!(probs[1], rat(20, 27));
        // Both urns hold at most one ball: 1 + 6 + 6 assignments of weight 1/27.
        assert_eq!(probs[2], rat(13, 27));
        let v = farr_check(&tri, 2, &rat(1, 3), &[0], &[1], &[]).unwrap();
        assert!(v.is_holds());
        assert!(v.notes.is_empty());
        assert!(rat(13, 27) <= rat(20, 27) * rat(20, 27));
    }

    #[test]
    fn edgeless_graph_gives_equality() {
        let full = IdealSpec::full(4).unwrap();
        let probs = farr_probabilities(&full, 3, &rat(1, 5)).unwrap();
        assert!(probs.iter().all(|x| *x == int(1)));
        assert!(farr_all(&full, 3, &rat(1, 5)).unwrap().is_holds());
    }

    #[test]
    fn empty_sides_are_vacuous() {
        let g = IdealSpec::from_graph(3, vec![(0, 1)]).unwrap();
        assert!(farr_check(&g, 3, &rat(1, 3), &[], &[], &[2]).unwrap().is_holds());
    }

    #[test]
    fn rejects_bad_input() {
        let g = IdealSpec::from_graph(3, vec![(0, 1)]).unwrap();
        assert!(farr_check(&g, 3, &rat(1, 2), &[0], &[1], &[]).is_err());
        assert!(farr_check(&g, 3, &rat(1, 3), &[0], &[0], &[]).is_err());
        assert!(farr_check(&g, 3, &rat(1, 3), &[0], &[3], &[]).is_err());
        // With np = 1 and a triangle, three balls in two urns force an edge.
        let tri = IdealSpec::from_graph(3, vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        let err = farr_check(&tri, 2, &rat(1, 2), &[0], &[], &[1]).map(|_| ());
        assert_eq!(err, Ok(()));
        let err = farr_check(&tri, 2, &rat(1, 2), &[], &[], &[0, 1]).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability(_)));
    }

    #[test]
    fn general_families_are_flagged() {
        let ideal = IdealSpec::from_maximal(3, vec![vec![0, 1]]).unwrap();
        let v = farr_all(&ideal, 2, &rat(1, 3)).unwrap();
        assert!(!v.notes.is_empty());
    }
}

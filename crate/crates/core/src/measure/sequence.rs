//! Log-concavity family of sequence checks and the binomial splitting of a law on ℕ.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::urn::JointXYLaw;
use crate::verdict::{Tally, Verdict};

pub fn has_internal_zeros(seq: &[Rational]) -> bool {
    let first = seq.iter().position(|x| !x.is_zero());
    let last = seq.iter().rposition(|x| !x.is_zero());
    match (first, last) {
        (Some(f), Some(l)) => seq[f..=l].iter().any(Zero::is_zero),
        _ => false,
    }
}

/// `i·a_i² >= (i+1)·a_{i-1}·a_{i+1}` for every interior `i`.
///
/// The verdict is annotated when the sequence has internal zeros, which this
/// inequality alone does not exclude.
pub fn check_slc(seq: &[Rational]) -> Verdict {
    let mut tally = Tally::default();
    for i in 1..seq.len().saturating_sub(1) {
        let lhs = int(i) * &seq[i] * &seq[i];
        let rhs = int(i + 1) * &seq[i - 1] * &seq[i + 1];
        if tally.record(Some(lhs >= rhs), || {
            json!({"i": i, "lhs": rational::format(&lhs), "rhs": rational::format(&rhs)})
        }) {
            break;
        }
    }
    let v = tally.finish("slc");
    if has_internal_zeros(seq) {
        v.note("has internal zeros")
    } else {
        v
    }
}

/// No internal zeros and `r_i / C(n,i)` log-concave, where `n` is the ambient size.
pub fn check_ulc(seq: &[Rational], n: usize) -> Verdict {
    if seq.len() > n + 1 {
        return Verdict::inconclusive(
            "ulc",
            format!("sequence of length {} exceeds ambient n + 1 = {}", seq.len(), n + 1),
        );
    }
    if has_internal_zeros(seq) {
        let first = seq.iter().position(|x| !x.is_zero()).unwrap();
        let zero = first + seq[first..].iter().position(Zero::is_zero).unwrap();
        return Verdict::violated("ulc", json!({"internal_zero_at": zero})).with_counts(1, 0);
    }
    let mut tally = Tally::default();
    for i in 1..seq.len().saturating_sub(1) {
        let c = |k: usize| rational::binomial_rat(n, k);
        // (r_i/C_i)^2 >= (r_{i-1}/C_{i-1})(r_{i+1}/C_{i+1}), cross-multiplied.
        let lhs = &seq[i] * &seq[i] * c(i - 1) * c(i + 1);
        let rhs = &seq[i - 1] * &seq[i + 1] * c(i) * c(i);
        if tally.record(Some(lhs >= rhs), || {
            json!({"i": i, "lhs": rational::format(&lhs), "rhs": rational::format(&rhs)})
        }) {
            break;
        }
    }
    tally.finish("ulc")
}

/// Plain log-concavity `a_i² >= a_{i-1}a_{i+1}`.
pub fn is_log_concave(seq: &[Rational]) -> bool {
    (1..seq.len().saturating_sub(1)).all(|i| &seq[i] * &seq[i] >= &seq[i - 1] * &seq[i + 1])
}

fn int(i: usize) -> Rational {
    Rational::from_integer(BigInt::from(i))
}

/// Joint law of `X ~ Bin(Z, α)` and `Y = Z - X` for `Z ~ ν`.
pub fn binomial_split(nu: &[Rational], alpha: &Rational) -> Result<JointXYLaw> {
    if alpha.is_negative() || *alpha > Rational::one() {
        return Err(Error::invalid(format!(
            "alpha {} outside [0,1]",
            rational::format(alpha)
        )));
    }
    if nu.iter().any(|p| p.is_negative()) {
        return Err(Error::invalid("negative mass in nu"));
    }
    if nu.iter().all(Zero::is_zero) {
        return Err(Error::ZeroWeight);
    }
    let len = nu.len();
    let beta = Rational::one() - alpha;
    let mut table = vec![vec![Rational::zero(); len]; len];
    for (z, p) in nu.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        for k in 0..=z {
            let w = p * rational::binomial_rat(z, k) * pow(alpha, k) * pow(&beta, z - k);
            table[k][z - k] = w;
        }
    }
    Ok(JointXYLaw::from_weights(table, vec![], vec![]))
}

fn pow(x: &Rational, e: usize) -> Rational {
    num_traits::pow(x.clone(), e)
}

/// At every `α`: `X ↓ Y` through all threshold pairs and the ratio-table
/// inequality for `μ_k(l) = Pr(Y = l | X = k)`.
pub fn check_bna_grid(nu: &[Rational], alphas: &[Rational]) -> Result<Verdict> {
    let mut parts = Vec::new();
    for alpha in alphas {
        let law = binomial_split(nu, alpha)?;
        for mut v in [law.check_negative_dependence(), law.check_ratio_table()] {
            if let Some(w) = v.witness.as_mut() {
                w["alpha"] = json!(rational::format(alpha));
            }
            parts.push(v);
        }
    }
    Ok(Verdict::aggregate("bna_grid", parts))
}

/// Default grid of splitting probabilities used by callers that do not supply one.
pub fn default_alpha_grid() -> Vec<Rational> {
    let mut out = vec![Rational::zero(), Rational::one()];
    for den in 2..=6i64 {
        for num in 1..den {
            let a = rational::rat(num, den);
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int as i, rat};

    #[test]
    fn poisson_prefix_is_slc_with_equality() {
        let seq = [i(1), i(1), rat(1, 2), rat(1, 6)];
        let v = check_slc(&seq);
        assert!(v.is_holds());
        for k in 1..3 {
            let lhs = Rational::from_integer(k.into()) * &seq[k as usize] * &seq[k as usize];
            let rhs = Rational::from_integer((k + 1).into()) * &seq[k as usize - 1] * &seq[k as usize + 1];
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn flat_sequence_fails_slc() {
        let v = check_slc(&[i(1), i(1), i(1)]);
        assert!(v.is_violated());
        assert_eq!(v.witness.unwrap()["i"], 1);
    }

    #[test]
    fn slc_does_not_see_internal_zeros() {
        let v = check_slc(&[i(1), i(0), i(0), i(1)]);
        assert!(v.is_holds());
        assert_eq!(v.notes, vec!["has internal zeros".to_string()]);
    }

    #[test]
    fn ulc_examples() {
        assert!(check_ulc(&[rat(1, 4), rat(1, 2), rat(1, 4)], 2).is_holds());
        assert!(check_ulc(&[rat(1, 2), i(0), rat(1, 2)], 2).is_violated());
        assert!(check_ulc(&[i(0), i(3), i(3), i(1)], 3).is_holds());
        assert!(check_ulc(&[i(1), i(4), i(2)], 2).is_holds());
        assert!(check_ulc(&[i(1), i(1), i(1), i(1)], 2).is_inconclusive());
    }

    #[test]
    fn point_mass_split_is_bna() {
        let nu = [i(0), i(0), i(1)];
        let law = binomial_split(&nu, &rat(1, 2)).unwrap();
        assert_eq!(law.prob(1, 1), rat(1, 2));
        assert_eq!(law.prob(2, 0), rat(1, 4));
        assert!(check_bna_grid(&nu, &[rat(1, 2)]).unwrap().is_holds());
    }

    #[test]
    fn flat_law_breaks_ratio_table() {
        let nu = [rat(1, 3), rat(1, 3), rat(1, 3)];
        let law = binomial_split(&nu, &rat(1, 2)).unwrap();
        let v = law.check_ratio_table();
        assert!(v.is_violated());
        let w = v.witness.unwrap();
        assert_eq!((w["k"].as_u64(), w["l"].as_u64()), (Some(0), Some(0)));
        // Cross-multiplied form: ν(2)C(2,1)ν(0)C(0,0) = 2 > ν(1)²C(1,1)C(1,0) = 1 (times 1/9).
        let lhs = &nu[2] * i(2) * &nu[0];
        let rhs = &nu[1] * &nu[1];
        assert!(lhs > rhs);
    }

    #[test]
    fn degenerate_alpha() {
        let nu = [rat(1, 3), rat(1, 3), rat(1, 3)];
        assert!(check_bna_grid(&nu, &[i(0), i(1)]).unwrap().is_holds());
        assert!(binomial_split(&nu, &rat(3, 2)).is_err());
    }
}

//! Antipodal pairs: `α_i(μ) = C(m,i)^{-1} Σ_{|A|=i} μ(A)μ(Ā)`.

use serde_json::json;

use super::finite::{all_fixings, describe_fixing, FiniteMeasure};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::verdict::{Tally, Verdict};

pub fn alpha_sequence(mu: &FiniteMeasure) -> Result<Vec<Rational>> {
    if !mu.space().is_binary() {
        return Err(Error::invalid("antipodal pairs need a measure on {0,1}^m"));
    }
    let m = mu.dims();
    let n = mu.space().num_points();
    let mut sums = vec![Rational::from_integer(0.into()); m + 1];
    for idx in 0..n {
        // Complement of an index in the binary cube is the bitwise complement.
        let comp = (n - 1) ^ idx;
        let rank = (idx as u64).count_ones() as usize;
        sums[rank] += &mu.masses()[idx] * &mu.masses()[comp];
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .map(|(i, s)| s / rational::binomial_rat(m, i))
        .collect())
}

/// `α_k >= α_{k-1}` for a measure on `{0,1}^{2k}`.
pub fn check_app(mu: &FiniteMeasure) -> Result<Verdict> {
    let m = mu.dims();
    if m % 2 == 1 {
        return Err(Error::invalid(format!("antipodal pairs property needs even m, got {m}")));
    }
    if m == 0 {
        return Ok(Verdict::holds("app"));
    }
    let alpha = alpha_sequence(mu)?;
    let k = m / 2;
    let ok = alpha[k] >= alpha[k - 1];
    let mut t = Tally::default();
    t.record(Some(ok), || {
        json!({"k": k, "alpha_k": rational::format(&alpha[k]),
               "alpha_k_minus_1": rational::format(&alpha[k - 1])})
    });
    Ok(t.finish("app"))
}

/// APP for every measure obtained by fixing `m - 2k` coordinates, `k >= 1`.
/// Zero-probability fixings are skipped and counted.
pub fn check_capp(mu: &FiniteMeasure) -> Result<Verdict> {
    if !mu.space().is_binary() {
        return Err(Error::invalid("CAPP needs a measure on {0,1}^m"));
    }
    let mut out = Verdict::holds("capp");
    for fixing in all_fixings(mu.space()) {
        let free = fixing.iter().filter(|f| f.is_none()).count();
        if free == 0 || free % 2 == 1 {
            continue;
        }
        let Ok(cond) = mu.condition(&fixing) else {
            out.skipped += 1;
            continue;
        };
        let mut v = check_app(&cond)?;
        if let Some(w) = v.witness.as_mut() {
            w["fixing"] = json!(describe_fixing(&fixing));
        }
        out.absorb(v);
        if out.is_violated() {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::space::ChainProductSpace;
    use crate::rational::{int, rat};

    fn two(w: [i64; 4]) -> FiniteMeasure {
        FiniteMeasure::from_weights(ChainProductSpace::binary(2), w.iter().map(|&x| int(x)).collect())
            .unwrap()
    }

    #[test]
    fn uniform_square_has_app_with_equality() {
        let a = alpha_sequence(&two([1, 1, 1, 1])).unwrap();
        assert_eq!(a[0], rat(1, 16));
        assert_eq!(a[1], rat(1, 16));
        assert!(check_app(&two([1, 1, 1, 1])).unwrap().is_holds());
    }

    #[test]
    fn diagonal_fails_antidiagonal_holds() {
        let diag = two([1, 0, 0, 1]);
        let a = alpha_sequence(&diag).unwrap();
        assert_eq!((a[0].clone(), a[1].clone()), (rat(1, 4), int(0)));
        assert!(check_app(&diag).unwrap().is_violated());
        let anti = two([0, 1, 1, 0]);
        let a = alpha_sequence(&anti).unwrap();
        assert_eq!((a[0].clone(), a[1].clone()), (int(0), rat(1, 4)));
        assert!(check_app(&anti).unwrap().is_holds());
    }

    #[test]
    fn odd_dimension_is_an_error() {
        let mu = FiniteMeasure::uniform(ChainProductSpace::binary(3));
        assert!(check_app(&mu).is_err());
        // CAPP still works: it only looks at even-size conditionals.
        assert!(check_capp(&mu).unwrap().is_holds());
    }
}

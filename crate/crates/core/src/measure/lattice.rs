//! Lattice conditions and order-convexity for finitely supported functions on `ℕ^d`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde_json::json;

use super::space::leq;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::verdict::{Tally, Verdict};

/// A finitely supported nonnegative function on `ℕ^d`; absent points are zero.
pub type LatticeFn = BTreeMap<Vec<usize>, Rational>;

/// Which way the lattice inequality points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlcDirection {
    /// `f(a)f(c) >= f(a∨c)f(a∧c)`.
    Negative,
    /// `f(a∨c)f(a∧c) >= f(a)f(c)`.
    Positive,
}

fn value(f: &LatticeFn, x: &[usize]) -> Rational {
    f.get(x).cloned().unwrap_or_else(Rational::zero)
}

fn support(f: &LatticeFn) -> Result<Vec<&Vec<usize>>> {
    let pts: Vec<&Vec<usize>> = f
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, _)| k)
        .collect();
    if let Some(d) = pts.first().map(|p| p.len()) {
        if pts.iter().any(|p| p.len() != d) {
            return Err(Error::dim("lattice function points have mixed dimensions"));
        }
    }
    Ok(pts)
}

/// Checks the lattice inequality over every pair that can make it fail.
///
/// For the negative direction the right side vanishes unless `a∧c` and `a∨c`
/// are both in the support, so pairs are generated from comparable support
/// pairs `u <= v` and every split of the coordinates where they differ. For the
/// positive direction the right side vanishes unless `a` and `c` are both in
/// the support.
pub fn check_nlc(f: &LatticeFn, direction: NlcDirection) -> Result<Verdict> {
    let pts = support(f)?;
    let mut tally = Tally::default();
    match direction {
        NlcDirection::Negative => {
            for (ui, u) in pts.iter().enumerate() {
                for v in pts.iter().skip(ui) {
                    if !leq(u, v) {
                        continue;
                    }
                    let diff: Vec<usize> = (0..u.len()).filter(|&i| u[i] != v[i]).collect();
                    if diff.len() < 2 {
                        continue;
                    }
                    let top = f[*u].clone() * &f[*v];
                    // Fix the first differing coordinate on `a`'s side to halve the splits.
                    for mask in 0u64..(1u64 << (diff.len() - 1)) {
                        let mut a = (*u).clone();
                        let mut c = (*u).clone();
                        a[diff[0]] = v[diff[0]];
                        for (bit, &i) in diff.iter().skip(1).enumerate() {
                            if mask >> bit & 1 == 1 {
                                a[i] = v[i];
                            } else {
                                c[i] = v[i];
                            }
                        }
                        let lhs = value(f, &a) * value(f, &c);
                        if tally.record(Some(lhs >= top), || {
                            json!({"a": a, "c": c, "meet": u, "join": v,
                                   "lhs": rational::format(&lhs), "rhs": rational::format(&top)})
                        }) {
                            return Ok(tally.finish("nlc"));
                        }
                    }
                }
            }
        }
        NlcDirection::Positive => {
            for (ai, a) in pts.iter().enumerate() {
                for c in pts.iter().skip(ai + 1) {
                    if leq(a, c) || leq(c, a) {
                        continue;
                    }
                    let join: Vec<usize> = a.iter().zip(c.iter()).map(|(x, y)| *x.max(y)).collect();
                    let meet: Vec<usize> = a.iter().zip(c.iter()).map(|(x, y)| *x.min(y)).collect();
                    let lhs = value(f, &join) * value(f, &meet);
                    let rhs = f[*a].clone() * &f[*c];
                    if tally.record(Some(lhs >= rhs), || {
                        json!({"a": a, "c": c, "meet": meet, "join": join,
                               "lhs": rational::format(&lhs), "rhs": rational::format(&rhs)})
                    }) {
                        return Ok(tally.finish("plc"));
                    }
                }
            }
            return Ok(tally.finish("plc"));
        }
    }
    Ok(tally.finish("nlc"))
}

/// `a <= b <= c` with `a, c` in the support forces `b` into the support.
///
/// Equivalently the support contains every point of its bounding box that is
/// both above some support point and below some support point.
pub fn check_support_convex(f: &LatticeFn) -> Result<Verdict> {
    let pts = support(f)?;
    let Some(first) = pts.first() else {
        return Ok(Verdict::holds("support_convex"));
    };
    let d = first.len();
    let lo: Vec<usize> = (0..d).map(|i| pts.iter().map(|p| p[i]).min().unwrap()).collect();
    let hi: Vec<usize> = (0..d).map(|i| pts.iter().map(|p| p[i]).max().unwrap()).collect();
    let mut tally = Tally::default();
    let mut b = lo.clone();
    loop {
        let inside = f.get(&b).is_some_and(|v| !v.is_zero());
        if !inside {
            let below = pts.iter().find(|a| leq(a, &b));
            let above = pts.iter().find(|c| leq(&b, c));
            let ok = below.is_none() || above.is_none();
            if tally.record(Some(ok), || json!({"a": below, "b": b, "c": above})) {
                break;
            }
        }
        // Advance `b` through the box in lexicographic order.
        let mut i = d;
        loop {
            if i == 0 {
                return Ok(tally.finish("support_convex"));
            }
            i -= 1;
            if b[i] < hi[i] {
                b[i] += 1;
                break;
            }
            b[i] = lo[i];
        }
    }
    Ok(tally.finish("support_convex"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn from_pairs(pairs: &[(&[usize], Rational)]) -> LatticeFn {
        pairs.iter().map(|(k, v)| (k.to_vec(), v.clone())).collect()
    }

    #[test]
    fn constant_function_equality() {
        let mut f = LatticeFn::new();
        for x in 0..3 {
            for y in 0..3 {
                f.insert(vec![x, y], int(1));
            }
        }
        let v = check_nlc(&f, NlcDirection::Negative).unwrap();
        assert!(v.is_holds());
        assert!(v.checked > 0);
        assert!(check_nlc(&f, NlcDirection::Positive).unwrap().is_holds());
        assert!(check_support_convex(&f).unwrap().is_holds());
    }

    #[test]
    fn gap_breaks_convexity() {
        let f = from_pairs(&[(&[0], int(1)), (&[2], int(1))]);
        let v = check_support_convex(&f).unwrap();
        assert!(v.is_violated());
        assert_eq!(v.witness.unwrap()["b"], json!([1]));
    }

    #[test]
    fn antidiagonal_support_is_convex() {
        let f = from_pairs(&[(&[2, 0], rat(1, 4)), (&[1, 1], rat(1, 2)), (&[0, 2], rat(1, 4))]);
        assert!(check_support_convex(&f).unwrap().is_holds());
        assert!(check_nlc(&f, NlcDirection::Negative).unwrap().is_holds());
    }

    #[test]
    fn diagonal_mass_fails_negative_condition() {
        // f(11)f(00) > f(10)f(01) = 0.
        let f = from_pairs(&[(&[0, 0], int(1)), (&[1, 1], int(1))]);
        let v = check_nlc(&f, NlcDirection::Negative).unwrap();
        assert!(v.is_violated());
        assert!(check_nlc(&f, NlcDirection::Positive).unwrap().is_holds());
    }

    #[test]
    fn directions_are_mirror_images() {
        let f = from_pairs(&[(&[1, 0], int(1)), (&[0, 1], int(1))]);
        assert!(check_nlc(&f, NlcDirection::Negative).unwrap().is_holds());
        assert!(check_nlc(&f, NlcDirection::Positive).unwrap().is_violated());
    }
}

//! Negative correlation and negative association checkers (plain and conditional).

use std::ops::{AddAssign, Mul};

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use super::events::{enumerate_upsets, MonotoneEvent};
use super::finite::{all_fixings, describe_fixing, FiniteMeasure};
use super::space::ChainProductSpace;
use crate::rational::{self, Rational};
use crate::verdict::{Tally, Verdict};

/// Limits for exhaustive increasing-event enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct NaCaps {
    /// Largest sub-poset (number of points) allowed on either side of a pair.
    /// The default admits four binary or three ternary coordinates.
    pub max_side_points: usize,
    /// Largest number of up-sets enumerated for one side.
    pub max_events_per_side: usize,
}

impl Default for NaCaps {
    fn default() -> Self {
        NaCaps {
            max_side_points: 27,
            max_events_per_side: 20_000,
        }
    }
}

trait Weight: Clone + Zero + Ord + for<'a> AddAssign<&'a Self> + Mul<Output = Self> {}
impl Weight for u128 {}
impl Weight for BigUint {}

/// `{X_i >= s} ↓ {X_j >= t}` for every pair of coordinates and thresholds.
pub fn check_nc(mu: &FiniteMeasure) -> Verdict {
    nc_inner(mu, None).finish("nc")
}

/// NC for every positive-probability partial fixing.
pub fn check_cnc(mu: &FiniteMeasure) -> Verdict {
    let mut total = Tally::default();
    for fixing in all_fixings(mu.space()) {
        let free = fixing.iter().filter(|f| f.is_none()).count();
        if free < 2 {
            continue;
        }
        let Ok(cond) = mu.condition(&fixing) else {
            continue;
        };
        let t = nc_inner(&cond, Some(&fixing));
        total.checked += t.checked;
        total.skipped += t.skipped;
        if t.witness.is_some() {
            total.witness = t.witness;
            break;
        }
    }
    total.finish("cnc")
}

fn nc_inner(mu: &FiniteMeasure, fixing: Option<&[Option<usize>]>) -> Tally {
    let mut tally = Tally::default();
    let d = mu.dims();
    let free: Vec<usize> = match fixing {
        Some(f) => (0..f.len()).filter(|&i| f[i].is_none()).collect(),
        None => (0..d).collect(),
    };
    let sizes = mu.space().sizes();
    for i in 0..d {
        for j in i + 1..d {
            let pair = mu.marginal(&[i, j]).expect("coordinates in range");
            for s in 1..sizes[i] {
                for t in 1..sizes[j] {
                    let pi = pair.prob_of(|x| x[0] >= s);
                    let pj = pair.prob_of(|x| x[1] >= t);
                    let pij = pair.prob_of(|x| x[0] >= s && x[1] >= t);
                    let ok = pij <= &pi * &pj;
                    if tally.record(Some(ok), || {
                        json!({
                            "i": free[i], "j": free[j], "s": s, "t": t,
                            "fixing": fixing.map(describe_fixing),
                            "joint": rational::format(&pij),
                            "product": rational::format(&(&pi * &pj)),
                        })
                    }) {
                        return tally;
                    }
                }
            }
        }
    }
    tally
}

/// NA by exhaustive enumeration of increasing events on disjoint coordinate sets.
///
/// When some pair of coordinate sets falls outside the caps the verdict is
/// inconclusive unless a violation is found among the pairs that fit.
pub fn check_na(mu: &FiniteMeasure, caps: &NaCaps) -> Verdict {
    let (tally, complete) = na_inner(mu, caps, None);
    finish_na("na", tally, complete, caps)
}

/// NA for every positive-probability partial fixing.
pub fn check_cna(mu: &FiniteMeasure, caps: &NaCaps) -> Verdict {
    let mut total = Tally::default();
    let mut complete = true;
    for fixing in all_fixings(mu.space()) {
        let free = fixing.iter().filter(|f| f.is_none()).count();
        if free < 2 {
            continue;
        }
        let Ok(cond) = mu.condition(&fixing) else {
            continue;
        };
        let (t, c) = na_inner(&cond, caps, Some(&fixing));
        complete &= c;
        total.checked += t.checked;
        total.skipped += t.skipped;
        if t.witness.is_some() {
            total.witness = t.witness;
            break;
        }
    }
    finish_na("cna", total, complete, caps)
}

fn finish_na(property: &str, tally: Tally, complete: bool, caps: &NaCaps) -> Verdict {
    if tally.failed() || complete {
        tally.finish(property)
    } else {
        let (checked, skipped) = (tally.checked, tally.skipped);
        Verdict::inconclusive(
            property,
            format!(
                "no violation among events within caps (side <= {} points); larger events not enumerated",
                caps.max_side_points
            ),
        )
        .with_counts(checked, skipped)
    }
}

fn side_points(sizes: &[usize], mask: u32) -> usize {
    sizes
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, s)| *s)
        .product()
}

/// Pairs `(I, J)` of disjoint coordinate sets that fit the caps and cannot be
/// enlarged; every pair of events with disjoint affecting sets inside the caps
/// is determined by one of them. Also reports whether the list is exhaustive.
fn maximal_pairs(sizes: &[usize], caps: &NaCaps) -> (Vec<(u32, u32)>, bool) {
    let d = sizes.len();
    let full: u32 = (1u32 << d) - 1;
    let fits = |m: u32| side_points(sizes, m) <= caps.max_side_points;
    let complete = (0..d).all(|c| fits(full & !(1 << c)));
    let mut out = Vec::new();
    for i_mask in 1..=full {
        if !fits(i_mask) {
            continue;
        }
        let rest = full & !i_mask;
        let mut j_mask = rest;
        while j_mask != 0 {
            if fits(j_mask) && i_mask.trailing_zeros() < j_mask.trailing_zeros() {
                let spare = full & !(i_mask | j_mask);
                let extendable = (0..d).any(|c| {
                    spare >> c & 1 == 1 && (fits(i_mask | 1 << c) || fits(j_mask | 1 << c))
                });
                if !extendable {
                    out.push((i_mask, j_mask));
                }
            }
            j_mask = (j_mask - 1) & rest;
        }
    }
    (out, complete)
}

fn coords_of(mask: u32, d: usize) -> Vec<usize> {
    (0..d).filter(|c| mask >> c & 1 == 1).collect()
}

fn na_inner(mu: &FiniteMeasure, caps: &NaCaps, fixing: Option<&[Option<usize>]>) -> (Tally, bool) {
    let d = mu.dims();
    let mut tally = Tally::default();
    if d < 2 {
        return (tally, true);
    }
    if d > 24 {
        return (tally, false);
    }
    let (pairs, complete) = maximal_pairs(mu.space().sizes(), caps);
    let mut complete = complete;
    let (weights, total) = mu.int_weights();
    let small = total.bits() <= 63;
    let free: Vec<usize> = match fixing {
        Some(f) => (0..f.len()).filter(|&i| f[i].is_none()).collect(),
        None => (0..d).collect(),
    };
    for (im, jm) in pairs {
        let ic = coords_of(im, d);
        let jc = coords_of(jm, d);
        let si = mu.space().project(&ic);
        let sj = mu.space().project(&jc);
        let (Ok(ups_i), Ok(ups_j)) = (
            enumerate_upsets(&si, caps.max_events_per_side),
            enumerate_upsets(&sj, caps.max_events_per_side),
        ) else {
            complete = false;
            continue;
        };
        // Joint table over (x_I, x_J).
        let (ni, nj) = (si.num_points(), sj.num_points());
        let mut table = vec![BigUint::zero(); ni * nj];
        for (idx, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let x = mu.space().outcome(idx);
            let xi: Vec<usize> = ic.iter().map(|&c| x[c]).collect();
            let xj: Vec<usize> = jc.iter().map(|&c| x[c]).collect();
            table[si.index(&xi) * nj + sj.index(&xj)] += w;
        }
        let ctx = PairCtx {
            si: &si,
            sj: &sj,
            ic: &ic,
            jc: &jc,
            free: &free,
            fixing,
        };
        let found = if small {
            let t: Vec<u128> = table.iter().map(|w| w.to_u128().unwrap()).collect();
            pair_check(&t, total.to_u128().unwrap(), &ups_i, &ups_j, &ctx, &mut tally)
        } else {
            pair_check(&table, total.clone(), &ups_i, &ups_j, &ctx, &mut tally)
        };
        if found {
            return (tally, complete);
        }
    }
    (tally, complete)
}

struct PairCtx<'a> {
    si: &'a ChainProductSpace,
    sj: &'a ChainProductSpace,
    ic: &'a [usize],
    jc: &'a [usize],
    free: &'a [usize],
    fixing: Option<&'a [Option<usize>]>,
}

fn pair_check<T: Weight + Into<BigUintLike>>(
    table: &[T],
    total: T,
    ups_i: &[u64],
    ups_j: &[u64],
    ctx: &PairCtx<'_>,
    tally: &mut Tally,
) -> bool {
    let (ni, nj) = (ctx.si.num_points(), ctx.sj.num_points());
    let full_i = if ni == 64 { u64::MAX } else { (1u64 << ni) - 1 };
    let full_j = if nj == 64 { u64::MAX } else { (1u64 << nj) - 1 };
    // Probability of each B (scaled by total).
    let pr_b: Vec<T> = ups_j
        .iter()
        .map(|&b| {
            let mut s = T::zero();
            for y in 0..nj {
                if b >> y & 1 == 1 {
                    for x in 0..ni {
                        s += &table[x * nj + y];
                    }
                }
            }
            s
        })
        .collect();
    for &a in ups_i {
        if a == 0 || a == full_i {
            continue;
        }
        let mut col = vec![T::zero(); nj];
        let mut pr_a = T::zero();
        for x in 0..ni {
            if a >> x & 1 == 1 {
                for y in 0..nj {
                    col[y] += &table[x * nj + y];
                    pr_a += &table[x * nj + y];
                }
            }
        }
        for (bi, &b) in ups_j.iter().enumerate() {
            if b == 0 || b == full_j {
                continue;
            }
            let mut pr_ab = T::zero();
            for (y, c) in col.iter().enumerate() {
                if b >> y & 1 == 1 {
                    pr_ab += c;
                }
            }
            let ok = pr_ab.clone() * total.clone() <= pr_a.clone() * pr_b[bi].clone();
            let failed = tally.record(Some(ok), || {
                let ea = MonotoneEvent::from_mask(ctx.si, a);
                let eb = MonotoneEvent::from_mask(ctx.sj, b);
                let tot: BigUintLike = total.clone().into();
                let p = |v: &T| -> String {
                    let v: BigUintLike = v.clone().into();
                    rational::format(&rational::ratio(&v.0, &tot.0))
                };
                json!({
                    "I": ctx.ic.iter().map(|&c| ctx.free[c]).collect::<Vec<_>>(),
                    "J": ctx.jc.iter().map(|&c| ctx.free[c]).collect::<Vec<_>>(),
                    "A_minimal": ea.generators(),
                    "B_minimal": eb.generators(),
                    "fixing": ctx.fixing.map(describe_fixing),
                    "pr_ab": p(&pr_ab),
                    "pr_a": p(&pr_a),
                    "pr_b": p(&pr_b[bi]),
                })
            });
            if failed {
                return true;
            }
        }
    }
    false
}

struct BigUintLike(BigUint);

impl From<u128> for BigUintLike {
    fn from(v: u128) -> Self {
        BigUintLike(BigUint::from(v))
    }
}

impl From<BigUint> for BigUintLike {
    fn from(v: BigUint) -> Self {
        BigUintLike(v)
    }
}

/// Covariance-style quantity `Pr(A∩B) - Pr(A)Pr(B)` for two events given as
/// predicates; exposed for reports and tests.
pub fn event_covariance(
    mu: &FiniteMeasure,
    a: impl Fn(&[usize]) -> bool,
    b: impl Fn(&[usize]) -> bool,
) -> Rational {
    let pa = mu.prob_of(&a);
    let pb = mu.prob_of(&b);
    let pab = mu.prob_of(|x| a(x) && b(x));
    pab - pa * pb
}

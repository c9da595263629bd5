use serde_json::json;

use super::count::NTable;
use super::graph::Multigraph;
use crate::error::{Error, Result};
use crate::verdict::{Tally, Verdict};

/// Largest number of quadruples [`verify_glemma_exhaustive`] will visit.
pub const MAX_QUADRUPLES: u128 = 100_000_000;

/// Walks the product of per-vertex option lists, summing `K` table offsets.
/// `visit` gets the summed offsets and the chosen option per vertex and returns
/// `false` to stop the walk.
fn walk<const K: usize>(opts: &[Vec<[usize; K]>], visit: &mut impl FnMut(&[usize; K], &[usize]) -> bool) {
    fn rec<const K: usize>(
        opts: &[Vec<[usize; K]>],
        level: usize,
        base: [usize; K],
        choice: &mut Vec<usize>,
        visit: &mut impl FnMut(&[usize; K], &[usize]) -> bool,
    ) -> bool {
        if level == opts.len() {
            return visit(&base, choice);
        }
        for (i, o) in opts[level].iter().enumerate() {
            let mut next = base;
            for k in 0..K {
                next[k] += o[k];
            }
            choice[level] = i;
            if !rec(opts, level + 1, next, choice, visit) {
                return false;
            }
        }
        true
    }
    let mut choice = vec![0; opts.len()];
    rec(opts, 0, [0; K], &mut choice, visit);
}

/// `N(a, b) <= N(r, s)` whenever `a >= r`, `a >= s` and `a + b >= r + s`.
///
/// Demands outside the degree box make the left side zero, so only boxed
/// vectors matter. For fixed `(a, r, s)` the admissible `b` are those with
/// `b >= (r + s - a)⁺`, and `N` is nonincreasing in `b`, so only that least `b`
/// is compared. The monotonicity in `b` the reduction relies on is checked on
/// the same table, so a pass covers every admissible quadruple.
pub fn verify_glemma(g: &Multigraph) -> Result<Verdict> {
    let table = NTable::new(g)?;
    let deg = g.degrees();
    let mut tally = Tally::default();

    // Monotonicity in b, one coordinate step at a time.
    let steps: Vec<Vec<[usize; 2]>> = (0..deg.len())
        .map(|x| {
            let d = deg[x];
            let mut v = Vec::new();
            for a in 0..=d {
                for b in 0..=d {
                    v.push([table.offset(x, a, b), table.offset(x, a, b)]);
                }
            }
            v
        })
        .collect();
    'mono: for x in 0..deg.len() {
        for a in 0..=deg[x] {
            for b in 0..deg[x] {
                let mut opts = steps.clone();
                opts[x] = vec![[table.offset(x, a, b + 1), table.offset(x, a, b)]];
                let mut failed = false;
                walk(&opts, &mut |off, choice| {
                    let (hi, lo) = (table.at(off[0]), table.at(off[1]));
                    failed = tally.record(Some(hi <= lo), || {
                        let (av, bv) = decode_pairs(&deg, &opts, choice, x, a, b);
                        json!({"kind": "monotone_b", "vertex": x, "a": av, "b": bv,
                               "n_ab": lo.to_string(), "n_ab_plus": hi.to_string()})
                    });
                    !failed
                });
                if failed {
                    break 'mono;
                }
            }
        }
    }
    if tally.failed() {
        return Ok(tally.finish("glemma"));
    }

    // (r_x, s_x, a_x) with a_x >= max(r_x, s_x); b_x = (r_x + s_x - a_x)⁺.
    let triples: Vec<Vec<(usize, usize, usize)>> = deg
        .iter()
        .map(|&d| {
            let mut v = Vec::new();
            for r in 0..=d {
                for s in 0..=d {
                    for a in r.max(s)..=d {
                        v.push((r, s, a));
                    }
                }
            }
            v
        })
        .collect();
    let opts: Vec<Vec<[usize; 2]>> = triples
        .iter()
        .enumerate()
        .map(|(x, list)| {
            list.iter()
                .map(|&(r, s, a)| [table.offset(x, a, (r + s).saturating_sub(a)), table.offset(x, r, s)])
                .collect()
        })
        .collect();
    walk(&opts, &mut |off, choice| {
        let (lhs, rhs) = (table.at(off[0]), table.at(off[1]));
        !tally.record(Some(lhs <= rhs), || {
            let pick = |f: fn(&(usize, usize, usize)) -> usize| -> Vec<usize> {
                choice.iter().enumerate().map(|(x, &i)| f(&triples[x][i])).collect()
            };
            let (r, s, a) = (pick(|t| t.0), pick(|t| t.1), pick(|t| t.2));
            let b: Vec<usize> = (0..a.len()).map(|x| (r[x] + s[x]).saturating_sub(a[x])).collect();
            json!({"a": a, "b": b, "r": r, "s": s, "n_ab": lhs.to_string(), "n_rs": rhs.to_string()})
        })
    });
    Ok(tally
        .finish("glemma")
        .note("b reduced to (r + s - a)+ per (a, r, s); monotonicity in b checked"))
}

/// Recovers the `(a, b)` vectors of a monotonicity comparison from the walk state.
fn decode_pairs(
    deg: &[usize],
    opts: &[Vec<[usize; 2]>],
    choice: &[usize],
    x: usize,
    a: usize,
    b: usize,
) -> (Vec<usize>, Vec<usize>) {
    let mut av = Vec::with_capacity(deg.len());
    let mut bv = Vec::with_capacity(deg.len());
    for y in 0..deg.len() {
        if y == x {
            av.push(a);
            bv.push(b);
        } else {
            debug_assert_eq!(opts[y].len(), (deg[y] + 1) * (deg[y] + 1));
            av.push(choice[y] / (deg[y] + 1));
            bv.push(choice[y] % (deg[y] + 1));
        }
    }
    (av, bv)
}

/// Every boxed quadruple `(a, b, r, s)` satisfying the hypotheses, with no
/// reduction. Meant for small graphs and for cross-checking [`verify_glemma`].
pub fn verify_glemma_exhaustive(g: &Multigraph) -> Result<Verdict> {
    let table = NTable::new(g)?;
    let deg = g.degrees();
    let count: u128 = deg.iter().map(|&d| ((d + 1) as u128).pow(4)).product();
    if count > MAX_QUADRUPLES {
        return Err(Error::cap("demand quadruples", count, MAX_QUADRUPLES));
    }
    let quads: Vec<Vec<[usize; 4]>> = deg
        .iter()
        .map(|&d| {
            let mut v = Vec::new();
            for a in 0..=d {
                for b in 0..=d {
                    for r in 0..=a {
                        for s in 0..=a {
                            v.push([a, b, r, s]);
                        }
                    }
                }
            }
            v
        })
        .collect();
    let opts: Vec<Vec<[usize; 2]>> = quads
        .iter()
        .enumerate()
        .map(|(x, list)| {
            list.iter()
                .map(|q| [table.offset(x, q[0], q[1]), table.offset(x, q[2], q[3])])
                .collect()
        })
        .collect();
    let mut tally = Tally::default();
    walk(&opts, &mut |off, choice| {
        let q: Vec<[usize; 4]> = choice.iter().enumerate().map(|(x, &i)| quads[x][i]).collect();
        // a + b >= r + s is a componentwise condition.
        if q.iter().any(|v| v[0] + v[1] < v[2] + v[3]) {
            return true;
        }
        let (lhs, rhs) = (table.at(off[0]), table.at(off[1]));
        !tally.record(Some(lhs <= rhs), || {
            let col = |k: usize| q.iter().map(|v| v[k]).collect::<Vec<_>>();
            json!({"a": col(0), "b": col(1), "r": col(2), "s": col(3),
                   "n_ab": lhs.to_string(), "n_rs": rhs.to_string()})
        })
    });
    Ok(tally.finish("glemma"))
}

/// `N(a, b)·N(r, s) >= N(a∨r, b∧s)·N(a∧r, b∨s)` whenever `a + b = r + s`.
///
/// Boxed vectors suffice: if some coordinate of `a` or `b` exceeds the degree
/// then both sides vanish.
pub fn verify_gphcor(g: &Multigraph) -> Result<Verdict> {
    let table = NTable::new(g)?;
    let deg = g.degrees();
    let quads: Vec<Vec<[usize; 4]>> = deg
        .iter()
        .map(|&d| {
            let mut v = Vec::new();
            for a in 0..=d {
                for b in 0..=d {
                    for r in 0..=d {
                        if a + b >= r && a + b - r <= d {
                            v.push([a, b, r, a + b - r]);
                        }
                    }
                }
            }
            v
        })
        .collect();
    let opts: Vec<Vec<[usize; 4]>> = quads
        .iter()
        .enumerate()
        .map(|(x, list)| {
            list.iter()
                .map(|&[a, b, r, s]| {
                    [
                        table.offset(x, a, b),
                        table.offset(x, r, s),
                        table.offset(x, a.max(r), b.min(s)),
                        table.offset(x, a.min(r), b.max(s)),
                    ]
                })
                .collect()
        })
        .collect();
    let mut tally = Tally::default();
    walk(&opts, &mut |off, choice| {
        let lhs = table.at(off[0]) as u128 * table.at(off[1]) as u128;
        let rhs = table.at(off[2]) as u128 * table.at(off[3]) as u128;
        !tally.record(Some(lhs >= rhs), || {
            let q: Vec<[usize; 4]> = choice.iter().enumerate().map(|(x, &i)| quads[x][i]).collect();
            let col = |k: usize| q.iter().map(|v| v[k]).collect::<Vec<_>>();
            json!({"a": col(0), "b": col(1), "r": col(2), "s": col(3),
                   "lhs": lhs.to_string(), "rhs": rhs.to_string()})
        })
    });
    Ok(tally.finish("gphcor"))
}

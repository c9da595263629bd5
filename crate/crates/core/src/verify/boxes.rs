use num_bigint::BigUint;
use num_traits::Zero;

use crate::error::Result;
use crate::urn::{occupancy_table, OccupancySpec, UrnModel};

/// Dense table in mixed radix (first coordinate most significant). Every
/// boxed coordinate of size `s` is replaced by the pair `(lo, hi)` at
/// `lo * s + hi`, holding the sum over `lo <= x <= hi` (zero when `lo > hi`).
#[derive(Debug, Clone)]
pub(crate) struct BoxTable {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<BigUint>,
}

impl BoxTable {
    pub fn new(mut values: Vec<BigUint>, sizes: &[usize], boxed: &[bool]) -> Self {
        let mut cur: Vec<usize> = sizes.to_vec();
        for x in 0..sizes.len() {
            if !boxed[x] {
                continue;
            }
            let s = sizes[x];
            let inner: usize = cur[x + 1..].iter().product();
            let outer: usize = cur[..x].iter().product();
            let mut next = vec![BigUint::zero(); outer * s * s * inner];
            let mut prefix = vec![BigUint::zero(); s + 1];
            for hi in 0..outer {
                for lo in 0..inner {
                    for o in 0..s {
                        prefix[o + 1] = &prefix[o] + &values[(hi * s + o) * inner + lo];
                    }
                    for a in 0..s {
                        for b in a..s {
                            next[(hi * s * s + a * s + b) * inner + lo] = &prefix[b + 1] - &prefix[a];
                        }
                    }
                }
            }
            cur[x] = s * s;
            values = next;
        }
        let mut strides = vec![1; cur.len()];
        for x in (0..cur.len().saturating_sub(1)).rev() {
            strides[x] = strides[x + 1] * cur[x + 1];
        }
        BoxTable {
            sizes: sizes.to_vec(),
            strides,
            values,
        }
    }

    /// Index contribution of boxed coordinate `x` with interval `[lo, hi]`.
    pub fn boxed(&self, x: usize, lo: usize, hi: usize) -> usize {
        (lo * self.sizes[x] + hi) * self.strides[x]
    }

    /// Index contribution of plain coordinate `x` at value `v`.
    pub fn plain(&self, x: usize, v: usize) -> usize {
        v * self.strides[x]
    }

    pub fn at(&self, index: usize) -> &BigUint {
        &self.values[index]
    }
}

/// Unnormalized per-urn occupancy weights on `{0..m}^n`, summing to the
/// product of the scaled row totals.
pub(crate) fn full_table(model: &UrnModel) -> Result<(Vec<usize>, Vec<BigUint>)> {
    let table = occupancy_table(model, &OccupancySpec::per_urn(model))?;
    Ok((table.space().sizes().to_vec(), table.weights().to_vec()))
}

/// All intervals `lo <= hi` in `0..size`, in lexicographic order.
pub(crate) fn intervals(size: usize) -> Vec<(usize, usize)> {
    (0..size).flat_map(|lo| (lo..size).map(move |hi| (lo, hi))).collect()
}

/// Calls `visit` with one choice from each list, odometer order (last fastest).
pub(crate) fn product<T: Copy>(lists: &[Vec<T>], mut visit: impl FnMut(&[T])) {
    if lists.iter().any(Vec::is_empty) {
        return;
    }
    let mut idx = vec![0usize; lists.len()];
    let mut cur: Vec<T> = lists.iter().map(|l| l[0]).collect();
    loop {
        visit(&cur);
        let Some(k) = (0..lists.len()).rev().find(|&k| idx[k] + 1 < lists[k].len()) else {
            return;
        };
        idx[k] += 1;
        cur[k] = lists[k][idx[k]];
        for j in k + 1..lists.len() {
            idx[j] = 0;
            cur[j] = lists[j][0];
        }
    }
}

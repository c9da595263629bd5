use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::boxes::{full_table, intervals, product, BoxTable};
use crate::error::{Error, Result};
use crate::measure::{check_slc, check_ulc};
use crate::rational::{self, Rational};
use crate::urn::{conditional_xy_law, ConditioningEvent, JointXYLaw, UrnModel, Windows};
use crate::verdict::Verdict;

/// Which form of the conditional `(X, Y)` inequality to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MuklVariant {
    /// `μ_{k+1}(l+1) μ_k(l) <= μ_k(l+1) μ_{k+1}(l)`.
    Prime,
    /// The law of `Z = X + Y` is SLC.
    DoublePrime,
    /// The law of `Z` is ULC with ambient size `m`.
    TriplePrime,
}

impl MuklVariant {
    pub const ALL: [MuklVariant; 3] = [MuklVariant::Prime, MuklVariant::DoublePrime, MuklVariant::TriplePrime];

    pub fn name(self) -> &'static str {
        match self {
            MuklVariant::Prime => "mukl_prime",
            MuklVariant::DoublePrime => "mukl_double_prime",
            MuklVariant::TriplePrime => "mukl_triple_prime",
        }
    }
}

impl fmt::Display for MuklVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MuklVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().replace('-', "_").as_str() {
            "prime" | "mukl_prime" => Ok(MuklVariant::Prime),
            "double_prime" | "mukl_double_prime" => Ok(MuklVariant::DoublePrime),
            "triple_prime" | "mukl_triple_prime" => Ok(MuklVariant::TriplePrime),
            other => Err(Error::Parse(format!("unknown variant {other:?}"))),
        }
    }
}

/// Runs one variant on an already computed law; `m` is the number of balls.
pub fn mukl_verdict(law: &JointXYLaw, m: usize, variant: MuklVariant) -> Verdict {
    // `Z <= m`, so the tail of the law past `m` is zero.
    let z = || {
        let mut z = law.z_law();
        z.truncate(m + 1);
        z
    };
    let mut v = match variant {
        MuklVariant::Prime => law.check_ratio_table(),
        MuklVariant::DoublePrime => check_slc(&z()),
        MuklVariant::TriplePrime => check_ulc(&z(), m),
    };
    v.property = variant.name().into();
    v
}

/// Checks `variant` on the law of `(|σ⁻¹(I)|, |σ⁻¹(J)|)` given `Q`; `I`, `J`
/// and the urns of `Q` must partition the urns.
pub fn verify_mukl(
    model: &UrnModel,
    q: &ConditioningEvent,
    i: &[usize],
    j: &[usize],
    variant: MuklVariant,
) -> Result<Verdict> {
    let law = conditional_xy_law(model, q, i, j)?;
    Ok(mukl_verdict(&law, model.m(), variant))
}

/// One `(I, J, Q)` instance of the sweep with the verdict of each variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuklInstance {
    pub i: Vec<usize>,
    pub j: Vec<usize>,
    pub windows: Windows,
    pub prime: Verdict,
    pub double_prime: Verdict,
    pub triple_prime: Verdict,
}

impl MuklInstance {
    pub fn verdict(&self, variant: MuklVariant) -> &Verdict {
        match variant {
            MuklVariant::Prime => &self.prime,
            MuklVariant::DoublePrime => &self.double_prime,
            MuklVariant::TriplePrime => &self.triple_prime,
        }
    }
}

/// Every instance with nonempty `I` and `J`, the remaining urns as `K`, and
/// every window vector on `K` of positive probability. Also returns the
/// number of zero-probability window vectors that were passed over.
pub fn mukl_instances(model: &UrnModel) -> Result<(Vec<MuklInstance>, u64)> {
    let (n, m) = (model.n(), model.m());
    let s = m + 1;
    let (sizes, values) = full_table(model)?;
    let nonzero: Vec<(Vec<usize>, &BigUint)> = values
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_zero())
        .map(|(idx, w)| (decode(idx, &sizes), w))
        .collect();
    let mut out = Vec::new();
    let mut empty = 0u64;
    for code in 0..3usize.pow(n as u32) {
        let labels: Vec<usize> = (0..n).map(|u| code / 3usize.pow(u as u32) % 3).collect();
        let part = |l: usize| -> Vec<usize> { (0..n).filter(|&u| labels[u] == l).collect() };
        let (i, j, k) = (part(0), part(1), part(2));
        if i.is_empty() || j.is_empty() {
            continue;
        }
        // Reduced table over (X, Y, B_k for k in K), then boxed on K.
        let dims = vec![s; 2 + k.len()];
        let mut reduced = vec![BigUint::zero(); s.pow(dims.len() as u32)];
        for (x, w) in &nonzero {
            let mut idx = i.iter().map(|&u| x[u]).sum::<usize>();
            idx = idx * s + j.iter().map(|&u| x[u]).sum::<usize>();
            for &u in &k {
                idx = idx * s + x[u];
            }
            reduced[idx] += *w;
        }
        let mut boxed = vec![true; dims.len()];
        boxed[0] = false;
        boxed[1] = false;
        let table = BoxTable::new(reduced, &dims, &boxed);
        product(&vec![intervals(s); k.len()], |w| {
            let base: usize = w.iter().enumerate().map(|(t, &(lo, hi))| table.boxed(2 + t, lo, hi)).sum();
            let grid: Vec<Vec<BigUint>> = (0..s)
                .map(|x| (0..s).map(|y| table.at(base + table.plain(0, x) + table.plain(1, y)).clone()).collect())
                .collect();
            if grid.iter().flatten().all(Zero::is_zero) {
                empty += 1;
                return;
            }
            let windows: Windows = k.iter().copied().zip(w.iter().copied()).collect();
            out.push(judge(grid, i.clone(), j.clone(), windows, m));
        });
    }
    Ok((out, empty))
}

fn decode(mut idx: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for (slot, &s) in out.iter_mut().zip(sizes).rev() {
        *slot = idx % s;
        idx /= s;
    }
    out
}

/// Integer fast path; a failing variant is rerun on the normalized law so
/// its witness carries probabilities.
fn judge(grid: Vec<Vec<BigUint>>, i: Vec<usize>, j: Vec<usize>, windows: Windows, m: usize) -> MuklInstance {
    let s = grid.len();
    let mut checked = 0;
    let mut skipped = 0;
    let mut prime_ok = true;
    'outer: for k in 0..s.saturating_sub(1) {
        for l in 0..s - 1 {
            match rational::ratio_le(&grid[k + 1][l + 1], &grid[k + 1][l], &grid[k][l + 1], &grid[k][l]) {
                None => skipped += 1,
                Some(ok) => {
                    checked += 1;
                    if !ok {
                        prime_ok = false;
                        break 'outer;
                    }
                }
            }
        }
    }
    let mut z = vec![BigUint::zero(); s];
    for (x, row) in grid.iter().enumerate() {
        for (y, w) in row.iter().enumerate() {
            if !w.is_zero() {
                z[x + y] += w;
            }
        }
    }
    let z: Vec<Rational> = z.into_iter().map(|w| Rational::from_integer(BigInt::from(w))).collect();
    let mut double = check_slc(&z);
    let mut triple = check_ulc(&z, m);
    let law = || {
        let weights = grid.iter().map(|r| r.iter().map(rational::from_biguint).collect()).collect();
        JointXYLaw::from_weights(weights, i.clone(), j.clone())
    };
    let prime = if prime_ok {
        Verdict::holds(MuklVariant::Prime.name()).with_counts(checked, skipped)
    } else {
        mukl_verdict(&law(), m, MuklVariant::Prime)
    };
    if double.is_violated() {
        double = mukl_verdict(&law(), m, MuklVariant::DoublePrime);
    }
    if triple.is_violated() {
        triple = mukl_verdict(&law(), m, MuklVariant::TriplePrime);
    }
    double.property = MuklVariant::DoublePrime.name().into();
    triple.property = MuklVariant::TriplePrime.name().into();
    MuklInstance {
        i,
        j,
        windows,
        prime,
        double_prime: double,
        triple_prime: triple,
    }
}

/// Aggregate of one variant over every instance of [`mukl_instances`].
pub fn verify_mukl_all(model: &UrnModel, variant: MuklVariant) -> Result<Verdict> {
    let (instances, _) = mukl_instances(model)?;
    Ok(Verdict::aggregate(
        variant.name(),
        instances.into_iter().map(|inst| inst.verdict(variant).clone()),
    ))
}

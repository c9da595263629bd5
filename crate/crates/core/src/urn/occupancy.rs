//! Ball-at-a-time dynamic programming over capped occupancy counts.
//!
//! Weights stay unnormalized integers (each row of `γ` scaled to integers) and
//! are divided by the total once at the end.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::model::UrnModel;
use crate::error::{Error, Result};
use crate::measure::{ChainProductSpace, FiniteMeasure};
use crate::rational::{self, Rational};

/// Largest dense DP table allowed unless a caller asks for more.
pub const DEFAULT_MAX_STATES: usize = 2_000_000;

/// Occupancy windows `B_j ∈ [lo, hi]` keyed by urn.
pub type Windows = BTreeMap<usize, (usize, usize)>;

/// Tracked statistics: block `b` counts the balls landing in `blocks[b]`,
/// exactly up to `caps[b]`; larger counts are collapsed into the state `caps[b]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancySpec {
    pub blocks: Vec<Vec<usize>>,
    pub caps: Vec<usize>,
}

impl OccupancySpec {
    pub fn new(blocks: Vec<Vec<usize>>, caps: Vec<usize>) -> Result<Self> {
        if blocks.len() != caps.len() {
            return Err(Error::dim("one cap per block is required"));
        }
        if blocks.len() > 32 {
            return Err(Error::cap("tracked blocks", blocks.len() as u128, 32));
        }
        Ok(OccupancySpec { blocks, caps })
    }

    /// Every urn tracked exactly.
    pub fn per_urn(model: &UrnModel) -> Self {
        OccupancySpec {
            blocks: (0..model.n()).map(|j| vec![j]).collect(),
            caps: vec![model.m(); model.n()],
        }
    }

    /// Urn-set counts `|σ⁻¹(I)|`, tracked exactly.
    pub fn blocks_exact(model: &UrnModel, blocks: Vec<Vec<usize>>) -> Self {
        let caps = vec![model.m(); blocks.len()];
        OccupancySpec { blocks, caps }
    }
}

/// Unnormalized joint law of the tracked statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccupancyTable {
    space: ChainProductSpace,
    weights: Vec<BigUint>,
    total: BigUint,
}

impl OccupancyTable {
    pub fn space(&self) -> &ChainProductSpace {
        &self.space
    }

    pub fn weights(&self) -> &[BigUint] {
        &self.weights
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn weight_where(&self, mut pred: impl FnMut(&[usize]) -> bool) -> BigUint {
        let mut s = BigUint::zero();
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_zero() && pred(&self.space.outcome(i)) {
                s += w;
            }
        }
        s
    }

    pub fn prob_where(&self, pred: impl FnMut(&[usize]) -> bool) -> Rational {
        rational::ratio(&self.weight_where(pred), &self.total)
    }

    pub fn to_measure(&self) -> Result<FiniteMeasure> {
        FiniteMeasure::from_int_weights(self.space.clone(), &self.weights)
    }
}

fn check_urns(model: &UrnModel, urns: impl IntoIterator<Item = usize>) -> Result<()> {
    for j in urns {
        if j >= model.n() {
            return Err(Error::dim(format!("urn {j} out of range (n = {})", model.n())));
        }
    }
    Ok(())
}

/// Core DP over the balls in `balls`, which may only use urns with `allowed[u]`.
/// Returns the state space and the unnormalized weights; their sum is the
/// product over `balls` of the allowed part of each scaled row.
pub(crate) fn run_dp(
    model: &UrnModel,
    balls: &[usize],
    allowed: &[bool],
    spec: &OccupancySpec,
    max_states: usize,
) -> Result<(ChainProductSpace, Vec<BigUint>)> {
    check_urns(model, spec.blocks.iter().flatten().copied())?;
    let dims: Vec<usize> = spec.caps.iter().map(|c| c + 1).collect();
    let states = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d).filter(|&s| s <= max_states))
        .ok_or_else(|| {
            let needed = dims.iter().fold(1u128, |acc, &d| acc.saturating_mul(d as u128));
            Error::cap("occupancy DP states", needed, max_states as u128)
        })?;
    let space = ChainProductSpace::new(dims.clone())?;

    // Urns grouped by the set of blocks they feed.
    let mut sig_of: Vec<u32> = vec![0; model.n()];
    for (b, block) in spec.blocks.iter().enumerate() {
        for &u in block {
            sig_of[u] |= 1 << b;
        }
    }
    let mut sigs: Vec<u32> = Vec::new();
    for u in 0..model.n() {
        if allowed[u] && !sigs.contains(&sig_of[u]) {
            sigs.push(sig_of[u]);
        }
    }
    // Strides of the mixed-radix index (first block most significant).
    let mut stride = vec![1usize; dims.len()];
    for b in (0..dims.len().saturating_sub(1)).rev() {
        stride[b] = stride[b + 1] * dims[b + 1];
    }
    let next: Vec<Vec<usize>> = sigs
        .iter()
        .map(|&sig| {
            (0..states)
                .map(|s| {
                    let mut t = s;
                    for b in 0..dims.len() {
                        if sig >> b & 1 == 1 {
                            let v = (s / stride[b]) % dims[b];
                            if v < spec.caps[b] {
                                t += stride[b];
                            }
                        }
                    }
                    t
                })
                .collect()
        })
        .collect();

    let mut cur = vec![BigUint::zero(); states];
    cur[0] = BigUint::from(1u32);
    for &i in balls {
        let row = model.scaled_row(i);
        let w: Vec<BigUint> = sigs
            .iter()
            .map(|&sig| {
                (0..model.n())
                    .filter(|&u| allowed[u] && sig_of[u] == sig)
                    .map(|u| &row[u])
                    .sum()
            })
            .collect();
        let mut nxt = vec![BigUint::zero(); states];
        for (s, ws) in cur.iter().enumerate() {
            if ws.is_zero() {
                continue;
            }
            for (k, wk) in w.iter().enumerate() {
                if !wk.is_zero() {
                    nxt[next[k][s]] += ws * wk;
                }
            }
        }
        cur = nxt;
    }
    Ok((space, cur))
}

pub fn occupancy_table(model: &UrnModel, spec: &OccupancySpec) -> Result<OccupancyTable> {
    occupancy_table_capped(model, spec, DEFAULT_MAX_STATES)
}

pub fn occupancy_table_capped(
    model: &UrnModel,
    spec: &OccupancySpec,
    max_states: usize,
) -> Result<OccupancyTable> {
    let balls: Vec<usize> = (0..model.m()).collect();
    let allowed = vec![true; model.n()];
    let (space, weights) = run_dp(model, &balls, &allowed, spec, max_states)?;
    Ok(OccupancyTable {
        space,
        weights,
        total: model.total_weight(),
    })
}

/// Exact joint law of the tracked statistics.
pub fn occupancy_law(model: &UrnModel, spec: &OccupancySpec) -> Result<FiniteMeasure> {
    occupancy_table(model, spec)?.to_measure()
}

/// Smallest cap that still decides `lo <= B <= hi` when `B <= m`.
pub(crate) fn window_cap(hi: usize, m: usize) -> usize {
    hi.saturating_add(1).min(m)
}

fn window_spec(model: &UrnModel, windows: &Windows, extra: Option<usize>) -> OccupancySpec {
    let mut blocks: Vec<Vec<usize>> = windows.keys().map(|&j| vec![j]).collect();
    let mut caps: Vec<usize> = windows.values().map(|&(_, hi)| window_cap(hi, model.m())).collect();
    if let Some(u) = extra {
        blocks.push(vec![u]);
        caps.push(model.m());
    }
    OccupancySpec { blocks, caps }
}

fn in_windows(windows: &Windows, x: &[usize]) -> bool {
    windows.values().zip(x).all(|(&(lo, hi), &v)| lo <= v && v <= hi)
}

/// Joint probability `Pr(B_j ∈ [lo_j, hi_j] ∀ j)`; may be zero.
pub fn window_prob(model: &UrnModel, windows: &Windows) -> Result<Rational> {
    check_urns(model, windows.keys().copied())?;
    let table = occupancy_table(model, &window_spec(model, windows, None))?;
    Ok(table.prob_where(|x| in_windows(windows, x)))
}

/// Joint law of `B_u` with the window event: entry `k` is `Pr(B_u = k, windows)`.
pub fn window_joint_sequence(model: &UrnModel, u: usize, windows: &Windows) -> Result<Vec<Rational>> {
    check_urns(model, windows.keys().copied().chain([u]))?;
    if windows.contains_key(&u) {
        return Err(Error::invalid(format!("urn {u} is both tracked and windowed")));
    }
    let table = occupancy_table(model, &window_spec(model, windows, Some(u)))?;
    let last = windows.len();
    Ok((0..=model.m())
        .map(|k| table.prob_where(|x| x[last] == k && in_windows(windows, &x[..last])))
        .collect())
}

fn last_urn_windows(model: &UrnModel, a: &[usize], b: &[usize]) -> Result<Windows> {
    let n = model.n();
    if a.len() != n - 1 || b.len() != n - 1 {
        return Err(Error::dim(format!(
            "window vectors need {} entries, got {} and {}",
            n - 1,
            a.len(),
            b.len()
        )));
    }
    Ok((0..n - 1).map(|j| (j, (a[j], b[j]))).collect())
}

/// `p(k, a, b) = Pr(B_last = k | B_j ∈ [a_j, b_j] for every other urn)` for
/// `k = 0..=m`, where `last` is the final urn.
pub fn p_window_sequence(model: &UrnModel, a: &[usize], b: &[usize]) -> Result<Vec<Rational>> {
    let windows = last_urn_windows(model, a, b)?;
    let joint = window_joint_sequence(model, model.n() - 1, &windows)?;
    let total: Rational = joint.iter().sum();
    if total.is_zero() {
        return Err(Error::zero_prob(format!("windows a = {a:?}, b = {b:?}")));
    }
    Ok(joint.into_iter().map(|p| p / &total).collect())
}

pub fn p_window(model: &UrnModel, k: usize, a: &[usize], b: &[usize]) -> Result<Rational> {
    let seq = p_window_sequence(model, a, b)?;
    Ok(seq.get(k).cloned().unwrap_or_else(Rational::zero))
}

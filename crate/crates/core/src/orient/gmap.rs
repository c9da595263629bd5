use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::graph::Multigraph;
use crate::error::{Error, Result};
use crate::measure::check_ulc;
use crate::rational::Rational;
use crate::verdict::Verdict;

/// Largest number of candidate maps [`count_gmaps`] will enumerate.
pub const MAX_GMAP_CANDIDATES: u128 = 10_000_000;

/// Largest vertex count for matching counts.
pub const MAX_MATCHING_VERTICES: usize = 24;

/// Bipartite graph between `left` domain vertices and `right` targets, with a
/// window `lower_j <= |f⁻¹(j)| <= upper_j` on every target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteSystem {
    left: usize,
    right: usize,
    edges: Vec<(usize, usize)>,
    lower: Vec<usize>,
    upper: Vec<usize>,
}

impl BipartiteSystem {
    pub fn new(left: usize, right: usize, edges: Vec<(usize, usize)>, lower: Vec<usize>, upper: Vec<usize>) -> Result<Self> {
        if let Some(&(v, j)) = edges.iter().find(|&&(v, j)| v >= left || j >= right) {
            return Err(Error::dim(format!("edge ({v}, {j}) outside {left} x {right}")));
        }
        if lower.len() != right || upper.len() != right {
            return Err(Error::dim(format!("bounds need {right} entries")));
        }
        if let Some(j) = (0..right).find(|&j| lower[j] > upper[j]) {
            return Err(Error::invalid(format!("target {j} has lower bound above upper bound")));
        }
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        Ok(BipartiteSystem {
            left,
            right,
            edges,
            lower,
            upper,
        })
    }

    pub fn left(&self) -> usize {
        self.left
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.left];
        for &(v, j) in &self.edges {
            nb[v].push(j);
        }
        nb
    }

    /// Random system with `1..=max_left` domain vertices and `1..=max_right`
    /// targets; each edge present with probability one half, bounds within degrees.
    pub fn random<R: Rng>(rng: &mut R, max_left: usize, max_right: usize) -> Self {
        let left = rng.gen_range(1..=max_left);
        let right = rng.gen_range(1..=max_right);
        let edges: Vec<(usize, usize)> = (0..left)
            .flat_map(|v| (0..right).map(move |j| (v, j)))
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        let mut deg = vec![0usize; right];
        for &(_, j) in &edges {
            deg[j] += 1;
        }
        let mut lower = Vec::with_capacity(right);
        let mut upper = Vec::with_capacity(right);
        for &d in &deg {
            let lo = rng.gen_range(0..=d);
            lower.push(lo);
            upper.push(rng.gen_range(lo..=d.max(lo)));
        }
        BipartiteSystem::new(left, right, edges, lower, upper).expect("random system is valid")
    }
}

/// `(s_0 … s_|V|)`: valid G-maps by domain size.
pub fn count_gmaps(b: &BipartiteSystem) -> Result<Vec<u64>> {
    let nb = b.neighbours();
    let candidates: u128 = nb.iter().map(|n| n.len() as u128 + 1).product();
    if candidates > MAX_GMAP_CANDIDATES {
        return Err(Error::cap("G-map candidates", candidates, MAX_GMAP_CANDIDATES));
    }
    let mut load = vec![0usize; b.right];
    let mut s = vec![0u64; b.left + 1];
    gmap_rec(b, &nb, 0, 0, &mut load, &mut s);
    Ok(s)
}

fn gmap_rec(b: &BipartiteSystem, nb: &[Vec<usize>], v: usize, size: usize, load: &mut [usize], s: &mut [u64]) {
    if v == b.left {
        if (0..b.right).all(|j| load[j] >= b.lower[j]) {
            s[size] += 1;
        }
        return;
    }
    gmap_rec(b, nb, v + 1, size, load, s);
    for &j in &nb[v] {
        if load[j] < b.upper[j] {
            load[j] += 1;
            gmap_rec(b, nb, v + 1, size + 1, load, s);
            load[j] -= 1;
        }
    }
}

fn as_rationals(seq: &[u64]) -> Vec<Rational> {
    seq.iter().map(|&x| Rational::from_integer(x.into())).collect()
}

/// Ultra-log-concavity of the G-map counts relative to `|V|`.
pub fn verify_gmap_ulc(b: &BipartiteSystem) -> Result<Verdict> {
    let s = count_gmaps(b)?;
    let mut v = check_ulc(&as_rationals(&s), b.left);
    v.property = "gmap_ulc".into();
    Ok(v)
}

/// `(Φ_0 … Φ_ν)`: matchings by size. Loops never lie in a matching; parallel
/// edges are distinct edges.
pub fn count_matchings(g: &Multigraph) -> Result<Vec<u64>> {
    if g.vertices() > MAX_MATCHING_VERTICES {
        return Err(Error::cap(
            "matching vertices",
            g.vertices() as u128,
            MAX_MATCHING_VERTICES as u128,
        ));
    }
    let n = g.vertices();
    let mut mult = vec![vec![0u64; n]; n];
    for &(u, v) in g.edges() {
        if u != v {
            mult[u][v] += 1;
            mult[v][u] += 1;
        }
    }
    let mut memo = HashMap::new();
    let mut phi = matchings_on(&mult, (1u64 << n) - 1, &mut memo);
    while phi.len() > 1 && *phi.last().unwrap() == 0 {
        phi.pop();
    }
    Ok(phi)
}

/// Matching polynomial coefficients of the subgraph induced on `mask`: the
/// least vertex is either unmatched or matched along one of its edges.
fn matchings_on(mult: &[Vec<u64>], mask: u64, memo: &mut HashMap<u64, Vec<u64>>) -> Vec<u64> {
    if mask == 0 {
        return vec![1];
    }
    if let Some(r) = memo.get(&mask) {
        return r.clone();
    }
    let v = mask.trailing_zeros() as usize;
    let rest = mask & !(1 << v);
    let mut out = matchings_on(mult, rest, memo);
    for u in (0..mult.len()).filter(|&u| rest >> u & 1 == 1 && mult[v][u] > 0) {
        let sub = matchings_on(mult, rest & !(1 << u), memo);
        if out.len() < sub.len() + 1 {
            out.resize(sub.len() + 1, 0);
        }
        for (k, c) in sub.iter().enumerate() {
            out[k + 1] += mult[v][u] * c;
        }
    }
    memo.insert(mask, out.clone());
    out
}

/// Ultra-log-concavity of `(Φ_0 … Φ_ν)` relative to `ν`.
pub fn verify_matching_ulc(g: &Multigraph) -> Result<Verdict> {
    let phi = count_matchings(g)?;
    let nu = phi.len() - 1;
    let mut v = check_ulc(&as_rationals(&phi), nu);
    v.property = "matching_ulc".into();
    Ok(v)
}

/// Matchings by size of a simple graph given by adjacency bitmasks, by
/// enumerating them: the least vertex of `mask` is unmatched or matched.
fn simple_matchings(adj: &[u32], mask: u32, size: usize, out: &mut Vec<u64>) {
    if mask == 0 {
        if out.len() <= size {
            out.resize(size + 1, 0);
        }
        out[size] += 1;
        return;
    }
    let v = mask.trailing_zeros();
    let rest = mask & !(1 << v);
    simple_matchings(adj, rest, size, out);
    let mut nb = adj[v as usize] & rest;
    while nb != 0 {
        let u = nb.trailing_zeros();
        nb &= nb - 1;
        simple_matchings(adj, rest & !(1 << u), size + 1, out);
    }
}

/// ULC of `(Φ_0 … Φ_ν)` for every labeled simple graph with exactly
/// `vertices` vertices (smaller graphs appear with isolated vertices, which do
/// not change the matching counts). Graphs are grouped by their count
/// sequence and each distinct sequence is checked once.
pub fn verify_matching_ulc_exhaustive(vertices: usize) -> Result<Verdict> {
    let pairs: Vec<(usize, usize)> = (0..vertices)
        .flat_map(|u| (u + 1..vertices).map(move |v| (u, v)))
        .collect();
    if pairs.len() > 28 {
        return Err(Error::cap("labeled graphs", 1u128 << pairs.len(), 1u128 << 28));
    }
    let total = 1u64 << pairs.len();
    let chunk = 1u64 << 12;
    let full = if vertices == 0 { 0 } else { u32::MAX >> (32 - vertices) };
    let groups: HashMap<Vec<u64>, (u64, u64)> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut local: HashMap<Vec<u64>, (u64, u64)> = HashMap::new();
            for mask in c * chunk..total.min((c + 1) * chunk) {
                let mut adj = vec![0u32; vertices];
                for (k, &(u, v)) in pairs.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        adj[u] |= 1 << v;
                        adj[v] |= 1 << u;
                    }
                }
                let mut phi = Vec::new();
                simple_matchings(&adj, full, 0, &mut phi);
                let e = local.entry(phi).or_insert((0, mask));
                e.0 += 1;
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, (n, m)) in b {
                let e = a.entry(k).or_insert((0, m));
                e.0 += n;
                e.1 = e.1.min(m);
            }
            a
        });
    let mut seqs: Vec<(Vec<u64>, (u64, u64))> = groups.into_iter().collect();
    seqs.sort();
    let mut agg = Verdict::holds("matching_ulc");
    for (phi, (_, example)) in &seqs {
        let nu = phi.len() - 1;
        let mut v = check_ulc(&as_rationals(phi), nu);
        if v.is_violated() {
            let edges: Vec<(usize, usize)> = (0..pairs.len())
                .filter(|&k| example >> k & 1 == 1)
                .map(|k| pairs[k])
                .collect();
            v.witness = Some(serde_json::json!({"phi": phi, "edges": edges, "inner": v.witness}));
        }
        agg.absorb(v);
    }
    agg.property = "matching_ulc".into();
    Ok(agg.note(format!(
        "{total} labeled graphs on {vertices} vertices, {} distinct matching sequences",
        seqs.len()
    )))
}

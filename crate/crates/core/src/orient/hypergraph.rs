use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use rayon::prelude::*;
use serde_json::json;

use super::generate::next_permutation;
use crate::error::{Error, Result};
use crate::verdict::{Tally, Verdict};

/// Largest ground set enumerated subset by subset.
pub const MAX_GROUND: usize = 24;

/// One edge of `H1` with its demand `α_H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DemandEdge {
    pub edge: Vec<usize>,
    pub alpha: usize,
}

/// Ground set `0..size` with pairwise-disjoint demand edges `h1` and
/// pairwise-disjoint 2-edges `h2`. `S` is the set of vertices outside `h2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CoverHypergraph {
    size: usize,
    h1: Vec<DemandEdge>,
    h2: Vec<(usize, usize)>,
}

impl CoverHypergraph {
    pub fn new(size: usize, h1: Vec<DemandEdge>, h2: Vec<(usize, usize)>) -> Result<Self> {
        if size % 2 != 0 {
            return Err(Error::invalid(format!("ground set size {size} is odd")));
        }
        let mut h1_seen = vec![false; size];
        for e in &h1 {
            for &x in &e.edge {
                if x >= size {
                    return Err(Error::dim(format!("vertex {x} outside 0..{size}")));
                }
                if h1_seen[x] {
                    return Err(Error::invalid(format!("vertex {x} lies in two H1 edges")));
                }
                h1_seen[x] = true;
            }
        }
        let mut h2_seen = vec![false; size];
        for &(u, v) in &h2 {
            if u >= size || v >= size {
                return Err(Error::dim(format!("pair ({u}, {v}) outside 0..{size}")));
            }
            if u == v || h2_seen[u] || h2_seen[v] {
                return Err(Error::invalid(format!("pair ({u}, {v}) is not disjoint from the others")));
            }
            h2_seen[u] = true;
            h2_seen[v] = true;
        }
        Ok(CoverHypergraph { size, h1, h2 })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn h1(&self) -> &[DemandEdge] {
        &self.h1
    }

    pub fn h2(&self) -> &[(usize, usize)] {
        &self.h2
    }

    /// `l` with `|W| = 2l`.
    pub fn l(&self) -> usize {
        self.size / 2
    }

    /// `t` with `|S| = 2t`.
    pub fn t(&self) -> usize {
        (self.size - 2 * self.h2.len()) / 2
    }

    fn admits(&self, x_mask: u64) -> bool {
        let inx = |v: usize| x_mask >> v & 1 == 1;
        self.h2.iter().all(|&(u, v)| inx(u) != inx(v))
            && self.h1.iter().all(|e| {
                let k = e.edge.iter().filter(|&&v| inx(v)).count();
                k >= e.alpha && e.edge.len() - k >= e.alpha
            })
    }
}

/// `N_i`: partitions `(X, Y)` of the ground set with `|X| = i`, both sides
/// meeting every pair and meeting each demand edge in at least `α_H` vertices.
pub fn count_partitions(h: &CoverHypergraph, i: usize) -> Result<u64> {
    Ok(partition_counts_brute(h)?.get(i).copied().unwrap_or(0))
}

/// All `N_0 … N_{|W|}` by running over every subset `X`.
pub fn partition_counts_brute(h: &CoverHypergraph) -> Result<Vec<u64>> {
    if h.size > MAX_GROUND {
        return Err(Error::cap("ground set subsets", 1u128 << h.size, 1u128 << MAX_GROUND));
    }
    let mut n = vec![0u64; h.size + 1];
    for x in 0u64..1 << h.size {
        if h.admits(x) {
            n[x.count_ones() as usize] += 1;
        }
    }
    Ok(n)
}

/// All `N_0 … N_{|W|}` by choosing the `X` side of each pair and counting the
/// `S` vertices placed in `X` per demand edge with binomial weights.
pub fn partition_counts(h: &CoverHypergraph) -> Result<Vec<u64>> {
    let alpha: Vec<usize> = h.h1.iter().map(|e| e.alpha).collect();
    Ok(PartitionCounter::new(h)?.counts(&alpha))
}

/// The demand-independent part of [`partition_counts`]: for each way of
/// splitting the pairs, how many pair vertices of each demand edge land in `X`
/// and in `Y`, merged by multiplicity.
struct PartitionCounter {
    size: usize,
    pairs: usize,
    s_count: Vec<usize>,
    s_free: usize,
    splits: Vec<(Vec<usize>, Vec<usize>, u64)>,
    binom: Vec<Vec<u64>>,
}

impl PartitionCounter {
    fn new(h: &CoverHypergraph) -> Result<Self> {
        let pairs = h.h2.len();
        if pairs > MAX_GROUND {
            return Err(Error::cap("pair orientations", 1u128 << pairs, 1u128 << MAX_GROUND));
        }
        let mut owner = vec![usize::MAX; h.size];
        for (k, e) in h.h1.iter().enumerate() {
            for &v in &e.edge {
                owner[v] = k;
            }
        }
        let mut in_pair = vec![false; h.size];
        for &(u, v) in &h.h2 {
            in_pair[u] = true;
            in_pair[v] = true;
        }
        let mut s_count = vec![0usize; h.h1.len()];
        let mut s_free = 0;
        for v in (0..h.size).filter(|&v| !in_pair[v]) {
            match owner[v] {
                usize::MAX => s_free += 1,
                k => s_count[k] += 1,
            }
        }
        let mut merged: BTreeMap<(Vec<usize>, Vec<usize>), u64> = BTreeMap::new();
        for choice in 0u64..1 << pairs {
            let mut x_in = vec![0usize; h.h1.len()];
            let mut y_in = vec![0usize; h.h1.len()];
            for (p, &(u, v)) in h.h2.iter().enumerate() {
                let (xv, yv) = if choice >> p & 1 == 0 { (u, v) } else { (v, u) };
                if owner[xv] != usize::MAX {
                    x_in[owner[xv]] += 1;
                }
                if owner[yv] != usize::MAX {
                    y_in[owner[yv]] += 1;
                }
            }
            *merged.entry((x_in, y_in)).or_default() += 1;
        }
        Ok(PartitionCounter {
            size: h.size,
            pairs,
            s_count,
            s_free,
            splits: merged.into_iter().map(|((x, y), c)| (x, y, c)).collect(),
            binom: pascal(h.size),
        })
    }

    fn counts(&self, alpha: &[usize]) -> Vec<u64> {
        let mut n = vec![0u64; self.size + 1];
        let mut poly = vec![0u64; self.size + 1];
        let mut next = vec![0u64; self.size + 1];
        for (x_in, y_in, mult) in &self.splits {
            // Generating polynomial in the number of S vertices placed in X.
            poly.fill(0);
            poly[..=self.s_free].copy_from_slice(&self.binom[self.s_free]);
            let mut deg = self.s_free;
            for (k, &a) in alpha.iter().enumerate() {
                let s = self.s_count[k];
                next[..=deg + s].fill(0);
                for j in 0..=s {
                    if x_in[k] + j < a || y_in[k] + s - j < a {
                        continue;
                    }
                    let c = self.binom[s][j];
                    for (i, &p) in poly[..=deg].iter().enumerate() {
                        next[i + j] += p * c;
                    }
                }
                deg += s;
                std::mem::swap(&mut poly, &mut next);
            }
            for (j, c) in poly[..=deg].iter().enumerate() {
                n[self.pairs + j] += mult * c;
            }
        }
        n
    }
}

fn pascal(n: usize) -> Vec<Vec<u64>> {
    let mut rows: Vec<Vec<u64>> = vec![vec![1]];
    for k in 1..=n {
        let prev = &rows[k - 1];
        let mut row = vec![1u64; k + 1];
        for j in 1..k {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows
}

/// `t·N_l >= (t+1)·N_{l+1}`.
pub fn verify_hyplemma(h: &CoverHypergraph) -> Result<Verdict> {
    let t = h.t();
    if t == 0 {
        return Err(Error::invalid("every vertex is covered by a pair (t = 0)"));
    }
    Ok(judge(h, &partition_counts(h)?))
}

fn judge(h: &CoverHypergraph, n: &[u64]) -> Verdict {
    let (t, l) = (h.t(), h.l());
    let (nl, nl1) = (n[l] as u128, n[l + 1] as u128);
    let mut tally = Tally::default();
    tally.record(Some(t as u128 * nl >= (t as u128 + 1) * nl1), || {
        json!({"l": l, "t": t, "n_l": nl.to_string(), "n_l_plus_1": nl1.to_string()})
    });
    tally.finish("hyplemma")
}

/// Shape of a cover hypergraph up to isomorphism, before demands are chosen.
/// Labels are the demand edges; each pair records the labels of its two ends.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    /// S vertices in each demand edge.
    s: Vec<usize>,
    pairs: Vec<(Option<usize>, Option<usize>)>,
    /// S vertices in no demand edge.
    s_free: usize,
}

type ComponentKey = (Vec<usize>, Vec<(usize, usize)>);

impl Shape {
    fn size(&self) -> usize {
        2 * self.pairs.len() + self.s.iter().sum::<usize>() + self.s_free
    }

    /// Isomorphism-invariant key: labels linked by pairs form components, each
    /// canonicalized by trying every ordering of its labels.
    fn key(&self) -> (Vec<ComponentKey>, usize, usize) {
        let k = self.s.len();
        let mut parent: Vec<usize> = (0..k).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &(a, b) in &self.pairs {
            if let (Some(a), Some(b)) = (a, b) {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..k {
            let r = find(&mut parent, x);
            comps.entry(r).or_default().push(x);
        }
        let free_pairs = self.pairs.iter().filter(|p| p.0.is_none() && p.1.is_none()).count();
        let mut keys: Vec<ComponentKey> = comps
            .values()
            .map(|labels| {
                let mut perm = labels.clone();
                let mut best: Option<ComponentKey> = None;
                loop {
                    let mut pos = BTreeMap::new();
                    for (i, &x) in perm.iter().enumerate() {
                        pos.insert(x, i);
                    }
                    let s: Vec<usize> = perm.iter().map(|&x| self.s[x]).collect();
                    let mut pairs: Vec<(usize, usize)> = self
                        .pairs
                        .iter()
                        .filter_map(|&(a, b)| {
                            let pa = a.and_then(|a| pos.get(&a).copied());
                            let pb = b.and_then(|b| pos.get(&b).copied());
                            match (pa, pb) {
                                (None, None) => None,
                                (Some(x), None) | (None, Some(x)) => Some((x, usize::MAX)),
                                (Some(x), Some(y)) => Some((x.min(y), x.max(y))),
                            }
                        })
                        .collect();
                    pairs.sort_unstable();
                    let cand = (s, pairs);
                    if best.as_ref().map_or(true, |b| cand < *b) {
                        best = Some(cand);
                    }
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
                best.expect("at least one ordering")
            })
            .collect();
        keys.sort_unstable();
        (keys, free_pairs, self.s_free)
    }

    /// Vertices: pair `p` is `(2p, 2p + 1)`, then the S vertices.
    fn realize(&self, alpha: &[usize]) -> CoverHypergraph {
        let mut edges: Vec<Vec<usize>> = vec![Vec::new(); self.s.len()];
        for (p, &(a, b)) in self.pairs.iter().enumerate() {
            if let Some(a) = a {
                edges[a].push(2 * p);
            }
            if let Some(b) = b {
                edges[b].push(2 * p + 1);
            }
        }
        let mut next = 2 * self.pairs.len();
        for (k, &s) in self.s.iter().enumerate() {
            for _ in 0..s {
                edges[k].push(next);
                next += 1;
            }
        }
        let h1 = edges
            .into_iter()
            .zip(alpha)
            .map(|(edge, &alpha)| DemandEdge { edge, alpha })
            .collect();
        let h2 = (0..self.pairs.len()).map(|p| (2 * p, 2 * p + 1)).collect();
        CoverHypergraph::new(self.size(), h1, h2).expect("shapes realize valid hypergraphs")
    }

    fn successors(&self) -> Vec<Shape> {
        let mut out = Vec::new();
        let k = self.s.len();
        for x in 0..k {
            let mut sh = self.clone();
            sh.s[x] += 1;
            out.push(sh);
        }
        let mut sh = self.clone();
        sh.s.push(1);
        out.push(sh);
        let mut sh = self.clone();
        sh.s_free += 1;
        out.push(sh);
        // New pair: each end is an old label, no label, or a new label.
        let mut ends: Vec<Option<usize>> = (0..k).map(Some).collect();
        ends.push(None);
        for (i, &a) in ends.iter().enumerate() {
            for &b in &ends[i..] {
                let mut sh = self.clone();
                sh.pairs.push((a, b));
                out.push(sh);
            }
            let mut sh = self.clone();
            sh.s.push(0);
            sh.pairs.push((a, Some(k)));
            out.push(sh);
        }
        let mut sh = self.clone();
        sh.s.push(0);
        sh.pairs.push((Some(k), Some(k)));
        out.push(sh);
        let mut sh = self.clone();
        sh.s.extend([0, 0]);
        sh.pairs.push((Some(k), Some(k + 1)));
        out.push(sh);
        out
    }
}

/// Every cover hypergraph with `|W| <= max_size` and `t >= 1`, one per
/// isomorphism class, with all demands zero.
///
/// Structures are grown one S vertex or one pair at a time; removing an S
/// vertex or a pair always leaves a smaller structure, so every class is reached.
pub fn cover_structures(max_size: usize) -> Vec<CoverHypergraph> {
    let mut by_size: Vec<BTreeMap<(Vec<ComponentKey>, usize, usize), Shape>> = vec![BTreeMap::new(); max_size + 1];
    let empty = Shape {
        s: vec![],
        pairs: vec![],
        s_free: 0,
    };
    by_size[0].insert(empty.key(), empty);
    for n in 0..max_size {
        let current: Vec<Shape> = by_size[n].values().cloned().collect();
        for sh in current {
            for next in sh.successors() {
                let size = next.size();
                if size <= max_size {
                    by_size[size].entry(next.key()).or_insert(next);
                }
            }
        }
    }
    by_size
        .iter()
        .step_by(2)
        .flat_map(|level| level.values())
        .filter(|sh| sh.s.iter().sum::<usize>() + sh.s_free >= 2)
        .map(|sh| sh.realize(&vec![0; sh.s.len()]))
        .collect()
}

impl CoverHypergraph {
    /// The same edges with demands `alpha`, one per `h1` edge.
    pub fn with_alphas(&self, alpha: &[usize]) -> Result<CoverHypergraph> {
        if alpha.len() != self.h1.len() {
            return Err(Error::dim(format!("{} demands for {} edges", alpha.len(), self.h1.len())));
        }
        let h1 = self
            .h1
            .iter()
            .zip(alpha)
            .map(|(e, &a)| DemandEdge {
                edge: e.edge.clone(),
                alpha: a,
            })
            .collect();
        CoverHypergraph::new(self.size, h1, self.h2.clone())
    }

    /// Every demand vector with `0 <= α_H <= |H|`, in lexicographic order.
    pub fn demand_vectors(&self) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = self.h1.iter().map(|e| e.edge.len()).collect();
        let mut out = Vec::new();
        let mut alpha = vec![0usize; sizes.len()];
        loop {
            out.push(alpha.clone());
            let Some(i) = (0..alpha.len()).rev().find(|&i| alpha[i] < sizes[i]) else {
                break;
            };
            alpha[i] += 1;
            for a in &mut alpha[i + 1..] {
                *a = 0;
            }
        }
        out
    }
}

/// [`verify_hyplemma`] on every structure from [`cover_structures`] with every
/// demand vector bounded by the edge sizes.
pub fn verify_hyplemma_exhaustive(max_size: usize) -> Result<Verdict> {
    let structures = cover_structures(max_size);
    let parts: Vec<Result<Verdict>> = structures
        .par_iter()
        .map(|h| {
            let counter = PartitionCounter::new(h)?;
            let mut agg = Verdict::holds("hyplemma");
            for alpha in h.demand_vectors() {
                let mut v = judge(h, &counter.counts(&alpha));
                if v.is_violated() {
                    let inst = h.with_alphas(&alpha)?;
                    v.witness = Some(json!({"hypergraph": inst, "inner": v.witness}));
                    agg.absorb(v);
                    break;
                }
                agg.absorb(v);
            }
            Ok(agg)
        })
        .collect();
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(Verdict::aggregate("hyplemma", parts).note(format!(
        "{} edge structures with |W| <= {max_size}",
        structures.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn edge(v: &[usize], alpha: usize) -> DemandEdge {
        DemandEdge {
            edge: v.to_vec(),
            alpha,
        }
    }

    #[test]
    fn four_vertex_examples() {
        let h = CoverHypergraph::new(4, vec![edge(&[2, 3], 1)], vec![(0, 1)]).unwrap();
        assert_eq!((h.l(), h.t()), (2, 1));
        assert_eq!(count_partitions(&h, 2).unwrap(), 4);
        assert_eq!(count_partitions(&h, 3).unwrap(), 0);
        assert!(verify_hyplemma(&h).unwrap().is_holds());

        let h = CoverHypergraph::new(4, vec![], vec![(0, 1)]).unwrap();
        assert_eq!(count_partitions(&h, 2).unwrap(), 4);
        assert_eq!(count_partitions(&h, 3).unwrap(), 2);
        assert!(verify_hyplemma(&h).unwrap().is_holds());
    }

    #[test]
    fn validation() {
        assert!(CoverHypergraph::new(3, vec![], vec![]).is_err());
        assert!(CoverHypergraph::new(4, vec![edge(&[0, 1], 1), edge(&[1, 2], 1)], vec![]).is_err());
        assert!(CoverHypergraph::new(4, vec![], vec![(0, 1), (1, 2)]).is_err());
        let covered = CoverHypergraph::new(4, vec![], vec![(0, 1), (2, 3)]).unwrap();
        assert!(verify_hyplemma(&covered).is_err());
    }

    #[test]
    fn fast_counts_match_subset_enumeration() {
        for base in cover_structures(8) {
            for alpha in base.demand_vectors() {
                let h = base.with_alphas(&alpha).unwrap();
                assert_eq!(partition_counts(&h).unwrap(), partition_counts_brute(&h).unwrap(), "{h:?}");
            }
        }
    }

    /// Least form of `h` over all relabelings of its ground set.
    fn brute_canonical(h: &CoverHypergraph) -> (Vec<(usize, usize)>, Vec<Vec<usize>>) {
        let mut perm: Vec<usize> = (0..h.size()).collect();
        let mut best = None;
        loop {
            let mut pairs: Vec<(usize, usize)> = h
                .h2()
                .iter()
                .map(|&(u, v)| (perm[u].min(perm[v]), perm[u].max(perm[v])))
                .collect();
            pairs.sort_unstable();
            let mut edges: Vec<Vec<usize>> = h
                .h1()
                .iter()
                .map(|e| {
                    let mut v: Vec<usize> = e.edge.iter().map(|&x| perm[x]).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            edges.sort_unstable();
            let cand = (pairs, edges);
            if best.as_ref().map_or(true, |b| cand < *b) {
                best = Some(cand);
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        best.expect("at least one relabeling")
    }

    /// Perfect and partial matchings of `0..n` as pair lists.
    fn matchings(free: &[usize]) -> Vec<Vec<(usize, usize)>> {
        let Some((&first, rest)) = free.split_first() else {
            return vec![vec![]];
        };
        let mut out = matchings(rest);
        for (i, &other) in rest.iter().enumerate() {
            let remaining: Vec<usize> = rest.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x).collect();
            for mut m in matchings(&remaining) {
                m.push((first, other));
                out.push(m);
            }
        }
        out
    }

    /// Partial set partitions as block label per vertex (0 = uncovered), in
    /// restricted-growth form.
    fn partial_partitions(n: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut label = vec![0usize; n];
        fn rec(k: usize, used: usize, label: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if k == label.len() {
                out.push(label.clone());
                return;
            }
            for l in 0..=used + 1 {
                label[k] = l;
                rec(k + 1, used.max(l), label, out);
            }
        }
        rec(0, 0, &mut label, &mut out);
        out
    }

    #[test]
    fn structures_match_brute_force_classes() {
        for size in [2, 4, 6] {
            let mut brute = BTreeSet::new();
            let ground: Vec<usize> = (0..size).collect();
            for pairs in matchings(&ground) {
                if 2 * pairs.len() > size - 2 {
                    continue;
                }
                for labels in partial_partitions(size) {
                    let blocks = labels.iter().copied().max().unwrap_or(0);
                    let h1 = (1..=blocks)
                        .map(|b| edge(&(0..size).filter(|&x| labels[x] == b).collect::<Vec<_>>(), 0))
                        .collect();
                    let h = CoverHypergraph::new(size, h1, pairs.clone()).unwrap();
                    brute.insert(brute_canonical(&h));
                }
            }
            let structures: Vec<CoverHypergraph> =
                cover_structures(size).into_iter().filter(|h| h.size() == size).collect();
            let generated: BTreeSet<_> = structures.iter().map(brute_canonical).collect();
            let bare = structures.len();
            assert_eq!(generated, brute, "size {size}");
            assert_eq!(bare, brute.len(), "duplicate structures at size {size}");
        }
    }
}

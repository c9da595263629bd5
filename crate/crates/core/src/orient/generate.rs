use std::collections::BTreeSet;

use super::graph::Multigraph;

/// Canonical representative of the isomorphism class of `g`: the canonical
/// forms of its components in sorted order, laid out one after another. Two
/// graphs are isomorphic iff their representatives are equal.
pub fn canonical(g: &Multigraph) -> Multigraph {
    let comps = g.components();
    if comps.len() == 1 {
        return canonical_connected(g);
    }
    let mut forms: Vec<Multigraph> = comps.iter().map(|c| canonical_connected(&g.induced(c))).collect();
    forms.sort();
    let mut edges = Vec::with_capacity(g.num_edges());
    let mut offset = 0;
    for f in &forms {
        edges.extend(f.edges().iter().map(|&(u, v)| (u + offset, v + offset)));
        offset += f.vertices();
    }
    Multigraph::new(offset, edges).expect("relabeling keeps endpoints in range")
}

/// Vertices are ordered by an isomorphism invariant (degree, loop count,
/// sorted neighbour degrees); the form is the least sorted edge list over all
/// labelings that respect that order.
fn canonical_connected(g: &Multigraph) -> Multigraph {
    let n = g.vertices();
    let deg = g.degrees();
    let loops = g.loops();
    let mut nbr: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(u, v) in g.edges() {
        if u != v {
            nbr[u].push(deg[v]);
            nbr[v].push(deg[u]);
        }
    }
    for l in &mut nbr {
        l.sort_unstable();
    }
    let mut order: Vec<usize> = (0..n).collect();
    let key = |x: usize| (std::cmp::Reverse(deg[x]), std::cmp::Reverse(loops[x]), nbr[x].clone());
    order.sort_by_key(|&x| key(x));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &x in &order {
        match groups.last_mut() {
            Some(gr) if key(gr[0]) == key(x) => gr.push(x),
            _ => groups.push(vec![x]),
        }
    }
    let mut best: Option<Vec<(usize, usize)>> = None;
    let mut pos = vec![0usize; n];
    assign(g, &groups, 0, 0, &mut pos, &mut best);
    Multigraph::new(n, best.unwrap_or_default()).expect("relabeling keeps endpoints in range")
}

/// Tries every ordering of each group in turn; `start` is the first position of group `k`.
fn assign(
    g: &Multigraph,
    groups: &[Vec<usize>],
    k: usize,
    start: usize,
    pos: &mut [usize],
    best: &mut Option<Vec<(usize, usize)>>,
) {
    if k == groups.len() {
        let mut edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .map(|&(u, v)| (pos[u].min(pos[v]), pos[u].max(pos[v])))
            .collect();
        edges.sort_unstable();
        if best.as_ref().map_or(true, |b| edges < *b) {
            *best = Some(edges);
        }
        return;
    }
    let mut perm = groups[k].clone();
    perm.sort_unstable();
    loop {
        for (i, &x) in perm.iter().enumerate() {
            pos[x] = start + i;
        }
        assign(g, groups, k + 1, start + perm.len(), pos, best);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

/// Advances to the next lexicographic permutation; `false` after the last one.
pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).expect("a larger element exists");
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

fn with_edge(g: &Multigraph, vertices: usize, u: usize, v: usize) -> Multigraph {
    let mut edges = g.edges().to_vec();
    edges.push((u, v));
    canonical(&Multigraph::new(vertices, edges).expect("endpoints in range"))
}

/// Connected multigraphs with exactly `edges` edges, one per isomorphism class,
/// in canonical order. Zero edges gives the single vertex.
///
/// Deleting a cycle edge, or a leaf edge together with its leaf, leaves a
/// connected graph, so every class arises from one with an edge fewer by adding
/// an edge between old vertices or a pendant edge to a new vertex.
pub fn connected_multigraphs(edges: usize) -> Vec<Multigraph> {
    let mut level: BTreeSet<Multigraph> = BTreeSet::new();
    level.insert(Multigraph::new(1, vec![]).expect("valid"));
    for _ in 0..edges {
        let mut next = BTreeSet::new();
        for g in &level {
            let n = g.vertices();
            for u in 0..n {
                for v in u..n {
                    next.insert(with_edge(g, n, u, v));
                }
                next.insert(with_edge(g, n + 1, u, n));
            }
        }
        level = next;
    }
    level.into_iter().collect()
}

/// Multigraphs without isolated vertices with exactly `edges` edges, one per
/// isomorphism class. Zero edges gives the empty graph.
pub fn multigraphs(edges: usize) -> Vec<Multigraph> {
    let mut level: BTreeSet<Multigraph> = BTreeSet::new();
    level.insert(Multigraph::new(0, vec![]).expect("valid"));
    for _ in 0..edges {
        let mut next = BTreeSet::new();
        for g in &level {
            let n = g.vertices();
            for u in 0..n {
                for v in u..n {
                    next.insert(with_edge(g, n, u, v));
                }
                next.insert(with_edge(g, n + 1, u, n));
            }
            next.insert(with_edge(g, n + 1, n, n));
            next.insert(with_edge(g, n + 2, n, n + 1));
        }
        level = next;
    }
    level.into_iter().collect()
}

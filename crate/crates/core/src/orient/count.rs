use super::graph::{DegreeDemand, Multigraph};
use crate::error::{Error, Result};

/// Largest edge count for which orientations are enumerated.
pub const MAX_ORIENTATION_EDGES: usize = 24;

/// Largest number of entries in an [`NTable`].
pub const MAX_TABLE_ENTRIES: usize = 1 << 24;

fn check_edges(g: &Multigraph) -> Result<()> {
    if g.num_edges() > MAX_ORIENTATION_EDGES {
        return Err(Error::cap(
            "orientations",
            1u128 << g.num_edges().min(127),
            1u128 << MAX_ORIENTATION_EDGES,
        ));
    }
    Ok(())
}

/// `N_G(a, b)`: orientations with `d⁺(x) >= a_x` and `d⁻(x) >= b_x` for all `x`.
///
/// Each loop contributes one to both degrees of its vertex in either of its
/// two orientations, so loops are factored out up front. The remaining edges
/// are enumerated depth-first, cutting a branch as soon as some vertex cannot
/// meet both of its residual demands with its unassigned edges.
pub fn count_orientations(g: &Multigraph, d: &DegreeDemand) -> Result<u64> {
    if d.a.len() != g.vertices() || d.b.len() != g.vertices() {
        return Err(Error::dim(format!(
            "demand has {} entries, graph has {} vertices",
            d.a.len(),
            g.vertices()
        )));
    }
    check_edges(g)?;
    let loops = g.loops();
    let mut need_out: Vec<usize> = (0..g.vertices()).map(|x| d.a[x].saturating_sub(loops[x])).collect();
    let mut need_in: Vec<usize> = (0..g.vertices()).map(|x| d.b[x].saturating_sub(loops[x])).collect();
    let edges: Vec<(usize, usize)> = g.edges().iter().copied().filter(|(u, v)| u != v).collect();
    let mut rem = vec![0usize; g.vertices()];
    for &(u, v) in &edges {
        rem[u] += 1;
        rem[v] += 1;
    }
    if (0..g.vertices()).any(|x| need_out[x] + need_in[x] > rem[x]) {
        return Ok(0);
    }
    let free = dfs(&edges, 0, &mut need_out, &mut need_in, &mut rem);
    let total_loops: usize = loops.iter().sum();
    Ok(free << total_loops)
}

fn dfs(edges: &[(usize, usize)], k: usize, out: &mut [usize], inn: &mut [usize], rem: &mut [usize]) -> u64 {
    if k == edges.len() {
        return 1;
    }
    let (u, v) = edges[k];
    rem[u] -= 1;
    rem[v] -= 1;
    let mut total = 0;
    // Tail first at `u`, then at `v`.
    for (tail, head) in [(u, v), (v, u)] {
        let (so, si) = (out[tail], inn[head]);
        out[tail] = so.saturating_sub(1);
        inn[head] = si.saturating_sub(1);
        if out[tail] + inn[tail] <= rem[tail] && out[head] + inn[head] <= rem[head] {
            total += dfs(edges, k + 1, out, inn, rem);
        }
        out[tail] = so;
        inn[head] = si;
    }
    rem[u] += 1;
    rem[v] += 1;
    total
}

/// Number of orientations with each out-degree vector, on the box `0..=d_x`.
/// Index is mixed radix with vertex 0 most significant.
pub fn out_degree_distribution(g: &Multigraph) -> Result<Vec<u64>> {
    check_edges(g)?;
    let deg = g.degrees();
    let size = table_size(deg.iter().map(|&d| d + 1))?;
    let strides = strides(&deg.iter().map(|&d| d + 1).collect::<Vec<_>>());
    let loops = g.loops();
    let mut c = vec![0u64; size];
    // Both orientations of a loop give the same out-degree vector.
    c[(0..g.vertices()).map(|x| loops[x] * strides[x]).sum::<usize>()] = 1 << loops.iter().sum::<usize>();
    for &(u, v) in g.edges().iter().filter(|(u, v)| u != v) {
        let mut next = vec![0u64; size];
        for (idx, &w) in c.iter().enumerate() {
            if w != 0 {
                next[idx + strides[u]] += w;
                next[idx + strides[v]] += w;
            }
        }
        c = next;
    }
    Ok(c)
}

fn strides(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for x in (0..sizes.len().saturating_sub(1)).rev() {
        s[x] = s[x + 1] * sizes[x + 1];
    }
    s
}

fn table_size(sizes: impl Iterator<Item = usize>) -> Result<usize> {
    let mut total: u128 = 1;
    for s in sizes {
        total = total.saturating_mul(s as u128);
    }
    if total > MAX_TABLE_ENTRIES as u128 {
        return Err(Error::cap("orientation table entries", total, MAX_TABLE_ENTRIES as u128));
    }
    Ok(total as usize)
}

/// All values `N(a, b)` with `a, b` in the degree box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NTable {
    degrees: Vec<usize>,
    strides: Vec<usize>,
    values: Vec<u64>,
}

impl NTable {
    /// `N(a, b) = Σ_{a <= o <= d - b} c(o)`, one coordinate at a time: coordinate
    /// `x` of the out-degree table is replaced by the pair `(a_x, b_x)` holding
    /// the sum over `a_x <= o_x <= d_x - b_x`.
    pub fn new(g: &Multigraph) -> Result<Self> {
        let deg = g.degrees();
        let pair_sizes: Vec<usize> = deg.iter().map(|&d| (d + 1) * (d + 1)).collect();
        table_size(pair_sizes.iter().copied())?;
        let mut values = out_degree_distribution(g)?;
        let mut sizes: Vec<usize> = deg.iter().map(|&d| d + 1).collect();
        for x in 0..deg.len() {
            let d = deg[x];
            let inner: usize = sizes[x + 1..].iter().product();
            let outer: usize = sizes[..x].iter().product();
            let mut next = vec![0u64; outer * pair_sizes[x] * inner];
            let mut prefix = vec![0u64; d + 2];
            for hi in 0..outer {
                for lo in 0..inner {
                    for o in 0..=d {
                        prefix[o + 1] = prefix[o] + values[(hi * (d + 1) + o) * inner + lo];
                    }
                    for a in 0..=d {
                        for b in 0..=d - a {
                            next[(hi * pair_sizes[x] + a * (d + 1) + b) * inner + lo] =
                                prefix[d - b + 1] - prefix[a];
                        }
                    }
                }
            }
            sizes[x] = pair_sizes[x];
            values = next;
        }
        Ok(NTable {
            strides: strides(&pair_sizes),
            degrees: deg,
            values,
        })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Index contribution of vertex `x` with demands `(a_x, b_x)`, both `<= d_x`.
    pub(crate) fn offset(&self, x: usize, a: usize, b: usize) -> usize {
        (a * (self.degrees[x] + 1) + b) * self.strides[x]
    }

    pub(crate) fn at(&self, index: usize) -> u64 {
        self.values[index]
    }

    /// `N(a, b)`; demands outside the degree box give zero.
    pub fn get(&self, a: &[usize], b: &[usize]) -> u64 {
        let mut idx = 0;
        for x in 0..self.degrees.len() {
            if a[x] > self.degrees[x] || b[x] > self.degrees[x] {
                return 0;
            }
            idx += self.offset(x, a[x], b[x]);
        }
        self.values[idx]
    }
}

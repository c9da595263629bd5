use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A multigraph on vertices `0..vertices`; loops `(x, x)` and repeated edges allowed.
/// Edges are stored with `u <= v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Multigraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Multigraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= vertices || v >= vertices) {
            return Err(Error::dim(format!("edge ({u}, {v}) has an endpoint outside 0..{vertices}")));
        }
        let edges = edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
        Ok(Multigraph { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Degrees with each loop counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.vertices];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn loops(&self) -> Vec<usize> {
        let mut l = vec![0; self.vertices];
        for &(u, v) in &self.edges {
            if u == v {
                l[u] += 1;
            }
        }
        l
    }

    /// Vertex sets of the connected components, each sorted, ordered by least vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut comps: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.vertices];
        for x in 0..self.vertices {
            let r = find(&mut parent, x);
            if slot[r] == usize::MAX {
                slot[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[slot[r]].push(x);
        }
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// The subgraph induced on `vertices`, relabeled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Multigraph {
        let mut pos = vec![usize::MAX; self.vertices];
        for (i, &x) in vertices.iter().enumerate() {
            pos[x] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]))
            .collect();
        Multigraph::new(vertices.len(), edges).expect("relabeled endpoints are in range")
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            vertices: self.vertices,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        }
    }
}

/// JSON form `{"vertices": n, "edges": [[u, v], …]}` with loops as `[x, x]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl GraphFile {
    pub fn graph(&self) -> Result<Multigraph> {
        Multigraph::new(self.vertices, self.edges.iter().map(|e| (e[0], e[1])).collect())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Lower bounds `a` on out-degrees and `b` on in-degrees. Bounds above the
/// degree are legal and make the count zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeDemand {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl DegreeDemand {
    pub fn new(a: Vec<usize>, b: Vec<usize>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::dim(format!("a has {} entries, b has {}", a.len(), b.len())));
        }
        Ok(DegreeDemand { a, b })
    }

    pub fn zero(vertices: usize) -> Self {
        DegreeDemand {
            a: vec![0; vertices],
            b: vec![0; vertices],
        }
    }

    /// Integer demands; entries `<= 0` are vacuous and clamp to zero.
    pub fn clamped(a: &[i64], b: &[i64]) -> Result<Self> {
        let clamp = |v: &[i64]| v.iter().map(|&x| x.max(0) as usize).collect();
        DegreeDemand::new(clamp(a), clamp(b))
    }

    pub fn restrict(&self, vertices: &[usize]) -> DegreeDemand {
        DegreeDemand {
            a: vertices.iter().map(|&x| self.a[x]).collect(),
            b: vertices.iter().map(|&x| self.b[x]).collect(),
        }
    }
}

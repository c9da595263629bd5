//! Increasing events on chain products: exhaustive up-set enumeration and the
//! antichain representation.

use serde::{Deserialize, Serialize};

use super::space::{leq, ChainProductSpace};
use crate::error::{Error, Result};

/// Enumerates every up-set of a (small) chain product as a bitmask over its
/// points, in index order. Fails when the poset has more than 64 points or
/// when more than `max_events` up-sets exist.
pub fn enumerate_upsets(space: &ChainProductSpace, max_events: usize) -> Result<Vec<u64>> {
    let n = space.num_points();
    if n > 64 {
        return Err(Error::cap("up-set enumeration points", n as u128, 64));
    }
    // Points by decreasing rank: every upper cover is decided before the point.
    let mut order: Vec<usize> = (0..n).collect();
    let rank = |i: usize| space.outcome(i).iter().sum::<usize>();
    order.sort_by_key(|&i| std::cmp::Reverse(rank(i)));
    let covers: Vec<u64> = (0..n)
        .map(|i| {
            let x = space.outcome(i);
            let mut mask = 0u64;
            for c in 0..x.len() {
                if x[c] + 1 < space.sizes()[c] {
                    let mut y = x.clone();
                    y[c] += 1;
                    mask |= 1 << space.index(&y);
                }
            }
            mask
        })
        .collect();

    let mut out = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(0, 0)];
    while let Some((pos, set)) = stack.pop() {
        if pos == n {
            out.push(set);
            if out.len() > max_events {
                return Err(Error::cap("increasing events", out.len() as u128, max_events as u128));
            }
            continue;
        }
        let p = order[pos];
        stack.push((pos + 1, set));
        if covers[p] & !set == 0 {
            stack.push((pos + 1, set | (1 << p)));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// An increasing event given by the antichain of its minimal outcomes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonotoneEvent {
    space: ChainProductSpace,
    generators: Vec<Vec<usize>>,
}

impl MonotoneEvent {
    /// Up-closure of the given outcomes; redundant generators are dropped.
    pub fn new(space: ChainProductSpace, generators: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| !space.contains(g)) {
            return Err(Error::dim(format!("generator {g:?} outside space")));
        }
        let mut mins: Vec<Vec<usize>> = Vec::new();
        for g in &generators {
            if generators.iter().any(|h| h != g && leq(h, g)) {
                continue;
            }
            if !mins.contains(g) {
                mins.push(g.clone());
            }
        }
        mins.sort();
        Ok(MonotoneEvent {
            space,
            generators: mins,
        })
    }

    pub fn from_mask(space: &ChainProductSpace, mask: u64) -> Self {
        let members: Vec<Vec<usize>> = (0..space.num_points())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| space.outcome(i))
            .collect();
        MonotoneEvent::new(space.clone(), members).expect("mask within space")
    }

    pub fn generators(&self) -> &[Vec<usize>] {
        &self.generators
    }

    pub fn space(&self) -> &ChainProductSpace {
        &self.space
    }

    pub fn contains(&self, x: &[usize]) -> bool {
        self.generators.iter().any(|g| leq(g, x))
    }

    /// Coordinates `i` for which some member and some non-member differ only at `i`.
    pub fn affecting(&self) -> Vec<usize> {
        let mut out = Vec::new();
        'coord: for c in 0..self.space.dims() {
            for x in self.space.outcomes() {
                if !self.contains(&x) {
                    continue;
                }
                for v in 0..self.space.sizes()[c] {
                    let mut y = x.clone();
                    y[c] = v;
                    if !self.contains(&y) {
                        out.push(c);
                        continue 'coord;
                    }
                }
            }
        }
        out
    }

    /// `A ⊥ B`: no coordinate affects both.
    pub fn orthogonal(&self, other: &MonotoneEvent) -> bool {
        let a = self.affecting();
        other.affecting().iter().all(|c| !a.contains(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dedekind_numbers() {
        // Up-sets of the Boolean lattice 2^n, including the empty and full families.
        let expected = [2usize, 3, 6, 20, 168];
        for (n, &d) in expected.iter().enumerate() {
            let ups = enumerate_upsets(&ChainProductSpace::binary(n), 1 << 20).unwrap();
            assert_eq!(ups.len(), d, "n = {n}");
        }
    }

    #[test]
    fn grid_upsets_are_lattice_paths() {
        // Up-sets of a 3x3 grid correspond to lattice paths: C(6,3).
        let sp = ChainProductSpace::new(vec![3, 3]).unwrap();
        assert_eq!(enumerate_upsets(&sp, 1000).unwrap().len(), 20);
        // Plane partitions in a 3x3x3 box: 980.
        let sp = ChainProductSpace::new(vec![3, 3, 3]).unwrap();
        assert_eq!(enumerate_upsets(&sp, 10_000).unwrap().len(), 980);
    }

    #[test]
    fn every_enumerated_set_is_increasing() {
        let sp = ChainProductSpace::new(vec![2, 3, 2]).unwrap();
        for mask in enumerate_upsets(&sp, 10_000).unwrap() {
            let ev = MonotoneEvent::from_mask(&sp, mask);
            for x in sp.outcomes() {
                assert_eq!(ev.contains(&x), mask >> sp.index(&x) & 1 == 1);
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = enumerate_upsets(&ChainProductSpace::binary(4), 100).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }));
    }

    #[test]
    fn antichain_and_affecting() {
        let sp = ChainProductSpace::binary(3);
        let ev = MonotoneEvent::new(sp.clone(), vec![vec![1, 0, 0], vec![1, 1, 0]]).unwrap();
        assert_eq!(ev.generators(), &[vec![1, 0, 0]]);
        assert_eq!(ev.affecting(), vec![0]);
        let other = MonotoneEvent::new(sp, vec![vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(other.affecting(), vec![1, 2]);
        assert!(ev.orthogonal(&other));
    }
}

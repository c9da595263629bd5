use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest ground set for an explicit ideal (`2^m` membership bits).
pub const MAX_IDEAL_BALLS: usize = 20;

/// How an ideal was described.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IdealSource {
    /// Down-closure of the listed sets.
    Maximal { sets: Vec<Vec<usize>> },
    /// Independent sets of a simple graph.
    Graph { edges: Vec<(usize, usize)> },
    /// An explicit list that must already be down-closed.
    Family { sets: Vec<Vec<usize>> },
}

/// A decreasing family of subsets of the balls `0..m`, stored as a
/// membership table indexed by bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealSpec {
    m: usize,
    source: IdealSource,
    members: Vec<bool>,
}

fn mask_of(m: usize, set: &[usize]) -> Result<u32> {
    let mut mask = 0u32;
    for &i in set {
        if i >= m {
            return Err(Error::dim(format!("ball {i} out of range for m = {m}")));
        }
        mask |= 1 << i;
    }
    Ok(mask)
}

fn check_size(m: usize) -> Result<()> {
    if m > MAX_IDEAL_BALLS {
        return Err(Error::cap("ideal ground set", m as u128, MAX_IDEAL_BALLS as u128));
    }
    Ok(())
}

impl IdealSpec {
    pub fn from_maximal(m: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        check_size(m)?;
        let masks = sets.iter().map(|s| mask_of(m, s)).collect::<Result<Vec<_>>>()?;
        let members = (0..1u32 << m)
            .map(|x| masks.iter().any(|&g| x & g == x))
            .collect();
        Ok(IdealSpec {
            m,
            source: IdealSource::Maximal { sets },
            members,
        })
    }

    /// The independence complex of a graph on `0..m`. Loops are rejected.
    pub fn from_graph(m: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        check_size(m)?;
        let mut masks = Vec::with_capacity(edges.len());
        for &(u, v) in &edges {
            if u == v {
                return Err(Error::invalid(format!("loop at vertex {u}")));
            }
            masks.push(mask_of(m, &[u, v])?);
        }
        let members = (0..1u32 << m)
            .map(|x| masks.iter().all(|&e| x & e != e))
            .collect();
        Ok(IdealSpec {
            m,
            source: IdealSource::Graph { edges },
            members,
        })
    }

    /// An explicit family; fails unless it is nonempty and down-closed.
    pub fn from_family(m: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        check_size(m)?;
        let mut members = vec![false; 1 << m];
        for s in &sets {
            members[mask_of(m, s)? as usize] = true;
        }
        if !members[0] {
            return Err(Error::invalid("a decreasing family must contain the empty set"));
        }
        for x in 0..members.len() {
            if !members[x] {
                continue;
            }
            for i in 0..m {
                if x >> i & 1 == 1 && !members[x & !(1 << i)] {
                    return Err(Error::invalid(format!(
                        "family is not down-closed: {:?} is missing",
                        set_of((x & !(1 << i)) as u32)
                    )));
                }
            }
        }
        Ok(IdealSpec {
            m,
            source: IdealSource::Family { sets },
            members,
        })
    }

    /// Every subset of `0..m`.
    pub fn full(m: usize) -> Result<Self> {
        IdealSpec::from_graph(m, Vec::new())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn source(&self) -> &IdealSource {
        &self.source
    }

    pub fn is_graph(&self) -> bool {
        matches!(self.source, IdealSource::Graph { .. })
    }

    pub fn contains(&self, mask: u32) -> bool {
        self.members[mask as usize]
    }

    pub fn contains_set(&self, set: &[usize]) -> Result<bool> {
        Ok(self.contains(mask_of(self.m, set)?))
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Maximal members, each as a sorted list of balls.
    pub fn maximal_sets(&self) -> Vec<Vec<usize>> {
        (0..self.members.len() as u32)
            .filter(|&x| self.members[x as usize])
            .filter(|&x| (0..self.m).all(|i| x >> i & 1 == 1 || !self.members[(x | 1 << i) as usize]))
            .map(set_of)
            .collect()
    }
}

pub(crate) fn set_of(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).collect()
}

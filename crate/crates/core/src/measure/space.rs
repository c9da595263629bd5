use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Product of finite chains `{0..s_i-1}` with the coordinatewise order.
///
/// Outcomes are indexed in mixed radix with the first coordinate most
/// significant, so index order is the lexicographic order of outcome tuples.
/// A chain of size one is allowed (a coordinate that cannot vary), and so is
/// the empty product, which has a single outcome.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChainProductSpace {
    sizes: Vec<usize>,
}

/// Largest number of outcomes a dense measure may hold.
pub const MAX_POINTS: usize = 1 << 24;

impl ChainProductSpace {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::invalid("every chain needs at least one level"));
        }
        let mut total: usize = 1;
        for &s in &sizes {
            total = total
                .checked_mul(s)
                .filter(|&t| t <= MAX_POINTS)
                .ok_or_else(|| Error::cap("dense outcome space", u128::MAX, MAX_POINTS as u128))?;
        }
        Ok(ChainProductSpace { sizes })
    }

    pub fn binary(n: usize) -> Self {
        ChainProductSpace::new(vec![2; n]).expect("binary cube too large")
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dims(&self) -> usize {
        self.sizes.len()
    }

    pub fn num_points(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_binary(&self) -> bool {
        self.sizes.iter().all(|&s| s == 2)
    }

    pub fn index(&self, outcome: &[usize]) -> usize {
        debug_assert_eq!(outcome.len(), self.sizes.len());
        outcome
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&x, &s)| acc * s + x)
    }

    pub fn contains(&self, outcome: &[usize]) -> bool {
        outcome.len() == self.sizes.len() && outcome.iter().zip(&self.sizes).all(|(&x, &s)| x < s)
    }

    pub fn outcome(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for (slot, &s) in out.iter_mut().zip(&self.sizes).rev() {
            *slot = index % s;
            index /= s;
        }
        out
    }

    /// All outcomes in index order.
    pub fn outcomes(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.num_points()).map(move |i| self.outcome(i))
    }

    /// Subspace on the given coordinates (in the given order).
    pub fn project(&self, coords: &[usize]) -> ChainProductSpace {
        ChainProductSpace {
            sizes: coords.iter().map(|&c| self.sizes[c]).collect(),
        }
    }
}

/// Coordinatewise `x <= y`.
pub fn leq(x: &[usize], y: &[usize]) -> bool {
    x.iter().zip(y).all(|(a, b)| a <= b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix_roundtrip() {
        let sp = ChainProductSpace::new(vec![2, 3, 4]).unwrap();
        assert_eq!(sp.num_points(), 24);
        for i in 0..24 {
            assert_eq!(sp.index(&sp.outcome(i)), i);
        }
        assert_eq!(sp.outcome(0), vec![0, 0, 0]);
        assert_eq!(sp.outcome(23), vec![1, 2, 3]);
        assert_eq!(sp.index(&[1, 0, 0]), 12);
    }

    #[test]
    fn empty_product_has_one_point() {
        let sp = ChainProductSpace::new(vec![]).unwrap();
        assert_eq!(sp.num_points(), 1);
        assert_eq!(sp.outcomes().count(), 1);
    }

    #[test]
    fn rejects_zero_chain() {
        assert!(ChainProductSpace::new(vec![2, 0]).is_err());
    }
}

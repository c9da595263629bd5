use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};

/// Weight matrix `γ` (balls × urns) of the competing-urns model.
///
/// Ball `i` lands in urn `j` with probability `γ_ij / Σ_j γ_ij`, independently
/// of the other balls. Balls and urns are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UrnModel {
    gamma: Vec<Vec<Rational>>,
    n: usize,
    iid: bool,
    /// Row `i` scaled by the lcm of its denominators.
    scaled: Vec<Vec<BigUint>>,
    row_totals: Vec<BigUint>,
}

impl UrnModel {
    /// Every row needs the same length `n >= 1` and a strictly positive entry.
    /// A model with no balls is allowed; it is the law of the empty assignment.
    pub fn new(gamma: Vec<Vec<Rational>>) -> Result<Self> {
        let n = gamma.first().map_or(0, Vec::len);
        UrnModel::with_urns(gamma, n)
    }

    /// As [`UrnModel::new`], with the urn count given explicitly so that `m = 0` is expressible.
    pub fn with_urns(gamma: Vec<Vec<Rational>>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("a model needs at least one urn"));
        }
        for (i, row) in gamma.iter().enumerate() {
            if row.len() != n {
                return Err(Error::dim(format!("row {i} has {} entries, expected {n}", row.len())));
            }
            if row.iter().any(|g| g.is_negative()) {
                return Err(Error::invalid(format!("row {i} has a negative weight")));
            }
            if row.iter().all(Zero::is_zero) {
                return Err(Error::ZeroWeight);
            }
        }
        let iid = gamma.windows(2).all(|w| w[0] == w[1]);
        let scaled: Vec<Vec<BigUint>> = gamma
            .iter()
            .map(|row| {
                let den = rational::common_denominator(row.iter());
                row.iter()
                    .map(|g| {
                        (g * Rational::from_integer(den.clone()))
                            .to_integer()
                            .to_biguint()
                            .expect("nonnegative")
                    })
                    .collect()
            })
            .collect();
        let row_totals = scaled.iter().map(|r| r.iter().sum()).collect();
        Ok(UrnModel {
            gamma,
            n,
            iid,
            scaled,
            row_totals,
        })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        UrnModel::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| rational::int(x)).collect())
                .collect(),
        )
    }

    pub fn uniform(m: usize, n: usize) -> Self {
        UrnModel::iid(m, vec![Rational::one(); n]).expect("uniform model is valid")
    }

    /// Identical balls with urn weights `weights`.
    pub fn iid(m: usize, weights: Vec<Rational>) -> Result<Self> {
        let n = weights.len();
        UrnModel::with_urns(vec![weights; m], n)
    }

    pub fn m(&self) -> usize {
        self.gamma.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> &[Vec<Rational>] {
        &self.gamma
    }

    pub fn is_iid(&self) -> bool {
        self.iid
    }

    pub(crate) fn scaled_row(&self, i: usize) -> &[BigUint] {
        &self.scaled[i]
    }

    /// `Pr(σ(i) = j)`.
    pub fn ball_prob(&self, i: usize, j: usize) -> Rational {
        rational::ratio(&self.scaled[i][j], &self.row_totals[i])
    }

    /// Product of the scaled row totals: the common denominator of every
    /// probability computed from integer weights.
    pub(crate) fn total_weight(&self) -> BigUint {
        self.row_totals.iter().product()
    }

    /// The model on the balls in `balls` only (`Pr^L`), in the given order.
    pub fn restrict(&self, balls: &[usize]) -> Result<UrnModel> {
        if let Some(&b) = balls.iter().find(|&&b| b >= self.m()) {
            return Err(Error::dim(format!("ball {b} out of range")));
        }
        UrnModel::with_urns(balls.iter().map(|&b| self.gamma[b].clone()).collect(), self.n)
    }

    /// Rows rescaled to sum to one (same law).
    pub fn normalized(&self) -> UrnModel {
        let rows = (0..self.m())
            .map(|i| (0..self.n).map(|j| self.ball_prob(i, j)).collect())
            .collect();
        UrnModel::with_urns(rows, self.n).expect("normalizing keeps the model valid")
    }

    pub fn to_file(&self) -> ModelFile {
        ModelFile {
            m: self.m(),
            n: self.n,
            gamma: self
                .gamma
                .iter()
                .map(|r| r.iter().cloned().map(Exact).collect())
                .collect(),
            intervals: None,
            thresholds: None,
        }
    }
}

/// Unnormalized weight `W(σ) = ∏_i γ_{i,σ(i)}`.
pub fn weight(model: &UrnModel, sigma: &[usize]) -> Result<Rational> {
    if sigma.len() != model.m() {
        return Err(Error::dim(format!(
            "assignment has {} balls, model has {}",
            sigma.len(),
            model.m()
        )));
    }
    if let Some(&j) = sigma.iter().find(|&&j| j >= model.n()) {
        return Err(Error::dim(format!("urn {j} out of range")));
    }
    Ok(sigma
        .iter()
        .enumerate()
        .map(|(i, &j)| model.gamma[i][j].clone())
        .product())
}

/// A total map from balls to urns.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<usize>);

impl Assignment {
    /// Occupancies `B_j = |σ⁻¹(j)|`.
    pub fn occupancy(&self, n: usize) -> Vec<usize> {
        let mut b = vec![0; n];
        for &j in &self.0 {
            b[j] += 1;
        }
        b
    }

    /// `ξ_ij = 1{σ(i) = j}`.
    pub fn xi(&self, i: usize, j: usize) -> bool {
        self.0[i] == j
    }

    /// `|σ⁻¹(K)|` for an urn set `K`.
    pub fn count_in(&self, urns: &[usize]) -> usize {
        self.0.iter().filter(|j| urns.contains(j)).count()
    }
}

/// JSON model file. `intervals` maps an urn index to its full cut sequence and
/// `thresholds` lists one threshold per urn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub m: usize,
    pub n: usize,
    pub gamma: Vec<Vec<Exact>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<BTreeMap<String, Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<usize>>,
}

impl ModelFile {
    pub fn model(&self) -> Result<UrnModel> {
        if self.gamma.len() != self.m {
            return Err(Error::dim(format!(
                "gamma has {} rows but m = {}",
                self.gamma.len(),
                self.m
            )));
        }
        UrnModel::with_urns(
            self.gamma
                .iter()
                .map(|r| r.iter().map(|e| e.0.clone()).collect())
                .collect(),
            self.n,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn weight_examples() {
        let model = UrnModel::from_ints(&[vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(weight(&model, &[0, 1]).unwrap(), int(4));
        let zero = UrnModel::from_ints(&[vec![0, 2], vec![3, 4]]).unwrap();
        assert_eq!(weight(&zero, &[0, 1]).unwrap(), int(0));
        let ones = UrnModel::uniform(3, 2);
        assert_eq!(weight(&ones, &[1, 0, 1]).unwrap(), int(1));
        assert!(weight(&model, &[0]).is_err());
        assert!(weight(&model, &[0, 2]).is_err());
    }

    #[test]
    fn iid_flag_is_recomputed() {
        assert!(UrnModel::from_ints(&[vec![1, 2], vec![1, 2]]).unwrap().is_iid());
        assert!(!UrnModel::from_ints(&[vec![1, 2], vec![2, 1]]).unwrap().is_iid());
        // Proportional but unequal rows are not flagged.
        assert!(!UrnModel::from_ints(&[vec![1, 2], vec![2, 4]]).unwrap().is_iid());
    }

    #[test]
    fn zero_row_rejected() {
        assert_eq!(
            UrnModel::from_ints(&[vec![0, 0], vec![1, 1]]),
            Err(Error::ZeroWeight)
        );
    }

    #[test]
    fn ball_probabilities_use_row_scaling() {
        let model = UrnModel::new(vec![vec![rat(1, 2), rat(1, 3)]]).unwrap();
        assert_eq!(model.ball_prob(0, 0), rat(3, 5));
        assert_eq!(model.normalized().gamma()[0], vec![rat(3, 5), rat(2, 5)]);
    }

    #[test]
    fn file_roundtrip() {
        let text = r#"{"m": 2, "n": 2, "gamma": [["1/2", 1], [3, "4/1"]], "thresholds": [1, 1]}"#;
        let file = ModelFile::from_json(text).unwrap();
        let model = file.model().unwrap();
        assert_eq!(model.gamma()[0][0], rat(1, 2));
        let back = serde_json::to_string(&model.to_file()).unwrap();
        assert_eq!(back, r#"{"m":2,"n":2,"gamma":[["1/2","1/1"],["3/1","4/1"]]}"#);
    }
}

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::space::ChainProductSpace;
use crate::error::{Error, Result};
use crate::rational::{self, Exact, Rational};

/// Exact probability measure on a product of chains.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMeasure {
    space: ChainProductSpace,
    mass: Vec<Rational>,
}

/// Per-coordinate external field weights `W_i >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldVector(pub Vec<Rational>);

impl FieldVector {
    pub fn ones(n: usize) -> Self {
        FieldVector(vec![Rational::one(); n])
    }

    pub fn is_r_plus(&self) -> bool {
        self.0.iter().all(|w| w.is_zero() || *w >= Rational::one())
    }
}

impl FiniteMeasure {
    /// Builds a measure from masses that must already sum to exactly one.
    pub fn new(space: ChainProductSpace, mass: Vec<Rational>) -> Result<Self> {
        if mass.len() != space.num_points() {
            return Err(Error::dim(format!(
                "mass vector has {} entries, space has {} points",
                mass.len(),
                space.num_points()
            )));
        }
        if mass.iter().any(|m| m.is_negative()) {
            return Err(Error::invalid("negative mass"));
        }
        let total: Rational = mass.iter().sum();
        if total != Rational::one() {
            return Err(Error::invalid(format!(
                "masses sum to {}, not 1",
                rational::format(&total)
            )));
        }
        Ok(FiniteMeasure { space, mass })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(space: ChainProductSpace, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != space.num_points() {
            return Err(Error::dim("weight vector length does not match space"));
        }
        if weights.iter().any(|m| m.is_negative()) {
            return Err(Error::invalid("negative weight"));
        }
        let total: Rational = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::ZeroWeight);
        }
        let mass = weights.into_iter().map(|w| w / &total).collect();
        Ok(FiniteMeasure { space, mass })
    }

    pub fn from_int_weights(space: ChainProductSpace, weights: &[BigUint]) -> Result<Self> {
        if weights.len() != space.num_points() {
            return Err(Error::dim("weight vector length does not match space"));
        }
        let total: BigUint = weights.iter().sum();
        if total.is_zero() {
            return Err(Error::ZeroWeight);
        }
        let mass = weights.iter().map(|w| rational::ratio(w, &total)).collect();
        Ok(FiniteMeasure { space, mass })
    }

    pub fn point_mass(space: ChainProductSpace, outcome: &[usize]) -> Result<Self> {
        if !space.contains(outcome) {
            return Err(Error::dim("outcome outside space"));
        }
        let mut mass = vec![Rational::zero(); space.num_points()];
        mass[space.index(outcome)] = Rational::one();
        Ok(FiniteMeasure { space, mass })
    }

    pub fn uniform(space: ChainProductSpace) -> Self {
        let n = space.num_points();
        let p = Rational::new(BigInt::one(), BigInt::from(n));
        FiniteMeasure {
            mass: vec![p; n],
            space,
        }
    }

    /// Product of independent one-coordinate laws.
    pub fn product(marginals: &[Vec<Rational>]) -> Result<Self> {
        let space = ChainProductSpace::new(marginals.iter().map(Vec::len).collect())?;
        let mass = space
            .outcomes()
            .map(|x| x.iter().enumerate().map(|(i, &v)| marginals[i][v].clone()).product())
            .collect();
        FiniteMeasure::new(space, mass)
    }

    pub fn space(&self) -> &ChainProductSpace {
        &self.space
    }

    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    pub fn masses(&self) -> &[Rational] {
        &self.mass
    }

    pub fn prob(&self, outcome: &[usize]) -> Rational {
        if !self.space.contains(outcome) {
            return Rational::zero();
        }
        self.mass[self.space.index(outcome)].clone()
    }

    pub fn prob_of(&self, mut pred: impl FnMut(&[usize]) -> bool) -> Rational {
        self.iter().filter(|(x, _)| pred(x)).map(|(_, p)| p.clone()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, &Rational)> + '_ {
        self.mass
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.space.outcome(i), p))
    }

    pub fn support(&self) -> Vec<Vec<usize>> {
        self.iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(x, _)| x)
            .collect()
    }

    pub fn total(&self) -> Rational {
        self.mass.iter().sum()
    }

    /// Law of the image under `f`, on the given target space.
    pub fn pushforward(
        &self,
        target: ChainProductSpace,
        mut f: impl FnMut(&[usize]) -> Vec<usize>,
    ) -> Result<FiniteMeasure> {
        let mut mass = vec![Rational::zero(); target.num_points()];
        for (x, p) in self.iter() {
            if p.is_zero() {
                continue;
            }
            let y = f(&x);
            if !target.contains(&y) {
                return Err(Error::dim("pushforward image outside target space"));
            }
            mass[target.index(&y)] += p;
        }
        Ok(FiniteMeasure {
            space: target,
            mass,
        })
    }

    /// Joint law of the listed coordinates.
    pub fn marginal(&self, coords: &[usize]) -> Result<FiniteMeasure> {
        if coords.iter().any(|&c| c >= self.dims()) {
            return Err(Error::dim("marginal coordinate out of range"));
        }
        let target = self.space.project(coords);
        self.pushforward(target, |x| coords.iter().map(|&c| x[c]).collect())
    }

    /// Conditions on the fixed coordinates and re-indexes over the free ones
    /// (in their original order).
    pub fn condition(&self, fixing: &[Option<usize>]) -> Result<FiniteMeasure> {
        if fixing.len() != self.dims() {
            return Err(Error::dim("fixing length does not match space"));
        }
        for (i, f) in fixing.iter().enumerate() {
            if let Some(v) = f {
                if *v >= self.space.sizes()[i] {
                    return Err(Error::dim(format!("level {v} out of range at coordinate {i}")));
                }
            }
        }
        let free: Vec<usize> = (0..self.dims()).filter(|&i| fixing[i].is_none()).collect();
        let target = self.space.project(&free);
        let mut weights = vec![Rational::zero(); target.num_points()];
        for (x, p) in self.iter() {
            if p.is_zero() {
                continue;
            }
            if fixing
                .iter()
                .zip(&x)
                .all(|(f, v)| f.map_or(true, |f| f == *v))
            {
                let y: Vec<usize> = free.iter().map(|&c| x[c]).collect();
                weights[target.index(&y)] += p;
            }
        }
        FiniteMeasure::from_weights(target, weights).map_err(|e| match e {
            Error::ZeroWeight => Error::zero_prob(format!("fixing {}", describe_fixing(fixing))),
            other => other,
        })
    }

    /// `W∘μ(η) ∝ μ(η) ∏ W_i^{η_i}` on a binary space.
    pub fn external_field(&self, field: &FieldVector) -> Result<FiniteMeasure> {
        if !self.space.is_binary() {
            return Err(Error::invalid("external fields need {0,1}-valued coordinates"));
        }
        if field.0.len() != self.dims() {
            return Err(Error::dim("field length does not match space"));
        }
        if field.0.iter().any(|w| w.is_negative()) {
            return Err(Error::invalid("negative field weight"));
        }
        let weights = self
            .iter()
            .map(|(x, p)| {
                let mut w = p.clone();
                for (i, &v) in x.iter().enumerate() {
                    if v == 1 {
                        w *= &field.0[i];
                    }
                }
                w
            })
            .collect();
        FiniteMeasure::from_weights(self.space.clone(), weights).map_err(|e| match e {
            Error::ZeroWeight => Error::zero_prob("external field kills all mass"),
            other => other,
        })
    }

    /// `r_i = μ(|η| = i)` where `|η|` is the sum of levels.
    pub fn rank_sequence(&self) -> Vec<Rational> {
        let max: usize = self.space.sizes().iter().map(|s| s - 1).sum();
        let mut r = vec![Rational::zero(); max + 1];
        for (x, p) in self.iter() {
            r[x.iter().sum::<usize>()] += p;
        }
        r
    }

    /// Masses scaled by their common denominator: returns integer weights and
    /// their total (the common denominator).
    pub fn int_weights(&self) -> (Vec<BigUint>, BigUint) {
        let den = rational::common_denominator(self.mass.iter());
        let weights: Vec<BigUint> = self
            .mass
            .iter()
            .map(|p| {
                let scaled = p * Rational::from_integer(den.clone());
                scaled
                    .to_integer()
                    .to_biguint()
                    .expect("masses are nonnegative")
            })
            .collect();
        let total = den.to_biguint().expect("positive denominator");
        (weights, total)
    }

    pub fn to_file(&self) -> MeasureFile {
        let mass = self
            .iter()
            .filter(|(_, p)| !p.is_zero())
            .map(|(x, p)| (outcome_key(&x), Exact(p.clone())))
            .collect();
        MeasureFile {
            space: self.space.sizes().to_vec(),
            mass,
        }
    }

    pub fn from_file(file: &MeasureFile) -> Result<Self> {
        let space = ChainProductSpace::new(file.space.clone())?;
        let mut mass = vec![Rational::zero(); space.num_points()];
        for (key, p) in &file.mass {
            let x = parse_outcome_key(key)?;
            if !space.contains(&x) {
                return Err(Error::dim(format!("outcome {key} outside space")));
            }
            mass[space.index(&x)] = p.0.clone();
        }
        FiniteMeasure::new(space, mass)
    }
}

/// JSON form: `{"space": [chain sizes], "mass": {"outcome-tuple": "p/q"}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureFile {
    pub space: Vec<usize>,
    pub mass: BTreeMap<String, Exact>,
}

pub fn outcome_key(x: &[usize]) -> String {
    let parts: Vec<String> = x.iter().map(|v| v.to_string()).collect();
    parts.join(",")
}

pub fn parse_outcome_key(key: &str) -> Result<Vec<usize>> {
    let trimmed = key.trim().trim_start_matches('(').trim_end_matches(')');
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad outcome key {key:?}")))
        })
        .collect()
}

pub(crate) fn describe_fixing(fixing: &[Option<usize>]) -> String {
    let parts: Vec<String> = fixing
        .iter()
        .map(|f| f.map_or_else(|| "*".to_string(), |v| v.to_string()))
        .collect();
    format!("({})", parts.join(","))
}

/// All partial fixings of a space: each coordinate free or fixed to a level.
pub fn all_fixings(space: &ChainProductSpace) -> Vec<Vec<Option<usize>>> {
    let mut out = vec![Vec::new()];
    for &s in space.sizes() {
        let mut next = Vec::with_capacity(out.len() * (s + 1));
        for prefix in &out {
            let mut free = prefix.clone();
            free.push(None);
            next.push(free);
            for v in 0..s {
                let mut fixed = prefix.clone();
                fixed.push(Some(v));
                next.push(fixed);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn diag() -> FiniteMeasure {
        FiniteMeasure::new(
            ChainProductSpace::binary(2),
            vec![rat(1, 2), int(0), int(0), rat(1, 2)],
        )
        .unwrap()
    }

    #[test]
    fn condition_product_measure() {
        let mu = FiniteMeasure::uniform(ChainProductSpace::binary(2));
        let c = mu.condition(&[Some(1), None]).unwrap();
        assert_eq!(c, FiniteMeasure::uniform(ChainProductSpace::binary(1)));
    }

    #[test]
    fn condition_diagonal_gives_point_mass() {
        let c = diag().condition(&[Some(1), None]).unwrap();
        assert_eq!(c, FiniteMeasure::point_mass(ChainProductSpace::binary(1), &[1]).unwrap());
    }

    #[test]
    fn condition_on_null_event_errors() {
        let mu = FiniteMeasure::point_mass(ChainProductSpace::binary(2), &[0, 0]).unwrap();
        let err = mu.condition(&[Some(1), None]).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability(_)));
    }

    #[test]
    fn field_identity_and_zero() {
        let mu = FiniteMeasure::from_weights(
            ChainProductSpace::binary(2),
            vec![int(1), int(2), int(3), int(4)],
        )
        .unwrap();
        assert_eq!(mu.external_field(&FieldVector::ones(2)).unwrap(), mu);
        let killed = mu
            .external_field(&FieldVector(vec![int(0), int(1)]))
            .unwrap();
        let conditioned = mu.condition(&[Some(0), None]).unwrap();
        // Same law once the fixed coordinate is dropped.
        assert_eq!(killed.marginal(&[1]).unwrap(), conditioned);
        assert_eq!(killed.prob_of(|x| x[0] == 1), int(0));
    }

    #[test]
    fn field_on_single_coordinate() {
        let mu = FiniteMeasure::uniform(ChainProductSpace::binary(1));
        let w = mu.external_field(&FieldVector(vec![int(2)])).unwrap();
        assert_eq!(w.prob(&[1]), rat(2, 3));
    }

    #[test]
    fn file_roundtrip() {
        let mu = diag();
        let f = mu.to_file();
        assert_eq!(f.mass.len(), 2);
        let json = serde_json::to_string(&f).unwrap();
        assert_eq!(json, r#"{"space":[2,2],"mass":{"0,0":"1/2","1,1":"1/2"}}"#);
        let back: MeasureFile = serde_json::from_str(&json).unwrap();
        assert_eq!(FiniteMeasure::from_file(&back).unwrap(), mu);
    }

    #[test]
    fn rejects_unnormalized() {
        let err = FiniteMeasure::new(ChainProductSpace::binary(1), vec![int(1), int(1)]);
        assert!(err.is_err());
    }

    #[test]
    fn int_weights_scale() {
        let (w, total) = diag().int_weights();
        assert_eq!(total, BigUint::from(2u32));
        assert_eq!(w[0], BigUint::one());
        assert_eq!(w[1], BigUint::zero());
    }

    #[test]
    fn fixings_count() {
        let sp = ChainProductSpace::new(vec![2, 3]).unwrap();
        assert_eq!(all_fixings(&sp).len(), 3 * 4);
    }
}

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::model::UrnModel;
use super::occupancy::{occupancy_table, window_cap, window_prob, OccupancySpec, Windows};
use super::xy::JointXYLaw;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// The event `Q = {S_j <= B_j <= T_j ∀ j ∈ K}` with `Pr(Q) > 0` under its model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditioningEvent {
    windows: Windows,
}

impl ConditioningEvent {
    /// Validates `S_j <= T_j <= m` and positivity under `model`.
    pub fn new(model: &UrnModel, windows: Windows) -> Result<Self> {
        for (&j, &(lo, hi)) in &windows {
            if j >= model.n() {
                return Err(Error::dim(format!("urn {j} out of range")));
            }
            if lo > hi || hi > model.m() {
                return Err(Error::invalid(format!(
                    "window [{lo}, {hi}] for urn {j} needs S <= T <= m = {}",
                    model.m()
                )));
            }
        }
        let p = window_prob(model, &windows)?;
        if p.is_zero() {
            return Err(Error::zero_prob(describe(&windows)));
        }
        Ok(ConditioningEvent { windows })
    }

    /// The sure event (`K = ∅`).
    pub fn trivial() -> Self {
        ConditioningEvent {
            windows: Windows::new(),
        }
    }

    pub fn windows(&self) -> &Windows {
        &self.windows
    }

    pub fn urns(&self) -> Vec<usize> {
        self.windows.keys().copied().collect()
    }

    pub fn contains(&self, occupancy: &[usize]) -> bool {
        self.windows
            .iter()
            .all(|(&j, &(lo, hi))| lo <= occupancy[j] && occupancy[j] <= hi)
    }

    pub fn probability(&self, model: &UrnModel) -> Result<Rational> {
        window_prob(model, &self.windows)
    }
}

pub(crate) fn describe(windows: &Windows) -> String {
    let parts: Vec<String> = windows
        .iter()
        .map(|(j, (lo, hi))| format!("B_{j} in [{lo},{hi}]"))
        .collect();
    if parts.is_empty() {
        "sure event".into()
    } else {
        parts.join(", ")
    }
}

/// Checks that `I`, `J` and the urns of `Q` partition the urns.
fn check_partition(model: &UrnModel, q: &ConditioningEvent, i: &[usize], j: &[usize]) -> Result<()> {
    let mut seen = vec![false; model.n()];
    for &u in i.iter().chain(j).chain(q.windows.keys()) {
        if u >= model.n() {
            return Err(Error::dim(format!("urn {u} out of range")));
        }
        if seen[u] {
            return Err(Error::invalid(format!("urn {u} appears in more than one of I, J, K")));
        }
        seen[u] = true;
    }
    if let Some(u) = seen.iter().position(|s| !s) {
        return Err(Error::invalid(format!("urn {u} is in none of I, J, K")));
    }
    Ok(())
}

/// Joint law of `X = |σ⁻¹(I)|` and `Y = |σ⁻¹(J)|` given `Q`, on `{0..m}²`.
pub fn conditional_xy_law(
    model: &UrnModel,
    q: &ConditioningEvent,
    i: &[usize],
    j: &[usize],
) -> Result<JointXYLaw> {
    check_partition(model, q, i, j)?;
    let m = model.m();
    let mut blocks = vec![i.to_vec(), j.to_vec()];
    let mut caps = vec![m, m];
    for (&u, &(_, hi)) in &q.windows {
        blocks.push(vec![u]);
        caps.push(window_cap(hi, m));
    }
    let table = occupancy_table(model, &OccupancySpec::new(blocks, caps)?)?;
    let mut weights = vec![vec![Rational::zero(); m + 1]; m + 1];
    let mut any = false;
    for (idx, w) in table.weights().iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let x = table.space().outcome(idx);
        let ok = q
            .windows
            .values()
            .zip(&x[2..])
            .all(|(&(lo, hi), &v)| lo <= v && v <= hi);
        if ok {
            weights[x[0]][x[1]] += rational::from_biguint(w);
            any = true;
        }
    }
    if !any {
        return Err(Error::zero_prob(describe(&q.windows)));
    }
    Ok(JointXYLaw::from_weights(weights, i.to_vec(), j.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn three_urns_one_fixed() {
        let model = UrnModel::uniform(2, 3);
        let q = ConditioningEvent::new(&model, [(2, (1, 1))].into_iter().collect()).unwrap();
        let law = conditional_xy_law(&model, &q, &[0], &[1]).unwrap();
        assert_eq!(law.prob(1, 0), rat(1, 2));
        assert_eq!(law.prob(0, 1), rat(1, 2));
        assert_eq!(law.support().len(), 2);
        assert_eq!(law.mu(0).unwrap()[1], int(1));
        assert_eq!(law.mu(1).unwrap()[0], int(1));
    }

    #[test]
    fn no_conditioning_two_urns() {
        let model = UrnModel::from_ints(&[vec![1, 2], vec![3, 1], vec![1, 1]]).unwrap();
        let law = conditional_xy_law(&model, &ConditioningEvent::trivial(), &[0], &[1]).unwrap();
        for k in 0..=3 {
            let mu = law.mu(k).unwrap();
            for l in 0..=3 {
                assert_eq!(mu[l], if l == 3 - k { int(1) } else { int(0) });
            }
        }
    }

    #[test]
    fn zero_probability_event_is_an_error() {
        let model = UrnModel::from_ints(&[vec![1, 0], vec![1, 0]]).unwrap();
        let err = ConditioningEvent::new(&model, [(1, (1, 2))].into_iter().collect()).unwrap_err();
        assert!(matches!(err, Error::ZeroProbability(_)));
    }

    #[test]
    fn partition_is_required() {
        let model = UrnModel::uniform(2, 3);
        let q = ConditioningEvent::trivial();
        assert!(conditional_xy_law(&model, &q, &[0], &[1]).is_err());
        assert!(conditional_xy_law(&model, &q, &[0, 1], &[1, 2]).is_err());
        assert!(conditional_xy_law(&model, &q, &[0, 1], &[2]).is_ok());
    }
}

//! Stochastic dominance via monotone-coupling feasibility.
//!
//! `μ ⪰ ν` iff there is a coupling supported on `{(x, y) : x >= y}`, i.e. iff the
//! transportation network source → x (cap μ(x)) → y (x >= y, uncapped) → sink
//! (cap ν(y)) carries a full unit of flow. Capacities are scaled to integers and
//! the maximum flow is found by shortest augmenting paths.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::json;

use super::events::{enumerate_upsets, MonotoneEvent};
use super::finite::FiniteMeasure;
use super::space::leq;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::verdict::{Tally, Verdict};

struct FlowNetwork {
    cap: Vec<Vec<BigInt>>,
}

impl FlowNetwork {
    fn new(n: usize) -> Self {
        FlowNetwork {
            cap: vec![vec![BigInt::zero(); n]; n],
        }
    }

    fn add(&mut self, u: usize, v: usize, c: BigInt) {
        self.cap[u][v] += c;
    }

    /// Edmonds–Karp; returns the flow value and the residual-reachable set.
    fn max_flow(&mut self, s: usize, t: usize) -> (BigInt, Vec<bool>) {
        let n = self.cap.len();
        let mut flow = BigInt::zero();
        loop {
            let mut prev = vec![usize::MAX; n];
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for v in 0..n {
                    if !seen[v] && self.cap[u][v].is_positive() {
                        seen[v] = true;
                        prev[v] = u;
                        queue.push_back(v);
                    }
                }
            }
            if !seen[t] {
                return (flow, seen);
            }
            let mut bottleneck: Option<BigInt> = None;
            let mut v = t;
            while v != s {
                let u = prev[v];
                let c = &self.cap[u][v];
                if bottleneck.as_ref().map_or(true, |b| c < b) {
                    bottleneck = Some(c.clone());
                }
                v = u;
            }
            let b = bottleneck.expect("path has an edge");
            let mut v = t;
            while v != s {
                let u = prev[v];
                self.cap[u][v] -= &b;
                self.cap[v][u] += &b;
                v = u;
            }
            flow += b;
        }
    }
}

/// Decides `μ ⪰ ν` by maximum flow. A failure carries an increasing event `U`
/// with `μ(U) < ν(U)` read off the minimum cut.
pub fn stochastic_dominance(mu: &FiniteMeasure, nu: &FiniteMeasure) -> Result<Verdict> {
    if mu.space() != nu.space() {
        return Err(Error::dim("dominance needs measures on the same space"));
    }
    let space = mu.space();
    let den = rational::common_denominator(mu.masses().iter().chain(nu.masses()));
    let scale = |p: &Rational| (p * Rational::from_integer(den.clone())).to_integer();
    let xs: Vec<usize> = (0..space.num_points())
        .filter(|&i| !mu.masses()[i].is_zero())
        .collect();
    let ys: Vec<usize> = (0..space.num_points())
        .filter(|&i| !nu.masses()[i].is_zero())
        .collect();
    let source = 0;
    let sink = 1 + xs.len() + ys.len();
    let mut net = FlowNetwork::new(sink + 1);
    let unbounded = &den + BigInt::from(1);
    for (a, &x) in xs.iter().enumerate() {
        net.add(source, 1 + a, scale(&mu.masses()[x]));
        let xo = space.outcome(x);
        for (b, &y) in ys.iter().enumerate() {
            if leq(&space.outcome(y), &xo) {
                net.add(1 + a, 1 + xs.len() + b, unbounded.clone());
            }
        }
    }
    for (b, &y) in ys.iter().enumerate() {
        net.add(1 + xs.len() + b, sink, scale(&nu.masses()[y]));
    }
    let (flow, reach) = net.max_flow(source, sink);
    if flow == den {
        return Ok(Verdict::holds("dominance").with_counts(1, 0));
    }
    // The down-closure D of the reachable x-nodes has μ(D) > ν(D): every
    // support point of ν inside D is reachable, and the cut is below 1.
    let down: Vec<usize> = xs
        .iter()
        .enumerate()
        .filter(|(a, _)| reach[1 + a])
        .map(|(_, &x)| x)
        .collect();
    let in_up = |z: &[usize]| !down.iter().any(|&d| leq(z, &space.outcome(d)));
    let members: Vec<Vec<usize>> = space.outcomes().filter(|z| in_up(z)).collect();
    let event = MonotoneEvent::new(space.clone(), members)?;
    let mu_u = mu.prob_of(|z| event.contains(z));
    let nu_u = nu.prob_of(|z| event.contains(z));
    debug_assert!(mu_u < nu_u);
    Ok(Verdict::violated(
        "dominance",
        json!({
            "increasing_event_minimal": event.generators(),
            "mu": rational::format(&mu_u),
            "nu": rational::format(&nu_u),
            "flow_deficit": rational::format(&Rational::new(&den - flow, den.clone())),
        }),
    )
    .with_counts(1, 0))
}

/// `μ(A) >= ν(A)` for every increasing `A`, by enumerating all up-sets.
/// Independent of the flow route; feasible on spaces with at most 64 points.
pub fn dominance_by_enumeration(
    mu: &FiniteMeasure,
    nu: &FiniteMeasure,
    max_events: usize,
) -> Result<Verdict> {
    if mu.space() != nu.space() {
        return Err(Error::dim("dominance needs measures on the same space"));
    }
    let space = mu.space();
    let mut tally = Tally::default();
    for mask in enumerate_upsets(space, max_events)? {
        let mut pm = Rational::zero();
        let mut pn = Rational::zero();
        for i in 0..space.num_points() {
            if mask >> i & 1 == 1 {
                pm += &mu.masses()[i];
                pn += &nu.masses()[i];
            }
        }
        if tally.record(Some(pm >= pn), || {
            json!({
                "increasing_event_minimal": MonotoneEvent::from_mask(space, mask).generators(),
                "mu": rational::format(&pm),
                "nu": rational::format(&pn),
            })
        }) {
            break;
        }
    }
    Ok(tally.finish("dominance_enumerated"))
}

/// Normalized matching property for a measure on `{0,1}^m`: the rank-slice
/// conditionals are stochastically increasing along consecutive nonempty ranks.
pub fn check_normalized_matching(mu: &FiniteMeasure) -> Result<Verdict> {
    if !mu.space().is_binary() {
        return Err(Error::invalid("normalized matching needs a measure on {0,1}^m"));
    }
    let m = mu.dims();
    let space = mu.space();
    let mut slices: Vec<(usize, FiniteMeasure)> = Vec::new();
    let mut empty = Vec::new();
    for k in 0..=m {
        let weights: Vec<Rational> = space
            .outcomes()
            .zip(mu.masses())
            .map(|(x, p)| {
                if x.iter().sum::<usize>() == k {
                    p.clone()
                } else {
                    Rational::zero()
                }
            })
            .collect();
        match FiniteMeasure::from_weights(space.clone(), weights) {
            Ok(slice) => slices.push((k, slice)),
            Err(_) => empty.push(k),
        }
    }
    let mut out = Verdict::holds("normalized_matching");
    for pair in slices.windows(2) {
        let (lo, lo_law) = &pair[0];
        let (hi, hi_law) = &pair[1];
        let mut v = stochastic_dominance(hi_law, lo_law)?;
        if let Some(w) = v.witness.as_mut() {
            w["ranks"] = json!([lo, hi]);
        }
        out.absorb(v);
        if out.is_violated() {
            break;
        }
    }
    if !empty.is_empty() {
        out = out.note(format!("empty ranks skipped: {empty:?}"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::space::ChainProductSpace;
    use crate::rational::{int, rat};

    #[test]
    fn top_dominates_bottom() {
        let sp = ChainProductSpace::binary(2);
        let top = FiniteMeasure::point_mass(sp.clone(), &[1, 1]).unwrap();
        let bot = FiniteMeasure::point_mass(sp, &[0, 0]).unwrap();
        assert!(stochastic_dominance(&top, &bot).unwrap().is_holds());
        assert!(stochastic_dominance(&bot, &top).unwrap().is_violated());
    }

    #[test]
    fn incomparable_points() {
        let sp = ChainProductSpace::binary(2);
        let a = FiniteMeasure::point_mass(sp.clone(), &[1, 0]).unwrap();
        let b = FiniteMeasure::point_mass(sp, &[0, 1]).unwrap();
        let v = stochastic_dominance(&a, &b).unwrap();
        assert!(v.is_violated());
        assert!(stochastic_dominance(&b, &a).unwrap().is_violated());
        // The cut event really separates them.
        let w = v.witness.unwrap();
        assert_eq!(w["mu"], "0/1");
        assert_eq!(w["nu"], "1/1");
    }

    #[test]
    fn fractional_coupling() {
        // μ = (1/2)δ_11 + (1/2)δ_00 dominates ν = δ_10 only partially: fails.
        let sp = ChainProductSpace::binary(2);
        let mu = FiniteMeasure::new(sp.clone(), vec![rat(1, 2), int(0), int(0), rat(1, 2)]).unwrap();
        let nu = FiniteMeasure::point_mass(sp.clone(), &[1, 0]).unwrap();
        assert!(stochastic_dominance(&mu, &nu).unwrap().is_violated());
        let lo = FiniteMeasure::point_mass(sp, &[0, 0]).unwrap();
        assert!(stochastic_dominance(&mu, &lo).unwrap().is_holds());
    }

    #[test]
    fn uniform_cube_has_nmp() {
        let mu = FiniteMeasure::uniform(ChainProductSpace::binary(3));
        assert!(check_normalized_matching(&mu).unwrap().is_holds());
    }

    #[test]
    fn point_mass_nmp_vacuous() {
        let mu = FiniteMeasure::point_mass(ChainProductSpace::binary(3), &[1, 0, 1]).unwrap();
        let v = check_normalized_matching(&mu).unwrap();
        assert!(v.is_holds());
        assert!(!v.notes.is_empty());
    }

    #[test]
    fn singleton_versus_pair_fails_nmp() {
        let sp = ChainProductSpace::binary(3);
        let mut w = vec![int(0); 8];
        w[sp.index(&[1, 0, 0])] = int(1);
        w[sp.index(&[0, 1, 1])] = int(1);
        let mu = FiniteMeasure::from_weights(sp, w).unwrap();
        let v = check_normalized_matching(&mu).unwrap();
        assert!(v.is_violated());
    }
}

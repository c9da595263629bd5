//! Seeded counterexample campaigns. Instance `k` of a campaign draws from
//! ChaCha stream `k`, so reports depend only on `(seed, budget, caps)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::farr::{farr_all, ideal_json, MAX_FARR_BALLS};
use super::ideal::IdealSpec;
use crate::error::{Error, Result};
use crate::measure::{check_cna, check_nc, falsify_fields, FieldMode, FieldVector, NaCaps};
use crate::rational::{self, rat, Rational};
use crate::urn::random::random_model;
use crate::urn::{interval_urn_measure, IntervalSpec, ThresholdSpec, UrnModel};
use crate::verdict::Verdict;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchInstance {
    pub index: usize,
    pub params: Value,
    pub verdicts: Vec<Verdict>,
}

impl SearchInstance {
    pub fn verdict(&self, property: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.property == property)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub campaign: String,
    pub seed: u64,
    pub budget: usize,
    pub instances: Vec<SearchInstance>,
    /// One aggregate per property, keyed by property name.
    pub aggregate: BTreeMap<String, Verdict>,
}

impl SearchReport {
    fn run(
        campaign: &str,
        seed: u64,
        budget: usize,
        one: impl Fn(&mut ChaCha8Rng) -> Result<(Value, Vec<Verdict>)> + Sync,
    ) -> Result<Self> {
        let instances = (0..budget)
            .into_par_iter()
            .map(|index| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index as u64);
                let (params, verdicts) = one(&mut rng)?;
                Ok(SearchInstance {
                    index,
                    params,
                    verdicts,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut aggregate: BTreeMap<String, Verdict> = BTreeMap::new();
        for inst in &instances {
            for v in &inst.verdicts {
                aggregate
                    .entry(v.property.clone())
                    .or_insert_with(|| Verdict::holds(v.property.clone()))
                    .absorb(v.clone());
            }
        }
        Ok(SearchReport {
            campaign: campaign.into(),
            seed,
            budget,
            instances,
            aggregate,
        })
    }

    /// Instances where `property` was violated.
    pub fn violations<'a>(&'a self, property: &'a str) -> impl Iterator<Item = &'a SearchInstance> + 'a {
        self.instances
            .iter()
            .filter(move |i| i.verdict(property).is_some_and(Verdict::is_violated))
    }
}

fn capped(property: &str, r: Result<Verdict>) -> Result<Verdict> {
    r.or_else(|e| Verdict::from_cap(property, e))
}

fn random_graph(rng: &mut ChaCha8Rng, m: usize) -> Vec<(usize, usize)> {
    let density = rng.gen_range(1..=4);
    let mut edges = Vec::new();
    for u in 0..m {
        for v in u + 1..m {
            if rng.gen_ratio(density, 5) {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// A per-urn probability `p` with `n p <= 1`; `n p = 1` (no extra urn) is
/// drawn a quarter of the time.
fn random_p(rng: &mut ChaCha8Rng, n: usize) -> Rational {
    if rng.gen_ratio(1, 4) {
        return rat(1, n as i64);
    }
    let q = rng.gen_range(n..=3 * n) as i64;
    rat(rng.gen_range(1..=q / n as i64), q)
}

fn farr_instance(rng: &mut ChaCha8Rng, general: bool) -> Result<(Value, Vec<Verdict>)> {
    let m = rng.gen_range(2..=8.min(MAX_FARR_BALLS));
    let n = rng.gen_range(2..=5);
    let ideal = if general {
        let count = rng.gen_range(1..=4);
        let sets = (0..count)
            .map(|_| (0..m).filter(|_| rng.gen_bool(0.5)).collect())
            .collect();
        IdealSpec::from_maximal(m, sets)?
    } else {
        IdealSpec::from_graph(m, random_graph(rng, m))?
    };
    let p = random_p(rng, n);
    let params = json!({"ideal": ideal_json(&ideal), "n": n, "p": rational::format(&p)});
    let v = capped("farr", farr_all(&ideal, n, &p))?;
    Ok((params, vec![v]))
}

/// Random graphs, urn counts and `p`; every size pattern of `(I, J, K)` is
/// checked. A violation would refute the conjecture and is only reported.
pub fn farr_search(seed: u64, budget: usize) -> Result<SearchReport> {
    SearchReport::run("farr", seed, budget, |rng| farr_instance(rng, false))
}

/// As [`farr_search`] but with random decreasing families given by up to
/// four maximal sets, where counterexamples are known to exist in general.
pub fn ideal_search(seed: u64, budget: usize) -> Result<SearchReport> {
    SearchReport::run("ideal", seed, budget, |rng| farr_instance(rng, true))
}

/// Sizes and effort for [`qcna_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchCaps {
    pub max_m: usize,
    pub max_n: usize,
    pub max_weight: i64,
    /// Random fields tried per measure by the R+ falsifier.
    pub field_samples: usize,
    pub na: NaCaps,
}

impl Default for SearchCaps {
    fn default() -> Self {
        SearchCaps {
            max_m: 5,
            max_n: 4,
            max_weight: 8,
            field_samples: 16,
            na: NaCaps::default(),
        }
    }
}

fn random_cuts(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    let mut inner: Vec<usize> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=m)).collect();
    inner.sort_unstable();
    inner.dedup();
    let mut cuts = vec![0];
    cuts.extend(inner);
    cuts.push(m + 1);
    cuts
}

const QCNA_NOTE: &str = "rows are not i.i.d.; a CNA violation answers the generalized-urn question negatively";
const RPLUS_NOTE: &str = "CNA fails while R+ was not falsified: candidate against 'R+ implies CNA'";

/// Samples small models (a quarter of them with i.i.d. rows), builds a
/// threshold or interval urn measure, and runs the CNA checker and, on
/// threshold measures, the R+ falsifier.
pub fn qcna_search(seed: u64, budget: usize, caps: &SearchCaps) -> Result<SearchReport> {
    SearchReport::run("qcna", seed, budget, |rng| {
        let iid = rng.gen_ratio(1, 4);
        let m = rng.gen_range(1..=caps.max_m.max(1));
        let n = rng.gen_range(2..=caps.max_n.max(2));
        let model = random_model(rng, m, n, iid, caps.max_weight);
        // Interval measures stay on at most three urns to keep CNA exhaustive.
        let (spec_json, binning) = if n <= 3 && rng.gen_bool(0.4) {
            let spec = IntervalSpec::new(m, (0..n).map(|_| random_cuts(rng, m)).collect())?;
            (json!({"intervals": spec.to_map()}), spec.binning())
        } else {
            let spec = ThresholdSpec::new(m, (0..n).map(|_| rng.gen_range(1..=m)).collect())?;
            (json!({"thresholds": spec.thresholds()}), spec.binning())
        };
        let mu = interval_urn_measure(&model, &binning)?;
        let mut cna = check_cna(&mu, &caps.na);
        cna.property = "cna".into();
        if !iid && cna.is_violated() {
            cna = cna.note(QCNA_NOTE);
        }
        let mut verdicts = vec![cna];
        if mu.space().is_binary() {
            let field_seed = rng.gen();
            let r_plus = capped("r_plus", falsify_fields(&mu, FieldMode::RPlus, caps.field_samples, field_seed))?;
            if verdicts[0].is_violated() && !r_plus.is_violated() {
                verdicts[0] = verdicts[0].clone().note(RPLUS_NOTE);
            }
            verdicts.push(r_plus);
        }
        let params = json!({"model": model.to_file(), "iid": iid, "measure": spec_json});
        Ok((params, verdicts))
    })
}

fn parse_field(witness: &Value) -> Result<FieldVector> {
    let entries = witness["field"]
        .as_array()
        .ok_or_else(|| Error::Parse("witness has no field".into()))?;
    entries
        .iter()
        .map(|e| rational::parse(e.as_str().unwrap_or_default()))
        .collect::<Result<Vec<_>>>()
        .map(FieldVector)
}

/// Re-derives a Rayleigh violation: the witness field applied to `μ` must
/// give a measure that fails plain NC.
pub fn recheck_rayleigh(model: &UrnModel, witness: &Value) -> Result<Verdict> {
    let spec = ThresholdSpec::new(model.m(), vec![1; model.n()])?;
    let mu = interval_urn_measure(model, &spec.binning())?;
    let tilted = mu.external_field(&parse_field(witness)?)?;
    let mut v = check_nc(&tilted);
    v.property = "rayleigh_recheck".into();
    Ok(v)
}

/// Ordinary urn measures (i.i.d. rows, every threshold `1`) run through the
/// Rayleigh falsifier; each violation is rechecked by exact NC.
pub fn rayleigh_search(seed: u64, budget: usize, field_samples: usize) -> Result<SearchReport> {
    SearchReport::run("rayleigh", seed, budget, |rng| {
        let m = rng.gen_range(2..=6);
        let n = rng.gen_range(3..=4);
        let model = random_model(rng, m, n, true, 6);
        let spec = ThresholdSpec::new(m, vec![1; n])?;
        let mu = interval_urn_measure(&model, &spec.binning())?;
        let field_seed = rng.gen();
        let v = falsify_fields(&mu, FieldMode::Rayleigh, field_samples, field_seed)?;
        let mut verdicts = vec![];
        if let Some(w) = v.witness.as_ref().filter(|_| v.is_violated()) {
            verdicts.push(recheck_rayleigh(&model, w)?);
        }
        verdicts.insert(0, v);
        Ok((json!({"model": model.to_file()}), verdicts))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_seed_deterministic() {
        let a = farr_search(5, 12).unwrap();
        let b = farr_search(5, 12).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_ne!(a, farr_search(6, 12).unwrap());
        let caps = SearchCaps {
            max_m: 3,
            max_n: 3,
            ..SearchCaps::default()
        };
        let a = qcna_search(1, 8, &caps).unwrap();
        assert_eq!(a, qcna_search(1, 8, &caps).unwrap());
    }

    #[test]
    fn farr_search_finds_nothing_small() {
        let r = farr_search(11, 40).unwrap();
        assert!(r.aggregate["farr"].is_holds(), "{:?}", r.aggregate["farr"]);
        assert_eq!(r.violations("farr").count(), 0);
    }

    #[test]
    fn iid_samples_never_violate_cna() {
        let r = qcna_search(3, 60, &SearchCaps::default()).unwrap();
        for inst in &r.instances {
            if inst.params["iid"] == json!(true) {
                assert!(!inst.verdict("cna").unwrap().is_violated(), "{}", inst.params);
            }
        }
        assert!(r.instances.iter().any(|i| i.params["iid"] == json!(true)));
    }

    #[test]
    fn r_plus_holds_without_thresholds() {
        // Thresholds all 1 on generalized rows: R+ coincides with CNC there.
        let r = qcna_search(4, 40, &SearchCaps::default()).unwrap();
        for inst in &r.instances {
            let t = &inst.params["measure"]["thresholds"];
            if t.as_array().is_some_and(|t| t.iter().all(|x| x == 1)) {
                assert!(!inst.verdict("r_plus").unwrap().is_violated(), "{}", inst.params);
            }
        }
    }

    #[test]
    fn frozen_rayleigh_witness() {
        // Found by `rayleigh_search(1, 400, 64)`: two identical balls with
        // weights (2, 5, 20) and the field (3/8, 7/6, 1/8).
        let model = UrnModel::from_ints(&[vec![2, 5, 20], vec![2, 5, 20]]).unwrap();
        let field = ["3/8", "7/6", "1/8"];
        let v = recheck_rayleigh(&model, &json!({ "field": field })).unwrap();
        assert!(v.is_violated());
        // Recount by hand: occupancy indicators of both balls, tilted by W.
        let w: Vec<Rational> = field.iter().map(|f| rational::parse(f).unwrap()).collect();
        let g = [2i64, 5, 20];
        let (mut total, mut x0, mut x1, mut both) = (rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1));
        for a in 0..3 {
            for b in 0..3 {
                let occ: Vec<bool> = (0..3).map(|j| a == j || b == j).collect();
                let mut p = rat(g[a] * g[b], 1);
                for j in 0..3 {
                    if occ[j] {
                        p *= &w[j];
                    }
                }
                total += &p;
                if occ[0] {
                    x0 += &p;
                }
                if occ[1] {
                    x1 += &p;
                }
                if occ[0] && occ[1] {
                    both += &p;
                }
            }
        }
        let joint = &both / &total;
        let product = (&x0 / &total) * (&x1 / &total);
        assert_eq!(joint, rat(105, 1468));
        assert_eq!(product, rat(16905, 269378));
        assert!(joint > product);
    }

    #[test]
    fn rayleigh_search_rechecks_its_witnesses() {
        let r = rayleigh_search(1, 12, 8).unwrap();
        for inst in r.violations("rayleigh") {
            assert!(inst.verdict("rayleigh_recheck").unwrap().is_violated());
        }
    }
}

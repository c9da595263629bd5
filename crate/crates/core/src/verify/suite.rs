use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::dr26::verify_dr26;
use super::interval::verify_interval_cna;
use super::lattice::{verify_nlcf, verify_propcvx_cornlc};
use super::mainthm::{verify_mainthm_a, verify_mainthm_b_all};
use super::mukl::{verify_mukl_all, MuklVariant};
use crate::error::{Error, Result};
use crate::measure::NaCaps;
use crate::urn::random::random_model;
use crate::urn::{IncreasingFamily, IntervalSpec, ModelFile, UrnModel, Windows};
use crate::verdict::Verdict;

/// The inequalities a suite can sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    MainthmA,
    MainthmB,
    MuklPrime,
    MuklDoublePrime,
    MuklTriplePrime,
    PropcvxCornlc,
    Nlcf,
    Dr26,
    IntervalCna,
}

impl Theorem {
    pub const ALL: [Theorem; 9] = [
        Theorem::MainthmA,
        Theorem::MainthmB,
        Theorem::MuklPrime,
        Theorem::MuklDoublePrime,
        Theorem::MuklTriplePrime,
        Theorem::PropcvxCornlc,
        Theorem::Nlcf,
        Theorem::Dr26,
        Theorem::IntervalCna,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Theorem::MainthmA => "mainthm-a",
            Theorem::MainthmB => "mainthm-b",
            Theorem::MuklPrime => "mukl-prime",
            Theorem::MuklDoublePrime => "mukl-double-prime",
            Theorem::MuklTriplePrime => "mukl-triple-prime",
            Theorem::PropcvxCornlc => "propcvx-cornlc",
            Theorem::Nlcf => "nlcf",
            Theorem::Dr26 => "dr26",
            Theorem::IntervalCna => "interval-cna",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        Theorem::ALL
            .into_iter()
            .find(|t| t.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown theorem {s:?}")))
    }
}

/// Seeded generator of suite instances. Instance `k` draws from its own
/// ChaCha stream, so results do not depend on scheduling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub count: usize,
    pub max_m: usize,
    pub max_n: usize,
    pub max_weight: i64,
    pub iid: bool,
}

impl GeneratorSpec {
    /// Sizes where the sweep of `theorem` is exhaustive and fast.
    pub fn default_for(theorem: Theorem, seed: u64, count: usize) -> Self {
        let (max_m, max_n, iid) = match theorem {
            Theorem::MainthmA
            | Theorem::MainthmB
            | Theorem::MuklPrime
            | Theorem::MuklDoublePrime
            | Theorem::MuklTriplePrime => (5, 4, false),
            Theorem::PropcvxCornlc | Theorem::Nlcf => (5, 3, false),
            Theorem::Dr26 => (4, 4, false),
            Theorem::IntervalCna => (4, 3, true),
        };
        GeneratorSpec {
            seed,
            count,
            max_m,
            max_n,
            max_weight: 8,
            iid,
        }
    }

    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        rng
    }

    /// The model of instance `index`; it is the first draw from the stream,
    /// so suites with the same spec share their models.
    pub fn model(&self, index: usize) -> UrnModel {
        draw_model(self, &mut self.rng(index))
    }
}

fn draw_model(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> UrnModel {
    let m = rng.gen_range(1..=spec.max_m.max(1));
    let n = rng.gen_range(2..=spec.max_n.max(2));
    random_model(rng, m, n, spec.iid, spec.max_weight)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub index: usize,
    pub model: ModelFile,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
    pub verdict: Verdict,
}

/// Report of a seeded sweep. Wall-clock timing is kept out unless asked for,
/// so that reports for the same spec are byte-identical.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremSuite {
    pub theorem: Theorem,
    pub generator: GeneratorSpec,
    pub instances: Vec<InstanceReport>,
    pub aggregate: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u64>,
}

impl TheoremSuite {
    pub fn run(theorem: Theorem, generator: GeneratorSpec) -> Result<Self> {
        let instances = (0..generator.count)
            .into_par_iter()
            .map(|index| run_instance(theorem, &generator, index))
            .collect::<Result<Vec<_>>>()?;
        let aggregate = Verdict::aggregate(theorem.name(), instances.iter().map(|r| r.verdict.clone()));
        Ok(TheoremSuite {
            theorem,
            generator,
            instances,
            aggregate,
            timing_ms: None,
        })
    }

    /// Number of instances per status: (holds, violated, inconclusive).
    pub fn counts(&self) -> (usize, usize, usize) {
        let c = |f: fn(&Verdict) -> bool| self.instances.iter().filter(|r| f(&r.verdict)).count();
        (c(Verdict::is_holds), c(Verdict::is_violated), c(Verdict::is_inconclusive))
    }
}

fn random_windows(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Windows {
    let mut windows = Windows::new();
    while windows.is_empty() {
        for j in 0..n {
            if rng.gen_bool(0.5) {
                let lo = rng.gen_range(0..=m);
                windows.insert(j, (lo, rng.gen_range(lo..=m)));
            }
        }
    }
    windows
}

fn random_cuts(rng: &mut ChaCha8Rng, m: usize) -> Vec<usize> {
    // At most three cells.
    let mut inner: Vec<usize> = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(1..=m)).collect();
    inner.sort_unstable();
    inner.dedup();
    let mut cuts = vec![0];
    cuts.extend(inner);
    cuts.push(m + 1);
    cuts
}

fn run_instance(theorem: Theorem, spec: &GeneratorSpec, index: usize) -> Result<InstanceReport> {
    let mut rng = spec.rng(index);
    let model = draw_model(spec, &mut rng);
    let (m, n) = (model.m(), model.n());
    let (params, result) = match theorem {
        Theorem::MainthmA => (Value::Null, verify_mainthm_a(&model)),
        Theorem::MainthmB => (Value::Null, verify_mainthm_b_all(&model)),
        Theorem::MuklPrime => (Value::Null, verify_mukl_all(&model, MuklVariant::Prime)),
        Theorem::MuklDoublePrime => (Value::Null, verify_mukl_all(&model, MuklVariant::DoublePrime)),
        Theorem::MuklTriplePrime => (Value::Null, verify_mukl_all(&model, MuklVariant::TriplePrime)),
        Theorem::PropcvxCornlc => {
            let f: Vec<usize> = (0..n).map(|_| rng.gen_range(0..=m)).collect();
            (json!({"f": f}), verify_propcvx_cornlc(&model, &f))
        }
        Theorem::Nlcf => {
            let windows = random_windows(&mut rng, m, n);
            (json!({"windows": windows}), verify_nlcf(&model, &windows))
        }
        Theorem::Dr26 => {
            let gens: Vec<u64> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..1u64 << m)).collect();
            let family = IncreasingFamily::new(m, gens)?;
            (json!({"family": family.minimal_sets()}), verify_dr26(&model, &family))
        }
        Theorem::IntervalCna => {
            let spec = IntervalSpec::new(m, (0..n).map(|_| random_cuts(&mut rng, m)).collect())?;
            (
                json!({"intervals": spec.to_map()}),
                verify_interval_cna(&model, &spec, &NaCaps::default()),
            )
        }
    };
    let verdict = match result {
        Ok(v) => v,
        Err(e) => Verdict::from_cap(theorem.name(), e)?,
    };
    Ok(InstanceReport {
        index,
        model: model.to_file(),
        params,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for t in Theorem::ALL {
            assert_eq!(t.name().parse::<Theorem>().unwrap(), t);
            let json = serde_json::to_string(&t).unwrap();
            assert_eq!(json, format!("\"{}\"", t.name()));
        }
        assert_eq!("MAINTHM_B".parse::<Theorem>().unwrap(), Theorem::MainthmB);
    }

    #[test]
    fn suites_are_seed_deterministic() {
        let spec = GeneratorSpec {
            count: 6,
            ..GeneratorSpec::default_for(Theorem::MainthmB, 17, 6)
        };
        let a = TheoremSuite::run(Theorem::MainthmB, spec.clone()).unwrap();
        let b = TheoremSuite::run(Theorem::MainthmB, spec.clone()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert!(!serde_json::to_string(&a).unwrap().contains("timing"));
        assert_eq!(a.instances[3].model, spec.model(3).to_file());
    }

    #[test]
    fn every_theorem_runs() {
        for t in Theorem::ALL {
            let spec = GeneratorSpec {
                max_m: 3,
                max_n: 3,
                ..GeneratorSpec::default_for(t, 1, 4)
            };
            let suite = TheoremSuite::run(t, spec).unwrap();
            assert_eq!(suite.instances.len(), 4);
            assert!(suite.aggregate.is_holds(), "{t}: {:?}", suite.aggregate);
            assert_eq!(suite.counts(), (4, 0, 0));
        }
    }

    #[test]
    fn aggregate_follows_instances() {
        let spec = GeneratorSpec::default_for(Theorem::Dr26, 2, 3);
        let mut suite = TheoremSuite::run(Theorem::Dr26, spec).unwrap();
        suite.instances[1].verdict = Verdict::inconclusive("dr26", "cap");
        let agg = Verdict::aggregate("dr26", suite.instances.iter().map(|r| r.verdict.clone()));
        assert!(agg.is_inconclusive());
    }
}

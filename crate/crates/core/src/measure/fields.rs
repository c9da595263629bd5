//! Falsification of the field-stable properties (Rayleigh, NA+, R+) by
//! applying grid and seeded random external fields.
//!
//! A run that finds nothing is reported as inconclusive: quantifying over
//! every field is not attempted.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::correlation::{check_na, check_nc, NaCaps};
use super::finite::{FieldVector, FiniteMeasure};
use crate::error::{Error, Result};
use crate::rational::{self, rat, Rational};
use crate::verdict::{Status, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldMode {
    /// NC under every field.
    Rayleigh,
    /// NA under every field.
    NaPlus,
    /// NC under fields with `W_i ∈ {0} ∪ [1, ∞)`.
    RPlus,
}

impl FieldMode {
    pub fn name(self) -> &'static str {
        match self {
            FieldMode::Rayleigh => "rayleigh",
            FieldMode::NaPlus => "na_plus",
            FieldMode::RPlus => "r_plus",
        }
    }

    fn grid(self) -> Vec<Rational> {
        match self {
            FieldMode::RPlus => vec![rat(1, 1), rat(0, 1), rat(2, 1), rat(4, 1)],
            _ => vec![rat(1, 1), rat(0, 1), rat(1, 2), rat(2, 1)],
        }
    }

    fn sample(self, rng: &mut ChaCha8Rng) -> Rational {
        if rng.gen_ratio(1, 8) {
            return rat(0, 1);
        }
        let p: i64 = rng.gen_range(1..=8);
        let q: i64 = rng.gen_range(1..=8);
        match self {
            FieldMode::RPlus => rat(1, 1) + rat(p - 1, q),
            _ => rat(p, q),
        }
    }
}

impl std::str::FromStr for FieldMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rayleigh" | "nc_plus" => Ok(FieldMode::Rayleigh),
            "na_plus" => Ok(FieldMode::NaPlus),
            "r_plus" => Ok(FieldMode::RPlus),
            other => Err(Error::Parse(format!("unknown field mode {other:?}"))),
        }
    }
}

/// Largest number of grid vectors tried before random sampling starts.
pub const GRID_LIMIT: usize = 4096;

/// Runs the mode's checker on `W∘μ` for grid fields (starting with `W ≡ 1`)
/// followed by `samples` seeded random fields.
pub fn falsify_fields(mu: &FiniteMeasure, mode: FieldMode, samples: usize, seed: u64) -> Result<Verdict> {
    if !mu.space().is_binary() {
        return Err(Error::invalid("external fields need {0,1}-valued coordinates"));
    }
    let d = mu.dims();
    let grid = mode.grid();
    let mut fields: Vec<FieldVector> = Vec::new();
    let mut digits = vec![0usize; d];
    'grid: while fields.len() < GRID_LIMIT {
        fields.push(FieldVector(digits.iter().map(|&g| grid[g].clone()).collect()));
        let mut i = 0;
        loop {
            if i == d {
                break 'grid;
            }
            digits[i] += 1;
            if digits[i] < grid.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        fields.push(FieldVector((0..d).map(|_| mode.sample(&mut rng)).collect()));
    }

    let caps = NaCaps::default();
    let property = mode.name();
    let mut trials = 0u64;
    let mut killed = 0u64;
    let mut capped = 0u64;
    for w in &fields {
        debug_assert!(mode != FieldMode::RPlus || w.is_r_plus());
        let tilted = match mu.external_field(w) {
            Ok(m) => m,
            Err(Error::ZeroProbability(_)) => {
                killed += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        trials += 1;
        let v = match mode {
            FieldMode::Rayleigh | FieldMode::RPlus => check_nc(&tilted),
            FieldMode::NaPlus => check_na(&tilted, &caps),
        };
        match v.status {
            Status::Violated => {
                let field: Vec<String> = w.0.iter().map(rational::format).collect();
                return Ok(Verdict::violated(
                    property,
                    json!({"field": field, "inner": v.witness}),
                )
                .with_counts(trials, killed));
            }
            Status::Inconclusive => capped += 1,
            Status::Holds => {}
        }
    }
    let mut out = Verdict::inconclusive(property, format!("no violation found in {trials} trials"))
        .with_counts(trials, killed);
    if capped > 0 {
        out = out.note(format!("{capped} trials hit enumeration caps"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::space::ChainProductSpace;
    use crate::rational::int;

    #[test]
    fn product_measure_survives_every_mode() {
        let mu = FiniteMeasure::product(&[
            vec![rat(1, 3), rat(2, 3)],
            vec![rat(1, 2), rat(1, 2)],
            vec![rat(3, 4), rat(1, 4)],
        ])
        .unwrap();
        for mode in [FieldMode::Rayleigh, FieldMode::NaPlus, FieldMode::RPlus] {
            let v = falsify_fields(&mu, mode, 20, 7).unwrap();
            assert!(v.is_inconclusive(), "{mode:?}");
            assert!(v.notes[0].starts_with("no violation found in"));
        }
    }

    #[test]
    fn diagonal_fails_at_unit_field() {
        let mu = FiniteMeasure::new(
            ChainProductSpace::binary(2),
            vec![rat(1, 2), int(0), int(0), rat(1, 2)],
        )
        .unwrap();
        let v = falsify_fields(&mu, FieldMode::Rayleigh, 0, 1).unwrap();
        assert!(v.is_violated());
        assert_eq!(v.witness.unwrap()["field"], json!(["1/1", "1/1"]));
    }

    #[test]
    fn seeded_runs_repeat() {
        let mu = FiniteMeasure::uniform(ChainProductSpace::binary(3));
        let a = falsify_fields(&mu, FieldMode::RPlus, 50, 99).unwrap();
        let b = falsify_fields(&mu, FieldMode::RPlus, 50, 99).unwrap();
        assert_eq!(a, b);
    }
}

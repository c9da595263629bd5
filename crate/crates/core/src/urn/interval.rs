use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::UrnModel;
use super::occupancy::{occupancy_table, OccupancySpec};
use crate::error::{Error, Result};
use crate::measure::{ChainProductSpace, FiniteMeasure};

/// Per-urn cut sequences `0 = a_0 < a_1 < … < a_k = m + 1`; `X_j = t` iff
/// `a_t <= B_j < a_{t+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSpec {
    m: usize,
    cuts: Vec<Vec<usize>>,
}

impl IntervalSpec {
    pub fn new(m: usize, cuts: Vec<Vec<usize>>) -> Result<Self> {
        for (j, c) in cuts.iter().enumerate() {
            if c.len() < 2 || c[0] != 0 || *c.last().unwrap() != m + 1 {
                return Err(Error::invalid(format!(
                    "cuts for urn {j} must start at 0 and end at m + 1 = {}",
                    m + 1
                )));
            }
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(format!("cuts for urn {j} must strictly increase")));
            }
        }
        Ok(IntervalSpec { m, cuts })
    }

    /// Cuts `0, 1, …, m+1` on every urn: `X_j = B_j`.
    pub fn identity(m: usize, n: usize) -> Self {
        IntervalSpec {
            m,
            cuts: vec![(0..=m + 1).collect(); n],
        }
    }

    /// Builds a spec from the JSON form keyed by urn index; every urn must appear.
    pub fn from_map(m: usize, n: usize, map: &BTreeMap<String, Vec<usize>>) -> Result<Self> {
        let mut cuts = vec![None; n];
        for (key, c) in map {
            let j: usize = key
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad urn key {key:?}")))?;
            if j >= n {
                return Err(Error::dim(format!("urn {j} out of range")));
            }
            cuts[j] = Some(c.clone());
        }
        let cuts = cuts
            .into_iter()
            .enumerate()
            .map(|(j, c)| c.ok_or_else(|| Error::invalid(format!("no cuts given for urn {j}"))))
            .collect::<Result<Vec<_>>>()?;
        IntervalSpec::new(m, cuts)
    }

    pub fn cuts(&self) -> &[Vec<usize>] {
        &self.cuts
    }

    /// Number of cells `k_j` per urn.
    pub fn cells(&self) -> Vec<usize> {
        self.cuts.iter().map(|c| c.len() - 1).collect()
    }

    pub fn to_map(&self) -> BTreeMap<String, Vec<usize>> {
        self.cuts
            .iter()
            .enumerate()
            .map(|(j, c)| (j.to_string(), c.clone()))
            .collect()
    }

    pub fn binning(&self) -> Binning {
        Binning {
            m: self.m,
            thresholds: self.cuts.iter().map(|c| c[1..c.len() - 1].to_vec()).collect(),
        }
    }
}

/// One threshold per urn; `X_j = 1{B_j >= t_j}`. Thresholds `0` and `m + 1`
/// give constant coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    m: usize,
    thresholds: Vec<usize>,
}

impl ThresholdSpec {
    pub fn new(m: usize, thresholds: Vec<usize>) -> Result<Self> {
        if let Some(t) = thresholds.iter().find(|&&t| t > m + 1) {
            return Err(Error::invalid(format!("threshold {t} exceeds m + 1 = {}", m + 1)));
        }
        Ok(ThresholdSpec { m, thresholds })
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    pub fn binning(&self) -> Binning {
        Binning {
            m: self.m,
            thresholds: self.thresholds.iter().map(|&t| vec![t]).collect(),
        }
    }
}

/// Level of urn `j` is the number of its thresholds that `B_j` reaches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Binning {
    m: usize,
    thresholds: Vec<Vec<usize>>,
}

impl Binning {
    pub fn level(&self, j: usize, count: usize) -> usize {
        self.thresholds[j].iter().filter(|&&t| count >= t).count()
    }

    pub fn space(&self) -> ChainProductSpace {
        ChainProductSpace::new(self.thresholds.iter().map(|t| t.len() + 1).collect())
            .expect("binning space is small")
    }

    pub fn urns(&self) -> usize {
        self.thresholds.len()
    }

    /// Largest count the binning distinguishes on urn `j`.
    pub fn cap(&self, j: usize) -> usize {
        self.thresholds[j].iter().copied().max().unwrap_or(0).min(self.m)
    }
}

/// Law of the levels `(X_1 … X_n)`.
pub fn interval_urn_measure(model: &UrnModel, binning: &Binning) -> Result<FiniteMeasure> {
    if binning.urns() != model.n() {
        return Err(Error::dim(format!(
            "binning covers {} urns, model has {}",
            binning.urns(),
            model.n()
        )));
    }
    if binning.m != model.m() {
        return Err(Error::dim(format!(
            "binning built for m = {}, model has m = {}",
            binning.m,
            model.m()
        )));
    }
    let spec = OccupancySpec::new(
        (0..model.n()).map(|j| vec![j]).collect(),
        (0..model.n()).map(|j| binning.cap(j)).collect(),
    )?;
    let table = occupancy_table(model, &spec)?;
    let target = binning.space();
    let occ = table.to_measure()?;
    occ.pushforward(target, |b| {
        b.iter().enumerate().map(|(j, &c)| binning.level(j, c)).collect()
    })
}

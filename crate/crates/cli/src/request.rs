//! Self-contained descriptions of runs. Every input is stored inline, so a
//! report's `request` is enough to replay it.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use urnlab_core::conjectures::{
    check_nmp_question, farr_check, farr_probabilities, farr_search, ideal_search, qcna_search, qq_check,
    rayleigh_search, welsh_asymptotics, welsh_record, welsh_scan, welsh_verdict, CellBlock, IdealSpec, SearchCaps,
    SearchReport, WELSH_FIRST_S,
};
use urnlab_core::measure::{
    check_app, check_capp, check_cna, check_cnc, check_na, check_nc, check_normalized_matching, falsify_fields,
    stochastic_dominance, ChainProductSpace, FieldMode, FiniteMeasure, MeasureFile, NaCaps,
};
use urnlab_core::orient::{
    count_gmaps, count_matchings, count_orientations, multigraphs, out_degree_distribution, partition_counts,
    verify_glemma, verify_gmap_ulc, verify_gphcor, verify_hyplemma, verify_hyplemma_exhaustive,
    verify_matching_ulc, verify_matching_ulc_exhaustive, BipartiteSystem, CoverHypergraph, DegreeDemand, DemandEdge,
    GraphFile,
};
use urnlab_core::rational::{self, Exact};
use urnlab_core::urn::{
    conditional_xy_law, interval_urn_measure, occupancy_law, oracle_pushforward, Assignment, Binning,
    ConditioningEvent, IncreasingFamily, IntervalSpec, ModelFile, OccupancySpec, ThresholdSpec, UrnModel, Windows,
};
use urnlab_core::verify::{
    verify_dr26, verify_interval_cna, verify_mainthm_a, verify_mainthm_b, verify_mainthm_b_all, verify_mukl_all,
    verify_nlcf, verify_propcvx_cornlc, GeneratorSpec, MuklVariant, Theorem, TheoremSuite,
};
use urnlab_core::Verdict;

use crate::output::{approx, combined_code, status_name, usage, verdict_code, Failure, Output, Run, Table, EXIT_OK};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Request {
    Law(LawRequest),
    Measure(MeasureRequest),
    Check(CheckRequest),
    Verify(VerifyRequest),
    Orient(OrientRequest),
    Conjecture(ConjectureRequest),
    Search(SearchRequest),
}

impl Request {
    pub fn run(&self) -> Run<Output> {
        let (result, table, code) = match self {
            Request::Law(r) => r.run()?,
            Request::Measure(r) => r.run()?,
            Request::Check(r) => r.run()?,
            Request::Verify(r) => r.run()?,
            Request::Orient(r) => r.run()?,
            Request::Conjecture(r) => r.run()?,
            Request::Search(r) => r.run()?,
        };
        let json = json!({"request": self, "result": result});
        Ok(Output { json, table, code })
    }
}

type Ran = (Value, Table, u8);

/// Windows as `[urn, lo, hi]` triples: integer map keys do not survive the
/// tagged request enums.
mod window_list {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use urnlab_core::urn::Windows;

    pub fn serialize<S: Serializer>(w: &Windows, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[usize; 3]> = w.iter().map(|(&j, &(lo, hi))| [j, lo, hi]).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Windows, D::Error> {
        let v = Vec::<[usize; 3]>::deserialize(d)?;
        Ok(v.into_iter().map(|[j, lo, hi]| (j, (lo, hi))).collect())
    }
}

fn to_value(x: &impl Serialize) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn measure_table(mu: &FiniteMeasure) -> Table {
    let mut t = Table::new(&["outcome", "mass", "mass_approx"]);
    for (x, p) in mu.iter() {
        if p.numer() != &0.into() {
            let key: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            t.push(vec![key.join(","), rational::format(p), approx(p)]);
        }
    }
    t
}

fn single(name: &str, v: &Verdict) -> Ran {
    (to_value(v), Table::verdicts([(name.to_string(), v)]), verdict_code(v))
}

fn oracle_mismatch(what: &str) -> Failure {
    Failure::OracleMismatch(format!("{what}: DP and brute-force enumeration disagree"))
}

/// Brute-force occupancy law against the DP.
fn oracle_occupancy(model: &UrnModel) -> Run<()> {
    let (m, n) = (model.m(), model.n());
    let dp = occupancy_law(model, &OccupancySpec::per_urn(model))?;
    let brute = oracle_pushforward(model, ChainProductSpace::new(vec![m + 1; n])?, |s| {
        Assignment(s.to_vec()).occupancy(n)
    })?;
    if dp != brute {
        return Err(oracle_mismatch("occupancy law"));
    }
    Ok(())
}

// ---- law ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    /// Joint law of all occupancy counts.
    Occupancy,
    /// Joint law of `X = |σ⁻¹(I)|`, `Y = |σ⁻¹(J)|` given the windows on the other urns.
    Xy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawRequest {
    pub model: ModelFile,
    pub kind: LawKind,
    #[serde(default)]
    pub i: Vec<usize>,
    #[serde(default)]
    pub j: Vec<usize>,
    #[serde(default, with = "window_list")]
    pub windows: Windows,
    #[serde(default)]
    pub oracle: bool,
}

impl LawRequest {
    fn run(&self) -> Run<Ran> {
        let model = self.model.model()?;
        match self.kind {
            LawKind::Occupancy => {
                if self.oracle {
                    oracle_occupancy(&model)?;
                }
                let mu = occupancy_law(&model, &OccupancySpec::per_urn(&model))?;
                Ok((to_value(&mu.to_file()), measure_table(&mu), EXIT_OK))
            }
            LawKind::Xy => {
                let q = ConditioningEvent::new(&model, self.windows.clone())?;
                let law = conditional_xy_law(&model, &q, &self.i, &self.j)?;
                if self.oracle {
                    let (m, n) = (model.m(), model.n());
                    let joint = oracle_pushforward(&model, ChainProductSpace::new(vec![m + 1, m + 1, 2])?, |s| {
                        let a = Assignment(s.to_vec());
                        vec![a.count_in(&self.i), a.count_in(&self.j), q.contains(&a.occupancy(n)) as usize]
                    })?;
                    let brute = joint.condition(&[None, None, Some(1)])?.marginal(&[0, 1])?;
                    let same = (0..=m).all(|x| (0..=m).all(|y| brute.prob(&[x, y]) == law.prob(x, y)));
                    if !same {
                        return Err(oracle_mismatch("conditional XY law"));
                    }
                }
                let mut t = Table::new(&["x", "y", "mass", "mass_approx"]);
                for x in 0..law.x_values() {
                    for y in 0..law.y_values() {
                        let p = law.prob(x, y);
                        t.push(vec![x.to_string(), y.to_string(), rational::format(&p), approx(&p)]);
                    }
                }
                Ok((to_value(&law.to_file()), t, EXIT_OK))
            }
        }
    }
}

// ---- measure ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureRequest {
    pub model: ModelFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub oracle: bool,
}

/// Flags win over the binning stored in the model file.
pub fn binning(
    file: &ModelFile,
    thresholds: &Option<Vec<usize>>,
    intervals: &Option<Vec<Vec<usize>>>,
) -> Run<Option<Binning>> {
    let m = file.m;
    Ok(if let Some(cuts) = intervals {
        Some(IntervalSpec::new(m, cuts.clone())?.binning())
    } else if let Some(t) = thresholds {
        Some(ThresholdSpec::new(m, t.clone())?.binning())
    } else if let Some(map) = &file.intervals {
        Some(IntervalSpec::from_map(m, file.n, map)?.binning())
    } else if let Some(t) = &file.thresholds {
        Some(ThresholdSpec::new(m, t.clone())?.binning())
    } else {
        None
    })
}

pub fn build_measure(model: &UrnModel, binning: &Binning, oracle: bool) -> Run<FiniteMeasure> {
    let mu = interval_urn_measure(model, binning)?;
    if oracle {
        let n = model.n();
        let brute = oracle_pushforward(model, binning.space(), |s| {
            let occ = Assignment(s.to_vec()).occupancy(n);
            (0..n).map(|j| binning.level(j, occ[j])).collect()
        })?;
        if brute != mu {
            return Err(oracle_mismatch("interval urn measure"));
        }
    }
    Ok(mu)
}

impl MeasureRequest {
    fn run(&self) -> Run<Ran> {
        let model = self.model.model()?;
        let Some(b) = binning(&self.model, &self.thresholds, &self.intervals)? else {
            return usage("measure needs --thresholds or --intervals (or a model file that has them)");
        };
        let mu = build_measure(&model, &b, self.oracle)?;
        Ok((to_value(&mu.to_file()), measure_table(&mu), EXIT_OK))
    }
}

// ---- check ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum CheckProperty {
    Nc,
    Cnc,
    Na,
    Cna,
    App,
    Capp,
    NormalizedMatching,
    /// The measure stochastically dominates `--other`.
    Dominates,
    Rayleigh,
    NaPlus,
    RPlus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRequest {
    pub measure: MeasureFile,
    pub property: CheckProperty,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<MeasureFile>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: usize,
    #[serde(default)]
    pub caps: NaCaps,
}

impl CheckRequest {
    fn run(&self) -> Run<Ran> {
        let mu = FiniteMeasure::from_file(&self.measure)?;
        let caps = self.caps;
        let v = match self.property {
            CheckProperty::Nc => check_nc(&mu),
            CheckProperty::Cnc => check_cnc(&mu),
            CheckProperty::Na => check_na(&mu, &caps),
            CheckProperty::Cna => check_cna(&mu, &caps),
            CheckProperty::App => check_app(&mu)?,
            CheckProperty::Capp => check_capp(&mu)?,
            CheckProperty::NormalizedMatching => check_normalized_matching(&mu)?,
            CheckProperty::Dominates => {
                let Some(other) = &self.other else {
                    return usage("dominates needs --other");
                };
                stochastic_dominance(&mu, &FiniteMeasure::from_file(other)?)?
            }
            CheckProperty::Rayleigh => falsify_fields(&mu, FieldMode::Rayleigh, self.samples, self.seed)?,
            CheckProperty::NaPlus => falsify_fields(&mu, FieldMode::NaPlus, self.samples, self.seed)?,
            CheckProperty::RPlus => falsify_fields(&mu, FieldMode::RPlus, self.samples, self.seed)?,
        };
        Ok(single("measure", &v))
    }
}

// ---- verify ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum VerifySource {
    Model {
        model: ModelFile,
        #[serde(default, with = "window_list")]
        windows: Windows,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        f: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        thresholds: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        intervals: Option<Vec<Vec<usize>>>,
    },
    Suite {
        generator: GeneratorSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRequest {
    pub theorem: Theorem,
    pub source: VerifySource,
    #[serde(default)]
    pub oracle: bool,
    #[serde(default)]
    pub caps: NaCaps,
}

fn mukl_variant(t: Theorem) -> Option<MuklVariant> {
    match t {
        Theorem::MuklPrime => Some(MuklVariant::Prime),
        Theorem::MuklDoublePrime => Some(MuklVariant::DoublePrime),
        Theorem::MuklTriplePrime => Some(MuklVariant::TriplePrime),
        _ => None,
    }
}

impl VerifyRequest {
    fn run(&self) -> Run<Ran> {
        match &self.source {
            VerifySource::Suite { generator } => {
                if self.oracle {
                    (0..generator.count)
                        .into_par_iter()
                        .try_for_each(|i| oracle_occupancy(&generator.model(i)))?;
                }
                let suite = TheoremSuite::run(self.theorem, generator.clone())?;
                let table = Table::verdicts(suite.instances.iter().map(|r| (r.index.to_string(), &r.verdict)));
                let code = verdict_code(&suite.aggregate);
                Ok((to_value(&suite), table, code))
            }
            VerifySource::Model {
                model: file,
                windows,
                f,
                family,
                thresholds,
                intervals,
            } => {
                let model = file.model()?;
                if self.oracle {
                    oracle_occupancy(&model)?;
                }
                let (m, n) = (model.m(), model.n());
                let v = match self.theorem {
                    Theorem::MainthmA => verify_mainthm_a(&model)?,
                    Theorem::MainthmB if windows.is_empty() => verify_mainthm_b_all(&model)?,
                    Theorem::MainthmB => {
                        if let Some(j) = windows.keys().find(|&&j| j + 1 >= n) {
                            return usage(format!("window on urn {j}; only urns 0..{} are conditioned", n - 1));
                        }
                        let w = |j: usize| windows.get(&j).copied().unwrap_or((0, m));
                        let a: Vec<usize> = (0..n - 1).map(|j| w(j).0).collect();
                        let b: Vec<usize> = (0..n - 1).map(|j| w(j).1).collect();
                        verify_mainthm_b(&model, &a, &b)?
                    }
                    t @ (Theorem::MuklPrime | Theorem::MuklDoublePrime | Theorem::MuklTriplePrime) => {
                        verify_mukl_all(&model, mukl_variant(t).expect("mukl theorem"))?
                    }
                    Theorem::PropcvxCornlc => {
                        let f = f.clone().unwrap_or_else(|| vec![m; n]);
                        verify_propcvx_cornlc(&model, &f)?
                    }
                    Theorem::Nlcf => {
                        if windows.is_empty() {
                            return usage("nlcf needs at least one --window");
                        }
                        verify_nlcf(&model, windows)?
                    }
                    Theorem::Dr26 => {
                        let Some(sets) = family else {
                            return usage("dr26 needs --family (minimal sets, e.g. \"0,1;2\")");
                        };
                        verify_dr26(&model, &IncreasingFamily::from_sets(m, sets)?)?
                    }
                    Theorem::IntervalCna => {
                        let Some(spec) = interval_spec(m, file, thresholds, intervals)? else {
                            return usage("interval-cna needs --thresholds or --intervals");
                        };
                        verify_interval_cna(&model, &spec, &self.caps)?
                    }
                };
                Ok(single(self.theorem.name(), &v))
            }
        }
    }
}

/// Like [`binning`], as an interval spec (a threshold becomes two intervals).
fn interval_spec(
    m: usize,
    file: &ModelFile,
    thresholds: &Option<Vec<usize>>,
    intervals: &Option<Vec<Vec<usize>>>,
) -> Run<Option<IntervalSpec>> {
    let from_thresholds = |t: &[usize]| -> Run<IntervalSpec> {
        let cuts = t
            .iter()
            .map(|&x| {
                if x == 0 || x > m {
                    vec![0, m + 1]
                } else {
                    vec![0, x, m + 1]
                }
            })
            .collect();
        Ok(IntervalSpec::new(m, cuts)?)
    };
    Ok(if let Some(c) = intervals {
        Some(IntervalSpec::new(m, c.clone())?)
    } else if let Some(t) = thresholds {
        Some(from_thresholds(t)?)
    } else if let Some(map) = &file.intervals {
        Some(IntervalSpec::from_map(m, file.n, map)?)
    } else if let Some(t) = &file.thresholds {
        Some(from_thresholds(t)?)
    } else {
        None
    })
}

// ---- orient ----

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemFile {
    pub left: usize,
    pub right: usize,
    pub edges: Vec<(usize, usize)>,
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypergraphFile {
    pub size: usize,
    pub h1: Vec<DemandEdge>,
    #[serde(default)]
    pub h2: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Exhaustive {
    /// Every multigraph with at most `size` edges.
    Glemma,
    /// Every multigraph with at most `size` edges.
    Gphcor,
    /// Every cover hypergraph on at most `size` points.
    Hyplemma,
    /// Every graph on `size` vertices.
    Matching,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum OrientRequest {
    Count { graph: GraphFile, a: Vec<usize>, b: Vec<usize> },
    Distribution { graph: GraphFile },
    Glemma { graph: GraphFile },
    Gphcor { graph: GraphFile },
    Matchings { graph: GraphFile },
    Gmap { system: SystemFile },
    Hyplemma { hypergraph: HypergraphFile },
    Exhaustive { property: Exhaustive, size: usize },
}

fn count_table(counts: &[u64]) -> Table {
    let mut t = Table::new(&["k", "count"]);
    for (k, c) in counts.iter().enumerate() {
        t.push(vec![k.to_string(), c.to_string()]);
    }
    t
}

fn counted(counts: Vec<u64>, v: Verdict) -> Ran {
    let code = verdict_code(&v);
    (json!({"counts": counts, "verdict": v}), count_table(&counts), code)
}

impl OrientRequest {
    fn run(&self) -> Run<Ran> {
        Ok(match self {
            OrientRequest::Count { graph, a, b } => {
                let g = graph.graph()?;
                let c = count_orientations(&g, &DegreeDemand::new(a.clone(), b.clone())?)?;
                let mut t = Table::new(&["count"]);
                t.push(vec![c.to_string()]);
                (json!({"count": c}), t, EXIT_OK)
            }
            OrientRequest::Distribution { graph } => {
                let g = graph.graph()?;
                let d = out_degree_distribution(&g)?;
                let radix = g.degrees();
                let mut header: Vec<String> = (0..g.vertices()).map(|v| format!("out_{v}")).collect();
                header.push("count".into());
                let mut t = Table { header, rows: Vec::new() };
                for (idx, &c) in d.iter().enumerate().filter(|(_, &c)| c > 0) {
                    let mut row = vec![String::new(); g.vertices() + 1];
                    let mut rest = idx;
                    for v in (0..g.vertices()).rev() {
                        row[v] = (rest % (radix[v] + 1)).to_string();
                        rest /= radix[v] + 1;
                    }
                    row[g.vertices()] = c.to_string();
                    t.push(row);
                }
                (json!({"degrees": radix, "counts": d}), t, EXIT_OK)
            }
            OrientRequest::Glemma { graph } => single("graph", &verify_glemma(&graph.graph()?)?),
            OrientRequest::Gphcor { graph } => single("graph", &verify_gphcor(&graph.graph()?)?),
            OrientRequest::Matchings { graph } => {
                let g = graph.graph()?;
                counted(count_matchings(&g)?, verify_matching_ulc(&g)?)
            }
            OrientRequest::Gmap { system } => {
                let s = BipartiteSystem::new(
                    system.left,
                    system.right,
                    system.edges.clone(),
                    system.lower.clone(),
                    system.upper.clone(),
                )?;
                counted(count_gmaps(&s)?, verify_gmap_ulc(&s)?)
            }
            OrientRequest::Hyplemma { hypergraph: h } => {
                let h = CoverHypergraph::new(h.size, h.h1.clone(), h.h2.clone())?;
                counted(partition_counts(&h)?, verify_hyplemma(&h)?)
            }
            OrientRequest::Exhaustive { property, size } => {
                let v = match property {
                    Exhaustive::Glemma | Exhaustive::Gphcor => {
                        let graphs: Vec<_> = (0..=*size).flat_map(multigraphs).collect();
                        let check = if *property == Exhaustive::Glemma { verify_glemma } else { verify_gphcor };
                        let parts = graphs.par_iter().map(check).collect::<urnlab_core::Result<Vec<_>>>()?;
                        let name = if *property == Exhaustive::Glemma { "glemma" } else { "gphcor" };
                        Verdict::aggregate(name, parts)
                    }
                    Exhaustive::Hyplemma => verify_hyplemma_exhaustive(*size)?,
                    Exhaustive::Matching => verify_matching_ulc_exhaustive(*size)?,
                };
                single("all", &v)
            }
        })
    }
}

// ---- conjecture ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case")]
pub enum ConjectureRequest {
    Welsh {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        s: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scan: Option<(usize, usize)>,
        band: f64,
    },
    Farr {
        graph: GraphFile,
        urns: usize,
        p: Exact,
        i: Vec<usize>,
        j: Vec<usize>,
        #[serde(default)]
        k: Vec<usize>,
    },
    Qq {
        model: ModelFile,
        blocks: Vec<CellBlock>,
        #[serde(default)]
        caps: NaCaps,
    },
    Nmp {
        model: ModelFile,
        k: Vec<usize>,
        #[serde(default, with = "window_list")]
        windows: Windows,
    },
}

fn welsh_table(records: &[urnlab_core::conjectures::WelshRecord]) -> Table {
    let mut t = Table::new(&[
        "s", "t", "m", "p3", "p123", "p13", "p23", "lhs", "rhs", "satisfied", "lhs_approx", "rhs_approx",
    ]);
    for r in records {
        t.push(vec![
            r.s.to_string(),
            r.t.to_string(),
            r.m.to_string(),
            rational::format(&r.p3.0),
            rational::format(&r.p123.0),
            rational::format(&r.p13.0),
            rational::format(&r.p23.0),
            rational::format(&r.lhs.0),
            rational::format(&r.rhs.0),
            r.satisfied.to_string(),
            approx(&r.lhs.0),
            approx(&r.rhs.0),
        ]);
    }
    t
}

impl ConjectureRequest {
    fn run(&self) -> Run<Ran> {
        Ok(match self {
            ConjectureRequest::Welsh { s, scan, band } => match (s, scan) {
                (Some(s), None) => {
                    let record = welsh_record(*s)?;
                    let verdict = welsh_verdict(*s)?;
                    let rows = welsh_asymptotics(*s, *band)?;
                    let table = welsh_table(std::slice::from_ref(&record));
                    let result = json!({
                        "record": record,
                        "verdict": verdict,
                        "frozen_first_s": WELSH_FIRST_S,
                        "asymptotics": rows,
                    });
                    (result, table, EXIT_OK)
                }
                (None, Some((from, to))) => {
                    let scan = welsh_scan(*from, *to)?;
                    let table = welsh_table(&scan.records);
                    let mut result = to_value(&scan);
                    result["frozen_first_s"] = json!(WELSH_FIRST_S);
                    (result, table, EXIT_OK)
                }
                _ => return usage("welsh needs exactly one of --s and --scan-s"),
            },
            ConjectureRequest::Farr { graph, urns, p, i, j, k } => {
                let edges = graph.edges.iter().map(|e| (e[0], e[1])).collect();
                let ideal = IdealSpec::from_graph(graph.vertices, edges)?;
                let v = farr_check(&ideal, *urns, &p.0, i, j, k)?;
                let probs: Vec<Exact> = farr_probabilities(&ideal, *urns, &p.0)?.into_iter().map(Exact).collect();
                let code = verdict_code(&v);
                let table = Table::verdicts([("farr".to_string(), &v)]);
                (json!({"probabilities_by_size": probs, "verdict": v}), table, code)
            }
            ConjectureRequest::Qq { model, blocks, caps } => single("qq", &qq_check(&model.model()?, blocks, caps)?),
            ConjectureRequest::Nmp { model, k, windows } => {
                let model = model.model()?;
                let q = ConditioningEvent::new(&model, windows.clone())?;
                single("nmp", &check_nmp_question(&model, &q, k)?)
            }
        })
    }
}

// ---- search ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Campaign {
    /// Graph ideals (independent sets).
    Farr,
    /// Arbitrary decreasing families.
    Ideal,
    /// CNA and R+ on generalized threshold and interval measures.
    Qcna,
    /// Rayleigh on ordinary urn measures.
    Rayleigh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchRequest {
    pub campaign: Campaign,
    pub seed: u64,
    pub budget: usize,
    pub samples: usize,
}

impl SearchRequest {
    fn run(&self) -> Run<Ran> {
        let report: SearchReport = match self.campaign {
            Campaign::Farr => farr_search(self.seed, self.budget)?,
            Campaign::Ideal => ideal_search(self.seed, self.budget)?,
            Campaign::Qcna => qcna_search(
                self.seed,
                self.budget,
                &SearchCaps {
                    field_samples: self.samples,
                    ..SearchCaps::default()
                },
            )?,
            Campaign::Rayleigh => rayleigh_search(self.seed, self.budget, self.samples)?,
        };
        let mut t = Table::new(&["index", "property", "status", "checked", "skipped"]);
        for inst in &report.instances {
            for v in &inst.verdicts {
                t.push(vec![
                    inst.index.to_string(),
                    v.property.clone(),
                    status_name(v.status).into(),
                    v.checked.to_string(),
                    v.skipped.to_string(),
                ]);
            }
        }
        let code = combined_code(report.aggregate.values());
        Ok((to_value(&report), t, code))
    }
}

mod output;
mod parse;
mod request;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;
use urnlab_core::conjectures::CellBlock;
use urnlab_core::measure::{MeasureFile, NaCaps};
use urnlab_core::rational::Exact;
use urnlab_core::urn::ModelFile;
use urnlab_core::verify::{GeneratorSpec, Theorem};

use output::{usage, write_csv, write_json, Failure, Output, Run, EXIT_OK};
use parse::{list, range, rational, read_json, sets, windows};
use request::*;

#[derive(Parser)]
#[command(name = "urnlab", version, about = "Exact negative dependence checks for competing urns")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Occupancy law, or the conditional law of (X, Y).
    Law(LawArgs),
    /// Interval or threshold urn measure.
    Measure(MeasureArgs),
    /// Check a correlation property of a measure.
    Check(CheckArgs),
    /// Verify a theorem on one model or on a generated suite.
    Verify(VerifyArgs),
    /// Orientation and partition counting.
    Orient {
        #[command(subcommand)]
        task: OrientCmd,
    },
    /// Exact checks of open questions.
    Conjecture {
        #[command(subcommand)]
        task: ConjectureCmd,
    },
    /// Seeded random search for counterexamples.
    Search(SearchArgs),
    /// Rerun the request stored in a JSON report and compare the output.
    Replay {
        #[arg(long)]
        report: PathBuf,
    },
}

#[derive(Args)]
struct LawArgs {
    #[arg(long)]
    model: PathBuf,
    /// Conditional law of (X, Y) instead of the occupancy law.
    #[arg(long)]
    xy: bool,
    #[arg(long, default_value = "")]
    i: String,
    #[arg(long, default_value = "")]
    j: String,
    /// `j:lo:hi`, or `lo:hi` for every urn outside I and J.
    #[arg(long)]
    window: Vec<String>,
    /// Cross-check against brute-force enumeration.
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct Binning {
    /// Comma-separated thresholds, one per urn.
    #[arg(long, conflicts_with = "intervals")]
    thresholds: Option<String>,
    /// Cut points per urn, urns separated by `;`, e.g. `0,1,3;0,2,3`.
    #[arg(long)]
    intervals: Option<String>,
}

impl Binning {
    fn parse(&self) -> Run<(Option<Vec<usize>>, Option<Vec<Vec<usize>>>)> {
        Ok((
            self.thresholds.as_deref().map(list).transpose()?,
            self.intervals.as_deref().map(sets).transpose()?,
        ))
    }
}

// Limits on increasing-event enumeration; exceeding them exits 4.
#[derive(Args)]
struct Caps {
    /// Most points on either side of an NA pair.
    #[arg(long, default_value_t = NaCaps::default().max_side_points)]
    max_side_points: usize,
    /// Most up-sets enumerated for one side.
    #[arg(long, default_value_t = NaCaps::default().max_events_per_side)]
    max_events: usize,
}

impl Caps {
    fn get(&self) -> NaCaps {
        NaCaps {
            max_side_points: self.max_side_points,
            max_events_per_side: self.max_events,
        }
    }
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    binning: Binning,
    #[arg(long)]
    oracle: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    property: CheckProperty,
    #[arg(long, conflicts_with = "model")]
    measure: Option<PathBuf>,
    /// Build the measure from a model and a binning.
    #[arg(long)]
    model: Option<PathBuf>,
    #[command(flatten)]
    binning: Binning,
    /// Second measure for `dominates`.
    #[arg(long)]
    other: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random fields tried by the falsifiers.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Args)]
struct VerifyArgs {
    /// mainthm-a, mainthm-b, mukl-prime, mukl-double-prime, mukl-triple-prime,
    /// propcvx-cornlc, nlcf, dr26 or interval-cna.
    #[arg(long)]
    theorem: String,
    #[arg(long, conflicts_with = "seed")]
    model: Option<PathBuf>,
    #[arg(long)]
    window: Vec<String>,
    /// The vector f for propcvx-cornlc.
    #[arg(long)]
    f: Option<String>,
    /// Minimal sets of the increasing family for dr26.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    binning: Binning,
    /// Run the generated suite with this seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = 50)]
    budget: usize,
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    caps: Caps,
}

#[derive(Subcommand)]
enum OrientCmd {
    /// Orientations meeting out-degree windows `[a_v, b_v]`.
    Count {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Orientations by out-degree vector.
    Distribution {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Orientation-count inequality over every admissible demand quadruple.
    Glemma {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Lattice inequality for orientation counts with equal total demands.
    Gphcor {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Matchings by size, with the ULC check.
    Matchings {
        #[arg(long)]
        graph: PathBuf,
    },
    /// g-maps of a bipartite system by size, with the ULC check.
    Gmap {
        #[arg(long)]
        system: PathBuf,
    },
    /// Partition-count inequality on a cover hypergraph.
    Hyplemma {
        #[arg(long)]
        hypergraph: PathBuf,
    },
    /// Every small instance of one statement.
    Exhaustive {
        #[arg(long, value_enum)]
        property: Exhaustive,
        #[arg(long)]
        size: usize,
    },
}

#[derive(Subcommand)]
enum ConjectureCmd {
    /// Welsh's instance: exact probabilities at one size or over a range.
    Welsh {
        #[arg(long, conflicts_with = "scan_s")]
        s: Option<usize>,
        /// Inclusive range `a:b`.
        #[arg(long)]
        scan_s: Option<String>,
        /// Factor for the asymptotic band.
        #[arg(long, default_value_t = 2.0)]
        band: f64,
    },
    /// Balls are the graph's vertices; `A_L` asks every urn in `L` to hold
    /// an independent set. I, J, K are disjoint urn sets.
    Farr {
        #[arg(long)]
        graph: PathBuf,
        /// Number of urns besides the extra one.
        #[arg(long)]
        urns: usize,
        #[arg(long)]
        p: String,
        #[arg(long)]
        i: String,
        #[arg(long)]
        j: String,
        #[arg(long, default_value = "")]
        k: String,
    },
    /// NA of the cell array given block windows.
    Qq {
        #[arg(long)]
        model: PathBuf,
        /// JSON list of `{cells, lo, hi}` blocks.
        #[arg(long)]
        blocks: PathBuf,
        #[command(flatten)]
        caps: Caps,
    },
    /// Normalized matching for the balls in K given windows on K.
    Nmp {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        k: String,
        #[arg(long)]
        window: Vec<String>,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum)]
    campaign: Campaign,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    budget: usize,
    #[arg(long, default_value_t = 16)]
    samples: usize,
}

fn theorem(name: &str) -> Run<Theorem> {
    serde_json::from_value(Value::String(name.into())).or_else(|_| usage(format!("unknown theorem {name:?}")))
}

/// A bare measure file, or a `measure` report whose result is one.
fn measure_file(path: &PathBuf) -> Run<MeasureFile> {
    let mut v: Value = read_json(path)?;
    if v.get("request").is_some() {
        v = v["result"].take();
    }
    serde_json::from_value(v).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn build(command: Command) -> Run<Request> {
    Ok(match command {
        Command::Law(a) => {
            let model: ModelFile = read_json(&a.model)?;
            let (i, j) = (list(&a.i)?, list(&a.j)?);
            let n = model.n;
            let w = windows(&a.window, || (0..n).filter(|u| !i.contains(u) && !j.contains(u)).collect())?;
            if !a.xy && (!w.is_empty() || !i.is_empty() || !j.is_empty()) {
                return usage("--i, --j and --window need --xy");
            }
            Request::Law(LawRequest {
                model,
                kind: if a.xy { LawKind::Xy } else { LawKind::Occupancy },
                i,
                j,
                windows: w,
                oracle: a.oracle,
            })
        }
        Command::Measure(a) => {
            let (thresholds, intervals) = a.binning.parse()?;
            Request::Measure(MeasureRequest {
                model: read_json(&a.model)?,
                thresholds,
                intervals,
                oracle: a.oracle,
            })
        }
        Command::Check(a) => {
            let measure: MeasureFile = match (&a.measure, &a.model) {
                (Some(path), None) => measure_file(path)?,
                (None, Some(path)) => {
                    let file: ModelFile = read_json(path)?;
                    let (t, iv) = a.binning.parse()?;
                    let Some(b) = binning(&file, &t, &iv)? else {
                        return usage("--model needs --thresholds or --intervals");
                    };
                    build_measure(&file.model()?, &b, false)?.to_file()
                }
                _ => return usage("check needs --measure or --model"),
            };
            Request::Check(CheckRequest {
                measure,
                property: a.property,
                other: a.other.as_ref().map(measure_file).transpose()?,
                seed: a.seed,
                samples: a.samples,
                caps: a.caps.get(),
            })
        }
        Command::Verify(a) => {
            let theorem = theorem(&a.theorem)?;
            let source = match (a.model, a.seed) {
                (Some(path), None) => {
                    let model: ModelFile = read_json(&path)?;
                    let n = model.n;
                    let (thresholds, intervals) = a.binning.parse()?;
                    VerifySource::Model {
                        windows: windows(&a.window, || (0..n.saturating_sub(1)).collect())?,
                        f: a.f.as_deref().map(list).transpose()?,
                        family: a.family.as_deref().map(sets).transpose()?,
                        thresholds,
                        intervals,
                        model,
                    }
                }
                (None, Some(seed)) => VerifySource::Suite {
                    generator: GeneratorSpec::default_for(theorem, seed, a.budget),
                },
                _ => return usage("verify needs --model or --seed"),
            };
            Request::Verify(VerifyRequest {
                theorem,
                source,
                oracle: a.oracle,
                caps: a.caps.get(),
            })
        }
        Command::Orient { task } => Request::Orient(match task {
            OrientCmd::Count { graph, a, b } => OrientRequest::Count {
                graph: read_json(&graph)?,
                a: list(&a)?,
                b: list(&b)?,
            },
            OrientCmd::Distribution { graph } => OrientRequest::Distribution { graph: read_json(&graph)? },
            OrientCmd::Glemma { graph } => OrientRequest::Glemma { graph: read_json(&graph)? },
            OrientCmd::Gphcor { graph } => OrientRequest::Gphcor { graph: read_json(&graph)? },
            OrientCmd::Matchings { graph } => OrientRequest::Matchings { graph: read_json(&graph)? },
            OrientCmd::Gmap { system } => OrientRequest::Gmap { system: read_json(&system)? },
            OrientCmd::Hyplemma { hypergraph } => OrientRequest::Hyplemma {
                hypergraph: read_json(&hypergraph)?,
            },
            OrientCmd::Exhaustive { property, size } => OrientRequest::Exhaustive { property, size },
        }),
        Command::Conjecture { task } => Request::Conjecture(match task {
            ConjectureCmd::Welsh { s, scan_s, band } => ConjectureRequest::Welsh {
                s,
                scan: scan_s.as_deref().map(range).transpose()?,
                band,
            },
            ConjectureCmd::Farr { graph, urns, p, i, j, k } => ConjectureRequest::Farr {
                graph: read_json(&graph)?,
                urns,
                p: Exact(rational(&p)?),
                i: list(&i)?,
                j: list(&j)?,
                k: list(&k)?,
            },
            ConjectureCmd::Qq { model, blocks, caps } => ConjectureRequest::Qq {
                model: read_json(&model)?,
                blocks: read_json::<Vec<CellBlock>>(&blocks)?,
                caps: caps.get(),
            },
            ConjectureCmd::Nmp { model, k, window } => {
                let k = list(&k)?;
                let kk = k.clone();
                ConjectureRequest::Nmp {
                    model: read_json(&model)?,
                    windows: windows(&window, move || kk.clone())?,
                    k,
                }
            }
        }),
        Command::Search(a) => Request::Search(SearchRequest {
            campaign: a.campaign,
            seed: a.seed,
            budget: a.budget,
            samples: a.samples,
        }),
        Command::Replay { .. } => unreachable!("replay is handled before build"),
    })
}

/// Reruns the stored request; a differing result is reported as a mismatch.
fn replay(path: &PathBuf) -> Run<Output> {
    let stored: Value = read_json(path)?;
    let Some(req) = stored.get("request") else {
        return usage(format!("{}: no \"request\" field", path.display()));
    };
    let req: Request =
        serde_json::from_value(req.clone()).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    let mut out = req.run()?;
    if out.json != stored {
        return Err(Failure::OracleMismatch(format!(
            "replay of {} produced a different result",
            path.display()
        )));
    }
    out.code = EXIT_OK;
    Ok(out)
}

fn run(cli: Cli) -> Run<Output> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match cli.command {
        Command::Replay { report } => replay(&report),
        other => build(other)?.run(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    let result = run(cli).and_then(|out| {
        let mut stdout = io::stdout().lock();
        match format {
            Format::Json => write_json(&mut stdout, &out.json).map_err(|e| Failure::Io(e.to_string()))?,
            Format::Csv => write_csv(&mut stdout, &out.table)?,
        }
        Ok(out.code)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            let mut stderr = io::stderr().lock();
            let _ = write_json(&mut stderr, &f.to_json());
            let _ = stderr.flush();
            ExitCode::from(f.code())
        }
    }
}

//! Command-line frontend for `ctqw-core`.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit code
//! together with everything destined for stdout and stderr. JSON outputs use the
//! serializable types defined here or in `ctqw-core`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use ctqw_core::analysis::{
    self, AverageBound, AverageVerdict, MixingReport, MixingTimes, DEFAULT_MIXING_TOLERANCE, DEFAULT_STEP,
    DEFAULT_T_MAX,
};
use ctqw_core::graph::GraphFile;
use ctqw_core::solvers::{self, P3Start, SolutionReport};
use ctqw_core::walk::{self, AverageDistribution};
use ctqw_core::{Distribution, Family, QuantumWalk, SpectralDecomposition, WeightedGraph, DEFAULT_GROUPING_TOLERANCE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Targets must sum to one within this before they are used.
pub const TARGET_SUM_TOLERANCE: f64 = 1e-9;
pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ctqw", version, about = "Continuous-time quantum walks on weighted graphs")]
struct Cli {
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the subcommand's default tolerance.
    #[arg(long, global = true, env = "CTQW_TOL")]
    tol: Option<f64>,
    /// Relative tolerance for grouping equal eigenvalues.
    #[arg(long, global = true, default_value_t = DEFAULT_GROUPING_TOLERANCE)]
    group_tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct GraphArgs {
    /// Graph JSON file: {"n": .., "edges": [[j, k, w], ..], "cells": [[..], ..]}.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// path, cycle, complete, k2, p3, claw, bipartite, multipartite, hypercube, circulant.
    #[arg(long)]
    family: Option<String>,
    /// Vertex count, claw leaf count, or hypercube dimension.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    parts: Vec<usize>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    connections: Vec<i64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues, multiplicities, spectral type and maximum multiplicity.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
    },
    /// Amplitudes and distribution at time t.
    Evolve {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long)]
        t: f64,
    },
    /// Distribution on a time grid as CSV.
    Trajectory {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long)]
        t_max: f64,
        #[arg(long)]
        step: f64,
    },
    /// Time-averaged distribution, optionally with a numerical cross-check.
    Average {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        start: usize,
        /// Horizon T of a trapezoidal time average to compare against.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long, default_value_t = 100_000)]
        steps: usize,
    },
    /// Weights and time reaching a target distribution (p3, claw, bipartite, multipartite).
    Solve {
        #[arg(long)]
        family: String,
        /// Claw leaf count or part sizes.
        #[arg(long, value_delimiter = ',')]
        parts: Vec<usize>,
        /// Inline `0.2,0.3,0.5`, a file, `uniform`, `point:<v>` or `random`.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Vertex index, or left/middle/right for p3, center/leaf for claws.
        #[arg(long, default_value = "0")]
        start: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep the solver's natural weight scale instead of making the largest weight 1.
        #[arg(long)]
        raw: bool,
    },
    /// Scan for instantaneous mixing to the uniform distribution (or another target).
    CheckUniform {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = DEFAULT_T_MAX)]
        t_max: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Uniform mixing on G ⊕ H from common mixing times of the factors.
    ProductCheck {
        /// Factor: a graph file or `family[:arg[:arg]]`, e.g. `complete:4`, `hypercube:2`, `k2`.
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
        #[arg(long, default_value_t = 0)]
        g_start: usize,
        #[arg(long, default_value_t = 0)]
        h_start: usize,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = DEFAULT_STEP)]
        step: f64,
    },
    /// Start-vertex average probabilities against 1/τ, optionally judging a target.
    Bound {
        #[command(flatten)]
        graph: GraphArgs,
        /// Constant c of the almost-uniform criterion p̄ ≤ c/n.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, allow_hyphen_values = true)]
        target: Option<String>,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Reduced Hamiltonian on orthonormal cell vectors.
    Collapse {
        #[command(flatten)]
        graph: GraphArgs,
        /// JSON array of cell vectors or a `solve` output; defaults to the graph file's cells.
        #[arg(long)]
        cells: Option<PathBuf>,
        /// Also compare full and reduced evolution at this time.
        #[arg(long)]
        t: Option<f64>,
        #[arg(long, default_value_t = 0)]
        start_cell: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumOutput {
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub distinct_eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub spectral_type: usize,
    pub max_multiplicity: usize,
    pub spectral_radius: f64,
    pub grouping_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveOutput {
    pub start: usize,
    pub t: f64,
    /// `[re, im]` per vertex.
    pub amplitudes: Vec<[f64; 2]>,
    pub distribution: Distribution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NumericalAverage {
    pub horizon: f64,
    pub steps: usize,
    pub distribution: Distribution,
    pub sup_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AverageOutput {
    pub start: usize,
    pub average: AverageDistribution,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numerical: Option<NumericalAverage>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductOutput {
    pub g: MixingReport,
    pub h: MixingReport,
    pub product: MixingReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundOutput {
    pub bound: AverageBound,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<AverageVerdict>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseCheck {
    pub t: f64,
    pub start_cell: usize,
    /// `max_c |⟨u_c|ψ(t)⟩ − φ_c(t)|` between full and reduced evolution.
    pub max_amplitude_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseOutput {
    pub cells: Vec<Vec<f64>>,
    pub reduced_hamiltonian: Vec<Vec<f64>>,
    pub invariance_residual: f64,
    pub exact: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CollapseCheck>,
}

/// Exit code plus captured output streams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if code == EXIT_OK { (text, String::new()) } else { (String::new(), text) };
            return Outcome { code, stdout, stderr };
        }
    };
    match execute(cli) {
        Ok(stdout) => Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: EXIT_INVALID,
            stdout: String::new(),
            stderr: format!("error: {e:#}\n"),
        },
    }
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn positive(name: &str, v: f64) -> anyhow::Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        bail!("{name} must be positive, got {v}")
    }
}

fn execute(cli: Cli) -> anyhow::Result<String> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            bail!("--threads must be at least 1");
        }
        // the global pool can only be configured once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    let tol = cli.tol.map(|t| positive("tolerance", t)).transpose()?;
    let group_tol = positive("grouping tolerance", cli.group_tol)?;

    match cli.command {
        Command::Spectrum { graph } => {
            let g = load_graph(&graph)?;
            let d = SpectralDecomposition::of_graph_with_tolerance(&g, group_tol);
            json(&SpectrumOutput {
                n: d.n(),
                eigenvalues: d.eigenvalues().to_vec(),
                distinct_eigenvalues: d.distinct_eigenvalues(),
                multiplicities: d.multiplicities(),
                spectral_type: d.spectral_type(),
                max_multiplicity: d.max_multiplicity(),
                spectral_radius: d.spectral_radius(),
                grouping_tolerance: d.grouping_tolerance(),
            })
        }
        Command::Evolve { graph, start, t } => {
            let g = load_graph(&graph)?;
            let state = QuantumWalk::with_tolerance(&g, group_tol).evolve(start, t)?;
            json(&EvolveOutput {
                start,
                t,
                amplitudes: state.amplitudes.iter().map(|z| [z.re, z.im]).collect(),
                distribution: state.distribution(),
            })
        }
        Command::Trajectory { graph, start, t_max, step } => {
            let g = load_graph(&graph)?;
            let rows = QuantumWalk::with_tolerance(&g, group_tol).trajectory(start, t_max, step)?;
            let mut out = Vec::new();
            walk::write_trajectory_csv(&rows, g.n(), &mut out)?;
            Ok(String::from_utf8(out)?)
        }
        Command::Average { graph, start, horizon, steps } => {
            let g = load_graph(&graph)?;
            let w = QuantumWalk::with_tolerance(&g, group_tol);
            let average = w.average_distribution(start)?;
            let numerical = horizon
                .map(|h| -> anyhow::Result<NumericalAverage> {
                    let distribution = w.numerical_time_average(start, h, steps)?;
                    Ok(NumericalAverage {
                        horizon: h,
                        steps,
                        sup_distance: distribution.sup_distance(&average.distribution),
                        distribution,
                    })
                })
                .transpose()?;
            json(&AverageOutput {
                start,
                average,
                numerical,
            })
        }
        Command::Solve {
            family,
            parts,
            target,
            start,
            seed,
            raw,
        } => json(&solve(&family, &parts, &target, &start, seed, raw)?),
        Command::CheckUniform {
            graph,
            start,
            t_max,
            step,
            target,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let target = match target {
                Some(spec) => parse_target(&spec, g.n(), seed)?,
                None => Distribution::uniform(g.n()),
            };
            let report = analysis::scan_distance(
                &g,
                start,
                &target,
                t_max,
                step,
                tol.unwrap_or(DEFAULT_MIXING_TOLERANCE),
            )?;
            json(&report)
        }
        Command::ProductCheck {
            g,
            h,
            g_start,
            h_start,
            t_max,
            step,
        } => {
            let tol = tol.unwrap_or(DEFAULT_MIXING_TOLERANCE);
            let (gg, g_report) = factor_report(&g, g_start, t_max, step, tol)?;
            let (hg, h_report) = factor_report(&h, h_start, t_max, step, tol)?;
            let product = analysis::product_uniform_mixing(&gg, &g_report, &hg, &h_report, t_max, tol)?;
            json(&ProductOutput {
                g: g_report,
                h: h_report,
                product,
            })
        }
        Command::Bound {
            graph,
            c,
            target,
            start,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let w = QuantumWalk::with_tolerance(&g, group_tol);
            let bound = analysis::average_mixing_bound_with(&w, c)?;
            let verdict = target
                .map(|spec| -> anyhow::Result<AverageVerdict> {
                    let target = parse_target(&spec, g.n(), seed)?;
                    Ok(analysis::average_universal_verdict(
                        &g,
                        start,
                        &target,
                        tol.unwrap_or(analysis::BOUND_SLACK),
                    )?)
                })
                .transpose()?;
            json(&BoundOutput { bound, verdict })
        }
        Command::Collapse {
            graph,
            cells,
            t,
            start_cell,
        } => {
            let (g, file) = load_graph_with_file(&graph)?;
            let cells = match cells {
                Some(path) => load_cells(&path)?,
                None => indicator_cells(file.as_ref())?,
            };
            let system = solvers::collapse(&g, &cells)?;
            let reduced = system.reduced_hamiltonian();
            let check = t
                .map(|t| -> anyhow::Result<CollapseCheck> {
                    if start_cell >= cells.len() {
                        bail!("start cell {start_cell} out of range for {} cells", cells.len());
                    }
                    // start state is the chosen cell vector itself
                    let w = QuantumWalk::with_tolerance(&g, group_tol);
                    let u = &cells[start_cell];
                    let propagator = w.propagator(t);
                    let full: Vec<_> = (0..g.n())
                        .map(|j| (0..g.n()).map(|k| propagator[(j, k)] * u[k]).sum())
                        .collect();
                    let state = ctqw_core::WalkState { amplitudes: full, time: t };
                    let projected = system.project(&state);
                    let reduced_amps = system.evolve_reduced(start_cell, t)?;
                    let max_amplitude_error = projected
                        .iter()
                        .zip(&reduced_amps)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    Ok(CollapseCheck {
                        t,
                        start_cell,
                        max_amplitude_error,
                    })
                })
                .transpose()?;
            json(&CollapseOutput {
                cells: cells.clone(),
                reduced_hamiltonian: (0..reduced.nrows())
                    .map(|r| reduced.row(r).iter().copied().collect())
                    .collect(),
                invariance_residual: system.invariance_residual(),
                exact: system.is_exact(),
                check,
            })
        }
    }
}

fn family_from_args(name: &str, n: Option<usize>, parts: &[usize], connections: &[i64]) -> anyhow::Result<Family> {
    let need_n = || n.ok_or_else(|| anyhow!("family {name} needs --n"));
    let single = || -> anyhow::Result<usize> {
        match (n, parts) {
            (Some(n), []) => Ok(n),
            (None, [p]) => Ok(*p),
            _ => bail!("family {name} needs a single size via --n or --parts"),
        }
    };
    Ok(match name.to_ascii_lowercase().as_str() {
        "k2" => Family::Complete(2),
        "p3" => Family::Path(3),
        "path" => Family::Path(need_n()?),
        "cycle" => Family::Cycle(need_n()?),
        "complete" => Family::Complete(need_n()?),
        "claw" | "star" => Family::Claw(single()?),
        "bipartite" => {
            if parts.len() != 2 {
                bail!("family bipartite needs --parts m,n");
            }
            Family::CompleteMultipartite(parts.to_vec())
        }
        "multipartite" => {
            if parts.is_empty() {
                bail!("family multipartite needs --parts");
            }
            Family::CompleteMultipartite(parts.to_vec())
        }
        "hypercube" => {
            let dim = u32::try_from(need_n()?).context("hypercube dimension too large")?;
            Family::Hypercube(dim)
        }
        "circulant" => Family::Circulant {
            n: need_n()?,
            connections: connections.to_vec(),
        },
        other => bail!("unknown family '{other}'"),
    })
}

fn load_graph_with_file(args: &GraphArgs) -> anyhow::Result<(WeightedGraph, Option<GraphFile>)> {
    match (&args.graph, &args.family) {
        (Some(path), None) => {
            let file = GraphFile::load(path).with_context(|| format!("reading graph file {}", path.display()))?;
            if file.cells.is_some() {
                file.to_partitioned()?;
            }
            Ok((file.to_graph()?, Some(file)))
        }
        (None, Some(name)) => {
            let family = family_from_args(name, args.n, &args.parts, &args.connections)?;
            let g = family.build()?;
            let file = family.cells().map(|cells| GraphFile {
                cells: Some(cells),
                ..g.to_file()
            });
            Ok((g, file))
        }
        (None, None) => bail!("one graph source is required: --graph <file> or --family <name>"),
        (Some(_), Some(_)) => bail!("--graph and --family are mutually exclusive"),
    }
}

fn load_graph(args: &GraphArgs) -> anyhow::Result<WeightedGraph> {
    Ok(load_graph_with_file(args)?.0)
}

fn indicator_cells(file: Option<&GraphFile>) -> anyhow::Result<Vec<Vec<f64>>> {
    let file = file.ok_or_else(|| anyhow!("no cells given: pass --cells or a graph with cells"))?;
    let cells = file
        .cells
        .as_ref()
        .ok_or_else(|| anyhow!("no cells given: pass --cells or a graph with cells"))?;
    Ok(cells
        .iter()
        .map(|cell| {
            let mut u = vec![0.0; file.n];
            let x = 1.0 / (cell.len() as f64).sqrt();
            for &v in cell {
                u[v] = x;
            }
            u
        })
        .collect())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CellSource {
    Plain(Vec<Vec<f64>>),
    Solution { cell_vectors: Vec<Vec<f64>> },
}

fn load_cells(path: &Path) -> anyhow::Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let source: CellSource = serde_json::from_str(&text).context("cells must be a JSON array of vectors or a solve output")?;
    Ok(match source {
        CellSource::Plain(c) => c,
        CellSource::Solution { cell_vectors } => cell_vectors,
    })
}

/// Parses `uniform`, `point:<v>`, `random`, an inline list, or a file holding a
/// JSON array or whitespace/comma separated numbers.
pub fn parse_target(spec: &str, n: usize, seed: u64) -> anyhow::Result<Distribution> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("uniform") {
        return Ok(Distribution::uniform(n));
    }
    if spec.eq_ignore_ascii_case("random") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // exponential spacings give a uniform draw from the simplex
        let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = raw.iter().sum();
        return Ok(Distribution::normalized(raw.iter().map(|x| x / total).collect(), TARGET_SUM_TOLERANCE)?);
    }
    if let Some(v) = spec.strip_prefix("point:") {
        let v: usize = v.trim().parse().with_context(|| format!("bad vertex in '{spec}'"))?;
        return Ok(Distribution::point(n, v)?);
    }
    let probs = if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec)?;
        match serde_json::from_str::<Vec<f64>>(&text) {
            Ok(v) => v,
            Err(_) => parse_numbers(&text)?,
        }
    } else {
        parse_numbers(spec)?
    };
    if probs.len() != n {
        bail!("target has {} entries, graph has {n} vertices", probs.len());
    }
    Ok(Distribution::normalized(probs, TARGET_SUM_TOLERANCE)?)
}

fn parse_numbers(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("'{s}' is not a number")))
        .collect()
}

fn solve(family: &str, parts: &[usize], target: &str, start: &str, seed: u64, raw: bool) -> anyhow::Result<SolutionReport> {
    let start = start.trim().to_ascii_lowercase();
    let solution = match family.to_ascii_lowercase().as_str() {
        "p3" | "path" => {
            let target = parse_target(target, 3, seed)?;
            let which = match start.as_str() {
                "left" | "0" => P3Start::Left,
                "middle" | "center" | "1" => P3Start::Middle,
                "right" | "2" => P3Start::Right,
                other => bail!("p3 start must be left, middle or right, got '{other}'"),
            };
            solvers::solve_p3(&target, which)?
        }
        "claw" | "star" => {
            let leaves = match parts {
                [n] => *n,
                _ => bail!("claw needs --parts <leaves>"),
            };
            let target = parse_target(target, leaves + 1, seed)?;
            let v = match start.as_str() {
                "center" => 0,
                "leaf" => 1,
                other => other.parse().with_context(|| format!("bad start '{other}'"))?,
            };
            solvers::solve_claw(&target, v)?
        }
        "bipartite" => {
            let [m, n] = parts else { bail!("bipartite needs --parts m,n") };
            let target = parse_target(target, m + n, seed)?;
            solvers::solve_bipartite(*m, *n, &target, parse_vertex(&start)?)?
        }
        "multipartite" => {
            let total = parts.iter().sum();
            let target = parse_target(target, total, seed)?;
            solvers::solve_multipartite(parts, &target, parse_vertex(&start)?)?
        }
        other => bail!("solve supports p3, claw, bipartite and multipartite, got '{other}'"),
    };
    let solution = if raw { solution } else { solution.with_unit_max_weight()? };
    Ok(solution.to_report())
}

fn parse_vertex(s: &str) -> anyhow::Result<usize> {
    s.parse().with_context(|| format!("start must be a vertex index, got '{s}'"))
}

/// Factor graph plus its mixing-time report: closed form for complete graphs on
/// at most four vertices, hypercubes and claws from the center, a scan otherwise.
fn factor_report(spec: &str, start: usize, t_max: f64, step: f64, tol: f64) -> anyhow::Result<(WeightedGraph, MixingReport)> {
    if Path::new(spec).is_file() {
        let g = GraphFile::load(spec)?.to_graph()?;
        let report = analysis::uniform_mixing_scan(&g, start, t_max, step, tol)?;
        return Ok((g, report));
    }
    let mut fields = spec.split(':');
    let name = fields.next().unwrap_or_default();
    let first = fields.next();
    let second = fields.next();
    let nums = |s: Option<&str>| -> anyhow::Result<Vec<i64>> {
        s.map(|s| {
            s.split(',')
                .map(|x| x.trim().parse::<i64>().with_context(|| format!("bad number '{x}' in '{spec}'")))
                .collect()
        })
        .unwrap_or_else(|| Ok(Vec::new()))
    };
    let first_nums = nums(first)?;
    if first_nums.iter().any(|&x| x < 0) {
        bail!("sizes in '{spec}' must be non-negative");
    }
    let sizes: Vec<usize> = first_nums.iter().map(|&x| x as usize).collect();
    let n = match sizes.as_slice() {
        [n] => Some(*n),
        _ => None,
    };
    let family = family_from_args(name, n, &sizes, &nums(second)?)?;
    let g = family.build()?;
    let closed: Option<MixingTimes> = match &family {
        Family::Complete(n) if *n <= 4 => Some(analysis::complete_graph_uniform_condition(*n)?.times),
        Family::Hypercube(d) if *d >= 1 => Some(analysis::hypercube_mixing_times(*d)?),
        Family::Claw(n) if start == 0 => Some(analysis::claw_center_mixing_times(*n)?),
        _ => None,
    };
    let report = match closed {
        Some(times) => MixingReport::from_times(&g, start, times, tol, &format!("closed-form {} mixing times", family.name()))?,
        None => analysis::uniform_mixing_scan(&g, start, t_max, step, tol)?,
    };
    Ok((g, report))
}

//! Command-line interface.
//!
//! Exit codes: 0 success, 2 invalid input or schema violation, 3 design did
//! not converge, 4 invariant breach during integration, 5 reduction
//! preconditions unmet. Errors go to stderr as `error[E_ID]: message`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::designer::{self, DesignOptions};
use crate::dynamics::{self, DensityMatrix, QuantumState};
use crate::error::{Error, Result};
use crate::io::{self, ChainSolutionFile, GraphFile, GridSolutionFile, HamiltonianBlock, NoiseFile, Report, SweepPoint};
use crate::lattice::{self, LatticeGraph};
use crate::metrics::{self, RobustnessReport, ScalingRow};
use crate::spectral::Family;
use crate::units::{angular_to_mhz, mhz_to_angular};

pub const EXIT_INVALID: u8 = 2;
pub const EXIT_UNCONVERGED: u8 = 3;
pub const EXIT_INVARIANT: u8 = 4;
pub const EXIT_REDUCTION: u8 = 5;

/// Caps the worker threads used for restarts and Monte-Carlo sampling.
pub const THREADS_ENV: &str = "WSTATE_FORGE_THREADS";

#[derive(Parser, Debug)]
#[command(name = "wstate-forge", version, about = "Single-step W-state Hamiltonian design and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Design a chain or grid Hamiltonian.
    #[command(subcommand)]
    Design(DesignCommand),
    /// Population dynamics of a Hamiltonian, optionally with T1/T2 noise.
    Evolve(EvolveArgs),
    /// Opposite-site population while sweeping one coupling phase.
    SweepPhase(SweepArgs),
    /// Effective chain of a rooted distance-regular graph.
    Reduce(ReduceArgs),
    /// Monte-Carlo parameter-noise robustness of chain designs.
    Robustness(RobustnessArgs),
    /// Single-step synthesis time against circuit lower bounds.
    Scaling(ScalingArgs),
    /// Emit a template graph.
    #[command(subcommand)]
    Graph(GraphCommand),
}

#[derive(Subcommand, Debug)]
pub enum DesignCommand {
    Chain(ChainArgs),
    Grid(GridArgs),
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random restarts on top of the Krawtchouk starts.
    #[arg(long, default_value_t = 256)]
    pub restarts: usize,
}

impl SearchArgs {
    fn options(&self, family: Option<Family>) -> DesignOptions {
        DesignOptions { family, seed: self.seed, restarts: self.restarts, ..DesignOptions::default() }
    }
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    #[arg(long)]
    pub size: usize,
    /// Initialized site; defaults to the centre (left of centre for even sizes).
    #[arg(long)]
    pub init: Option<usize>,
    #[arg(long, default_value_t = 99.0)]
    pub tau_ns: f64,
    /// symmetric, resonant or antisymmetric; default picks the cheapest.
    #[arg(long)]
    pub family: Option<Family>,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 99.0)]
    pub tau_ns: f64,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvolveArgs {
    /// Solution or graph JSON.
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long)]
    pub init: usize,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Swept coupling as `i,j`; the phase is applied in the `i -> j` direction.
    #[arg(long, value_parser = parse_edge)]
    pub edge: (usize, usize),
    /// Number of phases, evenly spaced over `[-pi, pi]`.
    #[arg(long)]
    pub phases: usize,
    #[arg(long)]
    pub t_max: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub init: usize,
    /// Recorded site; defaults to the site farthest from `init`.
    #[arg(long)]
    pub target: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub root: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RobustnessArgs {
    /// Chain solution JSON; repeat for several designs.
    #[arg(long, required = true)]
    pub design: Vec<PathBuf>,
    #[arg(long)]
    pub sigma_rel: f64,
    #[arg(long)]
    pub samples: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[arg(long, default_value_t = 9)]
    pub chain_max: usize,
    #[arg(long, default_value_t = 0)]
    pub grid_max: usize,
    #[arg(long, default_value_t = 2.2)]
    pub jmax_mhz: f64,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum GraphCommand {
    /// 28-site heavy-hex patch rooted at site 0.
    HeavyHex {
        #[arg(long, default_value_t = 1.0)]
        coupling_mhz: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Square grid, site `l * cols + m`.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 1.0)]
        coupling_mhz: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_edge(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected i,j, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(a)?, parse(b)?))
}

/// Stable machine-readable id and exit code for an error.
pub fn classify(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Json(_) | Error::Csv(_) => ("E_SCHEMA", EXIT_INVALID),
        Error::Io(_) => ("E_IO", EXIT_INVALID),
        Error::Unconverged { .. } | Error::BoundaryHit { .. } => ("E_UNCONVERGED", EXIT_UNCONVERGED),
        Error::InvariantBreach(_) | Error::StepSizeFailure { .. } => ("E_INVARIANT", EXIT_INVARIANT),
        Error::NotDistanceRegular { .. } | Error::NonUniformLayer { .. } => ("E_REDUCTION", EXIT_REDUCTION),
        Error::InconsistentLoop { .. } | Error::GaugeFlux { .. } | Error::Disconnected { .. } => ("E_GRAPH", EXIT_INVALID),
        _ => ("E_INPUT", EXIT_INVALID),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    emit(out, &io::to_json(value)?)
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::ParameterOutOfRange { name, value: v, range: "(0, inf)" })
    }
}

/// `0, dt, 2 dt, ...` below `t_max`, then `t_max`.
pub fn time_grid(t_max: f64, dt: f64) -> Result<Vec<f64>> {
    positive("dt", dt)?;
    if !(t_max >= 0.0) || !t_max.is_finite() {
        return Err(Error::ParameterOutOfRange { name: "t_max", value: t_max, range: "[0, inf)" });
    }
    let steps = (t_max / dt * (1.0 - 1e-12)).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps).map(|k| k as f64 * dt).collect();
    if t_max > 0.0 {
        grid.push(t_max);
    }
    Ok(grid)
}

fn chain_design(args: &ChainArgs) -> Result<ChainSolutionFile> {
    positive("tau_ns", args.tau_ns)?;
    let init = args.init.unwrap_or(args.size.saturating_sub(1) / 2);
    let rec = designer::design_chain(args.size, init, args.tau_ns, &args.search.options(args.family))?;
    Ok(ChainSolutionFile::from_record(&rec))
}

fn grid_design(args: &GridArgs) -> Result<GridSolutionFile> {
    positive("tau_ns", args.tau_ns)?;
    let d = designer::design_grid(args.rows, args.cols, args.tau_ns, &args.search.options(None))?;
    Ok(GridSolutionFile::from_design(&d))
}

fn evolve(args: &EvolveArgs) -> Result<String> {
    let g = io::read_hamiltonian_graph(&std::fs::read_to_string(&args.hamiltonian)?)?;
    let h = lattice::graph_hamiltonian(&g);
    let times = time_grid(args.t_max, args.dt)?;
    let psi0 = QuantumState::localized(g.len(), args.init)?;
    let trace = match &args.noise {
        None => dynamics::evolve_unitary(&h, &psi0, &times)?.0,
        Some(p) => {
            let noise = io::read_json::<NoiseFile>(p)?.to_model()?;
            if noise.sites() != g.len() {
                return Err(Error::LengthMismatch { expected: g.len(), found: noise.sites() });
            }
            let states = dynamics::evolve_lindblad(&h, &noise, &DensityMatrix::from_state(&psi0), &times)?;
            dynamics::lindblad_populations(&times, &states)
        }
    };
    io::trace_to_csv(&trace)
}

fn farthest_from(g: &LatticeGraph, init: usize) -> usize {
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.len()];
    dist[init] = 0;
    let mut queue = std::collections::VecDeque::from([init]);
    while let Some(v) = queue.pop_front() {
        for &(u, _) in &adj[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    (0..g.len()).filter(|v| dist[*v] != usize::MAX).max_by_key(|v| (dist[*v], *v)).unwrap_or(init)
}

/// Phase sweep over `phases` values in `[-pi, pi]`.
pub fn phase_sweep(
    g: &LatticeGraph,
    edge: (usize, usize),
    phases: usize,
    times: &[f64],
    init: usize,
    target: usize,
) -> Result<Vec<SweepPoint>> {
    if phases == 0 {
        return Err(Error::InvalidInput("at least one phase is required".into()));
    }
    if g.find_edge(edge.0, edge.1).is_none() {
        return Err(Error::InvalidInput(format!("edge ({}, {}) not found", edge.0, edge.1)));
    }
    if target >= g.len() {
        return Err(Error::InvalidInput(format!("target {target} out of range")));
    }
    let psi0 = QuantumState::localized(g.len(), init)?;
    let mut points = Vec::with_capacity(phases * times.len());
    for k in 0..phases {
        let phi = if phases == 1 { 0.0 } else { -PI + 2.0 * PI * k as f64 / (phases - 1) as f64 };
        let mut gk = g.clone();
        gk.set_phase(edge.0, edge.1, phi)?;
        let trace = dynamics::evolve_unitary(&lattice::graph_hamiltonian(&gk), &psi0, times)?.0;
        for (t, p) in times.iter().zip(trace.site_series(target)) {
            points.push(SweepPoint { phi, time: *t, population: p });
        }
    }
    Ok(points)
}

fn sweep(args: &SweepArgs) -> Result<String> {
    let g = io::read_hamiltonian_graph(&std::fs::read_to_string(&args.graph)?)?;
    if args.init >= g.len() {
        return Err(Error::InvalidInput(format!("init {} out of range", args.init)));
    }
    let dt = args.dt.unwrap_or(args.t_max / 200.0);
    let times = time_grid(args.t_max, dt)?;
    let target = args.target.unwrap_or_else(|| farthest_from(&g, args.init));
    io::sweep_to_csv(&phase_sweep(&g, args.edge, args.phases, &times, args.init, target)?)
}

/// Effective chain and layer map of a reduction.
#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ReductionReport {
    pub root: usize,
    pub layers: Vec<Vec<usize>>,
    pub layer_sizes: Vec<usize>,
    pub forward_degree: Vec<usize>,
    pub chain: HamiltonianBlock,
}

pub fn reduction_report(g: &LatticeGraph, root: usize) -> Result<ReductionReport> {
    let (chain, part) = lattice::layer_reduce(g, root)?;
    Ok(ReductionReport {
        root,
        layer_sizes: part.sizes(),
        forward_degree: part.forward_degree.clone(),
        layers: part.layers,
        chain: HamiltonianBlock::from_chain(&chain),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RobustnessEntry {
    pub design: String,
    pub family: Family,
    pub jmax_mhz: f64,
    pub report: RobustnessReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct RobustnessSummary {
    pub designs: Vec<RobustnessEntry>,
}

fn robustness(args: &RobustnessArgs) -> Result<RobustnessSummary> {
    let mut designs = Vec::new();
    for path in &args.design {
        let rec = io::read_json::<ChainSolutionFile>(path)?.to_record()?;
        let report = metrics::robustness_mc(&rec.hamiltonian, rec.tau, rec.init, args.sigma_rel, args.samples, args.seed)?;
        designs.push(RobustnessEntry {
            design: path.display().to_string(),
            family: rec.params.family(),
            jmax_mhz: angular_to_mhz(rec.jmax()),
            report,
        });
    }
    Ok(RobustnessSummary { designs })
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct ScalingSummary {
    pub jmax_mhz: f64,
    pub rows: Vec<ScalingRow>,
    /// Whether single-step times are nondecreasing in size within each geometry.
    pub chain_monotone: bool,
    pub grid_monotone: bool,
}

/// Nondecreasing single-step time along consecutive rows of one geometry kind.
pub fn monotone_in_size(rows: &[ScalingRow], grid: bool) -> bool {
    let times: Vec<f64> = rows
        .iter()
        .filter(|r| matches!(r.geometry, metrics::Geometry::Grid { .. }) == grid)
        .map(|r| r.single_step_ns)
        .collect();
    times.windows(2).all(|w| w[1] >= w[0])
}

fn scaling(args: &ScalingArgs) -> Result<ScalingSummary> {
    let jmax = mhz_to_angular(positive("jmax_mhz", args.jmax_mhz)?);
    let rows = metrics::scaling_table(args.chain_max, args.grid_max, jmax, &args.search.options(None))?;
    Ok(ScalingSummary {
        jmax_mhz: args.jmax_mhz,
        chain_monotone: monotone_in_size(&rows, false),
        grid_monotone: monotone_in_size(&rows, true),
        rows,
    })
}

fn graph(cmd: &GraphCommand) -> Result<(GraphFile, Option<&Path>)> {
    match cmd {
        GraphCommand::HeavyHex { coupling_mhz, out } => {
            let g = lattice::heavy_hex_graph().with_uniform_coupling(mhz_to_angular(positive("coupling_mhz", *coupling_mhz)?));
            Ok((GraphFile::from_graph(&g), out.as_deref()))
        }
        GraphCommand::Grid { rows, cols, coupling_mhz, out } => {
            let g = lattice::grid_graph(*rows, *cols)?.with_uniform_coupling(mhz_to_angular(positive("coupling_mhz", *coupling_mhz)?));
            Ok((GraphFile::from_graph(&g), out.as_deref()))
        }
    }
}

/// Runs a parsed command. `Ok(code)` carries a non-error exit status (3 for
/// an unconverged design that was still written).
pub fn execute(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Design(DesignCommand::Chain(a)) => {
            let f = chain_design(a)?;
            emit_json(a.out.as_deref(), &f)?;
            Ok(if f.converged { 0 } else { EXIT_UNCONVERGED })
        }
        Command::Design(DesignCommand::Grid(a)) => {
            let f = grid_design(a)?;
            emit_json(a.out.as_deref(), &f)?;
            Ok(if f.converged { 0 } else { EXIT_UNCONVERGED })
        }
        Command::Evolve(a) => emit(a.out.as_deref(), &evolve(a)?).map(|_| 0),
        Command::SweepPhase(a) => emit(a.out.as_deref(), &sweep(a)?).map(|_| 0),
        Command::Reduce(a) => {
            let g = io::read_hamiltonian_graph(&std::fs::read_to_string(&a.graph)?)?;
            emit_json(a.out.as_deref(), &Report::new(reduction_report(&g, a.root)?)).map(|_| 0)
        }
        Command::Robustness(a) => emit_json(a.out.as_deref(), &Report::new(robustness(a)?)).map(|_| 0),
        Command::Scaling(a) => emit_json(a.out.as_deref(), &Report::new(scaling(a)?)).map(|_| 0),
        Command::Graph(c) => {
            let (f, out) = graph(c)?;
            emit_json(out, &f).map(|_| 0)
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::InvalidInput(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        // a pool that is already set up (e.g. in tests) is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match configure_threads().and_then(|_| execute(&cli)) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (id, code) = classify(&e);
            eprintln!("error[{id}]: {e}");
            ExitCode::from(code)
        }
    }
}

pub fn run() -> ExitCode {
    run_from(std::env::args_os())
}

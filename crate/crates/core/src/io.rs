//! File formats.
//!
//! JSON documents always carry `"units": {"time": "ns", "frequency": "MHz"}`.
//! Frequencies are stored as linear MHz (`J / 2 pi`), times in ns. Every file
//! type here round-trips through its reader and writer byte for byte.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::designer::{GridDesign, SolutionRecord};
use crate::dynamics::{NoiseModel, PopulationTrace};
use crate::error::{Error, Result};
use crate::lattice::{Edge, LatticeGraph};
use crate::spectral::{FamilyParams, TridiagonalHamiltonian};
use crate::units::{angular_to_mhz, mhz_to_angular};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub time: String,
    pub frequency: String,
}

impl Default for Units {
    fn default() -> Self {
        Units { time: "ns".into(), frequency: "MHz".into() }
    }
}

impl Units {
    pub fn check(&self) -> Result<()> {
        if self.time != "ns" || self.frequency != "MHz" {
            return Err(Error::InvalidInput(format!(
                "unsupported units (time {:?}, frequency {:?}); expected ns and MHz",
                self.time, self.frequency
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingEntry {
    pub i: usize,
    pub j: usize,
    pub amp_mhz: f64,
    pub phase_rad: f64,
}

/// On-site energies and couplings in MHz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianBlock {
    pub onsite_mhz: Vec<f64>,
    pub couplings: Vec<CouplingEntry>,
}

impl HamiltonianBlock {
    pub fn from_graph(g: &LatticeGraph) -> Self {
        HamiltonianBlock {
            onsite_mhz: g.onsite().iter().map(|d| angular_to_mhz(*d)).collect(),
            couplings: g
                .edges()
                .iter()
                .map(|e| CouplingEntry { i: e.i, j: e.j, amp_mhz: angular_to_mhz(e.amplitude), phase_rad: e.phase })
                .collect(),
        }
    }

    pub fn from_chain(h: &TridiagonalHamiltonian) -> Self {
        Self::from_graph(&crate::lattice::chain_graph(h))
    }

    pub fn to_graph(&self) -> Result<LatticeGraph> {
        let edges = self
            .couplings
            .iter()
            .map(|c| Edge::oriented(c.i, c.j, mhz_to_angular(c.amp_mhz), c.phase_rad))
            .collect();
        LatticeGraph::new(self.onsite_mhz.iter().map(|d| mhz_to_angular(*d)).collect(), edges)
    }

    /// Chain form; requires couplings exactly between neighbours `n, n + 1`
    /// with zero phase.
    pub fn to_chain(&self) -> Result<TridiagonalHamiltonian> {
        let n = self.onsite_mhz.len();
        let g = self.to_graph()?;
        if g.edges().len() + 1 != n.max(1) {
            return Err(Error::InvalidInput("not a nearest-neighbour chain".into()));
        }
        let mut couplings = Vec::with_capacity(n.saturating_sub(1));
        for (k, e) in g.edges().iter().enumerate() {
            if e.i != k || e.j != k + 1 || e.phase != 0.0 {
                return Err(Error::InvalidInput(format!("coupling ({}, {}) does not fit a real chain", e.i, e.j)));
            }
            couplings.push(e.amplitude);
        }
        TridiagonalHamiltonian::new(g.onsite().to_vec(), couplings)
    }
}

/// Designed chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSolutionFile {
    pub units: Units,
    pub sites: usize,
    pub init: usize,
    pub tau_ns: f64,
    pub params: FamilyParams,
    pub hamiltonian: HamiltonianBlock,
    pub residual_infidelity: f64,
    pub jmax_tau: f64,
    pub jmax_mhz: f64,
    pub converged: bool,
}

impl ChainSolutionFile {
    pub fn from_record(rec: &SolutionRecord) -> Self {
        ChainSolutionFile {
            units: Units::default(),
            sites: rec.sites(),
            init: rec.init,
            tau_ns: rec.tau,
            params: rec.params.clone(),
            hamiltonian: HamiltonianBlock::from_chain(&rec.hamiltonian),
            residual_infidelity: rec.residual_infidelity,
            jmax_tau: rec.jmax_tau,
            jmax_mhz: angular_to_mhz(rec.jmax()),
            converged: rec.converged,
        }
    }

    pub fn to_record(&self) -> Result<SolutionRecord> {
        self.units.check()?;
        Ok(SolutionRecord {
            params: self.params.clone(),
            hamiltonian: self.hamiltonian.to_chain()?,
            init: self.init,
            tau: self.tau_ns,
            residual_infidelity: self.residual_infidelity,
            jmax_tau: self.jmax_tau,
            converged: self.converged,
        })
    }
}

/// Designed grid: the two chains and the composed lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSolutionFile {
    pub units: Units,
    pub rows: usize,
    pub cols: usize,
    pub init: usize,
    pub tau_ns: f64,
    pub column: Option<ChainSolutionFile>,
    pub row: Option<ChainSolutionFile>,
    pub hamiltonian: HamiltonianBlock,
    pub residual_infidelity: f64,
    pub jmax_tau: f64,
    pub converged: bool,
}

impl GridSolutionFile {
    pub fn from_design(d: &GridDesign) -> Self {
        GridSolutionFile {
            units: Units::default(),
            rows: d.rows,
            cols: d.cols,
            init: d.init,
            tau_ns: d.tau,
            column: d.column.as_ref().map(ChainSolutionFile::from_record),
            row: d.row.as_ref().map(ChainSolutionFile::from_record),
            hamiltonian: HamiltonianBlock::from_graph(&d.graph),
            residual_infidelity: d.residual_infidelity,
            jmax_tau: d.jmax_tau(),
            converged: [&d.column, &d.row].iter().all(|c| c.as_ref().is_none_or(|r| r.converged)),
        }
    }
}

/// Lattice of sites and complex couplings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub units: Units,
    pub onsite_mhz: Vec<f64>,
    pub couplings: Vec<CouplingEntry>,
}

impl GraphFile {
    pub fn from_graph(g: &LatticeGraph) -> Self {
        let block = HamiltonianBlock::from_graph(g);
        GraphFile { units: Units::default(), onsite_mhz: block.onsite_mhz, couplings: block.couplings }
    }

    pub fn to_graph(&self) -> Result<LatticeGraph> {
        self.units.check()?;
        HamiltonianBlock { onsite_mhz: self.onsite_mhz.clone(), couplings: self.couplings.clone() }.to_graph()
    }
}

/// Per-site `T1`, `T2` in ns; `null` means no decay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub units: Units,
    pub t1_ns: Vec<Option<f64>>,
    pub t2_ns: Vec<Option<f64>>,
}

impl NoiseFile {
    pub fn from_model(m: &NoiseModel) -> Self {
        let opt = |v: &[f64]| v.iter().map(|t| t.is_finite().then_some(*t)).collect();
        NoiseFile { units: Units::default(), t1_ns: opt(m.t1()), t2_ns: opt(m.t2()) }
    }

    pub fn to_model(&self) -> Result<NoiseModel> {
        self.units.check()?;
        let inf = |v: &[Option<f64>]| v.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect();
        NoiseModel::new(inf(&self.t1_ns), inf(&self.t2_ns))
    }
}

/// Report with the units block in front of the payload.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report<T> {
    pub units: Units,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Report<T> {
    pub fn new(body: T) -> Self {
        Report { units: Units::default(), body }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

/// Parses a JSON document, rejecting a missing or wrong units block.
pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let units = value.get("units").ok_or_else(|| Error::InvalidInput("missing units block".into()))?;
    serde_json::from_value::<Units>(units.clone())?.check()?;
    Ok(serde_json::from_value(value)?)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json(value)?)?;
    Ok(())
}

/// Hamiltonian from either a chain or grid solution, or a bare graph file.
pub fn read_hamiltonian_graph(text: &str) -> Result<LatticeGraph> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if let Some(h) = value.get("hamiltonian") {
        let units = value.get("units").ok_or_else(|| Error::InvalidInput("missing units block".into()))?;
        serde_json::from_value::<Units>(units.clone())?.check()?;
        return serde_json::from_value::<HamiltonianBlock>(h.clone())?.to_graph();
    }
    from_json::<GraphFile>(text)?.to_graph()
}

fn csv_writer() -> csv::WriterBuilder {
    let mut b = csv::WriterBuilder::new();
    b.terminator(csv::Terminator::Any(b'\n'));
    b
}

/// Shortest round-trip form, switching to exponent notation for tiny values.
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn parse_field(field: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::InvalidInput(format!("line {line}: {field:?} is not a number")))
}

/// Population trace CSV: `time_ns,p_0,...,p_{N-1},p_vac`.
pub fn trace_to_csv(trace: &PopulationTrace) -> Result<String> {
    let n = trace.populations.first().map_or(0, Vec::len);
    let mut w = csv_writer().from_writer(Vec::new());
    let mut header = vec!["time_ns".to_string()];
    header.extend((0..n).map(|k| format!("p_{k}")));
    header.push("p_vac".into());
    w.write_record(&header)?;
    for ((t, p), v) in trace.times.iter().zip(&trace.populations).zip(&trace.vacuum) {
        let mut row = vec![num(*t)];
        row.extend(p.iter().map(|x| num(*x)));
        row.push(num(*v));
        w.write_record(&row)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidInput(e.to_string()))
}

pub fn trace_from_csv(text: &str) -> Result<PopulationTrace> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    let n = header.len().checked_sub(2).ok_or_else(|| Error::InvalidInput("trace header too short".into()))?;
    let expected: Vec<String> = std::iter::once("time_ns".to_string())
        .chain((0..n).map(|k| format!("p_{k}")))
        .chain(std::iter::once("p_vac".to_string()))
        .collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::InvalidInput(format!("unexpected trace header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut trace = PopulationTrace { times: vec![], populations: vec![], vacuum: vec![] };
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let vals = rec.iter().map(|f| parse_field(f, k + 2)).collect::<Result<Vec<_>>>()?;
        trace.times.push(vals[0]);
        trace.populations.push(vals[1..=n].to_vec());
        trace.vacuum.push(vals[n + 1]);
    }
    Ok(trace)
}

/// One sample of a phase sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepPoint {
    pub phi: f64,
    pub time: f64,
    pub population: f64,
}

/// Sweep CSV: `phi_rad,time_ns,p_target`.
pub fn sweep_to_csv(points: &[SweepPoint]) -> Result<String> {
    let mut w = csv_writer().from_writer(Vec::new());
    w.write_record(["phi_rad", "time_ns", "p_target"])?;
    for p in points {
        w.write_record([num(p.phi), num(p.time), num(p.population)])?;
    }
    finish(w)
}

pub fn sweep_from_csv(text: &str) -> Result<Vec<SweepPoint>> {
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    if r.headers()?.iter().ne(["phi_rad", "time_ns", "p_target"]) {
        return Err(Error::InvalidInput("unexpected sweep header".into()));
    }
    r.records()
        .enumerate()
        .map(|(k, rec)| {
            let rec = rec?;
            let v = rec.iter().map(|f| parse_field(f, k + 2)).collect::<Result<Vec<_>>>()?;
            Ok(SweepPoint { phi: v[0], time: v[1], population: v[2] })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn units_block_is_mandatory() {
        let g = GraphFile::from_graph(&crate::lattice::grid_graph(2, 2).unwrap());
        let text = to_json(&g).unwrap();
        assert_eq!(from_json::<GraphFile>(&text).unwrap(), g);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("units");
        assert!(from_json::<GraphFile>(&v.to_string()).is_err());
        v["units"] = serde_json::json!({"time": "us", "frequency": "MHz"});
        assert!(from_json::<GraphFile>(&v.to_string()).is_err());
    }

    #[test]
    fn trace_round_trip() {
        let trace = PopulationTrace {
            times: vec![0.0, 0.1, 1e-300],
            populations: vec![vec![1.0, 0.0], vec![0.3333333333333333, 0.6666666666666667], vec![0.5, 0.25]],
            vacuum: vec![0.0, 0.0, 0.25],
        };
        let text = trace_to_csv(&trace).unwrap();
        assert!(text.starts_with("time_ns,p_0,p_1,p_vac\n"));
        let back = trace_from_csv(&text).unwrap();
        assert_eq!(back, trace);
        assert_eq!(trace_to_csv(&back).unwrap(), text);
    }

    #[test]
    fn noise_nulls_mean_no_decay() {
        let m = NoiseModel::new(vec![f64::INFINITY, 30_000.0], vec![f64::INFINITY, 20_000.0]).unwrap();
        let f = NoiseFile::from_model(&m);
        let text = to_json(&f).unwrap();
        assert!(text.contains("null"));
        assert_eq!(from_json::<NoiseFile>(&text).unwrap().to_model().unwrap(), m);
    }

    #[test]
    fn chain_block_rejects_non_chains() {
        let block = HamiltonianBlock::from_graph(&crate::lattice::grid_graph(2, 2).unwrap());
        assert!(block.to_chain().is_err());
        let h = TridiagonalHamiltonian::new(vec![0.1, 0.0, -0.1], vec![0.5, 0.7]).unwrap();
        let back = HamiltonianBlock::from_chain(&h).to_chain().unwrap();
        for (a, b) in back.couplings().iter().zip(h.couplings()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}

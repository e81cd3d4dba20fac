use wstate_forge::designer::{self, DesignOptions};
use wstate_forge::dynamics::{self, NoiseModel, QuantumState};
use wstate_forge::io::{self, ChainSolutionFile, GraphFile, GridSolutionFile, NoiseFile, SweepPoint};
use wstate_forge::lattice;
use wstate_forge::units::mhz_to_angular;

fn rewrite<T: serde::Serialize + serde::de::DeserializeOwned>(text: &str) -> String {
    io::to_json(&io::from_json::<T>(text).unwrap()).unwrap()
}

#[test]
fn chain_solution_json_is_stable() {
    let rec = designer::design_chain(5, 2, 99.0, &DesignOptions::default()).unwrap();
    let text = io::to_json(&ChainSolutionFile::from_record(&rec)).unwrap();
    assert_eq!(rewrite::<ChainSolutionFile>(&text), text);
    let back = io::from_json::<ChainSolutionFile>(&text).unwrap().to_record().unwrap();
    assert_eq!(back.params, rec.params);
    for (a, b) in back.hamiltonian.couplings().iter().zip(rec.hamiltonian.couplings()) {
        assert!((a - b).abs() < 1e-14 * b.abs());
    }
}

#[test]
fn grid_solution_json_is_stable() {
    let grid = designer::design_grid(2, 3, 99.0, &DesignOptions::default()).unwrap();
    let text = io::to_json(&GridSolutionFile::from_design(&grid)).unwrap();
    assert_eq!(rewrite::<GridSolutionFile>(&text), text);
}

#[test]
fn graph_json_is_stable() {
    let mut g = lattice::grid_graph(2, 2).unwrap().with_uniform_coupling(mhz_to_angular(1.5));
    g.set_phase(0, 1, 0.25).unwrap();
    let text = io::to_json(&GraphFile::from_graph(&g)).unwrap();
    assert_eq!(rewrite::<GraphFile>(&text), text);
    let back = io::read_hamiltonian_graph(&text).unwrap();
    assert_eq!(back.len(), 4);
    assert!((back.find_edge(0, 1).unwrap().phase_from(0) - 0.25).abs() < 1e-15);
}

#[test]
fn noise_json_writes_null_for_no_decay() {
    let noise = NoiseModel::new(vec![f64::INFINITY, 2000.0, f64::INFINITY], vec![1500.0, 3000.0, f64::INFINITY]).unwrap();
    let text = io::to_json(&NoiseFile::from_model(&noise)).unwrap();
    assert!(text.contains("null"));
    assert_eq!(rewrite::<NoiseFile>(&text), text);
    let back = io::from_json::<NoiseFile>(&text).unwrap().to_model().unwrap();
    assert_eq!(back.t1(), noise.t1());
    assert_eq!(back.t2(), noise.t2());
}

#[test]
fn missing_or_wrong_units_are_rejected() {
    let g = lattice::grid_graph(1, 2).unwrap().with_uniform_coupling(1.0);
    let text = io::to_json(&GraphFile::from_graph(&g)).unwrap();
    let no_units: serde_json::Value = {
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut().unwrap().remove("units");
        v
    };
    assert!(io::from_json::<GraphFile>(&no_units.to_string()).is_err());
    let ghz = text.replace("\"MHz\"", "\"GHz\"");
    assert!(io::read_hamiltonian_graph(&ghz).is_err());
}

#[test]
fn trace_csv_is_stable() {
    let h = lattice::graph_hamiltonian(&lattice::grid_graph(1, 3).unwrap().with_uniform_coupling(0.05));
    let times: Vec<f64> = (0..=10).map(|k| k as f64 * 3.7).collect();
    let (trace, _) = dynamics::evolve_unitary(&h, &QuantumState::localized(3, 1).unwrap(), &times).unwrap();
    let text = io::trace_to_csv(&trace).unwrap();
    assert!(text.starts_with("time_ns,p_0,p_1,p_2,p_vac\n"));
    let back = io::trace_from_csv(&text).unwrap();
    assert_eq!(back, trace);
    assert_eq!(io::trace_to_csv(&back).unwrap(), text);
}

#[test]
fn sweep_csv_is_stable() {
    let points: Vec<SweepPoint> = (0..4)
        .flat_map(|k| (0..3).map(move |t| SweepPoint { phi: -1.0 + k as f64 * 0.1, time: t as f64 * 0.5, population: 1e-17 * k as f64 }))
        .collect();
    let text = io::sweep_to_csv(&points).unwrap();
    assert!(text.starts_with("phi_rad,time_ns,p_target\n"));
    assert_eq!(io::sweep_from_csv(&text).unwrap(), points);
    assert_eq!(io::sweep_to_csv(&io::sweep_from_csv(&text).unwrap()).unwrap(), text);
}

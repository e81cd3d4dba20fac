//! A four-site plaquette at 1.5 MHz. With flux pi through the loop the two
//! paths to the opposite corner cancel; without flux the excitation reaches
//! W4 at a quarter period and the far corner at half a period.

use std::f64::consts::PI;

use wstate_forge::dynamics::{self, QuantumState};
use wstate_forge::lattice::{self, graph_hamiltonian};
use wstate_forge::metrics;
use wstate_forge::units::mhz_to_angular;

fn main() -> wstate_forge::Result<()> {
    let j = mhz_to_angular(1.5);
    let plaquette = lattice::grid_graph(2, 2)?.with_uniform_coupling(j);
    let psi0 = QuantumState::localized(4, 0)?;
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 10.0).collect();

    for phi in [0.0, PI / 2.0, PI] {
        let mut g = plaquette.clone();
        g.set_phase(0, 1, phi)?;
        let loops = lattice::cycle_phase_sums(&g);
        let (trace, _) = dynamics::evolve_unitary(&graph_hamiltonian(&g), &psi0, &times)?;
        let far = trace.site_series(3).into_iter().fold(0.0, f64::max);
        println!("loop phase {:+.4}: max population on far corner {far:.6}", loops[0].sum);
    }

    let h = graph_hamiltonian(&plaquette);
    let t_w = PI / (4.0 * j);
    let (_, psi) = dynamics::evolve_unitary(&h, &psi0, &[t_w])?;
    println!("W4 at {t_w:.2} ns with F_W {:.12}", metrics::aligned_w_fidelity(&psi));

    // edge phases whose loop sum vanishes are a pure gauge and can be removed
    let mut g = plaquette.clone();
    g.set_phase(0, 1, 0.7)?;
    g.set_phase(1, 3, -0.7)?;
    println!("loop phase {:+.4}", lattice::cycle_phase_sums(&g)[0].sum);
    let (fixed, theta) = lattice::gauge_fix(&g)?;
    println!("frame phases {theta:?}");
    println!("max edge phase after fixing {}", fixed.edges().iter().fold(0.0f64, |m, e| m.max(e.phase.abs())));
    Ok(())
}

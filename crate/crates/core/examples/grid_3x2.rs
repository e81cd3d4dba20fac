//! Two commuting chains make a 2 x 3 grid: a 2-site chain on each column and
//! a 3-site chain on each row, both reaching their W state at 99 ns.

use wstate_forge::designer::{self, DesignOptions};
use wstate_forge::dynamics::{self, QuantumState};
use wstate_forge::lattice::graph_hamiltonian;
use wstate_forge::metrics;
use wstate_forge::units::angular_to_mhz;

fn main() -> wstate_forge::Result<()> {
    let grid = designer::design_grid(2, 3, 99.0, &DesignOptions::default())?;
    let n = grid.rows * grid.cols;
    if let (Some(c), Some(r)) = (&grid.column, &grid.row) {
        println!("column J {:.4} MHz, row J {:.4} MHz", angular_to_mhz(c.jmax()), angular_to_mhz(r.jmax()));
    }

    let h = graph_hamiltonian(&grid.graph);
    let times: Vec<f64> = (0..=9).map(|k| k as f64 * 11.0).collect();
    let (trace, _) = dynamics::evolve_unitary(&h, &QuantumState::localized(n, grid.init)?, &times)?;
    for (t, p) in trace.times.iter().zip(&trace.populations) {
        let d = metrics::delocalization(p)?;
        println!("t {t:5.1} ns  D {d:.4}");
    }
    println!("W{n} infidelity {:.1e}", grid.residual_infidelity);
    Ok(())
}

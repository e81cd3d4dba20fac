//! A 5-site design under loss and dephasing: W fidelity and the
//! lost population over one synthesis time.

use wstate_forge::designer::{self, DesignOptions};
use wstate_forge::dynamics::{self, DensityMatrix, NoiseModel, QuantumState};
use wstate_forge::metrics;

fn main() -> wstate_forge::Result<()> {
    let tau = 99.0;
    let rec = designer::design_chain(5, 2, tau, &DesignOptions::default())?;
    let h = rec.hamiltonian.to_complex();
    let psi0 = QuantumState::localized(5, 2)?;
    let (_, ideal) = dynamics::evolve_unitary(&h, &psi0, &[tau])?;
    let (_, phases) = dynamics::phase_align(&ideal);

    let times: Vec<f64> = (0..=6).map(|k| k as f64 * tau / 6.0).collect();
    for (t1, t2) in [(f64::INFINITY, f64::INFINITY), (20_000.0, 15_000.0), (2_000.0, 1_500.0)] {
        let noise = NoiseModel::uniform(5, t1, t2)?;
        let states = dynamics::evolve_lindblad(&h, &noise, &DensityMatrix::from_state(&psi0), &times)?;
        let last = states.last().expect("times is not empty");
        let f = metrics::w_fidelity(&metrics::rotate_density(last, &phases)?);
        println!("T1 {t1:>7} ns  T2 {t2:>7} ns:  F_W {f:.5}  lost {:.5}", last.vacuum_population());
    }
    Ok(())
}

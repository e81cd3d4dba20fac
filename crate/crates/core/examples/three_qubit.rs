//! Three sites, excitation in the middle: detuning profiles that give W3 at
//! half a period, and the resonant chain for comparison.

use num_complex::Complex64 as C64;
use wstate_forge::dynamics::{self, QuantumState, ThreeQubitProfile};
use wstate_forge::metrics;
use wstate_forge::units::mhz_to_angular;

fn main() -> wstate_forge::Result<()> {
    let j = mhz_to_angular(1.0);
    let psi0 = QuantumState::localized(3, 1)?;

    for d in dynamics::three_qubit_half_period_detunings(j, ThreeQubitProfile::Antisymmetric) {
        let h = dynamics::three_qubit_hamiltonian(C64::from(j), d, -d);
        let t = dynamics::three_qubit_period(j, d.abs(), ThreeQubitProfile::Antisymmetric) / 2.0;
        let (_, psi) = dynamics::evolve_unitary(&h, &psi0, &[t])?;
        println!("antisymmetric delta/J {:+.4}: t {t:.2} ns, F_W {:.12}", d / j, metrics::aligned_w_fidelity(&psi));
    }

    let d = 2.0 * j;
    let h = dynamics::three_qubit_hamiltonian(C64::from(j), d, d);
    let t = dynamics::three_qubit_period(j, d, ThreeQubitProfile::Symmetric) / 2.0;
    let (_, psi) = dynamics::evolve_unitary(&h, &psi0, &[t])?;
    println!("symmetric delta/J 2: t {t:.2} ns, F_W {:.12}", metrics::aligned_w_fidelity(&psi));

    let t = dynamics::resonant_w3_time(j);
    let h = dynamics::three_qubit_hamiltonian(C64::from(j), 0.0, 0.0);
    let (_, psi) = dynamics::evolve_unitary(&h, &psi0, &[t])?;
    println!("resonant: t {t:.2} ns, F_W {:.12}", metrics::aligned_w_fidelity(&psi));
    Ok(())
}

//! Scan the Krawtchouk chain over p and list the distinct W-fidelity optima.

use wstate_forge::designer::{self, DesignProblem};
use wstate_forge::spectral::{self, Family};

fn main() -> wstate_forge::Result<()> {
    // perfect transfer at p = 1/2, W-like states elsewhere
    let h = spectral::krawtchouk_hamiltonian(0.5, 7, 1.0)?;
    println!("p = 0.5 couplings {:?}", h.couplings());

    let problem = DesignProblem::centered(7, Family::Antisymmetric, 1.0)?;
    let optima = designer::unique_optima(&problem, &designer::krawtchouk_scan(&problem, 1e-3)?);
    for o in &optima {
        println!("p {:.4}  F_W {:.4}", o.p, o.fidelity());
    }
    Ok(())
}

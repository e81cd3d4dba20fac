//! Fidelity witness against the tailored witness on a lossy W7. Loss pulls
//! F_W below 6/7, so the fidelity witness stays silent while the tailored one
//! still detects genuine multipartite entanglement.

use num_complex::Complex64 as C64;
use wstate_forge::dynamics::{DensityMatrix, QuantumState};
use wstate_forge::metrics;

fn lossy_w(n: usize, f: f64) -> wstate_forge::Result<DensityMatrix> {
    let mut m = DensityMatrix::from_state(&QuantumState::w_state(n)).matrix() * C64::from(f);
    m[(n, n)] = C64::from(1.0 - f);
    DensityMatrix::new(m)
}

fn main() -> wstate_forge::Result<()> {
    let n = 7;
    for f in [1.0, 0.9, 0.8, 0.7] {
        let rho = lossy_w(n, f)?;
        let wf = metrics::witness_fidelity(&rho);
        let wt = metrics::witness_tailored(&rho)?;
        println!(
            "F_W {f:.2}: W_F {:+.4} ({})  W_T {:+.4} beta {:.3} ({})",
            wf.expectation,
            if wf.certifies() { "entangled" } else { "silent" },
            wt.expectation,
            wt.beta,
            if wt.certifies() { "entangled" } else { "silent" }
        );
    }
    Ok(())
}

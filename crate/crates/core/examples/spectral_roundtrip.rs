//! Chain -> (eigenvalues, weights) -> chain, on a disordered 12-site chain.

use wstate_forge::spectral::{self, TridiagonalHamiltonian};

fn main() -> wstate_forge::Result<()> {
    let onsite = vec![0.3, -0.7, 0.1, 0.9, -0.2, 0.0, 0.5, -0.9, 0.4, -0.1, 0.8, -0.5];
    let couplings = vec![0.6, 0.9, 0.3, 0.7, 0.5, 0.8, 0.25, 0.95, 0.4, 0.6, 0.35];
    let h = TridiagonalHamiltonian::new(onsite, couplings)?;

    let (spectrum, weights) = spectral::spectral_data(&h)?;
    for (l, w) in spectrum.eigenvalues().iter().zip(weights.weights()) {
        println!("lambda {l:+.6}  w {w:.3e}");
    }

    let back = spectral::reconstruct_tridiagonal(&spectrum, &weights)?;
    let err = h
        .onsite()
        .iter()
        .zip(back.onsite())
        .chain(h.couplings().iter().zip(back.couplings()))
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    println!("round-trip error {err:.2e}");
    Ok(())
}

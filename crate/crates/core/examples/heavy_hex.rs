//! The 28-site heavy-hex patch seen from a root vertex reduces to a layer
//! chain. Designing that chain spreads the excitation over all 28 sites.

use wstate_forge::designer::{self, DesignOptions};
use wstate_forge::lattice;
use wstate_forge::units::{angular_to_mhz, mhz_to_angular};

fn main() -> wstate_forge::Result<()> {
    let g = lattice::heavy_hex_graph().with_uniform_coupling(mhz_to_angular(1.0));
    let (chain, part) = lattice::layer_reduce(&g, 0)?;
    println!("layer sizes {:?}", part.sizes());
    println!("effective couplings (MHz) {:?}", chain.couplings().iter().map(|j| angular_to_mhz(*j)).collect::<Vec<_>>());

    let design = designer::design_layered(&lattice::heavy_hex_graph(), 0, 200.0, &DesignOptions::default())?;
    for (d, p) in design.layer_populations.iter().enumerate() {
        println!("layer {d}: population {p:.6}");
    }
    println!("28-site W infidelity {:.1e}", design.residual_infidelity);
    Ok(())
}

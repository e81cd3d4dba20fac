//! Single-step synthesis time against a nearest-neighbour circuit bound at
//! J_max = 2.2 MHz.

use wstate_forge::designer::DesignOptions;
use wstate_forge::metrics;
use wstate_forge::units::mhz_to_angular;

fn main() -> wstate_forge::Result<()> {
    let rows = metrics::scaling_table(9, 3, mhz_to_angular(2.2), &DesignOptions::default())?;
    println!("{:>6} {:>5} {:>12} {:>7} {:>12}", "kind", "N", "single (ns)", "layers", "circuit (ns)");
    for r in rows {
        let kind = match r.geometry {
            metrics::Geometry::Chain { .. } => "chain",
            metrics::Geometry::Grid { .. } => "grid",
        };
        println!("{kind:>6} {:>5} {:>12.1} {:>7} {:>12.1}", r.sites, r.single_step_ns, r.layers, r.circuit_ns);
    }
    Ok(())
}

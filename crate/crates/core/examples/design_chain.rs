//! Design a 7-site chain that turns the centre excitation into W7 in 264 ns,
//! and print the solution file.

use wstate_forge::designer::{self, DesignOptions};
use wstate_forge::io::{self, ChainSolutionFile};
use wstate_forge::units::angular_to_mhz;

fn main() -> wstate_forge::Result<()> {
    let rec = designer::design_chain(7, 3, 264.0, &DesignOptions::default())?;
    println!(
        "{} family, residual {:.1e}, J_max {:.3} MHz",
        rec.params.family().name(),
        rec.residual_infidelity,
        angular_to_mhz(rec.jmax())
    );

    let all = designer::explore_chain(7, 3, 264.0, &DesignOptions::default())?;
    println!("{} exact solutions across families", all.len());

    print!("{}", io::to_json(&ChainSolutionFile::from_record(&rec))?);
    Ok(())
}

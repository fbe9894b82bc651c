//! Platform and joint deflection under a cutting-like load.

use nalgebra::Vector6;
use pkm::parasitic::solve_loop_closure;
use pkm::stiffness::{assemble_stiffness, deflection_under_load};
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    // 500 force units along -z, 100 along x, and a 2e4 moment about y.
    let load = Vector6::new(100.0, 0.0, -500.0, 0.0, 2.0e4, 0.0);
    for variant in Variant::ALL {
        let params = MechanismParams::reference(variant);
        let cp = solve_loop_closure(&params, 0.2, 0.1, params.home_height())?;
        let res = assemble_stiffness(&params, &cp.pose)?;
        let d = deflection_under_load(&res, &load)?;
        println!("{variant}");
        println!("  twist deflection {:?}", d.twist.as_slice());
        println!("  joint deflection {:?}", d.joints.as_slice());
    }
    Ok(())
}

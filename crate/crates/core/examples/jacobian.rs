//! Wrench Jacobian, feasible-twist projector and condition number at home
//! and at a tilted pose.

use nalgebra::Vector6;
use pkm::jacobian::{jacobian_at, project_task_rate};
use pkm::parasitic::solve_loop_closure;
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    for variant in Variant::ALL {
        let params = MechanismParams::reference(variant);
        let home = jacobian_at(&params, &params.home_pose())?;
        println!("{variant}");
        println!("  projector at home:{:.3}", home.projector);
        println!("  kappa at home: {:.12}", home.kappa);

        let cp = solve_loop_closure(&params, 0.3, -0.2, params.home_height())?;
        let set = jacobian_at(&params, &cp.pose)?;
        let raw = Vector6::new(1.0, 1.0, 1.0, 0.1, 0.1, 0.1);
        let feasible = project_task_rate(&set.projector, &raw);
        println!("  tilted kappa: {:.6}", set.kappa);
        println!("  projected twist: {:?}", feasible.to_vector().as_slice());
        println!("  joint rates: {:?}", set.joint_rates(&feasible).as_slice());
    }
    Ok(())
}

//! Inverse kinematics of both machines at one tilt.
//!
//! cargo run --example ik -- 20 10

use pkm::kinematics::inverse_kinematics;
use pkm::parasitic::solve_loop_closure;
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let psi = args.first().copied().unwrap_or(20.0);
    let theta = args.get(1).copied().unwrap_or(10.0);

    for variant in Variant::ALL {
        let params = MechanismParams::reference(variant);
        let cp = solve_loop_closure(&params, psi.to_radians(), theta.to_radians(), params.home_height())?;
        let limbs = inverse_kinematics(&params, &cp.pose)?;
        println!("{variant} at psi={psi} deg, theta={theta} deg");
        println!(
            "  platform centre ({:.6}, {:.6}, {:.6}) mm, gamma {:.8} rad",
            cp.pose.p.x, cp.pose.p.y, cp.pose.p.z, cp.parasitic.gamma
        );
        for limb in &limbs {
            println!(
                "  limb {}: actuated {:.6} mm, strut length {:.6} mm",
                limb.index + 1,
                limb.actuated_length,
                limb.l1.norm()
            );
        }
    }
    Ok(())
}

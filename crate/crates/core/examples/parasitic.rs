//! Parasitic motion along a tilt path: velocity-level integration against the
//! position-level loop closure, and a coarse map of both machines.

use pkm::parasitic::{integrate_parasitic_path, parasitic_map, solve_loop_closure, DEFAULT_STEPS};
use pkm::sweep::GridSpec;
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    let params = MechanismParams::reference(Variant::Z3Prs);
    let z = params.home_height();
    let (psi, theta) = (25f64.to_radians(), -15f64.to_radians());

    let rk4 = integrate_parasitic_path(&params, psi, theta, z, DEFAULT_STEPS)?;
    let newton = solve_loop_closure(&params, psi, theta, z)?;
    println!("integrated: {:?}", rk4.parasitic);
    println!("closure:    {:?} ({} iterations)", newton.parasitic, newton.iterations);

    let spec = GridSpec::square_deg(9, 40.0)?;
    for variant in Variant::ALL {
        let maps = parasitic_map(&MechanismParams::reference(variant), &spec, z);
        println!(
            "{variant}: x in [{:.4}, {:.4}] mm, y in [{:.4}, {:.4}] mm, gamma in [{:.6}, {:.6}] rad",
            maps.x.min().unwrap_or(f64::NAN),
            maps.x.max().unwrap_or(f64::NAN),
            maps.y.min().unwrap_or(f64::NAN),
            maps.y.max().unwrap_or(f64::NAN),
            maps.gamma.min().unwrap_or(f64::NAN),
            maps.gamma.max().unwrap_or(f64::NAN),
        );
    }
    Ok(())
}

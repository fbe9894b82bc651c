//! Stiffness matrix at home and the six diagonal measures over a tilt grid,
//! also keyed by parasitic offsets.

use pkm::stiffness::{assemble_stiffness, stiffness_map_rotational, MEASURES};
use pkm::sweep::GridSpec;
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    let spec = GridSpec::square_deg(11, 30.0)?;
    for variant in Variant::ALL {
        let params = MechanismParams::reference(variant);
        let home = assemble_stiffness(&params, &params.home_pose())?;
        println!("{variant} home stiffness matrix:{:.4e}", home.k);
        let maps = stiffness_map_rotational(&params, &spec, params.home_height());
        for (name, field) in MEASURES.iter().zip(&maps.fields) {
            println!(
                "  {name}: home {:.6e}, grid min {:.6e}, max {:.6e}",
                field.nearest(0.0, 0.0).unwrap_or(f64::NAN),
                field.min().unwrap_or(f64::NAN),
                field.max().unwrap_or(f64::NAN)
            );
        }
        let samples = maps.parasitic_space();
        let far = samples
            .iter()
            .max_by(|a, b| a.x_par.hypot(a.y_par).total_cmp(&b.x_par.hypot(b.y_par)))
            .expect("grid has samples");
        println!(
            "  largest offset sample: ({:.3}, {:.3}) mm, kpz {:.6e}",
            far.x_par, far.y_par, far.values[2]
        );
    }
    Ok(())
}

//! Tilt-space workspace slices at three heights, with the default and a
//! shorter A3 strut stroke.

use pkm::geometry::StrokeLimits;
use pkm::sweep::{workspace_slice, GridSpec};
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    let spec = GridSpec::square_deg(41, 40.0)?;
    let l = MechanismParams::TABLE_LINK_LENGTH;
    let cases = [
        ("Z3 default stroke", MechanismParams::reference(Variant::Z3Prs)),
        ("A3 default stroke", MechanismParams::reference(Variant::A3Rps)),
        (
            "A3 stroke ±150 mm",
            MechanismParams::reference(Variant::A3Rps).with_stroke(StrokeLimits { min: l - 150.0, max: l + 150.0 }),
        ),
    ];
    for (label, params) in cases {
        let z0 = params.home_height();
        let areas = [0.0, -50.0, -100.0]
            .iter()
            .map(|dz| workspace_slice(&params, &spec, z0 + dz, 0.05).map(|s| format!("{:.4}", s.area)))
            .collect::<pkm::Result<Vec<_>>>()?;
        println!("{label}: area at z0, z0-50, z0-100 = {} rad^2", areas.join(", "));
    }
    Ok(())
}

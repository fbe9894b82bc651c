//! Condition-number map written as CSV and SVG.
//!
//! cargo run --release --example condition_map -- out_dir

use pkm::output::{condition_table, emit_heatmap_svg, Palette};
use pkm::sweep::{condition_map, GridSpec};
use pkm::{MechanismParams, Variant};

fn main() -> pkm::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    std::fs::create_dir_all(&out)?;
    let spec = GridSpec::square_deg(61, 40.0)?;
    for variant in Variant::ALL {
        let params = MechanismParams::reference(variant);
        let kappa = condition_map(&params, &spec, params.home_height());
        let tag = variant.short_name();
        condition_table(&kappa).write_csv(format!("{out}/condition_{tag}.csv"))?;
        emit_heatmap_svg(&kappa, Palette::Viridis, format!("{out}/condition_{tag}.svg"))?;
        println!(
            "{variant}: kappa min {:.4}, max {:.4}, mean {:.4}, {} missing",
            kappa.min().unwrap_or(f64::NAN),
            kappa.max().unwrap_or(f64::NAN),
            kappa.mean().unwrap_or(f64::NAN),
            kappa.missing_count()
        );
    }
    Ok(())
}

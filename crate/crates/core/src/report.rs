//! Side-by-side sweeps of both machines and the summary report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::Config;
use crate::error::Result;
use crate::geometry::{MechanismParams, Variant};
use crate::output::{
    condition_table, emit_heatmap_svg, fmt_sig, parasitic_table, stiffness_table, workspace_table, Palette, Table,
};
use crate::parasitic::{parasitic_map, ParasiticMaps};
use crate::stiffness::{assemble_stiffness, stiffness_samples, MEASURES};
use crate::sweep::{condition_map, workspace_slice, GridSpec, SweepGrid, WorkspaceSlice};

/// Relative gap below which two values count as a tie.
pub const TIE_RTOL: f64 = 1e-9;
/// Cellwise agreement required for the parasitic-equality flag.
pub const PARASITIC_TOL_MM: f64 = 1e-8;
pub const PARASITIC_TOL_RAD: f64 = 1e-10;
/// Relative area change tolerated by the "constant workspace" flag.
pub const WORKSPACE_CONSTANT_RTOL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub missing: usize,
}

impl Stats {
    pub fn of(grid: &SweepGrid) -> Option<Self> {
        Some(Self {
            min: grid.min()?,
            max: grid.max()?,
            mean: grid.mean()?,
            missing: grid.missing_count(),
        })
    }

    fn scalar(v: f64) -> Self {
        Self { min: v, max: v, mean: v, missing: 0 }
    }
}

/// Which direction of a metric is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preference {
    Higher,
    Lower,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub name: String,
    pub preference: Preference,
    /// Indexed like [`Variant::ALL`]; `None` when every cell failed.
    pub stats: [Option<Stats>; 2],
    /// Better mean under `preference`, if not tied.
    pub dominant: Option<Variant>,
}

impl MetricSummary {
    fn new(name: impl Into<String>, preference: Preference, stats: [Option<Stats>; 2]) -> Self {
        let dominant = match (preference, stats) {
            (Preference::Neither, _) => None,
            (_, [Some(z), Some(a)]) => {
                let sign = if preference == Preference::Higher { 1.0 } else { -1.0 };
                better(sign * z.mean, sign * a.mean)
            }
            _ => None,
        };
        Self {
            name: name.into(),
            preference,
            stats,
            dominant,
        }
    }
}

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_RTOL * a.abs().max(b.abs())
}

/// The machine with the larger value, or `None` on a tie.
fn better(z3: f64, a3: f64) -> Option<Variant> {
    if tied(z3, a3) {
        None
    } else if z3 > a3 {
        Some(Variant::Z3Prs)
    } else {
        Some(Variant::A3Rps)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub metrics: Vec<MetricSummary>,
    /// Largest cellwise difference between the machines' parasitic maps.
    pub parasitic_max_diff_mm: f64,
    pub parasitic_max_diff_rad: f64,
    pub parasitic_equal: bool,
    /// Six stiffness measures at the home cell, per machine.
    pub stiffness_home: [[f64; 6]; 2],
    /// Machine that is at least as stiff in every measure and stiffer in one.
    pub stiffness_dominant_home: Option<Variant>,
    /// Whether that machine is strictly stiffer in all six measures.
    pub stiffness_strict_home: bool,
    pub kappa_peak: [Option<f64>; 2],
    pub condition_peak_higher: Option<Variant>,
    /// `(z, area)` per slice, per machine.
    pub workspace_areas: [Vec<(f64, f64)>; 2],
    pub z3_workspace_constant: bool,
    pub a3_workspace_decreasing: bool,
    /// Per-metric notes about failed cells.
    pub failures: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl ComparisonReport {
    pub fn metric(&self, name: &str) -> Option<&MetricSummary> {
        self.metrics.iter().find(|m| m.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let name = |v: Option<Variant>| v.map_or("tie".to_string(), |v| v.to_string());
        let stats = |st: &Option<Stats>| match st {
            Some(st) => format!(
                "min {} max {} mean {} missing {}",
                fmt_sig(st.min),
                fmt_sig(st.max),
                fmt_sig(st.mean),
                st.missing
            ),
            None => "no data".to_string(),
        };
        let _ = writeln!(s, "# machine comparison");
        let _ = writeln!(s);
        for m in &self.metrics {
            let pref = match m.preference {
                Preference::Higher => "higher is better",
                Preference::Lower => "lower is better",
                Preference::Neither => "no preference",
            };
            let _ = writeln!(s, "{} ({pref})", m.name);
            for (k, v) in Variant::ALL.iter().enumerate() {
                let _ = writeln!(s, "  {v}: {}", stats(&m.stats[k]));
            }
            if m.preference != Preference::Neither {
                let _ = writeln!(s, "  dominant: {}", name(m.dominant));
            }
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "parasitic_equal = {}", self.parasitic_equal);
        let _ = writeln!(s, "parasitic_max_diff_mm = {}", fmt_sig(self.parasitic_max_diff_mm));
        let _ = writeln!(s, "parasitic_max_diff_rad = {}", fmt_sig(self.parasitic_max_diff_rad));
        for (k, v) in Variant::ALL.iter().enumerate() {
            let vals: Vec<String> = self.stiffness_home[k].iter().map(|&x| fmt_sig(x)).collect();
            let _ = writeln!(s, "stiffness_home_{} = {}", v.short_name(), vals.join(", "));
        }
        let _ = writeln!(s, "stiffness_dominant_home = {}", name(self.stiffness_dominant_home));
        let _ = writeln!(s, "stiffness_strict_home = {}", self.stiffness_strict_home);
        for (k, v) in Variant::ALL.iter().enumerate() {
            let peak = self.kappa_peak[k].map_or("n/a".to_string(), fmt_sig);
            let _ = writeln!(s, "kappa_peak_{} = {peak}", v.short_name());
        }
        let _ = writeln!(s, "condition_peak_higher = {}", name(self.condition_peak_higher));
        for (k, v) in Variant::ALL.iter().enumerate() {
            let areas: Vec<String> = self.workspace_areas[k]
                .iter()
                .map(|(z, a)| format!("z={} area={}", fmt_sig(*z), fmt_sig(*a)))
                .collect();
            let _ = writeln!(s, "workspace_{} = {}", v.short_name(), areas.join("; "));
        }
        let _ = writeln!(s, "z3_workspace_constant = {}", self.z3_workspace_constant);
        let _ = writeln!(s, "a3_workspace_decreasing = {}", self.a3_workspace_decreasing);
        for f in &self.failures {
            let _ = writeln!(s, "failure: {f}");
        }
        s
    }
}

struct MachineRun {
    parasitic: [SweepGrid; 3],
    kappa: SweepGrid,
    areas: Vec<(f64, f64)>,
    stiffness: [SweepGrid; 6],
    home: [f64; 6],
}

/// Output directory plus machine tag used in file names.
#[derive(Debug, Clone)]
pub struct Emitter<'a> {
    pub dir: &'a Path,
    pub tag: &'a str,
    pub files: Vec<PathBuf>,
}

impl<'a> Emitter<'a> {
    pub fn new(dir: &'a Path, tag: &'a str) -> Self {
        Self { dir, tag, files: Vec::new() }
    }

    fn csv(&mut self, table: &Table, stem: &str) -> Result<()> {
        let path = self.dir.join(format!("{stem}_{}.csv", self.tag));
        table.write_csv(&path)?;
        self.files.push(path);
        Ok(())
    }

    fn svg(&mut self, grid: &SweepGrid, palette: Palette, stem: &str) -> Result<()> {
        let path = self.dir.join(format!("{stem}_{}.svg", self.tag));
        emit_heatmap_svg(grid, palette, &path)?;
        self.files.push(path);
        Ok(())
    }

    /// `parasitic_<tag>.csv` and one heatmap per field.
    pub fn parasitic(&mut self, params: &MechanismParams, spec: &GridSpec, z: f64) -> Result<ParasiticMaps> {
        let par = parasitic_map(params, spec, z);
        self.csv(&parasitic_table(&par), "parasitic")?;
        for g in [&par.x, &par.y, &par.gamma] {
            self.svg(g, Palette::Diverging, &format!("parasitic_{}", g.name))?;
        }
        Ok(par)
    }

    /// `condition_<tag>.csv` and its heatmap.
    pub fn condition(&mut self, params: &MechanismParams, spec: &GridSpec, z: f64) -> Result<SweepGrid> {
        let kappa = condition_map(params, spec, z);
        self.csv(&condition_table(&kappa), "condition")?;
        self.svg(&kappa, Palette::Viridis, "condition")?;
        Ok(kappa)
    }

    /// `workspace_<tag>.csv` with every slice, and one mask per slice.
    pub fn workspace(
        &mut self,
        params: &MechanismParams,
        spec: &GridSpec,
        z: f64,
        dz: &[f64],
        kappa_min_inv: f64,
    ) -> Result<Vec<WorkspaceSlice>> {
        let mut slices = Vec::new();
        for &d in dz {
            let slice = workspace_slice(params, spec, z + d, kappa_min_inv)?;
            let mut mask = slice.inside.clone();
            mask.name = format!("inside, z = {} mm", fmt_sig(slice.z));
            self.svg(&mask, Palette::Binary, &format!("workspace_dz{}", fmt_sig(d)))?;
            slices.push(slice);
        }
        self.csv(&workspace_table(&slices), "workspace")?;
        Ok(slices)
    }

    /// `stiffness_<tag>.csv` keyed by tilt and parasitic offsets,
    /// `stiffness_parasitic_<tag>.csv` with the scattered samples only, and
    /// one heatmap per measure.
    /// Stiffness sweep. `Rotational` writes the tilt-grid CSV and one heatmap per
    /// measure; `Parasitic` writes the same samples keyed by parasitic position.
    pub fn stiffness(
        &mut self,
        params: &MechanismParams,
        spec: &GridSpec,
        z: f64,
        spaces: &[StiffnessSpace],
    ) -> Result<[SweepGrid; 6]> {
        let samples = stiffness_samples(params, spec, z);
        let fields: [SweepGrid; 6] = std::array::from_fn(|k| {
            SweepGrid::new(MEASURES[k], spec, samples.iter().map(|s| s.map(|s| s.values[k])).collect())
        });
        if spaces.contains(&StiffnessSpace::Rotational) {
            let cells: Vec<(f64, f64)> = spec.cells().collect();
            self.csv(&stiffness_table(&cells, &samples), "stiffness")?;
            for g in &fields {
                self.svg(g, Palette::Viridis, &format!("stiffness_{}", g.name))?;
            }
        }
        if spaces.contains(&StiffnessSpace::Parasitic) {
            let mut header = vec!["x_par_mm", "y_par_mm"];
            header.extend(MEASURES);
            let mut scattered = Table::new(&header);
            for s in samples.iter().flatten() {
                let mut row = vec![Some(s.x_par), Some(s.y_par)];
                row.extend(s.values.iter().map(|&v| Some(v)));
                scattered.push(row);
            }
            self.csv(&scattered, "stiffness_parasitic")?;
        }
        Ok(fields)
    }
}

/// Coordinates in which stiffness maps are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StiffnessSpace {
    /// Over the commanded tilt grid.
    Rotational,
    /// Over the parasitic x/y displacement each tilt produces.
    Parasitic,
}

impl std::str::FromStr for StiffnessSpace {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rotational" => Ok(StiffnessSpace::Rotational),
            "parasitic" => Ok(StiffnessSpace::Parasitic),
            other => Err(format!("unknown stiffness space `{other}` (expected rotational or parasitic)")),
        }
    }
}

fn run_machine(config: &Config, variant: Variant, out: &Path, files: &mut Vec<PathBuf>) -> Result<MachineRun> {
    let params = config.params(variant)?;
    let spec = config.grid()?;
    let z = config.height()?;
    let mut emit = Emitter::new(out, variant.short_name());
    let par = emit.parasitic(&params, &spec, z)?;
    let kappa = emit.condition(&params, &spec, z)?;
    let slices = emit.workspace(&params, &spec, z, &config.workspace_dz, config.kappa_min_inv)?;
    let stiffness = emit.stiffness(&params, &spec, z, &[StiffnessSpace::Rotational, StiffnessSpace::Parasitic])?;
    files.append(&mut emit.files);

    let mut home_pose = params.home_pose();
    home_pose.p.z = z;
    let home = assemble_stiffness(&params, &home_pose)?.measures();

    Ok(MachineRun {
        parasitic: [par.x, par.y, par.gamma],
        kappa,
        areas: slices.iter().map(|s| (s.z, s.area)).collect(),
        stiffness,
        home,
    })
}

fn max_cell_diff(a: &SweepGrid, b: &SweepGrid) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => (x - y).abs(),
            (None, None) => 0.0,
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max)
}

/// Run every sweep for both machines, write CSV/SVG files and `summary.txt`
/// into `out_dir`, and return the report.
pub fn run_comparison(config: &Config, out_dir: impl AsRef<Path>) -> Result<ComparisonReport> {
    let out = out_dir.as_ref();
    std::fs::create_dir_all(out)?;
    let mut files = Vec::new();
    let z3 = run_machine(config, Variant::Z3Prs, out, &mut files)?;
    let a3 = run_machine(config, Variant::A3Rps, out, &mut files)?;
    let runs = [&z3, &a3];

    let mut metrics = Vec::new();
    let mut failures = Vec::new();
    let mut add = |grids: [&SweepGrid; 2], pref: Preference, metrics: &mut Vec<MetricSummary>| {
        for (k, v) in Variant::ALL.iter().enumerate() {
            let missing = grids[k].missing_count();
            if missing > 0 {
                failures.push(format!("{} {v}: {missing} of {} cells missing", grids[k].name, grids[k].values.len()));
            }
        }
        metrics.push(MetricSummary::new(
            grids[0].name.clone(),
            pref,
            [Stats::of(grids[0]), Stats::of(grids[1])],
        ));
    };
    for f in 0..3 {
        add([&z3.parasitic[f], &a3.parasitic[f]], Preference::Neither, &mut metrics);
    }
    add([&z3.kappa, &a3.kappa], Preference::Lower, &mut metrics);
    for f in 0..6 {
        add([&z3.stiffness[f], &a3.stiffness[f]], Preference::Higher, &mut metrics);
    }
    for (s, dz) in config.workspace_dz.iter().enumerate() {
        metrics.push(MetricSummary::new(
            format!("workspace_area_dz{}", fmt_sig(*dz)),
            Preference::Higher,
            [Some(Stats::scalar(z3.areas[s].1)), Some(Stats::scalar(a3.areas[s].1))],
        ));
    }

    let parasitic_max_diff_mm = max_cell_diff(&z3.parasitic[0], &a3.parasitic[0])
        .max(max_cell_diff(&z3.parasitic[1], &a3.parasitic[1]));
    let parasitic_max_diff_rad = max_cell_diff(&z3.parasitic[2], &a3.parasitic[2]);
    let parasitic_equal =
        parasitic_max_diff_mm <= PARASITIC_TOL_MM && parasitic_max_diff_rad <= PARASITIC_TOL_RAD;

    let cmp: Vec<Option<Variant>> = (0..6).map(|k| better(z3.home[k], a3.home[k])).collect();
    let stiffness_dominant_home = Variant::ALL.into_iter().find(|&v| {
        cmp.iter().all(|c| c.is_none() || *c == Some(v)) && cmp.contains(&Some(v))
    });
    let stiffness_strict_home = stiffness_dominant_home.is_some_and(|v| cmp.iter().all(|c| *c == Some(v)));

    let kappa_peak = [z3.kappa.max(), a3.kappa.max()];
    let condition_peak_higher = match kappa_peak {
        [Some(z), Some(a)] => better(z, a),
        _ => None,
    };

    let z3_workspace_constant = {
        let areas: Vec<f64> = z3.areas.iter().map(|a| a.1).collect();
        let first = areas[0];
        areas.iter().all(|&a| (a - first).abs() <= WORKSPACE_CONSTANT_RTOL * first.abs())
    };
    let a3_workspace_decreasing = {
        let mut by_z = a3.areas.clone();
        by_z.sort_by(|p, q| q.0.total_cmp(&p.0));
        by_z.windows(2).all(|w| w[1].1 < w[0].1)
    };

    let summary = out.join("summary.txt");
    let mut report = ComparisonReport {
        metrics,
        parasitic_max_diff_mm,
        parasitic_max_diff_rad,
        parasitic_equal,
        stiffness_home: [runs[0].home, runs[1].home],
        stiffness_dominant_home,
        stiffness_strict_home,
        kappa_peak,
        condition_peak_higher,
        workspace_areas: [z3.areas.clone(), a3.areas.clone()],
        z3_workspace_constant,
        a3_workspace_decreasing,
        failures,
        files: Vec::new(),
    };
    std::fs::write(&summary, report.to_text())?;
    files.push(summary);
    report.files = files;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tie_detection() {
        assert_eq!(better(1.0, 1.0 + 1e-12), None);
        assert_eq!(better(2.0, 1.0), Some(Variant::Z3Prs));
        assert_eq!(better(1.0, 2.0), Some(Variant::A3Rps));
    }

    #[test]
    fn lower_is_better_flips_dominance() {
        let s = |m| Some(Stats::scalar(m));
        assert_eq!(MetricSummary::new("k", Preference::Lower, [s(1.0), s(2.0)]).dominant, Some(Variant::Z3Prs));
        assert_eq!(MetricSummary::new("k", Preference::Higher, [s(1.0), s(2.0)]).dominant, Some(Variant::A3Rps));
        assert_eq!(MetricSummary::new("k", Preference::Neither, [s(1.0), s(2.0)]).dominant, None);
    }

    #[test]
    fn small_comparison_writes_files_and_flags() {
        let cfg = Config::parse("grid_n = 9\n").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let report = run_comparison(&cfg, dir.path()).unwrap();
        assert!(report.parasitic_equal);
        assert_eq!(report.stiffness_dominant_home, Some(Variant::Z3Prs));
        assert!(report.files.iter().all(|f| f.exists()));
        let text = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
        assert!(text.contains("parasitic_equal = true"));
    }
}

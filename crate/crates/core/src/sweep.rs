//! Grids over the tilt workspace, the condition-number map and workspace slices.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::MechanismParams;
use crate::jacobian::jacobian_at;
use crate::kinematics::{inverse_kinematics, within_stroke};
use crate::parasitic::{solve_loop_closure, CompatiblePose};

/// Largest tilt magnitude accepted by the sweeps.
pub const MAX_TILT: f64 = std::f64::consts::PI / 3.0;

/// Axes of a rectangular grid over `(psi, theta)` in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub psi: Vec<f64>,
    pub theta: Vec<f64>,
}

impl GridSpec {
    /// `n x n` grid spanning `[-half_range, half_range]` on both axes.
    pub fn square(n: usize, half_range: f64) -> Result<Self> {
        Self::new(linspace(-half_range, half_range, n)?, linspace(-half_range, half_range, n)?)
    }

    pub fn square_deg(n: usize, half_range_deg: f64) -> Result<Self> {
        Self::square(n, half_range_deg.to_radians())
    }

    pub fn new(psi: Vec<f64>, theta: Vec<f64>) -> Result<Self> {
        for axis in [&psi, &theta] {
            if axis.is_empty() {
                return Err(Error::InvalidParams("grid axis is empty".into()));
            }
            if axis.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(Error::InvalidParams("grid axis must be strictly increasing".into()));
            }
            if axis.iter().any(|v| !(v.abs() <= MAX_TILT + 1e-12)) {
                return Err(Error::InvalidParams("grid exceeds the ±60° tilt range".into()));
            }
        }
        Ok(Self { psi, theta })
    }

    pub fn len(&self) -> usize {
        self.psi.len() * self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major (psi-major) cell coordinates.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.psi.iter().flat_map(move |&p| self.theta.iter().map(move |&t| (p, t)))
    }

    pub fn index(&self, i_psi: usize, i_theta: usize) -> usize {
        i_psi * self.theta.len() + i_theta
    }

    /// Area of one cell in rad², assuming uniform spacing.
    pub fn cell_area(&self) -> f64 {
        spacing(&self.psi) * spacing(&self.theta)
    }

    /// Evaluate `f` on every cell in parallel; results come back in row-major order.
    pub fn evaluate<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(f64, f64) -> T + Sync + Send,
    {
        let cells: Vec<(f64, f64)> = self.cells().collect();
        cells.into_par_iter().map(|(p, t)| f(p, t)).collect()
    }
}

fn spacing(axis: &[f64]) -> f64 {
    if axis.len() < 2 {
        1.0
    } else {
        (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidParams("grid needs at least one point".into()));
    }
    if n == 1 {
        return Ok(vec![0.5 * (lo + hi)]);
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
        .collect())
}

/// One scalar field over a [`GridSpec`]; `None` marks a missing cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub name: String,
    pub psi_axis: Vec<f64>,
    pub theta_axis: Vec<f64>,
    pub values: Vec<Option<f64>>,
}

impl SweepGrid {
    pub fn new(name: impl Into<String>, spec: &GridSpec, values: Vec<Option<f64>>) -> Self {
        assert_eq!(values.len(), spec.len(), "cell count must match the grid");
        Self {
            name: name.into(),
            psi_axis: spec.psi.clone(),
            theta_axis: spec.theta.clone(),
            values,
        }
    }

    pub fn spec(&self) -> GridSpec {
        GridSpec {
            psi: self.psi_axis.clone(),
            theta: self.theta_axis.clone(),
        }
    }

    pub fn get(&self, i_psi: usize, i_theta: usize) -> Option<f64> {
        self.values[i_psi * self.theta_axis.len() + i_theta]
    }

    pub fn present(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().flatten().copied()
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn min(&self) -> Option<f64> {
        self.present().reduce(f64::min)
    }

    pub fn max(&self) -> Option<f64> {
        self.present().reduce(f64::max)
    }

    pub fn mean(&self) -> Option<f64> {
        let (sum, n) = self.present().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    /// Value at the cell nearest to `(psi, theta)`.
    pub fn nearest(&self, psi: f64, theta: f64) -> Option<f64> {
        let closest = |axis: &[f64], x: f64| {
            axis.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
                .map(|(k, _)| k)
                .unwrap_or(0)
        };
        self.get(closest(&self.psi_axis, psi), closest(&self.theta_axis, theta))
    }
}

/// Loop-closure poses for every cell. The parasitic offsets depend on the
/// tilt only, so one solve per cell serves every downstream map.
pub fn compatible_poses(
    params: &MechanismParams,
    spec: &GridSpec,
    z: f64,
) -> Vec<Result<CompatiblePose>> {
    spec.evaluate(|psi, theta| solve_loop_closure(params, psi, theta, z))
}

/// Condition number of the homogenized Jacobian over the grid.
pub fn condition_map(params: &MechanismParams, spec: &GridSpec, z: f64) -> SweepGrid {
    let values = spec.evaluate(|psi, theta| {
        let cp = solve_loop_closure(params, psi, theta, z).ok()?;
        jacobian_at(params, &cp.pose).ok().map(|set| set.kappa)
    });
    SweepGrid::new("kappa", spec, values)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceSlice {
    pub z: f64,
    /// 1.0 inside, 0.0 outside; never missing.
    pub inside: SweepGrid,
    /// Inside cell count times cell area (rad²).
    pub area: f64,
    pub cell_count: usize,
}

impl WorkspaceSlice {
    pub fn is_inside(&self, i_psi: usize, i_theta: usize) -> bool {
        self.inside.get(i_psi, i_theta) == Some(1.0)
    }
}

/// Tilt-space slice at height `z`: a cell is inside when the inverse
/// kinematics succeeds, every actuator is within stroke and `1/kappa`
/// reaches `kappa_min_inv`.
pub fn workspace_slice(
    params: &MechanismParams,
    spec: &GridSpec,
    z: f64,
    kappa_min_inv: f64,
) -> Result<WorkspaceSlice> {
    if !(kappa_min_inv > 0.0 && kappa_min_inv < 1.0) {
        return Err(Error::InvalidParams(format!(
            "workspace threshold {kappa_min_inv} must lie in (0, 1)"
        )));
    }
    let values = spec.evaluate(|psi, theta| {
        let inside = (|| {
            let cp = solve_loop_closure(params, psi, theta, z).ok()?;
            let limbs = inverse_kinematics(params, &cp.pose).ok()?;
            if !within_stroke(params, &limbs) {
                return None;
            }
            let set = crate::jacobian::build_jacobian(params, &limbs).ok()?;
            (1.0 / set.kappa >= kappa_min_inv).then_some(())
        })()
        .is_some();
        Some(if inside { 1.0 } else { 0.0 })
    });
    let inside = SweepGrid::new("inside", spec, values);
    let cell_count = inside.present().filter(|&v| v == 1.0).count();
    Ok(WorkspaceSlice {
        z,
        area: cell_count as f64 * spec.cell_area(),
        cell_count,
        inside,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{StrokeLimits, Variant};

    #[test]
    fn linspace_endpoints_are_exact() {
        let v = linspace(-0.5, 0.5, 5).unwrap();
        assert_eq!(v, vec![-0.5, -0.25, 0.0, 0.25, 0.5]);
        assert!(linspace(0.0, 1.0, 0).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(vec![0.0, 0.0], vec![0.0]).is_err());
        assert!(GridSpec::square_deg(3, 70.0).is_err());
        let g = GridSpec::square_deg(3, 40.0).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g.index(1, 1), 4);
        assert_eq!(g.cells().nth(4), Some((0.0, 0.0)));
    }

    #[test]
    fn summaries_skip_missing_cells() {
        let spec = GridSpec::square_deg(2, 10.0).unwrap();
        let grid = SweepGrid::new("f", &spec, vec![Some(1.0), None, Some(3.0), Some(5.0)]);
        assert_eq!(grid.min(), Some(1.0));
        assert_eq!(grid.max(), Some(5.0));
        assert_eq!(grid.mean(), Some(3.0));
        assert_eq!(grid.missing_count(), 1);
    }

    #[test]
    fn condition_map_center_and_bounds() {
        let params = MechanismParams::reference(Variant::Z3Prs);
        let spec = GridSpec::square_deg(5, 30.0).unwrap();
        let map = condition_map(&params, &spec, params.home_height());
        assert!((map.get(2, 2).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        assert!(map.present().all(|k| k >= 1.0));
    }

    #[test]
    fn vacuous_threshold_keeps_every_reachable_cell() {
        for variant in Variant::ALL {
            let params = MechanismParams::reference(variant).with_stroke(StrokeLimits::unbounded());
            let spec = GridSpec::square_deg(7, 40.0).unwrap();
            let slice = workspace_slice(&params, &spec, params.home_height(), 1e-9).unwrap();
            assert_eq!(slice.cell_count, spec.len());
            assert!((slice.area - spec.len() as f64 * spec.cell_area()).abs() < 1e-12);
        }
    }

    #[test]
    fn tighter_threshold_never_grows_workspace() {
        let params = MechanismParams::reference(Variant::A3Rps);
        let spec = GridSpec::square_deg(9, 40.0).unwrap();
        let z = params.home_height();
        let loose = workspace_slice(&params, &spec, z, 0.05).unwrap();
        let tight = workspace_slice(&params, &spec, z, 0.2).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert!(!tight.is_inside(i, j) || loose.is_inside(i, j));
            }
        }
        assert!(workspace_slice(&params, &spec, z, 1.0).is_err());
    }
}

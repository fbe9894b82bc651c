//! Parasitic motion: the `v_x`, `v_y`, `w_z` components forced by the limb
//! constraints when the platform is tilted.
//!
//! Each limb constraint reads `s_i . (v + w x a_i) = 0`. Collecting the
//! dependent rates on the left gives `C1 [v_x, v_y, w_z]^T = C2 [w_x, w_y]^T`,
//! and `C = C1^-1 C2`. Heave `v_z` never appears because every revolute axis
//! is horizontal.
//!
//! Two routes reach the pose level: RK4 integration of the velocity coupling
//! along a straight tilt path, and a damped Newton solve of the position-level
//! plane conditions `g_iy = 0`. They are kept independent so each can check
//! the other.

use nalgebra::{Matrix3, Matrix3x2, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{platform_attachment, MechanismParams, Pose, LIMBS};
use crate::kinematics::{limb_frame_coords, PLANE_TOL};
use crate::sweep::{GridSpec, SweepGrid, MAX_TILT};

/// Newton stops once `max |g_iy|` drops below this (mm).
pub const CLOSURE_TOL: f64 = 1e-10;
pub const CLOSURE_MAX_ITER: usize = 100;
const MAX_HALVINGS: usize = 8;

/// Default RK4 step count for tilt-path integration.
pub const DEFAULT_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParasiticCoupling {
    pub c1: Matrix3<f64>,
    pub c2: Matrix3x2<f64>,
    /// Maps `[w_x, w_y]` to `[v_x, v_y, w_z]`.
    pub c: Matrix3x2<f64>,
}

impl ParasiticCoupling {
    pub fn dependent_rates(&self, w_x: f64, w_y: f64) -> Vector3<f64> {
        self.c * Vector2::new(w_x, w_y)
    }
}

/// Parasitic displacement of the platform centre and torsion about `z`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Parasitic {
    pub x: f64,
    pub y: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompatiblePose {
    pub pose: Pose,
    pub psi: f64,
    pub theta: f64,
    pub z: f64,
    pub parasitic: Parasitic,
    /// `max_i |g_iy|` at the returned pose (mm).
    pub residual: f64,
    /// Newton iterations or RK4 steps spent.
    pub iterations: usize,
}

fn pose_of(psi: f64, theta: f64, z: f64, par: &Parasitic) -> Pose {
    Pose::from_tilts(psi, theta, par.gamma, Vector3::new(par.x, par.y, z))
}

fn plane_residual(params: &MechanismParams, pose: &Pose) -> Vector3<f64> {
    Vector3::from_fn(|i, _| limb_frame_coords(params, pose, i).y)
}

fn constraint_rows(params: &MechanismParams, r: &Matrix3<f64>) -> (Matrix3<f64>, Matrix3x2<f64>) {
    let mut c1 = Matrix3::zeros();
    let mut c2 = Matrix3x2::zeros();
    for i in 0..LIMBS {
        let (s, c) = params.xi(i).sin_cos();
        let a = platform_attachment(params, r, i);
        c1[(i, 0)] = -s;
        c1[(i, 1)] = c;
        c1[(i, 2)] = a.x * c + a.y * s;
        c2[(i, 0)] = a.z * c;
        c2[(i, 1)] = a.z * s;
    }
    (c1, c2)
}

/// `C1`, `C2` and `C` at a compatible pose.
pub fn coupling_matrices(params: &MechanismParams, pose: &Pose) -> Result<ParasiticCoupling> {
    let (c1, c2) = constraint_rows(params, &pose.r);
    let det = c1.determinant();
    let scale = c1.norm();
    if det.abs() < 1e-9 * scale * scale * scale {
        return Err(Error::CouplingSingular { det });
    }
    let inv = c1.try_inverse().ok_or(Error::CouplingSingular { det })?;
    Ok(ParasiticCoupling { c1, c2, c: inv * c2 })
}

/// World-frame angular velocity components `(w_x, w_y)` along a tilt path
/// with rates `(dpsi, dtheta)` at the current torsion `gamma`, plus the part
/// of `w_z` not due to `dgamma`. Follows from `R = Rz(gamma) Ry(theta) Rx(psi)`:
/// `w = dgamma z + Rz(gamma) dtheta y + Rz(gamma) Ry(theta) dpsi x`.
pub fn tilt_path_rate(theta: f64, gamma: f64, dpsi: f64, dtheta: f64) -> (f64, f64, f64) {
    let (sg, cg) = gamma.sin_cos();
    let (st, ct) = theta.sin_cos();
    let w_x = -sg * dtheta + cg * ct * dpsi;
    let w_y = cg * dtheta + sg * ct * dpsi;
    let w_z_tilt = -st * dpsi;
    (w_x, w_y, w_z_tilt)
}

fn check_tilt(psi: f64, theta: f64) -> Result<()> {
    if !(psi.abs() <= MAX_TILT + 1e-12 && theta.abs() <= MAX_TILT + 1e-12) {
        return Err(Error::InvalidPose(format!(
            "tilt ({:.3}°, {:.3}°) outside ±60°",
            psi.to_degrees(),
            theta.to_degrees()
        )));
    }
    Ok(())
}

/// Integrate the parasitic rates along the straight path from `(0, 0)` to
/// `(psi_target, theta_target)` at constant heave `z` with classical RK4.
pub fn integrate_parasitic_path(
    params: &MechanismParams,
    psi_target: f64,
    theta_target: f64,
    z: f64,
    steps: usize,
) -> Result<CompatiblePose> {
    check_tilt(psi_target, theta_target)?;
    if steps == 0 {
        return Err(Error::InvalidParams("integration needs at least one step".into()));
    }
    let rhs = |s: f64, state: &Vector3<f64>| -> Result<Vector3<f64>> {
        let psi = s * psi_target;
        let theta = s * theta_target;
        let par = Parasitic { x: state.x, y: state.y, gamma: state.z };
        let coupling = coupling_matrices(params, &pose_of(psi, theta, z, &par))?;
        let (w_x, w_y, w_z_tilt) = tilt_path_rate(theta, par.gamma, psi_target, theta_target);
        let dep = coupling.dependent_rates(w_x, w_y);
        Ok(Vector3::new(dep.x, dep.y, dep.z - w_z_tilt))
    };
    let h = 1.0 / steps as f64;
    let mut state = Vector3::zeros();
    for k in 0..steps {
        let s = k as f64 * h;
        let k1 = rhs(s, &state)?;
        let k2 = rhs(s + 0.5 * h, &(state + 0.5 * h * k1))?;
        let k3 = rhs(s + 0.5 * h, &(state + 0.5 * h * k2))?;
        let k4 = rhs(s + h, &(state + h * k3))?;
        state += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    let parasitic = Parasitic { x: state.x, y: state.y, gamma: state.z };
    let pose = pose_of(psi_target, theta_target, z, &parasitic);
    let residual = plane_residual(params, &pose).amax();
    if !(residual <= PLANE_TOL) {
        return Err(Error::IntegrationDiverged { residual });
    }
    Ok(CompatiblePose {
        pose,
        psi: psi_target,
        theta: theta_target,
        z,
        parasitic,
        residual,
        iterations: steps,
    })
}

/// Solve the plane conditions `g_iy(x, y, gamma) = 0` for given tilts and heave
/// by damped Newton iteration from the origin.
pub fn solve_loop_closure(
    params: &MechanismParams,
    psi: f64,
    theta: f64,
    z: f64,
) -> Result<CompatiblePose> {
    check_tilt(psi, theta)?;
    let mut par = Parasitic::default();
    let mut pose = pose_of(psi, theta, z, &par);
    let mut r = plane_residual(params, &pose);
    let mut iterations = 0;
    while !(r.amax() < CLOSURE_TOL) {
        if iterations == CLOSURE_MAX_ITER || !r.amax().is_finite() {
            return Err(Error::NoConvergence { iterations, residual: r.amax() });
        }
        iterations += 1;
        // d g_iy / d(x, y, gamma) is the C1 row of limb i.
        let step = constraint_rows(params, &pose.r)
            .0
            .lu()
            .solve(&-r)
            .ok_or(Error::NoConvergence { iterations, residual: r.amax() })?;
        let mut scale = 1.0;
        let mut trial;
        let mut trial_pose;
        let mut trial_r;
        let mut halvings = 0;
        loop {
            trial = Parasitic {
                x: par.x + scale * step.x,
                y: par.y + scale * step.y,
                gamma: par.gamma + scale * step.z,
            };
            trial_pose = pose_of(psi, theta, z, &trial);
            trial_r = plane_residual(params, &trial_pose);
            if trial_r.norm() < r.norm() || halvings == MAX_HALVINGS {
                break;
            }
            scale *= 0.5;
            halvings += 1;
        }
        par = trial;
        pose = trial_pose;
        r = trial_r;
    }
    Ok(CompatiblePose {
        pose,
        psi,
        theta,
        z,
        parasitic: par,
        residual: r.amax(),
        iterations,
    })
}

/// Parasitic `x`, `y` and `gamma` over a tilt grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ParasiticMaps {
    pub x: SweepGrid,
    pub y: SweepGrid,
    pub gamma: SweepGrid,
}

/// Loop-closure parasitic fields; cells that fail to converge are missing.
pub fn parasitic_map(params: &MechanismParams, spec: &GridSpec, z: f64) -> ParasiticMaps {
    let cells = spec.evaluate(|psi, theta| solve_loop_closure(params, psi, theta, z).ok());
    let field = |f: fn(&Parasitic) -> f64| -> Vec<Option<f64>> {
        cells.iter().map(|c| c.as_ref().map(|cp| f(&cp.parasitic))).collect()
    };
    ParasiticMaps {
        x: SweepGrid::new("x_mm", spec, field(|p| p.x)),
        y: SweepGrid::new("y_mm", spec, field(|p| p.y)),
        gamma: SweepGrid::new("gamma_rad", spec, field(|p| p.gamma)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{orientation_from_tilts, rot_z, tilts_from_orientation, Variant};
    use crate::jacobian::jacobian_at;
    use approx::assert_relative_eq;
    use nalgebra::Vector6;

    fn z3() -> MechanismParams {
        MechanismParams::reference(Variant::Z3Prs)
    }

    #[test]
    fn home_coupling_vanishes() {
        let params = z3();
        let cpl = coupling_matrices(&params, &params.home_pose()).unwrap();
        assert_eq!(cpl.c2, Matrix3x2::zeros());
        assert!(cpl.c.abs().max() < 1e-15);
    }

    #[test]
    fn coupled_twists_are_feasible() {
        let params = z3();
        let cp = solve_loop_closure(&params, 0.35, -0.2, params.home_height()).unwrap();
        let cpl = coupling_matrices(&params, &cp.pose).unwrap();
        let set = jacobian_at(&params, &cp.pose).unwrap();
        for col in 0..2 {
            let mut w = [0.0; 2];
            w[col] = 1.0;
            let dep = cpl.c.column(col);
            // [v_x, v_y, v_z, w_x, w_y, w_z] with free heave left at zero.
            let twist = Vector6::new(dep[0], dep[1], 0.0, w[0], w[1], dep[2]);
            assert!((set.gc.transpose() * twist).amax() < 1e-9);
        }
    }

    #[test]
    fn coupling_is_machine_independent() {
        let z3 = z3();
        let a3 = MechanismParams::reference(Variant::A3Rps);
        let cp = solve_loop_closure(&z3, 0.2, 0.3, z3.home_height()).unwrap();
        let c_z3 = coupling_matrices(&z3, &cp.pose).unwrap().c;
        let c_a3 = coupling_matrices(&a3, &cp.pose).unwrap().c;
        assert!((c_z3 - c_a3).abs().max() < 1e-12);
    }

    #[test]
    fn loop_closure_at_home_needs_no_iterations() {
        let params = z3();
        let cp = solve_loop_closure(&params, 0.0, 0.0, params.home_height()).unwrap();
        assert_eq!(cp.parasitic, Parasitic::default());
        assert_eq!(cp.iterations, 0);
        assert_eq!(cp.pose, params.home_pose());
    }

    #[test]
    fn integration_at_zero_target_stays_home() {
        let params = z3();
        let cp = integrate_parasitic_path(&params, 0.0, 0.0, params.home_height(), 10).unwrap();
        assert_eq!(cp.parasitic, Parasitic::default());
    }

    #[test]
    fn integration_matches_loop_closure() {
        let params = z3();
        let z = params.home_height();
        let (psi, theta) = (20f64.to_radians(), 10f64.to_radians());
        let rk = integrate_parasitic_path(&params, psi, theta, z, DEFAULT_STEPS).unwrap();
        let nw = solve_loop_closure(&params, psi, theta, z).unwrap();
        assert!((rk.parasitic.x - nw.parasitic.x).abs() < 1e-6);
        assert!((rk.parasitic.y - nw.parasitic.y).abs() < 1e-6);
        assert!((rk.parasitic.gamma - nw.parasitic.gamma).abs() < 1e-8);
    }

    #[test]
    fn tilt_path_rate_matches_rotation_derivative() {
        // w = vee(dR/ds R^T) by central differences.
        let (psi_t, theta_t, dgamma) = (0.4, -0.3, 0.05);
        let s = 0.6;
        let rot = |s: f64| orientation_from_tilts(s * psi_t, s * theta_t, 0.01 + s * dgamma);
        let eps = 1e-6;
        let dr = (rot(s + eps) - rot(s - eps)) / (2.0 * eps);
        let w_hat = dr * rot(s).transpose();
        let w = Vector3::new(w_hat[(2, 1)], w_hat[(0, 2)], w_hat[(1, 0)]);
        let (w_x, w_y, w_z_tilt) = tilt_path_rate(s * theta_t, 0.01 + s * dgamma, psi_t, theta_t);
        assert_relative_eq!(w.x, w_x, epsilon = 1e-8);
        assert_relative_eq!(w.y, w_y, epsilon = 1e-8);
        assert_relative_eq!(w.z, w_z_tilt + dgamma, epsilon = 1e-8);
    }

    #[test]
    fn mirror_symmetry_about_limb_one() {
        // Reflecting y -> -y maps limb 1 onto itself and swaps limbs 2 and 3;
        // it sends psi -> -psi, keeps theta, and flips y and gamma.
        let params = z3();
        let z = params.home_height();
        for (psi, theta) in [(0.35, 0.0), (0.35, 0.17), (-0.2, 0.4)] {
            let a = solve_loop_closure(&params, psi, theta, z).unwrap().parasitic;
            let b = solve_loop_closure(&params, -psi, theta, z).unwrap().parasitic;
            assert_relative_eq!(a.x, b.x, epsilon = 1e-9);
            assert_relative_eq!(a.y, -b.y, epsilon = 1e-9);
            assert_relative_eq!(a.gamma, -b.gamma, epsilon = 1e-12);
        }
    }

    #[test]
    fn rotated_pose_gives_rotated_parasitics() {
        let params = z3();
        let z = params.home_height();
        let cp = solve_loop_closure(&params, 0.3, 0.15, z).unwrap();
        let angle = 2.0 * std::f64::consts::PI / 3.0;
        let turned = cp.pose.rotated_about_z(angle);
        let (psi, theta, gamma) = tilts_from_orientation(&turned.r);
        let other = solve_loop_closure(&params, psi, theta, z).unwrap();
        let expected = rot_z(angle) * Vector3::new(cp.parasitic.x, cp.parasitic.y, 0.0);
        assert!((other.parasitic.x - expected.x).abs() < 1e-9);
        assert!((other.parasitic.y - expected.y).abs() < 1e-9);
        assert!((other.parasitic.gamma - gamma).abs() < 1e-9);
    }

    #[test]
    fn out_of_range_tilt_is_rejected() {
        let params = z3();
        assert!(solve_loop_closure(&params, 1.2, 0.0, 600.0).is_err());
        assert!(integrate_parasitic_path(&params, 0.1, 0.0, 600.0, 0).is_err());
    }

    #[test]
    fn map_center_is_zero_and_point_reflection_is_even() {
        let params = z3();
        let spec = GridSpec::square_deg(9, 40.0).unwrap();
        let maps = parasitic_map(&params, &spec, params.home_height());
        for field in [&maps.x, &maps.y, &maps.gamma] {
            assert_eq!(field.get(4, 4), Some(0.0));
            assert_eq!(field.missing_count(), 0);
            for i in 0..9 {
                for j in 0..9 {
                    let a = field.get(i, j).unwrap();
                    let b = field.get(8 - i, 8 - j).unwrap();
                    assert!((a - b).abs() < 1e-9, "{} at ({i},{j}): {a} vs {b}", field.name);
                }
            }
        }
    }
}

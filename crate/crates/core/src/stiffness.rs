//! Cartesian stiffness `K = G 𝒦 G^T` from series limb compliances.
//!
//! Each limb contributes an actuation spring along its actuation wrench and a
//! constraint spring along its constraint wrench. `𝒦` is the diagonal of those
//! six coefficients. Stiffness is reported at the platform centre.

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::geometry::{MechanismParams, Pose, LIMBS};
use crate::jacobian::{build_jacobian, feasible_basis, JacobianSet};
use crate::kinematics::{inverse_kinematics, spherical_joint_frame, LimbState, SphericalJoint};
use crate::parasitic::solve_loop_closure;
use crate::sweep::{GridSpec, SweepGrid};

/// Feasible-block condition number above which deflection solves are refused.
pub const MAX_FEASIBLE_CONDITION: f64 = 1e12;

/// Names of the six diagonal measures, in order.
pub const MEASURES: [&str; 6] = ["kpx", "kpy", "kpz", "kax", "kay", "kaz"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimbStiffness {
    /// Carriage, revolute joint and limb body in series.
    pub k_a: f64,
    /// Spherical joint (about the constraint axis) and limb body in series.
    pub k_c: f64,
}

/// Stiffness of the spherical joint about `axis`.
///
/// The joint's diagonal stiffness is expressed in frame `O` as
/// `F diag(k_sx, k_sy, k_sz) F^T`, where the columns of `F` are the joint axes.
pub fn spherical_stiffness_effective(params: &MechanismParams, frame: &Matrix3<f64>, axis: &Vector3<f64>) -> f64 {
    let k_world = frame * Matrix3::from_diagonal(&params.stiffness.spherical_diagonal()) * frame.transpose();
    axis.dot(&(k_world * axis))
}

fn series(springs: &[f64]) -> f64 {
    1.0 / springs.iter().map(|k| 1.0 / k).sum::<f64>()
}

pub fn limb_series_stiffness(params: &MechanismParams, limb: &LimbState, joint: &SphericalJoint) -> LimbStiffness {
    let k = &params.stiffness;
    let k_s = spherical_stiffness_effective(params, &joint.frame, &limb.constraint_axis());
    LimbStiffness {
        k_a: series(&[k.k_carriage, k.k_revolute, k.k_limb_body]),
        k_c: series(&[k_s, k.k_limb_body]),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessResult {
    pub k: Matrix6<f64>,
    /// `(kpx, kpy, kpz)` in N/mm.
    pub axial: [f64; 3],
    /// `(kax, kay, kaz)` in N·mm/rad.
    pub torsional: [f64; 3],
    pub limbs: [LimbStiffness; LIMBS],
    pub jacobian: JacobianSet,
}

impl StiffnessResult {
    /// `[kpx, kpy, kpz, kax, kay, kaz]`.
    pub fn measures(&self) -> [f64; 6] {
        let [a, b, c] = self.axial;
        let [d, e, f] = self.torsional;
        [a, b, c, d, e, f]
    }

    /// Diagonal of `𝒦`: three actuation springs then three constraint springs.
    pub fn joint_stiffness(&self) -> Vector6<f64> {
        Vector6::from_fn(|i, _| {
            if i < LIMBS {
                self.limbs[i].k_a
            } else {
                self.limbs[i - LIMBS].k_c
            }
        })
    }
}

/// Stiffness matrix at `pose`.
pub fn assemble_stiffness(params: &MechanismParams, pose: &Pose) -> Result<StiffnessResult> {
    let limb_states = inverse_kinematics(params, pose)?;
    let jacobian = build_jacobian(params, &limb_states)?;
    let mut limbs = [LimbStiffness { k_a: 0.0, k_c: 0.0 }; LIMBS];
    for (slot, limb) in limbs.iter_mut().zip(&limb_states) {
        let joint = spherical_joint_frame(params, pose, limb)?;
        *slot = limb_series_stiffness(params, limb, &joint);
    }
    let springs = Vector6::from_fn(|i, _| if i < LIMBS { limbs[i].k_a } else { limbs[i - LIMBS].k_c });
    let k = jacobian.g * Matrix6::from_diagonal(&springs) * jacobian.g.transpose();
    Ok(StiffnessResult {
        axial: [k[(0, 0)], k[(1, 1)], k[(2, 2)]],
        torsional: [k[(3, 3)], k[(4, 4)], k[(5, 5)]],
        k,
        limbs,
        jacobian,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deflection {
    /// Platform deflection `[dr; dalpha]`.
    pub twist: Vector6<f64>,
    /// Joint deflections `G^T dX`.
    pub joints: Vector6<f64>,
}

/// Deflection of the platform under the external wrench `tau`, solved on
/// the feasible motion subspace.
pub fn deflection_under_load(result: &StiffnessResult, tau: &Vector6<f64>) -> Result<Deflection> {
    let basis = feasible_basis(&result.jacobian.projector);
    let k_ff = basis.transpose() * result.k * basis;
    let sv = k_ff.singular_values();
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_FEASIBLE_CONDITION) {
        return Err(Error::SingularStiffness { condition });
    }
    let tau_f = basis.transpose() * tau;
    let local = k_ff
        .cholesky()
        .map(|c| c.solve(&tau_f))
        .or_else(|| k_ff.lu().solve(&tau_f))
        .ok_or(Error::SingularStiffness { condition })?;
    let twist = basis * local;
    Ok(Deflection {
        twist,
        joints: result.jacobian.g.transpose() * twist,
    })
}

/// One stiffness evaluation keyed by both its tilt and its parasitic offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessSample {
    pub psi: f64,
    pub theta: f64,
    pub x_par: f64,
    pub y_par: f64,
    pub values: [f64; 6],
}

/// Stiffness at the compatible pose of every grid cell.
pub fn stiffness_samples(params: &MechanismParams, spec: &GridSpec, z: f64) -> Vec<Option<StiffnessSample>> {
    spec.evaluate(|psi, theta| {
        let cp = solve_loop_closure(params, psi, theta, z).ok()?;
        let res = assemble_stiffness(params, &cp.pose).ok()?;
        Some(StiffnessSample {
            psi,
            theta,
            x_par: cp.parasitic.x,
            y_par: cp.parasitic.y,
            values: res.measures(),
        })
    })
}

/// The six diagonal measures over the tilt grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StiffnessMaps {
    pub fields: [SweepGrid; 6],
    pub samples: Vec<Option<StiffnessSample>>,
}

impl StiffnessMaps {
    pub fn field(&self, name: &str) -> Option<&SweepGrid> {
        self.fields.iter().find(|f| f.name == name)
    }

    /// The same samples re-keyed by parasitic coordinates.
    pub fn parasitic_space(&self) -> Vec<StiffnessSample> {
        self.samples.iter().flatten().copied().collect()
    }
}

pub fn stiffness_map_rotational(params: &MechanismParams, spec: &GridSpec, z: f64) -> StiffnessMaps {
    let samples = stiffness_samples(params, spec, z);
    let fields = std::array::from_fn(|k| {
        let values = samples.iter().map(|s| s.map(|s| s.values[k])).collect();
        SweepGrid::new(MEASURES[k], spec, values)
    });
    StiffnessMaps { fields, samples }
}

/// Scattered `(x_par, y_par, values)` samples over parasitic space, in grid order.
pub fn stiffness_map_parasitic(params: &MechanismParams, spec: &GridSpec, z: f64) -> Vec<StiffnessSample> {
    stiffness_samples(params, spec, z).into_iter().flatten().collect()
}

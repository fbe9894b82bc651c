//! Constraint-embedded wrench Jacobians.
//!
//! `G = [G_a | G_c]` is 6x6. Its columns are unit-rate wrenches: the three
//! actuation wrenches followed by the three constraint wrenches. For a platform
//! twist `x = [v; w]` (with `v` the velocity of the platform centre) the joint
//! rates are `q_dot = G^T x`; constraint rates must vanish, so feasible twists
//! live in the null space of `G_c^T`.

use nalgebra::{DMatrix, Matrix3, Matrix6, Matrix6x3, Vector6};

use crate::error::{Error, Result};
use crate::geometry::{MechanismParams, Pose, TaskRate, Wrench, LIMBS};
use crate::kinematics::{inverse_kinematics, LimbState};
use crate::linalg::{
    column_space_projector, condition_number, projector_range_basis, pseudo_inverse_6x3, singular_values,
};

/// Moment parts are taken about the platform centre with the lever pointing
/// from the centre to the spherical joint. This is the order under which
/// `G_a^T x` reproduces finite differences of the inverse kinematics.
pub const MOMENT_CONVENTION: &str = "m_i = a_i x f_i, a_i from platform centre to spherical joint";

/// Cosine between strut and actuation axis below which the actuation wrench is undefined.
pub const SINGULAR_LIMB_TOL: f64 = 1e-9;

/// Homogenized Jacobian is singular when `sigma_min < 1e-12 sigma_max`.
pub const SINGULAR_CONFIG_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct JacobianSet {
    pub g: Matrix6<f64>,
    pub ga: Matrix6x3<f64>,
    pub gc: Matrix6x3<f64>,
    pub projector: Matrix6<f64>,
    pub j_hom: Matrix3<f64>,
    pub kappa: f64,
    pub moment_convention: &'static str,
}

impl JacobianSet {
    pub fn active_wrench(&self, i: usize) -> Wrench {
        Wrench::from_vector(&self.ga.column(i).into_owned())
    }

    pub fn constraint_wrench(&self, i: usize) -> Wrench {
        Wrench::from_vector(&self.gc.column(i).into_owned())
    }

    /// Joint rates `[q_a; q_c] = G^T x`.
    pub fn joint_rates(&self, twist: &TaskRate) -> Vector6<f64> {
        self.g.transpose() * twist.to_vector()
    }
}

/// Actuation wrench of one limb: the strut line scaled so that its reciprocal
/// product with a twist is the actuated joint rate.
pub fn active_wrench(limb: &LimbState) -> Result<Wrench> {
    let axis = limb.actuation_axis();
    let projection = limb.l1.dot(&axis);
    if projection.abs() < SINGULAR_LIMB_TOL * limb.l1.norm() {
        return Err(Error::SingularLimb { limb: limb.index + 1, projection });
    }
    Ok(Wrench {
        f_dir: limb.l1 / projection,
        m: limb.attachment.cross(&limb.l1) / projection,
    })
}

/// Constraint wrench of one limb: a unit force along the revolute axis through the spherical joint.
pub fn constraint_wrench(limb: &LimbState) -> Wrench {
    let s = limb.constraint_axis();
    Wrench {
        f_dir: s,
        m: limb.attachment.cross(&s),
    }
}

/// Assemble `G` from the three limb states and derive projector and conditioning.
pub fn build_jacobian(params: &MechanismParams, limbs: &[LimbState; LIMBS]) -> Result<JacobianSet> {
    let mut ga = Matrix6x3::zeros();
    let mut gc = Matrix6x3::zeros();
    for (i, limb) in limbs.iter().enumerate() {
        ga.set_column(i, &active_wrench(limb)?.to_vector());
        gc.set_column(i, &constraint_wrench(limb).to_vector());
    }
    let mut g = Matrix6::zeros();
    g.fixed_columns_mut::<3>(0).copy_from(&ga);
    g.fixed_columns_mut::<3>(3).copy_from(&gc);
    let projector = constraint_projector(&gc)?;
    let (j_hom, kappa) = homogenized_jacobian(&ga, &projector, params.r_platform)?;
    Ok(JacobianSet {
        g,
        ga,
        gc,
        projector,
        j_hom,
        kappa,
        moment_convention: MOMENT_CONVENTION,
    })
}

/// Inverse kinematics followed by [`build_jacobian`].
pub fn jacobian_at(params: &MechanismParams, pose: &Pose) -> Result<JacobianSet> {
    let limbs = inverse_kinematics(params, pose)?;
    build_jacobian(params, &limbs)
}

/// `P = I - G_c G_c^+`, the orthogonal projector onto twists that leave every
/// constraint unexcited.
pub fn constraint_projector(gc: &Matrix6x3<f64>) -> Result<Matrix6<f64>> {
    let (_, rank) = pseudo_inverse_6x3(gc);
    if rank < 3 {
        return Err(Error::RankDeficiency { rank });
    }
    Ok(Matrix6::identity() - column_space_projector(gc))
}

/// Filter an arbitrary twist into the feasible motion space.
pub fn project_task_rate(projector: &Matrix6<f64>, xdot: &Vector6<f64>) -> TaskRate {
    TaskRate::from_vector(&(projector * xdot))
}

/// Dimensionless 3x3 motion Jacobian and its condition number.
///
/// The moment rows of `G_a` are divided by the characteristic length
/// `l_c`, and the result is restricted to the feasible twist space through an
/// orthonormal basis `N` of the range of `P`: `J = (D G_a)^T N`.
pub fn homogenized_jacobian(
    ga: &Matrix6x3<f64>,
    projector: &Matrix6<f64>,
    l_c: f64,
) -> Result<(Matrix3<f64>, f64)> {
    let basis = projector_range_basis(projector);
    let mut scaled = *ga;
    scaled.fixed_rows_mut::<3>(3).scale_mut(1.0 / l_c);
    let j: Matrix3<f64> = scaled.transpose() * basis;
    let sv = singular_values(&DMatrix::from_column_slice(3, 3, j.as_slice()));
    if sv[2] < SINGULAR_CONFIG_RTOL * sv[0] || !sv[0].is_finite() {
        return Err(Error::SingularConfiguration {
            ratio: if sv[0] > 0.0 { sv[2] / sv[0] } else { 0.0 },
        });
    }
    Ok((j, condition_number(&sv)))
}

/// Orthonormal basis of feasible twists (null space of `G_c^T`).
pub fn feasible_basis(projector: &Matrix6<f64>) -> Matrix6x3<f64> {
    projector_range_basis(projector)
}

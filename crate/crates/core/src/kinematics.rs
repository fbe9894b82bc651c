//! Inverse position kinematics of both heads.
//!
//! Each limb is solved in its own frame, obtained by rotating `O` by the limb
//! azimuth and shifting it to the base anchor. In that frame the spherical
//! joint centre has coordinates `g`; a constraint-compatible pose keeps
//! `g.y == 0`, i.e. the strut stays in the plane normal to its revolute axis.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::geometry::{platform_attachment, rot_y, rot_z, MechanismParams, Pose, Variant, LIMBS};

/// Largest out-of-plane offset `|g_y|` (mm) accepted as constraint compatible.
pub const PLANE_TOL: f64 = 1e-6;

/// Relative margin under which the Z3 discriminant counts as zero.
const BOUNDARY_RTOL: f64 = 1e-12;

/// Middle spherical angle closer than this to ±pi/2 is a gimbal lock.
pub const GIMBAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimbState {
    pub index: usize,
    /// Base anchor `A_i` (frame `O`).
    pub anchor: Vector3<f64>,
    /// Platform attachment `a_i`, from the platform centre to the spherical joint (frame `O`).
    pub attachment: Vector3<f64>,
    /// Spherical joint centre `B_i` (frame `O`).
    pub joint: Vector3<f64>,
    /// Spherical joint centre relative to the anchor, in the limb frame.
    pub g: Vector3<f64>,
    /// Strut vector ending at the spherical joint (frame `O`).
    pub l1: Vector3<f64>,
    /// Carriage travel `d_i` (Z3) or strut length `l_i` (A3).
    pub actuated_length: f64,
    /// Direction of the first joint of the limb.
    pub s1_par: Vector3<f64>,
    /// Direction of the second joint of the limb.
    pub s2_par: Vector3<f64>,
    pub variant: Variant,
}

impl LimbState {
    /// Axis of the limb revolute joint, along which the limb transmits its constraint force.
    pub fn constraint_axis(&self) -> Vector3<f64> {
        match self.variant {
            Variant::Z3Prs => self.s2_par,
            Variant::A3Rps => self.s1_par,
        }
    }

    /// Direction of the actuated prismatic joint.
    pub fn actuation_axis(&self) -> Vector3<f64> {
        match self.variant {
            Variant::Z3Prs => self.s1_par,
            Variant::A3Rps => self.s2_par,
        }
    }
}

/// `g_i = Rz(xi_i)^T (p + a_i) - [r_base, 0, 0]`.
pub fn limb_frame_coords(params: &MechanismParams, pose: &Pose, i: usize) -> Vector3<f64> {
    let a = platform_attachment(params, &pose.r, i);
    rot_z(params.xi(i)).transpose() * (pose.p + a) - Vector3::new(params.r_base, 0.0, 0.0)
}

/// Inverse kinematics for the machine named by `params.variant`.
pub fn inverse_kinematics(params: &MechanismParams, pose: &Pose) -> Result<[LimbState; LIMBS]> {
    match params.variant {
        Variant::Z3Prs => ik_z3(params, pose),
        Variant::A3Rps => ik_a3(params, pose),
    }
}

fn check_plane(i: usize, g: &Vector3<f64>) -> Result<()> {
    if g.y.abs() > PLANE_TOL || !g.y.is_finite() {
        return Err(Error::ConstraintViolation { limb: i + 1, g_y: g.y });
    }
    Ok(())
}

/// Sprint Z3: vertical carriages carrying fixed-length struts.
pub fn ik_z3(params: &MechanismParams, pose: &Pose) -> Result<[LimbState; LIMBS]> {
    let l = params.link_length;
    let mut out = Vec::with_capacity(LIMBS);
    for i in 0..LIMBS {
        let g = limb_frame_coords(params, pose, i);
        check_plane(i, &g)?;
        let discriminant = l * l - g.x * g.x - g.y * g.y;
        if discriminant <= BOUNDARY_RTOL * l * l {
            return Err(Error::UnreachablePose { limb: i + 1, discriminant });
        }
        let d = g.z - discriminant.sqrt();
        let anchor = params.anchor(i);
        let attachment = platform_attachment(params, &pose.r, i);
        let joint = pose.p + attachment;
        let l1 = joint - (anchor + Vector3::z() * d);
        out.push(LimbState {
            index: i,
            anchor,
            attachment,
            joint,
            g,
            l1,
            actuated_length: d,
            s1_par: Vector3::z(),
            s2_par: params.revolute_axis(i),
            variant: Variant::Z3Prs,
        });
    }
    Ok(out.try_into().expect("three limbs"))
}

/// A3 head: telescopic struts hinged at the base.
pub fn ik_a3(params: &MechanismParams, pose: &Pose) -> Result<[LimbState; LIMBS]> {
    let mut out = Vec::with_capacity(LIMBS);
    for i in 0..LIMBS {
        let g = limb_frame_coords(params, pose, i);
        check_plane(i, &g)?;
        let length = (g.x * g.x + g.z * g.z).sqrt();
        let anchor = params.anchor(i);
        let attachment = platform_attachment(params, &pose.r, i);
        let joint = pose.p + attachment;
        let l1 = joint - anchor;
        let norm = l1.norm();
        if norm == 0.0 {
            return Err(Error::UnreachablePose { limb: i + 1, discriminant: 0.0 });
        }
        out.push(LimbState {
            index: i,
            anchor,
            attachment,
            joint,
            g,
            l1,
            actuated_length: length,
            s1_par: params.revolute_axis(i),
            s2_par: l1 / norm,
            variant: Variant::A3Rps,
        });
    }
    Ok(out.try_into().expect("three limbs"))
}

/// True when every actuated coordinate lies inside the configured stroke.
pub fn within_stroke(params: &MechanismParams, limbs: &[LimbState; LIMBS]) -> bool {
    limbs.iter().all(|l| params.stroke.contains(l.actuated_length))
}

/// Frames of one spherical joint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalJoint {
    /// Frame of the strut side of the joint with respect to `O`; its columns
    /// are the joint axes. Coincides with the platform-side frame at home.
    pub frame: Matrix3<f64>,
    /// Rotation of the platform side relative to the strut side.
    pub relative: Matrix3<f64>,
    /// `(theta3, theta4, theta5)` with `relative = Ry(theta3) Rx(theta4) Rz(theta5)`.
    pub angles: [f64; 3],
    /// Revolute angle of the strut in its plane, measured from its home inclination.
    pub revolute_angle: f64,
}

/// Inclination of the strut in its plane at the home pose.
fn home_inclination(params: &MechanismParams) -> f64 {
    (params.r_platform - params.r_base).atan2(params.home_height())
}

/// Spherical joint frame of limb `limb.index`.
///
/// The strut side carries `Rz(xi) Ry(theta2)`, where `theta2` is recovered
/// from the strut direction. The platform side carries `R Rz(xi)`, so both
/// sides coincide at home and the relative rotation is the identity there.
pub fn spherical_joint_frame(
    params: &MechanismParams,
    pose: &Pose,
    limb: &LimbState,
) -> Result<SphericalJoint> {
    let rz = rot_z(params.xi(limb.index));
    let local = rz.transpose() * limb.l1;
    let revolute_angle = local.x.atan2(local.z) - home_inclination(params);
    let frame = rz * rot_y(revolute_angle);
    let relative = frame.transpose() * pose.r * rz;
    let middle = (-relative[(1, 2)]).clamp(-1.0, 1.0).asin();
    if (std::f64::consts::FRAC_PI_2 - middle.abs()) < GIMBAL_TOL {
        return Err(Error::GimbalDegeneracy { limb: limb.index + 1, angle: middle });
    }
    let first = relative[(0, 2)].atan2(relative[(2, 2)]);
    let last = relative[(1, 0)].atan2(relative[(1, 1)]);
    Ok(SphericalJoint {
        frame,
        relative,
        angles: [first, middle, last],
        revolute_angle,
    })
}

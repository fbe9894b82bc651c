//! Frames, rotation conventions and machine parameter sets.
//!
//! Frame `O` sits at the centre of the base plane with `x` pointing at limb 1.
//! Frame `O'` sits at the centre of the moving platform. Limbs are numbered
//! 0, 1, 2 in code and placed at azimuths 0, 120 and 240 degrees.
//!
//! Units are mm, rad, N and N·mm throughout.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::{Matrix3, Vector3, Vector6};

use crate::error::{Error, Result};

/// Number of limbs on both machines.
pub const LIMBS: usize = 3;

/// Orthonormality tolerance accepted for a pose rotation.
pub const ROTATION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Sprint Z3 head: actuated prismatic carriage, revolute, spherical (PRS).
    Z3Prs,
    /// A3 head: base revolute, actuated telescopic strut, spherical (RPS).
    A3Rps,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Z3Prs, Variant::A3Rps];

    pub fn short_name(self) -> &'static str {
        match self {
            Variant::Z3Prs => "z3",
            Variant::A3Rps => "a3",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Z3Prs => f.write_str("Z3_PRS"),
            Variant::A3Rps => f.write_str("A3_RPS"),
        }
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z3" | "z3_prs" | "prs" | "sprint_z3" => Ok(Variant::Z3Prs),
            "a3" | "a3_rps" | "rps" | "a3_head" => Ok(Variant::A3Rps),
            other => Err(format!("unknown machine variant `{other}` (expected z3 or a3)")),
        }
    }
}

/// Compliance data for the limb components, shared by all three limbs.
///
/// Linear coefficients are in N/mm, rotational ones in N·mm/rad.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessCoeffs {
    pub k_carriage: f64,
    pub k_revolute: f64,
    pub k_limb_body: f64,
    pub k_sx: f64,
    pub k_sy: f64,
    pub k_sz: f64,
}

impl StiffnessCoeffs {
    pub fn uniform(k: f64) -> Self {
        Self {
            k_carriage: k,
            k_revolute: k,
            k_limb_body: k,
            k_sx: k,
            k_sy: k,
            k_sz: k,
        }
    }

    pub fn spherical_diagonal(&self) -> Vector3<f64> {
        Vector3::new(self.k_sx, self.k_sy, self.k_sz)
    }

    /// Every coefficient multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            k_carriage: self.k_carriage * factor,
            k_revolute: self.k_revolute * factor,
            k_limb_body: self.k_limb_body * factor,
            k_sx: self.k_sx * factor,
            k_sy: self.k_sy * factor,
            k_sz: self.k_sz * factor,
        }
    }

    fn as_array(&self) -> [(&'static str, f64); 6] {
        [
            ("k_carriage", self.k_carriage),
            ("k_revolute", self.k_revolute),
            ("k_limb_body", self.k_limb_body),
            ("k_sx", self.k_sx),
            ("k_sy", self.k_sy),
            ("k_sz", self.k_sz),
        ]
    }
}

impl Default for StiffnessCoeffs {
    fn default() -> Self {
        Self::uniform(1e6)
    }
}

/// Admissible range of the actuated joint coordinate (mm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrokeLimits {
    pub min: f64,
    pub max: f64,
}

impl StrokeLimits {
    pub fn contains(&self, value: f64) -> bool {
        value >= self.min && value <= self.max
    }

    /// Limits that never bind.
    pub fn unbounded() -> Self {
        Self {
            min: f64::NEG_INFINITY,
            max: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MechanismParams {
    pub variant: Variant,
    /// Radius of the circle through the base anchors.
    pub r_base: f64,
    /// Radius of the circle through the spherical joints on the platform.
    pub r_platform: f64,
    /// Fixed strut length (Z3) or nominal telescopic length at home (A3).
    pub link_length: f64,
    pub stiffness: StiffnessCoeffs,
    pub stroke: StrokeLimits,
}

impl MechanismParams {
    pub const TABLE_R_BASE: f64 = 350.0;
    pub const TABLE_R_PLATFORM: f64 = 250.0;
    pub const TABLE_LINK_LENGTH: f64 = 642.3;

    /// Reference geometry shared by both heads, all stiffness coefficients 1e6.
    pub fn reference(variant: Variant) -> Self {
        Self::new(
            variant,
            Self::TABLE_R_BASE,
            Self::TABLE_R_PLATFORM,
            Self::TABLE_LINK_LENGTH,
            StiffnessCoeffs::default(),
        )
        .expect("reference parameters are valid")
    }

    pub fn new(
        variant: Variant,
        r_base: f64,
        r_platform: f64,
        link_length: f64,
        stiffness: StiffnessCoeffs,
    ) -> Result<Self> {
        let params = Self {
            variant,
            r_base,
            r_platform,
            link_length,
            stiffness,
            stroke: default_stroke(variant, link_length),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_stroke(mut self, stroke: StrokeLimits) -> Self {
        self.stroke = stroke;
        self
    }

    pub fn with_variant(mut self, variant: Variant) -> Self {
        if self.stroke == default_stroke(self.variant, self.link_length) {
            self.stroke = default_stroke(variant, self.link_length);
        }
        self.variant = variant;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r_base, self.r_platform, self.link_length]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParams("geometry must be finite".into()));
        }
        if self.r_base <= 0.0 || self.r_platform <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "radii must be positive (r_base = {}, r_platform = {})",
                self.r_base, self.r_platform
            )));
        }
        let min_link = (self.r_base - self.r_platform).max(0.0);
        if self.link_length <= min_link {
            return Err(Error::InvalidParams(format!(
                "link length {} mm must exceed {} mm",
                self.link_length, min_link
            )));
        }
        for (name, k) in self.stiffness.as_array() {
            if !(k > 0.0 && k.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {k}")));
            }
        }
        if self.stroke.min.is_nan() || self.stroke.max.is_nan() || self.stroke.min > self.stroke.max {
            return Err(Error::InvalidParams(format!(
                "stroke limits [{}, {}] are not an interval",
                self.stroke.min, self.stroke.max
            )));
        }
        Ok(())
    }

    /// Azimuth of limb `i`.
    pub fn xi(&self, i: usize) -> f64 {
        limb_azimuth(i)
    }

    /// Base anchor `A_i` in frame `O`.
    pub fn anchor(&self, i: usize) -> Vector3<f64> {
        let xi = self.xi(i);
        Vector3::new(self.r_base * xi.cos(), self.r_base * xi.sin(), 0.0)
    }

    /// Axis of the limb revolute joint, which is also the constraint force direction.
    pub fn revolute_axis(&self, i: usize) -> Vector3<f64> {
        let xi = self.xi(i);
        Vector3::new(-xi.sin(), xi.cos(), 0.0)
    }

    /// Platform height at which the platform is parallel to the base and the
    /// strut has its nominal length.
    pub fn home_height(&self) -> f64 {
        let offset = self.r_base - self.r_platform;
        (self.link_length * self.link_length - offset * offset).sqrt()
    }

    pub fn home_pose(&self) -> Pose {
        Pose::from_tilts(0.0, 0.0, 0.0, Vector3::new(0.0, 0.0, self.home_height()))
    }
}

/// Default stroke of the actuated joint.
///
/// Z3 carriage: ±300 mm about the home position.
/// A3 strut: ±300 mm about the nominal length.
pub fn default_stroke(variant: Variant, link_length: f64) -> StrokeLimits {
    match variant {
        Variant::Z3Prs => StrokeLimits {
            min: -300.0,
            max: 300.0,
        },
        Variant::A3Rps => StrokeLimits {
            min: link_length - 300.0,
            max: link_length + 300.0,
        },
    }
}

pub fn limb_azimuth(i: usize) -> f64 {
    2.0 * PI * i as f64 / LIMBS as f64
}

pub fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

pub fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

pub fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// `Rz(gamma) * Ry(theta) * Rx(psi)`. `gamma` carries the parasitic torsion.
pub fn orientation_from_tilts(psi: f64, theta: f64, gamma: f64) -> Matrix3<f64> {
    rot_z(gamma) * rot_y(theta) * rot_x(psi)
}

/// Inverse of [`orientation_from_tilts`], returning `(psi, theta, gamma)`.
///
/// Valid for `|theta| < pi/2`.
pub fn tilts_from_orientation(r: &Matrix3<f64>) -> (f64, f64, f64) {
    let theta = (-r[(2, 0)]).clamp(-1.0, 1.0).asin();
    let psi = r[(2, 1)].atan2(r[(2, 2)]);
    let gamma = r[(1, 0)].atan2(r[(0, 0)]);
    (psi, theta, gamma)
}

/// Vector from the platform centre to spherical joint `i`, in frame `O`.
pub fn platform_attachment(params: &MechanismParams, r: &Matrix3<f64>, i: usize) -> Vector3<f64> {
    let xi = params.xi(i);
    r * Vector3::new(params.r_platform * xi.cos(), params.r_platform * xi.sin(), 0.0)
}

/// Pose of the moving platform: centre position in `O` and orientation of `O'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub p: Vector3<f64>,
    pub r: Matrix3<f64>,
}

impl Pose {
    /// Checked constructor: `r` must be a proper rotation within [`ROTATION_TOL`].
    pub fn new(p: Vector3<f64>, r: Matrix3<f64>) -> Result<Self> {
        if !p.iter().chain(r.iter()).all(|v| v.is_finite()) {
            return Err(Error::InvalidPose("non-finite entries".into()));
        }
        let ortho = (r.transpose() * r - Matrix3::identity()).abs().max();
        let det = (r.determinant() - 1.0).abs();
        if ortho > ROTATION_TOL || det > ROTATION_TOL {
            return Err(Error::InvalidPose(format!(
                "orientation is not a rotation (|RtR - I| = {ortho:.2e}, |det - 1| = {det:.2e})"
            )));
        }
        Ok(Self { p, r })
    }

    pub fn from_tilts(psi: f64, theta: f64, gamma: f64, p: Vector3<f64>) -> Self {
        Self {
            p,
            r: orientation_from_tilts(psi, theta, gamma),
        }
    }

    /// Advance the pose along a twist for a small step `dt` (exact rotation update).
    pub fn displaced(&self, twist: &TaskRate, dt: f64) -> Self {
        let rotation = nalgebra::Rotation3::from_scaled_axis(twist.w * dt);
        Self {
            p: self.p + twist.v * dt,
            r: rotation.matrix() * self.r,
        }
    }

    /// The pose carried by the 120-degree symmetry of the machines: limb `i`
    /// of the result sits where limb `i + steps` would be.
    pub fn rotated_about_z(&self, angle: f64) -> Self {
        let rz = rot_z(angle);
        Self {
            p: rz * self.p,
            r: rz * self.r * rz.transpose(),
        }
    }
}

/// Platform twist in frame `O`: `v` is the velocity of the platform centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskRate {
    pub v: Vector3<f64>,
    pub w: Vector3<f64>,
}

impl TaskRate {
    pub fn new(v: Vector3<f64>, w: Vector3<f64>) -> Self {
        Self { v, w }
    }

    pub fn from_vector(x: &Vector6<f64>) -> Self {
        Self {
            v: x.fixed_rows::<3>(0).into(),
            w: x.fixed_rows::<3>(3).into(),
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.v.x, self.v.y, self.v.z, self.w.x, self.w.y, self.w.z)
    }

    pub fn is_finite(&self) -> bool {
        self.v.iter().chain(self.w.iter()).all(|c| c.is_finite())
    }
}

/// A wrench as a line direction plus moment about the platform centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub f_dir: Vector3<f64>,
    pub m: Vector3<f64>,
}

impl Wrench {
    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(self.f_dir.x, self.f_dir.y, self.f_dir.z, self.m.x, self.m.y, self.m.z)
    }

    pub fn from_vector(x: &Vector6<f64>) -> Self {
        Self {
            f_dir: x.fixed_rows::<3>(0).into(),
            m: x.fixed_rows::<3>(3).into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_tilts_give_identity() {
        assert_eq!(orientation_from_tilts(0.0, 0.0, 0.0), Matrix3::identity());
    }

    #[test]
    fn pure_psi_is_rotation_about_x() {
        let r = orientation_from_tilts(0.4, 0.0, 0.0);
        assert_relative_eq!(r.column(0).into_owned(), Vector3::x(), epsilon = 1e-15);
        assert_relative_eq!(r[(1, 1)], 0.4f64.cos(), epsilon = 1e-15);
        assert_relative_eq!(r[(2, 1)], 0.4f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn composed_tilts_match_hand_multiplication() {
        let (psi, theta, gamma) = (0.1f64, 0.2f64, 0.05f64);
        // Elementary matrices written out entry by entry.
        let rx = [[1.0, 0.0, 0.0], [0.0, psi.cos(), -psi.sin()], [0.0, psi.sin(), psi.cos()]];
        let ry = [[theta.cos(), 0.0, theta.sin()], [0.0, 1.0, 0.0], [-theta.sin(), 0.0, theta.cos()]];
        let rz = [[gamma.cos(), -gamma.sin(), 0.0], [gamma.sin(), gamma.cos(), 0.0], [0.0, 0.0, 1.0]];
        let mul = |a: [[f64; 3]; 3], b: [[f64; 3]; 3]| {
            let mut c = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        c[i][j] += a[i][k] * b[k][j];
                    }
                }
            }
            c
        };
        let expected = mul(mul(rz, ry), rx);
        let r = orientation_from_tilts(psi, theta, gamma);
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(r[(i, j)], expected[i][j], epsilon = 1e-15);
            }
        }
        let split = rot_z(gamma) * orientation_from_tilts(0.0, theta, 0.0) * orientation_from_tilts(psi, 0.0, 0.0);
        assert!((r - split).abs().max() < 1e-13);
    }

    #[test]
    fn tilts_round_trip() {
        let r = orientation_from_tilts(-0.3, 0.5, 0.02);
        let (psi, theta, gamma) = tilts_from_orientation(&r);
        assert_relative_eq!(psi, -0.3, epsilon = 1e-14);
        assert_relative_eq!(theta, 0.5, epsilon = 1e-14);
        assert_relative_eq!(gamma, 0.02, epsilon = 1e-14);
    }

    #[test]
    fn attachment_at_identity() {
        let params = MechanismParams::reference(Variant::Z3Prs);
        let a0 = platform_attachment(&params, &Matrix3::identity(), 0);
        assert_relative_eq!(a0, Vector3::new(250.0, 0.0, 0.0), epsilon = 1e-12);
        let a1 = platform_attachment(&params, &Matrix3::identity(), 1);
        let expected = Vector3::new(250.0 * (2.0 * PI / 3.0).cos(), 250.0 * (2.0 * PI / 3.0).sin(), 0.0);
        assert_relative_eq!(a1, expected, epsilon = 1e-12);
        assert_relative_eq!(a1.x, -125.0, epsilon = 1e-12);
        assert_relative_eq!(a1.y, 216.506_350_946_109_66, epsilon = 1e-9);
    }

    #[test]
    fn reference_params_and_home_height() {
        let params = MechanismParams::reference(Variant::A3Rps);
        assert_relative_eq!(params.home_height(), (642.3f64 * 642.3 - 100.0 * 100.0).sqrt());
        assert_relative_eq!(params.home_height(), 634.467_721_795_206_8, epsilon = 1e-9);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let bad = MechanismParams::new(Variant::Z3Prs, 350.0, 250.0, 50.0, StiffnessCoeffs::default());
        assert!(matches!(bad, Err(Error::InvalidParams(_))));
        let bad = MechanismParams::new(Variant::Z3Prs, -1.0, 250.0, 600.0, StiffnessCoeffs::default());
        assert!(bad.is_err());
        let mut k = StiffnessCoeffs::default();
        k.k_sy = 0.0;
        assert!(MechanismParams::new(Variant::A3Rps, 350.0, 250.0, 642.3, k).is_err());
    }

    #[test]
    fn pose_rejects_non_rotations() {
        let mut r = Matrix3::identity();
        r[(0, 0)] = 1.001;
        assert!(Pose::new(Vector3::zeros(), r).is_err());
        assert!(Pose::new(Vector3::zeros(), -Matrix3::<f64>::identity()).is_err());
        assert!(Pose::new(Vector3::zeros(), orientation_from_tilts(0.3, 0.2, 0.1)).is_ok());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("z3".parse::<Variant>().unwrap(), Variant::Z3Prs);
        assert_eq!("A3_RPS".parse::<Variant>().unwrap(), Variant::A3Rps);
        assert!("hexapod".parse::<Variant>().is_err());
    }

    proptest::proptest! {
        #[test]
        fn attachment_norm_is_platform_radius(
            psi in -1.5f64..1.5, theta in -1.5f64..1.5, gamma in -3.0f64..3.0, i in 0usize..3
        ) {
            let params = MechanismParams::reference(Variant::Z3Prs);
            let r = orientation_from_tilts(psi, theta, gamma);
            let a = platform_attachment(&params, &r, i);
            proptest::prop_assert!((a.norm() - 250.0).abs() < 1e-10);
        }
    }
}

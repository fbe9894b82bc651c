//! Kinetostatic analysis of two three-limb machining heads: the Sprint Z3
//! (PRS limbs) and the A3 head (RPS limbs).
//!
//! The crate covers inverse kinematics, constraint-embedded wrench Jacobians,
//! parasitic-motion coupling and integration, a homogenized condition number,
//! tilt-space workspace slices and Cartesian stiffness maps, plus the sweep
//! and report plumbing to compare both machines side by side.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod geometry;
pub mod jacobian;
pub mod kinematics;
pub mod linalg;
pub mod output;
pub mod parasitic;
pub mod report;
pub mod stiffness;
pub mod sweep;

pub use error::{Error, Result};
pub use geometry::{MechanismParams, Pose, StiffnessCoeffs, StrokeLimits, TaskRate, Variant, Wrench};

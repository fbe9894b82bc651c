use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("limb {limb} cannot reach its platform joint (discriminant {discriminant:.6e} mm^2)")]
    UnreachablePose { limb: usize, discriminant: f64 },

    #[error("limb {limb} leaves its motion plane (g_y = {g_y:.3e} mm)")]
    ConstraintViolation { limb: usize, g_y: f64 },

    #[error("spherical joint {limb} is at a gimbal singularity (middle angle {angle:.9} rad)")]
    GimbalDegeneracy { limb: usize, angle: f64 },

    #[error("actuation wrench of limb {limb} is undefined (l1 . s = {projection:.3e})")]
    SingularLimb { limb: usize, projection: f64 },

    #[error("constraint wrench matrix has rank {rank}, expected 3")]
    RankDeficiency { rank: usize },

    #[error("homogenized Jacobian is singular (sigma_min / sigma_max = {ratio:.3e})")]
    SingularConfiguration { ratio: f64 },

    #[error("parasitic coupling matrix C1 is singular (det = {det:.3e})")]
    CouplingSingular { det: f64 },

    #[error("parasitic integration drifted off the constraint manifold (residual {residual:.3e} mm)")]
    IntegrationDiverged { residual: f64 },

    #[error("loop closure did not converge after {iterations} iterations (residual {residual:.3e} mm)")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("feasible stiffness block is ill-conditioned (condition number {condition:.3e})")]
    SingularStiffness { condition: f64 },

    #[error("invalid pose: {0}")]
    InvalidPose(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("config error at line {line}, key `{key}`: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Configuration problems are user errors; everything numerical is a failure of the model.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParams(_))
    }

    pub fn is_numerical(&self) -> bool {
        !self.is_config() && !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown arrow `{0}`")]
    UnknownArrow(String),
    #[error("invalid quiver with potential: {0}")]
    InvalidQp(String),
    #[error("invalid vertex subset: {0}")]
    InvalidSubset(String),
    #[error("reduction unsupported: {0}")]
    ReductionUnsupported(String),
    #[error("relations are not homogeneous; exact graded computation refused")]
    NonHomogeneousPotential,
    #[error("Jacobian algebra not certified finite dimensional up to degree {0}")]
    JacobianNotFinite(usize),
    #[error("quiver is not of finite representation type: {0}")]
    NotFiniteType(String),
    #[error("operand is an opaque object")]
    OpaqueOperand,
    #[error("cannot tilt at opaque simple {0}")]
    OpaqueSource(usize),
    #[error("heart has opaque simples")]
    OpaqueHeart,
    #[error("simple index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("chosen simples are not pairwise Ext-orthogonal")]
    NotIndependentSet,
    #[error("search bound {0} exceeded")]
    BoundExceeded(usize),
    #[error("pairing violation: {0}")]
    PairingViolation(String),
    #[error("companion heart does not contain the standard simples of the subset")]
    HeartNotLifted,
    #[error("graph isomorphism failure: {0}")]
    IsomorphismFailure(String),
    #[error("chord ({0}, {1}) is not in the triangulation")]
    ChordNotPresent(usize, usize),
    #[error("invalid polygon data: {0}")]
    InvalidPolygon(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ReductionUnsupported(_)
            | Error::NonHomogeneousPotential
            | Error::JacobianNotFinite(_)
            | Error::NotFiniteType(_)
            | Error::OpaqueOperand
            | Error::OpaqueSource(_)
            | Error::OpaqueHeart
            | Error::NotIndependentSet
            | Error::HeartNotLifted
            | Error::PairingViolation(_)
            | Error::IsomorphismFailure(_) => 2,
            Error::BoundExceeded(_) => 3,
            _ => 1,
        }
    }
}

use thiserror::Error;

use crate::ambient::AmbientError;
use crate::expr::EvalError;
use crate::jet::JetError;

/// Failure modes of the geometric pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Ambient(#[from] AmbientError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("supplied normal is invalid at ({:.6}, {:.6}): {reason}", .point[0], .point[1])]
    InvalidNormal { point: [f64; 2], reason: String },
    #[error("normal direction vanishes at ({:.6}, {:.6}); degenerate singular point", .point[0], .point[1])]
    NormalVanishes { point: [f64; 2] },
    #[error("degenerate singular point at ({:.6}, {:.6}): dλ vanishes", .point[0], .point[1])]
    Degenerate { point: [f64; 2] },
    #[error("rank-zero point at ({:.6}, {:.6})", .point[0], .point[1])]
    RankZero { point: [f64; 2] },
    #[error("({:.6}, {:.6}) is not a singular point (λ = {lambda:.3e})", .point[0], .point[1])]
    NotSingular { point: [f64; 2], lambda: f64 },
    #[error("seed ({:.6}, {:.6}) does not converge onto the singular set", .point[0], .point[1])]
    SeedNotConverged { point: [f64; 2] },
    #[error("({:.6}, {:.6}) lies outside the domain", .point[0], .point[1])]
    OutsideDomain { point: [f64; 2] },
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("requires a Euclidean ambient chart: {0}")]
    NonEuclidean(&'static str),
}

impl GeometryError {
    /// True for failures caused by a degenerate singularity rather than by
    /// numerics or bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            GeometryError::Degenerate { .. } | GeometryError::NormalVanishes { .. } | GeometryError::RankZero { .. }
        )
    }
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;

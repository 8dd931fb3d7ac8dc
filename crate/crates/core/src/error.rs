use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("torsion point modulus must be positive")]
    ZeroModulus,
    #[error("torsion points must have rank 1 or 2, got {0}")]
    BadRank(usize),
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },
    #[error("action and point are incompatible: {0}")]
    KindMismatch(String),
    #[error("invalid automorphism group order {0}; expected 1, 2, 4 or 6")]
    BadGroupOrder(u32),
    #[error("local invariant has order {order}, expected {expected}")]
    NotPrimitive { order: u64, expected: u64 },
    #[error("degenerate point triple: {0}")]
    Degenerate(String),
    #[error("stabilizer may be infinite: need at least 2 labeled points, got {0}")]
    PossiblyInfinite(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("fiber product is not smooth: discriminants meet at {0}")]
    NotSmooth(String),
    #[error("only {available} partner classes available, {requested} requested (smallest suitable even m: {suggested_m})")]
    InsufficientPartners {
        available: u64,
        requested: u64,
        suggested_m: u64,
    },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable snake_case tag for machine-readable reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ZeroModulus => "zero_modulus",
            Error::BadRank(_) => "bad_rank",
            Error::RankMismatch { .. } => "rank_mismatch",
            Error::KindMismatch(_) => "kind_mismatch",
            Error::BadGroupOrder(_) => "bad_group_order",
            Error::NotPrimitive { .. } => "not_primitive",
            Error::Degenerate(_) => "degenerate",
            Error::PossiblyInfinite(_) => "possibly_infinite",
            Error::InvalidConfig(_) => "invalid_config",
            Error::NotSmooth(_) => "not_smooth",
            Error::InsufficientPartners { .. } => "insufficient_partners",
            Error::Parse(_) => "parse",
        }
    }
}

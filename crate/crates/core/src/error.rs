use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("packing has no centers")]
    EmptyPacking,

    #[error("dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("center {index} has {found} coordinates, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },

    #[error("{name} must be non-negative and finite, got {value}")]
    NegativeInput { name: &'static str, value: f64 },

    #[error("{what} = {value} lies outside {domain}")]
    Domain { what: &'static str, value: f64, domain: Interval },

    #[error("operation needs the pairwise regime (1+lambda < 2/sqrt(3)), got 1+lambda = {lambda_bar}")]
    NotPairwise { lambda_bar: f64 },

    #[error("operation is only defined in dimension {expected}, packing has dimension {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("edges {0:?} and {1:?} cross; the straight-line drawing is not plane")]
    CrossingEdges((usize, usize), (usize, usize)),

    #[error("centers {0} and {1} are {2} apart, closer than 2")]
    Overlap(usize, usize, f64),

    #[error("sampling region has zero measure")]
    DegenerateRegion,

    #[error("sample count must be positive")]
    NoSamples,

    #[error("no sign change found while bracketing the root")]
    RootNotBracketed,

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("malformed packing file: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// An interval with open or closed endpoints, used in domain errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub const fn closed(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: true }
    }

    pub const fn open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub const fn closed_open(lo: f64, hi: f64) -> Self {
        Self { lo, hi, lo_closed: true, hi_closed: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    /// Returns `x` unchanged if it lies inside, otherwise a domain error.
    pub fn check(&self, what: &'static str, x: f64) -> Result<f64> {
        if self.contains(x) {
            Ok(x)
        } else {
            Err(Error::Domain { what, value: x, domain: *self })
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("generator index {index} out of range {min}..={max}")]
    IndexOutOfRange { index: usize, min: usize, max: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("invalid rational `{0}` (expected `p/q` or an integer)")]
    InvalidRational(String),

    #[error("unsupported output: {0}")]
    Unsupported(String),

    #[error("phase matrices collide at ({row}, {col}); products must stay monomial")]
    PhaseCollision { row: usize, col: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

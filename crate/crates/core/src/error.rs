use std::path::PathBuf;

use num_complex::Complex64;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{source_name}: row {row}, column {column}: {message}")]
    Parse {
        source_name: String,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{source_name}: malformed matrix: {message}")]
    Format { source_name: String, message: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: A0 is {a0}x{a0}, A1 is {a1}x{a1}")]
    DimensionMismatch { a0: usize, a1: usize },

    #[error("non-finite entry at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("empty matrix")]
    Empty,

    #[error("eigensolver did not converge ({context})")]
    EigenNoConvergence { context: String },

    #[error("the Rekasius parameter T must be non-zero")]
    ZeroRekasiusParameter,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("delay-free system unstable: max Re(eig(A0+A1)) = {max_real:e}")]
    UnstableDelayFree { max_real: f64 },

    #[error("det(A0+A1) vanishes: s=0 is a characteristic root for every delay")]
    ZeroRoot,

    #[error(
        "crossing bracket [{t_lo}, {t_hi}] lost: spectrum at T={t_lo}: {spectrum_lo:?}; at T={t_hi}: {spectrum_hi:?}"
    )]
    BracketLost {
        t_lo: f64,
        t_hi: f64,
        spectrum_lo: Vec<Complex64>,
        spectrum_hi: Vec<Complex64>,
    },

    #[error("crossing frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("dense Kronecker companion needs {required} bytes, cap is {cap} bytes")]
    ResourceGuard { required: u64, cap: u64 },

    #[error("no unit-modulus generalized eigenvalue at omega={omega} (spurious crossing)")]
    SpuriousCrossing { omega: f64 },

    #[error("stability walk went negative at tau={tau}")]
    InconsistentWalk { tau: f64 },

    #[error("scan chunk T in [{t_lo}, {t_hi}] failed: {source}")]
    ChunkFailed {
        t_lo: f64,
        t_hi: f64,
        #[source]
        source: Box<Error>,
    },
}

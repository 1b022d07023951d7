//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

use crate::codebook::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    // --- neuron simulation ---
    #[error("invalid simulation parameters: {0}")]
    InvalidParams(String),
    #[error(
        "current sweep exhausted {max_steps} steps at {last_current_pa} pA with only {seen} of {target} spike levels"
    )]
    NonConvergence {
        target: usize,
        seen: usize,
        max_steps: usize,
        last_current_pa: f64,
    },
    #[error("characterization covers {have} levels but {needed} digits are required")]
    IncompleteCharacterization { needed: usize, have: usize },
    #[error("digit {digit}: two spikes quantize to the same millisecond {millisecond}")]
    QuantizationCollision { digit: u8, millisecond: u8 },

    // --- codebook ---
    #[error("digit {digit} pattern must hold {expected} spikes, found {found}")]
    InvalidPatternSet {
        digit: u8,
        expected: usize,
        found: usize,
    },
    #[error(
        "no spike of digit {digit} has a free nonzero mod-16 remainder (already used: {used_remainders:?})"
    )]
    InfeasibleDigit {
        digit: u8,
        used_remainders: Vec<u8>,
    },
    #[error("codebook violates its invariants: {}", format_violations(.0))]
    InvalidCodebook(Vec<Violation>),
    #[error("codebook JSON: {0}")]
    CodebookJson(#[from] serde_json::Error),

    // --- cipher ---
    #[error("digit {0} is outside 0..=9")]
    InvalidDigit(u8),
    #[error("sign digit {0} is outside 0..=1")]
    InvalidSignDigit(u8),
    #[error("nibble value {0} is outside 0..=15")]
    NibbleRange(u8),
    #[error("digits reconstruct magnitude {magnitude} with sign {sign}, outside the 16-bit sample range")]
    MagnitudeOutOfRange { sign: u8, magnitude: u32 },
    #[error("symbol {symbol} is not a remainder of any codebook entry")]
    NoMatch { symbol: u8 },
    #[error(
        "candidate-position procedure disagrees with remainder lookup for symbol {symbol}, key {key} (lookup said digit {lookup_digit})"
    )]
    CrossCheckFailure {
        symbol: u8,
        key: u8,
        lookup_digit: u8,
    },

    // --- stego codec ---
    #[error("image geometry {width}x{height} does not match {got} data bytes (need {need})")]
    BadImageGeometry {
        width: u32,
        height: u32,
        need: u64,
        got: usize,
    },
    #[error("dither amplitude {0} is outside 0..=3")]
    InvalidDitherAmplitude(u8),
    #[error("payload needs {required_pixels} pixels but the cover has {available_pixels}")]
    PayloadTooLarge {
        required_pixels: u64,
        available_pixels: u64,
    },
    #[error("requested {requested_bits} bits but the image carries at most {available_bits}")]
    RequestExceedsImage {
        requested_bits: u64,
        available_bits: u64,
    },
    #[error("key sidecar was written for a different codebook (fingerprint mismatch)")]
    CodebookMismatch,
    #[error("failed to decode sample {sample_index}: {source}")]
    DecodeFailed {
        sample_index: u64,
        #[source]
        source: Box<Error>,
    },
    #[error("key sidecar truncated: expected {expected} bytes, found {found}")]
    SidecarTruncated { expected: usize, found: usize },
    #[error("not a key sidecar (bad magic)")]
    SidecarMagic,
    #[error("unsupported key sidecar version {0}")]
    SidecarVersion(u8),
    #[error("key sidecar field out of range: {0}")]
    SidecarField(String),

    // --- media ---
    #[error("PNG decode: {0}")]
    PngDecode(#[from] png::DecodingError),
    #[error("PNG encode: {0}")]
    PngEncode(#[from] png::EncodingError),
    #[error("image has no alpha channel ({color}); pass the synthesize policy to add one")]
    MissingAlpha { color: String },
    #[error("unsupported PNG bit depth: {0} bits per channel (only 8 supported)")]
    UnsupportedBitDepth(u8),
    #[error("cannot encode a zero-dimension image")]
    ZeroDimension,
    #[error("malformed RIFF/WAVE data: {0}")]
    MalformedRiff(String),
    #[error("unsupported WAV format: {0}")]
    UnsupportedWavFormat(String),
    #[error("audio clip: {0}")]
    InvalidClip(String),

    // --- metrics ---
    #[error("images differ in size: {a_width}x{a_height} vs {b_width}x{b_height}")]
    DimensionMismatch {
        a_width: u32,
        a_height: u32,
        b_width: u32,
        b_height: u32,
    },
    #[error("image {width}x{height} is smaller than the {window}x{window} comparison window")]
    ImageSmallerThanWindow {
        width: u32,
        height: u32,
        window: u32,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("I/O: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::File {
            path: path.into(),
            source,
        }
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

//! Audio-in-image steganography driven by spiking-neuron codes.
//!
//! The pipeline: 16-bit PCM samples are split into a sign digit plus five
//! decimal digits; each digit selects a leaky integrate-and-fire spike
//! pattern; one spike timestamp per digit, reduced mod 16, becomes the
//! transmitted symbol while the spike's index stays behind as the key;
//! symbols ride in the two low bits of every RGBA channel of a cover
//! image, under a bounded dither. Extraction inverts each stage exactly,
//! so the recovered audio is bit-identical to the input.
//!
//! Start with [`codebook::canonical`] for the digit table, [`stego::embed_audio`] /
//! [`stego::extract_audio`] for the end-to-end codec, and [`lif::characterize`]
//! to rebuild the neuron model behind the table.

pub mod cipher;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod lif;
pub mod media;
pub mod metrics;
pub mod stego;

pub use error::{Error, Result};

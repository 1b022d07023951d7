//! LSB embedding codec: payload bytes into the two low bits of every RGBA
//! channel, one byte per pixel, with a bounded dither pre-pass, plus the
//! audio pipeline that turns clips into pixel payloads and a key sidecar.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cipher::{self, SymbolBlock};
use crate::codebook::Codebook;
use crate::error::{Error, Result};
use crate::media::AudioClip;

/// Row-major RGBA pixels, 8 bits per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: u32,
    pub height: u32,
    /// 4 bytes per pixel: R, G, B, A.
    pub data: Vec<u8>,
}

impl ImageBuffer {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        let need = u64::from(width) * u64::from(height) * 4;
        if data.len() as u64 != need {
            return Err(Error::BadImageGeometry {
                width,
                height,
                need,
                got: data.len(),
            });
        }
        Ok(ImageBuffer {
            width,
            height,
            data,
        })
    }

    /// Uniform fill; handy for synthetic covers.
    pub fn filled(width: u32, height: u32, rgba: [u8; 4]) -> Self {
        let pixels = (width as usize) * (height as usize);
        let mut data = Vec::with_capacity(pixels * 4);
        for _ in 0..pixels {
            data.extend_from_slice(&rgba);
        }
        ImageBuffer {
            width,
            height,
            data,
        }
    }

    pub fn pixel_count(&self) -> u64 {
        u64::from(self.width) * u64::from(self.height)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DitherMode {
    /// Noise counter 0,1,..,amplitude repeating, advancing per channel.
    #[default]
    Cyclic,
    /// Uniform draw from 0..=amplitude per channel, from a seeded generator.
    SeededUniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DitherConfig {
    pub mode: DitherMode,
    /// Maximum noise value; 0..=3.
    pub amplitude: u8,
    /// Consulted by [`DitherMode::SeededUniform`] only.
    pub seed: u64,
}

impl Default for DitherConfig {
    fn default() -> Self {
        DitherConfig {
            mode: DitherMode::Cyclic,
            amplitude: 2,
            seed: 0,
        }
    }
}

impl DitherConfig {
    pub fn validate(&self) -> Result<()> {
        if self.amplitude > 3 {
            return Err(Error::InvalidDitherAmplitude(self.amplitude));
        }
        Ok(())
    }
}

enum NoiseSource {
    Cyclic { counter: u8, period: u8 },
    Seeded { rng: Box<ChaCha8Rng>, amplitude: u8 },
}

impl NoiseSource {
    fn new(dither: &DitherConfig) -> Self {
        match dither.mode {
            DitherMode::Cyclic => NoiseSource::Cyclic {
                counter: 0,
                period: dither.amplitude + 1,
            },
            DitherMode::SeededUniform => NoiseSource::Seeded {
                rng: Box::new(ChaCha8Rng::seed_from_u64(dither.seed)),
                amplitude: dither.amplitude,
            },
        }
    }

    fn next_noise(&mut self) -> u8 {
        match self {
            NoiseSource::Cyclic { counter, period } => {
                let n = *counter;
                *counter = (*counter + 1) % *period;
                n
            }
            NoiseSource::Seeded { rng, amplitude } => rng.gen_range(0..=*amplitude),
        }
    }
}

/// One channel of the embedding: saturating noise add, clear the two low
/// bits, then write the payload pair. `pair` must be 0..=3.
pub fn embed_channel(value: u8, noise: u8, pair: u8) -> u8 {
    (value.saturating_add(noise) & !0b11) | (pair & 0b11)
}

/// Writes `payload` into the image, one byte per pixel in row-major order.
/// Byte bits go most significant first, two per channel in R, G, B, A
/// order, so the earlier bit of each pair lands in LSB bit 1 (value 2).
/// Pixels beyond the payload pass through untouched, with no dither.
pub fn embed_bytes(
    cover: &ImageBuffer,
    payload: &[u8],
    dither: &DitherConfig,
) -> Result<ImageBuffer> {
    dither.validate()?;
    if payload.len() as u64 > cover.pixel_count() {
        return Err(Error::PayloadTooLarge {
            required_pixels: payload.len() as u64,
            available_pixels: cover.pixel_count(),
        });
    }
    let mut out = cover.clone();
    let mut noise = NoiseSource::new(dither);
    for (pixel, &byte) in payload.iter().enumerate() {
        let base = pixel * 4;
        for channel in 0..4 {
            let pair = (byte >> (6 - 2 * channel)) & 0b11;
            out.data[base + channel] =
                embed_channel(out.data[base + channel], noise.next_noise(), pair);
        }
    }
    Ok(out)
}

/// Reads `n_bytes` payload bytes back out of the two LSBs per channel.
/// Inverse traversal of [`embed_bytes`]; upper bits never participate.
pub fn extract_bytes(image: &ImageBuffer, n_bytes: u64) -> Result<Vec<u8>> {
    if n_bytes > image.pixel_count() {
        return Err(Error::RequestExceedsImage {
            requested_bits: n_bytes * 8,
            available_bits: image.pixel_count() * 8,
        });
    }
    let mut out = Vec::with_capacity(n_bytes as usize);
    for pixel in 0..n_bytes as usize {
        let base = pixel * 4;
        let byte = (image.data[base] & 0b11) << 6
            | (image.data[base + 1] & 0b11) << 4
            | (image.data[base + 2] & 0b11) << 2
            | (image.data[base + 3] & 0b11);
        out.push(byte);
    }
    Ok(out)
}

/// What an image can hold: one payload byte per pixel, three pixels per
/// 16-bit audio sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capacity {
    pub payload_bytes: u64,
    pub max_samples: u64,
}

impl Capacity {
    /// Seconds of audio the sample budget covers at the encoded density.
    pub fn max_seconds(&self, sample_rate: u32, channels: u16) -> f64 {
        self.max_samples as f64 / (f64::from(sample_rate) * f64::from(channels))
    }

    /// Seconds if the payload held raw PCM bytes (two per sample) instead;
    /// the looser convention sometimes quoted for LSB capacity.
    pub fn raw_byte_seconds(&self, sample_rate: u32, channels: u16) -> f64 {
        self.payload_bytes as f64 / (f64::from(sample_rate) * f64::from(channels) * 2.0)
    }
}

pub fn capacity(image: &ImageBuffer) -> Capacity {
    let payload_bytes = image.pixel_count();
    Capacity {
        payload_bytes,
        max_samples: payload_bytes / 3,
    }
}

/// Out-of-band decoding companion: key nibbles plus the metadata needed to
/// rebuild the clip and to refuse the wrong codebook.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeySidecar {
    pub channels: u8,
    pub sample_rate: u32,
    pub sample_count: u64,
    pub fingerprint: [u8; 32],
    pub dither: DitherConfig,
    /// Six key nibbles per sample packed two per byte, first nibble in the
    /// high half; exactly 3 bytes per sample.
    pub key_bytes: Vec<u8>,
}

const SIDECAR_MAGIC: &[u8; 4] = b"SSNK";
const SIDECAR_VERSION: u8 = 1;
const SIDECAR_HEADER_LEN: usize = 60;

impl KeySidecar {
    pub fn keys_for_sample(&self, index: u64) -> Option<[u8; 6]> {
        let start = usize::try_from(index.checked_mul(3)?).ok()?;
        let bytes: &[u8; 3] = self.key_bytes.get(start..start + 3)?.try_into().ok()?;
        Some(cipher::unpack_nibbles(bytes))
    }

    /// Little-endian binary layout: magic, version, channels, sample_rate,
    /// sample_count, fingerprint, dither mode, amplitude, seed, key bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(SIDECAR_HEADER_LEN + self.key_bytes.len());
        out.extend_from_slice(SIDECAR_MAGIC);
        out.push(SIDECAR_VERSION);
        out.push(self.channels);
        out.extend_from_slice(&self.sample_rate.to_le_bytes());
        out.extend_from_slice(&self.sample_count.to_le_bytes());
        out.extend_from_slice(&self.fingerprint);
        out.push(match self.dither.mode {
            DitherMode::Cyclic => 0,
            DitherMode::SeededUniform => 1,
        });
        out.push(self.dither.amplitude);
        out.extend_from_slice(&self.dither.seed.to_le_bytes());
        out.extend_from_slice(&self.key_bytes);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<KeySidecar> {
        if bytes.len() < SIDECAR_HEADER_LEN {
            return Err(Error::SidecarTruncated {
                expected: SIDECAR_HEADER_LEN,
                found: bytes.len(),
            });
        }
        if &bytes[0..4] != SIDECAR_MAGIC {
            return Err(Error::SidecarMagic);
        }
        if bytes[4] != SIDECAR_VERSION {
            return Err(Error::SidecarVersion(bytes[4]));
        }
        let channels = bytes[5];
        if !(1..=2).contains(&channels) {
            return Err(Error::SidecarField(format!("channels = {channels}")));
        }
        let sample_rate = u32::from_le_bytes(bytes[6..10].try_into().expect("sized"));
        let sample_count = u64::from_le_bytes(bytes[10..18].try_into().expect("sized"));
        let fingerprint: [u8; 32] = bytes[18..50].try_into().expect("sized");
        let mode = match bytes[50] {
            0 => DitherMode::Cyclic,
            1 => DitherMode::SeededUniform,
            other => return Err(Error::SidecarField(format!("dither mode = {other}"))),
        };
        let amplitude = bytes[51];
        if amplitude > 3 {
            return Err(Error::SidecarField(format!("amplitude = {amplitude}")));
        }
        let seed = u64::from_le_bytes(bytes[52..60].try_into().expect("sized"));
        let key_len = sample_count
            .checked_mul(3)
            .and_then(|n| usize::try_from(n).ok())
            .ok_or_else(|| Error::SidecarField(format!("sample_count = {sample_count}")))?;
        let body = &bytes[SIDECAR_HEADER_LEN..];
        if body.len() < key_len {
            return Err(Error::SidecarTruncated {
                expected: SIDECAR_HEADER_LEN + key_len,
                found: bytes.len(),
            });
        }
        if body.len() > key_len {
            return Err(Error::SidecarField(format!(
                "{} bytes of trailing data",
                body.len() - key_len
            )));
        }
        Ok(KeySidecar {
            channels,
            sample_rate,
            sample_count,
            fingerprint,
            dither: DitherConfig {
                mode,
                amplitude,
                seed,
            },
            key_bytes: body.to_vec(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::file(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<KeySidecar> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
        KeySidecar::from_bytes(&bytes)
    }
}

/// Encrypts the clip and embeds it three pixels per sample, returning the
/// stego image and the sidecar required to decode it.
pub fn embed_audio(
    cover: &ImageBuffer,
    clip: &AudioClip,
    cb: &Codebook,
    dither: &DitherConfig,
) -> Result<(ImageBuffer, KeySidecar)> {
    dither.validate()?;
    let cap = capacity(cover);
    let sample_count = clip.samples.len() as u64;
    if sample_count > cap.max_samples {
        return Err(Error::PayloadTooLarge {
            required_pixels: sample_count * 3,
            available_pixels: cap.payload_bytes,
        });
    }
    let mut payload = Vec::with_capacity(clip.samples.len() * 3);
    let mut key_bytes = Vec::with_capacity(clip.samples.len() * 3);
    for &sample in &clip.samples {
        let SymbolBlock { symbols, keys } = cipher::encrypt_sample(sample, cb);
        payload.extend_from_slice(&cipher::pack_nibbles(&symbols)?);
        key_bytes.extend_from_slice(&cipher::pack_nibbles(&keys)?);
    }
    let stego = embed_bytes(cover, &payload, dither)?;
    let sidecar = KeySidecar {
        channels: clip.channels as u8,
        sample_rate: clip.sample_rate,
        sample_count,
        fingerprint: cb.fingerprint,
        dither: *dither,
        key_bytes,
    };
    Ok((stego, sidecar))
}

/// Inverse of [`embed_audio`]. The sidecar fingerprint is checked against
/// the codebook before any pixel is read.
pub fn extract_audio(stego: &ImageBuffer, sidecar: &KeySidecar, cb: &Codebook) -> Result<AudioClip> {
    if sidecar.fingerprint != cb.fingerprint {
        return Err(Error::CodebookMismatch);
    }
    let payload = extract_bytes(stego, sidecar.sample_count * 3)?;
    let mut samples = Vec::with_capacity(sidecar.sample_count as usize);
    for index in 0..sidecar.sample_count {
        let start = (index * 3) as usize;
        let symbol_bytes: &[u8; 3] = payload[start..start + 3].try_into().expect("sized");
        let block = SymbolBlock {
            symbols: cipher::unpack_nibbles(symbol_bytes),
            keys: sidecar.keys_for_sample(index).ok_or(Error::SidecarTruncated {
                expected: (sidecar.sample_count * 3) as usize,
                found: sidecar.key_bytes.len(),
            })?,
        };
        let sample = cipher::decrypt_sample(&block, cb).map_err(|e| Error::DecodeFailed {
            sample_index: index,
            source: Box::new(e),
        })?;
        samples.push(sample);
    }
    AudioClip::new(sidecar.sample_rate, u16::from(sidecar.channels), samples)
}

//! Lossless file I/O: 8-bit RGBA PNG images and 16-bit PCM WAV audio.
//! Loaders never resample, dither, or gamma-convert; round trips are
//! bit-exact on pixel bytes and sample words.

use std::fs;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use crate::error::{Error, Result};
use crate::stego::ImageBuffer;

/// Interleaved signed 16-bit PCM audio.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AudioClip {
    pub sample_rate: u32,
    /// 1 (mono) or 2 (stereo, interleaved L R L R ...).
    pub channels: u16,
    pub samples: Vec<i16>,
}

impl AudioClip {
    pub fn new(sample_rate: u32, channels: u16, samples: Vec<i16>) -> Result<AudioClip> {
        let clip = AudioClip {
            sample_rate,
            channels,
            samples,
        };
        clip.validate()?;
        Ok(clip)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_rate == 0 {
            return Err(Error::InvalidClip("sample rate must be positive".into()));
        }
        if !(1..=2).contains(&self.channels) {
            return Err(Error::InvalidClip(format!(
                "{} channels (only mono and stereo supported)",
                self.channels
            )));
        }
        if !self.samples.len().is_multiple_of(usize::from(self.channels)) {
            return Err(Error::InvalidClip(format!(
                "{} samples do not divide into {} channels",
                self.samples.len(),
                self.channels
            )));
        }
        Ok(())
    }

    /// Frames per channel.
    pub fn frames(&self) -> usize {
        self.samples.len() / usize::from(self.channels)
    }

    pub fn duration_seconds(&self) -> f64 {
        self.frames() as f64 / f64::from(self.sample_rate)
    }
}

/// What to do with covers that arrive without an alpha channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaPolicy {
    /// Reject anything that is not already RGBA (or gray+alpha).
    Require,
    /// Append an opaque alpha channel to alpha-less input.
    #[default]
    Synthesize,
}

/// Decodes a PNG into an 8-bit RGBA buffer. Palette and sub-8-bit images
/// are expanded; 16-bit channels are rejected rather than truncated;
/// interlaced files are accepted (and deinterlaced) on read.
pub fn load_png(path: impl AsRef<Path>, alpha: AlphaPolicy) -> Result<ImageBuffer> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::file(path, e))?;
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info()?;
    let mut buf = vec![0u8; reader.output_buffer_size()];
    let info = reader.next_frame(&mut buf)?;
    match info.bit_depth {
        png::BitDepth::Eight => {}
        png::BitDepth::Sixteen => return Err(Error::UnsupportedBitDepth(16)),
        other => return Err(Error::UnsupportedBitDepth(other as u8)),
    }
    buf.truncate(info.buffer_size());
    let rgba = match info.color_type {
        png::ColorType::Rgba => buf,
        png::ColorType::Rgb => {
            require_alpha(alpha, "RGB")?;
            let mut out = Vec::with_capacity(buf.len() / 3 * 4);
            for px in buf.chunks_exact(3) {
                out.extend_from_slice(&[px[0], px[1], px[2], 255]);
            }
            out
        }
        png::ColorType::Grayscale => {
            require_alpha(alpha, "grayscale")?;
            let mut out = Vec::with_capacity(buf.len() * 4);
            for &g in &buf {
                out.extend_from_slice(&[g, g, g, 255]);
            }
            out
        }
        png::ColorType::GrayscaleAlpha => {
            let mut out = Vec::with_capacity(buf.len() * 2);
            for px in buf.chunks_exact(2) {
                out.extend_from_slice(&[px[0], px[0], px[0], px[1]]);
            }
            out
        }
        // The EXPAND transformation always rewrites palettes to RGB(A).
        png::ColorType::Indexed => unreachable!("palette output despite expansion"),
    };
    ImageBuffer::new(info.width, info.height, rgba)
}

fn require_alpha(alpha: AlphaPolicy, color: &str) -> Result<()> {
    match alpha {
        AlphaPolicy::Require => Err(Error::MissingAlpha {
            color: color.into(),
        }),
        AlphaPolicy::Synthesize => Ok(()),
    }
}

/// Writes a non-interlaced 8-bit RGBA PNG. Zero-dimension buffers are
/// rejected before anything touches the filesystem.
pub fn save_png(image: &ImageBuffer, path: impl AsRef<Path>) -> Result<()> {
    if image.width == 0 || image.height == 0 {
        return Err(Error::ZeroDimension);
    }
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::file(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), image.width, image.height);
    encoder.set_color(png::ColorType::Rgba);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(&image.data)?;
    writer.finish()?;
    Ok(())
}

const PCM_GUID: [u8; 16] = [
    0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x10, 0x00, 0x80, 0x00, 0x00, 0xAA, 0x00, 0x38, 0x9B, 0x71,
];

pub fn load_wav(path: impl AsRef<Path>) -> Result<AudioClip> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    parse_wav(&bytes)
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedRiff(msg.into())
}

fn le_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes(bytes[at..at + 2].try_into().expect("sized"))
}

fn le_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("sized"))
}

struct WavFormat {
    channels: u16,
    sample_rate: u32,
}

/// Strict RIFF walk: canonical little-endian PCM only, extensible headers
/// normalized when their sub-format GUID is PCM, everything else refused.
fn parse_wav(bytes: &[u8]) -> Result<AudioClip> {
    if bytes.len() < 12 {
        return Err(malformed("file shorter than a RIFF header"));
    }
    if &bytes[0..4] != b"RIFF" {
        return Err(malformed("missing RIFF magic"));
    }
    let declared = le_u32(bytes, 4) as usize;
    if declared != bytes.len() - 8 {
        return Err(malformed(format!(
            "RIFF size {declared} disagrees with file length {}",
            bytes.len()
        )));
    }
    if &bytes[8..12] != b"WAVE" {
        return Err(malformed("not a WAVE container"));
    }

    let mut fmt: Option<WavFormat> = None;
    let mut data: Option<&[u8]> = None;
    let mut offset = 12usize;
    while offset < bytes.len() {
        if bytes.len() - offset < 8 {
            return Err(malformed("truncated chunk header"));
        }
        let id: [u8; 4] = bytes[offset..offset + 4].try_into().expect("sized");
        let size = le_u32(bytes, offset + 4) as usize;
        let body_start = offset + 8;
        let body_end = body_start
            .checked_add(size)
            .filter(|&end| end <= bytes.len())
            .ok_or_else(|| {
                malformed(format!(
                    "chunk {:?} overruns the file",
                    String::from_utf8_lossy(&id)
                ))
            })?;
        let body = &bytes[body_start..body_end];
        match &id {
            b"fmt " => {
                if fmt.is_some() {
                    return Err(malformed("duplicate fmt chunk"));
                }
                fmt = Some(parse_fmt(body)?);
            }
            b"data" => {
                if data.is_some() {
                    return Err(malformed("duplicate data chunk"));
                }
                if fmt.is_none() {
                    return Err(malformed("data chunk precedes fmt chunk"));
                }
                data = Some(body);
            }
            _ => {}
        }
        // Chunk bodies are padded to even offsets.
        offset = body_end + (size & 1);
    }

    let fmt = fmt.ok_or_else(|| malformed("no fmt chunk"))?;
    let data = data.ok_or_else(|| malformed("no data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(malformed("data chunk holds a torn 16-bit word"));
    }
    let words = data.len() / 2;
    if words % usize::from(fmt.channels) != 0 {
        return Err(malformed(format!(
            "{words} sample words do not divide into {} channels",
            fmt.channels
        )));
    }
    let samples = data
        .chunks_exact(2)
        .map(|w| i16::from_le_bytes([w[0], w[1]]))
        .collect();
    AudioClip::new(fmt.sample_rate, fmt.channels, samples)
}

fn parse_fmt(body: &[u8]) -> Result<WavFormat> {
    if body.len() < 16 {
        return Err(malformed("fmt chunk shorter than 16 bytes"));
    }
    let tag = le_u16(body, 0);
    let channels = le_u16(body, 2);
    let sample_rate = le_u32(body, 4);
    let byte_rate = le_u32(body, 8);
    let block_align = le_u16(body, 12);
    let bits = le_u16(body, 14);

    match tag {
        1 => {}
        0xFFFE => {
            if body.len() < 40 {
                return Err(malformed("extensible fmt chunk shorter than 40 bytes"));
            }
            let guid: [u8; 16] = body[24..40].try_into().expect("sized");
            if guid != PCM_GUID {
                return Err(Error::UnsupportedWavFormat(format!(
                    "extensible sub-format {} (only PCM)",
                    hex::encode(guid)
                )));
            }
        }
        3 => {
            return Err(Error::UnsupportedWavFormat(
                "IEEE float samples (format tag 3)".into(),
            ))
        }
        other => {
            return Err(Error::UnsupportedWavFormat(format!(
                "format tag {other} (only PCM)"
            )))
        }
    }
    if bits != 16 {
        return Err(Error::UnsupportedWavFormat(format!(
            "{bits}-bit samples (only 16-bit)"
        )));
    }
    if !(1..=2).contains(&channels) {
        return Err(Error::UnsupportedWavFormat(format!(
            "{channels} channels (only mono and stereo)"
        )));
    }
    let expected_align = channels * 2;
    if block_align != expected_align {
        return Err(malformed(format!(
            "block align {block_align}, expected {expected_align}"
        )));
    }
    let expected_rate = sample_rate
        .checked_mul(u32::from(expected_align))
        .ok_or_else(|| malformed("byte rate overflows".to_string()))?;
    if byte_rate != expected_rate {
        return Err(malformed(format!(
            "byte rate {byte_rate}, expected {expected_rate}"
        )));
    }
    Ok(WavFormat {
        channels,
        sample_rate,
    })
}

/// Writes the canonical 44-byte-header PCM layout: RIFF/WAVE, a 16-byte
/// fmt chunk, then one data chunk of little-endian sample words.
pub fn save_wav(clip: &AudioClip, path: impl AsRef<Path>) -> Result<()> {
    clip.validate()?;
    let data_len = clip.samples.len() * 2;
    let riff_len = u32::try_from(36 + data_len)
        .map_err(|_| Error::InvalidClip("clip too long for a RIFF container".into()))?;
    let block_align = clip.channels * 2;
    let byte_rate = clip
        .sample_rate
        .checked_mul(u32::from(block_align))
        .ok_or_else(|| Error::InvalidClip("byte rate overflows 32 bits".into()))?;

    let mut out = Vec::with_capacity(44 + data_len);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&riff_len.to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&clip.channels.to_le_bytes());
    out.extend_from_slice(&clip.sample_rate.to_le_bytes());
    out.extend_from_slice(&byte_rate.to_le_bytes());
    out.extend_from_slice(&block_align.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for s in &clip.samples {
        out.extend_from_slice(&s.to_le_bytes());
    }
    let path = path.as_ref();
    fs::write(path, out).map_err(|e| Error::file(path, e))
}

//! End-to-end pipeline through real files: synthesize a stereo clip and a
//! textured cover, embed, write PNG + sidecar, reload everything, extract,
//! and verify the recovered audio bit for bit.
//!
//!     cargo run --example audio_roundtrip

use spikestego::codebook;
use spikestego::media::{self, AlphaPolicy, AudioClip};
use spikestego::stego::{self, DitherConfig, ImageBuffer, KeySidecar};

/// Two detuned sine voices with a touch of deterministic grit.
fn synth_clip(seconds: f64, sample_rate: u32) -> AudioClip {
    let frames = (seconds * f64::from(sample_rate)) as usize;
    let mut samples = Vec::with_capacity(frames * 2);
    for n in 0..frames {
        let t = n as f64 / f64::from(sample_rate);
        let left = (t * 220.0 * std::f64::consts::TAU).sin();
        let right = (t * 331.0 * std::f64::consts::TAU).sin();
        let grit = ((n as u32).wrapping_mul(2_654_435_761) >> 20) as f64 / 4096.0 - 0.5;
        samples.push(((left * 0.7 + grit * 0.05) * 28_000.0) as i16);
        samples.push(((right * 0.7 + grit * 0.05) * 28_000.0) as i16);
    }
    AudioClip::new(sample_rate, 2, samples).expect("even sample count")
}

/// Soft diagonal gradient with hashed speckle, opaque alpha.
fn synth_cover(width: u32, height: u32) -> ImageBuffer {
    let mut data = Vec::with_capacity((width * height * 4) as usize);
    for y in 0..height {
        for x in 0..width {
            let base = 90 + ((x + y) % 100) as i32;
            let hash = x.wrapping_mul(73_856_093) ^ y.wrapping_mul(19_349_663);
            let speckle = (hash >> 8) % 25;
            let v = (base + speckle as i32).clamp(0, 255) as u8;
            data.extend_from_slice(&[v, v.wrapping_add(30), v.wrapping_sub(20), 255]);
        }
    }
    ImageBuffer::new(width, height, data).expect("sized")
}

fn main() -> spikestego::Result<()> {
    let cb = codebook::canonical();
    let clip = synth_clip(0.5, 44_100);
    let cover = synth_cover(400, 360);
    let capacity = stego::capacity(&cover);
    println!(
        "clip: {} samples ({} s stereo); cover holds {}",
        clip.samples.len(),
        clip.duration_seconds(),
        capacity.max_samples
    );

    let dir = tempfile::tempdir()?;
    let wav_in = dir.path().join("in.wav");
    let png_cover = dir.path().join("cover.png");
    let png_stego = dir.path().join("stego.png");
    let sidecar_path = dir.path().join("keys.bin");
    let wav_out = dir.path().join("out.wav");

    media::save_wav(&clip, &wav_in)?;
    media::save_png(&cover, &png_cover)?;

    // Sender side: everything reloaded from disk, nothing shared in memory.
    let cover = media::load_png(&png_cover, AlphaPolicy::Require)?;
    let clip_in = media::load_wav(&wav_in)?;
    let (stego, sidecar) = stego::embed_audio(&cover, &clip_in, &cb, &DitherConfig::default())?;
    media::save_png(&stego, &png_stego)?;
    sidecar.save(&sidecar_path)?;

    // Receiver side: stego PNG + sidecar + codebook are the whole channel.
    let received = media::load_png(&png_stego, AlphaPolicy::Require)?;
    let keys = KeySidecar::load(&sidecar_path)?;
    let recovered = stego::extract_audio(&received, &keys, &cb)?;
    media::save_wav(&recovered, &wav_out)?;

    assert_eq!(recovered, clip_in, "recovered clip differs");
    assert_eq!(std::fs::read(&wav_in)?, std::fs::read(&wav_out)?);
    println!(
        "recovered {} samples bit-exactly ({}% of cover capacity used)",
        recovered.samples.len(),
        100 * recovered.samples.len() as u64 / capacity.max_samples
    );
    Ok(())
}

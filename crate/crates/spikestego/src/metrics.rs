//! Image fidelity measures: per-channel MSE, PSNR, and windowed SSIM over
//! RGB or RGBA planes.

use std::fmt;

use crate::error::{Error, Result};
use crate::stego::ImageBuffer;

/// Which channels participate in an average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelMode {
    Rgb,
    Rgba,
}

impl ChannelMode {
    fn channels(self) -> usize {
        match self {
            ChannelMode::Rgb => 3,
            ChannelMode::Rgba => 4,
        }
    }
}

/// PSNR in decibels. Identical inputs have zero error, which this reports
/// explicitly instead of as some large stand-in number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Psnr {
    Infinite,
    Decibels(f64),
}

impl Psnr {
    fn from_mse(mse: f64) -> Psnr {
        if mse == 0.0 {
            Psnr::Infinite
        } else {
            Psnr::Decibels(10.0 * (255.0f64 * 255.0 / mse).log10())
        }
    }

    /// Finite value, if there is one.
    pub fn db(&self) -> Option<f64> {
        match self {
            Psnr::Infinite => None,
            Psnr::Decibels(v) => Some(*v),
        }
    }

    /// True when this PSNR clears `floor_db` (infinite always does).
    pub fn at_least(&self, floor_db: f64) -> bool {
        match self {
            Psnr::Infinite => true,
            Psnr::Decibels(v) => *v >= floor_db,
        }
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Infinite => f.pad("inf"),
            Psnr::Decibels(v) => f.pad(&format!("{v:.4}")),
        }
    }
}

fn check_dims(a: &ImageBuffer, b: &ImageBuffer) -> Result<()> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::DimensionMismatch {
            a_width: a.width,
            a_height: a.height,
            b_width: b.width,
            b_height: b.height,
        });
    }
    Ok(())
}

/// Mean squared error of each of the four channels separately.
pub fn channel_mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<[f64; 4]> {
    check_dims(a, b)?;
    let pixels = a.pixel_count();
    if pixels == 0 {
        return Ok([0.0; 4]);
    }
    let mut sums = [0f64; 4];
    for (pa, pb) in a.data.chunks_exact(4).zip(b.data.chunks_exact(4)) {
        for c in 0..4 {
            let d = f64::from(i16::from(pa[c]) - i16::from(pb[c]));
            sums[c] += d * d;
        }
    }
    Ok(sums.map(|s| s / pixels as f64))
}

/// MSE averaged over the compared channels and all pixels.
pub fn mse(a: &ImageBuffer, b: &ImageBuffer, mode: ChannelMode) -> Result<f64> {
    let per_channel = channel_mse(a, b)?;
    let n = mode.channels();
    Ok(per_channel[..n].iter().sum::<f64>() / n as f64)
}

pub fn psnr(a: &ImageBuffer, b: &ImageBuffer, mode: ChannelMode) -> Result<Psnr> {
    Ok(Psnr::from_mse(mse(a, b, mode)?))
}

/// Side of the square SSIM window.
pub const SSIM_WINDOW: u32 = 11;
const SSIM_SIGMA: f64 = 1.5;

fn gaussian_kernel() -> [f64; SSIM_WINDOW as usize] {
    let mut k = [0f64; SSIM_WINDOW as usize];
    let mid = (SSIM_WINDOW / 2) as f64;
    for (i, v) in k.iter_mut().enumerate() {
        let d = i as f64 - mid;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let total: f64 = k.iter().sum();
    k.map(|v| v / total)
}

/// Valid-region separable blur: horizontal then vertical passes shrink the
/// plane by window−1 in each dimension.
fn blur_valid(plane: &[f64], w: usize, h: usize, kernel: &[f64]) -> Vec<f64> {
    let taps = kernel.len();
    let ww = w - taps + 1;
    let mut rows = vec![0f64; ww * h];
    for y in 0..h {
        for x in 0..ww {
            let mut s = 0.0;
            for (t, k) in kernel.iter().enumerate() {
                s += plane[y * w + x + t] * k;
            }
            rows[y * ww + x] = s;
        }
    }
    let hh = h - taps + 1;
    let mut out = vec![0f64; ww * hh];
    for y in 0..hh {
        for x in 0..ww {
            let mut s = 0.0;
            for (t, k) in kernel.iter().enumerate() {
                s += rows[(y + t) * ww + x] * k;
            }
            out[y * ww + x] = s;
        }
    }
    out
}

fn channel_ssim(a: &ImageBuffer, b: &ImageBuffer, channel: usize, kernel: &[f64]) -> f64 {
    let (w, h) = (a.width as usize, a.height as usize);
    let n = w * h;
    let mut pa = vec![0f64; n];
    let mut pb = vec![0f64; n];
    for i in 0..n {
        pa[i] = f64::from(a.data[i * 4 + channel]);
        pb[i] = f64::from(b.data[i * 4 + channel]);
    }
    let paa: Vec<f64> = pa.iter().map(|v| v * v).collect();
    let pbb: Vec<f64> = pb.iter().map(|v| v * v).collect();
    let pab: Vec<f64> = pa.iter().zip(&pb).map(|(x, y)| x * y).collect();

    let mu_a = blur_valid(&pa, w, h, kernel);
    let mu_b = blur_valid(&pb, w, h, kernel);
    let m_aa = blur_valid(&paa, w, h, kernel);
    let m_bb = blur_valid(&pbb, w, h, kernel);
    let m_ab = blur_valid(&pab, w, h, kernel);

    let c1 = (0.01f64 * 255.0) * (0.01 * 255.0);
    let c2 = (0.03f64 * 255.0) * (0.03 * 255.0);
    let mut total = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = m_aa[i] - ma * ma;
        let vb = m_bb[i] - mb * mb;
        let cov = m_ab[i] - ma * mb;
        total += (2.0 * ma * mb + c1) * (2.0 * cov + c2)
            / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    total / mu_a.len() as f64
}

/// Mean structural similarity over an 11x11 Gaussian window (sigma 1.5,
/// K1 0.01, K2 0.03, dynamic range 255), valid windows only, computed per
/// channel and then averaged over the compared channels.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer, mode: ChannelMode) -> Result<f64> {
    check_dims(a, b)?;
    if a.width < SSIM_WINDOW || a.height < SSIM_WINDOW {
        return Err(Error::ImageSmallerThanWindow {
            width: a.width,
            height: a.height,
            window: SSIM_WINDOW,
        });
    }
    let kernel = gaussian_kernel();
    let n = mode.channels();
    let mut acc = 0.0;
    for channel in 0..n {
        acc += channel_ssim(a, b, channel, &kernel);
    }
    Ok(acc / n as f64)
}

/// Everything the quality table needs for one cover/stego pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub mse_per_channel: [f64; 4],
    pub psnr_rgb: Psnr,
    pub psnr_rgba: Psnr,
    pub ssim_rgb: f64,
    pub ssim_rgba: f64,
}

pub fn fidelity_report(a: &ImageBuffer, b: &ImageBuffer) -> Result<FidelityReport> {
    Ok(FidelityReport {
        mse_per_channel: channel_mse(a, b)?,
        psnr_rgb: psnr(a, b, ChannelMode::Rgb)?,
        psnr_rgba: psnr(a, b, ChannelMode::Rgba)?,
        ssim_rgb: ssim(a, b, ChannelMode::Rgb)?,
        ssim_rgba: ssim(a, b, ChannelMode::Rgba)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn textured(width: u32, height: u32, seed: u64) -> ImageBuffer {
        let mut rng = StdRng::seed_from_u64(seed);
        let data = (0..(width * height * 4) as usize)
            .map(|_| 100 + rng.gen_range(0u8..=60))
            .collect();
        ImageBuffer::new(width, height, data).unwrap()
    }

    /// Direct 121-tap implementation, one window at a time; the product
    /// kernel is built independently of the separable path.
    fn ssim_reference(a: &ImageBuffer, b: &ImageBuffer, mode: ChannelMode) -> f64 {
        let kernel = gaussian_kernel();
        let taps = kernel.len();
        let (w, h) = (a.width as usize, a.height as usize);
        let c1 = 6.5025;
        let c2 = 58.5225;
        let channels = match mode {
            ChannelMode::Rgb => 3,
            ChannelMode::Rgba => 4,
        };
        let mut channel_means = Vec::new();
        for c in 0..channels {
            let mut total = 0.0;
            let mut windows = 0u64;
            for y0 in 0..=(h - taps) {
                for x0 in 0..=(w - taps) {
                    let (mut ma, mut mb) = (0.0, 0.0);
                    let (mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0);
                    for dy in 0..taps {
                        for dx in 0..taps {
                            let weight = kernel[dy] * kernel[dx];
                            let i = ((y0 + dy) * w + x0 + dx) * 4 + c;
                            let (x, y) = (f64::from(a.data[i]), f64::from(b.data[i]));
                            ma += weight * x;
                            mb += weight * y;
                            aa += weight * x * x;
                            bb += weight * y * y;
                            ab += weight * x * y;
                        }
                    }
                    let va = aa - ma * ma;
                    let vb = bb - mb * mb;
                    let cov = ab - ma * mb;
                    total += (2.0 * ma * mb + c1) * (2.0 * cov + c2)
                        / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                    windows += 1;
                }
            }
            channel_means.push(total / windows as f64);
        }
        channel_means.iter().sum::<f64>() / channels as f64
    }

    #[test]
    fn identical_images_score_perfectly() {
        let img = textured(16, 16, 3);
        assert_eq!(psnr(&img, &img, ChannelMode::Rgb).unwrap(), Psnr::Infinite);
        assert_eq!(psnr(&img, &img, ChannelMode::Rgba).unwrap(), Psnr::Infinite);
        assert_eq!(ssim(&img, &img, ChannelMode::Rgb).unwrap(), 1.0);
        assert_eq!(ssim(&img, &img, ChannelMode::Rgba).unwrap(), 1.0);
        assert!(psnr(&img, &img, ChannelMode::Rgb).unwrap().at_least(1e9));
    }

    #[test]
    fn uniform_difference_matches_hand_psnr() {
        // Every compared byte differs by exactly 2: MSE 4.
        let a = ImageBuffer::filled(2, 2, [100, 100, 100, 100]);
        let b = ImageBuffer::filled(2, 2, [102, 102, 102, 102]);
        for mode in [ChannelMode::Rgb, ChannelMode::Rgba] {
            let db = psnr(&a, &b, mode).unwrap().db().unwrap();
            assert!((db - 42.110).abs() < 1e-3, "got {db}");
        }
        assert_eq!(mse(&a, &b, ChannelMode::Rgba).unwrap(), 4.0);
    }

    #[test]
    fn rgb_mode_ignores_the_alpha_plane() {
        let a = ImageBuffer::filled(4, 4, [10, 20, 30, 0]);
        let b = ImageBuffer::filled(4, 4, [10, 20, 30, 255]);
        assert_eq!(psnr(&a, &b, ChannelMode::Rgb).unwrap(), Psnr::Infinite);
        let rgba = psnr(&a, &b, ChannelMode::Rgba).unwrap().db().unwrap();
        assert!(rgba < 20.0);
    }

    #[test]
    fn rgba_mse_decomposes_over_channels() {
        let a = textured(8, 8, 4);
        let b = textured(8, 8, 5);
        let per = channel_mse(&a, &b).unwrap();
        let mse_rgb = mse(&a, &b, ChannelMode::Rgb).unwrap();
        let mse_rgba = mse(&a, &b, ChannelMode::Rgba).unwrap();
        assert!((mse_rgba - (3.0 * mse_rgb + per[3]) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn scores_are_symmetric() {
        let a = textured(20, 14, 6);
        let b = textured(20, 14, 7);
        assert_eq!(
            psnr(&a, &b, ChannelMode::Rgba).unwrap(),
            psnr(&b, &a, ChannelMode::Rgba).unwrap()
        );
        assert_eq!(
            ssim(&a, &b, ChannelMode::Rgb).unwrap(),
            ssim(&b, &a, ChannelMode::Rgb).unwrap()
        );
    }

    #[test]
    fn separable_ssim_matches_direct_convolution() {
        let a = textured(18, 13, 8);
        let b = textured(18, 13, 9);
        for mode in [ChannelMode::Rgb, ChannelMode::Rgba] {
            let fast = ssim(&a, &b, mode).unwrap();
            let slow = ssim_reference(&a, &b, mode);
            assert!((fast - slow).abs() < 1e-9, "fast {fast} vs slow {slow}");
        }
    }

    #[test]
    fn inversion_is_structurally_anti_correlated() {
        let a = textured(24, 24, 10);
        let mut inverted = a.clone();
        for v in &mut inverted.data {
            *v = 255 - *v;
        }
        let s = ssim(&a, &inverted, ChannelMode::Rgb).unwrap();
        assert!(s < -0.3, "got {s}");
        assert!(s >= -1.0);
        let slow = ssim_reference(&a, &inverted, ChannelMode::Rgb);
        assert!((s - slow).abs() < 1e-9);
    }

    #[test]
    fn heavier_noise_scores_worse() {
        let base = textured(64, 64, 11);
        let mut rng = StdRng::seed_from_u64(12);
        let noisy = |amp: u8, rng: &mut StdRng| {
            let mut img = base.clone();
            for v in &mut img.data {
                *v = v.saturating_add(rng.gen_range(0..=amp));
            }
            img
        };
        let light = noisy(2, &mut rng);
        let heavy = noisy(20, &mut rng);
        let psnr_light = psnr(&base, &light, ChannelMode::Rgba).unwrap().db().unwrap();
        let psnr_heavy = psnr(&base, &heavy, ChannelMode::Rgba).unwrap().db().unwrap();
        assert!(psnr_light > psnr_heavy + 5.0);
        let ssim_light = ssim(&base, &light, ChannelMode::Rgba).unwrap();
        let ssim_heavy = ssim(&base, &heavy, ChannelMode::Rgba).unwrap();
        assert!(ssim_light > ssim_heavy);
    }

    #[test]
    fn dimension_rules_are_enforced() {
        let a = textured(12, 12, 13);
        let b = textured(12, 13, 13);
        assert!(matches!(
            psnr(&a, &b, ChannelMode::Rgb),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ssim(&a, &b, ChannelMode::Rgb),
            Err(Error::DimensionMismatch { .. })
        ));
        let small = textured(10, 12, 14);
        let small2 = textured(10, 12, 15);
        assert!(psnr(&small, &small2, ChannelMode::Rgb).is_ok());
        assert!(matches!(
            ssim(&small, &small2, ChannelMode::Rgb),
            Err(Error::ImageSmallerThanWindow { window: 11, .. })
        ));
    }

    #[test]
    fn report_carries_every_figure() {
        let a = textured(16, 16, 16);
        let b = textured(16, 16, 17);
        let report = fidelity_report(&a, &b).unwrap();
        assert_eq!(report.psnr_rgb, psnr(&a, &b, ChannelMode::Rgb).unwrap());
        assert_eq!(report.ssim_rgba, ssim(&a, &b, ChannelMode::Rgba).unwrap());
        assert_eq!(report.mse_per_channel, channel_mse(&a, &b).unwrap());
        assert_eq!(format!("{}", Psnr::Infinite), "inf");
        assert_eq!(format!("{}", Psnr::Decibels(42.11027)), "42.1103");
    }

    proptest! {
        #[test]
        fn ssim_stays_in_unit_range(
            seed_a in any::<u64>(),
            seed_b in any::<u64>(),
            w in 11u32..20,
            h in 11u32..20,
        ) {
            let a = textured(w, h, seed_a);
            let b = textured(w, h, seed_b);
            let s = ssim(&a, &b, ChannelMode::Rgba).unwrap();
            prop_assert!((-1.0..=1.0).contains(&s));
        }
    }
}

//! Command-line surface: characterize the neuron, generate codebooks,
//! embed, extract, measure fidelity, report capacity, and run end-to-end
//! round trips. Exit code 0 means the requested artifact was fully
//! written and verified; failures remove partial outputs.

use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::codebook::{self, Codebook};
use crate::error::{Error, Result};
use crate::lif::{self, LifParams, SweepConfig};
use crate::media::{self, AlphaPolicy};
use crate::metrics::{self, ChannelMode, Psnr, SSIM_WINDOW};
use crate::stego::{self, Capacity, DitherConfig, DitherMode, KeySidecar};

/// Parsed invocation: one subcommand plus its options.
#[derive(Debug, Parser)]
#[command(
    name = "spikestego",
    version,
    about = "Hide 16-bit PCM audio in RGBA image low bits using spiking-neuron codes"
)]
pub struct RunConfig {
    /// Suppress human-readable summaries (machine --emit output still prints)
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sweep stimulation currents until every spike count up to the target resolves
    Characterize(CharacterizeArgs),
    /// Derive, validate, fingerprint, and write a digit codebook as JSON
    GenCodebook(GenCodebookArgs),
    /// Encrypt a WAV clip into the low bits of a cover PNG
    Embed(EmbedArgs),
    /// Recover the WAV clip from a stego PNG and its key sidecar
    Extract(ExtractArgs),
    /// Measure MSE, PSNR, and SSIM between two images
    Metrics(MetricsArgs),
    /// Report how much audio an image can carry
    Capacity(CapacityArgs),
    /// Embed into temp files, extract back, and verify bit-exactness
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DitherModeArg {
    /// Repeating 0,1,..,amplitude counter
    Cyclic,
    /// Seeded uniform draw per channel
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlphaArg {
    /// Reject covers without an alpha channel
    Require,
    /// Add an opaque alpha channel when missing
    Synthesize,
}

impl From<AlphaArg> for AlphaPolicy {
    fn from(a: AlphaArg) -> AlphaPolicy {
        match a {
            AlphaArg::Require => AlphaPolicy::Require,
            AlphaArg::Synthesize => AlphaPolicy::Synthesize,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EmitArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct CodebookOpt {
    /// Codebook JSON path (defaults to the built-in table)
    #[arg(long, value_name = "PATH")]
    codebook: Option<PathBuf>,
}

impl CodebookOpt {
    fn load(&self) -> Result<Codebook> {
        match &self.codebook {
            Some(path) => Codebook::load(path),
            None => Ok(codebook::canonical()),
        }
    }
}

#[derive(Debug, Args)]
struct DitherOpt {
    /// Noise pattern added before the low bits are cleared
    #[arg(long = "dither-mode", value_enum, default_value_t = DitherModeArg::Cyclic)]
    dither_mode: DitherModeArg,
    /// Largest noise value added to a channel
    #[arg(long = "dither-amp", default_value_t = 2, value_parser = clap::value_parser!(u8).range(0..=3))]
    dither_amp: u8,
    /// Noise generator seed (uniform mode only)
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl DitherOpt {
    fn config(&self) -> DitherConfig {
        DitherConfig {
            mode: match self.dither_mode {
                DitherModeArg::Cyclic => DitherMode::Cyclic,
                DitherModeArg::Uniform => DitherMode::SeededUniform,
            },
            amplitude: self.dither_amp,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
struct SweepOpt {
    /// First stimulation current tested, in pA
    #[arg(long = "i-start", default_value_t = 370.0)]
    i_start: f64,
    /// Sweep increment, in pA
    #[arg(long, default_value_t = 1.0)]
    di: f64,
    /// Give up after this many simulations
    #[arg(long = "max-steps", default_value_t = 5000)]
    max_steps: usize,
}

#[derive(Debug, Args)]
struct CharacterizeArgs {
    #[command(flatten)]
    sweep: SweepOpt,
    /// Spike-count levels to resolve (counts 0 through N-1)
    #[arg(long = "target-levels", default_value_t = 10)]
    target_levels: usize,
    /// Write the full (current, count) trace as CSV
    #[arg(long = "sweep-csv", value_name = "PATH")]
    sweep_csv: Option<PathBuf>,
    /// Write the resolved level table as JSON
    #[arg(long = "levels-json", value_name = "PATH")]
    levels_json: Option<PathBuf>,
    /// Print the level table as machine-readable CSV or JSON
    #[arg(long, value_enum)]
    emit: Option<EmitArg>,
}

#[derive(Debug, Args)]
struct GenCodebookArgs {
    /// Destination codebook JSON path
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    /// Write the built-in table instead of deriving one
    #[arg(long, conflicts_with_all = ["patterns", "i_start", "di", "max_steps"])]
    canonical: bool,
    /// Derive from a JSON file holding ten spike-step arrays
    #[arg(long, value_name = "PATH", conflicts_with_all = ["i_start", "di", "max_steps"])]
    patterns: Option<PathBuf>,
    #[command(flatten)]
    sweep: SweepOpt,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    /// Cover image (PNG)
    #[arg(long, value_name = "PNG")]
    cover: PathBuf,
    /// Audio payload (16-bit PCM WAV)
    #[arg(long, value_name = "WAV")]
    audio: PathBuf,
    /// Stego image destination (PNG)
    #[arg(long, value_name = "PNG")]
    out: PathBuf,
    /// Key sidecar destination
    #[arg(long, value_name = "PATH")]
    sidecar: PathBuf,
    #[command(flatten)]
    codebook: CodebookOpt,
    #[command(flatten)]
    dither: DitherOpt,
    /// Policy for covers lacking an alpha channel
    #[arg(long, value_enum, default_value_t = AlphaArg::Synthesize)]
    alpha: AlphaArg,
    /// Print the embed summary as machine-readable CSV or JSON
    #[arg(long, value_enum)]
    emit: Option<EmitArg>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Stego image (PNG, must carry alpha)
    #[arg(long, value_name = "PNG")]
    stego: PathBuf,
    /// Key sidecar written by embed
    #[arg(long, value_name = "PATH")]
    sidecar: PathBuf,
    /// Recovered audio destination (WAV)
    #[arg(long, value_name = "WAV")]
    out: PathBuf,
    #[command(flatten)]
    codebook: CodebookOpt,
}

#[derive(Debug, Args)]
struct MetricsArgs {
    /// Reference image (PNG)
    #[arg(value_name = "A.PNG")]
    a: PathBuf,
    /// Comparison image (PNG)
    #[arg(value_name = "B.PNG")]
    b: PathBuf,
    /// Policy for images lacking an alpha channel
    #[arg(long, value_enum, default_value_t = AlphaArg::Synthesize)]
    alpha: AlphaArg,
    /// Print the report as machine-readable CSV or JSON
    #[arg(long, value_enum)]
    emit: Option<EmitArg>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["image", "width"]))]
struct CapacityArgs {
    /// Cover image to measure (PNG)
    #[arg(value_name = "PNG", conflicts_with_all = ["width", "height"])]
    image: Option<PathBuf>,
    /// Hypothetical cover width, in pixels
    #[arg(long, requires = "height")]
    width: Option<u32>,
    /// Hypothetical cover height, in pixels
    #[arg(long, requires = "width")]
    height: Option<u32>,
    /// Sample rate the duration figures assume, in Hz
    #[arg(long = "sample-rate", default_value_t = 48_000)]
    sample_rate: u32,
    /// Channel count the duration figures assume
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u16).range(1..=2))]
    channels: u16,
    /// Print the capacity as machine-readable CSV or JSON
    #[arg(long, value_enum)]
    emit: Option<EmitArg>,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    /// Cover image (PNG)
    #[arg(long, value_name = "PNG")]
    cover: PathBuf,
    /// Audio payload (16-bit PCM WAV)
    #[arg(long, value_name = "WAV")]
    audio: PathBuf,
    #[command(flatten)]
    codebook: CodebookOpt,
    #[command(flatten)]
    dither: DitherOpt,
    /// Policy for covers lacking an alpha channel
    #[arg(long, value_enum, default_value_t = AlphaArg::Synthesize)]
    alpha: AlphaArg,
    /// Print the verdict as machine-readable CSV or JSON
    #[arg(long, value_enum)]
    emit: Option<EmitArg>,
}

/// Parses process arguments, runs the subcommand, and returns the exit
/// code for `std::process::exit`.
pub fn run() -> i32 {
    let config = RunConfig::parse();
    match dispatch(config) {
        Ok(code) => code,
        Err(err) => {
            report(&err);
            exit_code(&err)
        }
    }
}

fn dispatch(config: RunConfig) -> Result<i32> {
    let quiet = config.quiet;
    match config.command {
        Command::Characterize(args) => cmd_characterize(args, quiet),
        Command::GenCodebook(args) => cmd_gen_codebook(args, quiet),
        Command::Embed(args) => cmd_embed(args, quiet),
        Command::Extract(args) => cmd_extract(args, quiet),
        Command::Metrics(args) => cmd_metrics(args, quiet),
        Command::Capacity(args) => cmd_capacity(args, quiet),
        Command::Roundtrip(args) => cmd_roundtrip(args, quiet),
    }
}

fn report(err: &Error) {
    eprintln!("error: {err}");
    let mut source = err.source();
    while let Some(cause) = source {
        eprintln!("  caused by: {cause}");
        source = cause.source();
    }
}

/// Stable mapping from failure class to process exit code:
/// 1 I/O, 2 usage (from the parser), 3 format/parse, 4 payload too large,
/// 5 codebook mismatch, 6 corrupt stego payload, 7 model/derivation,
/// 8 metrics input.
pub fn exit_code(err: &Error) -> i32 {
    use Error::*;
    match err {
        Io(_) | File { .. } | PngEncode(_) => 1,
        PngDecode(_) | CodebookJson(_) | MissingAlpha { .. } | UnsupportedBitDepth(_)
        | ZeroDimension | MalformedRiff(_) | UnsupportedWavFormat(_) | InvalidClip(_)
        | BadImageGeometry { .. } | SidecarTruncated { .. } | SidecarMagic | SidecarVersion(_)
        | SidecarField(_) => 3,
        PayloadTooLarge { .. } | RequestExceedsImage { .. } => 4,
        CodebookMismatch => 5,
        DecodeFailed { .. } | NoMatch { .. } | CrossCheckFailure { .. } | InvalidDigit(_)
        | InvalidSignDigit(_) | NibbleRange(_) | MagnitudeOutOfRange { .. } => 6,
        InvalidParams(_) | NonConvergence { .. } | IncompleteCharacterization { .. }
        | QuantizationCollision { .. } | InvalidPatternSet { .. } | InfeasibleDigit { .. }
        | InvalidCodebook(_) | InvalidDitherAmplitude(_) => 7,
        DimensionMismatch { .. } | ImageSmallerThanWindow { .. } => 8,
    }
}

/// Removes registered output files on drop unless disarmed, so failed
/// runs leave no partial artifacts behind.
struct OutputGuard {
    paths: Vec<PathBuf>,
    armed: bool,
}

impl OutputGuard {
    fn new() -> OutputGuard {
        OutputGuard {
            paths: Vec::new(),
            armed: true,
        }
    }

    fn add(&mut self, path: impl Into<PathBuf>) {
        self.paths.push(path.into());
    }

    fn disarm(&mut self) {
        self.armed = false;
    }
}

impl Drop for OutputGuard {
    fn drop(&mut self) {
        if self.armed {
            for path in &self.paths {
                let _ = fs::remove_file(path);
            }
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::file(path, e))
}

/// 2073600 -> "2,073,600".
fn thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Seconds with up to six decimals, trailing zeros trimmed: 7.2, 10.8, 0.25.
fn seconds(v: f64) -> String {
    let s = format!("{v:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn psnr_json(p: Psnr) -> serde_json::Value {
    match p.db() {
        Some(v) => json!(v),
        None => json!(null),
    }
}

fn cmd_characterize(args: CharacterizeArgs, quiet: bool) -> Result<i32> {
    let params = LifParams::default();
    let sweep = SweepConfig {
        i_start_pa: args.sweep.i_start,
        di_pa: args.sweep.di,
        target_levels: args.target_levels,
        max_steps: args.sweep.max_steps,
    };
    let result = lif::characterize(&params, &sweep)?;
    if !result.zero_level_observed {
        eprintln!(
            "warning: no silent current observed in the sweep; level 0 backfilled at {} pA",
            result.levels[0].current_pa
        );
    }

    let mut guard = OutputGuard::new();
    if let Some(path) = &args.sweep_csv {
        guard.add(path);
        let mut csv = String::from("current_pA,spike_count\n");
        for level in &result.swept {
            csv.push_str(&format!("{},{}\n", level.current_pa, level.spike_count));
        }
        write_text(path, &csv)?;
    }
    if let Some(path) = &args.levels_json {
        guard.add(path);
        let mut text = serde_json::to_string_pretty(&result.levels)?;
        text.push('\n');
        write_text(path, &text)?;
    }

    match args.emit {
        Some(EmitArg::Csv) => {
            println!("current_pA,spike_count");
            for level in &result.levels {
                println!("{},{}", level.current_pa, level.spike_count);
            }
        }
        Some(EmitArg::Json) => println!("{}", serde_json::to_string(&result.levels)?),
        None => {}
    }
    if !quiet {
        for level in &result.levels {
            println!(
                "level {:>2}: {:>7.1} pA -> {} spike(s)",
                level.spike_count, level.current_pa, level.spike_count
            );
        }
        println!("swept {} currents", result.swept.len());
        if let Some(path) = &args.sweep_csv {
            println!("wrote {}", path.display());
        }
        if let Some(path) = &args.levels_json {
            println!("wrote {}", path.display());
        }
    }
    guard.disarm();
    Ok(0)
}

fn cmd_gen_codebook(args: GenCodebookArgs, quiet: bool) -> Result<i32> {
    let cb = if args.canonical {
        codebook::canonical()
    } else if let Some(path) = &args.patterns {
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let lists: Vec<Vec<u8>> = serde_json::from_str(&text)?;
        let count = lists.len();
        let patterns: [Vec<u8>; 10] = lists.try_into().map_err(|_| {
            Error::InvalidParams(format!("pattern file holds {count} digit patterns, need 10"))
        })?;
        codebook::derive(&patterns)?
    } else {
        let params = LifParams::default();
        let sweep = SweepConfig {
            i_start_pa: args.sweep.i_start,
            di_pa: args.sweep.di,
            target_levels: 10,
            max_steps: args.sweep.max_steps,
        };
        let result = lif::characterize(&params, &sweep)?;
        if !result.zero_level_observed {
            eprintln!(
                "warning: no silent current observed in the sweep; level 0 backfilled at {} pA",
                result.levels[0].current_pa
            );
        }
        let patterns = lif::digit_patterns(&params, &result.levels)?;
        codebook::derive(&patterns)?
    };

    let mut guard = OutputGuard::new();
    guard.add(&args.out);
    cb.save(&args.out)?;
    // Verify the artifact parses and validates before declaring success.
    Codebook::load(&args.out)?;
    if !quiet {
        println!("fingerprint: {}", hex::encode(cb.fingerprint));
        println!("wrote {}", args.out.display());
    }
    guard.disarm();
    Ok(0)
}

fn cmd_embed(args: EmbedArgs, quiet: bool) -> Result<i32> {
    let cb = args.codebook.load()?;
    let cover = media::load_png(&args.cover, args.alpha.into())?;
    let clip = media::load_wav(&args.audio)?;
    let (stego_img, sidecar) = stego::embed_audio(&cover, &clip, &cb, &args.dither.config())?;

    let mut guard = OutputGuard::new();
    guard.add(&args.out);
    guard.add(&args.sidecar);
    media::save_png(&stego_img, &args.out)?;
    sidecar.save(&args.sidecar)?;

    // Verify: the written image must reload bit-exactly and decode back to
    // the input samples.
    let reloaded = media::load_png(&args.out, AlphaPolicy::Require)?;
    if reloaded != stego_img {
        eprintln!("error: written stego image did not reload bit-exactly");
        return Ok(6);
    }
    let back = stego::extract_audio(&reloaded, &KeySidecar::load(&args.sidecar)?, &cb)?;
    if back != clip {
        eprintln!("error: verification decode did not reproduce the input clip");
        return Ok(6);
    }

    let cap = stego::capacity(&cover);
    let used = clip.samples.len() as u64 * 3;
    let pct = 100.0 * used as f64 / cap.payload_bytes as f64;
    let psnr_rgb = metrics::psnr(&cover, &stego_img, ChannelMode::Rgb)?;
    let psnr_rgba = metrics::psnr(&cover, &stego_img, ChannelMode::Rgba)?;

    match args.emit {
        Some(EmitArg::Csv) => {
            println!("samples,payload_bytes,capacity_bytes,psnr_rgb_db,psnr_rgba_db");
            println!(
                "{},{},{},{},{}",
                clip.samples.len(),
                used,
                cap.payload_bytes,
                psnr_rgb,
                psnr_rgba
            );
        }
        Some(EmitArg::Json) => println!(
            "{}",
            json!({
                "samples": clip.samples.len(),
                "payload_bytes": used,
                "capacity_bytes": cap.payload_bytes,
                "psnr_rgb_db": psnr_json(psnr_rgb),
                "psnr_rgba_db": psnr_json(psnr_rgba),
                "stego": args.out.display().to_string(),
                "sidecar": args.sidecar.display().to_string(),
            })
        ),
        None => {}
    }
    if !quiet {
        println!(
            "embedded {} samples ({} B) into {}x{} ({pct:.1}% of capacity)",
            thousands(clip.samples.len() as u64),
            thousands(used),
            cover.width,
            cover.height
        );
        println!("psnr_rgb: {psnr_rgb} dB   psnr_rgba: {psnr_rgba} dB");
        println!(
            "wrote {} and {}",
            args.out.display(),
            args.sidecar.display()
        );
    }
    guard.disarm();
    Ok(0)
}

fn cmd_extract(args: ExtractArgs, quiet: bool) -> Result<i32> {
    let cb = args.codebook.load()?;
    let sidecar = KeySidecar::load(&args.sidecar)?;
    let stego_img = media::load_png(&args.stego, AlphaPolicy::Require)?;
    let clip = stego::extract_audio(&stego_img, &sidecar, &cb)?;

    let mut guard = OutputGuard::new();
    guard.add(&args.out);
    media::save_wav(&clip, &args.out)?;
    if media::load_wav(&args.out)? != clip {
        eprintln!("error: written WAV did not reload bit-exactly");
        return Ok(6);
    }
    if !quiet {
        println!(
            "wrote {}: {} samples, {} Hz, {} channel(s), {} s",
            args.out.display(),
            thousands(clip.samples.len() as u64),
            clip.sample_rate,
            clip.channels,
            seconds(clip.duration_seconds())
        );
    }
    guard.disarm();
    Ok(0)
}

fn cmd_metrics(args: MetricsArgs, quiet: bool) -> Result<i32> {
    let a = media::load_png(&args.a, args.alpha.into())?;
    let b = media::load_png(&args.b, args.alpha.into())?;
    let report = metrics::fidelity_report(&a, &b)?;
    let [mse_r, mse_g, mse_b, mse_a] = report.mse_per_channel;
    match args.emit {
        Some(EmitArg::Csv) => {
            println!("mse_r,mse_g,mse_b,mse_a,psnr_rgb_db,psnr_rgba_db,ssim_rgb,ssim_rgba");
            println!(
                "{mse_r},{mse_g},{mse_b},{mse_a},{},{},{},{}",
                report.psnr_rgb, report.psnr_rgba, report.ssim_rgb, report.ssim_rgba
            );
        }
        Some(EmitArg::Json) => println!(
            "{}",
            json!({
                "mse_per_channel": report.mse_per_channel,
                "psnr_rgb_db": psnr_json(report.psnr_rgb),
                "psnr_rgba_db": psnr_json(report.psnr_rgba),
                "ssim_rgb": report.ssim_rgb,
                "ssim_rgba": report.ssim_rgba,
            })
        ),
        None => {}
    }
    if !quiet {
        println!("mse_r: {mse_r:.4}  mse_g: {mse_g:.4}  mse_b: {mse_b:.4}  mse_a: {mse_a:.4}");
        println!(
            "psnr_rgb: {} dB   psnr_rgba: {} dB",
            report.psnr_rgb, report.psnr_rgba
        );
        println!(
            "ssim_rgb: {:.6}   ssim_rgba: {:.6}",
            report.ssim_rgb, report.ssim_rgba
        );
    }
    Ok(0)
}

fn cmd_capacity(args: CapacityArgs, quiet: bool) -> Result<i32> {
    let (width, height, cap) = match &args.image {
        Some(path) => {
            let image = media::load_png(path, AlphaPolicy::Synthesize)?;
            (image.width, image.height, stego::capacity(&image))
        }
        None => {
            // The parser guarantees both are present when image is absent.
            let (w, h) = (args.width.expect("source group"), args.height.expect("source group"));
            let payload_bytes = u64::from(w) * u64::from(h);
            (
                w,
                h,
                Capacity {
                    payload_bytes,
                    max_samples: payload_bytes / 3,
                },
            )
        }
    };
    let enc = cap.max_seconds(args.sample_rate, args.channels);
    let raw = cap.raw_byte_seconds(args.sample_rate, args.channels);
    match args.emit {
        Some(EmitArg::Csv) => {
            println!("width,height,payload_bytes,max_samples,encoded_seconds,raw_byte_seconds");
            println!(
                "{width},{height},{},{},{},{}",
                cap.payload_bytes,
                cap.max_samples,
                seconds(enc),
                seconds(raw)
            );
        }
        Some(EmitArg::Json) => println!(
            "{}",
            json!({
                "width": width,
                "height": height,
                "payload_bytes": cap.payload_bytes,
                "max_samples": cap.max_samples,
                "encoded_seconds": enc,
                "raw_byte_seconds": raw,
            })
        ),
        None => {}
    }
    if !quiet {
        println!("cover: {width}x{height}");
        println!(
            "capacity: {} B; {} samples; {} s (encoded) / {} s (raw-byte)",
            thousands(cap.payload_bytes),
            thousands(cap.max_samples),
            seconds(enc),
            seconds(raw)
        );
        println!(
            "assuming {} Hz x {} channel(s)",
            args.sample_rate, args.channels
        );
    }
    Ok(0)
}

fn cmd_roundtrip(args: RoundtripArgs, quiet: bool) -> Result<i32> {
    let cb = args.codebook.load()?;
    let cover = media::load_png(&args.cover, args.alpha.into())?;
    let clip = media::load_wav(&args.audio)?;
    let (stego_img, sidecar) = stego::embed_audio(&cover, &clip, &cb, &args.dither.config())?;

    let dir = tempfile::tempdir()?;
    let png_path = dir.path().join("stego.png");
    let sidecar_path = dir.path().join("keys.bin");
    media::save_png(&stego_img, &png_path)?;
    sidecar.save(&sidecar_path)?;

    let reloaded = media::load_png(&png_path, AlphaPolicy::Require)?;
    let back = stego::extract_audio(&reloaded, &KeySidecar::load(&sidecar_path)?, &cb)?;
    let bit_exact = back == clip;

    let psnr_rgb = metrics::psnr(&cover, &stego_img, ChannelMode::Rgb)?;
    let ssim_rgb = if cover.width >= SSIM_WINDOW && cover.height >= SSIM_WINDOW {
        Some(metrics::ssim(&cover, &stego_img, ChannelMode::Rgb)?)
    } else {
        None
    };

    match args.emit {
        Some(EmitArg::Csv) => {
            println!("samples,psnr_rgb_db,ssim_rgb,bit_exact");
            println!(
                "{},{},{},{}",
                clip.samples.len(),
                psnr_rgb,
                ssim_rgb.map_or("n/a".into(), |s| format!("{s}")),
                bit_exact
            );
        }
        Some(EmitArg::Json) => println!(
            "{}",
            json!({
                "samples": clip.samples.len(),
                "psnr_rgb_db": psnr_json(psnr_rgb),
                "ssim_rgb": ssim_rgb,
                "bit_exact": bit_exact,
            })
        ),
        None => {}
    }
    if !quiet {
        println!(
            "round trip: {} samples through a {}x{} cover",
            thousands(clip.samples.len() as u64),
            cover.width,
            cover.height
        );
        match ssim_rgb {
            Some(s) => println!("psnr_rgb: {psnr_rgb} dB   ssim_rgb: {s:.6}"),
            None => println!("psnr_rgb: {psnr_rgb} dB   ssim_rgb: n/a (cover smaller than the window)"),
        }
        println!("bit-exact: {bit_exact}");
    }
    if bit_exact {
        Ok(0)
    } else {
        Ok(6)
    }
}

//! Prints the audio capacity of common image resolutions under both
//! accounting conventions: encoded samples (three pixels per sample) and
//! raw PCM bytes (one payload byte per pixel, two bytes per sample).
//!
//!     cargo run --example capacity_report

use spikestego::stego::{Capacity, ImageBuffer};

fn main() {
    let shapes = [
        ("QVGA", 320u32, 240u32),
        ("VGA", 640, 480),
        ("HD", 1280, 720),
        ("Full HD", 1920, 1080),
        ("4K UHD", 3840, 2160),
    ];
    let (rate, channels) = (48_000u32, 2u16);

    println!("at {rate} Hz x {channels} channels:\n");
    println!(
        "{:<8} {:>11} {:>14} {:>13} {:>13} {:>10}",
        "name", "pixels", "payload bytes", "max samples", "encoded s", "raw s"
    );
    for (name, width, height) in shapes {
        let image = ImageBuffer::filled(width, height, [0, 0, 0, 255]);
        let cap: Capacity = spikestego::stego::capacity(&image);
        println!(
            "{name:<8} {:>11} {:>14} {:>13} {:>13.3} {:>10.3}",
            u64::from(width) * u64::from(height),
            cap.payload_bytes,
            cap.max_samples,
            cap.max_seconds(rate, channels),
            cap.raw_byte_seconds(rate, channels),
        );
    }

    println!(
        "\nencoded: six 4-bit symbols per 16-bit sample, one byte per pixel \
         -> 3 pixels per sample"
    );
    println!("raw:     the same pixels counted as bare PCM bytes, 2 per sample");
}

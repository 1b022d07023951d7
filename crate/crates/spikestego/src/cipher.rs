//! Sample digitization and the remainder/key cipher.
//!
//! A 16-bit sample becomes six digits: one sign digit (0 positive or zero,
//! 1 negative) and the five zero-padded decimal digits of its magnitude.
//! Every digit, the sign included, is encrypted through the codebook as the
//! mod-16 remainder of its chosen spike timestamp, paired with a key nibble
//! naming the ordinal index of that spike. This is obfuscation, not
//! cryptography: the remainder-to-digit map is a fixed bijection, so equal
//! plaintext digits always produce equal symbols.

use crate::codebook::Codebook;
use crate::error::{Error, Result};

/// Decimal digits per sample magnitude (|x| <= 32768 needs five).
pub const MAG_DIGITS: usize = 5;
/// Nibbles per sample on the wire: sign plus magnitude digits.
pub const SYMBOLS_PER_SAMPLE: usize = 6;

/// A sample split into sign and zero-padded magnitude digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleDigits {
    /// 0 for positive or zero, 1 for negative.
    pub sign_digit: u8,
    /// Most significant digit first.
    pub mag_digits: [u8; MAG_DIGITS],
}

/// One sample's ciphertext: six symbol nibbles and six key nibbles, sign
/// first, then magnitude digits most significant first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolBlock {
    pub symbols: [u8; SYMBOLS_PER_SAMPLE],
    pub keys: [u8; SYMBOLS_PER_SAMPLE],
}

/// Splits a sample into its sign digit and decimal magnitude digits.
pub fn digitize(sample: i16) -> SampleDigits {
    let sign_digit = u8::from(sample < 0);
    let mut magnitude = sample.unsigned_abs();
    let mut mag_digits = [0u8; MAG_DIGITS];
    for slot in mag_digits.iter_mut().rev() {
        *slot = (magnitude % 10) as u8;
        magnitude /= 10;
    }
    SampleDigits {
        sign_digit,
        mag_digits,
    }
}

/// Shift-and-add-3 binary-to-BCD conversion, mirroring the hardware
/// realization of [`digitize`]. Equivalent on the full sample range.
pub fn digitize_double_dabble(sample: i16) -> SampleDigits {
    let sign_digit = u8::from(sample < 0);
    let magnitude = sample.unsigned_abs();
    let mut bcd = [0u8; MAG_DIGITS];
    for bit in (0..16).rev() {
        for digit in &mut bcd {
            if *digit >= 5 {
                *digit += 3;
            }
        }
        let mut carry = ((magnitude >> bit) & 1) as u8;
        for digit in bcd.iter_mut().rev() {
            let shifted = (*digit << 1) | carry;
            *digit = shifted & 0x0F;
            carry = shifted >> 4;
        }
    }
    SampleDigits {
        sign_digit,
        mag_digits: bcd,
    }
}

/// Rebuilds the signed sample. Negative zero normalizes to 0 so decoding is
/// total over syntactically valid digit blocks; encoders never emit it.
pub fn undigitize(digits: SampleDigits) -> Result<i16> {
    if digits.sign_digit > 1 {
        return Err(Error::InvalidSignDigit(digits.sign_digit));
    }
    let mut magnitude = 0u32;
    for &d in &digits.mag_digits {
        if d > 9 {
            return Err(Error::InvalidDigit(d));
        }
        magnitude = magnitude * 10 + u32::from(d);
    }
    let limit = if digits.sign_digit == 0 { 32767 } else { 32768 };
    if magnitude > limit {
        return Err(Error::MagnitudeOutOfRange {
            sign: digits.sign_digit,
            magnitude,
        });
    }
    let signed = if digits.sign_digit == 0 {
        magnitude as i32
    } else {
        -(magnitude as i32)
    };
    Ok(signed as i16)
}

/// Encrypts one digit to its (symbol, key) nibble pair.
pub fn encrypt_digit(digit: u8, cb: &Codebook) -> Result<(u8, u8)> {
    let entry = cb.entry(digit).ok_or(Error::InvalidDigit(digit))?;
    Ok((entry.remainder, entry.key_index))
}

/// Recovers a digit from its (symbol, key) pair.
///
/// The remainder alone identifies the digit because valid codebooks are
/// remainder-bijective. The published candidate procedure, locating
/// `pattern[key]` among `{r, r+16, r+32, r+48}` clipped to the window, runs
/// afterwards as a mandatory cross-check: on its own it can match several
/// digits (symbol 12 with key 3 fits both 44 of digit 6 and 60 of digit 4),
/// and a disagreement with the lookup means the key nibble or the codebook
/// is corrupt.
pub fn decrypt_symbol(symbol: u8, key: u8, cb: &Codebook) -> Result<u8> {
    if symbol == 0 {
        return Ok(0);
    }
    let entry = cb
        .entry_for_remainder(symbol)
        .ok_or(Error::NoMatch { symbol })?;
    let candidates = remainder_candidates(symbol, cb.window_steps);
    let keyed_position = entry.pattern.get(usize::from(key)).copied();
    let confirmed = keyed_position.is_some_and(|p| candidates.contains(&p));
    if !confirmed {
        return Err(Error::CrossCheckFailure {
            symbol,
            key,
            lookup_digit: entry.digit,
        });
    }
    Ok(entry.digit)
}

/// Spike positions congruent to `remainder` inside the window.
pub fn remainder_candidates(remainder: u8, window_steps: u8) -> Vec<u8> {
    (0..4)
        .map(|k| remainder + 16 * k)
        .filter(|&c| c < window_steps)
        .collect()
}

/// Digitizes and encrypts a sample; the sign digit goes through the same
/// digit table, so a negative sample's first symbol is digit 1's remainder.
pub fn encrypt_sample(sample: i16, cb: &Codebook) -> SymbolBlock {
    let digits = digitize(sample);
    let mut symbols = [0u8; SYMBOLS_PER_SAMPLE];
    let mut keys = [0u8; SYMBOLS_PER_SAMPLE];
    let plain = std::iter::once(digits.sign_digit).chain(digits.mag_digits);
    for (slot, digit) in plain.enumerate() {
        let entry = &cb.entries[usize::from(digit)];
        symbols[slot] = entry.remainder;
        keys[slot] = entry.key_index;
    }
    SymbolBlock { symbols, keys }
}

/// Decrypts a block back to the signed sample.
pub fn decrypt_sample(block: &SymbolBlock, cb: &Codebook) -> Result<i16> {
    let sign_digit = decrypt_symbol(block.symbols[0], block.keys[0], cb)?;
    if sign_digit > 1 {
        return Err(Error::InvalidSignDigit(sign_digit));
    }
    let mut mag_digits = [0u8; MAG_DIGITS];
    for (slot, digit) in mag_digits.iter_mut().enumerate() {
        *digit = decrypt_symbol(block.symbols[slot + 1], block.keys[slot + 1], cb)?;
    }
    undigitize(SampleDigits {
        sign_digit,
        mag_digits,
    })
}

/// Packs six nibbles into three bytes, first nibble in the high half.
pub fn pack_nibbles(nibbles: &[u8; SYMBOLS_PER_SAMPLE]) -> Result<[u8; 3]> {
    for &n in nibbles {
        if n > 0x0F {
            return Err(Error::NibbleRange(n));
        }
    }
    Ok([
        nibbles[0] << 4 | nibbles[1],
        nibbles[2] << 4 | nibbles[3],
        nibbles[4] << 4 | nibbles[5],
    ])
}

/// Inverse of [`pack_nibbles`]; total over all byte triples.
pub fn unpack_nibbles(bytes: &[u8; 3]) -> [u8; SYMBOLS_PER_SAMPLE] {
    [
        bytes[0] >> 4,
        bytes[0] & 0x0F,
        bytes[1] >> 4,
        bytes[1] & 0x0F,
        bytes[2] >> 4,
        bytes[2] & 0x0F,
    ]
}

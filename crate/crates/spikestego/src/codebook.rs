//! Digit codebook: spike patterns, selected timestamps, mod-16 remainders
//! and key indices, with JSON persistence and an exhaustive validator.
//!
//! Remainder 0 is reserved for the silent digit 0, so a valid codebook is a
//! bijection between digits and remainders: decoding never needs more than
//! the remainder, and the key index exists to replay the published
//! candidate-position procedure as a cross-check.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Discrete timestamps 0..=60 inside the observation window.
pub const WINDOW_STEPS: u8 = 61;
/// Remainder modulus; one nibble.
pub const MODULUS: u8 = 16;

/// Millisecond spike positions for digits 0..=9 under the default neuron.
pub const CANONICAL_PATTERNS: [&[u8]; 10] = [
    &[],
    &[59],
    &[39, 59],
    &[31, 45, 59],
    &[26, 37, 48, 60],
    &[23, 32, 41, 50, 59],
    &[20, 28, 36, 44, 52, 59],
    &[18, 25, 32, 39, 46, 52, 59],
    &[17, 23, 29, 35, 41, 47, 53, 59],
    &[15, 21, 26, 32, 37, 43, 48, 54, 59],
];

/// (chosen timestamp, remainder, key index) per digit in the shipped table.
const CANONICAL_SELECTIONS: [(u8, u8, u8); 10] = [
    (0, 0, 0),
    (59, 11, 0),
    (39, 7, 0),
    (45, 13, 1),
    (37, 5, 1),
    (50, 2, 3),
    (44, 12, 3),
    (52, 4, 5),
    (41, 9, 4),
    (54, 6, 7),
];

/// One digit's row. Field order is the serialized order; do not reorder,
/// the fingerprint depends on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookEntry {
    pub digit: u8,
    /// Spike positions in whole milliseconds, one per spike.
    pub pattern: Vec<u8>,
    /// The position whose remainder stands for this digit; 0 for digit 0.
    pub chosen_ts: u8,
    pub remainder: u8,
    /// Ordinal index of `chosen_ts` within `pattern`; 0 and unused for digit 0.
    pub key_index: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Codebook {
    pub window_steps: u8,
    pub modulus: u8,
    pub entries: [CodebookEntry; 10],
    /// SHA-256 of the compact JSON of the three fields above, hex in files.
    #[serde(with = "hex_fingerprint")]
    pub fingerprint: [u8; 32],
}

mod hex_fingerprint {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(fp: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(fp))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let text = String::deserialize(d)?;
        let bytes = hex::decode(&text).map_err(serde::de::Error::custom)?;
        bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("fingerprint must be 32 bytes"))
    }
}

/// Everything `validate` can object to. Violations are data, not faults:
/// the caller decides whether a non-empty list is fatal.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("entry {index} carries digit {digit}")]
    DigitOutOfPlace { index: usize, digit: u8 },
    #[error("digit {digit}: pattern holds {found} positions, want {expected}")]
    PatternLength {
        digit: u8,
        expected: usize,
        found: usize,
    },
    #[error("digit {digit}: position {position} lies outside the {window}-step window")]
    PositionOutOfWindow { digit: u8, position: u8, window: u8 },
    #[error("digit {digit}: remainder {remainder} is not {chosen_ts} mod {modulus}")]
    RemainderInconsistent {
        digit: u8,
        chosen_ts: u8,
        remainder: u8,
        modulus: u8,
    },
    #[error("digit {digit}: remainder 0 is reserved for digit 0")]
    ReservedRemainder { digit: u8 },
    #[error("digit {digit}: key index {key_index} exceeds pattern length {len}")]
    KeyIndexOutOfRange { digit: u8, key_index: u8, len: usize },
    #[error("digit {digit}: pattern[{key_index}] is {found}, chosen_ts says {chosen_ts}")]
    ChosenTimestampMismatch {
        digit: u8,
        key_index: u8,
        found: u8,
        chosen_ts: u8,
    },
    #[error("digit 0 must stay silent, found chosen_ts {chosen_ts}, remainder {remainder}, key {key_index}")]
    DigitZeroNotSilent {
        chosen_ts: u8,
        remainder: u8,
        key_index: u8,
    },
    #[error("digits {first} and {second} share remainder {remainder}")]
    DuplicateRemainder { remainder: u8, first: u8, second: u8 },
    #[error("window_steps is {0}, the format fixes 61")]
    WrongWindow(u8),
    #[error("modulus is {0}, the format fixes 16")]
    WrongModulus(u8),
    #[error("stored fingerprint does not match the entries")]
    FingerprintMismatch,
}

/// The published digit table, shipped verbatim. The selected timestamps
/// follow no stated rule (digit 2 uses its first spike, digit 8 its fifth),
/// so they are data here, not the output of [`derive`].
pub fn canonical() -> Codebook {
    let entries: [CodebookEntry; 10] = std::array::from_fn(|digit| {
        let (chosen_ts, remainder, key_index) = CANONICAL_SELECTIONS[digit];
        CodebookEntry {
            digit: digit as u8,
            pattern: CANONICAL_PATTERNS[digit].to_vec(),
            chosen_ts,
            remainder,
            key_index,
        }
    });
    let fingerprint = fingerprint_of(WINDOW_STEPS, MODULUS, &entries);
    Codebook {
        window_steps: WINDOW_STEPS,
        modulus: MODULUS,
        entries,
        fingerprint,
    }
}

/// Builds a codebook from digit patterns by greedy earliest-feasible
/// selection: digits 1..=9 in ascending order each take their first spike
/// whose mod-16 remainder is nonzero and still unclaimed.
pub fn derive(patterns: &[Vec<u8>; 10]) -> Result<Codebook> {
    for (digit, pattern) in patterns.iter().enumerate() {
        if pattern.len() != digit {
            return Err(Error::InvalidPatternSet {
                digit: digit as u8,
                expected: digit,
                found: pattern.len(),
            });
        }
    }
    let mut used = [false; MODULUS as usize];
    used[0] = true;
    let mut entries = vec![CodebookEntry {
        digit: 0,
        pattern: Vec::new(),
        chosen_ts: 0,
        remainder: 0,
        key_index: 0,
    }];
    for digit in 1u8..10 {
        let pattern = &patterns[usize::from(digit)];
        let pick = pattern.iter().enumerate().find_map(|(idx, &ts)| {
            let r = ts % MODULUS;
            (r != 0 && !used[usize::from(r)]).then_some((idx as u8, ts, r))
        });
        let Some((key_index, chosen_ts, remainder)) = pick else {
            return Err(Error::InfeasibleDigit {
                digit,
                used_remainders: (1..MODULUS).filter(|&r| used[usize::from(r)]).collect(),
            });
        };
        used[usize::from(remainder)] = true;
        entries.push(CodebookEntry {
            digit,
            pattern: pattern.clone(),
            chosen_ts,
            remainder,
            key_index,
        });
    }
    let entries: [CodebookEntry; 10] = entries.try_into().expect("ten digits");
    let fingerprint = fingerprint_of(WINDOW_STEPS, MODULUS, &entries);
    let cb = Codebook {
        window_steps: WINDOW_STEPS,
        modulus: MODULUS,
        entries,
        fingerprint,
    };
    let violations = cb.validate();
    if violations.is_empty() {
        Ok(cb)
    } else {
        Err(Error::InvalidCodebook(violations))
    }
}

impl Codebook {
    /// Checks every structural invariant and returns all violations found.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.window_steps != WINDOW_STEPS {
            out.push(Violation::WrongWindow(self.window_steps));
        }
        if self.modulus != MODULUS {
            out.push(Violation::WrongModulus(self.modulus));
        }
        for (index, e) in self.entries.iter().enumerate() {
            if usize::from(e.digit) != index {
                out.push(Violation::DigitOutOfPlace {
                    index,
                    digit: e.digit,
                });
                continue;
            }
            if e.pattern.len() != index {
                out.push(Violation::PatternLength {
                    digit: e.digit,
                    expected: index,
                    found: e.pattern.len(),
                });
            }
            for &position in &e.pattern {
                if position >= WINDOW_STEPS {
                    out.push(Violation::PositionOutOfWindow {
                        digit: e.digit,
                        position,
                        window: WINDOW_STEPS,
                    });
                }
            }
            if e.digit == 0 {
                if e.chosen_ts != 0 || e.remainder != 0 || e.key_index != 0 {
                    out.push(Violation::DigitZeroNotSilent {
                        chosen_ts: e.chosen_ts,
                        remainder: e.remainder,
                        key_index: e.key_index,
                    });
                }
                continue;
            }
            if e.remainder != e.chosen_ts % MODULUS {
                out.push(Violation::RemainderInconsistent {
                    digit: e.digit,
                    chosen_ts: e.chosen_ts,
                    remainder: e.remainder,
                    modulus: MODULUS,
                });
            }
            if e.remainder == 0 {
                out.push(Violation::ReservedRemainder { digit: e.digit });
            }
            if usize::from(e.key_index) >= e.pattern.len() {
                out.push(Violation::KeyIndexOutOfRange {
                    digit: e.digit,
                    key_index: e.key_index,
                    len: e.pattern.len(),
                });
            } else {
                let found = e.pattern[usize::from(e.key_index)];
                if found != e.chosen_ts {
                    out.push(Violation::ChosenTimestampMismatch {
                        digit: e.digit,
                        key_index: e.key_index,
                        found,
                        chosen_ts: e.chosen_ts,
                    });
                }
            }
        }
        let mut owner: [Option<u8>; MODULUS as usize] = [None; MODULUS as usize];
        for e in &self.entries {
            let Some(slot) = owner.get_mut(usize::from(e.remainder)) else {
                continue; // out-of-range remainder already reported as inconsistent
            };
            match slot {
                Some(first) => out.push(Violation::DuplicateRemainder {
                    remainder: e.remainder,
                    first: *first,
                    second: e.digit,
                }),
                None => *slot = Some(e.digit),
            }
        }
        if self.fingerprint != self.computed_fingerprint() {
            out.push(Violation::FingerprintMismatch);
        }
        out
    }

    pub fn computed_fingerprint(&self) -> [u8; 32] {
        fingerprint_of(self.window_steps, self.modulus, &self.entries)
    }

    pub fn entry(&self, digit: u8) -> Option<&CodebookEntry> {
        self.entries.get(usize::from(digit))
    }

    pub fn entry_for_remainder(&self, remainder: u8) -> Option<&CodebookEntry> {
        self.entries.iter().find(|e| e.remainder == remainder)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(path, text).map_err(|e| Error::file(path, e))
    }

    /// Parses and validates; a parseable file that breaks any invariant is
    /// rejected with the full violation list.
    pub fn load(path: impl AsRef<Path>) -> Result<Codebook> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        let cb: Codebook = serde_json::from_str(&text)?;
        let violations = cb.validate();
        if violations.is_empty() {
            Ok(cb)
        } else {
            Err(Error::InvalidCodebook(violations))
        }
    }
}

#[derive(Serialize)]
struct FingerprintBody<'a> {
    window_steps: u8,
    modulus: u8,
    entries: &'a [CodebookEntry; 10],
}

fn fingerprint_of(window_steps: u8, modulus: u8, entries: &[CodebookEntry; 10]) -> [u8; 32] {
    let body = FingerprintBody {
        window_steps,
        modulus,
        entries,
    };
    let json = serde_json::to_string(&body).expect("plain data serializes");
    Sha256::digest(json.as_bytes()).into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_matches_published_table() {
        let cb = canonical();
        assert_eq!(cb.window_steps, 61);
        assert_eq!(cb.modulus, 16);
        let six = &cb.entries[6];
        assert_eq!(
            (six.chosen_ts, six.remainder, six.key_index),
            (44, 12, 3),
            "digit 6 encrypts as cipher-key pair (12, 3)"
        );
        let nine = &cb.entries[9];
        assert_eq!((nine.chosen_ts, nine.remainder, nine.key_index), (54, 6, 7));
        assert!(cb.entries[0].pattern.is_empty());
        let remainders: Vec<u8> = cb.entries.iter().map(|e| e.remainder).collect();
        assert_eq!(remainders, vec![0, 11, 7, 13, 5, 2, 12, 4, 9, 6]);
        assert!(cb.validate().is_empty());
    }

    #[test]
    fn canonical_fingerprint_is_frozen() {
        // Cross-checked against an independent JSON+SHA-256 implementation.
        assert_eq!(
            hex::encode(canonical().fingerprint),
            "b42bbc3a83b3d1abab1759d163c4e418debdb31b311954db0441897c63f81f0e"
        );
    }

    #[test]
    fn serialized_field_order_is_fixed() {
        let json = serde_json::to_string(&canonical()).unwrap();
        assert!(json.starts_with(
            "{\"window_steps\":61,\"modulus\":16,\"entries\":[{\"digit\":0,\"pattern\":[],\"chosen_ts\":0,\"remainder\":0,\"key_index\":0}"
        ));
        assert!(json.contains("\"fingerprint\":\"b42bbc3a"));
    }

    #[test]
    fn derive_on_canonical_patterns_is_greedy_earliest() {
        let patterns: [Vec<u8>; 10] =
            std::array::from_fn(|d| CANONICAL_PATTERNS[d].to_vec());
        let cb = derive(&patterns).unwrap();
        let got: Vec<(u8, u8, u8)> = cb
            .entries
            .iter()
            .map(|e| (e.chosen_ts, e.remainder, e.key_index))
            .collect();
        assert_eq!(
            got,
            vec![
                (0, 0, 0),
                (59, 11, 0),
                (39, 7, 0),
                (31, 15, 0),
                (26, 10, 0),
                (41, 9, 2),
                (20, 4, 0),
                (18, 2, 0),
                (17, 1, 0),
                (21, 5, 1),
            ]
        );
        assert!(cb.validate().is_empty());
        assert_eq!(
            hex::encode(cb.fingerprint),
            "b5019808b03ba0bfc04dc3476b18d97eeadfe327ea7d2442a76ac5aa6ff35006"
        );
    }

    #[test]
    fn derive_rejects_remainder_zero_only_digit() {
        let mut patterns: [Vec<u8>; 10] =
            std::array::from_fn(|d| CANONICAL_PATTERNS[d].to_vec());
        patterns[1] = vec![16]; // 16 mod 16 = 0, nothing else to pick
        match derive(&patterns) {
            Err(Error::InfeasibleDigit {
                digit,
                used_remainders,
            }) => {
                assert_eq!(digit, 1);
                assert!(used_remainders.is_empty());
            }
            other => panic!("expected InfeasibleDigit, got {other:?}"),
        }
    }

    #[test]
    fn derive_rejects_wrong_pattern_length() {
        let mut patterns: [Vec<u8>; 10] =
            std::array::from_fn(|d| CANONICAL_PATTERNS[d].to_vec());
        patterns[3] = vec![31, 45];
        assert!(matches!(
            derive(&patterns),
            Err(Error::InvalidPatternSet {
                digit: 3,
                expected: 3,
                found: 2
            })
        ));
    }

    #[test]
    fn validator_reports_injected_faults() {
        let mut cb = canonical();
        cb.entries[6].remainder = 7;
        let violations = cb.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::RemainderInconsistent { digit: 6, .. })));
        assert!(violations.iter().any(|v| matches!(
            v,
            Violation::DuplicateRemainder {
                remainder: 7,
                first: 2,
                second: 6
            }
        )));
        assert!(violations.contains(&Violation::FingerprintMismatch));

        let mut cb = canonical();
        cb.entries[4].pattern[3] = 61;
        let violations = cb.validate();
        assert!(violations.iter().any(|v| matches!(
            v,
            Violation::PositionOutOfWindow {
                digit: 4,
                position: 61,
                ..
            }
        )));
    }

    #[test]
    fn validator_guards_digit_zero_and_key_indices() {
        let mut cb = canonical();
        cb.entries[0].remainder = 3;
        cb.entries[2].key_index = 5;
        let violations = cb.validate();
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DigitZeroNotSilent { remainder: 3, .. })));
        assert!(violations.iter().any(|v| matches!(
            v,
            Violation::KeyIndexOutOfRange {
                digit: 2,
                key_index: 5,
                len: 2
            }
        )));
    }

    #[test]
    fn save_load_round_trips_byte_for_byte() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("codebook.json");
        let cb = canonical();
        cb.save(&path).unwrap();
        let loaded = Codebook::load(&path).unwrap();
        assert_eq!(loaded, cb);

        let resaved = dir.path().join("again.json");
        loaded.save(&resaved).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&resaved).unwrap()
        );
    }

    #[test]
    fn load_rejects_corrupt_files() {
        let dir = tempfile::tempdir().unwrap();

        let truncated = dir.path().join("truncated.json");
        let text = serde_json::to_string_pretty(&canonical()).unwrap();
        std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
        assert!(matches!(
            Codebook::load(&truncated),
            Err(Error::CodebookJson(_))
        ));

        let mut duped = canonical();
        duped.entries[3].chosen_ts = 59;
        duped.entries[3].remainder = 11; // collides with digit 1
        duped.entries[3].key_index = 2;
        duped.fingerprint = duped.computed_fingerprint();
        let dupe_path = dir.path().join("dupe.json");
        duped.save(&dupe_path).unwrap();
        match Codebook::load(&dupe_path) {
            Err(Error::InvalidCodebook(violations)) => {
                assert!(violations
                    .iter()
                    .any(|v| matches!(v, Violation::DuplicateRemainder { remainder: 11, .. })));
            }
            other => panic!("expected InvalidCodebook, got {other:?}"),
        }

        assert!(matches!(
            Codebook::load(dir.path().join("missing.json")),
            Err(Error::File { .. })
        ));
    }

    #[test]
    fn key_space_is_bounded_by_modulus_times_spikes() {
        for e in &canonical().entries[1..] {
            let pairs: std::collections::BTreeSet<(u8, u8)> = e
                .pattern
                .iter()
                .enumerate()
                .map(|(idx, &ts)| (ts % MODULUS, idx as u8))
                .collect();
            assert_eq!(pairs.len(), e.pattern.len());
            assert!(pairs.len() <= usize::from(MODULUS) * e.pattern.len());
        }
    }

    /// d strictly ascending positions per digit, drawn from the window.
    fn pattern_set_strategy() -> impl Strategy<Value = [Vec<u8>; 10]> {
        let digits: Vec<_> = (0usize..10)
            .map(|d| proptest::sample::subsequence((0u8..WINDOW_STEPS).collect::<Vec<_>>(), d))
            .collect();
        digits.prop_map(|v| {
            let mut out: [Vec<u8>; 10] = Default::default();
            for (d, pattern) in v.into_iter().enumerate() {
                out[d] = pattern;
            }
            out
        })
    }

    proptest! {
        #[test]
        fn successful_derivations_always_validate(patterns in pattern_set_strategy()) {
            if let Ok(cb) = derive(&patterns) {
                prop_assert!(cb.validate().is_empty());
                let remainders: std::collections::BTreeSet<u8> =
                    cb.entries.iter().map(|e| e.remainder).collect();
                prop_assert_eq!(remainders.len(), 10);
            }
        }
    }
}

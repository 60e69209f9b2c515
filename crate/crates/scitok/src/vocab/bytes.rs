//! Printable byte <-> character mapping for the byte-level TEXT alphabet.
//!
//! Printable single-byte characters map to themselves; control bytes and the
//! other unprintables map to consecutive code points from U+0100 so every
//! token string stays printable and JSON-safe.

fn is_printable_byte(b: u8) -> bool {
    matches!(b, 0x21..=0x7E | 0xA1..=0xAC | 0xAE..=0xFF)
}

/// Position of an unprintable byte among all unprintable bytes, in byte order.
fn unprintable_index(b: u8) -> Option<u32> {
    match b {
        0x00..=0x20 => Some(b as u32),
        0x7F..=0xA0 => Some(33 + (b - 0x7F) as u32),
        0xAD => Some(67),
        _ => None,
    }
}

pub fn byte_to_char(b: u8) -> char {
    if is_printable_byte(b) {
        char::from(b)
    } else {
        let k = unprintable_index(b).expect("byte is printable or unprintable");
        char::from_u32(0x100 + k).expect("offset code point is valid")
    }
}

pub fn char_to_byte(c: char) -> Option<u8> {
    let cp = c as u32;
    match cp {
        0x100..=0x143 => {
            let k = cp - 0x100;
            Some(match k {
                0..=32 => k as u8,
                33..=66 => 0x7F + (k - 33) as u8,
                _ => 0xAD,
            })
        }
        0..=0xFF if is_printable_byte(cp as u8) => Some(cp as u8),
        _ => None,
    }
}

/// The 256-symbol byte-level alphabet, one single-character string per byte,
/// in byte order.
pub fn byte_alphabet() -> Vec<String> {
    (0..=255u8).map(|b| byte_to_char(b).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mapping_is_a_bijection() {
        let mut seen = std::collections::HashSet::new();
        for b in 0..=255u8 {
            let c = byte_to_char(b);
            assert!(seen.insert(c), "duplicate char for byte {b}");
            assert_eq!(char_to_byte(c), Some(b));
        }
    }

    #[test]
    fn ascii_printables_map_to_themselves() {
        assert_eq!(byte_to_char(b'A'), 'A');
        assert_eq!(byte_to_char(b'~'), '~');
        assert_ne!(byte_to_char(b' '), ' ');
    }

    #[test]
    fn unmapped_chars_are_rejected() {
        assert_eq!(char_to_byte('\u{144}'), None);
        assert_eq!(char_to_byte(' '), None);
        assert_eq!(char_to_byte('語'), None);
    }

    #[test]
    fn alphabet_has_256_distinct_symbols() {
        let alpha = byte_alphabet();
        assert_eq!(alpha.len(), 256);
        let set: std::collections::HashSet<_> = alpha.iter().collect();
        assert_eq!(set.len(), 256);
    }
}

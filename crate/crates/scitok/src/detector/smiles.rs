//! Surface-grammar validation for SMILES strings.
//!
//! This is a grammar-level check, not a chemical one: it accepts exactly the
//! strings built from organic-subset atoms, bracket atoms, bonds, ring
//! closures, and balanced parentheses, with every ring-closure label used an
//! even number of times. Valence, aromaticity perception, and other
//! chemistry-level validity are out of scope.

/// All 118 element symbols, for bracket-atom validation.
const ELEMENTS: &[&str] = &[
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl",
    "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As",
    "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In",
    "Sn", "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb",
    "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl",
    "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk",
    "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds", "Rg", "Cn", "Nh",
    "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Aromatic atoms that may appear inside brackets.
const AROMATIC_BRACKET: &[&str] = &["b", "c", "n", "o", "p", "s", "se", "as"];

fn is_element(sym: &str) -> bool {
    ELEMENTS.contains(&sym)
}

/// Single-letter organic-subset atoms writable without brackets.
fn is_organic_single(c: char) -> bool {
    matches!(c, 'B' | 'C' | 'N' | 'O' | 'P' | 'S' | 'F' | 'I')
}

/// Aromatic organic-subset atoms writable without brackets.
pub(crate) fn is_aromatic_organic(c: char) -> bool {
    matches!(c, 'b' | 'c' | 'n' | 'o' | 'p' | 's')
}

fn is_bond(c: char) -> bool {
    matches!(c, '-' | '=' | '#' | '$' | ':' | '/' | '\\')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Atom,
    Bond,
    Dot,
    Ring(u8),
    Open,
    Close,
}

/// Lexes one token starting at `bytes[i]`; returns the token and the index
/// just past it, or `None` on any character outside the SMILES surface set.
fn next_token(bytes: &[u8], i: usize) -> Option<(Token, usize)> {
    let c = bytes[i] as char;
    match c {
        'C' if bytes.get(i + 1) == Some(&b'l') => Some((Token::Atom, i + 2)),
        'B' if bytes.get(i + 1) == Some(&b'r') => Some((Token::Atom, i + 2)),
        _ if is_organic_single(c) || is_aromatic_organic(c) => Some((Token::Atom, i + 1)),
        '[' => parse_bracket_atom(bytes, i).map(|end| (Token::Atom, end)),
        '0'..='9' => Some((Token::Ring(c as u8 - b'0'), i + 1)),
        '%' => {
            let d1 = *bytes.get(i + 1)? as char;
            let d2 = *bytes.get(i + 2)? as char;
            if d1.is_ascii_digit() && d2.is_ascii_digit() {
                let label = (d1 as u8 - b'0') * 10 + (d2 as u8 - b'0');
                Some((Token::Ring(label), i + 3))
            } else {
                None
            }
        }
        _ if is_bond(c) => Some((Token::Bond, i + 1)),
        '.' => Some((Token::Dot, i + 1)),
        '(' => Some((Token::Open, i + 1)),
        ')' => Some((Token::Close, i + 1)),
        _ => None,
    }
}

/// Parses a bracket atom `[isotope? symbol chiral? hcount? charge? map?]`
/// starting at the `[`; returns the index just past the closing `]`.
fn parse_bracket_atom(bytes: &[u8], start: usize) -> Option<usize> {
    let mut i = start + 1;

    // isotope: up to three digits
    let mut digits = 0;
    while digits < 3 && matches!(bytes.get(i), Some(b) if b.is_ascii_digit()) {
        i += 1;
        digits += 1;
    }

    // element symbol: uppercase + optional lowercase, or aromatic lowercase
    let first = *bytes.get(i)? as char;
    if first.is_ascii_uppercase() {
        let two = if matches!(bytes.get(i + 1), Some(b) if b.is_ascii_lowercase()) {
            std::str::from_utf8(&bytes[i..i + 2]).ok()
        } else {
            None
        };
        if let Some(two) = two.filter(|s| is_element(s)) {
            debug_assert_eq!(two.len(), 2);
            i += 2;
        } else if is_element(std::str::from_utf8(&bytes[i..i + 1]).ok()?) {
            i += 1;
        } else {
            return None;
        }
    } else if first.is_ascii_lowercase() {
        let two = bytes
            .get(i..i + 2)
            .and_then(|s| std::str::from_utf8(s).ok());
        if let Some(two) = two.filter(|s| AROMATIC_BRACKET.contains(s)) {
            debug_assert_eq!(two.len(), 2);
            i += 2;
        } else if AROMATIC_BRACKET.contains(&std::str::from_utf8(&bytes[i..i + 1]).ok()?) {
            i += 1;
        } else {
            return None;
        }
    } else {
        return None;
    }

    // chirality: @ or @@
    if bytes.get(i) == Some(&b'@') {
        i += 1;
        if bytes.get(i) == Some(&b'@') {
            i += 1;
        }
    }

    // hydrogen count: H with optional digit
    if bytes.get(i) == Some(&b'H') {
        i += 1;
        if matches!(bytes.get(i), Some(b) if b.is_ascii_digit()) {
            i += 1;
        }
    }

    // charge: one or more same-sign marks, or a single mark with up to two digits
    if let Some(&sign) = bytes.get(i).filter(|&&b| b == b'+' || b == b'-') {
        i += 1;
        if bytes.get(i) == Some(&sign) {
            while bytes.get(i) == Some(&sign) {
                i += 1;
            }
        } else {
            let mut digits = 0;
            while digits < 2 && matches!(bytes.get(i), Some(b) if b.is_ascii_digit()) {
                i += 1;
                digits += 1;
            }
        }
    }

    // atom map: colon followed by at least one digit
    if bytes.get(i) == Some(&b':') {
        i += 1;
        let before = i;
        while matches!(bytes.get(i), Some(b) if b.is_ascii_digit()) {
            i += 1;
        }
        if i == before {
            return None;
        }
    }

    if bytes.get(i) == Some(&b']') {
        Some(i + 1)
    } else {
        None
    }
}

/// Returns true iff `candidate` satisfies the SMILES surface grammar:
/// non-empty, lexes completely, balanced `()` and `[]`, every ring-closure
/// label used an even number of times, bracket atoms carrying a valid
/// element symbol, and bonds/branches in structurally legal positions.
pub fn validate_smiles(candidate: &str) -> bool {
    if candidate.is_empty() || !candidate.is_ascii() {
        return false;
    }
    let bytes = candidate.as_bytes();

    let mut ring_counts = [0u32; 100];
    let mut depth: u32 = 0;
    let mut prev: Option<Token> = None;
    let mut i = 0;

    while i < bytes.len() {
        let (tok, next) = match next_token(bytes, i) {
            Some(t) => t,
            None => return false,
        };
        let legal = match prev {
            None => matches!(tok, Token::Atom),
            Some(Token::Atom) | Some(Token::Ring(_)) => true,
            Some(Token::Bond) => matches!(tok, Token::Atom | Token::Ring(_)),
            Some(Token::Dot) => matches!(tok, Token::Atom),
            Some(Token::Open) => matches!(tok, Token::Atom | Token::Bond),
            Some(Token::Close) => !matches!(tok, Token::Ring(_)),
        };
        if !legal {
            return false;
        }
        match tok {
            Token::Ring(label) => ring_counts[label as usize] += 1,
            Token::Open => depth += 1,
            Token::Close => {
                if depth == 0 {
                    return false;
                }
                depth -= 1;
            }
            _ => {}
        }
        prev = Some(tok);
        i = next;
    }

    if depth != 0 {
        return false;
    }
    if !matches!(
        prev,
        Some(Token::Atom) | Some(Token::Ring(_)) | Some(Token::Close)
    ) {
        return false;
    }
    ring_counts.iter().all(|&c| c % 2 == 0)
}

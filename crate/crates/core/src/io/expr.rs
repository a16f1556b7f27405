//! Words and group-ring expressions over single-letter generator names.
//!
//! A lowercase letter is a generator and the matching uppercase letter its
//! inverse. Exponents are written `^n`, `^-n`, or with superscripts
//! (`a³`, `a⁻¹`). Terms of a group-ring expression are joined by `+` and
//! `-` (or `−`), each an optional integer coefficient, an optional `*`, and
//! a word.

use std::fmt;

use thiserror::Error;

use crate::algebra::{GroupRingElement, Word};

/// Largest accepted `|exponent|` and coefficient magnitude.
pub const MAX_EXPONENT: i64 = 10_000;
pub const MAX_COEFFICIENT: i64 = 1 << 40;
/// Largest accepted sum of absolute exponents in one word.
pub const MAX_WORD_LENGTH: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at column {column}")]
pub struct ExprError {
    /// One-based character column within the parsed text.
    pub column: usize,
    pub message: String,
}

fn err<T>(index: usize, message: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError {
        column: index + 1,
        message: message.into(),
    })
}

struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [char],
}

const SUPERSCRIPTS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn superscript_digit(c: char) -> Option<i64> {
    SUPERSCRIPTS.iter().position(|&s| s == c).map(|d| d as i64)
}

fn is_minus(c: char) -> bool {
    c == '-' || c == '−'
}

impl<'a> Cursor<'a> {
    fn new(text: &str, names: &'a [char]) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
            names,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).cloned()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn generator(&self, c: char) -> Option<(u32, i32)> {
        let lower = c.to_ascii_lowercase();
        let idx = self.names.iter().position(|&n| n == lower)? as u32;
        if c.is_ascii_lowercase() {
            Some((idx, 1))
        } else if c.is_ascii_uppercase() {
            Some((idx, -1))
        } else {
            None
        }
    }

    fn starts_word(&self) -> bool {
        self.peek().is_some_and(|c| c.is_ascii_alphabetic())
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        let start = self.pos;
        let mut v: i64 = 0;
        while let Some(d) = self.peek().and_then(|c| c.to_digit(10)) {
            v = v * 10 + d as i64;
            if v > MAX_COEFFICIENT {
                return err(start, "number too large");
            }
            self.pos += 1;
        }
        if self.pos == start {
            return err(start, "expected a number");
        }
        Ok(v)
    }

    fn exponent(&mut self) -> Result<i64, ExprError> {
        let start = self.pos;
        match self.peek() {
            Some('^') => {
                self.pos += 1;
                let neg = self.peek().is_some_and(is_minus);
                if neg {
                    self.pos += 1;
                }
                if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    return err(self.pos, "expected digits after '^'");
                }
                let v = self.integer()?;
                Ok(if neg { -v } else { v })
            }
            Some(c) if c == '⁻' || superscript_digit(c).is_some() => {
                let neg = c == '⁻';
                if neg {
                    self.pos += 1;
                }
                let mut v: i64 = 0;
                let digits_start = self.pos;
                while let Some(d) = self.peek().and_then(superscript_digit) {
                    v = v * 10 + d;
                    if v > MAX_COEFFICIENT {
                        return err(start, "exponent too large");
                    }
                    self.pos += 1;
                }
                if self.pos == digits_start {
                    return err(self.pos, "expected superscript digits after '⁻'");
                }
                Ok(if neg { -v } else { v })
            }
            _ => Ok(1),
        }
    }

    /// Letters with exponents, possibly separated by spaces.
    fn word(&mut self) -> Result<Word, ExprError> {
        let mut syllables = Vec::new();
        let mut length: i64 = 0;
        loop {
            self.skip_ws();
            let Some(c) = self.peek() else { break };
            if !c.is_ascii_alphabetic() {
                break;
            }
            let at = self.pos;
            let Some((g, sign)) = self.generator(c) else {
                return err(at, format!("unknown generator '{c}'"));
            };
            self.pos += 1;
            let e = self.exponent()?;
            if e.abs() > MAX_EXPONENT {
                return err(at, format!("exponent {e} exceeds {MAX_EXPONENT}"));
            }
            length += e.abs();
            if length > MAX_WORD_LENGTH {
                return err(at, format!("word longer than {MAX_WORD_LENGTH} letters"));
            }
            syllables.push((g, sign * e as i32));
        }
        Ok(Word::from_syllables(syllables))
    }
}

/// Parses a word; `1` and the empty string denote the identity.
pub fn parse_word(text: &str, names: &[char]) -> Result<Word, ExprError> {
    let mut cur = Cursor::new(text, names);
    cur.skip_ws();
    if cur.peek() == Some('1') {
        cur.pos += 1;
        cur.skip_ws();
        if cur.peek().is_some() {
            return err(cur.pos, "unexpected input after identity '1'");
        }
        return Ok(Word::identity());
    }
    let w = cur.word()?;
    cur.skip_ws();
    if let Some(c) = cur.peek() {
        return err(cur.pos, format!("unexpected character '{c}'"));
    }
    Ok(w)
}

/// Parses an integral combination of words such as `g - 1` or `2*ab - B`.
pub fn parse_group_ring(text: &str, names: &[char]) -> Result<GroupRingElement, ExprError> {
    let mut cur = Cursor::new(text, names);
    let mut out = GroupRingElement::zero();
    let mut first = true;
    loop {
        cur.skip_ws();
        let sign_at = cur.pos;
        let sign = match cur.peek() {
            Some('+') => {
                cur.pos += 1;
                1
            }
            Some(c) if is_minus(c) => {
                cur.pos += 1;
                -1
            }
            None if first => return err(cur.pos, "empty expression"),
            None => break,
            Some(c) if !first => return err(cur.pos, format!("expected '+' or '-', found '{c}'")),
            Some(_) => 1,
        };
        first = false;
        cur.skip_ws();
        let term_at = cur.pos;
        let coeff = if cur.peek().is_some_and(|c| c.is_ascii_digit()) {
            let c = cur.integer()?;
            cur.skip_ws();
            if cur.peek() == Some('*') {
                cur.pos += 1;
                cur.skip_ws();
                if !cur.starts_word() {
                    return err(cur.pos, "expected a word after '*'");
                }
            }
            Some(c)
        } else {
            None
        };
        let word = if cur.starts_word() {
            cur.word()?
        } else if coeff.is_some() {
            Word::identity()
        } else {
            return match cur.peek() {
                Some(c) => err(cur.pos, format!("unexpected character '{c}'")),
                None => err(sign_at, "dangling sign"),
            };
        };
        if term_at == cur.pos {
            return err(term_at, "empty term");
        }
        out.add_term(sign * coeff.unwrap_or(1), word);
    }
    Ok(out)
}

/// Default generator names: `g, h, i, ...` for up to twenty generators,
/// otherwise `a, b, c, ...`.
pub fn default_names(count: usize) -> Option<Vec<char>> {
    let start = if count <= 20 { b'g' } else { b'a' };
    if start as usize + count > b'z' as usize + 1 {
        return None;
    }
    Some((0..count).map(|i| (start + i as u8) as char).collect())
}

/// Display adapter for a word under a naming.
pub struct NamedWord<'a> {
    pub word: &'a Word,
    pub names: &'a [char],
}

impl fmt::Display for NamedWord<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_identity() {
            return write!(f, "1");
        }
        for &(g, e) in self.word.syllables() {
            let c = self.names[g as usize];
            let c = if e < 0 { c.to_ascii_uppercase() } else { c };
            if e.abs() == 1 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c}^{}", e.abs())?;
            }
        }
        Ok(())
    }
}

/// Display adapter for a group-ring element under a naming.
pub struct NamedElement<'a> {
    pub element: &'a GroupRingElement,
    pub names: &'a [char],
}

impl fmt::Display for NamedElement<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.element.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.element.terms().enumerate() {
            match (i, c < 0) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let word = NamedWord {
                word: w,
                names: self.names,
            };
            match (a, w.is_identity()) {
                (_, true) => write!(f, "{a}")?,
                (1, false) => write!(f, "{word}")?,
                _ => write!(f, "{a}*{word}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const AB: [char; 2] = ['a', 'b'];

    #[test]
    fn word_syntaxes_agree() {
        let commutator = Word::from_syllables([(0, 1), (1, 1), (0, -1), (1, -1)]);
        for s in ["abAB", "a b A B", "aba⁻¹b⁻¹", "a b a^-1 b^-1", "aba^−1B"] {
            assert_eq!(parse_word(s, &AB).unwrap(), commutator, "{s}");
        }
        assert_eq!(parse_word("a³", &AB).unwrap(), Word::power(0, 3));
        assert_eq!(parse_word("a^12", &AB).unwrap(), Word::power(0, 12));
        assert_eq!(parse_word("A^2", &AB).unwrap(), Word::power(0, -2));
        assert_eq!(parse_word("1", &AB).unwrap(), Word::identity());
        assert_eq!(parse_word("aA", &AB).unwrap(), Word::identity());
    }

    #[test]
    fn dangling_superscript_minus_is_an_error() {
        let e = parse_word("a⁻", &AB).unwrap_err();
        assert_eq!(e.column, 3);
        let e = parse_word("ab⁻c", &['a', 'b', 'c']).unwrap_err();
        assert_eq!(e.column, 4);
    }

    #[test]
    fn bad_words() {
        assert_eq!(parse_word("ax", &AB).unwrap_err().column, 2);
        assert!(parse_word("a^", &AB).is_err());
        assert!(parse_word("a^99999", &AB).is_err());
        assert!(parse_word("a+b", &AB).is_err());
        assert!(parse_word("1a", &AB).is_err());
    }

    #[test]
    fn group_ring_expressions() {
        let g = ['g'];
        let one = GroupRingElement::one();
        let x = GroupRingElement::from_word(Word::generator(0));
        let want = &x - &one;
        for s in ["g - 1", "g−1", "-1 + g", " g -1 ", "1*g - 1"] {
            assert_eq!(parse_group_ring(s, &g).unwrap(), want, "{s}");
        }
        assert_eq!(parse_group_ring("0", &g).unwrap(), GroupRingElement::zero());
        assert_eq!(
            parse_group_ring("2g - g - g", &g).unwrap(),
            GroupRingElement::zero()
        );
        assert_eq!(parse_group_ring("3", &g).unwrap(), one.scale(3));
        let e = parse_group_ring("2*ab", &AB).unwrap();
        assert_eq!(
            e,
            GroupRingElement::from_word(Word::from_syllables([(0, 1), (1, 1)])).scale(2)
        );
    }

    #[test]
    fn bad_expressions() {
        let g = ['g'];
        for s in ["", "g -", "g + + g", "2*", "g h", "g 1", "*g"] {
            assert!(parse_group_ring(s, &g).is_err(), "{s:?}");
        }
    }

    #[test]
    fn display_round_trips() {
        let names = ['g', 'h'];
        let e = parse_group_ring("1 - gH + 3*h^2 - G^4", &names).unwrap();
        let text = NamedElement {
            element: &e,
            names: &names,
        }
        .to_string();
        assert_eq!(parse_group_ring(&text, &names).unwrap(), e);
    }

    #[test]
    fn default_naming() {
        assert_eq!(default_names(2).unwrap(), vec!['g', 'h']);
        assert_eq!(default_names(21).unwrap()[0], 'a');
        assert!(default_names(27).is_none());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0u32..3, -4i32..=4), 0..6).prop_map(Word::from_syllables)
    }

    #[test]
    fn long_words_are_rejected() {
        let text = "a^10000 ".repeat(101);
        let e = parse_word(&text, &AB).unwrap_err();
        assert!(e.message.contains("longer than"), "{e}");
        assert!(parse_word(&"a^10000 ".repeat(100), &AB).is_ok());
    }

    proptest! {
        #[test]
        fn printed_words_parse_back(w in arb_word()) {
            let names = ['x', 'y', 'z'];
            let text = NamedWord { word: &w, names: &names }.to_string();
            prop_assert_eq!(parse_word(&text, &names).unwrap(), w);
        }

        #[test]
        fn parser_never_panics(s in "\\PC{0,24}") {
            let _ = parse_word(&s, &AB);
            let _ = parse_group_ring(&s, &AB);
        }
    }
}

use std::fmt;

/// A freely reduced word in the free group on generators `0, 1, 2, ...`.
///
/// Stored as syllables `(generator, exponent)` with nonzero exponents and no
/// two adjacent syllables on the same generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word {
    letters: Vec<(u32, i32)>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    pub fn generator(g: u32) -> Self {
        Word {
            letters: vec![(g, 1)],
        }
    }

    pub fn power(g: u32, exp: i32) -> Self {
        Word::from_syllables([(g, exp)])
    }

    /// Builds a word from arbitrary syllables, reducing as it goes.
    pub fn from_syllables<I: IntoIterator<Item = (u32, i32)>>(syllables: I) -> Self {
        let mut w = Word::identity();
        for (g, e) in syllables {
            w.push(g, e);
        }
        w
    }

    fn push(&mut self, g: u32, e: i32) {
        if e == 0 {
            return;
        }
        match self.letters.last_mut() {
            Some((last, exp)) if *last == g => {
                let sum = *exp as i64 + e as i64;
                if sum == 0 {
                    self.letters.pop();
                } else {
                    *exp = i32::try_from(sum).expect("word exponent overflow");
                }
            }
            _ => self.letters.push((g, e)),
        }
    }

    pub fn syllables(&self) -> &[(u32, i32)] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    /// Number of letters counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.letters
            .iter()
            .map(|(_, e)| e.unsigned_abs() as u64)
            .sum()
    }

    pub fn inverse(&self) -> Self {
        Word {
            letters: self.letters.iter().rev().map(|&(g, e)| (g, -e)).collect(),
        }
    }

    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &(g, e) in &other.letters {
            out.push(g, e);
        }
        out
    }

    pub fn pow(&self, n: i32) -> Word {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn max_generator(&self) -> Option<u32> {
        self.letters.iter().map(|&(g, _)| g).max()
    }

    /// Renames every generator `g` to `g + offset`.
    pub fn shift_generators(&self, offset: u32) -> Word {
        Word {
            letters: self.letters.iter().map(|&(g, e)| (g + offset, e)).collect(),
        }
    }

    /// Expands the word into single letters `(g, ±1)`.
    pub fn letters(&self) -> impl Iterator<Item = (u32, i32)> + '_ {
        self.letters
            .iter()
            .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize))
    }
}

impl fmt::Display for Word {
    /// Generators `0..26` print as `a..z`, inverses in upper case.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "1");
        }
        for &(g, e) in &self.letters {
            if g < 26 {
                let c = (b'a' + g as u8) as char;
                let c = if e < 0 { c.to_ascii_uppercase() } else { c };
                if e.abs() == 1 {
                    write!(f, "{c}")?;
                } else {
                    write!(f, "{c}^{}", e.abs())?;
                }
            } else {
                write!(f, "x{g}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_reduces_to_identity() {
        let g = Word::generator(0);
        assert!(g.mul(&g.inverse()).is_identity());
        let w = Word::from_syllables([(0, 2), (1, 1), (1, -1), (0, -2)]);
        assert!(w.is_identity());
    }

    #[test]
    fn adjacent_syllables_merge() {
        let w = Word::from_syllables([(0, 1), (0, 2), (1, -1)]);
        assert_eq!(w.syllables(), &[(0, 3), (1, -1)]);
        assert_eq!(w.length(), 4);
        assert_eq!(w.to_string(), "a^3B");
    }

    #[test]
    fn pow_and_inverse() {
        let w = Word::from_syllables([(0, 1), (1, 1)]);
        assert_eq!(w.pow(-2), w.inverse().mul(&w.inverse()));
        assert!(w.pow(0).is_identity());
    }
}

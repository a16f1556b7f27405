use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::Word;

/// An element of the integral group ring of a free group.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct GroupRingElement {
    terms: BTreeMap<Word, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_terms([(1, w)])
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Word)>>(terms: I) -> Self {
        let mut out = Self::zero();
        for (c, w) in terms {
            out.add_term(c, w);
        }
        out
    }

    pub fn add_term(&mut self, coeff: i64, w: Word) {
        if coeff == 0 {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Sum of coefficients (the augmentation map to the integers).
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn scale(&self, k: i64) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, &c)| (c * k, w.clone())))
    }

    /// The anti-involution `Σ m γ ↦ Σ m γ⁻¹`.
    pub fn involution(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(w, &c)| (c, w.inverse())))
    }

    pub fn left_mul_word(&self, w: &Word) -> Self {
        Self::from_terms(self.terms.iter().map(|(v, &c)| (c, w.mul(v))))
    }

    pub fn right_mul_word(&self, w: &Word) -> Self {
        Self::from_terms(self.terms.iter().map(|(v, &c)| (c, v.mul(w))))
    }

    pub fn max_generator(&self) -> Option<u32> {
        self.terms.keys().filter_map(Word::max_generator).max()
    }

    pub fn shift_generators(&self, offset: u32) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .map(|(w, &c)| (c, w.shift_generators(offset))),
        )
    }
}

impl From<Word> for GroupRingElement {
    fn from(w: Word) -> Self {
        Self::from_word(w)
    }
}

impl Add for &GroupRingElement {
    type Output = GroupRingElement;
    fn add(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = self.clone();
        for (w, &c) in &rhs.terms {
            out.add_term(c, w.clone());
        }
        out
    }
}

impl Sub for &GroupRingElement {
    type Output = GroupRingElement;
    fn sub(self, rhs: &GroupRingElement) -> GroupRingElement {
        self + &(-rhs)
    }
}

impl Neg for &GroupRingElement {
    type Output = GroupRingElement;
    fn neg(self) -> GroupRingElement {
        self.scale(-1)
    }
}

impl Mul for &GroupRingElement {
    type Output = GroupRingElement;
    fn mul(self, rhs: &GroupRingElement) -> GroupRingElement {
        let mut out = GroupRingElement::zero();
        for (u, &a) in &self.terms {
            for (v, &b) in &rhs.terms {
                out.add_term(a * b, u.mul(v));
            }
        }
        out
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, &c)) in self.terms.iter().enumerate() {
            let sign = if c < 0 { "-" } else { "+" };
            if i == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let a = c.abs();
            match (a, w.is_identity()) {
                (_, true) => write!(f, "{a}")?,
                (1, false) => write!(f, "{w}")?,
                _ => write!(f, "{a}*{w}")?,
            }
        }
        Ok(())
    }
}

/// A dense matrix over the group ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupRingMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<GroupRingElement>,
}

impl GroupRingMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        GroupRingMatrix {
            rows,
            cols,
            entries: vec![GroupRingElement::zero(); rows * cols],
        }
    }

    /// Row-major construction. Panics if `entries.len() != rows * cols`.
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<GroupRingElement>) -> Self {
        assert_eq!(
            entries.len(),
            rows * cols,
            "entry count does not match shape"
        );
        GroupRingMatrix {
            rows,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> &GroupRingElement {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: GroupRingElement) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn entries(&self) -> &[GroupRingElement] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(GroupRingElement::is_zero)
    }

    /// Ordinary matrix product over the (noncommutative) group ring.
    pub fn mul(&self, rhs: &GroupRingMatrix) -> GroupRingMatrix {
        assert_eq!(self.cols, rhs.rows, "group-ring matrix shape mismatch");
        let mut out = GroupRingMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for c in 0..rhs.cols {
                let mut acc = GroupRingElement::zero();
                for k in 0..self.cols {
                    acc = &acc + &(self.get(r, k) * rhs.get(k, c));
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Integer matrix obtained by applying the augmentation entrywise.
    pub fn augmentation(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.get(r, c).augmentation())
                    .collect()
            })
            .collect()
    }

    pub fn right_mul_column(&mut self, col: usize, w: &Word) {
        for r in 0..self.rows {
            let v = self.get(r, col).right_mul_word(w);
            self.set(r, col, v);
        }
    }

    pub fn left_mul_row(&mut self, row: usize, w: &Word) {
        for c in 0..self.cols {
            let v = self.get(row, c).left_mul_word(w);
            self.set(row, c, v);
        }
    }

    pub fn max_generator(&self) -> Option<u32> {
        self.entries.iter().filter_map(|e| e.max_generator()).max()
    }
}

/// Right Fox derivative with respect to generator `j`: the unique elements
/// `D_j(w)` with `w - 1 = Σ_j (x_j - 1) · D_j(w)` in the free group ring.
///
/// With this handedness the boundary matrices `∂₁ = [x_j - 1]` and
/// `∂₂[j][r] = D_j(r)` of a presentation complex compose by the ordinary
/// matrix product to `r - 1`.
pub fn fox_derivative(w: &Word, j: u32) -> GroupRingElement {
    let letters: Vec<(u32, i32)> = w.letters().collect();
    let mut out = GroupRingElement::zero();
    for (k, &(g, e)) in letters.iter().enumerate() {
        if g != j {
            continue;
        }
        let suffix = Word::from_syllables(letters[k + 1..].iter().cloned());
        if e > 0 {
            out.add_term(1, suffix);
        } else {
            // D(x⁻¹) = -x⁻¹
            out.add_term(-1, Word::generator(g).inverse().mul(&suffix));
        }
    }
    out
}

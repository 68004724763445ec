//! Freely reduced words over a generating set.
//!
//! A letter is a nonzero signed integer: `+k` is generator `k-1`, `-k` is its
//! inverse. Words are kept freely reduced at all times, so equality of `Word`
//! values is equality in the free group on the generators. Equality in a
//! presented group is a separate question answered by the engine module.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// A freely reduced word in signed generator letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct Word(Vec<i32>);

impl Word {
    /// The empty word.
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Single-letter word for generator `gen` (0-based); `inverse` flips the sign.
    pub fn generator(gen: usize, inverse: bool) -> Self {
        let letter = (gen as i32) + 1;
        Word(vec![if inverse { -letter } else { letter }])
    }

    /// Builds a word from raw letters, reducing adjacent cancelling pairs.
    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Word::identity();
        for l in letters {
            w.push(l);
        }
        w
    }

    /// Appends one letter, cancelling against the current tail.
    pub fn push(&mut self, letter: i32) {
        debug_assert!(letter != 0, "letters are nonzero");
        if self.0.last() == Some(&-letter) {
            self.0.pop();
        } else {
            self.0.push(letter);
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Generator index of a letter (0-based).
    pub fn gen_of(letter: i32) -> usize {
        (letter.unsigned_abs() as usize) - 1
    }

    /// Reduced concatenation `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut out = self.clone();
        for &l in other.letters() {
            out.push(l);
        }
        out
    }

    /// The inverse word (letters reversed and negated).
    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    /// Conjugate `u · self · u⁻¹`.
    pub fn conjugate_by(&self, u: &Word) -> Word {
        u.concat(self).concat(&u.inverse())
    }

    /// Cyclically reduces the word (conjugation-invariant normal form step).
    pub fn cyclic_reduce(&self) -> Word {
        let mut v = self.0.clone();
        while v.len() >= 2 && *v.first().unwrap() == -*v.last().unwrap() {
            v.pop();
            v.remove(0);
        }
        Word(v)
    }

    /// Largest generator index referenced, if any.
    pub fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|&l| Self::gen_of(l)).max()
    }

    /// Checks every referenced generator lies below `gen_count`.
    pub fn check_over(&self, gen_count: usize) -> Result<()> {
        if let Some(g) = self.max_gen() {
            if g >= gen_count {
                return Err(Error::GeneratorOutOfRange(g, gen_count));
            }
        }
        Ok(())
    }

    /// Exponent-sum vector over `gen_count` generators.
    pub fn exponent_vector(&self, gen_count: usize) -> Vec<i64> {
        let mut v = vec![0i64; gen_count];
        for &l in &self.0 {
            let g = Self::gen_of(l);
            v[g] += if l > 0 { 1 } else { -1 };
        }
        v
    }

    /// Renames letters through `map`; `None` entries delete the generator.
    /// The result is freely reduced.
    pub fn substitute(&self, map: &[Option<Word>]) -> Word {
        let mut out = Word::identity();
        for &l in &self.0 {
            let g = Self::gen_of(l);
            match &map[g] {
                Some(w) => {
                    let piece = if l > 0 { w.clone() } else { w.inverse() };
                    for &m in piece.letters() {
                        out.push(m);
                    }
                }
                None => {}
            }
        }
        out
    }

    /// Parses the text form `g3 G1 g2` (capital = inverse, 0-based indices).
    pub fn parse(text: &str) -> Result<Word> {
        let mut w = Word::identity();
        for tok in text.split_whitespace() {
            let (inv, rest) = match tok.chars().next() {
                Some('g') => (false, &tok[1..]),
                Some('G') => (true, &tok[1..]),
                _ => return Err(Error::Parse(format!("bad word token {tok:?}"))),
            };
            let idx: usize = rest
                .parse()
                .map_err(|_| Error::Parse(format!("bad generator index in {tok:?}")))?;
            w.push(if inv {
                -((idx as i32) + 1)
            } else {
                (idx as i32) + 1
            });
        }
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &l in &self.0 {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if l > 0 {
                write!(f, "g{}", l - 1)?;
            } else {
                write!(f, "G{}", -l - 1)?;
            }
        }
        Ok(())
    }
}

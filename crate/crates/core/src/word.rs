//! Words in named generators, e.g. `(r*x^3)^4` or `x^-1*y`.
//!
//! Grammar:
//!
//! ```text
//! product := factor ('*' factor)*
//! factor  := atom ('^' integer)*
//! atom    := name | '(' product ')' | '1'
//! ```

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::{Error, GeneratorSet, GroupElement, Result};

const MAX_LETTERS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Letter {
    pub index: usize,
    pub inverse: bool,
}

/// A flat word: letters multiplied left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Word {
    pub letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self { letters }
    }

    pub fn generator(index: usize) -> Self {
        Self { letters: alloc::vec![Letter { index, inverse: false }] }
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| Letter { index: l.index, inverse: !l.inverse }).collect() }
    }

    pub fn times(mut self, other: &Word) -> Self {
        self.letters.extend_from_slice(&other.letters);
        self
    }

    pub fn power(&self, k: i64) -> Result<Self> {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let reps = k.unsigned_abs() as usize;
        if base.letters.len().saturating_mul(reps) > MAX_LETTERS {
            return Err(Error::WordSyntax { column: 0, message: "word too long after expansion".to_string() });
        }
        let mut letters = Vec::with_capacity(base.letters.len() * reps);
        for _ in 0..reps {
            letters.extend_from_slice(&base.letters);
        }
        Ok(Self { letters })
    }

    /// Parses `text`, resolving generator names against `names`.
    pub fn parse(text: &str, names: &[&str]) -> Result<Self> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, names };
        p.skip_ws();
        if p.pos == p.src.len() {
            return Ok(Self::default());
        }
        let w = p.product()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(w)
    }

    /// Product of the indicated generators and inverses, in order.
    pub fn evaluate<E: GroupElement>(&self, gens: &[E], identity: &E) -> Result<E> {
        let mut inverses: Vec<Option<E>> = alloc::vec![None; gens.len()];
        let mut acc = identity.clone();
        for l in &self.letters {
            let g = gens.get(l.index).ok_or(Error::GeneratorIndex { index: l.index, count: gens.len() })?;
            if l.inverse {
                let inv = inverses[l.index].get_or_insert_with(|| g.inv());
                acc = acc.mul(inv);
            } else {
                acc = acc.mul(g);
            }
        }
        Ok(acc)
    }
}

/// Evaluates `word` over a generating set.
pub fn evaluate_word<E: GroupElement>(gens: &GeneratorSet<E>, word: &Word) -> Result<E> {
    word.evaluate(gens.elements(), gens.identity())
}

/// Parses and evaluates a word whose names are the set's labels.
pub fn evaluate_text<E: GroupElement>(gens: &GeneratorSet<E>, text: &str) -> Result<E> {
    let names: Vec<&str> = gens.labels().iter().map(String::as_str).collect();
    evaluate_word(gens, &Word::parse(text, &names)?)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a [&'a str],
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::WordSyntax { column: self.pos + 1, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn product(&mut self) -> Result<Word> {
        let mut w = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            w = w.times(&f);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word> {
        let mut w = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.integer()?;
            w = w.power(k).map_err(|_| self.error("word too long after expansion"))?;
        }
        Ok(w)
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        core::str::from_utf8(&self.src[start..self.pos]).ok().and_then(|s| s.parse().ok()).ok_or_else(|| {
            self.pos = start;
            self.error("expected an integer exponent")
        })
    }

    fn atom(&mut self) -> Result<Word> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let w = self.product()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(w)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(Word::default())
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || matches!(self.src[self.pos], b'_' | b'\''))
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let index = self
                    .names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
                Ok(Word::generator(index))
            }
            _ => Err(self.error("expected a generator name, `1` or `(`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Permutation;

    #[test]
    fn parses_nested_powers() {
        let w = Word::parse("(r*x^3)^4", &["x", "r"]).unwrap();
        assert_eq!(w.letters.len(), 16);
        assert_eq!(w.letters[0], Letter { index: 1, inverse: false });
        let w = Word::parse("x^-2 * y", &["x", "y"]).unwrap();
        assert_eq!(
            w.letters,
            alloc::vec![
                Letter { index: 0, inverse: true },
                Letter { index: 0, inverse: true },
                Letter { index: 1, inverse: false }
            ]
        );
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(Word::parse("(x*y", &["x", "y"]), Err(Error::WordSyntax { .. })));
        assert!(matches!(Word::parse("x^", &["x"]), Err(Error::WordSyntax { .. })));
        assert_eq!(Word::parse("z", &["x"]), Err(Error::UnknownGenerator("z".into())));
    }

    #[test]
    fn evaluation() {
        let a = Permutation::from_cycles(3, &[&[1, 2]]).unwrap();
        let b = Permutation::from_cycles(3, &[&[1, 2, 3]]).unwrap();
        let gens = GeneratorSet::with_labels(alloc::vec![a.clone(), b.clone()], &["a", "b"]).unwrap();
        assert!(evaluate_text(&gens, "").unwrap().is_identity());
        assert_eq!(evaluate_text(&gens, "a*b").unwrap(), a.mul(&b));
        assert!(evaluate_text(&gens, "(a*b)^2").unwrap().is_identity());
        assert!(evaluate_text(&gens, "b^-1*b").unwrap().is_identity());
        let bad = Word::generator(5);
        assert_eq!(evaluate_word(&gens, &bad), Err(Error::GeneratorIndex { index: 5, count: 2 }));
    }
}

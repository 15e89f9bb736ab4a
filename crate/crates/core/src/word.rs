//! Words in the generators `a_0, …, a_n` and their adjoints.
//!
//! Grammar: `word := token (WS token)*`, `token := "a" DIGIT+ ["*"]`.
//! Symbols are kept in reading order; the rightmost symbol acts first.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{FockModel, SparseOp};

/// `a_i` (annihilation for `i ≥ 1`) or `a_i*` (creation). `a_0` is
/// self-adjoint and never carries the star.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GeneratorSymbol {
    pub index: usize,
    pub starred: bool,
}

impl GeneratorSymbol {
    pub fn new(index: usize, starred: bool) -> Self {
        Self {
            index,
            starred: starred && index != 0,
        }
    }

    pub fn annihilation(index: usize) -> Self {
        Self::new(index, false)
    }

    pub fn creation(index: usize) -> Self {
        Self::new(index, true)
    }

    pub fn vacuum() -> Self {
        Self::new(0, false)
    }

    pub fn is_vacuum(&self) -> bool {
        self.index == 0
    }

    pub fn is_creation(&self) -> bool {
        self.starred
    }

    pub fn is_annihilation(&self) -> bool {
        !self.starred && self.index != 0
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.index, !self.starred)
    }
}

impl fmt::Display for GeneratorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.starred {
            write!(f, "a{}*", self.index)
        } else {
            write!(f, "a{}", self.index)
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    symbols: Vec<GeneratorSymbol>,
}

impl Word {
    pub fn new(symbols: Vec<GeneratorSymbol>) -> Self {
        Self { symbols }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn symbols(&self) -> &[GeneratorSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn creation_count(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_creation()).count()
    }

    pub fn max_index(&self) -> usize {
        self.symbols.iter().map(|s| s.index).max().unwrap_or(0)
    }

    /// Reversed word with every symbol replaced by its adjoint.
    pub fn adjoint(&self) -> Self {
        Self::new(self.symbols.iter().rev().map(GeneratorSymbol::adjoint).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = self.symbols.clone();
        symbols.extend_from_slice(&other.symbols);
        Word::new(symbols)
    }

    /// Product of the generator matrices in reading order, computed by
    /// explicit sparse matrix multiplication.
    pub fn matrix(&self, model: &FockModel) -> Result<SparseOp> {
        let mut acc = model.identity();
        for s in &self.symbols {
            acc = acc.try_mul(model.generator(s.index, s.starred)?)?;
        }
        Ok(acc)
    }

    /// Enough guard for `matrix` to be exact: every creation may raise the
    /// degree by one before anything lowers it.
    pub fn guard(&self) -> usize {
        self.creation_count()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.symbols.is_empty() {
            return write!(f, "I");
        }
        let parts: Vec<String> = self.symbols.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl FromIterator<GeneratorSymbol> for Word {
    fn from_iter<T: IntoIterator<Item = GeneratorSymbol>>(iter: T) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

pub fn parse_word(text: &str, n: usize) -> Result<Word> {
    let bytes = text.as_bytes();
    let mut symbols = Vec::new();
    let mut i = 0;
    let syntax = |position: usize, message: &str| Error::Syntax {
        position,
        message: message.to_string(),
    };
    while i < bytes.len() {
        if bytes[i].is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if bytes[i] != b'a' {
            return Err(syntax(i, "expected `a`"));
        }
        i += 1;
        let digits_start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i == digits_start {
            return Err(syntax(i, "expected generator index"));
        }
        let index: usize = text[digits_start..i]
            .parse()
            .map_err(|_| syntax(digits_start, "generator index too large"))?;
        let starred = i < bytes.len() && bytes[i] == b'*';
        if starred {
            i += 1;
        }
        if i < bytes.len() && !bytes[i].is_ascii_whitespace() {
            return Err(syntax(i, "expected whitespace between tokens"));
        }
        if index > n {
            return Err(Error::IndexOutOfRange { index, min: 0, max: n });
        }
        symbols.push(GeneratorSymbol::new(index, starred));
    }
    if symbols.is_empty() {
        return Err(syntax(0, "empty word"));
    }
    Ok(Word::new(symbols))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tokens_in_order() {
        let w = parse_word("a1 a2*", 2).unwrap();
        assert_eq!(
            w.symbols(),
            &[GeneratorSymbol::annihilation(1), GeneratorSymbol::creation(2)]
        );
        assert_eq!(w.to_string(), "a1 a2*");
    }

    #[test]
    fn vacuum_star_is_dropped() {
        let w = parse_word("a0*", 2).unwrap();
        assert_eq!(w.symbols(), &[GeneratorSymbol::vacuum()]);
    }

    #[test]
    fn rejects_out_of_range_and_garbage() {
        assert!(matches!(
            parse_word("a7", 2),
            Err(Error::IndexOutOfRange { index: 7, .. })
        ));
        assert!(matches!(parse_word("a1 b2", 2), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse_word("a", 2), Err(Error::Syntax { .. })));
        assert!(matches!(parse_word("a1a2", 2), Err(Error::Syntax { position: 2, .. })));
        assert!(matches!(parse_word("  ", 2), Err(Error::Syntax { .. })));
    }

    #[test]
    fn adjoint_reverses() {
        let w = parse_word("a1 a0 a2*", 2).unwrap();
        assert_eq!(w.adjoint().to_string(), "a2 a0 a1*");
    }
}

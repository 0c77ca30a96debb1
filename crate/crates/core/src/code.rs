//! The interface shared by every availability code in the crate, and the
//! restricted codeword view that recovery routines read from.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf::{Elem, Field};

/// Read access to codeword symbols by symbol index.
pub trait SymbolSource {
    fn symbol(&self, index: usize) -> Result<&[Elem]>;
}

/// A codeword with only a chosen set of symbols readable.
///
/// Anything outside the set answers with [`Error::MissingCoordinate`], so a
/// recovery routine that strays outside its recovering set fails loudly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedWord {
    width: usize,
    symbols: BTreeMap<usize, Vec<Elem>>,
}

impl RestrictedWord {
    pub fn new<I>(word: &[Elem], width: usize, allowed: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if width == 0 || !word.len().is_multiple_of(width) {
            return Err(Error::DimensionMismatch { expected: width, found: word.len() });
        }
        let count = word.len() / width;
        let mut symbols = BTreeMap::new();
        for i in allowed {
            if i >= count {
                return Err(Error::MissingCoordinate(i));
            }
            symbols.insert(i, word[i * width..(i + 1) * width].to_vec());
        }
        Ok(RestrictedWord { width, symbols })
    }

    pub fn from_symbols(width: usize, symbols: BTreeMap<usize, Vec<Elem>>) -> Result<Self> {
        if let Some(bad) = symbols.values().find(|v| v.len() != width) {
            return Err(Error::DimensionMismatch { expected: width, found: bad.len() });
        }
        Ok(RestrictedWord { width, symbols })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &[Elem])> {
        self.symbols.iter().map(|(&i, v)| (i, v.as_slice()))
    }
}

impl SymbolSource for RestrictedWord {
    fn symbol(&self, index: usize) -> Result<&[Elem]> {
        self.symbols.get(&index).map(Vec::as_slice).ok_or(Error::MissingCoordinate(index))
    }
}

/// A linear code whose symbols come with disjoint recovering sets.
///
/// Codewords are flat vectors over [`AvailabilityCode::field`]; symbol `i`
/// occupies positions `i*w .. (i+1)*w` with `w = symbol_width()`.
pub trait AvailabilityCode: Send + Sync {
    fn field(&self) -> &Arc<Field>;

    /// Message length over the base field.
    fn dimension(&self) -> usize;

    fn num_symbols(&self) -> usize;

    fn symbol_width(&self) -> usize;

    fn length(&self) -> usize {
        self.num_symbols() * self.symbol_width()
    }

    fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>>;

    /// Symbols that carry the availability guarantee.
    fn targets(&self) -> Vec<usize>;

    /// Number of disjoint recovering sets promised per target.
    fn availability(&self) -> usize;

    /// `availability()` pairwise disjoint recovering sets for `target`.
    fn pir_sets(&self, target: usize) -> Result<Vec<Vec<usize>>>;

    /// Recovers the symbol `target` from a codeword restricted to `set`.
    fn recover(&self, word: &RestrictedWord, target: usize, set: &[usize]) -> Result<Vec<Elem>>;

    /// One recovering set per request entry, pairwise disjoint.
    fn plan_batch(&self, request: &[usize]) -> Result<Vec<Vec<usize>>> {
        let _ = request;
        Err(Error::Unsupported("this code has no batch planner".into()))
    }

    fn describe(&self) -> String;
}

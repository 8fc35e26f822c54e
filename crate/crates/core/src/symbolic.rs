//! Words over the alphabet `{L, R}` and the symbol-sequence algebra used to
//! describe cycles and homoclinic itineraries.
//!
//! A [`Word`] is an immutable, non-empty string of symbols. Every operation
//! returns a fresh word. Words serialize as plain strings such as `"RLLR"`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which affine piece of the map is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    L,
    R,
}

impl Symbol {
    pub fn flipped(self) -> Symbol {
        match self {
            Symbol::L => Symbol::R,
            Symbol::R => Symbol::L,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::L => 'L',
            Symbol::R => 'R',
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl TryFrom<char> for Symbol {
    type Error = Error;

    fn try_from(c: char) -> Result<Self> {
        match c {
            'L' => Ok(Symbol::L),
            'R' => Ok(Symbol::R),
            other => Err(Error::InvalidSymbol(other)),
        }
    }
}

/// A finite, non-empty word `X_0 X_1 ... X_{n-1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    symbols: Vec<Symbol>,
}

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(Word { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, i: usize) -> Option<Symbol> {
        self.symbols.get(i).copied()
    }

    pub fn first(&self) -> Symbol {
        self.symbols[0]
    }

    pub fn count(&self, s: Symbol) -> usize {
        self.symbols.iter().filter(|&&x| x == s).count()
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: i,
                len: self.len(),
            });
        }
        Ok(())
    }

    /// `X^{ī}`: the word with symbol `i` exchanged L↔R.
    pub fn flip(&self, i: usize) -> Result<Word> {
        self.check_index(i)?;
        let mut symbols = self.symbols.clone();
        symbols[i] = symbols[i].flipped();
        Ok(Word { symbols })
    }

    /// `X^{(i)} = X_i ... X_{n-1} X_0 ... X_{i-1}`.
    pub fn cyclic_perm(&self, i: usize) -> Result<Word> {
        self.check_index(i)?;
        let mut symbols = self.symbols.clone();
        symbols.rotate_left(i);
        Ok(Word { symbols })
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut symbols = Vec::with_capacity(self.len() + other.len());
        symbols.extend_from_slice(&self.symbols);
        symbols.extend_from_slice(&other.symbols);
        Word { symbols }
    }

    /// `X^k Y`: `k` copies of `self` followed by `tail`.
    pub fn power_then(&self, k: usize, tail: &Word) -> Word {
        let mut symbols = Vec::with_capacity(k * self.len() + tail.len());
        for _ in 0..k {
            symbols.extend_from_slice(&self.symbols);
        }
        symbols.extend_from_slice(&tail.symbols);
        Word { symbols }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.symbols {
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .trim()
            .chars()
            .map(Symbol::try_from)
            .collect::<Result<Vec<_>>>()?;
        Word::new(symbols)
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The index `α` for which `XY = (YX)^{0̄ ᾱ}`, if any.
///
/// `XY` and `YX` must differ in exactly two positions, one of which is 0.
/// Any other mismatch pattern yields `Ok(None)`.
pub fn concat_flip_alpha(x: &Word, y: &Word) -> Result<Option<usize>> {
    if x.first() == y.first() {
        return Err(Error::SameLeadingSymbol);
    }
    let xy = x.concat(y);
    let yx = y.concat(x);
    let mut mismatches = xy
        .symbols()
        .iter()
        .zip(yx.symbols())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i);
    let first = mismatches.next();
    let second = mismatches.next();
    let third = mismatches.next();
    Ok(match (first, second, third) {
        (Some(0), Some(alpha), None) => Some(alpha),
        _ => None,
    })
}

/// `d = -p mod n`, the phase at which the S-orbit rejoins the X-cycle.
pub fn reinjection_offset(n: usize, p: usize) -> usize {
    assert!(n >= 1, "word length must be positive");
    (n - p % n) % n
}

/// The rotational word `F[ℓ, m, n]`: symbol `i` is `L` iff `i·m mod n < ℓ`.
pub fn rotational_word(l: usize, m: usize, n: usize) -> Result<Word> {
    if !(0 < l && l < n && 0 < m && m < n && gcd(m, n) == 1) {
        return Err(Error::RotationParams { l, m, n });
    }
    let symbols = (0..n)
        .map(|i| {
            if (i * m) % n < l {
                Symbol::L
            } else {
                Symbol::R
            }
        })
        .collect();
    Word::new(symbols)
}

/// Tests `X^{(d)} = X^{0̄ î}`.
///
/// For `î = 0` both flips land on index 0 and cancel, so the test reduces to
/// `X^{(d)} = X`. Out-of-range `d` or `î` yields `false`.
pub fn check_rotation_flip(x: &Word, d: usize, ihat: usize) -> bool {
    let n = x.len();
    if d >= n || ihat >= n {
        return false;
    }
    let rotated = x.symbols().iter().cycle().skip(d).take(n);
    rotated.enumerate().all(|(i, &s)| {
        let flipped = i == 0 || i == ihat;
        let target = x.symbols()[i];
        let expect = if flipped && ihat != 0 {
            target.flipped()
        } else {
            target
        };
        s == expect
    })
}

/// Splits `XY` into `X̃` (first `α` symbols) and `Ỹ` (the rest).
pub fn split_at_alpha(x: &Word, y: &Word, alpha: usize) -> Result<(Word, Word)> {
    let xy = x.concat(y);
    if alpha == 0 || alpha >= xy.len() {
        return Err(Error::IndexOutOfRange {
            index: alpha,
            len: xy.len(),
        });
    }
    let (head, tail) = xy.symbols().split_at(alpha);
    Ok((Word::new(head.to_vec())?, Word::new(tail.to_vec())?))
}

pub fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Multiplicative inverse of `a` modulo `n`, when it exists.
pub fn mod_inverse(a: usize, n: usize) -> Option<usize> {
    (1..n).find(|&m| (m * a) % n == 1 % n)
}

/// A finite window `[i_lo, i_hi]` of the bi-infinite sequence `S = X^∞ Y X^∞`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolWindow {
    i_lo: i64,
    symbols: Vec<Symbol>,
}

impl SymbolWindow {
    pub fn i_lo(&self) -> i64 {
        self.i_lo
    }

    pub fn i_hi(&self) -> i64 {
        self.i_lo + self.symbols.len() as i64 - 1
    }

    /// Position of index 0 inside [`Self::symbols`].
    pub fn offset_of_index_zero(&self) -> usize {
        (-self.i_lo) as usize
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn get(&self, i: i64) -> Option<Symbol> {
        if i < self.i_lo || i > self.i_hi() {
            return None;
        }
        Some(self.symbols[(i - self.i_lo) as usize])
    }

    /// The symbols for `i` in `[lo, hi]` as a word.
    pub fn slice(&self, lo: i64, hi: i64) -> Option<Word> {
        let symbols = (lo..=hi).map(|i| self.get(i)).collect::<Option<Vec<_>>>()?;
        Word::new(symbols).ok()
    }
}

/// The symbol `S_i` of `X^∞ Y X^∞`, with `S_0 = Y_0`.
pub fn homoclinic_symbol(x: &Word, y: &Word, i: i64) -> Symbol {
    let n = x.len() as i64;
    let p = y.len() as i64;
    if i < 0 {
        x.symbols()[i.rem_euclid(n) as usize]
    } else if i < p {
        y.symbols()[i as usize]
    } else {
        x.symbols()[(i - p).rem_euclid(n) as usize]
    }
}

pub fn homoclinic_window(x: &Word, y: &Word, i_lo: i64, i_hi: i64) -> Result<SymbolWindow> {
    if i_lo > 0 || i_hi < 0 {
        return Err(Error::InvalidWindow { lo: i_lo, hi: i_hi });
    }
    let symbols = (i_lo..=i_hi).map(|i| homoclinic_symbol(x, y, i)).collect();
    Ok(SymbolWindow { i_lo, symbols })
}

/// Pairs `(i, j)` with `S_{(j-1)n+i} != S_{jn+i}` for `i` in `0..n` and
/// `j` in `[j_lo, j_hi]`.
pub fn crossing_pairs(x: &Word, y: &Word, j_lo: i64, j_hi: i64) -> Vec<(usize, i64)> {
    let n = x.len() as i64;
    let mut out = Vec::new();
    for j in j_lo..=j_hi {
        for i in 0..n {
            if homoclinic_symbol(x, y, (j - 1) * n + i) != homoclinic_symbol(x, y, j * n + i) {
                out.push((i as usize, j));
            }
        }
    }
    out
}

//! Words over the alphabet `[m] = {1, ..., m}` and the admissibility
//! conditions that pick out the monomial basis of `B(m,k)`.
//!
//! A word is *admissible* (strict variant) when no `k` consecutive letters
//! are strictly decreasing. The weak variant forbids `k` consecutive weakly
//! decreasing letters instead. Positions returned by the API are 0-based.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The pair `(m, k)`: number of generators and relation degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AlgebraParams {
    m: usize,
    k: usize,
}

impl AlgebraParams {
    /// Letters are stored as `u8`, so `m` is capped at 255.
    pub const MAX_M: usize = u8::MAX as usize;

    pub fn new(m: usize, k: usize) -> Result<Self> {
        if k < 2 || k > m || m > Self::MAX_M {
            return Err(Error::InvalidParams { m, k });
        }
        Ok(AlgebraParams { m, k })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Which decreasing windows are forbidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Forbid `k` consecutive strictly decreasing letters (the basis of `B(m,k)`).
    #[default]
    Strict,
    /// Forbid `k` consecutive weakly decreasing letters.
    Weak,
}

impl Variant {
    /// Whether `next` placed after `prev` continues a decreasing run.
    #[inline]
    pub fn continues(self, prev: u8, next: u8) -> bool {
        match self {
            Variant::Strict => prev > next,
            Variant::Weak => prev >= next,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Strict => "strict",
            Variant::Weak => "weak",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Variant::Strict),
            "weak" => Ok(Variant::Weak),
            other => Err(Error::parse("variant", other)),
        }
    }
}

/// A finite sequence of letters; the free-algebra monomial `x_{i_1} ... x_{i_l}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Builds a word and checks every letter against `params`.
    pub fn checked(letters: Vec<u8>, params: &AlgebraParams) -> Result<Self> {
        let w = Word(letters);
        w.check(params)?;
        Ok(w)
    }

    pub fn check(&self, params: &AlgebraParams) -> Result<()> {
        match self.0.iter().find(|&&c| c == 0 || c as usize > params.m()) {
            Some(&c) => Err(Error::LetterOutOfRange {
                letter: c as usize,
                m: params.m(),
            }),
            None => Ok(()),
        }
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of pairs `s < t` with `w[s] > w[t]`.
    pub fn inversions(&self) -> usize {
        inversions(&self.0)
    }

    /// The word `letter . self`.
    pub fn prepend(&self, letter: u8) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(letter);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    /// Drops the first letter.
    pub fn tail(&self) -> Word {
        Word(self.0.get(1..).unwrap_or(&[]).to_vec())
    }

    pub fn is_admissible(&self, params: &AlgebraParams) -> Result<bool> {
        self.check(params)?;
        Ok(first_run(&self.0, params.k(), Variant::Strict).is_none())
    }

    /// Admissibility under either variant.
    pub fn is_admissible_variant(&self, params: &AlgebraParams, variant: Variant) -> Result<bool> {
        self.check(params)?;
        Ok(first_run(&self.0, params.k(), variant).is_none())
    }

    /// Start of the leftmost strictly decreasing window of length `k`.
    pub fn smallest_decreasing_run(&self, params: &AlgebraParams) -> Option<usize> {
        first_run(&self.0, params.k(), Variant::Strict)
    }

    /// Start of the rightmost strictly decreasing window of length `k`.
    pub fn last_decreasing_run(&self, params: &AlgebraParams) -> Option<usize> {
        let k = params.k();
        if self.0.len() < k {
            return None;
        }
        (0..=self.0.len() - k)
            .rev()
            .find(|&s| self.0[s..s + k].windows(2).all(|p| p[0] > p[1]))
    }
}

pub(crate) fn inversions(letters: &[u8]) -> usize {
    let mut count = 0;
    for (s, &a) in letters.iter().enumerate() {
        count += letters[s + 1..].iter().filter(|&&b| a > b).count();
    }
    count
}

/// Left-to-right scan keeping the length of the current decreasing run.
pub(crate) fn first_run(letters: &[u8], k: usize, variant: Variant) -> Option<usize> {
    let mut run = 1;
    for t in 1..letters.len() {
        if variant.continues(letters[t - 1], letters[t]) {
            run += 1;
            if run >= k {
                return Some(t + 1 - k);
            }
        } else {
            run = 1;
        }
    }
    None
}

impl From<Vec<u8>> for Word {
    fn from(v: Vec<u8>) -> Self {
        Word(v)
    }
}

impl<const N: usize> From<[u8; N]> for Word {
    fn from(v: [u8; N]) -> Self {
        Word(v.to_vec())
    }
}

/// Comma-separated letters, e.g. `4,3,2,6,1`. The empty word prints as nothing.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, c) in self.0.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u8>()
                    .map_err(|e| Error::parse("word", format!("{part:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// Lexicographic stream of the admissible words of a fixed length.
///
/// Backtracking keeps the decreasing-run length at each position, so
/// extending a prefix by one letter is an O(1) test.
#[derive(Debug, Clone)]
pub struct AdmissibleWords {
    m: u8,
    k: usize,
    variant: Variant,
    letters: Vec<u8>,
    runs: Vec<usize>,
    started: bool,
    done: bool,
}

pub fn enumerate_admissible(
    params: &AlgebraParams,
    len: usize,
    variant: Variant,
) -> AdmissibleWords {
    AdmissibleWords {
        m: params.m() as u8,
        k: params.k(),
        variant,
        letters: vec![0; len],
        runs: vec![0; len],
        started: false,
        done: false,
    }
}

impl AdmissibleWords {
    fn run_with(&self, pos: usize, c: u8) -> usize {
        if pos > 0 && self.variant.continues(self.letters[pos - 1], c) {
            self.runs[pos - 1] + 1
        } else {
            1
        }
    }

    /// Smallest valid completion of `letters[..pos]` with `letters[pos] >= start`,
    /// backtracking into the prefix when none exists.
    fn complete(&mut self, mut pos: usize, mut start: u8) -> bool {
        let len = self.letters.len();
        loop {
            if pos == len {
                return true;
            }
            let found = (start..=self.m).find(|&c| self.run_with(pos, c) < self.k);
            match found {
                Some(c) => {
                    self.runs[pos] = self.run_with(pos, c);
                    self.letters[pos] = c;
                    pos += 1;
                    start = 1;
                }
                None => {
                    if pos == 0 {
                        return false;
                    }
                    pos -= 1;
                    start = self.letters[pos] + 1;
                }
            }
        }
    }
}

impl Iterator for AdmissibleWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        let ok = if !self.started {
            self.started = true;
            self.complete(0, 1)
        } else if self.letters.is_empty() {
            false
        } else {
            let last = self.letters.len() - 1;
            let start = self.letters[last] + 1;
            self.complete(last, start)
        };
        if ok {
            Some(Word(self.letters.clone()))
        } else {
            self.done = true;
            None
        }
    }
}

/// All admissible words of length `0..=max_len`, shortest first.
pub fn admissible_up_to(params: &AlgebraParams, max_len: usize, variant: Variant) -> Vec<Word> {
    (0..=max_len)
        .flat_map(|len| enumerate_admissible(params, len, variant))
        .collect()
}

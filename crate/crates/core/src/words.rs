//! Alphabets, words over generators and their formal inverses, free and
//! cyclic reduction, and finite presentations.
//!
//! A [`Letter`] is stored as the code `2 * generator + inverse`, so the
//! natural order on codes is the ShortLex letter order `a < a^-1 < b < b^-1 < ...`
//! induced by the alphabet order.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, Result};

/// An ordered list of generator names.
#[derive(Clone, Debug)]
pub struct Alphabet {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl Eq for Alphabet {}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != "1"
        && name != "_"
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '*' | ',' | '^' | '(' | ')' | '|' | '"'))
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(Error::Malformed(format!("invalid generator name {name:?}")));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Malformed(format!("duplicate generator name {name:?}")));
            }
        }
        Ok(Alphabet { names, index })
    }

    /// Number of generators.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Number of letters, generators and their inverses.
    pub fn num_letters(&self) -> usize {
        2 * self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, generator: usize) -> &str {
        &self.names[generator]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// All letters in ShortLex order.
    pub fn letters(&self) -> impl Iterator<Item = Letter> {
        (0..self.num_letters()).map(Letter::from_code)
    }

    /// True when every generator is a single lowercase ASCII letter, which
    /// enables the compact `abAB` word syntax.
    pub fn is_single_char(&self) -> bool {
        self.names
            .iter()
            .all(|n| n.len() == 1 && n.as_bytes()[0].is_ascii_lowercase())
    }

    pub fn check_word(&self, w: &Word) -> Result<()> {
        match w.iter().find(|l| l.generator() >= self.len()) {
            Some(l) => Err(Error::Malformed(format!(
                "generator index {} out of range for alphabet of size {}",
                l.generator(),
                self.len()
            ))),
            None => Ok(()),
        }
    }

    pub fn format_letter(&self, l: Letter) -> String {
        if l.is_inverse() {
            format!("{}^-1", self.names[l.generator()])
        } else {
            self.names[l.generator()].clone()
        }
    }

    pub fn parse_letter(&self, s: &str) -> Result<Letter> {
        let s = s.trim();
        let (name, inverse) = match s.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (s, false),
        };
        self.index_of(name)
            .map(|g| Letter::new(g, inverse))
            .ok_or_else(|| Error::Malformed(format!("unknown letter {s:?}")))
    }

    /// Formats a word as `a*b^-1*c`; the empty word is `1`.
    pub fn format_word(&self, w: &Word) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.iter()
            .map(|&l| self.format_letter(l))
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses `a*b^-1*c^3`. The empty string and `1` denote the empty word.
    /// For single-character alphabets a token such as `abAB` is read letter
    /// by letter, uppercase meaning inverse.
    pub fn parse_word(&self, s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        let trimmed = s.trim();
        if trimmed.is_empty() || trimmed == "1" {
            return Ok(Word::empty());
        }
        let mut offset = 0;
        for token in s.split('*') {
            let pos = offset + (token.len() - token.trim_start().len());
            offset += token.len() + 1;
            let token = token.trim();
            if token.is_empty() {
                return Err(Error::Parse { pos, msg: "empty factor".into() });
            }
            if token == "1" {
                continue;
            }
            let (base, exponent) = match token.split_once('^') {
                Some((b, e)) => {
                    let e: i64 = e.trim().parse().map_err(|_| Error::Parse {
                        pos,
                        msg: format!("bad exponent in {token:?}"),
                    })?;
                    (b.trim(), e)
                }
                None => (token, 1),
            };
            let unit: Vec<Letter> = if let Some(g) = self.index_of(base) {
                vec![Letter::new(g, false)]
            } else if self.is_single_char() && base.chars().all(|c| c.is_ascii_alphabetic()) {
                let mut out = Vec::with_capacity(base.len());
                for (k, c) in base.chars().enumerate() {
                    let lower = c.to_ascii_lowercase().to_string();
                    let g = self.index_of(&lower).ok_or_else(|| Error::Parse {
                        pos: pos + k,
                        msg: format!("unknown generator {c:?}"),
                    })?;
                    out.push(Letter::new(g, c.is_ascii_uppercase()));
                }
                out
            } else {
                return Err(Error::Parse { pos, msg: format!("unknown generator {base:?}") });
            };
            let unit = Word(unit);
            let unit = if exponent < 0 { unit.inverse() } else { unit };
            for _ in 0..exponent.unsigned_abs() {
                letters.extend_from_slice(unit.letters());
            }
        }
        Ok(Word(letters))
    }

    /// Parses a comma-separated list of words. The empty string is the empty list.
    pub fn parse_word_list(&self, s: &str) -> Result<Vec<Word>> {
        if s.trim().is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        let mut offset = 0;
        for part in s.split(',') {
            let w = self.parse_word(part).map_err(|e| match e {
                Error::Parse { pos, msg } => Error::Parse { pos: pos + offset, msg },
                other => other,
            })?;
            offset += part.len() + 1;
            out.push(w);
        }
        Ok(out)
    }
}

/// A generator or its formal inverse.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Letter(u32);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((2 * generator + inverse as usize) as u32)
    }

    pub fn from_code(code: usize) -> Self {
        Letter(code as u32)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }
}

/// A finite sequence of letters. Ordered by ShortLex.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "x{}", l.generator())?;
            if l.is_inverse() {
                write!(f, "⁻¹")?;
            }
        }
        Ok(())
    }
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(l: Letter) -> Self {
        Word(vec![l])
    }

    /// Builds a word from `(generator, exponent sign)` pairs, convenient in tests.
    pub fn from_pairs(pairs: &[(usize, i8)]) -> Self {
        Word(pairs.iter().map(|&(g, s)| Letter::new(g, s < 0)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Letter> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, l: Letter) {
        self.0.push(l);
    }

    /// Concatenation, without reduction.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Reduced product `self · other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        for &l in other.iter() {
            if v.last() == Some(&l.inverse()) {
                v.pop();
            } else {
                v.push(l);
            }
        }
        Word(v)
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&f), Some(&l)) => self.len() == 1 || f != l.inverse(),
                _ => true,
            }
    }

    /// `x⁻¹ · self · x`, reduced.
    pub fn conjugate_by(&self, x: &Word) -> Word {
        x.inverse().mul(self).mul(x)
    }

    /// Re-indexes generators through `map` (old generator index to new one).
    pub fn map_generators(&self, map: &[usize]) -> Word {
        Word(self.0.iter().map(|l| Letter::new(map[l.generator()], l.is_inverse())).collect())
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<T: IntoIterator<Item = Letter>>(iter: T) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a Word {
    type Item = &'a Letter;
    type IntoIter = std::slice::Iter<'a, Letter>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The freely reduced form of `w`.
pub fn free_reduce(w: &Word) -> Word {
    Word::empty().mul(w)
}

/// Splits a freely reduced `w` as `u · c · u⁻¹` with `c` cyclically reduced
/// and `u` maximal. Returns `(c, u)`.
pub fn cyclic_reduce(w: &Word) -> (Word, Word) {
    let l = w.letters();
    let mut i = 0;
    while i + 1 < l.len().saturating_sub(i) && l[i] == l[l.len() - 1 - i].inverse() {
        i += 1;
    }
    (Word(l[i..l.len() - i].to_vec()), Word(l[..i].to_vec()))
}

/// All cyclic rotations of `w`, starting with `w` itself.
pub fn rotations(w: &Word) -> impl Iterator<Item = Word> + '_ {
    let n = w.len();
    (0..n.max(1)).map(move |k| {
        let mut v = w.letters()[k.min(n)..].to_vec();
        v.extend_from_slice(&w.letters()[..k.min(n)]);
        Word(v)
    })
}

/// Free enumeration of all freely reduced words over `alphabet` of length
/// exactly `len`, in ShortLex order.
pub fn reduced_words_of_length(num_generators: usize, len: usize) -> Vec<Word> {
    let mut layer = vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::new();
        for w in &layer {
            for code in 0..2 * num_generators {
                let l = Letter::from_code(code);
                if w.0.last() != Some(&l.inverse()) {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
        }
        layer = next;
    }
    layer
}

/// ShortLex iterator over all freely reduced words.
pub struct ReducedWords {
    num_generators: usize,
    len: usize,
    layer: std::vec::IntoIter<Word>,
}

impl ReducedWords {
    pub fn new(num_generators: usize) -> Self {
        ReducedWords { num_generators, len: 0, layer: vec![Word::empty()].into_iter() }
    }
}

impl Iterator for ReducedWords {
    type Item = Word;
    fn next(&mut self) -> Option<Word> {
        loop {
            if let Some(w) = self.layer.next() {
                return Some(w);
            }
            if self.num_generators == 0 {
                return None;
            }
            self.len += 1;
            self.layer = reduced_words_of_length(self.num_generators, self.len).into_iter();
        }
    }
}

/// A finite presentation `⟨A | R⟩`. Relators are stored freely and
/// cyclically reduced, nonempty, without duplicates; closure under
/// rotation and inversion is computed on demand by [`relator_closure`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    alphabet: Alphabet,
    relators: Vec<Word>,
}

impl Presentation {
    pub fn new(alphabet: Alphabet, relators: Vec<Word>) -> Result<Self> {
        let mut out: Vec<Word> = Vec::with_capacity(relators.len());
        for r in &relators {
            alphabet.check_word(r)?;
            let (c, _) = cyclic_reduce(&free_reduce(r));
            if !c.is_empty() && !out.contains(&c) {
                out.push(c);
            }
        }
        Ok(Presentation { alphabet, relators: out })
    }

    pub fn parse(alphabet: Alphabet, relators: &[impl AsRef<str>]) -> Result<Self> {
        let words = relators
            .iter()
            .map(|r| alphabet.parse_word(r.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(alphabet, words)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }
}

/// Closes the relator set under cyclic permutation and inversion.
/// The output is deduplicated and sorted in ShortLex order.
pub fn relator_closure(p: &Presentation) -> Presentation {
    let mut set = BTreeSet::new();
    for r in &p.relators {
        let inv = r.inverse();
        for w in rotations(r).chain(rotations(&inv)) {
            set.insert(w);
        }
    }
    Presentation { alphabet: p.alphabet.clone(), relators: set.into_iter().collect() }
}

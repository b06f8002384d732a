//! Finite automata over group alphabets and padded two-tape automata.
//!
//! Letters are encoded by [`Letter::code`]. A pair automaton over an alphabet
//! with `m` letters reads symbols `l * (m + 1) + r`, where `l` and `r` are
//! letter codes or the pad `m`; the symbol with both coordinates padded is
//! never used.

mod engine;
mod json;

pub use json::{AutomatonJson, Label};

pub use engine::{Automaton, Dfa};
pub(crate) use engine::Builder;

use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

fn check_same(a: &Alphabet, b: &Alphabet) -> Result<()> {
    if a != b {
        return Err(Error::AlphabetMismatch(format!(
            "{:?} vs {:?}",
            a.names(),
            b.names()
        )));
    }
    Ok(())
}

fn letters_of(w: &Word) -> impl Iterator<Item = usize> + '_ {
    w.iter().map(|l| l.code())
}

fn word_of(symbols: &[usize]) -> Word {
    symbols.iter().map(|&s| Letter::from_code(s)).collect()
}

/// Automaton over the letters of an alphabet.
#[derive(Clone, Debug)]
pub struct Fsa {
    alphabet: Alphabet,
    auto: Automaton,
}

impl Fsa {
    pub fn new(alphabet: Alphabet, auto: Automaton) -> Result<Self> {
        if auto.num_symbols() != alphabet.num_letters() {
            return Err(Error::Dimension { expected: alphabet.num_letters(), found: auto.num_symbols() });
        }
        Ok(Fsa { alphabet, auto })
    }

    pub fn from_dfa(alphabet: &Alphabet, dfa: &Dfa) -> Self {
        debug_assert_eq!(dfa.num_symbols(), alphabet.num_letters());
        Fsa { alphabet: alphabet.clone(), auto: dfa.to_automaton() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn automaton(&self) -> &Automaton {
        &self.auto
    }

    pub fn num_states(&self) -> usize {
        self.auto.num_states()
    }

    /// Deterministic table for this automaton (subset construction if needed).
    pub fn dfa(&self) -> Dfa {
        if self.auto.is_deterministic() {
            let mut d = Dfa::with_states(self.auto.num_symbols(), self.auto.num_states());
            d.set_initial(self.auto.initial());
            for q in 0..self.auto.num_states() {
                d.set_accepting(q, self.auto.is_accepting(q));
                for (s, t) in self.auto.transitions(q) {
                    d.set_transition(q, s.expect("deterministic"), t);
                }
            }
            d
        } else {
            self.auto.determinize()
        }
    }

    pub fn empty(alphabet: &Alphabet) -> Self {
        Fsa::from_dfa(alphabet, &Dfa::empty(alphabet.num_letters()))
    }

    /// The language `{ε}`.
    pub fn epsilon(alphabet: &Alphabet) -> Self {
        Fsa::from_words(alphabet, &[Word::empty()])
    }

    /// All words, reduced or not.
    pub fn all_words(alphabet: &Alphabet) -> Self {
        let k = alphabet.num_letters();
        let mut d = Dfa::with_states(k, 1);
        d.set_accepting(0, true);
        for s in 0..k {
            d.set_transition(0, s, 0);
        }
        Fsa::from_dfa(alphabet, &d)
    }

    /// All freely reduced words.
    pub fn reduced_words(alphabet: &Alphabet) -> Self {
        Fsa::from_dfa(alphabet, &reduced_dfa(alphabet.num_letters()))
    }

    /// A finite language.
    pub fn from_words(alphabet: &Alphabet, words: &[Word]) -> Self {
        let k = alphabet.num_letters();
        let mut a = Automaton::new(k, 1, 0);
        for w in words {
            let mut q = 0;
            for s in letters_of(w) {
                let t = a.add_state(false);
                a.add_transition(q, Some(s), t);
                q = t;
            }
            a.set_accepting(q, true);
        }
        Fsa::from_dfa(alphabet, &a.determinize().minimize())
    }

    pub fn accepts(&self, w: &Word) -> bool {
        self.dfa().accepts(letters_of(w))
    }

    /// Subset construction, reachable states only.
    pub fn determinize(&self) -> Fsa {
        Fsa::from_dfa(&self.alphabet, &self.auto.determinize())
    }

    /// Canonical minimal deterministic automaton without dead states.
    pub fn minimize(&self) -> Fsa {
        Fsa::from_dfa(&self.alphabet, &self.dfa().minimize())
    }

    fn combine(&self, other: &Fsa, f: impl Fn(bool, bool) -> bool) -> Result<Fsa> {
        check_same(&self.alphabet, &other.alphabet)?;
        Ok(Fsa::from_dfa(&self.alphabet, &self.dfa().product(&other.dfa(), f).minimize()))
    }

    pub fn union(&self, other: &Fsa) -> Result<Fsa> {
        self.combine(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Fsa) -> Result<Fsa> {
        self.combine(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Fsa) -> Result<Fsa> {
        self.combine(other, |a, b| a && !b)
    }

    /// Complement within the freely reduced words.
    pub fn complement(&self) -> Fsa {
        let k = self.alphabet.num_letters();
        let d = reduced_dfa(k).product(&self.dfa(), |a, b| a && !b).minimize();
        Fsa::from_dfa(&self.alphabet, &d)
    }

    pub fn is_empty(&self) -> bool {
        self.dfa().is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.dfa().is_finite()
    }

    /// The `n` ShortLex-least accepted words.
    pub fn enumerate(&self, n: usize) -> Vec<Word> {
        self.dfa().enumerate(n).iter().map(|w| word_of(w)).collect()
    }

    /// Accepted words of length at most `max_len`, ShortLex ordered.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        self.dfa().words_up_to(max_len).iter().map(|w| word_of(w)).collect()
    }

    /// `None` when `self ⊆ other`, otherwise the ShortLex-least word of
    /// `self` missing from `other`.
    pub fn subset_witness(&self, other: &Fsa) -> Result<Option<Word>> {
        Ok(self.difference(other)?.enumerate(1).pop())
    }

    pub fn subset(&self, other: &Fsa) -> Result<bool> {
        Ok(self.subset_witness(other)?.is_none())
    }

    pub fn language_eq(&self, other: &Fsa) -> Result<bool> {
        check_same(&self.alphabet, &other.alphabet)?;
        Ok(self.dfa().minimize() == other.dfa().minimize())
    }
}

fn reduced_dfa(k: usize) -> Dfa {
    // State 0 is the start; state 1 + c means the last letter had code c.
    let mut d = Dfa::with_states(k, k + 1);
    for q in 0..=k {
        d.set_accepting(q, true);
        for c in 0..k {
            if q == 0 || (q - 1) != (c ^ 1) {
                d.set_transition(q, c, c + 1);
            }
        }
    }
    d
}

/// Synchronous two-tape automaton with end padding.
#[derive(Clone, Debug)]
pub struct PairFsa {
    alphabet: Alphabet,
    auto: Automaton,
}

/// Symbol for the pair `(x, y)`; `None` is the pad.
pub fn pair_symbol(num_letters: usize, x: Option<Letter>, y: Option<Letter>) -> usize {
    let pad = num_letters;
    let l = x.map_or(pad, |l| l.code());
    let r = y.map_or(pad, |l| l.code());
    l * (pad + 1) + r
}

/// Splits a pair symbol into its two coordinates; `None` is the pad.
pub fn split_pair_symbol(num_letters: usize, symbol: usize) -> (Option<Letter>, Option<Letter>) {
    let pad = num_letters;
    let (l, r) = (symbol / (pad + 1), symbol % (pad + 1));
    let f = |c: usize| (c != pad).then(|| Letter::from_code(c));
    (f(l), f(r))
}

/// Symbol sequence for the padded pair `(u, v)`.
pub fn pad_pair(num_letters: usize, u: &Word, v: &Word) -> Vec<usize> {
    let n = u.len().max(v.len());
    (0..n)
        .map(|i| pair_symbol(num_letters, u.letters().get(i).copied(), v.letters().get(i).copied()))
        .collect()
}

fn unpad(num_letters: usize, symbols: &[usize]) -> (Word, Word) {
    let mut u = Word::empty();
    let mut v = Word::empty();
    for &s in symbols {
        let (x, y) = split_pair_symbol(num_letters, s);
        if let Some(x) = x {
            u.push(x);
        }
        if let Some(y) = y {
            v.push(y);
        }
    }
    (u, v)
}

/// Accepts exactly the well-padded symbol sequences.
fn padding_dfa(m: usize) -> Dfa {
    // 0: both tapes live, 1: first tape padded, 2: second tape padded.
    let k = (m + 1) * (m + 1);
    let mut d = Dfa::with_states(k, 3);
    for q in 0..3 {
        d.set_accepting(q, true);
    }
    for l in 0..=m {
        for r in 0..=m {
            let s = l * (m + 1) + r;
            match (l == m, r == m) {
                (false, false) => d.set_transition(0, s, 0),
                (true, false) => {
                    d.set_transition(0, s, 1);
                    d.set_transition(1, s, 1);
                }
                (false, true) => {
                    d.set_transition(0, s, 2);
                    d.set_transition(2, s, 2);
                }
                (true, true) => {}
            }
        }
    }
    d
}

impl PairFsa {
    /// Wraps an automaton over pair symbols, discarding ill-padded inputs.
    pub fn new(alphabet: Alphabet, auto: Automaton) -> Result<Self> {
        let m = alphabet.num_letters();
        if auto.num_symbols() != (m + 1) * (m + 1) {
            return Err(Error::Dimension { expected: (m + 1) * (m + 1), found: auto.num_symbols() });
        }
        let d = auto.determinize().product(&padding_dfa(m), |a, b| a && b).minimize();
        Ok(PairFsa { alphabet, auto: d.to_automaton() })
    }

    pub(crate) fn from_dfa_unchecked(alphabet: &Alphabet, dfa: &Dfa) -> Self {
        PairFsa { alphabet: alphabet.clone(), auto: dfa.to_automaton() }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn automaton(&self) -> &Automaton {
        &self.auto
    }

    pub fn num_states(&self) -> usize {
        self.auto.num_states()
    }

    fn m(&self) -> usize {
        self.alphabet.num_letters()
    }

    pub fn dfa(&self) -> Dfa {
        Fsa { alphabet: self.alphabet.clone(), auto: self.auto.clone() }.dfa()
    }

    pub fn minimize(&self) -> PairFsa {
        PairFsa::from_dfa_unchecked(&self.alphabet, &self.dfa().minimize())
    }

    /// The diagonal `{(u, u) : u ∈ l}`.
    pub fn identity(l: &Fsa) -> PairFsa {
        let m = l.alphabet.num_letters();
        let d = l.dfa();
        let mut out = Dfa::with_states((m + 1) * (m + 1), d.num_states());
        out.set_initial(d.initial());
        for q in 0..d.num_states() {
            out.set_accepting(q, d.is_accepting(q));
            for c in 0..m {
                if let Some(t) = d.next(q, c) {
                    out.set_transition(q, c * (m + 1) + c, t);
                }
            }
        }
        PairFsa::from_dfa_unchecked(&l.alphabet, &out.minimize())
    }

    /// A finite relation.
    pub fn from_pairs(alphabet: &Alphabet, pairs: &[(Word, Word)]) -> Self {
        let m = alphabet.num_letters();
        let mut a = Automaton::new((m + 1) * (m + 1), 1, 0);
        for (u, v) in pairs {
            let mut q = 0;
            for s in pad_pair(m, u, v) {
                let t = a.add_state(false);
                a.add_transition(q, Some(s), t);
                q = t;
            }
            a.set_accepting(q, true);
        }
        PairFsa::from_dfa_unchecked(alphabet, &a.determinize().minimize())
    }

    pub fn empty(alphabet: &Alphabet) -> Self {
        let m = alphabet.num_letters();
        PairFsa::from_dfa_unchecked(alphabet, &Dfa::empty((m + 1) * (m + 1)))
    }

    pub fn accepts(&self, u: &Word, v: &Word) -> bool {
        self.dfa().accepts(pad_pair(self.m(), u, v))
    }

    pub fn is_empty(&self) -> bool {
        self.dfa().is_empty()
    }

    /// Accepted pairs whose padded length is at most `max_len`.
    pub fn pairs_up_to(&self, max_len: usize) -> Vec<(Word, Word)> {
        let m = self.m();
        self.dfa().words_up_to(max_len).iter().map(|s| unpad(m, s)).collect()
    }

    /// `{(u, w) : ∃v (u, v) ∈ self, (v, w) ∈ other}`.
    pub fn compose(&self, other: &PairFsa) -> Result<PairFsa> {
        check_same(&self.alphabet, &other.alphabet)?;
        let m = self.m();
        let (r, s) = (self.dfa(), other.dfa());
        let mut b = Builder::new((m + 1) * (m + 1), (r.initial(), s.initial()));
        while let Some((p, q)) = b.queue.pop_front() {
            let from = b.ids[&(p, q)];
            if r.is_accepting(p) && s.is_accepting(q) {
                b.auto.set_accepting(from, true);
            }
            // A finished relation idles on (pad, pad); ill-padded outputs
            // this allows are removed by the final padding filter.
            let step = |d: &Dfa, st: usize, a: usize, b: usize| {
                if a == m && b == m {
                    Some(st)
                } else {
                    d.next(st, a * (m + 1) + b)
                }
            };
            for x in 0..=m {
                for y in 0..=m {
                    let Some(p2) = step(&r, p, x, y) else { continue };
                    for z in 0..=m {
                        if x == m && y == m && z == m {
                            continue;
                        }
                        let Some(q2) = step(&s, q, y, z) else { continue };
                        let to = b.id((p2, q2));
                        let sym = (x != m || z != m).then_some(x * (m + 1) + z);
                        b.auto.add_transition(from, sym, to);
                    }
                }
            }
        }
        let d = b.auto.determinize().product(&padding_dfa(m), |a, b| a && b).minimize();
        Ok(PairFsa::from_dfa_unchecked(&self.alphabet, &d))
    }

    /// Projection onto one coordinate of the pairs whose other coordinate
    /// is read by `filter` (when given). `second` selects the output tape.
    fn project(&self, filter: Option<&Dfa>, second: bool) -> Automaton {
        let m = self.m();
        let r = self.dfa();
        let f0 = filter.map_or(0, |f| f.initial());
        let mut b = Builder::new(m, (r.initial(), f0));
        while let Some((p, q)) = b.queue.pop_front() {
            let from = b.ids[&(p, q)];
            if r.is_accepting(p) && filter.is_none_or(|f| f.is_accepting(q)) {
                b.auto.set_accepting(from, true);
            }
            for sym in 0..(m + 1) * (m + 1) {
                let Some(p2) = r.next(p, sym) else { continue };
                let (x, y) = (sym / (m + 1), sym % (m + 1));
                let (read, out) = if second { (x, y) } else { (y, x) };
                let q2 = match filter {
                    Some(f) if read != m => match f.next(q, read) {
                        Some(t) => t,
                        None => continue,
                    },
                    _ => q,
                };
                let to = b.id((p2, q2));
                b.auto.add_transition(from, (out != m).then_some(out), to);
            }
        }
        b.auto
    }

    /// `{v : ∃u ∈ a, (u, v) ∈ self}`.
    pub fn image(&self, a: &Fsa) -> Result<Fsa> {
        check_same(&self.alphabet, &a.alphabet)?;
        let d = self.project(Some(&a.dfa()), true).determinize().minimize();
        Ok(Fsa::from_dfa(&self.alphabet, &d))
    }

    /// `{u : ∃v, (u, v) ∈ self}`.
    pub fn domain(&self) -> Fsa {
        let d = self.project(None, false).determinize().minimize();
        Fsa::from_dfa(&self.alphabet, &d)
    }

    /// `{v : ∃u, (u, v) ∈ self}`.
    pub fn range(&self) -> Fsa {
        let d = self.project(None, true).determinize().minimize();
        Fsa::from_dfa(&self.alphabet, &d)
    }

    /// Pairs of `self` with `u ∈ first` and `v ∈ second`.
    pub fn restrict(&self, first: &Fsa, second: &Fsa) -> Result<PairFsa> {
        check_same(&self.alphabet, &first.alphabet)?;
        check_same(&self.alphabet, &second.alphabet)?;
        let m = self.m();
        let (r, f, g) = (self.dfa(), first.dfa(), second.dfa());
        let mut b = Builder::new((m + 1) * (m + 1), (r.initial(), f.initial(), g.initial()));
        while let Some((p, q1, q2)) = b.queue.pop_front() {
            let from = b.ids[&(p, q1, q2)];
            if r.is_accepting(p) && f.is_accepting(q1) && g.is_accepting(q2) {
                b.auto.set_accepting(from, true);
            }
            for sym in 0..(m + 1) * (m + 1) {
                let Some(p2) = r.next(p, sym) else { continue };
                let (x, y) = (sym / (m + 1), sym % (m + 1));
                let n1 = if x == m { Some(q1) } else { f.next(q1, x) };
                let n2 = if y == m { Some(q2) } else { g.next(q2, y) };
                if let (Some(n1), Some(n2)) = (n1, n2) {
                    let to = b.id((p2, n1, n2));
                    b.auto.add_transition(from, Some(sym), to);
                }
            }
        }
        Ok(PairFsa::from_dfa_unchecked(&self.alphabet, &b.auto.determinize().minimize()))
    }

    /// The unique `v` with `(u, v)` accepted.
    pub fn apply(&self, u: &Word) -> Result<Word> {
        self.alphabet.check_word(u)?;
        let single = Fsa::from_words(&self.alphabet, std::slice::from_ref(u));
        let images = self.project(Some(&single.dfa()), true).determinize().enumerate(2);
        match images.len() {
            0 => Err(Error::NotInDomain),
            1 => Ok(word_of(&images[0])),
            _ => Err(Error::NotFunctional),
        }
    }

    /// ShortLex-least `u ∈ a` having some `(u, v) ∈ self` with `v ∉ b`,
    /// together with the least such `v`. `None` means `image(a) ⊆ b`.
    pub fn image_escape(&self, a: &Fsa, b: &Fsa) -> Result<Option<(Word, Word)>> {
        check_same(&self.alphabet, &a.alphabet)?;
        check_same(&self.alphabet, &b.alphabet)?;
        let outside = b.dfa().complement();
        let witness_relation = self.restrict(a, &Fsa::from_dfa(&self.alphabet, &outside))?;
        if witness_relation.is_empty() {
            return Ok(None);
        }
        let u = witness_relation.domain().enumerate(1).pop().expect("nonempty relation");
        let single = Fsa::from_words(&self.alphabet, std::slice::from_ref(&u));
        let v = witness_relation.image(&single)?.enumerate(1).pop().expect("u in domain");
        Ok(Some((u, v)))
    }
}

//! ShortLex structures for free groups, free abelian groups and their free
//! products, built from a normal-form function.

use std::collections::HashSet;

use super::AutomaticStructure;
use crate::automata::{Builder, Dfa, Fsa, PairFsa};
use crate::error::{Error, Result};
use crate::words::{free_reduce, Alphabet, Letter, Word};

/// Default bound on word differences explored by the multiplier construction.
pub const DIFFERENCE_BOUND: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Free,
    Abelian,
}

/// A free factor: the free or free abelian group on some generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub kind: FactorKind,
    pub generators: Vec<usize>,
}

/// A free product of free and free abelian factors covering every generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Family {
    factors: Vec<Factor>,
    factor_of: Vec<usize>,
}

impl Family {
    pub fn new(num_generators: usize, mut factors: Vec<Factor>) -> Result<Self> {
        let mut factor_of = vec![usize::MAX; num_generators];
        for (i, f) in factors.iter_mut().enumerate() {
            f.generators.sort_unstable();
            for &g in &f.generators {
                if g >= num_generators || factor_of[g] != usize::MAX {
                    return Err(Error::UnsupportedStructure(format!("generator {g} assigned twice or out of range")));
                }
                factor_of[g] = i;
            }
        }
        if factor_of.contains(&usize::MAX) {
            return Err(Error::UnsupportedStructure("some generator belongs to no factor".into()));
        }
        Ok(Family { factors, factor_of })
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn factor_of(&self, l: Letter) -> usize {
        self.factor_of[l.generator()]
    }

    fn factor_nf(&self, f: usize, w: &Word) -> Word {
        match self.factors[f].kind {
            FactorKind::Free => free_reduce(w),
            FactorKind::Abelian => {
                let gens = &self.factors[f].generators;
                let mut exps = vec![0i64; gens.len()];
                for l in w {
                    let i = gens.binary_search(&l.generator()).expect("letter in factor");
                    exps[i] += if l.is_inverse() { -1 } else { 1 };
                }
                let mut out = Word::empty();
                for (i, &k) in exps.iter().enumerate() {
                    for _ in 0..k.unsigned_abs() {
                        out.push(Letter::new(gens[i], k < 0));
                    }
                }
                out
            }
        }
    }

    /// The ShortLex normal form of `w`: a reduced sequence of syllables.
    pub fn nf(&self, w: &Word) -> Word {
        let mut syllables: Vec<(usize, Word)> = Vec::new();
        for &l in w {
            let f = self.factor_of(l);
            match syllables.last_mut() {
                Some((g, s)) if *g == f => {
                    let mut longer = s.clone();
                    longer.push(l);
                    let reduced = self.factor_nf(f, &longer);
                    if reduced.is_empty() {
                        syllables.pop();
                    } else {
                        *s = reduced;
                    }
                }
                _ => syllables.push((f, Word::letter(l))),
            }
        }
        syllables.into_iter().flat_map(|(_, s)| s.into_letters()).collect()
    }

    /// Factor automaton step; state 0 is the start, `1 + c` means the last
    /// letter had code `c`. Every state accepts.
    fn factor_step(&self, f: usize, q: usize, l: Letter) -> Option<usize> {
        let c = l.code();
        if q == 0 {
            return Some(1 + c);
        }
        let last = Letter::from_code(q - 1);
        match self.factors[f].kind {
            FactorKind::Free => (last != l.inverse()).then_some(1 + c),
            FactorKind::Abelian => {
                (last == l || l.generator() > last.generator()).then_some(1 + c)
            }
        }
    }

    /// DFA for the normal forms.
    pub fn word_acceptor(&self, alphabet: &Alphabet) -> Fsa {
        // None is the start; Some((f, q)) is inside a syllable of factor f.
        let mut b: Builder<Option<(usize, usize)>> = Builder::new(alphabet.num_letters(), None);
        while let Some(key) = b.queue.pop_front() {
            let from = b.ids[&key];
            b.auto.set_accepting(from, true);
            for l in alphabet.letters() {
                let f = self.factor_of(l);
                let next = match key {
                    Some((g, q)) if g == f => self.factor_step(f, q, l),
                    _ => self.factor_step(f, 0, l),
                };
                if let Some(q) = next {
                    let to = b.id(Some((f, q)));
                    b.auto.add_transition(from, Some(l.code()), to);
                }
            }
        }
        Fsa::from_dfa(alphabet, &b.auto.determinize().minimize())
    }

    /// `{(u, v) ∈ L × L : nf(u · target) = v}`, found by tracking the normal
    /// form of the difference `u_t⁻¹ v_t` between prefixes and discarding
    /// differences longer than `bound`.
    pub fn multiplier(&self, alphabet: &Alphabet, l: &Dfa, target: &Word, bound: usize) -> PairFsa {
        const DONE: usize = usize::MAX;
        let m = alphabet.num_letters();
        let target = self.nf(target);
        let fin = |q: usize| q == DONE || l.is_accepting(q);
        let advance = |q: usize, c: usize| -> Option<usize> {
            if c == m {
                fin(q).then_some(DONE)
            } else if q == DONE {
                None
            } else {
                l.next(q, c)
            }
        };
        let mut b = Builder::new((m + 1) * (m + 1), (l.initial(), l.initial(), Word::empty()));
        while let Some(key) = b.queue.pop_front() {
            let from = b.ids[&key];
            let (qu, qv, d) = key;
            if fin(qu) && fin(qv) && d == target {
                b.auto.set_accepting(from, true);
            }
            for y in 0..=m {
                let Some(nu) = advance(qu, y) else { continue };
                for z in 0..=m {
                    if y == m && z == m {
                        continue;
                    }
                    let Some(nv) = advance(qv, z) else { continue };
                    let mut diff = Word::empty();
                    if y != m {
                        diff.push(Letter::from_code(y).inverse());
                    }
                    diff = diff.concat(&d);
                    if z != m {
                        diff.push(Letter::from_code(z));
                    }
                    let diff = self.nf(&diff);
                    if diff.len() > bound {
                        continue;
                    }
                    let to = b.id((nu, nv, diff));
                    b.auto.add_transition(from, Some(y * (m + 1) + z), to);
                }
            }
        }
        PairFsa::from_dfa_unchecked(alphabet, &b.auto.determinize().minimize())
    }

    /// The structure with the normal-form language and its multipliers.
    pub fn structure(&self, alphabet: &Alphabet, bound: usize) -> AutomaticStructure {
        let acceptor = self.word_acceptor(alphabet);
        let dfa = acceptor.dfa();
        let multipliers = alphabet
            .letters()
            .map(|l| self.multiplier(alphabet, &dfa, &Word::letter(l), bound))
            .collect();
        let equality = self.multiplier(alphabet, &dfa, &Word::empty(), bound);
        AutomaticStructure {
            alphabet: alphabet.clone(),
            word_acceptor: acceptor,
            multipliers,
            equality,
            unique_reps: true,
            geodesic: true,
            family: Some(self.clone()),
        }
    }
}

/// ShortLex structure on the free group: all reduced words.
pub fn builtin_shortlex_free(alphabet: &Alphabet) -> AutomaticStructure {
    let gens = (0..alphabet.len()).collect();
    Family::new(alphabet.len(), vec![Factor { kind: FactorKind::Free, generators: gens }])
        .expect("single factor")
        .structure(alphabet, DIFFERENCE_BOUND)
}

/// ShortLex structure on ℤⁿ: sorted words x₁^k₁ ⋯ xₙ^kₙ.
pub fn builtin_shortlex_abelian(alphabet: &Alphabet) -> AutomaticStructure {
    let gens = (0..alphabet.len()).collect();
    Family::new(alphabet.len(), vec![Factor { kind: FactorKind::Abelian, generators: gens }])
        .expect("single factor")
        .structure(alphabet, DIFFERENCE_BOUND)
}

/// Free product of two builtin structures on disjoint alphabets.
pub fn builtin_free_product(s1: &AutomaticStructure, s2: &AutomaticStructure) -> Result<AutomaticStructure> {
    let (Some(f1), Some(f2)) = (&s1.family, &s2.family) else {
        return Err(Error::UnsupportedStructure("free products need builtin factors".into()));
    };
    let names1: HashSet<&String> = s1.alphabet.names().iter().collect();
    if let Some(clash) = s2.alphabet.names().iter().find(|n| names1.contains(n)) {
        return Err(Error::AlphabetMismatch(format!("generator {clash} in both factors")));
    }
    let alphabet = Alphabet::new(s1.alphabet.names().iter().chain(s2.alphabet.names()).map(String::as_str))?;
    let shift = s1.alphabet.len();
    let mut factors = f1.factors.clone();
    factors.extend(f2.factors.iter().map(|f| Factor {
        kind: f.kind,
        generators: f.generators.iter().map(|g| g + shift).collect(),
    }));
    Ok(Family::new(alphabet.len(), factors)?.structure(&alphabet, DIFFERENCE_BOUND))
}

/// Parses `builtin:abelian(a,b)*free(t)` style descriptions.
pub fn builtin_from_spec(spec: &str) -> Result<AutomaticStructure> {
    let body = spec.strip_prefix("builtin:").unwrap_or(spec).trim();
    let mut names: Vec<String> = Vec::new();
    let mut factors = Vec::new();
    for (i, part) in body.split('*').enumerate() {
        let part = part.trim();
        let bad = || Error::UnsupportedStructure(format!("cannot read factor {i} of {spec:?}"));
        let open = part.find('(').ok_or_else(bad)?;
        let inner = part[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let kind = match &part[..open] {
            "free" => FactorKind::Free,
            "abelian" => FactorKind::Abelian,
            _ => return Err(bad()),
        };
        let gens: Vec<usize> = inner
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|n| {
                names.push(n.to_string());
                names.len() - 1
            })
            .collect();
        if gens.is_empty() {
            return Err(bad());
        }
        factors.push(Factor { kind, generators: gens });
    }
    let alphabet = Alphabet::new(names.iter().map(String::as_str))?;
    Ok(Family::new(alphabet.len(), factors)?.structure(&alphabet, DIFFERENCE_BOUND))
}

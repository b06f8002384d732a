//! Automatic structures: a word acceptor and one multiplier per letter.

mod builtin;
mod bundle;

pub use builtin::{
    builtin_free_product, builtin_from_spec, builtin_shortlex_abelian, builtin_shortlex_free, Factor,
    FactorKind, Family, DIFFERENCE_BOUND,
};
pub use bundle::Manifest;

use serde::Serialize;

use crate::automata::{Fsa, PairFsa};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter, Word};

#[derive(Clone, Debug)]
pub struct AutomaticStructure {
    alphabet: Alphabet,
    word_acceptor: Fsa,
    /// Indexed by letter code.
    multipliers: Vec<PairFsa>,
    equality: PairFsa,
    unique_reps: bool,
    geodesic: bool,
    family: Option<Family>,
}

/// One failed check from [`AutomaticStructure::validate`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub word: String,
    pub letter: Option<String>,
    pub problem: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub depth: usize,
    pub words_checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl AutomaticStructure {
    pub fn new(
        alphabet: Alphabet,
        word_acceptor: Fsa,
        multipliers: Vec<PairFsa>,
        equality: PairFsa,
        unique_reps: bool,
        geodesic: bool,
    ) -> Result<Self> {
        let mismatch = |what: &str| Error::StructureInvalid(format!("{what} uses a different alphabet"));
        if word_acceptor.alphabet() != &alphabet {
            return Err(mismatch("word acceptor"));
        }
        if multipliers.len() != alphabet.num_letters() {
            return Err(Error::StructureInvalid(format!(
                "expected {} multipliers, found {}",
                alphabet.num_letters(),
                multipliers.len()
            )));
        }
        if multipliers.iter().chain([&equality]).any(|m| m.alphabet() != &alphabet) {
            return Err(mismatch("a multiplier"));
        }
        if !word_acceptor.accepts(&Word::empty()) {
            return Err(Error::StructureInvalid("the empty word must be a representative".into()));
        }
        Ok(AutomaticStructure { alphabet, word_acceptor, multipliers, equality, unique_reps, geodesic, family: None })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn word_acceptor(&self) -> &Fsa {
        &self.word_acceptor
    }

    pub fn multiplier(&self, x: Letter) -> &PairFsa {
        &self.multipliers[x.code()]
    }

    pub fn equality(&self) -> &PairFsa {
        &self.equality
    }

    pub fn unique_reps(&self) -> bool {
        self.unique_reps
    }

    pub fn geodesic(&self) -> bool {
        self.geodesic
    }

    /// The normal-form family when the structure is a builtin.
    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    /// Replaces one multiplier; the family tag is dropped since the
    /// structure is no longer known to be a builtin.
    pub fn with_multiplier(mut self, x: Letter, m: PairFsa) -> Result<Self> {
        if m.alphabet() != &self.alphabet {
            return Err(Error::StructureInvalid("multiplier uses a different alphabet".into()));
        }
        self.multipliers[x.code()] = m;
        self.family = None;
        Ok(self)
    }

    fn step(&self, x: Letter, u: &Word) -> Result<Word> {
        self.multiplier(x).apply(u).map_err(|e| {
            Error::StructureInvalid(format!(
                "multiplier {} on {}: {e}",
                self.alphabet.format_letter(x),
                self.alphabet.format_word(u)
            ))
        })
    }

    /// An L-word equal to `w`, by applying multipliers letter by letter
    /// starting from ε. Without unique representatives the ShortLex-least
    /// candidate is returned.
    pub fn representative(&self, w: &Word) -> Result<Word> {
        self.alphabet.check_word(w)?;
        if self.unique_reps {
            let mut cur = Word::empty();
            for &x in w {
                cur = self.step(x, &cur)?;
            }
            Ok(cur)
        } else {
            let mut cur = Fsa::epsilon(&self.alphabet);
            for &x in w {
                cur = self.multiplier(x).image(&cur)?;
            }
            cur.enumerate(1)
                .pop()
                .ok_or_else(|| Error::StructureInvalid(format!("no representative for {}", self.alphabet.format_word(w))))
        }
    }

    /// Whether `w` is trivial in the group.
    pub fn word_problem(&self, w: &Word) -> Result<bool> {
        let r = self.representative(w)?;
        if self.unique_reps {
            Ok(r.is_empty())
        } else {
            Ok(self.equality.accepts(&r, &Word::empty()))
        }
    }

    /// `{(u, v) ∈ L × L : u·h = v}` as a composite of letter multipliers.
    pub fn multiplier_for_word(&self, h: &Word) -> Result<PairFsa> {
        self.alphabet.check_word(h)?;
        let mut letters = h.iter();
        let Some(&first) = letters.next() else {
            return Ok(self.equality.clone());
        };
        let mut acc = self.multiplier(first).clone();
        for &x in letters {
            acc = acc.compose(self.multiplier(x))?;
        }
        Ok(acc)
    }

    /// Checks every L-word of length at most `depth` against every letter:
    /// `M_x(u)` must exist, lie in L, agree with an independent computation
    /// of the product, and be sent back to `u` by `M_{x⁻¹}`.
    pub fn validate(&self, depth: usize) -> ValidationReport {
        let al = &self.alphabet;
        let mut report = ValidationReport { depth, ..Default::default() };
        let words = self.word_acceptor.words_up_to(depth);
        report.words_checked = words.len();
        let mut flag = |u: &Word, x: Option<Letter>, problem: String| {
            report.violations.push(Violation {
                word: al.format_word(u),
                letter: x.map(|x| al.format_letter(x)),
                problem,
            });
        };
        for u in &words {
            if !u.is_reduced() {
                flag(u, None, "representative is not freely reduced".into());
            }
            if self.unique_reps {
                match self.equality.apply(u) {
                    Ok(v) if v == *u => {}
                    Ok(v) => flag(u, None, format!("equality multiplier gives {}", al.format_word(&v))),
                    Err(e) => flag(u, None, format!("equality multiplier: {e}")),
                }
            } else if !self.equality.accepts(u, u) {
                flag(u, None, "equality multiplier misses the diagonal".into());
            }
            for x in al.letters() {
                if !self.unique_reps {
                    let img = self.multiplier(x).image(&Fsa::from_words(al, std::slice::from_ref(u)));
                    match img {
                        Ok(img) if img.is_empty() => flag(u, Some(x), "no image".into()),
                        Ok(img) => {
                            if let Ok(Some(bad)) = img.subset_witness(&self.word_acceptor) {
                                flag(u, Some(x), format!("image {} not in L", al.format_word(&bad)));
                            }
                        }
                        Err(e) => flag(u, Some(x), e.to_string()),
                    }
                    continue;
                }
                let v = match self.multiplier(x).apply(u) {
                    Ok(v) => v,
                    Err(e) => {
                        flag(u, Some(x), e.to_string());
                        continue;
                    }
                };
                if !self.word_acceptor.accepts(&v) {
                    flag(u, Some(x), format!("image {} not in L", al.format_word(&v)));
                }
                let mut ux = u.clone();
                ux.push(x);
                let expected = match &self.family {
                    Some(f) => Ok(f.nf(&ux)),
                    None => self.representative(&ux),
                };
                match expected {
                    Ok(e) if e == v => {}
                    Ok(e) => flag(u, Some(x), format!("image {} but expected {}", al.format_word(&v), al.format_word(&e))),
                    Err(e) => flag(u, Some(x), e.to_string()),
                }
                match self.multiplier(x.inverse()).apply(&v) {
                    Ok(back) if back == *u => {}
                    Ok(back) => flag(u, Some(x), format!("inverse multiplier returns {}", al.format_word(&back))),
                    Err(e) => flag(u, Some(x), format!("inverse multiplier: {e}")),
                }
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::AutomatonJson;
    use crate::automata::Label;
    use crate::words::{free_reduce, ReducedWords};

    fn al(names: &[&str]) -> Alphabet {
        Alphabet::new(names.iter().copied()).unwrap()
    }

    fn abelian_oracle(n: usize, w: &Word) -> Vec<i64> {
        crate::lattice::word_to_vector(n, w).unwrap()
    }

    #[test]
    fn abelian_representatives() {
        let a = al(&["a", "b"]);
        let s = builtin_shortlex_abelian(&a);
        let w = |t: &str| a.parse_word(t).unwrap();
        assert_eq!(s.representative(&w("b*a")).unwrap(), w("a*b"));
        assert_eq!(s.representative(&Word::empty()).unwrap(), Word::empty());
        assert!(s.word_problem(&w("a*b*a^-1*b^-1")).unwrap());
        assert!(!s.word_problem(&w("a*b*a^-1")).unwrap());
        assert!(s.word_acceptor().accepts(&w("a^-1*b")));
        assert!(!s.word_acceptor().accepts(&w("b*a")));
        // The acceptor is exactly the sorted words, checked to length 3.
        for u in ReducedWords::new(2).take_while(|u| u.len() <= 3) {
            let sorted = u.letters().windows(2).all(|p| p[0] == p[1] || p[0].generator() < p[1].generator());
            assert_eq!(s.word_acceptor().accepts(&u), sorted, "{u:?}");
        }
    }

    #[test]
    fn free_representatives() {
        let a = al(&["a", "b"]);
        let s = builtin_shortlex_free(&a);
        let w = |t: &str| a.parse_word(t).unwrap();
        assert_eq!(s.representative(&w("a").concat(&w("a^-1")).concat(&w("b"))).unwrap(), w("b"));
        assert_eq!(s.multiplier(a.parse_letter("b").unwrap()).apply(&w("a*b^-1")).unwrap(), w("a"));
        for u in ReducedWords::new(2).skip(1).take(40) {
            assert!(!s.word_problem(&u).unwrap());
        }
        let single = builtin_shortlex_free(&al(&["a"]));
        let words = single.word_acceptor().words_up_to(3);
        assert_eq!(words.len(), 7);
    }

    #[test]
    fn free_product_language() {
        let z2 = builtin_shortlex_abelian(&al(&["a", "b"]));
        let z = builtin_shortlex_free(&al(&["t"]));
        let g = builtin_free_product(&z2, &z).unwrap();
        let w = |t: &str| g.alphabet().parse_word(t).unwrap();
        let l = g.word_acceptor();
        assert!(l.accepts(&w("a*t*a")));
        assert!(l.accepts(&w("a*b")));
        assert!(!l.accepts(&w("b*a")));
        assert!(!l.accepts(&w("a*t*t^-1*a")));
        assert_eq!(g.representative(&w("t*b*a*t^-1*t")).unwrap(), w("t*a*b"));
        assert!(builtin_free_product(&z2, &z2).is_err());
        let spec = builtin_from_spec("builtin:abelian(a,b)*free(t)").unwrap();
        assert_eq!(spec.alphabet(), g.alphabet());
        assert!(spec.word_acceptor().language_eq(g.word_acceptor()).unwrap());
    }

    #[test]
    fn word_multipliers() {
        let a = al(&["a", "b"]);
        let free = builtin_shortlex_free(&a);
        let w = |t: &str| a.parse_word(t).unwrap();
        let m = free.multiplier_for_word(&w("a*b")).unwrap();
        assert!(m.accepts(&Word::empty(), &w("a*b")));
        for (u, v) in m.pairs_up_to(3) {
            assert_eq!(free_reduce(&u.concat(&w("a*b"))), v);
        }
        let eps = free.multiplier_for_word(&Word::empty()).unwrap();
        assert_eq!(eps.pairs_up_to(2), free.equality().pairs_up_to(2));

        let ab = builtin_shortlex_abelian(&a);
        let ma = ab.multiplier_for_word(&w("a")).unwrap();
        assert!(ma.accepts(&w("b"), &w("a*b")));
        for (u, v) in ab.multiplier_for_word(&w("a*b^-1*b^-1")).unwrap().pairs_up_to(4) {
            let mut expected = abelian_oracle(2, &u);
            expected[0] += 1;
            expected[1] -= 2;
            assert_eq!(abelian_oracle(2, &v), expected);
        }
        // Restricting the first coordinate to ε yields the representative.
        let h = w("b*a*b^-1*a");
        let mh = ab.multiplier_for_word(&h).unwrap();
        let eps_only = mh.restrict(&Fsa::epsilon(&a), &Fsa::all_words(&a)).unwrap();
        assert_eq!(eps_only.pairs_up_to(6), vec![(Word::empty(), ab.representative(&h).unwrap())]);
    }

    #[test]
    fn compose_with_inverse_is_identity() {
        let a = al(&["a", "b"]);
        let free = builtin_shortlex_free(&a);
        let x = a.parse_letter("a").unwrap();
        let both = free.multiplier(x).compose(free.multiplier(x.inverse())).unwrap();
        let pairs = both.pairs_up_to(4);
        let diagonal: Vec<_> = free.word_acceptor().words_up_to(4).into_iter().map(|u| (u.clone(), u)).collect();
        assert_eq!(pairs, diagonal);
    }

    #[test]
    fn compose_is_associative() {
        let a = al(&["a", "b"]);
        let s = builtin_shortlex_abelian(&a);
        let [x, y, z] = ["a", "b^-1", "a"].map(|t| s.multiplier(a.parse_letter(t).unwrap()).clone());
        let left = x.compose(&y).unwrap().compose(&z).unwrap();
        let right = x.compose(&y.compose(&z).unwrap()).unwrap();
        assert_eq!(left.pairs_up_to(5), right.pairs_up_to(5));
        assert!(!left.pairs_up_to(5).is_empty());
    }

    #[test]
    fn builtins_validate() {
        let z2 = builtin_shortlex_abelian(&al(&["a", "b"]));
        let z = builtin_shortlex_free(&al(&["t"]));
        for s in [
            builtin_shortlex_free(&al(&["a", "b"])),
            z2.clone(),
            builtin_shortlex_abelian(&al(&["a", "b", "c"])),
            builtin_free_product(&z2, &z).unwrap(),
        ] {
            let report = s.validate(4);
            assert!(report.is_ok(), "{:?}", report.violations);
        }
        let shallow = builtin_shortlex_free(&al(&["a"])).validate(0);
        assert_eq!(shallow.words_checked, 1);
    }

    #[test]
    fn corrupted_multiplier_is_reported() {
        let a = al(&["a", "b"]);
        let s = builtin_shortlex_free(&a);
        let x = a.parse_letter("a").unwrap();
        let mut json: AutomatonJson = s.multiplier(x).to_json();
        let pos = json
            .transitions
            .iter()
            .position(|(p, l, _)| *p == json.initial && *l == Label::Pair("_".into(), "a".into()))
            .unwrap();
        let states = json.states;
        let t = &mut json.transitions[pos].2;
        *t = (*t + 1) % states;
        let bad = PairFsa::from_json(&json, Some(&a)).unwrap();
        let report = s.with_multiplier(x, bad).unwrap().validate(2);
        assert!(!report.is_ok());
    }

    #[test]
    fn idempotent_and_homomorphic() {
        let z2 = builtin_shortlex_abelian(&al(&["a", "b"]));
        let z = builtin_shortlex_free(&al(&["t"]));
        let g = builtin_free_product(&z2, &z).unwrap();
        let fam = g.family().unwrap().clone();
        for w in ReducedWords::new(3).take_while(|w| w.len() <= 3) {
            let r = g.representative(&w).unwrap();
            assert_eq!(g.representative(&r).unwrap(), r);
            assert_eq!(r, fam.nf(&w));
            assert!(g.word_problem(&w.concat(&r.inverse())).unwrap());
        }
    }
}

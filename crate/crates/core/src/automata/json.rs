//! JSON form of letter and pair automata.

use serde::{Deserialize, Serialize};

use super::{pair_symbol, split_pair_symbol, Automaton, Fsa, PairFsa};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter};

pub const PAD: &str = "_";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Letter(String),
    Pair(String, String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonJson {
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<(usize, Label, usize)>,
}

fn resolve_alphabet(names: &[String], expected: Option<&Alphabet>) -> Result<Alphabet> {
    let alphabet = Alphabet::new(names.iter().map(String::as_str))?;
    if let Some(e) = expected {
        if e != &alphabet {
            return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", e.names(), alphabet.names())));
        }
    }
    Ok(alphabet)
}

fn skeleton(json: &AutomatonJson, num_symbols: usize) -> Result<Automaton> {
    if json.states == 0 || json.initial >= json.states {
        return Err(Error::Malformed(format!("initial state {} of {}", json.initial, json.states)));
    }
    let mut a = Automaton::new(num_symbols, json.states, json.initial);
    for &q in &json.accepting {
        if q >= json.states {
            return Err(Error::Malformed(format!("accepting state {q} out of range")));
        }
        a.set_accepting(q, true);
    }
    Ok(a)
}

fn header(a: &Automaton, alphabet: &Alphabet) -> AutomatonJson {
    AutomatonJson {
        alphabet: alphabet.names().to_vec(),
        states: a.num_states(),
        initial: a.initial(),
        accepting: (0..a.num_states()).filter(|&q| a.is_accepting(q)).collect(),
        transitions: Vec::new(),
    }
}

fn check_edge(json: &AutomatonJson, p: usize, q: usize) -> Result<()> {
    if p >= json.states || q >= json.states {
        return Err(Error::Malformed(format!("transition {p} -> {q} out of range")));
    }
    Ok(())
}

impl Fsa {
    pub fn to_json(&self) -> AutomatonJson {
        let mut j = header(&self.auto, &self.alphabet);
        for p in 0..self.auto.num_states() {
            for (s, q) in self.auto.transitions(p) {
                let s = s.expect("letter automata carry no ε-transitions after construction");
                j.transitions
                    .push((p, Label::Letter(self.alphabet.format_letter(Letter::from_code(s))), q));
            }
        }
        j
    }

    pub fn from_json(json: &AutomatonJson, expected: Option<&Alphabet>) -> Result<Fsa> {
        let alphabet = resolve_alphabet(&json.alphabet, expected)?;
        let mut a = skeleton(json, alphabet.num_letters())?;
        for (p, label, q) in &json.transitions {
            check_edge(json, *p, *q)?;
            let Label::Letter(name) = label else {
                return Err(Error::Malformed("pair label in a letter automaton".into()));
            };
            let l = alphabet.parse_letter(name)?;
            a.add_transition(*p, Some(l.code()), *q);
        }
        Fsa::new(alphabet, a)
    }
}

impl PairFsa {
    pub fn to_json(&self) -> AutomatonJson {
        let m = self.alphabet.num_letters();
        let name = |l: Option<Letter>| l.map_or(PAD.to_string(), |l| self.alphabet.format_letter(l));
        let mut j = header(&self.auto, &self.alphabet);
        for p in 0..self.auto.num_states() {
            for (s, q) in self.auto.transitions(p) {
                let (x, y) = split_pair_symbol(m, s.expect("pair automata are deterministic"));
                j.transitions.push((p, Label::Pair(name(x), name(y)), q));
            }
        }
        j
    }

    pub fn from_json(json: &AutomatonJson, expected: Option<&Alphabet>) -> Result<PairFsa> {
        let alphabet = resolve_alphabet(&json.alphabet, expected)?;
        let m = alphabet.num_letters();
        let mut a = skeleton(json, (m + 1) * (m + 1))?;
        let letter = |s: &str| -> Result<Option<Letter>> {
            if s == PAD {
                Ok(None)
            } else {
                alphabet.parse_letter(s).map(Some)
            }
        };
        for (p, label, q) in &json.transitions {
            check_edge(json, *p, *q)?;
            let Label::Pair(x, y) = label else {
                return Err(Error::Malformed("letter label in a pair automaton".into()));
            };
            let (x, y) = (letter(x)?, letter(y)?);
            if x.is_none() && y.is_none() {
                return Err(Error::Malformed("pair with both coordinates padded".into()));
            }
            a.add_transition(*p, Some(pair_symbol(m, x, y)), *q);
        }
        PairFsa::new(alphabet, a)
    }
}

//! Positive semi-algorithm: glue relator loops everywhere and fold.

use serde::Serialize;

use crate::error::Result;
use crate::stallings::{stallings_graph, StallingsGraph};
use crate::words::{free_reduce, relator_closure, Presentation, Word};

#[derive(Clone, Debug)]
pub struct CompletionState {
    graph: StallingsGraph,
    round: usize,
    presentation: Presentation,
    target: Word,
    glue_closure: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum CompletionOutcome {
    Member { rounds: usize },
    BudgetExhausted { rounds: usize },
}

impl CompletionState {
    /// Starts from the Stallings graph of `⟨generators⟩` in the free group.
    pub fn new(presentation: Presentation, generators: &[Word], target: Word) -> Result<Self> {
        let graph = stallings_graph(presentation.alphabet(), generators)?;
        presentation.alphabet().check_word(&target)?;
        Ok(Self::from_graph(presentation, graph, target, 0))
    }

    /// Resumes from a saved graph (folded, rooted at its base).
    pub fn from_graph(presentation: Presentation, graph: StallingsGraph, target: Word, round: usize) -> Self {
        let graph = if graph.is_folded() { graph } else { graph.fold() };
        CompletionState { graph, round, presentation, target: free_reduce(&target), glue_closure: false }
    }

    /// Glue every cyclic permutation of every relator and its inverse
    /// instead of the relators as given.
    pub fn with_glue_closure(mut self, on: bool) -> Self {
        self.glue_closure = on;
        self
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }

    pub fn round(&self) -> usize {
        self.round
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn target(&self) -> &Word {
        &self.target
    }

    fn glue_words(&self) -> Vec<Word> {
        if self.glue_closure {
            relator_closure(&self.presentation).relators().to_vec()
        } else {
            self.presentation.relators().to_vec()
        }
    }

    /// One round: a loop for each relator at each vertex of the current
    /// graph, then a single fold.
    pub fn step(&mut self) {
        let relators = self.glue_words();
        if !relators.is_empty() {
            let loops: Vec<(usize, Word)> = (0..self.graph.num_vertices())
                .flat_map(|v| relators.iter().map(move |r| (v, r.clone())))
                .collect();
            self.graph = self.graph.glue_loops(&loops).fold();
        }
        self.round += 1;
    }

    /// The same round, folding after every glued loop.
    pub fn step_per_loop(&mut self) {
        let relators = self.glue_words();
        let paths = self.graph.vertex_paths();
        let mut g = self.graph.clone();
        for p in &paths {
            for r in &relators {
                let v = g.read(g.base(), p).expect("folding keeps paths readable");
                g = g.glue_loops(&[(v, r.clone())]).fold();
            }
        }
        self.graph = g;
        self.round += 1;
    }

    /// Whether the target labels a loop at the base vertex.
    pub fn check_target(&self) -> bool {
        self.graph.reads_loop(&self.target)
    }
}

/// Functional form of [`CompletionState::step`].
pub fn completion_step(s: &CompletionState) -> CompletionState {
    let mut next = s.clone();
    next.step();
    next
}

/// Runs at most `budget` rounds, calling `on_round` with the initial state
/// and after every round.
pub fn run_completion_traced(
    mut state: CompletionState,
    budget: usize,
    mut on_round: impl FnMut(&CompletionState),
) -> CompletionOutcome {
    on_round(&state);
    loop {
        if state.check_target() {
            return CompletionOutcome::Member { rounds: state.round };
        }
        if state.round >= budget {
            return CompletionOutcome::BudgetExhausted { rounds: state.round };
        }
        state.step();
        on_round(&state);
    }
}

pub fn run_completion(
    presentation: &Presentation,
    generators: &[Word],
    target: &Word,
    budget: usize,
) -> Result<CompletionOutcome> {
    let state = CompletionState::new(presentation.clone(), generators, target.clone())?;
    Ok(run_completion_traced(state, budget, |_| {}))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::PermutationGroup;
    use crate::words::{Alphabet, ReducedWords};

    fn pres(names: &[&str], rels: &[&str]) -> Presentation {
        Presentation::parse(Alphabet::new(names.iter().copied()).unwrap(), rels).unwrap()
    }

    fn w(p: &Presentation, s: &str) -> Word {
        p.alphabet().parse_word(s).unwrap()
    }

    #[test]
    fn step_examples() {
        let z3 = pres(&["a"], &["a*a*a"]);
        let mut s = CompletionState::new(z3.clone(), &[], Word::empty()).unwrap();
        s.step();
        assert_eq!(s.graph().num_vertices(), 3);
        assert!(s.graph().reads_loop(&w(&z3, "a*a*a")));
        assert!(!s.graph().reads_loop(&w(&z3, "a")));

        let z2 = pres(&["a", "b"], &["a*b*a^-1*b^-1"]);
        let s = CompletionState::new(z2.clone(), &[w(&z2, "a")], Word::empty()).unwrap();
        let s1 = completion_step(&s);
        assert!(s1.graph().reads_loop(&w(&z2, "a")));
        assert_eq!(s1.round(), 1);

        let free = pres(&["a", "b"], &[]);
        let s = CompletionState::new(free.clone(), &[w(&free, "a*b")], Word::empty()).unwrap();
        assert_eq!(completion_step(&s).graph(), s.graph());
    }

    #[test]
    fn run_examples() {
        let z2 = pres(&["a", "b"], &["a*b*a^-1*b^-1"]);
        let h = [w(&z2, "a")];
        assert!(matches!(
            run_completion(&z2, &h, &w(&z2, "b*a*b^-1"), 10).unwrap(),
            CompletionOutcome::Member { .. }
        ));
        assert_eq!(
            run_completion(&z2, &h, &w(&z2, "b"), 10).unwrap(),
            CompletionOutcome::BudgetExhausted { rounds: 10 }
        );
        assert_eq!(run_completion(&z2, &h, &w(&z2, "a"), 0).unwrap(), CompletionOutcome::Member { rounds: 0 });
        assert_eq!(
            run_completion(&z2, &h, &Word::empty(), 0).unwrap(),
            CompletionOutcome::Member { rounds: 0 }
        );
        let z3 = pres(&["a"], &["a*a*a"]);
        let mut s = CompletionState::new(z3.clone(), &[], w(&z3, "a")).unwrap();
        for _ in 0..5 {
            s.step();
            assert!(!s.check_target());
        }
    }

    #[test]
    fn per_loop_folding_agrees() {
        let p = pres(&["a", "b"], &["a*a", "b*b*b", "a*b*a*b"]);
        let mut s = CompletionState::new(p.clone(), &[w(&p, "a*b*a")], Word::empty()).unwrap();
        let mut t = s.clone();
        for _ in 0..3 {
            s.step();
            t.step_per_loop();
            assert_eq!(s.graph(), t.graph());
        }
    }

    /// S3 with a = (0 1), b = (0 1 2).
    fn s3() -> (Presentation, PermutationGroup) {
        let p = pres(&["a", "b"], &["a*a", "b*b*b", "a*b*a*b"]);
        let g = PermutationGroup::new(p.alphabet().clone(), vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap();
        (p, g)
    }

    #[test]
    fn sound_and_monotone_on_s3() {
        let (p, g) = s3();
        assert!(g.satisfies(p.relators()));
        assert_eq!(g.order(), 6);
        for h in [vec![w(&p, "a")], vec![w(&p, "b*a")], vec![]] {
            let mut s = CompletionState::new(p.clone(), &h, Word::empty()).unwrap();
            let words: Vec<Word> = ReducedWords::new(2).take_while(|u| u.len() <= 6).collect();
            let mut prev: Vec<bool> = words.iter().map(|u| s.graph().reads_loop(u)).collect();
            for _ in 0..4 {
                s.step();
                let now: Vec<bool> = words.iter().map(|u| s.graph().reads_loop(u)).collect();
                for (i, u) in words.iter().enumerate() {
                    assert!(!prev[i] || now[i], "loop lost: {u:?}");
                    if now[i] {
                        assert!(g.is_member(&h, u), "unsound: {u:?}");
                    }
                }
                prev = now;
            }
            // Stabilized: answers agree exactly with the oracle.
            let before = s.graph().clone();
            s.step();
            assert_eq!(&before, s.graph());
            for u in &words {
                assert_eq!(s.graph().reads_loop(u), g.is_member(&h, u), "{u:?}");
            }
        }
    }
}

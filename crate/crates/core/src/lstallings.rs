//! Stallings graphs relative to the language of an automatic structure:
//! a grow/certify loop that halts on L-quasi-convex subgroups.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::Serialize;

use crate::automata::{Dfa, Fsa, PairFsa};
use crate::autostruct::AutomaticStructure;
use crate::error::{Error, Result};
use crate::stallings::{Edge, StallingsGraph};
use crate::words::Word;

/// A folded, trimmed graph over the structure's alphabet whose base loops
/// all map into the subgroup.
#[derive(Clone, Debug)]
pub struct LStallingsGraph {
    graph: StallingsGraph,
    structure: Arc<AutomaticStructure>,
    certified: bool,
    quasiconvexity_witness: Option<usize>,
}

impl LStallingsGraph {
    /// An uncertified fragment; membership queries on it are refused.
    pub fn uncertified(structure: Arc<AutomaticStructure>, graph: StallingsGraph) -> Self {
        LStallingsGraph { graph, structure, certified: false, quasiconvexity_witness: None }
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }

    pub fn structure(&self) -> &Arc<AutomaticStructure> {
        &self.structure
    }

    pub fn certified(&self) -> bool {
        self.certified
    }

    /// Largest distance from the base to a vertex; a diagnostic only.
    pub fn quasiconvexity_witness(&self) -> Option<usize> {
        self.quasiconvexity_witness
    }

    pub fn loop_language(&self) -> Fsa {
        loop_language(&self.structure, &self.graph)
    }

    /// Re-checks a saved graph: certified iff its loop language contains ε
    /// and is closed under the generators and their inverses.
    pub fn verify(structure: Arc<AutomaticStructure>, graph: StallingsGraph, generators: &[Word]) -> Result<Option<Self>> {
        match closure_certificate(&structure, &graph, generators)? {
            Certificate::Certified => {
                let depth = max_distance(&graph);
                Ok(Some(LStallingsGraph { graph, structure, certified: true, quasiconvexity_witness: Some(depth) }))
            }
            Certificate::Counterexample { .. } => Ok(None),
        }
    }

    /// Whether `w` lies in the subgroup: its representative must read a
    /// base loop. Requires a certified graph.
    pub fn membership(&self, w: &Word) -> Result<bool> {
        membership_l(self, w)
    }
}

/// Outcome of the closure test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Certified,
    /// `witness` reads a base loop, `image` is the representative of
    /// `witness · generator` and does not.
    Counterexample { witness: Word, generator: Word, image: Word },
}

#[derive(Clone, Debug)]
pub enum LStallingsOutcome {
    Certified(LStallingsGraph),
    BudgetExhausted { iterations: usize, graph: StallingsGraph },
}

/// The graph read as a DFA over letter codes, base initial and accepting.
fn graph_dfa(graph: &StallingsGraph) -> Dfa {
    let al = graph.alphabet();
    let mut d = Dfa::with_states(al.num_letters(), graph.num_vertices());
    d.set_initial(graph.base());
    d.set_accepting(graph.base(), true);
    for v in 0..graph.num_vertices() {
        for l in al.letters() {
            if let Some(t) = graph.target(v, l) {
                d.set_transition(v, l.code(), t);
            }
        }
    }
    d
}

fn check_graph(structure: &AutomaticStructure, graph: &StallingsGraph) -> Result<()> {
    if graph.alphabet() != structure.alphabet() {
        return Err(Error::AlphabetMismatch("graph and structure use different alphabets".into()));
    }
    if !graph.is_folded() {
        return Err(Error::Malformed("graph is not folded".into()));
    }
    Ok(())
}

/// L-words labelling base loops.
pub fn loop_language(structure: &AutomaticStructure, graph: &StallingsGraph) -> Fsa {
    let d = graph_dfa(graph).product(&structure.word_acceptor().dfa(), |a, b| a && b).minimize();
    Fsa::from_dfa(structure.alphabet(), &d)
}

fn require_unique(structure: &AutomaticStructure) -> Result<()> {
    if !structure.unique_reps() {
        return Err(Error::UnsupportedStructure("relative Stallings graphs need unique representatives".into()));
    }
    Ok(())
}

/// Multipliers for each generator and its inverse, in the order checked.
fn generator_multipliers(structure: &AutomaticStructure, generators: &[Word]) -> Result<Vec<(Word, PairFsa)>> {
    let mut out = Vec::new();
    for h in generators {
        for g in [h.clone(), h.inverse()] {
            let m = structure.multiplier_for_word(&g)?;
            out.push((g, m));
        }
    }
    Ok(out)
}

fn certify(language: &Fsa, multipliers: &[(Word, PairFsa)]) -> Result<Certificate> {
    if !language.accepts(&Word::empty()) {
        return Ok(Certificate::Counterexample {
            witness: Word::empty(),
            generator: Word::empty(),
            image: Word::empty(),
        });
    }
    for (g, m) in multipliers {
        if let Some((u, v)) = m.image_escape(language, language)? {
            return Ok(Certificate::Counterexample { witness: u, generator: g.clone(), image: v });
        }
    }
    Ok(Certificate::Certified)
}

/// Checks that the loop language contains ε and is closed under right
/// multiplication by every generator and its inverse.
pub fn closure_certificate(
    structure: &AutomaticStructure,
    graph: &StallingsGraph,
    generators: &[Word],
) -> Result<Certificate> {
    require_unique(structure)?;
    check_graph(structure, graph)?;
    let multipliers = generator_multipliers(structure, generators)?;
    certify(&loop_language(structure, graph), &multipliers)
}

/// Adds a base loop labelled by the representative of `witness·generator`,
/// then folds and trims.
pub fn grow(
    structure: &AutomaticStructure,
    graph: &StallingsGraph,
    witness: &Word,
    generator: &Word,
) -> Result<StallingsGraph> {
    let image = structure.representative(&witness.concat(generator))?;
    Ok(add_loop(graph, &image))
}

fn add_loop(graph: &StallingsGraph, w: &Word) -> StallingsGraph {
    graph.glue_loops(&[(graph.base(), w.clone())]).fold().trim()
}

/// Resumable grow/certify computation; one [`step`](Self::step) is one
/// certificate check plus, on failure, one growth.
#[derive(Clone, Debug)]
pub struct LStallingsRun {
    structure: Arc<AutomaticStructure>,
    multipliers: Vec<(Word, PairFsa)>,
    graph: StallingsGraph,
    iterations: usize,
    result: Option<LStallingsGraph>,
}

impl LStallingsRun {
    /// Seeds the graph with loops for the generators' representatives.
    pub fn new(structure: Arc<AutomaticStructure>, generators: &[Word]) -> Result<Self> {
        require_unique(&structure)?;
        let mut graph = StallingsGraph::trivial(structure.alphabet().clone());
        let mut loops = Vec::new();
        for h in generators {
            loops.push((graph.base(), structure.representative(h)?));
        }
        graph = graph.glue_loops(&loops).fold().trim();
        let multipliers = generator_multipliers(&structure, generators)?;
        Ok(LStallingsRun { structure, multipliers, graph, iterations: 0, result: None })
    }

    pub fn graph(&self) -> &StallingsGraph {
        &self.graph
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn result(&self) -> Option<&LStallingsGraph> {
        self.result.as_ref()
    }

    pub fn step(&mut self) -> Result<Option<&LStallingsGraph>> {
        if self.result.is_some() {
            return Ok(self.result.as_ref());
        }
        self.iterations += 1;
        let language = loop_language(&self.structure, &self.graph);
        match certify(&language, &self.multipliers)? {
            Certificate::Certified => {
                let graph = canonicalize(&self.structure, &self.graph, &language)?;
                let depth = max_distance(&graph);
                self.result = Some(LStallingsGraph {
                    graph,
                    structure: self.structure.clone(),
                    certified: true,
                    quasiconvexity_witness: Some(depth),
                });
            }
            Certificate::Counterexample { image, .. } => {
                self.graph = add_loop(&self.graph, &image);
            }
        }
        Ok(self.result.as_ref())
    }

    /// Runs until certified or `budget` total iterations are spent.
    pub fn run(&mut self, budget: usize) -> Result<LStallingsOutcome> {
        while self.result.is_none() && self.iterations < budget {
            self.step()?;
        }
        Ok(match &self.result {
            Some(g) => LStallingsOutcome::Certified(g.clone()),
            None => LStallingsOutcome::BudgetExhausted { iterations: self.iterations, graph: self.graph.clone() },
        })
    }
}

pub fn compute_l_stallings(
    structure: Arc<AutomaticStructure>,
    generators: &[Word],
    budget: usize,
) -> Result<LStallingsOutcome> {
    LStallingsRun::new(structure, generators)?.run(budget)
}

pub fn membership_l(g: &LStallingsGraph, w: &Word) -> Result<bool> {
    if !g.certified {
        return Err(Error::Uncertified);
    }
    let r = g.structure.representative(w)?;
    Ok(g.graph.reads_loop(&r))
}

/// Turns a certified fragment into the subgraph of the Schreier graph
/// spanned by base loops with L labels: vertices in the same coset are
/// identified, then edges on no such loop are dropped.
fn canonicalize(structure: &AutomaticStructure, graph: &StallingsGraph, language: &Fsa) -> Result<StallingsGraph> {
    let paths = graph.vertex_paths();
    let n = graph.num_vertices();
    let dfa = language.dfa();
    let mut rep_of: Vec<usize> = (0..n).collect();
    let mut loops = Vec::new();
    for y in 0..n {
        for x in 0..y {
            if rep_of[x] != x {
                continue;
            }
            let w = paths[x].concat(&paths[y].inverse());
            let r = structure.representative(&w)?;
            if dfa.accepts(r.iter().map(|l| l.code())) {
                rep_of[y] = x;
                loops.push((graph.base(), w));
                break;
            }
        }
    }
    let merged = if loops.is_empty() { graph.clone() } else { graph.glue_loops(&loops).fold() };
    Ok(l_trim(structure, &merged))
}

/// Keeps the edges lying on some base loop whose label is in L.
fn l_trim(structure: &AutomaticStructure, graph: &StallingsGraph) -> StallingsGraph {
    let l = structure.word_acceptor().dfa();
    let g = graph_dfa(graph);
    let p = g.product(&l, |a, b| a && b);
    // Recover the (vertex, L-state) pairs: the product numbers states in
    // discovery order, so replay the same search.
    let k = l.num_symbols();
    let (gc, lc) = (g.complete(), l.complete());
    let mut pairs = vec![(gc.initial(), lc.initial())];
    let mut index = std::collections::HashMap::from([(pairs[0], 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (a, b) = pairs[i];
        for s in 0..k {
            let next = (gc.next(a, s).unwrap(), lc.next(b, s).unwrap());
            if !index.contains_key(&next) {
                index.insert(next, pairs.len());
                pairs.push(next);
                queue.push_back(pairs.len() - 1);
            }
        }
    }
    let useful = p.useful();
    let mut keep: Vec<Edge> = Vec::new();
    for (i, &(v, _)) in pairs.iter().enumerate() {
        if !useful[i] || v >= graph.num_vertices() {
            continue;
        }
        for letter in graph.alphabet().letters() {
            let Some(t) = p.next(i, letter.code()) else { continue };
            if !useful[t] {
                continue;
            }
            let w = pairs[t].0;
            let e = if letter.is_inverse() {
                Edge { source: w, generator: letter.generator(), target: v }
            } else {
                Edge { source: v, generator: letter.generator(), target: w }
            };
            keep.push(e);
        }
    }
    keep.sort();
    keep.dedup();
    StallingsGraph::new(graph.alphabet().clone(), graph.num_vertices(), graph.base(), keep)
        .expect("subgraph of a valid graph")
        .canonical()
}

fn max_distance(graph: &StallingsGraph) -> usize {
    graph.vertex_paths().iter().map(Word::len).max().unwrap_or(0)
}

/// Summary of a certified graph for reports.
#[derive(Clone, Debug, Serialize)]
pub struct LStallingsSummary {
    pub vertices: usize,
    pub edges: usize,
    pub quasiconvexity_witness: Option<usize>,
}

impl From<&LStallingsGraph> for LStallingsSummary {
    fn from(g: &LStallingsGraph) -> Self {
        LStallingsSummary {
            vertices: g.graph.num_vertices(),
            edges: g.graph.num_edges(),
            quasiconvexity_witness: g.quasiconvexity_witness,
        }
    }
}

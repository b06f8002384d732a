//! Stallings graphs of finitely generated subgroups of free groups.
//!
//! A graph stores positive edges only; an edge `(s, x, t)` is read forwards
//! with `x` and backwards with `x⁻¹`. Folding merges vertices with a
//! union-find and a pending-merge worklist, so a fold costs
//! `O((V + E) · |A| · α)`.
//!
//! Every folded graph produced here is renumbered canonically (breadth-first
//! from the base vertex, letters in ShortLex order), which makes rooted
//! isomorphism of folded graphs plain equality.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{free_reduce, Alphabet, Letter, Word};

const NONE: usize = usize::MAX;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub generator: usize,
    pub target: usize,
}

/// Dense successor tables, present when the graph is deterministic and
/// co-deterministic.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Adjacency {
    out: Vec<usize>,
    inc: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct StallingsGraph {
    alphabet: Alphabet,
    num_vertices: usize,
    base: usize,
    edges: Vec<Edge>,
    adj: Option<Adjacency>,
}

impl PartialEq for StallingsGraph {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.num_vertices == other.num_vertices
            && self.base == other.base
            && self.edges == other.edges
    }
}

impl Eq for StallingsGraph {}

/// Index of a subgroup of a free group.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Index {
    Finite(usize),
    Infinite,
}

impl std::fmt::Display for Index {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Index::Finite(n) => write!(f, "{n}"),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

impl StallingsGraph {
    pub fn new(alphabet: Alphabet, num_vertices: usize, base: usize, edges: Vec<Edge>) -> Result<Self> {
        if base >= num_vertices.max(1) {
            return Err(Error::Malformed(format!("base vertex {base} out of range")));
        }
        let num_vertices = num_vertices.max(1);
        for e in &edges {
            if e.source >= num_vertices || e.target >= num_vertices || e.generator >= alphabet.len() {
                return Err(Error::Malformed(format!("edge {e:?} out of range")));
            }
        }
        Ok(Self::from_parts(alphabet, num_vertices, base, edges))
    }

    fn from_parts(alphabet: Alphabet, num_vertices: usize, base: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort();
        edges.dedup();
        let k = alphabet.len();
        let mut out = vec![NONE; num_vertices * k];
        let mut inc = vec![NONE; num_vertices * k];
        let mut deterministic = true;
        for e in &edges {
            let o = &mut out[e.source * k + e.generator];
            let i = &mut inc[e.target * k + e.generator];
            if *o != NONE || *i != NONE {
                deterministic = false;
                break;
            }
            *o = e.target;
            *i = e.source;
        }
        let adj = deterministic.then_some(Adjacency { out, inc });
        StallingsGraph { alphabet, num_vertices, base, edges, adj }
    }

    /// The graph with a single base vertex and no edges (trivial subgroup).
    pub fn trivial(alphabet: Alphabet) -> Self {
        Self::from_parts(alphabet, 1, 0, Vec::new())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Deterministic and co-deterministic.
    pub fn is_folded(&self) -> bool {
        self.adj.is_some()
    }

    /// Successor of `v` along `letter`, for folded graphs.
    pub fn target(&self, v: usize, letter: Letter) -> Option<usize> {
        let adj = self.adj.as_ref()?;
        let k = self.alphabet.len();
        let t = if letter.is_inverse() {
            adj.inc[v * k + letter.generator()]
        } else {
            adj.out[v * k + letter.generator()]
        };
        (t != NONE).then_some(t)
    }

    /// Follows `w` from `start`; `None` if some letter cannot be read.
    pub fn read(&self, start: usize, w: &Word) -> Option<usize> {
        w.iter().try_fold(start, |v, &l| self.target(v, l))
    }

    /// Whether `w` labels a closed path at the base vertex.
    pub fn reads_loop(&self, w: &Word) -> bool {
        self.read(self.base, w) == Some(self.base)
    }

    /// Degree of each vertex, counting both endpoints of every edge.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for e in &self.edges {
            deg[e.source] += 1;
            deg[e.target] += 1;
        }
        deg
    }

    /// A graph with the same vertices and edges plus, for each `(v, w)`, a
    /// fresh closed path at `v` labelled by `w`. The result is not folded.
    pub fn glue_loops(&self, loops: &[(usize, Word)]) -> StallingsGraph {
        let mut n = self.num_vertices;
        let mut edges = self.edges.clone();
        for (v, w) in loops {
            add_path(&mut edges, &mut n, *v, *v, w);
        }
        Self::from_parts(self.alphabet.clone(), n, self.base, edges)
    }

    /// Folds with edges processed in their stored order.
    pub fn fold(&self) -> StallingsGraph {
        let order: Vec<usize> = (0..self.edges.len()).collect();
        self.fold_in_order(&order)
    }

    /// Folds processing edges in the given order; `order` must be a
    /// permutation of edge indices. All orders yield the same graph.
    pub fn fold_in_order(&self, order: &[usize]) -> StallingsGraph {
        let k = self.alphabet.len();
        let mut f = Folder::new(self.num_vertices, k);
        for &i in order {
            let e = self.edges[i];
            f.add_edge(e.source, e.generator, e.target);
        }
        let base = f.find(self.base);
        let mut edges = Vec::new();
        for v in 0..self.num_vertices {
            if f.find(v) != v {
                continue;
            }
            for g in 0..k {
                let t = f.out[v * k + g];
                if t != NONE {
                    edges.push(Edge { source: v, generator: g, target: f.find(t) });
                }
            }
        }
        Self::from_parts(self.alphabet.clone(), self.num_vertices, base, edges).canonical()
    }

    /// Quadratic folding by repeated search for a conflicting edge pair.
    /// Used as an independent oracle for [`StallingsGraph::fold`].
    pub fn fold_naive(&self) -> StallingsGraph {
        let mut label: Vec<usize> = (0..self.num_vertices).collect();
        let mut edges: Vec<Edge> = self.edges.clone();
        loop {
            edges.sort();
            edges.dedup();
            let mut merge = None;
            'search: for (i, e) in edges.iter().enumerate() {
                for f in &edges[i + 1..] {
                    if e.generator != f.generator {
                        continue;
                    }
                    if e.source == f.source && e.target != f.target {
                        merge = Some((e.target, f.target));
                        break 'search;
                    }
                    if e.target == f.target && e.source != f.source {
                        merge = Some((e.source, f.source));
                        break 'search;
                    }
                }
            }
            let Some((p, q)) = merge else { break };
            let (keep, gone) = (p.min(q), p.max(q));
            for l in label.iter_mut() {
                if *l == gone {
                    *l = keep;
                }
            }
            for e in edges.iter_mut() {
                if e.source == gone {
                    e.source = keep;
                }
                if e.target == gone {
                    e.target = keep;
                }
            }
        }
        Self::from_parts(self.alphabet.clone(), self.num_vertices, label[self.base], edges).canonical()
    }

    /// Repeatedly deletes non-base vertices of degree at most one.
    pub fn trim(&self) -> StallingsGraph {
        let mut deg = self.degrees();
        let mut alive = vec![true; self.num_vertices];
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.num_vertices];
        for (i, e) in self.edges.iter().enumerate() {
            incident[e.source].push(i);
            if e.target != e.source {
                incident[e.target].push(i);
            }
        }
        let mut edge_alive = vec![true; self.edges.len()];
        let mut queue: VecDeque<usize> =
            (0..self.num_vertices).filter(|&v| v != self.base && deg[v] <= 1).collect();
        while let Some(v) = queue.pop_front() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &i in &incident[v] {
                if !edge_alive[i] {
                    continue;
                }
                edge_alive[i] = false;
                let e = self.edges[i];
                for u in [e.source, e.target] {
                    if u != v && alive[u] {
                        deg[u] -= 1;
                        if u != self.base && deg[u] <= 1 {
                            queue.push_back(u);
                        }
                    }
                }
            }
        }
        self.restrict(&alive, &edge_alive)
    }

    fn restrict(&self, alive: &[bool], edge_alive: &[bool]) -> StallingsGraph {
        let mut map = vec![NONE; self.num_vertices];
        let mut n = 0;
        for v in 0..self.num_vertices {
            if alive[v] {
                map[v] = n;
                n += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .zip(edge_alive)
            .filter(|(_, &a)| a)
            .map(|(e, _)| Edge { source: map[e.source], generator: e.generator, target: map[e.target] })
            .collect();
        let g = Self::from_parts(self.alphabet.clone(), n.max(1), map[self.base], edges);
        if g.is_folded() {
            g.canonical()
        } else {
            g
        }
    }

    /// Renumbers a folded graph breadth-first from the base, dropping
    /// vertices not connected to it. Non-folded graphs are folded first.
    pub fn canonical(&self) -> StallingsGraph {
        if !self.is_folded() {
            return self.fold();
        }
        self.rerooted(self.base)
    }

    /// Canonical renumbering of the connected component of `root`, with
    /// `root` as the new base.
    fn rerooted(&self, root: usize) -> StallingsGraph {
        let mut map = vec![NONE; self.num_vertices];
        let mut order = vec![root];
        map[root] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            for l in self.alphabet.letters() {
                if let Some(t) = self.target(v, l) {
                    if map[t] == NONE {
                        map[t] = order.len();
                        order.push(t);
                    }
                }
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| map[e.source] != NONE)
            .map(|e| Edge { source: map[e.source], generator: e.generator, target: map[e.target] })
            .collect();
        Self::from_parts(self.alphabet.clone(), order.len(), 0, edges)
    }

    /// Rooted isomorphism of folded graphs.
    pub fn is_isomorphic(&self, other: &StallingsGraph) -> bool {
        self.canonical() == other.canonical()
    }

    /// Membership of `w` in the subgroup represented by this folded graph.
    pub fn membership_free(&self, w: &Word) -> Result<bool> {
        self.alphabet.check_word(w)?;
        if !self.is_folded() {
            return Err(Error::Malformed("membership requires a folded graph".into()));
        }
        Ok(self.reads_loop(&free_reduce(w)))
    }

    /// Words labelling breadth-first spanning-tree paths from the base.
    fn tree_paths(&self) -> (Vec<Word>, Vec<bool>) {
        let mut path: Vec<Option<Word>> = vec![None; self.num_vertices];
        let mut tree_edge = vec![false; self.edges.len()];
        path[self.base] = Some(Word::empty());
        let mut queue = VecDeque::from([self.base]);
        while let Some(v) = queue.pop_front() {
            for l in self.alphabet.letters() {
                let Some(t) = self.target(v, l) else { continue };
                if path[t].is_some() {
                    continue;
                }
                let mut p = path[v].clone().unwrap();
                p.push(l);
                path[t] = Some(p);
                let e = if l.is_inverse() {
                    Edge { source: t, generator: l.generator(), target: v }
                } else {
                    Edge { source: v, generator: l.generator(), target: t }
                };
                let i = self.edges.binary_search(&e).expect("edge present");
                tree_edge[i] = true;
                queue.push_back(t);
            }
        }
        (path.into_iter().map(Option::unwrap_or_default).collect(), tree_edge)
    }

    /// For each vertex, the ShortLex-least label of a path from the base
    /// (folded, connected graphs).
    pub fn vertex_paths(&self) -> Vec<Word> {
        self.tree_paths().0
    }

    /// Rank `|E| − |V| + 1` and the basis read off spanning-tree chords.
    pub fn rank_and_basis(&self) -> (usize, Vec<Word>) {
        let (path, tree) = self.tree_paths();
        let basis: Vec<Word> = self
            .edges
            .iter()
            .zip(&tree)
            .filter(|(_, &t)| !t)
            .map(|(e, _)| {
                let mut w = path[e.source].clone();
                w.push(Letter::new(e.generator, false));
                free_reduce(&w.concat(&path[e.target].inverse()))
            })
            .collect();
        (self.edges.len() + 1 - self.num_vertices, basis)
    }

    pub fn index_free(&self) -> Index {
        let complete = (0..self.num_vertices)
            .all(|v| self.alphabet.letters().all(|l| self.target(v, l).is_some()));
        if complete {
            Index::Finite(self.num_vertices)
        } else {
            Index::Infinite
        }
    }

    fn same_alphabet(&self, other: &StallingsGraph) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet.names(),
                other.alphabet.names()
            )));
        }
        Ok(())
    }

    /// The graph of `H₁ ∩ H₂`: base component of the product graph, trimmed.
    pub fn intersect_free(&self, other: &StallingsGraph) -> Result<StallingsGraph> {
        self.same_alphabet(other)?;
        let m = other.num_vertices;
        let mut id = std::collections::HashMap::new();
        let start = (self.base, other.base);
        id.insert(start, 0usize);
        let mut pairs = vec![start];
        let mut edges = Vec::new();
        let mut head = 0;
        while head < pairs.len() {
            let (p, q) = pairs[head];
            let here = head;
            head += 1;
            for l in self.alphabet.letters() {
                let (Some(p2), Some(q2)) = (self.target(p, l), other.target(q, l)) else { continue };
                let next = *id.entry((p2, q2)).or_insert_with(|| {
                    pairs.push((p2, q2));
                    pairs.len() - 1
                });
                if !l.is_inverse() {
                    edges.push(Edge { source: here, generator: l.generator(), target: next });
                }
            }
        }
        debug_assert!(pairs.len() <= self.num_vertices * m);
        Ok(Self::from_parts(self.alphabet.clone(), pairs.len(), 0, edges).trim())
    }

    /// Removes hair at the base: returns the core graph (rooted at the end
    /// of the hair) and the hair word from the old base to the new root.
    fn core(&self) -> (StallingsGraph, Word) {
        let mut g = self.trim();
        let mut hair = Word::empty();
        loop {
            let deg = g.degrees();
            if g.num_vertices == 1 || deg[g.base] != 1 {
                return (g, hair);
            }
            let l = g
                .alphabet
                .letters()
                .find(|&l| g.target(g.base, l).is_some())
                .expect("degree one");
            let next = g.target(g.base, l).unwrap();
            hair.push(l);
            let mut alive = vec![true; g.num_vertices];
            alive[g.base] = false;
            let edge_alive: Vec<bool> =
                g.edges.iter().map(|e| e.source != g.base && e.target != g.base).collect();
            let mut moved = g.clone();
            moved.base = next;
            g = moved.restrict(&alive, &edge_alive);
        }
    }

    /// A word `x` with `x⁻¹·H₁·x = H₂`, or `None` if the subgroups are not
    /// conjugate. Among valid conjugators the one for the least base choice
    /// in the second core is returned.
    pub fn conjugate_free(&self, other: &StallingsGraph) -> Result<Option<Word>> {
        self.same_alphabet(other)?;
        let (c1, p1) = self.core();
        let (c2, p2) = other.core();
        let trivial1 = c1.edges.is_empty();
        let trivial2 = c2.edges.is_empty();
        if trivial1 || trivial2 {
            return Ok((trivial1 && trivial2).then(Word::empty));
        }
        if c1.num_vertices != c2.num_vertices || c1.edges.len() != c2.edges.len() {
            return Ok(None);
        }
        let (paths2, _) = c2.tree_paths();
        for d in 0..c2.num_vertices {
            if c2.rerooted(d) == c1 {
                let x = p1.concat(&paths2[d].inverse()).concat(&p2.inverse());
                return Ok(Some(free_reduce(&x)));
            }
        }
        Ok(None)
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph stallings {\n  rankdir=LR;\n");
        for v in 0..self.num_vertices {
            let shape = if v == self.base { "doublecircle" } else { "circle" };
            let _ = writeln!(s, "  v{v} [shape={shape}];");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  v{} -> v{} [label=\"{}\"];",
                e.source,
                e.target,
                self.alphabet.name(e.generator)
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            alphabet: Some(self.alphabet.names().to_vec()),
            vertices: self.num_vertices,
            base: self.base,
            edges: self
                .edges
                .iter()
                .map(|e| (e.source, self.alphabet.name(e.generator).to_string(), e.target))
                .collect(),
        }
    }

    /// Parses the JSON graph format. The alphabet is taken from the file
    /// when present, otherwise from `alphabet`.
    pub fn from_json(json: &GraphJson, alphabet: Option<&Alphabet>) -> Result<Self> {
        let alphabet = match (&json.alphabet, alphabet) {
            (Some(names), _) => Alphabet::new(names.clone())?,
            (None, Some(a)) => a.clone(),
            (None, None) => return Err(Error::Malformed("graph without alphabet".into())),
        };
        let edges = json
            .edges
            .iter()
            .map(|(s, g, t)| {
                let generator = alphabet
                    .index_of(g)
                    .ok_or_else(|| Error::Malformed(format!("unknown generator {g:?}")))?;
                Ok(Edge { source: *s, generator, target: *t })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(alphabet, json.vertices, json.base, edges)
    }
}

/// JSON form: `{"vertices": n, "base": 0, "edges": [[src, "a", dst], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alphabet: Option<Vec<String>>,
    pub vertices: usize,
    pub base: usize,
    pub edges: Vec<(usize, String, usize)>,
}

/// Appends a path from `from` to `to` labelled `w`, creating fresh inner
/// vertices. An empty `w` adds nothing.
fn add_path(edges: &mut Vec<Edge>, n: &mut usize, from: usize, to: usize, w: &Word) {
    let len = w.len();
    let mut cur = from;
    for (i, &l) in w.iter().enumerate() {
        let next = if i + 1 == len {
            to
        } else {
            *n += 1;
            *n - 1
        };
        edges.push(if l.is_inverse() {
            Edge { source: next, generator: l.generator(), target: cur }
        } else {
            Edge { source: cur, generator: l.generator(), target: next }
        });
        cur = next;
    }
}

/// The unfolded rose: one closed path per (freely reduced) generator.
pub fn bouquet(alphabet: &Alphabet, generators: &[Word]) -> Result<StallingsGraph> {
    for g in generators {
        alphabet.check_word(g)?;
    }
    let mut n = 1;
    let mut edges = Vec::new();
    for g in generators {
        add_path(&mut edges, &mut n, 0, 0, &free_reduce(g));
    }
    Ok(StallingsGraph::from_parts(alphabet.clone(), n, 0, edges))
}

/// Folded and trimmed Stallings graph of `⟨generators⟩`.
pub fn stallings_graph(alphabet: &Alphabet, generators: &[Word]) -> Result<StallingsGraph> {
    Ok(bouquet(alphabet, generators)?.fold().trim())
}

struct Folder {
    parent: Vec<usize>,
    size: Vec<usize>,
    out: Vec<usize>,
    inc: Vec<usize>,
    k: usize,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new(n: usize, k: usize) -> Self {
        Folder {
            parent: (0..n).collect(),
            size: vec![1; n],
            out: vec![NONE; n * k],
            inc: vec![NONE; n * k],
            k,
            pending: Vec::new(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        let mut root = v;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[v] != root {
            let next = self.parent[v];
            self.parent[v] = root;
            v = next;
        }
        root
    }

    fn add_edge(&mut self, s: usize, g: usize, t: usize) {
        let (s, t) = (self.find(s), self.find(t));
        let k = self.k;
        match self.out[s * k + g] {
            NONE => self.out[s * k + g] = t,
            t2 => self.pending.push((t, t2)),
        }
        match self.inc[t * k + g] {
            NONE => self.inc[t * k + g] = s,
            s2 => self.pending.push((s, s2)),
        }
        self.drain();
    }

    fn drain(&mut self) {
        let k = self.k;
        while let Some((p, q)) = self.pending.pop() {
            let (p, q) = (self.find(p), self.find(q));
            if p == q {
                continue;
            }
            let (keep, gone) = if self.size[p] >= self.size[q] { (p, q) } else { (q, p) };
            self.parent[gone] = keep;
            self.size[keep] += self.size[gone];
            for g in 0..k {
                for table in [&mut self.out, &mut self.inc] {
                    let moved = table[gone * k + g];
                    if moved == NONE {
                        continue;
                    }
                    match table[keep * k + g] {
                        NONE => table[keep * k + g] = moved,
                        existing => self.pending.push((existing, moved)),
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn w(s: &str) -> Word {
        ab().parse_word(s).unwrap()
    }

    fn graph(gens: &[&str]) -> StallingsGraph {
        let gens: Vec<Word> = gens.iter().map(|s| w(s)).collect();
        stallings_graph(&ab(), &gens).unwrap()
    }

    fn edges(g: &StallingsGraph) -> Vec<(usize, &str, usize)> {
        g.edges().iter().map(|e| (e.source, if e.generator == 0 { "a" } else { "b" }, e.target)).collect()
    }

    #[test]
    fn bouquet_shapes() {
        let b = bouquet(&ab(), &[w("a*a"), w("a*b")]).unwrap();
        // Two closed paths of length two share the base: 3 vertices, 4 edges.
        assert_eq!((b.num_vertices(), b.num_edges()), (3, 4));
        let b = bouquet(&ab(), &[]).unwrap();
        assert_eq!((b.num_vertices(), b.num_edges()), (1, 0));
        let b = bouquet(&ab(), &[w("a")]).unwrap();
        assert_eq!(b.edges(), &[Edge { source: 0, generator: 0, target: 0 }]);
    }

    #[test]
    fn fold_examples_match_naive() {
        let b = bouquet(&ab(), &[w("a*a"), w("a*b")]).unwrap();
        let f = b.fold();
        assert_eq!(f, b.fold_naive());
        assert_eq!(f.num_vertices(), 2);
        assert_eq!(edges(&f), vec![(0, "a", 1), (1, "a", 0), (1, "b", 0)]);

        let b = bouquet(&ab(), &[w("a*a"), w("b*b"), w("a*b")]).unwrap();
        let f = b.fold();
        assert_eq!(f, b.fold_naive());
        assert_eq!(edges(&f), vec![(0, "a", 1), (0, "b", 1), (1, "a", 0), (1, "b", 0)]);
        assert_eq!(f.fold(), f);
    }

    #[test]
    fn trim_examples() {
        let path = StallingsGraph::new(ab(), 2, 0, vec![Edge { source: 0, generator: 0, target: 1 }]).unwrap();
        let t = path.trim();
        assert_eq!((t.num_vertices(), t.num_edges()), (1, 0));

        let conj = bouquet(&ab(), &[w("a*b*a^-1")]).unwrap().fold();
        assert_eq!(conj, bouquet(&ab(), &[w("a*b*a^-1")]).unwrap().fold_naive());
        let t = conj.trim();
        assert_eq!(edges(&t), vec![(0, "a", 1), (1, "b", 1)]);
        assert_eq!(t.trim(), t);
    }

    #[test]
    fn membership_examples() {
        let g = graph(&["a*a", "a*b"]);
        assert!(g.membership_free(&w("a*b*a*b")).unwrap());
        assert!(!g.membership_free(&w("b")).unwrap());
        assert!(g.membership_free(&Word::empty()).unwrap());
        assert!(g.membership_free(&Word::from_pairs(&[(5, 1)])).is_err());
    }

    #[test]
    fn rank_index_examples() {
        assert_eq!(graph(&["a*a", "a*b"]).rank_and_basis().0, 2);
        assert_eq!(graph(&["a*a", "b*b", "a*b"]).rank_and_basis().0, 3);
        assert_eq!(graph(&[]).rank_and_basis(), (0, vec![]));
        assert_eq!(graph(&["a*a", "b*b", "a*b"]).index_free(), Index::Finite(2));
        assert_eq!(graph(&["a*a", "a*b"]).index_free(), Index::Infinite);
        assert_eq!(graph(&["a", "b"]).index_free(), Index::Finite(1));
    }

    #[test]
    fn basis_is_valid_and_refolds() {
        let g = graph(&["a*a", "b*a*b^-1", "a*b*a*b"]);
        let (rank, basis) = g.rank_and_basis();
        assert_eq!(rank, basis.len());
        for x in &basis {
            assert!(g.membership_free(x).unwrap());
        }
        assert!(stallings_graph(&ab(), &basis).unwrap().is_isomorphic(&g));
    }

    #[test]
    fn intersection_examples() {
        let i = graph(&["a"]).intersect_free(&graph(&["a*a", "b"])).unwrap();
        assert_eq!(i, graph(&["a*a"]));
        let h = graph(&["a*a", "a*b"]);
        assert_eq!(h.intersect_free(&h).unwrap(), h);
        let i = graph(&["a"]).intersect_free(&graph(&["b"])).unwrap();
        assert_eq!((i.num_vertices(), i.num_edges()), (1, 0));
        let other = stallings_graph(&Alphabet::new(["x"]).unwrap(), &[]).unwrap();
        assert!(matches!(h.intersect_free(&other), Err(Error::AlphabetMismatch(_))));
    }

    fn check_conjugator(h1: &StallingsGraph, h2: &StallingsGraph, x: &Word) {
        for y in h1.rank_and_basis().1 {
            assert!(h2.membership_free(&y.conjugate_by(x)).unwrap());
        }
        for y in h2.rank_and_basis().1 {
            assert!(h1.membership_free(&y.conjugate_by(&x.inverse())).unwrap());
        }
    }

    #[test]
    fn conjugacy_examples() {
        let (h1, h2) = (graph(&["b"]), graph(&["a*b*a^-1"]));
        let x = h1.conjugate_free(&h2).unwrap().expect("conjugate");
        assert_eq!(x, w("a^-1"));
        check_conjugator(&h1, &h2, &x);

        let h = graph(&["a*a", "a*b"]);
        assert_eq!(h.conjugate_free(&h).unwrap(), Some(Word::empty()));
        assert_eq!(graph(&["a"]).conjugate_free(&graph(&["b"])).unwrap(), None);

        let (h1, h2) = (graph(&["a*b", "b*b*a"]), graph(&["b^-1*a*b*b", "b^-1*b*b*a*b"]));
        let x = h1.conjugate_free(&h2).unwrap().expect("conjugate");
        check_conjugator(&h1, &h2, &x);
        assert_eq!(graph(&[]).conjugate_free(&graph(&[])).unwrap(), Some(Word::empty()));
        assert_eq!(graph(&[]).conjugate_free(&graph(&["a"])).unwrap(), None);
    }

    #[test]
    fn json_and_dot() {
        let g = graph(&["a*a", "a*b"]);
        let json = serde_json::to_string(&g.to_json()).unwrap();
        let back: GraphJson = serde_json::from_str(&json).unwrap();
        assert_eq!(StallingsGraph::from_json(&back, None).unwrap(), g);
        assert!(g.to_dot().contains("v0 [shape=doublecircle]"));
    }
}

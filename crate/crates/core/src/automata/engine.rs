//! Alphabet-agnostic automata over symbols `0..num_symbols`.

use std::collections::{HashMap, VecDeque};

const NONE: u32 = u32::MAX;
const EPS: u32 = u32::MAX;

/// A nondeterministic automaton with optional ε-transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    num_symbols: usize,
    initial: usize,
    accepting: Vec<bool>,
    trans: Vec<Vec<(u32, u32)>>,
}

impl Automaton {
    pub fn new(num_symbols: usize, num_states: usize, initial: usize) -> Self {
        let num_states = num_states.max(initial + 1);
        Automaton {
            num_symbols,
            initial,
            accepting: vec![false; num_states],
            trans: vec![Vec::new(); num_states],
        }
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.accepting.len() - 1
    }

    /// Adds `from --symbol--> to`; `None` is an ε-transition.
    pub fn add_transition(&mut self, from: usize, symbol: Option<usize>, to: usize) {
        let s = symbol.map_or(EPS, |s| s as u32);
        self.trans[from].push((s, to as u32));
    }

    /// Transitions out of `q` as `(symbol, target)`; `None` marks ε.
    pub fn transitions(&self, q: usize) -> impl Iterator<Item = (Option<usize>, usize)> + '_ {
        self.trans[q]
            .iter()
            .map(|&(s, t)| ((s != EPS).then_some(s as usize), t as usize))
    }

    pub fn is_deterministic(&self) -> bool {
        self.trans.iter().all(|ts| {
            let mut seen: Vec<u32> = ts.iter().map(|&(s, _)| s).collect();
            let n = seen.len();
            seen.sort_unstable();
            seen.dedup();
            seen.len() == n && !seen.contains(&EPS)
        })
    }

    fn eps_closure(&self, set: &mut Vec<u32>) {
        let mut stack = set.clone();
        while let Some(q) = stack.pop() {
            for &(s, t) in &self.trans[q as usize] {
                if s == EPS && !set.contains(&t) {
                    set.push(t);
                    stack.push(t);
                }
            }
        }
        set.sort_unstable();
    }

    /// Subset construction over reachable subsets.
    pub fn determinize(&self) -> Dfa {
        let k = self.num_symbols;
        let mut start = vec![self.initial as u32];
        self.eps_closure(&mut start);
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut subsets = vec![start.clone()];
        ids.insert(start, 0);
        let mut table: Vec<u32> = Vec::new();
        let mut accepting = Vec::new();
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut head = 0;
        while head < subsets.len() {
            let subset = subsets[head].clone();
            head += 1;
            accepting.push(subset.iter().any(|&q| self.accepting[q as usize]));
            for b in buckets.iter_mut() {
                b.clear();
            }
            for &q in &subset {
                for &(s, t) in &self.trans[q as usize] {
                    if s != EPS {
                        buckets[s as usize].push(t);
                    }
                }
            }
            for bucket in buckets.iter_mut() {
                if bucket.is_empty() {
                    table.push(NONE);
                    continue;
                }
                let mut target = std::mem::take(bucket);
                target.sort_unstable();
                target.dedup();
                self.eps_closure(&mut target);
                target.dedup();
                let id = match ids.get(&target) {
                    Some(&id) => id,
                    None => {
                        let id = subsets.len() as u32;
                        ids.insert(target.clone(), id);
                        subsets.push(target);
                        id
                    }
                };
                table.push(id);
            }
        }
        Dfa { num_symbols: k, initial: 0, accepting, table }
    }
}

/// A deterministic automaton with a dense, possibly partial, transition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dfa {
    num_symbols: usize,
    initial: u32,
    accepting: Vec<bool>,
    table: Vec<u32>,
}

impl Dfa {
    /// The empty language: one non-accepting state.
    pub fn empty(num_symbols: usize) -> Self {
        Dfa { num_symbols, initial: 0, accepting: vec![false], table: vec![NONE; num_symbols] }
    }

    pub fn with_states(num_symbols: usize, num_states: usize) -> Self {
        Dfa {
            num_symbols,
            initial: 0,
            accepting: vec![false; num_states.max(1)],
            table: vec![NONE; num_states.max(1) * num_symbols],
        }
    }

    pub fn set_transition(&mut self, from: usize, symbol: usize, to: usize) {
        self.table[from * self.num_symbols + symbol] = to as u32;
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn set_initial(&mut self, q: usize) {
        self.initial = q as u32;
    }

    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial as usize
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn next(&self, q: usize, symbol: usize) -> Option<usize> {
        let t = self.table[q * self.num_symbols + symbol];
        (t != NONE).then_some(t as usize)
    }

    pub fn run<I: IntoIterator<Item = usize>>(&self, word: I) -> Option<usize> {
        word.into_iter().try_fold(self.initial(), |q, s| self.next(q, s))
    }

    pub fn accepts<I: IntoIterator<Item = usize>>(&self, word: I) -> bool {
        self.run(word).is_some_and(|q| self.accepting[q])
    }

    pub fn to_automaton(&self) -> Automaton {
        let mut a = Automaton::new(self.num_symbols, self.num_states(), self.initial());
        for q in 0..self.num_states() {
            a.accepting[q] = self.accepting[q];
            for s in 0..self.num_symbols {
                if let Some(t) = self.next(q, s) {
                    a.trans[q].push((s as u32, t as u32));
                }
            }
        }
        a
    }

    /// Same language with a total transition function (adds a sink if needed).
    pub fn complete(&self) -> Dfa {
        if !self.table.contains(&NONE) {
            return self.clone();
        }
        let sink = self.num_states() as u32;
        let mut table: Vec<u32> =
            self.table.iter().map(|&t| if t == NONE { sink } else { t }).collect();
        table.extend(std::iter::repeat_n(sink, self.num_symbols));
        let mut accepting = self.accepting.clone();
        accepting.push(false);
        Dfa { num_symbols: self.num_symbols, initial: self.initial, accepting, table }
    }

    /// Complement with respect to all words over the symbol set.
    pub fn complement(&self) -> Dfa {
        let mut c = self.complete();
        for a in c.accepting.iter_mut() {
            *a = !*a;
        }
        c
    }

    /// Synchronous product of the completed automata, reachable pairs only,
    /// with acceptance `f(accept_self, accept_other)`.
    pub fn product(&self, other: &Dfa, f: impl Fn(bool, bool) -> bool) -> Dfa {
        assert_eq!(self.num_symbols, other.num_symbols, "symbol sets differ");
        let (a, b) = (self.complete(), other.complete());
        let k = self.num_symbols;
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut pairs = vec![(a.initial, b.initial)];
        ids.insert(pairs[0], 0);
        let mut table = Vec::new();
        let mut accepting = Vec::new();
        let mut head = 0;
        while head < pairs.len() {
            let (p, q) = pairs[head];
            head += 1;
            accepting.push(f(a.accepting[p as usize], b.accepting[q as usize]));
            for s in 0..k {
                let next = (a.table[p as usize * k + s], b.table[q as usize * k + s]);
                let id = *ids.entry(next).or_insert_with(|| {
                    pairs.push(next);
                    (pairs.len() - 1) as u32
                });
                table.push(id);
            }
        }
        Dfa { num_symbols: k, initial: 0, accepting, table }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.num_states()];
        seen[self.initial()] = true;
        let mut stack = vec![self.initial()];
        while let Some(q) = stack.pop() {
            for s in 0..self.num_symbols {
                if let Some(t) = self.next(q, s) {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    fn coreachable(&self) -> Vec<bool> {
        let n = self.num_states();
        let mut pre: Vec<Vec<usize>> = vec![Vec::new(); n];
        for q in 0..n {
            for s in 0..self.num_symbols {
                if let Some(t) = self.next(q, s) {
                    pre[t].push(q);
                }
            }
        }
        let mut seen = self.accepting.clone();
        let mut stack: Vec<usize> = (0..n).filter(|&q| seen[q]).collect();
        while let Some(q) = stack.pop() {
            for &p in &pre[q] {
                if !seen[p] {
                    seen[p] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// States that are both reachable and co-reachable.
    pub fn useful(&self) -> Vec<bool> {
        let r = self.reachable();
        let c = self.coreachable();
        r.iter().zip(&c).map(|(a, b)| *a && *b).collect()
    }

    pub fn is_empty(&self) -> bool {
        !self.useful()[self.initial()]
    }

    pub fn is_finite(&self) -> bool {
        let useful = self.useful();
        // Cycle detection restricted to useful states (iterative DFS colouring).
        let n = self.num_states();
        let mut colour = vec![0u8; n];
        for root in 0..n {
            if !useful[root] || colour[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            colour[root] = 1;
            while let Some(&mut (q, ref mut s)) = stack.last_mut() {
                if *s == self.num_symbols {
                    colour[q] = 2;
                    stack.pop();
                    continue;
                }
                let sym = *s;
                *s += 1;
                if let Some(t) = self.next(q, sym) {
                    if !useful[t] {
                        continue;
                    }
                    match colour[t] {
                        1 => return false,
                        0 => {
                            colour[t] = 1;
                            stack.push((t, 0));
                        }
                        _ => {}
                    }
                }
            }
        }
        true
    }

    /// `levels[r][q]`: an accepting state is reachable from `q` in exactly `r` steps.
    fn accepting_within(&self, useful: &[bool], levels: &mut Vec<Vec<bool>>, len: usize) {
        if levels.is_empty() {
            levels.push(self.accepting.iter().zip(useful).map(|(a, u)| *a && *u).collect());
        }
        while levels.len() <= len {
            let prev = levels.last().unwrap();
            let next = (0..self.num_states())
                .map(|q| {
                    useful[q] && (0..self.num_symbols).any(|s| self.next(q, s).is_some_and(|t| prev[t]))
                })
                .collect();
            levels.push(next);
        }
    }

    fn words_of_length(&self, levels: &[Vec<bool>], len: usize, limit: usize, out: &mut Vec<Vec<usize>>) {
        if !levels[len][self.initial()] {
            return;
        }
        let mut stack: Vec<(usize, usize)> = vec![(self.initial(), 0)];
        let mut word: Vec<usize> = Vec::with_capacity(len);
        while let Some(&mut (q, ref mut s)) = stack.last_mut() {
            if out.len() >= limit {
                return;
            }
            if word.len() == len {
                out.push(word.clone());
                stack.pop();
                word.pop();
                continue;
            }
            if *s == self.num_symbols {
                stack.pop();
                word.pop();
                continue;
            }
            let sym = *s;
            *s += 1;
            let remaining = len - word.len() - 1;
            if let Some(t) = self.next(q, sym) {
                if levels[remaining][t] {
                    word.push(sym);
                    stack.push((t, 0));
                }
            }
        }
    }

    /// The `n` ShortLex-least accepted words (fewer if the language is smaller).
    pub fn enumerate(&self, n: usize) -> Vec<Vec<usize>> {
        let useful = self.useful();
        let mut out = Vec::new();
        if n == 0 || !useful[self.initial()] {
            return out;
        }
        let finite = self.is_finite();
        let mut levels = Vec::new();
        let mut len = 0;
        while out.len() < n {
            if finite && len > self.num_states() {
                break;
            }
            self.accepting_within(&useful, &mut levels, len);
            self.words_of_length(&levels, len, n, &mut out);
            len += 1;
        }
        out
    }

    /// All accepted words of length at most `max_len`, in ShortLex order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<usize>> {
        let useful = self.useful();
        let mut out = Vec::new();
        if !useful[self.initial()] {
            return out;
        }
        let mut levels = Vec::new();
        self.accepting_within(&useful, &mut levels, max_len);
        for len in 0..=max_len {
            self.words_of_length(&levels, len, usize::MAX, &mut out);
        }
        out
    }

    /// Hopcroft minimization. The result has no dead states and is numbered
    /// breadth-first from the initial state in symbol order, so two
    /// minimized automata are equal iff their languages are.
    pub fn minimize(&self) -> Dfa {
        let reach = self.reachable();
        if !self.coreachable().iter().zip(&reach).any(|(c, r)| *c && *r) {
            return Dfa::empty(self.num_symbols);
        }
        let full = self.complete();
        let n = full.num_states();
        let k = self.num_symbols;
        let reach_full: Vec<bool> = (0..n).map(|q| q >= reach.len() || reach[q]).collect();

        // Inverse transitions in CSR form.
        let mut counts = vec![0usize; n * k + 1];
        for q in 0..n {
            if !reach_full[q] {
                continue;
            }
            for s in 0..k {
                let t = full.table[q * k + s] as usize;
                counts[t * k + s + 1] += 1;
            }
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let mut fill = counts.clone();
        let mut pre = vec![0u32; counts[n * k]];
        for q in 0..n {
            if !reach_full[q] {
                continue;
            }
            for s in 0..k {
                let t = full.table[q * k + s] as usize;
                pre[fill[t * k + s]] = q as u32;
                fill[t * k + s] += 1;
            }
        }

        let mut block_of = vec![usize::MAX; n];
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        let (acc, rej): (Vec<usize>, Vec<usize>) =
            (0..n).filter(|&q| reach_full[q]).partition(|&q| full.accepting[q]);
        for b in [acc, rej] {
            if !b.is_empty() {
                for &q in &b {
                    block_of[q] = blocks.len();
                }
                blocks.push(b);
            }
        }
        let mut in_work: Vec<Vec<bool>> = vec![vec![true; k]; blocks.len()];
        let mut work: Vec<(usize, usize)> =
            (0..blocks.len()).flat_map(|b| (0..k).map(move |s| (b, s))).collect();
        let mut mark = vec![false; n];
        while let Some((b, s)) = work.pop() {
            in_work[b][s] = false;
            let mut splitter: Vec<usize> = Vec::new();
            for &q in &blocks[b] {
                for &p in &pre[counts[q * k + s]..counts[q * k + s + 1]] {
                    if !mark[p as usize] {
                        mark[p as usize] = true;
                        splitter.push(p as usize);
                    }
                }
            }
            let mut touched: Vec<usize> = splitter.iter().map(|&p| block_of[p]).collect();
            touched.sort_unstable();
            touched.dedup();
            for y in touched {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[y].iter().partition(|&&q| mark[q]);
                if outside.is_empty() {
                    continue;
                }
                let new = blocks.len();
                for &q in &outside {
                    block_of[q] = new;
                }
                let inside_len = inside.len();
                let outside_len = outside.len();
                blocks[y] = inside;
                blocks.push(outside);
                in_work.push(vec![false; k]);
                for d in 0..k {
                    if in_work[y][d] {
                        in_work[new][d] = true;
                        work.push((new, d));
                    } else {
                        let smaller = if inside_len <= outside_len { y } else { new };
                        in_work[smaller][d] = true;
                        work.push((smaller, d));
                    }
                }
            }
            for p in splitter {
                mark[p] = false;
            }
        }

        // Quotient, keeping only live blocks, renumbered breadth-first.
        let quotient_accepting: Vec<bool> = blocks.iter().map(|b| full.accepting[b[0]]).collect();
        let quotient_next = |b: usize, s: usize| block_of[full.table[blocks[b][0] * k + s] as usize];
        let nb = blocks.len();
        let mut pre_blocks: Vec<Vec<usize>> = vec![Vec::new(); nb];
        for b in 0..nb {
            for s in 0..k {
                pre_blocks[quotient_next(b, s)].push(b);
            }
        }
        let mut live = quotient_accepting.clone();
        let mut stack: Vec<usize> = (0..nb).filter(|&b| live[b]).collect();
        while let Some(b) = stack.pop() {
            for &p in &pre_blocks[b] {
                if !live[p] {
                    live[p] = true;
                    stack.push(p);
                }
            }
        }
        let start = block_of[full.initial()];
        let mut number = vec![NONE; nb];
        number[start] = 0;
        let mut order = vec![start];
        let mut head = 0;
        while head < order.len() {
            let b = order[head];
            head += 1;
            for s in 0..k {
                let t = quotient_next(b, s);
                if live[t] && number[t] == NONE {
                    number[t] = order.len() as u32;
                    order.push(t);
                }
            }
        }
        let mut out = Dfa::with_states(k, order.len());
        for (i, &b) in order.iter().enumerate() {
            out.accepting[i] = quotient_accepting[b];
            for s in 0..k {
                let t = quotient_next(b, s);
                if live[t] {
                    out.table[i * k + s] = number[t];
                }
            }
        }
        out
    }
}

/// Breadth-first construction helper: interns product states and records
/// their transitions into an [`Automaton`].
pub(crate) struct Builder<K: std::hash::Hash + Eq + Clone> {
    pub ids: HashMap<K, usize>,
    pub queue: VecDeque<K>,
    pub auto: Automaton,
}

impl<K: std::hash::Hash + Eq + Clone> Builder<K> {
    pub fn new(num_symbols: usize, start: K) -> Self {
        let mut ids = HashMap::new();
        ids.insert(start.clone(), 0);
        Builder { ids, queue: VecDeque::from([start]), auto: Automaton::new(num_symbols, 1, 0) }
    }

    pub fn id(&mut self, key: K) -> usize {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.auto.add_state(false);
        self.ids.insert(key.clone(), id);
        self.queue.push_back(key);
        id
    }
}

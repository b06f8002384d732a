//! Membership deciders that do not go through folding or automata, used to
//! cross-check the semi-algorithms.

use std::collections::{HashSet, VecDeque};

use crate::autostruct::{FactorKind, Family};
use crate::error::{Error, Result};
use crate::lattice::{hnf, word_to_vector};
use crate::words::{free_reduce, Alphabet, Letter, Word};

/// Membership in a subgroup of a free group by ε-saturation of the bouquet
/// automaton: whenever `p →x→ q →x⁻¹→ r` an ε-move `p → r` is added.
pub fn free_membership(num_generators: usize, generators: &[Word], w: &Word) -> bool {
    // State 0 is the base; each generator contributes a closed path.
    let mut edges: Vec<(usize, usize, usize)> = Vec::new(); // (from, letter code, to)
    let mut n = 1;
    for h in generators {
        let h = free_reduce(h);
        let mut cur = 0;
        for (i, &l) in h.iter().enumerate() {
            let next = if i + 1 == h.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            edges.push((cur, l.code(), next));
            edges.push((next, l.inverse().code(), cur));
            cur = next;
        }
    }
    let k = 2 * num_generators;
    let mut eps = vec![vec![false; n]; n];
    for (p, row) in eps.iter_mut().enumerate() {
        row[p] = true;
    }
    let mut step: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); k]; n];
    for &(p, c, q) in &edges {
        step[p][c].push(q);
    }
    loop {
        let mut changed = false;
        // Transitive closure of ε.
        for m in 0..n {
            for p in 0..n {
                if eps[p][m] {
                    for q in 0..n {
                        if eps[m][q] && !eps[p][q] {
                            eps[p][q] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for c in 0..k {
                for p1 in 0..n {
                    if !eps[p][p1] {
                        continue;
                    }
                    for &q in &step[p1][c] {
                        for q1 in 0..n {
                            if !eps[q][q1] {
                                continue;
                            }
                            for &r in &step[q1][c ^ 1] {
                                if !eps[p][r] {
                                    eps[p][r] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut cur: Vec<bool> = eps[0].clone();
    for l in free_reduce(w).iter() {
        let mut next = vec![false; n];
        for p in (0..n).filter(|&p| cur[p]) {
            for &q in &step[p][l.code()] {
                for r in 0..n {
                    next[r] |= eps[q][r];
                }
            }
        }
        cur = next;
    }
    cur[0]
}

/// Membership in a subgroup of ℤⁿ given by words.
pub fn abelian_membership(n: usize, generators: &[Word], w: &Word) -> Result<bool> {
    let vecs: Vec<Vec<i64>> = generators.iter().map(|h| word_to_vector(n, h)).collect::<Result<_>>()?;
    hnf(n, &vecs)?.contains(&word_to_vector(n, w)?)
}

/// Membership in a free product of free and free abelian factors, for
/// subgroups generated by elements of single factors: `w ∈ H` iff every
/// syllable of its normal form lies in the corresponding factor subgroup.
pub fn family_membership(family: &Family, generators: &[Word], w: &Word) -> Result<bool> {
    let nf_syllables = |w: &Word| -> Vec<(usize, Word)> {
        let mut out: Vec<(usize, Word)> = Vec::new();
        for &l in family.nf(w).iter() {
            let f = family.factor_of(l);
            match out.last_mut() {
                Some((g, s)) if *g == f => s.push(l),
                _ => out.push((f, Word::letter(l))),
            }
        }
        out
    };
    let mut per_factor: Vec<Vec<Word>> = vec![Vec::new(); family.factors().len()];
    for h in generators {
        match nf_syllables(h).as_slice() {
            [] => {}
            [(f, s)] => per_factor[*f].push(s.clone()),
            _ => {
                return Err(Error::NoOracle("subgroup generator spans several free factors".into()));
            }
        }
    }
    for (f, s) in nf_syllables(w) {
        let factor = &family.factors()[f];
        // Renumber the factor's generators to 0..k.
        let local: Vec<usize> = {
            let mut map = vec![usize::MAX; factor.generators.iter().max().map_or(0, |m| m + 1)];
            for (i, &g) in factor.generators.iter().enumerate() {
                map[g] = i;
            }
            map
        };
        let to_local = |w: &Word| w.map_generators(&local);
        let gens: Vec<Word> = per_factor[f].iter().map(to_local).collect();
        let inside = match factor.kind {
            FactorKind::Free => free_membership(factor.generators.len(), &gens, &to_local(&s)),
            FactorKind::Abelian => abelian_membership(factor.generators.len(), &gens, &to_local(&s))?,
        };
        if !inside {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite group given by permutations of `0..degree`, one per generator.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    alphabet: Alphabet,
    images: Vec<Vec<u32>>,
    inverses: Vec<Vec<u32>>,
}

impl PermutationGroup {
    pub fn new(alphabet: Alphabet, images: Vec<Vec<u32>>) -> Result<Self> {
        if images.len() != alphabet.len() {
            return Err(Error::Dimension { expected: alphabet.len(), found: images.len() });
        }
        let degree = images.first().map_or(0, Vec::len);
        let mut inverses = Vec::new();
        for p in &images {
            let mut inv = vec![u32::MAX; degree];
            if p.len() != degree {
                return Err(Error::Malformed("permutations of different degrees".into()));
            }
            for (i, &j) in p.iter().enumerate() {
                if j as usize >= degree || inv[j as usize] != u32::MAX {
                    return Err(Error::Malformed("not a permutation".into()));
                }
                inv[j as usize] = i as u32;
            }
            inverses.push(inv);
        }
        Ok(PermutationGroup { alphabet, images, inverses })
    }

    pub fn degree(&self) -> usize {
        self.images.first().map_or(0, Vec::len)
    }

    fn letter(&self, l: Letter) -> &[u32] {
        if l.is_inverse() {
            &self.inverses[l.generator()]
        } else {
            &self.images[l.generator()]
        }
    }

    /// The permutation of `w`, acting on the right: `i ↦ i^w`.
    pub fn eval(&self, w: &Word) -> Vec<u32> {
        let mut p: Vec<u32> = (0..self.degree() as u32).collect();
        for &l in w {
            let q = self.letter(l);
            for x in p.iter_mut() {
                *x = q[*x as usize];
            }
        }
        p
    }

    pub fn satisfies(&self, relators: &[Word]) -> bool {
        let id = self.eval(&Word::empty());
        relators.iter().all(|r| self.eval(r) == id)
    }

    fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
        a.iter().map(|&x| b[x as usize]).collect()
    }

    /// Elements of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Word]) -> HashSet<Vec<u32>> {
        let perms: Vec<Vec<u32>> = gens.iter().map(|g| self.eval(g)).collect();
        let id = self.eval(&Word::empty());
        let mut seen = HashSet::from([id.clone()]);
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in &perms {
                let q = Self::compose(&p, g);
                if seen.insert(q.clone()) {
                    queue.push_back(q);
                }
            }
        }
        seen
    }

    pub fn order(&self) -> usize {
        let gens: Vec<Word> = (0..self.alphabet.len()).map(|g| Word::letter(Letter::new(g, false))).collect();
        self.closure(&gens).len()
    }

    pub fn is_member(&self, gens: &[Word], w: &Word) -> bool {
        self.closure(gens).contains(&self.eval(w))
    }
}

//! Subgroups of ℤⁿ in Hermite normal form, and abelian peripheral subgroups.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::stallings::Index;
use crate::words::{Alphabet, Letter, Word};

/// A subgroup of ℤⁿ stored by its row-style Hermite normal form: pivots are
/// positive, pivot columns strictly increase, and entries above a pivot lie
/// in `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticeSubgroup {
    ambient_rank: usize,
    rows: Vec<Vec<i64>>,
}

fn checked(v: Option<i64>) -> Result<i64> {
    v.ok_or(Error::Overflow)
}

/// `a -= q * b` entrywise.
fn sub_multiple(a: &mut [i64], b: &[i64], q: i64) -> Result<()> {
    if q == 0 {
        return Ok(());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x = checked(x.checked_sub(checked(q.checked_mul(*y))?))?;
    }
    Ok(())
}

fn pivot_of(row: &[i64]) -> usize {
    row.iter().position(|&x| x != 0).expect("nonzero row")
}

/// Hermite normal form basis of the subgroup generated by `vectors`.
pub fn hnf(ambient_rank: usize, vectors: &[Vec<i64>]) -> Result<LatticeSubgroup> {
    for v in vectors {
        if v.len() != ambient_rank {
            return Err(Error::Dimension { expected: ambient_rank, found: v.len() });
        }
    }
    let mut rows: Vec<Vec<i64>> = vectors.iter().filter(|v| v.iter().any(|&x| x != 0)).cloned().collect();
    let mut r = 0;
    for col in 0..ambient_rank {
        // Euclid on column `col` among rows r.. until one nonzero entry is left.
        loop {
            let best = (r..rows.len())
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].unsigned_abs());
            let Some(best) = best else { break };
            rows.swap(r, best);
            let mut done = true;
            for i in r + 1..rows.len() {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[r][col]);
                    let (head, tail) = rows.split_at_mut(i);
                    sub_multiple(&mut tail[0], &head[r], q)?;
                    if rows[i][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r >= rows.len() || rows[r][col] == 0 {
            continue;
        }
        if rows[r][col] < 0 {
            for x in rows[r].iter_mut() {
                *x = checked(x.checked_neg())?;
            }
        }
        let p = rows[r][col];
        for i in 0..r {
            let q = rows[i][col].div_euclid(p);
            let (head, tail) = rows.split_at_mut(r);
            sub_multiple(&mut head[i], &tail[0], q)?;
        }
        r += 1;
        rows.retain(|v| v.iter().any(|&x| x != 0));
    }
    rows.truncate(r);
    Ok(LatticeSubgroup { ambient_rank, rows })
}

impl LatticeSubgroup {
    pub fn new(ambient_rank: usize, vectors: &[Vec<i64>]) -> Result<Self> {
        hnf(ambient_rank, vectors)
    }

    /// The whole of ℤⁿ.
    pub fn full(ambient_rank: usize) -> Self {
        let rows = (0..ambient_rank)
            .map(|i| (0..ambient_rank).map(|j| i64::from(i == j)).collect())
            .collect();
        LatticeSubgroup { ambient_rank, rows }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        lattice_membership(self, v)
    }

    pub fn index(&self) -> Result<Index> {
        finite_index_test(self)
    }
}

/// Back-substitution against the HNF rows.
pub fn lattice_membership(s: &LatticeSubgroup, v: &[i64]) -> Result<bool> {
    if v.len() != s.ambient_rank {
        return Err(Error::Dimension { expected: s.ambient_rank, found: v.len() });
    }
    let mut v = v.to_vec();
    let mut col = 0;
    for row in &s.rows {
        let p = pivot_of(row);
        if v[col..p].iter().any(|&x| x != 0) {
            return Ok(false);
        }
        if v[p] % row[p] != 0 {
            return Ok(false);
        }
        let q = v[p] / row[p];
        sub_multiple(&mut v, row, q)?;
        col = p + 1;
    }
    Ok(v.iter().all(|&x| x == 0))
}

/// `|det|` for full-rank subgroups, infinite otherwise.
pub fn finite_index_test(s: &LatticeSubgroup) -> Result<Index> {
    if s.rows.len() < s.ambient_rank {
        return Ok(Index::Infinite);
    }
    let mut det: i64 = 1;
    for (i, row) in s.rows.iter().enumerate() {
        det = checked(det.checked_mul(row[i]))?;
    }
    Ok(Index::Finite(det as usize))
}

/// Every full-rank subgroup of ℤⁿ exactly once, layered by the largest HNF
/// entry and lexicographic (row-major) within a layer.
#[derive(Clone, Debug)]
pub struct FiniteIndexEnumerator {
    n: usize,
    layer: i64,
    buffer: Vec<Vec<Vec<i64>>>,
    pos: usize,
}

impl FiniteIndexEnumerator {
    pub fn new(n: usize) -> Self {
        FiniteIndexEnumerator { n, layer: 0, buffer: Vec::new(), pos: 0 }
    }

    fn fill_layer(&mut self) {
        let n = self.n;
        let m = self.layer;
        let mut out = Vec::new();
        let mut diag = vec![1i64; n];
        // Odometer over diagonals in [1, m] with at least one entry equal to m.
        loop {
            if diag.contains(&m) {
                let mut mat = vec![vec![0i64; n]; n];
                for i in 0..n {
                    mat[i][i] = diag[i];
                }
                let slots: Vec<(usize, usize)> =
                    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
                let mut fill = vec![0i64; slots.len()];
                loop {
                    for (k, &(i, j)) in slots.iter().enumerate() {
                        mat[i][j] = fill[k];
                    }
                    out.push(mat.clone());
                    let mut k = 0;
                    while k < slots.len() {
                        fill[k] += 1;
                        if fill[k] < diag[slots[k].1] {
                            break;
                        }
                        fill[k] = 0;
                        k += 1;
                    }
                    if k == slots.len() {
                        break;
                    }
                }
            }
            let mut i = 0;
            while i < n {
                diag[i] += 1;
                if diag[i] <= m {
                    break;
                }
                diag[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        out.sort();
        self.buffer = out;
        self.pos = 0;
    }
}

impl Iterator for FiniteIndexEnumerator {
    type Item = LatticeSubgroup;

    fn next(&mut self) -> Option<LatticeSubgroup> {
        if self.n == 0 {
            if self.layer == 0 {
                self.layer = 1;
                return Some(LatticeSubgroup::full(0));
            }
            return None;
        }
        while self.pos >= self.buffer.len() {
            self.layer += 1;
            self.fill_layer();
        }
        self.pos += 1;
        Some(LatticeSubgroup { ambient_rank: self.n, rows: self.buffer[self.pos - 1].clone() })
    }
}

/// The `k`-th full-rank subgroup of ℤⁿ in enumeration order (from 0).
pub fn enumerate_finite_index(n: usize, k: usize) -> LatticeSubgroup {
    FiniteIndexEnumerator::new(n).nth(k).expect("the enumeration is infinite for n > 0")
}

/// Abelianization coordinates of a word over a rank-`n` alphabet.
pub fn word_to_vector(n: usize, w: &Word) -> Result<Vec<i64>> {
    let mut v = vec![0i64; n];
    for l in w {
        let g = l.generator();
        if g >= n {
            return Err(Error::AlphabetMismatch(format!("generator {g} outside a rank-{n} alphabet")));
        }
        v[g] += if l.is_inverse() { -1 } else { 1 };
    }
    Ok(v)
}

/// The sorted normal form x₁^k₁ ⋯ xₙ^kₙ.
pub fn vector_to_word(v: &[i64]) -> Word {
    let mut w = Word::empty();
    for (g, &k) in v.iter().enumerate() {
        for _ in 0..k.unsigned_abs() {
            w.push(Letter::new(g, k < 0));
        }
    }
    w
}

/// One free abelian peripheral subgroup given by images of its generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Peripheral {
    pub name: String,
    pub alphabet: Alphabet,
    pub embedding: Vec<Word>,
}

impl Peripheral {
    pub fn new(name: impl Into<String>, alphabet: Alphabet, embedding: Vec<Word>) -> Result<Self> {
        if embedding.len() != alphabet.len() {
            return Err(Error::Dimension { expected: alphabet.len(), found: embedding.len() });
        }
        Ok(Peripheral { name: name.into(), alphabet, embedding })
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn word_to_vector(&self, w: &Word) -> Result<Vec<i64>> {
        word_to_vector(self.rank(), w)
    }

    pub fn vector_to_word(&self, v: &[i64]) -> Word {
        vector_to_word(v)
    }

    /// Image in the ambient group of the element with coordinates `v`.
    pub fn embed(&self, v: &[i64]) -> Word {
        let mut out = Word::empty();
        for (g, &k) in v.iter().enumerate() {
            let piece = if k < 0 { self.embedding[g].inverse() } else { self.embedding[g].clone() };
            for _ in 0..k.unsigned_abs() {
                out = out.mul(&piece);
            }
        }
        out
    }
}

/// The peripheral subgroups of a relatively hyperbolic presentation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PeripheralStructure {
    pub peripherals: Vec<Peripheral>,
}

impl PeripheralStructure {
    /// Checks embeddings against the ambient alphabet `a`. A peripheral letter
    /// may reuse a name from `a` only when it embeds as that very letter.
    pub fn validate(&self, a: &Alphabet) -> Result<()> {
        let mut seen = HashSet::new();
        for p in &self.peripherals {
            for (g, image) in p.embedding.iter().enumerate() {
                a.check_word(image)?;
                if !image.is_reduced() {
                    return Err(Error::Malformed(format!("embedding of {} in {} is not reduced", p.alphabet.name(g), p.name)));
                }
                let name = p.alphabet.name(g);
                if !seen.insert(name.to_string()) {
                    return Err(Error::Malformed(format!("peripheral letter {name} used twice")));
                }
                if let Some(i) = a.index_of(name) {
                    if *image != Word::letter(Letter::new(i, false)) {
                        return Err(Error::Malformed(format!(
                            "peripheral letter {name} clashes with a generator of the group"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rows(s: &LatticeSubgroup) -> Vec<Vec<i64>> {
        s.rows().to_vec()
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(rows(&hnf(2, &[vec![2, 0], vec![0, 3]]).unwrap()), vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(rows(&hnf(2, &[vec![2, 4]]).unwrap()), vec![vec![2, 4]]);
        assert_eq!(rows(&hnf(2, &[vec![1, 0], vec![0, 1], vec![5, 7]]).unwrap()), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(rows(&hnf(2, &[vec![-3, 1], vec![3, 1]]).unwrap()), vec![vec![3, 1], vec![0, 2]]);
        assert_eq!(rows(&hnf(3, &[vec![0, 0, 0]]).unwrap()), Vec::<Vec<i64>>::new());
        assert!(matches!(hnf(2, &[vec![1]]), Err(Error::Dimension { .. })));
    }

    #[test]
    fn membership_and_index() {
        let s = hnf(2, &[vec![1, 2]]).unwrap();
        assert!(s.contains(&[2, 4]).unwrap());
        assert!(!s.contains(&[1, 3]).unwrap());
        let t = hnf(2, &[vec![2, 0], vec![0, 3]]).unwrap();
        assert!(!t.contains(&[1, 0]).unwrap());
        assert!(t.contains(&[0, 0]).unwrap());
        assert!(matches!(t.contains(&[0]), Err(Error::Dimension { .. })));
        assert_eq!(t.index().unwrap(), Index::Finite(6));
        assert_eq!(LatticeSubgroup::full(2).index().unwrap(), Index::Finite(1));
        assert_eq!(s.index().unwrap(), Index::Infinite);
    }

    #[test]
    fn enumeration_order() {
        let first: Vec<_> = FiniteIndexEnumerator::new(2).take(6).map(|s| rows(&s)).collect();
        assert_eq!(first[0], vec![vec![1, 0], vec![0, 1]]);
        let target = vec![vec![2, 0], vec![0, 1]];
        assert_eq!(first.iter().position(|r| *r == target), Some(3));
        let mut seen = HashSet::new();
        for s in FiniteIndexEnumerator::new(2).take(200) {
            assert!(matches!(s.index().unwrap(), Index::Finite(_)));
            assert_eq!(hnf(2, s.rows()).unwrap(), s);
            assert!(seen.insert(s));
        }
        let mut seen = HashSet::new();
        for s in FiniteIndexEnumerator::new(3).take(200) {
            assert!(seen.insert(s));
        }
    }

    /// Layer sizes: sublattices of ℤ² with largest HNF entry m.
    #[test]
    fn every_small_index_subgroup_appears() {
        // The number of index-d subgroups of ℤ² is σ(d), the divisor sum.
        let sigma = |d: usize| (1..=d).filter(|k| d % k == 0).sum::<usize>();
        let mut counts = [0usize; 7];
        for s in FiniteIndexEnumerator::new(2).take(400) {
            if let Index::Finite(d) = s.index().unwrap() {
                if d < 7 {
                    counts[d] += 1;
                }
            }
        }
        for d in 1..7 {
            assert_eq!(counts[d], sigma(d), "index {d}");
        }
    }

    #[test]
    fn peripheral_words() {
        let al = Alphabet::new(["a", "b"]).unwrap();
        let w = al.parse_word("b*a*b").unwrap();
        assert_eq!(word_to_vector(2, &w).unwrap(), vec![1, 2]);
        assert_eq!(al.format_word(&vector_to_word(&[-1, 2])), "a^-1*b*b");
        assert!(word_to_vector(1, &w).is_err());
        let g = Alphabet::new(["a", "b", "t"]).unwrap();
        let p = Peripheral::new("P", al.clone(), vec![g.parse_word("a").unwrap(), g.parse_word("b").unwrap()]).unwrap();
        let ps = PeripheralStructure { peripherals: vec![p.clone()] };
        ps.validate(&g).unwrap();
        assert_eq!(g.format_word(&p.embed(&[2, -1])), "a*a*b^-1");
        let bad = Peripheral::new("P", al, vec![g.parse_word("b").unwrap(), g.parse_word("a").unwrap()]).unwrap();
        assert!(PeripheralStructure { peripherals: vec![bad] }.validate(&g).is_err());
    }

    /// Count cosets of a full-rank lattice by closing {0} under the unit
    /// steps, reducing each vector into a box of side `det` (which the
    /// lattice contains: det·eᵢ ∈ L), then identifying by membership of
    /// differences.
    fn coset_count(s: &LatticeSubgroup) -> usize {
        let n = s.ambient_rank();
        let det: i64 = (0..n).map(|i| s.rows()[i][i]).product();
        let mut reps: Vec<Vec<i64>> = vec![vec![0; n]];
        let mut i = 0;
        while i < reps.len() {
            for g in 0..n {
                let mut v = reps[i].clone();
                v[g] = (v[g] + 1).rem_euclid(det);
                let diff_in = |r: &Vec<i64>| {
                    let d: Vec<i64> = r.iter().zip(&v).map(|(a, b)| a - b).collect();
                    s.contains(&d).unwrap()
                };
                if !reps.iter().any(diff_in) {
                    reps.push(v);
                }
            }
            i += 1;
        }
        reps.len()
    }

    fn brute_member(gens: &[Vec<i64>], v: &[i64]) -> bool {
        let n = v.len();
        let k = gens.len();
        let mut coeffs = vec![-10i64; k];
        loop {
            let sum: Vec<i64> = (0..n).map(|j| (0..k).map(|i| coeffs[i] * gens[i][j]).sum()).collect();
            if sum == v {
                return true;
            }
            let mut i = 0;
            while i < k {
                coeffs[i] += 1;
                if coeffs[i] <= 10 {
                    break;
                }
                coeffs[i] = -10;
                i += 1;
            }
            if i == k {
                return false;
            }
        }
    }

    fn unimodular_mix(gens: &[Vec<i64>], ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
        let mut g = gens.to_vec();
        let k = g.len();
        for &(i, j, c) in ops {
            let (i, j) = (i % k, j % k);
            if i != j {
                let src = g[j].clone();
                for (x, y) in g[i].iter_mut().zip(&src) {
                    *x += c * y;
                }
            } else {
                g.swap(0, i);
                for x in g[0].iter_mut() {
                    *x = -*x;
                }
            }
        }
        g
    }

    proptest! {
        #[test]
        fn hnf_is_canonical(
            gens in proptest::collection::vec(proptest::collection::vec(-6i64..=6, 3), 1..4),
            ops in proptest::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
        ) {
            let a = hnf(3, &gens).unwrap();
            let mixed = unimodular_mix(&gens, &ops);
            prop_assert_eq!(&hnf(3, &mixed).unwrap(), &a);
            prop_assert_eq!(&hnf(3, a.rows()).unwrap(), &a);
            for g in &gens {
                prop_assert!(a.contains(g).unwrap());
            }
        }

        // Entry ranges keep the Cramer's-rule coefficients inside [-10, 10],
        // so the bounded search is complete on these instances.
        #[test]
        fn membership_matches_brute_force_2d(
            gens in proptest::collection::vec(proptest::collection::vec(-2i64..=2, 2), 1..3),
            v in proptest::collection::vec(-2i64..=2, 2),
        ) {
            let s = hnf(2, &gens).unwrap();
            prop_assert_eq!(s.contains(&v).unwrap(), brute_member(&gens, &v));
        }

        #[test]
        fn membership_matches_brute_force_3d(
            gens in proptest::collection::vec(proptest::collection::vec(-1i64..=1, 3), 1..4),
            v in proptest::collection::vec(-1i64..=1, 3),
        ) {
            let s = hnf(3, &gens).unwrap();
            prop_assert_eq!(s.contains(&v).unwrap(), brute_member(&gens, &v));
        }

        #[test]
        fn small_combinations_are_members(
            gens in proptest::collection::vec(proptest::collection::vec(-9i64..=9, 3), 1..4),
            coeffs in proptest::collection::vec(-10i64..=10, 3),
        ) {
            let v: Vec<i64> = (0..3).map(|j| gens.iter().zip(&coeffs).map(|(g, c)| c * g[j]).sum()).collect();
            prop_assert!(hnf(3, &gens).unwrap().contains(&v).unwrap());
        }

        #[test]
        fn index_is_coset_count(
            a in 1i64..=5, b in 0i64..5, d in 1i64..=4,
        ) {
            let s = hnf(2, &[vec![a, b], vec![0, d]]).unwrap();
            prop_assume!(a * d <= 20);
            prop_assert_eq!(s.index().unwrap(), Index::Finite(coset_count(&s)));
        }
    }
}

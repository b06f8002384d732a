//! Membership in relatively quasi-convex subgroups of relatively hyperbolic
//! groups with free abelian peripherals: the completion procedure looks for
//! a proof of membership while augmented subgroups `H₁ ⊇ H` are searched for
//! one whose relative Stallings graph certifies and rejects the element.

use std::collections::VecDeque;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::autostruct::AutomaticStructure;
use crate::completion::CompletionState;
use crate::error::{Error, Result};
use crate::lattice::{finite_index_test, vector_to_word, LatticeSubgroup, PeripheralStructure};
use crate::lstallings::{LStallingsGraph, LStallingsRun};
use crate::stallings::{GraphJson, Index, StallingsGraph};
use crate::words::{reduced_words_of_length, relator_closure, Alphabet, Letter, Presentation, ReducedWords, Word};

/// Schedule steps used when the caller has no budget in mind.
pub const DEFAULT_BUDGET: usize = 60;

/// Bounds on the words of `F(A)` tried when translating a letter of `X∖A`.
pub const U_X_MAX_LENGTH: usize = 16;
pub const U_X_SEARCH_LIMIT: usize = 20_000;

/// A group `⟨A | R⟩`, its peripheral subgroups and an automatic structure
/// over an alphabet `X` containing `A` and every peripheral letter.
#[derive(Clone, Debug)]
pub struct RelHypInstance {
    presentation: Presentation,
    peripherals: PeripheralStructure,
    structure: Arc<AutomaticStructure>,
    a_to_x: Vec<usize>,
    peripheral_to_x: Vec<Vec<usize>>,
    x_translation: Vec<(usize, Word)>,
}

impl RelHypInstance {
    pub fn new(
        presentation: Presentation,
        peripherals: PeripheralStructure,
        structure: Arc<AutomaticStructure>,
    ) -> Result<Self> {
        let a = presentation.alphabet();
        let x = structure.alphabet();
        peripherals.validate(a)?;
        let lookup = |name: &str| {
            x.index_of(name)
                .ok_or_else(|| Error::AlphabetMismatch(format!("letter {name} missing from the structure's alphabet")))
        };
        let a_to_x = a.names().iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()?;
        let peripheral_to_x = peripherals
            .peripherals
            .iter()
            .map(|p| p.alphabet.names().iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut x_translation = Vec::new();
        for g in 0..x.len() {
            if !a_to_x.contains(&g) {
                x_translation.push((g, find_u_x(&structure, &a_to_x, g)?));
            }
        }
        for (p, map) in peripherals.peripherals.iter().zip(&peripheral_to_x) {
            for (i, &g) in map.iter().enumerate() {
                let w = Word::letter(Letter::new(g, false)).mul(&p.embedding[i].map_generators(&a_to_x).inverse());
                if !structure.word_problem(&w)? {
                    return Err(Error::StructureInvalid(format!(
                        "peripheral letter {} differs from its embedding",
                        p.alphabet.name(i)
                    )));
                }
            }
        }
        Ok(RelHypInstance { presentation, peripherals, structure, a_to_x, peripheral_to_x, x_translation })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn peripherals(&self) -> &PeripheralStructure {
        &self.peripherals
    }

    pub fn structure(&self) -> &Arc<AutomaticStructure> {
        &self.structure
    }

    /// `(x, u_x)` for every letter `x ∈ X∖A`, with `u_x` over `A`.
    pub fn x_translation(&self) -> &[(usize, Word)] {
        &self.x_translation
    }

    /// Rewrites a word over `A` into the structure's alphabet.
    pub fn to_x(&self, w: &Word) -> Word {
        w.map_generators(&self.a_to_x)
    }

    /// `R`, the relators `x·u_x⁻¹`, closed under rotation and inversion.
    pub fn build_r_x(&self) -> Presentation {
        let mut relators: Vec<Word> = self.presentation.relators().iter().map(|r| self.to_x(r)).collect();
        for (x, u) in &self.x_translation {
            relators.push(Word::letter(Letter::new(*x, false)).mul(&self.to_x(u).inverse()));
        }
        let p = Presentation::new(self.structure.alphabet().clone(), relators).expect("words over X");
        relator_closure(&p)
    }

    /// The relators over `A` used by the completion side: `R` plus the
    /// commutators of each peripheral's embedded generators.
    pub fn positive_presentation(&self) -> Presentation {
        let mut relators = self.presentation.relators().to_vec();
        for p in &self.peripherals.peripherals {
            for i in 0..p.embedding.len() {
                for j in i + 1..p.embedding.len() {
                    let (u, v) = (&p.embedding[i], &p.embedding[j]);
                    relators.push(u.mul(v).mul(&u.inverse()).mul(&v.inverse()));
                }
            }
        }
        Presentation::new(self.presentation.alphabet().clone(), relators).expect("words over A")
    }

    /// The lattices chosen by a candidate, by tuple index.
    pub fn resolve(&self, c: &CandidateAugmentation) -> Vec<Part> {
        c.components
            .iter()
            .map(|comp| Part {
                conjugator: comp.conjugator.clone(),
                peripheral: comp.peripheral,
                lattice: crate::lattice::enumerate_finite_index(
                    self.peripherals.peripherals[comp.peripheral].rank(),
                    comp.tuple_index,
                ),
            })
            .collect()
    }

    /// Generators over `X` of `H₁ = ⟨H, g_i^{x_i}⟩` with `g^x = x⁻¹gx`.
    pub fn augment(&self, generators: &[Word], c: &CandidateAugmentation) -> Vec<Word> {
        self.augment_parts(generators, &self.resolve(c))
    }

    pub fn augment_parts(&self, generators: &[Word], parts: &[Part]) -> Vec<Word> {
        let mut out: Vec<Word> = generators.iter().map(|h| self.to_x(h)).collect();
        for part in parts {
            let x = self.to_x(&part.conjugator);
            let map = &self.peripheral_to_x[part.peripheral];
            for row in part.lattice.rows() {
                out.push(vector_to_word(row).map_generators(map).conjugate_by(&x));
            }
        }
        out
    }

    pub fn candidates(&self) -> CandidateEnumerator {
        CandidateEnumerator::new(self.presentation.alphabet().len(), self.peripherals.peripherals.len())
    }
}

/// ShortLex-least `u ∈ F(A)` equal to the letter `x` of the structure.
pub fn find_u_x(structure: &AutomaticStructure, a_to_x: &[usize], x: usize) -> Result<Word> {
    let letter = Word::letter(Letter::new(x, false));
    for u in ReducedWords::new(a_to_x.len()).take_while(|u| u.len() <= U_X_MAX_LENGTH).take(U_X_SEARCH_LIMIT) {
        if structure.word_problem(&letter.mul(&u.map_generators(a_to_x).inverse()))? {
            return Ok(u);
        }
    }
    Err(Error::StructureInvalid(format!(
        "no word over the group's generators equals {} within the search bounds",
        structure.alphabet().name(x)
    )))
}

/// One conjugated finite-index subgroup of a peripheral.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Component {
    /// Over `A`.
    pub conjugator: Word,
    pub peripheral: usize,
    /// Position in [`crate::lattice::FiniteIndexEnumerator`] order.
    pub tuple_index: usize,
}

impl Component {
    fn size(&self) -> usize {
        1 + self.conjugator.len() + self.peripheral + self.tuple_index
    }
}

/// The conjugated peripheral subgroups added to `H`; no components means `H₁ = H`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateAugmentation {
    pub components: Vec<Component>,
}

impl CandidateAugmentation {
    pub fn ell(&self) -> usize {
        self.components.len()
    }
}

/// A component with its lattice spelled out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub conjugator: Word,
    pub peripheral: usize,
    pub lattice: LatticeSubgroup,
}

/// Enumerates candidates by total size, the sum over components of
/// `1 + |x_i| + P_i + tuple index`; within a size by `ℓ`, then by the
/// component list. Components within a candidate are strictly increasing.
#[derive(Clone, Debug)]
pub struct CandidateEnumerator {
    num_generators: usize,
    num_peripherals: usize,
    size: usize,
    buffer: VecDeque<CandidateAugmentation>,
}

impl CandidateEnumerator {
    pub fn new(num_generators: usize, num_peripherals: usize) -> Self {
        CandidateEnumerator {
            num_generators,
            num_peripherals,
            size: 0,
            buffer: VecDeque::from([CandidateAugmentation::default()]),
        }
    }

    fn components_up_to(&self, size: usize) -> Vec<Component> {
        let mut out = Vec::new();
        for len in 0..size {
            let words = reduced_words_of_length(self.num_generators, len);
            for p in 0..self.num_peripherals {
                for k in 0..size.saturating_sub(len + p) {
                    for x in &words {
                        out.push(Component { conjugator: x.clone(), peripheral: p, tuple_index: k });
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn fill(&mut self) {
        if self.num_peripherals == 0 {
            return;
        }
        while self.buffer.is_empty() {
            self.size += 1;
            let comps = self.components_up_to(self.size);
            let mut layer = Vec::new();
            let mut chosen = Vec::new();
            choose(&comps, 0, self.size, &mut chosen, &mut layer);
            layer.sort_by(|a: &CandidateAugmentation, b| a.ell().cmp(&b.ell()).then_with(|| a.cmp(b)));
            self.buffer.extend(layer);
        }
    }
}

fn choose(
    comps: &[Component],
    start: usize,
    remaining: usize,
    chosen: &mut Vec<Component>,
    out: &mut Vec<CandidateAugmentation>,
) {
    if remaining == 0 {
        out.push(CandidateAugmentation { components: chosen.clone() });
        return;
    }
    for i in start..comps.len() {
        let s = comps[i].size();
        if s <= remaining {
            chosen.push(comps[i].clone());
            choose(comps, i + 1, remaining - s, chosen, out);
            chosen.pop();
        }
    }
}

impl Iterator for CandidateEnumerator {
    type Item = CandidateAugmentation;
    fn next(&mut self) -> Option<CandidateAugmentation> {
        self.fill();
        self.buffer.pop_front()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Each step runs one completion round, admits the next candidate and
    /// advances every live candidate once.
    #[default]
    Diag,
    /// Steps alternate between a completion round and one iteration of one
    /// candidate, candidates visited along anti-diagonals.
    Alt,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Spent {
    pub steps: usize,
    pub completion_rounds: usize,
    pub candidates_admitted: usize,
    pub lstallings_iterations: usize,
    /// Candidates that certified but contained the element.
    pub discarded: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct NonMemberCertificate {
    pub candidate_index: usize,
    pub candidate: CandidateAugmentation,
    /// Generators of `H₁` over `X`.
    pub generators: Vec<Word>,
    pub graph: LStallingsGraph,
}

#[derive(Clone, Debug)]
pub enum MembershipVerdict {
    Member { spent: Spent },
    NonMember { certificate: Box<NonMemberCertificate>, spent: Spent },
    BudgetExhausted { spent: Spent },
}

impl MembershipVerdict {
    pub fn spent(&self) -> &Spent {
        match self {
            MembershipVerdict::Member { spent }
            | MembershipVerdict::NonMember { spent, .. }
            | MembershipVerdict::BudgetExhausted { spent } => spent,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MembershipVerdict::Member { .. } => "member",
            MembershipVerdict::NonMember { .. } => "non_member",
            MembershipVerdict::BudgetExhausted { .. } => "budget_exhausted",
        }
    }
}

struct Live {
    index: usize,
    candidate: CandidateAugmentation,
    generators: Vec<Word>,
    run: LStallingsRun,
}

struct Search<'a> {
    instance: &'a RelHypInstance,
    generators: &'a [Word],
    g_x: Word,
    positive: CompletionState,
    candidates: CandidateEnumerator,
    live: Vec<Live>,
    spent: Spent,
}

impl Search<'_> {
    /// Checks the target, then runs one round if it is not yet read.
    fn positive_unit(&mut self) -> bool {
        if self.positive.check_target() {
            return true;
        }
        self.positive.step();
        self.spent.completion_rounds += 1;
        self.positive.check_target()
    }

    fn admit(&mut self) -> Result<()> {
        if let Some(candidate) = self.candidates.next() {
            let index = self.spent.candidates_admitted;
            self.spent.candidates_admitted += 1;
            let generators = self.instance.augment(self.generators, &candidate);
            let run = LStallingsRun::new(self.instance.structure.clone(), &generators)?;
            self.live.push(Live { index, candidate, generators, run });
        }
        Ok(())
    }

    /// Advances live candidate `i` once. Returns a certificate if it
    /// certified without the element.
    fn advance(&mut self, i: usize) -> Result<Option<NonMemberCertificate>> {
        self.spent.lstallings_iterations += 1;
        let live = &mut self.live[i];
        let Some(graph) = live.run.step()? else { return Ok(None) };
        if graph.membership(&self.g_x)? {
            self.spent.discarded.push(live.index);
            return Ok(None);
        }
        Ok(Some(NonMemberCertificate {
            candidate_index: live.index,
            candidate: live.candidate.clone(),
            generators: live.generators.clone(),
            graph: graph.clone(),
        }))
    }

    fn prune(&mut self) {
        self.live.retain(|l| l.run.result().is_none());
    }
}

fn contradiction(spent: &Spent, cert: &NonMemberCertificate) -> ! {
    panic!(
        "internal soundness failure: both procedures halted with opposite verdicts \
         (spent {spent:?}, candidate #{} {:?})",
        cert.candidate_index, cert.candidate
    )
}

/// Decides `g ∈ H = ⟨generators⟩`; words are over `A`. `budget` counts
/// schedule steps.
///
/// # Panics
/// If both sides halt in the same step with opposite answers.
pub fn decide_membership(
    instance: &RelHypInstance,
    generators: &[Word],
    g: &Word,
    schedule: Schedule,
    budget: usize,
) -> Result<MembershipVerdict> {
    let a = instance.presentation.alphabet();
    for h in generators {
        a.check_word(h)?;
    }
    a.check_word(g)?;
    let positive = CompletionState::new(instance.positive_presentation(), generators, g.clone())?;
    let mut s = Search {
        instance,
        generators,
        g_x: instance.to_x(g),
        positive,
        candidates: instance.candidates(),
        live: Vec::new(),
        spent: Spent::default(),
    };
    // Anti-diagonal cursor for the alternating schedule: live run `i` on diagonal `d`.
    let (mut diag, mut pos) = (0usize, 0usize);
    while s.spent.steps < budget {
        s.spent.steps += 1;
        match schedule {
            Schedule::Diag => {
                let member = s.positive_unit();
                s.admit()?;
                let mut found = None;
                for i in 0..s.live.len() {
                    if let Some(c) = s.advance(i)? {
                        found.get_or_insert(c);
                    }
                }
                s.prune();
                match (member, found) {
                    (true, Some(c)) => contradiction(&s.spent, &c),
                    (true, None) => return Ok(MembershipVerdict::Member { spent: s.spent }),
                    (false, Some(c)) => {
                        return Ok(MembershipVerdict::NonMember { certificate: Box::new(c), spent: s.spent })
                    }
                    (false, None) => {}
                }
            }
            Schedule::Alt => {
                if s.spent.steps % 2 == 1 {
                    if s.positive_unit() {
                        return Ok(MembershipVerdict::Member { spent: s.spent });
                    }
                    continue;
                }
                // Cell (pos, diag - pos): candidate `pos` gets one more iteration.
                if pos == s.spent.candidates_admitted {
                    s.admit()?;
                }
                let target = s.live.iter().position(|l| l.index == pos);
                pos += 1;
                if pos > diag {
                    diag += 1;
                    pos = 0;
                }
                if let Some(i) = target {
                    if let Some(c) = s.advance(i)? {
                        return Ok(MembershipVerdict::NonMember { certificate: Box::new(c), spent: s.spent });
                    }
                    s.prune();
                }
            }
        }
    }
    Ok(MembershipVerdict::BudgetExhausted { spent: s.spent })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    pub conjugator: String,
    pub peripheral: String,
    pub tuple_index: usize,
    pub basis: Vec<Vec<i64>>,
}

/// A non-membership certificate as written to disk.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub subgroup: Vec<String>,
    pub element: String,
    pub candidate_index: usize,
    pub components: Vec<ComponentJson>,
    pub augmented_generators: Vec<String>,
    pub graph: GraphJson,
}

impl NonMemberCertificate {
    pub fn to_json(&self, instance: &RelHypInstance, generators: &[Word], g: &Word) -> CertificateJson {
        let a = instance.presentation.alphabet();
        let x = instance.structure.alphabet();
        CertificateJson {
            subgroup: generators.iter().map(|h| a.format_word(h)).collect(),
            element: a.format_word(g),
            candidate_index: self.candidate_index,
            components: instance
                .resolve(&self.candidate)
                .into_iter()
                .zip(&self.candidate.components)
                .map(|(part, comp)| ComponentJson {
                    conjugator: a.format_word(&part.conjugator),
                    peripheral: instance.peripherals.peripherals[part.peripheral].name.clone(),
                    tuple_index: comp.tuple_index,
                    basis: part.lattice.rows().to_vec(),
                })
                .collect(),
            augmented_generators: self.generators.iter().map(|w| x.format_word(w)).collect(),
            graph: self.graph.graph().to_json(),
        }
    }
}

impl CertificateJson {
    /// Re-derives `H₁` from the components and checks the graph from
    /// scratch: every lattice has finite index, the graph's loop language is
    /// closed under `H₁`, `H`'s generators read loops and the element does not.
    pub fn verify(&self, instance: &RelHypInstance) -> Result<bool> {
        let a = instance.presentation.alphabet();
        let generators = self.subgroup.iter().map(|h| a.parse_word(h)).collect::<Result<Vec<_>>>()?;
        let g = a.parse_word(&self.element)?;
        let mut parts = Vec::new();
        for c in &self.components {
            let peripheral = instance
                .peripherals
                .peripherals
                .iter()
                .position(|p| p.name == c.peripheral)
                .ok_or_else(|| Error::Malformed(format!("unknown peripheral {}", c.peripheral)))?;
            let lattice = LatticeSubgroup::new(instance.peripherals.peripherals[peripheral].rank(), &c.basis)?;
            if finite_index_test(&lattice)? == Index::Infinite {
                return Ok(false);
            }
            parts.push(Part { conjugator: a.parse_word(&c.conjugator)?, peripheral, lattice });
        }
        let h1 = instance.augment_parts(&generators, &parts);
        let graph = StallingsGraph::from_json(&self.graph, Some(instance.structure.alphabet()))?;
        let Some(certified) = LStallingsGraph::verify(instance.structure.clone(), graph, &h1)? else {
            return Ok(false);
        };
        for h in &generators {
            if !certified.membership(&instance.to_x(h))? {
                return Ok(false);
            }
        }
        Ok(!certified.membership(&instance.to_x(&g))?)
    }
}

/// Machine-readable summary of a verdict.
#[derive(Clone, Debug, Serialize)]
pub struct VerdictReport {
    pub verdict: &'static str,
    pub spent: Spent,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

impl VerdictReport {
    pub fn new(v: &MembershipVerdict, instance: &RelHypInstance, generators: &[Word], g: &Word) -> Self {
        let certificate = match v {
            MembershipVerdict::NonMember { certificate, .. } => Some(certificate.to_json(instance, generators, g)),
            _ => None,
        };
        VerdictReport { verdict: v.name(), spent: v.spent().clone(), certificate }
    }
}

/// Parses a comma-separated list of words; the empty string is no words.
pub fn parse_generators(a: &Alphabet, s: &str) -> Result<Vec<Word>> {
    a.parse_word_list(s)
}

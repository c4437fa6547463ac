//! Schreier transversals, Reidemeister–Schreier rewriting and Tietze-style
//! cleanup of subgroup presentations.

use std::collections::{HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentations::{relation_matrix, render_word, AbelianInvariants, Presentation};
use crate::quotients::CosetTable;
use crate::words::{free_reduce, Letter, Word};

/// Prefix-closed coset representatives from a breadth-first spanning tree
/// of the coset graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierTransversal {
    representatives: Vec<Word>,
    /// `tree[c][g]` is true when the edge `c --x_g--> c·x_g` is a tree edge.
    tree: Vec<Vec<bool>>,
}

impl SchreierTransversal {
    pub fn representative(&self, coset: usize) -> &Word {
        &self.representatives[coset]
    }

    pub fn representatives(&self) -> &[Word] {
        &self.representatives
    }

    pub fn is_tree_edge(&self, coset: usize, generator: usize) -> bool {
        self.tree[coset][generator]
    }
}

/// Breadth-first from coset 0, trying generators in declaration order and
/// then their inverses.
pub fn schreier_transversal(t: &CosetTable) -> SchreierTransversal {
    let n = t.count();
    let rank = t.rank();
    let mut reps: Vec<Option<Word>> = vec![None; n];
    let mut tree = vec![vec![false; rank]; n];
    reps[0] = Some(Word::identity(rank));
    let mut queue = VecDeque::from([0usize]);
    let letters: Vec<Letter> = (0..rank).map(Letter::pos).chain((0..rank).map(Letter::neg)).collect();
    while let Some(c) = queue.pop_front() {
        for &l in &letters {
            let d = t.apply(c, l);
            if reps[d].is_some() {
                continue;
            }
            let rep = reps[c].as_ref().expect("visited").concat(&Word::from_letters(vec![l], rank).expect("in range"));
            if l.is_positive() {
                tree[c][l.index()] = true;
            } else {
                tree[d][l.index()] = true;
            }
            reps[d] = Some(rep);
            queue.push_back(d);
        }
    }
    SchreierTransversal {
        representatives: reps.into_iter().map(|r| r.expect("coset tables are connected")).collect(),
        tree,
    }
}

/// Labels of the Schreier generators: non-tree edges `(coset, generator)`
/// in table order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchreierAlphabet {
    edges: Vec<(usize, usize)>,
    /// `slot[c][g]` is the generator index of edge `(c, g)` if it is not a tree edge.
    slot: Vec<Vec<Option<usize>>>,
}

impl SchreierAlphabet {
    pub fn new(t: &CosetTable, s: &SchreierTransversal) -> Self {
        let mut edges = Vec::new();
        let mut slot = vec![vec![None; t.rank()]; t.count()];
        for (c, row) in slot.iter_mut().enumerate() {
            for (g, entry) in row.iter_mut().enumerate() {
                if !s.is_tree_edge(c, g) {
                    *entry = Some(edges.len());
                    edges.push((c, g));
                }
            }
        }
        SchreierAlphabet { edges, slot }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, coset: usize, generator: usize) -> Option<usize> {
        self.slot[coset][generator]
    }

    /// "(c,x)" labels using the source generator names.
    pub fn labels(&self, names: &[String]) -> Vec<String> {
        self.edges.iter().map(|&(c, g)| format!("({c},{})", names[g])).collect()
    }
}

/// Rewrites `w` read from `start` into the Schreier generators.
pub fn rewrite_word(w: &Word, start: usize, t: &CosetTable, alphabet: &SchreierAlphabet) -> Word {
    let mut out = Vec::new();
    let mut c = start;
    for &l in w.letters() {
        let g = l.index();
        if l.is_positive() {
            if let Some(i) = alphabet.index_of(c, g) {
                out.push(Letter::pos(i));
            }
            c = t.apply(c, l);
        } else {
            let d = t.apply(c, l);
            if let Some(i) = alphabet.index_of(d, g) {
                out.push(Letter::neg(i));
            }
            c = d;
        }
    }
    free_reduce(out, alphabet.len()).expect("letters lie in the Schreier alphabet")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewriteMode {
    Full,
    PowerAware,
}

/// Which source relator and coset a subgroup relator came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorOrigin {
    pub relator: usize,
    pub coset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupPresentation {
    source: Presentation,
    index: usize,
    mode: RewriteMode,
    labels: Vec<String>,
    edges: Vec<(usize, usize)>,
    relators: Vec<Word>,
    origins: Vec<RelatorOrigin>,
    cycle_lengths: Option<Vec<usize>>,
    simplified: bool,
}

impl SubgroupPresentation {
    pub fn source(&self) -> &Presentation {
        &self.source
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn mode(&self) -> RewriteMode {
        self.mode
    }

    pub fn generator_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Source edge `(coset, generator)` of each Schreier generator.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    pub fn origins(&self) -> &[RelatorOrigin] {
        &self.origins
    }

    /// Cycle length of each source root on the cosets (power-aware mode).
    pub fn cycle_lengths(&self) -> Option<&[usize]> {
        self.cycle_lengths.as_deref()
    }

    pub fn is_simplified(&self) -> bool {
        self.simplified
    }

    /// Generators minus relators, counting every relator as emitted.
    pub fn deficiency(&self) -> i64 {
        self.labels.len() as i64 - self.relators.len() as i64
    }

    pub fn abelian_invariants(&self) -> AbelianInvariants {
        AbelianInvariants::from_relation_matrix(&relation_matrix(&self.relators, self.labels.len()))
    }

    pub fn render_relator(&self, i: usize) -> String {
        render_word(&self.relators[i], &self.labels)
    }

    pub fn to_json(&self) -> SubgroupPresentationJson {
        SubgroupPresentationJson {
            generators: self.labels.clone(),
            relators: (0..self.relators.len()).map(|i| self.render_relator(i)).collect(),
            provenance: ProvenanceJson {
                mode: self.mode,
                index: self.index,
                source_generators: self.source.rank(),
                source_relators: self.source.relators().len(),
                cycle_lengths: self.cycle_lengths.clone(),
                origins: self.origins.clone(),
                simplified: self.simplified,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubgroupPresentationJson {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub provenance: ProvenanceJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProvenanceJson {
    pub mode: RewriteMode,
    pub index: usize,
    pub source_generators: usize,
    pub source_relators: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cycle_lengths: Option<Vec<usize>>,
    pub origins: Vec<RelatorOrigin>,
    pub simplified: bool,
}

fn check_table(p: &Presentation, t: &CosetTable) -> Result<()> {
    if t.rank() != p.rank() {
        return Err(Error::RankMismatch {
            expected: p.rank(),
            found: t.rank(),
        });
    }
    Ok(())
}

fn assemble(
    p: &Presentation,
    t: &CosetTable,
    alphabet: &SchreierAlphabet,
    mode: RewriteMode,
    jobs: Vec<(usize, usize)>,
    cycle_lengths: Option<Vec<usize>>,
) -> SubgroupPresentation {
    let words = p.full_relators();
    let relators = jobs.iter().map(|&(i, c)| rewrite_word(&words[i], c, t, alphabet)).collect();
    SubgroupPresentation {
        source: p.clone(),
        index: t.index(),
        mode,
        labels: alphabet.labels(p.generator_names()),
        edges: alphabet.edges().to_vec(),
        relators,
        origins: jobs.into_iter().map(|(relator, coset)| RelatorOrigin { relator, coset }).collect(),
        cycle_lengths,
        simplified: false,
    }
}

/// Rewrites every relator at every coset.
pub fn reidemeister_schreier_full(p: &Presentation, t: &CosetTable) -> Result<SubgroupPresentation> {
    check_table(p, t)?;
    let s = schreier_transversal(t);
    let alphabet = SchreierAlphabet::new(t, &s);
    let jobs = (0..p.relators().len()).flat_map(|i| (0..t.count()).map(move |c| (i, c))).collect();
    Ok(assemble(p, t, &alphabet, RewriteMode::Full, jobs, None))
}

/// Cycle decomposition of each root's action, with the regularity check.
fn root_cycles(p: &Presentation, t: &CosetTable) -> Result<Vec<Vec<Vec<usize>>>> {
    p.relators()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let cycles = t.word_cycles(r.root());
            let k = cycles[0].len();
            if cycles.iter().any(|c| c.len() != k) {
                let mut lengths: Vec<usize> = cycles.iter().map(Vec::len).collect();
                lengths.sort_unstable();
                lengths.dedup();
                return Err(Error::RegularityViolation { relator: i, lengths });
            }
            Ok(cycles)
        })
        .collect()
}

/// Rewrites each relator `root^m` only at the least coset of every cycle of
/// `root` on the cosets. Requires all cycles of each root to have equal
/// length.
pub fn reidemeister_schreier_power_aware(p: &Presentation, t: &CosetTable) -> Result<SubgroupPresentation> {
    check_table(p, t)?;
    let cycles = root_cycles(p, t)?;
    let s = schreier_transversal(t);
    let alphabet = SchreierAlphabet::new(t, &s);
    let lengths = cycles.iter().map(|c| c[0].len()).collect();
    let jobs = cycles
        .iter()
        .enumerate()
        .flat_map(|(i, cs)| cs.iter().map(move |c| (i, c[0])))
        .collect();
    Ok(assemble(p, t, &alphabet, RewriteMode::PowerAware, jobs, Some(lengths)))
}

/// Evidence that the conjugate of a relator at an omitted coset follows
/// from the one kept for its cycle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugateDecomposition {
    pub relator: usize,
    pub coset: usize,
    /// Kept coset of the same cycle.
    pub representative: usize,
    /// `representative · root^l = coset`.
    pub l: usize,
    /// `rep(coset) · root^-l · rep(representative)^-1`, an element of the subgroup.
    pub h: Word,
    pub verified: bool,
}

/// Recomputes the decomposition of the conjugate of relator `i` at `coset`
/// and checks it by free reduction.
pub fn verify_conjugate_decomposition(
    p: &Presentation,
    t: &CosetTable,
    s: &SchreierTransversal,
    i: usize,
    coset: usize,
) -> Result<ConjugateDecomposition> {
    check_table(p, t)?;
    let rel = p
        .relators()
        .get(i)
        .ok_or_else(|| Error::MalformedInput(format!("no relator {i}")))?;
    if coset >= t.count() {
        return Err(Error::MalformedInput(format!("no coset {coset}")));
    }
    let root = rel.root();
    let cycle = t
        .word_cycles(root)
        .into_iter()
        .find(|c| c.contains(&coset))
        .ok_or_else(|| Error::Internal(format!("coset {coset} lies on no cycle")))?;
    let rep_coset = cycle[0];
    let l = cycle.iter().position(|&c| c == coset).expect("found above");
    let rep_s = s.representative(coset);
    let rep_t = s.representative(rep_coset);
    let h = rep_s.concat(&root.pow(-(l as i64))).concat(&rep_t.inverse());
    let r = rel.full_word();
    let lhs = r.conjugate_by(rep_s);
    let rhs = r.conjugate_by(rep_t).conjugate_by(&h);
    let verified = lhs == rhs && t.trace(0, &h) == 0;
    Ok(ConjugateDecomposition {
        relator: i,
        coset,
        representative: rep_coset,
        l,
        h,
        verified,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TietzeOptions {
    /// Drop each generator that appears alone as a relator, deleting it
    /// everywhere else.
    pub eliminate_trivial_generators: bool,
}

/// Removes empty relators, cyclically reduces, drops duplicates up to
/// rotation and inversion, and optionally eliminates generators killed by
/// a length-one relator.
pub fn tietze_simplify(q: &SubgroupPresentation, opts: TietzeOptions) -> SubgroupPresentation {
    let mut labels = q.labels.clone();
    let mut edges = q.edges.clone();
    let mut relators: Vec<(Word, RelatorOrigin)> = q.relators.iter().cloned().zip(q.origins.iter().copied()).collect();
    loop {
        relators = dedupe(relators);
        if !opts.eliminate_trivial_generators {
            break;
        }
        let Some(g) = relators.iter().find(|(w, _)| w.len() == 1).map(|(w, _)| w.letters()[0].index()) else {
            break;
        };
        let rank = labels.len() - 1;
        let shift = |l: Letter| {
            let i = if l.index() > g { l.index() - 1 } else { l.index() };
            if l.is_positive() {
                Letter::pos(i)
            } else {
                Letter::neg(i)
            }
        };
        relators = relators
            .into_iter()
            .map(|(w, o)| {
                let kept = w.letters().iter().copied().filter(|l| l.index() != g).map(shift);
                (free_reduce(kept, rank).expect("indices shifted into range"), o)
            })
            .collect();
        labels.remove(g);
        edges.remove(g);
    }
    let (relators, origins) = relators.into_iter().unzip();
    SubgroupPresentation {
        source: q.source.clone(),
        index: q.index,
        mode: q.mode,
        labels,
        edges,
        relators,
        origins,
        cycle_lengths: q.cycle_lengths.clone(),
        simplified: true,
    }
}

fn dedupe(relators: Vec<(Word, RelatorOrigin)>) -> Vec<(Word, RelatorOrigin)> {
    let mut seen = HashSet::new();
    relators
        .into_iter()
        .filter_map(|(w, o)| {
            let core = w.cyclic_reduce().1;
            if core.is_empty() || !seen.insert(core.cyclic_canonical()) {
                None
            } else {
                Some((core, o))
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotients::{regular_coset_table, QuotientWitness, SubgroupTag};
    use crate::quotients::Permutation;

    fn pres(t: &str) -> Presentation {
        Presentation::parse(t).unwrap()
    }

    fn cyclic_table(k: usize, rank: usize) -> CosetTable {
        let mut fwd = vec![(0..k).map(|c| (c + 1) % k).collect::<Vec<_>>()];
        fwd.extend((1..rank).map(|_| (0..k).collect::<Vec<_>>()));
        CosetTable::from_forward(k, fwd, SubgroupTag::KernelOfWitness).unwrap()
    }

    #[test]
    fn transversals_of_small_tables() {
        let s = schreier_transversal(&cyclic_table(2, 1));
        assert_eq!(s.representatives().iter().map(Word::to_compact).collect::<Vec<_>>(), ["", "a"]);
        let s = schreier_transversal(&cyclic_table(3, 1));
        assert_eq!(s.representatives().iter().map(Word::to_compact).collect::<Vec<_>>(), ["", "a", "A"]);
    }

    #[test]
    fn rewriting_a_squared_on_two_cosets() {
        let t = cyclic_table(2, 1);
        let s = schreier_transversal(&t);
        let alpha = SchreierAlphabet::new(&t, &s);
        assert_eq!(alpha.edges(), &[(1, 0)]);
        let w = Word::parse_compact("aa", 1).unwrap();
        assert_eq!(rewrite_word(&w, 0, &t, &alpha).to_compact(), "a");
        assert_eq!(rewrite_word(&w, 1, &t, &alpha).to_compact(), "a");
        assert_eq!(rewrite_word(&Word::parse_compact("AA", 1).unwrap(), 0, &t, &alpha).to_compact(), "A");
        assert!(rewrite_word(s.representative(1), 0, &t, &alpha).is_empty());
    }

    #[test]
    fn free_group_index_two() {
        let p = pres("< a, b | >");
        let q = reidemeister_schreier_full(&p, &cyclic_table(2, 2)).unwrap();
        assert_eq!((q.generator_count(), q.relators().len(), q.deficiency()), (3, 0, 3));
        assert_eq!(q.labels(), ["(0,b)", "(1,a)", "(1,b)"]);
        assert_eq!(reidemeister_schreier_power_aware(&p, &cyclic_table(2, 2)).unwrap().relators().len(), 0);
    }

    #[test]
    fn order_two_cyclic_group() {
        let p = pres("< a | a^2 >");
        let t = cyclic_table(2, 1);
        let full = reidemeister_schreier_full(&p, &t).unwrap();
        assert_eq!((full.generator_count(), full.relators().len()), (1, 2));
        let pa = reidemeister_schreier_power_aware(&p, &t).unwrap();
        assert_eq!((pa.generator_count(), pa.relators().len(), pa.deficiency()), (1, 1, 0));
        let simp = tietze_simplify(&full, TietzeOptions::default());
        assert_eq!((simp.generator_count(), simp.relators().len()), (1, 1));
        let elim = tietze_simplify(&full, TietzeOptions { eliminate_trivial_generators: true });
        assert_eq!((elim.generator_count(), elim.relators().len()), (0, 0));
    }

    #[test]
    fn simplification_examples() {
        let p = pres("< a | a^2 >");
        let mut q = reidemeister_schreier_full(&p, &cyclic_table(2, 1)).unwrap();
        // relators {ε, s, s^-1}
        let one = Word::identity(1);
        let s = Word::parse_compact("a", 1).unwrap();
        q.relators = vec![one, s.clone(), s.inverse()];
        q.origins = vec![RelatorOrigin { relator: 0, coset: 0 }; 3];
        let simp = tietze_simplify(&q, TietzeOptions::default());
        assert_eq!(simp.relators(), &[s]);

        let mut q2 = reidemeister_schreier_full(&pres("< a, b | >"), &cyclic_table(2, 2)).unwrap();
        q2.relators = vec![Word::parse_compact("ab", 3).unwrap(), Word::parse_compact("ba", 3).unwrap()];
        q2.origins = vec![RelatorOrigin { relator: 0, coset: 0 }; 2];
        assert_eq!(tietze_simplify(&q2, TietzeOptions::default()).relators().len(), 1);
    }

    #[test]
    fn non_regular_tables_are_rejected() {
        let p = pres("< a | a^2 >");
        let t = CosetTable::from_forward(3, vec![vec![1, 0, 2]], SubgroupTag::ToddCoxeter).unwrap();
        assert_eq!(
            reidemeister_schreier_power_aware(&p, &t),
            Err(Error::RegularityViolation { relator: 0, lengths: vec![1, 2] })
        );
    }

    #[test]
    fn order_four_with_c2_witness() {
        let p = pres("< a | a^4 >");
        let w = QuotientWitness::new(2, vec![Permutation::from_images(vec![1, 0]).unwrap()]).unwrap();
        let t = regular_coset_table(&w, 100).unwrap();
        let s = schreier_transversal(&t);
        let d = verify_conjugate_decomposition(&p, &t, &s, 0, 1).unwrap();
        assert_eq!((d.representative, d.l, d.verified), (0, 1, true));
        assert!(d.h.is_empty());
        let pa = reidemeister_schreier_power_aware(&p, &t).unwrap();
        let full = reidemeister_schreier_full(&p, &t).unwrap();
        assert_eq!(pa.relators().len(), 1);
        assert_eq!(pa.abelian_invariants(), full.abelian_invariants());
    }

    #[test]
    fn json_labels() {
        let p = pres("< a | a^2 >");
        let q = reidemeister_schreier_power_aware(&p, &cyclic_table(2, 1)).unwrap();
        let j = serde_json::to_value(q.to_json()).unwrap();
        assert_eq!(j["generators"], serde_json::json!(["(1,a)"]));
        assert_eq!(j["relators"], serde_json::json!(["(1,a)"]));
        assert_eq!(j["provenance"]["mode"], "power-aware");
        assert_eq!(j["provenance"]["cycle_lengths"], serde_json::json!([2]));
    }
}

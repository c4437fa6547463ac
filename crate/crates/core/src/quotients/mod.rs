//! Finite quotients given by permutation images of the generators, and
//! coset tables built from them or by coset enumeration.

mod perm;
mod search;
mod table;
mod todd_coxeter;

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

pub use perm::Permutation;
pub use search::{
    class_representatives, search_witness, Family, SearchBudget, SearchMode, SearchParams, Targets,
};
pub use table::{CosetTable, CosetTableJson, SubgroupTag};
pub use todd_coxeter::todd_coxeter;

use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::words::Word;

pub const DEFAULT_MAX_IMAGE: usize = 200_000;
pub const DEFAULT_MAX_COSETS: usize = 100_000;
pub const DEFAULT_SEARCH_NODES: u64 = 10_000_000;

/// A homomorphism from a free group to a finite permutation group, given by
/// one permutation per generator.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientWitness {
    degree: usize,
    images: Vec<Permutation>,
}

impl QuotientWitness {
    pub fn new(degree: usize, images: Vec<Permutation>) -> Result<Self> {
        if degree == 0 {
            return Err(Error::MalformedInput("witness degree must be positive".into()));
        }
        if let Some(p) = images.iter().find(|p| p.degree() != degree) {
            return Err(Error::MalformedInput(format!(
                "image of degree {} in a witness of degree {degree}",
                p.degree()
            )));
        }
        Ok(QuotientWitness { degree, images })
    }

    /// Every generator maps to the identity.
    pub fn trivial(rank: usize) -> Self {
        QuotientWitness {
            degree: 1,
            images: vec![Permutation::identity(1); rank],
        }
    }

    /// Generator `i` maps to `residues[i]` in `Z/modulus`, realized as a power
    /// of the regular `modulus`-cycle.
    pub fn cyclic(modulus: usize, residues: &[u64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::MalformedInput("cyclic modulus must be positive".into()));
        }
        Ok(QuotientWitness {
            degree: modulus,
            images: residues
                .iter()
                .map(|&r| Permutation::rotation(modulus, r))
                .collect(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    /// Image of `w`: the generator permutations composed along `w`.
    pub fn evaluate_word(&self, w: &Word) -> Result<Permutation> {
        if w.rank() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                found: w.rank(),
            });
        }
        let inverses: Vec<Permutation> = self.images.iter().map(Permutation::inverse).collect();
        let images = (0..self.degree)
            .map(|start| {
                w.letters().iter().fold(start, |x, l| {
                    if l.is_positive() {
                        self.images[l.index()].apply(x)
                    } else {
                        inverses[l.index()].apply(x)
                    }
                }) as u32
            })
            .collect();
        Ok(Permutation::from_raw(images))
    }

    /// Order of the image of `w`.
    pub fn order_of(&self, w: &Word) -> Result<u64> {
        Ok(self.evaluate_word(w)?.order())
    }

    pub fn to_json(&self, names: &[String]) -> WitnessJson {
        WitnessJson {
            degree: self.degree,
            images: names
                .iter()
                .zip(&self.images)
                .map(|(n, p)| (n.clone(), p.images()))
                .collect(),
        }
    }

    pub fn from_json(json: &WitnessJson, names: &[String]) -> Result<Self> {
        if let Some(extra) = json.images.keys().find(|k| !names.contains(k)) {
            return Err(Error::MalformedInput(format!("witness names unknown generator `{extra}`")));
        }
        let images = names
            .iter()
            .map(|n| {
                let arr = json
                    .images
                    .get(n)
                    .ok_or_else(|| Error::MalformedInput(format!("witness has no image for `{n}`")))?;
                if arr.len() != json.degree {
                    return Err(Error::MalformedInput(format!(
                        "image of `{n}` has length {}, expected {}",
                        arr.len(),
                        json.degree
                    )));
                }
                Permutation::from_images(arr.clone())
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.degree, images)
    }
}

/// `{"degree": d, "images": {"<generator>": [..], ..}}`
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessJson {
    pub degree: usize,
    pub images: BTreeMap<String, Vec<usize>>,
}

fn check_rank(p: &Presentation, w: &QuotientWitness) -> Result<()> {
    if p.rank() != w.rank() {
        return Err(Error::RankMismatch {
            expected: p.rank(),
            found: w.rank(),
        });
    }
    Ok(())
}

/// True iff every relator maps to the identity.
pub fn verify_homomorphism(p: &Presentation, w: &QuotientWitness) -> Result<bool> {
    Ok(first_failing_relator(p, w)?.is_none())
}

fn first_failing_relator(p: &Presentation, w: &QuotientWitness) -> Result<Option<usize>> {
    check_rank(p, w)?;
    for (i, r) in p.relators().iter().enumerate() {
        let img = w.evaluate_word(r.root())?;
        if !img.pow(r.exponent() as i64).is_identity() {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Orders of the images of the relator roots.
pub fn relator_root_orders(p: &Presentation, w: &QuotientWitness) -> Result<Vec<u64>> {
    if let Some(relator) = first_failing_relator(p, w)? {
        return Err(Error::NotAHomomorphism { relator });
    }
    p.relators().iter().map(|r| w.order_of(r.root())).collect()
}

/// True iff every root keeps its full exponent as its order.
pub fn is_no_collapse(p: &Presentation, w: &QuotientWitness) -> Result<bool> {
    let orders = relator_root_orders(p, w)?;
    Ok(p.relators().iter().zip(orders).all(|(r, o)| r.exponent() == o))
}

/// Image group closure: elements plus a lookup from image array to position.
struct Closure {
    elements: Vec<Permutation>,
    position: HashMap<Vec<u32>, usize>,
}

fn closure(w: &QuotientWitness, cap: usize) -> Result<Closure> {
    let mut gens: Vec<Permutation> = w.images.clone();
    gens.extend(w.images.iter().map(Permutation::inverse));
    let id = Permutation::identity(w.degree);
    let mut elements = vec![id.clone()];
    let mut position = HashMap::from([(id.raw().to_vec(), 0usize)]);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &gens {
            let e = elements[i].then(g);
            if position.contains_key(e.raw()) {
                continue;
            }
            if elements.len() >= cap {
                return Err(Error::BudgetExceeded {
                    what: "image closure",
                    cap: cap as u64,
                });
            }
            position.insert(e.raw().to_vec(), elements.len());
            queue.push_back(elements.len());
            elements.push(e);
        }
    }
    Ok(Closure { elements, position })
}

/// All elements of the image group in breadth-first order from the identity
/// (generators in declaration order, then their inverses).
pub fn image_closure(w: &QuotientWitness, cap: usize) -> Result<Vec<Permutation>> {
    Ok(closure(w, cap)?.elements)
}

/// The regular action of the image group on itself: the coset table of the
/// kernel, cosets numbered in closure order.
pub fn regular_coset_table(w: &QuotientWitness, cap: usize) -> Result<CosetTable> {
    let Closure { elements, position } = closure(w, cap)?;
    let forward = w
        .images
        .iter()
        .map(|g| {
            elements
                .iter()
                .map(|e| position[e.then(g).raw()])
                .collect::<Vec<_>>()
        })
        .collect();
    CosetTable::from_forward(elements.len(), forward, SubgroupTag::KernelOfWitness)
}

/// Disjoint union of witnesses: each generator acts blockwise.
pub fn combine_witnesses(list: &[QuotientWitness]) -> Result<QuotientWitness> {
    let first = list.first().ok_or(Error::EmptyList)?;
    let rank = first.rank();
    if let Some(w) = list.iter().find(|w| w.rank() != rank) {
        return Err(Error::RankMismatch {
            expected: rank,
            found: w.rank(),
        });
    }
    let degree: usize = list.iter().map(|w| w.degree).sum();
    let images = (0..rank)
        .map(|g| {
            let mut arr = Vec::with_capacity(degree);
            let mut offset = 0u32;
            for w in list {
                arr.extend(w.images[g].raw().iter().map(|&x| x + offset));
                offset += w.degree as u32;
            }
            Permutation::from_raw(arr)
        })
        .collect();
    QuotientWitness::new(degree, images)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cyc(n: usize, cycles: &[&[usize]]) -> Permutation {
        let c: Vec<Vec<usize>> = cycles.iter().map(|c| c.to_vec()).collect();
        Permutation::from_cycles(n, &c).unwrap()
    }

    fn pres(t: &str) -> Presentation {
        Presentation::parse(t).unwrap()
    }

    /// A no-collapse (2,3,7) witness on 7 points.
    fn psl27_on_7() -> QuotientWitness {
        let p = pres("< a, b | a^2, b^3, (a b)^7 >");
        let params = SearchParams::new(Targets::NoCollapse, Family::Symmetric { lo: 7, hi: 7 });
        search_witness(&p, &params).unwrap()
    }

    #[test]
    fn evaluate_word_examples() {
        let w = QuotientWitness::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        assert!(w.evaluate_word(&Word::parse_compact("aa", 1).unwrap()).unwrap().is_identity());
        let w = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        let inv = w.evaluate_word(&Word::parse_compact("A", 1).unwrap()).unwrap();
        assert_eq!(inv, cyc(3, &[&[0, 2, 1]]));
        let w = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[1, 2]])]).unwrap();
        let ab = w.evaluate_word(&Word::parse_compact("ab", 2).unwrap()).unwrap();
        // 0 -a-> 1 -b-> 2, 1 -a-> 0 -b-> 0, 2 -a-> 2 -b-> 1
        assert_eq!(ab.images(), vec![2, 0, 1]);
        assert!(w.evaluate_word(&Word::parse_compact("a", 1).unwrap()).is_err());
    }

    #[test]
    fn homomorphism_and_orders() {
        let p2 = pres("< a | a^2 >");
        let t = QuotientWitness::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let three = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert!(verify_homomorphism(&p2, &t).unwrap());
        assert!(!verify_homomorphism(&p2, &three).unwrap());
        assert!(is_no_collapse(&p2, &t).unwrap());

        let p4 = pres("< a | a^4 >");
        assert_eq!(relator_root_orders(&p4, &t).unwrap(), vec![2]);
        assert!(!is_no_collapse(&p4, &t).unwrap());
        assert_eq!(relator_root_orders(&p4, &QuotientWitness::trivial(1)).unwrap(), vec![1]);
        assert_eq!(
            relator_root_orders(&p2, &three),
            Err(Error::NotAHomomorphism { relator: 0 })
        );
    }

    #[test]
    fn triangle_witness_orders_and_closure() {
        let p = pres("< a, b | a^2, b^3, (a b)^7 >");
        let w = psl27_on_7();
        assert!(verify_homomorphism(&p, &w).unwrap());
        assert_eq!(relator_root_orders(&p, &w).unwrap(), vec![2, 3, 7]);
        assert!(is_no_collapse(&p, &w).unwrap());
        assert_eq!(image_closure(&w, DEFAULT_MAX_IMAGE).unwrap().len(), 168);
    }

    #[test]
    fn closure_examples() {
        let t = QuotientWitness::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let c = image_closure(&t, 10).unwrap();
        assert_eq!(c, vec![Permutation::identity(2), cyc(2, &[&[0, 1]])]);
        let five = QuotientWitness::new(5, vec![cyc(5, &[&[0, 1, 2, 3, 4]])]).unwrap();
        assert_eq!(image_closure(&five, 10).unwrap().len(), 5);
        assert_eq!(
            image_closure(&five, 4),
            Err(Error::BudgetExceeded { what: "image closure", cap: 4 })
        );
    }

    #[test]
    fn regular_tables() {
        let t = QuotientWitness::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let table = regular_coset_table(&t, 10).unwrap();
        assert_eq!((table.count(), table.column(0)), (2, vec![1, 0]));
        let three = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        let table = regular_coset_table(&three, 10).unwrap();
        assert_eq!(table.column(0), vec![1, 2, 0]);

        let w = psl27_on_7();
        let table = regular_coset_table(&w, DEFAULT_MAX_IMAGE).unwrap();
        assert_eq!(table.count(), 168);
        let ab = Word::parse_compact("ab", 2).unwrap();
        let cycles = table.word_cycles(&ab);
        assert_eq!(cycles.len(), 24);
        assert!(cycles.iter().all(|c| c.len() == 7));
    }

    #[test]
    fn combining_witnesses_takes_lcm_of_orders() {
        let t = QuotientWitness::new(2, vec![cyc(2, &[&[0, 1]])]).unwrap();
        let three = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        let a = Word::parse_compact("a", 1).unwrap();
        let two = combine_witnesses(&[t.clone(), t.clone()]).unwrap();
        assert_eq!((two.degree(), two.order_of(&a).unwrap()), (4, 2));
        let six = combine_witnesses(&[t, three]).unwrap();
        assert_eq!(six.order_of(&a).unwrap(), 6);
        assert_eq!(combine_witnesses(&[]), Err(Error::EmptyList));

        let p = pres("< a, b | a^2, b^3 >");
        let wa = QuotientWitness::new(2, vec![cyc(2, &[&[0, 1]]), Permutation::identity(2)]).unwrap();
        let wb = QuotientWitness::new(3, vec![Permutation::identity(3), cyc(3, &[&[0, 1, 2]])]).unwrap();
        assert_eq!(relator_root_orders(&p, &wa).unwrap(), vec![2, 1]);
        let both = combine_witnesses(&[wa, wb]).unwrap();
        assert_eq!(relator_root_orders(&p, &both).unwrap(), vec![2, 3]);
    }

    #[test]
    fn witness_json_round_trip() {
        let names = Presentation::default_names(2);
        let w = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1]]), cyc(3, &[&[1, 2]])]).unwrap();
        let j = w.to_json(&names);
        assert_eq!(
            serde_json::to_value(&j).unwrap(),
            serde_json::json!({"degree": 3, "images": {"a": [1, 0, 2], "b": [0, 2, 1]}})
        );
        assert_eq!(QuotientWitness::from_json(&j, &names).unwrap(), w);
        let mut bad = j.clone();
        bad.images.insert("a".into(), vec![0, 0, 1]);
        assert!(QuotientWitness::from_json(&bad, &names).is_err());
        let cyclic = QuotientWitness::cyclic(4, &[1, 2]).unwrap();
        assert_eq!(cyclic.images()[1].images(), vec![2, 3, 0, 1]);
    }

    #[test]
    fn coset_table_json() {
        let names = Presentation::default_names(1);
        let three = QuotientWitness::new(3, vec![cyc(3, &[&[0, 1, 2]])]).unwrap();
        let table = regular_coset_table(&three, 10).unwrap();
        let j = table.to_json(&names);
        assert_eq!(
            serde_json::to_value(&j).unwrap(),
            serde_json::json!({"count": 3, "action": {"a": [1, 2, 0], "a^-1": [2, 0, 1]}})
        );
        assert_eq!(CosetTable::from_json(&j, &names, SubgroupTag::KernelOfWitness).unwrap(), table);
    }
}

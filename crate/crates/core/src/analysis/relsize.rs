use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::rdef_lower_bound;
use crate::arith::{divisors, int, ratio, RationalJson};
use crate::error::{Error, Result};
use crate::presentations::{render_word, Presentation};
use crate::quotients::{regular_coset_table, QuotientWitness};
use crate::rewriting::{reidemeister_schreier_power_aware, schreier_transversal};
use crate::words::{free_reduce, Letter, Word};

/// `ν(g)` with the root that attains it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NuValue {
    pub nu: u64,
    /// Maximal root `u` of `g = u^exponent`.
    pub root: Word,
    pub exponent: u64,
    /// Least `d` whose root `u^d` attains `nu`.
    pub divisor: u64,
    /// Whether `g` lies in the kernel of the witness.
    pub in_kernel: bool,
}

fn order_of_power(order: u64, d: u64) -> u64 {
    order / order.gcd(&d)
}

/// `ν(g; F, K)` where `F` is the free group and `K` the kernel of `k`.
pub fn nu(g: &Word, k: &QuotientWitness) -> Result<NuValue> {
    nu_among(g, k, |_| true)
}

/// `ν(g; H, K ∩ H)` where `H` is the kernel of `h`; only roots lying in `H`
/// count. `g` itself must lie in `H`.
pub fn nu_in_subgroup(g: &Word, h: &QuotientWitness, k: &QuotientWitness) -> Result<NuValue> {
    let (u, _) = g.maximal_root()?;
    let oh = h.order_of(&u)?;
    if !h.evaluate_word(g)?.is_identity() {
        return Err(Error::MalformedInput(format!("{g} is not in the subgroup")));
    }
    nu_among(g, k, |d| d % oh == 0)
}

fn nu_among(g: &Word, k: &QuotientWitness, allowed: impl Fn(u64) -> bool) -> Result<NuValue> {
    let (u, m) = g.maximal_root()?;
    let ok = k.order_of(&u)?;
    let in_kernel = m % ok == 0;
    let mut best: Option<(u64, u64)> = None;
    for d in divisors(m).into_iter().filter(|&d| allowed(d)) {
        let v = if in_kernel { order_of_power(ok, d) } else { m / d };
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, d));
        }
    }
    let (nu, divisor) = best.expect("g itself is an allowed root");
    Ok(NuValue {
        nu,
        root: u,
        exponent: m,
        divisor,
        in_kernel,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelSizeEntry {
    pub element: Word,
    pub value: NuValue,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelSizeReport {
    pub entries: Vec<RelSizeEntry>,
    /// `Σ 1/ν`.
    pub total: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelSizeEntryJson {
    pub element: String,
    pub root: String,
    pub exponent: u64,
    pub in_kernel: bool,
    pub nu: u64,
    pub attained_by: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelSizeReportJson {
    pub entries: Vec<RelSizeEntryJson>,
    pub total: RationalJson,
}

impl RelSizeReport {
    pub fn to_json(&self, names: &[String]) -> RelSizeReportJson {
        RelSizeReportJson {
            entries: self
                .entries
                .iter()
                .map(|e| RelSizeEntryJson {
                    element: render_word(&e.element, names),
                    root: render_word(&e.value.root, names),
                    exponent: e.value.exponent,
                    in_kernel: e.value.in_kernel,
                    nu: e.value.nu,
                    attained_by: render_word(&e.value.root.pow(e.value.divisor as i64), names),
                })
                .collect(),
            total: (&self.total).into(),
        }
    }
}

/// Relative size of `elements` in the free group with respect to the
/// kernel of `w`.
pub fn relative_size(elements: &[Word], w: &QuotientWitness) -> Result<RelSizeReport> {
    let entries = elements
        .iter()
        .map(|g| {
            Ok(RelSizeEntry {
                element: g.clone(),
                value: nu(g, w)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = total_of(entries.iter().map(|e| e.value.nu));
    Ok(RelSizeReport { entries, total })
}

fn total_of(nus: impl Iterator<Item = u64>) -> BigRational {
    nus.fold(BigRational::zero(), |acc, v| acc + ratio(1, v as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupermultiplicativityReport {
    pub index: usize,
    pub subgroup_deficiency: i64,
    pub rdef_lower: BigRational,
    /// `def(Q_H) − 1`.
    pub lhs: BigRational,
    /// `index·(rdef_lower − 1)`.
    pub rhs: BigRational,
    pub holds: bool,
    pub equality: bool,
    /// Sampled subgroup elements on which the root-order inequality was checked.
    pub samples: usize,
    pub lemma_failures: Vec<Word>,
    /// Relative size of the kept relator conjugates inside the subgroup.
    pub conjugate_relsize: BigRational,
    /// `index·relsize` of the relators in the free group.
    pub scaled_relsize: BigRational,
    pub relsize_holds: bool,
}

fn random_word(rng: &mut ChaCha8Rng, rank: usize, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let letters = (0..len).map(|_| {
            let g = rng.gen_range(0..rank);
            if rng.gen_bool(0.5) {
                Letter::pos(g)
            } else {
                Letter::neg(g)
            }
        });
        let w = free_reduce(letters, rank).expect("letters in range");
        if !w.is_empty() {
            return w;
        }
    }
}

/// Checks the deficiency inequality for the kernel `H` of `w`, the
/// root-order inequality `ν(g; H, K∩H) ≥ ν(g; F, K) / o(ψ_H(a))` on
/// `samples` random elements of `H`, and the relative-size inequality for
/// the relator conjugates kept by the power-aware rewriting. `K` is the
/// kernel of `k`.
pub fn check_supermultiplicativity(
    p: &Presentation,
    w: &QuotientWitness,
    k: &QuotientWitness,
    samples: usize,
    seed: u64,
    max_image: usize,
) -> Result<SupermultiplicativityReport> {
    let bound = rdef_lower_bound(p, w)?;
    if k.rank() != p.rank() {
        return Err(Error::RankMismatch {
            expected: p.rank(),
            found: k.rank(),
        });
    }
    let table = regular_coset_table(w, max_image)?;
    let q = reidemeister_schreier_power_aware(p, &table)?;
    let index = table.index();
    let lhs = int(q.deficiency() - 1);
    let rhs = int(index as i64) * (bound.value.clone() - BigRational::one());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lemma_failures = Vec::new();
    if p.rank() > 0 {
        for _ in 0..samples {
            let x = random_word(&mut rng, p.rank(), 6);
            let g = x.pow(w.order_of(&x)? as i64);
            let in_f = nu(&g, k)?;
            let a = in_f.root.pow(in_f.divisor as i64);
            let oa = w.order_of(&a)?;
            let in_h = nu_in_subgroup(&g, w, k)?;
            if in_h.nu * oa < in_f.nu {
                lemma_failures.push(g);
            }
        }
    }

    let s = schreier_transversal(&table);
    let full = p.full_relators();
    let source_nus = full.iter().map(|r| nu(r, k).map(|v| v.nu)).collect::<Result<Vec<_>>>()?;
    let scaled_relsize = int(index as i64) * total_of(source_nus.into_iter());
    let mut conj = Vec::new();
    for o in q.origins() {
        let c = full[o.relator].conjugate_by(s.representative(o.coset));
        conj.push(nu_in_subgroup(&c, w, k)?.nu);
    }
    let conjugate_relsize = total_of(conj.into_iter());

    Ok(SupermultiplicativityReport {
        index,
        subgroup_deficiency: q.deficiency(),
        rdef_lower: bound.value,
        holds: lhs >= rhs,
        equality: lhs == rhs,
        lhs,
        rhs,
        samples: if p.rank() > 0 { samples } else { 0 },
        lemma_failures,
        relsize_holds: conjugate_relsize <= scaled_relsize,
        conjugate_relsize,
        scaled_relsize,
    })
}

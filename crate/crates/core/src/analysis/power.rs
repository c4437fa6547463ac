use num_rational::BigRational;
use num_traits::One;

use super::certificate::{certify_large, CertifyInput, LargenessCertificate, Verdict};
use super::require;
use crate::arith::{int, sum_reciprocals};
use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::quotients::{SearchParams, Targets};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerQuotientReport {
    pub presentation: Presentation,
    /// `(element index, e)` for each non-primitive element `u^e`, whose
    /// relator became `u^(e·q)`.
    pub adjustments: Vec<(usize, u64)>,
    pub rdef: BigRational,
    /// `rdef > 1`; for primitive elements this is `q > m/(d−1)`.
    pub threshold_met: bool,
    /// Present when the threshold is met and a witness was found.
    pub certificate: Option<LargenessCertificate>,
}

impl PowerQuotientReport {
    pub fn verdict(&self) -> Verdict {
        self.certificate.as_ref().map_or(Verdict::Inconclusive, |c| c.verdict)
    }
}

/// Certifies `⟨x₁..x_d | g₁^q, …, g_m^q⟩` by searching for a quotient in
/// which every `gᵢ` has order exactly `q`. Skips the search when
/// `d − Σ 1/(eᵢ q) ≤ 1`, since no certificate can then succeed.
pub fn power_quotient_certificate(
    rank: usize,
    elements: &[Word],
    q: u64,
    params: &SearchParams,
    max_image: usize,
) -> Result<PowerQuotientReport> {
    require(q >= 2, || format!("q = {q} must be at least 2"))?;
    require(!elements.is_empty(), || "no elements given".into())?;
    let mut words = Vec::with_capacity(elements.len());
    let mut adjustments = Vec::new();
    let mut exps = Vec::new();
    for (i, g) in elements.iter().enumerate() {
        if g.rank() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: g.rank(),
            });
        }
        let (u, e) = g.maximal_root()?;
        if e > 1 {
            adjustments.push((i, e));
        }
        words.push(u.pow((e * q) as i64));
        exps.push(e * q);
    }
    let presentation = Presentation::new(Presentation::default_names(rank), words)?;
    let rdef = int(rank as i64) - sum_reciprocals(exps);
    let threshold_met = rdef > BigRational::one();
    let certificate = if threshold_met {
        let params = SearchParams {
            targets: Targets::NoCollapse,
            ..params.clone()
        };
        Some(certify_large(&presentation, CertifyInput::Search(params), max_image)?)
    } else {
        None
    };
    Ok(PowerQuotientReport {
        presentation,
        adjustments,
        rdef,
        threshold_met,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::quotients::Family;

    fn params(lo: usize, hi: usize) -> SearchParams {
        SearchParams::new(Targets::NoCollapse, Family::Symmetric { lo, hi })
    }

    #[test]
    fn commutator_to_the_fifth() {
        let g = Word::parse_compact("abAB", 2).unwrap();
        let r = power_quotient_certificate(2, &[g], 5, &params(2, 8), 200_000).unwrap();
        assert_eq!(r.rdef, ratio(9, 5));
        assert_eq!(r.verdict(), Verdict::CertifiedLarge);
        assert_eq!(r.certificate.unwrap().rdef_lower, ratio(9, 5));
    }

    #[test]
    fn below_threshold_is_inconclusive() {
        let gs: Vec<Word> = ["a", "b", "ab"].iter().map(|s| Word::parse_compact(s, 2).unwrap()).collect();
        let r = power_quotient_certificate(2, &gs, 2, &params(2, 4), 1000).unwrap();
        assert_eq!(r.rdef, ratio(1, 2));
        assert!(!r.threshold_met);
        assert_eq!(r.verdict(), Verdict::Inconclusive);
    }

    #[test]
    fn single_generator_with_cyclic_witness() {
        let g = Word::parse_compact("a", 3).unwrap();
        let p = SearchParams::new(Targets::NoCollapse, Family::Cyclic { lo: 2, hi: 4 });
        let r = power_quotient_certificate(3, &[g], 4, &p, 1000).unwrap();
        assert_eq!(r.rdef, ratio(11, 4));
        assert_eq!(r.verdict(), Verdict::CertifiedLarge);
    }

    #[test]
    fn non_primitive_elements_are_adjusted() {
        let g = Word::parse_compact("aa", 2).unwrap();
        let r = power_quotient_certificate(2, &[g], 3, &params(1, 6), 1000).unwrap();
        assert_eq!(r.adjustments, vec![(0, 2)]);
        assert_eq!(r.presentation.relators()[0].exponent(), 6);
        assert_eq!(r.rdef, ratio(11, 6));
    }
}

//! Residual-deficiency bounds from finite quotients, largeness
//! certificates, family formulas, relative sizes and closed forms.

mod certificate;
mod closed_form;
mod families;
mod power;
mod relsize;

use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

pub use certificate::{
    certify_large, verify_certificate, CertificateJson, CertifyInput, LargenessCertificate, Verdict, VerifyReport,
    CERTIFICATE_FORMAT,
};
pub use closed_form::{closed_form_invariants, ClosedFamily, ClosedFormInvariants};
pub use families::{coxeter_uniform_criterion, family_rdef, FamilyRdef, RdefFamily};
pub use power::{power_quotient_certificate, PowerQuotientReport};
pub use relsize::{
    check_supermultiplicativity, nu, nu_in_subgroup, relative_size, NuValue, RelSizeEntry, RelSizeReport,
    SupermultiplicativityReport,
};

use crate::arith::{int, sum_reciprocals, RationalJson};
use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::quotients::{image_closure, is_no_collapse, relator_root_orders, QuotientWitness};

/// `n − Σ 1/kᵢ` for the root orders `kᵢ` realized by a quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RdefBound {
    pub value: BigRational,
    pub realized_orders: Vec<u64>,
    /// Every root keeps its full exponent, so the bound is the presentation's rdef.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RdefBoundJson {
    pub value: RationalJson,
    pub realized_orders: Vec<u64>,
    pub exact: bool,
}

impl RdefBound {
    pub fn to_json(&self) -> RdefBoundJson {
        RdefBoundJson {
            value: (&self.value).into(),
            realized_orders: self.realized_orders.clone(),
            exact: self.exact,
        }
    }
}

pub fn rdef_lower_bound(p: &Presentation, w: &QuotientWitness) -> Result<RdefBound> {
    let orders = relator_root_orders(p, w)?;
    let value = int(p.rank() as i64) - sum_reciprocals(orders.iter().copied());
    Ok(RdefBound {
        value,
        exact: is_no_collapse(p, w)?,
        realized_orders: orders,
    })
}

/// `1 + |image|·(rdef_lower − 1)`, the deficiency of the finite-index
/// subgroup that the power-aware rewriting produces.
pub fn deficiency_bound(p: &Presentation, w: &QuotientWitness, max_image: usize) -> Result<BigRational> {
    let bound = rdef_lower_bound(p, w)?;
    let size = image_closure(w, max_image)?.len();
    Ok(BigRational::one() + int(size as i64) * (bound.value - BigRational::one()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThomasVerdict {
    Infinite,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThomasReport {
    pub verdict: ThomasVerdict,
    /// `n − Σ 1/mᵢ` over the relator exponents.
    pub quantity: BigRational,
    pub no_collapse: bool,
}

/// Infinite when the witness keeps every relator exponent and
/// `n − Σ 1/mᵢ ≥ 1`.
pub fn thomas_infiniteness(p: &Presentation, w: &QuotientWitness) -> Result<ThomasReport> {
    let no_collapse = is_no_collapse(p, w)?;
    let quantity = int(p.rank() as i64) - sum_reciprocals(p.relators().iter().map(|r| r.exponent()));
    let verdict = if no_collapse && quantity >= BigRational::one() {
        ThomasVerdict::Infinite
    } else {
        ThomasVerdict::Unknown
    };
    Ok(ThomasReport {
        verdict,
        quantity,
        no_collapse,
    })
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ParameterOutOfRange(msg()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;
    use crate::quotients::{search_witness, Family, SearchParams, Targets};

    fn pres(t: &str) -> Presentation {
        Presentation::parse(t).unwrap()
    }

    fn no_collapse(p: &Presentation, hi: usize) -> QuotientWitness {
        search_witness(p, &SearchParams::new(Targets::NoCollapse, Family::Symmetric { lo: 1, hi })).unwrap()
    }

    #[test]
    fn rdef_examples() {
        let p = pres("< a, b | a^2, b^3, (a b)^7 >");
        let w = no_collapse(&p, 8);
        let b = rdef_lower_bound(&p, &w).unwrap();
        assert_eq!((b.value.clone(), b.exact), (ratio(43, 42), true));
        let t = rdef_lower_bound(&p, &QuotientWitness::trivial(2)).unwrap();
        assert_eq!((t.value, t.exact), (int(-1), false));
        assert_eq!(deficiency_bound(&p, &w, 1000).unwrap(), int(5));

        let c = pres("< a, b | [a, b]^5 >");
        let w = no_collapse(&c, 6);
        assert_eq!(rdef_lower_bound(&c, &w).unwrap().value, ratio(9, 5));
    }

    #[test]
    fn deficiency_bound_examples() {
        let free = pres("< a, b | >");
        let w = QuotientWitness::cyclic(2, &[1, 0]).unwrap();
        assert_eq!(deficiency_bound(&free, &w, 10).unwrap(), int(3));
        let p = pres("< a, b | a^2, b^3 >");
        assert_eq!(deficiency_bound(&p, &QuotientWitness::trivial(2), 10).unwrap(), int(0));
    }

    #[test]
    fn thomas_examples() {
        let p = pres("< a, b | a^2, b^3, (a b)^7 >");
        let r = thomas_infiniteness(&p, &no_collapse(&p, 8)).unwrap();
        assert_eq!((r.verdict, r.quantity), (ThomasVerdict::Infinite, ratio(43, 42)));
        let q = pres("< a, b | a^2, b^3, (a b)^3 >");
        let r = thomas_infiniteness(&q, &no_collapse(&q, 4)).unwrap();
        assert_eq!((r.verdict, r.quantity), (ThomasVerdict::Unknown, ratio(5, 6)));
        let r = thomas_infiniteness(&p, &QuotientWitness::trivial(2)).unwrap();
        assert_eq!(r.verdict, ThomasVerdict::Unknown);
    }
}

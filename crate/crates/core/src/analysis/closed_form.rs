use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::require;
use crate::arith::{int, RationalJson};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "family", content = "parameter")]
pub enum ClosedFamily {
    /// Free group of rank `m`.
    Free(u64),
    /// Fundamental group of the closed orientable surface of genus `g`.
    Surface(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedFormInvariants {
    pub family: ClosedFamily,
    pub deficiency: BigRational,
    pub rank: BigRational,
    pub deficiency_gradient: BigRational,
    pub rank_gradient: BigRational,
    pub euler_characteristic: BigRational,
    pub l2_betti: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormJson {
    pub family: ClosedFamily,
    pub deficiency: RationalJson,
    pub rank: RationalJson,
    pub deficiency_gradient: RationalJson,
    pub rank_gradient: RationalJson,
    pub euler_characteristic: RationalJson,
    pub l2_betti: RationalJson,
}

impl ClosedFormInvariants {
    pub fn to_json(&self) -> ClosedFormJson {
        ClosedFormJson {
            family: self.family,
            deficiency: (&self.deficiency).into(),
            rank: (&self.rank).into(),
            deficiency_gradient: (&self.deficiency_gradient).into(),
            rank_gradient: (&self.rank_gradient).into(),
            euler_characteristic: (&self.euler_characteristic).into(),
            l2_betti: (&self.l2_betti).into(),
        }
    }
}

pub fn closed_form_invariants(family: ClosedFamily) -> Result<ClosedFormInvariants> {
    let (deficiency, rank, chi) = match family {
        ClosedFamily::Free(m) => {
            require(m >= 2, || format!("free rank {m} must be at least 2"))?;
            let m = m as i64;
            (m, m, 1 - m)
        }
        ClosedFamily::Surface(g) => {
            require(g >= 2, || format!("genus {g} must be at least 2"))?;
            let g = g as i64;
            (2 * g - 1, 2 * g, 2 - 2 * g)
        }
    };
    Ok(ClosedFormInvariants {
        family,
        deficiency: int(deficiency),
        rank: int(rank),
        deficiency_gradient: int(-chi),
        rank_gradient: int(-chi),
        euler_characteristic: int(chi),
        l2_betti: int(-chi),
    })
}

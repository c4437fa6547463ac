use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::rdef_lower_bound;
use crate::arith::{int, RationalJson};
use crate::error::{Error, Result};
use crate::presentations::{Presentation, PresentationJson};
use crate::quotients::{regular_coset_table, search_witness, QuotientWitness, SearchParams, WitnessJson};
use crate::rewriting::{reidemeister_schreier_power_aware, SubgroupPresentation};

pub const CERTIFICATE_FORMAT: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedLarge,
    Inconclusive,
}

/// Where the witness for a certificate comes from.
#[derive(Clone, Debug)]
pub enum CertifyInput {
    Witness(QuotientWitness),
    Search(SearchParams),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LargenessCertificate {
    pub presentation: Presentation,
    pub witness: QuotientWitness,
    pub index: usize,
    pub orders: Vec<u64>,
    pub rdef_lower: BigRational,
    pub predicted: BigRational,
    pub subgroup: SubgroupPresentation,
    pub achieved: i64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VersionsJson {
    pub grpdef: String,
    pub format: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub presentation: PresentationJson,
    pub witness: WitnessJson,
    pub index: usize,
    pub orders: Vec<u64>,
    pub rdef_lower: RationalJson,
    pub predicted: RationalJson,
    pub achieved: i64,
    pub verdict: Verdict,
    pub subgroup_presentation_digest: String,
    pub versions: VersionsJson,
}

impl LargenessCertificate {
    /// `predicted` as an integer (it always is one for a realized witness).
    pub fn predicted_integer(&self) -> Option<i64> {
        if self.predicted.is_integer() {
            self.predicted.to_integer().to_i64()
        } else {
            None
        }
    }

    /// SHA-256 of the subgroup presentation's JSON encoding.
    pub fn digest(&self) -> String {
        subgroup_digest(&self.subgroup)
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            presentation: self.presentation.to_json(),
            witness: self.witness.to_json(self.presentation.generator_names()),
            index: self.index,
            orders: self.orders.clone(),
            rdef_lower: (&self.rdef_lower).into(),
            predicted: (&self.predicted).into(),
            achieved: self.achieved,
            verdict: self.verdict,
            subgroup_presentation_digest: self.digest(),
            versions: VersionsJson {
                grpdef: env!("CARGO_PKG_VERSION").to_string(),
                format: CERTIFICATE_FORMAT,
            },
        }
    }
}

fn subgroup_digest(q: &SubgroupPresentation) -> String {
    let bytes = serde_json::to_vec(&q.to_json()).expect("subgroup JSON serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Builds the kernel of the witness, rewrites the presentation over it with
/// one conjugate per root cycle, and counts the resulting deficiency.
pub fn certify_large(p: &Presentation, input: CertifyInput, max_image: usize) -> Result<LargenessCertificate> {
    let witness = match input {
        CertifyInput::Witness(w) => w,
        CertifyInput::Search(params) => search_witness(p, &params)?,
    };
    let bound = rdef_lower_bound(p, &witness)?;
    let table = regular_coset_table(&witness, max_image)?;
    let subgroup = reidemeister_schreier_power_aware(p, &table)?;
    let index = table.index();
    let predicted = BigRational::one() + int(index as i64) * (bound.value.clone() - BigRational::one());
    let achieved = subgroup.deficiency();
    if predicted != int(achieved) {
        return Err(Error::Internal(format!(
            "subgroup deficiency {achieved} differs from predicted {predicted}"
        )));
    }
    let verdict = if achieved >= 2 {
        Verdict::CertifiedLarge
    } else {
        Verdict::Inconclusive
    };
    Ok(LargenessCertificate {
        presentation: p.clone(),
        witness,
        index,
        orders: bound.realized_orders,
        rdef_lower: bound.value,
        predicted,
        subgroup,
        achieved,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub recomputed: CertificateJson,
    /// Names of fields whose stored value differs from the recomputation.
    pub mismatches: Vec<String>,
}

impl VerifyReport {
    pub fn is_valid(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Recomputes a certificate from its presentation and witness alone and
/// compares every derived field, including the digest.
pub fn verify_certificate(json: &CertificateJson, max_image: usize) -> Result<VerifyReport> {
    let p = Presentation::from_json(&json.presentation)?;
    let w = QuotientWitness::from_json(&json.witness, p.generator_names())?;
    let cert = certify_large(&p, CertifyInput::Witness(w), max_image)?;
    let recomputed = cert.to_json();
    let mut mismatches = Vec::new();
    let mut check = |name: &str, same: bool| {
        if !same {
            mismatches.push(name.to_string());
        }
    };
    check("index", recomputed.index == json.index);
    check("orders", recomputed.orders == json.orders);
    check("rdef_lower", Some(&cert.rdef_lower) == json.rdef_lower.to_rational().as_ref());
    check("predicted", Some(&cert.predicted) == json.predicted.to_rational().as_ref());
    check("achieved", recomputed.achieved == json.achieved);
    check("verdict", recomputed.verdict == json.verdict);
    check(
        "subgroup_presentation_digest",
        recomputed.subgroup_presentation_digest == json.subgroup_presentation_digest,
    );
    Ok(VerifyReport { recomputed, mismatches })
}

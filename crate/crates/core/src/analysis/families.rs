use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::require;
use crate::arith::{int, ratio, sum_reciprocals, RationalJson};
use crate::error::Result;

/// Parametrized families of presentations with a closed-form residual
/// deficiency. Entries of `0` (tetrahedral, chain and star `e`) and `None`
/// (Coxeter off-diagonal entries) contribute nothing to the sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RdefFamily {
    Triangle { l: u64, m: u64, n: u64 },
    OneRelatorQuotient { orders: Vec<u64>, s: u64 },
    Coxeter { matrix: Vec<Vec<Option<u64>>> },
    Tetrahedral { e: [u64; 3], m: u64, p: u64, q: u64 },
    Chain { e: Vec<u64>, m: Vec<u64> },
    Star { e: Vec<u64>, m: Vec<u64> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyRdef {
    pub value: BigRational,
    pub greater_than_one: bool,
}

#[derive(Serialize)]
struct FamilyRdefJson {
    rdef: RationalJson,
    greater_than_one: bool,
}

impl FamilyRdef {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(FamilyRdefJson {
            rdef: (&self.value).into(),
            greater_than_one: self.greater_than_one,
        })
        .expect("plain data")
    }
}

fn at_least(name: &str, v: u64, min: u64) -> Result<()> {
    require(v >= min, || format!("{name} = {v} must be at least {min}"))
}

fn zero_or_at_least_two(name: &str, v: u64) -> Result<()> {
    require(v == 0 || v >= 2, || format!("{name} = {v} must be 0 or at least 2"))
}

fn reciprocals_skipping_zero(v: &[u64]) -> BigRational {
    sum_reciprocals(v.iter().copied().filter(|&x| x != 0))
}

pub fn family_rdef(family: &RdefFamily) -> Result<FamilyRdef> {
    let value = match family {
        RdefFamily::Triangle { l, m, n } => {
            for (name, v) in [("l", l), ("m", m), ("n", n)] {
                at_least(name, *v, 2)?;
            }
            int(2) - sum_reciprocals([*l, *m, *n])
        }
        RdefFamily::OneRelatorQuotient { orders, s } => {
            require(!orders.is_empty(), || "at least one generator order is required".into())?;
            for (i, &m) in orders.iter().enumerate() {
                at_least(&format!("m{}", i + 1), m, 2)?;
            }
            at_least("s", *s, 2)?;
            int(orders.len() as i64) - sum_reciprocals(orders.iter().copied()) - ratio(1, *s as i64)
        }
        RdefFamily::Coxeter { matrix } => {
            let n = matrix.len();
            require(n >= 1, || "empty Coxeter matrix".into())?;
            let mut sum = BigRational::zero();
            for (i, row) in matrix.iter().enumerate() {
                require(row.len() == n, || format!("row {i} has {} entries, expected {n}", row.len()))?;
                for (j, &entry) in row.iter().enumerate() {
                    require(entry == matrix[j][i], || format!("matrix is not symmetric at ({i},{j})"))?;
                    if i == j {
                        continue;
                    }
                    if let Some(m) = entry {
                        at_least(&format!("m[{i}][{j}]"), m, 2)?;
                        if i < j {
                            sum += ratio(1, m as i64);
                        }
                    }
                }
            }
            ratio(n as i64, 2) - sum
        }
        RdefFamily::Tetrahedral { e, m, p, q } => {
            for (i, &x) in e.iter().enumerate() {
                zero_or_at_least_two(&format!("e{}", i + 1), x)?;
            }
            for (name, v) in [("m", m), ("p", p), ("q", q)] {
                at_least(name, *v, 2)?;
            }
            int(3) - reciprocals_skipping_zero(e) - sum_reciprocals([*m, *p, *q])
        }
        RdefFamily::Chain { e, m } => {
            require(!e.is_empty(), || "chain needs at least one generator".into())?;
            require(m.len() == e.len(), || format!("chain needs {} m values, got {}", e.len(), m.len()))?;
            check_e_m(e, m)?;
            int(e.len() as i64) - reciprocals_skipping_zero(e) - sum_reciprocals(m.iter().copied())
        }
        RdefFamily::Star { e, m } => {
            let n = e.len();
            require(n >= 3, || format!("star needs at least 3 generators, got {n}"))?;
            require(m.len() == 2 * n - 3, || format!("star needs {} m values, got {}", 2 * n - 3, m.len()))?;
            check_e_m(e, m)?;
            int(n as i64) - reciprocals_skipping_zero(e) - sum_reciprocals(m.iter().copied())
        }
    };
    Ok(FamilyRdef {
        greater_than_one: value > BigRational::one(),
        value,
    })
}

fn check_e_m(e: &[u64], m: &[u64]) -> Result<()> {
    for (i, &x) in e.iter().enumerate() {
        zero_or_at_least_two(&format!("e{}", i + 1), x)?;
    }
    for (i, &x) in m.iter().enumerate() {
        at_least(&format!("m{}", i + 1), x, 3)?;
    }
    Ok(())
}

/// Sufficient condition for a rank-`n` Coxeter group with every
/// off-diagonal entry equal to `m` to have residual deficiency above one:
/// `m > n(n−1)/(n−2)`.
pub fn coxeter_uniform_criterion(n: u64, m: u64) -> bool {
    n >= 3 && u128::from(m) * u128::from(n - 2) > u128::from(n) * u128::from(n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn examples() {
        let t = family_rdef(&RdefFamily::Triangle { l: 3, m: 3, n: 4 }).unwrap();
        assert_eq!((t.value.clone(), t.greater_than_one), (ratio(13, 12), true));
        assert_eq!(
            t.to_json_value(),
            serde_json::json!({"rdef": {"num": 13, "den": 12}, "greater_than_one": true})
        );

        let cox = RdefFamily::Coxeter {
            matrix: (0..4).map(|i| (0..4).map(|j| Some(if i == j { 1 } else { 7 })).collect()).collect(),
        };
        assert_eq!(family_rdef(&cox).unwrap().value, ratio(8, 7));
        assert!(coxeter_uniform_criterion(4, 7));

        let tet = family_rdef(&RdefFamily::Tetrahedral { e: [0, 0, 0], m: 3, p: 3, q: 3 }).unwrap();
        assert_eq!(tet.value, int(2));
        assert!(tet.value >= ratio(3, 2));

        let orq = family_rdef(&RdefFamily::OneRelatorQuotient { orders: vec![2, 3], s: 7 }).unwrap();
        assert_eq!(orq.value, ratio(43, 42));
    }

    #[test]
    fn infinite_coxeter_entries_drop_out() {
        let cox = RdefFamily::Coxeter {
            matrix: vec![vec![Some(1), None, Some(3)], vec![None, Some(1), Some(2)], vec![Some(3), Some(2), Some(1)]],
        };
        assert_eq!(family_rdef(&cox).unwrap().value, ratio(3, 2) - ratio(1, 3) - ratio(1, 2));
    }

    #[test]
    fn chain_and_star() {
        let c = family_rdef(&RdefFamily::Chain { e: vec![0, 2], m: vec![3, 4] }).unwrap();
        assert_eq!(c.value, int(2) - ratio(1, 2) - ratio(1, 3) - ratio(1, 4));
        let s = family_rdef(&RdefFamily::Star { e: vec![0, 0, 0], m: vec![3, 3, 3] }).unwrap();
        assert_eq!(s.value, int(2));
        assert!(matches!(
            family_rdef(&RdefFamily::Star { e: vec![0, 0, 0], m: vec![3, 3] }),
            Err(Error::ParameterOutOfRange(_))
        ));
    }

    #[test]
    fn out_of_range_parameters() {
        for f in [
            RdefFamily::Triangle { l: 1, m: 3, n: 4 },
            RdefFamily::Tetrahedral { e: [1, 0, 0], m: 3, p: 3, q: 3 },
            RdefFamily::Chain { e: vec![2], m: vec![2] },
            RdefFamily::Coxeter { matrix: vec![vec![Some(1), Some(3)], vec![Some(4), Some(1)]] },
        ] {
            assert!(matches!(family_rdef(&f), Err(Error::ParameterOutOfRange(_))), "{f:?}");
        }
    }
}

//! Small integer and rational helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation of a positive integer.
pub fn valuation(mut m: u64, p: u64) -> u32 {
    debug_assert!(m > 0 && p >= 2);
    let mut k = 0;
    while m.is_multiple_of(p) {
        m /= p;
        k += 1;
    }
    k
}

pub fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `Σ 1/k` over the given positive integers.
pub fn sum_reciprocals<I: IntoIterator<Item = u64>>(ks: I) -> BigRational {
    ks.into_iter().fold(BigRational::zero(), |acc, k| {
        acc + BigRational::new(BigInt::one(), BigInt::from(k))
    })
}

/// Rational in lowest terms with positive denominator, as it appears in JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    #[serde(with = "bigint_json")]
    pub num: BigInt,
    #[serde(with = "bigint_json")]
    pub den: BigInt,
}

impl From<&BigRational> for RationalJson {
    fn from(r: &BigRational) -> Self {
        // BigRational is always reduced with a positive denominator.
        RationalJson {
            num: r.numer().clone(),
            den: r.denom().clone(),
        }
    }
}

impl RationalJson {
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.den.is_zero() {
            None
        } else {
            Some(BigRational::new(self.num.clone(), self.den.clone()))
        }
    }
}

/// Serializes a `BigInt` as a JSON integer when it fits in 64 bits and as a
/// decimal string otherwise.
pub mod bigint_json {
    use super::*;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(v) {
            Ok(x) => s.serialize_i64(x),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Number(n) => n
                .to_string()
                .parse()
                .map_err(|_| D::Error::custom("integer expected")),
            serde_json::Value::String(s) => s.parse().map_err(|_| D::Error::custom("integer expected")),
            _ => Err(D::Error::custom("integer expected")),
        }
    }
}

pub mod bigint_vec_json {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Wrapped(#[serde(with = "super::bigint_json")] BigInt);

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| Wrapped(x.clone())))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_valuations() {
        let primes: Vec<u64> = (0..30).filter(|&p| is_prime(p)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(valuation(48, 2), 4);
        assert_eq!(valuation(9, 3), 2);
        assert_eq!(valuation(7, 3), 0);
    }

    #[test]
    fn divisor_lists_are_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn rational_json_is_reduced() {
        let r = ratio(26, -24);
        let j = RationalJson::from(&r);
        assert_eq!(serde_json::to_string(&j).unwrap(), r#"{"num":-13,"den":12}"#);
    }
}

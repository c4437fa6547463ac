//! Freely reduced words in a free group of finite rank.
//!
//! Every [`Word`] is kept freely reduced. Roots, valuations and conjugacy
//! tests all work on the letter sequence of the cyclically reduced core.

use std::fmt;
use std::ops::Mul;

use crate::arith;
use crate::error::{Error, Result};

/// Index of a free generator, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GeneratorId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub generator: GeneratorId,
    pub sign: Sign,
}

impl Letter {
    pub fn pos(generator: usize) -> Letter {
        Letter {
            generator: GeneratorId(generator),
            sign: Sign::Pos,
        }
    }

    pub fn neg(generator: usize) -> Letter {
        Letter {
            generator: GeneratorId(generator),
            sign: Sign::Neg,
        }
    }

    pub fn inverse(self) -> Letter {
        Letter {
            generator: self.generator,
            sign: self.sign.flip(),
        }
    }

    pub fn is_inverse_of(self, other: Letter) -> bool {
        self.generator == other.generator && self.sign != other.sign
    }

    pub fn index(self) -> usize {
        self.generator.0
    }

    pub fn is_positive(self) -> bool {
        self.sign == Sign::Pos
    }

    /// +1 or -1.
    pub fn exponent(self) -> i64 {
        match self.sign {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }
}

/// A freely reduced word over `rank` free generators.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word {
    letters: Vec<Letter>,
    rank: usize,
}

/// Freely reduces `letters`, checking every generator index against `rank`.
pub fn free_reduce<I>(letters: I, rank: usize) -> Result<Word>
where
    I: IntoIterator<Item = Letter>,
{
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if l.index() >= rank {
            return Err(Error::MalformedInput(format!(
                "generator index {} out of range for rank {}",
                l.index(),
                rank
            )));
        }
        match out.last() {
            Some(&last) if last.is_inverse_of(l) => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    Ok(Word { letters: out, rank })
}

impl Word {
    pub fn identity(rank: usize) -> Word {
        Word {
            letters: Vec::new(),
            rank,
        }
    }

    /// The word consisting of the single letter `x_g`.
    pub fn generator(g: usize, rank: usize) -> Result<Word> {
        free_reduce([Letter::pos(g)], rank)
    }

    pub fn from_letters(letters: Vec<Letter>, rank: usize) -> Result<Word> {
        free_reduce(letters, rank)
    }

    /// Compact notation: `a`..`z` are generators 0..25, upper case is the
    /// inverse (`A` = a⁻¹). Whitespace is ignored.
    pub fn parse_compact(text: &str, rank: usize) -> Result<Word> {
        let mut letters = Vec::with_capacity(text.len());
        for ch in text.chars().filter(|c| !c.is_whitespace()) {
            let l = match ch {
                'a'..='z' => Letter::pos(ch as usize - 'a' as usize),
                'A'..='Z' => Letter::neg(ch as usize - 'A' as usize),
                '1' => continue,
                _ => {
                    return Err(Error::MalformedInput(format!(
                        "unexpected character {ch:?} in compact word"
                    )))
                }
            };
            letters.push(l);
        }
        free_reduce(letters, rank)
    }

    /// Inverse of [`Word::parse_compact`]; only meaningful for rank ≤ 26.
    pub fn to_compact(&self) -> String {
        self.letters
            .iter()
            .map(|l| {
                let base = if l.is_positive() { b'a' } else { b'A' };
                (base + l.index() as u8) as char
            })
            .collect()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
            rank: self.rank,
        }
    }

    /// Free product `self · other`.
    ///
    /// Panics if the ranks differ.
    pub fn concat(&self, other: &Word) -> Word {
        assert_eq!(self.rank, other.rank, "multiplying words of different rank");
        // Only the seam can cancel.
        let mut k = 0;
        let (a, b) = (&self.letters, &other.letters);
        while k < a.len() && k < b.len() && a[a.len() - 1 - k].is_inverse_of(b[k]) {
            k += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * k);
        letters.extend_from_slice(&a[..a.len() - k]);
        letters.extend_from_slice(&b[k..]);
        Word {
            letters,
            rank: self.rank,
        }
    }

    /// `self^e` for any integer `e`.
    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let n = e.unsigned_abs();
        if n == 0 || base.is_empty() {
            return Word::identity(self.rank);
        }
        let (conj, core) = base.cyclic_reduce();
        let mut letters = Vec::with_capacity(conj.len() * 2 + core.len() * n as usize);
        letters.extend_from_slice(&conj.letters);
        for _ in 0..n {
            letters.extend_from_slice(&core.letters);
        }
        letters.extend(conj.letters.iter().rev().map(|l| l.inverse()));
        Word {
            letters,
            rank: self.rank,
        }
    }

    /// `c · self · c⁻¹`.
    pub fn conjugate_by(&self, c: &Word) -> Word {
        c.concat(self).concat(&c.inverse())
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => !f.is_inverse_of(l),
            _ => true,
        }
    }

    /// Splits `self = conjugator · core · conjugator⁻¹` with `core`
    /// cyclically reduced and `conjugator` as short as possible.
    pub fn cyclic_reduce(&self) -> (Word, Word) {
        let n = self.letters.len();
        let mut k = 0;
        while 2 * k + 1 < n && self.letters[k].is_inverse_of(self.letters[n - 1 - k]) {
            k += 1;
        }
        let conjugator = Word {
            letters: self.letters[..k].to_vec(),
            rank: self.rank,
        };
        let core = Word {
            letters: self.letters[k..n - k].to_vec(),
            rank: self.rank,
        };
        (conjugator, core)
    }

    /// The primitive root `u` and maximal exponent `m` with `self = u^m`.
    pub fn maximal_root(&self) -> Result<(Word, u64)> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let (conj, core) = self.cyclic_reduce();
        let period = smallest_period(&core.letters);
        let n = core.len();
        let (period, exponent) = if n % period == 0 {
            (period, n / period)
        } else {
            (n, 1)
        };
        if exponent == 1 {
            return Ok((self.clone(), 1));
        }
        let root_core = Word {
            letters: core.letters[..period].to_vec(),
            rank: self.rank,
        };
        Ok((root_core.conjugate_by(&conj), exponent as u64))
    }

    /// Largest `k` with `self = s^(p^k)` for some word `s`.
    pub fn nu_p(&self, p: u64) -> Result<u32> {
        if !arith::is_prime(p) {
            return Err(Error::MalformedInput(format!("{p} is not prime")));
        }
        let (_, m) = self.maximal_root()?;
        Ok(arith::valuation(m, p))
    }

    /// Signed number of occurrences of `g`.
    pub fn exponent_sum(&self, g: GeneratorId) -> i64 {
        self.letters
            .iter()
            .filter(|l| l.generator == g)
            .map(|l| l.exponent())
            .sum()
    }

    /// Exponent sums of every generator, in generator order.
    pub fn exponent_sums(&self) -> Vec<i64> {
        let mut sums = vec![0i64; self.rank];
        for l in &self.letters {
            sums[l.index()] += l.exponent();
        }
        sums
    }

    /// Representative of the conjugacy class of `self` up to inversion:
    /// the least rotation of the cyclic core of `self` or of its inverse.
    pub fn cyclic_canonical(&self) -> Word {
        let (_, core) = self.cyclic_reduce();
        let inv = core.inverse();
        let a = least_rotation(&core.letters);
        let b = least_rotation(&inv.letters);
        Word {
            letters: a.min(b),
            rank: self.rank,
        }
    }
}

/// True iff the cyclic reductions of `w1` and `w2` are rotations of each other.
pub fn are_conjugate(w1: &Word, w2: &Word) -> bool {
    if w1.rank != w2.rank {
        return false;
    }
    let (_, c1) = w1.cyclic_reduce();
    let (_, c2) = w2.cyclic_reduce();
    if c1.len() != c2.len() {
        return false;
    }
    if c1.is_empty() {
        return true;
    }
    let mut doubled = c1.letters.clone();
    doubled.extend_from_slice(&c1.letters);
    contains(&doubled, &c2.letters)
}

impl<'a> Mul<&'a Word> for &'a Word {
    type Output = Word;

    fn mul(self, rhs: &'a Word) -> Word {
        self.concat(rhs)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        if self.rank <= 26 {
            return write!(f, "{}", self.to_compact());
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "x{}", l.index())?;
            if !l.is_positive() {
                write!(f, "^-1")?;
            }
        }
        Ok(())
    }
}

/// KMP failure function.
fn failure<T: PartialEq>(s: &[T]) -> Vec<usize> {
    let mut fail = vec![0usize; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail
}

fn smallest_period<T: PartialEq>(s: &[T]) -> usize {
    if s.is_empty() {
        return 0;
    }
    s.len() - failure(s)[s.len() - 1]
}

fn contains<T: PartialEq>(haystack: &[T], needle: &[T]) -> bool {
    if needle.is_empty() {
        return true;
    }
    let fail = failure(needle);
    let mut k = 0;
    for x in haystack {
        while k > 0 && *x != needle[k] {
            k = fail[k - 1];
        }
        if *x == needle[k] {
            k += 1;
        }
        if k == needle.len() {
            return true;
        }
    }
    false
}

fn least_rotation<T: Ord + Clone>(s: &[T]) -> Vec<T> {
    (0..s.len().max(1))
        .map(|i| {
            let mut r = Vec::with_capacity(s.len());
            r.extend_from_slice(&s[i.min(s.len())..]);
            r.extend_from_slice(&s[..i.min(s.len())]);
            r
        })
        .min()
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse_compact(s, 3).unwrap()
    }

    #[test]
    fn free_reduction_examples() {
        assert!(free_reduce([Letter::pos(0), Letter::neg(0)], 2).unwrap().is_empty());
        let r = free_reduce(
            [Letter::pos(0), Letter::pos(1), Letter::neg(1), Letter::pos(0)],
            2,
        )
        .unwrap();
        assert_eq!(r.to_compact(), "aa");
        assert_eq!(w("abA").to_compact(), "abA");
        assert!(free_reduce([Letter::pos(2)], 2).is_err());
    }

    #[test]
    fn cyclic_reduction_examples() {
        let (c, k) = w("abA").cyclic_reduce();
        assert_eq!((c.to_compact(), k.to_compact()), ("a".into(), "b".into()));
        let (c, k) = w("ab").cyclic_reduce();
        assert_eq!((c.to_compact(), k.to_compact()), ("".into(), "ab".into()));
        let (c, k) = Word::identity(2).cyclic_reduce();
        assert!(c.is_empty() && k.is_empty());
    }

    #[test]
    fn maximal_root_examples() {
        let (r, m) = w("abab").maximal_root().unwrap();
        assert_eq!((r.to_compact().as_str(), m), ("ab", 2));
        let (r, m) = w("abA").maximal_root().unwrap();
        assert_eq!((r.to_compact().as_str(), m), ("abA", 1));
        let (r, m) = w("baaaB").maximal_root().unwrap();
        assert_eq!((r.to_compact().as_str(), m), ("baB", 3));
        assert_eq!(Word::identity(2).maximal_root(), Err(Error::EmptyWord));
    }

    #[test]
    fn nu_p_examples() {
        let comm4 = w("abAB").pow(4);
        assert_eq!(comm4.nu_p(2).unwrap(), 2);
        assert_eq!(w("abab").nu_p(3).unwrap(), 0);
        assert_eq!(w("a").pow(9).nu_p(3).unwrap(), 2);
        assert!(w("a").nu_p(4).is_err());
        assert_eq!(Word::identity(1).nu_p(2), Err(Error::EmptyWord));
    }

    #[test]
    fn exponent_sum_examples() {
        assert_eq!(w("abA").exponent_sum(GeneratorId(0)), 0);
        assert_eq!(w("abA").exponent_sum(GeneratorId(1)), 1);
        assert_eq!(w("aaBBB").exponent_sum(GeneratorId(1)), -3);
    }

    #[test]
    fn conjugacy_examples() {
        assert!(are_conjugate(&w("ab"), &w("ba")));
        assert!(!are_conjugate(&w("ab"), &w("Ab")));
        assert!(are_conjugate(&Word::identity(3), &Word::identity(3)));
        assert!(are_conjugate(&w("cabC"), &w("ba")));
    }

    #[test]
    fn pow_and_concat() {
        assert_eq!(w("abA").pow(3).to_compact(), "abbbA");
        assert_eq!(w("ab").pow(-2).to_compact(), "BABA");
        assert_eq!((&w("ab") * &w("Bc")).to_compact(), "ac");
        assert!(w("ab").pow(0).is_empty());
    }

    #[test]
    fn cyclic_canonical_identifies_rotations_and_inverses() {
        let a = w("abc").cyclic_canonical();
        assert_eq!(a, w("bca").cyclic_canonical());
        assert_eq!(a, w("CBA").cyclic_canonical());
        assert_eq!(a, w("babcB").cyclic_canonical());
    }
}

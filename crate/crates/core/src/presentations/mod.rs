//! Finite presentations in maximal-root power form and their abelian
//! invariants.

mod matrix;
mod parse;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

pub use matrix::{smith_diagonal, smith_normal_form, IntegerMatrix, SmithForm};
pub use parse::parse_word;

use crate::arith::{self, bigint_vec_json};
use crate::error::{Error, Result};
use crate::words::{GeneratorId, Word};

/// A relator `root^exponent` with `root` not a proper power.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PowerRelator {
    root: Word,
    exponent: u64,
}

impl PowerRelator {
    /// Normalizes `word` into maximal-root form.
    pub fn from_word(word: &Word) -> Result<PowerRelator> {
        let (root, exponent) = word.maximal_root()?;
        Ok(PowerRelator { root, exponent })
    }

    pub fn root(&self) -> &Word {
        &self.root
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// The relator as a single word, `root^exponent`.
    pub fn full_word(&self) -> Word {
        self.root.pow(self.exponent as i64)
    }
}

/// `⟨ generator_names | relators ⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    generator_names: Vec<String>,
    relators: Vec<PowerRelator>,
}

impl Presentation {
    /// Builds a presentation, normalizing each relator into maximal-root form.
    pub fn new(generator_names: Vec<String>, relators: Vec<Word>) -> Result<Presentation> {
        for (i, n) in generator_names.iter().enumerate() {
            if !is_valid_name(n) {
                return Err(Error::MalformedInput(format!("invalid generator name {n:?}")));
            }
            if generator_names[..i].contains(n) {
                return Err(Error::MalformedInput(format!("duplicate generator name {n:?}")));
            }
        }
        let rank = generator_names.len();
        let relators = relators
            .iter()
            .enumerate()
            .map(|(index, w)| {
                if w.rank() != rank {
                    return Err(Error::RankMismatch {
                        expected: rank,
                        found: w.rank(),
                    });
                }
                if w.is_empty() {
                    return Err(Error::TrivialRelator { index });
                }
                PowerRelator::from_word(w)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation {
            generator_names,
            relators,
        })
    }

    /// Generators named `a`, `b`, ... (or `x1`, `x2`, ... past 26).
    pub fn default_names(rank: usize) -> Vec<String> {
        if rank <= 26 {
            (0..rank).map(|i| ((b'a' + i as u8) as char).to_string()).collect()
        } else {
            (1..=rank).map(|i| format!("x{i}")).collect()
        }
    }

    pub fn parse(text: &str) -> Result<Presentation> {
        let (names, words) = parse::parse_raw(text)?;
        Presentation::new(names, words)
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn rank(&self) -> usize {
        self.generator_names.len()
    }

    pub fn relators(&self) -> &[PowerRelator] {
        &self.relators
    }

    pub fn full_relators(&self) -> Vec<Word> {
        self.relators.iter().map(PowerRelator::full_word).collect()
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        parse_word(text, &self.generator_names)
    }

    /// `|X| - |R|`.
    pub fn deficiency(&self) -> i64 {
        self.rank() as i64 - self.relators.len() as i64
    }

    /// `n - Σ_r p^(-ν_p(r))`.
    pub fn p_deficiency(&self, p: u64) -> Result<BigRational> {
        if !arith::is_prime(p) {
            return Err(Error::MalformedInput(format!("{p} is not prime")));
        }
        let mut total = arith::int(self.rank() as i64);
        for r in &self.relators {
            let nu = arith::valuation(r.exponent, p);
            total -= BigRational::new(BigInt::one(), BigInt::from(p).pow(nu));
        }
        Ok(total)
    }

    /// Entry (i, j) is the exponent sum of generator j in relator i.
    pub fn abelianization_matrix(&self) -> IntegerMatrix {
        let rows: Vec<Vec<BigInt>> = self
            .relators
            .iter()
            .map(|r| {
                (0..self.rank())
                    .map(|j| {
                        BigInt::from(r.root.exponent_sum(GeneratorId(j))) * BigInt::from(r.exponent)
                    })
                    .collect()
            })
            .collect();
        IntegerMatrix::from_rows(&rows, self.rank())
    }

    pub fn abelian_invariants(&self) -> AbelianInvariants {
        AbelianInvariants::from_relation_matrix(&self.abelianization_matrix())
    }

    pub fn has_infinite_abelianization(&self) -> bool {
        self.abelian_invariants().betti >= 1
    }

    /// Renders a word with this presentation's generator names.
    pub fn render_word(&self, w: &Word) -> String {
        render_word(w, &self.generator_names)
    }

    pub fn render_relator(&self, r: &PowerRelator) -> String {
        let root = self.render_word(&r.root);
        if r.exponent == 1 {
            root
        } else if r.root.len() == 1 {
            let l = r.root.letters()[0];
            let sign = if l.is_positive() { "" } else { "-" };
            format!("{}^{sign}{}", self.generator_names[l.index()], r.exponent)
        } else {
            format!("({root})^{}", r.exponent)
        }
    }

    pub fn to_json(&self) -> PresentationJson {
        PresentationJson {
            generators: self.generator_names.clone(),
            relators: self
                .relators
                .iter()
                .map(|r| RelatorJson {
                    root: self.render_word(&r.root),
                    exponent: r.exponent,
                })
                .collect(),
        }
    }

    pub fn from_json(json: &PresentationJson) -> Result<Presentation> {
        let words = json
            .relators
            .iter()
            .map(|r| {
                if r.exponent == 0 {
                    return Err(Error::MalformedInput("relator exponent 0".into()));
                }
                Ok(parse_word(&r.root, &json.generators)?.pow(r.exponent as i64))
            })
            .collect::<Result<Vec<_>>>()?;
        Presentation::new(json.generators.clone(), words)
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rels: Vec<String> = self.relators.iter().map(|r| self.render_relator(r)).collect();
        write!(f, "< {} | {} >", self.generator_names.join(", "), rels.join(", "))
    }
}

fn is_valid_name(n: &str) -> bool {
    let mut chars = n.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Space-separated letters, inverses written `x^-1`; the identity is `1`.
pub fn render_word(w: &Word, names: &[String]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.letters()
        .iter()
        .map(|l| {
            let n = &names[l.index()];
            if l.is_positive() {
                n.clone()
            } else {
                format!("{n}^-1")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatorJson {
    pub root: String,
    pub exponent: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresentationJson {
    pub generators: Vec<String>,
    pub relators: Vec<RelatorJson>,
}

/// Abelianization `Z^betti ⊕ Z/d₁ ⊕ … ⊕ Z/d_k` with `d₁ | d₂ | …`, each `dᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbelianInvariants {
    pub betti: usize,
    #[serde(with = "bigint_vec_json")]
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    /// Invariants of `Z^cols / rowspace(m)`.
    pub fn from_relation_matrix(m: &IntegerMatrix) -> AbelianInvariants {
        let diag = smith_diagonal(m);
        let nonzero = diag.iter().filter(|d| !d.is_zero()).count();
        AbelianInvariants {
            betti: m.cols() - nonzero,
            torsion: diag.into_iter().filter(|d| d.abs() > BigInt::one()).collect(),
        }
    }

    /// Rank of `A ⊗ F_p`: the largest number of `C_p` summands.
    pub fn p_rank(&self, p: u64) -> usize {
        let p = BigInt::from(p);
        self.betti + self.torsion.iter().filter(|d| d.is_multiple_of(&p)).count()
    }
}

/// Relation matrix of a list of words: row i holds the exponent sums of word i.
pub fn relation_matrix(words: &[Word], rank: usize) -> IntegerMatrix {
    let rows: Vec<Vec<i64>> = words.iter().map(|w| w.exponent_sums()).collect();
    IntegerMatrix::from_rows(&rows, rank)
}

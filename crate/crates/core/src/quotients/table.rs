use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{Letter, Word};

/// How a coset table was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupTag {
    KernelOfWitness,
    ToddCoxeter,
}

/// Complete right action of the free generators on the cosets of a
/// finite-index subgroup. Coset 0 is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    count: usize,
    forward: Vec<Vec<u32>>,
    backward: Vec<Vec<u32>>,
    tag: SubgroupTag,
}

impl CosetTable {
    /// Builds a table from the forward action `forward[g][c] = c·x_g`,
    /// checking completeness and bijectivity.
    pub fn from_forward(count: usize, forward: Vec<Vec<usize>>, tag: SubgroupTag) -> Result<Self> {
        if count == 0 {
            return Err(Error::MalformedInput("coset table with no cosets".into()));
        }
        let mut fwd = Vec::with_capacity(forward.len());
        let mut bwd = Vec::with_capacity(forward.len());
        for (g, col) in forward.into_iter().enumerate() {
            if col.len() != count {
                return Err(Error::MalformedInput(format!(
                    "generator {g} acts on {} cosets, expected {count}",
                    col.len()
                )));
            }
            let mut inv = vec![u32::MAX; count];
            for (c, &d) in col.iter().enumerate() {
                if d >= count || inv[d] != u32::MAX {
                    return Err(Error::MalformedInput(format!(
                        "generator {g} does not act bijectively"
                    )));
                }
                inv[d] = c as u32;
            }
            fwd.push(col.into_iter().map(|x| x as u32).collect());
            bwd.push(inv);
        }
        Ok(CosetTable {
            count,
            forward: fwd,
            backward: bwd,
            tag,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Index of the subgroup.
    pub fn index(&self) -> usize {
        self.count
    }

    pub fn rank(&self) -> usize {
        self.forward.len()
    }

    pub fn tag(&self) -> SubgroupTag {
        self.tag
    }

    pub fn apply(&self, coset: usize, letter: Letter) -> usize {
        let col = if letter.is_positive() {
            &self.forward[letter.index()]
        } else {
            &self.backward[letter.index()]
        };
        col[coset] as usize
    }

    /// Coset reached from `coset` by reading `w` left to right.
    pub fn trace(&self, coset: usize, w: &Word) -> usize {
        w.letters().iter().fold(coset, |c, &l| self.apply(c, l))
    }

    /// Permutation of the cosets induced by `w`.
    pub fn word_action(&self, w: &Word) -> Vec<usize> {
        (0..self.count).map(|c| self.trace(c, w)).collect()
    }

    /// Cycles of `w` on the cosets, each led by its least coset, ordered by
    /// that coset.
    pub fn word_cycles(&self, w: &Word) -> Vec<Vec<usize>> {
        let act = self.word_action(w);
        let mut seen = vec![false; self.count];
        let mut cycles = Vec::new();
        for start in 0..self.count {
            if seen[start] {
                continue;
            }
            let mut c = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                c.push(x);
                x = act[x];
            }
            cycles.push(c);
        }
        cycles
    }

    /// Forward action column for generator `g`.
    pub fn column(&self, g: usize) -> Vec<usize> {
        self.forward[g].iter().map(|&x| x as usize).collect()
    }

    /// True if every coset is reachable from coset 0.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.count];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        let mut n = 1;
        while let Some(c) = queue.pop_front() {
            for col in self.forward.iter().chain(&self.backward) {
                let d = col[c] as usize;
                if !seen[d] {
                    seen[d] = true;
                    n += 1;
                    queue.push_back(d);
                }
            }
        }
        n == self.count
    }

    pub fn to_json(&self, names: &[String]) -> CosetTableJson {
        let mut action = BTreeMap::new();
        for (g, name) in names.iter().enumerate().take(self.rank()) {
            action.insert(name.clone(), self.column(g));
            action.insert(
                format!("{name}^-1"),
                self.backward[g].iter().map(|&x| x as usize).collect(),
            );
        }
        CosetTableJson {
            count: self.count,
            action,
        }
    }

    pub fn from_json(json: &CosetTableJson, names: &[String], tag: SubgroupTag) -> Result<Self> {
        let forward = names
            .iter()
            .map(|n| {
                json.action
                    .get(n)
                    .cloned()
                    .ok_or_else(|| Error::MalformedInput(format!("no action given for `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let table = Self::from_forward(json.count, forward, tag)?;
        for (g, n) in names.iter().enumerate() {
            if let Some(inv) = json.action.get(&format!("{n}^-1")) {
                if *inv != table.backward[g].iter().map(|&x| x as usize).collect::<Vec<_>>() {
                    return Err(Error::MalformedInput(format!(
                        "action of `{n}^-1` is not inverse to `{n}`"
                    )));
                }
            }
        }
        Ok(table)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetTableJson {
    pub count: usize,
    pub action: BTreeMap<String, Vec<usize>>,
}

//! Coset enumeration (HLT strategy with coincidence processing).

use std::collections::VecDeque;

use super::table::{CosetTable, SubgroupTag};
use crate::error::{Error, Result};
use crate::presentations::Presentation;
use crate::words::Word;

const NONE: u32 = u32::MAX;

struct Enumerator {
    cols: usize,
    table: Vec<Vec<u32>>,
    parent: Vec<u32>,
    cap: usize,
    queue: VecDeque<u32>,
}

fn column(l: &crate::words::Letter) -> usize {
    2 * l.index() + usize::from(!l.is_positive())
}

impl Enumerator {
    fn new(rank: usize, cap: usize) -> Self {
        Enumerator {
            cols: 2 * rank,
            table: vec![vec![NONE; 2 * rank]],
            parent: vec![0],
            cap,
            queue: VecDeque::new(),
        }
    }

    fn live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn define(&mut self, c: u32, x: usize) -> Result<()> {
        if self.table.len() >= self.cap {
            return Err(Error::BudgetExceeded {
                what: "cosets",
                cap: self.cap as u64,
            });
        }
        let d = self.table.len() as u32;
        self.table.push(vec![NONE; self.cols]);
        self.parent.push(d);
        self.table[c as usize][x] = d;
        self.table[d as usize][x ^ 1] = c;
        Ok(())
    }

    fn rep(&mut self, c: u32) -> u32 {
        let mut r = c;
        while self.parent[r as usize] != r {
            r = self.parent[r as usize];
        }
        let mut c = c;
        while self.parent[c as usize] != r {
            let next = self.parent[c as usize];
            self.parent[c as usize] = r;
            c = next;
        }
        r
    }

    fn merge(&mut self, k: u32, l: u32) {
        let (k, l) = (self.rep(k), self.rep(l));
        if k == l {
            return;
        }
        let (lo, hi) = if k < l { (k, l) } else { (l, k) };
        self.parent[hi as usize] = lo;
        self.queue.push_back(hi);
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.merge(a, b);
        while let Some(c) = self.queue.pop_front() {
            for x in 0..self.cols {
                let d = self.table[c as usize][x];
                if d == NONE {
                    continue;
                }
                if self.table[d as usize][x ^ 1] == c {
                    self.table[d as usize][x ^ 1] = NONE;
                }
                let e1 = self.rep(c);
                let e2 = self.rep(d);
                let t1 = self.table[e1 as usize][x];
                let t2 = self.table[e2 as usize][x ^ 1];
                if t1 != NONE {
                    self.merge(e2, t1);
                } else if t2 != NONE {
                    self.merge(e1, t2);
                } else {
                    self.table[e1 as usize][x] = e2;
                    self.table[e2 as usize][x ^ 1] = e1;
                }
            }
        }
    }

    fn scan_and_fill(&mut self, alpha: u32, w: &[usize]) -> Result<()> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = alpha;
        let mut b = alpha;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.table[f as usize][w[i]] != NONE {
                f = self.table[f as usize][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != alpha {
                    self.coincidence(f, alpha);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b as usize][w[j as usize] ^ 1] != NONE {
                b = self.table[b as usize][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.table[f as usize][w[i]] = b;
                self.table[b as usize][w[i] ^ 1] = f;
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }

    /// Renumbers live cosets in breadth-first order from coset 0.
    fn compact(mut self, rank: usize) -> Result<CosetTable> {
        let n = self.table.len();
        let mut new_id = vec![NONE; n];
        let mut order = vec![0u32];
        new_id[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let c = order[head];
            head += 1;
            for x in 0..self.cols {
                let d = self.table[c as usize][x];
                let d = if d == NONE { d } else { self.rep(d) };
                if d == NONE {
                    return Err(Error::Internal("incomplete coset table after enumeration".into()));
                }
                if new_id[d as usize] == NONE {
                    new_id[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut forward = vec![vec![0usize; order.len()]; rank];
        for (i, &c) in order.iter().enumerate() {
            for (g, col) in forward.iter_mut().enumerate() {
                let d = self.rep(self.table[c as usize][2 * g]);
                col[i] = new_id[d as usize] as usize;
            }
        }
        CosetTable::from_forward(order.len(), forward, SubgroupTag::ToddCoxeter)
    }
}

/// Enumerates the cosets of the subgroup generated by `subgroup` in the group
/// presented by `p`. At most `max_cosets` cosets are ever defined.
pub fn todd_coxeter(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> Result<CosetTable> {
    let rank = p.rank();
    for w in subgroup {
        if w.rank() != rank {
            return Err(Error::RankMismatch {
                expected: rank,
                found: w.rank(),
            });
        }
    }
    let relators: Vec<Vec<usize>> = p
        .full_relators()
        .iter()
        .map(|r| r.letters().iter().map(column).collect())
        .collect();
    let mut e = Enumerator::new(rank, max_cosets.max(1));
    for w in subgroup {
        let cols: Vec<usize> = w.letters().iter().map(column).collect();
        let start = e.rep(0);
        e.scan_and_fill(start, &cols)?;
    }
    let mut alpha = 0u32;
    while (alpha as usize) < e.table.len() {
        for r in &relators {
            if !e.live(alpha) {
                break;
            }
            e.scan_and_fill(alpha, r)?;
        }
        if e.live(alpha) {
            for x in 0..e.cols {
                if e.table[alpha as usize][x] == NONE {
                    e.define(alpha, x)?;
                }
            }
        }
        alpha += 1;
    }
    e.compact(rank)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(t: &str) -> Presentation {
        Presentation::parse(t).unwrap()
    }

    #[test]
    fn s3_over_trivial_and_cyclic_subgroups() {
        let p = pres("< a, b | a^2, b^3, (a b)^2 >");
        let t = todd_coxeter(&p, &[], 1000).unwrap();
        assert_eq!(t.index(), 6);
        let t = todd_coxeter(&p, &[p.parse_word("a").unwrap()], 1000).unwrap();
        assert_eq!(t.index(), 3);
        let t = todd_coxeter(&p, &[p.parse_word("b").unwrap()], 1000).unwrap();
        assert_eq!(t.index(), 2);
        for c in 0..t.count() {
            for r in p.full_relators() {
                assert_eq!(t.trace(c, &r), c);
            }
        }
    }

    #[test]
    fn larger_finite_groups() {
        let a5 = pres("< a, b | a^2, b^3, (a b)^5 >");
        assert_eq!(todd_coxeter(&a5, &[], 10_000).unwrap().index(), 60);
        let cyc = pres("< a | a^12 >");
        assert_eq!(todd_coxeter(&cyc, &[], 100).unwrap().index(), 12);
        let q8 = pres("< a, b | a^4, a^2 b^-2, b a b^-1 a >");
        assert_eq!(todd_coxeter(&q8, &[], 1000).unwrap().index(), 8);
    }

    #[test]
    fn trivial_group_and_subgroup_equal_to_group() {
        let p = pres("< a, b | a b^-1, a^3, b^2 >");
        assert_eq!(todd_coxeter(&p, &[], 100).unwrap().index(), 1);
        let z = pres("< a | a^5 >");
        assert_eq!(todd_coxeter(&z, &[z.parse_word("a").unwrap()], 100).unwrap().index(), 1);
    }

    #[test]
    fn infinite_index_hits_budget() {
        let p = pres("< a, b | a^2, b^3, (a b)^7 >");
        assert_eq!(
            todd_coxeter(&p, &[], 10_000),
            Err(Error::BudgetExceeded { what: "cosets", cap: 10_000 })
        );
    }
}

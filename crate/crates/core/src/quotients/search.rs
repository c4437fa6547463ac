//! Backtracking search for finite quotients with prescribed relator-root
//! orders.
//!
//! Generator images are assigned in declaration order. The first generator
//! only ranges over one representative per conjugacy class (the
//! lexicographically least permutation of each cycle type), later generators
//! over all permutations in lexicographic order. Relators are checked as soon
//! as every generator in their root has an image.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_integer::Integer;

use super::perm::{order_of_images, Permutation};
use super::QuotientWitness;
use crate::error::{Error, Result};
use crate::presentations::Presentation;

/// Which orders the relator roots must have in the quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Targets {
    /// Every root keeps its full exponent as its order.
    NoCollapse,
    /// Root `i` must have order exactly `orders[i]`; each must divide the
    /// relator's exponent.
    Orders(Vec<u64>),
    /// Any homomorphism with non-trivial image; achieved orders are whatever
    /// they turn out to be.
    Homomorphism,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Permutation images of degree `lo..=hi`.
    Symmetric { lo: usize, hi: usize },
    /// Images in `Z/k` for moduli `k` in `lo..=hi`.
    Cyclic { lo: usize, hi: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    /// Return any witness.
    First,
    /// Return the least witness by degree, then by flattened image arrays.
    ExhaustiveMinimal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub nodes: u64,
    pub time_ms: Option<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            nodes: super::DEFAULT_SEARCH_NODES,
            time_ms: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchParams {
    pub targets: Targets,
    pub family: Family,
    pub mode: SearchMode,
    pub budget: SearchBudget,
    pub threads: usize,
}

impl SearchParams {
    /// Exhaustive-minimal search with the default budget on one thread.
    pub fn new(targets: Targets, family: Family) -> Self {
        SearchParams {
            targets,
            family,
            mode: SearchMode::ExhaustiveMinimal,
            budget: SearchBudget::default(),
            threads: 1,
        }
    }

    pub fn mode(mut self, mode: SearchMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn budget(mut self, budget: SearchBudget) -> Self {
        self.budget = budget;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Requirement {
    Exact(u64),
    Divides(u64),
}

impl Requirement {
    fn accepts(self, order: u64) -> bool {
        match self {
            Requirement::Exact(t) => order == t,
            Requirement::Divides(m) => m % order == 0,
        }
    }
}

struct RelatorCheck {
    /// (generator, positive) per letter of the root.
    letters: Vec<(usize, bool)>,
    /// Exponent sum of each generator in the root.
    sums: Vec<i64>,
    req: Requirement,
}

struct Problem {
    rank: usize,
    relators: Vec<RelatorCheck>,
    /// Relators to check once generator `level` is assigned.
    by_level: Vec<Vec<usize>>,
    /// Order requirements on single generators (from one-letter roots).
    gen_reqs: Vec<Vec<Requirement>>,
    nontrivial: bool,
}

impl Problem {
    fn new(p: &Presentation, targets: &Targets) -> Result<Problem> {
        let rank = p.rank();
        let reqs: Vec<Requirement> = match targets {
            Targets::NoCollapse => p.relators().iter().map(|r| Requirement::Exact(r.exponent())).collect(),
            Targets::Orders(o) => {
                if o.len() != p.relators().len() {
                    return Err(Error::MalformedInput(format!(
                        "{} target orders for {} relators",
                        o.len(),
                        p.relators().len()
                    )));
                }
                o.iter()
                    .zip(p.relators())
                    .map(|(&t, r)| {
                        if t == 0 || r.exponent() % t != 0 {
                            Err(Error::MalformedInput(format!(
                                "target order {t} does not divide exponent {}",
                                r.exponent()
                            )))
                        } else {
                            Ok(Requirement::Exact(t))
                        }
                    })
                    .collect::<Result<_>>()?
            }
            Targets::Homomorphism => p.relators().iter().map(|r| Requirement::Divides(r.exponent())).collect(),
        };
        let mut relators = Vec::new();
        let mut by_level = vec![Vec::new(); rank];
        let mut gen_reqs = vec![Vec::new(); rank];
        for (r, req) in p.relators().iter().zip(reqs) {
            let letters: Vec<(usize, bool)> = r.root().letters().iter().map(|l| (l.index(), l.is_positive())).collect();
            if letters.len() == 1 {
                gen_reqs[letters[0].0].push(req);
            }
            let level = letters.iter().map(|l| l.0).max().expect("roots are non-empty");
            by_level[level].push(relators.len());
            relators.push(RelatorCheck {
                letters,
                sums: r.root().exponent_sums(),
                req,
            });
        }
        Ok(Problem {
            rank,
            relators,
            by_level,
            gen_reqs,
            nontrivial: matches!(targets, Targets::Homomorphism),
        })
    }

    fn gen_ok(&self, g: usize, order: u64) -> bool {
        self.gen_reqs[g].iter().all(|r| r.accepts(order))
    }
}

/// Shared search state across degrees and worker threads.
struct Control {
    nodes: AtomicU64,
    node_cap: u64,
    deadline: Option<Instant>,
    budget_hit: AtomicBool,
    stop: AtomicBool,
    best: AtomicUsize,
    minimal: bool,
}

impl Control {
    /// Counts one node; false once the search must abort.
    fn tick(&self, first_index: usize) -> bool {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.node_cap {
            self.budget_hit.store(true, Ordering::Relaxed);
        }
        if n.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.budget_hit.store(true, Ordering::Relaxed);
                }
            }
        }
        !(self.budget_hit.load(Ordering::Relaxed)
            || self.stop.load(Ordering::Relaxed)
            || (self.minimal && self.best.load(Ordering::Relaxed) < first_index))
    }
}

enum Explore {
    Found(QuotientWitness),
    Exhausted,
    Aborted,
}

/// Least permutation (as an image array) of every cycle type of degree `d`,
/// sorted.
pub fn class_representatives(d: usize) -> Vec<Permutation> {
    let mut reps = Vec::new();
    let mut parts = Vec::new();
    partitions(d, d, &mut parts, &mut |p: &[usize]| {
        // fixed points first, then cycles by increasing length on consecutive points
        let mut lens: Vec<usize> = p.to_vec();
        lens.sort_unstable();
        let mut images = Vec::with_capacity(d);
        let mut start = 0;
        for len in lens {
            for i in 0..len {
                images.push(start + (i + 1) % len);
            }
            start += len;
        }
        reps.push(Permutation::from_images(images).expect("valid cycle layout"));
    });
    reps.sort();
    reps
}

fn partitions(n: usize, max: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
    if n == 0 {
        f(cur);
        return;
    }
    for k in (1..=max.min(n)).rev() {
        cur.push(k);
        partitions(n - k, k, cur, f);
        cur.pop();
    }
}

fn next_permutation(a: &mut [u32]) -> bool {
    let n = a.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

struct SymmetricSearch<'a> {
    problem: &'a Problem,
    degree: usize,
    ctl: &'a Control,
}

impl SymmetricSearch<'_> {
    fn relators_hold(&self, level: usize, images: &[Vec<u32>], inverses: &[Vec<u32>]) -> bool {
        let mut img = vec![0u32; self.degree];
        for &ri in &self.problem.by_level[level] {
            let rel = &self.problem.relators[ri];
            for (start, slot) in img.iter_mut().enumerate() {
                let mut x = start as u32;
                for &(g, pos) in &rel.letters {
                    x = if pos { images[g][x as usize] } else { inverses[g][x as usize] };
                }
                *slot = x;
            }
            if !rel.req.accepts(order_of_images(&img)) {
                return false;
            }
        }
        true
    }

    fn assign(&self, level: usize, image: Vec<u32>, images: &mut Vec<Vec<u32>>, inverses: &mut Vec<Vec<u32>>) -> bool {
        let mut inv = vec![0u32; self.degree];
        for (i, &x) in image.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        images.truncate(level);
        inverses.truncate(level);
        images.push(image);
        inverses.push(inv);
        self.relators_hold(level, images, inverses)
    }

    fn explore_first(&self, idx: usize, rep: &Permutation) -> Explore {
        if !self.ctl.tick(idx) {
            return Explore::Aborted;
        }
        let mut images = Vec::with_capacity(self.problem.rank);
        let mut inverses = Vec::with_capacity(self.problem.rank);
        if !self.assign(0, rep.raw().to_vec(), &mut images, &mut inverses) {
            return Explore::Exhausted;
        }
        self.explore(1, idx, &mut images, &mut inverses)
    }

    fn explore(&self, level: usize, idx: usize, images: &mut Vec<Vec<u32>>, inverses: &mut Vec<Vec<u32>>) -> Explore {
        if level == self.problem.rank {
            if self.problem.nontrivial && images.iter().all(|p| p.iter().enumerate().all(|(i, &x)| i as u32 == x)) {
                return Explore::Exhausted;
            }
            let perms = images.iter().map(|p| Permutation::from_raw(p.clone())).collect();
            return Explore::Found(QuotientWitness::new(self.degree, perms).expect("uniform degree"));
        }
        let mut cand: Vec<u32> = (0..self.degree as u32).collect();
        loop {
            if !self.ctl.tick(idx) {
                return Explore::Aborted;
            }
            if self.problem.gen_ok(level, order_of_images(&cand))
                && self.assign(level, cand.clone(), images, inverses)
            {
                match self.explore(level + 1, idx, images, inverses) {
                    Explore::Exhausted => {}
                    other => return other,
                }
            }
            if !next_permutation(&mut cand) {
                return Explore::Exhausted;
            }
        }
    }
}

struct CyclicSearch<'a> {
    problem: &'a Problem,
    modulus: u64,
    ctl: &'a Control,
}

impl CyclicSearch<'_> {
    fn order(&self, r: u64) -> u64 {
        self.modulus / r.gcd(&self.modulus)
    }

    fn relators_hold(&self, level: usize, residues: &[u64]) -> bool {
        let k = self.modulus as i128;
        self.problem.by_level[level].iter().all(|&ri| {
            let rel = &self.problem.relators[ri];
            let v: i128 = rel
                .sums
                .iter()
                .zip(residues)
                .map(|(&s, &r)| s as i128 * r as i128)
                .sum::<i128>()
                .rem_euclid(k);
            rel.req.accepts(self.order(v as u64))
        })
    }

    fn explore(&self, level: usize, idx: usize, residues: &mut Vec<u64>) -> Explore {
        if level == self.problem.rank {
            if self.problem.nontrivial && residues.iter().all(|&r| r == 0) {
                return Explore::Exhausted;
            }
            let w = QuotientWitness::cyclic(self.modulus as usize, residues).expect("positive modulus");
            return Explore::Found(w);
        }
        let range: Vec<u64> = if level == 0 { vec![idx as u64] } else { (0..self.modulus).collect() };
        for r in range {
            if !self.ctl.tick(idx) {
                return Explore::Aborted;
            }
            if !self.problem.gen_ok(level, self.order(r)) {
                continue;
            }
            residues.truncate(level);
            residues.push(r);
            if !self.relators_hold(level, residues) {
                continue;
            }
            match self.explore(level + 1, idx, residues) {
                Explore::Exhausted => {}
                other => return other,
            }
        }
        Explore::Exhausted
    }
}

/// Runs `explore(i)` for first-level candidates `0..n` on up to `threads`
/// workers. Returns the witness for the least successful candidate in
/// minimal mode, any witness in first mode.
fn drive<F>(n: usize, threads: usize, ctl: &Control, explore: F) -> Option<QuotientWitness>
where
    F: Fn(usize) -> Explore + Sync,
{
    ctl.best.store(usize::MAX, Ordering::Relaxed);
    let next = AtomicUsize::new(0);
    let found: Mutex<Vec<(usize, QuotientWitness)>> = Mutex::new(Vec::new());
    let complete: Mutex<Vec<bool>> = Mutex::new(vec![false; n]);
    let worker = || loop {
        let idx = next.fetch_add(1, Ordering::Relaxed);
        if idx >= n
            || ctl.stop.load(Ordering::Relaxed)
            || ctl.budget_hit.load(Ordering::Relaxed)
            || (ctl.minimal && ctl.best.load(Ordering::Relaxed) < idx)
        {
            break;
        }
        match explore(idx) {
            Explore::Found(w) => {
                found.lock().unwrap().push((idx, w));
                ctl.best.fetch_min(idx, Ordering::Relaxed);
                if !ctl.minimal {
                    ctl.stop.store(true, Ordering::Relaxed);
                }
                complete.lock().unwrap()[idx] = true;
            }
            Explore::Exhausted => complete.lock().unwrap()[idx] = true,
            Explore::Aborted => {}
        }
    };
    let threads = threads.clamp(1, n.max(1));
    if threads == 1 {
        worker();
    } else {
        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(worker);
            }
        });
    }
    let mut found = found.into_inner().unwrap();
    found.sort_by_key(|(i, _)| *i);
    let (best_idx, w) = found.into_iter().next()?;
    if ctl.minimal {
        let complete = complete.into_inner().unwrap();
        if !complete[..best_idx].iter().all(|&c| c) {
            return None;
        }
    }
    Some(w)
}

/// Searches for a quotient of `p` realizing the requested root orders.
///
/// Degrees (or moduli) are tried in increasing order. `Error::NotFound`
/// distinguishes an exhausted search space from a budget hit.
pub fn search_witness(p: &Presentation, params: &SearchParams) -> Result<QuotientWitness> {
    let problem = Problem::new(p, &params.targets)?;
    let ctl = Control {
        nodes: AtomicU64::new(0),
        node_cap: params.budget.nodes,
        deadline: params.budget.time_ms.map(|ms| Instant::now() + Duration::from_millis(ms)),
        budget_hit: AtomicBool::new(false),
        stop: AtomicBool::new(false),
        best: AtomicUsize::new(usize::MAX),
        minimal: params.mode == SearchMode::ExhaustiveMinimal,
    };
    let (lo, hi) = match params.family {
        Family::Symmetric { lo, hi } | Family::Cyclic { lo, hi } => (lo.max(1), hi),
    };
    for degree in lo..=hi {
        if problem.rank == 0 {
            if problem.nontrivial {
                break;
            }
            return QuotientWitness::new(degree, Vec::new());
        }
        let result = match params.family {
            Family::Symmetric { .. } => {
                let reps: Vec<Permutation> = class_representatives(degree)
                    .into_iter()
                    .filter(|r| problem.gen_ok(0, r.order()))
                    .collect();
                let search = SymmetricSearch {
                    problem: &problem,
                    degree,
                    ctl: &ctl,
                };
                drive(reps.len(), params.threads, &ctl, |i| search.explore_first(i, &reps[i]))
            }
            Family::Cyclic { .. } => {
                let search = CyclicSearch {
                    problem: &problem,
                    modulus: degree as u64,
                    ctl: &ctl,
                };
                drive(degree, params.threads, &ctl, |i| search.explore(0, i, &mut Vec::new()))
            }
        };
        if let Some(w) = result {
            return Ok(w);
        }
        if ctl.budget_hit.load(Ordering::Relaxed) {
            return Err(Error::NotFound { exhausted: false });
        }
    }
    Err(Error::NotFound { exhausted: true })
}

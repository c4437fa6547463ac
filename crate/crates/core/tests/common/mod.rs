//! Fixture generators shared by the integration tests.
#![allow(dead_code)]

use grpdef_core::presentations::Presentation;
use grpdef_core::quotients::{image_closure, Permutation, QuotientWitness};
use grpdef_core::words::{free_reduce, Letter, Word};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn random_word<R: Rng>(rng: &mut R, rank: usize, max_len: usize) -> Word {
    loop {
        let len = rng.gen_range(1..=max_len);
        let letters = (0..len).map(|_| {
            let g = rng.gen_range(0..rank);
            if rng.gen_bool(0.5) {
                Letter::pos(g)
            } else {
                Letter::neg(g)
            }
        });
        let w = free_reduce(letters, rank).unwrap();
        if !w.is_empty() {
            return w;
        }
    }
}

pub fn random_permutation<R: Rng>(rng: &mut R, degree: usize) -> Permutation {
    let mut images: Vec<usize> = (0..degree).collect();
    images.shuffle(rng);
    Permutation::from_images(images).unwrap()
}

/// A presentation together with a quotient that kills its relators.
pub struct Fixture {
    pub presentation: Presentation,
    pub witness: QuotientWitness,
    pub index: usize,
}

/// Random witness of degree 3..=5 on 2 or 3 generators with image of size
/// 2..=`max_index`, and relators `u^(o·t)` with `o` the order of the image
/// of `u` and `t` in {1, 2}. With `no_collapse`, always `t = 1`.
pub fn random_fixture(rng: &mut ChaCha8Rng, max_index: usize, no_collapse: bool) -> Fixture {
    loop {
        let rank = rng.gen_range(2..=3);
        let degree = rng.gen_range(3..=5);
        let images = (0..rank).map(|_| random_permutation(rng, degree)).collect();
        let witness = QuotientWitness::new(degree, images).unwrap();
        let index = match image_closure(&witness, max_index) {
            Ok(c) if c.len() >= 2 => c.len(),
            _ => continue,
        };
        let count = rng.gen_range(1..=3);
        let mut relators = Vec::new();
        for _ in 0..count {
            let u = random_word(rng, rank, 5).maximal_root().unwrap().0;
            let o = witness.order_of(&u).unwrap();
            let t = if no_collapse { 1 } else { rng.gen_range(1..=2) };
            relators.push(u.pow((o * t) as i64));
        }
        let Ok(presentation) = Presentation::new(Presentation::default_names(rank), relators) else {
            continue;
        };
        return Fixture {
            presentation,
            witness,
            index,
        };
    }
}

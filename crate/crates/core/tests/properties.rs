mod common;

use grpdef_core::arith::valuation;
use grpdef_core::presentations::{smith_normal_form, AbelianInvariants, IntegerMatrix, Presentation};
use grpdef_core::quotients::{
    combine_witnesses, image_closure, regular_coset_table, relator_root_orders, search_witness, verify_homomorphism,
    Family, QuotientWitness, SearchParams, Targets,
};
use grpdef_core::rewriting::{
    reidemeister_schreier_full, reidemeister_schreier_power_aware, rewrite_word, schreier_transversal, tietze_simplify,
    SchreierAlphabet, TietzeOptions,
};
use grpdef_core::words::{are_conjugate, free_reduce, Letter, Word};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..rank, any::<bool>()), 0..=max_len)
        .prop_map(|v| v.into_iter().map(|(g, p)| if p { Letter::pos(g) } else { Letter::neg(g) }).collect())
}

fn word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    letters(rank, max_len).prop_map(move |l| free_reduce(l, rank).unwrap())
}

fn nonempty_word(rank: usize, max_len: usize) -> impl Strategy<Value = Word> {
    word(rank, max_len).prop_filter("non-trivial", |w| !w.is_empty())
}

proptest! {
    #[test]
    fn free_reduction_is_idempotent(l in letters(3, 20)) {
        let w = free_reduce(l, 3).unwrap();
        prop_assert_eq!(free_reduce(w.letters().to_vec(), 3).unwrap(), w.clone());
        prop_assert!(w.concat(&w.inverse()).is_empty());
    }

    #[test]
    fn cyclic_reduction_recomposes(w in word(3, 16)) {
        let (c, core) = w.cyclic_reduce();
        prop_assert!(core.is_cyclically_reduced());
        prop_assert_eq!(core.conjugate_by(&c), w);
    }

    #[test]
    fn maximal_root_of_powers(u in nonempty_word(3, 6), e in 1u64..6, c in word(3, 4)) {
        let g = u.pow(e as i64).conjugate_by(&c);
        let (root, m) = g.maximal_root().unwrap();
        prop_assert_eq!(root.pow(m as i64), g.clone());
        prop_assert_eq!(root.maximal_root().unwrap().1, 1);
        prop_assert_eq!(m % e, 0);
        for p in [2u64, 3, 5] {
            prop_assert_eq!(g.nu_p(p).unwrap(), valuation(m, p));
        }
    }

    #[test]
    fn conjugates_are_detected(w in word(2, 10), c in word(2, 6)) {
        prop_assert!(are_conjugate(&w, &w.conjugate_by(&c)));
        prop_assert_eq!(w.cyclic_canonical(), w.conjugate_by(&c).cyclic_canonical());
        prop_assert_eq!(w.cyclic_canonical(), w.inverse().cyclic_canonical());
    }

    #[test]
    fn exponent_sums_are_additive(a in word(3, 10), b in word(3, 10)) {
        let s: Vec<i64> = a.exponent_sums().iter().zip(b.exponent_sums()).map(|(x, y)| x + y).collect();
        prop_assert_eq!(a.concat(&b).exponent_sums(), s);
    }

    #[test]
    fn snf_transforms(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let a = IntegerMatrix::from_rows(&data, cols);
        let f = smith_normal_form(&a);
        prop_assert_eq!(f.u.mul(&a).mul(&f.v), f.s.clone());
        prop_assert!(f.u.determinant().abs().is_one());
        prop_assert!(f.v.determinant().abs().is_one());
        let d = f.s.diagonal();
        for w in d.windows(2) {
            prop_assert!(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        prop_assert!(d.iter().all(|x| !x.is_negative()));
        if rows == cols {
            let prod: BigInt = d.iter().product();
            prop_assert_eq!(prod, a.determinant().abs());
        }
    }

    #[test]
    fn deficiency_bounds(rels in prop::collection::vec(nonempty_word(2, 8), 0..4)) {
        let p = Presentation::new(Presentation::default_names(2), rels).unwrap();
        let ab: AbelianInvariants = p.abelian_invariants();
        prop_assert!(p.deficiency() <= ab.betti as i64);
        for q in [2u64, 3, 5] {
            prop_assert!(num_rational::BigRational::from_integer(p.deficiency().into()) <= p.p_deficiency(q).unwrap());
            let r = p.abelianization_matrix().rank_mod_p(q);
            prop_assert_eq!(ab.p_rank(q), p.rank() - r);
        }
        let again = Presentation::parse(&p.to_string()).unwrap();
        prop_assert_eq!(again, p);
    }

    #[test]
    fn combined_orders_are_lcms(seed in any::<u64>(), w in nonempty_word(2, 6)) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = QuotientWitness::new(4, vec![common::random_permutation(&mut rng, 4), common::random_permutation(&mut rng, 4)]).unwrap();
        let b = QuotientWitness::new(3, vec![common::random_permutation(&mut rng, 3), common::random_permutation(&mut rng, 3)]).unwrap();
        let c = combine_witnesses(&[a.clone(), b.clone()]).unwrap();
        let (oa, ob) = (a.order_of(&w).unwrap(), b.order_of(&w).unwrap());
        prop_assert_eq!(c.order_of(&w).unwrap(), num_integer::lcm(oa, ob));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rewriting_laws(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::random_fixture(&mut rng, 48, false);
        let p = &f.presentation;
        prop_assert!(verify_homomorphism(p, &f.witness).unwrap());
        let t = regular_coset_table(&f.witness, 48).unwrap();
        prop_assert_eq!(t.index(), f.index);

        // regularity: every root acts with equal cycles of length = its order
        let orders = relator_root_orders(p, &f.witness).unwrap();
        for (r, &k) in p.relators().iter().zip(&orders) {
            prop_assert!(t.word_cycles(r.root()).iter().all(|c| c.len() as u64 == k));
            prop_assert_eq!(r.exponent() % k, 0);
        }

        // transversal
        let s = schreier_transversal(&t);
        let alpha = SchreierAlphabet::new(&t, &s);
        for (c, rep) in s.representatives().iter().enumerate() {
            prop_assert_eq!(t.trace(0, rep), c);
            let prefix = Word::from_letters(rep.letters()[..rep.len().saturating_sub(1)].to_vec(), p.rank()).unwrap();
            prop_assert!(s.representatives().contains(&prefix));
            prop_assert!(rewrite_word(rep, 0, &t, &alpha).is_empty());
        }

        let n = p.rank() as i64;
        let idx = t.index() as i64;
        let full = reidemeister_schreier_full(p, &t).unwrap();
        prop_assert_eq!(full.generator_count() as i64, idx * (n - 1) + 1);
        prop_assert_eq!(full.deficiency(), 1 + idx * (p.deficiency() - 1));

        let pa = reidemeister_schreier_power_aware(p, &t).unwrap();
        let expected: i64 = orders.iter().map(|&k| idx / k as i64).sum();
        prop_assert_eq!(pa.relators().len() as i64, expected);
        prop_assert_eq!(pa.abelian_invariants(), full.abelian_invariants());

        let simp = tietze_simplify(&full, TietzeOptions { eliminate_trivial_generators: true });
        prop_assert!(simp.deficiency() >= full.deficiency());
        prop_assert_eq!(simp.abelian_invariants(), full.abelian_invariants());
    }

    #[test]
    fn searched_witnesses_meet_their_targets(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = common::random_fixture(&mut rng, 48, true);
        let p = &f.presentation;
        let params = SearchParams::new(Targets::NoCollapse, Family::Symmetric { lo: 1, hi: 5 });
        let w = search_witness(p, &params).unwrap();
        prop_assert!(w.degree() <= f.witness.degree());
        prop_assert!(verify_homomorphism(p, &w).unwrap());
        let exps: Vec<u64> = p.relators().iter().map(|r| r.exponent()).collect();
        prop_assert_eq!(relator_root_orders(p, &w).unwrap(), exps);
        prop_assert!(image_closure(&w, 200_000).is_ok());
    }
}

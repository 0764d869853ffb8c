//! Randomized invariants across the public API.

use hecke_core::cover_model::models;
use hecke_core::finite_groups::{ConvolutionAlgebra, FinGroup, HeckeFunc, Rep};
use hecke_core::geometry::{self, Arrangement, HyperplaneFamily, InnerProduct};
use hecke_core::hecke_abstract::{Cocycle, HeckeAlgebra, HeckeParams, OmegaAction, ProductAlgElem};
use hecke_core::rational::{int, rat};
use hecke_core::reflections::{chamber_walls, AffineIso, ReflectionGroupData};
use hecke_core::rootdata::{self, LeviSubset, RootSystem};
use hecke_core::scalars::Field;
use proptest::prelude::*;

fn affine_a1() -> ReflectionGroupData {
    let fam = HyperplaneFamily::new(vec![int(1)], int(0), int(1)).unwrap();
    let arr = Arrangement::new(1, vec![rat(1, 3)], vec![(fam, true)]).unwrap();
    chamber_walls(&arr, &InnerProduct::standard(1), &[rat(1, 3)]).unwrap()
}

fn affine_a2() -> ReflectionGroupData {
    let rs = RootSystem::parse("A2").unwrap();
    let levi = LeviSubset::new(&rs, []).unwrap();
    let base = vec![rat(1, 5), rat(1, 7)];
    let arr = rootdata::depthzero_arrangement(&rs, &levi, &base).unwrap();
    let ip = rootdata::restricted_inner_product(&rs, &levi.fixed_space(&rs));
    chamber_walls(&arr, &ip, &base).unwrap()
}

fn word(rank: usize, max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..rank, 0..=max)
}

fn length_matches_distance(data: &ReflectionGroupData, w: &[usize]) {
    let g = data.word_iso(w).unwrap();
    let ginv = g.inverse().unwrap();
    let base = data.base().clone();
    let d = geometry::distance(data.arrangement(), &base, &ginv.apply(&base), true).unwrap();
    let l = data.length(&g).unwrap();
    assert_eq!(l, d);
    assert!(l <= w.len() && (w.len() - l).is_multiple_of(2), "parity of {w:?}");
    let reduced = data.word_of(&g).unwrap();
    assert_eq!(reduced.len(), l);
    assert_eq!(data.word_iso(&reduced).unwrap(), g);
    assert_eq!(data.length(&ginv).unwrap(), l);
}

fn a1_algebra(q: i64) -> HeckeAlgebra<ReflectionGroupData> {
    let f = Field::rationals();
    HeckeAlgebra::new(affine_a1(), OmegaAction::trivial(2), Cocycle::Trivial, HeckeParams::unchecked(vec![f.int(q), f.int(q)]), f).unwrap()
}

/// `Σ c_i 𝕋_{w_i}` from words and small integer coefficients.
fn element(alg: &HeckeAlgebra<ReflectionGroupData>, terms: &[(Vec<usize>, i64)]) -> ProductAlgElem<AffineIso> {
    terms
        .iter()
        .fold(ProductAlgElem::zero(), |acc, (w, c)| acc.add(&alg.t_word(w).scale(&alg.field().int(*c))))
}

fn terms() -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((word(2, 4), -3i64..=3), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_a1_length_is_distance(w in word(2, 8)) {
        length_matches_distance(&affine_a1(), &w);
    }

    #[test]
    fn affine_a2_length_is_distance(w in word(3, 7)) {
        length_matches_distance(&affine_a2(), &w);
    }

    #[test]
    fn hecke_product_is_associative(a in terms(), b in terms(), c in terms()) {
        let alg = a1_algebra(3);
        let (a, b, c) = (element(&alg, &a), element(&alg, &b), element(&alg, &c));
        let left = alg.mul(&alg.mul(&a, &b).unwrap(), &c).unwrap();
        let right = alg.mul(&a, &alg.mul(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn star_reverses_products(a in terms(), b in terms()) {
        let alg = a1_algebra(2);
        let (a, b) = (element(&alg, &a), element(&alg, &b));
        let sa = alg.star(&a).unwrap();
        prop_assert_eq!(alg.star(&sa).unwrap(), a.clone());
        let lhs = alg.star(&alg.mul(&a, &b).unwrap()).unwrap();
        let rhs = alg.mul(&alg.star(&b).unwrap(), &sa).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduced_words_multiply_without_correction(w in word(2, 6)) {
        let alg = a1_algebra(5);
        let g = alg.group().word_iso(&w).unwrap();
        let reduced = alg.group().word_of(&g).unwrap();
        let (u, v) = reduced.split_at(reduced.len() / 2);
        let prod = alg.mul(&alg.t_word(u), &alg.t_word(v)).unwrap();
        prop_assert_eq!(prod, alg.t_word(&reduced));
    }

    #[test]
    fn convolution_is_associative(c in prop::collection::vec(-4i64..=4, 6)) {
        let g = FinGroup::gl2(3).unwrap();
        let b = g.borel(true).unwrap();
        let f = Field::rationals();
        let rho = Rep::trivial(&b, &f);
        let alg = ConvolutionAlgebra::new(&g, &b, &rho).unwrap();
        let basis = alg.basis().unwrap();
        let comb = |x: i64, y: i64| -> HeckeFunc { basis[0].scale(&f.int(x)).add(&basis[1].scale(&f.int(y))) };
        let (p, q, r) = (comb(c[0], c[1]), comb(c[2], c[3]), comb(c[4], c[5]));
        let left = alg.convolve(&alg.convolve(&p, &q), &r);
        let right = alg.convolve(&p, &alg.convolve(&q, &r));
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(alg.from_end(&alg.to_end(&p)), p);
    }

    #[test]
    fn constant_term_is_v_over_q(v in -50i64..=50) {
        let f = Field::new(1, Some(2)).unwrap();
        let fam = models::gl2f2(&f).unwrap();
        let (x, y) = (fam.point("x").unwrap(), fam.point("y").unwrap());
        prop_assert_eq!(fam.constant_term(x, y, &[f.int(v)]), vec![f.frac(v, 2)]);
        prop_assert_eq!(fam.constant_term(y, x, &[f.int(v)]), vec![f.frac(v, 2)]);
    }
}

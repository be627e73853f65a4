mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{arc, fixture_correspondences, fixture_groupoids, inner_literal};
use grpd_core::algebra::operator_norm;
use grpd_core::bicategory::{compose, horizontal_compose, Composite};
use grpd_core::fixtures::{o2x, o2x_embedding, z2};
use grpd_core::hilbert::{
    apply_rank_ones, gram_min_eigenvalue, inner, left_action, left_action_norm, left_multiplier_rank_ones, module_norm,
    mu, positivity_witness, right_action, tensor_inner, two_arrow_isometry, Tensor,
};
use grpd_core::{random, AlgebraElement, Correspondence, ModuleElement, PointId, Scalar, TwoArrow};
use proptest::prelude::*;
use rand::Rng;

fn named(x: &Arc<Correspondence>, coeffs: &[(&str, i64)]) -> ModuleElement {
    ModuleElement::from_coeffs(
        x.clone(),
        coeffs.iter().map(|&(n, c)| (x.point(n).unwrap(), Scalar::from(c))),
    )
}

#[test]
fn inner_product_examples() {
    let x = arc(o2x());
    let e1 = named(&x, &[("e1", 1)]);
    let e2 = named(&x, &[("e2", 1)]);
    let unit = AlgebraElement::delta(x.right().clone(), x.right().arrow("1_*").unwrap());
    assert_eq!(inner(&e1, &e1).unwrap(), unit);
    assert!(inner(&e1, &e2).unwrap().is_zero());

    let g = arc(z2());
    let id = arc(Correspondence::identity(g.clone()));
    let de = named(&id, &[("e", 1)]);
    let da = named(&id, &[("a", 1)]);
    let alpha = AlgebraElement::delta(g.clone(), g.arrow("a").unwrap());
    assert_eq!(inner(&de, &da).unwrap(), alpha);
    assert_eq!(right_action(&de, &alpha).unwrap(), da);
    assert_eq!(left_action(&alpha, &de).unwrap(), da);
}

#[test]
fn mismatched_inputs_are_rejected() {
    let x = arc(o2x());
    let g = arc(z2());
    let id = arc(Correspondence::identity(g.clone()));
    let xi = named(&x, &[("e1", 1)]);
    assert!(inner(&xi, &named(&id, &[("e", 1)])).is_err());
    assert!(right_action(&xi, &AlgebraElement::delta(g.clone(), g.arrow("e").unwrap())).is_err());
    assert!(left_action(&AlgebraElement::delta(g.clone(), g.arrow("e").unwrap()), &xi).is_err());
}

/// For the identity correspondence the module is the algebra itself.
#[test]
fn identity_module_is_the_algebra() {
    for (_, g) in fixture_groupoids() {
        let id = arc(Correspondence::identity(g.clone()));
        let mut rng = random::rng(7);
        for _ in 0..20 {
            let a = random::algebra_element(&mut rng, &g, 4);
            let b = random::algebra_element(&mut rng, &g, 4);
            let as_module = |e: &AlgebraElement| {
                ModuleElement::from_coeffs(
                    id.clone(),
                    e.coeffs().iter().map(|(&k, c)| (id.point(g.arrow_name(k)).unwrap(), c.clone())),
                )
            };
            let (ma, mb) = (as_module(&a), as_module(&b));
            assert_eq!(inner(&ma, &mb).unwrap(), a.involute().convolve(&b).unwrap());
            assert_eq!(right_action(&ma, &b).unwrap(), as_module(&a.convolve(&b).unwrap()));
            assert_eq!(left_action(&a, &mb).unwrap(), as_module(&a.convolve(&b).unwrap()));
        }
    }
}

#[test]
fn rank_one_decompositions() {
    let x = arc(o2x());
    let orbits = x.orbits();
    assert_eq!(orbits.len(), 2);
    let v = named(&x, &[("e1", 2), ("e2", 3)]);

    let one = BTreeMap::from([(0, Scalar::one())]);
    let ops = left_multiplier_rank_ones(&x, &one).unwrap();
    assert_eq!(apply_rank_ones(&ops, &v).unwrap(), named(&x, &[("e1", 2)]));

    let all: BTreeMap<usize, Scalar> = (0..orbits.len()).map(|c| (c, Scalar::one())).collect();
    let ops = left_multiplier_rank_ones(&x, &all).unwrap();
    assert_eq!(apply_rank_ones(&ops, &v).unwrap(), v);

    let ops = left_multiplier_rank_ones(&x, &BTreeMap::new()).unwrap();
    assert!(ops.is_empty());
    assert!(apply_rank_ones(&ops, &v).unwrap().is_zero());

    assert!(left_multiplier_rank_ones(&x, &BTreeMap::from([(2, Scalar::one())])).is_err());
}

#[test]
fn mu_on_o2x_squared() {
    let x = arc(o2x());
    let c = compose(&x, &x).unwrap();
    let t: Tensor = vec![(named(&x, &[("e1", 1)]), named(&x, &[("e2", 1)]))];
    let image = mu(&c, &t).unwrap();
    assert_eq!(image.to_names(), BTreeMap::from([("[e1,e2]".to_owned(), Scalar::one())]));
    for p in c.corr().point_ids() {
        let (a, b) = c.rep(p);
        let t: Tensor = vec![(ModuleElement::delta(x.clone(), a), ModuleElement::delta(x.clone(), b))];
        assert_eq!(mu(&c, &t).unwrap(), ModuleElement::delta(c.corr().clone(), p));
    }
    let wrong: Tensor = vec![(named(&x, &[("e1", 1)]), ModuleElement::zero(c.corr().clone()))];
    assert!(mu(&c, &wrong).is_err());
}

#[test]
fn two_arrow_isometries_are_functorial() {
    let alpha = o2x_embedding();
    let x = alpha.target().clone();
    let xi = named(alpha.source(), &[("e1", 5)]);
    let image = two_arrow_isometry(&alpha, &xi).unwrap();
    assert_eq!(image, named(&x, &[("e1", 5)]));
    let id = TwoArrow::identity(x.clone());
    let composed = alpha.then(&id).unwrap();
    assert_eq!(two_arrow_isometry(&composed, &xi).unwrap(), two_arrow_isometry(&id, &image).unwrap());
    assert_eq!(inner(&image, &image).unwrap(), inner(&xi, &xi).unwrap());
}

fn random_setup(seed: u64) -> (rand_chacha::ChaCha8Rng, Arc<Correspondence>) {
    let mut rng = random::rng(seed);
    let pool = fixture_groupoids();
    let h = pool[rng.random_range(0..pool.len())].1.clone();
    let g = pool[rng.random_range(0..pool.len())].1.clone();
    let x = arc(random::correspondence(&mut rng, &h, &g, 12).unwrap());
    (rng, x)
}

fn random_tensor(rng: &mut impl Rng, c: &Composite) -> Tensor {
    (0..rng.random_range(1..=3))
        .map(|_| {
            (
                random::module_element(rng, c.left_factor(), 3),
                random::module_element(rng, c.right_factor(), 3),
            )
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn inner_matches_the_defining_sum(seed in any::<u64>()) {
        let (mut rng, x) = random_setup(seed);
        let xi = random::module_element(&mut rng, &x, 5);
        let eta = random::module_element(&mut rng, &x, 5);
        let ip = inner(&xi, &eta).unwrap();
        prop_assert_eq!(ip.coeffs(), &inner_literal(&xi, &eta));
    }

    #[test]
    fn bimodule_identities(seed in any::<u64>()) {
        let (mut rng, x) = random_setup(seed);
        let xi = random::module_element(&mut rng, &x, 5);
        let eta = random::module_element(&mut rng, &x, 5);
        let gamma = random::algebra_element(&mut rng, x.right(), 4);
        let delta = random::algebra_element(&mut rng, x.right(), 4);
        let zeta = random::algebra_element(&mut rng, x.left(), 4);
        let omega = random::algebra_element(&mut rng, x.left(), 4);

        prop_assert_eq!(inner(&xi, &eta).unwrap().involute(), inner(&eta, &xi).unwrap());
        prop_assert_eq!(
            inner(&xi, &right_action(&eta, &gamma).unwrap()).unwrap(),
            inner(&xi, &eta).unwrap().convolve(&gamma).unwrap()
        );
        prop_assert_eq!(
            inner(&left_action(&zeta, &xi).unwrap(), &eta).unwrap(),
            inner(&xi, &left_action(&zeta.involute(), &eta).unwrap()).unwrap()
        );
        prop_assert_eq!(
            right_action(&right_action(&xi, &gamma).unwrap(), &delta).unwrap(),
            right_action(&xi, &gamma.convolve(&delta).unwrap()).unwrap()
        );
        prop_assert_eq!(
            left_action(&zeta, &left_action(&omega, &xi).unwrap()).unwrap(),
            left_action(&zeta.convolve(&omega).unwrap(), &xi).unwrap()
        );
        prop_assert_eq!(
            right_action(&left_action(&zeta, &xi).unwrap(), &gamma).unwrap(),
            left_action(&zeta, &right_action(&xi, &gamma).unwrap()).unwrap()
        );
    }

    #[test]
    fn inner_products_are_positive(seed in any::<u64>()) {
        let (mut rng, x) = random_setup(seed);
        let xi = random::module_element(&mut rng, &x, 6);
        let ip = inner(&xi, &xi).unwrap();
        let w = positivity_witness(&xi);
        prop_assert_eq!(w.sum_of_squares(AlgebraElement::zero(x.right().clone())).unwrap(), ip.clone());
        prop_assert_eq!(xi.is_zero(), ip.is_zero());
        let family: Vec<_> = (0..3).map(|_| random::module_element(&mut rng, &x, 4)).collect();
        prop_assert!(gram_min_eigenvalue(&family).unwrap() >= -1e-9);
    }

    #[test]
    fn rank_ones_give_orbit_multipliers(seed in any::<u64>()) {
        let (mut rng, x) = random_setup(seed);
        let orbits = x.orbits();
        let f: BTreeMap<usize, Scalar> = (0..orbits.len())
            .filter_map(|c| rng.random_bool(0.6).then(|| (c, random::scalar(&mut rng))))
            .collect();
        let ops = left_multiplier_rank_ones(&x, &f).unwrap();
        let v = random::module_element(&mut rng, &x, 6);
        let expected = v.pointwise(|p| f.get(&orbits.class_of[p.0]).cloned().unwrap_or_else(Scalar::zero));
        prop_assert_eq!(apply_rank_ones(&ops, &v).unwrap(), expected);
    }

    #[test]
    fn left_action_is_bounded(seed in any::<u64>()) {
        let (mut rng, x) = random_setup(seed);
        let zeta = random::algebra_element(&mut rng, x.left(), 4);
        let bound = left_action_norm(&zeta, &x).unwrap();
        prop_assert!(bound <= operator_norm(&zeta) + 1e-9);
        let xi = random::module_element(&mut rng, &x, 5);
        let lhs = module_norm(&left_action(&zeta, &xi).unwrap());
        prop_assert!(lhs <= bound * module_norm(&xi) + 1e-9);
    }

    #[test]
    fn mu_is_an_isometry_onto_the_composite(seed in any::<u64>()) {
        let mut rng = random::rng(seed);
        let pool: Vec<_> = fixture_groupoids().into_iter().map(|(_, g)| g).collect();
        let chain = random::chain(&mut rng, &pool, 2, 8).unwrap();
        let c = compose(&chain[0], &chain[1]).unwrap();
        let t1 = random_tensor(&mut rng, &c);
        let t2 = random_tensor(&mut rng, &c);
        prop_assert_eq!(
            inner(&mu(&c, &t1).unwrap(), &mu(&c, &t2).unwrap()).unwrap(),
            tensor_inner(&c, &t1, &t2).unwrap()
        );
        for p in c.corr().point_ids() {
            let (a, b) = c.rep(p);
            let t = vec![(ModuleElement::delta(c.left_factor().clone(), a), ModuleElement::delta(c.right_factor().clone(), b))];
            prop_assert_eq!(mu(&c, &t).unwrap(), ModuleElement::delta(c.corr().clone(), p));
        }
    }
}

/// `μ` intertwines `V_α ⊗ V_β` with `V_{α∘β}`.
#[test]
fn mu_is_natural() {
    let alpha = o2x_embedding();
    let beta = TwoArrow::identity(alpha.target().clone());
    let hc = horizontal_compose(&alpha, &beta).unwrap();
    let c1 = compose(alpha.source(), beta.source()).unwrap();
    let c2 = compose(alpha.target(), beta.target()).unwrap();
    let mut rng = random::rng(3);
    for _ in 0..50 {
        let t = random_tensor(&mut rng, &c1);
        let mapped: Tensor = t
            .iter()
            .map(|(f, g)| (two_arrow_isometry(&alpha, f).unwrap(), two_arrow_isometry(&beta, g).unwrap()))
            .collect();
        assert_eq!(
            two_arrow_isometry(&hc, &mu(&c1, &t).unwrap()).unwrap(),
            mu(&c2, &mapped).unwrap()
        );
    }
}

#[test]
fn fixture_modules_are_positive() {
    for (name, x) in fixture_correspondences() {
        let mut rng = random::rng(11);
        for _ in 0..50 {
            let xi = random::nonzero_module_element(&mut rng, &x, 5);
            assert!(!inner(&xi, &xi).unwrap().is_zero(), "{name}");
            assert!(gram_min_eigenvalue(std::slice::from_ref(&xi)).unwrap() >= -1e-9, "{name}");
        }
        let d = ModuleElement::delta(x.clone(), PointId(0));
        assert!((module_norm(&d) - 1.0).abs() < 1e-9, "{name}");
    }
}

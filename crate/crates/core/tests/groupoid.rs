mod common;

use std::collections::BTreeMap;

use grpd_core::fixtures::{mixed6, pair, pt, swap_groupoid, z2, z3};
use grpd_core::groupoid::{
    group_as_groupoid, is_slice, product, space_as_groupoid, transformation_groupoid, validate_groupoid,
    GroupAction, GroupTable, GroupoidSubset,
};
use grpd_core::{Axiom, Error, FiniteGroupoid};
use proptest::prelude::*;

/// Every law of a groupoid, checked by enumerating all arrows, pairs and
/// triples without using the library's own checker.
fn laws_hold(g: &FiniteGroupoid) -> bool {
    for a in g.arrow_ids() {
        let (s, d) = (g.src(a), g.dst(a));
        if g.comp(g.unit(d), a) != Some(a) || g.comp(a, g.unit(s)) != Some(a) {
            return false;
        }
        if g.comp(g.inv(a), a) != Some(g.unit(s)) || g.comp(a, g.inv(a)) != Some(g.unit(d)) {
            return false;
        }
        for b in g.arrow_ids() {
            if g.comp(a, b).is_some() != (g.src(a) == g.dst(b)) {
                return false;
            }
            for c in g.arrow_ids() {
                if let (Some(ab), Some(bc)) = (g.comp(a, b), g.comp(b, c)) {
                    if g.comp(ab, c) != g.comp(a, bc) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[test]
fn named_groupoids_satisfy_the_laws() {
    for (name, g) in common::fixture_groupoids() {
        assert!(laws_hold(&g), "{name}");
        g.check_laws().unwrap();
    }
}

#[test]
fn trivial_and_pair_groupoids() {
    let p = pt();
    assert_eq!((p.n_objects(), p.n_arrows()), (1, 1));
    let p2 = pair(2);
    assert_eq!(p2.n_arrows(), 4);
    let a = p2.arrow("(1,2)").unwrap();
    let b = p2.arrow("(2,1)").unwrap();
    assert_eq!(p2.arrow_name(p2.comp(a, b).unwrap()), "(1,1)");
    assert_eq!(p2.comp(a, a), None);
}

#[test]
fn corrupted_pair_table_is_a_unit_law_violation() {
    let mut spec = pair(2).to_spec();
    for t in spec.comp.iter_mut() {
        if t[0] == "(1,2)" && t[1] == "(2,1)" {
            t[2] = "(2,2)".into();
        }
    }
    match validate_groupoid(&spec) {
        Err(Error::AxiomViolation { kind, witness }) => {
            assert_eq!(kind, Axiom::UnitLaw);
            assert_eq!(witness, ["(1,2)", "(2,1)"]);
        }
        other => panic!("expected a unit-law violation, got {other:?}"),
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let text = r#"{"objects":["x"],"arrows":[{"id":"1","src":"x","dst":"x"}],
        "unit":{"x":"1"},"inv":{"1":"1"},"comp":[["1","1","1"]],"extra":0}"#;
    assert!(serde_json::from_str::<grpd_core::groupoid::GroupoidSpec>(text).is_err());
}

#[test]
fn groups_from_tables() {
    let g = z2();
    assert_eq!(g.n_objects(), 1);
    let a = g.arrow("a").unwrap();
    assert!(g.is_unit(g.mul(a, a)));
    assert_eq!(z3().n_arrows(), 3);
    let bad = GroupTable {
        elements: vec!["e".into(), "a".into()],
        mul: vec![vec!["e".into(), "a".into()], vec!["a".into(), "a".into()]],
    };
    assert!(matches!(
        group_as_groupoid(&bad),
        Err(Error::AxiomViolation { kind: Axiom::Inverse, .. })
    ));
}

#[test]
fn spaces() {
    let s = space_as_groupoid(&["1", "2", "3"]).unwrap();
    assert_eq!((s.n_objects(), s.n_arrows()), (3, 3));
    assert!(s.is_space());
    let empty = space_as_groupoid::<&str>(&[]).unwrap();
    assert_eq!(empty.n_arrows(), 0);
    assert_eq!(space_as_groupoid(&["v"]).unwrap(), pt_named("v"));
}

fn pt_named(v: &str) -> FiniteGroupoid {
    space_as_groupoid(&[v]).unwrap()
}

#[test]
fn transformation_groupoids() {
    let t = swap_groupoid();
    assert_eq!((t.n_objects(), t.n_arrows()), (2, 4));
    assert!(laws_hold(&t));

    let trivial = group_as_groupoid(&GroupTable {
        elements: vec!["e".into()],
        mul: vec![vec!["e".into()]],
    })
    .unwrap();
    let action = GroupAction::new(&trivial, vec!["1".into(), "2".into()], |_, p| p).unwrap();
    let tg = transformation_groupoid(&trivial, &action).unwrap();
    assert!(tg.is_space());
    assert_eq!(tg.n_arrows(), 2);

    let g = z2();
    let map = BTreeMap::from([
        (("e".into(), "1".into()), "1".into()),
        (("e".into(), "2".into()), "2".into()),
        (("a".into(), "1".into()), "1".into()),
        (("a".into(), "2".into()), "1".into()),
    ]);
    assert!(matches!(
        GroupAction::from_names(&g, vec!["1".into(), "2".into()], &map),
        Err(Error::NotAnAction { .. })
    ));
}

#[test]
fn slices() {
    let p2 = pair(2);
    assert!(is_slice(&p2, &GroupoidSubset::units(&p2)));
    let v = GroupoidSubset::from_names(&p2, &["(1,2)", "(1,1)"]).unwrap();
    assert!(!is_slice(&p2, &v));
    for g in [p2, mixed6(), z3()] {
        for a in g.arrow_ids() {
            assert!(is_slice(&g, &GroupoidSubset::new([a])));
        }
    }
}

fn arb_groupoid() -> impl Strategy<Value = FiniteGroupoid> {
    let base = prop_oneof![
        Just(pt()),
        Just(z2()),
        Just(z3()),
        (1usize..4).prop_map(pair),
        Just(mixed6()),
        Just(swap_groupoid()),
    ];
    (base.clone(), base, any::<bool>()).prop_map(|(a, b, prod)| {
        if prod {
            product(&a, &b).unwrap()
        } else {
            a
        }
    })
}

fn arb_subset(g: &FiniteGroupoid, bits: u64) -> GroupoidSubset {
    GroupoidSubset::new(g.arrow_ids().filter(|a| bits >> (a.0 % 64) & 1 == 1))
}

proptest! {
    #[test]
    fn products_satisfy_the_laws(g in arb_groupoid()) {
        prop_assert!(laws_hold(&g));
        let round = validate_groupoid(&g.to_spec()).unwrap();
        prop_assert_eq!(round, g);
    }

    #[test]
    fn slices_are_closed_under_products_and_stars(g in arb_groupoid(), v in any::<u64>(), w in any::<u64>()) {
        let (v, w) = (arb_subset(&g, v), arb_subset(&g, w));
        if is_slice(&g, &v) && is_slice(&g, &w) {
            prop_assert!(is_slice(&g, &v.product(&g, &w)));
            prop_assert!(is_slice(&g, &v.star(&g)));
        }
    }
}

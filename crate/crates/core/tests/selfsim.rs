mod common;

use std::collections::BTreeMap;

use common::increment;
use grpd_core::fixtures::{adding_machine, z2_swap};
use grpd_core::groupoid::cyclic_group_table;
use grpd_core::selfsim::{SelfSimilarSpec, WordSpec};
use grpd_core::{Error, SelfSimilarAction};
use proptest::prelude::*;

fn all_words(len: usize) -> impl Iterator<Item = String> {
    (0..1u32 << len).map(move |n| (0..len).map(|i| if n >> i & 1 == 1 { '1' } else { '0' }).collect())
}

fn letters(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs.iter().map(|&(a, b)| (a.into(), b.into())).collect()
}

fn words(pairs: &[(&str, &[&str])]) -> BTreeMap<String, WordSpec> {
    pairs
        .iter()
        .map(|&(x, w)| (x.into(), WordSpec::Tokens(w.iter().map(|s| s.to_string()).collect())))
        .collect()
}

/// The first Grigorchuk group: `a` swaps the first letter, and `b, c, d`
/// restrict to `(a, c)`, `(a, d)`, `(1, b)`.
fn grigorchuk() -> SelfSimilarSpec {
    SelfSimilarSpec {
        alphabet: vec!["0".into(), "1".into()],
        generators: Some(["a", "b", "c", "d"].map(String::from).to_vec()),
        group: None,
        perm: BTreeMap::from([("a".into(), letters(&[("0", "1"), ("1", "0")]))]),
        restrict: BTreeMap::from([
            ("b".into(), words(&[("0", &["a"]), ("1", &["c"])])),
            ("c".into(), words(&[("0", &["a"]), ("1", &["d"])])),
            ("d".into(), words(&[("1", &["b"])])),
        ]),
        depth_bound: None,
    }
}

#[test]
fn adding_machine_is_binary_increment() {
    let add = SelfSimilarAction::from_spec(&adding_machine()).unwrap();
    let a = add.parse_element("a").unwrap();
    for len in 0..=10 {
        for w in all_words(len) {
            let image = add.act_on_word(&a, &add.parse_letters(&w).unwrap());
            assert_eq!(add.format_letters(&image), increment(&w), "{w}");
        }
    }
}

#[test]
fn adding_machine_inverse_and_powers() {
    let add = SelfSimilarAction::from_spec(&adding_machine()).unwrap();
    let inv = add.parse_element("a^-1").unwrap();
    let twice = add.parse_element("a a").unwrap();
    for w in all_words(8) {
        let x = add.parse_letters(&w).unwrap();
        let up = add.format_letters(&add.act_on_word(&inv, &add.parse_letters(&increment(&w)).unwrap()));
        assert_eq!(up, w);
        assert_eq!(add.format_letters(&add.act_on_word(&twice, &x)), increment(&increment(&w)));
    }
    let cancelled = add.parse_element("a a^-1").unwrap();
    assert_eq!(cancelled, add.identity());
}

#[test]
fn cocycle_checks() {
    let add = SelfSimilarAction::from_spec(&adding_machine()).unwrap();
    let report = add.check_cocycle().unwrap();
    assert!(report.verified);
    assert_eq!(report.depth, Some(8));
    assert_eq!(report.pairs, 4);

    let swap = SelfSimilarAction::from_spec(&z2_swap()).unwrap();
    let report = swap.check_cocycle().unwrap();
    assert_eq!(report.depth, None);

    let g = SelfSimilarAction::from_spec(&grigorchuk()).unwrap().with_depth_bound(6);
    assert_eq!(g.check_cocycle().unwrap().depth, Some(6));
}

#[test]
fn corrupted_table_cocycle_is_rejected() {
    let mut spec = z2_swap();
    spec.restrict = BTreeMap::from([("a".into(), words(&[("0", &["a"])]))]);
    let action = SelfSimilarAction::from_spec(&spec).unwrap();
    match action.check_cocycle() {
        Err(Error::CocycleViolation { h1, h2, x }) => assert_eq!((h1.as_str(), h2.as_str(), x.as_str()), ("a", "a", "0")),
        other => panic!("unexpected {other:?}"),
    }
    assert!(action.to_correspondence().is_err());
}

#[test]
fn grigorchuk_relations_hold() {
    let g = SelfSimilarAction::from_spec(&grigorchuk()).unwrap();
    let e = g.identity();
    for w in ["a a", "b b", "c c", "d d", "b c d"] {
        assert!(g.acts_trivially(&g.parse_element(w).unwrap(), 10), "{w}");
    }
    assert!(g.equal_to_depth(&g.parse_element("b c").unwrap(), &g.parse_element("d").unwrap(), 10));
    assert!(!g.equal_to_depth(&g.parse_element("a d").unwrap(), &g.parse_element("d a").unwrap(), 10));
    assert!(!g.acts_trivially(&g.parse_element("a b").unwrap(), 2));
    assert!(g.acts_trivially(&e, 10));
    // (ad)^4 = 1 but (ad)^2 ≠ 1.
    assert!(g.acts_trivially(&g.parse_element("a d a d a d a d").unwrap(), 10));
    assert!(!g.acts_trivially(&g.parse_element("a d a d").unwrap(), 10));
}

#[test]
fn faithfulness() {
    let add = SelfSimilarAction::from_spec(&adding_machine()).unwrap();
    let report = add.faithfulness_report(4, 8);
    assert!(report.is_faithful_to_depth(), "{:?}", report.kernel);

    let g = SelfSimilarAction::from_spec(&grigorchuk()).unwrap();
    let report = g.faithfulness_report(2, 8);
    assert!(report.kernel.contains(&"a a".to_owned()));
    assert!(report.kernel.contains(&"a^-1 a^-1".to_owned()));

    let mut trivial = z2_swap();
    trivial.perm.clear();
    let report = SelfSimilarAction::from_spec(&trivial).unwrap().faithfulness_report(1, 3);
    assert_eq!(report.kernel, ["a"]);
    assert!(SelfSimilarAction::from_spec(&z2_swap()).unwrap().faithfulness_report(1, 1).is_faithful_to_depth());
}

#[test]
fn correspondences_of_table_groups() {
    let swap = SelfSimilarAction::from_spec(&z2_swap()).unwrap();
    let x = swap.to_correspondence().unwrap();
    assert_eq!(x.len(), 4);
    let c = x.classify();
    assert!(c.proper);
    assert!(!c.tight);
    assert_eq!((c.orbits, c.objects), (2, 1));

    let single = SelfSimilarSpec {
        alphabet: vec!["0".into()],
        generators: None,
        group: Some(cyclic_group_table(3)),
        perm: BTreeMap::new(),
        restrict: BTreeMap::new(),
        depth_bound: None,
    };
    let c = SelfSimilarAction::from_spec(&single).unwrap().to_correspondence().unwrap().classify();
    assert!(c.proper && c.tight);

    let add = SelfSimilarAction::from_spec(&adding_machine()).unwrap();
    assert!(matches!(add.to_correspondence(), Err(Error::InfiniteGroup)));
}

#[test]
fn malformed_specs_are_rejected() {
    let mut spec = adding_machine();
    spec.alphabet.clear();
    assert!(SelfSimilarAction::from_spec(&spec).is_err());

    let mut spec = adding_machine();
    spec.perm.insert("a".into(), letters(&[("0", "1"), ("1", "1")]));
    assert!(SelfSimilarAction::from_spec(&spec).is_err());

    let mut spec = adding_machine();
    spec.restrict.insert("b".into(), BTreeMap::new());
    assert!(matches!(SelfSimilarAction::from_spec(&spec), Err(Error::UnknownId(_))));

    let mut spec = adding_machine();
    spec.group = Some(cyclic_group_table(2));
    assert!(SelfSimilarAction::from_spec(&spec).is_err());

    let mut spec = adding_machine();
    spec.depth_bound = Some(0);
    assert!(SelfSimilarAction::from_spec(&spec).is_err());

    let add = SelfSimilarAction::from_spec(&adding_machine()).unwrap();
    assert!(matches!(add.parse_letters("012"), Err(Error::UnknownLetter(_))));
    assert!(add.parse_element("b").is_err());
}

#[test]
fn spec_round_trips_through_json() {
    for spec in [adding_machine(), z2_swap(), grigorchuk()] {
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SelfSimilarSpec>(&text).unwrap(), spec);
    }
    let text = r#"{"alphabet":["0","1"],"generators":["a"],"perm":{"a":{"0":"1","1":"0"}},"restrict":{"a":{"1":"a"}}}"#;
    let spec: SelfSimilarSpec = serde_json::from_str(text).unwrap();
    let add = SelfSimilarAction::from_spec(&spec).unwrap();
    let a = add.parse_element("a").unwrap();
    assert_eq!(add.format_letters(&add.act_on_word(&a, &add.parse_letters("1101").unwrap())), "0011");
}

fn grigorchuk_element() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "a^-1", "b^-1"]), 0..6)
        .prop_map(|v| v.join(" "))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn the_action_is_a_group_action(g in grigorchuk_element(), h in grigorchuk_element(), w in "[01]{0,9}") {
        let action = SelfSimilarAction::from_spec(&grigorchuk()).unwrap();
        let (g, h) = (action.parse_element(&g).unwrap(), action.parse_element(&h).unwrap());
        let x = action.parse_letters(&w).unwrap();
        let gh = action.multiply(&g, &h);
        prop_assert_eq!(action.act_on_word(&gh, &x), action.act_on_word(&g, &action.act_on_word(&h, &x)));
        prop_assert_eq!(action.act_on_word(&g, &x).len(), x.len());
    }

    #[test]
    fn the_action_preserves_prefixes(g in grigorchuk_element(), w in "[01]{1,9}") {
        let action = SelfSimilarAction::from_spec(&grigorchuk()).unwrap();
        let g = action.parse_element(&g).unwrap();
        let x = action.parse_letters(&w).unwrap();
        let full = action.act_on_word(&g, &x);
        for k in 0..x.len() {
            prop_assert_eq!(&action.act_on_word(&g, &x[..k])[..], &full[..k]);
        }
    }
}

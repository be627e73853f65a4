mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::arc;
use grpd_core::bicategory::compose;
use grpd_core::category::{nk_truncated, FibrationFunctor};
use grpd_core::diagram::{diagram_to_fibration, fibration_to_diagram, validate_diagram};
use grpd_core::fixtures::{conduche_counterexample, hexagon_violation, kg21, o2x, o2x_graph, z2};
use grpd_core::presentation::cuntz_pimsner_presentation;
use grpd_core::{Correspondence, Diagram, Error, KGraph, ModuleElement, ProductSystem};

fn identity_names(names: &[String]) -> BTreeMap<String, String> {
    names.iter().map(|n| (n.clone(), n.clone())).collect()
}

fn round_trip_is_isomorphic(f: &FibrationFunctor) {
    let back = diagram_to_fibration(&fibration_to_diagram(f).unwrap()).unwrap();
    assert!(back.check_conduche().conduche);
    let e = f.total();
    assert!(f.is_isomorphic_via(&back, &identity_names(e.object_names()), &identity_names(e.morphism_names())));
}

#[test]
fn path_categories_are_conduche() {
    for spec in [o2x_graph(), kg21(false), kg21(true)] {
        let f = KGraph::from_spec(&spec).unwrap().path_category(3).unwrap();
        let report = f.check_conduche();
        assert!(report.conduche, "{report:?}");
        assert!(report.witness.is_none());
        assert!(report.checked > 0);
        assert!(f.is_row_finite());
        round_trip_is_isomorphic(&f);
    }
}

#[test]
fn counterexample_has_a_witness() {
    let f = conduche_counterexample();
    let report = f.check_conduche();
    assert!(!report.conduche);
    let w = report.witness.unwrap();
    assert_eq!((w.morphism.as_str(), w.lambda.as_str(), w.rho.as_str(), w.lifts), ("f", "u", "v", 0));
    assert!(matches!(fibration_to_diagram(&f), Err(Error::NotConduche(_))));
}

#[test]
fn row_counts() {
    let k = KGraph::from_spec(&kg21(false)).unwrap();
    let counts: Vec<_> = k.row_counts().into_iter().map(|r| (r.morphism, r.count)).collect();
    assert_eq!(counts, [("blue".to_owned(), 2), ("red".to_owned(), 1)]);

    let f = k.path_category(2).unwrap();
    let rows = f.row_counts();
    let count = |m: &str| rows.iter().find(|r| r.morphism == m).unwrap().count;
    assert_eq!(count("1"), 1);
    assert_eq!(count("blue"), 2);
    assert_eq!(count("blue.red"), 2);
    assert_eq!(count("blue.blue"), 4);
}

#[test]
fn o2x_presentation_matches_golden() {
    let k = KGraph::from_spec(&o2x_graph()).unwrap();
    assert_eq!(k.presentation().render(), include_str!("golden/o2x_presentation.txt"));
}

#[test]
fn kg21_presentations_match_golden() {
    let flip = KGraph::from_spec(&kg21(true)).unwrap().presentation().render();
    let fixed = KGraph::from_spec(&kg21(false)).unwrap().presentation().render();
    assert_eq!(flip, include_str!("golden/kg21_swap_presentation.txt"));
    assert_eq!(fixed, include_str!("golden/kg21_identity_presentation.txt"));
}

/// The literal presentation of a path category restricted to degree one
/// carries the skeleton relations (4) to (6).
#[test]
fn literal_presentation_contains_skeleton_relations() {
    let f = KGraph::from_spec(&o2x_graph()).unwrap().path_category(2).unwrap();
    let literal = cuntz_pimsner_presentation(&f).unwrap();
    let skeleton = KGraph::from_spec(&o2x_graph()).unwrap().presentation();
    for family in 4..=6 {
        let lines = literal.family_lines(family);
        for line in skeleton.family_lines(family) {
            assert!(lines.contains(&line), "{line}");
        }
    }
    assert!(literal.undeclared().is_empty());
    assert!(cuntz_pimsner_presentation(&conduche_counterexample()).is_err());
}

#[test]
fn hexagon_violation_is_rejected() {
    match KGraph::from_spec(&hexagon_violation()) {
        Err(Error::HexagonViolation(path)) => assert_eq!(path, ["a1", "b1", "c1"]),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn product_system_of_o2x() {
    let k = KGraph::from_spec(&o2x_graph()).unwrap();
    let ps = ProductSystem::new(k.diagram(3).unwrap()).unwrap();
    assert_eq!(ps.fiber_dimension("1").unwrap(), 1);
    assert_eq!(ps.fiber_dimension("p").unwrap(), 2);
    assert_eq!(ps.fiber_dimension("p.p").unwrap(), 4);
    assert_eq!(ps.fiber_dimension("p.p.p").unwrap(), 8);
    assert_eq!(ps.product_word("p", "p.p").unwrap().as_deref(), Some("p.p.p"));
    assert_eq!(ps.product_word("p.p", "p.p").unwrap(), None);
    assert!(ps.fiber_dimension("q").is_err());

    let x = arc(o2x());
    let xx = compose(&x, &x).unwrap();
    let xxx = compose(&x, xx.corr()).unwrap();
    assert_eq!(xxx.corr().len(), ps.fiber_dimension("p.p.p").unwrap());
}

#[test]
fn product_system_of_kg21() {
    for swap in [false, true] {
        let k = KGraph::from_spec(&kg21(swap)).unwrap();
        let ps = ProductSystem::new(k.diagram(2).unwrap()).unwrap();
        assert_eq!(ps.fiber_dimension("blue.red").unwrap(), 2);
        assert_eq!(ps.fiber_dimension("blue.blue").unwrap(), 4);
        assert_eq!(ps.fiber_dimension("red.red").unwrap(), 1);
        assert_eq!(ps.product_word("red", "blue").unwrap().as_deref(), Some("blue.red"));
        assert_associative(&ps);
    }
}

/// `(ξη)ζ = ξ(ηζ)` on all basis triples with a defined product.
fn assert_associative(ps: &ProductSystem) {
    let index = ps.diagram().index();
    let names = index.morphism_names();
    let basis = |w: &str| -> Vec<ModuleElement> {
        let x = ps.fiber(w).unwrap();
        x.point_ids().map(|p| ModuleElement::delta(x.clone(), p)).collect()
    };
    let mut checked = 0;
    for p in names {
        for q in names {
            for t in names {
                let (Some(pq), Some(qt)) = (ps.product_word(p, q).unwrap(), ps.product_word(q, t).unwrap()) else {
                    continue;
                };
                if ps.product_word(&pq, t).unwrap().is_none() {
                    continue;
                }
                for a in basis(p) {
                    for b in basis(q) {
                        for c in basis(t) {
                            let left = ps.multiply(&pq, &ps.multiply(p, &a, q, &b).unwrap(), t, &c).unwrap();
                            let right = ps.multiply(p, &a, &qt, &ps.multiply(q, &b, t, &c).unwrap()).unwrap();
                            assert_eq!(left, right, "{p} {q} {t}");
                            checked += 1;
                        }
                    }
                }
            }
        }
    }
    assert!(checked > 0);
}

#[test]
fn product_system_of_o2x_is_associative() {
    let k = KGraph::from_spec(&o2x_graph()).unwrap();
    assert_associative(&ProductSystem::new(k.diagram(3).unwrap()).unwrap());
}

#[test]
fn free_monoid_fibres_are_powers() {
    for x in [arc(o2x()), arc(grpd_core::fixtures::z2_swap_correspondence())] {
        let d = Diagram::free_monoid(x.clone(), "p", 3).unwrap();
        let report = validate_diagram(&d).unwrap();
        assert_eq!(report.objects, 1);
        assert_eq!(report.morphisms, 4);
        let ps = ProductSystem::new(d).unwrap();
        let mut power = x.clone();
        for n in 2..=3 {
            power = compose(&x, &power).unwrap().corr().clone();
            let word = vec!["p"; n].join(".");
            assert_eq!(ps.fiber_dimension(&word).unwrap(), power.len());
        }
        assert_associative(&ps);
    }
}

#[test]
fn non_bijective_sigma_is_rejected() {
    let d = Diagram::free_monoid(arc(o2x()), "p", 3).unwrap();
    let p = d.index().morphism("p").unwrap();
    let map = d.sigma_maps()[&(p, p)].clone();
    let first = map.values().next().unwrap().clone();
    let bad = d.with_sigma(p, p, map.keys().map(|k| (k.clone(), first.clone())).collect());
    assert!(matches!(validate_diagram(&bad), Err(Error::CoherenceViolation { .. })));
}

/// Reversing the multiplication on `p·p` is still a bimodule bijection
/// but breaks associativity against the untouched `σ_{p,pp}`.
#[test]
fn reversed_sigma_breaks_associativity() {
    let d = Diagram::free_monoid(arc(o2x()), "p", 3).unwrap();
    let p = d.index().morphism("p").unwrap();
    let map = d.sigma_maps()[&(p, p)].clone();
    let keys: Vec<String> = map.keys().cloned().collect();
    let values: Vec<String> = map.values().cloned().collect();
    let swapped: BTreeMap<String, String> = keys.into_iter().zip(values.into_iter().rev()).collect();
    let bad = d.with_sigma(p, p, swapped);
    match validate_diagram(&bad) {
        Err(Error::CoherenceViolation { arrows, .. }) => assert!(arrows.iter().all(|a| a == "p" || a == "p.p")),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn non_discrete_nodes_cannot_become_fibrations() {
    let g = arc(z2());
    let d = Diagram::free_monoid(arc(Correspondence::identity(g)), "p", 2).unwrap();
    assert!(validate_diagram(&d).is_ok());
    assert!(matches!(diagram_to_fibration(&d), Err(Error::NodeNotDiscrete(_))));
}

#[test]
fn diagram_shape_errors() {
    let index = nk_truncated(&["p"], 1).unwrap();
    let x = arc(o2x());
    let node: Arc<_> = x.left().clone();
    assert!(Diagram::new(index.clone(), vec![], vec![x.clone(); 2], BTreeMap::new()).is_err());
    assert!(Diagram::new(index, vec![node], vec![x.clone(), x], BTreeMap::new()).is_err());
}

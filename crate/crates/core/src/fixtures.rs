//! Small named structures used throughout the tests, the guide and the
//! bundled corpus.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bicategory::TwoArrow;
use crate::category::{CategorySpec, FibrationFunctor, FiniteCategory, FunctorMaps, MorphismSpec};
use crate::correspondence::{graph_correspondence, Correspondence, PointId};
use crate::groupoid::{
    cyclic_group, disjoint_union, pair_groupoid, space_as_groupoid, transformation_groupoid, FiniteGroupoid,
    GroupAction, ObjectId,
};
use crate::kgraph::{EdgeSpec, KGraphSpec};
use crate::selfsim::{SelfSimilarSpec, WordSpec};

/// One object `*` and its unit `1_*`.
pub fn pt() -> FiniteGroupoid {
    space_as_groupoid(&["*"]).expect("one point")
}

pub fn z2() -> FiniteGroupoid {
    cyclic_group(2)
}

pub fn z3() -> FiniteGroupoid {
    cyclic_group(3)
}

/// The pair groupoid on `1, …, n`.
pub fn pair(n: usize) -> FiniteGroupoid {
    let points: Vec<String> = (1..=n).map(|i| i.to_string()).collect();
    pair_groupoid(&points).expect("pair groupoid")
}

/// `Z2 ⊔ PAIR2`: three objects and six arrows.
pub fn mixed6() -> FiniteGroupoid {
    disjoint_union(&z2(), &pair(2)).expect("disjoint names")
}

/// `Z2 ⋉ {1, 2}` with `a` swapping the points.
pub fn swap_groupoid() -> FiniteGroupoid {
    let g = z2();
    let action = GroupAction::new(&g, vec!["1".into(), "2".into()], |h, p| {
        if g.is_unit(h) {
            p
        } else {
            1 - p
        }
    })
    .expect("swap action");
    transformation_groupoid(&g, &action).expect("transformation groupoid")
}

/// Every named groupoid, keyed by name.
pub fn groupoids() -> Vec<(&'static str, FiniteGroupoid)> {
    vec![
        ("PT", pt()),
        ("Z2", z2()),
        ("Z3", z3()),
        ("PAIR2", pair(2)),
        ("PAIR3", pair(3)),
        ("MIXED6", mixed6()),
        ("SWAP", swap_groupoid()),
    ]
}

/// The two-loop graph: `PT ← PT` with carrier `{e1, e2}`.
pub fn o2x() -> Correspondence {
    let p = Arc::new(pt());
    graph_correspondence(p.clone(), p, vec!["e1".into(), "e2".into()], vec![ObjectId(0); 2], vec![ObjectId(0); 2])
        .expect("graph correspondence")
}

/// The sub-correspondence `{e1}` of [`o2x`] and its embedding.
pub fn o2x_embedding() -> TwoArrow {
    let x = Arc::new(o2x());
    let sub = x.restrict(&[PointId(0)].into()).expect("{e1} is invariant");
    TwoArrow::embedding(Arc::new(sub), x).expect("inclusion")
}

/// A self-similar `Z2`-correspondence on `{0, 1} × Z2` with `a` swapping the
/// letters and trivial restrictions.
pub fn z2_swap_correspondence() -> Correspondence {
    crate::selfsim::SelfSimilarAction::from_spec(&z2_swap())
        .and_then(|a| a.to_correspondence())
        .expect("finite self-similar action")
}

/// Named correspondences, each listed with its identity correspondences.
pub fn correspondences() -> Vec<(String, Correspondence)> {
    let mut out = vec![
        ("O2X".to_owned(), o2x()),
        ("Z2SWAP".to_owned(), z2_swap_correspondence()),
    ];
    for (name, g) in groupoids() {
        out.push((format!("1_{name}"), Correspondence::identity(Arc::new(g))));
    }
    out
}

fn edge(id: &str, r: &str, s: &str) -> EdgeSpec {
    EdgeSpec {
        id: id.into(),
        r: r.into(),
        s: s.into(),
    }
}

fn square(a: &str, b: &str, c: &str, d: &str) -> [[String; 2]; 2] {
    [[a.into(), b.into()], [c.into(), d.into()]]
}

/// The two-loop graph as a 1-graph with vertex `v` and colour `p`.
pub fn o2x_graph() -> KGraphSpec {
    KGraphSpec {
        vertices: vec!["v".into()],
        edges: BTreeMap::from([("p".into(), vec![edge("e1", "v", "v"), edge("e2", "v", "v")])]),
        factorization: vec![],
        group: None,
    }
}

/// The 2-graph on one vertex with blue loops `b1, b2`, a red loop `c1` and
/// `b_i c1 = c1 b_θ(i)`, where `θ` is the identity or the swap.
pub fn kg21(swap: bool) -> KGraphSpec {
    let theta = |i: usize| if swap { 3 - i } else { i };
    KGraphSpec {
        vertices: vec!["v".into()],
        edges: BTreeMap::from([
            ("blue".into(), vec![edge("b1", "v", "v"), edge("b2", "v", "v")]),
            ("red".into(), vec![edge("c1", "v", "v")]),
        ]),
        factorization: (1..=2)
            .map(|i| square(&format!("b{i}"), "c1", "c1", &format!("b{}", theta(i))))
            .collect(),
        group: None,
    }
}

/// A 3-coloured skeleton whose pairwise factorisations are bijective but
/// do not satisfy the associativity condition on `a1 b1 c1`.
pub fn hexagon_violation() -> KGraphSpec {
    KGraphSpec {
        vertices: vec!["v".into()],
        edges: BTreeMap::from([
            ("a".into(), vec![edge("a1", "v", "v"), edge("a2", "v", "v"), edge("a3", "v", "v")]),
            ("b".into(), vec![edge("b1", "v", "v")]),
            ("c".into(), vec![edge("c1", "v", "v")]),
        ]),
        factorization: vec![
            square("a1", "b1", "b1", "a2"),
            square("a2", "b1", "b1", "a1"),
            square("a3", "b1", "b1", "a3"),
            square("a1", "c1", "c1", "a1"),
            square("a2", "c1", "c1", "a3"),
            square("a3", "c1", "c1", "a2"),
            square("b1", "c1", "c1", "b1"),
        ],
        group: None,
    }
}

/// The adding machine: `a·0 = 1` with `a|₀ = e`, `a·1 = 0` with `a|₁ = a`.
pub fn adding_machine() -> SelfSimilarSpec {
    SelfSimilarSpec {
        alphabet: vec!["0".into(), "1".into()],
        generators: Some(vec!["a".into()]),
        group: None,
        perm: BTreeMap::from([(
            "a".into(),
            BTreeMap::from([("0".into(), "1".into()), ("1".into(), "0".into())]),
        )]),
        restrict: BTreeMap::from([(
            "a".into(),
            BTreeMap::from([
                ("0".into(), WordSpec::Tokens(vec![])),
                ("1".into(), WordSpec::Tokens(vec!["a".into()])),
            ]),
        )]),
        depth_bound: None,
    }
}

/// `Z2` swapping `{0, 1}` with trivial restrictions.
pub fn z2_swap() -> SelfSimilarSpec {
    SelfSimilarSpec {
        alphabet: vec!["0".into(), "1".into()],
        generators: None,
        group: Some(crate::groupoid::cyclic_group_table(2)),
        perm: BTreeMap::from([(
            "a".into(),
            BTreeMap::from([("0".into(), "1".into()), ("1".into(), "0".into())]),
        )]),
        restrict: BTreeMap::new(),
        depth_bound: None,
    }
}

fn category(objects: &[&str], morphisms: &[(&str, &str, &str)], comp: &[[&str; 3]]) -> CategorySpec {
    CategorySpec {
        objects: objects.iter().map(|s| s.to_string()).collect(),
        morphisms: morphisms
            .iter()
            .map(|(id, src, dst)| MorphismSpec {
                id: id.to_string(),
                src: src.to_string(),
                dst: dst.to_string(),
            })
            .collect(),
        identity: objects.iter().map(|x| (x.to_string(), format!("1_{x}"))).collect(),
        comp: comp.iter().map(|t| t.map(str::to_owned)).collect(),
        truncated: false,
    }
}

/// Identities `1_x` plus the given morphisms, with all unit composites.
fn with_units(objects: &[&str], extra: &[(&str, &str, &str)], comp: &[[&str; 3]]) -> CategorySpec {
    let units: Vec<String> = objects.iter().map(|x| format!("1_{x}")).collect();
    let mut morphisms: Vec<(&str, &str, &str)> =
        objects.iter().zip(&units).map(|(x, u)| (u.as_str(), *x, *x)).collect();
    morphisms.extend_from_slice(extra);
    let mut table: Vec<[String; 3]> = Vec::new();
    for &(f, src, dst) in &morphisms {
        table.push([format!("1_{dst}"), f.into(), f.into()]);
        if src != dst || !f.starts_with("1_") {
            table.push([f.into(), format!("1_{src}"), f.into()]);
        }
    }
    let mut spec = category(objects, &morphisms, &[]);
    spec.comp = table;
    spec.comp.extend(comp.iter().map(|t| t.map(str::to_owned)));
    spec
}

/// A functor that is not a discrete Conduché fibration: `f: a → b` maps
/// to `w = v∘u` in `0 → 1 → 2`, and no object lies over `1`.
pub fn conduche_counterexample() -> FibrationFunctor {
    let total = with_units(&["a", "b"], &[("f", "a", "b")], &[]);
    let base = with_units(&["0", "1", "2"], &[("u", "0", "1"), ("v", "1", "2"), ("w", "0", "2")], &[["v", "u", "w"]]);
    let maps = FunctorMaps {
        on_objects: BTreeMap::from([("a".into(), "0".into()), ("b".into(), "2".into())]),
        on_morphisms: BTreeMap::from([
            ("1_a".into(), "1_0".into()),
            ("1_b".into(), "1_2".into()),
            ("f".into(), "w".into()),
        ]),
    };
    FibrationFunctor::new(
        FiniteCategory::from_spec(&total).expect("total category"),
        FiniteCategory::from_spec(&base).expect("base category"),
        &maps,
    )
    .expect("functor")
}

/// The counterexample as file data: total, base and the functor maps.
pub fn conduche_counterexample_spec() -> (CategorySpec, CategorySpec, FunctorMaps) {
    let f = conduche_counterexample();
    (f.total().to_spec(), f.base().to_spec(), f.maps())
}

//! Composition of correspondences, 2-arrows and the coherence data.
//!
//! `X ∘ Y` is the orbit space of the diagonal action
//! `g·(x, y) = (x·g⁻¹, g·y)` on the fibre product `X ×_{G⁰} Y`. A class is
//! named `[x,y]` after its least pair in (point, point) order.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::correspondence::{same_groupoid, Correspondence, PointId, RawCorrespondence};
use crate::error::{Axiom, Error, Result};
use crate::groupoid::ArrowId;

/// Name of the class of `(x, y)` in a composite.
pub fn class_name(x: &str, y: &str) -> String {
    format!("[{x},{y}]")
}

/// `X ∘ Y` together with the quotient map from the fibre product.
#[derive(Clone, Debug)]
pub struct Composite {
    corr: Arc<Correspondence>,
    x: Arc<Correspondence>,
    y: Arc<Correspondence>,
    pair_class: HashMap<(PointId, PointId), PointId>,
    reps: Vec<(PointId, PointId)>,
}

impl Composite {
    /// The composite correspondence.
    pub fn corr(&self) -> &Arc<Correspondence> {
        &self.corr
    }

    pub fn left_factor(&self) -> &Arc<Correspondence> {
        &self.x
    }

    pub fn right_factor(&self) -> &Arc<Correspondence> {
        &self.y
    }

    /// `[x, y]`, or `None` unless `s(x) = r(y)`.
    pub fn class(&self, x: PointId, y: PointId) -> Option<PointId> {
        self.pair_class.get(&(x, y)).copied()
    }

    /// The least pair in the class `p`.
    pub fn rep(&self, p: PointId) -> (PointId, PointId) {
        self.reps[p.0]
    }

    /// Number of pairs in the fibre product.
    pub fn fibre_product_len(&self) -> usize {
        self.pair_class.len()
    }
}

/// Composes `X: H ← G` with `Y: G ← K`.
pub fn compose(x: &Arc<Correspondence>, y: &Arc<Correspondence>) -> Result<Composite> {
    if !same_groupoid(x.right(), y.left()) {
        return Err(Error::EndpointMismatch(
            "right groupoid of the first factor differs from left groupoid of the second".into(),
        ));
    }
    let g = x.right();
    let mut y_by_r: Vec<Vec<PointId>> = vec![Vec::new(); g.n_objects()];
    for q in y.point_ids() {
        y_by_r[y.r(q).0].push(q);
    }

    let mut pair_class: HashMap<(PointId, PointId), usize> = HashMap::new();
    let mut reps: Vec<(PointId, PointId)> = Vec::new();
    for p in x.point_ids() {
        let mid = x.s(p);
        for &q in &y_by_r[mid.0] {
            if pair_class.contains_key(&(p, q)) {
                continue;
            }
            let c = reps.len();
            reps.push((p, q));
            for &a in g.arrows_from(mid) {
                let pair = (x.right_mul(p, g.inv(a)), y.left_mul(a, q));
                pair_class.insert(pair, c);
            }
        }
    }

    let names: Vec<String> = reps
        .iter()
        .map(|&(p, q)| class_name(x.point_name(p), y.point_name(q)))
        .collect();
    let raw = RawCorrespondence::from_fns(
        x.left().clone(),
        y.right().clone(),
        names,
        reps.iter().map(|&(p, _)| x.r(p)).collect(),
        reps.iter().map(|&(_, q)| y.s(q)).collect(),
        |h, c| {
            let (p, q) = reps[c];
            pair_class[&(x.left_mul(h, p), q)]
        },
        |c, k| {
            let (p, q) = reps[c];
            pair_class[&(p, y.right_mul(q, k))]
        },
    );
    let corr = Arc::new(raw.finish()?);
    let class_point: Vec<PointId> = reps
        .iter()
        .map(|&(p, q)| {
            corr.point_id(&class_name(x.point_name(p), y.point_name(q)))
                .expect("class is a carrier point")
        })
        .collect();
    let mut sorted_reps = vec![(PointId(0), PointId(0)); reps.len()];
    for (c, &pt) in class_point.iter().enumerate() {
        sorted_reps[pt.0] = reps[c];
    }
    Ok(Composite {
        corr,
        x: x.clone(),
        y: y.clone(),
        pair_class: pair_class
            .into_iter()
            .map(|(k, c)| (k, class_point[c]))
            .collect(),
        reps: sorted_reps,
    })
}

/// An injective biequivariant map between correspondences with the same
/// left and right groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoArrow {
    source: Arc<Correspondence>,
    target: Arc<Correspondence>,
    map: Vec<PointId>,
}

impl TwoArrow {
    /// Validates `map` (indexed by source points) as a 2-arrow.
    pub fn new(
        source: Arc<Correspondence>,
        target: Arc<Correspondence>,
        map: Vec<PointId>,
    ) -> Result<Self> {
        if !same_groupoid(source.left(), target.left())
            || !same_groupoid(source.right(), target.right())
        {
            return Err(Error::EndpointMismatch(
                "2-arrow between correspondences with different groupoids".into(),
            ));
        }
        if map.len() != source.len() || map.iter().any(|p| p.0 >= target.len()) {
            return Err(Error::axiom(Axiom::Table, ["2-arrow map is not total"]));
        }
        let a = TwoArrow {
            source,
            target,
            map,
        };
        a.check()?;
        Ok(a)
    }

    /// Builds a 2-arrow from a point-name map.
    pub fn from_names(
        source: Arc<Correspondence>,
        target: Arc<Correspondence>,
        map: &BTreeMap<String, String>,
    ) -> Result<Self> {
        let m = source
            .point_names()
            .iter()
            .map(|p| {
                let q = map.get(p).ok_or_else(|| {
                    Error::axiom(Axiom::Table, [format!("2-arrow undefined on {p}")])
                })?;
                target.point(q)
            })
            .collect::<Result<Vec<_>>>()?;
        TwoArrow::new(source, target, m)
    }

    /// The inclusion of a correspondence into one containing all its point
    /// names with the same actions.
    pub fn embedding(sub: Arc<Correspondence>, sup: Arc<Correspondence>) -> Result<Self> {
        let m = sub
            .point_names()
            .iter()
            .map(|p| sup.point(p))
            .collect::<Result<Vec<_>>>()?;
        TwoArrow::new(sub, sup, m)
    }

    fn check(&self) -> Result<()> {
        let (src, tgt) = (&*self.source, &*self.target);
        let mut seen = vec![None; tgt.len()];
        for x in src.point_ids() {
            let ax = self.apply(x);
            if let Some(prev) = seen[ax.0].replace(x) {
                return Err(Error::axiom(
                    Axiom::NotInjective,
                    [
                        src.point_name(prev).to_owned(),
                        src.point_name(x).to_owned(),
                    ],
                ));
            }
            if tgt.r(ax) != src.r(x) || tgt.s(ax) != src.s(x) {
                return Err(Error::axiom(Axiom::Anchor, [src.point_name(x).to_owned()]));
            }
            for &h in src.left().arrows_from(src.r(x)) {
                if tgt.left_mul(h, ax) != self.apply(src.left_mul(h, x)) {
                    return Err(Error::axiom(
                        Axiom::Equivariance,
                        [
                            src.left().arrow_name(h).to_owned(),
                            src.point_name(x).to_owned(),
                        ],
                    ));
                }
            }
            for &g in src.right().arrows_to(src.s(x)) {
                if tgt.right_mul(ax, g) != self.apply(src.right_mul(x, g)) {
                    return Err(Error::axiom(
                        Axiom::Equivariance,
                        [
                            src.point_name(x).to_owned(),
                            src.right().arrow_name(g).to_owned(),
                        ],
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn identity(x: Arc<Correspondence>) -> Self {
        let map = x.point_ids().collect();
        TwoArrow {
            source: x.clone(),
            target: x,
            map,
        }
    }

    pub fn source(&self) -> &Arc<Correspondence> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Correspondence> {
        &self.target
    }

    pub fn apply(&self, x: PointId) -> PointId {
        self.map[x.0]
    }

    pub fn map(&self) -> &[PointId] {
        &self.map
    }

    /// The map as point names.
    pub fn name_map(&self) -> BTreeMap<String, String> {
        self.source
            .point_ids()
            .map(|x| {
                (
                    self.source.point_name(x).to_owned(),
                    self.target.point_name(self.apply(x)).to_owned(),
                )
            })
            .collect()
    }

    pub fn is_bijective(&self) -> bool {
        self.source.len() == self.target.len()
    }

    /// Vertical composite: first `self`, then `next`.
    pub fn then(&self, next: &TwoArrow) -> Result<TwoArrow> {
        if self.target != next.source {
            return Err(Error::EndpointMismatch(
                "2-arrows are not composable".into(),
            ));
        }
        Ok(TwoArrow {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self.map.iter().map(|&p| next.apply(p)).collect(),
        })
    }

    pub fn inverse(&self) -> Result<TwoArrow> {
        if !self.is_bijective() {
            return Err(Error::axiom(
                Axiom::NotInjective,
                ["2-arrow is not surjective"],
            ));
        }
        let mut map = vec![PointId(0); self.map.len()];
        for (x, &y) in self.map.iter().enumerate() {
            map[y.0] = PointId(x);
        }
        Ok(TwoArrow {
            source: self.target.clone(),
            target: self.source.clone(),
            map,
        })
    }

    /// First source point (by name) where the two parallel 2-arrows differ.
    pub fn first_difference(&self, other: &TwoArrow) -> Result<Option<String>> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::EndpointMismatch("2-arrows are not parallel".into()));
        }
        Ok(self
            .source
            .point_ids()
            .find(|&x| self.apply(x) != other.apply(x))
            .map(|x| self.source.point_name(x).to_owned()))
    }
}

/// `α ∘ β: X₁∘Y₁ ⇒ X₂∘Y₂`, `[x, y] ↦ [α(x), β(y)]`.
pub fn horizontal_compose(alpha: &TwoArrow, beta: &TwoArrow) -> Result<TwoArrow> {
    let c1 = compose(&alpha.source, &beta.source)?;
    let c2 = compose(&alpha.target, &beta.target)?;
    horizontal_compose_with(alpha, beta, &c1, &c2)
}

/// As [`horizontal_compose`] with precomputed composites.
pub fn horizontal_compose_with(
    alpha: &TwoArrow,
    beta: &TwoArrow,
    c1: &Composite,
    c2: &Composite,
) -> Result<TwoArrow> {
    let map = c1
        .corr
        .point_ids()
        .map(|p| {
            let (x, y) = c1.rep(p);
            c2.class(alpha.apply(x), beta.apply(y))
                .ok_or_else(|| Error::EndpointMismatch("2-arrows do not preserve anchors".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    TwoArrow::new(c1.corr.clone(), c2.corr.clone(), map)
}

/// `1_H ∘ X ⇒ X`, `[h, x] ↦ h·x`.
pub fn unitor_left(x: &Arc<Correspondence>) -> Result<TwoArrow> {
    let id = Arc::new(Correspondence::identity(x.left().clone()));
    let c = compose(&id, x)?;
    let map = c
        .corr
        .point_ids()
        .map(|p| {
            let (h, q) = c.rep(p);
            x.left_mul(ArrowId(h.0), q)
        })
        .collect();
    TwoArrow::new(c.corr.clone(), x.clone(), map)
}

/// `X ∘ 1_G ⇒ X`, `[x, g] ↦ x·g`.
pub fn unitor_right(x: &Arc<Correspondence>) -> Result<TwoArrow> {
    let id = Arc::new(Correspondence::identity(x.right().clone()));
    let c = compose(x, &id)?;
    let map = c
        .corr
        .point_ids()
        .map(|p| {
            let (q, g) = c.rep(p);
            x.right_mul(q, ArrowId(g.0))
        })
        .collect();
    TwoArrow::new(c.corr.clone(), x.clone(), map)
}

/// `X₁∘(X₂∘X₃) ⇒ (X₁∘X₂)∘X₃`, `[x₁,[x₂,x₃]] ↦ [[x₁,x₂],x₃]`.
pub fn associator(
    x1: &Arc<Correspondence>,
    x2: &Arc<Correspondence>,
    x3: &Arc<Correspondence>,
) -> Result<TwoArrow> {
    let c23 = compose(x2, x3)?;
    let c1_23 = compose(x1, c23.corr())?;
    let c12 = compose(x1, x2)?;
    let c12_3 = compose(c12.corr(), x3)?;
    associator_with(&c23, &c1_23, &c12, &c12_3)
}

fn associator_with(
    c23: &Composite,
    c1_23: &Composite,
    c12: &Composite,
    c12_3: &Composite,
) -> Result<TwoArrow> {
    let map = c1_23
        .corr
        .point_ids()
        .map(|p| {
            let (p1, q) = c1_23.rep(p);
            let (p2, p3) = c23.rep(q);
            let p12 = c12.class(p1, p2).expect("composable pair");
            c12_3.class(p12, p3).expect("composable pair")
        })
        .collect();
    TwoArrow::new(c1_23.corr.clone(), c12_3.corr.clone(), map)
}

/// Checks `λ_{X'} ∘ (1∘α) = α ∘ λ_X` for `α: X ⇒ X'`.
pub fn check_unitor_left_naturality(alpha: &TwoArrow) -> Result<Option<String>> {
    let id = TwoArrow::identity(Arc::new(Correspondence::identity(
        alpha.source.left().clone(),
    )));
    let lhs = horizontal_compose(&id, alpha)?.then(&unitor_left(&alpha.target)?)?;
    let rhs = unitor_left(&alpha.source)?.then(alpha)?;
    lhs.first_difference(&rhs)
}

/// Checks `ρ_{X'} ∘ (α∘1) = α ∘ ρ_X` for `α: X ⇒ X'`.
pub fn check_unitor_right_naturality(alpha: &TwoArrow) -> Result<Option<String>> {
    let id = TwoArrow::identity(Arc::new(Correspondence::identity(
        alpha.source.right().clone(),
    )));
    let lhs = horizontal_compose(alpha, &id)?.then(&unitor_right(&alpha.target)?)?;
    let rhs = unitor_right(&alpha.source)?.then(alpha)?;
    lhs.first_difference(&rhs)
}

/// Checks `assoc' ∘ (α₁∘(α₂∘α₃)) = ((α₁∘α₂)∘α₃) ∘ assoc`.
pub fn check_associator_naturality(
    a1: &TwoArrow,
    a2: &TwoArrow,
    a3: &TwoArrow,
) -> Result<Option<String>> {
    let inner = horizontal_compose(a2, a3)?;
    let lhs =
        horizontal_compose(a1, &inner)?.then(&associator(&a1.target, &a2.target, &a3.target)?)?;
    let outer = horizontal_compose(a1, a2)?;
    let rhs =
        associator(&a1.source, &a2.source, &a3.source)?.then(&horizontal_compose(&outer, a3)?)?;
    lhs.first_difference(&rhs)
}

/// One line of a [`CoherenceReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoherenceCheck {
    pub name: String,
    pub passed: bool,
    /// A class on which the two sides differ, when `passed` is false.
    pub witness: Option<String>,
    /// Number of classes compared.
    pub classes: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CoherenceReport {
    pub checks: Vec<CoherenceCheck>,
}

impl CoherenceReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, witness: Option<String>, classes: usize) {
        self.checks.push(CoherenceCheck {
            name: name.into(),
            passed: witness.is_none(),
            witness,
            classes,
        });
    }

    fn bijective(&mut self, name: &str, a: &TwoArrow) {
        let witness =
            (!a.is_bijective()).then(|| format!("{} -> {}", a.source.len(), a.target.len()));
        self.push(format!("{name} bijective"), witness, a.source.len());
    }
}

/// The triangle `(ρ_X ∘ 1_Y) ∘ assoc_{X,1,Y} = 1_X ∘ λ_Y`.
fn triangle(x: &Arc<Correspondence>, y: &Arc<Correspondence>) -> Result<(Option<String>, usize)> {
    let id_mid = Arc::new(Correspondence::identity(x.right().clone()));
    let assoc = associator(x, &id_mid, y)?;
    let lhs = assoc.then(&horizontal_compose(
        &unitor_right(x)?,
        &TwoArrow::identity(y.clone()),
    )?)?;
    let rhs = horizontal_compose(&TwoArrow::identity(x.clone()), &unitor_left(y)?)?;
    Ok((lhs.first_difference(&rhs)?, lhs.source.len()))
}

/// Checks unitors, associators, triangles and (for four factors) the
/// pentagon on a chain of 1 to 4 composable correspondences.
pub fn check_coherence(chain: &[Arc<Correspondence>]) -> Result<CoherenceReport> {
    if chain.is_empty() || chain.len() > 4 {
        return Err(Error::InvalidInput(
            "coherence needs a chain of 1 to 4 correspondences".into(),
        ));
    }
    for w in chain.windows(2) {
        if !same_groupoid(w[0].right(), w[1].left()) {
            return Err(Error::EndpointMismatch("chain is not composable".into()));
        }
    }
    let mut report = CoherenceReport::default();
    for (i, x) in chain.iter().enumerate() {
        report.bijective(&format!("left unitor X{}", i + 1), &unitor_left(x)?);
        report.bijective(&format!("right unitor X{}", i + 1), &unitor_right(x)?);
        let id = TwoArrow::identity(x.clone());
        report.push(
            format!("left unitor naturality X{}", i + 1),
            check_unitor_left_naturality(&id)?,
            x.len(),
        );
        report.push(
            format!("right unitor naturality X{}", i + 1),
            check_unitor_right_naturality(&id)?,
            x.len(),
        );
    }
    for (i, w) in chain.windows(2).enumerate() {
        let (witness, classes) = triangle(&w[0], &w[1])?;
        report.push(format!("triangle X{} X{}", i + 1, i + 2), witness, classes);
    }
    for (i, w) in chain.windows(3).enumerate() {
        let a = associator(&w[0], &w[1], &w[2])?;
        report.bijective(&format!("associator X{} X{} X{}", i + 1, i + 2, i + 3), &a);
        let ids: Vec<TwoArrow> = w.iter().map(|x| TwoArrow::identity(x.clone())).collect();
        report.push(
            format!("associator naturality X{} X{} X{}", i + 1, i + 2, i + 3),
            check_associator_naturality(&ids[0], &ids[1], &ids[2])?,
            a.source.len(),
        );
    }
    if chain.len() == 4 {
        let (witness, classes) = pentagon(&chain[0], &chain[1], &chain[2], &chain[3])?;
        report.push("pentagon", witness, classes);
    }
    Ok(report)
}

/// Compares the two associator routes
/// `X₁∘(X₂∘(X₃∘X₄)) ⇒ ((X₁∘X₂)∘X₃)∘X₄`.
pub fn pentagon(
    x1: &Arc<Correspondence>,
    x2: &Arc<Correspondence>,
    x3: &Arc<Correspondence>,
    x4: &Arc<Correspondence>,
) -> Result<(Option<String>, usize)> {
    let c34 = compose(x3, x4)?;
    let c12 = compose(x1, x2)?;
    // short route
    let first = associator(x1, x2, c34.corr())?;
    let second = associator(c12.corr(), x3, x4)?;
    let short = first.then(&second)?;
    // long route
    let id1 = TwoArrow::identity(x1.clone());
    let id4 = TwoArrow::identity(x4.clone());
    let step1 = horizontal_compose(&id1, &associator(x2, x3, x4)?)?;
    let c23 = compose(x2, x3)?;
    let step2 = associator(x1, c23.corr(), x4)?;
    let step3 = horizontal_compose(&associator(x1, x2, x3)?, &id4)?;
    let long = step1.then(&step2)?.then(&step3)?;
    Ok((short.first_difference(&long)?, short.source.len()))
}

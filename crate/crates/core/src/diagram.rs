//! Diagrams of correspondences indexed by a finite category, product
//! systems, and the passage between discrete Conduché fibrations and
//! diagrams over spaces.
//!
//! A [`Diagram`] assigns a groupoid `𝒢_x` to every object `x` of the index
//! category, a correspondence `X_p: 𝒢_{dst p} ← 𝒢_{src p}` to every
//! morphism and a bijection `σ_{p,q}: X_p∘X_q → X_{pq}` to every composable
//! pair whose composite is inside the index. Infinite monoids such as `ℕᵏ`
//! are indexed by a degree truncation, see [`crate::category::nk_truncated`].

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::AlgebraElement;
use crate::bicategory::{
    associator, class_name, compose, horizontal_compose, unitor_left, unitor_right, Composite,
    TwoArrow,
};
use crate::category::{
    degrees_up_to, nk_truncated, nk_word_name, FibrationFunctor, FiniteCategory,
};
use crate::correspondence::{graph_correspondence, Correspondence, PointId};
use crate::error::{Error, Result};
use crate::groupoid::{discrete_groupoid, ArrowId, FiniteGroupoid, ObjectId};
use crate::hilbert::{mu, two_arrow_isometry, ModuleElement};

/// Name maps `σ_{p,q}`, keyed by index morphism pairs `(p, q)`.
pub type SigmaMaps = BTreeMap<(usize, usize), BTreeMap<String, String>>;

#[derive(Clone, Debug)]
pub struct Diagram {
    index: FiniteCategory,
    nodes: Vec<Arc<FiniteGroupoid>>,
    arrows: Vec<Arc<Correspondence>>,
    sigma: SigmaMaps,
}

/// Summary of a successful [`validate_diagram`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    pub objects: usize,
    pub morphisms: usize,
    /// Composable pairs whose `σ` was checked.
    pub pairs: usize,
    /// Composable triples whose associativity square was checked.
    pub triples: usize,
}

fn violation(arrows: &[&str], witness: impl Into<String>) -> Error {
    Error::CoherenceViolation {
        arrows: arrows.iter().map(|s| (*s).to_owned()).collect(),
        witness: witness.into(),
    }
}

impl Diagram {
    /// Checks that the shapes fit: one node per object, correspondences
    /// between the right nodes and a `σ` for every composable pair.
    pub fn new(
        index: FiniteCategory,
        nodes: Vec<Arc<FiniteGroupoid>>,
        arrows: Vec<Arc<Correspondence>>,
        sigma: SigmaMaps,
    ) -> Result<Self> {
        if nodes.len() != index.n_objects() || arrows.len() != index.n_morphisms() {
            return Err(Error::InvalidInput(
                "diagram needs one node per object and one correspondence per morphism".into(),
            ));
        }
        for m in index.morphism_ids() {
            let x = &arrows[m];
            if **x.left() != *nodes[index.dst(m)] || **x.right() != *nodes[index.src(m)] {
                return Err(Error::EndpointMismatch(format!(
                    "correspondence for {} does not join its endpoint groupoids",
                    index.morphism_name(m)
                )));
            }
        }
        for f in index.morphism_ids() {
            for g in index.morphism_ids() {
                if index.comp(f, g).is_some() && !sigma.contains_key(&(f, g)) {
                    return Err(Error::InvalidInput(format!(
                        "missing multiplication for ({}, {})",
                        index.morphism_name(f),
                        index.morphism_name(g)
                    )));
                }
            }
        }
        Ok(Diagram {
            index,
            nodes,
            arrows,
            sigma,
        })
    }

    pub fn index(&self) -> &FiniteCategory {
        &self.index
    }

    pub fn nodes(&self) -> &[Arc<FiniteGroupoid>] {
        &self.nodes
    }

    pub fn node(&self, x: usize) -> &Arc<FiniteGroupoid> {
        &self.nodes[x]
    }

    pub fn arrow(&self, m: usize) -> &Arc<Correspondence> {
        &self.arrows[m]
    }

    pub fn arrows(&self) -> &[Arc<Correspondence>] {
        &self.arrows
    }

    pub fn sigma_maps(&self) -> &SigmaMaps {
        &self.sigma
    }

    /// Replaces one `σ`. Intended for building corrupted variants.
    pub fn with_sigma(mut self, p: usize, q: usize, map: BTreeMap<String, String>) -> Self {
        self.sigma.insert((p, q), map);
        self
    }

    /// The free monoid on one generator acting through `x: G ← G`, truncated
    /// at word length `max_len`. Powers are right-nested composites and
    /// `σ_{a,b}` is the canonical rebracketing.
    pub fn free_monoid(x: Arc<Correspondence>, generator: &str, max_len: usize) -> Result<Self> {
        if **x.left() != **x.right() {
            return Err(Error::EndpointMismatch(
                "free monoid diagrams need an endomorphism".into(),
            ));
        }
        let index = nk_truncated(&[generator], max_len)?;
        let words = Diagram::nk_words(&[generator.to_owned()], &index, max_len);
        chain_diagram(index, x.left().clone(), words, &[x], |_, t| Ok(t))
    }

    /// Assigns each index morphism the letters of its degree, colours in
    /// order, for a truncated `ℕᵏ` index built by [`nk_truncated`].
    pub(crate) fn nk_words(
        colours: &[String],
        index: &FiniteCategory,
        max_total: usize,
    ) -> Vec<Vec<usize>> {
        let by_name: HashMap<String, Vec<usize>> = degrees_up_to(colours.len(), max_total)
            .into_iter()
            .map(|d| (nk_word_name(colours, &d), d))
            .collect();
        index
            .morphism_ids()
            .map(|m| {
                by_name[index.morphism_name(m)]
                    .iter()
                    .enumerate()
                    .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
                    .collect()
            })
            .collect()
    }

    fn sigma_arrows(&self) -> Result<BTreeMap<(usize, usize), (Composite, TwoArrow)>> {
        let c = &self.index;
        let mut out = BTreeMap::new();
        for x in c.object_ids() {
            let id = c.identity(x);
            if *self.arrows[id] != Correspondence::identity(self.nodes[x].clone()) {
                return Err(violation(
                    &[c.morphism_name(id)],
                    "unit morphism is not sent to an identity correspondence",
                ));
            }
        }
        for (&(f, g), map) in &self.sigma {
            let (fname, gname) = (c.morphism_name(f), c.morphism_name(g));
            let Some(fg) = c.comp(f, g) else {
                return Err(violation(
                    &[fname, gname],
                    "multiplication given for a pair outside the index",
                ));
            };
            let comp = compose(&self.arrows[f], &self.arrows[g])?;
            let sigma = TwoArrow::from_names(comp.corr().clone(), self.arrows[fg].clone(), map)
                .map_err(|e| violation(&[fname, gname], e.to_string()))?;
            if !sigma.is_bijective() {
                return Err(violation(
                    &[fname, gname],
                    "multiplication is not surjective",
                ));
            }
            let unit = if c.is_identity(f) {
                Some(unitor_left(&self.arrows[g])?)
            } else if c.is_identity(g) {
                Some(unitor_right(&self.arrows[f])?)
            } else {
                None
            };
            if let Some(u) = unit {
                if let Some(p) = sigma.first_difference(&u)? {
                    return Err(violation(
                        &[fname, gname],
                        format!("differs from the unitor at {p}"),
                    ));
                }
            }
            out.insert((f, g), (comp, sigma));
        }
        Ok(out)
    }
}

/// Checks every `σ` (biequivariant bijection, unitors on unit morphisms)
/// and the associativity square
/// `σ_{pq,t}∘(σ_{p,q}∘1) = σ_{p,qt}∘(1∘σ_{q,t})∘α⁻¹` for all triples.
pub fn validate_diagram(d: &Diagram) -> Result<DiagramReport> {
    let c = &d.index;
    let sigma = d.sigma_arrows()?;
    let mut triples = 0;
    for (&(f, g), (_, s_fg)) in &sigma {
        let fg = c.comp(f, g).expect("checked in sigma_arrows");
        for h in c.morphism_ids() {
            let (Some(gh), Some(fgh)) = (c.comp(g, h), c.comp(fg, h)) else {
                continue;
            };
            let names = [c.morphism_name(f), c.morphism_name(g), c.morphism_name(h)];
            let Some((_, s_gh)) = sigma.get(&(g, h)) else {
                continue;
            };
            let (Some((_, s_fg_h)), Some((_, s_f_gh))) = (sigma.get(&(fg, h)), sigma.get(&(f, gh)))
            else {
                return Err(violation(&names, "composite outside the index"));
            };
            if c.comp(f, gh) != Some(fgh) {
                return Err(violation(&names, "index composition is not associative"));
            }
            triples += 1;
            let id_f = TwoArrow::identity(d.arrows[f].clone());
            let id_h = TwoArrow::identity(d.arrows[h].clone());
            let lhs = horizontal_compose(s_fg, &id_h)?.then(s_fg_h)?;
            let rhs = associator(&d.arrows[f], &d.arrows[g], &d.arrows[h])?
                .inverse()?
                .then(&horizontal_compose(&id_f, s_gh)?)?
                .then(s_f_gh)?;
            if let Some(p) = lhs.first_difference(&rhs)? {
                return Err(violation(&names, p));
            }
        }
    }
    Ok(DiagramReport {
        objects: c.n_objects(),
        morphisms: c.n_morphisms(),
        pairs: sigma.len(),
        triples,
    })
}

/// A right-nested iterated composite `X₁∘(X₂∘(…∘Xₙ))` with `n ≥ 1`.
struct Chain {
    factors: Vec<Arc<Correspondence>>,
    /// `inner[i]` is `factors[i] ∘ (rest)`, for `i < n - 1`.
    inner: Vec<Composite>,
}

impl Chain {
    fn new(factors: Vec<Arc<Correspondence>>) -> Result<Self> {
        let n = factors.len();
        let mut inner: Vec<Composite> = Vec::with_capacity(n.saturating_sub(1));
        let mut acc = factors[n - 1].clone();
        for i in (0..n - 1).rev() {
            let c = compose(&factors[i], &acc)?;
            acc = c.corr().clone();
            inner.push(c);
        }
        inner.reverse();
        Ok(Chain { factors, inner })
    }

    fn corr(&self) -> &Arc<Correspondence> {
        self.inner.first().map_or(&self.factors[0], |c| c.corr())
    }

    fn flatten(&self, mut p: PointId) -> Vec<PointId> {
        let mut out = Vec::with_capacity(self.factors.len());
        for c in &self.inner {
            let (x, rest) = c.rep(p);
            out.push(x);
            p = rest;
        }
        out.push(p);
        out
    }

    fn class_of(&self, tuple: &[PointId]) -> Option<PointId> {
        let mut q = *tuple.last()?;
        for (c, &x) in self.inner.iter().zip(tuple).rev() {
            q = c.class(x, q)?;
        }
        Some(q)
    }
}

/// Builds a one-node diagram whose correspondence over a morphism is the
/// composite of the letter correspondences of its word. For each pair the
/// concatenated tuple is handed to `reorder`, which must return a tuple in
/// the letter order of the composite word.
pub(crate) fn chain_diagram(
    index: FiniteCategory,
    node: Arc<FiniteGroupoid>,
    words: Vec<Vec<usize>>,
    letters: &[Arc<Correspondence>],
    reorder: impl Fn(&[usize], Vec<PointId>) -> Result<Vec<PointId>>,
) -> Result<Diagram> {
    let identity = Arc::new(Correspondence::identity(node.clone()));
    let chains: Vec<Option<Chain>> = words
        .iter()
        .map(|w| {
            if w.is_empty() {
                Ok(None)
            } else {
                Chain::new(w.iter().map(|&l| letters[l].clone()).collect()).map(Some)
            }
        })
        .collect::<Result<_>>()?;
    let arrows: Vec<Arc<Correspondence>> = chains
        .iter()
        .map(|c| {
            c.as_ref()
                .map_or_else(|| identity.clone(), |c| c.corr().clone())
        })
        .collect();
    let mut sigma = SigmaMaps::new();
    for f in index.morphism_ids() {
        for g in index.morphism_ids() {
            let Some(fg) = index.comp(f, g) else { continue };
            let map = match (&chains[f], &chains[g]) {
                (None, _) => unitor_left(&arrows[g])?.name_map(),
                (_, None) => unitor_right(&arrows[f])?.name_map(),
                (Some(cf), Some(cg)) => {
                    let target = chains[fg]
                        .as_ref()
                        .expect("nonempty words compose to nonempty words");
                    let comp = compose(&arrows[f], &arrows[g])?;
                    let mut map = BTreeMap::new();
                    for p in comp.corr().point_ids() {
                        let (u, v) = comp.rep(p);
                        let mut tuple = cf.flatten(u);
                        tuple.extend(cg.flatten(v));
                        let mut word = words[f].clone();
                        word.extend(&words[g]);
                        let t = reorder(&word, tuple)?;
                        let q = target.class_of(&t).ok_or_else(|| {
                            Error::InvalidInput("reordered tuple is not composable".into())
                        })?;
                        map.insert(
                            comp.corr().point_name(p).to_owned(),
                            target.corr().point_name(q).to_owned(),
                        );
                    }
                    map
                }
            };
            sigma.insert((f, g), map);
        }
    }
    Diagram::new(index, vec![node], arrows, sigma)
}

/// A validated diagram with its multiplication maps `μ∘σ`.
#[derive(Clone, Debug)]
pub struct ProductSystem {
    diagram: Diagram,
    sigma: BTreeMap<(usize, usize), (Composite, TwoArrow)>,
}

impl ProductSystem {
    pub fn new(diagram: Diagram) -> Result<Self> {
        validate_diagram(&diagram)?;
        let sigma = diagram.sigma_arrows()?;
        Ok(ProductSystem { diagram, sigma })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    /// Index morphism named `word`.
    pub fn word(&self, word: &str) -> Result<usize> {
        self.diagram
            .index
            .morphism(word)
            .map_err(|_| Error::UnknownWord(word.to_owned()))
    }

    /// The correspondence whose compactly supported functions form the fibre
    /// over `word`.
    pub fn fiber(&self, word: &str) -> Result<&Arc<Correspondence>> {
        Ok(&self.diagram.arrows[self.word(word)?])
    }

    /// Dimension of the fibre over `word`.
    pub fn fiber_dimension(&self, word: &str) -> Result<usize> {
        Ok(self.fiber(word)?.len())
    }

    /// `σ_{p,q}(μ(ξ ⊗ η))` for `ξ` in the fibre over `p` and `η` over `q`.
    pub fn multiply(
        &self,
        p: &str,
        xi: &ModuleElement,
        q: &str,
        eta: &ModuleElement,
    ) -> Result<ModuleElement> {
        let (pi, qi) = (self.word(p)?, self.word(q)?);
        if **xi.corr() != *self.diagram.arrows[pi] || **eta.corr() != *self.diagram.arrows[qi] {
            return Err(Error::EndpointMismatch(
                "element does not lie in the named fibre".into(),
            ));
        }
        let (comp, sigma) = self
            .sigma
            .get(&(pi, qi))
            .ok_or_else(|| Error::UnknownWord(format!("{p}·{q}")))?;
        let xi = ModuleElement::from_coeffs(comp.left_factor().clone(), xi.coeffs().clone());
        let eta = ModuleElement::from_coeffs(comp.right_factor().clone(), eta.coeffs().clone());
        two_arrow_isometry(sigma, &mu(comp, &vec![(xi, eta)])?)
    }

    /// Name of the composite of two words, if it lies in the index.
    pub fn product_word(&self, p: &str, q: &str) -> Result<Option<String>> {
        let c = &self.diagram.index;
        Ok(c.comp(self.word(p)?, self.word(q)?)
            .map(|m| c.morphism_name(m).to_owned()))
    }

    /// Unit fibre at object `x` as an algebra element space: the identity
    /// correspondence has one point per arrow of `𝒢_x`.
    pub fn unit_element(&self, x: usize, f: &ModuleElement) -> Result<AlgebraElement> {
        let node = self.diagram.nodes[x].clone();
        if **f.corr() != Correspondence::identity(node.clone()) {
            return Err(Error::EndpointMismatch(
                "element is not in a unit fibre".into(),
            ));
        }
        Ok(AlgebraElement::from_coeffs(
            node,
            f.coeffs().iter().map(|(p, c)| (ArrowId(p.0), c.clone())),
        ))
    }
}

/// The diagram of a discrete Conduché fibration `F: 𝓔 → 𝒞`: the node over
/// `x` is the set `F⁻¹(x)`, the correspondence over `g` is `F⁻¹(g)` and
/// `σ` is composition in `𝓔`.
pub fn fibration_to_diagram(f: &FibrationFunctor) -> Result<Diagram> {
    let report = f.check_conduche();
    if let Some(w) = report.witness {
        return Err(Error::NotConduche(format!(
            "{} has {} lifts of {} after {}",
            w.morphism, w.lifts, w.rho, w.lambda
        )));
    }
    let (e, c) = (f.total(), f.base());
    let mut local = vec![0usize; e.n_objects()];
    let mut nodes = Vec::with_capacity(c.n_objects());
    for x in c.object_ids() {
        let objs: Vec<usize> = e.object_ids().filter(|&o| f.on_object(o) == x).collect();
        let node = discrete_groupoid(objs.iter().map(|&o| {
            (
                e.object_name(o).to_owned(),
                e.morphism_name(e.identity(o)).to_owned(),
            )
        }))?;
        for &o in &objs {
            local[o] = node.object(e.object_name(o))?.0;
        }
        nodes.push(Arc::new(node));
    }
    let arrows = c
        .morphism_ids()
        .map(|g| {
            let ms: Vec<usize> = e
                .morphism_ids()
                .filter(|&m| f.on_morphism(m) == g)
                .collect();
            graph_correspondence(
                nodes[c.dst(g)].clone(),
                nodes[c.src(g)].clone(),
                ms.iter().map(|&m| e.morphism_name(m).to_owned()).collect(),
                ms.iter().map(|&m| ObjectId(local[e.dst(m)])).collect(),
                ms.iter().map(|&m| ObjectId(local[e.src(m)])).collect(),
            )
            .map(Arc::new)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sigma = SigmaMaps::new();
    for g in c.morphism_ids() {
        for h in c.morphism_ids() {
            if c.comp(g, h).is_none() {
                continue;
            }
            let mut map = BTreeMap::new();
            for a in e.morphism_ids().filter(|&m| f.on_morphism(m) == g) {
                for b in e
                    .morphism_ids()
                    .filter(|&m| f.on_morphism(m) == h && e.dst(m) == e.src(a))
                {
                    let ab = e.comp(a, b).ok_or_else(|| {
                        Error::InvalidInput(format!(
                            "{} after {} is missing from the truncation",
                            e.morphism_name(a),
                            e.morphism_name(b)
                        ))
                    })?;
                    map.insert(
                        class_name(e.morphism_name(a), e.morphism_name(b)),
                        e.morphism_name(ab).to_owned(),
                    );
                }
            }
            sigma.insert((g, h), map);
        }
    }
    Diagram::new(c.clone(), nodes, arrows, sigma)
}

/// The fibration of a valid diagram over spaces: objects are the points of
/// the nodes, morphisms the points of the correspondences, and composition
/// is given by `σ`. Names must be globally distinct.
pub fn diagram_to_fibration(d: &Diagram) -> Result<FibrationFunctor> {
    let c = &d.index;
    for x in c.object_ids() {
        if !d.nodes[x].is_space() {
            return Err(Error::NodeNotDiscrete(c.object_name(x).to_owned()));
        }
    }
    validate_diagram(d)?;
    let sigma = d.sigma_arrows()?;

    let mut objects = Vec::new();
    let mut obj_base = Vec::new();
    let mut obj_offset = Vec::with_capacity(c.n_objects());
    for x in c.object_ids() {
        obj_offset.push(objects.len());
        for o in d.nodes[x].object_names() {
            objects.push(o.clone());
            obj_base.push(x);
        }
    }
    let mut morphisms = Vec::new();
    let mut mor_base = Vec::new();
    let mut mor_offset = Vec::with_capacity(c.n_morphisms());
    for g in c.morphism_ids() {
        mor_offset.push(morphisms.len());
        let x = &d.arrows[g];
        for p in x.point_ids() {
            morphisms.push((
                x.point_name(p).to_owned(),
                obj_offset[c.src(g)] + x.s(p).0,
                obj_offset[c.dst(g)] + x.r(p).0,
            ));
            mor_base.push(g);
        }
    }
    let identity: Vec<usize> = (0..objects.len())
        .map(|o| {
            let x = obj_base[o];
            let local = ObjectId(o - obj_offset[x]);
            mor_offset[c.identity(x)] + d.nodes[x].unit(local).0
        })
        .collect();
    let comp = |a: usize, b: usize| -> Option<usize> {
        let (g, h) = (mor_base[a], mor_base[b]);
        let (comp, s) = sigma.get(&(g, h))?;
        let p = comp.class(PointId(a - mor_offset[g]), PointId(b - mor_offset[h]))?;
        let fg = c.comp(g, h)?;
        Some(mor_offset[fg] + s.apply(p).0)
    };
    let total = FiniteCategory::build(
        objects.clone(),
        morphisms.clone(),
        identity,
        c.is_truncated(),
        comp,
    )?;
    let on_objects = total
        .object_ids()
        .map(|o| {
            obj_base[objects
                .iter()
                .position(|n| n == total.object_name(o))
                .expect("object kept")]
        })
        .collect();
    let on_morphisms = total
        .morphism_ids()
        .map(|m| {
            mor_base[morphisms
                .iter()
                .position(|(n, _, _)| n == total.morphism_name(m))
                .expect("morphism kept")]
        })
        .collect();
    FibrationFunctor::from_indices(total, c.clone(), on_objects, on_morphisms)
}

//! Finite categories, functors between them and the unique factorisation
//! lifting (Conduché) condition.
//!
//! Composition follows the groupoid convention: `comp(f, g) = f∘g` is
//! defined when `src(f) = dst(g)`. A category may be marked `truncated`, in
//! which case composites outside the truncation are simply absent from the
//! table; this is how degree-bounded pieces of `ℕᵏ` and of path categories
//! are represented. Truncations are assumed closed under taking factors.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Axiom, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Category tables as they appear in category files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub objects: Vec<String>,
    pub morphisms: Vec<MorphismSpec>,
    pub identity: BTreeMap<String, String>,
    /// `[f, g, f∘g]`.
    pub comp: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub truncated: bool,
}

/// A validated finite (possibly truncated) category.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CategorySpec", into = "CategorySpec")]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<String>,
    src: Vec<usize>,
    dst: Vec<usize>,
    identity: Vec<usize>,
    comp: Vec<Option<usize>>,
    truncated: bool,
    object_index: HashMap<String, usize>,
    morphism_index: HashMap<String, usize>,
}

impl TryFrom<CategorySpec> for FiniteCategory {
    type Error = Error;
    fn try_from(spec: CategorySpec) -> Result<Self> {
        FiniteCategory::from_spec(&spec)
    }
}

impl From<FiniteCategory> for CategorySpec {
    fn from(c: FiniteCategory) -> Self {
        c.to_spec()
    }
}

fn table(what: impl Into<String>) -> Error {
    Error::axiom(Axiom::Table, [what.into()])
}

impl FiniteCategory {
    pub fn from_spec(spec: &CategorySpec) -> Result<Self> {
        let mut objects = spec.objects.clone();
        objects.sort();
        let mut ms: Vec<&MorphismSpec> = spec.morphisms.iter().collect();
        ms.sort_by(|a, b| a.id.cmp(&b.id));
        let mut object_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if object_index.insert(o.clone(), i).is_some() {
                return Err(table(format!("duplicate object {o}")));
            }
        }
        let mut morphism_index = HashMap::new();
        for (i, m) in ms.iter().enumerate() {
            if morphism_index.insert(m.id.clone(), i).is_some() {
                return Err(table(format!("duplicate morphism {}", m.id)));
            }
        }
        let obj = |n: &str| {
            object_index
                .get(n)
                .copied()
                .ok_or_else(|| table(format!("unknown object {n}")))
        };
        let mor = |n: &str| {
            morphism_index
                .get(n)
                .copied()
                .ok_or_else(|| table(format!("unknown morphism {n}")))
        };
        let src = ms.iter().map(|m| obj(&m.src)).collect::<Result<Vec<_>>>()?;
        let dst = ms.iter().map(|m| obj(&m.dst)).collect::<Result<Vec<_>>>()?;
        let identity = objects
            .iter()
            .map(|o| {
                mor(spec
                    .identity
                    .get(o)
                    .ok_or_else(|| table(format!("missing identity for {o}")))?)
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(k) = spec
            .identity
            .keys()
            .find(|k| !object_index.contains_key(*k))
        {
            return Err(table(format!("unknown object {k}")));
        }
        let n = ms.len();
        let mut comp = vec![None; n * n];
        for [f, g, fg] in &spec.comp {
            let (fi, gi, fgi) = (mor(f)?, mor(g)?, mor(fg)?);
            if src[fi] != dst[gi] || comp[fi * n + gi].is_some() {
                return Err(Error::axiom(Axiom::Table, [f.clone(), g.clone()]));
            }
            comp[fi * n + gi] = Some(fgi);
        }
        let cat = FiniteCategory {
            objects,
            morphisms: ms.iter().map(|m| m.id.clone()).collect(),
            src,
            dst,
            identity,
            comp,
            truncated: spec.truncated,
            object_index,
            morphism_index,
        };
        cat.check_laws()?;
        Ok(cat)
    }

    /// Builds a category from unsorted names and a partial composition.
    pub(crate) fn build(
        objects: Vec<String>,
        morphisms: Vec<(String, usize, usize)>,
        identity: Vec<usize>,
        truncated: bool,
        comp: impl Fn(usize, usize) -> Option<usize>,
    ) -> Result<Self> {
        let mut spec = CategorySpec {
            objects: objects.clone(),
            morphisms: morphisms
                .iter()
                .map(|(id, s, d)| MorphismSpec {
                    id: id.clone(),
                    src: objects[*s].clone(),
                    dst: objects[*d].clone(),
                })
                .collect(),
            identity: objects
                .iter()
                .zip(&identity)
                .map(|(o, &i)| (o.clone(), morphisms[i].0.clone()))
                .collect(),
            comp: Vec::new(),
            truncated,
        };
        for (f, (fname, fs, _)) in morphisms.iter().enumerate() {
            for (g, (gname, _, gd)) in morphisms.iter().enumerate() {
                if fs == gd {
                    if let Some(fg) = comp(f, g) {
                        spec.comp
                            .push([fname.clone(), gname.clone(), morphisms[fg].0.clone()]);
                    }
                }
            }
        }
        FiniteCategory::from_spec(&spec)
    }

    fn check_laws(&self) -> Result<()> {
        let name = |f: usize| self.morphisms[f].clone();
        for (x, &i) in self.identity.iter().enumerate() {
            if self.src[i] != x || self.dst[i] != x {
                return Err(Error::axiom(
                    Axiom::UnitLaw,
                    [self.objects[x].clone(), name(i)],
                ));
            }
        }
        let n = self.morphisms.len();
        for f in 0..n {
            let (l, r) = (self.identity[self.dst[f]], self.identity[self.src[f]]);
            if self.comp(l, f) != Some(f) {
                return Err(Error::axiom(Axiom::UnitLaw, [name(l), name(f)]));
            }
            if self.comp(f, r) != Some(f) {
                return Err(Error::axiom(Axiom::UnitLaw, [name(f), name(r)]));
            }
        }
        for f in 0..n {
            for g in 0..n {
                if self.src[f] != self.dst[g] {
                    continue;
                }
                match self.comp(f, g) {
                    Some(fg) => {
                        if self.src[fg] != self.src[g] || self.dst[fg] != self.dst[f] {
                            return Err(Error::axiom(Axiom::Endpoints, [name(f), name(g)]));
                        }
                    }
                    None if !self.truncated => {
                        return Err(Error::axiom(Axiom::Table, [name(f), name(g)]))
                    }
                    None => {}
                }
            }
        }
        for f in 0..n {
            for g in 0..n {
                let Some(fg) = self.comp(f, g) else { continue };
                for h in 0..n {
                    let Some(gh) = self.comp(g, h) else { continue };
                    let (a, b) = (self.comp(fg, h), self.comp(f, gh));
                    if a.is_some() && b.is_some() && a != b || !self.truncated && a != b {
                        return Err(Error::axiom(
                            Axiom::Associativity,
                            [name(f), name(g), name(h)],
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_spec(&self) -> CategorySpec {
        let mut comp = Vec::new();
        for f in self.morphism_ids() {
            for g in self.morphism_ids() {
                if let Some(fg) = self.comp(f, g) {
                    comp.push([
                        self.morphisms[f].clone(),
                        self.morphisms[g].clone(),
                        self.morphisms[fg].clone(),
                    ]);
                }
            }
        }
        CategorySpec {
            objects: self.objects.clone(),
            morphisms: self
                .morphism_ids()
                .map(|m| MorphismSpec {
                    id: self.morphisms[m].clone(),
                    src: self.objects[self.src[m]].clone(),
                    dst: self.objects[self.dst[m]].clone(),
                })
                .collect(),
            identity: self
                .object_ids()
                .map(|x| {
                    (
                        self.objects[x].clone(),
                        self.morphisms[self.identity[x]].clone(),
                    )
                })
                .collect(),
            comp,
            truncated: self.truncated,
        }
    }

    pub fn object_ids(&self) -> std::ops::Range<usize> {
        0..self.objects.len()
    }

    pub fn morphism_ids(&self) -> std::ops::Range<usize> {
        0..self.morphisms.len()
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_morphisms(&self) -> usize {
        self.morphisms.len()
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.objects[x]
    }

    pub fn morphism_name(&self, f: usize) -> &str {
        &self.morphisms[f]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn morphism_names(&self) -> &[String] {
        &self.morphisms
    }

    pub fn object(&self, name: &str) -> Result<usize> {
        self.object_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownId(name.to_owned()))
    }

    pub fn morphism(&self, name: &str) -> Result<usize> {
        self.morphism_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownId(name.to_owned()))
    }

    pub fn src(&self, f: usize) -> usize {
        self.src[f]
    }

    pub fn dst(&self, f: usize) -> usize {
        self.dst[f]
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.src[f]] == f
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    /// `f∘g` if composable and inside the truncation.
    pub fn comp(&self, f: usize, g: usize) -> Option<usize> {
        self.comp[f * self.morphisms.len() + g]
    }

    /// All `(λ, ρ)` with `ρ∘λ = m`.
    pub fn factorizations(&self, m: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for l in self.morphism_ids() {
            if self.src[l] != self.src[m] {
                continue;
            }
            for r in self.morphism_ids() {
                if self.comp(r, l) == Some(m) {
                    out.push((l, r));
                }
            }
        }
        out
    }
}

/// Functor data as it appears in fibration files, categories resolved.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorMaps {
    pub on_objects: BTreeMap<String, String>,
    pub on_morphisms: BTreeMap<String, String>,
}

/// A functor `F: E → C` between finite categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibrationFunctor {
    total: FiniteCategory,
    base: FiniteCategory,
    on_objects: Vec<usize>,
    on_morphisms: Vec<usize>,
}

impl FibrationFunctor {
    /// Checks totality and functoriality.
    pub fn new(total: FiniteCategory, base: FiniteCategory, maps: &FunctorMaps) -> Result<Self> {
        let on_objects = total
            .objects
            .iter()
            .map(|o| {
                let t = maps
                    .on_objects
                    .get(o)
                    .ok_or_else(|| Error::NotAFunctor(format!("object {o} is not mapped")))?;
                base.object(t)
            })
            .collect::<Result<Vec<_>>>()?;
        let on_morphisms = total
            .morphisms
            .iter()
            .map(|m| {
                let t = maps
                    .on_morphisms
                    .get(m)
                    .ok_or_else(|| Error::NotAFunctor(format!("morphism {m} is not mapped")))?;
                base.morphism(t)
            })
            .collect::<Result<Vec<_>>>()?;
        for k in maps.on_objects.keys() {
            total.object(k)?;
        }
        for k in maps.on_morphisms.keys() {
            total.morphism(k)?;
        }
        FibrationFunctor::from_indices(total, base, on_objects, on_morphisms)
    }

    pub(crate) fn from_indices(
        total: FiniteCategory,
        base: FiniteCategory,
        on_objects: Vec<usize>,
        on_morphisms: Vec<usize>,
    ) -> Result<Self> {
        let f = FibrationFunctor {
            total,
            base,
            on_objects,
            on_morphisms,
        };
        f.check()?;
        Ok(f)
    }

    fn check(&self) -> Result<()> {
        let (e, c) = (&self.total, &self.base);
        for m in e.morphism_ids() {
            let fm = self.on_morphisms[m];
            if c.src(fm) != self.on_objects[e.src(m)] || c.dst(fm) != self.on_objects[e.dst(m)] {
                return Err(Error::NotAFunctor(format!(
                    "endpoints of {} are not preserved",
                    e.morphism_name(m)
                )));
            }
        }
        for x in e.object_ids() {
            if self.on_morphisms[e.identity(x)] != c.identity(self.on_objects[x]) {
                return Err(Error::NotAFunctor(format!(
                    "identity of {} is not preserved",
                    e.object_name(x)
                )));
            }
        }
        for f in e.morphism_ids() {
            for g in e.morphism_ids() {
                if let Some(fg) = e.comp(f, g) {
                    if c.comp(self.on_morphisms[f], self.on_morphisms[g])
                        != Some(self.on_morphisms[fg])
                    {
                        return Err(Error::NotAFunctor(format!(
                            "composite of {} and {} is not preserved",
                            e.morphism_name(f),
                            e.morphism_name(g)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn total(&self) -> &FiniteCategory {
        &self.total
    }

    pub fn base(&self) -> &FiniteCategory {
        &self.base
    }

    pub fn on_object(&self, x: usize) -> usize {
        self.on_objects[x]
    }

    pub fn on_morphism(&self, m: usize) -> usize {
        self.on_morphisms[m]
    }

    pub fn maps(&self) -> FunctorMaps {
        FunctorMaps {
            on_objects: self
                .total
                .object_ids()
                .map(|x| {
                    (
                        self.total.object_name(x).to_owned(),
                        self.base.object_name(self.on_objects[x]).to_owned(),
                    )
                })
                .collect(),
            on_morphisms: self
                .total
                .morphism_ids()
                .map(|m| {
                    (
                        self.total.morphism_name(m).to_owned(),
                        self.base.morphism_name(self.on_morphisms[m]).to_owned(),
                    )
                })
                .collect(),
        }
    }

    /// For every morphism `φ` of the total category and every factorisation
    /// `F(φ) = ρ∘λ` in the base, counts the factorisations of `φ` lying over
    /// `(λ, ρ)`. The functor is a discrete Conduché fibration when every
    /// count is exactly one.
    pub fn check_conduche(&self) -> ConducheReport {
        let (e, c) = (&self.total, &self.base);
        let mut checked = 0;
        for phi in e.morphism_ids() {
            let mut lifts: HashMap<(usize, usize), usize> = HashMap::new();
            for (l, r) in e.factorizations(phi) {
                *lifts
                    .entry((self.on_morphisms[l], self.on_morphisms[r]))
                    .or_default() += 1;
            }
            for (l, r) in c.factorizations(self.on_morphisms[phi]) {
                checked += 1;
                let count = lifts.get(&(l, r)).copied().unwrap_or(0);
                if count != 1 {
                    return ConducheReport {
                        conduche: false,
                        checked,
                        witness: Some(ConducheWitness {
                            morphism: e.morphism_name(phi).to_owned(),
                            lambda: c.morphism_name(l).to_owned(),
                            rho: c.morphism_name(r).to_owned(),
                            lifts: count,
                        }),
                    };
                }
            }
        }
        ConducheReport {
            conduche: true,
            checked,
            witness: None,
        }
    }

    /// Number of morphisms `α` with target `X` and `F(α) = β`, for every
    /// object `X` of the total category and every `β` with target `F(X)`.
    pub fn row_counts(&self) -> Vec<RowCount> {
        let (e, c) = (&self.total, &self.base);
        let mut out = Vec::new();
        for x in e.object_ids() {
            for beta in c.morphism_ids() {
                if c.dst(beta) != self.on_objects[x] {
                    continue;
                }
                let count = e
                    .morphism_ids()
                    .filter(|&a| e.dst(a) == x && self.on_morphisms[a] == beta)
                    .count();
                out.push(RowCount {
                    object: e.object_name(x).to_owned(),
                    morphism: c.morphism_name(beta).to_owned(),
                    count,
                });
            }
        }
        out
    }

    /// Row-finiteness; always true for finite categories.
    pub fn is_row_finite(&self) -> bool {
        true
    }

    /// Checks that the name bijections `objects` and `morphisms` (from this
    /// functor's total category to `other`'s) form an isomorphism over the
    /// identity of a common base.
    pub fn is_isomorphic_via(
        &self,
        other: &FibrationFunctor,
        objects: &BTreeMap<String, String>,
        morphisms: &BTreeMap<String, String>,
    ) -> bool {
        let (e1, e2) = (&self.total, &other.total);
        if self.base.to_spec() != other.base.to_spec()
            || e1.n_objects() != e2.n_objects()
            || e1.n_morphisms() != e2.n_morphisms()
        {
            return false;
        }
        let Some(om) = e1
            .object_ids()
            .map(|x| {
                objects
                    .get(e1.object_name(x))
                    .and_then(|n| e2.object(n).ok())
            })
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        let Some(mm) = e1
            .morphism_ids()
            .map(|m| {
                morphisms
                    .get(e1.morphism_name(m))
                    .and_then(|n| e2.morphism(n).ok())
            })
            .collect::<Option<Vec<_>>>()
        else {
            return false;
        };
        let distinct = |v: &[usize]| {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len() == v.len()
        };
        if !distinct(&om) || !distinct(&mm) {
            return false;
        }
        let base_name =
            |f: &FibrationFunctor, m: usize| f.base.morphism_name(f.on_morphisms[m]).to_owned();
        e1.object_ids().all(|x| {
            self.base.object_name(self.on_objects[x])
                == other.base.object_name(other.on_objects[om[x]])
                && mm[e1.identity(x)] == e2.identity(om[x])
        }) && e1.morphism_ids().all(|m| {
            om[e1.src(m)] == e2.src(mm[m])
                && om[e1.dst(m)] == e2.dst(mm[m])
                && base_name(self, m) == base_name(other, mm[m])
                && e1
                    .morphism_ids()
                    .all(|g| e1.comp(m, g).map(|fg| mm[fg]) == e2.comp(mm[m], mm[g]))
        })
    }
}

/// A factorisation `F(φ) = ρ∘λ` that does not lift exactly once.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConducheWitness {
    pub morphism: String,
    pub lambda: String,
    pub rho: String,
    pub lifts: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConducheReport {
    pub conduche: bool,
    /// Number of base factorisations examined.
    pub checked: usize,
    pub witness: Option<ConducheWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCount {
    pub object: String,
    pub morphism: String,
    pub count: usize,
}

/// Name of a multi-index of `ℕᵏ`: the generator names repeated according
/// to the index and joined by dots, or `1` for zero.
pub fn nk_word_name<S: AsRef<str>>(generators: &[S], degree: &[usize]) -> String {
    let parts: Vec<&str> = generators
        .iter()
        .zip(degree)
        .flat_map(|(g, &d)| std::iter::repeat_n(g.as_ref(), d))
        .collect();
    if parts.is_empty() {
        "1".to_owned()
    } else {
        parts.join(".")
    }
}

/// All multi-indices of length `k` with total degree at most `max_total`,
/// in lexicographic order of the index vector.
pub fn degrees_up_to(k: usize, max_total: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for d in &out {
            let used: usize = d.iter().sum();
            for i in 0..=(max_total - used) {
                let mut e = d.clone();
                e.push(i);
                next.push(e);
            }
        }
        out = next;
    }
    out
}

/// The monoid `ℕᵏ` truncated to total degree `max_total`, as a one-object
/// truncated category with object `*`.
pub fn nk_truncated<S: AsRef<str>>(generators: &[S], max_total: usize) -> Result<FiniteCategory> {
    let degs = degrees_up_to(generators.len(), max_total);
    let index: HashMap<Vec<usize>, usize> = degs
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, d)| (d, i))
        .collect();
    let zero = index[&vec![0; generators.len()]];
    FiniteCategory::build(
        vec!["*".to_owned()],
        degs.iter()
            .map(|d| (nk_word_name(generators, d), 0, 0))
            .collect(),
        vec![zero],
        true,
        |f, g| {
            let sum: Vec<usize> = degs[f].iter().zip(&degs[g]).map(|(a, b)| a + b).collect();
            index.get(&sum).copied()
        },
    )
}

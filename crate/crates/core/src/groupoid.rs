//! Finite groupoids, validated from explicit tables.
//!
//! Arrows compose right to left: `comp(g, h) = g·h` is defined exactly when
//! `src(g) = dst(h)`, and then `src(g·h) = src(h)`, `dst(g·h) = dst(g)`.
//! Object and arrow ids are strings kept in lexicographic order, so the dense
//! indices [`ObjectId`] and [`ArrowId`] follow that order too.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Axiom, Error, Result};

/// Index of an object in its groupoid (position in the sorted object list).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub usize);

/// Index of an arrow in its groupoid (position in the sorted arrow list).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub usize);

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "o{}", self.0)
    }
}

impl fmt::Display for ArrowId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// One arrow declaration in a [`GroupoidSpec`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowSpec {
    pub id: String,
    pub src: String,
    pub dst: String,
}

/// Raw, unvalidated groupoid tables as they appear in groupoid files.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupoidSpec {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowSpec>,
    pub unit: BTreeMap<String, String>,
    pub inv: BTreeMap<String, String>,
    /// `[g, h, g·h]` for every composable pair and nothing else.
    pub comp: Vec<[String; 3]>,
}

/// A validated finite groupoid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupoidSpec", into = "GroupoidSpec")]
pub struct FiniteGroupoid {
    objects: Vec<String>,
    arrows: Vec<String>,
    src: Vec<ObjectId>,
    dst: Vec<ObjectId>,
    unit: Vec<ArrowId>,
    inv: Vec<ArrowId>,
    comp: Vec<Option<ArrowId>>,
    by_src: Vec<Vec<ArrowId>>,
    by_dst: Vec<Vec<ArrowId>>,
    object_index: HashMap<String, ObjectId>,
    arrow_index: HashMap<String, ArrowId>,
}

impl TryFrom<GroupoidSpec> for FiniteGroupoid {
    type Error = Error;
    fn try_from(spec: GroupoidSpec) -> Result<Self> {
        validate_groupoid(&spec)
    }
}

impl From<FiniteGroupoid> for GroupoidSpec {
    fn from(g: FiniteGroupoid) -> Self {
        g.to_spec()
    }
}

fn index_names(names: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(names.len());
    for (i, n) in names.iter().enumerate() {
        if index.insert(n.clone(), i).is_some() {
            return Err(Error::axiom(
                Axiom::Table,
                [format!("duplicate {what} {n}")],
            ));
        }
    }
    Ok(index)
}

/// Checks a raw groupoid description and returns the validated groupoid.
///
/// Checks run in a fixed order (table shape, unit laws, inverses, endpoints
/// of composites, associativity) and the first failure is reported together
/// with the tuple of arrows that exhibits it.
pub fn validate_groupoid(spec: &GroupoidSpec) -> Result<FiniteGroupoid> {
    let mut objects = spec.objects.clone();
    objects.sort();
    let obj_ix = index_names(&objects, "object")?;

    let mut arrow_specs: Vec<&ArrowSpec> = spec.arrows.iter().collect();
    arrow_specs.sort_by(|a, b| a.id.cmp(&b.id));
    let arrows: Vec<String> = arrow_specs.iter().map(|a| a.id.clone()).collect();
    let arr_ix = index_names(&arrows, "arrow")?;

    let lookup_obj = |name: &str| {
        obj_ix
            .get(name)
            .map(|&i| ObjectId(i))
            .ok_or_else(|| Error::axiom(Axiom::Table, [format!("unknown object {name}")]))
    };
    let lookup_arr = |name: &str| {
        arr_ix
            .get(name)
            .map(|&i| ArrowId(i))
            .ok_or_else(|| Error::axiom(Axiom::Table, [format!("unknown arrow {name}")]))
    };

    let mut src = Vec::with_capacity(arrows.len());
    let mut dst = Vec::with_capacity(arrows.len());
    for a in &arrow_specs {
        src.push(lookup_obj(&a.src)?);
        dst.push(lookup_obj(&a.dst)?);
    }

    let mut unit = Vec::with_capacity(objects.len());
    for o in &objects {
        let u = spec
            .unit
            .get(o)
            .ok_or_else(|| Error::axiom(Axiom::Table, [format!("missing unit for {o}")]))?;
        unit.push(lookup_arr(u)?);
    }
    if let Some(k) = spec.unit.keys().find(|k| !obj_ix.contains_key(*k)) {
        return Err(Error::axiom(Axiom::Table, [format!("unknown object {k}")]));
    }

    let mut inv = Vec::with_capacity(arrows.len());
    for a in &arrows {
        let i = spec
            .inv
            .get(a)
            .ok_or_else(|| Error::axiom(Axiom::Table, [format!("missing inverse for {a}")]))?;
        inv.push(lookup_arr(i)?);
    }
    if let Some(k) = spec.inv.keys().find(|k| !arr_ix.contains_key(*k)) {
        return Err(Error::axiom(Axiom::Table, [format!("unknown arrow {k}")]));
    }

    let n = arrows.len();
    let mut comp = vec![None; n * n];
    for [g, h, gh] in &spec.comp {
        let (gi, hi, ghi) = (lookup_arr(g)?, lookup_arr(h)?, lookup_arr(gh)?);
        if src[gi.0] != dst[hi.0] {
            return Err(Error::axiom(Axiom::Table, [g.clone(), h.clone()]));
        }
        let slot = &mut comp[gi.0 * n + hi.0];
        if slot.is_some() {
            return Err(Error::axiom(Axiom::Table, [g.clone(), h.clone()]));
        }
        *slot = Some(ghi);
    }
    for g in 0..n {
        for h in 0..n {
            if src[g] == dst[h] && comp[g * n + h].is_none() {
                return Err(Error::axiom(
                    Axiom::Table,
                    [arrows[g].clone(), arrows[h].clone()],
                ));
            }
        }
    }

    let grp = FiniteGroupoid::assemble(objects, arrows, src, dst, unit, inv, comp);
    grp.check_laws()?;
    Ok(grp)
}

impl FiniteGroupoid {
    fn assemble(
        objects: Vec<String>,
        arrows: Vec<String>,
        src: Vec<ObjectId>,
        dst: Vec<ObjectId>,
        unit: Vec<ArrowId>,
        inv: Vec<ArrowId>,
        comp: Vec<Option<ArrowId>>,
    ) -> Self {
        let mut by_src = vec![Vec::new(); objects.len()];
        let mut by_dst = vec![Vec::new(); objects.len()];
        for g in 0..arrows.len() {
            by_src[src[g].0].push(ArrowId(g));
            by_dst[dst[g].0].push(ArrowId(g));
        }
        let object_index = objects
            .iter()
            .enumerate()
            .map(|(i, o)| (o.clone(), ObjectId(i)))
            .collect();
        let arrow_index = arrows
            .iter()
            .enumerate()
            .map(|(i, a)| (a.clone(), ArrowId(i)))
            .collect();
        FiniteGroupoid {
            objects,
            arrows,
            src,
            dst,
            unit,
            inv,
            comp,
            by_src,
            by_dst,
            object_index,
            arrow_index,
        }
    }

    /// Builds a groupoid from unsorted names and a composition function on
    /// the given (unsorted) arrow positions, then checks all laws.
    pub(crate) fn build(
        objects: Vec<String>,
        arrows: Vec<(String, usize, usize)>,
        unit: Vec<usize>,
        inv: Vec<usize>,
        comp: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let mut obj_order: Vec<usize> = (0..objects.len()).collect();
        obj_order.sort_by(|&a, &b| objects[a].cmp(&objects[b]));
        let mut obj_new = vec![0; objects.len()];
        for (new, &old) in obj_order.iter().enumerate() {
            obj_new[old] = new;
        }
        let mut arr_order: Vec<usize> = (0..arrows.len()).collect();
        arr_order.sort_by(|&a, &b| arrows[a].0.cmp(&arrows[b].0));
        let mut arr_new = vec![0; arrows.len()];
        for (new, &old) in arr_order.iter().enumerate() {
            arr_new[old] = new;
        }

        let sorted_objects: Vec<String> = obj_order.iter().map(|&i| objects[i].clone()).collect();
        let sorted_arrows: Vec<String> = arr_order.iter().map(|&i| arrows[i].0.clone()).collect();
        index_names(&sorted_objects, "object")?;
        index_names(&sorted_arrows, "arrow")?;

        let src = arr_order
            .iter()
            .map(|&i| ObjectId(obj_new[arrows[i].1]))
            .collect::<Vec<_>>();
        let dst = arr_order
            .iter()
            .map(|&i| ObjectId(obj_new[arrows[i].2]))
            .collect::<Vec<_>>();
        let unit = obj_order
            .iter()
            .map(|&i| ArrowId(arr_new[unit[i]]))
            .collect();
        let inv_sorted = arr_order
            .iter()
            .map(|&i| ArrowId(arr_new[inv[i]]))
            .collect();

        let n = arrows.len();
        let mut table = vec![None; n * n];
        for (g_old, &g_new) in arr_new.iter().enumerate() {
            for (h_old, &h_new) in arr_new.iter().enumerate() {
                if src[g_new] == dst[h_new] {
                    table[g_new * n + h_new] = Some(ArrowId(arr_new[comp(g_old, h_old)]));
                }
            }
        }
        let grp = FiniteGroupoid::assemble(
            sorted_objects,
            sorted_arrows,
            src,
            dst,
            unit,
            inv_sorted,
            table,
        );
        grp.check_laws()?;
        Ok(grp)
    }

    /// Exhaustively re-checks units, inverses, endpoints and associativity.
    pub fn check_laws(&self) -> Result<()> {
        let name = |g: ArrowId| self.arrows[g.0].clone();
        for (x, &u) in self.unit.iter().enumerate() {
            if self.src[u.0] != ObjectId(x) || self.dst[u.0] != ObjectId(x) {
                return Err(Error::axiom(
                    Axiom::UnitLaw,
                    [self.objects[x].clone(), name(u)],
                ));
            }
        }
        for g in self.arrow_ids() {
            let ul = self.unit(self.dst(g));
            if self.comp(ul, g) != Some(g) {
                return Err(Error::axiom(Axiom::UnitLaw, [name(ul), name(g)]));
            }
            let ur = self.unit(self.src(g));
            if self.comp(g, ur) != Some(g) {
                return Err(Error::axiom(Axiom::UnitLaw, [name(g), name(ur)]));
            }
        }
        for g in self.arrow_ids() {
            let i = self.inv(g);
            if self.src(i) != self.dst(g) || self.dst(i) != self.src(g) {
                return Err(Error::axiom(Axiom::Inverse, [name(g), name(i)]));
            }
            if self.comp(g, i) != Some(self.unit(self.dst(g))) {
                return Err(Error::axiom(Axiom::UnitLaw, [name(g), name(i)]));
            }
            if self.comp(i, g) != Some(self.unit(self.src(g))) {
                return Err(Error::axiom(Axiom::UnitLaw, [name(i), name(g)]));
            }
        }
        for g in self.arrow_ids() {
            for &h in self.arrows_to(self.src(g)) {
                let gh = self.comp(g, h).expect("composable pair has an entry");
                if self.src(gh) != self.src(h) || self.dst(gh) != self.dst(g) {
                    return Err(Error::axiom(Axiom::Endpoints, [name(g), name(h)]));
                }
            }
        }
        for f in self.arrow_ids() {
            for &g in self.arrows_to(self.src(f)) {
                let fg = self.mul(f, g);
                for &h in self.arrows_to(self.src(g)) {
                    if self.mul(fg, h) != self.mul(f, self.mul(g, h)) {
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

    pub fn to_spec(&self) -> GroupoidSpec {
        let mut comp = Vec::new();
        for g in self.arrow_ids() {
            for &h in self.arrows_to(self.src(g)) {
                comp.push([
                    self.arrow_name(g).to_owned(),
                    self.arrow_name(h).to_owned(),
                    self.arrow_name(self.mul(g, h)).to_owned(),
                ]);
            }
        }
        GroupoidSpec {
            objects: self.objects.clone(),
            arrows: self
                .arrow_ids()
                .map(|g| ArrowSpec {
                    id: self.arrow_name(g).to_owned(),
                    src: self.object_name(self.src(g)).to_owned(),
                    dst: self.object_name(self.dst(g)).to_owned(),
                })
                .collect(),
            unit: self
                .object_ids()
                .map(|x| {
                    (
                        self.object_name(x).to_owned(),
                        self.arrow_name(self.unit(x)).to_owned(),
                    )
                })
                .collect(),
            inv: self
                .arrow_ids()
                .map(|g| {
                    (
                        self.arrow_name(g).to_owned(),
                        self.arrow_name(self.inv(g)).to_owned(),
                    )
                })
                .collect(),
            comp,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrows.len()
    }

    pub fn object_ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        (0..self.objects.len()).map(ObjectId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow_names(&self) -> &[String] {
        &self.arrows
    }

    pub fn object_name(&self, x: ObjectId) -> &str {
        &self.objects[x.0]
    }

    pub fn arrow_name(&self, g: ArrowId) -> &str {
        &self.arrows[g.0]
    }

    pub fn object_id(&self, name: &str) -> Option<ObjectId> {
        self.object_index.get(name).copied()
    }

    pub fn arrow_id(&self, name: &str) -> Option<ArrowId> {
        self.arrow_index.get(name).copied()
    }

    /// Like [`arrow_id`](Self::arrow_id) but with an [`Error::UnknownId`].
    pub fn arrow(&self, name: &str) -> Result<ArrowId> {
        self.arrow_id(name)
            .ok_or_else(|| Error::UnknownId(name.to_owned()))
    }

    pub fn object(&self, name: &str) -> Result<ObjectId> {
        self.object_id(name)
            .ok_or_else(|| Error::UnknownId(name.to_owned()))
    }

    pub fn src(&self, g: ArrowId) -> ObjectId {
        self.src[g.0]
    }

    pub fn dst(&self, g: ArrowId) -> ObjectId {
        self.dst[g.0]
    }

    pub fn unit(&self, x: ObjectId) -> ArrowId {
        self.unit[x.0]
    }

    pub fn inv(&self, g: ArrowId) -> ArrowId {
        self.inv[g.0]
    }

    pub fn is_unit(&self, g: ArrowId) -> bool {
        self.unit[self.src[g.0].0] == g
    }

    /// `g·h`, or `None` when `src(g) != dst(h)`.
    pub fn comp(&self, g: ArrowId, h: ArrowId) -> Option<ArrowId> {
        self.comp[g.0 * self.arrows.len() + h.0]
    }

    /// `g·h` for a pair known to be composable.
    ///
    /// # Panics
    /// If `src(g) != dst(h)`.
    pub fn mul(&self, g: ArrowId, h: ArrowId) -> ArrowId {
        self.comp(g, h).unwrap_or_else(|| {
            panic!(
                "arrows {} and {} are not composable",
                self.arrow_name(g),
                self.arrow_name(h)
            )
        })
    }

    /// Arrows with source `x`, the set `s⁻¹(x)`.
    pub fn arrows_from(&self, x: ObjectId) -> &[ArrowId] {
        &self.by_src[x.0]
    }

    /// Arrows with range `x`, the set `r⁻¹(x)`.
    pub fn arrows_to(&self, x: ObjectId) -> &[ArrowId] {
        &self.by_dst[x.0]
    }

    /// True if every arrow is a unit.
    pub fn is_space(&self) -> bool {
        self.arrows.len() == self.objects.len()
    }

    /// Renames objects and arrows. Both maps must be injective on the names
    /// they touch; names absent from a map are kept.
    pub fn relabel(
        &self,
        objects: impl Fn(&str) -> String,
        arrows: impl Fn(&str) -> String,
    ) -> Result<Self> {
        FiniteGroupoid::build(
            self.objects.iter().map(|o| objects(o)).collect(),
            self.arrow_ids()
                .map(|g| (arrows(self.arrow_name(g)), self.src(g).0, self.dst(g).0))
                .collect(),
            self.unit.iter().map(|u| u.0).collect(),
            self.inv.iter().map(|i| i.0).collect(),
            |g, h| self.mul(ArrowId(g), ArrowId(h)).0,
        )
    }
}

/// A finite group given by its full multiplication table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupTable {
    pub elements: Vec<String>,
    /// `mul[i][j]` is the product `elements[i]·elements[j]`.
    pub mul: Vec<Vec<String>>,
}

/// Name of the single object of a group viewed as a groupoid.
pub const GROUP_OBJECT: &str = "*";

/// Views a group as a groupoid with the single object `*`.
pub fn group_as_groupoid(table: &GroupTable) -> Result<FiniteGroupoid> {
    let n = table.elements.len();
    let ix = index_names(&table.elements, "element")?;
    if n == 0 {
        return Err(Error::axiom(Axiom::UnitLaw, Vec::<String>::new()));
    }
    if table.mul.len() != n || table.mul.iter().any(|row| row.len() != n) {
        return Err(Error::axiom(
            Axiom::Table,
            ["multiplication table is not square"],
        ));
    }
    let mut m = vec![0usize; n * n];
    for i in 0..n {
        for j in 0..n {
            let p = &table.mul[i][j];
            m[i * n + j] = *ix
                .get(p)
                .ok_or_else(|| Error::axiom(Axiom::Table, [format!("unknown element {p}")]))?;
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| m[e * n + x] == x && m[x * n + e] == x))
        .ok_or_else(|| Error::axiom(Axiom::UnitLaw, Vec::<String>::new()))?;
    let mut inv = vec![0; n];
    for x in 0..n {
        inv[x] = (0..n)
            .find(|&y| m[x * n + y] == e && m[y * n + x] == e)
            .ok_or_else(|| Error::axiom(Axiom::Inverse, [table.elements[x].clone()]))?;
    }
    FiniteGroupoid::build(
        vec![GROUP_OBJECT.to_owned()],
        table.elements.iter().map(|g| (g.clone(), 0, 0)).collect(),
        vec![e],
        inv,
        |g, h| m[g * n + h],
    )
}

/// The cyclic group of order `n` with elements `e, a, a2, …, a{n-1}`.
pub fn cyclic_group_table(n: usize) -> GroupTable {
    assert!(n > 0, "cyclic group of order 0");
    let name = |k: usize| match k {
        0 => "e".to_owned(),
        1 => "a".to_owned(),
        k => format!("a{k}"),
    };
    GroupTable {
        elements: (0..n).map(name).collect(),
        mul: (0..n)
            .map(|i| (0..n).map(|j| name((i + j) % n)).collect())
            .collect(),
    }
}

pub fn cyclic_group(n: usize) -> FiniteGroupoid {
    group_as_groupoid(&cyclic_group_table(n)).expect("cyclic group table is a group")
}

/// Name of the unit arrow at `x` in [`space_as_groupoid`].
pub fn space_unit_name(x: &str) -> String {
    format!("1_{x}")
}

/// A set viewed as a groupoid with only identity arrows `1_x`.
pub fn space_as_groupoid<S: AsRef<str>>(points: &[S]) -> Result<FiniteGroupoid> {
    discrete_groupoid(
        points
            .iter()
            .map(|p| (p.as_ref().to_owned(), space_unit_name(p.as_ref()))),
    )
}

/// A set viewed as a groupoid with only identity arrows, with explicit names
/// for the unit arrows.
pub fn discrete_groupoid(
    points: impl IntoIterator<Item = (String, String)>,
) -> Result<FiniteGroupoid> {
    let (objects, units): (Vec<String>, Vec<String>) = points.into_iter().unzip();
    let n = objects.len();
    FiniteGroupoid::build(
        objects,
        units
            .into_iter()
            .enumerate()
            .map(|(i, u)| (u, i, i))
            .collect(),
        (0..n).collect(),
        (0..n).collect(),
        |g, _| g,
    )
}

/// The pair groupoid on `points`: one arrow `(i,j)` from `j` to `i` for
/// every ordered pair.
pub fn pair_groupoid<S: AsRef<str>>(points: &[S]) -> Result<FiniteGroupoid> {
    let n = points.len();
    let names: Vec<&str> = points.iter().map(|p| p.as_ref()).collect();
    let mut arrows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            arrows.push((format!("({},{})", names[i], names[j]), j, i));
        }
    }
    FiniteGroupoid::build(
        names.iter().map(|s| (*s).to_owned()).collect(),
        arrows,
        (0..n).map(|i| i * n + i).collect(),
        (0..n * n).map(|a| (a % n) * n + a / n).collect(),
        |g, h| (g / n) * n + h % n,
    )
}

/// A left action of a one-object groupoid (a group) on a finite set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupAction {
    points: Vec<String>,
    /// `table[g * points.len() + p]` is the index of `g·p`.
    table: Vec<usize>,
}

impl GroupAction {
    /// Validates `act` as a left action: `e·p = p` and `(g₁g₂)·p = g₁·(g₂·p)`.
    pub fn new(
        group: &FiniteGroupoid,
        points: Vec<String>,
        act: impl Fn(ArrowId, usize) -> usize,
    ) -> Result<Self> {
        if group.n_objects() != 1 {
            return Err(Error::InvalidInput(
                "acting groupoid must have exactly one object".into(),
            ));
        }
        let np = points.len();
        let mut table = vec![0; group.n_arrows() * np];
        for g in group.arrow_ids() {
            for p in 0..np {
                let q = act(g, p);
                if q >= np {
                    return Err(Error::NotAnAction {
                        witness: vec![group.arrow_name(g).to_owned(), points[p].clone()],
                    });
                }
                table[g.0 * np + p] = q;
            }
        }
        let action = GroupAction { points, table };
        let e = group.unit(ObjectId(0));
        for p in 0..np {
            if action.act(e, p) != p {
                return Err(Error::NotAnAction {
                    witness: vec![group.arrow_name(e).to_owned(), action.points[p].clone()],
                });
            }
        }
        for g1 in group.arrow_ids() {
            for g2 in group.arrow_ids() {
                let g12 = group.mul(g1, g2);
                for p in 0..np {
                    if action.act(g12, p) != action.act(g1, action.act(g2, p)) {
                        return Err(Error::NotAnAction {
                            witness: vec![
                                group.arrow_name(g1).to_owned(),
                                group.arrow_name(g2).to_owned(),
                                action.points[p].clone(),
                            ],
                        });
                    }
                }
            }
        }
        Ok(action)
    }

    /// Builds an action from `(element, point) → point` names.
    pub fn from_names(
        group: &FiniteGroupoid,
        points: Vec<String>,
        map: &BTreeMap<(String, String), String>,
    ) -> Result<Self> {
        let pix: HashMap<&str, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.as_str(), i))
            .collect();
        for ((g, p), q) in map {
            group.arrow(g)?;
            for n in [p, q] {
                if !pix.contains_key(n.as_str()) {
                    return Err(Error::UnknownId(n.clone()));
                }
            }
        }
        let lookup = |g: ArrowId, p: usize| -> usize {
            map.get(&(group.arrow_name(g).to_owned(), points[p].clone()))
                .map(|q| pix[q.as_str()])
                .unwrap_or(usize::MAX)
        };
        let pts = points.clone();
        GroupAction::new(group, pts, lookup)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    /// Index of `g·p`.
    pub fn act(&self, g: ArrowId, p: usize) -> usize {
        self.table[g.0 * self.points.len() + p]
    }
}

/// The transformation groupoid `Γ⋉V`: objects `V`, arrows `(g,v)` from `v`
/// to `g·v`, with `(g, h·v)·(h, v) = (gh, v)`.
pub fn transformation_groupoid(
    group: &FiniteGroupoid,
    action: &GroupAction,
) -> Result<FiniteGroupoid> {
    let np = action.points.len();
    let ng = group.n_arrows();
    let e = group.unit(ObjectId(0));
    let mut arrows = Vec::with_capacity(ng * np);
    for g in group.arrow_ids() {
        for v in 0..np {
            arrows.push((
                format!("({},{})", group.arrow_name(g), action.points[v]),
                v,
                action.act(g, v),
            ));
        }
    }
    FiniteGroupoid::build(
        action.points.clone(),
        arrows,
        (0..np).map(|v| e.0 * np + v).collect(),
        (0..ng * np)
            .map(|a| {
                let (g, v) = (ArrowId(a / np), a % np);
                group.inv(g).0 * np + action.act(g, v)
            })
            .collect(),
        |a, b| {
            let (g, h, v) = (ArrowId(a / np), ArrowId(b / np), b % np);
            group.mul(g, h).0 * np + v
        },
    )
}

/// Product groupoid with objects `(x,y)` and arrows `(g,h)`.
pub fn product(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<FiniteGroupoid> {
    let (na, nb) = (a.n_arrows(), b.n_arrows());
    let (oa, ob) = (a.n_objects(), b.n_objects());
    let mut objects = Vec::with_capacity(oa * ob);
    for x in a.object_ids() {
        for y in b.object_ids() {
            objects.push(format!("({},{})", a.object_name(x), b.object_name(y)));
        }
    }
    let mut arrows = Vec::with_capacity(na * nb);
    for g in a.arrow_ids() {
        for h in b.arrow_ids() {
            arrows.push((
                format!("({},{})", a.arrow_name(g), b.arrow_name(h)),
                a.src(g).0 * ob + b.src(h).0,
                a.dst(g).0 * ob + b.dst(h).0,
            ));
        }
    }
    let split = |i: usize| (ArrowId(i / nb), ArrowId(i % nb));
    FiniteGroupoid::build(
        objects,
        arrows,
        (0..oa * ob)
            .map(|i| a.unit(ObjectId(i / ob)).0 * nb + b.unit(ObjectId(i % ob)).0)
            .collect(),
        (0..na * nb)
            .map(|i| {
                let (g, h) = split(i);
                a.inv(g).0 * nb + b.inv(h).0
            })
            .collect(),
        |i, j| {
            let ((g1, h1), (g2, h2)) = (split(i), split(j));
            a.mul(g1, g2).0 * nb + b.mul(h1, h2).0
        },
    )
}

/// Disjoint union. Object and arrow names must not clash.
pub fn disjoint_union(a: &FiniteGroupoid, b: &FiniteGroupoid) -> Result<FiniteGroupoid> {
    for o in b.object_names() {
        if a.object_id(o).is_some() {
            return Err(Error::InvalidInput(format!(
                "object name {o} occurs in both groupoids"
            )));
        }
    }
    for g in b.arrow_names() {
        if a.arrow_id(g).is_some() {
            return Err(Error::InvalidInput(format!(
                "arrow name {g} occurs in both groupoids"
            )));
        }
    }
    let (na, oa) = (a.n_arrows(), a.n_objects());
    let objects = a
        .object_names()
        .iter()
        .chain(b.object_names())
        .cloned()
        .collect();
    let arrows = a
        .arrow_ids()
        .map(|g| (a.arrow_name(g).to_owned(), a.src(g).0, a.dst(g).0))
        .chain(
            b.arrow_ids()
                .map(|g| (b.arrow_name(g).to_owned(), oa + b.src(g).0, oa + b.dst(g).0)),
        )
        .collect();
    let unit = a
        .object_ids()
        .map(|x| a.unit(x).0)
        .chain(b.object_ids().map(|x| na + b.unit(x).0))
        .collect();
    let inv = a
        .arrow_ids()
        .map(|g| a.inv(g).0)
        .chain(b.arrow_ids().map(|g| na + b.inv(g).0))
        .collect();
    FiniteGroupoid::build(objects, arrows, unit, inv, |g, h| {
        if g < na {
            a.mul(ArrowId(g), ArrowId(h)).0
        } else {
            na + b.mul(ArrowId(g - na), ArrowId(h - na)).0
        }
    })
}

/// A set of arrows of a groupoid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupoidSubset {
    members: BTreeSet<ArrowId>,
}

impl GroupoidSubset {
    pub fn new(members: impl IntoIterator<Item = ArrowId>) -> Self {
        GroupoidSubset {
            members: members.into_iter().collect(),
        }
    }

    pub fn from_names<S: AsRef<str>>(g: &FiniteGroupoid, names: &[S]) -> Result<Self> {
        names
            .iter()
            .map(|n| g.arrow(n.as_ref()))
            .collect::<Result<BTreeSet<_>>>()
            .map(|members| GroupoidSubset { members })
    }

    /// All unit arrows, the unit slice.
    pub fn units(g: &FiniteGroupoid) -> Self {
        GroupoidSubset::new(g.object_ids().map(|x| g.unit(x)))
    }

    pub fn members(&self) -> &BTreeSet<ArrowId> {
        &self.members
    }

    pub fn contains(&self, a: ArrowId) -> bool {
        self.members.contains(&a)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `V·W = { v·w : v ∈ V, w ∈ W, src(v) = dst(w) }`.
    pub fn product(&self, g: &FiniteGroupoid, other: &GroupoidSubset) -> GroupoidSubset {
        let mut out = BTreeSet::new();
        for &v in &self.members {
            for &w in &other.members {
                if let Some(vw) = g.comp(v, w) {
                    out.insert(vw);
                }
            }
        }
        GroupoidSubset { members: out }
    }

    /// `V* = { v⁻¹ : v ∈ V }`.
    pub fn star(&self, g: &FiniteGroupoid) -> GroupoidSubset {
        GroupoidSubset::new(self.members.iter().map(|&v| g.inv(v)))
    }
}

/// True when source and range are both injective on `v`.
pub fn is_slice(g: &FiniteGroupoid, v: &GroupoidSubset) -> bool {
    let mut srcs = BTreeSet::new();
    let mut dsts = BTreeSet::new();
    v.members
        .iter()
        .all(|&a| srcs.insert(g.src(a)) && dsts.insert(g.dst(a)))
}

//! Groupoid correspondences on finite carriers.
//!
//! A correspondence `X: H ← G` is a finite set with a left `H`-action along
//! the anchor `r: X → H⁰` and a free right `G`-action along `s: X → G⁰`, the
//! two actions commuting. The right action being free, two points in one
//! orbit differ by a unique arrow, the bracket `⟨x₁|x₂⟩`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Axiom, Error, Result};
use crate::groupoid::{transformation_groupoid, ArrowId, FiniteGroupoid, GroupAction, ObjectId};

/// Index of a carrier point (position in the sorted carrier).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

pub(crate) fn same_groupoid(a: &Arc<FiniteGroupoid>, b: &Arc<FiniteGroupoid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// A validated correspondence `left ← right`.
#[derive(Clone, Debug)]
pub struct Correspondence {
    left: Arc<FiniteGroupoid>,
    right: Arc<FiniteGroupoid>,
    points: Vec<String>,
    point_index: HashMap<String, PointId>,
    r: Vec<ObjectId>,
    s: Vec<ObjectId>,
    lact: Vec<Option<PointId>>,
    ract: Vec<Option<PointId>>,
}

impl PartialEq for Correspondence {
    fn eq(&self, other: &Self) -> bool {
        same_groupoid(&self.left, &other.left)
            && same_groupoid(&self.right, &other.right)
            && self.points == other.points
            && self.r == other.r
            && self.s == other.s
            && self.lact == other.lact
            && self.ract == other.ract
    }
}

impl Eq for Correspondence {}

/// Unsorted, unvalidated correspondence tables indexed by positions in
/// `points`. `lact[h * n + x]` and `ract[x * m + g]` hold positions too.
pub(crate) struct RawCorrespondence {
    pub left: Arc<FiniteGroupoid>,
    pub right: Arc<FiniteGroupoid>,
    pub points: Vec<String>,
    pub r: Vec<ObjectId>,
    pub s: Vec<ObjectId>,
    pub lact: Vec<Option<usize>>,
    pub ract: Vec<Option<usize>>,
}

impl RawCorrespondence {
    /// Builds the tables from action functions; entries are only requested
    /// on composable pairs.
    pub fn from_fns(
        left: Arc<FiniteGroupoid>,
        right: Arc<FiniteGroupoid>,
        points: Vec<String>,
        r: Vec<ObjectId>,
        s: Vec<ObjectId>,
        lact: impl Fn(ArrowId, usize) -> usize,
        ract: impl Fn(usize, ArrowId) -> usize,
    ) -> Self {
        let n = points.len();
        let m = right.n_arrows();
        let mut l = vec![None; left.n_arrows() * n];
        for h in left.arrow_ids() {
            for x in 0..n {
                if left.src(h) == r[x] {
                    l[h.0 * n + x] = Some(lact(h, x));
                }
            }
        }
        let mut rt = vec![None; n * m];
        for x in 0..n {
            for g in right.arrow_ids() {
                if s[x] == right.dst(g) {
                    rt[x * m + g.0] = Some(ract(x, g));
                }
            }
        }
        RawCorrespondence {
            left,
            right,
            points,
            r,
            s,
            lact: l,
            ract: rt,
        }
    }

    pub fn finish(self) -> Result<Correspondence> {
        let n = self.points.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.points[a].cmp(&self.points[b]));
        let mut new_ix = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            new_ix[old] = new;
        }
        let points: Vec<String> = order.iter().map(|&i| self.points[i].clone()).collect();
        let mut point_index = HashMap::with_capacity(n);
        for (i, p) in points.iter().enumerate() {
            if point_index.insert(p.clone(), PointId(i)).is_some() {
                return Err(Error::axiom(Axiom::Table, [format!("duplicate point {p}")]));
            }
        }
        let (hl, m) = (self.left.n_arrows(), self.right.n_arrows());
        let remap = |v: Option<usize>| -> Result<Option<PointId>> {
            match v {
                None => Ok(None),
                Some(i) if i < n => Ok(Some(PointId(new_ix[i]))),
                Some(_) => Err(Error::axiom(Axiom::Table, ["action result out of range"])),
            }
        };
        let mut lact = vec![None; hl * n];
        for h in 0..hl {
            for (old, &new) in new_ix.iter().enumerate() {
                lact[h * n + new] = remap(self.lact[h * n + old])?;
            }
        }
        let mut ract = vec![None; n * m];
        for (old, &new) in new_ix.iter().enumerate() {
            for g in 0..m {
                ract[new * m + g] = remap(self.ract[old * m + g])?;
            }
        }
        let corr = Correspondence {
            r: order.iter().map(|&i| self.r[i]).collect(),
            s: order.iter().map(|&i| self.s[i]).collect(),
            left: self.left,
            right: self.right,
            points,
            point_index,
            lact,
            ract,
        };
        corr.check_laws()?;
        Ok(corr)
    }
}

/// Correspondence tables as they appear in files, with the groupoids
/// already resolved.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceTables {
    pub carrier: Vec<String>,
    pub r: BTreeMap<String, String>,
    pub s: BTreeMap<String, String>,
    /// `[h, x, h·x]`.
    pub lact: Vec<[String; 3]>,
    /// `[g, x, x·g]`.
    pub ract: Vec<[String; 3]>,
}

/// Validates a correspondence given by name tables.
pub fn validate_correspondence(
    left: Arc<FiniteGroupoid>,
    right: Arc<FiniteGroupoid>,
    tables: &CorrespondenceTables,
) -> Result<Correspondence> {
    let n = tables.carrier.len();
    let pix: HashMap<&str, usize> = tables
        .carrier
        .iter()
        .enumerate()
        .map(|(i, p)| (p.as_str(), i))
        .collect();
    if pix.len() != n {
        return Err(Error::axiom(Axiom::Table, ["duplicate carrier point"]));
    }
    let table_err = |what: String| Error::axiom(Axiom::Table, [what]);
    let point = |p: &str| {
        pix.get(p)
            .copied()
            .ok_or_else(|| table_err(format!("unknown point {p}")))
    };
    let anchor = |map: &BTreeMap<String, String>,
                  grp: &FiniteGroupoid,
                  which: &str|
     -> Result<Vec<ObjectId>> {
        if let Some(k) = map.keys().find(|k| !pix.contains_key(k.as_str())) {
            return Err(table_err(format!("unknown point {k}")));
        }
        tables
            .carrier
            .iter()
            .map(|p| {
                let o = map
                    .get(p)
                    .ok_or_else(|| table_err(format!("missing {which}({p})")))?;
                grp.object_id(o)
                    .ok_or_else(|| table_err(format!("unknown object {o}")))
            })
            .collect()
    };
    let r = anchor(&tables.r, &left, "r")?;
    let s = anchor(&tables.s, &right, "s")?;

    let (hl, m) = (left.n_arrows(), right.n_arrows());
    let mut lact = vec![None; hl * n];
    for [h, x, y] in &tables.lact {
        let h = left
            .arrow_id(h)
            .ok_or_else(|| table_err(format!("unknown arrow {h}")))?;
        let (xi, yi) = (point(x)?, point(y)?);
        if left.src(h) != r[xi] {
            return Err(Error::axiom(
                Axiom::Table,
                [left.arrow_name(h).to_owned(), x.clone()],
            ));
        }
        let slot = &mut lact[h.0 * n + xi];
        if slot.is_some() {
            return Err(Error::axiom(
                Axiom::Table,
                [left.arrow_name(h).to_owned(), x.clone()],
            ));
        }
        *slot = Some(yi);
    }
    let mut ract = vec![None; n * m];
    for [g, x, y] in &tables.ract {
        let g = right
            .arrow_id(g)
            .ok_or_else(|| table_err(format!("unknown arrow {g}")))?;
        let (xi, yi) = (point(x)?, point(y)?);
        if right.dst(g) != s[xi] {
            return Err(Error::axiom(
                Axiom::Table,
                [x.clone(), right.arrow_name(g).to_owned()],
            ));
        }
        let slot = &mut ract[xi * m + g.0];
        if slot.is_some() {
            return Err(Error::axiom(
                Axiom::Table,
                [x.clone(), right.arrow_name(g).to_owned()],
            ));
        }
        *slot = Some(yi);
    }
    for x in 0..n {
        for &h in left.arrows_from(r[x]) {
            if lact[h.0 * n + x].is_none() {
                return Err(Error::axiom(
                    Axiom::Table,
                    [left.arrow_name(h).to_owned(), tables.carrier[x].clone()],
                ));
            }
        }
        for &g in right.arrows_to(s[x]) {
            if ract[x * m + g.0].is_none() {
                return Err(Error::axiom(
                    Axiom::Table,
                    [tables.carrier[x].clone(), right.arrow_name(g).to_owned()],
                ));
            }
        }
    }
    RawCorrespondence {
        left,
        right,
        points: tables.carrier.clone(),
        r,
        s,
        lact,
        ract,
    }
    .finish()
}

impl Correspondence {
    fn check_laws(&self) -> Result<()> {
        let (left, right) = (&*self.left, &*self.right);
        let n = self.points.len();
        let pn = |x: PointId| self.points[x.0].clone();
        let ln = |h: ArrowId| left.arrow_name(h).to_owned();
        let rn = |g: ArrowId| right.arrow_name(g).to_owned();

        // table domain: entries exactly on composable pairs
        for x in self.point_ids() {
            for h in left.arrow_ids() {
                if self.lact(h, x).is_some() != (left.src(h) == self.r(x)) {
                    return Err(Error::axiom(Axiom::Table, [ln(h), pn(x)]));
                }
            }
            for g in right.arrow_ids() {
                if self.ract(x, g).is_some() != (right.dst(g) == self.s(x)) {
                    return Err(Error::axiom(Axiom::Table, [pn(x), rn(g)]));
                }
            }
        }
        // anchors
        for x in self.point_ids() {
            for &h in left.arrows_from(self.r(x)) {
                if self.r(self.left_mul(h, x)) != left.dst(h) {
                    return Err(Error::axiom(Axiom::Anchor, [ln(h), pn(x)]));
                }
            }
            for &g in right.arrows_to(self.s(x)) {
                if self.s(self.right_mul(x, g)) != right.src(g) {
                    return Err(Error::axiom(Axiom::Anchor, [pn(x), rn(g)]));
                }
            }
        }
        // commuting
        for x in self.point_ids() {
            for &h in left.arrows_from(self.r(x)) {
                let hx = self.left_mul(h, x);
                if self.s(hx) != self.s(x) {
                    return Err(Error::axiom(Axiom::Commuting, [ln(h), pn(x)]));
                }
            }
            for &g in right.arrows_to(self.s(x)) {
                let xg = self.right_mul(x, g);
                if self.r(xg) != self.r(x) {
                    return Err(Error::axiom(Axiom::Commuting, [pn(x), rn(g)]));
                }
            }
            for &h in left.arrows_from(self.r(x)) {
                for &g in right.arrows_to(self.s(x)) {
                    let a = self.right_mul(self.left_mul(h, x), g);
                    let b = self.left_mul(h, self.right_mul(x, g));
                    if a != b {
                        return Err(Error::axiom(Axiom::Commuting, [ln(h), pn(x), rn(g)]));
                    }
                }
            }
        }
        // action laws
        for x in self.point_ids() {
            let u = left.unit(self.r(x));
            if self.left_mul(u, x) != x {
                return Err(Error::axiom(Axiom::ActionLaw, [ln(u), pn(x)]));
            }
            let u = right.unit(self.s(x));
            if self.right_mul(x, u) != x {
                return Err(Error::axiom(Axiom::ActionLaw, [pn(x), rn(u)]));
            }
            for &h2 in left.arrows_from(self.r(x)) {
                for &h1 in left.arrows_from(left.dst(h2)) {
                    if self.left_mul(h1, self.left_mul(h2, x)) != self.left_mul(left.mul(h1, h2), x)
                    {
                        return Err(Error::axiom(Axiom::ActionLaw, [ln(h1), ln(h2), pn(x)]));
                    }
                }
            }
            for &g1 in right.arrows_to(self.s(x)) {
                for &g2 in right.arrows_to(right.src(g1)) {
                    if self.right_mul(self.right_mul(x, g1), g2)
                        != self.right_mul(x, right.mul(g1, g2))
                    {
                        return Err(Error::axiom(Axiom::ActionLaw, [pn(x), rn(g1), rn(g2)]));
                    }
                }
            }
        }
        // freeness
        for x in self.point_ids() {
            for &g in right.arrows_to(self.s(x)) {
                if !right.is_unit(g) && self.right_mul(x, g) == x {
                    return Err(Error::axiom(Axiom::NotFree, [pn(x), rn(g)]));
                }
            }
        }
        debug_assert_eq!(n, self.point_index.len());
        Ok(())
    }

    /// The identity correspondence `G ← G` on the arrow space of `G`.
    pub fn identity(g: Arc<FiniteGroupoid>) -> Correspondence {
        let grp = g.clone();
        RawCorrespondence::from_fns(
            g.clone(),
            g,
            grp.arrow_names().to_vec(),
            grp.arrow_ids().map(|a| grp.dst(a)).collect(),
            grp.arrow_ids().map(|a| grp.src(a)).collect(),
            |h, x| grp.mul(h, ArrowId(x)).0,
            |x, k| grp.mul(ArrowId(x), k).0,
        )
        .finish()
        .expect("identity correspondence is valid")
    }

    pub fn left(&self) -> &Arc<FiniteGroupoid> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FiniteGroupoid> {
        &self.right
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point_ids(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.points.len()).map(PointId)
    }

    pub fn point_names(&self) -> &[String] {
        &self.points
    }

    pub fn point_name(&self, x: PointId) -> &str {
        &self.points[x.0]
    }

    pub fn point_id(&self, name: &str) -> Option<PointId> {
        self.point_index.get(name).copied()
    }

    pub fn point(&self, name: &str) -> Result<PointId> {
        self.point_id(name)
            .ok_or_else(|| Error::UnknownId(name.to_owned()))
    }

    /// Left anchor `r(x) ∈ H⁰`.
    pub fn r(&self, x: PointId) -> ObjectId {
        self.r[x.0]
    }

    /// Right anchor `s(x) ∈ G⁰`.
    pub fn s(&self, x: PointId) -> ObjectId {
        self.s[x.0]
    }

    /// `h·x`, defined when `src(h) = r(x)`.
    pub fn lact(&self, h: ArrowId, x: PointId) -> Option<PointId> {
        self.lact[h.0 * self.points.len() + x.0]
    }

    /// `x·g`, defined when `s(x) = dst(g)`.
    pub fn ract(&self, x: PointId, g: ArrowId) -> Option<PointId> {
        self.ract[x.0 * self.right.n_arrows() + g.0]
    }

    /// `h·x` for a composable pair. Panics otherwise.
    pub fn left_mul(&self, h: ArrowId, x: PointId) -> PointId {
        self.lact(h, x).unwrap_or_else(|| {
            panic!(
                "{} cannot act on {}",
                self.left.arrow_name(h),
                self.point_name(x)
            )
        })
    }

    /// `x·g` for a composable pair. Panics otherwise.
    pub fn right_mul(&self, x: PointId, g: ArrowId) -> PointId {
        self.ract(x, g).unwrap_or_else(|| {
            panic!(
                "{} cannot act on {}",
                self.right.arrow_name(g),
                self.point_name(x)
            )
        })
    }

    /// Partition of the carrier into right orbits.
    pub fn orbits(&self) -> OrbitDecomposition {
        let n = self.points.len();
        let mut class_of = vec![usize::MAX; n];
        let mut classes = Vec::new();
        for x in self.point_ids() {
            if class_of[x.0] != usize::MAX {
                continue;
            }
            let c = classes.len();
            let mut members: Vec<PointId> = self
                .right
                .arrows_to(self.s(x))
                .iter()
                .map(|&g| self.right_mul(x, g))
                .collect();
            members.sort();
            for y in &members {
                class_of[y.0] = c;
            }
            classes.push(members);
        }
        OrbitDecomposition {
            rep: classes.iter().map(|c| c[0]).collect(),
            classes,
            class_of,
        }
    }

    /// `⟨x₁|x₂⟩`, the unique `g` with `x₁·g = x₂`.
    pub fn bracket(&self, x1: PointId, x2: PointId) -> Result<ArrowId> {
        self.right
            .arrows_to(self.s(x1))
            .iter()
            .copied()
            .find(|&g| self.right_mul(x1, g) == x2)
            .ok_or_else(|| {
                Error::NotSameOrbit(
                    self.point_name(x1).to_owned(),
                    self.point_name(x2).to_owned(),
                )
            })
    }

    /// Checks the bracket laws on all pairs of points: defined exactly on
    /// orbit pairs, `x₁·⟨x₁|x₂⟩ = x₂`, `⟨x₂|x₁⟩ = ⟨x₁|x₂⟩⁻¹`,
    /// `⟨x₁g₁|x₂g₂⟩ = g₁⁻¹⟨x₁|x₂⟩g₂` and `⟨hx₁|hx₂⟩ = ⟨x₁|x₂⟩`.
    /// Returns a description of the first failure.
    pub fn bracket_law_violation(&self) -> Option<String> {
        let g = &*self.right;
        let orbits = self.orbits();
        for x1 in self.point_ids() {
            for x2 in self.point_ids() {
                let pair = format!("({}, {})", self.point_name(x1), self.point_name(x2));
                let same = orbits.class_of[x1.0] == orbits.class_of[x2.0];
                let b = match (self.bracket(x1, x2), same) {
                    (Ok(b), true) => b,
                    (Err(_), false) => continue,
                    (Ok(_), false) => return Some(format!("{pair}: bracket across orbits")),
                    (Err(_), true) => return Some(format!("{pair}: no bracket within an orbit")),
                };
                if self.ract(x1, b) != Some(x2) || g.dst(b) != self.s(x1) || g.src(b) != self.s(x2) {
                    return Some(format!("{pair}: bracket does not carry one point to the other"));
                }
                if self.bracket(x2, x1).ok() != Some(g.inv(b)) {
                    return Some(format!("{pair}: reversed bracket is not the inverse"));
                }
                for &g1 in g.arrows_to(self.s(x1)) {
                    for &g2 in g.arrows_to(self.s(x2)) {
                        let lhs = self.bracket(self.right_mul(x1, g1), self.right_mul(x2, g2)).ok();
                        if lhs != Some(g.mul(g.mul(g.inv(g1), b), g2)) {
                            return Some(format!("{pair}: not equivariant"));
                        }
                    }
                }
                for &h in self.left.arrows_from(self.r(x1)) {
                    if self.bracket(self.left_mul(h, x1), self.left_mul(h, x2)).ok() != Some(b) {
                        return Some(format!("{pair}: not invariant under {}", self.left.arrow_name(h)));
                    }
                }
            }
        }
        None
    }

    /// Properness and tightness of the induced map `r_*: X/G → H⁰`.
    pub fn classify(&self) -> Classification {
        let orbits = self.orbits();
        let mut hits = vec![0usize; self.left.n_objects()];
        for &rep in &orbits.rep {
            hits[self.r(rep).0] += 1;
        }
        Classification {
            proper: true,
            tight: hits.iter().all(|&k| k == 1),
            orbits: orbits.len(),
            objects: self.left.n_objects(),
        }
    }

    /// File tables for this correspondence.
    pub fn to_tables(&self) -> CorrespondenceTables {
        let mut lact = Vec::new();
        let mut ract = Vec::new();
        for x in self.point_ids() {
            for &h in self.left.arrows_from(self.r(x)) {
                lact.push([
                    self.left.arrow_name(h).to_owned(),
                    self.point_name(x).to_owned(),
                    self.point_name(self.left_mul(h, x)).to_owned(),
                ]);
            }
            for &g in self.right.arrows_to(self.s(x)) {
                ract.push([
                    self.right.arrow_name(g).to_owned(),
                    self.point_name(x).to_owned(),
                    self.point_name(self.right_mul(x, g)).to_owned(),
                ]);
            }
        }
        CorrespondenceTables {
            carrier: self.points.clone(),
            r: self
                .point_ids()
                .map(|x| {
                    (
                        self.point_name(x).to_owned(),
                        self.left.object_name(self.r(x)).to_owned(),
                    )
                })
                .collect(),
            s: self
                .point_ids()
                .map(|x| {
                    (
                        self.point_name(x).to_owned(),
                        self.right.object_name(self.s(x)).to_owned(),
                    )
                })
                .collect(),
            lact,
            ract,
        }
    }

    /// The smallest subset closed under both actions containing `seed`.
    pub fn bi_invariant_closure(
        &self,
        seed: impl IntoIterator<Item = PointId>,
    ) -> BTreeSet<PointId> {
        let mut out: BTreeSet<PointId> = BTreeSet::new();
        let mut stack: Vec<PointId> = seed.into_iter().collect();
        while let Some(x) = stack.pop() {
            if !out.insert(x) {
                continue;
            }
            for &h in self.left.arrows_from(self.r(x)) {
                stack.push(self.left_mul(h, x));
            }
            for &g in self.right.arrows_to(self.s(x)) {
                stack.push(self.right_mul(x, g));
            }
        }
        out
    }

    /// Restriction to a subset invariant under both actions.
    pub fn restrict(&self, subset: &BTreeSet<PointId>) -> Result<Correspondence> {
        if let Some(&x) = subset.iter().find(|x| x.0 >= self.len()) {
            return Err(Error::UnknownId(x.to_string()));
        }
        let closure = self.bi_invariant_closure(subset.iter().copied());
        if let Some(&x) = closure.iter().find(|x| !subset.contains(x)) {
            return Err(Error::axiom(
                Axiom::Equivariance,
                [self.point_name(x).to_owned()],
            ));
        }
        let members: Vec<PointId> = subset.iter().copied().collect();
        let pos: HashMap<PointId, usize> =
            members.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        RawCorrespondence::from_fns(
            self.left.clone(),
            self.right.clone(),
            members
                .iter()
                .map(|&x| self.point_name(x).to_owned())
                .collect(),
            members.iter().map(|&x| self.r(x)).collect(),
            members.iter().map(|&x| self.s(x)).collect(),
            |h, i| pos[&self.left_mul(h, members[i])],
            |i, g| pos[&self.right_mul(members[i], g)],
        )
        .finish()
    }

    /// Same carrier and actions with points renamed by `f` (must stay injective).
    pub fn rename_points(&self, f: impl Fn(&str) -> String) -> Result<Correspondence> {
        RawCorrespondence::from_fns(
            self.left.clone(),
            self.right.clone(),
            self.points.iter().map(|p| f(p)).collect(),
            self.r.clone(),
            self.s.clone(),
            |h, x| self.left_mul(h, PointId(x)).0,
            |x, g| self.right_mul(PointId(x), g).0,
        )
        .finish()
    }
}

/// Right orbits of a correspondence with canonical representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    /// Classes in order of their representatives, each sorted.
    pub classes: Vec<Vec<PointId>>,
    /// Least member of each class.
    pub rep: Vec<PointId>,
    pub class_of: Vec<usize>,
}

impl OrbitDecomposition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    /// Always true for finite carriers: `r_*` is trivially finite-to-one.
    pub proper: bool,
    /// `r_*: X/G → H⁰` is a bijection.
    pub tight: bool,
    pub orbits: usize,
    pub objects: usize,
}

/// A group action on a finite alphabet together with a restriction
/// cocycle `(h, x) ↦ h|_x` satisfying `(h₁h₂)|_x = h₁|_{h₂x} · h₂|_x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    group: Arc<FiniteGroupoid>,
    alphabet: Vec<String>,
    pi: GroupAction,
    phi: Vec<ArrowId>,
}

impl Cocycle {
    /// `pi(g, x)` and `phi(g, x)` are indexed by alphabet position.
    pub fn new(
        group: Arc<FiniteGroupoid>,
        alphabet: Vec<String>,
        pi: impl Fn(ArrowId, usize) -> usize,
        phi: impl Fn(ArrowId, usize) -> ArrowId,
    ) -> Result<Self> {
        let action = GroupAction::new(&group, alphabet.clone(), pi)?;
        let na = alphabet.len();
        let mut table = Vec::with_capacity(group.n_arrows() * na);
        for g in group.arrow_ids() {
            for x in 0..na {
                table.push(phi(g, x));
            }
        }
        let c = Cocycle {
            group,
            alphabet,
            pi: action,
            phi: table,
        };
        c.check()?;
        Ok(c)
    }

    /// Builds a cocycle from name tables `(g, x) → π_g(x)` and `(g, x) → g|_x`.
    pub fn from_names(
        group: Arc<FiniteGroupoid>,
        alphabet: Vec<String>,
        pi: &BTreeMap<(String, String), String>,
        phi: &BTreeMap<(String, String), String>,
    ) -> Result<Self> {
        let action = GroupAction::from_names(&group, alphabet.clone(), pi)?;
        for ((g, x), h) in phi {
            group.arrow(g)?;
            group.arrow(h)?;
            if !alphabet.contains(x) {
                return Err(Error::UnknownId(x.clone()));
            }
        }
        let grp = group.clone();
        let names = alphabet.clone();
        let lookup = move |g: ArrowId, x: usize| -> Result<ArrowId> {
            let key = (grp.arrow_name(g).to_owned(), names[x].clone());
            let h = phi.get(&key).ok_or_else(|| {
                Error::InvalidInput(format!("missing restriction {}|{}", key.0, key.1))
            })?;
            grp.arrow(h)
        };
        let mut table = Vec::new();
        for g in group.arrow_ids() {
            for x in 0..alphabet.len() {
                table.push(lookup(g, x)?);
            }
        }
        let c = Cocycle {
            group,
            alphabet,
            pi: action,
            phi: table,
        };
        c.check()?;
        Ok(c)
    }

    fn check(&self) -> Result<()> {
        let g = &*self.group;
        for h1 in g.arrow_ids() {
            for h2 in g.arrow_ids() {
                for x in 0..self.alphabet.len() {
                    let lhs = self.restrict(g.mul(h1, h2), x);
                    let rhs = g.mul(self.restrict(h1, self.act(h2, x)), self.restrict(h2, x));
                    if lhs != rhs {
                        return Err(Error::CocycleViolation {
                            h1: g.arrow_name(h1).to_owned(),
                            h2: g.arrow_name(h2).to_owned(),
                            x: self.alphabet[x].clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroupoid> {
        &self.group
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    /// `π_g(x)`.
    pub fn act(&self, g: ArrowId, x: usize) -> usize {
        self.pi.act(g, x)
    }

    /// `g|_x`.
    pub fn restrict(&self, g: ArrowId, x: usize) -> ArrowId {
        self.phi[g.0 * self.alphabet.len() + x]
    }

    /// The gauge-transformed cocycle `ψ(π_h x)⁻¹ · φ(h, x) · ψ(x)`.
    pub fn gauge(&self, psi: &[ArrowId]) -> Result<Cocycle> {
        if psi.len() != self.alphabet.len() {
            return Err(Error::InvalidInput(
                "gauge map must be defined on every letter".into(),
            ));
        }
        let g = &*self.group;
        Cocycle::new(
            self.group.clone(),
            self.alphabet.clone(),
            |h, x| self.act(h, x),
            |h, x| {
                g.mul(
                    g.mul(g.inv(psi[self.act(h, x)]), self.restrict(h, x)),
                    psi[x],
                )
            },
        )
    }
}

/// The correspondence of a graph whose edges run from objects of the space
/// `right` to objects of the space `left`. Both actions are by units only.
pub fn graph_correspondence(
    left: Arc<FiniteGroupoid>,
    right: Arc<FiniteGroupoid>,
    edges: Vec<String>,
    r: Vec<ObjectId>,
    s: Vec<ObjectId>,
) -> Result<Correspondence> {
    if !left.is_space() || !right.is_space() {
        return Err(Error::InvalidInput(
            "graph correspondences live between spaces".into(),
        ));
    }
    if r.len() != edges.len() || s.len() != edges.len() {
        return Err(Error::InvalidInput(
            "range and source must be given on every edge".into(),
        ));
    }
    if r.iter().any(|x| x.0 >= left.n_objects()) || s.iter().any(|x| x.0 >= right.n_objects()) {
        return Err(Error::InvalidInput("edge endpoint out of range".into()));
    }
    RawCorrespondence::from_fns(left, right, edges, r, s, |_, x| x, |x, _| x).finish()
}

/// The correspondence `G ← G` on `A × G` with `(x, g)·k = (x, gk)` and
/// `h·(x, g) = (π_h(x), h|_x · g)`.
pub fn self_similar_group_correspondence(c: &Cocycle) -> Result<Correspondence> {
    let g = c.group.clone();
    let ng = g.n_arrows();
    let mut points = Vec::with_capacity(c.alphabet.len() * ng);
    for x in &c.alphabet {
        for a in g.arrow_ids() {
            points.push(format!("({},{})", x, g.arrow_name(a)));
        }
    }
    let star = ObjectId(0);
    let n = points.len();
    RawCorrespondence::from_fns(
        g.clone(),
        g.clone(),
        points,
        vec![star; n],
        vec![star; n],
        |h, p| {
            let (x, a) = (p / ng, ArrowId(p % ng));
            c.act(h, x) * ng + g.mul(c.restrict(h, x), a).0
        },
        |p, k| {
            let (x, a) = (p / ng, ArrowId(p % ng));
            x * ng + g.mul(a, k).0
        },
    )
    .finish()
}

/// A self-similar action of a finite group `Γ` on a finite graph
/// `rE, sE: E → V`.
#[derive(Clone, Debug)]
pub struct SelfSimilarGraph {
    gamma: Arc<FiniteGroupoid>,
    vertices: GroupAction,
    edges: GroupAction,
    r_e: Vec<usize>,
    s_e: Vec<usize>,
    phi: Vec<ArrowId>,
}

impl SelfSimilarGraph {
    /// Validates actions, the cocycle on edges and the two compatibility
    /// equations `rE(g·e) = g·rE(e)` and `sE(g·e) = g|_e · sE(e)`.
    pub fn new(
        gamma: Arc<FiniteGroupoid>,
        vertices: GroupAction,
        edges: GroupAction,
        r_e: Vec<usize>,
        s_e: Vec<usize>,
        phi: impl Fn(ArrowId, usize) -> ArrowId,
    ) -> Result<Self> {
        let ne = edges.points().len();
        if r_e.len() != ne || s_e.len() != ne {
            return Err(Error::InvalidInput(
                "range and source must be given on every edge".into(),
            ));
        }
        if r_e
            .iter()
            .chain(&s_e)
            .any(|&v| v >= vertices.points().len())
        {
            return Err(Error::InvalidInput("edge endpoint out of range".into()));
        }
        let mut table = Vec::with_capacity(gamma.n_arrows() * ne);
        for g in gamma.arrow_ids() {
            for e in 0..ne {
                table.push(phi(g, e));
            }
        }
        let ssg = SelfSimilarGraph {
            gamma,
            vertices,
            edges,
            r_e,
            s_e,
            phi: table,
        };
        ssg.check()?;
        Ok(ssg)
    }

    fn check(&self) -> Result<()> {
        let g = &*self.gamma;
        let ne = self.edges.points().len();
        for h1 in g.arrow_ids() {
            for h2 in g.arrow_ids() {
                for e in 0..ne {
                    let lhs = self.restrict(g.mul(h1, h2), e);
                    let rhs = g.mul(
                        self.restrict(h1, self.edges.act(h2, e)),
                        self.restrict(h2, e),
                    );
                    if lhs != rhs {
                        return Err(Error::CocycleViolation {
                            h1: g.arrow_name(h1).to_owned(),
                            h2: g.arrow_name(h2).to_owned(),
                            x: self.edges.points()[e].clone(),
                        });
                    }
                }
            }
        }
        for a in g.arrow_ids() {
            for e in 0..ne {
                let ae = self.edges.act(a, e);
                let witness = || vec![g.arrow_name(a).to_owned(), self.edges.points()[e].clone()];
                if self.r_e[ae] != self.vertices.act(a, self.r_e[e]) {
                    return Err(Error::CompatibilityViolation {
                        which: "range".into(),
                        witness: witness(),
                    });
                }
                if self.s_e[ae] != self.vertices.act(self.restrict(a, e), self.s_e[e]) {
                    return Err(Error::CompatibilityViolation {
                        which: "source".into(),
                        witness: witness(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn gamma(&self) -> &Arc<FiniteGroupoid> {
        &self.gamma
    }

    pub fn vertex_action(&self) -> &GroupAction {
        &self.vertices
    }

    pub fn edge_action(&self) -> &GroupAction {
        &self.edges
    }

    pub fn range(&self, e: usize) -> usize {
        self.r_e[e]
    }

    pub fn source(&self, e: usize) -> usize {
        self.s_e[e]
    }

    /// `g|_e`.
    pub fn restrict(&self, g: ArrowId, e: usize) -> ArrowId {
        self.phi[g.0 * self.edges.points().len() + e]
    }

    /// The transformation groupoid `Γ⋉V` over which the correspondence lives.
    pub fn node_groupoid(&self) -> Result<FiniteGroupoid> {
        transformation_groupoid(&self.gamma, &self.vertices)
    }
}

/// The correspondence `Γ⋉V ← Γ⋉V` on `E × Γ` with anchors
/// `r(e, g) = rE(e)`, `s(e, g) = g⁻¹·sE(e)` and actions
/// `(e, g)·(k, v) = (e, gk)`, `(h, w)·(e, g) = (h·e, h|_e · g)`.
pub fn self_similar_graph_correspondence(
    ssg: &SelfSimilarGraph,
    node: Arc<FiniteGroupoid>,
) -> Result<Correspondence> {
    let gamma = &*ssg.gamma;
    let ng = gamma.n_arrows();
    let verts = ssg.vertices.points();
    let vid = |v: usize| node.object(&verts[v]);
    let mut arrow_parts = vec![(ArrowId(0), 0usize); node.n_arrows()];
    for g in gamma.arrow_ids() {
        for v in 0..verts.len() {
            let a = node.arrow(&format!("({},{})", gamma.arrow_name(g), verts[v]))?;
            arrow_parts[a.0] = (g, v);
        }
    }
    let ne = ssg.edges.points().len();
    let mut points = Vec::with_capacity(ne * ng);
    let mut r = Vec::with_capacity(ne * ng);
    let mut s = Vec::with_capacity(ne * ng);
    for e in 0..ne {
        for g in gamma.arrow_ids() {
            points.push(format!(
                "({},{})",
                ssg.edges.points()[e],
                gamma.arrow_name(g)
            ));
            r.push(vid(ssg.r_e[e])?);
            s.push(vid(ssg.vertices.act(gamma.inv(g), ssg.s_e[e]))?);
        }
    }
    RawCorrespondence::from_fns(
        node.clone(),
        node.clone(),
        points,
        r,
        s,
        |h, p| {
            let (e, g) = (p / ng, ArrowId(p % ng));
            let (h, _) = arrow_parts[h.0];
            ssg.edges.act(h, e) * ng + gamma.mul(ssg.restrict(h, e), g).0
        },
        |p, k| {
            let (e, g) = (p / ng, ArrowId(p % ng));
            let (k, _) = arrow_parts[k.0];
            e * ng + gamma.mul(g, k).0
        },
    )
    .finish()
}

//! Seeded random structures for property suites.
//!
//! Every generator takes a [`ChaCha8Rng`], so a seed fixes the output on
//! every platform. Random correspondences are disjoint unions of a few
//! building blocks, each a valid correspondence by construction:
//!
//! * a free block `{(h, k) : s(h) = x, r(k) = y}` with both actions by
//!   multiplication,
//! * a block `{(z, k) : z ∈ C, r(k) = y}` over a connected component `C` of
//!   the left groupoid, on which `h` acts by moving `z` along `h`,
//! * the identity correspondence, when both sides are the same groupoid,
//! * a gauged self-similar block, when both sides are the same group.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::correspondence::{
    same_groupoid, self_similar_group_correspondence, Cocycle, Correspondence, PointId, RawCorrespondence,
};
use crate::error::Result;
use crate::groupoid::{ArrowId, FiniteGroupoid, ObjectId};
use crate::hilbert::ModuleElement;
use crate::scalar::Scalar;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A Gaussian rational with small numerators and denominators, real half
/// the time.
pub fn scalar(rng: &mut impl Rng) -> Scalar {
    let part = |rng: &mut dyn rand::RngCore| (rng.random_range(-3..=3i64), rng.random_range(1..=3i64));
    let (a, b) = part(rng);
    let (c, d) = if rng.random_bool(0.5) { part(rng) } else { (0, 1) };
    Scalar::from_ratios(a, b, c, d)
}

/// A random element with support of size at most `max_support`.
pub fn algebra_element(rng: &mut impl Rng, g: &Arc<FiniteGroupoid>, max_support: usize) -> AlgebraElement {
    let arrows: Vec<ArrowId> = g.arrow_ids().collect();
    let k = rng.random_range(0..=max_support.min(arrows.len()));
    let support: Vec<ArrowId> = arrows.choose_multiple(rng, k).copied().collect();
    AlgebraElement::from_coeffs(g.clone(), support.into_iter().map(|a| (a, scalar(rng))).collect::<Vec<_>>())
}

pub fn module_element(rng: &mut impl Rng, x: &Arc<Correspondence>, max_support: usize) -> ModuleElement {
    let points: Vec<PointId> = x.point_ids().collect();
    let k = rng.random_range(0..=max_support.min(points.len()));
    let support: Vec<PointId> = points.choose_multiple(rng, k).copied().collect();
    ModuleElement::from_coeffs(x.clone(), support.into_iter().map(|p| (p, scalar(rng))).collect::<Vec<_>>())
}

/// A nonzero module element.
pub fn nonzero_module_element(rng: &mut impl Rng, x: &Arc<Correspondence>, max_support: usize) -> ModuleElement {
    loop {
        let xi = module_element(rng, x, max_support.max(1));
        if !xi.is_zero() {
            return xi;
        }
    }
}

/// Connected components of a groupoid, as sorted object lists.
pub fn components(g: &FiniteGroupoid) -> Vec<Vec<ObjectId>> {
    let mut seen = vec![false; g.n_objects()];
    let mut out = Vec::new();
    for x in g.object_ids() {
        if seen[x.0] {
            continue;
        }
        let mut comp: Vec<ObjectId> = g.arrows_from(x).iter().map(|&h| g.dst(h)).collect();
        comp.sort();
        comp.dedup();
        for y in &comp {
            seen[y.0] = true;
        }
        out.push(comp);
    }
    out
}

/// One building block, as points with anchors and action functions.
struct Block {
    points: Vec<String>,
    r: Vec<ObjectId>,
    s: Vec<ObjectId>,
    lact: Box<dyn Fn(ArrowId, usize) -> usize>,
    ract: Box<dyn Fn(usize, ArrowId) -> usize>,
}

impl Block {
    fn from_corr(x: Correspondence) -> Self {
        let x = Arc::new(x);
        let (xl, xr) = (x.clone(), x.clone());
        Block {
            points: x.point_names().to_vec(),
            r: x.point_ids().map(|p| x.r(p)).collect(),
            s: x.point_ids().map(|p| x.s(p)).collect(),
            lact: Box::new(move |h, p| xl.left_mul(h, PointId(p)).0),
            ract: Box::new(move |p, g| xr.right_mul(PointId(p), g).0),
        }
    }

    fn len(&self) -> usize {
        self.points.len()
    }
}

/// Points `(u, k)` with `u` from `left_part` and `r(k) = y`; the left
/// action moves `u` by `move_left`.
fn product_block(
    g: &Arc<FiniteGroupoid>,
    left_part: Vec<(String, ObjectId)>,
    move_left: impl Fn(ArrowId, usize) -> usize + 'static,
    y: ObjectId,
) -> Block {
    let ks: Vec<ArrowId> = g.arrows_to(y).to_vec();
    let nk = ks.len();
    let mut points = Vec::new();
    let mut r = Vec::new();
    let mut s = Vec::new();
    for (name, obj) in &left_part {
        for &k in &ks {
            points.push(format!("({name}|{})", g.arrow_name(k)));
            r.push(*obj);
            s.push(g.src(k));
        }
    }
    let k_pos = {
        let ks = ks.clone();
        move |k: ArrowId| ks.iter().position(|&a| a == k).expect("arrow into y")
    };
    let g2 = g.clone();
    let ks2 = ks.clone();
    Block {
        points,
        r,
        s,
        lact: Box::new(move |a, p| move_left(a, p / nk) * nk + p % nk),
        ract: Box::new(move |p, b| (p / nk) * nk + k_pos(g2.mul(ks2[p % nk], b))),
    }
}

fn free_block(h: &Arc<FiniteGroupoid>, g: &Arc<FiniteGroupoid>, x: ObjectId, y: ObjectId) -> Block {
    let hs: Vec<ArrowId> = h.arrows_from(x).to_vec();
    let left_part = hs.iter().map(|&a| (h.arrow_name(a).to_owned(), h.dst(a))).collect();
    let h2 = h.clone();
    let move_left = move |a: ArrowId, i: usize| {
        let target = h2.mul(a, hs[i]);
        hs.iter().position(|&b| b == target).expect("star is closed under the left action")
    };
    product_block(g, left_part, move_left, y)
}

fn component_block(h: &Arc<FiniteGroupoid>, g: &Arc<FiniteGroupoid>, comp: &[ObjectId], y: ObjectId) -> Block {
    let comp = comp.to_vec();
    let left_part = comp.iter().map(|&z| (h.object_name(z).to_owned(), z)).collect();
    let h2 = h.clone();
    let move_left = move |a: ArrowId, _: usize| {
        let z = h2.dst(a);
        comp.iter().position(|&c| c == z).expect("component is closed")
    };
    product_block(g, left_part, move_left, y)
}

/// A self-similar block, gauged by a random `ψ`. With `m > 1` the alphabet
/// is either `m` letters with the trivial permutation action or the group
/// itself with the regular action; `m = 1` gives a single letter.
fn selfsim_block(rng: &mut impl Rng, g: &Arc<FiniteGroupoid>, m: usize) -> Result<Block> {
    let n = g.n_arrows();
    let regular = m > 1 && rng.random_bool(0.5);
    let m = if regular { n } else { m };
    let alphabet: Vec<String> = (0..m).map(|i| format!("x{i}")).collect();
    let g1 = g.clone();
    let pi = move |h: ArrowId, x: usize| if regular { g1.mul(h, ArrowId(x)).0 } else { x };
    let restrict_by_h = rng.random_bool(0.5);
    let e = g.unit(ObjectId(0));
    let base = Cocycle::new(g.clone(), alphabet, pi, move |h, _| if restrict_by_h { h } else { e })?;
    let psi: Vec<ArrowId> = (0..m).map(|_| ArrowId(rng.random_range(0..n))).collect();
    let gauged = base.gauge(&psi)?;
    Ok(Block::from_corr(self_similar_group_correspondence(&gauged)?))
}

fn one_object_group(g: &FiniteGroupoid) -> bool {
    g.n_objects() == 1
}

fn random_block(
    rng: &mut impl Rng,
    h: &Arc<FiniteGroupoid>,
    g: &Arc<FiniteGroupoid>,
    room: usize,
) -> Result<Option<Block>> {
    if h.n_objects() == 0 || g.n_objects() == 0 {
        return Ok(None);
    }
    let same = same_groupoid(h, g);
    let kind = rng.random_range(0..4);
    let block = match kind {
        0 => {
            let x = ObjectId(rng.random_range(0..h.n_objects()));
            let y = ObjectId(rng.random_range(0..g.n_objects()));
            free_block(h, g, x, y)
        }
        2 if same => Block::from_corr(Correspondence::identity(g.clone())),
        3 if same && one_object_group(g) => {
            let m = rng.random_range(1..=2);
            selfsim_block(rng, g, m)?
        }
        _ => {
            let comps = components(h);
            let comp = comps.choose(rng).expect("nonempty");
            let y = ObjectId(rng.random_range(0..g.n_objects()));
            component_block(h, g, comp, y)
        }
    };
    Ok((block.len() <= room).then_some(block))
}

fn union(h: &Arc<FiniteGroupoid>, g: &Arc<FiniteGroupoid>, blocks: Vec<Block>) -> Result<Correspondence> {
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut points = Vec::new();
    let mut r = Vec::new();
    let mut s = Vec::new();
    let mut owner = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        offsets.push(points.len());
        for (j, p) in b.points.iter().enumerate() {
            points.push(format!("{i}:{p}"));
            owner.push((i, j));
        }
        r.extend_from_slice(&b.r);
        s.extend_from_slice(&b.s);
    }
    RawCorrespondence::from_fns(
        h.clone(),
        g.clone(),
        points,
        r,
        s,
        |a, p| {
            let (i, j) = owner[p];
            offsets[i] + (blocks[i].lact)(a, j)
        },
        |p, a| {
            let (i, j) = owner[p];
            offsets[i] + (blocks[i].ract)(j, a)
        },
    )
    .finish()
}

/// Renames the points by a random permutation of `p0, p1, …`, which moves
/// orbit representatives around.
fn shuffle_names(rng: &mut impl Rng, x: Correspondence) -> Result<Correspondence> {
    let mut labels: Vec<usize> = (0..x.len()).collect();
    labels.shuffle(rng);
    let width = x.len().to_string().len();
    let names: Vec<String> = x.point_names().to_vec();
    x.rename_points(|p| {
        let i = names.binary_search_by(|q| q.as_str().cmp(p)).expect("own point");
        format!("p{:0width$}", labels[i])
    })
}

/// A random correspondence `h ← g` with at most `max_points` points.
pub fn correspondence(
    rng: &mut impl Rng,
    h: &Arc<FiniteGroupoid>,
    g: &Arc<FiniteGroupoid>,
    max_points: usize,
) -> Result<Correspondence> {
    let mut blocks = Vec::new();
    let mut total = 0;
    let attempts = rng.random_range(1..=4);
    for _ in 0..attempts {
        if let Some(b) = random_block(rng, h, g, max_points - total)? {
            total += b.len();
            blocks.push(b);
        }
    }
    let x = union(h, g, blocks)?;
    if rng.random_bool(0.5) {
        shuffle_names(rng, x)
    } else {
        Ok(x)
    }
}

/// A random tight correspondence `h ← g`: exactly one right orbit over
/// every object of `h`.
pub fn tight_correspondence(
    rng: &mut impl Rng,
    h: &Arc<FiniteGroupoid>,
    g: &Arc<FiniteGroupoid>,
) -> Result<Correspondence> {
    let same = same_groupoid(h, g);
    let mut blocks = Vec::new();
    for comp in components(h) {
        if g.n_objects() == 0 {
            break;
        }
        if same && rng.random_bool(0.5) {
            let id = Correspondence::identity(g.clone());
            let members: BTreeSet<PointId> = id.point_ids().filter(|&p| comp.contains(&id.r(p))).collect();
            blocks.push(Block::from_corr(id.restrict(&members)?));
        } else if same && one_object_group(g) && rng.random_bool(0.5) {
            blocks.push(selfsim_block(rng, g, 1)?);
        } else {
            let y = ObjectId(rng.random_range(0..g.n_objects()));
            blocks.push(component_block(h, g, &comp, y));
        }
    }
    let x = union(h, g, blocks)?;
    shuffle_names(rng, x)
}

/// A chain `X1, …, Xn` with `Xi: G(i-1) ← G(i)` over groupoids drawn from
/// `pool`.
pub fn chain(
    rng: &mut impl Rng,
    pool: &[Arc<FiniteGroupoid>],
    n: usize,
    max_points: usize,
) -> Result<Vec<Arc<Correspondence>>> {
    let pick = |rng: &mut dyn rand::RngCore| pool[rng.random_range(0..pool.len())].clone();
    let mut left = pick(rng);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let right = if rng.random_bool(0.4) { left.clone() } else { pick(rng) };
        out.push(Arc::new(correspondence(rng, &left, &right, max_points)?));
        left = right;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn random_correspondences_validate_and_respect_size() {
        let mut rng = rng(7);
        let pool: Vec<Arc<FiniteGroupoid>> = fixtures::groupoids().into_iter().map(|(_, g)| Arc::new(g)).collect();
        for _ in 0..40 {
            let h = pool.choose(&mut rng).unwrap().clone();
            let g = if rng.random_bool(0.5) { h.clone() } else { pool.choose(&mut rng).unwrap().clone() };
            let x = correspondence(&mut rng, &h, &g, 30).unwrap();
            assert!(x.len() <= 30);
            let t = tight_correspondence(&mut rng, &h, &g).unwrap();
            assert!(t.classify().tight);
        }
    }

    #[test]
    fn same_seed_same_output() {
        let g = Arc::new(fixtures::z2());
        let a = correspondence(&mut rng(3), &g, &g, 20).unwrap();
        let b = correspondence(&mut rng(3), &g, &g, 20).unwrap();
        assert_eq!(a.to_tables(), b.to_tables());
    }
}

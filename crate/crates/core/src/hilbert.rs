//! Finitely supported functions on the carrier of a correspondence as a
//! bimodule over the two convolution algebras.
//!
//! For `X: H ← G`, `ξ, η` on `X`, `γ` on `G` and `ζ` on `H`:
//!
//! ```text
//! (ξ * γ)(x)  = Σ_{g : r(g) = s(x)} ξ(x·g) γ(g⁻¹)
//! ⟨ξ|η⟩(g)    = Σ_{x : s(x) = r(g)} conj ξ(x) η(x·g)
//! (ζ * ξ)(x)  = Σ_{h : r(h) = r(x)} ζ(h) ξ(h⁻¹·x)
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::algebra::{AlgebraElement, RegularRepresentation};
use crate::bicategory::{Composite, TwoArrow};
use crate::correspondence::{same_groupoid, Correspondence, PointId};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::Scalar;

/// A finitely supported function on the carrier of a correspondence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleElement {
    corr: Arc<Correspondence>,
    coeffs: BTreeMap<PointId, Scalar>,
}

impl ModuleElement {
    pub fn zero(corr: Arc<Correspondence>) -> Self {
        ModuleElement {
            corr,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn delta(corr: Arc<Correspondence>, x: PointId) -> Self {
        ModuleElement::from_coeffs(corr, [(x, Scalar::one())])
    }

    /// The indicator function of a set of points.
    pub fn indicator(corr: Arc<Correspondence>, set: impl IntoIterator<Item = PointId>) -> Self {
        ModuleElement::from_coeffs(corr, set.into_iter().map(|x| (x, Scalar::one())))
    }

    pub fn from_coeffs(
        corr: Arc<Correspondence>,
        coeffs: impl IntoIterator<Item = (PointId, Scalar)>,
    ) -> Self {
        let mut out = ModuleElement::zero(corr);
        for (x, c) in coeffs {
            out.add_at(x, &c);
        }
        out
    }

    pub fn from_names(
        corr: Arc<Correspondence>,
        coeffs: &BTreeMap<String, Scalar>,
    ) -> Result<Self> {
        let pairs = coeffs
            .iter()
            .map(|(n, c)| Ok((corr.point(n)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModuleElement::from_coeffs(corr, pairs))
    }

    pub fn to_names(&self) -> BTreeMap<String, Scalar> {
        self.coeffs
            .iter()
            .map(|(&x, c)| (self.corr.point_name(x).to_owned(), c.clone()))
            .collect()
    }

    fn add_at(&mut self, x: PointId, c: &Scalar) {
        assert!(x.0 < self.corr.len(), "point out of range");
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(x).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&x);
        }
    }

    pub fn corr(&self) -> &Arc<Correspondence> {
        &self.corr
    }

    pub fn coeffs(&self) -> &BTreeMap<PointId, Scalar> {
        &self.coeffs
    }

    pub fn get(&self, x: PointId) -> Scalar {
        self.coeffs.get(&x).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same(&self, other: &ModuleElement) -> Result<()> {
        if Arc::ptr_eq(&self.corr, &other.corr) || self.corr == other.corr {
            Ok(())
        } else {
            Err(Error::GroupoidMismatch)
        }
    }

    pub fn add(&self, other: &ModuleElement) -> Result<ModuleElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&x, c) in &other.coeffs {
            out.add_at(x, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> ModuleElement {
        ModuleElement::from_coeffs(
            self.corr.clone(),
            self.coeffs.iter().map(|(&x, a)| (x, c * a)),
        )
    }

    /// Pointwise product with a function of the point.
    pub fn pointwise(&self, f: impl Fn(PointId) -> Scalar) -> ModuleElement {
        ModuleElement::from_coeffs(
            self.corr.clone(),
            self.coeffs.iter().map(|(&x, a)| (x, &f(x) * a)),
        )
    }
}

/// `ξ * γ` for `γ` in the algebra of the right groupoid.
pub fn right_action(xi: &ModuleElement, gamma: &AlgebraElement) -> Result<ModuleElement> {
    let x = &*xi.corr;
    if !same_groupoid(x.right(), gamma.groupoid()) {
        return Err(Error::GroupoidMismatch);
    }
    let g = x.right();
    let mut out = ModuleElement::zero(xi.corr.clone());
    for (&y, a) in &xi.coeffs {
        for (&k, b) in gamma.coeffs() {
            if g.dst(k) == x.s(y) {
                out.add_at(x.right_mul(y, k), &(a * b));
            }
        }
    }
    Ok(out)
}

/// `⟨ξ|η⟩`, an element of the algebra of the right groupoid.
pub fn inner(xi: &ModuleElement, eta: &ModuleElement) -> Result<AlgebraElement> {
    xi.check_same(eta)?;
    let x = &*xi.corr;
    let g = x.right();
    let mut terms = Vec::new();
    for (&p, a) in &xi.coeffs {
        let ca = a.conj();
        for &k in g.arrows_to(x.s(p)) {
            if let Some(b) = eta.coeffs.get(&x.right_mul(p, k)) {
                terms.push((k, &ca * b));
            }
        }
    }
    Ok(AlgebraElement::from_coeffs(g.clone(), terms))
}

/// `ζ * ξ` for `ζ` in the algebra of the left groupoid.
pub fn left_action(zeta: &AlgebraElement, xi: &ModuleElement) -> Result<ModuleElement> {
    let x = &*xi.corr;
    if !same_groupoid(x.left(), zeta.groupoid()) {
        return Err(Error::GroupoidMismatch);
    }
    let h = x.left();
    let mut out = ModuleElement::zero(xi.corr.clone());
    for (&a, c) in zeta.coeffs() {
        for (&y, d) in &xi.coeffs {
            if h.src(a) == x.r(y) {
                out.add_at(x.left_mul(a, y), &(c * d));
            }
        }
    }
    Ok(out)
}

/// Greedy partition of points into sets on which `s` is injective,
/// visiting points in order.
fn greedy_slices(
    corr: &Correspondence,
    points: impl IntoIterator<Item = PointId>,
) -> Vec<Vec<PointId>> {
    let mut slices: Vec<(BTreeSet<usize>, Vec<PointId>)> = Vec::new();
    for t in points {
        let s = corr.s(t).0;
        match slices.iter_mut().find(|(used, _)| !used.contains(&s)) {
            Some((used, members)) => {
                used.insert(s);
                members.push(t);
            }
            None => slices.push((BTreeSet::from([s]), vec![t])),
        }
    }
    slices.into_iter().map(|(_, m)| m).collect()
}

/// Witness that `⟨ξ|ξ⟩` is a sum of squares.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PositivityWitness {
    /// The slices `T_i` of the transversal.
    pub slices: Vec<Vec<PointId>>,
    /// `a_i = ⟨ξ|1_{T_i}⟩`, with `⟨ξ|ξ⟩ = Σ a_i * a_i*`.
    pub factors: Vec<AlgebraElement>,
}

impl PositivityWitness {
    /// `Σ a_i * a_i*`.
    pub fn sum_of_squares(&self, zero: AlgebraElement) -> Result<AlgebraElement> {
        self.factors
            .iter()
            .try_fold(zero, |acc, a| acc.add(&a.convolve(&a.involute())?))
    }
}

/// Writes `⟨ξ|ξ⟩` as `Σ a_i * a_i*`.
///
/// The canonical representatives of the orbits meeting the support of `ξ`
/// are split greedily into slices `T_i` (distinct source values), and
/// `a_i = ⟨ξ|1_{T_i}⟩`.
pub fn positivity_witness(xi: &ModuleElement) -> PositivityWitness {
    let corr = &*xi.corr;
    let orbits = corr.orbits();
    let transversal: BTreeSet<PointId> = xi
        .coeffs
        .keys()
        .map(|&x| orbits.rep[orbits.class_of[x.0]])
        .collect();
    let slices = greedy_slices(corr, transversal);
    let factors = slices
        .iter()
        .map(|t| {
            inner(
                xi,
                &ModuleElement::indicator(xi.corr.clone(), t.iter().copied()),
            )
            .expect("same correspondence")
        })
        .collect();
    PositivityWitness { slices, factors }
}

/// A rank-one operator `θ_{a,b}(v) = a * ⟨b|v⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOne {
    pub a: ModuleElement,
    pub b: ModuleElement,
}

/// Rank-one operators summing to multiplication by `f ∘ p`, where `f` is a
/// function on orbit classes (indexed as in [`Correspondence::orbits`]).
pub fn left_multiplier_rank_ones(
    corr: &Arc<Correspondence>,
    f: &BTreeMap<usize, Scalar>,
) -> Result<Vec<RankOne>> {
    let orbits = corr.orbits();
    if let Some(&c) = f.keys().find(|&&c| c >= orbits.len()) {
        return Err(Error::UnknownId(format!("orbit class {c}")));
    }
    let transversal = f
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(&c, _)| orbits.rep[c]);
    Ok(greedy_slices(corr, transversal)
        .into_iter()
        .map(|t| RankOne {
            a: ModuleElement::from_coeffs(
                corr.clone(),
                t.iter().map(|&x| (x, f[&orbits.class_of[x.0]].clone())),
            ),
            b: ModuleElement::indicator(corr.clone(), t),
        })
        .collect())
}

/// `Σ θ_{a_i,b_i}(v)`.
pub fn apply_rank_ones(ops: &[RankOne], v: &ModuleElement) -> Result<ModuleElement> {
    ops.iter()
        .try_fold(ModuleElement::zero(v.corr.clone()), |acc, op| {
            acc.add(&right_action(&op.a, &inner(&op.b, v)?)?)
        })
}

/// A formal sum of elementary tensors `Σ f_i ⊗ g_i`.
pub type Tensor = Vec<(ModuleElement, ModuleElement)>;

fn check_tensor(c: &Composite, tensor: &Tensor) -> Result<()> {
    for (f, g) in tensor {
        if **f.corr() != **c.left_factor() || **g.corr() != **c.right_factor() {
            return Err(Error::EndpointMismatch(
                "tensor factors do not match the composite".into(),
            ));
        }
    }
    Ok(())
}

/// `μ(Σ f ⊗ g)([x, y]) = Σ_{h : r(h) = s(x)} f(x·h) g(h⁻¹·y)`.
pub fn mu(c: &Composite, tensor: &Tensor) -> Result<ModuleElement> {
    check_tensor(c, tensor)?;
    let mut out = ModuleElement::zero(c.corr().clone());
    for (f, g) in tensor {
        for (&x, a) in &f.coeffs {
            for (&y, b) in &g.coeffs {
                if let Some(class) = c.class(x, y) {
                    out.add_at(class, &(a * b));
                }
            }
        }
    }
    Ok(out)
}

/// `⟨Σ f_i ⊗ g_i | Σ f'_j ⊗ g'_j⟩ = Σ ⟨g_i | ⟨f_i|f'_j⟩ * g'_j⟩`.
pub fn tensor_inner(c: &Composite, t1: &Tensor, t2: &Tensor) -> Result<AlgebraElement> {
    check_tensor(c, t1)?;
    check_tensor(c, t2)?;
    let mut acc = AlgebraElement::zero(c.corr().right().clone());
    for (f1, g1) in t1 {
        for (f2, g2) in t2 {
            let mid = inner(f1, f2)?;
            acc = acc.add(&inner(g1, &left_action(&mid, g2)?)?)?;
        }
    }
    Ok(acc)
}

/// Extension by zero along a 2-arrow, `δ_x ↦ δ_{α(x)}`.
pub fn two_arrow_isometry(alpha: &TwoArrow, xi: &ModuleElement) -> Result<ModuleElement> {
    if **xi.corr() != **alpha.source() {
        return Err(Error::GroupoidMismatch);
    }
    Ok(ModuleElement::from_coeffs(
        alpha.target().clone(),
        xi.coeffs.iter().map(|(&x, c)| (alpha.apply(x), c.clone())),
    ))
}

/// Smallest eigenvalue of the Gram matrix `[π(⟨ξ_i|ξ_j⟩)]` over all blocks
/// of the regular representation of the right groupoid.
pub fn gram_min_eigenvalue(family: &[ModuleElement]) -> Result<f64> {
    let Some(first) = family.first() else {
        return Ok(0.0);
    };
    for f in family {
        first.check_same(f)?;
    }
    let rep = RegularRepresentation::new(first.corr.right().clone());
    let k = family.len();
    let mut grams = vec![Vec::with_capacity(k); k];
    for (i, fi) in family.iter().enumerate() {
        for fj in family {
            grams[i].push(inner(fi, fj)?);
        }
    }
    let mut best = f64::INFINITY;
    for block in rep.blocks() {
        let d = block.dim();
        if d == 0 {
            continue;
        }
        let mut big = CMatrix::zeros(k * d, k * d);
        for i in 0..k {
            for j in 0..k {
                let m = rep.float_block(&grams[i][j], block.object)?;
                for r in 0..d {
                    for c in 0..d {
                        big[(i * d + r, j * d + c)] = m[(r, c)];
                    }
                }
            }
        }
        best = best.min(big.hermitian_min_eigenvalue());
    }
    Ok(if best.is_finite() { best } else { 0.0 })
}

/// `‖ξ‖ = ‖⟨ξ|ξ⟩‖^{1/2}`.
pub fn module_norm(xi: &ModuleElement) -> f64 {
    crate::algebra::operator_norm(&inner(xi, xi).expect("same correspondence")).sqrt()
}

/// Norm of `ξ ↦ ζ * ξ`: the largest norm of the induced operator on
/// `ℓ²(s⁻¹(y))` over objects `y` of the right groupoid.
pub fn left_action_norm(zeta: &AlgebraElement, corr: &Arc<Correspondence>) -> Result<f64> {
    if !same_groupoid(corr.left(), zeta.groupoid()) {
        return Err(Error::GroupoidMismatch);
    }
    let mut best: f64 = 0.0;
    for y in corr.right().object_ids() {
        let fibre: Vec<PointId> = corr.point_ids().filter(|&x| corr.s(x) == y).collect();
        if fibre.is_empty() {
            continue;
        }
        let pos: BTreeMap<PointId, usize> =
            fibre.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let d = fibre.len();
        let mut m = CMatrix::zeros(d, d);
        for (col, &x) in fibre.iter().enumerate() {
            let image = left_action(zeta, &ModuleElement::delta(corr.clone(), x))?;
            for (p, c) in image.coeffs() {
                m[(pos[p], col)] += c.to_complex64();
            }
        }
        best = best.max(m.spectral_norm());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bicategory::compose;
    use crate::correspondence::RawCorrespondence;
    use crate::groupoid::{space_as_groupoid, ObjectId};

    fn o2x() -> Arc<Correspondence> {
        let pt = Arc::new(space_as_groupoid(&["*"]).unwrap());
        Arc::new(
            RawCorrespondence::from_fns(
                pt.clone(),
                pt,
                vec!["e1".into(), "e2".into()],
                vec![ObjectId(0); 2],
                vec![ObjectId(0); 2],
                |_, x| x,
                |x, _| x,
            )
            .finish()
            .unwrap(),
        )
    }

    #[test]
    fn o2x_inner_products() {
        let x = o2x();
        let (e1, e2) = (x.point("e1").unwrap(), x.point("e2").unwrap());
        let d1 = ModuleElement::delta(x.clone(), e1);
        let d2 = ModuleElement::delta(x.clone(), e2);
        let one = AlgebraElement::delta(x.right().clone(), x.right().arrow("1_*").unwrap());
        assert_eq!(inner(&d1, &d1).unwrap(), one);
        assert!(inner(&d1, &d2).unwrap().is_zero());
        let sum = d1.add(&d2).unwrap();
        assert_eq!(inner(&sum, &sum).unwrap(), one.scale(&Scalar::from_int(2)));
        let w = positivity_witness(&sum);
        assert_eq!(w.factors, vec![one.clone(), one.clone()]);
    }

    #[test]
    fn mu_on_o2x() {
        let x = o2x();
        let c = compose(&x, &x).unwrap();
        let d1 = ModuleElement::delta(x.clone(), x.point("e1").unwrap());
        let d2 = ModuleElement::delta(x.clone(), x.point("e2").unwrap());
        let out = mu(&c, &vec![(d1, d2)]).unwrap();
        assert_eq!(
            out.to_names(),
            BTreeMap::from([("[e1,e2]".to_owned(), Scalar::one())])
        );
    }
}

//! The convolution *-algebra of a finite groupoid with Gaussian-rational
//! coefficients, and its regular representation.
//!
//! ```text
//! (ξ * η)(g) = Σ_{h : r(h) = r(g)} ξ(h) η(h⁻¹g)        ξ*(g) = conj ξ(g⁻¹)
//! ```
//!
//! The regular representation has one block per object `x`, acting on
//! `ℓ²(G_x)` with `G_x = s⁻¹(x)` by `δ_h · δ_k = δ_{hk}`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::correspondence::same_groupoid;
use crate::error::{Error, Result};
use crate::groupoid::{ArrowId, FiniteGroupoid, GroupoidSubset, ObjectId};
use crate::linalg::CMatrix;
use crate::scalar::Scalar;

/// A finitely supported function on the arrows of a groupoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraElement {
    groupoid: Arc<FiniteGroupoid>,
    coeffs: BTreeMap<ArrowId, Scalar>,
}

impl AlgebraElement {
    pub fn zero(groupoid: Arc<FiniteGroupoid>) -> Self {
        AlgebraElement {
            groupoid,
            coeffs: BTreeMap::new(),
        }
    }

    /// The point mass `δ_g`.
    pub fn delta(groupoid: Arc<FiniteGroupoid>, g: ArrowId) -> Self {
        AlgebraElement::from_coeffs(groupoid, [(g, Scalar::one())])
    }

    /// The indicator function of a set of arrows.
    pub fn indicator(groupoid: Arc<FiniteGroupoid>, set: &GroupoidSubset) -> Self {
        AlgebraElement::from_coeffs(groupoid, set.members().iter().map(|&g| (g, Scalar::one())))
    }

    /// Sums repeated arrows and drops zeros.
    pub fn from_coeffs(
        groupoid: Arc<FiniteGroupoid>,
        coeffs: impl IntoIterator<Item = (ArrowId, Scalar)>,
    ) -> Self {
        let mut out = AlgebraElement::zero(groupoid);
        for (g, c) in coeffs {
            out.add_at(g, &c);
        }
        out
    }

    /// Reads an element from arrow names.
    pub fn from_names(
        groupoid: Arc<FiniteGroupoid>,
        coeffs: &BTreeMap<String, Scalar>,
    ) -> Result<Self> {
        let pairs = coeffs
            .iter()
            .map(|(n, c)| Ok((groupoid.arrow(n)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(AlgebraElement::from_coeffs(groupoid, pairs))
    }

    pub fn to_names(&self) -> BTreeMap<String, Scalar> {
        self.coeffs
            .iter()
            .map(|(&g, c)| (self.groupoid.arrow_name(g).to_owned(), c.clone()))
            .collect()
    }

    fn add_at(&mut self, g: ArrowId, c: &Scalar) {
        assert!(g.0 < self.groupoid.n_arrows(), "arrow out of range");
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(g).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&g);
        }
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn coeffs(&self) -> &BTreeMap<ArrowId, Scalar> {
        &self.coeffs
    }

    /// `ξ(g)`.
    pub fn get(&self, g: ArrowId) -> Scalar {
        self.coeffs.get(&g).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same(&self, other: &AlgebraElement) -> Result<()> {
        if same_groupoid(&self.groupoid, &other.groupoid) {
            Ok(())
        } else {
            Err(Error::GroupoidMismatch)
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&g, c) in &other.coeffs {
            out.add_at(g, c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> AlgebraElement {
        AlgebraElement::from_coeffs(
            self.groupoid.clone(),
            self.coeffs.iter().map(|(&g, a)| (g, c * a)),
        )
    }

    /// Convolution `ξ * η`.
    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_same(other)?;
        let g = &*self.groupoid;
        let mut out = AlgebraElement::zero(self.groupoid.clone());
        for (&h, a) in &self.coeffs {
            for (&k, b) in &other.coeffs {
                if let Some(hk) = g.comp(h, k) {
                    out.add_at(hk, &(a * b));
                }
            }
        }
        Ok(out)
    }

    /// Involution `ξ*(g) = conj ξ(g⁻¹)`.
    pub fn involute(&self) -> AlgebraElement {
        AlgebraElement::from_coeffs(
            self.groupoid.clone(),
            self.coeffs
                .iter()
                .map(|(&g, c)| (self.groupoid.inv(g), c.conj())),
        )
    }

    /// Largest absolute coefficient, `‖ξ‖_∞`.
    pub fn sup_norm(&self) -> f64 {
        self.coeffs
            .values()
            .map(|c| c.to_complex64().norm())
            .fold(0.0, f64::max)
    }
}

/// Products `δ_g * δ_h` of all basis pairs: `Some(gh)` or `None` (zero).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureConstants {
    pub arrows: Vec<String>,
    /// `table[i][j]` names the arrow `arrows[i]·arrows[j]`, if composable.
    pub table: Vec<Vec<Option<String>>>,
}

pub fn structure_constants(g: &FiniteGroupoid) -> StructureConstants {
    StructureConstants {
        arrows: g.arrow_names().to_vec(),
        table: g
            .arrow_ids()
            .map(|a| {
                g.arrow_ids()
                    .map(|b| g.comp(a, b).map(|c| g.arrow_name(c).to_owned()))
                    .collect()
            })
            .collect(),
    }
}

/// One block of the regular representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub object: ObjectId,
    /// Basis `G_x`, the arrows with source `object`.
    pub basis: Vec<ArrowId>,
    index: HashMap<ArrowId, usize>,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn position(&self, g: ArrowId) -> Option<usize> {
        self.index.get(&g).copied()
    }
}

/// The regular representation, one block per object.
#[derive(Clone, Debug)]
pub struct RegularRepresentation {
    groupoid: Arc<FiniteGroupoid>,
    blocks: Vec<Block>,
}

impl RegularRepresentation {
    pub fn new(groupoid: Arc<FiniteGroupoid>) -> Self {
        let blocks = groupoid
            .object_ids()
            .map(|x| {
                let basis = groupoid.arrows_from(x).to_vec();
                let index = basis.iter().enumerate().map(|(i, &g)| (g, i)).collect();
                Block {
                    object: x,
                    basis,
                    index,
                }
            })
            .collect();
        RegularRepresentation { groupoid, blocks }
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Exact matrix of `ξ` on the block of object `x`: column `k` holds the
    /// coefficients of `ξ · δ_k`.
    pub fn exact_block(&self, xi: &AlgebraElement, x: ObjectId) -> Result<Vec<Vec<Scalar>>> {
        if !same_groupoid(&self.groupoid, &xi.groupoid) {
            return Err(Error::GroupoidMismatch);
        }
        let block = &self.blocks[x.0];
        let d = block.dim();
        let mut m = vec![vec![Scalar::zero(); d]; d];
        for (col, &k) in block.basis.iter().enumerate() {
            for (&h, c) in &xi.coeffs {
                if let Some(hk) = self.groupoid.comp(h, k) {
                    let row = block.position(hk).expect("hk has source x");
                    m[row][col] += c;
                }
            }
        }
        Ok(m)
    }

    pub fn float_block(&self, xi: &AlgebraElement, x: ObjectId) -> Result<CMatrix> {
        let exact = self.exact_block(xi, x)?;
        let d = exact.len();
        Ok(CMatrix::from_fn(d, d, |i, j| exact[i][j].to_complex64()))
    }

    /// Checks that distinct basis elements `δ_g` have nonzero images with
    /// disjoint supports, so the representation is injective.
    pub fn is_faithful(&self) -> bool {
        let g = &*self.groupoid;
        let mut owner: HashMap<(usize, usize, usize), ArrowId> = HashMap::new();
        for h in g.arrow_ids() {
            let mut nonzero = false;
            for block in &self.blocks {
                for (col, &k) in block.basis.iter().enumerate() {
                    if let Some(hk) = g.comp(h, k) {
                        let row = block.position(hk).expect("hk has source x");
                        if owner.insert((block.object.0, row, col), h).is_some() {
                            return false;
                        }
                        nonzero = true;
                    }
                }
            }
            if !nonzero {
                return false;
            }
        }
        true
    }

    /// `max_x ‖π_x(ξ)‖`.
    pub fn norm(&self, xi: &AlgebraElement) -> Result<f64> {
        let mut best: f64 = 0.0;
        if xi.is_zero() {
            return Ok(0.0);
        }
        for b in &self.blocks {
            best = best.max(self.float_block(xi, b.object)?.spectral_norm());
        }
        Ok(best)
    }
}

/// Operator norm of `ξ` in the regular representation.
pub fn operator_norm(xi: &AlgebraElement) -> f64 {
    RegularRepresentation::new(xi.groupoid.clone())
        .norm(xi)
        .expect("element lives over the representation's groupoid")
}

/// `Complex64` view of an exact matrix.
pub fn to_cmatrix(m: &[Vec<Scalar>]) -> CMatrix {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    CMatrix::from_fn(rows, cols, |i, j| m[i][j].to_complex64())
}

//! Independent reference computations shared by the integration tests.
//! Each one evaluates a defining formula by brute force and never calls the
//! library routine it is compared against.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use grpd_core::{AlgebraElement, ArrowId, Correspondence, FiniteGroupoid, ModuleElement, PointId, Scalar};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// All `g` with `x1·g = x2`, found by trying every arrow.
pub fn brute_bracket(x: &Correspondence, x1: PointId, x2: PointId) -> Vec<ArrowId> {
    x.right()
        .arrow_ids()
        .filter(|&g| x.ract(x1, g) == Some(x2))
        .collect()
}

/// `(ξ*η)(g) = Σ_{r(h) = r(g)} ξ(h) η(h⁻¹g)`, summed literally.
pub fn convolve_literal(xi: &AlgebraElement, eta: &AlgebraElement) -> BTreeMap<ArrowId, Scalar> {
    let g = xi.groupoid();
    let mut out = BTreeMap::new();
    for target in g.arrow_ids() {
        let mut acc = Scalar::zero();
        for h in g.arrow_ids().filter(|&h| g.dst(h) == g.dst(target)) {
            let k = g.comp(g.inv(h), target).expect("h⁻¹g is composable");
            acc = &acc + &(&xi.get(h) * &eta.get(k));
        }
        if !acc.is_zero() {
            out.insert(target, acc);
        }
    }
    out
}

/// Checks the bracket laws on every pair of points against
/// [`brute_bracket`]: existence exactly on orbit pairs, `x·⟨x, y⟩ = y`,
/// the endpoint and inverse rules, equivariance under the right action and
/// invariance under the left action. Returns the first failure.
pub fn bracket_law_violation(x: &Correspondence) -> Option<String> {
    let (h, g) = (x.left(), x.right());
    let orbits = x.orbits();
    let name = |p: PointId| x.point_name(p).to_owned();
    for x1 in x.point_ids() {
        if x.bracket(x1, x1).ok() != Some(g.unit(x.s(x1))) {
            return Some(format!("<{0}, {0}> is not a unit", name(x1)));
        }
        for x2 in x.point_ids() {
            let pair = format!("({}, {})", name(x1), name(x2));
            let found = brute_bracket(x, x1, x2);
            let same = orbits.class_of[x1.0] == orbits.class_of[x2.0];
            if found.len() != usize::from(same) {
                return Some(format!("{pair}: {} arrows carry one point to the other", found.len()));
            }
            let Ok(b) = x.bracket(x1, x2) else {
                if same {
                    return Some(format!("{pair}: no bracket within an orbit"));
                }
                continue;
            };
            if found != [b] || x.right_mul(x1, b) != x2 {
                return Some(format!("{pair}: bracket does not carry the first point to the second"));
            }
            if g.dst(b) != x.s(x1) || g.src(b) != x.s(x2) {
                return Some(format!("{pair}: bracket has the wrong endpoints"));
            }
            if x.bracket(x2, x1).ok() != Some(g.inv(b)) {
                return Some(format!("{pair}: reversed bracket is not the inverse"));
            }
            for &k in h.arrows_from(x.r(x1)) {
                let (y1, y2) = (x.left_mul(k, x1), x.left_mul(k, x2));
                if x.bracket(y1, y2).ok() != Some(b) {
                    return Some(format!("{pair}: not invariant under {}", h.arrow_name(k)));
                }
                for &g1 in g.arrows_to(x.s(y1)) {
                    for &g2 in g.arrows_to(x.s(y2)) {
                        let lhs = x.bracket(x.right_mul(y1, g1), x.right_mul(y2, g2)).ok();
                        let rhs = g.mul(g.mul(g.inv(g1), b), g2);
                        if lhs != Some(rhs) {
                            return Some(format!(
                                "{pair}: not equivariant under ({}, {})",
                                g.arrow_name(g1),
                                g.arrow_name(g2)
                            ));
                        }
                    }
                }
            }
        }
    }
    None
}

/// `⟨ξ|η⟩(g) = Σ_x conj(ξ(x)) η(x·g)`, summed literally.
pub fn inner_literal(xi: &ModuleElement, eta: &ModuleElement) -> BTreeMap<ArrowId, Scalar> {
    let x = xi.corr();
    let mut out = BTreeMap::new();
    for g in x.right().arrow_ids() {
        let mut acc = Scalar::zero();
        for p in x.point_ids() {
            if let Some(q) = x.ract(p, g) {
                acc = &acc + &(&xi.get(p).conj() * &eta.get(q));
            }
        }
        if !acc.is_zero() {
            out.insert(g, acc);
        }
    }
    out
}

pub fn c64(s: &Scalar) -> Complex64 {
    s.to_complex64()
}

/// The regular representation on `ℓ²(G_x)` built from `δ_h δ_l = δ_{hl}`,
/// as nalgebra matrices, one per object.
pub fn regular_blocks(xi: &AlgebraElement) -> Vec<DMatrix<Complex64>> {
    let g = xi.groupoid();
    g.object_ids()
        .map(|x| {
            let basis: Vec<ArrowId> = g.arrow_ids().filter(|&a| g.src(a) == x).collect();
            let pos = |a: ArrowId| basis.iter().position(|&b| b == a).unwrap();
            let mut m = DMatrix::<Complex64>::zeros(basis.len(), basis.len());
            for (col, &l) in basis.iter().enumerate() {
                for (&h, c) in xi.coeffs() {
                    if let Some(hl) = g.comp(h, l) {
                        m[(pos(hl), col)] += c64(c);
                    }
                }
            }
            m
        })
        .collect()
}

/// Largest singular value over all blocks, from nalgebra's SVD.
pub fn norm_oracle(xi: &AlgebraElement) -> f64 {
    regular_blocks(xi)
        .into_iter()
        .filter(|m| m.nrows() > 0)
        .map(|m| m.singular_values().iter().cloned().fold(0.0, f64::max))
        .fold(0.0, f64::max)
}

/// Binary increment on little-endian digit strings, with wrap-around.
pub fn increment(word: &str) -> String {
    let mut digits: Vec<char> = word.chars().collect();
    for d in digits.iter_mut() {
        if *d == '0' {
            *d = '1';
            return digits.into_iter().collect();
        }
        *d = '0';
    }
    digits.into_iter().collect()
}

pub fn arc<T>(t: T) -> Arc<T> {
    Arc::new(t)
}

/// All groupoids and correspondences of the fixture set, shared.
pub fn fixture_groupoids() -> Vec<(&'static str, Arc<FiniteGroupoid>)> {
    grpd_core::fixtures::groupoids()
        .into_iter()
        .map(|(n, g)| (n, Arc::new(g)))
        .collect()
}

pub fn fixture_correspondences() -> Vec<(String, Arc<Correspondence>)> {
    grpd_core::fixtures::correspondences()
        .into_iter()
        .map(|(n, x)| (n, Arc::new(x)))
        .collect()
}

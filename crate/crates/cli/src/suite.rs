//! The corpus runner: every JSON file under a directory, checked according
//! to its kind with a seed derived from the run seed and the file path.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use grpd_core::algebra::operator_norm;
use grpd_core::bicategory::{check_coherence, compose};
use grpd_core::hilbert::{gram_min_eigenvalue, inner, mu, positivity_witness, tensor_inner, Tensor};
use grpd_core::io::{self, FileKind};
use grpd_core::{random, AlgebraElement, Correspondence, FibrationFunctor, FiniteGroupoid, ModuleElement, ProductSystem};
use rand::Rng;
use sha2::{Digest, Sha256};
use walkdir::WalkDir;

use crate::report::{CheckResult, Ctx};

const SAMPLES: usize = 20;
/// Coherence on `X∘X∘X` is skipped above this many points in `X`.
const COHERENCE_LIMIT: usize = 12;
const PATH_DEPTH: usize = 3;

pub fn corpus_files(dir: &Path) -> grpd_core::Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Err(grpd_core::Error::Io(format!("{}: not a directory", dir.display())));
    }
    let mut files = Vec::new();
    for entry in WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| grpd_core::Error::Io(e.to_string()))?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "json") {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}

fn file_seed(seed: u64, rel: &str) -> u64 {
    let digest = Sha256::digest(rel.as_bytes());
    seed ^ u64::from_le_bytes(digest[..8].try_into().expect("eight bytes"))
}

pub fn run_suite(ctx: &mut Ctx, dir: &Path) -> grpd_core::Result<usize> {
    let files = corpus_files(dir)?;
    for path in &files {
        ctx.input(path)?;
        let rel = path.strip_prefix(dir).unwrap_or(path).display().to_string();
        let mut local = Ctx::new(file_seed(ctx.seed, &rel), ctx.timing());
        if let Err(e) = check_file(&mut local, path) {
            local.push(crate::report::Check {
                name: "load".into(),
                status: crate::report::Status::Fail,
                witness: Some(e.to_string()),
                detail: None,
                millis: None,
            });
        }
        for mut c in local.checks {
            c.name = format!("{rel}: {}", c.name);
            ctx.push(c);
        }
    }
    Ok(files.len())
}

fn check_file(ctx: &mut Ctx, path: &Path) -> grpd_core::Result<()> {
    match io::detect_kind(path)? {
        FileKind::Groupoid => {
            if let Some(g) = ctx.validate("groupoid laws", || io::load_groupoid(path))? {
                groupoid_suite(ctx, Arc::new(g))?;
            }
        }
        FileKind::Correspondence => {
            if let Some(x) = ctx.validate("correspondence axioms", || io::load_correspondence(path))? {
                correspondence_suite(ctx, Arc::new(x))?;
            }
        }
        FileKind::Category => {
            ctx.validate("category laws", || io::load_category(path))?;
        }
        FileKind::Fibration => {
            if let Some(f) = ctx.validate("functor", || io::load_fibration(path))? {
                fibration_suite(ctx, &f)?;
            }
        }
        FileKind::KGraph => {
            if let Some(k) = ctx.validate("k-graph", || io::load_kgraph(path))? {
                let f = k.path_category(PATH_DEPTH)?;
                if fibration_suite(ctx, &f)? {
                    ctx.validate("product system", || ProductSystem::new(k.diagram(PATH_DEPTH)?))?;
                }
            }
        }
        FileKind::SelfSimilar => {
            if let Some(a) = ctx.validate("action tables", || io::load_selfsim(path))? {
                if ctx.validate("cocycle identity", || a.check_cocycle())?.is_some() && a.is_finite() {
                    if let Some(x) = ctx.validate("correspondence", || a.to_correspondence())? {
                        correspondence_suite(ctx, Arc::new(x))?;
                    }
                }
                let report = a.faithfulness_report(3, a.depth_bound());
                let detail = if report.is_faithful_to_depth() {
                    format!("faithful on words of length {}", report.depth)
                } else {
                    format!("acting trivially: {}", report.kernel.join("; "))
                };
                ctx.check_with_detail("faithfulness (diagnostic)", || Ok((None, Some(detail))))?;
            }
        }
    }
    Ok(())
}

fn rng(ctx: &Ctx) -> rand_chacha::ChaCha8Rng {
    random::rng(ctx.seed)
}

fn groupoid_suite(ctx: &mut Ctx, g: Arc<FiniteGroupoid>) -> grpd_core::Result<()> {
    let mut rng = rng(ctx);
    let samples: Vec<[AlgebraElement; 3]> = (0..SAMPLES)
        .map(|_| [0, 1, 2].map(|_| random::algebra_element(&mut rng, &g, 5)))
        .collect();
    ctx.check("convolution associative", || {
        for [a, b, c] in &samples {
            if a.convolve(b)?.convolve(c)? != a.convolve(&b.convolve(c)?)? {
                return Ok(Some("(ab)c ≠ a(bc)".into()));
            }
        }
        Ok(None)
    })?;
    ctx.check("involution", || {
        for [a, b, _] in &samples {
            if a.convolve(b)?.involute() != b.involute().convolve(&a.involute())? || a.involute().involute() != *a {
                return Ok(Some("involution is not an anti-automorphism".into()));
            }
        }
        Ok(None)
    })?;
    ctx.check("C*-identity", || {
        for [a, _, _] in &samples {
            let n = operator_norm(a);
            let err = (operator_norm(&a.involute().convolve(a)?) - n * n).abs();
            if err > 1e-9 * (n * n).max(1.0) {
                return Ok(Some(format!("error {err:e}")));
            }
        }
        Ok(None)
    })?;
    Ok(())
}

fn random_tensor(rng: &mut impl Rng, x: &Arc<Correspondence>, y: &Arc<Correspondence>) -> Tensor {
    (0..rng.random_range(1..=3))
        .map(|_| (random::module_element(rng, x, 3), random::module_element(rng, y, 3)))
        .collect()
}

fn correspondence_suite(ctx: &mut Ctx, x: Arc<Correspondence>) -> grpd_core::Result<()> {
    let mut rng = rng(ctx);
    ctx.check("bracket laws", || Ok(x.bracket_law_violation()))?;
    let elements: Vec<ModuleElement> = (0..SAMPLES).map(|_| random::module_element(&mut rng, &x, 6)).collect();
    ctx.check("positivity", || -> CheckResult {
        for xi in &elements {
            let ip = inner(xi, xi)?;
            let sos = positivity_witness(xi).sum_of_squares(AlgebraElement::zero(x.right().clone()))?;
            if sos != ip {
                return Ok(Some("Σ a a* differs from ⟨ξ|ξ⟩".into()));
            }
            if xi.is_zero() != ip.is_zero() {
                return Ok(Some("nonzero ξ with ⟨ξ|ξ⟩ = 0".into()));
            }
            let e = gram_min_eigenvalue(std::slice::from_ref(xi))?;
            if e < -1e-9 {
                return Ok(Some(format!("Gram eigenvalue {e:e}")));
            }
        }
        Ok(None)
    })?;
    if x.left() != x.right() {
        return Ok(());
    }
    let c = compose(&x, &x)?;
    let tensors: Vec<(Tensor, Tensor)> =
        (0..SAMPLES).map(|_| (random_tensor(&mut rng, &x, &x), random_tensor(&mut rng, &x, &x))).collect();
    ctx.check("mu isometric and onto", || -> CheckResult {
        for (t1, t2) in &tensors {
            if inner(&mu(&c, t1)?, &mu(&c, t2)?)? != tensor_inner(&c, t1, t2)? {
                return Ok(Some("inner product not preserved".into()));
            }
        }
        for p in c.corr().point_ids() {
            let (a, b) = c.rep(p);
            let t = vec![(ModuleElement::delta(x.clone(), a), ModuleElement::delta(x.clone(), b))];
            if mu(&c, &t)? != ModuleElement::delta(c.corr().clone(), p) {
                return Ok(Some(format!("δ at {} not hit", c.corr().point_name(p))));
            }
        }
        Ok(None)
    })?;
    if x.len() <= COHERENCE_LIMIT {
        let report = check_coherence(&[x.clone(), x.clone(), x.clone()])?;
        let failed = report.checks.iter().find(|c| !c.passed);
        let detail = Some(format!("{} checks on X∘X∘X", report.checks.len()));
        ctx.check_with_detail("coherence", || {
            Ok((failed.map(|c| format!("{}: {}", c.name, c.witness.clone().unwrap_or_default())), detail))
        })?;
    }
    Ok(())
}

/// Returns whether the functor is a discrete Conduché fibration.
fn fibration_suite(ctx: &mut Ctx, f: &FibrationFunctor) -> grpd_core::Result<bool> {
    let conduche = crate::commands::conduche_checks(ctx, f)?;
    if conduche {
        crate::commands::round_trip_check(ctx, f)?;
    }
    Ok(conduche)
}

//! End-to-end acceptance run: eight criteria, each with a time limit.
//! Prints one PASS/FAIL line per criterion and exits non-zero on failure.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{arc, bracket_law_violation, fixture_correspondences, fixture_groupoids, increment};
use grpd_core::algebra::{operator_norm, structure_constants, RegularRepresentation};
use grpd_core::bicategory::{
    check_associator_naturality, check_coherence, check_unitor_left_naturality, check_unitor_right_naturality,
    compose, horizontal_compose,
};
use grpd_core::diagram::{diagram_to_fibration, fibration_to_diagram};
use grpd_core::fixtures;
use grpd_core::hilbert::{gram_min_eigenvalue, inner, mu, positivity_witness, tensor_inner, two_arrow_isometry, Tensor};
use grpd_core::{random, AlgebraElement, Correspondence, FibrationFunctor, KGraph, ModuleElement, SelfSimilarAction, TwoArrow};
use rand::Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn seed() -> u64 {
    std::env::var("GRPD_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(random::DEFAULT_SEED)
}

fn pool() -> Vec<Arc<grpd_core::FiniteGroupoid>> {
    fixture_groupoids().into_iter().map(|(_, g)| g).collect()
}

fn bracket_laws() -> Outcome {
    let mut rng = random::rng(seed());
    let pool = pool();
    let mut pairs = 0;
    let mut subjects: Vec<(String, Arc<Correspondence>)> = fixture_correspondences();
    for i in 0..50 {
        let h = &pool[rng.random_range(0..pool.len())];
        let g = &pool[rng.random_range(0..pool.len())];
        let x = ok(random::correspondence(&mut rng, h, g, 30))?;
        ensure!(x.len() <= 30, "random correspondence {i} has {} points", x.len());
        subjects.push((format!("random #{i}"), arc(x)));
    }
    for (name, x) in &subjects {
        if let Some(v) = bracket_law_violation(x) {
            return Err(format!("{name}: {v}"));
        }
        pairs += x.len() * x.len();
    }
    Ok(format!("{} correspondences, {pairs} point pairs", subjects.len()))
}

fn random_embedding(rng: &mut impl Rng, x: &Arc<Correspondence>) -> Result<TwoArrow, String> {
    if x.is_empty() {
        return Ok(TwoArrow::identity(x.clone()));
    }
    let start = grpd_core::PointId(rng.random_range(0..x.len()));
    let sub = ok(x.restrict(&x.bi_invariant_closure([start])))?;
    ok(TwoArrow::embedding(arc(sub), x.clone()))
}

fn fixture_chains() -> Vec<(String, Vec<Arc<Correspondence>>)> {
    let named: BTreeMap<String, Arc<Correspondence>> = fixture_correspondences().into_iter().collect();
    let get = |n: &str| named[n].clone();
    let mut chains = Vec::new();
    for (name, x) in &named {
        if x.left() == x.right() {
            chains.push((format!("{name}^4"), vec![x.clone(); 4]));
        }
    }
    chains.push(("O2X 1_PT O2X O2X".into(), vec![get("O2X"), get("1_PT"), get("O2X"), get("O2X")]));
    chains.push(("Z2SWAP 1_Z2 Z2SWAP 1_Z2".into(), vec![get("Z2SWAP"), get("1_Z2"), get("Z2SWAP"), get("1_Z2")]));
    chains
}

fn coherence() -> Outcome {
    let mut rng = random::rng(seed());
    let mut chains = fixture_chains();
    let pool = pool();
    for i in 0..25 {
        chains.push((format!("random chain #{i}"), ok(random::chain(&mut rng, &pool, 4, 8))?));
    }
    let mut checks = 0;
    for (name, chain) in &chains {
        let report = ok(check_coherence(chain))?;
        if let Some(c) = report.checks.iter().find(|c| !c.passed) {
            return Err(format!("{name}: {} fails at {:?}", c.name, c.witness));
        }
        checks += report.checks.len();
        let alphas = chain.iter().map(|x| random_embedding(&mut rng, x)).collect::<Result<Vec<_>, _>>()?;
        for (what, w) in [
            ("left unitor", ok(check_unitor_left_naturality(&alphas[0]))?),
            ("right unitor", ok(check_unitor_right_naturality(&alphas[1]))?),
            ("associator", ok(check_associator_naturality(&alphas[1], &alphas[2], &alphas[3]))?),
        ] {
            ensure!(w.is_none(), "{name}: {what} naturality fails at {w:?}");
            checks += 1;
        }
    }
    Ok(format!("{} chains, {checks} checks", chains.len()))
}

fn algebra() -> Outcome {
    for n in 1..=5 {
        let g = fixtures::pair(n);
        let sc = structure_constants(&g);
        ensure!(sc.arrows.len() == n * n, "PAIR{n} has dimension {}", sc.arrows.len());
        let unit = |name: &str| -> (String, String) {
            let (i, j) = name[1..name.len() - 1].split_once(',').expect("pair arrow name");
            (i.to_owned(), j.to_owned())
        };
        for (a, row) in sc.arrows.iter().zip(&sc.table) {
            for (b, prod) in sc.arrows.iter().zip(row) {
                let ((i, j), (k, l)) = (unit(a), unit(b));
                let expected = (j == k).then(|| format!("({i},{l})"));
                ensure!(prod == &expected, "PAIR{n}: E{a} E{b} gives {prod:?}");
            }
        }
        let rep = RegularRepresentation::new(arc(g));
        ensure!(rep.is_faithful(), "PAIR{n}: regular representation is not faithful");
        let dims: usize = rep.blocks().iter().map(|b| b.dim() * b.dim()).sum();
        ensure!(dims == n * n * n, "PAIR{n}: blocks have total size {dims}");
    }
    let mut rng = random::rng(seed());
    let mut worst: f64 = 0.0;
    for g in [fixtures::z2(), fixtures::pair(3), fixtures::mixed6()] {
        let g = arc(g);
        for _ in 0..100 {
            let x = random::algebra_element(&mut rng, &g, 6);
            let n = operator_norm(&x);
            let lhs = operator_norm(&ok(x.involute().convolve(&x))?);
            let err = (lhs - n * n).abs();
            worst = worst.max(err);
            ensure!(err <= 1e-9, "C*-identity off by {err:e}");
        }
    }
    Ok(format!("matrix units for n <= 5; max C*-identity error {worst:.1e}"))
}

fn positivity() -> Outcome {
    let mut rng = random::rng(seed());
    let mut min_eig = f64::INFINITY;
    for (name, x) in fixture_correspondences() {
        for _ in 0..100 {
            let xi = random::module_element(&mut rng, &x, 6);
            let ip = ok(inner(&xi, &xi))?;
            let w = positivity_witness(&xi);
            let sos = ok(w.sum_of_squares(AlgebraElement::zero(x.right().clone())))?;
            ensure!(sos == ip, "{name}: witness does not reproduce <xi|xi>");
            ensure!(xi.is_zero() == ip.is_zero(), "{name}: nonzero xi with <xi|xi> = 0");
            let family = [xi.clone(), random::module_element(&mut rng, &x, 6)];
            let e = ok(gram_min_eigenvalue(&family))?;
            min_eig = min_eig.min(e);
            ensure!(e >= -1e-9, "{name}: Gram eigenvalue {e:e}");
        }
    }
    Ok(format!("min Gram eigenvalue {min_eig:.2e}"))
}

fn random_tensor(rng: &mut impl Rng, left: &Arc<Correspondence>, right: &Arc<Correspondence>) -> Tensor {
    (0..rng.random_range(1..=3))
        .map(|_| (random::module_element(rng, left, 3), random::module_element(rng, right, 3)))
        .collect()
}

fn mu_isomorphism() -> Outcome {
    let mut rng = random::rng(seed());
    let named = fixture_correspondences();
    let mut pairs = 0;
    for (xn, x) in &named {
        for (yn, y) in &named {
            if x.right() != y.left() {
                continue;
            }
            pairs += 1;
            let c = ok(compose(x, y))?;
            if xn == "O2X" && yn == "O2X" {
                ensure!(c.corr().len() == 4, "O2X∘O2X has {} classes", c.corr().len());
            }
            for _ in 0..10 {
                let (t1, t2) = (random_tensor(&mut rng, x, y), random_tensor(&mut rng, x, y));
                let lhs = ok(inner(&ok(mu(&c, &t1))?, &ok(mu(&c, &t2))?))?;
                ensure!(lhs == ok(tensor_inner(&c, &t1, &t2))?, "{xn}∘{yn}: inner product not preserved");
            }
            for p in c.corr().point_ids() {
                let (a, b) = c.rep(p);
                let t = vec![(ModuleElement::delta(x.clone(), a), ModuleElement::delta(y.clone(), b))];
                ensure!(
                    ok(mu(&c, &t))? == ModuleElement::delta(c.corr().clone(), p),
                    "{xn}∘{yn}: delta at {} not hit",
                    c.corr().point_name(p)
                );
            }
        }
    }
    let alpha = fixtures::o2x_embedding();
    let beta = TwoArrow::identity(alpha.target().clone());
    let hc = ok(horizontal_compose(&alpha, &beta))?;
    let c1 = ok(compose(alpha.source(), beta.source()))?;
    let c2 = ok(compose(alpha.target(), beta.target()))?;
    for _ in 0..20 {
        let t = random_tensor(&mut rng, alpha.source(), beta.source());
        let mapped: Tensor = t
            .iter()
            .map(|(f, g)| Ok((two_arrow_isometry(&alpha, f)?, two_arrow_isometry(&beta, g)?)))
            .collect::<grpd_core::Result<_>>()
            .map_err(|e| e.to_string())?;
        ensure!(
            ok(two_arrow_isometry(&hc, &ok(mu(&c1, &t))?))? == ok(mu(&c2, &mapped))?,
            "naturality square fails for the O2X embedding"
        );
    }
    Ok(format!("{pairs} composable fixture pairs, naturality for {{e1}} ⊂ O2X"))
}

fn round_trip(name: &str, f: &FibrationFunctor) -> Result<(), String> {
    let back = ok(diagram_to_fibration(&ok(fibration_to_diagram(f))?))?;
    let e = f.total();
    let ids = |v: &[String]| v.iter().map(|n| (n.clone(), n.clone())).collect::<BTreeMap<_, _>>();
    ensure!(
        f.is_isomorphic_via(&back, &ids(e.object_names()), &ids(e.morphism_names())),
        "{name}: round trip is not isomorphic"
    );
    Ok(())
}

fn conduche() -> Outcome {
    for (name, spec) in [
        ("O2X", fixtures::o2x_graph()),
        ("KG21 id", fixtures::kg21(false)),
        ("KG21 swap", fixtures::kg21(true)),
    ] {
        let f = ok(ok(KGraph::from_spec(&spec))?.path_category(3))?;
        let report = f.check_conduche();
        ensure!(report.conduche, "{name} rejected: {:?}", report.witness);
        round_trip(name, &f)?;
    }
    let report = fixtures::conduche_counterexample().check_conduche();
    let Some(w) = report.witness.filter(|_| !report.conduche) else {
        return Err("counterexample accepted".into());
    };
    let golden = include_str!("golden/o2x_presentation.txt");
    let emitted = ok(KGraph::from_spec(&fixtures::o2x_graph()))?.presentation().render();
    ensure!(emitted == golden, "O2X presentation differs from the golden file");
    Ok(format!("counterexample witness {} over ({}, {}) with {} lifts", w.morphism, w.lambda, w.rho, w.lifts))
}

fn self_similar() -> Outcome {
    let add = ok(SelfSimilarAction::from_spec(&fixtures::adding_machine()))?;
    let a = ok(add.parse_element("a"))?;
    let mut words = 0;
    for len in 0..=10 {
        for n in 0..1u32 << len {
            let w: String = (0..len).map(|i| if n >> i & 1 == 1 { '1' } else { '0' }).collect();
            let image = add.format_letters(&add.act_on_word(&a, &ok(add.parse_letters(&w))?));
            ensure!(image == increment(&w), "a·{w} = {image}");
            words += 1;
        }
    }
    let report = ok(add.check_cocycle())?;
    ensure!(report.depth == Some(8), "cocycle checked to depth {:?}", report.depth);
    let x = ok(ok(SelfSimilarAction::from_spec(&fixtures::z2_swap()))?.to_correspondence())?;
    let c = x.classify();
    ensure!(c.proper && !c.tight, "Z2 swap classified as {c:?}");
    Ok(format!("{words} words, cocycle to depth 8, Z2 swap proper and not tight"))
}

fn tightness() -> Outcome {
    let mut rng = random::rng(seed());
    let pool = pool();
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| pool[rng.random_range(0..pool.len())].clone();
    for i in 0..25 {
        let (g0, g1, g2) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let x = arc(ok(random::correspondence(&mut rng, &g0, &g1, 12))?);
        let y = arc(ok(random::correspondence(&mut rng, &g1, &g2, 12))?);
        ensure!(x.classify().proper && y.classify().proper, "proper pair {i}: factor not proper");
        let c = ok(compose(&x, &y))?.corr().classify();
        ensure!(c.proper, "proper pair {i}: composite not proper");
    }
    for i in 0..25 {
        let (g0, g1, g2) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let x = arc(ok(random::tight_correspondence(&mut rng, &g0, &g1))?);
        let y = arc(ok(random::tight_correspondence(&mut rng, &g1, &g2))?);
        ensure!(x.classify().tight && y.classify().tight, "tight pair {i}: factor not tight");
        let c = ok(compose(&x, &y))?.corr().classify();
        ensure!(c.proper && c.tight, "tight pair {i}: composite is {c:?}");
    }
    Ok("25 proper pairs, 25 tight pairs".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, u64, fn() -> Outcome); 8] = [
        ("bracket laws", 10, bracket_laws),
        ("bicategory coherence", 30, coherence),
        ("convolution algebra", 20, algebra),
        ("positivity", 20, positivity),
        ("mu isomorphism", 10, mu_isomorphism),
        ("Conduché fibrations", 10, conduche),
        ("self-similar actions", 15, self_similar),
        ("properness and tightness", 10, tightness),
    ];
    println!("acceptance (seed {})", seed());
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let limit = Duration::from_secs(limit);
        let (status, detail) = match outcome {
            Ok(d) if elapsed < limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; over the {}s limit", limit.as_secs())),
            Err(e) => ("FAIL", e),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("{status} {}. {name} [{:.2}s / {}s]: {detail}", i + 1, elapsed.as_secs_f64(), limit.as_secs());
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

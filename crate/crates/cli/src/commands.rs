use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use grpd_core::algebra::{operator_norm, structure_constants};
use grpd_core::bicategory::{check_coherence, compose};
use grpd_core::hilbert::{gram_min_eigenvalue, inner, mu, positivity_witness, tensor_inner, Tensor};
use grpd_core::io::{self, Coefficients, FileKind, TensorFile};
use grpd_core::presentation::cuntz_pimsner_presentation;
use grpd_core::selfsim::DEFAULT_DEPTH;
use grpd_core::{
    AlgebraElement, Correspondence, Error, FibrationFunctor, FiniteGroupoid, KGraph, ModuleElement, ProductSystem,
    Result, SelfSimilarAction,
};
use serde_json::{json, Value};

use crate::report::Ctx;

/// What a command prints: JSON for `--json`, text otherwise.
#[derive(Default)]
pub struct Output {
    pub json: Option<Value>,
    pub text: String,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output { json: Some(json), text: text.into() }
    }
}

fn load_groupoid(ctx: &mut Ctx, path: &Path) -> Result<Option<Arc<FiniteGroupoid>>> {
    ctx.input(path)?;
    Ok(ctx.validate("groupoid laws", || io::load_groupoid(path))?.map(Arc::new))
}

fn load_corr(ctx: &mut Ctx, path: &Path) -> Result<Option<Arc<Correspondence>>> {
    ctx.input(path)?;
    let name = format!("correspondence axioms ({})", path.display());
    Ok(ctx.validate(name, || io::load_correspondence(path))?.map(Arc::new))
}

fn read_input<T: serde::de::DeserializeOwned>(ctx: &mut Ctx, path: &Path) -> Result<T> {
    ctx.input(path)?;
    io::read_json(path)
}

fn coefficients_text(map: &BTreeMap<String, grpd_core::Scalar>) -> String {
    if map.is_empty() {
        return "0\n".into();
    }
    map.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

fn classification_text(x: &Correspondence) -> String {
    let c = x.classify();
    format!(
        "points: {}\norbits: {}\nproper: {}\ntight: {}\n",
        x.len(),
        c.orbits,
        c.proper,
        c.tight
    )
}

pub fn groupoid_validate(ctx: &mut Ctx, file: &Path) -> Result<Output> {
    let Some(g) = load_groupoid(ctx, file)? else { return Ok(Output::default()) };
    Ok(Output::new(
        json!({"objects": g.object_names(), "arrows": g.arrow_names()}),
        format!("objects: {}\narrows: {}\n", g.n_objects(), g.n_arrows()),
    ))
}

pub fn corr_validate(ctx: &mut Ctx, file: &Path) -> Result<Output> {
    let Some(x) = load_corr(ctx, file)? else { return Ok(Output::default()) };
    ctx.check("bracket laws", || Ok(x.bracket_law_violation()))?;
    Ok(Output::new(json!(x.classify()), classification_text(&x)))
}

pub fn corr_bracket(ctx: &mut Ctx, file: &Path, x1: &str, x2: &str) -> Result<Output> {
    let Some(x) = load_corr(ctx, file)? else { return Ok(Output::default()) };
    let (p1, p2) = (x.point(x1)?, x.point(x2)?);
    let Some(b) = ctx.validate("same orbit", || x.bracket(p1, p2))? else { return Ok(Output::default()) };
    let name = x.right().arrow_name(b);
    Ok(Output::new(json!({"bracket": name}), format!("{name}\n")))
}

pub fn corr_classify(ctx: &mut Ctx, file: &Path) -> Result<Output> {
    let Some(x) = load_corr(ctx, file)? else { return Ok(Output::default()) };
    Ok(Output::new(json!(x.classify()), classification_text(&x)))
}

pub fn compose_files(ctx: &mut Ctx, x: &Path, y: &Path, out: Option<&Path>) -> Result<Output> {
    let (Some(x), Some(y)) = (load_corr(ctx, x)?, load_corr(ctx, y)?) else { return Ok(Output::default()) };
    let c = compose(&x, &y)?;
    let file = io::correspondence_to_file(c.corr());
    if let Some(out) = out {
        let text = serde_json::to_string_pretty(&file).map_err(|e| Error::Parse(e.to_string()))? + "\n";
        std::fs::write(out, text).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    }
    let text = format!(
        "fibre product: {}\nclasses: {}\n{}",
        c.fibre_product_len(),
        c.corr().len(),
        c.corr().point_names().iter().map(|p| format!("{p}\n")).collect::<String>()
    );
    Ok(Output::new(
        json!({
            "fibre_product": c.fibre_product_len(),
            "points": c.corr().point_names(),
            "classification": c.corr().classify(),
        }),
        text,
    ))
}

pub fn coherence(ctx: &mut Ctx, files: &[PathBuf]) -> Result<Output> {
    let mut chain = Vec::new();
    for f in files {
        match load_corr(ctx, f)? {
            Some(x) => chain.push(x),
            None => return Ok(Output::default()),
        }
    }
    let report = check_coherence(&chain)?;
    for c in &report.checks {
        ctx.check_with_detail(c.name.clone(), || Ok((c.witness.clone(), Some(format!("{} classes", c.classes)))))?;
    }
    Ok(Output::default())
}

pub fn algebra_norm(ctx: &mut Ctx, groupoid: &Path, element: &Path) -> Result<Output> {
    let Some(g) = load_groupoid(ctx, groupoid)? else { return Ok(Output::default()) };
    let coeffs: Coefficients = read_input(ctx, element)?;
    let xi = AlgebraElement::from_names(g, &coeffs)?;
    let norm = operator_norm(&xi);
    let sq = operator_norm(&xi.involute().convolve(&xi)?);
    ctx.check_with_detail("C*-identity", || {
        let err = (sq - norm * norm).abs();
        let witness = (err > 1e-9 * (norm * norm).max(1.0)).then(|| format!("|‖ξ*ξ‖ - ‖ξ‖²| = {err:e}"));
        Ok((witness, None))
    })?;
    Ok(Output::new(
        json!({"norm": norm, "sup_norm": xi.sup_norm()}),
        format!("{norm}\n"),
    ))
}

pub fn algebra_table(ctx: &mut Ctx, groupoid: &Path) -> Result<Output> {
    let Some(g) = load_groupoid(ctx, groupoid)? else { return Ok(Output::default()) };
    let sc = structure_constants(&g);
    let width = sc.arrows.iter().map(|a| a.chars().count()).max().unwrap_or(1).max(1);
    let pad = |s: &str| format!("{s:<width$}");
    let mut text = format!("{} |", pad(""));
    for a in &sc.arrows {
        text.push(' ');
        text.push_str(&pad(a));
    }
    text.push('\n');
    for (a, row) in sc.arrows.iter().zip(&sc.table) {
        text.push_str(&format!("{} |", pad(a)));
        for p in row {
            text.push(' ');
            text.push_str(&pad(p.as_deref().unwrap_or("-")));
        }
        text.push('\n');
    }
    Ok(Output::new(json!(sc), text.lines().map(|l| l.trim_end().to_owned() + "\n").collect::<String>()))
}

fn module_element(ctx: &mut Ctx, x: &Arc<Correspondence>, path: &Path) -> Result<ModuleElement> {
    let coeffs: Coefficients = read_input(ctx, path)?;
    ModuleElement::from_names(x.clone(), &coeffs)
}

pub fn module_inner(ctx: &mut Ctx, corr: &Path, xi: &Path, eta: &Path) -> Result<Output> {
    let Some(x) = load_corr(ctx, corr)? else { return Ok(Output::default()) };
    let (xi, eta) = (module_element(ctx, &x, xi)?, module_element(ctx, &x, eta)?);
    let ip = inner(&xi, &eta)?.to_names();
    Ok(Output::new(json!(ip), coefficients_text(&ip)))
}

pub fn module_positivity(ctx: &mut Ctx, corr: &Path, xi: &Path) -> Result<Output> {
    let Some(x) = load_corr(ctx, corr)? else { return Ok(Output::default()) };
    let xi = module_element(ctx, &x, xi)?;
    let ip = inner(&xi, &xi)?;
    let w = positivity_witness(&xi);
    let sos = w.sum_of_squares(AlgebraElement::zero(x.right().clone()))?;
    ctx.check("sum of squares", || Ok((sos != ip).then(|| "Σ a a* differs from ⟨ξ|ξ⟩".to_owned())))?;
    ctx.check("definite", || Ok((xi.is_zero() != ip.is_zero()).then(|| "nonzero ξ with ⟨ξ|ξ⟩ = 0".to_owned())))?;
    let eig = gram_min_eigenvalue(std::slice::from_ref(&xi))?;
    ctx.check_with_detail("spectrum", || {
        Ok(((eig < -1e-9).then(|| format!("eigenvalue {eig:e}")), Some(format!("min eigenvalue {eig:.3e}"))))
    })?;
    let slices: Vec<Vec<&str>> = w.slices.iter().map(|s| s.iter().map(|&p| x.point_name(p)).collect()).collect();
    let factors: Vec<_> = w.factors.iter().map(AlgebraElement::to_names).collect();
    let names = ip.to_names();
    Ok(Output::new(
        json!({"inner": names, "slices": slices, "factors": factors}),
        coefficients_text(&names),
    ))
}

pub fn module_mu(ctx: &mut Ctx, x: &Path, y: &Path, tensor: &Path) -> Result<Output> {
    let (Some(x), Some(y)) = (load_corr(ctx, x)?, load_corr(ctx, y)?) else { return Ok(Output::default()) };
    let c = compose(&x, &y)?;
    let file: TensorFile = read_input(ctx, tensor)?;
    let t: Tensor = file
        .iter()
        .map(|[f, g]| Ok((ModuleElement::from_names(x.clone(), f)?, ModuleElement::from_names(y.clone(), g)?)))
        .collect::<Result<_>>()?;
    let image = mu(&c, &t)?;
    let lhs = inner(&image, &image)?;
    let rhs = tensor_inner(&c, &t, &t)?;
    ctx.check("isometry", || Ok((lhs != rhs).then(|| "⟨μt|μt⟩ differs from ⟨t|t⟩".to_owned())))?;
    let names = image.to_names();
    Ok(Output::new(json!(names), coefficients_text(&names)))
}

enum Fibred {
    Fibration(FibrationFunctor),
    Graph(KGraph),
}

fn load_fibred(ctx: &mut Ctx, file: &Path) -> Result<Option<Fibred>> {
    ctx.input(file)?;
    match io::detect_kind(file)? {
        FileKind::Fibration => Ok(ctx.validate("functor", || io::load_fibration(file))?.map(Fibred::Fibration)),
        FileKind::KGraph => Ok(ctx.validate("k-graph", || io::load_kgraph(file))?.map(Fibred::Graph)),
        other => Err(Error::InvalidInput(format!(
            "{}: expected a fibration or k-graph file, found {}",
            file.display(),
            serde_json::to_string(&other).unwrap_or_default()
        ))),
    }
}

pub(crate) fn conduche_checks(ctx: &mut Ctx, f: &FibrationFunctor) -> Result<bool> {
    let report = f.check_conduche();
    let witness = report.witness.as_ref().map(|w| {
        format!("{} has {} lifts over {} after {}", w.morphism, w.lifts, w.rho, w.lambda)
    });
    let detail = Some(format!("{} factorisations", report.checked));
    ctx.check_with_detail("unique factorisation lifting", || Ok((witness, detail)))
}

pub(crate) fn round_trip_check(ctx: &mut Ctx, f: &FibrationFunctor) -> Result<bool> {
    ctx.check("fibration round trip", || {
        let back = grpd_core::diagram::diagram_to_fibration(&grpd_core::diagram::fibration_to_diagram(f)?)?;
        let e = f.total();
        let ids = |v: &[String]| v.iter().map(|n| (n.clone(), n.clone())).collect::<BTreeMap<_, _>>();
        let iso = f.is_isomorphic_via(&back, &ids(e.object_names()), &ids(e.morphism_names()));
        Ok((!iso).then(|| "recovered fibration is not isomorphic".to_owned()))
    })
}

pub fn conduche_check(ctx: &mut Ctx, file: &Path, depth: usize) -> Result<Output> {
    let f = match load_fibred(ctx, file)? {
        None => return Ok(Output::default()),
        Some(Fibred::Fibration(f)) => f,
        Some(Fibred::Graph(k)) => k.path_category(depth)?,
    };
    if conduche_checks(ctx, &f)? {
        round_trip_check(ctx, &f)?;
    }
    let rows = f.row_counts();
    Ok(Output::new(
        json!({"row_counts": rows, "row_finite": f.is_row_finite()}),
        String::new(),
    ))
}

pub fn conduche_present(ctx: &mut Ctx, file: &Path) -> Result<Output> {
    let pres = match load_fibred(ctx, file)? {
        None => return Ok(Output::default()),
        Some(Fibred::Graph(k)) => k.presentation(),
        Some(Fibred::Fibration(f)) => {
            if !conduche_checks(ctx, &f)? {
                return Ok(Output::default());
            }
            cuntz_pimsner_presentation(&f)?
        }
    };
    let text = pres.render();
    Ok(Output::new(json!({"presentation": text}), text))
}

pub fn kgraph_check(ctx: &mut Ctx, file: &Path, depth: usize) -> Result<Output> {
    ctx.input(file)?;
    let Some(k) = ctx.validate("k-graph", || io::load_kgraph(file))? else { return Ok(Output::default()) };
    let f = k.path_category(depth)?;
    if conduche_checks(ctx, &f)? && k.node_groupoid()?.is_space() {
        round_trip_check(ctx, &f)?;
    }
    ctx.validate("product system", || ProductSystem::new(k.diagram(depth)?))?;
    let rows = k.row_counts();
    let text: String = rows.iter().map(|r| format!("{} {} {}\n", r.object, r.morphism, r.count)).collect();
    Ok(Output::new(json!({"k": k.k(), "row_counts": rows}), text))
}

pub fn kgraph_present(ctx: &mut Ctx, file: &Path) -> Result<Output> {
    ctx.input(file)?;
    let Some(k) = ctx.validate("k-graph", || io::load_kgraph(file))? else { return Ok(Output::default()) };
    let text = k.presentation().render();
    Ok(Output::new(json!({"presentation": text}), text))
}

fn load_selfsim(ctx: &mut Ctx, file: &Path, depth: Option<usize>) -> Result<Option<SelfSimilarAction>> {
    ctx.input(file)?;
    let action = ctx.validate("action tables", || io::load_selfsim(file))?;
    Ok(match depth {
        Some(d) => action.map(|a| a.with_depth_bound(d)),
        None => action,
    })
}

pub fn selfsim_act(ctx: &mut Ctx, file: &Path, element: &str, word: &str) -> Result<Output> {
    let Some(a) = load_selfsim(ctx, file, None)? else { return Ok(Output::default()) };
    let g = a.parse_element(element)?;
    let image = a.format_letters(&a.act_on_word(&g, &a.parse_letters(word)?));
    Ok(Output::new(json!({"image": image}), format!("{image}\n")))
}

pub fn selfsim_cocycle(ctx: &mut Ctx, file: &Path, depth: Option<usize>) -> Result<Output> {
    let Some(a) = load_selfsim(ctx, file, depth)? else { return Ok(Output::default()) };
    let Some(report) = ctx.validate("cocycle identity", || a.check_cocycle())? else {
        return Ok(Output::default());
    };
    if a.is_finite() {
        ctx.validate("correspondence", || a.to_correspondence())?;
    }
    Ok(Output::new(json!(report), format!("{report}\n")))
}

pub fn selfsim_faithful(ctx: &mut Ctx, file: &Path, max_len: usize, depth: Option<usize>) -> Result<Output> {
    let Some(a) = load_selfsim(ctx, file, None)? else { return Ok(Output::default()) };
    let report = a.faithfulness_report(max_len, depth.unwrap_or(DEFAULT_DEPTH));
    ctx.check("faithful to depth", || {
        Ok((!report.is_faithful_to_depth()).then(|| format!("acting trivially: {}", report.kernel.join("; "))))
    })?;
    Ok(Output::new(json!(report), String::new()))
}

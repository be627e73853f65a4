//! Cuntz–Pimsner presentations of discrete Conduché fibrations, as data.
//!
//! A presentation has a projection `P_X` per object, a partial isometry
//! `S_α` per morphism and six numbered families of relations. The text form
//! lists generators and then each family, one relation per line, with lines
//! sorted inside every section so that output does not depend on input
//! order.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::category::FibrationFunctor;
use crate::error::{Error, Result};

/// A generator or the adjoint of an isometry.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "name", rename_all = "snake_case")]
pub enum Factor {
    P(String),
    S(String),
    SAdjoint(String),
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::P(x) => write!(f, "P_{x}"),
            Factor::S(a) => write!(f, "S_{a}"),
            Factor::SAdjoint(a) => write!(f, "S_{a}*"),
        }
    }
}

/// A sum of products of generators; the empty sum is `0`.
pub type Expr = Vec<Vec<Factor>>;

fn render_expr(e: &Expr) -> String {
    if e.is_empty() {
        return "0".to_owned();
    }
    e.iter()
        .map(|m| {
            m.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    /// Relation family, `1` to `6`.
    pub family: u8,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", render_expr(&self.lhs), render_expr(&self.rhs))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Presentation {
    pub projections: Vec<String>,
    pub isometries: Vec<String>,
    pub relations: Vec<Relation>,
}

fn p(x: &str) -> Factor {
    Factor::P(x.to_owned())
}

fn s(a: &str) -> Factor {
    Factor::S(a.to_owned())
}

fn sa(a: &str) -> Factor {
    Factor::SAdjoint(a.to_owned())
}

impl Presentation {
    pub(crate) fn new(
        projections: impl IntoIterator<Item = String>,
        isometries: impl IntoIterator<Item = String>,
    ) -> Self {
        let mut projections: Vec<String> = projections.into_iter().collect();
        let mut isometries: Vec<String> = isometries.into_iter().collect();
        projections.sort();
        isometries.sort();
        Presentation {
            projections,
            isometries,
            relations: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, family: u8, lhs: Expr, rhs: Expr) {
        self.relations.push(Relation { family, lhs, rhs });
    }

    /// `P_X P_Y = 0` for all `X < Y`.
    pub(crate) fn push_orthogonal_projections(&mut self) {
        let ps = self.projections.clone();
        for (i, x) in ps.iter().enumerate() {
            for y in &ps[i + 1..] {
                self.push(1, vec![vec![p(x), p(y)]], vec![]);
            }
        }
    }

    pub(crate) fn push_product(&mut self, ab: &str, a: &str, b: &str) {
        self.push(2, vec![vec![s(ab)]], vec![vec![s(a), s(b)]]);
    }

    pub(crate) fn push_commutation(&mut self, lhs: [&str; 2], rhs: [&str; 2]) {
        self.push(
            2,
            vec![vec![s(lhs[0]), s(lhs[1])]],
            vec![vec![s(rhs[0]), s(rhs[1])]],
        );
    }

    pub(crate) fn push_unit(&mut self, x: &str, id: &str) {
        self.push(3, vec![vec![p(x)]], vec![vec![s(id)]]);
    }

    pub(crate) fn push_isometry(&mut self, a: &str, source: &str) {
        self.push(4, vec![vec![sa(a), s(a)]], vec![vec![p(source)]]);
    }

    pub(crate) fn push_orthogonal_ranges(&mut self, b: &str, a: &str) {
        self.push(5, vec![vec![sa(b), s(a)]], vec![]);
    }

    pub(crate) fn push_cuntz_krieger<S: AsRef<str>>(&mut self, x: &str, alphas: &[S]) {
        let mut alphas: Vec<&str> = alphas.iter().map(AsRef::as_ref).collect();
        alphas.sort_unstable();
        let rhs = alphas.iter().map(|a| vec![s(a), sa(a)]).collect();
        self.push(6, vec![vec![p(x)]], rhs);
    }

    /// Relations of one family as canonically sorted lines.
    pub fn family_lines(&self, family: u8) -> Vec<String> {
        let mut lines: Vec<String> = self
            .relations
            .iter()
            .filter(|r| r.family == family)
            .map(ToString::to_string)
            .collect();
        lines.sort();
        lines.dedup();
        lines
    }

    /// Names referenced by relations that are not declared generators.
    pub fn undeclared(&self) -> Vec<String> {
        let ps: BTreeSet<&str> = self.projections.iter().map(String::as_str).collect();
        let ss: BTreeSet<&str> = self.isometries.iter().map(String::as_str).collect();
        let mut out = BTreeSet::new();
        for r in &self.relations {
            for f in r.lhs.iter().chain(&r.rhs).flatten() {
                match f {
                    Factor::P(x) if !ps.contains(x.as_str()) => {
                        out.insert(f.to_string());
                    }
                    Factor::S(a) | Factor::SAdjoint(a) if !ss.contains(a.as_str()) => {
                        out.insert(format!("S_{a}"));
                    }
                    _ => {}
                }
            }
        }
        out.into_iter().collect()
    }

    /// The canonical text form.
    pub fn render(&self) -> String {
        let mut out = String::from("GENERATORS\n");
        for x in &self.projections {
            out.push_str(&format!("P_{x} projection\n"));
        }
        for a in &self.isometries {
            out.push_str(&format!("S_{a} partial-isometry\n"));
        }
        for family in 1..=6 {
            out.push_str(&format!("RELATIONS({family})\n"));
            for line in self.family_lines(family) {
                out.push_str(&line);
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The presentation of a finite discrete Conduché fibration with every
/// relation family instantiated literally. In a truncated total category,
/// relation (2) is only emitted for composites inside the truncation.
pub fn cuntz_pimsner_presentation(f: &FibrationFunctor) -> Result<Presentation> {
    let report = f.check_conduche();
    if let Some(w) = report.witness {
        return Err(Error::NotConduche(format!(
            "{} has {} lifts of {} after {}",
            w.morphism, w.lifts, w.rho, w.lambda
        )));
    }
    let (e, c) = (f.total(), f.base());
    let mut pres = Presentation::new(
        e.object_names().iter().cloned(),
        e.morphism_names().iter().cloned(),
    );
    pres.push_orthogonal_projections();
    for a in e.morphism_ids() {
        for b in e.morphism_ids() {
            if let Some(ab) = e.comp(a, b) {
                pres.push_product(e.morphism_name(ab), e.morphism_name(a), e.morphism_name(b));
            }
        }
    }
    for x in e.object_ids() {
        pres.push_unit(e.object_name(x), e.morphism_name(e.identity(x)));
    }
    for a in e.morphism_ids() {
        pres.push_isometry(e.morphism_name(a), e.object_name(e.src(a)));
        for b in e.morphism_ids() {
            if a != b && f.on_morphism(a) == f.on_morphism(b) {
                pres.push_orthogonal_ranges(e.morphism_name(b), e.morphism_name(a));
            }
        }
    }
    for x in e.object_ids() {
        for g in c.morphism_ids().filter(|&g| c.dst(g) == f.on_object(x)) {
            let alphas: Vec<&str> = e
                .morphism_ids()
                .filter(|&a| e.dst(a) == x && f.on_morphism(a) == g)
                .map(|a| e.morphism_name(a))
                .collect();
            pres.push_cuntz_krieger(e.object_name(x), &alphas);
        }
    }
    Ok(pres)
}

//! Rank-k graphs given by their skeleton: a coloured graph together with
//! factorisation bijections between two-coloured paths, optionally with a
//! self-similar action of a finite group.
//!
//! A path `e f` means `s(e) = r(f)`. The factorisation entry `[[b, c], [c', b']]`
//! identifies the path `b c` with `c' b'`. Paths are kept in normal form,
//! colours ascending, which is reached by swapping adjacent edges whose
//! colours are out of order.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::category::{nk_truncated, nk_word_name, FibrationFunctor, FiniteCategory, RowCount};
use crate::correspondence::{
    graph_correspondence, self_similar_graph_correspondence, PointId, SelfSimilarGraph,
};
use crate::diagram::{chain_diagram, Diagram};
use crate::error::{Error, Result};
use crate::groupoid::{
    group_as_groupoid, space_as_groupoid, space_unit_name, transformation_groupoid, ArrowId,
    FiniteGroupoid, GroupAction, GroupTable, ObjectId,
};
use crate::presentation::Presentation;

/// Total degree up to which path categories are built by default.
pub const DEFAULT_TRUNCATION: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub id: String,
    pub r: String,
    pub s: String,
}

/// Self-similar data. Missing action entries mean the element fixes the
/// vertex or edge; missing restrictions mean the identity element.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupBlock {
    pub elements: Vec<String>,
    /// `mul[i][j]` is the product `elements[i]·elements[j]`.
    pub mul: Vec<Vec<String>>,
    #[serde(default)]
    pub vertices: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub edges: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub restrict: BTreeMap<String, BTreeMap<String, String>>,
}

/// The k-graph file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KGraphSpec {
    pub vertices: Vec<String>,
    /// Edges per colour. Colours are ordered by name.
    pub edges: BTreeMap<String, Vec<EdgeSpec>>,
    #[serde(default)]
    pub factorization: Vec<[[String; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupBlock>,
}

#[derive(Clone, Debug)]
struct SelfSimilarData {
    gamma: Arc<FiniteGroupoid>,
    vertex_action: GroupAction,
    /// Per colour: the self-similar 1-graph on the edges of that colour.
    graphs: Vec<SelfSimilarGraph>,
}

/// A validated k-graph skeleton.
#[derive(Clone, Debug)]
pub struct KGraph {
    vertices: Vec<String>,
    colours: Vec<String>,
    edges: Vec<String>,
    colour: Vec<usize>,
    r: Vec<usize>,
    s: Vec<usize>,
    /// Position of each edge among the edges of its colour.
    local: Vec<usize>,
    by_colour: Vec<Vec<usize>>,
    edge_index: HashMap<String, usize>,
    theta: HashMap<(usize, usize), (usize, usize)>,
    /// Factorisation entries as given, oriented with the lower colour first.
    squares: Vec<([usize; 2], [usize; 2])>,
    selfsim: Option<SelfSimilarData>,
}

fn not_bijective(msg: impl Into<String>) -> Error {
    Error::FactorizationNotBijective(msg.into())
}

impl KGraph {
    pub fn from_spec(spec: &KGraphSpec) -> Result<Self> {
        let mut vertices = spec.vertices.clone();
        vertices.sort();
        let vix: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        if vix.len() != vertices.len() {
            return Err(Error::InvalidInput("duplicate vertex".into()));
        }
        let vertex = |v: &str| {
            vix.get(v)
                .copied()
                .ok_or_else(|| Error::UnknownId(v.to_owned()))
        };
        let colours: Vec<String> = spec.edges.keys().cloned().collect();
        let (mut edges, mut colour, mut r, mut s, mut local) =
            (vec![], vec![], vec![], vec![], vec![]);
        let mut by_colour = vec![Vec::new(); colours.len()];
        for (c, list) in spec.edges.values().enumerate() {
            let mut list: Vec<&EdgeSpec> = list.iter().collect();
            list.sort_by(|a, b| a.id.cmp(&b.id));
            for e in list {
                local.push(by_colour[c].len());
                by_colour[c].push(edges.len());
                edges.push(e.id.clone());
                colour.push(c);
                r.push(vertex(&e.r)?);
                s.push(vertex(&e.s)?);
            }
        }
        let edge_index: HashMap<String, usize> = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i))
            .collect();
        if edge_index.len() != edges.len() {
            return Err(Error::InvalidInput("duplicate edge".into()));
        }
        let mut g = KGraph {
            vertices,
            colours,
            edges,
            colour,
            r,
            s,
            local,
            by_colour,
            edge_index,
            theta: HashMap::new(),
            squares: Vec::new(),
            selfsim: None,
        };
        g.read_factorizations(&spec.factorization)?;
        g.check_hexagons()?;
        if let Some(block) = &spec.group {
            g.selfsim = Some(g.read_group(block)?);
        }
        Ok(g)
    }

    fn edge(&self, name: &str) -> Result<usize> {
        self.edge_index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownId(name.to_owned()))
    }

    fn read_factorizations(&mut self, entries: &[[[String; 2]; 2]]) -> Result<()> {
        for [[b, c], [c2, b2]] in entries {
            let (b, c, c2, b2) = (self.edge(b)?, self.edge(c)?, self.edge(c2)?, self.edge(b2)?);
            let names = || {
                format!(
                    "{} {} = {} {}",
                    self.edges[b], self.edges[c], self.edges[c2], self.edges[b2]
                )
            };
            if self.colour[b] == self.colour[c]
                || self.colour[c2] != self.colour[c]
                || self.colour[b2] != self.colour[b]
            {
                return Err(not_bijective(format!(
                    "{} does not swap two colours",
                    names()
                )));
            }
            if self.s[b] != self.r[c] || self.s[c2] != self.r[b2] {
                return Err(not_bijective(format!(
                    "{} relates paths that are not composable",
                    names()
                )));
            }
            if self.r[b] != self.r[c2] || self.s[c] != self.s[b2] {
                return Err(not_bijective(format!(
                    "{} does not preserve endpoints",
                    names()
                )));
            }
            for (from, to) in [((b, c), (c2, b2)), ((c2, b2), (b, c))] {
                if let Some(&prev) = self.theta.get(&from) {
                    if prev != to {
                        return Err(not_bijective(format!(
                            "path {} {} has two factorisations",
                            self.edges[from.0], self.edges[from.1]
                        )));
                    }
                }
                self.theta.insert(from, to);
            }
            let square = if self.colour[b] < self.colour[c] {
                ([b, c], [c2, b2])
            } else {
                ([c2, b2], [b, c])
            };
            if !self.squares.contains(&square) {
                self.squares.push(square);
            }
        }
        for e in 0..self.edges.len() {
            for f in 0..self.edges.len() {
                if self.colour[e] != self.colour[f]
                    && self.s[e] == self.r[f]
                    && !self.theta.contains_key(&(e, f))
                {
                    return Err(not_bijective(format!(
                        "path {} {} has no factorisation",
                        self.edges[e], self.edges[f]
                    )));
                }
            }
        }
        Ok(())
    }

    fn swap(&self, path: &mut [usize], i: usize) {
        let (a, b) = self.theta[&(path[i], path[i + 1])];
        path[i] = a;
        path[i + 1] = b;
    }

    /// Checks, on every path of three distinct colours in ascending order,
    /// that the two ways of reversing the colour order agree.
    fn check_hexagons(&self) -> Result<()> {
        let k = self.colours.len();
        for c1 in 0..k {
            for c2 in c1 + 1..k {
                for c3 in c2 + 1..k {
                    for &e in &self.by_colour[c1] {
                        for &f in self.by_colour[c2]
                            .iter()
                            .filter(|&&f| self.s[e] == self.r[f])
                        {
                            for &g in self.by_colour[c3]
                                .iter()
                                .filter(|&&g| self.s[f] == self.r[g])
                            {
                                let mut a = [e, f, g];
                                let mut b = a;
                                for i in [0, 1, 0] {
                                    self.swap(&mut a, i);
                                }
                                for i in [1, 0, 1] {
                                    self.swap(&mut b, i);
                                }
                                if a != b {
                                    return Err(Error::HexagonViolation(
                                        [e, f, g].iter().map(|&x| self.edges[x].clone()).collect(),
                                    ));
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn read_group(&self, block: &GroupBlock) -> Result<SelfSimilarData> {
        let gamma = Arc::new(group_as_groupoid(&GroupTable {
            elements: block.elements.clone(),
            mul: block.mul.clone(),
        })?);
        let lookup = |table: &BTreeMap<String, BTreeMap<String, String>>, g: ArrowId, x: &str| {
            table
                .get(gamma.arrow_name(g))
                .and_then(|m| m.get(x))
                .cloned()
        };
        for (g, m) in block
            .vertices
            .iter()
            .chain(&block.edges)
            .chain(&block.restrict)
        {
            gamma.arrow(g)?;
            for (x, y) in m {
                if self.edge_index.get(x).is_none() && !self.vertices.contains(x) {
                    return Err(Error::UnknownId(x.clone()));
                }
                if self.edge_index.get(y).is_none()
                    && !self.vertices.contains(y)
                    && gamma.arrow_id(y).is_none()
                {
                    return Err(Error::UnknownId(y.clone()));
                }
            }
        }
        let vix = |v: &str| self.vertices.iter().position(|w| w == v);
        let vertex_action = GroupAction::new(&gamma, self.vertices.clone(), |g, v| {
            lookup(&block.vertices, g, &self.vertices[v])
                .and_then(|w| vix(&w))
                .unwrap_or(v)
        })?;
        let identity = gamma.unit(ObjectId(0));
        let mut graphs = Vec::with_capacity(self.colours.len());
        for (c, ids) in self.by_colour.iter().enumerate() {
            let names: Vec<String> = ids.iter().map(|&e| self.edges[e].clone()).collect();
            let edge_action = GroupAction::new(&gamma, names.clone(), |g, e| {
                match lookup(&block.edges, g, &names[e]) {
                    None => e,
                    Some(f) => match self.edge_index.get(&f) {
                        Some(&fi) if self.colour[fi] == c => self.local[fi],
                        _ => usize::MAX,
                    },
                }
            })?;
            let phi = |g: ArrowId, e: usize| {
                lookup(&block.restrict, g, &names[e])
                    .and_then(|h| gamma.arrow_id(&h))
                    .unwrap_or(identity)
            };
            graphs.push(SelfSimilarGraph::new(
                gamma.clone(),
                vertex_action.clone(),
                edge_action,
                ids.iter().map(|&e| self.r[e]).collect(),
                ids.iter().map(|&e| self.s[e]).collect(),
                phi,
            )?);
        }
        Ok(SelfSimilarData {
            gamma,
            vertex_action,
            graphs,
        })
    }

    pub fn k(&self) -> usize {
        self.colours.len()
    }

    pub fn colours(&self) -> &[String] {
        &self.colours
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[String] {
        &self.edges
    }

    pub fn is_self_similar(&self) -> bool {
        self.selfsim.is_some()
    }

    /// Sorts a path into ascending colour order.
    pub fn normal_form(&self, mut path: Vec<usize>) -> Vec<usize> {
        loop {
            let Some(i) = (0..path.len().saturating_sub(1))
                .find(|&i| self.colour[path[i]] > self.colour[path[i + 1]])
            else {
                return path;
            };
            self.swap(&mut path, i);
        }
    }

    fn path_name(&self, v: usize, path: &[usize]) -> String {
        if path.is_empty() {
            space_unit_name(&self.vertices[v])
        } else {
            path.iter()
                .map(|&e| self.edges[e].as_str())
                .collect::<Vec<_>>()
                .join(".")
        }
    }

    fn degree(&self, path: &[usize]) -> Vec<usize> {
        let mut d = vec![0; self.k()];
        for &e in path {
            d[self.colour[e]] += 1;
        }
        d
    }

    /// Paths in normal form of total degree at most `max_total`, as
    /// `(range vertex, edges)`; vertices stand for the paths of degree zero.
    fn normal_paths(&self, max_total: usize) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> =
            (0..self.vertices.len()).map(|v| (v, vec![])).collect();
        let mut frontier: Vec<Vec<usize>> = (0..self.edges.len()).map(|e| vec![e]).collect();
        for _ in 0..max_total {
            let mut next = Vec::new();
            for p in frontier {
                let last = *p.last().expect("nonempty");
                for f in 0..self.edges.len() {
                    if self.colour[f] >= self.colour[last] && self.s[last] == self.r[f] {
                        let mut q = p.clone();
                        q.push(f);
                        next.push(q);
                    }
                }
                out.push((self.r[p[0]], p));
            }
            frontier = next;
        }
        out
    }

    /// The path category truncated at total degree `max_total`, with its
    /// degree functor onto the truncation of `ℕᵏ`.
    pub fn path_category(&self, max_total: usize) -> Result<FibrationFunctor> {
        let paths = self.normal_paths(max_total);
        let index: HashMap<&[usize], usize> = paths
            .iter()
            .enumerate()
            .filter(|(_, (_, p))| !p.is_empty())
            .map(|(i, (_, p))| (p.as_slice(), i))
            .collect();
        let ends = |(v, p): &(usize, Vec<usize>)| match (p.first(), p.last()) {
            (Some(&a), Some(&b)) => (self.s[b], self.r[a]),
            _ => (*v, *v),
        };
        let morphisms = paths
            .iter()
            .map(|x| {
                let (s, r) = ends(x);
                (self.path_name(x.0, &x.1), s, r)
            })
            .collect();
        let identity: Vec<usize> = (0..self.vertices.len()).collect();
        let total =
            FiniteCategory::build(self.vertices.clone(), morphisms, identity, true, |f, g| {
                let (pf, pg) = (&paths[f].1, &paths[g].1);
                if pf.is_empty() {
                    return Some(g);
                }
                if pg.is_empty() {
                    return Some(f);
                }
                let mut cat = pf.clone();
                cat.extend(pg);
                index.get(self.normal_form(cat).as_slice()).copied()
            })?;
        let base = nk_truncated(&self.colours, max_total)?;
        let on_objects = vec![base.object("*")?; total.n_objects()];
        let by_name: HashMap<String, usize> = paths
            .iter()
            .map(|x| (self.path_name(x.0, &x.1), self.degree(&x.1)))
            .map(|(n, d)| (n, nk_word_name(&self.colours, &d)))
            .map(|(n, w)| (n, base.morphism(&w).expect("degree inside truncation")))
            .collect();
        let on_morphisms = total
            .morphism_ids()
            .map(|m| by_name[total.morphism_name(m)])
            .collect();
        FibrationFunctor::from_indices(total, base, on_objects, on_morphisms)
    }

    /// Number of edges of each colour into each vertex.
    pub fn row_counts(&self) -> Vec<RowCount> {
        let mut out = Vec::new();
        for (v, name) in self.vertices.iter().enumerate() {
            for (c, colour) in self.colours.iter().enumerate() {
                out.push(RowCount {
                    object: name.clone(),
                    morphism: colour.clone(),
                    count: self.by_colour[c]
                        .iter()
                        .filter(|&&e| self.r[e] == v)
                        .count(),
                });
            }
        }
        out
    }

    /// The node groupoid: the vertex space, or `Γ⋉V` for self-similar data.
    pub fn node_groupoid(&self) -> Result<FiniteGroupoid> {
        match &self.selfsim {
            None => space_as_groupoid(&self.vertices),
            Some(ss) => transformation_groupoid(&ss.gamma, &ss.vertex_action),
        }
    }

    /// The diagram over `ℕᵏ` truncated at `max_total`. The correspondence
    /// over a degree is the composite of the colour correspondences in
    /// ascending colour order, and `σ` sorts paths with the factorisation
    /// bijections.
    pub fn diagram(&self, max_total: usize) -> Result<Diagram> {
        let node = Arc::new(self.node_groupoid()?);
        let mut letters = Vec::with_capacity(self.k());
        let mut canonical = vec![PointId(0); self.edges.len()];
        for (c, ids) in self.by_colour.iter().enumerate() {
            let corr = match &self.selfsim {
                None => graph_correspondence(
                    node.clone(),
                    node.clone(),
                    ids.iter().map(|&e| self.edges[e].clone()).collect(),
                    ids.iter().map(|&e| ObjectId(self.r[e])).collect(),
                    ids.iter().map(|&e| ObjectId(self.s[e])).collect(),
                )?,
                Some(ss) => self_similar_graph_correspondence(&ss.graphs[c], node.clone())?,
            };
            for &e in ids {
                let name = match &self.selfsim {
                    None => self.edges[e].clone(),
                    Some(ss) => format!(
                        "({},{})",
                        self.edges[e],
                        ss.gamma.arrow_name(ss.gamma.unit(ObjectId(0)))
                    ),
                };
                canonical[e] = corr.point(&name)?;
            }
            letters.push(Arc::new(corr));
        }
        let orbit_edge: Vec<Vec<usize>> = letters
            .iter()
            .enumerate()
            .map(|(c, corr)| {
                let orbits = corr.orbits();
                let mut edge_of = vec![usize::MAX; orbits.len()];
                for &e in &self.by_colour[c] {
                    edge_of[orbits.class_of[canonical[e].0]] = e;
                }
                (0..corr.len())
                    .map(|x| edge_of[orbits.class_of[x]])
                    .collect()
            })
            .collect();
        let index = nk_truncated(&self.colours, max_total)?;
        let words = Diagram::nk_words(&self.colours, &index, max_total);
        let reorder = |word: &[usize], mut tuple: Vec<PointId>| -> Result<Vec<PointId>> {
            let n = tuple.len();
            let mut path = Vec::with_capacity(n);
            let mut tail = None;
            for i in 0..n {
                let corr = &letters[word[i]];
                let e = orbit_edge[word[i]][tuple[i].0];
                let eta = corr.bracket(canonical[e], tuple[i])?;
                path.push(e);
                if i + 1 < n {
                    tuple[i + 1] = letters[word[i + 1]].left_mul(eta, tuple[i + 1]);
                } else {
                    tail = Some(eta);
                }
            }
            let path = self.normal_form(path);
            let mut out: Vec<PointId> = path.iter().map(|&e| canonical[e]).collect();
            if let (Some(last), Some(eta)) = (out.last_mut(), tail) {
                let e = path[n - 1];
                *last = letters[self.colour[e]].right_mul(canonical[e], eta);
            }
            Ok(out)
        };
        chain_diagram(index, node, words, &letters, reorder)
    }

    /// The presentation on degree-one generators: `P_v` per vertex and
    /// `S_e` per edge. Relation (2) is given by the factorisation squares,
    /// relation (3) is absorbed by identifying `S_v` with `P_v`, and
    /// relation (6) is imposed for the degree-one morphisms of `ℕᵏ`.
    pub fn presentation(&self) -> Presentation {
        let mut pres = Presentation::new(self.vertices.iter().cloned(), self.edges.iter().cloned());
        pres.push_orthogonal_projections();
        for ([a, b], [c, d]) in &self.squares {
            pres.push_commutation(
                [&self.edges[*a], &self.edges[*b]],
                [&self.edges[*c], &self.edges[*d]],
            );
        }
        for (e, name) in self.edges.iter().enumerate() {
            pres.push_isometry(name, &self.vertices[self.s[e]]);
            for &f in &self.by_colour[self.colour[e]] {
                if f != e {
                    pres.push_orthogonal_ranges(&self.edges[f], name);
                }
            }
        }
        for (v, name) in self.vertices.iter().enumerate() {
            for ids in &self.by_colour {
                let into: Vec<&str> = ids
                    .iter()
                    .filter(|&&e| self.r[e] == v)
                    .map(|&e| self.edges[e].as_str())
                    .collect();
                pres.push_cuntz_krieger(name, &into);
            }
        }
        pres
    }
}

//! Self-similar actions on words.
//!
//! A group acts on an alphabet `A` together with restrictions `g|_x`, and
//! hence on words by `g·(xw) = π_g(x) (g|_x · w)`. The group is either a
//! finite multiplication table or an automaton: generators with a letter
//! permutation and a restriction word each. Automaton elements are group
//! words over generators and their inverses; two of them are considered
//! equal when they act identically on all words up to a depth bound.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::correspondence::{self_similar_group_correspondence, Cocycle, Correspondence};
use crate::error::{Error, Result};
use crate::groupoid::{group_as_groupoid, ArrowId, FiniteGroupoid, GroupTable, ObjectId};

/// Default depth for deciding equality of automaton elements.
pub const DEFAULT_DEPTH: usize = 8;

/// A group word in a file: a list of tokens, or one string of tokens
/// separated by spaces or dots. The empty word is the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordSpec {
    Tokens(Vec<String>),
    Text(String),
}

impl WordSpec {
    pub fn tokens(&self) -> Vec<String> {
        match self {
            WordSpec::Tokens(t) => t.clone(),
            WordSpec::Text(s) => split_tokens(s),
        }
    }
}

fn split_tokens(s: &str) -> Vec<String> {
    s.split(|c: char| c.is_whitespace() || c == '.')
        .filter(|t| !t.is_empty())
        .map(str::to_owned)
        .collect()
}

/// The self-similar action file format. Give `generators` for an automaton
/// or `group` for a finite table. Missing permutation entries fix the letter
/// and missing restrictions are the identity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfSimilarSpec {
    pub alphabet: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupTable>,
    #[serde(default)]
    pub perm: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default)]
    pub restrict: BTreeMap<String, BTreeMap<String, WordSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_bound: Option<usize>,
}

/// A generator or its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token {
    pub generator: usize,
    pub inverse: bool,
}

impl Token {
    fn inv(self) -> Token {
        Token { generator: self.generator, inverse: !self.inverse }
    }
}

/// A freely reduced word over generators and inverses, read as a product:
/// the rightmost token acts first.
pub type GroupWord = Vec<Token>;

fn reduce(word: impl IntoIterator<Item = Token>) -> GroupWord {
    let mut out: GroupWord = Vec::new();
    for t in word {
        if out.last() == Some(&t.inv()) {
            out.pop();
        } else {
            out.push(t);
        }
    }
    out
}

fn inverse_word(w: &[Token]) -> GroupWord {
    w.iter().rev().map(|t| t.inv()).collect()
}

#[derive(Debug)]
struct Automaton {
    generators: Vec<String>,
    /// `perm[s][x]` and its inverse permutation.
    perm: Vec<Vec<usize>>,
    perm_inv: Vec<Vec<usize>>,
    restrict: Vec<Vec<GroupWord>>,
    /// `(word, letter) → (image letter, restriction)`.
    cache: Mutex<HashMap<(GroupWord, usize), (usize, GroupWord)>>,
}

#[derive(Debug, Clone)]
struct FiniteTable {
    group: Arc<FiniteGroupoid>,
    /// `pi[g][x]`, `phi[g][x]`.
    pi: Vec<Vec<usize>>,
    phi: Vec<Vec<ArrowId>>,
}

#[derive(Debug)]
enum Group {
    Automaton(Automaton),
    Finite(FiniteTable),
}

/// A self-similar action, the data `(group, alphabet, π, φ)`.
#[derive(Debug)]
pub struct SelfSimilarAction {
    alphabet: Vec<String>,
    group: Group,
    depth_bound: usize,
}

/// An element of the acting group: a product of group elements, each a
/// generator, an inverse, or a table element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Word(GroupWord),
    Table(ArrowId),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CocycleReport {
    pub verified: bool,
    /// `None` when group equality was decided exactly.
    pub depth: Option<usize>,
    pub pairs: usize,
    pub letters: usize,
}

impl fmt::Display for CocycleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.depth {
            None => write!(f, "cocycle identity verified exactly"),
            Some(d) => write!(f, "cocycle identity verified to depth {d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaithfulnessReport {
    pub max_word_length: usize,
    pub depth: usize,
    /// Nontrivial elements acting trivially on all words of length `depth`.
    pub kernel: Vec<String>,
}

impl FaithfulnessReport {
    pub fn is_faithful_to_depth(&self) -> bool {
        self.kernel.is_empty()
    }
}

fn permutation(alphabet: &[String], name: &str, map: Option<&BTreeMap<String, String>>) -> Result<Vec<usize>> {
    let pos = |l: &str| alphabet.iter().position(|a| a == l).ok_or_else(|| Error::UnknownLetter(l.to_owned()));
    let mut out: Vec<usize> = (0..alphabet.len()).collect();
    if let Some(map) = map {
        for (x, y) in map {
            out[pos(x)?] = pos(y)?;
        }
    }
    let mut seen = vec![false; out.len()];
    for &y in &out {
        if std::mem::replace(&mut seen[y], true) {
            return Err(Error::InvalidInput(format!("letter map of {name} is not a permutation")));
        }
    }
    Ok(out)
}

impl SelfSimilarAction {
    pub fn from_spec(spec: &SelfSimilarSpec) -> Result<Self> {
        let alphabet = spec.alphabet.clone();
        if alphabet.is_empty() {
            return Err(Error::InvalidInput("alphabet is empty".into()));
        }
        let depth_bound = spec.depth_bound.unwrap_or(DEFAULT_DEPTH);
        if depth_bound == 0 {
            return Err(Error::InvalidInput("depth bound must be positive".into()));
        }
        let letter = |l: &str| alphabet.iter().position(|a| a == l).ok_or_else(|| Error::UnknownLetter(l.to_owned()));
        let group = match (&spec.generators, &spec.group) {
            (Some(gens), None) => {
                let known = |n: &String| gens.contains(n);
                if let Some(n) = spec.perm.keys().chain(spec.restrict.keys()).find(|n| !known(n)) {
                    return Err(Error::UnknownId(n.clone()));
                }
                let perm = gens
                    .iter()
                    .map(|g| permutation(&alphabet, g, spec.perm.get(g)))
                    .collect::<Result<Vec<_>>>()?;
                let perm_inv = perm
                    .iter()
                    .map(|p| {
                        let mut inv = vec![0; p.len()];
                        for (x, &y) in p.iter().enumerate() {
                            inv[y] = x;
                        }
                        inv
                    })
                    .collect();
                let mut restrict = vec![vec![Vec::new(); alphabet.len()]; gens.len()];
                for (g, map) in &spec.restrict {
                    let gi = gens.iter().position(|n| n == g).expect("checked above");
                    for (x, w) in map {
                        restrict[gi][letter(x)?] = parse_tokens(gens, &w.tokens())?;
                    }
                }
                Group::Automaton(Automaton {
                    generators: gens.clone(),
                    perm,
                    perm_inv,
                    restrict,
                    cache: Mutex::new(HashMap::new()),
                })
            }
            (None, Some(table)) => {
                let group = Arc::new(group_as_groupoid(table)?);
                if let Some(n) = spec.perm.keys().chain(spec.restrict.keys()).find(|n| group.arrow_id(n).is_none()) {
                    return Err(Error::UnknownId(n.clone()));
                }
                let mut pi = Vec::with_capacity(group.n_arrows());
                let mut phi = Vec::with_capacity(group.n_arrows());
                let e = group.unit(ObjectId(0));
                for g in group.arrow_ids() {
                    let name = group.arrow_name(g);
                    pi.push(permutation(&alphabet, name, spec.perm.get(name))?);
                    let mut row = vec![e; alphabet.len()];
                    if let Some(map) = spec.restrict.get(name) {
                        for (x, w) in map {
                            row[letter(x)?] = table_product(&group, &w.tokens())?;
                        }
                    }
                    phi.push(row);
                }
                Group::Finite(FiniteTable { group, pi, phi })
            }
            _ => {
                return Err(Error::InvalidInput(
                    "give exactly one of `generators` (automaton) and `group` (finite table)".into(),
                ))
            }
        };
        Ok(SelfSimilarAction { alphabet, group, depth_bound })
    }

    /// The action given by a finite cocycle.
    pub fn from_cocycle(c: &Cocycle) -> Self {
        let g = c.group();
        let n = c.alphabet().len();
        SelfSimilarAction {
            alphabet: c.alphabet().to_vec(),
            group: Group::Finite(FiniteTable {
                group: g.clone(),
                pi: g.arrow_ids().map(|h| (0..n).map(|x| c.act(h, x)).collect()).collect(),
                phi: g.arrow_ids().map(|h| (0..n).map(|x| c.restrict(h, x)).collect()).collect(),
            }),
            depth_bound: DEFAULT_DEPTH,
        }
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn depth_bound(&self) -> usize {
        self.depth_bound
    }

    pub fn with_depth_bound(mut self, depth: usize) -> Self {
        self.depth_bound = depth.max(1);
        self
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.group, Group::Finite(_))
    }

    /// Parses a group element: tokens separated by spaces or dots, each a
    /// generator or table element, optionally followed by `^-1`.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let tokens = split_tokens(text);
        match &self.group {
            Group::Automaton(a) => Ok(Element::Word(reduce(parse_tokens(&a.generators, &tokens)?))),
            Group::Finite(t) => Ok(Element::Table(table_product(&t.group, &tokens)?)),
        }
    }

    /// Parses a word over the alphabet. When every letter is one character
    /// the word is read character by character, otherwise letters are
    /// separated by commas or spaces.
    pub fn parse_letters(&self, text: &str) -> Result<Vec<usize>> {
        let single = self.alphabet.iter().all(|a| a.chars().count() == 1);
        let parts: Vec<String> = if single && !text.contains(',') {
            text.chars().filter(|c| !c.is_whitespace()).map(String::from).collect()
        } else {
            text.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(str::to_owned)
                .collect()
        };
        parts
            .iter()
            .map(|l| self.alphabet.iter().position(|a| a == l).ok_or_else(|| Error::UnknownLetter(l.clone())))
            .collect()
    }

    /// Letters joined without separator when all are single characters.
    pub fn format_letters(&self, w: &[usize]) -> String {
        let sep = if self.alphabet.iter().all(|a| a.chars().count() == 1) { "" } else { "," };
        w.iter().map(|&x| self.alphabet[x].as_str()).collect::<Vec<_>>().join(sep)
    }

    pub fn format_element(&self, g: &Element) -> String {
        match (&self.group, g) {
            (Group::Automaton(a), Element::Word(w)) => w
                .iter()
                .map(|t| {
                    let n = &a.generators[t.generator];
                    if t.inverse { format!("{n}^-1") } else { n.clone() }
                })
                .collect::<Vec<_>>()
                .join(" "),
            (Group::Finite(t), Element::Table(g)) => t.group.arrow_name(*g).to_owned(),
            _ => String::from("?"),
        }
    }

    pub fn identity(&self) -> Element {
        match &self.group {
            Group::Automaton(_) => Element::Word(Vec::new()),
            Group::Finite(t) => Element::Table(t.group.unit(ObjectId(0))),
        }
    }

    /// `g·h`.
    pub fn multiply(&self, g: &Element, h: &Element) -> Element {
        match (&self.group, g, h) {
            (Group::Automaton(_), Element::Word(a), Element::Word(b)) => {
                Element::Word(reduce(a.iter().chain(b).copied()))
            }
            (Group::Finite(t), Element::Table(a), Element::Table(b)) => Element::Table(t.group.mul(*a, *b)),
            _ => panic!("elements of different groups"),
        }
    }

    /// `(π_g(x), g|_x)`.
    pub fn act_on_letter(&self, g: &Element, x: usize) -> (usize, Element) {
        match (&self.group, g) {
            (Group::Automaton(a), Element::Word(w)) => {
                let (y, r) = a.step(w, x);
                (y, Element::Word(r))
            }
            (Group::Finite(t), Element::Table(h)) => (t.pi[h.0][x], Element::Table(t.phi[h.0][x])),
            _ => panic!("element of a different group"),
        }
    }

    /// `g·w`, letter by letter through the restrictions.
    pub fn act_on_word(&self, g: &Element, w: &[usize]) -> Vec<usize> {
        let mut state = g.clone();
        let mut out = Vec::with_capacity(w.len());
        for &x in w {
            let (y, next) = self.act_on_letter(&state, x);
            out.push(y);
            state = next;
        }
        out
    }

    /// Whether `g` fixes every word of length `depth`, hence every shorter
    /// word as well.
    pub fn acts_trivially(&self, g: &Element, depth: usize) -> bool {
        self.equal_to_depth(g, &self.identity(), depth)
    }

    /// Whether `g` and `h` agree on all words of length `depth`.
    pub fn equal_to_depth(&self, g: &Element, h: &Element, depth: usize) -> bool {
        if let (Element::Table(a), Element::Table(b)) = (g, h) {
            if a == b {
                return true;
            }
        }
        let n = self.alphabet.len();
        // Walk the tree of words depth first, carrying both states.
        let mut stack = vec![(g.clone(), h.clone(), 0usize)];
        while let Some((a, b, level)) = stack.pop() {
            if level == depth {
                continue;
            }
            for x in 0..n {
                let (ya, ra) = self.act_on_letter(&a, x);
                let (yb, rb) = self.act_on_letter(&b, x);
                if ya != yb {
                    return false;
                }
                if ra != rb {
                    stack.push((ra, rb, level + 1));
                }
            }
        }
        true
    }

    fn generators(&self) -> Vec<Element> {
        match &self.group {
            Group::Automaton(a) => (0..a.generators.len())
                .flat_map(|g| {
                    [false, true].map(|inverse| Element::Word(vec![Token { generator: g, inverse }]))
                })
                .collect(),
            Group::Finite(t) => t.group.arrow_ids().map(Element::Table).collect(),
        }
    }

    /// Verifies `(h₁h₂)|_x = h₁|_{h₂x} · h₂|_x` for all generator pairs
    /// (with inverses) and letters. Table groups are compared exactly,
    /// automaton elements by their action to the depth bound.
    pub fn check_cocycle(&self) -> Result<CocycleReport> {
        let gens = self.generators();
        let n = self.alphabet.len();
        for h1 in &gens {
            for h2 in &gens {
                for x in 0..n {
                    let (_, lhs) = self.act_on_letter(&self.multiply(h1, h2), x);
                    let (y, r2) = self.act_on_letter(h2, x);
                    let (_, r1) = self.act_on_letter(h1, y);
                    let rhs = self.multiply(&r1, &r2);
                    let equal = match (&lhs, &rhs) {
                        (Element::Table(a), Element::Table(b)) => a == b,
                        _ => self.equal_to_depth(&lhs, &rhs, self.depth_bound),
                    };
                    if !equal {
                        return Err(Error::CocycleViolation {
                            h1: self.format_element(h1),
                            h2: self.format_element(h2),
                            x: self.alphabet[x].clone(),
                        });
                    }
                }
            }
        }
        Ok(CocycleReport {
            verified: true,
            depth: (!self.is_finite()).then_some(self.depth_bound),
            pairs: gens.len() * gens.len(),
            letters: n,
        })
    }

    /// Nontrivial group elements of word length at most `max_len` (all
    /// nonidentity elements for a table group) that act trivially on words
    /// of length `depth`.
    pub fn faithfulness_report(&self, max_len: usize, depth: usize) -> FaithfulnessReport {
        let candidates: Vec<Element> = match &self.group {
            Group::Finite(t) => t
                .group
                .arrow_ids()
                .filter(|&g| !t.group.is_unit(g))
                .map(Element::Table)
                .collect(),
            Group::Automaton(a) => {
                let letters: Vec<Token> = (0..a.generators.len())
                    .flat_map(|g| [false, true].map(|inverse| Token { generator: g, inverse }))
                    .collect();
                let mut all = Vec::new();
                let mut layer: Vec<GroupWord> = vec![Vec::new()];
                for _ in 0..max_len {
                    let mut next = Vec::new();
                    for w in &layer {
                        for &t in &letters {
                            if w.last() != Some(&t.inv()) {
                                let mut v = w.clone();
                                v.push(t);
                                next.push(v);
                            }
                        }
                    }
                    all.extend(next.iter().cloned().map(Element::Word));
                    layer = next;
                }
                all
            }
        };
        let kernel = candidates
            .iter()
            .filter(|g| self.acts_trivially(g, depth))
            .map(|g| self.format_element(g))
            .collect();
        FaithfulnessReport { max_word_length: max_len, depth, kernel }
    }

    /// The cocycle of a table group. Fails on automata.
    pub fn to_cocycle(&self) -> Result<Cocycle> {
        match &self.group {
            Group::Automaton(_) => Err(Error::InfiniteGroup),
            Group::Finite(t) => Cocycle::new(
                t.group.clone(),
                self.alphabet.clone(),
                |g, x| t.pi[g.0][x],
                |g, x| t.phi[g.0][x],
            ),
        }
    }

    /// The correspondence `G ← G` on `A × G` of a table group.
    pub fn to_correspondence(&self) -> Result<Correspondence> {
        self_similar_group_correspondence(&self.to_cocycle()?)
    }
}

fn parse_tokens(generators: &[String], tokens: &[String]) -> Result<GroupWord> {
    tokens
        .iter()
        .map(|t| {
            let (name, inverse) = match t.strip_suffix("^-1") {
                Some(n) => (n, true),
                None => (t.as_str(), false),
            };
            generators
                .iter()
                .position(|g| g == name)
                .map(|generator| Token { generator, inverse })
                .ok_or_else(|| Error::UnknownId(name.to_owned()))
        })
        .collect()
}

fn table_product(group: &FiniteGroupoid, tokens: &[String]) -> Result<ArrowId> {
    let mut acc = group.unit(ObjectId(0));
    for t in tokens {
        let g = match t.strip_suffix("^-1") {
            Some(n) => group.inv(group.arrow(n)?),
            None => group.arrow(t)?,
        };
        acc = group.mul(acc, g);
    }
    Ok(acc)
}

impl Automaton {
    /// Image letter and restriction of a reduced word, memoised.
    fn step(&self, w: &[Token], x: usize) -> (usize, GroupWord) {
        let key = (w.to_vec(), x);
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return hit.clone();
        }
        // The rightmost token acts first; restrictions multiply in word order.
        let mut y = x;
        let mut parts: Vec<GroupWord> = Vec::with_capacity(w.len());
        for t in w.iter().rev() {
            let (next, r) = if t.inverse {
                let pre = self.perm_inv[t.generator][y];
                (pre, inverse_word(&self.restrict[t.generator][pre]))
            } else {
                (self.perm[t.generator][y], self.restrict[t.generator][y].clone())
            };
            parts.push(r);
            y = next;
        }
        let restriction = reduce(parts.into_iter().rev().flatten());
        let out = (y, restriction);
        self.cache.lock().expect("cache lock").insert(key, out.clone());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add() -> SelfSimilarAction {
        let spec: SelfSimilarSpec = serde_json::from_str(
            r#"{"alphabet":["0","1"],"generators":["a"],
                "perm":{"a":{"0":"1","1":"0"}},"restrict":{"a":{"0":"","1":"a"}}}"#,
        )
        .unwrap();
        SelfSimilarAction::from_spec(&spec).unwrap()
    }

    #[test]
    fn adding_machine_examples() {
        let a = add();
        let g = a.parse_element("a").unwrap();
        let act = |w: &str| a.format_letters(&a.act_on_word(&g, &a.parse_letters(w).unwrap()));
        assert_eq!(act("000"), "100");
        assert_eq!(act("110"), "001");
        let ginv = a.parse_element("a^-1").unwrap();
        assert_eq!(a.format_letters(&a.act_on_word(&ginv, &a.parse_letters("001").unwrap())), "110");
        assert!(matches!(a.parse_letters("012"), Err(Error::UnknownLetter(_))));
    }

    #[test]
    fn adding_machine_cocycle_and_faithfulness() {
        let a = add();
        assert_eq!(a.check_cocycle().unwrap().depth, Some(8));
        assert!(a.faithfulness_report(4, 6).kernel.is_empty());
        assert!(matches!(a.to_correspondence(), Err(Error::InfiniteGroup)));
    }

    #[test]
    fn z4_through_z2_has_a_kernel() {
        let spec: SelfSimilarSpec = serde_json::from_str(
            r#"{"alphabet":["0","1"],
                "group":{"elements":["e","a","a2","a3"],
                         "mul":[["e","a","a2","a3"],["a","a2","a3","e"],["a2","a3","e","a"],["a3","e","a","a2"]]},
                "perm":{"a":{"0":"1","1":"0"},"a3":{"0":"1","1":"0"}}}"#,
        )
        .unwrap();
        let s = SelfSimilarAction::from_spec(&spec).unwrap();
        assert!(s.check_cocycle().unwrap().depth.is_none());
        assert_eq!(s.faithfulness_report(4, 6).kernel, ["a2"]);
    }
}

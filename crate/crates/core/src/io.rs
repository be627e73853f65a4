//! JSON file formats and loaders.
//!
//! Groupoids, categories and correspondences referenced from another file
//! may be given inline or as a path relative to the referencing file.
//! Groupoids also have short forms: `{"group": table}`, `{"pair": points}`,
//! `{"space": points}` and `{"cyclic": n}`.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::category::{CategorySpec, FibrationFunctor, FiniteCategory, FunctorMaps};
use crate::correspondence::{validate_correspondence, Correspondence, CorrespondenceTables};
use crate::error::{Error, Result};
use crate::groupoid::{
    cyclic_group, group_as_groupoid, pair_groupoid, space_as_groupoid, validate_groupoid, FiniteGroupoid,
    GroupTable, GroupoidSpec,
};
use crate::kgraph::{KGraph, KGraphSpec};
use crate::scalar::Scalar;
use crate::selfsim::{SelfSimilarAction, SelfSimilarSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupoidRef {
    Path(String),
    Group { group: GroupTable },
    Pair { pair: Vec<String> },
    Space { space: Vec<String> },
    Cyclic { cyclic: usize },
    Inline(GroupoidSpec),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CategoryRef {
    Path(String),
    Inline(CategorySpec),
}

/// The correspondence file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrespondenceFile {
    pub left: GroupoidRef,
    pub right: GroupoidRef,
    pub carrier: Vec<String>,
    pub r: BTreeMap<String, String>,
    pub s: BTreeMap<String, String>,
    /// `[h, x, h·x]`.
    pub lact: Vec<[String; 3]>,
    /// `[g, x, x·g]`.
    pub ract: Vec<[String; 3]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CorrespondenceRef {
    Path(String),
    Inline(Box<CorrespondenceFile>),
}

/// The fibration file format: a functor `total → base`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibrationFile {
    pub total: CategoryRef,
    pub base: CategoryRef,
    pub on_objects: BTreeMap<String, String>,
    pub on_morphisms: BTreeMap<String, String>,
}

/// Coefficients keyed by arrow or point name.
pub type Coefficients = BTreeMap<String, Scalar>;

/// A list of simple tensors `ξ ⊗ η`.
pub type TensorFile = Vec<[Coefficients; 2]>;

/// Reads and parses a JSON file.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn join(base: &Path, rel: &str) -> PathBuf {
    base.join(rel)
}

pub fn resolve_groupoid(r: &GroupoidRef, base: &Path) -> Result<FiniteGroupoid> {
    match r {
        GroupoidRef::Path(p) => load_groupoid(&join(base, p)),
        GroupoidRef::Group { group } => group_as_groupoid(group),
        GroupoidRef::Pair { pair } => pair_groupoid(pair),
        GroupoidRef::Space { space } => space_as_groupoid(space),
        GroupoidRef::Cyclic { cyclic } => {
            if *cyclic == 0 {
                return Err(Error::InvalidInput("cyclic group of order zero".into()));
            }
            Ok(cyclic_group(*cyclic))
        }
        GroupoidRef::Inline(spec) => validate_groupoid(spec),
    }
}

/// Loads a groupoid file: any [`GroupoidRef`] form except a bare path.
pub fn load_groupoid(path: &Path) -> Result<FiniteGroupoid> {
    let r: GroupoidRef = read_json(path)?;
    if let GroupoidRef::Path(p) = &r {
        return Err(Error::Parse(format!("{}: expected groupoid tables, found path {p}", path.display())));
    }
    resolve_groupoid(&r, &base_dir(path))
}

pub fn correspondence_from_file(file: &CorrespondenceFile, base: &Path) -> Result<Correspondence> {
    let left = Arc::new(resolve_groupoid(&file.left, base)?);
    let right = if file.right == file.left {
        left.clone()
    } else {
        Arc::new(resolve_groupoid(&file.right, base)?)
    };
    let tables = CorrespondenceTables {
        carrier: file.carrier.clone(),
        r: file.r.clone(),
        s: file.s.clone(),
        lact: file.lact.clone(),
        ract: file.ract.clone(),
    };
    validate_correspondence(left, right, &tables)
}

pub fn resolve_correspondence(r: &CorrespondenceRef, base: &Path) -> Result<Correspondence> {
    match r {
        CorrespondenceRef::Path(p) => load_correspondence(&join(base, p)),
        CorrespondenceRef::Inline(file) => correspondence_from_file(file, base),
    }
}

pub fn load_correspondence(path: &Path) -> Result<Correspondence> {
    let file: CorrespondenceFile = read_json(path)?;
    correspondence_from_file(&file, &base_dir(path))
}

/// The file form of a correspondence, groupoids inline.
pub fn correspondence_to_file(x: &Correspondence) -> CorrespondenceFile {
    let t = x.to_tables();
    CorrespondenceFile {
        left: GroupoidRef::Inline(x.left().to_spec()),
        right: GroupoidRef::Inline(x.right().to_spec()),
        carrier: t.carrier,
        r: t.r,
        s: t.s,
        lact: t.lact,
        ract: t.ract,
    }
}

pub fn resolve_category(r: &CategoryRef, base: &Path) -> Result<FiniteCategory> {
    match r {
        CategoryRef::Path(p) => load_category(&join(base, p)),
        CategoryRef::Inline(spec) => FiniteCategory::from_spec(spec),
    }
}

pub fn load_category(path: &Path) -> Result<FiniteCategory> {
    let spec: CategorySpec = read_json(path)?;
    FiniteCategory::from_spec(&spec)
}

pub fn load_fibration(path: &Path) -> Result<FibrationFunctor> {
    let file: FibrationFile = read_json(path)?;
    let base = base_dir(path);
    let maps = FunctorMaps { on_objects: file.on_objects, on_morphisms: file.on_morphisms };
    FibrationFunctor::new(resolve_category(&file.total, &base)?, resolve_category(&file.base, &base)?, &maps)
}

pub fn load_kgraph(path: &Path) -> Result<KGraph> {
    let spec: KGraphSpec = read_json(path)?;
    KGraph::from_spec(&spec)
}

pub fn load_selfsim(path: &Path) -> Result<SelfSimilarAction> {
    let spec: SelfSimilarSpec = read_json(path)?;
    SelfSimilarAction::from_spec(&spec)
}

/// What a JSON input file describes, judged by its top-level keys.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FileKind {
    Groupoid,
    Correspondence,
    Category,
    Fibration,
    KGraph,
    SelfSimilar,
}

pub fn detect_kind(path: &Path) -> Result<FileKind> {
    let v: serde_json::Value = read_json(path)?;
    let has = |k: &str| v.get(k).is_some();
    Ok(if has("carrier") {
        FileKind::Correspondence
    } else if has("on_morphisms") {
        FileKind::Fibration
    } else if has("vertices") && has("edges") {
        FileKind::KGraph
    } else if has("alphabet") {
        FileKind::SelfSimilar
    } else if has("morphisms") {
        FileKind::Category
    } else if has("arrows") || has("group") || has("pair") || has("space") || has("cyclic") {
        FileKind::Groupoid
    } else {
        return Err(Error::Parse(format!("{}: unrecognised file", path.display())));
    })
}

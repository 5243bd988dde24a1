//! JSON model documents and the plain-text network formats.
//!
//! Documents are canonical: cells are put in canonical order before saving,
//! maps are keyed in sorted order, identity actions and empty entries are
//! left out, so equal models produce identical bytes.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite_category::{CategoryTag, IndexingCategory, MorphismId, ObjectId};
use crate::models::{
    BroadcastGraph, DirectedGraph, DirectedHypergraph, PreorderSSet, SemiSimplicialSet, SimplicialSet, SymmetricSSet,
};
use crate::presheaf::Presheaf;

pub const FORMAT_VERSION: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexDescriptor {
    pub tag: CategoryTag,
    pub truncation: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub format_version: String,
    pub model: String,
    pub index_cat: IndexDescriptor,
    /// Object key to cell labels (`null` for unlabeled cells).
    pub cells: BTreeMap<String, Vec<Option<String>>>,
    /// Morphism key to its action on cells of the target object.
    pub action: BTreeMap<String, Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Graph,
    Hypergraph,
    SemiSimplicialSet,
    SimplicialSet,
    SymmetricSSet,
    BroadcastGraph,
    PreorderSSet,
    BasicGraph,
    Presheaf,
}

impl ModelKind {
    pub const ALL: [ModelKind; 9] = [
        ModelKind::Graph,
        ModelKind::Hypergraph,
        ModelKind::SemiSimplicialSet,
        ModelKind::SimplicialSet,
        ModelKind::SymmetricSSet,
        ModelKind::BroadcastGraph,
        ModelKind::PreorderSSet,
        ModelKind::BasicGraph,
        ModelKind::Presheaf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Graph => "graph",
            ModelKind::Hypergraph => "hypergraph",
            ModelKind::SemiSimplicialSet => "semi_simplicial_set",
            ModelKind::SimplicialSet => "simplicial_set",
            ModelKind::SymmetricSSet => "symmetric_simplicial_set",
            ModelKind::BroadcastGraph => "broadcast_graph",
            ModelKind::PreorderSSet => "preorder_simplicial_set",
            ModelKind::BasicGraph => "basic_graph",
            ModelKind::Presheaf => "presheaf",
        }
    }

    /// The index category a kind requires; `None` accepts any.
    pub fn tag(self) -> Option<CategoryTag> {
        Some(match self {
            ModelKind::Graph => CategoryTag::Graph,
            ModelKind::Hypergraph => CategoryTag::Hyper,
            ModelKind::SemiSimplicialSet => CategoryTag::SemiSimplex,
            ModelKind::SimplicialSet => CategoryTag::Simplex,
            ModelKind::SymmetricSSet => CategoryTag::Symmetric,
            ModelKind::BroadcastGraph => CategoryTag::Broadcast,
            ModelKind::PreorderSSet => CategoryTag::Preorder,
            ModelKind::BasicGraph => CategoryTag::Basic,
            ModelKind::Presheaf => return None,
        })
    }

    pub fn for_tag(tag: CategoryTag) -> ModelKind {
        ModelKind::ALL.into_iter().find(|k| k.tag() == Some(tag)).expect("every tag has a kind")
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown model tag {s:?}")))
    }
}

/// A loaded model of any kind.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnyModel {
    Graph(DirectedGraph),
    Hypergraph(DirectedHypergraph),
    SemiSimplicialSet(SemiSimplicialSet),
    SimplicialSet(SimplicialSet),
    SymmetricSSet(SymmetricSSet),
    BroadcastGraph(BroadcastGraph),
    PreorderSSet(PreorderSSet),
    BasicGraph(Presheaf),
    Presheaf(Presheaf),
}

impl AnyModel {
    /// Wraps a presheaf under `kind`, validating it.
    pub fn new(kind: ModelKind, p: Presheaf) -> Result<Self> {
        if let Some(tag) = kind.tag() {
            if p.index().tag() != tag {
                return Err(Error::CategoryMismatch(format!("{kind} needs {tag}, got {}", p.index().tag())));
            }
        }
        Ok(match kind {
            ModelKind::Graph => AnyModel::Graph(DirectedGraph::from_presheaf(p)?),
            ModelKind::Hypergraph => AnyModel::Hypergraph(DirectedHypergraph::from_presheaf(p)?),
            ModelKind::SemiSimplicialSet => AnyModel::SemiSimplicialSet(SemiSimplicialSet::from_presheaf(p)?),
            ModelKind::SimplicialSet => AnyModel::SimplicialSet(SimplicialSet::from_presheaf(p)?),
            ModelKind::SymmetricSSet => AnyModel::SymmetricSSet(SymmetricSSet::from_presheaf(p)?),
            ModelKind::BroadcastGraph => AnyModel::BroadcastGraph(BroadcastGraph::from_presheaf(p)?),
            ModelKind::PreorderSSet => AnyModel::PreorderSSet(PreorderSSet::from_presheaf(p)?),
            ModelKind::BasicGraph | ModelKind::Presheaf => {
                p.validate().into_result()?;
                if kind == ModelKind::BasicGraph {
                    AnyModel::BasicGraph(p)
                } else {
                    AnyModel::Presheaf(p)
                }
            }
        })
    }

    /// The natural kind for the presheaf's index category.
    pub fn from_presheaf(p: Presheaf) -> Result<Self> {
        AnyModel::new(ModelKind::for_tag(p.index().tag()), p)
    }

    pub fn kind(&self) -> ModelKind {
        match self {
            AnyModel::Graph(_) => ModelKind::Graph,
            AnyModel::Hypergraph(_) => ModelKind::Hypergraph,
            AnyModel::SemiSimplicialSet(_) => ModelKind::SemiSimplicialSet,
            AnyModel::SimplicialSet(_) => ModelKind::SimplicialSet,
            AnyModel::SymmetricSSet(_) => ModelKind::SymmetricSSet,
            AnyModel::BroadcastGraph(_) => ModelKind::BroadcastGraph,
            AnyModel::PreorderSSet(_) => ModelKind::PreorderSSet,
            AnyModel::BasicGraph(_) => ModelKind::BasicGraph,
            AnyModel::Presheaf(_) => ModelKind::Presheaf,
        }
    }

    pub fn presheaf(&self) -> &Presheaf {
        match self {
            AnyModel::Graph(m) => m.presheaf(),
            AnyModel::Hypergraph(m) => m.presheaf(),
            AnyModel::SemiSimplicialSet(m) => m.presheaf(),
            AnyModel::SimplicialSet(m) => m.presheaf(),
            AnyModel::SymmetricSSet(m) => m.presheaf(),
            AnyModel::BroadcastGraph(m) => m.presheaf(),
            AnyModel::PreorderSSet(m) => m.presheaf(),
            AnyModel::BasicGraph(p) | AnyModel::Presheaf(p) => p,
        }
    }

    pub fn into_presheaf(self) -> Presheaf {
        match self {
            AnyModel::Graph(m) => m.into_presheaf(),
            AnyModel::Hypergraph(m) => m.into_presheaf(),
            AnyModel::SemiSimplicialSet(m) => m.into_presheaf(),
            AnyModel::SimplicialSet(m) => m.into_presheaf(),
            AnyModel::SymmetricSSet(m) => m.into_presheaf(),
            AnyModel::BroadcastGraph(m) => m.into_presheaf(),
            AnyModel::PreorderSSet(m) => m.into_presheaf(),
            AnyModel::BasicGraph(p) | AnyModel::Presheaf(p) => p,
        }
    }

    /// The same model with cells in canonical order.
    pub fn canonicalize(&self) -> AnyModel {
        AnyModel::new(self.kind(), self.presheaf().canonicalize()).expect("canonical form of a valid model")
    }
}

/// Largest truncation accepted from documents, keeping category tables small.
pub fn max_truncation(tag: CategoryTag) -> usize {
    match tag {
        CategoryTag::Symmetric | CategoryTag::Broadcast => 4,
        CategoryTag::Preorder => 5,
        CategoryTag::Simplex => 6,
        _ => 16,
    }
}

pub fn to_document(kind: ModelKind, p: &Presheaf) -> ModelDocument {
    let table = p.table();
    let cells = table
        .objects
        .iter()
        .enumerate()
        .filter(|(o, _)| !p.labels_at(*o).is_empty())
        .map(|(o, obj)| (obj.to_string(), p.labels_at(o).to_vec()))
        .collect();
    let action = table
        .morphisms
        .iter()
        .enumerate()
        .filter(|(k, _)| !table.is_identity(*k) && !p.action_at(*k).is_empty())
        .map(|(k, m)| (m.to_string(), p.action_at(k).to_vec()))
        .collect();
    ModelDocument {
        format_version: FORMAT_VERSION.to_string(),
        model: kind.name().to_string(),
        index_cat: IndexDescriptor { tag: p.index().tag(), truncation: p.index().truncation() },
        cells,
        action,
    }
}

/// Builds and validates the model a document describes.
pub fn from_document(doc: &ModelDocument) -> Result<AnyModel> {
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format_version {:?}", doc.format_version)));
    }
    let kind: ModelKind = doc.model.parse()?;
    let IndexDescriptor { tag, truncation } = doc.index_cat;
    if truncation > max_truncation(tag) {
        return Err(Error::Format(format!(
            "truncation {truncation} is above the supported maximum {} for {tag}",
            max_truncation(tag)
        )));
    }
    let index = IndexingCategory::new(tag, truncation);
    let labels =
        doc.cells.iter().map(|(k, v)| Ok((k.parse::<ObjectId>()?, v.clone()))).collect::<Result<BTreeMap<_, _>>>()?;
    let actions = doc
        .action
        .iter()
        .map(|(k, v)| Ok((k.parse::<MorphismId>()?, v.clone())))
        .collect::<Result<BTreeMap<_, _>>>()?;
    AnyModel::new(kind, Presheaf::from_parts(index, labels, actions)?)
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

/// Parses, builds and validates a model document.
pub fn load_model(bytes: &[u8]) -> Result<AnyModel> {
    let doc: ModelDocument = serde_json::from_slice(bytes).map_err(parse_error)?;
    from_document(&doc)
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn save_model(model: &AnyModel) -> Vec<u8> {
    save_presheaf(model.kind(), model.presheaf())
}

pub fn save_presheaf(kind: ModelKind, p: &Presheaf) -> Vec<u8> {
    let doc = to_document(kind, &p.canonicalize());
    let mut out = serde_json::to_vec_pretty(&doc).expect("documents always serialize");
    out.push(b'\n');
    out
}

fn text_lines(bytes: &[u8]) -> Result<Vec<(usize, &str)>> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let before = &bytes[..e.valid_up_to()];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = before.len() - before.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1) + 1;
        Error::Parse { line, column, message: "invalid UTF-8".into() }
    })?;
    let body = text.strip_suffix('\n').unwrap_or(text);
    if body.is_empty() {
        return Ok(Vec::new());
    }
    Ok(body.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l)).enumerate().map(|(k, l)| (k + 1, l)).collect())
}

fn fields(line_no: usize, line: &str) -> Result<Vec<String>> {
    if line.trim().is_empty() {
        return Err(Error::Parse { line: line_no, column: 1, message: "empty line".into() });
    }
    let mut column = 1;
    let mut out = Vec::new();
    for raw in line.split(',') {
        let field = raw.trim();
        if field.is_empty() {
            return Err(Error::Parse { line: line_no, column, message: "empty field".into() });
        }
        out.push(field.to_string());
        column += raw.chars().count() + 1;
    }
    Ok(out)
}

/// One group per line, entities separated by commas; order and duplicates
/// are kept.
pub fn load_groups_csv(bytes: &[u8]) -> Result<Vec<Vec<String>>> {
    text_lines(bytes)?.into_iter().map(|(n, l)| fields(n, l)).collect()
}

/// Vertex names and `(src, dst)` pairs.
pub type EdgeList = (Vec<String>, Vec<(String, String)>);

/// Vertices (in order of first appearance) and `src,dst` edges. A leading
/// `src,dst` header line is skipped.
pub fn load_edges_csv(bytes: &[u8]) -> Result<EdgeList> {
    let mut vertices: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    for (n, line) in text_lines(bytes)? {
        let f = fields(n, line)?;
        if f.len() != 2 {
            return Err(Error::Parse { line: n, column: 1, message: format!("expected 2 fields, found {}", f.len()) });
        }
        if n == 1 && f[0] == "src" && f[1] == "dst" {
            continue;
        }
        for v in &f {
            if !vertices.contains(v) {
                vertices.push(v.clone());
            }
        }
        edges.push((f[0].clone(), f[1].clone()));
    }
    Ok((vertices, edges))
}

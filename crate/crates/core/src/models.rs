//! Named models of higher graphs as thin wrappers over presheaves, with
//! constructors from network data and the usual derived notions.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::finite_category::{preorder_maps, CategoryTag, IndexingCategory, MorphismId, ObjectId};
use crate::kan::{left_kan, restrict, right_kan, ModelFunctor};
use crate::presheaf::{for_each_morphism, CellId, LevelCensus, Presheaf, PresheafMorphism};

macro_rules! model {
    ($(#[$meta:meta])* $name:ident, $tag:expr) => {
        $(#[$meta])*
        #[derive(Clone, Debug, PartialEq, Eq)]
        pub struct $name(Presheaf);

        impl $name {
            pub const TAG: CategoryTag = $tag;

            /// Wraps a presheaf after checking its index category and validity.
            pub fn from_presheaf(p: Presheaf) -> Result<Self> {
                if p.index().tag() != $tag {
                    return Err(Error::CategoryMismatch(format!(
                        "{} needs {}, got {}",
                        stringify!($name),
                        $tag,
                        p.index().tag()
                    )));
                }
                p.validate().into_result()?;
                Ok($name(p))
            }

            pub fn presheaf(&self) -> &Presheaf {
                &self.0
            }

            pub fn into_presheaf(self) -> Presheaf {
                self.0
            }

            pub fn truncation(&self) -> usize {
                self.0.index().truncation()
            }

            /// Restriction along the basic structure of the index category.
            pub fn underlying_basic_graph(&self) -> Result<Presheaf> {
                underlying_basic_graph(&self.0)
            }
        }

        impl AsRef<Presheaf> for $name {
            fn as_ref(&self) -> &Presheaf {
                &self.0
            }
        }
    };
}

model!(
    /// A presheaf over `DeltaG`: vertices, edges, and source and target maps.
    DirectedGraph,
    CategoryTag::Graph
);
model!(
    /// A presheaf over `DeltaH`: each `n`-edge has an ordered tuple of `n` vertices.
    DirectedHypergraph,
    CategoryTag::Hyper
);
model!(SemiSimplicialSet, CategoryTag::SemiSimplex);
model!(SimplicialSet, CategoryTag::Simplex);
model!(SymmetricSSet, CategoryTag::Symmetric);
model!(
    /// A presheaf over `T`. The initial object of `(n)` is the sender and the
    /// other `n` objects are the receivers.
    BroadcastGraph,
    CategoryTag::Broadcast
);
model!(PreorderSSet, CategoryTag::Preorder);

/// `R_f(X)`: restriction along the basic structure `DeltaB -> I`.
pub fn underlying_basic_graph(p: &Presheaf) -> Result<Presheaf> {
    restrict(&ModelFunctor::basic(p.index())?, p)
}

fn label_index<S: AsRef<str>>(names: &[S]) -> Result<HashMap<&str, usize>> {
    let mut index = HashMap::new();
    for (k, n) in names.iter().enumerate() {
        if index.insert(n.as_ref(), k).is_some() {
            return Err(Error::Malformed(format!("vertex {:?} listed twice", n.as_ref())));
        }
    }
    Ok(index)
}

fn lookup(index: &HashMap<&str, usize>, name: &str) -> Result<usize> {
    index.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_string()))
}

impl DirectedGraph {
    /// Vertices and edges in the given order; loops and parallel edges allowed.
    pub fn from_edge_list<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self> {
        let index = label_index(vertices)?;
        let pairs = edges
            .iter()
            .map(|(s, t)| Ok((lookup(&index, s.as_ref())?, lookup(&index, t.as_ref())?)))
            .collect::<Result<Vec<_>>>()?;
        let labels = vertices.iter().map(|v| Some(v.as_ref().to_string())).collect();
        DirectedGraph::from_indices(labels, vec![None; pairs.len()], &pairs)
    }

    pub fn from_indices(
        vertex_labels: Vec<Option<String>>,
        edge_labels: Vec<Option<String>>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        let labels = BTreeMap::from([(ObjectId::Vertex, vertex_labels), (ObjectId::Edge(2), edge_labels)]);
        let actions = BTreeMap::from([
            (MorphismId::leg(1, 2), edges.iter().map(|e| e.0).collect()),
            (MorphismId::leg(2, 2), edges.iter().map(|e| e.1).collect()),
        ]);
        DirectedGraph::from_presheaf(Presheaf::from_parts(
            IndexingCategory::new(CategoryTag::Graph, 2),
            labels,
            actions,
        )?)
    }

    pub fn vertex_count(&self) -> usize {
        self.0.cell_count(&ObjectId::Vertex)
    }

    pub fn edge_count(&self) -> usize {
        self.0.cell_count(&ObjectId::Edge(2))
    }

    /// `(source, target)` vertex indices per edge.
    pub fn endpoints(&self) -> Vec<(usize, usize)> {
        let s = self.0.action(&MorphismId::leg(1, 2)).expect("graph leg");
        let t = self.0.action(&MorphismId::leg(2, 2)).expect("graph leg");
        s.iter().copied().zip(t.iter().copied()).collect()
    }

    pub fn edges(&self) -> Vec<(CellId, CellId)> {
        self.endpoints()
            .into_iter()
            .map(|(s, t)| (CellId::new(ObjectId::Vertex, s), CellId::new(ObjectId::Vertex, t)))
            .collect()
    }

    /// `L_i`: the graph as a 2-uniform hypergraph.
    pub fn to_hypergraph(&self, truncation: usize) -> Result<DirectedHypergraph> {
        let h = ModelFunctor::graph_to_hypergraph(truncation)?;
        DirectedHypergraph::from_presheaf(left_kan(&h, &self.0)?.presheaf)
    }

    /// `∀` along `V ↦ [0], E_2 ↦ [1]`: an `n`-simplex for every tuple of
    /// `n + 1` vertices with a chosen edge `v_k -> v_l` for each `k < l`.
    pub fn clique_completion(&self, truncation: usize, budget: u64) -> Result<SemiSimplicialSet> {
        let h = ModelFunctor::graph_to_semi_simplicial(truncation)?;
        SemiSimplicialSet::from_presheaf(right_kan(&h, &self.0, budget)?.presheaf)
    }

    /// `L` along `V ↦ [0], E_2 ↦ [1]`: the graph as a 1-dimensional
    /// semi-simplicial set.
    pub fn to_semi_simplicial(&self, truncation: usize) -> Result<SemiSimplicialSet> {
        let h = ModelFunctor::graph_to_semi_simplicial(truncation)?;
        SemiSimplicialSet::from_presheaf(left_kan(&h, &self.0)?.presheaf)
    }
}

impl DirectedHypergraph {
    /// One `E_k` cell per `k`-tuple, in input order.
    pub fn from_groups<S: AsRef<str>>(vertices: &[S], groups: &[Vec<S>], truncation: usize) -> Result<Self> {
        let index = label_index(vertices)?;
        let mut by_len: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for g in groups {
            if g.is_empty() {
                return Err(Error::EmptyTuple);
            }
            if g.len() > truncation {
                return Err(Error::TruncationOverflow { level: g.len(), truncation });
            }
            let tuple = g.iter().map(|v| lookup(&index, v.as_ref())).collect::<Result<Vec<_>>>()?;
            by_len.entry(g.len()).or_default().push(tuple);
        }
        let mut labels = BTreeMap::from([(
            ObjectId::Vertex,
            vertices.iter().map(|v| Some(v.as_ref().to_string())).collect::<Vec<_>>(),
        )]);
        let mut actions = BTreeMap::new();
        for (n, tuples) in by_len {
            labels.insert(ObjectId::Edge(n), vec![None; tuples.len()]);
            for i in 1..=n {
                actions.insert(MorphismId::leg(i, n), tuples.iter().map(|t| t[i - 1]).collect());
            }
        }
        DirectedHypergraph::from_presheaf(Presheaf::from_parts(
            IndexingCategory::new(CategoryTag::Hyper, truncation),
            labels,
            actions,
        )?)
    }

    /// Vertices in order of first appearance; truncation defaults to the
    /// longest group (at least 2).
    pub fn from_group_records(groups: &[Vec<String>], truncation: Option<usize>) -> Result<Self> {
        let mut vertices: Vec<&str> = Vec::new();
        for g in groups {
            for v in g {
                if !vertices.contains(&v.as_str()) {
                    vertices.push(v);
                }
            }
        }
        let t = truncation.unwrap_or_else(|| groups.iter().map(Vec::len).max().unwrap_or(0).max(2));
        let groups: Vec<Vec<&str>> = groups.iter().map(|g| g.iter().map(String::as_str).collect()).collect();
        DirectedHypergraph::from_groups(&vertices, &groups, t)
    }

    pub fn vertex_count(&self) -> usize {
        self.0.cell_count(&ObjectId::Vertex)
    }

    /// The vertex tuple of an `E_n` cell.
    pub fn tuple(&self, edge: &CellId) -> Result<Vec<usize>> {
        let ObjectId::Edge(n) = edge.object else {
            return Err(Error::CategoryMismatch(format!("{edge} is not a hyperedge")));
        };
        (1..=n).map(|i| Ok(self.0.apply(&MorphismId::leg(i, n), edge)?.index)).collect()
    }

    /// Every hyperedge with its tuple, ordered by arity and then index.
    pub fn hyperedges(&self) -> Vec<(CellId, Vec<usize>)> {
        (1..=self.truncation())
            .flat_map(|n| self.0.cells(&ObjectId::Edge(n)).collect::<Vec<_>>())
            .map(|c| {
                let t = self.tuple(&c).expect("hyperedge");
                (c, t)
            })
            .collect()
    }

    /// Replaces each tuple by its element set, keeping multiplicity.
    pub fn underlying_undirected(&self) -> UndirectedHypergraph {
        UndirectedHypergraph {
            vertices: vertex_names(&self.0, &ObjectId::Vertex),
            edges: self.hyperedges().into_iter().map(|(_, t)| t.into_iter().collect()).collect(),
        }
    }

    /// Every hyperedge has exactly `k` entries.
    pub fn is_k_uniform(&self, k: usize) -> bool {
        (1..=self.truncation()).all(|n| n == k || self.0.cell_count(&ObjectId::Edge(n)) == 0)
    }

    /// `R_i`: vertices and 2-edges only.
    pub fn to_graph(&self) -> Result<DirectedGraph> {
        let h = ModelFunctor::graph_to_hypergraph(self.truncation())?;
        DirectedGraph::from_presheaf(restrict(&h, &self.0)?)
    }

    /// `L_A` into simplicial sets of truncation one less.
    pub fn to_simplicial(&self) -> Result<SimplicialSet> {
        let h = ModelFunctor::hypergraph_to_simplicial(self.truncation())?;
        SimplicialSet::from_presheaf(left_kan(&h, &self.0)?.presheaf)
    }

    /// Hypergraphs cannot compare edges of different arity, so the answer
    /// is always [`SubEdgeVerdict::NoNotion`]; the tuple facts are reported
    /// alongside.
    pub fn sub_edge_query(&self, e1: &CellId, e2: &CellId) -> Result<SubEdgeAnswer> {
        let (t1, t2) = (self.tuple(e1)?, self.tuple(e2)?);
        let mut facts = Vec::new();
        if e1 == e2 {
            facts.push(TupleFact::SameCell);
        }
        if t1 == t2 {
            facts.push(TupleFact::EqualTuples);
        } else if t2.starts_with(&t1) {
            facts.push(TupleFact::Prefix);
        } else if is_subsequence(&t1, &t2) {
            facts.push(TupleFact::Subsequence);
        }
        if t1.iter().all(|v| t2.contains(v)) {
            facts.push(TupleFact::VertexSubset);
        }
        Ok(SubEdgeAnswer { verdict: SubEdgeVerdict::NoNotion, facts })
    }
}

fn is_subsequence(short: &[usize], long: &[usize]) -> bool {
    let mut it = long.iter();
    short.iter().all(|s| it.any(|l| l == s))
}

fn vertex_names(p: &Presheaf, object: &ObjectId) -> Vec<String> {
    p.cells(object).map(|c| p.label(&c).map_or_else(|| format!("#{}", c.index), str::to_string)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubEdgeVerdict {
    /// The question has no answer in the model ("unask the question").
    NoNotion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TupleFact {
    SameCell,
    EqualTuples,
    /// The first tuple is a proper prefix of the second.
    Prefix,
    /// The first tuple is a proper, non-prefix subsequence of the second.
    Subsequence,
    /// Every vertex of the first tuple occurs in the second.
    VertexSubset,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubEdgeAnswer {
    pub verdict: SubEdgeVerdict,
    pub facts: Vec<TupleFact>,
}

/// Morphisms `source -> target` that send each vertex to the vertex with the
/// same label.
pub fn vertex_preserving_morphisms(
    source: &DirectedHypergraph,
    target: &DirectedHypergraph,
    budget: u64,
) -> Result<Vec<PresheafMorphism>> {
    let (s, t) = (source.presheaf(), target.presheaf());
    let v = s.table().object_index(&ObjectId::Vertex).expect("vertex object");
    let wanted: Vec<Option<usize>> = s
        .labels_at(v)
        .iter()
        .map(|l| l.as_deref().and_then(|l| t.find(&ObjectId::Vertex, l)).map(|c| c.index))
        .collect();
    if wanted.iter().any(Option::is_none) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for_each_morphism(s, t, budget, |c| {
        if c[v].iter().zip(&wanted).all(|(&x, w)| Some(x) == *w) {
            out.push(PresheafMorphism { components: c.to_vec() });
        }
        true
    })?;
    Ok(out)
}

/// Set-level undirected hypergraph: a multiset of non-empty vertex sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedHypergraph {
    pub vertices: Vec<String>,
    pub edges: Vec<BTreeSet<usize>>,
}

impl UndirectedHypergraph {
    pub fn new(vertices: Vec<String>, edges: Vec<BTreeSet<usize>>) -> Result<Self> {
        for e in &edges {
            if e.is_empty() {
                return Err(Error::EmptyTuple);
            }
            if let Some(&v) = e.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::UnknownVertex(format!("#{v}")));
            }
        }
        Ok(UndirectedHypergraph { vertices, edges })
    }

    pub fn is_k_uniform(&self, k: usize) -> bool {
        self.edges.iter().all(|e| e.len() == k)
    }

    /// Sorted tuples under the vertex order.
    pub fn to_directed(&self) -> Result<DirectedHypergraph> {
        let groups: Vec<Vec<&str>> =
            self.edges.iter().map(|e| e.iter().map(|&v| self.vertices[v].as_str()).collect()).collect();
        let t = self.edges.iter().map(BTreeSet::len).max().unwrap_or(0).max(2);
        let vertices: Vec<&str> = self.vertices.iter().map(String::as_str).collect();
        DirectedHypergraph::from_groups(&vertices, &groups, t)
    }
}

/// A ground set with a set of subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiRelation {
    ground: Vec<String>,
    members: BTreeSet<BTreeSet<usize>>,
}

impl MultiRelation {
    /// Positions in `ground` fix the linear order used for simplices.
    pub fn new<S: AsRef<str>, T: AsRef<str>>(ground: &[S], members: &[Vec<T>]) -> Result<Self> {
        let index = label_index(ground)?;
        let members = members
            .iter()
            .map(|m| m.iter().map(|v| lookup(&index, v.as_ref())).collect::<Result<BTreeSet<_>>>())
            .collect::<Result<_>>()?;
        Ok(MultiRelation { ground: ground.iter().map(|s| s.as_ref().to_string()).collect(), members })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn members(&self) -> impl Iterator<Item = &BTreeSet<usize>> {
        self.members.iter()
    }

    /// A member and one of its non-empty subsets that is absent. Larger
    /// members are inspected first; among the faces of a member, the one
    /// dropping the last element comes first.
    pub fn missing_subset(&self) -> Option<(BTreeSet<usize>, BTreeSet<usize>)> {
        let mut ordered: Vec<&BTreeSet<usize>> = self.members.iter().collect();
        ordered.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        for m in ordered {
            if m.len() < 2 {
                continue;
            }
            for v in m.iter().rev() {
                let mut face = m.clone();
                face.remove(v);
                if !self.members.contains(&face) {
                    return Some((m.clone(), face));
                }
            }
        }
        None
    }

    /// Closed under non-empty subsets. The empty set is ignored.
    pub fn is_subset_closed(&self) -> bool {
        self.missing_subset().is_none()
    }

    fn names(&self, s: &BTreeSet<usize>) -> Vec<String> {
        s.iter().map(|&v| self.ground[v].clone()).collect()
    }
}

impl SemiSimplicialSet {
    /// `faces[n - 1][i][x] = d_i^n(x)`.
    pub fn from_face_maps(
        labels: Vec<Vec<Option<String>>>,
        faces: &[Vec<Vec<usize>>],
        truncation: usize,
    ) -> Result<Self> {
        let index = IndexingCategory::new(CategoryTag::SemiSimplex, truncation);
        SemiSimplicialSet::from_presheaf(Presheaf::from_face_maps(index, labels, faces)?)
    }

    /// One `k`-simplex per member of size `k + 1`, vertices ordered as in the
    /// ground set, `d_i` dropping the `i`-th vertex. Labels join the vertex
    /// names, with commas unless every name is a single character.
    pub fn from_multi_relation(r: &MultiRelation, truncation: Option<usize>) -> Result<Self> {
        if let Some((member, missing)) = r.missing_subset() {
            return Err(Error::NotSubsetClosed { member: r.names(&member), missing: r.names(&missing) });
        }
        let top = r.members.iter().map(BTreeSet::len).max().unwrap_or(1).saturating_sub(1);
        let t = truncation.unwrap_or(top.max(1));
        if top > t {
            return Err(Error::TruncationOverflow { level: top, truncation: t });
        }
        let separator = if r.ground.iter().all(|g| g.chars().count() == 1) { "" } else { "," };
        let mut levels: Vec<Vec<Vec<usize>>> = vec![Vec::new(); t + 1];
        for m in r.members.iter().filter(|m| !m.is_empty()) {
            levels[m.len() - 1].push(m.iter().copied().collect());
        }
        let position: Vec<HashMap<&Vec<usize>, usize>> =
            levels.iter().map(|l| l.iter().enumerate().map(|(k, s)| (s, k)).collect()).collect();
        let faces: Vec<Vec<Vec<usize>>> = (1..=t)
            .map(|n| {
                (0..=n)
                    .map(|i| {
                        levels[n]
                            .iter()
                            .map(|s| {
                                let mut face = s.clone();
                                face.remove(i);
                                position[n - 1][&face]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let labels = levels
            .iter()
            .map(|l| {
                l.iter()
                    .map(|s| Some(s.iter().map(|&v| r.ground[v].as_str()).collect::<Vec<_>>().join(separator)))
                    .collect()
            })
            .collect();
        SemiSimplicialSet::from_face_maps(labels, &faces, t)
    }

    pub fn face(&self, n: usize, i: usize, cell: usize) -> Result<usize> {
        Ok(self.0.apply(&MorphismId::coface(n, i), &CellId::new(ObjectId::Ordinal(n), cell))?.index)
    }

    /// Vertices `X_0`, edges `X_1` with source `d_1` and target `d_0`.
    pub fn one_skeleton(&self) -> Result<DirectedGraph> {
        let p = &self.0;
        if self.truncation() == 0 {
            let labels = p.labels_at(0).to_vec();
            return DirectedGraph::from_indices(labels, Vec::new(), &[]);
        }
        let h = ModelFunctor::graph_to_semi_simplicial(self.truncation())?;
        DirectedGraph::from_presheaf(restrict(&h, p)?)
    }

    /// `c` and every iterated face of it: `c` first, then by decreasing
    /// dimension and increasing index.
    pub fn subsimplices(&self, c: &CellId) -> Result<Vec<CellId>> {
        let p = &self.0;
        let table = p.table();
        let o = table.object_index(&c.object).ok_or_else(|| Error::UnknownObject {
            tag: p.index().tag(),
            truncation: self.truncation(),
            object: c.object.clone(),
        })?;
        if c.index >= p.labels_at(o).len() {
            return Err(Error::Malformed(format!("no cell {c}")));
        }
        let mut found: BTreeSet<(std::cmp::Reverse<usize>, usize)> = BTreeSet::new();
        for &m in &table.incoming[o] {
            let a = table.src[m];
            found.insert((std::cmp::Reverse(a), p.action_at(m)[c.index]));
        }
        found.remove(&(std::cmp::Reverse(o), c.index));
        let mut out = vec![c.clone()];
        out.extend(found.into_iter().map(|(std::cmp::Reverse(a), x)| CellId::new(table.objects[a].clone(), x)));
        Ok(out)
    }

    /// Left Kan extension along `DeltaGt -> Sigma`, with the census of the
    /// result and the permutation-closure counts for comparison.
    pub fn symmetrize(&self) -> Result<Symmetrization> {
        let h = ModelFunctor::semi_simplicial_to_symmetric(self.truncation())?;
        let model = SymmetricSSet::from_presheaf(left_kan(&h, &self.0)?.presheaf)?;
        let census = model.presheaf().census();
        Ok(Symmetrization { model, census, permutation_closure: self.permutation_closure_counts() })
    }

    /// `(k + 1)! |X_k|`: every simplex listed under all vertex orders.
    pub fn permutation_closure_counts(&self) -> Vec<usize> {
        self.0.cell_counts().iter().enumerate().map(|(k, &n)| (1..=k + 1).product::<usize>() * n).collect()
    }

    /// Left Kan extension along `DeltaGt -> DeltaGe`: adds degeneracies.
    pub fn to_simplicial(&self) -> Result<SimplicialSet> {
        let h = ModelFunctor::semi_simplicial_to_simplicial(self.truncation())?;
        SimplicialSet::from_presheaf(left_kan(&h, &self.0)?.presheaf)
    }
}

#[derive(Clone, Debug)]
pub struct Symmetrization {
    pub model: SymmetricSSet,
    pub census: Vec<LevelCensus>,
    pub permutation_closure: Vec<usize>,
}

impl SimplicialSet {
    pub fn from_semi_simplicial(x: &SemiSimplicialSet) -> Result<Self> {
        x.to_simplicial()
    }

    /// `R_A` into hypergraphs of truncation one more.
    pub fn to_hypergraph(&self) -> Result<DirectedHypergraph> {
        let h = ModelFunctor::hypergraph_to_simplicial(self.truncation() + 1)?;
        DirectedHypergraph::from_presheaf(restrict(&h, &self.0)?)
    }
}

impl BroadcastGraph {
    /// Builds the basic graph with one `E_{n+1}` per broadcast (sender first,
    /// then receivers) and extends it along the basic structure of `T`.
    pub fn from_events<S: AsRef<str>>(entities: &[S], broadcasts: &[(S, Vec<S>)], truncation: usize) -> Result<Self> {
        let index = label_index(entities)?;
        let target = IndexingCategory::new(CategoryTag::Broadcast, truncation);
        let bound = target.basic_bound();
        let mut by_len: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for (sender, receivers) in broadcasts {
            if receivers.is_empty() {
                return Err(Error::EmptyTuple);
            }
            if receivers.len() > truncation {
                return Err(Error::TruncationOverflow { level: receivers.len(), truncation });
            }
            let mut tuple = vec![lookup(&index, sender.as_ref())?];
            for r in receivers {
                tuple.push(lookup(&index, r.as_ref())?);
            }
            by_len.entry(tuple.len()).or_default().push(tuple);
        }
        let mut labels = BTreeMap::from([(
            ObjectId::Vertex,
            entities.iter().map(|v| Some(v.as_ref().to_string())).collect::<Vec<_>>(),
        )]);
        let mut actions = BTreeMap::new();
        for (n, tuples) in by_len {
            labels.insert(ObjectId::Edge(n), vec![None; tuples.len()]);
            for i in 1..=n {
                actions.insert(MorphismId::leg(i, n), tuples.iter().map(|t| t[i - 1]).collect());
            }
        }
        let basic = Presheaf::from_parts(IndexingCategory::new(CategoryTag::Basic, bound), labels, actions)?;
        let h = ModelFunctor::basic(&target)?;
        BroadcastGraph::from_presheaf(left_kan(&h, &basic)?.presheaf)
    }

    /// Broadcast cells: one per maximal cell orbit above level 0.
    pub fn events(&self) -> Vec<CellId> {
        self.0.maximal_cells().into_iter().filter(|c| c.object.level() > 0).collect()
    }

    /// Sender followed by receivers of a cell at `(n)`.
    pub fn participants(&self, cell: &CellId) -> Result<Vec<usize>> {
        let n = cell.object.level();
        (0..=n)
            .map(|k| {
                Ok(self.0.apply(&MorphismId::new(ObjectId::Ordinal(0), cell.object.clone(), vec![k]), cell)?.index)
            })
            .collect()
    }
}

impl PreorderSSet {
    /// Each operation is a list of blocks of entities, ranked in order. A
    /// cell at a preorder `P` is a tuple of entities realized by some
    /// order-preserving map from `P` into some operation; operations are
    /// glued along the tuples they share. Every entity is a 0-cell.
    pub fn from_operations<S: AsRef<str>>(
        entities: &[S],
        operations: &[Vec<Vec<S>>],
        truncation: usize,
    ) -> Result<Self> {
        let index = label_index(entities)?;
        let category = IndexingCategory::new(CategoryTag::Preorder, truncation);
        let table = category.category.table();
        let mut cells: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); table.objects.len()];
        let unit = table.object_index(&ObjectId::Preorder(vec![1])).expect("point");
        cells[unit].extend((0..entities.len()).map(|e| vec![e]));
        for op in operations {
            if op.iter().any(Vec::is_empty) || op.is_empty() {
                return Err(Error::EmptyTuple);
            }
            let members: Vec<usize> = op.iter().flatten().map(|v| lookup(&index, v.as_ref())).collect::<Result<_>>()?;
            let shape = ObjectId::Preorder(op.iter().map(Vec::len).collect());
            for (o, object) in table.objects.iter().enumerate() {
                for map in preorder_maps(object, &shape) {
                    cells[o].insert(map.iter().map(|&p| members[p]).collect());
                }
            }
        }
        let lists: Vec<Vec<Vec<usize>>> = cells.into_iter().map(|s| s.into_iter().collect()).collect();
        let position: Vec<HashMap<&Vec<usize>, usize>> =
            lists.iter().map(|l| l.iter().enumerate().map(|(k, t)| (t, k)).collect()).collect();
        let labels = lists
            .iter()
            .enumerate()
            .map(|(o, l)| l.iter().map(|t| (o == unit).then(|| entities[t[0]].as_ref().to_string())).collect())
            .collect();
        let actions = table
            .morphisms
            .iter()
            .enumerate()
            .map(|(k, m)| {
                let a = table.src[k];
                lists[table.dst[k]]
                    .iter()
                    .map(|t| position[a][&m.data.iter().map(|&p| t[p]).collect::<Vec<_>>()])
                    .collect()
            })
            .collect();
        PreorderSSet::from_presheaf(Presheaf::from_raw(category, labels, actions))
    }
}

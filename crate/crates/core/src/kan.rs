//! Change of model: restriction, left and right Kan extensions along a
//! functor of indexing categories, and checks of the two adjunctions
//! `L_h ⊣ R_h ⊣ ∀_h`.
//!
//! Both extensions are computed pointwise over the truncated categories, so
//! the adjunctions hold exactly for the computed values. Whether a computed
//! level also agrees with the untruncated extension is reported separately as
//! [`Exactness`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finite_category::{CategoryTable, CategoryTag, FiniteCategory, IndexingCategory, MorphismId, ObjectId};
use crate::presheaf::{enumerate_morphisms, for_each_morphism, Presheaf, PresheafMorphism};

/// A functor between indexing categories, stored as index maps between the
/// tables of its truncated source and target.
#[derive(Clone, Debug)]
pub struct ModelFunctor {
    name: String,
    source: IndexingCategory,
    target: IndexingCategory,
    source_table: Arc<CategoryTable>,
    target_table: Arc<CategoryTable>,
    object_map: Vec<usize>,
    morphism_map: Vec<usize>,
    /// Images of the source objects one level past the truncation, when the
    /// object rule covers them.
    beyond: Option<Vec<ObjectId>>,
}

impl ModelFunctor {
    /// Builds a functor from rules and checks identities and composition.
    pub fn from_rules(
        name: impl Into<String>,
        source: IndexingCategory,
        target: IndexingCategory,
        objects: impl Fn(&ObjectId) -> Option<ObjectId>,
        morphisms: impl Fn(&MorphismId) -> Option<MorphismId>,
    ) -> Result<Self> {
        let name = name.into();
        let source_table = source.category.table();
        let target_table = target.category.table();
        let overflow = |o: &ObjectId| Error::TruncationOverflow { level: o.level(), truncation: target.truncation() };
        let mut object_map = Vec::with_capacity(source_table.objects.len());
        for o in &source_table.objects {
            let image = objects(o).ok_or_else(|| Error::NotAFunctor(format!("{name}: no image for {o}")))?;
            object_map.push(target_table.object_index(&image).ok_or_else(|| overflow(&image))?);
        }
        let mut morphism_map = Vec::with_capacity(source_table.morphisms.len());
        for (k, m) in source_table.morphisms.iter().enumerate() {
            let image = morphisms(m).ok_or_else(|| Error::NotAFunctor(format!("{name}: no image for {m}")))?;
            let idx = target_table
                .morphism_index(&image)
                .ok_or_else(|| Error::NotAFunctor(format!("{name}: {m} maps to non-morphism {image}")))?;
            if target_table.src[idx] != object_map[source_table.src[k]]
                || target_table.dst[idx] != object_map[source_table.dst[k]]
            {
                return Err(Error::NotAFunctor(format!("{name}: image of {m} has the wrong endpoints")));
            }
            if source_table.is_identity(k) && !target_table.is_identity(idx) {
                return Err(Error::NotAFunctor(format!("{name}: identity {m} maps to {image}")));
            }
            morphism_map.push(idx);
        }
        let comp = source_table.composition();
        for f in 0..source_table.morphisms.len() {
            for &g in &source_table.outgoing[source_table.dst[f]] {
                if let Some(gf) = comp.get(g, f) {
                    if target_table.compose(morphism_map[g], morphism_map[f]) != morphism_map[gf] {
                        return Err(Error::NotAFunctor(format!(
                            "{name}: composite {} of {} after {} is not preserved",
                            source_table.morphisms[gf], source_table.morphisms[g], source_table.morphisms[f]
                        )));
                    }
                }
            }
        }
        let next = FiniteCategory::new(source.tag(), source.truncation() + 1);
        let beyond = next.objects().into_iter().filter(|o| !source.category.contains(o)).map(|o| objects(&o)).collect();
        Ok(ModelFunctor { name, source, target, source_table, target_table, object_map, morphism_map, beyond })
    }

    pub fn identity(index: IndexingCategory) -> Self {
        let cat = index.category;
        ModelFunctor::from_rules(
            "identity",
            index.clone(),
            index,
            |o| cat.contains(o).then(|| o.clone()),
            |m| Some(m.clone()),
        )
        .expect("the identity is a functor")
    }

    /// `i: DeltaG -> DeltaH`, the inclusion of graphs into hypergraphs.
    pub fn graph_to_hypergraph(truncation: usize) -> Result<Self> {
        ModelFunctor::from_rules(
            "i",
            IndexingCategory::new(CategoryTag::Graph, truncation),
            IndexingCategory::new(CategoryTag::Hyper, truncation.max(2)),
            |o| Some(o.clone()),
            |m| Some(m.clone()),
        )
    }

    /// `A: DeltaH(t) -> DeltaGe(t - 1)`, sending `E_n` to `[n-1]` and the
    /// leg `v_i^n` to the vertex `i - 1`.
    pub fn hypergraph_to_simplicial(truncation: usize) -> Result<Self> {
        edges_to_ordinals("A", CategoryTag::Hyper, truncation, CategoryTag::Simplex)
    }

    /// `DeltaH(t) -> DeltaGt(t - 1)`, the same assignment into strictly
    /// increasing maps.
    pub fn hypergraph_to_semi_simplicial(truncation: usize) -> Result<Self> {
        edges_to_ordinals("hypergraph-semisset", CategoryTag::Hyper, truncation, CategoryTag::SemiSimplex)
    }

    /// `DeltaG -> DeltaGt(t)`: `V ↦ [0]`, `E_2 ↦ [1]`, source leg to `d_1`.
    pub fn graph_to_semi_simplicial(truncation: usize) -> Result<Self> {
        let target = IndexingCategory::new(CategoryTag::SemiSimplex, truncation.max(1));
        ModelFunctor::from_rules(
            "skeletal",
            IndexingCategory::new(CategoryTag::Graph, 2),
            target,
            |o| match o {
                ObjectId::Vertex => Some(ObjectId::Ordinal(0)),
                ObjectId::Edge(2) => Some(ObjectId::Ordinal(1)),
                _ => None,
            },
            edge_morphism_to_ordinal,
        )
    }

    /// `DeltaGt(t) -> Sigma(t)`, the inclusion of strictly increasing maps.
    pub fn semi_simplicial_to_symmetric(truncation: usize) -> Result<Self> {
        ordinal_inclusion("symmetric", CategoryTag::SemiSimplex, CategoryTag::Symmetric, truncation)
    }

    /// `DeltaGt(t) -> DeltaGe(t)`, the inclusion into non-decreasing maps.
    pub fn semi_simplicial_to_simplicial(truncation: usize) -> Result<Self> {
        ordinal_inclusion("simplicial", CategoryTag::SemiSimplex, CategoryTag::Simplex, truncation)
    }

    /// The basic structure `DeltaB -> I` of an indexing category.
    pub fn basic(index: &IndexingCategory) -> Result<Self> {
        let bound = index.basic_bound();
        let structure = index.clone();
        let structure2 = index.clone();
        ModelFunctor::from_rules(
            "basic",
            IndexingCategory::new(CategoryTag::Basic, bound),
            index.clone(),
            move |o| match o {
                ObjectId::Vertex => Some(structure.vertex().clone()),
                ObjectId::Edge(n) => structure.edge(*n).cloned(),
                _ => None,
            },
            move |m| {
                if m.src == m.dst {
                    let o = match &m.src {
                        ObjectId::Vertex => structure2.vertex().clone(),
                        ObjectId::Edge(n) => structure2.edge(*n)?.clone(),
                        _ => return None,
                    };
                    return Some(structure2.category.identity(&o));
                }
                let ObjectId::Edge(n) = m.dst else { return None };
                structure2.leg(*m.data.first()?, n).cloned()
            },
        )
    }

    /// Looks up a roster functor by its CLI name.
    pub fn by_name(name: &str, truncation: usize) -> Result<Self> {
        match name {
            "i" => ModelFunctor::graph_to_hypergraph(truncation),
            "A" => ModelFunctor::hypergraph_to_simplicial(truncation),
            "skeletal" | "clique" => ModelFunctor::graph_to_semi_simplicial(truncation),
            "symmetric" => ModelFunctor::semi_simplicial_to_symmetric(truncation),
            "simplicial" => ModelFunctor::semi_simplicial_to_simplicial(truncation),
            "hypergraph-semisset" => ModelFunctor::hypergraph_to_semi_simplicial(truncation),
            other => Err(Error::Format(format!("unknown functor {other:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &IndexingCategory {
        &self.source
    }

    pub fn target(&self) -> &IndexingCategory {
        &self.target
    }

    pub fn object(&self, o: &ObjectId) -> Option<&ObjectId> {
        let k = self.source_table.object_index(o)?;
        Some(&self.target_table.objects[self.object_map[k]])
    }

    pub fn morphism(&self, m: &MorphismId) -> Option<&MorphismId> {
        let k = self.source_table.morphism_index(m)?;
        Some(&self.target_table.morphisms[self.morphism_map[k]])
    }

    /// Whether `h ∘ f_I = f_J` on the basic objects and legs both
    /// structures designate.
    pub fn commutes_with_basic(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        if self.object(s.vertex()) != Some(t.vertex()) {
            return false;
        }
        let bound = s.basic_bound().min(t.basic_bound());
        (2..=bound).all(|n| {
            s.edge(n).and_then(|e| self.object(e)) == t.edge(n)
                && (1..=n).all(|i| s.leg(i, n).and_then(|l| self.morphism(l)) == t.leg(i, n))
        })
    }

    /// Per target object, whether the truncated extension equals the
    /// untruncated one when finite source models vanish above their
    /// truncation.
    pub fn exactness(&self, side: Side) -> Vec<Exactness> {
        let objects = &self.target_table.objects;
        let tag = self.source.tag();
        if tag.is_finite() {
            return vec![Exactness::Exact; objects.len()];
        }
        let Some(beyond) = &self.beyond else {
            return vec![
                if side == Side::Left && tag.is_graded_upward() {
                    Exactness::Exact
                } else {
                    Exactness::Unknown
                };
                objects.len()
            ];
        };
        let needed = beyond.iter().map(ObjectId::level).max().unwrap_or(0);
        let mut wide = FiniteCategory::new(self.target.tag(), self.target.truncation());
        while beyond.iter().any(|o| !wide.contains(o)) && wide.truncation <= needed + 2 {
            wide.truncation += 1;
        }
        objects
            .iter()
            .map(|j| {
                let reaches = |o: &ObjectId| {
                    let hom = match side {
                        Side::Left => wide.hom_set(j, o),
                        Side::Right => wide.hom_set(o, j),
                    };
                    hom.map_or(true, |h| !h.is_empty())
                };
                let relevant = beyond.iter().any(reaches);
                match (relevant, side, tag.is_graded_upward()) {
                    (false, _, _) => Exactness::Exact,
                    (true, Side::Left, true) => Exactness::Exact,
                    (true, Side::Right, true) => Exactness::ForcedEmpty,
                    (true, _, false) => Exactness::Unknown,
                }
            })
            .collect()
    }
}

fn edge_morphism_to_ordinal(m: &MorphismId) -> Option<MorphismId> {
    let ordinal = |o: &ObjectId| match o {
        ObjectId::Vertex => Some(ObjectId::Ordinal(0)),
        ObjectId::Edge(n) if *n >= 1 => Some(ObjectId::Ordinal(n - 1)),
        _ => None,
    };
    let (src, dst) = (ordinal(&m.src)?, ordinal(&m.dst)?);
    let data = if m.src == m.dst { (0..=src.level()).collect() } else { vec![m.data.first()?.checked_sub(1)?] };
    Some(MorphismId::new(src, dst, data))
}

fn edges_to_ordinals(name: &str, from: CategoryTag, truncation: usize, to: CategoryTag) -> Result<ModelFunctor> {
    let t = truncation.max(1);
    ModelFunctor::from_rules(
        name,
        IndexingCategory::new(from, t),
        IndexingCategory::new(to, t - 1),
        |o| match o {
            ObjectId::Vertex => Some(ObjectId::Ordinal(0)),
            ObjectId::Edge(n) => Some(ObjectId::Ordinal(n - 1)),
            _ => None,
        },
        edge_morphism_to_ordinal,
    )
}

fn ordinal_inclusion(name: &str, from: CategoryTag, to: CategoryTag, truncation: usize) -> Result<ModelFunctor> {
    ModelFunctor::from_rules(
        name,
        IndexingCategory::new(from, truncation),
        IndexingCategory::new(to, truncation),
        |o| Some(o.clone()),
        |m| Some(m.clone()),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exactness {
    /// Agrees with the untruncated extension.
    Exact,
    /// The untruncated extension is empty here because a source object past
    /// the truncation maps into this one and carries no cells.
    ForcedEmpty,
    /// Objects past the truncation are involved and may change the answer.
    Unknown,
}

impl fmt::Display for Exactness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exactness::Exact => "exact",
            Exactness::ForcedEmpty => "forced-empty",
            Exactness::Unknown => "unknown",
        })
    }
}

fn require_source(h: &ModelFunctor, p: &Presheaf) -> Result<()> {
    if p.index().category != h.source.category {
        return Err(Error::CategoryMismatch(format!(
            "{} expects presheaves over {} (truncation {}), got {} (truncation {})",
            h.name,
            h.source.tag(),
            h.source.truncation(),
            p.index().tag(),
            p.index().truncation()
        )));
    }
    Ok(())
}

fn require_target(h: &ModelFunctor, p: &Presheaf) -> Result<()> {
    if p.index().category != h.target.category {
        return Err(Error::CategoryMismatch(format!(
            "{} expects presheaves over {} (truncation {}), got {} (truncation {})",
            h.name,
            h.target.tag(),
            h.target.truncation(),
            p.index().tag(),
            p.index().truncation()
        )));
    }
    Ok(())
}

/// `R_h(G) = G ∘ h`.
pub fn restrict(h: &ModelFunctor, g: &Presheaf) -> Result<Presheaf> {
    require_target(h, g)?;
    let labels = h.object_map.iter().map(|&j| g.labels_at(j).to_vec()).collect();
    let actions = h.morphism_map.iter().map(|&m| g.action_at(m).to_vec()).collect();
    Ok(Presheaf::from_raw(h.source.clone(), labels, actions))
}

/// `R_h(β)`, the whiskering of a morphism of target presheaves.
pub fn restrict_morphism(h: &ModelFunctor, beta: &PresheafMorphism) -> PresheafMorphism {
    PresheafMorphism { components: h.object_map.iter().map(|&j| beta.components[j].clone()).collect() }
}

/// Position of every morphism inside its hom slice.
fn hom_positions(table: &CategoryTable) -> Vec<usize> {
    let mut pos = vec![0; table.morphisms.len()];
    for a in 0..table.objects.len() {
        for b in 0..table.objects.len() {
            for (p, &m) in table.hom(a, b).iter().enumerate() {
                pos[m] = p;
            }
        }
    }
    pos
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Keeps the smaller root, so every root is the least member of its class.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Comma elements `(i, x, g)` at one target object `j`, with `x ∈ F(i)` and
/// `g: j -> h(i)`, ordered by `i`, then `x`, then `g`.
#[derive(Clone, Debug)]
struct CommaElements {
    offsets: Vec<usize>,
    widths: Vec<usize>,
    class: Vec<usize>,
    representatives: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct LeftKan {
    pub presheaf: Presheaf,
    /// `η_F: F -> R_h(L_h F)`.
    pub unit: PresheafMorphism,
    pub exactness: Vec<Exactness>,
    elements: Vec<CommaElements>,
    hom_pos: Arc<Vec<usize>>,
}

impl LeftKan {
    fn class_of(&self, j: usize, i: usize, x: usize, g: usize) -> usize {
        let e = &self.elements[j];
        e.class[e.offsets[i] + x * e.widths[i] + self.hom_pos[g]]
    }

    /// The least comma element `(i, x, g)` of every cell at `object`.
    pub fn representatives(&self, object: usize) -> &[(usize, usize, usize)] {
        &self.elements[object].representatives
    }
}

/// Pointwise left Kan extension: at `j`, the set of comma elements `(i, x, g)`
/// modulo `(i, F(u)x', g) ~ (i', x', h(u) ∘ g)`.
pub fn left_kan(h: &ModelFunctor, f: &Presheaf) -> Result<LeftKan> {
    require_source(h, f)?;
    let st = &h.source_table;
    let tt = &h.target_table;
    let comp = tt.composition();
    let hom_pos = Arc::new(hom_positions(tt));
    let n_src = st.objects.len();
    let mut elements = Vec::with_capacity(tt.objects.len());
    let mut labels = Vec::with_capacity(tt.objects.len());
    for j in 0..tt.objects.len() {
        let mut offsets = Vec::with_capacity(n_src);
        let mut widths = Vec::with_capacity(n_src);
        let mut total = 0;
        for i in 0..n_src {
            let w = tt.hom(j, h.object_map[i]).len();
            offsets.push(total);
            widths.push(w);
            total += w * f.labels_at(i).len();
        }
        let index = |i: usize, x: usize, g: usize| offsets[i] + x * widths[i] + hom_pos[g];
        let mut uf = UnionFind::new(total);
        for (u, &hu) in h.morphism_map.iter().enumerate() {
            if st.is_identity(u) {
                continue;
            }
            let (i, i2) = (st.src[u], st.dst[u]);
            let action = f.action_at(u);
            for &g in tt.hom(j, h.object_map[i]) {
                let hug = comp.get(hu, g).expect("composable by construction");
                for (x2, &x) in action.iter().enumerate() {
                    uf.union(index(i, x, g), index(i2, x2, hug));
                }
            }
        }
        let mut class = vec![usize::MAX; total];
        let mut representatives = Vec::new();
        let mut cell_labels: Vec<Option<String>> = Vec::new();
        for i in 0..n_src {
            let hi = h.object_map[i];
            for x in 0..f.labels_at(i).len() {
                for (p, &g) in tt.hom(j, hi).iter().enumerate() {
                    let e = offsets[i] + x * widths[i] + p;
                    let root = uf.find(e);
                    if root == e {
                        class[e] = representatives.len();
                        representatives.push((i, x, g));
                        cell_labels.push(None);
                    } else {
                        class[e] = class[root];
                    }
                    let c = class[e];
                    if cell_labels[c].is_none() && tt.is_identity(g) {
                        cell_labels[c] = f.labels_at(i)[x].clone();
                    }
                }
            }
        }
        dedupe_labels(&mut cell_labels);
        labels.push(cell_labels);
        elements.push(CommaElements { offsets, widths, class, representatives });
    }
    let actions = (0..tt.morphisms.len())
        .map(|w| {
            let j = tt.dst[w];
            let j2 = tt.src[w];
            let (e, e2) = (&elements[j], &elements[j2]);
            e.representatives
                .iter()
                .map(|&(i, x, g)| {
                    let gw = comp.get(g, w).expect("composable by construction");
                    e2.class[e2.offsets[i] + x * e2.widths[i] + hom_pos[gw]]
                })
                .collect()
        })
        .collect();
    let presheaf = Presheaf::from_raw(h.target.clone(), labels, actions);
    let mut result = LeftKan {
        presheaf,
        unit: PresheafMorphism { components: Vec::new() },
        exactness: h.exactness(Side::Left),
        elements,
        hom_pos,
    };
    result.unit = PresheafMorphism {
        components: (0..n_src)
            .map(|i| {
                let hi = h.object_map[i];
                let id = tt.identity[hi];
                (0..f.labels_at(i).len()).map(|x| result.class_of(hi, i, x, id)).collect()
            })
            .collect(),
    };
    Ok(result)
}

fn dedupe_labels(labels: &mut [Option<String>]) {
    let mut seen = HashSet::new();
    for l in labels.iter_mut() {
        if let Some(s) = l {
            if !seen.insert(s.clone()) {
                *l = None;
            }
        }
    }
}

/// `L_h(β): L_h F -> L_h F'` for `β: F -> F'`.
pub fn left_kan_morphism(from: &LeftKan, to: &LeftKan, beta: &PresheafMorphism) -> PresheafMorphism {
    PresheafMorphism {
        components: from
            .elements
            .iter()
            .enumerate()
            .map(|(j, e)| {
                e.representatives.iter().map(|&(i, x, g)| to.class_of(j, i, beta.components[i][x], g)).collect()
            })
            .collect(),
    }
}

/// Counit `ε_G: L_h(R_h G) -> G`, `[(i, x, g)] ↦ G(g)(x)`. `lk` must be the
/// left Kan extension of `R_h G`.
pub fn counit(lk: &LeftKan, g: &Presheaf) -> PresheafMorphism {
    PresheafMorphism {
        components: lk
            .elements
            .iter()
            .map(|e| e.representatives.iter().map(|&(_, x, m)| g.action_at(m)[x]).collect())
            .collect(),
    }
}

#[derive(Clone, Debug)]
pub struct RightKan {
    pub presheaf: Presheaf,
    pub exactness: Vec<Exactness>,
    /// Per target object, the compatible family behind each cell, indexed by
    /// source object and position of `g: h(i) -> j` in its hom set.
    pub families: Vec<Vec<Vec<Vec<usize>>>>,
    lookup: Vec<HashMap<Vec<Vec<usize>>, usize>>,
}

impl RightKan {
    pub fn cell_of(&self, object: usize, family: &[Vec<usize>]) -> Option<usize> {
        self.lookup[object].get(family).copied()
    }
}

/// Pointwise right Kan extension: cells at `j` are the morphisms
/// `R_h(y j) -> F`, i.e. families `s_i(g) ∈ F(i)` for `g: h(i) -> j` with
/// `s_i(g ∘ h(u)) = F(u)(s_{i'}(g))`.
pub fn right_kan(h: &ModelFunctor, f: &Presheaf, budget: u64) -> Result<RightKan> {
    require_source(h, f)?;
    let tt = &h.target_table;
    let comp = tt.composition();
    let hom_pos = hom_positions(tt);
    let n_src = h.source_table.objects.len();
    let mut families = Vec::with_capacity(tt.objects.len());
    let mut lookup = Vec::with_capacity(tt.objects.len());
    let mut labels = Vec::with_capacity(tt.objects.len());
    for j in 0..tt.objects.len() {
        let yj = Presheaf::representable(h.target.clone(), &tt.objects[j])?;
        let shape = restrict(h, &yj)?;
        let mut found = Vec::new();
        for_each_morphism(&shape, f, budget, |c| {
            found.push(c.to_vec());
            true
        })?;
        let mut cell_labels: Vec<Option<String>> = vec![None; found.len()];
        if let Some(i) = (0..n_src).find(|&i| h.object_map[i] == j) {
            let id_pos = hom_pos[tt.identity[j]];
            for (c, s) in found.iter().enumerate() {
                cell_labels[c] = f.labels_at(i)[s[i][id_pos]].clone();
            }
        }
        dedupe_labels(&mut cell_labels);
        lookup.push(found.iter().cloned().enumerate().map(|(c, s)| (s, c)).collect::<HashMap<_, _>>());
        families.push(found);
        labels.push(cell_labels);
    }
    let actions = (0..tt.morphisms.len())
        .map(|w| {
            let (j2, j) = (tt.src[w], tt.dst[w]);
            families[j]
                .iter()
                .map(|s| {
                    let moved: Vec<Vec<usize>> = (0..n_src)
                        .map(|i| {
                            tt.hom(h.object_map[i], j2)
                                .iter()
                                .map(|&g| s[i][hom_pos[comp.get(w, g).expect("composable")]])
                                .collect()
                        })
                        .collect();
                    lookup[j2][&moved]
                })
                .collect()
        })
        .collect();
    Ok(RightKan {
        presheaf: Presheaf::from_raw(h.target.clone(), labels, actions),
        exactness: h.exactness(Side::Right),
        families,
        lookup,
    })
}

/// Counit `ε'_F: R_h(∀_h F) -> F`, `s ↦ s_i(id)`.
pub fn right_counit(h: &ModelFunctor, rk: &RightKan) -> PresheafMorphism {
    let tt = &h.target_table;
    let hom_pos = hom_positions(tt);
    PresheafMorphism {
        components: h
            .object_map
            .iter()
            .enumerate()
            .map(|(i, &j)| rk.families[j].iter().map(|s| s[i][hom_pos[tt.identity[j]]]).collect())
            .collect(),
    }
}

/// Unit `η'_G: G -> ∀_h(R_h G)`, `y ↦ (g ↦ G(g)(y))`. `rk` must be the right
/// Kan extension of `R_h G`.
pub fn right_unit(h: &ModelFunctor, g: &Presheaf, rk: &RightKan) -> PresheafMorphism {
    let tt = &h.target_table;
    PresheafMorphism {
        components: (0..tt.objects.len())
            .map(|j| {
                (0..g.labels_at(j).len())
                    .map(|y| {
                        let family: Vec<Vec<usize>> = h
                            .object_map
                            .iter()
                            .map(|&hi| tt.hom(hi, j).iter().map(|&m| g.action_at(m)[y]).collect())
                            .collect();
                        rk.cell_of(j, &family).expect("the family of a cell is compatible")
                    })
                    .collect()
            })
            .collect(),
    }
}

/// `∀_h(γ): ∀_h F -> ∀_h F'` for `γ: F -> F'`.
pub fn right_kan_morphism(from: &RightKan, to: &RightKan, gamma: &PresheafMorphism) -> PresheafMorphism {
    PresheafMorphism {
        components: from
            .families
            .iter()
            .enumerate()
            .map(|(j, fams)| {
                fams.iter()
                    .map(|s| {
                        let image: Vec<Vec<usize>> = s
                            .iter()
                            .enumerate()
                            .map(|(i, si)| si.iter().map(|&x| gamma.components[i][x]).collect())
                            .collect();
                        to.cell_of(j, &image).expect("images of compatible families are compatible")
                    })
                    .collect()
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BijectionCheck {
    /// Size of the hom set the map starts from.
    pub domain: u64,
    /// Size of the hom set it lands in.
    pub codomain: u64,
    pub bijective: bool,
    pub witness: Option<String>,
}

fn check_bijection(
    domain: &[PresheafMorphism],
    codomain: &[PresheafMorphism],
    map: impl Fn(&PresheafMorphism) -> PresheafMorphism,
) -> BijectionCheck {
    let targets: HashSet<&PresheafMorphism> = codomain.iter().collect();
    let mut seen: HashMap<PresheafMorphism, usize> = HashMap::new();
    let mut witness = None;
    for (k, beta) in domain.iter().enumerate() {
        let image = map(beta);
        if !targets.contains(&image) {
            witness.get_or_insert_with(|| format!("morphism #{k} maps outside the target hom set"));
        }
        if let Some(prev) = seen.insert(image, k) {
            witness.get_or_insert_with(|| format!("morphisms #{prev} and #{k} have the same image"));
        }
    }
    if witness.is_none() && seen.len() != codomain.len() {
        witness = Some(format!("{} of {} morphisms are hit", seen.len(), codomain.len()));
    }
    BijectionCheck {
        domain: domain.len() as u64,
        codomain: codomain.len() as u64,
        bijective: witness.is_none(),
        witness,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjunctionReport {
    /// `Hom_J(L_h F, G) -> Hom_I(F, R_h G)`, `β ↦ R_h(β) ∘ η_F`.
    pub left: BijectionCheck,
    /// `Hom_J(G, ∀_h F) -> Hom_I(R_h G, F)`, `β ↦ ε'_F ∘ R_h(β)`.
    pub right: Option<BijectionCheck>,
}

impl AdjunctionReport {
    pub fn holds(&self) -> bool {
        self.left.bijective && self.right.as_ref().is_none_or(|r| r.bijective)
    }
}

/// Enumerates both sides of `L_h ⊣ R_h` (and of `R_h ⊣ ∀_h` when `second`)
/// and checks that the unit-induced maps are bijections.
pub fn check_adjunction(
    h: &ModelFunctor,
    f: &Presheaf,
    g: &Presheaf,
    budget: u64,
    second: bool,
) -> Result<AdjunctionReport> {
    require_source(h, f)?;
    require_target(h, g)?;
    let lk = left_kan(h, f)?;
    let rg = restrict(h, g)?;
    let from_left = enumerate_morphisms(&lk.presheaf, g, budget)?;
    let into_right = enumerate_morphisms(f, &rg, budget)?;
    let left = check_bijection(&from_left, &into_right, |beta| restrict_morphism(h, beta).after(&lk.unit));
    let right = if second {
        let rk = right_kan(h, f, budget)?;
        let into_forall = enumerate_morphisms(g, &rk.presheaf, budget)?;
        let from_restriction = enumerate_morphisms(&rg, f, budget)?;
        let eps = right_counit(h, &rk);
        Some(check_bijection(&into_forall, &from_restriction, |beta| eps.after(&restrict_morphism(h, beta))))
    } else {
        None
    };
    Ok(AdjunctionReport { left, right })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleReport {
    /// `ε_{L F} ∘ L_h(η_F) = id`.
    pub left_counit_after_unit: bool,
    /// `R_h(ε_G) ∘ η_{R G} = id`.
    pub restricted_counit_after_unit: bool,
    /// `ε'_{R G} ∘ R_h(η'_G) = id` and `∀_h(ε'_F) ∘ η'_{∀ F} = id`.
    pub right: Option<(bool, bool)>,
}

impl TriangleReport {
    pub fn holds(&self) -> bool {
        self.left_counit_after_unit && self.restricted_counit_after_unit && self.right.is_none_or(|(a, b)| a && b)
    }
}

pub fn triangle_identities(
    h: &ModelFunctor,
    f: &Presheaf,
    g: &Presheaf,
    budget: u64,
    second: bool,
) -> Result<TriangleReport> {
    require_source(h, f)?;
    require_target(h, g)?;
    let lf = left_kan(h, f)?;
    let rlf = restrict(h, &lf.presheaf)?;
    let lrlf = left_kan(h, &rlf)?;
    let first = counit(&lrlf, &lf.presheaf).after(&left_kan_morphism(&lf, &lrlf, &lf.unit));
    let left_counit_after_unit = first == PresheafMorphism::identity(&lf.presheaf);

    let rg = restrict(h, g)?;
    let lrg = left_kan(h, &rg)?;
    let second_id = restrict_morphism(h, &counit(&lrg, g)).after(&lrg.unit);
    let restricted_counit_after_unit = second_id == PresheafMorphism::identity(&rg);

    let right = if second {
        let forall_rg = right_kan(h, &rg, budget)?;
        let a = right_counit(h, &forall_rg).after(&restrict_morphism(h, &right_unit(h, g, &forall_rg)))
            == PresheafMorphism::identity(&rg);
        let forall_f = right_kan(h, f, budget)?;
        let r_forall_f = restrict(h, &forall_f.presheaf)?;
        let forall_r_forall_f = right_kan(h, &r_forall_f, budget)?;
        let eta = right_unit(h, &forall_f.presheaf, &forall_r_forall_f);
        let b = right_kan_morphism(&forall_r_forall_f, &forall_f, &right_counit(h, &forall_f)).after(&eta)
            == PresheafMorphism::identity(&forall_f.presheaf);
        Some((a, b))
    } else {
        None
    };
    Ok(TriangleReport { left_counit_after_unit, restricted_counit_after_unit, right })
}

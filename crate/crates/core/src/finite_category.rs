//! Truncated indexing categories.
//!
//! Every category here is one of a fixed roster (graphs, hypergraphs, the basic
//! category, strict and non-strict simplex categories, finite sets, broadcast
//! shapes and linear preorders), cut off at a truncation level so that objects
//! and hom-sets can be enumerated.
//!
//! Object levels: `V` is level 0 and `E_n` is level `n`; `[n]` is level `n`;
//! a linear preorder with `k` elements is level `k - 1`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 6;

/// Which indexing category.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CategoryTag {
    /// `V` and `E_2` with two arrows `V -> E_2`.
    #[serde(rename = "DeltaG")]
    Graph,
    /// `V, E_1, E_2, ...` with `n` arrows `V -> E_n`.
    #[serde(rename = "DeltaH")]
    Hyper,
    /// Like `Hyper` but without `E_1`.
    #[serde(rename = "DeltaB")]
    Basic,
    /// `[n]` with strictly increasing maps.
    #[serde(rename = "DeltaGt")]
    SemiSimplex,
    /// `[n]` with non-decreasing maps.
    #[serde(rename = "DeltaGe")]
    Simplex,
    /// `{0..n}` with all functions.
    #[serde(rename = "Sigma")]
    Symmetric,
    /// The categories `(n)` (an initial object and `n` others) with functors between them.
    #[serde(rename = "T")]
    Broadcast,
    /// Non-empty finite linear preorders with order-preserving maps.
    #[serde(rename = "DeltaPrO")]
    Preorder,
}

impl CategoryTag {
    pub const ALL: [CategoryTag; 8] = [
        CategoryTag::Graph,
        CategoryTag::Hyper,
        CategoryTag::Basic,
        CategoryTag::SemiSimplex,
        CategoryTag::Simplex,
        CategoryTag::Symmetric,
        CategoryTag::Broadcast,
        CategoryTag::Preorder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CategoryTag::Graph => "DeltaG",
            CategoryTag::Hyper => "DeltaH",
            CategoryTag::Basic => "DeltaB",
            CategoryTag::SemiSimplex => "DeltaGt",
            CategoryTag::Simplex => "DeltaGe",
            CategoryTag::Symmetric => "Sigma",
            CategoryTag::Broadcast => "T",
            CategoryTag::Preorder => "DeltaPrO",
        }
    }

    /// The untruncated category has finitely many objects.
    pub fn is_finite(self) -> bool {
        self == CategoryTag::Graph
    }

    /// No non-identity morphism goes from a level to an equal or lower level,
    /// so a presheaf may be empty above any level. Finite models over these
    /// categories are read as vanishing above their truncation.
    pub fn is_graded_upward(self) -> bool {
        matches!(self, CategoryTag::Graph | CategoryTag::Hyper | CategoryTag::Basic | CategoryTag::SemiSimplex)
    }

    fn uses_edges(self) -> bool {
        matches!(self, CategoryTag::Graph | CategoryTag::Hyper | CategoryTag::Basic)
    }
}

impl fmt::Display for CategoryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CategoryTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CategoryTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::Format(format!("unknown category tag {s:?}")))
    }
}

/// An object of one of the roster categories.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ObjectId {
    /// `V`.
    Vertex,
    /// `E_n`.
    Edge(usize),
    /// `[n]`, `n` underlined, or `(n)`, depending on the category.
    Ordinal(usize),
    /// A linear preorder given by its block sizes, lowest rank first.
    Preorder(Vec<usize>),
}

impl ObjectId {
    pub fn level(&self) -> usize {
        match self {
            ObjectId::Vertex => 0,
            ObjectId::Edge(n) | ObjectId::Ordinal(n) => *n,
            ObjectId::Preorder(blocks) => blocks.iter().sum::<usize>().saturating_sub(1),
        }
    }

    /// Number of elements of the underlying set, for function-backed categories.
    pub fn size(&self) -> usize {
        match self {
            ObjectId::Vertex => 1,
            ObjectId::Edge(n) => *n,
            ObjectId::Ordinal(n) => n + 1,
            ObjectId::Preorder(blocks) => blocks.iter().sum(),
        }
    }

    fn variant_rank(&self) -> u8 {
        match self {
            ObjectId::Vertex => 0,
            ObjectId::Edge(_) => 1,
            ObjectId::Ordinal(_) => 2,
            ObjectId::Preorder(_) => 3,
        }
    }

    /// Rank (block index) of each element position of a preorder.
    pub fn ranks(&self) -> Vec<usize> {
        match self {
            ObjectId::Preorder(blocks) => {
                blocks.iter().enumerate().flat_map(|(r, &len)| std::iter::repeat_n(r, len)).collect()
            }
            other => (0..other.size()).collect(),
        }
    }
}

impl Ord for ObjectId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        let key = |o: &ObjectId| (o.level(), o.variant_rank());
        key(self).cmp(&key(other)).then_with(|| match (self, other) {
            (ObjectId::Edge(a), ObjectId::Edge(b)) | (ObjectId::Ordinal(a), ObjectId::Ordinal(b)) => a.cmp(b),
            (ObjectId::Preorder(a), ObjectId::Preorder(b)) => a.cmp(b),
            _ => std::cmp::Ordering::Equal,
        })
    }
}

impl PartialOrd for ObjectId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ObjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectId::Vertex => f.write_str("V"),
            ObjectId::Edge(n) => write!(f, "E{n}"),
            ObjectId::Ordinal(n) => write!(f, "[{n}]"),
            ObjectId::Preorder(blocks) => {
                let parts: Vec<String> = blocks.iter().map(|b| b.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
        }
    }
}

impl FromStr for ObjectId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("malformed object key {s:?}"));
        if s == "V" {
            return Ok(ObjectId::Vertex);
        }
        if let Some(n) = s.strip_prefix('E') {
            return n.parse().map(ObjectId::Edge).map_err(|_| bad());
        }
        if let Some(n) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            return n.parse().map(ObjectId::Ordinal).map_err(|_| bad());
        }
        if let Some(body) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
            let blocks = body
                .split(',')
                .map(|p| p.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| bad())?;
            if blocks.is_empty() || blocks.contains(&0) {
                return Err(bad());
            }
            return Ok(ObjectId::Preorder(blocks));
        }
        Err(bad())
    }
}

impl Serialize for ObjectId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ObjectId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A morphism in canonical encoding.
///
/// For function-backed categories `data` lists the image of each element of
/// the source. For the broadcast category it lists the image of each object of
/// `(m)`, initial object first. In `DeltaG`, `DeltaH` and `DeltaB` identities
/// carry empty data and `v_i^n` carries `[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MorphismId {
    pub src: ObjectId,
    pub dst: ObjectId,
    pub data: Vec<usize>,
}

impl MorphismId {
    pub fn new(src: ObjectId, dst: ObjectId, data: Vec<usize>) -> Self {
        MorphismId { src, dst, data }
    }

    /// `v_i^n : V -> E_n` (1-based `i`).
    pub fn leg(i: usize, n: usize) -> Self {
        MorphismId::new(ObjectId::Vertex, ObjectId::Edge(n), vec![i])
    }

    /// The coface `[n-1] -> [n]` skipping `i`; its action is the face operator `d_i`.
    pub fn coface(n: usize, i: usize) -> Self {
        let data = (0..=n).filter(|&k| k != i).collect();
        MorphismId::new(ObjectId::Ordinal(n - 1), ObjectId::Ordinal(n), data)
    }
}

impl fmt::Display for MorphismId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let data: Vec<String> = self.data.iter().map(|d| d.to_string()).collect();
        write!(f, "{}->{}:{}", self.src, self.dst, data.join(","))
    }
}

impl FromStr for MorphismId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("malformed morphism key {s:?}"));
        let (src, rest) = s.split_once("->").ok_or_else(bad)?;
        let (dst, data) = rest.rsplit_once(':').ok_or_else(bad)?;
        let data = if data.is_empty() {
            Vec::new()
        } else {
            data.split(',').map(|d| d.parse::<usize>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?
        };
        Ok(MorphismId::new(src.parse()?, dst.parse()?, data))
    }
}

/// A roster category cut off at `truncation`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteCategory {
    pub tag: CategoryTag,
    pub truncation: usize,
}

impl FiniteCategory {
    /// `DeltaG` has no levels past `E_2`, so its truncation is always 2.
    pub fn new(tag: CategoryTag, truncation: usize) -> Self {
        let truncation = if tag == CategoryTag::Graph { 2 } else { truncation };
        FiniteCategory { tag, truncation }
    }

    /// Objects in deterministic order: by level, then encoding.
    pub fn objects(&self) -> Vec<ObjectId> {
        let t = self.truncation;
        let mut out = match self.tag {
            CategoryTag::Graph => vec![ObjectId::Vertex, ObjectId::Edge(2)],
            CategoryTag::Hyper => std::iter::once(ObjectId::Vertex).chain((1..=t).map(ObjectId::Edge)).collect(),
            CategoryTag::Basic => std::iter::once(ObjectId::Vertex).chain((2..=t).map(ObjectId::Edge)).collect(),
            CategoryTag::SemiSimplex | CategoryTag::Simplex | CategoryTag::Symmetric | CategoryTag::Broadcast => {
                (0..=t).map(ObjectId::Ordinal).collect()
            }
            CategoryTag::Preorder => (1..=t + 1).flat_map(compositions).map(ObjectId::Preorder).collect(),
        };
        out.sort();
        out
    }

    pub fn contains(&self, object: &ObjectId) -> bool {
        let t = self.truncation;
        match (self.tag, object) {
            (_, ObjectId::Vertex) => self.tag.uses_edges(),
            (CategoryTag::Graph, ObjectId::Edge(n)) => *n == 2,
            (CategoryTag::Hyper, ObjectId::Edge(n)) => (1..=t).contains(n),
            (CategoryTag::Basic, ObjectId::Edge(n)) => (2..=t).contains(n),
            (
                CategoryTag::SemiSimplex | CategoryTag::Simplex | CategoryTag::Symmetric | CategoryTag::Broadcast,
                ObjectId::Ordinal(n),
            ) => *n <= t,
            (CategoryTag::Preorder, ObjectId::Preorder(blocks)) => {
                !blocks.is_empty() && !blocks.contains(&0) && object.level() <= t
            }
            _ => false,
        }
    }

    fn require(&self, object: &ObjectId) -> Result<()> {
        if self.contains(object) {
            Ok(())
        } else {
            Err(Error::UnknownObject { tag: self.tag, truncation: self.truncation, object: object.clone() })
        }
    }

    pub fn identity(&self, object: &ObjectId) -> MorphismId {
        let data = match (self.tag.uses_edges(), object) {
            (true, _) => Vec::new(),
            (false, ObjectId::Preorder(_)) => (0..object.size()).collect(),
            (false, _) => (0..object.size()).collect(),
        };
        MorphismId::new(object.clone(), object.clone(), data)
    }

    /// All morphisms `a -> b` in lexicographic order of their data.
    pub fn hom_set(&self, a: &ObjectId, b: &ObjectId) -> Result<Vec<MorphismId>> {
        self.require(a)?;
        self.require(b)?;
        Ok(self.hom_set_unchecked(a, b))
    }

    fn hom_set_unchecked(&self, a: &ObjectId, b: &ObjectId) -> Vec<MorphismId> {
        let wrap =
            |datas: Vec<Vec<usize>>| datas.into_iter().map(|d| MorphismId::new(a.clone(), b.clone(), d)).collect();
        if self.tag.uses_edges() {
            return match (a, b) {
                _ if a == b => vec![self.identity(a)],
                (ObjectId::Vertex, ObjectId::Edge(n)) => (1..=*n).map(|i| MorphismId::leg(i, *n)).collect(),
                _ => Vec::new(),
            };
        }
        match self.tag {
            CategoryTag::Preorder => wrap(preorder_maps(a, b)),
            CategoryTag::Broadcast => {
                let n = b.level();
                wrap(enumerate_functions(a.size(), n + 1, |prefix, v| {
                    prefix.is_empty() || prefix[0] == 0 || v == prefix[0]
                }))
            }
            CategoryTag::SemiSimplex => {
                let (len, cod) = (a.size(), b.size());
                wrap(enumerate_functions(len, cod, |prefix, v| {
                    prefix.last().is_none_or(|&p| v > p) && v + (len - prefix.len()) <= cod
                }))
            }
            CategoryTag::Simplex => {
                wrap(enumerate_functions(a.size(), b.size(), |prefix, v| prefix.last().is_none_or(|&p| v >= p)))
            }
            CategoryTag::Symmetric => wrap(enumerate_functions(a.size(), b.size(), |_, _| true)),
            _ => unreachable!("edge categories handled above"),
        }
    }

    pub fn is_morphism(&self, m: &MorphismId) -> bool {
        if !self.contains(&m.src) || !self.contains(&m.dst) {
            return false;
        }
        if self.tag.uses_edges() {
            return match (&m.src, &m.dst, m.data.as_slice()) {
                (s, d, []) => s == d,
                (ObjectId::Vertex, ObjectId::Edge(n), [i]) => (1..=*n).contains(i),
                _ => false,
            };
        }
        let (len, cod) = (m.src.size(), m.dst.size());
        if m.data.len() != len || m.data.iter().any(|&v| v >= cod) {
            return false;
        }
        let d = &m.data;
        match self.tag {
            CategoryTag::SemiSimplex => d.windows(2).all(|w| w[0] < w[1]),
            CategoryTag::Simplex => d.windows(2).all(|w| w[0] <= w[1]),
            CategoryTag::Symmetric => true,
            CategoryTag::Broadcast => d[0] == 0 || d.iter().all(|&v| v == d[0]),
            CategoryTag::Preorder => is_preorder_map(&m.src.ranks(), &m.dst.ranks(), d),
            _ => unreachable!(),
        }
    }

    /// `g ∘ f`.
    pub fn compose(&self, g: &MorphismId, f: &MorphismId) -> Result<MorphismId> {
        if f.dst != g.src {
            return Err(Error::NotComposable { g: g.clone(), f: f.clone() });
        }
        for m in [g, f] {
            if !self.is_morphism(m) {
                return Err(Error::InvalidMorphism { tag: self.tag, morphism: m.clone() });
            }
        }
        Ok(compose_raw(self.tag, g, f))
    }

    pub fn is_isomorphism(&self, m: &MorphismId) -> bool {
        if m.src != m.dst {
            return false;
        }
        if self.tag.uses_edges() {
            return m.data.is_empty();
        }
        let mut seen = vec![false; m.dst.size()];
        m.data.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    /// Exhaustively checks the unit laws and associativity.
    ///
    /// `budget` bounds the number of composable triples examined; the check
    /// refuses to start when the count exceeds it.
    pub fn check_category_axioms(&self, budget: u64) -> Result<AxiomReport> {
        let table = self.table();
        let n = table.objects.len();
        let sizes: Vec<Vec<u64>> = (0..n).map(|a| (0..n).map(|b| table.hom(a, b).len() as u64).collect()).collect();
        let mut triples: u64 = 0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        triples =
                            triples.saturating_add(sizes[a][b].saturating_mul(sizes[b][c]).saturating_mul(sizes[c][d]));
                    }
                }
            }
        }
        if triples > budget {
            return Err(Error::BudgetExceeded { budget, bound: triples.to_string() });
        }
        let mut report = AxiomReport { triples_checked: triples, violations: Vec::new() };
        let comp = table.composition();
        for f in 0..table.morphisms.len() {
            let (a, b) = (table.src[f], table.dst[f]);
            if comp.get(table.identity[b], f) != Some(f) {
                report.violations.push(AxiomViolation::LeftUnit(table.morphisms[f].clone()));
            }
            if comp.get(f, table.identity[a]) != Some(f) {
                report.violations.push(AxiomViolation::RightUnit(table.morphisms[f].clone()));
            }
        }
        for f in 0..table.morphisms.len() {
            for &g in &table.outgoing[table.dst[f]] {
                let Some(gf) = comp.get(g, f) else {
                    report.violations.push(AxiomViolation::NotClosed {
                        g: table.morphisms[g].clone(),
                        f: table.morphisms[f].clone(),
                    });
                    continue;
                };
                for &h in &table.outgoing[table.dst[g]] {
                    let left = comp.get(h, gf);
                    let right = comp.get(h, g).and_then(|hg| comp.get(hg, f));
                    if left.is_none() || left != right {
                        report.violations.push(AxiomViolation::Associativity {
                            h: table.morphisms[h].clone(),
                            g: table.morphisms[g].clone(),
                            f: table.morphisms[f].clone(),
                        });
                    }
                }
            }
        }
        Ok(report)
    }

    /// Cached enumeration of every object and morphism.
    pub fn table(&self) -> Arc<CategoryTable> {
        static CACHE: OnceLock<Mutex<HashMap<FiniteCategory, Arc<CategoryTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(t) = cache.lock().unwrap().get(self) {
            return Arc::clone(t);
        }
        let table = Arc::new(CategoryTable::build(*self));
        cache.lock().unwrap().entry(*self).or_insert(table).clone()
    }
}

fn compose_raw(tag: CategoryTag, g: &MorphismId, f: &MorphismId) -> MorphismId {
    let data = if tag.uses_edges() {
        match (f.data.is_empty(), g.data.is_empty()) {
            (true, _) => g.data.clone(),
            (_, true) => f.data.clone(),
            // no composable pair of non-identities exists
            _ => unreachable!("two legs never compose"),
        }
    } else {
        f.data.iter().map(|&k| g.data[k]).collect()
    };
    MorphismId::new(f.src.clone(), g.dst.clone(), data)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxiomViolation {
    LeftUnit(MorphismId),
    RightUnit(MorphismId),
    NotClosed { g: MorphismId, f: MorphismId },
    Associativity { h: MorphismId, g: MorphismId, f: MorphismId },
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub triples_checked: u64,
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Dense index of a truncated category.
#[derive(Debug)]
pub struct CategoryTable {
    pub category: FiniteCategory,
    pub objects: Vec<ObjectId>,
    pub morphisms: Vec<MorphismId>,
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    pub identity: Vec<usize>,
    /// Morphism indices out of each object, grouped by target object order.
    pub outgoing: Vec<Vec<usize>>,
    /// Morphism indices into each object, grouped by source object order.
    pub incoming: Vec<Vec<usize>>,
    object_index: HashMap<ObjectId, usize>,
    morphism_index: HashMap<MorphismId, usize>,
    homs: Vec<Vec<usize>>,
    composition: OnceLock<Composition>,
}

impl CategoryTable {
    fn build(category: FiniteCategory) -> Self {
        let objects = category.objects();
        let n = objects.len();
        let object_index: HashMap<_, _> = objects.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        let mut morphisms = Vec::new();
        let (mut src, mut dst) = (Vec::new(), Vec::new());
        let mut homs = vec![Vec::new(); n * n];
        let mut identity = vec![0; n];
        for (a, oa) in objects.iter().enumerate() {
            for (b, ob) in objects.iter().enumerate() {
                for m in category.hom_set_unchecked(oa, ob) {
                    let idx = morphisms.len();
                    if a == b && category.identity(oa) == m {
                        identity[a] = idx;
                    }
                    homs[a * n + b].push(idx);
                    src.push(a);
                    dst.push(b);
                    morphisms.push(m);
                }
            }
        }
        let morphism_index = morphisms.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let outgoing = (0..n).map(|a| (0..n).flat_map(|b| homs[a * n + b].clone()).collect()).collect();
        let incoming = (0..n).map(|b| (0..n).flat_map(|a| homs[a * n + b].clone()).collect()).collect();
        CategoryTable {
            category,
            objects,
            morphisms,
            src,
            dst,
            identity,
            outgoing,
            incoming,
            object_index,
            morphism_index,
            homs,
            composition: OnceLock::new(),
        }
    }

    pub fn object_index(&self, o: &ObjectId) -> Option<usize> {
        self.object_index.get(o).copied()
    }

    pub fn morphism_index(&self, m: &MorphismId) -> Option<usize> {
        self.morphism_index.get(m).copied()
    }

    pub fn hom(&self, a: usize, b: usize) -> &[usize] {
        &self.homs[a * self.objects.len() + b]
    }

    pub fn is_identity(&self, m: usize) -> bool {
        self.identity[self.src[m]] == m
    }

    /// Index of `g ∘ f`; panics if the pair is not composable.
    pub fn compose(&self, g: usize, f: usize) -> usize {
        self.composition().get(g, f).expect("composable morphisms of a table compose inside it")
    }

    pub fn composition(&self) -> &Composition {
        self.composition.get_or_init(|| Composition::build(self))
    }
}

/// Lookup table for `g ∘ f` over every composable pair.
#[derive(Debug)]
pub struct Composition {
    /// Position of each morphism inside `outgoing[src]`.
    position: Vec<usize>,
    /// For each `f`, composites `g ∘ f` aligned with `outgoing[dst f]`.
    after: Vec<Vec<Option<usize>>>,
}

impl Composition {
    fn build(table: &CategoryTable) -> Self {
        let mut position = vec![0; table.morphisms.len()];
        for out in &table.outgoing {
            for (p, &m) in out.iter().enumerate() {
                position[m] = p;
            }
        }
        let tag = table.category.tag;
        let after = (0..table.morphisms.len())
            .map(|f| {
                table.outgoing[table.dst[f]]
                    .iter()
                    .map(|&g| {
                        let gf = compose_raw(tag, &table.morphisms[g], &table.morphisms[f]);
                        table.morphism_index(&gf)
                    })
                    .collect()
            })
            .collect();
        Composition { position, after }
    }

    /// `g ∘ f`, or `None` if not composable.
    pub fn get(&self, g: usize, f: usize) -> Option<usize> {
        self.after[f].get(self.position[g]).copied().flatten()
    }
}

/// All functions `{0..len} -> {0..codomain}` accepted by `allowed`, which sees
/// the values chosen so far and a candidate for the next one; lexicographic.
fn enumerate_functions(len: usize, codomain: usize, allowed: impl Fn(&[usize], usize) -> bool) -> Vec<Vec<usize>> {
    fn go(
        len: usize,
        codomain: usize,
        allowed: &dyn Fn(&[usize], usize) -> bool,
        prefix: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for v in 0..codomain {
            if allowed(prefix, v) {
                prefix.push(v);
                go(len, codomain, allowed, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(len, codomain, &allowed, &mut Vec::with_capacity(len), &mut out);
    out
}

/// Ordered compositions of `n` in lexicographic order.
fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn is_preorder_map(src_ranks: &[usize], dst_ranks: &[usize], data: &[usize]) -> bool {
    (1..data.len()).all(|k| {
        let (r0, r1) = (dst_ranks[data[k - 1]], dst_ranks[data[k]]);
        if src_ranks[k - 1] == src_ranks[k] {
            r0 == r1
        } else {
            r0 <= r1
        }
    })
}

/// Order-preserving maps between two linear preorders given as objects,
/// encoded on element positions. Works for objects outside any truncation.
pub fn preorder_maps(a: &ObjectId, b: &ObjectId) -> Vec<Vec<usize>> {
    let (ra, rb) = (a.ranks(), b.ranks());
    enumerate_functions(ra.len(), rb.len(), |prefix, v| match prefix.last() {
        None => true,
        Some(&p) => {
            let k = prefix.len();
            if ra[k - 1] == ra[k] {
                rb[p] == rb[v]
            } else {
                rb[p] <= rb[v]
            }
        }
    })
}

/// Designates vertices and `n`-edges inside an indexing category: the
/// image of the basic category `V, E_2, E_3, ...` for `2 <= n <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexingCategory {
    pub category: FiniteCategory,
    bound: usize,
    vertex: ObjectId,
    edges: Vec<ObjectId>,
    legs: Vec<Vec<MorphismId>>,
}

impl IndexingCategory {
    /// The standard basic structure of a roster category.
    ///
    /// Edge categories send `E_n` to itself (`DeltaG` folds every `E_n` onto
    /// `E_2`, first leg to the source and all others to the target). Ordinal
    /// categories send `V` to `[0]`, `E_n` to `[n-1]` and `v_i^n` to `0 ↦ i-1`;
    /// preorders use the discrete order with all blocks of size one.
    pub fn standard(category: FiniteCategory) -> Self {
        let t = category.truncation;
        let (bound, vertex) = match category.tag {
            CategoryTag::Graph => (t.max(3), ObjectId::Vertex),
            CategoryTag::Hyper | CategoryTag::Basic => (t, ObjectId::Vertex),
            CategoryTag::Preorder => (t + 1, ObjectId::Preorder(vec![1])),
            _ => (t + 1, ObjectId::Ordinal(0)),
        };
        let mut edges = Vec::new();
        let mut legs = Vec::new();
        for n in 2..=bound {
            let edge = match category.tag {
                CategoryTag::Graph => ObjectId::Edge(2),
                CategoryTag::Hyper | CategoryTag::Basic => ObjectId::Edge(n),
                CategoryTag::Preorder => ObjectId::Preorder(vec![1; n]),
                _ => ObjectId::Ordinal(n - 1),
            };
            let n_legs = (1..=n)
                .map(|i| match category.tag {
                    CategoryTag::Graph => MorphismId::leg(i.min(2), 2),
                    CategoryTag::Hyper | CategoryTag::Basic => MorphismId::leg(i, n),
                    _ => MorphismId::new(vertex.clone(), edge.clone(), vec![i - 1]),
                })
                .collect();
            edges.push(edge);
            legs.push(n_legs);
        }
        IndexingCategory { category, bound, vertex, edges, legs }
    }

    pub fn new(tag: CategoryTag, truncation: usize) -> Self {
        IndexingCategory::standard(FiniteCategory::new(tag, truncation))
    }

    /// A custom basic structure. `legs[n-2][i-1]` is the image of `v_i^n`.
    pub fn with_structure(
        category: FiniteCategory,
        vertex: ObjectId,
        edges: Vec<ObjectId>,
        legs: Vec<Vec<MorphismId>>,
    ) -> Result<Self> {
        if edges.len() != legs.len() {
            return Err(Error::NotAFunctor("one leg list per edge object is required".into()));
        }
        category.require(&vertex)?;
        for (k, (edge, ls)) in edges.iter().zip(&legs).enumerate() {
            let n = k + 2;
            category.require(edge)?;
            if ls.len() != n {
                return Err(Error::NotAFunctor(format!("E{n} needs {n} legs, got {}", ls.len())));
            }
            for l in ls {
                if !category.is_morphism(l) || l.src != vertex || &l.dst != edge {
                    return Err(Error::NotAFunctor(format!("{l} is not a morphism {vertex} -> {edge}")));
                }
            }
        }
        let bound = edges.len() + 1;
        Ok(IndexingCategory { category, bound, vertex, edges, legs })
    }

    pub fn tag(&self) -> CategoryTag {
        self.category.tag
    }

    pub fn truncation(&self) -> usize {
        self.category.truncation
    }

    /// Largest `n` such that `E_n` is designated.
    pub fn basic_bound(&self) -> usize {
        self.bound
    }

    pub fn vertex(&self) -> &ObjectId {
        &self.vertex
    }

    /// Image of `E_n`, for `2 <= n <= basic_bound()`.
    pub fn edge(&self, n: usize) -> Option<&ObjectId> {
        n.checked_sub(2).and_then(|k| self.edges.get(k))
    }

    /// Image of `v_i^n` (1-based `i`).
    pub fn leg(&self, i: usize, n: usize) -> Option<&MorphismId> {
        n.checked_sub(2).and_then(|k| self.legs.get(k)).and_then(|ls| ls.get(i.checked_sub(1)?))
    }

    /// The basic structure is faithful when the legs of every `E_n` are
    /// pairwise distinct; the basic category has no other parallel arrows.
    pub fn check_faithful(&self) -> bool {
        self.legs.iter().all(|ls| ls.iter().enumerate().all(|(i, a)| ls[i + 1..].iter().all(|b| a != b)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn rosters() {
        let g = FiniteCategory::new(CategoryTag::Graph, DEFAULT_TRUNCATION);
        assert_eq!(g.objects(), vec![ObjectId::Vertex, ObjectId::Edge(2)]);
        let b = FiniteCategory::new(CategoryTag::Basic, 3);
        assert_eq!(b.objects(), vec![ObjectId::Vertex, ObjectId::Edge(2), ObjectId::Edge(3)]);
        let s = FiniteCategory::new(CategoryTag::SemiSimplex, 2);
        assert_eq!(s.objects(), (0..=2).map(ObjectId::Ordinal).collect::<Vec<_>>());
        let p = FiniteCategory::new(CategoryTag::Preorder, 2);
        let keys: Vec<String> = p.objects().iter().map(|o| o.to_string()).collect();
        assert_eq!(keys, ["(1)", "(1,1)", "(2)", "(1,1,1)", "(1,2)", "(2,1)", "(3)"]);
    }

    #[test]
    fn hom_set_examples() {
        let o = ObjectId::Ordinal;
        let strict = FiniteCategory::new(CategoryTag::SemiSimplex, 3);
        assert_eq!(strict.hom_set(&o(1), &o(2)).unwrap().len(), 3);
        let sigma = FiniteCategory::new(CategoryTag::Symmetric, 3);
        assert_eq!(sigma.hom_set(&o(1), &o(2)).unwrap().len(), 9);
        let t = FiniteCategory::new(CategoryTag::Broadcast, 3);
        assert_eq!(t.hom_set(&o(2), &o(1)).unwrap().len(), 5);
        let simplex = FiniteCategory::new(CategoryTag::Simplex, 3);
        let homs = simplex.hom_set(&o(1), &o(2)).unwrap();
        // brute force over all 9 functions {0,1} -> {0,1,2}
        let brute = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).filter(|(a, b)| a <= b).count();
        assert_eq!(homs.len(), brute);
        assert_eq!(brute, 6);
    }

    #[test]
    fn hom_set_closed_forms() {
        let o = ObjectId::Ordinal;
        let strict = FiniteCategory::new(CategoryTag::SemiSimplex, 4);
        let sigma = FiniteCategory::new(CategoryTag::Symmetric, 3);
        let t = FiniteCategory::new(CategoryTag::Broadcast, 3);
        for i in 0..=4 {
            for j in 0..=4 {
                let got = strict.hom_set(&o(i), &o(j)).unwrap().len() as u64;
                let want = if i <= j { binomial(j as u64 + 1, i as u64 + 1) } else { 0 };
                assert_eq!(got, want, "Δ> [{i}]->[{j}]");
            }
        }
        for m in 0..=3u32 {
            for n in 0..=3u64 {
                let got = sigma.hom_set(&o(m as usize), &o(n as usize)).unwrap().len() as u64;
                assert_eq!(got, (n + 1).pow(m + 1));
                let got = t.hom_set(&o(m as usize), &o(n as usize)).unwrap().len() as u64;
                assert_eq!(got, (n + 1).pow(m) + n);
            }
        }
    }

    #[test]
    fn basic_category_homs() {
        let b = FiniteCategory::new(CategoryTag::Basic, 5);
        for x in b.objects() {
            for y in b.objects() {
                let homs = b.hom_set(&x, &y).unwrap();
                let expected = match (&x, &y) {
                    _ if x == y => 1,
                    (ObjectId::Vertex, ObjectId::Edge(n)) => *n,
                    _ => 0,
                };
                assert_eq!(homs.len(), expected);
            }
        }
    }

    #[test]
    fn composition_examples() {
        let c = FiniteCategory::new(CategoryTag::Simplex, 2);
        let g = MorphismId::new(ObjectId::Ordinal(1), ObjectId::Ordinal(2), vec![0, 2]);
        let f = MorphismId::new(ObjectId::Ordinal(1), ObjectId::Ordinal(1), vec![1, 1]);
        let gf = c.compose(&g, &f).unwrap();
        assert_eq!(gf.data, vec![2, 2]);
        assert_eq!(c.compose(&c.identity(&ObjectId::Ordinal(2)), &g).unwrap(), g);
        assert!(matches!(c.compose(&f, &g), Err(Error::NotComposable { .. })));

        let b = FiniteCategory::new(CategoryTag::Basic, 4);
        let v = MorphismId::leg(2, 4);
        assert_eq!(b.compose(&v, &b.identity(&ObjectId::Vertex)).unwrap(), v);
    }

    #[test]
    fn unknown_objects_are_rejected() {
        let h = FiniteCategory::new(CategoryTag::Hyper, 3);
        assert!(h.hom_set(&ObjectId::Edge(4), &ObjectId::Vertex).is_err());
        let b = FiniteCategory::new(CategoryTag::Basic, 3);
        assert!(!b.contains(&ObjectId::Edge(1)));
        assert!(h.contains(&ObjectId::Edge(1)));
    }

    #[test]
    fn axioms_hold_for_the_roster() {
        let budget = 50_000_000;
        for tag in CategoryTag::ALL {
            let trunc = match tag {
                CategoryTag::Symmetric | CategoryTag::Broadcast | CategoryTag::Preorder => 2,
                _ => 3,
            };
            let report = FiniteCategory::new(tag, trunc).check_category_axioms(budget).unwrap();
            assert!(report.is_ok(), "{tag}: {:?}", report.violations);
        }
    }

    #[test]
    fn axiom_check_respects_budget() {
        let c = FiniteCategory::new(CategoryTag::Symmetric, 4);
        assert!(matches!(c.check_category_axioms(1000), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn faithfulness() {
        assert!(IndexingCategory::new(CategoryTag::Hyper, 5).check_faithful());
        assert!(!IndexingCategory::new(CategoryTag::Graph, 2).check_faithful());
        assert!(IndexingCategory::new(CategoryTag::Broadcast, 4).check_faithful());
        assert!(IndexingCategory::new(CategoryTag::SemiSimplex, 4).check_faithful());
        assert!(IndexingCategory::new(CategoryTag::Preorder, 3).check_faithful());

        // any structure on DeltaG identifies two legs of E_3
        let g = FiniteCategory::new(CategoryTag::Graph, 3);
        let legs = [MorphismId::leg(1, 2), MorphismId::leg(2, 2)];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    let idx = IndexingCategory::with_structure(
                        g,
                        ObjectId::Vertex,
                        vec![ObjectId::Edge(2), ObjectId::Edge(2)],
                        vec![
                            vec![legs[0].clone(), legs[1].clone()],
                            vec![legs[a].clone(), legs[b].clone(), legs[c].clone()],
                        ],
                    )
                    .unwrap();
                    assert!(!idx.check_faithful());
                }
            }
        }
    }

    #[test]
    fn preorder_maps_respect_blocks() {
        let two = ObjectId::Preorder(vec![2]);
        let one_one = ObjectId::Preorder(vec![1, 1]);
        // a tied pair must land in a single block
        assert_eq!(preorder_maps(&two, &one_one), vec![vec![0, 0], vec![1, 1]]);
        // the swap is an automorphism of a two-element block
        let c = FiniteCategory::new(CategoryTag::Preorder, 1);
        let swap = MorphismId::new(two.clone(), two.clone(), vec![1, 0]);
        assert!(c.is_morphism(&swap) && c.is_isomorphism(&swap));
        assert_eq!(preorder_maps(&one_one, &two).len(), 4);
    }

    #[test]
    fn keys_round_trip() {
        for tag in CategoryTag::ALL {
            let c = FiniteCategory::new(tag, 2);
            for a in c.objects() {
                assert_eq!(a.to_string().parse::<ObjectId>().unwrap(), a);
                for b in c.objects() {
                    for m in c.hom_set(&a, &b).unwrap() {
                        assert!(c.is_morphism(&m));
                        assert_eq!(m.to_string().parse::<MorphismId>().unwrap(), m);
                        let json = serde_json::to_string(&m).unwrap();
                        assert_eq!(serde_json::from_str::<MorphismId>(&json).unwrap(), m);
                    }
                }
            }
        }
    }
}

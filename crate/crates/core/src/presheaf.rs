//! Presheaves over truncated indexing categories and their morphisms.
//!
//! A presheaf assigns a finite, ordered set of cells to every object and, to
//! every morphism `m: a -> b`, a function from the cells at `b` to the cells at
//! `a`. Cells are positional; labels are optional and unique per object.
//!
//! Edge direction follows the face maps of a 1-simplex: `d_1` gives the source
//! vertex and `d_0` the target, i.e. the leg `v_1` is the source.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::finite_category::{CategoryTable, CategoryTag, IndexingCategory, MorphismId, ObjectId};

const UNSET: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    pub object: ObjectId,
    pub index: usize,
}

impl CellId {
    pub fn new(object: ObjectId, index: usize) -> Self {
        CellId { object, index }
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.object, self.index)
    }
}

#[derive(Clone, Debug)]
pub struct Presheaf {
    index: IndexingCategory,
    table: Arc<CategoryTable>,
    labels: Vec<Vec<Option<String>>>,
    actions: Vec<Vec<usize>>,
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.labels == other.labels && self.actions == other.actions
    }
}

impl Eq for Presheaf {}

impl Presheaf {
    pub fn empty(index: IndexingCategory) -> Self {
        let table = index.category.table();
        let labels = vec![Vec::new(); table.objects.len()];
        let actions = vec![Vec::new(); table.morphisms.len()];
        Presheaf { index, table, labels, actions }
    }

    /// Builds a presheaf from labels per object and an action per morphism.
    ///
    /// Objects that are absent have no cells; identity actions may be
    /// omitted. Every other morphism whose target has cells needs an action of
    /// the right length. Values are not range-checked here; see
    /// [`Presheaf::validate`].
    pub fn from_parts(
        index: IndexingCategory,
        labels: BTreeMap<ObjectId, Vec<Option<String>>>,
        actions: BTreeMap<MorphismId, Vec<usize>>,
    ) -> Result<Self> {
        let table = index.category.table();
        let mut cell_labels = vec![Vec::new(); table.objects.len()];
        for (object, ls) in labels {
            let o = table.object_index(&object).ok_or_else(|| Error::UnknownObject {
                tag: index.tag(),
                truncation: index.truncation(),
                object: object.clone(),
            })?;
            cell_labels[o] = ls;
        }
        let mut cell_actions: Vec<Option<Vec<usize>>> = vec![None; table.morphisms.len()];
        for (m, values) in actions {
            let k = table
                .morphism_index(&m)
                .ok_or_else(|| Error::InvalidMorphism { tag: index.tag(), morphism: m.clone() })?;
            cell_actions[k] = Some(values);
        }
        let mut out = Vec::with_capacity(table.morphisms.len());
        for (k, given) in cell_actions.into_iter().enumerate() {
            let expected = cell_labels[table.dst[k]].len();
            let values = match given {
                Some(v) => v,
                None if table.is_identity(k) || expected == 0 => {
                    if table.is_identity(k) {
                        (0..expected).collect()
                    } else {
                        Vec::new()
                    }
                }
                None => {
                    return Err(Error::Malformed(format!("missing action for {}", table.morphisms[k])));
                }
            };
            if values.len() != expected {
                return Err(Error::Malformed(format!(
                    "action of {} has {} entries, expected {expected}",
                    table.morphisms[k],
                    values.len()
                )));
            }
            out.push(values);
        }
        Ok(Presheaf { index, table, labels: cell_labels, actions: out })
    }

    pub(crate) fn from_raw(
        index: IndexingCategory,
        labels: Vec<Vec<Option<String>>>,
        actions: Vec<Vec<usize>>,
    ) -> Self {
        let table = index.category.table();
        debug_assert_eq!(labels.len(), table.objects.len());
        debug_assert_eq!(actions.len(), table.morphisms.len());
        Presheaf { index, table, labels, actions }
    }

    /// A semi-simplicial set from its face operators.
    ///
    /// `faces[n - 1][i][x]` is `d_i^n(x)` for an `n`-simplex `x`. Actions of
    /// composite maps are derived by factoring each strictly increasing map
    /// into cofaces in increasing order of the skipped values.
    pub fn from_face_maps(
        index: IndexingCategory,
        labels: Vec<Vec<Option<String>>>,
        faces: &[Vec<Vec<usize>>],
    ) -> Result<Self> {
        if index.tag() != CategoryTag::SemiSimplex {
            return Err(Error::CategoryMismatch(format!("face maps need DeltaGt, got {}", index.tag())));
        }
        let table = index.category.table();
        let t = index.truncation();
        if labels.len() > t + 1 {
            return Err(Error::TruncationOverflow { level: labels.len() - 1, truncation: t });
        }
        let mut levels = labels;
        levels.resize(t + 1, Vec::new());
        for (n, level) in levels.iter().enumerate().skip(1) {
            let f = faces.get(n - 1);
            for i in 0..=n {
                let len = f.and_then(|f| f.get(i)).map_or(0, Vec::len);
                if len != level.len() {
                    return Err(Error::Malformed(format!(
                        "d_{i}^{n} has {len} entries but there are {} {n}-simplices",
                        level.len()
                    )));
                }
            }
        }
        let actions = table
            .morphisms
            .iter()
            .map(|m| {
                let (a, b) = (m.src.level(), m.dst.level());
                let skipped: Vec<usize> = (0..=b).filter(|v| !m.data.contains(v)).collect();
                (0..levels[b].len())
                    .map(|x| {
                        let mut cell = x;
                        for (step, &s) in skipped.iter().enumerate().rev() {
                            let level = a + 1 + step;
                            cell = match faces[level - 1][s].get(cell) {
                                Some(&c) if cell != UNSET => c,
                                _ => UNSET,
                            };
                        }
                        cell
                    })
                    .collect()
            })
            .collect();
        Ok(Presheaf::from_raw(index, levels, actions))
    }

    /// The representable presheaf `Hom(-, object)`.
    pub fn representable(index: IndexingCategory, object: &ObjectId) -> Result<Self> {
        let table = index.category.table();
        let target = table.object_index(object).ok_or_else(|| Error::UnknownObject {
            tag: index.tag(),
            truncation: index.truncation(),
            object: object.clone(),
        })?;
        let labels = (0..table.objects.len())
            .map(|a| table.hom(a, target).iter().map(|&g| Some(table.morphisms[g].to_string())).collect())
            .collect();
        let position = |g: usize| {
            let a = table.src[g];
            table.hom(a, target).iter().position(|&h| h == g).unwrap()
        };
        let actions = (0..table.morphisms.len())
            .map(|u| table.hom(table.dst[u], target).iter().map(|&g| position(table.compose(g, u))).collect())
            .collect();
        Ok(Presheaf::from_raw(index, labels, actions))
    }

    pub fn index(&self) -> &IndexingCategory {
        &self.index
    }

    pub fn table(&self) -> &Arc<CategoryTable> {
        &self.table
    }

    pub fn objects(&self) -> &[ObjectId] {
        &self.table.objects
    }

    fn morphism_index(&self, m: &MorphismId) -> Result<usize> {
        self.table
            .morphism_index(m)
            .ok_or_else(|| Error::InvalidMorphism { tag: self.index.tag(), morphism: m.clone() })
    }

    pub fn cell_count(&self, object: &ObjectId) -> usize {
        self.table.object_index(object).map_or(0, |o| self.labels[o].len())
    }

    /// Cell counts in object order.
    pub fn cell_counts(&self) -> Vec<usize> {
        self.labels.iter().map(Vec::len).collect()
    }

    pub fn total_cells(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn cells(&self, object: &ObjectId) -> impl Iterator<Item = CellId> + '_ {
        let object = object.clone();
        (0..self.cell_count(&object)).map(move |i| CellId::new(object.clone(), i))
    }

    pub fn labels_at(&self, object_index: usize) -> &[Option<String>] {
        &self.labels[object_index]
    }

    pub fn label(&self, cell: &CellId) -> Option<&str> {
        let o = self.table.object_index(&cell.object)?;
        self.labels[o].get(cell.index)?.as_deref()
    }

    pub fn find(&self, object: &ObjectId, label: &str) -> Option<CellId> {
        let o = self.table.object_index(object)?;
        self.labels[o].iter().position(|l| l.as_deref() == Some(label)).map(|i| CellId::new(object.clone(), i))
    }

    /// Action of a morphism `a -> b` as a map from cells at `b` to cells at `a`.
    pub fn action(&self, m: &MorphismId) -> Result<&[usize]> {
        Ok(&self.actions[self.morphism_index(m)?])
    }

    pub fn action_at(&self, morphism_index: usize) -> &[usize] {
        &self.actions[morphism_index]
    }

    /// Pulls `cell` (which must live at the target of `m`) back along `m`.
    pub fn apply(&self, m: &MorphismId, cell: &CellId) -> Result<CellId> {
        if cell.object != m.dst {
            return Err(Error::CategoryMismatch(format!("{cell} does not lie at the target of {m}")));
        }
        let k = self.morphism_index(m)?;
        let value = *self.actions[k].get(cell.index).ok_or_else(|| Error::Malformed(format!("no cell {cell}")))?;
        Ok(CellId::new(m.src.clone(), value))
    }

    /// Largest level with a cell, or -1 when every cell set is empty.
    pub fn dimension(&self) -> i64 {
        self.table
            .objects
            .iter()
            .zip(&self.labels)
            .filter(|(_, cells)| !cells.is_empty())
            .map(|(o, _)| o.level() as i64)
            .max()
            .unwrap_or(-1)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let t = &self.table;
        for (o, labels) in self.labels.iter().enumerate() {
            let mut seen = std::collections::HashSet::new();
            for l in labels.iter().flatten() {
                if !seen.insert(l) {
                    report
                        .violations
                        .push(Violation::DuplicateLabel { object: t.objects[o].clone(), label: l.clone() });
                }
            }
        }
        let mut in_range = true;
        for (k, values) in self.actions.iter().enumerate() {
            let limit = self.labels[t.src[k]].len();
            for (x, &v) in values.iter().enumerate() {
                if v >= limit {
                    in_range = false;
                    report.violations.push(Violation::OutOfRange {
                        morphism: t.morphisms[k].clone(),
                        cell: CellId::new(t.objects[t.dst[k]].clone(), x),
                        value: v,
                    });
                } else if t.is_identity(k) && v != x {
                    report.violations.push(Violation::Identity {
                        object: t.objects[t.src[k]].clone(),
                        cell: x,
                        value: v,
                    });
                }
            }
        }
        if !in_range {
            return report;
        }
        let comp = t.composition();
        for f in 0..t.morphisms.len() {
            if t.is_identity(f) {
                continue;
            }
            for &g in &t.outgoing[t.dst[f]] {
                if t.is_identity(g) {
                    continue;
                }
                let Some(gf) = comp.get(g, f) else { continue };
                let c = t.dst[g];
                for x in 0..self.labels[c].len() {
                    let composite = self.actions[gf][x];
                    let stepwise = self.actions[f][self.actions[g][x]];
                    if composite != stepwise {
                        report.violations.push(Violation::Composition {
                            g: t.morphisms[g].clone(),
                            f: t.morphisms[f].clone(),
                            cell: CellId::new(t.objects[c].clone(), x),
                            composite,
                            stepwise,
                        });
                    }
                }
            }
        }
        report.violations.extend(self.face_identity_violations());
        report
    }

    /// Direct check of `d_i d_j = d_{j-1} d_i` (`i < j`) on every simplex of
    /// dimension at least 2, for presheaves over the simplex categories.
    /// Other categories have no face operators and yield nothing.
    pub fn face_identity_violations(&self) -> Vec<Violation> {
        if !matches!(self.index.tag(), CategoryTag::SemiSimplex | CategoryTag::Simplex) {
            return Vec::new();
        }
        let face = |n: usize, i: usize| -> Option<&[usize]> {
            self.table.morphism_index(&MorphismId::coface(n, i)).map(|k| self.actions[k].as_slice())
        };
        let mut out = Vec::new();
        for n in 2..=self.index.truncation() {
            let count = self.cell_count(&ObjectId::Ordinal(n));
            for j in 1..=n {
                for i in 0..j {
                    let (Some(dj), Some(di), Some(di_low), Some(dj1_low)) =
                        (face(n, j), face(n, i), face(n - 1, i), face(n - 1, j - 1))
                    else {
                        continue;
                    };
                    for x in 0..count {
                        let lhs = dj.get(x).and_then(|&y| di_low.get(y)).copied();
                        let rhs = di.get(x).and_then(|&y| dj1_low.get(y)).copied();
                        if lhs != rhs || lhs.is_none() {
                            out.push(Violation::FaceIdentity {
                                i,
                                j,
                                cell: CellId::new(ObjectId::Ordinal(n), x),
                                lhs: lhs.unwrap_or(UNSET),
                                rhs: rhs.unwrap_or(UNSET),
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// Degeneracy flags, coverage flags and non-identity automorphisms per
    /// object. A cell at `a` is degenerate when it is pulled back along a
    /// non-invertible `a -> b` with `b` at level at most that of `a`; it is
    /// covered when it is pulled back from a nondegenerate cell along any
    /// non-invertible morphism.
    fn structure_flags(&self) -> StructureFlags {
        let t = &self.table;
        let cat = self.index.category;
        let n_obj = t.objects.len();
        let mut degenerate: Vec<Vec<bool>> = self.labels.iter().map(|c| vec![false; c.len()]).collect();
        let mut automorphisms = vec![Vec::new(); n_obj];
        let mut non_iso = Vec::new();
        for u in 0..t.morphisms.len() {
            let m = &t.morphisms[u];
            if cat.is_isomorphism(m) {
                if !t.is_identity(u) {
                    automorphisms[t.src[u]].push(u);
                }
                continue;
            }
            non_iso.push(u);
            if m.dst.level() <= m.src.level() {
                for &x in &self.actions[u] {
                    degenerate[t.src[u]][x] = true;
                }
            }
        }
        let mut covered: Vec<Vec<bool>> = self.labels.iter().map(|c| vec![false; c.len()]).collect();
        for u in non_iso {
            let (a, b) = (t.src[u], t.dst[u]);
            for (y, &x) in self.actions[u].iter().enumerate() {
                if !degenerate[b][y] {
                    covered[a][x] = true;
                }
            }
        }
        (degenerate, covered, automorphisms)
    }

    /// Per-object cell census: raw cells, nondegenerate cells, maximal
    /// (nondegenerate and uncovered) cells, and the latter two up to
    /// automorphisms of the object.
    pub fn census(&self) -> Vec<LevelCensus> {
        let (degenerate, covered, automorphisms) = self.structure_flags();
        (0..self.table.objects.len())
            .map(|a| {
                let n = self.labels[a].len();
                let nondegenerate: Vec<bool> = degenerate[a].iter().map(|d| !d).collect();
                let maximal: Vec<bool> = (0..n).map(|x| nondegenerate[x] && !covered[a][x]).collect();
                let orbits = |keep: &[bool]| count_orbits(n, keep, &automorphisms[a], &self.actions);
                LevelCensus {
                    object: self.table.objects[a].clone(),
                    raw: n,
                    nondegenerate: nondegenerate.iter().filter(|&&k| k).count(),
                    nondegenerate_orbits: orbits(&nondegenerate),
                    maximal: maximal.iter().filter(|&&k| k).count(),
                    maximal_orbits: orbits(&maximal),
                }
            })
            .collect()
    }

    /// Maximal cells, one per automorphism orbit: the generators of the
    /// presheaf.
    pub fn maximal_cells(&self) -> Vec<CellId> {
        let (degenerate, covered, automorphisms) = self.structure_flags();
        let mut out = Vec::new();
        for a in 0..self.table.objects.len() {
            let n = self.labels[a].len();
            let mut claimed = vec![false; n];
            for x in 0..n {
                if degenerate[a][x] || covered[a][x] || claimed[x] {
                    continue;
                }
                let mut stack = vec![x];
                claimed[x] = true;
                while let Some(y) = stack.pop() {
                    for &u in &automorphisms[a] {
                        let z = self.actions[u][y];
                        if !claimed[z] {
                            claimed[z] = true;
                            stack.push(z);
                        }
                    }
                }
                out.push(CellId::new(self.table.objects[a].clone(), x));
            }
        }
        out
    }

    /// Relabels cells at each object into a canonical order: by label, then by
    /// the (already canonical) images under morphisms from earlier objects.
    /// Ties keep their original relative order.
    pub fn canonicalize(&self) -> Presheaf {
        let t = &self.table;
        let n_obj = t.objects.len();
        let mut perm: Vec<Vec<usize>> = vec![Vec::new(); n_obj];
        for b in 0..n_obj {
            let n = self.labels[b].len();
            let signature = |x: usize| -> Vec<usize> {
                t.incoming[b].iter().filter(|&&m| t.src[m] < b).map(|&m| perm[t.src[m]][self.actions[m][x]]).collect()
            };
            let mut order: Vec<usize> = (0..n).collect();
            let keys: Vec<(Option<&String>, Vec<usize>)> =
                (0..n).map(|x| (self.labels[b][x].as_ref(), signature(x))).collect();
            order.sort_by(|&x, &y| keys[x].cmp(&keys[y]));
            let mut p = vec![0; n];
            for (new, &old) in order.iter().enumerate() {
                p[old] = new;
            }
            perm[b] = p;
        }
        self.permuted(&perm)
    }

    /// Applies `perm[object][old] = new` to every cell set.
    pub(crate) fn permuted(&self, perm: &[Vec<usize>]) -> Presheaf {
        let t = &self.table;
        let labels = self
            .labels
            .iter()
            .enumerate()
            .map(|(b, ls)| {
                let mut out = vec![None; ls.len()];
                for (old, l) in ls.iter().enumerate() {
                    out[perm[b][old]] = l.clone();
                }
                out
            })
            .collect();
        let actions = self
            .actions
            .iter()
            .enumerate()
            .map(|(k, values)| {
                let (a, b) = (t.src[k], t.dst[k]);
                let mut out = vec![0; values.len()];
                for (old, &v) in values.iter().enumerate() {
                    out[perm[b][old]] = perm[a][v];
                }
                out
            })
            .collect();
        Presheaf::from_raw(self.index.clone(), labels, actions)
    }

    fn check_ranges(&self) -> Result<()> {
        let t = &self.table;
        for (k, values) in self.actions.iter().enumerate() {
            let limit = self.labels[t.src[k]].len();
            if values.iter().any(|&v| v >= limit) {
                return Err(Error::Malformed(format!("action of {} leaves its cell set", t.morphisms[k])));
            }
        }
        Ok(())
    }
}

fn count_orbits(n: usize, keep: &[bool], automorphisms: &[usize], actions: &[Vec<usize>]) -> usize {
    let mut seen = vec![false; n];
    let mut count = 0;
    for x in 0..n {
        if !keep[x] || seen[x] {
            continue;
        }
        count += 1;
        let mut stack = vec![x];
        seen[x] = true;
        while let Some(y) = stack.pop() {
            for &u in automorphisms {
                let z = actions[u][y];
                if !seen[z] {
                    seen[z] = true;
                    stack.push(z);
                }
            }
        }
    }
    count
}

/// Degeneracy flags, coverage flags and automorphisms, per object.
type StructureFlags = (Vec<Vec<bool>>, Vec<Vec<bool>>, Vec<Vec<usize>>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelCensus {
    pub object: ObjectId,
    pub raw: usize,
    pub nondegenerate: usize,
    pub nondegenerate_orbits: usize,
    pub maximal: usize,
    pub maximal_orbits: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateLabel {
        object: ObjectId,
        label: String,
    },
    OutOfRange {
        morphism: MorphismId,
        cell: CellId,
        value: usize,
    },
    Identity {
        object: ObjectId,
        cell: usize,
        value: usize,
    },
    /// `F(g ∘ f)(cell) != F(f)(F(g)(cell))`.
    Composition {
        g: MorphismId,
        f: MorphismId,
        cell: CellId,
        composite: usize,
        stepwise: usize,
    },
    /// `d_i d_j (cell) != d_{j-1} d_i (cell)`.
    FaceIdentity {
        i: usize,
        j: usize,
        cell: CellId,
        lhs: usize,
        rhs: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateLabel { object, label } => write!(f, "label {label:?} repeated at {object}"),
            Violation::OutOfRange { morphism, cell, value } => {
                write!(f, "action of {morphism} sends {cell} to missing cell {value}")
            }
            Violation::Identity { object, cell, value } => {
                write!(f, "identity of {object} moves cell {cell} to {value}")
            }
            Violation::Composition { g, f: ff, cell, composite, stepwise } => write!(
                f,
                "functoriality fails for ({g}) ∘ ({ff}) at {cell}: composite gives {composite}, steps give {stepwise}"
            ),
            Violation::FaceIdentity { i, j, cell, lhs, rhs } => {
                write!(f, "face identity d_{i} d_{j} = d_{} d_{i} fails at {cell}: {lhs} vs {rhs}", j - 1)
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn face_identity_violations(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| matches!(v, Violation::FaceIdentity { .. }))
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        write!(f, "{} violation(s)", self.violations.len())?;
        for v in self.violations.iter().take(5) {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

/// A natural transformation, stored as one cell function per object (in
/// object order of the shared index category).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PresheafMorphism {
    pub components: Vec<Vec<usize>>,
}

impl PresheafMorphism {
    pub fn identity(p: &Presheaf) -> Self {
        PresheafMorphism { components: p.cell_counts().into_iter().map(|n| (0..n).collect()).collect() }
    }

    pub fn component(&self, object_index: usize) -> &[usize] {
        &self.components[object_index]
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PresheafMorphism) -> PresheafMorphism {
        PresheafMorphism {
            components: first
                .components
                .iter()
                .zip(&self.components)
                .map(|(f, g)| f.iter().map(|&x| g[x]).collect())
                .collect(),
        }
    }

    pub fn apply(&self, cell: &CellId, table: &CategoryTable) -> Option<CellId> {
        let o = table.object_index(&cell.object)?;
        let v = *self.components.get(o)?.get(cell.index)?;
        Some(CellId::new(cell.object.clone(), v))
    }

    /// Every naturality square `α_a ∘ F(m) = G(m) ∘ α_b`, with witnesses.
    pub fn check_naturality(&self, source: &Presheaf, target: &Presheaf) -> NaturalityReport {
        let mut report = NaturalityReport::default();
        if source.index != target.index {
            report.shape_errors.push("source and target have different index categories".into());
            return report;
        }
        let t = &source.table;
        let counts = (source.cell_counts(), target.cell_counts());
        if self.components.len() != t.objects.len() {
            report.shape_errors.push("wrong number of components".into());
            return report;
        }
        for (o, comp) in self.components.iter().enumerate() {
            if comp.len() != counts.0[o] || comp.iter().any(|&v| v >= counts.1[o]) {
                report.shape_errors.push(format!("component at {} is not a map of cell sets", t.objects[o]));
            }
        }
        if !report.shape_errors.is_empty() {
            return report;
        }
        for (m, mid) in t.morphisms.iter().enumerate() {
            if t.is_identity(m) {
                continue;
            }
            let (a, b) = (t.src[m], t.dst[m]);
            for x in 0..counts.0[b] {
                let left = self.components[a][source.actions[m][x]];
                let right = target.actions[m][self.components[b][x]];
                if left != right {
                    report.violations.push(NaturalityViolation {
                        morphism: mid.clone(),
                        cell: CellId::new(t.objects[b].clone(), x),
                        left,
                        right,
                    });
                }
            }
        }
        report
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityViolation {
    pub morphism: MorphismId,
    pub cell: CellId,
    pub left: usize,
    pub right: usize,
}

#[derive(Clone, Debug, Default)]
pub struct NaturalityReport {
    pub shape_errors: Vec<String>,
    pub violations: Vec<NaturalityViolation>,
}

impl NaturalityReport {
    pub fn is_natural(&self) -> bool {
        self.shape_errors.is_empty() && self.violations.is_empty()
    }
}

/// Visits every natural transformation `source -> target` in a deterministic
/// order until `visit` returns `false`. `budget` caps the number of candidate
/// assignments tried.
pub fn for_each_morphism(
    source: &Presheaf,
    target: &Presheaf,
    budget: u64,
    mut visit: impl FnMut(&[Vec<usize>]) -> bool,
) -> Result<()> {
    if source.index != target.index {
        return Err(Error::CategoryMismatch(format!("{} vs {}", source.index.category.tag, target.index.category.tag)));
    }
    source.check_ranges()?;
    target.check_ranges()?;
    let t = &source.table;
    let mut order: Vec<usize> = (0..t.objects.len()).collect();
    order.sort_by_key(|&o| std::cmp::Reverse(t.objects[o].level()));
    let vars: Vec<(usize, usize)> =
        order.iter().flat_map(|&o| (0..source.labels[o].len()).map(move |x| (o, x))).collect();
    let incoming: Vec<Vec<usize>> =
        (0..t.objects.len()).map(|b| t.incoming[b].iter().copied().filter(|&m| !t.is_identity(m)).collect()).collect();
    let mut search = Search {
        table: t,
        source,
        target,
        incoming,
        assign: source.labels.iter().map(|c| vec![UNSET; c.len()]).collect(),
        trail: Vec::new(),
        vars,
        nodes: 0,
        budget,
        stop: false,
    };
    search.run(0, &mut visit)
}

pub fn enumerate_morphisms(source: &Presheaf, target: &Presheaf, budget: u64) -> Result<Vec<PresheafMorphism>> {
    let mut out = Vec::new();
    for_each_morphism(source, target, budget, |c| {
        out.push(PresheafMorphism { components: c.to_vec() });
        true
    })?;
    Ok(out)
}

pub fn count_morphisms(source: &Presheaf, target: &Presheaf, budget: u64) -> Result<u64> {
    let mut n = 0;
    for_each_morphism(source, target, budget, |_| {
        n += 1;
        true
    })?;
    Ok(n)
}

struct Search<'a> {
    table: &'a CategoryTable,
    source: &'a Presheaf,
    target: &'a Presheaf,
    incoming: Vec<Vec<usize>>,
    assign: Vec<Vec<usize>>,
    trail: Vec<(usize, usize)>,
    vars: Vec<(usize, usize)>,
    nodes: u64,
    budget: u64,
    stop: bool,
}

impl Search<'_> {
    /// Sets `α_b(x) = y` and everything it forces; `false` on conflict.
    fn assign(&mut self, b: usize, x: usize, y: usize) -> bool {
        let mut pending = vec![(b, x, y)];
        while let Some((b, x, y)) = pending.pop() {
            let current = self.assign[b][x];
            if current != UNSET {
                if current != y {
                    return false;
                }
                continue;
            }
            self.assign[b][x] = y;
            self.trail.push((b, x));
            for &m in &self.incoming[b] {
                let a = self.table.src[m];
                pending.push((a, self.source.actions[m][x], self.target.actions[m][y]));
            }
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (b, x) = self.trail.pop().unwrap();
            self.assign[b][x] = UNSET;
        }
    }

    fn bound(&self) -> String {
        let log: f64 = self
            .source
            .labels
            .iter()
            .zip(&self.target.labels)
            .map(|(s, t)| s.len() as f64 * (t.len().max(1) as f64).log10())
            .sum();
        format!("10^{log:.1}")
    }

    fn run(&mut self, mut next: usize, visit: &mut dyn FnMut(&[Vec<usize>]) -> bool) -> Result<()> {
        while next < self.vars.len() && self.assign[self.vars[next].0][self.vars[next].1] != UNSET {
            next += 1;
        }
        if next == self.vars.len() {
            if !visit(&self.assign) {
                self.stop = true;
            }
            return Ok(());
        }
        let (b, x) = self.vars[next];
        for y in 0..self.target.labels[b].len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::BudgetExceeded { budget: self.budget, bound: self.bound() });
            }
            let mark = self.trail.len();
            if self.assign(b, x, y) {
                self.run(next + 1, visit)?;
            }
            self.undo(mark);
            if self.stop {
                break;
            }
        }
        Ok(())
    }
}

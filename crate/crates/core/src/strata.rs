//! Finite truncated stratified simplicial sets in Eilenberg-Zilber normal
//! form, with stratified maps, subsets, images and glueing-square checks.
//!
//! A set is presented by its non-degenerate generators per dimension, a
//! face table sending each generator to normalized `SimplexRef`s one
//! dimension down, and a thin flag per generator of dimension >= 1. Every
//! simplex is named by a unique `(generator, surjection)` pair; degenerate
//! simplices are thin by construction.
//!
//! Sets, maps and subsets are immutable after validation and all queries
//! are pure. Generator identity is by stable name, which makes
//! serialization and certificate replay reproducible.

use crate::delta_ops::{all_epis, DeltaError, Operator};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StrataError {
    #[error("operator error: {0}")]
    Delta(#[from] DeltaError),
    #[error("dimension {dim} exceeds truncation {trunc}")]
    DimensionOutOfRange { dim: usize, trunc: usize },
    #[error("duplicate generator name `{0}` in dimension {1}")]
    DuplicateName(String, usize),
    #[error("unknown generator `{0}` in dimension {1}")]
    UnknownGenerator(String, usize),
    #[error("generator `{name}` of dimension {dim} needs {expected} faces, got {got}")]
    FaceCount { name: String, dim: usize, expected: usize, got: usize },
    #[error("invalid set: {0}")]
    Invalid(String),
    #[error("subsets/maps belong to different ambient sets")]
    AmbientMismatch,
    #[error("map is not defined on generator `{0}`")]
    MissingAssignment(String),
}

/// Index of a generator: dimension and position within that dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GenId {
    pub dim: usize,
    pub idx: usize,
}

/// A simplex in EZ normal form: a generator acted on by a surjection.
/// The identity surjection names the generator itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SimplexRef {
    pub gen: GenId,
    pub deg: Operator,
}

impl SimplexRef {
    pub fn dim(&self) -> usize {
        self.deg.dom() as usize
    }

    pub fn is_degenerate(&self) -> bool {
        !self.deg.is_identity()
    }
}

#[derive(Debug, Clone, Default)]
struct Level {
    names: Vec<String>,
    faces: Vec<Vec<SimplexRef>>,
    thin: Vec<bool>,
    index: BTreeMap<String, usize>,
}

/// A dimension-bounded stratified simplicial set presented by generators.
#[derive(Debug, Clone)]
pub struct TruncatedStratifiedSet {
    truncation: usize,
    levels: Vec<Level>,
}

/// Incremental builder; `build` validates the finished presentation.
pub struct SetBuilder {
    set: TruncatedStratifiedSet,
}

impl SetBuilder {
    pub fn new(truncation: usize) -> Self {
        SetBuilder {
            set: TruncatedStratifiedSet {
                truncation,
                levels: vec![Level::default(); truncation + 1],
            },
        }
    }

    pub fn add_generator(
        &mut self,
        dim: usize,
        name: impl Into<String>,
        faces: Vec<SimplexRef>,
        thin: bool,
    ) -> Result<GenId, StrataError> {
        let name = name.into();
        if dim > self.set.truncation {
            return Err(StrataError::DimensionOutOfRange { dim, trunc: self.set.truncation });
        }
        let expected = if dim == 0 { 0 } else { dim + 1 };
        if faces.len() != expected {
            return Err(StrataError::FaceCount { name, dim, expected, got: faces.len() });
        }
        if thin && dim == 0 {
            return Err(StrataError::Invalid(format!("0-simplex `{name}` cannot be thin")));
        }
        let level = &mut self.set.levels[dim];
        if level.index.contains_key(&name) {
            return Err(StrataError::DuplicateName(name, dim));
        }
        let idx = level.names.len();
        level.index.insert(name.clone(), idx);
        level.names.push(name);
        level.faces.push(faces);
        level.thin.push(thin);
        Ok(GenId { dim, idx })
    }

    /// Number of generators added so far in a dimension.
    pub fn count(&self, dim: usize) -> usize {
        self.set.levels[dim].names.len()
    }

    pub fn lookup(&self, dim: usize, name: &str) -> Option<GenId> {
        self.set.levels.get(dim)?.index.get(name).map(|&idx| GenId { dim, idx })
    }

    pub fn build(self) -> Result<TruncatedStratifiedSet, StrataError> {
        let report = self.set.validate();
        if !report.is_valid() {
            return Err(StrataError::Invalid(report.to_string()));
        }
        Ok(self.set)
    }

    /// Skips validation; for constructors that validate by other means.
    pub fn build_unchecked(self) -> TruncatedStratifiedSet {
        self.set
    }
}

/// Validation outcome listing every violation found.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            write!(f, "valid")
        } else {
            write!(f, "{} violation(s): {}", self.violations.len(), self.violations.join("; "))
        }
    }
}

impl TruncatedStratifiedSet {
    pub fn empty(truncation: usize) -> Self {
        TruncatedStratifiedSet { truncation, levels: vec![Level::default(); truncation + 1] }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn gen_count(&self, dim: usize) -> usize {
        self.levels.get(dim).map_or(0, |l| l.names.len())
    }

    pub fn total_gens(&self) -> usize {
        self.levels.iter().map(|l| l.names.len()).sum()
    }

    pub fn gen_counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.names.len()).collect()
    }

    pub fn name(&self, g: GenId) -> &str {
        &self.levels[g.dim].names[g.idx]
    }

    pub fn thin_flag(&self, g: GenId) -> bool {
        self.levels[g.dim].thin[g.idx]
    }

    pub fn faces(&self, g: GenId) -> &[SimplexRef] {
        &self.levels[g.dim].faces[g.idx]
    }

    pub fn face(&self, g: GenId, i: usize) -> &SimplexRef {
        &self.levels[g.dim].faces[g.idx][i]
    }

    pub fn gen_by_name(&self, dim: usize, name: &str) -> Option<GenId> {
        self.levels.get(dim)?.index.get(name).map(|&idx| GenId { dim, idx })
    }

    pub fn gens(&self, dim: usize) -> impl Iterator<Item = GenId> + '_ {
        let count = self.gen_count(dim);
        (0..count).map(move |idx| GenId { dim, idx })
    }

    pub fn all_gens(&self) -> impl Iterator<Item = GenId> + '_ {
        (0..=self.truncation).flat_map(move |dim| self.gens(dim))
    }

    /// The identity reference naming a generator.
    pub fn ref_of(&self, g: GenId) -> SimplexRef {
        SimplexRef { gen: g, deg: Operator::identity(g.dim as i32) }
    }

    /// All simplices of a dimension: generators of dimension <= dim acted
    /// on by every surjection, in canonical (generator, epi) order.
    pub fn refs_of_dim(&self, dim: usize) -> Vec<SimplexRef> {
        let mut out = Vec::new();
        for d in 0..=dim.min(self.truncation) {
            for g in self.gens(d) {
                for epi in all_epis(dim as i32, d as i32) {
                    out.push(SimplexRef { gen: g, deg: epi });
                }
            }
        }
        out
    }

    /// The partial right action `x . alpha`, EZ-normalized. Operators
    /// out of the empty ordinal are rejected: the carrier holds no
    /// augmentation elements.
    pub fn act(&self, x: &SimplexRef, alpha: &Operator) -> Result<SimplexRef, StrataError> {
        if alpha.dom() < 0 {
            return Err(StrataError::Delta(DeltaError::EmptyOrdinal));
        }
        let theta = x.deg.compose(alpha)?;
        let (epi, mono) = theta.ez_factor();
        let walked = self.walk_mono(x.gen, &mono)?;
        Ok(SimplexRef { gen: walked.gen, deg: walked.deg.compose(&epi)? })
    }

    fn walk_mono(&self, g: GenId, mono: &Operator) -> Result<SimplexRef, StrataError> {
        if mono.is_identity() {
            return Ok(self.ref_of(g));
        }
        // Split off the top missing index: mono = delta_j . rest.
        let n = mono.cod() as u32;
        let j = (0..=n).rev().find(|&v| !mono.image_contains(v)).expect("non-identity mono");
        let below: Vec<u32> =
            mono.images().iter().map(|&v| if v > j { v - 1 } else { v }).collect();
        let rest = Operator::new(mono.cod() - 1, below)?;
        let f = self.face(g, j as usize).clone();
        self.act(&f, &rest)
    }

    /// A simplex is thin iff it is degenerate or its generator is flagged.
    pub fn is_thin(&self, x: &SimplexRef) -> bool {
        x.is_degenerate() || self.thin_flag(x.gen)
    }

    /// Checks all presentation invariants: face dimensions, simplicial
    /// identities after normalization, and thinness constraints.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for dim in 0..=self.truncation {
            for g in self.gens(dim) {
                for (i, f) in self.faces(g).iter().enumerate() {
                    if f.dim() + 1 != dim {
                        report.violations.push(format!(
                            "face {i} of `{}` has dimension {} in dimension-{dim} slot",
                            self.name(g),
                            f.dim()
                        ));
                        continue;
                    }
                    if f.gen.dim > self.truncation
                        || f.gen.idx >= self.gen_count(f.gen.dim)
                        || !f.deg.is_surjective()
                        || f.deg.cod() != f.gen.dim as i32
                    {
                        report.violations.push(format!(
                            "face {i} of `{}` is not a valid normal form",
                            self.name(g)
                        ));
                    }
                }
                if dim < 2 {
                    continue;
                }
                // d_i d_j = d_{j-1} d_i for i < j, on normalized refs.
                for j in 1..=dim {
                    for i in 0..j {
                        let di = Operator::face(dim as u32 - 1, i as u32).unwrap();
                        let dj1 = Operator::face(dim as u32 - 1, j as u32 - 1).unwrap();
                        let lhs = self.act(self.face(g, j), &di);
                        let rhs = self.act(self.face(g, i), &dj1);
                        match (lhs, rhs) {
                            (Ok(a), Ok(b)) if a == b => {}
                            (Ok(a), Ok(b)) => report.violations.push(format!(
                                "simplicial identity fails at `{}`: d_{i} d_{j} = {a:?} but d_{} d_{i} = {b:?}",
                                self.name(g),
                                j - 1
                            )),
                            _ => report.violations.push(format!(
                                "face action failed at `{}` (i={i}, j={j})",
                                self.name(g)
                            )),
                        }
                    }
                }
            }
        }
        report
    }

    /// Returns a copy truncated at `d`. Raising the bound adds no
    /// generators; lowering it drops every generator above `d`.
    pub fn with_truncation(&self, d: usize) -> TruncatedStratifiedSet {
        let mut levels = self.levels.clone();
        levels.truncate(d + 1);
        levels.resize(d + 1, Level::default());
        TruncatedStratifiedSet { truncation: d, levels }
    }

    /// Shape fingerprint used to detect accidental cross-set references.
    pub fn same_shape(&self, other: &TruncatedStratifiedSet) -> bool {
        self.truncation == other.truncation
            && (0..=self.truncation).all(|d| self.levels[d].names == other.levels[d].names)
    }
}

// ---------------------------------------------------------------------------
// Stratified maps
// ---------------------------------------------------------------------------

/// A stratified map presented by generator-wise assignments; `assignment`
/// mirrors the source's generator layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratifiedMap {
    pub assignment: Vec<Vec<SimplexRef>>,
}

impl StratifiedMap {
    pub fn identity(x: &TruncatedStratifiedSet) -> Self {
        StratifiedMap {
            assignment: (0..=x.truncation())
                .map(|d| x.gens(d).map(|g| x.ref_of(g)).collect())
                .collect(),
        }
    }

    pub fn get(&self, g: GenId) -> &SimplexRef {
        &self.assignment[g.dim][g.idx]
    }

    /// Image of an arbitrary simplex: `f(x . beta) = f(x) . beta`.
    pub fn apply(
        &self,
        target: &TruncatedStratifiedSet,
        x: &SimplexRef,
    ) -> Result<SimplexRef, StrataError> {
        target.act(self.get(x.gen), &x.deg)
    }

    /// Composite `self . inner` as a map from `inner`'s source.
    pub fn compose(
        &self,
        inner: &StratifiedMap,
        mid_target: &TruncatedStratifiedSet,
    ) -> Result<StratifiedMap, StrataError> {
        let assignment = inner
            .assignment
            .iter()
            .map(|level| level.iter().map(|r| self.apply(mid_target, r)).collect())
            .collect::<Result<_, _>>()?;
        Ok(StratifiedMap { assignment })
    }

    /// Face-compatibility and thinness-preservation check; every
    /// violation is reported with the offending generator.
    pub fn validate(
        &self,
        source: &TruncatedStratifiedSet,
        target: &TruncatedStratifiedSet,
    ) -> ValidationReport {
        let mut report = ValidationReport::default();
        for dim in 0..=source.truncation() {
            if self.assignment.len() <= dim || self.assignment[dim].len() != source.gen_count(dim) {
                report.violations.push(format!("assignment missing for dimension {dim}"));
                continue;
            }
            for g in source.gens(dim) {
                let img = self.get(g);
                if img.dim() != dim {
                    report.violations.push(format!(
                        "`{}` of dimension {dim} mapped to a {}-simplex",
                        source.name(g),
                        img.dim()
                    ));
                    continue;
                }
                for (i, f) in source.faces(g).iter().enumerate() {
                    let delta = Operator::face(dim as u32, i as u32).unwrap();
                    let lhs = self.apply(target, f);
                    let rhs = target.act(img, &delta);
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) if a == b => {}
                        _ => report.violations.push(format!(
                            "face {i} of `{}` incompatible with image",
                            source.name(g)
                        )),
                    }
                }
                if source.thin_flag(g) && !target.is_thin(img) {
                    report.violations.push(format!(
                        "thinness violated: `{}` is thin but its image is not",
                        source.name(g)
                    ));
                }
            }
        }
        report
    }

    /// Whether the map is a stratified isomorphism onto the target.
    pub fn is_isomorphism(
        &self,
        source: &TruncatedStratifiedSet,
        target: &TruncatedStratifiedSet,
    ) -> bool {
        if !self.validate(source, target).is_valid() {
            return false;
        }
        for dim in 0..=source.truncation() {
            if source.gen_count(dim) != target.gen_count(dim) {
                return false;
            }
            let mut seen = BTreeSet::new();
            for g in source.gens(dim) {
                let img = self.get(g);
                if img.is_degenerate() || !seen.insert(img.gen) {
                    return false;
                }
                if source.thin_flag(g) != target.thin_flag(img.gen) {
                    return false;
                }
            }
        }
        true
    }
}

// ---------------------------------------------------------------------------
// Subsets
// ---------------------------------------------------------------------------

/// A face-closed set of generators with thin flags bounded by the ambient
/// flags. Represents a stratified subset of its ambient set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Subset {
    pub members: Vec<Vec<bool>>,
    pub flags: Vec<Vec<bool>>,
}

/// Flag policy used by `generated_subset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMode {
    /// Face closure of the seeds with ambient flags restricted to it.
    Regular,
    /// All generators, with flags the ambient flags restricted to the
    /// face closure of the seeds.
    EntireFromFlags,
}

impl Subset {
    pub fn empty(x: &TruncatedStratifiedSet) -> Self {
        Subset {
            members: (0..=x.truncation()).map(|d| vec![false; x.gen_count(d)]).collect(),
            flags: (0..=x.truncation()).map(|d| vec![false; x.gen_count(d)]).collect(),
        }
    }

    /// The whole set with its ambient flags.
    pub fn full(x: &TruncatedStratifiedSet) -> Self {
        Subset {
            members: (0..=x.truncation()).map(|d| vec![true; x.gen_count(d)]).collect(),
            flags: (0..=x.truncation())
                .map(|d| x.gens(d).map(|g| x.thin_flag(g)).collect())
                .collect(),
        }
    }

    /// All generators, flags chosen by a predicate (clipped to ambient).
    pub fn entire_with_flags(x: &TruncatedStratifiedSet, thin: impl Fn(GenId) -> bool) -> Self {
        Subset {
            members: (0..=x.truncation()).map(|d| vec![true; x.gen_count(d)]).collect(),
            flags: (0..=x.truncation())
                .map(|d| x.gens(d).map(|g| x.thin_flag(g) && thin(g)).collect())
                .collect(),
        }
    }

    pub fn contains(&self, g: GenId) -> bool {
        self.members[g.dim][g.idx]
    }

    pub fn contains_ref(&self, x: &SimplexRef) -> bool {
        self.contains(x.gen)
    }

    pub fn flagged(&self, g: GenId) -> bool {
        self.flags[g.dim][g.idx]
    }

    /// Thinness of a simplex inside the subset.
    pub fn is_thin(&self, x: &SimplexRef) -> bool {
        self.contains(x.gen) && (x.is_degenerate() || self.flagged(x.gen))
    }

    pub fn insert(&mut self, g: GenId) {
        self.members[g.dim][g.idx] = true;
    }

    pub fn flag(&mut self, g: GenId) {
        self.flags[g.dim][g.idx] = true;
    }

    pub fn member_count(&self) -> usize {
        self.members.iter().map(|l| l.iter().filter(|&&b| b).count()).sum()
    }

    pub fn member_ids(&self) -> Vec<GenId> {
        let mut out = Vec::new();
        for (dim, level) in self.members.iter().enumerate() {
            for (idx, &m) in level.iter().enumerate() {
                if m {
                    out.push(GenId { dim, idx });
                }
            }
        }
        out
    }

    pub fn flagged_ids(&self) -> Vec<GenId> {
        let mut out = Vec::new();
        for (dim, level) in self.flags.iter().enumerate() {
            for (idx, &m) in level.iter().enumerate() {
                if m {
                    out.push(GenId { dim, idx });
                }
            }
        }
        out
    }

    pub fn is_subset_of(&self, other: &Subset) -> bool {
        let le = |a: &Vec<Vec<bool>>, b: &Vec<Vec<bool>>| {
            a.iter().zip(b).all(|(la, lb)| la.iter().zip(lb).all(|(&x, &y)| !x || y))
        };
        le(&self.members, &other.members) && le(&self.flags, &other.flags)
    }

    pub fn is_entire(&self) -> bool {
        self.members.iter().all(|l| l.iter().all(|&b| b))
    }

    pub fn is_regular(&self, x: &TruncatedStratifiedSet) -> bool {
        x.all_gens().all(|g| {
            if g.dim == 0 {
                !self.flagged(g)
            } else {
                self.flagged(g) == (self.contains(g) && x.thin_flag(g))
            }
        })
    }

    /// Checks face closure and flag bounds against the ambient set.
    pub fn validate(&self, x: &TruncatedStratifiedSet) -> ValidationReport {
        let mut report = ValidationReport::default();
        if self.members.len() != x.truncation() + 1 {
            report.violations.push("subset level count differs from ambient".into());
            return report;
        }
        for g in x.all_gens() {
            if self.flagged(g) && !self.contains(g) {
                report.violations.push(format!("flag on non-member `{}`", x.name(g)));
            }
            if self.flagged(g) && !x.thin_flag(g) {
                report
                    .violations
                    .push(format!("flag on `{}` exceeds ambient stratification", x.name(g)));
            }
            if self.contains(g) {
                for f in x.faces(g) {
                    if !self.contains(f.gen) {
                        report.violations.push(format!(
                            "not face-closed: `{}` present, face `{}` missing",
                            x.name(g),
                            x.name(f.gen)
                        ));
                    }
                }
            }
        }
        report
    }
}

/// Face closure of a set of seed simplices, with flags per `mode`.
pub fn generated_subset(
    x: &TruncatedStratifiedSet,
    seeds: &[SimplexRef],
    mode: SubsetMode,
) -> Subset {
    let mut closure = Subset::empty(x);
    let mut queue: VecDeque<GenId> = seeds.iter().map(|r| r.gen).collect();
    while let Some(g) = queue.pop_front() {
        if closure.contains(g) {
            continue;
        }
        closure.insert(g);
        for f in x.faces(g) {
            queue.push_back(f.gen);
        }
    }
    match mode {
        SubsetMode::Regular => {
            for g in x.all_gens() {
                if g.dim >= 1 && closure.contains(g) && x.thin_flag(g) {
                    closure.flag(g);
                }
            }
            closure
        }
        SubsetMode::EntireFromFlags => {
            let mut out = Subset::full(x);
            out.flags = (0..=x.truncation())
                .map(|d| x.gens(d).map(|g| closure.contains(g) && x.thin_flag(g)).collect())
                .collect();
            out
        }
    }
}

pub fn subset_union(a: &Subset, b: &Subset) -> Result<Subset, StrataError> {
    zip_subsets(a, b, |x, y| x || y)
}

pub fn subset_intersection(a: &Subset, b: &Subset) -> Result<Subset, StrataError> {
    zip_subsets(a, b, |x, y| x && y)
}

fn zip_subsets(
    a: &Subset,
    b: &Subset,
    f: impl Fn(bool, bool) -> bool,
) -> Result<Subset, StrataError> {
    if a.members.len() != b.members.len()
        || a.members.iter().zip(&b.members).any(|(x, y)| x.len() != y.len())
    {
        return Err(StrataError::AmbientMismatch);
    }
    let zip = |u: &Vec<Vec<bool>>, v: &Vec<Vec<bool>>| {
        u.iter()
            .zip(v)
            .map(|(lu, lv)| lu.iter().zip(lv).map(|(&x, &y)| f(x, y)).collect())
            .collect()
    };
    Ok(Subset { members: zip(&a.members, &b.members), flags: zip(&a.flags, &b.flags) })
}

/// Direct image `f(U)` as a subset of the target.
pub fn direct_image(
    f: &StratifiedMap,
    source: &TruncatedStratifiedSet,
    target: &TruncatedStratifiedSet,
    u: &Subset,
) -> Result<Subset, StrataError> {
    let mut out = Subset::empty(target);
    for g in source.all_gens() {
        if !u.contains(g) {
            continue;
        }
        let img = f.get(g);
        out.insert(img.gen);
        if u.flagged(g) && !img.is_degenerate() {
            out.flag(img.gen);
        }
    }
    // Face closure: a non-degenerate image can have faces whose
    // generators are not themselves direct images of generators.
    let mut changed = true;
    while changed {
        changed = false;
        for g in target.all_gens() {
            if out.contains(g) {
                for face in target.faces(g) {
                    if !out.contains(face.gen) {
                        out.insert(face.gen);
                        changed = true;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Inverse image `f^{-1}(V)` as a subset of the source; thin where the
/// image is thin in `V`.
pub fn inverse_image(
    f: &StratifiedMap,
    source: &TruncatedStratifiedSet,
    v: &Subset,
) -> Result<Subset, StrataError> {
    let mut out = Subset::empty(source);
    for g in source.all_gens() {
        let img = f.get(g);
        if v.contains_ref(img) {
            out.insert(g);
            if g.dim >= 1 && v.is_thin(img) {
                out.flag(g);
            }
        }
    }
    Ok(out)
}

/// Glueing-square test around an inclusion `i : U -> X` and a subset `V`
/// of `X`: the square is a glueing square iff the stated corner equals
/// the pullback of `V` along `i` exactly, members and flags. The
/// pullback carries the flags thin in both legs, so it can be strictly
/// smaller than the one-sided inverse image.
pub fn is_glueing_square(
    i: &StratifiedMap,
    source: &TruncatedStratifiedSet,
    v: &Subset,
    corner: &Subset,
) -> Result<bool, StrataError> {
    let mut pre = inverse_image(i, source, v)?;
    for g in source.all_gens() {
        if g.dim >= 1 && pre.flagged(g) && !source.thin_flag(g) {
            pre.flags[g.dim][g.idx] = false;
        }
    }
    Ok(pre == *corner)
}

/// Materializes a subset as a standalone set, keeping generator names.
pub fn extract(
    x: &TruncatedStratifiedSet,
    u: &Subset,
) -> Result<TruncatedStratifiedSet, StrataError> {
    let mut builder = SetBuilder::new(x.truncation());
    let mut remap: BTreeMap<GenId, GenId> = BTreeMap::new();
    for dim in 0..=x.truncation() {
        for g in x.gens(dim) {
            if !u.contains(g) {
                continue;
            }
            let faces = x
                .faces(g)
                .iter()
                .map(|f| SimplexRef { gen: remap[&f.gen], deg: f.deg.clone() })
                .collect();
            let id = builder.add_generator(dim, x.name(g), faces, u.flagged(g))?;
            remap.insert(g, id);
        }
    }
    builder.build()
}

/// Finds the subset of `x` whose members carry the same names as the
/// generators of `small`, with `small`'s flags; errors when a generator
/// is missing, a face disagrees, or a flag exceeds the ambient one.
pub fn locate_subset(
    x: &TruncatedStratifiedSet,
    small: &TruncatedStratifiedSet,
) -> Result<Subset, StrataError> {
    let mut out = Subset::empty(x);
    for dim in 0..=small.truncation().min(x.truncation()) {
        for g in small.gens(dim) {
            let name = small.name(g);
            let here = x
                .gen_by_name(dim, name)
                .ok_or_else(|| StrataError::UnknownGenerator(name.to_string(), dim))?;
            for (i, f) in small.faces(g).iter().enumerate() {
                let fx = x.face(here, i);
                if small.name(f.gen) != x.name(fx.gen) || f.deg != fx.deg {
                    return Err(StrataError::Invalid(format!(
                        "face {i} of `{name}` disagrees between subset and ambient"
                    )));
                }
            }
            if small.thin_flag(g) && !x.thin_flag(here) {
                return Err(StrataError::Invalid(format!(
                    "flag on `{name}` exceeds ambient stratification"
                )));
            }
            out.insert(here);
            if small.thin_flag(g) {
                out.flag(here);
            }
        }
    }
    Ok(out)
}

/// The inclusion of an extracted subset back into its ambient set, as a
/// stratified map matched by generator names.
pub fn inclusion_map(
    small: &TruncatedStratifiedSet,
    ambient: &TruncatedStratifiedSet,
) -> Result<StratifiedMap, StrataError> {
    let mut assignment = Vec::with_capacity(small.truncation() + 1);
    for dim in 0..=small.truncation() {
        let mut level = Vec::with_capacity(small.gen_count(dim));
        for g in small.gens(dim) {
            let name = small.name(g);
            let here = ambient
                .gen_by_name(dim, name)
                .ok_or_else(|| StrataError::UnknownGenerator(name.to_string(), dim))?;
            level.push(ambient.ref_of(here));
        }
        assignment.push(level);
    }
    Ok(StratifiedMap { assignment })
}

// ---------------------------------------------------------------------------
// Products of underlying simplicial sets
// ---------------------------------------------------------------------------

/// Product of underlying simplicial sets: generators are jointly
/// non-degenerate pairs, the component refs are recorded per generator.
/// No stratification is chosen; all flags are off.
#[derive(Debug, Clone)]
pub struct Product {
    pub set: TruncatedStratifiedSet,
    pub pairs: Vec<Vec<(SimplexRef, SimplexRef)>>,
}

impl Product {
    pub fn components(&self, g: GenId) -> &(SimplexRef, SimplexRef) {
        &self.pairs[g.dim][g.idx]
    }

    /// Components of an arbitrary simplex of the product.
    pub fn components_of(&self, x: &SimplexRef) -> (SimplexRef, SimplexRef) {
        let (a, b) = self.components(x.gen);
        (
            SimplexRef { gen: a.gen, deg: a.deg.compose(&x.deg).unwrap() },
            SimplexRef { gen: b.gen, deg: b.deg.compose(&x.deg).unwrap() },
        )
    }

    /// The generator with the given component refs, if present.
    pub fn pair_gen(&self, a: &SimplexRef, b: &SimplexRef) -> Option<GenId> {
        let dim = a.dim();
        self.pairs
            .get(dim)?
            .iter()
            .position(|(pa, pb)| pa == a && pb == b)
            .map(|idx| GenId { dim, idx })
    }

    /// Normal form of an arbitrary pair of equal-dimension refs.
    pub fn pair_ref(&self, a: &SimplexRef, b: &SimplexRef) -> Option<SimplexRef> {
        let (na, nb, shared) = joint_normal_form(a, b);
        let gen = self.pair_gen(&na, &nb)?;
        Some(SimplexRef { gen, deg: shared })
    }
}

pub fn ref_label(x: &TruncatedStratifiedSet, r: &SimplexRef) -> String {
    if r.deg.is_identity() {
        x.name(r.gen).to_string()
    } else {
        let images: Vec<String> = r.deg.images().iter().map(|v| v.to_string()).collect();
        format!("{}*{}", x.name(r.gen), images.join("."))
    }
}

pub fn pair_name(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    a: &SimplexRef,
    b: &SimplexRef,
) -> String {
    format!("({}|{})", ref_label(x, a), ref_label(y, b))
}

/// Joint EZ normal form of a pair of equal-dimension refs: strips the
/// common degeneracies, returning the jointly non-degenerate pair and the
/// shared surjection, so that the input is the pair acted on by it.
pub fn joint_normal_form(a: &SimplexRef, b: &SimplexRef) -> (SimplexRef, SimplexRef, Operator) {
    let mut da = a.deg.clone();
    let mut db = b.deg.clone();
    let mut shared = Operator::identity(a.deg.dom());
    loop {
        let r = da.dom();
        let mut collapsed = None;
        for j in 0..r.max(0) as usize {
            if da.collapses_at(j) && db.collapses_at(j) {
                collapsed = Some(j);
                break;
            }
        }
        match collapsed {
            None => break,
            Some(j) => {
                // Drop position j+1 from both; record sigma_j.
                let strip = |op: &Operator| {
                    let mut im = op.images().to_vec();
                    im.remove(j + 1);
                    Operator::new(op.cod(), im).unwrap()
                };
                da = strip(&da);
                db = strip(&db);
                let sigma = Operator::degeneracy(da.dom() as u32, j as u32).unwrap();
                shared = sigma.compose(&shared).unwrap();
            }
        }
    }
    (SimplexRef { gen: a.gen, deg: da }, SimplexRef { gen: b.gen, deg: db }, shared)
}

/// Builds the product of underlying simplicial sets, truncated at the
/// common truncation of the factors.
#[allow(clippy::needless_range_loop)]
pub fn product_underlying(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
) -> Result<Product, StrataError> {
    if x.truncation() != y.truncation() {
        return Err(StrataError::AmbientMismatch);
    }
    let trunc = x.truncation();
    let mut builder = SetBuilder::new(trunc);
    let mut pairs: Vec<Vec<(SimplexRef, SimplexRef)>> = vec![Vec::new(); trunc + 1];
    let mut index: BTreeMap<(SimplexRef, SimplexRef), GenId> = BTreeMap::new();
    for dim in 0..=trunc {
        for a in x.refs_of_dim(dim) {
            'next: for b in y.refs_of_dim(dim) {
                for j in 0..dim {
                    if a.deg.collapses_at(j) && b.deg.collapses_at(j) {
                        continue 'next;
                    }
                }
                let mut faces = Vec::with_capacity(dim + 1);
                if dim > 0 {
                    for i in 0..=dim {
                        let delta = Operator::face(dim as u32, i as u32).unwrap();
                        let fa = x.act(&a, &delta)?;
                        let fb = y.act(&b, &delta)?;
                        let (na, nb, epi) = joint_normal_form(&fa, &fb);
                        let gen = index[&(na, nb)];
                        faces.push(SimplexRef { gen, deg: epi });
                    }
                }
                let name = pair_name(x, y, &a, &b);
                let id = builder.add_generator(dim, name, faces, false)?;
                index.insert((a.clone(), b.clone()), id);
                pairs[dim].push((a.clone(), b.clone()));
            }
        }
    }
    Ok(Product { set: builder.build()?, pairs })
}

// ---------------------------------------------------------------------------
// Isomorphism search
// ---------------------------------------------------------------------------

/// Outcome of the backtracking isomorphism search. `exhausted` is true
/// when the search space was fully explored, so `iso == None` means the
/// sets are genuinely non-isomorphic rather than undecided.
pub struct IsoOutcome {
    pub iso: Option<StratifiedMap>,
    pub exhausted: bool,
    pub nodes: u64,
}

/// Backtracking search over generator bijections preserving faces and
/// flags; `budget` bounds the number of search nodes. A `partial` seed
/// pins chosen generators (e.g. vertices) to forced images.
pub fn isomorphic(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    partial: &[(GenId, GenId)],
    budget: u64,
) -> IsoOutcome {
    let mut outcome = IsoOutcome { iso: None, exhausted: true, nodes: 0 };
    if x.truncation() != y.truncation()
        || (0..=x.truncation()).any(|d| x.gen_count(d) != y.gen_count(d))
    {
        return outcome;
    }
    let order: Vec<GenId> = (0..=x.truncation()).flat_map(|d| x.gens(d)).collect();
    let mut assign: BTreeMap<GenId, GenId> = partial.iter().cloned().collect();
    let mut used: BTreeSet<GenId> = partial.iter().map(|&(_, t)| t).collect();
    let found = assign_iso(x, y, &order, 0, &mut assign, &mut used, budget, &mut outcome);
    if found {
        let map = StratifiedMap {
            assignment: (0..=x.truncation())
                .map(|d| x.gens(d).map(|g| y.ref_of(assign[&g])).collect())
                .collect(),
        };
        if map.is_isomorphism(x, y) {
            outcome.iso = Some(map);
        }
    }
    outcome
}

#[allow(clippy::too_many_arguments)]
fn assign_iso(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    order: &[GenId],
    pos: usize,
    assign: &mut BTreeMap<GenId, GenId>,
    used: &mut BTreeSet<GenId>,
    budget: u64,
    outcome: &mut IsoOutcome,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let g = order[pos];
    if let Some(&pinned) = assign.get(&g) {
        if !iso_candidate_ok(x, y, g, pinned, assign) {
            return false;
        }
        return assign_iso(x, y, order, pos + 1, assign, used, budget, outcome);
    }
    'cand: for cand in y.gens(g.dim) {
        outcome.nodes += 1;
        if outcome.nodes >= budget {
            outcome.exhausted = false;
            return false;
        }
        if used.contains(&cand) {
            continue 'cand;
        }
        if !iso_candidate_ok(x, y, g, cand, assign) {
            continue 'cand;
        }
        assign.insert(g, cand);
        used.insert(cand);
        if assign_iso(x, y, order, pos + 1, assign, used, budget, outcome) {
            return true;
        }
        assign.remove(&g);
        used.remove(&cand);
    }
    false
}

fn iso_candidate_ok(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    g: GenId,
    cand: GenId,
    assign: &BTreeMap<GenId, GenId>,
) -> bool {
    if x.thin_flag(g) != y.thin_flag(cand) {
        return false;
    }
    for (i, f) in x.faces(g).iter().enumerate() {
        let Some(&img) = assign.get(&f.gen) else { return false };
        let want = SimplexRef { gen: img, deg: f.deg.clone() };
        if *y.face(cand, i) != want {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Pre-degeneracy and well-temperedness
// ---------------------------------------------------------------------------

/// Whether `x . alpha` is thin for every injective `alpha` whose image
/// contains `{k, k+1}`. Degenerate faces are automatically thin, so
/// quantifying over monos is equivalent to the full quantification.
pub fn pre_degenerate(
    set: &TruncatedStratifiedSet,
    x: &SimplexRef,
    k: usize,
) -> Result<bool, StrataError> {
    let n = x.dim();
    if k + 1 > n {
        return Err(StrataError::DimensionOutOfRange { dim: k + 1, trunc: n });
    }
    for m in 1..=n {
        for mono in crate::delta_ops::all_monos(m as i32, n as i32) {
            if mono.image_contains(k as u32) && mono.image_contains(k as u32 + 1) {
                let face = set.act(x, &mono)?;
                if !set.is_thin(&face) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Whether the normal form collapses at `k`.
pub fn degenerate_at(x: &SimplexRef, k: usize) -> bool {
    x.deg.collapses_at(k)
}

/// Verdict of the well-temperedness check with the first failing simplex.
#[derive(Debug, Clone)]
pub struct WellTemperedVerdict {
    pub well_tempered: bool,
    pub witness: Option<(SimplexRef, usize)>,
    pub truncation: usize,
}

/// Pre-degenerate implies degenerate, for every simplex of every
/// dimension up to the truncation.
pub fn is_well_tempered(set: &TruncatedStratifiedSet) -> Result<WellTemperedVerdict, StrataError> {
    for dim in 1..=set.truncation() {
        for x in set.refs_of_dim(dim) {
            for k in 0..dim {
                if pre_degenerate(set, &x, k)? && !degenerate_at(&x, k) {
                    return Ok(WellTemperedVerdict {
                        well_tempered: false,
                        witness: Some((x, k)),
                        truncation: set.truncation(),
                    });
                }
            }
        }
    }
    Ok(WellTemperedVerdict { well_tempered: true, witness: None, truncation: set.truncation() })
}

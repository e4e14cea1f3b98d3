//! Brute-force map enumeration and the RLP-based verdicts built on it:
//! compliciality in four flavors, thinness extensions, equivalence-edge
//! witnesses, strictness, quasi-category checks, bounded closures, and
//! simple-homotopy search.
//!
//! Every search is budgeted by backtracking-node count; exceeding a
//! budget yields an inconclusive verdict, never a silent pass. Results
//! are produced in a deterministic canonical order.

use crate::delta_ops::Operator;
use crate::strata::{
    extract, ref_label, GenId, Product, SetBuilder, SimplexRef, StrataError, StratifiedMap,
    TruncatedStratifiedSet,
};
use crate::tensors::{self, Join, JoinAug, JoinPart};
use crate::zoo::{self, InclusionObject};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiftingError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("search budget of {0} nodes exhausted")]
    Budget(u64),
    #[error("{0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fail, _) | (_, Status::Fail) => Status::Fail,
            (Status::Inconclusive, _) | (_, Status::Inconclusive) => Status::Inconclusive,
            _ => Status::Pass,
        }
    }

    pub fn passed(self) -> bool {
        self == Status::Pass
    }
}

/// A replayable counterexample.
#[derive(Debug, Clone)]
pub enum Witness {
    Map(StratifiedMap),
    Simplex(SimplexRef),
    None,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub witness: Witness,
    pub nodes: u64,
}

impl Verdict {
    fn pass(nodes: u64) -> Self {
        Verdict { status: Status::Pass, witness: Witness::None, nodes }
    }

    fn fail(witness: Witness, nodes: u64) -> Self {
        Verdict { status: Status::Fail, witness, nodes }
    }

    fn inconclusive(nodes: u64) -> Self {
        Verdict { status: Status::Inconclusive, witness: Witness::None, nodes }
    }
}

/// A lifting problem from an inclusion `e : U -> V` to a map
/// `p : A -> B`: maps `u : U -> A`, `v : V -> B` with `p . u = v . e`.
#[derive(Debug, Clone)]
pub struct LiftingProblem {
    pub u: StratifiedMap,
    pub v: StratifiedMap,
}

// ---------------------------------------------------------------------------
// Map enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub maps: Vec<StratifiedMap>,
    /// Whether the search space was fully explored.
    pub exhausted: bool,
    pub nodes: u64,
}

/// All stratified maps from `src` to `tgt` extending the partial
/// assignment, by backtracking over generators in increasing dimension
/// with face and thinness pruning. Deterministic candidate order; stops
/// after `limit` maps when given. Requires the source truncation to be
/// at most the target's.
pub fn enumerate_maps(
    src: &TruncatedStratifiedSet,
    tgt: &TruncatedStratifiedSet,
    partial: &[(GenId, SimplexRef)],
    limit: Option<usize>,
    budget: u64,
) -> Result<Enumeration, LiftingError> {
    if src.truncation() > tgt.truncation() {
        return Err(LiftingError::Strata(StrataError::AmbientMismatch));
    }
    let order: Vec<GenId> = src.all_gens().collect();
    let pinned: BTreeMap<GenId, SimplexRef> = partial.iter().cloned().collect();
    // Candidate pools per dimension, shared across the search.
    let pools: Vec<Vec<SimplexRef>> =
        (0..=src.truncation()).map(|d| tgt.refs_of_dim(d)).collect();
    let mut st = MapSearch {
        src,
        tgt,
        order,
        pinned,
        pools,
        limit,
        budget,
        nodes: 0,
        exhausted: true,
        out: Vec::new(),
    };
    let mut assign: Vec<Vec<Option<SimplexRef>>> =
        (0..=src.truncation()).map(|d| vec![None; src.gen_count(d)]).collect();
    st.rec(0, &mut assign)?;
    Ok(Enumeration { maps: st.out, exhausted: st.exhausted, nodes: st.nodes })
}

struct MapSearch<'a> {
    src: &'a TruncatedStratifiedSet,
    tgt: &'a TruncatedStratifiedSet,
    order: Vec<GenId>,
    pinned: BTreeMap<GenId, SimplexRef>,
    pools: Vec<Vec<SimplexRef>>,
    limit: Option<usize>,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    out: Vec<StratifiedMap>,
}

impl MapSearch<'_> {
    fn done(&self) -> bool {
        self.limit.is_some_and(|l| self.out.len() >= l)
    }

    fn candidate_ok(
        &self,
        g: GenId,
        cand: &SimplexRef,
        assign: &[Vec<Option<SimplexRef>>],
    ) -> bool {
        if self.src.thin_flag(g) && !self.tgt.is_thin(cand) {
            return false;
        }
        for (i, f) in self.src.faces(g).iter().enumerate() {
            let assigned = assign[f.gen.dim][f.gen.idx].as_ref().expect("faces assigned first");
            let want = match self.tgt.act(assigned, &f.deg) {
                Ok(w) => w,
                Err(_) => return false,
            };
            let delta = Operator::face(g.dim as u32, i as u32).unwrap();
            match self.tgt.act(cand, &delta) {
                Ok(got) if got == want => {}
                _ => return false,
            }
        }
        true
    }

    fn rec(
        &mut self,
        pos: usize,
        assign: &mut Vec<Vec<Option<SimplexRef>>>,
    ) -> Result<(), LiftingError> {
        if self.done() {
            return Ok(());
        }
        if pos == self.order.len() {
            self.out.push(StratifiedMap {
                assignment: assign
                    .iter()
                    .map(|level| level.iter().map(|r| r.clone().unwrap()).collect())
                    .collect(),
            });
            return Ok(());
        }
        let g = self.order[pos];
        if let Some(p) = self.pinned.get(&g).cloned() {
            self.nodes += 1;
            if p.dim() == g.dim && self.candidate_ok(g, &p, assign) {
                assign[g.dim][g.idx] = Some(p);
                self.rec(pos + 1, assign)?;
                assign[g.dim][g.idx] = None;
            }
            return Ok(());
        }
        for ci in 0..self.pools[g.dim].len() {
            if self.done() {
                return Ok(());
            }
            self.nodes += 1;
            if self.nodes >= self.budget {
                self.exhausted = false;
                return Ok(());
            }
            let cand = self.pools[g.dim][ci].clone();
            if !self.candidate_ok(g, &cand, assign) {
                continue;
            }
            assign[g.dim][g.idx] = Some(cand);
            self.rec(pos + 1, assign)?;
            assign[g.dim][g.idx] = None;
        }
        Ok(())
    }
}

/// All extensions of a map defined on a subset of `v`'s generators to
/// the whole of `v`, matched by generator names.
pub fn enumerate_extensions(
    small: &TruncatedStratifiedSet,
    f: &StratifiedMap,
    v: &TruncatedStratifiedSet,
    tgt: &TruncatedStratifiedSet,
    limit: Option<usize>,
    budget: u64,
) -> Result<Enumeration, LiftingError> {
    let mut partial = Vec::new();
    for dim in 0..=small.truncation() {
        for g in small.gens(dim) {
            let here = v
                .gen_by_name(dim, small.name(g))
                .ok_or_else(|| StrataError::UnknownGenerator(small.name(g).into(), dim))?;
            partial.push((here, f.get(g).clone()));
        }
    }
    enumerate_maps(v, tgt, &partial, limit, budget)
}

/// Restricts a map on `v` to the named generators of `small`.
pub fn restrict_map(
    big: &StratifiedMap,
    v: &TruncatedStratifiedSet,
    small: &TruncatedStratifiedSet,
) -> Result<StratifiedMap, StrataError> {
    let mut assignment = Vec::new();
    for dim in 0..=small.truncation() {
        let mut level = Vec::new();
        for g in small.gens(dim) {
            let here = v
                .gen_by_name(dim, small.name(g))
                .ok_or_else(|| StrataError::UnknownGenerator(small.name(g).into(), dim))?;
            level.push(big.get(here).clone());
        }
        assignment.push(level);
    }
    Ok(StratifiedMap { assignment })
}

/// Canonical serialization of a map, used for ordering and naming.
pub fn canonical_map_name(
    f: &StratifiedMap,
    src: &TruncatedStratifiedSet,
    tgt: &TruncatedStratifiedSet,
) -> String {
    let mut parts = Vec::new();
    for dim in 0..=src.truncation() {
        for g in src.gens(dim) {
            parts.push(format!("{}>{}", src.name(g), ref_label(tgt, f.get(g))));
        }
    }
    format!("[{}]", parts.join(";"))
}

// ---------------------------------------------------------------------------
// Right lifting properties
// ---------------------------------------------------------------------------

/// RLP of an object against a subset inclusion: every map from the
/// domain extends along it.
pub fn has_rlp_object(
    t: &TruncatedStratifiedSet,
    e: &InclusionObject,
    budget: u64,
) -> Result<Verdict, LiftingError> {
    let dom = extract(&e.ambient, &e.domain)?;
    let horns = enumerate_maps(&dom, t, &[], None, budget)?;
    let mut nodes = horns.nodes;
    for u in &horns.maps {
        let ext = enumerate_extensions(&dom, u, &e.ambient, t, Some(1), budget - nodes.min(budget))?;
        nodes += ext.nodes;
        if ext.maps.is_empty() {
            if ext.exhausted {
                return Ok(Verdict::fail(Witness::Map(u.clone()), nodes));
            }
            return Ok(Verdict::inconclusive(nodes));
        }
    }
    if !horns.exhausted {
        return Ok(Verdict::inconclusive(nodes));
    }
    Ok(Verdict::pass(nodes))
}

/// RLP of a map `p : A -> B` against a subset inclusion: every lifting
/// problem admits a diagonal solution.
pub fn has_rlp_map(
    p: &StratifiedMap,
    a: &TruncatedStratifiedSet,
    b: &TruncatedStratifiedSet,
    e: &InclusionObject,
    budget: u64,
) -> Result<Verdict, LiftingError> {
    let dom = extract(&e.ambient, &e.domain)?;
    let us = enumerate_maps(&dom, a, &[], None, budget)?;
    let mut nodes = us.nodes;
    let mut conclusive = us.exhausted;
    for u in &us.maps {
        let pu = compose_restricted(p, u);
        let vs = enumerate_extensions(&dom, &pu, &e.ambient, b, None, budget.saturating_sub(nodes))?;
        nodes += vs.nodes;
        conclusive &= vs.exhausted;
        for v in &vs.maps {
            // Diagonal: extend u over the ambient and match p . w = v.
            let ws =
                enumerate_extensions(&dom, u, &e.ambient, a, None, budget.saturating_sub(nodes))?;
            nodes += ws.nodes;
            let found = ws.maps.iter().any(|w| &compose_whole(p, w) == v);
            if !found {
                if ws.exhausted {
                    return Ok(Verdict::fail(Witness::Map(v.clone()), nodes));
                }
                return Ok(Verdict::inconclusive(nodes));
            }
        }
    }
    if !conclusive {
        return Ok(Verdict::inconclusive(nodes));
    }
    Ok(Verdict::pass(nodes))
}

/// `p . u` where `u` already lands in `p`'s source generators.
fn compose_restricted(p: &StratifiedMap, u: &StratifiedMap) -> StratifiedMap {
    StratifiedMap {
        assignment: u
            .assignment
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|r| {
                        let img = p.get(r.gen);
                        // act through the target is not needed: p is
                        // generator-wise, compose the degeneracies.
                        SimplexRef { gen: img.gen, deg: img.deg.compose(&r.deg).unwrap() }
                    })
                    .collect()
            })
            .collect(),
    }
}

fn compose_whole(p: &StratifiedMap, w: &StratifiedMap) -> StratifiedMap {
    compose_restricted(p, w)
}

// ---------------------------------------------------------------------------
// Compliciality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Flavor {
    All,
    Inner,
    Left,
    Right,
}

impl Flavor {
    /// Horn indices of this flavor at dimension `n`.
    pub fn ks(self, n: usize) -> Vec<usize> {
        let lo = match self {
            Flavor::All | Flavor::Left => 0,
            Flavor::Inner | Flavor::Right => 1,
        };
        let hi = match self {
            Flavor::All | Flavor::Right => n,
            Flavor::Inner | Flavor::Left => n.saturating_sub(1),
        };
        (lo..=hi.min(n)).collect()
    }

    /// The flavor class of a single index.
    pub fn of(n: usize, k: usize) -> Flavor {
        if k == 0 {
            Flavor::Left
        } else if k == n {
            Flavor::Right
        } else {
            Flavor::Inner
        }
    }

    pub fn admits(self, n: usize, k: usize) -> bool {
        matches!(
            (self, Flavor::of(n, k)),
            (Flavor::All, _)
                | (Flavor::Inner, Flavor::Inner)
                | (Flavor::Left, Flavor::Inner | Flavor::Left)
                | (Flavor::Right, Flavor::Inner | Flavor::Right)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtensionKind {
    Horn,
    Thinness,
}

#[derive(Debug, Clone)]
pub struct ComplicialityEntry {
    pub kind: ExtensionKind,
    pub n: usize,
    pub k: usize,
    pub verdict: Verdict,
}

/// Aggregated report of RLP verdicts against every elementary anodyne
/// extension of dimension at most `dim` in the flavor.
#[derive(Debug, Clone)]
pub struct ComplicialityReport {
    pub flavor: Flavor,
    pub dim: usize,
    pub truncation: usize,
    pub entries: Vec<ComplicialityEntry>,
}

impl ComplicialityReport {
    pub fn status(&self) -> Status {
        self.entries.iter().fold(Status::Pass, |acc, e| acc.and(e.verdict.status))
    }
}

/// Horn RLP by map search, thinness extensions by the closed per-simplex
/// form.
pub fn check_compliciality(
    t: &TruncatedStratifiedSet,
    flavor: Flavor,
    dim: usize,
    budget: u64,
) -> Result<ComplicialityReport, LiftingError> {
    if dim > t.truncation() {
        return Err(LiftingError::Unsupported(format!(
            "check dimension {dim} exceeds truncation {}",
            t.truncation()
        )));
    }
    let mut entries = Vec::new();
    for n in 1..=dim {
        for k in flavor.ks(n) {
            let e = zoo::horn_inclusion(n, k)?;
            let verdict = has_rlp_object(t, &e, budget)?;
            entries.push(ComplicialityEntry { kind: ExtensionKind::Horn, n, k, verdict });
        }
    }
    for n in 2..=dim {
        for k in flavor.ks(n) {
            let verdict = check_thinness_extension(t, n, k)?;
            entries.push(ComplicialityEntry { kind: ExtensionKind::Thinness, n, k, verdict });
        }
    }
    Ok(ComplicialityReport { flavor, dim, truncation: t.truncation(), entries })
}

/// Closed-form thinness-extension check: for every thin `n`-simplex
/// whose `k-1` and `k+1` faces are thin (indices clipped to `[n]`), the
/// `k`-th face is thin. Exact, no search.
pub fn check_thinness_extension(
    t: &TruncatedStratifiedSet,
    n: usize,
    k: usize,
) -> Result<Verdict, LiftingError> {
    if n > t.truncation() || k > n {
        return Err(LiftingError::Unsupported(format!("thinness extension ({n},{k}) out of range")));
    }
    // Degenerate thin simplices satisfy the implication automatically, so
    // only flagged generators matter.
    for g in t.gens(n) {
        if !t.thin_flag(g) {
            continue;
        }
        let thin_face = |i: usize| t.is_thin(t.face(g, i));
        let flank_km1 = k == 0 || thin_face(k - 1);
        let flank_kp1 = k == n || thin_face(k + 1);
        if flank_km1 && flank_kp1 && !thin_face(k) {
            return Ok(Verdict::fail(Witness::Simplex(t.ref_of(g)), 0));
        }
    }
    Ok(Verdict::pass(0))
}

/// Equivalence-edge check: the edge extends to a map from the 0-trivial
/// `E_2`, i.e. it has an equivalence inverse with witnessing thin
/// triangles.
pub fn check_equivalence_edge(
    t: &TruncatedStratifiedSet,
    x: &SimplexRef,
    budget: u64,
) -> Result<Verdict, LiftingError> {
    if t.truncation() < 2 {
        return Err(LiftingError::Unsupported("equivalence check needs truncation >= 2".into()));
    }
    let e2 = zoo::build_e(zoo::EFamily::E2, t.truncation(), false)?;
    let seed = e2.gen_by_name(1, &zoo::e_gen_name(zoo::Sign::Minus, 1)).expect("e minus 1");
    let found = enumerate_maps(&e2, t, &[(seed, x.clone())], Some(1), budget)?;
    if !found.maps.is_empty() {
        return Ok(Verdict::pass(found.nodes));
    }
    if found.exhausted {
        Ok(Verdict::fail(Witness::Simplex(x.clone()), found.nodes))
    } else {
        Ok(Verdict::inconclusive(found.nodes))
    }
}

/// Set-level variant: every thin 1-simplex is an equivalence edge.
/// Degenerate edges pass by the constant witness, so only flagged edge
/// generators are searched.
pub fn check_equivalence_edges(
    t: &TruncatedStratifiedSet,
    budget: u64,
) -> Result<Verdict, LiftingError> {
    let mut nodes = 0;
    for g in t.gens(1) {
        if !t.thin_flag(g) {
            continue;
        }
        let v = check_equivalence_edge(t, &t.ref_of(g), budget)?;
        nodes += v.nodes;
        if v.status != Status::Pass {
            return Ok(Verdict { status: v.status, witness: v.witness, nodes });
        }
    }
    Ok(Verdict::pass(nodes))
}

// ---------------------------------------------------------------------------
// Strictness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct StrictVerdict {
    pub strict: Status,
    /// Weak compliciality plus well-temperedness.
    pub route_stratified: Status,
    /// Unique inner fillers and degenerate outer fillers, directly.
    pub route_direct: Status,
    pub routes_agree: bool,
    pub dim: usize,
    pub truncation: usize,
}

/// Two independently computed strictness verdicts; a disagreement means
/// a toolkit bug and is surfaced in the result.
pub fn check_strict(
    t: &TruncatedStratifiedSet,
    dim: usize,
    budget: u64,
) -> Result<StrictVerdict, LiftingError> {
    let comp = check_compliciality(t, Flavor::All, dim, budget)?;
    let wt = crate::strata::is_well_tempered(t)?;
    let route1 = comp.status().and(if wt.well_tempered { Status::Pass } else { Status::Fail });

    let mut route2 = Status::Pass;
    'outer: for n in 1..=dim {
        for k in 0..=n {
            let e = zoo::horn_inclusion(n, k)?;
            let dom = extract(&e.ambient, &e.domain)?;
            let horns = enumerate_maps(&dom, t, &[], None, budget)?;
            if !horns.exhausted {
                route2 = Status::Inconclusive;
                break 'outer;
            }
            let top = e.ambient.gens(n).next().expect("horn ambient top simplex");
            for u in &horns.maps {
                let exts = enumerate_extensions(&dom, u, &e.ambient, t, None, budget)?;
                if !exts.exhausted {
                    route2 = Status::Inconclusive;
                    break 'outer;
                }
                let ok = if 0 < k && k < n {
                    exts.maps.len() == 1
                } else {
                    exts.maps.iter().any(|m| m.get(top).is_degenerate())
                };
                if !ok {
                    route2 = Status::Fail;
                    break 'outer;
                }
            }
        }
    }

    let agree = route1 == route2;
    Ok(StrictVerdict {
        strict: route1.and(route2),
        route_stratified: route1,
        route_direct: route2,
        routes_agree: agree,
        dim,
        truncation: t.truncation(),
    })
}

// ---------------------------------------------------------------------------
// Quasi-categories
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct QuasiCategoryVerdict {
    pub mid_fibrant: Status,
    pub estrat_complicial: Status,
    pub dim: usize,
}

/// Inner-horn RLP on the underlying simplicial set, with the companion
/// verdict that the equivalence stratification is a weak complicial set.
pub fn check_quasi_category(
    x: &TruncatedStratifiedSet,
    dim: usize,
    budget: u64,
) -> Result<QuasiCategoryVerdict, LiftingError> {
    let bare = zoo::underlying(x);
    let mut mid = Status::Pass;
    'outer: for n in 2..=dim {
        for k in 1..n {
            let ambient = zoo::standard(n)?;
            let domain = zoo::horn_subset(&ambient, n, k)?;
            let e = InclusionObject { name: format!("simplicial_horn({n},{k})"), ambient, domain };
            let v = has_rlp_object(&bare, &e, budget)?;
            mid = mid.and(v.status);
            if mid == Status::Fail {
                break 'outer;
            }
        }
    }
    let est = estrat(&bare, budget)?;
    let comp = check_compliciality(&est, Flavor::All, dim, budget)?;
    Ok(QuasiCategoryVerdict { mid_fibrant: mid, estrat_complicial: comp.status(), dim })
}

/// The equivalence stratification of a simplicial set: everything of
/// dimension at least 2 is thin, and a 1-simplex is thin iff some map
/// from the minimally stratified `E_2` sends the generating edge to it.
pub fn estrat(
    x: &TruncatedStratifiedSet,
    budget: u64,
) -> Result<TruncatedStratifiedSet, LiftingError> {
    if x.truncation() < 2 {
        return Err(LiftingError::Unsupported("estrat needs truncation >= 2".into()));
    }
    let bare = zoo::underlying(x);
    let e2 = zoo::build_e(zoo::EFamily::E2, x.truncation(), true)?;
    let seed = e2.gen_by_name(1, &zoo::e_gen_name(zoo::Sign::Minus, 1)).expect("e minus 1");
    let mut b = SetBuilder::new(bare.truncation());
    for dim in 0..=bare.truncation() {
        for g in bare.gens(dim) {
            let thin = if dim >= 2 {
                true
            } else if dim == 1 {
                let found =
                    enumerate_maps(&e2, &bare, &[(seed, bare.ref_of(g))], Some(1), budget)?;
                if !found.exhausted && found.maps.is_empty() {
                    return Err(LiftingError::Budget(budget));
                }
                !found.maps.is_empty()
            } else {
                false
            };
            b.add_generator(dim, bare.name(g), bare.faces(g).to_vec(), thin)
                .map_err(LiftingError::Strata)?;
        }
    }
    Ok(b.build_unchecked())
}

// ---------------------------------------------------------------------------
// Bounded closures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClosureKind {
    /// Strong transformations: maps from the Gray tensor.
    Hom,
    /// Left lax transformations: maps from `X boxtimes Delta[n]`.
    LaxLeft,
    /// Right lax transformations: maps from `Delta[n] boxtimes X`.
    LaxRight,
    /// Left decalage: maps from `X (+) Delta[n]`.
    DecLeft,
    /// Right decalage: maps from `Delta[n] (+) X`.
    DecRight,
}

enum ClosureObj {
    Prod { prod: Product, left: TruncatedStratifiedSet, right: TruncatedStratifiedSet },
    Join { join: Join, left: TruncatedStratifiedSet, right: TruncatedStratifiedSet },
}

impl ClosureObj {
    fn set(&self) -> &TruncatedStratifiedSet {
        match self {
            ClosureObj::Prod { prod, .. } => &prod.set,
            ClosureObj::Join { join, .. } => &join.set,
        }
    }
}

/// Whether the moving `Delta[n]` factor sits on the right of the tensor.
fn delta_on_right(kind: ClosureKind) -> bool {
    matches!(kind, ClosureKind::Hom | ClosureKind::LaxLeft | ClosureKind::DecLeft)
}

fn closure_obj(
    kind: ClosureKind,
    x: &TruncatedStratifiedSet,
    n: usize,
    thin_delta: bool,
    trunc: usize,
) -> Result<ClosureObj, LiftingError> {
    let delta = if thin_delta { zoo::standard_thin(n)? } else { zoo::standard(n)? };
    match kind {
        ClosureKind::Hom | ClosureKind::LaxLeft | ClosureKind::LaxRight => {
            let xr = x.with_truncation(trunc);
            let dr = delta.with_truncation(trunc);
            let (l, r) = if delta_on_right(kind) { (xr, dr) } else { (dr, xr) };
            let prod = match kind {
                ClosureKind::Hom => tensors::gray(&l, &r)?,
                _ => tensors::pretensor(&l, &r)?,
            };
            Ok(ClosureObj::Prod { prod, left: l, right: r })
        }
        ClosureKind::DecLeft | ClosureKind::DecRight => {
            let (l, r) = if delta_on_right(kind) {
                (x.clone(), delta)
            } else {
                (delta, x.clone())
            };
            let join = tensors::join(&l, &r, JoinAug::Canonical, JoinAug::Canonical, trunc)?;
            Ok(ClosureObj::Join { join, left: l, right: r })
        }
    }
}

/// Transports a simplex of a `Delta[p]`-based set along an operator
/// `alpha : [p] -> [q]` into a `Delta[q]`-based set.
fn transport_simplex(
    from: &TruncatedStratifiedSet,
    to: &TruncatedStratifiedSet,
    p: usize,
    alpha: &Operator,
    r: &SimplexRef,
) -> Result<SimplexRef, StrataError> {
    let base = zoo::operator_of_simplex(from, r.gen, p)?;
    let total = alpha.compose(&base.compose(&r.deg)?)?;
    let (epi, mono) = total.ez_factor();
    let name: Vec<String> = mono.images().iter().map(|v| v.to_string()).collect();
    let gen = to
        .gen_by_name(mono.dom() as usize, &name.join("."))
        .ok_or_else(|| StrataError::UnknownGenerator(name.join("."), mono.dom() as usize))?;
    Ok(SimplexRef { gen, deg: epi })
}

/// The image of a generator of `X (.) Delta[n_from]` in
/// `X (.) Delta[n_to]` under the map induced by `alpha`.
fn push_gen(
    kind: ClosureKind,
    from: &ClosureObj,
    to: &ClosureObj,
    n_from: usize,
    alpha: &Operator,
    g: GenId,
) -> Result<SimplexRef, StrataError> {
    let right = delta_on_right(kind);
    match (from, to) {
        (ClosureObj::Prod { prod: pf, left: lf, right: rf }, ClosureObj::Prod { prod: pt, left: lt, right: rt }) => {
            let (a, b) = pf.components(g);
            let (na, nb) = if right {
                (a.clone(), transport_simplex(rf, rt, n_from, alpha, b)?)
            } else {
                (transport_simplex(lf, lt, n_from, alpha, a)?, b.clone())
            };
            let _ = lf;
            pt.pair_ref(&na, &nb)
                .ok_or_else(|| StrataError::Invalid("pushed pair not found".into()))
        }
        (ClosureObj::Join { join: jf, left: lf, right: rf }, ClosureObj::Join { join: jt, left: lt, right: rt }) => {
            let (pa, pb) = jf.parts_of(g);
            let (qa, da, qb, db) = if right {
                match pb {
                    JoinPart::Base(_) => {
                        (*pa, Operator::identity(pa.dim_i32()), JoinPart::Base(0), None)
                    }
                    JoinPart::Gen(gb) => {
                        let t = transport_simplex(rf, rt, n_from, alpha, &rf.ref_of(*gb))?;
                        (*pa, Operator::identity(pa.dim_i32()), JoinPart::Gen(t.gen), Some(t.deg))
                    }
                }
            } else {
                match pa {
                    JoinPart::Base(_) => {
                        (JoinPart::Base(0), Operator::identity(-1), *pb, None)
                    }
                    JoinPart::Gen(ga) => {
                        let t = transport_simplex(lf, lt, n_from, alpha, &lf.ref_of(*ga))?;
                        (JoinPart::Gen(t.gen), t.deg, *pb, None)
                    }
                }
            };
            let _ = (lf, rf);
            // Recompose the epi as an ordinal sum of the two sides.
            let (left_epi, right_epi) = if right {
                (da, db.unwrap_or_else(|| Operator::identity(qb.dim_i32())))
            } else {
                (da, Operator::identity(qb.dim_i32()))
            };
            let deg = left_epi.ordinal_sum(&right_epi);
            let gen = jt
                .parts
                .iter()
                .enumerate()
                .find_map(|(dim, level)| {
                    level
                        .iter()
                        .position(|&(x1, x2)| x1 == qa && x2 == qb)
                        .map(|idx| GenId { dim, idx })
                })
                .ok_or_else(|| StrataError::Invalid("pushed join pair not found".into()))?;
            Ok(SimplexRef { gen, deg })
        }
        _ => Err(StrataError::Invalid("mismatched closure objects".into())),
    }
}

impl JoinPart {
    fn dim_i32(&self) -> i32 {
        match self {
            JoinPart::Base(_) => -1,
            JoinPart::Gen(g) => g.dim as i32,
        }
    }
}

/// `h . (X (.) alpha)` for a map `h` out of the `n_from`-level object.
fn precompose(
    kind: ClosureKind,
    from: &ClosureObj,
    to: &ClosureObj,
    n_to: usize,
    alpha: &Operator,
    h: &StratifiedMap,
    a: &TruncatedStratifiedSet,
) -> Result<StratifiedMap, StrataError> {
    // alpha : [n_to] -> [n_from]; the induced map goes obj(n_to) -> obj(n_from).
    let mut assignment = Vec::new();
    for dim in 0..=to.set().truncation() {
        let mut level = Vec::new();
        for g in to.set().gens(dim) {
            let pushed = push_gen(kind, to, from, n_to, alpha, g)?;
            level.push(a.act(h.get(pushed.gen), &pushed.deg)?);
        }
        assignment.push(level);
    }
    Ok(StratifiedMap { assignment })
}

/// The bounded closure: `n`-simplices for `n <= d_out` are stratified
/// maps `X (.) Delta[n] -> A`, thin when they remain stratified from
/// `X (.) Delta[n]_t`; faces and degeneracies act by precomposition.
/// Generator names are canonical serializations of the maps.
pub fn closure_truncation(
    kind: ClosureKind,
    x: &TruncatedStratifiedSet,
    a: &TruncatedStratifiedSet,
    d_out: usize,
    budget: u64,
) -> Result<TruncatedStratifiedSet, LiftingError> {
    let trunc = a.truncation();
    let objs: Vec<ClosureObj> =
        (0..=d_out).map(|n| closure_obj(kind, x, n, false, trunc)).collect::<Result<_, _>>()?;
    let objs_t: Vec<Option<ClosureObj>> = (0..=d_out)
        .map(|n| if n >= 1 { closure_obj(kind, x, n, true, trunc).map(Some) } else { Ok(None) })
        .collect::<Result<_, _>>()?;
    // All maps per level, canonically ordered.
    let mut level_maps: Vec<Vec<(String, StratifiedMap)>> = Vec::new();
    for obj in objs.iter() {
        let e = enumerate_maps(obj.set(), a, &[], None, budget)?;
        if !e.exhausted {
            return Err(LiftingError::Budget(budget));
        }
        let mut named: Vec<(String, StratifiedMap)> = e
            .maps
            .into_iter()
            .map(|m| (canonical_map_name(&m, obj.set(), a), m))
            .collect();
        named.sort_by(|x1, x2| x1.0.cmp(&x2.0));
        level_maps.push(named);
    }
    let find_level = |n: usize, name: &str| -> usize {
        level_maps[n].binary_search_by(|probe| probe.0.as_str().cmp(name)).expect("map present")
    };
    // EZ data per level: degenerate test via sigma-precomposition.
    let face_of = |n: usize, h: &StratifiedMap, i: usize| -> Result<StratifiedMap, StrataError> {
        let delta = Operator::face(n as u32, i as u32).unwrap();
        precompose(kind, &objs[n], &objs[n - 1], n - 1, &delta, h, a)
    };
    let degeneracy_of =
        |n: usize, h: &StratifiedMap, j: usize| -> Result<StratifiedMap, StrataError> {
            let sigma = Operator::degeneracy(n as u32, j as u32).unwrap();
            precompose(kind, &objs[n], &objs[n + 1], n + 1, &sigma, h, a)
        };
    // Normal form: (level, canonical name, epi) of an arbitrary map.
    struct Normal {
        level: usize,
        name: String,
        epi: Operator,
    }
    fn normalize(
        n: usize,
        h: &StratifiedMap,
        face_of: &dyn Fn(usize, &StratifiedMap, usize) -> Result<StratifiedMap, StrataError>,
        degeneracy_of: &dyn Fn(usize, &StratifiedMap, usize) -> Result<StratifiedMap, StrataError>,
        name_of: &dyn Fn(usize, &StratifiedMap) -> String,
    ) -> Result<Normal, StrataError> {
        for j in 0..n {
            let hd = face_of(n, h, j)?;
            let back = degeneracy_of(n - 1, &hd, j)?;
            if &back == h {
                let inner = normalize(n - 1, &hd, face_of, degeneracy_of, name_of)?;
                let sigma = Operator::degeneracy(n as u32 - 1, j as u32).unwrap();
                return Ok(Normal {
                    level: inner.level,
                    name: inner.name,
                    epi: inner.epi.compose(&sigma)?,
                });
            }
        }
        Ok(Normal { level: n, name: name_of(n, h), epi: Operator::identity(n as i32) })
    }
    let name_of =
        |n: usize, h: &StratifiedMap| -> String { canonical_map_name(h, objs[n].set(), a) };
    // Build the output set.
    let mut builder = SetBuilder::new(d_out);
    for n in 0..=d_out {
        for (name, h) in &level_maps[n] {
            // Skip degenerate maps.
            let mut degenerate = false;
            for j in 0..n {
                let hd = face_of(n, h, j).map_err(LiftingError::Strata)?;
                let back = degeneracy_of(n - 1, &hd, j).map_err(LiftingError::Strata)?;
                if &back == h {
                    degenerate = true;
                    break;
                }
            }
            if degenerate {
                continue;
            }
            let mut faces = Vec::new();
            if n > 0 {
                for i in 0..=n {
                    let hf = face_of(n, h, i).map_err(LiftingError::Strata)?;
                    let norm = normalize(n - 1, &hf, &face_of, &degeneracy_of, &name_of)
                        .map_err(LiftingError::Strata)?;
                    let idx = find_level(norm.level, &norm.name);
                    // Position among the non-degenerate maps of the level.
                    let gen = builder
                        .lookup(norm.level, &level_maps[norm.level][idx].0)
                        .ok_or_else(|| {
                            LiftingError::Strata(StrataError::Invalid(
                                "face map is not a generator".into(),
                            ))
                        })?;
                    faces.push(SimplexRef { gen, deg: norm.epi });
                }
            }
            // Thin iff still stratified from the thin-cylinder object.
            let thin = if n == 0 {
                false
            } else {
                let obj_t = objs_t[n].as_ref().unwrap();
                obj_t
                    .set()
                    .all_gens()
                    .filter(|&g| obj_t.set().thin_flag(g))
                    .all(|g| a.is_thin(h.get(g)))
            };
            builder.add_generator(n, name.clone(), faces, thin).map_err(LiftingError::Strata)?;
        }
    }
    let out = builder.build().map_err(LiftingError::Strata)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Simple homotopy and homotopy inverses
// ---------------------------------------------------------------------------

type CylinderEnds = (Product, Vec<(GenId, GenId)>, Vec<(GenId, GenId)>);

/// The thin cylinder `X . Delta[1]_t` (Gray tensor), with the two end
/// inclusions pinned: generator `g` at end `0` or `1`.
fn cylinder(x: &TruncatedStratifiedSet) -> Result<CylinderEnds, LiftingError> {
    let d1t = zoo::standard_thin(1)?.with_truncation(x.truncation());
    let cyl = tensors::gray(x, &d1t)?;
    let mut end0 = Vec::new();
    let mut end1 = Vec::new();
    for dim in 0..=x.truncation() {
        for g in x.gens(dim) {
            for (end, out) in [(0u32, &mut end0), (1u32, &mut end1)] {
                let vertex = d1t.gen_by_name(0, &end.to_string()).expect("cylinder end vertex");
                let const_ref = SimplexRef {
                    gen: vertex,
                    deg: Operator::terminal(dim as u32),
                };
                let pair = cyl
                    .pair_gen(&x.ref_of(g), &const_ref)
                    .expect("end pair generator");
                out.push((g, pair));
            }
        }
    }
    Ok((cyl, end0, end1))
}

/// Searches for a simple homotopy `h : X . Delta[1]_t -> A` from `f` to
/// `g`.
pub fn check_simple_homotopy(
    x: &TruncatedStratifiedSet,
    a: &TruncatedStratifiedSet,
    f: &StratifiedMap,
    g: &StratifiedMap,
    budget: u64,
) -> Result<Verdict, LiftingError> {
    let (cyl, end0, end1) = cylinder(x)?;
    let mut partial = Vec::new();
    for (src, pair) in &end0 {
        partial.push((*pair, f.get(*src).clone()));
    }
    for (src, pair) in &end1 {
        partial.push((*pair, g.get(*src).clone()));
    }
    let found = enumerate_maps(&cyl.set, a, &partial, Some(1), budget)?;
    if let Some(h) = found.maps.into_iter().next() {
        return Ok(Verdict { status: Status::Pass, witness: Witness::Map(h), nodes: found.nodes });
    }
    if found.exhausted {
        Ok(Verdict::fail(Witness::None, found.nodes))
    } else {
        Ok(Verdict::inconclusive(found.nodes))
    }
}

/// A homotopy equivalence witness: an inverse with the two homotopies.
#[derive(Debug, Clone)]
pub struct HomotopyInverse {
    pub inverse: StratifiedMap,
    pub to_identity_source: StratifiedMap,
    pub to_identity_target: StratifiedMap,
}

/// Enumerates candidate inverses and both homotopies.
pub fn search_homotopy_inverse(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    e: &StratifiedMap,
    budget: u64,
) -> Result<Option<HomotopyInverse>, LiftingError> {
    let candidates = enumerate_maps(y, x, &[], None, budget)?;
    for inv in &candidates.maps {
        let back = inv.compose(e, y).map_err(LiftingError::Strata)?;
        let h1 = check_simple_homotopy(x, x, &back, &StratifiedMap::identity(x), budget)?;
        if h1.status != Status::Pass {
            continue;
        }
        let fwd = e.compose(inv, x).map_err(LiftingError::Strata)?;
        let h2 = check_simple_homotopy(y, y, &fwd, &StratifiedMap::identity(y), budget)?;
        if h2.status != Status::Pass {
            continue;
        }
        let (Witness::Map(hm1), Witness::Map(hm2)) = (h1.witness, h2.witness) else {
            continue;
        };
        return Ok(Some(HomotopyInverse {
            inverse: inv.clone(),
            to_identity_source: hm1,
            to_identity_target: hm2,
        }));
    }
    Ok(None)
}

/// Deformation-retraction data for `e : X -> Y`: a section `m` with
/// `e . m = id` and a homotopy `d` from `m . e` to the identity with
/// `e . d = e . projection`.
#[derive(Debug, Clone)]
pub struct DeformationRetraction {
    pub section: StratifiedMap,
    pub homotopy: StratifiedMap,
}

pub fn search_deformation_retraction(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    e: &StratifiedMap,
    budget: u64,
) -> Result<Option<DeformationRetraction>, LiftingError> {
    let (cyl, end0, end1) = cylinder(x)?;
    // projection X . Delta[1]_t -> X
    let proj = StratifiedMap {
        assignment: (0..=cyl.set.truncation())
            .map(|d| cyl.set.gens(d).map(|g| cyl.components(g).0.clone()).collect())
            .collect(),
    };
    let e_proj = e.compose(&proj, x).map_err(LiftingError::Strata)?;
    let sections = enumerate_maps(y, x, &[], None, budget)?;
    for m in &sections.maps {
        let round = e.compose(m, x).map_err(LiftingError::Strata)?;
        if round != StratifiedMap::identity(y) {
            continue;
        }
        let me = m.compose(e, y).map_err(LiftingError::Strata)?;
        let mut partial = Vec::new();
        for (src, pair) in &end0 {
            partial.push((*pair, me.get(*src).clone()));
        }
        for (src, pair) in &end1 {
            partial.push((*pair, x.ref_of(*src)));
        }
        let hs = enumerate_maps(&cyl.set, x, &partial, None, budget)?;
        for d in &hs.maps {
            let ed = e.compose(d, x).map_err(LiftingError::Strata)?;
            if ed == e_proj {
                return Ok(Some(DeformationRetraction { section: m.clone(), homotopy: d.clone() }));
            }
        }
    }
    Ok(None)
}

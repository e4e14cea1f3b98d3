//! Search for, and replay of, presentations of subset inclusions as
//! finite composites of pushouts of elementary anodyne extensions.
//!
//! Only subset-shaped pushouts inside a fixed ambient set are searched;
//! general pushouts that quotient are unreachable by this engine. At
//! desk scale this loses nothing: every decomposition the acceptance
//! suite targets is realized by such attachments. Replay validates each step as a genuine pushout of its
//! named elementary inclusion and never trusts search-time bookkeeping.
//! Note that a pushout need not be a pullback: the outer-horn join
//! presentations attach along maps whose flag preimage strictly exceeds
//! the horn's regular flags, and replay checks exactly the pushout
//! conditions (member preimage, flag direction, fresh non-degenerate
//! cells, final-state equality).

use crate::delta_ops::{all_monos, Operator};
use crate::lifting::{enumerate_maps, Flavor, Status};
use crate::strata::{
    extract, SimplexRef, StrataError, StratifiedMap, Subset, TruncatedStratifiedSet,
};
use crate::zoo;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CertError {
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("step {index}: {reason}")]
    Step { index: usize, reason: String },
    #[error("replay did not reach the target: {0}")]
    FinalState(String),
    #[error("{0}")]
    Invalid(String),
}

/// The elementary inclusions a certificate may attach.
///
/// `ThinHorn` is the composite thin horn extension of the glueing
/// recollection, packaged as a single generator so that the E-family
/// inclusions replay as single pushout steps. `ThinSimplex` and
/// `TildeE2` are the extra generators of the larger catalogs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElemKind {
    Horn { n: usize, k: usize },
    Thinness { n: usize, k: usize },
    ThinHorn { n: usize, k: usize },
    ThinSimplex { n: usize },
    TildeE2,
}

impl ElemKind {
    pub fn label(&self) -> String {
        match self {
            ElemKind::Horn { n, k } => format!("horn({n},{k})"),
            ElemKind::Thinness { n, k } => format!("thinness({n},{k})"),
            ElemKind::ThinHorn { n, k } => format!("thin_horn({n},{k})"),
            ElemKind::ThinSimplex { n } => format!("thin_simplex({n})"),
            ElemKind::TildeE2 => "tilde_e2".into(),
        }
    }

    /// The anodyne class of a horn-type generator, if any.
    pub fn flavor(&self) -> Option<Flavor> {
        match self {
            ElemKind::Horn { n, k } | ElemKind::Thinness { n, k } | ElemKind::ThinHorn { n, k } => {
                Some(Flavor::of(*n, *k))
            }
            _ => None,
        }
    }
}

/// Extra catalog entries beyond the elementary anodyne extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Extras {
    None,
    /// Thin-simplex inclusions above the given level (the n-trivial
    /// catalog).
    Jn(usize),
    /// The 1-trivial catalog plus the entire inclusion of the minimally
    /// stratified generic-equivalence pair.
    Jq,
}

/// The catalog of elementary kinds with dimension at most `dim` in the
/// given flavor, plus the chosen extras. `thin_horns` additionally
/// admits the composite thin horn extensions.
pub fn elementary_catalog(
    dim: usize,
    flavor: Flavor,
    extras: Extras,
    thin_horns: bool,
) -> Vec<ElemKind> {
    let mut out = Vec::new();
    for n in 1..=dim {
        for k in flavor.ks(n) {
            out.push(ElemKind::Horn { n, k });
        }
        if thin_horns {
            for k in flavor.ks(n) {
                out.push(ElemKind::ThinHorn { n, k });
            }
        }
        if n >= 2 {
            for k in flavor.ks(n) {
                out.push(ElemKind::Thinness { n, k });
            }
        }
    }
    match extras {
        Extras::None => {}
        Extras::Jn(level) => {
            for n in (level + 1)..=dim {
                out.push(ElemKind::ThinSimplex { n });
            }
        }
        Extras::Jq => {
            for n in 2..=dim {
                out.push(ElemKind::ThinSimplex { n });
            }
            out.push(ElemKind::TildeE2);
        }
    }
    out
}

/// A simplex reference by stable names, as stored in certificates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttachRef {
    pub dim: usize,
    pub gen: String,
    pub deg: Vec<u32>,
}

impl AttachRef {
    pub fn of(x: &TruncatedStratifiedSet, r: &SimplexRef) -> Self {
        AttachRef {
            dim: r.gen.dim,
            gen: x.name(r.gen).to_string(),
            deg: r.deg.images().to_vec(),
        }
    }

    pub fn resolve(&self, x: &TruncatedStratifiedSet) -> Result<SimplexRef, CertError> {
        let gen = x
            .gen_by_name(self.dim, &self.gen)
            .ok_or_else(|| CertError::Invalid(format!("unknown generator `{}`", self.gen)))?;
        let deg = Operator::new(self.dim as i32, self.deg.clone())
            .map_err(|e| CertError::Invalid(e.to_string()))?;
        if !deg.is_surjective() {
            return Err(CertError::Invalid("attachment degeneracy is not surjective".into()));
        }
        Ok(SimplexRef { gen, deg })
    }
}

/// Attaching data of one step: the chosen filler or upgraded simplex,
/// or a full assignment for the generic-equivalence generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Attachment {
    Simplex(AttachRef),
    Map(Vec<AttachRef>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellStep {
    pub elem: ElemKind,
    pub attach: Attachment,
}

/// A replayable sequence of elementary attachments from a start subset
/// to a target subset inside a fixed ambient set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub flavor: Flavor,
    pub dim: usize,
    pub extras: Extras,
    pub thin_horns: bool,
    pub steps: Vec<CellStep>,
}

impl Certificate {
    /// The join of the step flavors; `None` for an empty certificate.
    pub fn effective_flavor(&self) -> Option<Flavor> {
        let mut acc: Option<Flavor> = None;
        for s in &self.steps {
            if let Some(f) = s.elem.flavor() {
                acc = Some(match (acc, f) {
                    (None, f) => f,
                    (Some(a), b) if a == b => a,
                    (Some(Flavor::Inner), b) => b,
                    (Some(a), Flavor::Inner) => a,
                    _ => Flavor::All,
                });
            }
        }
        acc
    }
}

// ---------------------------------------------------------------------------
// Step semantics
// ---------------------------------------------------------------------------

/// Thinness of an operator in the codomain object of a horn-type kind.
fn codomain_thin(elem: &ElemKind, mu: &Operator) -> bool {
    match *elem {
        ElemKind::Horn { n, k } => {
            let _ = n;
            mu.is_admissible(k as u32).map(|a| a.admissible).unwrap_or(false)
        }
        ElemKind::Thinness { n, k } | ElemKind::ThinHorn { n, k } => {
            let adm = mu.is_admissible(k as u32).map(|a| a.admissible).unwrap_or(false);
            adm || mu.dom() == n as i32 - 1
        }
        _ => false,
    }
}

/// Thinness of an operator in the domain object of a horn-type kind.
fn domain_thin(elem: &ElemKind, mu: &Operator) -> bool {
    match *elem {
        ElemKind::Horn { n, k } => in_horn_op(mu, n, k) && codomain_thin(elem, mu),
        ElemKind::ThinHorn { n, k } => in_horn_op(mu, n, k) && codomain_thin(elem, mu),
        ElemKind::Thinness { n, k } => {
            let adm = mu.is_admissible(k as u32).map(|a| a.admissible).unwrap_or(false);
            let prime_face = mu.dom() == n as i32 - 1
                && ((k > 0 && !mu.image_contains(k as u32 - 1))
                    || (k < n && !mu.image_contains(k as u32 + 1)));
            adm || prime_face
        }
        _ => false,
    }
}

fn in_horn_op(mu: &Operator, n: usize, k: usize) -> bool {
    (0..=n as u32).any(|v| v != k as u32 && !mu.image_contains(v))
}

/// Validates one step against the current subset and applies it,
/// returning the enlarged subset. Errors describe the violated pushout
/// condition.
pub fn step_apply(
    x: &TruncatedStratifiedSet,
    target: &Subset,
    cur: &Subset,
    step: &CellStep,
) -> Result<Subset, String> {
    let mut next = cur.clone();
    match (&step.elem, &step.attach) {
        (ElemKind::Horn { n, k } | ElemKind::ThinHorn { n, k }, Attachment::Simplex(a)) => {
            let w = a.resolve(x).map_err(|e| e.to_string())?;
            if w.is_degenerate() || w.dim() != *n {
                return Err("filler must be a non-degenerate n-simplex".into());
            }
            if cur.contains(w.gen) {
                return Err("filler already present".into());
            }
            if !target.contains(w.gen) {
                return Err("filler lies outside the target".into());
            }
            let filler_face = x
                .act(&w, &Operator::face(*n as u32, *k as u32).unwrap())
                .map_err(|e| e.to_string())?;
            if filler_face.is_degenerate() {
                return Err("new face is degenerate".into());
            }
            if cur.contains(filler_face.gen) {
                return Err("new face already present".into());
            }
            if !target.contains(filler_face.gen) {
                return Err("new face lies outside the target".into());
            }
            // Horn faces land in the current subset.
            for i in 0..=*n {
                if i == *k {
                    continue;
                }
                let f = x
                    .act(&w, &Operator::face(*n as u32, i as u32).unwrap())
                    .map_err(|e| e.to_string())?;
                if !cur.contains_ref(&f) {
                    return Err(format!("horn face {i} is not in the current subset"));
                }
            }
            next.insert(w.gen);
            next.insert(filler_face.gen);
            apply_flag_conditions(x, target, cur, &mut next, &step.elem, &w)?;
        }
        (ElemKind::Thinness { .. }, Attachment::Simplex(a)) => {
            let w = a.resolve(x).map_err(|e| e.to_string())?;
            if !cur.contains(w.gen) {
                return Err("upgraded simplex is not in the current subset".into());
            }
            apply_flag_conditions(x, target, cur, &mut next, &step.elem, &w)?;
        }
        (ElemKind::ThinSimplex { n }, Attachment::Simplex(a)) => {
            let w = a.resolve(x).map_err(|e| e.to_string())?;
            if w.is_degenerate() || w.dim() != *n {
                return Err("thin-simplex upgrade must be a non-degenerate n-simplex".into());
            }
            if !cur.contains(w.gen) {
                return Err("upgraded simplex is not in the current subset".into());
            }
            if !target.flagged(w.gen) {
                return Err("upgrade exceeds the target stratification".into());
            }
            next.flag(w.gen);
        }
        (ElemKind::TildeE2, Attachment::Map(refs)) => {
            if x.truncation() < 2 {
                return Err("generic-equivalence step needs truncation >= 2".into());
            }
            let e2 = zoo::build_e(zoo::EFamily::E2, x.truncation(), true)
                .map_err(|e| e.to_string())?;
            if refs.len() != e2.total_gens() {
                return Err("assignment length differs from the E_2 presentation".into());
            }
            let mut assignment: Vec<Vec<SimplexRef>> = vec![Vec::new(); x.truncation() + 1];
            let mut it = refs.iter();
            for (d, level) in assignment.iter_mut().enumerate().take(e2.truncation() + 1) {
                for _ in e2.gens(d) {
                    let r = it.next().unwrap().resolve(x).map_err(|e| e.to_string())?;
                    level.push(r);
                }
            }
            let map = StratifiedMap { assignment };
            let report = map.validate(&e2, x);
            if !report.is_valid() {
                return Err(format!("attachment map invalid: {report}"));
            }
            for d in 0..=e2.truncation() {
                for g in e2.gens(d) {
                    let img = map.get(g);
                    if !cur.contains_ref(img) {
                        return Err("attachment map leaves the current subset".into());
                    }
                    if d >= 1 && !img.is_degenerate() {
                        if !target.flagged(img.gen) {
                            return Err("upgrade exceeds the target stratification".into());
                        }
                        next.flag(img.gen);
                    }
                }
            }
        }
        _ => return Err("attachment data does not match the elementary kind".into()),
    }
    if next == *cur {
        return Err("step does not enlarge the subset".into());
    }
    Ok(next)
}

/// Domain-flag and codomain-flag conditions shared by the horn-type
/// steps: the attachment restricted to the domain is stratified into the
/// current subset, the whole attachment is stratified into the target,
/// and the images of the codomain's thin simplices become flagged.
fn apply_flag_conditions(
    x: &TruncatedStratifiedSet,
    target: &Subset,
    cur: &Subset,
    next: &mut Subset,
    elem: &ElemKind,
    w: &SimplexRef,
) -> Result<(), String> {
    let n = w.dim();
    for m in 1..=n {
        for mu in all_monos(m as i32, n as i32) {
            let img = x.act(w, &mu).map_err(|e| e.to_string())?;
            if domain_thin(elem, &mu) && !cur.is_thin(&img) {
                return Err(format!("domain flag not present in current subset at {mu:?}"));
            }
            if codomain_thin(elem, &mu) {
                if img.is_degenerate() {
                    continue;
                }
                if !target.flagged(img.gen) {
                    return Err(format!("flag at {mu:?} exceeds the target stratification"));
                }
                next.flag(img.gen);
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Replay
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ReplayReport {
    pub status: Status,
    pub failed_step: Option<(usize, String)>,
    pub steps: usize,
}

/// Independent re-validation of a certificate: every step must pass the
/// pushout conditions and belong to the declared catalog; the final
/// state must equal the target exactly.
pub fn replay(
    x: &TruncatedStratifiedSet,
    target: &Subset,
    start: &Subset,
    cert: &Certificate,
) -> Result<ReplayReport, CertError> {
    let fail = |i: usize, reason: String| ReplayReport {
        status: Status::Fail,
        failed_step: Some((i, reason)),
        steps: cert.steps.len(),
    };
    if !start.is_subset_of(target) {
        return Ok(fail(0, "start is not contained in the target".into()));
    }
    if !start.validate(x).is_valid() || !target.validate(x).is_valid() {
        return Err(CertError::Invalid("start or target is not a valid subset".into()));
    }
    let catalog = elementary_catalog(cert.dim, cert.flavor, cert.extras, cert.thin_horns);
    let mut cur = start.clone();
    for (i, step) in cert.steps.iter().enumerate() {
        if !catalog.contains(&step.elem) {
            return Ok(fail(i, format!("{} is not in the declared catalog", step.elem.label())));
        }
        match step_apply(x, target, &cur, step) {
            Ok(nextstate) => cur = nextstate,
            Err(reason) => return Ok(fail(i, reason)),
        }
    }
    if cur != *target {
        return Ok(ReplayReport {
            status: Status::Fail,
            failed_step: None,
            steps: cert.steps.len(),
        });
    }
    Ok(ReplayReport { status: Status::Pass, failed_step: None, steps: cert.steps.len() })
}

// ---------------------------------------------------------------------------
// Search
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct CertifyOptions {
    pub extras: Extras,
    pub thin_horns: bool,
    pub budget: u64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { extras: Extras::None, thin_horns: false, budget: 5_000_000 }
    }
}

#[derive(Debug)]
pub struct CertifyOutcome {
    pub status: Status,
    pub certificate: Option<Certificate>,
    pub nodes: u64,
}

/// Depth-first search for a certificate presenting `start -> target` as
/// a composite of catalog pushouts, preferring lower-dimensional
/// attachments and lexicographic attaching data. `fail` means the
/// reachable state space was exhausted; hitting the budget yields
/// `inconclusive`.
pub fn certify(
    x: &TruncatedStratifiedSet,
    target: &Subset,
    start: &Subset,
    flavor: Flavor,
    dim: usize,
    opts: CertifyOptions,
) -> Result<CertifyOutcome, CertError> {
    if !start.is_subset_of(target) {
        return Err(CertError::Invalid("start is not contained in the target".into()));
    }
    let catalog = elementary_catalog(dim, flavor, opts.extras, opts.thin_horns);
    let mut search = Search {
        x,
        target,
        catalog,
        budget: opts.budget,
        nodes: 0,
        exhausted: true,
        visited: BTreeSet::new(),
    };
    let mut path = Vec::new();
    let found = search.dfs(start.clone(), &mut path)?;
    let status = if found.is_some() {
        Status::Pass
    } else if search.exhausted {
        Status::Fail
    } else {
        Status::Inconclusive
    };
    Ok(CertifyOutcome {
        status,
        certificate: found.map(|steps| Certificate {
            flavor,
            dim,
            extras: opts.extras,
            thin_horns: opts.thin_horns,
            steps,
        }),
        nodes: search.nodes,
    })
}

struct Search<'a> {
    x: &'a TruncatedStratifiedSet,
    target: &'a Subset,
    catalog: Vec<ElemKind>,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    visited: BTreeSet<Subset>,
}

impl Search<'_> {
    fn dfs(
        &mut self,
        cur: Subset,
        path: &mut Vec<CellStep>,
    ) -> Result<Option<Vec<CellStep>>, CertError> {
        if cur == *self.target {
            return Ok(Some(path.clone()));
        }
        if !self.visited.insert(cur.clone()) {
            return Ok(None);
        }
        for ei in 0..self.catalog.len() {
            let elem = self.catalog[ei];
            for step in self.candidate_steps(&elem, &cur)? {
                self.nodes += 1;
                if self.nodes >= self.budget {
                    self.exhausted = false;
                    return Ok(None);
                }
                if let Ok(nextstate) = step_apply(self.x, self.target, &cur, &step) {
                    path.push(step);
                    if let Some(found) = self.dfs(nextstate, path)? {
                        return Ok(Some(found));
                    }
                    path.pop();
                }
            }
        }
        Ok(None)
    }

    /// Candidate attachments for an elementary kind, in canonical order.
    /// Search enumerates non-degenerate attaching simplices; replay also
    /// accepts degenerate thinness upgrades.
    fn candidate_steps(&self, elem: &ElemKind, cur: &Subset) -> Result<Vec<CellStep>, CertError> {
        let mut out = Vec::new();
        match *elem {
            ElemKind::Horn { n, .. } | ElemKind::ThinHorn { n, .. } => {
                for g in self.x.gens(n) {
                    if !cur.contains(g) && self.target.contains(g) {
                        out.push(CellStep {
                            elem: *elem,
                            attach: Attachment::Simplex(AttachRef::of(
                                self.x,
                                &self.x.ref_of(g),
                            )),
                        });
                    }
                }
            }
            ElemKind::Thinness { n, .. } => {
                for g in self.x.gens(n) {
                    if cur.contains(g) {
                        out.push(CellStep {
                            elem: *elem,
                            attach: Attachment::Simplex(AttachRef::of(
                                self.x,
                                &self.x.ref_of(g),
                            )),
                        });
                    }
                }
            }
            ElemKind::ThinSimplex { n } => {
                for g in self.x.gens(n) {
                    if cur.contains(g) && !cur.flagged(g) && self.target.flagged(g) {
                        out.push(CellStep {
                            elem: *elem,
                            attach: Attachment::Simplex(AttachRef::of(
                                self.x,
                                &self.x.ref_of(g),
                            )),
                        });
                    }
                }
            }
            ElemKind::TildeE2 => {
                if self.x.truncation() < 2 {
                    return Ok(out);
                }
                let e2 = zoo::build_e(zoo::EFamily::E2, self.x.truncation(), true)?;
                let members = extract(self.x, cur)?;
                let maps = enumerate_maps(&e2, &members, &[], None, self.budget)
                    .map_err(|e| CertError::Invalid(e.to_string()))?;
                for m in maps.maps {
                    let refs: Vec<AttachRef> = (0..=e2.truncation())
                        .flat_map(|d| e2.gens(d))
                        .map(|g| {
                            let r = m.get(g);
                            // translate back to ambient names
                            let amb = self
                                .x
                                .gen_by_name(r.gen.dim, members.name(r.gen))
                                .expect("member name");
                            AttachRef::of(
                                self.x,
                                &SimplexRef { gen: amb, deg: r.deg.clone() },
                            )
                        })
                        .collect();
                    out.push(CellStep { elem: *elem, attach: Attachment::Map(refs) });
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::Subset;
    use crate::zoo::{ComplicialVariant, EFamily, Sign};

    fn opts() -> CertifyOptions {
        CertifyOptions::default()
    }

    #[test]
    fn catalog_counts() {
        let c = elementary_catalog(1, Flavor::All, Extras::None, false);
        assert_eq!(c, vec![ElemKind::Horn { n: 1, k: 0 }, ElemKind::Horn { n: 1, k: 1 }]);
        let c = elementary_catalog(3, Flavor::Inner, Extras::None, false);
        assert_eq!(c.len(), 6);
        let jq = elementary_catalog(2, Flavor::All, Extras::Jq, false);
        assert!(jq.contains(&ElemKind::TildeE2));
        assert!(jq.contains(&ElemKind::ThinSimplex { n: 2 }));
    }

    #[test]
    fn empty_certificate() {
        let x = zoo::standard(2).unwrap();
        let full = Subset::full(&x);
        let out = certify(&x, &full, &full, Flavor::All, 2, opts()).unwrap();
        assert_eq!(out.status, Status::Pass);
        let cert = out.certificate.unwrap();
        assert!(cert.steps.is_empty());
        let rep = replay(&x, &full, &full, &cert).unwrap();
        assert_eq!(rep.status, Status::Pass);
    }

    #[test]
    fn glueing_two_step_decomposition() {
        // Lambda^k[n]' -> Delta^k[n]'' in exactly two steps: the horn,
        // then the thinness upgrade.
        for n in 1..=3usize {
            for k in 0..=n {
                let x = zoo::build_complicial(n, k, ComplicialVariant::DoublePrime).unwrap();
                let start = zoo::horn_prime_subset(&x, n, k).unwrap();
                let target = Subset::full(&x);
                let flavor = Flavor::of(n, k);
                let out = certify(&x, &target, &start, flavor, n, opts()).unwrap();
                assert_eq!(out.status, Status::Pass, "n={n} k={k}");
                let cert = out.certificate.unwrap();
                let expected = if n == 1 { 1 } else { 2 };
                assert_eq!(cert.steps.len(), expected, "n={n} k={k}");
                let rep = replay(&x, &target, &start, &cert).unwrap();
                assert_eq!(rep.status, Status::Pass);
                assert_eq!(cert.effective_flavor(), Some(flavor));
            }
        }
    }

    #[test]
    fn replay_rejects_tampering() {
        let x = zoo::build_complicial(2, 1, ComplicialVariant::DoublePrime).unwrap();
        let start = zoo::horn_prime_subset(&x, 2, 1).unwrap();
        let target = Subset::full(&x);
        let out = certify(&x, &target, &start, Flavor::Inner, 2, opts()).unwrap();
        let cert = out.certificate.unwrap();
        assert_eq!(cert.steps.len(), 2);

        // Reordering the steps breaks face availability.
        let mut reordered = cert.clone();
        reordered.steps.reverse();
        let rep = replay(&x, &target, &start, &reordered).unwrap();
        assert_eq!(rep.status, Status::Fail);
        assert_eq!(rep.failed_step.unwrap().0, 0);

        // A certificate claiming inner flavor but using an outer horn
        // fails the catalog check.
        let y = zoo::build_complicial(2, 0, ComplicialVariant::DoublePrime).unwrap();
        let ystart = zoo::horn_prime_subset(&y, 2, 0).unwrap();
        let ytarget = Subset::full(&y);
        let yout = certify(&y, &ytarget, &ystart, Flavor::Left, 2, opts()).unwrap();
        let mut ycert = yout.certificate.unwrap();
        ycert.flavor = Flavor::Inner;
        let rep = replay(&y, &ytarget, &ystart, &ycert).unwrap();
        assert_eq!(rep.status, Status::Fail);

        // Dropping the last step misses the target.
        let mut short = cert.clone();
        short.steps.pop();
        let rep = replay(&x, &target, &start, &short).unwrap();
        assert_eq!(rep.status, Status::Fail);
        assert!(rep.failed_step.is_none());
    }

    #[test]
    fn horn_certificate_single_step() {
        let x = zoo::build_complicial(2, 1, ComplicialVariant::Plain).unwrap();
        let start = zoo::horn_subset(&x, 2, 1).unwrap();
        let target = Subset::full(&x);
        let out = certify(&x, &target, &start, Flavor::Inner, 2, opts()).unwrap();
        assert_eq!(out.status, Status::Pass);
        assert_eq!(out.certificate.unwrap().steps.len(), 1);
    }

    #[test]
    fn budget_yields_inconclusive() {
        let x = zoo::build_complicial(2, 1, ComplicialVariant::DoublePrime).unwrap();
        let start = zoo::horn_prime_subset(&x, 2, 1).unwrap();
        let target = Subset::full(&x);
        let out = certify(
            &x,
            &target,
            &start,
            Flavor::Inner,
            2,
            CertifyOptions { budget: 1, ..opts() },
        )
        .unwrap();
        assert_eq!(out.status, Status::Inconclusive);
    }

    #[test]
    fn unreachable_target_fails() {
        // A bare simplex cannot be built from its boundary by anodyne
        // steps (no thin filler available in the minimal stratification).
        let x = zoo::standard(2).unwrap();
        let start = zoo::boundary_subset(&x, 2).unwrap();
        let target = Subset::full(&x);
        let out = certify(&x, &target, &start, Flavor::All, 2, opts()).unwrap();
        assert_eq!(out.status, Status::Fail);
    }

    #[test]
    fn e_family_single_thin_horn_step() {
        // E^p_n -> E^p_{n+1} as a single pushout of the thin horn.
        for n in 0..=2usize {
            let big = zoo::build_e(EFamily::EPN(Sign::Minus, n + 1), n + 1, false).unwrap();
            let small = zoo::build_e(EFamily::EPN(Sign::Minus, n), n + 1, false).unwrap();
            let start = crate::strata::locate_subset(&big, &small).unwrap();
            let target = Subset::full(&big);
            let filler = big.gen_by_name(n + 1, &zoo::e_gen_name(Sign::Minus, n + 1)).unwrap();
            let cert = Certificate {
                flavor: Flavor::Left,
                dim: n + 1,
                extras: Extras::None,
                thin_horns: true,
                steps: vec![CellStep {
                    elem: ElemKind::ThinHorn { n: n + 1, k: 0 },
                    attach: Attachment::Simplex(AttachRef::of(&big, &big.ref_of(filler))),
                }],
            };
            let rep = replay(&big, &target, &start, &cert).unwrap();
            assert_eq!(rep.status, Status::Pass, "n={n}");
            // The search with thin horns enabled also finds a certificate.
            let out = certify(
                &big,
                &target,
                &start,
                Flavor::Left,
                n + 1,
                CertifyOptions { thin_horns: true, ..opts() },
            )
            .unwrap();
            assert_eq!(out.status, Status::Pass);
        }
    }

    #[test]
    fn entire_generalized_variant_via_thinness() {
        // The entire inclusion (horn \/ minimal k-complicial) -> N for a
        // larger compliant N certifies through thinness steps alone.
        let (min, horn) = zoo::build_generalized(3, &[1]).unwrap();
        let n = zoo::triv(1, &min);
        assert!(zoo::verify_kvec_conditions(&n, 3, &[1]).unwrap());
        let horn_regular = {
            let mut h = Subset::empty(&n);
            for g in n.all_gens() {
                if horn.contains(g) {
                    h.insert(g);
                    if g.dim >= 1 && n.thin_flag(g) {
                        h.flag(g);
                    }
                }
            }
            h
        };
        let entire_min = Subset::entire_with_flags(&n, |g| min.thin_flag(g));
        let start = crate::strata::subset_union(&horn_regular, &entire_min).unwrap();
        let target = Subset::full(&n);
        let out = certify(&n, &target, &start, Flavor::Inner, 3, opts()).unwrap();
        assert_eq!(out.status, Status::Pass);
        let cert = out.certificate.unwrap();
        assert!(cert
            .steps
            .iter()
            .all(|s| matches!(s.elem, ElemKind::Thinness { .. })));
        let rep = replay(&n, &target, &start, &cert).unwrap();
        assert_eq!(rep.status, Status::Pass);
    }

    #[test]
    fn e_chain_left_and_right_routes() {
        // E^-_1 -> E^-_3 is both left anodyne (through E^-_2) and right
        // anodyne (through E^+_2): the two alternating chains of
        // thin-horn pushouts replay, and the search certifies both
        // flavors independently.
        let big = zoo::build_e(EFamily::EPN(Sign::Minus, 3), 3, false).unwrap();
        let small = zoo::build_e(EFamily::EPN(Sign::Minus, 1), 3, false).unwrap();
        let start = crate::strata::locate_subset(&big, &small).unwrap();
        let target = Subset::full(&big);
        let filler = |s: Sign, d: usize| {
            let g = big.gen_by_name(d, &zoo::e_gen_name(s, d)).unwrap();
            Attachment::Simplex(AttachRef::of(&big, &big.ref_of(g)))
        };
        let chains = [
            // via E^-_2: both steps are left thin horns
            (
                Flavor::Left,
                vec![
                    CellStep { elem: ElemKind::ThinHorn { n: 2, k: 0 }, attach: filler(Sign::Minus, 2) },
                    CellStep { elem: ElemKind::ThinHorn { n: 3, k: 0 }, attach: filler(Sign::Minus, 3) },
                ],
            ),
            // via E^+_2: right outer thin horns
            (
                Flavor::Right,
                vec![
                    CellStep { elem: ElemKind::ThinHorn { n: 2, k: 2 }, attach: filler(Sign::Plus, 2) },
                    CellStep { elem: ElemKind::ThinHorn { n: 3, k: 3 }, attach: filler(Sign::Minus, 3) },
                ],
            ),
        ];
        for (flavor, steps) in chains {
            let cert = Certificate {
                flavor,
                dim: 3,
                extras: Extras::None,
                thin_horns: true,
                steps,
            };
            let rep = replay(&big, &target, &start, &cert).unwrap();
            assert_eq!(rep.status, Status::Pass, "{flavor:?}");
            // the search also finds some certificate in each flavor
            let out = certify(
                &big,
                &target,
                &start,
                flavor,
                3,
                CertifyOptions { thin_horns: true, ..opts() },
            )
            .unwrap();
            assert_eq!(out.status, Status::Pass, "{flavor:?}");
        }
    }

    #[test]
    fn generalized_horn_certificates_small() {
        for n in 1..=3usize {
            for kvec in [vec![0], vec![1], vec![0, 2]] {
                if kvec.iter().any(|&k| k > n) || (kvec == vec![0, 2] && n < 2) {
                    continue;
                }
                let (x, horn) = zoo::build_generalized(n, &kvec).unwrap();
                let target = Subset::full(&x);
                let inner = kvec[0] > 0 && *kvec.last().unwrap() < n;
                let flavor = if inner { Flavor::Inner } else { Flavor::All };
                let out = certify(&x, &target, &horn, flavor, n, opts()).unwrap();
                assert_eq!(out.status, Status::Pass, "n={n} kvec={kvec:?}");
                let rep = replay(&x, &target, &horn, &out.certificate.unwrap()).unwrap();
                assert_eq!(rep.status, Status::Pass);
            }
        }
    }
}

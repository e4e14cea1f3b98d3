//! Joins and the four tensor stratifications of the simplicial product,
//! corner constructions, shuffle combinatorics, and the depth-filtration
//! subsets of products of standard simplices.

use crate::delta_ops::{partition_ops, Operator};
use crate::strata::{
    generated_subset, product_underlying, GenId, Product, SetBuilder, SimplexRef, StrataError,
    Subset, SubsetMode, TruncatedStratifiedSet,
};
use crate::zoo::operator_of_simplex;
use std::collections::BTreeMap;

// ---------------------------------------------------------------------------
// Joins
// ---------------------------------------------------------------------------

/// Augmentation convention for a join factor. Canonical uses the set of
/// connected components as `(-1)`-simplices; trivial uses a single point
/// (making the empty set the unit of the join).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JoinAug {
    Canonical,
    Trivial,
}

/// One side of a join generator: a `(-1)`-dimensional augmentation
/// element or a generator of the factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum JoinPart {
    Base(usize),
    Gen(GenId),
}

impl JoinPart {
    fn dim(&self) -> i32 {
        match self {
            JoinPart::Base(_) => -1,
            JoinPart::Gen(g) => g.dim as i32,
        }
    }
}

/// A join of two stratified sets with its generator decomposition.
#[derive(Debug, Clone)]
pub struct Join {
    pub set: TruncatedStratifiedSet,
    pub parts: Vec<Vec<(JoinPart, JoinPart)>>,
    pub left_comp: Vec<usize>,
    pub right_comp: Vec<usize>,
    pub left_comp_count: usize,
    pub right_comp_count: usize,
}

impl Join {
    pub fn parts_of(&self, g: GenId) -> &(JoinPart, JoinPart) {
        &self.parts[g.dim][g.idx]
    }
}

/// Connected components of the 0-skeleton, or the single point of the
/// trivial augmentation. Component ids are ranked by least vertex index.
fn components(x: &TruncatedStratifiedSet, aug: JoinAug) -> (usize, Vec<usize>) {
    let v = x.gen_count(0);
    match aug {
        JoinAug::Trivial => (1, vec![0; v]),
        JoinAug::Canonical => {
            let mut parent: Vec<usize> = (0..v).collect();
            fn find(parent: &mut Vec<usize>, i: usize) -> usize {
                if parent[i] != i {
                    let r = find(parent, parent[i]);
                    parent[i] = r;
                }
                parent[i]
            }
            if x.truncation() >= 1 {
                for e in x.gens(1) {
                    let a = x.face(e, 0).gen.idx;
                    let b = x.face(e, 1).gen.idx;
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
            let mut ids = BTreeMap::new();
            let mut map = Vec::with_capacity(v);
            for i in 0..v {
                let root = find(&mut parent, i);
                let next = ids.len();
                map.push(*ids.entry(root).or_insert(next));
            }
            (ids.len(), map)
        }
    }
}

fn part_label(x: &TruncatedStratifiedSet, p: &JoinPart) -> String {
    match p {
        JoinPart::Base(c) => format!("~{c}"),
        JoinPart::Gen(g) => x.name(*g).to_string(),
    }
}

/// The join of stratified sets under the chosen augmentations, truncated
/// at `trunc`. Generators of dimension `r` are pairs with dimensions
/// summing to `r - 1`; a pair is thin iff either coordinate is.
#[allow(clippy::needless_range_loop)]
pub fn join(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    aug_x: JoinAug,
    aug_y: JoinAug,
    trunc: usize,
) -> Result<Join, StrataError> {
    let (lc, left_comp) = components(x, aug_x);
    let (rc, right_comp) = components(y, aug_y);
    let mut builder = SetBuilder::new(trunc);
    let mut parts: Vec<Vec<(JoinPart, JoinPart)>> = vec![Vec::new(); trunc + 1];
    let mut index: BTreeMap<(JoinPart, JoinPart), GenId> = BTreeMap::new();
    for r in 0..=trunc {
        for da in -1..=(r as i32) {
            let db = r as i32 - 1 - da;
            if da > x.truncation() as i32 || db > y.truncation() as i32 || db < -1 {
                continue;
            }
            let lefts: Vec<JoinPart> = if da == -1 {
                (0..lc).map(JoinPart::Base).collect()
            } else {
                x.gens(da as usize).map(JoinPart::Gen).collect()
            };
            let rights: Vec<JoinPart> = if db == -1 {
                (0..rc).map(JoinPart::Base).collect()
            } else {
                y.gens(db as usize).map(JoinPart::Gen).collect()
            };
            for &a in &lefts {
                for &b in &rights {
                    let faces = join_faces(x, y, &left_comp, &right_comp, a, b, r, &index)?;
                    let thin = match (a, b) {
                        (JoinPart::Gen(g), _) if g.dim >= 1 && x.thin_flag(g) => true,
                        (_, JoinPart::Gen(g)) if g.dim >= 1 && y.thin_flag(g) => true,
                        _ => false,
                    };
                    let name = format!("({}|{})", part_label(x, &a), part_label(y, &b));
                    let id = builder.add_generator(r, name, faces, thin)?;
                    index.insert((a, b), id);
                    parts[r].push((a, b));
                }
            }
        }
    }
    Ok(Join {
        set: builder.build()?,
        parts,
        left_comp,
        right_comp,
        left_comp_count: lc,
        right_comp_count: rc,
    })
}

#[allow(clippy::too_many_arguments)]
fn join_faces(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    left_comp: &[usize],
    right_comp: &[usize],
    a: JoinPart,
    b: JoinPart,
    r: usize,
    index: &BTreeMap<(JoinPart, JoinPart), GenId>,
) -> Result<Vec<SimplexRef>, StrataError> {
    if r == 0 {
        return Ok(Vec::new());
    }
    let da = a.dim();
    let db = b.dim();
    let mut faces = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let (na, nb, epi) = if (i as i32) <= da {
            let JoinPart::Gen(g) = a else { unreachable!("left face needs a generator") };
            if da == 0 {
                (JoinPart::Base(left_comp[g.idx]), b, Operator::identity(r as i32 - 1))
            } else {
                let f = x.face(g, i);
                let epi = f.deg.ordinal_sum(&Operator::identity(db));
                (JoinPart::Gen(f.gen), b, epi)
            }
        } else {
            let j = (i as i32 - da - 1) as usize;
            let JoinPart::Gen(g) = b else { unreachable!("right face needs a generator") };
            if db == 0 {
                (a, JoinPart::Base(right_comp[g.idx]), Operator::identity(r as i32 - 1))
            } else {
                let f = y.face(g, j);
                let epi = Operator::identity(da).ordinal_sum(&f.deg);
                (a, JoinPart::Gen(f.gen), epi)
            }
        };
        let gen = *index
            .get(&(na, nb))
            .ok_or_else(|| StrataError::Invalid("join faces not closed".into()))?;
        faces.push(SimplexRef { gen, deg: epi });
    }
    Ok(faces)
}

/// Join of two factors at its exact truncation, canonically augmented.
pub fn join_exact(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
) -> Result<Join, StrataError> {
    join(x, y, JoinAug::Canonical, JoinAug::Canonical, x.truncation() + y.truncation() + 1)
}

// ---------------------------------------------------------------------------
// Tensor stratifications
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensorKind {
    Join,
    Gray,
    Lax,
    Pretensor,
    Boxdot,
}

type ThinRule = fn(
    &TruncatedStratifiedSet,
    &TruncatedStratifiedSet,
    &dyn Fn(&SimplexRef) -> bool,
    &dyn Fn(&SimplexRef) -> bool,
    &SimplexRef,
    &SimplexRef,
) -> Result<bool, StrataError>;

/// Gray rule: both coordinates thin.
fn gray_thin(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    tx: &dyn Fn(&SimplexRef) -> bool,
    ty: &dyn Fn(&SimplexRef) -> bool,
    a: &SimplexRef,
    b: &SimplexRef,
) -> Result<bool, StrataError> {
    let _ = (x, y);
    Ok(tx(a) && ty(b))
}

/// Lax rule: for every partition `p + q = r`, the front `p`-face of the
/// first coordinate or the back `q`-face of the second is thin.
fn lax_thin(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    tx: &dyn Fn(&SimplexRef) -> bool,
    ty: &dyn Fn(&SimplexRef) -> bool,
    a: &SimplexRef,
    b: &SimplexRef,
) -> Result<bool, StrataError> {
    let r = a.dim();
    for p in 0..=r {
        let ops = partition_ops(p as u32, (r - p) as u32);
        let front = x.act(a, &ops.bot1)?;
        let back = y.act(b, &ops.bot2)?;
        if !tx(&front) && !ty(&back) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pre-tensor rule: either the coordinates are degenerate at adjacent
/// indices `k-1`, `k`, or the pair factors through a partition with a
/// thin coordinate.
fn pretensor_thin(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    tx: &dyn Fn(&SimplexRef) -> bool,
    ty: &dyn Fn(&SimplexRef) -> bool,
    a: &SimplexRef,
    b: &SimplexRef,
) -> Result<bool, StrataError> {
    let r = a.dim();
    for k in 1..r {
        if a.deg.collapses_at(k - 1) && b.deg.collapses_at(k) {
            return Ok(true);
        }
    }
    for p in 0..=r {
        if let Some((fa, fb)) = factor_through(x, y, a, b, p, r - p)? {
            if tx(&fa) || ty(&fb) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// When `a = a'.top1` and `b = b'.top2` for the `p, q` partition, returns
/// the pair `(a', b')`.
fn factor_through(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    a: &SimplexRef,
    b: &SimplexRef,
    p: usize,
    q: usize,
) -> Result<Option<(SimplexRef, SimplexRef)>, StrataError> {
    let ops = partition_ops(p as u32, q as u32);
    let fa = x.act(a, &ops.bot1)?;
    let fb = y.act(b, &ops.bot2)?;
    if x.act(&fa, &ops.top1)? == *a && y.act(&fb, &ops.top2)? == *b {
        Ok(Some((fa, fb)))
    } else {
        Ok(None)
    }
}

fn boxdot_thin(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    tx: &dyn Fn(&SimplexRef) -> bool,
    ty: &dyn Fn(&SimplexRef) -> bool,
    a: &SimplexRef,
    b: &SimplexRef,
) -> Result<bool, StrataError> {
    if pretensor_thin(x, y, tx, ty, a, b)? {
        return Ok(true);
    }
    let r = a.dim();
    for p in 1..r {
        if factor_through(x, y, a, b, p, r - p)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

fn product_rule(kind: TensorKind) -> ThinRule {
    match kind {
        TensorKind::Gray => gray_thin,
        TensorKind::Lax => lax_thin,
        TensorKind::Pretensor => pretensor_thin,
        TensorKind::Boxdot => boxdot_thin,
        TensorKind::Join => panic!("join is not a product stratification"),
    }
}

fn product_tensor(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    kind: TensorKind,
) -> Result<Product, StrataError> {
    let prod = product_underlying(x, y)?;
    let rule = product_rule(kind);
    let tx = |r: &SimplexRef| x.is_thin(r);
    let ty = |r: &SimplexRef| y.is_thin(r);
    let mut builder = SetBuilder::new(prod.set.truncation());
    for dim in 0..=prod.set.truncation() {
        for g in prod.set.gens(dim) {
            let (a, b) = prod.components(g);
            let thin = dim >= 1 && rule(x, y, &tx, &ty, a, b)?;
            builder.add_generator(dim, prod.set.name(g), prod.set.faces(g).to_vec(), thin)?;
        }
    }
    Ok(Product { set: builder.build_unchecked(), pairs: prod.pairs })
}

/// Gray tensor: the cartesian product of stratified sets.
pub fn gray(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
) -> Result<Product, StrataError> {
    product_tensor(x, y, TensorKind::Gray)
}

/// Associative lax Gray tensor.
pub fn lax(x: &TruncatedStratifiedSet, y: &TruncatedStratifiedSet) -> Result<Product, StrataError> {
    product_tensor(x, y, TensorKind::Lax)
}

/// Lax Gray pre-tensor.
pub fn pretensor(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
) -> Result<Product, StrataError> {
    product_tensor(x, y, TensorKind::Pretensor)
}

/// The pre-tensor enlarged by all partition-degenerate simplices.
pub fn boxdot(
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
) -> Result<Product, StrataError> {
    product_tensor(x, y, TensorKind::Boxdot)
}

// ---------------------------------------------------------------------------
// Corner constructions
// ---------------------------------------------------------------------------

/// The ambient object of a corner construction.
#[derive(Debug, Clone)]
pub enum CornerAmbient {
    Join(Join),
    Prod(Product),
}

impl CornerAmbient {
    pub fn set(&self) -> &TruncatedStratifiedSet {
        match self {
            CornerAmbient::Join(j) => &j.set,
            CornerAmbient::Prod(p) => &p.set,
        }
    }
}

/// How the `(-1)`-simplices of a join side are determined for a subset:
/// canonically (a component is present iff one of the subset's vertices
/// lies in it) or fully (all components, the convention that makes the
/// boundary of the 0-simplex the join unit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseMode {
    Canonical,
    Full,
}

/// A corner inclusion `(U . Y) \/ (V . X) -> V . Y` presented as a
/// subset of the ambient tensor.
#[derive(Debug, Clone)]
pub struct CornerData {
    pub ambient: CornerAmbient,
    pub domain: Subset,
}

/// Builds the corner domain of `e : U -> V` and `i : X -> Y` under the
/// chosen tensor; `e` and `i` are given as subsets of their codomains.
/// The base modes choose the `(-1)`-simplices of the join sides and are
/// ignored by the product tensors.
#[allow(clippy::too_many_arguments)]
pub fn corner_domain(
    v: &TruncatedStratifiedSet,
    u: &Subset,
    ub: BaseMode,
    y: &TruncatedStratifiedSet,
    xs: &Subset,
    xb: BaseMode,
    kind: TensorKind,
    trunc: usize,
) -> Result<CornerData, StrataError> {
    match kind {
        TensorKind::Join => {
            let ambient = join(v, y, JoinAug::Canonical, JoinAug::Canonical, trunc)?;
            let domain = join_corner_subset(&ambient, v, u, ub, y, xs, xb)?;
            Ok(CornerData { ambient: CornerAmbient::Join(ambient), domain })
        }
        _ => {
            let ambient = product_tensor(v, y, kind)?;
            let domain = product_corner_subset(&ambient, v, u, y, xs, kind)?;
            Ok(CornerData { ambient: CornerAmbient::Prod(ambient), domain })
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn join_corner_subset(
    ambient: &Join,
    v: &TruncatedStratifiedSet,
    u: &Subset,
    ub: BaseMode,
    y: &TruncatedStratifiedSet,
    xs: &Subset,
    xb: BaseMode,
) -> Result<Subset, StrataError> {
    // A component of the big factor lies in the small side iff one of its
    // vertices does, or always under the full base mode.
    let comp_in = |comp: usize, comps: &[usize], side: &Subset, mode: BaseMode| {
        mode == BaseMode::Full
            || comps
                .iter()
                .enumerate()
                .any(|(idx, &c)| c == comp && side.contains(GenId { dim: 0, idx }))
    };
    let part_in = |p: &JoinPart, comps: &[usize], side: &Subset, mode: BaseMode| match p {
        JoinPart::Base(c) => comp_in(*c, comps, side, mode),
        JoinPart::Gen(g) => side.contains(*g),
    };
    let part_thin = |p: &JoinPart, side: &Subset| match p {
        JoinPart::Base(_) => false,
        JoinPart::Gen(g) => g.dim >= 1 && side.flagged(*g),
    };
    let full_v = Subset::full(v);
    let full_y = Subset::full(y);
    let mut out = Subset::empty(&ambient.set);
    for dim in 0..=ambient.set.truncation() {
        for g in ambient.set.gens(dim) {
            let (a, b) = ambient.parts_of(g);
            let in_uy = part_in(a, &ambient.left_comp, u, ub)
                && part_in(b, &ambient.right_comp, &full_y, BaseMode::Full);
            let in_vx = part_in(a, &ambient.left_comp, &full_v, BaseMode::Full)
                && part_in(b, &ambient.right_comp, xs, xb);
            if in_uy || in_vx {
                out.insert(g);
                let thin_uy = in_uy && (part_thin(a, u) || part_thin(b, &full_y));
                let thin_vx = in_vx && (part_thin(a, &full_v) || part_thin(b, xs));
                if dim >= 1 && (thin_uy || thin_vx) {
                    out.flag(g);
                }
            }
        }
    }
    Ok(out)
}

fn product_corner_subset(
    ambient: &Product,
    v: &TruncatedStratifiedSet,
    u: &Subset,
    y: &TruncatedStratifiedSet,
    xs: &Subset,
    kind: TensorKind,
) -> Result<Subset, StrataError> {
    let rule = product_rule(kind);
    let tu = |r: &SimplexRef| u.is_thin(r);
    let tx = |r: &SimplexRef| xs.is_thin(r);
    let tv = |r: &SimplexRef| v.is_thin(r);
    let ty = |r: &SimplexRef| y.is_thin(r);
    let mut out = Subset::empty(&ambient.set);
    for dim in 0..=ambient.set.truncation() {
        for g in ambient.set.gens(dim) {
            let (a, b) = ambient.components(g);
            let in_uy = u.contains_ref(a);
            let in_vx = xs.contains_ref(b);
            if in_uy || in_vx {
                out.insert(g);
                let thin_uy = in_uy && dim >= 1 && rule(v, y, &tu, &ty, a, b)?;
                let thin_vx = in_vx && dim >= 1 && rule(v, y, &tv, &tx, a, b)?;
                if thin_uy || thin_vx {
                    out.flag(g);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Shuffles
// ---------------------------------------------------------------------------

/// A non-degenerate top simplex of `Delta[n] x Delta[m]`: a pair of
/// surjections with the ordinate summation property.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shuffle {
    pub n: usize,
    pub m: usize,
    pub alpha: Operator,
    pub beta: Operator,
    pub moves: String,
}

/// All shuffles in lexicographic move-string order (`R` before `U`).
pub fn shuffles(n: usize, m: usize) -> Vec<Shuffle> {
    fn rec(n: usize, m: usize, r: usize, u: usize, moves: &mut String, out: &mut Vec<Shuffle>) {
        if r == n && u == m {
            let mut alpha = vec![0u32];
            let mut beta = vec![0u32];
            for c in moves.chars() {
                let (a, b) = (*alpha.last().unwrap(), *beta.last().unwrap());
                if c == 'R' {
                    alpha.push(a + 1);
                    beta.push(b);
                } else {
                    alpha.push(a);
                    beta.push(b + 1);
                }
            }
            out.push(Shuffle {
                n,
                m,
                alpha: Operator::new(n as i32, alpha).unwrap(),
                beta: Operator::new(m as i32, beta).unwrap(),
                moves: moves.clone(),
            });
            return;
        }
        if r < n {
            moves.push('R');
            rec(n, m, r + 1, u, moves, out);
            moves.pop();
        }
        if u < m {
            moves.push('U');
            rec(n, m, r, u + 1, moves, out);
            moves.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, m, 0, 0, &mut String::new(), &mut out);
    out
}

/// Depth of a shuffle: the number of grid squares left of and above its
/// lattice path.
pub fn depth(s: &Shuffle) -> usize {
    (0..=(s.n + s.m))
        .map(|i| {
            let a = s.alpha.apply(i) as usize;
            let b = s.beta.apply(i) as usize;
            a.min(s.m - b)
        })
        .sum()
}

/// Indices of the left-upper and right-lower corners of a shuffle.
pub fn corners(s: &Shuffle) -> (Vec<usize>, Vec<usize>) {
    let mut lu = Vec::new();
    let mut rl = Vec::new();
    for i in 1..(s.n + s.m) {
        if s.alpha.apply(i - 1) == s.alpha.apply(i) && s.beta.apply(i) == s.beta.apply(i + 1) {
            lu.push(i);
        }
        if s.beta.apply(i - 1) == s.beta.apply(i) && s.alpha.apply(i) == s.alpha.apply(i + 1) {
            rl.push(i);
        }
    }
    (lu, rl)
}

// ---------------------------------------------------------------------------
// Depth filtration of a product of standard simplices
// ---------------------------------------------------------------------------

/// The underlying operator of a simplex of a simplex-based factor.
pub fn operator_of_ref(
    x: &TruncatedStratifiedSet,
    r: &SimplexRef,
    n: usize,
) -> Result<Operator, StrataError> {
    let base = operator_of_simplex(x, r.gen, n)?;
    base.compose(&r.deg).map_err(StrataError::from)
}

/// Checks the two upper-left-corner clauses on every non-degenerate
/// simplex of a product of entire supersets of `Delta[n]` and `Delta[m]`.
pub fn verify_p_conditions(
    p: &Product,
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    n: usize,
    m: usize,
) -> Result<bool, StrataError> {
    for dim in 2..=p.set.truncation() {
        for g in p.set.gens(dim) {
            let (a, b) = p.components(g);
            let phi = operator_of_ref(x, a, n)?;
            let psi = operator_of_ref(y, b, m)?;
            for l in 1..dim {
                if phi.apply(l - 1) != phi.apply(l) || psi.apply(l) != psi.apply(l + 1) {
                    continue;
                }
                if !p.set.thin_flag(g) {
                    return Ok(false);
                }
                let thin_face = |i: usize| p.set.is_thin(p.set.face(g, i));
                if thin_face(l) && (!thin_face(l - 1) || !thin_face(l + 1)) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// One slice of the depth filtration, together with the entire variants
/// that union in the minimal lax stratification.
#[derive(Debug, Clone)]
pub struct DepthSlice {
    pub d: i64,
    pub p_d: Subset,
    pub boundary_p_d: Subset,
    pub tilde_p_d: Subset,
    pub boundary_tilde_p_d: Subset,
    /// Set when the ambient failed the corner conditions and the lax
    /// flags had to be clipped.
    pub warned: bool,
}

/// The generator ids of the shuffles of `p`, with their depths.
pub fn shuffle_gens(
    p: &Product,
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    n: usize,
    m: usize,
) -> Result<Vec<(GenId, usize)>, StrataError> {
    let mut out = Vec::new();
    for g in p.set.gens(n + m) {
        let (a, b) = p.components(g);
        let phi = operator_of_ref(x, a, n)?;
        let psi = operator_of_ref(y, b, m)?;
        if phi.is_surjective() && psi.is_surjective() {
            let s = Shuffle { n, m, alpha: phi, beta: psi, moves: String::new() };
            out.push((g, depth(&s)));
        }
    }
    Ok(out)
}

/// Computes `P_d`, its boundary, and their unions with the minimal lax
/// stratification, for a product `p` of entire supersets of standard
/// simplices. Use `d = nm - 1` for the bulleted subsets.
#[allow(clippy::needless_range_loop)]
pub fn depth_filtration(
    p: &Product,
    x: &TruncatedStratifiedSet,
    y: &TruncatedStratifiedSet,
    n: usize,
    m: usize,
    d: i64,
) -> Result<DepthSlice, StrataError> {
    if d < -1 || d > (n * m) as i64 {
        return Err(StrataError::Invalid(format!("depth {d} out of range for ({n},{m})")));
    }
    let shuffles = shuffle_gens(p, x, y, n, m)?;
    let seeds: Vec<SimplexRef> = shuffles
        .iter()
        .filter(|&&(_, dep)| (dep as i64) <= d)
        .map(|&(g, _)| p.set.ref_of(g))
        .collect();
    let p_d = generated_subset(&p.set, &seeds, SubsetMode::Regular);
    // Boundary: pairs with a non-surjective coordinate operator.
    let mut boundary = Subset::empty(&p.set);
    for dim in 0..=p.set.truncation() {
        for g in p.set.gens(dim) {
            let (a, b) = p.components(g);
            let phi = operator_of_ref(x, a, n)?;
            let psi = operator_of_ref(y, b, m)?;
            if !phi.is_surjective() || !psi.is_surjective() {
                boundary.insert(g);
                if dim >= 1 && p.set.thin_flag(g) {
                    boundary.flag(g);
                }
            }
        }
    }
    let boundary_p_d = crate::strata::subset_intersection(&p_d, &boundary)?;
    // Minimal lax flags: the lax rule over minimally stratified factors.
    let degenerate = |r: &SimplexRef| r.is_degenerate();
    let mut warned = false;
    let mut lax_min = vec![Vec::new(); p.set.truncation() + 1];
    for dim in 0..=p.set.truncation() {
        for g in p.set.gens(dim) {
            let (a, b) = p.components(g);
            let mut t = dim >= 1 && lax_thin(x, y, &degenerate, &degenerate, a, b)?;
            if t && !p.set.thin_flag(g) {
                warned = true;
                t = false;
            }
            lax_min[dim].push(t);
        }
    }
    let entire_union = |sub: &Subset| -> Subset {
        let mut out = Subset::full(&p.set);
        out.flags = (0..=p.set.truncation())
            .map(|dim| p.set.gens(dim).map(|g| lax_min[dim][g.idx] || sub.flagged(g)).collect())
            .collect();
        out
    };
    Ok(DepthSlice {
        d,
        tilde_p_d: entire_union(&p_d),
        boundary_tilde_p_d: entire_union(&boundary_p_d),
        p_d,
        boundary_p_d,
        warned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strata::{extract, isomorphic, locate_subset};
    use crate::zoo::{self, ComplicialVariant};

    #[test]
    fn join_of_simplices_is_simplex() {
        for n in 0..=2usize {
            for m in 0..=2usize {
                if n + m + 1 > 4 {
                    continue;
                }
                let a = zoo::standard(n).unwrap();
                let b = zoo::standard(m).unwrap();
                let j = join_exact(&a, &b).unwrap();
                let target = zoo::standard(n + m + 1).unwrap();
                assert!(isomorphic(&j.set, &target, &[], 4_000_000).iso.is_some(), "{n}+{m}");
            }
        }
    }

    #[test]
    fn join_complicial_left_factor() {
        // Delta^k[n] (+) Delta[m] = Delta^k[n+m+1] for k < n.
        for n in 1..=3usize {
            for m in 0..=1usize {
                if n + m + 1 > 4 {
                    continue;
                }
                for k in 0..n {
                    let a = zoo::build_complicial(n, k, ComplicialVariant::Plain).unwrap();
                    let b = zoo::standard(m).unwrap();
                    let j = join_exact(&a, &b).unwrap();
                    let target =
                        zoo::build_complicial(n + m + 1, k, ComplicialVariant::Plain).unwrap();
                    assert!(
                        isomorphic(&j.set, &target, &[], 4_000_000).iso.is_some(),
                        "k={k} n={n} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn join_units() {
        // Trivially augmented empty set is the unit; canonically augmented
        // empty set annihilates.
        let e = TruncatedStratifiedSet::empty(0);
        let y = zoo::standard(2).unwrap();
        let j = join(&e, &y, JoinAug::Trivial, JoinAug::Canonical, 2).unwrap();
        assert!(isomorphic(&j.set, &y, &[], 100_000).iso.is_some());
        let j0 = join(&e, &y, JoinAug::Canonical, JoinAug::Canonical, 2).unwrap();
        assert_eq!(j0.set.total_gens(), 0);
    }

    #[test]
    fn gray_examples() {
        let d1t = zoo::standard_thin(1).unwrap().with_truncation(2);
        let g = gray(&d1t, &d1t).unwrap();
        for gen in g.set.all_gens() {
            if gen.dim >= 1 {
                assert!(g.set.thin_flag(gen), "{}", g.set.name(gen));
            }
        }
        // diagonal edge of Delta[1]_t x Delta[1] is not thin
        let d1 = zoo::standard(1).unwrap().with_truncation(2);
        let g = gray(&d1t, &d1).unwrap();
        let diag =
            g.set.all_gens().find(|&gen| gen.dim == 1 && g.set.name(gen) == "(0.1|0.1)").unwrap();
        assert!(!g.set.thin_flag(diag));

        let pt = zoo::standard(0).unwrap().with_truncation(2);
        let d2 = zoo::standard(2).unwrap();
        let gp = gray(&d2.with_truncation(2), &pt).unwrap();
        assert!(isomorphic(&gp.set, &d2, &[], 100_000).iso.is_some());
    }

    #[test]
    fn lax_partition_criterion() {
        let d2t = zoo::standard_thin(2).unwrap();
        let l = lax(&d2t, &d2t).unwrap();
        let g = gray(&d2t, &d2t).unwrap();
        let top2 =
            l.set.all_gens().find(|&gen| gen.dim == 2 && l.set.name(gen) == "(0.1.2|0.1.2)").unwrap();
        assert!(!l.set.thin_flag(top2));
        assert!(g.set.thin_flag(top2));
        // lax is an entire subset of gray: flags below
        for gen in l.set.all_gens() {
            assert!(!l.set.thin_flag(gen) || g.set.thin_flag(gen));
        }
    }

    #[test]
    fn lax_unit() {
        let pt = zoo::standard(0).unwrap().with_truncation(3);
        let y = zoo::build_complicial(3, 1, ComplicialVariant::Plain).unwrap();
        let l = lax(&pt, &y).unwrap();
        assert!(isomorphic(&l.set, &y, &[], 1_000_000).iso.is_some());
    }

    #[test]
    fn pretensor_clause_one() {
        let d1 = zoo::standard(1).unwrap().with_truncation(2);
        let p = pretensor(&d1, &d1).unwrap();
        // ((0,0,1),(0,1,1)) is thin by clause one with k = 1.
        let t = p
            .set
            .all_gens()
            .find(|&g| g.dim == 2 && p.set.name(g) == "(0.1*0.0.1|0.1*0.1.1)")
            .unwrap();
        assert!(p.set.thin_flag(t));
        // and the pre-tensor of a simplex with a point is the simplex
        let pt = zoo::standard(0).unwrap().with_truncation(2);
        let d2 = zoo::standard(2).unwrap();
        let pp = pretensor(&d2.with_truncation(2), &pt).unwrap();
        assert!(isomorphic(&pp.set, &d2, &[], 100_000).iso.is_some());
    }

    #[test]
    fn flag_chains() {
        // boxtimes <= otimes <= gray and boxtimes <= boxdot <= gray.
        let factors: Vec<TruncatedStratifiedSet> = vec![
            zoo::standard(1).unwrap().with_truncation(3),
            zoo::standard_thin(1).unwrap().with_truncation(3),
            zoo::standard(2).unwrap().with_truncation(3),
            zoo::standard_thin(2).unwrap().with_truncation(3),
        ];
        for a in &factors {
            for b in &factors {
                let pre = pretensor(a, b).unwrap();
                let laxed = lax(a, b).unwrap();
                let grayed = gray(a, b).unwrap();
                let boxed = boxdot(a, b).unwrap();
                for g in pre.set.all_gens() {
                    assert!(!pre.set.thin_flag(g) || laxed.set.thin_flag(g));
                    assert!(!laxed.set.thin_flag(g) || grayed.set.thin_flag(g));
                    assert!(!pre.set.thin_flag(g) || boxed.set.thin_flag(g));
                    assert!(!boxed.set.thin_flag(g) || grayed.set.thin_flag(g));
                }
            }
        }
    }

    #[test]
    fn shuffle_count_and_order() {
        for n in 0..=4usize {
            for m in 0..=4usize {
                let s = shuffles(n, m);
                assert_eq!(s.len() as u64, binomial(n + m, n));
                let mut sorted = s.clone();
                sorted.sort_by(|a, b| a.moves.cmp(&b.moves));
                assert_eq!(
                    s.iter().map(|x| &x.moves).collect::<Vec<_>>(),
                    sorted.iter().map(|x| &x.moves).collect::<Vec<_>>()
                );
                for sh in &s {
                    for i in 0..=(n + m) {
                        assert_eq!(sh.alpha.apply(i) + sh.beta.apply(i), i as u32);
                    }
                }
            }
        }
    }

    fn binomial(n: usize, k: usize) -> u64 {
        (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
    }

    #[test]
    fn figure_shuffle_depth() {
        let s = shuffles(4, 3).into_iter().find(|s| s.moves == "RURRURU").unwrap();
        assert_eq!(depth(&s), 8);
    }

    #[test]
    fn extremal_shuffles() {
        for n in 1..=4usize {
            for m in 1..=4usize {
                let all = shuffles(n, m);
                let zero: Vec<_> = all.iter().filter(|s| depth(s) == 0).collect();
                assert_eq!(zero.len(), 1);
                let ops = partition_ops(m as u32, n as u32);
                assert_eq!(zero[0].alpha, ops.top2);
                assert_eq!(zero[0].beta, ops.top1);
                let top: Vec<_> = all.iter().filter(|s| depth(s) == n * m).collect();
                assert_eq!(top.len(), 1);
                let ops = partition_ops(n as u32, m as u32);
                assert_eq!(top[0].alpha, ops.top1);
                assert_eq!(top[0].beta, ops.top2);
                assert!(all.iter().all(|s| depth(s) <= n * m));
            }
        }
    }

    #[test]
    fn shuffle_corner_facts() {
        for n in 1..=4usize {
            for m in 1..=4usize {
                let all = shuffles(n, m);
                for s in &all {
                    let (lu, rl) = corners(s);
                    // (d): no left-upper corners iff maximal depth; no
                    // right-lower iff minimal.
                    assert_eq!(lu.is_empty(), depth(s) == n * m);
                    assert_eq!(rl.is_empty(), depth(s) == 0);
                    // (e): no two adjacent corners of the same kind.
                    assert!(lu.windows(2).all(|w| w[0] + 1 < w[1]));
                    assert!(rl.windows(2).all(|w| w[0] + 1 < w[1]));
                    // (f): face in boundary iff neither corner kind.
                    for i in 1..(n + m) {
                        let is_corner = lu.contains(&i) || rl.contains(&i);
                        let delta = Operator::face((n + m) as u32, i as u32).unwrap();
                        let fa = s.alpha.compose(&delta).unwrap();
                        let fb = s.beta.compose(&delta).unwrap();
                        let in_boundary = !fa.is_surjective() || !fb.is_surjective();
                        assert_eq!(is_corner, !in_boundary);
                    }
                }
            }
        }
    }

    #[test]
    fn p_conditions_and_minimality() {
        for (n, m) in [(1usize, 1usize), (2, 1), (1, 2)] {
            let x = zoo::standard(n).unwrap().with_truncation(n + m);
            let y = zoo::standard(m).unwrap().with_truncation(n + m);
            let l = lax(&x, &y).unwrap();
            assert!(verify_p_conditions(&l, &x, &y, n, m).unwrap());
            let g = gray(&x, &y).unwrap();
            assert!(verify_p_conditions(&g, &x, &y, n, m).unwrap());
            // Minimal product stratification fails clause (a).
            let min = product_underlying(&x, &y).unwrap();
            assert!(!verify_p_conditions(&min, &x, &y, n, m).unwrap());
            // The least fixpoint of the clauses equals the lax flags, so
            // lax is minimal among passers.
            let fix = p_condition_fixpoint(&min, &x, &y, n, m);
            for gen in l.set.all_gens() {
                assert_eq!(l.set.thin_flag(gen), fix[gen.dim][gen.idx], "{}", l.set.name(gen));
            }
        }
        // gray(Delta^k[n], Delta[m]) passes for n + m <= 4.
        for (n, m) in [(1usize, 1usize), (2, 1), (1, 2), (2, 2), (3, 1), (1, 3)] {
            for k in 0..=n {
                let x = zoo::build_complicial(n, k, ComplicialVariant::Plain)
                    .unwrap()
                    .with_truncation(n + m);
                let y = zoo::standard(m).unwrap().with_truncation(n + m);
                let g = gray(&x, &y).unwrap();
                assert!(verify_p_conditions(&g, &x, &y, n, m).unwrap());
            }
        }
    }

    fn p_condition_fixpoint(
        p: &Product,
        x: &TruncatedStratifiedSet,
        y: &TruncatedStratifiedSet,
        n: usize,
        m: usize,
    ) -> Vec<Vec<bool>> {
        let mut thin: Vec<Vec<bool>> =
            (0..=p.set.truncation()).map(|d| vec![false; p.set.gen_count(d)]).collect();
        let is_thin =
            |thin: &Vec<Vec<bool>>, r: &SimplexRef| r.is_degenerate() || thin[r.gen.dim][r.gen.idx];
        let mut changed = true;
        while changed {
            changed = false;
            for dim in 2..=p.set.truncation() {
                for g in p.set.gens(dim) {
                    let (a, b) = p.components(g);
                    let phi = operator_of_ref(x, a, n).unwrap();
                    let psi = operator_of_ref(y, b, m).unwrap();
                    for l in 1..dim {
                        if phi.apply(l - 1) != phi.apply(l) || psi.apply(l) != psi.apply(l + 1) {
                            continue;
                        }
                        if !thin[dim][g.idx] {
                            thin[dim][g.idx] = true;
                            changed = true;
                        }
                        if is_thin(&thin, p.set.face(g, l)) {
                            for j in [l - 1, l + 1] {
                                let f = p.set.face(g, j);
                                if !is_thin(&thin, f) {
                                    thin[f.gen.dim][f.gen.idx] = true;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        thin
    }

    #[test]
    fn depth_filtration_examples() {
        let n = 1;
        let m = 1;
        let x = zoo::standard(n).unwrap().with_truncation(n + m);
        let y = zoo::standard(m).unwrap().with_truncation(n + m);
        let g = gray(&x, &y).unwrap();
        let sg = shuffle_gens(&g, &x, &y, n, m).unwrap();
        assert_eq!(sg.len(), 2);
        let s0 = depth_filtration(&g, &x, &y, n, m, 0).unwrap();
        assert!(!s0.warned);
        // P_0 is generated by the single depth-0 shuffle.
        let depth0: Vec<_> = sg.iter().filter(|&&(_, d)| d == 0).collect();
        assert_eq!(depth0.len(), 1);
        assert!(s0.p_d.contains(depth0[0].0));
        // P_{nm} = P; P_{-1} empty.
        let sfull = depth_filtration(&g, &x, &y, n, m, (n * m) as i64).unwrap();
        assert_eq!(sfull.p_d, Subset::full(&g.set));
        let sempty = depth_filtration(&g, &x, &y, n, m, -1).unwrap();
        assert_eq!(sempty.p_d.member_count(), 0);
        // P-bullet omits exactly the simplices with (n, 0) as a vertex.
        let bullet = depth_filtration(&g, &x, &y, n, m, (n * m) as i64 - 1).unwrap();
        for gen in g.set.all_gens() {
            let (a, b) = g.components(gen);
            let phi = operator_of_ref(&x, a, n).unwrap();
            let psi = operator_of_ref(&y, b, m).unwrap();
            let has_corner_vertex =
                (0..=gen.dim).any(|i| phi.apply(i) == n as u32 && psi.apply(i) == 0);
            assert_eq!(bullet.p_d.contains(gen), !has_corner_vertex);
        }
    }

    #[test]
    fn corner_join_is_complicial_horn() {
        // corner of (Lambda^k[n] in Delta^k[n]) and (bdry Delta[m] in
        // Delta[m]) is Lambda^k[n+m+1] in Delta^k[n+m+1], for k < n.
        for (n, m) in [(1usize, 0usize), (1, 1), (2, 0)] {
            for k in 0..n {
                let v = zoo::build_complicial(n, k, ComplicialVariant::Plain).unwrap();
                let u = zoo::horn_subset(&v, n, k).unwrap();
                let y = zoo::standard(m).unwrap();
                let xb = zoo::boundary_subset(&y, m).unwrap();
                let c = corner_domain(
                    &v,
                    &u,
                    BaseMode::Canonical,
                    &y,
                    &xb,
                    BaseMode::Full,
                    TensorKind::Join,
                    n + m + 1,
                )
                .unwrap();
                let target = zoo::build_complicial(n + m + 1, k, ComplicialVariant::Plain).unwrap();
                let iso = isomorphic(c.ambient.set(), &target, &[], 4_000_000).iso.unwrap();
                // The corner domain corresponds to the horn subset.
                let horn = zoo::horn_subset(&target, n + m + 1, k).unwrap();
                let dom_set = extract(c.ambient.set(), &c.domain).unwrap();
                let named = {
                    let mut sub = Subset::empty(&target);
                    for g in dom_set.all_gens() {
                        let src = c.ambient.set().gen_by_name(g.dim, dom_set.name(g)).unwrap();
                        let img = iso.get(src);
                        sub.insert(img.gen);
                        if g.dim >= 1 && dom_set.thin_flag(g) {
                            sub.flag(img.gen);
                        }
                    }
                    sub
                };
                assert_eq!(named, horn, "n={n} m={m} k={k}");
            }
        }
    }

    #[test]
    fn corner_with_empty_factor() {
        // corner with i : (empty -> Y) is e (+) Y, for e with injective
        // component map.
        let v = zoo::build_complicial(1, 1, ComplicialVariant::Plain).unwrap();
        let u = zoo::horn_subset(&v, 1, 1).unwrap();
        let y = zoo::standard(1).unwrap();
        let none = Subset::empty(&y);
        let c = corner_domain(
            &v,
            &u,
            BaseMode::Canonical,
            &y,
            &none,
            BaseMode::Canonical,
            TensorKind::Join,
            3,
        )
        .unwrap();
        let uy = {
            let us = extract(&v, &u).unwrap();
            join_exact(&us, &y).unwrap()
        };
        let dom = extract(c.ambient.set(), &c.domain).unwrap();
        assert!(isomorphic(&dom, &uy.set, &[], 1_000_000).iso.is_some());
    }

    #[test]
    fn entire_e_gives_entire_corner() {
        let v = zoo::standard_thin(2).unwrap();
        let top = v.gens(2).next().unwrap();
        let y = zoo::standard(1).unwrap().with_truncation(2);
        let x = zoo::boundary_subset(&y, 1).unwrap();
        for kind in [TensorKind::Join, TensorKind::Gray, TensorKind::Lax] {
            let trunc = if kind == TensorKind::Join { 4 } else { 2 };
            let vv = if kind == TensorKind::Join { v.clone() } else { v.with_truncation(2) };
            let mut uu = Subset::full(&vv);
            uu.flags[2][top.idx] = false; // Delta[2] inside Delta[2]_t
            let yy = if kind == TensorKind::Join { zoo::standard(1).unwrap() } else { y.clone() };
            let xx = zoo::boundary_subset(&yy, 1).unwrap();
            let _ = &x;
            let c = corner_domain(
                &vv,
                &uu,
                BaseMode::Canonical,
                &yy,
                &xx,
                BaseMode::Full,
                kind,
                trunc,
            )
            .unwrap();
            assert!(c.domain.is_entire(), "{kind:?}");
            assert!(c.domain.validate(c.ambient.set()).is_valid());
        }
    }

    #[test]
    fn join_action_matches_ordinal_decomposition() {
        // Independent oracle: a simplex of a join acts through the
        // unique ordinal decomposition of the operator, componentwise,
        // with no face-table walking.
        let x = zoo::build_complicial(2, 1, ComplicialVariant::Plain).unwrap();
        let y = zoo::standard_thin(1).unwrap();
        let j = join_exact(&x, &y).unwrap();
        for dim in 0..=j.set.truncation() {
            for r in j.set.refs_of_dim(dim) {
                let (pa, pb) = *j.parts_of(r.gen);
                for m in 0..=3i32 {
                    for alpha in crate::delta_ops::all_operators(m, dim as i32) {
                        let got = j.set.act(&r, &alpha).unwrap();
                        let theta = r.deg.compose(&alpha).unwrap();
                        let (beta, gamma) =
                            theta.ordinal_decompose(pa.dim(), pb.dim()).unwrap();
                        // componentwise normal forms
                        let left = match pa {
                            JoinPart::Base(c) => (JoinPart::Base(c), Operator::identity(-1)),
                            JoinPart::Gen(g) => {
                                if beta.dom() == -1 {
                                    (JoinPart::Base(vertex_component(&x, &j.left_comp, g)),
                                     Operator::identity(-1))
                                } else {
                                    let nf = x.act(&x.ref_of(g), &beta).unwrap();
                                    (JoinPart::Gen(nf.gen), nf.deg)
                                }
                            }
                        };
                        let right = match pb {
                            JoinPart::Base(c) => (JoinPart::Base(c), Operator::identity(-1)),
                            JoinPart::Gen(g) => {
                                if gamma.dom() == -1 {
                                    (JoinPart::Base(vertex_component(&y, &j.right_comp, g)),
                                     Operator::identity(-1))
                                } else {
                                    let nf = y.act(&y.ref_of(g), &gamma).unwrap();
                                    (JoinPart::Gen(nf.gen), nf.deg)
                                }
                            }
                        };
                        let want_gen = j
                            .parts
                            .iter()
                            .enumerate()
                            .find_map(|(d, level)| {
                                level
                                    .iter()
                                    .position(|&(a, b)| a == left.0 && b == right.0)
                                    .map(|idx| crate::strata::GenId { dim: d, idx })
                            })
                            .unwrap();
                        assert_eq!(got.gen, want_gen);
                        assert_eq!(got.deg, left.1.ordinal_sum(&right.1));
                    }
                }
            }
        }
    }

    fn vertex_component(
        x: &TruncatedStratifiedSet,
        comps: &[usize],
        g: crate::strata::GenId,
    ) -> usize {
        // the component of a generator is the component of its first
        // vertex
        let v = x
            .act(&x.ref_of(g), &Operator::vertex(g.dim as u32, 0).unwrap())
            .unwrap();
        comps[v.gen.idx]
    }

    #[test]
    fn locate_roundtrip() {
        let v = zoo::build_complicial(2, 1, ComplicialVariant::Plain).unwrap();
        let u = zoo::horn_subset(&v, 2, 1).unwrap();
        let small = extract(&v, &u).unwrap();
        let back = locate_subset(&v, &small).unwrap();
        assert_eq!(back, u);
    }
}

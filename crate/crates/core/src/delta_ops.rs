//! Exact arithmetic of simplicial operators in the augmented simplex
//! category: composition, epi-mono factorization, elementary operators,
//! alternating duals, ordinal sums and partition operators.
//!
//! An operator is a monotone map `[m] -> [n]` between finite ordinals,
//! where `[n] = {0, 1, ..., n}` and `[-1]` is the empty ordinal. Operators
//! are immutable value objects; equality is componentwise.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DeltaError {
    #[error("dimension mismatch: cod of second factor is [{found}], dom of first is [{expected}]")]
    Mismatch { expected: i32, found: i32 },
    #[error("index {index} out of range for {what} on [{n}]")]
    IndexOutOfRange { what: &'static str, index: i32, n: i32 },
    #[error("images must be weakly monotone and lie in 0..={cod}: {images:?}")]
    NotMonotone { cod: i32, images: Vec<u32> },
    #[error("operator is not defined on the empty ordinal [-1]")]
    EmptyOrdinal,
    #[error("admissibility is only defined for injective operators")]
    NotInjective,
    #[error("operator [{dom}]->[{cod}] does not split over [{n}] (+) [{m}]")]
    NoOrdinalSplit { dom: i32, cod: i32, n: i32, m: i32 },
}

/// A monotone map between finite ordinals, the atom of all simplicial
/// actions. `dom = -1` (the empty ordinal) is permitted; the image
/// sequence is then empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Operator {
    cod: i32,
    images: Vec<u32>,
}

/// Operators serialize as `{dom, cod, images}`; `dom` is redundant but
/// part of the canonical format, and is cross-checked on input.
impl Serialize for Operator {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Operator", 3)?;
        st.serialize_field("dom", &self.dom())?;
        st.serialize_field("cod", &self.cod)?;
        st.serialize_field("images", &self.images)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for Operator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            dom: i32,
            cod: i32,
            images: Vec<u32>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let op = Operator::new(raw.cod, raw.images).map_err(D::Error::custom)?;
        if op.dom() != raw.dom {
            return Err(D::Error::custom(format!(
                "stated dom {} disagrees with {} images",
                raw.dom,
                op.images.len()
            )));
        }
        Ok(op)
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}->{}:", self.dom(), self.cod)?;
        for (i, v) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Index set for the simplices of `Delta[1]`: the two constant operators
/// and the step operators `rho^r_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubeIndex {
    Minus,
    Plus,
    Step(u32),
}

/// The five families of elementary operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElementaryKind {
    Face,
    Degeneracy,
    Vertex,
    Terminal,
    Initial,
}

impl Operator {
    /// Builds an operator from its codomain and image sequence, rejecting
    /// non-monotone or out-of-range data.
    pub fn new(cod: i32, images: Vec<u32>) -> Result<Self, DeltaError> {
        if cod < -1 {
            return Err(DeltaError::NotMonotone { cod, images });
        }
        let mut prev: Option<u32> = None;
        for &v in &images {
            if (v as i32) > cod || prev.is_some_and(|p| p > v) {
                return Err(DeltaError::NotMonotone { cod, images });
            }
            prev = Some(v);
        }
        Ok(Operator { cod, images })
    }

    pub fn dom(&self) -> i32 {
        self.images.len() as i32 - 1
    }

    pub fn cod(&self) -> i32 {
        self.cod
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, i: usize) -> u32 {
        self.images[i]
    }

    pub fn identity(n: i32) -> Self {
        let images = (0..=n).map(|i| i as u32).collect();
        Operator { cod: n, images }
    }

    /// Elementary face `delta^n_j : [n-1] -> [n]`, the injection whose
    /// image omits `j`.
    pub fn face(n: u32, j: u32) -> Result<Self, DeltaError> {
        if j > n {
            return Err(DeltaError::IndexOutOfRange { what: "face", index: j as i32, n: n as i32 });
        }
        let images = (0..=n).filter(|&v| v != j).collect();
        Ok(Operator { cod: n as i32, images })
    }

    /// Elementary degeneracy `sigma^n_j : [n+1] -> [n]`, the surjection
    /// with two preimages of `j`.
    pub fn degeneracy(n: u32, j: u32) -> Result<Self, DeltaError> {
        if j > n {
            return Err(DeltaError::IndexOutOfRange {
                what: "degeneracy",
                index: j as i32,
                n: n as i32,
            });
        }
        let mut images = Vec::with_capacity(n as usize + 2);
        for v in 0..=n {
            images.push(v);
            if v == j {
                images.push(v);
            }
        }
        Ok(Operator { cod: n as i32, images })
    }

    /// `i`-th vertex operator `epsilon^n_i : [0] -> [n]`.
    pub fn vertex(n: u32, i: u32) -> Result<Self, DeltaError> {
        if i > n {
            return Err(DeltaError::IndexOutOfRange {
                what: "vertex",
                index: i as i32,
                n: n as i32,
            });
        }
        Ok(Operator { cod: n as i32, images: vec![i] })
    }

    /// Terminal operator `eta^n : [n] -> [0]`.
    pub fn terminal(n: u32) -> Self {
        Operator { cod: 0, images: vec![0; n as usize + 1] }
    }

    /// Initial operator `iota^n : [-1] -> [n]`.
    pub fn initial(n: i32) -> Self {
        Operator { cod: n, images: Vec::new() }
    }

    /// Uniform constructor for the elementary operators.
    pub fn elementary(kind: ElementaryKind, n: u32, i: Option<u32>) -> Result<Self, DeltaError> {
        let need = |i: Option<u32>| {
            i.ok_or(DeltaError::IndexOutOfRange { what: "elementary", index: -1, n: n as i32 })
        };
        match kind {
            ElementaryKind::Face => Self::face(n, need(i)?),
            ElementaryKind::Degeneracy => Self::degeneracy(n, need(i)?),
            ElementaryKind::Vertex => Self::vertex(n, need(i)?),
            ElementaryKind::Terminal => Ok(Self::terminal(n)),
            ElementaryKind::Initial => Ok(Self::initial(n as i32)),
        }
    }

    /// Composite `self . other`; requires `cod(other) = dom(self)`.
    pub fn compose(&self, other: &Operator) -> Result<Self, DeltaError> {
        if other.cod != self.dom() {
            return Err(DeltaError::Mismatch { expected: self.dom(), found: other.cod });
        }
        let images = other.images.iter().map(|&v| self.images[v as usize]).collect();
        Ok(Operator { cod: self.cod, images })
    }

    pub fn is_identity(&self) -> bool {
        self.dom() == self.cod && self.images.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    pub fn is_injective(&self) -> bool {
        self.images.windows(2).all(|w| w[0] < w[1])
    }

    pub fn is_surjective(&self) -> bool {
        if self.cod < 0 {
            return self.images.is_empty();
        }
        let mut expect = 0u32;
        for &v in &self.images {
            if v == expect {
                expect += 1;
            }
        }
        expect as i32 == self.cod + 1
    }

    pub fn image_contains(&self, v: u32) -> bool {
        self.images.binary_search(&v).is_ok()
    }

    /// For a surjection, whether positions `j` and `j+1` collapse.
    pub fn collapses_at(&self, j: usize) -> bool {
        j + 1 < self.images.len() && self.images[j] == self.images[j + 1]
    }

    /// Unique epi-mono factorization: `self = mono . epi`.
    pub fn ez_factor(&self) -> (Operator, Operator) {
        let mut distinct: Vec<u32> = Vec::new();
        let mut epi = Vec::with_capacity(self.images.len());
        for &v in &self.images {
            if distinct.last() != Some(&v) {
                distinct.push(v);
            }
            epi.push(distinct.len() as u32 - 1);
        }
        let mid = distinct.len() as i32 - 1;
        (Operator { cod: mid, images: epi }, Operator { cod: self.cod, images: distinct })
    }

    /// Alternating dual `alpha°(i) = m - alpha(n - i)`; undefined on the
    /// empty ordinal.
    pub fn dual(&self) -> Result<Self, DeltaError> {
        if self.dom() < 0 || self.cod < 0 {
            return Err(DeltaError::EmptyOrdinal);
        }
        let n = self.images.len() - 1;
        let m = self.cod as u32;
        let images = (0..=n).map(|i| m - self.images[n - i]).collect();
        Ok(Operator { cod: self.cod, images })
    }

    /// Ordinal sum `self (+) other : [a+b+1] -> [a'+b'+1]`.
    pub fn ordinal_sum(&self, other: &Operator) -> Self {
        let shift = (self.cod + 1) as u32;
        let mut images = self.images.clone();
        images.extend(other.images.iter().map(|&v| v + shift));
        Operator { cod: self.cod + other.cod + 1, images }
    }

    /// Splits an operator into `[n] (+) [m]`-parts: the unique pair
    /// `(beta, gamma)` with `self = beta (+) gamma`, `cod(beta) = n` and
    /// `cod(gamma) = m`. Requires `cod(self) = n + m + 1`.
    pub fn ordinal_decompose(&self, n: i32, m: i32) -> Result<(Operator, Operator), DeltaError> {
        if n < -1 || m < -1 || self.cod != n + m + 1 {
            return Err(DeltaError::NoOrdinalSplit { dom: self.dom(), cod: self.cod, n, m });
        }
        let split = self.images.iter().position(|&v| v as i32 > n).unwrap_or(self.images.len());
        let beta = Operator { cod: n, images: self.images[..split].to_vec() };
        let gamma = Operator {
            cod: m,
            images: self.images[split..].iter().map(|&v| v - (n + 1) as u32).collect(),
        };
        Ok((beta, gamma))
    }

    /// Operators of `Delta[1]`: the constants `0^r`, `1^r` and the step
    /// operators `rho^r_i` mapping `j` to 0 for `j < i` and 1 otherwise.
    pub fn rho(r: u32, i: CubeIndex) -> Result<Self, DeltaError> {
        let images = match i {
            CubeIndex::Minus => vec![0; r as usize + 1],
            CubeIndex::Plus => vec![1; r as usize + 1],
            CubeIndex::Step(i) => {
                if i < 1 || i > r {
                    return Err(DeltaError::IndexOutOfRange {
                        what: "rho",
                        index: i as i32,
                        n: r as i32,
                    });
                }
                (0..=r).map(|j| u32::from(j >= i)).collect()
            }
        };
        Ok(Operator { cod: 1, images })
    }

    /// `k`-admissibility of an injective operator into `[n]`: the image
    /// contains `{k-1, k, k+1} /\ [n]`. Also computes the witness `l` with
    /// `alpha(i) = k + i - l` near `l`, and checks the two criteria agree.
    pub fn is_admissible(&self, k: u32) -> Result<Admissibility, DeltaError> {
        if !self.is_injective() {
            return Err(DeltaError::NotInjective);
        }
        let n = self.cod;
        if (k as i32) > n {
            return Err(DeltaError::IndexOutOfRange { what: "admissible", index: k as i32, n });
        }
        let by_image = (k == 0 || self.image_contains(k - 1))
            && self.image_contains(k)
            && (k as i32 == n || self.image_contains(k + 1));
        // Witness criterion: some l with alpha(i) = k + i - l for each
        // i in [r] /\ {l-1, l, l+1}; the window must reach k-1 and k+1
        // whenever those lie in [n].
        let witness = (0..self.images.len()).find(|&l| {
            if (k >= 1 && l == 0) || ((k as i32) < n && l + 1 >= self.images.len()) {
                return false;
            }
            (-1i64..=1).all(|d| {
                let i = l as i64 + d;
                if i < 0 || i >= self.images.len() as i64 {
                    return true;
                }
                self.images[i as usize] as i64 == k as i64 + d
            })
        });
        let by_witness = witness.is_some();
        debug_assert_eq!(by_image, by_witness, "admissibility criteria disagree on {self:?}");
        Ok(Admissibility { admissible: by_image, witness })
    }
}

/// Verdict of the admissibility test, with the witnessing index when the
/// operator is admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Admissibility {
    pub admissible: bool,
    pub witness: Option<usize>,
}

/// The four partition operators of a partition `p + q = n`: the faces
/// `bot1 : [p] -> [n]`, `bot2 : [q] -> [n]` and the degeneracies
/// `top1 : [n] -> [p]`, `top2 : [n] -> [q]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionOps {
    pub bot1: Operator,
    pub bot2: Operator,
    pub top1: Operator,
    pub top2: Operator,
}

pub fn partition_ops(p: u32, q: u32) -> PartitionOps {
    let n = (p + q) as i32;
    let bot1 = Operator { cod: n, images: (0..=p).collect() };
    let bot2 = Operator { cod: n, images: (0..=q).map(|j| j + p).collect() };
    let top1 = Operator { cod: p as i32, images: (0..=(p + q)).map(|i| i.min(p)).collect() };
    let top2 = Operator { cod: q as i32, images: (0..=(p + q)).map(|i| i.saturating_sub(p)).collect() };
    PartitionOps { bot1, bot2, top1, top2 }
}

/// All operators `[m] -> [n]`, in lexicographic image order.
pub fn all_operators(m: i32, n: i32) -> Vec<Operator> {
    let mut out = Vec::new();
    if m == -1 {
        return vec![Operator::initial(n)];
    }
    if n < 0 {
        return out;
    }
    let len = (m + 1) as usize;
    let mut images = vec![0u32; len];
    loop {
        out.push(Operator { cod: n, images: images.clone() });
        let mut i = len;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (images[i] as i32) < n {
                images[i] += 1;
                let v = images[i];
                for w in images[i + 1..].iter_mut() {
                    *w = v;
                }
                break;
            }
        }
    }
}

/// All surjections `[r] -> [p]`, in lexicographic image order.
pub fn all_epis(r: i32, p: i32) -> Vec<Operator> {
    all_operators(r, p).into_iter().filter(Operator::is_surjective).collect()
}

/// All injections `[r] -> [n]`, in lexicographic image order.
pub fn all_monos(r: i32, n: i32) -> Vec<Operator> {
    all_operators(r, n).into_iter().filter(Operator::is_injective).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn op(cod: i32, images: &[u32]) -> Operator {
        Operator::new(cod, images.to_vec()).unwrap()
    }

    #[test]
    fn compose_simplicial_identity() {
        // sigma^1_0 . delta^2_0 = id on [1]
        let s = Operator::degeneracy(1, 0).unwrap();
        let d = Operator::face(2, 0).unwrap();
        assert!(s.compose(&d).unwrap().is_identity());
        // mismatched ordinals error out
        let d21 = Operator::face(2, 1).unwrap();
        let s20 = Operator::degeneracy(2, 0).unwrap();
        assert!(d21.compose(&s20).is_err());
    }

    #[test]
    fn compose_face_then_degeneracy() {
        let d = Operator::face(2, 1).unwrap();
        let s = Operator::degeneracy(1, 0).unwrap();
        let c = d.compose(&s).unwrap();
        assert_eq!(c, op(2, &[0, 0, 2]));
    }

    #[test]
    fn elementary_shapes() {
        assert_eq!(Operator::face(2, 1).unwrap(), op(2, &[0, 2]));
        assert_eq!(Operator::degeneracy(1, 0).unwrap(), op(1, &[0, 0, 1]));
        let init = Operator::initial(3);
        assert_eq!(init.dom(), -1);
        assert_eq!(init.cod(), 3);
        assert!(Operator::face(2, 3).is_err());
    }

    #[test]
    fn ez_factor_examples() {
        let (epi, mono) = op(2, &[0, 0, 2]).ez_factor();
        assert_eq!(epi, Operator::degeneracy(1, 0).unwrap());
        assert_eq!(mono, Operator::face(2, 1).unwrap());

        let id3 = Operator::identity(3);
        assert_eq!(id3.ez_factor(), (Operator::identity(3), Operator::identity(3)));

        let eta2 = Operator::terminal(2);
        let (epi, mono) = eta2.ez_factor();
        assert_eq!(epi, eta2);
        assert!(mono.is_identity());
    }

    #[test]
    fn ez_factor_unique_exhaustive_small() {
        // Uniqueness against exhaustive pair enumeration in small dims; the
        // acceptance suite repeats this up to dim 5.
        for m in -1..=3i32 {
            for n in 0..=3i32 {
                for alpha in all_operators(m, n) {
                    let mut found = Vec::new();
                    for p in -1..=m.max(n) {
                        for epi in all_epis(m, p) {
                            for mono in all_monos(p, n) {
                                if mono.compose(&epi).unwrap() == alpha {
                                    found.push((epi.clone(), mono));
                                }
                            }
                        }
                    }
                    assert_eq!(found.len(), 1, "non-unique factorization for {alpha:?}");
                    assert_eq!(found[0], alpha.ez_factor());
                }
            }
        }
    }

    #[test]
    fn dual_of_elementary_face() {
        for n in 1..=5u32 {
            for j in 0..=n {
                let d = Operator::face(n, j).unwrap();
                assert_eq!(d.dual().unwrap(), Operator::face(n, n - j).unwrap());
            }
        }
        assert!(Operator::initial(2).dual().is_err());
    }

    #[test]
    fn ordinal_sum_examples() {
        let s = Operator::identity(1).ordinal_sum(&Operator::identity(0));
        assert!(s.is_identity());
        assert_eq!(s.cod(), 2);

        let beta = op(2, &[0, 1]);
        assert_eq!(Operator::identity(-1).ordinal_sum(&beta), beta);

        let d = Operator::face(1, 0).unwrap();
        let sg = Operator::degeneracy(1, 0).unwrap();
        assert_eq!(d.ordinal_sum(&sg), op(3, &[1, 2, 2, 3]));
    }

    #[test]
    fn ordinal_decompose_roundtrip() {
        for n in -1..=2i32 {
            for m in -1..=2i32 {
                for r in -1..=3i32 {
                    for alpha in all_operators(r, n + m + 1) {
                        let (b, g) = alpha.ordinal_decompose(n, m).unwrap();
                        assert_eq!(b.ordinal_sum(&g), alpha);
                    }
                }
            }
        }
    }

    #[test]
    fn partition_examples() {
        let p = partition_ops(1, 1);
        assert_eq!(p.top1, op(1, &[0, 1, 1]));
        assert_eq!(p.top2, op(1, &[0, 0, 1]));
        assert!(p.top1.compose(&p.bot1).unwrap().is_identity());
        assert!(p.top2.compose(&p.bot2).unwrap().is_identity());

        let p0 = partition_ops(0, 3);
        assert!(p0.bot2.is_identity());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(Operator::rho(2, CubeIndex::Step(1)).unwrap(), op(1, &[0, 1, 1]));
        assert_eq!(Operator::rho(3, CubeIndex::Minus).unwrap(), op(1, &[0, 0, 0, 0]));
        assert_eq!(Operator::rho(2, CubeIndex::Plus).unwrap(), op(1, &[1, 1, 1]));
        assert!(Operator::rho(2, CubeIndex::Step(3)).is_err());
    }

    #[test]
    fn admissibility_examples() {
        for n in 0..=5u32 {
            let id = Operator::identity(n as i32);
            for k in 0..=n {
                assert!(id.is_admissible(k).unwrap().admissible);
            }
        }
        let d21 = Operator::face(2, 1).unwrap();
        assert!(!d21.is_admissible(1).unwrap().admissible);
        let d33 = Operator::face(3, 3).unwrap();
        assert!(d33.is_admissible(1).unwrap().admissible);
        assert!(op(2, &[0, 0, 1]).is_admissible(1).is_err());
    }

    #[test]
    fn operator_serialization_format() {
        let op = Operator::face(2, 1).unwrap();
        let json = serde_json::to_string(&op).unwrap();
        assert_eq!(json, r#"{"dom":1,"cod":2,"images":[0,2]}"#);
        let back: Operator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
        assert!(serde_json::from_str::<Operator>(r#"{"dom":2,"cod":2,"images":[0,2]}"#).is_err());
        assert!(serde_json::from_str::<Operator>(r#"{"dom":1,"cod":2,"images":[2,0]}"#).is_err());
    }

    #[test]
    fn admissibility_criteria_agree_exhaustively() {
        for n in 0..=5i32 {
            for r in 0..=n {
                for alpha in all_monos(r, n) {
                    for k in 0..=n as u32 {
                        let a = alpha.is_admissible(k).unwrap();
                        assert_eq!(a.admissible, a.witness.is_some());
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn dual_is_involution(m in 0i32..5, n in 0i32..5, seed in 0usize..10_000) {
            let ops = all_operators(m, n);
            let alpha = &ops[seed % ops.len()];
            prop_assert_eq!(&alpha.dual().unwrap().dual().unwrap(), alpha);
        }

        #[test]
        fn ez_recomposes(m in -1i32..5, n in 0i32..5, seed in 0usize..10_000) {
            let ops = all_operators(m, n);
            let alpha = &ops[seed % ops.len()];
            let (epi, mono) = alpha.ez_factor();
            prop_assert!(epi.is_surjective());
            prop_assert!(mono.is_injective());
            prop_assert_eq!(&mono.compose(&epi).unwrap(), alpha);
        }
    }
}

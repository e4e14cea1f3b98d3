//! The canonical JSON schema for sets, maps, subsets, categories,
//! certificates and reports. Field names and orderings are part of the
//! external contract; identical objects serialize to identical bytes.

use crate::certifier::Certificate;
use crate::strata::{
    GenId, SetBuilder, SimplexRef, StrataError, StratifiedMap, Subset, TruncatedStratifiedSet,
};
use crate::zoo::{FiniteCategory, Morphism};
use crate::Operator;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

pub const SET_SCHEMA: &str = "strat-set/1";
pub const MAP_SCHEMA: &str = "strat-map/1";
pub const SUBSET_SCHEMA: &str = "strat-subset/1";
pub const CAT_SCHEMA: &str = "strat-cat/1";
pub const CERT_SCHEMA: &str = "strat-cert/1";
pub const REPORT_SCHEMA: &str = "strat-report/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema mismatch: expected {expected}, found {found}")]
    Schema { expected: &'static str, found: String },
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefFile {
    pub gen: String,
    pub deg: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenFile {
    pub name: String,
    pub faces: Vec<RefFile>,
    pub thin: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DimFile {
    pub dim: usize,
    pub generators: Vec<GenFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetFile {
    pub schema: String,
    pub truncation: usize,
    pub dims: Vec<DimFile>,
}

fn ref_to_file(x: &TruncatedStratifiedSet, r: &SimplexRef) -> RefFile {
    RefFile { gen: x.name(r.gen).to_string(), deg: r.deg.images().to_vec() }
}

pub fn set_to_file(x: &TruncatedStratifiedSet) -> SetFile {
    SetFile {
        schema: SET_SCHEMA.into(),
        truncation: x.truncation(),
        dims: (0..=x.truncation())
            .map(|dim| DimFile {
                dim,
                generators: x
                    .gens(dim)
                    .map(|g| GenFile {
                        name: x.name(g).to_string(),
                        faces: x.faces(g).iter().map(|f| ref_to_file(x, f)).collect(),
                        thin: x.thin_flag(g),
                    })
                    .collect(),
            })
            .collect(),
    }
}

pub fn set_from_file(f: &SetFile) -> Result<TruncatedStratifiedSet, IoError> {
    if f.schema != SET_SCHEMA {
        return Err(IoError::Schema { expected: SET_SCHEMA, found: f.schema.clone() });
    }
    let mut b = SetBuilder::new(f.truncation);
    for level in &f.dims {
        for g in &level.generators {
            let faces = g
                .faces
                .iter()
                .map(|r| {
                    let dim_gen = r.deg.iter().copied().max().map_or(0, |m| m as usize);
                    // the codomain dimension is the count of distinct values
                    let distinct = r.deg.iter().collect::<std::collections::BTreeSet<_>>().len();
                    let cod = if r.deg.is_empty() { 0 } else { distinct - 1 };
                    let _ = dim_gen;
                    let gen = b
                        .lookup(cod, &r.gen)
                        .ok_or_else(|| IoError::Invalid(format!("unknown face `{}`", r.gen)))?;
                    let deg = Operator::new(cod as i32, r.deg.clone())
                        .map_err(|e| IoError::Invalid(e.to_string()))?;
                    if !deg.is_surjective() {
                        return Err(IoError::Invalid(format!(
                            "face degeneracy onto `{}` is not surjective",
                            r.gen
                        )));
                    }
                    Ok(SimplexRef { gen, deg })
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            b.add_generator(level.dim, g.name.clone(), faces, g.thin)
                .map_err(IoError::Strata)?;
        }
    }
    b.build().map_err(IoError::Strata)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapFile {
    pub schema: String,
    pub images: Vec<Vec<RefFile>>,
}

pub fn map_to_file(
    f: &StratifiedMap,
    src: &TruncatedStratifiedSet,
    tgt: &TruncatedStratifiedSet,
) -> MapFile {
    MapFile {
        schema: MAP_SCHEMA.into(),
        images: (0..=src.truncation())
            .map(|d| src.gens(d).map(|g| ref_to_file(tgt, f.get(g))).collect())
            .collect(),
    }
}

pub fn map_from_file(
    f: &MapFile,
    src: &TruncatedStratifiedSet,
    tgt: &TruncatedStratifiedSet,
) -> Result<StratifiedMap, IoError> {
    if f.schema != MAP_SCHEMA {
        return Err(IoError::Schema { expected: MAP_SCHEMA, found: f.schema.clone() });
    }
    let mut assignment = Vec::new();
    for (d, level) in f.images.iter().enumerate() {
        if level.len() != src.gen_count(d) {
            return Err(IoError::Invalid(format!("wrong image count in dimension {d}")));
        }
        let mut out = Vec::new();
        for r in level {
            let deg = if r.deg.is_empty() && d == 0 {
                Operator::identity(0)
            } else {
                let distinct = r.deg.iter().collect::<std::collections::BTreeSet<_>>().len();
                Operator::new(distinct as i32 - 1, r.deg.clone())
                    .map_err(|e| IoError::Invalid(e.to_string()))?
            };
            let gen = tgt
                .gen_by_name(deg.cod() as usize, &r.gen)
                .ok_or_else(|| IoError::Invalid(format!("unknown image `{}`", r.gen)))?;
            out.push(SimplexRef { gen, deg });
        }
        assignment.push(out);
    }
    Ok(StratifiedMap { assignment })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetFile {
    pub schema: String,
    pub members: Vec<Vec<String>>,
    pub flags: Vec<Vec<String>>,
}

pub fn subset_to_file(u: &Subset, x: &TruncatedStratifiedSet) -> SubsetFile {
    let names = |level: &Vec<bool>, dim: usize| -> Vec<String> {
        level
            .iter()
            .enumerate()
            .filter(|&(_, &b)| b)
            .map(|(idx, _)| x.name(GenId { dim, idx }).to_string())
            .collect()
    };
    SubsetFile {
        schema: SUBSET_SCHEMA.into(),
        members: u.members.iter().enumerate().map(|(d, l)| names(l, d)).collect(),
        flags: u.flags.iter().enumerate().map(|(d, l)| names(l, d)).collect(),
    }
}

pub fn subset_from_file(f: &SubsetFile, x: &TruncatedStratifiedSet) -> Result<Subset, IoError> {
    if f.schema != SUBSET_SCHEMA {
        return Err(IoError::Schema { expected: SUBSET_SCHEMA, found: f.schema.clone() });
    }
    let mut out = Subset::empty(x);
    for (d, level) in f.members.iter().enumerate() {
        for name in level {
            let g = x
                .gen_by_name(d, name)
                .ok_or_else(|| IoError::Invalid(format!("unknown member `{name}`")))?;
            out.insert(g);
        }
    }
    for (d, level) in f.flags.iter().enumerate() {
        for name in level {
            let g = x
                .gen_by_name(d, name)
                .ok_or_else(|| IoError::Invalid(format!("unknown flag `{name}`")))?;
            out.flag(g);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatMorphismFile {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// A finite category presented by objects, non-identity morphisms and a
/// composition table `[f, g, h]` meaning `h = g . f`. Identities and
/// their composites are implicit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CatFile {
    pub schema: String,
    pub objects: Vec<String>,
    pub morphisms: Vec<CatMorphismFile>,
    pub compose: Vec<[String; 3]>,
}

pub fn category_from_file(f: &CatFile) -> Result<FiniteCategory, IoError> {
    if f.schema != CAT_SCHEMA {
        return Err(IoError::Schema { expected: CAT_SCHEMA, found: f.schema.clone() });
    }
    let obj_index: BTreeMap<&str, usize> =
        f.objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
    let mut morphisms = Vec::new();
    let mut identity = Vec::new();
    for (o, name) in f.objects.iter().enumerate() {
        identity.push(morphisms.len());
        morphisms.push(Morphism { name: format!("id:{name}"), src: o, tgt: o });
    }
    let mut mor_index: BTreeMap<String, usize> = BTreeMap::new();
    for (o, name) in f.objects.iter().enumerate() {
        mor_index.insert(format!("id:{name}"), identity[o]);
    }
    for m in &f.morphisms {
        let src = *obj_index
            .get(m.src.as_str())
            .ok_or_else(|| IoError::Invalid(format!("unknown object `{}`", m.src)))?;
        let tgt = *obj_index
            .get(m.tgt.as_str())
            .ok_or_else(|| IoError::Invalid(format!("unknown object `{}`", m.tgt)))?;
        mor_index.insert(m.name.clone(), morphisms.len());
        morphisms.push(Morphism { name: m.name.clone(), src, tgt });
    }
    let mut compose = BTreeMap::new();
    // identity composites
    for (i, m) in morphisms.iter().enumerate() {
        compose.insert((identity[m.tgt], i), i);
        compose.insert((i, identity[m.src]), i);
    }
    for [f1, g, h] in &f.compose {
        let fi = *mor_index
            .get(f1)
            .ok_or_else(|| IoError::Invalid(format!("unknown morphism `{f1}`")))?;
        let gi = *mor_index
            .get(g)
            .ok_or_else(|| IoError::Invalid(format!("unknown morphism `{g}`")))?;
        let hi = *mor_index
            .get(h)
            .ok_or_else(|| IoError::Invalid(format!("unknown morphism `{h}`")))?;
        compose.insert((gi, fi), hi);
    }
    let cat = FiniteCategory { objects: f.objects.clone(), morphisms, identity, compose };
    cat.validate().map_err(IoError::Strata)?;
    Ok(cat)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateFile {
    pub schema: String,
    #[serde(flatten)]
    pub certificate: Certificate,
}

pub fn certificate_to_file(c: &Certificate) -> CertificateFile {
    CertificateFile { schema: CERT_SCHEMA.into(), certificate: c.clone() }
}

pub fn certificate_from_file(f: &CertificateFile) -> Result<Certificate, IoError> {
    if f.schema != CERT_SCHEMA {
        return Err(IoError::Schema { expected: CERT_SCHEMA, found: f.schema.clone() });
    }
    Ok(f.certificate.clone())
}

/// Canonical bytes: pretty JSON with a trailing newline. Identical
/// inputs produce identical bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, IoError> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T, IoError> {
    Ok(serde_json::from_str(s)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::{certify, replay, CertifyOptions};
    use crate::lifting::Flavor;
    use crate::zoo::{self, ComplicialVariant, NerveStrat};
    use proptest::prelude::*;

    #[test]
    fn set_roundtrip_identity() {
        for x in [
            zoo::build_complicial(3, 1, ComplicialVariant::DoublePrime).unwrap(),
            zoo::nerve(&zoo::z2_category(), 3, NerveStrat::ZeroTrivial).unwrap(),
            zoo::build_e(zoo::EFamily::E2Prime, 3, false).unwrap(),
        ] {
            let file = set_to_file(&x);
            let json = to_canonical_json(&file).unwrap();
            let back: SetFile = from_json(&json).unwrap();
            let y = set_from_file(&back).unwrap();
            assert!(x.same_shape(&y));
            for g in x.all_gens() {
                assert_eq!(x.thin_flag(g), y.thin_flag(g));
                assert_eq!(x.faces(g), y.faces(g));
            }
            // byte-identical re-serialization
            assert_eq!(json, to_canonical_json(&set_to_file(&y)).unwrap());
        }
    }

    #[test]
    fn subset_and_map_roundtrip() {
        let x = zoo::build_complicial(2, 1, ComplicialVariant::Plain).unwrap();
        let horn = zoo::horn_subset(&x, 2, 1).unwrap();
        let sf = subset_to_file(&horn, &x);
        let back = subset_from_file(&from_json(&to_canonical_json(&sf).unwrap()).unwrap(), &x)
            .unwrap();
        assert_eq!(horn, back);

        let id = StratifiedMap::identity(&x);
        let mf = map_to_file(&id, &x, &x);
        let back = map_from_file(&from_json(&to_canonical_json(&mf).unwrap()).unwrap(), &x, &x)
            .unwrap();
        assert_eq!(id, back);
    }

    #[test]
    fn certificate_roundtrip_and_replay() {
        let x = zoo::build_complicial(2, 1, ComplicialVariant::DoublePrime).unwrap();
        let start = zoo::horn_prime_subset(&x, 2, 1).unwrap();
        let target = Subset::full(&x);
        let out =
            certify(&x, &target, &start, Flavor::Inner, 2, CertifyOptions::default()).unwrap();
        let cert = out.certificate.unwrap();
        let json = to_canonical_json(&certificate_to_file(&cert)).unwrap();
        let back = certificate_from_file(&from_json(&json).unwrap()).unwrap();
        assert_eq!(cert, back);
        let rep = replay(&x, &target, &start, &back).unwrap();
        assert_eq!(rep.status, crate::lifting::Status::Pass);
    }

    #[test]
    fn category_file_loads() {
        let file = CatFile {
            schema: CAT_SCHEMA.into(),
            objects: vec!["a".into(), "b".into()],
            morphisms: vec![CatMorphismFile { name: "f".into(), src: "a".into(), tgt: "b".into() }],
            compose: vec![],
        };
        let cat = category_from_file(&file).unwrap();
        assert_eq!(cat.morphisms.len(), 3);
        let n = zoo::nerve(&cat, 2, NerveStrat::Minimal).unwrap();
        assert_eq!(n.gen_counts(), vec![2, 1, 0]);
    }

    proptest! {
        #[test]
        fn arbitrary_complicial_roundtrips(n in 1usize..4, seed in 0usize..100) {
            let k = seed % (n + 1);
            let x = zoo::build_complicial(n, k, ComplicialVariant::Prime).unwrap();
            let json = to_canonical_json(&set_to_file(&x)).unwrap();
            let y = set_from_file(&from_json(&json).unwrap()).unwrap();
            prop_assert!(x.same_shape(&y));
            prop_assert_eq!(json, to_canonical_json(&set_to_file(&y)).unwrap());
        }
    }
}

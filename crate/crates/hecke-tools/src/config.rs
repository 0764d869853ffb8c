//! The JSON run configuration and its translation into core objects.

use std::collections::{BTreeMap, VecDeque};

use hecke_core::cover_model::{CoverFamily, CoverSpec, PointData, TFamily, UnipotentData};
use hecke_core::finite_groups::{FinGroup, Rep, Subgroup};
use hecke_core::geometry::{self, AffineForm, Arrangement, HyperplaneFamily, InnerProduct};
use hecke_core::hecke_abstract::{Cocycle, HeckeAlgebra, HeckeParams, OmegaAction, ProductAlgElem};
use hecke_core::linalg::Matrix;
use hecke_core::rational::{self, Rational};
use hecke_core::reflections::{self, chamber_walls, AffineIso, OmegaElem, OmegaGroup, OmegaOrder, ReflectionGroupData};
use hecke_core::rootdata::{self, LeviSubset, RootSystem};
use hecke_core::scalars::{Field, RealAboveOne, Scalar};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA: u32 = 1;

/// A rational given as a JSON integer or as a string `"a/b"`.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    pub fn to_rational(&self) -> Result<Rational, CliError> {
        match self {
            Num::Int(n) => Ok(rational::int(*n)),
            Num::Text(s) => rational::parse(s).ok_or_else(|| CliError::config(format!("not a rational: {s:?}"))),
        }
    }

    pub fn to_scalar(&self, field: &Field) -> Result<Scalar, CliError> {
        match self {
            Num::Int(n) => Ok(field.int(*n)),
            Num::Text(s) => field.parse(s).map_err(|e| CliError::config(format!("scalar {s:?}: {e}"))),
        }
    }
}

pub fn rationals(v: &[Num]) -> Result<Vec<Rational>, CliError> {
    v.iter().map(Num::to_rational).collect()
}

fn rational_matrix(rows: &[Vec<Num>]) -> Result<Matrix<Rational>, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::config("ragged matrix"));
    }
    let rows = rows.iter().map(|r| rationals(r)).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows, cols, &rational::int(0)))
}

pub fn scalar_matrix(rows: &[Vec<Num>], field: &Field) -> Result<Matrix<Scalar>, CliError> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::config("ragged matrix"));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|c| c.to_scalar(field)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(rows, cols, &field.zero()))
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arrangement: Option<ArrangementCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner_product: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<OmegaCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hecke: Option<HeckeCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roots: Option<RootsCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fingrp: Option<FingrpCfg>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverCfg>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FieldCfg {
    #[serde(default = "one")]
    pub order: u32,
    #[serde(default)]
    pub prime: Option<u32>,
}

fn one() -> u32 {
    1
}

impl FieldCfg {
    pub fn build(&self) -> Result<Field, CliError> {
        Field::new(self.order, self.prime).map_err(|e| CliError::config(format!("field: {e}")))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ArrangementCfg {
    Explicit {
        dim: usize,
        basepoint: Vec<Num>,
        families: Vec<FamilyCfg>,
    },
    /// `kind = "finite"`: the linear root hyperplanes; `kind = "affine"`:
    /// all affine root hyperplanes α + k.
    Roots {
        root_system: String,
        kind: String,
        basepoint: Vec<Num>,
    },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyCfg {
    pub gradient: Vec<Num>,
    pub base: Num,
    #[serde(default = "zero_num")]
    pub period: Num,
    #[serde(default = "yes")]
    pub relevant: bool,
}

fn zero_num() -> Num {
    Num::Int(0)
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IsoCfg {
    #[serde(rename = "A")]
    pub a: Vec<Vec<Num>>,
    pub b: Vec<Num>,
}

impl IsoCfg {
    pub fn build(&self) -> Result<AffineIso, CliError> {
        AffineIso::new(rational_matrix(&self.a)?, rationals(&self.b)?).map_err(|e| CliError::config(format!("isometry: {e}")))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OrderCfg {
    Finite(usize),
    Named(String),
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaCfg {
    pub generators: Vec<IsoCfg>,
    pub order: OrderCfg,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum CocycleCfg {
    Named(String),
    Table { table: Vec<Vec<Num>> },
    Bicharacter { bicharacter: Num },
}

/// An Ω element: a table index, or `"1"`, `"w"`, `"w^k"` for powers of the
/// first generator.
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum OmegaRef {
    Index(i64),
    Power(String),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ElemTerm {
    #[serde(default = "omega_one")]
    pub omega: OmegaRef,
    #[serde(default)]
    pub word: Vec<usize>,
    pub coeff: Num,
}

fn omega_one() -> OmegaRef {
    OmegaRef::Index(0)
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HeckeCfg {
    /// One value per simple reflection, or a single value for all.
    pub q: Vec<Num>,
    #[serde(default)]
    pub cocycle: Option<CocycleCfg>,
    #[serde(default)]
    pub classes: Vec<Vec<usize>>,
    #[serde(default)]
    pub a: Option<Vec<ElemTerm>>,
    #[serde(default)]
    pub b: Option<Vec<ElemTerm>>,
    #[serde(default)]
    pub maxlen: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RootsCfg {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub levi: Vec<usize>,
    pub x0: Vec<Num>,
    /// Columns give coordinates on the fixed space; defaults to the canonical basis.
    #[serde(default)]
    pub basis: Option<Vec<Vec<Num>>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum GroupCfg {
    Name(String),
    Kind { kind: String, #[serde(default)] param: Option<i64> },
    Table { table: Vec<Vec<usize>> },
}

/// An element by index or by its key (matrix entries, permutation images, ...).
#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum ElemRef {
    Index(usize),
    Key(Vec<i64>),
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum SubCfg {
    Name(String),
    Generators { generators: Vec<ElemRef> },
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RepGen {
    pub element: ElemRef,
    pub matrix: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum RepCfg {
    Name(String),
    Generators { dim: usize, generators: Vec<RepGen> },
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FingrpCfg {
    pub group: GroupCfg,
    pub sub: SubCfg,
    #[serde(default = "trivial_rep")]
    pub rep: RepCfg,
    #[serde(default)]
    pub h: Option<ElemRef>,
}

fn trivial_rep() -> RepCfg {
    RepCfg::Name("trivial".into())
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ThetaValue {
    pub element: ElemRef,
    pub value: Num,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PointCfg {
    pub name: String,
    pub k: SubCfg,
    pub k_plus: SubCfg,
    /// Values of θ on K_{x,+}; missing elements default to 1.
    #[serde(default)]
    pub theta: Vec<ThetaValue>,
    #[serde(default = "trivial_rep")]
    pub rho: RepCfg,
    /// Coordinates in the arrangement, used when no distance table is given.
    #[serde(default)]
    pub coords: Option<Vec<Num>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct UnipotentCfg {
    #[serde(default)]
    pub levi: Option<SubCfg>,
    pub pairs: Vec<(SubCfg, SubCfg)>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NGenCfg {
    pub element: ElemRef,
    /// `action[i]` is the name of `n·(point i)`.
    pub action: Vec<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CoverCfg {
    pub group: GroupCfg,
    pub points: Vec<PointCfg>,
    #[serde(default)]
    pub distance: Option<Vec<Vec<usize>>>,
    pub base: String,
    pub levi: SubCfg,
    #[serde(default = "trivial_rep")]
    pub rho_m: RepCfg,
    #[serde(default)]
    pub unipotent: Option<UnipotentCfg>,
    pub nheart: Vec<NGenCfg>,
    /// Scalars multiplying `T` on the class of the given element.
    #[serde(default)]
    pub t_scale: Vec<ThetaValue>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::config(format!("config: {e}")))?;
        if cfg.schema != SCHEMA {
            return Err(CliError::config(format!("unsupported schema {}, expected {SCHEMA}", cfg.schema)));
        }
        Ok(cfg)
    }

    pub fn field(&self) -> Result<Field, CliError> {
        match &self.field {
            Some(f) => f.build(),
            None => Ok(Field::rationals()),
        }
    }

    /// The arrangement with the inner product used for reflections.
    pub fn arrangement(&self) -> Result<(Arrangement, InnerProduct), CliError> {
        let cfg = self.arrangement.as_ref().ok_or_else(|| CliError::config("missing \"arrangement\" section"))?;
        let (arr, ip) = match cfg {
            ArrangementCfg::Explicit { dim, basepoint, families } => {
                let fams = families
                    .iter()
                    .map(|f| {
                        let fam = HyperplaneFamily::new(rationals(&f.gradient)?, f.base.to_rational()?, f.period.to_rational()?)
                            .map_err(|e| CliError::config(format!("family: {e}")))?;
                        Ok((fam, f.relevant))
                    })
                    .collect::<Result<Vec<_>, CliError>>()?;
                let arr = Arrangement::new(*dim, rationals(basepoint)?, fams).map_err(|e| CliError::config(format!("arrangement: {e}")))?;
                (arr, InnerProduct::standard(*dim))
            }
            ArrangementCfg::Roots { root_system, kind, basepoint } => {
                let rs = RootSystem::parse(root_system).map_err(|e| CliError::config(format!("root system: {e}")))?;
                let base = rationals(basepoint)?;
                match kind.as_str() {
                    "finite" => {
                        let arr = rs.finite_arrangement(base).map_err(|e| CliError::config(format!("arrangement: {e}")))?;
                        (arr, rs.inner_product())
                    }
                    "affine" => {
                        let levi = LeviSubset::new(&rs, []).map_err(|e| CliError::config(e.to_string()))?;
                        let arr = rootdata::depthzero_arrangement(&rs, &levi, &base).map_err(|e| CliError::config(format!("arrangement: {e}")))?;
                        let ip = rootdata::restricted_inner_product(&rs, &levi.fixed_space(&rs));
                        (arr, ip)
                    }
                    other => return Err(CliError::config(format!("unknown root arrangement kind {other:?}"))),
                }
            }
        };
        let ip = match &self.inner_product {
            Some(g) => InnerProduct::new(rational_matrix(g)?).map_err(|e| CliError::config(format!("inner product: {e}")))?,
            None => ip,
        };
        if ip.dim() != arr.dim() {
            return Err(CliError::config("inner product dimension differs from the arrangement"));
        }
        Ok((arr, ip))
    }

    /// Chamber walls of the base chamber, and Ω.
    pub fn reflection_data(&self) -> Result<(ReflectionGroupData, OmegaGroup), CliError> {
        let (arr, ip) = self.arrangement()?;
        let base = arr.basepoint().clone();
        let data = chamber_walls(&arr, &ip, &base).map_err(|e| CliError::config(format!("chamber walls: {e}")))?;
        let omega = match &self.omega {
            None => OmegaGroup::trivial(&data),
            Some(o) => {
                let gens = o.generators.iter().map(IsoCfg::build).collect::<Result<Vec<_>, _>>()?;
                let order = match &o.order {
                    OrderCfg::Finite(n) => OmegaOrder::Finite(*n),
                    OrderCfg::Named(s) if s == "infinite" => OmegaOrder::Infinite,
                    OrderCfg::Named(s) => return Err(CliError::config(format!("omega order {s:?}"))),
                };
                OmegaGroup::new(&data, gens, order).map_err(|e| CliError::config(format!("omega: {e}")))?
            }
        };
        Ok((data, omega))
    }

    /// The algebra `ℂ[Ω, μ] ⋉ H(W_aff, q)` of the `hecke` section.
    pub fn hecke_algebra(&self, cutoff: u32) -> Result<HeckeContext, CliError> {
        let field = self.field()?;
        let (data, omega_group) = self.reflection_data()?;
        let cfg = self.hecke.as_ref().ok_or_else(|| CliError::config("missing \"hecke\" section"))?;
        let rank = data.rank();
        let q: Vec<Scalar> = match cfg.q.len() {
            1 => vec![cfg.q[0].to_scalar(&field)?; rank],
            _ => cfg.q.iter().map(|c| c.to_scalar(&field)).collect::<Result<_, _>>()?,
        };
        let classes = reflections::simple_conjugacy_classes(&data, Some(&omega_group), cutoff);
        let params = HeckeParams::new(q, cfg.classes.clone(), &classes, &RealAboveOne).map_err(|e| CliError::config(format!("parameters: {e}")))?;
        let omega = OmegaAction::from_group(&data, &omega_group);
        let cocycle = match &cfg.cocycle {
            None => Cocycle::Trivial,
            Some(CocycleCfg::Named(s)) if s == "trivial" => Cocycle::Trivial,
            Some(CocycleCfg::Named(s)) => return Err(CliError::config(format!("unknown cocycle {s:?}"))),
            Some(CocycleCfg::Table { table }) => Cocycle::Table(
                table
                    .iter()
                    .map(|r| r.iter().map(|c| c.to_scalar(&field)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<_, _>>()?,
            ),
            Some(CocycleCfg::Bicharacter { bicharacter }) => Cocycle::Bicharacter(bicharacter.to_scalar(&field)?),
        };
        let algebra = HeckeAlgebra::new(data.clone(), omega, cocycle, params, field.clone()).map_err(|e| CliError::config(format!("algebra: {e}")))?;
        Ok(HeckeContext { algebra, data, omega_group, field })
    }

    pub fn roots(&self) -> Result<RootsContext, CliError> {
        let cfg = self.roots.as_ref().ok_or_else(|| CliError::config("missing \"roots\" section"))?;
        let rs = RootSystem::parse(&cfg.kind).map_err(|e| CliError::config(format!("root system: {e}")))?;
        let levi = LeviSubset::new(&rs, cfg.levi.iter().copied()).map_err(|e| CliError::config(format!("levi: {e}")))?;
        let x0 = rationals(&cfg.x0)?;
        let basis = match &cfg.basis {
            Some(b) => Some(rational_matrix(b)?),
            None => None,
        };
        Ok(RootsContext { rs, levi, x0, basis })
    }

    pub fn fingrp(&self) -> Result<FingrpContext, CliError> {
        let cfg = self.fingrp.as_ref().ok_or_else(|| CliError::config("missing \"fingrp\" section"))?;
        FingrpContext::build(cfg, &self.field()?)
    }

    pub fn cover(&self) -> Result<(CoverFamily, TFamily), CliError> {
        let cfg = self.cover.as_ref().ok_or_else(|| CliError::config("missing \"cover\" section"))?;
        build_cover(cfg, &self.field()?, self.arrangement.is_some().then(|| self.arrangement()).transpose()?.map(|(a, _)| a))
    }
}

pub struct HeckeContext {
    pub algebra: HeckeAlgebra<ReflectionGroupData>,
    pub data: ReflectionGroupData,
    pub omega_group: OmegaGroup,
    pub field: Field,
}

impl HeckeContext {
    pub fn omega_ref(&self, r: &OmegaRef) -> Result<OmegaElem, CliError> {
        let omega = self.algebra.omega();
        let t = match r {
            OmegaRef::Index(i) => OmegaElem(*i),
            OmegaRef::Power(s) => {
                let s = s.trim();
                let k: i64 = match s {
                    "1" | "" => 0,
                    "w" => 1,
                    _ => s
                        .strip_prefix("w^")
                        .and_then(|k| k.parse().ok())
                        .ok_or_else(|| CliError::config(format!("omega element {s:?}")))?,
                };
                if omega.is_finite() {
                    let g = omega.generators().and_then(|g| g.first().copied()).unwrap_or(OmegaElem::IDENTITY);
                    let (g, k) = if k < 0 { (omega.inv(g), -k) } else { (g, k) };
                    (0..k).fold(OmegaElem::IDENTITY, |acc, _| omega.mul(acc, g))
                } else {
                    OmegaElem(k)
                }
            }
        };
        if !omega.contains(t) {
            return Err(CliError::config(format!("omega element {} is not in the group", t.0)));
        }
        Ok(t)
    }

    pub fn element(&self, terms: &[ElemTerm]) -> Result<ProductAlgElem<AffineIso>, CliError> {
        let mut out = ProductAlgElem::zero();
        for term in terms {
            if term.word.iter().any(|&s| s >= self.data.rank()) {
                return Err(CliError::config(format!("word {:?} uses a letter beyond the rank {}", term.word, self.data.rank())));
            }
            let w = self.data.word_iso(&term.word).map_err(|e| CliError::config(e.to_string()))?;
            out.add_term(self.omega_ref(&term.omega)?, w, term.coeff.to_scalar(&self.field)?);
        }
        Ok(out)
    }

    /// Terms as JSON-ready structs, words reduced.
    pub fn terms(&self, a: &ProductAlgElem<AffineIso>) -> Result<Vec<ElemTerm>, CliError> {
        a.terms()
            .map(|(t, w, c)| {
                let word = self.data.word_of(w).map_err(|e| CliError::check(e.to_string()))?;
                Ok(ElemTerm { omega: OmegaRef::Index(t.0), word, coeff: Num::Text(c.to_string()) })
            })
            .collect()
    }
}

pub struct RootsContext {
    pub rs: RootSystem,
    pub levi: LeviSubset,
    pub x0: Vec<Rational>,
    pub basis: Option<Matrix<Rational>>,
}

impl RootsContext {
    pub fn arrangement(&self) -> Result<Arrangement, CliError> {
        let r = match &self.basis {
            Some(b) => rootdata::depthzero_arrangement_in_basis(&self.rs, &self.levi, &self.x0, b),
            None => rootdata::depthzero_arrangement(&self.rs, &self.levi, &self.x0),
        };
        r.map_err(|e| CliError::config(format!("depth-zero arrangement: {e}")))
    }

    pub fn inner_product(&self) -> InnerProduct {
        let basis = self.basis.clone().unwrap_or_else(|| self.levi.fixed_space(&self.rs));
        rootdata::restricted_inner_product(&self.rs, &basis)
    }
}

pub fn build_group(cfg: &GroupCfg) -> Result<FinGroup, CliError> {
    let err = |e: hecke_core::finite_groups::GroupError| CliError::config(format!("group: {e}"));
    let named = |kind: &str, param: Option<i64>| -> Result<FinGroup, CliError> {
        let p = || param.ok_or_else(|| CliError::config(format!("group kind {kind:?} needs a parameter")));
        let n = |v: i64| usize::try_from(v).map_err(|_| CliError::config("negative group parameter"));
        match kind {
            "symmetric" | "s" => FinGroup::symmetric(n(p()?)?).map_err(err),
            "cyclic" | "c" => Ok(FinGroup::cyclic(n(p()?)?)),
            "dihedral" | "d" => Ok(FinGroup::dihedral(n(p()?)?)),
            "gl2" => FinGroup::gl2(p()?).map_err(err),
            "sl2" => FinGroup::sl2(p()?).map_err(err),
            other => Err(CliError::config(format!("unknown group kind {other:?}"))),
        }
    };
    match cfg {
        GroupCfg::Table { table } => FinGroup::from_table(table.clone()).map_err(err),
        GroupCfg::Kind { kind, param } => named(kind, *param),
        GroupCfg::Name(s) => {
            let s = s.trim().to_ascii_lowercase();
            if let Some((kind, p)) = s.split_once(':') {
                let p = p.parse().map_err(|_| CliError::config(format!("group {s:?}")))?;
                return named(kind, Some(p));
            }
            let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| CliError::config(format!("group {s:?}")))?;
            let (kind, p) = s.split_at(split);
            let p = p.parse().map_err(|_| CliError::config(format!("group {s:?}")))?;
            named(kind, Some(p))
        }
    }
}

pub fn elem(group: &FinGroup, r: &ElemRef) -> Result<usize, CliError> {
    match r {
        ElemRef::Index(i) if *i < group.order() => Ok(*i),
        ElemRef::Index(i) => Err(CliError::config(format!("element index {i} out of range"))),
        ElemRef::Key(k) => group.find(k).ok_or_else(|| CliError::config(format!("no element with key {k:?}"))),
    }
}

pub fn build_subgroup(group: &FinGroup, cfg: &SubCfg) -> Result<Subgroup, CliError> {
    let err = |e: hecke_core::finite_groups::GroupError| CliError::config(format!("subgroup: {e}"));
    match cfg {
        SubCfg::Generators { generators } => {
            let gens = generators.iter().map(|g| elem(group, g)).collect::<Result<Vec<_>, _>>()?;
            Ok(group.generate(&gens))
        }
        SubCfg::Name(name) => match name.as_str() {
            "whole" => Ok(group.whole()),
            "trivial" => Ok(group.trivial_subgroup()),
            "borel" => group.borel(true).map_err(err),
            "borel-" => group.borel(false).map_err(err),
            "unipotent" => group.unipotent(true).map_err(err),
            "unipotent-" => group.unipotent(false).map_err(err),
            "torus" => group.torus().map_err(err),
            "monomial" => group.monomial().map_err(err),
            other => {
                let k = other
                    .strip_prefix('s')
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| CliError::config(format!("unknown subgroup {other:?}")))?;
                group.point_stabilizer_chain(k).map_err(err)
            }
        },
    }
}

pub fn build_rep(group: &FinGroup, sub: &Subgroup, cfg: &RepCfg, field: &Field) -> Result<Rep, CliError> {
    let rep = match cfg {
        RepCfg::Name(n) if n == "trivial" => Rep::trivial(sub, field),
        RepCfg::Name(n) => return Err(CliError::config(format!("unknown representation {n:?}"))),
        RepCfg::Generators { dim, generators } => {
            let gens = generators
                .iter()
                .map(|g| Ok((elem(group, &g.element)?, scalar_matrix(&g.matrix, field)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            let rep = Rep::from_generators(group, field, *dim, &gens).map_err(|e| CliError::config(format!("representation: {e}")))?;
            let domain: Vec<usize> = rep.domain().collect();
            if domain != sub.elements() {
                return Err(CliError::config("representation generators do not generate the subgroup"));
            }
            rep
        }
    };
    rep.validate(group).map_err(|e| CliError::config(format!("representation: {e}")))?;
    Ok(rep)
}

pub struct FingrpContext {
    pub group: FinGroup,
    pub sub: Subgroup,
    pub rep: Rep,
    pub h: Option<usize>,
    pub field: Field,
}

impl FingrpContext {
    pub fn build(cfg: &FingrpCfg, field: &Field) -> Result<FingrpContext, CliError> {
        let group = build_group(&cfg.group)?;
        let sub = build_subgroup(&group, &cfg.sub)?;
        let rep = build_rep(&group, &sub, &cfg.rep, field)?;
        let h = cfg.h.as_ref().map(|h| elem(&group, h)).transpose()?;
        Ok(FingrpContext { group, sub, rep, h, field: field.clone() })
    }
}

/// Closes the generators of `N♥` under multiplication together with their
/// action on the points.
fn close_nheart(group: &FinGroup, gens: &[(usize, Vec<usize>)], np: usize) -> Result<Vec<(usize, Vec<usize>)>, CliError> {
    let mut action: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    action.insert(group.identity(), (0..np).collect());
    let mut queue: VecDeque<usize> = VecDeque::from([group.identity()]);
    while let Some(n) = queue.pop_front() {
        for (g, perm) in gens {
            let gn = group.mul(*g, n);
            let composed: Vec<usize> = action[&n].iter().map(|&x| perm[x]).collect();
            match action.get(&gn) {
                Some(existing) if *existing != composed => {
                    return Err(CliError::config(format!("inconsistent point action at {}", group.label(gn))));
                }
                Some(_) => {}
                None => {
                    action.insert(gn, composed);
                    queue.push_back(gn);
                }
            }
        }
    }
    Ok(action.into_iter().collect())
}

pub fn build_cover(cfg: &CoverCfg, field: &Field, arrangement: Option<Arrangement>) -> Result<(CoverFamily, TFamily), CliError> {
    let group = build_group(&cfg.group)?;
    let names: Vec<&str> = cfg.points.iter().map(|p| p.name.as_str()).collect();
    let index = |n: &str| names.iter().position(|&m| m == n).ok_or_else(|| CliError::config(format!("unknown point {n:?}")));
    let mut points = Vec::new();
    for p in &cfg.points {
        let k = build_subgroup(&group, &p.k)?;
        let k_plus = build_subgroup(&group, &p.k_plus)?;
        let mut theta: BTreeMap<usize, Scalar> = k_plus.elements().iter().map(|&g| (g, field.one())).collect();
        for tv in &p.theta {
            let g = elem(&group, &tv.element)?;
            if !k_plus.contains(g) {
                return Err(CliError::config(format!("theta value outside K+ at {}", p.name)));
            }
            theta.insert(g, tv.value.to_scalar(field)?);
        }
        let rho = build_rep(&group, &k, &p.rho, field)?;
        points.push(PointData { name: p.name.clone(), k, k_plus, theta, rho });
    }
    let np = points.len();
    let distance = match (&cfg.distance, arrangement) {
        (Some(d), _) => d.clone(),
        (None, Some(arr)) => {
            let coords = cfg
                .points
                .iter()
                .map(|p| p.coords.as_ref().map(|c| rationals(c)).transpose()?.ok_or_else(|| CliError::config(format!("point {} has no coordinates", p.name))))
                .collect::<Result<Vec<_>, CliError>>()?;
            let mut d = vec![vec![0; np]; np];
            for x in 0..np {
                for y in 0..np {
                    d[x][y] = geometry::distance(&arr, &coords[x], &coords[y], false).map_err(|e| CliError::config(format!("distance: {e}")))?;
                }
            }
            d
        }
        (None, None) => return Err(CliError::config("cover needs a distance table or an arrangement with point coordinates")),
    };
    let levi = build_subgroup(&group, &cfg.levi)?;
    let rho_m = build_rep(&group, &levi, &cfg.rho_m, field)?;
    let unipotent = match &cfg.unipotent {
        None => None,
        Some(u) => Some(UnipotentData {
            levi: u.levi.as_ref().map(|l| build_subgroup(&group, l)).transpose()?,
            pairs: u
                .pairs
                .iter()
                .map(|(a, b)| Ok((build_subgroup(&group, a)?, build_subgroup(&group, b)?)))
                .collect::<Result<_, CliError>>()?,
        }),
    };
    let gens = cfg
        .nheart
        .iter()
        .map(|g| {
            if g.action.len() != np {
                return Err(CliError::config("point action must list every point"));
            }
            let perm = g.action.iter().map(|n| index(n)).collect::<Result<Vec<_>, _>>()?;
            Ok((elem(&group, &g.element)?, perm))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let nheart = close_nheart(&group, &gens, np)?;
    let base = index(&cfg.base)?;
    let fam = CoverFamily::new(CoverSpec { group: group.clone(), field: field.clone(), points, distance, base, levi, rho_m, unipotent, nheart })
        .map_err(|e| CliError::config(format!("cover family: {e}")))?;
    let mut t = TFamily::standard(&fam);
    for s in &cfg.t_scale {
        let n = elem(&group, &s.element)?;
        let c = fam.class_of(n).map_err(|e| CliError::config(e.to_string()))?;
        t = t.scale_class(&fam, c, &s.value.to_scalar(field)?);
    }
    Ok((fam, t))
}

/// An affine form written as `a·x + c`.
pub fn form_json(a: &AffineForm) -> serde_json::Value {
    serde_json::json!({
        "gradient": a.gradient.iter().map(rational::format).collect::<Vec<_>>(),
        "constant": rational::format(&a.constant),
    })
}

/// The arrangement in the config format.
pub fn arrangement_json(arr: &Arrangement) -> serde_json::Value {
    let fams: Vec<serde_json::Value> = arr
        .entries()
        .map(|(f, r)| {
            serde_json::json!({
                "gradient": f.gradient.iter().map(rational::format).collect::<Vec<_>>(),
                "base": rational::format(&f.base),
                "period": rational::format(&f.period),
                "relevant": r,
            })
        })
        .collect();
    serde_json::json!({
        "dim": arr.dim(),
        "basepoint": arr.basepoint().iter().map(rational::format).collect::<Vec<_>>(),
        "families": fams,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_parse_as_rationals_and_scalars() {
        let n: Vec<Num> = serde_json::from_str(r#"[3, "-2/6", "0"]"#).unwrap();
        assert_eq!(rationals(&n).unwrap(), vec![rational::int(3), rational::rat(-1, 3), rational::int(0)]);
        let f = Field::new(4, None).unwrap();
        assert_eq!(Num::Text("1/2 + z".into()).to_scalar(&f).unwrap(), &f.frac(1, 2) + &f.zeta());
        assert!(Num::Text("x".into()).to_rational().is_err());
        assert!(rational_matrix(&[vec![Num::Int(1)], vec![]]).is_err());
    }

    #[test]
    fn group_names() {
        for (name, order) in [("s4", 24), ("gl2:3", 48), ("C5", 5), ("d4", 8), ("sl2:3", 24)] {
            let g = build_group(&GroupCfg::Name(name.into())).unwrap();
            assert_eq!(g.order(), order, "{name}");
        }
        assert!(build_group(&GroupCfg::Name("q8".into())).is_err());
        assert!(build_group(&GroupCfg::Kind { kind: "gl2".into(), param: None }).is_err());
    }

    #[test]
    fn subgroups_and_elements() {
        let g = build_group(&GroupCfg::Name("gl2:3".into())).unwrap();
        assert_eq!(build_subgroup(&g, &SubCfg::Name("borel".into())).unwrap().order(), 12);
        assert_eq!(build_subgroup(&g, &SubCfg::Name("unipotent-".into())).unwrap().order(), 3);
        let w = elem(&g, &ElemRef::Key(vec![0, 1, 1, 0])).unwrap();
        assert_eq!(build_subgroup(&g, &SubCfg::Generators { generators: vec![ElemRef::Index(w)] }).unwrap().order(), 2);
        assert!(elem(&g, &ElemRef::Key(vec![0, 0, 0, 0])).is_err());
        assert!(elem(&g, &ElemRef::Index(48)).is_err());
        let s4 = build_group(&GroupCfg::Name("s4".into())).unwrap();
        assert_eq!(build_subgroup(&s4, &SubCfg::Name("s3".into())).unwrap().order(), 6);
    }

    #[test]
    fn unknown_keys_and_schema_are_rejected() {
        assert!(RunConfig::parse(r#"{"schema": 1, "bogus": true}"#).is_err());
        assert!(RunConfig::parse(r#"{"schema": 7}"#).is_err());
        assert_eq!(RunConfig::parse(r#"{"schema": 1}"#).unwrap().field().unwrap(), Field::rationals());
    }

    #[test]
    fn omega_references() {
        let ctx = crate::presets::load("affine-a1-ext").unwrap().hecke_algebra(24).unwrap();
        assert_eq!(ctx.omega_ref(&OmegaRef::Power("1".into())).unwrap(), OmegaElem(0));
        assert_eq!(ctx.omega_ref(&OmegaRef::Power("w^3".into())).unwrap(), OmegaElem(1));
        assert_eq!(ctx.omega_ref(&OmegaRef::Power("w^2".into())).unwrap(), OmegaElem(0));
        assert!(ctx.omega_ref(&OmegaRef::Index(5)).is_err());
        let bad = ElemTerm { omega: OmegaRef::Index(0), word: vec![2], coeff: Num::Int(1) };
        assert!(ctx.element(&[bad]).is_err());
    }

    #[test]
    fn terms_round_trip() {
        let ctx = crate::presets::load("affine-a1-ext").unwrap().hecke_algebra(24).unwrap();
        let a = ctx.element(ctx_terms_a()).unwrap();
        let back = ctx.element(&ctx.terms(&a).unwrap()).unwrap();
        assert_eq!(a, back);
    }

    fn ctx_terms_a() -> &'static [ElemTerm] {
        use std::sync::OnceLock;
        static TERMS: OnceLock<Vec<ElemTerm>> = OnceLock::new();
        TERMS.get_or_init(|| serde_json::from_str(r#"[{"omega": "w", "word": [0, 1], "coeff": "2 - z"}, {"word": [1], "coeff": 3}]"#).unwrap())
    }

    #[test]
    fn arrangement_backed_cover_distance() {
        let (fam, _) = crate::presets::load("gl2f2-cover").unwrap().cover().unwrap();
        let (x, y) = (fam.point("x").unwrap(), fam.point("y").unwrap());
        assert_eq!(fam.distance(x, y), 1);
        assert_eq!(fam.distance(x, x), 0);
    }
}

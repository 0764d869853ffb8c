//! Affine reflection groups generated by the relevant hyperplanes of an
//! arrangement: chambers and walls, simple reflections, reduced words by
//! descent walks, the length-zero group Ω and the decomposition of an
//! isometry as `t · (s₁ ∘ … ∘ s_k)` with `t ∈ Ω`.
//!
//! Words are read left to right as composites: `(s₁, …, s_k)` is the map
//! `s₁ ∘ … ∘ s_k` acting on points.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::geometry::{self, AffineForm, Arrangement, GeometryError, InnerProduct, Point};
use crate::linalg::{dot, Matrix};
use crate::polyhedra::{self, Equation, Inequality};
use crate::rational::{self, Rational};

/// Upper bound on descent-walk steps before giving up.
pub const DEFAULT_STEP_BOUND: usize = 10_000;

/// Upper bound on the size of an enumerated finite Ω.
pub const MAX_OMEGA_ORDER: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ReflectionError {
    Geometry(GeometryError),
    NotGeneric,
    NotIsometry,
    DimensionMismatch,
    /// The image of the base point lies on a hyperplane, so the input does not
    /// preserve the arrangement.
    ImageNotGeneric,
    StepBound(usize),
    NotInWaff(Box<AffineIso>),
    NotInOmega(Box<AffineIso>),
    InvalidOmega(String),
    UnknownSimple(usize),
}

impl fmt::Display for ReflectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Geometry(e) => write!(f, "{e}"),
            Self::NotGeneric => write!(f, "base point lies on a relevant hyperplane"),
            Self::NotIsometry => write!(f, "map is not an isometry of the inner product"),
            Self::DimensionMismatch => write!(f, "dimension mismatch"),
            Self::ImageNotGeneric => write!(f, "image of the base point lies on a hyperplane"),
            Self::StepBound(n) => write!(f, "descent walk exceeded {n} steps"),
            Self::NotInWaff(r) => write!(f, "not in the affine Weyl group; residual {r}"),
            Self::NotInOmega(r) => write!(f, "residual {r} is not in the length-zero group"),
            Self::InvalidOmega(m) => write!(f, "invalid length-zero group: {m}"),
            Self::UnknownSimple(i) => write!(f, "no simple reflection with index {i}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ReflectionError {}

impl From<GeometryError> for ReflectionError {
    fn from(e: GeometryError) -> Self {
        ReflectionError::Geometry(e)
    }
}

/// `x ↦ A x + b`, compared by `(A, b)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineIso {
    pub linear: Matrix<Rational>,
    pub translation: Vec<Rational>,
}

impl fmt::Display for AffineIso {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.linear.rows())
            .map(|i| {
                let r: Vec<String> = self.linear.row(i).iter().map(rational::format).collect();
                r.join(" ")
            })
            .collect();
        let t: Vec<String> = self.translation.iter().map(rational::format).collect();
        write!(f, "x -> [{}] x + [{}]", rows.join("; "), t.join(", "))
    }
}

impl AffineIso {
    pub fn new(linear: Matrix<Rational>, translation: Vec<Rational>) -> Result<Self, ReflectionError> {
        if !linear.is_square() || linear.rows() != translation.len() {
            return Err(ReflectionError::DimensionMismatch);
        }
        Ok(AffineIso { linear, translation })
    }

    pub fn identity(dim: usize) -> Self {
        AffineIso {
            linear: Matrix::identity(dim, &Rational::one()),
            translation: vec![Rational::zero(); dim],
        }
    }

    pub fn translation_by(v: Vec<Rational>) -> Self {
        let mut t = Self::identity(v.len());
        t.translation = v;
        t
    }

    /// The orthogonal reflection across `h`.
    pub fn reflection(h: &AffineForm, ip: &InnerProduct) -> Self {
        let n = h.dim();
        let sharp = ip.sharp(&h.gradient);
        let c = rational::int(2) / ip.dual_inner(&h.gradient, &h.gradient);
        let mut linear = Matrix::identity(n, &Rational::one());
        for i in 0..n {
            for j in 0..n {
                let v = linear.get(i, j) - &c * &sharp[i] * &h.gradient[j];
                linear.set(i, j, v);
            }
        }
        let translation = sharp.iter().map(|s| -(&c * &h.constant * s)).collect();
        AffineIso { linear, translation }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim())
    }

    pub fn apply(&self, x: &[Rational]) -> Point {
        self.linear
            .apply(x)
            .into_iter()
            .zip(&self.translation)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineIso) -> AffineIso {
        AffineIso {
            linear: self.linear.mul(&other.linear),
            translation: self.apply(&other.translation),
        }
    }

    pub fn inverse(&self) -> Option<AffineIso> {
        let inv = self.linear.inverse()?;
        let t = inv.apply(&self.translation).into_iter().map(|v| -v).collect();
        Some(AffineIso { linear: inv, translation: t })
    }

    pub fn pow(&self, k: i64) -> Option<AffineIso> {
        let base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut acc = Self::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            acc = acc.compose(&base);
        }
        Some(acc)
    }

    /// `Aᵀ G A = G`.
    pub fn is_isometry(&self, ip: &InnerProduct) -> bool {
        self.linear.transpose().mul(ip.gram()).mul(&self.linear) == *ip.gram()
    }

    /// The image hyperplane `{g(x) : a(x) = 0}` as a form: `a ∘ g⁻¹`.
    pub fn push_form(&self, a: &AffineForm) -> Option<AffineForm> {
        let inv = self.inverse()?;
        Some(a.precompose(&inv.linear, &inv.translation))
    }
}

/// The chamber of a base point, its walls and simple reflections.
#[derive(Clone, Debug)]
pub struct ReflectionGroupData {
    arrangement: Arrangement,
    ip: InnerProduct,
    base: Point,
    walls: Vec<AffineForm>,
    simple: Vec<AffineIso>,
    step_bound: usize,
}

fn sign_at(a: &AffineForm, x: &[Rational]) -> i8 {
    let v = a.eval(x);
    if v.is_positive() {
        1
    } else if v.is_negative() {
        -1
    } else {
        0
    }
}

/// Wall ordering: by gradient, then by position along it.
fn wall_key(a: &AffineForm) -> (Vec<Rational>, Rational) {
    (a.gradient.clone(), -a.constant.clone())
}

/// Computes the walls of the chamber of `base` for the relevant families of
/// `arr`.
///
/// Every family contributes the nearest member on each side of `base`; the
/// chamber is the intersection of the resulting slabs, since every other
/// member of a family lies beyond one of those two. A candidate is a wall
/// when some point of it lies strictly on the base side of all other
/// candidates, decided exactly by Fourier–Motzkin.
pub fn chamber_walls(arr: &Arrangement, ip: &InnerProduct, base: &[Rational]) -> Result<ReflectionGroupData, ReflectionError> {
    if ip.dim() != arr.dim() || base.len() != arr.dim() {
        return Err(ReflectionError::DimensionMismatch);
    }
    let rel = arr.relevant_part();
    if !geometry::is_generic(&rel, base)? {
        return Err(ReflectionError::NotGeneric);
    }
    let mut candidates = BTreeSet::new();
    for fam in rel.families() {
        if fam.is_periodic() {
            let u = fam.base_value(base);
            let t = -(u / &fam.period);
            let above = t.floor().to_integer() + 1;
            let below = t.ceil().to_integer() - 1;
            for k in [above, below] {
                let k: i64 = i64::try_from(&k).expect("offset fits in i64");
                candidates.insert(fam.member(k).canonical());
            }
        } else {
            candidates.insert(fam.member(0).canonical());
        }
    }
    let cands: Vec<AffineForm> = candidates.into_iter().collect();
    let oriented: Vec<Inequality> = cands
        .iter()
        .map(|a| {
            let s = rational::int(sign_at(a, base) as i64);
            Inequality::strict(a.gradient.iter().map(|g| g * &s).collect(), &a.constant * &s)
        })
        .collect();
    let mut walls = Vec::new();
    for (i, a) in cands.iter().enumerate() {
        let eq = Equation { coeffs: a.gradient.clone(), constant: a.constant.clone() };
        let others: Vec<Inequality> = oriented
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, q)| q.clone())
            .collect();
        if polyhedra::feasible(&[eq], &others) {
            walls.push(a.clone());
        }
    }
    walls.sort_by_key(wall_key);
    let simple = walls.iter().map(|w| AffineIso::reflection(w, ip)).collect();
    Ok(ReflectionGroupData {
        arrangement: rel,
        ip: ip.clone(),
        base: base.to_vec(),
        walls,
        simple,
        step_bound: DEFAULT_STEP_BOUND,
    })
}

/// Finite order, or at least the cutoff.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum BraidOrder {
    Finite(u32),
    AtLeast(u32),
}

impl BraidOrder {
    pub fn is_odd(&self) -> bool {
        matches!(self, BraidOrder::Finite(m) if m % 2 == 1)
    }
}

impl fmt::Display for BraidOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BraidOrder::Finite(m) => write!(f, "{m}"),
            BraidOrder::AtLeast(c) => write!(f, ">={c}"),
        }
    }
}

/// Result of a descent walk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Walk {
    /// `g` equals the composite of the word.
    Word(Vec<usize>),
    /// `g = (composite of word) ∘ residual` with a chamber-fixing residual.
    NotInWaff { word: Vec<usize>, residual: AffineIso },
}

impl ReflectionGroupData {
    pub fn arrangement(&self) -> &Arrangement {
        &self.arrangement
    }

    pub fn inner_product(&self) -> &InnerProduct {
        &self.ip
    }

    pub fn base(&self) -> &Point {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn walls(&self) -> &[AffineForm] {
        &self.walls
    }

    pub fn rank(&self) -> usize {
        self.walls.len()
    }

    pub fn simple(&self, i: usize) -> &AffineIso {
        &self.simple[i]
    }

    pub fn simple_reflections(&self) -> &[AffineIso] {
        &self.simple
    }

    pub fn set_step_bound(&mut self, bound: usize) {
        self.step_bound = bound;
    }

    /// The composite `s_{w₁} ∘ … ∘ s_{w_k}`.
    pub fn word_iso(&self, word: &[usize]) -> Result<AffineIso, ReflectionError> {
        let mut acc = AffineIso::identity(self.dim());
        for &i in word {
            let s = self.simple.get(i).ok_or(ReflectionError::UnknownSimple(i))?;
            acc = acc.compose(s);
        }
        Ok(acc)
    }

    /// `d_Krel(x̄₀, g⁻¹ x̄₀)`.
    pub fn geometric_length(&self, g: &AffineIso) -> Result<usize, ReflectionError> {
        let inv = g.inverse().ok_or(ReflectionError::NotIsometry)?;
        Ok(geometry::distance(&self.arrangement, &self.base, &inv.apply(&self.base), true)?)
    }

    /// Index of the simple reflection equal to `g`.
    pub fn simple_index(&self, g: &AffineIso) -> Option<usize> {
        self.simple.iter().position(|s| s == g)
    }

    fn descents(&self, y: &[Rational]) -> Result<Vec<usize>, ReflectionError> {
        let mut out = Vec::new();
        for (i, w) in self.walls.iter().enumerate() {
            let sy = sign_at(w, y);
            if sy == 0 {
                return Err(ReflectionError::ImageNotGeneric);
            }
            if sy != sign_at(w, &self.base) {
                out.push(i);
            }
        }
        Ok(out)
    }

    /// Descent walk with a caller-chosen descent at each step.
    pub fn reduced_word_with(
        &self,
        g: &AffineIso,
        choose: &mut dyn FnMut(&[usize]) -> usize,
    ) -> Result<Walk, ReflectionError> {
        if g.dim() != self.dim() {
            return Err(ReflectionError::DimensionMismatch);
        }
        if !g.is_isometry(&self.ip) {
            return Err(ReflectionError::NotIsometry);
        }
        let mut cur = g.clone();
        let mut y = g.apply(&self.base);
        let mut word = Vec::new();
        loop {
            let desc = self.descents(&y)?;
            if desc.is_empty() {
                break;
            }
            if word.len() >= self.step_bound {
                return Err(ReflectionError::StepBound(self.step_bound));
            }
            let i = desc[choose(&desc).min(desc.len() - 1)];
            cur = self.simple[i].compose(&cur);
            y = self.simple[i].apply(&y);
            word.push(i);
        }
        if cur.is_identity() {
            Ok(Walk::Word(word))
        } else {
            Ok(Walk::NotInWaff { word, residual: cur })
        }
    }

    /// Descent walk choosing the lowest wall index.
    pub fn reduced_word(&self, g: &AffineIso) -> Result<Walk, ReflectionError> {
        self.reduced_word_with(g, &mut |_| 0)
    }

    /// The reduced word of an element of W_aff.
    pub fn word_of(&self, g: &AffineIso) -> Result<Vec<usize>, ReflectionError> {
        match self.reduced_word(g)? {
            Walk::Word(w) => Ok(w),
            Walk::NotInWaff { residual, .. } => Err(ReflectionError::NotInWaff(Box::new(residual))),
        }
    }

    /// Length of an element of W_aff.
    pub fn length(&self, g: &AffineIso) -> Result<usize, ReflectionError> {
        Ok(self.word_of(g)?.len())
    }

    /// Order of `s_i ∘ s_j`, or the cutoff sentinel.
    pub fn braid_order(&self, i: usize, j: usize, cutoff: u32) -> BraidOrder {
        let g = self.simple[i].compose(&self.simple[j]);
        let mut acc = g.clone();
        for m in 1..=cutoff {
            if acc.is_identity() {
                return BraidOrder::Finite(m);
            }
            acc = acc.compose(&g);
        }
        BraidOrder::AtLeast(cutoff)
    }

    pub fn coxeter_matrix(&self, cutoff: u32) -> Vec<Vec<BraidOrder>> {
        (0..self.rank())
            .map(|i| (0..self.rank()).map(|j| self.braid_order(i, j, cutoff)).collect())
            .collect()
    }

    /// All elements of length at most `max_len` with one reduced word each,
    /// ordered by length and then by matrix.
    pub fn ball(&self, max_len: usize) -> Vec<(AffineIso, Vec<usize>)> {
        let mut seen: BTreeMap<AffineIso, Vec<usize>> = BTreeMap::new();
        let id = AffineIso::identity(self.dim());
        seen.insert(id.clone(), Vec::new());
        let mut frontier = vec![(id, Vec::new())];
        let mut out = vec![(AffineIso::identity(self.dim()), Vec::new())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (g, w) in &frontier {
                for (i, s) in self.simple.iter().enumerate() {
                    let h = s.compose(g);
                    if seen.contains_key(&h) {
                        continue;
                    }
                    let mut word = vec![i];
                    word.extend(w.iter().copied());
                    seen.insert(h.clone(), word.clone());
                    next.push((h, word));
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

/// Chamber-stabilizing isometries given by generators.
#[derive(Clone, Debug)]
pub struct OmegaGroup {
    generators: Vec<AffineIso>,
    kind: OmegaKind,
    /// `perms[g][i] = j` when generator `g` conjugates `s_i` to `s_j`.
    generator_perms: Vec<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub enum OmegaKind {
    /// Enumerated elements; index 0 is the identity.
    Finite { elements: Vec<AffineIso> },
    /// Powers of the single generator.
    InfiniteCyclic,
}

/// An element of Ω: an index into the enumeration for finite Ω, an exponent
/// of the generator for infinite cyclic Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaElem(pub i64);

impl OmegaElem {
    pub const IDENTITY: OmegaElem = OmegaElem(0);
}

/// Declared order of Ω.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OmegaOrder {
    Finite(usize),
    Infinite,
}

/// Search window for powers of an infinite cyclic generator.
const CYCLIC_WINDOW: i64 = 256;

impl OmegaGroup {
    /// The trivial group.
    pub fn trivial(data: &ReflectionGroupData) -> OmegaGroup {
        OmegaGroup {
            generators: Vec::new(),
            kind: OmegaKind::Finite { elements: vec![AffineIso::identity(data.dim())] },
            generator_perms: Vec::new(),
        }
    }

    /// Validates that every generator is an isometry of length zero that
    /// permutes the simple reflections, then enumerates (finite) or checks
    /// the declared infinite order.
    pub fn new(data: &ReflectionGroupData, generators: Vec<AffineIso>, order: OmegaOrder) -> Result<OmegaGroup, ReflectionError> {
        let bad = |m: &str| ReflectionError::InvalidOmega(m.to_string());
        let mut perms = Vec::new();
        for g in &generators {
            if g.dim() != data.dim() {
                return Err(ReflectionError::DimensionMismatch);
            }
            if !g.is_isometry(&data.ip) {
                return Err(ReflectionError::NotIsometry);
            }
            let moved = g.apply(&data.base);
            if geometry::distance(&data.arrangement, &data.base, &moved, true)? != 0 {
                return Err(bad("generator does not stabilize the base chamber"));
            }
            let inv = g.inverse().ok_or(ReflectionError::NotIsometry)?;
            let mut perm = Vec::new();
            for s in &data.simple {
                let c = g.compose(s).compose(&inv);
                perm.push(data.simple_index(&c).ok_or_else(|| bad("conjugation does not permute S"))?);
            }
            perms.push(perm);
        }
        let kind = match order {
            OmegaOrder::Finite(n) => {
                let mut elements = vec![AffineIso::identity(data.dim())];
                let mut i = 0;
                while i < elements.len() {
                    for g in &generators {
                        let h = elements[i].compose(g);
                        if !elements.contains(&h) {
                            if elements.len() >= MAX_OMEGA_ORDER {
                                return Err(bad("group is too large or infinite"));
                            }
                            elements.push(h);
                        }
                    }
                    i += 1;
                }
                if elements.len() != n {
                    return Err(bad("declared order does not match the generated group"));
                }
                OmegaKind::Finite { elements }
            }
            OmegaOrder::Infinite => {
                if generators.len() != 1 {
                    return Err(bad("infinite length-zero groups need exactly one generator"));
                }
                let mut acc = generators[0].clone();
                for _ in 0..CYCLIC_WINDOW {
                    if acc.is_identity() {
                        return Err(bad("generator has finite order"));
                    }
                    acc = acc.compose(&generators[0]);
                }
                OmegaKind::InfiniteCyclic
            }
        };
        Ok(OmegaGroup { generators, kind, generator_perms: perms })
    }

    pub fn generators(&self) -> &[AffineIso] {
        &self.generators
    }

    pub fn kind(&self) -> &OmegaKind {
        &self.kind
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, OmegaKind::Finite { .. })
    }

    pub fn order(&self) -> OmegaOrder {
        match &self.kind {
            OmegaKind::Finite { elements } => OmegaOrder::Finite(elements.len()),
            OmegaKind::InfiniteCyclic => OmegaOrder::Infinite,
        }
    }

    /// Enumerated elements (finite Ω only).
    pub fn elements(&self) -> Option<Vec<OmegaElem>> {
        match &self.kind {
            OmegaKind::Finite { elements } => Some((0..elements.len() as i64).map(OmegaElem).collect()),
            OmegaKind::InfiniteCyclic => None,
        }
    }

    pub fn iso(&self, t: OmegaElem) -> AffineIso {
        match &self.kind {
            OmegaKind::Finite { elements } => elements[t.0 as usize].clone(),
            OmegaKind::InfiniteCyclic => self.generators[0].pow(t.0).expect("invertible generator"),
        }
    }

    pub fn find(&self, g: &AffineIso) -> Option<OmegaElem> {
        match &self.kind {
            OmegaKind::Finite { elements } => elements.iter().position(|e| e == g).map(|i| OmegaElem(i as i64)),
            OmegaKind::InfiniteCyclic => {
                let gen = &self.generators[0];
                let inv = gen.inverse()?;
                let mut up = AffineIso::identity(gen.dim());
                let mut down = up.clone();
                for k in 0..=CYCLIC_WINDOW {
                    if &up == g {
                        return Some(OmegaElem(k));
                    }
                    if &down == g {
                        return Some(OmegaElem(-k));
                    }
                    up = up.compose(gen);
                    down = down.compose(&inv);
                }
                None
            }
        }
    }

    pub fn mul(&self, a: OmegaElem, b: OmegaElem) -> OmegaElem {
        match &self.kind {
            OmegaKind::Finite { .. } => self
                .find(&self.iso(a).compose(&self.iso(b)))
                .expect("closed under composition"),
            OmegaKind::InfiniteCyclic => OmegaElem(a.0 + b.0),
        }
    }

    pub fn inv(&self, a: OmegaElem) -> OmegaElem {
        match &self.kind {
            OmegaKind::Finite { .. } => self
                .find(&self.iso(a).inverse().expect("invertible"))
                .expect("closed under inversion"),
            OmegaKind::InfiniteCyclic => OmegaElem(-a.0),
        }
    }

    /// The permutation of S given by `s ↦ t s t⁻¹`.
    pub fn perm(&self, data: &ReflectionGroupData, t: OmegaElem) -> Vec<usize> {
        let g = self.iso(t);
        let inv = g.inverse().expect("invertible");
        data.simple
            .iter()
            .map(|s| data.simple_index(&g.compose(s).compose(&inv)).expect("Ω permutes S"))
            .collect()
    }

    pub fn generator_perms(&self) -> &[Vec<usize>] {
        &self.generator_perms
    }
}

/// `(t, v)` representing `t ∘ (composite of v)` with `v` reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedElement {
    pub omega: OmegaElem,
    pub word: Vec<usize>,
}

impl ExtendedElement {
    pub fn to_iso(&self, data: &ReflectionGroupData, omega: &OmegaGroup) -> Result<AffineIso, ReflectionError> {
        Ok(omega.iso(self.omega).compose(&data.word_iso(&self.word)?))
    }
}

/// Writes `g = t · v` with `t ∈ Ω` and `v` a reduced word.
pub fn decompose(data: &ReflectionGroupData, omega: &OmegaGroup, g: &AffineIso) -> Result<ExtendedElement, ReflectionError> {
    let (word, residual) = match data.reduced_word(g)? {
        Walk::Word(w) => (w, AffineIso::identity(data.dim())),
        Walk::NotInWaff { word, residual } => (word, residual),
    };
    let t = omega
        .find(&residual)
        .ok_or_else(|| ReflectionError::NotInOmega(Box::new(residual.clone())))?;
    // g = w ∘ r = r ∘ (r⁻¹ w r), and r⁻¹ s r = perm_{r⁻¹}(s)
    let perm = omega.perm(data, omega.inv(t));
    let conj_word: Vec<usize> = word.iter().map(|&i| perm[i]).collect();
    let out = ExtendedElement { omega: t, word: conj_word };
    debug_assert_eq!(&out.to_iso(data, omega)?, g);
    if &out.to_iso(data, omega)? != g {
        return Err(ReflectionError::NotInOmega(Box::new(residual)));
    }
    Ok(out)
}

/// `t s_i t⁻¹` as an index into S.
pub fn conjugate_simple(data: &ReflectionGroupData, omega: &OmegaGroup, t: OmegaElem, s: usize) -> usize {
    omega.perm(data, t)[s]
}

/// The finest partition of S closed under odd braid orders and Ω-conjugation,
/// each block sorted, blocks ordered by their least member.
pub fn simple_conjugacy_classes(data: &ReflectionGroupData, omega: Option<&OmegaGroup>, cutoff: u32) -> Vec<Vec<usize>> {
    let n = data.rank();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    let union = |p: &mut Vec<usize>, a: usize, b: usize| {
        let (ra, rb) = (root(p, a), root(p, b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            p[hi] = lo;
        }
    };
    for i in 0..n {
        for j in i + 1..n {
            if data.braid_order(i, j, cutoff).is_odd() {
                union(&mut parent, i, j);
            }
        }
    }
    if let Some(om) = omega {
        for perm in om.generator_perms() {
            for (i, &j) in perm.iter().enumerate() {
                union(&mut parent, i, j);
            }
        }
    }
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut parent, i);
        classes.entry(r).or_default().push(i);
    }
    classes.into_values().collect()
}

/// Dot product helper for callers working with forms.
pub fn pairing(a: &[Rational], b: &[Rational]) -> Rational {
    dot(a, b, &Rational::zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HyperplaneFamily;
    use crate::rational::{int, rat};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn affine_a1() -> ReflectionGroupData {
        let fam = HyperplaneFamily::new(vec![int(1)], int(0), int(1)).unwrap();
        let arr = Arrangement::new(1, vec![rat(1, 3)], vec![(fam, true)]).unwrap();
        chamber_walls(&arr, &InnerProduct::standard(1), &[rat(1, 3)]).unwrap()
    }

    fn iso1(a: i64, b: i64) -> AffineIso {
        AffineIso::new(Matrix::from_rows(vec![vec![int(a)]], 1, &int(0)), vec![int(b)]).unwrap()
    }

    fn omega_a1(data: &ReflectionGroupData) -> OmegaGroup {
        OmegaGroup::new(data, vec![iso1(-1, 1)], OmegaOrder::Finite(2)).unwrap()
    }

    pub(crate) fn affine_a2() -> ReflectionGroupData {
        let fams = [[1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|g| (HyperplaneFamily::new(vec![int(g[0]), int(g[1])], int(0), int(1)).unwrap(), true))
            .collect();
        let base = vec![rat(1, 5), rat(1, 4)];
        let arr = Arrangement::new(2, base.clone(), fams).unwrap();
        // inverse of the A2 root Gram matrix [[2,-1],[-1,2]]
        let gram = Matrix::from_rows(
            vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]],
            2,
            &int(0),
        );
        chamber_walls(&arr, &InnerProduct::new(gram).unwrap(), &base).unwrap()
    }

    #[test]
    fn walls_of_the_unit_interval() {
        let d = affine_a1();
        assert_eq!(d.walls().len(), 2);
        assert_eq!(d.walls()[0], AffineForm::new(vec![int(1)], int(0)).unwrap());
        assert_eq!(d.walls()[1], AffineForm::new(vec![int(1)], int(-1)).unwrap());
        assert_eq!(d.simple(0), &iso1(-1, 0));
        assert_eq!(d.simple(1), &iso1(-1, 2));
    }

    #[test]
    fn empty_arrangement_has_no_walls() {
        let arr = Arrangement::empty(2, vec![int(0), int(0)]).unwrap();
        let d = chamber_walls(&arr, &InnerProduct::standard(2), &[int(0), int(0)]).unwrap();
        assert_eq!(d.rank(), 0);
        assert_eq!(d.ball(3).len(), 1);
    }

    #[test]
    fn alcove_of_affine_a2_is_a_triangle() {
        let d = affine_a2();
        assert_eq!(d.walls().len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(d.braid_order(i, j, 12), BraidOrder::Finite(3));
                }
            }
        }
    }

    #[test]
    fn non_generic_base_rejected() {
        let fam = HyperplaneFamily::new(vec![int(1)], int(0), int(1)).unwrap();
        let arr = Arrangement::new(1, vec![rat(1, 3)], vec![(fam, true)]).unwrap();
        assert_eq!(
            chamber_walls(&arr, &InnerProduct::standard(1), &[int(1)]).unwrap_err(),
            ReflectionError::NotGeneric
        );
    }

    #[test]
    fn braid_orders() {
        let d = affine_a1();
        assert_eq!(d.braid_order(0, 1, 12), BraidOrder::AtLeast(12));
        let fams = vec![
            (HyperplaneFamily::new(vec![int(1), int(0)], int(0), int(0)).unwrap(), true),
            (HyperplaneFamily::new(vec![int(0), int(1)], int(0), int(0)).unwrap(), true),
        ];
        let base = vec![rat(1, 2), rat(1, 3)];
        let arr = Arrangement::new(2, base.clone(), fams).unwrap();
        let p = chamber_walls(&arr, &InnerProduct::standard(2), &base).unwrap();
        assert_eq!(p.braid_order(0, 1, 12), BraidOrder::Finite(2));
    }

    #[test]
    fn reduced_word_examples() {
        let d = affine_a1();
        assert_eq!(d.reduced_word(&iso1(1, 2)).unwrap(), Walk::Word(vec![1, 0]));
        assert_eq!(d.reduced_word(&iso1(1, 0)).unwrap(), Walk::Word(vec![]));
        assert_eq!(
            d.reduced_word(&iso1(-1, 1)).unwrap(),
            Walk::NotInWaff { word: vec![], residual: iso1(-1, 1) }
        );
        let scaled = AffineIso::new(Matrix::from_rows(vec![vec![int(2)]], 1, &int(0)), vec![int(0)]).unwrap();
        assert_eq!(d.reduced_word(&scaled).unwrap_err(), ReflectionError::NotIsometry);
    }

    #[test]
    fn length_examples() {
        let d = affine_a1();
        assert_eq!(d.length(d.simple(0)).unwrap(), 1);
        assert_eq!(d.length(&iso1(1, 2)).unwrap(), 2);
        let w = d.word_iso(&[0, 1, 0]).unwrap();
        assert_eq!(d.length(&w).unwrap(), 3);
    }

    #[test]
    fn decompose_examples() {
        let d = affine_a1();
        let om = omega_a1(&d);
        let omega = om.find(&iso1(-1, 1)).unwrap();
        assert_eq!(
            decompose(&d, &om, &iso1(1, 1)).unwrap(),
            ExtendedElement { omega, word: vec![0] }
        );
        assert_eq!(
            decompose(&d, &om, d.simple(0)).unwrap(),
            ExtendedElement { omega: OmegaElem::IDENTITY, word: vec![0] }
        );
        assert_eq!(decompose(&d, &om, &iso1(-1, 1)).unwrap(), ExtendedElement { omega, word: vec![] });
        let trivial = OmegaGroup::trivial(&d);
        assert!(matches!(
            decompose(&d, &trivial, &iso1(1, 1)),
            Err(ReflectionError::NotInOmega(_))
        ));
    }

    #[test]
    fn conjugation_examples() {
        let d = affine_a1();
        let om = omega_a1(&d);
        let w = om.find(&iso1(-1, 1)).unwrap();
        assert_eq!(conjugate_simple(&d, &om, w, 0), 1);
        assert_eq!(conjugate_simple(&d, &om, w, 1), 0);
        assert_eq!(conjugate_simple(&d, &om, OmegaElem::IDENTITY, 1), 1);
    }

    #[test]
    fn omega_validation() {
        let d = affine_a1();
        assert!(OmegaGroup::new(&d, vec![iso1(1, 1)], OmegaOrder::Finite(2)).is_err());
        assert!(OmegaGroup::new(&d, vec![iso1(-1, 1)], OmegaOrder::Finite(3)).is_err());
        assert!(OmegaGroup::new(&d, vec![iso1(-1, 1)], OmegaOrder::Infinite).is_err());
    }

    #[test]
    fn infinite_cyclic_omega() {
        // GL2-type extended affine A1 in two coordinates: walls x1 - x2 ∈ ℤ
        let fam = HyperplaneFamily::new(vec![int(1), int(-1)], int(0), int(1)).unwrap();
        let base = vec![rat(1, 3), int(0)];
        let arr = Arrangement::new(2, base.clone(), vec![(fam, true)]).unwrap();
        let d = chamber_walls(&arr, &InnerProduct::standard(2), &base).unwrap();
        assert_eq!(d.rank(), 2);
        // (x1, x2) ↦ (x2 + 1, x1)
        let swap = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]], 2, &int(0));
        let g = AffineIso::new(swap, vec![int(1), int(0)]).unwrap();
        let om = OmegaGroup::new(&d, vec![g.clone()], OmegaOrder::Infinite).unwrap();
        let g3 = g.pow(3).unwrap();
        assert_eq!(om.find(&g3), Some(OmegaElem(3)));
        let h = g3.compose(d.simple(0));
        let e = decompose(&d, &om, &h).unwrap();
        assert_eq!(e.omega, OmegaElem(3));
        assert_eq!(e.to_iso(&d, &om).unwrap(), h);
    }

    #[test]
    fn conjugacy_classes() {
        let d = affine_a1();
        assert_eq!(simple_conjugacy_classes(&d, None, 24), vec![vec![0], vec![1]]);
        let om = omega_a1(&d);
        assert_eq!(simple_conjugacy_classes(&d, Some(&om), 24), vec![vec![0, 1]]);
        let a2 = affine_a2();
        assert_eq!(simple_conjugacy_classes(&a2, None, 24), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn wall_condition_for_simple_reflections() {
        for d in [affine_a1(), affine_a2()] {
            for s in d.simple_reflections() {
                let sx = s.apply(d.base());
                assert_eq!(geometry::distance(d.arrangement(), d.base(), &sx, true).unwrap(), 1);
            }
        }
    }

    #[test]
    fn matsumoto_desk_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in [affine_a1(), affine_a2()] {
            for (g, w) in d.ball(6) {
                let words: Vec<Vec<usize>> = (0..4)
                    .map(|_| match d.reduced_word_with(&g, &mut |c| rng.gen_range(0..c.len())).unwrap() {
                        Walk::Word(v) => v,
                        other => panic!("unexpected {other:?}"),
                    })
                    .collect();
                for v in words {
                    assert_eq!(v.len(), w.len());
                    assert_eq!(d.word_iso(&v).unwrap(), g);
                }
            }
        }
    }

    #[test]
    fn length_matches_distance_and_is_subadditive() {
        let d = affine_a2();
        let ball = d.ball(4);
        for (g, w) in &ball {
            assert_eq!(d.length(g).unwrap(), w.len());
            assert_eq!(d.geometric_length(g).unwrap(), w.len());
        }
        for (g, _) in ball.iter().step_by(3) {
            for (h, _) in ball.iter().step_by(5) {
                let gh = g.compose(h);
                let (lg, lh, lgh) = (d.length(g).unwrap(), d.length(h).unwrap(), d.length(&gh).unwrap());
                assert!(lgh <= lg + lh);
                let additive = geometry::triangle_mode(
                    d.arrangement(),
                    d.base(),
                    &g.apply(d.base()),
                    &gh.apply(d.base()),
                )
                .unwrap()
                    == geometry::TriangleMode::Additive;
                assert_eq!(additive, lgh == lg + lh);
            }
        }
    }

    #[test]
    fn decompose_round_trip_on_random_products() {
        let d = affine_a1();
        let om = omega_a1(&d);
        let gens = [d.simple(0).clone(), d.simple(1).clone(), iso1(-1, 1)];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut g = AffineIso::identity(1);
            for _ in 0..rng.gen_range(0..8) {
                g = g.compose(&gens[rng.gen_range(0..3)]);
            }
            let e = decompose(&d, &om, &g).unwrap();
            assert_eq!(e.to_iso(&d, &om).unwrap(), g);
            assert_eq!(e.word.len(), d.geometric_length(&g).unwrap());
        }
        for t in om.elements().unwrap() {
            let moved = om.iso(t).apply(d.base());
            assert_eq!(geometry::distance(d.arrangement(), d.base(), &moved, true).unwrap(), 0);
        }
    }
}

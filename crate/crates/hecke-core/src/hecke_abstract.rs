//! The algebra `ℂ[Ω, μ] ⋉ H(W_aff, q)` on the basis `γ_t·𝕋_w`.
//!
//! The Coxeter part is abstracted by [`CoxeterSystem`], implemented both for
//! reflection groups of affine isometries and for finite Coxeter groups
//! given by tables. Ω acts on `W_aff` through a permutation of the simple
//! reflections, and the twist is a normalized 2-cocycle `μ`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;
use crate::reflections::{self, AffineIso, OmegaElem, OmegaGroup, ReflectionGroupData};
use crate::scalars::{self, CoeffPlusRule, Field, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HeckeError {
    Scalar(ScalarError),
    Reflection(reflections::ReflectionError),
    /// A parameter list whose length differs from the number of simple reflections.
    MissingParameter { expected: usize, got: usize },
    InvalidParameter { index: usize, reason: String },
    NotConstantOnClass(Vec<usize>),
    ClassNotRefining(Vec<usize>),
    InvalidCocycle(String),
    /// `μ(v,w)·μ(vw,u) ≠ μ(w,u)·μ(v,wu)`.
    CocycleViolation { v: OmegaElem, w: OmegaElem, u: OmegaElem },
    StarIncompatible { t1: OmegaElem, t2: OmegaElem },
    InvalidOmega(String),
    UnknownElement(String),
    TooLarge(usize),
    InfiniteOmega,
}

impl fmt::Display for HeckeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Scalar(e) => write!(f, "{e}"),
            Self::Reflection(e) => write!(f, "{e}"),
            Self::MissingParameter { expected, got } => {
                write!(f, "expected {expected} parameters q_s, got {got}")
            }
            Self::InvalidParameter { index, reason } => write!(f, "q_{index}: {reason}"),
            Self::NotConstantOnClass(c) => write!(f, "q is not constant on the class {c:?}"),
            Self::ClassNotRefining(c) => {
                write!(f, "declared class {c:?} is not inside a conjugacy class")
            }
            Self::InvalidCocycle(m) => write!(f, "invalid cocycle: {m}"),
            Self::CocycleViolation { v, w, u } => {
                write!(f, "cocycle identity fails at ({}, {}, {})", v.0, w.0, u.0)
            }
            Self::StarIncompatible { t1, t2 } => write!(
                f,
                "conj(mu({a}, {b})) differs from mu({b}^-1, {a}^-1)",
                a = t1.0,
                b = t2.0
            ),
            Self::InvalidOmega(m) => write!(f, "invalid length-zero group: {m}"),
            Self::UnknownElement(m) => write!(f, "unknown group element: {m}"),
            Self::TooLarge(n) => write!(f, "group exceeds {n} elements"),
            Self::InfiniteOmega => write!(f, "operation requires a finite length-zero group"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HeckeError {}

impl From<ScalarError> for HeckeError {
    fn from(e: ScalarError) -> Self {
        HeckeError::Scalar(e)
    }
}

impl From<reflections::ReflectionError> for HeckeError {
    fn from(e: reflections::ReflectionError) -> Self {
        HeckeError::Reflection(e)
    }
}

/// A Coxeter system `(W, S)` with exact element arithmetic.
pub trait CoxeterSystem {
    type Elem: Clone + Ord + fmt::Debug;

    fn rank(&self) -> usize;
    fn identity(&self) -> Self::Elem;
    fn simple(&self, i: usize) -> Self::Elem;
    /// `a·b`.
    fn compose(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Self::Elem;
    fn length(&self, a: &Self::Elem) -> Result<usize, HeckeError>;
    fn reduced_word(&self, a: &Self::Elem) -> Result<Vec<usize>, HeckeError>;

    fn from_word(&self, word: &[usize]) -> Self::Elem {
        word.iter()
            .fold(self.identity(), |acc, &i| self.compose(&acc, &self.simple(i)))
    }

    /// Elements of length at most `max_len`, by length.
    fn ball(&self, max_len: usize) -> Vec<Self::Elem> {
        let mut seen = BTreeSet::new();
        seen.insert(self.identity());
        let mut out = vec![self.identity()];
        let mut frontier = vec![self.identity()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for g in &frontier {
                for i in 0..self.rank() {
                    let h = self.compose(&self.simple(i), g);
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
            next.sort();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

impl CoxeterSystem for ReflectionGroupData {
    type Elem = AffineIso;

    fn rank(&self) -> usize {
        ReflectionGroupData::rank(self)
    }

    fn identity(&self) -> AffineIso {
        AffineIso::identity(self.dim())
    }

    fn simple(&self, i: usize) -> AffineIso {
        ReflectionGroupData::simple(self, i).clone()
    }

    fn compose(&self, a: &AffineIso, b: &AffineIso) -> AffineIso {
        a.compose(b)
    }

    fn invert(&self, a: &AffineIso) -> AffineIso {
        a.inverse().expect("isometries are invertible")
    }

    fn length(&self, a: &AffineIso) -> Result<usize, HeckeError> {
        Ok(self.geometric_length(a)?)
    }

    fn reduced_word(&self, a: &AffineIso) -> Result<Vec<usize>, HeckeError> {
        Ok(self.word_of(a)?)
    }
}

/// A finite Coxeter group stored as tables; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCoxeter {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    simple: Vec<usize>,
    words: Vec<Vec<usize>>,
}

impl FiniteCoxeter {
    /// The group with no simple reflections.
    pub fn trivial() -> FiniteCoxeter {
        FiniteCoxeter { mul: vec![vec![0]], inv: vec![0], simple: Vec::new(), words: vec![Vec::new()] }
    }

    /// Enumerates a finite Coxeter system, failing beyond `bound` elements.
    pub fn from_system<C: CoxeterSystem>(sys: &C, bound: usize) -> Result<FiniteCoxeter, HeckeError> {
        let mut index: BTreeMap<C::Elem, usize> = BTreeMap::new();
        let mut elems = vec![sys.identity()];
        let mut words = vec![Vec::new()];
        index.insert(sys.identity(), 0);
        let mut i = 0;
        while i < elems.len() {
            for s in 0..sys.rank() {
                let h = sys.compose(&sys.simple(s), &elems[i]);
                if !index.contains_key(&h) {
                    if elems.len() >= bound {
                        return Err(HeckeError::TooLarge(bound));
                    }
                    let mut w = vec![s];
                    w.extend(words[i].iter().copied());
                    index.insert(h.clone(), elems.len());
                    elems.push(h);
                    words.push(w);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut mul = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                mul[a][b] = index[&sys.compose(&elems[a], &elems[b])];
            }
        }
        let inv = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("group")).collect();
        let simple = (0..sys.rank()).map(|s| index[&sys.simple(s)]).collect();
        Ok(FiniteCoxeter { mul, inv, simple, words })
    }

    /// A finite group given by its table (identity 0) and the indices of
    /// its simple reflections; reduced words are found by breadth-first search.
    pub fn from_table(mul: Vec<Vec<usize>>, simple: Vec<usize>) -> Result<FiniteCoxeter, HeckeError> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) || simple.iter().any(|&s| s >= n) {
            return Err(HeckeError::InvalidOmega("malformed Coxeter table".into()));
        }
        for &s in &simple {
            if s == 0 || mul[s][s] != 0 {
                return Err(HeckeError::InvalidOmega(format!("generator {s} is not an involution")));
            }
        }
        let mut words: Vec<Option<Vec<usize>>> = vec![None; n];
        words[0] = Some(Vec::new());
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &g in &frontier {
                for (i, &s) in simple.iter().enumerate() {
                    let h = mul[s][g];
                    if words[h].is_none() {
                        let mut w = vec![i];
                        w.extend(words[g].as_ref().expect("visited").iter().copied());
                        words[h] = Some(w);
                        next.push(h);
                    }
                }
            }
            frontier = next;
        }
        let words: Option<Vec<Vec<usize>>> = words.into_iter().collect();
        let words = words.ok_or_else(|| HeckeError::InvalidOmega("generators do not generate the table".into()))?;
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mul[a][b] == 0).ok_or_else(|| HeckeError::InvalidOmega("missing inverse".into())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(FiniteCoxeter { mul, inv, simple, words })
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.order()
    }
}

impl CoxeterSystem for FiniteCoxeter {
    type Elem = usize;

    fn rank(&self) -> usize {
        self.simple.len()
    }

    fn identity(&self) -> usize {
        0
    }

    fn simple(&self, i: usize) -> usize {
        self.simple[i]
    }

    fn compose(&self, a: &usize, b: &usize) -> usize {
        self.mul[*a][*b]
    }

    fn invert(&self, a: &usize) -> usize {
        self.inv[*a]
    }

    fn length(&self, a: &usize) -> Result<usize, HeckeError> {
        Ok(self.words[*a].len())
    }

    fn reduced_word(&self, a: &usize) -> Result<Vec<usize>, HeckeError> {
        Ok(self.words[*a].clone())
    }
}

/// How Ω multiplies and how it permutes the simple reflections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OmegaAction {
    /// Elements `0..n`, 0 the identity; `perm[t][s]` is the index of `t s t⁻¹`.
    Finite { mul: Vec<Vec<usize>>, inv: Vec<usize>, perm: Vec<Vec<usize>> },
    /// `ℤ` generated by `ω`, acting by `perm` and its powers.
    Cyclic { perm: Vec<usize> },
}

fn compose_perm(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&i| a[i]).collect()
}

impl OmegaAction {
    pub fn trivial(rank: usize) -> OmegaAction {
        OmegaAction::Finite { mul: vec![vec![0]], inv: vec![0], perm: vec![(0..rank).collect()] }
    }

    /// A finite group table with an action by permutations; the identity
    /// must be element 0 and `perm` must be a homomorphism.
    pub fn finite(mul: Vec<Vec<usize>>, perm: Vec<Vec<usize>>) -> Result<OmegaAction, HeckeError> {
        let bad = |m: &str| HeckeError::InvalidOmega(m.into());
        let n = mul.len();
        if n == 0 || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(bad("table is not square"));
        }
        if (0..n).any(|a| mul[0][a] != a || mul[a][0] != a) {
            return Err(bad("element 0 is not the identity"));
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(bad("table is not associative"));
                    }
                }
            }
        }
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            inv.push((0..n).find(|&b| mul[a][b] == 0).ok_or_else(|| bad("missing inverse"))?);
        }
        if perm.len() != n {
            return Err(bad("one permutation per element is required"));
        }
        let rank = perm[0].len();
        for p in &perm {
            let set: BTreeSet<usize> = p.iter().copied().collect();
            if p.len() != rank || set.len() != rank || set.iter().any(|&i| i >= rank) {
                return Err(bad("not a permutation of the simple reflections"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if perm[mul[a][b]] != compose_perm(&perm[a], &perm[b]) {
                    return Err(bad("action is not a homomorphism"));
                }
            }
        }
        Ok(OmegaAction::Finite { mul, inv, perm })
    }

    /// The cyclic group `ℤ/n` acting trivially on `rank` simple reflections.
    pub fn cyclic_table(n: usize, rank: usize) -> OmegaAction {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let perm = vec![(0..rank).collect(); n];
        OmegaAction::finite(mul, perm).expect("cyclic table")
    }

    /// Ω read off from validated generators of a reflection group.
    pub fn from_group(data: &ReflectionGroupData, omega: &OmegaGroup) -> OmegaAction {
        match omega.elements() {
            Some(elems) => {
                let n = elems.len();
                let mul = (0..n)
                    .map(|a| (0..n).map(|b| omega.mul(elems[a], elems[b]).0 as usize).collect())
                    .collect();
                let inv = (0..n).map(|a| omega.inv(elems[a]).0 as usize).collect();
                let perm = elems.iter().map(|&t| omega.perm(data, t)).collect();
                OmegaAction::Finite { mul, inv, perm }
            }
            None => OmegaAction::Cyclic { perm: omega.perm(data, OmegaElem(1)) },
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, OmegaAction::Finite { .. })
    }

    /// Finite Ω only.
    pub fn elements(&self) -> Option<Vec<OmegaElem>> {
        match self {
            OmegaAction::Finite { mul, .. } => Some((0..mul.len() as i64).map(OmegaElem).collect()),
            OmegaAction::Cyclic { .. } => None,
        }
    }

    pub fn order(&self) -> Option<usize> {
        match self {
            OmegaAction::Finite { mul, .. } => Some(mul.len()),
            OmegaAction::Cyclic { .. } => None,
        }
    }

    pub fn contains(&self, t: OmegaElem) -> bool {
        match self {
            OmegaAction::Finite { mul, .. } => t.0 >= 0 && (t.0 as usize) < mul.len(),
            OmegaAction::Cyclic { .. } => true,
        }
    }

    pub fn mul(&self, a: OmegaElem, b: OmegaElem) -> OmegaElem {
        match self {
            OmegaAction::Finite { mul, .. } => OmegaElem(mul[a.0 as usize][b.0 as usize] as i64),
            OmegaAction::Cyclic { .. } => OmegaElem(a.0 + b.0),
        }
    }

    pub fn inv(&self, a: OmegaElem) -> OmegaElem {
        match self {
            OmegaAction::Finite { inv, .. } => OmegaElem(inv[a.0 as usize] as i64),
            OmegaAction::Cyclic { .. } => OmegaElem(-a.0),
        }
    }

    /// The permutation `s ↦ t s t⁻¹`.
    pub fn perm(&self, t: OmegaElem) -> Vec<usize> {
        match self {
            OmegaAction::Finite { perm, .. } => perm[t.0 as usize].clone(),
            OmegaAction::Cyclic { perm } => {
                let rank = perm.len();
                let step: Vec<usize> = if t.0 >= 0 {
                    perm.clone()
                } else {
                    let mut inv = vec![0; rank];
                    for (i, &j) in perm.iter().enumerate() {
                        inv[j] = i;
                    }
                    inv
                };
                let mut acc: Vec<usize> = (0..rank).collect();
                for _ in 0..t.0.unsigned_abs() {
                    acc = compose_perm(&step, &acc);
                }
                acc
            }
        }
    }

    /// A minimal-ish generating set, chosen greedily (finite Ω only).
    pub fn generators(&self) -> Option<Vec<OmegaElem>> {
        let elems = self.elements()?;
        let mut gens = Vec::new();
        let mut span: BTreeSet<OmegaElem> = BTreeSet::from([OmegaElem::IDENTITY]);
        for &e in &elems {
            if span.contains(&e) {
                continue;
            }
            gens.push(e);
            let mut frontier: Vec<OmegaElem> = span.iter().copied().collect();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if span.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        Some(gens)
    }
}

/// A normalized 2-cocycle on Ω.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Cocycle {
    Trivial,
    /// `μ(a, b) = table[a][b]` on finite Ω.
    Table(Vec<Vec<Scalar>>),
    /// `μ(ω^a, ω^b) = c^{ab}` on infinite cyclic Ω.
    Bicharacter(Scalar),
}

/// Triple window used to check identities on infinite cyclic Ω.
const CYCLIC_CHECK_WINDOW: i64 = 4;

impl Cocycle {
    pub fn eval(&self, field: &Field, a: OmegaElem, b: OmegaElem) -> Scalar {
        match self {
            Cocycle::Trivial => field.one(),
            Cocycle::Table(t) => t[a.0 as usize][b.0 as usize].clone(),
            Cocycle::Bicharacter(c) => c.pow(a.0 * b.0).expect("invertible bicharacter base"),
        }
    }

    /// Elements over which identities are checked: all of finite Ω, or a
    /// window of exponents for cyclic Ω.
    fn sample(omega: &OmegaAction) -> Vec<OmegaElem> {
        omega
            .elements()
            .unwrap_or_else(|| (-CYCLIC_CHECK_WINDOW..=CYCLIC_CHECK_WINDOW).map(OmegaElem).collect())
    }

    /// Checks shape, invertibility, normalization and the cocycle identity.
    pub fn validate(&self, field: &Field, omega: &OmegaAction) -> Result<(), HeckeError> {
        let bad = |m: String| HeckeError::InvalidCocycle(m);
        match (self, omega) {
            (Cocycle::Table(t), OmegaAction::Finite { mul, .. }) => {
                if t.len() != mul.len() || t.iter().any(|r| r.len() != mul.len()) {
                    return Err(bad("table shape differs from the group order".into()));
                }
                for r in t {
                    for v in r {
                        if v.field() != field {
                            return Err(HeckeError::Scalar(ScalarError::ContextMismatch));
                        }
                        if v.is_zero() {
                            return Err(bad("zero value".into()));
                        }
                    }
                }
            }
            (Cocycle::Table(_), OmegaAction::Cyclic { .. }) => {
                return Err(bad("tables need a finite group".into()));
            }
            (Cocycle::Bicharacter(c), _) => {
                if c.field() != field || c.is_zero() {
                    return Err(bad("bicharacter base must be a nonzero scalar of the field".into()));
                }
                if omega.is_finite() {
                    return Err(bad("bicharacters are for infinite cyclic groups".into()));
                }
            }
            (Cocycle::Trivial, _) => {}
        }
        let elems = Self::sample(omega);
        for &t in &elems {
            if !self.eval(field, OmegaElem::IDENTITY, t).is_one() || !self.eval(field, t, OmegaElem::IDENTITY).is_one() {
                return Err(bad(format!("not normalized at {}", t.0)));
            }
        }
        if let Some((v, w, u)) = cocycle_violation(field, omega, &|a, b| self.eval(field, a, b)) {
            return Err(HeckeError::CocycleViolation { v, w, u });
        }
        Ok(())
    }

    /// `conj(μ(t₁,t₂)) = μ(t₂⁻¹, t₁⁻¹)`, the condition under which `*` is an
    /// anti-involution.
    pub fn check_star_compatible(&self, field: &Field, omega: &OmegaAction) -> Result<(), HeckeError> {
        let elems = Self::sample(omega);
        for &a in &elems {
            for &b in &elems {
                let lhs = self.eval(field, a, b).conj();
                let rhs = self.eval(field, omega.inv(b), omega.inv(a));
                if lhs != rhs {
                    return Err(HeckeError::StarIncompatible { t1: a, t2: b });
                }
            }
        }
        Ok(())
    }
}

/// The first triple violating the cocycle identity for `mu`.
pub fn cocycle_violation(
    _field: &Field,
    omega: &OmegaAction,
    mu: &dyn Fn(OmegaElem, OmegaElem) -> Scalar,
) -> Option<(OmegaElem, OmegaElem, OmegaElem)> {
    let elems = Cocycle::sample(omega);
    for &v in &elems {
        for &w in &elems {
            for &u in &elems {
                let lhs = mu(v, w) * mu(omega.mul(v, w), u);
                let rhs = mu(w, u) * mu(v, omega.mul(w, u));
                if lhs != rhs {
                    return Some((v, w, u));
                }
            }
        }
    }
    None
}

/// Validates a cocycle, returning the first violating triple.
pub fn validate_cocycle(field: &Field, mu: &Cocycle, omega: &OmegaAction) -> Result<(), HeckeError> {
    mu.validate(field, omega)
}

/// The Hecke parameters `q_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeParams {
    q: Vec<Scalar>,
    classes: Vec<Vec<usize>>,
}

impl HeckeParams {
    /// Checks that each `q_s` is admissible and plus-selected, that `q` is
    /// constant on the conjugacy classes `computed`, and that every declared
    /// class lies inside one of them.
    pub fn new(
        q: Vec<Scalar>,
        declared: Vec<Vec<usize>>,
        computed: &[Vec<usize>],
        rule: &dyn CoeffPlusRule,
    ) -> Result<HeckeParams, HeckeError> {
        let rank: usize = computed.iter().map(Vec::len).sum();
        if q.len() != rank {
            return Err(HeckeError::MissingParameter { expected: rank, got: q.len() });
        }
        for (i, qs) in q.iter().enumerate() {
            let sel = scalars::coeffplus_select(rule, qs)
                .map_err(|e| HeckeError::InvalidParameter { index: i, reason: e.to_string() })?;
            if &sel != qs {
                return Err(HeckeError::InvalidParameter {
                    index: i,
                    reason: format!("{qs} is not plus-selected (use {sel})"),
                });
            }
        }
        for class in computed {
            if class.iter().any(|&s| q[s] != q[class[0]]) {
                return Err(HeckeError::NotConstantOnClass(class.clone()));
            }
        }
        for class in &declared {
            if !computed.iter().any(|c| class.iter().all(|s| c.contains(s))) {
                return Err(HeckeError::ClassNotRefining(class.clone()));
            }
        }
        Ok(HeckeParams { q, classes: declared })
    }

    /// Parameters without the plus-rule and class checks, for algebras built
    /// from computed data that is checked elsewhere.
    pub fn unchecked(q: Vec<Scalar>) -> HeckeParams {
        HeckeParams { q, classes: Vec::new() }
    }

    pub fn q(&self, s: usize) -> &Scalar {
        &self.q[s]
    }

    pub fn values(&self) -> &[Scalar] {
        &self.q
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }
}

/// A finitely supported combination of `γ_t·𝕋_w`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProductAlgElem<E: Ord> {
    terms: BTreeMap<(OmegaElem, E), Scalar>,
}

impl<E: Ord + Clone> ProductAlgElem<E> {
    pub fn zero() -> Self {
        ProductAlgElem { terms: BTreeMap::new() }
    }

    pub fn basis(t: OmegaElem, w: E, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(t, w, c);
        out
    }

    pub fn add_term(&mut self, t: OmegaElem, w: E, c: Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (t, w);
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v = &*v + &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OmegaElem, &E, &Scalar)> {
        self.terms.iter().map(|((t, w), c)| (t, w, c))
    }

    pub fn coeff(&self, t: OmegaElem, w: &E) -> Option<&Scalar> {
        self.terms.get(&(t, w.clone()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((t, w), c) in &other.terms {
            out.add_term(*t, w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero();
        for ((t, w), v) in &self.terms {
            out.add_term(*t, w.clone(), v * c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((t, w), c) in &other.terms {
            out.add_term(*t, w.clone(), -c);
        }
        out
    }
}

/// `ψ: Ω → 𝒞^×`, by value table (finite Ω) or generator value (cyclic Ω).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Character {
    Table(Vec<Scalar>),
    Cyclic(Scalar),
}

impl Character {
    pub fn eval(&self, t: OmegaElem) -> Scalar {
        match self {
            Character::Table(v) => v[t.0 as usize].clone(),
            Character::Cyclic(c) => c.pow(t.0).expect("invertible"),
        }
    }

    pub fn is_unit_valued(&self, omega: &OmegaAction) -> bool {
        Cocycle::sample(omega).iter().all(|&t| self.eval(t).abs2().is_one())
    }
}

type HeckeTerms<E> = BTreeMap<E, Scalar>;

/// Per-call memo for `𝕋_s · 𝕋_v` and lengths.
struct Memo<E: Ord> {
    products: BTreeMap<(usize, E), HeckeTerms<E>>,
    lengths: BTreeMap<E, usize>,
}

/// `ℂ[Ω, μ] ⋉ H(W_aff, q)` over a coefficient field.
#[derive(Clone, Debug)]
pub struct HeckeAlgebra<C: CoxeterSystem> {
    group: C,
    omega: OmegaAction,
    cocycle: Cocycle,
    params: HeckeParams,
    field: Field,
}

impl<C: CoxeterSystem> HeckeAlgebra<C> {
    pub fn new(group: C, omega: OmegaAction, cocycle: Cocycle, params: HeckeParams, field: Field) -> Result<Self, HeckeError> {
        if params.values().len() != group.rank() {
            return Err(HeckeError::MissingParameter { expected: group.rank(), got: params.values().len() });
        }
        if params.values().iter().any(|q| q.field() != &field) {
            return Err(HeckeError::Scalar(ScalarError::ContextMismatch));
        }
        match &omega {
            OmegaAction::Finite { perm, .. } if perm[0].len() != group.rank() => {
                return Err(HeckeError::InvalidOmega("permutation size differs from the rank".into()))
            }
            OmegaAction::Cyclic { perm } if perm.len() != group.rank() => {
                return Err(HeckeError::InvalidOmega("permutation size differs from the rank".into()))
            }
            _ => {}
        }
        for t in Cocycle::sample(&omega) {
            let p = omega.perm(t);
            for s in 0..group.rank() {
                if params.q(s) != params.q(p[s]) {
                    return Err(HeckeError::NotConstantOnClass(vec![s, p[s]]));
                }
            }
        }
        cocycle.validate(&field, &omega)?;
        Ok(HeckeAlgebra { group, omega, cocycle, params, field })
    }

    pub fn group(&self) -> &C {
        &self.group
    }

    pub fn omega(&self) -> &OmegaAction {
        &self.omega
    }

    pub fn cocycle(&self) -> &Cocycle {
        &self.cocycle
    }

    pub fn params(&self) -> &HeckeParams {
        &self.params
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn mu(&self, a: OmegaElem, b: OmegaElem) -> Scalar {
        self.cocycle.eval(&self.field, a, b)
    }

    pub fn one(&self) -> ProductAlgElem<C::Elem> {
        self.basis(OmegaElem::IDENTITY, self.group.identity())
    }

    pub fn basis(&self, t: OmegaElem, w: C::Elem) -> ProductAlgElem<C::Elem> {
        ProductAlgElem::basis(t, w, self.field.one())
    }

    /// `𝕋_w` for the element with the given word.
    pub fn t_word(&self, word: &[usize]) -> ProductAlgElem<C::Elem> {
        self.basis(OmegaElem::IDENTITY, self.group.from_word(word))
    }

    pub fn gamma(&self, t: OmegaElem) -> ProductAlgElem<C::Elem> {
        self.basis(t, self.group.identity())
    }

    /// `t w t⁻¹`.
    pub fn conjugate(&self, t: OmegaElem, w: &C::Elem) -> Result<C::Elem, HeckeError> {
        if t == OmegaElem::IDENTITY {
            return Ok(w.clone());
        }
        let p = self.omega.perm(t);
        let word: Vec<usize> = self.group.reduced_word(w)?.iter().map(|&s| p[s]).collect();
        Ok(self.group.from_word(&word))
    }

    fn length_memo(&self, memo: &mut Memo<C::Elem>, w: &C::Elem) -> Result<usize, HeckeError> {
        if let Some(&l) = memo.lengths.get(w) {
            return Ok(l);
        }
        let l = self.group.length(w)?;
        memo.lengths.insert(w.clone(), l);
        Ok(l)
    }

    fn ts_times(&self, memo: &mut Memo<C::Elem>, s: usize, v: &C::Elem) -> Result<HeckeTerms<C::Elem>, HeckeError> {
        if let Some(r) = memo.products.get(&(s, v.clone())) {
            return Ok(r.clone());
        }
        let sv = self.group.compose(&self.group.simple(s), v);
        let mut out = BTreeMap::new();
        if self.length_memo(memo, &sv)? > self.length_memo(memo, v)? {
            out.insert(sv, self.field.one());
        } else {
            let q = self.params.q(s);
            let qm1 = q - &self.field.one();
            if !qm1.is_zero() {
                out.insert(v.clone(), qm1);
            }
            out.insert(sv, q.clone());
        }
        memo.products.insert((s, v.clone()), out.clone());
        Ok(out)
    }

    /// `𝕋_u · x` for a Hecke-only combination `x`.
    fn tu_times(&self, memo: &mut Memo<C::Elem>, u: &C::Elem, x: HeckeTerms<C::Elem>) -> Result<HeckeTerms<C::Elem>, HeckeError> {
        let word = self.group.reduced_word(u)?;
        let mut cur = x;
        for &s in word.iter().rev() {
            let mut next: HeckeTerms<C::Elem> = BTreeMap::new();
            for (v, c) in &cur {
                for (w, d) in self.ts_times(memo, s, v)? {
                    let add = c * &d;
                    let entry = next.entry(w).or_insert_with(|| self.field.zero());
                    *entry = &*entry + &add;
                }
            }
            next.retain(|_, c| !c.is_zero());
            cur = next;
        }
        Ok(cur)
    }

    fn check_elem(&self, a: &ProductAlgElem<C::Elem>) -> Result<(), HeckeError> {
        for (t, _, c) in a.terms() {
            if c.field() != &self.field {
                return Err(HeckeError::Scalar(ScalarError::ContextMismatch));
            }
            if !self.omega.contains(*t) {
                return Err(HeckeError::UnknownElement(format!("omega {}", t.0)));
            }
        }
        Ok(())
    }

    /// The product, using
    /// `γ_t𝕋_u · γ_{t'}𝕋_v = μ(t,t')·γ_{tt'}·(𝕋_{t'⁻¹ u t'}·𝕋_v)`.
    pub fn mul(&self, a: &ProductAlgElem<C::Elem>, b: &ProductAlgElem<C::Elem>) -> Result<ProductAlgElem<C::Elem>, HeckeError> {
        self.check_elem(a)?;
        self.check_elem(b)?;
        let mut memo = Memo { products: BTreeMap::new(), lengths: BTreeMap::new() };
        let mut out = ProductAlgElem::zero();
        for (t, u, c) in a.terms() {
            for (t2, v, d) in b.terms() {
                let coeff = &(c * d) * &self.mu(*t, *t2);
                let u2 = self.conjugate(self.omega.inv(*t2), u)?;
                let prod = self.tu_times(&mut memo, &u2, BTreeMap::from([(v.clone(), self.field.one())]))?;
                let tt = self.omega.mul(*t, *t2);
                for (w, e) in prod {
                    out.add_term(tt, w, &coeff * &e);
                }
            }
        }
        Ok(out)
    }

    /// The conjugate-linear map `(γ_t𝕋_w)* = γ_{t⁻¹}𝕋_{t w⁻¹ t⁻¹}`; requires
    /// the compatibility of `μ` with conjugation.
    pub fn star(&self, a: &ProductAlgElem<C::Elem>) -> Result<ProductAlgElem<C::Elem>, HeckeError> {
        self.cocycle.check_star_compatible(&self.field, &self.omega)?;
        let mut out = ProductAlgElem::zero();
        for (t, w, c) in a.terms() {
            let w2 = self.conjugate(*t, &self.group.invert(w))?;
            out.add_term(self.omega.inv(*t), w2, c.conj());
        }
        Ok(out)
    }

    /// `γ_t𝕋_w ↦ χ(t)·γ_t𝕋_w`.
    pub fn psi_chi(&self, chi: &Character, a: &ProductAlgElem<C::Elem>) -> ProductAlgElem<C::Elem> {
        let mut out = ProductAlgElem::zero();
        for (t, w, c) in a.terms() {
            out.add_term(*t, w.clone(), c * &chi.eval(*t));
        }
        out
    }

    /// `𝕋_s² − (q_s−1)𝕋_s − q_s` for each `s`; all zero in a valid algebra.
    pub fn quadratic_defects(&self) -> Result<Vec<ProductAlgElem<C::Elem>>, HeckeError> {
        (0..self.group.rank())
            .map(|s| {
                let ts = self.t_word(&[s]);
                let sq = self.mul(&ts, &ts)?;
                let q = self.params.q(s);
                let rhs = ts.scale(&(q - &self.field.one())).add(&self.one().scale(q));
                Ok(sq.sub(&rhs))
            })
            .collect()
    }

    /// Basis elements `γ_t𝕋_w` with `ℓ(w) ≤ max_len`, over all of finite Ω
    /// or the given window for cyclic Ω.
    pub fn basis_ball(&self, max_len: usize) -> Vec<ProductAlgElem<C::Elem>> {
        let ws = self.group.ball(max_len);
        let mut out = Vec::new();
        for t in Cocycle::sample(&self.omega) {
            for w in &ws {
                out.push(self.basis(t, w.clone()));
            }
        }
        out
    }

    /// Exhaustive `(ab)c = a(bc)` over the given basis elements; returns the
    /// first failing triple by index.
    pub fn check_associativity(&self, basis: &[ProductAlgElem<C::Elem>]) -> Result<Option<(usize, usize, usize)>, HeckeError> {
        let mut pairs: BTreeMap<(usize, usize), ProductAlgElem<C::Elem>> = BTreeMap::new();
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                pairs.insert((i, j), self.mul(&basis[i], &basis[j])?);
            }
        }
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                let ab = &pairs[&(i, j)];
                for k in 0..basis.len() {
                    let left = self.mul(ab, &basis[k])?;
                    let right = self.mul(&basis[i], &pairs[&(j, k)])?;
                    if left != right {
                        return Ok(Some((i, j, k)));
                    }
                }
            }
        }
        Ok(None)
    }

    /// All reduced words of `w`.
    pub fn all_reduced_words(&self, w: &C::Elem) -> Result<Vec<Vec<usize>>, HeckeError> {
        let l = self.group.length(w)?;
        if l == 0 {
            return Ok(vec![Vec::new()]);
        }
        let mut out = Vec::new();
        for s in 0..self.group.rank() {
            let sw = self.group.compose(&self.group.simple(s), w);
            if self.group.length(&sw)? < l {
                for mut rest in self.all_reduced_words(&sw)? {
                    rest.insert(0, s);
                    out.push(rest);
                }
            }
        }
        Ok(out)
    }

    /// For every `w` with `ℓ(w) ≤ max_len` and every reduced word of `w`,
    /// checks that the product of the `𝕋_s` along the word is `𝕋_w`.
    /// Returns the first failing word.
    pub fn check_braid(&self, max_len: usize) -> Result<Option<Vec<usize>>, HeckeError> {
        for w in self.group.ball(max_len) {
            let target = self.basis(OmegaElem::IDENTITY, w.clone());
            for word in self.all_reduced_words(&w)? {
                let mut acc = self.one();
                for &s in &word {
                    acc = self.mul(&acc, &self.t_word(&[s]))?;
                }
                if acc != target {
                    return Ok(Some(word));
                }
            }
        }
        Ok(None)
    }

    /// For each simple reflection, the scalars `c` of `pool` for which
    /// `𝕋_s ↦ c·𝕋_s` preserves the quadratic relation.
    pub fn admissible_generator_scalars(&self, pool: &[Scalar]) -> Vec<Vec<Scalar>> {
        (0..self.group.rank())
            .map(|s| {
                let q = self.params.q(s);
                let qm1 = q - &self.field.one();
                pool.iter()
                    .filter(|c| {
                        // c²𝕋_s² = (q−1)c𝕋_s + q  ⟺  c²(q−1) = c(q−1) and c²q = q
                        let c2 = *c * *c;
                        &c2 * &qm1 == *c * &qm1 && &c2 * q == *q
                    })
                    .cloned()
                    .collect()
            })
            .collect()
    }

    /// All homomorphisms `Ω → pool^×` whose `Ψ_χ` is multiplicative on the
    /// basis elements of length at most `check_len`; with `star_preserving`
    /// only those with `|χ(t)| = 1`.
    pub fn support_preserving_autos(&self, pool: &[Scalar], star_preserving: bool, check_len: usize) -> Result<Vec<Character>, HeckeError> {
        let chars = homomorphisms(&self.omega, pool)?;
        let basis = self.basis_ball(check_len);
        let mut out = Vec::new();
        for chi in chars {
            if star_preserving && !chi.is_unit_valued(&self.omega) {
                continue;
            }
            for a in &basis {
                for b in &basis {
                    let lhs = self.psi_chi(&chi, &self.mul(a, b)?);
                    let rhs = self.mul(&self.psi_chi(&chi, a), &self.psi_chi(&chi, b))?;
                    if lhs != rhs {
                        return Err(HeckeError::InvalidCocycle(format!("Psi_chi not multiplicative for {chi:?}")));
                    }
                }
            }
            out.push(chi);
        }
        Ok(out)
    }
}

/// All homomorphisms from finite Ω into the nonzero elements of `pool`.
pub fn homomorphisms(omega: &OmegaAction, pool: &[Scalar]) -> Result<Vec<Character>, HeckeError> {
    let elems = omega.elements().ok_or(HeckeError::InfiniteOmega)?;
    let gens = omega.generators().expect("finite");
    let values: Vec<&Scalar> = pool.iter().filter(|c| !c.is_zero()).collect();
    let one = match values.first() {
        Some(v) => v.field().one(),
        None => return Ok(Vec::new()),
    };
    let mut out = BTreeSet::new();
    let mut choice = vec![0usize; gens.len()];
    loop {
        let mut table: Vec<Option<Scalar>> = vec![None; elems.len()];
        table[0] = Some(one.clone());
        let mut stack = vec![OmegaElem::IDENTITY];
        let mut ok = true;
        while let Some(x) = stack.pop() {
            let vx = table[x.0 as usize].clone().expect("assigned");
            for (gi, &g) in gens.iter().enumerate() {
                let y = omega.mul(x, g);
                let vy = &vx * values[choice[gi]];
                match &table[y.0 as usize] {
                    Some(old) if *old != vy => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        table[y.0 as usize] = Some(vy);
                        stack.push(y);
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            let vals: Vec<Scalar> = table.into_iter().map(|v| v.expect("generated")).collect();
            let hom = elems.iter().all(|&a| {
                elems.iter().all(|&b| vals[omega.mul(a, b).0 as usize] == &vals[a.0 as usize] * &vals[b.0 as usize])
            });
            if hom {
                out.insert(Character::Table(vals));
            }
        }
        // next choice
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out.into_iter().collect());
            }
            choice[i] += 1;
            if choice[i] < values.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Outcome of a coboundary search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoboundaryResult {
    /// `β` with `μ₁(s,t) = μ₂(s,t)·β(s)β(t)/β(st)`.
    Found(Vec<Scalar>),
    /// No `β` with values in the pool; inconclusive beyond it.
    NoneInPool,
}

/// Exhaustive backtracking search for `β: Ω → pool` relating two cocycles.
pub fn coboundary_search(field: &Field, mu1: &Cocycle, mu2: &Cocycle, omega: &OmegaAction, pool: &[Scalar]) -> Result<CoboundaryResult, HeckeError> {
    let n = omega.order().ok_or(HeckeError::InfiniteOmega)?;
    let values: Vec<Scalar> = pool.iter().filter(|c| !c.is_zero()).cloned().collect();
    let mut beta: Vec<Option<Scalar>> = vec![None; n];
    beta[0] = Some(field.one());
    let consistent = |beta: &[Option<Scalar>]| -> bool {
        for a in 0..n {
            for b in 0..n {
                let ab = omega.mul(OmegaElem(a as i64), OmegaElem(b as i64)).0 as usize;
                if let (Some(x), Some(y), Some(z)) = (&beta[a], &beta[b], &beta[ab]) {
                    let (ta, tb) = (OmegaElem(a as i64), OmegaElem(b as i64));
                    let lhs = &mu1.eval(field, ta, tb) * z;
                    let rhs = &(&mu2.eval(field, ta, tb) * x) * y;
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    };
    fn go(
        i: usize,
        n: usize,
        beta: &mut Vec<Option<Scalar>>,
        values: &[Scalar],
        consistent: &dyn Fn(&[Option<Scalar>]) -> bool,
    ) -> bool {
        if i == n {
            return true;
        }
        for v in values {
            beta[i] = Some(v.clone());
            if consistent(beta) && go(i + 1, n, beta, values, consistent) {
                return true;
            }
        }
        beta[i] = None;
        false
    }
    if !consistent(&beta) {
        return Ok(CoboundaryResult::NoneInPool);
    }
    if go(1, n, &mut beta, &values, &consistent) {
        Ok(CoboundaryResult::Found(beta.into_iter().map(|b| b.expect("filled")).collect()))
    } else {
        Ok(CoboundaryResult::NoneInPool)
    }
}

/// Dimension of the center of the twisted group algebra `ℂ[Ω, μ]`.
pub fn twisted_center_dimension(field: &Field, mu: &Cocycle, omega: &OmegaAction) -> Result<usize, HeckeError> {
    let n = omega.order().ok_or(HeckeError::InfiniteOmega)?;
    // x = Σ x_a γ_a commutes with γ_b: Σ_a x_a (μ(a,b) γ_{ab} − μ(b,a) γ_{ba}) = 0
    let mut rows = Vec::new();
    for b in 0..n {
        let tb = OmegaElem(b as i64);
        let mut block = vec![vec![field.zero(); n]; n];
        for a in 0..n {
            let ta = OmegaElem(a as i64);
            let ab = omega.mul(ta, tb).0 as usize;
            let ba = omega.mul(tb, ta).0 as usize;
            block[ab][a] = &block[ab][a] + &mu.eval(field, ta, tb);
            block[ba][a] = &block[ba][a] - &mu.eval(field, tb, ta);
        }
        rows.extend(block);
    }
    let m = Matrix::from_rows(rows, n, &field.zero());
    Ok(n - m.rank())
}

/// The cocycle `μ((a₁,a₂),(b₁,b₂)) = (−1)^{a₂b₁}` on `(ℤ/2)²` with
/// elements numbered `a₁ + 2a₂`, and its group table.
pub fn pauli_cocycle(field: &Field) -> (OmegaAction, Cocycle) {
    let mul: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
    let omega = OmegaAction::finite(mul, vec![Vec::new(); 4]).expect("Klein four group");
    let table = (0..4)
        .map(|a| (0..4).map(|b| if (a >> 1) & b & 1 == 1 { field.int(-1) } else { field.one() }).collect())
        .collect();
    (omega, Cocycle::Table(table))
}

/// Short text for a basis key, used in witnesses.
pub fn describe_key<C: CoxeterSystem>(group: &C, t: OmegaElem, w: &C::Elem) -> String {
    match group.reduced_word(w) {
        Ok(word) => format!("gamma_{} T{:?}", t.0, word),
        Err(_) => format!("gamma_{} {:?}", t.0, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Arrangement, HyperplaneFamily, InnerProduct};
    use crate::rational::{int, rat};
    use crate::reflections::{chamber_walls, OmegaOrder};
    use crate::rootdata::RootSystem;
    use crate::scalars::RealAboveOne;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn a1_data() -> ReflectionGroupData {
        let fam = HyperplaneFamily::new(vec![int(1)], int(0), int(1)).unwrap();
        let arr = Arrangement::new(1, vec![rat(1, 3)], vec![(fam, true)]).unwrap();
        chamber_walls(&arr, &InnerProduct::standard(1), &[rat(1, 3)]).unwrap()
    }

    fn omega_iso() -> AffineIso {
        AffineIso::new(Matrix::from_rows(vec![vec![int(-1)]], 1, &int(0)), vec![int(1)]).unwrap()
    }

    fn affine_a1(q0: i64, q1: i64) -> HeckeAlgebra<ReflectionGroupData> {
        let f = Field::rationals();
        let params = HeckeParams::new(vec![f.int(q0), f.int(q1)], vec![], &[vec![0], vec![1]], &RealAboveOne).unwrap();
        HeckeAlgebra::new(a1_data(), OmegaAction::trivial(2), Cocycle::Trivial, params, f).unwrap()
    }

    fn extended_a1() -> HeckeAlgebra<ReflectionGroupData> {
        let f = Field::new(4, None).unwrap();
        let data = a1_data();
        let om = OmegaGroup::new(&data, vec![omega_iso()], OmegaOrder::Finite(2)).unwrap();
        let action = OmegaAction::from_group(&data, &om);
        let mu = Cocycle::Table(vec![vec![f.one(), f.one()], vec![f.one(), f.int(-1)]]);
        let params = HeckeParams::new(vec![f.int(3), f.int(3)], vec![vec![0, 1]], &[vec![0, 1]], &RealAboveOne).unwrap();
        HeckeAlgebra::new(data, action, mu, params, f).unwrap()
    }

    fn finite(label: &str, q: i64) -> HeckeAlgebra<FiniteCoxeter> {
        let rs = RootSystem::parse(label).unwrap();
        let base = vec![rat(1, 3), rat(1, 5)];
        let arr = rs.finite_arrangement(base.clone()).unwrap();
        let d = chamber_walls(&arr, &rs.inner_product(), &base).unwrap();
        let fc = FiniteCoxeter::from_system(&d, 100).unwrap();
        let f = Field::rationals();
        let params = HeckeParams::unchecked(vec![f.int(q); 2]);
        HeckeAlgebra::new(fc, OmegaAction::trivial(2), Cocycle::Trivial, params, f).unwrap()
    }

    #[test]
    fn quadratic_relation_and_unit() {
        let h = affine_a1(2, 3);
        for d in h.quadratic_defects().unwrap() {
            assert!(d.is_zero());
        }
        let x = h.t_word(&[0, 1, 0]);
        assert_eq!(h.mul(&h.one(), &x).unwrap(), x);
        let f = h.field().clone();
        let ts = h.t_word(&[0]);
        let sq = h.mul(&ts, &ts).unwrap();
        assert_eq!(sq, ts.scale(&f.int(1)).add(&h.one().scale(&f.int(2))));
    }

    #[test]
    fn peeling_example() {
        let h = affine_a1(2, 3);
        let f = h.field().clone();
        let lhs = h.mul(&h.t_word(&[0]), &h.t_word(&[0, 1])).unwrap();
        let rhs = h.t_word(&[0, 1]).scale(&f.int(1)).add(&h.t_word(&[1]).scale(&f.int(2)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn gamma_commutation() {
        let h = extended_a1();
        let omega = OmegaElem(1);
        let lhs = h.mul(&h.gamma(omega), &h.t_word(&[0])).unwrap();
        assert_eq!(lhs, h.basis(omega, h.group().from_word(&[0])));
        let rhs = h.mul(&h.t_word(&[1]), &h.gamma(omega)).unwrap();
        assert_eq!(lhs, rhs);
        let sq = h.mul(&h.gamma(omega), &h.gamma(omega)).unwrap();
        assert_eq!(sq, h.one().scale(&h.field().int(-1)));
    }

    #[test]
    fn associativity_affine_a1() {
        let h = affine_a1(2, 3);
        let basis = h.basis_ball(3);
        assert_eq!(h.check_associativity(&basis).unwrap(), None);
        let e = extended_a1();
        let basis = e.basis_ball(2);
        assert_eq!(e.check_associativity(&basis).unwrap(), None);
    }

    #[test]
    fn finite_groups_associate_and_braid() {
        for label in ["A2", "B2"] {
            let h = finite(label, 2);
            let basis = h.basis_ball(2);
            assert_eq!(h.check_associativity(&basis).unwrap(), None, "{label}");
            assert_eq!(h.check_braid(6).unwrap(), None, "{label}");
        }
        let a2 = finite("A2", 2);
        let w0 = a2.group().from_word(&[0, 1, 0]);
        assert_eq!(a2.all_reduced_words(&w0).unwrap().len(), 2);
    }

    #[test]
    fn star_examples() {
        let h = extended_a1();
        let f = h.field().clone();
        let x = h.basis(OmegaElem(1), h.group().from_word(&[0]));
        assert_eq!(h.star(&x).unwrap(), h.basis(OmegaElem(1), h.group().from_word(&[1])));
        let c = &f.int(2) + &f.zeta();
        let cx = h.one().scale(&c);
        assert_eq!(h.star(&cx).unwrap(), h.one().scale(&c.conj()));
        assert_eq!(h.star(&h.t_word(&[0, 1])).unwrap(), h.t_word(&[1, 0]));
    }

    #[test]
    fn star_is_an_anti_involution() {
        let h = extended_a1();
        let f = h.field().clone();
        let basis = h.basis_ball(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let random = |rng: &mut ChaCha8Rng| {
            let mut x = ProductAlgElem::zero();
            for _ in 0..3 {
                let b = &basis[rng.gen_range(0..basis.len())];
                let c = &f.int(rng.gen_range(-3..4)) + &(&f.zeta() * &f.int(rng.gen_range(-2..3)));
                x = x.add(&b.scale(&c));
            }
            x
        };
        for _ in 0..20 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            assert_eq!(h.star(&h.star(&a).unwrap()).unwrap(), a);
            let lhs = h.star(&h.mul(&a, &b).unwrap()).unwrap();
            let rhs = h.mul(&h.star(&b).unwrap(), &h.star(&a).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn star_rejects_incompatible_cocycle() {
        let f = Field::new(4, None).unwrap();
        let (omega, _) = pauli_cocycle(&f);
        let i = f.zeta();
        // μ = dβ for β = (1, i, i, i): normalized, but not conjugation compatible
        let beta = [f.one(), i.clone(), i.clone(), i.clone()];
        let table = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| {
                        let ab = a ^ b;
                        (&(&beta[a] * &beta[b]) * &beta[ab].inv().unwrap()).clone()
                    })
                    .collect()
            })
            .collect();
        let mu = Cocycle::Table(table);
        mu.validate(&f, &omega).unwrap();
        assert!(mu.check_star_compatible(&f, &omega).is_err());
    }

    #[test]
    fn cocycle_examples() {
        let f = Field::rationals();
        let (omega, pauli) = pauli_cocycle(&f);
        assert!(validate_cocycle(&f, &pauli, &omega).is_ok());
        assert!(validate_cocycle(&f, &Cocycle::Trivial, &omega).is_ok());
        let z4 = OmegaAction::cyclic_table(4, 0);
        let mut table = vec![vec![f.one(); 4]; 4];
        table[1][1] = f.int(-1);
        assert!(matches!(
            validate_cocycle(&f, &Cocycle::Table(table), &z4),
            Err(HeckeError::CocycleViolation { .. })
        ));
    }

    #[test]
    fn pauli_is_not_a_coboundary() {
        let f = Field::new(4, None).unwrap();
        let (omega, pauli) = pauli_cocycle(&f);
        let pool = f.roots_of_unity();
        assert_eq!(coboundary_search(&f, &pauli, &Cocycle::Trivial, &omega, &pool).unwrap(), CoboundaryResult::NoneInPool);
        assert_eq!(twisted_center_dimension(&f, &pauli, &omega).unwrap(), 1);
        assert_eq!(twisted_center_dimension(&f, &Cocycle::Trivial, &omega).unwrap(), 4);
        match coboundary_search(&f, &pauli, &pauli, &omega, &pool).unwrap() {
            CoboundaryResult::Found(b) => assert!(b[0].is_one()),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coboundary_recovery() {
        let f = Field::new(4, None).unwrap();
        let omega = OmegaAction::cyclic_table(4, 0);
        let pool = f.roots_of_unity();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut beta: Vec<Scalar> = (0..4).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect();
        beta[0] = f.one();
        let table = (0..4)
            .map(|a| (0..4).map(|b| &(&beta[a] * &beta[b]) * &beta[(a + b) % 4].inv().unwrap()).collect())
            .collect();
        let mu1 = Cocycle::Table(table);
        match coboundary_search(&f, &mu1, &Cocycle::Trivial, &omega, &pool).unwrap() {
            CoboundaryResult::Found(b) => {
                for x in 0..4 {
                    for y in 0..4 {
                        let lhs = mu1.eval(&f, OmegaElem(x), OmegaElem(y));
                        let rhs = &(&b[x as usize] * &b[y as usize]) * &b[((x + y) % 4) as usize].inv().unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn autos_counts() {
        let q = Field::rationals();
        let h = HeckeAlgebra::new(FiniteCoxeter::trivial(), OmegaAction::cyclic_table(2, 0), Cocycle::Trivial, HeckeParams::unchecked(vec![]), q.clone()).unwrap();
        assert_eq!(h.support_preserving_autos(&q.roots_of_unity(), false, 0).unwrap().len(), 2);
        let t = HeckeAlgebra::new(FiniteCoxeter::trivial(), OmegaAction::trivial(0), Cocycle::Trivial, HeckeParams::unchecked(vec![]), q.clone()).unwrap();
        assert_eq!(t.support_preserving_autos(&q.roots_of_unity(), false, 0).unwrap().len(), 1);
        let f = Field::new(4, None).unwrap();
        let z4 = HeckeAlgebra::new(FiniteCoxeter::trivial(), OmegaAction::cyclic_table(4, 0), Cocycle::Trivial, HeckeParams::unchecked(vec![]), f.clone()).unwrap();
        let pool = f.roots_of_unity();
        assert_eq!(z4.support_preserving_autos(&pool, false, 0).unwrap().len(), 4);
        assert_eq!(z4.support_preserving_autos(&pool, true, 0).unwrap().len(), 4);
    }

    #[test]
    fn torsor_law_and_generator_scalars() {
        let h = extended_a1();
        let f = h.field().clone();
        let pool = f.roots_of_unity();
        let chars = h.support_preserving_autos(&pool, false, 1).unwrap();
        assert_eq!(chars.len(), 2);
        let basis = h.basis_ball(2);
        for a in &chars {
            for b in &chars {
                let (Character::Table(x), Character::Table(y)) = (a, b) else { unreachable!() };
                let prod = Character::Table(x.iter().zip(y).map(|(u, v)| u * v).collect());
                for e in &basis {
                    assert_eq!(h.psi_chi(a, &h.psi_chi(b, e)), h.psi_chi(&prod, e));
                }
            }
        }
        let minus = Character::Table(vec![f.one(), f.int(-1)]);
        let g = h.gamma(OmegaElem(1));
        assert_eq!(h.psi_chi(&minus, &g), g.scale(&f.int(-1)));
        assert_eq!(h.psi_chi(&minus, &h.psi_chi(&minus, &g)), g);
        for adm in h.admissible_generator_scalars(&pool) {
            assert_eq!(adm, vec![f.one()]);
        }
    }

    #[test]
    fn parameter_validation() {
        let f = Field::rationals();
        let classes = [vec![0, 1]];
        assert!(HeckeParams::new(vec![f.int(2), f.int(2)], vec![], &classes, &RealAboveOne).is_ok());
        assert!(matches!(
            HeckeParams::new(vec![f.int(2), f.int(3)], vec![], &classes, &RealAboveOne),
            Err(HeckeError::NotConstantOnClass(_))
        ));
        assert!(HeckeParams::new(vec![f.frac(1, 2), f.frac(1, 2)], vec![], &classes, &RealAboveOne).is_err());
        assert!(HeckeParams::new(vec![f.int(1), f.int(1)], vec![], &classes, &RealAboveOne).is_err());
        assert!(matches!(
            HeckeParams::new(vec![f.int(2)], vec![], &classes, &RealAboveOne),
            Err(HeckeError::MissingParameter { .. })
        ));
    }

    #[test]
    fn infinite_cyclic_omega_arithmetic() {
        let fam = HyperplaneFamily::new(vec![int(1), int(-1)], int(0), int(1)).unwrap();
        let base = vec![rat(1, 3), int(0)];
        let arr = Arrangement::new(2, base.clone(), vec![(fam, true)]).unwrap();
        let data = chamber_walls(&arr, &InnerProduct::standard(2), &base).unwrap();
        let swap = Matrix::from_rows(vec![vec![int(0), int(1)], vec![int(1), int(0)]], 2, &int(0));
        let g = AffineIso::new(swap, vec![int(1), int(0)]).unwrap();
        let om = OmegaGroup::new(&data, vec![g], OmegaOrder::Infinite).unwrap();
        let action = OmegaAction::from_group(&data, &om);
        let f = Field::rationals();
        let params = HeckeParams::unchecked(vec![f.int(2), f.int(2)]);
        let h = HeckeAlgebra::new(data, action, Cocycle::Bicharacter(f.int(-1)), params, f.clone()).unwrap();
        let w = h.gamma(OmegaElem(1));
        let lhs = h.mul(&w, &h.t_word(&[0])).unwrap();
        let rhs = h.mul(&h.t_word(&[1]), &w).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(h.mul(&w, &w).unwrap(), h.gamma(OmegaElem(2)).scale(&f.int(-1)));
        let basis: Vec<_> = h.basis_ball(1).into_iter().filter(|b| b.terms().all(|(t, _, _)| t.0.abs() <= 1)).collect();
        assert_eq!(h.check_associativity(&basis).unwrap(), None);
        assert!(h.support_preserving_autos(&f.roots_of_unity(), false, 0).is_err());
    }
}

//! Finite models of families of quasi-covers: intertwining operators,
//! the operators `c_{x,n}` and `Φ_{x,w}` attached to a family `𝒯 = {T_n}`,
//! the cocycle `μ_T`, relevance detection, normalization and the
//! comparison with the abstract algebra `ℂ[Ω, μ_T] ⋉ H(W_aff, q)`.
//!
//! Points are labeled by indices; distances come from an explicit table.
//! Lengths are read off at distance at most one from the base point, which
//! covers every rank-one model.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::finite_groups::{
    hom_space, solve_normalization, ConvolutionAlgebra, FinGroup, GroupError, HeckeFunc, IndSpace,
    QuadraticRelation, Rep, Subgroup,
};
use crate::hecke_abstract::{
    cocycle_violation, Cocycle, FiniteCoxeter, HeckeAlgebra, HeckeError, HeckeParams, OmegaAction,
    ProductAlgElem,
};
use crate::linalg::Matrix;
use crate::reflections::OmegaElem;
use crate::report::Report;
use crate::scalars::{CoeffPlusRule, Field, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverError {
    Group(Box<GroupError>),
    Hecke(Box<HeckeError>),
    Scalar(ScalarError),
    Invalid(String),
    UnknownPoint(String),
    NotInNheart(usize),
    MixedPrimes(Vec<u64>),
    /// Lengths are only resolved for translates at distance ≤ 1.
    Unsupported(String),
    NotAdjacent { x: usize, y: usize },
}

impl fmt::Display for CoverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Group(e) => write!(f, "{e}"),
            Self::Hecke(e) => write!(f, "{e}"),
            Self::Scalar(e) => write!(f, "{e}"),
            Self::Invalid(m) => write!(f, "invalid family: {m}"),
            Self::UnknownPoint(m) => write!(f, "unknown point {m}"),
            Self::NotInNheart(n) => write!(f, "element {n} is not in N"),
            Self::MixedPrimes(p) => write!(f, "indices involve several primes {p:?}"),
            Self::Unsupported(m) => write!(f, "unsupported: {m}"),
            Self::NotAdjacent { x, y } => write!(f, "points {x} and {y} are not at distance 1"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for CoverError {}

impl From<GroupError> for CoverError {
    fn from(e: GroupError) -> Self {
        CoverError::Group(Box::new(e))
    }
}

impl From<HeckeError> for CoverError {
    fn from(e: HeckeError) -> Self {
        CoverError::Hecke(Box::new(e))
    }
}

impl From<ScalarError> for CoverError {
    fn from(e: ScalarError) -> Self {
        CoverError::Scalar(e)
    }
}

/// `(K_x, K_{x,+}, θ_x, ρ_x)` for one point.
#[derive(Clone, Debug)]
pub struct PointData {
    pub name: String,
    pub k: Subgroup,
    pub k_plus: Subgroup,
    /// `θ_x` on `K_{x,+}`.
    pub theta: BTreeMap<usize, Scalar>,
    pub rho: Rep,
}

/// The Levi `M` (optional) and the pairs `(U, Ū)` of `𝒰(M)`.
#[derive(Clone, Debug)]
pub struct UnipotentData {
    pub levi: Option<Subgroup>,
    pub pairs: Vec<(Subgroup, Subgroup)>,
}

/// Input for [`CoverFamily::new`].
#[derive(Clone, Debug)]
pub struct CoverSpec {
    pub group: FinGroup,
    pub field: Field,
    pub points: Vec<PointData>,
    pub distance: Vec<Vec<usize>>,
    pub base: usize,
    pub levi: Subgroup,
    pub rho_m: Rep,
    pub unipotent: Option<UnipotentData>,
    /// Elements of `N♥` with their permutation of the points.
    pub nheart: Vec<(usize, Vec<usize>)>,
}

/// A finite family of quasi-cover candidates.
#[derive(Clone, Debug)]
pub struct CoverFamily {
    spec: CoverSpec,
    action: BTreeMap<usize, Vec<usize>>,
    class_of: BTreeMap<usize, usize>,
    lifts: Vec<usize>,
    wmul: Vec<Vec<usize>>,
    winv: Vec<usize>,
    waction: Vec<Vec<usize>>,
    prime: Option<u64>,
}

fn prime_factors(mut n: u64) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut d = 2;
    while d * d <= n {
        while n.is_multiple_of(d) {
            out.insert(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.insert(n);
    }
    out
}

/// Left coset representatives of `small` inside `big`.
fn coset_reps_in(group: &FinGroup, big: &Subgroup, small: &Subgroup) -> Vec<usize> {
    let mut seen = BTreeSet::new();
    let mut reps = Vec::new();
    for &k in big.elements() {
        if seen.contains(&k) {
            continue;
        }
        reps.push(k);
        for &i in small.elements() {
            seen.insert(group.mul(k, i));
        }
    }
    reps
}

fn add_vec(acc: &mut [Scalar], v: &[Scalar]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a = &*a + b;
    }
}

impl CoverFamily {
    /// Checks the structural data and derives `W♥ = N♥/(N♥∩K_M)`.
    pub fn new(spec: CoverSpec) -> Result<CoverFamily, CoverError> {
        let bad = |m: String| CoverError::Invalid(m);
        let np = spec.points.len();
        if np == 0 || spec.base >= np {
            return Err(bad("at least one point and a valid base point are required".into()));
        }
        if spec.distance.len() != np || spec.distance.iter().any(|r| r.len() != np) {
            return Err(bad("distance table must be square over the points".into()));
        }
        for x in 0..np {
            if spec.distance[x][x] != 0 {
                return Err(bad(format!("distance from {x} to itself is nonzero")));
            }
            for y in 0..np {
                if spec.distance[x][y] != spec.distance[y][x] {
                    return Err(bad(format!("distance table is not symmetric at ({x}, {y})")));
                }
            }
        }
        for p in &spec.points {
            if p.k.elements().iter().any(|&k| !p.rho.contains(k)) || p.rho.field() != &spec.field {
                return Err(bad(format!("rho at {} is not defined on K", p.name)));
            }
            if p.k_plus.elements().iter().any(|k| !p.theta.contains_key(k)) {
                return Err(bad(format!("theta at {} is not defined on K+", p.name)));
            }
        }
        if spec.levi.elements().iter().any(|&k| !spec.rho_m.contains(k)) {
            return Err(bad("rho_M is not defined on K_M".into()));
        }
        let group = &spec.group;
        let ns: Vec<usize> = spec.nheart.iter().map(|(n, _)| *n).collect();
        let nsub = group.subgroup(&ns).map_err(|_| bad("N is not a subgroup".into()))?;
        let mut action = BTreeMap::new();
        for (n, perm) in &spec.nheart {
            let set: BTreeSet<usize> = perm.iter().copied().collect();
            if perm.len() != np || set.len() != np || set.iter().any(|&i| i >= np) {
                return Err(bad(format!("action of {} is not a permutation", group.label(*n))));
            }
            action.insert(*n, perm.clone());
        }
        for &m in &ns {
            for &n in &ns {
                let mn = group.mul(m, n);
                let composed: Vec<usize> = (0..np).map(|x| action[&m][action[&n][x]]).collect();
                if action[&mn] != composed {
                    return Err(bad(format!("point action is not a homomorphism at ({m}, {n})")));
                }
            }
        }
        let nm = nsub.intersect(&spec.levi);
        if !nm.is_normal_in(group, &nsub) {
            return Err(bad("N ∩ K_M is not normal in N".into()));
        }
        let mut class_of = BTreeMap::new();
        let mut lifts = Vec::new();
        for &n in nsub.elements() {
            if class_of.contains_key(&n) {
                continue;
            }
            let c = lifts.len();
            lifts.push(n);
            for &k in nm.elements() {
                let nk = group.mul(n, k);
                if action[&nk] != action[&n] {
                    return Err(bad("N ∩ K_M does not act trivially on the points".into()));
                }
                class_of.insert(nk, c);
            }
        }
        let nw = lifts.len();
        let wmul: Vec<Vec<usize>> = (0..nw)
            .map(|a| (0..nw).map(|b| class_of[&group.mul(lifts[a], lifts[b])]).collect())
            .collect();
        let winv = (0..nw).map(|a| class_of[&group.inv(lifts[a])]).collect();
        let waction = lifts.iter().map(|n| action[n].clone()).collect();
        let mut primes = BTreeSet::new();
        for x in &spec.points {
            for y in &spec.points {
                let inter = x.k.intersect(&y.k).order();
                primes.extend(prime_factors((y.k.order() / inter) as u64));
                let inter_plus = x.k_plus.intersect(&y.k_plus).order();
                primes.extend(prime_factors((y.k_plus.order() / inter_plus) as u64));
            }
        }
        if primes.len() > 1 {
            return Err(CoverError::MixedPrimes(primes.into_iter().collect()));
        }
        let prime = primes.into_iter().next();
        Ok(CoverFamily { spec, action, class_of, lifts, wmul, winv, waction, prime })
    }

    pub fn group(&self) -> &FinGroup {
        &self.spec.group
    }

    pub fn field(&self) -> &Field {
        &self.spec.field
    }

    pub fn points(&self) -> &[PointData] {
        &self.spec.points
    }

    pub fn base(&self) -> usize {
        self.spec.base
    }

    pub fn prime(&self) -> Option<u64> {
        self.prime
    }

    pub fn levi(&self) -> &Subgroup {
        &self.spec.levi
    }

    pub fn rho_m(&self) -> &Rep {
        &self.spec.rho_m
    }

    pub fn point(&self, name: &str) -> Result<usize, CoverError> {
        self.spec.points.iter().position(|p| p.name == name).ok_or_else(|| CoverError::UnknownPoint(name.into()))
    }

    pub fn distance(&self, x: usize, y: usize) -> usize {
        self.spec.distance[x][y]
    }

    pub fn nheart(&self) -> Vec<usize> {
        self.action.keys().copied().collect()
    }

    /// `n·x`.
    pub fn act(&self, n: usize, x: usize) -> Result<usize, CoverError> {
        Ok(self.action.get(&n).ok_or(CoverError::NotInNheart(n))?[x])
    }

    /// Number of elements of `W♥`; class 0 is the identity.
    pub fn w_order(&self) -> usize {
        self.lifts.len()
    }

    pub fn lift(&self, w: usize) -> usize {
        self.lifts[w]
    }

    pub fn class_of(&self, n: usize) -> Result<usize, CoverError> {
        self.class_of.get(&n).copied().ok_or(CoverError::NotInNheart(n))
    }

    pub fn w_mul(&self, a: usize, b: usize) -> usize {
        self.wmul[a][b]
    }

    pub fn w_inv(&self, a: usize) -> usize {
        self.winv[a]
    }

    pub fn w_act(&self, w: usize, x: usize) -> usize {
        self.waction[w][x]
    }

    pub fn w_label(&self, w: usize) -> String {
        self.group().label(self.lifts[w])
    }

    pub fn ind(&self, x: usize) -> IndSpace<'_> {
        let p = &self.spec.points[x];
        IndSpace::new(&self.spec.group, &p.k, &p.rho).expect("checked at construction")
    }

    pub fn convolution_algebra(&self, x: usize) -> ConvolutionAlgebra<'_> {
        let p = &self.spec.points[x];
        ConvolutionAlgebra::new(&self.spec.group, &p.k, &p.rho).expect("checked at construction")
    }

    /// `|K_y / (K_x ∩ K_y)|`.
    pub fn index(&self, x: usize, y: usize) -> usize {
        let (kx, ky) = (&self.spec.points[x].k, &self.spec.points[y].k);
        ky.order() / kx.intersect(ky).order()
    }

    /// `n^{1/2}` for an index `n` that is a power of the family's prime.
    fn sqrt_index(&self, n: usize) -> Result<Scalar, CoverError> {
        if n == 1 {
            return Ok(self.field().one());
        }
        let p = self.prime.expect("indices > 1 have a prime");
        let mut e = 0i64;
        let mut m = n as u64;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e % 2 == 0 {
            return Ok(self.field().int((p as i64).pow((e / 2) as u32)));
        }
        if self.field().prime().map(u64::from) != Some(p) {
            return Err(CoverError::Scalar(ScalarError::NoPrime));
        }
        Ok(self.field().half_power_of_p(e)?)
    }

    fn theta_value(&self, x: usize, k: usize) -> Scalar {
        self.spec.points[x].theta[&k].clone()
    }

    /// `Θ_{y|x}`.
    pub fn theta_op(&self, x: usize, y: usize) -> Matrix<Scalar> {
        let group = self.group();
        let (px, py) = (&self.spec.points[x], &self.spec.points[y]);
        let inter = px.k_plus.intersect(&py.k_plus);
        let reps = coset_reps_in(group, &py.k_plus, &inter);
        let scale = self.field().frac(1, reps.len() as i64);
        let d = py.rho.dim();
        let (src, dst) = (self.ind(x), self.ind(y));
        dst.map_from(&src, |f, g| {
            let mut acc = vec![self.field().zero(); d];
            for &k in &reps {
                let v: Vec<Scalar> = f(group.mul(group.inv(k), g)).iter().map(|c| c * &self.theta_value(y, k)).collect();
                add_vec(&mut acc, &v);
            }
            acc.iter().map(|c| c * &scale).collect()
        })
    }

    /// `Θ_{y|x}` as an average over `K_y ∩ U` for a pair `(U, Ū)` nested as
    /// required, when unipotent data is present.
    pub fn theta_unipotent(&self, x: usize, y: usize) -> Option<Matrix<Scalar>> {
        let group = self.group();
        let (kx, ky) = (&self.spec.points[x].k, &self.spec.points[y].k);
        let uni = self.spec.unipotent.as_ref()?;
        let (u, _) = uni.pairs.iter().find(|(u, ub)| {
            kx.intersect(u).is_subgroup_of(&ky.intersect(u)) && ky.intersect(ub).is_subgroup_of(&kx.intersect(ub))
        })?;
        let kyu = ky.intersect(u);
        let scale = self.field().frac(1, kyu.order() as i64);
        let d = self.spec.points[y].rho.dim();
        let (src, dst) = (self.ind(x), self.ind(y));
        Some(dst.map_from(&src, |f, g| {
            let mut acc = vec![self.field().zero(); d];
            for &k in kyu.elements() {
                add_vec(&mut acc, &f(group.mul(group.inv(k), g)));
            }
            acc.iter().map(|c| c * &scale).collect()
        }))
    }

    /// `Θ^norm_{y|x} = |K_y/(K_x∩K_y)|^{1/2} Θ_{y|x}`.
    pub fn theta_norm(&self, x: usize, y: usize) -> Result<Matrix<Scalar>, CoverError> {
        Ok(self.theta_op(x, y).scale(&self.sqrt_index(self.index(x, y))?))
    }

    /// `(Θ_{x|y} ∘ Θ_{y|x})(f_v)(1)`.
    pub fn constant_term(&self, x: usize, y: usize, v: &[Scalar]) -> Vec<Scalar> {
        let src = self.ind(x);
        let composite = self.theta_op(y, x).mul(&self.theta_op(x, y));
        src.eval(&composite.apply(&src.f_v(v)), 0)
    }

    /// Whether `Θ_{x|y} ∘ Θ_{y|x}` is not a scalar.
    pub fn is_relevant(&self, x: usize, y: usize) -> Result<bool, CoverError> {
        if self.distance(x, y) != 1 {
            return Err(CoverError::NotAdjacent { x, y });
        }
        let composite = self.theta_op(y, x).mul(&self.theta_op(x, y));
        Ok(composite.scalar_multiple_of_identity().is_none())
    }

    /// `c_{x,n}: f ↦ (g ↦ T_n f(n⁻¹g))`.
    pub fn c_op(&self, t: &TFamily, x: usize, n: usize) -> Result<Matrix<Scalar>, CoverError> {
        let group = self.group();
        let nx = self.act(n, x)?;
        let tn = t.get(n).ok_or(CoverError::NotInNheart(n))?;
        let (src, dst) = (self.ind(x), self.ind(nx));
        Ok(dst.map_from(&src, |f, g| tn.apply(&f(group.mul(group.inv(n), g)))))
    }

    /// `Φ_{x,w} = c_{w⁻¹x, w} ∘ Θ^norm_{w⁻¹x|x}`.
    pub fn phi_op(&self, t: &TFamily, x: usize, w: usize) -> Result<Matrix<Scalar>, CoverError> {
        let y = self.w_act(self.w_inv(w), x);
        Ok(self.c_op(t, y, self.lifts[w])?.mul(&self.theta_norm(x, y)?))
    }

    /// `μ_T(m̄, n̄)` from `T_m T_n = μ T_{mn}`.
    pub fn mu_from_t(&self, t: &TFamily, m: usize, n: usize) -> Result<Scalar, CoverError> {
        let mn = self.group().mul(m, n);
        let lhs = t.get(m).ok_or(CoverError::NotInNheart(m))?.mul(t.get(n).ok_or(CoverError::NotInNheart(n))?);
        let rhs = t.get(mn).ok_or(CoverError::NotInNheart(mn))?;
        lhs.ratio_to(rhs).ok_or_else(|| CoverError::Invalid(format!("T_m T_n is not a multiple of T_mn at ({m}, {n})")))
    }

    /// `μ_T` on `W♥ × W♥`, through the chosen lifts.
    pub fn mu_table(&self, t: &TFamily) -> Result<Vec<Vec<Scalar>>, CoverError> {
        let nw = self.w_order();
        (0..nw)
            .map(|a| (0..nw).map(|b| self.mu_from_t(t, self.lifts[a], self.lifts[b])).collect())
            .collect()
    }

    /// `W♥` with its action on the simple reflections, as an abstract group.
    pub fn w_action(&self) -> OmegaAction {
        OmegaAction::finite(self.wmul.clone(), vec![Vec::new(); self.w_order()]).expect("W is a group")
    }

    /// Lengths, simple reflections, Ω and the decomposition `W♥ = Ω ⋉ W_Krel`.
    pub fn structure(&self) -> Result<WStructure, CoverError> {
        let x0 = self.base();
        let nw = self.w_order();
        let mut lengths = Vec::with_capacity(nw);
        for w in 0..nw {
            let y = self.w_act(self.w_inv(w), x0);
            lengths.push(match self.distance(x0, y) {
                0 => 0,
                1 => usize::from(self.is_relevant(x0, y)?),
                d => {
                    return Err(CoverError::Unsupported(format!(
                        "translate of the base point at distance {d}; finite models resolve lengths at distance <= 1"
                    )))
                }
            });
        }
        let simple: Vec<usize> = (0..nw).filter(|&w| lengths[w] == 1 && self.wmul[w][w] == 0).collect();
        let omega: Vec<usize> = (0..nw).filter(|&w| lengths[w] == 0).collect();
        let mut waff = vec![0usize];
        let mut i = 0;
        while i < waff.len() {
            for &s in &simple {
                let y = self.wmul[waff[i]][s];
                if !waff.contains(&y) {
                    waff.push(y);
                }
            }
            i += 1;
        }
        if waff.iter().any(|&v| v != 0 && omega.contains(&v)) || waff.len() * omega.len() != nw {
            return Err(CoverError::Unsupported("W is not the semidirect product of Omega and the reflection subgroup".into()));
        }
        let mut decomposition = vec![(0, 0); nw];
        for &t in &omega {
            for &v in &waff {
                decomposition[self.wmul[t][v]] = (t, v);
            }
        }
        let mut walls = Vec::new();
        for x in 0..self.points().len() {
            for y in x + 1..self.points().len() {
                if self.distance(x, y) == 1 && self.is_relevant(x, y)? {
                    walls.push((x, y));
                }
            }
        }
        Ok(WStructure { lengths, simple, omega, waff, decomposition, relevant_walls: walls })
    }

    /// Expansion of an endomorphism of `ind(ρ_{x₀})` in the basis `Φ_w`.
    pub fn expand(&self, basis: &[Matrix<Scalar>], m: &Matrix<Scalar>) -> Option<Vec<Scalar>> {
        let zero = self.field().zero();
        let n = m.rows() * m.cols();
        let rows: Vec<Vec<Scalar>> = (0..n).map(|i| basis.iter().map(|b| b.entries()[i].clone()).collect()).collect();
        let a = Matrix::from_rows(rows, basis.len(), &zero);
        a.solve(m.entries())
    }

    /// `⟨K_x, n⟩` for a lift `n`.
    pub fn wall_group(&self, x: usize, n: usize) -> Subgroup {
        let mut gens: Vec<usize> = self.spec.points[x].k.elements().to_vec();
        gens.push(n);
        self.group().generate(&gens)
    }

    /// The q-parameter of the wall group `⟨K_x, n⟩`.
    pub fn wall_q(&self, x: usize, n: usize, rule: &dyn CoeffPlusRule) -> Result<Scalar, CoverError> {
        let wall = self.wall_group(x, n);
        let sub_group = self.group().subgroup_as_group(&wall);
        let pos: BTreeMap<usize, usize> = wall.elements().iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let p = &self.spec.points[x];
        let k: Vec<usize> = p.k.elements().iter().map(|g| pos[g]).collect();
        let k = sub_group.subgroup(&k)?;
        let rho = p.rho.relabel(|g| pos.get(&g).copied());
        let alg = ConvolutionAlgebra::new(&sub_group, &k, &rho)?;
        Ok(alg.q_parameter(pos[&n], rule)?)
    }

    /// Rescales `T` so each simple `Φ_s` satisfies `Φ_s² = (q_s−1)Φ_s + q_s`
    /// and `Φ_{tw} = Φ_t Φ_{s₁} ⋯ Φ_{s_k}`; Ω-lifts keep their scaling.
    pub fn normalize_t(&self, t: &TFamily, rule: &dyn CoeffPlusRule) -> Result<(TFamily, Vec<WallNormalization>), CoverError> {
        let st = self.structure()?;
        let x0 = self.base();
        let mut t = t.clone();
        let id = Matrix::identity(self.ind(x0).dim(), &self.field().one());
        let mut records = Vec::new();
        for &s in &st.simple {
            let phi = self.phi_op(&t, x0, s)?;
            let coeffs = self
                .expand(&[phi.clone(), id.clone()], &phi.mul(&phi))
                .ok_or_else(|| CoverError::Invalid(format!("Phi_s^2 is not in the span of Phi_s and 1 for {}", self.w_label(s))))?;
            let relation = QuadraticRelation { a: coeffs[0].clone(), b: coeffs[1].clone() };
            let q = self.wall_q(x0, self.lifts[s], rule)?;
            let (d, q) = solve_normalization(&relation, &q, rule)?;
            t = t.scale_class(self, s, &d);
            records.push(WallNormalization { class: s, relation, d, q });
        }
        let cox = self.coxeter(&st)?;
        for w in 0..self.w_order() {
            let (tt, v) = st.decomposition[w];
            let word = crate::hecke_abstract::CoxeterSystem::reduced_word(&cox, &st.waff.iter().position(|&x| x == v).expect("in W_aff"))?;
            if word.len() + usize::from(tt != 0) < 2 {
                continue;
            }
            let mut prod = self.phi_op(&t, x0, tt)?;
            for &i in &word {
                prod = prod.mul(&self.phi_op(&t, x0, st.simple[i])?);
            }
            let current = self.phi_op(&t, x0, w)?;
            let r = prod
                .ratio_to(&current)
                .ok_or_else(|| CoverError::Invalid(format!("product along a reduced word is not a multiple of Phi_{}", self.w_label(w))))?;
            t = t.scale_class(self, w, &r);
        }
        Ok((t, records))
    }

    /// `W_Krel` as a finite Coxeter group on the simple reflections.
    pub fn coxeter(&self, st: &WStructure) -> Result<FiniteCoxeter, CoverError> {
        let pos: BTreeMap<usize, usize> = st.waff.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mul = st.waff.iter().map(|&a| st.waff.iter().map(|&b| pos[&self.wmul[a][b]]).collect()).collect();
        let simple = st.simple.iter().map(|s| pos[s]).collect();
        Ok(FiniteCoxeter::from_table(mul, simple)?)
    }

    /// Pass/fail for the family axioms.
    pub fn validate_family(&self) -> Report {
        let mut rep = Report::new();
        let group = self.group();
        let field = self.field();
        let pts = self.points();
        let rho_m = self.rho_m();
        let mut isotypic = None;
        let mut normal = None;
        let mut levi_in = None;
        let mut levi_rho = None;
        for p in pts {
            let theta = |k: usize| p.theta[&k].clone();
            if let Some(k) = p.rho.isotypic_violation(&p.k_plus, &theta) {
                isotypic.get_or_insert(format!("rho_{} at {} is not theta-isotypic", p.name, group.label(k)));
            }
            if !p.k_plus.is_subgroup_of(&p.k) || !p.k_plus.is_normal_in(group, &p.k) {
                normal.get_or_insert(format!("K_{},+ is not normal in K_{}", p.name, p.name));
            }
            if !self.levi().is_subgroup_of(&p.k) {
                levi_in.get_or_insert(format!("K_M is not inside K_{}", p.name));
            } else if let Some(&k) = self.levi().elements().iter().find(|&&k| p.rho.get(k) != rho_m.get(k)) {
                levi_rho.get_or_insert(format!("rho_{} differs from rho_M at {}", p.name, group.label(k)));
            }
        }
        rep.record("rho isotypic on K+", isotypic);
        rep.record("K+ normal in K", normal);
        rep.record("K_M inside every K_x", levi_in);
        rep.record("rho restricts to rho_M", levi_rho);
        let mut conj = None;
        for (&n, perm) in &self.action {
            for (x, p) in pts.iter().enumerate() {
                let q = &pts[perm[x]];
                if p.k.conjugate(group, n) != q.k || p.k_plus.conjugate(group, n) != q.k_plus {
                    conj.get_or_insert(format!("K_{{n x}} != n K_x n^-1 for n = {}, x = {}", group.label(n), p.name));
                }
            }
        }
        rep.record("N conjugates the K-pattern", conj);
        // the intertwining dimension between any two points equals dim End_{K_M}(rho_M)
        let end_m = hom_space(self.levi().elements(), rho_m, rho_m).len();
        let mut cover = None;
        for p in pts {
            for q in pts {
                let inter = p.k.intersect(&q.k);
                let d = hom_space(inter.elements(), &p.rho, &q.rho).len();
                if d != end_m {
                    cover.get_or_insert(format!("dim Hom(rho_{}, rho_{}) = {d}, dim End(rho_M) = {end_m}", p.name, q.name));
                }
            }
        }
        rep.record("cover intertwining dimensions", cover);
        match &self.spec.unipotent {
            None => rep.skip("Iwahori factorization", "no unipotent data"),
            Some(uni) => {
                let mut fact = None;
                let mut triv = None;
                let mut km = None;
                let mut plus_fact = None;
                let mut plus_levi: BTreeSet<Vec<usize>> = BTreeSet::new();
                for p in pts {
                    let km_mul = self.levi().elements().iter().flat_map(|&a| p.k_plus.elements().iter().map(move |&b| (a, b)));
                    let prod: BTreeSet<usize> = km_mul.map(|(a, b)| group.mul(a, b)).collect();
                    if prod.len() != p.k.order() {
                        km.get_or_insert(format!("K_{} != K_M K_{},+", p.name, p.name));
                    }
                    for (u, ub) in &uni.pairs {
                        let (ku, kub) = (p.k.intersect(u), p.k.intersect(ub));
                        let m_part = match &uni.levi {
                            Some(m) => p.k.intersect(m),
                            None => self.levi().clone(),
                        };
                        if iwahori_product(group, &ku, &m_part, &kub) != Some(p.k.order()) || m_part != *self.levi() {
                            fact.get_or_insert(format!("K_{} has no unique factorization for this pair", p.name));
                        }
                        if ku.elements().iter().chain(kub.elements()).any(|&k| !p.rho.get(k).scalar_multiple_of_identity().is_some_and(|c| c.is_one())) {
                            triv.get_or_insert(format!("rho_{} is nontrivial on a unipotent part", p.name));
                        }
                        let (pu, pub_) = (p.k_plus.intersect(u), p.k_plus.intersect(ub));
                        let pm = match &uni.levi {
                            Some(m) => p.k_plus.intersect(m),
                            None => p.k_plus.intersect(self.levi()),
                        };
                        plus_levi.insert(pm.elements().to_vec());
                        if iwahori_product(group, &pu, &pm, &pub_) != Some(p.k_plus.order()) {
                            plus_fact.get_or_insert(format!("K_{},+ has no factorization", p.name));
                        }
                    }
                }
                rep.record("Iwahori factorization", fact);
                rep.record("rho trivial on unipotent parts", triv);
                rep.record("K = K_M K+", km);
                if plus_levi.len() > 1 {
                    plus_fact.get_or_insert("K+ ∩ M depends on the point".into());
                }
                rep.record("K+ factorization", plus_fact);
                let mut nest = None;
                let np = pts.len();
                for x in 0..np {
                    for y in 0..np {
                        for z in 0..np {
                            if self.distance(x, y) + self.distance(y, z) != self.distance(x, z) {
                                continue;
                            }
                            let ok = uni.pairs.iter().any(|(u, ub)| {
                                let (kx, ky, kz) = (&pts[x].k, &pts[y].k, &pts[z].k);
                                kx.intersect(u).is_subgroup_of(&ky.intersect(u))
                                    && ky.intersect(u).is_subgroup_of(&kz.intersect(u))
                                    && kz.intersect(ub).is_subgroup_of(&ky.intersect(ub))
                                    && ky.intersect(ub).is_subgroup_of(&kx.intersect(ub))
                            });
                            if !ok {
                                nest.get_or_insert(format!("no nested pair for ({}, {}, {})", pts[x].name, pts[y].name, pts[z].name));
                            }
                        }
                    }
                }
                rep.record("unipotent nesting on additive triples", nest);
            }
        }
        let prime_ok = match self.prime {
            None => None,
            Some(p) if field.prime().map(u64::from) == Some(p) => None,
            Some(p) => Some(format!("indices are powers of {p} but the scalar field has prime {:?}", field.prime())),
        };
        rep.record("indices are powers of the field prime", prime_ok);
        rep
    }

    /// The intertwining set, its double cosets and their match with `W♥`.
    pub fn support_bijection_check(&self) -> Report {
        let mut rep = Report::new();
        let x0 = self.base();
        let alg = self.convolution_algebra(x0);
        let k = &self.points()[x0].k;
        let cosets = alg.intertwining_cosets();
        let group = self.group();
        let mut images: BTreeMap<usize, usize> = BTreeMap::new();
        let mut witness = None;
        for w in 0..self.w_order() {
            let n = self.lifts[w];
            let dc = group.double_coset(k, n, k);
            match cosets.iter().position(|(g, _)| dc.contains(g)) {
                Some(i) => {
                    if let Some(prev) = images.insert(i, w) {
                        witness.get_or_insert(format!("{} and {} give the same double coset", self.w_label(prev), self.w_label(w)));
                    }
                }
                None => {
                    witness.get_or_insert(format!("{} does not intertwine", self.w_label(w)));
                }
            }
        }
        if images.len() != cosets.len() {
            witness.get_or_insert(format!("{} intertwining double cosets but {} classes of W", cosets.len(), self.w_order()));
        }
        rep.record("double cosets of I(rho) match W", witness);
        let dims = cosets.iter().find(|(_, b)| b.len() != 1).map(|(g, b)| format!("{} intertwiner dimension {}", group.label(*g), b.len()));
        rep.record("graded pieces are one-dimensional", dims);
        rep
    }

    /// `c_w` with `φ_w* = c_w φ_{w⁻¹}`, and the checks on them.
    pub fn star_check(&self, t: &TFamily) -> Result<(Report, Vec<(usize, Scalar)>), CoverError> {
        let x0 = self.base();
        let alg = self.convolution_algebra(x0);
        let rho = &self.points()[x0].rho;
        let p = rho.invariant_form();
        let pinv = p.inverse().ok_or_else(|| CoverError::Invalid("invariant form is singular".into()))?;
        let group = self.group();
        let funcs: Vec<HeckeFunc> = (0..self.w_order())
            .map(|w| Ok(alg.from_end(&self.phi_op(t, x0, w)?)))
            .collect::<Result<_, CoverError>>()?;
        let star = |phi: &HeckeFunc| {
            let values = group
                .elements()
                .filter_map(|g| phi.get(group.inv(g)).map(|m| (g, pinv.mul(&m.conj_transpose()).mul(&p))))
                .collect();
            HeckeFunc::from_values(values)
        };
        let st = self.structure()?;
        let mut rep = Report::new();
        let mut scalars = Vec::new();
        let mut inv_fail = None;
        let mut simple_fail = None;
        let mut missing = None;
        for w in 0..self.w_order() {
            let s = star(&funcs[w]);
            match s.ratio_to(&funcs[self.w_inv(w)]) {
                Some(c) => {
                    if self.wmul[w][w] == 0 && !c.abs2().is_one() {
                        inv_fail.get_or_insert(format!("|c| != 1 for {}: c = {c}", self.w_label(w)));
                    }
                    if st.simple.contains(&w) && !c.is_one() {
                        simple_fail.get_or_insert(format!("c = {c} for {}", self.w_label(w)));
                    }
                    scalars.push((w, c));
                }
                None => {
                    missing.get_or_insert(format!("phi_{}^* is not a multiple of phi of the inverse", self.w_label(w)));
                }
            }
        }
        rep.record("star inverts supports", missing);
        rep.record("unit has c = 1", if scalars.first().is_some_and(|(_, c)| c.is_one()) { None } else { Some("c_1 != 1".into()) });
        rep.record("involutions have |c| = 1", inv_fail);
        rep.record("simple reflections have c = 1", simple_fail);
        Ok((rep, scalars))
    }

    /// Evaluates the operator identities of the model.
    pub fn relation_suite(&self, t: &TFamily) -> Result<Report, CoverError> {
        let mut rep = Report::new();
        let group = self.group();
        let np = self.points().len();
        let names = |x: usize| self.points()[x].name.clone();
        let st = self.structure()?;
        let x0 = self.base();
        rep.extend("T: ", t.validate(self));

        let mut equiv = None;
        let mut invertible = None;
        let mut unip = None;
        for x in 0..np {
            for y in 0..np {
                let th = self.theta_op(x, y);
                let (ix, iy) = (self.ind(x), self.ind(y));
                for h in group.elements() {
                    if th.mul(&ix.right_action(h)) != iy.right_action(h).mul(&th) {
                        equiv.get_or_insert(format!("Theta_{}|{} at {}", names(y), names(x), group.label(h)));
                        break;
                    }
                }
                if th.rows() != th.cols() || th.rank() != th.rows() {
                    invertible.get_or_insert(format!("Theta_{}|{} is not invertible", names(y), names(x)));
                }
                if let Some(u) = self.theta_unipotent(x, y) {
                    if u != th {
                        unip.get_or_insert(format!("unipotent form differs for Theta_{}|{}", names(y), names(x)));
                    }
                }
            }
        }
        rep.record("Theta equivariance", equiv);
        rep.record("Theta invertible", invertible);
        if self.spec.unipotent.is_some() {
            rep.record("Theta unipotent form", unip);
        }

        let mut trans = None;
        let mut trans_norm = None;
        for x in 0..np {
            for y in 0..np {
                for z in 0..np {
                    if self.distance(x, y) + self.distance(y, z) != self.distance(x, z) {
                        continue;
                    }
                    if self.theta_op(y, z).mul(&self.theta_op(x, y)) != self.theta_op(x, z) {
                        trans.get_or_insert(format!("({}, {}, {})", names(x), names(y), names(z)));
                    }
                    if self.theta_norm(y, z)?.mul(&self.theta_norm(x, y)?) != self.theta_norm(x, z)? {
                        trans_norm.get_or_insert(format!("({}, {}, {})", names(x), names(y), names(z)));
                    }
                }
            }
        }
        rep.record("Theta transitivity", trans);
        rep.record("normalized Theta transitivity", trans_norm);

        let mut commute = None;
        let mut ctrans = None;
        let mut lift_ind = None;
        let mu = self.mu_table(t)?;
        let ns = self.nheart();
        for &n in &ns {
            for x in 0..np {
                let cx = self.c_op(t, x, n)?;
                for y in 0..np {
                    let (nx, ny) = (self.act(n, x)?, self.act(n, y)?);
                    let lhs = self.theta_op(nx, ny).mul(&cx);
                    let rhs = self.c_op(t, y, n)?.mul(&self.theta_op(x, y));
                    let lhs_n = self.theta_norm(nx, ny)?.mul(&cx);
                    let rhs_n = self.c_op(t, y, n)?.mul(&self.theta_norm(x, y)?);
                    if lhs != rhs || lhs_n != rhs_n {
                        commute.get_or_insert(format!("n = {}, x = {}, y = {}", group.label(n), names(x), names(y)));
                    }
                }
                for &m in &ns {
                    let lhs = self.c_op(t, self.act(n, x)?, m)?.mul(&cx);
                    let c = &mu[self.class_of(m)?][self.class_of(n)?];
                    let rhs = self.c_op(t, x, group.mul(m, n))?.scale(c);
                    if lhs != rhs {
                        ctrans.get_or_insert(format!("m = {}, n = {}, x = {}", group.label(m), group.label(n), names(x)));
                    }
                }
                let lifted = self.c_op(t, x, self.lifts[self.class_of(n)?])?;
                if cx != lifted {
                    lift_ind.get_or_insert(format!("c_x,n depends on the lift {}", group.label(n)));
                }
            }
        }
        rep.record("Theta-c commutation", commute);
        rep.record("c transitivity up to mu_T", ctrans);
        rep.record("c depends only on the class in W", lift_ind);

        let nw = self.w_order();
        let phis: Vec<Matrix<Scalar>> = (0..nw).map(|w| self.phi_op(t, x0, w)).collect::<Result<_, _>>()?;
        let mut additive = None;
        for v in 0..nw {
            for w in 0..nw {
                let vw = self.wmul[v][w];
                if st.lengths[vw] != st.lengths[v] + st.lengths[w] {
                    continue;
                }
                if phis[v].mul(&phis[w]) != phis[vw].scale(&mu[v][w]) {
                    additive.get_or_insert(format!("Phi_{} Phi_{}", self.w_label(v), self.w_label(w)));
                }
            }
        }
        rep.record("Phi_v Phi_w = mu_T(v,w) Phi_vw on length-additive pairs", additive);

        let mut sq = None;
        for &s in &st.simple {
            let y = self.w_act(s, x0);
            let rhs = self.theta_norm(y, x0)?.mul(&self.theta_norm(x0, y)?).scale(&mu[s][s]);
            if phis[s].mul(&phis[s]) != rhs {
                sq.get_or_insert(format!("Phi_{}^2", self.w_label(s)));
            }
        }
        rep.record("Phi_s^2 = mu_T(s,s) Theta Theta", sq);

        let mut index_sym = None;
        let mut relevance = None;
        for x in 0..np {
            for y in 0..np {
                let d = self.distance(x, y);
                let rel_zero = d == 0 || (d == 1 && !self.is_relevant(x, y)?);
                if rel_zero && self.index(x, y) != self.index(y, x) {
                    index_sym.get_or_insert(format!("({}, {})", names(x), names(y)));
                }
                if d == 1 {
                    let r = self.is_relevant(x, y)?;
                    if r != self.is_relevant(y, x)? {
                        relevance.get_or_insert(format!("({}, {}) is not symmetric", names(x), names(y)));
                    }
                    for &n in &ns {
                        if self.is_relevant(self.act(n, x)?, self.act(n, y)?)? != r {
                            relevance.get_or_insert(format!("({}, {}) moved by {}", names(x), names(y), group.label(n)));
                        }
                    }
                }
            }
        }
        rep.record("index symmetry at relevant distance 0", index_sym);
        rep.record("relevance is independent of the witness pair", relevance);

        // closed form of φ_w at its lift and its support
        let alg = self.convolution_algebra(x0);
        let k = &self.points()[x0].k;
        let mut closed = None;
        for w in 0..nw {
            let n = self.lifts[w];
            let phi = alg.from_end(&phis[w]);
            let wx = self.w_act(w, x0);
            let idx = {
                let (kx, kw) = (&self.points()[x0].k, &self.points()[wx].k);
                kx.order() / kx.intersect(kw).order()
            };
            let want = t.get(n).expect("lift").scale(&self.sqrt_index(idx)?.inv()?);
            if phi.get(n) != Some(&want) || phi.support() != group.double_coset(k, n, k) {
                closed.get_or_insert(format!("phi_{}", self.w_label(w)));
            }
        }
        rep.record("phi_w closed form and support", closed);

        let omega = self.w_action();
        let witness = cocycle_violation(self.field(), &omega, &|a, b| mu[a.0 as usize][b.0 as usize].clone())
            .map(|(v, w, u)| format!("({}, {}, {})", self.w_label(v.0 as usize), self.w_label(w.0 as usize), self.w_label(u.0 as usize)));
        rep.record("mu_T is a 2-cocycle", witness);
        rep.extend("", self.support_bijection_check());
        Ok(rep)
    }

    /// The structure theorem at model scale.
    pub fn structure_report(&self, t: &TFamily, rule: &dyn CoeffPlusRule) -> Result<StructureReport, CoverError> {
        let mut checks = Report::new();
        checks.extend("family: ", self.validate_family());
        let (t, normalization) = self.normalize_t(t, rule)?;
        let st = self.structure()?;
        let x0 = self.base();
        let field = self.field().clone();
        let mu = self.mu_table(&t)?;
        // Ω as its own group, identity first
        let opos: BTreeMap<usize, usize> = st.omega.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let apos: BTreeMap<usize, usize> = st.waff.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        let omul: Vec<Vec<usize>> = st.omega.iter().map(|&a| st.omega.iter().map(|&b| opos[&self.wmul[a][b]]).collect()).collect();
        let perm: Vec<Vec<usize>> = st
            .omega
            .iter()
            .map(|&o| {
                st.simple
                    .iter()
                    .map(|&s| {
                        let c = self.wmul[self.wmul[o][s]][self.winv[o]];
                        st.simple.iter().position(|&x| x == c).expect("Omega permutes simple reflections")
                    })
                    .collect()
            })
            .collect();
        let omega = OmegaAction::finite(omul, perm)?;
        let mu_omega = Cocycle::Table(st.omega.iter().map(|&a| st.omega.iter().map(|&b| mu[a][b].clone()).collect()).collect());
        let cox = self.coxeter(&st)?;
        let q: Vec<Scalar> = st
            .simple
            .iter()
            .map(|s| normalization.iter().find(|r| r.class == *s).expect("normalized").q.clone())
            .collect();
        let target = HeckeAlgebra::new(cox, omega, mu_omega, HeckeParams::unchecked(q.clone()), field.clone())?;

        let nw = self.w_order();
        let phis: Vec<Matrix<Scalar>> = (0..nw).map(|w| self.phi_op(&t, x0, w)).collect::<Result<_, _>>()?;
        let to_target = |w: usize| {
            let (tt, v) = st.decomposition[w];
            ProductAlgElem::basis(OmegaElem(opos[&tt] as i64), apos[&v], field.one())
        };
        let mut products = None;
        for a in 0..nw {
            for b in 0..nw {
                let model = self.expand(&phis, &phis[a].mul(&phis[b]));
                let Some(coeffs) = model else {
                    products.get_or_insert(format!("Phi_{} Phi_{} is outside the span", self.w_label(a), self.w_label(b)));
                    continue;
                };
                let mut transported = ProductAlgElem::zero();
                for (c, coeff) in coeffs.iter().enumerate() {
                    transported = transported.add(&to_target(c).scale(coeff));
                }
                if target.mul(&to_target(a), &to_target(b))? != transported {
                    products.get_or_insert(format!("Phi_{} Phi_{}", self.w_label(a), self.w_label(b)));
                }
            }
        }
        checks.record("basis map transports all products", products);
        let mut braid = None;
        for (i, &v) in st.waff.iter().enumerate() {
            for word in target.all_reduced_words(&i)? {
                let mut prod = Matrix::identity(phis[0].rows(), &field.one());
                for &s in &word {
                    prod = prod.mul(&phis[st.simple[s]]);
                }
                if prod != phis[v] {
                    braid.get_or_insert(format!("reduced word {word:?}"));
                }
            }
        }
        checks.record("Phi along reduced words", braid);
        let mut qcheck = None;
        for r in &normalization {
            let q_again = self.wall_q(x0, self.lifts[r.class], rule)?;
            if q_again != r.q || !crate::scalars::coeffplus_select(rule, &r.q).is_ok_and(|x| x == r.q) {
                qcheck.get_or_insert(format!("q for {}", self.w_label(r.class)));
            }
        }
        checks.record("q_s plus-selected and equal to the wall-group value", qcheck);
        let infinite = if st.simple.is_empty() { "no relevant walls" } else { "finite reflection subgroup" };
        checks.skip("infinitely many parallel walls", format!("vacuous in model: {infinite}"));
        Ok(StructureReport {
            walls: st.relevant_walls.clone(),
            simple: st.simple.clone(),
            omega: st.omega.clone(),
            waff_order: st.waff.len(),
            q: st.simple.iter().copied().zip(q).collect(),
            mu_omega: st.omega.iter().map(|&a| st.omega.iter().map(|&b| mu[a][b].clone()).collect()).collect(),
            normalization,
            t,
            checks,
        })
    }
}

/// `|A|·|B|·|C|` when `A·B·C` has unique factorization, i.e. when the
/// number of distinct products equals the product of the orders.
fn iwahori_product(group: &FinGroup, a: &Subgroup, b: &Subgroup, c: &Subgroup) -> Option<usize> {
    let mut set = BTreeSet::new();
    for &x in a.elements() {
        for &y in b.elements() {
            for &z in c.elements() {
                set.insert(group.mul(group.mul(x, y), z));
            }
        }
    }
    let n = a.order() * b.order() * c.order();
    (set.len() == n).then_some(n)
}

/// Lengths and the decomposition of `W♥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WStructure {
    pub lengths: Vec<usize>,
    pub simple: Vec<usize>,
    pub omega: Vec<usize>,
    /// Elements of `W_Krel`, identity first.
    pub waff: Vec<usize>,
    /// `w = t·v` as `(t, v)`.
    pub decomposition: Vec<(usize, usize)>,
    pub relevant_walls: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallNormalization {
    pub class: usize,
    /// `Φ_s² = aΦ_s + b` before rescaling.
    pub relation: QuadraticRelation,
    pub d: Scalar,
    pub q: Scalar,
}

#[derive(Clone, Debug)]
pub struct StructureReport {
    pub walls: Vec<(usize, usize)>,
    pub simple: Vec<usize>,
    pub omega: Vec<usize>,
    pub waff_order: usize,
    pub q: Vec<(usize, Scalar)>,
    pub mu_omega: Vec<Vec<Scalar>>,
    pub normalization: Vec<WallNormalization>,
    pub t: TFamily,
    pub checks: Report,
}

/// `𝒯 = {T_n}` for `n ∈ N♥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TFamily {
    values: BTreeMap<usize, Matrix<Scalar>>,
}

impl TFamily {
    /// `T_{w̃·k} = T_w ρ_M(k)` from one matrix per class of `W♥`, attached to
    /// the chosen lift `w̃`.
    pub fn from_class_values(fam: &CoverFamily, per_class: &[Matrix<Scalar>]) -> Result<TFamily, CoverError> {
        if per_class.len() != fam.w_order() {
            return Err(CoverError::Invalid(format!("expected {} matrices, got {}", fam.w_order(), per_class.len())));
        }
        let group = fam.group();
        let mut values = BTreeMap::new();
        for n in fam.nheart() {
            let c = fam.class_of(n)?;
            let k = group.mul(group.inv(fam.lift(c)), n);
            values.insert(n, per_class[c].mul(fam.rho_m().get(k)));
        }
        Ok(TFamily { values })
    }

    /// Identity matrices on every chosen lift.
    pub fn standard(fam: &CoverFamily) -> TFamily {
        let d = fam.rho_m().dim();
        let id = Matrix::identity(d, &fam.field().one());
        TFamily::from_class_values(fam, &vec![id; fam.w_order()]).expect("sizes match")
    }

    pub fn get(&self, n: usize) -> Option<&Matrix<Scalar>> {
        self.values.get(&n)
    }

    pub fn values(&self) -> &BTreeMap<usize, Matrix<Scalar>> {
        &self.values
    }

    /// Multiplies `T_n` by `c` for every lift of the class `w`.
    pub fn scale_class(&self, fam: &CoverFamily, w: usize, c: &Scalar) -> TFamily {
        let values = self
            .values
            .iter()
            .map(|(&n, m)| (n, if fam.class_of(n) == Ok(w) { m.scale(c) } else { m.clone() }))
            .collect();
        TFamily { values }
    }

    /// `T_1 = id`, `T_{nk} = T_n ρ_M(k)` and `T_n ∈ Hom_{K_M}(^nρ_M, ρ_M)`, nonzero.
    pub fn validate(&self, fam: &CoverFamily) -> Report {
        let mut rep = Report::new();
        let group = fam.group();
        let rho_m = fam.rho_m();
        let id = Matrix::identity(rho_m.dim(), &fam.field().one());
        rep.record("T_1 is the identity", if self.values.get(&0) == Some(&id) { None } else { Some("T_1 != id".into()) });
        let km: Vec<usize> = fam.levi().elements().iter().copied().filter(|k| self.values.contains_key(k)).collect();
        let mut equiv = None;
        let mut hom = None;
        let mut zero = None;
        for (&n, tn) in &self.values {
            if tn.is_zero() {
                zero.get_or_insert(format!("T_{} = 0", group.label(n)));
            }
            for &k in &km {
                if self.values.get(&group.mul(n, k)) != Some(&tn.mul(rho_m.get(k))) {
                    equiv.get_or_insert(format!("T_nk != T_n rho_M(k) at n = {}, k = {}", group.label(n), group.label(k)));
                }
            }
            for &k in fam.levi().elements() {
                let c = group.conj(group.inv(n), k);
                if fam.levi().contains(c) && tn.mul(rho_m.get(c)) != rho_m.get(k).mul(tn) {
                    hom.get_or_insert(format!("T_{} does not intertwine at {}", group.label(n), group.label(k)));
                }
            }
        }
        rep.record("T_nk = T_n rho_M(k)", equiv);
        rep.record("T_n intertwines", hom);
        rep.record("T_n nonzero", zero);
        rep
    }
}

/// Shipped finite models.
pub mod models {
    use super::*;

    /// `(K_x, K_y) = (B, B̄)` in `GL₂(F_q)` with `K_{±,+}` the unipotent radicals,
    /// `K_M = T`, `N♥` the monomial matrices and `ρ_M` given by its values on
    /// the torus.
    pub fn gl2_cover(q: i64, field: &Field, rho_m: impl Fn(&[i64]) -> Scalar) -> Result<CoverFamily, CoverError> {
        let group = FinGroup::gl2(q)?;
        let (b, bb) = (group.borel(true)?, group.borel(false)?);
        let (u, ub) = (group.unipotent(true)?, group.unipotent(false)?);
        let torus = group.torus()?;
        let chi = |g: usize| rho_m(group.key(g));
        let rho_t = Rep::character(&torus, field, chi);
        rho_t.validate(&group)?;
        // extend to B and B̄ through the projections onto the torus
        let diag = |g: usize| {
            let k = group.key(g);
            group.find(&[k[0], 0, 0, k[3]]).expect("diagonal part")
        };
        let rho_b = Rep::character(&b, field, |g| chi(diag(g)));
        let rho_bb = Rep::character(&bb, field, |g| chi(diag(g)));
        rho_b.validate(&group)?;
        rho_bb.validate(&group)?;
        let trivial_on = |s: &Subgroup| s.elements().iter().map(|&k| (k, field.one())).collect();
        let points = vec![
            PointData { name: "x".into(), k: b.clone(), k_plus: u.clone(), theta: trivial_on(&u), rho: rho_b },
            PointData { name: "y".into(), k: bb.clone(), k_plus: ub.clone(), theta: trivial_on(&ub), rho: rho_bb },
        ];
        let w = group.find(&[0, 1, 1, 0]).expect("Weyl element");
        let intertwines = torus.elements().iter().all(|&t| chi(group.conj(w, t)) == chi(t));
        let n_elems = if intertwines { group.monomial()? } else { torus.clone() };
        let nheart = n_elems
            .elements()
            .iter()
            .map(|&n| {
                let k = group.key(n);
                let swap = k[0] == 0;
                (n, if swap { vec![1, 0] } else { vec![0, 1] })
            })
            .collect();
        CoverFamily::new(CoverSpec {
            group: group.clone(),
            field: field.clone(),
            points,
            distance: vec![vec![0, 1], vec![1, 0]],
            base: 0,
            levi: torus.clone(),
            rho_m: rho_t,
            unipotent: Some(UnipotentData { levi: Some(torus), pairs: vec![(u.clone(), ub.clone()), (ub, u)] }),
            nheart,
        })
    }

    /// `GL₂(F₂)` with trivial representations, over `ℚ(√2)` (or `ℚ(ζ_n)(√2)`).
    pub fn gl2f2(field: &Field) -> Result<CoverFamily, CoverError> {
        gl2_cover(2, field, |_| field.one())
    }

    /// `GL₂(F₃)` with `ρ_M` trivial on the torus of order 4.
    pub fn gl2f3(field: &Field) -> Result<CoverFamily, CoverError> {
        gl2_cover(3, field, |_| field.one())
    }

    /// `GL₂(F₃)` with `ρ_M(diag(a, d)) = λ(a)`, `λ` the sign of `F₃^×`.
    pub fn gl2f3_generic(field: &Field) -> Result<CoverFamily, CoverError> {
        gl2_cover(3, field, |k| if k[0] == 2 { field.int(-1) } else { field.one() })
    }

    /// One point with `K = K_M` the center of `D₄`, `ρ_M` faithful and `N♥ = D₄`,
    /// so `W♥ = Ω ≅ (ℤ/2)²` with a nontrivial `μ_T`.
    pub fn pauli(field: &Field) -> Result<CoverFamily, CoverError> {
        let group = FinGroup::dihedral(4);
        let center = group.generate(&[group.find(&[2, 0]).expect("r^2")]);
        let rho = Rep::character(&center, field, |g| if g == 0 { field.one() } else { field.int(-1) });
        rho.validate(&group)?;
        let trivial = group.trivial_subgroup();
        let points = vec![PointData {
            name: "x".into(),
            k: center.clone(),
            k_plus: trivial,
            theta: BTreeMap::from([(0, field.one())]),
            rho: rho.clone(),
        }];
        let nheart = group.elements().map(|n| (n, vec![0])).collect();
        CoverFamily::new(CoverSpec {
            group: group.clone(),
            field: field.clone(),
            points,
            distance: vec![vec![0]],
            base: 0,
            levi: center,
            rho_m: rho,
            unipotent: None,
            nheart,
        })
    }

    /// `K_x = K_y = B` in `GL₂(F₂)`: two points that never see a wall.
    pub fn gl2f2_equal_points(field: &Field) -> Result<CoverFamily, CoverError> {
        let group = FinGroup::gl2(2)?;
        let b = group.borel(true)?;
        let u = group.unipotent(true)?;
        let triv = Rep::trivial(&b, field);
        let theta: BTreeMap<usize, Scalar> = u.elements().iter().map(|&k| (k, field.one())).collect();
        let p = |name: &str| PointData { name: name.into(), k: b.clone(), k_plus: u.clone(), theta: theta.clone(), rho: triv.clone() };
        CoverFamily::new(CoverSpec {
            group: group.clone(),
            field: field.clone(),
            points: vec![p("x"), p("y")],
            distance: vec![vec![0, 1], vec![1, 0]],
            base: 0,
            levi: group.trivial_subgroup(),
            rho_m: Rep::trivial(&group.trivial_subgroup(), field),
            unipotent: None,
            nheart: vec![(0, vec![0, 1])],
        })
    }
}

#[cfg(test)]
mod tests {
    use super::models::*;
    use super::*;
    use crate::hecke_abstract::{coboundary_search, pauli_cocycle, twisted_center_dimension, CoboundaryResult};
    use crate::scalars::RealAboveOne;

    fn q_sqrt2() -> Field {
        Field::new(1, Some(2)).unwrap()
    }

    fn q_sqrt3() -> Field {
        Field::new(1, Some(3)).unwrap()
    }

    #[test]
    fn gl2f2_validates() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        let rep = fam.validate_family();
        assert!(rep.all_pass(), "{rep}");
        assert_eq!(fam.w_order(), 2);
        assert_eq!(fam.prime(), Some(2));
        let sb = fam.support_bijection_check();
        assert!(sb.all_pass(), "{sb}");
    }

    #[test]
    fn constant_terms() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        assert_eq!(fam.constant_term(0, 1, &[f.one()]), vec![f.frac(1, 2)]);
        let f3 = q_sqrt3();
        let fam = gl2f3(&f3).unwrap();
        assert_eq!(fam.constant_term(0, 1, &[f3.int(5)]), vec![f3.frac(5, 3)]);
    }

    #[test]
    fn theta_basics() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        let n = fam.ind(0).dim();
        assert_eq!(fam.theta_op(0, 0), Matrix::identity(n, &f.one()));
        assert_eq!(fam.theta_norm(1, 1).unwrap(), Matrix::identity(n, &f.one()));
        assert!(fam.is_relevant(0, 1).unwrap());
        assert_eq!(fam.theta_unipotent(0, 1), Some(fam.theta_op(0, 1)));
        // Θ^norm∘Θ^norm has eigenvalues 2 and 2λ with λ the nontrivial eigenvalue of Θ∘Θ
        let raw = fam.theta_op(1, 0).mul(&fam.theta_op(0, 1));
        let norm = fam.theta_norm(1, 0).unwrap().mul(&fam.theta_norm(0, 1).unwrap());
        assert_eq!(norm, raw.scale(&f.int(2)));
        let id = Matrix::identity(n, &f.one());
        // eigenvalue 1 on the trivial constituent, 1/2 − ... computed exactly
        assert_eq!(raw.sub(&id).rank(), 2);
        assert!(!fam.constant_term(0, 1, &[f.one()]).is_empty());
        let eq = gl2f2_equal_points(&f).unwrap();
        assert!(!eq.is_relevant(0, 1).unwrap());
    }

    #[test]
    fn generic_character_is_not_relevant() {
        let f = q_sqrt3();
        let fam = gl2f3_generic(&f).unwrap();
        assert!(!fam.is_relevant(0, 1).unwrap());
        let n = fam.ind(0).dim();
        let comp = fam.theta_norm(1, 0).unwrap().mul(&fam.theta_norm(0, 1).unwrap());
        assert_eq!(comp, Matrix::identity(n, &f.one()));
        assert_eq!(fam.w_order(), 1);
        assert!(fam.validate_family().all_pass());
    }

    #[test]
    fn phi_and_normalization_gl2f2() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        let t = TFamily::standard(&fam);
        assert!(t.validate(&fam).all_pass());
        let n = fam.ind(0).dim();
        let id = Matrix::identity(n, &f.one());
        assert_eq!(fam.phi_op(&t, 0, 0).unwrap(), id);
        let s = 1;
        let phi = fam.phi_op(&t, 0, s).unwrap();
        let r2 = f.sqrt_p().unwrap();
        assert_eq!(phi.mul(&phi), phi.scale(&r2.inv().unwrap()).add(&id));
        let (tn, rec) = fam.normalize_t(&t, &RealAboveOne).unwrap();
        assert_eq!(rec[0].d, r2);
        assert_eq!(rec[0].q, f.int(2));
        let phi = fam.phi_op(&tn, 0, s).unwrap();
        assert_eq!(phi.mul(&phi), phi.add(&id.scale(&f.int(2))));
        let (again, _) = fam.normalize_t(&tn, &RealAboveOne).unwrap();
        assert_eq!(again, tn);
        // the c operator of the Weyl element with T = id
        let w = fam.lift(1);
        let c = fam.c_op(&t, 0, w).unwrap();
        assert_eq!(c.mul(&fam.c_op(&t, 1, w).unwrap()), id);
        assert_eq!(fam.mu_from_t(&t, w, w).unwrap(), f.one());
    }

    #[test]
    fn gl2f3_q_is_three() {
        let f = q_sqrt3();
        let fam = gl2f3(&f).unwrap();
        assert!(fam.validate_family().all_pass());
        let t = TFamily::standard(&fam);
        let (_, rec) = fam.normalize_t(&t, &RealAboveOne).unwrap();
        assert_eq!(rec[0].q, f.int(3));
        let sb = fam.support_bijection_check();
        assert!(sb.all_pass(), "{sb}");
    }

    #[test]
    fn relation_suites_pass() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        let (t, _) = fam.normalize_t(&TFamily::standard(&fam), &RealAboveOne).unwrap();
        let rep = fam.relation_suite(&t).unwrap();
        assert!(rep.all_pass(), "{rep}");
        let f3 = q_sqrt3();
        let fam = gl2f3(&f3).unwrap();
        let rep = fam.relation_suite(&TFamily::standard(&fam)).unwrap();
        assert!(rep.all_pass(), "{rep}");
    }

    #[test]
    fn corrupted_theta_is_detected() {
        let f = q_sqrt3();
        let fam = gl2f3(&f).unwrap();
        let mut spec = fam.spec.clone();
        // a nontrivial character on K_{y,+} = Ū while ρ_y stays trivial
        let g = spec.group.clone();
        let f3 = f.clone();
        spec.points[1].theta = spec.points[1]
            .k_plus
            .elements()
            .iter()
            .map(|&k| (k, if g.key(k)[2] == 0 { f3.one() } else { f3.int(-1) }))
            .collect();
        let bad = CoverFamily::new(spec).unwrap();
        let rep = bad.validate_family();
        assert_eq!(rep.get("rho isotypic on K+").unwrap().status, crate::report::Status::Fail);
        let rel = bad.relation_suite(&TFamily::standard(&bad));
        if let Ok(r) = rel { assert!(!r.all_pass()) }
    }

    #[test]
    fn n_not_normalizing_is_detected() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        let mut spec = fam.spec.clone();
        // claim the Weyl element fixes both points
        for (_, perm) in spec.nheart.iter_mut() {
            *perm = vec![0, 1];
        }
        let bad = CoverFamily::new(spec).unwrap();
        let rep = bad.validate_family();
        assert_eq!(rep.get("N conjugates the K-pattern").unwrap().status, crate::report::Status::Fail);
    }

    #[test]
    fn star_scalars() {
        let f = Field::new(4, Some(2)).unwrap();
        let fam = gl2f2(&f).unwrap();
        let (t, _) = fam.normalize_t(&TFamily::standard(&fam), &RealAboveOne).unwrap();
        let (rep, cs) = fam.star_check(&t).unwrap();
        assert!(rep.all_pass(), "{rep}");
        assert!(cs.iter().all(|(_, c)| c.is_one()));
        let twisted = t.scale_class(&fam, 1, &f.zeta());
        let (rep, cs) = fam.star_check(&twisted).unwrap();
        assert!(!rep.all_pass());
        assert_eq!(cs[1].1, f.int(-1));
        assert!(cs[1].1.abs2().is_one());
    }

    #[test]
    fn pauli_model_cocycle() {
        let f = Field::new(4, None).unwrap();
        let fam = pauli(&f).unwrap();
        assert!(fam.validate_family().all_pass());
        assert_eq!(fam.w_order(), 4);
        let t = TFamily::standard(&fam);
        let mu = fam.mu_table(&t).unwrap();
        let omega = fam.w_action();
        let cocycle = Cocycle::Table(mu.clone());
        cocycle.validate(&f, &omega).unwrap();
        assert_eq!(twisted_center_dimension(&f, &cocycle, &omega).unwrap(), 1);
        // cohomologous to the Pauli cocycle after matching the groups
        let (pomega, pmu) = pauli_cocycle(&f);
        assert_eq!(omega.order(), pomega.order());
        let all_isos = permutations(4);
        let found = all_isos.iter().any(|p| {
            if p[0] != 0 {
                return false;
            }
            let hom = (0..4).all(|a| (0..4).all(|b| p[fam.w_mul(a, b)] == (p[a] ^ p[b])));
            if !hom {
                return false;
            }
            let pulled = Cocycle::Table((0..4).map(|a| (0..4).map(|b| pmu.eval(&f, OmegaElem(p[a] as i64), OmegaElem(p[b] as i64))).collect()).collect());
            matches!(coboundary_search(&f, &cocycle, &pulled, &omega, &f.roots_of_unity()), Ok(CoboundaryResult::Found(_)))
        });
        assert!(found);
        // rescaling T by β changes μ_T by the coboundary of β
        let beta = [f.one(), f.zeta(), f.int(-1), f.zeta()];
        let mut scaled = t.clone();
        for (w, b) in beta.iter().enumerate().skip(1) {
            scaled = scaled.scale_class(&fam, w, b);
        }
        let mu2 = fam.mu_table(&scaled).unwrap();
        for a in 0..4 {
            for b in 0..4 {
                let ab = fam.w_mul(a, b);
                assert_eq!(mu2[a][b], &(&mu[a][b] * &(&beta[a] * &beta[b])) * &beta[ab].inv().unwrap());
            }
        }
        let rep = fam.relation_suite(&t).unwrap();
        assert!(rep.all_pass(), "{rep}");
        let sr = fam.structure_report(&t, &RealAboveOne).unwrap();
        assert_eq!(sr.omega.len(), 4);
        assert!(sr.checks.all_pass(), "{}", sr.checks);
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..=p.len() {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }

    #[test]
    fn structure_reports() {
        let f = q_sqrt2();
        let fam = gl2f2(&f).unwrap();
        let sr = fam.structure_report(&TFamily::standard(&fam), &RealAboveOne).unwrap();
        assert!(sr.checks.all_pass(), "{}", sr.checks);
        assert_eq!(sr.q, vec![(1, f.int(2))]);
        assert_eq!(sr.omega, vec![0]);
        assert_eq!(sr.waff_order, 2);
        let f3 = q_sqrt3();
        let fam = gl2f3(&f3).unwrap();
        let sr = fam.structure_report(&TFamily::standard(&fam), &RealAboveOne).unwrap();
        assert!(sr.checks.all_pass(), "{}", sr.checks);
        assert_eq!(sr.q[0].1, f3.int(3));
    }

    #[test]
    fn trivial_single_point_model() {
        let f = Field::rationals();
        let group = FinGroup::gl2(2).unwrap();
        let whole = group.whole();
        let triv = Rep::trivial(&whole, &f);
        let one = group.trivial_subgroup();
        let fam = CoverFamily::new(CoverSpec {
            group: group.clone(),
            field: f.clone(),
            points: vec![PointData { name: "x".into(), k: whole.clone(), k_plus: one.clone(), theta: BTreeMap::from([(0, f.one())]), rho: triv }],
            distance: vec![vec![0]],
            base: 0,
            levi: one.clone(),
            rho_m: Rep::trivial(&one, &f),
            unipotent: None,
            nheart: vec![(0, vec![0])],
        })
        .unwrap();
        let t = TFamily::standard(&fam);
        assert!(fam.relation_suite(&t).unwrap().all_pass());
        assert!(fam.support_bijection_check().all_pass());
        let sr = fam.structure_report(&t, &RealAboveOne).unwrap();
        assert!(sr.simple.is_empty() && sr.omega == vec![0]);
        assert!(sr.checks.all_pass());
    }
}

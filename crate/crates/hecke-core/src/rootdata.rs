//! Reduced crystallographic root systems, split affine roots, the depth-zero
//! arrangement on `x₀ + V_M` and the quotient by the common kernel of the
//! relevant gradients.
//!
//! Points of the ambient space `V` are written in the coordinates
//! `v_i = α_i(v)`, so a root `β = Σ c_j α_j` evaluates as `β(v) = Σ c_j v_j`
//! and roots are stored as integer coefficient vectors.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::geometry::{self, AffineForm, Arrangement, GeometryError, HyperplaneFamily, InnerProduct, Point};
use crate::linalg::Matrix;
use crate::rational::{self, int, Rational};
use crate::reflections::{AffineIso, ReflectionGroupData};
use crate::report::Report;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RootError {
    UnknownType(String),
    CartanMismatch,
    RootCountMismatch { expected: usize, got: usize },
    LeviIndex(usize),
    BasepointOnHyperplane(AffineRoot),
    NotGeneric,
    BadBasis,
    Geometry(GeometryError),
}

impl fmt::Display for RootError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::UnknownType(t) => write!(f, "unsupported root system type {t:?}"),
            Self::CartanMismatch => write!(f, "Cartan matrix does not match the declared type"),
            Self::RootCountMismatch { expected, got } => {
                write!(f, "expected {expected} roots, generated {got}")
            }
            Self::LeviIndex(i) => write!(f, "Levi index {i} out of range"),
            Self::BasepointOnHyperplane(a) => write!(f, "x0 lies on the hyperplane of {a}"),
            Self::NotGeneric => write!(f, "point is not generic"),
            Self::BadBasis => write!(f, "matrix is not a basis of V_M"),
            Self::Geometry(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for RootError {}

impl From<GeometryError> for RootError {
    fn from(e: GeometryError) -> Self {
        RootError::Geometry(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CartanType {
    A(usize),
    B(usize),
    C(usize),
    D(usize),
    G2,
}

impl CartanType {
    /// Parses labels such as `"A2"`, `"B3"`, `"D4"`, `"G2"`.
    pub fn parse(s: &str) -> Result<CartanType, RootError> {
        let bad = || RootError::UnknownType(s.into());
        let s = s.trim();
        if s.eq_ignore_ascii_case("G2") {
            return Ok(CartanType::G2);
        }
        let (head, rank) = s.split_at(1.min(s.len()));
        let n: usize = rank.parse().map_err(|_| bad())?;
        let t = match head {
            "A" | "a" if n >= 1 => CartanType::A(n),
            "B" | "b" if n >= 2 => CartanType::B(n),
            "C" | "c" if n >= 2 => CartanType::C(n),
            "D" | "d" if n >= 4 => CartanType::D(n),
            _ => return Err(bad()),
        };
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        match *self {
            CartanType::A(n) | CartanType::B(n) | CartanType::C(n) | CartanType::D(n) => n,
            CartanType::G2 => 2,
        }
    }

    pub fn root_count(&self) -> usize {
        match *self {
            CartanType::A(n) => n * (n + 1),
            CartanType::B(n) | CartanType::C(n) => 2 * n * n,
            CartanType::D(n) => 2 * n * (n - 1),
            CartanType::G2 => 12,
        }
    }

    /// `(α_i, α_j)` for the Bourbaki numbering.
    fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut g = vec![vec![0i64; n]; n];
        if let CartanType::G2 = self {
            return vec![vec![2, -3], vec![-3, 6]];
        }
        for i in 0..n {
            g[i][i] = 2;
            if i + 1 < n {
                g[i][i + 1] = -1;
                g[i + 1][i] = -1;
            }
        }
        match *self {
            CartanType::B(n) => g[n - 1][n - 1] = 1,
            CartanType::C(n) => {
                g[n - 1][n - 1] = 4;
                g[n - 2][n - 1] = -2;
                g[n - 1][n - 2] = -2;
            }
            CartanType::D(n) => {
                g[n - 2][n - 1] = 0;
                g[n - 1][n - 2] = 0;
                g[n - 3][n - 1] = -1;
                g[n - 1][n - 3] = -1;
            }
            _ => {}
        }
        g
    }

    /// The tabulated Cartan matrix `A_ij = ⟨α_i, α_j^∨⟩`.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut a = vec![vec![0i64; n]; n];
        for i in 0..n {
            a[i][i] = 2;
            if i + 1 < n {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
        match *self {
            CartanType::B(n) => a[n - 2][n - 1] = -2,
            CartanType::C(n) => a[n - 1][n - 2] = -2,
            CartanType::D(n) => {
                a[n - 2][n - 1] = 0;
                a[n - 1][n - 2] = 0;
                a[n - 3][n - 1] = -1;
                a[n - 1][n - 3] = -1;
            }
            CartanType::G2 => a[1][0] = -3,
            CartanType::A(_) => {}
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CartanType::A(n) => write!(f, "A{n}"),
            CartanType::B(n) => write!(f, "B{n}"),
            CartanType::C(n) => write!(f, "C{n}"),
            CartanType::D(n) => write!(f, "D{n}"),
            CartanType::G2 => write!(f, "G2"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSystem {
    kind: CartanType,
    gram: Matrix<Rational>,
    roots: Vec<Vec<i64>>,
}

impl RootSystem {
    pub fn new(kind: CartanType) -> Result<RootSystem, RootError> {
        let n = kind.rank();
        let g = kind.gram();
        let gram = Matrix::from_rows(
            g.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect(),
            n,
            &int(0),
        );
        let derived: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| 2 * g[i][j] / g[j][j]).collect())
            .collect();
        let exact = (0..n).all(|i| (0..n).all(|j| (2 * g[i][j]) % g[j][j] == 0));
        if !exact || derived != kind.cartan_matrix() {
            return Err(RootError::CartanMismatch);
        }
        let mut rs = RootSystem { kind, gram, roots: Vec::new() };
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        let mut queue: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                e
            })
            .collect();
        while let Some(beta) = queue.pop() {
            if !seen.insert(beta.clone()) {
                continue;
            }
            for i in 0..n {
                let img = rs.simple_reflect(&beta, i);
                if !seen.contains(&img) {
                    queue.push(img);
                }
            }
        }
        if seen.len() != kind.root_count() {
            return Err(RootError::RootCountMismatch { expected: kind.root_count(), got: seen.len() });
        }
        rs.roots = seen.into_iter().collect();
        Ok(rs)
    }

    pub fn parse(label: &str) -> Result<RootSystem, RootError> {
        Self::new(CartanType::parse(label)?)
    }

    pub fn kind(&self) -> CartanType {
        self.kind
    }

    pub fn rank(&self) -> usize {
        self.kind.rank()
    }

    /// `(α_i, α_j)`.
    pub fn root_gram(&self) -> &Matrix<Rational> {
        &self.gram
    }

    /// `(β, γ)` for coefficient vectors.
    pub fn pairing(&self, beta: &[i64], gamma: &[i64]) -> Rational {
        let b: Vec<Rational> = beta.iter().map(|&v| int(v)).collect();
        let c: Vec<Rational> = gamma.iter().map(|&v| int(v)).collect();
        crate::linalg::dot(&b, &self.gram.apply(&c), &int(0))
    }

    /// `⟨β, α_i^∨⟩`.
    pub fn coroot_pairing(&self, beta: &[i64], i: usize) -> i64 {
        let mut e = vec![0; self.rank()];
        e[i] = 1;
        let v = int(2) * self.pairing(beta, &e) / self.pairing(&e, &e);
        debug_assert!(v.is_integer());
        i64::try_from(&v.to_integer()).expect("small integer")
    }

    pub fn simple_reflect(&self, beta: &[i64], i: usize) -> Vec<i64> {
        let c = self.coroot_pairing(beta, i);
        let mut out = beta.to_vec();
        out[i] -= c;
        out
    }

    /// The Cartan matrix recomputed from the simple roots.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                (0..n).map(|j| self.coroot_pairing(&e, j)).collect()
            })
            .collect()
    }

    pub fn roots(&self) -> &[Vec<i64>] {
        &self.roots
    }

    pub fn positive_roots(&self) -> Vec<Vec<i64>> {
        self.roots.iter().filter(|r| r.iter().all(|&c| c >= 0)).cloned().collect()
    }

    /// The simple roots as covectors in the ambient coordinates.
    pub fn simple_roots(&self) -> Vec<Vec<Rational>> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect()
    }

    /// The Weyl-invariant inner product on `V` in the ambient coordinates.
    pub fn inner_product(&self) -> InnerProduct {
        InnerProduct::new(self.gram.inverse().expect("root Gram matrix is invertible"))
            .expect("inverse of a positive-definite matrix")
    }

    /// `β(x)`.
    pub fn eval(beta: &[i64], x: &[Rational]) -> Rational {
        beta.iter().zip(x).map(|(&c, v)| int(c) * v).sum()
    }

    /// Every root supported on `levi`, which is the root system `Φ(M)`.
    pub fn levi_roots(&self, levi: &LeviSubset) -> Vec<Vec<i64>> {
        self.roots
            .iter()
            .filter(|r| r.iter().enumerate().all(|(j, &c)| c == 0 || levi.contains(j)))
            .cloned()
            .collect()
    }

    /// The single hyperplanes through the origin of all positive roots; their
    /// reflection group is the finite Weyl group.
    pub fn finite_arrangement(&self, base: Point) -> Result<Arrangement, RootError> {
        let fams = self
            .positive_roots()
            .iter()
            .map(|r| {
                let g: Vec<Rational> = r.iter().map(|&c| int(c)).collect();
                Ok((HyperplaneFamily::new(g, int(0), int(0))?, true))
            })
            .collect::<Result<Vec<_>, GeometryError>>()?;
        Ok(Arrangement::new(self.rank(), base, fams)?)
    }
}

/// `α + k`, evaluated as `α(x) + k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineRoot {
    pub root: Vec<i64>,
    pub level: i64,
}

impl AffineRoot {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        RootSystem::eval(&self.root, x) + int(self.level)
    }
}

impl fmt::Display for AffineRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:+}", self.root, self.level)
    }
}

/// Affine roots whose value vanishes at `x` or `y` or changes sign between them.
pub fn affine_roots_in_slab(rs: &RootSystem, x: &[Rational], y: &[Rational]) -> Result<Vec<AffineRoot>, RootError> {
    for p in [x, y] {
        if p.len() != rs.rank() {
            return Err(GeometryError::DimensionMismatch { expected: rs.rank(), got: p.len() }.into());
        }
    }
    let mut out = Vec::new();
    for beta in rs.roots() {
        let u = RootSystem::eval(beta, x);
        let v = RootSystem::eval(beta, y);
        let (lo, hi) = if u <= v { (u, v) } else { (v, u) };
        // (u + k)(v + k) ≤ 0  ⟺  -hi ≤ k ≤ -lo
        let kmin = (-hi).ceil().to_integer();
        let kmax = (-lo).floor().to_integer();
        let mut k = kmin;
        while k <= kmax {
            out.push(AffineRoot { root: beta.clone(), level: i64::try_from(&k).expect("level fits") });
            k += 1;
        }
    }
    out.sort();
    Ok(out)
}

/// `Φ_aff,x`.
pub fn vanishing_roots_at(rs: &RootSystem, x: &[Rational]) -> Vec<AffineRoot> {
    let mut out: Vec<AffineRoot> = rs
        .roots()
        .iter()
        .filter_map(|beta| {
            let v = RootSystem::eval(beta, x);
            v.is_integer().then(|| AffineRoot {
                root: beta.clone(),
                level: -i64::try_from(&v.to_integer()).expect("level fits"),
            })
        })
        .collect();
    out.sort();
    out
}

/// A set of simple-root indices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeviSubset {
    indices: BTreeSet<usize>,
}

impl LeviSubset {
    pub fn new(rs: &RootSystem, indices: impl IntoIterator<Item = usize>) -> Result<LeviSubset, RootError> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if let Some(&i) = indices.iter().find(|&&i| i >= rs.rank()) {
            return Err(RootError::LeviIndex(i));
        }
        Ok(LeviSubset { indices })
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    /// `V_M` as the columns of a matrix: the RREF kernel basis of the Levi
    /// simple roots.
    pub fn fixed_space(&self, rs: &RootSystem) -> Matrix<Rational> {
        let n = rs.rank();
        let simple = rs.simple_roots();
        let rows: Vec<Vec<Rational>> = self.indices().map(|i| simple[i].clone()).collect();
        let kernel = if rows.is_empty() {
            Matrix::identity(n, &int(1)).transpose().row_space_basis()
        } else {
            Matrix::from_rows(rows, n, &int(0)).kernel()
        };
        Matrix::from_rows(kernel, n, &int(0)).transpose()
    }

    /// Whether the roots of `Φ(M)` are closed under addition inside `Φ`.
    pub fn is_closed(&self, rs: &RootSystem) -> bool {
        let sub = rs.levi_roots(self);
        let all: BTreeSet<&Vec<i64>> = rs.roots().iter().collect();
        sub.iter().all(|a| {
            sub.iter().all(|b| {
                let s: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                !all.contains(&s) || sub.contains(&s)
            })
        })
    }
}

/// `x₀ + B t` for intrinsic coordinates `t`.
pub fn embed(x0: &[Rational], basis: &Matrix<Rational>, t: &[Rational]) -> Point {
    basis.apply(t).into_iter().zip(x0).map(|(a, b)| a + b).collect()
}

/// The depth-zero arrangement on `x₀ + V_M` in the canonical coordinates of
/// [`LeviSubset::fixed_space`].
pub fn depthzero_arrangement(rs: &RootSystem, levi: &LeviSubset, x0: &[Rational]) -> Result<Arrangement, RootError> {
    depthzero_arrangement_in_basis(rs, levi, x0, &levi.fixed_space(rs))
}

/// As [`depthzero_arrangement`] with the columns of `basis` as coordinates
/// on `V_M`.
pub fn depthzero_arrangement_in_basis(
    rs: &RootSystem,
    levi: &LeviSubset,
    x0: &[Rational],
    basis: &Matrix<Rational>,
) -> Result<Arrangement, RootError> {
    let n = rs.rank();
    if x0.len() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: x0.len() }.into());
    }
    let vm = levi.fixed_space(rs);
    if basis.rows() != n || basis.cols() != vm.cols() || basis.rank() != vm.cols() {
        return Err(RootError::BadBasis);
    }
    let simple = rs.simple_roots();
    for i in levi.indices() {
        if basis.transpose().apply(&simple[i]).iter().any(|c| !c.is_zero()) {
            return Err(RootError::BadBasis);
        }
    }
    let levi_roots = rs.levi_roots(levi);
    let mut fams = Vec::new();
    for beta in rs.roots() {
        if levi_roots.contains(beta) {
            continue;
        }
        let b0 = RootSystem::eval(beta, x0);
        if b0.is_integer() {
            let level = -i64::try_from(&b0.to_integer()).expect("level fits");
            return Err(RootError::BasepointOnHyperplane(AffineRoot { root: beta.clone(), level }));
        }
        let brow: Vec<Rational> = beta.iter().map(|&c| int(c)).collect();
        let gradient = basis.transpose().apply(&brow);
        fams.push((HyperplaneFamily::new(gradient, b0, int(1))?, true));
    }
    let dim = basis.cols();
    Ok(Arrangement::new(dim, vec![Rational::zero(); dim], fams)?)
}

/// The restriction of the invariant inner product to `V_M` in the given basis.
pub fn restricted_inner_product(rs: &RootSystem, basis: &Matrix<Rational>) -> InnerProduct {
    let g = rs.inner_product().gram().clone();
    InnerProduct::new(basis.transpose().mul(&g).mul(basis)).expect("restriction stays positive definite")
}

/// Rewrites an arrangement in coordinates `t = P t'`.
pub fn change_coordinates(arr: &Arrangement, p: &Matrix<Rational>) -> Result<Arrangement, RootError> {
    let pinv = p.inverse().ok_or(RootError::BadBasis)?;
    let fams = arr
        .entries()
        .map(|(f, r)| {
            let g = p.transpose().apply(&f.gradient);
            Ok((HyperplaneFamily::new(g, f.base.clone(), f.period.clone())?, r))
        })
        .collect::<Result<Vec<_>, GeometryError>>()?;
    Ok(Arrangement::new(arr.dim(), pinv.apply(arr.basepoint()), fams)?)
}

/// Checks `Φ_aff,x ⊆ Φ_aff,y` for intrinsic points `x` (generic) and `y` of
/// `x₀ + V_M`.
pub fn vanishing_monotone_check(
    rs: &RootSystem,
    levi: &LeviSubset,
    x0: &[Rational],
    x: &[Rational],
    y: &[Rational],
) -> Result<bool, RootError> {
    let arr = depthzero_arrangement(rs, levi, x0)?;
    if !geometry::is_generic(&arr, x)? {
        return Err(RootError::NotGeneric);
    }
    if y.len() != arr.dim() {
        return Err(GeometryError::DimensionMismatch { expected: arr.dim(), got: y.len() }.into());
    }
    let basis = levi.fixed_space(rs);
    let vx = vanishing_roots_at(rs, &embed(x0, &basis, x));
    let vy: BTreeSet<AffineRoot> = vanishing_roots_at(rs, &embed(x0, &basis, y)).into_iter().collect();
    Ok(vx.iter().all(|a| vy.contains(a)))
}

/// The quotient `𝒜_Krel` of an arrangement by `V^Krel`.
#[derive(Clone, Debug)]
pub struct QuotientSpace {
    /// Rows span the relevant gradients; `π(x) = R x`.
    pub projection: Matrix<Rational>,
    pub inner_product: InnerProduct,
    /// Relevant families in quotient coordinates, based at `π(x₀)`.
    pub arrangement: Arrangement,
}

impl QuotientSpace {
    pub fn dim(&self) -> usize {
        self.projection.rows()
    }

    pub fn project(&self, x: &[Rational]) -> Point {
        self.projection.apply(x)
    }

    /// `V^Krel` as a list of basis vectors.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        self.projection.kernel()
    }

    /// Pulls a quotient form back along the projection.
    pub fn pull_back(&self, a: &AffineForm) -> AffineForm {
        AffineForm {
            gradient: self.projection.transpose().apply(&a.gradient),
            constant: a.constant.clone(),
        }
    }
}

pub fn quotient_space(arr: &Arrangement, ip: &InnerProduct) -> Result<QuotientSpace, RootError> {
    let n = arr.dim();
    if ip.dim() != n {
        return Err(GeometryError::DimensionMismatch { expected: n, got: ip.dim() }.into());
    }
    let rel: Vec<&HyperplaneFamily> = arr.entries().filter(|(_, r)| *r).map(|(f, _)| f).collect();
    let grads: Vec<Vec<Rational>> = rel.iter().map(|f| f.gradient.clone()).collect();
    let r = if grads.is_empty() {
        Matrix::zeros(0, n, &int(0))
    } else {
        let rows = Matrix::from_rows(grads, n, &int(0)).row_space_basis();
        Matrix::from_rows(rows, n, &int(0))
    };
    let m = r.rows();
    let ginv = ip.gram().inverse().expect("positive definite");
    let induced = if m == 0 {
        Matrix::zeros(0, 0, &int(0))
    } else {
        r.mul(&ginv).mul(&r.transpose()).inverse().expect("rows are independent")
    };
    let inner_product = InnerProduct::new(induced)?;
    let rt = r.transpose();
    let mut fams = Vec::new();
    for f in rel {
        let c = rt.solve(&f.gradient).expect("gradient lies in the row space");
        fams.push((HyperplaneFamily::new(c, f.base.clone(), f.period.clone())?, true));
    }
    let arrangement = Arrangement::new(m, r.apply(arr.basepoint()), fams)?;
    Ok(QuotientSpace { projection: r, inner_product, arrangement })
}

/// Window of members checked per family for reflection invariance.
const INVARIANCE_WINDOW: i64 = 3;

/// Checks that the relevant hyperplanes are permuted by the simple
/// reflections and that every relevant family is periodic. Properness is
/// recorded as delegated to the finite generation of the group.
pub fn verify_affine_root_conditions(arr: &Arrangement, group: &ReflectionGroupData) -> Report {
    let mut rep = Report::new();
    let mut witness = None;
    'outer: for (si, s) in group.simple_reflections().iter().enumerate() {
        for (fam, rel) in arr.entries() {
            if !rel {
                continue;
            }
            let ks: Vec<i64> = if fam.is_periodic() {
                (-INVARIANCE_WINDOW..=INVARIANCE_WINDOW).collect()
            } else {
                vec![0]
            };
            for k in ks {
                let h = fam.member(k);
                let img = s.push_form(&h).expect("reflections are invertible");
                if !arr.contains_hyperplane(&img, true) {
                    witness = Some(format!("s{si} maps {h} to {img}, which is not relevant"));
                    break 'outer;
                }
            }
        }
    }
    rep.record("reflection invariance", witness);
    rep.skip("properness", "delegated to finite generation by the simple reflections");
    let nonperiodic = arr
        .entries()
        .find(|(f, r)| *r && !f.is_periodic())
        .map(|(f, _)| format!("{} has no parallel translates", f.member(0)));
    rep.record("infinitely many parallels", nonperiodic);
    rep
}

/// The reflection across the hyperplane of an affine root in ambient coordinates.
pub fn affine_reflection(rs: &RootSystem, a: &AffineRoot) -> AffineIso {
    let form = AffineForm {
        gradient: a.root.iter().map(|&c| int(c)).collect(),
        constant: int(a.level),
    };
    AffineIso::reflection(&form, &rs.inner_product())
}

/// A formatted point, for witnesses.
pub fn format_point(x: &[Rational]) -> String {
    let parts: Vec<String> = x.iter().map(rational::format).collect();
    format!("({})", parts.join(", "))
}

/// Whether `x` lies strictly inside the fundamental alcove.
pub fn in_fundamental_alcove(rs: &RootSystem, x: &[Rational]) -> bool {
    let pos = rs.positive_roots();
    pos.iter().all(|b| {
        let v = RootSystem::eval(b, x);
        v.is_positive() && v < Rational::one()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::reflections::chamber_walls;
    use proptest::prelude::*;

    #[test]
    fn root_counts_and_cartan() {
        for (label, count) in [("A1", 2), ("A2", 6), ("A3", 12), ("B2", 8), ("B3", 18), ("C3", 18), ("D4", 24), ("G2", 12)] {
            let rs = RootSystem::parse(label).unwrap();
            assert_eq!(rs.roots().len(), count, "{label}");
            assert_eq!(rs.cartan_matrix(), rs.kind().cartan_matrix());
            assert_eq!(rs.positive_roots().len() * 2, count);
        }
        assert!(RootSystem::parse("E8").is_err());
        assert!(RootSystem::parse("D3").is_err());
    }

    #[test]
    fn highest_roots() {
        let g2 = RootSystem::parse("G2").unwrap();
        assert!(g2.roots().contains(&vec![3, 2]));
        let b2 = RootSystem::parse("B2").unwrap();
        assert!(b2.roots().contains(&vec![1, 2]));
        let c2 = RootSystem::parse("C2").unwrap();
        assert!(c2.roots().contains(&vec![2, 1]));
    }

    #[test]
    fn slab_enumeration() {
        let a1 = RootSystem::parse("A1").unwrap();
        let got = affine_roots_in_slab(&a1, &[int(0)], &[rat(5, 2)]).unwrap();
        let levels = |r: i64| -> Vec<i64> { got.iter().filter(|a| a.root == vec![r]).map(|a| a.level).collect() };
        assert_eq!(levels(1), vec![-2, -1, 0]);
        assert_eq!(levels(-1), vec![0, 1, 2]);
        assert!(affine_roots_in_slab(&a1, &[rat(1, 3)], &[rat(1, 3)]).unwrap().is_empty());
        let a2 = RootSystem::parse("A2").unwrap();
        let x = vec![rat(1, 5), rat(1, 4)];
        let y = vec![rat(-1, 5), rat(1, 4)];
        let crossed = affine_roots_in_slab(&a2, &x, &y).unwrap();
        assert_eq!(
            crossed,
            vec![AffineRoot { root: vec![-1, 0], level: 0 }, AffineRoot { root: vec![1, 0], level: 0 }]
        );
    }

    #[test]
    fn vanishing_sets() {
        let a1 = RootSystem::parse("A1").unwrap();
        assert_eq!(vanishing_roots_at(&a1, &[int(0)]).len(), 2);
        assert!(vanishing_roots_at(&a1, &[rat(1, 3)]).is_empty());
        let a2 = RootSystem::parse("A2").unwrap();
        let v = vanishing_roots_at(&a2, &[int(0), int(0)]);
        assert_eq!(v.len(), 6);
        assert!(v.iter().all(|a| a.level == 0));
    }

    #[test]
    fn depthzero_a1_and_a2() {
        let a1 = RootSystem::parse("A1").unwrap();
        let arr = depthzero_arrangement(&a1, &LeviSubset::default(), &[rat(1, 3)]).unwrap();
        assert_eq!(arr.families().len(), 1);
        assert!(arr.families()[0].is_periodic());

        let a2 = RootSystem::parse("A2").unwrap();
        let levi = LeviSubset::new(&a2, [0]).unwrap();
        assert!(levi.is_closed(&a2));
        let x0 = vec![int(0), rat(1, 3)];
        let arr = depthzero_arrangement(&a2, &levi, &x0).unwrap();
        assert_eq!(arr.dim(), 1);
        assert_eq!(arr.families().len(), 1);
        assert_eq!(arr.families()[0].period, int(1));

        let all = LeviSubset::new(&a2, [0, 1]).unwrap();
        let arr = depthzero_arrangement(&a2, &all, &x0).unwrap();
        assert_eq!(arr.dim(), 0);
        assert!(arr.families().is_empty());

        assert!(matches!(
            depthzero_arrangement(&a2, &levi, &[int(0), int(1)]),
            Err(RootError::BasepointOnHyperplane(_))
        ));
        assert_eq!(LeviSubset::new(&a2, [5]).unwrap_err(), RootError::LeviIndex(5));
    }

    #[test]
    fn basis_independence() {
        let a3 = RootSystem::parse("A3").unwrap();
        let levi = LeviSubset::new(&a3, [1]).unwrap();
        let x0 = vec![rat(1, 7), int(0), rat(2, 9)];
        let canonical = depthzero_arrangement(&a3, &levi, &x0).unwrap();
        let b = levi.fixed_space(&a3);
        let p = Matrix::from_rows(vec![vec![int(2), int(1)], vec![int(-1), int(3)]], 2, &int(0));
        let other = depthzero_arrangement_in_basis(&a3, &levi, &x0, &b.mul(&p)).unwrap();
        assert_eq!(change_coordinates(&canonical, &p).unwrap(), other);
    }

    #[test]
    fn quotient_examples() {
        let ip = InnerProduct::standard(2);
        let fam = |g: [i64; 2], per: i64| HyperplaneFamily::new(vec![int(g[0]), int(g[1])], rat(1, 3), int(per)).unwrap();
        let base = vec![int(0), int(0)];
        let full = Arrangement::new(2, base.clone(), vec![(fam([1, 0], 1), true), (fam([0, 1], 1), true)]).unwrap();
        let q = quotient_space(&full, &ip).unwrap();
        assert_eq!(q.dim(), 2);
        assert!(q.kernel().is_empty());
        assert_eq!(q.inner_product.gram(), ip.gram());

        let none = Arrangement::new(2, base.clone(), vec![(fam([1, 0], 1), false)]).unwrap();
        let q = quotient_space(&none, &ip).unwrap();
        assert_eq!(q.dim(), 0);
        assert!(q.arrangement.families().is_empty());

        let flat = Arrangement::new(2, base.clone(), vec![(fam([1, 0], 1), true), (fam([2, 0], 0), true), (fam([0, 1], 1), false)]).unwrap();
        let q = quotient_space(&flat, &ip).unwrap();
        assert_eq!(q.dim(), 1);
        assert_eq!(q.kernel(), vec![vec![int(0), int(1)]]);
        for (f, _) in flat.entries().filter(|(_, r)| *r) {
            let c = f.member(2);
            let projected = AffineForm { gradient: vec![c.gradient[0].clone()], constant: c.constant.clone() };
            assert_eq!(q.pull_back(&projected), c);
        }
    }

    #[test]
    fn skewed_quotient_inner_product() {
        // gradient (1,1) under the standard product: V^Krel = span(1,-1), the
        // complement is spanned by (1,1)/2 which maps to 1, of squared length 1/2
        let fam = HyperplaneFamily::new(vec![int(1), int(1)], rat(1, 3), int(1)).unwrap();
        let arr = Arrangement::new(2, vec![int(0), int(0)], vec![(fam, true)]).unwrap();
        let q = quotient_space(&arr, &InnerProduct::standard(2)).unwrap();
        assert_eq!(q.inner_product.gram().get(0, 0), &rat(1, 2));
    }

    #[test]
    fn affine_root_conditions() {
        let a1 = RootSystem::parse("A1").unwrap();
        let arr = depthzero_arrangement(&a1, &LeviSubset::default(), &[rat(1, 3)]).unwrap();
        let ip = restricted_inner_product(&a1, &LeviSubset::default().fixed_space(&a1));
        let data = chamber_walls(&arr, &ip, &[int(0)]).unwrap();
        assert!(verify_affine_root_conditions(&arr, &data).all_pass());

        let single = Arrangement::new(
            1,
            vec![int(0)],
            vec![(HyperplaneFamily::new(vec![int(1)], int(-1), int(0)).unwrap(), true)],
        )
        .unwrap();
        let d = chamber_walls(&single, &InnerProduct::standard(1), &[int(0)]).unwrap();
        let rep = verify_affine_root_conditions(&single, &d);
        assert!(rep.get("reflection invariance").unwrap().witness.is_none());
        assert!(rep.get("infinitely many parallels").unwrap().witness.is_some());

        // lines x = 0 and y = x + 1/2 under the standard product are not closed
        let skew = Arrangement::new(
            2,
            vec![rat(1, 3), rat(-1, 7)],
            vec![
                (HyperplaneFamily::new(vec![int(1), int(0)], int(0), int(0)).unwrap(), true),
                (HyperplaneFamily::new(vec![int(1), int(-1)], rat(1, 2), int(0)).unwrap(), true),
            ],
        )
        .unwrap();
        let d = chamber_walls(&skew, &InnerProduct::standard(2), &[rat(1, 3), rat(-1, 7)]).unwrap();
        let rep = verify_affine_root_conditions(&skew, &d);
        assert!(!rep.all_pass());
        assert!(rep.get("reflection invariance").unwrap().witness.is_some());
    }

    #[test]
    fn affine_weyl_groups_from_roots() {
        for (label, walls) in [("A2", 3), ("B2", 3), ("G2", 3), ("A3", 4)] {
            let rs = RootSystem::parse(label).unwrap();
            let x0: Vec<Rational> = (0..rs.rank()).map(|i| rat(1, 50 + 7 * i as i64)).collect();
            assert!(in_fundamental_alcove(&rs, &x0));
            let levi = LeviSubset::default();
            let arr = depthzero_arrangement(&rs, &levi, &x0).unwrap();
            let ip = restricted_inner_product(&rs, &levi.fixed_space(&rs));
            let zero = vec![int(0); rs.rank()];
            let d = chamber_walls(&arr, &ip, &zero).unwrap();
            assert_eq!(d.rank(), walls, "{label}");
            assert!(verify_affine_root_conditions(&arr, &d).all_pass(), "{label}");
        }
    }

    #[test]
    fn finite_weyl_orders() {
        for (label, order) in [("A2", 6usize), ("B2", 8), ("G2", 12)] {
            let rs = RootSystem::parse(label).unwrap();
            let base = vec![rat(1, 3), rat(1, 5)];
            let arr = rs.finite_arrangement(base.clone()).unwrap();
            let d = chamber_walls(&arr, &rs.inner_product(), &base).unwrap();
            assert_eq!(d.rank(), 2);
            assert_eq!(d.ball(20).len(), order, "{label}");
        }
    }

    #[test]
    fn generic_points_have_minimal_vanishing_sets() {
        let a2 = RootSystem::parse("A2").unwrap();
        let levi = LeviSubset::new(&a2, [0]).unwrap();
        let x0 = vec![int(0), rat(1, 3)];
        let generic = vanishing_roots_at(&a2, &embed(&x0, &levi.fixed_space(&a2), &[rat(1, 7)]));
        for y in [int(0), rat(2, 3), rat(-1, 3), rat(5, 11)] {
            let at_y = vanishing_roots_at(&a2, &embed(&x0, &levi.fixed_space(&a2), &[y]));
            assert!(generic.len() <= at_y.len());
        }
    }

    proptest! {
        #[test]
        fn monotone_vanishing(n in -400i64..400, m in -40i64..40, d in 1i64..6) {
            let a2 = RootSystem::parse("A2").unwrap();
            let levi = LeviSubset::new(&a2, [0]).unwrap();
            let x0 = vec![int(0), rat(1, 3)];
            let x = vec![rat(n, 97)];
            let y = vec![rat(m, d)];
            prop_assert!(vanishing_monotone_check(&a2, &levi, &x0, &x, &y).unwrap());
        }
    }
}

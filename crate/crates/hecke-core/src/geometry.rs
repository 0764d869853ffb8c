//! Rational affine geometry: affine forms, periodic hyperplane families,
//! separating sets, distance and orthogonal reflections.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::linalg::{dot, Matrix};
use crate::rational::{self, Rational};

/// A point of a rational affine space, in coordinates.
pub type Point = Vec<Rational>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeometryError {
    DimensionMismatch { expected: usize, got: usize },
    ZeroGradient,
    NegativePeriod,
    BasepointOnHyperplane(AffineForm),
    NotSymmetric,
    NotPositiveDefinite,
    NotSeparating,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Self::ZeroGradient => write!(f, "affine form with zero gradient"),
            Self::NegativePeriod => write!(f, "hyperplane family with negative period"),
            Self::BasepointOnHyperplane(h) => write!(f, "basepoint lies on {h}"),
            Self::NotSymmetric => write!(f, "Gram matrix is not symmetric"),
            Self::NotPositiveDefinite => write!(f, "Gram matrix is not positive definite"),
            Self::NotSeparating => write!(f, "hyperplane does not separate the two points"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

fn check_dim(expected: usize, got: usize) -> Result<(), GeometryError> {
    if expected == got {
        Ok(())
    } else {
        Err(GeometryError::DimensionMismatch { expected, got })
    }
}

fn zero() -> Rational {
    Rational::zero()
}

/// The factor turning `gradient` into a primitive integer vector whose
/// first nonzero entry is positive.
fn normalizing_factor(gradient: &[Rational]) -> Rational {
    let den = rational::common_denominator(gradient);
    let scaled: Vec<Rational> = gradient
        .iter()
        .map(|g| g * Rational::from_integer(den.clone()))
        .collect();
    let g = rational::numerator_gcd(&scaled);
    let mut f = Rational::new(den, g);
    if let Some(lead) = gradient.iter().find(|c| !c.is_zero()) {
        if lead.is_negative() {
            f = -f;
        }
    }
    f
}

/// `a(x) = ⟨gradient, x⟩ + constant` with nonzero gradient.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct AffineForm {
    pub gradient: Vec<Rational>,
    pub constant: Rational,
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gradient.iter().map(rational::format).collect();
        write!(f, "<[{}], x> + {} = 0", g.join(", "), rational::format(&self.constant))
    }
}

impl AffineForm {
    pub fn new(gradient: Vec<Rational>, constant: Rational) -> Result<Self, GeometryError> {
        if gradient.iter().all(Zero::is_zero) {
            return Err(GeometryError::ZeroGradient);
        }
        Ok(AffineForm { gradient, constant })
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        dot(&self.gradient, x, &zero()) + &self.constant
    }

    /// The representative of the same hyperplane with primitive integer
    /// gradient and positive leading entry.
    pub fn canonical(&self) -> AffineForm {
        let f = normalizing_factor(&self.gradient);
        AffineForm {
            gradient: self.gradient.iter().map(|g| g * &f).collect(),
            constant: &self.constant * &f,
        }
    }

    pub fn same_hyperplane(&self, other: &AffineForm) -> bool {
        self.canonical() == other.canonical()
    }

    /// `a ∘ (x ↦ M x + t)`.
    pub fn precompose(&self, m: &Matrix<Rational>, t: &[Rational]) -> AffineForm {
        AffineForm {
            gradient: m.transpose().apply(&self.gradient),
            constant: dot(&self.gradient, t, &zero()) + &self.constant,
        }
    }
}

/// `{⟨gradient, x⟩ + base + k·period = 0 : k ∈ ℤ}`, or a single hyperplane
/// when `period = 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct HyperplaneFamily {
    pub gradient: Vec<Rational>,
    pub base: Rational,
    pub period: Rational,
}

impl HyperplaneFamily {
    pub fn new(gradient: Vec<Rational>, base: Rational, period: Rational) -> Result<Self, GeometryError> {
        if gradient.iter().all(Zero::is_zero) {
            return Err(GeometryError::ZeroGradient);
        }
        if period.is_negative() {
            return Err(GeometryError::NegativePeriod);
        }
        Ok(HyperplaneFamily { gradient, base, period })
    }

    pub fn single(form: &AffineForm) -> Self {
        HyperplaneFamily {
            gradient: form.gradient.clone(),
            base: form.constant.clone(),
            period: zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.gradient.len()
    }

    pub fn is_periodic(&self) -> bool {
        !self.period.is_zero()
    }

    /// Canonical representative: primitive integer gradient with positive
    /// leading entry, base reduced into `[0, period)` when periodic.
    pub fn canonical(&self) -> HyperplaneFamily {
        let f = normalizing_factor(&self.gradient);
        let period = &self.period * f.abs();
        let mut base = &self.base * &f;
        if !period.is_zero() {
            base = rational::modulo(&base, &period);
        }
        HyperplaneFamily {
            gradient: self.gradient.iter().map(|g| g * &f).collect(),
            base,
            period,
        }
    }

    /// The member with offset `k`.
    pub fn member(&self, k: i64) -> AffineForm {
        AffineForm {
            gradient: self.gradient.clone(),
            constant: &self.base + &self.period * rational::int(k),
        }
    }

    /// `⟨gradient, x⟩ + base`.
    pub fn base_value(&self, x: &[Rational]) -> Rational {
        dot(&self.gradient, x, &zero()) + &self.base
    }

    /// Whether some member vanishes at `x`.
    pub fn meets(&self, x: &[Rational]) -> bool {
        let u = self.base_value(x);
        if self.period.is_zero() {
            u.is_zero()
        } else {
            (u / &self.period).is_integer()
        }
    }

    pub fn contains(&self, form: &AffineForm) -> bool {
        let fam = self.canonical();
        let h = form.canonical();
        if fam.gradient != h.gradient {
            return false;
        }
        let diff = &h.constant - &fam.base;
        if fam.period.is_zero() {
            diff.is_zero()
        } else {
            (diff / &fam.period).is_integer()
        }
    }

    /// Members with a strict sign change between `x` and `y`.
    pub fn separating_members(&self, x: &[Rational], y: &[Rational]) -> Vec<AffineForm> {
        let u = self.base_value(x);
        let v = self.base_value(y);
        if self.period.is_zero() {
            return if (&u * &v).is_negative() {
                alloc::vec![self.member(0)]
            } else {
                Vec::new()
            };
        }
        // member k vanishes where ⟨g, ·⟩ + base = -kP; strictly between u and v
        let a = -(&u / &self.period);
        let b = -(&v / &self.period);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let first = lo.floor().to_integer() + BigInt::one();
        let last = hi.ceil().to_integer() - BigInt::one();
        let mut out = Vec::new();
        let mut k = first;
        while k <= last {
            let kk: i64 = i64::try_from(&k).expect("offset fits in i64");
            out.push(self.member(kk));
            k += 1;
        }
        out
    }
}

/// Finitely many hyperplane families with a basepoint and relevance flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    dim: usize,
    basepoint: Point,
    families: Vec<HyperplaneFamily>,
    relevant: Vec<bool>,
}

impl Arrangement {
    /// Validates dimensions and that no hyperplane passes through the
    /// basepoint; duplicate families are merged (a merged family is relevant
    /// when any copy is).
    pub fn new(
        dim: usize,
        basepoint: Point,
        families: Vec<(HyperplaneFamily, bool)>,
    ) -> Result<Arrangement, GeometryError> {
        check_dim(dim, basepoint.len())?;
        let mut out: Vec<(HyperplaneFamily, bool)> = Vec::new();
        for (fam, rel) in families {
            check_dim(dim, fam.dim())?;
            let fam = HyperplaneFamily::new(fam.gradient, fam.base, fam.period)?.canonical();
            if fam.meets(&basepoint) {
                let u = fam.base_value(&basepoint);
                let k = if fam.period.is_zero() { zero() } else { -(u / &fam.period) };
                let k: i64 = i64::try_from(&k.to_integer()).unwrap_or(0);
                return Err(GeometryError::BasepointOnHyperplane(fam.member(k)));
            }
            match out.iter_mut().find(|(f, _)| *f == fam) {
                Some(entry) => entry.1 |= rel,
                None => out.push((fam, rel)),
            }
        }
        out.sort();
        let (families, relevant) = out.into_iter().unzip();
        Ok(Arrangement { dim, basepoint, families, relevant })
    }

    pub fn empty(dim: usize, basepoint: Point) -> Result<Arrangement, GeometryError> {
        Self::new(dim, basepoint, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basepoint(&self) -> &Point {
        &self.basepoint
    }

    pub fn families(&self) -> &[HyperplaneFamily] {
        &self.families
    }

    pub fn is_relevant(&self, i: usize) -> bool {
        self.relevant[i]
    }

    pub fn relevance(&self) -> &[bool] {
        &self.relevant
    }

    /// Families paired with their relevance flags.
    pub fn entries(&self) -> impl Iterator<Item = (&HyperplaneFamily, bool)> {
        self.families.iter().zip(self.relevant.iter().copied())
    }

    /// The sub-arrangement of relevant families (all flagged relevant).
    pub fn relevant_part(&self) -> Arrangement {
        Arrangement {
            dim: self.dim,
            basepoint: self.basepoint.clone(),
            families: self
                .entries()
                .filter(|(_, r)| *r)
                .map(|(f, _)| f.clone())
                .collect(),
            relevant: self.relevant.iter().filter(|r| **r).copied().collect(),
        }
    }

    /// Same families with new relevance flags.
    pub fn with_relevance(&self, relevant: Vec<bool>) -> Arrangement {
        assert_eq!(relevant.len(), self.families.len());
        Arrangement { relevant, ..self.clone() }
    }

    pub fn contains_hyperplane(&self, form: &AffineForm, relevant_only: bool) -> bool {
        self.entries()
            .any(|(f, r)| (r || !relevant_only) && f.contains(form))
    }

    fn check_point(&self, x: &[Rational]) -> Result<(), GeometryError> {
        check_dim(self.dim, x.len())
    }
}

/// `𝔥_{x,y}`: the hyperplanes with `a_H(x)·a_H(y) < 0`, canonical and sorted.
pub fn separating(arr: &Arrangement, x: &[Rational], y: &[Rational]) -> Result<Vec<AffineForm>, GeometryError> {
    separating_filtered(arr, x, y, false)
}

/// As [`separating`], optionally restricted to relevant families.
pub fn separating_filtered(
    arr: &Arrangement,
    x: &[Rational],
    y: &[Rational],
    relevant_only: bool,
) -> Result<Vec<AffineForm>, GeometryError> {
    arr.check_point(x)?;
    arr.check_point(y)?;
    let mut set = BTreeSet::new();
    for (fam, rel) in arr.entries() {
        if relevant_only && !rel {
            continue;
        }
        for h in fam.separating_members(x, y) {
            set.insert(h.canonical());
        }
    }
    Ok(set.into_iter().collect())
}

/// `d(x, y)`, or `d_Krel(x, y)` with `relevant_only`.
pub fn distance(arr: &Arrangement, x: &[Rational], y: &[Rational], relevant_only: bool) -> Result<usize, GeometryError> {
    Ok(separating_filtered(arr, x, y, relevant_only)?.len())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TriangleMode {
    Additive,
    /// `d(x,y) + d(y,z) > d(x,z)`; the witness lies in `𝔥_{x,y} ∩ 𝔥_{y,z}`.
    Strict { witness: Option<AffineForm> },
}

pub fn triangle_mode(
    arr: &Arrangement,
    x: &[Rational],
    y: &[Rational],
    z: &[Rational],
) -> Result<TriangleMode, GeometryError> {
    let xy = separating(arr, x, y)?;
    let yz = separating(arr, y, z)?;
    let xz = separating(arr, x, z)?;
    if xy.len() + yz.len() == xz.len() {
        return Ok(TriangleMode::Additive);
    }
    let witness = xy.iter().find(|h| yz.contains(h)).cloned();
    Ok(TriangleMode::Strict { witness })
}

/// Whether `x` avoids every hyperplane.
pub fn is_generic(arr: &Arrangement, x: &[Rational]) -> Result<bool, GeometryError> {
    arr.check_point(x)?;
    Ok(!arr.families.iter().any(|f| f.meets(x)))
}

/// A symmetric positive-definite Gram matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProduct {
    gram: Matrix<Rational>,
    inverse: Matrix<Rational>,
}

impl InnerProduct {
    pub fn new(gram: Matrix<Rational>) -> Result<InnerProduct, GeometryError> {
        if !gram.is_square() {
            return Err(GeometryError::NotSymmetric);
        }
        if gram.transpose() != gram {
            return Err(GeometryError::NotSymmetric);
        }
        let n = gram.rows();
        for k in 1..=n {
            if !gram.block(0, 0, k, k).determinant().is_positive() {
                return Err(GeometryError::NotPositiveDefinite);
            }
        }
        let inverse = gram.inverse().ok_or(GeometryError::NotPositiveDefinite)?;
        Ok(InnerProduct { gram, inverse })
    }

    pub fn standard(dim: usize) -> InnerProduct {
        let id = Matrix::identity(dim, &Rational::one());
        InnerProduct { gram: id.clone(), inverse: id }
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<Rational> {
        &self.gram
    }

    pub fn inner(&self, u: &[Rational], v: &[Rational]) -> Rational {
        dot(u, &self.gram.apply(v), &zero())
    }

    /// The vector `α♯` with `⟨α♯, v⟩ = α(v)` for a covector `α`.
    pub fn sharp(&self, covector: &[Rational]) -> Vec<Rational> {
        self.inverse.apply(covector)
    }

    /// The dual pairing `⟨α, β⟩` of covectors.
    pub fn dual_inner(&self, a: &[Rational], b: &[Rational]) -> Rational {
        dot(a, &self.inverse.apply(b), &zero())
    }
}

/// Orthogonal reflection across `H`: `x − 2 a_H(x)/⟨α,α⟩ · α♯`.
pub fn reflect(h: &AffineForm, ip: &InnerProduct, x: &[Rational]) -> Result<Point, GeometryError> {
    check_dim(h.dim(), x.len())?;
    check_dim(ip.dim(), x.len())?;
    let sharp = ip.sharp(&h.gradient);
    let c = rational::int(2) * h.eval(x) / ip.dual_inner(&h.gradient, &h.gradient);
    Ok(x.iter().zip(&sharp).map(|(xi, si)| xi - &c * si).collect())
}

/// The point where the segment from `x` to `y` meets `H`, with its parameter.
pub fn wall_crossing_point(h: &AffineForm, x: &[Rational], y: &[Rational]) -> Result<(Point, Rational), GeometryError> {
    check_dim(h.dim(), x.len())?;
    check_dim(h.dim(), y.len())?;
    let ax = h.eval(x);
    let ay = h.eval(y);
    if !(&ax * &ay).is_negative() {
        return Err(GeometryError::NotSeparating);
    }
    let t = &ax / (&ax - &ay);
    let p = x.iter().zip(y).map(|(a, b)| a + &t * (b - a)).collect();
    Ok((p, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    fn line_z() -> Arrangement {
        let fam = HyperplaneFamily::new(vec![int(1)], int(0), int(1)).unwrap();
        Arrangement::new(1, vec![rat(1, 3)], vec![(fam, true)]).unwrap()
    }

    fn form(g: &[i64], c: i64) -> AffineForm {
        AffineForm::new(g.iter().map(|&v| int(v)).collect(), int(c)).unwrap()
    }

    #[test]
    fn separating_examples() {
        let arr = line_z();
        let s = separating(&arr, &[rat(1, 3)], &[rat(7, 3)]).unwrap();
        assert_eq!(s, vec![form(&[1], -2), form(&[1], -1)]);
        assert!(separating(&arr, &[rat(1, 3)], &[rat(1, 3)]).unwrap().is_empty());
        assert!(separating(&arr, &[rat(1, 3)], &[rat(2, 3)]).unwrap().is_empty());
        // a hyperplane through an endpoint does not separate
        assert_eq!(separating(&arr, &[int(1)], &[rat(5, 2)]).unwrap(), vec![form(&[1], -2)]);
        assert!(matches!(
            separating(&arr, &[int(1), int(0)], &[int(0)]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let arr = line_z();
        assert_eq!(distance(&arr, &[rat(1, 3)], &[rat(7, 3)], false).unwrap(), 2);
        assert_eq!(distance(&arr, &[rat(1, 3)], &[rat(1, 3)], false).unwrap(), 0);
        let fams = vec![
            (HyperplaneFamily::single(&form(&[1, 0], 0)), true),
            (HyperplaneFamily::single(&form(&[0, 1], 0)), false),
        ];
        let plane = Arrangement::new(2, vec![int(1), int(1)], fams).unwrap();
        let x = [int(1), int(1)];
        let y = [int(-1), int(-2)];
        assert_eq!(distance(&plane, &x, &y, false).unwrap(), 2);
        assert_eq!(distance(&plane, &x, &y, true).unwrap(), 1);
    }

    #[test]
    fn triangle_examples() {
        let arr = line_z();
        let (a, b, c) = ([rat(1, 3)], [rat(3, 2)], [rat(7, 3)]);
        assert_eq!(triangle_mode(&arr, &a, &b, &c).unwrap(), TriangleMode::Additive);
        assert_eq!(
            triangle_mode(&arr, &a, &c, &a).unwrap(),
            TriangleMode::Strict { witness: Some(form(&[1], -2)) }
        );
        assert_eq!(triangle_mode(&arr, &a, &a, &c).unwrap(), TriangleMode::Additive);
    }

    #[test]
    fn genericity() {
        let arr = line_z();
        assert!(is_generic(&arr, &[rat(1, 2)]).unwrap());
        assert!(!is_generic(&arr, &[int(1)]).unwrap());
        assert!(is_generic(&arr, arr.basepoint()).unwrap());
    }

    #[test]
    fn basepoint_on_hyperplane_rejected() {
        let fam = HyperplaneFamily::new(vec![int(1)], int(0), int(1)).unwrap();
        assert!(matches!(
            Arrangement::new(1, vec![int(2)], vec![(fam, true)]),
            Err(GeometryError::BasepointOnHyperplane(_))
        ));
    }

    #[test]
    fn families_deduplicate() {
        let a = HyperplaneFamily::new(vec![int(2)], int(1), int(2)).unwrap();
        let b = HyperplaneFamily::new(vec![int(-1)], rat(-3, 2), int(1)).unwrap();
        assert_eq!(a.canonical(), b.canonical());
        let arr = Arrangement::new(1, vec![rat(1, 3)], vec![(a, false), (b, true)]).unwrap();
        assert_eq!(arr.families().len(), 1);
        assert!(arr.is_relevant(0));
        assert_eq!(arr.families()[0].base, rat(1, 2));
    }

    #[test]
    fn reflect_examples() {
        let ip = InnerProduct::standard(1);
        assert_eq!(reflect(&form(&[1], -1), &ip, &[rat(1, 3)]).unwrap(), vec![rat(5, 3)]);
        assert_eq!(reflect(&form(&[1], -1), &ip, &[int(1)]).unwrap(), vec![int(1)]);
        let ip2 = InnerProduct::standard(2);
        assert_eq!(
            reflect(&form(&[1, 1], -1), &ip2, &[int(0), int(0)]).unwrap(),
            vec![int(1), int(1)]
        );
    }

    #[test]
    fn wall_crossing_examples() {
        let h = form(&[1], -1);
        assert_eq!(
            wall_crossing_point(&h, &[rat(1, 3)], &[rat(5, 3)]).unwrap(),
            (vec![int(1)], rat(1, 2))
        );
        assert_eq!(wall_crossing_point(&h, &[int(0)], &[int(2)]).unwrap(), (vec![int(1)], rat(1, 2)));
        assert_eq!(
            wall_crossing_point(&h, &[rat(1, 2)], &[int(2)]).unwrap(),
            (vec![int(1)], rat(1, 3))
        );
        assert_eq!(
            wall_crossing_point(&h, &[int(0)], &[rat(1, 2)]).unwrap_err(),
            GeometryError::NotSeparating
        );
    }

    #[test]
    fn inner_product_validation() {
        let bad = Matrix::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(1)]], 2, &int(0));
        assert_eq!(InnerProduct::new(bad).unwrap_err(), GeometryError::NotPositiveDefinite);
        let asym = Matrix::from_rows(vec![vec![int(1), int(0)], vec![int(1), int(1)]], 2, &int(0));
        assert_eq!(InnerProduct::new(asym).unwrap_err(), GeometryError::NotSymmetric);
    }

    fn plane_arrangement() -> Arrangement {
        // affine A2 in coweight coordinates plus an irrelevant extra family
        let fams = vec![
            (HyperplaneFamily::new(vec![int(1), int(0)], int(0), int(1)).unwrap(), true),
            (HyperplaneFamily::new(vec![int(0), int(1)], int(0), int(1)).unwrap(), true),
            (HyperplaneFamily::new(vec![int(1), int(1)], int(0), int(1)).unwrap(), false),
            (HyperplaneFamily::new(vec![int(1), int(-2)], rat(1, 7), int(3)).unwrap(), true),
        ];
        Arrangement::new(2, vec![rat(1, 5), rat(1, 4)], fams).unwrap()
    }

    fn pt() -> impl Strategy<Value = Point> {
        proptest::collection::vec((-30i64..30, 1i64..7), 2)
            .prop_map(|v| v.into_iter().map(|(n, d)| rat(n, d)).collect())
    }

    /// Points off every hyperplane of `plane_arrangement`: the denominators
    /// 97 and 89 never cancel.
    fn generic_pt() -> impl Strategy<Value = Point> {
        (-300i64..300, -300i64..300)
            .prop_filter("avoid multiples", |(a, b)| a % 97 != 0 && b % 89 != 0)
            .prop_map(|(a, b)| vec![rat(a, 97), rat(b, 89)])
    }

    proptest! {
        #[test]
        fn distance_is_symmetric(x in pt(), y in pt()) {
            let arr = plane_arrangement();
            prop_assert_eq!(distance(&arr, &x, &y, false).unwrap(), distance(&arr, &y, &x, false).unwrap());
        }

        #[test]
        fn triangle_lemma_conditions_agree(x in generic_pt(), y in generic_pt(), z in generic_pt()) {
            let arr = plane_arrangement();
            prop_assert!(is_generic(&arr, &x).unwrap());
            let xy = separating(&arr, &x, &y).unwrap();
            let yz = separating(&arr, &y, &z).unwrap();
            let xz = separating(&arr, &x, &z).unwrap();
            prop_assert!(xy.len() + yz.len() >= xz.len());
            let additive = xy.len() + yz.len() == xz.len();
            let disjoint = xy.iter().all(|h| !yz.contains(h));
            let contained = xy.iter().chain(&yz).all(|h| xz.contains(h));
            prop_assert_eq!(additive, disjoint);
            prop_assert_eq!(additive, contained);
            let mode = triangle_mode(&arr, &x, &y, &z).unwrap();
            prop_assert_eq!(mode == TriangleMode::Additive, additive);
            if additive {
                let r = |a: &Point, b: &Point| distance(&arr, a, b, true).unwrap();
                prop_assert_eq!(r(&x, &y) + r(&y, &z), r(&x, &z));
            }
        }

        #[test]
        fn relevant_triangle_inequality(x in generic_pt(), y in generic_pt(), z in generic_pt()) {
            let arr = plane_arrangement();
            let r = |a: &Point, b: &Point| distance(&arr, a, b, true).unwrap();
            prop_assert!(r(&x, &y) + r(&y, &z) >= r(&x, &z));
        }

        #[test]
        fn reflection_is_an_isometry(x in pt(), y in pt(), g0 in -3i64..4, g1 in 1i64..4, c in -5i64..5) {
            let gram = Matrix::from_rows(vec![vec![int(2), int(-1)], vec![int(-1), int(2)]], 2, &int(0));
            let ip = InnerProduct::new(gram).unwrap();
            let h = AffineForm::new(vec![int(g0), int(g1)], int(c)).unwrap();
            let sx = reflect(&h, &ip, &x).unwrap();
            let sy = reflect(&h, &ip, &y).unwrap();
            let d = |a: &Point, b: &Point| {
                let v: Vec<Rational> = a.iter().zip(b).map(|(p, q)| p - q).collect();
                ip.inner(&v, &v)
            };
            prop_assert_eq!(d(&sx, &sy), d(&x, &y));
            prop_assert_eq!(reflect(&h, &ip, &sx).unwrap(), x.clone());
            prop_assert_eq!(h.eval(&sx), -h.eval(&x));
        }
    }
}

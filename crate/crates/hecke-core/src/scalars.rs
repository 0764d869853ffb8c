//! Exact coefficients in the tower ℚ(ζ_n)(√p).
//!
//! An element is stored as rational coordinates on the monomials
//! `ζ^a · r^b` with `0 ≤ a < φ(n)` and `b ∈ {0, 1}` (the second block only
//! exists when a prime is attached), where `r` is a fixed square root of `p`.
//! Powers of ζ are reduced by the n-th cyclotomic polynomial and `r² = p`,
//! so equal elements have equal coordinates.
//!
//! Text form: `"3/2 + 1/2*r"`, `"z^3 - 1"`, `"-z*r"`. Terms may come in any
//! order when parsing; formatting emits the constant first, then increasing
//! powers of `z`, then the `r` block in the same order.

use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{self, Rational};

/// Largest supported cyclotomic order.
pub const MAX_ORDER: u32 = 360;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScalarError {
    InvalidOrder(u32),
    NotPrime(u32),
    /// `√p` already lies in ℚ(ζ_n), so adjoining it again is not a field.
    SquareRootInCyclotomic { order: u32, prime: u32 },
    ContextMismatch,
    NoPrime,
    NotInvertible,
    /// `q = 0` or `q = 1` handed to a plus-selection.
    OutsideRuleDomain(String),
    /// No exact real embedding is available to decide the rule.
    Undecidable(String),
    /// The rule accepted both or neither of `q`, `q⁻¹`.
    RuleViolation(String),
    NoSquareRoot(String),
    Parse(String),
}

impl fmt::Display for ScalarError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidOrder(n) => write!(f, "cyclotomic order {n} is not supported"),
            Self::NotPrime(p) => write!(f, "{p} is not a prime"),
            Self::SquareRootInCyclotomic { order, prime } => write!(
                f,
                "sqrt({prime}) already lies in Q(zeta_{order}); choose a smaller order"
            ),
            Self::ContextMismatch => write!(f, "scalars from different coefficient fields"),
            Self::NoPrime => write!(f, "the coefficient field has no square root of p"),
            Self::NotInvertible => write!(f, "division by zero"),
            Self::OutsideRuleDomain(q) => write!(f, "{q} is outside the plus-rule domain"),
            Self::Undecidable(q) => write!(f, "cannot decide the plus-rule for {q}"),
            Self::RuleViolation(q) => {
                write!(f, "plus-rule does not select exactly one of q, 1/q for q = {q}")
            }
            Self::NoSquareRoot(q) => write!(f, "no square root of {q} in the field"),
            Self::Parse(msg) => write!(f, "scalar parse error: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScalarError {}

/// The pair `(n, p)` identifying a coefficient field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldSpec {
    pub order: u32,
    pub prime: Option<u32>,
}

struct FieldData {
    spec: FieldSpec,
    phi: usize,
    /// `powers[k]` is ζ^k reduced, for `0 ≤ k < n`.
    powers: Vec<Vec<i64>>,
}

/// A coefficient field ℚ(ζ_n)(√p). Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<FieldData>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.spec.prime {
            Some(p) => write!(f, "Q(zeta_{})(sqrt {})", self.0.spec.order, p),
            None => write!(f, "Q(zeta_{})", self.0.spec.order),
        }
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn cyclotomic(n: u32) -> Vec<i64> {
    // x^n - 1 divided by every Φ_d with d | n, d < n.
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let lead = den[dd];
    let mut quot = vec![0i64; rem.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd] / lead;
        quot[i] = c;
        for (j, &dj) in den.iter().enumerate() {
            rem[i + j] -= c * dj;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0));
    quot
}

impl Field {
    /// Builds ℚ(ζ_order), optionally with `√prime` adjoined.
    pub fn new(order: u32, prime: Option<u32>) -> Result<Field, ScalarError> {
        if order == 0 || order > MAX_ORDER {
            return Err(ScalarError::InvalidOrder(order));
        }
        if let Some(p) = prime {
            if !is_prime(p) {
                return Err(ScalarError::NotPrime(p));
            }
            let inside = if p == 2 {
                order.is_multiple_of(8)
            } else {
                order.is_multiple_of(p) && (p % 4 == 1 || order.is_multiple_of(4))
            };
            if inside {
                return Err(ScalarError::SquareRootInCyclotomic { order, prime: p });
            }
        }
        let phi_poly = cyclotomic(order);
        let phi = phi_poly.len() - 1;
        let mut powers = Vec::with_capacity(order as usize);
        let mut cur = vec![0i64; phi];
        cur[0] = 1;
        for _ in 0..order {
            powers.push(cur.clone());
            // multiply by ζ and reduce with the monic Φ_n
            let top = cur[phi - 1];
            for i in (1..phi).rev() {
                cur[i] = cur[i - 1];
            }
            cur[0] = 0;
            if top != 0 {
                for i in 0..phi {
                    cur[i] -= top * phi_poly[i];
                }
            }
        }
        Ok(Field(Arc::new(FieldData {
            spec: FieldSpec { order, prime },
            phi,
            powers,
        })))
    }

    /// The field ℚ.
    pub fn rationals() -> Field {
        Field::new(1, None).expect("Q is always available")
    }

    pub fn spec(&self) -> FieldSpec {
        self.0.spec
    }

    pub fn order(&self) -> u32 {
        self.0.spec.order
    }

    pub fn prime(&self) -> Option<u32> {
        self.0.spec.prime
    }

    /// Dimension over ℚ.
    pub fn degree(&self) -> usize {
        self.0.phi * if self.0.spec.prime.is_some() { 2 } else { 1 }
    }

    fn phi(&self) -> usize {
        self.0.phi
    }

    pub fn zero(&self) -> Scalar {
        Scalar {
            field: self.clone(),
            coeffs: vec![Rational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> Scalar {
        self.rational(Rational::one())
    }

    pub fn int(&self, n: i64) -> Scalar {
        self.rational(rational::int(n))
    }

    pub fn frac(&self, n: i64, d: i64) -> Scalar {
        self.rational(rational::rat(n, d))
    }

    pub fn rational(&self, q: Rational) -> Scalar {
        let mut s = self.zero();
        s.coeffs[0] = q;
        s
    }

    /// ζ_n^k for any integer k.
    pub fn zeta_pow(&self, k: i64) -> Scalar {
        let n = self.order() as i64;
        let e = k.rem_euclid(n) as usize;
        let mut s = self.zero();
        for (i, &c) in self.0.powers[e].iter().enumerate() {
            s.coeffs[i] = rational::int(c);
        }
        s
    }

    pub fn zeta(&self) -> Scalar {
        self.zeta_pow(1)
    }

    /// The fixed square root `r` of `p`.
    pub fn sqrt_p(&self) -> Result<Scalar, ScalarError> {
        if self.prime().is_none() {
            return Err(ScalarError::NoPrime);
        }
        let mut s = self.zero();
        s.coeffs[self.phi()] = Rational::one();
        Ok(s)
    }

    /// `(√p)^k` for any integer k.
    pub fn half_power_of_p(&self, k: i64) -> Result<Scalar, ScalarError> {
        let p = self.prime().ok_or(ScalarError::NoPrime)? as i64;
        let half = k.div_euclid(2);
        let base = if half >= 0 {
            Rational::from_integer(BigInt::from(p).pow(half as u32))
        } else {
            Rational::new(BigInt::one(), BigInt::from(p).pow((-half) as u32))
        };
        let s = self.rational(base);
        if k.rem_euclid(2) == 1 {
            Ok(&s * &self.sqrt_p()?)
        } else {
            Ok(s)
        }
    }

    /// All roots of unity in the field: ±ζ_n^k.
    pub fn roots_of_unity(&self) -> Vec<Scalar> {
        let n = self.order() as i64;
        let mut out: Vec<Scalar> = (0..n).map(|k| self.zeta_pow(k)).collect();
        if n % 2 == 1 {
            let neg: Vec<Scalar> = out.iter().map(|z| -z).collect();
            out.extend(neg);
        }
        out.sort();
        out
    }

    /// Parses the text form described in the module docs.
    pub fn parse(&self, text: &str) -> Result<Scalar, ScalarError> {
        Parser::new(self, text).parse()
    }

    fn check(&self, other: &Field) -> Result<(), ScalarError> {
        if self == other {
            Ok(())
        } else {
            Err(ScalarError::ContextMismatch)
        }
    }
}

/// An exact element of a [`Field`].
#[derive(Clone)]
pub struct Scalar {
    field: Field,
    coeffs: Vec<Rational>,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for Scalar {}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A total order used for canonical sorting only; it has no arithmetic meaning.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field
            .spec()
            .cmp(&other.field.spec())
            .then_with(|| self.coeffs.cmp(&other.coeffs))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Scalar {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// Coordinates on `ζ^a r^b`, the `r` block after the plain block.
    pub fn coordinates(&self) -> &[Rational] {
        &self.coeffs
    }

    /// The value when the element is rational.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// `(a, b)` with `self = a + b·√p`, when the element lies in ℚ(√p).
    pub fn as_real_quadratic(&self) -> Option<(Rational, Rational)> {
        let phi = self.field.phi();
        let rest_zero = self
            .coeffs
            .iter()
            .enumerate()
            .all(|(i, c)| i == 0 || i == phi || c.is_zero());
        if !rest_zero {
            return None;
        }
        let b = if self.field.prime().is_some() {
            self.coeffs[phi].clone()
        } else {
            Rational::zero()
        };
        Some((self.coeffs[0].clone(), b))
    }

    /// Exact comparison with a rational through the real embedding `√p > 0`.
    pub fn real_cmp(&self, c: &Rational) -> Option<Ordering> {
        let (a, b) = self.as_real_quadratic()?;
        let a = a - c;
        let p = Rational::from_integer(BigInt::from(self.field.prime().unwrap_or(0)));
        let sa = a.signum();
        let sb = b.signum();
        let ord = |s: &Rational| s.cmp(&Rational::zero());
        if b.is_zero() || sa == sb {
            return Some(if a.is_zero() { ord(&sb) } else { ord(&sa) });
        }
        if a.is_zero() {
            return Some(ord(&sb));
        }
        let lhs = &a * &a;
        let rhs = &p * &b * &b;
        Some(match lhs.cmp(&rhs) {
            Ordering::Greater => ord(&sa),
            Ordering::Less => ord(&sb),
            Ordering::Equal => Ordering::Equal,
        })
    }

    fn same_field(&self, other: &Scalar) -> Result<(), ScalarError> {
        self.field.check(&other.field)
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Scalar { field: self.field.clone(), coeffs })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Scalar { field: self.field.clone(), coeffs })
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        let field = &self.field;
        let phi = field.phi();
        let n = field.order() as usize;
        let blocks = field.degree() / phi;
        let p = Rational::from_integer(BigInt::from(field.prime().unwrap_or(0)));
        let mut out = vec![Rational::zero(); field.degree()];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (bx, ax) = (i / phi, i % phi);
            for (j, y) in other.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let (by, ay) = (j / phi, j % phi);
                let mut c = x * y;
                if bx + by == 2 {
                    c *= &p;
                }
                let block = (bx + by) % blocks.max(1) * phi;
                for (k, &z) in field.0.powers[(ax + ay) % n].iter().enumerate() {
                    if z != 0 {
                        out[block + k] += &c * Rational::from_integer(BigInt::from(z));
                    }
                }
            }
        }
        Ok(Scalar { field: field.clone(), coeffs: out })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.same_field(other)?;
        self.try_mul(&other.inv()?)
    }

    /// Multiplicative inverse, by solving `x · y = 1` as a rational linear system.
    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::NotInvertible);
        }
        if let Some(q) = self.as_rational() {
            return Ok(self.field.rational(q.recip()));
        }
        let dim = self.field.degree();
        // Column j of the matrix is self · e_j.
        let mut m: Vec<Vec<Rational>> = vec![vec![Rational::zero(); dim + 1]; dim];
        for j in 0..dim {
            let mut e = self.field.zero();
            e.coeffs[j] = Rational::one();
            let col = self.try_mul(&e)?;
            for i in 0..dim {
                m[i][j] = col.coeffs[i].clone();
            }
        }
        m[0][dim] = Rational::one();
        for col in 0..dim {
            let piv = (col..dim)
                .find(|&r| !m[r][col].is_zero())
                .ok_or(ScalarError::NotInvertible)?;
            m.swap(col, piv);
            let pv = m[col][col].clone();
            for c in col..=dim {
                m[col][c] = &m[col][c] / &pv;
            }
            for r in 0..dim {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in col..=dim {
                        let t = &f * &m[col][c];
                        m[r][c] -= t;
                    }
                }
            }
        }
        let coeffs = m.into_iter().map(|row| row[dim].clone()).collect();
        Ok(Scalar { field: self.field.clone(), coeffs })
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, k: i64) -> Result<Scalar, ScalarError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &b;
            }
            b = &b * &b;
            e >>= 1;
        }
        Ok(acc)
    }

    /// The involution ζ ↦ ζ⁻¹ fixing ℚ and √p.
    pub fn conj(&self) -> Scalar {
        let field = &self.field;
        let phi = field.phi();
        let n = field.order() as usize;
        let mut out = vec![Rational::zero(); field.degree()];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let (b, a) = (i / phi, i % phi);
            let e = (n - a % n) % n;
            for (k, &z) in field.0.powers[e].iter().enumerate() {
                if z != 0 {
                    out[b * phi + k] += x * Rational::from_integer(BigInt::from(z));
                }
            }
        }
        Scalar { field: field.clone(), coeffs: out }
    }

    /// `c · conj(c)`.
    pub fn abs2(&self) -> Scalar {
        self * &self.conj()
    }

    /// A square root inside the field, found for elements of ℚ(√p)
    /// (negative ones need ζ₄ in the field).
    pub fn sqrt(&self) -> Result<Scalar, ScalarError> {
        let fail = || ScalarError::NoSquareRoot(self.to_string());
        if self.is_zero() {
            return Ok(self.clone());
        }
        let (a, b) = self.as_real_quadratic().ok_or_else(fail)?;
        let field = &self.field;
        let i_unit = || {
            if field.order().is_multiple_of(4) {
                Some(field.zeta_pow(field.order() as i64 / 4))
            } else {
                None
            }
        };
        if b.is_zero() {
            let neg = a.is_negative();
            let m = a.abs();
            let root = if let Some(r) = rational::sqrt(&m) {
                field.rational(r)
            } else {
                let p = field.prime().ok_or_else(fail)?;
                let r = rational::sqrt(&(&m / rational::int(p as i64))).ok_or_else(fail)?;
                &field.rational(r) * &field.sqrt_p()?
            };
            if neg {
                let i = i_unit().ok_or_else(fail)?;
                return Ok(&root * &i);
            }
            return Ok(root);
        }
        // (u + v r)² = u² + p v² + 2uv r
        let p = rational::int(field.prime().ok_or_else(fail)? as i64);
        let disc = &a * &a - &p * &b * &b;
        let s = rational::sqrt(&disc).ok_or_else(fail)?;
        for u2 in [(&a + &s) / rational::int(2), (&a - &s) / rational::int(2)] {
            if let Some(u) = rational::sqrt(&u2) {
                if u.is_zero() {
                    continue;
                }
                let v = &b / (rational::int(2) * &u);
                let cand = &field.rational(u) + &(&field.rational(v) * &field.sqrt_p()?);
                if &(&cand * &cand) == self {
                    return Ok(cand);
                }
            }
        }
        Err(fail())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $try:ident) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.$try(rhs).expect("scalar arithmetic across different fields")
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                (&self).$method(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// `c̄`.
pub fn conj(c: &Scalar) -> Scalar {
    c.conj()
}

/// `c · c̄`.
pub fn abs2(c: &Scalar) -> Scalar {
    c.abs2()
}

/// `(√p)^k` in the given field.
pub fn half_power_of_p(field: &Field, k: i64) -> Result<Scalar, ScalarError> {
    field.half_power_of_p(k)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let phi = self.field.phi();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (b, a) = (i / phi, i % phi);
            let mut mono = String::new();
            match a {
                0 => {}
                1 => mono.push('z'),
                _ => {
                    mono.push_str("z^");
                    mono.push_str(&a.to_string());
                }
            }
            if b == 1 {
                if !mono.is_empty() {
                    mono.push('*');
                }
                mono.push('r');
            }
            let mag = c.abs();
            let body = if mono.is_empty() {
                rational::format(&mag)
            } else if mag.is_one() {
                mono
            } else {
                let mut s = rational::format(&mag);
                s.push('*');
                s.push_str(&mono);
                s
            };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            f.write_str(&body)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    field: &'a Field,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(field: &'a Field, text: &str) -> Self {
        Parser {
            field,
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> ScalarError {
        let mut s = String::from(msg);
        s.push_str(" at offset ");
        s.push_str(&self.pos.to_string());
        ScalarError::Parse(s)
    }

    fn peek(&mut self) -> Option<char> {
        while matches!(self.chars.get(self.pos), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn parse(mut self) -> Result<Scalar, ScalarError> {
        if self.peek().is_none() {
            return Err(self.err("empty input"));
        }
        let mut acc = self.field.zero();
        let mut sign_required = false;
        while self.peek().is_some() {
            let negative = if self.eat('-') {
                true
            } else if self.eat('+') {
                false
            } else if sign_required {
                return Err(self.err("expected '+' or '-'"));
            } else {
                false
            };
            let term = self.term()?;
            acc = if negative { &acc - &term } else { &acc + &term };
            sign_required = true;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut t = self.factor()?;
        while self.eat('*') {
            t = &t * &self.factor()?;
        }
        Ok(t)
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        self.peek();
        let start = self.pos;
        while matches!(self.chars.get(self.pos), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("bad integer"))
    }

    fn exponent(&mut self) -> Result<i64, ScalarError> {
        if !self.eat('^') {
            return Ok(1);
        }
        let neg = self.eat('-');
        let e = self.integer()?;
        let e: i64 = i64::try_from(e).map_err(|_| self.err("exponent too large"))?;
        Ok(if neg { -e } else { e })
    }

    fn factor(&mut self) -> Result<Scalar, ScalarError> {
        match self.peek() {
            Some('z') => {
                self.pos += 1;
                let e = self.exponent()?;
                Ok(self.field.zeta_pow(e))
            }
            Some('r') => {
                self.pos += 1;
                let e = self.exponent()?;
                self.field.half_power_of_p(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                let d = if self.eat('/') { self.integer()? } else { BigInt::one() };
                if d.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                Ok(self.field.rational(Rational::new(n, d)))
            }
            _ => Err(self.err("unexpected character")),
        }
    }
}

/// Decides which of `q`, `q⁻¹` is "plus".
///
/// For every admissible `q` exactly one of the two must be accepted; `q = -1`
/// is its own inverse and is accepted or rejected alone.
pub trait CoeffPlusRule {
    fn is_plus(&self, q: &Scalar) -> Result<bool, ScalarError>;
}

impl<F> CoeffPlusRule for F
where
    F: Fn(&Scalar) -> Result<bool, ScalarError>,
{
    fn is_plus(&self, q: &Scalar) -> Result<bool, ScalarError> {
        self(q)
    }
}

/// The default rule: on ℚ(√p) with `√p > 0`, `q` is plus iff `|q| > 1`, and
/// `-1` is plus. On positive values this is "`q > 1`". Elements outside
/// ℚ(√p) are rejected as undecidable.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealAboveOne;

impl CoeffPlusRule for RealAboveOne {
    fn is_plus(&self, q: &Scalar) -> Result<bool, ScalarError> {
        let undecidable = || ScalarError::Undecidable(q.to_string());
        let one = Rational::one();
        match q.real_cmp(&Rational::zero()).ok_or_else(undecidable)? {
            Ordering::Greater => Ok(q.real_cmp(&one) == Some(Ordering::Greater)),
            Ordering::Less => {
                let c = q.real_cmp(&-one).ok_or_else(undecidable)?;
                Ok(c != Ordering::Greater)
            }
            Ordering::Equal => Err(ScalarError::OutsideRuleDomain(q.to_string())),
        }
    }
}

/// Returns the member of `{q, q⁻¹}` accepted by `rule`.
pub fn coeffplus_select(rule: &dyn CoeffPlusRule, q: &Scalar) -> Result<Scalar, ScalarError> {
    if q.is_zero() || q.is_one() {
        return Err(ScalarError::OutsideRuleDomain(q.to_string()));
    }
    let inv = q.inv()?;
    let a = rule.is_plus(q)?;
    if &inv == q {
        return if a { Ok(q.clone()) } else { Err(ScalarError::RuleViolation(q.to_string())) };
    }
    let b = rule.is_plus(&inv)?;
    match (a, b) {
        (true, false) => Ok(q.clone()),
        (false, true) => Ok(inv),
        _ => Err(ScalarError::RuleViolation(q.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q4() -> Field {
        Field::new(4, None).unwrap()
    }

    fn q2r() -> Field {
        Field::new(1, Some(2)).unwrap()
    }

    #[test]
    fn conj_examples() {
        let f = q4();
        assert_eq!(f.frac(3, 2).conj(), f.frac(3, 2));
        assert_eq!(f.zeta().conj(), -f.zeta());
        assert_eq!(f.zeta().conj(), f.zeta_pow(3));
        let g = q2r();
        let x = &g.int(2) + &g.sqrt_p().unwrap();
        assert_eq!(x.conj(), x);
    }

    #[test]
    fn abs2_examples() {
        let f = q4();
        assert_eq!((&f.one() + &f.zeta()).abs2(), f.int(2));
        assert_eq!(f.zero().abs2(), f.zero());
        let g = q2r();
        assert_eq!(g.sqrt_p().unwrap().abs2(), g.int(2));
    }

    #[test]
    fn half_powers() {
        let g = q2r();
        assert_eq!(g.half_power_of_p(2).unwrap(), g.int(2));
        assert_eq!(
            g.half_power_of_p(3).unwrap(),
            &g.int(2) * &g.sqrt_p().unwrap()
        );
        assert_eq!(
            g.half_power_of_p(-1).unwrap(),
            &g.frac(1, 2) * &g.sqrt_p().unwrap()
        );
        assert_eq!(
            q4().half_power_of_p(1).unwrap_err(),
            ScalarError::NoPrime
        );
    }

    #[test]
    fn plus_selection() {
        let f = Field::rationals();
        assert_eq!(coeffplus_select(&RealAboveOne, &f.frac(1, 3)).unwrap(), f.int(3));
        assert_eq!(coeffplus_select(&RealAboveOne, &f.int(3)).unwrap(), f.int(3));
        assert!(coeffplus_select(&RealAboveOne, &f.one()).is_err());
        assert!(coeffplus_select(&RealAboveOne, &f.zero()).is_err());
        assert_eq!(coeffplus_select(&RealAboveOne, &f.int(-1)).unwrap(), f.int(-1));
        assert_eq!(coeffplus_select(&RealAboveOne, &f.frac(-1, 2)).unwrap(), f.int(-2));
        let g = q2r();
        let half = g.half_power_of_p(-1).unwrap();
        assert_eq!(coeffplus_select(&RealAboveOne, &half).unwrap(), g.sqrt_p().unwrap());
        let z = q4().zeta();
        assert!(matches!(
            coeffplus_select(&RealAboveOne, &z),
            Err(ScalarError::Undecidable(_))
        ));
        let always = |_: &Scalar| -> Result<bool, ScalarError> { Ok(true) };
        assert!(matches!(
            coeffplus_select(&always, &f.int(2)),
            Err(ScalarError::RuleViolation(_))
        ));
    }

    #[test]
    fn cyclotomic_reduction() {
        // Φ_12 = x^4 - x^2 + 1
        let f = Field::new(12, None).unwrap();
        assert_eq!(f.degree(), 4);
        let z = f.zeta();
        assert_eq!(z.pow(12).unwrap(), f.one());
        assert_eq!(z.pow(6).unwrap(), f.int(-1));
        assert_eq!(z.pow(4).unwrap(), &z.pow(2).unwrap() - &f.one());
        let f5 = Field::new(5, None).unwrap();
        let sum = (0..5).fold(f5.zero(), |acc, k| &acc + &f5.zeta_pow(k));
        assert!(sum.is_zero());
    }

    #[test]
    fn field_validation() {
        assert!(Field::new(8, Some(2)).is_err());
        assert!(Field::new(5, Some(5)).is_err());
        assert!(Field::new(3, Some(3)).is_ok());
        assert!(Field::new(12, Some(3)).is_err());
        assert!(Field::new(4, Some(2)).is_ok());
        assert!(Field::new(1, Some(4)).is_err());
        assert!(Field::new(0, None).is_err());
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = q4().one();
        let b = q2r().one();
        assert_eq!(a.try_add(&b).unwrap_err(), ScalarError::ContextMismatch);
    }

    #[test]
    fn text_form() {
        let g = q2r();
        let x = &g.frac(3, 2) + &(&g.frac(1, 2) * &g.sqrt_p().unwrap());
        assert_eq!(x.to_string(), "3/2 + 1/2*r");
        assert_eq!(g.parse("3/2 + 1/2*r").unwrap(), x);
        let f = Field::new(5, None).unwrap();
        let y = f.parse("z^3 - 1").unwrap();
        assert_eq!(y.to_string(), "-1 + z^3");
        assert_eq!(f.parse(&y.to_string()).unwrap(), y);
        assert_eq!(f.parse("z^5").unwrap(), f.one());
        assert_eq!(f.parse("z^-1").unwrap(), f.zeta_pow(4));
        assert_eq!(g.parse("r^2").unwrap(), g.int(2));
        assert_eq!(g.zero().to_string(), "0");
        assert!(g.parse("").is_err());
        assert!(g.parse("3 3").is_err());
        assert!(g.parse("1/0").is_err());
        assert!(f.parse("r").is_err());
    }

    #[test]
    fn square_roots() {
        let g = q2r();
        let x = g.frac(9, 2);
        let s = x.sqrt().unwrap();
        assert_eq!(&s * &s, x);
        assert_eq!(s, &g.frac(3, 2) * &g.sqrt_p().unwrap());
        let y = &g.int(3) + &(&g.int(2) * &g.sqrt_p().unwrap()); // (1 + √2)²
        assert_eq!(y.sqrt().unwrap(), &g.one() + &g.sqrt_p().unwrap());
        let h = Field::new(4, Some(2)).unwrap();
        let m = h.int(-1).sqrt().unwrap();
        assert_eq!(&m * &m, h.int(-1));
        assert!(Field::rationals().int(2).sqrt().is_err());
    }

    #[test]
    fn roots_of_unity_counts() {
        assert_eq!(Field::rationals().roots_of_unity().len(), 2);
        assert_eq!(q4().roots_of_unity().len(), 4);
        assert_eq!(Field::new(3, None).unwrap().roots_of_unity().len(), 6);
    }

    fn field_strategy() -> impl Strategy<Value = Field> {
        prop_oneof![
            Just(Field::new(4, Some(2)).unwrap()),
            Just(Field::new(3, Some(2)).unwrap()),
            Just(Field::new(5, None).unwrap()),
            Just(Field::new(1, Some(3)).unwrap()),
        ]
    }

    fn scalar_in(field: Field) -> impl Strategy<Value = Scalar> {
        let dim = field.degree();
        proptest::collection::vec((-6i64..7, 1i64..5), dim).prop_map(move |cs| {
            let mut s = field.zero();
            for (i, (n, d)) in cs.into_iter().enumerate() {
                s.coeffs[i] = rational::rat(n, d);
            }
            s
        })
    }

    fn pair() -> impl Strategy<Value = (Scalar, Scalar)> {
        field_strategy().prop_flat_map(|f| (scalar_in(f.clone()), scalar_in(f)))
    }

    proptest! {
        #[test]
        fn canonical_form_is_stable((x, _) in pair()) {
            let again = x.field().parse(&x.to_string()).unwrap();
            prop_assert_eq!(&again, &x);
            prop_assert_eq!(again.to_string(), x.to_string());
            prop_assert_eq!(&(&x * &x.field().one()), &x);
        }

        #[test]
        fn conj_is_an_involutive_homomorphism((x, y) in pair()) {
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!((&x * &y).conj(), &x.conj() * &y.conj());
            prop_assert_eq!((&x + &y).conj(), &x.conj() + &y.conj());
        }

        #[test]
        fn abs2_is_multiplicative((x, y) in pair()) {
            prop_assert_eq!((&x * &y).abs2(), &x.abs2() * &y.abs2());
            prop_assert_eq!(x.abs2().conj(), x.abs2());
        }

        #[test]
        fn inverse_is_exact((x, _) in pair()) {
            prop_assume!(!x.is_zero());
            prop_assert!((&x * &x.inv().unwrap()).is_one());
        }

        #[test]
        fn selection_ignores_inversion(n in 1i64..40, d in 1i64..40, neg in any::<bool>(), b in -3i64..4) {
            let g = Field::new(1, Some(2)).unwrap();
            let mut q = &g.frac(n, d) + &(&g.int(b) * &g.sqrt_p().unwrap());
            if neg { q = -q; }
            prop_assume!(!q.is_zero() && !q.is_one());
            let a = coeffplus_select(&RealAboveOne, &q).unwrap();
            let c = coeffplus_select(&RealAboveOne, &q.inv().unwrap()).unwrap();
            prop_assert_eq!(a, c);
        }
    }
}

//! Arbitrary-precision rationals and their text form.

use alloc::string::{String, ToString};
use core::fmt::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub use num_rational::BigRational as Rational;

/// `n / d` as an exact rational. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as a rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats as `"n"` for integers and `"n/d"` otherwise.
pub fn format(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        let mut s = String::new();
        let _ = write!(s, "{}/{}", q.numer(), q.denom());
        s
    }
}

/// Parses `"n"`, `"-n"` or `"n/d"` (surrounding whitespace allowed).
pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().ok()?;
    let d: BigInt = den.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// The rational square root of `q`, when it exists.
pub fn sqrt(q: &Rational) -> Option<Rational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Greatest common divisor of the numerators (zero for an all-zero input).
pub fn numerator_gcd<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter().fold(BigInt::zero(), |acc, q| acc.gcd(q.numer()))
}

/// Reduces `x` into `[0, m)` modulo a positive rational `m`.
pub fn modulo(x: &Rational, m: &Rational) -> Rational {
    let k = (x / m).floor();
    x - k * m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for q in [rat(3, 2), rat(-7, 3), int(0), int(-4), rat(10, 4)] {
            assert_eq!(parse(&format(&q)).unwrap(), q);
        }
        assert_eq!(format(&rat(10, 4)), "5/2");
        assert!(parse("1/0").is_none());
        assert!(parse("x").is_none());
    }

    #[test]
    fn square_roots() {
        assert_eq!(sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(sqrt(&rat(2, 1)), None);
        assert_eq!(sqrt(&rat(-1, 1)), None);
    }

    #[test]
    fn reduction_modulo_period() {
        assert_eq!(modulo(&rat(7, 3), &int(1)), rat(1, 3));
        assert_eq!(modulo(&rat(-1, 3), &int(1)), rat(2, 3));
        assert_eq!(modulo(&int(2), &int(2)), int(0));
    }
}

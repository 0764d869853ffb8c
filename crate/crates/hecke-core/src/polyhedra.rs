//! Exact feasibility of linear systems with strict and non-strict
//! inequalities, by Fourier–Motzkin elimination.

use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::rational::Rational;

/// `⟨coeffs, x⟩ + constant > 0` (strict) or `≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Inequality {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
    pub strict: bool,
}

impl Inequality {
    pub fn strict(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Inequality { coeffs, constant, strict: true }
    }

    pub fn weak(coeffs: Vec<Rational>, constant: Rational) -> Self {
        Inequality { coeffs, constant, strict: false }
    }

    /// Scales by a positive factor so the first nonzero entry has absolute value 1.
    fn normalized(mut self) -> Self {
        let lead = self
            .coeffs
            .iter()
            .find(|c| !c.is_zero())
            .cloned()
            .unwrap_or_else(|| self.constant.clone());
        if !lead.is_zero() {
            let s = lead.abs();
            for c in &mut self.coeffs {
                *c = &*c / &s;
            }
            self.constant = &self.constant / &s;
        }
        self
    }

    fn holds_trivially(&self) -> bool {
        if self.strict {
            self.constant.is_positive()
        } else {
            !self.constant.is_negative()
        }
    }
}

/// `⟨coeffs, x⟩ + constant = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

/// Substitutes `x_p = -(constant + Σ_{j≠p} c_j x_j) / c_p` into `ineq`,
/// dropping coordinate `p`.
fn substitute(ineq: &Inequality, eq: &Equation, p: usize) -> Inequality {
    let f = &ineq.coeffs[p] / &eq.coeffs[p];
    let mut coeffs = Vec::with_capacity(ineq.coeffs.len() - 1);
    for (j, c) in ineq.coeffs.iter().enumerate() {
        if j != p {
            coeffs.push(c - &f * &eq.coeffs[j]);
        }
    }
    Inequality {
        coeffs,
        constant: &ineq.constant - &f * &eq.constant,
        strict: ineq.strict,
    }
}

fn drop_coord(eq: &Equation, eq_src: &Equation, p: usize) -> Equation {
    let f = &eq.coeffs[p] / &eq_src.coeffs[p];
    let coeffs = eq
        .coeffs
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != p)
        .map(|(j, c)| c - &f * &eq_src.coeffs[j])
        .collect();
    Equation { coeffs, constant: &eq.constant - &f * &eq_src.constant }
}

/// Whether some rational point satisfies every equation and inequality.
pub fn feasible(equations: &[Equation], inequalities: &[Inequality]) -> bool {
    let mut eqs: Vec<Equation> = equations.to_vec();
    let mut ineqs: Vec<Inequality> = inequalities.to_vec();
    // Eliminate equalities first.
    while let Some(eq) = eqs.pop() {
        match eq.coeffs.iter().position(|c| !c.is_zero()) {
            None => {
                if !eq.constant.is_zero() {
                    return false;
                }
            }
            Some(p) => {
                ineqs = ineqs.iter().map(|i| substitute(i, &eq, p)).collect();
                eqs = eqs.iter().map(|e| drop_coord(e, &eq, p)).collect();
            }
        }
    }
    let dim = ineqs.first().map_or(0, |i| i.coeffs.len());
    let mut system: Vec<Inequality> = ineqs.into_iter().map(Inequality::normalized).collect();
    system.sort();
    system.dedup();
    for v in (0..dim).rev() {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest = Vec::new();
        for ineq in system {
            if ineq.coeffs[v].is_positive() {
                pos.push(ineq);
            } else if ineq.coeffs[v].is_negative() {
                neg.push(ineq);
            } else {
                rest.push(ineq);
            }
        }
        for p in &pos {
            for n in &neg {
                let a = p.coeffs[v].clone();
                let b = -n.coeffs[v].clone();
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| &b * x + &a * y)
                    .collect();
                let combined = Inequality {
                    coeffs,
                    constant: &b * &p.constant + &a * &n.constant,
                    strict: p.strict || n.strict,
                };
                rest.push(combined.normalized());
            }
        }
        for ineq in &mut rest {
            ineq.coeffs.truncate(v);
        }
        rest.sort();
        rest.dedup();
        if rest.iter().any(|i| i.coeffs.iter().all(Zero::is_zero) && !i.holds_trivially()) {
            return false;
        }
        system = rest;
    }
    system.iter().all(Inequality::holds_trivially)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn ineq(c: &[i64], k: i64, strict: bool) -> Inequality {
        Inequality { coeffs: c.iter().map(|&v| int(v)).collect(), constant: int(k), strict }
    }

    #[test]
    fn open_interval() {
        // 0 < x < 1
        assert!(feasible(&[], &[ineq(&[1], 0, true), ineq(&[-1], 1, true)]));
        // 0 < x < 0 is empty, 0 ≤ x ≤ 0 is a point
        assert!(!feasible(&[], &[ineq(&[1], 0, true), ineq(&[-1], 0, true)]));
        assert!(feasible(&[], &[ineq(&[1], 0, false), ineq(&[-1], 0, false)]));
    }

    #[test]
    fn triangle_facets() {
        // x > 0, y > 0, 1 - x - y > 0; the facet x = 0 is a wall, x + y = 2 is not
        let tri = [ineq(&[1, 0], 0, true), ineq(&[0, 1], 0, true), ineq(&[-1, -1], 1, true)];
        let on = |c: &[i64], k: i64| Equation { coeffs: c.iter().map(|&v| int(v)).collect(), constant: int(k) };
        assert!(feasible(&[on(&[1, 0], 0)], &tri[1..]));
        assert!(!feasible(&[on(&[1, 1], -2)], &tri));
        // touching a vertex only: x = 0 together with y > 0 and y < 0
        assert!(!feasible(&[on(&[1, 0], 0)], &[ineq(&[0, 1], 0, true), ineq(&[0, -1], 0, true)]));
    }

    #[test]
    fn inconsistent_equations() {
        let e1 = Equation { coeffs: vec![int(1)], constant: int(0) };
        let e2 = Equation { coeffs: vec![int(1)], constant: int(-1) };
        assert!(!feasible(&[e1.clone(), e2], &[]));
        assert!(feasible(&[e1], &[]));
    }
}

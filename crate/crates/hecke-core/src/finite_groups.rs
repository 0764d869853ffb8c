//! Finite groups as multiplication tables, exact representations, compact
//! induction and the convolution Hecke algebra `H(H, (K, ρ))`.
//!
//! Induced spaces use the model `ind_K^H(ρ) = {f: H → V | f(kg) = ρ(k)f(g)}`
//! with `H` acting by right translation; a function is stored by its values
//! on a fixed set of right coset representatives.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::Matrix;
use crate::scalars::{self, CoeffPlusRule, Field, Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupError {
    NotAGroup(String),
    Unsupported(String),
    NotClosed,
    UnknownElement(String),
    NotHomomorphism { g: usize, h: usize },
    DimensionMismatch,
    NotBiEquivariant { g: usize },
    EndDimension(usize),
    GeneratorInSubgroup,
    NotIntertwining(usize),
    Unsolvable(String),
    Scalar(ScalarError),
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotAGroup(m) => write!(f, "not a group: {m}"),
            Self::Unsupported(m) => write!(f, "unsupported: {m}"),
            Self::NotClosed => write!(f, "subset is not closed under multiplication"),
            Self::UnknownElement(m) => write!(f, "unknown element {m}"),
            Self::NotHomomorphism { g, h } => {
                write!(f, "representation fails rho(gh) = rho(g)rho(h) at ({g}, {h})")
            }
            Self::DimensionMismatch => write!(f, "dimension mismatch"),
            Self::NotBiEquivariant { g } => write!(f, "function is not bi-equivariant at element {g}"),
            Self::EndDimension(d) => write!(f, "endomorphism algebra has dimension {d}, expected 2"),
            Self::GeneratorInSubgroup => write!(f, "h lies in K and does not generate a nontrivial double coset"),
            Self::NotIntertwining(g) => write!(f, "element {g} does not intertwine rho"),
            Self::Unsolvable(m) => write!(f, "quadratic relation unsolvable: {m}"),
            Self::Scalar(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GroupError {}

impl From<ScalarError> for GroupError {
    fn from(e: ScalarError) -> Self {
        GroupError::Scalar(e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Kind {
    Abstract,
    Cyclic,
    Dihedral(usize),
    Symmetric,
    Matrix2 { q: i64 },
    Product,
}

/// A finite group; element 0 is the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroup {
    name: String,
    kind: Kind,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    keys: Vec<Vec<i64>>,
    index: BTreeMap<Vec<i64>, usize>,
}

/// Exhaustive associativity check up to this order, sampled above it.
const EXHAUSTIVE_LIMIT: usize = 200;

fn is_prime(q: i64) -> bool {
    q >= 2 && (2..q).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

impl FinGroup {
    /// Builds the table from element keys (identity first) and a product on keys.
    fn from_keys(name: String, kind: Kind, keys: Vec<Vec<i64>>, op: impl Fn(&[i64], &[i64]) -> Vec<i64>) -> FinGroup {
        let index: BTreeMap<Vec<i64>, usize> = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let n = keys.len();
        let mul: Vec<Vec<usize>> = (0..n)
            .map(|a| (0..n).map(|b| index[&op(&keys[a], &keys[b])]).collect())
            .collect();
        let inv = (0..n).map(|a| (0..n).find(|&b| mul[a][b] == 0).expect("inverse")).collect();
        FinGroup { name, kind, mul, inv, keys, index }
    }

    /// A group from an explicit table, validated; element 0 must be the identity.
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<FinGroup, GroupError> {
        let n = mul.len();
        let bad = |m: &str| GroupError::NotAGroup(m.into());
        if n == 0 || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(bad("table must be square with entries in range"));
        }
        if (0..n).any(|a| mul[0][a] != a || mul[a][0] != a) {
            return Err(bad("element 0 is not the identity"));
        }
        let mut inv = Vec::with_capacity(n);
        for a in 0..n {
            let b = (0..n).find(|&b| mul[a][b] == 0).ok_or_else(|| bad("missing inverse"))?;
            if mul[b][a] != 0 {
                return Err(bad("left and right inverses differ"));
            }
            inv.push(b);
        }
        let keys: Vec<Vec<i64>> = (0..n as i64).map(|i| vec![i]).collect();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        let g = FinGroup { name: format!("table{n}"), kind: Kind::Abstract, mul, inv, keys, index };
        g.validate()?;
        Ok(g)
    }

    /// Checks associativity (exhaustively for small groups) and inverses.
    pub fn validate(&self) -> Result<(), GroupError> {
        let n = self.order();
        let check = |a: usize, b: usize, c: usize| self.mul[self.mul[a][b]][c] == self.mul[a][self.mul[b][c]];
        if n <= EXHAUSTIVE_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        if !check(a, b, c) {
                            return Err(GroupError::NotAGroup(format!("not associative at ({a}, {b}, {c})")));
                        }
                    }
                }
            }
        } else {
            // deterministic pseudo-random triples
            let mut state: u64 = 0x9E37_79B9_7F4A_7C15;
            for _ in 0..100_000 {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let (a, b, c) = (
                    (state >> 33) as usize % n,
                    (state >> 17) as usize % n,
                    (state >> 3) as usize % n,
                );
                if !check(a, b, c) {
                    return Err(GroupError::NotAGroup(format!("not associative at ({a}, {b}, {c})")));
                }
            }
        }
        for a in 0..n {
            if self.mul[a][self.inv[a]] != 0 || self.mul[self.inv[a]][a] != 0 {
                return Err(GroupError::NotAGroup(format!("bad inverse of {a}")));
            }
        }
        Ok(())
    }

    pub fn cyclic(n: usize) -> FinGroup {
        let keys = (0..n as i64).map(|i| vec![i]).collect();
        let m = n as i64;
        FinGroup::from_keys(format!("C{n}"), Kind::Cyclic, keys, |a, b| vec![(a[0] + b[0]) % m])
    }

    /// The dihedral group of order `2n`, elements `r^a s^b` keyed `[a, b]`.
    pub fn dihedral(n: usize) -> FinGroup {
        let m = n as i64;
        let keys = (0..2).flat_map(|b| (0..m).map(move |a| vec![a, b])).collect();
        FinGroup::from_keys(format!("D{n}"), Kind::Dihedral(n), keys, |x, y| {
            // r^a s^b · r^c s^d = r^{a ± c} s^{b+d}
            let c = if x[1] == 0 { y[0] } else { -y[0] };
            vec![(x[0] + c).rem_euclid(m), (x[1] + y[1]) % 2]
        })
    }

    /// `S_n` for `n ≤ 6`, acting on `{0, …, n−1}`; the product is composition
    /// `(στ)(i) = σ(τ(i))`.
    pub fn symmetric(n: usize) -> Result<FinGroup, GroupError> {
        if n == 0 || n > 6 {
            return Err(GroupError::Unsupported(format!("symmetric groups need 1 <= n <= 6, got {n}")));
        }
        let mut perms: Vec<Vec<i64>> = Vec::new();
        let mut cur: Vec<i64> = (0..n as i64).collect();
        loop {
            perms.push(cur.clone());
            // next lexicographic permutation
            let Some(i) = (0..n - 1).rev().find(|&i| cur[i] < cur[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).expect("exists");
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        Ok(FinGroup::from_keys(format!("S{n}"), Kind::Symmetric, perms, |a, b| {
            b.iter().map(|&i| a[i as usize]).collect()
        }))
    }

    fn matrix2(q: i64, special: bool) -> Result<FinGroup, GroupError> {
        if !is_prime(q) || q > 5 {
            return Err(GroupError::Unsupported(format!("2x2 matrix groups need a prime q <= 5, got {q}")));
        }
        let mut keys = vec![vec![1, 0, 0, 1]];
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    for d in 0..q {
                        let det = (a * d - b * c).rem_euclid(q);
                        let ok = if special { det == 1 } else { det != 0 };
                        if ok && [a, b, c, d] != [1, 0, 0, 1] {
                            keys.push(vec![a, b, c, d]);
                        }
                    }
                }
            }
        }
        let name = format!("{}2(F{q})", if special { "SL" } else { "GL" });
        Ok(FinGroup::from_keys(name, Kind::Matrix2 { q }, keys, move |x, y| {
            vec![
                (x[0] * y[0] + x[1] * y[2]) % q,
                (x[0] * y[1] + x[1] * y[3]) % q,
                (x[2] * y[0] + x[3] * y[2]) % q,
                (x[2] * y[1] + x[3] * y[3]) % q,
            ]
        }))
    }

    /// `GL₂(F_q)` for prime `q ≤ 5`.
    pub fn gl2(q: i64) -> Result<FinGroup, GroupError> {
        FinGroup::matrix2(q, false)
    }

    /// `SL₂(F_q)` for prime `q ≤ 5`.
    pub fn sl2(q: i64) -> Result<FinGroup, GroupError> {
        FinGroup::matrix2(q, true)
    }

    /// `A × B`, element `(a, b)` at index `a·|B| + b`.
    pub fn direct_product(a: &FinGroup, b: &FinGroup) -> FinGroup {
        let (na, nb) = (a.order(), b.order());
        let keys = (0..na as i64).flat_map(|i| (0..nb as i64).map(move |j| vec![i, j])).collect();
        FinGroup::from_keys(format!("{}x{}", a.name, b.name), Kind::Product, keys, |x, y| {
            vec![
                a.mul[x[0] as usize][y[0] as usize] as i64,
                b.mul[x[1] as usize][y[1] as usize] as i64,
            ]
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.mul
    }

    /// `g x g⁻¹`.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul[self.mul[g][x]][self.inv[g]]
    }

    pub fn elements(&self) -> core::ops::Range<usize> {
        0..self.order()
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != 0 {
            x = self.mul[x][g];
            k += 1;
        }
        k
    }

    /// Looks an element up by its key: a permutation, the matrix entries
    /// `[a, b, c, d]`, an exponent, or a table index.
    pub fn find(&self, key: &[i64]) -> Option<usize> {
        match self.kind {
            Kind::Matrix2 { q } => self.index.get(&key.iter().map(|x| x.rem_euclid(q)).collect::<Vec<_>>()).copied(),
            _ => self.index.get(key).copied(),
        }
    }

    pub fn key(&self, g: usize) -> &[i64] {
        &self.keys[g]
    }

    pub fn field_size(&self) -> Option<i64> {
        match self.kind {
            Kind::Matrix2 { q } => Some(q),
            _ => None,
        }
    }

    /// A readable name for an element.
    pub fn label(&self, g: usize) -> String {
        let k = &self.keys[g];
        match &self.kind {
            Kind::Symmetric => {
                let mut seen = vec![false; k.len()];
                let mut out = String::new();
                for start in 0..k.len() {
                    if seen[start] || k[start] as usize == start {
                        continue;
                    }
                    out.push('(');
                    let mut i = start;
                    let mut first = true;
                    while !seen[i] {
                        seen[i] = true;
                        if !first {
                            out.push(' ');
                        }
                        out.push_str(&(i + 1).to_string());
                        first = false;
                        i = k[i] as usize;
                    }
                    out.push(')');
                }
                if out.is_empty() {
                    "()".into()
                } else {
                    out
                }
            }
            Kind::Matrix2 { .. } => format!("[[{},{}],[{},{}]]", k[0], k[1], k[2], k[3]),
            Kind::Cyclic => format!("r^{}", k[0]),
            Kind::Dihedral(_) => format!("r^{} s^{}", k[0], k[1]),
            Kind::Product | Kind::Abstract => format!("{k:?}"),
        }
    }

    /// The subgroup generated by `gens`.
    pub fn generate(&self, gens: &[usize]) -> Subgroup {
        let mut member = vec![false; self.order()];
        member[0] = true;
        let mut elems = vec![0];
        let mut i = 0;
        while i < elems.len() {
            for &g in gens {
                let y = self.mul[elems[i]][g];
                if !member[y] {
                    member[y] = true;
                    elems.push(y);
                }
            }
            i += 1;
        }
        elems.sort_unstable();
        Subgroup { elems, member }
    }

    /// Checks that `elems` is a subgroup.
    pub fn subgroup(&self, elems: &[usize]) -> Result<Subgroup, GroupError> {
        let mut member = vec![false; self.order()];
        for &e in elems {
            if e >= self.order() {
                return Err(GroupError::UnknownElement(e.to_string()));
            }
            member[e] = true;
        }
        if !member[0] {
            return Err(GroupError::NotClosed);
        }
        for &a in elems {
            for &b in elems {
                if !member[self.mul[a][b]] {
                    return Err(GroupError::NotClosed);
                }
            }
        }
        let mut e: Vec<usize> = elems.to_vec();
        e.sort_unstable();
        e.dedup();
        Ok(Subgroup { elems: e, member })
    }

    /// The subgroup as a group in its own right; index `i` of the result is
    /// `sub.elements()[i]`.
    pub fn subgroup_as_group(&self, sub: &Subgroup) -> FinGroup {
        let pos: BTreeMap<usize, usize> = sub.elems.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mul = sub
            .elems
            .iter()
            .map(|&a| sub.elems.iter().map(|&b| pos[&self.mul[a][b]]).collect())
            .collect();
        let mut g = FinGroup::from_table(mul).expect("subgroup table");
        g.name = format!("{}|{}", self.name, sub.order());
        g.keys = sub.elems.iter().map(|&x| self.keys[x].clone()).collect();
        g.index = g.keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        g.kind = match self.kind {
            Kind::Matrix2 { q } => Kind::Matrix2 { q },
            Kind::Symmetric => Kind::Symmetric,
            _ => Kind::Abstract,
        };
        g
    }

    pub fn whole(&self) -> Subgroup {
        Subgroup { elems: self.elements().collect(), member: vec![true; self.order()] }
    }

    pub fn trivial_subgroup(&self) -> Subgroup {
        self.generate(&[])
    }

    fn matrices_where(&self, pred: impl Fn(&[i64]) -> bool) -> Result<Subgroup, GroupError> {
        if !matches!(self.kind, Kind::Matrix2 { .. }) {
            return Err(GroupError::Unsupported(format!("{} is not a 2x2 matrix group", self.name)));
        }
        let elems: Vec<usize> = self.elements().filter(|&g| pred(&self.keys[g])).collect();
        self.subgroup(&elems)
    }

    /// Upper (or lower) triangular matrices.
    pub fn borel(&self, upper: bool) -> Result<Subgroup, GroupError> {
        self.matrices_where(|k| if upper { k[2] == 0 } else { k[1] == 0 })
    }

    /// Upper (or lower) unitriangular matrices.
    pub fn unipotent(&self, upper: bool) -> Result<Subgroup, GroupError> {
        self.matrices_where(|k| k[0] == 1 && k[3] == 1 && if upper { k[2] == 0 } else { k[1] == 0 })
    }

    pub fn torus(&self) -> Result<Subgroup, GroupError> {
        self.matrices_where(|k| k[1] == 0 && k[2] == 0)
    }

    /// Diagonal and antidiagonal matrices.
    pub fn monomial(&self) -> Result<Subgroup, GroupError> {
        self.matrices_where(|k| (k[1] == 0 && k[2] == 0) || (k[0] == 0 && k[3] == 0))
    }

    /// Permutations fixing every point `≥ k`, i.e. `S_k ⊂ S_n`.
    pub fn point_stabilizer_chain(&self, k: usize) -> Result<Subgroup, GroupError> {
        if self.kind != Kind::Symmetric {
            return Err(GroupError::Unsupported(format!("{} is not a symmetric group", self.name)));
        }
        let elems: Vec<usize> = self
            .elements()
            .filter(|&g| self.keys[g].iter().enumerate().skip(k).all(|(i, &x)| x as usize == i))
            .collect();
        self.subgroup(&elems)
    }

    /// Representatives (least index) of the left cosets `gK`.
    pub fn left_coset_reps(&self, k: &Subgroup) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &x in &k.elems {
                seen[self.mul[g][x]] = true;
            }
        }
        reps
    }

    /// Representatives (least index) of the right cosets `Kg`.
    pub fn right_coset_reps(&self, k: &Subgroup) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &x in &k.elems {
                seen[self.mul[x][g]] = true;
            }
        }
        reps
    }

    /// Representatives (least index) of the double cosets `K g K'`.
    pub fn double_cosets(&self, k: &Subgroup, k2: &Subgroup) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        let mut reps = Vec::new();
        for g in self.elements() {
            if seen[g] {
                continue;
            }
            reps.push(g);
            for &a in &k.elems {
                for &b in &k2.elems {
                    seen[self.mul[self.mul[a][g]][b]] = true;
                }
            }
        }
        reps
    }

    /// The double coset `K g K'` as a sorted list.
    pub fn double_coset(&self, k: &Subgroup, g: usize, k2: &Subgroup) -> Vec<usize> {
        let set: BTreeSet<usize> = k
            .elems
            .iter()
            .flat_map(|&a| k2.elems.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.mul[self.mul[a][g]][b])
            .collect();
        set.into_iter().collect()
    }
}

/// A subgroup, as a sorted element list with a membership mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    elems: Vec<usize>,
    member: Vec<bool>,
}

impl Subgroup {
    pub fn elements(&self) -> &[usize] {
        &self.elems
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.member.get(g).copied().unwrap_or(false)
    }

    /// `g K g⁻¹`.
    pub fn conjugate(&self, group: &FinGroup, g: usize) -> Subgroup {
        let elems: Vec<usize> = self.elems.iter().map(|&x| group.conj(g, x)).collect();
        group.subgroup(&elems).expect("conjugate of a subgroup")
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        let elems: Vec<usize> = self.elems.iter().copied().filter(|&x| other.contains(x)).collect();
        let mut member = vec![false; self.member.len()];
        for &e in &elems {
            member[e] = true;
        }
        Subgroup { elems, member }
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elems.iter().all(|&x| other.contains(x))
    }

    pub fn is_normal_in(&self, group: &FinGroup, other: &Subgroup) -> bool {
        other.elems.iter().all(|&g| self.elems.iter().all(|&x| self.contains(group.conj(g, x))))
    }
}

/// A representation of a subgroup by matrices over a scalar field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rep {
    field: Field,
    dim: usize,
    mats: BTreeMap<usize, Matrix<Scalar>>,
}

impl Rep {
    pub fn trivial(k: &Subgroup, field: &Field) -> Rep {
        Rep::character(k, field, |_| field.one())
    }

    /// A 1-dimensional representation from its values (not validated).
    pub fn character(k: &Subgroup, field: &Field, chi: impl Fn(usize) -> Scalar) -> Rep {
        let mats = k
            .elems
            .iter()
            .map(|&g| (g, Matrix::from_rows(vec![vec![chi(g)]], 1, &field.zero())))
            .collect();
        Rep { field: field.clone(), dim: 1, mats }
    }

    /// Closes generator images over the generated subgroup; fails if the
    /// assignment does not extend to a homomorphism.
    pub fn from_generators(group: &FinGroup, field: &Field, dim: usize, gens: &[(usize, Matrix<Scalar>)]) -> Result<Rep, GroupError> {
        if gens.iter().any(|(_, m)| m.rows() != dim || m.cols() != dim) {
            return Err(GroupError::DimensionMismatch);
        }
        let mut mats: BTreeMap<usize, Matrix<Scalar>> = BTreeMap::new();
        mats.insert(0, Matrix::identity(dim, &field.one()));
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for (g, m) in gens {
                let y = group.mul(x, *g);
                let my = mats[&x].mul(m);
                match mats.get(&y) {
                    Some(old) if *old != my => return Err(GroupError::NotHomomorphism { g: x, h: *g }),
                    Some(_) => {}
                    None => {
                        mats.insert(y, my);
                        queue.push(y);
                    }
                }
            }
        }
        let rep = Rep { field: field.clone(), dim, mats };
        rep.validate(group)?;
        Ok(rep)
    }

    /// Checks `ρ(1) = I` and `ρ(gh) = ρ(g)ρ(h)`, over all pairs when the
    /// domain has at most 200 elements and over a deterministic sample otherwise.
    pub fn validate(&self, group: &FinGroup) -> Result<(), GroupError> {
        if self.mats.get(&0) != Some(&Matrix::identity(self.dim, &self.field.one())) {
            return Err(GroupError::NotHomomorphism { g: 0, h: 0 });
        }
        let dom: Vec<usize> = self.mats.keys().copied().collect();
        let pairs: Vec<(usize, usize)> = if dom.len() <= EXHAUSTIVE_LIMIT {
            dom.iter().flat_map(|&a| dom.iter().map(move |&b| (a, b))).collect()
        } else {
            let n = dom.len();
            (0..20_000).map(|i| (dom[(i * 7919) % n], dom[(i * 104_729 + 13) % n])).collect()
        };
        for (a, b) in pairs {
            let ab = group.mul(a, b);
            match self.mats.get(&ab) {
                Some(m) if *m == self.mats[&a].mul(&self.mats[&b]) => {}
                _ => return Err(GroupError::NotHomomorphism { g: a, h: b }),
            }
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> impl Iterator<Item = usize> + '_ {
        self.mats.keys().copied()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.mats.contains_key(&g)
    }

    pub fn get(&self, g: usize) -> &Matrix<Scalar> {
        &self.mats[&g]
    }

    pub fn restrict(&self, sub: &Subgroup) -> Rep {
        let mats = sub.elems.iter().map(|&g| (g, self.mats[&g].clone())).collect();
        Rep { field: self.field.clone(), dim: self.dim, mats }
    }

    /// The same matrices on relabeled elements; elements mapped to `None` are dropped.
    pub fn relabel(&self, f: impl Fn(usize) -> Option<usize>) -> Rep {
        let mats = self.mats.iter().filter_map(|(&g, m)| f(g).map(|h| (h, m.clone()))).collect();
        Rep { field: self.field.clone(), dim: self.dim, mats }
    }

    /// `^gρ` on `g K g⁻¹`, with `^gρ(x) = ρ(g⁻¹ x g)`.
    pub fn conjugate(&self, group: &FinGroup, g: usize) -> Rep {
        let mats = self.mats.keys().map(|&k| (group.conj(g, k), self.mats[&k].clone())).collect();
        Rep { field: self.field.clone(), dim: self.dim, mats }
    }

    /// The first element of `sub` on which `ρ` is not `θ · I`.
    pub fn isotypic_violation(&self, sub: &Subgroup, theta: &dyn Fn(usize) -> Scalar) -> Option<usize> {
        sub.elems.iter().copied().find(|&k| {
            self.mats.get(&k) != Some(&Matrix::identity(self.dim, &self.field.one()).scale(&theta(k)))
        })
    }

    /// A `K`-invariant positive-definite Hermitian Gram matrix, `Σ ρ(k)ᴴρ(k)`.
    pub fn invariant_form(&self) -> Matrix<Scalar> {
        let mut p = Matrix::zeros(self.dim, self.dim, &self.field.zero());
        for m in self.mats.values() {
            p = p.add(&m.conj_transpose().mul(m));
        }
        p
    }
}

/// Basis of `Hom_{A}(σ, τ)`: matrices `T` with `T σ(a) = τ(a) T` for `a ∈ A`.
pub fn hom_space(elements: &[usize], sigma: &Rep, tau: &Rep) -> Vec<Matrix<Scalar>> {
    let field = sigma.field().clone();
    let (m, n) = (tau.dim(), sigma.dim());
    // unknown T is m×n, variable index i*n + j
    let mut rows = Vec::new();
    for &a in elements {
        let (s, t) = (sigma.get(a), tau.get(a));
        for i in 0..m {
            for j in 0..n {
                let mut row = vec![field.zero(); m * n];
                for l in 0..n {
                    // (T σ)(i,j) = Σ_l T(i,l) σ(l,j)
                    row[i * n + l] = &row[i * n + l] + s.get(l, j);
                }
                for l in 0..m {
                    // (τ T)(i,j) = Σ_l τ(i,l) T(l,j)
                    row[l * n + j] = &row[l * n + j] - t.get(i, l);
                }
                rows.push(row);
            }
        }
    }
    if rows.is_empty() {
        rows.push(vec![field.zero(); m * n]);
    }
    let sys = Matrix::from_rows(rows, m * n, &field.zero());
    sys.kernel()
        .into_iter()
        .map(|v| Matrix::from_rows((0..m).map(|i| v[i * n..(i + 1) * n].to_vec()).collect(), n, &field.zero()))
        .collect()
}

/// `ind_K^H(ρ)` realized on right coset representatives.
#[derive(Clone, Debug)]
pub struct IndSpace<'g> {
    group: &'g FinGroup,
    sub: Subgroup,
    rho: Rep,
    reps: Vec<usize>,
    /// `g = k · reps[i]` stored as `(i, k)`.
    decomp: Vec<(usize, usize)>,
}

impl<'g> IndSpace<'g> {
    pub fn new(group: &'g FinGroup, sub: &Subgroup, rho: &Rep) -> Result<IndSpace<'g>, GroupError> {
        if sub.elems.iter().any(|&k| !rho.contains(k)) {
            return Err(GroupError::DimensionMismatch);
        }
        let reps = group.right_coset_reps(sub);
        let mut decomp = vec![(0, 0); group.order()];
        for (i, &r) in reps.iter().enumerate() {
            for &k in &sub.elems {
                decomp[group.mul(k, r)] = (i, k);
            }
        }
        Ok(IndSpace { group, sub: sub.clone(), rho: rho.restrict(sub), reps, decomp })
    }

    pub fn group(&self) -> &'g FinGroup {
        self.group
    }

    pub fn subgroup(&self) -> &Subgroup {
        &self.sub
    }

    pub fn rho(&self) -> &Rep {
        &self.rho
    }

    pub fn field(&self) -> &Field {
        self.rho.field()
    }

    pub fn coset_reps(&self) -> &[usize] {
        &self.reps
    }

    pub fn dim(&self) -> usize {
        self.reps.len() * self.rho.dim()
    }

    /// `f(g)` for a coordinate vector `f`.
    pub fn eval(&self, f: &[Scalar], g: usize) -> Vec<Scalar> {
        let d = self.rho.dim();
        let (i, k) = self.decomp[g];
        self.rho.get(k).apply(&f[i * d..(i + 1) * d])
    }

    /// Coordinates of the function whose values on representatives are given.
    pub fn coords_from(&self, values: impl Fn(usize) -> Vec<Scalar>) -> Vec<Scalar> {
        self.reps.iter().flat_map(|&r| values(r)).collect()
    }

    /// `f_v`: supported on `K` with `f_v(k) = ρ(k) v`.
    pub fn f_v(&self, v: &[Scalar]) -> Vec<Scalar> {
        let d = self.rho.dim();
        let mut out = vec![self.field().zero(); self.dim()];
        // the coset K itself has representative 0
        out[..d].clone_from_slice(v);
        out
    }

    pub fn basis_vector(&self, idx: usize) -> Vec<Scalar> {
        let mut out = vec![self.field().zero(); self.dim()];
        out[idx] = self.field().one();
        out
    }

    pub fn support(&self, f: &[Scalar]) -> Vec<usize> {
        self.group.elements().filter(|&g| self.eval(f, g).iter().any(|x| !x.is_zero())).collect()
    }

    /// The matrix of `f ↦ (g ↦ f(gh))`.
    pub fn right_action(&self, h: usize) -> Matrix<Scalar> {
        self.map_from(self, |f, g| f(self.group.mul(g, h)))
    }

    /// The matrix of a linear map `src → self` described by the values of
    /// the image function at a point `g`, given the source function.
    pub fn map_from(&self, src: &IndSpace<'_>, image: impl Fn(&dyn Fn(usize) -> Vec<Scalar>, usize) -> Vec<Scalar>) -> Matrix<Scalar> {
        let zero = self.field().zero();
        let mut m = Matrix::zeros(self.dim(), src.dim(), &zero);
        for c in 0..src.dim() {
            let b = src.basis_vector(c);
            let f = |g: usize| src.eval(&b, g);
            let col = self.coords_from(|r| image(&f, r));
            for (r, v) in col.into_iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    /// The induced representation of the whole group.
    pub fn induced_rep(&self) -> Rep {
        let mats = self.group.elements().map(|h| (h, self.right_action(h))).collect();
        Rep { field: self.field().clone(), dim: self.dim(), mats }
    }
}

/// `ind_K^H(ρ)` with its coset section.
pub fn induce<'g>(group: &'g FinGroup, sub: &Subgroup, rho: &Rep) -> Result<(IndSpace<'g>, Rep), GroupError> {
    let space = IndSpace::new(group, sub, rho)?;
    let rep = space.induced_rep();
    Ok((space, rep))
}

/// A function `H → End(V_ρ)`, stored on its support.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeFunc {
    values: BTreeMap<usize, Matrix<Scalar>>,
}

impl HeckeFunc {
    pub fn zero() -> HeckeFunc {
        HeckeFunc { values: BTreeMap::new() }
    }

    pub fn from_values(values: BTreeMap<usize, Matrix<Scalar>>) -> HeckeFunc {
        HeckeFunc { values: values.into_iter().filter(|(_, m)| !m.is_zero()).collect() }
    }

    pub fn get(&self, g: usize) -> Option<&Matrix<Scalar>> {
        self.values.get(&g)
    }

    pub fn support(&self) -> Vec<usize> {
        self.values.keys().copied().collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn add(&self, other: &HeckeFunc) -> HeckeFunc {
        let mut out = self.values.clone();
        for (g, m) in &other.values {
            let v = match out.get(g) {
                Some(x) => x.add(m),
                None => m.clone(),
            };
            out.insert(*g, v);
        }
        HeckeFunc::from_values(out)
    }

    pub fn scale(&self, c: &Scalar) -> HeckeFunc {
        HeckeFunc::from_values(self.values.iter().map(|(g, m)| (*g, m.scale(c))).collect())
    }

    pub fn sub(&self, other: &HeckeFunc) -> HeckeFunc {
        let neg = other.values.iter().map(|(g, m)| (*g, m.map(|x| -x))).collect();
        self.add(&HeckeFunc { values: neg })
    }

    /// The unique `c` with `self = c · other`.
    pub fn ratio_to(&self, other: &HeckeFunc) -> Option<Scalar> {
        let (g, m) = other.values.iter().next()?;
        let c = self.values.get(g)?.ratio_to(m)?;
        if *self == other.scale(&c) {
            Some(c)
        } else {
            None
        }
    }
}

/// `ab = αa + β` for an element `a` of a 2-dimensional algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticRelation {
    pub a: Scalar,
    pub b: Scalar,
}

/// Solves `b d² − a d − 1 = 0` for the rescaling `d` of an element `Φ` with
/// `Φ² = aΦ + b`, so that `(dΦ)² = (q−1)(dΦ) + q` with `q = b d²`.
///
/// With `a ≠ 0` and a candidate `q` (a dimension ratio), `d = (q−1)/a` and
/// `b d² = q` is verified. A repeated root gives `d = a/(2b)` and `q = −1`.
pub fn solve_normalization(rel: &QuadraticRelation, q: &Scalar, rule: &dyn CoeffPlusRule) -> Result<(Scalar, Scalar), GroupError> {
    let field = rel.a.field().clone();
    if rel.b.is_zero() {
        return Err(GroupError::Unsolvable("constant term is zero".into()));
    }
    let disc = &(&rel.a * &rel.a) + &(&field.int(4) * &rel.b);
    if disc.is_zero() {
        let d = &rel.a * &(&field.int(2) * &rel.b).inv()?;
        let q = &rel.b * &(&d * &d);
        if !rule.is_plus(&q)? {
            return Err(GroupError::Unsolvable(format!("repeated root gives q = {q}, not plus")));
        }
        return Ok((d, q));
    }
    if rel.a.is_zero() {
        return Err(GroupError::Unsolvable("linear coefficient is zero, forcing q = 1".into()));
    }
    let d = &(q - &field.one()) * &rel.a.inv()?;
    if &rel.b * &(&d * &d) != *q {
        return Err(GroupError::Unsolvable(format!("d = {d} gives b d^2 = {} instead of q = {q}", &rel.b * &(&d * &d))));
    }
    Ok((d, q.clone()))
}

/// The idempotent decomposition of `ind_K^H(ρ)` into two pieces.
#[derive(Clone, Debug)]
pub struct TwoDecomposition {
    pub generator: usize,
    pub relation: QuadraticRelation,
    /// Projections on the induced space, smaller piece first.
    pub projections: [Matrix<Scalar>; 2],
    pub dims: [usize; 2],
}

/// The normalized `Φ_h` and its scalars.
#[derive(Clone, Debug)]
pub struct NormalizedGenerator {
    pub phi: HeckeFunc,
    pub raw: QuadraticRelation,
    pub d: Scalar,
    pub q: Scalar,
}

/// `H(H, (K, ρ))` with convolution, realized through `ind_K^H(ρ)`.
#[derive(Clone, Debug)]
pub struct ConvolutionAlgebra<'g> {
    ind: IndSpace<'g>,
    left_reps: Vec<usize>,
}

impl<'g> ConvolutionAlgebra<'g> {
    pub fn new(group: &'g FinGroup, sub: &Subgroup, rho: &Rep) -> Result<ConvolutionAlgebra<'g>, GroupError> {
        let ind = IndSpace::new(group, sub, rho)?;
        let left_reps = group.left_coset_reps(sub);
        Ok(ConvolutionAlgebra { ind, left_reps })
    }

    pub fn ind(&self) -> &IndSpace<'g> {
        &self.ind
    }

    fn group(&self) -> &'g FinGroup {
        self.ind.group
    }

    fn k(&self) -> &Subgroup {
        &self.ind.sub
    }

    fn rho(&self) -> &Rep {
        &self.ind.rho
    }

    fn field(&self) -> &Field {
        self.ind.field()
    }

    pub fn unit(&self) -> HeckeFunc {
        HeckeFunc::from_values(self.k().elems.iter().map(|&k| (k, self.rho().get(k).clone())).collect())
    }

    /// Basis of `Hom_{K∩gKg⁻¹}(^gρ, ρ)`.
    pub fn intertwiner_space(&self, g: usize) -> Vec<Matrix<Scalar>> {
        let group = self.group();
        let inter = self.k().intersect(&self.k().conjugate(group, g));
        let conj = self.rho().conjugate(group, g);
        hom_space(inter.elements(), &conj, self.rho())
    }

    /// All double coset representatives of `K\H/K`.
    pub fn double_cosets(&self) -> Vec<usize> {
        self.group().double_cosets(self.k(), self.k())
    }

    /// Double cosets with nonzero intertwiner spaces, with their bases.
    pub fn intertwining_cosets(&self) -> Vec<(usize, Vec<Matrix<Scalar>>)> {
        self.double_cosets()
            .into_iter()
            .map(|g| (g, self.intertwiner_space(g)))
            .filter(|(_, b)| !b.is_empty())
            .collect()
    }

    pub fn end_dimension(&self) -> usize {
        self.intertwining_cosets().iter().map(|(_, b)| b.len()).sum()
    }

    /// The bi-equivariant function on `KgK` with value `a` at `g`.
    pub fn extend(&self, g: usize, a: &Matrix<Scalar>) -> Result<HeckeFunc, GroupError> {
        let group = self.group();
        let mut values: BTreeMap<usize, Matrix<Scalar>> = BTreeMap::new();
        for &k1 in &self.k().elems {
            for &k2 in &self.k().elems {
                let x = group.mul(group.mul(k1, g), k2);
                let v = self.rho().get(k1).mul(a).mul(self.rho().get(k2));
                match values.get(&x) {
                    Some(old) if *old != v => return Err(GroupError::NotIntertwining(g)),
                    Some(_) => {}
                    None => {
                        values.insert(x, v);
                    }
                }
            }
        }
        Ok(HeckeFunc::from_values(values))
    }

    /// One basis function per intertwining double coset and intertwiner.
    pub fn basis(&self) -> Result<Vec<HeckeFunc>, GroupError> {
        let mut out = Vec::new();
        for (g, mats) in self.intertwining_cosets() {
            for a in &mats {
                out.push(self.extend(g, a)?);
            }
        }
        Ok(out)
    }

    /// The first element where `φ(k₁gk₂) = ρ(k₁)φ(g)ρ(k₂)` fails.
    pub fn bi_equivariance_violation(&self, phi: &HeckeFunc) -> Option<usize> {
        let group = self.group();
        let zero = Matrix::zeros(self.rho().dim(), self.rho().dim(), &self.field().zero());
        let at = |g: usize| phi.get(g).cloned().unwrap_or_else(|| zero.clone());
        for g in group.elements() {
            let v = at(g);
            for &k1 in &self.k().elems {
                for &k2 in &self.k().elems {
                    let x = group.mul(group.mul(k1, g), k2);
                    if at(x) != self.rho().get(k1).mul(&v).mul(self.rho().get(k2)) {
                        return Some(g);
                    }
                }
            }
        }
        None
    }

    /// `(φ₁ * φ₂)(g) = Σ_{h ∈ H/K} φ₁(h) φ₂(h⁻¹g)`.
    pub fn convolve(&self, a: &HeckeFunc, b: &HeckeFunc) -> HeckeFunc {
        let group = self.group();
        let d = self.rho().dim();
        let zero = Matrix::zeros(d, d, &self.field().zero());
        let mut values = BTreeMap::new();
        for g in group.elements() {
            let mut acc = zero.clone();
            for &h in &self.left_reps {
                if let (Some(x), Some(y)) = (a.get(h), b.get(group.mul(group.inv(h), g))) {
                    acc = acc.add(&x.mul(y));
                }
            }
            values.insert(g, acc);
        }
        HeckeFunc::from_values(values)
    }

    /// `(Φf)(g) = Σ_{h ∈ H/K} φ(h) f(h⁻¹g)`.
    pub fn to_end(&self, phi: &HeckeFunc) -> Matrix<Scalar> {
        let group = self.group();
        let d = self.rho().dim();
        self.ind.map_from(&self.ind, |f, g| {
            let mut acc = vec![self.field().zero(); d];
            for &h in &self.left_reps {
                if let Some(m) = phi.get(h) {
                    let v = m.apply(&f(group.mul(group.inv(h), g)));
                    for (x, y) in acc.iter_mut().zip(v) {
                        *x = &*x + &y;
                    }
                }
            }
            acc
        })
    }

    /// `φ(g)v = (Φ f_v)(g)`.
    pub fn from_end(&self, end: &Matrix<Scalar>) -> HeckeFunc {
        let d = self.rho().dim();
        let images: Vec<Vec<Scalar>> = (0..d)
            .map(|j| {
                let mut v = vec![self.field().zero(); d];
                v[j] = self.field().one();
                end.apply(&self.ind.f_v(&v))
            })
            .collect();
        let values = self
            .group()
            .elements()
            .map(|g| {
                let cols: Vec<Vec<Scalar>> = images.iter().map(|f| self.ind.eval(f, g)).collect();
                let rows = (0..d).map(|i| cols.iter().map(|c| c[i].clone()).collect()).collect();
                (g, Matrix::from_rows(rows, d, &self.field().zero()))
            })
            .collect();
        HeckeFunc::from_values(values)
    }

    fn nontrivial_generator(&self) -> Result<(usize, Matrix<Scalar>), GroupError> {
        let cosets = self.intertwining_cosets();
        let dim: usize = cosets.iter().map(|(_, b)| b.len()).sum();
        if dim != 2 || cosets.len() != 2 {
            return Err(GroupError::EndDimension(dim));
        }
        let (h, basis) = cosets.into_iter().find(|(g, _)| !self.k().contains(*g)).expect("two cosets");
        Ok((h, basis[0].clone()))
    }

    /// Reads `Φ² = aΦ + b·unit` for `Φ` supported on `KhK`.
    pub fn quadratic_relation(&self, phi: &HeckeFunc, h: usize) -> Result<QuadraticRelation, GroupError> {
        let sq = self.convolve(phi, phi);
        let d = self.rho().dim();
        let zero = Matrix::zeros(d, d, &self.field().zero());
        let b = sq
            .get(0)
            .unwrap_or(&zero)
            .scalar_multiple_of_identity()
            .ok_or_else(|| GroupError::Unsolvable("value at 1 is not scalar".into()))?;
        let at_h = sq.get(h).cloned().unwrap_or_else(|| zero.clone());
        let phi_h = phi.get(h).ok_or(GroupError::NotIntertwining(h))?;
        let a = if at_h.is_zero() {
            self.field().zero()
        } else {
            at_h.ratio_to(phi_h).ok_or_else(|| GroupError::Unsolvable("value at h is not a multiple".into()))?
        };
        if sq != phi.scale(&a).add(&self.unit().scale(&b)) {
            return Err(GroupError::Unsolvable("square is not in the span of the generator and the unit".into()));
        }
        Ok(QuadraticRelation { a, b })
    }

    /// Splits the induced space with the idempotents of the 2-dimensional
    /// endomorphism algebra.
    pub fn decompose_two(&self) -> Result<TwoDecomposition, GroupError> {
        let (h, a0) = self.nontrivial_generator()?;
        let phi = self.extend(h, &a0)?;
        let rel = self.quadratic_relation(&phi, h)?;
        let field = self.field().clone();
        let disc = &(&rel.a * &rel.a) + &(&field.int(4) * &rel.b);
        // p = λ + μΦ with μ²(a² + 4b) = 1 and λ = (1 − μa)/2
        let mu = disc.sqrt()?.inv()?;
        let lambda = &(&field.one() - &(&mu * &rel.a)) * &field.frac(1, 2);
        let n = self.ind.dim();
        let id = Matrix::identity(n, &field.one());
        let p1 = id.scale(&lambda).add(&self.to_end(&phi).scale(&mu));
        let p2 = id.sub(&p1);
        let (r1, r2) = (p1.rank(), p2.rank());
        let (projections, dims) = if r1 <= r2 { ([p1, p2], [r1, r2]) } else { ([p2, p1], [r2, r1]) };
        Ok(TwoDecomposition { generator: h, relation: rel, projections, dims })
    }

    fn check_generator(&self, h: usize) -> Result<(), GroupError> {
        if self.k().contains(h) {
            return Err(GroupError::GeneratorInSubgroup);
        }
        if self.intertwiner_space(h).is_empty() {
            return Err(GroupError::NotIntertwining(h));
        }
        Ok(())
    }

    /// The plus-selected ratio of the dimensions of the two pieces, or 1.
    pub fn q_parameter(&self, h: usize, rule: &dyn CoeffPlusRule) -> Result<Scalar, GroupError> {
        self.check_generator(h)?;
        let dec = self.decompose_two()?;
        let field = self.field();
        if dec.dims[0] == dec.dims[1] {
            return Ok(field.one());
        }
        let ratio = field.frac(dec.dims[0] as i64, dec.dims[1] as i64);
        Ok(scalars::coeffplus_select(rule, &ratio)?)
    }

    /// `d·Φ'_h` satisfying `Φ² = (q−1)Φ + q·unit`.
    pub fn normalized_generator(&self, h: usize, rule: &dyn CoeffPlusRule) -> Result<NormalizedGenerator, GroupError> {
        self.check_generator(h)?;
        let q = self.q_parameter(h, rule)?;
        let a0 = self.intertwiner_space(h).remove(0);
        let phi = self.extend(h, &a0)?;
        let raw = self.quadratic_relation(&phi, h)?;
        let (d, q) = solve_normalization(&raw, &q, rule)?;
        Ok(NormalizedGenerator { phi: phi.scale(&d), raw, d, q })
    }
}

/// Double coset representatives of `K\H/K'`.
pub fn double_cosets(group: &FinGroup, k: &Subgroup, k2: &Subgroup) -> Vec<usize> {
    group.double_cosets(k, k2)
}

/// Basis of `Hom_{K∩gKg⁻¹}(^gρ, ρ)`.
pub fn intertwiner_space(group: &FinGroup, k: &Subgroup, rho: &Rep, g: usize) -> Vec<Matrix<Scalar>> {
    let inter = k.intersect(&k.conjugate(group, g));
    hom_space(inter.elements(), &rho.conjugate(group, g), rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::RealAboveOne;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s4() -> (FinGroup, Subgroup) {
        let g = FinGroup::symmetric(4).unwrap();
        let k = g.point_stabilizer_chain(3).unwrap();
        (g, k)
    }

    #[test]
    fn group_orders_and_validation() {
        assert_eq!(FinGroup::symmetric(4).unwrap().order(), 24);
        assert_eq!(FinGroup::symmetric(6).unwrap().order(), 720);
        assert_eq!(FinGroup::gl2(2).unwrap().order(), 6);
        assert_eq!(FinGroup::gl2(3).unwrap().order(), 48);
        assert_eq!(FinGroup::gl2(5).unwrap().order(), 480);
        assert_eq!(FinGroup::sl2(3).unwrap().order(), 24);
        assert_eq!(FinGroup::dihedral(4).order(), 8);
        assert!(FinGroup::gl2(4).is_err());
        for g in [FinGroup::gl2(3).unwrap(), FinGroup::dihedral(5), FinGroup::symmetric(5).unwrap(), FinGroup::gl2(5).unwrap()] {
            g.validate().unwrap();
        }
        let p = FinGroup::direct_product(&FinGroup::cyclic(2), &FinGroup::cyclic(3));
        p.validate().unwrap();
        assert_eq!(p.order(), 6);
        let bad = vec![vec![0, 1, 2], vec![1, 0, 0], vec![2, 1, 0]];
        assert!(FinGroup::from_table(bad).is_err());
    }

    #[test]
    fn named_subgroups() {
        let g = FinGroup::gl2(3).unwrap();
        assert_eq!(g.borel(true).unwrap().order(), 12);
        assert_eq!(g.unipotent(false).unwrap().order(), 3);
        assert_eq!(g.torus().unwrap().order(), 4);
        assert_eq!(g.monomial().unwrap().order(), 8);
        let (s, k) = s4();
        assert_eq!(k.order(), 6);
        assert_eq!(s.label(s.find(&[0, 1, 3, 2]).unwrap()), "(3 4)");
    }

    #[test]
    fn double_coset_examples() {
        let (g, k) = s4();
        let reps = double_cosets(&g, &k, &k);
        assert_eq!(reps.len(), 2);
        let sizes: Vec<usize> = reps.iter().map(|&r| g.double_coset(&k, r, &k).len()).collect();
        assert_eq!(sizes, vec![6, 18]);
        assert_eq!(double_cosets(&g, &g.whole(), &g.whole()), vec![0]);
        let gl = FinGroup::gl2(2).unwrap();
        let b = gl.borel(true).unwrap();
        assert_eq!(double_cosets(&gl, &b, &b).len(), 2);
    }

    #[test]
    fn induction_examples() {
        let (g, k) = s4();
        let q = Field::rationals();
        let (space, rep) = induce(&g, &k, &Rep::trivial(&k, &q)).unwrap();
        assert_eq!(space.dim(), 4);
        rep.validate(&g).unwrap();
        let gl = FinGroup::gl2(3).unwrap();
        let b = gl.borel(true).unwrap();
        let (space, rep) = induce(&gl, &b, &Rep::trivial(&b, &q)).unwrap();
        assert_eq!(space.dim(), 4);
        rep.validate(&gl).unwrap();
        // ind_K^K is ρ itself
        let chi = Rep::character(&g.whole(), &q, |x| {
            let sign = g.key(x).iter().enumerate().flat_map(|(i, &a)| g.key(x)[i + 1..].iter().map(move |&b| a > b)).filter(|&v| v).count();
            if sign % 2 == 0 { q.one() } else { q.int(-1) }
        });
        chi.validate(&g).unwrap();
        let (space, rep) = induce(&g, &g.whole(), &chi).unwrap();
        assert_eq!(space.dim(), 1);
        assert_eq!(rep, chi);
        // f_v is supported on K
        let (space, _) = induce(&g, &k, &Rep::trivial(&k, &q)).unwrap();
        assert_eq!(space.support(&space.f_v(&[q.one()])), k.elements().to_vec());
    }

    #[test]
    fn intertwiner_examples() {
        let (g, k) = s4();
        let q = Field::rationals();
        let triv = Rep::trivial(&k, &q);
        let t34 = g.find(&[0, 1, 3, 2]).unwrap();
        assert_eq!(intertwiner_space(&g, &k, &triv, t34).len(), 1);
        assert_eq!(intertwiner_space(&g, &k, &triv, 0).len(), 1);
        // sign character of K = S3 against its conjugate by (3 4): K ∩ ^gK = Sym{1,2},
        // both restrictions equal the sign, so the space is 1-dimensional; a
        // twisted character on a torus gives 0.
        let gl = FinGroup::gl2(3).unwrap();
        let t = gl.torus().unwrap();
        let chi = Rep::character(&t, &q, |x| if gl.key(x)[0] == 2 { q.int(-1) } else { q.one() });
        chi.validate(&gl).unwrap();
        let w = gl.find(&[0, 1, 1, 0]).unwrap();
        assert!(intertwiner_space(&gl, &t, &chi, w).is_empty());
        assert_eq!(intertwiner_space(&gl, &t, &chi, 0).len(), 1);
    }

    #[test]
    fn convolution_unit_and_support() {
        let (g, k) = s4();
        let q = Field::rationals();
        let alg = ConvolutionAlgebra::new(&g, &k, &Rep::trivial(&k, &q)).unwrap();
        let t34 = g.find(&[0, 1, 3, 2]).unwrap();
        let phi = alg.extend(t34, &alg.intertwiner_space(t34)[0]).unwrap();
        assert_eq!(alg.convolve(&alg.unit(), &phi), phi);
        assert_eq!(alg.convolve(&phi, &alg.unit()), phi);
        let sq = alg.convolve(&phi, &phi);
        let mut allowed: BTreeSet<usize> = k.elements().iter().copied().collect();
        allowed.extend(g.double_coset(&k, t34, &k));
        assert!(sq.support().iter().all(|x| allowed.contains(x)));
        assert_eq!(alg.bi_equivariance_violation(&sq), None);
        assert_eq!(alg.end_dimension(), 2);
    }

    #[test]
    fn end_transport() {
        let gl = FinGroup::gl2(3).unwrap();
        let b = gl.borel(true).unwrap();
        let q = Field::rationals();
        let alg = ConvolutionAlgebra::new(&gl, &b, &Rep::trivial(&b, &q)).unwrap();
        let n = alg.ind().dim();
        assert_eq!(alg.to_end(&alg.unit()), Matrix::identity(n, &q.one()));
        let basis = alg.basis().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut random = || {
            basis.iter().fold(HeckeFunc::zero(), |acc, f| acc.add(&f.scale(&q.int(rng.gen_range(-4..5)))))
        };
        for _ in 0..5 {
            let (x, y, z) = (random(), random(), random());
            assert_eq!(alg.from_end(&alg.to_end(&x)), x);
            assert_eq!(alg.to_end(&alg.convolve(&x, &y)), alg.to_end(&x).mul(&alg.to_end(&y)));
            assert_eq!(alg.convolve(&alg.convolve(&x, &y), &z), alg.convolve(&x, &alg.convolve(&y, &z)));
            // endomorphisms commute with the group action
            let e = alg.to_end(&x);
            for h in [1, 7, 30] {
                let act = alg.ind().right_action(h);
                assert_eq!(e.mul(&act), act.mul(&e));
            }
        }
        // Φ(V_ρ) lies in functions supported on KhK exactly when φ is supported there
        let w = gl.find(&[0, 1, 1, 0]).unwrap();
        let phi = alg.extend(w, &alg.intertwiner_space(w)[0]).unwrap();
        let img = alg.to_end(&phi).apply(&alg.ind().f_v(&[q.one()]));
        assert_eq!(alg.ind().support(&img), gl.double_coset(&b, w, &b));
    }

    #[test]
    fn decompositions_and_q() {
        let q = Field::rationals();
        let (s, k) = s4();
        let gl2 = FinGroup::gl2(2).unwrap();
        let b2 = gl2.borel(true).unwrap();
        let gl3 = FinGroup::gl2(3).unwrap();
        let b3 = gl3.borel(true).unwrap();
        let cases = [(&s, &k, [1, 3], 3), (&gl2, &b2, [1, 2], 2), (&gl3, &b3, [1, 3], 3)];
        for (g, sub, dims, qq) in cases {
            let alg = ConvolutionAlgebra::new(g, sub, &Rep::trivial(sub, &q)).unwrap();
            let dec = alg.decompose_two().unwrap();
            assert_eq!(dec.dims, dims);
            let [p1, p2] = &dec.projections;
            let n = alg.ind().dim();
            assert_eq!(p1.add(p2), Matrix::identity(n, &q.one()));
            assert!(p1.mul(p2).is_zero());
            assert_eq!(&p1.mul(p1), p1);
            let h = dec.generator;
            assert_eq!(alg.q_parameter(h, &RealAboveOne).unwrap(), q.int(qq));
            // invariance under moving h inside KhK
            for x in g.double_coset(sub, h, sub) {
                assert_eq!(alg.q_parameter(x, &RealAboveOne).unwrap(), q.int(qq));
            }
            let ng = alg.normalized_generator(h, &RealAboveOne).unwrap();
            let lhs = alg.convolve(&ng.phi, &ng.phi);
            let rhs = ng.phi.scale(&q.int(qq - 1)).add(&alg.unit().scale(&q.int(qq)));
            assert_eq!(lhs, rhs);
            assert!(matches!(alg.normalized_generator(0, &RealAboveOne), Err(GroupError::GeneratorInSubgroup)));
        }
    }

    #[test]
    fn normalization_branches() {
        let q = Field::rationals();
        // Φ² = Φ + 2 is already normalized for q = 2
        let rel = QuadraticRelation { a: q.int(1), b: q.int(2) };
        assert_eq!(solve_normalization(&rel, &q.int(2), &RealAboveOne).unwrap(), (q.one(), q.int(2)));
        // hand-built algebra with a repeated root: x² = 2x − 1
        let rel = QuadraticRelation { a: q.int(2), b: q.int(-1) };
        let (d, qq) = solve_normalization(&rel, &q.int(7), &RealAboveOne).unwrap();
        assert_eq!((d.clone(), qq.clone()), (q.int(-1), q.int(-1)));
        // (dx)² = (q−1)(dx) + q in the algebra with basis {1, x}
        let (a, b) = (&rel.a * &d, &rel.b * &(&d * &d));
        assert_eq!((a, b), (&qq - &q.one(), qq));
        let rel = QuadraticRelation { a: q.zero(), b: q.int(1) };
        assert!(solve_normalization(&rel, &q.int(2), &RealAboveOne).is_err());
        let rel = QuadraticRelation { a: q.int(1), b: q.int(1) };
        assert!(solve_normalization(&rel, &q.int(2), &RealAboveOne).is_err());
    }

    #[test]
    fn rep_validation_catches_bad_assignments() {
        let g = FinGroup::cyclic(3);
        let q = Field::rationals();
        let m = Matrix::from_rows(vec![vec![q.int(-1)]], 1, &q.zero());
        assert!(Rep::from_generators(&g, &q, 1, &[(1, m)]).is_err());
        let f = Field::new(3, None).unwrap();
        let m = Matrix::from_rows(vec![vec![f.zeta()]], 1, &f.zero());
        let r = Rep::from_generators(&g, &f, 1, &[(1, m)]).unwrap();
        assert_eq!(r.domain().count(), 3);
    }
}

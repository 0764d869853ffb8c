//! The acceptance suite behind `hecke verify all`.
//!
//! Each criterion returns its verdict, a short detail line and the time it
//! took; the time budget is part of the verdict.

use std::time::{Duration, Instant};

use hecke_core::cover_model::{CoverFamily, TFamily};
use hecke_core::finite_groups::{ConvolutionAlgebra, FinGroup, Rep};
use hecke_core::geometry;
use hecke_core::hecke_abstract::{
    pauli_cocycle, twisted_center_dimension, Character, Cocycle, CoxeterSystem, FiniteCoxeter, HeckeAlgebra, HeckeParams,
    OmegaAction, ProductAlgElem,
};
use hecke_core::linalg::Matrix;
use hecke_core::rational::{self, Rational};
use hecke_core::reflections::{self, AffineIso};
use hecke_core::rootdata::{self, LeviSubset};
use hecke_core::scalars::{Field, RealAboveOne, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{FieldCfg, RunConfig};
use crate::error::CliError;
use crate::presets;

#[derive(Clone, Debug)]
pub struct Criterion {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Duration,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({:.2} s of {} s) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs(),
            self.detail
        )
    }
}

type Outcome = Result<String, String>;

fn timed(id: u32, title: &'static str, limit_secs: u64, f: impl FnOnce() -> Outcome) -> Criterion {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let limit = Duration::from_secs(limit_secs);
    let (mut pass, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if elapsed > limit {
        pass = false;
        detail = format!("over the time limit; {detail}");
    }
    Criterion { id, title, pass, detail, elapsed, limit }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn preset(name: &str) -> Result<RunConfig, String> {
    presets::load(name).map_err(s)
}

fn cover(name: &str) -> Result<(CoverFamily, TFamily), String> {
    preset(name)?.cover().map_err(s)
}

/// The three (H, K, trivial) instances with their expected `q`.
pub fn q_instances() -> Vec<(&'static str, FinGroup, &'static str, i64)> {
    vec![
        ("GL2(F2)/B", FinGroup::gl2(2).expect("GL2(F2)"), "borel", 2),
        ("S4/S3", FinGroup::symmetric(4).expect("S4"), "s3", 3),
        ("GL2(F3)/B", FinGroup::gl2(3).expect("GL2(F3)"), "borel", 3),
    ]
}

/// The non-identity intertwining double coset representative.
pub fn nontrivial_intertwiner(alg: &ConvolutionAlgebra<'_>) -> Result<usize, String> {
    let cosets = alg.intertwining_cosets();
    ensure(cosets.len() == 2, || format!("expected a 2-dimensional End algebra, found {} cosets", cosets.len()))?;
    cosets.iter().map(|(g, _)| *g).find(|&g| !alg.ind().subgroup().contains(g)).ok_or_else(|| "no nontrivial coset".to_string())
}

fn q_instance(group: &FinGroup, sub: &str, field: &Field) -> Result<(Scalar, Duration), String> {
    let start = Instant::now();
    let k = crate::config::build_subgroup(group, &crate::config::SubCfg::Name(sub.into())).map_err(s)?;
    let rho = Rep::trivial(&k, field);
    let alg = ConvolutionAlgebra::new(group, &k, &rho).map_err(s)?;
    let h = nontrivial_intertwiner(&alg)?;
    let q = alg.q_parameter(h, &RealAboveOne).map_err(s)?;
    Ok((q, start.elapsed()))
}

pub fn criterion_1() -> Criterion {
    timed(1, "q-parameters of (GL2(F2), B), (S4, S3), (GL2(F3), B)", 15, || {
        let f = Field::rationals();
        let mut parts = Vec::new();
        for (name, group, sub, want) in q_instances() {
            let (q, t) = q_instance(&group, sub, &f)?;
            ensure(q == f.int(want), || format!("{name}: q = {q}, expected {want}"))?;
            ensure(t < Duration::from_secs(5), || format!("{name}: took {t:?}"))?;
            parts.push(format!("{name}: q = {q}"));
        }
        Ok(parts.join("; "))
    })
}

pub fn criterion_2() -> Criterion {
    timed(2, "normalized generator satisfies the quadratic relation", 15, || {
        let f = Field::rationals();
        let mut parts = Vec::new();
        for (name, group, sub, want) in q_instances() {
            let start = Instant::now();
            let k = crate::config::build_subgroup(&group, &crate::config::SubCfg::Name(sub.into())).map_err(s)?;
            let rho = Rep::trivial(&k, &f);
            let alg = ConvolutionAlgebra::new(&group, &k, &rho).map_err(s)?;
            let h = nontrivial_intertwiner(&alg)?;
            let gen = alg.normalized_generator(h, &RealAboveOne).map_err(s)?;
            let q = gen.q.clone();
            let lhs = alg.convolve(&gen.phi, &gen.phi);
            let rhs = gen.phi.scale(&(&q - &f.one())).add(&alg.unit().scale(&q));
            ensure(lhs == rhs, || format!("{name}: phi * phi differs from (q-1) phi + q"))?;
            ensure(q == f.int(want), || format!("{name}: q = {q}"))?;
            ensure(start.elapsed() < Duration::from_secs(5), || format!("{name}: over 5 s"))?;
            parts.push(format!("{name}: phi^2 = {} phi + {}", &q - &f.one(), q));
        }
        Ok(parts.join("; "))
    })
}

pub fn criterion_3() -> Criterion {
    timed(3, "constant term of Theta_{x|y} Theta_{y|x}", 2, || {
        let mut parts = Vec::new();
        for (name, d) in [("gl2f2-cover", 2), ("gl2f3-cover", 3)] {
            let (fam, _) = cover(name)?;
            let f = fam.field().clone();
            let (x, y) = (fam.point("x").map_err(s)?, fam.point("y").map_err(s)?);
            for v in [1, -7] {
                let got = fam.constant_term(x, y, &[f.int(v)]);
                let want = vec![f.frac(v, d)];
                ensure(got == want, || format!("{name}: constant term at v = {v} is {got:?}"))?;
            }
            parts.push(format!("{name}: v/{d}"));
        }
        Ok(parts.join("; "))
    })
}

pub fn criterion_4() -> Criterion {
    timed(4, "normalization chain in the GL2(F2) model", 5, || {
        let (fam, t) = cover("gl2f2-cover")?;
        let f = fam.field().clone();
        let x0 = fam.base();
        let st = fam.structure().map_err(s)?;
        ensure(st.simple.len() == 1, || format!("expected one simple reflection, got {:?}", st.simple))?;
        let sref = st.simple[0];
        let id = Matrix::identity(fam.ind(x0).dim(), &f.one());
        let phi = fam.phi_op(&t, x0, sref).map_err(s)?;
        let r2 = f.sqrt_p().map_err(s)?;
        let r2inv = r2.inv().map_err(s)?;
        ensure(phi.mul(&phi) == phi.scale(&r2inv).add(&id), || "Phi_s^2 != (1/sqrt 2) Phi_s + 1 for T = id".into())?;
        let (tn, rec) = fam.normalize_t(&t, &RealAboveOne).map_err(s)?;
        ensure(rec.len() == 1 && rec[0].d == r2, || format!("d_s = {:?}", rec.iter().map(|r| r.d.to_string()).collect::<Vec<_>>()))?;
        let phi = fam.phi_op(&tn, x0, sref).map_err(s)?;
        ensure(phi.mul(&phi) == phi.add(&id.scale(&f.int(2))), || "normalized Phi_s^2 != Phi_s + 2".into())?;
        let (q1, _) = q_instance(&FinGroup::gl2(2).map_err(s)?, "borel", &Field::rationals())?;
        ensure(rec[0].q == f.int(2) && q1 == Field::rationals().int(2), || format!("q_s = {}, q-parameter = {q1}", rec[0].q))?;
        Ok(format!("d_s = {}, q_s = {}", rec[0].d, rec[0].q))
    })
}

pub fn criterion_5() -> Criterion {
    timed(5, "structure theorem at model scale", 10, || {
        let mut parts = Vec::new();
        for (name, q) in [("gl2f2-cover", 2), ("gl2f3-cover", 3)] {
            let (fam, t) = cover(name)?;
            let sr = fam.structure_report(&t, &RealAboveOne).map_err(s)?;
            let failures: Vec<String> = sr.checks.failures().map(|c| format!("{}: {:?}", c.name, c.witness)).collect();
            ensure(failures.is_empty(), || format!("{name}: {}", failures.join("; ")))?;
            ensure(sr.q.len() == 1 && sr.q[0].1 == fam.field().int(q), || format!("{name}: q table {:?}", sr.q))?;
            ensure(fam.w_order() == 2 && sr.omega == vec![0], || format!("{name}: unexpected W or Omega"))?;
            parts.push(format!("{name}: W = {{1, s}}, q_s = {q}, {} products transported", fam.w_order() * fam.w_order()));
        }
        Ok(parts.join("; "))
    })
}

fn finite_coxeter(cfg: &RunConfig) -> Result<HeckeAlgebra<FiniteCoxeter>, String> {
    let ctx = cfg.hecke_algebra(24).map_err(s)?;
    let cox = FiniteCoxeter::from_system(&ctx.data, 64).map_err(s)?;
    let q = ctx.algebra.params().values().to_vec();
    HeckeAlgebra::new(cox, OmegaAction::trivial(q.len()), Cocycle::Trivial, HeckeParams::unchecked(q), ctx.field.clone()).map_err(s)
}

pub fn criterion_6() -> Criterion {
    timed(6, "associativity and braid relations", 60, || {
        let mut parts = Vec::new();
        let a1 = preset("affine-a1")?.hecke_algebra(24).map_err(s)?;
        let basis = a1.algebra.basis_ball(4);
        if let Some((i, j, k)) = a1.algebra.check_associativity(&basis).map_err(s)? {
            return Err(format!("affine A1: associativity fails at basis triple ({i}, {j}, {k})"));
        }
        parts.push(format!("affine A1: {} triples", basis.len().pow(3)));
        if let Some(w) = a1.algebra.check_braid(6).map_err(s)? {
            return Err(format!("affine A1: reduced word {w:?}"));
        }
        for name in ["finite-a2", "finite-b2"] {
            let cfg = preset(name)?;
            let alg = cfg.hecke_algebra(24).map_err(s)?;
            let basis = alg.algebra.basis_ball(3);
            if let Some((i, j, k)) = alg.algebra.check_associativity(&basis).map_err(s)? {
                return Err(format!("{name}: associativity fails at ({i}, {j}, {k})"));
            }
            if let Some(w) = alg.algebra.check_braid(6).map_err(s)? {
                return Err(format!("{name}: reduced word {w:?}"));
            }
            let fc = finite_coxeter(&cfg)?;
            if let Some(w) = fc.check_braid(6).map_err(s)? {
                return Err(format!("{name} (tables): reduced word {w:?}"));
            }
            parts.push(format!("{name}: {} triples", basis.len().pow(3)));
        }
        let ext = preset("affine-a1-ext")?.hecke_algebra(24).map_err(s)?;
        let basis = ext.algebra.basis_ball(3);
        if let Some((i, j, k)) = ext.algebra.check_associativity(&basis).map_err(s)? {
            return Err(format!("extended affine A1: associativity fails at ({i}, {j}, {k})"));
        }
        parts.push("braid words up to length 6 agree".into());
        Ok(parts.join("; "))
    })
}

fn iso_translation(v: i64) -> AffineIso {
    AffineIso::translation_by(vec![rational::int(v)])
}

pub fn criterion_7() -> Criterion {
    timed(7, "reflection-group facts", 10, || {
        let cfg = preset("affine-a1")?;
        let (data, _) = cfg.reflection_data().map_err(s)?;
        let walls: Vec<(Rational, Rational)> = data.walls().iter().map(|w| (w.gradient[0].clone(), w.constant.clone())).collect();
        // x = c  ⟺  g·x + k = 0 with c = −k/g
        let mut positions: Vec<Rational> = walls.iter().map(|(g, k)| -(k / g)).collect();
        positions.sort();
        ensure(positions == vec![rational::int(0), rational::int(1)], || format!("walls at {positions:?}"))?;
        let t2 = iso_translation(2);
        let word = data.word_of(&t2).map_err(s)?;
        let s0 = walls.iter().position(|(g, k)| (-(k / g)) == rational::int(0)).expect("wall at 0");
        let s1 = 1 - s0;
        ensure(word == vec![s1, s0], || format!("reduced word of x -> x+2 is {word:?}"))?;
        ensure(data.length(&t2).map_err(s)? == 2, || "length of x -> x+2".into())?;
        let ext = preset("affine-a1-ext")?;
        let (edata, omega) = ext.reflection_data().map_err(s)?;
        let dec = reflections::decompose(&edata, &omega, &iso_translation(1)).map_err(s)?;
        let w = omega.find(&AffineIso::new(Matrix::from_rows(vec![vec![rational::int(-1)]], 1, &rational::int(0)), vec![rational::int(1)]).map_err(s)?);
        ensure(Some(dec.omega) == w && dec.word == vec![s0], || format!("decompose(x -> x+1) = ({}, {:?})", dec.omega.0, dec.word))?;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        for (label, sys) in [("affine A1", data.clone()), ("affine A2", affine_a2()?)] {
            let base = sys.base().clone();
            for _ in 0..100 {
                let len = rng.gen_range(0..=8);
                let word: Vec<usize> = (0..len).map(|_| rng.gen_range(0..sys.rank())).collect();
                let g = sys.word_iso(&word).map_err(s)?;
                let ginv = g.inverse().expect("invertible");
                let d = geometry::distance(sys.arrangement(), &base, &ginv.apply(&base), true).map_err(s)?;
                let l = sys.length(&g).map_err(s)?;
                ensure(l == d, || format!("{label}: word {word:?} has length {l} but distance {d}"))?;
                checked += 1;
            }
        }
        Ok(format!("walls {{x=0, x=1}}, x->x+2 = (s1, s0), x->x+1 = (w, (s0)), {checked} random lengths match distances"))
    })
}

fn affine_a2() -> Result<reflections::ReflectionGroupData, String> {
    let cfg: RunConfig = RunConfig::parse(
        r#"{"schema":1,"arrangement":{"root_system":"A2","kind":"affine","basepoint":["1/5","1/7"]}}"#,
    )
    .map_err(s)?;
    Ok(cfg.reflection_data().map_err(s)?.0)
}

fn product_character(omega: &OmegaAction, a: &Character, b: &Character) -> Result<Character, String> {
    let elems = omega.elements().ok_or("infinite Omega")?;
    Ok(Character::Table(elems.iter().map(|&t| &a.eval(t) * &b.eval(t)).collect()))
}

fn torsor_check<C: CoxeterSystem>(alg: &HeckeAlgebra<C>, chars: &[Character], len: usize) -> Result<(), String> {
    let basis = alg.basis_ball(len);
    for chi in chars {
        for psi in chars {
            let prod = product_character(alg.omega(), chi, psi)?;
            for a in &basis {
                ensure(alg.psi_chi(chi, &alg.psi_chi(psi, a)) == alg.psi_chi(&prod, a), || "Psi_chi Psi_psi != Psi_chi psi".into())?;
            }
        }
    }
    Ok(())
}

pub fn criterion_8() -> Criterion {
    timed(8, "cocycles, coboundaries and the automorphism torsor", 5, || {
        let f4 = Field::new(4, None).map_err(s)?;
        let (omega, mu) = pauli_cocycle(&f4);
        mu.validate(&f4, &omega).map_err(s)?;
        let twisted = twisted_center_dimension(&f4, &mu, &omega).map_err(s)?;
        let plain = twisted_center_dimension(&f4, &Cocycle::Trivial, &omega).map_err(s)?;
        ensure(twisted == 1 && plain == 4, || format!("center dimensions {twisted} and {plain}"))?;

        let mut z2 = preset("affine-a1-ext")?;
        z2.field = Some(FieldCfg { order: 1, prime: None });
        let z2 = z2.hecke_algebra(24).map_err(s)?;
        let q = Field::rationals().roots_of_unity();
        let autos2 = z2.algebra.support_preserving_autos(&q, false, 2).map_err(s)?;
        ensure(autos2.len() == 2, || format!("Z/2 over Q: {} automorphisms", autos2.len()))?;
        torsor_check(&z2.algebra, &autos2, 2)?;

        let z4 = HeckeAlgebra::new(FiniteCoxeter::trivial(), OmegaAction::cyclic_table(4, 0), Cocycle::Trivial, HeckeParams::unchecked(Vec::new()), f4.clone())
            .map_err(s)?;
        let autos4 = z4.support_preserving_autos(&f4.roots_of_unity(), false, 0).map_err(s)?;
        ensure(autos4.len() == 4, || format!("Z/4 over Q(i): {} automorphisms", autos4.len()))?;
        torsor_check(&z4, &autos4, 0)?;
        Ok(format!("Pauli center dimension {twisted} vs {plain}; {} and {} automorphisms", autos2.len(), autos4.len()))
    })
}

/// A random element with up to four terms of length ≤ 3.
pub fn random_element<C: CoxeterSystem>(alg: &HeckeAlgebra<C>, rng: &mut impl Rng) -> ProductAlgElem<C::Elem> {
    let basis = alg.basis_ball(3);
    let f = alg.field();
    let units = f.roots_of_unity();
    let mut out = ProductAlgElem::zero();
    for _ in 0..rng.gen_range(1..=4) {
        let b = &basis[rng.gen_range(0..basis.len())];
        let c = &f.int(rng.gen_range(-3..=3)) * &units[rng.gen_range(0..units.len())];
        out = out.add(&b.scale(&(&c + &f.frac(1, 2))));
    }
    out
}

pub fn criterion_9() -> Criterion {
    timed(9, "anti-involution", 10, || {
        let ctx = preset("affine-a1-ext")?.hecke_algebra(24).map_err(s)?;
        let alg = &ctx.algebra;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for i in 0..100 {
            let a = random_element(alg, &mut rng);
            let b = random_element(alg, &mut rng);
            let sa = alg.star(&a).map_err(s)?;
            ensure(alg.star(&sa).map_err(s)? == a, || format!("pair {i}: star(star(a)) != a"))?;
            let lhs = alg.star(&alg.mul(&a, &b).map_err(s)?).map_err(s)?;
            let rhs = alg.mul(&alg.star(&b).map_err(s)?, &sa).map_err(s)?;
            ensure(lhs == rhs, || format!("pair {i}: star(ab) != star(b) star(a)"))?;
        }
        let (fam, t) = cover("gl2f2-cover")?;
        let (tn, _) = fam.normalize_t(&t, &RealAboveOne).map_err(s)?;
        let (rep, cs) = fam.star_check(&tn).map_err(s)?;
        ensure(rep.all_pass(), || format!("star_check: {rep}"))?;
        let st = fam.structure().map_err(s)?;
        let cs_simple: Vec<&Scalar> = cs.iter().filter(|(w, _)| st.simple.contains(w)).map(|(_, c)| c).collect();
        ensure(!cs_simple.is_empty() && cs_simple.iter().all(|c| c.is_one()), || format!("c_s = {cs_simple:?}"))?;
        Ok("100 random pairs; c_s = 1 in the normalized GL2(F2) model".into())
    })
}

pub fn criterion_10() -> Criterion {
    timed(10, "depth-zero arrangement of A2 along a Levi", 5, || {
        let ctx = preset("a2-levi")?.roots().map_err(s)?;
        let arr = ctx.arrangement().map_err(s)?;
        ensure(arr.dim() == 1 && arr.families().len() == 1 && arr.families()[0].is_periodic(), || {
            format!("dim {} with {} families", arr.dim(), arr.families().len())
        })?;
        let b = ctx.levi.fixed_space(&ctx.rs);
        for p in [-1i64, 2, 3] {
            let pm = Matrix::from_rows(vec![vec![rational::int(p)]], 1, &rational::int(0));
            let other = rootdata::depthzero_arrangement_in_basis(&ctx.rs, &ctx.levi, &ctx.x0, &b.mul(&pm)).map_err(s)?;
            ensure(other.families().len() == 1, || format!("basis scaled by {p}: {} families", other.families().len()))?;
            ensure(rootdata::change_coordinates(&arr, &pm).map_err(s)? == other, || format!("basis scaled by {p} changes the arrangement"))?;
        }
        let levi = LeviSubset::new(&ctx.rs, [0]).map_err(s)?;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut checked = 0;
        while checked < 100 {
            let x = vec![rational::rat(rng.gen_range(-500..500), 97)];
            if !geometry::is_generic(&arr, &x).map_err(s)? {
                continue;
            }
            let y = vec![rational::rat(rng.gen_range(-40..40), rng.gen_range(1..6))];
            let ok = rootdata::vanishing_monotone_check(&ctx.rs, &levi, &ctx.x0, &x, &y).map_err(s)?;
            ensure(ok, || format!("vanishing roots not monotone at x = {x:?}, y = {y:?}"))?;
            checked += 1;
        }
        Ok("one periodic family in every basis; 100 monotone pairs".into())
    })
}

pub fn criterion_11() -> Criterion {
    timed(11, "relation suite on the cover presets", 30, || {
        let mut parts = Vec::new();
        for name in ["gl2f2-cover", "gl2f3-cover"] {
            let (fam, t) = cover(name)?;
            let (tn, _) = fam.normalize_t(&t, &RealAboveOne).map_err(s)?;
            for (label, tt) in [("T = id", &t), ("normalized T", &tn)] {
                let rep = fam.relation_suite(tt).map_err(s)?;
                let failures: Vec<String> = rep.failures().map(|c| format!("{}: {:?}", c.name, c.witness)).collect();
                ensure(failures.is_empty(), || format!("{name}, {label}: {}", failures.join("; ")))?;
                parts.push(format!("{name} ({label}): {} checks", rep.checks.len()));
            }
        }
        Ok(parts.join("; "))
    })
}

pub fn all() -> Vec<fn() -> Criterion> {
    vec![
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
    ]
}

/// Runs every criterion, spreading them over `threads` workers.
pub fn run_all(threads: usize) -> Vec<Criterion> {
    let fns = all();
    let threads = threads.max(1);
    if threads == 1 {
        return fns.iter().map(|f| f()).collect();
    }
    let mut out: Vec<Criterion> = std::thread::scope(|scope| {
        let chunks: Vec<Vec<fn() -> Criterion>> = (0..threads).map(|i| fns.iter().skip(i).step_by(threads).copied().collect()).collect();
        let handles: Vec<_> = chunks.into_iter().map(|c| scope.spawn(move || c.iter().map(|f| f()).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("criterion thread panicked")).collect()
    });
    out.sort_by_key(|c| c.id);
    out
}

pub fn check(criteria: &[Criterion]) -> Result<(), CliError> {
    let failed: Vec<u32> = criteria.iter().filter(|c| !c.pass).map(|c| c.id).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::check(format!("criteria {failed:?} failed")))
    }
}

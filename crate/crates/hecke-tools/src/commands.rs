//! One function per subcommand. Each returns the JSON body of the report and
//! whether every check in it passed.

use hecke_core::cover_model::{CoverFamily, TFamily};
use hecke_core::finite_groups::ConvolutionAlgebra;
use hecke_core::geometry::{self, Arrangement};
use hecke_core::hecke_abstract::Character;
use hecke_core::rational::{self, Rational};
use hecke_core::reflections::{self, AffineIso, Walk};
use hecke_core::report::{Report, Status};
use hecke_core::rootdata;
use hecke_core::scalars::{RealAboveOne, Scalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::config::{self, arrangement_json, form_json, ElemTerm, IsoCfg, RunConfig};
use crate::error::CliError;
use crate::verify;

/// A report body and its verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub body: Map<String, Value>,
}

impl Outcome {
    fn new(pass: bool, body: Value) -> Outcome {
        match body {
            Value::Object(body) => Outcome { pass, body },
            other => {
                let mut body = Map::new();
                body.insert("result".into(), other);
                Outcome { pass, body }
            }
        }
    }

    fn info(body: Value) -> Outcome {
        Outcome::new(true, body)
    }
}

fn cfg_err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::config(format!("{ctx}: {e}"))
}

fn check_err<E: std::fmt::Display>(ctx: &str) -> impl Fn(E) -> CliError + '_ {
    move |e| CliError::check(format!("{ctx}: {e}"))
}

pub fn report_json(rep: &Report) -> Value {
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| {
            let mut m = Map::new();
            m.insert("name".into(), json!(c.name));
            match &c.status {
                Status::Pass => m.insert("status".into(), json!("pass")),
                Status::Fail => m.insert("status".into(), json!("fail")),
                Status::Skipped(why) => {
                    m.insert("reason".into(), json!(why));
                    m.insert("status".into(), json!("skipped"))
                }
            };
            if let Some(w) = &c.witness {
                m.insert("witness".into(), json!(w));
            }
            Value::Object(m)
        })
        .collect();
    json!(checks)
}

fn point_json(x: &[Rational]) -> Value {
    json!(x.iter().map(rational::format).collect::<Vec<_>>())
}

/// Parses `"1/3,2"` into a point.
pub fn parse_point(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|s| rational::parse(s.trim()).ok_or_else(|| CliError::config(format!("not a rational: {s:?}"))))
        .collect()
}

fn check_dim(arr: &Arrangement, x: &[Rational]) -> Result<(), CliError> {
    if x.len() != arr.dim() {
        return Err(CliError::config(format!("point has {} coordinates, the arrangement lives in dimension {}", x.len(), arr.dim())));
    }
    Ok(())
}

// ---------------------------------------------------------------- arr

pub fn arr_info(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (arr, ip) = cfg.arrangement()?;
    let data = reflections::chamber_walls(&arr, &ip, arr.basepoint()).map_err(cfg_err("chamber walls"))?;
    let generic = geometry::is_generic(&arr, arr.basepoint()).map_err(cfg_err("basepoint"))?;
    Ok(Outcome::info(json!({
        "arrangement": arrangement_json(&arr),
        "basepoint_generic": generic,
        "chamber_walls": data.walls().iter().map(form_json).collect::<Vec<_>>(),
        "inner_product": matrix_json(ip.gram()),
    })))
}

pub fn arr_distance(cfg: &RunConfig, x: Option<&str>, y: &str, relevant_only: bool) -> Result<Outcome, CliError> {
    let (arr, _) = cfg.arrangement()?;
    let x = match x {
        Some(x) => parse_point(x)?,
        None => arr.basepoint().clone(),
    };
    let y = parse_point(y)?;
    check_dim(&arr, &x)?;
    check_dim(&arr, &y)?;
    let sep = geometry::separating_filtered(&arr, &x, &y, relevant_only).map_err(cfg_err("distance"))?;
    Ok(Outcome::info(json!({
        "d": sep.len(),
        "relevant_only": relevant_only,
        "separating": sep.iter().map(form_json).collect::<Vec<_>>(),
        "x": point_json(&x),
        "y": point_json(&y),
    })))
}

pub fn arr_generic(cfg: &RunConfig, x: Option<&str>) -> Result<Outcome, CliError> {
    let (arr, _) = cfg.arrangement()?;
    let x = match x {
        Some(x) => parse_point(x)?,
        None => arr.basepoint().clone(),
    };
    check_dim(&arr, &x)?;
    let generic = geometry::is_generic(&arr, &x).map_err(cfg_err("point"))?;
    Ok(Outcome::info(json!({ "generic": generic, "x": point_json(&x) })))
}

// ---------------------------------------------------------------- roots

fn matrix_json(m: &hecke_core::linalg::Matrix<Rational>) -> Value {
    json!((0..m.rows()).map(|i| m.row(i).iter().map(rational::format).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn roots_build(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let ctx = cfg.roots()?;
    let arr = ctx.arrangement()?;
    let ip = ctx.inner_product();
    Ok(Outcome::info(json!({
        "root_system": ctx.rs.kind().to_string(),
        "levi": ctx.levi.indices().collect::<Vec<_>>(),
        "x0": point_json(&ctx.x0),
        "arrangement": arrangement_json(&arr),
        "periodic": arr.families().iter().map(|f| f.is_periodic()).collect::<Vec<_>>(),
        "inner_product": matrix_json(ip.gram()),
    })))
}

pub fn roots_quotient(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (arr, ip) = if cfg.arrangement.is_some() {
        cfg.arrangement()?
    } else {
        let ctx = cfg.roots()?;
        (ctx.arrangement()?, ctx.inner_product())
    };
    let q = rootdata::quotient_space(&arr, &ip).map_err(cfg_err("quotient"))?;
    Ok(Outcome::info(json!({
        "dim": q.dim(),
        "projection": matrix_json(&q.projection),
        "kernel": q.kernel().iter().map(|v| point_json(v)).collect::<Vec<_>>(),
        "arrangement": arrangement_json(&q.arrangement),
        "inner_product": matrix_json(q.inner_product.gram()),
    })))
}

// ---------------------------------------------------------------- weyl

fn coxeter_json(data: &reflections::ReflectionGroupData, cutoff: u32) -> Value {
    json!(data
        .coxeter_matrix(cutoff)
        .iter()
        .map(|row| row.iter().map(|m| m.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn weyl_walls(cfg: &RunConfig, cutoff: u32) -> Result<Outcome, CliError> {
    let (data, omega) = cfg.reflection_data()?;
    let rep = rootdata::verify_affine_root_conditions(data.arrangement(), &data);
    let invariant = rep.get("reflection invariance").map(|c| c.status == Status::Pass).unwrap_or(false);
    let classes = reflections::simple_conjugacy_classes(&data, Some(&omega), cutoff);
    Ok(Outcome::new(
        invariant,
        json!({
            "rank": data.rank(),
            "walls": data.walls().iter().map(form_json).collect::<Vec<_>>(),
            "coxeter_matrix": coxeter_json(&data, cutoff),
            "conjugacy_classes": classes,
            "affine_root_conditions": report_json(&rep),
        }),
    ))
}

/// The isometry named by `--iso` (JSON `{"A":…, "b":…}`) or `--translation`.
pub fn parse_iso(iso: Option<&str>, translation: Option<&str>) -> Result<AffineIso, CliError> {
    match (iso, translation) {
        (Some(text), None) => {
            let cfg: IsoCfg = serde_json::from_str(text).map_err(cfg_err("--iso"))?;
            cfg.build()
        }
        (None, Some(t)) => Ok(AffineIso::translation_by(parse_point(t)?)),
        _ => Err(CliError::config("give exactly one of --iso and --translation")),
    }
}

pub fn weyl_word(cfg: &RunConfig, g: &AffineIso) -> Result<Outcome, CliError> {
    let (data, _) = cfg.reflection_data()?;
    if g.dim() != data.dim() {
        return Err(CliError::config("isometry dimension differs from the arrangement"));
    }
    let walk = data.reduced_word(g).map_err(check_err("reduced word"))?;
    Ok(match walk {
        Walk::Word(word) => Outcome::info(json!({ "in_waff": true, "length": word.len(), "word": word })),
        Walk::NotInWaff { word, residual } => Outcome::info(json!({
            "in_waff": false,
            "length": word.len(),
            "residual": residual.to_string(),
            "word": word,
        })),
    })
}

pub fn weyl_decompose(cfg: &RunConfig, g: &AffineIso) -> Result<Outcome, CliError> {
    let (data, omega) = cfg.reflection_data()?;
    if g.dim() != data.dim() {
        return Err(CliError::config("isometry dimension differs from the arrangement"));
    }
    let dec = reflections::decompose(&data, &omega, g).map_err(check_err("decompose"))?;
    let back = dec.to_iso(&data, &omega).map_err(check_err("decompose"))?;
    Ok(Outcome::new(
        back == *g,
        json!({
            "omega": dec.omega.0,
            "omega_iso": omega.iso(dec.omega).to_string(),
            "word": dec.word,
        }),
    ))
}

pub fn weyl_orders(cfg: &RunConfig, cutoff: u32) -> Result<Outcome, CliError> {
    let (data, _) = cfg.reflection_data()?;
    Ok(Outcome::info(json!({ "coxeter_matrix": coxeter_json(&data, cutoff), "cutoff": cutoff })))
}

// ---------------------------------------------------------------- hecke

fn element_arg(ctx: &config::HeckeContext, flag: Option<&str>, preset: Option<&Vec<ElemTerm>>, name: &str) -> Result<hecke_core::hecke_abstract::ProductAlgElem<AffineIso>, CliError> {
    let terms: Vec<ElemTerm> = match (flag, preset) {
        (Some(text), _) => serde_json::from_str(text).map_err(|e| CliError::config(format!("--{name}: {e}")))?,
        (None, Some(t)) => t.clone(),
        (None, None) => return Err(CliError::config(format!("no element {name:?}: pass --{name} or set hecke.{name}"))),
    };
    ctx.element(&terms)
}

fn terms_json(ctx: &config::HeckeContext, a: &hecke_core::hecke_abstract::ProductAlgElem<AffineIso>) -> Result<Value, CliError> {
    serde_json::to_value(ctx.terms(a)?).map_err(check_err("serialize"))
}

pub fn hecke_mul(cfg: &RunConfig, cutoff: u32, a: Option<&str>, b: Option<&str>) -> Result<Outcome, CliError> {
    let ctx = cfg.hecke_algebra(cutoff)?;
    let hcfg = cfg.hecke.as_ref().expect("hecke section checked");
    let x = element_arg(&ctx, a, hcfg.a.as_ref(), "a")?;
    let y = element_arg(&ctx, b, hcfg.b.as_ref(), "b")?;
    let p = ctx.algebra.mul(&x, &y).map_err(check_err("product"))?;
    Ok(Outcome::info(json!({
        "a": terms_json(&ctx, &x)?,
        "b": terms_json(&ctx, &y)?,
        "product": terms_json(&ctx, &p)?,
    })))
}

pub fn hecke_assoc(cfg: &RunConfig, cutoff: u32, maxlen: Option<usize>, braid_len: Option<usize>) -> Result<Outcome, CliError> {
    let ctx = cfg.hecke_algebra(cutoff)?;
    let maxlen = maxlen.or(cfg.hecke.as_ref().and_then(|h| h.maxlen)).unwrap_or(3);
    let braid_len = braid_len.unwrap_or(maxlen);
    let alg = &ctx.algebra;
    let basis = alg.basis_ball(maxlen);
    let triple = alg.check_associativity(&basis).map_err(check_err("associativity"))?;
    let defects = alg.quadratic_defects().map_err(check_err("quadratic relations"))?;
    let quadratic_ok = defects.iter().all(|d| d.is_zero());
    let braid = alg.check_braid(braid_len).map_err(check_err("braid"))?;
    let assoc_witness = triple.map(|(i, j, k)| json!([i, j, k]));
    Ok(Outcome::new(
        triple.is_none() && quadratic_ok && braid.is_none(),
        json!({
            "associative": triple.is_none(),
            "associativity_witness": assoc_witness,
            "basis_size": basis.len(),
            "braid_length": braid_len,
            "braid_witness": braid,
            "braid_words_agree": braid.is_none(),
            "maxlen": maxlen,
            "quadratic_relations": quadratic_ok,
            "triples": basis.len().pow(3),
        }),
    ))
}

fn character_json(chi: &Character) -> Value {
    match chi {
        Character::Table(v) => json!(v.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
        Character::Cyclic(c) => json!({ "generator": c.to_string() }),
    }
}

pub fn hecke_autos(cfg: &RunConfig, cutoff: u32, star_preserving: bool, check_len: usize) -> Result<Outcome, CliError> {
    let ctx = cfg.hecke_algebra(cutoff)?;
    let pool = ctx.field.roots_of_unity();
    let autos = ctx.algebra.support_preserving_autos(&pool, star_preserving, check_len).map_err(check_err("automorphisms"))?;
    Ok(Outcome::info(json!({
        "check_len": check_len,
        "characters": autos.iter().map(character_json).collect::<Vec<_>>(),
        "count": autos.len(),
        "star_preserving": star_preserving,
    })))
}

pub fn hecke_star(cfg: &RunConfig, cutoff: u32, samples: usize, seed: u64, a: Option<&str>) -> Result<Outcome, CliError> {
    let ctx = cfg.hecke_algebra(cutoff)?;
    let alg = &ctx.algebra;
    if let Err(e) = alg.cocycle().check_star_compatible(&ctx.field, alg.omega()) {
        return Ok(Outcome::new(false, json!({ "compatible": false, "witness": e.to_string() })));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failure = None;
    for i in 0..samples {
        let x = verify::random_element(alg, &mut rng);
        let y = verify::random_element(alg, &mut rng);
        let sx = alg.star(&x).map_err(check_err("star"))?;
        if alg.star(&sx).map_err(check_err("star"))? != x {
            failure = Some(format!("sample {i}: star is not an involution"));
            break;
        }
        let lhs = alg.star(&alg.mul(&x, &y).map_err(check_err("product"))?).map_err(check_err("star"))?;
        let rhs = alg.mul(&alg.star(&y).map_err(check_err("star"))?, &sx).map_err(check_err("product"))?;
        if lhs != rhs {
            failure = Some(format!("sample {i}: star(ab) differs from star(b) star(a)"));
            break;
        }
    }
    let mut body = json!({
        "compatible": true,
        "samples": samples,
        "seed": seed,
        "witness": failure,
    });
    let preset_a = cfg.hecke.as_ref().and_then(|h| h.a.as_ref());
    if a.is_some() || preset_a.is_some() {
        let x = element_arg(&ctx, a, preset_a, "a")?;
        let sx = alg.star(&x).map_err(check_err("star"))?;
        body["star_a"] = terms_json(&ctx, &sx)?;
    }
    Ok(Outcome::new(failure.is_none(), body))
}

// ---------------------------------------------------------------- fingrp

fn nontrivial(alg: &ConvolutionAlgebra<'_>, h: Option<usize>) -> Result<usize, CliError> {
    match h {
        Some(h) => Ok(h),
        None => verify::nontrivial_intertwiner(alg).map_err(CliError::config),
    }
}

pub fn fingrp_cosets(ctx: &config::FingrpContext) -> Result<Outcome, CliError> {
    let g = &ctx.group;
    let left = g.left_coset_reps(&ctx.sub);
    let doubles: Vec<Value> = g
        .double_cosets(&ctx.sub, &ctx.sub)
        .iter()
        .map(|&h| {
            json!({
                "rep": g.label(h),
                "size": g.double_coset(&ctx.sub, h, &ctx.sub).len(),
                "intertwiner_dim": hecke_core::finite_groups::intertwiner_space(g, &ctx.sub, &ctx.rep, h).len(),
            })
        })
        .collect();
    Ok(Outcome::info(json!({
        "group": g.name(),
        "group_order": g.order(),
        "subgroup_order": ctx.sub.order(),
        "index": left.len(),
        "left_cosets": left.iter().map(|&h| g.label(h)).collect::<Vec<_>>(),
        "double_cosets": doubles,
    })))
}

pub fn fingrp_induce(ctx: &config::FingrpContext) -> Result<Outcome, CliError> {
    let alg = ConvolutionAlgebra::new(&ctx.group, &ctx.sub, &ctx.rep).map_err(cfg_err("induction"))?;
    let cosets: Vec<Value> = alg
        .intertwining_cosets()
        .iter()
        .map(|(h, sp)| json!({ "rep": ctx.group.label(*h), "dim": sp.len() }))
        .collect();
    Ok(Outcome::info(json!({
        "rep_dim": ctx.rep.dim(),
        "induced_dim": alg.ind().dim(),
        "end_dimension": alg.end_dimension(),
        "intertwining_cosets": cosets,
    })))
}

pub fn fingrp_q(ctx: &config::FingrpContext) -> Result<Outcome, CliError> {
    let alg = ConvolutionAlgebra::new(&ctx.group, &ctx.sub, &ctx.rep).map_err(cfg_err("induction"))?;
    let h = nontrivial(&alg, ctx.h)?;
    let q = alg.q_parameter(h, &RealAboveOne).map_err(check_err("q"))?;
    Ok(Outcome::info(json!({ "h": ctx.group.label(h), "q": q.to_string() })))
}

pub fn fingrp_generator(ctx: &config::FingrpContext) -> Result<Outcome, CliError> {
    let alg = ConvolutionAlgebra::new(&ctx.group, &ctx.sub, &ctx.rep).map_err(cfg_err("induction"))?;
    let h = nontrivial(&alg, ctx.h)?;
    let gen = alg.normalized_generator(h, &RealAboveOne).map_err(check_err("normalization"))?;
    let one = ctx.field.one();
    let lhs = alg.convolve(&gen.phi, &gen.phi);
    let rhs = gen.phi.scale(&(&gen.q - &one)).add(&alg.unit().scale(&gen.q));
    Ok(Outcome::new(
        lhs == rhs,
        json!({
            "h": ctx.group.label(h),
            "raw_relation": { "a": gen.raw.a.to_string(), "b": gen.raw.b.to_string() },
            "d": gen.d.to_string(),
            "q": gen.q.to_string(),
            "quadratic_relation": lhs == rhs,
            "support": gen.phi.support().iter().map(|&g| ctx.group.label(g)).collect::<Vec<_>>(),
        }),
    ))
}

// ---------------------------------------------------------------- cover

fn cover_err(ctx: &str) -> impl Fn(hecke_core::cover_model::CoverError) -> CliError + '_ {
    move |e| CliError::check(format!("{ctx}: {e}"))
}

fn family(cfg: &RunConfig) -> Result<(CoverFamily, TFamily), CliError> {
    cfg.cover()
}

pub fn cover_validate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (fam, t) = family(cfg)?;
    let mut rep = fam.validate_family();
    rep.extend("", fam.support_bijection_check());
    rep.extend("T: ", t.validate(&fam));
    Ok(Outcome::new(
        rep.all_pass(),
        json!({
            "points": fam.points().iter().map(|p| p.name.clone()).collect::<Vec<_>>(),
            "prime": fam.prime(),
            "w_order": fam.w_order(),
            "checks": report_json(&rep),
        }),
    ))
}

pub fn cover_relations(cfg: &RunConfig, normalized: bool) -> Result<Outcome, CliError> {
    let (fam, t) = family(cfg)?;
    let t = if normalized { fam.normalize_t(&t, &RealAboveOne).map_err(cover_err("normalize"))?.0 } else { t };
    let rep = fam.relation_suite(&t).map_err(cover_err("relations"))?;
    Ok(Outcome::new(rep.all_pass(), json!({ "normalized": normalized, "checks": report_json(&rep) })))
}

fn scalars_json(v: &[Scalar]) -> Value {
    json!(v.iter().map(|c| c.to_string()).collect::<Vec<_>>())
}

pub fn cover_report(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (fam, t) = family(cfg)?;
    let sr = fam.structure_report(&t, &RealAboveOne).map_err(cover_err("structure"))?;
    let (star_rep, cs) = fam.star_check(&sr.t).map_err(cover_err("star"))?;
    let mut constant_terms = Vec::new();
    for x in 0..fam.points().len() {
        for y in 0..fam.points().len() {
            if fam.distance(x, y) != 1 {
                continue;
            }
            let dim = fam.points()[x].rho.dim();
            let values: Vec<Value> = (0..dim)
                .map(|i| {
                    let v: Vec<Scalar> = (0..dim).map(|j| if i == j { fam.field().one() } else { fam.field().zero() }).collect();
                    scalars_json(&fam.constant_term(x, y, &v))
                })
                .collect();
            constant_terms.push(json!({ "x": fam.points()[x].name, "y": fam.points()[y].name, "basis_images": values }));
        }
    }
    let normalization: Vec<Value> = sr
        .normalization
        .iter()
        .map(|n| {
            json!({
                "class": fam.w_label(n.class),
                "relation": { "a": n.relation.a.to_string(), "b": n.relation.b.to_string() },
                "d": n.d.to_string(),
                "q": n.q.to_string(),
            })
        })
        .collect();
    let pass = sr.checks.all_pass() && star_rep.all_pass();
    Ok(Outcome::new(
        pass,
        json!({
            "walls": sr.walls.iter().map(|(x, y)| json!([fam.points()[*x].name, fam.points()[*y].name])).collect::<Vec<_>>(),
            "simple": sr.simple.iter().map(|&w| fam.w_label(w)).collect::<Vec<_>>(),
            "omega": sr.omega.iter().map(|&w| fam.w_label(w)).collect::<Vec<_>>(),
            "waff_order": sr.waff_order,
            "q": sr.q.iter().map(|(w, q)| json!({ "s": fam.w_label(*w), "q": q.to_string() })).collect::<Vec<_>>(),
            "mu_omega": sr.mu_omega.iter().map(|r| scalars_json(r)).collect::<Vec<_>>(),
            "normalization": normalization,
            "star_scalars": cs.iter().map(|(w, c)| json!({ "w": fam.w_label(*w), "c": c.to_string() })).collect::<Vec<_>>(),
            "constant_terms": constant_terms,
            "checks": report_json(&sr.checks),
            "star_checks": report_json(&star_rep),
        }),
    ))
}

// ---------------------------------------------------------------- verify

pub fn verify_all(threads: usize) -> Outcome {
    let criteria = verify::run_all(threads);
    for c in &criteria {
        eprintln!("{}", c.line());
    }
    let pass = criteria.iter().all(|c| c.pass);
    Outcome::new(
        pass,
        json!({
            "criteria": criteria
                .iter()
                .map(|c| json!({ "id": c.id, "title": c.title, "pass": c.pass, "detail": c.detail }))
                .collect::<Vec<_>>(),
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;

    #[test]
    fn points_parse() {
        assert_eq!(parse_point("1/3, -2").unwrap(), vec![rational::rat(1, 3), rational::int(-2)]);
        assert!(parse_point("1/0").is_err());
        assert!(parse_point("a").is_err());
    }

    #[test]
    fn reports_serialize_every_status() {
        let mut rep = Report::new();
        rep.pass("a");
        rep.fail("b", "w");
        rep.skip("c", "why");
        let v = report_json(&rep);
        assert_eq!(v[0], json!({"name": "a", "status": "pass"}));
        assert_eq!(v[1], json!({"name": "b", "status": "fail", "witness": "w"}));
        assert_eq!(v[2]["status"], "skipped");
        assert_eq!(v[2]["reason"], "why");
    }

    #[test]
    fn distance_checks_dimensions() {
        let cfg = presets::load("affine-a1").unwrap();
        assert_eq!(arr_distance(&cfg, None, "7/3", false).unwrap().body["d"], 2);
        assert_eq!(arr_distance(&cfg, Some("1/3"), "-5/3", true).unwrap().body["d"], 2);
        assert!(matches!(arr_distance(&cfg, None, "1,2", false), Err(CliError::Config(_))));
    }

    #[test]
    fn iso_arguments() {
        assert!(parse_iso(None, None).is_err());
        assert!(parse_iso(Some("{}"), Some("1")).is_err());
        let g = parse_iso(Some(r#"{"A": [[-1]], "b": [2]}"#), None).unwrap();
        let cfg = presets::load("affine-a1").unwrap();
        let r = weyl_word(&cfg, &g).unwrap();
        assert_eq!(r.body["length"], 1);
        assert!(weyl_word(&cfg, &parse_iso(None, Some("1,1")).unwrap()).is_err());
    }

    #[test]
    fn generic_points() {
        let cfg = presets::load("affine-a1").unwrap();
        assert_eq!(arr_generic(&cfg, Some("2")).unwrap().body["generic"], false);
        assert_eq!(arr_generic(&cfg, Some("5/2")).unwrap().body["generic"], true);
    }

    #[test]
    fn autos_count_over_the_extended_preset() {
        let cfg = presets::load("affine-a1-ext").unwrap();
        let r = hecke_autos(&cfg, 24, true, 1).unwrap();
        assert_eq!(r.body["count"], 2);
    }
}

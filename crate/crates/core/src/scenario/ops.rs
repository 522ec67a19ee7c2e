use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::{finite_ring, GradedComplexObj, GradedModuleObj, Link, NumerologySpec, Object, Operator, RingRef, Step};
use crate::complexes::{minimize, same_homology, ChainMap, Complex};
use crate::graded::{check_depth_bound, check_length_criterion, depth_pd, hilbert_data, nearly_faithful, stabilization_heuristic};
use crate::linalg::{smith_normal_form, FiniteModule, IsoVerdict, Track, ZMatrix};
use crate::numerology as num;
use crate::ordinary::{
    fitting_decomposition, localization_projector, localization_projector_module, ordinary_part_complex,
    verify_ordinary_part,
};
use crate::patching::{faithfulness_check, patch, patch_pair, verify_conclusions, PatchOptions, TowerConfig};
use crate::rings::RMatrix;
use crate::{Error, Result};

pub(crate) const OPS: &[&str] = &[
    "homology",
    "minimize",
    "base-change",
    "snf",
    "invariants",
    "fitting",
    "ordinary",
    "localize",
    "resolve",
    "hilbert",
    "check-deduce",
    "check-bound",
    "nearly-faithful",
    "patch",
    "patch-pair",
    "numerology",
];

pub(crate) type Env = BTreeMap<String, Object>;

pub(crate) struct Outcome {
    pub pass: bool,
    pub result: Value,
    pub object: Option<Object>,
}

fn done(pass: bool, result: Value) -> Result<Outcome> {
    Ok(Outcome { pass, result, object: None })
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn arg<'a>(env: &'a Env, step: &Step, i: usize) -> Result<(&'a str, &'a Object)> {
    let name = step
        .args
        .get(i)
        .ok_or_else(|| Error::Schema { path: format!("args[{i}]"), msg: format!("{} needs at least {} arguments", step.op, i + 1) })?;
    let (k, v) = env.get_key_value(name).ok_or_else(|| Error::UnknownName(name.clone()))?;
    Ok((k.as_str(), v))
}

fn wrong(name: &str, obj: &Object, want: &str) -> Error {
    Error::UnknownName(format!("{name:?} is a {}, expected a {want}", obj.kind()))
}

fn complex_arg<'a>(env: &'a Env, step: &Step, i: usize) -> Result<&'a Complex> {
    match arg(env, step, i)? {
        (_, Object::Complex(c)) => Ok(c),
        (n, o) => Err(wrong(n, o, "complex")),
    }
}

fn graded_module_arg<'a>(env: &'a Env, step: &Step, i: usize) -> Result<(&'a str, &'a GradedModuleObj)> {
    match arg(env, step, i)? {
        (n, Object::GradedModule(m)) => Ok((n, m)),
        (n, o) => Err(wrong(n, o, "graded module")),
    }
}

fn param_u64(step: &Step, key: &str) -> Result<Option<u64>> {
    match step.params.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_u64()
            .map(Some)
            .ok_or_else(|| Error::Schema { path: format!("params.{key}"), msg: "expected a non-negative integer".into() }),
    }
}

fn param_bool(step: &Step, key: &str) -> Result<Option<bool>> {
    match step.params.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => v
            .as_bool()
            .map(Some)
            .ok_or_else(|| Error::Schema { path: format!("params.{key}"), msg: "expected a boolean".into() }),
    }
}

pub(crate) fn matrix_json(m: &RMatrix) -> Value {
    json!({
        "rows": m.rows(),
        "cols": m.cols(),
        "entries": m.to_entries(),
    })
}

pub(crate) fn complex_json(c: &Complex) -> Value {
    json!({
        "ring": c.ring().spec(),
        "lo": c.lo(),
        "ranks": c.ranks(),
        "diffs": c.diffs().iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

fn module_json(m: &FiniteModule) -> Value {
    json!({ "exps": m.exps, "log_order": m.log_order() })
}

/// Options the runner passes down to the heavier operations.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct OpOptions {
    pub levels: Option<u32>,
    pub parallel: bool,
}

pub(crate) fn execute(env: &Env, step: &Step, opts: OpOptions) -> Result<Outcome> {
    match step.op.as_str() {
        "homology" => homology(env, step),
        "minimize" => minimize_op(env, step),
        "base-change" => base_change(env, step),
        "snf" => snf(env, step),
        "invariants" => invariants(env, step),
        "fitting" => fitting(env, step),
        "ordinary" => ordinary(env, step),
        "localize" => localize(env, step),
        "resolve" => resolve(env, step),
        "hilbert" => hilbert(env, step),
        "check-deduce" => check_deduce(env, step),
        "check-bound" => check_bound(env, step),
        "nearly-faithful" => faithful(env, step),
        "patch" => patch_op(env, step, opts),
        "patch-pair" => patch_pair_op(env, step, opts),
        "numerology" => numerology(env, step),
        other => Err(Error::Schema { path: "op".into(), msg: format!("unknown operation {other:?}") }),
    }
}

fn homology(env: &Env, step: &Step) -> Result<Outcome> {
    let c = complex_arg(env, step, 0)?;
    let degrees: Vec<Value> = c
        .all_cohomology()
        .iter()
        .map(|h| json!({ "degree": h.degree, "exps": h.module().exps, "log_order": h.module().log_order() }))
        .collect();
    if step.args.len() > 1 {
        let other = complex_arg(env, step, 1)?;
        let cmp = same_homology(c, other)?;
        let pass = cmp.verdict != IsoVerdict::Distinct;
        return done(pass, json!({ "degrees": degrees, "comparison": to_value(&cmp) }));
    }
    done(true, json!({ "degrees": degrees, "euler_characteristic": c.euler_characteristic() }))
}

fn minimize_op(env: &Env, step: &Step) -> Result<Outcome> {
    let c = complex_arg(env, step, 0)?;
    let min = minimize(c);
    let betti = c.residue_betti();
    let ranks_match = min.complex.ranks() == betti.as_slice() && min.complex.lo() == c.lo();
    let cmp = same_homology(c, &min.complex)?;
    let preserved = cmp.verdict != IsoVerdict::Distinct;
    let maps_ok = min.incl.is_chain_map(&min.complex, c) && min.proj.is_chain_map(c, &min.complex);
    let pass = min.certificate.is_minimal() && ranks_match && preserved && maps_ok;
    Ok(Outcome {
        pass,
        result: json!({
            "complex": complex_json(&min.complex),
            "certificate": to_value(&min.certificate),
            "splits": min.splits,
            "residue_betti": betti,
            "ranks_match": ranks_match,
            "homology_preserved": to_value(&cmp.verdict),
            "chain_maps": maps_ok,
        }),
        object: Some(Object::Complex(min.complex)),
    })
}

fn base_change(env: &Env, step: &Step) -> Result<Outcome> {
    let c = complex_arg(env, step, 0)?;
    let ring = match arg(env, step, 1)? {
        (n, Object::Ring(_)) => finite_ring(env, &RingRef::Name(n.to_string()))?,
        (n, o) => return Err(wrong(n, o, "ring")),
    };
    let out = c.base_change_to(&ring)?;
    let valid = out.check();
    Ok(Outcome {
        pass: valid.valid,
        result: json!({ "complex": complex_json(&out), "validity": to_value(&valid) }),
        object: Some(Object::Complex(out)),
    })
}

/// The matrix over `Z/p^m`: itself over a chain ring, its underlying
/// abelian-group map otherwise.
fn scalar_matrix(env: &Env, step: &Step) -> Result<(ZMatrix, bool)> {
    match arg(env, step, 0)? {
        (_, Object::Matrix(m)) if m.ring().basis_size() == 1 => Ok((m.to_zmatrix()?, false)),
        (_, Object::Matrix(m)) => Ok((m.underlying(), true)),
        (n, o) => Err(wrong(n, o, "matrix")),
    }
}

fn snf(env: &Env, step: &Step) -> Result<Outcome> {
    let (a, underlying) = scalar_matrix(env, step)?;
    let s = smith_normal_form(&a, Track::ALL);
    let (u, v) = (s.u.clone().expect("tracked"), s.v.clone().expect("tracked"));
    let d = s.d();
    let product = u.mul(&a).mul(&v) == d;
    let id = |n| ZMatrix::identity(a.ring(), n);
    let invertible = u.mul(s.u_inv.as_ref().expect("tracked")) == id(a.rows())
        && v.mul(s.v_inv.as_ref().expect("tracked")) == id(a.cols());
    let chain = s.vals.windows(2).all(|w| w[0] <= w[1]);
    done(
        product && invertible && chain,
        json!({
            "underlying": underlying,
            "rows": a.rows(),
            "cols": a.cols(),
            "vals": s.vals,
            "rank": s.rank,
            "D": d.to_rows(),
            "U": u.to_rows(),
            "V": v.to_rows(),
            "cokernel_exps": s.cokernel_exps(),
            "checks": { "uav_equals_d": product, "invertible": invertible, "divisibility": chain },
        }),
    )
}

fn invariants(env: &Env, step: &Step) -> Result<Outcome> {
    let (a, underlying) = scalar_matrix(env, step)?;
    let m = a.ring().m();
    let s = smith_normal_form(&a, Track::NONE);
    let mut ker: Vec<u32> = (0..a.cols()).map(|k| s.vals.get(k).copied().unwrap_or(m)).filter(|&e| e > 0).collect();
    let mut im: Vec<u32> = s.vals.iter().map(|&v| m - v).filter(|&e| e > 0).collect();
    ker.sort_unstable_by(|x, y| y.cmp(x));
    im.sort_unstable_by(|x, y| y.cmp(x));
    let coker = s.cokernel_exps();
    let sum = |v: &[u32]| v.iter().map(|&e| e as u64).sum::<u64>();
    let orders = sum(&ker) + sum(&im) == m as u64 * a.cols() as u64;
    let coker_orders = sum(&im) + sum(&coker) == m as u64 * a.rows() as u64;
    done(
        orders && coker_orders,
        json!({
            "underlying": underlying,
            "kernel_exps": ker,
            "image_exps": im,
            "cokernel_exps": coker,
            "checks": { "kernel_times_image": orders, "image_times_cokernel": coker_orders },
        }),
    )
}

fn module_operator<'a>(env: &'a Env, step: &Step, i: usize) -> Result<(&'a FiniteModule, &'a ZMatrix)> {
    match arg(env, step, i)? {
        (_, Object::Operator(Operator::Module { module, matrix })) => match env.get(module) {
            Some(Object::Module(m)) => Ok((m, matrix)),
            _ => Err(Error::UnknownName(module.clone())),
        },
        (n, o) => Err(wrong(n, o, "module operator")),
    }
}

fn chain_operator<'a>(env: &'a Env, step: &Step, i: usize) -> Result<(&'a Complex, &'a ChainMap)> {
    match arg(env, step, i)? {
        (_, Object::Operator(Operator::Chain { complex, map })) => match env.get(complex) {
            Some(Object::Complex(c)) => Ok((c, map)),
            _ => Err(Error::UnknownName(complex.clone())),
        },
        (n, o) => Err(wrong(n, o, "complex operator")),
    }
}

fn fitting(env: &Env, step: &Step) -> Result<Outcome> {
    let (m, t) = module_operator(env, step, 0)?;
    let f = fitting_decomposition(m, t)?;
    let checks = f.check(m);
    done(
        checks.all(),
        json!({
            "module": module_json(m),
            "ordinary": module_json(&f.ordinary),
            "nilpotent": module_json(&f.nilpotent),
            "stabilization": f.stabilization,
            "idempotent": f.e.to_rows(),
            "checks": to_value(&checks),
        }),
    )
}

fn ordinary(env: &Env, step: &Step) -> Result<Outcome> {
    let (c, t) = chain_operator(env, step, 0)?;
    let part = ordinary_part_complex(c, t)?;
    let checks = verify_ordinary_part(c, t, &part)?;
    let pass = checks.iter().all(|k| k.equal);
    Ok(Outcome {
        pass,
        result: json!({
            "ranks": part.complex.ranks(),
            "complex": complex_json(&part.complex),
            "checks": to_value(&checks),
        }),
        object: Some(Object::Complex(part.complex)),
    })
}

/// `args = [target, T_1, .., T_k, pi_1, ..]` with `params.eta` giving one
/// scalar per `T_i`.
fn localize(env: &Env, step: &Step) -> Result<Outcome> {
    let etas: Vec<u64> = match step.params.get("eta") {
        None | Some(Value::Null) => Vec::new(),
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| Error::Schema { path: "params.eta".into(), msg: e.to_string() })?,
    };
    let (target, obj) = arg(env, step, 0)?;
    let n_ops = step.args.len() - 1;
    if etas.len() > n_ops {
        return Err(Error::Schema { path: "params.eta".into(), msg: format!("{} scalars for {n_ops} operators", etas.len()) });
    }
    match obj {
        Object::Complex(c) => {
            let mut ops = Vec::new();
            let mut pis = Vec::new();
            for i in 1..=n_ops {
                let (owner, map) = chain_operator(env, step, i)?;
                if owner != c {
                    return Err(Error::RingMismatch(format!("operator {} acts on another complex", step.args[i])));
                }
                match etas.get(i - 1) {
                    Some(&e) => ops.push((map.clone(), e)),
                    None => pis.push(map.clone()),
                }
            }
            let e = localization_projector(c, &ops, &pis)?;
            let degrees: Vec<Value> = c
                .degrees()
                .map(|deg| {
                    let h = c.cohomology(deg);
                    let img = h.sq.induced(&e.at(deg).expect("every degree").underlying());
                    json!({
                        "degree": deg,
                        "exps": h.module().exps,
                        "image_log_order": h.module().span_log_order(&img),
                    })
                })
                .collect();
            done(e.is_chain_map(c, c), json!({ "target": target, "degrees": degrees }))
        }
        Object::Module(m) => {
            let mut ops = Vec::new();
            let mut pis = Vec::new();
            for i in 1..=n_ops {
                let (owner, t) = module_operator(env, step, i)?;
                if owner != m {
                    return Err(Error::RingMismatch(format!("operator {} acts on another module", step.args[i])));
                }
                match etas.get(i - 1) {
                    Some(&e) => ops.push((t.clone(), e)),
                    None => pis.push(t.clone()),
                }
            }
            let e = localization_projector_module(m, &ops, &pis)?;
            done(
                true,
                json!({
                    "target": target,
                    "module": module_json(m),
                    "projector": m.reduce_rows(&e).to_rows(),
                    "image_log_order": m.span_log_order(&e),
                }),
            )
        }
        o => Err(wrong(target, o, "complex or module")),
    }
}

fn resolve(env: &Env, step: &Step) -> Result<Outcome> {
    let (_, m) = graded_module_arg(env, step, 0)?;
    let rep = depth_pd(&m.module)?;
    let polynomial = m.module.ring.relations.is_empty();
    let ab = match (rep.depth, rep.proj_dim) {
        (Some(d), Some(p)) if polynomial => Some(d + p == rep.q),
        _ => None,
    };
    done(ab != Some(false), json!({ "report": to_value(&rep), "auslander_buchsbaum": ab }))
}

fn hilbert(env: &Env, step: &Step) -> Result<Outcome> {
    let (_, m) = graded_module_arg(env, step, 0)?;
    let bound = match param_u64(step, "bound")? {
        Some(b) => b as i64,
        None => stabilization_heuristic(&m.module).max(m.module.hilbert_series()?.stabilization_point()),
    };
    let data = hilbert_data(&m.module, bound)?;
    done(true, json!({ "bound": bound, "data": to_value(&data) }))
}

fn check_deduce(env: &Env, step: &Step) -> Result<Outcome> {
    let (n, c): (&str, &GradedComplexObj) = match arg(env, step, 0)? {
        (n, Object::GradedComplex(c)) => (n, c),
        (n, o) => return Err(wrong(n, o, "graded complex")),
    };
    let l0 = param_u64(step, "l0")?.map_or(c.l0, |x| x as usize);
    let rep = check_length_criterion(&c.complex, l0)?;
    done(rep.holds, json!({ "complex": n, "report": to_value(&rep) }))
}

fn check_bound(env: &Env, step: &Step) -> Result<Outcome> {
    let (n, m) = graded_module_arg(env, step, 0)?;
    let gens = m
        .submodule
        .as_ref()
        .ok_or_else(|| Error::MissingDeclaration(format!("graded module {n:?} declares no submodule")))?;
    let rep = check_depth_bound(&m.module, gens)?;
    done(rep.holds, json!({ "report": to_value(&rep) }))
}

fn faithful(env: &Env, step: &Step) -> Result<Outcome> {
    let (n, m) = graded_module_arg(env, step, 0)?;
    let primes = m
        .primes
        .as_ref()
        .ok_or_else(|| Error::MissingDeclaration(format!("graded module {n:?} declares no minimal primes")))?;
    let rep = nearly_faithful(&m.module, primes)?;
    let expect = param_bool(step, "expect")?.unwrap_or(true);
    done(rep.nearly_faithful == expect, json!({ "expected": expect, "report": to_value(&rep) }))
}

fn tower_arg<'a>(env: &'a Env, name: &str) -> Result<&'a TowerConfig> {
    match env.get(name) {
        Some(Object::Tower(t)) => Ok(t),
        Some(o) => Err(wrong(name, o, "tower")),
        None => Err(Error::UnknownName(name.to_string())),
    }
}

fn patch_options(step: &Step, opts: OpOptions) -> Result<PatchOptions> {
    let levels = match param_u64(step, "levels")? {
        Some(l) => Some(u32::try_from(l).map_err(|_| Error::Schema { path: "params.levels".into(), msg: "too large".into() })?),
        None => opts.levels,
    };
    Ok(PatchOptions { levels, parallel: opts.parallel })
}

fn patch_op(env: &Env, step: &Step, opts: OpOptions) -> Result<Outcome> {
    let name = step.args.first().ok_or_else(|| Error::Schema { path: "args".into(), msg: "patch needs a tower".into() })?;
    let tower = tower_arg(env, name)?;
    let r = patch(tower, patch_options(step, opts)?)?;
    let conclusions = verify_conclusions(&r, tower, opts.parallel)?;
    let faith = faithfulness_check(&r, tower)?;
    let pass = r.chain_compatible() && conclusions.all_pass;
    done(
        pass,
        json!({
            "patched": to_value(&r),
            "conclusions": to_value(&conclusions),
            "faithfulness": to_value(&faith),
        }),
    )
}

fn patch_pair_op(env: &Env, step: &Step, opts: OpOptions) -> Result<Outcome> {
    let (n, link): (&str, &Link) = match arg(env, step, 0)? {
        (n, Object::Link(l)) => (n, l),
        (n, o) => return Err(wrong(n, o, "link")),
    };
    let (t1, t2) = (tower_arg(env, &link.first)?, tower_arg(env, &link.second)?);
    match patch_pair(t1, t2, &link.config, patch_options(step, opts)?) {
        Ok(pr) => {
            let c1 = verify_conclusions(&pr.first, t1, opts.parallel)?;
            let c2 = verify_conclusions(&pr.second, t2, opts.parallel)?;
            let pass = c1.all_pass
                && c2.all_pass
                && pr.first.chain_compatible()
                && pr.second.chain_compatible()
                && pr.comparison.bijective
                && pr.comparison.square_commutes;
            done(
                pass,
                json!({
                    "link": n,
                    "pair": to_value(&pr),
                    "conclusions": [to_value(&c1), to_value(&c2)],
                }),
            )
        }
        Err(e @ Error::LinkSquare { level, .. }) => done(
            false,
            json!({
                "link": n,
                "failure": { "code": e.code(), "level": level, "message": e.to_string() },
            }),
        ),
        Err(e) => Err(e),
    }
}

fn numerology(env: &Env, step: &Step) -> Result<Outcome> {
    let (_, q): (&str, &NumerologySpec) = match arg(env, step, 0)? {
        (n, Object::Numerology(q)) => (n, q),
        (n, o) => return Err(wrong(n, o, "numerology query")),
    };
    let (pass, result) = numerology_report(q)?;
    done(pass, result)
}

/// Shared by the scenario op and the dedicated subcommand.
pub(crate) fn numerology_report(q: &NumerologySpec) -> Result<(bool, Value)> {
    let s = q.signature()?;
    let inv = num::invariants(s)?;
    let id = num::check_infinity_identity(s)?;
    let mut out = json!({
        "n": s.n,
        "r1": s.r1,
        "r2": s.r2,
        "degree": s.degree(),
        "l0": inv.l0,
        "q0": inv.q0,
        "dim_y": inv.dim_y,
        "l0_vanishes": num::l0_vanishes(s),
        "infinity_identity": to_value(&id),
    });
    let obj = out.as_object_mut().expect("object");
    if let Some(t) = q.t {
        let j = num::framing_variables(s.n, t);
        obj.insert("framing_variables".into(), json!(j));
        if let Some(qq) = q.q {
            let g = num::tw_generator_count(qq, t, s)?;
            obj.insert("generator_count".into(), to_value(&g));
            obj.insert("patched_dimension".into(), json!(num::patched_dimension(j, qq as i128, inv.l0)));
        }
    }
    if let Some(spr) = q.spr {
        obj.insert("rloc_dimension".into(), json!(num::rloc_dimension(spr, s)?));
    }
    if let Some(tr) = &q.traces {
        obj.insert("odd".into(), json!(num::oddness(s.n, tr)?));
    }
    if let Some(sel) = &q.selmer {
        obj.insert("selmer_difference".into(), json!(num::selmer_difference(sel)));
    }
    Ok((id.equal, out))
}

//! Checks of the patched truncations. Anything over the truncation ring is
//! only attempted when `sum(ranks) * |basis|` stays under the tower's cap;
//! larger levels are reported as unverified rather than skipped silently.

use serde::Serialize;

use super::datum::{reduce_datum, PatchingDatum};
use super::{PatchedResult, TowerConfig};
use crate::complexes::{Complex, MinimalityCertificate};
use crate::graded::{depth_pd, nearly_faithful};
use crate::linalg::{FiniteModule, Solver, ZMatrix};
use crate::rings::{Params, Ring, RingMap};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    #[serde(rename = "unverified-at-truncation")]
    Unverified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    /// `None` for checks not tied to one level (the graded shadow).
    pub level: Option<u32>,
    pub verdict: Verdict,
    pub detail: String,
}

impl LevelCheck {
    fn new(level: Option<u32>, ok: bool, detail: String) -> LevelCheck {
        LevelCheck { level, verdict: if ok { Verdict::Pass } else { Verdict::Fail }, detail }
    }

    fn unverified(level: u32, detail: String) -> LevelCheck {
        LevelCheck { level: Some(level), verdict: Verdict::Unverified, detail }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conclusion {
    pub id: String,
    pub verdict: Verdict,
    pub checks: Vec<LevelCheck>,
}

impl Conclusion {
    fn from_checks(id: &str, checks: Vec<LevelCheck>) -> Conclusion {
        let verdict = if checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if checks.iter().any(|c| c.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Unverified
        };
        Conclusion { id: id.into(), verdict, checks }
    }

    /// Levels cited by failing checks.
    pub fn failing_levels(&self) -> Vec<u32> {
        self.checks.iter().filter(|c| c.verdict == Verdict::Fail).filter_map(|c| c.level).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConclusionReport {
    pub depth_target: i64,
    /// The regular sequence used for the depth certificate.
    pub certificate: Vec<String>,
    pub conclusions: Vec<Conclusion>,
    pub all_pass: bool,
}

impl ConclusionReport {
    pub fn get(&self, id: &str) -> Option<&Conclusion> {
        self.conclusions.iter().find(|c| c.id == id)
    }
}

fn within_cap(d: &PatchingDatum, cap: usize) -> bool {
    d.complex.ranks().iter().sum::<usize>() * d.truncation.basis_size() <= cap
}

fn over_cap(d: &PatchingDatum) -> LevelCheck {
    let size = d.complex.ranks().iter().sum::<usize>() * d.truncation.basis_size();
    LevelCheck::unverified(d.level, format!("ambient dimension {size} over the verification cap"))
}

fn identity_minus(a: &ZMatrix) -> ZMatrix {
    a.sub(&ZMatrix::identity(a.ring(), a.rows()))
}

/// Apply a ring map blockwise to the columns of a cochain matrix.
fn map_cochains(f: &RingMap, x: &ZMatrix) -> ZMatrix {
    let bs = f.src.basis_size();
    let bd = f.dst.basis_size();
    let blocks = x.rows() / bs;
    let mut out = ZMatrix::zeros(f.dst.coeff(), blocks * bd, x.cols());
    for c in 0..x.cols() {
        let col = x.column(c);
        for b in 0..blocks {
            let img = f.apply_unchecked(&col[b * bs..(b + 1) * bs]);
            for (k, v) in img.into_iter().enumerate() {
                out.set(b * bd + k, c, v);
            }
        }
    }
    out
}

fn conclusion_i(r: &PatchedResult, tower: &TowerConfig, truncs: &[Option<Complex>]) -> Result<Conclusion> {
    let l0 = tower.l0 as i32;
    let mut checks = Vec::new();
    for (d, t) in r.data.iter().zip(truncs) {
        let minimal = MinimalityCertificate::of(&d.complex).is_minimal();
        let c = &d.complex;
        let concentrated = c.degrees().all(|k| c.rank(k) == 0 || (0..=l0).contains(&k));
        let top_nonzero = match t {
            Some(t) => !t.cohomology(l0).module().is_zero(),
            None => !d.h.is_zero(),
        };
        checks.push(LevelCheck::new(
            Some(d.level),
            minimal && concentrated && top_nonzero,
            format!("minimal={minimal} degrees-in-0..{l0}={concentrated} H^{l0}-nonzero={top_nonzero}"),
        ));
    }
    // lower cohomology: the image from the highest verified level in level 1
    let top = r.data.iter().zip(truncs).rposition(|(d, t)| t.is_some() && d.level >= 2);
    let base = truncs.first().and_then(|t| t.as_ref());
    match (top, base) {
        (Some(i), Some(base)) if l0 > 0 => {
            let (d, t) = (&r.data[i], truncs[i].as_ref().expect("verified"));
            let f = RingMap::between(&d.truncation, base.ring())?;
            let mut ok = true;
            let mut sizes = Vec::new();
            for k in t.lo()..l0 {
                let h_top = t.cohomology(k);
                let h_base = base.cohomology(k);
                sizes.push(format!("H^{k}: p^{}", h_top.module().log_order()));
                if h_top.module().is_zero() {
                    continue;
                }
                let img = h_base.sq.coords_matrix(&map_cochains(&f, &h_top.sq.reps));
                ok &= img.is_zero();
            }
            checks.push(LevelCheck::new(
                Some(d.level),
                ok,
                format!("limit-consistent: {} at level {} map to zero at level 1", sizes.join(", "), d.level),
            ));
        }
        _ => {}
    }
    Ok(Conclusion::from_checks("i", checks))
}

/// Monomials of degree `<= deg` in the given elements, starting with 1.
fn monomials_in(ring: &Ring, gens: &[Vec<u64>], deg: usize) -> Vec<Vec<u64>> {
    let mut out = vec![ring.one()];
    let mut frontier: Vec<(usize, Vec<u64>)> = vec![(0, ring.one())];
    for _ in 0..deg {
        let mut next = Vec::new();
        for (start, x) in &frontier {
            for (k, g) in gens.iter().enumerate().skip(*start) {
                let y = ring.mul(x, g);
                out.push(y.clone());
                next.push((k, y));
            }
        }
        frontier = next;
    }
    out
}

fn in_span(ring: &Ring, cols: &[Vec<u64>], x: &[u64]) -> bool {
    let a = ZMatrix::from_columns(ring.coeff(), ring.basis_size(), cols);
    Solver::new(&a).solve(x).is_some()
}

/// Whether the action of `target` on every cohomology group of `t` is an
/// `O`-combination of the actions of `monos`.
fn in_span_on_cohomology(t: &Complex, monos: &[Vec<u64>], target: &[u64]) -> bool {
    let coeff = t.ring().coeff();
    let mut cols: Vec<Vec<u64>> = vec![Vec::new(); monos.len()];
    let mut rhs = Vec::new();
    let mut exps = Vec::new();
    for k in t.degrees() {
        let h = t.cohomology(k);
        let m = h.module();
        if m.is_zero() {
            continue;
        }
        let induced = |x: &[u64]| h.sq.induced(&t.scalar_action(k, x));
        for (c, x) in monos.iter().enumerate() {
            cols[c].extend(induced(x).data());
        }
        rhs.extend(induced(target).data());
        for &e in &m.exps {
            exps.extend(std::iter::repeat_n(e, m.len()));
        }
    }
    if rhs.is_empty() {
        return true;
    }
    let n = rhs.len();
    let mut a = ZMatrix::from_columns(coeff, n, &cols);
    let mut rel = ZMatrix::zeros(coeff, n, n);
    for (i, &e) in exps.iter().enumerate() {
        rel.set(i, i, coeff.pow_p(e));
    }
    a = a.hstack(&rel);
    Solver::new(&a).solve(&rhs).is_some()
}

fn conclusion_ii(r: &PatchedResult, truncs: &[Option<Complex>]) -> Conclusion {
    let mut checks = Vec::new();
    for (d, t) in r.data.iter().zip(truncs) {
        let Some(t) = t else {
            checks.push(over_cap(d));
            continue;
        };
        let ring = &d.truncation;
        let monos = monomials_in(ring, &d.rho, 2);
        let mut ok = true;
        let mut how = Vec::new();
        for (name, g) in ring.generator_elements() {
            if in_span(ring, &monos, &g) {
                how.push(format!("{name}: ring"));
            } else if in_span_on_cohomology(t, &monos, &g) {
                how.push(format!("{name}: cohomology"));
            } else {
                ok = false;
                how.push(format!("{name}: outside"));
            }
        }
        let detail = if how.is_empty() {
            "no ring generators; R_inf acts through scalars".to_string()
        } else {
            format!("image of S in the R_inf image ({})", how.join(", "))
        };
        checks.push(LevelCheck::new(Some(d.level), ok, detail));
    }
    Conclusion::from_checks("ii", checks)
}

#[derive(Clone, Debug)]
struct Step {
    name: String,
    exponent: u64,
}

fn candidate_sequence(tower: &TowerConfig, level: u32, subset: &[usize]) -> Vec<Step> {
    let mut seq = vec![Step { name: "varpi".into(), exponent: level.min(tower.m) as u64 }];
    for k in 0..tower.j {
        seq.push(Step { name: format!("z{}", k + 1), exponent: level as u64 });
    }
    for &i in subset {
        seq.push(Step { name: format!("gamma{}-1", i + 1), exponent: tower.p.pow(level) });
    }
    seq
}

fn step_matrix(m: &FiniteModule, name: &str) -> ZMatrix {
    let n = m.len();
    if name == "varpi" {
        return ZMatrix::scalar(m.ring, n, m.ring.p());
    }
    if let Some(g) = name.strip_suffix("-1") {
        return identity_minus(m.action(g).expect("group action"));
    }
    m.action(name).expect("variable action").clone()
}

/// Truncated regularity `|ker x| = |x^{e-1} M|` along the sequence, on the
/// successive quotients `M / (x_1, .., x_{i-1}) M`. Sizes are spans inside
/// `M` itself, so the step matrices never leave the original basis.
fn run_sequence(h: &FiniteModule, seq: &[Step]) -> (bool, Vec<String>) {
    let total = h.log_order();
    let mut ideal = ZMatrix::zeros(h.ring, h.len(), 0);
    let mut ideal_log = 0;
    let mut ok = true;
    let mut notes = Vec::new();
    for s in seq {
        if ideal_log == total {
            ok = false;
            notes.push(format!("{}: module already zero", s.name));
            break;
        }
        let x = step_matrix(h, &s.name);
        let mut power = ZMatrix::identity(h.ring, h.len());
        for _ in 1..s.exponent {
            power = h.reduce_rows(&x.mul(&power));
            if power.is_zero() {
                break;
            }
        }
        let grown = ideal.hstack(&x);
        let image = h.span_log_order(&grown) - ideal_log;
        let ker = total - ideal_log - image;
        let top = h.span_log_order(&ideal.hstack(&power)) - ideal_log;
        ok &= ker == top;
        notes.push(format!("{}: |ker|=p^{ker} |x^{}M|=p^{top}", s.name, s.exponent - 1));
        ideal = grown;
        ideal_log += image;
    }
    (ok, notes)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in subsets(n - first - 1, k - 1) {
            let mut s = vec![first];
            s.extend(rest.into_iter().map(|x| x + first + 1));
            out.push(s);
        }
    }
    out
}

fn conclusion_iii(r: &PatchedResult, tower: &TowerConfig, truncs: &[Option<Complex>]) -> Result<(Conclusion, Vec<String>)> {
    let l0 = tower.l0 as i32;
    let target = tower.target_dim();
    let tops: Vec<Option<FiniteModule>> =
        truncs.iter().map(|t| t.as_ref().map(|t| t.cohomology(l0).module().clone())).collect();
    let choose = (tower.q + tower.j).saturating_sub(tower.l0).min(tower.q) as usize;
    let options = subsets(tower.q as usize, choose);
    let run_all = |subset: &[usize]| -> Vec<LevelCheck> {
        r.data
            .iter()
            .zip(&tops)
            .map(|(d, h)| match h {
                None => over_cap(d),
                Some(h) => {
                    let seq = candidate_sequence(tower, d.level, subset);
                    let (ok, notes) = run_sequence(h, &seq);
                    let ok = ok && seq.len() as i64 == target;
                    LevelCheck::new(Some(d.level), ok, notes.join("; "))
                }
            })
            .collect()
    };
    let mut chosen = options.first().cloned().unwrap_or_default();
    let mut checks = run_all(&chosen);
    for s in options.iter().skip(1) {
        if checks.iter().all(|c| c.verdict != Verdict::Fail) {
            break;
        }
        let trial = run_all(s);
        if trial.iter().all(|c| c.verdict != Verdict::Fail) {
            chosen = s.clone();
            checks = trial;
        }
    }
    if let Some(shadow) = &tower.shadow {
        let m = shadow.module()?;
        let rep = depth_pd(&m)?;
        let depth = rep.depth.map_or(-1, |d| d as i64);
        checks.push(LevelCheck::new(
            None,
            depth + 1 == target,
            format!("graded shadow depth {depth}, plus one for varpi, against target {target}"),
        ));
    }
    let names = candidate_sequence(tower, 1, &chosen).into_iter().map(|s| s.name).collect();
    Ok((Conclusion::from_checks("iii", checks), names))
}

fn conclusion_iv(r: &PatchedResult) -> Result<Conclusion> {
    let mut checks = Vec::new();
    for e in &r.excluded {
        checks.push(LevelCheck::new(
            Some(e.source),
            false,
            format!("psi at source level {} fails at datum level {}: {}", e.source, e.level, e.reason),
        ));
    }
    for (i, d) in r.data.iter().enumerate() {
        let mut ok = true;
        let mut notes = Vec::new();
        for n in 1..=d.level {
            let red = reduce_datum(d, n)?;
            match red.check_psi() {
                Ok(()) => notes.push(format!("n={n}: bijective")),
                Err(e) => {
                    ok = false;
                    notes.push(format!("n={n}: {e}"));
                }
            }
        }
        if i > 0 {
            let prev = &r.data[i - 1];
            let same = reduce_datum(d, prev.level)?.psi == prev.psi;
            ok &= same;
            notes.push(format!("agrees with level {}: {same}", prev.level));
        }
        checks.push(LevelCheck::new(Some(d.level), ok, notes.join("; ")));
    }
    Ok(Conclusion::from_checks("iv", checks))
}

fn verified_truncations(r: &PatchedResult, cap: usize) -> Result<Vec<Option<Complex>>> {
    r.data.iter().map(|d| if within_cap(d, cap) { d.truncated().map(Some) } else { Ok(None) }).collect()
}

/// Certifies the patching conclusions on the selected truncations.
pub fn verify_conclusions(r: &PatchedResult, tower: &TowerConfig, parallel: bool) -> Result<ConclusionReport> {
    let truncs = verified_truncations(r, tower.verify_cap())?;
    let (left, right) = if parallel {
        rayon::join(
            || Ok::<_, crate::Error>((conclusion_i(r, tower, &truncs)?, conclusion_ii(r, &truncs))),
            || Ok::<_, crate::Error>((conclusion_iii(r, tower, &truncs)?, conclusion_iv(r)?)),
        )
    } else {
        (
            Ok((conclusion_i(r, tower, &truncs)?, conclusion_ii(r, &truncs))),
            Ok((conclusion_iii(r, tower, &truncs)?, conclusion_iv(r)?)),
        )
    };
    let (c1, c2) = left?;
    let ((c3, certificate), c4) = right?;
    let conclusions = vec![c1, c2, c3, c4];
    let all_pass = conclusions.iter().all(|c| c.verdict == Verdict::Pass) && r.chain_compatible();
    Ok(ConclusionReport { depth_target: tower.target_dim(), certificate, conclusions, all_pass })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FaithfulnessVerdict {
    Free,
    NearlyFaithful,
    NotNearlyFaithful,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Faithfulness {
    pub verdict: FaithfulnessVerdict,
    pub rank: Option<usize>,
    pub checks: Vec<LevelCheck>,
}

/// Minimal number of generators of `H^l0` over the image of `R_inf`, and
/// whether its size is that many copies of the `R_inf` truncation.
fn free_accounting(d: &PatchingDatum, t: &Complex, rinf: &super::RinfSpec) -> Result<(usize, bool, String)> {
    let l0 = d.l0();
    let coh = t.cohomology(l0);
    let h = coh.module();
    let mut gens = ZMatrix::scalar(h.ring, h.len(), h.ring.p());
    for rho in &d.rho {
        gens = gens.hstack(&coh.sq.induced(&t.scalar_action(l0, rho)));
    }
    let rank = h.quotient(&gens).module.log_order() as usize;
    let tpow = if rinf.free_vars == 0 { 1 } else { d.level };
    let rbar = Ring::from_params(Params::trunc_ext(
        d.shape.p,
        d.shape.coeff_exp(d.level),
        rinf.group_vars,
        d.level,
        rinf.free_vars,
        tpow,
    ))?;
    let ok = h.log_order() == rank as u64 * rbar.log_order();
    Ok((rank, ok, format!("|H| = p^{}, {rank} generator(s), |R| = p^{}", h.log_order(), rbar.log_order())))
}

/// `free` by rank and size accounting when `R_inf` is declared smooth,
/// otherwise the graded shadow decides near-faithfulness.
pub fn faithfulness_check(r: &PatchedResult, tower: &TowerConfig) -> Result<Faithfulness> {
    let rinf = tower.rinf();
    if let Some(rinf) = rinf.as_ref().filter(|x| x.smooth) {
        let truncs = verified_truncations(r, tower.verify_cap())?;
        let mut checks = Vec::new();
        let mut ranks = Vec::new();
        for (d, t) in r.data.iter().zip(&truncs) {
            match t {
                None => checks.push(over_cap(d)),
                Some(t) => {
                    let (rank, ok, detail) = free_accounting(d, t, rinf)?;
                    ranks.push(rank);
                    checks.push(LevelCheck::new(Some(d.level), ok, detail));
                }
            }
        }
        let exps = tower.h_exps();
        let h_free = exps.iter().all(|&e| e == tower.m);
        let rank = ranks.first().copied();
        let consistent = rank.is_some() && ranks.iter().all(|&x| Some(x) == rank);
        let h_rank_ok = consistent && h_free && Some(exps.len()) == rank;
        checks.push(LevelCheck::new(None, h_rank_ok, format!("H = O^{} is free: {h_free}", exps.len())));
        let verdict = if checks.iter().all(|c| c.verdict != Verdict::Fail) && consistent {
            FaithfulnessVerdict::Free
        } else {
            FaithfulnessVerdict::Inconclusive
        };
        return Ok(Faithfulness { verdict, rank: rank.filter(|_| verdict == FaithfulnessVerdict::Free), checks });
    }
    if let Some(shadow) = tower.shadow.as_ref().filter(|s| !s.primes.is_empty()) {
        let m = shadow.module()?;
        let primes = shadow.primes(&m)?;
        let rep = nearly_faithful(&m, &primes)?;
        let verdict =
            if rep.nearly_faithful { FaithfulnessVerdict::NearlyFaithful } else { FaithfulnessVerdict::NotNearlyFaithful };
        let detail = format!("annihilator inside minimal primes: {:?}", rep.contained);
        return Ok(Faithfulness { verdict, rank: None, checks: vec![LevelCheck::new(None, true, detail)] });
    }
    Ok(Faithfulness { verdict: FaithfulnessVerdict::Inconclusive, rank: None, checks: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::super::{patch, PatchOptions};
    use super::*;

    fn run(t: &TowerConfig) -> (ConclusionReport, Faithfulness) {
        let r = patch(t, PatchOptions::default()).unwrap();
        (verify_conclusions(&r, t, false).unwrap(), faithfulness_check(&r, t).unwrap())
    }

    #[test]
    fn free_tower_passes() {
        let t = TowerConfig::free(3, 2, 1, 0, 3);
        let (rep, f) = run(&t);
        assert!(rep.all_pass, "{rep:#?}");
        assert_eq!(rep.certificate, vec!["varpi", "gamma1-1"]);
        assert_eq!(f.verdict, FaithfulnessVerdict::Free);
        assert_eq!(f.rank, Some(1));
    }

    #[test]
    fn augmentation_tower_passes() {
        let t = TowerConfig::augmentation(3, 2, 3);
        let (rep, _) = run(&t);
        assert!(rep.all_pass, "{rep:#?}");
        assert_eq!(rep.depth_target, 1);
        assert_eq!(rep.certificate, vec!["varpi"]);
    }

    #[test]
    fn tampered_psi_fails_iv() {
        let mut t = TowerConfig::free(3, 1, 1, 0, 2);
        t.source_levels = Some(3);
        t.psi_override.insert(2, vec![vec![0]]);
        let (rep, _) = run(&t);
        let iv = rep.get("iv").unwrap();
        assert_eq!(iv.verdict, Verdict::Fail);
        assert_eq!(iv.failing_levels(), vec![2]);
    }

    #[test]
    fn subsets_in_order() {
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
    }
}

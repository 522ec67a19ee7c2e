use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::datum::{make_datum, PatchingDatum};
use super::engine::{assemble, Excluded, PatchOptions, PatchedResult, Selected};
use super::{hex, TowerConfig};
use crate::linalg::{ZMatrix, Zpm};
use crate::rings::{ElementJson, MapKind, RMatrix, Ring, RingMap};
use crate::{Error, Result};

/// Mod-`p` identification of two towers: `eta: H^1/p -> H^2/p` and, per
/// source level, `lambda_M` on degree-`l0` cochains of `D_M / p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkConfig {
    pub eta: Vec<Vec<i64>>,
    /// Identity at every level when absent.
    #[serde(default)]
    pub lambda: Option<BTreeMap<u32, Vec<Vec<ElementJson>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairComparison {
    pub level: u32,
    /// `H^l0(P^1_inf)/(a + p) -> H^l0(P^2_inf)/(a + p)` in generator coordinates.
    pub matrix: Vec<Vec<u64>>,
    pub bijective: bool,
    /// `psi^2 o cmp = eta o psi^1`.
    pub square_commutes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairResult {
    pub first: PatchedResult,
    pub second: PatchedResult,
    /// Hex digests of the paired classes, one per level.
    pub pair_fingerprints: Vec<String>,
    pub comparison: PairComparison,
}

fn fp_ring(t: &TowerConfig, level: u32) -> Result<Ring> {
    Ring::group_algebra(t.p, 1, t.q, level)
}

fn lambda_at(link: &LinkConfig, t1: &TowerConfig, level: u32, rows: usize, cols: usize) -> Result<RMatrix> {
    let ring = fp_ring(t1, level)?;
    match link.lambda.as_ref().map(|l| l.get(&level)) {
        None => {
            if rows != cols {
                return Err(Error::Schema {
                    path: "link.lambda".into(),
                    msg: format!("identity link needs equal ranks, got {rows} and {cols}"),
                });
            }
            Ok(RMatrix::identity(&ring, rows))
        }
        Some(None) => Err(Error::MissingLevel(level)),
        Some(Some(m)) => {
            let entries = m
                .iter()
                .map(|row| row.iter().map(|e| ring.parse_element(e)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            RMatrix::from_entries_shaped(&ring, rows, cols, &entries)
        }
    }
}

fn fp_coeff(t: &TowerConfig) -> Result<Zpm> {
    Zpm::new(t.p, 1)
}

/// `psi^2 aug(lambda_M) = eta psi^1` on degree-`l0` cochains of `D_M / p`.
fn check_source_square(t1: &TowerConfig, t2: &TowerConfig, link: &LinkConfig, eta: &ZMatrix, level: u32) -> Result<()> {
    let l0 = t1.l0 as i32;
    let r1 = t1.source_complex(level)?.rank(l0);
    let r2 = t2.source_complex(level)?.rank(l0);
    let f = fp_coeff(t1)?;
    let psi1 = t1.source_psi(level, r1)?.reduce_to(f);
    let psi2 = t2.source_psi(level, r2)?.reduce_to(f);
    let lambda = lambda_at(link, t1, level, r2, r1)?;
    let aug = RingMap::new(lambda.ring(), MapKind::Augment)?;
    let lam = lambda.map(&aug)?.to_zmatrix()?;
    if psi2.mul(&lam) != eta.mul(&psi1) {
        return Err(Error::LinkSquare { level, reason: "psi^2 lambda differs from eta psi^1 mod p".into() });
    }
    Ok(())
}

/// `lambda_P = proj^2 lambda incl^1` over `S_N / p`.
fn lambda_on_data(d1: &PatchingDatum, d2: &PatchingDatum, lambda: &RMatrix) -> Result<RMatrix> {
    let ring = Ring::group_algebra(d1.shape.p, 1, d1.shape.q, d1.level)?;
    let to = |x: &RMatrix| x.map(&RingMap::between(x.ring(), &ring)?);
    Ok(to(&d2.proj_top)?.mul(&to(lambda)?).mul(&to(&d1.incl_top)?))
}

fn pair_fingerprint(d1: &PatchingDatum, d2: &PatchingDatum, lam: &RMatrix) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(d1.fingerprint);
    h.update(d2.fingerprint);
    for r in 0..lam.rows() {
        for c in 0..lam.cols() {
            lam.entry(r, c).iter().for_each(|&x| h.update(x.to_le_bytes()));
        }
    }
    h.finalize().into()
}

fn compare_at_base(
    d1: &PatchingDatum,
    d2: &PatchingDatum,
    lam: &RMatrix,
    eta: &ZMatrix,
) -> Result<PairComparison> {
    let l0 = d1.l0();
    let f = fp_coeff_of(d1)?;
    let a1 = d1.complex.base_change(&RingMap::between(&d1.ring, &Ring::chain(d1.shape.p, 1)?)?)?;
    let a2 = d2.complex.base_change(&RingMap::between(&d2.ring, &Ring::chain(d2.shape.p, 1)?)?)?;
    let lam = lam.map(&RingMap::new(lam.ring(), MapKind::Augment)?)?.to_zmatrix()?;
    let h1 = a1.cohomology(l0);
    let h2 = a2.cohomology(l0);
    let img = lam.mul(&h1.sq.reps);
    let cycles = a2.diff(l0).is_none_or(|d| d.to_zmatrix().map(|d| d.mul(&img).is_zero()).unwrap_or(false));
    let cmp = if cycles { h2.sq.coords_matrix(&img) } else { ZMatrix::zeros(f, h2.module().len(), h1.module().len()) };
    let bijective = cycles
        && h1.module().log_order() == h2.module().log_order()
        && h2.module().span_log_order(&cmp) == h2.module().log_order();
    let psi1 = d1.psi.reduce_to(f).mul(&h1.sq.reps);
    let psi2 = d2.psi.reduce_to(f).mul(&h2.sq.reps);
    let square_commutes = cycles && psi2.mul(&cmp) == eta.mul(&psi1);
    Ok(PairComparison { level: d1.level, matrix: cmp.to_rows(), bijective, square_commutes })
}

fn fp_coeff_of(d: &PatchingDatum) -> Result<Zpm> {
    Zpm::new(d.shape.p, 1)
}

fn same_mod_p(d1: &PatchingDatum, d2: &PatchingDatum) -> bool {
    let p = d1.shape.p;
    let red = |v: &[u64]| v.iter().map(|x| x % p).collect::<Vec<_>>();
    d1.rho.len() == d2.rho.len()
        && d1.rho.iter().zip(&d2.rho).all(|(a, b)| red(a) == red(b))
        && red(&d1.phi) == red(&d2.phi)
}

/// Patches two towers along one chain of source levels, classifying by
/// the pair of fingerprints together with the induced link on `P`.
pub fn patch_pair(t1: &TowerConfig, t2: &TowerConfig, link: &LinkConfig, opts: PatchOptions) -> Result<PairResult> {
    t1.validate()?;
    t2.validate()?;
    if (t1.p, t1.q, t1.j, t1.l0) != (t2.p, t2.q, t2.j, t2.l0) {
        return Err(Error::Schema { path: "towers".into(), msg: "linked towers need equal p, q, j, l0".into() });
    }
    let f = fp_coeff(t1)?;
    let eta = ZMatrix::from_rows(f, &link.eta)?;
    let (h1, h2) = (t1.h_exps().len(), t2.h_exps().len());
    if eta.rows() != h2 || eta.cols() != h1 || eta.inverse().is_none() {
        return Err(Error::Schema { path: "link.eta".into(), msg: format!("need an invertible {h2}x{h1} matrix mod p") });
    }
    let levels = opts.levels.unwrap_or(t1.levels.min(t2.levels));
    let top = t1.source_levels().min(t2.source_levels());
    for m in 1..=top {
        check_source_square(t1, t2, link, &eta, m)?;
    }

    let mut alive: Vec<u32> = (1..=top).collect();
    let mut sel = (Vec::new(), Vec::new());
    let mut data = (Vec::new(), Vec::new());
    let mut excluded = (Vec::new(), Vec::new());
    let mut pair_fps = Vec::new();
    for level in 1..=levels {
        let mut classes: BTreeMap<[u8; 32], Vec<u32>> = BTreeMap::new();
        let mut built = BTreeMap::new();
        for m in alive.clone().into_iter().filter(|&m| m >= level) {
            let a = make_datum(t1, m, level);
            let b = make_datum(t2, m, level);
            let (d1, d2) = match (a, b) {
                (Ok(a), Ok(b)) => (a, b),
                (a, b) => {
                    for (res, ex) in [(a.err(), &mut excluded.0), (b.err(), &mut excluded.1)] {
                        match res {
                            Some(Error::PsiNotIso { level: src, reason }) => {
                                ex.push(Excluded { source: src, level, reason })
                            }
                            Some(e) => return Err(e),
                            None => {}
                        }
                    }
                    alive.retain(|&x| x != m);
                    continue;
                }
            };
            if !same_mod_p(&d1, &d2) {
                return Err(Error::LinkSquare { level: m, reason: "R_inf actions or phi differ mod p".into() });
            }
            let lambda = lambda_at(link, t1, m, t2.source_complex(m)?.rank(t1.l0 as i32), t1.source_complex(m)?.rank(t1.l0 as i32))?;
            let lam = lambda_on_data(&d1, &d2, &lambda)?;
            let fp = pair_fingerprint(&d1, &d2, &lam);
            classes.entry(fp).or_default().push(m);
            built.insert(m, (d1, d2, lam));
        }
        let Some((fp, class)) = super::engine::largest_class(&classes) else {
            return Err(Error::PigeonholeExhausted { level, reason: "no source level usable for both towers".into() });
        };
        let m = class[0];
        let (d1, d2, lam) = built.remove(&m).expect("member of its class");
        let size = class.len();
        sel.0.push(Selected { source: m, level, fingerprint: d1.fingerprint_hex(), class_size: size });
        sel.1.push(Selected { source: m, level, fingerprint: d2.fingerprint_hex(), class_size: size });
        pair_fps.push((hex(&fp), lam));
        data.0.push(d1);
        data.1.push(d2);
        alive = class;
    }
    let comparison = compare_at_base(&data.0[0], &data.1[0], &pair_fps[0].1, &eta)?;
    Ok(PairResult {
        first: assemble(t1, levels, sel.0, data.0, excluded.0)?,
        second: assemble(t2, levels, sel.1, data.1, excluded.1)?,
        pair_fingerprints: pair_fps.into_iter().map(|(h, _)| h).collect(),
        comparison,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity() -> LinkConfig {
        LinkConfig { eta: vec![vec![1]], lambda: None }
    }

    #[test]
    fn identical_free_towers() {
        let t = TowerConfig::free(3, 2, 1, 0, 3);
        let r = patch_pair(&t, &t, &identity(), PatchOptions::default()).unwrap();
        assert!(r.comparison.bijective && r.comparison.square_commutes);
        assert_eq!(r.comparison.matrix, vec![vec![1]]);
        assert_eq!(r.first.selected, r.second.selected);
    }

    #[test]
    fn rescaling_agreeing_mod_p() {
        let t = TowerConfig::free(3, 2, 1, 0, 2);
        let mut u = t.clone();
        u.scale = Some(4);
        let r = patch_pair(&t, &u, &identity(), PatchOptions::default()).unwrap();
        assert!(r.comparison.square_commutes);
    }

    #[test]
    fn corrupted_link_cites_level() {
        let t = TowerConfig::free(3, 1, 1, 0, 2);
        let mut lambda = BTreeMap::new();
        lambda.insert(1, vec![vec![ElementJson::Scalar(1)]]);
        lambda.insert(2, vec![vec![ElementJson::Scalar(2)]]);
        let link = LinkConfig { eta: vec![vec![1]], lambda: Some(lambda) };
        assert!(matches!(patch_pair(&t, &t, &link, PatchOptions::default()), Err(Error::LinkSquare { level: 2, .. })));
    }
}

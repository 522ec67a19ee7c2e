use serde::Serialize;
use sha2::{Digest, Sha256};

use super::TowerConfig;
use crate::complexes::{minimize, Complex};
use crate::linalg::{FiniteModule, ZMatrix, Zpm};
use crate::rings::{MapKind, Params, RMatrix, Ring, RingMap};
use crate::{Error, Result};

/// The numerical shape of a tower, enough to rebuild the rings at any level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Shape {
    pub p: u64,
    pub m: u32,
    pub q: u32,
    pub j: u32,
    pub l0: u32,
}

impl Shape {
    pub fn of(t: &TowerConfig) -> Shape {
        Shape { p: t.p, m: t.m, q: t.q, j: t.j, l0: t.l0 }
    }

    pub fn coeff_exp(&self, level: u32) -> u32 {
        level.min(self.m)
    }

    pub fn datum_ring(&self, level: u32) -> Result<Ring> {
        Ring::group_algebra(self.p, self.coeff_exp(level), self.q, level)
    }

    pub fn truncation_ring(&self, level: u32) -> Result<Ring> {
        let t = if self.j == 0 { 1 } else { level };
        Ring::from_params(Params::trunc_ext(self.p, self.coeff_exp(level), self.q, level, self.j, t))
    }

    pub fn h_module(&self, h_exps: &[u32], level: u32) -> Result<FiniteModule> {
        let a = self.coeff_exp(level);
        FiniteModule::new(Zpm::new(self.p, a)?, h_exps.iter().map(|&e| e.min(a)).collect())
    }
}

/// A patching datum `(phi, psi, P)` of level `N`, built from `D_M`.
#[derive(Clone, Debug)]
pub struct PatchingDatum {
    pub shape: Shape,
    pub source: u32,
    pub level: u32,
    /// `S_N / p^N`.
    pub ring: Ring,
    /// The framed truncation ring at level `N`.
    pub truncation: Ring,
    pub h_exps: Vec<u32>,
    pub h: FiniteModule,
    /// `phi` on the `R_inf` generators, in `O / p^N`.
    pub phi: Vec<u64>,
    /// `R_inf` generator images in the truncation ring.
    pub rho: Vec<Vec<u64>>,
    pub complex: Complex,
    /// Degree-`l0` component of `P -> D_M ⊗ S_N/p^N`.
    pub incl_top: RMatrix,
    /// Degree-`l0` component of `D_M ⊗ S_N/p^N -> P`.
    pub proj_top: RMatrix,
    /// `psi` on augmented degree-`l0` cochains of `P`, rows reduced in `H`.
    pub psi: ZMatrix,
    pub fingerprint: [u8; 32],
}

impl PatchingDatum {
    pub fn fingerprint_hex(&self) -> String {
        super::hex(&self.fingerprint)
    }

    pub fn l0(&self) -> i32 {
        self.shape.l0 as i32
    }

    /// `P ⊗ O` along the augmentation.
    pub fn augmented(&self) -> Result<Complex> {
        self.complex.base_change(&RingMap::new(&self.ring, MapKind::Augment)?)
    }

    /// `P ⊗` the truncation ring.
    pub fn truncated(&self) -> Result<Complex> {
        self.complex.base_change_to(&self.truncation)
    }

    /// Checks that `psi` induces an isomorphism `H^l0(P ⊗ O) -> H / p^N`
    /// that intertwines `rho` (through the augmentation) with `phi`.
    pub fn check_psi(&self) -> std::result::Result<(), String> {
        let aug = self.augmented().map_err(|e| e.to_string())?;
        let l0 = self.l0();
        let h = &self.h;
        if self.psi.cols() != aug.rank(l0) || self.psi.rows() != h.len() {
            return Err(format!("psi has shape {}x{}", self.psi.rows(), self.psi.cols()));
        }
        if let Some(d) = aug.diff(l0 - 1) {
            let on_bnd = h.reduce_rows(&self.psi.mul(&d.to_zmatrix().map_err(|e| e.to_string())?));
            if !on_bnd.is_zero() {
                return Err("psi does not kill coboundaries".into());
            }
        }
        let coh = aug.cohomology(l0);
        let induced = h.reduce_rows(&self.psi.mul(&coh.sq.reps));
        if !coh.module().is_hom_to(&induced, h) {
            return Err("psi is not a homomorphism on cohomology".into());
        }
        let (src, dst) = (coh.module().log_order(), h.log_order());
        if src != dst {
            return Err(format!("|H^l0| = p^{src} but |H / p^N| = p^{dst}"));
        }
        if h.span_log_order(&induced) != dst {
            return Err("psi is not surjective".into());
        }
        let coeff = h.ring;
        for (k, rho) in self.rho.iter().enumerate() {
            let c = coeff.sub(coeff.reduce_u(self.truncation.augment_value(rho)), self.phi[k]);
            if !h.reduce_rows(&induced.scale(c)).is_zero() {
                return Err(format!("psi does not intertwine generator {} with phi", k + 1));
            }
        }
        Ok(())
    }

    fn compute_fingerprint(&mut self) {
        let mut h = Sha256::new();
        let mut put = |x: u64| h.update(x.to_le_bytes());
        put(self.level as u64);
        put(self.phi.len() as u64);
        self.phi.iter().for_each(|&x| put(x));
        put(self.complex.lo() as i64 as u64);
        put(self.complex.ranks().len() as u64);
        self.complex.ranks().iter().for_each(|&r| put(r as u64));
        for d in self.complex.diffs() {
            for r in 0..d.rows() {
                for c in 0..d.cols() {
                    d.entry(r, c).iter().for_each(|&x| put(x));
                }
            }
        }
        put(self.psi.rows() as u64);
        put(self.psi.cols() as u64);
        self.psi.data().iter().for_each(|&x| put(x));
        put(self.rho.len() as u64);
        self.rho.iter().flatten().for_each(|&x| put(x));
        self.fingerprint = h.finalize().into();
    }
}

fn top_component(map: Option<&RMatrix>, ring: &Ring, rows: usize, cols: usize) -> RMatrix {
    map.cloned().unwrap_or_else(|| RMatrix::zeros(ring, rows, cols))
}

/// `D_{M,N}`: `P = minimize(D_M ⊗ S_N/p^N)`, `phi` reduced mod `p^N`, and the
/// supplied `psi` pulled back to `P`.
pub fn make_datum(tower: &TowerConfig, source: u32, level: u32) -> Result<PatchingDatum> {
    if level == 0 || level > source {
        return Err(Error::LevelOrder(format!("datum level {level} needs 1 <= N <= M = {source}")));
    }
    let shape = Shape::of(tower);
    let d = tower.source_complex(source)?;
    let ring = shape.datum_ring(level)?;
    let truncation = shape.truncation_ring(level)?;
    let base = d.base_change_to(&ring)?;
    let min = minimize(&base);
    let l0 = tower.l0 as i32;
    let p = min.complex;
    let incl_top = top_component(min.incl.at(l0), &ring, base.rank(l0), p.rank(l0));
    let proj_top = top_component(min.proj.at(l0), &ring, p.rank(l0), base.rank(l0));

    let a = shape.coeff_exp(level);
    let coeff = Zpm::new(tower.p, a)?;
    let h_exps = tower.h_exps();
    let h = shape.h_module(&h_exps, level)?;
    let aug = RingMap::new(&ring, MapKind::Augment)?;
    let psi_src = tower.source_psi(source, base.rank(l0))?.reduce_to(coeff);
    let psi = h.reduce_rows(&psi_src.mul(&incl_top.map(&aug)?.to_zmatrix()?));

    let actions = tower.actions();
    let rho = actions.iter().map(|a| truncation.parse_element(&a.image)).collect::<Result<Vec<_>>>()?;
    let phi = actions.iter().map(|a| coeff.reduce(a.phi)).collect();

    let mut datum = PatchingDatum {
        shape,
        source,
        level,
        ring,
        truncation,
        h_exps,
        h,
        phi,
        rho,
        complex: p,
        incl_top,
        proj_top,
        psi,
        fingerprint: [0; 32],
    };
    datum.check_psi().map_err(|reason| Error::PsiNotIso { level: source, reason })?;
    datum.compute_fingerprint();
    Ok(datum)
}

/// `D mod d_{N'}`: base change of `P`, truncation of `phi`, `psi` and `rho`.
pub fn reduce_datum(d: &PatchingDatum, level: u32) -> Result<PatchingDatum> {
    if level == 0 || level > d.level {
        return Err(Error::LevelOrder(format!("cannot reduce a level {} datum to level {level}", d.level)));
    }
    if level == d.level {
        return Ok(d.clone());
    }
    let shape = d.shape;
    let ring = shape.datum_ring(level)?;
    let truncation = shape.truncation_ring(level)?;
    let to_ring = RingMap::between(&d.ring, &ring)?;
    let to_trunc = RingMap::between(&d.truncation, &truncation)?;
    let coeff = Zpm::new(shape.p, shape.coeff_exp(level))?;
    let h = shape.h_module(&d.h_exps, level)?;
    let mut out = PatchingDatum {
        shape,
        source: d.source,
        level,
        complex: d.complex.base_change(&to_ring)?,
        incl_top: d.incl_top.map(&to_ring)?,
        proj_top: d.proj_top.map(&to_ring)?,
        psi: h.reduce_rows(&d.psi.reduce_to(coeff)),
        phi: d.phi.iter().map(|&x| coeff.reduce_u(x)).collect(),
        rho: d.rho.iter().map(|x| to_trunc.apply(x)).collect::<Result<Vec<_>>>()?,
        h_exps: d.h_exps.clone(),
        h,
        ring,
        truncation,
        fingerprint: [0; 32],
    };
    out.compute_fingerprint();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_tower_data_agree_across_sources() {
        let t = TowerConfig::free(3, 2, 1, 0, 3);
        let a = make_datum(&t, 2, 1).unwrap();
        let b = make_datum(&t, 3, 1).unwrap();
        assert_eq!(a.fingerprint, b.fingerprint);
        assert_eq!(a.complex.ranks(), &[1]);
        assert_eq!(a.ring.coeff().modulus(), 3);
    }

    #[test]
    fn augmentation_datum_is_gamma_minus_one() {
        let t = TowerConfig::augmentation(3, 1, 3);
        let d = make_datum(&t, 2, 1).unwrap();
        assert_eq!(d.complex.ranks(), &[1, 1]);
        let r = &d.ring;
        assert_eq!(d.complex.diffs()[0].entry(0, 0), r.sub(&r.gamma(0).unwrap(), &r.one()).as_slice());
    }

    #[test]
    fn reduction_commutes_with_construction() {
        let t = TowerConfig::augmentation(3, 2, 3);
        let top = make_datum(&t, 3, 3).unwrap();
        for n in 1..=3 {
            assert_eq!(reduce_datum(&top, n).unwrap().fingerprint, make_datum(&t, 3, n).unwrap().fingerprint);
        }
        assert!(reduce_datum(&top, 4).is_err());
    }

    #[test]
    fn level_order_and_bad_psi() {
        let t = TowerConfig::free(3, 1, 1, 0, 2);
        assert!(matches!(make_datum(&t, 1, 2), Err(Error::LevelOrder(_))));
        let mut bad = t.clone();
        bad.psi_override.insert(2, vec![vec![3]]);
        assert!(matches!(make_datum(&bad, 2, 1), Err(Error::PsiNotIso { level: 2, .. })));
        let mut scaled = t.clone();
        scaled.scale = Some(2);
        assert_ne!(make_datum(&scaled, 1, 1).unwrap().fingerprint, make_datum(&t, 1, 1).unwrap().fingerprint);
    }
}

//! Fitting decompositions `M = lim T^n M ⊕ (nilpotent part)` for modules and
//! complexes, and composite Hecke-style projectors.
//!
//! The idempotent is built in two steps. Over the residue field a power
//! `T^K` with `K = prod_{d<=r} (p^d - 1) * p^{ceil(log_p r)}` is already the
//! Fitting projector; it is then lifted through the nilpotent kernel of
//! reduction by `e <- 3e^2 - 2e^3`. The result is a polynomial in `T`.

use serde::Serialize;

use crate::complexes::{ChainMap, Complex};
use crate::linalg::{FiniteModule, ZMatrix};
use crate::rings::{RMatrix, Ring};
use crate::{Error, Result};

/// Exponent factors whose product kills every element of `GL_r(F_p)` and
/// exceeds the stabilization index over the residue field.
fn residue_exponents(p: u64, r: usize) -> Vec<u64> {
    let mut out = Vec::new();
    let mut pd: u64 = 1;
    for _ in 0..r {
        pd = pd.saturating_mul(p);
        out.push(pd - 1);
    }
    let mut top = 1u64;
    while (top as usize) < r {
        top *= p;
    }
    out.push(top);
    out
}

/// `T^K` for the residue exponent `K`, via one power per factor.
fn residue_power<M: Clone>(t: &M, p: u64, r: usize, pow: impl Fn(&M, u64) -> M) -> M {
    residue_exponents(p, r).into_iter().fold(t.clone(), |x, e| pow(&x, e))
}

/// Lift an idempotent through a nilpotent ideal.
fn lift_idempotent<M: Clone>(
    mut e: M,
    mul: impl Fn(&M, &M) -> M,
    lin: impl Fn(&M, &M) -> M,
    same: impl Fn(&M, &M) -> bool,
) -> M {
    // bounded: the error e^2 - e squares its nilpotency order each round
    for _ in 0..64 {
        let e2 = mul(&e, &e);
        if same(&e2, &e) {
            return e;
        }
        let e3 = mul(&e2, &e);
        e = lin(&e2, &e3);
    }
    e
}

#[derive(Clone, Debug)]
pub struct Fitting {
    /// `eM`, with the operator recorded as action `"T"`.
    pub ordinary: FiniteModule,
    /// `(1-e)M`, also carrying `"T"`.
    pub nilpotent: FiniteModule,
    /// The idempotent witness.
    pub e: ZMatrix,
    /// First `k` with `T^k M = T^{k+1} M`.
    pub stabilization: usize,
    /// Columns: generators of `eM` inside `M`.
    pub ordinary_incl: ZMatrix,
    pub nilpotent_incl: ZMatrix,
}

/// Verdicts of the Fitting invariants on a decomposition.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct FittingChecks {
    pub idempotent: bool,
    pub sizes_multiply: bool,
    pub invertible_on_ordinary: bool,
    pub nilpotent_on_complement: bool,
    pub stabilization_bound: bool,
}

impl FittingChecks {
    pub fn all(&self) -> bool {
        self.idempotent
            && self.sizes_multiply
            && self.invertible_on_ordinary
            && self.nilpotent_on_complement
            && self.stabilization_bound
    }
}

fn check_operator(m: &FiniteModule, t: &ZMatrix) -> Result<()> {
    if !m.is_well_defined(t) {
        return Err(Error::NonCommuting("operator is not a well-defined endomorphism".into()));
    }
    for (name, a) in &m.actions {
        if name != "T" && !m.commutes(a, t) {
            return Err(Error::NonCommuting(format!("operator does not commute with {name}")));
        }
    }
    Ok(())
}

/// The Fitting idempotent of `t` on `m` (a polynomial in `t`).
pub fn fitting_idempotent(m: &FiniteModule, t: &ZMatrix) -> ZMatrix {
    let p = m.ring.p();
    let x = residue_power(&m.reduce_rows(t), p, m.len(), |a, e| m.reduce_rows(&a.pow(e)));
    lift_idempotent(
        x,
        |a, b| m.reduce_rows(&a.mul(b)),
        |e2, e3| m.reduce_rows(&e2.scale(3).sub(&e3.scale(2))),
        |a, b| m.endo_eq(a, b),
    )
}

pub fn stabilization_index(m: &FiniteModule, t: &ZMatrix) -> usize {
    let mut k = 0;
    let mut x = ZMatrix::identity(m.ring, m.len());
    let mut size = m.log_order();
    loop {
        let next = m.reduce_rows(&t.mul(&x));
        let s = m.span_log_order(&next);
        if s == size {
            return k;
        }
        size = s;
        x = next;
        k += 1;
    }
}

pub fn fitting_decomposition(m: &FiniteModule, t: &ZMatrix) -> Result<Fitting> {
    check_operator(m, t)?;
    let e = fitting_idempotent(m, t);
    if !m.endo_eq(&e.mul(&e), &e) {
        return Err(Error::Invariant { name: "fitting".into(), msg: "idempotent lifting did not converge".into() });
    }
    let id = ZMatrix::identity(m.ring, m.len());
    let f = m.reduce_rows(&id.sub(&e));
    let mut with_t = m.clone();
    with_t.actions.insert("T".into(), m.reduce_rows(t));
    let ord = with_t.submodule(&e);
    let nil = with_t.submodule(&f);
    Ok(Fitting {
        ordinary: ord.module,
        nilpotent: nil.module,
        e,
        stabilization: stabilization_index(m, t),
        ordinary_incl: ord.incl,
        nilpotent_incl: nil.incl,
    })
}

impl Fitting {
    pub fn check(&self, m: &FiniteModule) -> FittingChecks {
        let idempotent = m.endo_eq(&self.e.mul(&self.e), &self.e);
        let sizes_multiply = self.ordinary.log_order() + self.nilpotent.log_order() == m.log_order();
        let invertible_on_ordinary = match self.ordinary.action("T") {
            Some(t) => self.ordinary.span_log_order(t) == self.ordinary.log_order(),
            None => self.ordinary.is_zero(),
        };
        let nilpotent_on_complement = match self.nilpotent.action("T") {
            Some(t) => {
                let len = self.nilpotent.length().max(1);
                self.nilpotent.reduce_rows(&t.pow(len)).is_zero()
            }
            None => self.nilpotent.is_zero(),
        };
        let stabilization_bound = self.stabilization as u64 <= m.log_order();
        FittingChecks { idempotent, sizes_multiply, invertible_on_ordinary, nilpotent_on_complement, stabilization_bound }
    }
}

/// `e` over the ring: Fitting idempotent of an `R`-linear endomorphism of `R^r`.
pub fn ring_fitting_idempotent(ring: &Ring, t: &RMatrix) -> RMatrix {
    let x = residue_power(t, ring.p(), t.rows(), |a, e| a.pow(e));
    let three = ring.scalar(3);
    let two = ring.scalar(2);
    lift_idempotent(x, |a, b| a.mul(b), |e2, e3| e2.scale(&three).sub(&e3.scale(&two)), |a, b| a == b)
}

/// Indices of columns of `a` (over `F_p`) forming a basis of the column span,
/// chosen greedily left to right.
fn pivot_columns(a: &ZMatrix) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut rank = 0;
    for c in 0..a.cols() {
        let mut idx = chosen.clone();
        idx.push(c);
        let r = a.select_cols(&idx).rank_mod_p();
        if r > rank {
            chosen.push(c);
            rank = r;
        }
    }
    chosen
}

/// Summand complex `C_T = lim T^n C` with its inclusion and projection.
#[derive(Clone, Debug)]
pub struct OrdinaryPart {
    pub complex: Complex,
    pub idempotents: Vec<RMatrix>,
    pub incl: ChainMap,
    pub proj: ChainMap,
}

/// Per-degree comparison of `H^*(C_T)` with the ordinary part of `H^*(C)`.
#[derive(Clone, Debug, Serialize)]
pub struct OrdinaryCheck {
    pub degree: i32,
    pub exps_summand: Vec<u32>,
    pub exps_ordinary: Vec<u32>,
    pub equal: bool,
}

pub fn check_chain_endomorphism(c: &Complex, t: &ChainMap) -> Result<()> {
    for deg in c.degrees() {
        let m = t.at(deg).ok_or_else(|| Error::Dimension(format!("operator missing degree {deg}")))?;
        if m.rows() != c.rank(deg) || m.cols() != c.rank(deg) || m.ring() != c.ring() {
            return Err(Error::Dimension(format!("operator in degree {deg} has the wrong shape")));
        }
    }
    if !t.is_chain_map(c, c) {
        return Err(Error::NonCommuting("operator is not a chain map".into()));
    }
    Ok(())
}

pub fn ordinary_part_complex(c: &Complex, t: &ChainMap) -> Result<OrdinaryPart> {
    check_chain_endomorphism(c, t)?;
    let ring = c.ring();
    let mut idempotents = Vec::new();
    let mut bases = Vec::new();
    let mut lefts = Vec::new();
    for deg in c.degrees() {
        let td = t.at(deg).expect("checked");
        let e = ring_fitting_idempotent(ring, td);
        if e.mul(&e) != e {
            return Err(Error::Invariant { name: "ordinary".into(), msg: format!("no idempotent in degree {deg}") });
        }
        let cols = pivot_columns(&e.residue());
        let b = e.select_cols(&cols);
        // rows where the residue of b has full rank give a left inverse
        let rows = pivot_columns(&b.residue().transpose());
        let left = if cols.is_empty() {
            RMatrix::zeros(ring, 0, c.rank(deg))
        } else {
            let square = b.select_rows(&rows);
            let inv = square.inverse().ok_or_else(|| Error::Invariant {
                name: "ordinary".into(),
                msg: format!("summand basis is not free in degree {deg}"),
            })?;
            inv.mul(&RMatrix::identity(ring, c.rank(deg)).select_rows(&rows))
        };
        idempotents.push(e);
        bases.push(b);
        lefts.push(left);
    }
    let mut diffs = Vec::new();
    for (i, d) in c.diffs().iter().enumerate() {
        let img = d.mul(&bases[i]);
        let y = lefts[i + 1].mul(&img);
        if bases[i + 1].mul(&y) != img {
            return Err(Error::Invariant {
                name: "ordinary".into(),
                msg: format!("differential leaves the summand in degree {}", c.lo() + i as i32),
            });
        }
        diffs.push(y);
    }
    let ranks = bases.iter().map(|b| b.cols()).collect();
    let complex = Complex::new(ring, c.lo(), ranks, diffs)?;
    let proj = lefts.iter().zip(&idempotents).map(|(l, e)| l.mul(e)).collect();
    Ok(OrdinaryPart {
        complex,
        idempotents,
        incl: ChainMap { lo: c.lo(), maps: bases },
        proj: ChainMap { lo: c.lo(), maps: proj },
    })
}

/// The induced operator on `H^deg(C)`.
pub fn induced_on_cohomology(c: &Complex, t: &ChainMap, deg: i32) -> (FiniteModule, ZMatrix) {
    let h = c.cohomology(deg);
    let t_h = h.sq.induced(&t.at(deg).expect("degree in range").underlying());
    (h.sq.module, t_h)
}

/// Compare `H^*(C_T)` with the Fitting ordinary part of `H^*(C)` degreewise.
pub fn verify_ordinary_part(c: &Complex, t: &ChainMap, part: &OrdinaryPart) -> Result<Vec<OrdinaryCheck>> {
    let mut out = Vec::new();
    for deg in c.degrees() {
        let (h, th) = induced_on_cohomology(c, t, deg);
        let fit = fitting_decomposition(&h, &th)?;
        let hs = part.complex.cohomology(deg);
        let exps_summand = hs.module().exps.clone();
        let equal = exps_summand == fit.ordinary.exps;
        out.push(OrdinaryCheck { degree: deg, exps_summand, exps_ordinary: fit.ordinary.exps, equal });
    }
    Ok(out)
}

/// `prod pi ∘ prod (T - eta)` on a complex; all operators must commute.
pub fn localization_projector(c: &Complex, ops: &[(ChainMap, u64)], pis: &[ChainMap]) -> Result<ChainMap> {
    let ring = c.ring();
    let mut all: Vec<ChainMap> = Vec::new();
    for (t, eta) in ops {
        check_chain_endomorphism(c, t)?;
        let eta_el = ring.scalar(*eta);
        let maps = c
            .degrees()
            .map(|deg| {
                let m = t.at(deg).expect("checked");
                m.sub(&RMatrix::scalar_diag(ring, m.rows(), &eta_el))
            })
            .collect();
        all.push(ChainMap { lo: c.lo(), maps });
    }
    for pi in pis {
        check_chain_endomorphism(c, pi)?;
        all.push(pi.clone());
    }
    let raw: Vec<&ChainMap> = ops.iter().map(|(t, _)| t).chain(pis.iter()).collect();
    for deg in c.degrees() {
        for (i, a) in raw.iter().enumerate() {
            for b in &raw[i + 1..] {
                let (x, y) = (a.at(deg).expect("checked"), b.at(deg).expect("checked"));
                if x.mul(y) != y.mul(x) {
                    return Err(Error::NonCommuting(format!("operators {i} and another do not commute in degree {deg}")));
                }
            }
        }
    }
    let maps = c
        .degrees()
        .map(|deg| {
            all.iter().fold(RMatrix::identity(ring, c.rank(deg)), |acc, op| op.at(deg).expect("checked").mul(&acc))
        })
        .collect();
    Ok(ChainMap { lo: c.lo(), maps })
}

/// The same composite for operators on a finite module.
pub fn localization_projector_module(m: &FiniteModule, ops: &[(ZMatrix, u64)], pis: &[ZMatrix]) -> Result<ZMatrix> {
    let id = ZMatrix::identity(m.ring, m.len());
    let mut all = Vec::new();
    for (t, eta) in ops {
        check_operator(m, t)?;
        all.push(t.sub(&id.scale(*eta)));
    }
    for pi in pis {
        check_operator(m, pi)?;
        all.push(pi.clone());
    }
    let raw: Vec<&ZMatrix> = ops.iter().map(|(t, _)| t).chain(pis.iter()).collect();
    for (i, a) in raw.iter().enumerate() {
        for b in &raw[i + 1..] {
            if !m.commutes(a, b) {
                return Err(Error::NonCommuting("localization operators do not commute".into()));
            }
        }
    }
    Ok(all.iter().fold(id, |acc, op| m.reduce_rows(&op.mul(&acc))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Zpm;

    fn fp(p: u64) -> Zpm {
        Zpm::new(p, 1).unwrap()
    }

    #[test]
    fn identity_and_zero_operators() {
        let r = fp(5);
        let m = FiniteModule::new(r, vec![1, 1]).unwrap();
        let id = fitting_decomposition(&m, &ZMatrix::identity(r, 2)).unwrap();
        assert_eq!(id.ordinary.exps, vec![1, 1]);
        assert!(id.nilpotent.is_zero());
        let zero = fitting_decomposition(&m, &ZMatrix::zeros(r, 2, 2)).unwrap();
        assert!(zero.ordinary.is_zero());
        assert!(zero.check(&m).all());
    }

    #[test]
    fn projection_onto_first_coordinate() {
        // T = [[1,1],[0,0]]: T^2 = T, image spanned by (1,0)
        let r = fp(3);
        let m = FiniteModule::new(r, vec![1, 1]).unwrap();
        let t = ZMatrix::from_rows(r, &[vec![1, 1], vec![0, 0]]).unwrap();
        let f = fitting_decomposition(&m, &t).unwrap();
        assert_eq!(f.ordinary.exps, vec![1]);
        let v = f.ordinary_incl.column(0);
        assert_eq!(v[1], 0);
        assert_ne!(v[0], 0);
        assert!(f.check(&m).all());
    }

    #[test]
    fn eigen_split_by_projector() {
        // T = diag(2, 3) on F_5^2; localizing away from eta = 2 keeps the 3-line
        let r = fp(5);
        let m = FiniteModule::new(r, vec![1, 1]).unwrap();
        let t = ZMatrix::from_rows(r, &[vec![2, 0], vec![0, 3]]).unwrap();
        let proj = localization_projector_module(&m, &[(t, 2)], &[]).unwrap();
        let f = fitting_decomposition(&m, &proj).unwrap();
        assert_eq!(f.ordinary.exps, vec![1]);
        assert_eq!(f.ordinary_incl.column(0)[0], 0);
        let id = localization_projector_module(&m, &[], &[]).unwrap();
        assert_eq!(id, ZMatrix::identity(r, 2));
    }

    #[test]
    fn non_commuting_operator_rejected() {
        let r = fp(3);
        let a = ZMatrix::from_rows(r, &[vec![1, 1], vec![0, 1]]).unwrap();
        let m = FiniteModule::new(r, vec![1, 1]).unwrap().with_action("gamma1", a).unwrap();
        let t = ZMatrix::from_rows(r, &[vec![1, 0], vec![0, 2]]).unwrap();
        assert!(matches!(fitting_decomposition(&m, &t), Err(Error::NonCommuting(_))));
    }

    #[test]
    fn projection_on_a_complex() {
        // C = [R ⊕ R -> 0] with T = diag(1, 0): C_T is the first summand
        let ring = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let c = Complex::single(&ring, 0, 2);
        let mut t = RMatrix::zeros(&ring, 2, 2);
        t.set(0, 0, &ring.one());
        let tm = ChainMap { lo: 0, maps: vec![t] };
        let part = ordinary_part_complex(&c, &tm).unwrap();
        assert_eq!(part.complex.ranks(), &[1]);
        assert!(verify_ordinary_part(&c, &tm, &part).unwrap().iter().all(|x| x.equal));
    }
}

//! Bounded cochain complexes of finite free modules over a finite local ring.
//!
//! `diffs[i]` is `d^{lo+i}: C^{lo+i} -> C^{lo+i+1}`, a `rank_{i+1} x rank_i`
//! matrix acting on column vectors.

use serde::Serialize;

use crate::linalg::{FiniteModule, IsoVerdict, Subquotient, ZMatrix};
use crate::rings::{RMatrix, Ring, RingMap};
use crate::{Error, Result};

mod minimize;

pub use minimize::{minimize, MinimalityCertificate, Minimized};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    ring: Ring,
    lo: i32,
    ranks: Vec<usize>,
    diffs: Vec<RMatrix>,
}

/// Outcome of `d^{i+1} d^i = 0` checks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validity {
    pub valid: bool,
    /// Degrees `i` with `d^{i+1} d^i != 0`.
    pub failures: Vec<i32>,
}

impl Complex {
    /// Shape-checked constructor; does not check `d d = 0` (see [`Complex::check`]).
    pub fn new(ring: &Ring, lo: i32, ranks: Vec<usize>, diffs: Vec<RMatrix>) -> Result<Self> {
        let want = ranks.len().saturating_sub(1);
        if diffs.len() != want {
            return Err(Error::InvalidComplex(format!("{} terms need {want} differentials, got {}", ranks.len(), diffs.len())));
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.ring() != ring {
                return Err(Error::RingMismatch(format!("differential {} is over another ring", lo + i as i32)));
            }
            if d.rows() != ranks[i + 1] || d.cols() != ranks[i] {
                return Err(Error::InvalidComplex(format!(
                    "d^{} is {}x{}, expected {}x{}",
                    lo + i as i32,
                    d.rows(),
                    d.cols(),
                    ranks[i + 1],
                    ranks[i]
                )));
            }
        }
        Ok(Complex { ring: ring.clone(), lo, ranks, diffs })
    }

    /// Validating constructor: also requires `d d = 0`.
    pub fn new_checked(ring: &Ring, lo: i32, ranks: Vec<usize>, diffs: Vec<RMatrix>) -> Result<Self> {
        let c = Complex::new(ring, lo, ranks, diffs)?;
        let v = c.check();
        if !v.valid {
            return Err(Error::InvalidComplex(format!("d∘d ≠ 0 at degrees {:?}", v.failures)));
        }
        Ok(c)
    }

    /// The zero complex.
    pub fn zero(ring: &Ring) -> Self {
        Complex { ring: ring.clone(), lo: 0, ranks: Vec::new(), diffs: Vec::new() }
    }

    /// A single free module of rank `r` in degree `deg`.
    pub fn single(ring: &Ring, deg: i32, r: usize) -> Self {
        Complex { ring: ring.clone(), lo: deg, ranks: vec![r], diffs: Vec::new() }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn lo(&self) -> i32 {
        self.lo
    }
    /// Highest degree with a term (`lo - 1` when empty).
    pub fn hi(&self) -> i32 {
        self.lo + self.ranks.len() as i32 - 1
    }
    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }
    pub fn diffs(&self) -> &[RMatrix] {
        &self.diffs
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    pub fn rank(&self, deg: i32) -> usize {
        if deg < self.lo || deg > self.hi() {
            0
        } else {
            self.ranks[(deg - self.lo) as usize]
        }
    }

    /// `d^deg`, or `None` outside the range of differentials.
    pub fn diff(&self, deg: i32) -> Option<&RMatrix> {
        if deg < self.lo {
            return None;
        }
        self.diffs.get((deg - self.lo) as usize)
    }

    /// `d^deg` with zero matrices filled in at the ends.
    pub fn diff_or_zero(&self, deg: i32) -> RMatrix {
        self.diff(deg).cloned().unwrap_or_else(|| RMatrix::zeros(&self.ring, self.rank(deg + 1), self.rank(deg)))
    }

    pub fn check(&self) -> Validity {
        let failures: Vec<i32> = (0..self.diffs.len().saturating_sub(1))
            .filter(|&i| !self.diffs[i + 1].mul(&self.diffs[i]).is_zero())
            .map(|i| self.lo + i as i32)
            .collect();
        Validity { valid: failures.is_empty(), failures }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|d| if d.rem_euclid(2) == 0 { 1 } else { -1 } * self.rank(d) as i64).sum()
    }

    pub fn base_change(&self, f: &RingMap) -> Result<Complex> {
        if f.src != self.ring {
            return Err(Error::RingMismatch(format!("map source {:?} vs complex ring {:?}", f.src, self.ring)));
        }
        let diffs = self.diffs.iter().map(|d| d.map(f)).collect::<Result<Vec<_>>>()?;
        Ok(Complex { ring: f.dst.clone(), lo: self.lo, ranks: self.ranks.clone(), diffs })
    }

    /// Base change along the monomial structure map to `dst`.
    pub fn base_change_to(&self, dst: &Ring) -> Result<Complex> {
        if *dst == self.ring {
            return Ok(self.clone());
        }
        self.base_change(&RingMap::between(&self.ring, dst)?)
    }

    /// `dim_k H^n(C ⊗ k)` for every degree.
    pub fn residue_betti(&self) -> Vec<usize> {
        let rk: Vec<usize> = self.diffs.iter().map(|d| d.residue().rank_mod_p()).collect();
        (0..self.ranks.len())
            .map(|i| {
                let out = rk.get(i).copied().unwrap_or(0);
                let inc = if i > 0 { rk[i - 1] } else { 0 };
                self.ranks[i] - out - inc
            })
            .collect()
    }

    /// Block-diagonal action of a ring element on `C^deg` over `Z/p^m`.
    pub fn scalar_action(&self, deg: i32, x: &[u64]) -> ZMatrix {
        RMatrix::scalar_diag(&self.ring, self.rank(deg), x).underlying()
    }

    /// `H^deg` as a finite module with the actions of `gamma_i` and `z_i`.
    pub fn cohomology(&self, deg: i32) -> Cohomology {
        let coeff = self.ring.coeff();
        let b = self.ring.basis_size();
        let n = self.rank(deg) * b;
        let out = self.diff(deg).map_or_else(|| ZMatrix::zeros(coeff, 0, n), |d| d.underlying());
        let inc = self.diff(deg - 1).map_or_else(|| ZMatrix::zeros(coeff, n, 0), |d| d.underlying());
        let mut sq = Subquotient::new(&out, &inc);
        if !sq.module.is_zero() {
            for (name, g) in self.ring.generator_elements() {
                sq.add_action(&name, &self.scalar_action(deg, &g));
            }
        }
        Cohomology { degree: deg, sq }
    }

    /// Cohomology in every degree of the complex.
    pub fn all_cohomology(&self) -> Vec<Cohomology> {
        self.degrees().map(|d| self.cohomology(d)).collect()
    }
}

/// A cohomology group with cycle representatives.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: i32,
    pub sq: Subquotient,
}

impl Cohomology {
    pub fn module(&self) -> &FiniteModule {
        &self.sq.module
    }
}

/// A degreewise map of complexes `src -> dst` over the same ring.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub lo: i32,
    /// `maps[i]` acts in degree `lo + i`.
    pub maps: Vec<RMatrix>,
}

impl ChainMap {
    pub fn at(&self, deg: i32) -> Option<&RMatrix> {
        if deg < self.lo {
            return None;
        }
        self.maps.get((deg - self.lo) as usize)
    }

    /// `d_dst f = f d_src` in every degree.
    pub fn is_chain_map(&self, src: &Complex, dst: &Complex) -> bool {
        let lo = src.lo().min(dst.lo());
        let hi = src.hi().max(dst.hi());
        let ring = src.ring();
        let get = |deg: i32| {
            self.at(deg).cloned().unwrap_or_else(|| RMatrix::zeros(ring, dst.rank(deg), src.rank(deg)))
        };
        (lo..hi).all(|deg| {
            let lhs = dst.diff_or_zero(deg).mul(&get(deg));
            let rhs = get(deg + 1).mul(&src.diff_or_zero(deg));
            lhs == rhs
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeComparison {
    pub degree: i32,
    pub exps_left: Vec<u32>,
    pub exps_right: Vec<u32>,
    pub verdict: IsoVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyComparison {
    pub degrees: Vec<DegreeComparison>,
    pub verdict: IsoVerdict,
}

/// Per-degree cohomology comparison with an explicit three-tier verdict.
pub fn same_homology(a: &Complex, b: &Complex) -> Result<HomologyComparison> {
    if a.ring() != b.ring() {
        return Err(Error::RingMismatch("complexes live over different rings".into()));
    }
    let lo = a.lo().min(b.lo());
    let hi = a.hi().max(b.hi());
    let mut degrees = Vec::new();
    let mut verdict = IsoVerdict::Isomorphic;
    for deg in lo..=hi {
        let ha = a.cohomology(deg);
        let hb = b.cohomology(deg);
        let v = ha.module().compare(hb.module());
        verdict = worse(verdict, v);
        degrees.push(DegreeComparison {
            degree: deg,
            exps_left: ha.module().exps.clone(),
            exps_right: hb.module().exps.clone(),
            verdict: v,
        });
    }
    Ok(HomologyComparison { degrees, verdict })
}

fn worse(a: IsoVerdict, b: IsoVerdict) -> IsoVerdict {
    use IsoVerdict::*;
    match (a, b) {
        (Distinct, _) | (_, Distinct) => Distinct,
        (EquivalentInvariants, _) | (_, EquivalentInvariants) => EquivalentInvariants,
        _ => Isomorphic,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::MapKind;

    fn f3z3() -> Ring {
        Ring::group_algebra(3, 1, 1, 1).unwrap()
    }

    fn gamma_minus_one(r: &Ring) -> Complex {
        let gm1 = r.sub(&r.gamma(0).unwrap(), &r.one());
        let d = RMatrix::from_entries(r, &[vec![gm1]]).unwrap();
        Complex::new_checked(r, 0, vec![1, 1], vec![d]).unwrap()
    }

    #[test]
    fn validity_reports_failing_degree() {
        let r = Ring::group_algebra(2, 1, 1, 1).unwrap();
        let x = r.sub(&r.gamma(0).unwrap(), &r.one());
        let d = RMatrix::from_entries(&r, &[vec![x]]).unwrap();
        let c = Complex::new(&r, 0, vec![1, 1, 1], vec![d.clone(), d]).unwrap();
        assert!(c.check().valid);
        let one = RMatrix::identity(&r, 1);
        let bad = Complex::new(&r, 0, vec![1, 1, 1], vec![one.clone(), one]).unwrap();
        assert_eq!(bad.check().failures, vec![0]);
        assert!(Complex::single(&r, 0, 1).check().valid);
    }

    #[test]
    fn cohomology_of_gamma_minus_one() {
        // (γ-1) on F3[Z/3] is the cyclic permutation minus the identity: rank 2.
        let c = gamma_minus_one(&f3z3());
        assert_eq!(c.cohomology(0).module().exps, vec![1]);
        assert_eq!(c.cohomology(1).module().exps, vec![1]);
        assert!(c.cohomology(5).module().is_zero());
    }

    #[test]
    fn cohomology_of_two_on_z4() {
        let r = Ring::chain(2, 2).unwrap();
        let d = RMatrix::from_scalars(&r, &[vec![2]]).unwrap();
        let c = Complex::new_checked(&r, 0, vec![1, 1], vec![d]).unwrap();
        assert_eq!(c.cohomology(0).module().exps, vec![1]);
        assert_eq!(c.cohomology(1).module().exps, vec![1]);
    }

    #[test]
    fn augment_kills_gamma_minus_one() {
        let r = f3z3();
        let c = gamma_minus_one(&r);
        let aug = RingMap::new(&r, MapKind::Augment).unwrap();
        let b = c.base_change(&aug).unwrap();
        assert!(b.diffs()[0].is_zero());
        assert_eq!(b.ranks(), &[1, 1]);
    }

    #[test]
    fn residue_betti_matches_field_cohomology() {
        let c = gamma_minus_one(&f3z3());
        assert_eq!(c.residue_betti(), vec![1, 1]);
    }
}

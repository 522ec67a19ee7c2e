//! Splitting off contractible summands `R --u--> R` one unit pivot at a time.

use serde::Serialize;

use super::{ChainMap, Complex};
use crate::rings::RMatrix;

/// One flag per differential: all entries in the maximal ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinimalityCertificate {
    pub lo: i32,
    pub flags: Vec<bool>,
}

impl MinimalityCertificate {
    pub fn of(c: &Complex) -> Self {
        MinimalityCertificate { lo: c.lo(), flags: c.diffs().iter().map(RMatrix::is_minimal).collect() }
    }

    pub fn is_minimal(&self) -> bool {
        self.flags.iter().all(|&f| f)
    }
}

#[derive(Clone, Debug)]
pub struct Minimized {
    pub complex: Complex,
    pub certificate: MinimalityCertificate,
    /// Chain map `minimal -> original`.
    pub incl: ChainMap,
    /// Chain map `original -> minimal`, a left inverse of `incl`.
    pub proj: ChainMap,
    /// Number of contractible summands removed.
    pub splits: usize,
}

/// Deterministic minimization: degrees ascending, first unit entry in
/// row-major order, Schur complement update.
pub fn minimize(c: &Complex) -> Minimized {
    let ring = c.ring().clone();
    let n = c.ranks().len();
    let mut ranks = c.ranks().to_vec();
    let mut diffs = c.diffs().to_vec();
    let mut incl: Vec<RMatrix> = ranks.iter().map(|&r| RMatrix::identity(&ring, r)).collect();
    let mut proj = incl.clone();
    let mut splits = 0;

    for k in 0..diffs.len() {
        while let Some((r, col)) = first_unit(&diffs[k]) {
            let d = &diffs[k];
            let u_inv = ring.inv(d.entry(r, col)).expect("unit pivot");
            let rows_keep: Vec<usize> = (0..ranks[k + 1]).filter(|&i| i != r).collect();
            let cols_keep: Vec<usize> = (0..ranks[k]).filter(|&j| j != col).collect();

            // d'_ij = d_ij - d_ic u^{-1} d_rj
            let mut nd = RMatrix::zeros(&ring, rows_keep.len(), cols_keep.len());
            for (a, &i) in rows_keep.iter().enumerate() {
                let dic_u = ring.mul(d.entry(i, col), &u_inv);
                for (b, &j) in cols_keep.iter().enumerate() {
                    let corr = ring.mul(&dic_u, d.entry(r, j));
                    nd.set(a, b, &ring.sub(d.entry(i, j), &corr));
                }
            }

            // degree k: new basis e_j - u^{-1} d_rj e_c; projection drops c
            let mut inc_k = RMatrix::zeros(&ring, ranks[k], cols_keep.len());
            for (b, &j) in cols_keep.iter().enumerate() {
                inc_k.set(j, b, &ring.one());
                inc_k.set(col, b, &ring.neg(&ring.mul(&u_inv, d.entry(r, j))));
            }
            let proj_k = RMatrix::identity(&ring, ranks[k]).select_rows(&cols_keep);

            // degree k+1: plain inclusion; projection e_i - d_ic u^{-1} e_r
            let inc_k1 = RMatrix::identity(&ring, ranks[k + 1]).select_cols(&rows_keep);
            let mut proj_k1 = RMatrix::zeros(&ring, rows_keep.len(), ranks[k + 1]);
            for (a, &i) in rows_keep.iter().enumerate() {
                proj_k1.set(a, i, &ring.one());
                proj_k1.set(a, r, &ring.neg(&ring.mul(d.entry(i, col), &u_inv)));
            }

            if k > 0 {
                diffs[k - 1] = diffs[k - 1].select_rows(&cols_keep);
            }
            if k + 1 < diffs.len() {
                diffs[k + 1] = diffs[k + 1].select_cols(&rows_keep);
            }
            diffs[k] = nd;
            incl[k] = incl[k].mul(&inc_k);
            incl[k + 1] = incl[k + 1].mul(&inc_k1);
            proj[k] = proj_k.mul(&proj[k]);
            proj[k + 1] = proj_k1.mul(&proj[k + 1]);
            ranks[k] -= 1;
            ranks[k + 1] -= 1;
            splits += 1;
        }
    }
    debug_assert_eq!(incl.len(), n);
    let complex = Complex::new(&ring, c.lo(), ranks, diffs).expect("shapes preserved by splitting");
    let certificate = MinimalityCertificate::of(&complex);
    Minimized {
        complex,
        certificate,
        incl: ChainMap { lo: c.lo(), maps: incl },
        proj: ChainMap { lo: c.lo(), maps: proj },
        splits,
    }
}

fn first_unit(d: &RMatrix) -> Option<(usize, usize)> {
    let ring = d.ring();
    (0..d.rows()).flat_map(|r| (0..d.cols()).map(move |c| (r, c))).find(|&(r, c)| ring.is_unit(d.entry(r, c)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::same_homology;
    use crate::linalg::IsoVerdict;
    use crate::rings::Ring;

    #[test]
    fn unit_differential_splits_completely() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let c = Complex::new_checked(&r, 0, vec![1, 1], vec![RMatrix::identity(&r, 1)]).unwrap();
        let m = minimize(&c);
        assert_eq!(m.complex.ranks(), &[0, 0]);
        assert!(m.certificate.is_minimal());
    }

    #[test]
    fn diagonal_unit_and_p_over_z_p2() {
        let r = Ring::chain(3, 2).unwrap();
        let d = RMatrix::from_scalars(&r, &[vec![2, 0], vec![0, 3]]).unwrap();
        let c = Complex::new_checked(&r, 0, vec![2, 2], vec![d]).unwrap();
        let m = minimize(&c);
        assert_eq!(m.complex.ranks(), &[1, 1]);
        assert_eq!(m.complex.diffs()[0], RMatrix::from_scalars(&r, &[vec![3]]).unwrap());
        assert!(m.incl.is_chain_map(&m.complex, &c));
        assert!(m.proj.is_chain_map(&c, &m.complex));
        assert_eq!(same_homology(&c, &m.complex).unwrap().verdict, IsoVerdict::Isomorphic);
    }

    #[test]
    fn minimal_complex_is_a_fixpoint() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let gm1 = r.sub(&r.gamma(0).unwrap(), &r.one());
        let c = Complex::new_checked(&r, 0, vec![1, 1], vec![RMatrix::from_entries(&r, &[vec![gm1]]).unwrap()]).unwrap();
        let m = minimize(&c);
        assert_eq!(m.complex, c);
        assert_eq!(m.splits, 0);
    }
}

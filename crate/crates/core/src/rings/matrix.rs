use std::fmt;

use super::{Ring, RingMap};
use crate::linalg::{ZMatrix, Zpm};
use crate::{Error, Result};

/// Dense matrix over a finite local ring; entries stored contiguously.
#[derive(Clone, PartialEq, Eq)]
pub struct RMatrix {
    ring: Ring,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for RMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RMatrix {}x{} over {:?}", self.rows, self.cols, self.ring)?;
        for r in 0..self.rows {
            let row: Vec<&[u64]> = (0..self.cols).map(|c| self.entry(r, c)).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl RMatrix {
    pub fn zeros(ring: &Ring, rows: usize, cols: usize) -> Self {
        RMatrix { ring: ring.clone(), rows, cols, data: vec![0; rows * cols * ring.basis_size()] }
    }

    pub fn identity(ring: &Ring, n: usize) -> Self {
        RMatrix::scalar_diag(ring, n, &ring.one())
    }

    /// `x` times the identity.
    pub fn scalar_diag(ring: &Ring, n: usize, x: &[u64]) -> Self {
        let mut m = RMatrix::zeros(ring, n, n);
        for i in 0..n {
            m.set(i, i, x);
        }
        m
    }

    pub fn from_entries(ring: &Ring, entries: &[Vec<Vec<u64>>]) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, |r| r.len());
        RMatrix::from_entries_shaped(ring, rows, cols, entries)
    }

    /// Like `from_entries` but keeps the declared shape for empty inputs.
    pub fn from_entries_shaped(ring: &Ring, rows: usize, cols: usize, entries: &[Vec<Vec<u64>>]) -> Result<Self> {
        if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("expected a {rows}x{cols} matrix")));
        }
        let mut m = RMatrix::zeros(ring, rows, cols);
        for (r, row) in entries.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                ring.check_elem(e)?;
                let e: Vec<u64> = e.iter().map(|&x| ring.coeff().reduce_u(x)).collect();
                m.set(r, c, &e);
            }
        }
        Ok(m)
    }

    /// Matrix over a chain ring from integer entries.
    pub fn from_scalars(ring: &Ring, rows: &[Vec<i64>]) -> Result<Self> {
        let entries: Vec<Vec<Vec<u64>>> =
            rows.iter().map(|r| r.iter().map(|&x| ring.scalar_i(x)).collect()).collect();
        RMatrix::from_entries(ring, &entries)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn entry(&self, r: usize, c: usize) -> &[u64] {
        let b = self.ring.basis_size();
        let o = (r * self.cols + c) * b;
        &self.data[o..o + b]
    }

    #[inline]
    fn entry_mut(&mut self, r: usize, c: usize) -> &mut [u64] {
        let b = self.ring.basis_size();
        let o = (r * self.cols + c) * b;
        &mut self.data[o..o + b]
    }

    pub fn set(&mut self, r: usize, c: usize, x: &[u64]) {
        self.entry_mut(r, c).copy_from_slice(x);
    }

    pub fn to_entries(&self) -> Vec<Vec<Vec<u64>>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.entry(r, c).to_vec()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = RMatrix::zeros(&self.ring, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.entry(i, k).to_vec();
                if self.ring.is_zero(&a) {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.entry(k, j);
                    if b.iter().all(|&x| x == 0) {
                        continue;
                    }
                    self.ring.mul_acc(out.entry_mut(i, j), &a, b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Vec<u64>]) -> Vec<Vec<u64>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self.ring.zero();
                for (k, vk) in v.iter().enumerate() {
                    self.ring.mul_acc(&mut acc, self.entry(i, k), vk);
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let c = self.ring.coeff();
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| c.add(a, b)).collect();
        RMatrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &RMatrix) -> RMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let c = self.ring.coeff();
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| c.sub(a, b)).collect();
        RMatrix { ring: self.ring.clone(), rows: self.rows, cols: self.cols, data }
    }

    /// Multiply every entry by the ring element `x`.
    pub fn scale(&self, x: &[u64]) -> RMatrix {
        let mut out = RMatrix::zeros(&self.ring, self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.ring.mul(self.entry(r, c), x);
                out.set(r, c, &e);
            }
        }
        out
    }

    pub fn pow(&self, mut e: u64) -> RMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = RMatrix::identity(&self.ring, self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn select_rows(&self, idx: &[usize]) -> RMatrix {
        let mut m = RMatrix::zeros(&self.ring, idx.len(), self.cols);
        for (i, &r) in idx.iter().enumerate() {
            for c in 0..self.cols {
                m.set(i, c, self.entry(r, c));
            }
        }
        m
    }

    pub fn select_cols(&self, idx: &[usize]) -> RMatrix {
        let mut m = RMatrix::zeros(&self.ring, self.rows, idx.len());
        for r in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                m.set(r, j, self.entry(r, c));
            }
        }
        m
    }

    pub fn hstack(&self, other: &RMatrix) -> RMatrix {
        assert_eq!(self.rows, other.rows);
        let mut m = RMatrix::zeros(&self.ring, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                m.set(r, c, self.entry(r, c));
            }
            for c in 0..other.cols {
                m.set(r, self.cols + c, other.entry(r, c));
            }
        }
        m
    }

    /// Apply a ring map entrywise.
    pub fn map(&self, f: &RingMap) -> Result<RMatrix> {
        if f.src != self.ring {
            return Err(Error::RingMismatch(format!("map source {:?} vs matrix ring {:?}", f.src, self.ring)));
        }
        let mut m = RMatrix::zeros(&f.dst, self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = f.apply_unchecked(self.entry(r, c));
                m.set(r, c, &e);
            }
        }
        Ok(m)
    }

    /// Block matrix over `Z/p^m` of the underlying abelian-group map.
    pub fn underlying(&self) -> ZMatrix {
        let b = self.ring.basis_size();
        let mut z = ZMatrix::zeros(self.ring.coeff(), self.rows * b, self.cols * b);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.entry(r, c);
                if e.iter().any(|&x| x != 0) {
                    self.ring.write_regular_block(&mut z, r * b, c * b, e);
                }
            }
        }
        z
    }

    /// Entries as scalars; only valid over a chain ring.
    pub fn to_zmatrix(&self) -> Result<ZMatrix> {
        if self.ring.basis_size() != 1 {
            return Err(Error::UnsupportedKind { op: "to_zmatrix", kind: format!("{:?}", self.ring.params()) });
        }
        Ok(ZMatrix::from_data(self.ring.coeff(), self.rows, self.cols, self.data.clone()))
    }

    pub fn from_zmatrix(ring: &Ring, z: &ZMatrix) -> Result<RMatrix> {
        if ring.basis_size() != 1 || ring.coeff() != z.ring() {
            return Err(Error::RingMismatch("scalar matrix needs the matching chain ring".into()));
        }
        Ok(RMatrix { ring: ring.clone(), rows: z.rows(), cols: z.cols(), data: z.data().to_vec() })
    }

    /// Entrywise residues in `F_p`.
    pub fn residue(&self) -> ZMatrix {
        let fp = Zpm::new(self.ring.p(), 1).expect("prime");
        let mut z = ZMatrix::zeros(fp, self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                z.set(r, c, self.ring.residue(self.entry(r, c)));
            }
        }
        z
    }

    /// All entries in the maximal ideal.
    pub fn is_minimal(&self) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| !self.ring.is_unit(self.entry(r, c))))
    }

    /// Inverse over the local ring; `None` if the residue matrix is singular.
    pub fn inverse(&self) -> Option<RMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let ring = self.ring.clone();
        let mut a = self.clone();
        let mut inv = RMatrix::identity(&ring, n);
        for c in 0..n {
            let piv = (c..n).find(|&r| ring.is_unit(a.entry(r, c)))?;
            if piv != c {
                a.swap_rows(piv, c);
                inv.swap_rows(piv, c);
            }
            let u = ring.inv(a.entry(c, c)).expect("unit pivot");
            a.scale_row(c, &u);
            inv.scale_row(c, &u);
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = a.entry(r, c).to_vec();
                if ring.is_zero(&f) {
                    continue;
                }
                let nf = ring.neg(&f);
                a.add_row_multiple(r, c, &nf);
                inv.add_row_multiple(r, c, &nf);
            }
        }
        Some(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let x = self.entry(a, c).to_vec();
            let y = self.entry(b, c).to_vec();
            self.set(a, c, &y);
            self.set(b, c, &x);
        }
    }

    pub fn scale_row(&mut self, r: usize, x: &[u64]) {
        for c in 0..self.cols {
            let e = self.ring.mul(self.entry(r, c), x);
            self.set(r, c, &e);
        }
    }

    /// `row[dst] += f * row[src]`
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, f: &[u64]) {
        let ring = self.ring.clone();
        for c in 0..self.cols {
            let s = self.entry(src, c).to_vec();
            ring.mul_acc(self.entry_mut(dst, c), f, &s);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZMatrix;

    #[test]
    fn underlying_of_gamma_minus_one_has_rank_two() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let gm1 = r.sub(&r.gamma(0).unwrap(), &r.one());
        let m = RMatrix::from_entries(&r, &[vec![gm1]]).unwrap();
        assert_eq!(m.underlying().rank_mod_p(), 2);
        let zero = RMatrix::zeros(&r, 1, 1);
        assert_eq!(zero.underlying(), ZMatrix::zeros(r.coeff(), 3, 3));
    }

    #[test]
    fn underlying_is_functorial() {
        let r = Ring::group_algebra(2, 2, 1, 1).unwrap();
        let g = r.gamma(0).unwrap();
        let a = RMatrix::from_entries(&r, &[vec![g.clone(), r.scalar(2)], vec![r.one(), r.zero()]]).unwrap();
        let b = RMatrix::from_entries(&r, &[vec![r.scalar(3)], vec![g]]).unwrap();
        assert_eq!(a.mul(&b).underlying(), a.underlying().mul(&b.underlying()));
    }

    #[test]
    fn inverse_over_local_ring() {
        let r = Ring::group_algebra(3, 2, 1, 1).unwrap();
        let g = r.gamma(0).unwrap();
        let a = RMatrix::from_entries(&r, &[vec![g.clone(), r.scalar(3)], vec![r.scalar(3), r.one()]]).unwrap();
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), RMatrix::identity(&r, 2));
    }
}

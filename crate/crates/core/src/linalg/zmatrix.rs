use std::fmt;

use super::Zpm;
use crate::{Error, Result};

/// Dense row-major matrix over `Z/p^m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ZMatrix {
    ring: Zpm,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl fmt::Debug for ZMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ZMatrix {}x{} mod {}", self.rows, self.cols, self.ring.modulus())?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl ZMatrix {
    pub fn zeros(ring: Zpm, rows: usize, cols: usize) -> Self {
        ZMatrix { ring, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(ring: Zpm, n: usize) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % ring.modulus();
        }
        m
    }

    pub fn scalar(ring: Zpm, n: usize, c: u64) -> Self {
        let mut m = Self::zeros(ring, n, n);
        for i in 0..n {
            m.data[i * n + i] = ring.reduce_u(c);
        }
        m
    }

    pub fn from_rows(ring: Zpm, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&x| ring.reduce(x)).collect();
        Ok(ZMatrix { ring, rows: r, cols: c, data })
    }

    pub fn from_data(ring: Zpm, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        let data = data.into_iter().map(|x| ring.reduce_u(x)).collect();
        ZMatrix { ring, rows, cols, data }
    }

    pub fn from_columns(ring: Zpm, rows: usize, cols: &[Vec<u64>]) -> Self {
        let mut m = Self::zeros(ring, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.data[i * m.cols + j] = ring.reduce_u(c[i]);
            }
        }
        m
    }

    #[inline]
    pub fn ring(&self) -> Zpm {
        self.ring
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = self.ring.reduce_u(v);
    }
    #[inline]
    pub fn row(&self, r: usize) -> &[u64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }
    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }
    pub fn data(&self) -> &[u64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<u64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ring, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.get(r, c);
            }
        }
        t
    }

    pub fn mul(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let ring = self.ring;
        let q = ring.modulus();
        let mut out = vec![0u64; self.rows * other.cols];
        // Accumulate in u128-free fashion: each product < q^2 < 2^62, reduce often.
        for i in 0..self.rows {
            let acc = &mut out[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in acc.iter_mut().zip(brow) {
                    if b != 0 {
                        *o = (*o + a * b) % q;
                    }
                }
            }
        }
        ZMatrix { ring, rows: self.rows, cols: other.cols, data: out }
    }

    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(self.cols, v.len());
        let q = self.ring.modulus();
        (0..self.rows)
            .map(|i| {
                let mut acc = 0u64;
                for (a, b) in self.row(i).iter().zip(v) {
                    if *a != 0 && *b != 0 {
                        acc = (acc + a * b) % q;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.ring.add(a, b)).collect();
        ZMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.ring.sub(a, b)).collect();
        ZMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u64) -> ZMatrix {
        let data = self.data.iter().map(|&a| self.ring.mul(a, c)).collect();
        ZMatrix { ring: self.ring, rows: self.rows, cols: self.cols, data }
    }

    pub fn pow(&self, mut e: u64) -> ZMatrix {
        assert_eq!(self.rows, self.cols);
        let mut acc = ZMatrix::identity(self.ring, self.rows);
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

    pub fn hstack(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.rows, other.rows);
        let cols = self.cols + other.cols;
        let mut m = ZMatrix::zeros(self.ring, self.rows, cols);
        for r in 0..self.rows {
            m.data[r * cols..r * cols + self.cols].copy_from_slice(self.row(r));
            m.data[r * cols + self.cols..(r + 1) * cols].copy_from_slice(other.row(r));
        }
        m
    }

    pub fn vstack(&self, other: &ZMatrix) -> ZMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        ZMatrix { ring: self.ring, rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn select_rows(&self, idx: &[usize]) -> ZMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &r in idx {
            data.extend_from_slice(self.row(r));
        }
        ZMatrix { ring: self.ring, rows: idx.len(), cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> ZMatrix {
        let mut m = ZMatrix::zeros(self.ring, self.rows, idx.len());
        for r in 0..self.rows {
            for (k, &c) in idx.iter().enumerate() {
                m.data[r * idx.len() + k] = self.get(r, c);
            }
        }
        m
    }

    /// Reinterpret entries in a smaller chain ring `Z/p^n`.
    pub fn reduce_to(&self, target: Zpm) -> ZMatrix {
        assert_eq!(target.p(), self.ring.p());
        let data = self.data.iter().map(|&a| target.reduce_u(a)).collect();
        ZMatrix { ring: target, rows: self.rows, cols: self.cols, data }
    }

    /// Lift entries (as integers in `[0, p^n)`) into a larger chain ring.
    pub fn lift_to(&self, target: Zpm) -> ZMatrix {
        assert_eq!(target.p(), self.ring.p());
        ZMatrix { ring: target, rows: self.rows, cols: self.cols, data: self.data.clone() }
    }

    /// Rank of the reduction modulo `p`, by Gaussian elimination over `F_p`.
    pub fn rank_mod_p(&self) -> usize {
        let p = self.ring.p();
        let fp = Zpm::new(p, 1).expect("prime");
        let mut a: Vec<Vec<u64>> = (0..self.rows).map(|r| self.row(r).iter().map(|&x| x % p).collect()).collect();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(piv) = (rank..self.rows).find(|&r| a[r][c] != 0) else { continue };
            a.swap(rank, piv);
            let inv = fp.inv(a[rank][c]).expect("nonzero in field");
            for x in a[rank].iter_mut() {
                *x = fp.mul(*x, inv);
            }
            let pivot_row = a[rank].clone();
            for (r, row) in a.iter_mut().enumerate() {
                if r != rank && row[c] != 0 {
                    let f = row[c];
                    for (x, &y) in row.iter_mut().zip(&pivot_row) {
                        *x = fp.sub(*x, fp.mul(f, y));
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// Inverse of a square matrix that is invertible over `Z/p^m`.
    pub fn inverse(&self) -> Option<ZMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let ring = self.ring;
        let mut a = self.clone();
        let mut inv = ZMatrix::identity(ring, n);
        for c in 0..n {
            let piv = (c..n).find(|&r| ring.is_unit(a.get(r, c)))?;
            if piv != c {
                a.swap_rows(piv, c);
                inv.swap_rows(piv, c);
            }
            let u = ring.inv(a.get(c, c)).expect("unit pivot");
            a.scale_row(c, u);
            inv.scale_row(c, u);
            for r in 0..n {
                if r != c {
                    let f = a.get(r, c);
                    if f != 0 {
                        a.add_row_multiple(r, c, ring.neg(f));
                        inv.add_row_multiple(r, c, ring.neg(f));
                    }
                }
            }
        }
        Some(inv)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    pub fn scale_row(&mut self, r: usize, f: u64) {
        let ring = self.ring;
        for x in self.row_mut(r) {
            *x = ring.mul(*x, f);
        }
    }

    pub fn scale_col(&mut self, c: usize, f: u64) {
        let ring = self.ring;
        for r in 0..self.rows {
            let i = r * self.cols + c;
            self.data[i] = ring.mul(self.data[i], f);
        }
    }

    /// row[dst] += f * row[src]
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, f: u64) {
        if f == 0 {
            return;
        }
        let q = self.ring.modulus();
        let cols = self.cols;
        let (d, s) = (dst * cols, src * cols);
        for c in 0..cols {
            let v = self.data[s + c];
            if v != 0 {
                self.data[d + c] = (self.data[d + c] + f * v) % q;
            }
        }
    }

    /// col[dst] += f * col[src]
    pub fn add_col_multiple(&mut self, dst: usize, src: usize, f: u64) {
        if f == 0 {
            return;
        }
        let q = self.ring.modulus();
        for r in 0..self.rows {
            let base = r * self.cols;
            let v = self.data[base + src];
            if v != 0 {
                self.data[base + dst] = (self.data[base + dst] + f * v) % q;
            }
        }
    }
}

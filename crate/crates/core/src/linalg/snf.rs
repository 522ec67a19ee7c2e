//! Smith normal form over the chain ring `Z/p^m`.
//!
//! Pivoting always picks an entry of minimal p-adic valuation in the
//! remaining block; its unit part is invertible, so the pivot clears its row
//! and column exactly and the diagonal comes out as `p^{v_1} | p^{v_2} | ...`.

use super::{ZMatrix, Zpm};

/// Which transformation matrices to accumulate.
#[derive(Clone, Copy, Debug, Default)]
pub struct Track {
    pub u: bool,
    pub v: bool,
}

impl Track {
    pub const ALL: Track = Track { u: true, v: true };
    pub const U: Track = Track { u: true, v: false };
    pub const V: Track = Track { u: false, v: true };
    pub const NONE: Track = Track { u: false, v: false };
}

/// `U * A * V = D` with `D` diagonal, `D_kk = p^{vals[k]}` (zero when `vals[k] == m`).
#[derive(Clone, Debug)]
pub struct Snf {
    pub ring: Zpm,
    pub rows: usize,
    pub cols: usize,
    /// Valuations of the diagonal, length `min(rows, cols)`, non-decreasing.
    pub vals: Vec<u32>,
    /// Number of nonzero diagonal entries.
    pub rank: usize,
    pub u: Option<ZMatrix>,
    pub u_inv: Option<ZMatrix>,
    pub v: Option<ZMatrix>,
    pub v_inv: Option<ZMatrix>,
}

impl Snf {
    /// The diagonal matrix `D`.
    pub fn d(&self) -> ZMatrix {
        let mut d = ZMatrix::zeros(self.ring, self.rows, self.cols);
        for (k, &v) in self.vals.iter().enumerate() {
            d.set(k, k, self.ring.pow_p(v));
        }
        d
    }

    /// Invariant-factor exponents of the cokernel of `A`, descending, trivial
    /// factors dropped. Rows beyond the diagonal contribute free summands.
    pub fn cokernel_exps(&self) -> Vec<u32> {
        let m = self.ring.m();
        let mut exps: Vec<u32> = (0..self.rows)
            .map(|k| if k < self.vals.len() { self.vals[k] } else { m })
            .filter(|&e| e > 0)
            .collect();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        exps
    }
}

pub fn smith_normal_form(a: &ZMatrix, track: Track) -> Snf {
    let ring = a.ring();
    let (rows, cols) = (a.rows(), a.cols());
    let m = ring.m();
    let q = ring.modulus();
    let mut w = a.clone();
    let mut u = track.u.then(|| ZMatrix::identity(ring, rows));
    let mut u_inv = track.u.then(|| ZMatrix::identity(ring, rows));
    let mut v = track.v.then(|| ZMatrix::identity(ring, cols));
    let mut v_inv = track.v.then(|| ZMatrix::identity(ring, cols));
    let n = rows.min(cols);
    let mut vals = Vec::with_capacity(n);
    let mut rank = 0;

    // every entry left after a pivot of valuation v is divisible by p^v
    let mut floor = 0;
    for t in 0..n {
        // minimal valuation pivot, first in row-major order
        let mut best: Option<(u32, usize, usize)> = None;
        'scan: for i in t..rows {
            let row = w.row(i);
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x == 0 {
                    continue;
                }
                let vx = ring.val(x);
                if best.is_none_or(|(bv, _, _)| vx < bv) {
                    best = Some((vx, i, j));
                    if vx == floor {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pv, pi, pj)) = best else {
            vals.extend(std::iter::repeat_n(m, n - t));
            break;
        };
        if pi != t {
            w.swap_rows(pi, t);
            if let Some(u) = u.as_mut() {
                u.swap_rows(pi, t);
            }
            if let Some(ui) = u_inv.as_mut() {
                ui.swap_cols(pi, t);
            }
        }
        if pj != t {
            w.swap_cols(pj, t);
            if let Some(v) = v.as_mut() {
                v.swap_cols(pj, t);
            }
            if let Some(vi) = v_inv.as_mut() {
                vi.swap_rows(pj, t);
            }
        }
        floor = pv;
        let x = w.get(t, t);
        let unit = ring.div_pow(x, pv);
        let unit_inv = ring.inv(unit).expect("unit part of minimal-valuation pivot");
        if unit_inv != 1 {
            w.scale_row(t, unit_inv);
            if let Some(u) = u.as_mut() {
                u.scale_row(t, unit_inv);
            }
            if let Some(ui) = u_inv.as_mut() {
                ui.scale_col(t, unit % q);
            }
        }
        let ppow = ring.pow_p_int(pv);
        // clear column t below the pivot; only columns >= t are nonzero in row t
        let pivot_row: Vec<u64> = w.row(t)[t..].to_vec();
        for i in t + 1..rows {
            let e = w.get(i, t);
            if e == 0 {
                continue;
            }
            let c = e / ppow;
            let neg = ring.neg(c % q);
            let row_i = &mut w.row_mut(i)[t..];
            for (x, &y) in row_i.iter_mut().zip(&pivot_row) {
                if y != 0 {
                    *x = (*x + neg * y) % q;
                }
            }
            if let Some(u) = u.as_mut() {
                u.add_row_multiple(i, t, neg);
            }
            if let Some(ui) = u_inv.as_mut() {
                ui.add_col_multiple(t, i, c % q);
            }
        }
        // clear row t right of the pivot; column t is zero below, so only row t changes in w
        for j in t + 1..cols {
            let e = w.get(t, j);
            if e == 0 {
                continue;
            }
            let c = e / ppow;
            w.set(t, j, 0);
            if let Some(v) = v.as_mut() {
                v.add_col_multiple(j, t, ring.neg(c % q));
            }
            if let Some(vi) = v_inv.as_mut() {
                vi.add_row_multiple(t, j, c % q);
            }
        }
        vals.push(pv);
        rank += 1;
    }
    while vals.len() < n {
        vals.push(m);
    }
    Snf { ring, rows, cols, vals, rank, u, u_inv, v, v_inv }
}

/// Generators of `ker A` in the form `V e_k * p^{shift_k}`, each of additive
/// order `p^{exp_k}`.
#[derive(Clone, Debug)]
pub struct KernelBasis {
    pub ring: Zpm,
    /// Generators as columns (ambient dimension x count).
    pub gens: ZMatrix,
    pub exps: Vec<u32>,
    shifts: Vec<u32>,
    /// Rows of `V^{-1}` matching each generator.
    coord_rows: ZMatrix,
}

impl KernelBasis {
    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    /// Coordinates of a kernel element with respect to `gens`; entry `k` is
    /// defined modulo `p^{exps[k]}`.
    pub fn coords(&self, x: &[u64]) -> Vec<u64> {
        let y = self.coord_rows.mul_vec(x);
        y.iter()
            .zip(&self.shifts)
            .zip(&self.exps)
            .map(|((&yk, &s), &e)| self.ring.mod_pow(self.ring.div_pow(yk, s), e))
            .collect()
    }

    /// Coordinates for each column of `a`.
    pub fn coords_matrix(&self, a: &ZMatrix) -> ZMatrix {
        let y = self.coord_rows.mul(a);
        let mut out = ZMatrix::zeros(self.ring, self.len(), a.cols());
        for k in 0..self.len() {
            for c in 0..a.cols() {
                let v = self.ring.mod_pow(self.ring.div_pow(y.get(k, c), self.shifts[k]), self.exps[k]);
                out.set(k, c, v);
            }
        }
        out
    }
}

pub fn kernel(a: &ZMatrix) -> KernelBasis {
    let ring = a.ring();
    let m = ring.m();
    let snf = smith_normal_form(a, Track::V);
    let v = snf.v.expect("tracked");
    let v_inv = snf.v_inv.expect("tracked");
    let mut idx = Vec::new();
    let mut exps = Vec::new();
    let mut shifts = Vec::new();
    for k in 0..a.cols() {
        let vk = if k < snf.vals.len() { snf.vals[k] } else { m };
        // D_kk y_k = 0  <=>  y_k in p^{m - vk}
        if vk == 0 {
            continue;
        }
        idx.push(k);
        exps.push(vk);
        shifts.push(m - vk);
    }
    let mut gens = v.select_cols(&idx);
    for (c, &s) in shifts.iter().enumerate() {
        gens.scale_col(c, ring.pow_p(s));
    }
    let coord_rows = v_inv.select_rows(&idx);
    KernelBasis { ring, gens, exps, shifts, coord_rows }
}

/// Reusable solver for `A x = b` over `Z/p^m`.
#[derive(Clone, Debug)]
pub struct Solver {
    snf: Snf,
}

impl Solver {
    pub fn new(a: &ZMatrix) -> Self {
        Solver { snf: smith_normal_form(a, Track::ALL) }
    }

    pub fn solve(&self, b: &[u64]) -> Option<Vec<u64>> {
        let ring = self.snf.ring;
        let u = self.snf.u.as_ref().expect("tracked");
        let v = self.snf.v.as_ref().expect("tracked");
        let y = u.mul_vec(b);
        let mut x = vec![0u64; self.snf.cols];
        for (k, &yk) in y.iter().enumerate() {
            if k < self.snf.rank {
                let vk = self.snf.vals[k];
                if ring.val(yk) < vk {
                    return None;
                }
                x[k] = ring.div_pow(yk, vk);
            } else if yk != 0 {
                return None;
            }
        }
        Some(v.mul_vec(&x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, m: u32) -> Zpm {
        Zpm::new(p, m).unwrap()
    }

    fn check_snf(a: &ZMatrix) -> Snf {
        let s = smith_normal_form(a, Track::ALL);
        let (u, v) = (s.u.as_ref().unwrap(), s.v.as_ref().unwrap());
        assert_eq!(u.mul(a).mul(v), s.d());
        let ui = s.u_inv.as_ref().unwrap();
        let vi = s.v_inv.as_ref().unwrap();
        assert_eq!(u.mul(ui), ZMatrix::identity(a.ring(), a.rows()));
        assert_eq!(v.mul(vi), ZMatrix::identity(a.ring(), a.cols()));
        assert!(s.vals.windows(2).all(|w| w[0] <= w[1]));
        s
    }

    #[test]
    fn identity_over_z4() {
        let a = ZMatrix::identity(z(2, 2), 2);
        assert_eq!(check_snf(&a).d(), a);
    }

    #[test]
    fn reorders_diagonal() {
        let a = ZMatrix::from_rows(z(2, 2), &[vec![2, 0], vec![0, 1]]).unwrap();
        let d = check_snf(&a).d();
        assert_eq!(d, ZMatrix::from_rows(z(2, 2), &[vec![1, 0], vec![0, 2]]).unwrap());
    }

    #[test]
    fn rank_one_two_by_two() {
        // Hand elimination: subtract row 0 from row 1, then column 0 from column 1.
        let a = ZMatrix::from_rows(z(2, 2), &[vec![2, 2], vec![2, 2]]).unwrap();
        let s = check_snf(&a);
        assert_eq!(s.d(), ZMatrix::from_rows(z(2, 2), &[vec![2, 0], vec![0, 0]]).unwrap());
        assert_eq!(s.rank, 1);
    }

    #[test]
    fn kernel_of_multiplication_by_two() {
        let a = ZMatrix::from_rows(z(2, 2), &[vec![2]]).unwrap();
        let k = kernel(&a);
        assert_eq!(k.exps, vec![1]);
        assert_eq!(k.gens.get(0, 0), 2);
        assert_eq!(k.coords(&[2]), vec![1]);
    }

    #[test]
    fn solver_respects_divisibility() {
        let a = ZMatrix::from_rows(z(3, 2), &[vec![3, 0], vec![0, 1]]).unwrap();
        let s = Solver::new(&a);
        assert!(s.solve(&[1, 0]).is_none());
        let x = s.solve(&[6, 4]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![6, 4]);
    }
}

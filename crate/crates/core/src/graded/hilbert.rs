//! Hilbert series `N(t) / (1-t)^q` from leading-term monomial ideals.

use serde::Serialize;

use super::groebner::Free;
use super::poly::{Mono, Vector};

/// Laurent numerator `t^offset * sum c_i t^i` over `(1-t)^q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertSeries {
    pub q: usize,
    pub offset: i32,
    pub numerator: Vec<i64>,
}

impl HilbertSeries {
    pub fn zero(q: usize) -> Self {
        HilbertSeries { q, offset: 0, numerator: Vec::new() }
    }

    fn from_parts(q: usize, offset: i32, numerator: Vec<i64>) -> Self {
        let mut s = HilbertSeries { q, offset, numerator };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        while self.numerator.last() == Some(&0) {
            self.numerator.pop();
        }
        let lead = self.numerator.iter().take_while(|&&c| c == 0).count();
        if lead == self.numerator.len() {
            self.numerator.clear();
            self.offset = 0;
        } else if lead > 0 {
            self.numerator.drain(..lead);
            self.offset += lead as i32;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_empty()
    }

    pub fn shift(&self, d: i32) -> Self {
        HilbertSeries { offset: if self.is_zero() { 0 } else { self.offset + d }, ..self.clone() }
    }

    fn combine(&self, other: &Self, sign: i64) -> Self {
        assert_eq!(self.q, other.q, "series over different rings");
        if self.is_zero() {
            return HilbertSeries::from_parts(other.q, other.offset, other.numerator.iter().map(|c| sign * c).collect());
        }
        if other.is_zero() {
            return self.clone();
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.numerator.len() as i32).max(other.offset + other.numerator.len() as i32);
        let mut out = vec![0i64; (hi - lo) as usize];
        for (i, c) in self.numerator.iter().enumerate() {
            out[(self.offset - lo) as usize + i] += c;
        }
        for (i, c) in other.numerator.iter().enumerate() {
            out[(other.offset - lo) as usize + i] += sign * c;
        }
        HilbertSeries::from_parts(self.q, lo, out)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, 1)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, -1)
    }

    /// Multiply the numerator by `1 - t^d`.
    pub fn times_one_minus(&self, d: i32) -> Self {
        self.sub(&self.shift(d))
    }

    /// `(k, N / (1-t)^k)` with `k` the order of vanishing at `t = 1`.
    fn reduced(&self) -> (usize, Vec<i64>) {
        let mut n = self.numerator.clone();
        let mut k = 0;
        while !n.is_empty() && n.iter().sum::<i64>() == 0 && k < self.q {
            // synthetic division by (1 - t)
            let mut quo = Vec::with_capacity(n.len() - 1);
            let mut acc = 0;
            for c in &n[..n.len() - 1] {
                acc += c;
                quo.push(acc);
            }
            n = quo;
            k += 1;
        }
        (k, n)
    }

    /// Krull dimension; `-1` for the zero module.
    pub fn krull_dim(&self) -> i64 {
        if self.is_zero() {
            return -1;
        }
        (self.q - self.reduced().0) as i64
    }

    pub fn multiplicity(&self) -> i64 {
        self.reduced().1.iter().sum()
    }

    /// First degree from which the Hilbert function is polynomial.
    pub fn stabilization_point(&self) -> i64 {
        if self.is_zero() {
            return 0;
        }
        let (_, n) = self.reduced();
        let top = self.offset as i64 + n.len() as i64 - 1;
        top - self.krull_dim() + 1
    }

    pub fn value(&self, d: i64) -> u64 {
        let mut total: i128 = 0;
        for (i, c) in self.numerator.iter().enumerate() {
            let n = d - self.offset as i64 - i as i64;
            if n < 0 {
                continue;
            }
            total += *c as i128 * stars(n as u64, self.q as u64);
        }
        u64::try_from(total).expect("Hilbert function is nonnegative")
    }

    pub fn values(&self, upto: i64) -> Vec<u64> {
        (0..=upto).map(|d| self.value(d)).collect()
    }
}

/// Number of monomials of degree `n` in `q` variables.
fn stars(n: u64, q: u64) -> i128 {
    if q == 0 {
        return i128::from(n == 0);
    }
    binom(n + q - 1, q - 1)
}

fn binom(n: u64, k: u64) -> i128 {
    let k = k.min(n.saturating_sub(k));
    let mut r: i128 = 1;
    for i in 0..k {
        r = r * (n - i) as i128 / (i + 1) as i128;
    }
    r
}

fn minimalize(mut gens: Vec<Mono>) -> Vec<Mono> {
    gens.sort();
    gens.dedup();
    let mut out: Vec<Mono> = Vec::new();
    for g in gens {
        if !out.iter().any(|h| h.divides(&g)) {
            out.push(g);
        }
    }
    out
}

fn poly_sub_shifted(a: &mut Vec<i64>, b: &[i64], d: usize) {
    if a.len() < b.len() + d {
        a.resize(b.len() + d, 0);
    }
    for (i, c) in b.iter().enumerate() {
        a[i + d] -= c;
    }
}

/// Numerator of `HS(S / J)` for a monomial ideal `J`.
pub fn monomial_numerator(gens: &[Mono]) -> Vec<i64> {
    let mut g = minimalize(gens.to_vec());
    if g.is_empty() {
        return vec![1];
    }
    if g[0].is_one() {
        return Vec::new();
    }
    if g.iter().all(|m| m.support().len() == 1) {
        // pure powers in distinct variables form a regular sequence
        let mut out = vec![1i64];
        for m in &g {
            let prev = out.clone();
            poly_sub_shifted(&mut out, &prev, m.degree() as usize);
        }
        return out;
    }
    // pivot on a generator that is not a pure power
    let idx = g.iter().rposition(|m| m.support().len() > 1).expect("some mixed generator");
    let m = g.remove(idx);
    let colon: Vec<Mono> = g.iter().map(|x| x.colon(&m)).collect();
    let mut out = monomial_numerator(&g);
    let sub = monomial_numerator(&colon);
    poly_sub_shifted(&mut out, &sub, m.degree() as usize);
    out
}

/// `HS(S^r / L)` where `gb` is a Gröbner basis of `L`.
pub fn series_of_quotient(free: &Free, gb: &[Vector]) -> HilbertSeries {
    let mut total = HilbertSeries::zero(free.q);
    for pos in 0..free.rank() {
        let leads: Vec<Mono> = gb.iter().filter(|v| v.terms[0].0 == pos).map(|v| v.terms[0].1.clone()).collect();
        let n = HilbertSeries::from_parts(free.q, free.shifts[pos], monomial_numerator(&leads));
        total = total.add(&n);
    }
    total
}

/// `HS(S^r)` for a graded free module.
pub fn series_of_free(free: &Free) -> HilbertSeries {
    series_of_quotient(free, &[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(e: &[u16]) -> Mono {
        Mono(e.to_vec())
    }

    #[test]
    fn polynomial_ring_in_two_variables() {
        let s = HilbertSeries::from_parts(2, 0, monomial_numerator(&[]));
        assert_eq!(s.values(4), vec![1, 2, 3, 4, 5]);
        assert_eq!(s.krull_dim(), 2);
        assert_eq!(s.multiplicity(), 1);
    }

    #[test]
    fn quotient_by_x() {
        let s = HilbertSeries::from_parts(2, 0, monomial_numerator(&[m(&[1, 0])]));
        assert_eq!(s.values(3), vec![1, 1, 1, 1]);
        assert_eq!(s.krull_dim(), 1);
    }

    #[test]
    fn quotient_by_x2_xy() {
        let s = HilbertSeries::from_parts(2, 0, monomial_numerator(&[m(&[2, 0]), m(&[1, 1])]));
        assert_eq!(s.values(4), vec![1, 2, 1, 1, 1]);
        assert_eq!(s.krull_dim(), 1);
        assert_eq!(s.stabilization_point(), 2);
    }

    #[test]
    fn residue_field() {
        let s = HilbertSeries::from_parts(3, 0, monomial_numerator(&[m(&[1, 0, 0]), m(&[0, 1, 0]), m(&[0, 0, 1])]));
        assert_eq!(s.values(2), vec![1, 0, 0]);
        assert_eq!(s.krull_dim(), 0);
        assert_eq!(s.multiplicity(), 1);
    }

    #[test]
    fn shifted_sum() {
        let a = HilbertSeries::from_parts(1, 0, vec![1]);
        let b = a.shift(-1);
        assert_eq!(b.value(-1), 1);
        assert_eq!(a.add(&b).value(0), 2);
        assert!(a.sub(&a).is_zero());
    }
}

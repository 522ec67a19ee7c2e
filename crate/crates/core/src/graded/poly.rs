//! Monomials and module vectors over `F_p[x_1..x_q]`.
//!
//! Monomials use degrevlex; vectors use position-over-term with smaller
//! positions ranking higher.

use std::cmp::Ordering;

use crate::linalg::Zpm;
use crate::{Error, Result};

use super::PolyJson;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn one(q: usize) -> Mono {
        Mono(vec![0; q])
    }

    pub fn var(q: usize, i: usize) -> Mono {
        let mut e = vec![0; q];
        e[i] = 1;
        Mono(e)
    }

    pub fn degree(&self) -> i32 {
        self.0.iter().map(|&e| e as i32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self / other`; caller guarantees divisibility.
    pub fn div(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// `lcm(self, other) / other`, the generator of `(self) : other`.
    pub fn colon(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a.saturating_sub(*b)).collect())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for i in (0..self.0.len()).rev() {
                if self.0[i] != other.0[i] {
                    return other.0[i].cmp(&self.0[i]);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Position-over-term comparison of `(pos, mono)`.
pub fn cmp_terms(a: (usize, &Mono), b: (usize, &Mono)) -> Ordering {
    b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1))
}

/// Element of a free module `S^r`, terms sorted strictly descending.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Vector {
    pub terms: Vec<(usize, Mono, u64)>,
}

impl Vector {
    pub fn zero() -> Vector {
        Vector { terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term(pos: usize, mono: Mono, c: u64) -> Vector {
        if c == 0 {
            Vector::zero()
        } else {
            Vector { terms: vec![(pos, mono, c)] }
        }
    }

    pub fn unit(q: usize, pos: usize) -> Vector {
        Vector::term(pos, Mono::one(q), 1)
    }

    /// Build from unsorted terms, combining duplicates.
    pub fn from_terms(f: Zpm, mut raw: Vec<(usize, Mono, u64)>) -> Vector {
        raw.sort_by(|a, b| cmp_terms((b.0, &b.1), (a.0, &a.1)));
        let mut out: Vec<(usize, Mono, u64)> = Vec::with_capacity(raw.len());
        for (pos, m, c) in raw {
            match out.last_mut() {
                Some(last) if last.0 == pos && last.1 == m => last.2 = f.add(last.2, c),
                _ => out.push((pos, m, f.reduce_u(c))),
            }
        }
        out.retain(|t| t.2 != 0);
        Vector { terms: out }
    }

    pub fn lead(&self) -> Option<(usize, &Mono, u64)> {
        self.terms.first().map(|(p, m, c)| (*p, m, *c))
    }

    pub fn scale(&self, f: Zpm, c: u64) -> Vector {
        let c = f.reduce_u(c);
        if c == 0 {
            return Vector::zero();
        }
        Vector { terms: self.terms.iter().map(|(p, m, a)| (*p, m.clone(), f.mul(*a, c))).collect() }
    }

    pub fn mul_mono(&self, m: &Mono) -> Vector {
        Vector { terms: self.terms.iter().map(|(p, a, c)| (*p, a.mul(m), *c)).collect() }
    }

    /// `self - c * m * other`.
    pub fn sub_mul(&self, f: Zpm, c: u64, m: &Mono, other: &Vector) -> Vector {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().map(|(p, mo, x)| (*p, mo.mul(m), f.neg(f.mul(*x, c)))).peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (Some(x), Some(y)) => match cmp_terms((x.0, &x.1), (y.0, &y.1)) {
                    Ordering::Greater => out.push(a.next().unwrap().clone()),
                    Ordering::Less => out.push(b.next().unwrap()),
                    Ordering::Equal => {
                        let x = a.next().unwrap();
                        let y = b.next().unwrap();
                        let s = f.add(x.2, y.2);
                        if s != 0 {
                            out.push((x.0, x.1.clone(), s));
                        }
                    }
                },
            }
        }
        Vector { terms: out }
    }

    pub fn add(&self, f: Zpm, other: &Vector) -> Vector {
        self.sub_mul(f, f.neg(1), &Mono::one(self.q().max(other.q())), other)
    }

    pub fn sub(&self, f: Zpm, other: &Vector) -> Vector {
        self.sub_mul(f, 1, &Mono::one(self.q().max(other.q())), other)
    }

    fn q(&self) -> usize {
        self.terms.first().map(|t| t.1 .0.len()).unwrap_or(0)
    }

    /// Multiply by a polynomial given as a vector at position 0.
    pub fn mul_poly(&self, f: Zpm, poly: &Vector) -> Vector {
        let raw = poly
            .terms
            .iter()
            .flat_map(|(_, pm, pc)| self.terms.iter().map(move |(p, m, c)| (*p, m.mul(pm), f.mul(*c, *pc))))
            .collect();
        Vector::from_terms(f, raw)
    }

    pub fn make_monic(&self, f: Zpm) -> Vector {
        match self.lead() {
            Some((_, _, c)) if c != 1 => self.scale(f, f.inv(c).expect("nonzero in a field")),
            _ => self.clone(),
        }
    }

    /// Degree of the leading term under the given generator degrees.
    pub fn degree(&self, shifts: &[i32]) -> Option<i32> {
        self.lead().map(|(p, m, _)| m.degree() + shifts[p])
    }

    pub fn is_homogeneous(&self, shifts: &[i32]) -> bool {
        match self.degree(shifts) {
            None => true,
            Some(d) => self.terms.iter().all(|(p, m, _)| m.degree() + shifts[*p] == d),
        }
    }

    /// Move every position `i` to `map[i]`; `None` drops the term.
    pub fn reindex(&self, f: Zpm, map: impl Fn(usize) -> Option<usize>) -> Vector {
        let raw = self.terms.iter().filter_map(|(p, m, c)| map(*p).map(|np| (np, m.clone(), *c))).collect();
        Vector::from_terms(f, raw)
    }

    /// Coefficient of the constant monomial at `pos`.
    pub fn constant_at(&self, pos: usize) -> u64 {
        self.terms.iter().find(|(p, m, _)| *p == pos && m.is_one()).map(|t| t.2).unwrap_or(0)
    }

    /// The component at `pos` as a polynomial (position 0).
    pub fn component(&self, pos: usize) -> Vector {
        Vector { terms: self.terms.iter().filter(|t| t.0 == pos).map(|(_, m, c)| (0, m.clone(), *c)).collect() }
    }

    pub fn to_json(&self) -> Vec<(usize, PolyJson)> {
        let mut out: Vec<(usize, PolyJson)> = Vec::new();
        for (p, m, c) in &self.terms {
            let entry = (*c as i64, m.0.iter().map(|&e| e as u32).collect());
            match out.iter_mut().find(|(q, _)| q == p) {
                Some((_, poly)) => poly.push(entry),
                None => out.push((*p, vec![entry])),
            }
        }
        out
    }
}

pub fn poly_from_json(f: Zpm, q: usize, pos: usize, poly: &PolyJson) -> Result<Vector> {
    let mut raw = Vec::with_capacity(poly.len());
    for (c, exps) in poly {
        if exps.len() != q {
            return Err(Error::Dimension(format!("monomial has {} exponents, ring has {q} variables", exps.len())));
        }
        let e: Vec<u16> = exps
            .iter()
            .map(|&x| u16::try_from(x).map_err(|_| Error::Dimension(format!("exponent {x} too large"))))
            .collect::<Result<_>>()?;
        raw.push((pos, Mono(e), f.reduce(*c)));
    }
    Ok(Vector::from_terms(f, raw))
}

pub fn poly_to_json(v: &Vector) -> PolyJson {
    v.terms.iter().map(|(_, m, c)| (*c as i64, m.0.iter().map(|&e| e as u32).collect())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrevlex_basics() {
        // x^2 > xy > y^2 and xz < y^2 in degrevlex on x > y > z
        let m = |e: &[u16]| Mono(e.to_vec());
        assert!(m(&[2, 0, 0]) > m(&[1, 1, 0]));
        assert!(m(&[1, 1, 0]) > m(&[0, 2, 0]));
        assert!(m(&[0, 2, 0]) > m(&[1, 0, 1]));
        assert!(m(&[0, 0, 3]) > m(&[0, 0, 2]));
    }

    #[test]
    fn cancellation_in_sub_mul() {
        let f = Zpm::new(5, 1).unwrap();
        let x = Vector::term(0, Mono(vec![1, 0]), 1);
        let y = Vector::term(0, Mono(vec![0, 1]), 1);
        let s = x.add(f, &y);
        assert_eq!(s.sub(f, &x), y);
        assert!(s.sub(f, &s).is_zero());
    }

    #[test]
    fn position_over_term() {
        let a = Mono(vec![0]);
        let b = Mono(vec![5]);
        assert_eq!(cmp_terms((0, &a), (1, &b)), Ordering::Greater);
    }
}

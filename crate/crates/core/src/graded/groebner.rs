//! Homogeneous Buchberger for submodules of graded free modules.

use std::collections::{BTreeMap, VecDeque};

use crate::linalg::Zpm;
use crate::{Error, Result};

use super::poly::{Mono, Vector};

/// A graded free module `S^r` over `F_p[x_1..x_q]` with generator degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Free {
    pub field: Zpm,
    pub q: usize,
    pub shifts: Vec<i32>,
}

impl Free {
    pub fn new(field: Zpm, q: usize, shifts: Vec<i32>) -> Free {
        Free { field, q, shifts }
    }

    pub fn rank(&self) -> usize {
        self.shifts.len()
    }

    pub fn check_homogeneous(&self, v: &Vector) -> Result<()> {
        if v.terms.iter().any(|t| t.0 >= self.rank()) {
            return Err(Error::Dimension(format!("vector leaves a free module of rank {}", self.rank())));
        }
        if !v.is_homogeneous(&self.shifts) {
            return Err(Error::Inhomogeneous(format!("{:?}", v.to_json())));
        }
        Ok(())
    }
}

enum Item {
    Input(Vector),
    Pair(usize, usize),
}

/// Incremental, degree-by-degree Gröbner basis computation.
pub struct Builder<'a> {
    free: &'a Free,
    basis: Vec<Vector>,
    by_pos: Vec<Vec<usize>>,
    queue: BTreeMap<i32, VecDeque<Item>>,
}

impl<'a> Builder<'a> {
    pub fn new(free: &'a Free) -> Builder<'a> {
        Builder { free, basis: Vec::new(), by_pos: vec![Vec::new(); free.rank()], queue: BTreeMap::new() }
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn push_input(&mut self, v: Vector) {
        if let Some(d) = v.degree(&self.free.shifts) {
            self.queue.entry(d).or_default().push_back(Item::Input(v));
        }
    }

    fn reducer(&self, pos: usize, m: &Mono) -> Option<usize> {
        self.by_pos[pos].iter().copied().find(|&i| self.basis[i].terms[0].1.divides(m))
    }

    /// Full normal form against the current basis.
    pub fn reduce(&self, v: &Vector) -> Vector {
        let f = self.free.field;
        let mut rest = v.clone();
        let mut done: Vec<(usize, Mono, u64)> = Vec::new();
        while let Some((pos, m, c)) = rest.lead() {
            match self.reducer(pos, m) {
                Some(i) => {
                    let g = &self.basis[i];
                    let quo = m.div(&g.terms[0].1);
                    rest = rest.sub_mul(f, c, &quo, g);
                }
                None => {
                    let t = rest.terms.remove(0);
                    done.push(t);
                }
            }
        }
        Vector { terms: done }
    }

    fn insert(&mut self, v: Vector) {
        let v = v.make_monic(self.free.field);
        let (pos, lead, _) = v.lead().expect("nonzero");
        let lead = lead.clone();
        let idx = self.basis.len();
        for &j in &self.by_pos[pos] {
            let l = lead.lcm(&self.basis[j].terms[0].1);
            let d = l.degree() + self.free.shifts[pos];
            self.queue.entry(d).or_default().push_back(Item::Pair(j, idx));
        }
        self.by_pos[pos].push(idx);
        self.basis.push(v);
    }

    fn spoly(&self, i: usize, j: usize) -> Vector {
        let f = self.free.field;
        let (a, b) = (&self.basis[i], &self.basis[j]);
        let l = a.terms[0].1.lcm(&b.terms[0].1);
        a.mul_mono(&l.div(&a.terms[0].1)).sub_mul(f, 1, &l.div(&b.terms[0].1), b)
    }

    /// Process every queued item of degree at most `d`.
    pub fn complete_to(&mut self, d: i32) {
        while let Some(mut entry) = self.queue.first_entry() {
            if *entry.key() > d {
                break;
            }
            let item = entry.get_mut().pop_front();
            if entry.get().is_empty() {
                entry.remove();
            }
            let v = match item {
                Some(Item::Input(v)) => v,
                Some(Item::Pair(i, j)) => self.spoly(i, j),
                None => continue,
            };
            let r = self.reduce(&v);
            if !r.is_zero() {
                self.insert(r);
            }
        }
    }

    /// Reduce `v` after completing the basis through its degree, then keep it.
    pub fn add_reduced(&mut self, v: &Vector) -> Vector {
        if let Some(d) = v.degree(&self.free.shifts) {
            self.complete_to(d);
        }
        let r = self.reduce(v);
        if !r.is_zero() {
            self.insert(r.clone());
        }
        r
    }

    pub fn finish(mut self) -> Vec<Vector> {
        self.complete_to(i32::MAX);
        interreduce(self.free, self.basis)
    }
}

/// Reduced Gröbner basis, sorted by descending leading term.
fn interreduce(free: &Free, basis: Vec<Vector>) -> Vec<Vector> {
    let mut keep: Vec<Vector> = Vec::new();
    let mut sorted = basis;
    sorted.sort_by(|a, b| {
        let (pa, ma, _) = a.lead().unwrap();
        let (pb, mb, _) = b.lead().unwrap();
        super::poly::cmp_terms((pa, ma), (pb, mb))
    });
    for v in sorted {
        let (pos, m, _) = v.lead().unwrap();
        if keep.iter().any(|g| g.terms[0].0 == pos && g.terms[0].1.divides(m)) {
            continue;
        }
        keep.retain(|g| !(g.terms[0].0 == pos && m.divides(&g.terms[0].1)));
        keep.push(v);
    }
    let mut out = Vec::with_capacity(keep.len());
    for (i, v) in keep.iter().enumerate() {
        let mut others = Builder::new(free);
        for (j, g) in keep.iter().enumerate() {
            if i != j {
                let pos = g.terms[0].0;
                others.by_pos[pos].push(others.basis.len());
                others.basis.push(g.clone());
            }
        }
        let head = Vector { terms: vec![v.terms[0].clone()] };
        let tail = Vector { terms: v.terms[1..].to_vec() };
        let t = others.reduce(&tail);
        let mut terms = head.terms;
        terms.extend(t.terms);
        out.push(Vector { terms });
    }
    out.sort_by(|a, b| {
        let (pa, ma, _) = a.lead().unwrap();
        let (pb, mb, _) = b.lead().unwrap();
        super::poly::cmp_terms((pb, mb), (pa, ma))
    });
    out
}

/// Reduced Gröbner basis of the submodule generated by `gens`.
pub fn groebner(free: &Free, gens: &[Vector]) -> Result<Vec<Vector>> {
    let mut b = Builder::new(free);
    for g in gens {
        free.check_homogeneous(g)?;
        b.push_input(g.clone());
    }
    Ok(b.finish())
}

/// Normal form with respect to a Gröbner basis.
pub fn normal_form(free: &Free, gb: &[Vector], v: &Vector) -> Vector {
    let mut b = Builder::new(free);
    for g in gb {
        let pos = g.terms[0].0;
        b.by_pos[pos].push(b.basis.len());
        b.basis.push(g.clone());
    }
    b.reduce(v)
}

/// Syzygies of `gens` as a Gröbner basis inside `S^s`, graded by the
/// generator degrees (zero generators get degree 0).
pub fn syzygies(free: &Free, gens: &[Vector]) -> Result<(Free, Vec<Vector>)> {
    let r = free.rank();
    let degs: Vec<i32> = gens.iter().map(|g| g.degree(&free.shifts).unwrap_or(0)).collect();
    let mut shifts = free.shifts.clone();
    shifts.extend(&degs);
    let big = Free::new(free.field, free.q, shifts);
    let mut lifted = Vec::with_capacity(gens.len());
    for (k, g) in gens.iter().enumerate() {
        free.check_homogeneous(g)?;
        let mut terms = g.terms.clone();
        terms.push((r + k, Mono::one(free.q), 1));
        lifted.push(Vector { terms });
    }
    let gb = groebner(&big, &lifted)?;
    let target = Free::new(free.field, free.q, degs);
    let syz = gb
        .into_iter()
        .filter(|v| v.terms[0].0 >= r)
        .map(|v| v.reindex(free.field, |p| p.checked_sub(r)))
        .collect();
    Ok((target, syz))
}

/// A minimal homogeneous generating set drawn from `gens`, chosen greedily by
/// ascending degree (stable within a degree).
pub fn minimal_generators(free: &Free, gens: &[Vector]) -> Result<Vec<Vector>> {
    let mut order: Vec<(i32, usize)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        free.check_homogeneous(g)?;
        if let Some(d) = g.degree(&free.shifts) {
            order.push((d, i));
        }
    }
    order.sort();
    let mut b = Builder::new(free);
    let mut chosen = Vec::new();
    for (_, i) in order {
        if !b.add_reduced(&gens[i]).is_zero() {
            chosen.push(gens[i].clone());
        }
    }
    Ok(chosen)
}

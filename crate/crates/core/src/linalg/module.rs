//! Finite abelian p-groups `⊕ Z/p^{e_i}` carrying named endomorphisms.
//!
//! Elements are coordinate vectors in the invariant-factor basis; entry `i`
//! lives in `Z/p^{e_i}` but is stored as a representative mod `p^m`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::snf::{kernel, smith_normal_form, KernelBasis, Solver, Track};
use super::{ZMatrix, Zpm};
use crate::{Error, Result};

/// Invariant-factor decomposition of a cokernel `Z^k / im(rel)`.
#[derive(Clone, Debug)]
pub struct Structure {
    /// Descending exponents, all positive.
    pub exps: Vec<u32>,
    /// `s x k`: ambient coordinates to invariant-factor coordinates.
    pub to_basis: ZMatrix,
    /// `k x s`: representatives of the invariant-factor generators.
    pub from_basis: ZMatrix,
}

pub fn cokernel_structure(rel: &ZMatrix) -> Structure {
    let ring = rel.ring();
    let k = rel.rows();
    let snf = smith_normal_form(rel, Track::U);
    let u = snf.u.expect("tracked");
    let u_inv = snf.u_inv.expect("tracked");
    let mut keep: Vec<(u32, usize)> = (0..k)
        .map(|t| (snf.vals.get(t).copied().unwrap_or(ring.m()), t))
        .filter(|&(e, _)| e > 0)
        .collect();
    // descending exponent; vals are non-decreasing in t, so ties keep the later index first
    keep.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)));
    let idx: Vec<usize> = keep.iter().map(|&(_, t)| t).collect();
    let exps: Vec<u32> = keep.iter().map(|&(e, _)| e).collect();
    let mut to_basis = u.select_rows(&idx);
    for (r, &e) in exps.iter().enumerate() {
        for x in to_basis.row_mut(r) {
            *x = ring.mod_pow(*x, e);
        }
    }
    let from_basis = u_inv.select_cols(&idx);
    Structure { exps, to_basis, from_basis }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoVerdict {
    Isomorphic,
    EquivalentInvariants,
    Distinct,
}

/// Largest order (as `log2`) for which isomorphisms are searched explicitly.
const ISO_SEARCH_LOG2: f64 = 12.0;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteModule {
    pub ring: Zpm,
    pub exps: Vec<u32>,
    pub actions: BTreeMap<String, ZMatrix>,
}

impl FiniteModule {
    pub fn new(ring: Zpm, mut exps: Vec<u32>) -> Result<Self> {
        if exps.iter().any(|&e| e == 0 || e > ring.m()) {
            return Err(Error::Dimension(format!("invariant factor exponents {exps:?} outside 1..={}", ring.m())));
        }
        exps.sort_unstable_by(|a, b| b.cmp(a));
        Ok(FiniteModule { ring, exps, actions: BTreeMap::new() })
    }

    pub fn zero(ring: Zpm) -> Self {
        FiniteModule { ring, exps: Vec::new(), actions: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_zero(&self) -> bool {
        self.exps.is_empty()
    }

    /// `log_p |M|`.
    pub fn log_order(&self) -> u64 {
        self.exps.iter().map(|&e| e as u64).sum()
    }

    /// `|M|` when it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        let p = self.ring.p() as u128;
        let mut acc: u128 = 1;
        for _ in 0..self.log_order() {
            acc = acc.checked_mul(p)?;
        }
        Some(acc)
    }

    /// Composition length, which equals `log_p |M|`.
    pub fn length(&self) -> u64 {
        self.log_order()
    }

    /// Diagonal relation matrix `diag(p^{e_i})`.
    pub fn relations(&self) -> ZMatrix {
        let n = self.len();
        let mut r = ZMatrix::zeros(self.ring, n, n);
        for (i, &e) in self.exps.iter().enumerate() {
            r.set(i, i, self.ring.pow_p(e));
        }
        r
    }

    pub fn reduce_vec(&self, v: &[u64]) -> Vec<u64> {
        v.iter().zip(&self.exps).map(|(&x, &e)| self.ring.mod_pow(x, e)).collect()
    }

    /// Reduce each row `i` modulo `p^{e_i}`.
    pub fn reduce_rows(&self, a: &ZMatrix) -> ZMatrix {
        let mut a = a.clone();
        for (i, &e) in self.exps.iter().enumerate() {
            for x in a.row_mut(i) {
                *x = self.ring.mod_pow(*x, e);
            }
        }
        a
    }

    /// Whether `a` (square, in this module's basis) defines an endomorphism.
    pub fn is_well_defined(&self, a: &ZMatrix) -> bool {
        let n = self.len();
        if a.rows() != n || a.cols() != n {
            return false;
        }
        self.is_hom_to(a, self)
    }

    /// Whether `a` defines a homomorphism `self -> target`.
    pub fn is_hom_to(&self, a: &ZMatrix, target: &FiniteModule) -> bool {
        if a.rows() != target.len() || a.cols() != self.len() {
            return false;
        }
        for (i, &ei) in target.exps.iter().enumerate() {
            for (j, &ej) in self.exps.iter().enumerate() {
                let need = ei.saturating_sub(ej);
                let x = self.ring.mod_pow(a.get(i, j), ei);
                if x != 0 && self.ring.val(x) < need {
                    return false;
                }
            }
        }
        true
    }

    pub fn with_action(mut self, name: &str, a: ZMatrix) -> Result<Self> {
        self.add_action(name, a)?;
        Ok(self)
    }

    pub fn add_action(&mut self, name: &str, a: ZMatrix) -> Result<()> {
        if !self.is_well_defined(&a) {
            return Err(Error::Invariant {
                name: name.to_string(),
                msg: "action matrix does not respect the invariant factors".into(),
            });
        }
        let a = self.reduce_rows(&a);
        self.actions.insert(name.to_string(), a);
        Ok(())
    }

    pub fn action(&self, name: &str) -> Option<&ZMatrix> {
        self.actions.get(name)
    }

    /// Equality of two endomorphisms of this module.
    pub fn endo_eq(&self, a: &ZMatrix, b: &ZMatrix) -> bool {
        self.reduce_rows(a) == self.reduce_rows(b)
    }

    pub fn commutes(&self, a: &ZMatrix, b: &ZMatrix) -> bool {
        self.endo_eq(&a.mul(b), &b.mul(a))
    }

    pub fn actions_commute(&self) -> bool {
        let acts: Vec<&ZMatrix> = self.actions.values().collect();
        acts.iter().enumerate().all(|(i, a)| acts[i + 1..].iter().all(|b| self.commutes(a, b)))
    }

    /// Submodule generated by the columns of `gens`, with induced actions.
    pub fn submodule(&self, gens: &ZMatrix) -> Sub {
        let ring = self.ring;
        let g = gens.cols();
        let gens = self.reduce_rows(gens);
        let a = gens.hstack(&self.relations());
        let k = kernel(&a);
        let top: Vec<usize> = (0..g).collect();
        let rel = k.gens.select_rows(&top);
        let st = cokernel_structure(&rel);
        let incl = self.reduce_rows(&gens.mul(&st.from_basis));
        let mut module = FiniteModule { ring, exps: st.exps.clone(), actions: BTreeMap::new() };
        if !self.actions.is_empty() && !module.is_zero() {
            let solver = Solver::new(&a);
            for (name, act) in &self.actions {
                let img = act.mul(&incl);
                let mut m = ZMatrix::zeros(ring, module.len(), module.len());
                for c in 0..module.len() {
                    let y = solver
                        .solve(&img.column(c))
                        .expect("action preserves the submodule");
                    let coords = st.to_basis.mul_vec(&y[..g]);
                    for (r, v) in module.reduce_vec(&coords).into_iter().enumerate() {
                        m.set(r, c, v);
                    }
                }
                module.actions.insert(name.clone(), m);
            }
        }
        Sub { module, incl }
    }

    /// `log_p` of the size of the submodule generated by the columns of `gens`.
    pub fn span_log_order(&self, gens: &ZMatrix) -> u64 {
        let a = self.relations().hstack(&self.reduce_rows(gens));
        let rest: u64 = smith_normal_form(&a, Track::NONE).cokernel_exps().iter().map(|&e| e as u64).sum();
        self.log_order() - rest
    }

    /// Quotient by the submodule generated by the columns of `gens`.
    pub fn quotient(&self, gens: &ZMatrix) -> Quot {
        let rel = self.relations().hstack(&self.reduce_rows(gens));
        let st = cokernel_structure(&rel);
        let mut module = FiniteModule { ring: self.ring, exps: st.exps.clone(), actions: BTreeMap::new() };
        for (name, act) in &self.actions {
            let m = st.to_basis.mul(act).mul(&st.from_basis);
            module.actions.insert(name.clone(), module.reduce_rows(&m));
        }
        Quot { module, proj: st.to_basis, lift: st.from_basis }
    }

    /// `M / pM`-dimension, i.e. the minimal number of generators.
    pub fn rank_mod_p(&self) -> usize {
        self.len()
    }

    /// Invariant battery: cokernel exponents of `g - 1` for group-like
    /// actions, of `g` for the others, and of multiplication by `p`.
    pub fn battery(&self) -> Vec<(String, Vec<u32>)> {
        let n = self.len();
        let id = ZMatrix::identity(self.ring, n);
        let mut out: Vec<(String, Vec<u32>)> = self
            .actions
            .iter()
            .map(|(name, a)| {
                let e = if name.starts_with("gamma") { a.sub(&id) } else { a.clone() };
                (name.clone(), self.quotient(&e).module.exps)
            })
            .collect();
        out.push(("varpi".into(), self.quotient(&id.scale(self.ring.p())).module.exps));
        out
    }

    /// Three-tier comparison as modules with the same named actions.
    pub fn compare(&self, other: &FiniteModule) -> IsoVerdict {
        if self.ring != other.ring || self.exps != other.exps {
            return IsoVerdict::Distinct;
        }
        if self.actions.keys().ne(other.actions.keys()) {
            return IsoVerdict::Distinct;
        }
        if self.is_zero() {
            return IsoVerdict::Isomorphic;
        }
        let log2 = self.log_order() as f64 * (self.ring.p() as f64).log2();
        if log2 <= ISO_SEARCH_LOG2 {
            match self.find_isomorphism(other) {
                Search::Found(_) => return IsoVerdict::Isomorphic,
                Search::Exhausted => return IsoVerdict::Distinct,
                Search::Sampled => {}
            }
        }
        if self.battery() == other.battery() {
            IsoVerdict::EquivalentInvariants
        } else {
            IsoVerdict::Distinct
        }
    }

    /// Equivariant homomorphisms `self -> other` as the kernel of a linear
    /// system in the scaled unknowns `X_ij = p^{s_ij} y_ij`.
    fn hom_space(&self, other: &FiniteModule) -> (KernelBasis, Vec<u32>) {
        let ring = self.ring;
        let m = ring.m();
        let (n1, n2) = (self.len(), other.len());
        let shift: Vec<u32> = (0..n2)
            .flat_map(|i| (0..n1).map(move |j| (i, j)))
            .map(|(i, j)| other.exps[i].saturating_sub(self.exps[j]))
            .collect();
        let var = |i: usize, j: usize| i * n1 + j;
        let names: Vec<&String> = self.actions.keys().collect();
        let mut sys = ZMatrix::zeros(ring, names.len() * n2 * n1, n2 * n1);
        for (gi, name) in names.iter().enumerate() {
            let a1 = &self.actions[*name];
            let a2 = &other.actions[*name];
            for i in 0..n2 {
                let lift = ring.pow_p(m - other.exps[i]);
                for j in 0..n1 {
                    let row = (gi * n2 + i) * n1 + j;
                    // (A2 X)_ij
                    for k in 0..n2 {
                        let c = ring.mul(a2.get(i, k), ring.pow_p(shift[var(k, j)]));
                        let cur = sys.get(row, var(k, j));
                        sys.set(row, var(k, j), ring.add(cur, ring.mul(c, lift)));
                    }
                    // -(X A1)_ij
                    for k in 0..n1 {
                        let c = ring.mul(a1.get(k, j), ring.pow_p(shift[var(i, k)]));
                        let cur = sys.get(row, var(i, k));
                        sys.set(row, var(i, k), ring.sub(cur, ring.mul(c, lift)));
                    }
                }
            }
        }
        (kernel(&sys), shift)
    }

    fn find_isomorphism(&self, other: &FiniteModule) -> Search {
        let ring = self.ring;
        let (n1, n2) = (self.len(), other.len());
        let (ker, shift) = self.hom_space(other);
        let build = |coef: &[u64]| -> ZMatrix {
            let mut y = vec![0u64; n1 * n2];
            for (k, &c) in coef.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (v, yv) in y.iter_mut().enumerate() {
                    *yv = ring.add(*yv, ring.mul(c, ker.gens.get(v, k)));
                }
            }
            let data = y.iter().zip(&shift).map(|(&yv, &s)| ring.mul(yv, ring.pow_p(s))).collect();
            other.reduce_rows(&ZMatrix::from_data(ring, n2, n1, data))
        };
        let is_iso = |x: &ZMatrix| x.rank_mod_p() == n2;
        let log2: f64 = ker.exps.iter().map(|&e| e as f64).sum::<f64>() * (ring.p() as f64).log2();
        if log2 <= 14.0 {
            let mut coef = vec![0u64; ker.len()];
            loop {
                let x = build(&coef);
                if is_iso(&x) {
                    return Search::Found(x);
                }
                // odometer over prod Z/p^{exps}
                let mut k = 0;
                loop {
                    if k == coef.len() {
                        return Search::Exhausted;
                    }
                    coef[k] += 1;
                    if coef[k] < ring.pow_p_int(ker.exps[k]) {
                        break;
                    }
                    coef[k] = 0;
                    k += 1;
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..1024 {
            let coef: Vec<u64> = ker.exps.iter().map(|&e| rng.gen_range(0..ring.pow_p_int(e))).collect();
            let x = build(&coef);
            if is_iso(&x) {
                return Search::Found(x);
            }
        }
        Search::Sampled
    }

    /// An explicit equivariant isomorphism `self -> other`, if one is found.
    pub fn isomorphism_to(&self, other: &FiniteModule) -> Option<ZMatrix> {
        if self.exps != other.exps || self.actions.keys().ne(other.actions.keys()) {
            return None;
        }
        match self.find_isomorphism(other) {
            Search::Found(x) => Some(x),
            _ => None,
        }
    }
}

enum Search {
    Found(ZMatrix),
    Exhausted,
    Sampled,
}

/// A submodule with its inclusion (columns are the new generators).
#[derive(Clone, Debug)]
pub struct Sub {
    pub module: FiniteModule,
    pub incl: ZMatrix,
}

/// A quotient with projection and a set-theoretic lift of its generators.
#[derive(Clone, Debug)]
pub struct Quot {
    pub module: FiniteModule,
    pub proj: ZMatrix,
    pub lift: ZMatrix,
}

/// `ker B / im A` inside a free `Z/p^m`-module.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub module: FiniteModule,
    /// Cycle representatives of the generators, one per column.
    pub reps: ZMatrix,
    kernel: KernelBasis,
    to_basis: ZMatrix,
}

impl Subquotient {
    /// `b: ambient -> next`, `a: prev -> ambient` with `b a = 0`.
    pub fn new(b: &ZMatrix, a: &ZMatrix) -> Self {
        let ring = b.ring();
        let k = kernel(b);
        let kk = k.len();
        let mut rel = k.coords_matrix(a);
        let mut diag = ZMatrix::zeros(ring, kk, kk);
        for (i, &e) in k.exps.iter().enumerate() {
            diag.set(i, i, ring.pow_p(e));
        }
        rel = rel.hstack(&diag);
        let st = cokernel_structure(&rel);
        let reps = k.gens.mul(&st.from_basis);
        let module = FiniteModule { ring, exps: st.exps, actions: BTreeMap::new() };
        Subquotient { module, reps, kernel: k, to_basis: st.to_basis }
    }

    /// Class of a cycle.
    pub fn coords(&self, x: &[u64]) -> Vec<u64> {
        let y = self.kernel.coords(x);
        self.module.reduce_vec(&self.to_basis.mul_vec(&y))
    }

    /// Classes of the columns of `x` (all cycles).
    pub fn coords_matrix(&self, x: &ZMatrix) -> ZMatrix {
        let y = self.kernel.coords_matrix(x);
        self.module.reduce_rows(&self.to_basis.mul(&y))
    }

    /// Matrix of the endomorphism induced by an ambient map preserving cycles
    /// and boundaries.
    pub fn induced(&self, g: &ZMatrix) -> ZMatrix {
        self.coords_matrix(&g.mul(&self.reps))
    }

    pub fn add_action(&mut self, name: &str, g: &ZMatrix) {
        let m = self.induced(g);
        self.module.actions.insert(name.to_string(), m);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u64, m: u32) -> Zpm {
        Zpm::new(p, m).unwrap()
    }

    #[test]
    fn multiplication_by_two_on_z4() {
        let r = z(2, 2);
        let a = ZMatrix::from_rows(r, &[vec![2]]).unwrap();
        let h_ker = Subquotient::new(&a, &ZMatrix::zeros(r, 1, 0));
        assert_eq!(h_ker.module.exps, vec![1]);
        let coker = cokernel_structure(&a);
        assert_eq!(coker.exps, vec![1]);
        let free = FiniteModule::new(r, vec![2]).unwrap();
        assert_eq!(free.span_log_order(&a), 1);
    }

    #[test]
    fn zero_map_over_fp() {
        let r = z(5, 1);
        let a = ZMatrix::zeros(r, 2, 2);
        assert_eq!(Subquotient::new(&a, &ZMatrix::zeros(r, 2, 0)).module.exps, vec![1, 1]);
        assert_eq!(cokernel_structure(&a).exps, vec![1, 1]);
    }

    #[test]
    fn quotient_and_submodule_sizes_multiply() {
        let r = z(3, 2);
        let m = FiniteModule::new(r, vec![2, 1]).unwrap();
        let g = ZMatrix::from_rows(r, &[vec![3], vec![1]]).unwrap();
        let s = m.submodule(&g);
        let q = m.quotient(&g);
        assert_eq!(s.module.log_order() + q.module.log_order(), m.log_order());
    }

    #[test]
    fn well_definedness_respects_annihilators() {
        let r = z(2, 2);
        let m = FiniteModule::new(r, vec![2, 1]).unwrap();
        // sending the Z/2 generator to 1 in Z/4 is not well defined; to 2 it is
        let bad = ZMatrix::from_rows(r, &[vec![0, 1], vec![0, 0]]).unwrap();
        let good = ZMatrix::from_rows(r, &[vec![0, 2], vec![0, 0]]).unwrap();
        assert!(!m.is_well_defined(&bad));
        assert!(m.is_well_defined(&good));
    }

    #[test]
    fn iso_search_distinguishes_actions() {
        let r = z(3, 1);
        let id = ZMatrix::identity(r, 2);
        let jordan = ZMatrix::from_rows(r, &[vec![1, 1], vec![0, 1]]).unwrap();
        let a = FiniteModule::new(r, vec![1, 1]).unwrap().with_action("gamma1", id.clone()).unwrap();
        let b = FiniteModule::new(r, vec![1, 1]).unwrap().with_action("gamma1", jordan).unwrap();
        assert_eq!(a.compare(&b), IsoVerdict::Distinct);
        assert_eq!(a.compare(&a.clone()), IsoVerdict::Isomorphic);
        let swap = ZMatrix::from_rows(r, &[vec![2, 0], vec![0, 1]]).unwrap();
        let c = FiniteModule::new(r, vec![1, 1]).unwrap().with_action("gamma1", swap.clone()).unwrap();
        let d_act = ZMatrix::from_rows(r, &[vec![1, 0], vec![0, 2]]).unwrap();
        let d = FiniteModule::new(r, vec![1, 1]).unwrap().with_action("gamma1", d_act).unwrap();
        assert_eq!(c.compare(&d), IsoVerdict::Isomorphic);
        let x = c.isomorphism_to(&d).unwrap();
        assert_eq!(x.mul(&swap), d.action("gamma1").unwrap().mul(&x));
    }
}

//! Finite local rings `Z/p^m[(Z/p^N)^q][z_1..z_j]/(z_i^t)` and graded
//! polynomial quotients.
//!
//! Every finite kind uses the same monomial basis: group exponents
//! `a_1..a_q` in `[0, p^N)` followed by `z`-exponents `b_1..b_j` in `[0, t)`,
//! mixed radix with the first group exponent least significant.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::graded::PolyJson;
use crate::linalg::{is_prime, Solver, ZMatrix, Zpm};
use crate::{Error, Result};

pub mod map;
pub mod matrix;

pub use map::{MapKind, RingMap};
pub use matrix::RMatrix;

/// Default cap on the basis size of a finite ring.
pub const DEFAULT_MAX_BASIS: u64 = 1 << 16;

/// Products up to this basis size go through a precomputed table.
const TABLE_LIMIT: usize = 512;

pub fn max_basis() -> u64 {
    std::env::var("PATCHLAB_MAX_BASIS")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_BASIS)
}

fn one() -> u32 {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RingSpec {
    Chain {
        p: u64,
        m: u32,
    },
    PrimeField {
        p: u64,
    },
    GroupAlgebra {
        p: u64,
        #[serde(default = "one")]
        m: u32,
        q: u32,
        #[serde(rename = "N")]
        n: u32,
    },
    TruncExt {
        p: u64,
        #[serde(default = "one")]
        m: u32,
        q: u32,
        #[serde(rename = "N")]
        n: u32,
        j: u32,
        t: u32,
    },
    GradedPolyQuotient {
        p: u64,
        q: u32,
        #[serde(default)]
        relations: Vec<PolyJson>,
    },
}

impl RingSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RingSpec::Chain { .. } => "chain",
            RingSpec::PrimeField { .. } => "prime-field",
            RingSpec::GroupAlgebra { .. } => "group-algebra",
            RingSpec::TruncExt { .. } => "trunc-ext",
            RingSpec::GradedPolyQuotient { .. } => "graded-poly-quotient",
        }
    }

    pub fn params(&self) -> Result<Params> {
        let params = match *self {
            RingSpec::Chain { p, m } => Params { p, m, q: 0, n: 0, j: 0, t: 1 },
            RingSpec::PrimeField { p } => Params { p, m: 1, q: 0, n: 0, j: 0, t: 1 },
            RingSpec::GroupAlgebra { p, m, q, n } => Params { p, m, q, n, j: 0, t: 1 },
            RingSpec::TruncExt { p, m, q, n, j, t } => Params { p, m, q, n, j, t },
            RingSpec::GradedPolyQuotient { .. } => {
                return Err(Error::UnsupportedKind { op: "finite ring", kind: self.kind_name().into() })
            }
        };
        Ok(params)
    }
}

/// Parameters of a finite local ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Params {
    pub p: u64,
    pub m: u32,
    pub q: u32,
    #[serde(rename = "N")]
    pub n: u32,
    pub j: u32,
    pub t: u32,
}

impl Params {
    pub fn chain(p: u64, m: u32) -> Self {
        Params { p, m, q: 0, n: 0, j: 0, t: 1 }
    }

    pub fn group_algebra(p: u64, m: u32, q: u32, n: u32) -> Self {
        Params { p, m, q, n, j: 0, t: 1 }
    }

    pub fn trunc_ext(p: u64, m: u32, q: u32, n: u32, j: u32, t: u32) -> Self {
        Params { p, m, q, n, j, t }
    }

    /// Canonical spec; group algebras with `q = 0` are chain rings.
    pub fn spec(&self) -> RingSpec {
        let Params { p, m, q, n, j, t } = *self;
        if j > 0 {
            RingSpec::TruncExt { p, m, q, n, j, t }
        } else if q > 0 {
            RingSpec::GroupAlgebra { p, m, q, n }
        } else {
            RingSpec::Chain { p, m }
        }
    }

    fn basis_size(&self) -> u128 {
        let g = (self.p as u128).saturating_pow(self.n);
        let mut size: u128 = 1;
        for _ in 0..self.q {
            size = size.saturating_mul(g);
        }
        for _ in 0..self.j {
            size = size.saturating_mul(self.t as u128);
        }
        size
    }
}

#[derive(Debug)]
struct RingData {
    params: Params,
    coeff: Zpm,
    size: usize,
    /// `p^N`, the order of each group generator.
    radix: usize,
    /// Digits of every basis element: `q` group digits then `j` z-digits.
    digits: Vec<u32>,
    table: Option<Vec<u32>>,
}

/// Handle to a finite local ring. Cheap to clone; equality is by parameters.
#[derive(Clone)]
pub struct Ring(Arc<RingData>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        self.0.params == other.0.params
    }
}

impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({:?})", self.0.params)
    }
}

const ZERO_IDX: u32 = u32::MAX;

impl Ring {
    pub fn new(spec: &RingSpec) -> Result<Ring> {
        Ring::from_params(spec.params()?)
    }

    pub fn from_params(params: Params) -> Result<Ring> {
        let coeff = Zpm::new(params.p, params.m)?;
        if params.t == 0 {
            return Err(Error::InvalidRing("nilpotency bound t must be at least 1".into()));
        }
        let size = params.basis_size();
        let cap = max_basis();
        if size > cap as u128 {
            return Err(Error::BasisTooLarge { size, cap });
        }
        let size = size as usize;
        let radix = (params.p as usize).pow(params.n);
        let nd = (params.q + params.j) as usize;
        let mut digits = vec![0u32; size * nd];
        for idx in 0..size {
            let mut rest = idx;
            for d in 0..nd {
                let r = if d < params.q as usize { radix } else { params.t as usize };
                digits[idx * nd + d] = (rest % r) as u32;
                rest /= r;
            }
        }
        let mut data = RingData { params, coeff, size, radix, digits, table: None };
        if size <= TABLE_LIMIT {
            let mut table = vec![ZERO_IDX; size * size];
            for a in 0..size {
                for b in 0..size {
                    table[a * size + b] = data.mul_index_slow(a, b).map_or(ZERO_IDX, |i| i as u32);
                }
            }
            data.table = Some(table);
        }
        Ok(Ring(Arc::new(data)))
    }

    pub fn chain(p: u64, m: u32) -> Result<Ring> {
        Ring::from_params(Params::chain(p, m))
    }

    pub fn group_algebra(p: u64, m: u32, q: u32, n: u32) -> Result<Ring> {
        Ring::from_params(Params::group_algebra(p, m, q, n))
    }

    pub fn params(&self) -> Params {
        self.0.params
    }

    pub fn spec(&self) -> RingSpec {
        self.0.params.spec()
    }

    pub fn coeff(&self) -> Zpm {
        self.0.coeff
    }

    pub fn p(&self) -> u64 {
        self.0.params.p
    }

    /// Size of the monomial basis.
    pub fn basis_size(&self) -> usize {
        self.0.size
    }

    /// `log_p |R|`.
    pub fn log_order(&self) -> u64 {
        self.0.size as u64 * self.0.params.m as u64
    }

    pub fn digits(&self, idx: usize) -> &[u32] {
        let nd = (self.0.params.q + self.0.params.j) as usize;
        &self.0.digits[idx * nd..(idx + 1) * nd]
    }

    pub fn index_of(&self, group: &[u32], zs: &[u32]) -> Option<usize> {
        let Params { q, j, t, .. } = self.0.params;
        if group.len() > q as usize || zs.len() > j as usize {
            return None;
        }
        let mut idx = 0usize;
        let mut mult = 1usize;
        for d in 0..q as usize {
            let a = group.get(d).copied().unwrap_or(0) as usize % self.0.radix;
            idx += a * mult;
            mult *= self.0.radix;
        }
        for d in 0..j as usize {
            let b = zs.get(d).copied().unwrap_or(0);
            if b >= t {
                return None;
            }
            idx += b as usize * mult;
            mult *= t as usize;
        }
        Some(idx)
    }

    /// Index of the product of two basis elements, `None` when it vanishes.
    #[inline]
    pub fn mul_index(&self, a: usize, b: usize) -> Option<usize> {
        match &self.0.table {
            Some(t) => {
                let v = t[a * self.0.size + b];
                (v != ZERO_IDX).then_some(v as usize)
            }
            None => self.0.mul_index_slow(a, b),
        }
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.0.size]
    }

    pub fn one(&self) -> Vec<u64> {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = self.0.coeff.reduce_u(c);
        v
    }

    pub fn scalar_i(&self, c: i64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = self.0.coeff.reduce(c);
        v
    }

    /// Group generator `gamma_i` (0-based).
    pub fn gamma(&self, i: usize) -> Result<Vec<u64>> {
        if i >= self.0.params.q as usize {
            return Err(Error::UnknownName(format!("gamma{}", i + 1)));
        }
        let mut g = vec![0u32; self.0.params.q as usize];
        g[i] = 1;
        let mut v = self.zero();
        v[self.index_of(&g, &[]).expect("in range")] = 1 % self.0.coeff.modulus();
        Ok(v)
    }

    /// Truncated variable `z_i` (0-based); zero when `t = 1`.
    pub fn z(&self, i: usize) -> Result<Vec<u64>> {
        if i >= self.0.params.j as usize {
            return Err(Error::UnknownName(format!("z{}", i + 1)));
        }
        let mut zs = vec![0u32; self.0.params.j as usize];
        zs[i] = 1;
        let mut v = self.zero();
        if let Some(idx) = self.index_of(&[], &zs) {
            v[idx] = 1;
        }
        Ok(v)
    }

    /// Generators of the maximal ideal: `varpi`, `gamma_i - 1`, `z_i`.
    pub fn maximal_ideal_generators(&self) -> Vec<(String, Vec<u64>)> {
        let mut out = vec![("varpi".to_string(), self.scalar(self.p()))];
        for i in 0..self.0.params.q as usize {
            let g = self.sub(&self.gamma(i).expect("in range"), &self.one());
            out.push((format!("gamma{}-1", i + 1), g));
        }
        for i in 0..self.0.params.j as usize {
            out.push((format!("z{}", i + 1), self.z(i).expect("in range")));
        }
        out
    }

    /// Ring generators acting on modules: `gamma_i` and `z_i`.
    pub fn generator_elements(&self) -> Vec<(String, Vec<u64>)> {
        let mut out = Vec::new();
        for i in 0..self.0.params.q as usize {
            out.push((format!("gamma{}", i + 1), self.gamma(i).expect("in range")));
        }
        for i in 0..self.0.params.j as usize {
            out.push((format!("z{}", i + 1), self.z(i).expect("in range")));
        }
        out
    }

    pub fn generator(&self, name: &str) -> Result<Vec<u64>> {
        if name == "varpi" {
            return Ok(self.scalar(self.p()));
        }
        let parse = |prefix: &str| name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
        if let Some(i) = parse("gamma").filter(|&i| i >= 1) {
            return self.gamma(i - 1);
        }
        if let Some(i) = parse("z").filter(|&i| i >= 1) {
            return self.z(i - 1);
        }
        Err(Error::UnknownName(name.to_string()))
    }

    pub fn check_elem(&self, x: &[u64]) -> Result<()> {
        if x.len() != self.0.size {
            return Err(Error::Dimension(format!("element has {} coordinates, ring basis has {}", x.len(), self.0.size)));
        }
        Ok(())
    }

    /// Element from integer coordinates, reduced.
    pub fn element(&self, coords: &[i64]) -> Result<Vec<u64>> {
        self.check_elem_len(coords.len())?;
        Ok(coords.iter().map(|&c| self.0.coeff.reduce(c)).collect())
    }

    fn check_elem_len(&self, n: usize) -> Result<()> {
        if n != self.0.size {
            return Err(Error::Dimension(format!("element has {n} coordinates, ring basis has {}", self.0.size)));
        }
        Ok(())
    }

    pub fn add(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let c = self.0.coeff;
        x.iter().zip(y).map(|(&a, &b)| c.add(a, b)).collect()
    }

    pub fn sub(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let c = self.0.coeff;
        x.iter().zip(y).map(|(&a, &b)| c.sub(a, b)).collect()
    }

    pub fn neg(&self, x: &[u64]) -> Vec<u64> {
        let c = self.0.coeff;
        x.iter().map(|&a| c.neg(a)).collect()
    }

    pub fn scale(&self, x: &[u64], s: u64) -> Vec<u64> {
        let c = self.0.coeff;
        x.iter().map(|&a| c.mul(a, s)).collect()
    }

    pub fn is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|&a| a == 0)
    }

    pub fn mul(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let mut out = self.zero();
        self.mul_acc(&mut out, x, y);
        out
    }

    /// `out += x * y`
    pub fn mul_acc(&self, out: &mut [u64], x: &[u64], y: &[u64]) {
        let q = self.0.coeff.modulus();
        let ynz: Vec<(usize, u64)> = y.iter().copied().enumerate().filter(|&(_, b)| b != 0).collect();
        if ynz.is_empty() {
            return;
        }
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            for &(b, yb) in &ynz {
                if let Some(k) = self.mul_index(a, b) {
                    out[k] = (out[k] + xa * yb) % q;
                }
            }
        }
    }

    pub fn pow(&self, x: &[u64], mut e: u64) -> Vec<u64> {
        let mut acc = self.one();
        let mut base = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Image under `gamma_i -> 1`, `z_i -> 0`, as an element of `Z/p^m`.
    pub fn augment_value(&self, x: &[u64]) -> u64 {
        let c = self.0.coeff;
        let Params { q, j, .. } = self.0.params;
        let nd = (q + j) as usize;
        let mut acc = 0;
        for (idx, &a) in x.iter().enumerate() {
            if a != 0 && self.0.digits[idx * nd + q as usize..(idx + 1) * nd].iter().all(|&b| b == 0) {
                acc = c.add(acc, a);
            }
        }
        acc
    }

    /// Residue in `F_p`.
    pub fn residue(&self, x: &[u64]) -> u64 {
        self.augment_value(x) % self.p()
    }

    pub fn is_unit(&self, x: &[u64]) -> bool {
        self.residue(x) != 0
    }

    /// Inverse of a unit by Newton iteration `y <- y (2 - x y)`.
    pub fn inv(&self, x: &[u64]) -> Result<Vec<u64>> {
        let s = self.residue(x);
        if s == 0 {
            return Err(Error::NotUnit("element lies in the maximal ideal".into()));
        }
        let c = self.0.coeff;
        let mut y = self.scalar(c.inv(s).expect("nonzero residue"));
        let one = self.one();
        let two = self.scalar(2);
        loop {
            let xy = self.mul(x, &y);
            if xy == one {
                return Ok(y);
            }
            y = self.mul(&y, &self.sub(&two, &xy));
        }
    }

    /// Matrix of multiplication by `x` on the basis (column `k` is `x e_k`).
    pub fn regular_matrix(&self, x: &[u64]) -> ZMatrix {
        let b = self.0.size;
        let mut m = ZMatrix::zeros(self.0.coeff, b, b);
        self.write_regular_block(&mut m, 0, 0, x);
        m
    }

    /// Writes the regular representation of `x` at block offset `(r0, c0)`.
    pub(crate) fn write_regular_block(&self, m: &mut ZMatrix, r0: usize, c0: usize, x: &[u64]) {
        let b = self.0.size;
        let c = self.0.coeff;
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            for k in 0..b {
                if let Some(i) = self.mul_index(a, k) {
                    let cur = m.get(r0 + i, c0 + k);
                    m.set(r0 + i, c0 + k, c.add(cur, xa));
                }
            }
        }
    }

    /// Whether `x` lies in the ideal generated by `gens`.
    pub fn ideal_contains(&self, gens: &[Vec<u64>], x: &[u64]) -> bool {
        if self.is_zero(x) {
            return true;
        }
        if gens.is_empty() {
            return false;
        }
        let b = self.0.size;
        let mut a = ZMatrix::zeros(self.0.coeff, b, b * gens.len());
        for (g, gen) in gens.iter().enumerate() {
            self.write_regular_block(&mut a, 0, g * b, gen);
        }
        Solver::new(&a).solve(x).is_some()
    }

    /// Parse a JSON element: a scalar, a coordinate list, or monomial terms.
    pub fn parse_element(&self, e: &ElementJson) -> Result<Vec<u64>> {
        match e {
            ElementJson::Scalar(c) => Ok(self.scalar_i(*c)),
            ElementJson::Coords(v) => self.element(v),
            ElementJson::Terms { terms } => {
                let Params { q, j, .. } = self.0.params;
                let c = self.0.coeff;
                let mut out = self.zero();
                for (coef, group, zs) in terms {
                    if group.len() != q as usize || zs.len() != j as usize {
                        return Err(Error::Dimension(format!("term needs {q} group and {j} z exponents")));
                    }
                    let radix = self.0.radix as u32;
                    let g: Vec<u32> = group.iter().map(|&a| a % radix).collect();
                    if let Some(idx) = self.index_of(&g, zs) {
                        out[idx] = c.add(out[idx], c.reduce(*coef));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Terms form of an element, for reports.
    pub fn element_json(&self, x: &[u64]) -> ElementJson {
        let q = self.0.params.q as usize;
        let terms = x
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                let d = self.digits(i);
                (c as i64, d[..q].to_vec(), d[q..].to_vec())
            })
            .collect();
        ElementJson::Terms { terms }
    }

    /// Human-readable monomial label of a basis element.
    pub fn basis_label(&self, idx: usize) -> String {
        let Params { q, .. } = self.0.params;
        let mut parts = Vec::new();
        for (d, &e) in self.digits(idx).iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = if d < q as usize { format!("g{}", d + 1) } else { format!("z{}", d + 1 - q as usize) };
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

impl RingData {
    fn mul_index_slow(&self, a: usize, b: usize) -> Option<usize> {
        let Params { q, j, t, .. } = self.params;
        let nd = (q + j) as usize;
        let da = &self.digits[a * nd..(a + 1) * nd];
        let db = &self.digits[b * nd..(b + 1) * nd];
        let mut idx = 0usize;
        let mut mult = 1usize;
        for d in 0..q as usize {
            idx += ((da[d] + db[d]) as usize % self.radix) * mult;
            mult *= self.radix;
        }
        for d in q as usize..nd {
            let s = da[d] + db[d];
            if s >= t {
                return None;
            }
            idx += s as usize * mult;
            mult *= t as usize;
        }
        Some(idx)
    }
}

/// Ring element in scenario files.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Scalar(i64),
    Coords(Vec<i64>),
    /// `[coefficient, [group exponents], [z exponents]]`.
    Terms { terms: Vec<(i64, Vec<u32>, Vec<u32>)> },
}

/// An element together with its ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingElement {
    pub ring: Ring,
    pub coords: Vec<u64>,
}

impl RingElement {
    pub fn new(ring: &Ring, coords: Vec<u64>) -> Result<Self> {
        ring.check_elem(&coords)?;
        let c = ring.coeff();
        let coords = coords.into_iter().map(|x| c.reduce_u(x)).collect();
        Ok(RingElement { ring: ring.clone(), coords })
    }

    fn same(&self, other: &RingElement) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!("{:?} vs {:?}", self.ring.params(), other.ring.params())));
        }
        Ok(())
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.same(other)?;
        Ok(RingElement { ring: self.ring.clone(), coords: self.ring.add(&self.coords, &other.coords) })
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.same(other)?;
        Ok(RingElement { ring: self.ring.clone(), coords: self.ring.sub(&self.coords, &other.coords) })
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.same(other)?;
        Ok(RingElement { ring: self.ring.clone(), coords: self.ring.mul(&self.coords, &other.coords) })
    }

    pub fn is_unit(&self) -> bool {
        self.ring.is_unit(&self.coords)
    }

    pub fn inv(&self) -> Result<RingElement> {
        Ok(RingElement { ring: self.ring.clone(), coords: self.ring.inv(&self.coords)? })
    }
}

/// An ideal given by generators.
#[derive(Clone, Debug)]
pub struct IdealSpec {
    pub ring: Ring,
    pub generators: Vec<Vec<u64>>,
}

impl IdealSpec {
    pub fn new(ring: &Ring, generators: Vec<Vec<u64>>) -> Result<Self> {
        for g in &generators {
            ring.check_elem(g)?;
        }
        let unit = generators.iter().any(|g| ring.is_unit(g));
        if unit && generators.len() > 1 {
            return Err(Error::InvalidRing("a unit ideal must be given by a single unit generator".into()));
        }
        Ok(IdealSpec { ring: ring.clone(), generators })
    }

    pub fn contains(&self, x: &[u64]) -> bool {
        self.ring.ideal_contains(&self.generators, x)
    }
}

/// Checks that `spec` is a valid prime-characteristic ring description.
pub fn validate_spec(spec: &RingSpec) -> Result<()> {
    match spec {
        RingSpec::GradedPolyQuotient { p, .. } => {
            if !is_prime(*p) {
                return Err(Error::NotPrime(*p));
            }
            Ok(())
        }
        _ => Ring::new(spec).map(|_| ()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_of_small_rings() {
        let r = Ring::new(&RingSpec::Chain { p: 3, m: 2 }).unwrap();
        assert_eq!(r.basis_size(), 1);
        assert_eq!(r.coeff().modulus(), 9);
        let f3z3 = Ring::group_algebra(3, 1, 1, 1).unwrap();
        assert_eq!(f3z3.basis_size(), 3);
        assert_eq!(f3z3.log_order(), 3);
    }

    #[test]
    fn group_algebra_over_z4_counts() {
        // (Z/2)^2 has four elements; coefficients mod 4 give 4^4 ring elements.
        let r = Ring::group_algebra(2, 2, 2, 1).unwrap();
        let mut seen = std::collections::BTreeSet::new();
        for a in 0..2 {
            for b in 0..2 {
                seen.insert(r.index_of(&[a, b], &[]).unwrap());
            }
        }
        assert_eq!(seen.len(), 4);
        assert_eq!(r.basis_size(), 4);
        assert_eq!(4u64.pow(r.basis_size() as u32), 256);
    }

    #[test]
    fn units_in_small_group_algebras() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let g = r.gamma(0).unwrap();
        let gm1 = r.sub(&g, &r.one());
        assert!(r.is_unit(&r.add(&r.one(), &gm1)));
        assert!(!r.is_unit(&gm1));
        let r9 = Ring::group_algebra(3, 2, 1, 1).unwrap();
        let x = r9.add(&r9.scalar(3), &r9.gamma(0).unwrap());
        // augmentation gives 3 + 1 = 4, which is 1 mod 3
        assert_eq!(r9.augment_value(&x), 4);
        assert!(r9.is_unit(&x));
        let y = r9.inv(&x).unwrap();
        assert_eq!(r9.mul(&x, &y), r9.one());
    }

    #[test]
    fn gamma_has_order_p_to_the_n() {
        let r = Ring::group_algebra(2, 1, 1, 2).unwrap();
        let g = r.gamma(0).unwrap();
        assert_eq!(r.pow(&g, 4), r.one());
        assert_ne!(r.pow(&g, 2), r.one());
    }

    #[test]
    fn truncated_variables_are_nilpotent() {
        let r = Ring::from_params(Params::trunc_ext(3, 1, 1, 1, 1, 2)).unwrap();
        let z = r.z(0).unwrap();
        assert!(r.is_zero(&r.mul(&z, &z)));
        assert!(!r.is_unit(&z));
        assert_eq!(r.basis_size(), 6);
    }

    #[test]
    fn basis_cap_is_enforced() {
        let err = Ring::group_algebra(3, 1, 3, 4).unwrap_err();
        assert!(matches!(err, Error::BasisTooLarge { .. }));
    }

    #[test]
    fn regular_matrix_of_gamma_is_cyclic() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let m = r.regular_matrix(&r.gamma(0).unwrap());
        let expected = ZMatrix::from_rows(r.coeff(), &[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
        assert_eq!(m, expected);
    }

    #[test]
    fn ideal_membership() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let gm1 = r.sub(&r.gamma(0).unwrap(), &r.one());
        let ideal = IdealSpec::new(&r, vec![gm1.clone()]).unwrap();
        assert!(ideal.contains(&r.mul(&gm1, &r.gamma(0).unwrap())));
        assert!(!ideal.contains(&r.one()));
    }

    #[test]
    fn spec_round_trip() {
        let s: RingSpec = serde_json::from_str(r#"{"kind":"group-algebra","p":3,"m":2,"q":1,"N":2}"#).unwrap();
        assert_eq!(s, RingSpec::GroupAlgebra { p: 3, m: 2, q: 1, n: 2 });
        assert_eq!(Ring::new(&s).unwrap().spec(), s);
        assert!(matches!(Ring::new(&RingSpec::Chain { p: 4, m: 1 }), Err(Error::NotPrime(4))));
    }
}

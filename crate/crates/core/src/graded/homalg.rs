//! Verifiers for the depth bound, the length criterion and near-faithfulness.

use serde::Serialize;

use crate::{Error, Result};

use super::groebner::{groebner, normal_form, syzygies, Free};
use super::hilbert::HilbertSeries;
use super::poly::{poly_to_json, Mono, Vector};
use super::resolution::depth_pd;
use super::{GradedModule, GradedRing, PolyJson};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DepthBound {
    pub depth_n: usize,
    pub dim_m: i64,
    pub holds: bool,
}

/// `dim(M) >= depth(N)` for the submodule `M` generated by `gens` in `N`.
pub fn check_depth_bound(n: &GradedModule, gens: &[Vector]) -> Result<DepthBound> {
    let hs_n = n.hilbert_series()?;
    let hs_m = hs_n.sub(&n.quotient(gens)?.hilbert_series()?);
    if hs_m.is_zero() {
        return Err(Error::ZeroSubmodule);
    }
    let depth_n = depth_pd(n)?.depth.expect("N contains a nonzero submodule");
    let dim_m = hs_m.krull_dim();
    Ok(DepthBound { depth_n, dim_m, holds: dim_m >= depth_n as i64 })
}

/// Cochain complex `P^0 -> ... -> P^n` of graded free modules over a graded
/// ring; `diffs[i]` lists the images of the generators of `P^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedComplex {
    pub ring: GradedRing,
    pub degrees: Vec<Vec<i32>>,
    pub diffs: Vec<Vec<Vector>>,
}

impl GradedComplex {
    pub fn new(ring: &GradedRing, degrees: Vec<Vec<i32>>, diffs: Vec<Vec<Vector>>) -> Result<GradedComplex> {
        if degrees.is_empty() || diffs.len() + 1 != degrees.len() {
            return Err(Error::InvalidComplex("need one differential between consecutive terms".into()));
        }
        for (i, cols) in diffs.iter().enumerate() {
            if cols.len() != degrees[i].len() {
                return Err(Error::Dimension(format!("differential {i} has {} columns, expected {}", cols.len(), degrees[i].len())));
            }
            let target = ring.free(degrees[i + 1].clone());
            for (j, c) in cols.iter().enumerate() {
                target.check_homogeneous(c)?;
                if let Some(d) = c.degree(&target.shifts) {
                    if d != degrees[i][j] {
                        return Err(Error::Inhomogeneous(format!("differential {i} column {j} has degree {d}, expected {}", degrees[i][j])));
                    }
                }
            }
        }
        let c = GradedComplex { ring: ring.clone(), degrees, diffs };
        for i in 0..c.diffs.len().saturating_sub(1) {
            let target = GradedModule::free(ring, c.degrees[i + 2].clone());
            let gb = target.groebner()?;
            for col in &c.diffs[i] {
                let img = c.apply(i + 1, col);
                if !normal_form(&target.ambient(), &gb, &img).is_zero() {
                    return Err(Error::InvalidComplex(format!("d^{} d^{} != 0", i + 1, i)));
                }
            }
        }
        Ok(c)
    }

    /// Generator degrees inferred from the entries, with the top term in degree 0.
    pub fn infer(ring: &GradedRing, ranks: &[usize], diffs: Vec<Vec<Vector>>) -> Result<GradedComplex> {
        if ranks.is_empty() {
            return Err(Error::InvalidComplex("empty complex".into()));
        }
        let mut degrees = vec![Vec::new(); ranks.len()];
        degrees[ranks.len() - 1] = vec![0; ranks[ranks.len() - 1]];
        for i in (0..diffs.len()).rev() {
            let target = degrees[i + 1].clone();
            degrees[i] = diffs[i].iter().map(|c| c.degree(&target).unwrap_or(0)).collect();
            if degrees[i].len() != ranks[i] {
                return Err(Error::Dimension(format!("differential {i} has {} columns, expected {}", degrees[i].len(), ranks[i])));
            }
        }
        GradedComplex::new(ring, degrees, diffs)
    }

    /// Cochain Koszul complex on the variables `vars`, in degrees `0..=vars.len()`.
    pub fn koszul(ring: &GradedRing, vars: &[usize]) -> Result<GradedComplex> {
        let l = vars.len();
        let subsets: Vec<Vec<Vec<usize>>> = (0..=l)
            .map(|k| (0..1usize << l).filter(|s| s.count_ones() as usize == k).map(|s| (0..l).filter(|i| s >> i & 1 == 1).collect()).collect())
            .collect();
        let degrees = (0..=l).map(|k| vec![-(k as i32); subsets[k].len()]).collect();
        let field = ring.field;
        let mut diffs = Vec::new();
        for k in 0..l {
            let cols = subsets[k]
                .iter()
                .map(|t| {
                    let mut raw = Vec::new();
                    for s in (0..l).filter(|s| !t.contains(s)) {
                        let mut u = t.clone();
                        u.push(s);
                        u.sort();
                        let pos = subsets[k + 1].iter().position(|x| *x == u).expect("subset");
                        let below = t.iter().filter(|&&x| x < s).count();
                        let c = if below % 2 == 0 { 1 } else { field.neg(1) };
                        raw.push((pos, Mono::var(ring.q, vars[s]), c));
                    }
                    Vector::from_terms(field, raw)
                })
                .collect();
            diffs.push(cols);
        }
        GradedComplex::new(ring, degrees, diffs)
    }

    fn apply(&self, i: usize, v: &Vector) -> Vector {
        let field = self.ring.field;
        let mut acc = Vector::zero();
        for (pos, m, c) in &v.terms {
            acc = acc.sub_mul(field, field.neg(*c), m, &self.diffs[i][*pos]);
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.degrees.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.iter().all(Vec::is_empty)
    }

    fn term(&self, i: usize) -> GradedModule {
        GradedModule::free(&self.ring, self.degrees[i].clone())
    }

    /// `coker(d^{i-1})`, i.e. `P^i / im d^{i-1}` (or `P^0`).
    pub fn cokernel(&self, i: usize) -> Result<GradedModule> {
        if i == 0 {
            return Ok(self.term(0));
        }
        GradedModule::new(&self.ring, self.degrees[i].clone(), self.diffs[i - 1].clone())
    }

    /// Hilbert series of `H^i`.
    pub fn cohomology_series(&self, i: usize) -> Result<HilbertSeries> {
        let image_in = |k: usize| -> Result<HilbertSeries> {
            // HS(im d^{k-1}) inside P^k
            if k == 0 {
                return Ok(HilbertSeries::zero(self.ring.q));
            }
            Ok(self.term(k).hilbert_series()?.sub(&self.cokernel(k)?.hilbert_series()?))
        };
        let kernel = if i == self.len() {
            self.term(i).hilbert_series()?
        } else {
            self.term(i).hilbert_series()?.sub(&image_in(i + 1)?)
        };
        Ok(kernel.sub(&image_in(i)?))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthCriterion {
    pub q: usize,
    pub l0: usize,
    /// Krull dimension of each `H^i`, `-1` when it vanishes.
    pub dims: Vec<i64>,
    /// `None` when all cohomology vanishes.
    pub codim: Option<usize>,
    pub equality: bool,
    pub lower_vanish: Option<bool>,
    pub depth: Option<usize>,
    pub proj_dim: Option<usize>,
    pub holds: bool,
}

pub fn check_length_criterion(p: &GradedComplex, l0: usize) -> Result<LengthCriterion> {
    if p.len() != l0 {
        return Err(Error::DegreeWindow(format!("complex occupies degrees 0..{}, expected 0..{l0}", p.len())));
    }
    let q = p.ring.q;
    let series = (0..=l0).map(|i| p.cohomology_series(i)).collect::<Result<Vec<_>>>()?;
    let dims: Vec<i64> = series.iter().map(HilbertSeries::krull_dim).collect();
    let total = series.iter().fold(HilbertSeries::zero(q), |a, s| a.add(s));
    let codim = if total.is_zero() { None } else { Some(q - total.krull_dim() as usize) };
    let equality = codim == Some(l0);
    let mut out = LengthCriterion {
        q,
        l0,
        dims,
        codim,
        equality,
        lower_vanish: None,
        depth: None,
        proj_dim: None,
        holds: codim.is_none_or(|c| c <= l0),
    };
    if equality {
        let lower = series[..l0].iter().all(HilbertSeries::is_zero);
        let rep = depth_pd(&p.cokernel(l0)?)?;
        out.lower_vanish = Some(lower);
        out.depth = rep.depth;
        out.proj_dim = rep.proj_dim;
        out.holds &= lower && rep.depth == Some(q - l0) && rep.proj_dim == Some(l0);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaithfulnessReport {
    pub annihilator: Vec<PolyJson>,
    pub contained: Vec<bool>,
    pub nearly_faithful: bool,
}

/// Generators of `Ann_S(M)`, computed as the first coordinates of the
/// syzygies of `(e_1, .., e_r)` against the relations placed blockwise.
pub fn annihilator(m: &GradedModule) -> Result<Vec<Vector>> {
    let field = m.ring.field;
    let q = m.ring.q;
    let r = m.rank();
    if r == 0 {
        return Ok(vec![Vector::term(0, Mono::one(q), 1)]);
    }
    let mut shifts = Vec::with_capacity(r * r);
    for i in 0..r {
        for k in 0..r {
            shifts.push(m.shifts[k] - m.shifts[i]);
        }
    }
    let big = Free::new(field, q, shifts);
    let diag = Vector::from_terms(field, (0..r).map(|i| (i * r + i, Mono::one(q), 1)).collect());
    let mut gens = vec![diag];
    for i in 0..r {
        for g in m.full_relations() {
            gens.push(g.reindex(field, |p| Some(i * r + p)));
        }
    }
    let (_, syz) = syzygies(&big, &gens)?;
    let ann: Vec<Vector> = syz.iter().map(|v| v.component(0)).filter(|v| !v.is_zero()).collect();
    groebner(&Free::new(field, q, vec![0]), &ann)
}

pub fn nearly_faithful(m: &GradedModule, primes: &[Vec<Vector>]) -> Result<FaithfulnessReport> {
    if primes.is_empty() {
        return Err(Error::EmptyPrimes);
    }
    let ann = annihilator(m)?;
    let cyclic = Free::new(m.ring.field, m.ring.q, vec![0]);
    let mut contained = Vec::with_capacity(primes.len());
    for prime in primes {
        let gb = groebner(&cyclic, prime)?;
        contained.push(ann.iter().all(|a| normal_form(&cyclic, &gb, a).is_zero()));
    }
    Ok(FaithfulnessReport {
        annihilator: ann.iter().map(poly_to_json).collect(),
        nearly_faithful: contained.iter().all(|&c| c),
        contained,
    })
}

//! Graded modules over `F_p[x_1..x_q]/I`, handled as `S`-modules
//! `S^r / (U + I S^r)` over the polynomial ring `S`.

pub mod groebner;
pub mod hilbert;
pub mod homalg;
pub mod oracle;
pub mod poly;
pub mod resolution;

use serde::Serialize;

use crate::linalg::{is_prime, Zpm};
use crate::rings::RingSpec;
use crate::{Error, Result};

pub use groebner::{groebner, minimal_generators, normal_form, syzygies, Free};
pub use hilbert::HilbertSeries;
pub use homalg::{
    check_depth_bound, check_length_criterion, nearly_faithful, DepthBound, FaithfulnessReport, GradedComplex,
    LengthCriterion,
};
pub use poly::{Mono, Vector};
pub use resolution::{depth_pd, minimal_free_resolution, HomologicalReport, Resolution};

/// Polynomial as a list of `[coefficient, [exponents]]` terms.
pub type PolyJson = Vec<(i64, Vec<u32>)>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedRing {
    pub field: Zpm,
    pub q: usize,
    pub relations: Vec<Vector>,
}

impl GradedRing {
    pub fn new(p: u64, q: usize, relations: Vec<Vector>) -> Result<GradedRing> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let field = Zpm::new(p, 1)?;
        let free = Free::new(field, q, vec![0]);
        for r in &relations {
            free.check_homogeneous(r)?;
        }
        Ok(GradedRing { field, q, relations: relations.into_iter().filter(|r| !r.is_zero()).collect() })
    }

    pub fn polynomial(p: u64, q: usize) -> Result<GradedRing> {
        GradedRing::new(p, q, Vec::new())
    }

    pub fn from_spec(spec: &RingSpec) -> Result<GradedRing> {
        match spec {
            RingSpec::GradedPolyQuotient { p, q, relations } => {
                let field = Zpm::new(*p, 1)?;
                let rels = relations
                    .iter()
                    .map(|r| poly::poly_from_json(field, *q as usize, 0, r))
                    .collect::<Result<Vec<_>>>()?;
                GradedRing::new(*p, *q as usize, rels)
            }
            other => Err(Error::UnsupportedKind { op: "graded module", kind: other.kind_name().into() }),
        }
    }

    pub fn free(&self, shifts: Vec<i32>) -> Free {
        Free::new(self.field, self.q, shifts)
    }

    pub fn var(&self, i: usize) -> Vector {
        Vector::term(0, Mono::var(self.q, i), 1)
    }

    pub fn poly(&self, p: &PolyJson) -> Result<Vector> {
        poly::poly_from_json(self.field, self.q, 0, p)
    }
}

/// Cokernel of a homogeneous presentation; relations are column vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    pub ring: GradedRing,
    pub shifts: Vec<i32>,
    pub relations: Vec<Vector>,
}

impl GradedModule {
    pub fn new(ring: &GradedRing, shifts: Vec<i32>, relations: Vec<Vector>) -> Result<GradedModule> {
        let free = ring.free(shifts.clone());
        for r in &relations {
            free.check_homogeneous(r)?;
        }
        Ok(GradedModule { ring: ring.clone(), shifts, relations: relations.into_iter().filter(|r| !r.is_zero()).collect() })
    }

    pub fn free(ring: &GradedRing, shifts: Vec<i32>) -> GradedModule {
        GradedModule { ring: ring.clone(), shifts, relations: Vec::new() }
    }

    /// `S / (ideal)` as a cyclic module in degree 0.
    pub fn cyclic(ring: &GradedRing, ideal: Vec<Vector>) -> Result<GradedModule> {
        GradedModule::new(ring, vec![0], ideal)
    }

    /// Relations given as columns, each a list of `rank` polynomials.
    pub fn from_json(ring: &GradedRing, shifts: Vec<i32>, relations: &[Vec<PolyJson>]) -> Result<GradedModule> {
        let mut rels = Vec::with_capacity(relations.len());
        for col in relations {
            if col.len() != shifts.len() {
                return Err(Error::Dimension(format!("relation has {} entries, module rank {}", col.len(), shifts.len())));
            }
            let mut v = Vector::zero();
            for (pos, p) in col.iter().enumerate() {
                v = v.add(ring.field, &poly::poly_from_json(ring.field, ring.q, pos, p)?);
            }
            rels.push(v);
        }
        GradedModule::new(ring, shifts, rels)
    }

    pub fn rank(&self) -> usize {
        self.shifts.len()
    }

    pub fn ambient(&self) -> Free {
        self.ring.free(self.shifts.clone())
    }

    /// `U + I S^r` as generators.
    pub fn full_relations(&self) -> Vec<Vector> {
        let mut out = self.relations.clone();
        for f in &self.ring.relations {
            for i in 0..self.rank() {
                out.push(Vector::unit(self.ring.q, i).mul_poly(self.ring.field, f));
            }
        }
        out
    }

    pub fn groebner(&self) -> Result<Vec<Vector>> {
        groebner(&self.ambient(), &self.full_relations())
    }

    pub fn hilbert_series(&self) -> Result<HilbertSeries> {
        Ok(hilbert::series_of_quotient(&self.ambient(), &self.groebner()?))
    }

    pub fn is_zero(&self) -> Result<bool> {
        Ok(self.hilbert_series()?.is_zero())
    }

    pub fn max_relation_degree(&self) -> i32 {
        let free = self.ambient();
        self.full_relations().iter().filter_map(|r| r.degree(&free.shifts)).max().unwrap_or(0).max(0)
    }

    /// `M / (extra)`, extra given as vectors of the ambient free module.
    pub fn quotient(&self, extra: &[Vector]) -> Result<GradedModule> {
        let mut rels = self.relations.clone();
        rels.extend(extra.iter().cloned());
        GradedModule::new(&self.ring, self.shifts.clone(), rels)
    }

    /// `M / f M` for a homogeneous polynomial `f`.
    pub fn quotient_by_element(&self, f: &Vector) -> Result<GradedModule> {
        let extra: Vec<Vector> =
            (0..self.rank()).map(|i| Vector::unit(self.ring.q, i).mul_poly(self.ring.field, f)).collect();
        self.quotient(&extra)
    }

    pub fn direct_sum(&self, other: &GradedModule) -> Result<GradedModule> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch("direct sum over different rings".into()));
        }
        let r = self.rank();
        let mut shifts = self.shifts.clone();
        shifts.extend(&other.shifts);
        let mut rels = self.relations.clone();
        rels.extend(other.relations.iter().map(|v| v.reindex(self.ring.field, |p| Some(p + r))));
        GradedModule::new(&self.ring, shifts, rels)
    }

    pub fn relations_json(&self) -> Vec<Vec<(usize, PolyJson)>> {
        self.relations.iter().map(Vector::to_json).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HilbertData {
    pub values: Vec<u64>,
    pub krull_dim: i64,
    pub multiplicity: i64,
    pub series: HilbertSeries,
    pub stabilization: i64,
}

/// Lower bound on the degree window for `hilbert_data`.
pub fn stabilization_heuristic(m: &GradedModule) -> i64 {
    2 * m.max_relation_degree() as i64 + m.ring.q as i64
}

pub fn hilbert_data(m: &GradedModule, bound: i64) -> Result<HilbertData> {
    let need = stabilization_heuristic(m);
    if bound < need {
        return Err(Error::BoundTooSmall(format!("degree bound {bound} is below {need}")));
    }
    let series = m.hilbert_series()?;
    let stab = series.stabilization_point();
    if bound < stab {
        return Err(Error::Unstabilized(bound));
    }
    Ok(HilbertData {
        values: series.values(bound),
        krull_dim: series.krull_dim(),
        multiplicity: series.multiplicity(),
        stabilization: stab,
        series,
    })
}

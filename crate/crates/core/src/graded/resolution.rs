//! Minimal graded free resolutions by iterated syzygies.

use serde::Serialize;

use crate::linalg::ZMatrix;
use crate::{Error, Result};

use super::groebner::{groebner, minimal_generators, syzygies, Free};
use super::hilbert::{series_of_free, HilbertSeries};
use super::poly::Vector;
use super::GradedModule;

/// `F_0 <- F_1 <- ...`; `maps[i]` lists the columns of `F_{i+1} -> F_i`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub frees: Vec<Free>,
    pub maps: Vec<Vec<Vector>>,
    pub minimal: bool,
}

impl Resolution {
    pub fn ranks(&self) -> Vec<usize> {
        self.frees.iter().map(Free::rank).collect()
    }

    /// `None` for the zero module.
    pub fn length(&self) -> Option<usize> {
        if self.frees[0].rank() == 0 {
            None
        } else {
            Some(self.maps.len())
        }
    }

    pub fn shifts(&self) -> Vec<Vec<i32>> {
        self.frees.iter().map(|f| f.shifts.clone()).collect()
    }

    /// Alternating sum of the Hilbert series of the free terms.
    pub fn euler_series(&self) -> HilbertSeries {
        let mut total = HilbertSeries::zero(self.frees[0].q);
        for (i, f) in self.frees.iter().enumerate() {
            let s = series_of_free(f);
            total = if i % 2 == 0 { total.add(&s) } else { total.sub(&s) };
        }
        total
    }

    /// Every composite `F_{i+2} -> F_{i+1} -> F_i` vanishes.
    pub fn composites_vanish(&self) -> bool {
        let field = self.frees[0].field;
        self.maps.windows(2).all(|w| {
            w[1].iter().all(|col| {
                let mut acc = Vector::zero();
                for (pos, m, c) in &col.terms {
                    acc = acc.sub_mul(field, field.neg(*c), m, &w[0][*pos]);
                }
                acc.is_zero()
            })
        })
    }
}

/// Positions whose images form a basis of `M / mM`.
fn minimal_positions(m: &GradedModule, rels: &[Vector]) -> Vec<usize> {
    let r = m.rank();
    let field = m.ring.field;
    let consts: Vec<Vec<u64>> = rels.iter().map(|v| (0..r).map(|i| v.constant_at(i)).collect()).collect();
    let mut cols = consts;
    let mut rank = ZMatrix::from_columns(field, r, &cols).rank_mod_p();
    let mut chosen = Vec::new();
    for i in 0..r {
        let mut e = vec![0; r];
        e[i] = 1;
        cols.push(e);
        let nr = ZMatrix::from_columns(field, r, &cols).rank_mod_p();
        if nr > rank {
            chosen.push(i);
            rank = nr;
        } else {
            cols.pop();
        }
    }
    chosen
}

fn is_minimal_map(cols: &[Vector]) -> bool {
    cols.iter().all(|v| v.terms.iter().all(|(_, m, _)| !m.is_one()))
}

pub fn minimal_free_resolution(m: &GradedModule) -> Result<Resolution> {
    let field = m.ring.field;
    let q = m.ring.q;
    let rels: Vec<Vector> = m.full_relations();
    let keep = minimal_positions(m, &rels);
    let drop: Vec<usize> = (0..m.rank()).filter(|i| !keep.contains(i)).collect();

    // eliminate the redundant positions: they rank first in the order
    let mut perm = vec![0usize; m.rank()];
    for (new, &old) in drop.iter().chain(keep.iter()).enumerate() {
        perm[old] = new;
    }
    let shifts_perm: Vec<i32> = drop.iter().chain(keep.iter()).map(|&i| m.shifts[i]).collect();
    let big = Free::new(field, q, shifts_perm);
    let moved: Vec<Vector> = rels.iter().map(|v| v.reindex(field, |p| Some(perm[p]))).collect();
    let gb = groebner(&big, &moved)?;
    let k = drop.len();
    let kernel: Vec<Vector> =
        gb.into_iter().filter(|v| v.terms[0].0 >= k).map(|v| v.reindex(field, |p| p.checked_sub(k))).collect();

    let f0 = Free::new(field, q, keep.iter().map(|&i| m.shifts[i]).collect());
    let mut frees = vec![f0.clone()];
    let mut maps = Vec::new();
    let mut current = f0;
    let mut gens = minimal_generators(&current, &kernel)?;
    while !gens.is_empty() {
        if maps.len() >= q {
            return Err(Error::Invariant {
                name: "hilbert-syzygy".into(),
                msg: format!("resolution longer than {q}"),
            });
        }
        let (next, syz) = syzygies(&current, &gens)?;
        let next_gens = minimal_generators(&next, &syz)?;
        frees.push(next.clone());
        maps.push(gens);
        current = next;
        gens = next_gens;
    }
    let minimal = maps.iter().all(|cols| is_minimal_map(cols));
    Ok(Resolution { frees, maps, minimal })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologicalReport {
    pub q: usize,
    /// `None` for the zero module.
    pub depth: Option<usize>,
    pub proj_dim: Option<usize>,
    pub krull_dim: i64,
    pub hilbert_values: Vec<u64>,
    pub multiplicity: i64,
    pub betti: Vec<usize>,
    pub minimal: bool,
}

pub fn depth_pd(m: &GradedModule) -> Result<HomologicalReport> {
    let res = minimal_free_resolution(m)?;
    let hs = m.hilbert_series()?;
    if res.euler_series() != hs {
        return Err(Error::Invariant { name: "resolution".into(), msg: "Hilbert series mismatch".into() });
    }
    if !res.composites_vanish() {
        return Err(Error::Invariant { name: "resolution".into(), msg: "consecutive maps do not compose to zero".into() });
    }
    let q = m.ring.q;
    let pd = res.length();
    let depth = pd.map(|pd| q - pd);
    let krull_dim = hs.krull_dim();
    if let Some(d) = depth {
        if d as i64 > krull_dim {
            return Err(Error::Invariant { name: "depth".into(), msg: format!("depth {d} exceeds dimension {krull_dim}") });
        }
    }
    let bound = hs.stabilization_point().max(super::stabilization_heuristic(m));
    Ok(HomologicalReport {
        q,
        depth,
        proj_dim: pd,
        krull_dim,
        hilbert_values: hs.values(bound),
        multiplicity: hs.multiplicity(),
        betti: res.ranks(),
        minimal: res.minimal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::poly::Mono;
    use crate::graded::GradedRing;

    fn mono(e: &[u16]) -> Vector {
        Vector::term(0, Mono(e.to_vec()), 1)
    }

    #[test]
    fn koszul_resolution_of_residue_field() {
        let s = GradedRing::polynomial(3, 2).unwrap();
        let k = GradedModule::cyclic(&s, vec![mono(&[1, 0]), mono(&[0, 1])]).unwrap();
        let res = minimal_free_resolution(&k).unwrap();
        assert_eq!(res.ranks(), vec![1, 2, 1]);
        assert!(res.minimal);
        let rep = depth_pd(&k).unwrap();
        assert_eq!((rep.depth, rep.proj_dim), (Some(0), Some(2)));
    }

    #[test]
    fn hypersurface() {
        let s = GradedRing::polynomial(5, 2).unwrap();
        let m = GradedModule::cyclic(&s, vec![mono(&[1, 0])]).unwrap();
        assert_eq!(minimal_free_resolution(&m).unwrap().ranks(), vec![1, 1]);
        let rep = depth_pd(&m).unwrap();
        assert_eq!((rep.depth, rep.proj_dim), (Some(1), Some(1)));
    }

    #[test]
    fn socle_forces_full_projective_dimension() {
        let s = GradedRing::polynomial(2, 2).unwrap();
        let m = GradedModule::cyclic(&s, vec![mono(&[2, 0]), mono(&[1, 1])]).unwrap();
        assert_eq!(minimal_free_resolution(&m).unwrap().ranks(), vec![1, 2, 1]);
        let rep = depth_pd(&m).unwrap();
        assert_eq!((rep.depth, rep.proj_dim, rep.krull_dim), (Some(0), Some(2), 1));
    }

    #[test]
    fn redundant_presentation_is_pruned() {
        // S^2 / (e_1 - e_2): free of rank one
        let s = GradedRing::polynomial(3, 2).unwrap();
        let f = s.field;
        let rel = Vector::unit(2, 0).sub(f, &Vector::unit(2, 1));
        let m = GradedModule::new(&s, vec![0, 0], vec![rel]).unwrap();
        let res = minimal_free_resolution(&m).unwrap();
        assert_eq!(res.ranks(), vec![1]);
        assert_eq!(depth_pd(&m).unwrap().depth, Some(2));
    }

    #[test]
    fn zero_module() {
        let s = GradedRing::polynomial(3, 1).unwrap();
        let m = GradedModule::cyclic(&s, vec![Vector::unit(1, 0)]).unwrap();
        let rep = depth_pd(&m).unwrap();
        assert_eq!(rep.depth, None);
        assert_eq!(rep.krull_dim, -1);
    }
}

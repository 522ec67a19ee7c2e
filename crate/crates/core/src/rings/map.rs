//! Structure maps between finite rings.
//!
//! Every map used here sends basis monomials to basis monomials or to zero,
//! so it is stored as an index table plus a coefficient reduction.

use serde::{Deserialize, Serialize};

use super::{Params, Ring};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapKind {
    /// `S_M -> S_N`, `M >= N`.
    ReduceLevel {
        #[serde(rename = "N")]
        n: u32,
    },
    /// Reduction modulo `varpi^n`.
    ModPower { n: u32 },
    /// `gamma_i -> 1`, `z_i -> 0`; lands in the coefficient ring.
    Augment,
    /// `z_i -> 0`.
    KillVars,
    /// Adjoin truncated variables `z_1..z_j` with `z^t = 0`.
    Inclusion { j: u32, t: u32 },
}

#[derive(Clone, Debug)]
pub struct RingMap {
    pub src: Ring,
    pub dst: Ring,
    pub kind: Option<MapKind>,
    image: Vec<Option<u32>>,
}

impl RingMap {
    pub fn new(src: &Ring, kind: MapKind) -> Result<RingMap> {
        let s = src.params();
        let dst = match kind {
            MapKind::ReduceLevel { n } => {
                if n > s.n {
                    return Err(Error::LevelOrder(format!("cannot reduce level {} to {n}", s.n)));
                }
                Params { n, ..s }
            }
            MapKind::ModPower { n } => {
                if n == 0 {
                    return Err(Error::InvalidRing("mod-power needs n >= 1".into()));
                }
                Params { m: n.min(s.m), ..s }
            }
            MapKind::Augment => Params::chain(s.p, s.m),
            MapKind::KillVars => Params { j: 0, t: 1, ..s },
            MapKind::Inclusion { j, t } => {
                if j < s.j || (s.j > 0 && t != s.t) {
                    return Err(Error::RingMismatch("inclusion must keep existing variables and their bound".into()));
                }
                Params { j, t, ..s }
            }
        };
        let mut map = RingMap::between(src, &Ring::from_params(dst)?)?;
        map.kind = Some(kind);
        Ok(map)
    }

    /// The monomial map `src -> dst`: shared group variables reduce level,
    /// dropped group variables go to 1, shared `z`s truncate, dropped `z`s go
    /// to 0, new variables are adjoined.
    pub fn between(src: &Ring, dst: &Ring) -> Result<RingMap> {
        let s = src.params();
        let d = dst.params();
        if s.p != d.p || d.m > s.m {
            return Err(Error::RingMismatch(format!("no structure map {s:?} -> {d:?}")));
        }
        let shared_q = s.q.min(d.q);
        if shared_q > 0 && d.n > s.n {
            return Err(Error::LevelOrder(format!("group level {} cannot map to {}", s.n, d.n)));
        }
        let shared_j = s.j.min(d.j);
        if shared_j > 0 && d.t > s.t {
            return Err(Error::RingMismatch(format!("z^{} = 0 does not map into z^{} = 0", s.t, d.t)));
        }
        let mut image = Vec::with_capacity(src.basis_size());
        for idx in 0..src.basis_size() {
            let dg = src.digits(idx);
            let (group, zs) = dg.split_at(s.q as usize);
            let killed = zs.iter().skip(shared_j as usize).any(|&b| b > 0);
            let img = if killed {
                None
            } else {
                let g: Vec<u32> = group.iter().take(shared_q as usize).copied().collect();
                let z: Vec<u32> = zs.iter().take(shared_j as usize).copied().collect();
                dst.index_of(&g, &z)
            };
            image.push(img.map(|i| i as u32));
        }
        Ok(RingMap { src: src.clone(), dst: dst.clone(), kind: None, image })
    }

    pub fn apply(&self, x: &[u64]) -> Result<Vec<u64>> {
        self.src.check_elem(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &[u64]) -> Vec<u64> {
        let c = self.dst.coeff();
        let mut out = self.dst.zero();
        for (a, &xa) in x.iter().enumerate() {
            if xa == 0 {
                continue;
            }
            if let Some(i) = self.image[a] {
                let i = i as usize;
                out[i] = c.add(out[i], c.reduce_u(xa));
            }
        }
        out
    }

    pub fn compose(&self, next: &RingMap) -> Result<RingMap> {
        if self.dst != next.src {
            return Err(Error::RingMismatch("maps are not composable".into()));
        }
        let image = self.image.iter().map(|i| i.and_then(|i| next.image[i as usize])).collect();
        Ok(RingMap { src: self.src.clone(), dst: next.dst.clone(), kind: None, image })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn augment_sends_gamma_to_one() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        let f = RingMap::new(&r, MapKind::Augment).unwrap();
        assert_eq!(f.apply(&r.gamma(0).unwrap()).unwrap(), vec![1]);
    }

    #[test]
    fn reduce_level_wraps_group_exponents() {
        let r = Ring::group_algebra(2, 1, 1, 2).unwrap();
        let f = RingMap::new(&r, MapKind::ReduceLevel { n: 1 }).unwrap();
        let g2 = r.pow(&r.gamma(0).unwrap(), 2);
        assert_eq!(f.apply(&g2).unwrap(), f.dst.one());
        assert_eq!(f.apply(&r.gamma(0).unwrap()).unwrap(), f.dst.gamma(0).unwrap());
    }

    #[test]
    fn mod_power_reduces_coefficients() {
        let r = Ring::group_algebra(3, 2, 1, 1).unwrap();
        let x = r.add(&r.scalar(3), &r.gamma(0).unwrap());
        let f = RingMap::new(&r, MapKind::ModPower { n: 1 }).unwrap();
        assert_eq!(f.apply(&x).unwrap(), f.dst.gamma(0).unwrap());
    }

    #[test]
    fn augment_after_inclusion_lands_in_coefficients() {
        let r = Ring::group_algebra(3, 2, 1, 1).unwrap();
        let inc = RingMap::new(&r, MapKind::Inclusion { j: 1, t: 2 }).unwrap();
        let aug = RingMap::new(&inc.dst, MapKind::Augment).unwrap();
        let both = inc.compose(&aug).unwrap();
        assert_eq!(both.dst.params(), Params::chain(3, 2));
        let direct = RingMap::new(&r, MapKind::Augment).unwrap();
        let x = r.add(&r.scalar(4), &r.gamma(0).unwrap());
        assert_eq!(both.apply(&x).unwrap(), direct.apply(&x).unwrap());
    }

    #[test]
    fn refuses_level_increase() {
        let r = Ring::group_algebra(3, 1, 1, 1).unwrap();
        assert!(RingMap::new(&r, MapKind::ReduceLevel { n: 2 }).is_err());
    }
}

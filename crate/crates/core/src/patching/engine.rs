use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::datum::{make_datum, reduce_datum, PatchingDatum, Shape};
use super::{hex, TowerConfig};
use crate::rings::{ElementJson, Params};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, Default)]
pub struct PatchOptions {
    /// Overrides the tower's `levels`.
    pub levels: Option<u32>,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selected {
    pub source: u32,
    pub level: u32,
    pub fingerprint: String,
    /// Size of the fingerprint class the datum was chosen from.
    pub class_size: usize,
}

/// A source level dropped because its `psi` fails at some datum level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Excluded {
    pub source: u32,
    pub level: u32,
    pub reason: String,
}

/// `P_inf mod b_N` together with `phi_inf` and `psi_inf` at that level.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub level: u32,
    pub ring: Params,
    pub lo: i32,
    pub ranks: Vec<usize>,
    pub diffs: Vec<Vec<Vec<ElementJson>>>,
    pub phi: Vec<u64>,
    pub psi: Vec<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PatchedResult {
    pub shape: Shape,
    pub levels: u32,
    pub selected: Vec<Selected>,
    /// `reduce(D_{i+1}, N_i)` has the fingerprint of `D_i`, per consecutive pair.
    pub compatible: Vec<bool>,
    pub excluded: Vec<Excluded>,
    pub truncations: Vec<Truncation>,
    #[serde(skip)]
    pub data: Vec<PatchingDatum>,
}

impl PatchedResult {
    pub fn chain_compatible(&self) -> bool {
        self.compatible.iter().all(|&c| c)
    }
}

pub(crate) enum Built {
    Ok(PatchingDatum),
    BadPsi(Excluded),
}

pub(crate) fn build_level(tower: &TowerConfig, sources: &[u32], level: u32, parallel: bool) -> Result<Vec<(u32, Built)>> {
    let one = |&m: &u32| -> Result<(u32, Built)> {
        match make_datum(tower, m, level) {
            Ok(d) => Ok((m, Built::Ok(d))),
            Err(Error::PsiNotIso { level: src, reason }) => {
                Ok((m, Built::BadPsi(Excluded { source: src, level, reason })))
            }
            Err(e) => Err(e),
        }
    };
    if parallel {
        sources.par_iter().map(one).collect()
    } else {
        sources.iter().map(one).collect()
    }
}

/// Largest class, ties broken by the smallest fingerprint.
pub(crate) fn largest_class<K: Ord + Clone>(classes: &BTreeMap<K, Vec<u32>>) -> Option<(K, Vec<u32>)> {
    let mut best: Option<(&K, &Vec<u32>)> = None;
    for (k, v) in classes {
        if best.is_none_or(|(_, b)| v.len() > b.len()) {
            best = Some((k, v));
        }
    }
    best.map(|(k, v)| (k.clone(), v.clone()))
}

fn truncation_of(d: &PatchingDatum) -> Result<Truncation> {
    let t = d.truncated()?;
    let ring = t.ring().clone();
    let diffs = t
        .diffs()
        .iter()
        .map(|m| (0..m.rows()).map(|r| (0..m.cols()).map(|c| ring.element_json(m.entry(r, c))).collect()).collect())
        .collect();
    Ok(Truncation {
        level: d.level,
        ring: ring.params(),
        lo: t.lo(),
        ranks: t.ranks().to_vec(),
        diffs,
        phi: d.phi.clone(),
        psi: d.psi.to_rows(),
    })
}

/// Pigeonhole over `N_i = i`: at step `i` the surviving source levels
/// `M >= i` are classified by the fingerprint of `D_{M,i}`, the largest class
/// survives, and `M_i` is its smallest member.
pub fn patch(tower: &TowerConfig, opts: PatchOptions) -> Result<PatchedResult> {
    tower.validate()?;
    let levels = opts.levels.unwrap_or(tower.levels);
    if levels == 0 {
        return Err(Error::Schema { path: "levels".into(), msg: "need at least one level".into() });
    }
    let mut alive: Vec<u32> = (1..=tower.source_levels()).collect();
    let mut selected = Vec::new();
    let mut data = Vec::new();
    let mut excluded = Vec::new();
    for level in 1..=levels {
        let cands: Vec<u32> = alive.iter().copied().filter(|&m| m >= level).collect();
        let mut classes: BTreeMap<[u8; 32], Vec<u32>> = BTreeMap::new();
        let mut by_source = BTreeMap::new();
        for (m, built) in build_level(tower, &cands, level, opts.parallel)? {
            match built {
                Built::Ok(d) => {
                    classes.entry(d.fingerprint).or_default().push(m);
                    by_source.insert(m, d);
                }
                Built::BadPsi(e) => {
                    alive.retain(|&x| x != m);
                    excluded.push(e);
                }
            }
        }
        let Some((fp, class)) = largest_class(&classes) else {
            return Err(Error::PigeonholeExhausted {
                level,
                reason: format!("no usable source level M >= {level} among 1..={}", tower.source_levels()),
            });
        };
        let m = class[0];
        selected.push(Selected { source: m, level, fingerprint: hex(&fp), class_size: class.len() });
        data.push(by_source.remove(&m).expect("member of its class"));
        alive = class;
    }
    assemble(tower, levels, selected, data, excluded)
}

pub(crate) fn assemble(
    tower: &TowerConfig,
    levels: u32,
    selected: Vec<Selected>,
    data: Vec<PatchingDatum>,
    excluded: Vec<Excluded>,
) -> Result<PatchedResult> {
    let compatible = data
        .windows(2)
        .map(|w| Ok(reduce_datum(&w[1], w[0].level)?.fingerprint == w[0].fingerprint))
        .collect::<Result<Vec<_>>>()?;
    let truncations = data.iter().map(truncation_of).collect::<Result<Vec<_>>>()?;
    Ok(PatchedResult { shape: Shape::of(tower), levels, selected, compatible, excluded, truncations, data })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_tower_chain() {
        let t = TowerConfig::free(3, 2, 1, 0, 3);
        let r = patch(&t, PatchOptions::default()).unwrap();
        assert_eq!(r.selected.iter().map(|s| (s.source, s.level)).collect::<Vec<_>>(), vec![(1, 1), (2, 2), (3, 3)]);
        assert!(r.chain_compatible());
        assert_eq!(r.truncations[2].ranks, vec![1]);
    }

    #[test]
    fn corrupted_level_is_excluded() {
        let mut t = TowerConfig::free(3, 1, 1, 0, 2);
        t.source_levels = Some(3);
        t.psi_override.insert(2, vec![vec![0]]);
        let r = patch(&t, PatchOptions::default()).unwrap();
        assert_eq!(r.excluded.len(), 1);
        assert_eq!(r.excluded[0].source, 2);
        assert_eq!(r.selected[1].source, 3);
    }

    #[test]
    fn shallow_tower_is_reported() {
        let mut t = TowerConfig::free(3, 1, 1, 0, 2);
        t.psi_override.insert(2, vec![vec![0]]);
        assert!(matches!(patch(&t, PatchOptions::default()), Err(Error::PigeonholeExhausted { level: 2, .. })));
    }

    #[test]
    fn parallel_matches_sequential() {
        let t = TowerConfig::augmentation(3, 2, 3);
        let a = patch(&t, PatchOptions::default()).unwrap();
        let b = patch(&t, PatchOptions { parallel: true, ..Default::default() }).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

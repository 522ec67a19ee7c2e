//! Finite-level patching: data `(phi, psi, P)` of level `N`, fingerprints,
//! the pigeonhole chain, and verification of the patched truncations.
//!
//! Conventions. The coefficient ring is `O = Z/p^m` with uniformizer `p`,
//! `R = O` and `d_N = p^N R`. The datum ring at level `N` is
//! `S_N / p^N = Z/p^min(N,m) [(Z/p^N)^q]`, and the truncation of the framed
//! ring is `S_N / p^N [z_1..z_j] / (z^N)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::complexes::Complex;
use crate::graded::{GradedModule, GradedRing, PolyJson};
use crate::linalg::{ZMatrix, Zpm};
use crate::rings::{ElementJson, RMatrix, Ring, RingSpec};
use crate::{Error, Result};

mod datum;
mod engine;
mod pair;
mod verify;

pub use datum::{make_datum, reduce_datum, PatchingDatum, Shape};
pub use engine::{patch, Excluded, PatchOptions, PatchedResult, Selected, Truncation};
pub use pair::{patch_pair, LinkConfig, PairComparison, PairResult};
pub use verify::{
    faithfulness_check, verify_conclusions, Conclusion, ConclusionReport, Faithfulness, FaithfulnessVerdict,
    LevelCheck, Verdict,
};

/// Default cap on `sum(ranks) * |basis|` for checks over truncation rings.
pub const DEFAULT_VERIFY_CAP: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TowerKind {
    /// `D_M = S_M` in degree 0.
    Free,
    /// `D_M = [S_M --(gamma_1 - 1)--> S_M]` in degrees 0, 1.
    Augmentation,
    /// Complexes supplied per level.
    Explicit,
}

/// Declared facts about `R_inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RinfSpec {
    pub dim: i64,
    #[serde(default)]
    pub smooth: bool,
    #[serde(default = "yes")]
    pub p_torsion_free: bool,
    /// `R_inf` truncations are `O[(Z/p^N)^g][x_1..x_f]/(x^N)` with these counts.
    #[serde(default)]
    pub group_vars: u32,
    #[serde(default)]
    pub free_vars: u32,
}

fn yes() -> bool {
    true
}

/// `H` as an `O`-module `⊕ O/p^{e_i}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HSpec {
    pub exps: Vec<u32>,
}

/// A generator of `R_inf` and its image in the framed group algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    pub name: String,
    pub image: ElementJson,
    /// Image under `phi` in `R = O`.
    #[serde(default)]
    pub phi: i64,
}

/// One explicit `D_M`; entries are elements of `O[(Z/p^M)^q]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelComplex {
    pub level: u32,
    #[serde(default)]
    pub lo: i32,
    pub ranks: Vec<usize>,
    /// `diffs[i]` is `ranks[i+1] x ranks[i]`.
    #[serde(default)]
    pub diffs: Vec<Vec<Vec<ElementJson>>>,
}

/// Graded model of `H` over a graded model of `R_inf / p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShadowSpec {
    pub p: u64,
    pub q: usize,
    #[serde(default)]
    pub ring_relations: Vec<PolyJson>,
    pub shifts: Vec<i32>,
    /// Columns of the presentation, each a list of `(position, polynomial)`.
    #[serde(default)]
    pub relations: Vec<Vec<(usize, PolyJson)>>,
    /// Minimal primes of the ring, by generators.
    #[serde(default)]
    pub primes: Vec<Vec<PolyJson>>,
}

impl ShadowSpec {
    pub fn module(&self) -> Result<GradedModule> {
        let ring = GradedRing::from_spec(&RingSpec::GradedPolyQuotient {
            p: self.p,
            q: self.q as u32,
            relations: self.ring_relations.clone(),
        })?;
        let cols: Vec<Vec<PolyJson>> = self
            .relations
            .iter()
            .map(|col| {
                let mut dense = vec![Vec::new(); self.shifts.len()];
                for (pos, poly) in col {
                    if *pos >= dense.len() {
                        return Err(Error::Schema {
                            path: "shadow.relations".into(),
                            msg: format!("position {pos} outside rank {}", dense.len()),
                        });
                    }
                    dense[*pos] = poly.clone();
                }
                Ok(dense)
            })
            .collect::<Result<_>>()?;
        GradedModule::from_json(&ring, self.shifts.clone(), &cols)
    }

    pub fn primes(&self, m: &GradedModule) -> Result<Vec<Vec<crate::graded::Vector>>> {
        self.primes.iter().map(|gens| gens.iter().map(|f| m.ring.poly(f)).collect()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerConfig {
    pub kind: TowerKind,
    pub p: u64,
    pub m: u32,
    #[serde(default)]
    pub q: u32,
    #[serde(default)]
    pub j: u32,
    #[serde(default)]
    pub l0: u32,
    /// Number of patching levels `L`.
    pub levels: u32,
    /// Highest supplied `M`; defaults to `levels`.
    #[serde(default)]
    pub source_levels: Option<u32>,
    /// Unit by which `psi` rescales in the free tower.
    #[serde(default)]
    pub scale: Option<i64>,
    #[serde(default, rename = "Rinf")]
    pub rinf: Option<RinfSpec>,
    #[serde(default, rename = "H")]
    pub h: Option<HSpec>,
    #[serde(default)]
    pub complexes: Vec<LevelComplex>,
    #[serde(default)]
    pub actions: Option<Vec<ActionSpec>>,
    /// `psi` on degree-`l0` cochains of `D_M` after augmentation.
    #[serde(default)]
    pub psi: Option<Vec<Vec<i64>>>,
    /// Replacement `psi` at chosen source levels (fault injection).
    #[serde(default)]
    pub psi_override: BTreeMap<u32, Vec<Vec<i64>>>,
    #[serde(default)]
    pub shadow: Option<ShadowSpec>,
    #[serde(default)]
    pub verify_cap: Option<usize>,
}

impl TowerConfig {
    /// A free tower with the built-in declarations.
    pub fn free(p: u64, m: u32, q: u32, j: u32, levels: u32) -> TowerConfig {
        TowerConfig {
            kind: TowerKind::Free,
            p,
            m,
            q,
            j,
            l0: 0,
            levels,
            source_levels: None,
            scale: None,
            rinf: None,
            h: None,
            complexes: Vec::new(),
            actions: None,
            psi: None,
            psi_override: BTreeMap::new(),
            shadow: None,
            verify_cap: None,
        }
    }

    pub fn augmentation(p: u64, m: u32, levels: u32) -> TowerConfig {
        TowerConfig { kind: TowerKind::Augmentation, q: 1, l0: 1, ..TowerConfig::free(p, m, 1, 0, levels) }
    }

    pub fn source_levels(&self) -> u32 {
        self.source_levels.unwrap_or(self.levels)
    }

    pub fn verify_cap(&self) -> usize {
        self.verify_cap.unwrap_or(DEFAULT_VERIFY_CAP)
    }

    /// Expected `dim R_inf = 1 + j + q - l0`.
    pub fn target_dim(&self) -> i64 {
        1 + self.j as i64 + self.q as i64 - self.l0 as i64
    }

    pub fn rinf(&self) -> Option<RinfSpec> {
        match (&self.rinf, self.kind) {
            (Some(r), _) => Some(r.clone()),
            (None, TowerKind::Free) => Some(RinfSpec {
                dim: self.target_dim(),
                smooth: true,
                p_torsion_free: true,
                group_vars: self.q,
                free_vars: self.j,
            }),
            (None, TowerKind::Augmentation) => Some(RinfSpec {
                dim: self.target_dim(),
                smooth: true,
                p_torsion_free: true,
                group_vars: 0,
                free_vars: 0,
            }),
            (None, TowerKind::Explicit) => None,
        }
    }

    pub fn h_exps(&self) -> Vec<u32> {
        self.h.as_ref().map_or_else(|| vec![self.m], |h| h.exps.clone())
    }

    /// `R_inf` generators with their images; built-in towers use
    /// `y_i -> gamma_i - 1` and `x_k -> z_k`.
    pub fn actions(&self) -> Vec<ActionSpec> {
        if let Some(a) = &self.actions {
            return a.clone();
        }
        match self.kind {
            TowerKind::Free => {
                let mut out = Vec::new();
                for i in 0..self.q as usize {
                    let mut e = vec![0u32; self.q as usize];
                    e[i] = 1;
                    let zero = vec![0u32; self.q as usize];
                    let terms = vec![(1, e, vec![0; self.j as usize]), (-1, zero, vec![0; self.j as usize])];
                    out.push(ActionSpec { name: format!("y{}", i + 1), image: ElementJson::Terms { terms }, phi: 0 });
                }
                for k in 0..self.j as usize {
                    let mut z = vec![0u32; self.j as usize];
                    z[k] = 1;
                    let terms = vec![(1, vec![0; self.q as usize], z)];
                    out.push(ActionSpec { name: format!("x{}", k + 1), image: ElementJson::Terms { terms }, phi: 0 });
                }
                out
            }
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let schema = |path: &str, msg: String| Err(Error::Schema { path: path.into(), msg });
        Zpm::new(self.p, self.m)?;
        if self.levels == 0 {
            return schema("levels", "need at least one level".into());
        }
        if self.q + self.j < self.l0 {
            return schema("l0", format!("q + j = {} is smaller than l0 = {}", self.q + self.j, self.l0));
        }
        if self.source_levels() < self.levels {
            return schema("source_levels", format!("{} < levels {}", self.source_levels(), self.levels));
        }
        if let Some(r) = &self.rinf {
            if r.dim != self.target_dim() {
                return Err(Error::Invariant {
                    name: "Rinf.dim".into(),
                    msg: format!("declared {} but 1 + j + q - l0 = {}", r.dim, self.target_dim()),
                });
            }
        }
        for &e in &self.h_exps() {
            if e == 0 || e > self.m {
                return schema("H.exps", format!("exponent {e} outside 1..={}", self.m));
            }
        }
        match self.kind {
            TowerKind::Free | TowerKind::Augmentation => {
                if !self.complexes.is_empty() {
                    return schema("complexes", "only explicit towers take complexes".into());
                }
                if self.kind == TowerKind::Augmentation && (self.q != 1 || self.j != 0 || self.l0 != 1) {
                    return schema("kind", "augmentation towers have q = 1, j = 0, l0 = 1".into());
                }
                if self.kind == TowerKind::Free && self.l0 != 0 {
                    return schema("l0", "free towers have l0 = 0".into());
                }
            }
            TowerKind::Explicit => {
                if self.psi.is_none() {
                    return schema("psi", "explicit towers need psi".into());
                }
                for m in 1..=self.source_levels() {
                    if !self.complexes.iter().any(|c| c.level == m) {
                        return Err(Error::MissingLevel(m));
                    }
                }
            }
        }
        if let Some(s) = self.scale {
            if Zpm::new(self.p, self.m)?.val(Zpm::new(self.p, self.m)?.reduce(s)) != 0 {
                return schema("scale", format!("{s} is not a unit"));
            }
        }
        Ok(())
    }

    /// `S_M = O[(Z/p^M)^q]`.
    pub fn source_ring(&self, level: u32) -> Result<Ring> {
        Ring::group_algebra(self.p, self.m, self.q, level)
    }

    /// `D_M` over `S_M`.
    pub fn source_complex(&self, level: u32) -> Result<Complex> {
        if level == 0 || level > self.source_levels() {
            return Err(Error::MissingLevel(level));
        }
        let ring = self.source_ring(level)?;
        match self.kind {
            TowerKind::Free => Ok(Complex::single(&ring, 0, 1)),
            TowerKind::Augmentation => {
                let g = ring.sub(&ring.gamma(0)?, &ring.one());
                let d = RMatrix::from_entries(&ring, &[vec![g]])?;
                Complex::new(&ring, 0, vec![1, 1], vec![d])
            }
            TowerKind::Explicit => {
                let spec = self.complexes.iter().find(|c| c.level == level).ok_or(Error::MissingLevel(level))?;
                let diffs = spec
                    .diffs
                    .iter()
                    .enumerate()
                    .map(|(i, rows)| {
                        let entries = rows
                            .iter()
                            .map(|row| row.iter().map(|e| ring.parse_element(e)).collect::<Result<Vec<_>>>())
                            .collect::<Result<Vec<_>>>()?;
                        let r = *spec.ranks.get(i + 1).unwrap_or(&0);
                        let c = *spec.ranks.get(i).unwrap_or(&0);
                        RMatrix::from_entries_shaped(&ring, r, c, &entries)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Complex::new_checked(&ring, spec.lo, spec.ranks.clone(), diffs).map_err(|e| match e {
                    Error::InvalidComplex(msg) => Error::InvalidComplex(format!("level {level}: {msg}")),
                    other => other,
                })
            }
        }
    }

    /// `psi` on augmented degree-`l0` cochains of `D_M`, `h x rank`.
    pub fn source_psi(&self, level: u32, rank: usize) -> Result<ZMatrix> {
        let coeff = Zpm::new(self.p, self.m)?;
        let h = self.h_exps().len();
        let rows: Vec<Vec<i64>> = if let Some(o) = self.psi_override.get(&level) {
            o.clone()
        } else if let Some(psi) = &self.psi {
            psi.clone()
        } else {
            let u = self.scale.unwrap_or(1);
            (0..h).map(|r| (0..rank).map(|c| if r == c { u } else { 0 }).collect()).collect()
        };
        let z = if rows.is_empty() { ZMatrix::zeros(coeff, 0, rank) } else { ZMatrix::from_rows(coeff, &rows)? };
        if z.rows() != h || z.cols() != rank {
            return Err(Error::Dimension(format!(
                "psi at level {level} is {}x{}, expected {h}x{rank}",
                z.rows(),
                z.cols()
            )));
        }
        Ok(z)
    }
}

/// Lowercase hex of a digest.
pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

//! Versioned JSON scenarios: named objects plus a pipeline of operations.
//!
//! Every object is built and checked at load time, so a malformed complex or
//! operator is reported with its name before anything runs.

mod ops;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::complexes::{ChainMap, Complex};
use crate::graded::{GradedComplex, GradedModule, GradedRing, PolyJson, Vector};
use crate::linalg::{FiniteModule, ZMatrix, Zpm};
use crate::numerology::{SelmerInput, Signature};
use crate::patching::{LinkConfig, TowerConfig};
use crate::rings::{ElementJson, RMatrix, Ring, RingSpec};
use crate::{Error, Result};

pub use report::{run, selfcheck, Command, ErrorInfo, Report, RunOptions, Status, StepReport, Summary};

pub const SCENARIO_VERSION: u32 = 1;

/// A ring given inline or by name.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum RingRef {
    Name(String),
    Spec(RingSpec),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixSpec {
    pub ring: RingRef,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<ElementJson>>,
}

/// A differential, either a full matrix record or just its entries.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DiffSpec {
    Full {
        #[serde(default)]
        ring: Option<RingRef>,
        rows: usize,
        cols: usize,
        entries: Vec<Vec<ElementJson>>,
    },
    Bare(Vec<Vec<ElementJson>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub ring: RingRef,
    #[serde(default)]
    pub lo: i32,
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub diffs: Vec<DiffSpec>,
}

/// A finite `Z/p^m`-module in invariant-factor form.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub ring: RingRef,
    /// Non-increasing exponents.
    pub exps: Vec<u32>,
    #[serde(default)]
    pub actions: BTreeMap<String, Vec<Vec<i64>>>,
}

/// An operator on a named complex (`maps`, one per degree) or module (`matrix`).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    #[serde(default)]
    pub complex: Option<String>,
    #[serde(default)]
    pub module: Option<String>,
    #[serde(default)]
    pub maps: Option<Vec<Vec<Vec<ElementJson>>>>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<i64>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedModuleSpec {
    pub ring: RingRef,
    #[serde(default = "zero_shift")]
    pub shifts: Vec<i32>,
    /// Columns, each a list of `rank` polynomials.
    #[serde(default)]
    pub relations: Vec<Vec<PolyJson>>,
    /// Generators of a submodule, for the depth bound.
    #[serde(default)]
    pub submodule: Option<Vec<Vec<PolyJson>>>,
    /// Minimal primes of the ring, each by generators.
    #[serde(default)]
    pub primes: Option<Vec<Vec<PolyJson>>>,
}

fn zero_shift() -> Vec<i32> {
    vec![0]
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedComplexSpec {
    pub ring: RingRef,
    /// Koszul complex on these variable indices.
    #[serde(default)]
    pub koszul: Option<Vec<usize>>,
    #[serde(default)]
    pub ranks: Option<Vec<usize>>,
    #[serde(default)]
    pub degrees: Option<Vec<Vec<i32>>>,
    /// `diffs[i]` lists the columns of `d^i`, each with one polynomial per target generator.
    #[serde(default)]
    pub diffs: Option<Vec<Vec<Vec<PolyJson>>>>,
    #[serde(default)]
    pub l0: Option<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSpec {
    pub first: String,
    pub second: String,
    pub eta: Vec<Vec<i64>>,
    #[serde(default)]
    pub lambda: Option<BTreeMap<u32, Vec<Vec<ElementJson>>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumerologySpec {
    pub n: u64,
    pub r1: u64,
    pub r2: u64,
    #[serde(default)]
    pub q: Option<u64>,
    #[serde(default, rename = "T")]
    pub t: Option<u64>,
    #[serde(default, rename = "SpR")]
    pub spr: Option<u64>,
    #[serde(default)]
    pub traces: Option<Vec<i64>>,
    #[serde(default)]
    pub selmer: Option<SelmerInput>,
}

impl NumerologySpec {
    pub fn signature(&self) -> Result<Signature> {
        Signature::new(self.n, self.r1, self.r2)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepSpec {
    pub op: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default)]
    pub out: Option<String>,
    #[serde(default)]
    pub params: serde_json::Value,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub version: u32,
    #[serde(default)]
    pub rings: BTreeMap<String, RingSpec>,
    #[serde(default)]
    pub matrices: BTreeMap<String, MatrixSpec>,
    #[serde(default)]
    pub complexes: BTreeMap<String, ComplexSpec>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub graded_modules: BTreeMap<String, GradedModuleSpec>,
    #[serde(default)]
    pub graded_complexes: BTreeMap<String, GradedComplexSpec>,
    #[serde(default)]
    pub towers: BTreeMap<String, TowerConfig>,
    #[serde(default)]
    pub links: BTreeMap<String, LinkSpec>,
    #[serde(default)]
    pub numerology: BTreeMap<String, NumerologySpec>,
    #[serde(default)]
    pub pipeline: Vec<StepSpec>,
}

#[derive(Clone, Debug)]
pub enum Operator {
    Chain { complex: String, map: ChainMap },
    Module { module: String, matrix: ZMatrix },
}

#[derive(Clone, Debug)]
pub struct GradedModuleObj {
    pub module: GradedModule,
    pub submodule: Option<Vec<Vector>>,
    pub primes: Option<Vec<Vec<Vector>>>,
}

#[derive(Clone, Debug)]
pub struct GradedComplexObj {
    pub complex: GradedComplex,
    pub l0: usize,
}

#[derive(Clone, Debug)]
pub struct Link {
    pub first: String,
    pub second: String,
    pub config: LinkConfig,
}

/// A loaded, validated object.
#[derive(Clone, Debug)]
pub enum Object {
    Ring(RingSpec),
    Matrix(RMatrix),
    Complex(Complex),
    Module(FiniteModule),
    Operator(Operator),
    GradedModule(GradedModuleObj),
    GradedComplex(GradedComplexObj),
    Tower(Box<TowerConfig>),
    Link(Link),
    Numerology(NumerologySpec),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Ring(_) => "ring",
            Object::Matrix(_) => "matrix",
            Object::Complex(_) => "complex",
            Object::Module(_) => "module",
            Object::Operator(_) => "operator",
            Object::GradedModule(_) => "graded module",
            Object::GradedComplex(_) => "graded complex",
            Object::Tower(_) => "tower",
            Object::Link(_) => "link",
            Object::Numerology(_) => "numerology query",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Step {
    pub op: String,
    pub args: Vec<String>,
    pub out: Option<String>,
    pub params: serde_json::Value,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    /// Hex sha256 of the input text.
    pub hash: String,
    pub version: u32,
    /// Objects by name, in declaration-kind order then name order.
    pub objects: BTreeMap<String, Object>,
    pub order: Vec<String>,
    pub pipeline: Vec<Step>,
}

fn schema(path: impl Into<String>, msg: impl Into<String>) -> Error {
    Error::Schema { path: path.into(), msg: msg.into() }
}

/// Tags an error from building object `name`.
fn named(name: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::Invariant { .. } | Error::Schema { .. } => e,
        other => Error::Invariant { name: name.to_string(), msg: other.to_string() },
    }
}

/// Parse and validate a scenario. A bare `{"tower": …}` document is accepted
/// as a one-tower scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let hash = crate::patching::hex(&Sha256::digest(text.as_bytes()));
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| schema("$", e.to_string()))?;
    let value = wrap_bare_tower(value);
    let file: ScenarioFile = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(if path == "." { "$".to_string() } else { format!("$.{path}") }, e.into_inner().to_string())
    })?;
    load(file, hash)
}

fn wrap_bare_tower(v: serde_json::Value) -> serde_json::Value {
    match v {
        serde_json::Value::Object(ref map) if !map.contains_key("version") && map.contains_key("tower") => {
            let mut towers = serde_json::Map::new();
            let name = map.get("name").and_then(|n| n.as_str()).unwrap_or("tower").to_string();
            towers.insert(name, map["tower"].clone());
            serde_json::json!({ "version": SCENARIO_VERSION, "towers": towers })
        }
        other => other,
    }
}

pub fn load(file: ScenarioFile, hash: String) -> Result<Scenario> {
    if file.version != SCENARIO_VERSION {
        return Err(schema("$.version", format!("unsupported version {}, expected {SCENARIO_VERSION}", file.version)));
    }
    let mut objects: BTreeMap<String, Object> = BTreeMap::new();
    let mut order = Vec::new();
    let mut claim = |name: &str, kind: &str, objects: &BTreeMap<String, Object>| -> Result<()> {
        if objects.contains_key(name) {
            return Err(schema(format!("$.{kind}.{name}"), format!("name {name:?} is already used")));
        }
        order.push(name.to_string());
        Ok(())
    };

    for (name, spec) in &file.rings {
        claim(name, "rings", &objects)?;
        match spec {
            RingSpec::GradedPolyQuotient { .. } => {
                GradedRing::from_spec(spec).map_err(named(name))?;
            }
            _ => {
                Ring::new(spec).map_err(named(name))?;
            }
        }
        objects.insert(name.clone(), Object::Ring(spec.clone()));
    }
    for (name, spec) in &file.matrices {
        claim(name, "matrices", &objects)?;
        let ring = finite_ring(&objects, &spec.ring).map_err(named(name))?;
        let m = matrix(&ring, spec.rows, spec.cols, &spec.entries).map_err(named(name))?;
        objects.insert(name.clone(), Object::Matrix(m));
    }
    for (name, spec) in &file.complexes {
        claim(name, "complexes", &objects)?;
        let c = complex(&objects, spec).map_err(named(name))?;
        objects.insert(name.clone(), Object::Complex(c));
    }
    for (name, spec) in &file.modules {
        claim(name, "modules", &objects)?;
        let m = module(&objects, spec).map_err(named(name))?;
        objects.insert(name.clone(), Object::Module(m));
    }
    for (name, spec) in &file.operators {
        claim(name, "operators", &objects)?;
        let op = operator(&objects, spec).map_err(named(name))?;
        objects.insert(name.clone(), Object::Operator(op));
    }
    for (name, spec) in &file.graded_modules {
        claim(name, "graded_modules", &objects)?;
        let m = graded_module(&objects, spec).map_err(named(name))?;
        objects.insert(name.clone(), Object::GradedModule(m));
    }
    for (name, spec) in &file.graded_complexes {
        claim(name, "graded_complexes", &objects)?;
        let c = graded_complex(&objects, spec).map_err(named(name))?;
        objects.insert(name.clone(), Object::GradedComplex(c));
    }
    for (name, tower) in &file.towers {
        claim(name, "towers", &objects)?;
        tower.validate().map_err(named(name))?;
        objects.insert(name.clone(), Object::Tower(Box::new(tower.clone())));
    }
    for (name, spec) in &file.links {
        claim(name, "links", &objects)?;
        for t in [&spec.first, &spec.second] {
            if !matches!(objects.get(t), Some(Object::Tower(_))) {
                return Err(schema(format!("$.links.{name}"), format!("{t:?} is not a tower")));
            }
        }
        let config = LinkConfig { eta: spec.eta.clone(), lambda: spec.lambda.clone() };
        objects.insert(name.clone(), Object::Link(Link { first: spec.first.clone(), second: spec.second.clone(), config }));
    }
    for (name, spec) in &file.numerology {
        claim(name, "numerology", &objects)?;
        spec.signature().map_err(named(name))?;
        objects.insert(name.clone(), Object::Numerology(spec.clone()));
    }

    let mut produced: BTreeSet<String> = BTreeSet::new();
    let mut pipeline = Vec::new();
    for (i, s) in file.pipeline.iter().enumerate() {
        if !ops::OPS.contains(&s.op.as_str()) {
            return Err(schema(format!("$.pipeline[{i}].op"), format!("unknown operation {:?}", s.op)));
        }
        for a in &s.args {
            if !objects.contains_key(a) && !produced.contains(a) {
                return Err(schema(format!("$.pipeline[{i}].args"), format!("{a:?} does not resolve")));
            }
        }
        if let Some(out) = &s.out {
            if objects.contains_key(out) || !produced.insert(out.clone()) {
                return Err(schema(format!("$.pipeline[{i}].out"), format!("name {out:?} is already used")));
            }
        }
        pipeline.push(Step { op: s.op.clone(), args: s.args.clone(), out: s.out.clone(), params: s.params.clone() });
    }
    Ok(Scenario { hash, version: file.version, objects, order, pipeline })
}

fn ring_spec(objects: &BTreeMap<String, Object>, r: &RingRef) -> Result<RingSpec> {
    match r {
        RingRef::Spec(s) => Ok(s.clone()),
        RingRef::Name(n) => match objects.get(n) {
            Some(Object::Ring(s)) => Ok(s.clone()),
            Some(o) => Err(Error::UnknownName(format!("{n:?} is a {}, not a ring", o.kind()))),
            None => Err(Error::UnknownName(format!("ring {n:?}"))),
        },
    }
}

pub(crate) fn finite_ring(objects: &BTreeMap<String, Object>, r: &RingRef) -> Result<Ring> {
    Ring::new(&ring_spec(objects, r)?)
}

fn graded_ring(objects: &BTreeMap<String, Object>, r: &RingRef) -> Result<GradedRing> {
    let spec = ring_spec(objects, r)?;
    match spec {
        RingSpec::PrimeField { .. } | RingSpec::Chain { .. } | RingSpec::GroupAlgebra { .. } | RingSpec::TruncExt { .. } => {
            Err(Error::UnsupportedKind { op: "graded module", kind: spec.kind_name().into() })
        }
        RingSpec::GradedPolyQuotient { .. } => GradedRing::from_spec(&spec),
    }
}

fn matrix(ring: &Ring, rows: usize, cols: usize, entries: &[Vec<ElementJson>]) -> Result<RMatrix> {
    if entries.len() != rows || entries.iter().any(|r| r.len() != cols) {
        return Err(Error::Dimension(format!("entries do not form a {rows}x{cols} matrix")));
    }
    let parsed = entries
        .iter()
        .map(|row| row.iter().map(|e| ring.parse_element(e)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    RMatrix::from_entries_shaped(ring, rows, cols, &parsed)
}

fn complex(objects: &BTreeMap<String, Object>, spec: &ComplexSpec) -> Result<Complex> {
    let ring = finite_ring(objects, &spec.ring)?;
    if spec.ranks.is_empty() {
        return Err(Error::InvalidComplex("no terms".into()));
    }
    if spec.diffs.len() + 1 != spec.ranks.len() {
        return Err(Error::InvalidComplex(format!("{} terms need {} differentials", spec.ranks.len(), spec.ranks.len() - 1)));
    }
    let mut diffs = Vec::new();
    for (i, d) in spec.diffs.iter().enumerate() {
        let (rows, cols) = (spec.ranks[i + 1], spec.ranks[i]);
        let m = match d {
            DiffSpec::Full { ring: r, rows: dr, cols: dc, entries } => {
                if let Some(r) = r {
                    if finite_ring(objects, r)? != ring {
                        return Err(Error::RingMismatch(format!("differential {i} is over another ring")));
                    }
                }
                if (*dr, *dc) != (rows, cols) {
                    return Err(Error::Dimension(format!("differential {i} is {dr}x{dc}, expected {rows}x{cols}")));
                }
                matrix(&ring, rows, cols, entries)?
            }
            DiffSpec::Bare(entries) if rows == 0 || cols == 0 => {
                if entries.iter().any(|r| !r.is_empty()) || (rows == 0 && !entries.is_empty()) {
                    return Err(Error::Dimension(format!("differential {i} should be empty")));
                }
                RMatrix::zeros(&ring, rows, cols)
            }
            DiffSpec::Bare(entries) => matrix(&ring, rows, cols, entries)?,
        };
        diffs.push(m);
    }
    Complex::new_checked(&ring, spec.lo, spec.ranks.clone(), diffs)
}

fn coeff_ring(objects: &BTreeMap<String, Object>, r: &RingRef) -> Result<Zpm> {
    let ring = finite_ring(objects, r)?;
    if ring.basis_size() != 1 {
        return Err(Error::UnsupportedKind { op: "finite module", kind: ring_spec(objects, r)?.kind_name().into() });
    }
    Ok(ring.coeff())
}

fn module(objects: &BTreeMap<String, Object>, spec: &ModuleSpec) -> Result<FiniteModule> {
    let zpm = coeff_ring(objects, &spec.ring)?;
    if spec.exps.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Dimension("exponents must be non-increasing".into()));
    }
    let mut m = FiniteModule::new(zpm, spec.exps.clone())?;
    for (name, rows) in &spec.actions {
        let a = square(zpm, rows, m.len(), name)?;
        m.add_action(name, a)?;
    }
    if !m.actions_commute() {
        return Err(Error::NonCommuting("actions do not commute".into()));
    }
    Ok(m)
}

fn square(zpm: Zpm, rows: &[Vec<i64>], n: usize, what: &str) -> Result<ZMatrix> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("{what} must be {n}x{n}")));
    }
    if n == 0 {
        return Ok(ZMatrix::zeros(zpm, 0, 0));
    }
    ZMatrix::from_rows(zpm, rows)
}

fn operator(objects: &BTreeMap<String, Object>, spec: &OperatorSpec) -> Result<Operator> {
    match (&spec.complex, &spec.module, &spec.maps, &spec.matrix) {
        (Some(c), None, Some(maps), None) => {
            let Some(Object::Complex(cx)) = objects.get(c) else {
                return Err(Error::UnknownName(format!("complex {c:?}")));
            };
            if maps.len() != cx.ranks().len() {
                return Err(Error::Dimension(format!("need one map per degree, {} given", maps.len())));
            }
            let ring = cx.ring();
            let maps = cx
                .degrees()
                .zip(maps)
                .map(|(deg, e)| {
                    let r = cx.rank(deg);
                    if r == 0 {
                        Ok(RMatrix::zeros(ring, 0, 0))
                    } else {
                        matrix(ring, r, r, e)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let map = ChainMap { lo: cx.lo(), maps };
            crate::ordinary::check_chain_endomorphism(cx, &map)?;
            Ok(Operator::Chain { complex: c.clone(), map })
        }
        (None, Some(m), None, Some(rows)) => {
            let Some(Object::Module(md)) = objects.get(m) else {
                return Err(Error::UnknownName(format!("module {m:?}")));
            };
            let a = square(md.ring, rows, md.len(), "operator")?;
            if !md.is_well_defined(&a) {
                return Err(Error::Invariant { name: m.clone(), msg: "operator does not respect the invariant factors".into() });
            }
            for (name, b) in &md.actions {
                if !md.commutes(&a, b) {
                    return Err(Error::NonCommuting(format!("operator does not commute with {name}")));
                }
            }
            Ok(Operator::Module { module: m.clone(), matrix: md.reduce_rows(&a) })
        }
        _ => Err(Error::Schema {
            path: "operator".into(),
            msg: "give either complex + maps or module + matrix".into(),
        }),
    }
}

fn vector(ring: &GradedRing, polys: &[PolyJson]) -> Result<Vector> {
    let mut v = Vector::zero();
    for (pos, p) in polys.iter().enumerate() {
        v = v.add(ring.field, &ring.poly(p)?.reindex(ring.field, |_| Some(pos)));
    }
    Ok(v)
}

fn graded_module(objects: &BTreeMap<String, Object>, spec: &GradedModuleSpec) -> Result<GradedModuleObj> {
    let ring = graded_ring(objects, &spec.ring)?;
    let module = GradedModule::from_json(&ring, spec.shifts.clone(), &spec.relations)?;
    let submodule = match &spec.submodule {
        None => None,
        Some(gens) => {
            let vs = gens
                .iter()
                .map(|g| {
                    if g.len() != module.rank() {
                        return Err(Error::Dimension(format!("submodule generator has {} entries, rank {}", g.len(), module.rank())));
                    }
                    let v = vector(&ring, g)?;
                    module.ambient().check_homogeneous(&v)?;
                    Ok(v)
                })
                .collect::<Result<Vec<_>>>()?;
            Some(vs)
        }
    };
    let primes = match &spec.primes {
        None => None,
        Some(ps) => {
            if ps.is_empty() {
                return Err(Error::EmptyPrimes);
            }
            Some(ps.iter().map(|gens| gens.iter().map(|p| ring.poly(p)).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?)
        }
    };
    Ok(GradedModuleObj { module, submodule, primes })
}

fn graded_complex(objects: &BTreeMap<String, Object>, spec: &GradedComplexSpec) -> Result<GradedComplexObj> {
    let ring = graded_ring(objects, &spec.ring)?;
    let complex = match (&spec.koszul, &spec.diffs) {
        (Some(vars), None) => {
            if vars.iter().any(|&v| v >= ring.q) {
                return Err(Error::Dimension(format!("Koszul variables {vars:?} outside 0..{}", ring.q)));
            }
            GradedComplex::koszul(&ring, vars)?
        }
        (None, Some(diffs)) => {
            let cols = diffs
                .iter()
                .map(|d| d.iter().map(|col| vector(&ring, col)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            match (&spec.degrees, &spec.ranks) {
                (Some(deg), _) => GradedComplex::new(&ring, deg.clone(), cols)?,
                (None, Some(ranks)) => GradedComplex::infer(&ring, ranks, cols)?,
                (None, None) => return Err(Error::Schema { path: "ranks".into(), msg: "give ranks or degrees".into() }),
            }
        }
        _ => return Err(Error::Schema { path: "koszul".into(), msg: "give either koszul or diffs".into() }),
    };
    let l0 = spec.l0.unwrap_or(complex.len());
    Ok(GradedComplexObj { complex, l0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_scenario() {
        let s = parse_scenario(r#"{"version":1,"rings":{"R":{"kind":"chain","p":3,"m":2}},"pipeline":[]}"#).unwrap();
        assert!(s.pipeline.is_empty());
        assert_eq!(s.hash.len(), 64);
    }

    #[test]
    fn bad_complex_is_named() {
        let text = r#"{"version":1,
            "complexes":{"bad":{"ring":{"kind":"chain","p":3,"m":1},"ranks":[1,1,1],"diffs":[[[1]],[[1]]]}}}"#;
        match parse_scenario(text) {
            Err(Error::Invariant { name, .. }) => assert_eq!(name, "bad"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn schema_errors_carry_a_path() {
        match parse_scenario(r#"{"version":1,"rings":{"R":{"kind":"chain","p":3}}}"#) {
            Err(Error::Schema { path, .. }) => assert!(path.contains("rings.R"), "{path}"),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_scenario(r#"{"version":2}"#), Err(Error::Schema { .. })));
        assert!(matches!(
            parse_scenario(r#"{"version":1,"pipeline":[{"op":"homology","args":["nope"]}]}"#),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = r#"{"version":1,"rings":{"X":{"kind":"chain","p":3,"m":1}},
            "numerology":{"X":{"n":2,"r1":0,"r2":1}}}"#;
        assert!(matches!(parse_scenario(text), Err(Error::Schema { .. })));
    }

    #[test]
    fn bare_tower_is_wrapped() {
        let s = parse_scenario(r#"{"tower":{"kind":"free","p":3,"m":1,"q":1,"j":0,"l0":0,"levels":2}}"#).unwrap();
        assert!(matches!(s.objects.get("tower"), Some(Object::Tower(_))));
    }
}

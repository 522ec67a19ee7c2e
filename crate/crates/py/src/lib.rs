//! Python bindings. Results that are plain records come back as dicts.

use ::patchlab as core;
use core::complexes::{minimize, Complex as CoreComplex};
use core::linalg::{smith_normal_form, Track, ZMatrix, Zpm};
use core::numerology::{check_infinity_identity, invariants, Signature};
use core::patching::{patch as core_patch, verify_conclusions, PatchOptions, TowerConfig};
use core::rings::{Params, RMatrix, Ring as CoreRing};
use core::scenario::{parse_scenario, run, selfcheck as core_selfcheck, Command, RunOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: core::Error) -> PyErr {
    PyValueError::new_err(format!("{}: {}", e.code(), e))
}

fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_loads(py, &text)
}

fn json_loads(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// `Z/p^m[(Z/p^N)^q][z_1..z_j]/(z^t)`; elements are coordinate lists.
#[pyclass(frozen, module = "patchlab")]
struct Ring {
    inner: CoreRing,
}

#[pymethods]
impl Ring {
    #[new]
    #[pyo3(signature = (p, m=1, q=0, N=0, j=0, t=1))]
    #[allow(non_snake_case)]
    fn new(p: u64, m: u32, q: u32, N: u32, j: u32, t: u32) -> PyResult<Self> {
        let inner = CoreRing::from_params(Params::trunc_ext(p, m, q, N, j, t)).map_err(err)?;
        Ok(Ring { inner })
    }

    #[getter]
    fn basis_size(&self) -> usize {
        self.inner.basis_size()
    }

    #[getter]
    fn log_order(&self) -> u64 {
        self.inner.log_order()
    }

    fn one(&self) -> Vec<u64> {
        self.inner.one()
    }

    fn generator(&self, name: &str) -> PyResult<Vec<u64>> {
        self.inner.generator(name).map_err(err)
    }

    fn element(&self, coords: Vec<i64>) -> PyResult<Vec<u64>> {
        self.inner.element(&coords).map_err(err)
    }

    fn add(&self, x: Vec<u64>, y: Vec<u64>) -> PyResult<Vec<u64>> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.inner.add(&x, &y))
    }

    fn mul(&self, x: Vec<u64>, y: Vec<u64>) -> PyResult<Vec<u64>> {
        self.check(&x)?;
        self.check(&y)?;
        Ok(self.inner.mul(&x, &y))
    }

    fn is_unit(&self, x: Vec<u64>) -> PyResult<bool> {
        self.check(&x)?;
        Ok(self.inner.is_unit(&x))
    }

    fn inv(&self, x: Vec<u64>) -> PyResult<Vec<u64>> {
        self.check(&x)?;
        self.inner.inv(&x).map_err(err)
    }

    fn augment(&self, x: Vec<u64>) -> PyResult<u64> {
        self.check(&x)?;
        Ok(self.inner.augment_value(&x))
    }

    fn __repr__(&self) -> String {
        let Params { p, m, q, n, j, t } = self.inner.params();
        format!("Ring(p={p}, m={m}, q={q}, N={n}, j={j}, t={t})")
    }
}

impl Ring {
    fn check(&self, x: &[u64]) -> PyResult<()> {
        self.inner.check_elem(x).map_err(err)
    }
}

/// Bounded complex of finite free modules with differentials
/// `d^i : R^{ranks[i]} -> R^{ranks[i+1]}`, starting in degree `lo`.
#[pyclass(frozen, module = "patchlab")]
struct Complex {
    inner: CoreComplex,
}

#[pymethods]
impl Complex {
    #[new]
    fn new(ring: &Ring, lo: i32, ranks: Vec<usize>, diffs: Vec<Vec<Vec<Vec<u64>>>>) -> PyResult<Self> {
        if diffs.len() + 1 != ranks.len() {
            return Err(PyValueError::new_err("need one differential between each pair of ranks"));
        }
        let r = &ring.inner;
        let mats = diffs
            .iter()
            .enumerate()
            .map(|(i, d)| RMatrix::from_entries_shaped(r, ranks[i + 1], ranks[i], d))
            .collect::<core::Result<Vec<_>>>()
            .map_err(err)?;
        let inner = CoreComplex::new_checked(r, lo, ranks, mats).map_err(err)?;
        Ok(Complex { inner })
    }

    #[getter]
    fn lo(&self) -> i32 {
        self.inner.lo()
    }

    #[getter]
    fn ranks(&self) -> Vec<usize> {
        self.inner.ranks().to_vec()
    }

    fn diffs(&self) -> Vec<Vec<Vec<Vec<u64>>>> {
        self.inner.diffs().iter().map(|d| d.to_entries()).collect()
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    /// Exponents `e_k` with `H^deg = (+) Z/p^{e_k}` as an abelian group.
    fn cohomology(&self, deg: i32) -> Vec<u32> {
        self.inner.cohomology(deg).module().exps.clone()
    }

    fn homology_log_orders(&self) -> Vec<(i32, u64)> {
        self.inner.degrees().map(|d| (d, self.inner.cohomology(d).module().log_order())).collect()
    }

    fn is_minimal(&self) -> bool {
        self.inner.diffs().iter().all(|d| d.is_minimal())
    }

    fn minimize(&self) -> Complex {
        Complex { inner: minimize(&self.inner).complex }
    }

    fn __repr__(&self) -> String {
        format!("Complex(lo={}, ranks={:?})", self.inner.lo(), self.inner.ranks())
    }
}

/// Smith normal form of an integer matrix reduced mod `p^m`.
#[pyfunction]
#[pyo3(signature = (rows, p, m=1))]
fn snf(py: Python<'_>, rows: Vec<Vec<i64>>, p: u64, m: u32) -> PyResult<Py<PyAny>> {
    let ring = Zpm::new(p, m).map_err(err)?;
    let a = ZMatrix::from_rows(ring, &rows).map_err(err)?;
    let s = smith_normal_form(&a, Track::NONE);
    #[derive(Serialize)]
    struct Out {
        vals: Vec<u32>,
        rank: usize,
        cokernel_exps: Vec<u32>,
    }
    to_py(py, &Out { cokernel_exps: s.cokernel_exps(), vals: s.vals, rank: s.rank })
}

#[pyfunction]
fn numerology(py: Python<'_>, n: u64, r1: u64, r2: u64) -> PyResult<Py<PyAny>> {
    let s = Signature::new(n, r1, r2).map_err(err)?;
    let inv = invariants(s).map_err(err)?;
    let id = check_infinity_identity(s).map_err(err)?;
    #[derive(Serialize)]
    struct Out {
        #[serde(flatten)]
        inv: core::numerology::Invariants,
        infinity_identity: core::numerology::InfinityIdentity,
    }
    to_py(py, &Out { inv, infinity_identity: id })
}

/// Patch the free tower `Lambda [z]/(z^t)` and verify the conclusions.
#[pyfunction]
#[pyo3(signature = (p, m, q, j, levels, parallel=false))]
fn patch_free(py: Python<'_>, p: u64, m: u32, q: u32, j: u32, levels: u32, parallel: bool) -> PyResult<Py<PyAny>> {
    let tower = TowerConfig::free(p, m, q, j, levels);
    let r = py
        .detach(|| core_patch(&tower, PatchOptions { levels: None, parallel }).and_then(|r| {
            let c = verify_conclusions(&r, &tower, parallel)?;
            Ok((r, c))
        }))
        .map_err(err)?;
    #[derive(Serialize)]
    struct Out<'a> {
        chain_compatible: bool,
        patched: &'a core::patching::PatchedResult,
        conclusions: &'a core::patching::ConclusionReport,
    }
    to_py(py, &Out { chain_compatible: r.0.chain_compatible(), patched: &r.0, conclusions: &r.1 })
}

/// Run a JSON scenario. Returns `(exit_code, report)`.
#[pyfunction]
#[pyo3(signature = (text, command="run", levels=None, parallel=false))]
fn run_scenario(py: Python<'_>, text: &str, command: &str, levels: Option<u32>, parallel: bool) -> PyResult<(i32, Py<PyAny>)> {
    let cmd = Command::parse(command).map_err(err)?;
    let scenario = parse_scenario(text).map_err(err)?;
    let report = py.detach(|| run(&scenario, cmd, RunOptions { levels, parallel }));
    Ok((report.exit_code(), json_loads(py, &report.to_json())?))
}

#[pyfunction]
#[pyo3(signature = (parallel=false))]
fn selfcheck(py: Python<'_>, parallel: bool) -> PyResult<(i32, Py<PyAny>)> {
    let report = py.detach(|| core_selfcheck(RunOptions { levels: None, parallel })).map_err(err)?;
    Ok((report.exit_code(), json_loads(py, &report.to_json())?))
}

#[pymodule]
fn patchlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ring>()?;
    m.add_class::<Complex>()?;
    m.add_function(wrap_pyfunction!(snf, m)?)?;
    m.add_function(wrap_pyfunction!(numerology, m)?)?;
    m.add_function(wrap_pyfunction!(patch_free, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(selfcheck, m)?)?;
    Ok(())
}

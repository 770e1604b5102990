//! Python bindings: monoids, templates, instances and minor conditions, plus the
//! classifier, solvers, regularization and polymorphism searches.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use ::monoid_pcsp as core;
use core::algebra::{Element, DEFAULT_POWER_CAP};
use core::classifier::Verdict;
use core::csp::DEFAULT_BUDGET;
use core::Error;

create_exception!(monoid_pcsp, MonoidPcspError, PyException);
create_exception!(monoid_pcsp, PromiseViolation, MonoidPcspError);
create_exception!(monoid_pcsp, CapExceeded, MonoidPcspError);

fn err(e: Error) -> PyErr {
    match e {
        Error::PromiseViolation => PromiseViolation::new_err(e.to_string()),
        Error::PowerTooLarge { .. } | Error::SearchCapExceeded { .. } | Error::TooLarge(_) | Error::BudgetExceeded(_) => {
            CapExceeded::new_err(e.to_string())
        }
        _ => MonoidPcspError::new_err(e.to_string()),
    }
}

#[pyclass(name = "FiniteMonoid", module = "monoid_pcsp", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMonoid(core::algebra::FiniteMonoid);

#[pymethods]
impl PyMonoid {
    #[new]
    fn new(rows: Vec<Vec<Element>>, identity: Element) -> PyResult<Self> {
        core::algebra::FiniteMonoid::new(rows, identity).map(PyMonoid).map_err(err)
    }

    /// A built-in such as `cyclic:4` or `semilattice:chain:3`.
    #[staticmethod]
    fn by_name(name: &str) -> PyResult<Self> {
        core::algebra::builtins::by_name(name).map(PyMonoid).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::text::parse_monoid(text).map(PyMonoid).map_err(err)
    }

    fn to_text(&self) -> String {
        core::text::monoid_to_string(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    #[getter]
    fn identity(&self) -> Element {
        self.0.identity()
    }

    fn mul(&self, a: Element, b: Element) -> PyResult<Element> {
        let n = self.0.size();
        if a >= n || b >= n {
            return Err(MonoidPcspError::new_err(format!("elements must be below {n}")));
        }
        Ok(self.0.mul(a, b))
    }

    fn is_commutative(&self) -> bool {
        self.0.is_commutative()
    }

    fn is_completely_regular(&self) -> bool {
        self.0.is_completely_regular()
    }

    fn idempotents(&self) -> Vec<Element> {
        self.0.idempotents().to_vec()
    }

    fn green_classes(&self) -> Vec<Vec<Element>> {
        self.0.green_classes()
    }

    fn inverse(&self, a: Element) -> PyResult<Element> {
        self.0.inverse(a).map_err(err)
    }

    fn idempotent_constant(&self) -> usize {
        self.0.idempotent_constant()
    }

    fn minimal_generating_set(&self) -> Vec<Element> {
        self.0.minimal_generating_set()
    }

    fn __repr__(&self) -> String {
        format!("FiniteMonoid(size={})", self.0.size())
    }
}

#[pyclass(name = "Template", module = "monoid_pcsp", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTemplate(core::csp::Template);

#[pymethods]
impl PyTemplate {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::csp::Template::parse(text).map(PyTemplate).map_err(err)
    }

    /// A finite template over `monoid` with the given relation tuples.
    #[staticmethod]
    fn finite(monoid: &PyMonoid, arity: usize, tuples: Vec<Vec<Element>>) -> PyResult<Self> {
        core::csp::FiniteTemplate::new(monoid.0.clone(), arity, tuples)
            .map(|t| PyTemplate(core::csp::Template::Finite(t)))
            .map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn is_finite(&self) -> bool {
        matches!(self.0, core::csp::Template::Finite(_))
    }

    /// The carrier of a finite template.
    fn monoid(&self) -> PyResult<PyMonoid> {
        Ok(PyMonoid(self.0.as_finite().map_err(err)?.monoid().clone()))
    }

    fn tuples(&self) -> PyResult<Vec<Vec<Element>>> {
        Ok(self.0.as_finite().map_err(err)?.tuples().iter().cloned().collect())
    }

    fn __repr__(&self) -> String {
        let kind = if self.is_finite() { "finite" } else { "normal form" };
        format!("Template({kind}, arity={})", self.0.arity())
    }
}

#[pyclass(name = "Instance", module = "monoid_pcsp", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance(core::csp::Instance);

#[pymethods]
impl PyInstance {
    #[new]
    fn new(var_count: usize) -> Self {
        PyInstance(core::csp::Instance::new(var_count))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::csp::Instance::parse(text).map(PyInstance).map_err(err)
    }

    /// Parses the group signature, where `x'` denotes the inverse of `x`.
    #[staticmethod]
    fn parse_group(text: &str) -> PyResult<Self> {
        let g = core::csp::GroupInstance::parse(text).map_err(err)?;
        Ok(PyInstance(core::csp::group_to_monoid(&g)))
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn var_count(&self) -> usize {
        self.0.var_count
    }

    fn product(&mut self, x: usize, y: usize, z: usize) -> PyResult<()> {
        self.check(&[x, y, z])?;
        self.0.product(x, y, z);
        Ok(())
    }

    fn identity(&mut self, x: usize) -> PyResult<()> {
        self.check(&[x])?;
        self.0.identity(x);
        Ok(())
    }

    fn relation(&mut self, xs: Vec<usize>) -> PyResult<()> {
        self.check(&xs)?;
        self.0.relation(&xs);
        Ok(())
    }

    /// `x₁⋯x_k = y₁⋯y_l`, flattened with auxiliary variables.
    fn equation(&mut self, lhs: Vec<usize>, rhs: Vec<usize>) -> PyResult<()> {
        self.check(&lhs)?;
        self.check(&rhs)?;
        self.0.equation(&lhs, &rhs);
        Ok(())
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(vars={}, constraints={})",
            self.0.var_count,
            self.0.constraints.len()
        )
    }
}

impl PyInstance {
    fn check(&self, xs: &[usize]) -> PyResult<()> {
        match xs.iter().find(|&&x| x >= self.0.var_count) {
            Some(x) => Err(MonoidPcspError::new_err(format!("variable {x} out of range"))),
            None => Ok(()),
        }
    }
}

#[pyclass(name = "MinorCondition", module = "monoid_pcsp", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMinorCondition(core::polymorph::MinorCondition);

#[pymethods]
impl PyMinorCondition {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        core::polymorph::MinorCondition::parse(text)
            .map(PyMinorCondition)
            .map_err(err)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn is_trivial(&self) -> bool {
        core::polymorph::is_trivial(&self.0)
    }
}

fn finite(t: &PyTemplate) -> PyResult<&core::csp::FiniteTemplate> {
    t.0.as_finite().map_err(err)
}

/// Classification of `PCSP(lhs, rhs)`: a dict with `verdict` (`"TRACTABLE"` or
/// `"NP-HARD"`), `candidates`, and for tractable templates `witness` and `sandwich_valid`.
/// Raises `PromiseViolation` when no homomorphism `lhs → rhs` exists.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, via_abreg = false))]
fn classify<'py>(py: Python<'py>, lhs: &PyTemplate, rhs: &PyTemplate, via_abreg: bool) -> PyResult<Bound<'py, pyo3::types::PyDict>> {
    use pyo3::types::PyDictMethods;
    let rhs = finite(rhs)?;
    let c = if via_abreg {
        core::classifier::classify_via_abreg(finite(lhs)?, rhs)
    } else {
        core::classifier::classify(&lhs.0, rhs)
    }
    .map_err(err)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("verdict", c.verdict.to_string())?;
    out.set_item("candidates", c.candidates)?;
    if c.verdict == Verdict::Tractable {
        out.set_item("witness", c.witness.as_ref().map(ToString::to_string))?;
        out.set_item("sandwich_valid", core::classifier::sandwich_check(&c, &lhs.0, rhs))?;
    }
    Ok(out)
}

/// Polynomial-time solver for coset templates. Finite templates give element indices;
/// normal-form templates give `(d, v)` pairs. `None` means unsatisfiable.
#[pyfunction]
fn solve<'py>(py: Python<'py>, template: &PyTemplate, instance: &PyInstance) -> PyResult<Option<Bound<'py, PyAny>>> {
    match &template.0 {
        core::csp::Template::Finite(t) => {
            let sol = core::solver::solve_finite_tractable(t, &instance.0).map_err(err)?;
            sol.map(|a| a.into_pyobject(py).map(Bound::into_any)).transpose()
        }
        core::csp::Template::NormalForm(t) => {
            let sol = core::solver::solve_tractable(t, &instance.0).map_err(err)?;
            sol.map(|a| {
                let pairs: Vec<(Element, Vec<BigInt>)> = a.into_iter().map(|x| (x.d, x.v)).collect();
                pairs.into_pyobject(py).map(Bound::into_any)
            })
            .transpose()
        }
    }
}

/// Exhaustive search over a finite template.
#[pyfunction]
#[pyo3(signature = (template, instance, budget = DEFAULT_BUDGET))]
fn oracle(template: &PyTemplate, instance: &PyInstance, budget: u64) -> PyResult<Option<Vec<Element>>> {
    core::csp::oracle_solve(finite(template)?, &instance.0, budget).map_err(err)
}

/// The commutative regularization: the quotient monoid and its classes.
#[pyfunction]
fn ab_reg(monoid: &PyMonoid) -> (PyMonoid, Vec<Vec<Element>>) {
    let q = core::regularize::ab_reg(&monoid.0);
    (PyMonoid(q.quotient().clone()), q.classes())
}

/// The finite template with its relation replaced by the coset closure.
#[pyfunction]
fn coset_closure(template: &PyTemplate) -> PyResult<PyTemplate> {
    let t = finite(template)?;
    let closed = core::cosets::tuple_coset_closure(t.monoid(), t.tuples()).map_err(err)?;
    core::csp::FiniteTemplate::new(t.monoid().clone(), t.arity(), closed)
        .map(|t| PyTemplate(core::csp::Template::Finite(t)))
        .map_err(err)
}

/// Components of a 2-block symmetric polymorphism of the given odd arity, or `None`.
#[pyfunction]
#[pyo3(signature = (lhs, rhs, arity, cap = DEFAULT_POWER_CAP))]
fn find_block_symmetric(lhs: &PyTemplate, rhs: &PyTemplate, arity: usize, cap: usize) -> PyResult<Option<Vec<String>>> {
    if arity.is_multiple_of(2) {
        return Err(MonoidPcspError::new_err("2-block symmetric arities are odd"));
    }
    let f = core::polymorph::find_block_symmetric(&lhs.0, finite(rhs)?, arity / 2, cap).map_err(err)?;
    Ok(f.map(|f| f.components().iter().map(ToString::to_string).collect()))
}

/// Reduces a minor condition to an instance of `PCSP(lhs, rhs)`.
#[pyfunction]
#[pyo3(signature = (condition, lhs, rhs, arity, cap = DEFAULT_POWER_CAP))]
fn pmc_reduce(
    condition: &PyMinorCondition,
    lhs: &PyTemplate,
    rhs: &PyTemplate,
    arity: usize,
    cap: usize,
) -> PyResult<PyInstance> {
    core::polymorph::pmc_reduce(&condition.0, finite(lhs)?, finite(rhs)?, arity, cap)
        .map(PyInstance)
        .map_err(err)
}

#[pymodule]
fn monoid_pcsp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("MonoidPcspError", py.get_type::<MonoidPcspError>())?;
    m.add("PromiseViolation", py.get_type::<PromiseViolation>())?;
    m.add("CapExceeded", py.get_type::<CapExceeded>())?;
    m.add_class::<PyMonoid>()?;
    m.add_class::<PyTemplate>()?;
    m.add_class::<PyInstance>()?;
    m.add_class::<PyMinorCondition>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(ab_reg, m)?)?;
    m.add_function(wrap_pyfunction!(coset_closure, m)?)?;
    m.add_function(wrap_pyfunction!(find_block_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(pmc_reduce, m)?)?;
    Ok(())
}

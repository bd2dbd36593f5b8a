//! Python bindings. Rationals cross the boundary as strings such as `"-3/4"`,
//! and `+inf` costs as the string `"+inf"`.

use plhvcsp::blp::{extract_assignment, solve_blp_with, solve_decide, SolveOptions};
use plhvcsp::document::{parse_problem, Document, Problem as CoreProblem};
use plhvcsp::fpol::{increasing_witness, submodularity_witness};
use plhvcsp::lp::{LinearProgram as CoreLp, LpStatus, Pricing, Relation};
use plhvcsp::oracle::{q_decide, q_infimum, Infimum, DEFAULT_MAX_SELECTIONS};
use plhvcsp::qnum::Rational;
use plhvcsp::sampling::{build_sample, build_sample_for, Sample as CoreSample, SampleOptions};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: plhvcsp::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(s: &str) -> PyResult<Rational> {
    s.parse().map_err(py_err)
}

fn pricing(name: &str) -> PyResult<Pricing> {
    match name {
        "bland" => Ok(Pricing::Bland),
        "dantzig" => Ok(Pricing::Dantzig),
        _ => Err(PyValueError::new_err(format!("unknown pricing rule {name:?}"))),
    }
}

fn sample_options(d: Option<usize>, value_atoms: bool) -> SampleOptions {
    SampleOptions { d, value_atoms, ..SampleOptions::default() }
}

/// A valued structure with an optional instance, read from the JSON document
/// format used by the command line tool.
#[pyclass(module = "plhvcsp_py", frozen)]
struct Problem {
    inner: CoreProblem,
}

#[pymethods]
impl Problem {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Problem { inner: parse_problem(text).map_err(py_err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| PyValueError::new_err(format!("cannot read {path}: {e}")))?;
        Self::from_json(&text)
    }

    fn to_json(&self) -> String {
        let doc = Document::from_problem(&self.inner.structure, self.inner.instance.as_ref());
        serde_json::to_string_pretty(&doc).expect("documents serialise")
    }

    #[getter]
    fn functions(&self) -> Vec<(String, usize)> {
        self.inner.structure.functions.iter().map(|(k, f)| (k.clone(), f.arity())).collect()
    }

    #[getter]
    fn variables(&self) -> Vec<String> {
        self.inner.instance.as_ref().map(|i| i.variables.clone()).unwrap_or_default()
    }

    #[getter]
    fn threshold(&self) -> Option<String> {
        self.inner.instance.as_ref().and_then(|i| i.threshold.as_ref()).map(|u| u.to_string())
    }

    /// Sampling plus relaxation decision at `threshold`, or at the threshold
    /// stored in the document.
    #[pyo3(signature = (threshold=None, pricing="bland", witness=false, d=None, value_atoms=false))]
    fn solve(&self, threshold: Option<&str>, pricing: &str, witness: bool, d: Option<usize>, value_atoms: bool) -> PyResult<Decision> {
        let inst = self.inner.instance().map_err(py_err)?;
        let u = match threshold {
            Some(s) => rational(s)?,
            None => inst.threshold.clone().ok_or_else(|| PyValueError::new_err("no threshold given"))?,
        };
        let rule = self::pricing(pricing)?;
        let opts = SolveOptions { sample: sample_options(d, value_atoms), pricing: rule };
        let inst = inst.with_threshold(Some(u.clone()));
        let dec = solve_decide(&self.inner.structure, &inst, &opts).map_err(py_err)?;
        let assignment = if witness && dec.accept {
            let a = extract_assignment(&inst, &dec.sample.structure, &u, rule).map_err(py_err)?;
            Some(a.iter().map(|&i| dec.sample.structure.domain[i].to_string()).collect())
        } else {
            None
        };
        Ok(Decision {
            accept: dec.accept,
            threshold: u.to_string(),
            blp_value: dec.blp_value.to_string(),
            blp_relation: dec.blp_bound.symbol().to_string(),
            sample_size: dec.sample.structure.size(),
            eps: dec.sample.domain.eps.to_string(),
            witness: assignment,
        })
    }

    /// Relaxation value over the instance's sample.
    #[pyo3(signature = (pricing="bland", d=None, value_atoms=false))]
    fn blp(&self, pricing: &str, d: Option<usize>, value_atoms: bool) -> PyResult<String> {
        let inst = self.inner.instance().map_err(py_err)?;
        let s = build_sample_for(&self.inner.structure, inst, None, &sample_options(d, value_atoms)).map_err(py_err)?;
        Ok(solve_blp_with(inst, &s.structure, self::pricing(pricing)?).map_err(py_err)?.value.to_string())
    }

    /// Exact decision over the rationals by enumerating piece selections.
    /// Returns the witness point when one exists.
    fn oracle(&self, threshold: &str) -> PyResult<(bool, Option<Vec<String>>)> {
        let inst = self.inner.instance().map_err(py_err)?;
        let d = q_decide(&self.inner.structure, inst, &rational(threshold)?, DEFAULT_MAX_SELECTIONS).map_err(py_err)?;
        Ok((d.accept, d.witness.map(|w| w.iter().map(|v| v.to_string()).collect())))
    }

    /// `("attained", v)`, `("not attained", v)`, `("-inf", None)` or
    /// `("infeasible", None)`.
    fn infimum(&self) -> PyResult<(String, Option<String>)> {
        let inst = self.inner.instance().map_err(py_err)?;
        Ok(match q_infimum(&self.inner.structure, inst, DEFAULT_MAX_SELECTIONS).map_err(py_err)? {
            Infimum::Attained(v) => ("attained".into(), Some(v.to_string())),
            Infimum::NotAttained(v) => ("not attained".into(), Some(v.to_string())),
            Infimum::MinusInfinity => ("-inf".into(), None),
            Infimum::Infeasible => ("infeasible".into(), None),
        })
    }

    /// The finite sample for the instance, or for `d` variables when the
    /// document has no instance.
    #[pyo3(signature = (d=None, value_atoms=false))]
    fn sample(&self, d: Option<usize>, value_atoms: bool) -> PyResult<Sample> {
        let opts = sample_options(d, value_atoms);
        let s = match &self.inner.instance {
            Some(inst) => build_sample_for(&self.inner.structure, inst, None, &opts),
            None => build_sample(&self.inner.structure, d.unwrap_or(1), &opts),
        };
        Ok(Sample { inner: s.map_err(py_err)? })
    }
}

#[pyclass(module = "plhvcsp_py", frozen, get_all)]
struct Decision {
    accept: bool,
    threshold: String,
    blp_value: String,
    /// `=` for the optimum, `<=` or `>=` for a bound.
    blp_relation: String,
    sample_size: usize,
    eps: String,
    witness: Option<Vec<String>>,
}

#[pymethods]
impl Decision {
    fn __repr__(&self) -> String {
        format!("Decision(accept={}, threshold={}, blp_value={})", self.accept, self.threshold, self.blp_value)
    }
}

#[pyclass(module = "plhvcsp_py", frozen)]
struct Sample {
    inner: CoreSample,
}

#[pymethods]
impl Sample {
    #[getter]
    fn domain(&self) -> Vec<String> {
        self.inner.structure.domain.iter().map(|v| v.to_string()).collect()
    }

    #[getter]
    fn eps(&self) -> String {
        self.inner.domain.eps.to_string()
    }

    fn __len__(&self) -> usize {
        self.inner.structure.size()
    }

    /// Row-major cost table of `name`, the last argument varying fastest.
    fn table(&self, name: &str) -> PyResult<Vec<String>> {
        let t = self.inner.structure.get(name).ok_or_else(|| PyValueError::new_err(format!("no function {name:?}")))?;
        Ok(t.values().iter().map(|v| v.to_string()).collect())
    }

    /// First pair of argument tuples breaking submodularity, as domain values.
    fn submodularity_witness(&self) -> Option<(String, Vec<String>, Vec<String>)> {
        self.witness(submodularity_witness)
    }

    fn increasing_witness(&self) -> Option<(String, Vec<String>, Vec<String>)> {
        self.witness(increasing_witness)
    }
}

impl Sample {
    fn witness(
        &self,
        find: fn(&plhvcsp::table::CostTable) -> Option<(Vec<usize>, Vec<usize>)>,
    ) -> Option<(String, Vec<String>, Vec<String>)> {
        let dom = &self.inner.structure.domain;
        let show = |t: Vec<usize>| t.into_iter().map(|i| dom[i].to_string()).collect();
        self.inner.structure.tables.iter().find_map(|(name, t)| find(t).map(|(a, b)| (name.clone(), show(a), show(b))))
    }
}

/// Exact rational linear program, minimised.
#[pyclass(module = "plhvcsp_py")]
#[derive(Default)]
struct LinearProgram {
    inner: CoreLp,
}

#[pymethods]
impl LinearProgram {
    #[new]
    fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with optional bounds and returns its index.
    #[pyo3(signature = (name, lower=Some("0"), upper=None))]
    fn add_variable(&mut self, name: &str, lower: Option<&str>, upper: Option<&str>) -> PyResult<usize> {
        let lo = lower.map(rational).transpose()?;
        let hi = upper.map(rational).transpose()?;
        Ok(self.inner.add_variable(name, lo, hi))
    }

    fn set_objective(&mut self, var: usize, coeff: &str) -> PyResult<()> {
        self.check(var)?;
        self.inner.set_objective(var, rational(coeff)?);
        Ok(())
    }

    /// `sum coeffs rel rhs` with `rel` one of `<=`, `>=`, `=`.
    fn add_constraint(&mut self, coeffs: Vec<(usize, String)>, rel: &str, rhs: &str) -> PyResult<()> {
        let rel = match rel {
            "<=" => Relation::Le,
            ">=" => Relation::Ge,
            "=" | "==" => Relation::Eq,
            _ => return Err(PyValueError::new_err(format!("unknown relation {rel:?}"))),
        };
        let mut row = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            self.check(v)?;
            row.push((v, rational(&c)?));
        }
        self.inner.add_constraint(row, rel, rational(rhs)?);
        Ok(())
    }

    /// `(status, value, point)`; status is `optimal`, `infeasible` or
    /// `unbounded`.
    #[pyo3(signature = (pricing="bland"))]
    fn solve(&self, pricing: &str) -> PyResult<(String, Option<String>, Vec<String>)> {
        let sol = self.inner.solve_with(self::pricing(pricing)?);
        let status = match sol.status {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
            LpStatus::TargetReached | LpStatus::AboveTarget => unreachable!("no target was set"),
        };
        Ok((status.into(), sol.value.map(|v| v.to_string()), sol.point.iter().map(|v| v.to_string()).collect()))
    }

    fn dump(&self) -> String {
        self.inner.dump()
    }
}

impl LinearProgram {
    fn check(&self, var: usize) -> PyResult<()> {
        if var < self.inner.num_vars() {
            Ok(())
        } else {
            Err(PyValueError::new_err(format!("no variable {var}")))
        }
    }
}

#[pymodule]
fn plhvcsp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Decision>()?;
    m.add_class::<Sample>()?;
    m.add_class::<LinearProgram>()?;
    Ok(())
}

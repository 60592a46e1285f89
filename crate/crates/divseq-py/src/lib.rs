//! Python bindings: exact rational function arithmetic, place registries,
//! and the divisor sequence pipelines.
//!
//! Structured results cross the boundary as JSON strings with the same
//! shapes the command-line front end writes, so Python callers can
//! `json.loads` them without a schema of their own.  All inputs are plain
//! strings in the expression syntax (`"(t^2 - 1)/(t - 1)"`); outputs use
//! the canonical printed form, which parses back to the same value.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use divseq::ellff::{ec_nontorsion_certificate, ec_sequence, Certificate, EllCurveFF, EllPointFF};
use divseq::error::Error;
use divseq::mulgrp::{gm_sequence, mult_independent, GmPoint, IndependenceMode};
use divseq::parse::{parse_poly, parse_ratfun};
use divseq::seqlab::{
    analyze, int_gcd_sequence as int_gcd_seq, mixed_sequence, pq_bound_check,
    sequence_report_json,
};
use divseq::{Place, PlaceRegistry, RationalFunction};

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ratfun(src: &str) -> PyResult<RationalFunction> {
    parse_ratfun(src).map_err(to_py)
}

fn ratfuns(srcs: &[String]) -> PyResult<Vec<RationalFunction>> {
    srcs.iter().map(|s| ratfun(s)).collect()
}

fn curve_from(ai: &[String]) -> PyResult<EllCurveFF> {
    if ai.len() != 5 {
        return Err(PyValueError::new_err(
            "a_invariants takes exactly five entries: a1, a2, a3, a4, a6",
        ));
    }
    let v = ratfuns(ai)?;
    EllCurveFF::new(
        v[0].clone(),
        v[1].clone(),
        v[2].clone(),
        v[3].clone(),
        v[4].clone(),
    )
    .map_err(to_py)
}

fn point_from(p: &(String, String)) -> PyResult<EllPointFF> {
    Ok(EllPointFF::affine(ratfun(&p.0)?, ratfun(&p.1)?))
}

fn dumps(v: serde_json::Value) -> String {
    serde_json::to_string(&v).expect("report serializes")
}

/// A reduced rational function in t over Q.
#[pyclass(frozen)]
struct RatFun {
    inner: RationalFunction,
}

impl RatFun {
    fn wrap(inner: RationalFunction) -> Self {
        RatFun { inner }
    }
}

#[pymethods]
impl RatFun {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        Ok(Self::wrap(ratfun(src)?))
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("RatFun(\"{}\")", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __add__(&self, other: &Self) -> Self {
        Self::wrap(&self.inner + &other.inner)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self::wrap(&self.inner - &other.inner)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self::wrap(&self.inner * &other.inner)
    }

    fn __truediv__(&self, other: &Self) -> PyResult<Self> {
        self.inner.try_div(&other.inner).map(Self::wrap).map_err(to_py)
    }

    fn __pow__(&self, e: i64, modulo: Option<i64>) -> PyResult<Self> {
        if modulo.is_some() {
            return Err(PyValueError::new_err("modular powers are not defined"));
        }
        self.inner.pow_i(e).map(Self::wrap).map_err(to_py)
    }

    fn numerator(&self) -> String {
        self.inner.num().to_string()
    }

    fn denominator(&self) -> String {
        self.inner.den().to_string()
    }

    /// Value at t = q, where q is a rational like "3" or "-5/2".
    fn eval(&self, q: &str) -> PyResult<String> {
        let q: divseq::Rat = q
            .parse()
            .map_err(|e| PyValueError::new_err(format!("rational value: {e}")))?;
        self.inner
            .eval(&q)
            .map(|v| v.to_string())
            .ok_or_else(|| PyValueError::new_err(format!("pole at t = {q}")))
    }

    /// self^n - 1 in one reduction, the torus building block.
    fn pow_minus_one(&self, n: u64) -> PyResult<Self> {
        self.inner.pow_minus(n, None).map(Self::wrap).map_err(to_py)
    }

    fn ord_at_infinity(&self) -> PyResult<i64> {
        self.inner.ord_at_infinity().map_err(to_py)
    }
}

/// Mutable store of closed points of P^1, refined as functions come in.
#[pyclass]
struct Registry {
    inner: PlaceRegistry,
}

#[pymethods]
impl Registry {
    #[new]
    fn new() -> Self {
        Registry {
            inner: PlaceRegistry::new(),
        }
    }

    fn generation(&self) -> u64 {
        self.inner.generation()
    }

    /// Factors a polynomial over the clusters, splitting as needed; returns
    /// (label, multiplicity) pairs.
    fn refine(&mut self, poly: &str) -> PyResult<Vec<(String, u32)>> {
        let p = parse_poly(poly).map_err(to_py)?;
        let parts = self.inner.refine(&p).map_err(to_py)?;
        Ok(parts
            .into_iter()
            .map(|(place, mult)| (self.inner.place_label(place), mult))
            .collect())
    }

    /// Divisor of zeros of a function as JSON, refining first.
    fn zero_divisor(&mut self, f: &str) -> PyResult<String> {
        let f = ratfun(f)?;
        let d = self.inner.zero_divisor(&f).map_err(to_py)?;
        Ok(dumps(d.to_json(&self.inner)))
    }

    /// Order of vanishing at the place with this label ("infinity" included).
    fn ord_at(&self, f: &str, label: &str) -> PyResult<i64> {
        let f = ratfun(f)?;
        let place = if label == "infinity" {
            Place::Infinity
        } else {
            self.inner
                .live_indices()
                .into_iter()
                .map(Place::Finite)
                .find(|&p| self.inner.place_label(p) == label)
                .ok_or_else(|| PyValueError::new_err(format!("no live place `{label}`")))?
        };
        self.inner.ord_at(&f, place).map_err(to_py)
    }
}

/// Monic gcd of two polynomials, in canonical printed form.
#[pyfunction]
fn poly_gcd(a: &str, b: &str) -> PyResult<String> {
    let pa = parse_poly(a).map_err(to_py)?;
    let pb = parse_poly(b).map_err(to_py)?;
    Ok(divseq::gcd::poly_gcd(&pa, &pb).to_string())
}

/// Full report for a torus point, against the identity or a second point.
#[pyfunction]
#[pyo3(signature = (coords, nmax, q_coords=None, window=None))]
fn gm_report(
    coords: Vec<String>,
    nmax: u64,
    q_coords: Option<Vec<String>>,
    window: Option<u32>,
) -> PyResult<String> {
    let p = GmPoint::new(ratfuns(&coords)?).map_err(to_py)?;
    let q = match &q_coords {
        Some(srcs) => Some(GmPoint::new(ratfuns(srcs)?).map_err(to_py)?),
        None => None,
    };
    let mut reg = PlaceRegistry::new();
    let seq = gm_sequence(&p, q.as_ref(), nmax, &mut reg).map_err(to_py)?;
    let report = analyze(&seq, q.is_none(), window, Vec::new()).map_err(to_py)?;
    let check = pq_bound_check(&seq, window).map_err(to_py)?;
    Ok(dumps(sequence_report_json(&report, &check, &reg)))
}

/// Full report for a section of an elliptic curve over Q(t).
#[pyfunction]
#[pyo3(signature = (a_invariants, point, nmax, q_point=None, window=None))]
fn ec_report(
    a_invariants: Vec<String>,
    point: (String, String),
    nmax: u64,
    q_point: Option<(String, String)>,
    window: Option<u32>,
) -> PyResult<String> {
    let curve = curve_from(&a_invariants)?;
    let p = point_from(&point)?;
    let q = q_point.as_ref().map(point_from).transpose()?;
    let mut reg = PlaceRegistry::new();
    let (seq, tags) = ec_sequence(&curve, &p, q.as_ref(), nmax, &mut reg).map_err(to_py)?;
    let report = analyze(&seq, q.is_none(), window, tags).map_err(to_py)?;
    let check = pq_bound_check(&seq, window).map_err(to_py)?;
    Ok(dumps(sequence_report_json(&report, &check, &reg)))
}

/// Coordinates of nP as canonical strings, or None for the identity.
#[pyfunction]
fn ec_multiple(
    a_invariants: Vec<String>,
    point: (String, String),
    n: u64,
) -> PyResult<Option<(String, String)>> {
    let curve = curve_from(&a_invariants)?;
    let p = point_from(&point)?;
    let q = curve.mul(n, &p).map_err(to_py)?;
    Ok(q.coordinates().map(|(x, y)| (x.to_string(), y.to_string())))
}

/// Torsion status of a section: nontorsion witness, exact order, or
/// inconclusive, as JSON.
#[pyfunction]
#[pyo3(signature = (a_invariants, point, trials=8, seed=0))]
fn nontorsion_certificate(
    a_invariants: Vec<String>,
    point: (String, String),
    trials: u32,
    seed: u64,
) -> PyResult<String> {
    let curve = curve_from(&a_invariants)?;
    let p = point_from(&point)?;
    let v = match ec_nontorsion_certificate(&curve, &p, trials, seed).map_err(to_py)? {
        Certificate::NonTorsion { witness } => serde_json::json!({
            "verdict": "nontorsion",
            "witness": witness.to_string(),
        }),
        Certificate::TorsionOrder(k) => serde_json::json!({
            "verdict": "torsion",
            "order": k,
        }),
        Certificate::Inconclusive { tried } => serde_json::json!({
            "verdict": "inconclusive",
            "tried": tried,
        }),
    };
    Ok(dumps(v))
}

/// Report for the product of an elliptic section with a torus coordinate.
#[pyfunction]
#[pyo3(signature = (a_invariants, point, f, nmax, window=None))]
fn mixed_report(
    a_invariants: Vec<String>,
    point: (String, String),
    f: &str,
    nmax: u64,
    window: Option<u32>,
) -> PyResult<String> {
    let curve = curve_from(&a_invariants)?;
    let p = point_from(&point)?;
    let f = ratfun(f)?;
    let mut reg = PlaceRegistry::new();
    let (seq, tags) = mixed_sequence(&curve, &p, &f, nmax, &mut reg).map_err(to_py)?;
    let report = analyze(&seq, true, window, tags).map_err(to_py)?;
    let check = pq_bound_check(&seq, window).map_err(to_py)?;
    Ok(dumps(sequence_report_json(&report, &check, &reg)))
}

/// Multiplicative independence verdict as JSON.
#[pyfunction]
#[pyo3(signature = (coords, mode="exact"))]
fn independence(coords: Vec<String>, mode: &str) -> PyResult<String> {
    let fs = ratfuns(&coords)?;
    let mode = match mode {
        "exact" => IndependenceMode::Exact,
        "modulo-constants" => IndependenceMode::ModuloConstants,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode `{other}`; expected exact or modulo-constants"
            )))
        }
    };
    let verdict = mult_independent(&fs, mode).map_err(to_py)?;
    Ok(dumps(verdict.to_json()))
}

/// gcd(a^n - 1, b^n - 1) for n = 1..=nmax, with summary statistics, as JSON.
#[pyfunction]
#[pyo3(signature = (a, b, nmax, window=None))]
fn int_gcd_sequence(a: u64, b: u64, nmax: u32, window: Option<u32>) -> PyResult<String> {
    let report = int_gcd_seq(a, b, nmax, window).map_err(to_py)?;
    Ok(dumps(report.to_json()))
}

#[pymodule]
fn divseq_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<RatFun>()?;
    m.add_class::<Registry>()?;
    m.add_function(wrap_pyfunction!(poly_gcd, m)?)?;
    m.add_function(wrap_pyfunction!(gm_report, m)?)?;
    m.add_function(wrap_pyfunction!(ec_report, m)?)?;
    m.add_function(wrap_pyfunction!(ec_multiple, m)?)?;
    m.add_function(wrap_pyfunction!(nontorsion_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(mixed_report, m)?)?;
    m.add_function(wrap_pyfunction!(independence, m)?)?;
    m.add_function(wrap_pyfunction!(int_gcd_sequence, m)?)?;
    Ok(())
}

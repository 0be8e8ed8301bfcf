use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};

use spg2ssg::bounds::{bounds_report, sink_reach_lower_bound, worst_case_mc};
use spg2ssg::examples::running_example;
use spg2ssg::io::{parse, serialize, to_dot};
use spg2ssg::rational::{format_exact, parse_exact};
use spg2ssg::reduction::{bar, hat, reduce_game};
use spg2ssg::solvers::{
    oracle_values, pair_value, separation_check, strategy_iteration, value_iteration,
    verify_transfer, ViOptions, DEFAULT_CAP,
};
use spg2ssg::{
    default_alpha, max_denominator, reach_probability, AlphaSchedule, Player, PureStrategy,
    Rational, VertexId,
};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_exact(r),))
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_exact(&obj.str()?.to_string()).map_err(err)
}

/// A stochastic game: parity or reachability objective.
#[pyclass(name = "Game", module = "spg2ssg_py", from_py_object)]
#[derive(Clone)]
struct PyGame {
    inner: spg2ssg::Game,
}

#[pymethods]
impl PyGame {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGame { inner: parse(text).map_err(err)? })
    }

    #[staticmethod]
    fn running_example() -> Self {
        PyGame { inner: running_example() }
    }

    #[pyo3(signature = (approx = false))]
    fn to_json(&self, approx: bool) -> String {
        serialize(&self.inner, approx)
    }

    fn to_dot(&self) -> String {
        to_dot(&self.inner)
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.inner.arena.num_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.arena.num_edges()
    }

    #[getter]
    fn is_parity(&self) -> bool {
        self.inner.objective.priorities().is_some()
    }

    fn validate(&self) -> Vec<String> {
        self.inner.validate().iter().map(|v| v.to_string()).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Game({} vertices, {} edges, {})",
            self.num_vertices(),
            self.num_edges(),
            if self.is_parity() { "parity" } else { "reachability" }
        )
    }
}

/// Output of the gadget reduction.
#[pyclass(name = "Reduction", module = "spg2ssg_py")]
struct PyReduction {
    inner: spg2ssg::ReductionOutput,
}

#[pymethods]
impl PyReduction {
    #[getter]
    fn game(&self) -> PyGame {
        PyGame { inner: self.inner.ssg.clone() }
    }

    #[getter]
    fn v_win(&self) -> usize {
        self.inner.v_win.0
    }

    #[getter]
    fn v_lose(&self) -> usize {
        self.inner.v_lose.0
    }

    fn bar(&self, v: usize) -> usize {
        bar(VertexId(v)).0
    }

    fn hat(&self, v: usize) -> usize {
        hat(VertexId(v)).0
    }
}

/// `None` is the default schedule; a list gives α_0, α_1, ...; a pair
/// `(first, ratio)` gives a geometric schedule. Entries may be strings,
/// ints or `Fraction`s.
fn schedule(game: &spg2ssg::Game, alpha: Option<&Bound<'_, PyAny>>) -> PyResult<AlphaSchedule> {
    let Some(a) = alpha else {
        return Ok(default_alpha(game.arena.num_vertices(), &max_denominator(&game.arena)));
    };
    if let Ok(t) = a.cast::<PyTuple>() {
        if t.len() != 2 {
            return Err(err("a geometric schedule is a (first, ratio) pair"));
        }
        return Ok(AlphaSchedule::geometric(rational(&t.get_item(0)?)?, rational(&t.get_item(1)?)?));
    }
    let list = a.cast::<PyList>().map_err(|_| err("alpha must be None, a list or a pair"))?;
    let values = list.iter().map(|x| rational(&x)).collect::<PyResult<Vec<_>>>()?;
    Ok(AlphaSchedule::table(values))
}

#[pyfunction]
#[pyo3(signature = (game, alpha = None))]
fn reduce(game: &PyGame, alpha: Option<&Bound<'_, PyAny>>) -> PyResult<PyReduction> {
    let a = schedule(&game.inner, alpha)?;
    Ok(PyReduction { inner: reduce_game(&game.inner, &a).map_err(err)? })
}

fn strategy_dict<'py>(py: Python<'py>, s: &PureStrategy) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    for (u, v) in s.pairs() {
        d.set_item(u.0, v.0)?;
    }
    Ok(d)
}

/// Solves a game. `method` is "oracle", "si" or "vi"; exact methods return
/// `Fraction` values, value iteration returns floats.
#[pyfunction]
#[pyo3(signature = (game, method = "oracle", tol = 1e-12, max_iters = 1_000_000))]
fn solve<'py>(
    py: Python<'py>,
    game: &PyGame,
    method: &str,
    tol: f64,
    max_iters: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let g = &game.inner;
    let r = match method {
        "oracle" => oracle_values(g, DEFAULT_CAP).map_err(err)?.result,
        "si" => strategy_iteration(g).map_err(err)?,
        "vi" => value_iteration(g, ViOptions { tolerance: tol, max_iters }).map_err(err)?,
        other => return Err(err(format!("unknown method {other:?}"))),
    };
    let out = PyDict::new(py);
    match r.values.exact() {
        Some(xs) => {
            let vals = xs.iter().map(|x| fraction(py, x)).collect::<PyResult<Vec<_>>>()?;
            out.set_item("values", vals)?;
        }
        None => out.set_item("values", r.values.to_f64())?,
    }
    out.set_item("eve", strategy_dict(py, &r.eve_strategy)?)?;
    out.set_item("adam", strategy_dict(py, &r.adam_strategy)?)?;
    out.set_item("iterations", r.iterations)?;
    Ok(out)
}

fn to_strategy(game: &spg2ssg::Game, player: Player, d: &BTreeMap<usize, usize>) -> PyResult<PureStrategy> {
    let n = game.arena.num_vertices();
    let s = PureStrategy::from_pairs(player, n, d.iter().map(|(u, v)| (VertexId(*u), VertexId(*v))));
    s.check(&game.arena).map_err(err)?;
    Ok(s)
}

/// Exact values of one strategy pair, given as `{vertex: successor}` maps.
#[pyfunction]
fn strategy_pair_value<'py>(
    py: Python<'py>,
    game: &PyGame,
    eve: BTreeMap<usize, usize>,
    adam: BTreeMap<usize, usize>,
) -> PyResult<Vec<Bound<'py, PyAny>>> {
    let g = &game.inner;
    let sigma = to_strategy(g, Player::Eve, &eve)?;
    let gamma = to_strategy(g, Player::Adam, &adam)?;
    pair_value(g, &sigma, &gamma).iter().map(|x| fraction(py, x)).collect()
}

#[pyfunction]
fn bounds<'py>(py: Python<'py>, game: &PyGame) -> PyResult<Bound<'py, PyDict>> {
    let r = bounds_report(&game.inner.arena).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", r.n)?;
    d.set_item("M", fraction(py, &Rational::from_integer(r.m.clone()))?)?;
    for (k, v) in [
        ("delta_min", &r.delta_min),
        ("epsilon", &r.epsilon),
        ("alpha0_max", &r.alpha0_max),
        ("ratio_max", &r.ratio_max),
        ("crosspath_threshold", &r.crosspath_threshold),
        ("win_threshold", &r.win_threshold),
    ] {
        d.set_item(k, fraction(py, v)?)?;
    }
    Ok(d)
}

/// Whether every strategy optimal in the reduced game is optimal in the
/// parity game.
#[pyfunction]
#[pyo3(signature = (game, alpha = None))]
fn verify(game: &PyGame, alpha: Option<&Bound<'_, PyAny>>) -> PyResult<bool> {
    let a = schedule(&game.inner, alpha)?;
    Ok(verify_transfer(&game.inner, &a, DEFAULT_CAP).map_err(err)?.holds())
}

#[pyfunction]
fn separation(game: &PyGame) -> PyResult<bool> {
    Ok(separation_check(&game.inner, DEFAULT_CAP).map_err(err)?.holds())
}

/// Exact reach probability of the worst-case chain and its closed-form bound.
#[pyfunction]
fn worst_case<'py>(
    py: Python<'py>,
    m: usize,
    s: &Bound<'py, PyAny>,
    alpha: &Bound<'py, PyAny>,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let (s, alpha) = (rational(s)?, rational(alpha)?);
    let (mc, lay) = worst_case_mc(m, &s, &alpha).map_err(err)?;
    let reach = reach_probability(&mc, &[lay.good_sink()].into_iter().collect()).map_err(err)?;
    let t = Rational::from_integer(1.into()) - &alpha - &s;
    let bound = sink_reach_lower_bound(m, &s, &t, &s, &alpha);
    Ok((fraction(py, &reach[lay.line(1)])?, fraction(py, &bound)?))
}

#[pymodule]
fn spg2ssg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PyReduction>()?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(strategy_pair_value, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(separation, m)?)?;
    m.add_function(wrap_pyfunction!(worst_case, m)?)?;
    Ok(())
}

//! Python bindings. Thin wrappers over the core types plus a few
//! whole-pipeline helpers (simulate, generate_dataset, leak_check); all
//! randomness takes explicit seeds so Python-side runs reproduce exactly.

use std::path::PathBuf;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mxbench::dataset::leak::check_dataset;
use mxbench::dataset::{
    materialize, plan_dataset, BuildMethod, DatasetSpec, ExtrapolationAxis, ExtrapolationMode,
    SplitCounts,
};
use mxbench::dynamics::{sample_initial_conditions, simulate as run_simulation, SimConfig};
use mxbench::multiplex::{basis_sets_for, enumerate_multiplex, sparse_half, IsoClass};
use mxbench::priority::{FloorSpec, PrioritySampler as CorePrioritySampler};
use mxbench::sampling::{
    class_probabilities, rank_frequency, rational_to_f64, sample_network, SamplingModel,
};
use mxbench::{Error, GraphKind, IsoClassCatalog, LabeledGraph, MultiplexNetwork, Permutation};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Verification(_) | Error::ResourceLimit(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// One network layer: an arbitrary simple graph (pairwise) or a clique on a
/// charged vertex subset (collective).
#[pyclass(frozen, from_py_object)]
#[derive(Clone)]
struct Graph {
    inner: LabeledGraph,
}

#[pymethods]
impl Graph {
    #[staticmethod]
    fn pairwise(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Graph {
            inner: LabeledGraph::pairwise(n, &edges).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn collective(n: usize, charged: Vec<usize>) -> PyResult<Self> {
        Ok(Graph {
            inner: LabeledGraph::collective(n, &charged).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn edge_count(&self) -> usize {
        self.inner.edge_count()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(kind={}, n={}, edges={:?})",
            self.inner.kind().name(),
            self.inner.n(),
            self.inner.edges()
        )
    }
}

/// An ordered stack of layers over one shared vertex set.
#[pyclass(frozen, skip_from_py_object)]
#[derive(Clone)]
struct Multiplex {
    inner: MultiplexNetwork,
}

#[pymethods]
impl Multiplex {
    #[new]
    fn new(layers: Vec<Graph>) -> PyResult<Self> {
        let layers = layers.into_iter().map(|g| g.inner).collect();
        Ok(Multiplex {
            inner: MultiplexNetwork::new(layers).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn layer_count(&self) -> usize {
        self.inner.layer_count()
    }

    fn layer(&self, index: usize) -> PyResult<Graph> {
        if index >= self.inner.layer_count() {
            return Err(PyValueError::new_err(format!(
                "layer {index} out of range for {} layers",
                self.inner.layer_count()
            )));
        }
        Ok(Graph {
            inner: *self.inner.layer(index),
        })
    }

    fn kinds(&self) -> Vec<&'static str> {
        self.inner.kinds().iter().map(|k| k.name()).collect()
    }

    fn canonical_hex(&self) -> PyResult<String> {
        Ok(self.inner.canonical_form().map_err(py_err)?.hex())
    }

    fn relabel(&self, perm: Vec<u8>) -> PyResult<Multiplex> {
        let p = Permutation::from_map(perm).map_err(py_err)?;
        if p.n() != self.inner.n() {
            return Err(PyValueError::new_err("permutation length must equal n"));
        }
        Ok(Multiplex {
            inner: self.inner.relabel(&p),
        })
    }

    fn is_isomorphic_to(&self, other: &Multiplex) -> PyResult<bool> {
        self.inner.is_isomorphic_to(&other.inner).map_err(py_err)
    }

    fn automorphism_count(&self) -> PyResult<usize> {
        Ok(self.inner.automorphisms().map_err(py_err)?.order())
    }

    fn __repr__(&self) -> String {
        format!(
            "Multiplex(n={}, kinds={:?})",
            self.inner.n(),
            self.kinds()
        )
    }
}

fn parse_kinds(kinds: &str) -> PyResult<Vec<GraphKind>> {
    kinds
        .split(',')
        .map(|k| GraphKind::parse(k).map_err(py_err))
        .collect()
}

fn parse_model(model: &str, p: f64) -> PyResult<SamplingModel> {
    SamplingModel::parse(model, Some(p)).map_err(py_err)
}

/// An enumerated set of isomorphism classes with orbit sizes.
#[pyclass]
struct Catalog {
    inner: IsoClassCatalog,
    sets: Vec<Vec<IsoClass>>,
}

impl Catalog {
    fn from_inner(inner: IsoClassCatalog) -> PyResult<Self> {
        let sets = basis_sets_for(inner.n, &inner.layer_kinds).map_err(py_err)?;
        Ok(Catalog { inner, sets })
    }
}

#[pymethods]
impl Catalog {
    /// Enumerate all classes for `n` vertices and the given layer kinds,
    /// e.g. kinds="p,c" for a pairwise plus a collective layer.
    #[staticmethod]
    #[pyo3(signature = (n, kinds = "p,c", sparse = false))]
    fn enumerate(py: Python<'_>, n: usize, kinds: &str, sparse: bool) -> PyResult<Self> {
        let kind_list = parse_kinds(kinds)?;
        py.detach(|| {
            let mut sets = basis_sets_for(n, &kind_list).map_err(py_err)?;
            if sparse {
                for (set, kind) in sets.iter_mut().zip(&kind_list) {
                    if *kind == GraphKind::Pairwise {
                        *set = sparse_half(set).map_err(py_err)?;
                    }
                }
            }
            let inner = enumerate_multiplex(&sets, n).map_err(py_err)?;
            Ok(Catalog { inner, sets })
        })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        let file = std::fs::File::open(&path)
            .map_err(|e| PyValueError::new_err(format!("cannot open {}: {e}", path.display())))?;
        let inner =
            IsoClassCatalog::read_from(std::io::BufReader::new(file)).map_err(py_err)?;
        Catalog::from_inner(inner)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        let mut file = std::io::BufWriter::new(
            std::fs::File::create(&path)
                .map_err(|e| PyValueError::new_err(format!("cannot create {}: {e}", path.display())))?,
        );
        self.inner.write_to(&mut file).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn kinds(&self) -> Vec<&'static str> {
        self.inner.layer_kinds.iter().map(|k| k.name()).collect()
    }

    fn class_ids(&self) -> Vec<String> {
        self.inner.classes.iter().map(|c| c.class_id.hex()).collect()
    }

    fn orbit_sizes(&self) -> Vec<u64> {
        self.inner.classes.iter().map(|c| c.orbit_size).collect()
    }

    fn total_orbit(&self) -> u128 {
        self.inner.total_orbit()
    }

    fn representative(&self, index: usize) -> PyResult<Multiplex> {
        let class = self
            .inner
            .classes
            .get(index)
            .ok_or_else(|| PyValueError::new_err(format!("class {index} out of range")))?;
        Ok(Multiplex {
            inner: class.representative.clone(),
        })
    }

    /// Exact class probabilities under a sampling model, in catalog order.
    #[pyo3(signature = (model = "original_er", p = 0.5))]
    fn probabilities(&self, py: Python<'_>, model: &str, p: f64) -> PyResult<Vec<f64>> {
        let model = parse_model(model, p)?;
        py.detach(|| {
            let probs = class_probabilities(&self.inner, &self.sets, model).map_err(py_err)?;
            Ok(probs.iter().map(rational_to_f64).collect())
        })
    }

    /// Rank-frequency table rows as (rank, probability, class_indices).
    #[pyo3(signature = (model = "original_er", p = 0.5))]
    fn rank_table(
        &self,
        py: Python<'_>,
        model: &str,
        p: f64,
    ) -> PyResult<Vec<(usize, f64, Vec<usize>)>> {
        let model = parse_model(model, p)?;
        py.detach(|| {
            let probs = class_probabilities(&self.inner, &self.sets, model).map_err(py_err)?;
            Ok(rank_frequency(&probs)
                .rows
                .into_iter()
                .map(|row| (row.rank, rational_to_f64(&row.probability), row.class_indices))
                .collect())
        })
    }

    /// Draw `count` networks from a sampling model, reproducibly per seed.
    #[pyo3(signature = (count, model = "original_er", p = 0.5, seed = 0))]
    fn sample(
        &self,
        py: Python<'_>,
        count: usize,
        model: &str,
        p: f64,
        seed: u64,
    ) -> PyResult<Vec<Multiplex>> {
        let model = parse_model(model, p)?;
        py.detach(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..count)
                .map(|_| {
                    Ok(Multiplex {
                        inner: sample_network(model, &self.inner, &self.sets, &mut rng)
                            .map_err(py_err)?,
                    })
                })
                .collect()
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Catalog(n={}, kinds={:?}, classes={})",
            self.inner.n,
            self.kinds(),
            self.inner.len()
        )
    }
}

fn build_sim_config(
    kinds: &[GraphKind],
    frames: Option<usize>,
    dt: Option<f64>,
    subsample: Option<usize>,
    box_half: Option<f64>,
) -> SimConfig {
    let mut cfg = SimConfig::for_kinds(kinds);
    if let Some(v) = frames {
        cfg.n_frames = v;
    }
    if let Some(v) = dt {
        cfg.dt = v;
    }
    if let Some(v) = subsample {
        cfg.subsample = v;
    }
    cfg.box_half = box_half.or(cfg.box_half);
    cfg
}

type Frames = Vec<Vec<[f64; 2]>>;

/// Simulate one network from seeded initial conditions. Returns
/// (positions, velocities), each shaped frames x particles x 2.
#[pyfunction]
#[pyo3(signature = (network, seed = 0, frames = None, dt = None, subsample = None, box_half = None))]
fn simulate(
    py: Python<'_>,
    network: &Multiplex,
    seed: u64,
    frames: Option<usize>,
    dt: Option<f64>,
    subsample: Option<usize>,
    box_half: Option<f64>,
) -> PyResult<(Frames, Frames)> {
    let cfg = build_sim_config(&network.inner.kinds(), frames, dt, subsample, box_half);
    let inner = network.inner.clone();
    py.detach(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let init = sample_initial_conditions(inner.n(), &cfg, &mut rng);
        let traj = run_simulation(&inner, &init, &cfg).map_err(py_err)?;
        let positions = traj.frames.iter().map(|f| f.positions.clone()).collect();
        let velocities = traj.frames.iter().map(|f| f.velocities.clone()).collect();
        Ok((positions, velocities))
    })
}

fn extract_counts(value: &Bound<'_, PyAny>) -> PyResult<SplitCounts> {
    let (train, val, test) = value.extract::<(usize, usize, usize)>().map_err(|_| {
        PyValueError::new_err("expected a (train, val, test) tuple")
    })?;
    Ok(SplitCounts { train, val, test })
}

/// Plan and materialize a dataset; returns the per-split sizes and the
/// builder's diagnostic report lines.
#[pyfunction]
#[pyo3(signature = (
    catalog, method, seed, out_dir, counts = None, inits = None, class_split = None,
    p = 0.5, budget_factor = 100, axis = None, mode = None,
    frames = None, dt = None, subsample = None, box_half = None, name = None
))]
#[allow(clippy::too_many_arguments)]
fn generate_dataset(
    py: Python<'_>,
    catalog: &Catalog,
    method: &str,
    seed: u64,
    out_dir: PathBuf,
    counts: Option<Bound<'_, PyAny>>,
    inits: Option<Bound<'_, PyAny>>,
    class_split: Option<(usize, usize, usize)>,
    p: f64,
    budget_factor: u64,
    axis: Option<&str>,
    mode: Option<&str>,
    frames: Option<usize>,
    dt: Option<f64>,
    subsample: Option<usize>,
    box_half: Option<f64>,
    name: Option<String>,
) -> PyResult<Py<PyAny>> {
    fn need<'py>(
        opt: Option<Bound<'py, PyAny>>,
        method: &str,
        what: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        opt.ok_or_else(|| PyValueError::new_err(format!("{method} needs {what}")))
    }
    let split = || {
        class_split
            .map(|(a, b, c)| [a, b, c])
            .ok_or_else(|| PyValueError::new_err(format!("{method} needs class_split")))
    };
    let build = match method {
        "original_er" => BuildMethod::OriginalEr {
            p,
            counts: extract_counts(&need(counts, method, "counts")?)?,
        },
        "rejection_er" => BuildMethod::RejectionEr {
            p,
            counts: extract_counts(&need(counts, method, "counts")?)?,
            budget_factor,
        },
        "con_grid" => BuildMethod::ConGrid {
            inits: extract_counts(&need(inits, method, "inits")?)?,
        },
        "iso_grid" => BuildMethod::IsoGrid {
            inits: need(inits, method, "inits")?.extract::<usize>()?,
            class_split: split()?,
        },
        "con_iso_grid" => BuildMethod::ConIsoGrid {
            inits: extract_counts(&need(inits, method, "inits")?)?,
            class_split: split()?,
        },
        "sub_con_grid" => BuildMethod::SubConGrid {
            inits: extract_counts(&need(inits, method, "inits")?)?,
            class_split: split()?,
        },
        "extrapolation" => BuildMethod::Extrapolation {
            axis: ExtrapolationAxis::parse(
                axis.ok_or_else(|| PyValueError::new_err("extrapolation needs axis"))?,
            )
            .map_err(py_err)?,
            mode: ExtrapolationMode::parse(
                mode.ok_or_else(|| PyValueError::new_err("extrapolation needs mode"))?,
            )
            .map_err(py_err)?,
            inits: extract_counts(&need(inits, method, "inits")?)?,
        },
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method {other:?}; expected one of original_er, rejection_er, con_grid, \
                 iso_grid, con_iso_grid, sub_con_grid, extrapolation"
            )))
        }
    };
    let spec = DatasetSpec {
        name: name.unwrap_or_else(|| build.name().to_string()),
        seed,
        build,
        sim: build_sim_config(&catalog.inner.layer_kinds, frames, dt, subsample, box_half),
    };
    let manifest = {
        let inner = &catalog.inner;
        py.detach(|| {
            let plan = plan_dataset(inner, &spec).map_err(py_err)?;
            materialize(&plan, inner, &out_dir).map_err(py_err)
        })?
    };
    let result = pyo3::types::PyDict::new(py);
    result.set_item("name", &manifest.name)?;
    result.set_item("method", manifest.build.name())?;
    let splits = pyo3::types::PyDict::new(py);
    for (split, summary) in &manifest.splits {
        let entry = pyo3::types::PyDict::new(py);
        entry.set_item("samples", summary.samples)?;
        entry.set_item("distinct_classes", summary.distinct_classes)?;
        splits.set_item(split, entry)?;
    }
    result.set_item("splits", splits)?;
    result.set_item("reports", manifest.reports.clone())?;
    Ok(result.into_any().unbind())
}

/// Check a materialized dataset against its build method's disjointness
/// contract. Returns {"ok", "overlaps", "violations"}.
#[pyfunction]
fn leak_check(py: Python<'_>, dataset_dir: PathBuf) -> PyResult<Py<PyAny>> {
    let report = py.detach(|| check_dataset(&dataset_dir).map_err(py_err))?;
    let result = pyo3::types::PyDict::new(py);
    result.set_item("ok", report.is_clean())?;
    result.set_item(
        "overlaps",
        report.overlaps.iter().map(|o| o.line()).collect::<Vec<_>>(),
    )?;
    result.set_item("violations", report.violations.clone())?;
    Ok(result.into_any().unbind())
}

/// Error-proportional replay sampler over examples or classes.
#[pyclass]
struct PrioritySampler {
    inner: CorePrioritySampler,
}

#[pymethods]
impl PrioritySampler {
    #[staticmethod]
    #[pyo3(signature = (n_examples, alpha = 0.1))]
    fn per_example(n_examples: usize, alpha: f64) -> PyResult<Self> {
        Ok(PrioritySampler {
            inner: CorePrioritySampler::per_example(n_examples, alpha, FloorSpec::default())
                .map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (class_of, alpha = 0.1))]
    fn per_class(class_of: Vec<usize>, alpha: f64) -> PyResult<Self> {
        Ok(PrioritySampler {
            inner: CorePrioritySampler::per_class(class_of, alpha, FloorSpec::default())
                .map_err(py_err)?,
        })
    }

    fn update(&mut self, unit: usize, error: f64) -> PyResult<()> {
        self.inner.update(unit, error).map_err(py_err)
    }

    fn update_example(&mut self, example: usize, error: f64) -> PyResult<()> {
        self.inner.update_example(example, error).map_err(py_err)
    }

    fn probabilities(&self) -> Vec<f64> {
        self.inner.probabilities()
    }

    #[pyo3(signature = (batch, seed = 0))]
    fn sample(&self, batch: usize, seed: u64) -> PyResult<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.inner.sample_batch(batch, &mut rng).map_err(py_err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(py_err)
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        Ok(PrioritySampler {
            inner: CorePrioritySampler::from_json(json).map_err(py_err)?,
        })
    }
}

#[pymodule]
fn mxbench_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", mxbench::VERSION)?;
    m.add_class::<Graph>()?;
    m.add_class::<Multiplex>()?;
    m.add_class::<Catalog>()?;
    m.add_class::<PrioritySampler>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(generate_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(leak_check, m)?)?;
    Ok(())
}

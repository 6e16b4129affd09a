//! Problem files and run reports: the batch interface of the crate.
//!
//! A problem file is a TOML document with an explicit `schema_version`,
//! describing dimension, horizon, grid, exponent, the kernel block, the
//! field block, the inhomogeneity and optional claimed data tables (they
//! are derived from the built-in closed forms when omitted). Reports are
//! JSON documents in which every number carries its tolerance context.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::fields::{Coeff, SamplerConfig};
use crate::kernels::{KernelOperator, KernelProfile};
use crate::operators::ProblemInstance;
use crate::solvers::{
    DEFAULT_MAX_ITERATIONS, DEFAULT_SUP_INCREMENT_TOL, DEFAULT_WEIGHTED_INCREMENT_TOL,
};
use crate::timebase::{Grid, ScalarTable, Trajectory};
use crate::{Error, FieldData, Matrix, Result, SetField, Vector};

pub const PROBLEM_SCHEMA_VERSION: &str = "1";
pub const REPORT_SCHEMA_VERSION: &str = "1";
pub const CSV_HEADER_VERSION: &str = "csv v1";

/// Solver tolerances of a problem file (defaults apply when absent).
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_weighted_tol")]
    pub weighted_increment: f64,
    #[serde(default = "default_sup_tol")]
    pub sup_increment: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
}

fn default_weighted_tol() -> f64 {
    DEFAULT_WEIGHTED_INCREMENT_TOL
}
fn default_sup_tol() -> f64 {
    DEFAULT_SUP_INCREMENT_TOL
}
fn default_max_iterations() -> usize {
    DEFAULT_MAX_ITERATIONS
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            weighted_increment: DEFAULT_WEIGHTED_INCREMENT_TOL,
            sup_increment: DEFAULT_SUP_INCREMENT_TOL,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemFile {
    schema_version: String,
    dimension: usize,
    horizon: f64,
    subintervals: usize,
    exponent: f64,
    #[serde(default)]
    rng_seed: u64,
    tolerances: Option<Tolerances>,
    kernel: KernelSpec,
    field: FieldSpec,
    inhomogeneity: InhomogeneitySpec,
    data: Option<DataSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KernelSpec {
    variant: String,
    matrix: Option<Vec<Vec<f64>>>,
    rate: Option<f64>,
    generator: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpec {
    variant: String,
    linear: Option<Vec<Vec<f64>>>,
    linear_nodes: Option<Vec<Vec<Vec<f64>>>>,
    offset: Option<Vec<f64>>,
    offset_nodes: Option<Vec<Vec<f64>>>,
    half_widths: Option<Vec<f64>>,
    half_widths_nodes: Option<Vec<Vec<f64>>>,
    radius: Option<f64>,
    radius_nodes: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InhomogeneitySpec {
    kind: String,
    value: Option<Vec<f64>>,
    slope: Option<Vec<f64>>,
    nodes: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DataSpec {
    alpha: Option<Vec<f64>>,
    beta: Option<Vec<f64>>,
    growth: Option<Vec<f64>>,
    mu: Option<Vec<f64>>,
}

/// A parsed and validated problem, ready for the solvers.
#[derive(Debug, Clone)]
pub struct LoadedProblem {
    pub instance: ProblemInstance,
    pub rng_seed: u64,
    pub tolerances: Tolerances,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::ProblemFile(msg.into())
}

fn to_matrix(rows: &[Vec<f64>], dim: usize, what: &str) -> Result<Matrix> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(bad(format!("{what} must be a {dim}×{dim} matrix")));
    }
    Ok(Matrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn to_vector(entries: &[f64], dim: usize, what: &str) -> Result<Vector> {
    if entries.len() != dim {
        return Err(bad(format!("{what} must have {dim} entries")));
    }
    Ok(Vector::from_vec(entries.to_vec()))
}

fn node_table(values: &[f64], grid: Grid, what: &str) -> Result<ScalarTable> {
    if values.len() != grid.node_count() {
        return Err(bad(format!(
            "{what} table must have {} entries (one per node), got {}",
            grid.node_count(),
            values.len()
        )));
    }
    ScalarTable::new(grid, values.to_vec())
}

fn parse_kernel(spec: &KernelSpec, dim: usize) -> Result<KernelOperator> {
    match spec.variant.as_str() {
        "constant" => {
            let rows = spec.matrix.as_ref().ok_or_else(|| bad("constant kernel needs `matrix`"))?;
            Ok(KernelOperator::Constant { matrix: to_matrix(rows, dim, "kernel.matrix")? })
        }
        "exp_decay" => {
            let rows = spec.matrix.as_ref().ok_or_else(|| bad("exp_decay kernel needs `matrix`"))?;
            let rate = spec.rate.ok_or_else(|| bad("exp_decay kernel needs `rate`"))?;
            Ok(KernelOperator::SeparableSmooth {
                family: KernelProfile::ExpDecay { rate },
                matrix: to_matrix(rows, dim, "kernel.matrix")?,
            })
        }
        "difference" => {
            let rows = spec.matrix.as_ref().ok_or_else(|| bad("difference kernel needs `matrix`"))?;
            Ok(KernelOperator::SeparableSmooth {
                family: KernelProfile::Difference,
                matrix: to_matrix(rows, dim, "kernel.matrix")?,
            })
        }
        "semigroup" => {
            let rows = spec
                .generator
                .as_ref()
                .or(spec.matrix.as_ref())
                .ok_or_else(|| bad("semigroup kernel needs `generator`"))?;
            Ok(KernelOperator::Semigroup { generator: to_matrix(rows, dim, "kernel.generator")? })
        }
        other => Err(bad(format!(
            "unknown kernel variant {other:?} (expected constant | exp_decay | difference | semigroup)"
        ))),
    }
}

fn parse_matrix_coeff(
    constant: &Option<Vec<Vec<f64>>>,
    per_node: &Option<Vec<Vec<Vec<f64>>>>,
    grid: Grid,
    dim: usize,
    what: &str,
) -> Result<Coeff<Matrix>> {
    match (constant, per_node) {
        (Some(rows), None) => Ok(Coeff::Constant(to_matrix(rows, dim, what)?)),
        (None, Some(tables)) => {
            if tables.len() != grid.node_count() {
                return Err(bad(format!("{what}_nodes must have {} entries", grid.node_count())));
            }
            Ok(Coeff::PerNode(
                tables.iter().map(|rows| to_matrix(rows, dim, what)).collect::<Result<_>>()?,
            ))
        }
        (None, None) => Err(bad(format!("field needs `{what}` or `{what}_nodes`"))),
        (Some(_), Some(_)) => Err(bad(format!("give either `{what}` or `{what}_nodes`, not both"))),
    }
}

fn parse_vector_coeff(
    constant: &Option<Vec<f64>>,
    per_node: &Option<Vec<Vec<f64>>>,
    grid: Grid,
    dim: usize,
    what: &str,
) -> Result<Coeff<Vector>> {
    match (constant, per_node) {
        (Some(v), None) => Ok(Coeff::Constant(to_vector(v, dim, what)?)),
        (None, Some(vs)) => {
            if vs.len() != grid.node_count() {
                return Err(bad(format!("{what}_nodes must have {} entries", grid.node_count())));
            }
            Ok(Coeff::PerNode(
                vs.iter().map(|v| to_vector(v, dim, what)).collect::<Result<_>>()?,
            ))
        }
        (None, None) => Err(bad(format!("field needs `{what}` or `{what}_nodes`"))),
        (Some(_), Some(_)) => Err(bad(format!("give either `{what}` or `{what}_nodes`, not both"))),
    }
}

fn parse_field(spec: &FieldSpec, grid: Grid, dim: usize) -> Result<SetField> {
    let linear = parse_matrix_coeff(&spec.linear, &spec.linear_nodes, grid, dim, "linear")?;
    let offset = parse_vector_coeff(&spec.offset, &spec.offset_nodes, grid, dim, "offset")?;
    match spec.variant.as_str() {
        "singleton" => SetField::singleton(linear, offset),
        "affine_box" => {
            let half = parse_vector_coeff(
                &spec.half_widths,
                &spec.half_widths_nodes,
                grid,
                dim,
                "half_widths",
            )?;
            SetField::affine_box(linear, offset, half)
        }
        "affine_ball" => {
            let radius = match (&spec.radius, &spec.radius_nodes) {
                (Some(r), None) => Coeff::Constant(*r),
                (None, Some(rs)) => {
                    if rs.len() != grid.node_count() {
                        return Err(bad(format!(
                            "radius_nodes must have {} entries",
                            grid.node_count()
                        )));
                    }
                    Coeff::PerNode(rs.clone())
                }
                (None, None) => return Err(bad("affine_ball needs `radius` or `radius_nodes`")),
                (Some(_), Some(_)) => {
                    return Err(bad("give either `radius` or `radius_nodes`, not both"))
                }
            };
            SetField::affine_ball(linear, offset, radius)
        }
        other => Err(bad(format!(
            "unknown field variant {other:?} (expected singleton | affine_box | affine_ball)"
        ))),
    }
}

fn parse_inhomogeneity(spec: &InhomogeneitySpec, grid: Grid, dim: usize) -> Result<Trajectory> {
    match spec.kind.as_str() {
        "zero" => Ok(Trajectory::zeros(grid, dim)),
        "constant" => {
            let v = spec.value.as_ref().ok_or_else(|| bad("constant inhomogeneity needs `value`"))?;
            Ok(Trajectory::constant(grid, to_vector(v, dim, "inhomogeneity.value")?))
        }
        "affine" => {
            let v = spec.value.as_ref().ok_or_else(|| bad("affine inhomogeneity needs `value`"))?;
            let s = spec.slope.as_ref().ok_or_else(|| bad("affine inhomogeneity needs `slope`"))?;
            let value = to_vector(v, dim, "inhomogeneity.value")?;
            let slope = to_vector(s, dim, "inhomogeneity.slope")?;
            Ok(Trajectory::from_fn(grid, |t| &value + &slope * t))
        }
        "nodes" => {
            let rows = spec.nodes.as_ref().ok_or_else(|| bad("node inhomogeneity needs `nodes`"))?;
            if rows.len() != grid.node_count() {
                return Err(bad(format!(
                    "inhomogeneity.nodes must have {} rows",
                    grid.node_count()
                )));
            }
            Trajectory::new(
                grid,
                rows.iter()
                    .map(|r| to_vector(r, dim, "inhomogeneity.nodes row"))
                    .collect::<Result<_>>()?,
            )
        }
        other => Err(bad(format!(
            "unknown inhomogeneity kind {other:?} (expected zero | constant | affine | nodes)"
        ))),
    }
}

/// Parse a problem document.
pub fn parse_problem(text: &str) -> Result<LoadedProblem> {
    let file: ProblemFile = toml::from_str(text).map_err(|e| bad(format!("TOML parse: {e}")))?;
    if file.schema_version != PROBLEM_SCHEMA_VERSION {
        return Err(bad(format!(
            "unsupported schema_version {:?} (this build reads {PROBLEM_SCHEMA_VERSION:?})",
            file.schema_version
        )));
    }
    if file.dimension == 0 {
        return Err(bad("dimension must be ≥ 1"));
    }
    let grid = Grid::new(file.horizon, file.subintervals)
        .map_err(|e| bad(format!("invalid grid: {e}")))?;
    let kernel = parse_kernel(&file.kernel, file.dimension)?;
    let field = parse_field(&file.field, grid, file.dimension)?;
    let h = parse_inhomogeneity(&file.inhomogeneity, grid, file.dimension)?;

    let mut builder = ProblemInstance::builder(kernel, field, h, file.exponent)
        .lint_sampler(SamplerConfig { seed: file.rng_seed, ..SamplerConfig::default() });
    if let Some(data) = &file.data {
        if data.alpha.is_some() || data.beta.is_some() || data.growth.is_some() {
            let (Some(alpha), Some(beta), Some(growth)) = (&data.alpha, &data.beta, &data.growth)
            else {
                return Err(bad("claimed data needs all of alpha, beta and growth tables"));
            };
            builder = builder.field_data(FieldData::new(
                node_table(alpha, grid, "alpha")?,
                node_table(beta, grid, "beta")?,
                node_table(growth, grid, "growth")?,
            )?);
        }
        if let Some(mu) = &data.mu {
            builder = builder.derivative_bound(node_table(mu, grid, "mu")?);
        }
    }
    let instance = builder.build()?;
    if instance.dim() != file.dimension {
        return Err(bad(format!(
            "declared dimension {} does not match the field dimension {}",
            file.dimension,
            instance.dim()
        )));
    }
    Ok(LoadedProblem {
        instance,
        rng_seed: file.rng_seed,
        tolerances: file.tolerances.unwrap_or_default(),
    })
}

/// Load a problem file from disk.
pub fn load_problem(path: &Path) -> Result<LoadedProblem> {
    let text = std::fs::read_to_string(path)?;
    parse_problem(&text)
}

/// A reported number together with the tolerance it was checked against and
/// a short description of what that tolerance means.
#[derive(Debug, Clone, Serialize)]
pub struct Measured {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub context: String,
}

impl Measured {
    pub fn new(name: &str, value: f64, tolerance: f64, context: &str) -> Self {
        Self { name: name.into(), value, tolerance, context: context.into() }
    }
}

/// Machine-readable result document of one CLI command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: &'static str,
    pub command: String,
    pub problem_file: String,
    pub success: bool,
    /// Named pass/fail verdicts (lint checks, bound checks, ...).
    pub verdicts: serde_json::Map<String, serde_json::Value>,
    /// Numbers with their tolerance context.
    pub measurements: Vec<Measured>,
    /// Paths of emitted CSV tables.
    pub outputs: Vec<String>,
    /// Free-form diagnostics (warnings, skip reasons, error messages).
    pub notes: Vec<String>,
    /// Command-specific payload (solver reports, lint details).
    pub detail: serde_json::Value,
}

impl RunReport {
    pub fn new(command: &str, problem_file: &Path) -> Self {
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.into(),
            problem_file: problem_file.display().to_string(),
            success: true,
            verdicts: serde_json::Map::new(),
            measurements: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
            detail: serde_json::Value::Null,
        }
    }

    pub fn verdict(&mut self, name: &str, passed: bool) {
        self.verdicts.insert(name.into(), serde_json::Value::Bool(passed));
        if !passed {
            self.success = false;
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialization");
        text.push('\n');
        text
    }
}

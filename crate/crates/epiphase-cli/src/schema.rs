//! Versioned JSON schemas for operator input files and report output.
//!
//! Complex matrices are row-major arrays of `[re, im]` pairs; phase-space
//! points are `[q, p]` pairs; symplectic matrices are row-major integer
//! arrays `[m00, m01, m10, m11]`. Every document carries `"schema": 1`.

use anyhow::{bail, Result};
use epiphase::linalg::{C64, CMatrix};
use epiphase::phasespace::SymplecticMatrix;
use serde::{Deserialize, Serialize};

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let dim = rows.len();
    if dim == 0 || rows.iter().any(|r| r.len() != dim) {
        bail!("operator matrices must be square and non-empty");
    }
    Ok(CMatrix::from_fn(dim, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn symplectic_to_json(s: &SymplecticMatrix) -> [u32; 4] {
    [s.m[0][0], s.m[0][1], s.m[1][0], s.m[1][1]]
}

/// Input to `decompose`: any subset of a preparation, a transformation
/// chain, and a measurement outcome.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentInput {
    pub schema: u32,
    pub dimension: u32,
    #[serde(default)]
    pub density: Option<MatrixJson>,
    #[serde(default)]
    pub channels: Vec<ChannelInput>,
    #[serde(default)]
    pub povm_element: Option<MatrixJson>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelInput {
    pub kraus: Vec<MatrixJson>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub schema: u32,
    pub command: &'static str,
    pub dimension: u32,
    pub seed: u64,
    pub trials: usize,
    pub tolerance: f64,
    pub framework_counts: FrameworkCounts,
    pub checks: Vec<CheckReport>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct FrameworkCounts {
    pub striations: usize,
    pub subgroup_order: usize,
    pub coherent_one_step: usize,
    pub coherent_two_step: usize,
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    /// Largest residual observed (for non-negativity: the most negative
    /// entry, sign preserved; for purity: the largest sum).
    pub worst: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct SpaceReport {
    pub schema: u32,
    pub command: &'static str,
    pub dimension: u32,
    pub points: Vec<[u32; 2]>,
    pub striations: Vec<StriationJson>,
    pub symplectic_group_order: usize,
}

#[derive(Debug, Serialize)]
pub struct StriationJson {
    pub id: usize,
    pub lines: Vec<LineJson>,
}

#[derive(Debug, Serialize)]
pub struct LineJson {
    /// Coefficients (a, b, c) of the line a*q + b*p = c.
    pub equation: [u32; 3],
    pub points: Vec<[u32; 2]>,
}

#[derive(Debug, Serialize)]
pub struct SubgroupReport {
    pub schema: u32,
    pub command: &'static str,
    pub dimension: u32,
    pub count: usize,
    pub generator_bound: usize,
    pub search_scope: &'static str,
    pub subgroups: Vec<Vec<[u32; 4]>>,
}

#[derive(Debug, Serialize)]
pub struct FrameworkReport {
    pub schema: u32,
    pub command: &'static str,
    pub dimension: u32,
    pub chain_length: usize,
    pub count: usize,
    pub frameworks: Vec<FrameworkEntry>,
}

#[derive(Debug, Serialize)]
pub struct FrameworkEntry {
    pub prep_striation: usize,
    pub chain: Vec<[u32; 4]>,
    pub meas_striation: usize,
}

#[derive(Debug, Serialize)]
pub struct QubitRotationReport {
    pub schema: u32,
    pub command: &'static str,
    pub what: &'static str,
    pub count: usize,
    pub elements: Vec<QubitElement>,
}

#[derive(Debug, Serialize)]
pub struct QubitElement {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quaternion: Option<[f64; 4]>,
    pub matrix: [[f64; 3]; 3],
    pub axis: [f64; 3],
    pub angle_deg: f64,
    pub det: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex_permutation: Option<[usize; 4]>,
    pub label: String,
}

#[derive(Debug, Serialize)]
pub struct DecomposeReport {
    pub schema: u32,
    pub command: &'static str,
    pub dimension: u32,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preparation: Option<Vec<PointTableJson>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub chain: Vec<Vec<TransTableJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measurement: Option<Vec<PointTableJson>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purity: Option<PurityJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probability: Option<ProbabilityJson>,
}

#[derive(Debug, Serialize)]
pub struct PointTableJson {
    pub striation: usize,
    /// Values over phase space in row-major point order (index = q*d + p).
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct TransTableJson {
    pub symplectic: [u32; 4],
    /// One value per displacement class, indexed like phase-space points.
    pub class_values: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct PurityJson {
    pub sum: f64,
    pub bound: f64,
    pub pass: bool,
    pub complete_criterion: bool,
}

#[derive(Debug, Serialize)]
pub struct ProbabilityJson {
    pub reconstructed: f64,
    pub oracle: f64,
    pub deviation: f64,
}

//! The `enumerate` subcommand: deterministic listings of special
//! subgroups, coherent frameworks, and the qubit transformation sets.

use anyhow::{bail, Result};

use epiphase::epistemic::coherent_frameworks;
use epiphase::phasespace::PhaseSpace;
use epiphase::qubit::{enumerate_inversion_compatible, enumerate_permutation_theory};

use crate::config::{OutputFormat, RunConfig};
use crate::schema::{
    symplectic_to_json, FrameworkEntry, FrameworkReport, QubitElement, QubitRotationReport,
    SubgroupReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum EnumerateTarget {
    Space,
    Subgroups,
    Frameworks,
    QubitRotations,
    QubitPermutations,
}

pub fn run(config: &RunConfig, what: EnumerateTarget, chain_length: usize) -> Result<()> {
    match what {
        EnumerateTarget::Space => space_geometry(config),
        EnumerateTarget::Subgroups => subgroups(config),
        EnumerateTarget::Frameworks => frameworks(config, chain_length),
        EnumerateTarget::QubitRotations => qubit_rotations(config),
        EnumerateTarget::QubitPermutations => qubit_permutations(config),
    }
}

/// Both qubit classification lists in one report.
pub fn classify_qubit(config: &RunConfig) -> Result<()> {
    require_qubit(config)?;
    qubit_rotations(config)?;
    qubit_permutations(config)
}

fn space_geometry(config: &RunConfig) -> Result<()> {
    let space = PhaseSpace::new(config.dimension)?;
    let report = crate::schema::SpaceReport {
        schema: 1,
        command: "enumerate",
        dimension: config.dimension,
        points: space.points().iter().map(|pt| [pt.q, pt.p]).collect(),
        striations: space
            .striations()
            .iter()
            .map(|striation| crate::schema::StriationJson {
                id: striation.id,
                lines: striation
                    .lines()
                    .iter()
                    .map(|line| crate::schema::LineJson {
                        equation: [line.a, line.b, line.c],
                        points: line.points().iter().map(|pt| [pt.q, pt.p]).collect(),
                    })
                    .collect(),
            })
            .collect(),
        symplectic_group_order: space.symplectic_group().len(),
    };
    match config.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => {
            println!(
                "d={}: {} points, {} striations, symplectic group of order {}",
                report.dimension,
                report.points.len(),
                report.striations.len(),
                report.symplectic_group_order
            );
            for striation in &report.striations {
                let lines: Vec<String> = striation
                    .lines
                    .iter()
                    .map(|l| format!("{}q+{}p={}", l.equation[0], l.equation[1], l.equation[2]))
                    .collect();
                println!("striation {}: {}", striation.id, lines.join("  "));
            }
        }
    }
    Ok(())
}

fn subgroups(config: &RunConfig) -> Result<()> {
    let space = PhaseSpace::new(config.dimension)?;
    let search = space.find_special_subgroups(2);
    let report = SubgroupReport {
        schema: 1,
        command: "enumerate",
        dimension: config.dimension,
        count: search.subgroups.len(),
        generator_bound: search.generator_bound,
        search_scope: "within generator bound",
        subgroups: search
            .subgroups
            .iter()
            .map(|sub| sub.elements().iter().map(symplectic_to_json).collect())
            .collect(),
    };
    match config.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => {
            println!(
                "d={}: {} nonsingular-difference subgroup(s) of order {} ({})",
                report.dimension,
                report.count,
                config.dimension * config.dimension - 1,
                report.search_scope
            );
            for (idx, sub) in report.subgroups.iter().enumerate() {
                let rows: Vec<String> = sub
                    .iter()
                    .map(|m| format!("[[{},{}],[{},{}]]", m[0], m[1], m[2], m[3]))
                    .collect();
                println!("subgroup {idx}: {}", rows.join(" "));
            }
        }
    }
    Ok(())
}

fn frameworks(config: &RunConfig, chain_length: usize) -> Result<()> {
    let space = PhaseSpace::new(config.dimension)?;
    let subgroup = space
        .special_subgroup()
        .ok_or_else(|| anyhow::anyhow!("no special subgroup found for d = {}", config.dimension))?;
    let frameworks = coherent_frameworks(&space, &subgroup, chain_length);
    let report = FrameworkReport {
        schema: 1,
        command: "enumerate",
        dimension: config.dimension,
        chain_length,
        count: frameworks.len(),
        frameworks: frameworks
            .iter()
            .map(|fw| FrameworkEntry {
                prep_striation: fw.prep,
                chain: fw.chain.iter().map(symplectic_to_json).collect(),
                meas_striation: fw.meas,
            })
            .collect(),
    };
    match config.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => {
            println!(
                "d={}: {} coherent frameworks with {}-step chains",
                report.dimension, report.count, report.chain_length
            );
            for fw in &report.frameworks {
                let chain: Vec<String> = fw
                    .chain
                    .iter()
                    .map(|m| format!("[[{},{}],[{},{}]]", m[0], m[1], m[2], m[3]))
                    .collect();
                println!(
                    "B{} --{}--> B{}",
                    fw.prep_striation,
                    chain.join(","),
                    fw.meas_striation
                );
            }
        }
    }
    Ok(())
}

fn require_qubit(config: &RunConfig) -> Result<()> {
    if config.dimension != 2 {
        bail!("the qubit classification targets require --d 2 (got {})", config.dimension);
    }
    Ok(())
}

fn qubit_rotations(config: &RunConfig) -> Result<()> {
    require_qubit(config)?;
    let rotations = enumerate_inversion_compatible();
    let report = QubitRotationReport {
        schema: 1,
        command: "enumerate",
        what: "qubit-rotations",
        count: rotations.len(),
        elements: rotations
            .iter()
            .map(|r| QubitElement {
                quaternion: Some(r.quaternion.u),
                matrix: r.action.matrix,
                axis: r.axis,
                angle_deg: r.angle_deg,
                det: r.action.det(),
                vertex_permutation: None,
                label: r.label.clone(),
            })
            .collect(),
    };
    emit_qubit_report(config, report)
}

fn qubit_permutations(config: &RunConfig) -> Result<()> {
    require_qubit(config)?;
    let theory = enumerate_permutation_theory();
    let report = QubitRotationReport {
        schema: 1,
        command: "enumerate",
        what: "qubit-permutations",
        count: theory.elements.len(),
        elements: theory
            .elements
            .iter()
            .map(|e| {
                let (axis, angle_deg) = rotation_part_axis_angle(e);
                QubitElement {
                    quaternion: None,
                    matrix: e.action.matrix,
                    axis,
                    angle_deg,
                    det: e.det,
                    vertex_permutation: Some(e.vertex_permutation),
                    label: e.label.clone(),
                }
            })
            .collect(),
    };
    emit_qubit_report(config, report)
}

/// Axis/angle of the element's proper-rotation part (negated when det < 0).
fn rotation_part_axis_angle(e: &epiphase::qubit::PermutationEntry) -> ([f64; 3], f64) {
    let rotation = if e.det < 0.0 { e.action.negate() } else { e.action };
    let trace: f64 = (0..3).map(|i| rotation.matrix[i][i]).sum();
    let angle = (((trace - 1.0) / 2.0).clamp(-1.0, 1.0)).acos();
    let angle_deg = angle * 180.0 / std::f64::consts::PI;
    let m = rotation.matrix;
    let s = 2.0 * angle.sin();
    let axis = if s.abs() > 1e-9 {
        [(m[2][1] - m[1][2]) / s, (m[0][2] - m[2][0]) / s, (m[1][0] - m[0][1]) / s]
    } else {
        [0.0, 0.0, if angle_deg < 90.0 { 1.0 } else { 0.0 }]
    };
    (axis, angle_deg)
}

fn emit_qubit_report(config: &RunConfig, report: QubitRotationReport) -> Result<()> {
    match config.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => {
            println!("{}: {} elements", report.what, report.count);
            for (idx, e) in report.elements.iter().enumerate() {
                let quaternion = e
                    .quaternion
                    .map(|u| {
                        format!(" u=({:+.4}, {:+.4}, {:+.4}, {:+.4})", u[0], u[1], u[2], u[3])
                    })
                    .unwrap_or_default();
                let perm = e
                    .vertex_permutation
                    .map(|p| format!(" perm={:?}", p))
                    .unwrap_or_default();
                println!(
                    "{idx:>2}: det {:+.0}  {}{quaternion}{perm}",
                    e.det, e.label
                );
            }
        }
    }
    Ok(())
}

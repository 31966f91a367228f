//! The `decompose` subcommand: turn operator data into its full R-function
//! bundle, with the reconstructed and oracle probabilities side by side
//! when the file describes a complete experiment.

use std::path::Path;

use anyhow::{bail, Context, Result};

use epiphase::epistemic::{meas_rep, prep_rep, trans_rep_family};
use epiphase::hilbert::{
    quantum_probability, Channel, OperatorMatrix, PhasePointBasis, Transformation,
};
use epiphase::phasespace::PhaseSpace;
use epiphase::reconstruct::{reconstruct_probability, validate_preparation, ExperimentRecord};

use crate::config::{OutputFormat, RunConfig};
use crate::render::phase_space_diagram;
use crate::schema::{
    matrix_from_json, symplectic_to_json, DecomposeReport, ExperimentInput, PointTableJson,
    ProbabilityJson, PurityJson, TransTableJson,
};

pub fn run(config: &RunConfig, input_path: &Path) -> Result<()> {
    let raw = std::fs::read_to_string(input_path)
        .with_context(|| format!("cannot read input file {}", input_path.display()))?;
    let input: ExperimentInput = serde_json::from_str(&raw).context("malformed input file")?;
    if input.schema != 1 {
        bail!("unsupported input schema {}; this build reads schema 1", input.schema);
    }

    let space = PhaseSpace::new(input.dimension)?;
    let basis = PhasePointBasis::new(&space);
    let subgroup = space
        .special_subgroup()
        .ok_or_else(|| anyhow::anyhow!("no special subgroup found for d = {}", input.dimension))?;
    let tol = config.tol;
    let striations = space.striation_count();

    let density = input
        .density
        .as_ref()
        .map(|rows| -> Result<OperatorMatrix> {
            let mat = matrix_from_json(rows)?;
            check_dim(&space, mat.dim())?;
            Ok(OperatorMatrix::density(mat, tol)?)
        })
        .transpose()
        .context("invalid preparation")?;

    let povm = input
        .povm_element
        .as_ref()
        .map(|rows| -> Result<OperatorMatrix> {
            let mat = matrix_from_json(rows)?;
            check_dim(&space, mat.dim())?;
            Ok(OperatorMatrix::povm_element(mat, tol)?)
        })
        .transpose()
        .context("invalid measurement outcome")?;

    let channels = input
        .channels
        .iter()
        .enumerate()
        .map(|(idx, ch)| -> Result<Transformation> {
            let kraus = ch
                .kraus
                .iter()
                .map(|rows| {
                    let mat = matrix_from_json(rows)?;
                    check_dim(&space, mat.dim())?;
                    Ok(mat)
                })
                .collect::<Result<Vec<_>>>()?;
            let channel = Channel::new(kraus, tol)
                .with_context(|| format!("channel {idx} is not trace preserving"))?;
            if !channel.is_unital(tol) {
                bail!(
                    "channel {idx} is not unital (residual {:.3e}); only unital transformations \
                     are representable",
                    channel.unitality_residual()
                );
            }
            Ok(Transformation::Kraus(channel))
        })
        .collect::<Result<Vec<_>>>()?;

    let preparation = density.as_ref().map(|w| {
        (0..striations)
            .map(|b| {
                let rep = prep_rep(&space, &basis, w, b);
                PointTableJson { striation: b, values: rep.values().to_vec() }
            })
            .collect::<Vec<_>>()
    });

    let purity = density.as_ref().map(|w| {
        let preps: Vec<_> = (0..striations).map(|b| prep_rep(&space, &basis, w, b)).collect();
        let verdict = validate_preparation(&space, &preps);
        PurityJson {
            sum: verdict.sum,
            bound: verdict.bound,
            pass: verdict.pass,
            complete_criterion: verdict.complete_criterion,
        }
    });

    let chain_tables = channels
        .iter()
        .map(|tr| -> Result<Vec<TransTableJson>> {
            let quasi = basis.transition_quasi(tr, tol)?;
            let family = trans_rep_family(&space, &quasi, &subgroup, tol)?;
            Ok(family
                .iter()
                .map(|rep| TransTableJson {
                    symplectic: symplectic_to_json(&rep.framework()),
                    class_values: rep.class_values().to_vec(),
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let measurement = povm.as_ref().map(|e| {
        (0..striations)
            .map(|b| {
                let rep = meas_rep(&space, &basis, e, b);
                PointTableJson { striation: b, values: rep.values().to_vec() }
            })
            .collect::<Vec<_>>()
    });

    let probability = match (&density, &povm) {
        (Some(w), Some(e)) => {
            let record = ExperimentRecord::from_oracle(
                &space,
                &basis,
                &subgroup,
                w.clone(),
                channels.clone(),
                e.clone(),
                tol,
            )?;
            let reconstructed = reconstruct_probability(&space, &record)?;
            let oracle = quantum_probability(&basis, e, &channels, w)?;
            Some(ProbabilityJson {
                reconstructed,
                oracle,
                deviation: (reconstructed - oracle).abs(),
            })
        }
        _ => None,
    };

    let report = DecomposeReport {
        schema: 1,
        command: "decompose",
        dimension: input.dimension,
        tolerance: tol,
        preparation,
        chain: chain_tables,
        measurement,
        purity,
        probability,
    };

    match config.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => print_text(&space, &report),
    }
    Ok(())
}

fn check_dim(space: &PhaseSpace, got: usize) -> Result<()> {
    if got != space.dim() as usize {
        bail!("operator dimension {got} does not match declared dimension {}", space.dim());
    }
    Ok(())
}

fn print_text(space: &PhaseSpace, report: &DecomposeReport) {
    let d = space.dim();
    println!("decompose  d={}  tol={:.1e}", report.dimension, report.tolerance);
    if let Some(tables) = &report.preparation {
        println!("\npreparation R^B(alpha|w), one table per striation:");
        for table in tables {
            println!("striation {}:", table.striation);
            print!("{}", phase_space_diagram(&table.values, d));
        }
    }
    if let Some(purity) = &report.purity {
        println!(
            "purity sum {} (bound {}{}): {}",
            purity.sum,
            purity.bound,
            if purity.complete_criterion { ", complete criterion" } else { ", necessary only" },
            if purity.pass { "PASS" } else { "FAIL" }
        );
    }
    for (step, family) in report.chain.iter().enumerate() {
        println!("\ntransformation step {step}, R^S displacement-class tables:");
        for table in family {
            let m = table.symplectic;
            println!("S = [[{},{}],[{},{}]]:", m[0], m[1], m[2], m[3]);
            print!("{}", phase_space_diagram(&table.class_values, d));
        }
    }
    if let Some(tables) = &report.measurement {
        println!("\nmeasurement R^B(E|alpha), one table per striation:");
        for table in tables {
            println!("striation {}:", table.striation);
            print!("{}", phase_space_diagram(&table.values, d));
        }
    }
    if let Some(prob) = &report.probability {
        println!(
            "\nprobability: reconstructed {} vs oracle {} (deviation {:.3e})",
            prob.reconstructed, prob.oracle, prob.deviation
        );
    }
}

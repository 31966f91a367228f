//! The `verify` subcommand: seeded randomized verification of the
//! reconstruction identity, transition non-negativity, the four composition
//! rules, and the purity bound.

use anyhow::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use epiphase::epistemic::{
    coherent_frameworks, meas_rep, prep_rep, trans_rep_family, trans_rep_unchecked,
};
use epiphase::hilbert::{self, quantum_probability, OperatorMatrix, PhasePointBasis, Transformation};
use epiphase::phasespace::{PhaseSpace, SpecialSubgroup};
use epiphase::reconstruct::{
    check_prep_meas, check_prep_trans, check_trans_meas, check_trans_trans,
    reconstruct_probability, validate_preparation, ExperimentRecord,
};

use crate::config::{OutputFormat, RunConfig};
use crate::render::check_line;
use crate::schema::{CheckReport, FrameworkCounts, VerifyReport};

/// Validation gate for internally generated objects: they are valid up to
/// roundoff, so judging them with an ultra-tight verification tolerance
/// would reject sound inputs rather than measure residuals.
fn construction_tol(config: &RunConfig) -> f64 {
    config.tol.max(epiphase::DEFAULT_TOL)
}

pub fn run(config: &RunConfig) -> Result<bool> {
    let space = PhaseSpace::new(config.dimension)?;
    let basis = PhasePointBasis::new(&space);
    let subgroup = space
        .special_subgroup()
        .ok_or_else(|| anyhow::anyhow!("no special subgroup found for d = {}", config.dimension))?;

    let mut checks = Vec::new();
    checks.push(reconstruction_check(config, &space, &basis, &subgroup));
    checks.push(nonnegativity_check(config, &space, &basis, &subgroup));
    checks.extend(composition_checks(config, &space, &basis, &subgroup));
    checks.push(purity_check(config, &space, &basis));

    let pass = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        schema: 1,
        command: "verify",
        dimension: config.dimension,
        seed: config.seed,
        trials: config.trials,
        tolerance: config.tol,
        framework_counts: FrameworkCounts {
            striations: space.striation_count(),
            subgroup_order: subgroup.len(),
            coherent_one_step: coherent_frameworks(&space, &subgroup, 1).len(),
            coherent_two_step: coherent_frameworks(&space, &subgroup, 2).len(),
        },
        checks,
        pass,
    };

    match config.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(&report)?),
        OutputFormat::Text => {
            println!(
                "verify  d={}  seed={}  trials={}  tol={:.1e}",
                report.dimension, report.seed, report.trials, report.tolerance
            );
            println!(
                "frameworks: {} striations x subgroup order {}; coherent: {} (one step), {} (two steps)",
                report.framework_counts.striations,
                report.framework_counts.subgroup_order,
                report.framework_counts.coherent_one_step,
                report.framework_counts.coherent_two_step,
            );
            for check in &report.checks {
                println!("{}", check_line(check.name, check.worst, check.threshold, check.pass));
            }
            println!("overall: {}", if report.pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(pass)
}

fn reconstruction_check(
    config: &RunConfig,
    space: &PhaseSpace,
    basis: &PhasePointBasis,
    subgroup: &SpecialSubgroup,
) -> CheckReport {
    let d = space.dim() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x7ec0);
    let mut worst = 0.0f64;
    for trial in 0..config.trials {
        let w = hilbert::random::density(d, &mut rng);
        let e = hilbert::random::povm_element(d, &mut rng);
        let chain: Vec<Transformation> = (0..trial % 3)
            .map(|_| hilbert::random::unitary_channel(d, &mut rng))
            .collect();
        let record =
            ExperimentRecord::from_oracle(space, basis, subgroup, w, chain, e, construction_tol(config))
                .expect("random experiments are valid");
        let reconstructed = reconstruct_probability(space, &record).expect("complete record");
        let oracle = record.oracle_probability(basis).expect("oracle attached").expect("valid");
        worst = worst.max((reconstructed - oracle).abs());
    }
    CheckReport {
        name: "reconstruction-equivalence",
        worst,
        threshold: config.tol,
        pass: worst < config.tol,
    }
}

fn nonnegativity_check(
    config: &RunConfig,
    space: &PhaseSpace,
    basis: &PhasePointBasis,
    subgroup: &SpecialSubgroup,
) -> CheckReport {
    let d = space.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x0e9);
    let group = space.symplectic_group().to_vec();
    let mut min_entry = f64::INFINITY;
    for _ in 0..config.trials {
        let tr = hilbert::random::unitary_channel(d as usize, &mut rng);
        let quasi = basis
            .transition_quasi(&tr, construction_tol(config))
            .expect("unitary channels are unital");
        if d == 2 {
            for &s in subgroup.elements() {
                let rep = trans_rep_unchecked(space, &quasi, s);
                min_entry = min_entry.min(rep.min_entry());
            }
        } else {
            let s = group[rng.random_range(0..group.len())];
            let rep = trans_rep_unchecked(space, &quasi, s);
            min_entry = min_entry.min(rep.min_entry());
        }
    }
    CheckReport {
        name: "transition-nonnegativity",
        worst: min_entry,
        threshold: -config.tol,
        pass: min_entry >= -config.tol,
    }
}

fn composition_checks(
    config: &RunConfig,
    space: &PhaseSpace,
    basis: &PhasePointBasis,
    subgroup: &SpecialSubgroup,
) -> Vec<CheckReport> {
    let d = space.dim() as usize;
    let striations = space.striation_count();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xc03);
    let mut worst = [0.0f64; 4];
    for _ in 0..config.trials {
        let w = hilbert::random::density(d, &mut rng);
        let e = hilbert::random::povm_element(d, &mut rng);
        let t1 = hilbert::random::unitary_channel(d, &mut rng);
        let t2 = hilbert::random::unitary_channel(d, &mut rng);

        let gate = construction_tol(config);
        let q1 = basis.transition_quasi(&t1, gate).expect("unital");
        let q2 = basis.transition_quasi(&t2, gate).expect("unital");
        let reps1 = trans_rep_family(space, &q1, subgroup, gate).expect("non-negative");
        let reps2 = trans_rep_family(space, &q2, subgroup, gate).expect("non-negative");
        let preps: Vec<_> = (0..striations).map(|b| prep_rep(space, basis, &w, b)).collect();
        let meass: Vec<_> = (0..striations).map(|b| meas_rep(space, basis, &e, b)).collect();

        let w1 = OperatorMatrix::generic_hermitian(t1.apply(basis, w.matrix()), gate)
            .expect("channel output is Hermitian");
        let out_prep: Vec<_> = (0..striations).map(|b| prep_rep(space, basis, &w1, b)).collect();
        worst[0] = worst[0].max(check_prep_trans(space, &preps, &reps1, &out_prep).max_abs_dev);

        let composite =
            trans_rep_family(space, &q2.compose(&q1), subgroup, gate).expect("non-negative");
        worst[1] = worst[1].max(check_trans_trans(space, &reps1, &reps2, &composite).max_abs_dev);

        let e1 = OperatorMatrix::generic_hermitian(t1.apply_adjoint(basis, e.matrix()), gate)
            .expect("adjoint output is Hermitian");
        let out_meas: Vec<_> = (0..striations).map(|b| meas_rep(space, basis, &e1, b)).collect();
        worst[2] = worst[2].max(check_trans_meas(space, &meass, &reps1, &out_meas).max_abs_dev);

        let oracle = quantum_probability(basis, &e, &[], &w).expect("dimensions match");
        worst[3] = worst[3].max(check_prep_meas(space, &preps, &meass, Some(oracle)).max_abs_dev);
    }
    let names = [
        "composition-rule-1",
        "composition-rule-2",
        "composition-rule-3",
        "composition-rule-4",
    ];
    names
        .iter()
        .zip(worst)
        .map(|(name, w)| CheckReport {
            name,
            worst: w,
            threshold: config.tol,
            pass: w < config.tol,
        })
        .collect()
}

fn purity_check(config: &RunConfig, space: &PhaseSpace, basis: &PhasePointBasis) -> CheckReport {
    let d = space.dim() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0x9u64);
    let mut worst = 0.0f64;
    let mut bound = 0.0;
    for _ in 0..config.trials {
        let w = hilbert::random::density(d, &mut rng);
        let preps: Vec<_> =
            (0..space.striation_count()).map(|b| prep_rep(space, basis, &w, b)).collect();
        let verdict = validate_preparation(space, &preps);
        worst = worst.max(verdict.sum);
        bound = verdict.bound;
    }
    CheckReport {
        name: "purity-bound",
        worst,
        threshold: bound,
        pass: worst <= bound + epiphase::reconstruct::PURITY_BOUNDARY_SLACK,
    }
}

//! Summing the nonrandom parts: reconstruction of quantum predictions from
//! the classical descriptions, the composition rules, and the validity
//! criteria they imply.
//!
//! The *nonrandom part* of a probability is its deviation from the value a
//! minimally informed observer would assign: 1/d^2 per point for
//! distributions over phase space, `tr(E)/d` for outcome probabilities.
//! Each coherent framework produces an ordinary classical prediction; the
//! quantum prediction is recovered by adding all their nonrandom parts to
//! the minimal-knowledge value. The same principle — sum the nonrandom
//! parts over all frameworks consistent with the output — combines any two
//! experiment components, which yields four composition rules. Those rules,
//! in turn, power validators: a preparation is only consistent with them if
//! the purity sum `sum_{B,alpha} R^B(alpha|w)^2` stays within 2/d.

use alloc::vec::Vec;

use crate::epistemic::{meas_rep, prep_rep, trans_rep_family, MeasRep, PrepRep, TransRep};
use crate::hilbert::{
    quantum_probability, OperatorMatrix, PhasePointBasis, TransQuasi, Transformation,
};
use crate::phasespace::{PhasePoint, PhaseSpace, SpecialSubgroup};
use crate::Error;

/// Nonrandom part of an outcome probability.
pub fn nonrandom_p(p: f64, tr_e_over_d: f64) -> f64 {
    p - tr_e_over_d
}

/// The Hilbert-space side of an experiment, kept alongside its classical
/// record so reconstructions can be checked against the oracle.
#[derive(Clone, Debug)]
pub struct OracleExperiment {
    pub w: OperatorMatrix,
    pub chain: Vec<Transformation>,
    pub e: OperatorMatrix,
}

/// The complete classical record of an experiment: one preparation table
/// per striation, one transition table per subgroup element per step, one
/// measurement table per striation.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    prep: Vec<PrepRep>,
    chain: Vec<Vec<TransRep>>,
    meas: Vec<MeasRep>,
    subgroup: SpecialSubgroup,
    oracle: Option<OracleExperiment>,
}

impl ExperimentRecord {
    /// Decomposes a Hilbert-space experiment into its full classical record.
    pub fn from_oracle(
        space: &PhaseSpace,
        basis: &PhasePointBasis,
        subgroup: &SpecialSubgroup,
        w: OperatorMatrix,
        chain: Vec<Transformation>,
        e: OperatorMatrix,
        tol: f64,
    ) -> Result<Self, Error> {
        let prep =
            (0..space.striation_count()).map(|b| prep_rep(space, basis, &w, b)).collect();
        let meas =
            (0..space.striation_count()).map(|b| meas_rep(space, basis, &e, b)).collect();
        let chain_reps = chain
            .iter()
            .map(|tr| {
                let quasi = basis.transition_quasi(tr, tol)?;
                trans_rep_family(space, &quasi, subgroup, tol)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            prep,
            chain: chain_reps,
            meas,
            subgroup: subgroup.clone(),
            oracle: Some(OracleExperiment { w, chain, e }),
        })
    }

    /// Assembles a record directly from classical tables (no oracle side).
    pub fn from_tables(
        prep: Vec<PrepRep>,
        chain: Vec<Vec<TransRep>>,
        meas: Vec<MeasRep>,
        subgroup: SpecialSubgroup,
    ) -> Self {
        Self { prep, chain, meas, subgroup, oracle: None }
    }

    pub fn prep(&self) -> &[PrepRep] {
        &self.prep
    }

    pub fn chain(&self) -> &[Vec<TransRep>] {
        &self.chain
    }

    pub fn meas(&self) -> &[MeasRep] {
        &self.meas
    }

    pub fn subgroup(&self) -> &SpecialSubgroup {
        &self.subgroup
    }

    pub fn oracle(&self) -> Option<&OracleExperiment> {
        self.oracle.as_ref()
    }

    /// The oracle probability `tr[E chain(w)]`, when the oracle is attached.
    pub fn oracle_probability(&self, basis: &PhasePointBasis) -> Option<Result<f64, Error>> {
        let oracle = self.oracle.as_ref()?;
        Some(quantum_probability(basis, &oracle.e, &oracle.chain, &oracle.w))
    }

    fn validate_completeness(&self, space: &PhaseSpace) -> Result<(), Error> {
        let striations = space.striation_count();
        let order = self.subgroup.len();
        if self.prep.len() != striations || self.meas.len() != striations {
            return Err(Error::IncompleteRecord {
                reason: alloc::format!(
                    "need one preparation and one measurement table per striation ({striations})"
                ),
            });
        }
        if self.chain.iter().any(|step| step.len() != order) {
            return Err(Error::IncompleteRecord {
                reason: alloc::format!(
                    "each chain step needs one transition table per subgroup element ({order})"
                ),
            });
        }
        Ok(())
    }
}

/// Reconstructs the outcome probability by summing the nonrandom parts of
/// every coherent framework's classical prediction:
/// `P = tr(E)/d + sum_F [P_F - tr(E)/d]`.
pub fn reconstruct_probability(
    space: &PhaseSpace,
    record: &ExperimentRecord,
) -> Result<f64, Error> {
    record.validate_completeness(space)?;
    let d = space.dim();
    let tr_e_over_d = record.meas[0].trace_e(d) / d as f64;

    // In Delta space the random parts drop out: with zero-sum vectors on
    // both ends, applying the plain transition tables equals applying their
    // nonrandom parts, so Delta P_F = Delta meas . R^(Sn) ... R^(S1) . Delta prep.
    let delta_prep: Vec<Vec<f64>> = record.prep.iter().map(|p| p.nonrandom()).collect();
    let delta_meas: Vec<Vec<f64>> = record.meas.iter().map(|m| m.nonrandom()).collect();

    let steps = record.chain.len();
    let mut delta_p = 0.0;

    if steps == 0 {
        for (p, m) in delta_prep.iter().zip(&delta_meas) {
            delta_p += dot(m, p);
        }
        return Ok(tr_e_over_d + delta_p);
    }

    // Pull the measurement vectors back through the last step once, instead
    // of once per chain prefix.
    let last = &record.chain[steps - 1];
    let pulled: Vec<Vec<Vec<f64>>> = last
        .iter()
        .map(|rep| delta_meas.iter().map(|m| rep.apply_vec_transpose(m)).collect())
        .collect();

    for (b0, dp) in delta_prep.iter().enumerate() {
        let mut stack = alloc::vec![(0usize, b0, dp.clone())];
        while let Some((depth, striation, v)) = stack.pop() {
            if depth == steps - 1 {
                for (s_idx, rep) in last.iter().enumerate() {
                    let meas_striation = space.map_striation(rep.framework(), striation);
                    delta_p += dot(&pulled[s_idx][meas_striation], &v);
                }
            } else {
                for rep in &record.chain[depth] {
                    let image = space.map_striation(rep.framework(), striation);
                    stack.push((depth + 1, image, rep.apply_vec(&v)));
                }
            }
        }
    }

    Ok(tr_e_over_d + delta_p)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Inverts the class-averaging: `Q(beta|alpha) = 1/d^2 + sum_S Delta R^S`.
/// Requires exactly one table per subgroup element.
pub fn quasi_from_reps(
    space: &PhaseSpace,
    reps: &[TransRep],
    subgroup: &SpecialSubgroup,
) -> Result<TransQuasi, Error> {
    let covered =
        subgroup.elements().iter().all(|&s| reps.iter().any(|r| r.framework() == s));
    if reps.len() != subgroup.len() || !covered {
        return Err(Error::IncompleteRecord {
            reason: alloc::format!(
                "quasiprobability inversion needs one table per subgroup element ({})",
                subgroup.len()
            ),
        });
    }
    let d = space.dim();
    let n = space.point_count();
    let random = 1.0 / n as f64;
    let mut table = alloc::vec![0.0; n * n];
    for b_idx in 0..n {
        let beta = PhasePoint::from_index(b_idx, d);
        for a_idx in 0..n {
            let alpha = PhasePoint::from_index(a_idx, d);
            let delta_sum: f64 = reps.iter().map(|r| r.value(beta, alpha) - random).sum();
            table[b_idx * n + a_idx] = random + delta_sum;
        }
    }
    Ok(TransQuasi::new(d, table))
}

/// Both sides of a composition rule, flattened, with their largest
/// pointwise deviation. The caller applies whatever tolerance is
/// appropriate; a large residual is a result (the rule detected an invalid
/// combination), not an error.
#[derive(Clone, Debug)]
pub struct RuleCheck {
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub max_abs_dev: f64,
}

impl RuleCheck {
    fn from_sides(lhs: Vec<f64>, rhs: Vec<f64>) -> Self {
        let max_abs_dev =
            lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Self { lhs, rhs, max_abs_dev }
    }
}

/// Rule 1 — a preparation followed by a transformation is a preparation:
/// for every output striation B',
/// `Delta R^B'(beta|E(w)) = sum_{SB=B'} Delta[ sum_alpha R^S(beta|alpha) R^B(alpha|w) ]`.
///
/// `out_prep` holds the tables of the transformed preparation. Layout of
/// the returned sides: striation-major, then point index.
pub fn check_prep_trans(
    space: &PhaseSpace,
    prep: &[PrepRep],
    trans: &[TransRep],
    out_prep: &[PrepRep],
) -> RuleCheck {
    let n = space.point_count();
    let random = 1.0 / n as f64;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for out in out_prep {
        lhs.extend(out.nonrandom());
        let mut side = alloc::vec![0.0; n];
        for rep in trans {
            let source =
                space.map_striation(rep.framework().inverse(space.dim()), out.striation());
            let pushed = rep.apply_vec(prep[source].values());
            for (slot, v) in side.iter_mut().zip(&pushed) {
                *slot += v - random;
            }
        }
        rhs.extend(side);
    }
    RuleCheck::from_sides(lhs, rhs)
}

/// Rule 2 — two transformations in sequence are a transformation: for every
/// output framework S,
/// `Delta R^S_(E2 o E1) = sum_{S2 S1 = S} Delta[ sum_beta R^S2_E2(gamma|beta) R^S1_E1(beta|alpha) ]`.
///
/// `first` acts first. Layout of the returned sides: subgroup-element-major
/// (order of `composite`), then displacement-class index.
pub fn check_trans_trans(
    space: &PhaseSpace,
    first: &[TransRep],
    second: &[TransRep],
    composite: &[TransRep],
) -> RuleCheck {
    let d = space.dim();
    let n = space.point_count();
    let random = 1.0 / n as f64;
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for out in composite {
        lhs.extend(out.nonrandom_class_values());
        let mut side = alloc::vec![0.0; n];
        for rep2 in second {
            // the unique partner with S2 S1 = S
            let s1 = rep2.framework().inverse(d).mul(out.framework(), d);
            let rep1 = first
                .iter()
                .find(|r| r.framework() == s1)
                .expect("transition families cover the subgroup");
            // a product of class-constant tables is class-constant for S2 S1:
            // g(delta) = sum_d1 f2(delta - S2 d1) f1(d1)
            for (delta_idx, slot) in side.iter_mut().enumerate() {
                let delta = PhasePoint::from_index(delta_idx, d);
                let mut product = 0.0;
                for d1_idx in 0..n {
                    let d1 = PhasePoint::from_index(d1_idx, d);
                    let d2 = delta.sub(rep2.framework().apply(d1, d), d);
                    product += rep2.class_value(d2) * rep1.class_value(d1);
                }
                *slot += product - random;
            }
        }
        rhs.extend(side);
    }
    RuleCheck::from_sides(lhs, rhs)
}

/// Rule 3 — a transformation followed by a measurement outcome is a
/// measurement outcome: for every output striation B',
/// `Delta R^B'(E'|alpha) = sum_{S^-1 B = B'} Delta[ sum_beta R^B(E|beta) R^S(beta|alpha) ]`,
/// with E' the outcome equivalent to transforming and then measuring E.
pub fn check_trans_meas(
    space: &PhaseSpace,
    meas: &[MeasRep],
    trans: &[TransRep],
    out_meas: &[MeasRep],
) -> RuleCheck {
    let n = space.point_count();
    let mut lhs = Vec::new();
    let mut rhs = Vec::new();
    for out in out_meas {
        lhs.extend(out.nonrandom());
        let mut side = alloc::vec![0.0; n];
        for rep in trans {
            let source = space.map_striation(rep.framework(), out.striation());
            let pulled = rep.apply_vec_transpose(meas[source].values());
            let random: f64 = pulled.iter().sum::<f64>() / n as f64;
            for (slot, v) in side.iter_mut().zip(&pulled) {
                *slot += v - random;
            }
        }
        rhs.extend(side);
    }
    RuleCheck::from_sides(lhs, rhs)
}

/// Outcome of rule 4: the probability the classical tables assign to the
/// outcome, and the deviation from the oracle value when one is supplied.
#[derive(Clone, Debug)]
pub struct OutcomeCheck {
    pub p_reconstructed: f64,
    pub p_oracle: Option<f64>,
    pub max_abs_dev: f64,
}

/// Rule 4 — a preparation and a measurement outcome give a probability:
/// `Delta P(E|w) = sum_B Delta[ sum_alpha R^B(E|alpha) R^B(alpha|w) ]`.
/// The reconstructed P need not be a legitimate probability for arbitrary
/// tables; that is exactly what the validity criteria screen for.
pub fn check_prep_meas(
    space: &PhaseSpace,
    prep: &[PrepRep],
    meas: &[MeasRep],
    p_oracle: Option<f64>,
) -> OutcomeCheck {
    let d = space.dim();
    let tr_e_over_d = meas[0].trace_e(d) / d as f64;
    let mut delta_p = 0.0;
    for (p, m) in prep.iter().zip(meas) {
        let classical: f64 = dot(m.values(), p.values());
        delta_p += classical - tr_e_over_d;
    }
    let p_reconstructed = tr_e_over_d + delta_p;
    let max_abs_dev = p_oracle.map(|p| (p - p_reconstructed).abs()).unwrap_or(0.0);
    OutcomeCheck { p_reconstructed, p_oracle, max_abs_dev }
}

/// Verdict of the purity bound `sum_{B,alpha} R^B(alpha|w)^2 <= 2/d`.
///
/// For a qubit the bound is the complete validity criterion for
/// preparations; for d > 2 passing it is necessary but not sufficient,
/// which `complete_criterion` records.
#[derive(Clone, Copy, Debug)]
pub struct PurityVerdict {
    pub sum: f64,
    pub bound: f64,
    pub pass: bool,
    pub complete_criterion: bool,
}

/// Slack admitted at the purity boundary, where pure states sit exactly.
pub const PURITY_BOUNDARY_SLACK: f64 = 1e-12;

pub fn validate_preparation(space: &PhaseSpace, prep: &[PrepRep]) -> PurityVerdict {
    let d = space.dim();
    let sum = prep.iter().flat_map(|rep| rep.values().iter().map(|v| v * v)).sum::<f64>();
    let bound = 2.0 / d as f64;
    PurityVerdict {
        sum,
        bound,
        pass: sum <= bound + PURITY_BOUNDARY_SLACK,
        complete_criterion: d == 2,
    }
}

/// Assumption A: every preparation has a partner measurement outcome with
/// `R^B(E|alpha) = d R^B(alpha|w)` (its random part is then 1/d).
pub fn assumption_a_partner(space: &PhaseSpace, prep: &[PrepRep]) -> Vec<MeasRep> {
    let d = space.dim();
    prep.iter()
        .map(|rep| {
            let line_values: Vec<f64> = space
                .striation(rep.striation())
                .lines()
                .iter()
                .map(|line| d as f64 * rep.value(line.points()[0], d))
                .collect();
            MeasRep::from_line_values(space, rep.striation(), &line_values)
        })
        .collect()
}

/// Assumption B: the transition tables of the inverse transformation are
/// `R^S_(E^-1)(beta|alpha) = R^(S^-1)_E(alpha|beta)`. Fails with
/// [`Error::NotInvertible`] when the family does not describe an invertible
/// map (checked by composing the implied quasiprobability matrices).
pub fn assumption_b_inverse(
    space: &PhaseSpace,
    reps: &[TransRep],
    subgroup: &SpecialSubgroup,
    tol: f64,
) -> Result<Vec<TransRep>, Error> {
    let d = space.dim();
    let n = space.point_count();
    let partners: Vec<TransRep> = reps
        .iter()
        .map(|rep| {
            let s = rep.framework();
            let s_inv = s.inverse(d);
            let source = reps
                .iter()
                .find(|r| r.framework() == s_inv)
                .expect("transition families cover the subgroup");
            // transposing a class-constant table maps the class of delta to
            // the class of -S^-1 delta
            let class_values = (0..n)
                .map(|delta_idx| {
                    let delta = PhasePoint::from_index(delta_idx, d);
                    let origin = PhasePoint { q: 0, p: 0 };
                    let mirrored = origin.sub(s_inv.apply(delta, d), d);
                    source.class_value(mirrored)
                })
                .collect();
            TransRep::from_class_values(d, s, class_values)
        })
        .collect();

    let q_forward = quasi_from_reps(space, reps, subgroup)?;
    let q_backward = quasi_from_reps(space, &partners, subgroup)?;
    let composed = q_backward.compose(&q_forward);
    let mut residual = 0.0f64;
    for b in 0..n {
        for a in 0..n {
            let target = if a == b { 1.0 } else { 0.0 };
            residual = residual.max((composed.get_by_index(b, a) - target).abs());
        }
    }
    if residual > tol {
        return Err(Error::NotInvertible { residual });
    }
    Ok(partners)
}

//! Epistemically restricted classical probability functions.
//!
//! A *framework* fixes the epistemic restriction a classical description
//! must satisfy: a striation B for preparations and measurement outcomes
//! (the function must be constant along each line of B), or a symplectic
//! matrix S for transformations (the transition probabilities must be
//! constant on each displacement class `beta - S alpha = delta`).
//!
//! The R-functions are defined from the Hilbert-space description through
//! the line projectors and transition quasiprobabilities:
//!
//! ```text
//! R^B(alpha | w) = <psi_l| w |psi_l> / d          (preparation)
//! R^B(E | alpha) = <psi_l| E |psi_l>              (measurement outcome)
//! R^S(beta | alpha) = sum_mu Q(S mu + delta | mu) / d^2,  delta = beta - S alpha
//! ```
//!
//! and are genuinely non-negative, unlike the quasiprobabilities they are
//! built from. Values are computed once per line (or per displacement
//! class) and broadcast, so the epistemic constraint holds bit-exactly by
//! construction.

use alloc::vec::Vec;

use crate::hilbert::{OperatorMatrix, PhasePointBasis, TransQuasi};
use crate::phasespace::{PhasePoint, PhaseSpace, SpecialSubgroup, SymplecticMatrix};
use crate::Error;

/// Probability distribution over phase space describing a preparation
/// within the framework of striation `striation`.
#[derive(Clone, Debug, PartialEq)]
pub struct PrepRep {
    striation: usize,
    values: Vec<f64>,
}

impl PrepRep {
    /// Builds the distribution from per-line values (indexed by line offset).
    pub fn from_line_values(space: &PhaseSpace, striation: usize, line_values: &[f64]) -> Self {
        let d = space.dim();
        let values = (0..space.point_count())
            .map(|i| line_values[space.line_index(striation, PhasePoint::from_index(i, d))])
            .collect();
        Self { striation, values }
    }

    pub fn striation(&self) -> usize {
        self.striation
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, alpha: PhasePoint, d: u32) -> f64 {
        self.values[alpha.index(d)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Nonrandom part: deviation from the uniform distribution 1/d^2.
    pub fn nonrandom(&self) -> Vec<f64> {
        let random = 1.0 / self.values.len() as f64;
        self.values.iter().map(|v| v - random).collect()
    }
}

/// Conditional outcome probability function of a measurement outcome within
/// the framework of striation `striation`; normalized to `d tr E`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasRep {
    striation: usize,
    values: Vec<f64>,
}

impl MeasRep {
    pub fn from_line_values(space: &PhaseSpace, striation: usize, line_values: &[f64]) -> Self {
        let d = space.dim();
        let values = (0..space.point_count())
            .map(|i| line_values[space.line_index(striation, PhasePoint::from_index(i, d))])
            .collect();
        Self { striation, values }
    }

    pub fn striation(&self) -> usize {
        self.striation
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, alpha: PhasePoint, d: u32) -> f64 {
        self.values[alpha.index(d)]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// The operator trace implied by the normalization `sum = d tr E`.
    pub fn trace_e(&self, d: u32) -> f64 {
        self.sum() / d as f64
    }

    /// Nonrandom part: deviation from the outcome probability the uniform
    /// distribution would give, `sum_gamma R(gamma) / d^2` per point.
    pub fn nonrandom(&self) -> Vec<f64> {
        let random = self.sum() / self.values.len() as f64;
        self.values.iter().map(|v| v - random).collect()
    }
}

/// Classical transition probabilities of a transformation within the
/// framework of the symplectic matrix S, stored as one value per
/// displacement class.
#[derive(Clone, Debug, PartialEq)]
pub struct TransRep {
    d: u32,
    s: SymplecticMatrix,
    /// value of the class with displacement delta, indexed by delta
    class_values: Vec<f64>,
}

impl TransRep {
    pub fn from_class_values(d: u32, s: SymplecticMatrix, class_values: Vec<f64>) -> Self {
        assert_eq!(class_values.len(), (d * d) as usize);
        Self { d, s, class_values }
    }

    pub fn framework(&self) -> SymplecticMatrix {
        self.s
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn class_values(&self) -> &[f64] {
        &self.class_values
    }

    pub fn class_value(&self, delta: PhasePoint) -> f64 {
        self.class_values[delta.index(self.d)]
    }

    /// `R(beta | alpha)`, looked up through the displacement class.
    pub fn value(&self, beta: PhasePoint, alpha: PhasePoint) -> f64 {
        let delta = beta.sub(self.s.apply(alpha, self.d), self.d);
        self.class_values[delta.index(self.d)]
    }

    pub fn min_entry(&self) -> f64 {
        self.class_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_entry(&self) -> f64 {
        self.class_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Every row and every column of the full table sums to the total
    /// class sum, so double stochasticity is one number.
    pub fn class_sum(&self) -> f64 {
        self.class_values.iter().sum()
    }

    /// Applies the transition table to a distribution over phase space:
    /// `out(beta) = sum_alpha R(beta|alpha) v(alpha)`.
    pub fn apply_vec(&self, v: &[f64]) -> Vec<f64> {
        let d = self.d;
        let n = (d * d) as usize;
        let mut out = alloc::vec![0.0; n];
        for (a_idx, &weight) in v.iter().enumerate() {
            let image = self.s.apply(PhasePoint::from_index(a_idx, d), d);
            for (b_idx, slot) in out.iter_mut().enumerate() {
                let delta = PhasePoint::from_index(b_idx, d).sub(image, d);
                *slot += self.class_values[delta.index(d)] * weight;
            }
        }
        out
    }

    /// Applies the transposed table: `out(alpha) = sum_beta R(beta|alpha) v(beta)`.
    pub fn apply_vec_transpose(&self, v: &[f64]) -> Vec<f64> {
        let d = self.d;
        let n = (d * d) as usize;
        let mut out = alloc::vec![0.0; n];
        for (a_idx, slot) in out.iter_mut().enumerate() {
            let image = self.s.apply(PhasePoint::from_index(a_idx, d), d);
            for (b_idx, &weight) in v.iter().enumerate() {
                let delta = PhasePoint::from_index(b_idx, d).sub(image, d);
                *slot += self.class_values[delta.index(d)] * weight;
            }
        }
        out
    }

    /// The full d^2 x d^2 table, row-major in (beta, alpha).
    pub fn to_table(&self) -> Vec<f64> {
        let d = self.d;
        let n = (d * d) as usize;
        let mut table = alloc::vec![0.0; n * n];
        for b_idx in 0..n {
            for a_idx in 0..n {
                table[b_idx * n + a_idx] = self
                    .value(PhasePoint::from_index(b_idx, d), PhasePoint::from_index(a_idx, d));
            }
        }
        table
    }

    /// Nonrandom part of the class values (full-table deviation from 1/d^2).
    pub fn nonrandom_class_values(&self) -> Vec<f64> {
        let random = 1.0 / self.class_values.len() as f64;
        self.class_values.iter().map(|v| v - random).collect()
    }
}

/// Preparation R-function: `R^B(alpha|w) = tr(P_l w) / d` on each line l.
pub fn prep_rep(
    space: &PhaseSpace,
    basis: &PhasePointBasis,
    w: &OperatorMatrix,
    striation: usize,
) -> PrepRep {
    let d = space.dim();
    let line_values: Vec<f64> = (0..d as usize)
        .map(|line| {
            basis.line_projector(striation, line).trace_product_re(w.matrix()) / d as f64
        })
        .collect();
    PrepRep::from_line_values(space, striation, &line_values)
}

/// Measurement R-function: `R^B(E|alpha) = tr(P_l E)` on each line l.
pub fn meas_rep(
    space: &PhaseSpace,
    basis: &PhasePointBasis,
    e: &OperatorMatrix,
    striation: usize,
) -> MeasRep {
    let line_values: Vec<f64> = (0..space.dim() as usize)
        .map(|line| basis.line_projector(striation, line).trace_product_re(e.matrix()))
        .collect();
    MeasRep::from_line_values(space, striation, &line_values)
}

/// Transition R-function: the quasiprobability averaged over each
/// displacement class of S,
/// `R^S(beta|alpha) = sum_mu Q(S mu + delta | mu) / d^2`.
///
/// Negativity beyond `tol` means the underlying map is invalid or S lies
/// outside the allowed set (at d = 2 only the special subgroup guarantees
/// non-negativity; odd primes accept any symplectic S).
pub fn trans_rep(
    space: &PhaseSpace,
    quasi: &TransQuasi,
    s: SymplecticMatrix,
    tol: f64,
) -> Result<TransRep, Error> {
    let rep = trans_rep_unchecked(space, quasi, s);
    let min = rep.min_entry();
    if min < -tol {
        return Err(Error::NegativeTransitionProbability { min });
    }
    Ok(rep)
}

/// [`trans_rep`] without the non-negativity gate, for diagnostics and for
/// maps that are knowingly outside the formalism (such as the inversion).
pub fn trans_rep_unchecked(
    space: &PhaseSpace,
    quasi: &TransQuasi,
    s: SymplecticMatrix,
) -> TransRep {
    let d = space.dim();
    let n = space.point_count();
    let class_values = (0..n)
        .map(|delta_idx| {
            let delta = PhasePoint::from_index(delta_idx, d);
            let mut acc = 0.0;
            for mu_idx in 0..n {
                let mu = PhasePoint::from_index(mu_idx, d);
                let target = s.apply(mu, d).add(delta, d);
                acc += quasi.get(target, mu);
            }
            acc / n as f64
        })
        .collect();
    TransRep { d, s, class_values }
}

/// All transition R-functions of a transformation, one per element of the
/// special subgroup, in subgroup element order.
pub fn trans_rep_family(
    space: &PhaseSpace,
    quasi: &TransQuasi,
    subgroup: &SpecialSubgroup,
    tol: f64,
) -> Result<Vec<TransRep>, Error> {
    subgroup.elements().iter().map(|&s| trans_rep(space, quasi, s, tol)).collect()
}

/// A framework for a whole experiment: a preparation striation, one
/// symplectic matrix per transformation step, and a measurement striation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Framework {
    pub prep: usize,
    pub chain: Vec<SymplecticMatrix>,
    pub meas: usize,
}

impl Framework {
    /// The image striation `S_n ... S_1 B` of the preparation striation.
    pub fn chain_image(&self, space: &PhaseSpace) -> usize {
        self.chain.iter().fold(self.prep, |b, &s| space.map_striation(s, b))
    }

    /// Coherent means the measurement striation is the chain image of the
    /// preparation striation; only coherent frameworks contribute to
    /// predictions.
    pub fn is_coherent(&self, space: &PhaseSpace) -> bool {
        self.chain_image(space) == self.meas
    }
}

/// Enumerates all coherent frameworks with an n-step chain over the given
/// subgroup: `(d+1) * (d^2-1)^n` of them.
pub fn coherent_frameworks(
    space: &PhaseSpace,
    subgroup: &SpecialSubgroup,
    chain_length: usize,
) -> Vec<Framework> {
    let mut out = Vec::new();
    let mut chain = alloc::vec![SymplecticMatrix::identity(); chain_length];
    for prep in 0..space.striation_count() {
        enumerate_chains(space, subgroup, prep, 0, &mut chain, &mut out);
    }
    out
}

fn enumerate_chains(
    space: &PhaseSpace,
    subgroup: &SpecialSubgroup,
    prep: usize,
    depth: usize,
    chain: &mut Vec<SymplecticMatrix>,
    out: &mut Vec<Framework>,
) {
    if depth == chain.len() {
        let fw = Framework { prep, chain: chain.clone(), meas: 0 };
        let meas = fw.chain_image(space);
        out.push(Framework { meas, ..fw });
        return;
    }
    for &s in subgroup.elements() {
        chain[depth] = s;
        enumerate_chains(space, subgroup, prep, depth + 1, chain, out);
    }
}

/// The classical prediction of one framework:
/// `P = sum_{alpha beta} R^B'(E|beta) R^S(beta|alpha) R^B(alpha|w)`,
/// extended through the chain by matrix action. The framework must be
/// coherent; use [`framework_prediction_unchecked`] to probe incoherent
/// ones diagnostically.
pub fn framework_prediction(
    space: &PhaseSpace,
    meas: &MeasRep,
    chain: &[TransRep],
    prep: &PrepRep,
) -> Result<f64, Error> {
    let image =
        chain.iter().fold(prep.striation, |b, rep| space.map_striation(rep.framework(), b));
    if image != meas.striation {
        return Err(Error::IncoherentFramework { prep: prep.striation, meas: meas.striation });
    }
    Ok(framework_prediction_unchecked(meas, chain, prep))
}

pub fn framework_prediction_unchecked(meas: &MeasRep, chain: &[TransRep], prep: &PrepRep) -> f64 {
    let mut v = prep.values.clone();
    for rep in chain {
        v = rep.apply_vec(&v);
    }
    meas.values.iter().zip(&v).map(|(m, x)| m * x).sum()
}

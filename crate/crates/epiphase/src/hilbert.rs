//! Standard Hilbert-space machinery: the oracle every phase-space
//! reconstruction in this crate is checked against.
//!
//! The central objects are the phase-point operators A_alpha. For odd prime
//! d they are
//!
//! ```text
//! (A_alpha)_kl = delta(2 alpha_q, k + l) * omega^(alpha_p (k - l)),   omega = e^(2 pi i / d)
//! ```
//!
//! with index arithmetic mod d, while d = 2 uses the Pauli expansion
//! `A_alpha = (I + (-1)^p X + (-1)^(q+p) Y + (-1)^q Z) / 2`. They are
//! trace-one, Hermitian, and Hilbert-Schmidt orthogonal, `tr(A_a A_b) =
//! d delta_ab`, which makes them a basis: the expansion coefficients of a
//! density matrix in this basis are its discrete Wigner function.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex;
// f64 math methods come from the Float trait in no_std builds
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::linalg::{C64, CMatrix};
use crate::phasespace::{PhasePoint, PhaseSpace};
use crate::Error;

/// Role tag determining which invariants an operator must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorRole {
    Density,
    PovmElement,
    Unitary,
    PhasePointOp,
    GenericHermitian,
}

impl OperatorRole {
    fn name(self) -> &'static str {
        match self {
            OperatorRole::Density => "density operator",
            OperatorRole::PovmElement => "POVM element",
            OperatorRole::Unitary => "unitary",
            OperatorRole::PhasePointOp => "phase-point operator",
            OperatorRole::GenericHermitian => "Hermitian operator",
        }
    }
}

/// A d x d complex matrix tagged with the role it plays in an experiment.
/// Construction validates the role's invariants at the given tolerance.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    role: OperatorRole,
    mat: CMatrix,
}

impl OperatorMatrix {
    pub fn density(mat: CMatrix, tol: f64) -> Result<Self, Error> {
        Self::validated(OperatorRole::Density, mat, tol)
    }

    pub fn povm_element(mat: CMatrix, tol: f64) -> Result<Self, Error> {
        Self::validated(OperatorRole::PovmElement, mat, tol)
    }

    pub fn unitary(mat: CMatrix, tol: f64) -> Result<Self, Error> {
        Self::validated(OperatorRole::Unitary, mat, tol)
    }

    pub fn generic_hermitian(mat: CMatrix, tol: f64) -> Result<Self, Error> {
        Self::validated(OperatorRole::GenericHermitian, mat, tol)
    }

    fn validated(role: OperatorRole, mat: CMatrix, tol: f64) -> Result<Self, Error> {
        let fail = |reason: String| Error::InvalidOperator { role: role.name(), reason };
        let hermitian_residual = |m: &CMatrix| m.max_abs_diff(&m.adjoint());
        match role {
            OperatorRole::Density => {
                if hermitian_residual(&mat) > tol {
                    return Err(fail("not Hermitian".into()));
                }
                if (mat.trace().re - 1.0).abs() > tol || mat.trace().im.abs() > tol {
                    return Err(fail("trace is not 1".into()));
                }
                let floor = mat.hermitian_eigenvalues()[0];
                if floor < -tol {
                    return Err(fail(alloc::format!("negative eigenvalue {floor:.3e}")));
                }
            }
            OperatorRole::PovmElement => {
                if hermitian_residual(&mat) > tol {
                    return Err(fail("not Hermitian".into()));
                }
                let eig = mat.hermitian_eigenvalues();
                let (lo, hi) = (eig[0], eig[eig.len() - 1]);
                if lo < -tol || hi > 1.0 + tol {
                    return Err(fail(alloc::format!(
                        "eigenvalues [{lo:.3e}, {hi:.3e}] outside [0, 1]"
                    )));
                }
            }
            OperatorRole::Unitary => {
                if !mat.is_unitary(tol) {
                    return Err(fail("U^dagger U differs from the identity".into()));
                }
            }
            OperatorRole::PhasePointOp | OperatorRole::GenericHermitian => {
                if hermitian_residual(&mat) > tol {
                    return Err(fail("not Hermitian".into()));
                }
            }
        }
        Ok(Self { role, mat })
    }

    pub fn role(&self) -> OperatorRole {
        self.role
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// A completely positive trace-preserving map given by Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Channel {
    kraus: Vec<CMatrix>,
}

impl Channel {
    /// Builds a channel, checking trace preservation `sum K^dagger K = I`.
    pub fn new(kraus: Vec<CMatrix>, tol: f64) -> Result<Self, Error> {
        assert!(!kraus.is_empty(), "a channel needs at least one Kraus operator");
        let d = kraus[0].dim();
        let mut acc = CMatrix::zeros(d);
        for k in &kraus {
            acc = acc.add(&k.adjoint().mul(k));
        }
        let residual = acc.max_abs_diff(&CMatrix::identity(d));
        if residual > tol {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self { kraus })
    }

    pub fn unitary(u: CMatrix, tol: f64) -> Result<Self, Error> {
        let u = OperatorMatrix::unitary(u, tol)?;
        Self::new(alloc::vec![u.mat], tol)
    }

    pub fn identity(d: usize) -> Self {
        Self { kraus: alloc::vec![CMatrix::identity(d)] }
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].dim()
    }

    /// Deviation of `sum K K^dagger` from the identity; zero for unital maps.
    pub fn unitality_residual(&self) -> f64 {
        let d = self.dim();
        let mut acc = CMatrix::zeros(d);
        for k in &self.kraus {
            acc = acc.add(&k.mul(&k.adjoint()));
        }
        acc.max_abs_diff(&CMatrix::identity(d))
    }

    pub fn is_unital(&self, tol: f64) -> bool {
        self.unitality_residual() <= tol
    }

    pub fn apply(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.dim());
        for k in &self.kraus {
            out = out.add(&k.mul(m).mul(&k.adjoint()));
        }
        out
    }

    /// Heisenberg-picture adjoint, `sum K^dagger E K`.
    pub fn apply_adjoint(&self, m: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(m.dim());
        for k in &self.kraus {
            out = out.add(&k.adjoint().mul(m).mul(k));
        }
        out
    }
}

/// A normalization-preserving transformation of operators.
///
/// Most transformations are [`Channel`]s. The `LinearOnWigner` variant
/// covers maps that act linearly on the phase-point basis but admit no
/// Kraus form, such as the qubit inversion (an antiunitary): it is defined
/// directly by the images of the A operators.
#[derive(Clone, Debug)]
pub enum Transformation {
    Kraus(Channel),
    LinearOnWigner { images: Vec<CMatrix> },
}

impl Transformation {
    pub fn dim(&self) -> usize {
        match self {
            Transformation::Kraus(c) => c.dim(),
            Transformation::LinearOnWigner { images } => images[0].dim(),
        }
    }

    pub fn apply(&self, basis: &PhasePointBasis, m: &CMatrix) -> CMatrix {
        match self {
            Transformation::Kraus(c) => c.apply(m),
            Transformation::LinearOnWigner { images } => {
                // act through the Wigner expansion m = sum_a Q(a) A_a
                let q = basis.wigner_raw(m);
                let mut out = CMatrix::zeros(m.dim());
                for (coeff, image) in q.iter().zip(images) {
                    out = out.add(&image.scale_re(*coeff));
                }
                out
            }
        }
    }

    /// Adjoint action on measurement operators:
    /// `tr[adjoint(E) w] = tr[E apply(w)]` for every w.
    pub fn apply_adjoint(&self, basis: &PhasePointBasis, m: &CMatrix) -> CMatrix {
        match self {
            Transformation::Kraus(c) => c.apply_adjoint(m),
            Transformation::LinearOnWigner { .. } => {
                let d = basis.dim() as f64;
                let mut out = CMatrix::zeros(m.dim());
                for (idx, a) in basis.a_ops().iter().enumerate() {
                    let coeff =
                        m.trace_product_re(&self.apply(basis, basis.a_op_by_index(idx))) / d;
                    out = out.add(&a.scale_re(coeff));
                }
                out
            }
        }
    }

    pub fn unitality_residual(&self, basis: &PhasePointBasis) -> f64 {
        match self {
            Transformation::Kraus(c) => c.unitality_residual(),
            Transformation::LinearOnWigner { .. } => {
                let d = basis.dim() as usize;
                let image = self.apply(basis, &CMatrix::identity(d));
                image.max_abs_diff(&CMatrix::identity(d))
            }
        }
    }
}

/// The transition quasiprobability table Q(beta | alpha) of a
/// transformation, stored row-major with the project-wide point indexing.
///
/// Rows and columns each sum to one for unital maps, but entries may be
/// negative; it is a quasiprobability, not a probability.
#[derive(Clone, Debug, PartialEq)]
pub struct TransQuasi {
    d: u32,
    table: Vec<f64>,
}

impl TransQuasi {
    pub fn new(d: u32, table: Vec<f64>) -> Self {
        assert_eq!(table.len(), (d as usize).pow(4));
        Self { d, table }
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn n_points(&self) -> usize {
        (self.d * self.d) as usize
    }

    pub fn get(&self, beta: PhasePoint, alpha: PhasePoint) -> f64 {
        self.table[beta.index(self.d) * self.n_points() + alpha.index(self.d)]
    }

    pub fn get_by_index(&self, beta: usize, alpha: usize) -> f64 {
        self.table[beta * self.n_points() + alpha]
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn row_sum(&self, beta: usize) -> f64 {
        let n = self.n_points();
        self.table[beta * n..(beta + 1) * n].iter().sum()
    }

    pub fn col_sum(&self, alpha: usize) -> f64 {
        let n = self.n_points();
        (0..n).map(|b| self.table[b * n + alpha]).sum()
    }

    /// Evolves a Wigner function: Q'(beta) = sum_alpha Q(beta|alpha) Q(alpha).
    pub fn evolve(&self, wigner: &[f64]) -> Vec<f64> {
        let n = self.n_points();
        (0..n)
            .map(|b| (0..n).map(|a| self.table[b * n + a] * wigner[a]).sum())
            .collect()
    }

    /// Composition `self after earlier` as matrices on Wigner space.
    pub fn compose(&self, earlier: &TransQuasi) -> TransQuasi {
        let n = self.n_points();
        let mut table = alloc::vec![0.0; n * n];
        for g in 0..n {
            for a in 0..n {
                table[g * n + a] = (0..n)
                    .map(|b| self.get_by_index(g, b) * earlier.get_by_index(b, a))
                    .sum();
            }
        }
        TransQuasi { d: self.d, table }
    }

    /// `max |entry|` of Q^T Q - I; zero iff Q is orthogonal.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.n_points();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 =
                    (0..n).map(|b| self.get_by_index(b, i) * self.get_by_index(b, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// The phase-point operator basis of a space, with the per-line projectors
/// derived from it. Building this once and sharing it keeps every basis
/// convention downstream derived from a single source.
#[derive(Clone, Debug)]
pub struct PhasePointBasis {
    d: u32,
    a_ops: Vec<CMatrix>,
    /// projectors[striation][line offset]
    projectors: Vec<Vec<CMatrix>>,
}

impl PhasePointBasis {
    pub fn new(space: &PhaseSpace) -> Self {
        let d = space.dim();
        let a_ops: Vec<CMatrix> =
            space.points().iter().map(|&pt| phase_point_operator(space, pt)).collect();

        let projectors = space
            .striations()
            .iter()
            .map(|striation| {
                striation
                    .lines()
                    .iter()
                    .map(|line| {
                        let mut acc = CMatrix::zeros(d as usize);
                        for &pt in line.points() {
                            acc = acc.add(&a_ops[pt.index(d)]);
                        }
                        acc.scale_re(1.0 / d as f64)
                    })
                    .collect()
            })
            .collect();

        Self { d, a_ops, projectors }
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    pub fn n_points(&self) -> usize {
        (self.d * self.d) as usize
    }

    pub fn a_op(&self, alpha: PhasePoint) -> &CMatrix {
        &self.a_ops[alpha.index(self.d)]
    }

    pub fn a_op_by_index(&self, idx: usize) -> &CMatrix {
        &self.a_ops[idx]
    }

    pub fn a_ops(&self) -> &[CMatrix] {
        &self.a_ops
    }

    /// Projector onto the basis state of the given line.
    pub fn line_projector(&self, striation: usize, line: usize) -> &CMatrix {
        &self.projectors[striation][line]
    }

    /// Consistency check: every line average must be a rank-one projector.
    pub fn check_projectors(&self, tol: f64) -> Result<(), Error> {
        for striation in &self.projectors {
            for p in striation {
                let residual = p
                    .mul(p)
                    .max_abs_diff(p)
                    .max((p.trace().re - 1.0).abs())
                    .max(p.trace().im.abs());
                if residual > tol {
                    return Err(Error::DegenerateProjector { residual });
                }
            }
        }
        Ok(())
    }

    /// Discrete Wigner function of a state:
    /// `Q(alpha) = tr(A_alpha w) / d`.
    pub fn wigner(&self, w: &OperatorMatrix) -> Vec<f64> {
        assert!(
            matches!(w.role(), OperatorRole::Density | OperatorRole::GenericHermitian),
            "Wigner functions are taken of states (or Hermitian diagnostics)"
        );
        self.wigner_raw(w.matrix())
    }

    pub fn wigner_raw(&self, w: &CMatrix) -> Vec<f64> {
        let d = self.d as f64;
        self.a_ops.iter().map(|a| a.trace_product_re(w) / d).collect()
    }

    /// Inverse of [`PhasePointBasis::wigner`]: `w = sum_alpha Q(alpha) A_alpha`.
    pub fn from_wigner(&self, q: &[f64]) -> CMatrix {
        assert_eq!(q.len(), self.n_points());
        let mut out = CMatrix::zeros(self.d as usize);
        for (coeff, a) in q.iter().zip(&self.a_ops) {
            out = out.add(&a.scale_re(*coeff));
        }
        out
    }

    /// Transition quasiprobabilities `Q(beta|alpha) = tr[A_beta E(A_alpha)] / d`
    /// of a unital transformation.
    pub fn transition_quasi(&self, tr: &Transformation, tol: f64) -> Result<TransQuasi, Error> {
        let residual = tr.unitality_residual(self);
        if residual > tol {
            return Err(Error::NotUnital { residual });
        }
        Ok(self.transition_quasi_unchecked(tr))
    }

    pub fn transition_quasi_unchecked(&self, tr: &Transformation) -> TransQuasi {
        let n = self.n_points();
        let d = self.d as f64;
        let images: Vec<CMatrix> = self.a_ops.iter().map(|a| tr.apply(self, a)).collect();
        let mut table = alloc::vec![0.0; n * n];
        for (a_idx, image) in images.iter().enumerate() {
            for (b_idx, a_beta) in self.a_ops.iter().enumerate() {
                table[b_idx * n + a_idx] = a_beta.trace_product_re(image) / d;
            }
        }
        TransQuasi { d: self.d, table }
    }
}

/// The phase-point operator of a single point.
pub fn phase_point_operator(space: &PhaseSpace, alpha: PhasePoint) -> CMatrix {
    let d = space.dim();
    if d == 2 {
        let sign_x = if alpha.p.is_multiple_of(2) { 1.0 } else { -1.0 };
        let sign_y = if (alpha.q + alpha.p).is_multiple_of(2) { 1.0 } else { -1.0 };
        let sign_z = if alpha.q.is_multiple_of(2) { 1.0 } else { -1.0 };
        pauli_i()
            .add(&pauli_x().scale_re(sign_x))
            .add(&pauli_y().scale_re(sign_y))
            .add(&pauli_z().scale_re(sign_z))
            .scale_re(0.5)
    } else {
        let omega = 2.0 * core::f64::consts::PI / d as f64;
        CMatrix::from_fn(d as usize, |k, l| {
            if (2 * alpha.q) % d == ((k + l) as u32) % d {
                let angle = omega * (alpha.p as i64 * (k as i64 - l as i64)) as f64;
                Complex::new(angle.cos(), angle.sin())
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

pub fn pauli_i() -> CMatrix {
    CMatrix::identity(2)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_fn(2, |i, j| if i != j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => C64::new(0.0, 0.0),
    })
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_fn(2, |i, j| {
        if i != j {
            C64::new(0.0, 0.0)
        } else if i == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })
}

/// Outcome probability `P(E | chain, w) = tr[E (E_n ... E_1)(w)]`, the
/// Hilbert-space oracle for every reconstruction test. The chain acts in
/// list order: `chain[0]` first.
pub fn quantum_probability(
    basis: &PhasePointBasis,
    e: &OperatorMatrix,
    chain: &[Transformation],
    w: &OperatorMatrix,
) -> Result<f64, Error> {
    if e.dim() != w.dim() {
        return Err(Error::DimensionMismatch { expected: w.dim(), got: e.dim() });
    }
    let mut state = w.matrix().clone();
    for tr in chain {
        if tr.dim() != w.dim() {
            return Err(Error::DimensionMismatch { expected: w.dim(), got: tr.dim() });
        }
        state = tr.apply(basis, &state);
    }
    Ok(e.matrix().trace_product_re(&state))
}

/// Deterministic random-object generators for the verification suites.
pub mod random {
    use super::*;

    fn standard_normal(rng: &mut impl Rng) -> f64 {
        // Box-Muller; u is bounded away from 0 so ln is finite.
        let u: f64 = rng.random::<f64>() + 1e-12;
        let v: f64 = rng.random();
        (-2.0 * u.ln()).sqrt() * (2.0 * core::f64::consts::PI * v).cos()
    }

    fn ginibre(d: usize, rng: &mut impl Rng) -> CMatrix {
        CMatrix::from_fn(d, |_, _| C64::new(standard_normal(rng), standard_normal(rng)))
    }

    /// Random density operator, `G G^dagger` normalized to unit trace.
    pub fn density(d: usize, rng: &mut impl Rng) -> OperatorMatrix {
        let g = ginibre(d, rng);
        let w = g.mul(&g.adjoint());
        let w = w.scale_re(1.0 / w.trace().re);
        OperatorMatrix { role: OperatorRole::Density, mat: w }
    }

    /// Haar-random unitary via Gram-Schmidt on a Ginibre matrix, with a
    /// second orthogonalization pass for numerical safety.
    pub fn unitary(d: usize, rng: &mut impl Rng) -> OperatorMatrix {
        let g = ginibre(d, rng);
        let mut cols: Vec<Vec<C64>> =
            (0..d).map(|j| (0..d).map(|i| g[(i, j)]).collect()).collect();
        for _pass in 0..2 {
            for j in 0..d {
                for k in 0..j {
                    let proj: C64 = (0..d).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                    let reference = cols[k].clone();
                    for (target, base) in cols[j].iter_mut().zip(&reference) {
                        *target -= proj * base;
                    }
                }
                let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                for z in cols[j].iter_mut() {
                    *z /= norm;
                }
            }
        }
        let mat = CMatrix::from_fn(d, |i, j| cols[j][i]);
        OperatorMatrix { role: OperatorRole::Unitary, mat }
    }

    /// Random POVM element `V diag(u_1..u_d) V^dagger` with u_i uniform in
    /// [0, 1]; both E and I - E are positive semidefinite.
    pub fn povm_element(d: usize, rng: &mut impl Rng) -> OperatorMatrix {
        let v = unitary(d, rng);
        let mut diag = CMatrix::zeros(d);
        for i in 0..d {
            diag[(i, i)] = C64::new(rng.random::<f64>(), 0.0);
        }
        let mat = v.matrix().mul(&diag).mul(&v.matrix().adjoint());
        OperatorMatrix { role: OperatorRole::PovmElement, mat }
    }

    /// Random unitary channel.
    pub fn unitary_channel(d: usize, rng: &mut impl Rng) -> Transformation {
        Transformation::Kraus(Channel { kraus: alloc::vec![unitary(d, rng).mat] })
    }

    /// Random unital channel: a probabilistic mixture of a few unitaries.
    pub fn unital_channel(d: usize, rng: &mut impl Rng) -> Transformation {
        let k = 2 + (rng.random::<u32>() % 2) as usize;
        let mut weights: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 0.1).collect();
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        let kraus =
            weights.iter().map(|&w| unitary(d, rng).mat.scale_re(w.sqrt())).collect();
        Transformation::Kraus(Channel { kraus })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::DEFAULT_TOL;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn basis(d: u32) -> (PhaseSpace, PhasePointBasis) {
        let space = PhaseSpace::new(d).unwrap();
        let b = PhasePointBasis::new(&space);
        (space, b)
    }

    pub(crate) fn bloch_y_quarter_turn() -> CMatrix {
        let angle = core::f64::consts::FRAC_PI_4;
        CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => C64::new(angle.cos(), 0.0),
            (0, 1) => C64::new(-angle.sin(), 0.0),
            (1, 0) => C64::new(angle.sin(), 0.0),
            _ => C64::new(angle.cos(), 0.0),
        })
    }

    #[test]
    fn qubit_origin_operator_is_pauli_average() {
        let space = PhaseSpace::new(2).unwrap();
        let a = phase_point_operator(&space, PhasePoint { q: 0, p: 0 });
        let expect = pauli_i().add(&pauli_x()).add(&pauli_y()).add(&pauli_z()).scale_re(0.5);
        assert!(a.max_abs_diff(&expect) < 1e-15);
    }

    #[test]
    fn qutrit_origin_operator_is_permutation() {
        let space = PhaseSpace::new(3).unwrap();
        let a = phase_point_operator(&space, PhasePoint { q: 0, p: 0 });
        // delta(0, k+l mod 3): ones at (0,0), (1,2), (2,1)
        for k in 0..3 {
            for l in 0..3 {
                let expect = if (k + l) % 3 == 0 { 1.0 } else { 0.0 };
                assert!((a[(k, l)] - C64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
        assert!(a.is_hermitian(1e-15));
        assert!((a.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn a_ops_are_hilbert_schmidt_orthogonal() {
        for d in [2u32, 3, 5] {
            let (_, basis) = basis(d);
            let n = basis.n_points();
            for i in 0..n {
                for j in 0..n {
                    let prod =
                        basis.a_op_by_index(i).trace_product_re(basis.a_op_by_index(j));
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert!((prod - expect).abs() < 1e-10, "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn a_ops_have_unit_trace_and_hermitian() {
        for d in [2u32, 3, 5, 7, 11] {
            let (_, basis) = basis(d);
            for a in basis.a_ops() {
                assert!(a.is_hermitian(1e-12));
                assert!((a.trace().re - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn line_projectors_are_rank_one() {
        for d in [2u32, 3, 5] {
            let (_, basis) = basis(d);
            basis.check_projectors(1e-10).unwrap();
        }
    }

    #[test]
    fn qubit_vertical_ray_projects_on_spin_up_z() {
        let (_, basis) = basis(2);
        // vertical striation id 2, ray c=0 (the alpha_q = 0 line)
        let p = basis.line_projector(2, 0);
        let expect = pauli_i().add(&pauli_z()).scale_re(0.5);
        assert!(p.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn striation_bases_complete_and_orthogonal() {
        let (space, basis) = basis(3);
        for striation in 0..space.striation_count() {
            let mut acc = CMatrix::zeros(3);
            for line in 0..3 {
                acc = acc.add(basis.line_projector(striation, line));
                for other in 0..3 {
                    let overlap = basis
                        .line_projector(striation, line)
                        .trace_product_re(basis.line_projector(striation, other));
                    let expect = if line == other { 1.0 } else { 0.0 };
                    assert!((overlap - expect).abs() < 1e-10);
                }
            }
            assert!(acc.max_abs_diff(&CMatrix::identity(3)) < 1e-10);
        }
    }

    #[test]
    fn striation_bases_are_mutually_unbiased() {
        for d in [2u32, 3, 5, 7, 11] {
            let (space, basis) = basis(d);
            for s1 in 0..space.striation_count() {
                for s2 in 0..s1 {
                    for l1 in 0..d as usize {
                        for l2 in 0..d as usize {
                            let overlap = basis
                                .line_projector(s1, l1)
                                .trace_product_re(basis.line_projector(s2, l2));
                            assert!(
                                (overlap - 1.0 / d as f64).abs() < 1e-9,
                                "d={d} overlap={overlap}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn wigner_of_mixed_state_is_uniform() {
        for d in [2u32, 3] {
            let (_, basis) = basis(d);
            let w = OperatorMatrix::density(
                CMatrix::identity(d as usize).scale_re(1.0 / d as f64),
                DEFAULT_TOL,
            )
            .unwrap();
            let q = basis.wigner(&w);
            assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for v in q {
                assert!((v - 1.0 / (d * d) as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wigner_of_spin_up_z() {
        let (space, basis) = basis(2);
        let w = OperatorMatrix::density(pauli_i().add(&pauli_z()).scale_re(0.5), DEFAULT_TOL)
            .unwrap();
        let q = basis.wigner(&w);
        for &pt in space.points() {
            let expect = 0.25 * (1.0 + if pt.q == 0 { 1.0 } else { -1.0 });
            assert!((q[pt.index(2)] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn wigner_round_trip_on_random_densities() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for d in [3u32, 5] {
            let (_, basis) = basis(d);
            for _ in 0..20 {
                let w = random::density(d as usize, &mut rng);
                let q = basis.wigner(&w);
                assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                let back = basis.from_wigner(&q);
                assert!(back.max_abs_diff(w.matrix()) < 1e-10);
            }
        }
    }

    #[test]
    fn identity_channel_quasi_is_kronecker() {
        for d in [2u32, 3] {
            let (_, basis) = basis(d);
            let q = basis
                .transition_quasi(
                    &Transformation::Kraus(Channel::identity(d as usize)),
                    DEFAULT_TOL,
                )
                .unwrap();
            let n = basis.n_points();
            for b in 0..n {
                for a in 0..n {
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((q.get_by_index(b, a) - expect).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn bloch_rotation_quasi_has_negative_entries() {
        let (_, basis) = basis(2);
        // 90-degree rotation about Bloch y maps z to x
        let u = bloch_y_quarter_turn();
        let q = basis
            .transition_quasi(
                &Transformation::Kraus(Channel::unitary(u, DEFAULT_TOL).unwrap()),
                DEFAULT_TOL,
            )
            .unwrap();
        assert!(q.table().iter().copied().fold(f64::INFINITY, f64::min) < -1e-3);
    }

    #[test]
    fn quasi_rows_and_columns_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2u32, 3] {
            let (_, basis) = basis(d);
            for _ in 0..10 {
                let tr = random::unital_channel(d as usize, &mut rng);
                let q = basis.transition_quasi(&tr, 1e-9).unwrap();
                for i in 0..basis.n_points() {
                    assert!((q.row_sum(i) - 1.0).abs() < 1e-9);
                    assert!((q.col_sum(i) - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn wigner_evolution_matches_channel_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (_, basis) = basis(3);
        for _ in 0..10 {
            let w = random::density(3, &mut rng);
            let tr = random::unital_channel(3, &mut rng);
            let q = basis.transition_quasi(&tr, 1e-9).unwrap();
            let evolved = q.evolve(&basis.wigner(&w));
            let direct = basis.wigner_raw(&tr.apply(&basis, w.matrix()));
            for (a, b) in evolved.iter().zip(&direct) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn non_unital_channel_rejected() {
        let (_, basis) = basis(2);
        let gamma: f64 = 0.3;
        let k0 = CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => C64::new(1.0, 0.0),
            (1, 1) => C64::new((1.0 - gamma).sqrt(), 0.0),
            _ => C64::new(0.0, 0.0),
        });
        let k1 = CMatrix::from_fn(2, |i, j| {
            if i == 0 && j == 1 { C64::new(gamma.sqrt(), 0.0) } else { C64::new(0.0, 0.0) }
        });
        let damping = Channel::new(alloc::vec![k0, k1], DEFAULT_TOL).unwrap();
        assert!(!damping.is_unital(DEFAULT_TOL));
        let err = basis.transition_quasi(&Transformation::Kraus(damping), DEFAULT_TOL);
        assert!(matches!(err, Err(Error::NotUnital { .. })));
    }

    #[test]
    fn oracle_probability_examples() {
        let (_, basis) = basis(2);
        let spin_up =
            OperatorMatrix::density(pauli_i().add(&pauli_z()).scale_re(0.5), DEFAULT_TOL)
                .unwrap();
        let project_up =
            OperatorMatrix::povm_element(pauli_i().add(&pauli_z()).scale_re(0.5), DEFAULT_TOL)
                .unwrap();
        let identity_e = OperatorMatrix::povm_element(CMatrix::identity(2), DEFAULT_TOL).unwrap();

        assert!(
            (quantum_probability(&basis, &identity_e, &[], &spin_up).unwrap() - 1.0).abs()
                < 1e-12
        );
        assert!(
            (quantum_probability(&basis, &project_up, &[], &spin_up).unwrap() - 1.0).abs()
                < 1e-12
        );

        // 90-degree rotation about Bloch y: z eigenstate becomes unbiased
        let rot = Transformation::Kraus(
            Channel::unitary(bloch_y_quarter_turn(), DEFAULT_TOL).unwrap(),
        );
        let p = quantum_probability(&basis, &project_up, &[rot], &spin_up).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
    }

    #[test]
    fn operator_validation_rejects_bad_inputs() {
        // eigenvalue above 1 is not a POVM element
        let too_big = CMatrix::identity(2).scale_re(1.5);
        assert!(matches!(
            OperatorMatrix::povm_element(too_big, DEFAULT_TOL),
            Err(Error::InvalidOperator { .. })
        ));

        // a projector is not unitary
        let projector = pauli_i().add(&pauli_z()).scale_re(0.5);
        assert!(matches!(
            OperatorMatrix::unitary(projector, DEFAULT_TOL),
            Err(Error::InvalidOperator { .. })
        ));

        // dropping a Kraus operator breaks trace preservation
        let half = alloc::vec![pauli_x().scale_re(0.5)];
        assert!(matches!(
            Channel::new(half, DEFAULT_TOL),
            Err(Error::NotTracePreserving { .. })
        ));

        // mismatched dimensions are flagged before any trace is taken
        let (_, basis) = basis(2);
        let w = OperatorMatrix::density(CMatrix::identity(2).scale_re(0.5), DEFAULT_TOL).unwrap();
        let e3 = OperatorMatrix::povm_element(CMatrix::identity(3), DEFAULT_TOL).unwrap();
        assert!(matches!(
            quantum_probability(&basis, &e3, &[], &w),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn random_generators_produce_valid_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for d in [2usize, 3, 5] {
            for _ in 0..5 {
                let w = random::density(d, &mut rng);
                OperatorMatrix::density(w.matrix().clone(), 1e-9).unwrap();
                let u = random::unitary(d, &mut rng);
                assert!(u.matrix().is_unitary(1e-10));
                let e = random::povm_element(d, &mut rng);
                OperatorMatrix::povm_element(e.matrix().clone(), 1e-9).unwrap();
            }
        }
    }
}

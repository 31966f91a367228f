//! The complete d = 2 story: Bloch-vector correspondence, orthogonality of
//! the transition quasiprobabilities, the conjugation that exposes every
//! reversible transformation as a rotation or roto-reflection of the Bloch
//! sphere, the inversion map, and the exhaustive enumeration of the two
//! maximal transformation sets.
//!
//! A qubit preparation is three 2x2 tables; packing their signed sums gives
//! the Bloch vector and the purity sum is `3/4 + |r|^2/4`, so validity of a
//! preparation is exactly `|r| <= 1`. Transition quasiprobabilities of
//! invertible transformations are orthogonal 4x4 matrices that conjugate to
//! a 3x3 orthogonal block: rotations (det +1) are always representable,
//! while a roto-reflection `E o Omega` is representable only when every
//! transition probability of the rotation E stays within 1/2. Exactly
//! twelve rotations survive that cut, and together with their inversion
//! composites they form the 24-element group of permutations of the four
//! phase-point operators — the one alternative to standard qubit theory the
//! composition rules admit.

use alloc::string::String;
use alloc::vec::Vec;

// f64 math methods come from the Float trait in no_std builds
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use crate::epistemic::{PrepRep, TransRep};
use crate::hilbert::{
    pauli_i, pauli_x, pauli_y, pauli_z, PhasePointBasis, TransQuasi, Transformation,
};
use crate::linalg::{C64, CMatrix};
use crate::phasespace::{PhasePoint, PhaseSpace, SpecialSubgroup, SymplecticMatrix};
use crate::Error;

/// Striation indices of the three qubit bases in the canonical ordering:
/// X is horizontal (slope 0), Y diagonal (slope 1), Z vertical.
pub const STRIATION_X: usize = 0;
pub const STRIATION_Y: usize = 1;
pub const STRIATION_Z: usize = 2;

pub fn sym_i() -> SymplecticMatrix {
    SymplecticMatrix::identity()
}

/// Rotates the three nonzero phase-space points to the right.
pub fn sym_r() -> SymplecticMatrix {
    SymplecticMatrix { m: [[0, 1], [1, 1]] }
}

/// Rotates the three nonzero phase-space points to the left.
pub fn sym_l() -> SymplecticMatrix {
    SymplecticMatrix { m: [[1, 1], [1, 0]] }
}

/// The unique special subgroup at d = 2, in the order (I, R, L).
pub fn qubit_subgroup(space: &PhaseSpace) -> SpecialSubgroup {
    SpecialSubgroup::new(alloc::vec![sym_i(), sym_r(), sym_l()], space)
        .expect("the qubit subgroup satisfies the defining properties")
}

/// Bloch components of the four phase-point operators,
/// `A_alpha = (I + r_alpha . sigma) / 2`, indexed by point index.
pub fn phase_point_bloch_vectors() -> [[f64; 3]; 4] {
    core::array::from_fn(|idx| {
        let pt = PhasePoint::from_index(idx, 2);
        [
            if pt.p == 0 { 1.0 } else { -1.0 },
            if (pt.q + pt.p).is_multiple_of(2) { 1.0 } else { -1.0 },
            if pt.q == 0 { 1.0 } else { -1.0 },
        ]
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn is_valid_state(&self) -> bool {
        self.norm_sqr() <= 1.0 + 1e-12
    }
}

/// Signed sums of the three preparation tables:
/// `r_x = sum (-1)^p R^X`, `r_y = sum (-1)^(q+p) R^Y`, `r_z = sum (-1)^q R^Z`.
/// `prep` is indexed by striation as produced by the decomposition.
pub fn bloch_from_reps(prep: &[PrepRep]) -> BlochVector {
    let sum = |striation: usize, sign: &dyn Fn(PhasePoint) -> f64| -> f64 {
        prep[striation]
            .values()
            .iter()
            .enumerate()
            .map(|(idx, v)| sign(PhasePoint::from_index(idx, 2)) * v)
            .sum()
    };
    BlochVector {
        x: sum(STRIATION_X, &|pt| if pt.p == 0 { 1.0 } else { -1.0 }),
        y: sum(STRIATION_Y, &|pt| if (pt.q + pt.p) % 2 == 0 { 1.0 } else { -1.0 }),
        z: sum(STRIATION_Z, &|pt| if pt.q == 0 { 1.0 } else { -1.0 }),
    }
}

/// Inverse of [`bloch_from_reps`]: `R^B = (1 +- r_B) / 4`, broadcast per
/// line. The lines of each qubit striation carry a constant sign, so the
/// tables are built from two line values each.
pub fn reps_from_bloch(space: &PhaseSpace, r: BlochVector) -> Vec<PrepRep> {
    // line offset c = 0 carries the + sign in all three striations
    let tables = [
        (STRIATION_X, r.x),
        (STRIATION_Y, r.y),
        (STRIATION_Z, r.z),
    ];
    tables
        .iter()
        .map(|&(striation, comp)| {
            let line_values = [0.25 * (1.0 + comp), 0.25 * (1.0 - comp)];
            PrepRep::from_line_values(space, striation, &line_values)
        })
        .collect()
}

/// `max |entry|` of Q^T Q - I. Invertible transformations of a qubit have
/// orthogonal quasiprobability matrices; unital but non-invertible maps
/// (such as depolarizing) fail this loudly.
pub fn q_orthogonality_check(quasi: &TransQuasi) -> f64 {
    quasi.orthogonality_residual()
}

/// A 3x3 orthogonal matrix acting on Bloch vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalAction {
    pub matrix: [[f64; 3]; 3],
}

impl OrthogonalAction {
    pub fn identity() -> Self {
        Self { matrix: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] }
    }

    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn orthogonality_residual(&self) -> f64 {
        let m = &self.matrix;
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][i] * m[k][j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (0..3).map(|k| self.matrix[i][k] * rhs.matrix[k][j]).sum();
            }
        }
        Self { matrix: out }
    }

    pub fn negate(&self) -> Self {
        let mut out = self.matrix;
        for row in out.iter_mut() {
            for cell in row.iter_mut() {
                *cell = -*cell;
            }
        }
        Self { matrix: out }
    }

    pub fn apply(&self, v: [f64; 3]) -> [f64; 3] {
        let m = &self.matrix;
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.matrix[i][j] - rhs.matrix[i][j]).abs());
            }
        }
        worst
    }
}

/// Conjugates a 4x4 transition quasiprobability matrix by the orthogonal
/// matrix whose first three rows are the (halved) Bloch vectors of the
/// phase-point operators and whose last row is constant. For a doubly
/// stochastic orthogonal Q the result is block diagonal — a 3x3 orthogonal
/// block acting on Bloch vectors, and a 1 in the lower-right corner — and
/// the block is returned. For unitaries it is the ordinary Bloch rotation
/// of the conjugation.
pub fn m_conjugate(quasi: &TransQuasi, tol: f64) -> Result<OrthogonalAction, Error> {
    let vectors = phase_point_bloch_vectors();
    let mut m = [[0.0f64; 4]; 4];
    for (alpha, r) in vectors.iter().enumerate() {
        for i in 0..3 {
            m[i][alpha] = 0.5 * r[i];
        }
        m[3][alpha] = 0.5;
    }

    // C = M Q M^T
    let mut c = [[0.0f64; 4]; 4];
    for (i, row) in c.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let mut acc = 0.0;
            for b in 0..4 {
                for a in 0..4 {
                    acc += m[i][b] * quasi.get_by_index(b, a) * m[j][a];
                }
            }
            *cell = acc;
        }
    }

    let mut residual = (c[3][3] - 1.0).abs();
    for (row, col) in c[3][..3].iter().zip(c.iter().map(|row| row[3])) {
        residual = residual.max(row.abs()).max(col.abs());
    }
    if residual > tol {
        return Err(Error::NotBlockDiagonal { residual });
    }

    let mut block = [[0.0; 3]; 3];
    for i in 0..3 {
        block[i].copy_from_slice(&c[i][..3]);
    }
    Ok(OrthogonalAction { matrix: block })
}

/// Bloch rotation of a unitary conjugation, `R_ij = tr(sigma_i U sigma_j U^dagger) / 2`.
/// Serves as the independent cross-check for [`m_conjugate`].
pub fn bloch_action_of_unitary(u: &CMatrix) -> OrthogonalAction {
    let sigmas = [pauli_x(), pauli_y(), pauli_z()];
    let mut matrix = [[0.0; 3]; 3];
    for (j, sj) in sigmas.iter().enumerate() {
        let image = u.mul(sj).mul(&u.adjoint());
        for (i, si) in sigmas.iter().enumerate() {
            matrix[i][j] = si.trace_product_re(&image) / 2.0;
        }
    }
    OrthogonalAction { matrix }
}

/// The inversion of the Bloch sphere as a transformation: it flips the
/// Pauli part of every phase-point operator, `Omega(A_alpha) = I - A_alpha`.
/// Antiunitary, so it has no Kraus form; it acts linearly on the Wigner
/// expansion instead.
pub fn inversion_map(basis: &PhasePointBasis) -> Transformation {
    let images = basis
        .a_ops()
        .iter()
        .map(|a| CMatrix::identity(2).sub(a))
        .collect();
    Transformation::LinearOnWigner { images }
}

/// The exact transition tables of the inversion:
/// `R^I = 1/2 - delta`, `R^R = R^L = 1/4`. The I table is negative on the
/// diagonal classes, which is precisely why the inversion alone is not a
/// valid transformation.
pub fn inversion_reps() -> Vec<TransRep> {
    alloc::vec![
        TransRep::from_class_values(2, sym_i(), alloc::vec![-0.5, 0.5, 0.5, 0.5]),
        TransRep::from_class_values(2, sym_r(), alloc::vec![0.25; 4]),
        TransRep::from_class_values(2, sym_l(), alloc::vec![0.25; 4]),
    ]
}

/// Result of composing a rotation's transition tables with the inversion:
/// `R^S_(E o Omega) = 1/2 - R^S_E`. The composite is a valid transformation
/// exactly when no input entry exceeds 1/2.
#[derive(Clone, Debug)]
pub struct InversionComposite {
    pub reps: Vec<TransRep>,
    pub valid: bool,
    pub max_input_entry: f64,
}

pub fn compose_with_inversion(rotation_reps: &[TransRep], tol: f64) -> InversionComposite {
    let max_input_entry = rotation_reps
        .iter()
        .map(|r| r.max_entry())
        .fold(f64::NEG_INFINITY, f64::max);
    let reps = rotation_reps
        .iter()
        .map(|rep| {
            let class_values = rep.class_values().iter().map(|v| 0.5 - v).collect();
            TransRep::from_class_values(2, rep.framework(), class_values)
        })
        .collect();
    InversionComposite { reps, valid: max_input_entry <= 0.5 + tol, max_input_entry }
}

/// A unit quaternion (u0, u1, u2, u3) standing for the qubit unitary
/// `U = u0 I + i u1 X + i u2 Y + i u3 Z`; u and -u give the same
/// transformation, so quaternions are canonicalized with their first
/// nonzero component positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitQuaternion {
    pub u: [f64; 4],
}

impl UnitQuaternion {
    pub fn new(u: [f64; 4]) -> Self {
        let norm = (u.iter().map(|x| x * x).sum::<f64>()).sqrt();
        let mut u = [u[0] / norm, u[1] / norm, u[2] / norm, u[3] / norm];
        if let Some(first) = u.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                for x in u.iter_mut() {
                    *x = -*x;
                }
            }
        }
        Self { u }
    }

    pub fn unitary(&self) -> CMatrix {
        let i = C64::new(0.0, 1.0);
        pauli_i()
            .scale(C64::new(self.u[0], 0.0))
            .add(&pauli_x().scale(i * self.u[1]))
            .add(&pauli_y().scale(i * self.u[2]))
            .add(&pauli_z().scale(i * self.u[3]))
    }

    /// Hamilton product matching unitary composition:
    /// `quaternion(U V) = quaternion(U) * quaternion(V)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let [a0, a1, a2, a3] = self.u;
        let [b0, b1, b2, b3] = rhs.u;
        Self::new([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 - a2 * b3 + a3 * b2,
            a0 * b2 + a2 * b0 - a3 * b1 + a1 * b3,
            a0 * b3 + a3 * b0 - a1 * b2 + a2 * b1,
        ])
    }

    pub fn conjugate(&self) -> Self {
        Self::new([self.u[0], -self.u[1], -self.u[2], -self.u[3]])
    }

    /// Distance up to the overall sign.
    pub fn distance(&self, rhs: &Self) -> f64 {
        let direct: f64 =
            self.u.iter().zip(&rhs.u).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let flipped: f64 =
            self.u.iter().zip(&rhs.u).map(|(a, b)| (a + b) * (a + b)).sum::<f64>().sqrt();
        direct.min(flipped)
    }
}

/// The twelve transition-table values of the unitary
/// `U = u0 I + i u1 X + i u2 Y + i u3 Z`, in closed form. Tables are in the
/// subgroup order (I, R, L), each holding one value per displacement class.
pub fn r_tables_from_quaternion(q: &UnitQuaternion) -> Vec<TransRep> {
    let [u0, u1, u2, u3] = q.u;
    let sq = |x: f64| x * x;
    // class indices follow the point layout: 0=(0,0), 1=(0,1), 2=(1,0), 3=(1,1)
    let table_i = alloc::vec![sq(u0), sq(u3), sq(u1), sq(u2)];
    let table_r = alloc::vec![
        0.25 * sq(u0 + u1 + u2 + u3),
        0.25 * sq(u0 - u1 + u2 - u3),
        0.25 * sq(u0 - u1 - u2 + u3),
        0.25 * sq(u0 + u1 - u2 - u3),
    ];
    let table_l = alloc::vec![
        0.25 * sq(u0 - u1 - u2 - u3),
        0.25 * sq(u0 - u1 + u2 + u3),
        0.25 * sq(u0 + u1 - u2 + u3),
        0.25 * sq(u0 + u1 + u2 - u3),
    ];
    alloc::vec![
        TransRep::from_class_values(2, sym_i(), table_i),
        TransRep::from_class_values(2, sym_r(), table_r),
        TransRep::from_class_values(2, sym_l(), table_l),
    ]
}

/// Largest transition probability the rotation assigns in any framework;
/// the rotation composes with the inversion iff this is at most 1/2.
pub fn max_transition_entry(q: &UnitQuaternion) -> f64 {
    r_tables_from_quaternion(q)
        .iter()
        .map(|r| r.max_entry())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// A rotation together with its geometric description.
#[derive(Clone, Debug)]
pub struct RotationEntry {
    pub quaternion: UnitQuaternion,
    pub action: OrthogonalAction,
    pub axis: [f64; 3],
    pub angle_deg: f64,
    pub label: String,
}

fn axis_angle(action: &OrthogonalAction) -> ([f64; 3], f64) {
    let m = &action.matrix;
    let trace = m[0][0] + m[1][1] + m[2][2];
    let cos_t = ((trace - 1.0) / 2.0).clamp(-1.0, 1.0);
    let angle = cos_t.acos();
    if angle < 1e-9 {
        return ([0.0, 0.0, 1.0], 0.0);
    }
    if (core::f64::consts::PI - angle).abs() > 1e-6 {
        let scale = 1.0 / (2.0 * angle.sin());
        let axis = [
            (m[2][1] - m[1][2]) * scale,
            (m[0][2] - m[2][0]) * scale,
            (m[1][0] - m[0][1]) * scale,
        ];
        (axis, angle)
    } else {
        // angle pi: axis is the unit eigenvector of (M + I) / 2
        let mut best = [0.0; 3];
        let mut best_norm = -1.0;
        for column in (0..3).map(|j| {
            core::array::from_fn::<f64, 3, _>(|i| 0.5 * (m[i][j] + if i == j { 1.0 } else { 0.0 }))
        }) {
            let norm = column.iter().map(|x| x * x).sum::<f64>();
            if norm > best_norm {
                best_norm = norm;
                best = column;
            }
        }
        let norm = best_norm.sqrt();
        ([best[0] / norm, best[1] / norm, best[2] / norm], angle)
    }
}

fn axis_label(axis: [f64; 3]) -> String {
    let names = ["x", "y", "z"];
    let mut parts = String::new();
    for (component, name) in axis.iter().zip(names) {
        if component.abs() > 1e-6 {
            if component > &0.0 {
                parts.push('+');
            } else {
                parts.push('-');
            }
            parts.push_str(name);
        }
    }
    parts
}

fn rotation_entry(q: UnitQuaternion) -> RotationEntry {
    let action = bloch_action_of_unitary(&q.unitary());
    let (axis, angle) = axis_angle(&action);
    let angle_deg = angle * 180.0 / core::f64::consts::PI;
    let label = alloc::format!("{:.0} deg about {}", angle_deg, axis_label(axis));
    RotationEntry { quaternion: q, action, axis, angle_deg, label }
}

/// The twelve rotations that can be composed with the inversion: exactly
/// two quaternion components equal to 1/sqrt(2) in magnitude and two equal
/// to zero. Geometrically, quarter turns about the six cardinal directions
/// and half turns about the six diagonal axes between pairs of cardinal
/// axes.
pub fn enumerate_inversion_compatible() -> Vec<RotationEntry> {
    let root = core::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            for sign in [1.0, -1.0] {
                let mut u = [0.0; 4];
                u[i] = root;
                u[j] = sign * root;
                out.push(rotation_entry(UnitQuaternion::new(u)));
            }
        }
    }
    out
}

/// One element of the finite alternative theory.
#[derive(Clone, Debug)]
pub struct PermutationEntry {
    pub action: OrthogonalAction,
    pub det: f64,
    /// Index permutation induced on the four phase-point Bloch vectors.
    pub vertex_permutation: [usize; 4],
    pub label: String,
}

/// The 24-element transformation set closed under the composition rules:
/// the twelve inversion composites (det -1) and their pairwise products
/// (det +1). Together they realize every permutation of the four
/// phase-point operators.
#[derive(Clone, Debug)]
pub struct PermutationTheory {
    pub elements: Vec<PermutationEntry>,
}

fn vertex_permutation(action: &OrthogonalAction) -> Option<[usize; 4]> {
    let vectors = phase_point_bloch_vectors();
    let mut perm = [usize::MAX; 4];
    for (from, v) in vectors.iter().enumerate() {
        let image = action.apply(*v);
        let mut found = None;
        for (to, w) in vectors.iter().enumerate() {
            let dist = image
                .iter()
                .zip(w)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            if dist < 1e-9 {
                found = Some(to);
                break;
            }
        }
        perm[from] = found?;
    }
    Some(perm)
}

pub fn enumerate_permutation_theory() -> PermutationTheory {
    let rotations = enumerate_inversion_compatible();
    let mut elements: Vec<PermutationEntry> = Vec::new();

    let mut push_unique = |action: OrthogonalAction, label: String| {
        if elements.iter().any(|e| e.action.max_abs_diff(&action) < 1e-9) {
            return;
        }
        let vertex_permutation = vertex_permutation(&action)
            .expect("theory elements permute the phase-point operators");
        let det = action.det();
        elements.push(PermutationEntry { action, det, vertex_permutation, label });
    };

    // det -1 half: each allowed rotation composed with the inversion
    for entry in &rotations {
        push_unique(
            entry.action.negate(),
            alloc::format!("inversion then {}", entry.label),
        );
    }
    // det +1 half: pairwise composites of the allowed rotations
    for a in &rotations {
        for b in &rotations {
            let action = a.action.mul(&b.action);
            let (axis, angle) = axis_angle(&action);
            let angle_deg = angle * 180.0 / core::f64::consts::PI;
            let label = if angle_deg.abs() < 1e-6 {
                String::from("identity")
            } else {
                alloc::format!("{:.0} deg about {}", angle_deg, axis_label(axis))
            };
            push_unique(action, label);
        }
    }

    PermutationTheory { elements }
}

impl PermutationTheory {
    pub fn contains_action(&self, action: &OrthogonalAction, tol: f64) -> bool {
        self.elements.iter().any(|e| e.action.max_abs_diff(action) < tol)
    }

    /// Closure under composition and inverse (transpose).
    pub fn is_group(&self, tol: f64) -> bool {
        for a in &self.elements {
            let inverse = OrthogonalAction {
                matrix: core::array::from_fn(|i| core::array::from_fn(|j| a.action.matrix[j][i])),
            };
            if !self.contains_action(&inverse, tol) {
                return false;
            }
            for b in &self.elements {
                if !self.contains_action(&a.action.mul(&b.action), tol) {
                    return false;
                }
            }
        }
        true
    }

    /// The induced vertex permutations are pairwise distinct and therefore
    /// exhaust the 24 permutations of four objects.
    pub fn realizes_all_permutations(&self) -> bool {
        if self.elements.len() != 24 {
            return false;
        }
        for (i, a) in self.elements.iter().enumerate() {
            for b in &self.elements[i + 1..] {
                if a.vertex_permutation == b.vertex_permutation {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether a rotation can be adjoined to the permutation theory. Composing
/// it with each inversion composite must again be a representable
/// roto-reflection, so every composite quaternion must satisfy the 1/2
/// criterion. Exactly the rotations already in the theory pass — the
/// theory is maximal. (Note the twelve inversion-compatible rotations are
/// not themselves members; only their inversion composites and pairwise
/// products are.)
pub fn adjoinable_rotation(q: &UnitQuaternion, tol: f64) -> bool {
    enumerate_inversion_compatible()
        .iter()
        .all(|e| max_transition_entry(&q.mul(&e.quaternion)) <= 0.5 + tol)
}

/// Uniform sample from SU(2), as a canonicalized quaternion.
pub fn random_quaternion(rng: &mut impl Rng) -> UnitQuaternion {
    // four Gaussians normalized; Box-Muller as in the operator generators
    let mut gauss = [0.0; 4];
    for slot in gauss.iter_mut() {
        let u: f64 = rng.random::<f64>() + 1e-12;
        let v: f64 = rng.random();
        *slot = (-2.0 * u.ln()).sqrt() * (2.0 * core::f64::consts::PI * v).cos();
    }
    UnitQuaternion::new(gauss)
}

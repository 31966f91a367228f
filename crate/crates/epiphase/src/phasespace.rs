//! Discrete phase-space geometry over Z_d for prime d.
//!
//! The phase space is a d x d grid of points. Its lines, striations
//! (complete sets of d parallel lines), and unit-determinant linear maps
//! carry all the combinatorial structure the probability representations
//! are built on. Everything here is exact integer arithmetic mod d.

use alloc::vec::Vec;

use crate::Error;

/// Largest dimension accepted by [`PhaseSpace::new`].
pub const DEFAULT_MAX_DIM: u32 = 11;

/// A point of the d x d phase space, with horizontal coordinate `q` and
/// vertical coordinate `p`, both residues mod d.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhasePoint {
    pub q: u32,
    pub p: u32,
}

impl PhasePoint {
    pub fn new(q: u32, p: u32, d: u32) -> Self {
        Self { q: q % d, p: p % d }
    }

    /// Row-major linear index `q * d + p`, the project-wide table layout.
    pub fn index(self, d: u32) -> usize {
        (self.q * d + self.p) as usize
    }

    pub fn from_index(i: usize, d: u32) -> Self {
        let i = i as u32;
        Self { q: i / d, p: i % d }
    }

    pub fn add(self, other: Self, d: u32) -> Self {
        Self { q: (self.q + other.q) % d, p: (self.p + other.p) % d }
    }

    pub fn sub(self, other: Self, d: u32) -> Self {
        Self { q: (self.q + d - other.q) % d, p: (self.p + d - other.p) % d }
    }

    pub fn is_origin(self) -> bool {
        self.q == 0 && self.p == 0
    }
}

/// The symplectic product `<a, b> = a_p b_q - a_q b_p`, a residue mod d.
pub fn symplectic_product(a: PhasePoint, b: PhasePoint, d: u32) -> u32 {
    (a.p * b.q + (d - 1) * a.q * b.p) % d
}

fn inv_mod(a: u32, d: u32) -> u32 {
    // d is prime and tiny; a brute-force scan is clearest.
    (1..d).find(|&x| (a * x) % d == 1).expect("inverse of nonzero residue")
}

/// A line `a*q + b*p = c` in the phase space, together with its d points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Line {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    points: Vec<PhasePoint>,
}

impl Line {
    fn new(a: u32, b: u32, c: u32, d: u32) -> Self {
        let points = (0..d * d)
            .map(|i| PhasePoint::from_index(i as usize, d))
            .filter(|pt| (a * pt.q + b * pt.p) % d == c % d)
            .collect();
        Self { a, b, c: c % d, points }
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn contains(&self, pt: PhasePoint) -> bool {
        self.points.contains(&pt)
    }

    /// A ray is a line through the origin.
    pub fn is_ray(&self) -> bool {
        self.c == 0
    }
}

/// A complete set of d parallel lines partitioning the phase space.
///
/// Striations are canonically ordered: striation k for k in 0..d holds the
/// lines of slope k (`p = k*q + c`), and striation d holds the vertical
/// lines (`q = c`). Within a striation, lines are ordered by their offset c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Striation {
    pub id: usize,
    lines: Vec<Line>,
}

impl Striation {
    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn line(&self, c: usize) -> &Line {
        &self.lines[c]
    }

    /// Direction vector shared by all lines of the striation.
    pub fn direction(&self, d: u32) -> PhasePoint {
        if self.id < d as usize {
            PhasePoint { q: 1, p: self.id as u32 }
        } else {
            PhasePoint { q: 0, p: 1 }
        }
    }
}

/// A 2x2 matrix over Z_d with unit determinant, acting on column vectors
/// (q, p) from the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymplecticMatrix {
    /// Row-major entries [[m00, m01], [m10, m11]].
    pub m: [[u32; 2]; 2],
}

impl SymplecticMatrix {
    pub fn new(m: [[u32; 2]; 2], d: u32) -> Self {
        Self { m: [[m[0][0] % d, m[0][1] % d], [m[1][0] % d, m[1][1] % d]] }
    }

    pub fn identity() -> Self {
        Self { m: [[1, 0], [0, 1]] }
    }

    pub fn det(self, d: u32) -> u32 {
        (self.m[0][0] * self.m[1][1] + (d - 1) * self.m[0][1] * self.m[1][0]) % d
    }

    pub fn apply(self, pt: PhasePoint, d: u32) -> PhasePoint {
        PhasePoint {
            q: (self.m[0][0] * pt.q + self.m[0][1] * pt.p) % d,
            p: (self.m[1][0] * pt.q + self.m[1][1] * pt.p) % d,
        }
    }

    pub fn mul(self, rhs: Self, d: u32) -> Self {
        let mut out = [[0u32; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = (self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j]) % d;
            }
        }
        Self { m: out }
    }

    /// Inverse of a unit-determinant matrix: adjugate with signs mod d.
    pub fn inverse(self, d: u32) -> Self {
        Self {
            m: [
                [self.m[1][1], (d - self.m[0][1]) % d],
                [(d - self.m[1][0]) % d, self.m[0][0]],
            ],
        }
    }

    /// Determinant of the elementwise difference `self - other` mod d.
    pub fn difference_det(self, other: Self, d: u32) -> u32 {
        let e = |i: usize, j: usize| (self.m[i][j] + d - other.m[i][j]) % d;
        (e(0, 0) * e(1, 1) + (d - 1) * e(0, 1) * e(1, 0)) % d
    }

    /// Dense encoding used for canonical ordering and deduplication.
    pub fn encode(self, d: u32) -> u32 {
        ((self.m[0][0] * d + self.m[0][1]) * d + self.m[1][0]) * d + self.m[1][1]
    }
}

/// A subgroup of the symplectic group with `d^2 - 1` elements whose pairwise
/// differences all have nonzero determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialSubgroup {
    elements: Vec<SymplecticMatrix>,
}

impl SpecialSubgroup {
    /// Wraps an explicit element list, verifying the defining properties.
    pub fn new(elements: Vec<SymplecticMatrix>, space: &PhaseSpace) -> Result<Self, Error> {
        let sub = Self { elements };
        if !sub.verify(space) {
            return Err(Error::InvalidSubgroup);
        }
        Ok(sub)
    }

    pub fn elements(&self) -> &[SymplecticMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, s: SymplecticMatrix) -> bool {
        self.elements.contains(&s)
    }

    pub fn position(&self, s: SymplecticMatrix) -> Option<usize> {
        self.elements.iter().position(|&e| e == s)
    }

    /// Checks every defining property: cardinality, subgroup axioms, and
    /// pairwise nonsingular differences.
    pub fn verify(&self, space: &PhaseSpace) -> bool {
        let d = space.dim();
        let expect = (d * d - 1) as usize;
        if self.elements.len() != expect {
            return false;
        }
        if !self.contains(SymplecticMatrix::identity()) {
            return false;
        }
        for &s in &self.elements {
            if s.det(d) != 1 || !self.contains(s.inverse(d)) {
                return false;
            }
            for &t in &self.elements {
                if !self.contains(s.mul(t, d)) {
                    return false;
                }
                if s != t && s.difference_det(t, d) == 0 {
                    return false;
                }
            }
        }
        true
    }
}

/// Outcome of the special-subgroup search.
///
/// The search closes every generator set of size at most `generator_bound`;
/// finding nothing within that bound does not exclude subgroups needing
/// more generators, so results are labeled accordingly.
#[derive(Clone, Debug)]
pub struct SubgroupSearch {
    pub subgroups: Vec<SpecialSubgroup>,
    pub generator_bound: usize,
}

/// The d x d discrete phase space with its striations and symplectic group.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    d: u32,
    points: Vec<PhasePoint>,
    striations: Vec<Striation>,
    symplectics: Vec<SymplecticMatrix>,
    // line_of[striation][point index] = offset c of the containing line
    line_of: Vec<Vec<usize>>,
}

impl PhaseSpace {
    /// Builds the phase space for a prime dimension `2 <= d <= 11`.
    pub fn new(d: u32) -> Result<Self, Error> {
        Self::with_max_dim(d, DEFAULT_MAX_DIM)
    }

    /// Same as [`PhaseSpace::new`] with a caller-chosen upper bound.
    pub fn with_max_dim(d: u32, max: u32) -> Result<Self, Error> {
        if d < 2 || d > max {
            return Err(Error::DimensionOutOfRange { d, max });
        }
        if !is_prime(d) {
            return Err(Error::NonPrimeDimension { d });
        }

        let points: Vec<PhasePoint> =
            (0..(d * d) as usize).map(|i| PhasePoint::from_index(i, d)).collect();

        let mut striations = Vec::with_capacity(d as usize + 1);
        for k in 0..d {
            // slope-k lines: p = k*q + c, i.e. (d-k)*q + 1*p = c
            let lines = (0..d).map(|c| Line::new((d - k) % d, 1, c, d)).collect();
            striations.push(Striation { id: k as usize, lines });
        }
        let vertical = (0..d).map(|c| Line::new(1, 0, c, d)).collect();
        striations.push(Striation { id: d as usize, lines: vertical });

        let mut line_of = Vec::with_capacity(striations.len());
        for striation in &striations {
            let mut map = alloc::vec![usize::MAX; (d * d) as usize];
            for (c, line) in striation.lines.iter().enumerate() {
                for &pt in line.points() {
                    map[pt.index(d)] = c;
                }
            }
            debug_assert!(map.iter().all(|&c| c != usize::MAX));
            line_of.push(map);
        }

        let mut symplectics = Vec::new();
        for code in 0..d * d * d * d {
            let m = SymplecticMatrix {
                m: [
                    [code / (d * d * d), (code / (d * d)) % d],
                    [(code / d) % d, code % d],
                ],
            };
            if m.det(d) == 1 {
                symplectics.push(m);
            }
        }
        debug_assert_eq!(symplectics.len(), (d * (d * d - 1)) as usize);

        Ok(Self { d, points, striations, symplectics, line_of })
    }

    pub fn dim(&self) -> u32 {
        self.d
    }

    /// Number of phase-space points, d^2.
    pub fn point_count(&self) -> usize {
        (self.d * self.d) as usize
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn striations(&self) -> &[Striation] {
        &self.striations
    }

    pub fn striation(&self, id: usize) -> &Striation {
        &self.striations[id]
    }

    /// Number of striations, d + 1.
    pub fn striation_count(&self) -> usize {
        self.striations.len()
    }

    /// The full symplectic group, of size d (d^2 - 1).
    pub fn symplectic_group(&self) -> &[SymplecticMatrix] {
        &self.symplectics
    }

    /// The unique line of the striation containing the given point.
    pub fn line_through(&self, striation: usize, pt: PhasePoint) -> &Line {
        let c = self.line_of[striation][pt.index(self.d)];
        self.striations[striation].line(c)
    }

    /// Offset index of the line of `striation` containing `pt`.
    pub fn line_index(&self, striation: usize, pt: PhasePoint) -> usize {
        self.line_of[striation][pt.index(self.d)]
    }

    /// The striation a line belongs to, identified by its coefficients.
    pub fn striation_of_line(&self, line: &Line) -> Option<usize> {
        self.striations
            .iter()
            .position(|s| s.lines.iter().any(|l| l.points() == line.points()))
    }

    pub fn symplectic_product(&self, a: PhasePoint, b: PhasePoint) -> u32 {
        symplectic_product(a, b, self.d)
    }

    pub fn apply(&self, s: SymplecticMatrix, pt: PhasePoint) -> PhasePoint {
        s.apply(pt, self.d)
    }

    /// The displacement `delta = beta - S alpha` classifying the ontic
    /// transition `alpha -> beta` within the framework S.
    pub fn displacement(&self, s: SymplecticMatrix, alpha: PhasePoint, beta: PhasePoint) -> PhasePoint {
        beta.sub(s.apply(alpha, self.d), self.d)
    }

    /// Index of the image striation `S B`: S maps parallel lines to
    /// parallel lines, so it acts on striations through their direction.
    pub fn map_striation(&self, s: SymplecticMatrix, striation: usize) -> usize {
        let dir = self.striations[striation].direction(self.d);
        let image = s.apply(dir, self.d);
        if image.q == 0 {
            self.d as usize
        } else {
            ((image.p * inv_mod(image.q, self.d)) % self.d) as usize
        }
    }

    /// Closes all generator sets of size <= `max_generators` and returns the
    /// distinct subgroups of order d^2 - 1 with the nonsingular-difference
    /// property, in deterministic order.
    pub fn find_special_subgroups(&self, max_generators: usize) -> SubgroupSearch {
        let d = self.d;
        let target = (d * d - 1) as usize;
        let mut found: Vec<Vec<u32>> = Vec::new();
        let mut subgroups = Vec::new();

        let consider = |gens: &[SymplecticMatrix],
                            found: &mut Vec<Vec<u32>>,
                            subgroups: &mut Vec<SpecialSubgroup>| {
            if let Some(elements) = close_generators(gens, d, target) {
                let sub = SpecialSubgroup { elements };
                if sub.verify(self) {
                    let key: Vec<u32> = sub.elements.iter().map(|s| s.encode(d)).collect();
                    if !found.contains(&key) {
                        found.push(key);
                        subgroups.push(sub);
                    }
                }
            }
        };

        if max_generators >= 1 {
            for &g in &self.symplectics {
                consider(&[g], &mut found, &mut subgroups);
            }
        }
        if max_generators >= 2 {
            for (i, &g) in self.symplectics.iter().enumerate() {
                for &h in &self.symplectics[i + 1..] {
                    consider(&[g, h], &mut found, &mut subgroups);
                }
            }
        }
        // Generator sets larger than 2 are never needed for the orders that
        // occur here, but the bound is honest metadata for the caller.
        let generator_bound = max_generators.min(2);

        subgroups.sort_by_key(|s| s.elements.iter().map(|m| m.encode(d)).collect::<Vec<_>>());
        SubgroupSearch { subgroups, generator_bound }
    }

    /// Convenience accessor: the canonical (first in search order) special
    /// subgroup, if one exists within the 2-generator search bound.
    pub fn special_subgroup(&self) -> Option<SpecialSubgroup> {
        self.find_special_subgroups(2).subgroups.into_iter().next()
    }
}

/// Closure of a generator set under multiplication, aborting as soon as the
/// generated set exceeds `target` elements.
fn close_generators(
    gens: &[SymplecticMatrix],
    d: u32,
    target: usize,
) -> Option<Vec<SymplecticMatrix>> {
    let mut elements: Vec<SymplecticMatrix> = alloc::vec![SymplecticMatrix::identity()];
    let mut frontier: Vec<SymplecticMatrix> = elements.clone();
    while let Some(x) = frontier.pop() {
        for &g in gens {
            let y = x.mul(g, d);
            if !elements.contains(&y) {
                if elements.len() >= target {
                    return None;
                }
                elements.push(y);
                frontier.push(y);
            }
        }
    }
    if elements.len() == target {
        elements.sort_by_key(|s| s.encode(d));
        Some(elements)
    } else {
        None
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubit_r() -> SymplecticMatrix {
        SymplecticMatrix { m: [[0, 1], [1, 1]] }
    }

    fn qubit_l() -> SymplecticMatrix {
        SymplecticMatrix { m: [[1, 1], [1, 0]] }
    }

    #[test]
    fn space_counts() {
        let s2 = PhaseSpace::new(2).unwrap();
        assert_eq!(s2.point_count(), 4);
        assert_eq!(s2.striation_count(), 3);
        assert_eq!(s2.symplectic_group().len(), 6);

        let s3 = PhaseSpace::new(3).unwrap();
        assert_eq!(s3.point_count(), 9);
        assert_eq!(s3.striation_count(), 4);
        assert_eq!(s3.symplectic_group().len(), 24);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(PhaseSpace::new(4), Err(Error::NonPrimeDimension { d: 4 })));
        assert!(matches!(PhaseSpace::new(1), Err(Error::DimensionOutOfRange { .. })));
        assert!(matches!(PhaseSpace::new(13), Err(Error::DimensionOutOfRange { .. })));
        assert!(PhaseSpace::with_max_dim(13, 13).is_ok());
    }

    #[test]
    fn line_through_examples() {
        let s2 = PhaseSpace::new(2).unwrap();
        // vertical striation at d=2 is striation id 2
        let line = s2.line_through(2, PhasePoint { q: 0, p: 1 });
        assert_eq!(line.points(), &[PhasePoint { q: 0, p: 0 }, PhasePoint { q: 0, p: 1 }]);

        let s3 = PhaseSpace::new(3).unwrap();
        // horizontal striation (slope 0) at d=3 is striation id 0
        let line = s3.line_through(0, PhasePoint { q: 2, p: 1 });
        assert_eq!(
            line.points(),
            &[
                PhasePoint { q: 0, p: 1 },
                PhasePoint { q: 1, p: 1 },
                PhasePoint { q: 2, p: 1 }
            ]
        );
    }

    #[test]
    fn every_point_on_exactly_one_line_per_striation() {
        for d in [2u32, 3, 5, 7, 11] {
            let space = PhaseSpace::new(d).unwrap();
            for striation in space.striations() {
                for &pt in space.points() {
                    let hits = striation.lines().iter().filter(|l| l.contains(pt)).count();
                    assert_eq!(hits, 1, "d={d} striation={} point={pt:?}", striation.id);
                }
            }
        }
    }

    #[test]
    fn nonparallel_lines_meet_in_one_point() {
        for d in [2u32, 3, 5, 7, 11] {
            let space = PhaseSpace::new(d).unwrap();
            for s1 in space.striations() {
                for s2 in space.striations() {
                    if s1.id == s2.id {
                        continue;
                    }
                    for l1 in s1.lines() {
                        for l2 in s2.lines() {
                            let common =
                                l1.points().iter().filter(|pt| l2.contains(**pt)).count();
                            assert_eq!(common, 1);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn symplectic_action_examples() {
        let s3 = PhaseSpace::new(3).unwrap();
        let id = SymplecticMatrix::identity();
        assert_eq!(s3.apply(id, PhasePoint { q: 1, p: 2 }), PhasePoint { q: 1, p: 2 });

        let s2 = PhaseSpace::new(2).unwrap();
        assert_eq!(s2.apply(qubit_r(), PhasePoint { q: 1, p: 0 }), PhasePoint { q: 0, p: 1 });
    }

    #[test]
    fn symplectic_product_preserved_exhaustively() {
        let space = PhaseSpace::new(5).unwrap();
        for &s in space.symplectic_group() {
            for &a in space.points() {
                for &b in space.points() {
                    assert_eq!(
                        space.symplectic_product(space.apply(s, a), space.apply(s, b)),
                        space.symplectic_product(a, b)
                    );
                }
            }
        }
    }

    #[test]
    fn group_closure_and_inverses() {
        for d in [2u32, 3] {
            let space = PhaseSpace::new(d).unwrap();
            let group = space.symplectic_group();
            for &a in group {
                assert!(group.contains(&a.inverse(d)));
                assert_eq!(a.mul(a.inverse(d), d), SymplecticMatrix::identity());
                for &b in group {
                    assert!(group.contains(&a.mul(b, d)));
                }
            }
        }
    }

    #[test]
    fn qubit_special_subgroup_is_unique() {
        let space = PhaseSpace::new(2).unwrap();
        let search = space.find_special_subgroups(2);
        assert_eq!(search.subgroups.len(), 1);
        let sub = &search.subgroups[0];
        assert!(sub.contains(SymplecticMatrix::identity()));
        assert!(sub.contains(qubit_r()));
        assert!(sub.contains(qubit_l()));
    }

    #[test]
    fn special_subgroups_found_for_small_odd_primes() {
        for d in [3u32, 5] {
            let space = PhaseSpace::new(d).unwrap();
            let search = space.find_special_subgroups(2);
            assert!(!search.subgroups.is_empty(), "d={d}");
            for sub in &search.subgroups {
                assert_eq!(sub.len(), (d * d - 1) as usize);
                assert!(sub.verify(&space));
            }
        }
    }

    #[test]
    fn displacement_examples_and_census() {
        let s2 = PhaseSpace::new(2).unwrap();
        let alpha = PhasePoint { q: 1, p: 0 };
        assert!(s2
            .displacement(SymplecticMatrix::identity(), alpha, alpha)
            .is_origin());
        assert_eq!(
            s2.displacement(qubit_r(), PhasePoint { q: 1, p: 0 }, PhasePoint { q: 1, p: 1 }),
            PhasePoint { q: 1, p: 0 }
        );

        let s3 = PhaseSpace::new(3).unwrap();
        for &s in s3.symplectic_group() {
            let mut census = [0usize; 9];
            for &a in s3.points() {
                for &b in s3.points() {
                    census[s3.displacement(s, a, b).index(3)] += 1;
                }
            }
            assert!(census.iter().all(|&n| n == 9));
        }
    }

    #[test]
    fn striation_of_line_identifies_parents() {
        for d in [2u32, 5] {
            let space = PhaseSpace::new(d).unwrap();
            for striation in space.striations() {
                for line in striation.lines() {
                    assert_eq!(space.striation_of_line(line), Some(striation.id));
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn symplectic_product_preserved_prop(
            s_idx in 0usize..120,
            a_idx in 0usize..25,
            b_idx in 0usize..25,
        ) {
            let space = PhaseSpace::new(5).unwrap();
            let s = space.symplectic_group()[s_idx];
            let a = PhasePoint::from_index(a_idx, 5);
            let b = PhasePoint::from_index(b_idx, 5);
            proptest::prop_assert_eq!(
                space.symplectic_product(space.apply(s, a), space.apply(s, b)),
                space.symplectic_product(a, b)
            );
        }

        #[test]
        fn displacement_classes_have_equal_size_prop(s_idx in 0usize..24) {
            let space = PhaseSpace::new(3).unwrap();
            let s = space.symplectic_group()[s_idx];
            let mut census = [0usize; 9];
            for &a in space.points() {
                for &b in space.points() {
                    census[space.displacement(s, a, b).index(3)] += 1;
                }
            }
            proptest::prop_assert!(census.iter().all(|&n| n == 9));
        }
    }

    #[test]
    fn striation_mapping_matches_pointwise_image() {
        for d in [2u32, 3, 5] {
            let space = PhaseSpace::new(d).unwrap();
            for &s in space.symplectic_group() {
                for striation in space.striations() {
                    let image_id = space.map_striation(s, striation.id);
                    // the pointwise image of each line must be a line of the
                    // image striation
                    for line in striation.lines() {
                        let mut image: Vec<PhasePoint> =
                            line.points().iter().map(|&pt| space.apply(s, pt)).collect();
                        image.sort();
                        let target = space.striation(image_id);
                        assert!(target
                            .lines()
                            .iter()
                            .any(|l| l.points() == image.as_slice()));
                    }
                }
            }
        }
    }
}

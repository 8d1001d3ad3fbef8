//! Exact integer linear algebra over lattices.
//!
//! Smith and Hermite normal forms over ℤ (arbitrary precision), lattice
//! indices of integer maps, saturation of sublattices, and deterministic
//! quotient coordinates. All functions are pure; all outputs are
//! reproducible byte-for-byte because pivoting and normalization are
//! deterministic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// A vector with exact integer coordinates in a fixed standard basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntVector {
    pub coords: Vec<BigInt>,
}

impl IntVector {
    pub fn new(coords: Vec<BigInt>) -> Self {
        IntVector { coords }
    }

    pub fn from_i64(coords: &[i64]) -> Self {
        IntVector {
            coords: coords.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        IntVector {
            coords: vec![BigInt::zero(); rank],
        }
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut v = Self::zero(rank);
        v.coords[i] = BigInt::one();
        v
    }

    pub fn rank(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn dot(&self, other: &IntVector) -> BigInt {
        assert_eq!(self.rank(), other.rank(), "rank mismatch in dot product");
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        assert_eq!(self.rank(), other.rank());
        IntVector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self) -> IntVector {
        IntVector::new(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &BigInt) -> IntVector {
        IntVector::new(self.coords.iter().map(|a| a * k).collect())
    }

    /// gcd of the entries; 0 for the zero vector.
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in &self.coords {
            g = g.gcd(c);
        }
        g
    }

    /// The primitive vector with the same direction, and the index, so that
    /// `self = index · primitive`. The zero vector returns (0, 0-vector).
    pub fn primitive_part(&self) -> (IntVector, BigInt) {
        let g = self.content();
        if g.is_zero() {
            return (self.clone(), g);
        }
        (
            IntVector::new(self.coords.iter().map(|c| c / &g).collect()),
            g,
        )
    }
}

/// The index |v| of a vector: the gcd of its entries (0 for the zero vector).
pub fn primitive_index(v: &IntVector) -> BigInt {
    v.content()
}

/// Dense integer matrix, row-major. Maps act on column vectors:
/// a `rows × cols` matrix is a map ℤ^cols → ℤ^rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<IntVector>, cols: usize) -> Self {
        let mut m = Self::zero(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.rank(), cols, "row length mismatch");
            for j in 0..cols {
                *m.at_mut(i, j) = r.coords[j].clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let r = rows.len();
        let c = if r > 0 { rows[0].len() } else { 0 };
        let mut m = Self::zero(r, c);
        for i in 0..r {
            assert_eq!(rows[i].len(), c);
            for j in 0..c {
                *m.at_mut(i, j) = BigInt::from(rows[i][j]);
            }
        }
        m
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> IntVector {
        IntVector::new((0..self.cols).map(|j| self.at(i, j).clone()).collect())
    }

    pub fn col(&self, j: usize) -> IntVector {
        IntVector::new((0..self.rows).map(|i| self.at(i, j).clone()).collect())
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(
            self.cols, other.rows,
            "dimension mismatch in matrix product"
        );
        let mut m = IntMatrix::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * other.at(k, j);
                    *m.at_mut(i, j) += prod;
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &IntVector) -> IntVector {
        assert_eq!(self.cols, v.rank(), "dimension mismatch in matrix apply");
        IntVector::new(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| self.at(i, j) * &v.coords[j]).sum())
                .collect(),
        )
    }

    /// Stack `other` below `self` (same column count).
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.cols);
        let mut m = IntMatrix::zero(self.rows + other.rows, self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..self.cols {
                *m.at_mut(self.rows + i, j) = other.at(i, j).clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            let c = self.cols;
            self.entries.swap(a * c + j, b * c + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            let c = self.cols;
            self.entries.swap(i * c + a, i * c + b);
        }
    }

    /// row[a] += q · row[b]
    fn add_row_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        for j in 0..self.cols {
            let add = q * self.at(b, j);
            *self.at_mut(a, j) += add;
        }
    }

    /// col[a] += q · col[b]
    fn add_col_mul(&mut self, a: usize, b: usize, q: &BigInt) {
        for i in 0..self.rows {
            let add = q * self.at(i, b);
            *self.at_mut(i, a) += add;
        }
    }

    fn negate_row(&mut self, a: usize) {
        for j in 0..self.cols {
            let v = -self.at(a, j).clone();
            *self.at_mut(a, j) = v;
        }
    }
}

/// Smith normal form: returns (u, d, v) with u·m·v = d, u and v unimodular,
/// d diagonal with nonnegative entries and d_i | d_{i+1}.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let bound = m.rows.min(m.cols);

    let mut t = 0;
    while t < bound {
        // deterministic pivot: minimal |entry| among nonzeros, ties by (i, j)
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m.rows {
            for j in t..m.cols {
                if d.at(i, j).is_zero() {
                    continue;
                }
                match pivot {
                    None => pivot = Some((i, j)),
                    Some((pi, pj)) => {
                        if d.at(i, j).abs() < d.at(pi, pj).abs() {
                            pivot = Some((i, j));
                        }
                    }
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        // clear row t and column t; restart when a remainder shrinks the pivot
        loop {
            let mut clean = true;
            for i in t + 1..m.rows {
                if d.at(i, t).is_zero() {
                    continue;
                }
                let q = -(d.at(i, t) / d.at(t, t));
                d.add_row_mul(i, t, &q);
                u.add_row_mul(i, t, &q);
                if !d.at(i, t).is_zero() {
                    d.swap_rows(t, i);
                    u.swap_rows(t, i);
                    clean = false;
                }
            }
            for j in t + 1..m.cols {
                if d.at(t, j).is_zero() {
                    continue;
                }
                let q = -(d.at(t, j) / d.at(t, t));
                d.add_col_mul(j, t, &q);
                v.add_col_mul(j, t, &q);
                if !d.at(t, j).is_zero() {
                    d.swap_cols(t, j);
                    v.swap_cols(t, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }

        // pivot must divide every remaining entry; if not, fold the offending
        // row in and redo this step
        let mut redo = false;
        'divisibility: for i in t + 1..m.rows {
            for j in t + 1..m.cols {
                if !(d.at(i, j) % d.at(t, t)).is_zero() {
                    let one = BigInt::one();
                    d.add_row_mul(t, i, &one);
                    u.add_row_mul(t, i, &one);
                    redo = true;
                    break 'divisibility;
                }
            }
        }
        if redo {
            continue;
        }

        if d.at(t, t).is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    (u, d, v)
}

/// Diagonal of the Smith form (length min(rows, cols)).
pub fn smith_diagonal(m: &IntMatrix) -> Vec<BigInt> {
    let (_, d, _) = smith_normal_form(m);
    (0..m.rows.min(m.cols))
        .map(|i| d.at(i, i).clone())
        .collect()
}

/// Rank of an integer matrix.
pub fn rank(m: &IntMatrix) -> usize {
    smith_diagonal(m).iter().filter(|d| !d.is_zero()).count()
}

/// Index [codomain : image] of the lattice map ℤ^cols → ℤ^rows given by `m`,
/// or 0 when the cokernel is infinite (image of rank < rows).
pub fn index_of_map(m: &IntMatrix) -> BigInt {
    if m.rows == 0 {
        return BigInt::one();
    }
    let diag = smith_diagonal(m);
    if diag.len() < m.rows {
        return BigInt::zero();
    }
    let mut idx = BigInt::one();
    for d in &diag {
        if d.is_zero() {
            return BigInt::zero();
        }
        idx *= d;
    }
    idx
}

/// Canonical (row-style Hermite) basis of the lattice spanned by `rows`.
/// Pivots are positive, entries above each pivot are reduced into
/// [0, pivot), zero rows are dropped. The result is the unique such basis.
pub fn hermite_basis(rows: &[IntVector], ambient: usize) -> Vec<IntVector> {
    let mut m = IntMatrix::from_rows(rows.to_vec(), ambient);
    let mut pivot_row = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..ambient {
        // gcd the column below pivot_row into one row
        loop {
            let mut best: Option<usize> = None;
            for i in pivot_row..m.rows {
                if m.at(i, col).is_zero() {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if m.at(i, col).abs() < m.at(b, col).abs() {
                            best = Some(i);
                        }
                    }
                }
            }
            let Some(b) = best else { break };
            m.swap_rows(pivot_row, b);
            let mut done = true;
            for i in pivot_row + 1..m.rows {
                if m.at(i, col).is_zero() {
                    continue;
                }
                let q = -(m.at(i, col) / m.at(pivot_row, col));
                m.add_row_mul(i, pivot_row, &q);
                if !m.at(i, col).is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if pivot_row < m.rows && !m.at(pivot_row, col).is_zero() {
            if m.at(pivot_row, col).is_negative() {
                m.negate_row(pivot_row);
            }
            pivots.push((pivot_row, col));
            pivot_row += 1;
        }
    }
    // reduce entries above each pivot into [0, pivot)
    for &(pr, pc) in pivots.iter() {
        for i in 0..pr {
            let p = m.at(pr, pc).clone();
            let q = -m.at(i, pc).div_floor(&p);
            if !q.is_zero() {
                m.add_row_mul(i, pr, &q);
            }
        }
    }
    (0..pivot_row).map(|i| m.row(i)).collect()
}

/// Canonical basis of the integer kernel of the map ℤ^cols → ℤ^rows.
/// The kernel of an integer matrix is always saturated.
pub fn kernel_basis(m: &IntMatrix) -> Vec<IntVector> {
    let (_, d, v) = smith_normal_form(m);
    let bound = m.rows.min(m.cols);
    let mut gens = Vec::new();
    for j in 0..m.cols {
        if j >= bound || d.at(j, j).is_zero() {
            gens.push(v.col(j));
        }
    }
    hermite_basis(&gens, m.cols)
}

/// Exact inverse of a unimodular integer matrix (errors when |det| ≠ 1).
pub fn inverse_unimodular(m: &IntMatrix) -> Result<IntMatrix> {
    if m.rows != m.cols {
        return Err(Error::Precondition("only square matrices invert".into()));
    }
    let n = m.rows;
    if index_of_map(m) != BigInt::one() {
        return Err(Error::Precondition("matrix is not unimodular".into()));
    }
    // rational Gauss–Jordan; entries come out integral because |det| = 1
    use num_rational::BigRational;
    let mut a: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from(m.at(i, j).clone()))
                .chain((0..n).map(|j| {
                    BigRational::from(if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    })
                }))
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .find(|&i| !a[i][col].is_zero())
            .expect("unimodular matrix is nonsingular");
        a.swap(col, p);
        let inv = a[col][col].recip();
        for j in 0..2 * n {
            let v = &a[col][j] * &inv;
            a[col][j] = v;
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in 0..2 * n {
                    let v = &a[i][j] - &f * &a[col][j];
                    a[i][j] = v;
                }
            }
        }
    }
    let mut out = IntMatrix::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            debug_assert!(a[i][n + j].is_integer());
            *out.at_mut(i, j) = a[i][n + j].to_integer();
        }
    }
    Ok(out)
}

/// Complete a primitive vector to a basis of the ambient lattice: returns
/// r−1 vectors b_i such that {b_1, …, b_{r−1}, u} is unimodular.
pub fn complete_to_basis(u: &IntVector) -> Result<Vec<IntVector>> {
    if u.content() != BigInt::one() {
        return Err(Error::Precondition(
            "only primitive vectors complete to a basis".into(),
        ));
    }
    let r = u.rank();
    let col = IntMatrix::from_rows(vec![u.clone()], r).transpose();
    let (uu, d, _v) = smith_normal_form(&col);
    debug_assert!(d.at(0, 0).is_one());
    let uinv = inverse_unimodular(&uu)?;
    // u is the first column of uu⁻¹; the rest complete it
    Ok((1..r).map(|j| uinv.col(j)).collect())
}

/// Basis of a saturated sublattice whose first vector is the given
/// primitive member u.
pub fn basis_through(w: &Sublattice, u: &IntVector) -> Result<Vec<IntVector>> {
    if !w.contains(u) {
        return Err(Error::Precondition(
            "vector lies outside the sublattice".into(),
        ));
    }
    if u.content() != BigInt::one() {
        return Err(Error::Precondition(
            "basis_through needs a primitive vector".into(),
        ));
    }
    let basis = w.basis();
    let k = basis.len();
    // coordinates of u in the basis: solve B·x = u
    let b = IntMatrix::from_rows(basis.clone(), w.ambient_rank).transpose();
    let (uu, d, v) = smith_normal_form(&b);
    let uu_u = uu.apply(u);
    let mut x = IntVector::zero(k);
    for i in 0..k {
        debug_assert!((&uu_u.coords[i] % d.at(i, i)).is_zero());
        x.coords[i] = &uu_u.coords[i] / d.at(i, i);
    }
    for i in k..w.ambient_rank {
        debug_assert!(uu_u.coords[i].is_zero());
    }
    let x = v.apply(&x);
    debug_assert_eq!(b.apply(&x), *u);
    let mut out = vec![u.clone()];
    for y in complete_to_basis(&x)? {
        out.push(b.apply(&y));
    }
    Ok(out)
}

/// A sublattice of ℤ^ambient_rank given by generators (not necessarily
/// independent or saturated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sublattice {
    pub ambient_rank: usize,
    pub generators: Vec<IntVector>,
}

impl Sublattice {
    pub fn new(ambient_rank: usize, generators: Vec<IntVector>) -> Self {
        for g in &generators {
            assert_eq!(g.rank(), ambient_rank, "generator rank mismatch");
        }
        Sublattice {
            ambient_rank,
            generators,
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            generators: Vec::new(),
        }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            generators: (0..ambient_rank)
                .map(|i| IntVector::unit(ambient_rank, i))
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        hermite_basis(&self.generators, self.ambient_rank).len()
    }

    /// Canonical Hermite basis of the lattice generated (without saturating).
    pub fn basis(&self) -> Vec<IntVector> {
        hermite_basis(&self.generators, self.ambient_rank)
    }

    pub fn is_saturated(&self) -> bool {
        self.basis() == saturate(self).basis()
    }

    pub fn contains(&self, v: &IntVector) -> bool {
        // reduce v against the Hermite basis
        let basis = self.basis();
        let mut w = v.clone();
        for b in &basis {
            let pc = (0..self.ambient_rank)
                .find(|&j| !b.coords[j].is_zero())
                .unwrap();
            let (q, r) = w.coords[pc].div_rem(&b.coords[pc]);
            if !r.is_zero() {
                return false;
            }
            w = w.add(&b.scale(&-q));
        }
        w.is_zero()
    }
}

/// Forms vanishing on the sublattice: the kernel of pairing with the
/// generators, a saturated sublattice of the dual of rank
/// ambient − rank(w).
pub fn annihilator(w: &Sublattice) -> Sublattice {
    let m = IntMatrix::from_rows(w.generators.clone(), w.ambient_rank);
    Sublattice::new(w.ambient_rank, kernel_basis(&m))
}

/// Saturation: (ℚ-span of the generators) ∩ ℤ^ambient, with canonical basis.
pub fn saturate(s: &Sublattice) -> Sublattice {
    annihilator(&annihilator(s))
}

/// Matrix of the projection ℤ^r → ℤ^r / W in a deterministic basis of the
/// quotient lattice. Requires W saturated; the quotient is then free of rank
/// r − rank(W) and the projection has a right inverse.
pub fn quotient_projection(w: &Sublattice) -> Result<IntMatrix> {
    let r = w.ambient_rank;
    if !w.is_saturated() {
        return Err(Error::Precondition(format!(
            "sublattice of rank {} in ℤ^{} is not saturated; saturate first",
            w.rank(),
            r
        )));
    }
    let basis = w.basis();
    let s = basis.len();
    if s == 0 {
        return Ok(IntMatrix::identity(r));
    }
    // u·b·v = d with d = [I_s; 0]; the last r−s rows of u kill W and map
    // onto the quotient
    let b = IntMatrix::from_rows(basis, r).transpose();
    let (u, d, _v) = smith_normal_form(&b);
    for i in 0..s {
        debug_assert!(d.at(i, i).is_one(), "saturated lattice has unit Smith form");
    }
    let proj_rows: Vec<IntVector> = (s..r).map(|i| u.row(i)).collect();
    // canonicalize the quotient basis choice
    let rows = hermite_basis(&proj_rows, r);
    debug_assert_eq!(rows.len(), r - s);
    Ok(IntMatrix::from_rows(rows, r))
}

/// Index of ℤ^rank → ⊕_i ℤ^rank/(subspace_i) with each subspace saturated;
/// 0 when not finite-index.
pub fn intersection_index(ambient_rank: usize, subspaces: &[Sublattice]) -> Result<BigInt> {
    let mut stacked = IntMatrix::zero(0, ambient_rank);
    for s in subspaces {
        let p = quotient_projection(s)?;
        stacked = stacked.stack(&p);
    }
    Ok(index_of_map(&stacked))
}

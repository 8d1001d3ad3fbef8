//! Affine incidence conditions and their associated forms.
//!
//! A constraint on a marked end is a rational-slope affine subspace of N_ℝ,
//! stored as a saturated direction span, an optional rational translation,
//! and a positive weight. The weight is carried by the index of the
//! associated form α, which is how all four multiplicity methods see it.
//! Translations never enter multiplicity computations; they only feed the
//! realizability solve, and their genericity is the caller's responsibility.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::curve::{PsiVector, TropicalCurve};
use crate::exterior::{alpha_from_subspace, Multivector};
use crate::lattice::{IntVector, Sublattice};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineConstraint {
    /// Saturated direction span 𝕃_N(A).
    pub span: Sublattice,
    /// Optional translation of the affine subspace (rational point it passes
    /// through).
    pub translation: Option<Vec<BigRational>>,
    /// Weight ≥ 1; the associated form has this index.
    pub weight: BigInt,
}

impl AffineConstraint {
    pub fn new(span: Sublattice) -> Self {
        AffineConstraint {
            span,
            translation: None,
            weight: BigInt::one(),
        }
    }

    /// The trivial condition A = N_ℝ.
    pub fn trivial(rank: usize) -> Self {
        Self::new(Sublattice::full(rank))
    }

    /// A point condition (codimension = rank).
    pub fn point(rank: usize, at: Option<Vec<BigRational>>) -> Self {
        AffineConstraint {
            span: Sublattice::zero(rank),
            translation: at,
            weight: BigInt::one(),
        }
    }

    /// Hyperplane with the given integral normal.
    pub fn hyperplane(normal: &IntVector) -> Self {
        let rank = normal.rank();
        let span = crate::lattice::annihilator(&Sublattice::new(rank, vec![normal.clone()]));
        Self::new(span)
    }

    pub fn with_weight(mut self, w: i64) -> Self {
        self.weight = BigInt::from(w);
        self
    }

    pub fn with_translation(mut self, t: Vec<BigRational>) -> Self {
        self.translation = Some(t);
        self
    }

    pub fn codim(&self) -> usize {
        self.span.ambient_rank - self.span.rank()
    }

    pub fn is_trivial(&self) -> bool {
        self.codim() == 0
    }

    pub fn is_point(&self) -> bool {
        self.span.rank() == 0
    }

    /// The index-weight form of degree codim(A) vanishing on the span.
    pub fn alpha(&self) -> Result<Multivector> {
        if !self.span.is_saturated() {
            return Err(Error::Precondition(
                "constraint span must be saturated".into(),
            ));
        }
        alpha_from_subspace(&self.span, &self.weight)
    }
}

/// Check each constraint decorates its end compatibly: the weighted end
/// direction must lie in the span (so α lands in Λ*M_{Δ(i)}).
pub fn check_constraints(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<()> {
    if constraints.len() != c.markings.len() {
        return Err(Error::Precondition(format!(
            "{} constraints for {} markings",
            constraints.len(),
            c.markings.len()
        )));
    }
    for (m, a) in c.markings.iter().zip(constraints) {
        if a.span.ambient_rank != c.rank {
            return Err(Error::Precondition(format!(
                "constraint on marking {} has ambient rank {}, curve has {}",
                m.index, a.span.ambient_rank, c.rank
            )));
        }
        if !a.span.is_saturated() {
            return Err(Error::Precondition(format!(
                "constraint span on marking {} is not saturated",
                m.index
            )));
        }
        if a.weight < BigInt::one() {
            return Err(Error::Precondition(format!(
                "constraint weight on marking {} must be ≥ 1",
                m.index
            )));
        }
        let delta = c.edge(m.edge).weighted_direction();
        if !delta.is_zero() && !a.span.contains(&delta) {
            return Err(Error::Precondition(format!(
                "end direction of marking {} does not lie in its constraint span",
                m.index
            )));
        }
    }
    Ok(())
}

/// Σ codim(A_i) = expected dimension — the numerical half of rigidity.
pub fn rigidity_dimension_check(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    _psi: &PsiVector,
) -> Result<bool> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    let total: i64 = constraints.iter().map(|a| a.codim() as i64).sum();
    Ok(total == c.expected_dimension())
}

/// Exact rational positions realizing the curve: a position per vertex and a
/// positive length per compact edge satisfying all direction and incidence
/// equations, or None when the system is inconsistent or forces a
/// nonpositive length.
pub fn realizability_solve(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
) -> Result<Option<RealizedPositions>> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    let r = c.rank;
    let nv = c.vertices.len();
    let compact: Vec<_> = c.compact_edges().collect();
    let ne = compact.len();
    let vars = r * nv + ne; // vertex coordinates, then one length per edge
    let vidx = |v: u32| -> usize { c.vertices.iter().position(|x| x.id == v).unwrap() };

    // rows of an exact rational linear system Ax = b
    let mut rows: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    let zero = BigRational::zero();

    // direction equations: pos_head − pos_tail − t_E·u_E = 0
    for (k, e) in compact.iter().enumerate() {
        let (t, h) = (vidx(e.tail), vidx(e.head.unwrap()));
        for j in 0..r {
            let mut row = vec![zero.clone(); vars];
            row[h * r + j] += BigRational::one();
            row[t * r + j] -= BigRational::one();
            row[r * nv + k] -= BigRational::from(e.direction.coords[j].clone());
            rows.push((row, zero.clone()));
        }
    }
    // incidence equations: for a translated constraint with span W, the
    // vertex at the marked end satisfies P·pos = P·translation for the
    // quotient projection P of W
    for (m, a) in c.markings.iter().zip(constraints) {
        let Some(tr) = &a.translation else { continue };
        if tr.len() != r {
            return Err(Error::Precondition("translation has wrong rank".into()));
        }
        let v = vidx(c.edge(m.edge).tail);
        let p = crate::lattice::quotient_projection(&a.span)?;
        for i in 0..p.rows {
            let mut row = vec![zero.clone(); vars];
            let mut rhs = zero.clone();
            for j in 0..r {
                row[v * r + j] = BigRational::from(p.at(i, j).clone());
                rhs += BigRational::from(p.at(i, j).clone()) * &tr[j];
            }
            rows.push((row, rhs));
        }
    }

    let Some((particular, kernel)) = solve_rational(&rows, vars) else {
        return Ok(None);
    };

    // push the solution into the open cone t_E > 0 for every compact edge
    let length_coords: Vec<usize> = (0..ne).map(|k| r * nv + k).collect();
    let Some(solution) = make_positive(&particular, &kernel, &length_coords) else {
        return Ok(None);
    };

    let mut positions = Vec::new();
    for v in 0..nv {
        positions.push(solution[v * r..(v + 1) * r].to_vec());
    }
    let lengths = length_coords.iter().map(|&i| solution[i].clone()).collect();
    Ok(Some(RealizedPositions { positions, lengths }))
}

#[derive(Debug, Clone)]
pub struct RealizedPositions {
    /// One rational point per vertex, in vertex order.
    pub positions: Vec<Vec<BigRational>>,
    /// One positive rational length per compact edge, in edge order.
    pub lengths: Vec<BigRational>,
}

/// Gaussian elimination over ℚ: returns a particular solution and a kernel
/// basis, or None when inconsistent.
fn solve_rational(
    rows: &[(Vec<BigRational>, BigRational)],
    vars: usize,
) -> Option<(Vec<BigRational>, Vec<Vec<BigRational>>)> {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let m = a.len();
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; vars];
    let mut row = 0;
    for col in 0..vars {
        let Some(p) = (row..m).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let inv = a[row][col].recip();
        for j in col..=vars {
            let v = &a[row][j] * &inv;
            a[row][j] = v;
        }
        for i in 0..m {
            if i != row && !a[i][col].is_zero() {
                let f = a[i][col].clone();
                for j in col..=vars {
                    let v = &a[i][j] - &f * &a[row][j];
                    a[i][j] = v;
                }
            }
        }
        pivot_of_col[col] = Some(row);
        row += 1;
        if row == m {
            break;
        }
    }
    // inconsistent: zero row with nonzero rhs
    for i in row..m {
        if a[i][..vars].iter().all(|x| x.is_zero()) && !a[i][vars].is_zero() {
            return None;
        }
    }
    let mut particular = vec![BigRational::zero(); vars];
    for col in 0..vars {
        if let Some(r) = pivot_of_col[col] {
            particular[col] = a[r][vars].clone();
        }
    }
    let mut kernel = Vec::new();
    for free in 0..vars {
        if pivot_of_col[free].is_some() {
            continue;
        }
        let mut k = vec![BigRational::zero(); vars];
        k[free] = BigRational::one();
        for col in 0..vars {
            if let Some(r) = pivot_of_col[col] {
                k[col] = -a[r][free].clone();
            }
        }
        kernel.push(k);
    }
    Some((particular, kernel))
}

/// Find a point of the affine space particular + span(kernel) with strictly
/// positive coordinates at `positive`: Fourier–Motzkin elimination on the
/// kernel coefficients.
fn make_positive(
    particular: &[BigRational],
    kernel: &[Vec<BigRational>],
    positive: &[usize],
) -> Option<Vec<BigRational>> {
    // inequality system over μ: particular[i] + Σ_j μ_j·kernel_j[i] > 0
    let ineqs: Vec<(Vec<BigRational>, BigRational)> = positive
        .iter()
        .map(|&i| {
            let coeffs: Vec<BigRational> = kernel.iter().map(|kv| kv[i].clone()).collect();
            (coeffs, particular[i].clone())
        })
        .collect();
    let mu = fourier_motzkin(ineqs, kernel.len())?;
    let mut out = particular.to_vec();
    for (j, kv) in kernel.iter().enumerate() {
        for i in 0..out.len() {
            let v = &out[i] + &mu[j] * &kv[i];
            out[i] = v;
        }
    }
    debug_assert!(positive.iter().all(|&i| out[i].is_positive()));
    Some(out)
}

/// Solve Σ_j coeffs_j·μ_j + cst > 0 by eliminating the last variable,
/// recursing, and back-substituting a value inside the open interval.
fn fourier_motzkin(
    ineqs: Vec<(Vec<BigRational>, BigRational)>,
    nvars: usize,
) -> Option<Vec<BigRational>> {
    if nvars == 0 {
        return if ineqs.iter().all(|(_, c)| c.is_positive()) {
            Some(Vec::new())
        } else {
            None
        };
    }
    let var = nvars - 1;
    let mut zero_part = Vec::new();
    let mut lowers = Vec::new(); // a > 0: μ_var > −rest/a
    let mut uppers = Vec::new(); // a < 0: μ_var < −rest/a
    for (coeffs, cst) in &ineqs {
        let a = coeffs[var].clone();
        let rest = (coeffs[..var].to_vec(), cst.clone());
        if a.is_zero() {
            zero_part.push(rest);
        } else if a.is_positive() {
            lowers.push((a, rest));
        } else {
            uppers.push((a, rest));
        }
    }
    // every (lower, upper) pair yields a reduced strict inequality
    let mut reduced = zero_part;
    for (a, (lc, lk)) in &lowers {
        for (b, (uc, uk)) in &uppers {
            // a·μ + L > 0 and b·μ + U > 0 with b < 0:
            // (−b)·L + a·U > 0 eliminates μ
            let nb = -b.clone();
            let coeffs: Vec<BigRational> =
                lc.iter().zip(uc).map(|(l, u)| &nb * l + a * u).collect();
            let cst = &nb * lk + a * uk;
            reduced.push((coeffs, cst));
        }
    }
    let mu_rest = fourier_motzkin(reduced, var)?;
    let eval = |coeffs: &[BigRational], cst: &BigRational| -> BigRational {
        let mut v = cst.clone();
        for (c, m) in coeffs.iter().zip(&mu_rest) {
            v += c * m;
        }
        v
    };
    let lo = lowers.iter().map(|(a, (c, k))| -eval(c, k) / a).max();
    let hi = uppers.iter().map(|(a, (c, k))| -eval(c, k) / a).min();
    let value = match (lo, hi) {
        (Some(l), Some(u)) => {
            if l >= u {
                return None;
            }
            (&l + &u) / BigRational::from(BigInt::from(2))
        }
        (Some(l), None) => l + BigRational::one(),
        (None, Some(u)) => u - BigRational::one(),
        (None, None) => BigRational::zero(),
    };
    let mut mu = mu_rest;
    mu.push(value);
    Some(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn alpha_of_matches_subspace_form() {
        let a = AffineConstraint::hyperplane(&IntVector::from_i64(&[0, 1]));
        let alpha = a.alpha().unwrap();
        assert_eq!(alpha.degree(), Some(1));
        assert_eq!(alpha.content(), BigInt::one());
        for v in &a.span.generators {
            assert!(crate::exterior::contract_vector(v, &alpha).is_zero());
        }
        let p = AffineConstraint::point(2, None).with_weight(3);
        let alpha = p.alpha().unwrap();
        assert_eq!(alpha.degree(), Some(2));
        assert_eq!(alpha.content(), BigInt::from(3));
    }

    #[test]
    fn rigidity_dimension_examples() {
        // line through two points: 2+2 = d^trop = 4 with #I = 5
        let (c, a, psi) = fixtures::e1();
        assert!(rigidity_dimension_check(&c, &a, &psi).unwrap());
        // dropping one point condition breaks the count
        let mut a2 = a.clone();
        let pt = a2.iter().position(|x| x.is_point()).unwrap();
        a2[pt] = AffineConstraint::trivial(2);
        assert!(!rigidity_dimension_check(&c, &a2, &psi).unwrap());
        // the genus-1 example is rigid: three lines + three ψ with s = 1
        let (c, a, psi) = fixtures::genus1(&[1, 1, 1, 2, 1, 3]);
        assert!(rigidity_dimension_check(&c, &a, &psi).unwrap());
    }

    #[test]
    fn constraint_span_must_contain_direction() {
        let (c, mut a, _) = fixtures::e2(2);
        // put a hyperplane condition with normal not perpendicular to the end
        let m = c
            .markings
            .iter()
            .position(|m| !c.edge(m.edge).is_contracted() && a[..1].len() > 0)
            .unwrap();
        let dir = c.edge(c.markings[m].edge).direction.clone();
        // normal = direction itself: pairing nonzero, span excludes the end
        a[m] = AffineConstraint::hyperplane(&dir);
        assert!(check_constraints(&c, &a).is_err());
    }

    #[test]
    fn realizability_through_two_points() {
        use num_traits::FromPrimitive;
        let (c, mut a, _) = fixtures::e1();
        // pin the two point conditions at (0,0) and (3,2)
        let mut seen = 0;
        for x in a.iter_mut() {
            if x.is_point() {
                let t = if seen == 0 {
                    vec![BigRational::zero(), BigRational::zero()]
                } else {
                    vec![
                        BigRational::from_i64(3).unwrap(),
                        BigRational::from_i64(-2).unwrap(),
                    ]
                };
                *x = AffineConstraint::point(2, Some(t));
                seen += 1;
            }
        }
        let sol = realizability_solve(&c, &a).unwrap();
        assert!(
            sol.is_some(),
            "line through two generic points is realizable"
        );
        let sol = sol.unwrap();
        for l in &sol.lengths {
            assert!(l.is_positive());
        }
        // contradictory: both points equal but the curve separates them
        for x in a.iter_mut() {
            if x.is_point() {
                *x = AffineConstraint::point(
                    2,
                    Some(vec![BigRational::zero(), BigRational::zero()]),
                );
            }
        }
        // the two marked vertices are joined by compact edges of nonzero
        // length, so coincident points force a nonpositive length
        let sol = realizability_solve(&c, &a).unwrap();
        assert!(sol.is_none());
    }

    #[test]
    fn realizability_respects_edge_orientation() {
        use num_traits::FromPrimitive;
        // pin both line conditions of the weight-2 fixture; the compact edge
        // must stretch from the first line to the second in its stored
        // direction, so the order of the translations decides feasibility
        let (c, mut a, _) = fixtures::e2(2);
        a[0] = a[0]
            .clone()
            .with_translation(vec![BigRational::zero(), BigRational::zero()]);
        a[2] = a[2]
            .clone()
            .with_translation(vec![BigRational::zero(), BigRational::from_i64(5).unwrap()]);
        let sol = realizability_solve(&c, &a).unwrap();
        assert!(sol.is_some(), "edge pointing from y=0 up to y=5 is realizable");
        a[2] = a[2]
            .clone()
            .with_translation(vec![BigRational::zero(), BigRational::from_i64(-5).unwrap()]);
        let sol = realizability_solve(&c, &a).unwrap();
        assert!(sol.is_none(), "edge cannot stretch downward");
    }

    #[test]
    fn realizability_unconstrained_returns_a_placement() {
        let (c, a, _) = fixtures::e2(3);
        // strip translations: nothing pins the curve
        let a: Vec<_> = a
            .into_iter()
            .map(|mut x| {
                x.translation = None;
                x
            })
            .collect();
        let sol = realizability_solve(&c, &a).unwrap().unwrap();
        assert_eq!(sol.positions.len(), c.vertices.len());
        for l in &sol.lengths {
            assert!(l.is_positive());
        }
    }
}

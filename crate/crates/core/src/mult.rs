//! The ground-truth multiplicity: the lattice map Φ, rigidity, 𝔇_Γ and Mult.
//!
//! Φ sends a position per vertex to its defects against every compact edge
//! (difference across the edge, modulo the edge line) and every incidence
//! condition (position of the marked vertex, modulo the constraint span).
//! A curve is rigid when Φ is a finite-index inclusion; 𝔇 is that index and
//! Mult is 𝔇 times the compact edge weights times the constraint weights.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::constraints::{check_constraints, rigidity_dimension_check, AffineConstraint};
use crate::curve::{PsiVector, TropicalCurve};
use crate::lattice::{
    index_of_map, intersection_index, quotient_projection, rank, saturate, IntMatrix, IntVector,
    Sublattice,
};
use crate::{Error, Result};

/// Φ as an explicit matrix with its block bookkeeping.
#[derive(Debug, Clone)]
pub struct PhiMap {
    /// rows = Σ block ranks, cols = r·#vertices
    pub matrix: IntMatrix,
    /// (label, first row, rows) per codomain block.
    pub blocks: Vec<(String, usize, usize)>,
}

fn vertex_pos(c: &TropicalCurve, v: u32) -> usize {
    c.vertices.iter().position(|x| x.id == v).unwrap()
}

/// Build Φ for the curve and its constraint tuple. Deterministic in the
/// stored vertex/edge/marking order and the canonical quotient bases.
pub fn build_phi(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<PhiMap> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    if c.compact_edges().any(|e| e.is_contracted()) {
        return Err(Error::Precondition(
            "compact weight-0 edge present; contract it before computing multiplicities".into(),
        ));
    }
    let r = c.rank;
    let cols = r * c.vertices.len();
    let mut rows: Vec<IntVector> = Vec::new();
    let mut blocks = Vec::new();

    for e in c.compact_edges() {
        let span = saturate(&Sublattice::new(r, vec![e.direction.clone()]));
        let p = quotient_projection(&span)?;
        let start = rows.len();
        let (t, h) = (vertex_pos(c, e.tail), vertex_pos(c, e.head.unwrap()));
        for i in 0..p.rows {
            let mut row = IntVector::zero(cols);
            for j in 0..r {
                row.coords[t * r + j] = p.at(i, j).clone();
                row.coords[h * r + j] = -p.at(i, j).clone();
            }
            rows.push(row);
        }
        blocks.push((format!("edge {}", e.id), start, p.rows));
    }
    for (m, a) in c.markings.iter().zip(constraints) {
        let p = quotient_projection(&a.span)?;
        let start = rows.len();
        let v = vertex_pos(c, c.edge(m.edge).tail);
        for i in 0..p.rows {
            let mut row = IntVector::zero(cols);
            for j in 0..r {
                row.coords[v * r + j] = p.at(i, j).clone();
            }
            rows.push(row);
        }
        blocks.push((format!("marking {}", m.index), start, p.rows));
    }
    Ok(PhiMap {
        matrix: IntMatrix::from_rows(rows, cols),
        blocks,
    })
}

/// Structural rigidity: the dimension count matches, ψ is admissible, and Φ
/// is a square full-rank map.
pub fn rigid(c: &TropicalCurve, constraints: &[AffineConstraint], psi: &PsiVector) -> Result<bool> {
    if !rigidity_dimension_check(c, constraints, psi)? {
        return Ok(false);
    }
    if !c.psi_check(psi)?.iter().all(|&(_, ok, _)| ok) {
        return Ok(false);
    }
    if c.compact_edges().any(|e| e.is_contracted()) {
        return Ok(false);
    }
    let phi = build_phi(c, constraints)?;
    if phi.matrix.rows != phi.matrix.cols {
        return Ok(false);
    }
    Ok(!index_of_map(&phi.matrix).is_zero())
}

fn require_rigid(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<PhiMap> {
    let phi = build_phi(c, constraints)?;
    if phi.matrix.rows != phi.matrix.cols {
        return Err(Error::Precondition(format!(
            "curve is not rigid: Φ is {}×{}, rank defect {}",
            phi.matrix.rows,
            phi.matrix.cols,
            (phi.matrix.rows as i64 - phi.matrix.cols as i64).abs()
        )));
    }
    let rk = rank(&phi.matrix);
    if rk < phi.matrix.rows {
        return Err(Error::Precondition(format!(
            "curve is not rigid: Φ is square of size {} but has rank {} (defect {})",
            phi.matrix.rows,
            rk,
            phi.matrix.rows - rk
        )));
    }
    Ok(phi)
}

/// 𝔇_Γ = ind(Φ).
pub fn dfrak(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    let phi = require_rigid(c, constraints)?;
    Ok(index_of_map(&phi.matrix))
}

/// Product of the compact edge weights.
pub fn edge_weight_product(c: &TropicalCurve) -> BigInt {
    let mut p = BigInt::one();
    for e in c.compact_edges() {
        p *= BigInt::from(e.weight);
    }
    p
}

/// Product of the constraint weights.
pub fn constraint_weight_product(constraints: &[AffineConstraint]) -> BigInt {
    let mut p = BigInt::one();
    for a in constraints {
        p *= &a.weight;
    }
    p
}

/// Mult = 𝔇 · Π_{compact} w(E) · Π_i w_i.
pub fn mult(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    let d = dfrak(c, constraints)?;
    Ok(d * edge_weight_product(c) * constraint_weight_product(constraints))
}

/// Mult when the input is rigid, 0 otherwise (the convention used inside
/// splitting sums, where non-rigid summands contribute nothing).
pub fn mult_or_zero(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    let total: i64 = constraints.iter().map(|a| a.codim() as i64).sum();
    if total != c.expected_dimension() {
        return Ok(BigInt::zero());
    }
    let phi = build_phi(c, constraints)?;
    if phi.matrix.rows != phi.matrix.cols {
        return Ok(BigInt::zero());
    }
    let d = index_of_map(&phi.matrix);
    Ok(d * edge_weight_product(c) * constraint_weight_product(constraints))
}

/// The tropical intersection number (Π w(E)[Δ_E])·(Π [A_i]) evaluated in the
/// big lattice N^{#V} via stacked quotient projections of the diagonal and
/// pullback subspaces. Equals Mult on rigid curves.
pub fn intersection_form(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    require_rigid(c, constraints)?;
    let r = c.rank;
    let nv = c.vertices.len();
    let big = r * nv;
    let mut subs: Vec<Sublattice> = Vec::new();

    // diagonal subspace per compact edge: positions whose difference across
    // the edge lies on the edge line
    for e in c.compact_edges() {
        let (t, h) = (vertex_pos(c, e.tail), vertex_pos(c, e.head.unwrap()));
        let mut gens = Vec::new();
        for v in 0..nv {
            for j in 0..r {
                if v != t && v != h {
                    gens.push(IntVector::unit(big, v * r + j));
                }
            }
        }
        for j in 0..r {
            let mut g = IntVector::zero(big);
            g.coords[t * r + j] = BigInt::one();
            g.coords[h * r + j] = BigInt::one();
            gens.push(g);
        }
        let mut dir = IntVector::zero(big);
        for j in 0..r {
            dir.coords[t * r + j] = e.direction.coords[j].clone();
        }
        gens.push(dir);
        subs.push(saturate(&Sublattice::new(big, gens)));
    }
    // pullback of each constraint at its marked vertex
    for (m, a) in c.markings.iter().zip(constraints) {
        let v = vertex_pos(c, c.edge(m.edge).tail);
        let mut gens = Vec::new();
        for w in 0..nv {
            for j in 0..r {
                if w != v {
                    gens.push(IntVector::unit(big, w * r + j));
                }
            }
        }
        for b in a.span.basis() {
            let mut g = IntVector::zero(big);
            for j in 0..r {
                g.coords[v * r + j] = b.coords[j].clone();
            }
            gens.push(g);
        }
        subs.push(saturate(&Sublattice::new(big, gens)));
    }
    let idx = intersection_index(big, &subs)?;
    Ok(idx * edge_weight_product(c) * constraint_weight_product(constraints))
}

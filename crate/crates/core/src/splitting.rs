//! Genus-0 splitting of compact edges, vertex and edge multiplicities, and
//! the point-splitting move that works in any genus.
//!
//! Splitting a compact edge E yields two curves with a new unbounded end
//! each; summing products of their multiplicities over complementary
//! incidence conditions on the new ends recovers w(E)·⁻¹·Mult. Iterating
//! gives 𝔇 = Π Mult(V) / Π Mult(E) with the vertex and edge indices built
//! from the swept translation lattices W_E.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::bracket::w_subspace;
use crate::constraints::{check_constraints, AffineConstraint};
use crate::curve::{Edge, EdgeId, Marking, TropicalCurve, VertexId};
use crate::lattice::{
    complete_to_basis, index_of_map, quotient_projection, IntMatrix, IntVector, Sublattice,
};
use crate::mult::mult_or_zero;
use crate::{Error, Result};

/// One result of a split: a curve, its constraints (aligned with
/// markings), and the marking indices of the new unbounded ends (their
/// constraints are template slots, initially trivial).
#[derive(Debug, Clone)]
pub struct SplitPiece {
    pub curve: TropicalCurve,
    pub constraints: Vec<AffineConstraint>,
    pub new_markings: Vec<u32>,
}

/// Split at a compact edge and extend both half-edges to infinity. A
/// bridge yields two pieces (tail side first); a cycle edge yields one
/// curve carrying both new ends (the shape used when cutting a loop open).
pub fn split_edge(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    e: EdgeId,
) -> Result<Vec<SplitPiece>> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    let edge = c.edge(e).clone();
    let Some(head) = edge.head else {
        return Err(Error::Precondition(format!(
            "edge {} is unbounded; split needs a compact edge",
            e
        )));
    };
    let component = |anchor: VertexId| -> Vec<VertexId> {
        let mut members = vec![anchor];
        let mut stack = vec![anchor];
        while let Some(v) = stack.pop() {
            for f in c.edges_at(v) {
                if f.id == e || !f.is_compact() {
                    continue;
                }
                let other = if f.tail == v { f.head.unwrap() } else { f.tail };
                if !members.contains(&other) {
                    members.push(other);
                    stack.push(other);
                }
            }
        }
        members
    };
    let piece = |members: &[VertexId], new_ends: &[(VertexId, IntVector)]| -> SplitPiece {
        let vertices = c
            .vertices
            .iter()
            .filter(|v| members.contains(&v.id))
            .cloned()
            .collect::<Vec<_>>();
        let mut edges: Vec<Edge> = c
            .edges
            .iter()
            .filter(|f| f.id != e && members.contains(&f.tail))
            .cloned()
            .collect();
        let mut markings: Vec<Marking> = Vec::new();
        let mut cons: Vec<AffineConstraint> = Vec::new();
        for (m, a) in c.markings.iter().zip(constraints) {
            if members.contains(&c.edge(m.edge).tail) {
                markings.push(m.clone());
                cons.push(a.clone());
            }
        }
        let mut new_edge_id = c.edges.iter().map(|f| f.id).max().unwrap() + 1;
        let mut new_marking = c.markings.iter().map(|m| m.index).max().unwrap() + 1;
        let mut new_markings = Vec::new();
        for (anchor, direction) in new_ends {
            edges.push(Edge {
                id: new_edge_id,
                tail: *anchor,
                head: None,
                weight: edge.weight,
                direction: direction.clone(),
            });
            markings.push(Marking {
                index: new_marking,
                edge: new_edge_id,
            });
            cons.push(AffineConstraint::trivial(c.rank));
            new_markings.push(new_marking);
            new_edge_id += 1;
            new_marking += 1;
        }
        SplitPiece {
            curve: TropicalCurve {
                rank: c.rank,
                vertices,
                edges,
                markings,
            },
            constraints: cons,
            new_markings,
        }
    };
    let tail_side = component(edge.tail);
    if tail_side.contains(&head) {
        // cycle edge: a single curve remains, with both half-edges extended
        Ok(vec![piece(
            &tail_side,
            &[
                (edge.tail, edge.direction.clone()),
                (head, edge.direction.neg()),
            ],
        )])
    } else {
        let head_side = component(head);
        Ok(vec![
            piece(&tail_side, &[(edge.tail, edge.direction.clone())]),
            piece(&head_side, &[(head, edge.direction.neg())]),
        ])
    }
}

/// The splitting sum w(E)·Σ_{I1⊔I2} Mult(Γ₁, A_{1,I1})·Mult(Γ₂, A_{2,I2})
/// over complementary spans {e_i}_{i∈I}∪{u'_E} of a basis completion of the
/// primitive edge direction. Equals Mult of the whole curve.
///
/// The default completion is adapted to the swept lattices of the two
/// sides: the first vectors complete u inside W of the head side, the rest
/// inside W of the tail side. With that choice exactly one decomposition
/// contributes. An adapted unimodular basis exists precisely when the edge
/// multiplicity is 1; otherwise the unsigned sum does not compute Mult for
/// any basis (the remaining decompositions enter a determinant expansion
/// with opposite signs) and the edge needs the finite-index refinement, so
/// the call errors.
pub fn splitting_sum(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    e: EdgeId,
    basis: Option<&[IntVector]>,
) -> Result<BigInt> {
    let edge = c.edge(e).clone();
    if edge.head.is_none() || edge.is_contracted() {
        return Err(Error::Precondition(
            "splitting sum needs a compact non-contracted edge".into(),
        ));
    }
    let r = c.rank;
    let completion: Vec<IntVector> = match basis {
        Some(b) => {
            if b.len() != r - 1 {
                return Err(Error::Precondition(format!(
                    "basis completion needs {} vectors",
                    r - 1
                )));
            }
            let mut rows = b.to_vec();
            rows.push(edge.direction.clone());
            let m = IntMatrix::from_rows(rows, r);
            if index_of_map(&m) != BigInt::one() {
                return Err(Error::Precondition(
                    "supplied vectors with u'_E do not form a unimodular basis".into(),
                ));
            }
            b.to_vec()
        }
        None => {
            let w_tail = w_subspace(c, constraints, e, edge.tail)?;
            let w_head = w_subspace(c, constraints, e, edge.head.unwrap())?;
            let mut rows = Vec::new();
            for v in crate::lattice::basis_through(&w_head, &edge.direction)?
                .into_iter()
                .skip(1)
            {
                rows.push(v);
            }
            for v in crate::lattice::basis_through(&w_tail, &edge.direction)?
                .into_iter()
                .skip(1)
            {
                rows.push(v);
            }
            let mut check = rows.clone();
            check.push(edge.direction.clone());
            if check.len() != r || index_of_map(&IntMatrix::from_rows(check, r)) != BigInt::one() {
                return Err(Error::Precondition(format!(
                    "edge {} has multiplicity {} > 1: no unimodular basis adapted to the \
                     swept lattices exists, and the unsigned splitting formula needs the \
                     edge-refined lattice",
                    e,
                    edge_mult(c, constraints, e)?
                )));
            }
            rows
        }
    };
    let pieces = split_edge(c, constraints, e)?;
    if pieces.len() != 2 {
        return Err(Error::Precondition(format!(
            "edge {} lies on a cycle; the splitting formula needs genus 0",
            e
        )));
    }
    let (first, second) = (&pieces[0], &pieces[1]);
    let mut total = BigInt::zero();
    for mask in 0u32..(1 << (r - 1)) {
        let span_for = |bits: u32| -> Sublattice {
            let mut gens = vec![edge.direction.clone()];
            for (i, v) in completion.iter().enumerate() {
                if bits & (1 << i) != 0 {
                    gens.push(v.clone());
                }
            }
            Sublattice::new(r, gens)
        };
        let mut c1 = first.constraints.clone();
        *c1.last_mut().unwrap() = AffineConstraint::new(span_for(mask));
        let mut c2 = second.constraints.clone();
        *c2.last_mut().unwrap() = AffineConstraint::new(span_for(!mask & ((1 << (r - 1)) - 1)));
        let m1 = mult_or_zero(&first.curve, &c1)?;
        if m1.is_zero() {
            continue;
        }
        let m2 = mult_or_zero(&second.curve, &c2)?;
        total += m1 * m2;
    }
    Ok(total * BigInt::from(edge.weight))
}

/// W_{∂_V E, E} for every edge at a vertex: the swept lattice of the
/// component away from V, or the constraint span for unbounded edges.
fn w_at(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    v: VertexId,
    e: &Edge,
) -> Result<Sublattice> {
    match e.head {
        None => {
            let m = c
                .marking_for_edge(e.id)
                .ok_or_else(|| Error::Invariant(format!("unmarked unbounded edge {}", e.id)))?;
            let pos = c.markings.iter().position(|x| x.index == m.index).unwrap();
            Ok(constraints[pos].span.clone())
        }
        Some(h) => {
            let far = if e.tail == v { h } else { e.tail };
            w_subspace(c, constraints, e.id, far)
        }
    }
}

/// Mult(V) = ind(N → Π_{E∋V} N/W_{∂_V E,E}).
pub fn vertex_mult(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    v: VertexId,
) -> Result<BigInt> {
    let mut stacked = IntMatrix::zero(0, c.rank);
    let mut edges = c.edges_at(v);
    edges.sort_by_key(|e| e.id);
    for e in edges {
        let w = w_at(c, constraints, v, e)?;
        stacked = stacked.stack(&quotient_projection(&w)?);
    }
    let idx = index_of_map(&stacked);
    if idx.is_zero() {
        return Err(Error::Precondition(format!(
            "vertex multiplicity at {} is not finite (non-rigid configuration)",
            v
        )));
    }
    Ok(idx)
}

/// Mult(E) = ind(N/ℤu'_E → (N/W_{E1}) ⊕ (N/W_{E2})).
pub fn edge_mult(c: &TropicalCurve, constraints: &[AffineConstraint], e: EdgeId) -> Result<BigInt> {
    let edge = c.edge(e).clone();
    let Some(head) = edge.head else {
        return Err(Error::Precondition(
            "edge multiplicity is for compact edges".into(),
        ));
    };
    let w_tail_side = w_subspace(c, constraints, e, edge.tail)?;
    let w_head_side = w_subspace(c, constraints, e, head)?;
    // domain: a complement of ℤu'_E inside N
    let completion = complete_to_basis(&edge.direction)?;
    let p1 = quotient_projection(&w_tail_side)?;
    let p2 = quotient_projection(&w_head_side)?;
    let rows = p1.rows + p2.rows;
    let mut m = IntMatrix::zero(rows, completion.len());
    for (j, b) in completion.iter().enumerate() {
        let v1 = p1.apply(b);
        let v2 = p2.apply(b);
        for i in 0..p1.rows {
            *m.at_mut(i, j) = v1.coords[i].clone();
        }
        for i in 0..p2.rows {
            *m.at_mut(p1.rows + i, j) = v2.coords[i].clone();
        }
    }
    let idx = index_of_map(&m);
    if idx.is_zero() {
        return Err(Error::Precondition(format!(
            "edge multiplicity at {} is not finite (non-rigid configuration)",
            e
        )));
    }
    Ok(idx)
}

/// 𝔇 as Π Mult(V) / Π Mult(E); exact divisibility is an invariant.
pub fn split_cor(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    if c.betti() != 0 || c.vertices.iter().any(|v| v.genus > 0) {
        return Err(Error::Precondition(
            "vertex/edge multiplicities need genus 0".into(),
        ));
    }
    let mut num = BigInt::one();
    for v in &c.vertices {
        num *= vertex_mult(c, constraints, v.id)?;
    }
    let mut den = BigInt::one();
    for e in c.compact_edges() {
        den *= edge_mult(c, constraints, e.id)?;
    }
    if (&num % &den) != BigInt::zero() {
        return Err(Error::Invariant(format!(
            "vertex/edge multiplicity ratio {}/{} is not integral",
            num, den
        )));
    }
    Ok(num / den)
}

/// Split off a point condition: delete the marked vertex, re-anchor each of
/// its other edges at a fresh vertex carrying a straight extension to
/// infinity (trivial condition) and a new contracted end with a point
/// condition. Returns the connected components; the multiplicity of the
/// input equals the product of theirs.
pub fn point_split(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    i: u32,
) -> Result<Vec<(TropicalCurve, Vec<AffineConstraint>)>> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    let pos = c
        .markings
        .iter()
        .position(|m| m.index == i)
        .ok_or_else(|| Error::Precondition(format!("no marking with index {}", i)))?;
    let marked_edge = c.edge(c.markings[pos].edge).clone();
    if !marked_edge.is_contracted() || !constraints[pos].is_point() {
        return Err(Error::Precondition(format!(
            "marking {} is not a contracted end with a point condition",
            i
        )));
    }
    let vi = marked_edge.tail;
    let incident: Vec<Edge> = c
        .edges_at(vi)
        .into_iter()
        .filter(|e| e.id != marked_edge.id)
        .cloned()
        .collect();
    if incident.iter().any(|e| e.head == Some(vi) && e.tail == vi) {
        return Err(Error::Precondition(
            "point splitting at a self-loop is not supported".into(),
        ));
    }
    if incident.iter().any(|e| e.is_contracted()) {
        return Err(Error::Precondition(
            "point splitting at a vertex with another contracted end is not supported".into(),
        ));
    }

    let mut vertices: Vec<crate::curve::Vertex> =
        c.vertices.iter().filter(|v| v.id != vi).cloned().collect();
    let mut edges: Vec<Edge> = c
        .edges
        .iter()
        .filter(|e| e.id != marked_edge.id && e.tail != vi && e.head != Some(vi))
        .cloned()
        .collect();
    let mut markings: Vec<(Marking, AffineConstraint)> = c
        .markings
        .iter()
        .zip(constraints)
        .filter(|(m, _)| m.index != i && c.edge(m.edge).tail != vi)
        .map(|(m, a)| (m.clone(), a.clone()))
        .collect();

    let mut next_vertex = c.vertices.iter().map(|v| v.id).max().unwrap() + 1;
    let mut next_edge = c.edges.iter().map(|e| e.id).max().unwrap() + 1;
    let mut next_marking = c.markings.iter().map(|m| m.index).max().unwrap() + 1;
    for e in &incident {
        let ve = next_vertex;
        next_vertex += 1;
        vertices.push(crate::curve::Vertex { id: ve, genus: 0 });
        // the edge keeps its far side and re-anchors at the new vertex
        let mut moved = e.clone();
        let direction_out;
        if moved.tail == vi {
            moved.tail = ve;
            direction_out = moved.direction.clone();
        } else {
            moved.head = Some(ve);
            direction_out = moved.direction.neg();
        }
        // a marking on a re-anchored unbounded edge survives with its
        // original condition
        if let Some(m) = c.marking_for_edge(e.id) {
            let p = c.markings.iter().position(|x| x.index == m.index).unwrap();
            markings.push((m.clone(), constraints[p].clone()));
        }
        edges.push(moved);
        // straight extension to infinity, trivial condition
        let ext = Edge {
            id: next_edge,
            tail: ve,
            head: None,
            weight: e.weight,
            direction: direction_out.neg(),
        };
        next_edge += 1;
        markings.push((
            Marking {
                index: next_marking,
                edge: ext.id,
            },
            AffineConstraint::trivial(c.rank),
        ));
        next_marking += 1;
        edges.push(ext);
        // new contracted end with a point condition
        let dot = Edge {
            id: next_edge,
            tail: ve,
            head: None,
            weight: 0,
            direction: IntVector::zero(c.rank),
        };
        next_edge += 1;
        markings.push((
            Marking {
                index: next_marking,
                edge: dot.id,
            },
            AffineConstraint::point(c.rank, None),
        ));
        next_marking += 1;
        edges.push(dot);
    }

    // separate connected components
    let mut pieces = Vec::new();
    let mut assigned: Vec<VertexId> = Vec::new();
    for seed in vertices.iter().map(|v| v.id) {
        if assigned.contains(&seed) {
            continue;
        }
        let mut comp = vec![seed];
        let mut stack = vec![seed];
        while let Some(v) = stack.pop() {
            for e in edges.iter().filter(|e| e.tail == v || e.head == Some(v)) {
                if let Some(h) = e.head {
                    let other = if e.tail == v { h } else { e.tail };
                    if !comp.contains(&other) {
                        comp.push(other);
                        stack.push(other);
                    }
                }
            }
        }
        assigned.extend(comp.iter().copied());
        let cvs: Vec<_> = vertices
            .iter()
            .filter(|v| comp.contains(&v.id))
            .cloned()
            .collect();
        let ces: Vec<_> = edges
            .iter()
            .filter(|e| comp.contains(&e.tail))
            .cloned()
            .collect();
        let mut cms = Vec::new();
        let mut ccs = Vec::new();
        for (m, a) in &markings {
            if ces.iter().any(|e| e.id == m.edge) {
                cms.push(m.clone());
                ccs.push(a.clone());
            }
        }
        let piece = TropicalCurve {
            rank: c.rank,
            vertices: cvs,
            edges: ces,
            markings: cms,
        };
        piece.check_valid()?;
        pieces.push((piece, ccs));
    }
    Ok(pieces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::mult::{constraint_weight_product, edge_weight_product, mult};
    use num_traits::Signed;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn split_shapes() {
        // a two-vertex curve splits into two one-vertex curves
        let (c, a, _) = fixtures::e2(2);
        let pieces = split_edge(&c, &a, 0).unwrap();
        assert_eq!(pieces.len(), 2);
        for p in &pieces {
            assert_eq!(p.curve.vertices.len(), 1);
            assert!(p.curve.validate().is_empty(), "{:?}", p.curve.validate());
        }
        // E1 splits into a one-vertex and a two-vertex piece at its left edge
        let (c, a, _) = fixtures::e1();
        let pieces = split_edge(&c, &a, 0).unwrap();
        assert_eq!(
            pieces.iter().map(|p| p.curve.vertices.len()).sum::<usize>(),
            3
        );
        // splitting the genus-1 curve at a cycle edge opens the loop: one
        // genus-0 curve with two new unbounded ends
        let (c, a, _) = fixtures::genus1(&[1, 1, 1, 2, 1, 3]);
        let pieces = split_edge(&c, &a, 0).unwrap();
        assert_eq!(pieces.len(), 1);
        let p = &pieces[0];
        assert!(p.curve.validate().is_empty(), "{:?}", p.curve.validate());
        assert_eq!(p.curve.genus(), 0);
        assert_eq!(p.new_markings.len(), 2);
        // the opened curve is no longer rigid for the inherited conditions
        assert!(!crate::mult::rigid(&p.curve, &p.constraints, &Default::default()).unwrap());
    }

    #[test]
    fn splitting_sum_equals_mult() {
        let (c, a, _) = fixtures::e1();
        let m = mult(&c, &a).unwrap();
        for e in c.compact_edges() {
            assert_eq!(
                splitting_sum(&c, &a, e.id, None).unwrap(),
                m,
                "edge {}",
                e.id
            );
        }
        for w in 1..=4 {
            let (c, a, _) = fixtures::e2(w);
            let m = mult(&c, &a).unwrap();
            assert_eq!(splitting_sum(&c, &a, 0, None).unwrap(), m);
            // exactly one decomposition contributes: w·(w·1)
            // (r = 2: two decompositions, one vanishing)
        }
    }

    #[test]
    fn splitting_sum_is_basis_independent() {
        use rand::{Rng, SeedableRng};
        let (c, a, _) = fixtures::e2(3);
        let m = mult(&c, &a).unwrap();
        let u = c.edge(0).direction.clone();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut tried = 0;
        while tried < 5 {
            // random unimodular completion: b + k·u stays a completion
            let base = complete_to_basis(&u).unwrap();
            let k = rng.gen_range(-3i64..=3);
            let twisted: Vec<IntVector> = base.iter().map(|b| b.add(&u.scale(&bi(k)))).collect();
            assert_eq!(splitting_sum(&c, &a, 0, Some(&twisted)).unwrap(), m);
            tried += 1;
        }
        // a non-basis is rejected
        let bad = vec![u.scale(&bi(2))];
        assert!(splitting_sum(&c, &a, 0, Some(&bad)).is_err());
    }

    #[test]
    fn vertex_and_edge_multiplicities() {
        // Mikhalkin vertex: two pinned incoming directions n1, n2 give
        // Mult(V) = |det(n1|n2)|
        let (c, a, _) = fixtures::e1();
        // center vertex 0 of the line through two points: both legs pinned
        // along their directions, third edge trivial
        let mv = vertex_mult(&c, &a, 0).unwrap();
        assert_eq!(mv, bi(1));
        // every edge multiplicity in rank 2 is 1
        for e in c.compact_edges() {
            assert_eq!(edge_mult(&c, &a, e.id).unwrap(), bi(1));
        }
        let (c, a, _) = fixtures::e2(3);
        for e in c.compact_edges() {
            assert_eq!(edge_mult(&c, &a, e.id).unwrap(), bi(1));
        }
        // the pairing-6 vertex: its lattice index is |ω(n1, n2)| = 6 and
        // every route returns 6
        let (c, a, _) = fixtures::theta_vertex6();
        assert_eq!(vertex_mult(&c, &a, 1).unwrap(), bi(6));
        assert_eq!(mult(&c, &a).unwrap(), bi(6));
        assert_eq!(crate::bracket::mult_bracket(&c, &a, 0).unwrap(), bi(6));
        // theta fixtures: the vertex/edge quotient reassembles the full
        // multiplicity (the form's index rides on the constraint weights)
        let fx = fixtures::theta(3, 2);
        let got = split_cor(&fx.curve, &fx.constraints).unwrap();
        let weights = edge_weight_product(&fx.curve) * constraint_weight_product(&fx.constraints);
        assert_eq!(got * weights, fx.expected_mult);
    }

    #[test]
    fn split_cor_equals_dfrak() {
        let (c, a, _) = fixtures::e1();
        assert_eq!(
            split_cor(&c, &a).unwrap(),
            crate::mult::dfrak(&c, &a).unwrap()
        );
        for w in 1..=4 {
            let (c, a, _) = fixtures::e2(w);
            assert_eq!(
                split_cor(&c, &a).unwrap(),
                crate::mult::dfrak(&c, &a).unwrap()
            );
            let total = split_cor(&c, &a).unwrap()
                * edge_weight_product(&c)
                * constraint_weight_product(&a);
            assert_eq!(total, mult(&c, &a).unwrap());
        }
    }

    #[test]
    fn mikhalkin_product_on_planar_trivalent_fixtures() {
        // multiplicity = product over unmarked trivalent vertices of
        // |det(n1, n2)| of the weighted directions
        for (c, a) in [fixtures::conic_through_5_points(), fixtures::mult3_tripod()] {
            let m = mult(&c, &a).unwrap();
            let mut prod = bi(1);
            for v in &c.vertices {
                let edges = c.edges_at(v.id);
                if edges.iter().any(|e| e.is_contracted()) {
                    continue;
                }
                assert_eq!(edges.len(), 3);
                let n1 = c
                    .direction_from(v.id, edges[0])
                    .scale(&BigInt::from(edges[0].weight));
                let n2 = c
                    .direction_from(v.id, edges[1])
                    .scale(&BigInt::from(edges[1].weight));
                let det = &n1.coords[0] * &n2.coords[1] - &n1.coords[1] * &n2.coords[0];
                prod *= det.abs();
            }
            assert_eq!(m, prod);
        }
    }

    #[test]
    fn point_split_preserves_multiplicity() {
        use num_traits::Signed;
        // tripod pinned at its vertex through a contracted end
        let (c, a, _) = fixtures::pinned_tripod();
        let m = mult(&c, &a).unwrap();
        let idx = c
            .markings
            .iter()
            .zip(&a)
            .find(|(mk, con)| con.is_point() && c.edge(mk.edge).is_contracted())
            .unwrap()
            .0
            .index;
        let pieces = point_split(&c, &a, idx).unwrap();
        assert_eq!(pieces.len(), 3, "three one-vertex pieces");
        let mut prod = bi(1);
        for (pc, pa) in &pieces {
            prod *= mult(pc, pa).unwrap();
        }
        assert_eq!(prod, m);

        // conic through five points: split at each point condition
        let (c, a) = fixtures::conic_through_5_points();
        let m = mult(&c, &a).unwrap();
        for (mk, con) in c.markings.iter().zip(&a) {
            if !con.is_point() {
                continue;
            }
            let pieces = point_split(&c, &a, mk.index).unwrap();
            let mut prod = bi(1);
            for (pc, pa) in &pieces {
                prod *= mult(pc, pa).unwrap();
            }
            assert_eq!(prod, m, "marking {}", mk.index);
        }

        // a genus-1 curve with a point condition: still preserved
        let (c, a) = fixtures::genus1_with_point(&[1, 2]);
        let m = mult(&c, &a).unwrap();
        assert!(m.abs() > bi(0));
        let idx = c
            .markings
            .iter()
            .zip(&a)
            .find(|(mk, con)| con.is_point() && c.edge(mk.edge).is_contracted())
            .unwrap()
            .0
            .index;
        let pieces = point_split(&c, &a, idx).unwrap();
        let mut prod = bi(1);
        for (pc, pa) in &pieces {
            prod *= mult(pc, pa).unwrap();
        }
        assert_eq!(prod, m);
    }
}

//! Genus-0 multiplicity by flow propagation of polyvector monomials.
//!
//! Each unbounded end i carries ζ = z^{Δ(i)}⊗α_{A_i}; at every vertex the
//! incoming monomials combine through the k-bracket (product, then
//! contraction by the total exponent); the sink pairs the plain product of
//! its incoming monomials against a primitive top form. Every intermediate
//! ζ_E is a monomial in the kernel of ℓ₁ whose exponent is the weighted edge
//! direction pointing against the flow.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Signed;

use crate::constraints::{check_constraints, AffineConstraint};
use crate::curve::{EdgeId, PsiVector, TropicalCurve, VertexId};
use crate::exterior::Multivector;
use crate::lattice::{kernel_basis, IntMatrix, IntVector, Sublattice};
use crate::polyvector::{ell_k, multiply, PolyvectorField};
use crate::{Error, Result};

fn genus0_check(c: &TropicalCurve) -> Result<()> {
    if c.betti() != 0 || c.vertices.iter().any(|v| v.genus > 0) {
        return Err(Error::Precondition(
            "bracket propagation needs genus 0 (b₁ = 0 and no vertex genus)".into(),
        ));
    }
    Ok(())
}

/// ζ values on a vertex subset, flowing toward `root`, skipping
/// `exclude_edge`. Covers both whole-curve propagation (root = sink, no
/// exclusion) and one split component (root = the attachment vertex).
fn propagate_in(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    members: &[VertexId],
    root: VertexId,
    exclude_edge: Option<EdgeId>,
) -> Result<BTreeMap<EdgeId, PolyvectorField>> {
    propagate_in_with(c, constraints, members, root, exclude_edge, ell_k)
}

fn propagate_in_with(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    members: &[VertexId],
    root: VertexId,
    exclude_edge: Option<EdgeId>,
    bracket: fn(&[PolyvectorField]) -> PolyvectorField,
) -> Result<BTreeMap<EdgeId, PolyvectorField>> {
    let in_scope = |e: &crate::curve::Edge| {
        Some(e.id) != exclude_edge
            && members.contains(&e.tail)
            && e.head.map(|h| members.contains(&h)).unwrap_or(true)
    };
    // order member vertices by decreasing tree depth from the root
    let mut depth: BTreeMap<VertexId, usize> = BTreeMap::new();
    depth.insert(root, 0);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut parent: BTreeMap<VertexId, EdgeId> = BTreeMap::new();
    while let Some(v) = queue.pop_front() {
        let mut adj: Vec<&crate::curve::Edge> = c
            .edges_at(v)
            .into_iter()
            .filter(|e| e.is_compact() && in_scope(e))
            .collect();
        adj.sort_by_key(|e| e.id);
        for e in adj {
            let other = if e.tail == v { e.head.unwrap() } else { e.tail };
            if !depth.contains_key(&other) {
                depth.insert(other, depth[&v] + 1);
                parent.insert(other, e.id);
                queue.push_back(other);
            }
        }
    }
    let mut order: Vec<VertexId> = depth.keys().copied().collect();
    order.sort_by_key(|v| std::cmp::Reverse(depth[v]));

    let mut zeta: BTreeMap<EdgeId, PolyvectorField> = BTreeMap::new();
    // unbounded ends start from their constraints
    for (m, a) in c.markings.iter().zip(constraints) {
        let e = c.edge(m.edge);
        if !in_scope(e) {
            continue;
        }
        let alpha = a.alpha()?;
        zeta.insert(
            e.id,
            PolyvectorField::monomial(e.weighted_direction(), alpha),
        );
    }
    for &v in &order {
        if v == root {
            continue;
        }
        let out_edge = parent[&v];
        let mut incoming: Vec<&crate::curve::Edge> = c
            .edges_at(v)
            .into_iter()
            .filter(|e| e.id != out_edge && in_scope(e))
            .collect();
        incoming.sort_by_key(|e| e.id);
        if incoming.is_empty() {
            return Err(Error::Precondition(format!(
                "vertex {} has nothing flowing in (univalent in the flow)",
                v
            )));
        }
        let args: Vec<PolyvectorField> = incoming
            .iter()
            .map(|e| {
                zeta.get(&e.id)
                    .cloned()
                    .ok_or_else(|| Error::Invariant(format!("edge {} not yet propagated", e.id)))
            })
            .collect::<Result<_>>()?;
        let out = bracket(&args);
        if out.is_zero() {
            return Err(Error::Precondition(format!(
                "propagated value vanished at vertex {} (non-rigid or degenerate constraints)",
                v
            )));
        }
        zeta.insert(out_edge, out);
    }
    Ok(zeta)
}

/// ζ_E for every edge, flowing toward `sink`. Needs a valid rigid genus-0
/// curve.
pub fn propagate(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    sink: VertexId,
) -> Result<BTreeMap<EdgeId, PolyvectorField>> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    genus0_check(c)?;
    if !c.has_vertex(sink) {
        return Err(Error::Precondition(format!("unknown sink vertex {}", sink)));
    }
    if c.compact_edges().any(|e| e.is_contracted()) {
        return Err(Error::Precondition(
            "contract compact weight-0 edges first".into(),
        ));
    }
    let members: Vec<VertexId> = c.vertices.iter().map(|v| v.id).collect();
    propagate_in(c, constraints, &members, sink, None)
}

/// Like [`propagate`] but through the sign-modified brackets; the
/// intermediate signs differ, the final absolute pairing does not.
pub fn propagate_sign_modified(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    sink: VertexId,
) -> Result<BTreeMap<EdgeId, PolyvectorField>> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    genus0_check(c)?;
    if c.compact_edges().any(|e| e.is_contracted()) {
        return Err(Error::Precondition(
            "contract compact weight-0 edges first".into(),
        ));
    }
    let members: Vec<VertexId> = c.vertices.iter().map(|v| v.id).collect();
    propagate_in_with(c, constraints, &members, sink, None, crate::polyvector::l_k)
}

/// |⟨Ω, Π_{E∋sink} ζ_E⟩| — the multiplicity. The sink product must land in
/// z⁰⊗Λ^top M; anything else is an invariant violation.
pub fn mult_bracket(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    sink: VertexId,
) -> Result<BigInt> {
    if !crate::mult::rigid(c, constraints, &PsiVector::empty())? {
        return Err(Error::Precondition("curve is not rigid".into()));
    }
    let zeta = propagate(c, constraints, sink)?;
    sink_pairing(c, sink, &zeta)
}

/// Pair the product of the ζ values incident to the sink against a
/// primitive top form.
pub fn sink_pairing(
    c: &TropicalCurve,
    sink: VertexId,
    zeta: &BTreeMap<EdgeId, PolyvectorField>,
) -> Result<BigInt> {
    let mut incoming: Vec<&crate::curve::Edge> = c.edges_at(sink);
    incoming.sort_by_key(|e| e.id);
    let mut prod: Option<PolyvectorField> = None;
    for e in incoming {
        let z = zeta
            .get(&e.id)
            .ok_or_else(|| Error::Invariant(format!("edge {} missing at sink", e.id)))?;
        prod = Some(match prod {
            None => z.clone(),
            Some(p) => multiply(&p, z),
        });
    }
    let prod = prod.ok_or_else(|| Error::Precondition("sink has no incident edges".into()))?;
    // must be z⁰ ⊗ (top degree)
    let r = c.rank;
    let top: u32 = ((1u64 << r) - 1) as u32;
    let mut result = BigInt::from(0);
    for (n, alpha) in prod.terms() {
        if !n.is_zero() {
            return Err(Error::Invariant(format!(
                "sink product has exponent {:?} ≠ 0",
                n.coords
            )));
        }
        if alpha.degree() != Some(r) {
            return Err(Error::Invariant(format!(
                "sink product has degree {:?}, expected top = {}",
                alpha.degree(),
                r
            )));
        }
        result = alpha.coefficient(top).abs();
    }
    if prod.is_zero() {
        return Err(Error::Invariant(
            "sink product vanished on a rigid curve".into(),
        ));
    }
    Ok(result)
}

/// Annihilator {v ∈ N : ι_v α = 0} of the form part of a monomial, as a
/// saturated sublattice.
pub fn form_annihilator(alpha: &Multivector) -> Sublattice {
    let r = alpha.rank();
    // rows: one per blade of degree d−1 appearing in some ι_{e_i}α;
    // columns: the contraction coefficients per basis vector
    let contractions: Vec<Multivector> = (0..r)
        .map(|i| crate::exterior::contract_vector(&IntVector::unit(r, i), alpha))
        .collect();
    let mut blades: Vec<u32> = Vec::new();
    for m in &contractions {
        for (&b, _) in m.terms() {
            if !blades.contains(&b) {
                blades.push(b);
            }
        }
    }
    blades.sort();
    let mut mat = IntMatrix::zero(blades.len(), r);
    for (row, &b) in blades.iter().enumerate() {
        for (col, m) in contractions.iter().enumerate() {
            *mat.at_mut(row, col) = m.coefficient(b);
        }
    }
    Sublattice::new(r, kernel_basis(&mat))
}

/// The lattice of translations swept by `edge` when the component on the
/// `side` endpoint is allowed to move: the annihilator of the propagated
/// form, which always contains the edge direction.
pub fn w_subspace(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    edge: EdgeId,
    side: VertexId,
) -> Result<Sublattice> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    genus0_check(c)?;
    let e = c.edge(edge).clone();
    if e.tail != side && e.head != Some(side) {
        return Err(Error::Precondition(format!(
            "vertex {} is not an endpoint of edge {}",
            side, edge
        )));
    }
    // component of Γ∖edge containing `side`
    let mut members = vec![side];
    let mut stack = vec![side];
    while let Some(v) = stack.pop() {
        for f in c.edges_at(v) {
            if f.id == edge || !f.is_compact() {
                continue;
            }
            let other = if f.tail == v { f.head.unwrap() } else { f.tail };
            if !members.contains(&other) {
                members.push(other);
                stack.push(other);
            }
        }
    }
    let zeta = propagate_in(c, constraints, &members, side, Some(edge))?;
    // ζ for the split edge: bracket of everything arriving at `side`
    let mut incoming: Vec<&crate::curve::Edge> = c
        .edges_at(side)
        .into_iter()
        .filter(|f| f.id != edge)
        .collect();
    incoming.sort_by_key(|f| f.id);
    if incoming.is_empty() {
        return Err(Error::Precondition(format!(
            "component at vertex {} has no other edges to propagate",
            side
        )));
    }
    let args: Vec<PolyvectorField> = incoming
        .iter()
        .map(|f| {
            zeta.get(&f.id)
                .cloned()
                .ok_or_else(|| Error::Invariant(format!("edge {} not propagated", f.id)))
        })
        .collect::<Result<_>>()?;
    let out = ell_k(&args);
    if out.is_zero() {
        return Err(Error::Precondition(format!(
            "propagation toward edge {} vanished",
            edge
        )));
    }
    let (_, alpha) = out
        .terms()
        .next()
        .map(|(n, a)| (n.clone(), a.clone()))
        .expect("nonzero monomial");
    if out.num_terms() != 1 {
        return Err(Error::Invariant("propagated ζ is not a monomial".into()));
    }
    Ok(form_annihilator(&alpha))
}

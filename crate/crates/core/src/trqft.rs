//! Evaluation of the multiplicity field theory over a tropical flow.
//!
//! The state space attached to a weighted direction n is the doubled
//! exterior algebra of n^⊥; the theory assigns boxed constraint forms to
//! marked ends, the coproduct of 1 to edge midpoints, wedge products to
//! vertices, and a primitive-blade contraction to every traversal of an
//! edge of nonzero direction. Each compact edge contributes one global
//! scalar w(E)², matching the diagonal-class normalization; the total is the
//! squared multiplicity.
//!
//! All evaluation happens in a small symmetric-monoidal interpreter
//! (`SlotExpr`): an ordered list of parity-homogeneous tensor slots with an
//! explicit sign, where moving slots past each other pays the Koszul sign.
//! That makes the term-by-term sums independent of processing order by
//! construction.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::constraints::{check_constraints, AffineConstraint};
use crate::curve::{EdgeId, PsiVector, TropicalCurve, VertexId};
use crate::exterior::{
    box_map, contract, doubled_vector_blade, merge_sign, to_first_copy, to_second_copy, trace,
    unbox, wedge, Multivector,
};
use crate::lattice::{annihilator, IntVector, Sublattice};
use crate::{Error, Result};

/// An element of the state space of a weighted direction: a doubled-algebra
/// value that the direction's doubled blade annihilates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrobeniusElement {
    /// Weighted direction n (up to sign); zero for the base space.
    pub direction: IntVector,
    /// Value in Λ*(M⊕M), in doubled ambient coordinates.
    pub value: Multivector,
}

impl FrobeniusElement {
    pub fn at_zero(rank: usize, value: Multivector) -> Self {
        FrobeniusElement {
            direction: IntVector::zero(rank),
            value,
        }
    }

    /// Membership in the direction's subalgebra: both single-copy
    /// contractions by n kill the value.
    pub fn check_membership(&self) -> bool {
        if self.direction.is_zero() {
            return true;
        }
        let first = to_first_copy(&Multivector::from_vector(&self.direction));
        let second = to_second_copy(&Multivector::from_vector(&self.direction));
        contract(&first, &self.value).is_zero() && contract(&second, &self.value).is_zero()
    }
}

/// κ_n^∨: contraction by the primitive doubled blade of n, mapping the base
/// space onto the state space of n. The |n|² scalars of the inclusions are
/// not applied here; each compact edge contributes w(E)² once, globally.
pub fn kappa_vee(n: &IntVector, a: &FrobeniusElement) -> Result<FrobeniusElement> {
    if !a.direction.is_zero() {
        return Err(Error::Precondition(
            "kappa_vee expects an element at direction 0".into(),
        ));
    }
    if n.is_zero() {
        return Err(Error::Precondition(
            "kappa_vee needs n ≠ 0 (identity at 0)".into(),
        ));
    }
    let (u, _) = n.primitive_part();
    let value = contract(&doubled_vector_blade(&u), &a.value);
    Ok(FrobeniusElement {
        direction: n.clone(),
        value,
    })
}

/// Trace of the state space at n: the coefficient against Θ_n^□
/// (= box of a primitive top form of n^⊥). Errors when the argument's top
/// part is not proportional to Θ_n^□.
pub fn trace_at(n: &IntVector, v: &Multivector) -> Result<BigInt> {
    let r = v.rank() / 2;
    if n.is_zero() {
        return trace(v);
    }
    let perp = annihilator(&Sublattice::new(r, vec![n.clone()]));
    let mut top = Multivector::one(r);
    for row in perp.basis() {
        top = wedge(&top, &Multivector::from_vector(&row));
    }
    let theta_n = box_map(&top)?;
    let top_deg = 2 * (r - 1);
    // isolate the top-degree part of v
    let mut vtop = Multivector::zero(2 * r);
    for (&b, c) in v.terms() {
        if b.count_ones() as usize == top_deg {
            vtop.add_term(b, c.clone());
        }
    }
    let (&b0, c0) = theta_n
        .terms()
        .next()
        .ok_or_else(|| Error::Invariant("Θ_n^□ vanished".into()))?;
    let t = vtop.coefficient(b0) / c0;
    if vtop != theta_n.scale(&t) {
        return Err(Error::Precondition(
            "trace_at: top part is not a multiple of Θ_n^□ (element outside the subalgebra)".into(),
        ));
    }
    Ok(t)
}

/// Ordered tensor of parity-homogeneous slots with an explicit global sign.
/// Swapping adjacent slots multiplies the sign by (−1)^{deg·deg}; wedge,
/// even operators, and traces act in place.
struct SlotExpr {
    slots: Vec<(u64, Multivector)>,
    sign: i8,
}

impl SlotExpr {
    fn new() -> Self {
        SlotExpr {
            slots: Vec::new(),
            sign: 1,
        }
    }

    fn push(&mut self, key: u64, v: Multivector) {
        debug_assert!(v.parity().is_some() || v.is_zero());
        self.slots.push((key, v));
    }

    fn pos(&self, key: u64) -> usize {
        self.slots
            .iter()
            .position(|(k, _)| *k == key)
            .expect("unknown slot")
    }

    fn parity(&self, pos: usize) -> u8 {
        self.slots[pos].1.parity().unwrap_or(0)
    }

    /// Wedge the slots with the given keys, in the given order, into one
    /// slot (keyed by the first); braiding signs are paid while gathering.
    fn wedge_group(&mut self, keys: &[u64]) -> u64 {
        let first = keys[0];
        for &k in &keys[1..] {
            let dst = self.pos(first);
            let mut src = self.pos(k);
            // move src to sit immediately after dst
            while src > dst + 1 {
                let p1 = self.parity(src - 1);
                let p2 = self.parity(src);
                if p1 & p2 == 1 {
                    self.sign = -self.sign;
                }
                self.slots.swap(src - 1, src);
                src -= 1;
            }
            while src < dst {
                // src sits left of dst: move it rightward to dst's position
                let p1 = self.parity(src);
                let p2 = self.parity(src + 1);
                if p1 & p2 == 1 {
                    self.sign = -self.sign;
                }
                self.slots.swap(src, src + 1);
                src += 1;
            }
            let dst = self.pos(first);
            let merged = wedge(&self.slots[dst].1, &self.slots[dst + 1].1);
            self.slots[dst].1 = merged;
            self.slots.remove(dst + 1);
        }
        first
    }

    /// Apply an even-parity operator to one slot.
    fn apply<F: FnOnce(&Multivector) -> Multivector>(&mut self, key: u64, f: F) {
        let p = self.pos(key);
        let out = f(&self.slots[p].1);
        debug_assert!(out.parity().is_some() || out.is_zero());
        self.slots[p].1 = out;
    }

    fn is_dead(&self) -> bool {
        self.slots.iter().any(|(_, v)| v.is_zero())
    }

    /// Trace out one slot (the coefficient of Θ^□ in it); the slot leaves
    /// the tensor as a scalar factor.
    fn trace_remove(&mut self, key: u64) -> Result<BigInt> {
        let p = self.pos(key);
        let t = trace(&self.slots[p].1)?;
        self.slots.remove(p);
        Ok(t)
    }
}

/// Superabundance guards shared by the evaluators: the theorem needs no
/// contracted loops and no higher-genus vertices.
fn check_trqft_preconditions(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<()> {
    c.check_valid()?;
    check_constraints(c, constraints)?;
    if c.vertices.iter().any(|v| v.genus > 0) {
        return Err(Error::Precondition(
            "field-theory evaluation needs genus-0 vertices (no higher-genus vertices)".into(),
        ));
    }
    if c.compact_edges().any(|e| e.is_contracted()) {
        return Err(Error::Precondition(
            "compact weight-0 edge present (contracted loop/edge); contract first".into(),
        ));
    }
    if !crate::mult::rigid(c, constraints, &PsiVector::empty())? {
        return Err(Error::Precondition("curve is not rigid".into()));
    }
    Ok(())
}

/// Terms of the coproduct of 1 along a primitive direction u, expressed in
/// the full doubled ambient: (sign, x, y) with x⊗y ranging over pairs of
/// complementary sub-blades of the doubled basis of u^⊥.
fn coproduct_one_along(rank: usize, u: &IntVector) -> Vec<(i8, Multivector, Multivector)> {
    let perp = annihilator(&Sublattice::new(rank, vec![u.clone()]));
    let basis = perp.basis();
    let k = 2 * basis.len();
    // interleaved doubled generators of u^⊥ inside Λ*(M⊕M)
    let mut gens: Vec<Multivector> = Vec::new();
    for b in &basis {
        gens.push(to_first_copy(&Multivector::from_vector(b)));
        gens.push(to_second_copy(&Multivector::from_vector(b)));
    }
    let mut terms = Vec::new();
    for i1 in 0..(1u32 << k) {
        let i2 = !i1 & ((1u32 << k) - 1);
        let sign = merge_sign(i2, i1);
        let build = |mask: u32| -> Multivector {
            let mut m = Multivector::one(2 * rank);
            for j in 0..k {
                if mask & (1 << j) != 0 {
                    m = wedge(&m, &gens[j]);
                }
            }
            m
        };
        terms.push((sign, build(i1), build(i2)));
    }
    terms
}

fn boxed_constraints(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
) -> Result<Vec<(VertexId, u32, Multivector)>> {
    let mut out = Vec::new();
    for (m, a) in c.markings.iter().zip(constraints) {
        let alpha = a.alpha()?;
        let boxed = box_map(&alpha)?;
        out.push((c.edge(m.edge).tail, m.index, boxed));
    }
    Ok(out)
}

/// Midpoint-flow evaluation: every compact edge is split at its midpoint
/// into coproduct terms, every vertex takes the trace of its incoming
/// wedge. Returns Mult².
pub fn evaluate_midpoint(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    check_trqft_preconditions(c, constraints)?;
    let r = c.rank;
    let vpos = |v: VertexId| c.vertices.iter().position(|x| x.id == v).unwrap();

    let edges: Vec<&crate::curve::Edge> = {
        let mut e: Vec<_> = c.compact_edges().collect();
        e.sort_by_key(|e| e.id);
        e
    };
    let per_edge_terms: Vec<Vec<(i8, Multivector, Multivector)>> = edges
        .iter()
        .map(|e| coproduct_one_along(r, &e.direction))
        .collect();

    // boxed constraint forms, wedged per vertex up front (all even)
    let mut alpha_at: Vec<Multivector> = vec![Multivector::one(2 * r); c.vertices.len()];
    for (v, _idx, boxed) in boxed_constraints(c, constraints)? {
        let p = vpos(v);
        alpha_at[p] = wedge(&alpha_at[p], &boxed);
    }

    // vertices complete once their highest-id incident compact edge is
    // placed; vertices with no compact edges are constant factors
    let mut completes_after: Vec<Vec<usize>> = vec![Vec::new(); edges.len()];
    let mut base = BigInt::one();
    for (p, v) in c.vertices.iter().enumerate() {
        let last = edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.tail == v.id || e.head == Some(v.id))
            .map(|(k, _)| k)
            .max();
        match last {
            Some(k) => completes_after[k].push(p),
            None => base *= trace(&alpha_at[p])?,
        }
    }
    if base.is_zero() {
        return Ok(BigInt::zero());
    }

    // depth-first enumeration over edge terms with sign tracked
    // incrementally: slots arrive in (edge id; x then y) order, and the
    // regrouping inversion count only involves odd slots at later vertices
    let edge_ends: Vec<(usize, usize)> = edges
        .iter()
        .map(|e| (vpos(e.tail), vpos(e.head.unwrap())))
        .collect();
    struct Dfs<'a> {
        edge_ends: &'a [(usize, usize)],
        terms: &'a [Vec<(i8, Multivector, Multivector)>],
        alpha_at: &'a [Multivector],
        completes_after: &'a [Vec<usize>],
        total: BigInt,
    }
    impl<'a> Dfs<'a> {
        fn run(
            &mut self,
            k: usize,
            acc: &mut Vec<Multivector>,
            odd_count: &mut Vec<u32>,
            sign: i8,
            product: &BigInt,
        ) -> Result<()> {
            if k == self.edge_ends.len() {
                self.total += BigInt::from(sign) * product;
                return Ok(());
            }
            let (pt, ph) = self.edge_ends[k];
            for (tsign, x, y) in &self.terms[k] {
                let mut sign_here = sign * *tsign;
                // place x at the tail vertex, then y at the head vertex;
                // each odd arrival pays an inversion against odd slots
                // already sitting at strictly later vertices
                let px = x.parity().unwrap_or(0);
                let py = y.parity().unwrap_or(0);
                if px == 1 {
                    let inv: u32 = odd_count[pt + 1..].iter().sum();
                    if inv % 2 == 1 {
                        sign_here = -sign_here;
                    }
                }
                if py == 1 {
                    let inv: u32 =
                        odd_count[ph + 1..].iter().sum::<u32>() + u32::from(px == 1 && pt > ph);
                    if inv % 2 == 1 {
                        sign_here = -sign_here;
                    }
                }
                let keep_t = acc[pt].clone();
                let keep_h = acc[ph].clone();
                let with_x = wedge(&acc[pt], x);
                if with_x.is_zero() {
                    continue;
                }
                acc[pt] = with_x;
                let with_y = wedge(&acc[ph], y);
                acc[ph] = with_y;
                odd_count[pt] += u32::from(px == 1);
                odd_count[ph] += u32::from(py == 1);

                if !acc[ph].is_zero() {
                    // complete vertices whose last edge is k
                    let mut product_here = product.clone();
                    let mut dead = false;
                    for &p in &self.completes_after[k] {
                        let full = wedge(&acc[p], &self.alpha_at[p]);
                        let t = trace(&full)?;
                        if t.is_zero() {
                            dead = true;
                            break;
                        }
                        product_here *= t;
                    }
                    if !dead {
                        self.run(k + 1, acc, odd_count, sign_here, &product_here)?;
                    }
                }

                acc[ph] = keep_h;
                acc[pt] = keep_t;
                odd_count[pt] -= u32::from(px == 1);
                odd_count[ph] -= u32::from(py == 1);
            }
            Ok(())
        }
    }

    let mut dfs = Dfs {
        edge_ends: &edge_ends,
        terms: &per_edge_terms,
        alpha_at: &alpha_at,
        completes_after: &completes_after,
        total: BigInt::zero(),
    };
    let mut acc = vec![Multivector::one(2 * r); c.vertices.len()];
    let mut odd = vec![0u32; c.vertices.len()];
    dfs.run(0, &mut acc, &mut odd, 1, &base)?;

    let mut scale = BigInt::one();
    for e in &edges {
        scale *= BigInt::from(e.weight) * BigInt::from(e.weight);
    }
    let result = dfs.total * scale;
    if result.is_negative() {
        return Err(Error::Invariant(format!(
            "squared multiplicity came out negative: {}",
            result
        )));
    }
    Ok(result)
}

/// Tree-flow evaluation toward a single sink: only the compact edges
/// outside a breadth-first spanning tree are split; tree edges propagate by
/// primitive-blade contraction. Equals the midpoint evaluation.
pub fn evaluate_tree(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    sink: VertexId,
) -> Result<BigInt> {
    Ok(evaluate_tree_terms(c, constraints, sink)?.into_iter().sum())
}

/// The per-assignment contributions of the tree evaluation, in enumeration
/// order (split edges by id, coproduct terms in blade order); their sum is
/// Mult² and the breakdown is stable for golden tests.
pub fn evaluate_tree_terms(
    c: &TropicalCurve,
    constraints: &[AffineConstraint],
    sink: VertexId,
) -> Result<Vec<BigInt>> {
    check_trqft_preconditions(c, constraints)?;
    if !c.has_vertex(sink) {
        return Err(Error::Precondition(format!("unknown sink vertex {}", sink)));
    }
    let r = c.rank;

    // spanning tree toward the sink; the rest splits
    let parents = crate::curve::tree_parents(c, sink)?;
    let tree_edges: Vec<EdgeId> = parents.values().copied().collect();
    let mut split_edges: Vec<&crate::curve::Edge> = c
        .compact_edges()
        .filter(|e| !tree_edges.contains(&e.id))
        .collect();
    split_edges.sort_by_key(|e| e.id);
    let split_terms: Vec<Vec<(i8, Multivector, Multivector)>> = split_edges
        .iter()
        .map(|e| coproduct_one_along(r, &e.direction))
        .collect();

    // vertex processing order: deepest first
    let mut depth: std::collections::BTreeMap<VertexId, usize> = Default::default();
    depth.insert(sink, 0);
    let mut queue = std::collections::VecDeque::from([sink]);
    while let Some(v) = queue.pop_front() {
        for e in c.edges_at(v) {
            if !e.is_compact() || !tree_edges.contains(&e.id) {
                continue;
            }
            let other = if e.tail == v { e.head.unwrap() } else { e.tail };
            if !depth.contains_key(&other) && parents.get(&other) == Some(&e.id) {
                depth.insert(other, depth[&v] + 1);
                queue.push_back(other);
            }
        }
    }
    let mut order: Vec<VertexId> = depth.keys().copied().collect();
    order.sort_by_key(|v| (std::cmp::Reverse(depth[v]), *v));

    let boxed = boxed_constraints(c, constraints)?;

    let mut scale = BigInt::one();
    for e in c.compact_edges() {
        scale *= BigInt::from(e.weight) * BigInt::from(e.weight);
    }

    // slot keys: split edges use 2k (x) and 2k+1 (y); markings 1000+index;
    // propagated tree-edge values keep the key of their group head
    let mut out_terms = Vec::new();
    let mut assignment = vec![0usize; split_edges.len()];
    'assignments: loop {
        let mut expr = SlotExpr::new();
        // where each pending value sits: edge id → slot key
        let mut slot_of_edge: std::collections::BTreeMap<EdgeId, u64> = Default::default();
        for k in 0..split_edges.len() {
            let (s, x, y) = &split_terms[k][assignment[k]];
            if *s < 0 {
                expr.sign = -expr.sign;
            }
            // x flows into the tail, y into the head
            expr.push((2 * k) as u64, x.clone());
            expr.push((2 * k + 1) as u64, y.clone());
        }
        let mut marking_slots: std::collections::BTreeMap<VertexId, Vec<u64>> = Default::default();
        for (v, idx, b) in &boxed {
            let key = 1000 + *idx as u64;
            expr.push(key, b.clone());
            marking_slots.entry(*v).or_default().push(key);
        }

        let mut dead = false;
        for &v in &order {
            // gather incoming slots at v: split halves, propagated children,
            // then boxed constraints, each in id order
            let mut keys: Vec<u64> = Vec::new();
            for (k, e) in split_edges.iter().enumerate() {
                if e.tail == v {
                    keys.push((2 * k) as u64);
                }
                if e.head == Some(v) {
                    keys.push((2 * k + 1) as u64);
                }
            }
            let mut child_keys: Vec<(EdgeId, u64)> = Vec::new();
            for e in c.edges_at(v) {
                if e.is_compact() && tree_edges.contains(&e.id) && parents.get(&v) != Some(&e.id) {
                    if let Some(&sk) = slot_of_edge.get(&e.id) {
                        child_keys.push((e.id, sk));
                    }
                }
            }
            child_keys.sort_by_key(|(id, _)| *id);
            keys.extend(child_keys.into_iter().map(|(_, k)| k));
            keys.extend(marking_slots.get(&v).cloned().unwrap_or_default());

            if v == sink {
                if keys.is_empty() {
                    return Err(Error::Precondition("sink has nothing flowing in".into()));
                }
                let head = expr.wedge_group(&keys);
                if expr.is_dead() {
                    dead = true;
                    break;
                }
                let t = expr.trace_remove(head)?;
                if !expr.slots.is_empty() {
                    return Err(Error::Invariant(
                        "slots left over after the sink trace".into(),
                    ));
                }
                out_terms.push(BigInt::from(expr.sign) * t * &scale);
            } else {
                let out_edge = c.edge(parents[&v]);
                if keys.is_empty() {
                    return Err(Error::Precondition(format!(
                        "vertex {} has nothing flowing in",
                        v
                    )));
                }
                let head = expr.wedge_group(&keys);
                let u = out_edge.direction.clone();
                expr.apply(head, |m| contract(&doubled_vector_blade(&u), m));
                if expr.is_dead() {
                    dead = true;
                    break;
                }
                slot_of_edge.insert(out_edge.id, head);
            }
        }
        if dead {
            out_terms.push(BigInt::zero());
        }

        // next assignment
        for k in 0..assignment.len() {
            assignment[k] += 1;
            if assignment[k] < split_terms[k].len() {
                continue 'assignments;
            }
            assignment[k] = 0;
        }
        break;
    }
    Ok(out_terms)
}

/// Exact square root of the midpoint evaluation; a non-square value means a
/// broken evaluator, not a property of the curve.
pub fn mult_trqft(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    let sq = evaluate_midpoint(c, constraints)?;
    let root = sq.sqrt();
    if &root * &root != sq {
        return Err(Error::Invariant(format!(
            "field-theory value {} is not a perfect square",
            sq
        )));
    }
    Ok(root)
}

/// Genus-0 evaluation inside the subalgebra of boxed simple forms: a
/// single-sink tree pass where every intermediate is checked to be ± the
/// box of a simple element. Returns Mult².
pub fn evaluate_box(c: &TropicalCurve, constraints: &[AffineConstraint]) -> Result<BigInt> {
    check_trqft_preconditions(c, constraints)?;
    if c.betti() != 0 {
        return Err(Error::Precondition(
            "box-subalgebra evaluation needs genus 0".into(),
        ));
    }
    let sink = c.vertices[0].id;
    let parents = crate::curve::tree_parents(c, sink)?;
    let mut depth: std::collections::BTreeMap<VertexId, usize> = Default::default();
    depth.insert(sink, 0);
    let mut queue = std::collections::VecDeque::from([sink]);
    while let Some(v) = queue.pop_front() {
        for e in c.edges_at(v) {
            if !e.is_compact() {
                continue;
            }
            let other = if e.tail == v { e.head.unwrap() } else { e.tail };
            if !depth.contains_key(&other) {
                depth.insert(other, depth[&v] + 1);
                queue.push_back(other);
            }
        }
    }
    let mut order: Vec<VertexId> = depth.keys().copied().collect();
    order.sort_by_key(|v| (std::cmp::Reverse(depth[v]), *v));

    let boxed = boxed_constraints(c, constraints)?;
    let mut pending: std::collections::BTreeMap<EdgeId, Multivector> = Default::default();
    let mut result = BigInt::zero();
    for &v in &order {
        let mut value = Multivector::one(2 * c.rank);
        for e in c.edges_at(v) {
            if e.is_compact() && parents.get(&v) != Some(&e.id) {
                let child = pending
                    .remove(&e.id)
                    .ok_or_else(|| Error::Invariant(format!("edge {} not yet evaluated", e.id)))?;
                value = wedge(&value, &child);
            }
        }
        for (vv, _, b) in &boxed {
            if *vv == v {
                value = wedge(&value, b);
            }
        }
        if unbox(&value).is_none() {
            return Err(Error::Invariant(format!(
                "intermediate at vertex {} left the box subalgebra",
                v
            )));
        }
        if v == sink {
            result = trace(&value)?;
        } else {
            let e = c.edge(parents[&v]);
            let out = contract(&doubled_vector_blade(&e.direction), &value);
            if unbox(&out).is_none() {
                return Err(Error::Invariant(format!(
                    "propagated value on edge {} left the box subalgebra",
                    e.id
                )));
            }
            pending.insert(e.id, out);
        }
    }
    let mut scale = BigInt::one();
    for e in c.compact_edges() {
        scale *= BigInt::from(e.weight) * BigInt::from(e.weight);
    }
    Ok(result * scale)
}

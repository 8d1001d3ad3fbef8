//! The combinatorial model of (types of) tropical curves.
//!
//! A curve is a connected weighted graph with marked unbounded ends,
//! integral primitive edge directions, and a genus function on vertices.
//! Directions are stored once per edge as (primitive vector, weight) with a
//! fixed tail→head orientation; the primitive direction u_{(V,E)} out of a
//! given endpoint is derived by sign.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::lattice::IntVector;
use crate::{rank_cap, Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: VertexId,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: VertexId,
    /// None for unbounded edges; the direction then points tail → infinity.
    pub head: Option<VertexId>,
    pub weight: u64,
    /// Primitive direction tail→head, zero iff weight is zero.
    pub direction: IntVector,
}

impl Edge {
    pub fn is_compact(&self) -> bool {
        self.head.is_some()
    }

    pub fn is_contracted(&self) -> bool {
        self.weight == 0
    }

    /// Weighted direction Δ = w(E)·u of the edge (tail → head).
    pub fn weighted_direction(&self) -> IntVector {
        self.direction.scale(&BigInt::from(self.weight))
    }
}

/// Marking: assigns an index of I to an unbounded edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub index: u32,
    pub edge: EdgeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalCurve {
    pub rank: usize,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub markings: Vec<Marking>,
}

/// ψ-conditions: s_i ≥ 0 for marked contracted ends i ∈ I°.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PsiVector {
    pub s: std::collections::BTreeMap<u32, u32>,
}

impl PsiVector {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn get(&self, marking_index: u32) -> u32 {
        self.s.get(&marking_index).copied().unwrap_or(0)
    }
}

impl TropicalCurve {
    pub fn vertex(&self, id: VertexId) -> &Vertex {
        self.vertices
            .iter()
            .find(|v| v.id == id)
            .expect("unknown vertex id")
    }

    pub fn edge(&self, id: EdgeId) -> &Edge {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .expect("unknown edge id")
    }

    pub fn has_vertex(&self, id: VertexId) -> bool {
        self.vertices.iter().any(|v| v.id == id)
    }

    pub fn edges_at(&self, v: VertexId) -> Vec<&Edge> {
        self.edges
            .iter()
            .filter(|e| e.tail == v || e.head == Some(v))
            .collect()
    }

    /// Valence counts a self-loop twice.
    pub fn valence(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| (e.tail == v) as usize + (e.head == Some(v)) as usize)
            .sum()
    }

    /// Primitive direction out of `v` along edge `e` (zero for contracted).
    pub fn direction_from(&self, v: VertexId, e: &Edge) -> IntVector {
        if e.tail == v {
            e.direction.clone()
        } else {
            debug_assert_eq!(e.head, Some(v));
            e.direction.neg()
        }
    }

    pub fn compact_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| e.is_compact())
    }

    pub fn unbounded_edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(|e| !e.is_compact())
    }

    pub fn marking_for_edge(&self, e: EdgeId) -> Option<&Marking> {
        self.markings.iter().find(|m| m.edge == e)
    }

    pub fn marked_edge(&self, index: u32) -> Option<&Edge> {
        self.markings
            .iter()
            .find(|m| m.index == index)
            .map(|m| self.edge(m.edge))
    }

    /// First Betti number of the underlying graph.
    pub fn betti(&self) -> usize {
        let comps = self.component_count();
        let compact = self.compact_edges().count();
        compact + comps - self.vertices.len()
    }

    fn component_count(&self) -> usize {
        let mut seen: Vec<VertexId> = Vec::new();
        let mut comps = 0;
        for v in &self.vertices {
            if seen.contains(&v.id) {
                continue;
            }
            comps += 1;
            let mut stack = vec![v.id];
            while let Some(x) = stack.pop() {
                if seen.contains(&x) {
                    continue;
                }
                seen.push(x);
                for e in self.edges_at(x) {
                    if let Some(h) = e.head {
                        let other = if e.tail == x { h } else { e.tail };
                        if !seen.contains(&other) {
                            stack.push(other);
                        }
                    }
                }
            }
        }
        comps
    }

    /// Genus b₁ + Σ g(V).
    pub fn genus(&self) -> usize {
        self.betti()
            + self
                .vertices
                .iter()
                .map(|v| v.genus as usize)
                .sum::<usize>()
    }

    /// Over-valence of one vertex: val(V) + 3g(V) − 3.
    pub fn overvalence_at(&self, v: VertexId) -> i64 {
        self.valence(v) as i64 + 3 * self.vertex(v).genus as i64 - 3
    }

    /// Total over-valence Σ_V (val(V) + 3g(V) − 3).
    pub fn overvalence(&self) -> i64 {
        self.vertices
            .iter()
            .map(|v| self.overvalence_at(v.id))
            .sum()
    }

    /// Expected dimension #I + (r−3)(1−g) − ov(Γ).
    pub fn expected_dimension(&self) -> i64 {
        let i = self.markings.len() as i64;
        let r = self.rank as i64;
        let g = self.genus() as i64;
        i + (r - 3) * (1 - g) - self.overvalence()
    }

    /// Every invariant violation, as human-readable diagnostics. Empty iff
    /// the curve is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut diag = Vec::new();
        if self.rank == 0 || self.rank > rank_cap() {
            diag.push(format!(
                "ambient rank {} outside 1..={}",
                self.rank,
                rank_cap()
            ));
        }
        if self.vertices.is_empty() {
            diag.push("curve has no vertices (vertex-free edges are not supported)".into());
            return diag;
        }
        // duplicate ids
        for (k, v) in self.vertices.iter().enumerate() {
            if self.vertices[..k].iter().any(|w| w.id == v.id) {
                diag.push(format!("duplicate vertex id {}", v.id));
            }
        }
        for (k, e) in self.edges.iter().enumerate() {
            if self.edges[..k].iter().any(|f| f.id == e.id) {
                diag.push(format!("duplicate edge id {}", e.id));
            }
        }
        for e in &self.edges {
            if !self.has_vertex(e.tail) {
                diag.push(format!("edge {} has unknown tail {}", e.id, e.tail));
                return diag;
            }
            if let Some(h) = e.head {
                if !self.has_vertex(h) {
                    diag.push(format!("edge {} has unknown head {}", e.id, h));
                    return diag;
                }
            }
            if e.direction.rank() != self.rank {
                diag.push(format!("edge {} direction has wrong rank", e.id));
                return diag;
            }
            let content = e.direction.content();
            if e.weight == 0 && !e.direction.is_zero() {
                diag.push(format!("edge {} has weight 0 but nonzero direction", e.id));
            }
            if e.weight > 0 && content != BigInt::one() {
                diag.push(format!(
                    "edge {} direction is not primitive (content {})",
                    e.id, content
                ));
            }
        }
        if self.component_count() > 1 {
            diag.push("curve is not connected".into());
        }
        // balancing at every vertex
        for v in &self.vertices {
            let mut sum = IntVector::zero(self.rank);
            for e in self.edges_at(v.id) {
                // a compact self-loop contributes both of its flags
                if e.tail == v.id {
                    sum = sum.add(&e.direction.scale(&BigInt::from(e.weight)));
                }
                if e.head == Some(v.id) {
                    sum = sum.add(&e.direction.scale(&-BigInt::from(e.weight)));
                }
            }
            if !sum.is_zero() {
                diag.push(format!("balancing fails at vertex {}", v.id));
            }
        }
        // univalent and bivalent vertices need positive genus
        for v in &self.vertices {
            if self.valence(v.id) <= 2 && v.genus == 0 {
                diag.push(format!(
                    "vertex {} has valence {} but genus 0",
                    v.id,
                    self.valence(v.id)
                ));
            }
        }
        // markings form a bijection onto the unbounded edges
        let unbounded: Vec<EdgeId> = self.unbounded_edges().map(|e| e.id).collect();
        for (k, m) in self.markings.iter().enumerate() {
            if self.markings[..k].iter().any(|n| n.index == m.index) {
                diag.push(format!("duplicate marking index {}", m.index));
            }
            if self.markings[..k].iter().any(|n| n.edge == m.edge) {
                diag.push(format!("edge {} marked twice", m.edge));
            }
            if !unbounded.contains(&m.edge) {
                diag.push(format!(
                    "marking {} refers to a compact or unknown edge {}",
                    m.index, m.edge
                ));
            }
        }
        if self.markings.len() != unbounded.len() {
            diag.push(format!(
                "{} unbounded edges but {} markings",
                unbounded.len(),
                self.markings.len()
            ));
        }
        diag
    }

    pub fn check_valid(&self) -> Result<()> {
        let diag = self.validate();
        if diag.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "invalid curve: {}",
                diag.join("; ")
            )))
        }
    }

    /// ψ admissibility per vertex: ov(V) ≥ Σ_{contracted marked ends at V} s_i.
    /// Returns (vertex id, satisfied, equality) triples.
    pub fn psi_check(&self, psi: &PsiVector) -> Result<Vec<(VertexId, bool, bool)>> {
        for (&idx, _) in &psi.s {
            let Some(e) = self.marked_edge(idx) else {
                return Err(Error::Precondition(format!(
                    "ψ index {} is not a marking",
                    idx
                )));
            };
            if !e.is_contracted() {
                return Err(Error::Precondition(format!(
                    "ψ index {} sits on a non-contracted end",
                    idx
                )));
            }
        }
        Ok(self
            .vertices
            .iter()
            .map(|v| {
                let total: i64 = self
                    .markings
                    .iter()
                    .filter(|m| {
                        let e = self.edge(m.edge);
                        e.is_contracted() && e.tail == v.id
                    })
                    .map(|m| psi.get(m.index) as i64)
                    .sum();
                let ov = self.overvalence_at(v.id);
                (v.id, ov >= total, ov == total)
            })
            .collect())
    }

    /// The multinomial ⟨V⟩ = ov(V)! / Π s_i!, defined when ψ holds with
    /// equality at V; 1 when no contracted marked ends touch V.
    pub fn vertex_multinomial(&self, psi: &PsiVector, v: VertexId) -> Result<BigInt> {
        let contracted: Vec<u32> = self
            .markings
            .iter()
            .filter(|m| {
                let e = self.edge(m.edge);
                e.is_contracted() && e.tail == v
            })
            .map(|m| m.index)
            .collect();
        if contracted.is_empty() {
            return Ok(BigInt::one());
        }
        let ov = self.overvalence_at(v);
        let total: i64 = contracted.iter().map(|&i| psi.get(i) as i64).sum();
        if ov != total {
            return Err(Error::Precondition(format!(
                "⟨V⟩ undefined at vertex {}: ov = {} but Σs = {}",
                v, ov, total
            )));
        }
        let fact = |n: i64| -> BigInt {
            let mut f = BigInt::one();
            for k in 2..=n {
                f *= BigInt::from(k);
            }
            f
        };
        let mut denom = BigInt::one();
        for &i in &contracted {
            denom *= fact(psi.get(i) as i64);
        }
        Ok(fact(ov) / denom)
    }

    /// Contract all compact weight-0 edges, merging endpoints (genera add)
    /// and turning contracted self-loops into genus increments.
    pub fn contract_zero_edges(&self) -> TropicalCurve {
        let mut c = self.clone();
        loop {
            let Some(eid) = c
                .edges
                .iter()
                .find(|e| e.is_compact() && e.is_contracted())
                .map(|e| e.id)
            else {
                break;
            };
            let e = c.edge(eid).clone();
            let head = e.head.unwrap();
            c.edges.retain(|f| f.id != eid);
            if head == e.tail {
                // self-adjacent: drop the loop, bump the genus
                c.vertices
                    .iter_mut()
                    .find(|v| v.id == e.tail)
                    .unwrap()
                    .genus += 1;
            } else {
                let extra_genus = c.vertex(head).genus;
                c.vertices.retain(|v| v.id != head);
                c.vertices
                    .iter_mut()
                    .find(|v| v.id == e.tail)
                    .unwrap()
                    .genus += extra_genus;
                for f in c.edges.iter_mut() {
                    if f.tail == head {
                        f.tail = e.tail;
                    }
                    if f.head == Some(head) {
                        f.head = Some(e.tail);
                    }
                }
            }
        }
        c
    }

    /// Order of the automorphism group: graph self-maps preserving weights,
    /// genera, directions, and fixing every marked end. Brute force; capped
    /// at 10 vertices.
    pub fn automorphism_order(&self) -> Result<BigInt> {
        if self.vertices.len() > 10 {
            return Err(Error::Precondition(
                "automorphism enumeration capped at 10 vertices".into(),
            ));
        }
        let ids: Vec<VertexId> = self.vertices.iter().map(|v| v.id).collect();
        let n = ids.len();
        let mut count = BigInt::zero();

        // unbounded edges are marked, hence fixed pointwise: their attachment
        // vertices must be fixed by any automorphism
        let pinned: Vec<VertexId> = self.unbounded_edges().map(|e| e.tail).collect();

        let mut perm: Vec<usize> = (0..n).collect();
        let mut stack = vec![0usize];
        let mut used = vec![false; n];
        // enumerate vertex bijections with early pruning on local data
        fn compatible(c: &TropicalCurve, ids: &[VertexId], perm: &[usize], k: usize) -> bool {
            let v = ids[k];
            let w = ids[perm[k]];
            c.vertex(v).genus == c.vertex(w).genus && c.valence(v) == c.valence(w)
        }
        // recursive enumeration without recursion: simple permutation loop
        let mut results: Vec<Vec<usize>> = Vec::new();
        fn rec(
            c: &TropicalCurve,
            ids: &[VertexId],
            pinned: &[VertexId],
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
            k: usize,
            results: &mut Vec<Vec<usize>>,
        ) {
            let n = ids.len();
            if k == n {
                results.push(perm.clone());
                return;
            }
            for cand in 0..n {
                if used[cand] {
                    continue;
                }
                if pinned.contains(&ids[k]) && cand != k {
                    continue;
                }
                perm[k] = cand;
                if !compatible(c, ids, perm, k) {
                    continue;
                }
                used[cand] = true;
                rec(c, ids, pinned, perm, used, k + 1, results);
                used[cand] = false;
            }
        }
        rec(self, &ids, &pinned, &mut perm, &mut used, 0, &mut results);
        let _ = &mut stack;

        for p in results {
            let vmap = |v: VertexId| -> VertexId {
                let k = ids.iter().position(|&x| x == v).unwrap();
                ids[p[k]]
            };
            // count edge bijections compatible with this vertex map: for each
            // class of identical edges between a vertex pair, the class must
            // map onto an equal-size class, contributing (size)! matchings
            let mut ok = true;
            let mut ways = BigInt::one();
            // unbounded edges must map to themselves
            for e in self.unbounded_edges() {
                if vmap(e.tail) != e.tail {
                    ok = false;
                    break;
                }
            }
            if ok {
                let key = |e: &Edge, flip: bool| -> (VertexId, VertexId, u64, Vec<BigInt>) {
                    let (t, h) = (e.tail, e.head.unwrap());
                    if flip {
                        (h, t, e.weight, e.direction.neg().coords)
                    } else {
                        (t, h, e.weight, e.direction.coords.clone())
                    }
                };
                let mut classes: std::collections::BTreeMap<
                    (VertexId, VertexId, u64, Vec<BigInt>),
                    (usize, usize),
                > = std::collections::BTreeMap::new();
                for e in self.compact_edges() {
                    // canonical unoriented key: smaller endpoint first
                    let fwd = key(e, false);
                    let bwd = key(e, true);
                    let k = if fwd <= bwd { fwd } else { bwd };
                    classes.entry(k).or_default().0 += 1;
                    // image class under the vertex map
                    let img = Edge {
                        id: e.id,
                        tail: vmap(e.tail),
                        head: Some(vmap(e.head.unwrap())),
                        weight: e.weight,
                        direction: e.direction.clone(),
                    };
                    let fwd = key(&img, false);
                    let bwd = key(&img, true);
                    let k = if fwd <= bwd { fwd } else { bwd };
                    classes.entry(k).or_default().1 += 1;
                }
                for (_, (a, b)) in classes {
                    if a != b {
                        ok = false;
                        break;
                    }
                    for m in 2..=a {
                        ways *= BigInt::from(m);
                    }
                }
                // ways counted (size!) once per class seen from the source side;
                // a class appears in both roles, so sizes already match 1:1
            }
            if ok {
                count += ways;
            }
        }
        if count.is_zero() {
            return Err(Error::Invariant("automorphism count came out zero".into()));
        }
        Ok(count)
    }
}

/// An acyclic orientation of the midpoint-refined graph. Nodes of the
/// refinement: original vertices, one midpoint per edge, one point at
/// infinity per unbounded edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowMode {
    /// Midpoints of compact edges and ends of unbounded edges are sources;
    /// every vertex is a sink.
    MidpointCanonical,
    /// All edges flow toward one sink vertex (needs b₁ = 0).
    SingleSink(VertexId),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum FlowNode {
    Vertex(VertexId),
    Midpoint(EdgeId),
    Infinity(EdgeId),
}

#[derive(Debug, Clone)]
pub struct Flow {
    pub mode: FlowMode,
    /// Directed arcs of the refined graph.
    pub arcs: Vec<(FlowNode, FlowNode)>,
}

impl Flow {
    /// Topological order of the arcs' nodes; errors when a cycle exists.
    pub fn topological_order(&self) -> Result<Vec<FlowNode>> {
        let mut nodes: Vec<FlowNode> = Vec::new();
        for (a, b) in &self.arcs {
            if !nodes.contains(a) {
                nodes.push(a.clone());
            }
            if !nodes.contains(b) {
                nodes.push(b.clone());
            }
        }
        nodes.sort();
        let mut indeg: Vec<usize> = nodes
            .iter()
            .map(|n| self.arcs.iter().filter(|(_, b)| b == n).count())
            .collect();
        let mut order = Vec::new();
        let mut remaining: Vec<usize> = (0..nodes.len()).collect();
        while !remaining.is_empty() {
            let Some(pos) = remaining.iter().position(|&i| indeg[i] == 0) else {
                return Err(Error::Invariant("flow has a directed cycle".into()));
            };
            let i = remaining.remove(pos);
            order.push(nodes[i].clone());
            for (a, b) in &self.arcs {
                if *a == nodes[i] {
                    let j = nodes.iter().position(|n| n == b).unwrap();
                    indeg[j] -= 1;
                }
            }
        }
        Ok(order)
    }
}

/// Build a tropical flow on the midpoint refinement.
pub fn build_flow(c: &TropicalCurve, mode: FlowMode) -> Result<Flow> {
    c.check_valid()?;
    let mut arcs = Vec::new();
    match &mode {
        FlowMode::MidpointCanonical => {
            for e in &c.edges {
                match e.head {
                    Some(h) => {
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(e.tail)));
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(h)));
                    }
                    None => {
                        arcs.push((FlowNode::Infinity(e.id), FlowNode::Midpoint(e.id)));
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(e.tail)));
                    }
                }
            }
        }
        FlowMode::SingleSink(sink) => {
            if !c.has_vertex(*sink) {
                return Err(Error::Precondition(format!("unknown sink vertex {}", sink)));
            }
            // orient each spanning-tree edge along its path toward the sink;
            // on b₁ > 0 graphs the cycle edges get midpoint sources (which is
            // how the tree-flow evaluation splits them); the bracket method
            // separately insists on b₁ = 0
            let parents = tree_parents(c, *sink)?;
            let tree: Vec<EdgeId> = parents.values().copied().collect();
            for e in &c.edges {
                match e.head {
                    None => {
                        arcs.push((FlowNode::Infinity(e.id), FlowNode::Midpoint(e.id)));
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(e.tail)));
                    }
                    Some(h) if tree.contains(&e.id) => {
                        // flows from the endpoint farther from the sink
                        let from = if parents.get(&e.tail) == Some(&e.id) {
                            e.tail
                        } else {
                            debug_assert_eq!(parents.get(&h), Some(&e.id));
                            h
                        };
                        let to = if from == e.tail { h } else { e.tail };
                        arcs.push((FlowNode::Vertex(from), FlowNode::Midpoint(e.id)));
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(to)));
                    }
                    Some(h) => {
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(e.tail)));
                        arcs.push((FlowNode::Midpoint(e.id), FlowNode::Vertex(h)));
                    }
                }
            }
        }
    }
    let flow = Flow { mode, arcs };
    flow.topological_order()?;
    Ok(flow)
}

/// For a tree (b₁ = 0): the edge each vertex uses to step toward `root`.
pub fn tree_parents(
    c: &TropicalCurve,
    root: VertexId,
) -> Result<std::collections::BTreeMap<VertexId, EdgeId>> {
    let mut parents = std::collections::BTreeMap::new();
    let mut seen = vec![root];
    let mut queue = std::collections::VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let mut adjacent: Vec<&Edge> = c
            .edges_at(v)
            .into_iter()
            .filter(|e| e.is_compact())
            .collect();
        adjacent.sort_by_key(|e| e.id);
        for e in adjacent {
            let other = if e.tail == v { e.head.unwrap() } else { e.tail };
            if !seen.contains(&other) {
                seen.push(other);
                parents.insert(other, e.id);
                queue.push_back(other);
            }
        }
    }
    if seen.len() != c.vertices.len() {
        return Err(Error::Precondition("graph is not connected".into()));
    }
    Ok(parents)
}

//! Named test curves and seeded random generators.
//!
//! The named fixtures pin the behaviors the test suites check against:
//! `e1` (the line through two points), `e2(w)` (weight calibration),
//! `genus1(a..f)` (the three-vertex genus-1 golden curve), and `theta`
//! (rigid trees whose multiplicity is a product of skew-form pairings).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::constraints::AffineConstraint;
use crate::curve::{Edge, Marking, PsiVector, TropicalCurve, Vertex};
use crate::lattice::{saturate, IntVector, Sublattice};

fn end(id: u32, at: u32, dir: &[i64], weight: u64) -> Edge {
    Edge {
        id,
        tail: at,
        head: None,
        weight,
        direction: IntVector::from_i64(dir),
    }
}

fn contracted_end(id: u32, at: u32, rank: usize) -> Edge {
    Edge {
        id,
        tail: at,
        head: None,
        weight: 0,
        direction: IntVector::zero(rank),
    }
}

fn compact(id: u32, tail: u32, head: u32, dir: &[i64], weight: u64) -> Edge {
    Edge {
        id,
        tail,
        head: Some(head),
        weight,
        direction: IntVector::from_i64(dir),
    }
}

fn line_span(dir: &[i64]) -> Sublattice {
    saturate(&Sublattice::new(dir.len(), vec![IntVector::from_i64(dir)]))
}

/// Balanced three-valent star with ends (−1,0), (0,−1), (1,1).
pub fn tripod() -> TropicalCurve {
    TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }],
        edges: vec![
            end(0, 0, &[-1, 0], 1),
            end(1, 0, &[0, -1], 1),
            end(2, 0, &[1, 1], 1),
        ],
        markings: (0..3).map(|i| Marking { index: i, edge: i }).collect(),
    }
}

/// The line through two points: a subdivided tripod with contracted
/// point-marked ends on two legs. Multiplicity 1 with a 6×6 Φ.
pub fn e1() -> (TropicalCurve, Vec<AffineConstraint>, PsiVector) {
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![
            Vertex { id: 0, genus: 0 },
            Vertex { id: 1, genus: 0 },
            Vertex { id: 2, genus: 0 },
        ],
        edges: vec![
            compact(0, 0, 1, &[-1, 0], 1),
            compact(1, 0, 2, &[0, -1], 1),
            end(2, 0, &[1, 1], 1),
            end(3, 1, &[-1, 0], 1),
            contracted_end(4, 1, 2),
            end(5, 2, &[0, -1], 1),
            contracted_end(6, 2, 2),
        ],
        markings: (0..5)
            .map(|i| Marking {
                index: i,
                edge: i + 2,
            })
            .collect(),
    };
    let constraints = vec![
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
        AffineConstraint::point(2, None),
        AffineConstraint::trivial(2),
        AffineConstraint::point(2, None),
    ];
    (curve, constraints, PsiVector::empty())
}

/// Two vertices joined by a compact edge of weight w, with three primitive
/// line conditions. 𝔇 = w and Mult = w² — the weight-normalization pin.
pub fn e2(w: i64) -> (TropicalCurve, Vec<AffineConstraint>, PsiVector) {
    assert!(w >= 1);
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }, Vertex { id: 1, genus: 0 }],
        edges: vec![
            compact(0, 0, 1, &[0, 1], w as u64),
            end(1, 0, &[-1, 0], 1),
            end(2, 0, &[1, -w], 1),
            end(3, 1, &[1, 0], 1),
            end(4, 1, &[-1, w], 1),
        ],
        markings: (0..4)
            .map(|i| Marking {
                index: i,
                edge: i + 1,
            })
            .collect(),
    };
    let constraints = vec![
        AffineConstraint::new(line_span(&[1, 0])),
        AffineConstraint::new(line_span(&[1, -w])),
        AffineConstraint::new(line_span(&[1, 0])),
        AffineConstraint::trivial(2),
    ];
    (curve, constraints, PsiVector::empty())
}

/// The genus-1 curve with three 4-valent vertices, each carrying a ψ-marked
/// contracted end with a line condition along (a,b), (c,d), (e,f). The line
/// conditions carry weight gcd of their span vector, so the multiplicity is
/// exactly |ad(e+f) − be(c+d)|.
pub fn genus1(p: &[i64]) -> (TropicalCurve, Vec<AffineConstraint>, PsiVector) {
    assert_eq!(p.len(), 6);
    let (a, b, c, d, e, f) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    assert!(
        (a, b) != (0, 0) && (c, d) != (0, 0) && (e, f) != (0, 0),
        "line spans must be nonzero"
    );
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![
            Vertex { id: 0, genus: 0 },
            Vertex { id: 1, genus: 0 },
            Vertex { id: 2, genus: 0 },
        ],
        edges: vec![
            compact(0, 0, 1, &[1, 0], 1),
            compact(1, 0, 2, &[0, 1], 1),
            compact(2, 1, 2, &[1, -1], 1),
            contracted_end(3, 0, 2),
            contracted_end(4, 1, 2),
            contracted_end(5, 2, 2),
            end(6, 0, &[-1, -1], 1),
            end(7, 1, &[0, 1], 1),
            end(8, 2, &[1, 0], 1),
        ],
        markings: (0..6)
            .map(|i| Marking {
                index: i,
                edge: i + 3,
            })
            .collect(),
    };
    let line = |x: i64, y: i64| -> AffineConstraint {
        AffineConstraint {
            span: line_span(&[x, y]),
            translation: None,
            weight: gcd64(x, y),
        }
    };
    let constraints = vec![
        line(a, b),
        line(c, d),
        line(e, f),
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
    ];
    let mut psi = PsiVector::empty();
    psi.s.insert(0, 1);
    psi.s.insert(1, 1);
    psi.s.insert(2, 1);
    (curve, constraints, psi)
}

fn gcd64(x: i64, y: i64) -> BigInt {
    use num_integer::Integer;
    BigInt::from(x).gcd(&BigInt::from(y))
}

/// Genus-1 variant carrying one point condition (at vertex 0) and one line
/// condition along (c,d) (at vertex 1); vertex 2 is plain trivalent.
pub fn genus1_with_point(cd: &[i64]) -> (TropicalCurve, Vec<AffineConstraint>) {
    let (c, d) = (cd[0], cd[1]);
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![
            Vertex { id: 0, genus: 0 },
            Vertex { id: 1, genus: 0 },
            Vertex { id: 2, genus: 0 },
        ],
        edges: vec![
            compact(0, 0, 1, &[1, 0], 1),
            compact(1, 0, 2, &[0, 1], 1),
            compact(2, 1, 2, &[1, -1], 1),
            contracted_end(3, 0, 2),
            contracted_end(4, 1, 2),
            end(5, 0, &[-1, -1], 1),
            end(6, 1, &[0, 1], 1),
            end(7, 2, &[1, 0], 1),
        ],
        markings: (0..5)
            .map(|i| Marking {
                index: i,
                edge: i + 3,
            })
            .collect(),
    };
    let constraints = vec![
        AffineConstraint::point(2, None),
        AffineConstraint {
            span: line_span(&[c, d]),
            translation: None,
            weight: gcd64(c, d),
        },
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
    ];
    (curve, constraints)
}

/// Tripod pinned at its vertex by a contracted point-marked end.
pub fn pinned_tripod() -> (TropicalCurve, Vec<AffineConstraint>, PsiVector) {
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }],
        edges: vec![
            end(0, 0, &[-1, 0], 1),
            end(1, 0, &[0, -1], 1),
            end(2, 0, &[1, 1], 1),
            contracted_end(3, 0, 2),
        ],
        markings: (0..4).map(|i| Marking { index: i, edge: i }).collect(),
    };
    let constraints = vec![
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
        AffineConstraint::trivial(2),
        AffineConstraint::point(2, None),
    ];
    let mut psi = PsiVector::empty();
    psi.s.insert(3, 1);
    (curve, constraints, psi)
}

/// One 5-valent vertex: four balanced ends plus contracted ψ-marked ends,
/// for the multinomial ⟨V⟩ examples (ov = 2 with the given s values).
pub fn psi_station(s: &[u32]) -> (TropicalCurve, Vec<AffineConstraint>, PsiVector) {
    let n_contracted = s.len() as u32;
    let n_plain = 5 - n_contracted;
    let dirs: Vec<[i64; 2]> = match n_plain {
        3 => vec![[-1, 0], [0, -1], [1, 1]],
        4 => vec![[1, 0], [-1, 0], [0, 1], [0, -1]],
        _ => panic!("psi_station takes 1 or 2 ψ values"),
    };
    let mut edges = Vec::new();
    for (i, d) in dirs.iter().enumerate() {
        edges.push(end(i as u32, 0, d, 1));
    }
    for k in 0..n_contracted {
        edges.push(contracted_end(n_plain + k, 0, 2));
    }
    let markings = (0..5).map(|i| Marking { index: i, edge: i }).collect();
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }],
        edges,
        markings,
    };
    let constraints = (0..5).map(|_| AffineConstraint::trivial(2)).collect();
    let mut psi = PsiVector::empty();
    for (k, &v) in s.iter().enumerate() {
        psi.s.insert(n_plain + k as u32, v);
    }
    (curve, constraints, psi)
}

/// Two vertices joined by two parallel compact edges of equal weight and
/// direction: automorphism group of order 2.
pub fn double_edge_theta_graph() -> TropicalCurve {
    TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }, Vertex { id: 1, genus: 0 }],
        edges: vec![
            compact(0, 0, 1, &[1, 0], 1),
            compact(1, 0, 1, &[1, 0], 1),
            end(2, 0, &[-1, 0], 2),
            end(3, 1, &[1, 0], 2),
        ],
        markings: vec![Marking { index: 0, edge: 2 }, Marking { index: 1, edge: 3 }],
    }
}

/// A degree-2 planar trivalent curve through five points (contracted
/// point-marked subdivision vertices). All Mikhalkin vertex factors are 1.
pub fn conic_through_5_points() -> (TropicalCurve, Vec<AffineConstraint>) {
    // spine A(0) – B(1) – C(2) – D(3); points on the three compact spine
    // edges and on one end at A and one at D
    let mut curve = TropicalCurve {
        rank: 2,
        vertices: (0..4).map(|id| Vertex { id, genus: 0 }).collect(),
        edges: vec![
            compact(0, 0, 1, &[1, 1], 1),
            compact(1, 1, 2, &[2, 1], 1),
            compact(2, 2, 3, &[1, 0], 1),
            end(3, 0, &[-1, 0], 1),
            end(4, 0, &[0, -1], 1),
            end(5, 1, &[-1, 0], 1),
            end(6, 2, &[1, 1], 1),
            end(7, 3, &[0, -1], 1),
            end(8, 3, &[1, 1], 1),
        ],
        markings: (0..6)
            .map(|i| Marking {
                index: i,
                edge: i + 3,
            })
            .collect(),
    };
    // subdivide edges 0, 1, 2 (compact) and ends 3, 8 with point markings
    let mut constraints: Vec<AffineConstraint> =
        (0..6).map(|_| AffineConstraint::trivial(2)).collect();
    for &target in &[0u32, 1, 2, 3, 8] {
        subdivide_with_point(&mut curve, &mut constraints, target);
    }
    (curve, constraints)
}

/// A tripod whose single vertex has Mikhalkin multiplicity 3, pinned by two
/// points on its subdivided legs.
pub fn mult3_tripod() -> (TropicalCurve, Vec<AffineConstraint>) {
    let mut curve = TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }],
        edges: vec![
            end(0, 0, &[-2, 1], 1),
            end(1, 0, &[1, -2], 1),
            end(2, 0, &[1, 1], 1),
        ],
        markings: (0..3).map(|i| Marking { index: i, edge: i }).collect(),
    };
    let mut constraints: Vec<AffineConstraint> =
        (0..3).map(|_| AffineConstraint::trivial(2)).collect();
    for &target in &[0u32, 1] {
        subdivide_with_point(&mut curve, &mut constraints, target);
    }
    (curve, constraints)
}

/// Insert a trivalent vertex in the middle of an edge and hang a contracted
/// point-marked end on it.
pub fn subdivide_with_point(
    curve: &mut TropicalCurve,
    constraints: &mut Vec<AffineConstraint>,
    edge_id: u32,
) {
    let rank = curve.rank;
    let new_v = curve.vertices.iter().map(|v| v.id).max().unwrap() + 1;
    let mut next_e = curve.edges.iter().map(|e| e.id).max().unwrap() + 1;
    let next_m = curve.markings.iter().map(|m| m.index).max().unwrap() + 1;
    curve.vertices.push(Vertex {
        id: new_v,
        genus: 0,
    });
    let pos = curve.edges.iter().position(|e| e.id == edge_id).unwrap();
    let old = curve.edges[pos].clone();
    // first half keeps the id: tail → new vertex
    curve.edges[pos].head = Some(new_v);
    // second half: new vertex → old head (or to infinity)
    let second = Edge {
        id: next_e,
        tail: new_v,
        head: old.head,
        weight: old.weight,
        direction: old.direction.clone(),
    };
    next_e += 1;
    // a marking on the old unbounded edge moves to the far half
    if old.head.is_none() {
        if let Some(m) = curve.markings.iter_mut().find(|m| m.edge == edge_id) {
            m.edge = second.id;
        }
    }
    curve.edges.push(second);
    let dot = Edge {
        id: next_e,
        tail: new_v,
        head: None,
        weight: 0,
        direction: IntVector::zero(rank),
    };
    curve.markings.push(Marking {
        index: next_m,
        edge: dot.id,
    });
    curve.edges.push(dot);
    constraints.push(AffineConstraint::point(rank, None));
}

/// Theta-style fixture: a rigid genus-0 tree whose ends pair against an
/// integral skew form, with multiplicity Π_V |ω(n₁, n₂)|.
pub struct ThetaFixture {
    pub curve: TropicalCurve,
    pub constraints: Vec<AffineConstraint>,
    pub psi: PsiVector,
    pub sink: u32,
    pub expected_mult: BigInt,
    pub lambda: i64,
}

/// Build a theta fixture from a seed; ω((x1,y1),(x2,y2)) = λ(x1·y2 − y1·x2).
pub fn theta(seed: u64, lambda: i64) -> ThetaFixture {
    use rand::SeedableRng;
    assert!(lambda != 0, "the skew form must be nondegenerate");
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(7));
    loop {
        if let Some(fx) = try_theta(&mut rng, lambda) {
            return fx;
        }
    }
}

fn omega(lambda: i64, a: &IntVector, b: &IntVector) -> BigInt {
    BigInt::from(lambda) * (&a.coords[0] * &b.coords[1] - &a.coords[1] * &b.coords[0])
}

fn try_theta(rng: &mut ChaCha8Rng, lambda: i64) -> Option<ThetaFixture> {
    let rank = 2;
    let nj = rng.gen_range(2..=3usize);
    let rand_dir = |rng: &mut ChaCha8Rng| -> IntVector {
        loop {
            let v = IntVector::from_i64(&[rng.gen_range(-2i64..=2), rng.gen_range(-2i64..=2)]);
            if !v.is_zero() {
                return v;
            }
        }
    };

    // component j: one theta end (trivial condition) plus wall ends, merged
    // pairwise; the last component balances the others
    let sink: u32 = 0;
    let mut vertices = vec![Vertex { id: sink, genus: 0 }];
    let mut edges: Vec<Edge> = Vec::new();
    let mut markings: Vec<Marking> = Vec::new();
    let mut constraints: Vec<AffineConstraint> = Vec::new();
    let mut expected = BigInt::one();
    let mut next_v: u32 = 1;
    let mut next_e: u32 = 0;
    let mut next_m: u32 = 0;
    let mut root_sum = IntVector::zero(rank);

    for j in 0..nj {
        let walls = if j + 1 == nj {
            rng.gen_range(1..=2usize)
        } else {
            rng.gen_range(0..=2)
        };
        let theta_dir;
        let wall_dirs: Vec<IntVector>;
        if j + 1 == nj {
            // balance: theta end direction absorbs the remainder
            let w: Vec<IntVector> = (0..walls).map(|_| rand_dir(rng)).collect();
            let mut t = root_sum.neg();
            for v in &w {
                t = t.add(&v.neg());
            }
            if t.is_zero() {
                return None;
            }
            theta_dir = t;
            wall_dirs = w;
        } else {
            theta_dir = rand_dir(rng);
            wall_dirs = (0..walls).map(|_| rand_dir(rng)).collect();
        }

        // leaves as (weighted direction, edge id) pending branches
        struct Branch {
            dir: IntVector,
            vertex: Option<u32>, // vertex the branch's edge hangs from
            edge: u32,
        }
        let mut branches: Vec<Branch> = Vec::new();
        let add_end = |edges: &mut Vec<Edge>,
                       markings: &mut Vec<Marking>,
                       constraints: &mut Vec<AffineConstraint>,
                       next_e: &mut u32,
                       next_m: &mut u32,
                       dir: &IntVector,
                       wall: bool|
         -> u32 {
            let (u, content) = dir.primitive_part();
            let id = *next_e;
            *next_e += 1;
            edges.push(Edge {
                id,
                tail: u32::MAX, // anchored when merged
                head: None,
                weight: content.to_string().parse().unwrap(),
                direction: u,
            });
            markings.push(Marking {
                index: *next_m,
                edge: id,
            });
            *next_m += 1;
            constraints.push(if wall {
                // hyperplane m^⊥ for m = ω(dir, ·), weight = index of m
                let span = saturate(&Sublattice::new(rank, vec![dir.clone()]));
                let weight = BigInt::from(lambda).abs() * dir.content();
                AffineConstraint {
                    span,
                    translation: None,
                    weight,
                }
            } else {
                AffineConstraint::trivial(rank)
            });
            id
        };
        branches.push(Branch {
            dir: theta_dir.clone(),
            vertex: None,
            edge: add_end(
                &mut edges,
                &mut markings,
                &mut constraints,
                &mut next_e,
                &mut next_m,
                &theta_dir,
                false,
            ),
        });
        for w in &wall_dirs {
            branches.push(Branch {
                dir: w.clone(),
                vertex: None,
                edge: add_end(
                    &mut edges,
                    &mut markings,
                    &mut constraints,
                    &mut next_e,
                    &mut next_m,
                    w,
                    true,
                ),
            });
        }
        // merge random pairs until one branch remains
        while branches.len() > 1 {
            let a = rng.gen_range(0..branches.len());
            let b_raw = rng.gen_range(0..branches.len() - 1);
            let b = if b_raw >= a { b_raw + 1 } else { b_raw };
            let (lo, hi) = (a.min(b), a.max(b));
            let bb = branches.remove(hi);
            let ba = branches.remove(lo);
            let pairing = omega(lambda, &ba.dir, &bb.dir);
            if pairing.is_zero() {
                return None;
            }
            expected *= pairing.abs();
            let v = next_v;
            next_v += 1;
            vertices.push(Vertex { id: v, genus: 0 });
            for br in [&ba, &bb] {
                let e = edges.iter_mut().find(|e| e.id == br.edge).unwrap();
                match br.vertex {
                    None => e.tail = v,
                    Some(_) => e.head = Some(v),
                }
            }
            let dir = ba.dir.add(&bb.dir);
            if dir.is_zero() {
                return None;
            }
            let (u, content) = dir.primitive_part();
            let content: u64 = content.to_string().parse().unwrap();
            if content > 3 {
                return None;
            }
            let id = next_e;
            next_e += 1;
            edges.push(Edge {
                id,
                tail: v,
                head: None,
                weight: content,
                direction: u.neg(),
            });
            branches.push(Branch {
                dir,
                vertex: Some(v),
                edge: id,
            });
        }
        let root = branches.pop().unwrap();
        root_sum = root_sum.add(&root.dir);
        // anchor the root branch at the sink
        let e = edges.iter_mut().find(|e| e.id == root.edge).unwrap();
        match root.vertex {
            None => e.tail = sink,
            Some(_) => e.head = Some(sink),
        }
    }
    if !root_sum.is_zero() {
        return None;
    }
    // the ψ-marked contracted end with its point condition
    let id = next_e;
    edges.push(Edge {
        id,
        tail: sink,
        head: None,
        weight: 0,
        direction: IntVector::zero(rank),
    });
    markings.push(Marking {
        index: next_m,
        edge: id,
    });
    constraints.push(AffineConstraint::point(rank, None));
    let mut psi = PsiVector::empty();
    psi.s.insert(next_m, (nj as u32).saturating_sub(2));

    let curve = TropicalCurve {
        rank,
        vertices,
        edges,
        markings,
    };
    if !curve.validate().is_empty() {
        return None;
    }
    match crate::mult::mult(&curve, &constraints) {
        Ok(m) if m == expected && m > BigInt::zero() => Some(ThetaFixture {
            curve,
            constraints,
            psi,
            sink,
            expected_mult: expected,
            lambda,
        }),
        _ => None,
    }
}

/// Minimal skew-form tree with one interior vertex of pairing 6: a wall
/// end (1,0) and a theta end of weighted direction (0,6) merge and flow
/// into the point-marked sink vertex. Mult = |ω((1,0),(0,6))| = 6.
pub fn theta_vertex6() -> (TropicalCurve, Vec<AffineConstraint>, PsiVector) {
    let curve = TropicalCurve {
        rank: 2,
        vertices: vec![Vertex { id: 0, genus: 0 }, Vertex { id: 1, genus: 0 }],
        edges: vec![
            compact(0, 1, 0, &[-1, -6], 1),
            contracted_end(1, 0, 2),
            end(2, 0, &[-1, -6], 1),
            end(3, 1, &[1, 0], 1),
            end(4, 1, &[0, 1], 6),
        ],
        markings: (0..4)
            .map(|i| Marking {
                index: i,
                edge: i + 1,
            })
            .collect(),
    };
    let constraints = vec![
        AffineConstraint::point(2, None),
        AffineConstraint::trivial(2),
        AffineConstraint::new(line_span(&[1, 0])),
        AffineConstraint::trivial(2),
    ];
    (curve, constraints, PsiVector::empty())
}

/// One attempt at a random rigid genus-0 tree with hyperplane-and-lower
/// incidence conditions; rank 2 or 3, ≤ 6 vertices, weights ≤ 3.
pub fn random_rigid_tree(
    rng: &mut ChaCha8Rng,
    rank: usize,
) -> Option<(TropicalCurve, Vec<AffineConstraint>)> {
    let nv = rng.gen_range(1..=5usize);
    let parent: Vec<usize> = (0..nv)
        .map(|i| if i == 0 { 0 } else { rng.gen_range(0..i) })
        .collect();
    let rand_dir = |rng: &mut ChaCha8Rng| -> IntVector {
        loop {
            let v = IntVector::new(
                (0..rank)
                    .map(|_| BigInt::from(rng.gen_range(-2i64..=2)))
                    .collect(),
            );
            if !v.is_zero() {
                return v;
            }
        }
    };

    let mut edges: Vec<Edge> = Vec::new();
    let mut next_e: u32 = 0;
    let mut end_dirs: Vec<(u32, IntVector)> = Vec::new(); // (edge id, weighted dir)
    let mut subtree_dir: Vec<IntVector> = vec![IntVector::zero(rank); nv];
    // children count for valence bookkeeping
    let children: Vec<Vec<usize>> = {
        let mut ch = vec![Vec::new(); nv];
        for i in 1..nv {
            ch[parent[i]].push(i);
        }
        ch
    };

    for i in (0..nv).rev() {
        let n_children = children[i].len();
        let base_valence = n_children + usize::from(i > 0);
        let mut n_ends = rng.gen_range(0..=2usize);
        if base_valence + n_ends < 3 {
            n_ends = 3 - base_valence;
        }
        let mut total = subtree_dir[i].clone();
        for k in 0..n_ends {
            let balancing_slot = i == 0 && k + 1 == n_ends;
            let dir = if balancing_slot {
                let d = total.neg();
                if d.is_zero() {
                    // already balanced: a zero end is not allowed
                    if base_valence + k >= 3 {
                        break;
                    }
                    return None;
                }
                d
            } else {
                rand_dir(rng)
            };
            let (u, content) = dir.primitive_part();
            let content: u64 = content.to_string().parse().ok()?;
            if content == 0 || content > 3 {
                return None;
            }
            let id = next_e;
            next_e += 1;
            edges.push(Edge {
                id,
                tail: i as u32,
                head: None,
                weight: content,
                direction: u,
            });
            end_dirs.push((id, dir.clone()));
            total = total.add(&dir);
        }
        if i > 0 {
            // the edge to the parent carries the balance: out of this vertex
            // its weighted direction is minus the subtree's end total
            let out = total.neg();
            if out.is_zero() {
                return None;
            }
            let (u, content) = out.primitive_part();
            let content: u64 = content.to_string().parse().ok()?;
            if content > 3 {
                return None;
            }
            let id = next_e;
            next_e += 1;
            edges.push(Edge {
                id,
                tail: i as u32,
                head: Some(parent[i] as u32),
                weight: content,
                direction: u,
            });
            subtree_dir[parent[i]] = subtree_dir[parent[i]].add(&total);
        } else if !total.is_zero() {
            return None;
        }
    }

    let markings: Vec<Marking> = end_dirs
        .iter()
        .enumerate()
        .map(|(k, (id, _))| Marking {
            index: k as u32,
            edge: *id,
        })
        .collect();
    let curve = TropicalCurve {
        rank,
        vertices: (0..nv as u32).map(|id| Vertex { id, genus: 0 }).collect(),
        edges,
        markings,
    };
    if !curve.validate().is_empty() {
        return None;
    }

    // distribute codimension budget d^trop over the ends
    let budget = curve.expected_dimension();
    if budget < 0 {
        return None;
    }
    let mut budget = budget as usize;
    let mut codims = vec![0usize; end_dirs.len()];
    let mut order: Vec<usize> = (0..end_dirs.len()).collect();
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }
    for &k in &order {
        if budget == 0 {
            break;
        }
        let take = rng.gen_range(0..=budget.min(rank - 1));
        codims[k] = take;
        budget -= take;
    }
    if budget > 0 {
        return None;
    }
    let mut constraints = Vec::new();
    for (k, (_, dir)) in end_dirs.iter().enumerate() {
        if codims[k] == 0 {
            constraints.push(AffineConstraint::trivial(rank));
            continue;
        }
        let want_rank = rank - codims[k];
        let mut gens = vec![dir.clone()];
        for _ in 0..(want_rank - 1) {
            gens.push(rand_dir(rng));
        }
        let span = saturate(&Sublattice::new(rank, gens));
        if span.rank() != want_rank {
            return None;
        }
        let weight = if rng.gen_bool(0.15) { 2 } else { 1 };
        constraints.push(AffineConstraint {
            span,
            translation: None,
            weight: BigInt::from(weight),
        });
    }
    match crate::mult::mult_or_zero(&curve, &constraints) {
        Ok(m) if m > BigInt::zero() => Some((curve, constraints)),
        _ => None,
    }
}

/// A deterministic corpus of rigid genus-0 trees.
pub fn rigid_tree_corpus(seed: u64, count: usize) -> Vec<(TropicalCurve, Vec<AffineConstraint>)> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let rank = if rng.gen_bool(0.5) { 2 } else { 3 };
        if let Some(cx) = random_rigid_tree(&mut rng, rank) {
            out.push(cx);
        }
    }
    out
}

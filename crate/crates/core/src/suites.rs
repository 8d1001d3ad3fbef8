//! Seeded, reproducible identity suites behind `check`: the Frobenius
//! coproduct/adjointness laws, the BV identities, the L∞ Jacobi identities,
//! and the Schouten bracket comparisons. Each check reports one pass/fail
//! line; a fixed seed fixes every case.

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exterior::{
    box_map, contract, contract_vector, doubled_vector_blade, theta_box, to_first_copy,
    to_second_copy, trace, wedge, Multivector,
};
use crate::lattice::{annihilator, IntVector, Sublattice};
use crate::polyvector::{
    bv_delta, d_ij, derivation_failure_check, geom_delta, in_a0, jacobi_sum, l_k,
    sampling::{random_a0_monomial, random_homogeneous_monomial},
    schouten, seven_term_check, PolyvectorField,
};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        pass,
        detail,
    }
}

fn random_primitive(rng: &mut ChaCha8Rng, r: usize) -> IntVector {
    loop {
        let v = IntVector::new(
            (0..r)
                .map(|_| BigInt::from(rng.gen_range(-2i64..=2)))
                .collect(),
        );
        if !v.is_zero() && v.content() == BigInt::one() {
            return v;
        }
    }
}

/// Frobenius structure: the coproduct's defining equation over full bases,
/// the coproduct of the top class, adjointness of the traversal maps, the
/// contracted top class, and the box-class coproduct.
pub fn frobenius_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // defining property over all basis blades, underlying rank ≤ 3
    let mut coprod_ok = true;
    let mut tested = 0usize;
    'outer: for r in 1..=3usize {
        let k = 2 * r;
        for zb in 0..(1u64 << k) {
            let z = Multivector::from_blade(k, zb as u32);
            let terms = match crate::exterior::coproduct(&z) {
                Ok(t) => t,
                Err(_) => {
                    coprod_ok = false;
                    break 'outer;
                }
            };
            for ab in 0..(1u64 << k) {
                let a = Multivector::from_blade(k, ab as u32);
                let mut lhs = Multivector::zero(k);
                for (x, y) in &terms {
                    let t = trace(&wedge(&a, x)).unwrap();
                    lhs = lhs.add(&y.scale(&t));
                }
                if lhs != wedge(&a, &z) {
                    coprod_ok = false;
                    break 'outer;
                }
                tested += 1;
            }
        }
    }
    out.push(check(
        "coproduct-defining-equation",
        coprod_ok,
        format!("{tested} (a, z) pairs over full bases, rank ≤ 3 doubled"),
    ));

    let mut theta_ok = true;
    for r in 1..=3usize {
        let theta = theta_box(2 * r);
        let terms = crate::exterior::coproduct(&theta).unwrap();
        theta_ok &= terms.len() == 1 && terms[0] == (theta.clone(), theta.clone());
    }
    out.push(check(
        "coproduct-of-theta",
        theta_ok,
        "∨(Θ^□) = Θ^□⊗Θ^□, rank ≤ 3".into(),
    ));

    // adjointness of the inclusion/contraction pair for primitive n
    let mut adj_ok = true;
    let mut adj_cases = 0usize;
    while adj_cases < cases.min(200) {
        let r = rng.gen_range(2..=3usize);
        let n = random_primitive(&mut rng, r);
        let perp = annihilator(&Sublattice::new(r, vec![n.clone()]));
        let basis = perp.basis();
        let mut gens: Vec<Multivector> = Vec::new();
        for b in &basis {
            gens.push(to_first_copy(&Multivector::from_vector(b)));
            gens.push(to_second_copy(&Multivector::from_vector(b)));
        }
        let amask = rng.gen_range(0..(1u32 << (2 * r)));
        let bmask = rng.gen_range(0..(1u32 << gens.len()));
        let a = Multivector::from_blade(2 * r, amask);
        let mut b = Multivector::one(2 * r);
        for (j, g) in gens.iter().enumerate() {
            if bmask & (1 << j) != 0 {
                b = wedge(&b, g);
            }
        }
        let kv = contract(&doubled_vector_blade(&n), &a);
        let lhs = crate::trqft::trace_at(&n, &wedge(&kv, &b));
        let rhs = trace(&wedge(&a, &b)).unwrap();
        match lhs {
            Ok(l) => adj_ok &= l == rhs,
            Err(_) => adj_ok = false,
        }
        adj_cases += 1;
    }
    out.push(check(
        "kappa-adjointness",
        adj_ok,
        format!("{adj_cases} random (a, b) pairs, primitive n, rank ≤ 3"),
    ));

    // Θ_n^□ is the contraction of Θ_0^□
    let mut theta_n_ok = true;
    for _ in 0..cases.min(100) {
        let r = rng.gen_range(1..=3usize);
        let n = random_primitive(&mut rng, r);
        let got = contract(&doubled_vector_blade(&n), &theta_box(2 * r));
        let perp = annihilator(&Sublattice::new(r, vec![n.clone()]));
        let mut top = Multivector::one(r);
        for row in perp.basis() {
            top = wedge(&top, &Multivector::from_vector(&row));
        }
        theta_n_ok &= got == box_map(&top).unwrap();
    }
    out.push(check(
        "theta-n-from-contraction",
        theta_n_ok,
        "Θ_n^□ = ι_{(n,0)∧(0,n)}(Θ_0^□), primitive n, rank ≤ 3".into(),
    ));

    // box-class coproduct on every box basis class, rank ≤ 3
    let mut sqcop_ok = true;
    for r in 1..=3usize {
        for i_mask in 0..(1u32 << r) {
            let rest = !i_mask & ((1u32 << r) - 1);
            let z = box_map(&Multivector::from_blade(r, i_mask)).unwrap();
            // terms of (z⊗1)·∨(1) inside the subalgebra: the split parts
            // range over J∖I and each side carries I along
            let mut terms = Vec::new();
            let mut sub = rest;
            loop {
                let i1 = sub;
                let i2 = rest & !i1;
                terms.push((
                    box_map(&Multivector::from_blade(r, i_mask | i1)).unwrap(),
                    box_map(&Multivector::from_blade(r, i_mask | i2)).unwrap(),
                ));
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            // defining property against every box basis class
            for a_mask in 0..(1u32 << r) {
                let a = box_map(&Multivector::from_blade(r, a_mask)).unwrap();
                let mut lhs = Multivector::zero(2 * r);
                for (x, y) in &terms {
                    let t = trace(&wedge(&a, x)).unwrap();
                    lhs = lhs.add(&y.scale(&t));
                }
                sqcop_ok &= lhs == wedge(&a, &z);
            }
        }
    }
    out.push(check(
        "box-class-coproduct",
        sqcop_ok,
        "∨(e_I^□) = Σ_{I1⊔I2=J∖I} e_{I∪I1}^□⊗e_{I∪I2}^□ satisfies the defining equation".into(),
    ));
    out
}

/// BV structure: δ² = 0, the seven-term identity, the derivation-failure
/// identity with −Schouten (and its failure with +Schouten), and the
/// geometric Δ against the signed ℓ₁.
pub fn bv_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut sq_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let a = random_homogeneous_monomial(&mut rng, r);
        sq_ok &= bv_delta(&bv_delta(&a)).is_zero();
    }
    out.push(check(
        "l1-squares-to-zero",
        sq_ok,
        format!("{cases} random monomials"),
    ));

    let mut seven_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let a = random_homogeneous_monomial(&mut rng, r);
        let b = random_homogeneous_monomial(&mut rng, r);
        let c = random_homogeneous_monomial(&mut rng, r);
        seven_ok &= seven_term_check(&a, &b, &c).unwrap();
    }
    out.push(check(
        "seven-term-identity",
        seven_ok,
        format!("{cases} random triples"),
    ));

    let mut df_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let a = random_homogeneous_monomial(&mut rng, r);
        let b = random_homogeneous_monomial(&mut rng, r);
        df_ok &= derivation_failure_check(&a, &b, -1).unwrap();
    }
    // the pinned witness where the +Schouten reading fails
    let a = PolyvectorField::monomial(
        IntVector::from_i64(&[1, 0, 0]),
        Multivector::from_blade(3, 0b001),
    );
    let b = PolyvectorField::monomial(
        IntVector::from_i64(&[0, 1, 0]),
        Multivector::from_blade(3, 0b001),
    );
    df_ok &= derivation_failure_check(&a, &b, -1).unwrap();
    let plus_fails = !derivation_failure_check(&a, &b, 1).unwrap();
    out.push(check(
        "derivation-failure-minus-schouten",
        df_ok,
        format!("{cases} random pairs plus the pinned witness"),
    ));
    out.push(check(
        "derivation-failure-plus-schouten-fails",
        plus_fails,
        "sign regression guard on the pinned witness".into(),
    ));

    let mut geom_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let omega = Multivector::from_blade(r, ((1u32 << r) - 1) as u32);
        let a = random_homogeneous_monomial(&mut rng, r);
        let d = a.degree().unwrap();
        let lhs = geom_delta(&a, &omega).unwrap();
        let mut rhs = bv_delta(&a);
        if (d + 1) % 2 == 1 {
            rhs = rhs.neg();
        }
        geom_ok &= lhs == rhs;
    }
    out.push(check(
        "geometric-delta-is-signed-l1",
        geom_ok,
        format!("Δ = (−1)^(deg+1)·l1 on {cases} random monomials"),
    ));
    out
}

/// L∞ structure: graded skew symmetry, every D_ij vanishing on A₀ for
/// k ≤ 4, a pinned non-A₀ witness with a nonzero Jacobi sum, and closure of
/// A₀ under the brackets.
pub fn linfty_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut skew_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let k = rng.gen_range(1..=4usize);
        let args: Vec<PolyvectorField> = (0..k)
            .map(|_| random_homogeneous_monomial(&mut rng, r))
            .collect();
        let degrees: Vec<usize> = args.iter().map(|a| a.degree().unwrap()).collect();
        let mut perm: Vec<usize> = (0..k).collect();
        for i in (1..k).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let permuted: Vec<PolyvectorField> = perm.iter().map(|&p| args[p].clone()).collect();
        let chi = crate::polyvector::chi_sign(&perm, &degrees);
        let lhs = l_k(&permuted);
        let rhs = if chi < 0 {
            l_k(&args).neg()
        } else {
            l_k(&args)
        };
        skew_ok &= lhs == rhs;
    }
    out.push(check(
        "graded-skew-symmetry",
        skew_ok,
        format!("{cases} random tuples, k ≤ 4"),
    ));

    let mut dij_ok = true;
    let mut dij_cases = 0usize;
    while dij_cases < cases {
        let r = rng.gen_range(2..=3usize);
        let k = rng.gen_range(1..=4usize);
        let args: Vec<PolyvectorField> = (0..k).map(|_| random_a0_monomial(&mut rng, r)).collect();
        if args.iter().any(|a| a.is_zero()) {
            continue;
        }
        for i in 1..=k {
            let j = k + 1 - i;
            dij_ok &= d_ij(i, j, &args).unwrap().is_zero();
        }
        dij_cases += 1;
    }
    out.push(check(
        "jacobi-dij-vanish-on-a0",
        dij_ok,
        format!("{dij_cases} random A₀ tuples, k ≤ 4"),
    ));

    // pinned witness: off A₀ the level-2 Jacobi sum is nonzero
    let a = PolyvectorField::monomial(
        IntVector::from_i64(&[1, 0, 0]),
        Multivector::from_blade(3, 0b001),
    );
    let b = PolyvectorField::monomial(
        IntVector::from_i64(&[0, 1, 0]),
        Multivector::from_blade(3, 0b011),
    );
    let witness_ok = !in_a0(&a) && !jacobi_sum(&[a, b]).unwrap().is_zero();
    out.push(check(
        "jacobi-fails-off-a0",
        witness_ok,
        "pinned witness with nonzero level-2 Jacobi sum".into(),
    ));

    let mut closure_ok = true;
    for _ in 0..cases.min(300) {
        let r = rng.gen_range(2..=3usize);
        let k = rng.gen_range(1..=3usize);
        let args: Vec<PolyvectorField> = (0..k).map(|_| random_a0_monomial(&mut rng, r)).collect();
        closure_ok &= in_a0(&l_k(&args));
    }
    out.push(check(
        "a0-closed-under-brackets",
        closure_ok,
        "l_k(A₀,…,A₀) ⊆ A₀".into(),
    ));
    out
}

/// Schouten bracket: agreement with l₂ on A₀ (exhaustive grid in rank 2,
/// sampled in rank 3), the classical Lie bracket on vector fields, graded
/// antisymmetry, and the graded Jacobi identity.
pub fn schouten_suite(seed: u64, cases: usize) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // exhaustive monomial grid, rank 2, exponents in {−2..2}²
    let mut grid_ok = true;
    let mut grid_pairs = 0usize;
    let mut a0_monomials = Vec::new();
    for x in -2i64..=2 {
        for y in -2i64..=2 {
            let n = IntVector::from_i64(&[x, y]);
            for blade in 0..4u32 {
                let alpha = Multivector::from_blade(2, blade);
                if contract_vector(&n, &alpha).is_zero() {
                    a0_monomials.push(PolyvectorField::monomial(n.clone(), alpha));
                }
            }
        }
    }
    for a in &a0_monomials {
        for b in &a0_monomials {
            grid_ok &= l_k(&[a.clone(), b.clone()]) == schouten(a, b);
            grid_pairs += 1;
        }
    }
    // sampled rank-3 pairs
    for _ in 0..cases.min(500) {
        let a = random_a0_monomial(&mut rng, 3);
        let b = random_a0_monomial(&mut rng, 3);
        grid_ok &= l_k(&[a.clone(), b.clone()]) == schouten(&a, &b);
        grid_pairs += 1;
    }
    out.push(check(
        "l2-equals-schouten-on-a0",
        grid_ok,
        format!("{grid_pairs} pairs (exhaustive rank-2 grid + rank-3 samples)"),
    ));

    let mut lie_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let rand_vec = |rng: &mut ChaCha8Rng| {
            IntVector::new(
                (0..r)
                    .map(|_| BigInt::from(rng.gen_range(-2i64..=2)))
                    .collect(),
            )
        };
        let (n1, n2, m1, m2) = (
            rand_vec(&mut rng),
            rand_vec(&mut rng),
            rand_vec(&mut rng),
            rand_vec(&mut rng),
        );
        let a = PolyvectorField::monomial(n1.clone(), Multivector::from_vector(&m1));
        let b = PolyvectorField::monomial(n2.clone(), Multivector::from_vector(&m2));
        let mut expect = PolyvectorField::zero(r);
        expect.add_term(
            n1.add(&n2),
            Multivector::from_vector(&m2).scale(&n2.dot(&m1)),
        );
        expect.add_term(
            n1.add(&n2),
            Multivector::from_vector(&m1).scale(&-n1.dot(&m2)),
        );
        lie_ok &= schouten(&a, &b) == expect;
    }
    out.push(check(
        "classical-lie-bracket",
        lie_ok,
        format!("{cases} vector-field pairs"),
    ));

    let mut anti_ok = true;
    let mut jacobi_ok = true;
    for _ in 0..cases {
        let r = rng.gen_range(1..=3usize);
        let a = random_homogeneous_monomial(&mut rng, r);
        let b = random_homogeneous_monomial(&mut rng, r);
        let c = random_homogeneous_monomial(&mut rng, r);
        let sa = a.degree().unwrap() as i64 - 1;
        let sb = b.degree().unwrap() as i64 - 1;
        let sc = c.degree().unwrap() as i64 - 1;
        let sgn = |e: i64, f: PolyvectorField| if e.rem_euclid(2) == 1 { f.neg() } else { f };
        let mut rhs = schouten(&b, &a).neg();
        if (sa * sb).rem_euclid(2) == 1 {
            rhs = rhs.neg();
        }
        anti_ok &= schouten(&a, &b) == rhs;
        let total = sgn(sa * sc, schouten(&a, &schouten(&b, &c)))
            .add(&sgn(sb * sa, schouten(&b, &schouten(&c, &a))))
            .add(&sgn(sc * sb, schouten(&c, &schouten(&a, &b))));
        jacobi_ok &= total.is_zero();
    }
    out.push(check(
        "graded-antisymmetry",
        anti_ok,
        format!("{cases} random pairs"),
    ));
    out.push(check(
        "gerstenhaber-jacobi",
        jacobi_ok,
        format!("{cases} random triples"),
    ));
    out
}

pub fn run_suite(name: &str, seed: u64, cases: usize) -> crate::Result<Vec<CheckResult>> {
    match name {
        "frobenius" => Ok(frobenius_suite(seed, cases)),
        "bv" => Ok(bv_suite(seed, cases)),
        "linfty" => Ok(linfty_suite(seed, cases)),
        "schouten" => Ok(schouten_suite(seed, cases)),
        "all" => {
            let mut out = frobenius_suite(seed, cases);
            out.extend(bv_suite(seed, cases));
            out.extend(linfty_suite(seed, cases));
            out.extend(schouten_suite(seed, cases));
            Ok(out)
        }
        other => Err(crate::Error::Precondition(format!(
            "unknown suite {other:?}"
        ))),
    }
}

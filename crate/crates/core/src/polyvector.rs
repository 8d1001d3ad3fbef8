//! The algebra ℤ[N]⊗Λ*M of integral polyvector fields on the dual torus,
//! with the k-brackets obtained by multiplying and then contracting with the
//! total exponent, their sign-modified versions, the Schouten–Nijenhuis
//! bracket, the BV operator, and executable identity checks (seven-term,
//! derivation failure, graded skew symmetry, L∞ Jacobi sums).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exterior::{contract, contract_vector, wedge, Multivector};
use crate::lattice::IntVector;
use crate::{Error, Result};

/// Finite integer combination of monomials z^n⊗α, keyed by exponent n ∈ N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyvectorField {
    rank: usize,
    terms: BTreeMap<IntVector, Multivector>,
}

impl PolyvectorField {
    pub fn zero(rank: usize) -> Self {
        PolyvectorField {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(n: IntVector, alpha: Multivector) -> Self {
        assert_eq!(n.rank(), alpha.rank(), "exponent and form rank mismatch");
        let mut p = Self::zero(n.rank());
        p.add_term(n, alpha);
        p
    }

    /// z^n with coefficient 1.
    pub fn exponential(n: IntVector) -> Self {
        let rank = n.rank();
        Self::monomial(n, Multivector::one(rank))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&IntVector, &Multivector)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, n: IntVector, alpha: Multivector) {
        if alpha.is_zero() {
            return;
        }
        match self.terms.get_mut(&n) {
            Some(existing) => {
                let sum = existing.add(&alpha);
                if sum.is_zero() {
                    self.terms.remove(&n);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(n, alpha);
            }
        }
    }

    pub fn add(&self, other: &PolyvectorField) -> PolyvectorField {
        assert_eq!(self.rank, other.rank);
        let mut out = self.clone();
        for (n, a) in &other.terms {
            out.add_term(n.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, other: &PolyvectorField) -> PolyvectorField {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyvectorField {
        let mut out = PolyvectorField::zero(self.rank);
        for (n, a) in &self.terms {
            out.add_term(n.clone(), a.neg());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> PolyvectorField {
        let mut out = PolyvectorField::zero(self.rank);
        for (n, a) in &self.terms {
            out.add_term(n.clone(), a.scale(k));
        }
        out
    }

    /// Uniform form-degree of all monomials, when there is one.
    pub fn degree(&self) -> Option<usize> {
        let mut deg = None;
        for a in self.terms.values() {
            let d = a.degree()?;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return None,
                _ => {}
            }
        }
        deg
    }

    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.degree().is_some()
    }

    /// Split into form-degree-homogeneous parts, ascending by degree.
    pub fn homogeneous_parts(&self) -> Vec<(usize, PolyvectorField)> {
        let mut by_deg: BTreeMap<usize, PolyvectorField> = BTreeMap::new();
        for (n, a) in &self.terms {
            for (&blade, c) in a.terms() {
                let d = blade.count_ones() as usize;
                let entry = by_deg
                    .entry(d)
                    .or_insert_with(|| PolyvectorField::zero(self.rank));
                let mut m = Multivector::zero(self.rank);
                m.add_term(blade, c.clone());
                entry.add_term(n.clone(), m);
            }
        }
        by_deg.into_iter().collect()
    }
}

/// Graded-commutative product: (z^{n1}α)·(z^{n2}β) = z^{n1+n2} α∧β.
pub fn multiply(a: &PolyvectorField, b: &PolyvectorField) -> PolyvectorField {
    assert_eq!(a.rank(), b.rank(), "rank mismatch");
    let mut out = PolyvectorField::zero(a.rank());
    for (n1, alpha) in a.terms() {
        for (n2, beta) in b.terms() {
            out.add_term(n1.add(n2), wedge(alpha, beta));
        }
    }
    out
}

/// ℓ₁(z^n α) = z^n ι_n(α).
pub fn ell_1(a: &PolyvectorField) -> PolyvectorField {
    let mut out = PolyvectorField::zero(a.rank());
    for (n, alpha) in a.terms() {
        out.add_term(n.clone(), contract_vector(n, alpha));
    }
    out
}

/// ℓ_k = ℓ₁ after multiplying the arguments out; on monomials this is
/// z^{Σn} ι_{Σn}(α₁∧⋯∧α_k).
pub fn ell_k(args: &[PolyvectorField]) -> PolyvectorField {
    assert!(!args.is_empty(), "ell_k needs k ≥ 1");
    let mut prod = args[0].clone();
    for a in &args[1..] {
        prod = multiply(&prod, a);
    }
    ell_1(&prod)
}

/// A₀ membership: the kernel of ℓ₁. Because ℓ₁ preserves exponents, a sum
/// lies in A₀ iff each monomial does, and this is the whole check.
pub fn in_a0(a: &PolyvectorField) -> bool {
    ell_1(a).is_zero()
}

/// ε(ζ₁,…,ζ_k) = (−1)^{Σ (k−i)|ζ_i|} on shifted degrees |ζ| = deg(ζ) − 1.
pub fn epsilon_sign(degrees: &[usize]) -> i8 {
    let k = degrees.len();
    let mut exp: i64 = 0;
    for (i, &d) in degrees.iter().enumerate() {
        let shifted = d as i64 - 1;
        exp += (k - 1 - i) as i64 * shifted;
    }
    if exp.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Graded signature χ(σ; ζ₁,…,ζ_k): ordinary sign of σ times a Koszul factor
/// (−1)^{|ζ_a||ζ_b|} for every inversion. `perm[p]` is the (0-based) index
/// σ(p+1)−1 of the element placed at position p.
pub fn chi_sign(perm: &[usize], degrees: &[usize]) -> i8 {
    let k = perm.len();
    assert_eq!(k, degrees.len());
    let mut sign: i64 = 1;
    for p in 0..k {
        for q in p + 1..k {
            if perm[p] > perm[q] {
                sign = -sign;
                let sa = degrees[perm[p]] as i64 - 1;
                let sb = degrees[perm[q]] as i64 - 1;
                if (sa * sb).rem_euclid(2) == 1 {
                    sign = -sign;
                }
            }
        }
    }
    sign as i8
}

/// Sign-modified bracket l_k = ε·ℓ_k on homogeneous tuples, extended
/// multilinearly over decompositions into homogeneous parts.
pub fn l_k(args: &[PolyvectorField]) -> PolyvectorField {
    assert!(!args.is_empty(), "l_k needs k ≥ 1");
    let rank = args[0].rank();
    if args.iter().any(|a| a.is_zero()) {
        return PolyvectorField::zero(rank);
    }
    let parts: Vec<Vec<(usize, PolyvectorField)>> =
        args.iter().map(|a| a.homogeneous_parts()).collect();
    let mut out = PolyvectorField::zero(rank);
    let mut idx = vec![0usize; args.len()];
    'outer: loop {
        let degrees: Vec<usize> = idx
            .iter()
            .enumerate()
            .map(|(i, &j)| parts[i][j].0)
            .collect();
        let fields: Vec<PolyvectorField> = idx
            .iter()
            .enumerate()
            .map(|(i, &j)| parts[i][j].1.clone())
            .collect();
        let eps = epsilon_sign(&degrees);
        let term = ell_k(&fields);
        out = if eps < 0 {
            out.sub(&term)
        } else {
            out.add(&term)
        };
        // advance the multi-index
        for i in 0..idx.len() {
            idx[i] += 1;
            if idx[i] < parts[i].len() {
                continue 'outer;
            }
            idx[i] = 0;
        }
        break;
    }
    out
}

/// Schouten–Nijenhuis bracket, bilinear extension of the closed form
/// [z^{n1}α, z^{n2}β] = (−1)^k z^{n1+n2}(ι_{n2}(α)∧β + (−1)^{k+1} α∧ι_{n1}(β))
/// with k = deg(α) − 1.
pub fn schouten(a: &PolyvectorField, b: &PolyvectorField) -> PolyvectorField {
    assert_eq!(a.rank(), b.rank(), "rank mismatch");
    let mut out = PolyvectorField::zero(a.rank());
    for (n1, alpha_full) in a.terms() {
        for (&blade_a, ca) in alpha_full.terms() {
            let mut alpha = Multivector::zero(a.rank());
            alpha.add_term(blade_a, ca.clone());
            let k = blade_a.count_ones() as i64 - 1;
            for (n2, beta_full) in b.terms() {
                let first = wedge(&contract_vector(n2, &alpha), beta_full);
                let second = wedge(&alpha, &contract_vector(n1, beta_full));
                let mut inner = if k.rem_euclid(2) == 0 {
                    // (−1)^{k+1} = −1
                    first.sub(&second)
                } else {
                    first.add(&second)
                };
                if k.rem_euclid(2) == 1 {
                    inner = inner.neg();
                }
                out.add_term(n1.add(n2), inner);
            }
        }
    }
    out
}

/// The BV operator: δ = l₁ (= ℓ₁).
pub fn bv_delta(a: &PolyvectorField) -> PolyvectorField {
    ell_1(a)
}

/// Δ through the geometric route: transport to differential forms by ι_•Ω,
/// apply the exterior differential d(z^n⊗ξ) = z^n⊗(n∧ξ), transport back.
/// Ω must be a primitive top-degree element (a single full blade with
/// coefficient ±1).
pub fn geom_delta(a: &PolyvectorField, omega: &Multivector) -> Result<PolyvectorField> {
    use num_traits::Signed;
    let r = a.rank();
    let full: u32 = ((1u64 << r) - 1) as u32;
    if omega.rank() != r || omega.num_terms() != 1 || omega.coefficient(full).abs() != BigInt::one()
    {
        return Err(Error::Precondition(
            "Ω must be a primitive top-degree element".into(),
        ));
    }
    let omega_sign = if omega.coefficient(full) < BigInt::zero() {
        -1
    } else {
        1
    };
    let mut out = PolyvectorField::zero(r);
    for (n, w) in a.terms() {
        // ξ = ι_w Ω lives on the N side
        let xi = contract(w, omega);
        // dξ = n ∧ ξ
        let eta = wedge(&Multivector::from_vector(n), &xi);
        // solve ι_Δ Ω = η blade by blade: ι_{e_T} Ω = sign·e_{full∖T}
        let mut delta = Multivector::zero(r);
        for (&u, c) in eta.terms() {
            let t = full & !u;
            let s = crate::exterior::merge_sign(t, u) as i64 * omega_sign as i64;
            delta.add_term(t, c * BigInt::from(s));
        }
        out.add_term(n.clone(), delta);
    }
    Ok(out)
}

/// Seeded random elements for the identity suites.
pub mod sampling {
    use super::*;
    use rand::Rng;

    pub fn random_homogeneous_monomial(
        rng: &mut rand_chacha::ChaCha8Rng,
        r: usize,
    ) -> PolyvectorField {
        let n = IntVector::new(
            (0..r)
                .map(|_| BigInt::from(rng.gen_range(-2i64..=2)))
                .collect(),
        );
        let d = rng.gen_range(0..=r);
        let mut alpha = Multivector::zero(r);
        for b in 0..(1u32 << r) {
            if b.count_ones() as usize == d && rng.gen_bool(0.6) {
                alpha.add_term(b, BigInt::from(rng.gen_range(-2i64..=2)));
            }
        }
        if alpha.is_zero() {
            alpha.add_term(((1u32 << d) - 1) as u32, BigInt::one());
        }
        PolyvectorField::monomial(n, alpha)
    }

    /// z^n α with ι_n α = 0: α drawn from the annihilator of span(n).
    pub fn random_a0_monomial(rng: &mut rand_chacha::ChaCha8Rng, r: usize) -> PolyvectorField {
        let n = IntVector::new(
            (0..r)
                .map(|_| BigInt::from(rng.gen_range(-2i64..=2)))
                .collect(),
        );
        if n.is_zero() {
            // ι_0 kills everything: any homogeneous form works at exponent 0
            let d = rng.gen_range(0..=r);
            let mut alpha = Multivector::zero(r);
            for b in 0..(1u32 << r) {
                if b.count_ones() as usize == d && rng.gen_bool(0.6) {
                    alpha.add_term(b, BigInt::from(rng.gen_range(-2i64..=2)));
                }
            }
            if alpha.is_zero() {
                alpha.add_term(((1u32 << d) - 1) as u32, BigInt::one());
            }
            return PolyvectorField::monomial(n, alpha);
        }
        let ann = crate::lattice::annihilator(&crate::lattice::Sublattice::new(r, vec![n.clone()]));
        let basis = ann.basis();
        let d = rng.gen_range(0..=basis.len());
        let mut alpha = Multivector::scalar(r, BigInt::from(rng.gen_range(1i64..=2)));
        let mut picks: Vec<usize> = (0..basis.len()).collect();
        for i in (1..picks.len()).rev() {
            let j = rng.gen_range(0..=i);
            picks.swap(i, j);
        }
        for &p in picks.iter().take(d) {
            alpha = wedge(&alpha, &Multivector::from_vector(&basis[p]));
        }
        PolyvectorField::monomial(n, alpha)
    }
}

fn unshuffles(i: usize, k: usize) -> Vec<Vec<usize>> {
    // all permutations keeping 0..i and i..k in relative order, as the list
    // (sorted i-subset, sorted complement)
    fn subsets(
        from: usize,
        n: usize,
        size: usize,
        acc: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if acc.len() == size {
            let mut perm = acc.clone();
            for x in 0..n {
                if !acc.contains(&x) {
                    perm.push(x);
                }
            }
            out.push(perm);
            return;
        }
        for x in from..n {
            acc.push(x);
            subsets(x + 1, n, size, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    subsets(0, k, i, &mut Vec::new(), &mut out);
    out
}

/// D_ij = Σ_{σ∈UnShuff(i,j)} χ(σ)·(−1)^{i(k−i)}·l_j(l_i(ζ_{σ(1..i)}), ζ_{σ(i+1..k)})
/// with i + j = k + 1.
pub fn d_ij(i: usize, j: usize, args: &[PolyvectorField]) -> Result<PolyvectorField> {
    let k = args.len();
    if i + j != k + 1 || i < 1 || j < 1 {
        return Err(Error::Precondition(format!(
            "arity violation: i={i}, j={j} need i+j = k+1 with k={k}"
        )));
    }
    if k > 8 {
        return Err(Error::Precondition(
            "unshuffle enumeration capped at k = 8".into(),
        ));
    }
    let degrees: Vec<usize> = args
        .iter()
        .map(|a| {
            a.degree().ok_or_else(|| {
                Error::Precondition("D_ij needs degree-homogeneous arguments".into())
            })
        })
        .collect::<Result<_>>()?;
    let rank = args[0].rank();
    let mut out = PolyvectorField::zero(rank);
    let outer_sign = if (i * (k - i)) % 2 == 0 { 1i8 } else { -1 };
    for sigma in unshuffles(i, k) {
        let chi = chi_sign(&sigma, &degrees);
        let inner: Vec<PolyvectorField> = sigma[..i].iter().map(|&p| args[p].clone()).collect();
        let mut rest: Vec<PolyvectorField> = vec![l_k(&inner)];
        rest.extend(sigma[i..].iter().map(|&p| args[p].clone()));
        let term = l_k(&rest);
        let sign = chi as i64 * outer_sign as i64;
        out = if sign < 0 {
            out.sub(&term)
        } else {
            out.add(&term)
        };
    }
    Ok(out)
}

/// Σ_{i+j=k+1} D_ij — the level-k Jacobi expression; zero on A₀.
pub fn jacobi_sum(args: &[PolyvectorField]) -> Result<PolyvectorField> {
    let k = args.len();
    let rank = args[0].rank();
    let mut out = PolyvectorField::zero(rank);
    for i in 1..=k {
        let j = k + 1 - i;
        out = out.add(&d_ij(i, j, args)?);
    }
    Ok(out)
}

/// Seven-term BV identity for δ = l₁ on homogeneous a, b, c:
/// δ(abc) = δ(ab)c + (−1)^{deg a} a δ(bc) + (−1)^{deg b(deg a+1)} b δ(ac)
///          − δ(a)bc − (−1)^{deg a} a δ(b)c − (−1)^{deg a + deg b} ab δ(c).
pub fn seven_term_check(
    a: &PolyvectorField,
    b: &PolyvectorField,
    c: &PolyvectorField,
) -> Result<bool> {
    let (da, db) = match (a.degree(), b.degree(), c.degree()) {
        (Some(da), Some(db), Some(_)) => (da, db),
        _ => {
            if a.is_zero() || b.is_zero() || c.is_zero() {
                return Ok(true);
            }
            return Err(Error::Precondition(
                "seven-term check needs homogeneous inputs".into(),
            ));
        }
    };
    let delta = bv_delta;
    let sgn = |e: usize, f: PolyvectorField| if e % 2 == 1 { f.neg() } else { f };
    let lhs = delta(&multiply(&multiply(a, b), c));
    let t1 = multiply(&delta(&multiply(a, b)), c);
    let t2 = sgn(da, multiply(a, &delta(&multiply(b, c))));
    let t3 = sgn(db * (da + 1), multiply(b, &delta(&multiply(a, c))));
    let t4 = multiply(&multiply(&delta(a), b), c);
    let t5 = sgn(da, multiply(&multiply(a, &delta(b)), c));
    let t6 = sgn(da + db, multiply(&multiply(a, b), &delta(c)));
    let rhs = t1.add(&t2).add(&t3).sub(&t4).sub(&t5).sub(&t6);
    Ok(lhs == rhs)
}

/// The derivation-failure identity
/// [a,b] = (−1)^{deg a} δ(ab) − (−1)^{deg a} δ(a)b − a δ(b)
/// holds with the bracket −schouten; `bracket_sign` +1 tests the (wrong)
/// +schouten reading and is expected to fail on suitable witnesses.
pub fn derivation_failure_check(
    a: &PolyvectorField,
    b: &PolyvectorField,
    bracket_sign: i8,
) -> Result<bool> {
    let da = match a.degree() {
        Some(d) => d,
        None if a.is_zero() || b.is_zero() => return Ok(true),
        None => {
            return Err(Error::Precondition(
                "derivation-failure check needs homogeneous inputs".into(),
            ))
        }
    };
    let delta = bv_delta;
    let sgn = |e: usize, f: PolyvectorField| if e % 2 == 1 { f.neg() } else { f };
    let mut bracket = schouten(a, b);
    if bracket_sign < 0 {
        bracket = bracket.neg();
    }
    let rhs = sgn(da, delta(&multiply(a, b)))
        .sub(&sgn(da, multiply(&delta(a), b)))
        .sub(&multiply(a, &delta(b)));
    Ok(bracket == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn zn(n: &[i64], blade_bits: &[u32]) -> PolyvectorField {
        let mut blade = 0u32;
        for &b in blade_bits {
            blade |= 1 << b;
        }
        PolyvectorField::monomial(
            IntVector::from_i64(n),
            Multivector::from_blade(n.len(), blade),
        )
    }

    #[test]
    fn multiply_examples() {
        // z^{(1,0)}e1* · z^{(0,1)}e2* = z^{(1,1)} e1*∧e2*
        let a = zn(&[1, 0], &[0]);
        let b = zn(&[0, 1], &[1]);
        assert_eq!(multiply(&a, &b), zn(&[1, 1], &[0, 1]));
        // odd·odd anticommute
        assert_eq!(multiply(&b, &a), zn(&[1, 1], &[0, 1]).neg());
        // z^n · z^{−n} = z^0
        let p = PolyvectorField::exponential(IntVector::from_i64(&[2, -1]));
        let q = PolyvectorField::exponential(IntVector::from_i64(&[-2, 1]));
        assert_eq!(
            multiply(&p, &q),
            PolyvectorField::exponential(IntVector::from_i64(&[0, 0]))
        );
    }

    #[test]
    fn ell_examples() {
        // ℓ₁(z^{(1,0)} e1*∧e2*) = z^{(1,0)} e2*
        let a = zn(&[1, 0], &[0, 1]);
        assert_eq!(ell_1(&a), zn(&[1, 0], &[1]));
        // ι_0 kills everything with zero exponent
        let b = zn(&[0, 0], &[0, 1]);
        assert!(ell_1(&b).is_zero());
        // l_1 = ℓ_1
        assert_eq!(l_k(&[a.clone()]), ell_1(&a));
    }

    #[test]
    fn ell_2_matches_skew_form_propagation() {
        // ω = standard symplectic form: ω(n, ·) as a covector
        let omega = |n: &IntVector| -> Multivector {
            let mut m = Multivector::zero(2);
            m.add_term(0b10, n.coords[0].clone()); // x·e2*
            m.add_term(0b01, -n.coords[1].clone()); // −y·e1*
            m
        };
        let pair = |n1: &IntVector, n2: &IntVector| -> BigInt {
            &n1.coords[0] * &n2.coords[1] - &n1.coords[1] * &n2.coords[0]
        };
        for (n1, n2) in [([1i64, 0], [0i64, 1]), ([2, 1], [1, -1]), ([1, 2], [3, 1])] {
            let n1 = IntVector::from_i64(&n1);
            let n2 = IntVector::from_i64(&n2);
            let z1 = PolyvectorField::monomial(n1.clone(), omega(&n1));
            let z2 = PolyvectorField::monomial(n2.clone(), omega(&n2));
            let out = ell_k(&[z1, z2]);
            let n3 = n1.add(&n2);
            let expect = PolyvectorField::monomial(n3.clone(), omega(&n3)).scale(&pair(&n1, &n2));
            assert_eq!(out, expect);
        }
    }

    #[test]
    fn sign_examples() {
        // two elements of degree 1 (shifted degree 0): ε = +1
        assert_eq!(epsilon_sign(&[1, 1]), 1);
        // transposing two degree-1 elements: χ = −1
        assert_eq!(chi_sign(&[1, 0], &[1, 1]), -1);
        assert_eq!(chi_sign(&[0, 1], &[1, 1]), 1);
        // degree law: |l_k| = Σ|ζ| + (k−2) — degrees 1,1,1 in rank 3 give
        // deg(out) = 2
        let a = zn(&[1, 0, 0], &[0]);
        let b = zn(&[0, 1, 0], &[1]);
        let c = zn(&[1, 1, 0], &[2]);
        let out = l_k(&[a, b, c]);
        assert_eq!(out.degree(), Some(2));
    }

    #[test]
    fn graded_skew_symmetry() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(19);
        for _ in 0..200 {
            let r = rng.gen_range(1..=3usize);
            let k = rng.gen_range(1..=4usize);
            let args: Vec<PolyvectorField> = (0..k)
                .map(|_| random_homogeneous_monomial(&mut rng, r))
                .collect();
            let degrees: Vec<usize> = args.iter().map(|a| a.degree().unwrap()).collect();
            // random permutation
            let mut perm: Vec<usize> = (0..k).collect();
            for i in (1..k).rev() {
                let j = rng.gen_range(0..=i);
                perm.swap(i, j);
            }
            let permuted: Vec<PolyvectorField> = perm.iter().map(|&p| args[p].clone()).collect();
            let chi = chi_sign(&perm, &degrees);
            let lhs = l_k(&permuted);
            let rhs = if chi < 0 {
                l_k(&args).neg()
            } else {
                l_k(&args)
            };
            assert_eq!(lhs, rhs);
        }
    }

    use super::sampling::{random_a0_monomial, random_homogeneous_monomial};

    #[test]
    fn schouten_usual_lie_bracket() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(37);
        for _ in 0..100 {
            let r = rng.gen_range(1..=3usize);
            let n1 = IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect());
            let n2 = IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect());
            let m1 = IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect());
            let m2 = IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect());
            let a = PolyvectorField::monomial(n1.clone(), Multivector::from_vector(&m1));
            let b = PolyvectorField::monomial(n2.clone(), Multivector::from_vector(&m2));
            // [z^{n1}m1, z^{n2}m2] = z^{n1+n2}(⟨n2,m1⟩m2 − ⟨n1,m2⟩m1)
            let mut expect = PolyvectorField::zero(r);
            let c1 = n2.dot(&m1);
            let c2 = n1.dot(&m2);
            expect.add_term(n1.add(&n2), Multivector::from_vector(&m2).scale(&c1));
            expect.add_term(n1.add(&n2), Multivector::from_vector(&m1).scale(&-c2));
            assert_eq!(schouten(&a, &b), expect);
        }
    }

    #[test]
    fn schouten_basic_properties() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let r = rng.gen_range(1..=3usize);
            let a = random_homogeneous_monomial(&mut rng, r);
            let b = random_homogeneous_monomial(&mut rng, r);
            // function-free forms commute to zero
            let zero_n = IntVector::zero(r);
            let af = PolyvectorField::monomial(zero_n.clone(), a.terms().next().unwrap().1.clone());
            let bf = PolyvectorField::monomial(zero_n.clone(), b.terms().next().unwrap().1.clone());
            assert!(schouten(&af, &bf).is_zero());
            // antisymmetry with the shifted-degree sign
            let da = a.degree().unwrap() as i64 - 1;
            let db = b.degree().unwrap() as i64 - 1;
            let lhs = schouten(&a, &b);
            let mut rhs = schouten(&b, &a).neg();
            if (da * db).rem_euclid(2) == 1 {
                rhs = rhs.neg();
            }
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn schouten_matches_recursive_definition_on_decomposables() {
        // oracle: [a_0⋯a_k, b_0⋯b_l] = Σ (−1)^{i+j}[a_i,b_j]·a…â…b…b̂…
        // with the usual Lie bracket on degree-1 factors, rank ≤ 3
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(59);
        let lie = |n1: &IntVector, m1: &IntVector, n2: &IntVector, m2: &IntVector| {
            let r = n1.rank();
            let mut out = PolyvectorField::zero(r);
            out.add_term(n1.add(n2), Multivector::from_vector(m2).scale(&n2.dot(m1)));
            out.add_term(n1.add(n2), Multivector::from_vector(m1).scale(&-n1.dot(m2)));
            out
        };
        for _ in 0..60 {
            let r = rng.gen_range(2..=3usize);
            let ka = rng.gen_range(1..=2usize);
            let kb = rng.gen_range(1..=2usize);
            let rand_vec = |rng: &mut rand_chacha::ChaCha8Rng| {
                IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect())
            };
            let n1 = rand_vec(&mut rng);
            let n2 = rand_vec(&mut rng);
            let avs: Vec<IntVector> = (0..ka).map(|_| rand_vec(&mut rng)).collect();
            let bvs: Vec<IntVector> = (0..kb).map(|_| rand_vec(&mut rng)).collect();
            // a = z^{n1} a_0∧…, factors as vector fields z^{n1}a_0, a_1, …
            let mut a_form = Multivector::one(r);
            for v in &avs {
                a_form = wedge(&a_form, &Multivector::from_vector(v));
            }
            let mut b_form = Multivector::one(r);
            for v in &bvs {
                b_form = wedge(&b_form, &Multivector::from_vector(v));
            }
            let a = PolyvectorField::monomial(n1.clone(), a_form);
            let b = PolyvectorField::monomial(n2.clone(), b_form);

            // recursive oracle: factor i of a carries z^{n1} when i = 0
            let mut oracle = PolyvectorField::zero(r);
            for i in 0..ka {
                for j in 0..kb {
                    let (ni, mi) = if i == 0 {
                        (n1.clone(), avs[0].clone())
                    } else {
                        (IntVector::zero(r), avs[i].clone())
                    };
                    let (nj, mj) = if j == 0 {
                        (n2.clone(), bvs[0].clone())
                    } else {
                        (IntVector::zero(r), bvs[j].clone())
                    };
                    let head = lie(&ni, &mi, &nj, &mj);
                    // remaining factors in order, a's then b's; z-exponents of
                    // the removed factors are already in `head`
                    let mut tail_form = Multivector::one(r);
                    for (p, v) in avs.iter().enumerate() {
                        if p != i {
                            tail_form = wedge(&tail_form, &Multivector::from_vector(v));
                        }
                    }
                    for (q, v) in bvs.iter().enumerate() {
                        if q != j {
                            tail_form = wedge(&tail_form, &Multivector::from_vector(v));
                        }
                    }
                    let mut tail_exp = IntVector::zero(r);
                    if i != 0 {
                        tail_exp = tail_exp.add(&n1);
                    }
                    if j != 0 {
                        tail_exp = tail_exp.add(&n2);
                    }
                    let tail = PolyvectorField::monomial(tail_exp, tail_form);
                    let term = multiply(&head, &tail);
                    let sign = (i + j) % 2 == 1;
                    oracle = if sign {
                        oracle.sub(&term)
                    } else {
                        oracle.add(&term)
                    };
                }
            }
            assert_eq!(schouten(&a, &b), oracle, "ka={ka} kb={kb}");
        }
    }

    #[test]
    fn bv_delta_squares_to_zero() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(61);
        for _ in 0..300 {
            let a = random_homogeneous_monomial(&mut rng, 3);
            assert!(bv_delta(&bv_delta(&a)).is_zero());
        }
        // z^0 α is killed outright
        let a = zn(&[0, 0], &[0, 1]);
        assert!(bv_delta(&a).is_zero());
    }

    #[test]
    fn geom_delta_matches_signed_l1() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(67);
        for _ in 0..300 {
            let r = rng.gen_range(1..=3usize);
            let omega = Multivector::from_blade(r, ((1u32 << r) - 1) as u32);
            let a = random_homogeneous_monomial(&mut rng, r);
            let d = a.degree().unwrap();
            let lhs = geom_delta(&a, &omega).unwrap();
            let mut rhs = bv_delta(&a);
            if (d + 1) % 2 == 1 {
                rhs = rhs.neg();
            }
            assert_eq!(lhs, rhs, "Δ = (−1)^{{deg+1}} l₁ at degree {d}");
            // and with the opposite orientation of Ω
            let lhs2 = geom_delta(&a, &omega.neg()).unwrap();
            assert_eq!(lhs2, lhs, "Δ is orientation-independent");
        }
    }

    #[test]
    fn seven_term_and_derivation_failure() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(71);
        for _ in 0..300 {
            let a = random_homogeneous_monomial(&mut rng, 3);
            let b = random_homogeneous_monomial(&mut rng, 3);
            let c = random_homogeneous_monomial(&mut rng, 3);
            assert!(seven_term_check(&a, &b, &c).unwrap());
            assert!(derivation_failure_check(&a, &b, -1).unwrap());
        }
        // degree-0 inputs: everything degenerates to zero on both sides
        let f = PolyvectorField::exponential(IntVector::from_i64(&[1, 0, 0]));
        assert!(seven_term_check(&f, &f, &f).unwrap());
        // pinned witness: +schouten fails the derivation-failure identity
        // (the bracket itself must be nonzero: [z^{n1}e1*, z^{n2}e1*] = −z^n e1*)
        let a = zn(&[1, 0, 0], &[0]);
        let b = zn(&[0, 1, 0], &[0]);
        assert!(derivation_failure_check(&a, &b, -1).unwrap());
        assert!(!derivation_failure_check(&a, &b, 1).unwrap());
    }

    #[test]
    fn schouten_graded_jacobi() {
        // (−1)^{|a||c|}[a,[b,c]] + (−1)^{|b||a|}[b,[c,a]] + (−1)^{|c||b|}[c,[a,b]] = 0
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(73);
        for _ in 0..200 {
            let a = random_homogeneous_monomial(&mut rng, 3);
            let b = random_homogeneous_monomial(&mut rng, 3);
            let c = random_homogeneous_monomial(&mut rng, 3);
            let sa = a.degree().unwrap() as i64 - 1;
            let sb = b.degree().unwrap() as i64 - 1;
            let sc = c.degree().unwrap() as i64 - 1;
            let sgn = |e: i64, f: PolyvectorField| {
                if e.rem_euclid(2) == 1 {
                    f.neg()
                } else {
                    f
                }
            };
            let total = sgn(sa * sc, schouten(&a, &schouten(&b, &c)))
                .add(&sgn(sb * sa, schouten(&b, &schouten(&c, &a))))
                .add(&sgn(sc * sb, schouten(&c, &schouten(&a, &b))));
            assert!(total.is_zero());
        }
    }

    #[test]
    fn jacobi_on_a0_and_off_a0() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(79);
        // D_11 = l1∘l1 = 0 everywhere
        for _ in 0..50 {
            let a = random_homogeneous_monomial(&mut rng, 3);
            assert!(d_ij(1, 1, &[a]).unwrap().is_zero());
        }
        // on A₀: every D_ij vanishes, k ≤ 4
        let mut found = 0;
        while found < 60 {
            let r = rng.gen_range(2..=3usize);
            let k = rng.gen_range(2..=4usize);
            let args: Vec<PolyvectorField> =
                (0..k).map(|_| random_a0_monomial(&mut rng, r)).collect();
            if args.iter().any(|a| a.is_zero()) {
                continue;
            }
            for i in 1..=k {
                let j = k + 1 - i;
                let d = d_ij(i, j, &args).unwrap();
                assert!(d.is_zero(), "D_{{{i}{j}}} ≠ 0 on A₀, k={k}");
            }
            found += 1;
        }
        // pinned witness off A₀: the level-2 Jacobi sum does not vanish
        let a = zn(&[1, 0, 0], &[0]); // ι_n α = 1 ≠ 0: not in A₀
        let b = zn(&[0, 1, 0], &[0, 1]);
        assert!(!in_a0(&a));
        let sum = jacobi_sum(&[a, b]).unwrap();
        assert!(
            !sum.is_zero(),
            "regression guard: Jacobi needs the A₀ restriction"
        );
    }

    #[test]
    fn a0_closure_under_brackets() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(83);
        for _ in 0..100 {
            let r = rng.gen_range(2..=3usize);
            let k = rng.gen_range(1..=3usize);
            let args: Vec<PolyvectorField> =
                (0..k).map(|_| random_a0_monomial(&mut rng, r)).collect();
            assert!(args.iter().all(in_a0));
            assert!(in_a0(&l_k(&args)));
            assert!(in_a0(&ell_k(&args)));
        }
    }

    #[test]
    fn l2_equals_schouten_on_a0_exhaustive_grid() {
        // exhaustive over A₀ monomial pairs, rank 2, exponents in {−2..2}²
        // plus a sampled rank-3 grid
        let r = 2usize;
        let mut a0_monomials = Vec::new();
        for x in -2i64..=2 {
            for y in -2i64..=2 {
                let n = IntVector::from_i64(&[x, y]);
                for blade in 0..(1u32 << r) {
                    let alpha = Multivector::from_blade(r, blade);
                    if contract_vector(&n, &alpha).is_zero() {
                        a0_monomials.push(PolyvectorField::monomial(n.clone(), alpha));
                    }
                }
            }
        }
        for a in &a0_monomials {
            for b in &a0_monomials {
                let lhs = l_k(&[a.clone(), b.clone()]);
                let rhs = schouten(a, b);
                assert_eq!(lhs, rhs, "l₂ = Schouten on A₀");
            }
        }
    }
}

//! Exact exterior algebra Λ*L over ℤ, blade-indexed.
//!
//! A blade is a subset of the ordered standard basis, encoded as a bitset
//! over positions 0..rank−1; a blade is the wedge of its generators in
//! increasing index order with coefficient +1, and every sign comes from
//! inversion counting against that convention.
//!
//! Doubled algebras Λ*(L⊕L) use the interleaved layout: generator i of L
//! sits at position 2i in the first copy and 2i+1 in the second. With this
//! layout the squaring map is local on blades and the canonical top element
//! Θ^□ is the all-ones blade with coefficient +1.
//!
//! Contraction ι_γ is defined through the adjunction ⟨ι_γ α, β⟩ = ⟨α, γ∧β⟩;
//! the contracting element lives on the dual side but is represented by the
//! same type.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::lattice::{annihilator, IntVector, Sublattice};
use crate::{rank_cap, Error, Result};

pub type Blade = u32;

/// Parity of the number of pairs (x, y) with x ∈ a, y ∈ b, x > y — the sign
/// of merging the sorted blade a in front of the sorted blade b.
pub fn merge_sign(a: Blade, b: Blade) -> i8 {
    let mut inv = 0u32;
    let mut bb = b;
    while bb != 0 {
        let y = bb.trailing_zeros();
        inv += (a >> (y + 1)).count_ones();
        bb &= bb - 1;
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// An exact-integer element of Λ*ℤ^rank. No zero coefficients are stored;
/// term iteration is in ascending blade order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multivector {
    rank: usize,
    terms: BTreeMap<Blade, BigInt>,
}

impl Multivector {
    pub fn zero(rank: usize) -> Self {
        assert!(rank <= 2 * rank_cap(), "exterior rank {} exceeds cap", rank);
        Multivector {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(rank: usize) -> Self {
        Self::scalar(rank, BigInt::one())
    }

    pub fn scalar(rank: usize, c: BigInt) -> Self {
        let mut m = Self::zero(rank);
        m.add_term(0, c);
        m
    }

    pub fn from_blade(rank: usize, blade: Blade) -> Self {
        let mut m = Self::zero(rank);
        assert!(blade < (1u32 << rank), "blade outside ambient rank");
        m.add_term(blade, BigInt::one());
        m
    }

    /// Degree-1 element with the given coordinates.
    pub fn from_vector(v: &IntVector) -> Self {
        let mut m = Self::zero(v.rank());
        for (i, c) in v.coords.iter().enumerate() {
            m.add_term(1 << i, c.clone());
        }
        m
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Blade, &BigInt)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, blade: Blade) -> BigInt {
        self.terms.get(&blade).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn add_term(&mut self, blade: Blade, c: BigInt) {
        if c.is_zero() {
            return;
        }
        debug_assert!(blade < (1u32 << self.rank) || self.rank == 32);
        let entry = self.terms.entry(blade).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&blade);
        }
    }

    pub fn add(&self, other: &Multivector) -> Multivector {
        assert_eq!(self.rank, other.rank, "rank mismatch");
        let mut out = self.clone();
        for (&b, c) in &other.terms {
            out.add_term(b, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Multivector) -> Multivector {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Multivector {
        let mut out = Multivector::zero(self.rank);
        for (&b, c) in &self.terms {
            out.add_term(b, -c.clone());
        }
        out
    }

    pub fn scale(&self, k: &BigInt) -> Multivector {
        let mut out = Multivector::zero(self.rank);
        for (&b, c) in &self.terms {
            out.add_term(b, c * k);
        }
        out
    }

    /// Some(degree) when homogeneous (the zero element is homogeneous of any
    /// degree and reports None).
    pub fn degree(&self) -> Option<usize> {
        let mut deg = None;
        for &b in self.terms.keys() {
            let d = b.count_ones() as usize;
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

    /// Parity (degree mod 2) of a parity-homogeneous element.
    pub fn parity(&self) -> Option<u8> {
        let mut par = None;
        for &b in self.terms.keys() {
            let p = (b.count_ones() % 2) as u8;
            match par {
                None => par = Some(p),
                Some(q) if q != p => return None,
                _ => {}
            }
        }
        par
    }

    /// gcd of the coefficients (0 for the zero element).
    pub fn content(&self) -> BigInt {
        use num_integer::Integer;
        let mut g = BigInt::zero();
        for c in self.terms.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Flip the overall sign so the first nonzero coefficient in blade order
    /// is positive.
    pub fn sign_normalized(&self) -> Multivector {
        match self.terms.values().next() {
            Some(c) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }
}

/// Exterior product. Bilinear; zero on overlapping blades; the sign on
/// disjoint blades is the parity of inversions between the index sets.
pub fn wedge(a: &Multivector, b: &Multivector) -> Multivector {
    assert_eq!(a.rank(), b.rank(), "rank mismatch in wedge");
    let mut out = Multivector::zero(a.rank());
    for (&s, cs) in &a.terms {
        for (&t, ct) in &b.terms {
            if s & t != 0 {
                continue;
            }
            let sign = merge_sign(s, t);
            let mut c = cs * ct;
            if sign < 0 {
                c = -c;
            }
            out.add_term(s | t, c);
        }
    }
    out
}

/// Contraction ι_γ(a) by an element γ of the dual algebra, defined by the
/// adjunction ⟨ι_γ a, β⟩ = ⟨a, γ∧β⟩. On blades: ι_{e_T}(e_S) is
/// merge_sign(T, S∖T)·e_{S∖T} when T ⊆ S and zero otherwise.
pub fn contract(gamma: &Multivector, a: &Multivector) -> Multivector {
    assert_eq!(gamma.rank(), a.rank(), "rank mismatch in contraction");
    let mut out = Multivector::zero(a.rank());
    for (&t, ct) in &gamma.terms {
        for (&s, cs) in &a.terms {
            if t & s != t {
                continue;
            }
            let rest = s & !t;
            let sign = merge_sign(t, rest);
            let mut c = ct * cs;
            if sign < 0 {
                c = -c;
            }
            out.add_term(rest, c);
        }
    }
    out
}

/// Contraction by a single vector of the dual lattice; an anti-derivation of
/// degree −1 with ι_n ∘ ι_n = 0.
pub fn contract_vector(n: &IntVector, a: &Multivector) -> Multivector {
    contract(&Multivector::from_vector(n), a)
}

/// Full dual pairing ⟨a, b⟩ = Σ_S a_S·b_S.
pub fn pairing(a: &Multivector, b: &Multivector) -> BigInt {
    assert_eq!(a.rank(), b.rank(), "rank mismatch in pairing");
    let mut total = BigInt::zero();
    for (&s, cs) in &a.terms {
        if let Some(ct) = b.terms.get(&s) {
            total += cs * ct;
        }
    }
    total
}

/// Embed Λ*L into the first copy inside Λ*(L⊕L): generator i ↦ position 2i.
pub fn to_first_copy(a: &Multivector) -> Multivector {
    spread(a, 0)
}

/// Embed Λ*L into the second copy inside Λ*(L⊕L): generator i ↦ 2i+1.
pub fn to_second_copy(a: &Multivector) -> Multivector {
    spread(a, 1)
}

fn spread(a: &Multivector, offset: u32) -> Multivector {
    let mut out = Multivector::zero(2 * a.rank());
    for (&s, c) in &a.terms {
        let mut t: Blade = 0;
        let mut ss = s;
        while ss != 0 {
            let i = ss.trailing_zeros();
            t |= 1 << (2 * i + offset);
            ss &= ss - 1;
        }
        // interleaving preserves relative order within one copy, so no sign
        out.add_term(t, c.clone());
    }
    out
}

/// The squaring map □: for homogeneous a of degree d, returns
/// (−1)^{d(d−1)/2}·(a,0)∧(0,a) in the doubled algebra of rank 2·rank(a);
/// scalars square. Only simple inputs occur in the multiplicity algorithms,
/// but the sign formula is applied to any homogeneous input.
pub fn box_map(a: &Multivector) -> Result<Multivector> {
    let Some(d) = a.degree() else {
        if a.is_zero() {
            return Ok(Multivector::zero(2 * a.rank()));
        }
        return Err(Error::Precondition(
            "box of a non-homogeneous element".into(),
        ));
    };
    let first = to_first_copy(a);
    let second = to_second_copy(a);
    let mut out = wedge(&first, &second);
    if (d * (d.saturating_sub(1)) / 2) % 2 == 1 {
        out = out.neg();
    }
    Ok(out)
}

/// The doubled degree-2 blade (n,0)∧(0,n) of a vector n, the contraction
/// kernel used when an edge of direction n is traversed.
pub fn doubled_vector_blade(n: &IntVector) -> Multivector {
    let one = Multivector::from_vector(n);
    wedge(&to_first_copy(&one), &to_second_copy(&one))
}

/// Canonical top element Θ^□ of a doubled algebra: the all-ones blade (the
/// interleaved layout makes its coefficient +1 for either sign of Θ).
pub fn theta_box(doubled_rank: usize) -> Multivector {
    assert!(doubled_rank % 2 == 0, "doubled rank must be even");
    Multivector::from_blade(doubled_rank, ((1u64 << doubled_rank) - 1) as Blade)
}

/// Frobenius trace of a doubled algebra: the coefficient of Θ^□.
pub fn trace(a: &Multivector) -> Result<BigInt> {
    if a.rank() % 2 != 0 {
        return Err(Error::Precondition(format!(
            "trace needs a doubled (even-rank) ambient, got rank {}",
            a.rank()
        )));
    }
    Ok(a.coefficient(((1u64 << a.rank()) - 1) as Blade))
}

/// Coproduct ∨(z) of a doubled algebra as an explicit term list. Computed as
/// (z⊗1)·∨(1) with ∨(1) = Σ_{I1⊔I2} (−1)^{sign(I2,I1)} e_{I1}⊗e_{I2} over all
/// decompositions of the generator set; zero left factors are dropped.
/// Satisfies Σ_i Tr(a∧x_i)·y_i = a∧z for every a.
pub fn coproduct(z: &Multivector) -> Result<Vec<(Multivector, Multivector)>> {
    let k = z.rank();
    if k % 2 != 0 {
        return Err(Error::Precondition(format!(
            "coproduct needs a doubled (even-rank) ambient, got rank {}",
            k
        )));
    }
    let full: Blade = ((1u64 << k) - 1) as Blade;
    let mut terms = Vec::new();
    for i1 in 0..=full {
        let i2 = full ^ i1;
        let sign = merge_sign(i2, i1);
        let mut x = wedge(z, &Multivector::from_blade(k, i1));
        if sign < 0 {
            x = x.neg();
        }
        if x.is_zero() {
            continue;
        }
        terms.push((x, Multivector::from_blade(k, i2)));
    }
    Ok(terms)
}

/// The index-`weight` form of degree codim(W) vanishing under ι_v for every
/// v ∈ W, with the sign fixed so the first nonzero coefficient in blade
/// order is positive. W must be saturated.
pub fn alpha_from_subspace(w: &Sublattice, weight: &BigInt) -> Result<Multivector> {
    if weight <= &BigInt::zero() {
        return Err(Error::Precondition("constraint weight must be ≥ 1".into()));
    }
    if !w.is_saturated() {
        return Err(Error::Precondition(
            "alpha_from_subspace needs a saturated subspace".into(),
        ));
    }
    let ann = annihilator(w);
    let mut alpha = Multivector::one(w.ambient_rank);
    for row in ann.basis() {
        alpha = wedge(&alpha, &Multivector::from_vector(&row));
    }
    Ok(alpha.sign_normalized().scale(weight))
}

/// Recover α (up to a global sign ε) from v = ε·box(α) for simple α.
/// Returns (ε, α) with α sign-normalized, or None when v is not plus or
/// minus the box of a simple element.
pub fn unbox(v: &Multivector) -> Option<(i8, Multivector)> {
    let doubled = v.rank();
    if doubled % 2 != 0 {
        return None;
    }
    let r = doubled / 2;
    let Some(deg2) = v.degree() else { return None };
    if deg2 % 2 != 0 {
        return None;
    }
    let d = deg2 / 2;

    // diagonal blades 2T ∪ (2T+1) of box(α) carry c_T²; the overall sign is
    // the shared sign of those coefficients
    let interleave = |t: Blade| -> Blade {
        let mut out = 0;
        let mut tt = t;
        while tt != 0 {
            let i = tt.trailing_zeros();
            out |= 0b11 << (2 * i);
            tt &= tt - 1;
        }
        out
    };
    let mut eps: i8 = 0;
    let mut lead: Option<Blade> = None;
    for t in 0..(1u32 << r) {
        if t.count_ones() as usize != d {
            continue;
        }
        let c = v.coefficient(interleave(t));
        if c.is_zero() {
            continue;
        }
        let s = if c.is_negative() { -1 } else { 1 };
        if eps == 0 {
            eps = s;
            lead = Some(t);
        } else if eps != s {
            return None;
        }
    }
    let (eps, t0) = match (eps, lead) {
        (e, Some(t)) if e != 0 => (e, t),
        _ => return None,
    };

    let sqrt_exact = |c: &BigInt| -> Option<BigInt> {
        let root = c.sqrt();
        if &(&root * &root) == c {
            Some(root)
        } else {
            None
        }
    };
    let c0 = sqrt_exact(&(v.coefficient(interleave(t0)) * BigInt::from(eps)))?;
    if c0.is_zero() {
        return None;
    }

    // cross blades 2T0 ∪ (2T+1) determine the remaining coefficients relative
    // to c_{T0} > 0
    let box_sign = if (d * d.saturating_sub(1) / 2) % 2 == 1 {
        -1
    } else {
        1
    };
    let mut alpha = Multivector::zero(r);
    alpha.add_term(t0, c0.clone());
    for t in 0..(1u32 << r) {
        if t == t0 || t.count_ones() as usize != d {
            continue;
        }
        let first = {
            let mut out = 0;
            let mut tt = t0;
            while tt != 0 {
                let i = tt.trailing_zeros();
                out |= 1 << (2 * i);
                tt &= tt - 1;
            }
            out
        };
        let second = {
            let mut out = 0;
            let mut tt = t;
            while tt != 0 {
                let i = tt.trailing_zeros();
                out |= 1 << (2 * i + 1);
                tt &= tt - 1;
            }
            out
        };
        if first & second != 0 {
            continue;
        }
        let m = merge_sign(first, second) as i64 * box_sign as i64 * eps as i64;
        let coeff = v.coefficient(first | second) * BigInt::from(m);
        // coeff = c_{T0}·c_T
        if (&coeff % &c0).is_zero() {
            alpha.add_term(t, coeff / &c0);
        } else {
            return None;
        }
    }
    // verify exactly
    let candidate = box_map(&alpha).ok()?;
    let candidate = if eps < 0 { candidate.neg() } else { candidate };
    if &candidate == v {
        Some((eps, alpha))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::saturate;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn e(rank: usize, bits: &[u32]) -> Multivector {
        let mut blade = 0;
        for &b in bits {
            blade |= 1 << b;
        }
        Multivector::from_blade(rank, blade)
    }

    #[test]
    fn wedge_rank2_examples() {
        let e1 = e(2, &[0]);
        let e2 = e(2, &[1]);
        assert_eq!(wedge(&e1, &e2), e(2, &[0, 1]));
        assert_eq!(wedge(&e2, &e1), e(2, &[0, 1]).neg());
        assert!(wedge(&e1, &e1).is_zero());
        // (e1+e2) ∧ (e1−e2) = −2·e12
        let a = e1.add(&e2);
        let b = e1.sub(&e2);
        assert_eq!(wedge(&a, &b), e(2, &[0, 1]).scale(&bi(-2)));
    }

    #[test]
    fn contraction_examples() {
        let e12 = e(2, &[0, 1]);
        assert_eq!(
            contract_vector(&IntVector::from_i64(&[1, 0]), &e12),
            e(2, &[1])
        );
        assert_eq!(
            contract_vector(&IntVector::from_i64(&[0, 1]), &e12),
            e(2, &[0]).neg()
        );
        let n = IntVector::from_i64(&[2, 3]);
        let once = contract_vector(&n, &e12);
        assert!(contract_vector(&n, &once).is_zero());
        // degree-0 contraction is scalar multiplication
        let one = Multivector::one(2);
        assert_eq!(contract(&one.scale(&bi(7)), &e12), e12.scale(&bi(7)));
    }

    #[test]
    fn theta_box_is_plus_one_on_all_generators() {
        for r in 1..=4usize {
            let full = ((1u64 << r) - 1) as Blade;
            let theta = Multivector::from_blade(r, full);
            assert_eq!(box_map(&theta).unwrap(), theta_box(2 * r));
            // box kills the sign ambiguity of Θ
            assert_eq!(box_map(&theta.neg()).unwrap(), theta_box(2 * r));
        }
    }

    #[test]
    fn box_examples() {
        // box(e1*) = (e1*,0)∧(0,e1*)
        let a = e(2, &[0]);
        assert_eq!(box_map(&a).unwrap(), e(4, &[0, 1]));
        // box of a scalar squares it
        let five = Multivector::scalar(2, bi(5));
        assert_eq!(box_map(&five).unwrap(), Multivector::scalar(4, bi(25)));
        // box is multiplicative on disjoint simple factors (rank-3 blades)
        for s in 0..(1u32 << 3) {
            for t in 0..(1u32 << 3) {
                if s & t != 0 {
                    continue;
                }
                let a = Multivector::from_blade(3, s);
                let b = Multivector::from_blade(3, t);
                let lhs = box_map(&wedge(&a, &b)).unwrap();
                let rhs = wedge(&box_map(&a).unwrap(), &box_map(&b).unwrap());
                assert_eq!(lhs, rhs, "s={s:b} t={t:b}");
            }
        }
    }

    #[test]
    fn trace_examples() {
        let r = 2;
        let theta = theta_box(2 * r);
        assert_eq!(trace(&theta).unwrap(), bi(1));
        assert_eq!(trace(&Multivector::one(2 * r)).unwrap(), bi(0));
        let b1 = box_map(&e(2, &[0])).unwrap();
        let b2 = box_map(&e(2, &[1])).unwrap();
        assert_eq!(trace(&wedge(&b1, &b2)).unwrap(), bi(1));
        assert!(trace(&Multivector::one(3)).is_err());
    }

    #[test]
    fn coproduct_of_one_rank1_doubled_matches_closed_form() {
        // ∨(1) = f1∧f2⊗1 − f1⊗f2 + f2⊗f1 + 1⊗f1∧f2
        let one = Multivector::one(2);
        let terms = coproduct(&one).unwrap();
        let f1 = e(2, &[0]);
        let f2 = e(2, &[1]);
        let f12 = e(2, &[0, 1]);
        let expected = vec![
            (f12.clone(), Multivector::one(2)),
            (f1.neg(), f2.clone()),
            (f2.clone(), f1.clone()),
            (Multivector::one(2), f12.clone()),
        ];
        // blade order of I1: ∅, {0}, {1}, {0,1}
        let reordered: Vec<_> = vec![
            terms[3].clone(),
            terms[1].clone(),
            terms[2].clone(),
            terms[0].clone(),
        ];
        assert_eq!(reordered, expected);
    }

    #[test]
    fn coproduct_of_theta_is_theta_tensor_theta() {
        for r in 1..=3usize {
            let theta = theta_box(2 * r);
            let terms = coproduct(&theta).unwrap();
            assert_eq!(terms.len(), 1);
            assert_eq!(terms[0], (theta.clone(), theta.clone()));
        }
    }

    #[test]
    fn coproduct_defining_property_full_bases() {
        // Σ_i Tr(a∧x_i)·y_i = a∧z for every basis blade a, underlying rank ≤ 3
        for r in 1..=3usize {
            let k = 2 * r;
            for zb in 0..(1u64 << k) {
                let z = Multivector::from_blade(k, zb as Blade);
                let terms = coproduct(&z).unwrap();
                for ab in 0..(1u64 << k) {
                    let a = Multivector::from_blade(k, ab as Blade);
                    let mut lhs = Multivector::zero(k);
                    for (x, y) in &terms {
                        let t = trace(&wedge(&a, x)).unwrap();
                        lhs = lhs.add(&y.scale(&t));
                    }
                    assert_eq!(lhs, wedge(&a, &z), "r={r} z={zb:b} a={ab:b}");
                }
            }
        }
    }

    #[test]
    fn alpha_from_subspace_examples() {
        // W = span(1,0) → ±e2*
        let w = Sublattice::new(2, vec![IntVector::from_i64(&[1, 0])]);
        let a = alpha_from_subspace(&w, &bi(1)).unwrap();
        assert_eq!(a, e(2, &[1]));
        // W = span(1,−w) → ±(w·e1* + e2*)
        for wv in 1..=4i64 {
            let w = Sublattice::new(2, vec![IntVector::from_i64(&[1, -wv])]);
            let a = alpha_from_subspace(&w, &bi(1)).unwrap();
            let mut expect = Multivector::zero(2);
            expect.add_term(1, bi(wv));
            expect.add_term(2, bi(1));
            assert_eq!(a, expect);
        }
        // W = 0, weight 3 → ±3·e1*∧e2*
        let w = Sublattice::zero(2);
        let a = alpha_from_subspace(&w, &bi(3)).unwrap();
        assert_eq!(a, e(2, &[0, 1]).scale(&bi(3)));
        // unsaturated input rejected
        let w = Sublattice::new(2, vec![IntVector::from_i64(&[2, 0])]);
        assert!(alpha_from_subspace(&w, &bi(1)).is_err());
    }

    #[test]
    fn alpha_vanishes_on_subspace_and_has_right_degree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let r = rng.gen_range(1..=4);
            let k = rng.gen_range(0..=r);
            let gens: Vec<IntVector> = (0..k)
                .map(|_| IntVector::new((0..r).map(|_| bi(rng.gen_range(-3..=3))).collect()))
                .collect();
            let w = saturate(&Sublattice::new(r, gens));
            let weight = bi(rng.gen_range(1..=3));
            let a = alpha_from_subspace(&w, &weight).unwrap();
            assert_eq!(a.degree(), Some(r - w.rank()));
            assert_eq!(a.content(), weight, "index equals the weight");
            for v in &w.generators {
                assert!(contract_vector(v, &a).is_zero());
            }
        }
    }

    /// Lemma: α of a transverse intersection is ± the wedge of the α's.
    #[test]
    fn alpha_of_transverse_intersection_is_wedge() {
        use crate::lattice::intersection_index;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut checked = 0;
        while checked < 60 {
            let r = rng.gen_range(2..=4);
            let k1 = rng.gen_range(1..r);
            let k2 = rng.gen_range(1..r);
            let gens = |rng: &mut rand_chacha::ChaCha8Rng, k: usize| -> Vec<IntVector> {
                (0..k)
                    .map(|_| IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect()))
                    .collect()
            };
            let a1 = saturate(&Sublattice::new(r, gens(&mut rng, k1)));
            let a2 = saturate(&Sublattice::new(r, gens(&mut rng, k2)));
            // transverse: codims add up and the intersection index is 1
            if a1.rank() + a2.rank() < r {
                continue;
            }
            let meet_rank = a1.rank() + a2.rank() - r;
            let idx = intersection_index(r, &[a1.clone(), a2.clone()]);
            if idx.is_err() || idx.unwrap() != bi(1) {
                continue;
            }
            // intersection lattice: common kernel of both projections
            let p1 = crate::lattice::quotient_projection(&a1).unwrap();
            let p2 = crate::lattice::quotient_projection(&a2).unwrap();
            let meet = Sublattice::new(r, crate::lattice::kernel_basis(&p1.stack(&p2)));
            if meet.rank() != meet_rank {
                continue;
            }
            let alpha_meet = alpha_from_subspace(&meet, &bi(1)).unwrap();
            let w1 = alpha_from_subspace(&a1, &bi(1)).unwrap();
            let w2 = alpha_from_subspace(&a2, &bi(1)).unwrap();
            let wed = wedge(&w1, &w2);
            assert!(
                wed == alpha_meet || wed == alpha_meet.neg(),
                "transverse wedge lemma failed r={r}"
            );
            checked += 1;
        }
    }

    /// Lemma: Tr(⋀ box(α_{A_i})) is the square of the intersection index.
    #[test]
    fn trace_of_boxed_alphas_is_squared_index() {
        use crate::lattice::intersection_index;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(29);
        let mut checked = 0;
        while checked < 80 {
            let r = rng.gen_range(2..=4);
            let m = rng.gen_range(1..=3);
            let mut subs = Vec::new();
            for _ in 0..m {
                let k = rng.gen_range(1..=r);
                let gens: Vec<IntVector> = (0..k)
                    .map(|_| IntVector::new((0..r).map(|_| bi(rng.gen_range(-2..=2))).collect()))
                    .collect();
                subs.push(saturate(&Sublattice::new(r, gens)));
            }
            let total_codim: usize = subs.iter().map(|s| r - s.rank()).sum();
            if total_codim != r {
                continue;
            }
            let idx = intersection_index(r, &subs).unwrap();
            let mut prod = Multivector::one(2 * r);
            for s in &subs {
                let alpha = alpha_from_subspace(s, &bi(1)).unwrap();
                prod = wedge(&prod, &box_map(&alpha).unwrap());
            }
            let tr = trace(&prod).unwrap();
            assert_eq!(tr, &idx * &idx, "Tr = index², r={r}");
            checked += 1;
        }
    }

    #[test]
    fn unbox_recovers_simple_boxes() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(41);
        for _ in 0..200 {
            let r = rng.gen_range(1..=4);
            let d = rng.gen_range(0..=r);
            // random simple element: wedge of d random vectors
            let mut alpha = Multivector::scalar(r, bi(rng.gen_range(1..=3)));
            for _ in 0..d {
                let v = IntVector::new((0..r).map(|_| bi(rng.gen_range(-3..=3))).collect());
                alpha = wedge(&alpha, &Multivector::from_vector(&v));
            }
            if alpha.is_zero() {
                continue;
            }
            let sgn: i8 = if rng.gen_bool(0.5) { 1 } else { -1 };
            let mut v = box_map(&alpha).unwrap();
            if sgn < 0 {
                v = v.neg();
            }
            let (eps, rec) = unbox(&v).unwrap();
            let mut back = box_map(&rec).unwrap();
            if eps < 0 {
                back = back.neg();
            }
            assert_eq!(back, v);
        }
        // a non-box even element is rejected: e01 + e23 in rank-2 doubled
        // (sum of two box classes, not a box of a simple element)
        let mut v = Multivector::zero(4);
        v.add_term(0b0011, bi(1));
        v.add_term(0b1100, bi(1));
        assert!(unbox(&v).is_none());
    }

    proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(1000))]

        /// graded commutativity on random homogeneous pairs, rank ≤ 4
        #[test]
        fn graded_commutativity(
            seed in 0u64..100_000,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=4usize);
            let random_homog = |rng: &mut rand_chacha::ChaCha8Rng| {
                let d = rng.gen_range(0..=r);
                let mut m = Multivector::zero(r);
                for b in 0..(1u32 << r) {
                    if b.count_ones() as usize == d && rng.gen_bool(0.6) {
                        m.add_term(b, bi(rng.gen_range(-3..=3)));
                    }
                }
                (m, d)
            };
            let (a, da) = random_homog(&mut rng);
            let (b, db) = random_homog(&mut rng);
            let ab = wedge(&a, &b);
            let ba = wedge(&b, &a);
            let expect = if (da * db) % 2 == 1 { ba.neg() } else { ba };
            prop_assert_eq!(ab, expect);
        }

        /// ι_n is an anti-derivation and squares to zero, rank ≤ 3
        #[test]
        fn contraction_anti_derivation(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let r = rng.gen_range(1..=3usize);
            let n = IntVector::new((0..r).map(|_| bi(rng.gen_range(-3..=3))).collect());
            let random_homog = |rng: &mut rand_chacha::ChaCha8Rng| {
                let d = rng.gen_range(0..=r);
                let mut m = Multivector::zero(r);
                for b in 0..(1u32 << r) {
                    if b.count_ones() as usize == d && rng.gen_bool(0.7) {
                        m.add_term(b, bi(rng.gen_range(-3..=3)));
                    }
                }
                (m, d)
            };
            let (a, da) = random_homog(&mut rng);
            let (b, _) = random_homog(&mut rng);
            let lhs = contract_vector(&n, &wedge(&a, &b));
            let mut rhs = wedge(&contract_vector(&n, &a), &b);
            let second = wedge(&a, &contract_vector(&n, &b));
            rhs = if da % 2 == 1 { rhs.sub(&second) } else { rhs.add(&second) };
            prop_assert_eq!(lhs, rhs);
            prop_assert!(contract_vector(&n, &contract_vector(&n, &a)).is_zero());
        }
    }

    #[test]
    fn adjunction_on_full_bases() {
        // ⟨ι_γ α, β⟩ = ⟨α, γ∧β⟩ over all basis blades, rank ≤ 3
        for r in 1..=3usize {
            for g in 0..(1u32 << r) {
                for a in 0..(1u32 << r) {
                    for b in 0..(1u32 << r) {
                        let gamma = Multivector::from_blade(r, g);
                        let alpha = Multivector::from_blade(r, a);
                        let beta = Multivector::from_blade(r, b);
                        let lhs = pairing(&contract(&gamma, &alpha), &beta);
                        let rhs = pairing(&alpha, &wedge(&gamma, &beta));
                        assert_eq!(lhs, rhs, "r={r} γ={g:b} α={a:b} β={b:b}");
                    }
                }
            }
        }
    }

    #[test]
    fn contract_blade_spec_example() {
        // ι_{((0,1),0)∧(0,(0,1))}(Θ^□) = (e1*,0)∧(0,e1*) in rank-2 doubled
        let n = IntVector::from_i64(&[0, 1]);
        let blade = doubled_vector_blade(&n);
        let out = contract(&blade, &theta_box(4));
        assert_eq!(out, e(4, &[0, 1]));
    }

    #[test]
    fn theta_n_box_from_contraction() {
        // Θ_n^□ = ι_{(n,0)∧(0,n)}(Θ_0^□) for primitive n, r ≤ 3: the result
        // is the box of a primitive top form of n^⊥
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(53);
        let mut checked = 0;
        while checked < 50 {
            let r = rng.gen_range(1..=3usize);
            let n = IntVector::new((0..r).map(|_| bi(rng.gen_range(-3..=3))).collect());
            if n.is_zero() || n.content() != bi(1) {
                continue;
            }
            let theta_n = contract(&doubled_vector_blade(&n), &theta_box(2 * r));
            // n^⊥ in the dual: annihilator of span(n)
            let perp = annihilator(&Sublattice::new(r, vec![n.clone()]));
            let mut top = Multivector::one(r);
            for row in perp.basis() {
                top = wedge(&top, &Multivector::from_vector(&row));
            }
            let expect = box_map(&top).unwrap();
            assert_eq!(
                theta_n,
                expect,
                "r={r} n={:?}",
                n.coords
                    .iter()
                    .map(|c| c.to_i64().unwrap())
                    .collect::<Vec<_>>()
            );
            checked += 1;
        }
    }
}

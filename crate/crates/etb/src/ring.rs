//! Exact arithmetic in the coefficient rings: 𝔽_p, 𝔽_{p^k} and ℤ/m.
//!
//! Elements are stored as canonical `u32` codes.  For 𝔽_p and ℤ/m the code is
//! the least nonnegative residue; for 𝔽_{p^k} it is the base-p encoding of the
//! coefficient vector of the residue polynomial, little-endian (constant term
//! first).  The ring itself carries the operations, so element codes stay
//! plain integers and hash-based dedup of lines and simplices is sound.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Canonical element code.  Meaning depends on the owning [`FiniteRing`].
pub type Elt = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingKind {
    /// 𝔽_p for a prime p.
    PrimeField { p: u32 },
    /// 𝔽_{p^k}, k ≥ 2, as 𝔽_p[x]/(modulus).  `modulus` holds the k lower
    /// coefficients of the monic degree-k modulus polynomial.
    ExtensionField { p: u32, k: u32, modulus: Vec<u32> },
    /// ℤ/m, m ≥ 2 and not required to be prime.
    IntegersMod { m: u32 },
}

/// A finite commutative ring of cardinality ≤ 2¹⁶.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRing {
    kind: RingKind,
    order: u32,
    unit_count: u32,
    /// Reductions of x^j mod the modulus for j in k..2k-1 (extension fields).
    ext_reduction: Vec<Vec<u32>>,
    /// Prime factorisation of m (ℤ/m only), as (p, e) pairs.
    factors: Vec<(u32, u32)>,
}

const MAX_ORDER: u64 = 1 << 16;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn factorize(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2u32;
    while (p as u64) * (p as u64) <= n as u64 {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Extended gcd on i128: returns (g, s, t) with s*a + t*b = g ≥ 0.
pub(crate) fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, s, t) = egcd(b, a % b);
        (g, t, s - (a / b) * t)
    }
}

// Polynomial helpers over 𝔽_p, coefficients little-endian, no trailing zeros.
fn poly_trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Remainder of `a` modulo the monic polynomial `m` over 𝔽_p.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for i in 0..m.len() {
            let sub = (lead as u64 * m[i] as u64) % p as u64;
            let idx = shift + i;
            r[idx] = ((r[idx] as u64 + p as u64 - sub % p as u64) % p as u64) as u32;
        }
        poly_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Brute-force irreducibility of a monic polynomial over 𝔽_p by trial
/// division over all monic polynomials of degree ≤ deg/2.
fn poly_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg == 0 {
        return false;
    }
    for d in 1..=deg / 2 {
        // monic divisors x^d + lower, `code` encodes the lower coefficients
        let combos = (p as u64).pow(d as u32);
        for code in 0..combos {
            let mut div: Vec<u32> = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                div.push((c % p as u64) as u32);
                c /= p as u64;
            }
            div.push(1);
            if poly_rem(m, &div, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FiniteRing {
    /// 𝔽_p for a prime p ≤ 2¹⁶.
    pub fn prime_field(p: u32) -> Result<FiniteRing> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if (p as u64) > MAX_ORDER {
            return Err(Error::CardinalityOutOfRange(p as u64));
        }
        Ok(FiniteRing {
            kind: RingKind::PrimeField { p },
            order: p,
            unit_count: p - 1,
            ext_reduction: Vec::new(),
            factors: vec![(p, 1)],
        })
    }

    /// 𝔽_{p^k} with the default modulus: the irreducible monic of degree k
    /// whose lower-coefficient code Σ cᵢ pⁱ is least.
    pub fn extension_field(p: u32, k: u32) -> Result<FiniteRing> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k < 2 {
            return Err(Error::BadDescriptor(format!("fq:{p}^{k} needs k >= 2")));
        }
        let order = (p as u64).checked_pow(k).filter(|&o| o <= MAX_ORDER);
        let order = order.ok_or(Error::CardinalityOutOfRange(u64::MAX))?;
        for code in 0..order {
            let mut modulus: Vec<u32> = Vec::with_capacity(k as usize);
            let mut c = code;
            for _ in 0..k {
                modulus.push((c % p as u64) as u32);
                c /= p as u64;
            }
            let mut full = modulus.clone();
            full.push(1);
            if poly_irreducible(&full, p) {
                return Self::extension_field_with_modulus(p, k, modulus);
            }
        }
        unreachable!("an irreducible monic of every degree exists over 𝔽_p")
    }

    /// 𝔽_{p^k} with a caller-supplied modulus (k lower coefficients of a
    /// monic degree-k polynomial).  Rejects reducible moduli.
    pub fn extension_field_with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Result<FiniteRing> {
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if k < 2 || modulus.len() != k as usize || modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadDescriptor("bad modulus coefficients".into()));
        }
        let order = (p as u64).checked_pow(k).filter(|&o| o <= MAX_ORDER);
        let order = order.ok_or(Error::CardinalityOutOfRange(u64::MAX))? as u32;
        let mut full = modulus.clone();
        full.push(1);
        if !poly_irreducible(&full, p) {
            return Err(Error::ReducibleModulus);
        }
        // Precompute x^j mod modulus for j = k .. 2k-2.
        let mut ext_reduction = Vec::new();
        let mut cur: Vec<u32> = modulus.iter().map(|&c| (p - c) % p).collect(); // x^k
        for _ in 0..k.saturating_sub(1) {
            ext_reduction.push(cur.clone());
            // multiply by x and reduce
            let mut next = vec![0u32];
            next.extend_from_slice(&cur);
            if next.len() > k as usize {
                let lead = next.pop().unwrap();
                for (i, &c) in modulus.iter().enumerate() {
                    let sub = (lead as u64 * c as u64) % p as u64;
                    next[i] = ((next[i] as u64 + p as u64 - sub) % p as u64) as u32;
                }
            }
            cur = next;
        }
        Ok(FiniteRing {
            kind: RingKind::ExtensionField { p, k, modulus },
            order,
            unit_count: order - 1,
            ext_reduction,
            factors: vec![(p, k)],
        })
    }

    /// ℤ/m for m ≥ 2.
    pub fn integers_mod(m: u32) -> Result<FiniteRing> {
        if m < 2 || (m as u64) > MAX_ORDER {
            return Err(Error::CardinalityOutOfRange(m as u64));
        }
        let factors = factorize(m);
        let mut phi = 1u64;
        for &(p, e) in &factors {
            phi *= (p as u64).pow(e - 1) * (p as u64 - 1);
        }
        Ok(FiniteRing {
            kind: RingKind::IntegersMod { m },
            order: m,
            unit_count: phi as u32,
            ext_reduction: Vec::new(),
            factors,
        })
    }

    /// Parses a ring descriptor: `fq:2`, `fq:3^2`, `zmod:6`.
    pub fn parse(desc: &str) -> Result<FiniteRing> {
        let bad = || Error::BadDescriptor(desc.to_string());
        let (head, tail) = desc.split_once(':').ok_or_else(bad)?;
        match head {
            "fq" => {
                if let Some((p, k)) = tail.split_once('^') {
                    let p: u32 = p.parse().map_err(|_| bad())?;
                    let k: u32 = k.parse().map_err(|_| bad())?;
                    if k == 1 {
                        FiniteRing::prime_field(p)
                    } else {
                        FiniteRing::extension_field(p, k)
                    }
                } else {
                    let q: u32 = tail.parse().map_err(|_| bad())?;
                    if is_prime(q as u64) {
                        FiniteRing::prime_field(q)
                    } else {
                        // prime-power shorthand: fq:4 means fq:2^2
                        let f = factorize(q);
                        if f.len() == 1 && f[0].1 >= 2 {
                            FiniteRing::extension_field(f[0].0, f[0].1)
                        } else {
                            Err(Error::NotPrime(q as u64))
                        }
                    }
                }
            }
            "zmod" => {
                let m: u32 = tail.parse().map_err(|_| bad())?;
                FiniteRing::integers_mod(m)
            }
            _ => Err(bad()),
        }
    }

    /// The descriptor string this ring round-trips through [`FiniteRing::parse`].
    pub fn descriptor(&self) -> String {
        match &self.kind {
            RingKind::PrimeField { p } => format!("fq:{p}"),
            RingKind::ExtensionField { p, k, .. } => format!("fq:{p}^{k}"),
            RingKind::IntegersMod { m } => format!("zmod:{m}"),
        }
    }

    pub fn kind(&self) -> &RingKind {
        &self.kind
    }

    /// Cardinality of the ring.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Number of units (cached).
    pub fn unit_count(&self) -> u32 {
        self.unit_count
    }

    pub fn is_field(&self) -> bool {
        !matches!(self.kind, RingKind::IntegersMod { m } if !is_prime(m as u64))
    }

    /// Prime factorisation of m for ℤ/m; `[(p, 1)]` for 𝔽_p, `[(p, k)]` for 𝔽_{p^k}.
    pub fn factors(&self) -> &[(u32, u32)] {
        &self.factors
    }

    /// The prime p such that p·1 = 0 in residue fields of this ring; for
    /// ℤ/m this is only meaningful per factor.
    pub fn characteristic(&self) -> u32 {
        match self.kind {
            RingKind::PrimeField { p } | RingKind::ExtensionField { p, .. } => p,
            RingKind::IntegersMod { m } => m,
        }
    }

    pub fn zero(&self) -> Elt {
        0
    }

    pub fn one(&self) -> Elt {
        1
    }

    fn decode(&self, x: Elt) -> Vec<u32> {
        match self.kind {
            RingKind::ExtensionField { p, k, .. } => {
                let mut v = Vec::with_capacity(k as usize);
                let mut c = x;
                for _ in 0..k {
                    v.push(c % p);
                    c /= p;
                }
                v
            }
            _ => vec![x],
        }
    }

    fn encode(&self, v: &[u32]) -> Elt {
        match self.kind {
            RingKind::ExtensionField { p, k, .. } => {
                let mut x = 0u32;
                for i in (0..k as usize).rev() {
                    x = x * p + v.get(i).copied().unwrap_or(0);
                }
                x
            }
            _ => v.first().copied().unwrap_or(0),
        }
    }

    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        debug_assert!(a < self.order && b < self.order);
        match self.kind {
            RingKind::PrimeField { p } => ((a as u64 + b as u64) % p as u64) as u32,
            RingKind::IntegersMod { m } => ((a as u64 + b as u64) % m as u64) as u32,
            RingKind::ExtensionField { p, .. } => {
                let (va, vb) = (self.decode(a), self.decode(b));
                let sum: Vec<u32> = va.iter().zip(&vb).map(|(&x, &y)| (x + y) % p).collect();
                self.encode(&sum)
            }
        }
    }

    pub fn neg(&self, a: Elt) -> Elt {
        match self.kind {
            RingKind::PrimeField { p } => (p - a) % p,
            RingKind::IntegersMod { m } => (m - a) % m,
            RingKind::ExtensionField { p, .. } => {
                let v: Vec<u32> = self.decode(a).iter().map(|&x| (p - x) % p).collect();
                self.encode(&v)
            }
        }
    }

    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        debug_assert!(a < self.order && b < self.order);
        match self.kind {
            RingKind::PrimeField { p } => ((a as u64 * b as u64) % p as u64) as u32,
            RingKind::IntegersMod { m } => ((a as u64 * b as u64) % m as u64) as u32,
            RingKind::ExtensionField { p, k, .. } => {
                let (va, vb) = (self.decode(a), self.decode(b));
                let mut prod = vec![0u64; 2 * k as usize - 1];
                for (i, &x) in va.iter().enumerate() {
                    for (j, &y) in vb.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p as u64;
                    }
                }
                // fold x^j for j >= k using the precomputed reductions
                let mut out = vec![0u64; k as usize];
                for (i, item) in out.iter_mut().enumerate() {
                    *item = prod[i];
                }
                for j in k as usize..prod.len() {
                    let c = prod[j];
                    if c == 0 {
                        continue;
                    }
                    let red = &self.ext_reduction[j - k as usize];
                    for (i, &r) in red.iter().enumerate() {
                        out[i] = (out[i] + c * r as u64) % p as u64;
                    }
                }
                let out: Vec<u32> = out.iter().map(|&x| x as u32).collect();
                self.encode(&out)
            }
        }
    }

    /// Scalar exponentiation by squaring.
    pub fn pow(&self, a: Elt, mut e: u64) -> Elt {
        let mut base = a;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: Elt) -> bool {
        match self.kind {
            RingKind::IntegersMod { m } => gcd(a as u64, m as u64) == 1,
            _ => a != 0,
        }
    }

    /// Multiplicative inverse; `Err(NotInvertible)` on non-units.
    pub fn inv(&self, a: Elt) -> Result<Elt> {
        match self.kind {
            RingKind::PrimeField { p } | RingKind::IntegersMod { m: p } => {
                let (g, s, _) = egcd(a as i128, p as i128);
                if g != 1 {
                    return Err(Error::NotInvertible);
                }
                Ok(((s % p as i128 + p as i128) % p as i128) as u32)
            }
            RingKind::ExtensionField { .. } => {
                if a == 0 {
                    return Err(Error::NotInvertible);
                }
                Ok(self.pow(a, self.order as u64 - 2))
            }
        }
    }

    /// All elements in canonical (ascending code) order.
    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.order
    }

    /// Exactly the invertible elements, canonically ordered.
    pub fn units(&self) -> Vec<Elt> {
        self.elements().filter(|&a| self.is_unit(a)).collect()
    }

    /// Lift of a code to the canonical integer representative used when the
    /// ring is ℤ/m or 𝔽_p.  Panics on extension fields.
    pub fn lift(&self, a: Elt) -> i64 {
        match self.kind {
            RingKind::ExtensionField { .. } => {
                panic!("no integer lift for extension field elements")
            }
            _ => a as i64,
        }
    }

    /// Reduction of an integer into this ring (ℤ/m and 𝔽_p; for extension
    /// fields the image of n·1).
    pub fn from_int(&self, n: i64) -> Elt {
        match self.kind {
            RingKind::PrimeField { p } | RingKind::IntegersMod { m: p } => {
                (n.rem_euclid(p as i64)) as u32
            }
            RingKind::ExtensionField { p, .. } => (n.rem_euclid(p as i64)) as u32,
        }
    }

    /// Human-readable element rendering (polynomial coefficients for
    /// extension fields, plain residue otherwise).
    pub fn display(&self, a: Elt) -> String {
        match self.kind {
            RingKind::ExtensionField { .. } => {
                let v = self.decode(a);
                format!(
                    "[{}]",
                    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
                )
            }
            _ => a.to_string(),
        }
    }

    /// Exhaustive verification of the commutative ring axioms and of
    /// x·inv(x) = 1 for units.  Quadratic/cubic in the order; intended for
    /// rings of cardinality ≤ 256.
    pub fn verify_axioms(&self) -> bool {
        let n = self.order;
        for a in 0..n {
            if self.add(a, 0) != a || self.mul(a, 1) != a {
                return false;
            }
            if self.add(a, self.neg(a)) != 0 {
                return false;
            }
            if self.is_unit(a) {
                let ai = self.inv(a).unwrap();
                if self.mul(a, ai) != 1 {
                    return false;
                }
            }
            for b in 0..n {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return false;
                }
                for c in 0..n {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c)) {
                        return false;
                    }
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return false;
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

impl fmt::Display for FiniteRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.descriptor())
    }
}

impl Serialize for FiniteRing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.descriptor())
    }
}

impl<'de> Deserialize<'de> for FiniteRing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FiniteRing::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f2_basics() {
        let r = FiniteRing::parse("fq:2").unwrap();
        assert_eq!(r.order(), 2);
        assert_eq!(r.unit_count(), 1);
        assert_eq!(r.add(1, 1), 0);
    }

    #[test]
    fn f4_default_modulus_is_x2_x_1() {
        let r = FiniteRing::parse("fq:4").unwrap();
        assert_eq!(r.order(), 4);
        assert_eq!(r.unit_count(), 3);
        match r.kind() {
            RingKind::ExtensionField { p, k, modulus } => {
                assert_eq!((*p, *k), (2, 2));
                assert_eq!(modulus, &vec![1, 1]); // x^2 + x + 1
            }
            _ => panic!("expected extension field"),
        }
        assert!(r.verify_axioms());
        assert_eq!(r.units().len(), 3);
    }

    #[test]
    fn f9_default_modulus() {
        let r = FiniteRing::parse("fq:3^2").unwrap();
        assert!(r.verify_axioms());
        // x^2 + 1 is the first irreducible in code order over F_3
        match r.kind() {
            RingKind::ExtensionField { modulus, .. } => assert_eq!(modulus, &vec![1, 0]),
            _ => panic!(),
        }
    }

    #[test]
    fn zmod6_units() {
        let r = FiniteRing::parse("zmod:6").unwrap();
        assert_eq!(r.order(), 6);
        assert_eq!(r.unit_count(), 2);
        assert_eq!(r.units(), vec![1, 5]);
        assert!(r.inv(2).is_err());
        assert_eq!(r.inv(5).unwrap(), 5);
    }

    #[test]
    fn f3_and_f5_units_and_inverses() {
        let f3 = FiniteRing::prime_field(3).unwrap();
        assert_eq!(f3.units(), vec![1, 2]);
        let f5 = FiniteRing::prime_field(5).unwrap();
        assert_eq!(f5.inv(2).unwrap(), 3);
        assert_eq!(f5.inv(1).unwrap(), 1);
    }

    #[test]
    fn descriptor_errors() {
        assert!(FiniteRing::parse("fq:6").is_err());
        assert!(FiniteRing::parse("zmod:1").is_err());
        assert!(FiniteRing::parse("nonsense").is_err());
        assert!(FiniteRing::extension_field_with_modulus(2, 2, vec![0, 0]).is_err());
    }

    #[test]
    fn axioms_exhaustive_small_rings() {
        for desc in ["fq:2", "fq:3", "fq:5", "fq:7", "fq:4", "fq:8", "fq:3^2", "fq:5^2", "zmod:4", "zmod:6", "zmod:12", "zmod:30"] {
            let r = FiniteRing::parse(desc).unwrap();
            assert!(r.verify_axioms(), "axioms fail for {desc}");
        }
    }

    #[test]
    fn unit_count_formulas() {
        // q - 1 for fields, Euler phi for Z/m, both against direct enumeration
        for desc in ["fq:9", "fq:16", "zmod:8", "zmod:30"] {
            let r = FiniteRing::parse(desc).unwrap();
            let direct = r
                .elements()
                .filter(|&a| (0..r.order()).any(|b| r.mul(a, b) == 1))
                .count() as u32;
            assert_eq!(r.unit_count(), direct, "{desc}");
            assert_eq!(r.units().len() as u32, direct);
        }
    }

    #[test]
    fn parse_roundtrip() {
        for desc in ["fq:2", "fq:3^2", "zmod:6"] {
            let r = FiniteRing::parse(desc).unwrap();
            assert_eq!(r.descriptor(), desc);
        }
        // shorthand normalises
        assert_eq!(FiniteRing::parse("fq:4").unwrap().descriptor(), "fq:2^2");
    }
}

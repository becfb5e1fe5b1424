//! Exact arithmetic in ℤ[ζ_m].
//!
//! Elements are kept as length-`m` coefficient vectors modulo `x^m − 1`, where
//! multiplication is a cyclic convolution on exponents. The canonical form is
//! the remainder modulo the cyclotomic polynomial Φ_m, taken only when two
//! elements are compared or an element is tested for being rational.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::Result;
use crate::poly::IntPoly;

fn divisors(m: usize) -> Vec<usize> {
    (1..=m).filter(|d| m.is_multiple_of(*d)).collect()
}

/// Φ_m, from `x^m − 1 = ∏_{d | m} Φ_d` by exact division.
pub fn cyclotomic_poly(m: usize) -> IntPoly {
    assert!(m > 0, "cyclotomic polynomial needs m ≥ 1");
    let mut memo: BTreeMap<usize, IntPoly> = BTreeMap::new();
    for d in divisors(m) {
        let below = divisors(d)
            .into_iter()
            .filter(|&e| e < d)
            .fold(IntPoly::constant(1), |acc, e| &acc * &memo[&e]);
        let phi = IntPoly::x_pow_minus_one(d)
            .div_exact(&below)
            .expect("products of lower cyclotomic polynomials divide x^d - 1");
        memo.insert(d, phi);
    }
    memo.remove(&m).expect("m divides itself")
}

/// ℤ[ζ_m] with its reduction polynomial.
#[derive(Clone, Debug)]
pub struct CyclotomicRing {
    m: usize,
    phi: IntPoly,
}

/// `Σ_t c_t ζ^t`, coefficients indexed by exponent `t = 0..m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicElt {
    coeffs: Vec<BigInt>,
}

impl CyclotomicRing {
    pub fn new(m: usize) -> Self {
        CyclotomicRing {
            m,
            phi: cyclotomic_poly(m),
        }
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn phi(&self) -> &IntPoly {
        &self.phi
    }

    pub fn zero(&self) -> CyclotomicElt {
        CyclotomicElt {
            coeffs: vec![BigInt::zero(); self.m],
        }
    }

    pub fn from_integer(&self, v: impl Into<BigInt>) -> CyclotomicElt {
        let mut e = self.zero();
        e.coeffs[0] = v.into();
        e
    }

    /// `ζ^t`.
    pub fn root(&self, t: u64) -> CyclotomicElt {
        let mut e = self.zero();
        e.coeffs[(t % self.m as u64) as usize] = BigInt::from(1);
        e
    }

    /// Element with the given small coefficients (length `m`).
    pub fn from_counts(&self, counts: &[i64]) -> CyclotomicElt {
        assert_eq!(counts.len(), self.m);
        CyclotomicElt {
            coeffs: counts.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn add(&self, a: &CyclotomicElt, b: &CyclotomicElt) -> CyclotomicElt {
        CyclotomicElt {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, a: &CyclotomicElt, b: &CyclotomicElt) -> CyclotomicElt {
        CyclotomicElt {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect(),
        }
    }

    pub fn mul(&self, a: &CyclotomicElt, b: &CyclotomicElt) -> CyclotomicElt {
        let m = self.m;
        let mut out = vec![BigInt::zero(); m];
        for (i, x) in a.coeffs.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, y) in b.coeffs.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
                out[(i + j) % m] += x * y;
            }
        }
        CyclotomicElt { coeffs: out }
    }

    pub fn product<'a>(&self, items: impl IntoIterator<Item = &'a CyclotomicElt>) -> CyclotomicElt {
        items
            .into_iter()
            .fold(self.from_integer(1), |acc, x| self.mul(&acc, x))
    }

    /// Multiplies by `ζ^t` (an exponent rotation).
    pub fn shift(&self, a: &CyclotomicElt, t: u64) -> CyclotomicElt {
        let m = self.m;
        let t = (t % m as u64) as usize;
        let mut out = vec![BigInt::zero(); m];
        for (i, c) in a.coeffs.iter().enumerate() {
            out[(i + t) % m] = c.clone();
        }
        CyclotomicElt { coeffs: out }
    }

    /// Complex conjugation, `ζ ↦ ζ^{−1}`.
    pub fn conj(&self, a: &CyclotomicElt) -> CyclotomicElt {
        let m = self.m;
        let mut out = vec![BigInt::zero(); m];
        for (i, c) in a.coeffs.iter().enumerate() {
            out[(m - i) % m] = c.clone();
        }
        CyclotomicElt { coeffs: out }
    }

    /// Galois action `ζ ↦ ζ^l`, `gcd(l, m) = 1`.
    pub fn galois(&self, a: &CyclotomicElt, l: u64) -> CyclotomicElt {
        assert_eq!(l.gcd(&(self.m as u64)), 1, "exponent must be a unit mod m");
        let m = self.m as u64;
        let mut out = vec![BigInt::zero(); self.m];
        for (i, c) in a.coeffs.iter().enumerate() {
            out[((i as u64 * l) % m) as usize] += c;
        }
        CyclotomicElt { coeffs: out }
    }

    /// Remainder modulo Φ_m; equal elements have equal canonical forms.
    pub fn canonical(&self, a: &CyclotomicElt) -> Result<IntPoly> {
        let (_, r) = IntPoly::new(a.coeffs.clone()).div_rem_monic(&self.phi)?;
        Ok(r)
    }

    pub fn equal(&self, a: &CyclotomicElt, b: &CyclotomicElt) -> Result<bool> {
        Ok(self.canonical(&self.sub(a, b))?.is_zero())
    }

    /// The rational integer `a` equals, if it is one.
    pub fn as_integer(&self, a: &CyclotomicElt) -> Result<Option<BigInt>> {
        let c = self.canonical(a)?;
        Ok(match c.degree() {
            None => Some(BigInt::zero()),
            Some(0) => Some(c.coeff(0)),
            Some(_) => None,
        })
    }

    /// Fixed by complex conjugation.
    pub fn is_real(&self, a: &CyclotomicElt) -> Result<bool> {
        self.equal(a, &self.conj(a))
    }
}

impl CyclotomicElt {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Compact rendering `c_t·z^t + ...` of the nonzero exponent terms.
    pub fn to_exponent_string(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(t, c)| format!("{c}*z^{t}"))
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn totient(m: usize) -> usize {
        (1..=m).filter(|k| k.gcd(&m) == 1).count()
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_poly(1), IntPoly::from_i64s(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), IntPoly::from_i64s(&[1, 1]));
        assert_eq!(cyclotomic_poly(4), IntPoly::from_i64s(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(12), IntPoly::from_i64s(&[1, 0, -1, 0, 1]));
        // First cyclotomic polynomial with a coefficient outside {−1, 0, 1}.
        assert!(cyclotomic_poly(105)
            .coeffs()
            .iter()
            .any(|c| *c == BigInt::from(-2)));
    }

    #[test]
    fn cyclotomic_roots_and_degrees() {
        for m in [1usize, 6, 10, 28, 36, 60, 96, 100] {
            let phi = cyclotomic_poly(m);
            assert_eq!(phi.degree(), Some(totient(m)), "m = {m}");
            // Vanishes at every primitive m-th root of unity.
            for k in (1..=m).filter(|k| k.gcd(&m) == 1) {
                let (mut re, mut im) = (0f64, 0f64);
                for (e, c) in phi.coeffs().iter().enumerate() {
                    let ang = 2.0 * std::f64::consts::PI * (k * e) as f64 / m as f64;
                    let c: f64 = c.to_string().parse().unwrap();
                    re += c * ang.cos();
                    im += c * ang.sin();
                }
                assert!(re.hypot(im) < 1e-8, "Φ_{m}(ζ^{k}) = {re}+{im}i");
            }
        }
    }

    #[test]
    fn ring_arithmetic() {
        let r = CyclotomicRing::new(4);
        let i = r.root(1);
        // i² = −1.
        assert_eq!(
            r.as_integer(&r.mul(&i, &i)).unwrap(),
            Some(BigInt::from(-1))
        );
        assert!(!r.is_real(&i).unwrap());
        let two_re = r.add(&i, &r.conj(&i));
        assert!(r.is_real(&two_re).unwrap());
        assert_eq!(r.as_integer(&two_re).unwrap(), Some(BigInt::zero()));
        assert_eq!(r.as_integer(&i).unwrap(), None);
        // 1 + ζ_6^2 = ζ_6 in ℤ[ζ_6].
        let r6 = CyclotomicRing::new(6);
        assert!(r6
            .equal(&r6.add(&r6.from_integer(1), &r6.root(2)), &r6.root(1))
            .unwrap());
        assert!(r6.equal(&r6.shift(&r6.root(2), 5), &r6.root(1)).unwrap());
        assert!(r6.equal(&r6.galois(&r6.root(1), 5), &r6.root(5)).unwrap());
        let prod = r6.product([&r6.root(1), &r6.root(2), &r6.root(3)]);
        assert_eq!(r6.as_integer(&prod).unwrap(), Some(BigInt::from(1)));
        assert_eq!(r6.root(2).to_exponent_string(), "1*z^2");
    }
}

//! Scalar number theory modulo an odd prime: Legendre and quartic symbols,
//! the normalized decomposition p = a² + 4b², permutation signs on the
//! quadratic residues, and perfect-square detection for big integers.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Discrete-log tables are only built up to this modulus; above it the
/// context is still valid but character tables cannot be formed.
pub const DLOG_TABLE_LIMIT: u64 = 1 << 24;

#[inline]
pub fn mod_mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut b = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mod_mul(acc, b, m);
        }
        b = mod_mul(b, b, m);
        exp >>= 1;
    }
    acc
}

/// Reduces a signed value into `0..m`.
#[inline]
pub fn reduce(x: i64, m: u64) -> u64 {
    (x as i128).rem_euclid(m as i128) as u64
}

/// Deterministic Miller–Rabin, exact for every `u64`.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &q in &SMALL {
        if m.is_multiple_of(q) {
            return m == q;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &SMALL {
        let mut x = mod_pow(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mod_mul(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn distinct_prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q.saturating_mul(q) <= m {
        if m.is_multiple_of(q) {
            out.push(q);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

/// Smallest generator of the multiplicative group modulo the prime `p`.
pub fn find_generator(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let factors = distinct_prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| mod_pow(g, (p - 1) / q, p) != 1))
        .expect("a prime modulus always has a generator")
}

pub fn is_generator(g: u64, p: u64) -> bool {
    let g = g % p;
    g != 0
        && distinct_prime_factors(p - 1)
            .iter()
            .all(|&q| mod_pow(g, (p - 1) / q, p) != 1)
}

/// Tonelli–Shanks. Returns some root of `x` modulo the odd prime `p`, or
/// `None` when `x` is a non-residue.
pub fn sqrt_mod(x: u64, p: u64) -> Option<u64> {
    let x = x % p;
    if x == 0 {
        return Some(0);
    }
    if mod_pow(x, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(mod_pow(x, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let z = (2..p)
        .find(|&z| mod_pow(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c = mod_pow(z, q, p);
    let mut t = mod_pow(x, q, p);
    let mut r = mod_pow(x, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mod_mul(t2, t2, p);
            i += 1;
        }
        let b = mod_pow(c, 1 << (m - i - 1), p);
        m = i;
        c = mod_mul(b, b, p);
        t = mod_mul(t, c, p);
        r = mod_mul(r, b, p);
    }
    Some(r)
}

/// Returns `r ≥ 0` with `r² = v`, if one exists.
pub fn is_perfect_square(v: &BigInt) -> Option<BigInt> {
    if v.is_negative() {
        return None;
    }
    let r = v.sqrt();
    (&r * &r == *v).then_some(r)
}

/// The representation p = a² + 4b² with a ≡ 1 (mod 4) and b > 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct TwoSquare {
    pub a: i64,
    pub b: i64,
}

/// An odd prime together with the data every other module keys off.
#[derive(Clone, Debug)]
pub struct PrimeCtx {
    p: u64,
    n: u64,
    g: u64,
    dlog: Option<Vec<u32>>,
    decomp: Option<TwoSquare>,
}

impl PrimeCtx {
    /// Validates `p` and uses the smallest generator.
    pub fn new(p: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Self::build(p, find_generator(p))
    }

    /// Uses a caller-chosen generator `g`, which must have order p − 1.
    pub fn with_generator(p: u64, g: u64) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if !is_generator(g, p) {
            return Err(Error::Inconsistent(format!(
                "{g} does not generate (Z/{p})*"
            )));
        }
        Self::build(p, g % p)
    }

    fn build(p: u64, g: u64) -> Result<Self> {
        let dlog = (p <= DLOG_TABLE_LIMIT).then(|| {
            let mut table = vec![u32::MAX; p as usize];
            let mut x = 1u64;
            for e in 0..p - 1 {
                table[x as usize] = e as u32;
                x = mod_mul(x, g, p);
            }
            table
        });
        let mut ctx = PrimeCtx {
            p,
            n: (p - 1) / 2,
            g,
            dlog,
            decomp: None,
        };
        if p % 4 == 1 {
            ctx.decomp = Some(ctx.two_square_decompose()?);
        }
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// n = (p − 1)/2.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// p mod 4, either 1 or 3.
    pub fn cls(&self) -> u64 {
        self.p % 4
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    pub fn decomp(&self) -> Option<TwoSquare> {
        self.decomp
    }

    /// Index of `x` to base `g`. `None` for `x ≡ 0` or when no table was built.
    pub fn dlog(&self, x: i64) -> Option<u64> {
        let r = reduce(x, self.p);
        if r == 0 {
            return None;
        }
        self.dlog.as_ref().map(|t| t[r as usize] as u64)
    }

    pub fn has_dlog_table(&self) -> bool {
        self.dlog.is_some()
    }

    fn require_one_mod_four(&self) -> Result<()> {
        if self.cls() == 1 {
            Ok(())
        } else {
            Err(Error::ResidueClass {
                p: self.p,
                expected: 1,
            })
        }
    }

    /// Legendre symbol by Euler's criterion.
    pub fn legendre(&self, x: i64) -> i8 {
        let r = reduce(x, self.p);
        if r == 0 {
            return 0;
        }
        if mod_pow(r, self.n, self.p) == 1 {
            1
        } else {
            -1
        }
    }

    /// −1 when `d` is a quadratic but not a biquadratic residue, else +1.
    pub fn epsilon(&self, d: i64) -> i8 {
        if self.cls() != 1 || self.legendre(d) != 1 {
            return 1;
        }
        if mod_pow(reduce(d, self.p), (self.p - 1) / 4, self.p) == self.p - 1 {
            -1
        } else {
            1
        }
    }

    /// Cornacchia descent from a square root of −1, then normalization
    /// a ≡ 1 (mod 4), b > 0.
    pub fn two_square_decompose(&self) -> Result<TwoSquare> {
        self.require_one_mod_four()?;
        let p = self.p;
        let mut r0 = sqrt_mod(p - 1, p).expect("−1 is a residue when p ≡ 1 (mod 4)");
        if r0 <= p / 2 {
            r0 = p - r0;
        }
        let (mut x, mut y) = (p, r0);
        while (y as u128) * (y as u128) > p as u128 {
            (x, y) = (y, x % y);
        }
        let rest = p - y * y;
        let z = rest.sqrt();
        if z * z != rest {
            return Err(Error::Inconsistent(format!(
                "Cornacchia descent failed for {p}"
            )));
        }
        let (odd, even) = if y % 2 == 1 { (y, z) } else { (z, y) };
        let odd = odd as i64;
        let a = if odd % 4 == 1 { odd } else { -odd };
        Ok(TwoSquare {
            a,
            b: (even / 2) as i64,
        })
    }

    /// Σ_{j=1..n} ((1+j²)/p)(j/p), which equals −a.
    pub fn jacobsthal_a(&self) -> Result<i64> {
        self.require_one_mod_four()?;
        Ok((1..=self.n as i64)
            .map(|j| {
                let j2 = mod_mul(j as u64, j as u64, self.p) as i64;
                (self.legendre(1 + j2) * self.legendre(j)) as i64
            })
            .sum())
    }

    fn require_qr(&self, d: i64) -> Result<()> {
        self.require_one_mod_four()?;
        if self.legendre(d) != 1 {
            return Err(Error::NotQuadraticResidue { d, p: self.p });
        }
        Ok(())
    }

    /// Sign of the permutation j² ↦ d·j² on the quadratic residues,
    /// from its cycle decomposition.
    pub fn perm_sign_cycles(&self, d: i64) -> Result<i8> {
        self.require_qr(d)?;
        let n = self.n as usize;
        let p = self.p;
        let dr = reduce(d, p);
        let squares: Vec<u64> = (1..=self.n).map(|j| mod_mul(j, j, p)).collect();
        let mut position = vec![usize::MAX; p as usize];
        for (idx, &s) in squares.iter().enumerate() {
            position[s as usize] = idx;
        }
        let image: Vec<usize> = squares
            .iter()
            .map(|&s| position[mod_mul(dr, s, p) as usize])
            .collect();
        let mut seen = vec![false; n];
        let mut cycles = 0usize;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = image[i];
            }
        }
        Ok(if (n - cycles).is_multiple_of(2) {
            1
        } else {
            -1
        })
    }

    /// d^{(p−1)/4} mod p mapped to ±1.
    pub fn perm_sign_formula(&self, d: i64) -> Result<i8> {
        self.require_qr(d)?;
        let v = mod_pow(reduce(d, self.p), (self.p - 1) / 4, self.p);
        match v {
            1 => Ok(1),
            v if v == self.p - 1 => Ok(-1),
            v => Err(Error::Inconsistent(format!(
                "d^((p-1)/4) = {v} is not ±1 mod {}",
                self.p
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division(m: u64) -> bool {
        m >= 2
            && (2..m)
                .take_while(|q| q * q <= m)
                .all(|q| !m.is_multiple_of(q))
    }

    fn ctx(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    #[test]
    fn primality_examples() {
        assert!(is_prime(13));
        assert!(!is_prime(1));
        assert!(!is_prime(91));
        assert!(!is_prime(0));
        assert!(is_prime(2));
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
    }

    #[test]
    fn primality_matches_trial_division() {
        for m in 0..5000 {
            assert_eq!(is_prime(m), trial_division(m), "m = {m}");
        }
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(matches!(PrimeCtx::new(2), Err(Error::NotOddPrime(2))));
        assert!(matches!(PrimeCtx::new(15), Err(Error::NotOddPrime(15))));
        assert!(PrimeCtx::with_generator(13, 3).is_err());
        assert!(PrimeCtx::with_generator(13, 6).is_ok());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(ctx(5).legendre(5), 0);
        assert_eq!(ctx(13).legendre(3), 1);
        assert_eq!(ctx(5).legendre(2), -1);
        assert_eq!(ctx(5).legendre(-3), -1);
    }

    #[test]
    fn legendre_matches_residue_table() {
        for p in (3..=200).filter(|&p| is_prime(p)) {
            let c = ctx(p);
            let mut is_square = vec![false; p as usize];
            for x in 1..p {
                is_square[(x * x % p) as usize] = true;
            }
            for x in 0..p {
                let expected = if x == 0 {
                    0
                } else if is_square[x as usize] {
                    1
                } else {
                    -1
                };
                assert_eq!(c.legendre(x as i64), expected, "({x}/{p})");
            }
        }
    }

    #[test]
    fn epsilon_examples() {
        let c = ctx(13);
        assert_eq!(c.epsilon(3), 1);
        assert_eq!(c.epsilon(4), -1);
        assert_eq!(c.epsilon(0), 1);
        assert_eq!(c.epsilon(2), 1);
        assert_eq!(ctx(7).epsilon(2), 1);
    }

    #[test]
    fn epsilon_is_multiplicative_on_residues() {
        for p in [13u64, 17, 29, 37, 41, 101] {
            let c = ctx(p);
            let qrs: Vec<i64> = (1..p as i64).filter(|&d| c.legendre(d) == 1).collect();
            for &x in &qrs {
                for &y in &qrs {
                    assert_eq!(c.epsilon(x * y), c.epsilon(x) * c.epsilon(y));
                }
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(ctx(5).decomp(), Some(TwoSquare { a: 1, b: 1 }));
        assert_eq!(ctx(13).decomp(), Some(TwoSquare { a: -3, b: 1 }));
        assert_eq!(ctx(17).decomp(), Some(TwoSquare { a: 1, b: 2 }));
        assert_eq!(ctx(7).decomp(), None);
        assert!(matches!(
            ctx(7).two_square_decompose(),
            Err(Error::ResidueClass { p: 7, expected: 1 })
        ));
    }

    #[test]
    fn decomposition_is_the_unique_normalized_pair() {
        for p in (5..=3000).filter(|&p| p % 4 == 1 && is_prime(p)) {
            let brute: Vec<(i64, i64)> = (-(p as i64)..=p as i64)
                .filter(|a| a.rem_euclid(4) == 1 && a * a < p as i64)
                .filter_map(|a| {
                    let rest = p as i64 - a * a;
                    (rest % 4 == 0).then_some(rest / 4).and_then(|b2| {
                        let b = (b2 as u64).sqrt() as i64;
                        (b > 0 && b * b == b2).then_some((a, b))
                    })
                })
                .collect();
            let ts = ctx(p).decomp().unwrap();
            assert_eq!(brute, vec![(ts.a, ts.b)], "p = {p}");
        }
    }

    #[test]
    fn jacobsthal_examples() {
        assert_eq!(ctx(13).jacobsthal_a().unwrap(), 3);
        assert_eq!(ctx(5).jacobsthal_a().unwrap(), -1);
        assert_eq!(ctx(17).jacobsthal_a().unwrap(), -1);
        assert!(ctx(11).jacobsthal_a().is_err());
    }

    #[test]
    fn jacobsthal_is_minus_a_up_to_ten_thousand() {
        for p in (5..=10_000).filter(|&p| p % 4 == 1 && is_prime(p)) {
            let c = ctx(p);
            assert_eq!(c.jacobsthal_a().unwrap(), -c.decomp().unwrap().a, "p = {p}");
        }
    }

    #[test]
    fn perm_sign_examples() {
        let c = ctx(13);
        assert_eq!(c.perm_sign_cycles(1).unwrap(), 1);
        assert_eq!(c.perm_sign_cycles(4).unwrap(), -1);
        assert_eq!(c.perm_sign_cycles(3).unwrap(), 1);
        assert_eq!(c.perm_sign_formula(4).unwrap(), -1);
        assert_eq!(c.perm_sign_formula(3).unwrap(), 1);
        assert_eq!(ctx(17).perm_sign_formula(1).unwrap(), 1);
        assert!(matches!(
            c.perm_sign_cycles(2),
            Err(Error::NotQuadraticResidue { d: 2, p: 13 })
        ));
        assert!(c.perm_sign_formula(0).is_err());
        assert!(ctx(7).perm_sign_cycles(2).is_err());
    }

    #[test]
    fn generator_and_helpers() {
        assert_eq!(find_generator(13), 2);
        assert_eq!(find_generator(7), 3);
        assert_eq!(mod_pow(4, 3, 13), 12);
        let r = sqrt_mod(12, 13).unwrap();
        assert!(r == 5 || r == 8);
        assert_eq!(sqrt_mod(2, 13), None);
        let c = ctx(13);
        for x in 1..13 {
            assert_eq!(mod_pow(2, c.dlog(x).unwrap(), 13), x as u64);
        }
        assert_eq!(c.dlog(0), None);
    }

    #[test]
    fn perfect_squares() {
        assert_eq!(
            is_perfect_square(&BigInt::from(441)),
            Some(BigInt::from(21))
        );
        assert_eq!(is_perfect_square(&BigInt::from(0)), Some(BigInt::from(0)));
        assert_eq!(is_perfect_square(&BigInt::from(-27)), None);
        assert_eq!(is_perfect_square(&BigInt::from(9)), Some(BigInt::from(3)));
        assert_eq!(is_perfect_square(&BigInt::from(10)), None);
    }

    proptest! {
        #[test]
        fn sqrt_mod_squares_back(p in (3u64..20_000).prop_filter("prime", |&p| is_prime(p)), x in 0u64..1_000_000) {
            let x = x % p;
            match sqrt_mod(x, p) {
                Some(r) => prop_assert_eq!(mod_mul(r, r, p), x),
                None => prop_assert_eq!(ctx(p).legendre(x as i64), -1),
            }
        }

        #[test]
        fn perfect_square_roundtrip(r in any::<u64>(), bump in 1u64..1000) {
            let sq = BigInt::from(r) * BigInt::from(r);
            prop_assert_eq!(is_perfect_square(&sq), Some(BigInt::from(r)));
            if r > 0 {
                prop_assert_eq!(is_perfect_square(&(sq + BigInt::from(bump.min(r.saturating_mul(2))))), None);
            }
        }
    }
}

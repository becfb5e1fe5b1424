//! Units and class numbers of `ℚ(√p)` for `p ≡ 1 (mod 4)`, and Chapman's
//! determinant formulas that depend on them.
//!
//! The fundamental unit is found exactly from the continued fraction of
//! `(1 + √p)/2`. The class number comes from the analytic sine product,
//! evaluated with `astro-float`. That is the only floating dependence here,
//! and the result is rejected unless it lies very close to an integer.

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::hp::{check, consts, from_bigint, to_fixed, DEFAULT_PRECISION_BITS, RM};
use crate::linalg::det_affine;
use crate::matrix::build_chapman;
use crate::nt::{is_prime, PrimeCtx};
use crate::poly::IntPoly;

/// Largest allowed `|h − round(h)|` before more precision is requested.
pub const CLASS_NUMBER_TOLERANCE: f64 = 1e-6;
/// Precision ceiling for [`class_number_auto`].
pub const MAX_PRECISION_BITS: usize = 4096;

/// `(u + v√p)/2` with `u ≡ v (mod 2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadUnit {
    pub u: BigInt,
    pub v: BigInt,
}

impl QuadUnit {
    pub fn one() -> Self {
        QuadUnit {
            u: BigInt::from(2),
            v: BigInt::zero(),
        }
    }

    /// `u² − p v²`, which is `±4` for a unit.
    pub fn norm4(&self, p: u64) -> BigInt {
        &self.u * &self.u - BigInt::from(p) * &self.v * &self.v
    }

    pub fn is_unit(&self, p: u64) -> bool {
        (&self.u - &self.v).is_even() && self.norm4(p).abs() == BigInt::from(4)
    }

    pub fn mul(&self, o: &Self, p: u64) -> Self {
        let u2 = &self.u * &o.u + BigInt::from(p) * &self.v * &o.v;
        let v2 = &self.u * &o.v + &o.u * &self.v;
        debug_assert!(u2.is_even() && v2.is_even());
        QuadUnit {
            u: u2 / 2,
            v: v2 / 2,
        }
    }

    pub fn pow(&self, mut e: u64, p: u64) -> Self {
        let mut base = self.clone();
        let mut acc = QuadUnit::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, p);
            }
            base = base.mul(&base, p);
            e >>= 1;
        }
        acc
    }

    /// `ln((u + v√p)/2)`.
    fn ln(&self, p: u64, bits: usize) -> Result<BigFloat> {
        let mut cc = consts()?;
        let root = BigFloat::from_u64(p, bits).sqrt(bits, RM);
        let value = from_bigint(&self.u, bits)
            .add(&from_bigint(&self.v, bits).mul(&root, bits, RM), bits, RM)
            .div(&BigFloat::from_u64(2, bits), bits, RM);
        check(value.ln(bits, RM, &mut cc), "log of unit")
    }
}

fn require_prime_one_mod_four(p: u64) -> Result<()> {
    if !is_prime(p) || p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    if p % 4 != 1 {
        return Err(Error::ResidueClass { p, expected: 1 });
    }
    Ok(())
}

/// Smallest unit `> 1` of the ring of integers: minimal `v > 0` with
/// `u² − p v² = ±4`.
pub fn fundamental_unit(p: u64) -> Result<QuadUnit> {
    require_prime_one_mod_four(p)?;
    // ω = (1 + √p)/2 is reduced, so its expansion (P + √p)/Q keeps Q > 0.
    // Every unit h − kω with k > 0 shows up as a convergent h/k.
    let d = BigInt::from(p);
    let root = d.sqrt();
    let (mut pp, mut qq) = (BigInt::one(), BigInt::from(2));
    let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
    let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
    loop {
        let a = (&pp + &root).div_floor(&qq);
        let h_next = &a * &h + &h_prev;
        let k_next = &a * &k + &k_prev;
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        // h − kω = ((2h − k) − k√p)/2, conjugate to (2h − k + k√p)/2.
        let unit = QuadUnit {
            u: BigInt::from(2) * &h - &k,
            v: k.clone(),
        };
        if unit.is_unit(p) {
            return Ok(unit);
        }
        pp = &a * &qq - &pp;
        qq = (&d - &pp * &pp) / &qq;
    }
}

/// A class number value with its distance from the nearest integer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassNumberEstimate {
    pub h: u64,
    pub distance: f64,
    pub precision_bits: usize,
}

/// `h = ln(∏_{χ(a)=−1} sin(πa/p) / ∏_{χ(a)=1} sin(πa/p)) / (2 ln ε)`.
pub fn class_number_estimate(p: u64, precision_bits: usize) -> Result<ClassNumberEstimate> {
    require_prime_one_mod_four(p)?;
    let ctx = PrimeCtx::new(p)?;
    let eps = fundamental_unit(p)?;
    let bits = precision_bits + 32;
    let mut cc = consts()?;
    let pi_over_p = cc.pi(bits, RM).div(&BigFloat::from_u64(p, bits), bits, RM);
    let mut sum = BigFloat::from_u64(0, bits);
    for a in 1..p {
        let s = pi_over_p
            .mul(&BigFloat::from_u64(a, bits), bits, RM)
            .sin(bits, RM, &mut cc);
        let l = check(s.ln(bits, RM, &mut cc), "log sine")?;
        sum = match ctx.legendre(a as i64) {
            1 => sum.sub(&l, bits, RM),
            _ => sum.add(&l, bits, RM),
        };
    }
    let denom = eps.ln(p, bits)?.mul(&BigFloat::from_u64(2, bits), bits, RM);
    let h = check(sum.div(&denom, bits, RM), "class number")?;
    const FRAC: u32 = 64;
    let fixed = to_fixed(&h, FRAC)?;
    let nearest: BigInt = (&fixed + (BigInt::one() << (FRAC - 1) as usize)) >> FRAC as usize;
    let off = &fixed - (&nearest << FRAC as usize);
    let distance = crate::hp::fixed_to_f64(&off, FRAC).abs();
    let h = u64::try_from(&nearest)
        .ok()
        .filter(|&h| h > 0)
        .ok_or_else(|| {
            Error::Inconsistent(format!("class number of Q(√{p}) evaluated to {nearest}"))
        })?;
    Ok(ClassNumberEstimate {
        h,
        distance,
        precision_bits,
    })
}

/// The class number, or [`Error::InsufficientPrecision`] if the analytic
/// value is not within [`CLASS_NUMBER_TOLERANCE`] of an integer.
pub fn class_number(p: u64, precision_bits: usize) -> Result<u64> {
    let est = class_number_estimate(p, precision_bits)?;
    if est.distance > CLASS_NUMBER_TOLERANCE {
        return Err(Error::InsufficientPrecision {
            bits: precision_bits,
            what: format!("class number of Q(√{p}) (off by {:e})", est.distance),
        });
    }
    Ok(est.h)
}

/// [`class_number`], doubling the precision on each rejection.
pub fn class_number_auto(p: u64, precision_bits: usize) -> Result<u64> {
    let mut bits = precision_bits.max(64);
    loop {
        match class_number(p, bits) {
            Err(Error::InsufficientPrecision { .. }) if bits * 2 <= MAX_PRECISION_BITS => bits *= 2,
            other => return other,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassData {
    pub eps: QuadUnit,
    pub h: u64,
    /// `ε^h = a_p + b_p√p` with `a_p = u/2`, `b_p = v/2`.
    pub eps_h: QuadUnit,
}

pub fn class_data(p: u64, precision_bits: usize) -> Result<ClassData> {
    let eps = fundamental_unit(p)?;
    let h = class_number_auto(p, precision_bits)?;
    let eps_h = eps.pow(h, p);
    Ok(ClassData { eps, h, eps_h })
}

/// Chapman's closed form for `det C_p(x)` (or `det C*_p(x)`).
///
/// For `p ≡ 1 (mod 4)` it needs the class data; the factor `2^{(p−1)/2}`
/// absorbs the halves in `a_p`, `b_p`.
pub fn chapman_closed_form(
    ctx: &PrimeCtx,
    star: bool,
    class: Option<&ClassData>,
) -> Result<IntPoly> {
    let n = ctx.n() as usize;
    let pow2 = BigInt::one() << n;
    if ctx.cls() == 3 {
        let neg = -pow2;
        return Ok(if star {
            IntPoly::constant(neg)
        } else {
            IntPoly::new(vec![BigInt::zero(), neg])
        });
    }
    let class =
        class.ok_or_else(|| Error::Inconsistent("class data required for p ≡ 1 (mod 4)".into()))?;
    let half = if ((ctx.p() - 1) / 4).is_multiple_of(2) {
        BigInt::one() << (n - 1)
    } else {
        -(BigInt::one() << (n - 1))
    };
    let (u, v) = (&class.eps_h.u, &class.eps_h.v);
    let p = BigInt::from(ctx.p());
    Ok(if star {
        // ±2^n (p b x − a)
        IntPoly::new(vec![-(&half * u), &half * &p * v])
    } else {
        // ±2^n (b − a x)
        IntPoly::new(vec![&half * v, -(&half * u)])
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChapmanOutcome {
    pub actual: IntPoly,
    pub expected: IntPoly,
}

impl ChapmanOutcome {
    pub fn holds(&self) -> bool {
        self.actual == self.expected
    }
}

/// The exact determinant next to the closed form.
pub fn chapman_compare(
    ctx: &PrimeCtx,
    star: bool,
    class: Option<&ClassData>,
) -> Result<ChapmanOutcome> {
    Ok(ChapmanOutcome {
        actual: det_affine(&build_chapman(ctx, star))?,
        expected: chapman_closed_form(ctx, star, class)?,
    })
}

/// Computes class data when needed, then compares.
pub fn chapman_verify(ctx: &PrimeCtx, star: bool) -> Result<bool> {
    let class = match ctx.cls() {
        1 => Some(class_data(ctx.p(), DEFAULT_PRECISION_BITS)?),
        _ => None,
    };
    Ok(chapman_compare(ctx, star, class.as_ref())?.holds())
}

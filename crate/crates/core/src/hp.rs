//! High-precision real and complex values.
//!
//! Transcendental functions come from `astro-float`. Bulk arithmetic on
//! sums of roots of unity runs in binary fixed point on `BigInt`, where a
//! value `x` is stored as `⌊x · 2^frac_bits⌋`.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use ethnum::I256;
use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default mantissa width for floating computations.
pub const DEFAULT_PRECISION_BITS: usize = 128;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

pub(crate) fn consts() -> Result<Consts> {
    Consts::new().map_err(|e| Error::Inconsistent(format!("astro-float constants: {e:?}")))
}

pub(crate) fn check(x: BigFloat, what: &str) -> Result<BigFloat> {
    if x.is_nan() || x.is_inf() {
        return Err(Error::Inconsistent(format!("{what} is not finite")));
    }
    Ok(x)
}

/// `⌊x · 2^frac_bits⌋` as an integer.
pub fn to_fixed(x: &BigFloat, frac_bits: u32) -> Result<BigInt> {
    let (words, _, sign, exp, _) = x
        .as_raw_parts()
        .ok_or_else(|| Error::Inconsistent("cannot convert non-finite value".into()))?;
    let bytes: Vec<u8> = words.iter().flat_map(|w| w.to_le_bytes()).collect();
    let mantissa = BigInt::from(BigUint::from_bytes_le(&bytes));
    if mantissa.is_zero() {
        return Ok(mantissa);
    }
    // value = 0.mantissa · 2^exp, the mantissa spanning all words.
    let word_bits = (bytes.len() * 8) as i64;
    let shift = exp as i64 - word_bits + frac_bits as i64;
    let mag = if shift >= 0 {
        mantissa << shift as usize
    } else {
        mantissa >> (-shift) as usize
    };
    Ok(if sign == Sign::Neg { -mag } else { mag })
}

/// Converts an integer to a `BigFloat` of the given precision.
pub(crate) fn from_bigint(v: &BigInt, bits: usize) -> BigFloat {
    let (sign, digits) = v.to_u64_digits();
    let mut acc = BigFloat::from_u64(0, bits);
    let base = BigFloat::from_u64(1, bits).mul(&BigFloat::from_u64(1 << 32, bits), bits, RM);
    let base = base.mul(&BigFloat::from_u64(1 << 32, bits), bits, RM);
    for d in digits.iter().rev() {
        acc = acc
            .mul(&base, bits, RM)
            .add(&BigFloat::from_u64(*d, bits), bits, RM);
    }
    if sign == num_bigint::Sign::Minus {
        acc.neg()
    } else {
        acc
    }
}

/// Nearest `f64` to a fixed-point value.
pub fn fixed_to_f64(raw: &BigInt, frac_bits: u32) -> f64 {
    const KEEP: u64 = 64;
    let drop = raw.magnitude().bits().saturating_sub(KEEP);
    let top: BigInt = raw >> drop as usize;
    let exp = drop as i64 - frac_bits as i64;
    top.to_f64().unwrap_or(f64::NAN) * 2f64.powi(exp.clamp(-1074, 1023) as i32)
}

/// A complex number in fixed point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FixedComplex {
    pub re: BigInt,
    pub im: BigInt,
}

impl FixedComplex {
    pub fn add(&self, o: &Self) -> Self {
        FixedComplex {
            re: &self.re + &o.re,
            im: &self.im + &o.im,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        FixedComplex {
            re: &self.re - &o.re,
            im: &self.im - &o.im,
        }
    }

    pub fn mul(&self, o: &Self, frac_bits: u32) -> Self {
        let re = &self.re * &o.re - &self.im * &o.im;
        let im = &self.re * &o.im + &self.im * &o.re;
        FixedComplex {
            re: re >> frac_bits as usize,
            im: im >> frac_bits as usize,
        }
    }

    pub fn scale(&self, k: i64) -> Self {
        FixedComplex {
            re: &self.re * k,
            im: &self.im * k,
        }
    }

    pub fn re_f64(&self, frac_bits: u32) -> f64 {
        fixed_to_f64(&self.re, frac_bits)
    }

    pub fn im_f64(&self, frac_bits: u32) -> f64 {
        fixed_to_f64(&self.im, frac_bits)
    }

    pub fn abs_f64(&self, frac_bits: u32) -> f64 {
        self.re_f64(frac_bits).hypot(self.im_f64(frac_bits))
    }
}

fn to_i256(v: &BigInt) -> Option<I256> {
    let bytes = v.to_signed_bytes_le();
    if bytes.len() > 32 {
        return None;
    }
    let fill = if v.sign() == num_bigint::Sign::Minus {
        0xff
    } else {
        0
    };
    let mut buf = [fill; 32];
    buf[..bytes.len()].copy_from_slice(&bytes);
    Some(I256::from_le_bytes(buf))
}

fn from_i256(v: I256) -> BigInt {
    BigInt::from_signed_bytes_le(&v.to_le_bytes())
}

/// `ζ_m^t = exp(2πi t/m)` for `t = 0..m`, in fixed point.
///
/// When `frac_bits` leaves room, the table is mirrored in 256-bit integers
/// and [`RootTable::eval`] accumulates there without allocating.
#[derive(Clone, Debug)]
pub struct RootTable {
    m: usize,
    frac_bits: u32,
    roots: Vec<FixedComplex>,
    wide: Option<Vec<(I256, I256)>>,
}

/// Integer bits kept free above the binary point in the 256-bit path.
const WIDE_HEADROOM: u32 = 64;

impl RootTable {
    pub fn new(m: usize, precision_bits: usize) -> Result<Self> {
        let frac_bits = precision_bits as u32;
        let work = precision_bits + 64;
        let mut cc = consts()?;
        let pi = cc.pi(work, RM);
        let two_pi_over_m = pi.mul(&BigFloat::from_u64(2, work), work, RM).div(
            &BigFloat::from_u64(m as u64, work),
            work,
            RM,
        );
        let roots = (0..m)
            .map(|t| {
                let angle = two_pi_over_m.mul(&BigFloat::from_u64(t as u64, work), work, RM);
                let c = check(angle.cos(work, RM, &mut cc), "cos")?;
                let s = check(angle.sin(work, RM, &mut cc), "sin")?;
                Ok(FixedComplex {
                    re: to_fixed(&c, frac_bits)?,
                    im: to_fixed(&s, frac_bits)?,
                })
            })
            .collect::<Result<Vec<FixedComplex>>>()?;
        let wide = (frac_bits + WIDE_HEADROOM < 255)
            .then(|| {
                roots
                    .iter()
                    .map(|z| Some((to_i256(&z.re)?, to_i256(&z.im)?)))
                    .collect()
            })
            .flatten();
        Ok(RootTable {
            m,
            frac_bits,
            roots,
            wide,
        })
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn root(&self, t: u64) -> &FixedComplex {
        &self.roots[(t % self.m as u64) as usize]
    }

    /// `Σ_t counts[t] ζ^t`.
    pub fn eval(&self, counts: &[i64]) -> FixedComplex {
        let weight: u128 = counts.iter().map(|c| c.unsigned_abs() as u128).sum();
        if let Some(wide) = &self.wide {
            if weight < 1u128 << (WIDE_HEADROOM - 2) {
                let (mut re, mut im) = (I256::ZERO, I256::ZERO);
                for (t, &c) in counts.iter().enumerate().filter(|(_, &c)| c != 0) {
                    let c = I256::from(c);
                    re += wide[t].0 * c;
                    im += wide[t].1 * c;
                }
                return FixedComplex {
                    re: from_i256(re),
                    im: from_i256(im),
                };
            }
        }
        self.eval_big(counts)
    }

    fn eval_big(&self, counts: &[i64]) -> FixedComplex {
        counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .fold(FixedComplex::default(), |acc, (t, &c)| {
                acc.add(&self.roots[t].scale(c))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_conversion() {
        let half = BigFloat::from_f64(0.5, 128);
        assert_eq!(to_fixed(&half, 10).unwrap(), BigInt::from(512));
        let neg = BigFloat::from_f64(-3.0, 128);
        assert_eq!(to_fixed(&neg, 4).unwrap(), BigInt::from(-48));
        assert_eq!(
            to_fixed(&BigFloat::from_f64(0.0, 128), 8).unwrap(),
            BigInt::zero()
        );
        assert_eq!(fixed_to_f64(&BigInt::from(-48), 4), -3.0);
        assert_eq!(fixed_to_f64(&(BigInt::from(5) << 200), 200), 5.0);
        assert_eq!(fixed_to_f64(&BigInt::from(3), 100), 3.0 * 2f64.powi(-100));
    }

    #[test]
    fn bigint_to_float_roundtrip() {
        let v: BigInt = "-123456789012345678901234567890".parse().unwrap();
        let f = from_bigint(&v, 256);
        assert_eq!(to_fixed(&f, 0).unwrap(), v);
    }

    #[test]
    fn roots_of_unity() {
        let t = RootTable::new(12, 128).unwrap();
        let fb = t.frac_bits();
        assert!((t.root(0).re_f64(fb) - 1.0).abs() < 1e-15);
        assert!((t.root(3).im_f64(fb) - 1.0).abs() < 1e-15);
        assert!((t.root(2).re_f64(fb) - 0.5).abs() < 1e-15);
        // Σ_t ζ^t = 0, to far better than double precision.
        let s = t.eval(&[1; 12]);
        assert!(s.re.magnitude().bits() < 8 && s.im.magnitude().bits() < 8);
        // ζ^5 · ζ^9 = ζ^2.
        let prod = t.root(5).mul(t.root(9), fb);
        assert!(prod.sub(t.root(2)).abs_f64(fb) < 1e-35);
    }

    #[test]
    fn wide_and_big_paths_agree() {
        let t = RootTable::new(36, 128).unwrap();
        assert!(t.wide.is_some());
        let counts: Vec<i64> = (0..36).map(|i| (i * 7 % 11) as i64 - 5).collect();
        assert_eq!(t.eval(&counts), t.eval_big(&counts));
        assert!(RootTable::new(12, 256).unwrap().wide.is_none());
        for v in [
            "0",
            "-1",
            "123456789012345678901234567890",
            "-340282366920938463463374607431768211457",
        ] {
            let b: BigInt = v.parse().unwrap();
            assert_eq!(from_i256(to_i256(&b).unwrap()), b);
        }
        assert!(to_i256(&(BigInt::from(1) << 300)).is_none());
    }
}

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Dense univariate polynomial over ℤ, lowest degree first. The leading
/// coefficient is never zero; the zero polynomial has no coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::new(vec![c.into()])
    }

    /// `x`.
    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    /// `x^k − 1`.
    pub fn x_pow_minus_one(k: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); k + 1];
        coeffs[0] = -BigInt::one();
        coeffs[k] = BigInt::one();
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    /// Coefficient of `x^i`, zero past the degree.
    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Division by a monic divisor: `(quotient, remainder)`.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        if !divisor.is_monic() {
            return Err(Error::InexactDivision("divisor is not monic".into()));
        }
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((IntPoly::zero(), self.clone()));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for shift in (0..quot.len()).rev() {
            let lead = std::mem::take(&mut rem[shift + dd]);
            if lead.is_zero() {
                continue;
            }
            for (i, d) in divisor.coeffs[..dd].iter().enumerate() {
                rem[shift + i] -= &lead * d;
            }
            quot[shift] = lead;
        }
        rem.truncate(dd);
        Ok((IntPoly::new(quot), IntPoly::new(rem)))
    }

    /// Quotient by a monic divisor that must divide `self`.
    pub fn div_exact(&self, divisor: &IntPoly) -> Result<IntPoly> {
        let (q, r) = self.div_rem_monic(divisor)?;
        if !r.is_zero() {
            return Err(Error::InexactDivision(format!("({self}) / ({divisor})")));
        }
        Ok(q)
    }

    /// Product of `(x − r)` over the given roots.
    pub fn from_roots(roots: impl IntoIterator<Item = BigInt>) -> Self {
        roots.into_iter().fold(Self::constant(1), |acc, r| {
            &acc * &IntPoly::new(vec![-r, BigInt::one()])
        })
    }

    /// Interpolates the unique polynomial of degree ≤ len − 1 through
    /// `(k, values[k])` for `k = 0..len`, using forward differences.
    /// Every difference quotient must be an exact integer.
    pub fn interpolate_consecutive(values: &[BigInt]) -> Result<IntPoly> {
        let mut diffs = values.to_vec();
        let mut newton = Vec::with_capacity(values.len());
        let mut factorial = BigInt::one();
        for j in 0..values.len() {
            if j > 0 {
                factorial *= j;
                for i in 0..diffs.len() - 1 {
                    diffs[i] = &diffs[i + 1] - &diffs[i];
                }
                diffs.pop();
            }
            let (q, r) = diffs[0].div_rem(&factorial);
            if !r.is_zero() {
                return Err(Error::InexactDivision(format!(
                    "forward difference {} not divisible by {j}!",
                    diffs[0]
                )));
            }
            newton.push(q);
        }
        let mut acc = IntPoly::zero();
        let mut falling = IntPoly::constant(1);
        for (j, c) in newton.iter().enumerate() {
            acc = &acc + &falling.scale(c);
            falling = &falling * &IntPoly::from_i64s(&[-(j as i64), 1]);
        }
        Ok(acc)
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..len).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..len).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if i == 0 || !mag.is_one() {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_form_and_display() {
        let p = IntPoly::from_i64s(&[5, 0, -6, 0, 1, 0, 0]);
        assert_eq!(p.degree(), Some(4));
        assert_eq!(p.to_string(), "x^4 - 6x^2 + 5");
        assert_eq!(IntPoly::from_i64s(&[-2, 2]).to_string(), "2x - 2");
        assert_eq!(IntPoly::from_i64s(&[0, -8]).to_string(), "-8x");
        assert_eq!(IntPoly::from_i64s(&[0, 0]).to_string(), "0");
        assert!(IntPoly::from_i64s(&[0]).is_zero());
        assert_eq!(IntPoly::from_i64s(&[-1, 1]).to_string(), "x - 1");
    }

    #[test]
    fn division_by_monic() {
        let x4 = IntPoly::x_pow_minus_one(4);
        let x1 = IntPoly::from_i64s(&[-1, 1]);
        assert_eq!(
            x4.div_exact(&x1).unwrap(),
            IntPoly::from_i64s(&[1, 1, 1, 1])
        );
        let (q, r) = IntPoly::from_i64s(&[1, 0, 1]).div_rem_monic(&x1).unwrap();
        assert_eq!(q, IntPoly::from_i64s(&[1, 1]));
        assert_eq!(r, IntPoly::constant(2));
        assert!(IntPoly::from_i64s(&[1, 0, 1]).div_exact(&x1).is_err());
        assert!(x4.div_rem_monic(&IntPoly::from_i64s(&[1, 2])).is_err());
    }

    #[test]
    fn interpolation_rejects_non_integral_data() {
        // x(x − 1)/2 takes integer values but has non-integer coefficients.
        let vals: Vec<BigInt> = [0, 0, 1].iter().map(|&v| BigInt::from(v)).collect();
        assert!(matches!(
            IntPoly::interpolate_consecutive(&vals),
            Err(Error::InexactDivision(_))
        ));
    }

    proptest! {
        #[test]
        fn interpolation_recovers_integer_polynomials(coeffs in prop::collection::vec(-50i64..50, 1..8)) {
            let p = IntPoly::from_i64s(&coeffs);
            let pts = coeffs.len();
            let vals: Vec<BigInt> = (0..pts).map(|k| p.eval(&BigInt::from(k))).collect();
            prop_assert_eq!(IntPoly::interpolate_consecutive(&vals).unwrap(), p);
        }

        #[test]
        fn division_identity(a in prop::collection::vec(-20i64..20, 0..9), b in prop::collection::vec(-20i64..20, 0..4)) {
            let mut b = b;
            b.push(1);
            let (a, b) = (IntPoly::from_i64s(&a), IntPoly::from_i64s(&b));
            let (q, r) = a.div_rem_monic(&b).unwrap();
            prop_assert_eq!(&(&q * &b) + &r, a);
            prop_assert!(r.degree().is_none_or(|d| d < b.degree().unwrap()));
        }
    }
}

//! Exact determinants and characteristic polynomials over ℤ.
//!
//! `det_exact` is fraction-free Gaussian elimination (Bareiss). Every
//! intermediate entry at step k is a (k+1)×(k+1) minor of the input, so the
//! division by the previous pivot is exact. Elimination starts on `i128`
//! with checked arithmetic and moves the working matrix to `BigInt` at the
//! first overflow, resuming from the row where it happened.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::matrix::{AffineMatrix, IntMatrix};
use crate::nt::{mod_mul, mod_pow};
use crate::poly::IntPoly;

pub fn det_exact(m: &IntMatrix) -> BigInt {
    let n = m.dim();
    if n == 0 {
        return BigInt::from(1);
    }
    let small: Option<Vec<i128>> = m
        .entries()
        .iter()
        .map(|v| v.to_i64().map(i128::from))
        .collect();
    match small {
        Some(a) => bareiss_small(a, n),
        None => bareiss_big(
            m.entries().to_vec(),
            n,
            Resume {
                step: 0,
                row: 1,
                prev: BigInt::from(1),
                negated: false,
            },
        ),
    }
}

struct Resume {
    step: usize,
    /// First row of `step` still holding pre-step values.
    row: usize,
    prev: BigInt,
    negated: bool,
}

/// Moves a nonzero entry of column `k` into the pivot position. Returns
/// `None` when the column is zero from row `k` down.
fn find_pivot<T>(a: &mut [T], n: usize, k: usize, is_zero: impl Fn(&T) -> bool) -> Option<bool> {
    if !is_zero(&a[k * n + k]) {
        return Some(false);
    }
    let r = (k + 1..n).find(|&r| !is_zero(&a[r * n + k]))?;
    for c in 0..n {
        a.swap(k * n + c, r * n + c);
    }
    Some(true)
}

fn bareiss_small(mut a: Vec<i128>, n: usize) -> BigInt {
    let mut prev: i128 = 1;
    let mut negated = false;
    let mut buf = vec![0i128; n];
    for k in 0..n - 1 {
        match find_pivot(&mut a, n, k, |v| *v == 0) {
            None => return BigInt::zero(),
            Some(swapped) => negated ^= swapped,
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let aik = a[i * n + k];
            let mut overflow = false;
            for j in k + 1..n {
                let v = pivot
                    .checked_mul(a[i * n + j])
                    .zip(aik.checked_mul(a[k * n + j]))
                    .and_then(|(x, y)| x.checked_sub(y));
                match v {
                    Some(v) => {
                        debug_assert_eq!(v % prev, 0);
                        buf[j] = v / prev;
                    }
                    None => {
                        overflow = true;
                        break;
                    }
                }
            }
            if overflow {
                let big = a.into_iter().map(BigInt::from).collect();
                return bareiss_big(
                    big,
                    n,
                    Resume {
                        step: k,
                        row: i,
                        prev: BigInt::from(prev),
                        negated,
                    },
                );
            }
            a[i * n + k + 1..(i + 1) * n].copy_from_slice(&buf[k + 1..n]);
            a[i * n + k] = 0;
        }
        prev = pivot;
    }
    let det = BigInt::from(a[n * n - 1]);
    if negated {
        -det
    } else {
        det
    }
}

fn bareiss_big(mut a: Vec<BigInt>, n: usize, resume: Resume) -> BigInt {
    let Resume {
        step,
        row,
        mut prev,
        mut negated,
    } = resume;
    for k in step..n.saturating_sub(1) {
        let first_row = if k == step { row } else { k + 1 };
        if first_row == k + 1 {
            match find_pivot(&mut a, n, k, Zero::is_zero) {
                None => return BigInt::zero(),
                Some(swapped) => negated ^= swapped,
            }
        }
        let pivot = a[k * n + k].clone();
        for i in first_row..n {
            let aik = std::mem::take(&mut a[i * n + k]);
            for j in k + 1..n {
                let v = &pivot * &a[i * n + j] - &aik * &a[k * n + j];
                debug_assert!((&v % &prev).is_zero());
                a[i * n + j] = v / &prev;
            }
        }
        prev = pivot;
    }
    let det = a.pop().expect("nonempty matrix");
    if negated {
        -det
    } else {
        det
    }
}

/// Determinant modulo the prime `q` by ordinary elimination over F_q.
pub fn det_mod(m: &IntMatrix, q: u64) -> u64 {
    let n = m.dim();
    let qb = BigInt::from(q);
    let mut a: Vec<u64> = m
        .entries()
        .iter()
        .map(|v| {
            let r = v % &qb;
            let r = if r < BigInt::zero() { r + &qb } else { r };
            r.to_u64().expect("reduced below q")
        })
        .collect();
    // Products of residues below 2^32 fit in a u64.
    let small = q <= u32::MAX as u64;
    let mul = |x: u64, y: u64| if small { x * y % q } else { mod_mul(x, y, q) };
    let mut det = 1 % q;
    for k in 0..n {
        let Some(r) = (k..n).find(|&r| a[r * n + k] != 0) else {
            return 0;
        };
        if r != k {
            for c in 0..n {
                a.swap(k * n + c, r * n + c);
            }
            det = (q - det) % q;
        }
        let pivot = a[k * n + k];
        det = mul(det, pivot);
        let inv = mod_pow(pivot, q - 2, q);
        for i in k + 1..n {
            let f = mul(a[i * n + k], inv);
            if f == 0 {
                continue;
            }
            for j in k..n {
                let sub = mul(f, a[k * n + j]);
                let v = a[i * n + j];
                a[i * n + j] = if v >= sub { v - sub } else { v + q - sub };
            }
        }
    }
    det
}

/// Determinant of `[x + c_ij]` as a polynomial in `x`.
///
/// `x·J + C` is a rank-one update of `C`, so the determinant has degree at
/// most one. It is read off from `x = 0, 1` and confirmed at `x = 2`.
pub fn det_affine(m: &AffineMatrix) -> Result<IntPoly> {
    let f0 = det_exact(&m.at(0));
    let f1 = det_exact(&m.at(1));
    let f2 = det_exact(&m.at(2));
    let slope = &f1 - &f0;
    if f2 != &f0 + &slope * 2 {
        return Err(Error::Inconsistent(format!(
            "det of {} is not affine: f(0)={f0}, f(1)={f1}, f(2)={f2}",
            m.tag()
        )));
    }
    Ok(IntPoly::new(vec![f0, slope]))
}

/// `det(xI − M)` by exact evaluation at `x = 0..=dim` and interpolation.
pub fn char_poly(m: &IntMatrix) -> Result<IntPoly> {
    char_poly_with(Exec::default(), m)
}

pub fn char_poly_with(exec: Exec, m: &IntMatrix) -> Result<IntPoly> {
    let dim = m.dim();
    let values = exec.map_range(dim + 1, |k| det_exact(&m.shifted_negation(k as i64)));
    let poly = IntPoly::interpolate_consecutive(&values)?;
    if poly.degree() != Some(dim) || !poly.is_monic() {
        return Err(Error::Inconsistent(format!(
            "characteristic polynomial {poly} is not monic of degree {dim}"
        )));
    }
    Ok(poly)
}

/// Carlitz's `(x² − s p)^{(p−3)/2} (x² − s)` with `s = (−1/p)`, the
/// characteristic polynomial of `[((i − j)/p)]_{1≤i,j≤p−1}`.
pub fn carlitz_closed_form(p: u64) -> IntPoly {
    let s: i64 = if p % 4 == 1 { 1 } else { -1 };
    let a = IntPoly::from_i64s(&[-s * p as i64, 0, 1]);
    let b = IntPoly::from_i64s(&[-s, 0, 1]);
    &a.pow(((p - 3) / 2) as u32) * &b
}

/// ⌈√(∏ ‖row‖²)⌉, the Hadamard bound on |det M| rounded up once.
pub fn hadamard_bound(m: &IntMatrix) -> BigInt {
    let n = m.dim();
    let squared: BigInt = (0..n)
        .map(|r| (0..n).map(|c| m.get(r, c) * m.get(r, c)).sum::<BigInt>())
        .product();
    let root = squared.sqrt();
    if &root * &root == squared {
        root
    } else {
        root + 1
    }
}

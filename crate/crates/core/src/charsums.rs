//! Multiplicative characters mod p and the eigenvalues of `M_p = [((i² + j²)/p)]`.
//!
//! Fix a generator `g` of `(ℤ/p)*` and let `χ(g) = ζ = exp(2πi/(p−1))`. For
//! `k = 1..n` the vector `v_k = (χ^k(1²), …, χ^k(n²))` satisfies
//! `M_p v_k = λ_k v_k` with
//!
//! ```text
//! λ_k = Σ_{j=1..n} ((1 + j²)/p) · χ^k(j²) = Σ_j ((1 + j²)/p) · ζ^{2k·log_g j}.
//! ```
//!
//! Each `λ_k` lives in `ℤ[ζ_{p−1}]` and is computed two ways: exactly as a
//! cyclotomic integer, and as a fixed-point complex number. Integrality
//! claims are only ever decided on the exact side or through `det_exact`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{CyclotomicElt, CyclotomicRing};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hp::{FixedComplex, RootTable, DEFAULT_PRECISION_BITS};
use crate::linalg::det_exact;
use crate::matrix::build_s;
use crate::nt::{is_perfect_square, mod_mul, PrimeCtx};

/// Largest p for which exact cyclotomic products are run by default.
pub const EXACT_PRIME_LIMIT: u64 = 61;
/// Absolute tolerance on eigenvector residulas in float mode.
pub const RESIDUAL_TOLERANCE: f64 = 1e-9;
/// Relative tolerance on the imaginary part of each λ_k.
pub const IMAG_TOLERANCE: f64 = 1e-12;

/// Characters `χ^k` of `(ℤ/p)*` as exponents of `ζ_{p−1}`.
#[derive(Clone, Copy, Debug)]
pub struct CharacterTable<'a> {
    ctx: &'a PrimeCtx,
}

impl<'a> CharacterTable<'a> {
    pub fn new(ctx: &'a PrimeCtx) -> Result<Self> {
        if !ctx.has_dlog_table() {
            return Err(Error::Inconsistent(format!(
                "no discrete-log table for p = {}",
                ctx.p()
            )));
        }
        Ok(CharacterTable { ctx })
    }

    /// p − 1.
    pub fn order(&self) -> u64 {
        self.ctx.p() - 1
    }

    /// `t` with `χ^k(x) = ζ^t`, or `None` when `χ^k(x) = 0` (p | x).
    pub fn exponent(&self, k: u64, x: i64) -> Option<u64> {
        let m = self.order();
        self.ctx
            .dlog(x)
            .map(|l| ((k % m) as u128 * l as u128 % m as u128) as u64)
    }
}

/// Which representation `lambda_k` returns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Float { precision_bits: usize },
}

#[derive(Clone, Debug)]
pub enum LambdaValue {
    Exact(CyclotomicElt),
    Float(FixedComplex),
}

/// Per-prime data shared by the λ_k computations.
#[derive(Clone, Debug)]
pub struct CharSums<'a> {
    ctx: &'a PrimeCtx,
    chars: CharacterTable<'a>,
    /// `((1 + j²)/p)` for `j = 1..n`.
    weights: Vec<i8>,
    /// `2·log_g j mod (p − 1)`, the exponent of `χ(j²)`.
    square_logs: Vec<u64>,
}

impl<'a> CharSums<'a> {
    pub fn new(ctx: &'a PrimeCtx) -> Result<Self> {
        let chars = CharacterTable::new(ctx)?;
        let n = ctx.n() as i64;
        let p = ctx.p();
        let weights = (1..=n)
            .map(|j| ctx.legendre(1 + mod_mul(j as u64, j as u64, p) as i64))
            .collect();
        let square_logs = (1..=n)
            .map(|j| chars.exponent(2, j).expect("1 ≤ j < p"))
            .collect();
        Ok(CharSums {
            ctx,
            chars,
            weights,
            square_logs,
        })
    }

    pub fn ctx(&self) -> &PrimeCtx {
        self.ctx
    }

    pub fn characters(&self) -> CharacterTable<'a> {
        self.chars
    }

    fn n(&self) -> usize {
        self.ctx.n() as usize
    }

    fn m(&self) -> usize {
        (self.ctx.p() - 1) as usize
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.n() {
            return Err(Error::IndexOutOfRange { k, n: self.n() });
        }
        Ok(())
    }

    /// Exponent of `χ^k(j²)` for 1-based `j`.
    fn vk_exponent(&self, k: usize, j: usize) -> u64 {
        (k as u64 * self.square_logs[j - 1]) % self.m() as u64
    }

    /// Coefficients of λ_k on `ζ^0 … ζ^{p−2}`.
    pub fn lambda_counts(&self, k: usize) -> Result<Vec<i64>> {
        self.check_k(k)?;
        let mut counts = vec![0i64; self.m()];
        for j in 1..=self.n() {
            counts[self.vk_exponent(k, j) as usize] += self.weights[j - 1] as i64;
        }
        Ok(counts)
    }

    pub fn lambda_exact(&self, ring: &CyclotomicRing, k: usize) -> Result<CyclotomicElt> {
        Ok(ring.from_counts(&self.lambda_counts(k)?))
    }

    pub fn lambda_float(&self, roots: &RootTable, k: usize) -> Result<FixedComplex> {
        Ok(roots.eval(&self.lambda_counts(k)?))
    }

    pub fn lambda_k(&self, k: usize, mode: Mode) -> Result<LambdaValue> {
        Ok(match mode {
            Mode::Exact => LambdaValue::Exact(self.lambda_exact(&self.ring(), k)?),
            Mode::Float { precision_bits } => LambdaValue::Float(
                self.lambda_float(&RootTable::new(self.m(), precision_bits)?, k)?,
            ),
        })
    }

    pub fn ring(&self) -> CyclotomicRing {
        CyclotomicRing::new(self.m())
    }

    /// Row `i` of `M_p v_k` grouped by exponent of ζ.
    fn mv_counts(&self, chi: &[i8], k: usize, i: usize) -> Vec<i64> {
        let p = self.ctx.p();
        let i2 = mod_mul(i as u64, i as u64, p);
        let mut counts = vec![0i64; self.m()];
        for j in 1..=self.n() {
            let j2 = mod_mul(j as u64, j as u64, p);
            let entry = chi[((i2 + j2) % p) as usize];
            if entry != 0 {
                counts[self.vk_exponent(k, j) as usize] += entry as i64;
            }
        }
        counts
    }

    /// `M_p v_k = λ_k v_k` in `ℤ[ζ]`, row by row.
    pub fn eigenvector_exact(&self, ring: &CyclotomicRing, k: usize) -> Result<bool> {
        let lambda = self.lambda_exact(ring, k)?;
        let chi = symbol_table(self.ctx);
        for i in 1..=self.n() {
            let lhs = ring.from_counts(&self.mv_counts(&chi, k, i));
            let rhs = ring.shift(&lambda, self.vk_exponent(k, i));
            if lhs != rhs && !ring.equal(&lhs, &rhs)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `max_i |(M_p v_k)_i − λ_k (v_k)_i|` in fixed point, with λ_k itself.
    pub fn eigenvector_residual(&self, roots: &RootTable, k: usize) -> Result<(FixedComplex, f64)> {
        let lambda = self.lambda_float(roots, k)?;
        let chi = symbol_table(self.ctx);
        let fb = roots.frac_bits();
        let residual = (1..=self.n())
            .map(|i| {
                let mv = roots.eval(&self.mv_counts(&chi, k, i));
                let lv = lambda.mul(roots.root(self.vk_exponent(k, i)), fb);
                mv.sub(&lv).abs_f64(fb)
            })
            .fold(0f64, f64::max);
        Ok((lambda, residual))
    }

    /// The Vandermonde determinant of `[χ^k(i²)]` is nonzero iff the values
    /// `χ(i²)` are distinct. Returns that exact fact and the smallest
    /// pairwise distance `|χ(i²) − χ(j²)|` measured numerically.
    pub fn independence(&self, roots: &RootTable) -> (bool, f64) {
        let mut sorted = self.square_logs.clone();
        sorted.sort_unstable();
        let distinct = sorted.windows(2).all(|w| w[0] != w[1]);
        let fb = roots.frac_bits();
        let pts: Vec<&FixedComplex> = self.square_logs.iter().map(|&e| roots.root(e)).collect();
        let mut min_dist = f64::INFINITY;
        for a in 0..pts.len() {
            for b in a + 1..pts.len() {
                min_dist = min_dist.min(pts[a].sub(pts[b]).abs_f64(fb));
            }
        }
        (distinct, min_dist)
    }
}

fn symbol_table(ctx: &PrimeCtx) -> Vec<i8> {
    (0..ctx.p() as i64).map(|x| ctx.legendre(x)).collect()
}

fn require_one_mod_four(ctx: &PrimeCtx) -> Result<()> {
    if ctx.cls() != 1 {
        return Err(Error::ResidueClass {
            p: ctx.p(),
            expected: 1,
        });
    }
    Ok(())
}

/// One row of an eigenvalue report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub p: u64,
    pub k: usize,
    pub lambda_float: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda_exact: Option<String>,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EigenReport {
    pub p: u64,
    pub generator: u64,
    pub precision_bits: usize,
    pub entries: Vec<EigenEntry>,
    /// Largest `|Im λ_k| / max(1, |λ_k|)`.
    pub max_relative_imag: f64,
    pub max_residual: f64,
    /// Exact `M v_k = λ_k v_k` for every k, when exact mode ran.
    pub exact_eigenvectors: Option<bool>,
    pub independent: bool,
    pub min_separation: f64,
}

impl EigenReport {
    pub fn passed(&self) -> bool {
        self.max_residual < RESIDUAL_TOLERANCE
            && self.max_relative_imag < IMAG_TOLERANCE
            && self.exact_eigenvectors != Some(false)
            && self.independent
            && self.min_separation > 0.0
    }

    /// Real parts of the λ_k, ascending.
    pub fn sorted_lambdas(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().map(|e| e.lambda_float).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// One JSON object per k.
    pub fn to_json_lines(&self) -> Result<String> {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e)?);
            out.push('\n');
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    pub exact: bool,
    pub precision_bits: usize,
    pub exec: Exec,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            exact: false,
            precision_bits: DEFAULT_PRECISION_BITS,
            exec: Exec::default(),
        }
    }
}

fn render_canonical(ring: &CyclotomicRing, e: &CyclotomicElt) -> Result<String> {
    Ok(ring.canonical(e)?.to_string().replace('x', "z"))
}

/// Checks every eigenpair `(λ_k, v_k)` of `M_p`.
pub fn eigen_verify(ctx: &PrimeCtx, opts: EigenOptions) -> Result<EigenReport> {
    require_one_mod_four(ctx)?;
    let sums = CharSums::new(ctx)?;
    let roots = RootTable::new((ctx.p() - 1) as usize, opts.precision_bits)?;
    let ring = opts.exact.then(|| sums.ring());
    let fb = roots.frac_bits();
    let ks: Vec<usize> = (1..=ctx.n() as usize).collect();
    let rows = opts.exec.map(&ks, |&k| -> Result<_> {
        let (lambda, residual) = sums.eigenvector_residual(&roots, k)?;
        let exact = match &ring {
            Some(ring) => {
                let ok = sums.eigenvector_exact(ring, k)?;
                let repr = render_canonical(ring, &sums.lambda_exact(ring, k)?)?;
                Some((ok, repr))
            }
            None => None,
        };
        let re = lambda.re_f64(fb);
        let rel_imag = lambda.im_f64(fb).abs() / re.abs().max(1.0);
        Ok((k, re, rel_imag, residual, exact))
    });
    let mut entries = Vec::with_capacity(ks.len());
    let mut max_residual = 0f64;
    let mut max_relative_imag = 0f64;
    let mut exact_ok = ring.as_ref().map(|_| true);
    for row in rows {
        let (k, re, rel_imag, residual, exact) = row?;
        max_residual = max_residual.max(residual);
        max_relative_imag = max_relative_imag.max(rel_imag);
        if let (Some(flag), Some((ok, _))) = (exact_ok.as_mut(), exact.as_ref()) {
            *flag &= *ok;
        }
        entries.push(EigenEntry {
            p: ctx.p(),
            k,
            lambda_float: re,
            lambda_exact: exact.map(|(_, s)| s),
            residual,
        });
    }
    let (independent, min_separation) = sums.independence(&roots);
    Ok(EigenReport {
        p: ctx.p(),
        generator: ctx.generator(),
        precision_bits: opts.precision_bits,
        entries,
        max_relative_imag,
        max_residual,
        exact_eigenvectors: exact_ok,
        independent,
        min_separation,
    })
}

/// `∏_k λ_k` reduced to a rational integer, next to `det M_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductIdentity {
    pub product: BigInt,
    pub det: BigInt,
}

impl ProductIdentity {
    pub fn holds(&self) -> bool {
        self.product == self.det
    }
}

fn integer_of(ring: &CyclotomicRing, e: &CyclotomicElt, what: &str) -> Result<BigInt> {
    ring.as_integer(e)?
        .ok_or_else(|| Error::Inconsistent(format!("{what} is not a rational integer")))
}

pub fn product_identity(ctx: &PrimeCtx) -> Result<ProductIdentity> {
    require_one_mod_four(ctx)?;
    let sums = CharSums::new(ctx)?;
    let ring = sums.ring();
    let lambdas = (1..=ctx.n() as usize)
        .map(|k| sums.lambda_exact(&ring, k))
        .collect::<Result<Vec<_>>>()?;
    let product = integer_of(&ring, &ring.product(&lambdas), "product of all λ_k")?;
    Ok(ProductIdentity {
        product,
        det: det_exact(&build_s(ctx, 1).to_int_matrix()),
    })
}

/// `λ_n` and `λ_{n/2}` as rational integers (expected −1 and −a).
pub fn special_lambdas(ctx: &PrimeCtx) -> Result<(BigInt, BigInt)> {
    require_one_mod_four(ctx)?;
    let sums = CharSums::new(ctx)?;
    let ring = sums.ring();
    let n = ctx.n() as usize;
    let top = integer_of(&ring, &sums.lambda_exact(&ring, n)?, "λ_n")?;
    let half = integer_of(&ring, &sums.lambda_exact(&ring, n / 2)?, "λ_{n/2}")?;
    Ok((top, half))
}

/// `∏_{k=1}^{(p−5)/4} λ_k` as a rational integer (empty product for p = 5).
pub fn pair_product_exact(ctx: &PrimeCtx) -> Result<BigInt> {
    require_one_mod_four(ctx)?;
    let sums = CharSums::new(ctx)?;
    let ring = sums.ring();
    let upto = ((ctx.p() - 5) / 4) as usize;
    let lambdas = (1..=upto)
        .map(|k| sums.lambda_exact(&ring, k))
        .collect::<Result<Vec<_>>>()?;
    integer_of(&ring, &ring.product(&lambdas), "pair product")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairProduct {
    /// `S(1, p)/a`.
    pub quotient: BigInt,
    /// Its square root, when it is a perfect square.
    pub root: Option<BigInt>,
}

/// `S(1, p)/a = det / (λ_n · λ_{n/2})` and its integer square root.
pub fn pair_product_square(ctx: &PrimeCtx) -> Result<PairProduct> {
    require_one_mod_four(ctx)?;
    let a = BigInt::from(ctx.decomp().expect("p ≡ 1 (mod 4)").a);
    let det = det_exact(&build_s(ctx, 1).to_int_matrix());
    let (quotient, rem) = det.div_rem(&a);
    if !rem.is_zero() {
        return Err(Error::InexactDivision(format!(
            "S(1,{}) = {det} by a = {a}",
            ctx.p()
        )));
    }
    let root = is_perfect_square(&quotient);
    Ok(PairProduct { quotient, root })
}

/// `Σ_i ((i² + j²)/p)(i/p) = −a (j/p)` for every `j = 1..n`.
pub fn row_identity_check(ctx: &PrimeCtx) -> Result<bool> {
    Ok(row_identity_failure(ctx)?.is_none())
}

/// First `j` where the row identity fails, if any.
pub fn row_identity_failure(ctx: &PrimeCtx) -> Result<Option<u64>> {
    require_one_mod_four(ctx)?;
    let p = ctx.p();
    let a = ctx.decomp().expect("p ≡ 1 (mod 4)").a;
    let chi = symbol_table(ctx);
    let squares: Vec<u64> = (1..=ctx.n()).map(|i| mod_mul(i, i, p)).collect();
    for j in 1..=ctx.n() {
        let j2 = squares[j as usize - 1];
        let lhs: i64 = (1..=ctx.n())
            .map(|i| (chi[((squares[i as usize - 1] + j2) % p) as usize] * chi[i as usize]) as i64)
            .sum();
        if lhs != -a * chi[j as usize] as i64 {
            return Ok(Some(j));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(p: u64) -> PrimeCtx {
        PrimeCtx::new(p).unwrap()
    }

    #[test]
    fn character_table_basics() {
        let c = ctx(13);
        let t = CharacterTable::new(&c).unwrap();
        assert_eq!(t.order(), 12);
        assert_eq!(t.exponent(1, 0), None);
        for x in 1..13i64 {
            for y in 1..13i64 {
                let lhs = t.exponent(5, x * y).unwrap();
                let rhs = (t.exponent(5, x).unwrap() + t.exponent(5, y).unwrap()) % 12;
                assert_eq!(lhs, rhs);
            }
            // χ^{p−1} is trivial and χ^n is the Legendre symbol.
            assert_eq!(t.exponent(12, x), Some(0));
            let e = t.exponent(6, x).unwrap();
            assert_eq!(if e == 0 { 1 } else { -1 }, c.legendre(x));
        }
    }

    #[test]
    fn lambda_examples() {
        let c13 = ctx(13);
        let s = CharSums::new(&c13).unwrap();
        let ring = s.ring();
        assert_eq!(
            ring.as_integer(&s.lambda_exact(&ring, 6).unwrap()).unwrap(),
            Some(BigInt::from(-1))
        );
        assert_eq!(
            ring.as_integer(&s.lambda_exact(&ring, 3).unwrap()).unwrap(),
            Some(BigInt::from(3))
        );
        let c5 = ctx(5);
        let s5 = CharSums::new(&c5).unwrap();
        let r5 = s5.ring();
        assert_eq!(
            r5.as_integer(&s5.lambda_exact(&r5, 1).unwrap()).unwrap(),
            Some(BigInt::from(-1))
        );
        assert!(matches!(
            s5.lambda_counts(0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            s5.lambda_counts(3),
            Err(Error::IndexOutOfRange { .. })
        ));
        match s
            .lambda_k(
                6,
                Mode::Float {
                    precision_bits: 128,
                },
            )
            .unwrap()
        {
            LambdaValue::Float(z) => assert!((z.re_f64(128) + 1.0).abs() < 1e-30),
            LambdaValue::Exact(_) => unreachable!(),
        }
    }

    #[test]
    fn eigen_reports() {
        let r = eigen_verify(
            &ctx(13),
            EigenOptions {
                exact: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.exact_eigenvectors, Some(true));
        assert!(r.max_residual < 1e-30, "{}", r.max_residual);
        assert!(r.passed());
        let r29 = eigen_verify(&ctx(29), EigenOptions::default()).unwrap();
        assert!(r29.max_residual < 1e-9 && r29.passed());
        let r5 = eigen_verify(
            &ctx(5),
            EigenOptions {
                exact: true,
                ..Default::default()
            },
        )
        .unwrap();
        let prod: f64 = r5.entries.iter().map(|e| e.lambda_float).product();
        assert!((prod - 1.0).abs() < 1e-12);
        assert!(r5.to_json_lines().unwrap().lines().count() == 2);
        assert!(eigen_verify(&ctx(7), EigenOptions::default()).is_err());
    }

    #[test]
    fn product_and_pair_examples() {
        for (p, det) in [(5u64, 1i64), (13, -27), (17, 441)] {
            let pi = product_identity(&ctx(p)).unwrap();
            assert_eq!(pi.det, BigInt::from(det));
            assert!(pi.holds());
        }
        let expect = [(5u64, 1i64, 1i64), (13, 9, 3), (17, 441, 21)];
        for (p, q, r) in expect {
            let pp = pair_product_square(&ctx(p)).unwrap();
            assert_eq!(pp.quotient, BigInt::from(q));
            assert_eq!(pp.root, Some(BigInt::from(r)));
        }
        assert_eq!(pair_product_exact(&ctx(5)).unwrap(), BigInt::from(1));
        assert_eq!(
            pair_product_exact(&ctx(13)).unwrap().magnitude(),
            BigInt::from(3).magnitude()
        );
    }

    #[test]
    fn row_identity_examples() {
        assert!(row_identity_check(&ctx(13)).unwrap());
        assert!(row_identity_check(&ctx(5)).unwrap());
        assert!(row_identity_check(&ctx(17)).unwrap());
        assert!(row_identity_check(&ctx(7)).is_err());
    }

    #[test]
    fn conjugate_pairing_and_realness() {
        for p in [13u64, 17, 29, 37] {
            let c = ctx(p);
            let s = CharSums::new(&c).unwrap();
            let ring = s.ring();
            let n = c.n() as usize;
            for k in 1..n {
                let l = s.lambda_exact(&ring, k).unwrap();
                assert!(ring.is_real(&l).unwrap());
                let partner = s.lambda_exact(&ring, n - k).unwrap();
                assert!(ring.equal(&partner, &ring.conj(&l)).unwrap());
            }
        }
    }
}

use std::cell::{OnceCell, RefCell};
use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{CheckId, CheckResult, Status, Task};
use crate::charsums::{self, EigenOptions, EXACT_PRIME_LIMIT, IMAG_TOLERANCE, RESIDUAL_TOLERANCE};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hp::DEFAULT_PRECISION_BITS;
use crate::linalg::{carlitz_closed_form, char_poly_with, det_exact};
use crate::matrix::{build_carlitz, build_s, build_sstar};
use crate::nt::{is_perfect_square, PrimeCtx};
use crate::poly::IntPoly;
use crate::quadfield::{self, ClassData, QuadUnit};

type Witness = BTreeMap<String, String>;

fn w<const N: usize>(pairs: [(&str, String); N]) -> Witness {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn root_string(r: &Option<BigInt>) -> String {
    r.as_ref().map_or_else(|| "none".into(), |r| r.to_string())
}

/// Shared per-prime state so determinants and class data are computed once.
struct PrimeWork {
    ctx: PrimeCtx,
    s: RefCell<HashMap<i64, BigInt>>,
    class: OnceCell<std::result::Result<ClassData, String>>,
}

impl PrimeWork {
    fn s(&self, d: i64) -> BigInt {
        if let Some(v) = self.s.borrow().get(&d) {
            return v.clone();
        }
        let v = det_exact(&build_s(&self.ctx, d).to_int_matrix());
        self.s.borrow_mut().insert(d, v.clone());
        v
    }

    fn a(&self) -> Result<BigInt> {
        self.ctx
            .decomp()
            .map(|t| BigInt::from(t.a))
            .ok_or(Error::ResidueClass {
                p: self.ctx.p(),
                expected: 1,
            })
    }

    fn class(&self, bits: usize) -> Result<&ClassData> {
        self.class
            .get_or_init(|| quadfield::class_data(self.ctx.p(), bits).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| Error::Inconsistent(e.clone()))
    }
}

/// Evaluates every task for one prime, in the given order.
pub fn evaluate_prime(p: u64, tasks: &[Task]) -> Vec<CheckResult> {
    let work = match PrimeCtx::new(p) {
        Ok(ctx) => PrimeWork {
            ctx,
            s: RefCell::default(),
            class: OnceCell::new(),
        },
        Err(e) => {
            return tasks.iter().map(|t| failed(t, &e)).collect();
        }
    };
    tasks
        .iter()
        .map(|t| match evaluate(&work, t) {
            Ok((status, witness)) => CheckResult {
                check_id: t.check_id,
                p,
                params: t.params.clone(),
                status,
                witness,
            },
            Err(e) => failed(t, &e),
        })
        .collect()
}

fn failed(t: &Task, e: &Error) -> CheckResult {
    CheckResult {
        check_id: t.check_id,
        p: t.p,
        params: t.params.clone(),
        status: Status::Fail,
        witness: w([("error", e.to_string())]),
    }
}

fn evaluate(work: &PrimeWork, t: &Task) -> Result<(Status, Witness)> {
    let ctx = &work.ctx;
    let p = ctx.p();
    let d = t.params.d.unwrap_or(1);
    let bits = t.params.precision_bits.unwrap_or(DEFAULT_PRECISION_BITS);
    match t.check_id {
        CheckId::TheoremA => {
            let s = work.s(d);
            let a = work.a()?;
            let eps = ctx.epsilon(d);
            let (quotient, rem) = (BigInt::from(eps) * &s).div_rem(&a);
            let root = if rem.is_zero() {
                is_perfect_square(&quotient)
            } else {
                None
            };
            let mut wit = w([
                ("S", s.to_string()),
                ("a", a.to_string()),
                ("epsilon", eps.to_string()),
                ("root", root_string(&root)),
            ]);
            let mut ok = root.is_some();
            match ctx.legendre(d) {
                -1 => ok &= s.is_zero(),
                1 => {
                    let sign = ctx.perm_sign_cycles(d)?;
                    let s1 = work.s(1);
                    ok &= s == BigInt::from(sign) * &s1;
                    wit.insert("sign".into(), sign.to_string());
                    wit.insert("S1".into(), s1.to_string());
                }
                _ => {}
            }
            Ok((verdict(ok), wit))
        }
        CheckId::CorollaryA => {
            let star = det_exact(&build_sstar(ctx).to_int_matrix());
            let s = work.s(1);
            let a = work.a()?;
            let root = is_perfect_square(&-&star);
            let ok = root.is_some() && &star * &a == -&s;
            Ok((
                verdict(ok),
                w([
                    ("S_star", star.to_string()),
                    ("S", s.to_string()),
                    ("a", a.to_string()),
                    ("root", root_string(&root)),
                ]),
            ))
        }
        CheckId::ConjectureA => {
            let s = work.s(1);
            let root = is_perfect_square(&-&s);
            Ok((
                verdict(root.is_some()),
                w([("S", s.to_string()), ("root", root_string(&root))]),
            ))
        }
        CheckId::LemmaSign => {
            let mut residues = 0u64;
            let mut mismatches = Vec::new();
            for q in 1..p as i64 {
                if ctx.legendre(q) == 1 {
                    residues += 1;
                    if ctx.perm_sign_cycles(q)? != ctx.perm_sign_formula(q)? {
                        mismatches.push(q.to_string());
                    }
                }
            }
            let mut wit = w([
                ("residues", residues.to_string()),
                ("mismatches", mismatches.len().to_string()),
            ]);
            if !mismatches.is_empty() {
                wit.insert("mismatched_d".into(), mismatches.join(" "));
            }
            Ok((verdict(mismatches.is_empty()), wit))
        }
        CheckId::Eigen => {
            let opts = EigenOptions {
                exact: p <= EXACT_PRIME_LIMIT,
                precision_bits: bits,
                exec: Exec::Sequential,
            };
            let r = charsums::eigen_verify(ctx, opts)?;
            let exact = r
                .exact_eigenvectors
                .map_or("not-run".into(), |b| b.to_string());
            Ok((
                verdict(r.passed()),
                w([
                    ("max_residual", format!("{:e}", r.max_residual)),
                    ("max_relative_imag", format!("{:e}", r.max_relative_imag)),
                    ("exact_eigenvectors", exact),
                    ("independent", r.independent.to_string()),
                    ("min_separation", format!("{:e}", r.min_separation)),
                ]),
            ))
        }
        CheckId::Product => {
            if p > EXACT_PRIME_LIMIT {
                return Ok((
                    Status::Skipped,
                    w([(
                        "reason",
                        format!("exact cyclotomic products run for p <= {EXACT_PRIME_LIMIT}"),
                    )]),
                ));
            }
            let a = work.a()?;
            let id = charsums::product_identity(ctx)?;
            let (top, half) = charsums::special_lambdas(ctx)?;
            let pair = charsums::pair_product_exact(ctx)?;
            let ok = id.holds()
                && top == BigInt::from(-1)
                && half == -&a
                && &pair * &pair * &a == id.det;
            Ok((
                verdict(ok),
                w([
                    ("product", id.product.to_string()),
                    ("det", id.det.to_string()),
                    ("lambda_n", top.to_string()),
                    ("lambda_half", half.to_string()),
                    ("pair_product", pair.to_string()),
                    ("a", a.to_string()),
                ]),
            ))
        }
        CheckId::Jacobsthal => {
            let sum = ctx.jacobsthal_a()?;
            let t = ctx.decomp().expect("p ≡ 1 (mod 4)");
            Ok((
                verdict(sum == -t.a),
                w([
                    ("sum", sum.to_string()),
                    ("a", t.a.to_string()),
                    ("b", t.b.to_string()),
                ]),
            ))
        }
        CheckId::RowIdentity => {
            let fail = charsums::row_identity_failure(ctx)?;
            let mut wit = w([("a", work.a()?.to_string())]);
            if let Some(j) = fail {
                wit.insert("failing_j".into(), j.to_string());
            }
            Ok((verdict(fail.is_none()), wit))
        }
        CheckId::Carlitz => {
            let cp = char_poly_with(Exec::Sequential, &build_carlitz(ctx).to_int_matrix())?;
            let closed = carlitz_closed_form(p);
            Ok((
                verdict(cp == closed),
                w([
                    ("char_poly", cp.to_string()),
                    ("closed_form", closed.to_string()),
                ]),
            ))
        }
        CheckId::Chapman | CheckId::ChapmanStar => {
            let star = t.check_id == CheckId::ChapmanStar;
            let class = if ctx.cls() == 1 {
                Some(work.class(bits)?)
            } else {
                None
            };
            let out = quadfield::chapman_compare(ctx, star, class)?;
            let mut wit = w([
                ("det_c0", out.actual.coeff(0).to_string()),
                ("det_c1", out.actual.coeff(1).to_string()),
                ("closed_c0", out.expected.coeff(0).to_string()),
                ("closed_c1", out.expected.coeff(1).to_string()),
            ]);
            if let Some(c) = class {
                wit.insert("h".into(), c.h.to_string());
                wit.insert("eps_u".into(), c.eps.u.to_string());
                wit.insert("eps_v".into(), c.eps.v.to_string());
            }
            Ok((verdict(out.holds()), wit))
        }
        CheckId::SunZero => {
            let s = work.s(d);
            Ok((
                verdict(s.is_zero()),
                w([
                    ("S", s.to_string()),
                    ("legendre_d", ctx.legendre(d).to_string()),
                ]),
            ))
        }
        CheckId::SunQr => {
            let s = work.s(d);
            let r = (-&s).mod_floor(&BigInt::from(p));
            let sym = ctx.legendre(r.to_string().parse::<i64>().expect("residue below p"));
            Ok((
                verdict(sym == 1),
                w([
                    ("S", s.to_string()),
                    ("neg_S_mod_p", r.to_string()),
                    ("symbol", sym.to_string()),
                ]),
            ))
        }
    }
}

fn get(r: &CheckResult, key: &str) -> Option<BigInt> {
    r.witness.get(key)?.parse().ok()
}

fn get_f64(r: &CheckResult, key: &str) -> Option<f64> {
    r.witness.get(key)?.parse().ok()
}

/// Recomputes the verdict from the recorded witness strings alone, using
/// only integer arithmetic on them (plus the closed forms, which are
/// rebuilt from `p` and the recorded unit). True iff that verdict agrees
/// with the recorded status. Skipped results always agree.
pub fn revalidate(r: &CheckResult) -> bool {
    if r.status == Status::Skipped {
        return true;
    }
    witness_verdict(r).unwrap_or(false) == (r.status == Status::Pass)
}

fn euler(v: &BigInt, p: u64) -> BigInt {
    let pb = BigInt::from(p);
    v.mod_floor(&pb).modpow(&BigInt::from((p - 1) / 2), &pb)
}

fn witness_verdict(r: &CheckResult) -> Option<bool> {
    let p = r.p;
    let pb = BigInt::from(p);
    Some(match r.check_id {
        CheckId::TheoremA => {
            let (s, a) = (get(r, "S")?, get(r, "a")?);
            let eps = get(r, "epsilon")?;
            let root = get(r, "root")?;
            let mut ok = &a * &root * &root == &eps * &s;
            let d = BigInt::from(r.params.d?);
            let chi = euler(&d, p);
            if chi == &pb - 1 {
                ok &= s.is_zero();
            } else if chi.is_one() {
                ok &= get(r, "sign")? * get(r, "S1")? == s;
            }
            ok
        }
        CheckId::CorollaryA => {
            let (star, s, a, root) = (
                get(r, "S_star")?,
                get(r, "S")?,
                get(r, "a")?,
                get(r, "root")?,
            );
            -&root * &root == star && &star * &a == -s
        }
        CheckId::ConjectureA => {
            let (s, root) = (get(r, "S")?, get(r, "root")?);
            -&root * &root == s
        }
        CheckId::LemmaSign => r.witness.get("mismatches")? == "0",
        CheckId::Eigen => {
            get_f64(r, "max_residual")? < RESIDUAL_TOLERANCE
                && get_f64(r, "max_relative_imag")? < IMAG_TOLERANCE
                && r.witness.get("exact_eigenvectors")? != "false"
                && r.witness.get("independent")? == "true"
                && get_f64(r, "min_separation")? > 0.0
        }
        CheckId::Product => {
            let (prod, det, a) = (get(r, "product")?, get(r, "det")?, get(r, "a")?);
            let pair = get(r, "pair_product")?;
            prod == det
                && get(r, "lambda_n")? == BigInt::from(-1)
                && get(r, "lambda_half")? == -&a
                && &pair * &pair * &a == det
        }
        CheckId::Jacobsthal => {
            let (sum, a, b) = (get(r, "sum")?, get(r, "a")?, get(r, "b")?);
            sum == -&a && &a * &a + BigInt::from(4) * &b * &b == pb
        }
        CheckId::RowIdentity => !r.witness.contains_key("failing_j"),
        CheckId::Carlitz => *r.witness.get("char_poly")? == carlitz_closed_form(p).to_string(),
        CheckId::Chapman | CheckId::ChapmanStar => {
            let det = (get(r, "det_c0")?, get(r, "det_c1")?);
            let closed = (get(r, "closed_c0")?, get(r, "closed_c1")?);
            let mut ok = det == closed;
            if p % 4 == 1 {
                let eps = QuadUnit {
                    u: get(r, "eps_u")?,
                    v: get(r, "eps_v")?,
                };
                let h: u64 = r.witness.get("h")?.parse().ok()?;
                ok &= eps.is_unit(p) && eps.v.is_positive();
                let ctx = PrimeCtx::new(p).ok()?;
                let class = ClassData {
                    eps_h: eps.pow(h, p),
                    eps,
                    h,
                };
                let star = r.check_id == CheckId::ChapmanStar;
                let expected = quadfield::chapman_closed_form(&ctx, star, Some(&class)).ok()?;
                ok &= IntPoly::new(vec![closed.0, closed.1]) == expected;
            }
            ok
        }
        CheckId::SunZero => get(r, "S")?.is_zero(),
        CheckId::SunQr => euler(&-get(r, "S")?, p).is_one(),
    })
}

//! Property tests over random primes and parameters.

use legdet::linalg::{det_exact, det_mod};
use legdet::matrix::{build_s, build_sstar};
use legdet::nt::is_prime;
use legdet::PrimeCtx;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn prime_1_mod_4() -> impl Strategy<Value = u64> {
    (5u64..120).prop_filter("p ≡ 1 (mod 4)", |&p| p % 4 == 1 && is_prime(p))
}

fn is_square(v: &BigInt) -> bool {
    !v.is_negative() && {
        let r = v.sqrt();
        &r * &r == *v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scaled_determinant_is_square(p in prime_1_mod_4(), d in 0i64..1000) {
        let ctx = PrimeCtx::new(p).unwrap();
        let a = ctx.two_square_decompose().unwrap().a;
        let s = det_exact(&build_s(&ctx, d).to_int_matrix());
        let v = BigInt::from(ctx.epsilon(d)) * s;
        prop_assert!((&v % a).is_zero());
        prop_assert!(is_square(&(v / a)));
    }

    #[test]
    fn residue_d_changes_only_the_sign(p in prime_1_mod_4(), k in 1i64..1000) {
        let ctx = PrimeCtx::new(p).unwrap();
        prop_assume!(k % p as i64 != 0);
        let d = k * k;
        let sign = ctx.perm_sign_cycles(d).unwrap();
        prop_assert_eq!(sign, ctx.perm_sign_formula(d).unwrap());
        let s1 = det_exact(&build_s(&ctx, 1).to_int_matrix());
        let sd = det_exact(&build_s(&ctx, d).to_int_matrix());
        prop_assert_eq!(sd, BigInt::from(sign) * s1);
    }

    #[test]
    fn d_is_taken_mod_p(p in prime_1_mod_4(), d in -500i64..500) {
        let ctx = PrimeCtx::new(p).unwrap();
        prop_assert_eq!(build_s(&ctx, d).to_int_matrix(), build_s(&ctx, d.rem_euclid(p as i64)).to_int_matrix());
    }

    #[test]
    fn star_relation(p in prime_1_mod_4()) {
        let ctx = PrimeCtx::new(p).unwrap();
        let a = ctx.two_square_decompose().unwrap().a;
        let s = det_exact(&build_s(&ctx, 1).to_int_matrix());
        let star = det_exact(&build_sstar(&ctx).to_int_matrix());
        prop_assert_eq!(star * a, -s);
    }

    #[test]
    fn modular_image_agrees(p in prime_1_mod_4(), d in 0i64..200, q in 2u64..5_000_000) {
        prop_assume!(is_prime(q));
        let m = build_s(&PrimeCtx::new(p).unwrap(), d).to_int_matrix();
        let exact = det_exact(&m);
        let r = ((exact % q) + q) % q;
        prop_assert_eq!(r, BigInt::from(det_mod(&m, q)));
    }

    #[test]
    fn two_square_is_normalized(p in prime_1_mod_4()) {
        let t = PrimeCtx::new(p).unwrap().two_square_decompose().unwrap();
        prop_assert_eq!(t.a * t.a + 4 * t.b * t.b, p as i64);
        prop_assert_eq!(t.a.rem_euclid(4), 1);
        prop_assert!(t.b > 0);
    }
}

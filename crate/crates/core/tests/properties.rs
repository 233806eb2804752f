use num_bigint::BigInt;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use deltaiso::crystalline::kedlaya_frobenius;
use deltaiso::formalgroup::{FormalGroupLaw, WeierstrassCurve};
use deltaiso::ring::arith::pow_u64;
use deltaiso::ring::univariate::{compose, reversion};
use deltaiso::witt::{check_delta_axioms, exact, WittOp, WittVector};
use deltaiso::{Context, Qp, Zp};

const N: u32 = 8;

fn prime() -> impl Strategy<Value = u64> {
    prop_oneof![Just(3u64), Just(5), Just(7)]
}

fn zp(p: u64, x: u64) -> Zp {
    Zp::new(p, N, x % pow_u64(p, N))
}

fn witt_zp(p: u64, xs: &[i64]) -> WittVector<Zp> {
    WittVector::from_ints_mod(p, N, xs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn residue_ring_axioms(p in prime(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (zp(p, a), zp(p, b), zp(p, c));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn valuation_is_additive(p in prime(), a in -10_000i128..10_000, b in -10_000i128..10_000, s in -3i32..3, t in -3i32..3) {
        prop_assume!(a != 0 && b != 0);
        let x = Qp::from_int_scaled(p, a, s, 20);
        let y = Qp::from_int_scaled(p, b, t, 20);
        let v = x.mul(&y).valuation().unwrap();
        prop_assert_eq!(v, x.valuation().unwrap() + y.valuation().unwrap());
    }

    #[test]
    fn reversion_inverts(p in prime(), unit in 1i128..1000, rest in proptest::collection::vec(-50i128..50, 6)) {
        prop_assume!(unit % p as i128 != 0);
        let mut f = vec![Qp::zero(p, Qp::EXACT), Qp::from_int(p, unit, 12)];
        f.extend(rest.iter().map(|&c| Qp::from_int(p, c, 12)));
        let deg = f.len() - 1;
        let g = reversion(&f, deg).unwrap();
        for (lhs, rhs) in [(compose(&f, &g, deg), "f(g)"), (compose(&g, &f, deg), "g(f)")] {
            for (k, c) in lhs.iter().enumerate() {
                let want = Qp::from_int(p, i128::from(k == 1), Qp::EXACT);
                prop_assert!(c.sub(&want).val_or_abs() >= 12, "{} at degree {}", rhs, k);
            }
        }
    }

    #[test]
    fn ghost_map_is_a_ring_map(p in prime(), a in proptest::collection::vec(-1000i64..1000, 1..=3), seed in any::<u64>()) {
        let n = a.len();
        let b: Vec<i64> = (0..n).map(|i| (seed.rotate_left(13 * i as u32) % 2001) as i64 - 1000).collect();
        let (x, y) = (WittVector::from_ints(&a).unwrap(), WittVector::from_ints(&b).unwrap());
        for op in [WittOp::Add, WittOp::Mul] {
            let r = x.arith(&y, op, p).unwrap();
            let want: Vec<BigInt> = x.ghost(p).iter().zip(y.ghost(p)).map(|(s, t)| match op {
                WittOp::Add => s + t,
                WittOp::Mul => s * t,
            }).collect();
            prop_assert_eq!(r.ghost(p), want);
            prop_assert_eq!(exact::arith(&x, &y, op, p).unwrap(), r);
        }
    }

    #[test]
    fn witt_ring_axioms_mod_p_n(p in prime(), v in proptest::collection::vec(-10_000i64..10_000, 9)) {
        let (a, b, c) = (witt_zp(p, &v[0..3]), witt_zp(p, &v[3..6]), witt_zp(p, &v[6..9]));
        prop_assert_eq!(a.add(&b, p).unwrap(), b.add(&a, p).unwrap());
        prop_assert_eq!(a.mul(&b, p).unwrap(), b.mul(&a, p).unwrap());
        prop_assert_eq!(a.add(&b, p).unwrap().add(&c, p).unwrap(), a.add(&b.add(&c, p).unwrap(), p).unwrap());
        prop_assert_eq!(a.mul(&b, p).unwrap().mul(&c, p).unwrap(), a.mul(&b.mul(&c, p).unwrap(), p).unwrap());
        let lhs = a.mul(&b.add(&c, p).unwrap(), p).unwrap();
        let rhs = a.mul(&b, p).unwrap().add(&a.mul(&c, p).unwrap(), p).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(exact::arith_zp(&a, &b, WittOp::Mul, p).unwrap(), a.mul(&b, p).unwrap());
    }

    #[test]
    fn frobenius_verschiebung_and_truncation(p in prime(), v in proptest::collection::vec(-10_000i64..10_000, 3)) {
        let short = WittVector::from_ints(&v[..2]).unwrap();
        let fv = short.verschiebung().unwrap().frobenius(p).unwrap();
        let pg: Vec<BigInt> = short.ghost(p).iter().map(|g| g * p).collect();
        prop_assert_eq!(fv.ghost(p), pg);
        let a = witt_zp(p, &v);
        prop_assert_eq!(a.frobenius(p).unwrap().truncate().unwrap(), a.truncate().unwrap().frobenius(p).unwrap());
        prop_assert_eq!(exact::frobenius_zp(&a, p).unwrap(), a.frobenius(p).unwrap());
    }

    #[test]
    fn delta_axioms_for_any_seed(p in prime(), seed in any::<u64>()) {
        let ctx = Context::new(p, N, 12).unwrap();
        let rep = check_delta_axioms(&ctx, 50, &mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert!(rep.ok(), "{:?}", rep.failures);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn curve_formal_groups_satisfy_the_group_axioms(a4 in -20i64..20, a6 in -20i64..20) {
        let ctx = Context::new(5, N, 8).unwrap();
        let Ok(e) = WeierstrassCurve::short(a4, a6, &ctx) else { return Ok(()) };
        let f = FormalGroupLaw::from_curve(&e).unwrap();
        prop_assert!(f.log[1].eq_at_prec(&Qp::one(5, 8)));
        for (name, r) in f.verify().unwrap() {
            let need = if name.starts_with("exp") { N as i32 - 3 } else { N as i32 };
            prop_assert!(r >= need, "{} residual {}", name, r);
        }
    }

    #[test]
    fn kedlaya_matches_point_counts(p in prop_oneof![Just(5u64), Just(7), Just(11)], a4 in -30i64..30, a6 in -30i64..30) {
        let ctx = Context::new(p, 6, 12).unwrap();
        let Ok(e) = WeierstrassCurve::short(a4, a6, &ctx) else { return Ok(()) };
        let inv = e.count_points().unwrap();
        prop_assert_eq!(inv, e.count_points().unwrap());
        let fm = kedlaya_frobenius(&e).unwrap();
        let t = fm.trace().sub(&Qp::from_int(p, inv.a_p as i128, Qp::EXACT));
        let d = fm.det().unwrap().sub(&Qp::from_int(p, p as i128, Qp::EXACT));
        prop_assert!(t.val_or_abs() >= 4 && d.val_or_abs() >= 4, "trace {} det {}", fm.trace(), fm.det().unwrap());
    }
}

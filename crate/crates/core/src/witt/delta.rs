use rand::Rng;

use crate::ring::arith::Modulus;
use crate::ring::{Context, Zp};

/// `delta(x) = (x - x^p) / p`, known to one digit less than `x`.
pub fn delta_map(x: &Zp) -> Zp {
    let p = x.p();
    let n = x.prec();
    let m = Modulus::new(p, n);
    let d = m.sub(x.residue(), m.pow(x.residue(), p));
    debug_assert_eq!(d % p, 0);
    Zp::new(p, n.saturating_sub(1), d / p)
}

/// `C_p(x, y) = (x^p + y^p - (x + y)^p) / p`.
pub fn c_poly(x: &Zp, y: &Zp) -> Zp {
    let p = x.p();
    let n = x.prec().min(y.prec());
    let m = Modulus::new(p, n);
    let (a, b) = (x.residue() % m.m, y.residue() % m.m);
    let d = m.sub(m.add(m.pow(a, p), m.pow(b, p)), m.pow(m.add(a, b), p));
    Zp::new(p, n.saturating_sub(1), d / p)
}

#[derive(Clone, Debug, Default)]
pub struct DeltaReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl DeltaReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples pairs in `Z/p^N` and checks the additive and multiplicative
/// p-derivation rules at precision `N - 1`, plus `delta(0) = delta(1) = 0`.
pub fn check_delta_axioms<R: Rng>(ctx: &Context, samples: usize, rng: &mut R) -> DeltaReport {
    let (p, n) = (ctx.p, ctx.n);
    let m = Modulus::new(p, n);
    let mut rep = DeltaReport::default();
    for c in [0, 1] {
        if !delta_map(&Zp::from_i64(p, n, c)).is_zero() {
            rep.failures.push(format!("delta({c}) != 0"));
        }
    }
    for _ in 0..samples {
        let x = Zp::new(p, n, rng.gen_range(0..m.m));
        let y = Zp::new(p, n, rng.gen_range(0..m.m));
        let (dx, dy) = (delta_map(&x), delta_map(&y));
        let lhs = delta_map(&x.add(&y));
        let rhs = dx.add(&dy).add(&c_poly(&x, &y));
        if lhs != rhs {
            rep.failures.push(format!("additivity at x={}, y={}", x.residue(), y.residue()));
        }
        let lhs = delta_map(&x.mul(&y));
        let xp = x.pow(p).with_prec(n - 1);
        let yp = y.pow(p).with_prec(n - 1);
        let pz = Zp::from_i64(p, n - 1, p as i64);
        let rhs = xp.mul(&dy).add(&yp.mul(&dx)).add(&pz.mul(&dx).mul(&dy));
        if lhs != rhs {
            rep.failures.push(format!("product rule at x={}, y={}", x.residue(), y.residue()));
        }
        rep.checked += 1;
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn z(x: i64) -> Zp {
        Zp::from_i64(5, 8, x)
    }

    #[test]
    fn small_values() {
        assert_eq!(delta_map(&z(2)).to_signed(), -6);
        assert_eq!(delta_map(&z(5)).to_signed(), -624);
        assert!(delta_map(&z(0)).is_zero() && delta_map(&z(1)).is_zero());
        assert_eq!(delta_map(&z(2)).prec(), 7);
    }

    #[test]
    fn additivity_at_two_and_three() {
        // delta(2) = -6, delta(3) = -48, C_5(2,3) = (32 + 243 - 3125)/5 = -570
        assert_eq!(delta_map(&z(3)).to_signed(), -48);
        assert_eq!(c_poly(&z(2), &z(3)).to_signed(), -570);
        assert_eq!(c_poly(&z(1), &z(1)).to_signed(), -6);
    }

    #[test]
    fn sampled_axioms_hold() {
        let ctx = Context::new(5, 8, 12).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let r = check_delta_axioms(&ctx, 200, &mut rng);
        assert!(r.ok(), "{:?}", r.failures);
        assert_eq!(r.checked, 200);
    }
}

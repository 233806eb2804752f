//! Logarithm coefficients on the pure `x_0` slice at degrees far beyond the
//! series truncation.
//!
//! Restricting a character to `x_1 = ... = x_n = 0` leaves
//! `sum_i c_i l(x^(p^i))`, and integrality of that one-variable series is a
//! necessary condition in any integral coordinate. The coefficients of `l`
//! at `m = r p^j` have closed forms in a parameter adapted to the group, so
//! these rows can reach `j` far past `log_p M`. Without them, directions that
//! are only integral to low degree would pass as characters.

use crate::formalgroup::{FormalGroupLaw, GroupKind};
use crate::ring::arith::{pow_u64, val_u64, Modulus};

/// Largest index `(m-1)/2` summed with factorial tables.
const TABLE_LIMIT: u64 = 5_000_000;
/// Largest index for the quadratic-cost trinomial sum.
const TRINOMIAL_LIMIT: u64 = 3_000;

/// `y^2 = x^3 + a2 x^2 + a4 x + a6` with coefficients mod `p^W`.
#[derive(Clone, Copy, Debug)]
struct Cubic {
    a2: u64,
    a4: u64,
    a6: u64,
}

#[derive(Clone, Copy, Debug)]
enum Model {
    Multiplicative,
    Cubic(Cubic),
}

pub(crate) struct SliceLog {
    model: Model,
    m: Modulus,
    /// `v_p(k!)` and the prime-to-`p` part of `k!` mod `p^W`.
    fact_v: Vec<u32>,
    fact_u: Vec<u64>,
}

impl SliceLog {
    /// `None` for the additive group, whose logarithm is linear.
    pub(crate) fn new(f: &FormalGroupLaw, m: Modulus) -> Option<Self> {
        let model = match f.kind {
            GroupKind::Additive => return None,
            GroupKind::Multiplicative => Model::Multiplicative,
            GroupKind::Elliptic => Model::Cubic(cubic_model(f, &m)),
        };
        Some(SliceLog { model, m, fact_v: vec![0], fact_u: vec![1] })
    }

    /// Largest `m` whose coefficient this model computes within budget.
    pub(crate) fn max_index(&self) -> u64 {
        match self.model {
            Model::Multiplicative => u64::MAX,
            Model::Cubic(c) if c.a2 != 0 => 2 * TRINOMIAL_LIMIT + 1,
            Model::Cubic(_) => 2 * TABLE_LIMIT + 1,
        }
    }

    fn ensure_tables(&mut self, n: usize) {
        let p = self.m.p;
        while self.fact_u.len() <= n {
            let i = self.fact_u.len() as u64;
            let v = val_u64(i, p);
            let u = i / pow_u64(p, v);
            self.fact_v.push(self.fact_v[self.fact_v.len() - 1] + v);
            let last = self.fact_u[self.fact_u.len() - 1];
            self.fact_u.push(self.m.mul(last, u % self.m.m));
        }
    }

    /// `p^s * lambda_m` mod `p^W`, where `lambda_m` is the coefficient of `t^m`.
    /// Requires `s >= v_p(m)`.
    pub(crate) fn scaled(&mut self, mm: u64, s: u32) -> u64 {
        let m = self.m;
        let p = m.p;
        let vm = val_u64(mm, p);
        debug_assert!(s >= vm);
        let unit_m = m.inv((mm / pow_u64(p, vm)) % m.m).expect("unit");
        let scale = if s - vm >= m.k { 0 } else { pow_u64(p, s - vm) };
        let top = match self.model {
            // log(1 + t): (-1)^(m+1) / m
            Model::Multiplicative => {
                if mm % 2 == 1 {
                    1
                } else {
                    m.neg(1)
                }
            }
            Model::Cubic(c) => {
                if mm % 2 == 0 {
                    return 0;
                }
                self.inverse_sqrt_coeff(c, (mm - 1) / 2)
            }
        };
        m.mul(m.mul(top, unit_m), scale)
    }

    /// Coefficient of `u^j` in `(1 + a2 u + a4 u^2 + a6 u^3)^(-1/2)`:
    /// the sum over `a + 2b + 3c = j` of
    /// `(-1)^k (2k)! / (4^k k! a! b! c!) a2^a a4^b a6^c` with `k = a + b + c`.
    fn inverse_sqrt_coeff(&mut self, cu: Cubic, j: u64) -> u64 {
        let m = self.m;
        let need = if cu.a2 == 0 { j } else { 2 * j };
        self.ensure_tables(need as usize);
        let inv4 = m.inv(4 % m.m).expect("p odd");
        let mut acc = 0u64;
        let a_range = if cu.a2 == 0 { 0..=0 } else { 0..=j };
        for a in a_range {
            let rest = j - a;
            for c in 0..=rest / 3 {
                if (rest - 3 * c) % 2 != 0 {
                    continue;
                }
                let b = (rest - 3 * c) / 2;
                let k = a + b + c;
                let v = self.fact_v[2 * k as usize] as i64
                    - (self.fact_v[k as usize] + self.fact_v[a as usize] + self.fact_v[b as usize] + self.fact_v[c as usize])
                        as i64;
                debug_assert!(v >= 0);
                if v as u32 >= m.k {
                    continue;
                }
                let den = m.mul(
                    m.mul(self.fact_u[k as usize], self.fact_u[a as usize]),
                    m.mul(self.fact_u[b as usize], self.fact_u[c as usize]),
                );
                let mut t = m.mul(self.fact_u[2 * k as usize], m.inv(den).expect("unit"));
                t = m.mul(t, pow_u64(m.p, v as u32));
                t = m.mul(t, m.pow(inv4, k));
                t = m.mul(t, m.mul(m.pow(cu.a2, a), m.mul(m.pow(cu.a4, b), m.pow(cu.a6, c))));
                acc = if k % 2 == 0 { m.add(acc, t) } else { m.sub(acc, t) };
            }
        }
        acc
    }
}

/// Completes the square, and for `p > 3` also removes the `x^2` term. The
/// invariant differential is unchanged and `s = x^(-1/2)` stays an integral
/// parameter, so the integrality lattice is the same.
fn cubic_model(f: &FormalGroupLaw, m: &Modulus) -> Cubic {
    let e = f.curve.as_ref().expect("elliptic law carries its curve");
    let [b2, b4, b6, _] = e.b_invariants();
    let r = |x: i128| m.from_i128(x);
    let inv = |x: u64| m.inv(x % m.m).expect("p odd");
    let a2 = m.mul(r(b2), inv(4));
    let a4 = m.mul(r(b4), inv(2));
    let a6 = m.mul(r(b6), inv(4));
    if m.p == 3 || a2 == 0 {
        return Cubic { a2, a4, a6 };
    }
    // x -> x - a2/3
    let i3 = inv(3);
    let t = m.mul(a2, i3);
    let a4s = m.sub(a4, m.mul(a2, t));
    let a6s = m.add(m.sub(a6, m.mul(a4, t)), m.mul(m.from_i64(2), m.mul(t, m.mul(t, t))));
    Cubic { a2: 0, a4: a4s, a6: a6s }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formalgroup::WeierstrassCurve;
    use crate::ring::{univariate, Context, Qp, Series, Space};

    #[test]
    fn closed_form_squares_back() {
        let ctx = Context::new(5, 8, 30).unwrap();
        let e = WeierstrassCurve::short(1, 1, &ctx).unwrap();
        let f = FormalGroupLaw::from_curve(&e).unwrap();
        let md = Modulus::new(5, 14);
        let mut sl = SliceLog::new(&f, md).unwrap();
        // h = sum_j phi_j s^(2j) must satisfy h^2 (1 + s^4 + s^6) = 1
        let sp = Space::new(&["s"], 30);
        let s = Series::var(&sp, 0, 5, 14);
        let s2 = s.mul(&s);
        let g = Series::one(&sp, 5, 14).add(&s2.pow(2)).add(&s2.pow(3));
        let mut coeffs = Vec::new();
        for j in 0..=15u64 {
            coeffs.push(sl.scaled(2 * j + 1, 2));
        }
        let terms: Vec<Qp> = (0..=30)
            .map(|d| {
                if d % 2 == 0 {
                    let j = d / 2;
                    // undo the 1/m and the p^2 scaling
                    let q = Qp::from_scaled(5, coeffs[j], -2, 12);
                    q.mul(&Qp::from_int(5, (2 * j + 1) as i128, 40))
                } else {
                    Qp::zero(5, 12)
                }
            })
            .collect();
        let h = univariate::from_vec(&sp, 5, &terms);
        let prod = h.mul(&h).mul(&g);
        assert!(prod.residual(&Series::one(&sp, 5, 14)).unwrap() >= 10);
    }

    #[test]
    fn multiplicative_values() {
        let ctx = Context::new(5, 8, 12).unwrap();
        let f = FormalGroupLaw::multiplicative(&ctx).unwrap();
        let md = Modulus::new(5, 12);
        let mut sl = SliceLog::new(&f, md).unwrap();
        assert_eq!(sl.scaled(25, 2), 1);
        assert_eq!(sl.scaled(5, 2), 5);
        assert_eq!(sl.scaled(2, 0), md.neg(md.inv(2).unwrap()));
        assert!(SliceLog::new(&FormalGroupLaw::additive(&ctx).unwrap(), md).is_none());
    }
}

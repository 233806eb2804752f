use std::fmt;

use crate::ring::arith::Modulus;
use crate::ring::Context;
use crate::{Error, Result};

/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6` with good reduction at `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeierstrassCurve {
    pub a: [i64; 5],
    pub ctx: Context,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CurveInvariants {
    pub a_p: i64,
    pub point_count: u64,
    pub ordinary: bool,
}

impl WeierstrassCurve {
    pub fn new(a: [i64; 5], ctx: &Context) -> Result<Self> {
        let c = WeierstrassCurve { a, ctx: *ctx };
        let d = c.discriminant();
        if d % ctx.p as i128 == 0 {
            return Err(Error::BadReduction);
        }
        Ok(c)
    }

    pub fn short(a4: i64, a6: i64, ctx: &Context) -> Result<Self> {
        Self::new([0, 0, 0, a4, a6], ctx)
    }

    /// Parses `"a4,a6"` or `"a1,a2,a3,a4,a6"`.
    pub fn parse(s: &str, ctx: &Context) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let nums: Vec<i64> = parts
            .iter()
            .map(|t| t.parse::<i64>().map_err(|_| Error::Parse(format!("bad curve coefficient {t:?}"))))
            .collect::<Result<_>>()?;
        if nums.iter().any(|x| x.unsigned_abs() > 1 << 16) {
            return Err(Error::Parse("curve coefficients must be below 2^16 in absolute value".into()));
        }
        match nums[..] {
            [a4, a6] => Self::short(a4, a6, ctx),
            [a1, a2, a3, a4, a6] => Self::new([a1, a2, a3, a4, a6], ctx),
            _ => Err(Error::Parse(format!("expected 2 or 5 coefficients, got {}", nums.len()))),
        }
    }

    pub fn p(&self) -> u64 {
        self.ctx.p
    }

    /// `(b2, b4, b6, b8)`.
    pub fn b_invariants(&self) -> [i128; 4] {
        let [a1, a2, a3, a4, a6] = self.a.map(i128::from);
        [
            a1 * a1 + 4 * a2,
            2 * a4 + a1 * a3,
            a3 * a3 + 4 * a6,
            a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4,
        ]
    }

    pub fn discriminant(&self) -> i128 {
        let [b2, b4, b6, b8] = self.b_invariants();
        -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    }

    /// Counts `E(F_p)` by running over `x` and solving the quadratic in `y`.
    pub fn count_points(&self) -> Result<CurveInvariants> {
        let p = self.p();
        if p > 100_000 {
            return Err(Error::InvalidContext(format!("p = {p} too large for exhaustive counting")));
        }
        let m = Modulus::new(p, 1);
        let [a1, a2, a3, a4, a6] = self.a.map(|x| m.from_i64(x));
        let mut count = 1u64;
        for x in 0..p {
            let rhs = m.add(m.add(m.mul(m.mul(x, x), m.add(x, a2)), m.mul(a4, x)), a6);
            let l = m.add(m.mul(a1, x), a3);
            let disc = m.add(m.mul(l, l), m.mul(m.from_i64(4), rhs));
            count += match legendre(disc, &m) {
                0 => 1,
                1 => 2,
                _ => 0,
            };
        }
        let a_p = p as i64 + 1 - count as i64;
        assert!((a_p * a_p) as u64 <= 4 * p, "Hasse bound violated");
        Ok(CurveInvariants { a_p, point_count: count, ordinary: a_p.rem_euclid(p as i64) != 0 })
    }
}

fn legendre(a: u64, m: &Modulus) -> i32 {
    if a == 0 {
        return 0;
    }
    if m.pow(a, (m.p - 1) / 2) == 1 {
        1
    } else {
        -1
    }
}

impl fmt::Display for WeierstrassCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = self.a;
        if a1 == 0 && a2 == 0 && a3 == 0 {
            write!(f, "{a4},{a6}")
        } else {
            write!(f, "{a1},{a2},{a3},{a4},{a6}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::new(5, 8, 12).unwrap()
    }

    #[test]
    fn reference_counts() {
        for (a4, a6, n, ap, ord) in [(1, 1, 9, -3, true), (-1, 0, 8, -2, true), (0, 1, 6, 0, false)] {
            let e = WeierstrassCurve::short(a4, a6, &ctx()).unwrap();
            let inv = e.count_points().unwrap();
            assert_eq!((inv.point_count, inv.a_p, inv.ordinary), (n, ap, ord), "({a4},{a6})");
        }
    }

    #[test]
    fn bad_reduction_is_rejected() {
        // x^3 - 3x + 2 = (x-1)^2 (x+2)
        assert_eq!(WeierstrassCurve::short(-3, 2, &ctx()), Err(Error::BadReduction));
        assert_eq!(WeierstrassCurve::short(0, 0, &ctx()), Err(Error::BadReduction));
    }

    #[test]
    fn parsing() {
        let e = WeierstrassCurve::parse(" 1, 1", &ctx()).unwrap();
        assert_eq!(e.a, [0, 0, 0, 1, 1]);
        let e = WeierstrassCurve::parse("1,0,1,2,4", &ctx()).unwrap();
        assert_eq!(e.to_string(), "1,0,1,2,4");
        assert!(matches!(WeierstrassCurve::parse("1,2,3", &ctx()), Err(Error::Parse(_))));
        assert!(matches!(WeierstrassCurve::parse("x,1", &ctx()), Err(Error::Parse(_))));
    }

    #[test]
    fn discriminant_of_short_form() {
        let e = WeierstrassCurve::short(1, 1, &ctx()).unwrap();
        // -16 (4 a^3 + 27 b^2)
        assert_eq!(e.discriminant(), -16 * 31);
    }
}

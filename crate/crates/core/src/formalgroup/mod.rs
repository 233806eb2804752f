//! One-parameter formal group laws: the additive and multiplicative groups
//! and the formal group of a Weierstrass curve at its identity, with
//! logarithm, exponential and multiplication-by-`m` series.

mod curve;

use std::sync::Arc;

use crate::ring::univariate;
use crate::ring::{Context, Qp, Series, Space};
use crate::Result;

pub use curve::{CurveInvariants, WeierstrassCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Additive,
    Multiplicative,
    Elliptic,
}

#[derive(Clone, Debug)]
pub struct FormalGroupLaw {
    pub kind: GroupKind,
    pub ctx: Context,
    pub curve: Option<WeierstrassCurve>,
    /// `F(t1, t2)` over `Z_p`.
    pub law: Series,
    /// Coefficients of the logarithm, `log[k]` for `t^k`.
    pub log: Vec<Qp>,
    pub exp: Vec<Qp>,
}

fn e2(i: u8, j: u8) -> [u8; 8] {
    let mut e = [0u8; 8];
    e[0] = i;
    e[1] = j;
    e
}

impl FormalGroupLaw {
    fn law_space(ctx: &Context) -> Arc<Space> {
        Space::new(&["t1", "t2"], ctx.m)
    }

    pub fn t_space(&self) -> Arc<Space> {
        Space::new(&["t"], self.ctx.m)
    }

    fn finish(kind: GroupKind, ctx: &Context, curve: Option<WeierstrassCurve>, law: Series) -> Result<Self> {
        let t = Space::new(&["t"], ctx.m);
        let dx = law.derivative(0).remap(&t, &[None, Some(0)]);
        let log_series = dx.inv_unit()?.integrate(0);
        let log = univariate::to_vec(&log_series);
        let exp = univariate::reversion(&log, ctx.m)?;
        Ok(FormalGroupLaw { kind, ctx: *ctx, curve, law, log, exp })
    }

    pub fn additive(ctx: &Context) -> Result<Self> {
        let sp = Self::law_space(ctx);
        let law = Series::from_int_terms(&sp, ctx.p, ctx.work_prec(), &[(e2(1, 0), 1), (e2(0, 1), 1)]);
        Self::finish(GroupKind::Additive, ctx, None, law)
    }

    pub fn multiplicative(ctx: &Context) -> Result<Self> {
        let sp = Self::law_space(ctx);
        let law = Series::from_int_terms(&sp, ctx.p, ctx.work_prec(), &[(e2(1, 0), 1), (e2(0, 1), 1), (e2(1, 1), 1)]);
        Self::finish(GroupKind::Multiplicative, ctx, None, law)
    }

    /// The law in the parameter `t = -x/y`, via the chord construction on
    /// the expansion `w = -1/y` as a series in `t`.
    pub fn from_curve(e: &WeierstrassCurve) -> Result<Self> {
        let ctx = e.ctx;
        let (p, cap, m) = (ctx.p, ctx.work_prec(), ctx.m);
        let [a1, a2, a3, a4, a6] = e.a;
        let a = |k: i64| Qp::from_int(p, k as i128, Qp::EXACT);

        // w(z) to degree m + 1, by fixed-point iteration
        let zs = Space::new(&["z"], m + 1);
        let z = Series::var(&zs, 0, p, cap);
        let z2 = z.mul(&z);
        let z3 = z2.mul(&z);
        let mut w = z3.clone();
        for _ in 0..m {
            let w2 = w.mul(&w);
            w = z3
                .add(&z.mul(&w).scale(&a(a1)))
                .add(&z2.mul(&w).scale(&a(a2)))
                .add(&w2.scale(&a(a3)))
                .add(&z.mul(&w2).scale(&a(a4)))
                .add(&w2.mul(&w).scale(&a(a6)));
        }
        let wc = univariate::to_vec(&w);

        let sp = Self::law_space(&ctx);
        let x = Series::var(&sp, 0, p, cap);
        let y = Series::var(&sp, 1, p, cap);
        // lambda = sum_n A_n (t2^n - t1^n)/(t2 - t1)
        let mut lam = Series::zero(&sp, p, cap);
        for (n, c) in wc.iter().enumerate().skip(3) {
            if c.is_zero() {
                continue;
            }
            let terms: Vec<([u8; 8], i128)> = (0..n).map(|i| (e2(i as u8, (n - 1 - i) as u8), 1)).collect();
            lam = lam.add(&Series::from_int_terms(&sp, p, cap, &terms).scale(c));
        }
        let wx = w.truncate(m).remap(&sp, &[Some(0)]);
        let nu = wx.sub(&lam.mul(&x));
        let l2 = lam.mul(&lam);
        // minus the z^2 coefficient of the cubic cut out by w = lam z + nu
        let num = lam
            .scale(&a(-a1))
            .sub(&l2.scale(&a(a3)))
            .sub(&nu.scale(&a(a2)))
            .sub(&lam.mul(&nu).scale(&a(2 * a4)))
            .sub(&l2.mul(&nu).scale(&a(3 * a6)));
        let den = Series::one(&sp, p, cap)
            .add(&lam.scale(&a(a2)))
            .add(&l2.scale(&a(a4)))
            .add(&l2.mul(&lam).scale(&a(a6)));
        let t3 = x.add(&y).neg().add(&num.mul(&den.inv_unit()?));
        let w3 = lam.mul(&t3).add(&nu);
        // the sum is the inverse of the third point on the chord
        let inv_den = t3.scale(&a(a1)).add(&w3.scale(&a(a3))).add_const(&a(-1));
        let law = t3.mul(&inv_den.inv_unit()?).integral()?;
        Self::finish(GroupKind::Elliptic, &ctx, Some(e.clone()), law)
    }

    /// The same group at another precision or truncation degree.
    pub fn rebuild(&self, ctx: &Context) -> Result<Self> {
        match (self.kind, &self.curve) {
            (GroupKind::Additive, _) => Self::additive(ctx),
            (GroupKind::Multiplicative, _) => Self::multiplicative(ctx),
            (GroupKind::Elliptic, Some(e)) => Self::from_curve(&WeierstrassCurve { a: e.a, ctx: *ctx }),
            (GroupKind::Elliptic, None) => unreachable!("elliptic law without a curve"),
        }
    }

    pub fn log_series(&self) -> Series {
        univariate::from_vec(&self.t_space(), self.ctx.p, &self.log)
    }

    pub fn exp_series(&self) -> Series {
        univariate::from_vec(&self.t_space(), self.ctx.p, &self.exp)
    }

    /// `log(arg)` for a series `arg` without constant term, in any space.
    pub fn log_of(&self, arg: &Series) -> Result<Series> {
        let deg = arg.space().deg();
        let sp = Space::new(&["t"], deg);
        let l = univariate::from_vec(&sp, self.ctx.p, &self.log[..self.log.len().min(deg + 1)]);
        l.compose(&[arg.clone()])
    }

    /// `F(a, b)` for series in a common space.
    pub fn apply(&self, a: &Series, b: &Series) -> Result<Series> {
        let deg = a.space().deg();
        let law = if deg < self.ctx.m { self.law.truncate(deg) } else { self.law.clone() };
        law.compose(&[a.clone(), b.clone()])
    }

    /// `[m](t)`, by repeated application of the law.
    pub fn mul_by(&self, m: u32) -> Result<Series> {
        let sp = self.t_space();
        let t = Series::var(&sp, 0, self.ctx.p, self.ctx.work_prec());
        let mut acc = t.clone();
        for _ in 1..m {
            acc = self.apply(&acc, &t)?;
        }
        Ok(acc)
    }

    /// Residuals of the group-law identities, as `(name, valuation)`.
    pub fn verify(&self) -> Result<Vec<(String, i32)>> {
        let (p, cap, m) = (self.ctx.p, self.ctx.work_prec(), self.ctx.m);
        let mut out = Vec::new();
        let s2 = Self::law_space(&self.ctx);
        let t1 = Series::var(&s2, 0, p, cap);
        let t2 = Series::var(&s2, 1, p, cap);
        let z = Series::zero(&s2, p, cap);
        out.push(("unit".into(), self.apply(&t1, &z)?.residual(&t1)?));
        out.push(("commutativity".into(), self.apply(&t2, &t1)?.residual(&self.law)?));

        let s3 = Space::new(&["t1", "t2", "t3"], m);
        let v: Vec<Series> = (0..3).map(|i| Series::var(&s3, i, p, cap)).collect();
        let left = self.apply(&self.apply(&v[0], &v[1])?, &v[2])?;
        let right = self.apply(&v[0], &self.apply(&v[1], &v[2])?)?;
        out.push(("associativity".into(), left.residual(&right)?));

        let lf = self.log_of(&self.law)?;
        let sum = self.log_of(&t1)?.add(&self.log_of(&t2)?);
        out.push(("log homomorphism".into(), lf.residual(&sum)?));

        let lt = self.log_series();
        let id = Series::var(&self.t_space(), 0, p, cap);
        out.push(("exp(log t) = t".into(), self.exp_series().compose(&[lt.clone()])?.residual(&id)?));
        for k in [2u32, 3] {
            let lk = self.log_of(&self.mul_by(k)?)?;
            out.push((format!("log [{k}] = {k} log"), lk.residual(&lt.scale_int(k as i64))?));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(m: usize) -> Context {
        Context::new(5, 8, m).unwrap()
    }

    #[test]
    fn multiplicative_log() {
        let g = FormalGroupLaw::multiplicative(&ctx(12)).unwrap();
        for k in 1..=12i128 {
            let want = Qp::from_ratio(5, if k % 2 == 1 { 1 } else { -1 }, k, 8).unwrap();
            assert!(g.log[k as usize].sub(&want).val_or_abs() >= 8, "k={k}");
        }
        let a = FormalGroupLaw::additive(&ctx(12)).unwrap();
        assert!(a.log[1].eq_at_prec(&Qp::one(5, 8)) && a.log[2].is_zero());
        assert!(a.exp[1].eq_at_prec(&Qp::one(5, 8)) && a.exp[3].is_zero());
    }

    #[test]
    fn short_curve_law_is_additive_to_degree_three() {
        let e = WeierstrassCurve::short(1, 1, &ctx(12)).unwrap();
        let g = FormalGroupLaw::from_curve(&e).unwrap();
        let sp = g.law.space().clone();
        for i in 0..sp.upto(3) {
            let ex = sp.exps(i);
            let want = if (ex[0], ex[1]) == (1, 0) || (ex[0], ex[1]) == (0, 1) { 1 } else { 0 };
            assert!(g.law.coeff_at(i).eq_at_prec(&Qp::from_int(5, want, 10)), "{ex:?}");
        }
    }

    #[test]
    fn identities_hold() {
        let c = ctx(12);
        let curves = [
            FormalGroupLaw::additive(&c).unwrap(),
            FormalGroupLaw::multiplicative(&c).unwrap(),
            FormalGroupLaw::from_curve(&WeierstrassCurve::short(1, 1, &c).unwrap()).unwrap(),
            FormalGroupLaw::from_curve(&WeierstrassCurve::new([1, -1, 1, 3, 2], &c).unwrap()).unwrap(),
        ];
        for g in &curves {
            for (name, r) in g.verify().unwrap() {
                // the exponential has denominators k!, which cost two more digits here
                let want = if name.starts_with("exp") { 5 } else { 8 };
                assert!(r >= want, "{:?} {name}: {r}", g.kind);
            }
        }
    }

    #[test]
    fn long_form_matches_known_expansion() {
        // F(t1, t2) = t1 + t2 - a1 t1 t2 - a2 (t1^2 t2 + t1 t2^2) + ...
        let c = ctx(6);
        let g = FormalGroupLaw::from_curve(&WeierstrassCurve::new([1, 2, 0, 0, 1], &c).unwrap()).unwrap();
        assert!(g.law.coeff(&[1, 1]).eq_at_prec(&Qp::from_int(5, -1, 8)));
        assert!(g.law.coeff(&[2, 1]).eq_at_prec(&Qp::from_int(5, -2, 8)));
    }
}

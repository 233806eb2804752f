//! Frobenius on `H^1` of an elliptic curve by Monsky-Washnitzer pole
//! reduction, the Hodge line against its Frobenius image, and the comparison
//! with `f*` on the delta isocrystal.
//!
//! The curve is put in the form `y^2 = Q(x)` with `Q` monic cubic. The lift
//! `x -> x^p` extends to `y -> y^p (1 + E / y^(2p))^(1/2)` with
//! `E = Q(x^p) - Q(x)^p`, and since `p | E` the binomial series converges.

use std::fmt;

use crate::characters::{isocrystal_data, IsocrystalData};
use crate::check::Check;
use crate::formalgroup::{FormalGroupLaw, WeierstrassCurve};
use crate::ring::arith::ilog;
use crate::ring::linalg::{self, QMat};
use crate::ring::Qp;
use crate::{Error, Result};

type Poly = Vec<Qp>;

/// Matrix of Frobenius in the basis `dx/y, x dx/y`; column `j` is the image
/// of basis element `j`.
#[derive(Clone, Debug)]
pub struct FrobeniusMatrix {
    pub entries: QMat,
    /// Digits every entry is known to.
    pub precision: i32,
    /// Digits given up to pole and degree reduction.
    pub loss: i32,
    pub curve: WeierstrassCurve,
}

impl FrobeniusMatrix {
    pub fn trace(&self) -> Qp {
        linalg::trace(&self.entries)
    }

    pub fn det(&self) -> Result<Qp> {
        linalg::det(&self.entries)
    }

    pub fn charpoly(&self) -> Result<Vec<Qp>> {
        linalg::charpoly(&self.entries)
    }
}

/// A rational slope `num/den` in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Slope {
    pub num: i32,
    pub den: i32,
}

impl Slope {
    fn new(num: i32, den: i32) -> Self {
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i32;
        Slope { num: num / g, den: den / g }
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Valuations of the roots of `sum c_i x^i`, one per root, ascending.
/// Coefficients indistinguishable from zero are treated as zero.
pub fn newton_slopes(coeffs: &[Qp]) -> Vec<Slope> {
    let pts: Vec<(i32, i32)> =
        coeffs.iter().enumerate().filter_map(|(i, c)| c.valuation().map(|v| (i as i32, v))).collect();
    let mut hull: Vec<(i32, i32)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b when it lies on or above the segment a -> pt
            if (b.1 - a.1) as i64 * (pt.0 - a.0) as i64 >= (pt.1 - a.1) as i64 * (b.0 - a.0) as i64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::new();
    for w in hull.windows(2) {
        let (len, drop) = (w[1].0 - w[0].0, w[0].1 - w[1].1);
        out.extend(std::iter::repeat(Slope::new(drop, len)).take(len as usize));
    }
    out.reverse();
    out
}

fn zero(p: u64) -> Qp {
    Qp::zero(p, Qp::EXACT)
}

fn int(p: u64, x: i128) -> Qp {
    Qp::from_int(p, x, Qp::EXACT)
}

fn padd(a: &Poly, b: &Poly) -> Poly {
    let p = a.first().or(b.first()).map_or(5, |q| q.p());
    (0..a.len().max(b.len()))
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(zero(p));
            b.get(i).map_or(x, |y| x.add(y))
        })
        .collect()
}

fn pscale(a: &Poly, c: &Qp) -> Poly {
    a.iter().map(|x| x.mul(c)).collect()
}

fn pmul(a: &Poly, b: &Poly) -> Poly {
    let p = a[0].p();
    let mut out = vec![zero(p); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

fn pderiv(a: &Poly) -> Poly {
    let p = a[0].p();
    if a.len() <= 1 {
        return vec![zero(p)];
    }
    a.iter().enumerate().skip(1).map(|(i, x)| x.mul_int(i as i64)).collect()
}

/// Quotient and remainder by a monic divisor.
fn pdivrem(a: &Poly, q: &Poly) -> (Poly, Poly) {
    let p = q[0].p();
    let dq = q.len() - 1;
    let mut r = a.clone();
    if r.len() <= dq {
        r.resize(dq, zero(p));
        return (vec![zero(p)], r);
    }
    let mut quot = vec![zero(p); r.len() - dq];
    for d in (dq..r.len()).rev() {
        let c = r[d];
        if c.is_zero() {
            continue;
        }
        quot[d - dq] = c;
        for (k, qk) in q.iter().enumerate() {
            r[d - dq + k] = r[d - dq + k].sub(&c.mul(qk));
        }
    }
    r.truncate(dq);
    (quot, r)
}

/// `Q` with `y^2 = Q(x)` after completing the square; `[c0, c1, c2, 1]`.
pub fn short_model(e: &WeierstrassCurve) -> Result<Poly> {
    let p = e.p();
    if p < 5 {
        return Err(Error::InvalidContext(format!("the crystalline module needs p >= 5, got {p}")));
    }
    let [b2, b4, b6, _] = e.b_invariants();
    Ok(vec![Qp::from_ratio(p, b6, 4, Qp::EXACT)?, Qp::from_ratio(p, b4, 2, Qp::EXACT)?, Qp::from_ratio(p, b2, 4, Qp::EXACT)?, int(p, 1)])
}

/// `v` with `v Q' = 1 mod Q`, from the multiplication-by-`Q'` matrix on
/// `1, x, x^2`, whose determinant is the discriminant up to sign.
fn inverse_derivative(q: &Poly) -> Result<Poly> {
    let dq = pderiv(q);
    let cols: Vec<Poly> = (0..3)
        .map(|i| {
            let mut xi = vec![zero(q[0].p()); i + 1];
            xi[i] = int(q[0].p(), 1);
            pdivrem(&pmul(&xi, &dq), q).1
        })
        .collect();
    let mat: QMat = (0..3).map(|r| (0..3).map(|c| cols[c][r]).collect()).collect();
    let inv = linalg::inverse(&mat).map_err(|_| Error::BadReduction)?;
    Ok((0..3).map(|r| inv[r][0]).collect())
}

/// Digits lost reducing poles up to order `2 m + 1` and degrees up to `d`.
fn reduction_loss(p: u64, m: u64, d: u64) -> i32 {
    (ilog(p, 2 * m + 1) + ilog(p, 2 * d + 3)) as i32
}

/// Frobenius on `H^1` by Kedlaya's algorithm; entries correct to the
/// reported precision, which is at least `N`.
pub fn kedlaya_frobenius(e: &WeierstrassCurve) -> Result<FrobeniusMatrix> {
    let p = e.p();
    let n = e.ctx.n as i32;
    if n < 4 {
        return Err(Error::InvalidContext(format!("Kedlaya needs N >= 4, got {n}")));
    }
    let q = short_model(e)?;
    let v = inverse_derivative(&q)?;
    let dq = pderiv(&q);

    // terms k < K of the binomial series; term k has valuation >= k + 1
    let max_deg = |k: u64| 3 * p * k + 2 * p;
    let pole = |k: u64| (p * (2 * k + 1) - 1) / 2;
    let mut kk = 1u64;
    while (kk as i32 + 1) - reduction_loss(p, pole(kk), max_deg(kk)) < n + 2 {
        kk += 1;
    }
    let loss = reduction_loss(p, pole(kk), max_deg(kk));

    let xp: Poly = {
        let mut x = vec![zero(p); p as usize + 1];
        x[p as usize] = int(p, 1);
        x
    };
    let q_of_xp = q.iter().enumerate().fold(vec![zero(p)], |acc, (i, c)| {
        let mut t = vec![int(p, 1)];
        for _ in 0..i {
            t = pmul(&t, &xp);
        }
        padd(&acc, &pscale(&t, c))
    });
    let mut q_pow = vec![int(p, 1)];
    for _ in 0..p {
        q_pow = pmul(&q_pow, &q);
    }
    let big_e = padd(&q_of_xp, &pscale(&q_pow, &int(p, -1)));

    let mut cols = Vec::new();
    for i in 0..2u64 {
        // p x^(p(i+1) - 1) E^k C(-1/2, k) dx / y^(p(2k+1))
        let mut buckets: Vec<Poly> = vec![vec![zero(p)]; pole(kk - 1) as usize + 1];
        let mut lead = vec![zero(p); (p * (i + 1)) as usize];
        lead[(p * (i + 1) - 1) as usize] = int(p, p as i128);
        let mut binom = int(p, 1);
        let mut ek = vec![int(p, 1)];
        for k in 0..kk {
            if k > 0 {
                binom = binom.mul(&int(p, -(2 * k as i128 - 1))).div(&int(p, 2 * k as i128))?;
                ek = pmul(&ek, &big_e);
            }
            let m = pole(k) as usize;
            buckets[m] = padd(&buckets[m], &pscale(&pmul(&lead, &ek), &binom));
        }
        for m in (1..buckets.len()).rev() {
            let a = std::mem::take(&mut buckets[m]);
            let vpart = pdivrem(&pmul(&pdivrem(&a, &q).1, &v), &q).1;
            let rest = padd(&a, &pscale(&pmul(&vpart, &dq), &int(p, -1)));
            let u = pdivrem(&rest, &q).0;
            let c = int(p, 2).div(&int(p, 2 * m as i128 - 1))?;
            buckets[m - 1] = padd(&buckets[m - 1], &padd(&u, &pscale(&pderiv(&vpart), &c)));
        }
        let mut b = std::mem::take(&mut buckets[0]);
        // d(x^j y) = (j x^(j-1) Q + x^j Q'/2) dx/y, leading term (2j + 3)/2 x^(j+2)
        for d in (2..b.len()).rev() {
            let c = b[d];
            if c.is_zero() {
                continue;
            }
            let j = d - 2;
            let mut exact = pscale(&dq, &int(p, 1).div(&int(p, 2))?);
            exact = pmul(&{
                let mut x = vec![zero(p); j + 1];
                x[j] = int(p, 1);
                x
            }, &exact);
            if j > 0 {
                let mut x = vec![zero(p); j];
                x[j - 1] = int(p, j as i128);
                exact = padd(&exact, &pmul(&x, &q));
            }
            let f = c.mul(&int(p, 2)).div(&int(p, 2 * j as i128 + 3))?;
            b = padd(&b, &pscale(&exact, &f.neg()));
            b[d] = zero(p);
        }
        b.resize(2, zero(p));
        cols.push(b);
    }
    let truncation = kk as i32 + 1 - loss;
    let entries: QMat = (0..2).map(|r| (0..2).map(|c| cols[c][r].with_abs(truncation)).collect()).collect();
    let precision = entries.iter().flatten().map(|x| x.abs_prec()).min().unwrap_or(truncation);
    if precision < n {
        return Err(Error::PrecisionExhausted(format!("Kedlaya entries known to {precision} digits, need {n}")));
    }
    Ok(FrobeniusMatrix { entries, precision, loss, curve: e.clone() })
}

#[derive(Clone, Debug)]
pub struct HodgeIntersection {
    /// `dim (H^0 cap F_c H^0)`, 0 or 1.
    pub dim: usize,
    /// Valuation of the `x dx/y` component of `F_c(dx/y)`; `None` if it
    /// vanishes to the working precision.
    pub off_valuation: Option<i32>,
    /// `F_c(dx/y)`.
    pub witness: Vec<Qp>,
}

/// `H^0 = span(dx/y)` is Frobenius-stable iff the off-diagonal entry of the
/// first column vanishes to the matrix precision.
pub fn hodge_frobenius_intersection(fm: &FrobeniusMatrix) -> HodgeIntersection {
    let off = fm.entries[1][0];
    let stable = off.val_or_abs() >= fm.precision;
    HodgeIntersection {
        dim: usize::from(stable),
        off_valuation: off.valuation(),
        witness: vec![fm.entries[0][0], fm.entries[1][0]],
    }
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub a_p: i64,
    pub kedlaya: FrobeniusMatrix,
    pub intersection: HodgeIntersection,
    pub delta: IsocrystalData,
    pub delta_charpoly: Vec<Qp>,
    pub delta_slopes: Vec<Slope>,
    pub crystalline_slopes: Vec<Slope>,
    pub checks: Vec<Check>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// `x^2 - a_p x + p`, constant term first.
pub fn frobenius_polynomial(p: u64, a_p: i64) -> Vec<Qp> {
    vec![int(p, p as i128), int(p, -(a_p as i128)), int(p, 1)]
}

fn eval(poly: &[Qp], x: &Qp) -> Qp {
    poly.iter().rev().fold(zero(x.p()), |acc, c| acc.mul(x).add(c))
}

/// Kedlaya against the counted `a_p`, then `f*` against Kedlaya.
pub fn compare_isocrystals(e: &WeierstrassCurve) -> Result<ComparisonReport> {
    let f = FormalGroupLaw::from_curve(e)?;
    let delta = isocrystal_data(&f)?;
    compare_with(e, delta)
}

/// As [`compare_isocrystals`], reusing already computed isocrystal data.
pub fn compare_with(e: &WeierstrassCurve, delta: IsocrystalData) -> Result<ComparisonReport> {
    let p = e.p();
    let n = e.ctx.n as i32;
    let a_p = e.count_points()?.a_p;
    let kedlaya = kedlaya_frobenius(e)?;
    let intersection = hodge_frobenius_intersection(&kedlaya);
    let target = frobenius_polynomial(p, a_p);
    let mut checks = Vec::new();

    let kn = n - 2;
    checks.push(Check::new("Kedlaya trace = a_p", kedlaya.trace().sub(&int(p, a_p as i128)).val_or_abs().min(kn), kn));
    checks.push(Check::new("Kedlaya det = p", kedlaya.det()?.sub(&int(p, p as i128)).val_or_abs().min(kn), kn));
    let kpoly = kedlaya.charpoly()?;
    let crystalline_slopes = newton_slopes(&kpoly);
    checks.push(Check::boolean(
        "Kedlaya slopes = Newton slopes of x^2 - a_p x + p",
        crystalline_slopes == newton_slopes(&target),
    ));

    let need = n - 3;
    let delta_charpoly = linalg::charpoly(&delta.frobenius_matrix)?;
    let delta_slopes = newton_slopes(&delta_charpoly);
    let poly_residual = if delta_charpoly.len() == target.len() {
        delta_charpoly.iter().zip(&target).map(|(a, b)| a.sub(b).val_or_abs()).min().unwrap_or(0)
    } else {
        // a single eigenvalue must be a root of the Frobenius polynomial
        eval(&target, &delta.frobenius_matrix[0][0]).val_or_abs()
    };
    checks.push(Check::new("char poly of f* vs x^2 - a_p x + p", poly_residual.min(need), need));
    let rk_x1 = delta.ranks_xn.0;
    checks.push(Check::boolean("rk X_1 = dim(H0 cap F_c H0)", rk_x1 == intersection.dim));
    let target_slopes = newton_slopes(&target);
    let slopes_ok = if delta_slopes.len() == target_slopes.len() {
        delta_slopes == target_slopes
    } else {
        delta_slopes.iter().all(|s| target_slopes.contains(s))
    };
    checks.push(Check::boolean("slopes of f* match Newton slopes", slopes_ok));
    checks.push(Check::boolean("CL classification agrees", delta.is_cl == (intersection.dim == 1)));

    Ok(ComparisonReport { a_p, kedlaya, intersection, delta, delta_charpoly, delta_slopes, crystalline_slopes, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Context;

    fn curve(a4: i64, a6: i64, n: u32) -> WeierstrassCurve {
        WeierstrassCurve::short(a4, a6, &Context::new(5, n, 12).unwrap()).unwrap()
    }

    #[test]
    fn trace_and_det_match_point_counts() {
        for (a4, a6, ap) in [(1, 1, -3i128), (-1, 0, -2), (0, 1, 0)] {
            let fm = kedlaya_frobenius(&curve(a4, a6, 8)).unwrap();
            assert!(fm.precision >= 8);
            assert!(fm.trace().sub(&int(5, ap)).val_or_abs() >= 6, "({a4},{a6}) trace {}", fm.trace());
            assert!(fm.det().unwrap().sub(&int(5, 5)).val_or_abs() >= 6, "({a4},{a6})");
        }
    }

    #[test]
    fn other_primes_and_long_form() {
        let ctx = Context::new(7, 6, 12).unwrap();
        let e = WeierstrassCurve::new([1, 0, 1, 2, 3], &ctx).unwrap();
        let ap = e.count_points().unwrap().a_p;
        let fm = kedlaya_frobenius(&e).unwrap();
        assert!(fm.trace().sub(&int(7, ap as i128)).val_or_abs() >= 4);
        assert!(fm.det().unwrap().sub(&int(7, 7)).val_or_abs() >= 4);
    }

    #[test]
    fn hodge_line() {
        let cm = hodge_frobenius_intersection(&kedlaya_frobenius(&curve(-1, 0, 8)).unwrap());
        assert_eq!(cm.dim, 1);
        let generic = hodge_frobenius_intersection(&kedlaya_frobenius(&curve(1, 1, 8)).unwrap());
        assert_eq!(generic.dim, 0);
        assert!(generic.off_valuation.unwrap() <= 1);
        let one = int(5, 1);
        let ident = FrobeniusMatrix {
            entries: vec![vec![one, zero(5)], vec![zero(5), one]],
            precision: 8,
            loss: 0,
            curve: curve(1, 1, 8),
        };
        assert_eq!(hodge_frobenius_intersection(&ident).dim, 1);
    }

    #[test]
    fn precision_is_self_consistent() {
        let a = kedlaya_frobenius(&curve(1, 1, 8)).unwrap();
        let b = kedlaya_frobenius(&curve(1, 1, 10)).unwrap();
        for (x, y) in a.entries.iter().flatten().zip(b.entries.iter().flatten()) {
            assert!(x.eq_at_prec(y));
        }
    }

    #[test]
    fn slopes() {
        let s = |v: &[(i32, i32)]| v.iter().map(|&(a, b)| Slope::new(a, b)).collect::<Vec<_>>();
        assert_eq!(newton_slopes(&frobenius_polynomial(5, -3)), s(&[(0, 1), (1, 1)]));
        assert_eq!(newton_slopes(&frobenius_polynomial(5, 0)), s(&[(1, 2), (1, 2)]));
        assert_eq!(newton_slopes(&[int(5, -5 * 7), int(5, 1)]), s(&[(1, 1)]));
        assert_eq!(Slope::new(1, 2).to_string(), "1/2");
    }
}

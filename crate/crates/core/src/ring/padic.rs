//! p-adic integers and p-adic numbers with explicit precision.

use std::fmt;

use super::arith::{inv_mod, max_digits, val_u64, Modulus};
use crate::{Error, Result};

/// An element of `Z_p` known modulo `p^prec`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Zp {
    p: u64,
    prec: u32,
    res: u64,
}

impl Zp {
    pub fn new(p: u64, prec: u32, res: u64) -> Self {
        let m = Modulus::new(p, prec);
        Zp { p, prec, res: res % m.m }
    }

    pub fn from_i64(p: u64, prec: u32, x: i64) -> Self {
        let m = Modulus::new(p, prec);
        Zp { p, prec, res: m.from_i64(x) }
    }

    pub fn zero(p: u64, prec: u32) -> Self {
        Zp { p, prec, res: 0 }
    }

    pub fn one(p: u64, prec: u32) -> Self {
        Zp::new(p, prec, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn residue(&self) -> u64 {
        self.res
    }

    fn modulus(&self) -> Modulus {
        Modulus::new(self.p, self.prec)
    }

    /// Representative in `(-p^prec/2, p^prec/2]`.
    pub fn to_signed(&self) -> i128 {
        self.modulus().lift_signed(self.res)
    }

    pub fn is_zero(&self) -> bool {
        self.res == 0
    }

    /// Exact valuation, or `None` when the value is zero to the known precision
    /// (the valuation is then only known to be `>= prec`).
    pub fn valuation(&self) -> Option<u32> {
        (self.res != 0).then(|| val_u64(self.res, self.p))
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        let prec = prec.min(self.prec);
        Zp::new(self.p, prec, self.res)
    }

    fn common(&self, o: &Zp) -> Modulus {
        assert_eq!(self.p, o.p, "mixing primes");
        Modulus::new(self.p, self.prec.min(o.prec))
    }

    pub fn add(&self, o: &Zp) -> Zp {
        let m = self.common(o);
        Zp { p: self.p, prec: m.k, res: m.add(self.res % m.m, o.res % m.m) }
    }

    pub fn sub(&self, o: &Zp) -> Zp {
        let m = self.common(o);
        Zp { p: self.p, prec: m.k, res: m.sub(self.res % m.m, o.res % m.m) }
    }

    pub fn mul(&self, o: &Zp) -> Zp {
        let m = self.common(o);
        Zp { p: self.p, prec: m.k, res: m.mul(self.res % m.m, o.res % m.m) }
    }

    pub fn neg(&self) -> Zp {
        Zp { p: self.p, prec: self.prec, res: self.modulus().neg(self.res) }
    }

    pub fn pow(&self, e: u64) -> Zp {
        Zp { p: self.p, prec: self.prec, res: self.modulus().pow(self.res, e) }
    }

    /// Inverse in `Z_p`; only units are invertible here (use [`Qp`] otherwise).
    pub fn inv(&self) -> Result<Zp> {
        if self.res == 0 {
            return Err(Error::DivisionByZero);
        }
        if self.res % self.p == 0 {
            return Err(Error::IntegralityViolation(format!(
                "{self} is not a unit of Z_{}",
                self.p
            )));
        }
        let inv = inv_mod(self.res, self.modulus().m).expect("unit");
        Ok(Zp { p: self.p, prec: self.prec, res: inv })
    }

    pub fn to_qp(&self) -> Qp {
        Qp::from_scaled(self.p, self.res, 0, self.prec as i32)
    }
}

impl fmt::Display for Zp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_qp().fmt(f)
    }
}

/// An element `unit * p^val` of `Q_p`, with the unit known modulo `p^rel`.
///
/// Zero is stored with `unit = 0`, `rel = 0`, and `val` holding the absolute
/// precision: the value is `O(p^val)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Qp {
    p: u64,
    val: i32,
    unit: u64,
    rel: u32,
}

impl Qp {
    /// Absolute precision used for values that are exact for all purposes.
    pub const EXACT: i32 = 1 << 20;

    /// Builds `num * p^shift`, where `num` is a residue modulo `p^(abs - shift)`.
    pub fn from_scaled(p: u64, num: u64, shift: i32, abs: i32) -> Qp {
        if abs <= shift {
            return Qp::zero(p, abs);
        }
        let k = (abs - shift) as u32;
        let m = Modulus::new(p, k);
        let num = num % m.m;
        if num == 0 {
            return Qp::zero(p, abs);
        }
        let v = val_u64(num, p);
        let unit = num / super::arith::pow_u64(p, v);
        Qp { p, val: shift + v as i32, unit, rel: k - v }
    }

    /// `x * p^shift` known to absolute precision `abs`.
    pub fn from_int(p: u64, x: i128, abs: i32) -> Qp {
        Self::from_int_scaled(p, x, 0, abs)
    }

    pub fn from_int_scaled(p: u64, x: i128, shift: i32, abs: i32) -> Qp {
        if abs <= shift {
            return Qp::zero(p, abs);
        }
        if x == 0 {
            return Qp::zero(p, abs);
        }
        let mut x = x;
        let mut v = 0i32;
        while x % p as i128 == 0 {
            x /= p as i128;
            v += 1;
        }
        let val = shift + v;
        if val >= abs {
            return Qp::zero(p, abs);
        }
        let rel = ((abs - val) as u32).min(max_digits(p));
        let m = Modulus::new(p, rel);
        Qp { p, val, unit: m.from_i128(x), rel }
    }

    /// The rational `num/den` to absolute precision `abs`.
    pub fn from_ratio(p: u64, num: i128, den: i128, abs: i32) -> Result<Qp> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = Qp::from_int(p, num, abs + 64);
        let d = Qp::from_int(p, den, abs + 64);
        Ok(n.div(&d)?.with_abs(abs))
    }

    pub fn zero(p: u64, abs: i32) -> Qp {
        Qp { p, val: abs, unit: 0, rel: 0 }
    }

    pub fn one(p: u64, abs: i32) -> Qp {
        Qp::from_int(p, 1, abs)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.unit == 0
    }

    /// Exact valuation; `None` for a value indistinguishable from zero.
    pub fn valuation(&self) -> Option<i32> {
        (!self.is_zero()).then_some(self.val)
    }

    /// Valuation, with zero reported as its absolute precision.
    pub fn val_or_abs(&self) -> i32 {
        self.val
    }

    pub fn unit(&self) -> Zp {
        Zp { p: self.p, prec: self.rel, res: self.unit }
    }

    pub fn rel_prec(&self) -> u32 {
        self.rel
    }

    /// Absolute precision: the value is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i32 {
        self.val + self.rel as i32
    }

    pub fn with_abs(&self, abs: i32) -> Qp {
        if abs >= self.abs_prec() {
            return *self;
        }
        if self.is_zero() || abs <= self.val {
            return Qp::zero(self.p, abs.min(self.abs_prec()));
        }
        let rel = (abs - self.val) as u32;
        let m = Modulus::new(self.p, rel);
        Qp { p: self.p, val: self.val, unit: self.unit % m.m, rel }
    }

    /// Residue of `self * p^shift` modulo `p^k`, requiring it to be integral.
    pub fn scaled_residue(&self, shift: i32, k: u32) -> Result<u64> {
        if self.is_zero() {
            return Ok(0);
        }
        let v = self.val + shift;
        if v < 0 {
            return Err(Error::IntegralityViolation(format!(
                "{self} times p^{shift} is not integral"
            )));
        }
        if v as u32 >= k {
            return Ok(0);
        }
        let m = Modulus::new(self.p, k);
        Ok(m.mul(self.unit % m.m, super::arith::pow_u64(self.p, v as u32)))
    }

    /// The value as a signed integer times `p^val`, for small values.
    pub fn to_rational_parts(&self) -> (i128, i32) {
        if self.is_zero() {
            return (0, 0);
        }
        (Modulus::new(self.p, self.rel).lift_signed(self.unit), self.val)
    }

    pub fn neg(&self) -> Qp {
        if self.is_zero() {
            return *self;
        }
        let m = Modulus::new(self.p, self.rel);
        Qp { unit: m.neg(self.unit), ..*self }
    }

    pub fn add(&self, o: &Qp) -> Qp {
        assert_eq!(self.p, o.p, "mixing primes");
        let abs = self.abs_prec().min(o.abs_prec());
        if self.is_zero() {
            return o.with_abs(abs);
        }
        if o.is_zero() {
            return self.with_abs(abs);
        }
        let v = self.val.min(o.val);
        if abs <= v {
            return Qp::zero(self.p, abs);
        }
        let k = (abs - v) as u32;
        let m = Modulus::new(self.p, k);
        let a = m.mul(self.unit % m.m, m.pow(self.p, (self.val - v) as u64));
        let b = m.mul(o.unit % m.m, m.pow(self.p, (o.val - v) as u64));
        Qp::from_scaled(self.p, m.add(a, b), v, abs)
    }

    pub fn sub(&self, o: &Qp) -> Qp {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Qp) -> Qp {
        assert_eq!(self.p, o.p, "mixing primes");
        match (self.is_zero(), o.is_zero()) {
            (true, _) | (_, true) => Qp::zero(self.p, self.val.saturating_add(o.val).min(Qp::EXACT)),
            (false, false) => {
                let rel = self.rel.min(o.rel);
                let m = Modulus::new(self.p, rel);
                Qp { p: self.p, val: self.val + o.val, unit: m.mul(self.unit % m.m, o.unit % m.m), rel }
            }
        }
    }

    pub fn inv(&self) -> Result<Qp> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = Modulus::new(self.p, self.rel);
        let unit = inv_mod(self.unit, m.m).expect("unit part is a unit");
        Ok(Qp { p: self.p, val: -self.val, unit, rel: self.rel })
    }

    pub fn div(&self, o: &Qp) -> Result<Qp> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn mul_int(&self, k: i64) -> Qp {
        self.mul(&Qp::from_int(self.p, k as i128, self.abs_prec().max(0) + 64))
    }

    /// Multiplies by `p^k` (exact, shifts the valuation).
    pub fn shift(&self, k: i32) -> Qp {
        Qp { val: self.val + k, ..*self }
    }

    pub fn pow(&self, e: u32) -> Qp {
        let mut r = Qp::one(self.p, Qp::EXACT);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Equality up to the smaller of the two absolute precisions.
    pub fn eq_at_prec(&self, o: &Qp) -> bool {
        self.sub(o).is_zero()
    }
}

impl fmt::Display for Qp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.p;
        if self.is_zero() {
            return write!(f, "0*{p}^{} + O({p}^{})", self.val, self.val);
        }
        write!(f, "{}*{p}^{} + O({p}^{})", self.unit, self.val, self.abs_prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_products() {
        let a = Zp::from_i64(5, 4, 2);
        let b = Zp::from_i64(5, 4, 3);
        assert_eq!(a.mul(&b).residue(), 6);
    }

    #[test]
    fn inverse_of_two() {
        let a = Zp::from_i64(5, 4, 2);
        assert_eq!(a.inv().unwrap().residue(), 313);
        assert_eq!(a.to_qp().inv().unwrap().unit().residue(), 313);
    }

    #[test]
    fn inverse_of_p_is_rational() {
        let five = Qp::from_int(5, 5, 4);
        let inv = five.inv().unwrap();
        assert_eq!(inv.valuation(), Some(-1));
        assert_eq!(inv.unit().residue(), 1);
        assert!(Zp::from_i64(5, 4, 5).inv().is_err());
        assert_eq!(Zp::zero(5, 4).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn precision_follows_operands() {
        let a = Qp::from_int(5, 7, 3);
        let b = Qp::from_int(5, 1, 6);
        assert_eq!(a.add(&b).abs_prec(), 3);
        let c = Qp::from_int(5, 25, 6);
        assert_eq!(c.mul(&a).abs_prec(), 5);
        // cancellation keeps the absolute precision
        let d = Qp::from_int(5, 26, 6).sub(&Qp::from_int(5, 1, 6));
        assert_eq!(d.valuation(), Some(2));
        assert_eq!(d.abs_prec(), 6);
    }

    #[test]
    fn rendering() {
        let x = Qp::from_int(5, 50, 6);
        assert_eq!(x.to_string(), "2*5^2 + O(5^6)");
        assert_eq!(Zp::zero(5, 3).to_string(), "0*5^3 + O(5^3)");
    }

    #[test]
    fn ratios() {
        let x = Qp::from_ratio(5, 3, 5, 6).unwrap();
        assert_eq!(x.valuation(), Some(-1));
        assert_eq!(x.mul_int(5).to_rational_parts(), (3, 0));
        assert!(Qp::from_ratio(5, 1, 0, 4).is_err());
    }
}

//! Exact and p-adic arithmetic: word-sized residues, p-adic scalars with
//! tracked precision, exact integer polynomials, truncated power series and
//! small linear algebra over `Z_p` and `Q_p`.

pub mod arith;
mod context;
mod exact;
pub mod linalg;
mod padic;
mod series;
pub mod univariate;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub use context::Context;
pub use exact::ExactPoly;
pub use padic::{Qp, Zp};
pub use series::{Series, Space};

/// A commutative ring whose elements know enough about themselves to build
/// constants of the same kind (precision, variable set, ...).
pub trait CoeffRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn from_bigint_like(&self, n: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut r = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }
}

impl CoeffRing for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::from(0)
    }
    fn one_like(&self) -> Self {
        BigInt::from(1)
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        n.clone()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl CoeffRing for Zp {
    fn zero_like(&self) -> Self {
        Zp::zero(self.p(), self.prec())
    }
    fn one_like(&self) -> Self {
        Zp::one(self.p(), self.prec())
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        let m = BigInt::from(arith::pow_u64(self.p(), self.prec()));
        let r = ((n % &m) + &m) % &m;
        Zp::new(self.p(), self.prec(), r.to_u64().expect("reduced residue fits"))
    }
    fn add(&self, o: &Self) -> Self {
        Zp::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Zp::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Zp::mul(self, o)
    }
    fn neg(&self) -> Self {
        Zp::neg(self)
    }
}

impl CoeffRing for Series {
    fn zero_like(&self) -> Self {
        Series::zero_abs(self.space(), self.p(), self.abs_prec())
    }
    fn one_like(&self) -> Self {
        Series::one(self.space(), self.p(), self.cap()).with_abs(self.abs_prec())
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        let x = n.to_i128().expect("constant fits in i128");
        Series::one(self.space(), self.p(), self.cap()).with_abs(self.abs_prec()).scale(&Qp::from_int(self.p(), x, Qp::EXACT))
    }
    fn add(&self, o: &Self) -> Self {
        Series::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Series::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Series::mul(self, o)
    }
    fn neg(&self) -> Self {
        Series::neg(self)
    }
    fn pow(&self, e: u64) -> Self {
        Series::pow(self, e)
    }
}

//! p-typical Witt vectors of length at most three, and the p-derivation
//! `delta(x) = (x - x^p) / p` on `Z_p`.
//!
//! Arithmetic has two independent routes: evaluating the universal structure
//! polynomials, and going through the ghost map over exact integers and
//! solving back. The second is the oracle for the first.

mod delta;
mod structure;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::ring::arith::pow_u64;
use crate::ring::{CoeffRing, ExactPoly, Zp};
use crate::{Error, Result};

pub use delta::{check_delta_axioms, delta_map, DeltaReport};
pub use structure::{ghost_component, solve_ghost_exact, structure_polynomials, StructurePolySet, MAX_LEVEL};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WittOp {
    Add,
    Mul,
}

/// `(a_0, ..., a_n)` over a coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WittVector<T> {
    comps: Vec<T>,
}

impl<T: CoeffRing> WittVector<T> {
    pub fn new(comps: Vec<T>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::LengthTooShort);
        }
        Ok(WittVector { comps })
    }

    pub fn components(&self) -> &[T] {
        &self.comps
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level(&self) -> usize {
        self.comps.len() - 1
    }

    pub fn ghost(&self, p: u64) -> Vec<T> {
        (0..self.len()).map(|i| ghost_component(p, &self.comps, i)).collect()
    }

    fn eval_set(&self, polys: &[ExactPoly], other: Option<&Self>) -> Vec<T> {
        let n = self.level();
        let mut args = self.comps.clone();
        match other {
            Some(o) => args.extend(o.comps.iter().cloned()),
            None => args.extend((0..=n).map(|_| self.comps[0].zero_like())),
        }
        polys.iter().map(|f| f.eval(&args)).collect()
    }

    pub fn arith(&self, o: &Self, op: WittOp, p: u64) -> Result<Self> {
        if self.len() != o.len() {
            return Err(Error::LengthMismatch);
        }
        let s = structure_polynomials(p, self.level())?;
        let polys = match op {
            WittOp::Add => &s.sum,
            WittOp::Mul => &s.prod,
        };
        Ok(WittVector { comps: self.eval_set(polys, Some(o)) })
    }

    pub fn add(&self, o: &Self, p: u64) -> Result<Self> {
        self.arith(o, WittOp::Add, p)
    }

    pub fn mul(&self, o: &Self, p: u64) -> Result<Self> {
        self.arith(o, WittOp::Mul, p)
    }

    pub fn neg(&self, p: u64) -> Result<Self> {
        let s = structure_polynomials(p, self.level())?;
        Ok(WittVector { comps: self.eval_set(&s.neg, None) })
    }

    /// `F`, one component shorter: ghost components shift left.
    pub fn frobenius(&self, p: u64) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::LengthTooShort);
        }
        let s = structure_polynomials(p, self.level())?;
        Ok(WittVector { comps: self.eval_set(&s.frob, None) })
    }

    /// `T`, drops the last component.
    pub fn truncate(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::LengthTooShort);
        }
        Ok(WittVector { comps: self.comps[..self.len() - 1].to_vec() })
    }

    /// `V`, one component longer: `(0, a_0, ..., a_n)`.
    pub fn verschiebung(&self) -> Result<Self> {
        if self.len() > MAX_LEVEL {
            return Err(Error::InvalidContext(format!("Witt level {} exceeds {MAX_LEVEL}", self.len())));
        }
        let mut comps = vec![self.comps[0].zero_like()];
        comps.extend(self.comps.iter().cloned());
        Ok(WittVector { comps })
    }

    /// `[c] = (c, 0, ..., 0)` of the given length.
    pub fn teichmuller(c: T, len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::LengthTooShort);
        }
        let z = c.zero_like();
        let mut comps = vec![c];
        comps.resize(len, z);
        Ok(WittVector { comps })
    }
}

/// Ghost-side route over exact integers.
pub mod exact {
    use super::*;

    /// Recovers Witt components from ghost components, failing if they do
    /// not come from an integral Witt vector.
    pub fn from_ghost(p: u64, g: &[BigInt]) -> Result<WittVector<BigInt>> {
        let mut a: Vec<BigInt> = Vec::with_capacity(g.len());
        let mut pi = BigInt::from(1);
        for (i, gi) in g.iter().enumerate() {
            let mut r = gi.clone();
            let mut pj = BigInt::from(1);
            for (j, aj) in a.iter().enumerate() {
                r -= &pj * num_traits::pow(aj.clone(), p.pow((i - j) as u32) as usize);
                pj *= p;
            }
            if !(&r % &pi).is_zero() {
                return Err(Error::InexactDivision);
            }
            a.push(r / &pi);
            pi *= p;
        }
        WittVector::new(a)
    }

    pub fn arith(a: &WittVector<BigInt>, b: &WittVector<BigInt>, op: WittOp, p: u64) -> Result<WittVector<BigInt>> {
        if a.len() != b.len() {
            return Err(Error::LengthMismatch);
        }
        let (ga, gb) = (a.ghost(p), b.ghost(p));
        let g: Vec<BigInt> = ga
            .iter()
            .zip(&gb)
            .map(|(x, y)| match op {
                WittOp::Add => x + y,
                WittOp::Mul => x * y,
            })
            .collect();
        from_ghost(p, &g)
    }

    pub fn neg(a: &WittVector<BigInt>, p: u64) -> Result<WittVector<BigInt>> {
        let g: Vec<BigInt> = a.ghost(p).iter().map(|x| -x).collect();
        from_ghost(p, &g)
    }

    pub fn frobenius(a: &WittVector<BigInt>, p: u64) -> Result<WittVector<BigInt>> {
        if a.len() < 2 {
            return Err(Error::LengthTooShort);
        }
        from_ghost(p, &a.ghost(p)[1..])
    }

    fn lift(a: &WittVector<Zp>) -> WittVector<BigInt> {
        WittVector { comps: a.comps.iter().map(|z| BigInt::from(z.to_signed())).collect() }
    }

    fn reduce(a: &WittVector<BigInt>, like: &Zp) -> WittVector<Zp> {
        WittVector { comps: a.comps.iter().map(|x| like.from_bigint_like(x)).collect() }
    }

    /// Arithmetic on `Z/p^N` components by lifting to integers. Witt
    /// operations are integral polynomials, so the reduction is exact.
    pub fn arith_zp(a: &WittVector<Zp>, b: &WittVector<Zp>, op: WittOp, p: u64) -> Result<WittVector<Zp>> {
        let r = arith(&lift(a), &lift(b), op, p)?;
        Ok(reduce(&r, &a.comps[0]))
    }

    pub fn frobenius_zp(a: &WittVector<Zp>, p: u64) -> Result<WittVector<Zp>> {
        let r = frobenius(&lift(a), p)?;
        Ok(reduce(&r, &a.comps[0]))
    }
}

impl WittVector<BigInt> {
    pub fn from_ints(xs: &[i64]) -> Result<Self> {
        WittVector::new(xs.iter().map(|&x| BigInt::from(x)).collect())
    }
}

impl WittVector<Zp> {
    pub fn from_ints_mod(p: u64, prec: u32, xs: &[i64]) -> Result<Self> {
        WittVector::new(xs.iter().map(|&x| Zp::from_i64(p, prec, x)).collect())
    }
}

impl fmt::Display for WittVector<BigInt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.comps.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

impl fmt::Display for WittVector<Zp> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.comps.iter().map(|x| x.to_signed().to_string()).collect();
        write!(f, "[{}]", s.join(", "))
    }
}

/// Reduces an exact integer to a balanced residue mod `p^k`, or `None` if
/// it does not fit in an `i128`.
pub fn balanced(x: &BigInt, p: u64, k: u32) -> Option<i128> {
    let m = BigInt::from(pow_u64(p, k));
    let mut r = ((x % &m) + &m) % &m;
    if (&r * 2) > m {
        r -= &m;
    }
    if r.abs() > m {
        return None;
    }
    r.to_i128()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wi(xs: &[i64]) -> WittVector<BigInt> {
        WittVector::from_ints(xs).unwrap()
    }

    #[test]
    fn teichmuller_one_doubled() {
        let a = wi(&[1, 0]);
        let s = a.add(&a, 5).unwrap();
        assert_eq!(s, wi(&[2, -6]));
        assert_eq!(s.ghost(5), vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(exact::arith(&a, &a, WittOp::Add, 5).unwrap(), s);
        assert_eq!(a.add(&wi(&[-1, 0]), 5).unwrap(), wi(&[0, 0]));
    }

    #[test]
    fn ghost_examples() {
        assert_eq!(wi(&[2, 1]).ghost(5), vec![BigInt::from(2), BigInt::from(37)]);
        assert_eq!(wi(&[0, 4]).ghost(3), vec![BigInt::from(0), BigInt::from(12)]);
        let t = WittVector::teichmuller(BigInt::from(2), 3).unwrap();
        assert_eq!(t.ghost(3), vec![BigInt::from(2), BigInt::from(8), BigInt::from(512)]);
    }

    #[test]
    fn operators() {
        assert_eq!(wi(&[2, -6]).frobenius(5).unwrap(), wi(&[2]));
        assert_eq!(wi(&[1, 2, 3]).truncate().unwrap(), wi(&[1, 2]));
        assert_eq!(wi(&[7]).verschiebung().unwrap(), wi(&[0, 7]));
        assert_eq!(wi(&[7]).frobenius(5), Err(Error::LengthTooShort));
        assert_eq!(wi(&[1, 2]).add(&wi(&[1]), 5), Err(Error::LengthMismatch));
    }

    #[test]
    fn frobenius_after_verschiebung_is_p() {
        let a = wi(&[3, -2]);
        let fv = a.verschiebung().unwrap().frobenius(3).unwrap();
        let g: Vec<BigInt> = a.ghost(3).iter().map(|x| x * 3).collect();
        assert_eq!(fv.ghost(3), g);
    }

    #[test]
    fn modular_routes_agree() {
        let a = WittVector::from_ints_mod(7, 6, &[12, -5, 40]).unwrap();
        let b = WittVector::from_ints_mod(7, 6, &[3, 9, -8]).unwrap();
        for op in [WittOp::Add, WittOp::Mul] {
            assert_eq!(a.arith(&b, op, 7).unwrap(), exact::arith_zp(&a, &b, op, 7).unwrap());
        }
        assert_eq!(a.frobenius(7).unwrap(), exact::frobenius_zp(&a, 7).unwrap());
    }

    #[test]
    fn non_ghost_vector_is_rejected() {
        assert_eq!(exact::from_ghost(5, &[BigInt::from(1), BigInt::from(2)]), Err(Error::InexactDivision));
    }
}

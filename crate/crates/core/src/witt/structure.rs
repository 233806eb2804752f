//! Universal Witt structure polynomials, derived from the ghost recursion
//! over exact integers.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::One;

use crate::ring::{CoeffRing, ExactPoly};
use crate::{Error, Result};

/// Highest supported level; length is at most `MAX_LEVEL + 1`.
pub const MAX_LEVEL: usize = 2;

/// Sum, product, negation and Frobenius polynomials for one `(p, n)`.
///
/// All polynomials live in `2(n+1)` variables `X_0..X_n, Y_0..Y_n`; the
/// negation and Frobenius polynomials only use the `X` block.
#[derive(Clone, Debug)]
pub struct StructurePolySet {
    pub p: u64,
    pub n: usize,
    pub sum: Vec<ExactPoly>,
    pub prod: Vec<ExactPoly>,
    pub neg: Vec<ExactPoly>,
    pub frob: Vec<ExactPoly>,
}

/// `w_i(a) = sum_{j <= i} p^j a_j^{p^(i-j)}` over any coefficient ring.
pub fn ghost_component<T: CoeffRing>(p: u64, a: &[T], i: usize) -> T {
    let mut acc = a[0].zero_like();
    let mut pj = BigInt::one();
    for (j, x) in a.iter().enumerate().take(i + 1) {
        let e = p.pow((i - j) as u32);
        let t = x.pow(e).mul(&x.from_bigint_like(&pj));
        acc = acc.add(&t);
        pj *= p;
    }
    acc
}

/// Solves `w_i(a) = g_i` for `a` over the integers, level by level.
pub fn solve_ghost_exact(p: u64, g: &[ExactPoly]) -> Result<Vec<ExactPoly>> {
    let mut a: Vec<ExactPoly> = Vec::with_capacity(g.len());
    let mut pi = BigInt::one();
    for (i, gi) in g.iter().enumerate() {
        let mut r = gi.clone();
        let mut pj = BigInt::one();
        for (j, aj) in a.iter().enumerate() {
            r = r.sub(&aj.pow(p.pow((i - j) as u32)).scale(&pj));
            pj *= p;
        }
        a.push(r.div_exact(&pi)?);
        pi *= p;
    }
    Ok(a)
}

fn derive(p: u64, n: usize) -> Result<StructurePolySet> {
    let nv = 2 * (n + 1);
    let xs: Vec<ExactPoly> = (0..=n).map(|i| ExactPoly::var(nv, i)).collect();
    let ys: Vec<ExactPoly> = (0..=n).map(|i| ExactPoly::var(nv, n + 1 + i)).collect();
    let gx: Vec<ExactPoly> = (0..=n).map(|i| ghost_component(p, &xs, i)).collect();
    let gy: Vec<ExactPoly> = (0..=n).map(|i| ghost_component(p, &ys, i)).collect();

    let gs: Vec<ExactPoly> = gx.iter().zip(&gy).map(|(a, b)| a.add(b)).collect();
    let gp: Vec<ExactPoly> = gx.iter().zip(&gy).map(|(a, b)| a.mul(b)).collect();
    let sum = solve_ghost_exact(p, &gs)?;
    let prod = solve_ghost_exact(p, &gp)?;
    // for odd p the additive inverse is coordinatewise negation
    let neg: Vec<ExactPoly> = xs.iter().map(|x| x.neg()).collect();
    let frob = solve_ghost_exact(p, &gx[1..])?;

    let set = StructurePolySet { p, n, sum, prod, neg, frob };
    set.verify(&gx, &gy)?;
    Ok(set)
}

impl StructurePolySet {
    fn verify(&self, gx: &[ExactPoly], gy: &[ExactPoly]) -> Result<()> {
        let p = self.p;
        for i in 0..=self.n {
            let bad = |what: &str| Error::IdentityViolation(format!("ghost identity for {what}_{i} at p={p}"));
            if ghost_component(p, &self.sum, i) != gx[i].add(&gy[i]) {
                return Err(bad("S"));
            }
            if ghost_component(p, &self.prod, i) != gx[i].mul(&gy[i]) {
                return Err(bad("P"));
            }
            if ghost_component(p, &self.neg, i) != gx[i].neg() {
                return Err(bad("Neg"));
            }
            if i < self.n && ghost_component(p, &self.frob, i) != gx[i + 1] {
                return Err(bad("Frob"));
            }
        }
        Ok(())
    }

    pub fn nvars(&self) -> usize {
        2 * (self.n + 1)
    }
}

/// Structure polynomials for `(p, n)`, derived once and then shared.
pub fn structure_polynomials(p: u64, n: usize) -> Result<Arc<StructurePolySet>> {
    if n > MAX_LEVEL {
        return Err(Error::InvalidContext(format!("Witt level {n} exceeds {MAX_LEVEL}")));
    }
    if p < 3 || !crate::ring::arith::is_prime(p) {
        return Err(Error::InvalidContext(format!("{p} is not an odd prime")));
    }
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Arc<StructurePolySet>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().unwrap().get(&(p, n)) {
        return Ok(s.clone());
    }
    let s = Arc::new(derive(p, n)?);
    cache.lock().unwrap().insert((p, n), s.clone());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn first_sum_polynomial_at_five() {
        let s = structure_polynomials(5, 1).unwrap();
        // X0 X1 Y0 Y1
        let want = ExactPoly::var(4, 1)
            .add(&ExactPoly::var(4, 3))
            .sub(&ExactPoly::monomial(&[4, 0, 1, 0], big(1)))
            .sub(&ExactPoly::monomial(&[3, 0, 2, 0], big(2)))
            .sub(&ExactPoly::monomial(&[2, 0, 3, 0], big(2)))
            .sub(&ExactPoly::monomial(&[1, 0, 4, 0], big(1)));
        assert_eq!(s.sum[1], want);
        assert_eq!(s.sum[0], ExactPoly::var(4, 0).add(&ExactPoly::var(4, 2)));
        assert_eq!(s.prod[0], ExactPoly::monomial(&[1, 0, 1, 0], big(1)));
    }

    #[test]
    fn first_product_polynomial() {
        for p in [3u64, 5, 7] {
            let s = structure_polynomials(p, 1).unwrap();
            let pe = p as u16;
            let want = ExactPoly::monomial(&[pe, 0, 0, 1], big(1))
                .add(&ExactPoly::monomial(&[0, 1, pe, 0], big(1)))
                .add(&ExactPoly::monomial(&[0, 1, 0, 1], big(p as i64)));
            assert_eq!(s.prod[1], want, "p={p}");
        }
    }

    #[test]
    fn frobenius_polynomial() {
        let s = structure_polynomials(3, 2).unwrap();
        let want = ExactPoly::monomial(&[3, 0, 0, 0, 0, 0], big(1)).add(&ExactPoly::monomial(&[0, 1, 0, 0, 0, 0], big(3)));
        assert_eq!(s.frob[0], want);
        assert_eq!(s.frob.len(), 2);
    }

    #[test]
    fn level_is_capped() {
        assert!(matches!(structure_polynomials(5, 3), Err(Error::InvalidContext(_))));
        assert!(matches!(structure_polynomials(9, 1), Err(Error::InvalidContext(_))));
    }
}

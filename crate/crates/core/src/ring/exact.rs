//! Multivariate polynomials with exact big-integer coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::CoeffRing;
use crate::{Error, Result};

/// A polynomial in `nvars` variables over `Z`, stored sparsely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, BigInt>,
}

impl ExactPoly {
    pub fn zero(nvars: usize) -> Self {
        ExactPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = ExactPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0u16; nvars];
        e[i] = 1;
        let mut p = ExactPoly::zero(nvars);
        p.terms.insert(e, BigInt::one());
        p
    }

    pub fn monomial(exps: &[u16], c: BigInt) -> Self {
        let mut p = ExactPoly::zero(exps.len());
        if !c.is_zero() {
            p.terms.insert(exps.to_vec(), c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u16>, &BigInt)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u16]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&x| x as u32).sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Vec<u16>, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        ExactPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.nvars, o.nvars);
        let mut acc: std::collections::HashMap<Vec<u16>, BigInt> = std::collections::HashMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u16> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += c1 * c2;
            }
        }
        ExactPoly {
            nvars: self.nvars,
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return ExactPoly::zero(self.nvars);
        }
        ExactPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect(),
        }
    }

    pub fn pow(&self, e: u64) -> Self {
        CoeffRing::pow(self, e)
    }

    /// Divides every coefficient by `d`, failing if any division is inexact.
    pub fn div_exact(&self, d: &BigInt) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let (q, r) = c.div_rem(d);
            if !r.is_zero() {
                return Err(Error::InexactDivision);
            }
            terms.insert(e.clone(), q);
        }
        Ok(ExactPoly { nvars: self.nvars, terms })
    }

    /// Evaluates at `vals`, one value per variable, in any coefficient ring.
    pub fn eval<R: CoeffRing>(&self, vals: &[R]) -> R {
        assert_eq!(vals.len(), self.nvars);
        let proto = &vals[0];
        let mut cache: Vec<Vec<R>> = vals.iter().map(|v| vec![proto.one_like(), v.clone()]).collect();
        let mut acc = proto.zero_like();
        for (e, c) in &self.terms {
            let mut t = proto.from_bigint_like(c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&vals[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][k as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitutes polynomials (in a common variable set) for the variables.
    pub fn compose(&self, args: &[ExactPoly]) -> ExactPoly {
        self.eval(args)
    }

    /// Renames variables: variable `i` becomes variable `map[i]` of an
    /// `nvars`-variable ring.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> ExactPoly {
        let mut r = ExactPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0u16; nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            r.add_term(f, c.clone());
        }
        r
    }

    /// Sets the listed variables to zero.
    pub fn kill(&self, vars: &[usize]) -> ExactPoly {
        ExactPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| vars.iter().all(|&v| e[v] == 0))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Renders with the given variable names.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        // highest total degree first reads most naturally
        let mut ts: Vec<_> = self.terms.iter().collect();
        ts.sort_by(|a, b| {
            let da: u32 = a.0.iter().map(|&x| x as u32).sum();
            let db: u32 = b.0.iter().map(|&x| x as u32).sum();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (i, (e, c)) in ts.into_iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let a = c.abs();
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| if k == 1 { names[j].to_string() } else { format!("{}^{}", names[j], k) })
                .collect();
            if mono.is_empty() {
                out.push_str(&a.to_string());
            } else {
                if !a.is_one() {
                    out.push_str(&a.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..self.nvars).map(|i| format!("v{i}")).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        f.write_str(&self.display_with(&refs))
    }
}

impl CoeffRing for ExactPoly {
    fn zero_like(&self) -> Self {
        ExactPoly::zero(self.nvars)
    }
    fn one_like(&self) -> Self {
        ExactPoly::constant(self.nvars, BigInt::one())
    }
    fn from_bigint_like(&self, n: &BigInt) -> Self {
        ExactPoly::constant(self.nvars, n.clone())
    }
    fn add(&self, o: &Self) -> Self {
        ExactPoly::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ExactPoly::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ExactPoly::mul(self, o)
    }
    fn neg(&self) -> Self {
        ExactPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomial_square() {
        let x = ExactPoly::var(2, 0);
        let y = ExactPoly::var(2, 1);
        let s = x.add(&y).pow(2);
        assert_eq!(s.coeff(&[1, 1]), BigInt::from(2));
        assert_eq!(s.num_terms(), 3);
        assert_eq!(x.add(&y).mul(&x.sub(&y)).display_with(&["x", "y"]), "x^2 - y^2");
    }

    #[test]
    fn exact_division() {
        let x = ExactPoly::var(1, 0);
        let f = x.scale(&BigInt::from(10));
        assert_eq!(f.div_exact(&BigInt::from(5)).unwrap().coeff(&[1]), BigInt::from(2));
        assert_eq!(f.div_exact(&BigInt::from(3)), Err(Error::InexactDivision));
    }

    #[test]
    fn evaluation_over_integers() {
        let x = ExactPoly::var(2, 0);
        let y = ExactPoly::var(2, 1);
        let f = x.pow(3).add(&y.scale(&BigInt::from(-4)));
        assert_eq!(f.eval(&[BigInt::from(2), BigInt::from(5)]), BigInt::from(-12));
    }
}

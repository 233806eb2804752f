use super::arith::{is_prime, max_digits};
use crate::{Error, Result};

/// The fixed prime `p`, p-adic precision `N` and series truncation degree `M`.
///
/// The scalar Frobenius is the identity throughout, so `p` is at once the
/// uniformizer and the residue field size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Context {
    pub p: u64,
    pub n: u32,
    pub m: usize,
}

impl Context {
    pub fn new(p: u64, n: u32, m: usize) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidContext(format!("p = {p} must be an odd prime")));
        }
        if n < 2 {
            return Err(Error::InvalidContext(format!("precision N = {n} must be at least 2")));
        }
        if m < 1 {
            return Err(Error::InvalidContext("truncation degree M must be at least 1".into()));
        }
        if m > 255 {
            return Err(Error::InvalidContext(format!("truncation degree M = {m} exceeds 255")));
        }
        // working precision is padded by the log denominators and a few guard digits
        if n + super::arith::ilog(p, m as u64) + 6 > max_digits(p) {
            return Err(Error::InvalidContext(format!(
                "precision N = {n} too large for word-sized residues at p = {p}"
            )));
        }
        Ok(Context { p, n, m })
    }

    pub fn with_prec(&self, n: u32) -> Result<Self> {
        Context::new(self.p, n, self.m)
    }

    pub fn with_deg(&self, m: usize) -> Result<Self> {
        Context::new(self.p, self.n, m)
    }

    /// Digits lost to the denominators `1/k` of a logarithm up to degree `M`.
    pub fn log_loss(&self) -> u32 {
        super::arith::ilog(self.p, self.m as u64)
    }

    /// Working residue precision: `N` plus room for the logarithm denominators.
    pub fn work_prec(&self) -> u32 {
        self.n + self.log_loss() + 2
    }
}

//! One-variable series with a separate precision per coefficient.
//!
//! Logarithms and exponentials of formal groups have denominators that grow
//! with the degree. A common shift would charge every coefficient for the
//! worst one, so composition and reversion in one variable go through
//! coefficient vectors of [`Qp`] instead.

use std::sync::Arc;

use super::padic::Qp;
use super::series::{Exps, Series, Space, MAX_VARS};
use crate::{Error, Result};

/// Coefficients `[c_0, ..., c_deg]` of a one-variable series.
pub fn to_vec(s: &Series) -> Vec<Qp> {
    assert_eq!(s.space().nvars(), 1, "univariate series expected");
    (0..=s.space().deg()).map(|k| s.coeff(&[k as u8])).collect()
}

pub fn from_vec(space: &Arc<Space>, p: u64, c: &[Qp]) -> Series {
    let terms: Vec<(Exps, Qp)> = c
        .iter()
        .enumerate()
        .take(space.deg() + 1)
        .map(|(k, q)| {
            let mut e = [0u8; MAX_VARS];
            e[0] = k as u8;
            (e, *q)
        })
        .collect();
    Series::from_qp_terms(space, p, Qp::EXACT, &terms)
}

pub fn mul_trunc(a: &[Qp], b: &[Qp], deg: usize) -> Vec<Qp> {
    let p = a[0].p();
    let mut r: Vec<Option<Qp>> = vec![None; deg + 1];
    for (i, x) in a.iter().enumerate().take(deg + 1) {
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            let t = x.mul(y);
            r[i + j] = Some(match r[i + j] {
                None => t,
                Some(s) => s.add(&t),
            });
        }
    }
    r.into_iter().map(|x| x.unwrap_or_else(|| Qp::zero(p, Qp::EXACT))).collect()
}

/// `f(g)` for `g` with zero constant term.
pub fn compose(f: &[Qp], g: &[Qp], deg: usize) -> Vec<Qp> {
    let p = f[0].p();
    let mut acc = vec![Qp::zero(p, Qp::EXACT); deg + 1];
    for k in (0..f.len().min(deg + 1)).rev() {
        acc = mul_trunc(&acc, g, deg);
        acc[0] = acc[0].add(&f[k]);
    }
    acc
}

/// Compositional inverse of `f = u t + O(t^2)` with `u` a unit.
pub fn reversion(f: &[Qp], deg: usize) -> Result<Vec<Qp>> {
    let p = f[0].p();
    if !f[0].is_zero() {
        return Err(Error::NonzeroConstantTerm);
    }
    if f.len() < 2 || f[1].valuation() != Some(0) {
        return Err(Error::NonUnitLinearCoefficient);
    }
    let uinv = f[1].inv()?;
    let mut g = vec![Qp::zero(p, Qp::EXACT); deg + 1];
    if deg >= 1 {
        g[1] = uinv;
    }
    for k in 2..=deg {
        let fg = compose(f, &g[..k], k);
        g[k] = fg[k].neg().mul(&uinv);
    }
    Ok(g)
}

pub(crate) fn compose_series(f: &Series, g: &Series) -> Series {
    let deg = g.space().deg();
    let r = compose(&to_vec(f), &to_vec(g), deg);
    from_vec(g.space(), g.p(), &r)
}

impl Series {
    /// Compositional inverse of a one-variable series `u t + O(t^2)`.
    pub fn reversion(&self) -> Result<Series> {
        if self.space().nvars() != 1 {
            return Err(Error::VariableMismatch);
        }
        let g = reversion(&to_vec(self), self.space().deg())?;
        Ok(from_vec(self.space(), self.p(), &g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qi(x: i128) -> Qp {
        Qp::from_int(5, x, 10)
    }

    #[test]
    fn catalan_reversion() {
        // t + t^2 inverts to t - t^2 + 2t^3 - 5t^4 + 14t^5
        let f = vec![qi(0), qi(1), qi(1), qi(0), qi(0), qi(0)];
        let g = reversion(&f, 5).unwrap();
        let want = [0, 1, -1, 2, -5, 14];
        for (k, w) in want.iter().enumerate() {
            assert!(g[k].eq_at_prec(&qi(*w)), "degree {k}");
        }
    }

    #[test]
    fn reversion_rejects_non_units() {
        let f = vec![qi(0), qi(5), qi(1)];
        assert_eq!(reversion(&f, 2).unwrap_err(), Error::NonUnitLinearCoefficient);
        let g = vec![qi(1), qi(1)];
        assert_eq!(reversion(&g, 1).unwrap_err(), Error::NonzeroConstantTerm);
    }

    #[test]
    fn series_roundtrip() {
        let sp = Space::new(&["t"], 8);
        let f = from_vec(&sp, 5, &[qi(0), qi(1), qi(3), qi(-2), qi(7), qi(0), qi(1), qi(0), qi(4)]);
        let g = f.reversion().unwrap();
        let id = Series::var(&sp, 0, 5, 10);
        assert!(f.compose(&[g.clone()]).unwrap().residual(&id).unwrap() >= 9);
        assert!(g.compose(&[f]).unwrap().residual(&id).unwrap() >= 9);
    }
}

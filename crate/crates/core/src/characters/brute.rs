//! Additive series on `J^1` found without any ansatz: every monomial of
//! degree `1..=deg` in `(x_0, x_1)` is an unknown, and additivity for the jet
//! law gives the linear constraints. Over `Q_p` the solutions should be
//! exactly the span of `L_0` and `L_1`.

use crate::formalgroup::FormalGroupLaw;
use crate::jet::{self, CHECK_DEG};
use crate::ring::linalg::rank;
use crate::ring::{Qp, Series};
use crate::Result;

use super::projections_at;

#[derive(Clone, Debug)]
pub struct BruteForceReport {
    pub unknowns: usize,
    pub constraints: usize,
    pub kernel_dim: usize,
    /// Additivity residuals of `L_0` and `L_1` under the same constraints.
    pub ansatz_residuals: Vec<i32>,
    pub required: i32,
}

impl BruteForceReport {
    pub fn passed(&self) -> bool {
        self.kernel_dim == 2 && self.ansatz_residuals.iter().all(|&r| r >= self.required)
    }
}

/// Solves for all additive series on `J^1` at degree `min(M, 12)`.
pub fn brute_force_characters(f: &FormalGroupLaw) -> Result<BruteForceReport> {
    let p = f.ctx.p;
    let deg = f.ctx.m.min(CHECK_DEG);
    let j = jet::jet_law_of(&f.law.truncate(deg), p, 1, deg)?;
    let (xs, ys) = (j.xs(), j.ys());
    let sp = j.space.clone();
    let cap = j.law[0].cap();

    let powers = |s: &Series| -> Vec<Series> {
        let mut v = vec![Series::one(&sp, p, cap)];
        for _ in 0..deg {
            let next = v[v.len() - 1].mul(s);
            v.push(next);
        }
        v
    };
    let (l0, l1) = (powers(&j.law[0]), powers(&j.law[1]));
    let (x0, x1) = (powers(&xs[0]), powers(&xs[1]));
    let (y0, y1) = (powers(&ys[0]), powers(&ys[1]));

    let mut cols: Vec<Vec<Qp>> = Vec::new();
    for d in 1..=deg {
        for a in 0..=d {
            let b = d - a;
            let col = l0[a].mul(&l1[b]).sub(&x0[a].mul(&x1[b])).sub(&y0[a].mul(&y1[b]));
            cols.push((0..sp.len()).map(|i| col.coeff_at(i)).collect());
        }
    }
    let zero_at = cap as i32 - 2;
    let r = rank(&cols, zero_at);

    let ls = projections_at(f, 1, deg)?;
    let ansatz_residuals = ls
        .iter()
        .map(|l| {
            let left = l.compose(&j.law)?;
            let right = l.compose(&xs)?.add(&l.compose(&ys)?);
            left.residual(&right)
        })
        .collect::<Result<_>>()?;
    Ok(BruteForceReport {
        unknowns: cols.len(),
        constraints: sp.len(),
        kernel_dim: cols.len() - r,
        ansatz_residuals,
        required: f.ctx.n as i32 - 2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Context;

    #[test]
    fn small_degree_multiplicative() {
        let f = FormalGroupLaw::multiplicative(&Context::new(5, 8, 6).unwrap()).unwrap();
        let r = brute_force_characters(&f).unwrap();
        assert_eq!(r.unknowns, 27);
        assert!(r.passed(), "{r:?}");
    }
}

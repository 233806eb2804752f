//! Small dense linear algebra over `Z/p^W` and `Q_p`.
//!
//! All elimination pivots on the entry of least valuation, which is what
//! keeps precision losses visible and bounded.

use super::arith::{pow_u64, val_u64, Modulus};
use super::padic::Qp;
use crate::{Error, Result};

/// Smith form of an integer matrix modulo `p^W`, with the column transform.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Exponents `d_i` of the diagonal entries `p^{d_i}`, `W` for zero.
    pub exps: Vec<u32>,
    /// `C` with `A C = U D` for some invertible `U`: column `i` of `C` is the
    /// direction paired with `p^{d_i}`.
    pub transform: Vec<Vec<u64>>,
    pub modulus: Modulus,
}

fn vmod(x: u64, m: &Modulus) -> u32 {
    if x == 0 {
        m.k
    } else {
        val_u64(x, m.p)
    }
}

/// `a / b` where `v(a) >= v(b)`, as a residue (top digits are lost).
fn quot(a: u64, b: u64, m: &Modulus) -> u64 {
    let vb = vmod(b, m);
    let d = pow_u64(m.p, vb);
    let ub = b / d;
    let inv = m.inv(ub).expect("unit part");
    m.mul(a / d, inv)
}

/// Reduces a tall list of rows (each of length `k`) to at most `k` rows
/// spanning the same `Z_p`-module modulo `p^W`, in echelon form.
pub fn hnf_rows(rows: &[Vec<u64>], k: usize, m: &Modulus) -> Vec<Vec<u64>> {
    let mut basis: Vec<Option<Vec<u64>>> = vec![None; k];
    for r in rows {
        let mut r: Vec<u64> = r.iter().map(|&x| x % m.m).collect();
        for j in 0..k {
            if r[j] == 0 {
                continue;
            }
            match &mut basis[j] {
                slot @ None => {
                    *slot = Some(r);
                    break;
                }
                Some(b) => {
                    if vmod(r[j], m) < vmod(b[j], m) {
                        std::mem::swap(b, &mut r);
                    }
                    let q = quot(r[j], b[j], m);
                    for t in 0..k {
                        r[t] = m.sub(r[t], m.mul(q, b[t]));
                    }
                }
            }
        }
    }
    basis.into_iter().flatten().collect()
}

/// Smith normal form of a `rows x k` matrix modulo `p^W`.
pub fn smith(a: &[Vec<u64>], k: usize, m: &Modulus) -> Smith {
    let mut a: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&x| x % m.m).collect()).collect();
    let rows = a.len();
    let mut c: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| u64::from(i == j)).collect()).collect();
    let mut exps = Vec::with_capacity(k);
    for t in 0..k {
        let mut best: Option<(u32, usize, usize)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                if x != 0 {
                    let v = vmod(x, m);
                    if best.map_or(true, |b| v < b.0) {
                        best = Some((v, i, j));
                    }
                }
            }
        }
        let Some((v, i, j)) = best else {
            exps.extend(std::iter::repeat(m.k).take(k - t));
            break;
        };
        a.swap(t, i);
        for row in a.iter_mut() {
            row.swap(t, j);
        }
        for row in c.iter_mut() {
            row.swap(t, j);
        }
        let piv = a[t][t];
        for r in 0..rows {
            if r != t && a[r][t] != 0 {
                let q = quot(a[r][t], piv, m);
                for s in 0..k {
                    let x = m.mul(q, a[t][s]);
                    a[r][s] = m.sub(a[r][s], x);
                }
            }
        }
        for s in t + 1..k {
            if a[t][s] != 0 {
                let q = quot(a[t][s], piv, m);
                for r in 0..rows {
                    let x = m.mul(q, a[r][t]);
                    a[r][s] = m.sub(a[r][s], x);
                }
                for row in c.iter_mut() {
                    let x = m.mul(q, row[t]);
                    row[s] = m.sub(row[s], x);
                }
            }
        }
        exps.push(v);
    }
    while exps.len() < k {
        exps.push(m.k);
    }
    Smith { exps, transform: c, modulus: *m }
}

pub type QMat = Vec<Vec<Qp>>;

fn argmin_val(cands: impl Iterator<Item = (usize, Qp)>) -> Option<usize> {
    let mut best: Option<(i32, usize)> = None;
    for (i, q) in cands {
        if let Some(v) = q.valuation() {
            if best.map_or(true, |b| v < b.0) {
                best = Some((v, i));
            }
        }
    }
    best.map(|b| b.1)
}

/// Solves `sum_j x_j cols[j] = rhs` in the p-adic least-residual sense.
/// Returns the solution and the valuation of what is left unexplained
/// (capped by the precision of the data).
pub fn solve_columns(cols: &[Vec<Qp>], rhs: &[Qp]) -> Result<(Vec<Qp>, i32)> {
    let n = cols.len();
    let m = rhs.len();
    let mut a: QMat = (0..m).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let mut b = rhs.to_vec();
    let mut used = vec![false; m];
    let mut piv_row = vec![0usize; n];
    for j in 0..n {
        let Some(i) = argmin_val((0..m).filter(|&i| !used[i]).map(|i| (i, a[i][j]))) else {
            return Err(Error::DivisionByZero);
        };
        used[i] = true;
        piv_row[j] = i;
        let piv = a[i][j];
        for r in 0..m {
            if r == i || a[r][j].is_zero() {
                continue;
            }
            let f = a[r][j].div(&piv)?;
            for s in 0..n {
                let x = f.mul(&a[i][s]);
                a[r][s] = a[r][s].sub(&x);
            }
            b[r] = b[r].sub(&f.mul(&b[i]));
        }
    }
    let x: Vec<Qp> = (0..n).map(|j| b[piv_row[j]].div(&a[piv_row[j]][j])).collect::<Result<_>>()?;
    let resid = (0..m)
        .filter(|&i| !used[i])
        .map(|i| b[i].val_or_abs())
        .min()
        .unwrap_or(Qp::EXACT);
    Ok((x, resid))
}

/// Rank of a matrix, treating entries of valuation `>= zero_at` as zero.
pub fn rank(rows: &[Vec<Qp>], zero_at: i32) -> usize {
    let mut a: QMat = rows.to_vec();
    let ncols = a.first().map_or(0, |r| r.len());
    let mut r = 0;
    for j in 0..ncols {
        let cand = (r..a.len()).map(|i| (i, a[i][j])).filter(|(_, q)| q.valuation().map_or(false, |v| v < zero_at));
        let Some(i) = argmin_val(cand) else { continue };
        a.swap(r, i);
        let piv = a[r][j];
        for t in 0..a.len() {
            if t != r && !a[t][j].is_zero() {
                let f = a[t][j].div(&piv).expect("nonzero pivot");
                for s in 0..ncols {
                    let x = f.mul(&a[r][s]);
                    a[t][s] = a[t][s].sub(&x);
                }
            }
        }
        r += 1;
    }
    r
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let p = a[0][0].p();
    (0..a.len())
        .map(|i| {
            (0..b[0].len())
                .map(|j| {
                    (0..b.len()).fold(Qp::zero(p, Qp::EXACT), |acc, k| acc.add(&a[i][k].mul(&b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMat, v: &[Qp]) -> Vec<Qp> {
    let p = v[0].p();
    a.iter()
        .map(|row| row.iter().zip(v).fold(Qp::zero(p, Qp::EXACT), |acc, (x, y)| acc.add(&x.mul(y))))
        .collect()
}

pub fn det(a: &QMat) -> Result<Qp> {
    let n = a.len();
    let p = a[0][0].p();
    let mut a = a.clone();
    let mut d = Qp::one(p, Qp::EXACT);
    for j in 0..n {
        let Some(i) = argmin_val((j..n).map(|i| (i, a[i][j]))) else {
            return Ok(Qp::zero(p, a.iter().flatten().map(|q| q.abs_prec()).min().unwrap_or(0)));
        };
        if i != j {
            a.swap(i, j);
            d = d.neg();
        }
        let piv = a[j][j];
        d = d.mul(&piv);
        for r in j + 1..n {
            if a[r][j].is_zero() {
                continue;
            }
            let f = a[r][j].div(&piv)?;
            for s in j..n {
                let x = f.mul(&a[j][s]);
                a[r][s] = a[r][s].sub(&x);
            }
        }
    }
    Ok(d)
}

pub fn trace(a: &QMat) -> Qp {
    let p = a[0][0].p();
    (0..a.len()).fold(Qp::zero(p, Qp::EXACT), |acc, i| acc.add(&a[i][i]))
}

/// Coefficients `[c_0, ..., c_{n-1}, 1]` of `det(x I - A)`, by Faddeev-LeVerrier.
pub fn charpoly(a: &QMat) -> Result<Vec<Qp>> {
    let n = a.len();
    let p = a[0][0].p();
    let one = Qp::one(p, Qp::EXACT);
    let zero = Qp::zero(p, Qp::EXACT);
    let ident: QMat = (0..n).map(|i| (0..n).map(|j| if i == j { one } else { zero }).collect()).collect();
    let mut coeffs = vec![zero; n + 1];
    coeffs[n] = one;
    let mut mk = ident.clone();
    let mut c = one;
    for k in 1..=n {
        if k > 1 {
            let am = mat_mul(a, &mk);
            mk = (0..n).map(|i| (0..n).map(|j| am[i][j].add(&ident[i][j].mul(&c))).collect()).collect();
        }
        let am = mat_mul(a, &mk);
        c = trace(&am).neg().div(&Qp::from_int(p, k as i128, Qp::EXACT))?;
        coeffs[n - k] = c;
    }
    Ok(coeffs)
}

pub fn inverse(a: &QMat) -> Result<QMat> {
    let n = a.len();
    let p = a[0][0].p();
    let one = Qp::one(p, Qp::EXACT);
    let zero = Qp::zero(p, Qp::EXACT);
    let mut m: QMat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut r = r.clone();
            r.extend((0..n).map(|j| if i == j { one } else { zero }));
            r
        })
        .collect();
    for j in 0..n {
        let Some(i) = argmin_val((j..n).map(|i| (i, m[i][j]))) else {
            return Err(Error::DivisionByZero);
        };
        m.swap(i, j);
        let inv = m[j][j].inv()?;
        for s in 0..2 * n {
            m[j][s] = m[j][s].mul(&inv);
        }
        for r in 0..n {
            if r != j && !m[r][j].is_zero() {
                let f = m[r][j];
                for s in 0..2 * n {
                    let x = f.mul(&m[j][s]);
                    m[r][s] = m[r][s].sub(&x);
                }
            }
        }
    }
    Ok(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(x: i128) -> Qp {
        Qp::from_int(5, x, 12)
    }

    #[test]
    fn smith_of_diagonalish() {
        let m = Modulus::new(5, 10);
        let a = vec![vec![25, 5], vec![0, 125]];
        let s = smith(&a, 2, &m);
        let mut e = s.exps.clone();
        e.sort();
        assert_eq!(e, vec![1, 4]);
    }

    #[test]
    fn hnf_keeps_span() {
        let m = Modulus::new(5, 8);
        let rows = vec![vec![5, 10], vec![1, 7], vec![3, 21]];
        let b = hnf_rows(&rows, 2, &m);
        let s = smith(&b, 2, &m);
        let mut e = s.exps.clone();
        e.sort();
        // rows (1,7) and (5,10): determinant 10 - 35 = -25
        assert_eq!(e, vec![0, 2]);
    }

    #[test]
    fn overdetermined_solve() {
        let cols = vec![vec![q(1), q(0), q(1)], vec![q(0), q(5), q(5)]];
        let rhs = vec![q(2), q(15), q(17)];
        let (x, r) = solve_columns(&cols, &rhs).unwrap();
        assert!(x[0].eq_at_prec(&q(2)) && x[1].eq_at_prec(&q(3)));
        assert!(r >= 11);
        let bad = vec![q(2), q(15), q(18)];
        let (_, r) = solve_columns(&cols, &bad).unwrap();
        assert_eq!(r, 0);
    }

    #[test]
    fn determinant_and_charpoly() {
        let a = vec![vec![q(0), q(-5)], vec![q(1), q(-3)]];
        assert!(det(&a).unwrap().eq_at_prec(&q(5)));
        let cp = charpoly(&a).unwrap();
        assert!(cp[0].eq_at_prec(&q(5)) && cp[1].eq_at_prec(&q(3)));
        let inv = inverse(&a).unwrap();
        let id = mat_mul(&a, &inv);
        assert!(id[0][0].eq_at_prec(&q(1)) && id[0][1].is_zero());
        assert_eq!(rank(&a, 12), 2);
        assert_eq!(rank(&[vec![q(1), q(2)], vec![q(2), q(4)]], 12), 1);
    }
}

//! The integrality lattice `{c : sum_i c_i L_i is integral}`.
//!
//! Each monomial of the truncated series gives a linear condition on `c`,
//! and the pure-slice rows from [`super::slice`] add conditions at degrees
//! `r p^j` far beyond the truncation. After scaling by `p^S` the conditions
//! are integral, and the Smith form of the stacked rows modulo `p^W` gives
//! elementary exponents `e_i`: the lattice is spanned by `p^(e_i) C_i` for a
//! unimodular `C`. Directions with `e_i <= 0` are characters; the others are
//! pushed deeper by every extra slice row and are only integral to finite
//! degree.

use crate::formalgroup::{FormalGroupLaw, GroupKind};
use crate::ring::arith::{max_digits, pow_u64, Modulus};
use crate::ring::linalg::{hnf_rows, smith};
use crate::ring::{Qp, Series};
use crate::{Error, Result};

use super::slice::SliceLog;
use super::{check_level, jet_coordinates, projections_at, DeltaCharacter};

/// Spurious exponents below this are too close to the genuine ones to call.
const SEPARATION: i32 = 2;

#[derive(Clone, Debug)]
pub struct CharacterLattice {
    pub kind: GroupKind,
    pub order: usize,
    pub rank: usize,
    pub basis: Vec<DeltaCharacter>,
    /// `c`-vectors of `phi*` of the order `n - 1` basis.
    pub shift_relations: Vec<Vec<Qp>>,
    /// Elementary exponents, genuine directions first.
    pub exponents: Vec<i32>,
}

pub(crate) struct RawLattice {
    pub exponents: Vec<i32>,
    pub vectors: Vec<Vec<Qp>>,
    pub precision: i32,
}

impl RawLattice {
    pub fn rank(&self) -> usize {
        self.vectors.len()
    }
}

fn hard_zero(kind: GroupKind, n: usize) -> bool {
    n == 0 && kind != GroupKind::Additive
}

/// Slice depth `K`: at most `N + 2`, within the closed-form budget and the
/// word-sized digits left after `A` digits of series precision.
fn slice_depth(f: &FormalGroupLaw, sl: &SliceLog, a: i32) -> i32 {
    let p = f.ctx.p;
    let md = max_digits(p) as i32;
    let mut k = 0;
    while k < f.ctx.n as i32 + 2 && k < md - a {
        match p.checked_pow(k as u32 + 1) {
            Some(m) if m <= sl.max_index() => k += 1,
            _ => break,
        }
    }
    k
}

pub(crate) fn raw_lattice(f: &FormalGroupLaw, ls: &[Series]) -> Result<RawLattice> {
    let n = ls.len() - 1;
    let p = f.ctx.p;
    if hard_zero(f.kind, n) {
        return Ok(RawLattice { exponents: vec![], vectors: vec![], precision: f.ctx.n as i32 });
    }
    let md = max_digits(p) as i32;
    let a = ls.iter().map(|l| l.abs_prec()).min().unwrap_or(0);
    let s_mono = ls.iter().filter_map(|l| l.min_valuation()).map(|v| -v).max().unwrap_or(0).max(0);
    let mut slice = SliceLog::new(f, Modulus::new(p, 1));
    let k = slice.as_ref().map_or(0, |sl| slice_depth(f, sl, a));
    if slice.is_some() && k < 1 {
        return Err(Error::PrecisionExhausted(format!("no digits left for slice rows at p = {p}")));
    }
    let s = s_mono.max(k);
    let w = s + a;
    if w > md || a < 1 {
        return Err(Error::PrecisionExhausted(format!("lattice needs {w} digits, have {md}")));
    }
    let m = Modulus::new(p, w as u32);
    if let Some(sl) = slice.as_mut() {
        *sl = SliceLog::new(f, m).expect("same group");
    }

    let mut rows: Vec<Vec<u64>> = Vec::new();
    let sp = ls[0].space().clone();
    for idx in 1..sp.len() {
        let row: Vec<u64> = ls.iter().map(|l| l.coeff_at(idx).scaled_residue(s, w as u32)).collect::<Result<_>>()?;
        if row.iter().any(|&x| x != 0) {
            rows.push(row);
        }
    }
    if let Some(sl) = slice.as_mut() {
        for j in 1..=k as u32 {
            for r in 1..p {
                let mm = r * pow_u64(p, j);
                if mm > sl.max_index() {
                    break;
                }
                let row = (0..=n as u32)
                    .map(|i| if i <= j { sl.scaled(mm / pow_u64(p, i), s as u32) } else { 0 })
                    .collect();
                rows.push(row);
            }
        }
    }

    let h = hnf_rows(&rows, n + 1, &m);
    let sm = smith(&h, n + 1, &m);
    let mut exps: Vec<(i32, usize)> = sm.exps.iter().enumerate().map(|(i, &d)| (s - d as i32, i)).collect();
    exps.sort();
    let spurious: Vec<i32> = exps.iter().map(|e| e.0).filter(|&e| e > 0).collect();
    if let Some(&e) = spurious.iter().find(|&&e| e < SEPARATION) {
        return Err(Error::AmbiguousRank(format!(
            "order {n}: a direction is integral up to p^{e}; raise N"
        )));
    }
    let vectors: Vec<Vec<Qp>> = exps
        .iter()
        .filter(|e| e.0 <= 0)
        .map(|&(e, i)| (0..=n).map(|j| Qp::from_scaled(p, sm.transform[j][i], e, w + e)).collect())
        .collect();
    let precision = spurious.iter().copied().fold(a, i32::min);
    Ok(RawLattice { exponents: exps.iter().map(|e| e.0).collect(), vectors: hermite_reversed(vectors), precision })
}

/// Canonical basis: echelon from the last coordinate down, each pivot made
/// exactly `p^v`, and entries above a pivot reduced to their digits below
/// `p^v`.
pub(crate) fn hermite_reversed(mut vs: Vec<Vec<Qp>>) -> Vec<Vec<Qp>> {
    let Some(len) = vs.first().map(|v| v.len()) else {
        return vs;
    };
    let mut out: Vec<Vec<Qp>> = Vec::new();
    for coord in (0..len).rev() {
        let best = vs
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v[coord].valuation().map(|x| (x, i)))
            .min()
            .map(|(_, i)| i);
        let Some(bi) = best else { continue };
        let mut piv = vs.remove(bi);
        let v = piv[coord].valuation().expect("nonzero pivot");
        let u = piv[coord].shift(-v).inv().expect("unit");
        piv = piv.iter().map(|x| x.mul(&u)).collect();
        piv[coord] = Qp::one(piv[coord].p(), Qp::EXACT).shift(v);
        for r in vs.iter_mut() {
            if r[coord].is_zero() {
                continue;
            }
            let q = r[coord].shift(-v);
            let new: Vec<Qp> = r.iter().zip(&piv).map(|(x, y)| x.sub(&q.mul(y))).collect();
            *r = new;
            r[coord] = Qp::zero(r[coord].p(), Qp::EXACT);
        }
        for o in out.iter_mut() {
            let t = high_part(&o[coord], v);
            if !t.is_zero() {
                let new: Vec<Qp> = o.iter().zip(&piv).map(|(x, y)| x.sub(&t.mul(y))).collect();
                *o = new;
            }
        }
        out.push(piv);
    }
    out
}

/// `(x - (x mod p^v)) / p^v`, with `x mod p^v` the representative whose
/// digits sit strictly below `p^v`.
fn high_part(x: &Qp, v: i32) -> Qp {
    let p = x.p();
    match x.valuation() {
        Some(val) if val < v => {
            let k = (v - val) as u32;
            let u = x.unit();
            let low = u.residue() % pow_u64(p, k);
            let low = Qp::from_int_scaled(p, low as i128, val, Qp::EXACT);
            x.sub(&low).shift(-v)
        }
        Some(_) => x.shift(-v),
        None => Qp::zero(p, x.abs_prec() - v),
    }
}

/// `X_n` of the group: a basis of integral characters of order `n`,
/// normalized, with the rank checked at `(N - 1, M)` and `(N, M - 2)`.
pub fn solve_character_lattice(f: &FormalGroupLaw, n: usize) -> Result<CharacterLattice> {
    check_level(f, n)?;
    if hard_zero(f.kind, n) {
        return Ok(CharacterLattice {
            kind: f.kind,
            order: 0,
            rank: 0,
            basis: vec![],
            shift_relations: vec![],
            exponents: vec![],
        });
    }
    let ls = projections_at(f, n, f.ctx.m)?;
    let raw = raw_lattice(f, &ls)?;
    let ctx = f.ctx;
    for other in [ctx.with_prec(ctx.n - 1)?, ctx.with_deg(ctx.m - 2)?] {
        let g = f.rebuild(&other)?;
        let r = raw_lattice(&g, &projections_at(&g, n, other.m)?)?;
        if r.rank() != raw.rank() {
            return Err(Error::AmbiguousRank(format!(
                "order {n}: rank {} at (N, M) = ({}, {}) but {} at ({}, {})",
                raw.rank(),
                ctx.n,
                ctx.m,
                r.rank(),
                other.n,
                other.m
            )));
        }
    }
    let shift_relations = if n == 0 {
        vec![]
    } else {
        let sp = jet_coordinates(n - 1, f.ctx.m);
        let map: Vec<Option<usize>> = (0..=n).map(|i| (i < n).then_some(i)).collect();
        let lower: Vec<Series> = ls[..n].iter().map(|l| l.remap(&sp, &map)).collect();
        raw_lattice(f, &lower)?
            .vectors
            .into_iter()
            .map(|v| {
                let mut c = vec![Qp::zero(f.ctx.p, Qp::EXACT)];
                c.extend(v);
                c
            })
            .collect()
    };
    let basis = raw
        .vectors
        .iter()
        .map(|c| DeltaCharacter::from_projections(&ls, c.clone(), raw.precision))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharacterLattice {
        kind: f.kind,
        order: n,
        rank: basis.len(),
        basis,
        shift_relations,
        exponents: raw.exponents,
    })
}

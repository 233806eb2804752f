//! Splitting numbers, the filtration `F_i` and the matrix of `f*` on
//! `H_delta`.
//!
//! Classes in `H_n` are kernel series on `N^n` modulo `i*phi*X_(n-1)`, and a
//! class of lower level is seen in `H_n` through the projection
//! `N^n -> N^k`, i.e. as the same series in more variables. Every dimension
//! and matrix entry below comes from a rank or a least-residual solve on
//! those coefficient vectors.

use crate::check::Check;
use crate::formalgroup::{FormalGroupLaw, GroupKind};
use crate::jet::CHECK_DEG;
use crate::ring::linalg::{self, solve_columns, QMat};
use crate::ring::Qp;
use crate::{Error, Result};

use super::lattice::{solve_character_lattice, CharacterLattice};
use super::{
    coefficient_rows, differential_gamma, f_star, fundamental_character, iota_of_coeffs, iota_star, lift_to,
    DeltaCharacter, KernelCharacter,
};

/// Highest character order computed.
const TOP: usize = 2;

#[derive(Clone, Debug)]
pub struct SplittingData {
    /// `rk X_0, rk X_1, rk X_2`.
    pub ranks: Vec<usize>,
    /// `rk I_n = n - (rk X_n - rk X_0)`.
    pub kernel_ranks: Vec<usize>,
    pub m_u: usize,
    pub r_delta: usize,
    pub prim_order: usize,
    pub prim_rank: usize,
    pub filtration_dims: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IsocrystalData {
    pub hdelta_rank: usize,
    pub basis: Vec<KernelCharacter>,
    pub frobenius_matrix: QMat,
    pub hodge_rank: usize,
    pub filtration_dims: Vec<usize>,
    pub m_u: usize,
    pub ranks_xn: (usize, usize),
    pub is_cl: bool,
    pub gamma_values: Vec<Qp>,
    pub primitive: DeltaCharacter,
    pub checks: Vec<Check>,
}

fn require_nonadditive(f: &FormalGroupLaw) -> Result<()> {
    if f.kind == GroupKind::Additive {
        return Err(Error::InvalidContext("the additive group has characters of order 0 and no delta isocrystal".into()));
    }
    Ok(())
}

/// `X_0, X_1, X_2`.
pub fn character_lattices(f: &FormalGroupLaw) -> Result<Vec<CharacterLattice>> {
    (0..=TOP).map(|n| solve_character_lattice(f, n)).collect()
}

/// The generator of `X_prim`: the basis of the lowest order with nonzero
/// rank. The primitive rank is `rk X_2 - rk X_1`.
pub fn primitive_quotient(lattices: &[CharacterLattice]) -> Result<CharacterLattice> {
    let top = lattices.len() - 1;
    let prim_rank = lattices[top].rank - if top > 0 { lattices[top - 1].rank } else { 0 };
    let kind = lattices[0].kind;
    let first = lattices.iter().find(|l| l.rank > 0);
    if kind == GroupKind::Elliptic && (prim_rank != 1 || first.map_or(true, |l| l.rank != 1)) {
        return Err(Error::RankMismatch(format!(
            "primitive rank {prim_rank} from ranks {:?}",
            lattices.iter().map(|l| l.rank).collect::<Vec<_>>()
        )));
    }
    let Some(first) = first else {
        return Err(Error::RankMismatch("no characters up to order 2".into()));
    };
    Ok(CharacterLattice { rank: prim_rank, shift_relations: vec![], ..first.clone() })
}

/// `rk I_n`, `m_u` and `r_delta` from the ranks of `X_0..X_2`.
fn splitting_from_ranks(ranks: &[usize], prim_rank: usize) -> (Vec<usize>, usize, usize) {
    let ik: Vec<usize> = ranks.iter().enumerate().map(|(n, &r)| (n + ranks[0]).saturating_sub(r)).collect();
    let h: Vec<i64> = (1..ik.len()).map(|n| ik[n] as i64 - ik[n - 1] as i64).collect();
    // least m >= 1 with h_n = 0 for all n >= m; h[k] is h_(k+1)
    let mut m_u = h.len() + 1;
    while m_u > 1 && h[m_u - 2] == 0 {
        m_u -= 1;
    }
    let r_delta = prim_rank + ik[m_u - 1];
    (ik, m_u, r_delta)
}

/// `c`-vectors spanning `X_t`, past the computed orders by
/// `X_(t+1) = X_t + phi*X_t` over `K`.
fn span_coeffs(lattices: &[CharacterLattice], t: usize, p: u64) -> Vec<Vec<Qp>> {
    let z = Qp::zero(p, Qp::EXACT);
    if t < lattices.len() {
        return lattices[t].basis.iter().map(|b| b.c.clone()).collect();
    }
    let lower = span_coeffs(lattices, t - 1, p);
    let mut out = Vec::new();
    for c in &lower {
        let mut a = c.clone();
        a.push(z);
        out.push(a);
        let mut b = vec![z];
        b.extend(c.iter().copied());
        out.push(b);
    }
    out
}

/// `i*phi*X_(k-1)` as kernel series on `N^k`.
fn relations(f: &FormalGroupLaw, lattices: &[CharacterLattice], k: usize, deg: usize) -> Result<Vec<KernelCharacter>> {
    if k == 0 {
        return Ok(vec![]);
    }
    let p = f.ctx.p;
    span_coeffs(lattices, k - 1, p)
        .into_iter()
        .map(|c| {
            let mut s = vec![Qp::zero(p, Qp::EXACT)];
            s.extend(c);
            Ok(lift_to(&iota_of_coeffs(f, &s, deg)?, k))
        })
        .collect()
}

fn quotient_dim(gens: &[KernelCharacter], rels: &[KernelCharacter], zero_at: i32) -> usize {
    let all: Vec<&crate::ring::Series> = gens.iter().chain(rels).map(|k| &k.series).collect();
    let only: Vec<&crate::ring::Series> = rels.iter().map(|k| &k.series).collect();
    let with = linalg::rank(&coefficient_rows(&all), zero_at);
    let without = if only.is_empty() { 0 } else { linalg::rank(&coefficient_rows(&only), zero_at) };
    with - without
}

/// Dimensions of `F_0 = X_prim` and `F_(i+1) = X_prim + f* F_i`, for
/// `i = 0..m_u`, as ranks in `H_(k0 + i)`.
fn filtration_dims(
    f: &FormalGroupLaw,
    lattices: &[CharacterLattice],
    theta: &DeltaCharacter,
    m_u: usize,
    deg: usize,
) -> Result<Vec<usize>> {
    let k0 = theta.order.max(1);
    let zero_at = f.ctx.n as i32 - 3;
    let mut chain = vec![iota_star(f, theta, deg)?];
    let mut dims = Vec::new();
    for i in 0..=m_u {
        if i > 0 {
            let next = f_star(f, &chain[i - 1])?;
            chain.push(next);
        }
        let level = k0 + i;
        let gens: Vec<KernelCharacter> = chain.iter().map(|g| lift_to(g, level)).collect();
        let rels = relations(f, lattices, level, deg)?;
        dims.push(quotient_dim(&gens, &rels, zero_at));
    }
    Ok(dims)
}

pub fn splitting_numbers_and_rank(f: &FormalGroupLaw) -> Result<SplittingData> {
    require_nonadditive(f)?;
    let lattices = character_lattices(f)?;
    splitting_with(f, &lattices)
}

fn splitting_with(f: &FormalGroupLaw, lattices: &[CharacterLattice]) -> Result<SplittingData> {
    let prim = primitive_quotient(lattices)?;
    let ranks: Vec<usize> = lattices.iter().map(|l| l.rank).collect();
    let (kernel_ranks, m_u, r_delta) = splitting_from_ranks(&ranks, prim.rank);
    let deg = f.ctx.m.min(CHECK_DEG);
    let dims = filtration_dims(f, lattices, &prim.basis[0], m_u, deg)?;
    Ok(SplittingData {
        ranks,
        kernel_ranks,
        m_u,
        r_delta,
        prim_order: prim.order,
        prim_rank: prim.rank,
        filtration_dims: dims,
    })
}

/// CL iff `rk X_1 = 1`.
pub fn classify_cl(f: &FormalGroupLaw) -> Result<bool> {
    Ok(solve_character_lattice(f, 1)?.rank == 1)
}

/// Expresses `target` in `cols` and returns the coefficients of the first
/// `keep` columns with the residual.
fn express(target: &KernelCharacter, cols: &[KernelCharacter], keep: usize) -> Result<(Vec<Qp>, i32)> {
    let rows: Vec<&crate::ring::Series> = cols.iter().map(|c| &c.series).collect();
    let cvecs = coefficient_rows(&rows);
    let rhs = coefficient_rows(&[&target.series]).remove(0);
    let (x, r) = solve_columns(&cvecs, &rhs)?;
    Ok((x[..keep].to_vec(), r))
}

/// Krylov dimensions of `e_1` under `m`, for `steps + 1` steps.
fn krylov_dims(m: &QMat, steps: usize, zero_at: i32) -> Vec<usize> {
    let d = m.len();
    let p = m[0][0].p();
    let mut v: Vec<Qp> = (0..d).map(|i| Qp::from_int(p, (i == 0) as i128, Qp::EXACT)).collect();
    let mut vs = vec![v.clone()];
    let mut dims = vec![linalg::rank(&vs, zero_at)];
    for _ in 0..steps {
        v = linalg::mat_vec(m, &v);
        vs.push(v.clone());
        dims.push(linalg::rank(&vs, zero_at));
    }
    dims
}

pub fn isocrystal_data(f: &FormalGroupLaw) -> Result<IsocrystalData> {
    require_nonadditive(f)?;
    let lattices = character_lattices(f)?;
    let split = splitting_with(f, &lattices)?;
    let prim = primitive_quotient(&lattices)?;
    let theta = prim.basis[0].clone();
    let ctx = f.ctx;
    let need = ctx.n as i32 - 3;
    let deg = ctx.m;
    let zero_at = ctx.n as i32 - 3;
    let is_cl = split.ranks[1] == 1;
    let (_, gamma) = differential_gamma(&theta);

    let b1 = iota_star(f, &theta, deg)?;
    let psi = fundamental_character(f)?;
    let basis: Vec<KernelCharacter> = if is_cl {
        vec![b1.clone()]
    } else {
        let mut b2 = psi.clone();
        b2.series = b2.series.scale(&gamma);
        vec![b1.clone(), b2]
    };

    let r = basis.len();
    let mut mat: QMat = vec![vec![Qp::zero(ctx.p, Qp::EXACT); r]; r];
    let mut solve_resid = i32::MAX;
    for (j, b) in basis.iter().enumerate() {
        let img = f_star(f, b)?;
        let level = img.level();
        let mut cols: Vec<KernelCharacter> = basis.iter().map(|x| lift_to(x, level)).collect();
        cols.extend(relations(f, &lattices, level, deg)?);
        let (x, res) = express(&img, &cols, r)?;
        solve_resid = solve_resid.min(res);
        for i in 0..r {
            mat[i][j] = x[i];
        }
    }

    let mut checks = vec![Check::new("f* matrix solve", solve_resid, need)];
    // Frob-up: f* i*Theta = gamma Psi_1 modulo i*phi*-pullbacks
    {
        let img = f_star(f, &b1)?;
        let level = img.level();
        let mut cols = vec![lift_to(&psi, level)];
        cols.extend(relations(f, &lattices, level, deg)?);
        let (x, res) = express(&img, &cols, 1)?;
        let ok = x[0].sub(&gamma).val_or_abs();
        checks.push(Check::new("f* i*Theta = gamma Psi_1 mod pullbacks", res.min(ok), need));
    }
    // order 1: f* i*Theta lies in span(i*Theta) + pullbacks exactly when X_1 is nonzero
    {
        let img = f_star(f, &b1)?;
        let level = img.level();
        let mut cols = vec![lift_to(&b1, level)];
        cols.extend(relations(f, &lattices, level, deg)?);
        let (_, res) = express(&img, &cols, 1)?;
        checks.push(Check::boolean("order-1 span identity", (res >= need) == (split.ranks[1] > 0)));
    }

    let r_delta = split.r_delta;
    let fd = &split.filtration_dims;
    checks.push(Check::boolean("1 <= r_delta <= 2", (1..=2).contains(&r_delta)));
    checks.push(Check::boolean("basis size = r_delta", r == r_delta));
    checks.push(Check::boolean(
        "dim F_(m_u-1) = dim F_(m_u) = r_delta",
        fd.len() == split.m_u + 1 && fd[split.m_u - 1] == r_delta && fd[split.m_u] == r_delta,
    ));
    checks.push(Check::boolean("filtration = Krylov dims of f*", krylov_dims(&mat, split.m_u, zero_at) == *fd));
    let det = linalg::det(&mat)?;
    checks.push(Check::boolean("f* invertible", det.valuation().map_or(false, |v| v <= 2)));

    Ok(IsocrystalData {
        hdelta_rank: r_delta,
        basis,
        frobenius_matrix: mat,
        hodge_rank: split.prim_rank,
        filtration_dims: split.filtration_dims.clone(),
        m_u: split.m_u,
        ranks_xn: (split.ranks[1], split.ranks[2]),
        is_cl,
        gamma_values: vec![gamma],
        primitive: theta,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_numbers_from_ranks() {
        // non-CL elliptic: X = (0, 0, 1)
        assert_eq!(splitting_from_ranks(&[0, 0, 1], 1), (vec![0, 1, 1], 2, 2));
        // CL elliptic and the torus: X = (0, 1, 2)
        assert_eq!(splitting_from_ranks(&[0, 1, 2], 1), (vec![0, 0, 0], 1, 1));
    }
}

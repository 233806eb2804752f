//! Delta characters of a one-dimensional formal group and the delta
//! isocrystal they generate.
//!
//! Characters of `J^n` are sought as `Theta = sum_i c_i L_i` with
//! `L_i = l(w_i(x_0, ..., x_i))`: each `L_i` is additive over `Q_p`, and the
//! integral combinations are the characters. On the kernels `N^n` the
//! restrictions `i*Theta` and the fundamental character
//! `Psi_1(x) = l(p x) / p` span the classes that make up `H_delta`.

mod brute;
mod isocrystal;
mod lattice;
mod slice;

use std::sync::Arc;

use crate::check::Check;
use crate::formalgroup::FormalGroupLaw;
use crate::jet::{self, CHECK_DEG};
use crate::ring::{Qp, Series, Space};
use crate::witt::{ghost_component, MAX_LEVEL};
use crate::{Error, Result};

pub use brute::{brute_force_characters, BruteForceReport};
pub use isocrystal::{
    classify_cl, isocrystal_data, primitive_quotient, splitting_numbers_and_rank, IsocrystalData, SplittingData,
};
pub use lattice::{solve_character_lattice, CharacterLattice};

/// `Theta = sum_i c_i L_i` on `J^n`, in coordinates `x_0..x_n`.
#[derive(Clone, Debug)]
pub struct DeltaCharacter {
    pub c: Vec<Qp>,
    pub order: usize,
    pub series: Series,
    /// Digits to which the character is certified.
    pub precision: i32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelOrigin {
    Restriction,
    Fundamental,
    LateralImage,
}

/// A character of `N^k`, as a series in `x_1..x_k`.
#[derive(Clone, Debug)]
pub struct KernelCharacter {
    pub series: Series,
    pub origin: KernelOrigin,
}

impl KernelCharacter {
    pub fn level(&self) -> usize {
        self.series.space().nvars()
    }
}

pub fn jet_coordinates(n: usize, deg: usize) -> Arc<Space> {
    let names: Vec<String> = (0..=n).map(|i| format!("x{i}")).collect();
    let r: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Space::new(&r, deg)
}

pub fn kernel_coordinates(k: usize, deg: usize) -> Arc<Space> {
    let names: Vec<String> = (1..=k).map(|i| format!("x{i}")).collect();
    let r: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Space::new(&r, deg)
}

fn check_level(f: &FormalGroupLaw, n: usize) -> Result<()> {
    if n > MAX_LEVEL {
        return Err(Error::InvalidContext(format!("character order {n} exceeds {MAX_LEVEL}")));
    }
    let need = f.ctx.p.pow(n as u32) as usize + f.ctx.p as usize;
    if n > 0 && f.kind == crate::formalgroup::GroupKind::Elliptic && f.ctx.m < need {
        return Err(Error::PrecisionExhausted(format!(
            "order {n} needs truncation degree at least {need}, have {}",
            f.ctx.m
        )));
    }
    Ok(())
}

/// `[L_0, ..., L_n]` at the group's truncation degree.
pub fn log_projections(f: &FormalGroupLaw, n: usize) -> Result<Vec<Series>> {
    check_level(f, n)?;
    projections_at(f, n, f.ctx.m)
}

fn projections_at(f: &FormalGroupLaw, n: usize, deg: usize) -> Result<Vec<Series>> {
    let sp = jet_coordinates(n, deg);
    let (p, cap) = (f.ctx.p, f.ctx.work_prec());
    let xs: Vec<Series> = (0..=n).map(|i| Series::var(&sp, i, p, cap)).collect();
    (0..=n).map(|i| f.log_of(&ghost_component(p, &xs, i))).collect()
}

/// `i*L_i = l(w_i(0, x_1, ..., x_i))` as a series on `N^k`, `i <= k`.
pub fn restricted_projection(f: &FormalGroupLaw, i: usize, k: usize, deg: usize) -> Result<Series> {
    let sp = kernel_coordinates(k, deg);
    let (p, cap) = (f.ctx.p, f.ctx.work_prec());
    if i == 0 {
        return Ok(Series::zero(&sp, p, cap));
    }
    if i > k {
        return Err(Error::LengthTooShort);
    }
    let mut xs = vec![Series::zero(&sp, p, cap)];
    xs.extend((0..i).map(|j| Series::var(&sp, j, p, cap)));
    f.log_of(&ghost_component(p, &xs, i))
}

/// `Psi_1(x_1) = l(p x_1) / p`, integral for odd `p`.
pub fn fundamental_character(f: &FormalGroupLaw) -> Result<KernelCharacter> {
    fundamental_at(f, f.ctx.m)
}

fn fundamental_at(f: &FormalGroupLaw, deg: usize) -> Result<KernelCharacter> {
    let sp = kernel_coordinates(1, deg);
    let x = Series::var(&sp, 0, f.ctx.p, f.ctx.work_prec()).mul_p_pow(1);
    let series = f.log_of(&x)?.mul_p_pow(-1).integral()?;
    Ok(KernelCharacter { series, origin: KernelOrigin::Fundamental })
}

fn combine(c: &[Qp], ls: &[Series]) -> Series {
    let mut acc: Option<Series> = None;
    for (ci, l) in c.iter().zip(ls) {
        let t = l.scale(ci);
        acc = Some(match acc {
            None => t,
            Some(a) => a.add(&t),
        });
    }
    acc.expect("nonempty coefficient vector").normalize()
}

impl DeltaCharacter {
    /// Builds `sum_i c_i L_i`, requiring integrality.
    pub fn from_coeffs(f: &FormalGroupLaw, c: Vec<Qp>, precision: i32) -> Result<Self> {
        let order = c.len() - 1;
        let ls = projections_at(f, order, f.ctx.m)?;
        Self::from_projections(&ls, c, precision)
    }

    pub(crate) fn from_projections(ls: &[Series], c: Vec<Qp>, precision: i32) -> Result<Self> {
        let series = combine(&c, ls).integral()?;
        let precision = precision.min(series.abs_prec());
        Ok(DeltaCharacter { order: c.len() - 1, c, series, precision })
    }

    /// `c` of `phi*Theta`, one order higher.
    pub fn phi_star_coeffs(&self) -> Vec<Qp> {
        let p = self.c[0].p();
        let mut c = vec![Qp::zero(p, Qp::EXACT)];
        c.extend(self.c.iter().copied());
        c
    }
}

/// `DTheta = (A_0, ..., A_n)` and `gamma_Theta`.
///
/// The sign of `gamma` is fixed by `f*(i*Theta) = i*phi*Theta + gamma Psi_1`.
/// On `N^(n+1)` the left side is `sum_{i>=1} c_i i*L_(i+1)` and the right side
/// carries an extra `c_0 i*L_1 = c_0 p Psi_1`, so `gamma = -p A_0`.
pub fn differential_gamma(theta: &DeltaCharacter) -> (Vec<Qp>, Qp) {
    let sp = theta.series.space().clone();
    let a: Vec<Qp> = (0..=theta.order)
        .map(|i| {
            let mut e = [0u8; 8];
            e[i] = 1;
            theta.series.coeff(&e[..sp.nvars()])
        })
        .collect();
    let gamma = a[0].shift(1).neg();
    (a, gamma)
}

/// Coordinate of `Upsilon(Theta)` against `dx_0`: `gamma / p`.
pub fn upsilon(theta: &DeltaCharacter) -> Qp {
    differential_gamma(theta).1.shift(-1)
}

/// `i*Theta` on `N^n`, at degree `deg`.
pub fn iota_star(f: &FormalGroupLaw, theta: &DeltaCharacter, deg: usize) -> Result<KernelCharacter> {
    iota_of_coeffs(f, &theta.c, deg)
}

/// `i*phi*Theta` on `N^(n+1)`, at degree `deg`.
pub fn iota_phi_star(f: &FormalGroupLaw, theta: &DeltaCharacter, deg: usize) -> Result<KernelCharacter> {
    iota_of_coeffs(f, &theta.phi_star_coeffs(), deg)
}

fn iota_of_coeffs(f: &FormalGroupLaw, c: &[Qp], deg: usize) -> Result<KernelCharacter> {
    let n = (c.len() - 1).max(1);
    let ls: Vec<Series> = (0..c.len()).map(|i| restricted_projection(f, i, n, deg)).collect::<Result<_>>()?;
    Ok(KernelCharacter { series: combine(c, &ls), origin: KernelOrigin::Restriction })
}

/// `f*psi`: a character of `N^k` pulled back to `N^(k+1)` along the lateral
/// Frobenius.
pub fn f_star(f: &FormalGroupLaw, psi: &KernelCharacter) -> Result<KernelCharacter> {
    let k = psi.level();
    let deg = psi.series.space().deg();
    let sp = kernel_coordinates(k + 1, deg);
    let (p, cap) = (f.ctx.p, f.ctx.work_prec());
    let xs: Vec<Series> = (0..=k).map(|i| Series::var(&sp, i, p, cap)).collect();
    let fr = jet::lateral_frobenius(p, &xs)?;
    Ok(KernelCharacter { series: psi.series.compose(&fr)?, origin: KernelOrigin::LateralImage })
}

/// The same character on `N^k` for larger `k`.
pub fn lift_to(psi: &KernelCharacter, k: usize) -> KernelCharacter {
    let deg = psi.series.space().deg();
    let sp = kernel_coordinates(k, deg);
    let map: Vec<Option<usize>> = (0..psi.level()).map(Some).collect();
    KernelCharacter { series: psi.series.remap(&sp, &map), origin: psi.origin }
}

/// Checks `f*(i*Theta) = i*phi*Theta + gamma Psi_1` on `N^(n+1)` and, for
/// `n = 2`, `f*(i*phi*Theta) = i*(phi^2)*Theta` on `N^4`. Residuals must
/// reach `N - 3`.
pub fn verify_diff_relation(f: &FormalGroupLaw, theta: &DeltaCharacter) -> Result<Vec<Check>> {
    let need = f.ctx.n as i32 - 3;
    let n = theta.order;
    let deg = if n >= 2 { f.ctx.m.min(CHECK_DEG) } else { f.ctx.m };
    let mut out = Vec::new();

    let lhs = match n {
        0 => Series::zero(&kernel_coordinates(1, deg), f.ctx.p, f.ctx.work_prec()),
        _ => f_star(f, &iota_star(f, theta, deg)?)?.series,
    };
    let rhs = iota_phi_star(f, theta, deg)?;
    let (_, gamma) = differential_gamma(theta);
    let psi = lift_to(&fundamental_at(f, deg)?, n + 1);
    let rhs = rhs.series.add(&psi.series.scale(&gamma));
    out.push(Check::new("diff(1): f* i* = i* phi* + gamma Psi_1", lhs.residual(&rhs)?, need));

    if n == 2 {
        let d = deg.min(CHECK_DEG);
        let left = f_star(f, &iota_phi_star(f, theta, d)?)?;
        let mut c2 = vec![Qp::zero(f.ctx.p, Qp::EXACT)];
        c2.extend(theta.phi_star_coeffs());
        let right = iota_of_coeffs(f, &c2, d)?;
        out.push(Check::new("diff(2): f* i* phi* = i* phi^2*", left.series.residual(&right.series)?, need));
    }
    Ok(out)
}

/// `Theta(x +_J y) = Theta(x) + Theta(y)` on `J^n`, at degree at most 12.
pub fn verify_additivity(f: &FormalGroupLaw, theta: &DeltaCharacter) -> Result<Check> {
    let deg = f.ctx.m.min(CHECK_DEG);
    let n = theta.order;
    let j = jet::jet_law_of(&f.law.truncate(deg), f.ctx.p, n, deg)?;
    let th = theta.series.truncate(deg);
    let xs = j.xs();
    let ys = j.ys();
    let left = th.compose(&j.law)?;
    let right = th.compose(&xs)?.add(&th.compose(&ys)?);
    Ok(Check::new(format!("Theta additive on J{n}"), left.residual(&right)?, f.ctx.n as i32 - 2))
}

/// `Psi_1(x +_N y) = Psi_1(x) + Psi_1(y)` for the law of `N^1`.
pub fn verify_psi_additivity(f: &FormalGroupLaw) -> Result<Check> {
    let deg = f.ctx.m.min(CHECK_DEG);
    let psi = fundamental_at(f, deg)?;
    let law = jet::n1_law(f, deg)?;
    let sp = law.space().clone();
    let (p, cap) = (f.ctx.p, f.ctx.work_prec());
    let a = Series::var(&sp, 0, p, cap);
    let b = Series::var(&sp, 1, p, cap);
    let left = psi.series.compose(&[law])?;
    let right = psi.series.compose(&[a])?.add(&psi.series.compose(&[b])?);
    Ok(Check::new("Psi_1 additive on N1", left.residual(&right)?, f.ctx.n as i32 - 2))
}

/// Coefficient vectors of kernel series on a common space, one per series.
pub(crate) fn coefficient_rows(series: &[&Series]) -> Vec<Vec<Qp>> {
    series.iter().map(|s| (0..s.space().len()).map(|i| s.coeff_at(i)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formalgroup::WeierstrassCurve;
    use crate::ring::Context;

    fn gm(m: usize) -> FormalGroupLaw {
        FormalGroupLaw::multiplicative(&Context::new(5, 8, m).unwrap()).unwrap()
    }

    fn q(num: i128, den: i128) -> Qp {
        Qp::from_ratio(5, num, den, 30).unwrap()
    }

    #[test]
    fn additive_projections() {
        let f = FormalGroupLaw::additive(&Context::new(5, 8, 12).unwrap()).unwrap();
        let ls = log_projections(&f, 1).unwrap();
        // L_1 = x0^5 + 5 x1
        assert!(ls[1].coeff(&[5, 0]).eq_at_prec(&q(1, 1)));
        assert!(ls[1].coeff(&[0, 1]).eq_at_prec(&q(5, 1)));
        assert_eq!(ls[1].num_terms(), 2);
        let psi = fundamental_character(&f).unwrap();
        assert_eq!(psi.series.num_terms(), 1);
    }

    #[test]
    fn multiplicative_fundamental_character() {
        let psi = fundamental_character(&gm(12)).unwrap();
        // x - (5/2) x^2 + (25/3) x^3 - ...
        assert!(psi.series.coeff(&[2]).eq_at_prec(&q(-5, 2)));
        assert!(psi.series.coeff(&[3]).eq_at_prec(&q(25, 3)));
        assert!(psi.series.is_integral());
    }

    #[test]
    fn elliptic_psi_is_x_mod_p() {
        let ctx = Context::new(5, 8, 12).unwrap();
        let f = FormalGroupLaw::from_curve(&WeierstrassCurve::short(1, 1, &ctx).unwrap()).unwrap();
        let psi = fundamental_character(&f).unwrap();
        for (e, c) in psi.series.terms() {
            let want = if e[0] == 1 { 0 } else { 1 };
            let v = if e[0] == 1 { c.sub(&Qp::one(5, 30)).val_or_abs() } else { c.val_or_abs() };
            assert!(v >= want, "x^{}: {c}", e[0]);
        }
    }

    #[test]
    fn multiplicative_character_gamma_and_diff() {
        let f = gm(12);
        let theta = DeltaCharacter::from_coeffs(&f, vec![q(-1, 1), q(1, 5)], 8).unwrap();
        let (a, gamma) = differential_gamma(&theta);
        assert!(a[0].eq_at_prec(&q(-1, 1)) && a[1].eq_at_prec(&q(1, 1)));
        // printed identity: gamma = -p c_0
        assert!(gamma.eq_at_prec(&q(5, 1)));
        assert!(upsilon(&theta).eq_at_prec(&q(1, 1)));
        // i*Theta = Psi_1
        let it = iota_star(&f, &theta, 12).unwrap();
        let psi = fundamental_character(&f).unwrap();
        assert!(it.series.residual(&psi.series).unwrap() >= 7);
        for c in verify_diff_relation(&f, &theta).unwrap() {
            assert!(c.passed(), "{c}");
        }
        assert!(verify_additivity(&f, &theta).unwrap().passed());
        assert!(verify_psi_additivity(&f).unwrap().passed());
    }

    #[test]
    fn non_integral_combination_is_rejected() {
        let f = gm(12);
        let r = DeltaCharacter::from_coeffs(&f, vec![q(1, 1), q(1, 5)], 8);
        assert!(matches!(r, Err(Error::IntegralityViolation(_))));
    }

    #[test]
    fn f_star_of_additive_psi() {
        let f = FormalGroupLaw::additive(&Context::new(5, 8, 12).unwrap()).unwrap();
        let psi = fundamental_character(&f).unwrap();
        let im = f_star(&f, &psi).unwrap();
        assert!(im.series.coeff(&[5, 0]).eq_at_prec(&q(1, 1)));
        assert!(im.series.coeff(&[0, 1]).eq_at_prec(&q(5, 1)));
        assert_eq!(im.series.num_terms(), 2);
    }
}

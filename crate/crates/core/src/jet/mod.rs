//! Arithmetic jet spaces of a one-dimensional formal group in Witt
//! coordinates: the jet group laws on `J^n`, their kernels `N^n`, the
//! Frobenius `phi` and the lateral Frobenius `f`.
//!
//! A point of `J^n` is a Witt vector `(x_0, ..., x_n)` and the law is `F`
//! evaluated in the Witt ring. Since the ghost map is a ring homomorphism
//! and `F` has `Z_p` coefficients, the ghost components of the product are
//! `F(w_i(x), w_i(y))`; the Witt components are then recovered level by
//! level with exact divisions by `p^i`.

use std::sync::Arc;

use crate::check::Check;
use crate::formalgroup::{FormalGroupLaw, GroupKind};
use crate::ring::{CoeffRing, Series, Space};
use crate::witt::{ghost_component, WittVector};
use crate::{Error, Result};

/// Largest truncation degree used for the checks in six or more variables.
pub const CHECK_DEG: usize = 12;

/// `J^n` of a law, with coordinates `x_0..x_n, y_0..y_n`.
#[derive(Clone, Debug)]
pub struct JetGroupLaw {
    pub n: usize,
    pub p: u64,
    pub space: Arc<Space>,
    /// Witt coordinates of the product.
    pub law: Vec<Series>,
}

/// `N^n`: the kernel of `J^n -> G`, in coordinates `x_1..x_n, y_1..y_n`.
#[derive(Clone, Debug)]
pub struct KernelLaw {
    pub n: usize,
    pub space: Arc<Space>,
    pub law: Vec<Series>,
}

fn names(prefix: &[&str], lo: usize, hi: usize) -> Vec<String> {
    prefix.iter().flat_map(|c| (lo..=hi).map(move |i| format!("{c}{i}"))).collect()
}

pub fn jet_space(n: usize, deg: usize) -> Arc<Space> {
    let v = names(&["x", "y"], 0, n);
    let r: Vec<&str> = v.iter().map(|s| s.as_str()).collect();
    Space::new(&r, deg)
}

pub fn kernel_space(n: usize, deg: usize) -> Arc<Space> {
    let v = names(&["x", "y"], 1, n);
    let r: Vec<&str> = v.iter().map(|s| s.as_str()).collect();
    Space::new(&r, deg)
}

/// Witt components `(v_0..v_n)` from ghost components, over series.
pub fn unghost(p: u64, g: &[Series]) -> Result<Vec<Series>> {
    let mut z: Vec<Series> = Vec::with_capacity(g.len());
    let deg = g[0].space().deg() as u64;
    for (i, gi) in g.iter().enumerate() {
        let mut r = gi.clone();
        for (j, zj) in z.iter().enumerate() {
            let e = p.pow((i - j) as u32);
            if e > deg {
                continue;
            }
            r = r.sub(&zj.pow(e).mul_p_pow(j as i32));
        }
        z.push(r.mul_p_pow(-(i as i32)).integral()?);
    }
    Ok(z)
}

/// The jet law of level `n` of a two-variable law `base(t1, t2)`, truncated
/// at total degree `deg`.
pub fn jet_law_of(base: &Series, p: u64, n: usize, deg: usize) -> Result<JetGroupLaw> {
    if n > crate::witt::MAX_LEVEL {
        return Err(Error::InvalidContext(format!("jet level {n} exceeds {}", crate::witt::MAX_LEVEL)));
    }
    let space = jet_space(n, deg);
    let cap = base.cap();
    let xs: Vec<Series> = (0..=n).map(|i| Series::var(&space, i, p, cap)).collect();
    let ys: Vec<Series> = (0..=n).map(|i| Series::var(&space, n + 1 + i, p, cap)).collect();
    let base = if deg < base.space().deg() { base.truncate(deg) } else { base.clone() };
    let g: Vec<Series> = (0..=n)
        .map(|i| base.compose(&[ghost_component(p, &xs, i), ghost_component(p, &ys, i)]))
        .collect::<Result<_>>()?;
    Ok(JetGroupLaw { n, p, space, law: unghost(p, &g)? })
}

pub fn jet_group_law(f: &FormalGroupLaw, n: usize) -> Result<JetGroupLaw> {
    jet_law_of(&f.law, f.ctx.p, n, f.ctx.m)
}

/// The law on `N^1` in its own coordinate: `F_1(a, b) = F(pa, pb) / p`.
pub fn n1_law(f: &FormalGroupLaw, deg: usize) -> Result<Series> {
    let law = if deg < f.ctx.m { f.law.truncate(deg) } else { f.law.clone() };
    let sp = law.space().clone();
    let p = f.ctx.p;
    let a = Series::var(&sp, 0, p, law.cap()).mul_p_pow(1);
    let b = Series::var(&sp, 1, p, law.cap()).mul_p_pow(1);
    law.compose(&[a, b])?.mul_p_pow(-1).integral()
}

impl JetGroupLaw {
    pub fn xs(&self) -> Vec<Series> {
        let cap = self.law[0].cap();
        (0..=self.n).map(|i| Series::var(&self.space, i, self.p, cap)).collect()
    }

    pub fn ys(&self) -> Vec<Series> {
        let cap = self.law[0].cap();
        (0..=self.n).map(|i| Series::var(&self.space, self.n + 1 + i, self.p, cap)).collect()
    }

    /// Evaluates the law at Witt vectors of series in some other space.
    pub fn apply(&self, x: &[Series], y: &[Series]) -> Result<Vec<Series>> {
        let args: Vec<Series> = x.iter().chain(y).cloned().collect();
        let deg = args[0].space().deg();
        self.law
            .iter()
            .map(|c| if deg < self.space.deg() { c.truncate(deg) } else { c.clone() }.compose(&args))
            .collect()
    }

    /// Coordinates of `phi^i: J^n -> J^(n-i)` as series in the `x` block.
    pub fn frobenius(&self, i: usize) -> Result<Vec<Series>> {
        if i > self.n {
            return Err(Error::LengthTooShort);
        }
        let mut v = WittVector::new(self.xs())?;
        for _ in 0..i {
            v = v.frobenius(self.p)?;
        }
        Ok(v.components().to_vec())
    }

    pub fn kernel(&self) -> KernelLaw {
        let n = self.n;
        let space = kernel_space(n, self.space.deg());
        let mut map = vec![None; 2 * (n + 1)];
        for i in 1..=n {
            map[i] = Some(i - 1);
            map[n + 1 + i] = Some(n + i - 1);
        }
        KernelLaw { n, law: self.law[1..].iter().map(|c| c.remap(&space, &map)).collect(), space }
    }
}

impl KernelLaw {
    pub fn xs(&self) -> Vec<Series> {
        let cap = self.law[0].cap();
        (0..self.n).map(|i| Series::var(&self.space, i, self.space_p(), cap)).collect()
    }

    pub fn ys(&self) -> Vec<Series> {
        let cap = self.law[0].cap();
        (0..self.n).map(|i| Series::var(&self.space, self.n + i, self.space_p(), cap)).collect()
    }

    fn space_p(&self) -> u64 {
        self.law[0].p()
    }

    pub fn apply(&self, x: &[Series], y: &[Series]) -> Result<Vec<Series>> {
        let args: Vec<Series> = x.iter().chain(y).cloned().collect();
        let deg = args[0].space().deg();
        self.law
            .iter()
            .map(|c| if deg < self.space.deg() { c.truncate(deg) } else { c.clone() }.compose(&args))
            .collect()
    }
}

/// `f: N^n -> N^(n-1)` on coordinates `(x_1, ..., x_n)` given as series: the
/// Witt Frobenius of `J^(n-1)(N^1)` under `N^n = J^(n-1)(N^1)`.
///
/// Vectors longer than the structure polynomials allow go through the ghost
/// components instead.
pub fn lateral_frobenius(p: u64, x: &[Series]) -> Result<Vec<Series>> {
    if x.len() <= crate::witt::MAX_LEVEL + 1 {
        let v = WittVector::new(x.to_vec())?.frobenius(p)?;
        return Ok(v.components().to_vec());
    }
    let g: Vec<Series> = (1..x.len()).map(|i| ghost_component(p, x, i)).collect();
    unghost(p, &g)
}

fn max_resid(a: &[Series], b: &[Series]) -> Result<i32> {
    let mut r = i32::MAX;
    for (x, y) in a.iter().zip(b) {
        r = r.min(x.residual(y)?);
    }
    Ok(r)
}

/// Checks the structural identities of `J^1`, `J^2`, `N^2` and `f` for one
/// group, each as a series identity with its residual valuation.
pub fn verify_jet_identities(f: &FormalGroupLaw) -> Result<Vec<Check>> {
    let ctx = f.ctx;
    let p = ctx.p;
    let deg = ctx.m.min(CHECK_DEG);
    let need = ctx.n as i32 - 2;
    let mut out = Vec::new();

    let base = f.law.truncate(deg);
    let j1 = jet_law_of(&base, p, 1, deg)?;
    let j2 = jet_law_of(&base, p, 2, deg)?;
    let cap = j1.law[0].cap();

    // group law axioms on J^1
    let (x, y) = (j1.xs(), j1.ys());
    let zero: Vec<Series> = x.iter().map(|s| s.zero_like()).collect();
    out.push(Check::new("J1 identity", max_resid(&j1.apply(&x, &zero)?, &x)?, need));
    out.push(Check::new("J1 commutativity", max_resid(&j1.apply(&y, &x)?, &j1.law)?, need));
    let s3 = Space::new(&["x0", "x1", "y0", "y1", "z0", "z1"], deg);
    let v: Vec<Series> = (0..6).map(|i| Series::var(&s3, i, p, cap)).collect();
    let (a, b, c) = (&v[0..2], &v[2..4], &v[4..6]);
    let left = j1.apply(&j1.apply(a, b)?, c)?;
    let right = j1.apply(a, &j1.apply(b, c)?)?;
    out.push(Check::new("J1 associativity", max_resid(&left, &right)?, need));
    let f0 = base.remap(&j1.space, &[Some(0), Some(2)]);
    out.push(Check::new("J1 over G is F", j1.law[0].residual(&f0)?, need));

    // J^2
    let (x2, y2) = (j2.xs(), j2.ys());
    let zero2: Vec<Series> = x2.iter().map(|s| s.zero_like()).collect();
    out.push(Check::new("J2 identity", max_resid(&j2.apply(&x2, &zero2)?, &x2)?, need));
    out.push(Check::new("J2 commutativity", max_resid(&j2.apply(&y2, &x2)?, &j2.law)?, need));
    let u1: Vec<Series> = j1.law.iter().map(|s| s.remap(&j2.space, &[Some(0), Some(1), Some(3), Some(4)])).collect();
    out.push(Check::new("u: J2 -> J1 homomorphism", max_resid(&j2.law[..2], &u1)?, need));

    // phi: J^2 -> J^1 is a homomorphism
    let fx = WittVector::new(x2.clone())?.frobenius(p)?.components().to_vec();
    let fy = WittVector::new(y2.clone())?.frobenius(p)?.components().to_vec();
    let lhs = WittVector::new(j2.law.clone())?.frobenius(p)?.components().to_vec();
    let rhs = j1.apply(&fx, &fy)?;
    out.push(Check::new("phi: J2 -> J1 homomorphism", max_resid(&lhs, &rhs)?, need));

    // N^2 against J^1(N^1)
    let k2 = j2.kernel();
    let f1 = n1_law(f, deg)?;
    let jn1 = jet_law_of(&f1, p, 1, deg)?;
    let moved: Vec<Series> = jn1.law.iter().map(|s| s.remap(&k2.space, &[Some(0), Some(1), Some(2), Some(3)])).collect();
    out.push(Check::new("N2 = J1(N1)", max_resid(&k2.law, &moved)?, need));

    // phi^2 iota = phi iota f on N^2, and phi iota = p on N^1
    let kx = k2.xs();
    let zk = kx[0].zero_like();
    let phi2_iota = ghost_component(p, &[zk.clone(), kx[0].clone(), kx[1].clone()], 2);
    let fr = lateral_frobenius(p, &kx)?;
    let phi_iota_f = ghost_component(p, &[zk, fr[0].clone()], 1);
    out.push(Check::new("phi^2 iota = phi iota f", phi2_iota.residual(&phi_iota_f)?, need));
    let t = Space::new(&["x1"], deg);
    let x1 = Series::var(&t, 0, p, cap);
    let phi_iota = ghost_component(p, &[x1.zero_like(), x1.clone()], 1);
    out.push(Check::new("phi iota = p", phi_iota.residual(&x1.scale_int(p as i64))?, need));

    // f is a homomorphism N^2 -> N^1
    let ky = k2.ys();
    let lhs = lateral_frobenius(p, &k2.law)?;
    let fy = lateral_frobenius(p, &ky)?;
    let rhs = f1.compose(&[fr[0].clone(), fy[0].clone()])?;
    out.push(Check::new("f: N2 -> N1 homomorphism", lhs[0].residual(&rhs)?, need));

    // for the polynomial laws, the Witt ring itself gives an independent route
    if matches!(f.kind, GroupKind::Additive | GroupKind::Multiplicative) {
        for j in [&j1, &j2] {
            let xv = WittVector::new(j.xs())?;
            let yv = WittVector::new(j.ys())?;
            let s = xv.add(&yv, p)?;
            let w = match f.kind {
                GroupKind::Additive => s,
                _ => s.add(&xv.mul(&yv, p)?, p)?,
            };
            out.push(Check::new(format!("J{} law via Witt arithmetic", j.n), max_resid(w.components(), &j.law)?, need));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formalgroup::WeierstrassCurve;
    use crate::ring::{Context, Qp};

    fn ctx() -> Context {
        Context::new(5, 8, 12).unwrap()
    }

    fn e4(a: &[u8]) -> Vec<u8> {
        a.to_vec()
    }

    #[test]
    fn additive_level_one_is_witt_addition() {
        let g = FormalGroupLaw::additive(&ctx()).unwrap();
        let j = jet_group_law(&g, 1).unwrap();
        // x1 + y1 - (x0^4 y0 + 2 x0^3 y0^2 + 2 x0^2 y0^3 + x0 y0^4)
        let z1 = &j.law[1];
        let want = [([0, 1, 0, 0], 1), ([0, 0, 0, 1], 1), ([4, 0, 1, 0], -1), ([3, 0, 2, 0], -2), ([2, 0, 3, 0], -2), ([1, 0, 4, 0], -1)];
        for (e, c) in want {
            assert!(z1.coeff(&e4(&e)).eq_at_prec(&Qp::from_int(5, c, 9)), "{e:?}");
        }
        assert_eq!(z1.num_terms(), 6);
    }

    #[test]
    fn multiplicative_kernel() {
        let g = FormalGroupLaw::multiplicative(&ctx()).unwrap();
        let k = jet_group_law(&g, 1).unwrap().kernel();
        let want = [([1, 0], 1), ([0, 1], 1), ([1, 1], 5)];
        for (e, c) in want {
            assert!(k.law[0].coeff(&e).eq_at_prec(&Qp::from_int(5, c, 9)));
        }
        assert_eq!(k.law[0].num_terms(), 3);
    }

    #[test]
    fn frobenius_coordinates() {
        let g = FormalGroupLaw::multiplicative(&ctx()).unwrap();
        let j = jet_group_law(&g, 2).unwrap();
        let phi = j.frobenius(1).unwrap();
        // x0^5 + 5 x1
        assert!(phi[0].coeff(&[5]).eq_at_prec(&Qp::from_int(5, 1, 9)));
        assert!(phi[0].coeff(&[0, 1]).eq_at_prec(&Qp::from_int(5, 5, 9)));
        let phi2 = j.frobenius(2).unwrap();
        // w2 truncated at degree 12: 5 x1^5 + 25 x2
        assert!(phi2[0].coeff(&[0, 5]).eq_at_prec(&Qp::from_int(5, 5, 9)));
        assert!(phi2[0].coeff(&[0, 0, 1]).eq_at_prec(&Qp::from_int(5, 25, 9)));
        assert_eq!(phi2[0].num_terms(), 2);
    }

    #[test]
    fn identities_for_three_groups() {
        let c = ctx();
        for g in [
            FormalGroupLaw::additive(&c).unwrap(),
            FormalGroupLaw::multiplicative(&c).unwrap(),
            FormalGroupLaw::from_curve(&WeierstrassCurve::short(1, 1, &c).unwrap()).unwrap(),
        ] {
            for ch in verify_jet_identities(&g).unwrap() {
                assert!(ch.passed(), "{:?}: {ch}", g.kind);
            }
        }
    }

    #[test]
    fn short_curve_base_component() {
        let c = ctx();
        let g = FormalGroupLaw::from_curve(&WeierstrassCurve::short(1, 1, &c).unwrap()).unwrap();
        let j = jet_group_law(&g, 1).unwrap();
        let f0 = g.law.remap(&j.space, &[Some(0), Some(2)]);
        assert!(j.law[0].residual(&f0).unwrap() >= 8);
    }
}

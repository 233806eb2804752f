//! Truncated multivariate power series over `Q_p` in dense graded storage.
//!
//! A series keeps one residue per monomial modulo `p^cap` together with a
//! common `shift`: the coefficient of monomial `i` is `c[i] / p^shift`,
//! known modulo `p^(cap - shift)`. Division by `p` is then free and every
//! result carries its absolute precision.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::arith::{inv_mod, max_digits, pow_u64, val_u64, Modulus};
use super::padic::Qp;
use super::univariate;
use crate::{Error, Result};

pub const MAX_VARS: usize = 8;
pub type Exps = [u8; MAX_VARS];

const TABLE_LIMIT: usize = 1 << 23;

/// The monomials of total degree at most `deg` in a named set of variables.
pub struct Space {
    names: Vec<String>,
    deg: usize,
    exps: Vec<Exps>,
    offsets: Vec<usize>,
    degs: Vec<u8>,
    codes: Vec<u32>,
    table: Option<Vec<u32>>,
    binom: Vec<Vec<u64>>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({:?}, deg {})", self.names, self.deg)
    }
}

fn space_cache() -> &'static Mutex<HashMap<(Vec<String>, usize), Arc<Space>>> {
    static CACHE: OnceLock<Mutex<HashMap<(Vec<String>, usize), Arc<Space>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Space {
    /// The (shared) space of monomials in `names` up to total degree `deg`.
    pub fn new(names: &[&str], deg: usize) -> Arc<Space> {
        assert!(!names.is_empty() && names.len() <= MAX_VARS, "between 1 and {MAX_VARS} variables");
        assert!(deg <= 255, "degree must fit in a byte");
        let key = (names.iter().map(|s| s.to_string()).collect::<Vec<_>>(), deg);
        let mut cache = space_cache().lock().unwrap();
        if let Some(s) = cache.get(&key) {
            return s.clone();
        }
        let s = Arc::new(Space::build(key.0.clone(), deg));
        cache.insert(key, s.clone());
        s
    }

    fn build(names: Vec<String>, deg: usize) -> Space {
        let n = names.len();
        let mut exps = Vec::new();
        let mut offsets = Vec::with_capacity(deg + 2);
        let mut degs = Vec::new();
        for d in 0..=deg {
            offsets.push(exps.len());
            let mut e = [0u8; MAX_VARS];
            gen(&mut exps, &mut e, 0, n, d);
            degs.resize(exps.len(), d as u8);
        }
        offsets.push(exps.len());
        let radix = deg + 1;
        let codes: Vec<u32> = exps
            .iter()
            .map(|e| {
                let mut c = 0usize;
                for i in (0..n).rev() {
                    c = c.saturating_mul(radix).saturating_add(e[i] as usize);
                }
                c.min(u32::MAX as usize) as u32
            })
            .collect();
        let table_size = radix.checked_pow(n as u32).filter(|&s| s <= TABLE_LIMIT);
        let table = table_size.map(|size| {
            let mut t = vec![u32::MAX; size];
            for (i, &c) in codes.iter().enumerate() {
                t[c as usize] = i as u32;
            }
            t
        });
        let bmax = deg + n + 2;
        let mut binom = vec![vec![0u64; bmax + 1]; bmax + 1];
        for i in 0..=bmax {
            binom[i][0] = 1;
            for j in 1..=i {
                binom[i][j] = binom[i - 1][j - 1].saturating_add(binom[i - 1][j]);
            }
        }
        Space { names, deg, exps, offsets, degs, codes, table, binom }
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn deg(&self) -> usize {
        self.deg
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exps(&self, i: usize) -> &Exps {
        &self.exps[i]
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degs[i] as usize
    }

    /// Number of monomials of degree at most `d`.
    pub fn upto(&self, d: usize) -> usize {
        self.offsets[d.min(self.deg) + 1]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of a monomial, or `None` if its degree exceeds the truncation.
    pub fn index_of(&self, e: &[u8]) -> Option<usize> {
        let n = self.nvars();
        let d: usize = e[..n].iter().map(|&x| x as usize).sum();
        if d > self.deg || e[n..].iter().any(|&x| x != 0) {
            return None;
        }
        Some(self.offsets[d] + self.rank_in_degree(e, d))
    }

    fn rank_in_degree(&self, e: &[u8], d: usize) -> usize {
        let n = self.nvars();
        let mut rem = d;
        let mut r = 0u64;
        for i in 0..n.saturating_sub(1) {
            let k = n - i - 1;
            let ei = e[i] as usize;
            r += self.binom[rem + k][k] - self.binom[rem - ei + k][k];
            rem -= ei;
        }
        r as usize
    }

    #[inline]
    fn product_index(&self, i: usize, j: usize) -> usize {
        match &self.table {
            Some(t) => t[(self.codes[i] + self.codes[j]) as usize] as usize,
            None => {
                let mut e = [0u8; MAX_VARS];
                for (k, x) in e.iter_mut().enumerate() {
                    *x = self.exps[i][k] + self.exps[j][k];
                }
                self.offsets[self.degs[i] as usize + self.degs[j] as usize]
                    + self.rank_in_degree(&e, self.degs[i] as usize + self.degs[j] as usize)
            }
        }
    }

    fn same(&self, o: &Space) -> bool {
        std::ptr::eq(self, o) || (self.names == o.names && self.deg == o.deg)
    }
}

fn gen(out: &mut Vec<Exps>, e: &mut Exps, i: usize, n: usize, rem: usize) {
    if i == n - 1 {
        e[i] = rem as u8;
        out.push(*e);
        e[i] = 0;
        return;
    }
    for t in 0..=rem {
        e[i] = t as u8;
        gen(out, e, i + 1, n, rem - t);
    }
    e[i] = 0;
}

/// A truncated power series with capped absolute precision.
#[derive(Clone)]
pub struct Series {
    space: Arc<Space>,
    p: u64,
    cap: u32,
    shift: i32,
    c: Vec<u64>,
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({:?}, p={}, cap={}, shift={}) {}", self.space, self.p, self.cap, self.shift, self)
    }
}

impl Series {
    pub fn zero(space: &Arc<Space>, p: u64, cap: u32) -> Series {
        Series { space: space.clone(), p, cap, shift: 0, c: vec![0; space.len()] }
    }

    /// Zero known to absolute precision `abs`.
    pub fn zero_abs(space: &Arc<Space>, p: u64, abs: i32) -> Series {
        if abs >= 0 {
            Series::zero(space, p, (abs as u32).min(max_digits(p)))
        } else {
            Series { space: space.clone(), p, cap: 0, shift: -abs, c: vec![0; space.len()] }
        }
    }

    pub fn one(space: &Arc<Space>, p: u64, cap: u32) -> Series {
        let mut s = Series::zero(space, p, cap);
        s.c[0] = 1 % pow_u64(p, cap);
        s
    }

    pub fn var(space: &Arc<Space>, i: usize, p: u64, cap: u32) -> Series {
        let mut s = Series::zero(space, p, cap);
        let mut e = [0u8; MAX_VARS];
        e[i] = 1;
        if let Some(k) = space.index_of(&e) {
            s.c[k] = 1 % pow_u64(p, cap);
        }
        s
    }

    /// Builds a series from `(exponents, integer coefficient)` pairs.
    pub fn from_int_terms(space: &Arc<Space>, p: u64, cap: u32, terms: &[(Exps, i128)]) -> Series {
        let m = Modulus::new(p, cap);
        let mut s = Series::zero(space, p, cap);
        for (e, x) in terms {
            if let Some(k) = space.index_of(e) {
                s.c[k] = m.add(s.c[k], m.from_i128(*x));
            }
        }
        s
    }

    /// Builds a series from p-adic coefficients; the absolute precision is the
    /// smallest of `abs` and the coefficients' own.
    pub fn from_qp_terms(space: &Arc<Space>, p: u64, abs: i32, terms: &[(Exps, Qp)]) -> Series {
        let shift = terms.iter().filter_map(|(_, q)| q.valuation()).map(|v| -v).max().unwrap_or(0).max(0);
        let abs = terms.iter().map(|(_, q)| q.abs_prec()).fold(abs, i32::min);
        let cap = (abs + shift).clamp(0, max_digits(p) as i32) as u32;
        let mut s = Series { space: space.clone(), p, cap, shift, c: vec![0; space.len()] };
        let m = Modulus::new(p, cap);
        for (e, q) in terms {
            if let Some(k) = space.index_of(e) {
                let r = q.scaled_residue(shift, cap).expect("shift chosen to clear denominators");
                s.c[k] = m.add(s.c[k], r);
            }
        }
        s
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn raw(&self) -> &[u64] {
        &self.c
    }

    pub fn modulus(&self) -> Modulus {
        Modulus::new(self.p, self.cap)
    }

    /// Every coefficient is known modulo `p^abs_prec`.
    pub fn abs_prec(&self) -> i32 {
        self.cap as i32 - self.shift
    }

    pub fn coeff_at(&self, i: usize) -> Qp {
        Qp::from_scaled(self.p, self.c[i], -self.shift, self.abs_prec())
    }

    pub fn coeff(&self, e: &[u8]) -> Qp {
        let mut f = [0u8; MAX_VARS];
        f[..e.len()].copy_from_slice(e);
        match self.space.index_of(&f) {
            Some(i) => self.coeff_at(i),
            None => Qp::zero(self.p, self.abs_prec()),
        }
    }

    /// Nonzero terms as `(exponents, coefficient)`.
    pub fn terms(&self) -> Vec<(Exps, Qp)> {
        self.c
            .iter()
            .enumerate()
            .filter(|(_, &x)| x != 0)
            .map(|(i, _)| (*self.space.exps(i), self.coeff_at(i)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.c.iter().filter(|&&x| x != 0).count()
    }

    /// Residues rescaled to a larger `shift` and reduced modulo `p^cap`.
    fn rescaled(&self, shift: i32, cap: u32) -> Vec<u64> {
        debug_assert!(shift >= self.shift);
        let m = Modulus::new(self.p, cap);
        let k = (shift - self.shift) as u32;
        if k >= cap {
            return vec![0; self.c.len()];
        }
        let f = pow_u64(self.p, k);
        if f == 1 {
            return self.c.iter().map(|&x| x % m.m).collect();
        }
        self.c.iter().map(|&x| m.mul(x % m.m, f)).collect()
    }

    fn check_space(&self, o: &Series) -> Result<()> {
        if !self.space.same(&o.space) {
            return Err(Error::VariableMismatch);
        }
        assert_eq!(self.p, o.p, "mixing primes");
        Ok(())
    }

    fn aligned(&self, o: &Series) -> (i32, u32, Vec<u64>, Vec<u64>) {
        let shift = self.shift.max(o.shift);
        let md = max_digits(self.p) as i32;
        let cap = (self.cap as i32 + shift - self.shift).min(o.cap as i32 + shift - o.shift).min(md).max(0) as u32;
        (shift, cap, self.rescaled(shift, cap), o.rescaled(shift, cap))
    }

    pub fn try_add(&self, o: &Series) -> Result<Series> {
        self.check_space(o)?;
        let (shift, cap, a, b) = self.aligned(o);
        let m = Modulus::new(self.p, cap);
        let c = a.iter().zip(&b).map(|(&x, &y)| m.add(x, y)).collect();
        Ok(Series { space: self.space.clone(), p: self.p, cap, shift, c })
    }

    pub fn try_sub(&self, o: &Series) -> Result<Series> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &Series) -> Result<Series> {
        self.check_space(o)?;
        let cap = self.cap.min(o.cap);
        let m = Modulus::new(self.p, cap);
        let a: Vec<u64> = self.c.iter().map(|&x| x % m.m).collect();
        let b: Vec<u64> = o.c.iter().map(|&x| x % m.m).collect();
        let c = mul_kernel(&self.space, m, &a, &b);
        Ok(Series { space: self.space.clone(), p: self.p, cap, shift: self.shift + o.shift, c })
    }

    /// Sum; panics if the variable sets differ (see [`Series::try_add`]).
    pub fn add(&self, o: &Series) -> Series {
        self.try_add(o).expect("series over different variables")
    }

    pub fn sub(&self, o: &Series) -> Series {
        self.try_sub(o).expect("series over different variables")
    }

    pub fn mul(&self, o: &Series) -> Series {
        self.try_mul(o).expect("series over different variables")
    }

    pub fn neg(&self) -> Series {
        let m = self.modulus();
        Series { c: self.c.iter().map(|&x| m.neg(x)).collect(), ..self.clone() }
    }

    pub fn scale_int(&self, k: i64) -> Series {
        let m = self.modulus();
        let f = m.from_i64(k);
        Series { c: self.c.iter().map(|&x| m.mul(x, f)).collect(), ..self.clone() }
    }

    pub fn scale(&self, q: &Qp) -> Series {
        match q.valuation() {
            None => Series::zero_abs(&self.space, self.p, q.abs_prec() - self.shift),
            Some(v) => {
                let cap = self.cap.min(q.rel_prec());
                let m = Modulus::new(self.p, cap);
                let u = q.unit().residue() % m.m;
                Series {
                    space: self.space.clone(),
                    p: self.p,
                    cap,
                    shift: self.shift - v,
                    c: self.c.iter().map(|&x| m.mul(x % m.m, u)).collect(),
                }
            }
        }
    }

    /// Multiplies by `p^k` exactly.
    pub fn mul_p_pow(&self, k: i32) -> Series {
        Series { shift: self.shift - k, ..self.clone() }
    }

    /// Adds a p-adic constant.
    pub fn add_const(&self, q: &Qp) -> Series {
        let mut e = [0u8; MAX_VARS];
        e[0] = 0;
        let c = Series::from_qp_terms(&self.space, self.p, self.abs_prec(), &[(e, *q)]);
        self.add(&c)
    }

    /// Lowers the absolute precision to at most `abs`.
    pub fn with_abs(&self, abs: i32) -> Series {
        if abs >= self.abs_prec() {
            return self.clone();
        }
        let cap = (abs + self.shift).max(0) as u32;
        let m = Modulus::new(self.p, cap);
        Series { cap, c: self.c.iter().map(|&x| x % m.m).collect(), ..self.clone() }
    }

    /// Removes a common factor of `p` from the residues (or a negative shift),
    /// leaving the represented values and their precision unchanged.
    pub fn normalize(&self) -> Series {
        let mut s = self.clone();
        let md = max_digits(self.p);
        if s.shift < 0 {
            let k = (-s.shift) as u32;
            let cap = (s.cap + k).min(md);
            s = Series { c: self.rescaled(0, cap), cap, shift: 0, ..self.clone() };
            s.cap = cap;
        }
        if s.shift > 0 {
            let v = s.c.iter().filter(|&&x| x != 0).map(|&x| val_u64(x, s.p)).min().unwrap_or(s.cap);
            let k = (v.min(s.shift as u32)).min(s.cap);
            if k > 0 {
                let d = pow_u64(s.p, k);
                s.c.iter_mut().for_each(|x| *x /= d);
                s.cap -= k;
                s.shift -= k as i32;
            }
        }
        s
    }

    /// The same values with no denominators, or an error naming the first
    /// non-integral coefficient.
    pub fn integral(&self) -> Result<Series> {
        let s = self.normalize();
        if s.shift > 0 && !s.is_zero() {
            let i = s.c.iter().position(|&x| x != 0).unwrap();
            return Err(Error::IntegralityViolation(format!(
                "coefficient of {} is {}",
                self.monomial_name(i),
                s.coeff_at(i)
            )));
        }
        Ok(s)
    }

    /// Smallest coefficient valuation, `None` if zero at the known precision.
    pub fn min_valuation(&self) -> Option<i32> {
        self.c.iter().filter(|&&x| x != 0).map(|&x| val_u64(x, self.p) as i32 - self.shift).min()
    }

    pub fn is_integral(&self) -> bool {
        self.min_valuation().map_or(true, |v| v >= 0)
    }

    /// Valuation of `self - o`, capped at the precision of the comparison.
    pub fn residual(&self, o: &Series) -> Result<i32> {
        let d = self.try_sub(o)?;
        Ok(d.min_valuation().map_or(d.abs_prec(), |v| v.min(d.abs_prec())))
    }

    pub fn pow(&self, mut e: u64) -> Series {
        let mut base = self.clone();
        let mut r = Series::one(&self.space, self.p, self.cap);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        r
    }

    /// Moves the series into another space; `map[i]` is the target of
    /// variable `i`, with `None` meaning the variable is set to zero.
    /// Monomials beyond the target's degree are dropped.
    pub fn remap(&self, target: &Arc<Space>, map: &[Option<usize>]) -> Series {
        assert_eq!(map.len(), self.space.nvars());
        let mut r = Series { space: target.clone(), c: vec![0; target.len()], ..self.clone() };
        let m = self.modulus();
        'terms: for (i, &x) in self.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let e = self.space.exps(i);
            let mut f = [0u8; MAX_VARS];
            for (v, &k) in e.iter().take(map.len()).enumerate() {
                if k == 0 {
                    continue;
                }
                match map[v] {
                    None => continue 'terms,
                    Some(t) => f[t] += k,
                }
            }
            if let Some(j) = target.index_of(&f) {
                r.c[j] = m.add(r.c[j], x);
            }
        }
        r
    }

    /// Same variables, lower truncation degree.
    pub fn truncate(&self, deg: usize) -> Series {
        let names: Vec<&str> = self.space.names().iter().map(|s| s.as_str()).collect();
        let target = Space::new(&names, deg);
        let map: Vec<Option<usize>> = (0..names.len()).map(Some).collect();
        self.remap(&target, &map)
    }

    pub fn derivative(&self, var: usize) -> Series {
        let m = self.modulus();
        let mut r = Series { c: vec![0; self.c.len()], ..self.clone() };
        for (i, &x) in self.c.iter().enumerate() {
            let e = self.space.exps(i);
            if x == 0 || e[var] == 0 {
                continue;
            }
            let mut f = *e;
            f[var] -= 1;
            let j = self.space.index_of(&f).unwrap();
            r.c[j] = m.add(r.c[j], m.mul(x, e[var] as u64 % m.m));
        }
        r
    }

    /// Antiderivative in `var` with zero constant of integration. Terms pushed
    /// beyond the truncation degree are dropped.
    pub fn integrate(&self, var: usize) -> Series {
        let p = self.p;
        let mut vmax = 0;
        for (i, &x) in self.c.iter().enumerate() {
            let d = self.space.exps(i)[var] as u64 + 1;
            if x != 0 && self.space.degree_of(i) < self.space.deg() {
                vmax = vmax.max(val_u64(d, p));
            }
        }
        let m = self.modulus();
        let mut r = Series { c: vec![0; self.c.len()], shift: self.shift + vmax as i32, ..self.clone() };
        for (i, &x) in self.c.iter().enumerate() {
            if x == 0 || self.space.degree_of(i) >= self.space.deg() {
                continue;
            }
            let mut f = *self.space.exps(i);
            let d = f[var] as u64 + 1;
            f[var] += 1;
            let v = val_u64(d, p);
            let unit = d / pow_u64(p, v);
            let inv = inv_mod(unit % m.m, m.m).unwrap_or(0);
            let j = self.space.index_of(&f).unwrap();
            let t = m.mul(m.mul(x, inv), pow_u64(p, vmax - v) % m.m);
            r.c[j] = m.add(r.c[j], t);
        }
        r
    }

    /// `1/self` for a series whose constant term is a unit.
    pub fn inv_unit(&self) -> Result<Series> {
        let c0 = self.coeff_at(0);
        if c0.valuation() != Some(0) {
            return Err(Error::NonUnitLinearCoefficient);
        }
        let ci = c0.inv()?;
        // 1/(c0 (1 + u)) with u = self/c0 - 1
        let u = self.scale(&ci).add_const(&Qp::one(self.p, 64).neg()).normalize();
        let one = Series::one(&self.space, self.p, u.cap.max(1));
        let mut acc = one.clone();
        for _ in 0..self.space.deg() {
            acc = one.sub(&u.mul(&acc)).normalize();
        }
        Ok(acc.scale(&ci))
    }

    /// Substitutes `args[i]` for variable `i`. All arguments must share a
    /// space and have zero constant term.
    pub fn compose(&self, args: &[Series]) -> Result<Series> {
        if args.len() != self.space.nvars() {
            return Err(Error::VariableMismatch);
        }
        for a in &args[1..] {
            args[0].check_space(a)?;
        }
        if args.iter().any(|a| a.c[0] != 0) {
            return Err(Error::NonzeroConstantTerm);
        }
        if self.space.nvars() == 1 && args[0].space.nvars() == 1 {
            return Ok(univariate::compose_series(self, &args[0]));
        }
        let args: Vec<Series> = args.iter().map(|a| a.normalize()).collect();
        let target = args[0].space.clone();
        let mut terms: Vec<(Exps, u64)> =
            self.c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (*self.space.exps(i), x)).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let base = Series { space: target.clone(), c: vec![0; target.len()], ..self.clone() };
        let n = self.space.nvars();
        Ok(horner(&terms, 0, n, &args, &base))
    }

    fn monomial_name(&self, i: usize) -> String {
        let e = self.space.exps(i);
        let parts: Vec<String> = self
            .space
            .names()
            .iter()
            .enumerate()
            .filter(|(j, _)| e[*j] > 0)
            .map(|(j, n)| if e[j] == 1 { n.clone() } else { format!("{n}^{}", e[j]) })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

/// Recursive Horner evaluation of the terms (sorted lexicographically) in the
/// variables `var..n`, returning a series in the arguments' space.
fn horner(terms: &[(Exps, u64)], var: usize, n: usize, args: &[Series], base: &Series) -> Series {
    let g = &args[var];
    let mut acc: Option<Series> = None;
    let mut k = terms.iter().map(|t| t.0[var]).max().unwrap_or(0) as i32;
    let mut pos = terms.len();
    while k >= 0 {
        // terms whose exponent in `var` equals k form a contiguous block at the end
        let start = terms[..pos].iter().rposition(|t| (t.0[var] as i32) < k).map_or(0, |x| x + 1);
        let block = &terms[start..pos];
        pos = start;
        if let Some(a) = acc.take() {
            acc = Some(a.mul(g));
        }
        if !block.is_empty() {
            let inner = if var + 1 == n {
                let mut s = base.clone();
                let m = s.modulus();
                s.c[0] = m.add(s.c[0], block[0].1 % m.m);
                s
            } else {
                horner(block, var + 1, n, args, base)
            };
            acc = Some(match acc {
                None => inner,
                Some(a) => a.add(&inner),
            });
        }
        k -= 1;
    }
    acc.unwrap_or_else(|| base.clone())
}

fn mul_kernel(space: &Space, m: Modulus, a: &[u64], b: &[u64]) -> Vec<u64> {
    let na: Vec<u32> = (0..a.len()).filter(|&i| a[i] != 0).map(|i| i as u32).collect();
    let nb: Vec<u32> = (0..b.len()).filter(|&i| b[i] != 0).map(|i| i as u32).collect();
    let (outer, inner, oc, ic) = if na.len() <= nb.len() { (&na, &nb, a, b) } else { (&nb, &na, b, a) };
    let deg = space.deg();
    // inner_end[d] = number of inner terms of degree <= d
    let mut inner_end = vec![0usize; deg + 1];
    {
        let mut j = 0;
        for (d, slot) in inner_end.iter_mut().enumerate() {
            while j < inner.len() && space.degree_of(inner[j] as usize) <= d {
                j += 1;
            }
            *slot = j;
        }
    }
    let mut acc = vec![0u128; a.len()];
    let small = m.m < (1u64 << 32);
    for &i in outer {
        let i = i as usize;
        let di = space.degree_of(i);
        let x = oc[i];
        let end = inner_end[deg - di];
        for &j in &inner[..end] {
            let j = j as usize;
            let k = space.product_index(i, j);
            if small {
                acc[k] += (x * ic[j]) as u128;
            } else {
                acc[k] += (x as u128 * ic[j] as u128) % m.m as u128;
            }
        }
    }
    acc.into_iter().map(|x| (x % m.m as u128) as u64).collect()
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &x) in self.c.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let q = self.coeff_at(i);
            let (num, val) = q.to_rational_parts();
            let coeff = match val.cmp(&0) {
                std::cmp::Ordering::Equal => format!("{num}"),
                std::cmp::Ordering::Greater => format!("{num}*{}^{val}", self.p),
                std::cmp::Ordering::Less => format!("{num}/{}^{}", self.p, -val),
            };
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let mono = self.monomial_name(i);
            if mono == "1" {
                write!(f, "({coeff})")?;
            } else {
                write!(f, "({coeff})*{mono}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O({}^{}, deg {})", self.p, self.abs_prec(), self.space.deg() + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(xs: &[u8]) -> Exps {
        let mut f = [0u8; MAX_VARS];
        f[..xs.len()].copy_from_slice(xs);
        f
    }

    #[test]
    fn graded_indexing_roundtrip() {
        for (n, d) in [(1usize, 7usize), (2, 9), (3, 6), (5, 4), (8, 3)] {
            let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
            let s = Space::new(&refs, d);
            for i in 0..s.len() {
                assert_eq!(s.index_of(s.exps(i)), Some(i));
            }
        }
    }

    #[test]
    fn difference_of_squares() {
        let sp = Space::new(&["x", "y"], 4);
        let x = Series::var(&sp, 0, 5, 6);
        let y = Series::var(&sp, 1, 5, 6);
        let prod = x.add(&y).mul(&x.sub(&y));
        let expect = Series::from_int_terms(&sp, 5, 6, &[(e(&[2, 0]), 1), (e(&[0, 2]), -1)]);
        assert_eq!(prod.residual(&expect).unwrap(), 6);
        assert!(prod.mul(&Series::zero(&sp, 5, 6)).is_zero());
    }

    #[test]
    fn truncated_geometric_product() {
        let sp = Space::new(&["x"], 3);
        let f = Series::from_int_terms(&sp, 5, 4, &[(e(&[0]), 1), (e(&[1]), 1), (e(&[2]), 1), (e(&[3]), 1)]);
        let g = Series::from_int_terms(&sp, 5, 4, &[(e(&[0]), 1), (e(&[1]), -1)]);
        let one = Series::one(&sp, 5, 4);
        assert_eq!(f.mul(&g).residual(&one).unwrap(), 4);
    }

    #[test]
    fn mismatched_variables() {
        let a = Series::var(&Space::new(&["x"], 3), 0, 5, 4);
        let b = Series::var(&Space::new(&["y"], 3), 0, 5, 4);
        assert_eq!(a.try_add(&b).unwrap_err(), Error::VariableMismatch);
    }

    #[test]
    fn composition_of_square() {
        let sp1 = Space::new(&["t"], 4);
        let sp2 = Space::new(&["x", "y"], 4);
        let f = Series::from_int_terms(&sp1, 5, 6, &[(e(&[2]), 1)]);
        let arg = Series::var(&sp2, 0, 5, 6).add(&Series::var(&sp2, 1, 5, 6));
        let r = f.compose(&[arg.clone()]).unwrap();
        let expect = Series::from_int_terms(&sp2, 5, 6, &[(e(&[2, 0]), 1), (e(&[1, 1]), 2), (e(&[0, 2]), 1)]);
        assert_eq!(r.residual(&expect).unwrap(), 6);
        let id = Series::var(&sp1, 0, 5, 6);
        assert_eq!(id.compose(&[arg.clone()]).unwrap().residual(&arg).unwrap(), 6);
        let bad = arg.add_const(&Qp::one(5, 6));
        assert_eq!(f.compose(&[bad]).unwrap_err(), Error::NonzeroConstantTerm);
    }

    #[test]
    fn log_of_five_x() {
        // sum (-1)^{k+1} t^k / k at t = 5x, degree 3
        let p = 5;
        let sp = Space::new(&["t"], 3);
        let terms: Vec<(Exps, Qp)> = (1..=3)
            .map(|k| (e(&[k as u8]), Qp::from_ratio(p, if k % 2 == 1 { 1 } else { -1 }, k, 8).unwrap()))
            .collect();
        let log = Series::from_qp_terms(&sp, p, 8, &terms);
        let arg = Series::var(&Space::new(&["x"], 3), 0, p, 8).scale_int(5);
        let r = log.compose(&[arg]).unwrap();
        assert_eq!(r.coeff(&[1]), Qp::from_int(p, 5, r.abs_prec()));
        assert!(r.coeff(&[2]).eq_at_prec(&Qp::from_ratio(p, -25, 2, 8).unwrap()));
        assert!(r.coeff(&[3]).eq_at_prec(&Qp::from_ratio(p, 125, 3, 8).unwrap()));
    }

    #[test]
    fn multivariate_composition_matches_expansion() {
        // f(u, v) = u v + v^2 at u = x + y^2, v = 5 y
        let p = 7;
        let spf = Space::new(&["u", "v"], 6);
        let spx = Space::new(&["x", "y"], 6);
        let f = Series::from_int_terms(&spf, p, 8, &[(e(&[1, 1]), 1), (e(&[0, 2]), 1)]);
        let x = Series::var(&spx, 0, p, 8);
        let y = Series::var(&spx, 1, p, 8);
        let u = x.add(&y.mul(&y));
        let v = y.scale_int(5);
        let direct = u.mul(&v).add(&v.mul(&v));
        assert_eq!(f.compose(&[u, v]).unwrap().residual(&direct).unwrap(), 8);
    }

    #[test]
    fn integration_tracks_denominators() {
        let sp = Space::new(&["t"], 6);
        let f = Series::from_int_terms(&sp, 5, 8, &[(e(&[4]), 1)]);
        let g = f.integrate(0);
        assert_eq!(g.coeff(&[5]).valuation(), Some(-1));
        assert_eq!(g.abs_prec(), 7);
        assert_eq!(g.derivative(0).residual(&f).unwrap(), 7);
    }

    #[test]
    fn unit_inverse() {
        let sp = Space::new(&["x", "y"], 5);
        let f = Series::one(&sp, 3, 6).add(&Series::var(&sp, 0, 3, 6)).add(&Series::var(&sp, 1, 3, 6).scale_int(2));
        let g = f.inv_unit().unwrap();
        assert_eq!(f.mul(&g).residual(&Series::one(&sp, 3, 6)).unwrap(), 6);
    }

    #[test]
    fn normalize_keeps_values() {
        let sp = Space::new(&["x"], 3);
        let f = Series::var(&sp, 0, 5, 8).scale_int(25).mul_p_pow(-1);
        let g = f.normalize();
        assert_eq!(g.shift(), 0);
        assert_eq!(g.abs_prec(), f.abs_prec());
        assert_eq!(g.coeff(&[1]).to_rational_parts(), (1, 1));
        assert!(f.integral().is_ok());
        assert!(Series::var(&sp, 0, 5, 8).mul_p_pow(-1).integral().is_err());
    }
}

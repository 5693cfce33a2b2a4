//! Truncated arithmetic in towers of quadratic extensions of a local field.
//!
//! A tower starts at a base ring (`Z/p^m[y]/(g)` in characteristic zero,
//! `F_q[t]/t^m` in characteristic p) and stacks levels `B[δ]/(δ² − tδ − n)`.
//! Elements are flat coordinate vectors laid out recursively as `(a, b)`
//! halves for `a + bδ`. F, E and every K/E share one engine; a field is a
//! tower together with a level index and a truncation depth.

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{prime_factors, Fq};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseChar {
    Zero,
    P,
}

/// Shape of E/F. `Ramified { twisted }` picks δ² = ϖ_F or δ² = ε·ϖ_F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtType {
    Unramified,
    Ramified { twisted: bool },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub f: u32,
    pub base_char: BaseChar,
    pub ext: ExtType,
    pub ell: u64,
    /// Truncation level of E: units are taken modulo U_E^depth.
    pub depth: u32,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && prime_factors(n) == vec![n]
}

impl FieldSpec {
    pub fn new(p: u64, f: u32, ext: ExtType, ell: u64, depth: u32) -> Self {
        FieldSpec { p, f, base_char: BaseChar::Zero, ext, ell, depth }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpec(m.to_string()));
        if !is_prime(self.p) {
            return bad("p must be prime");
        }
        if !is_prime(self.ell) || self.ell == 2 {
            return bad("ell must be an odd prime");
        }
        if self.ell == self.p {
            return bad("ell must differ from p");
        }
        if self.f == 0 || self.depth == 0 {
            return bad("f and depth must be positive");
        }
        if self.p == 2 && self.base_char == BaseChar::P {
            return bad("characteristic 2 is excluded");
        }
        if self.p == 2 && self.depth < 2 * self.v_e_of_2() + 1 {
            return bad("depth must be at least 2 v_E(2) + 1");
        }
        if self.q_e().saturating_pow(self.depth) > 1 << 22 {
            return bad("truncated unit group of E is too large");
        }
        Ok(())
    }

    pub fn q_f(&self) -> u64 {
        self.p.pow(self.f)
    }

    pub fn q_e(&self) -> u64 {
        match self.ext {
            ExtType::Unramified => self.q_f() * self.q_f(),
            ExtType::Ramified { .. } => self.q_f(),
        }
    }

    /// Ramification index of E/F.
    pub fn e(&self) -> u32 {
        match self.ext {
            ExtType::Unramified => 1,
            ExtType::Ramified { .. } => 2,
        }
    }

    fn v_e_of_2(&self) -> u32 {
        if self.p == 2 {
            self.e()
        } else {
            0
        }
    }

    pub fn depth_f(&self) -> u32 {
        self.depth.div_ceil(self.e())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FieldTag {
    F,
    E,
    K(u8),
}

/// An element of a named field, as exposed by the public API.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedElem {
    pub tag: FieldTag,
    pub coords: Vec<i64>,
}

#[derive(Clone, Debug)]
struct BaseRing {
    p: i64,
    f: usize,
    char0: bool,
    m: usize,
    modulus_coeff: i64,
    g: Vec<i64>,
    q: u64,
}

impl BaseRing {
    fn new(p: u64, f: u32, char0: bool, m: usize) -> Result<BaseRing> {
        let fq = Fq::get(p, f)?;
        let g: Vec<i64> = fq.modulus().iter().map(|&c| c as i64).collect();
        let modulus_coeff = if char0 { (p as i64).pow(m as u32) } else { p as i64 };
        Ok(BaseRing { p: p as i64, f: f as usize, char0, m, modulus_coeff, g, q: p.pow(f) })
    }

    fn len(&self) -> usize {
        if self.char0 {
            self.f
        } else {
            self.f * self.m
        }
    }

    fn norm_coeffs(&self, x: &mut [i64]) {
        for c in x.iter_mut() {
            *c = c.rem_euclid(self.modulus_coeff);
        }
    }

    fn poly_mul(&self, a: &[i64], b: &[i64], modulus: i64) -> Vec<i64> {
        let f = self.f;
        let mut r = vec![0i64; 2 * f - 1];
        for i in 0..f {
            if a[i] == 0 {
                continue;
            }
            for j in 0..f {
                r[i + j] = (r[i + j] + a[i] * b[j]) % modulus;
            }
        }
        for deg in (f..2 * f - 1).rev() {
            let c = r[deg];
            if c == 0 {
                continue;
            }
            for i in 0..=f {
                r[deg - f + i] = (r[deg - f + i] - c * self.g[i]) % modulus;
            }
        }
        r.truncate(f);
        for c in r.iter_mut() {
            *c = c.rem_euclid(modulus);
        }
        r
    }

    fn mul(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        if self.char0 {
            return self.poly_mul(a, b, self.modulus_coeff);
        }
        let f = self.f;
        let mut out = vec![0i64; self.len()];
        for j1 in 0..self.m {
            let x = &a[j1 * f..(j1 + 1) * f];
            if x.iter().all(|&c| c == 0) {
                continue;
            }
            for j2 in 0..self.m - j1 {
                let y = &b[j2 * f..(j2 + 1) * f];
                if y.iter().all(|&c| c == 0) {
                    continue;
                }
                let z = self.poly_mul(x, y, self.p);
                let off = (j1 + j2) * f;
                for i in 0..f {
                    out[off + i] = (out[off + i] + z[i]) % self.p;
                }
            }
        }
        out
    }

    fn val(&self, x: &[i64]) -> usize {
        if self.char0 {
            x.iter()
                .map(|&c| {
                    if c == 0 {
                        return self.m;
                    }
                    let mut v = 0;
                    let mut c = c;
                    while c % self.p == 0 && v < self.m {
                        c /= self.p;
                        v += 1;
                    }
                    v
                })
                .min()
                .unwrap_or(self.m)
        } else {
            (0..self.m).find(|&j| x[j * self.f..(j + 1) * self.f].iter().any(|&c| c != 0)).unwrap_or(self.m)
        }
    }

    fn reduce(&self, x: &[i64], k: usize) -> Vec<i64> {
        if self.char0 {
            let pk = self.p.pow(k.min(self.m) as u32);
            x.iter().map(|&c| c.rem_euclid(pk)).collect()
        } else {
            let mut out = x.to_vec();
            for c in out.iter_mut().skip(k.min(self.m) * self.f) {
                *c = 0;
            }
            out
        }
    }

    fn div_unif(&self, x: &[i64]) -> Vec<i64> {
        if self.char0 {
            x.iter().map(|&c| c.rem_euclid(self.modulus_coeff) / self.p).collect()
        } else {
            let mut out = vec![0i64; self.len()];
            out[..self.len() - self.f].copy_from_slice(&x[self.f..]);
            out
        }
    }

    fn unif(&self) -> Vec<i64> {
        let mut out = vec![0i64; self.len()];
        if self.char0 {
            out[0] = self.p;
        } else {
            out[self.f] = 1;
        }
        out
    }

    fn enumerate(&self, k: usize) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0i64; self.len()]];
        let (slots, radix): (Vec<usize>, i64) = if self.char0 {
            ((0..self.f).collect(), self.p.pow(k as u32))
        } else {
            ((0..k * self.f).collect(), self.p)
        };
        for &s in slots.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * radix as usize);
            for c in 0..radix {
                for x in &out {
                    let mut y = x.clone();
                    y[s] = c;
                    next.push(y);
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    fn unit_group_order(&self) -> u64 {
        (self.q - 1) * self.q.pow(self.m as u32 - 1)
    }
}

#[derive(Clone, Debug)]
struct Level {
    ramified: bool,
    t: Vec<i64>,
    n: Vec<i64>,
    /// For ramified levels: `(n / ϖ_below)^{-1}`.
    n_unit_inv: Vec<i64>,
}

/// A tower of quadratic extensions over a base ring.
#[derive(Clone, Debug)]
pub struct Tower {
    base: BaseRing,
    levels: Vec<Level>,
}

impl Tower {
    pub fn len(&self, h: usize) -> usize {
        self.base.len() << h
    }

    pub fn q(&self, h: usize) -> u64 {
        (0..h).fold(self.base.q, |q, i| if self.levels[i].ramified { q } else { q * q })
    }

    /// Ramification index of level `h` over the base.
    pub fn e(&self, h: usize) -> usize {
        (0..h).fold(1, |e, i| if self.levels[i].ramified { 2 * e } else { e })
    }

    fn prec(&self, h: usize) -> usize {
        self.base.m * self.e(h)
    }

    pub fn zero(&self, h: usize) -> Vec<i64> {
        vec![0; self.len(h)]
    }

    pub fn one(&self, h: usize) -> Vec<i64> {
        let mut v = self.zero(h);
        v[0] = 1;
        v
    }

    pub fn from_int(&self, h: usize, n: i64) -> Vec<i64> {
        let mut v = self.zero(h);
        v[0] = n.rem_euclid(self.base.modulus_coeff);
        v
    }

    /// Include a level-`h0` element into level `h`.
    pub fn lift(&self, h0: usize, x: &[i64], h: usize) -> Vec<i64> {
        let mut v = x.to_vec();
        v.resize(self.len(h), 0);
        debug_assert!(h0 <= h && x.len() == self.len(h0));
        v
    }

    pub fn add(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.base.norm_coeffs(&mut v);
        v
    }

    pub fn sub(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.base.norm_coeffs(&mut v);
        v
    }

    pub fn neg(&self, x: &[i64]) -> Vec<i64> {
        let mut v: Vec<i64> = x.iter().map(|a| -a).collect();
        self.base.norm_coeffs(&mut v);
        v
    }

    pub fn mul(&self, h: usize, x: &[i64], y: &[i64]) -> Vec<i64> {
        if h == 0 {
            return self.base.mul(x, y);
        }
        let half = self.len(h - 1);
        let (a, b) = x.split_at(half);
        let (c, d) = y.split_at(half);
        let lv = &self.levels[h - 1];
        let ac = self.mul(h - 1, a, c);
        let bd = self.mul(h - 1, b, d);
        let ad = self.mul(h - 1, a, d);
        let bc = self.mul(h - 1, b, c);
        let first = self.add(&ac, &self.mul(h - 1, &bd, &lv.n));
        let mut second = self.add(&ad, &bc);
        if lv.t.iter().any(|&c| c != 0) {
            second = self.add(&second, &self.mul(h - 1, &bd, &lv.t));
        }
        let mut out = first;
        out.extend(second);
        out
    }

    /// The automorphism of level `h` over level `h − 1`.
    pub fn conj(&self, h: usize, x: &[i64]) -> Vec<i64> {
        let half = self.len(h - 1);
        let (a, b) = x.split_at(half);
        let lv = &self.levels[h - 1];
        let mut out = if lv.t.iter().any(|&c| c != 0) { self.add(a, &self.mul(h - 1, b, &lv.t)) } else { a.to_vec() };
        out.extend(self.neg(b));
        out
    }

    /// Norm from level `h` to level `h − 1`.
    pub fn norm_down(&self, h: usize, x: &[i64]) -> Vec<i64> {
        let half = self.len(h - 1);
        let (a, b) = x.split_at(half);
        let lv = &self.levels[h - 1];
        let mut out = self.mul(h - 1, a, a);
        out = self.sub(&out, &self.mul(h - 1, &self.mul(h - 1, b, b), &lv.n));
        if lv.t.iter().any(|&c| c != 0) {
            out = self.add(&out, &self.mul(h - 1, &self.mul(h - 1, a, b), &lv.t));
        }
        out
    }

    /// Valuation in units of ϖ_h, capped at the working precision.
    pub fn val(&self, h: usize, x: &[i64]) -> usize {
        if h == 0 {
            return self.base.val(x);
        }
        let half = self.len(h - 1);
        let (a, b) = x.split_at(half);
        let (va, vb) = (self.val(h - 1, a), self.val(h - 1, b));
        if self.levels[h - 1].ramified {
            (2 * va).min(2 * vb + 1).min(self.prec(h))
        } else {
            va.min(vb)
        }
    }

    /// Canonical representative modulo ϖ_h^k.
    pub fn reduce(&self, h: usize, x: &[i64], k: usize) -> Vec<i64> {
        if h == 0 {
            return self.base.reduce(x, k);
        }
        let half = self.len(h - 1);
        let (a, b) = x.split_at(half);
        let (ka, kb) = if self.levels[h - 1].ramified { (k.div_ceil(2), k / 2) } else { (k, k) };
        let mut out = self.reduce(h - 1, a, ka);
        out.extend(self.reduce(h - 1, b, kb));
        out
    }

    /// `x / ϖ_h` for `x` of positive valuation.
    pub fn div_unif(&self, h: usize, x: &[i64]) -> Vec<i64> {
        if h == 0 {
            return self.base.div_unif(x);
        }
        let half = self.len(h - 1);
        let (a, b) = x.split_at(half);
        let lv = &self.levels[h - 1];
        if !lv.ramified {
            let mut out = self.div_unif(h - 1, a);
            out.extend(self.div_unif(h - 1, b));
            return out;
        }
        let by_n = |z: &[i64]| self.mul(h - 1, &self.div_unif(h - 1, z), &lv.n_unit_inv);
        let mut first = self.mul(h - 1, b, &lv.n);
        if lv.t.iter().any(|&c| c != 0) {
            first = self.sub(&first, &self.mul(h - 1, a, &lv.t));
        }
        let mut out = by_n(&first);
        out.extend(by_n(a));
        out
    }

    pub fn unif(&self, h: usize) -> Vec<i64> {
        if h == 0 {
            return self.base.unif();
        }
        if self.levels[h - 1].ramified {
            let mut out = self.zero(h - 1);
            out.extend(self.one(h - 1));
            out
        } else {
            self.lift(h - 1, &self.unif(h - 1), h)
        }
    }

    pub fn pow(&self, h: usize, x: &[i64], mut e: u64) -> Vec<i64> {
        let mut r = self.one(h);
        let mut b = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(h, &r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(h, &b, &b);
            }
        }
        r
    }

    /// Inverse of a unit.
    pub fn inv_unit(&self, h: usize, x: &[i64]) -> Vec<i64> {
        if h == 0 {
            return self.pow(0, x, self.base.unit_group_order() - 1);
        }
        let n_inv = self.inv_unit(h - 1, &self.norm_down(h, x));
        self.mul(h, &self.conj(h, x), &self.lift(h - 1, &n_inv, h))
    }

    /// All canonical representatives modulo ϖ_h^k, in a fixed order.
    pub fn enumerate(&self, h: usize, k: usize) -> Vec<Vec<i64>> {
        if h == 0 {
            return self.base.enumerate(k);
        }
        let (ka, kb) = if self.levels[h - 1].ramified { (k.div_ceil(2), k / 2) } else { (k, k) };
        let lo = self.enumerate(h - 1, ka);
        let hi = self.enumerate(h - 1, kb);
        let mut out = Vec::with_capacity(lo.len() * hi.len());
        for b in &hi {
            for a in &lo {
                let mut v = a.clone();
                v.extend(b);
                out.push(v);
            }
        }
        out
    }

    fn is_square_unit(&self, h: usize, x: &[i64]) -> bool {
        let q = self.q(h);
        let y = self.reduce(h, &self.pow(h, x, (q - 1) / 2), 1);
        y == self.reduce(h, &self.one(h), 1)
    }

    /// First unit (in enumeration order) whose residue is a non-square.
    pub fn nonsquare_unit(&self, h: usize) -> Vec<i64> {
        self.enumerate(h, 1)
            .into_iter()
            .find(|x| self.val(h, x) == 0 && !self.is_square_unit(h, x))
            .expect("odd residue characteristic has non-squares")
    }

    /// Residue element of absolute trace one (residue characteristic 2).
    fn trace_one_unit(&self, h: usize) -> Vec<i64> {
        let q = self.q(h);
        let one = self.reduce(h, &self.one(h), 1);
        self.enumerate(h, 1)
            .into_iter()
            .find(|c| {
                let mut s = c.clone();
                let mut y = c.clone();
                let mut k = 2;
                while k < q {
                    y = self.mul(h, &y, &y);
                    s = self.add(&s, &y);
                    k *= 2;
                }
                self.reduce(h, &s, 1) == one
            })
            .expect("trace-one element exists")
    }

    fn push_level(&mut self, ramified: bool, t: Vec<i64>, n: Vec<i64>) {
        let h = self.levels.len();
        let n_unit_inv = if ramified { self.inv_unit(h, &self.div_unif(h, &n)) } else { Vec::new() };
        self.levels.push(Level { ramified, t, n, n_unit_inv });
    }

    /// Adjoin `√d`; the level is ramified iff `d` has odd valuation.
    pub fn push_sqrt(&mut self, d: Vec<i64>) -> Result<()> {
        let h = self.levels.len();
        let v = self.val(h, &d);
        if v > 1 {
            return Err(Error::InvalidSpec("square class must be a unit or a uniformizer times a unit".into()));
        }
        if self.base.p == 2 && v == 0 {
            return Err(Error::InvalidSpec("unramified levels at p = 2 use Artin–Schreier form".into()));
        }
        self.push_level(v == 1, self.zero(h), d);
        Ok(())
    }

    fn push_unramified(&mut self) {
        let h = self.levels.len();
        if self.base.p == 2 {
            let c = self.trace_one_unit(h);
            self.push_level(false, self.one(h), self.neg(&c));
        } else {
            let n = self.nonsquare_unit(h);
            self.push_level(false, self.zero(h), n);
        }
    }
}

/// Finite abelian group `(O/ϖ^n)^×` with a basis and a discrete-log table.
#[derive(Clone, Debug)]
pub struct UnitGroupModel {
    pub gens: Vec<Vec<i64>>,
    pub orders: Vec<u64>,
    table: HashMap<Vec<i64>, Vec<u64>>,
}

impl UnitGroupModel {
    pub fn order(&self) -> u64 {
        self.orders.iter().product()
    }

    pub fn lookup(&self, key: &[i64]) -> Option<&Vec<u64>> {
        self.table.get(key)
    }

    /// All (unit, exponent vector) pairs, sorted by exponent vector.
    pub fn elements(&self) -> Vec<(Vec<i64>, Vec<u64>)> {
        let mut v: Vec<_> = self.table.iter().map(|(k, e)| (k.clone(), e.clone())).collect();
        v.sort_by(|a, b| a.1.cmp(&b.1));
        v
    }
}

/// A field in a tower: level `h`, truncation depth `n`.
#[derive(Clone, Debug)]
pub struct LocalField {
    pub tag: FieldTag,
    pub tower: Arc<Tower>,
    pub h: usize,
    pub depth: usize,
    pub units: UnitGroupModel,
}

impl LocalField {
    pub fn new(tag: FieldTag, tower: Arc<Tower>, h: usize, depth: usize) -> Result<LocalField> {
        let q = tower.q(h);
        let size = (q - 1).saturating_mul(q.saturating_pow(depth as u32 - 1));
        if size > 1 << 17 {
            return Err(Error::TooLarge(format!("unit group of order {size}")));
        }
        let units = build_unit_group(&tower, h, depth)?;
        Ok(LocalField { tag, tower, h, depth, units })
    }

    pub fn q(&self) -> u64 {
        self.tower.q(self.h)
    }

    pub fn p(&self) -> u64 {
        self.tower.base.p as u64
    }

    pub fn mul(&self, x: &[i64], y: &[i64]) -> Vec<i64> {
        self.tower.mul(self.h, x, y)
    }

    pub fn pow(&self, x: &[i64], e: u64) -> Vec<i64> {
        self.tower.pow(self.h, x, e)
    }

    pub fn one(&self) -> Vec<i64> {
        self.tower.one(self.h)
    }

    pub fn unif(&self) -> Vec<i64> {
        self.tower.unif(self.h)
    }

    pub fn val(&self, x: &[i64]) -> usize {
        self.tower.val(self.h, x)
    }

    pub fn key(&self, x: &[i64]) -> Vec<i64> {
        self.tower.reduce(self.h, x, self.depth)
    }

    /// Equal valuation and equal unit parts modulo `U^depth`.
    pub fn eq_trunc(&self, x: &[i64], y: &[i64]) -> bool {
        match (self.split(x), self.split(y)) {
            (Ok((vx, ux)), Ok((vy, uy))) => vx == vy && self.key(&ux) == self.key(&uy),
            (Err(_), Err(_)) => true,
            _ => false,
        }
    }

    pub fn is_zero(&self, x: &[i64]) -> bool {
        self.val(x) >= self.tower.prec(self.h)
    }

    /// Split a nonzero element as `ϖ^v · u`.
    pub fn split(&self, x: &[i64]) -> Result<(i64, Vec<i64>)> {
        let v = self.val(x);
        if v + self.depth + 1 >= self.tower.prec(self.h) {
            return Err(Error::DlogFailure("element is zero at working precision".into()));
        }
        let mut u = x.to_vec();
        for _ in 0..v {
            u = self.tower.div_unif(self.h, &u);
        }
        Ok((v as i64, u))
    }

    pub fn dlog_unit(&self, u: &[i64]) -> Result<Vec<u64>> {
        self.units
            .lookup(&self.key(u))
            .cloned()
            .ok_or_else(|| Error::DlogFailure(format!("{:?} is not a unit of {:?}", u, self.tag)))
    }

    /// Valuation and unit exponents of a nonzero element.
    pub fn dlog(&self, x: &[i64]) -> Result<(i64, Vec<u64>)> {
        let (v, u) = self.split(x)?;
        Ok((v, self.dlog_unit(&u)?))
    }

    pub fn div(&self, x: &[i64], y: &[i64]) -> Result<Vec<i64>> {
        let (vy, uy) = self.split(y)?;
        let (vx, ux) = self.split(x)?;
        if vx < vy {
            return Err(Error::DlogFailure("quotient is not integral".into()));
        }
        let mut q = self.mul(&ux, &self.tower.inv_unit(self.h, &uy));
        for _ in 0..(vx - vy) {
            q = self.mul(&q, &self.unif());
        }
        Ok(q)
    }

    /// Elements ϖ^v·u for v in `0..=max_v` and u running over the units.
    pub fn elements_by_valuation(&self, max_v: usize) -> Vec<Vec<i64>> {
        let units: Vec<Vec<i64>> = self.units.elements().into_iter().map(|(k, _)| k).collect();
        let mut out = Vec::new();
        let mut pv = self.one();
        for _ in 0..=max_v {
            for u in &units {
                out.push(self.mul(&pv, u));
            }
            pv = self.mul(&pv, &self.unif());
        }
        out
    }

    /// The element ∏ g_i^{e_i} (times ϖ^v).
    pub fn from_exponents(&self, v: i64, exps: &[u64]) -> Vec<i64> {
        let mut x = self.pow(&self.unif(), v.max(0) as u64);
        for (g, &e) in self.units.gens.iter().zip(exps) {
            x = self.mul(&x, &self.pow(g, e));
        }
        x
    }

    /// Level j with x^p ∈ U^j, for x ∈ U^i (i ≥ 1).
    pub fn unit_power_level(&self, x: &[i64], i: usize) -> Result<usize> {
        let one = self.one();
        if i == 0 || self.val(&self.tower.sub(x, &one)) < i {
            return Err(Error::NotPrincipalUnit);
        }
        let y = self.pow(x, self.p());
        let j = self.val(&self.tower.sub(&y, &one)).min(self.depth);
        assert!(j >= (i + 1).min(self.depth), "p-th power of a level-{i} unit has level {j}");
        Ok(j)
    }

    pub fn wrap(&self, coords: Vec<i64>) -> TruncatedElem {
        TruncatedElem { tag: self.tag, coords }
    }

    pub fn unwrap<'a>(&self, x: &'a TruncatedElem) -> Result<&'a [i64]> {
        if x.tag != self.tag {
            return Err(Error::WrongField);
        }
        Ok(&x.coords)
    }
}

fn build_unit_group(tower: &Tower, h: usize, n: usize) -> Result<UnitGroupModel> {
    let q = tower.q(h);
    let p = tower.base.p as u64;
    let key = |x: &[i64]| tower.reduce(h, x, n);
    let mul = |x: &[i64], y: &[i64]| key(&tower.mul(h, x, y));
    let pow = |x: &[i64], mut e: u64| {
        let mut r = key(&tower.one(h));
        let mut b = x.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                r = mul(&r, &b);
            }
            e >>= 1;
            if e > 0 {
                b = mul(&b, &b);
            }
        }
        r
    };
    let one = key(&tower.one(h));
    let units: Vec<Vec<i64>> = tower.enumerate(h, n).into_iter().filter(|x| tower.val(h, x) == 0).collect();
    let expected = (q - 1) * q.pow(n as u32 - 1);
    assert_eq!(units.len() as u64, expected);

    let mut gens = Vec::new();
    let mut orders = Vec::new();
    let teich = q.pow(n as u32 - 1);
    let primes = prime_factors(q - 1);
    let zeta = if q > 2 {
        let z = units
            .iter()
            .map(|x| pow(x, teich))
            .find(|y| primes.iter().all(|&r| pow(y, (q - 1) / r) != one))
            .expect("primitive residue exists");
        gens.push(z.clone());
        orders.push(q - 1);
        Some(z)
    } else {
        None
    };

    let one1 = tower.reduce(h, &one, 1);
    let principal: Vec<Vec<i64>> = units.iter().filter(|x| tower.reduce(h, x, 1) == one1).cloned().collect();
    let mut hsub: HashMap<Vec<i64>, Vec<u64>> = HashMap::from([(one.clone(), Vec::new())]);
    let mut basis: Vec<(Vec<i64>, u64)> = Vec::new();
    while hsub.len() < principal.len() {
        let mut best: Option<(u32, &Vec<i64>)> = None;
        for g in &principal {
            if hsub.contains_key(g) {
                continue;
            }
            let mut k = 0;
            let mut y = g.clone();
            while !hsub.contains_key(&y) {
                y = pow(&y, p);
                k += 1;
            }
            if best.is_none_or(|(bk, _)| k > bk) {
                best = Some((k, g));
            }
        }
        let (k, g) = best.expect("principal units not exhausted");
        let pk = p.pow(k);
        let c = &hsub[&pow(g, pk)];
        let mut y = one.clone();
        for ((b, _), &ci) in basis.iter().zip(c) {
            if ci % pk != 0 {
                return Err(Error::DlogFailure("unit group basis correction failed".into()));
            }
            y = mul(&y, &pow(b, ci / pk));
        }
        let y_inv = key(&tower.inv_unit(h, &y));
        let g2 = mul(g, &y_inv);
        let mut next = HashMap::with_capacity(hsub.len() * pk as usize);
        for (hk, ex) in &hsub {
            let mut cur = hk.clone();
            for j in 0..pk {
                let mut e = ex.clone();
                e.push(j);
                next.insert(cur.clone(), e);
                cur = mul(&cur, &g2);
            }
        }
        if next.len() != hsub.len() * pk as usize {
            return Err(Error::DlogFailure("dependent unit group generator".into()));
        }
        hsub = next;
        basis.push((g2, pk));
    }
    for (b, o) in &basis {
        gens.push(b.clone());
        orders.push(*o);
    }
    let mut table = HashMap::with_capacity(units.len());
    match &zeta {
        Some(z) => {
            let mut za = one.clone();
            for a in 0..q - 1 {
                for (u1, ex) in &hsub {
                    let mut e = vec![a];
                    e.extend(ex);
                    table.insert(mul(&za, u1), e);
                }
                za = mul(&za, z);
            }
        }
        None => table = hsub,
    }
    if table.len() as u64 != expected {
        return Err(Error::DlogFailure("unit group decomposition is not complete".into()));
    }
    Ok(UnitGroupModel { gens, orders, table })
}

/// Subgroup of `∏ Z/m_i` generated by `gens` (breadth-first closure).
pub fn subgroup_closure(moduli: &[u64], gens: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    let zero = vec![0u64; moduli.len()];
    let mut seen = HashSet::from([zero.clone()]);
    let mut queue = VecDeque::from([zero]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y: Vec<u64> = x.iter().zip(g).zip(moduli).map(|((a, b), m)| (a + b) % m).collect();
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    seen
}

/// How K/F looks when K/E is a quadratic extension and E/F is quadratic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TowerKind {
    /// Gal(K/F) ≅ (Z/2)²; σ̃ is an involution.
    Biquadratic,
    /// Gal(K/F) ≅ Z/4; σ̃² = τ.
    Cyclic,
    NotGalois,
}

/// A quadratic extension K = E(√D) together with the lift σ̃ of σ.
#[derive(Clone, Debug)]
pub struct KExt {
    pub label: String,
    pub field: LocalField,
    pub kind: TowerKind,
    /// r ∈ E with r² = σ(D)/D; σ̃(a + bδ_K) = σ(a) + σ(b)·r·δ_K.
    pub r: Option<Vec<i64>>,
}

/// The fields of one configuration: F, E, and the three K/E.
#[derive(Clone, Debug)]
pub struct FieldSystem {
    pub spec: FieldSpec,
    pub f: LocalField,
    pub e: LocalField,
    pub ks: Vec<KExt>,
}

fn hensel_sqrt(tower: &Tower, h: usize, w: &[i64]) -> Option<Vec<i64>> {
    if tower.base.p == 2 || tower.val(h, w) != 0 {
        return None;
    }
    let target = tower.reduce(h, w, 1);
    let z0 = tower
        .enumerate(h, 1)
        .into_iter()
        .find(|z| tower.val(h, z) == 0 && tower.reduce(h, &tower.mul(h, z, z), 1) == target)?;
    let two_inv = tower.inv_unit(h, &tower.from_int(h, 2));
    let mut z = z0;
    for _ in 0..tower.prec(h) + 2 {
        let q = tower.mul(h, w, &tower.inv_unit(h, &z));
        z = tower.mul(h, &tower.add(&z, &q), &two_inv);
    }
    Some(z)
}

impl FieldSystem {
    pub fn new(spec: FieldSpec) -> Result<FieldSystem> {
        spec.validate()?;
        let m = spec.depth as usize + 4;
        let base = BaseRing::new(spec.p, spec.f, spec.base_char == BaseChar::Zero, m)?;
        let mut tower = Tower { base, levels: Vec::new() };
        match spec.ext {
            ExtType::Unramified => tower.push_unramified(),
            ExtType::Ramified { twisted } => {
                let d = if twisted {
                    if spec.p == 2 {
                        tower.from_int(0, -1)
                    } else {
                        tower.nonsquare_unit(0)
                    }
                } else {
                    tower.one(0)
                };
                let dp = tower.mul(0, &d, &tower.unif(0));
                let n_unit_inv = tower.inv_unit(0, &d);
                tower.levels.push(Level { ramified: true, t: tower.zero(0), n: dp, n_unit_inv });
            }
        }
        let tower = Arc::new(tower);
        let depth_e = spec.depth as usize;
        let f = LocalField::new(FieldTag::F, tower.clone(), 0, spec.depth_f() as usize)?;
        let e = LocalField::new(FieldTag::E, tower.clone(), 1, depth_e)?;
        let mut ks = Vec::new();
        if spec.p != 2 {
            let eps = {
                let eps_f = tower.nonsquare_unit(0);
                let lifted = tower.lift(0, &eps_f, 1);
                if tower.is_square_unit(1, &lifted) {
                    tower.nonsquare_unit(1)
                } else {
                    lifted
                }
            };
            let pi = tower.unif(1);
            let candidates = [("unram", eps.clone()), ("ram", pi.clone()), ("ram-twisted", tower.mul(1, &eps, &pi))];
            for (i, (label, d)) in candidates.into_iter().enumerate() {
                ks.push(Self::build_k(&tower, i as u8, label, d, depth_e)?);
            }
        }
        Ok(FieldSystem { spec, f, e, ks })
    }

    fn build_k(tower: &Arc<Tower>, idx: u8, label: &str, d: Vec<i64>, depth_e: usize) -> Result<KExt> {
        let mut kt = (**tower).clone();
        kt.push_sqrt(d.clone())?;
        let ramified = kt.levels[1].ramified;
        let depth_k = if ramified { 2 * depth_e } else { depth_e };
        let ratio = {
            let sd = tower.conj(1, &d);
            let (vd, ud) = (tower.val(1, &d), d.clone());
            let mut num = sd;
            let mut den = ud;
            for _ in 0..vd {
                num = tower.div_unif(1, &num);
                den = tower.div_unif(1, &den);
            }
            tower.mul(1, &num, &tower.inv_unit(1, &den))
        };
        let r = hensel_sqrt(tower, 1, &ratio);
        let kind = match &r {
            None => TowerKind::NotGalois,
            Some(r) => {
                let nr = tower.norm_down(1, r);
                if tower.reduce(0, &nr, 1) == tower.reduce(0, &tower.one(0), 1) {
                    TowerKind::Biquadratic
                } else {
                    TowerKind::Cyclic
                }
            }
        };
        let field = LocalField::new(FieldTag::K(idx), Arc::new(kt), 2, depth_k)?;
        Ok(KExt { label: label.to_string(), field, kind, r })
    }

    pub fn k(&self, idx: u8) -> &KExt {
        &self.ks[idx as usize]
    }

    pub fn field(&self, tag: FieldTag) -> &LocalField {
        match tag {
            FieldTag::F => &self.f,
            FieldTag::E => &self.e,
            FieldTag::K(i) => &self.ks[i as usize].field,
        }
    }

    /// σ on E.
    pub fn sigma(&self, x: &[i64]) -> Vec<i64> {
        self.e.tower.conj(1, x)
    }

    pub fn sigma_elem(&self, x: &TruncatedElem) -> Result<TruncatedElem> {
        Ok(self.e.wrap(self.sigma(self.e.unwrap(x)?)))
    }

    /// N_{E/F}.
    pub fn norm(&self, x: &[i64]) -> Vec<i64> {
        self.e.tower.norm_down(1, x)
    }

    pub fn norm_elem(&self, x: &TruncatedElem) -> Result<TruncatedElem> {
        Ok(self.f.wrap(self.norm(self.e.unwrap(x)?)))
    }

    pub fn f_to_e(&self, x: &[i64]) -> Vec<i64> {
        self.e.tower.lift(0, x, 1)
    }

    /// The F-coordinates of an element of E fixed by σ.
    pub fn e_to_f(&self, x: &[i64]) -> Vec<i64> {
        x[..self.e.tower.len(0)].to_vec()
    }

    /// τ: the automorphism of K over E.
    pub fn tau(&self, k: &KExt, x: &[i64]) -> Vec<i64> {
        k.field.tower.conj(2, x)
    }

    /// σ̃: the chosen extension of σ to K.
    pub fn sigma_k(&self, k: &KExt, x: &[i64]) -> Result<Vec<i64>> {
        let r = k.r.as_ref().ok_or_else(|| Error::UnsupportedTower(format!("K = {} is not Galois over F", k.label)))?;
        let t = &k.field.tower;
        let half = t.len(1);
        let (a, b) = x.split_at(half);
        let mut out = t.conj(1, a);
        out.extend(t.mul(1, &t.conj(1, b), r));
        Ok(out)
    }

    pub fn norm_k(&self, k: &KExt, x: &[i64]) -> Vec<i64> {
        k.field.tower.norm_down(2, x)
    }

    pub fn e_to_k(&self, k: &KExt, x: &[i64]) -> Vec<i64> {
        k.field.tower.lift(1, x, 2)
    }

    /// Elements of ker N_{E/F} on the truncated E^×, and a generating set.
    pub fn norm_one_subgroup(&self) -> (Vec<Vec<i64>>, Vec<Vec<i64>>) {
        let one_f = self.f.key(&self.f.one());
        let members: Vec<(Vec<i64>, Vec<u64>)> =
            self.e.units.elements().into_iter().filter(|(u, _)| self.f.key(&self.norm(u)) == one_f).collect();
        let moduli = self.e.units.orders.clone();
        let mut gens: Vec<Vec<u64>> = Vec::new();
        let mut span = subgroup_closure(&moduli, &gens);
        for (_, ex) in &members {
            if !span.contains(ex) {
                gens.push(ex.clone());
                span = subgroup_closure(&moduli, &gens);
            }
        }
        let gen_elems = gens.iter().map(|ex| self.e.from_exponents(0, ex)).collect();
        (members.into_iter().map(|(u, _)| u).collect(), gen_elems)
    }

    /// `{σ(y)/y}` over the truncated E^×, as unit keys.
    pub fn hilbert90_image(&self) -> HashSet<Vec<i64>> {
        let mut out = HashSet::new();
        for y in self.e.elements_by_valuation(1) {
            let q = self.e.div(&self.sigma(&y), &y).expect("σ preserves valuation");
            out.insert(self.e.key(&q));
        }
        out
    }

    /// Index of the image of `norm_gens` in M^×/(ϖ^{v_mod}, U^n).
    pub fn norm_index(m: &LocalField, norm_images: &[Vec<i64>], v_mod: u64) -> Result<u64> {
        let mut moduli = vec![v_mod];
        moduli.extend(&m.units.orders);
        let gens: Vec<Vec<u64>> = norm_images
            .iter()
            .map(|x| {
                let (v, ex) = m.dlog(x)?;
                let mut g = vec![v as u64 % v_mod];
                g.extend(ex);
                Ok(g)
            })
            .collect::<Result<_>>()?;
        let total: u64 = moduli.iter().product();
        Ok(total / subgroup_closure(&moduli, &gens).len() as u64)
    }

    /// Generators of E^× (uniformizer first, then the unit basis).
    pub fn generators(field: &LocalField) -> Vec<Vec<i64>> {
        let mut g = vec![field.unif()];
        g.extend(field.units.gens.iter().cloned());
        g
    }

    /// [F^× : N(E^×)] in the truncated model.
    pub fn norm_index_ef(&self) -> Result<u64> {
        let imgs: Vec<Vec<i64>> = Self::generators(&self.e).iter().map(|g| self.norm(g)).collect();
        Self::norm_index(&self.f, &imgs, 2)
    }

    /// Witness (m, s) with ϖ_K^m ∈ ϖ_F^s · U_K^N, searched up to `bound`.
    ///
    /// Works with the unit u = ϖ_K^e / ϖ_F, so that the search is over the
    /// powers of u and never leaves the working precision.
    pub fn varpi_witness(&self, k: &KExt, level: usize, bound: usize) -> Option<(usize, usize)> {
        let kf = &k.field;
        let e_kf = kf.tower.e(2);
        let pf = kf.tower.lift(0, &kf.tower.unif(0), 2);
        let (vl, ul) = kf.split(&kf.pow(&kf.unif(), e_kf as u64)).ok()?;
        let (vr, ur) = kf.split(&pf).ok()?;
        debug_assert_eq!(vl, vr);
        let u = kf.mul(&ul, &kf.tower.inv_unit(2, &ur));
        let mut us = kf.one();
        for s in 1..=bound {
            us = kf.mul(&us, &u);
            let d = kf.tower.sub(&us, &kf.one());
            if kf.val(&d) >= level {
                return Some((e_kf * s, s));
            }
        }
        None
    }
}

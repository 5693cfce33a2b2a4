//! Arithmetic in the algebraic closure of F_ℓ.
//!
//! Two encodings live side by side. [`RootOfUnity`] stores a nonzero element
//! abstractly as a fraction `num/den` mod 1 with `den` prime to ℓ; it is the
//! value group of every character in the crate. [`Fq`] is a concrete field
//! `F_{ℓ^d}` with exp/log tables, used whenever sums are needed (intertwiners,
//! bilinear forms, monodromy matrices).

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest field size for which exp/log tables are built.
pub const TABLE_LIMIT: u64 = 1 << 20;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % m as u128) as u64;
        }
        b = ((b as u128 * b as u128) % m as u128) as u64;
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inv(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// The largest divisor of `n` prime to `ell`.
pub fn prime_to_part(mut n: u64, ell: u64) -> u64 {
    while n > 0 && n % ell == 0 {
        n /= ell;
    }
    n
}

/// Multiplicative order of `a` modulo `m` (`a` a unit).
pub fn mult_order(a: u64, m: u64) -> u64 {
    let mut k = 1;
    let mut x = a % m;
    while x != 1 % m {
        x = x * a % m;
        k += 1;
    }
    k
}

/// A root of unity in F̄_ℓ, written additively as `num/den` in Q/Z.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity { num: 0, den: 1 };
    pub const MINUS_ONE: RootOfUnity = RootOfUnity { num: 1, den: 2 };

    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let n = num.rem_euclid(den as i64) as u64;
        let g = gcd(n, den);
        if n == 0 {
            return Self::ONE;
        }
        RootOfUnity { num: n / g, den: den / g }
    }

    /// Like [`new`](Self::new) but rejects orders divisible by `ell`.
    pub fn checked(num: i64, den: u64, ell: u64) -> Result<Self> {
        let z = Self::new(num, den);
        if z.den % ell == 0 {
            return Err(Error::OrderNotEmbeddable { den: z.den, ell, d: 0 });
        }
        Ok(z)
    }

    pub fn num(self) -> u64 {
        self.num
    }

    pub fn den(self) -> u64 {
        self.den
    }

    pub fn order(self) -> u64 {
        self.den
    }

    pub fn is_one(self) -> bool {
        self.num == 0
    }

    pub fn mul(self, other: Self) -> Self {
        let den = lcm(self.den, other.den);
        let n = self.num * (den / self.den) + other.num * (den / other.den);
        Self::new(n as i64, den)
    }

    pub fn inv(self) -> Self {
        Self::new(-(self.num as i64), self.den)
    }

    pub fn div(self, other: Self) -> Self {
        self.mul(other.inv())
    }

    pub fn pow(self, k: i64) -> Self {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Self::new(n as i64, self.den)
    }

    /// All `n`-th roots of `self` whose order is prime to `ell`.
    pub fn roots(self, n: u64, ell: u64) -> Vec<Self> {
        let mut out: Vec<Self> = (0..n)
            .map(|j| Self::new((self.num + j * self.den) as i64, self.den * n))
            .filter(|z| z.den % ell != 0)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn ru_mul(a: RootOfUnity, b: RootOfUnity) -> RootOfUnity {
    a.mul(b)
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RootOfUnity {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (a, b) = s.trim().split_once('/').ok_or_else(|| format!("expected num/den, got {s:?}"))?;
        let num: i64 = a.trim().parse().map_err(|_| format!("bad numerator {a:?}"))?;
        let den: u64 = b.trim().parse().map_err(|_| format!("bad denominator {b:?}"))?;
        if den == 0 {
            return Err("zero denominator".into());
        }
        Ok(Self::new(num, den))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Position of `q` relative to ±1 modulo ℓ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CongruenceClass {
    OneMod,
    MinusOneMod,
    Banal,
}

pub fn q_mod_ell_class(q: u64, ell: u64) -> Result<CongruenceClass> {
    if q % ell == 0 {
        return Err(Error::EllDividesQ { ell, q });
    }
    Ok(match q % ell {
        1 => CongruenceClass::OneMod,
        r if r == ell - 1 => CongruenceClass::MinusOneMod,
        _ => CongruenceClass::Banal,
    })
}

/// An element of a concrete field, encoded as `Σ c_i ℓ^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Ff(pub u32);

/// The field `F_{ℓ^d}`.
///
/// The modulus is the monic irreducible of degree `d` with the least code,
/// and the generator `g` is the least primitive element compatible with the
/// generators of every subfield: `g^((ℓ^d-1)/(ℓ^e-1))` has the same minimal
/// polynomial as the generator of `F_{ℓ^e}` for each proper divisor `e`.
pub struct Fq {
    ell: u32,
    d: u32,
    size: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    minpoly: Vec<u32>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.ell, self.d, self.modulus)
    }
}

type Poly = Vec<u32>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn poly_rem(mut a: Poly, m: &[u32], ell: u32) -> Poly {
    let dm = m.len() - 1;
    let lead_inv = mod_inv(m[dm] as i64, ell as i64).unwrap() as u64;
    a = trim(a);
    while a.len() > dm {
        let top = a.len() - 1;
        let c = (a[top] as u64 * lead_inv) % ell as u64;
        for (i, &mi) in m.iter().enumerate() {
            let j = top - dm + i;
            a[j] = ((a[j] as u64 + (ell as u64 - c) * mi as u64) % ell as u64) as u32;
        }
        a = trim(a);
    }
    a
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], ell: u32) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x as u64 * y as u64;
        }
    }
    let out: Poly = out.into_iter().map(|c| (c % ell as u64) as u32).collect();
    poly_rem(out, m, ell)
}

fn poly_powmod(base: &[u32], mut e: u64, m: &[u32], ell: u32) -> Poly {
    let mut r = vec![1u32];
    let mut b = poly_rem(base.to_vec(), m, ell);
    while e > 0 {
        if e & 1 == 1 {
            r = poly_mulmod(&r, &b, m, ell);
        }
        b = poly_mulmod(&b, &b, m, ell);
        e >>= 1;
    }
    r
}

fn poly_sub(a: &[u32], b: &[u32], ell: u32) -> Poly {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = *a.get(i).unwrap_or(&0);
            let y = *b.get(i).unwrap_or(&0);
            (x + ell - y) % ell
        })
        .collect();
    trim(out)
}

fn poly_gcd(mut a: Poly, mut b: Poly, ell: u32) -> Poly {
    a = trim(a);
    b = trim(b);
    while !b.is_empty() {
        let r = poly_rem(a, &b, ell);
        a = b;
        b = r;
    }
    a
}

fn is_irreducible(f: &[u32], ell: u32) -> bool {
    let d = f.len() - 1;
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=d / 2 {
        xp = poly_powmod(&xp, ell as u64, f, ell);
        let g = poly_gcd(f.to_vec(), poly_sub(&xp, &x, ell), ell);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn digits(mut code: u64, ell: u32, d: u32) -> Poly {
    let mut out = Vec::with_capacity(d as usize);
    for _ in 0..d {
        out.push((code % ell as u64) as u32);
        code /= ell as u64;
    }
    trim(out)
}

fn undigits(p: &[u32], ell: u32) -> u32 {
    p.iter().rev().fold(0u32, |acc, &c| acc * ell + c)
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|k| n % k == 0).collect()
}

static FIELDS: OnceLock<Mutex<HashMap<(u32, u32), Arc<Fq>>>> = OnceLock::new();

impl Fq {
    /// The shared handle for `F_{ℓ^d}`, built on first use.
    pub fn get(ell: u64, d: u32) -> Result<Arc<Fq>> {
        let size = (ell as u128).checked_pow(d).unwrap_or(u128::MAX);
        if size > TABLE_LIMIT as u128 {
            return Err(Error::TooLarge(format!("F_{ell}^{d} exceeds the table limit")));
        }
        let key = (ell as u32, d);
        let cache = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let subfields: Vec<Arc<Fq>> =
            divisors(d).into_iter().filter(|&e| e < d).map(|e| Fq::get(ell, e)).collect::<Result<_>>()?;
        let field = Arc::new(Fq::build(ell as u32, d, &subfields));
        let mut guard = cache.lock().unwrap();
        Ok(guard.entry(key).or_insert(field).clone())
    }

    /// Smallest field containing roots of unity of every listed order.
    pub fn for_orders(ell: u64, orders: impl IntoIterator<Item = u64>) -> Result<Arc<Fq>> {
        let m = orders.into_iter().fold(1u64, lcm);
        if m % ell == 0 {
            return Err(Error::OrderNotEmbeddable { den: m, ell, d: 0 });
        }
        let d = mult_order(ell % m.max(2), m.max(2)) as u32;
        let d = if m <= 2 { 1 } else { d };
        Fq::get(ell, d)
    }

    fn build(ell: u32, d: u32, subfields: &[Arc<Fq>]) -> Fq {
        let size = ell.pow(d);
        let modulus = (0..size)
            .map(|c| {
                let mut f = digits(c as u64, ell, d);
                f.resize(d as usize, 0);
                f.push(1);
                f
            })
            .find(|f| is_irreducible(f, ell))
            .expect("irreducible polynomial exists");
        let order = (size - 1) as u64;
        let primes = prime_factors(order);
        let h = (1..size)
            .map(|c| digits(c as u64, ell, d))
            .find(|h| primes.iter().all(|&r| poly_powmod(h, order / r, &modulus, ell) != vec![1]))
            .expect("primitive element exists");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; size as usize];
        let mut cur = vec![1u32];
        for k in 0..order {
            let code = undigits(&cur, ell);
            exp.push(code);
            log[code as usize] = k as u32;
            cur = poly_mulmod(&cur, &h, &modulus, ell);
        }
        let mut field = Fq { ell, d, size, modulus, exp, log, minpoly: Vec::new() };
        let g = (1..size)
            .map(Ff)
            .find(|&g| {
                gcd(field.log[g.0 as usize] as u64, order) == 1
                    && subfields.iter().all(|sub| {
                        let y = field.pow(g, order / (sub.size as u64 - 1));
                        field.eval_base_poly(&sub.minpoly, y) == Ff(0)
                    })
            })
            .expect("compatible generator exists");
        let lg = field.log[g.0 as usize] as u64;
        let lg_inv = mod_inv(lg as i64, order as i64).unwrap() as u64;
        let old_exp = field.exp.clone();
        for k in 0..order {
            field.exp[k as usize] = old_exp[((k * lg) % order) as usize];
        }
        for x in 1..size {
            let l = field.log[x as usize] as u64;
            field.log[x as usize] = ((l * lg_inv) % order) as u32;
        }
        field.minpoly = field.min_poly(field.generator());
        field
    }

    fn eval_base_poly(&self, coeffs: &[u32], x: Ff) -> Ff {
        coeffs.iter().rev().fold(Ff(0), |acc, &c| self.add(self.mul(acc, x), Ff(c)))
    }

    /// Minimal polynomial over F_ℓ, low degree first, monic.
    fn min_poly(&self, x: Ff) -> Vec<u32> {
        let mut conj = vec![x];
        loop {
            let y = self.pow(*conj.last().unwrap(), self.ell as u64);
            if y == x {
                break;
            }
            conj.push(y);
        }
        let mut poly = vec![self.one()];
        for c in conj {
            let mut next = vec![Ff(0); poly.len() + 1];
            for (i, &a) in poly.iter().enumerate() {
                next[i + 1] = self.add(next[i + 1], a);
                next[i] = self.sub(next[i], self.mul(a, c));
            }
            poly = next;
        }
        poly.into_iter()
            .map(|c| {
                assert!(c.0 < self.ell, "minimal polynomial must have prime-field coefficients");
                c.0
            })
            .collect()
    }

    pub fn ell(&self) -> u64 {
        self.ell as u64
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    pub fn size(&self) -> u64 {
        self.size as u64
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> Ff {
        Ff(self.exp[1 % self.exp.len()])
    }

    pub fn zero(&self) -> Ff {
        Ff(0)
    }

    pub fn one(&self) -> Ff {
        Ff(1)
    }

    pub fn from_int(&self, n: i64) -> Ff {
        Ff(n.rem_euclid(self.ell as i64) as u32)
    }

    pub fn coeffs(&self, x: Ff) -> Vec<u32> {
        let mut c = digits(x.0 as u64, self.ell, self.d);
        c.resize(self.d as usize, 0);
        c
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Ff {
        Ff(undigits(&c.iter().map(|&x| x % self.ell).collect::<Vec<_>>(), self.ell))
    }

    pub fn add(&self, a: Ff, b: Ff) -> Ff {
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        let l = self.ell;
        while x > 0 || y > 0 {
            out += ((x % l + y % l) % l) * place;
            x /= l;
            y /= l;
            place = place.wrapping_mul(l);
        }
        Ff(out)
    }

    pub fn neg(&self, a: Ff) -> Ff {
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        let l = self.ell;
        while x > 0 {
            out += ((l - x % l) % l) * place;
            x /= l;
            place = place.wrapping_mul(l);
        }
        Ff(out)
    }

    pub fn sub(&self, a: Ff, b: Ff) -> Ff {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Ff, b: Ff) -> Ff {
        if a.0 == 0 || b.0 == 0 {
            return Ff(0);
        }
        let n = self.size - 1;
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n as u64;
        Ff(self.exp[k as usize])
    }

    pub fn inv(&self, a: Ff) -> Result<Ff> {
        if a.0 == 0 {
            return Err(Error::ZeroElement);
        }
        let n = self.size - 1;
        Ok(Ff(self.exp[((n - self.log[a.0 as usize]) % n) as usize]))
    }

    pub fn pow(&self, a: Ff, e: u64) -> Ff {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return Ff(0);
        }
        let n = (self.size - 1) as u64;
        Ff(self.exp[((self.log[a.0 as usize] as u64 * (e % n)) % n) as usize])
    }

    /// `g^(num·(ℓ^d−1)/den)`.
    pub fn embed_root(&self, z: RootOfUnity) -> Result<Ff> {
        let n = (self.size - 1) as u64;
        if n % z.den() != 0 {
            return Err(Error::OrderNotEmbeddable { den: z.den(), ell: self.ell as u64, d: self.d });
        }
        Ok(Ff(self.exp[(z.num() * (n / z.den()) % n) as usize]))
    }

    pub fn dlog(&self, x: Ff) -> Result<RootOfUnity> {
        if x.0 == 0 {
            return Err(Error::ZeroElement);
        }
        Ok(RootOfUnity::new(self.log[x.0 as usize] as i64, (self.size - 1) as u64))
    }

    /// Image of `x ∈ sub` under the inclusion matching generators.
    pub fn embed_from(&self, sub: &Fq, x: Ff) -> Result<Ff> {
        if sub.ell != self.ell || self.d % sub.d != 0 {
            return Err(Error::WrongField);
        }
        if x.0 == 0 {
            return Ok(Ff(0));
        }
        self.embed_root(sub.dlog(x)?)
    }
}

/// A square root of `x` in `fq`, if one exists there.
pub fn half_root_ff(fq: &Fq, x: Ff) -> Result<Option<Ff>> {
    if x.0 == 0 {
        return Ok(Some(x));
    }
    let z = fq.dlog(x)?;
    Ok(z.roots(2, fq.ell()).into_iter().find_map(|r| fq.embed_root(r).ok()))
}

pub fn embed_root(z: RootOfUnity, ell: u64, d: u32) -> Result<Ff> {
    Fq::get(ell, d)?.embed_root(z)
}

/// Square matrix over a concrete field, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat {
    pub n: usize,
    pub a: Vec<Ff>,
}

impl Mat {
    pub fn zero(n: usize) -> Mat {
        Mat { n, a: vec![Ff(0); n * n] }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zero(n);
        for i in 0..n {
            m.a[i * n + i] = Ff(1);
        }
        m
    }

    pub fn from_rows(rows: &[&[Ff]]) -> Mat {
        let n = rows.len();
        Mat { n, a: rows.iter().flat_map(|r| r.iter().copied()).collect() }
    }

    pub fn get(&self, i: usize, j: usize) -> Ff {
        self.a[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Ff) {
        self.a[i * self.n + j] = v;
    }

    pub fn mul(&self, fq: &Fq, o: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut s = Ff(0);
                for k in 0..n {
                    s = fq.add(s, fq.mul(self.get(i, k), o.get(k, j)));
                }
                out.set(i, j, s);
            }
        }
        out
    }

    pub fn add(&self, fq: &Fq, o: &Mat) -> Mat {
        Mat { n: self.n, a: self.a.iter().zip(&o.a).map(|(&x, &y)| fq.add(x, y)).collect() }
    }

    pub fn scale(&self, fq: &Fq, c: Ff) -> Mat {
        Mat { n: self.n, a: self.a.iter().map(|&x| fq.mul(c, x)).collect() }
    }

    pub fn transpose(&self) -> Mat {
        let mut out = Mat::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i));
            }
        }
        out
    }

    pub fn trace(&self, fq: &Fq) -> Ff {
        (0..self.n).fold(Ff(0), |s, i| fq.add(s, self.get(i, i)))
    }

    pub fn det(&self, fq: &Fq) -> Ff {
        match self.n {
            0 => Ff(1),
            1 => self.a[0],
            2 => fq.sub(fq.mul(self.a[0], self.a[3]), fq.mul(self.a[1], self.a[2])),
            _ => panic!("determinant only for n <= 2"),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(|x| x.0 == 0)
    }
}

/// Basis of the solution space of `rows · x = 0`.
pub fn nullspace(fq: &Fq, rows: &[Vec<Ff>], ncols: usize) -> Vec<Vec<Ff>> {
    let mut m: Vec<Vec<Ff>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c].0 != 0) else { continue };
        m.swap(r, p);
        let inv = fq.inv(m[r][c]).unwrap();
        for x in m[r].iter_mut() {
            *x = fq.mul(*x, inv);
        }
        for i in 0..m.len() {
            if i != r && m[i][c].0 != 0 {
                let f = m[i][c];
                for j in 0..ncols {
                    let v = fq.mul(f, m[r][j]);
                    m[i][j] = fq.sub(m[i][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Ff(0); ncols];
            v[fc] = Ff(1);
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = fq.neg(m[i][fc]);
            }
            v
        })
        .collect()
}

/// An invertible member of the span of `basis` (n×n matrices), if any.
///
/// For n = 2 the determinant restricted to the span is a quadratic form;
/// over a field with more than two elements it vanishes identically iff all
/// its coefficients do, and a nonzero coefficient points at a witness.
pub fn invertible_in_span(fq: &Fq, basis: &[Mat]) -> Option<Mat> {
    let nz = |m: &Mat| m.det(fq).0 != 0;
    if let Some(b) = basis.iter().find(|b| nz(b)) {
        return Some(b.clone());
    }
    for i in 0..basis.len() {
        for j in i + 1..basis.len() {
            let s = basis[i].add(fq, &basis[j]);
            if nz(&s) {
                return Some(s);
            }
        }
    }
    None
}

/// Whether the determinant vanishes identically on the span.
pub fn det_identically_zero(fq: &Fq, basis: &[Mat]) -> bool {
    invertible_in_span(fq, basis).is_none()
}

/// Whether the span contains a nonzero singular matrix (n = 2).
pub fn singular_nonzero_in_span(fq: &Fq, basis: &[Mat]) -> bool {
    match basis.len() {
        0 => false,
        1 => basis[0].det(fq).0 == 0,
        _ => true,
    }
}

/// Linear map `X ↦ P X Q` as a row block acting on vec(X) (row-major).
pub fn sandwich_rows(fq: &Fq, p: &Mat, q: &Mat) -> Vec<Vec<Ff>> {
    let n = p.n;
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Ff(0); n * n];
            for k in 0..n {
                for l in 0..n {
                    row[k * n + l] = fq.mul(p.get(i, k), q.get(l, j));
                }
            }
            rows.push(row);
        }
    }
    rows
}

pub fn sub_rows(fq: &Fq, a: &[Vec<Ff>], b: &[Vec<Ff>]) -> Vec<Vec<Ff>> {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(&u, &v)| fq.sub(u, v)).collect()).collect()
}

pub fn vec_to_mat(n: usize, v: &[Ff]) -> Mat {
    Mat { n, a: v.to_vec() }
}

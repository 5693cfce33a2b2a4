//! Two-dimensional semisimple representations of truncated relative Weil
//! groups.
//!
//! `W_{L/M}` is modeled as pairs `(x, ε)` with `x ∈ L^×` (truncated) and
//! `ε ∈ {0,1}`, where `(1,1) = s` acts on `L^×` by the Galois involution and
//! `s² = t` is a fixed non-norm of `M^×`. Every representation here is
//! monomial on generators, so matrices are stored as roots of unity and
//! only enter a finite field for linear algebra.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::characters::{Setting, SmoothCharacter};
use crate::error::{Error, Result};
use crate::localfield::{subgroup_closure, FieldSystem, FieldTag, LocalField, TowerKind};
use crate::scalars::{invertible_in_span, nullspace, sandwich_rows, sub_rows, vec_to_mat, Ff, Fq, Mat, RootOfUnity};

const MINUS_ONE: RootOfUnity = RootOfUnity::MINUS_ONE;

/// A monomial matrix with root-of-unity entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonoMat {
    pub n: usize,
    pub entries: Vec<Option<RootOfUnity>>,
}

impl MonoMat {
    pub fn identity(n: usize) -> MonoMat {
        Self::diag(&vec![RootOfUnity::ONE; n])
    }

    pub fn diag(d: &[RootOfUnity]) -> MonoMat {
        let n = d.len();
        let mut entries = vec![None; n * n];
        for (i, &v) in d.iter().enumerate() {
            entries[i * n + i] = Some(v);
        }
        MonoMat { n, entries }
    }

    /// `[[0, a], [b, 0]]`.
    pub fn anti(a: RootOfUnity, b: RootOfUnity) -> MonoMat {
        MonoMat { n: 2, entries: vec![None, Some(a), Some(b), None] }
    }

    pub fn get(&self, i: usize, j: usize) -> Option<RootOfUnity> {
        self.entries[i * self.n + j]
    }

    pub fn mul(&self, o: &MonoMat) -> MonoMat {
        let n = self.n;
        let mut entries = vec![None; n * n];
        for i in 0..n {
            for j in 0..n {
                let terms: Vec<RootOfUnity> = (0..n).filter_map(|k| Some(self.get(i, k)?.mul(o.get(k, j)?))).collect();
                assert!(terms.len() <= 1, "product of monomial matrices is monomial");
                entries[i * n + j] = terms.first().copied();
            }
        }
        MonoMat { n, entries }
    }

    pub fn scale(&self, c: RootOfUnity) -> MonoMat {
        MonoMat { n: self.n, entries: self.entries.iter().map(|e| e.map(|v| v.mul(c))).collect() }
    }

    pub fn det(&self) -> RootOfUnity {
        match self.n {
            1 => self.entries[0].expect("invertible"),
            _ => match (self.get(0, 0), self.get(1, 1), self.get(0, 1), self.get(1, 0)) {
                (Some(a), Some(d), None, None) => a.mul(d),
                (None, None, Some(b), Some(c)) => MINUS_ONE.mul(b).mul(c),
                _ => panic!("monomial matrix is singular"),
            },
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_none()))
    }

    pub fn orders(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().flatten().map(|v| v.den())
    }

    pub fn to_mat(&self, fq: &Fq) -> Result<Mat> {
        let mut m = Mat::zero(self.n);
        for (k, e) in self.entries.iter().enumerate() {
            if let Some(v) = e {
                m.a[k] = fq.embed_root(*v)?;
            }
        }
        Ok(m)
    }
}

/// The group a representation lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum WeilDomain {
    /// W_E through its abelianization E^×.
    E,
    /// W_{E/F}.
    EF,
    /// W_{K/E} for the K with this index.
    KE(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WeilRep2 {
    /// Characters of the base field (E for `E`/`KE`, F for `EF`).
    Sum { domain: WeilDomain, chi1: SmoothCharacter, chi2: SmoothCharacter },
    /// Induced from a character of the top field (E for `EF`, K for `KE`).
    Induced { domain: WeilDomain, theta: SmoothCharacter },
}

impl WeilRep2 {
    pub fn domain(&self) -> WeilDomain {
        match self {
            WeilRep2::Sum { domain, .. } | WeilRep2::Induced { domain, .. } => *domain,
        }
    }

    pub fn sum(domain: WeilDomain, chi1: SmoothCharacter, chi2: SmoothCharacter) -> WeilRep2 {
        WeilRep2::Sum { domain, chi1, chi2 }
    }

    pub fn characters(&self) -> Vec<&SmoothCharacter> {
        match self {
            WeilRep2::Sum { chi1, chi2, .. } => vec![chi1, chi2],
            WeilRep2::Induced { theta, .. } => vec![theta],
        }
    }
}

/// An element `x·s^ε` of a relative Weil group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeilElem {
    pub x: Vec<i64>,
    pub eps: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DualSign {
    ConjugateOrthogonal,
    ConjugateSymplectic,
    Both,
    Neither,
}

/// Galois data of `W_{K/F}` when K/F is Galois.
#[derive(Clone, Debug)]
pub enum KGalois {
    /// `s' x s'^{-1} = σ̃(x)`, `s'² = t'`, `s' s_E s'^{-1} = c·s_E`.
    Biquadratic {
        t_prime: Vec<i64>,
        c: Vec<i64>,
    },
    /// `g x g^{-1} = σ̃(x)`, `g² = s_E`, `g⁴ = t_E ∈ F`.
    Cyclic,
    NotGalois,
}

/// `W_{K/E}` data for one K.
#[derive(Clone, Debug)]
pub struct KWeil {
    pub idx: u8,
    /// ω_{K/E} as a character of E^×.
    pub omega_ke: SmoothCharacter,
    /// `s_E² = t_E`, a non-norm of E^× (in K coordinates).
    pub t_e: Vec<i64>,
    pub galois: KGalois,
}

impl KWeil {
    pub fn build(s: &Setting, idx: u8) -> Result<KWeil> {
        let sys = &s.sys;
        let k = sys.k(idx);
        let kf = &k.field;
        let norm_imgs: Vec<Vec<i64>> = FieldSystem::generators(kf).iter().map(|g| sys.norm_k(k, g)).collect();
        let omega_ke = s.quadratic_norm_character(&sys.e, &norm_imgs)?;
        let mut galois = match k.kind {
            TowerKind::Biquadratic => KGalois::Biquadratic { t_prime: vec![], c: vec![] },
            TowerKind::Cyclic => KGalois::Cyclic,
            TowerKind::NotGalois => KGalois::NotGalois,
        };
        let t_e_in_e = if k.kind == TowerKind::Cyclic {
            // α of order 4 in F^×/N_{K/F}(K^×).
            let f = &sys.f;
            let mut moduli = vec![4u64];
            moduli.extend(&f.units.orders);
            let exps = |x: &[i64]| -> Result<Vec<u64>> {
                let (v, ex) = f.dlog(x)?;
                let mut g = vec![v as u64 % 4];
                g.extend(ex);
                Ok(g)
            };
            // N_{K/F} = N_{E/F} ∘ N_{K/E}, split in E first to keep valuations small.
            let pi_e = exps(&sys.norm(&sys.e.unif()))?;
            let mut gens = Vec::new();
            for y in &norm_imgs {
                let (v, u) = sys.e.split(y)?;
                let nu = exps(&sys.norm(&u))?;
                gens.push(
                    pi_e.iter().zip(&nu).zip(&moduli).map(|((a, b), m)| (a * v as u64 + b) % m).collect::<Vec<u64>>(),
                );
            }
            let h = subgroup_closure(&moduli, &gens);
            let alpha = f
                .elements_by_valuation(1)
                .into_iter()
                .find(|a| {
                    let g = exps(a).expect("nonzero");
                    let g2: Vec<u64> = g.iter().zip(&moduli).map(|(x, m)| 2 * x % m).collect();
                    !h.contains(&g2)
                })
                .ok_or_else(|| Error::UnsupportedTower("no element of order 4 modulo norms".into()))?;
            sys.f_to_e(&alpha)
        } else {
            sys.e
                .elements_by_valuation(1)
                .into_iter()
                .find(|x| s.eval(&omega_ke, x).map(|v| v == MINUS_ONE).unwrap_or(false))
                .expect("a non-norm exists")
        };
        let t_e = sys.e_to_k(k, &t_e_in_e);
        if let KGalois::Biquadratic { t_prime, c } = &mut galois {
            // t' ∈ K' = K^{σ̃} with ω_{E/F}(N_{K'/F} t') = −1.
            let mut found = None;
            for y in kf.elements_by_valuation(1) {
                let z = kf.tower.add(&y, &sys.sigma_k(k, &y)?);
                if kf.split(&z).is_err() {
                    continue;
                }
                let n = kf.mul(&z, &sys.tau(k, &z));
                let nf = k_to_f(sys, &n);
                if s.eval(&s.omega, &nf)? == MINUS_ONE {
                    found = Some(z);
                    break;
                }
            }
            let tp = found.ok_or_else(|| Error::UnsupportedTower("no non-norm in the fixed field".into()))?;
            let lhs1 = kf.div(&sys.sigma_k(k, &t_e)?, &t_e)?;
            let lhs2 = kf.div(&tp, &sys.tau(k, &tp))?;
            let mut cc = None;
            for (u, _) in kf.units.elements() {
                if kf.eq_trunc(&kf.mul(&u, &sys.tau(k, &u)), &lhs1)
                    && kf.eq_trunc(&kf.mul(&u, &sys.sigma_k(k, &u)?), &lhs2)
                {
                    cc = Some(u);
                    break;
                }
            }
            *c = cc.ok_or_else(|| Error::UnsupportedTower("no commutator for the biquadratic Weil group".into()))?;
            *t_prime = tp;
        }
        Ok(KWeil { idx, omega_ke, t_e, galois })
    }
}

/// F-coordinates of an element of K lying in F.
fn k_to_f(sys: &FieldSystem, x: &[i64]) -> Vec<i64> {
    let le = sys.e.tower.len(1);
    sys.e_to_f(&x[..le])
}

impl Setting {
    /// Top field, base field, and `t` for a relative domain.
    fn rel(&self, d: WeilDomain) -> Result<(FieldTag, FieldTag, Vec<i64>)> {
        Ok(match d {
            WeilDomain::E => (FieldTag::E, FieldTag::E, self.sys.e.one()),
            WeilDomain::EF => (FieldTag::E, FieldTag::F, self.sys.f_to_e(&self.t)),
            WeilDomain::KE(i) => (FieldTag::K(i), FieldTag::E, self.kweil(i)?.t_e.clone()),
        })
    }

    /// The involution of the top field over the base.
    fn rel_conj(&self, d: WeilDomain, x: &[i64]) -> Vec<i64> {
        match d {
            WeilDomain::E => x.to_vec(),
            WeilDomain::EF => self.sys.sigma(x),
            WeilDomain::KE(i) => self.sys.tau(self.k(i), x),
        }
    }

    /// Norm from the top field to the base field.
    fn rel_norm(&self, d: WeilDomain, x: &[i64]) -> Vec<i64> {
        match d {
            WeilDomain::E => x.to_vec(),
            WeilDomain::EF => self.sys.norm(x),
            WeilDomain::KE(i) => self.sys.norm_k(self.k(i), x),
        }
    }

    fn to_base(&self, d: WeilDomain, x: &[i64]) -> Vec<i64> {
        match d {
            WeilDomain::E => x.to_vec(),
            WeilDomain::EF => self.sys.e_to_f(x),
            WeilDomain::KE(_) => x[..self.sys.e.tower.len(1)].to_vec(),
        }
    }

    pub fn top_field(&self, d: WeilDomain) -> &LocalField {
        match d {
            WeilDomain::E | WeilDomain::EF => &self.sys.e,
            WeilDomain::KE(i) => &self.k(i).field,
        }
    }

    pub fn base_tag(&self, d: WeilDomain) -> FieldTag {
        match d {
            WeilDomain::E | WeilDomain::KE(_) => FieldTag::E,
            WeilDomain::EF => FieldTag::F,
        }
    }

    pub fn weil_mul(&self, d: WeilDomain, a: &WeilElem, b: &WeilElem) -> Result<WeilElem> {
        let (top, _, t) = self.rel(d)?;
        if d == WeilDomain::E && (a.eps | b.eps) != 0 {
            return Err(Error::WrongDomain);
        }
        let f = self.field(top);
        let y = if a.eps == 1 { self.rel_conj(d, &b.x) } else { b.x.clone() };
        let mut x = f.mul(&a.x, &y);
        if a.eps == 1 && b.eps == 1 {
            x = f.mul(&x, &t);
        }
        Ok(WeilElem { x, eps: a.eps ^ b.eps })
    }

    /// Generators: the top field's generators, then `s` if relative.
    pub fn weil_generators(&self, d: WeilDomain) -> Vec<WeilElem> {
        let f = self.top_field(d);
        let mut g: Vec<WeilElem> = FieldSystem::generators(f).into_iter().map(|x| WeilElem { x, eps: 0 }).collect();
        if d != WeilDomain::E {
            g.push(WeilElem { x: f.one(), eps: 1 });
        }
        g
    }

    /// Image of a group element in the base field under reciprocity.
    pub fn weil_to_base(&self, d: WeilDomain, w: &WeilElem) -> Result<Vec<i64>> {
        let (top, base, t) = self.rel(d)?;
        if d == WeilDomain::E && w.eps != 0 {
            return Err(Error::WrongDomain);
        }
        let mut y = self.rel_norm(d, &w.x);
        if w.eps == 1 {
            let tb = self.to_base(d, &t);
            y = self.field(base).mul(&y, &tb);
        }
        let _ = top;
        Ok(y)
    }

    /// A character of the base field evaluated on the domain.
    pub fn eval_on(&self, d: WeilDomain, chi: &SmoothCharacter, w: &WeilElem) -> Result<RootOfUnity> {
        if chi.domain != self.base_tag(d) {
            return Err(Error::WrongDomain);
        }
        self.eval(chi, &self.weil_to_base(d, w)?)
    }

    /// ν of the base field on the domain.
    pub fn nu_on(&self, d: WeilDomain, w: &WeilElem) -> Result<RootOfUnity> {
        self.eval_on(d, &self.nu(self.base_tag(d)), w)
    }

    pub fn evaluate(&self, rep: &WeilRep2, w: &WeilElem) -> Result<MonoMat> {
        let d = rep.domain();
        match rep {
            WeilRep2::Sum { chi1, chi2, .. } => {
                Ok(MonoMat::diag(&[self.eval_on(d, chi1, w)?, self.eval_on(d, chi2, w)?]))
            }
            WeilRep2::Induced { theta, .. } => {
                let (top, _, t) = self.rel(d)?;
                if d == WeilDomain::E || theta.domain != top {
                    return Err(Error::WrongDomain);
                }
                let a = self.eval(theta, &w.x)?;
                let b = self.eval(theta, &self.rel_conj(d, &w.x))?;
                Ok(if w.eps == 0 { MonoMat::diag(&[a, b]) } else { MonoMat::anti(a.mul(self.eval(theta, &t)?), b) })
            }
        }
    }

    pub fn gen_matrices(&self, rep: &WeilRep2) -> Result<Vec<MonoMat>> {
        self.weil_generators(rep.domain()).iter().map(|g| self.evaluate(rep, g)).collect()
    }

    /// Galois conjugate (`s w s^{-1}` with `s ∈ W_F \ W_E`) of a domain element.
    pub fn weil_sigma(&self, d: WeilDomain, w: &WeilElem) -> Result<WeilElem> {
        match d {
            WeilDomain::E => {
                if w.eps != 0 {
                    return Err(Error::WrongDomain);
                }
                Ok(WeilElem { x: self.sys.sigma(&w.x), eps: 0 })
            }
            WeilDomain::EF => Err(Error::WrongDomain),
            WeilDomain::KE(i) => {
                let k = self.k(i);
                let kw = self.kweil(i)?;
                let sx = self.sys.sigma_k(k, &w.x)?;
                match (&kw.galois, w.eps) {
                    (KGalois::NotGalois, _) => {
                        Err(Error::UnsupportedTower(format!("K = {} is not Galois over F", k.label)))
                    }
                    (_, 0) | (KGalois::Cyclic, _) => Ok(WeilElem { x: sx, eps: w.eps }),
                    (KGalois::Biquadratic { c, .. }, _) => Ok(WeilElem { x: k.field.mul(&sx, c), eps: 1 }),
                }
            }
        }
    }

    /// `s²` as an element of the domain.
    pub fn weil_s_squared(&self, d: WeilDomain) -> Result<WeilElem> {
        match d {
            WeilDomain::E => Ok(WeilElem { x: self.sys.f_to_e(&self.t), eps: 0 }),
            WeilDomain::EF => Err(Error::WrongDomain),
            WeilDomain::KE(i) => {
                let kw = self.kweil(i)?;
                let f = &self.k(i).field;
                match &kw.galois {
                    KGalois::NotGalois => {
                        Err(Error::UnsupportedTower(format!("K = {} is not Galois over F", self.k(i).label)))
                    }
                    KGalois::Cyclic => Ok(WeilElem { x: f.one(), eps: 1 }),
                    KGalois::Biquadratic { t_prime, .. } => Ok(WeilElem { x: t_prime.clone(), eps: 0 }),
                }
            }
        }
    }

    /// Field containing every value needed to write the listed matrices.
    pub fn field_for_mats<'a>(&self, mats: impl IntoIterator<Item = &'a MonoMat>) -> Result<Arc<Fq>> {
        let orders: BTreeSet<u64> = mats.into_iter().flat_map(|m| m.orders().collect::<Vec<_>>()).chain([2]).collect();
        Fq::for_orders(self.ell, orders)
    }

    /// Basis of `{A : A·a_i = b_i·A for all i}`.
    pub fn intertwiners(&self, a: &[MonoMat], b: &[MonoMat]) -> Result<(Arc<Fq>, Vec<Mat>)> {
        let fq = self.field_for_mats(a.iter().chain(b))?;
        let basis = intertwiners_in(&fq, a, b)?;
        Ok((fq, basis))
    }

    pub fn is_isomorphic(&self, a: &WeilRep2, b: &WeilRep2) -> Result<bool> {
        if a.domain() != b.domain() {
            return Err(Error::WrongDomain);
        }
        let (fq, basis) = self.intertwiners(&self.gen_matrices(a)?, &self.gen_matrices(b)?)?;
        Ok(invertible_in_span(&fq, &basis).is_some())
    }

    /// Dimension of the endomorphism space; 1 exactly for irreducibles.
    pub fn endomorphism_dim(&self, rep: &WeilRep2) -> Result<usize> {
        let m = self.gen_matrices(rep)?;
        Ok(self.intertwiners(&m, &m)?.1.len())
    }

    pub fn is_irreducible(&self, rep: &WeilRep2) -> Result<bool> {
        Ok(self.endomorphism_dim(rep)? == 1)
    }

    /// The Galois twist of the top character of an induced representation.
    pub fn top_twist(&self, d: WeilDomain, theta: &SmoothCharacter) -> Result<SmoothCharacter> {
        match d {
            WeilDomain::E => Err(Error::WrongDomain),
            WeilDomain::EF => self.galois_twist(theta),
            WeilDomain::KE(i) => self.tau_twist(i, theta),
        }
    }

    /// `rep^σ`: conjugation by `s ∈ W_F \ W_E` (W_E-domains only).
    pub fn sigma_conjugate(&self, rep: &WeilRep2) -> Result<WeilRep2> {
        Ok(match rep {
            WeilRep2::Sum { domain, chi1, chi2 } => {
                if *domain == WeilDomain::EF {
                    return Err(Error::WrongDomain);
                }
                if let WeilDomain::KE(i) = domain {
                    self.kweil(i.to_owned())?;
                    if matches!(self.kweil(*i)?.galois, KGalois::NotGalois) {
                        return Err(Error::UnsupportedTower(format!("K = {} is not Galois over F", self.k(*i).label)));
                    }
                }
                WeilRep2::sum(*domain, self.galois_twist(chi1)?, self.galois_twist(chi2)?)
            }
            WeilRep2::Induced { domain: WeilDomain::KE(i), theta } => {
                WeilRep2::Induced { domain: WeilDomain::KE(*i), theta: self.sigma_twist_k(*i, theta)? }
            }
            WeilRep2::Induced { .. } => return Err(Error::WrongDomain),
        })
    }

    pub fn dual(&self, rep: &WeilRep2) -> WeilRep2 {
        match rep {
            WeilRep2::Sum { domain, chi1, chi2 } => WeilRep2::sum(*domain, chi1.inv(), chi2.inv()),
            WeilRep2::Induced { domain, theta } => WeilRep2::Induced { domain: *domain, theta: theta.inv() },
        }
    }

    /// `rep ⊗ χ` for a character of the base field.
    pub fn twist(&self, rep: &WeilRep2, chi: &SmoothCharacter) -> Result<WeilRep2> {
        let d = rep.domain();
        if chi.domain != self.base_tag(d) {
            return Err(Error::WrongDomain);
        }
        Ok(match rep {
            WeilRep2::Sum { chi1, chi2, .. } => WeilRep2::sum(d, chi1.mul(chi), chi2.mul(chi)),
            WeilRep2::Induced { theta, .. } => {
                let lifted = match d {
                    WeilDomain::EF => self.compose_norm(chi)?,
                    WeilDomain::KE(i) => self.compose_norm_k(i, chi)?,
                    WeilDomain::E => return Err(Error::WrongDomain),
                };
                WeilRep2::Induced { domain: d, theta: theta.mul(&lifted) }
            }
        })
    }

    /// det as a character of the base field: χ₁χ₂, or ω_{L/M}·θ|_M.
    pub fn det_character(&self, rep: &WeilRep2) -> Result<SmoothCharacter> {
        match rep {
            WeilRep2::Sum { chi1, chi2, .. } => Ok(chi1.mul(chi2)),
            WeilRep2::Induced { domain: WeilDomain::EF, theta } => Ok(self.omega.mul(&self.restrict_to_f(theta)?)),
            WeilRep2::Induced { domain: WeilDomain::KE(i), theta } => {
                Ok(self.kweil(*i)?.omega_ke.mul(&self.restrict_k_to_e(*i, theta)?))
            }
            WeilRep2::Induced { .. } => Err(Error::WrongDomain),
        }
    }

    /// Restriction from W_{E/F} to W_E.
    pub fn restrict_to_e(&self, rep: &WeilRep2) -> Result<WeilRep2> {
        match rep {
            WeilRep2::Sum { domain: WeilDomain::EF, chi1, chi2 } => {
                Ok(WeilRep2::sum(WeilDomain::E, self.compose_norm(chi1)?, self.compose_norm(chi2)?))
            }
            WeilRep2::Induced { domain: WeilDomain::EF, theta } => {
                Ok(WeilRep2::sum(WeilDomain::E, theta.clone(), self.galois_twist(theta)?))
            }
            _ => Err(Error::WrongDomain),
        }
    }

    /// Pairs `(rep(g), rep(s g s^{-1}))` over generators, and `rep(s²)`.
    pub fn conjugation_data(&self, rep: &WeilRep2) -> Result<(Vec<(MonoMat, MonoMat)>, MonoMat)> {
        let d = rep.domain();
        if d == WeilDomain::EF {
            return Err(Error::WrongDomain);
        }
        let mut pairs = Vec::new();
        for g in self.weil_generators(d) {
            let sg = self.weil_sigma(d, &g)?;
            pairs.push((self.evaluate(rep, &g)?, self.evaluate(rep, &sg)?));
        }
        let s2 = self.evaluate(rep, &self.weil_s_squared(d)?)?;
        Ok((pairs, s2))
    }

    /// Sign of the conjugate-selfdual forms carried by `rep`.
    ///
    /// Solves `rep(g)^T B rep^σ(g) = B` on generators together with
    /// `B^T = b·B·rep(s²)` for `b = ±1`, and reports which signs admit a
    /// nondegenerate solution.
    pub fn conjugate_dual_sign(&self, rep: &WeilRep2) -> Result<DualSign> {
        let (pairs, s2) = self.conjugation_data(rep)?;
        sign_from_data(self, &pairs, &s2)
    }

    /// Sign for a single character (1×1 case).
    pub fn character_dual_sign(&self, mu: &SmoothCharacter) -> Result<DualSign> {
        let d = WeilDomain::E;
        let mut pairs = Vec::new();
        for g in self.weil_generators(d) {
            let sg = self.weil_sigma(d, &g)?;
            pairs.push((MonoMat::diag(&[self.eval(mu, &g.x)?]), MonoMat::diag(&[self.eval(mu, &sg.x)?])));
        }
        let s2 = MonoMat::diag(&[self.eval(mu, &self.weil_s_squared(d)?.x)?]);
        sign_from_data(self, &pairs, &s2)
    }

    /// Extension of a W_E-representation to W_F: an `A` with
    /// `A rep(g) A^{-1} = rep(s g s^{-1})`, `A² = rep(s²)` and `det A = 1`.
    /// Only for irreducible `rep`, where `A` is unique up to a scalar.
    pub fn sl2_extension(&self, rep: &WeilRep2) -> Result<Option<(Arc<Fq>, Mat)>> {
        let (pairs, s2) = self.conjugation_data(rep)?;
        let a: Vec<MonoMat> = pairs.iter().map(|p| p.0.clone()).collect();
        let b: Vec<MonoMat> = pairs.iter().map(|p| p.1.clone()).collect();
        let fq = self.field_for_mats(a.iter().chain(&b).chain([&s2]))?;
        let basis = intertwiners_in(&fq, &a, &b)?;
        if basis.is_empty() {
            return Ok(None);
        }
        if basis.len() != 1 {
            return Err(Error::ReducibleInput);
        }
        let a0 = &basis[0];
        let s = s2.to_mat(&fq)?;
        let sq = a0.mul(&fq, a0);
        // A0² = λ·S for a scalar λ.
        let (i, j) = (0..4).map(|k| (k / 2, k % 2)).find(|&(i, j)| s.get(i, j).0 != 0).expect("invertible");
        let lambda = fq.mul(sq.get(i, j), fq.inv(s.get(i, j))?);
        if sq != s.scale(&fq, lambda) {
            return Err(Error::InvalidRep("extension square is not a multiple of s²".into()));
        }
        if a0.det(&fq) != lambda {
            return Ok(None);
        }
        // The extension is c·A0 with c² = 1/λ; A0 is returned as the witness.
        Ok(Some((fq, a0.clone())))
    }

    /// `|S_φ|` by the rule: 4 if `(θ/θ^τ)² = 1`, else 2.
    pub fn dihedral_centralizer_order(&self, rep: &WeilRep2) -> Result<u64> {
        let WeilRep2::Induced { domain, theta } = rep else { return Err(Error::ReducibleInput) };
        let tt = self.top_twist(*domain, theta)?;
        if &tt == theta {
            return Err(Error::ReducibleInput);
        }
        Ok(if theta.div(&tt).is_quadratic() { 4 } else { 2 })
    }

    /// `|S_φ|` by linear algebra: the number of sign characters λ on the
    /// generators for which some invertible `A` has `A φ(g) = λ(g) φ(g) A`.
    pub fn dihedral_centralizer_solve(&self, rep: &WeilRep2) -> Result<u64> {
        if !self.is_irreducible(rep)? {
            return Err(Error::ReducibleInput);
        }
        let m = self.gen_matrices(rep)?;
        let k = m.len();
        let mut count = 0;
        for mask in 0u64..(1 << k) {
            let b: Vec<MonoMat> = m
                .iter()
                .enumerate()
                .map(|(i, x)| if mask >> i & 1 == 1 { x.scale(MINUS_ONE) } else { x.clone() })
                .collect();
            let (fq, basis) = self.intertwiners(&m, &b)?;
            if invertible_in_span(&fq, &basis).is_some() {
                count += 1;
            }
        }
        Ok(count)
    }
}

fn intertwiners_in(fq: &Fq, a: &[MonoMat], b: &[MonoMat]) -> Result<Vec<Mat>> {
    let n = a[0].n;
    let id = Mat::identity(n);
    let mut rows = Vec::new();
    for (x, y) in a.iter().zip(b) {
        let (x, y) = (x.to_mat(fq)?, y.to_mat(fq)?);
        rows.extend(sub_rows(fq, &sandwich_rows(fq, &id, &x), &sandwich_rows(fq, &y, &id)));
    }
    Ok(nullspace(fq, &rows, n * n).into_iter().map(|v| vec_to_mat(n, &v)).collect())
}

fn sign_from_data(s: &Setting, pairs: &[(MonoMat, MonoMat)], s2: &MonoMat) -> Result<DualSign> {
    let fq = s.field_for_mats(pairs.iter().flat_map(|(a, b)| [a, b]).chain([s2]))?;
    let n = s2.n;
    let id = Mat::identity(n);
    let mut base = Vec::new();
    for (a, b) in pairs {
        let (a, b) = (a.to_mat(&fq)?, b.to_mat(&fq)?);
        base.extend(sub_rows(&fq, &sandwich_rows(&fq, &a.transpose(), &b), &sandwich_rows(&fq, &id, &id)));
    }
    let s2m = s2.to_mat(&fq)?;
    let mut ok = [false; 2];
    for (slot, b) in [(0usize, Ff(1)), (1, fq.neg(Ff(1)))] {
        let mut rows = base.clone();
        rows.extend(transpose_minus_rows(&fq, n, b, &s2m));
        let basis: Vec<Mat> = nullspace(&fq, &rows, n * n).into_iter().map(|v| vec_to_mat(n, &v)).collect();
        ok[slot] = invertible_in_span(&fq, &basis).is_some();
    }
    Ok(match ok {
        [true, true] => DualSign::Both,
        [true, false] => DualSign::ConjugateOrthogonal,
        [false, true] => DualSign::ConjugateSymplectic,
        [false, false] => DualSign::Neither,
    })
}

/// Rows of `X ↦ X^T − b·X·S` on row-major vec(X).
fn transpose_minus_rows(fq: &Fq, n: usize, b: Ff, s: &Mat) -> Vec<Vec<Ff>> {
    let mut rows = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut row = vec![Ff(0); n * n];
            row[j * n + i] = fq.add(row[j * n + i], Ff(1));
            for k in 0..n {
                let c = fq.mul(b, s.get(k, j));
                row[i * n + k] = fq.sub(row[i * n + k], c);
            }
            rows.push(row);
        }
    }
    rows
}

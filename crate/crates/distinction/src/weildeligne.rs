//! Weil–Deligne representations `(Φ, N)` of rank two, their equivalence
//! classes up to rescaling `N`, and the question of extending a class on
//! `W_E` to `W_F`.
//!
//! Equivariance is `Φ(w)·N = ν(w)·N·Φ(w)`, so a nonzero nilpotent `N`
//! maps the line of a character `c` onto the line of `ν·c`.

use std::fmt;
use std::sync::Arc;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::characters::{Setting, SmoothCharacter};
use crate::error::{Error, Result};
use crate::gl2::GL2Rep;
use crate::localfield::FieldTag;
use crate::scalars::{
    half_root_ff, invertible_in_span, nullspace, q_mod_ell_class, sandwich_rows, singular_nonzero_in_span, sub_rows,
    vec_to_mat, CongruenceClass, Ff, Fq, Mat, RootOfUnity,
};
use crate::weilrep::{DualSign, MonoMat, WeilDomain, WeilRep2};

/// A 2×2 matrix whose entries are zero or roots of unity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct RootMatrix(pub [[Option<RootOfUnity>; 2]; 2]);

impl RootMatrix {
    pub const ZERO: RootMatrix = RootMatrix([[None, None], [None, None]]);

    pub fn unit(i: usize, j: usize) -> RootMatrix {
        let mut m = Self::ZERO;
        m.0[i][j] = Some(RootOfUnity::ONE);
        m
    }

    pub fn from_entries(a: [[i8; 2]; 2]) -> RootMatrix {
        let e = |x: i8| match x {
            0 => None,
            1 => Some(RootOfUnity::ONE),
            -1 => Some(RootOfUnity::MINUS_ONE),
            _ => panic!("entries must be 0 or ±1"),
        };
        RootMatrix([[e(a[0][0]), e(a[0][1])], [e(a[1][0]), e(a[1][1])]])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_none())
    }

    pub fn scale(&self, c: RootOfUnity) -> RootMatrix {
        RootMatrix(self.0.map(|r| r.map(|x| x.map(|z| z.mul(c)))))
    }

    pub fn orders(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().flatten().flatten().map(|z| z.den())
    }

    pub fn to_mat(&self, fq: &Fq) -> Result<Mat> {
        let mut m = Mat::zero(2);
        for i in 0..2 {
            for j in 0..2 {
                if let Some(z) = self.0[i][j] {
                    m.set(i, j, fq.embed_root(z)?);
                }
            }
        }
        Ok(m)
    }

    pub fn from_mat(fq: &Fq, m: &Mat) -> Result<RootMatrix> {
        let mut out = Self::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let x = m.get(i, j);
                if x.0 != 0 {
                    out.0[i][j] = Some(fq.dlog(x)?);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for RootMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |x: Option<RootOfUnity>| x.map_or("0".to_string(), |z| z.to_string());
        write!(f, "[[{}, {}], [{}, {}]]", e(self.0[0][0]), e(self.0[0][1]), e(self.0[1][0]), e(self.0[1][1]))
    }
}

impl Serialize for RootMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let e = |x: Option<RootOfUnity>| x.map_or("0".to_string(), |z| z.to_string());
        let rows: Vec<Vec<String>> = self.0.iter().map(|r| r.iter().map(|&x| e(x)).collect()).collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<String>> = Vec::deserialize(d)?;
        if rows.len() != 2 || rows.iter().any(|r| r.len() != 2) {
            return Err(D::Error::custom("expected a 2x2 array"));
        }
        let mut out = RootMatrix::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                let s = rows[i][j].trim();
                if s != "0" {
                    out.0[i][j] = Some(s.parse().map_err(D::Error::custom)?);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeilDeligneRep {
    pub phi: WeilRep2,
    #[serde(rename = "N")]
    pub n: RootMatrix,
}

impl WeilDeligneRep {
    pub fn new(phi: WeilRep2, n: RootMatrix) -> Self {
        WeilDeligneRep { phi, n }
    }

    pub fn semisimple(phi: WeilRep2) -> Self {
        WeilDeligneRep { phi, n: RootMatrix::ZERO }
    }
}

/// How `N` sits relative to a reducible semisimple part.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum WdShape {
    Zero,
    /// `N ≠ 0`, `N² = 0`, sending the `src` line onto the `tgt` line.
    Nilpotent {
        src: SmoothCharacter,
        tgt: SmoothCharacter,
    },
    /// `N` invertible.
    Regular,
}

/// A class of `W_E`-representations under isomorphism and `N ↦ λN`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WdClass {
    /// Characters in increasing order.
    Reducible { chars: [SmoothCharacter; 2], shape: WdShape },
    /// Irreducible semisimple part; `N` is then zero.
    Irreducible { phi: WeilRep2 },
}

impl WdClass {
    pub fn is_nilpotent(&self) -> bool {
        !matches!(self, WdClass::Reducible { shape: WdShape::Regular, .. })
    }

    /// The normal form: `N` is 0, `E12` with basis `(tgt, src)`, `diag(1,−1)`
    /// when the two characters agree, or the swap matrix when they differ by `ν`.
    pub fn representative(&self) -> WeilDeligneRep {
        match self {
            WdClass::Irreducible { phi } => WeilDeligneRep::semisimple(phi.clone()),
            WdClass::Reducible { chars: [a, b], shape } => {
                let sum = |x: &SmoothCharacter, y: &SmoothCharacter| WeilRep2::sum(WeilDomain::E, x.clone(), y.clone());
                match shape {
                    WdShape::Zero => WeilDeligneRep::semisimple(sum(a, b)),
                    WdShape::Nilpotent { src, tgt } => WeilDeligneRep::new(sum(tgt, src), RootMatrix::unit(0, 1)),
                    WdShape::Regular if a == b => {
                        WeilDeligneRep::new(sum(a, b), RootMatrix::from_entries([[1, 0], [0, -1]]))
                    }
                    WdShape::Regular => WeilDeligneRep::new(sum(a, b), RootMatrix::from_entries([[0, 1], [1, 0]])),
                }
            }
        }
    }
}

/// Which case of the lifting analysis settles a question.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiftCase {
    Semisimple,
    BanalSteinberg,
    SteinbergRegular,
    SpecialRegular,
    Supercuspidal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftVerdict {
    pub exists: bool,
    pub case: LiftCase,
    pub witness: String,
}

/// A lift found by search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LiftWitness {
    /// A representation of `W_{E/F}` whose restriction lies in the class.
    WeilDeligne { rep: WeilDeligneRep },
    /// The image of `s` extending an irreducible `W_E`-parameter, up to a scalar.
    Extension { s_image: RootMatrix },
}

impl LiftWitness {
    pub fn describe(&self) -> String {
        match self {
            LiftWitness::WeilDeligne { rep } => {
                let kind = match rep.phi {
                    WeilRep2::Sum { .. } => "sum",
                    WeilRep2::Induced { .. } => "induced",
                };
                format!("{kind} lift, N = {}", rep.n)
            }
            LiftWitness::Extension { s_image } => format!("extension, s ↦ {s_image}"),
        }
    }
}

impl Setting {
    fn wd_field(&self, rep: &WeilDeligneRep) -> Result<Arc<Fq>> {
        let mats = self.gen_matrices(&rep.phi)?;
        let orders: Vec<u64> =
            mats.iter().flat_map(|m| m.orders().collect::<Vec<_>>()).chain(rep.n.orders()).chain([2]).collect();
        Fq::for_orders(self.ell, orders)
    }

    /// `N² = 0`, i.e. trace and determinant vanish.
    pub fn is_nilpotent(&self, n: &RootMatrix) -> Result<bool> {
        let fq = Fq::for_orders(self.ell, n.orders().chain([2]))?;
        let m = n.to_mat(&fq)?;
        Ok(m.trace(&fq).0 == 0 && m.det(&fq).0 == 0)
    }

    /// Equivariance `Φ(g)·N = ν(g)·N·Φ(g)` on generators.
    pub fn wd_validate(&self, rep: &WeilDeligneRep) -> Result<bool> {
        let fq = self.wd_field(rep)?;
        let n = rep.n.to_mat(&fq)?;
        let d = rep.phi.domain();
        for g in self.weil_generators(d) {
            let phi = self.evaluate(&rep.phi, &g)?.to_mat(&fq)?;
            let nu = fq.embed_root(self.nu_on(d, &g)?)?;
            if phi.mul(&fq, &n) != n.mul(&fq, &phi).scale(&fq, nu) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `det Φ = 1` and `tr N = 0`.
    pub fn is_sl2_type(&self, rep: &WeilDeligneRep) -> Result<bool> {
        let fq = self.wd_field(rep)?;
        Ok(self.det_character(&rep.phi)?.is_trivial() && rep.n.to_mat(&fq)?.trace(&fq).0 == 0)
    }

    /// The class of a valid representation of `W_E` with `tr N = 0`.
    pub fn wd_class(&self, rep: &WeilDeligneRep) -> Result<WdClass> {
        let fq = self.wd_field(rep)?;
        let n = rep.n.to_mat(&fq)?;
        if n.trace(&fq).0 != 0 {
            return Err(Error::NotSl2);
        }
        if !self.wd_validate(rep)? {
            return Err(Error::InvalidRep("N is not equivariant".into()));
        }
        match &rep.phi {
            WeilRep2::Induced { domain: WeilDomain::KE(_), .. } => {
                if !self.is_irreducible(&rep.phi)? {
                    return Err(Error::ReducibleInput);
                }
                if !rep.n.is_zero() {
                    return Err(Error::InvalidRep("irreducible parameter with nonzero N".into()));
                }
                Ok(WdClass::Irreducible { phi: rep.phi.clone() })
            }
            WeilRep2::Sum { domain: WeilDomain::E, chi1, chi2 } => {
                let shape = if n.is_zero() {
                    WdShape::Zero
                } else if n.det(&fq).0 != 0 {
                    WdShape::Regular
                } else if chi1 == chi2 {
                    WdShape::Nilpotent { src: chi1.clone(), tgt: chi1.clone() }
                } else if n.get(1, 0).0 == 0 {
                    // Image is the first coordinate line.
                    WdShape::Nilpotent { src: chi2.clone(), tgt: chi1.clone() }
                } else {
                    WdShape::Nilpotent { src: chi1.clone(), tgt: chi2.clone() }
                };
                let mut chars = [chi1.clone(), chi2.clone()];
                chars.sort();
                Ok(WdClass::Reducible { chars, shape })
            }
            _ => Err(Error::WrongDomain),
        }
    }

    /// Isomorphism up to rescaling `N`.
    pub fn wd_equivalent(&self, a: &WeilDeligneRep, b: &WeilDeligneRep) -> Result<bool> {
        match (self.wd_class(a)?, self.wd_class(b)?) {
            (WdClass::Irreducible { phi: x }, WdClass::Irreducible { phi: y }) => {
                Ok(x.domain() == y.domain() && self.is_isomorphic(&x, &y)?)
            }
            (x, y) => Ok(x == y),
        }
    }

    /// The injection of nilpotent SL₂-type classes: the Steinberg class
    /// when `ℓ | q_E − 1` and the special class when `ℓ | q_E + 1` move to
    /// the regular class with the same semisimple part.
    pub fn p_inject(&self, rep: &WeilDeligneRep) -> Result<WdClass> {
        if !self.is_sl2_type(rep)? {
            return Err(Error::NotSl2);
        }
        if !self.is_nilpotent(&rep.n)? {
            return Err(Error::NotNilpotent);
        }
        let class = self.wd_class(rep)?;
        let WdClass::Reducible { chars, shape } = &class else { return Ok(class) };
        let nu = self.nu(FieldTag::E);
        let regime = q_mod_ell_class(self.sys.spec.q_e(), self.ell)?;
        let moved = match (regime, shape) {
            (CongruenceClass::OneMod, WdShape::Nilpotent { src, tgt }) => src == tgt,
            (CongruenceClass::MinusOneMod, WdShape::Zero) => chars[1] == chars[0].mul(&nu),
            _ => false,
        };
        Ok(if moved { WdClass::Reducible { chars: chars.clone(), shape: WdShape::Regular } } else { class })
    }

    /// The nilpotent parameter of a generic representation of `PGL₂(E)`.
    pub fn pv(&self, pi: &GL2Rep) -> Result<WeilDeligneRep> {
        self.validate_gl2(pi)?;
        if !self.central_character(pi)?.is_trivial() {
            return Err(Error::NontrivialCentralCharacter);
        }
        let nh = self.nu_half(FieldTag::E);
        let e = WeilDomain::E;
        Ok(match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => {
                if !self.ps_irreducible(chi1, chi2) {
                    return Err(Error::NotGeneric);
                }
                WeilDeligneRep::semisimple(WeilRep2::sum(e, chi1.clone(), chi2.clone()))
            }
            GL2Rep::Steinberg { chi } => {
                let lo = chi.div(&nh);
                if q_mod_ell_class(self.sys.spec.q_e(), self.ell)? == CongruenceClass::OneMod {
                    WeilDeligneRep::new(WeilRep2::sum(e, lo.clone(), lo), RootMatrix::unit(0, 1))
                } else {
                    // N carries the χν^{-1/2} line onto the χν^{1/2} line.
                    WeilDeligneRep::new(WeilRep2::sum(e, lo, chi.mul(&nh)), RootMatrix::unit(1, 0))
                }
            }
            GL2Rep::Special { chi } => WeilDeligneRep::semisimple(WeilRep2::sum(e, chi.div(&nh), chi.mul(&nh))),
            GL2Rep::Dihedral { k, theta } => {
                WeilDeligneRep::semisimple(WeilRep2::Induced { domain: WeilDomain::KE(*k), theta: theta.clone() })
            }
            GL2Rep::Primitive => {
                return Err(Error::UnsupportedTower("primitive supercuspidal has no matrix model".into()))
            }
        })
    }

    /// Whether the class extends to `W_F`, decided by the closed-form case analysis.
    pub fn lift_exists_closed_form(&self, class: &WdClass) -> Result<LiftVerdict> {
        let spec = self.sys.spec;
        let q_e = q_mod_ell_class(spec.q_e(), self.ell)?;
        let q_f = q_mod_ell_class(spec.q_f(), self.ell)?;
        let nh = self.nu_half(FieldTag::E);
        let omega_nh = self.omega.mul(&self.restrict_to_f(&nh)?);
        let verdict = |exists, case, witness: &str| Ok(LiftVerdict { exists, case, witness: witness.to_string() });
        let (chars, shape) = match class {
            WdClass::Irreducible { phi } => {
                let sign = self.conjugate_dual_sign(phi)?;
                let exists = sign == DualSign::ConjugateSymplectic;
                let w =
                    if exists { "extension of the irreducible parameter" } else { "none: not conjugate-symplectic" };
                return verdict(exists, LiftCase::Supercuspidal, w);
            }
            WdClass::Reducible { chars, shape } => (chars, shape),
        };
        if !chars[0].mul(&chars[1]).is_trivial() {
            return Err(Error::NotSl2);
        }
        let nu = self.nu(FieldTag::E);
        match shape {
            WdShape::Zero => {
                let chi = chars[0].mul(&nh);
                if self.galois_twist(&chi)? == chi {
                    verdict(true, LiftCase::Semisimple, "sum lift through a norm preimage")
                } else if self.restrict_to_f(&chi)? == omega_nh {
                    verdict(true, LiftCase::Semisimple, "induced lift")
                } else {
                    verdict(false, LiftCase::Semisimple, "none")
                }
            }
            WdShape::Nilpotent { src, tgt } if q_e == CongruenceClass::Banal && src != tgt => {
                let chi = src.mul(&nh);
                if !chi.is_quadratic() || *tgt != src.mul(&nu) {
                    return Err(Error::OutOfCaseTable);
                }
                let exists = self.restrict_to_f(&chi)?.is_trivial();
                verdict(exists, LiftCase::BanalSteinberg, if exists { "sum lift with nilpotent N" } else { "none" })
            }
            WdShape::Regular if q_e == CongruenceClass::OneMod && chars[0] == chars[1] => {
                let chi = chars[0].mul(&nh);
                if !chi.is_quadratic() {
                    return Err(Error::OutOfCaseTable);
                }
                let r = self.restrict_to_f(&chi)?;
                if r.is_trivial() {
                    verdict(true, LiftCase::SteinbergRegular, "sum lift with regular N")
                } else if q_f == CongruenceClass::OneMod && r == self.omega {
                    verdict(true, LiftCase::SteinbergRegular, "sum lift with diagonal N")
                } else {
                    verdict(false, LiftCase::SteinbergRegular, "none")
                }
            }
            WdShape::Regular if q_e == CongruenceClass::MinusOneMod && chars[1] == chars[0].mul(&nu) => {
                let chi = chars[0].mul(&nh);
                if !chi.is_quadratic() {
                    return Err(Error::OutOfCaseTable);
                }
                let r = self.restrict_to_f(&chi)?;
                if q_f != CongruenceClass::MinusOneMod {
                    verdict(false, LiftCase::SpecialRegular, "none: q_F is not -1 mod ell")
                } else if r.is_trivial() {
                    verdict(true, LiftCase::SpecialRegular, "sum lift with antidiagonal N")
                } else if r == omega_nh {
                    verdict(true, LiftCase::SpecialRegular, "induced lift with antidiagonal N")
                } else {
                    verdict(false, LiftCase::SpecialRegular, "none")
                }
            }
            _ => Err(Error::OutOfCaseTable),
        }
    }

    /// Search for a representation of `W_{E/F}` restricting into the class.
    ///
    /// Semisimple candidates are `η ⊕ η^{-1}` for every η with `η∘N = χ₁`
    /// and `Ind(μ)` for μ among the two characters; for each, the space of
    /// equivariant trace-zero `N` is solved exactly and classified by rank.
    pub fn lift_search(&self, class: &WdClass) -> Result<Option<LiftWitness>> {
        let (chars, shape) = match class {
            WdClass::Irreducible { phi } => {
                return match self.sl2_extension(phi)? {
                    Some((fq, a)) => Ok(Some(LiftWitness::Extension { s_image: RootMatrix::from_mat(&fq, &a)? })),
                    None => Ok(None),
                };
            }
            WdClass::Reducible { chars, shape } => (chars, shape),
        };
        let [a, b] = chars;
        let ef = WeilDomain::EF;
        let mut candidates = Vec::new();
        for eta in self.norm_preimages(a)? {
            candidates.push(WeilRep2::sum(ef, eta.clone(), eta.inv()));
        }
        for (mu, other) in [(a, b), (b, a)] {
            let tw = self.galois_twist(mu)?;
            if &tw == other && tw != *mu {
                let ind = WeilRep2::Induced { domain: ef, theta: mu.clone() };
                if self.det_character(&ind)?.is_trivial() {
                    candidates.push(ind);
                }
            }
        }
        for phi in candidates {
            let WeilRep2::Sum { chi1: c1, chi2: c2, .. } = self.restrict_to_e(&phi)? else { unreachable!() };
            if !((&c1 == a && &c2 == b) || (&c1 == b && &c2 == a)) {
                continue;
            }
            let (fq, space) = self.equivariant_space(&phi)?;
            let n = match shape {
                WdShape::Zero => Some((fq.clone(), Mat::zero(2))),
                WdShape::Regular => invertible_in_span(&fq, &space).map(|m| (fq.clone(), m)),
                WdShape::Nilpotent { src, tgt } if src != tgt => {
                    let e = if tgt == &c1 {
                        Mat::from_rows(&[&[Ff(0), Ff(1)], &[Ff(0), Ff(0)]])
                    } else {
                        Mat::from_rows(&[&[Ff(0), Ff(0)], &[Ff(1), Ff(0)]])
                    };
                    let ok = (tgt == &c1 && src == &c2) || (tgt == &c2 && src == &c1);
                    (ok && self.is_equivariant(&phi, &fq, &e)?).then(|| (fq.clone(), e))
                }
                WdShape::Nilpotent { .. } => {
                    if singular_nonzero_in_span(&fq, &space) {
                        Some(singular_witness(&fq, &space)?)
                    } else {
                        None
                    }
                }
            };
            if let Some((fq, n)) = n {
                let rep = WeilDeligneRep::new(phi, RootMatrix::from_mat(&fq, &n)?);
                return Ok(Some(LiftWitness::WeilDeligne { rep }));
            }
        }
        Ok(None)
    }

    /// Basis of trace-zero `N` with `Φ(g)N = ν(g)NΦ(g)` on generators.
    fn equivariant_space(&self, phi: &WeilRep2) -> Result<(Arc<Fq>, Vec<Mat>)> {
        let d = phi.domain();
        let gens = self.weil_generators(d);
        let mats: Vec<MonoMat> = gens.iter().map(|g| self.evaluate(phi, g)).collect::<Result<_>>()?;
        let nus: Vec<RootOfUnity> = gens.iter().map(|g| self.nu_on(d, g)).collect::<Result<_>>()?;
        let orders: Vec<u64> = mats
            .iter()
            .flat_map(|m| m.orders().collect::<Vec<_>>())
            .chain(nus.iter().map(|z| z.den()))
            .chain([2])
            .collect();
        let fq = Fq::for_orders(self.ell, orders)?;
        let id = Mat::identity(2);
        let mut rows = vec![vec![Ff(1), Ff(0), Ff(0), Ff(1)]];
        for (m, nu) in mats.iter().zip(&nus) {
            let m = m.to_mat(&fq)?;
            let scaled = m.scale(&fq, fq.embed_root(*nu)?);
            rows.extend(sub_rows(&fq, &sandwich_rows(&fq, &m, &id), &sandwich_rows(&fq, &id, &scaled)));
        }
        let basis = nullspace(&fq, &rows, 4).into_iter().map(|v| vec_to_mat(2, &v)).collect();
        Ok((fq, basis))
    }

    fn is_equivariant(&self, phi: &WeilRep2, fq: &Fq, n: &Mat) -> Result<bool> {
        let d = phi.domain();
        for g in self.weil_generators(d) {
            let m = self.evaluate(phi, &g)?.to_mat(fq)?;
            let nu = fq.embed_root(self.nu_on(d, &g)?)?;
            if m.mul(fq, n) != n.mul(fq, &m).scale(fq, nu) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Restriction of a `W_{E/F}` representation to `W_E`; `N` is unchanged.
    pub fn wd_restrict_to_e(&self, rep: &WeilDeligneRep) -> Result<WeilDeligneRep> {
        Ok(WeilDeligneRep::new(self.restrict_to_e(&rep.phi)?, rep.n))
    }
}

/// A nonzero singular member of a span of 2×2 matrices of dimension at
/// least two. The quadratic `det(B₀ + xB₁)` may need its roots in the
/// quadratic extension, in which case the witness lives there.
fn singular_witness(fq: &Arc<Fq>, basis: &[Mat]) -> Result<(Arc<Fq>, Mat)> {
    if let Some(b) = basis.iter().find(|b| b.det(fq).0 == 0) {
        return Ok((fq.clone(), b.clone()));
    }
    let (b0, b1) = (&basis[0], &basis[1]);
    let d0 = b0.det(fq);
    let d2 = b1.det(fq);
    let c = fq.sub(fq.sub(b0.add(fq, b1).det(fq), d0), d2);
    // d2·x² + c·x + d0 = 0.
    let disc = fq.sub(fq.mul(c, c), fq.mul(fq.from_int(4), fq.mul(d0, d2)));
    let solve = |f: &Fq, sub: &Fq| -> Result<Option<Mat>> {
        let lift = |x: Ff| f.embed_from(sub, x);
        let Some(root) = half_root_ff(f, lift(disc)?)? else { return Ok(None) };
        let two_d2 = f.mul(f.from_int(2), lift(d2)?);
        let x = f.mul(f.sub(root, lift(c)?), f.inv(two_d2)?);
        let mut m = Mat::zero(2);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, f.add(lift(b0.get(i, j))?, f.mul(x, lift(b1.get(i, j))?)));
            }
        }
        Ok(Some(m))
    };
    if let Some(m) = solve(fq, fq)? {
        return Ok((fq.clone(), m));
    }
    let big = Fq::get(fq.ell(), 2 * fq.degree())?;
    let m = solve(&big, fq)?.expect("square root exists in the quadratic extension");
    Ok((big, m))
}

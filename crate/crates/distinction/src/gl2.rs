//! Generic representations of `GL₂(E)` and their distinction by `GL₂(F)`.
//!
//! Principal series, Steinberg and special representations are decided by
//! closed criteria on their characters. Dihedral supercuspidals are decided
//! through their parameter: distinguished exactly when the parameter is
//! conjugate-orthogonal, ω-distinguished exactly when conjugate-symplectic.

use serde::{Deserialize, Serialize};

use crate::characters::{NuHalf, Setting, SmoothCharacter};
use crate::error::{Error, Result};
use crate::localfield::FieldTag;
use crate::scalars::{q_mod_ell_class, CongruenceClass};
use crate::weilrep::{DualSign, WeilDomain, WeilRep2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GL2Rep {
    /// The full normalized induction `π(χ₁, χ₂)`, reducible or not.
    PrincipalSeries { chi1: SmoothCharacter, chi2: SmoothCharacter },
    /// The generic subquotient `St_χ` of `π(χν^{-1/2}, χν^{1/2})`.
    Steinberg { chi: SmoothCharacter },
    /// The cuspidal non-supercuspidal `Sp_χ`, present when `ℓ | q_E + 1`.
    Special { chi: SmoothCharacter },
    /// Parameter `Ind_{W_K}^{W_E} θ` for the quadratic extension `K(k)`.
    Dihedral { k: u8, theta: SmoothCharacter },
    /// Opaque placeholder for supercuspidals with primitive parameter.
    Primitive,
}

impl GL2Rep {
    pub fn is_supercuspidal(&self) -> bool {
        matches!(self, GL2Rep::Dihedral { .. } | GL2Rep::Primitive)
    }

    pub fn label(&self) -> &'static str {
        match self {
            GL2Rep::PrincipalSeries { .. } => "PS",
            GL2Rep::Steinberg { .. } => "St",
            GL2Rep::Special { .. } => "Sp",
            GL2Rep::Dihedral { .. } => "Cusp",
            GL2Rep::Primitive => "Primitive",
        }
    }
}

/// Which criterion produced a distinction verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rationale {
    /// `χ₁χ₂^σ = 1`.
    SigmaDual,
    /// `χ₁|_F = χ₂|_F = 1` with `χ₁ ≠ χ₂`.
    TrivialRestrictions,
    PrincipalSeriesFails,
    SteinbergOmega,
    SteinbergTrivial,
    SteinbergFails,
    SpecialOmega,
    SpecialNuHalf,
    SpecialFails,
    ConjugateOrthogonal,
    ConjugateSymplectic,
    NotConjugateSelfdual,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinctionReport {
    pub distinguished: bool,
    /// `dim Hom_{GL₂(F)}(π, χ)`, when known.
    pub multiplicity: Option<u32>,
    pub rationale: Rationale,
}

impl DistinctionReport {
    fn yes(m: u32, rationale: Rationale) -> Self {
        DistinctionReport { distinguished: true, multiplicity: Some(m), rationale }
    }

    fn no(rationale: Rationale) -> Self {
        DistinctionReport { distinguished: false, multiplicity: Some(0), rationale }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dichotomy {
    Dist,
    OmegaDist,
    /// Both verdicts hold; possible only off the supercuspidal locus.
    Both,
    /// Selfdual yet neither; possible only off the supercuspidal locus.
    Neither,
    NotSelfdual,
}

impl Setting {
    pub fn ps_irreducible(&self, chi1: &SmoothCharacter, chi2: &SmoothCharacter) -> bool {
        let r = chi1.div(chi2);
        let nu = self.nu(FieldTag::E);
        r != nu && r != nu.inv()
    }

    pub fn q_e_class(&self) -> CongruenceClass {
        q_mod_ell_class(self.sys.spec.q_e(), self.ell).expect("validated spec")
    }

    pub fn q_f_class(&self) -> CongruenceClass {
        q_mod_ell_class(self.sys.spec.q_f(), self.ell).expect("validated spec")
    }

    /// Constructor checks: characters on the right groups, Steinberg and
    /// special only in their regimes, dihedral θ not τ-invariant.
    pub fn validate_gl2(&self, pi: &GL2Rep) -> Result<()> {
        let on_e = |c: &SmoothCharacter| {
            if c.domain == FieldTag::E {
                Ok(())
            } else {
                Err(Error::InvalidRep("character must live on E".into()))
            }
        };
        match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => {
                on_e(chi1)?;
                on_e(chi2)
            }
            GL2Rep::Steinberg { chi } => {
                on_e(chi)?;
                if self.q_e_class() == CongruenceClass::MinusOneMod {
                    return Err(Error::InvalidRep("no generic Steinberg when q_E = -1 mod ell".into()));
                }
                Ok(())
            }
            GL2Rep::Special { chi } => {
                on_e(chi)?;
                if self.q_e_class() != CongruenceClass::MinusOneMod {
                    return Err(Error::InvalidRep("special representations need q_E = -1 mod ell".into()));
                }
                Ok(())
            }
            GL2Rep::Dihedral { k, theta } => {
                if *k as usize >= self.sys.ks.len() || theta.domain != FieldTag::K(*k) {
                    return Err(Error::InvalidRep("θ must live on the chosen K".into()));
                }
                if self.tau_twist(*k, theta)? == *theta {
                    return Err(Error::ReducibleInput);
                }
                Ok(())
            }
            GL2Rep::Primitive => Ok(()),
        }
    }

    /// The semisimple Weil parameter (without monodromy).
    pub fn parameter(&self, pi: &GL2Rep) -> Result<WeilRep2> {
        let nh = self.nu_half(FieldTag::E);
        let e = WeilDomain::E;
        Ok(match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => WeilRep2::sum(e, chi1.clone(), chi2.clone()),
            GL2Rep::Steinberg { chi } | GL2Rep::Special { chi } => WeilRep2::sum(e, chi.div(&nh), chi.mul(&nh)),
            GL2Rep::Dihedral { k, theta } => WeilRep2::Induced { domain: WeilDomain::KE(*k), theta: theta.clone() },
            GL2Rep::Primitive => {
                return Err(Error::UnsupportedTower("primitive supercuspidal has no matrix model".into()))
            }
        })
    }

    pub fn central_character(&self, pi: &GL2Rep) -> Result<SmoothCharacter> {
        match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => Ok(chi1.mul(chi2)),
            GL2Rep::Steinberg { chi } | GL2Rep::Special { chi } => Ok(chi.pow(2)),
            _ => self.det_character(&self.parameter(pi)?),
        }
    }

    /// `π ⊗ (μ∘det)` for a character μ of `E^×`.
    pub fn twist_gl2(&self, pi: &GL2Rep, mu: &SmoothCharacter) -> Result<GL2Rep> {
        Ok(match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => {
                GL2Rep::PrincipalSeries { chi1: chi1.mul(mu), chi2: chi2.mul(mu) }
            }
            GL2Rep::Steinberg { chi } => GL2Rep::Steinberg { chi: chi.mul(mu) },
            GL2Rep::Special { chi } => GL2Rep::Special { chi: chi.mul(mu) },
            GL2Rep::Dihedral { k, theta } => {
                GL2Rep::Dihedral { k: *k, theta: theta.mul(&self.compose_norm_k(*k, mu)?) }
            }
            GL2Rep::Primitive => GL2Rep::Primitive,
        })
    }

    /// `ν_E^{1/2}|_{F^×}` under either square-root convention.
    fn nu_half_on_f(&self, conv: NuHalf) -> Result<SmoothCharacter> {
        self.restrict_to_f(&self.nu_half_with(FieldTag::E, conv))
    }

    /// Distinction by `GL₂(F)`.
    pub fn gl2f_distinction(&self, pi: &GL2Rep) -> Result<DistinctionReport> {
        self.validate_gl2(pi)?;
        let report = match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => {
                let r1 = self.restrict_to_f(chi1)?;
                let r2 = self.restrict_to_f(chi2)?;
                if chi1.mul(&self.galois_twist(chi2)?).is_trivial() {
                    let two = chi1 == chi2 && r1.is_trivial() && self.q_f_class() == CongruenceClass::OneMod;
                    DistinctionReport::yes(if two { 2 } else { 1 }, Rationale::SigmaDual)
                } else if r1.is_trivial() && r2.is_trivial() && chi1 != chi2 {
                    DistinctionReport::yes(1, Rationale::TrivialRestrictions)
                } else {
                    DistinctionReport::no(Rationale::PrincipalSeriesFails)
                }
            }
            GL2Rep::Steinberg { chi } => {
                let r = self.restrict_to_f(chi)?;
                if r == self.omega {
                    DistinctionReport::yes(1, Rationale::SteinbergOmega)
                } else if r.is_trivial()
                    && self.q_e_class() == CongruenceClass::OneMod
                    && self.q_f_class() == CongruenceClass::OneMod
                {
                    DistinctionReport::yes(1, Rationale::SteinbergTrivial)
                } else {
                    DistinctionReport::no(Rationale::SteinbergFails)
                }
            }
            GL2Rep::Special { chi } => {
                let r = self.restrict_to_f(chi)?;
                let q_f_ok = self.q_f_class() == CongruenceClass::MinusOneMod;
                let mut verdicts = Vec::new();
                for conv in [NuHalf::Even, NuHalf::Odd] {
                    let nh = self.nu_half_on_f(conv)?;
                    verdicts.push(if !q_f_ok {
                        DistinctionReport::no(Rationale::SpecialFails)
                    } else if r == self.omega {
                        DistinctionReport::yes(1, Rationale::SpecialOmega)
                    } else if r == nh {
                        DistinctionReport::yes(1, Rationale::SpecialNuHalf)
                    } else {
                        DistinctionReport::no(Rationale::SpecialFails)
                    });
                }
                assert_eq!(
                    verdicts[0].distinguished, verdicts[1].distinguished,
                    "verdict depends on the choice of ν^(1/2)"
                );
                verdicts[if self.nu_half == NuHalf::Even { 0 } else { 1 }]
            }
            GL2Rep::Dihedral { .. } => match self.conjugate_dual_sign(&self.parameter(pi)?)? {
                DualSign::ConjugateOrthogonal => DistinctionReport::yes(1, Rationale::ConjugateOrthogonal),
                DualSign::ConjugateSymplectic => DistinctionReport::no(Rationale::ConjugateSymplectic),
                DualSign::Neither => DistinctionReport::no(Rationale::NotConjugateSelfdual),
                DualSign::Both => return Err(Error::ReducibleInput),
            },
            GL2Rep::Primitive => return Err(Error::UnsupportedTower("primitive supercuspidal".into())),
        };
        debug_assert!(
            !report.distinguished || self.restrict_to_f(&self.central_character(pi)?)?.is_trivial(),
            "distinguished representation with central character nontrivial on F"
        );
        Ok(report)
    }

    /// Distinction by `(GL₂(F), χ_F∘det)`, computed on `π ⊗ χ̃^{-1}` for an
    /// extension `χ̃` of `χ_F`; the verdict is checked against a second
    /// extension when one exists.
    pub fn chi_distinction(&self, pi: &GL2Rep, chi_f: &SmoothCharacter) -> Result<DistinctionReport> {
        let exts = self.extensions_to_e(chi_f)?;
        let first = exts.first().ok_or(Error::ExtensionNotFound)?;
        let report = self.gl2f_distinction(&self.twist_gl2(pi, &first.inv())?)?;
        if let Some(last) = exts.last().filter(|l| *l != first) {
            if let Ok(other) = self.twist_gl2(pi, &last.inv()).and_then(|p| self.gl2f_distinction(&p)) {
                assert_eq!(other.distinguished, report.distinguished, "verdict depends on the extension");
            }
        }
        Ok(report)
    }

    pub fn omega_distinction(&self, pi: &GL2Rep) -> Result<DistinctionReport> {
        self.chi_distinction(pi, &self.omega.clone())
    }

    /// `π^σ ≅ π^∨`.
    pub fn is_sigma_selfdual(&self, pi: &GL2Rep) -> Result<bool> {
        self.validate_gl2(pi)?;
        let sd = |c: &SmoothCharacter| -> Result<SmoothCharacter> { Ok(self.galois_twist(c)?.mul(c)) };
        match pi {
            GL2Rep::PrincipalSeries { chi1, chi2 } => {
                let (s1, s2) = (self.galois_twist(chi1)?, self.galois_twist(chi2)?);
                let (d1, d2) = (chi1.inv(), chi2.inv());
                Ok((s1 == d1 && s2 == d2) || (s1 == d2 && s2 == d1))
            }
            GL2Rep::Steinberg { chi } | GL2Rep::Special { chi } => Ok(sd(chi)?.is_trivial()),
            GL2Rep::Dihedral { .. } => {
                let phi = self.parameter(pi)?;
                self.is_isomorphic(&self.sigma_conjugate(&phi)?, &self.dual(&phi))
            }
            GL2Rep::Primitive => Err(Error::UnsupportedTower("primitive supercuspidal".into())),
        }
    }

    pub fn dichotomy_check(&self, pi: &GL2Rep) -> Result<Dichotomy> {
        if !self.is_sigma_selfdual(pi)? {
            return Ok(Dichotomy::NotSelfdual);
        }
        let d = self.gl2f_distinction(pi)?.distinguished;
        let w = self.omega_distinction(pi)?.distinguished;
        Ok(match (d, w) {
            (true, true) => Dichotomy::Both,
            (true, false) => Dichotomy::Dist,
            (false, true) => Dichotomy::OmegaDist,
            (false, false) => Dichotomy::Neither,
        })
    }

    /// Distinction by the unitary group: `π^σ ≅ π`.
    pub fn unitary_distinguished(&self, pi: &GL2Rep) -> Result<bool> {
        let GL2Rep::Dihedral { .. } = pi else {
            return Err(Error::InvalidRep("unitary distinction is decided for dihedral supercuspidals".into()));
        };
        self.validate_gl2(pi)?;
        let phi = self.parameter(pi)?;
        self.is_isomorphic(&self.sigma_conjugate(&phi)?, &phi)
    }
}

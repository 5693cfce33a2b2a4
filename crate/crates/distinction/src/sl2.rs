//! Restriction from `GL₂(E)` to `SL₂(E)` and distinction by `SL₂(F)`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::characters::{Setting, SmoothCharacter};
use crate::error::{Error, Result};
use crate::gl2::GL2Rep;
use crate::localfield::FieldTag;
use crate::prasad::enumerate_pgl2;
use crate::scalars::CongruenceClass;
use crate::weilrep::KGalois;

/// Twist-stabilizer data of a dihedral supercuspidal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionProfile {
    /// Characters χ of `E^×` with `π ⊗ χ ≅ π`.
    #[serde(rename = "Y")]
    pub y: Vec<SmoothCharacter>,
    /// Members of `Y` trivial on `F^×`.
    #[serde(rename = "Y_plus")]
    pub y_plus: Vec<SmoothCharacter>,
    pub lg: usize,
    pub lg_plus: usize,
    #[serde(rename = "S_phi_order")]
    pub s_phi_order: u64,
}

/// The row of the principal-series table that applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrinCase {
    /// Irreducible, `χ|_F = 1`, `χ ≠ 1`.
    IrreducibleTrivialOnF,
    /// Irreducible, `χ^σ = χ`.
    IrreducibleGaloisInvariant,
    /// `χ = ν^{±1}`, banal.
    BanalNu,
    /// `χ = χ_F∘N ≠ 1` quadratic with `χ_F² = 1`.
    NormSquareTrivial,
    /// `χ = χ_F∘N` quadratic with `χ_F² = ω_{E/F}`.
    NormSquareOmega,
    /// `ℓ | q_E + 1`, `χ = ν`: the trivial constituent.
    TrivialConstituent,
    /// `ℓ | q_E − 1`: the Steinberg constituent of `I(1)`.
    Steinberg,
    NotDistinguished,
    /// `ℓ | q_F − 1`, `χ = χ_F∘N` with `χ_F² = 1`: left open.
    Undetermined,
    /// Distinguished, in no row of the table.
    NotCovered,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrinReport {
    /// `Hom_{SL₂(F)}(I(χ), 1) ≠ 0`.
    pub distinguished: bool,
    /// `dim Hom_{SL₂(F)}(τ, 1)` for the distinguished constituent τ.
    pub multiplicity: Option<u32>,
    pub case: PrinCase,
}

impl Setting {
    pub fn restriction_profile(&self, pi: &GL2Rep) -> Result<RestrictionProfile> {
        let GL2Rep::Dihedral { .. } = pi else {
            return Err(Error::InvalidRep("restriction profiles are computed for dihedral supercuspidals".into()));
        };
        self.validate_gl2(pi)?;
        let phi = self.parameter(pi)?;
        let mut y = Vec::new();
        for chi in self.quadratic_characters(FieldTag::E)? {
            if self.is_isomorphic(&self.twist(&phi, &chi)?, &phi)? {
                y.push(chi);
            }
        }
        let mut y_plus = Vec::new();
        for chi in &y {
            if self.restrict_to_f(chi)?.is_trivial() {
                y_plus.push(chi.clone());
            }
        }
        let s_phi_order = self.dihedral_centralizer_order(&phi)?;
        assert_eq!(s_phi_order as usize, y.len(), "centralizer order differs from the twist count");
        Ok(RestrictionProfile { lg: y.len(), lg_plus: y_plus.len(), y, y_plus, s_phi_order })
    }

    /// Characters χ_F of `F^×` for which π is `(GL₂(F), χ_F)`-distinguished.
    pub fn x_set(&self, pi: &GL2Rep) -> Result<Vec<SmoothCharacter>> {
        let central = self.restrict_to_f(&self.central_character(pi)?)?;
        let candidates = if central.is_trivial() {
            self.quadratic_characters(FieldTag::F)?
        } else {
            self.f_characters()?.into_iter().filter(|c| c.pow(2) == central).collect()
        };
        let mut out = Vec::new();
        for chi_f in candidates {
            if self.chi_distinction(pi, &chi_f)?.distinguished {
                out.push(chi_f);
            }
        }
        Ok(out)
    }

    /// `dim Hom_{SL₂(F)}(τ, 1)` for a component τ of `π|_{SL₂(E)}`, as
    /// `lg₊² / lg`.
    pub fn sl2_supercuspidal_multiplicity(&self, pi: &GL2Rep, assume_component_distinguished: bool) -> Result<u32> {
        if !assume_component_distinguished && self.x_set(pi)?.is_empty() {
            return Err(Error::NotDistinguished);
        }
        let prof = self.restriction_profile(pi)?;
        let (lp, l) = (prof.lg_plus, prof.lg);
        let m = match (lp, l) {
            (1, 1) => 1,
            (2, 4) => 1,
            (2, 2) => 2,
            (4, 4) => 4,
            _ => return Err(Error::OutOfCaseTable),
        };
        assert_eq!(lp * lp, m as usize * l, "table row disagrees with lg₊²/lg");
        Ok(m)
    }

    /// Distinction of `I(χ)` and the multiplicity of its distinguished
    /// constituent.
    pub fn sl2_principal_distinguished(&self, chi: &SmoothCharacter) -> Result<PrinReport> {
        if chi.domain != FieldTag::E {
            return Err(Error::WrongField);
        }
        let on_f = self.restrict_to_f(chi)?;
        let invariant = self.is_galois_invariant(chi)?;
        let distinguished = on_f.is_trivial() || self.is_trivial_on_e1(chi)?;
        let report = |m: Option<u32>, case| Ok(PrinReport { distinguished, multiplicity: m, case });
        if !distinguished {
            return report(Some(0), PrinCase::NotDistinguished);
        }
        let nu = self.nu(FieldTag::E);
        let is_nu = *chi == nu || *chi == nu.inv();
        let (qe, qf) = (self.q_e_class(), self.q_f_class());
        if !is_nu && (!chi.is_quadratic() || chi.is_trivial()) {
            return if invariant {
                report(Some(2), PrinCase::IrreducibleGaloisInvariant)
            } else {
                report(Some(1), PrinCase::IrreducibleTrivialOnF)
            };
        }
        // Reducible: χ = ν^{±1} or χ a nontrivial quadratic character.
        let norm_square = || -> Result<Option<bool>> {
            if !invariant || chi.is_trivial() || !chi.is_quadratic() {
                return Ok(None);
            }
            let eta = self.norm_preimages(chi)?.into_iter().next().ok_or(Error::ExtensionNotFound)?;
            let sq = eta.pow(2);
            Ok(if sq.is_trivial() {
                Some(true)
            } else if sq == self.omega {
                Some(false)
            } else {
                None
            })
        };
        let by_norm_square = |sq: Option<bool>| match sq {
            Some(true) => report(Some(3), PrinCase::NormSquareTrivial),
            Some(false) => report(Some(1), PrinCase::NormSquareOmega),
            None => report(None, PrinCase::NotCovered),
        };
        if qf == CongruenceClass::OneMod {
            return if chi.is_trivial() {
                report(Some(2), PrinCase::Steinberg)
            } else {
                match norm_square()? {
                    Some(false) => report(Some(1), PrinCase::NormSquareOmega),
                    Some(true) => report(None, PrinCase::Undetermined),
                    None => report(None, PrinCase::NotCovered),
                }
            };
        }
        match qe {
            CongruenceClass::Banal if is_nu => report(Some(1), PrinCase::BanalNu),
            CongruenceClass::Banal => by_norm_square(norm_square()?),
            CongruenceClass::MinusOneMod if is_nu => report(Some(1), PrinCase::TrivialConstituent),
            CongruenceClass::OneMod if chi.is_trivial() => report(Some(2), PrinCase::Steinberg),
            CongruenceClass::OneMod => by_norm_square(norm_square()?),
            CongruenceClass::MinusOneMod => report(None, PrinCase::NotCovered),
        }
    }

    /// Dihedral supercuspidals for the restriction checks: the `PGL₂` family
    /// of the sweep, plus every θ of ϖ-order at most 4 with `(θ/θ^τ)² = 1`,
    /// which is where `lg = 4` occurs. One θ per τ-orbit.
    pub fn dihedral_family(&self) -> Result<Vec<GL2Rep>> {
        let (reps, _) = enumerate_pgl2(self)?;
        let mut out: Vec<GL2Rep> = reps.into_iter().filter(|r| matches!(r, GL2Rep::Dihedral { .. })).collect();
        let mut seen: BTreeSet<(u8, SmoothCharacter)> = out
            .iter()
            .filter_map(|r| match r {
                GL2Rep::Dihedral { k, theta } => Some((*k, theta.clone())),
                _ => None,
            })
            .collect();
        for i in 0..self.sys.ks.len() as u8 {
            if matches!(self.kweil(i)?.galois, KGalois::NotGalois) {
                continue;
            }
            for theta in self.enumerate_characters(FieldTag::K(i), 4, self.sys.spec.depth)? {
                let tt = self.tau_twist(i, &theta)?;
                if tt == theta || !theta.div(&tt).is_quadratic() || self.field_for(&[&theta]).is_err() {
                    continue;
                }
                if seen.contains(&(i, tt.clone())) || !seen.insert((i, theta.clone())) {
                    continue;
                }
                out.push(GL2Rep::Dihedral { k: i, theta });
            }
        }
        Ok(out)
    }
}

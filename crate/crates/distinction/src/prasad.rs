//! End-to-end check that ω-distinction of a generic `PGL₂(E)`
//! representation matches the existence of a `W_F`-lift of its modified
//! parameter, and the counterexample to the unmodified statement.

use std::collections::BTreeSet;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::characters::{Setting, SmoothCharacter};
use crate::error::{Error, Result};
use crate::gl2::GL2Rep;
use crate::localfield::{ExtType, FieldSpec, FieldTag};
use crate::scalars::CongruenceClass;
use crate::weildeligne::{LiftCase, LiftWitness, WdClass};
use crate::weilrep::{KGalois, WeilDomain, WeilRep2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrasadVerdict {
    pub rep: GL2Rep,
    /// ω_{E/F}-distinction.
    pub lhs: bool,
    /// Lift existence by the closed-form case analysis.
    pub rhs: bool,
    /// Lift existence by exhaustive search.
    pub rhs_oracle: bool,
    pub agree: bool,
    pub case: LiftCase,
    pub class: WdClass,
    pub witness: Option<String>,
}

impl PrasadVerdict {
    /// All three code paths agree.
    pub fn consistent(&self) -> bool {
        self.agree && self.rhs == self.rhs_oracle
    }
}

pub fn prasad_check(s: &Setting, pi: &GL2Rep) -> Result<PrasadVerdict> {
    let lhs = s.omega_distinction(pi)?.distinguished;
    let class = s.p_inject(&s.pv(pi)?)?;
    let closed = s.lift_exists_closed_form(&class)?;
    let found = s.lift_search(&class)?;
    Ok(PrasadVerdict {
        rep: pi.clone(),
        lhs,
        rhs: closed.exists,
        rhs_oracle: found.is_some(),
        agree: lhs == closed.exists,
        case: closed.case,
        class,
        witness: found.as_ref().map(LiftWitness::describe),
    })
}

/// Counts of representations left out of a sweep, by reason.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    /// θ whose values need a finite field beyond the table limit.
    pub unrepresentable: usize,
    /// Towers `K/F` that are not Galois.
    pub non_galois: usize,
    /// Primitive supercuspidals (only for p = 2).
    pub primitive: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub spec: FieldSpec,
    pub total: usize,
    pub disagreements: usize,
    pub p_is_identity: bool,
    pub skipped: Skipped,
    pub verdicts: Vec<PrasadVerdict>,
}

/// Every generic representation of `PGL₂(E)` reachable in the model.
pub fn enumerate_pgl2(s: &Setting) -> Result<(Vec<GL2Rep>, Skipped)> {
    let mut reps = Vec::new();
    let mut skipped = Skipped::default();
    let mut seen = BTreeSet::new();
    for chi in s.e_characters()? {
        let inv = chi.inv();
        if seen.contains(&inv) || !s.ps_irreducible(&chi, &inv) {
            continue;
        }
        seen.insert(chi.clone());
        reps.push(GL2Rep::PrincipalSeries { chi1: chi, chi2: inv });
    }
    let quad = s.quadratic_characters(FieldTag::E)?;
    if s.q_e_class() == CongruenceClass::MinusOneMod {
        reps.extend(quad.iter().map(|c| GL2Rep::Special { chi: c.clone() }));
    } else {
        reps.extend(quad.iter().map(|c| GL2Rep::Steinberg { chi: c.clone() }));
    }
    for i in 0..s.sys.ks.len() as u8 {
        if matches!(s.kweil(i)?.galois, KGalois::NotGalois) {
            skipped.non_galois += 1;
            continue;
        }
        let (thetas, unrepresentable) = dihedral_thetas(s, i)?;
        skipped.unrepresentable += unrepresentable;
        reps.extend(thetas.into_iter().map(|theta| GL2Rep::Dihedral { k: i, theta }));
    }
    if s.sys.spec.p == 2 {
        skipped.primitive += 1;
    }
    Ok((reps, skipped))
}

/// One θ per τ-orbit of characters of `K(i)^×` with `θ|_{E^×} = ω_{K/E}`
/// and `θ ≠ θ^τ`, plus the number left out for lack of a coefficient field.
pub fn dihedral_thetas(s: &Setting, i: u8) -> Result<(Vec<SmoothCharacter>, usize)> {
    let kw = s.kweil(i)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut unrepresentable = 0;
    for theta in s.extensions_to_k(i, &kw.omega_ke)? {
        let tt = s.tau_twist(i, &theta)?;
        if tt == theta || seen.contains(&tt) {
            continue;
        }
        seen.insert(theta.clone());
        if s.field_for(&[&theta]).is_err() {
            unrepresentable += 1;
            continue;
        }
        out.push(theta);
    }
    Ok((out, unrepresentable))
}

/// Runs [`prasad_check`] on every enumerated representation.
pub fn sweep(s: &Setting, parallel: bool) -> Result<SweepReport> {
    let (reps, skipped) = enumerate_pgl2(s)?;
    let verdicts = check_all(s, &reps, parallel)?;
    let disagreements = verdicts.iter().filter(|v| !v.consistent()).count();
    let p_is_identity = verdicts.iter().all(|v| v.class.is_nilpotent());
    Ok(SweepReport { spec: s.sys.spec, total: verdicts.len(), disagreements, p_is_identity, skipped, verdicts })
}

#[cfg(feature = "parallel")]
fn check_all(s: &Setting, reps: &[GL2Rep], parallel: bool) -> Result<Vec<PrasadVerdict>> {
    if parallel {
        reps.par_iter().map(|pi| prasad_check(s, pi)).collect()
    } else {
        reps.iter().map(|pi| prasad_check(s, pi)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn check_all(s: &Setting, reps: &[GL2Rep], _parallel: bool) -> Result<Vec<PrasadVerdict>> {
    reps.iter().map(|pi| prasad_check(s, pi)).collect()
}

/// The special representation whose naive nilpotent parameter lifts to
/// `W_F` although the representation is not ω-distinguished.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub rep: GL2Rep,
    pub naive_class: WdClass,
    pub lift: LiftWitness,
    pub omega_distinguished: bool,
}

pub fn classical_counterexample(s: &Setting) -> Result<Option<Counterexample>> {
    if s.q_e_class() != CongruenceClass::MinusOneMod || s.sys.spec.ext != ExtType::Unramified {
        return Err(Error::WrongRegime("needs q_E = -1 mod ell and E/F unramified".into()));
    }
    let rep = GL2Rep::Special { chi: s.trivial(FieldTag::E) };
    let naive = s.pv(&rep)?;
    let naive_class = s.wd_class(&naive)?;
    let omega_distinguished = s.omega_distinction(&rep)?.distinguished;
    Ok(s.lift_search(&naive_class)?.map(|lift| Counterexample { rep, naive_class, lift, omega_distinguished }))
}

/// The nilpotent parameter `(Φ, 0)` of `W_E` with `Φ = ν^{-1/2} ⊕ ν^{1/2}`.
pub fn special_semisimple_parameter(s: &Setting) -> WeilRep2 {
    let nh = s.nu_half(FieldTag::E);
    WeilRep2::sum(WeilDomain::E, nh.inv(), nh)
}

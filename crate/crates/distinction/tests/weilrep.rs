mod common;

use distinction::characters::{Setting, SmoothCharacter};
use distinction::localfield::FieldTag;
use distinction::prasad::dihedral_thetas;
use distinction::scalars::{invertible_in_span, RootOfUnity};
use distinction::weilrep::{DualSign, MonoMat, WeilDomain, WeilElem, WeilRep2};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{label, suite};

fn random_weil(s: &Setting, d: WeilDomain, rng: &mut StdRng) -> WeilElem {
    let f = s.top_field(d);
    let ex: Vec<u64> = f.units.orders.iter().map(|&o| rng.gen_range(0..o)).collect();
    // Units only: valuation then comes from s² = t and stays inside the working precision.
    let x = f.from_exponents(0, &ex);
    let eps = if d == WeilDomain::E { 0 } else { rng.gen_range(0..2) };
    WeilElem { x: f.key(&x), eps }
}

/// A few representations of `W_{E/F}`: sums of F-characters and inductions
/// of E-characters that are not Galois-invariant.
fn ef_reps(s: &Setting) -> Vec<WeilRep2> {
    let fc = s.f_characters().unwrap();
    let mut out: Vec<WeilRep2> =
        fc.iter().take(6).map(|c| WeilRep2::sum(WeilDomain::EF, c.clone(), s.nu(FieldTag::F))).collect();
    for theta in s.e_characters().unwrap() {
        if !s.is_galois_invariant(&theta).unwrap() {
            out.push(WeilRep2::Induced { domain: WeilDomain::EF, theta });
        }
        if out.len() >= 14 {
            break;
        }
    }
    out
}

#[test]
fn trivial_sum_is_the_identity() {
    for s in suite() {
        let triv = WeilRep2::sum(WeilDomain::EF, s.trivial(FieldTag::F), s.trivial(FieldTag::F));
        for g in s.weil_generators(WeilDomain::EF) {
            assert_eq!(s.evaluate(&triv, &g).unwrap(), MonoMat::identity(2));
        }
    }
}

#[test]
fn induced_matrix_at_s() {
    for s in suite() {
        let t = s.sys.f_to_e(&s.t);
        for mu in s.e_characters().unwrap().into_iter().take(40) {
            let rep = WeilRep2::Induced { domain: WeilDomain::EF, theta: mu.clone() };
            let m = s.evaluate(&rep, &WeilElem { x: s.sys.e.one(), eps: 1 }).unwrap();
            assert_eq!(m, MonoMat::anti(s.eval(&mu, &t).unwrap(), RootOfUnity::ONE), "{}", label(s));
        }
    }
}

#[test]
fn homomorphism_on_random_pairs() {
    let mut rng = StdRng::seed_from_u64(11);
    for s in suite() {
        let reps = ef_reps(s);
        for _ in 0..200 {
            let rep = &reps[rng.gen_range(0..reps.len())];
            let a = random_weil(s, WeilDomain::EF, &mut rng);
            let b = random_weil(s, WeilDomain::EF, &mut rng);
            let ab = s.weil_mul(WeilDomain::EF, &a, &b).unwrap();
            let lhs = s.evaluate(rep, &ab).unwrap();
            let rhs = s.evaluate(rep, &a).unwrap().mul(&s.evaluate(rep, &b).unwrap());
            assert_eq!(lhs, rhs, "{}", label(s));
        }
    }
}

#[test]
fn isomorphism_examples() {
    for s in suite() {
        for rep in ef_reps(s) {
            assert!(s.is_isomorphic(&rep, &rep).unwrap());
            match &rep {
                WeilRep2::Sum { domain, chi1, chi2 } => {
                    let swapped = WeilRep2::sum(*domain, chi2.clone(), chi1.clone());
                    assert!(s.is_isomorphic(&rep, &swapped).unwrap());
                }
                WeilRep2::Induced { domain, theta } => {
                    let conj = WeilRep2::Induced { domain: *domain, theta: s.galois_twist(theta).unwrap() };
                    assert!(s.is_isomorphic(&rep, &conj).unwrap());
                    assert!(s.is_irreducible(&rep).unwrap());
                }
            }
        }
        let a = WeilRep2::sum(WeilDomain::E, s.trivial(FieldTag::E), s.trivial(FieldTag::E));
        let b = WeilRep2::sum(WeilDomain::E, s.trivial(FieldTag::E), s.omega_e());
        assert!(!s.is_isomorphic(&a, &b).unwrap());
    }
}

trait OmegaE {
    fn omega_e(&self) -> SmoothCharacter;
}

impl OmegaE for Setting {
    /// Some nontrivial quadratic character of E.
    fn omega_e(&self) -> SmoothCharacter {
        self.quadratic_characters(FieldTag::E).unwrap().into_iter().find(|c| !c.is_trivial()).unwrap()
    }
}

#[test]
fn induced_irreducible_iff_not_galois_invariant() {
    for s in suite() {
        for theta in s.e_characters().unwrap().into_iter().step_by(3) {
            let invariant = s.is_galois_invariant(&theta).unwrap();
            if invariant {
                continue;
            }
            let rep = WeilRep2::Induced { domain: WeilDomain::EF, theta };
            assert!(s.is_irreducible(&rep).unwrap());
        }
        let (thetas, _) = dihedral_thetas(s, 0).unwrap();
        for theta in thetas.into_iter().take(10) {
            let rep = WeilRep2::Induced { domain: WeilDomain::KE(0), theta: theta.clone() };
            assert!(s.is_irreducible(&rep).unwrap());
            let tt = s.tau_twist(0, &theta).unwrap();
            let red = WeilRep2::Induced { domain: WeilDomain::KE(0), theta: theta.mul(&tt) };
            // θ·θ^τ is τ-invariant, so its induction splits.
            assert!(!s.is_irreducible(&red).unwrap());
        }
    }
}

#[test]
fn determinant_matches_direct_computation() {
    let mut rng = StdRng::seed_from_u64(3);
    for s in suite() {
        for rep in ef_reps(s) {
            let det = s.det_character(&rep).unwrap();
            for _ in 0..20 {
                let w = random_weil(s, WeilDomain::EF, &mut rng);
                assert_eq!(s.evaluate(&rep, &w).unwrap().det(), s.eval_on(WeilDomain::EF, &det, &w).unwrap());
            }
        }
        let (thetas, _) = dihedral_thetas(s, 1).unwrap();
        for theta in thetas.into_iter().take(5) {
            let rep = WeilRep2::Induced { domain: WeilDomain::KE(1), theta };
            let det = s.det_character(&rep).unwrap();
            for _ in 0..20 {
                let w = random_weil(s, WeilDomain::KE(1), &mut rng);
                assert_eq!(s.evaluate(&rep, &w).unwrap().det(), s.eval_on(WeilDomain::KE(1), &det, &w).unwrap());
            }
        }
    }
}

#[test]
fn restriction_to_e() {
    for s in suite() {
        let tf = s.trivial(FieldTag::F);
        let te = s.trivial(FieldTag::E);
        let triv = WeilRep2::sum(WeilDomain::EF, tf.clone(), tf);
        assert_eq!(s.restrict_to_e(&triv).unwrap(), WeilRep2::sum(WeilDomain::E, te.clone(), te));
        let nu = WeilRep2::sum(WeilDomain::EF, s.nu(FieldTag::F), s.nu(FieldTag::F));
        assert_eq!(s.restrict_to_e(&nu).unwrap(), WeilRep2::sum(WeilDomain::E, s.nu(FieldTag::E), s.nu(FieldTag::E)));
        for rep in ef_reps(s) {
            if let WeilRep2::Induced { theta, .. } = &rep {
                let r = s.restrict_to_e(&rep).unwrap();
                assert!(r.characters().contains(&theta));
            }
        }
    }
}

#[test]
fn sign_examples() {
    for s in suite() {
        let te = s.trivial(FieldTag::E);
        assert_eq!(s.conjugate_dual_sign(&WeilRep2::sum(WeilDomain::E, te.clone(), te)).unwrap(), DualSign::Both);
        for mu in s.e_characters().unwrap() {
            let sigma = s.galois_twist(&mu).unwrap();
            if !mu.mul(&sigma).is_trivial() {
                continue;
            }
            let r = s.restrict_to_f(&mu).unwrap();
            let sign = s.conjugate_dual_sign(&WeilRep2::sum(WeilDomain::E, mu, sigma)).unwrap();
            if r == s.omega {
                assert!(matches!(sign, DualSign::ConjugateSymplectic | DualSign::Both));
            } else {
                assert!(matches!(sign, DualSign::ConjugateOrthogonal | DualSign::Both));
            }
        }
    }
}

#[test]
fn signs_depend_only_on_the_class_of_t() {
    for s in suite() {
        let mut moved = Setting::new(*s.spec()).unwrap();
        // A unit whose norm is not 1, so t really moves inside its class.
        let y = s
            .sys
            .e
            .elements_by_valuation(1)
            .into_iter()
            .find(|y| s.sys.e.val(y) == 0 && !s.sys.f.eq_trunc(&s.sys.norm(y), &s.sys.f.one()))
            .unwrap();
        moved.t = s.sys.f.mul(&s.t, &s.sys.norm(&y));
        assert!(!moved.t.is_empty() && s.eval(&s.omega, &moved.t).unwrap() == RootOfUnity::MINUS_ONE);
        for mu in s.e_characters().unwrap() {
            let sigma = s.galois_twist(&mu).unwrap();
            if !mu.mul(&sigma).is_trivial() {
                continue;
            }
            let rep = WeilRep2::sum(WeilDomain::E, mu, sigma);
            assert_eq!(s.conjugate_dual_sign(&rep).unwrap(), moved.conjugate_dual_sign(&rep).unwrap(), "{}", label(s));
        }
    }
}

#[test]
fn centralizer_rule_matches_solver_at_q_e_9() {
    let s = &suite()[0];
    let mut sizes = std::collections::BTreeSet::new();
    for i in 0..3u8 {
        let (thetas, _) = dihedral_thetas(s, i).unwrap();
        for theta in thetas {
            let rep = WeilRep2::Induced { domain: WeilDomain::KE(i), theta };
            let rule = s.dihedral_centralizer_order(&rep).unwrap();
            assert_eq!(s.dihedral_centralizer_solve(&rep).unwrap(), rule);
            sizes.insert(rule);
        }
    }
    assert!(sizes.is_subset(&[2, 4].into()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn twisting_and_duals(seed in any::<u64>(), which in 0usize..4) {
        let s = &suite()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let reps = ef_reps(s);
        let rep = &reps[rng.gen_range(0..reps.len())];
        let fc = s.f_characters().unwrap();
        let chi = &fc[rng.gen_range(0..fc.len())];
        let tw = s.twist(rep, chi).unwrap();
        // rep ⊗ χ, written generator by generator, is isomorphic to the twist.
        let scaled: Vec<MonoMat> = s
            .weil_generators(WeilDomain::EF)
            .iter()
            .map(|g| s.evaluate(rep, g).unwrap().scale(s.eval_on(WeilDomain::EF, chi, g).unwrap()))
            .collect();
        let (fq, basis) = s.intertwiners(&s.gen_matrices(&tw).unwrap(), &scaled).unwrap();
        prop_assert!(invertible_in_span(&fq, &basis).is_some());
        let dd = s.dual(&s.dual(rep));
        prop_assert!(s.is_isomorphic(&dd, rep).unwrap());
        let det_tw = s.det_character(&tw).unwrap();
        prop_assert_eq!(det_tw, s.det_character(rep).unwrap().mul(&chi.pow(2)));
    }
}

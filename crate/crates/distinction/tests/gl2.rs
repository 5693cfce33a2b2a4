mod common;

use distinction::characters::{NuHalf, Setting};
use distinction::gl2::{Dichotomy, GL2Rep, Rationale};
use distinction::localfield::FieldTag;
use distinction::prasad::enumerate_pgl2;
use distinction::scalars::CongruenceClass;
use proptest::prelude::*;

use common::{label, one_minus_one, suite};

#[test]
fn principal_series_multiplicity_two() {
    let s = &suite()[2];
    let t = s.trivial(FieldTag::E);
    let d = s.gl2f_distinction(&GL2Rep::PrincipalSeries { chi1: t.clone(), chi2: t }).unwrap();
    assert!(d.distinguished);
    assert_eq!(d.multiplicity, Some(2));
    assert_eq!(d.rationale, Rationale::SigmaDual);
}

#[test]
fn special_trivial_is_not_distinguished_at_p3_ell5() {
    let s = &suite()[0];
    let sp = GL2Rep::Special { chi: s.trivial(FieldTag::E) };
    assert!(!s.gl2f_distinction(&sp).unwrap().distinguished);
    assert!(!s.omega_distinction(&sp).unwrap().distinguished);
}

#[test]
fn banal_steinberg_omega() {
    let s = &suite()[3];
    for chi in s.quadratic_characters(FieldTag::E).unwrap() {
        let d = s.gl2f_distinction(&GL2Rep::Steinberg { chi: chi.clone() }).unwrap();
        let omega = s.restrict_to_f(&chi).unwrap() == s.omega;
        assert_eq!(d.distinguished, omega);
        if omega {
            assert_eq!(d.multiplicity, Some(1));
        }
    }
}

#[test]
fn ramified_special_positive_classes() {
    let s = &suite()[1];
    let nh = s.restrict_to_f(&s.nu_half(FieldTag::E)).unwrap();
    let mut seen = std::collections::BTreeSet::new();
    for chi in s.e_characters().unwrap() {
        let r = s.restrict_to_f(&chi).unwrap();
        let d = s.gl2f_distinction(&GL2Rep::Special { chi }).unwrap();
        assert_eq!(d.distinguished, r == s.omega || r == nh);
        if d.distinguished {
            seen.insert(d.rationale == Rationale::SpecialOmega);
        }
    }
    assert_eq!(seen.len(), 2, "both positive classes occur");
}

#[test]
fn steinberg_both_when_ell_divides_q_f_minus_one() {
    let s = &suite()[2];
    assert_eq!(s.q_f_class(), CongruenceClass::OneMod);
    let st = GL2Rep::Steinberg { chi: s.trivial(FieldTag::E) };
    assert!(s.chi_distinction(&st, &s.trivial(FieldTag::F)).unwrap().distinguished);
    assert!(s.chi_distinction(&st, &s.omega).unwrap().distinguished);
    assert_eq!(s.dichotomy_check(&st).unwrap(), Dichotomy::Both);
}

#[test]
fn principal_series_sigma_dual_pairs_are_selfdual() {
    for s in suite() {
        for chi in s.e_characters().unwrap() {
            let pair = GL2Rep::PrincipalSeries { chi1: chi.clone(), chi2: s.galois_twist(&chi).unwrap().inv() };
            assert!(s.is_sigma_selfdual(&pair).unwrap(), "{}", label(s));
        }
    }
}

#[test]
fn supercuspidal_dichotomy() {
    for s in suite() {
        for pi in enumerate_pgl2(s).unwrap().0.into_iter().filter(GL2Rep::is_supercuspidal) {
            match s.dichotomy_check(&pi).unwrap() {
                Dichotomy::Dist | Dichotomy::OmegaDist | Dichotomy::NotSelfdual => {}
                other => panic!("{}: supercuspidal with {other:?}", label(s)),
            }
            if s.gl2f_distinction(&pi).unwrap().distinguished {
                assert!(!s.omega_distinction(&pi).unwrap().distinguished);
            }
        }
    }
}

#[test]
fn central_character_of_distinguished_reps() {
    for s in suite().iter().chain([one_minus_one()]) {
        for pi in enumerate_pgl2(s).unwrap().0 {
            if s.gl2f_distinction(&pi).unwrap().distinguished {
                assert!(s.restrict_to_f(&s.central_character(&pi).unwrap()).unwrap().is_trivial());
            }
        }
    }
}

#[test]
fn verdicts_do_not_depend_on_the_square_root() {
    for s in suite().iter().chain([one_minus_one()]) {
        let odd = Setting::with_options(*s.spec(), NuHalf::Odd, None).unwrap();
        for chi in s.e_characters().unwrap() {
            let cands = [
                GL2Rep::Steinberg { chi: chi.clone() },
                GL2Rep::Special { chi: chi.clone() },
                GL2Rep::PrincipalSeries { chi1: chi.clone(), chi2: s.nu_half(FieldTag::E) },
            ];
            for pi in cands {
                if s.validate_gl2(&pi).is_err() {
                    continue;
                }
                let a = s.gl2f_distinction(&pi).unwrap().distinguished;
                let b = odd.gl2f_distinction(&pi).unwrap().distinguished;
                assert_eq!(a, b, "{}: {}", label(s), pi.label());
            }
        }
    }
}

#[test]
fn invalid_constructions() {
    let s = &suite()[0];
    assert!(s.validate_gl2(&GL2Rep::Steinberg { chi: s.trivial(FieldTag::E) }).is_err());
    assert!(s.validate_gl2(&GL2Rep::Special { chi: s.trivial(FieldTag::F) }).is_err());
    let s = &suite()[3];
    assert!(s.validate_gl2(&GL2Rep::Special { chi: s.trivial(FieldTag::E) }).is_err());
    assert!(s.gl2f_distinction(&GL2Rep::Primitive).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_base_change_twists_preserve_distinction(which in 0usize..4, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let s = &suite()[which];
        let reps = enumerate_pgl2(s).unwrap().0;
        let pi = &reps[i.index(reps.len())];
        // On GL₂(F), twisting by μ∘N with μ² = 1 multiplies by μ²∘det, which is trivial.
        let quad = s.quadratic_characters(FieldTag::F).unwrap();
        let mu = s.compose_norm(&quad[j.index(quad.len())]).unwrap();
        let tw = s.twist_gl2(pi, &mu).unwrap();
        prop_assert_eq!(s.gl2f_distinction(pi).unwrap().distinguished, s.gl2f_distinction(&tw).unwrap().distinguished);
        prop_assert_eq!(s.is_sigma_selfdual(pi).unwrap(), s.is_sigma_selfdual(&tw).unwrap());
    }

    #[test]
    fn principal_series_symmetry(which in 0usize..4, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>()) {
        let s = &suite()[which];
        let ec = s.e_characters().unwrap();
        let (a, b) = (ec[i.index(ec.len())].clone(), ec[j.index(ec.len())].clone());
        let x = s.gl2f_distinction(&GL2Rep::PrincipalSeries { chi1: a.clone(), chi2: b.clone() }).unwrap();
        let y = s.gl2f_distinction(&GL2Rep::PrincipalSeries { chi1: b, chi2: a }).unwrap();
        prop_assert_eq!(x.distinguished, y.distinguished);
        prop_assert_eq!(x.multiplicity, y.multiplicity);
    }
}

mod common;

use distinction::characters::{NuHalf, RestrictionClass, Setting, SmoothCharacter};
use distinction::localfield::{ExtType, FieldSpec, FieldTag};
use distinction::scalars::RootOfUnity;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{label, suite};

fn random_elem(s: &Setting, tag: FieldTag, rng: &mut StdRng) -> Vec<i64> {
    let f = s.field(tag);
    let ex: Vec<u64> = f.units.orders.iter().map(|&o| rng.gen_range(0..o)).collect();
    f.from_exponents(rng.gen_range(0..2), &ex)
}

#[test]
fn omega_is_the_norm_character() {
    for s in suite() {
        assert!(s.omega.is_quadratic() && !s.omega.is_trivial(), "{}", label(s));
        assert!(s.omega.pow(2).is_trivial());
        for y in s.sys.e.elements_by_valuation(1) {
            assert!(s.eval(&s.omega, &s.sys.norm(&y)).unwrap().is_one());
        }
        if s.spec().ext == ExtType::Unramified {
            assert!(s.omega.is_unramified());
            assert_eq!(s.omega.unif_value, RootOfUnity::MINUS_ONE);
        }
    }
}

#[test]
fn nu_and_its_square_root() {
    let s = &suite()[0];
    assert_eq!(s.nu(FieldTag::E).unif_value.order(), 2);
    assert!(suite()[2].nu(FieldTag::E).is_trivial());
    for s in suite() {
        for tag in [FieldTag::F, FieldTag::E] {
            for conv in [NuHalf::Even, NuHalf::Odd] {
                assert_eq!(s.nu_half_with(tag, conv).pow(2), s.nu(tag), "{}", label(s));
            }
            assert_ne!(s.nu_half_with(tag, NuHalf::Even), s.nu_half_with(tag, NuHalf::Odd));
        }
        assert_eq!(s.compose_norm(&s.nu(FieldTag::F)).unwrap(), s.nu(FieldTag::E));
    }
}

#[test]
fn restriction_examples() {
    for s in suite() {
        assert!(s.restrict_to_f(&s.trivial(FieldTag::E)).unwrap().is_trivial());
        for eta in s.f_characters().unwrap() {
            let chi = s.compose_norm(&eta).unwrap();
            assert_eq!(s.restrict_to_f(&chi).unwrap(), eta.pow(2));
            assert_eq!(s.galois_twist(&chi).unwrap(), chi);
            assert!(s.is_trivial_on_e1(&chi).unwrap());
        }
        assert!(s.compose_norm(&s.trivial(FieldTag::F)).unwrap().is_trivial());
    }
    // Unramified E/F share the uniformizer, so an unramified χ restricts to χ(ϖ_F) there.
    let s = &suite()[0];
    let mut chi = s.trivial(FieldTag::E);
    chi.unif_value = RootOfUnity::new(1, 4);
    let r = s.restrict_to_f(&chi).unwrap();
    let varpi_f = s.sys.f.unif();
    assert_eq!(r.unif_value, s.eval(&chi, &s.sys.f_to_e(&varpi_f)).unwrap());
    assert_eq!(r.unif_value, RootOfUnity::new(1, 4));
}

#[test]
fn galois_criteria_hold_for_every_character() {
    for s in suite() {
        for chi in s.e_characters().unwrap() {
            let sigma = s.galois_twist(&chi).unwrap();
            let class = s.restriction_class(&chi).unwrap();
            assert_eq!(chi.mul(&sigma).is_trivial(), class != RestrictionClass::Other);
            assert_eq!(s.is_galois_invariant(&chi).unwrap(), s.is_trivial_on_e1(&chi).unwrap());
        }
    }
}

#[test]
fn enumeration_counts() {
    let s = Setting::new(FieldSpec::new(3, 1, ExtType::Unramified, 5, 1)).unwrap();
    assert_eq!(s.enumerate_characters(FieldTag::F, 2, 1).unwrap().len(), 4);
    assert_eq!(s.enumerate_characters(FieldTag::E, 1, 0).unwrap(), vec![s.trivial(FieldTag::E)]);
    for s in suite().iter().chain([common::one_minus_one()]) {
        if s.spec().depth == 1 {
            let q = s.quadratic_characters(FieldTag::E).unwrap();
            assert_eq!(q.len(), 4, "{}", label(s));
            assert!(q.iter().any(SmoothCharacter::is_trivial));
        }
    }
}

#[test]
fn norm_preimages_compose_back() {
    let s = &suite()[1];
    for chi in s.e_characters().unwrap().into_iter().filter(|c| s.is_galois_invariant(c).unwrap()) {
        for eta in s.norm_preimages(&chi).unwrap() {
            assert_eq!(s.compose_norm(&eta).unwrap(), chi);
        }
    }
    for eta in s.f_characters().unwrap() {
        for chi in s.extensions_to_e(&eta).unwrap() {
            assert_eq!(s.restrict_to_f(&chi).unwrap(), eta);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_are_homomorphisms(seed in any::<u64>(), which in 0usize..4) {
        let s = &suite()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let chars = s.e_characters().unwrap();
        let chi = &chars[rng.gen_range(0..chars.len())];
        let psi = &chars[rng.gen_range(0..chars.len())];
        let x = random_elem(s, FieldTag::E, &mut rng);
        let y = random_elem(s, FieldTag::E, &mut rng);
        let xy = s.sys.e.mul(&x, &y);
        prop_assert_eq!(s.eval(chi, &xy).unwrap(), s.eval(chi, &x).unwrap().mul(s.eval(chi, &y).unwrap()));
        prop_assert_eq!(s.eval(&chi.mul(psi), &x).unwrap(), s.eval(chi, &x).unwrap().mul(s.eval(psi, &x).unwrap()));
        let sigma = s.galois_twist(chi).unwrap();
        prop_assert_eq!(s.eval(&sigma, &x).unwrap(), s.eval(chi, &s.sys.sigma(&x)).unwrap());
        prop_assert_eq!(&s.galois_twist(&sigma).unwrap(), chi);
        let r = s.restrict_to_f(chi).unwrap();
        let z = random_elem(s, FieldTag::F, &mut rng);
        prop_assert_eq!(s.eval(&r, &z).unwrap(), s.eval(chi, &s.sys.f_to_e(&z)).unwrap());
        prop_assert_eq!(s.restrict_to_f(&chi.mul(psi)).unwrap(), r.mul(&s.restrict_to_f(psi).unwrap()));
    }

    #[test]
    fn compose_norm_evaluates_through_the_norm(seed in any::<u64>(), which in 0usize..4) {
        let s = &suite()[which];
        let mut rng = StdRng::seed_from_u64(seed);
        let chars = s.f_characters().unwrap();
        let eta = &chars[rng.gen_range(0..chars.len())];
        let x = random_elem(s, FieldTag::E, &mut rng);
        let chi = s.compose_norm(eta).unwrap();
        prop_assert_eq!(s.eval(&chi, &x).unwrap(), s.eval(eta, &s.sys.norm(&x)).unwrap());
    }
}

mod common;

use distinction::localfield::FieldTag;
use distinction::prasad::{
    classical_counterexample, enumerate_pgl2, prasad_check, special_semisimple_parameter, sweep,
};
use distinction::scalars::CongruenceClass;
use distinction::weildeligne::WeilDeligneRep;

use common::{label, one_minus_one, suite};

#[test]
fn sequential_and_parallel_sweeps_agree() {
    for s in suite() {
        let a = sweep(s, false).unwrap();
        let b = sweep(s, true).unwrap();
        assert_eq!(a, b, "{}", label(s));
        assert_eq!(a.disagreements, 0);
        assert_eq!(a.total, enumerate_pgl2(s).unwrap().0.len());
    }
}

#[test]
fn injection_is_the_identity_in_the_banal_case() {
    let s = &suite()[3];
    assert_eq!(s.q_e_class(), CongruenceClass::Banal);
    assert!(sweep(s, false).unwrap().p_is_identity);
    // ℓ | q_E − 1 moves some Steinberg classes off the nilpotent cone.
    assert!(!sweep(one_minus_one(), false).unwrap().p_is_identity);
}

#[test]
fn verdicts_are_consistent_in_the_extra_regime() {
    let s = one_minus_one();
    for pi in enumerate_pgl2(s).unwrap().0 {
        let v = prasad_check(s, &pi).unwrap();
        assert!(v.consistent(), "{}", pi.label());
        assert_eq!(v.rhs_oracle, v.witness.is_some());
    }
}

#[test]
fn counterexample_to_the_naive_parameter() {
    let s = &suite()[0];
    let ce = classical_counterexample(s).unwrap().expect("the naive parameter lifts");
    assert!(!ce.omega_distinguished);
    assert_eq!(ce.naive_class, s.wd_class(&WeilDeligneRep::semisimple(special_semisimple_parameter(s))).unwrap());
    // The modified parameter does not lift.
    let v = prasad_check(s, &ce.rep).unwrap();
    assert!(!v.lhs && !v.rhs && !v.rhs_oracle);
}

#[test]
fn counterexample_needs_its_regime() {
    for s in &suite()[1..] {
        assert!(classical_counterexample(s).is_err(), "{}", label(s));
    }
}

#[test]
fn omega_distinguished_steinberg_lifts() {
    let s = &suite()[3];
    for chi in s.quadratic_characters(FieldTag::E).unwrap() {
        let v = prasad_check(s, &distinction::gl2::GL2Rep::Steinberg { chi: chi.clone() }).unwrap();
        assert!(v.consistent());
        assert_eq!(v.lhs, s.restrict_to_f(&chi).unwrap().is_trivial());
    }
}

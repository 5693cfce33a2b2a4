use distinction::scalars::*;
use proptest::prelude::*;

#[test]
fn roots_reduce() {
    assert_eq!(ru_mul(RootOfUnity::new(1, 2), RootOfUnity::new(1, 2)), RootOfUnity::ONE);
    assert_eq!(ru_mul(RootOfUnity::new(1, 3), RootOfUnity::new(1, 3)), RootOfUnity::new(2, 3));
    assert_eq!(ru_mul(RootOfUnity::new(1, 2), RootOfUnity::new(1, 4)), RootOfUnity::new(3, 4));
    assert_eq!(RootOfUnity::new(6, 8), RootOfUnity::new(3, 4));
    assert_eq!(RootOfUnity::new(-1, 4), RootOfUnity::new(3, 4));
    assert_eq!("-1/2".parse::<RootOfUnity>().unwrap(), RootOfUnity::MINUS_ONE);
    assert!("1/0".parse::<RootOfUnity>().is_err());
}

#[test]
fn product_agrees_with_field_multiplication() {
    let f9 = Fq::get(3, 2).unwrap();
    let a = RootOfUnity::new(1, 2);
    let b = RootOfUnity::new(1, 4);
    let lhs = f9.embed_root(ru_mul(a, b)).unwrap();
    let rhs = f9.mul(f9.embed_root(a).unwrap(), f9.embed_root(b).unwrap());
    assert_eq!(lhs, rhs);
}

#[test]
fn roots_with_ell_in_the_order_are_rejected() {
    assert!(RootOfUnity::checked(1, 3, 3).is_err());
    assert!(RootOfUnity::checked(1, 6, 3).is_err());
    assert!(RootOfUnity::checked(1, 4, 3).is_ok());
}

#[test]
fn embedding_small_cases() {
    let f5 = Fq::get(5, 1).unwrap();
    assert_eq!(f5.embed_root(RootOfUnity::ONE).unwrap(), f5.one());
    assert_eq!(embed_root(RootOfUnity::MINUS_ONE, 5, 1).unwrap(), Ff(4));
    let f9 = Fq::get(3, 2).unwrap();
    let z = RootOfUnity::new(1, 8);
    let x = f9.embed_root(z).unwrap();
    assert_eq!(f9.pow(x, 8), f9.one());
    assert_ne!(f9.pow(x, 4), f9.one());
    assert_eq!(f9.dlog(x).unwrap(), z);
    assert!(f9.embed_root(RootOfUnity::new(1, 5)).is_err());
}

#[test]
fn generator_has_the_defining_log() {
    for (ell, d) in [(3, 1), (3, 2), (5, 1), (5, 2), (7, 2)] {
        let f = Fq::get(ell, d).unwrap();
        let n = f.size() - 1;
        assert_eq!(f.dlog(f.generator()).unwrap(), RootOfUnity::new(1, n));
        assert_eq!(f.dlog(f.one()).unwrap(), RootOfUnity::ONE);
    }
}

#[test]
fn dlog_round_trips_exhaustively() {
    for (ell, d) in [(3, 2), (5, 2)] {
        let f = Fq::get(ell, d).unwrap();
        let g = f.generator();
        let mut x = f.one();
        for _ in 0..f.size() - 1 {
            assert_eq!(f.embed_root(f.dlog(x).unwrap()).unwrap(), x);
            x = f.mul(x, g);
        }
        assert_eq!(x, f.one());
    }
}

#[test]
fn prime_field_generator_is_least_primitive_root() {
    assert_eq!(Fq::get(5, 1).unwrap().generator(), Ff(2));
    assert_eq!(Fq::get(7, 1).unwrap().generator(), Ff(3));
    assert_eq!(Fq::get(11, 1).unwrap().generator(), Ff(2));
}

#[test]
fn subfield_embedding_is_compatible() {
    let f3 = Fq::get(3, 1).unwrap();
    let f9 = Fq::get(3, 2).unwrap();
    let m = RootOfUnity::MINUS_ONE;
    assert_eq!(f9.embed_from(&f3, f3.embed_root(m).unwrap()).unwrap(), f9.embed_root(m).unwrap());
}

#[test]
fn congruence_classes() {
    assert_eq!(q_mod_ell_class(9, 5).unwrap(), CongruenceClass::MinusOneMod);
    assert_eq!(q_mod_ell_class(49, 3).unwrap(), CongruenceClass::OneMod);
    assert_eq!(q_mod_ell_class(9, 7).unwrap(), CongruenceClass::Banal);
    assert!(q_mod_ell_class(9, 3).is_err());
}

#[test]
fn nullspace_of_rank_one() {
    let f = Fq::get(3, 1).unwrap();
    let ns = nullspace(&f, &[vec![Ff(1), Ff(1), Ff(0)]], 3);
    assert_eq!(ns.len(), 2);
    for v in ns {
        assert_eq!(f.add(v[0], v[1]), Ff(0));
    }
}

#[test]
fn matrix_basics() {
    let f = Fq::get(5, 1).unwrap();
    let a = Mat::from_rows(&[&[Ff(1), Ff(2)], &[Ff(3), Ff(4)]]);
    assert_eq!(a.det(&f), f.from_int(-2));
    assert_eq!(a.trace(&f), Ff(0));
    assert_eq!(a.mul(&f, &Mat::identity(2)), a);
    assert!(Mat::zero(2).is_zero());
}

#[test]
fn span_queries() {
    let f = Fq::get(3, 1).unwrap();
    let e12 = Mat::from_rows(&[&[Ff(0), Ff(1)], &[Ff(0), Ff(0)]]);
    let e21 = Mat::from_rows(&[&[Ff(0), Ff(0)], &[Ff(1), Ff(0)]]);
    assert!(invertible_in_span(&f, std::slice::from_ref(&e12)).is_none());
    assert!(det_identically_zero(&f, std::slice::from_ref(&e12)));
    assert!(invertible_in_span(&f, &[e12.clone(), e21.clone()]).is_some());
    assert!(singular_nonzero_in_span(&f, &[e12, e21]));
}

fn root() -> impl Strategy<Value = RootOfUnity> {
    // Orders dividing 80 = 3^4 − 1 all embed in F_81.
    (0i64..80, prop::sample::select(vec![1u64, 2, 4, 5, 8, 10, 16, 20, 40, 80]))
        .prop_map(|(n, d)| RootOfUnity::new(n, d))
}

proptest! {
    #[test]
    fn roots_form_a_group(a in root(), b in root(), c in root()) {
        prop_assert_eq!(a.mul(b), b.mul(a));
        prop_assert_eq!(a.mul(b).mul(c), a.mul(b.mul(c)));
        prop_assert!(a.mul(a.inv()).is_one());
        prop_assert_eq!(a.div(b).mul(b), a);
        prop_assert_eq!(a.pow(a.order() as i64), RootOfUnity::ONE);
    }

    #[test]
    fn embedding_is_a_homomorphism(a in root(), b in root()) {
        let f = Fq::get(3, 4).unwrap();
        let lhs = f.embed_root(a.mul(b)).unwrap();
        let rhs = f.mul(f.embed_root(a).unwrap(), f.embed_root(b).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(f.dlog(f.embed_root(a).unwrap()).unwrap(), a);
    }

    #[test]
    fn display_parses_back(a in root()) {
        prop_assert_eq!(a.to_string().parse::<RootOfUnity>().unwrap(), a);
    }

    #[test]
    fn field_inverse(x in 1u32..25) {
        let f = Fq::get(5, 2).unwrap();
        let x = f.from_coeffs(&[x % 5, x / 5]);
        prop_assume!(x != f.zero());
        prop_assert_eq!(f.mul(x, f.inv(x).unwrap()), f.one());
    }
}

use bergman_core::geometry::{check_reality, Model, PotentialJet};
use bergman_core::jet::{invert_map, Jet, JetMatrix, MultiIndex};
use bergman_core::kuranishi::check_identities;
use bergman_core::oracle::kernels::exact_cp1_kernel;
use bergman_core::random::{random_quartic_potential, random_vector_expansion, rng};
use bergman_core::recursion::{expand, required_potential_degree, verify_negligible};
use bergman_core::scalar::{Coefficient, GaussianRational as Q};
use num_complex::Complex64;
use proptest::prelude::*;

fn jet_in(num_vars: usize, trunc: u32) -> impl Strategy<Value = Jet<Q>> {
    let term = (prop::collection::vec(0u32..=3, num_vars), -5i64..=5, -5i64..=5, 1i64..=3);
    prop::collection::vec(term, 0..7).prop_map(move |terms| {
        let mut j = Jet::zero(num_vars, trunc);
        for (e, re, im, den) in terms {
            let c = Q::from_ratio(re, den) + Q::imag_unit() * Q::from_ratio(im, den);
            j.add_term(MultiIndex::from_exponents(&e), &c);
        }
        j
    })
}

/// Jet with zero constant term.
fn centred(num_vars: usize, trunc: u32) -> impl Strategy<Value = Jet<Q>> {
    jet_in(num_vars, trunc).prop_map(|mut j| {
        let c = j.constant_term();
        j.add_term(MultiIndex::zero(), &-c);
        j
    })
}

/// Jet with constant term in `{1, 2, −1, i}`.
fn unit(num_vars: usize, trunc: u32) -> impl Strategy<Value = Jet<Q>> {
    (centred(num_vars, trunc), 0usize..4).prop_map(|(mut j, pick)| {
        let c = [Q::one(), Q::from_int(2), Q::from_int(-1), Q::imag_unit()][pick].clone();
        j.add_term(MultiIndex::zero(), &c);
        j
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ring_axioms(a in jet_in(3, 5), b in jet_in(3, 5), c in jet_in(3, 5)) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&(&a - &b) + &b) == a);
    }

    #[test]
    fn derivatives_commute_and_obey_leibniz(a in jet_in(3, 6), b in jet_in(3, 6), i in 0usize..3, j in 0usize..3) {
        prop_assert_eq!(a.differentiate(i).differentiate(j), a.differentiate(j).differentiate(i));
        let lhs = (&a * &b).differentiate(i);
        let rhs = &(&a.differentiate(i) * &b) + &(&a * &b.differentiate(i));
        prop_assert_eq!(lhs.truncate(5), rhs.truncate(5));
    }

    #[test]
    fn composition_is_associative(
        f in jet_in(2, 4),
        g in (centred(2, 4), centred(2, 4)),
        h in (centred(2, 4), centred(2, 4)),
    ) {
        let g = [g.0, g.1];
        let h = [h.0, h.1];
        let gh: Vec<Jet<Q>> = g.iter().map(|gi| gi.compose(&h).unwrap()).collect();
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&gh).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn units_invert(u in unit(2, 6)) {
        let inv = u.invert_unit().unwrap();
        prop_assert_eq!(&u * &inv, Jet::one(2, 6));
    }

    #[test]
    fn exp_inverts_log(u in centred(2, 5)) {
        let one_plus = &Jet::one(2, 5) + &u;
        prop_assert_eq!(one_plus.log().unwrap().exp().unwrap(), one_plus);
    }

    #[test]
    fn determinant_is_multiplicative_on_inverse(
        a in unit(2, 4), b in centred(2, 4), c in centred(2, 4), d in unit(2, 4),
    ) {
        // constant part upper-triangular with unit diagonal, hence invertible
        let m = JetMatrix::new(2, 2, vec![a, b, c, d]).unwrap();
        let inv = m.inverse("test").unwrap();
        prop_assert!(m.mul(&inv).unwrap().is_identity(0.0));
        prop_assert_eq!(&m.det().unwrap() * &inv.det().unwrap(), Jet::one(2, 4));
    }

    #[test]
    fn map_inversion_round_trips(p in centred(2, 5), q in centred(2, 5)) {
        // F = identity + higher-order terms
        let strip = |j: &Jet<Q>| {
            let mut j = j.clone();
            for v in 0..2 {
                let c = j.coeff(&MultiIndex::unit(v));
                j.add_term(MultiIndex::unit(v), &-c);
            }
            j
        };
        let f = vec![&Jet::var(2, 5, 0) + &strip(&p), &Jet::var(2, 5, 1) + &strip(&q)];
        let g = invert_map(&f).unwrap();
        for (i, fi) in f.iter().enumerate() {
            prop_assert_eq!(fi.compose(&g).unwrap(), Jet::var(2, 5, i));
        }
    }

    #[test]
    fn conjugation_is_an_involutive_automorphism(a in jet_in(2, 3), b in jet_in(2, 3)) {
        for (x, y) in a.terms().zip(b.terms()) {
            let (x, y) = (x.1, y.1);
            prop_assert_eq!(x.conj().conj(), x.clone());
            prop_assert_eq!(x.mul_ref(y).conj(), x.conj().mul_ref(&y.conj()));
            prop_assert_eq!((x.clone() + y.clone()).conj(), x.conj() + y.conj());
        }
        prop_assert_eq!(a.hermitian_mirror().hermitian_mirror(), a);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn kuranishi_identities_hold(seed in 0u64..1000, n in 1usize..=2) {
        let phi = random_quartic_potential::<Q>(&mut rng(seed), n, 6).unwrap();
        prop_assert!(check_identities(&phi, 0.0).unwrap().all_hold());
    }

    #[test]
    fn negligible_amplitudes_vanish_after_s(seed in 0u64..1000, n in 1usize..=2) {
        let a = random_vector_expansion::<Q>(&mut rng(seed), n, 3, 8);
        let report = verify_negligible(&a).unwrap();
        prop_assert_eq!(report.max_residual(), 0.0);
    }

    #[test]
    fn random_potentials_are_real(seed in 0u64..1000) {
        let phi = random_quartic_potential::<Q>(&mut rng(seed), 2, 6).unwrap();
        prop_assert!(check_reality(phi.phi(), 0.0).is_ok());
        prop_assert!(phi.min_levi_eigenvalue() > 0.0);
    }

    #[test]
    fn coefficients_are_hermitian_with_unit_leading_term(seed in 0u64..1000) {
        let phi = random_quartic_potential::<Q>(&mut rng(seed), 1, required_potential_degree(2, 1)).unwrap();
        let seq = expand(&phi, 2, 1).unwrap();
        prop_assert!(seq.is_hermitian(0.0));
        prop_assert_eq!(seq.scalar_base_values()[0].clone(), Q::one());
    }

    #[test]
    fn cp1_bergman_function_is_constant_and_positive(k in 1u32..=100, re in -5.0f64..5.0, im in -5.0f64..5.0) {
        let ker = exact_cp1_kernel(k);
        let b = ker.bergman_function(&[Complex64::new(re, im)]);
        prop_assert!(b > 0.0);
        prop_assert!((b * std::f64::consts::PI / (k as f64 + 1.0) - 1.0).abs() < 1e-12);
        prop_assert!(ker.basis_norms().iter().all(|&v| v > 0.0));
    }
}

#[test]
fn model_potentials_satisfy_identities() {
    for model in [Model::Flat, Model::FubiniStudy] {
        for n in [1, 2] {
            let phi = PotentialJet::<Q>::model(model, n, 8).unwrap();
            assert!(check_identities(&phi, 0.0).unwrap().all_hold());
        }
    }
}

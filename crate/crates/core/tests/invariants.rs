use proptest::prelude::*;
use ssf_core::cayley::{cayley_sa, inverse_cayley};
use ssf_core::dilation::n_dilation;
use ssf_core::opcore::hs_norm;
use ssf_core::sample::{
    analytic_polynomial, contraction, hermitian, hermitian_pi, normal_contraction, trial_rng,
    trigonometric_polynomial,
};
use ssf_core::semispectral::semispectral_cdf;
use ssf_core::shift::{verify_trace_formula_linear, verify_trace_formula_mult};
use ssf_core::truncate::build_projections;
use ssf_core::{ComplexMatrix, PathSpec, ShiftFunction};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, ..ProptestConfig::default() }
}

fn min_hermitian_eigenvalue(m: &ComplexMatrix) -> f64 {
    m.hermitian_eigen().unwrap().values.iter().copied().fold(f64::INFINITY, f64::min)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn semispectral_jumps_are_positive_and_sum_to_identity(seed in any::<u64>(), dim in 1usize..5, n in 1u32..6) {
        let t = contraction(&mut trial_rng(seed, 0), dim);
        let cdf = semispectral_cdf(&t, n).unwrap();
        prop_assert!(cdf.mass_residual() < 1e-10);
        for j in cdf.jumps() {
            prop_assert!(j.angle > 0.0 && j.angle <= std::f64::consts::TAU);
            prop_assert!(min_hermitian_eigenvalue(&j.block) > -1e-10);
        }
        let powers = t.powers(n as usize);
        for k in 0..=n as usize {
            prop_assert!(cdf.moment(k as i64).approx_eq(&powers[k], 1e-9));
            prop_assert!(cdf.moment(-(k as i64)).approx_eq(&powers[k].adjoint(), 1e-9));
        }
    }

    #[test]
    fn dilation_is_unitary_and_compresses_powers(seed in any::<u64>(), dim in 1usize..5, n in 1u32..7) {
        let t = contraction(&mut trial_rng(seed, 1), dim);
        let nd = n_dilation(&t, n).unwrap();
        prop_assert!(nd.unitary().unitarity_residual() < 1e-12);
        let powers = t.powers(n as usize);
        for k in 0..=n {
            prop_assert!(nd.compression(k).approx_eq(&powers[k as usize], 1e-12));
        }
    }

    #[test]
    fn linear_trace_formula_holds(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = trial_rng(seed, 2);
        let path = PathSpec::between(&contraction(&mut rng, dim), &contraction(&mut rng, dim)).unwrap();
        let p = analytic_polynomial(&mut rng, 6);
        let r = verify_trace_formula_linear(&path, &p, 1e-8).unwrap();
        prop_assert!(r.passed, "residual {}", r.residual);
    }

    #[test]
    fn multiplicative_trace_formula_holds(seed in any::<u64>(), dim in 1usize..5) {
        let mut rng = trial_rng(seed, 3);
        let path = PathSpec::multiplicative(contraction(&mut rng, dim), hermitian_pi(&mut rng, dim)).unwrap();
        let p = trigonometric_polynomial(&mut rng, 4);
        let r = verify_trace_formula_mult(&path, &p, 1e-7).unwrap();
        prop_assert!(r.passed, "residual {}", r.residual);
    }

    #[test]
    fn zeroth_linear_moment_is_bounded_by_half_hs_norm(seed in any::<u64>(), dim in 1usize..6) {
        let mut rng = trial_rng(seed, 4);
        let path = PathSpec::between(&contraction(&mut rng, dim), &contraction(&mut rng, dim)).unwrap();
        let v2 = hs_norm(path.direction()).powi(2);
        // The total mass of the shift function is Tr(V²)/2.
        let c0 = ShiftFunction::new(path.clone()).moment(0).unwrap();
        let tr = (path.direction() * path.direction()).trace() * 0.5;
        prop_assert!((c0 - tr).norm() < 1e-10 * (1.0 + v2));
        prop_assert!(c0.norm() <= 0.5 * v2 + 1e-12);
    }

    #[test]
    fn cayley_transform_round_trips(seed in any::<u64>(), dim in 1usize..6) {
        let h = hermitian(&mut trial_rng(seed, 5), dim, 3.0);
        let u = cayley_sa(&h).unwrap();
        prop_assert!(u.unitarity_residual() < 1e-12);
        prop_assert!(inverse_cayley(&u).unwrap().approx_eq(&h, 1e-9));
    }

    #[test]
    fn projections_are_nested_orthogonal(seed in any::<u64>(), dim in 2usize..7, rotate in any::<bool>()) {
        let n0 = normal_contraction(&mut trial_rng(seed, 6), dim, 0.8);
        let ranks: Vec<usize> = (1..=dim).collect();
        let seq = build_projections(&n0, &ranks, rotate.then_some(seed)).unwrap();
        for (i, &rank) in seq.ranks().iter().enumerate() {
            let pa = seq.projection(i);
            prop_assert!((&pa * &pa).approx_eq(&pa, 1e-12));
            prop_assert!(pa.is_hermitian(1e-12));
            prop_assert!((pa.trace().re - rank as f64).abs() < 1e-10);
            for j in i..seq.len() {
                prop_assert!((&pa * &seq.projection(j)).approx_eq(&pa, 1e-12));
            }
        }
    }
}

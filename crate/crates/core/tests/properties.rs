//! Invariants checked on randomly generated inputs.

use gpr::io;
use gpr::objective::{eval_f, hessian_quadratic_form, population_f, population_grad, wirtinger_grad};
use gpr::trs::{build_tangent_basis, kkt_report, solve_trs_exact, trs_eigen_oracle, RealTrsProblem};
use gpr::{align_phase, gen_gaussian_ensemble, ComplexSignal};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn objective_is_phase_invariant(n in 1usize..12, seed in 0u64..10_000, phi in -10.0f64..10.0) {
        let x = ComplexSignal::gaussian_unit(n, seed, 0).unwrap();
        let ens = gen_gaussian_ensemble(n, 8 * n, &x, seed).unwrap();
        let z = ComplexSignal::gaussian(n, seed, 1).unwrap();
        let f0 = eval_f(&ens, &z).unwrap();
        let f1 = eval_f(&ens, &z.rotated(phi)).unwrap();
        prop_assert!(close(f0, f1, 1e-12), "{f0} vs {f1}");
    }

    #[test]
    fn gradient_co_rotates(n in 1usize..10, seed in 0u64..10_000, phi in -4.0f64..4.0) {
        let x = ComplexSignal::gaussian_unit(n, seed, 0).unwrap();
        let ens = gen_gaussian_ensemble(n, 6 * n, &x, seed).unwrap();
        let z = ComplexSignal::gaussian(n, seed, 1).unwrap();
        let g = wirtinger_grad(&ens, &z).unwrap();
        let gr = wirtinger_grad(&ens, &z.rotated(phi)).unwrap();
        let expected = &g * Complex64::from_polar(1.0, phi);
        prop_assert!((gr - &expected).norm() <= 1e-11 * expected.norm().max(1e-300));
    }

    #[test]
    fn quadratic_form_is_homogeneous(n in 1usize..10, seed in 0u64..10_000, c in 0.1f64..5.0) {
        let x = ComplexSignal::gaussian_unit(n, seed, 0).unwrap();
        let ens = gen_gaussian_ensemble(n, 6 * n, &x, seed).unwrap();
        let z = ComplexSignal::gaussian(n, seed, 1).unwrap();
        let d = ComplexSignal::gaussian(n, seed, 2).unwrap();
        let q1 = hessian_quadratic_form(&ens, &z, &d).unwrap();
        let q2 = hessian_quadratic_form(&ens, &z, &d.scaled(c)).unwrap();
        prop_assert!(close(q2, c * c * q1, 1e-11));
    }

    #[test]
    fn alignment_is_optimal(n in 1usize..10, seed in 0u64..10_000, psi in 0.0f64..6.3) {
        let x = ComplexSignal::gaussian(n, seed, 0).unwrap();
        let z = ComplexSignal::gaussian(n, seed, 1).unwrap();
        let a = align_phase(&z, &x).unwrap();
        let other = (z.as_vector() - x.rotated(psi).as_vector()).norm();
        prop_assert!(a.dist <= other + 1e-12);
        prop_assert!(a.dist >= 0.0);
    }

    #[test]
    fn population_values_are_phase_invariant(n in 1usize..10, seed in 0u64..10_000, phi in -4.0f64..4.0) {
        let x = ComplexSignal::gaussian(n, seed, 0).unwrap();
        let z = ComplexSignal::gaussian(n, seed, 1).unwrap();
        let f0 = population_f(&x, &z).unwrap();
        let f1 = population_f(&x.rotated(0.3), &z.rotated(phi)).unwrap();
        prop_assert!(close(f0, f1, 1e-12));
        let g0 = population_grad(&x, &z).unwrap();
        let g1 = population_grad(&x, &z.rotated(phi)).unwrap();
        prop_assert!((g1 - g0 * Complex64::from_polar(1.0, phi)).norm() <= 1e-12 * (1.0 + z.norm().powi(3)));
    }

    #[test]
    fn tangent_basis_is_orthonormal_and_tangent(n in 1usize..10, seed in 0u64..10_000) {
        let z = ComplexSignal::gaussian(n, seed, 0).unwrap();
        let basis = build_tangent_basis(&z).unwrap();
        let u = basis.columns();
        prop_assert_eq!(u.ncols(), 2 * n - 1);
        let gram = DMatrix::from_fn(u.ncols(), u.ncols(), |i, j| u.column(i).dotc(&u.column(j)).re);
        prop_assert!((gram - DMatrix::identity(2 * n - 1, 2 * n - 1)).amax() < 1e-12);
        for j in 0..u.ncols() {
            prop_assert!(u.column(j).dotc(z.as_vector()).im.abs() < 1e-12 * z.norm());
        }
    }

    #[test]
    fn trs_solution_is_optimal(d in 1usize..12, seed in 0u64..10_000, r in 0.01f64..10.0) {
        let mut g = gpr::rng::stream(seed, gpr::rng::Domain::Instance, 0);
        let m = DMatrix::from_fn(d, d, |_, _| gpr::rng::standard_normal(&mut g));
        let a = (&m + m.transpose()) * 0.5;
        let b = DVector::from_fn(d, |_, _| gpr::rng::standard_normal(&mut g));
        let p = RealTrsProblem::new(a, b, r).unwrap();
        let sol = solve_trs_exact(&p, 1e-14).unwrap();
        let kkt = kkt_report(&p, &sol.w, sol.lambda).unwrap();
        prop_assert!(kkt.stationarity <= 1e-8);
        prop_assert!(kkt.feasibility <= 1e-10 * r);
        prop_assert!(kkt.dual_min_eig >= -1e-8);
        prop_assert!(sol.lambda >= 0.0);
        let oracle = trs_eigen_oracle(&p).unwrap();
        prop_assert!((p.q(&sol.w) - p.q(&oracle.w)).abs() <= 1e-8 * (1.0 + p.q(&oracle.w).abs()));
    }

    #[test]
    fn ensemble_container_round_trips(n in 1usize..8, m in 1usize..40, seed in 0u64..10_000) {
        let x = ComplexSignal::gaussian(n, seed, 0).unwrap();
        let ens = gen_gaussian_ensemble(n, m, &x, seed).unwrap();
        let bytes = io::encode_ensemble(&ens, Some(&x));
        let (back, xb) = io::decode_ensemble(&bytes).unwrap();
        prop_assert_eq!(back.rows(), ens.rows());
        prop_assert_eq!(back.magnitudes(), ens.magnitudes());
        let xb = xb.unwrap();
        prop_assert_eq!(xb.as_vector(), x.as_vector());
        prop_assert_eq!(io::encode_ensemble(&back, Some(&x)), bytes);
    }

    #[test]
    fn generation_is_deterministic(n in 1usize..8, m in 1usize..40, seed in 0u64..10_000) {
        let x = ComplexSignal::gaussian(n, seed, 0).unwrap();
        let a = gen_gaussian_ensemble(n, m, &x, seed).unwrap();
        let b = gen_gaussian_ensemble(n, m, &x, seed).unwrap();
        prop_assert_eq!(io::encode_ensemble(&a, None), io::encode_ensemble(&b, None));
    }
}

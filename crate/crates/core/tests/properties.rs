//! Property-based invariants over randomized inputs.

use eigenfiber::matrix::{
    bilinear, format_complex, mat_exp, numerical_rank, parse_complex, Complex64, ComplexMatrix,
    ComplexVector,
};
use proptest::prelude::*;

fn complex_entry() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn square_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(complex_entry(), n * n).prop_map(move |data| ComplexMatrix {
        rows: n,
        cols: n,
        data,
    })
}

fn vector(n: usize) -> impl Strategy<Value = ComplexVector> {
    proptest::collection::vec(complex_entry(), n).prop_map(ComplexVector::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_inverse_property(m in square_matrix(4), scale in 0.1..5.0f64) {
        // normalize the Frobenius norm to `scale` <= 5
        let norm = m.frobenius_norm();
        prop_assume!(norm > 1e-3);
        let z = m.scale(Complex64::new(scale / norm, 0.0));
        let e = mat_exp(&z, 1e-13).unwrap();
        let einv = mat_exp(&z.scale(Complex64::new(-1.0, 0.0)), 1e-13).unwrap();
        let defect = (&(&e * &einv) - &ComplexMatrix::identity(4)).max_abs();
        prop_assert!(defect <= 10.0 * 1e-13, "exp(Z) exp(-Z) defect {defect:.3e}");
    }

    #[test]
    fn rank_one_outer_products(u in vector(5), v in vector(5)) {
        prop_assume!(u.norm() > 1e-3 && v.norm() > 1e-3);
        let rank = numerical_rank(&u.outer(&v), 1e-10).unwrap();
        prop_assert_eq!(rank, 1);
    }

    #[test]
    fn bilinear_is_symmetric_and_linear(u in vector(6), v in vector(6), w in vector(6), s in complex_entry()) {
        let uv = bilinear(&u, &v).unwrap();
        let vu = bilinear(&v, &u).unwrap();
        prop_assert!((uv - vu).norm() < 1e-14);
        // complex linearity in the first slot
        let lhs = bilinear(&u.scale(s).add(&w), &v).unwrap();
        let rhs = s * uv + bilinear(&w, &v).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn complex_strings_round_trip(re in proptest::num::f64::NORMAL, im in proptest::num::f64::NORMAL) {
        let z = Complex64::new(re, im);
        let back = parse_complex(&format_complex(z)).unwrap();
        prop_assert_eq!(back, z);
    }
}

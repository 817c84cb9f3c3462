//! Property tests for the algebraic invariants of the matrix core and the
//! cone projections.

use proptest::prelude::*;

use freeconvex_core::linalg::{
    is_psd, kron, partial_trace, ComplexMatrix, HermitianMatrix, C64,
};
use freeconvex_core::sdp::project_psd;

fn small_complex(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    proptest::collection::vec(
        (-1.0f64..1.0, -1.0f64..1.0),
        n * n,
    )
    .prop_map(move |vals| {
        ComplexMatrix::from_fn(n, n, |i, j| {
            let (re, im) = vals[i * n + j];
            C64::new(re, im)
        })
    })
}

fn small_hermitian(n: usize) -> impl Strategy<Value = HermitianMatrix> {
    small_complex(n).prop_map(|m| {
        HermitianMatrix::from_nearly_hermitian(m.hermitian_part()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_bilinear_and_multiplicative(
        a in small_complex(2),
        b in small_complex(2),
        c in small_complex(2),
        d in small_complex(2),
        alpha in -2.0f64..2.0,
    ) {
        // bilinearity in the first argument
        let lhs = kron(&(&a.scale_re(alpha) + &c), &b).unwrap();
        let rhs = &kron(&a, &b).unwrap().scale_re(alpha) + &kron(&c, &b).unwrap();
        prop_assert!((&lhs - &rhs).frobenius_norm() < 1e-12);

        // mixed product identity
        let prod = &kron(&a, &b).unwrap() * &kron(&c, &d).unwrap();
        let direct = kron(&(&a * &c), &(&b * &d)).unwrap();
        prop_assert!((&prod - &direct).frobenius_norm() < 1e-11);
    }

    #[test]
    fn partial_trace_is_linear_and_trace_preserving(
        h in small_hermitian(6),
        g in small_hermitian(6),
        alpha in -2.0f64..2.0,
    ) {
        let combo = h.scale(alpha).add(&g);
        let traced = partial_trace(&combo, &[2, 3], 1).unwrap();
        let split = partial_trace(&h, &[2, 3], 1).unwrap().scale(alpha)
            .add(&partial_trace(&g, &[2, 3], 1).unwrap());
        prop_assert!(traced.sub(&split).frobenius_norm() < 1e-12);
        prop_assert!((traced.trace() - combo.trace()).abs() < 1e-12);
    }

    #[test]
    fn psd_projection_is_idempotent_and_nonexpansive(
        h in small_hermitian(4),
        g in small_hermitian(4),
    ) {
        let ph = project_psd(&h).unwrap().projected;
        let pg = project_psd(&g).unwrap().projected;
        prop_assert!(is_psd(&ph, 1e-9).unwrap());
        let twice = project_psd(&ph).unwrap().projected;
        prop_assert!(twice.sub(&ph).frobenius_norm() < 1e-10);
        prop_assert!(
            ph.sub(&pg).frobenius_norm() <= h.sub(&g).frobenius_norm() + 1e-10
        );
    }

    #[test]
    fn gram_matrices_are_psd(m in small_complex(4)) {
        let gram = HermitianMatrix::from_nearly_hermitian(&m * &m.adjoint()).unwrap();
        prop_assert!(is_psd(&gram, 1e-9).unwrap());
    }
}

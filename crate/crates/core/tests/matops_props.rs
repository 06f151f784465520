use magic_purify::matops::{
    binomial, kron, partial_trace, partial_transpose, permutation_operator, symmetric_dimension,
    symmetric_projector, HermitianOperator, SitePermutation,
};
use magic_purify::CMat;
use num_complex::Complex64;
use proptest::prelude::*;

fn random_hermitian(dims: Vec<usize>, entries: &[f64]) -> HermitianOperator {
    let side: usize = dims.iter().product();
    let mut m = CMat::zeros(side, side);
    let mut it = entries.iter().cycle();
    for i in 0..side {
        for j in i..side {
            let re = *it.next().unwrap();
            let im = if i == j { 0.0 } else { *it.next().unwrap() };
            m[(i, j)] = Complex64::new(re, im);
            m[(j, i)] = Complex64::new(re, -im);
        }
    }
    HermitianOperator::new(dims, m).unwrap()
}

fn entries() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 16..64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_trace_of_product(a in entries(), b in entries()) {
        let x = random_hermitian(vec![2], &a);
        let y = random_hermitian(vec![3], &b);
        let xy = kron(&x, &y);
        let kept = partial_trace(&xy, &[1]).unwrap();
        prop_assert!(kept.frobenius_distance(&x.scaled(y.trace())) < 1e-12);
        let kept = partial_trace(&xy, &[2]).unwrap();
        prop_assert!(kept.frobenius_distance(&y.scaled(x.trace())) < 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(a in entries()) {
        let x = random_hermitian(vec![2, 3], &a);
        let twice = partial_transpose(&partial_transpose(&x, &[2]).unwrap(), &[2]).unwrap();
        prop_assert!(twice.frobenius_distance(&x) < 1e-14);
        let both = partial_transpose(&partial_transpose(&x, &[1]).unwrap(), &[2]).unwrap();
        let full = CMat::from(x.matrix().transpose());
        prop_assert!((both.matrix() - full).norm() < 1e-14);
    }

    #[test]
    fn permutation_operators_form_a_representation(
        s in prop::sample::select(SitePermutation::all(3)),
        t in prop::sample::select(SitePermutation::all(3)),
        d in 2usize..4,
    ) {
        let lhs = permutation_operator(&s.compose(&t), d);
        let ps = permutation_operator(&s, d);
        let pt = permutation_operator(&t, d);
        let direct = &ps * &pt;
        let reversed = &pt * &ps;
        let err = (&lhs - &direct).norm().min((&lhs - &reversed).norm());
        prop_assert!(err < 1e-14);
        let inv = permutation_operator(&s.inverse(), d);
        prop_assert!((inv - ps.adjoint()).norm() < 1e-14);
    }
}

#[test]
fn symmetric_projector_identities() {
    for (n, d) in [(1, 2), (2, 2), (3, 2), (2, 3), (3, 3), (4, 2)] {
        let pi = symmetric_projector(n, d);
        let sq = pi.matrix() * pi.matrix();
        assert!((sq - pi.matrix()).norm() < 1e-12, "n={n} d={d}");
        assert!((pi.trace() - binomial(n + d - 1, n) as f64).abs() < 1e-10);
        assert_eq!(symmetric_dimension(n, d), binomial(n + d - 1, n));
        for s in SitePermutation::all(n) {
            let p = permutation_operator(&s, d);
            assert!((&p * pi.matrix() - pi.matrix()).norm() < 1e-12);
        }
    }
}

#[test]
fn symmetric_projector_is_scaled_haar_moment() {
    use magic_purify::Ensemble;
    for (n, d) in [(2, 2), (3, 2), (2, 3)] {
        let moment = Ensemble::haar(d).moment(n);
        let pi = symmetric_projector(n, d).scaled(1.0 / symmetric_dimension(n, d) as f64);
        assert!(moment.frobenius_distance(&pi) < 1e-12);
    }
}

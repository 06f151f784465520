use magic_purify::matops::HermitianOperator;
use magic_purify::phase_space::{
    phase_point_operator, triple_product_phase, triple_product_trace, wigner_constraint_rows,
    wigner_of_state, wigner_row_orbits, PhasePoint, PhasePointBasis,
};
use magic_purify::CMat;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn basis_ops(d: usize) -> Vec<CMat> {
    let basis = PhasePointBasis::new(d, 1).unwrap();
    basis
        .points()
        .map(|u| phase_point_operator(&u).unwrap().into_matrix())
        .collect()
}

#[test]
fn basis_identities() {
    for d in [3, 5] {
        let ops = basis_ops(d);
        assert_eq!(ops.len(), d * d);
        let mut sum = CMat::zeros(d, d);
        for (i, a) in ops.iter().enumerate() {
            assert!((a - a.adjoint()).norm() < 1e-12);
            assert!((a.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
            for (j, b) in ops.iter().enumerate() {
                let ip = (a * b).trace();
                let want = if i == j { d as f64 } else { 0.0 };
                assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-10, "d={d} {i} {j}");
            }
            sum += a;
        }
        let id = CMat::identity(d, d) * Complex64::new(d as f64, 0.0);
        assert!((sum - id).norm() < 1e-10);
    }
}

#[test]
fn two_site_basis_is_tensor_product() {
    let d = 3;
    let basis = PhasePointBasis::new(d, 2).unwrap();
    let u = PhasePoint::new(d, &[(1, 2), (0, 1)]).unwrap();
    let a = phase_point_operator(&PhasePoint::single(d, 1, 2).unwrap()).unwrap();
    let b = phase_point_operator(&PhasePoint::single(d, 0, 1).unwrap()).unwrap();
    let want = a.kron(&b);
    assert!(basis.operator(&u).unwrap().frobenius_distance(&want) < 1e-12);
    assert!((basis.monomial(u.index()).to_dense() - want.matrix()).norm() < 1e-12);
}

#[test]
fn triple_phase_matches_trace_on_random_triples() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for d in [3usize, 5, 7] {
        let ops = basis_ops(d);
        for _ in 0..1000 {
            let idx: [usize; 3] = std::array::from_fn(|_| rng.random_range(0..d * d));
            let pts = idx.map(|i| PhasePoint::from_index(d, 1, i));
            let phase = triple_product_phase(&pts[0], &pts[1], &pts[2]).unwrap();
            let trace = (&ops[idx[0]] * &ops[idx[1]] * &ops[idx[2]]).trace();
            assert!((phase - trace).norm() <= 1e-10, "d={d} {idx:?}");
            let lib = triple_product_trace(&pts[0], &pts[1], &pts[2]).unwrap();
            assert!((lib - trace).norm() <= 1e-10);
        }
    }
}

proptest! {
    #[test]
    fn triple_phase_cyclic_and_swap(
        d in prop::sample::select(vec![3usize, 5, 7]),
        r in (0i64..7, 0i64..7),
        w in (0i64..7, 0i64..7),
        v in (0i64..7, 0i64..7),
    ) {
        let p = |(a, b): (i64, i64)| PhasePoint::single(d, a, b).unwrap();
        let (r, w, v) = (p(r), p(w), p(v));
        let base = triple_product_phase(&r, &w, &v).unwrap();
        prop_assert!((base - triple_product_phase(&w, &v, &r).unwrap()).norm() < 1e-12);
        prop_assert!((base - triple_product_phase(&v, &r, &w).unwrap()).norm() < 1e-12);
        let swapped = triple_product_phase(&r, &v, &w).unwrap();
        prop_assert!((base.conj() - swapped).norm() < 1e-12);
    }

    #[test]
    fn conjugate_point_is_reflection(
        d in prop::sample::select(vec![3usize, 5]),
        a1 in 0i64..5,
        a2 in 0i64..5,
    ) {
        let a = phase_point_operator(&PhasePoint::single(d, a1, a2).unwrap()).unwrap();
        let b = phase_point_operator(&PhasePoint::single(d, -a1, a2).unwrap()).unwrap();
        prop_assert!((a.matrix().map(|z| z.conj()) - b.matrix()).norm() < 1e-12);
    }
}

#[test]
fn wigner_of_maximally_mixed_and_reconstruction() {
    let basis = PhasePointBasis::new(3, 1).unwrap();
    let w = wigner_of_state(&HermitianOperator::identity(vec![3]).scaled(1.0 / 3.0), &basis).unwrap();
    assert!(w.values.iter().all(|&x| (x - 1.0 / 9.0).abs() < 1e-12));
    let ket = [0.6, 0.0, 0.8].map(|x| Complex64::new(x, 0.0));
    let rho = HermitianOperator::from_ket(vec![3], &ket).unwrap();
    let w = wigner_of_state(&rho, &basis).unwrap();
    assert!((w.sum() - 1.0).abs() < 1e-12);
    assert!(w.reconstruct(&basis).frobenius_distance(&rho) < 1e-12);
}

#[test]
fn wigner_row_counts_and_orbits() {
    for (n_in, d) in [(1usize, 3usize), (2, 3)] {
        let rows = wigner_constraint_rows(n_in, d).unwrap();
        assert_eq!(rows.len(), (d * d).pow(n_in as u32 + 1));
        let orbits = wigner_row_orbits(n_in, d);
        let total: usize = orbits.iter().map(Vec::len).sum();
        assert_eq!(total, rows.len());
        let dd = d * d;
        let multisets = if n_in == 1 { dd } else { dd * (dd + 1) / 2 };
        assert_eq!(orbits.len(), multisets * dd);
    }
}

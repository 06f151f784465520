use magic_purify::certificates::primal_feasible_value;
use magic_purify::matops::{kron_all, partial_trace, HermitianOperator};
use magic_purify::purification::{
    assemble_qr, baseline_fidelity, depolarize, fig2_ensembles, haar_random_state,
};
use magic_purify::{CMat, Ensemble, OperationClass, PurificationInstance};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;

fn noisy(psi: &[Complex64], delta: f64) -> HermitianOperator {
    let d = psi.len();
    let pure = HermitianOperator::from_ket(vec![d], psi).unwrap();
    let mixed = HermitianOperator::identity(vec![d]).scaled(delta / d as f64);
    &pure.scaled(1.0 - delta) + &mixed
}

/// `Q` and `R` of a single pure state, built copy by copy.
fn qr_oracle(psi: &[Complex64], n: usize, delta: f64) -> (CMat, CMat) {
    let d = psi.len();
    let rho = noisy(psi, delta);
    let pure = HermitianOperator::from_ket(vec![d], psi).unwrap();
    let mut q_parts = vec![rho.clone(); n];
    q_parts.push(pure);
    let mut r_parts = vec![rho; n];
    r_parts.push(HermitianOperator::identity(vec![d]));
    (kron_all(&q_parts).into_matrix(), kron_all(&r_parts).into_matrix())
}

#[test]
fn single_state_qr_matches_tensor_products() {
    let s = 0.6f64;
    let psi = vec![Complex64::new(s, 0.0), Complex64::new(0.0, 0.8)];
    let ens = Ensemble::discrete(2, vec![psi.clone()]).unwrap();
    let inst = PurificationInstance::new(2, 2, 0.3, 0.5, ens, OperationClass::Cptn).unwrap();
    let qr = assemble_qr(&inst).unwrap();
    let (q, r) = qr_oracle(&psi, 2, 0.3);
    assert!((qr.q.matrix() - q).norm() < 1e-14);
    assert!((qr.r.matrix() - r).norm() < 1e-14);
}

#[test]
fn haar_qr_within_monte_carlo_band() {
    const SAMPLES: usize = 10_000;
    let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
    for (d, n, delta) in [(2usize, 2usize, 0.4), (3, 2, 0.7)] {
        let inst = PurificationInstance::new(d, n, delta, 1.0, Ensemble::haar(d), OperationClass::Cptn)
            .unwrap();
        let qr = assemble_qr(&inst).unwrap();
        let side = d.pow(n as u32 + 1);
        let mut sum = CMat::zeros(side, side);
        let mut sq = vec![0.0f64; side * side * 2];
        for _ in 0..SAMPLES {
            let psi = haar_random_state(d, &mut rng);
            let (q, _) = qr_oracle(&psi, n, delta);
            for (k, z) in q.iter().enumerate() {
                sq[2 * k] += z.re * z.re;
                sq[2 * k + 1] += z.im * z.im;
            }
            sum += q;
        }
        let count = SAMPLES as f64;
        for (k, (mean, lib)) in sum.iter().zip(qr.q.matrix().iter()).enumerate() {
            let mean = mean / count;
            let sd_re = ((sq[2 * k] / count - mean.re * mean.re).max(0.0) / count).sqrt();
            let sd_im = ((sq[2 * k + 1] / count - mean.im * mean.im).max(0.0) / count).sqrt();
            assert!((mean.re - lib.re).abs() <= 5.0 * sd_re + 1e-12, "d={d} entry {k}");
            assert!((mean.im - lib.im).abs() <= 5.0 * sd_im + 1e-12, "d={d} entry {k}");
        }
    }
}

#[test]
fn fig2_states_are_normalized_and_baselines_match() {
    let (qubit, qutrit) = fig2_ensembles();
    for ens in [qubit, qutrit] {
        let d = ens.d();
        let inst = PurificationInstance::new(d, 2, 0.5, 1.0, ens, OperationClass::Cptn).unwrap();
        assert!((baseline_fidelity(&inst) - (1.0 - 0.5 * (d as f64 - 1.0) / d as f64)).abs() < 1e-14);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn qr_are_positive_with_fixed_trace(
        d in 2usize..4,
        n in 2usize..4,
        delta in 0.0f64..=1.0,
    ) {
        let inst = PurificationInstance::new(d, n, delta, 1.0, Ensemble::haar(d), OperationClass::Cptn)
            .unwrap();
        let qr = assemble_qr(&inst).unwrap();
        prop_assert!(qr.q.min_eigenvalue() >= -1e-12);
        prop_assert!(qr.r.min_eigenvalue() >= -1e-12);
        prop_assert!((qr.q.trace() - 1.0).abs() < 1e-12);
        prop_assert!((qr.r.trace() - d as f64).abs() < 1e-12);
        let r_lt_q = &qr.r - &qr.q;
        prop_assert!(r_lt_q.min_eigenvalue() >= -1e-12);
    }

    #[test]
    fn keep_first_copy_reaches_baseline(
        d in prop::sample::select(vec![2usize, 3]),
        n in 2usize..4,
        delta in 0.0f64..=1.0,
        p in 0.01f64..=1.0,
    ) {
        let inst = PurificationInstance::new(d, n, delta, p, Ensemble::haar(d), OperationClass::Cptn)
            .unwrap();
        let qr = assemble_qr(&inst).unwrap();
        let fp = primal_feasible_value(&inst, &qr).unwrap();
        prop_assert!((fp.value - baseline_fidelity(&inst)).abs() < 1e-10);
        prop_assert!((fp.probability - p).abs() < 1e-10);
        prop_assert!(fp.in_class);
        let marginal = partial_trace(&fp.choi, &(1..=n).collect::<Vec<_>>()).unwrap();
        prop_assert!(marginal.frobenius_distance(&HermitianOperator::identity(vec![d; n]).scaled(p)) < 1e-10);
    }

    #[test]
    fn depolarizing_preserves_trace_and_positivity(
        delta in 0.0f64..=1.0,
        site in 1usize..3,
        re in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let norm = re.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
        let ket: Vec<Complex64> = re.chunks(2).map(|c| Complex64::new(c[0] / norm, c[1] / norm)).collect();
        let psi = [ket[0], ket[1], ket[2], Complex64::new(0.0, 0.0), ket[0], ket[1]];
        let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex64> = psi.iter().map(|z| z / n2).collect();
        let rho = HermitianOperator::from_ket(vec![2, 3], &psi).unwrap();
        let out = depolarize(&rho, site, delta).unwrap();
        prop_assert!((out.trace() - 1.0).abs() < 1e-12);
        prop_assert!(out.min_eigenvalue() >= -1e-12);
        let other = 3 - site;
        let before = partial_trace(&rho, &[other]).unwrap();
        let after = partial_trace(&out, &[other]).unwrap();
        prop_assert!(before.frobenius_distance(&after) < 1e-12);
    }
}

#[test]
fn cspo_instances_require_qubits() {
    assert!(PurificationInstance::new(3, 2, 0.5, 1.0, Ensemble::haar(3), OperationClass::Cspo).is_err());
    assert!(PurificationInstance::new(4, 2, 0.5, 1.0, Ensemble::haar(4), OperationClass::Cpwp).is_err());
    assert!(PurificationInstance::new(2, 2, 1.5, 1.0, Ensemble::haar(2), OperationClass::Cptn).is_err());
    assert!(PurificationInstance::new(2, 2, 0.5, 0.0, Ensemble::haar(2), OperationClass::Cptn).is_err());
    assert!(PurificationInstance::new(2, 1, 0.5, 1.0, Ensemble::haar(2), OperationClass::Cptn).is_err());
}

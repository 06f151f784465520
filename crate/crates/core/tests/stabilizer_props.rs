use std::collections::HashSet;

use magic_purify::matops::HermitianOperator;
use magic_purify::stabilizer::{
    enumerate_stabilizer_states, parse_dump, pauli_matrix, robustness_of_state, stabilizer_count,
    PauliOperator,
};
use magic_purify::CMat;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};

/// Sizes produced by [`clifford_orbit`] for 1..=4 qubits, frozen.
const ORBIT_SIZES: [usize; 4] = [6, 60, 1080, 36720];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Phase-free rounded key of a ket.
fn key(ket: &[Complex64]) -> Vec<(i64, i64)> {
    let lead = ket.iter().find(|z| z.norm() > 1e-9).unwrap();
    let phase = lead.conj() / lead.norm();
    ket.iter()
        .map(|z| {
            let w = z * phase;
            ((w.re * 1e8).round() as i64, (w.im * 1e8).round() as i64)
        })
        .collect()
}

/// Breadth-first closure of `|0…0⟩` under H, S and CNOT.
fn clifford_orbit(n: usize) -> Vec<Vec<Complex64>> {
    let dim = 1usize << n;
    let bit = |q: usize| 1usize << (n - 1 - q);
    let h = |ket: &[Complex64], q: usize| {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut out = ket.to_vec();
        for i in 0..dim {
            if i & bit(q) == 0 {
                let (a, b) = (ket[i], ket[i | bit(q)]);
                out[i] = (a + b) * s;
                out[i | bit(q)] = (a - b) * s;
            }
        }
        out
    };
    let s_gate = |ket: &[Complex64], q: usize| {
        (0..dim)
            .map(|i| if i & bit(q) != 0 { ket[i] * c(0.0, 1.0) } else { ket[i] })
            .collect::<Vec<_>>()
    };
    let cnot = |ket: &[Complex64], ctl: usize, tgt: usize| {
        (0..dim)
            .map(|i| if i & bit(ctl) != 0 { ket[i ^ bit(tgt)] } else { ket[i] })
            .collect::<Vec<_>>()
    };
    let mut start = vec![c(0.0, 0.0); dim];
    start[0] = c(1.0, 0.0);
    let mut seen = HashSet::from([key(&start)]);
    let mut frontier = vec![start.clone()];
    let mut all = vec![start];
    while let Some(ket) = frontier.pop() {
        let mut next = Vec::new();
        for q in 0..n {
            next.push(h(&ket, q));
            next.push(s_gate(&ket, q));
            for t in (0..n).filter(|&t| t != q) {
                next.push(cnot(&ket, q, t));
            }
        }
        for k in next {
            if seen.insert(key(&k)) {
                frontier.push(k.clone());
                all.push(k);
            }
        }
    }
    all
}

#[test]
fn counts_match_clifford_orbit() {
    for n in 1..=3 {
        let orbit = clifford_orbit(n);
        assert_eq!(orbit.len(), ORBIT_SIZES[n - 1]);
        let set = enumerate_stabilizer_states(n, false).unwrap();
        assert_eq!(set.len(), ORBIT_SIZES[n - 1]);
        assert_eq!(stabilizer_count(n), ORBIT_SIZES[n - 1]);
        let lib: HashSet<_> = (0..set.len()).map(|j| key(set.ket(j))).collect();
        let oracle: HashSet<_> = orbit.iter().map(|k| key(k)).collect();
        assert_eq!(lib, oracle, "n={n}");
    }
}

#[test]
fn four_qubit_count_matches_orbit() {
    assert_eq!(clifford_orbit(4).len(), ORBIT_SIZES[3]);
    assert_eq!(stabilizer_count(4), ORBIT_SIZES[3]);
    assert!(enumerate_stabilizer_states(4, false).is_err());
    assert_eq!(enumerate_stabilizer_states(4, true).unwrap().len(), ORBIT_SIZES[3]);
}

#[test]
fn dump_survives_parsing() {
    let set = enumerate_stabilizer_states(2, false).unwrap();
    let (n, kets) = parse_dump(&set.dump()).unwrap();
    assert_eq!(n, 2);
    assert_eq!(kets.len(), 60);
    for (j, k) in kets.iter().enumerate() {
        for (a, b) in k.iter().zip(set.ket(j)) {
            assert_eq!(a, b);
        }
    }
}

#[test]
fn robustness_is_one_on_stabilizer_mixtures() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for n in [1usize, 2] {
        let set = enumerate_stabilizer_states(n, false).unwrap();
        for _ in 0..10 {
            let k = rng.random_range(1..5);
            let mut rho = HermitianOperator::zeros(vec![2; n]);
            let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..1.0)).collect();
            let total: f64 = weights.iter().sum();
            for w in weights {
                let j = rng.random_range(0..set.len());
                let proj = set.projector(j).scaled(w / total);
                rho = HermitianOperator::new(rho.dims().to_vec(), rho.matrix() + proj.matrix()).unwrap();
            }
            let r = robustness_of_state(&rho, &set).unwrap();
            assert!((r.value - 1.0).abs() <= 1e-8, "n={n} value={}", r.value);
        }
    }
}

/// `min ‖x‖₁` over `Ax = b` by enumerating every basic solution.
fn l1_by_vertices(a: &DMatrix<f64>, b: &DVector<f64>) -> f64 {
    let (m, n) = a.shape();
    let mut best = f64::INFINITY;
    let mut pick = (0..m).collect::<Vec<_>>();
    loop {
        let sub = DMatrix::from_fn(m, m, |i, j| a[(i, pick[j])]);
        if sub.determinant().abs() > 1e-9 {
            let x = sub.lu().solve(b).unwrap();
            best = best.min(x.iter().map(|v| v.abs()).sum());
        }
        let mut i = m;
        while i > 0 && pick[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return best;
        }
        pick[i - 1] += 1;
        for k in i..m {
            pick[k] = pick[k - 1] + 1;
        }
    }
}

#[test]
fn t_state_robustness_matches_vertex_enumeration() {
    let set = enumerate_stabilizer_states(1, false).unwrap();
    let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let rho = HermitianOperator::from_ket(vec![2], &[c(s, 0.0), phase * s]).unwrap();
    let paulis: Vec<CMat> = (0..4)
        .map(|i| pauli_matrix(&PauliOperator::from_index(1, i)).into_matrix())
        .collect();
    let g = DMatrix::from_fn(4, set.len(), |i, j| {
        (&paulis[i] * set.projector(j).matrix()).trace().re
    });
    let b = DVector::from_fn(4, |i, _| (&paulis[i] * rho.matrix()).trace().re);
    let oracle = l1_by_vertices(&g, &b);
    assert!((oracle - 2f64.sqrt()).abs() < 1e-12);
    let r = robustness_of_state(&rho, &set).unwrap();
    assert!(r.value > 1.0 + 1e-3);
    assert!((r.value - oracle).abs() < 1e-8, "{} vs {oracle}", r.value);
}

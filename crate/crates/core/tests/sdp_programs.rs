use magic_purify::certificates::{
    build_cpwp_certificate, build_cspo_certificate, cpwp_dual_point, cspo_dual_point, lambda0,
};
use magic_purify::purification::{assemble_qr, baseline_fidelity, fig2_ensembles};
use magic_purify::sdp::{
    build_primal, build_program, dual_residuals, solve, solve_fidelity_with, solve_program,
    BuildOptions, ConicProblem, DualPoint, FidelityOptions, LinearFunctional, RowKind, Sense,
    SolverOptions,
};
use magic_purify::{Ensemble, OperationClass, PurificationInstance, SolveStatus};

const TOL: f64 = 1e-8;

fn haar(d: usize, n: usize, delta: f64, p: f64, class: OperationClass) -> PurificationInstance {
    PurificationInstance::new(d, n, delta, p, Ensemble::haar(d), class).unwrap()
}

fn fidelity(inst: &PurificationInstance) -> f64 {
    let sol = solve_fidelity_with(inst, &FidelityOptions::default()).unwrap();
    assert_eq!(sol.report.status, SolveStatus::Optimal, "{inst:?}");
    sol.fidelity
}

fn group_len(p: &ConicProblem, name: &str) -> Option<(RowKind, usize)> {
    p.group(name).map(|g| (g.kind, g.len))
}

#[test]
fn primal_shapes() {
    let inst = haar(2, 2, 0.5, 1.0, OperationClass::Cptn);
    let p = build_primal(&inst, &assemble_qr(&inst).unwrap()).unwrap();
    assert_eq!(p.psd_blocks.len(), 2);
    assert_eq!((p.psd_blocks[0].side, p.psd_blocks[0].complex), (8, true));
    assert_eq!(p.psd_blocks[1].side, 4);
    assert_eq!(group_len(&p, "probability"), Some((RowKind::Equality, 1)));
    assert!(p.inequalities.is_empty());
    assert_eq!(p.nonneg_len, 0);

    // One row per pair (u, v): (d²)^n input points times d² output points.
    let (d, n) = (3usize, 2u32);
    let wigner_rows = (d * d).pow(n) * d * d;
    assert_eq!(wigner_rows, 729);
    let inst = haar(3, 2, 0.5, 1.0, OperationClass::Cpwp);
    let p = build_primal(&inst, &assemble_qr(&inst).unwrap()).unwrap();
    assert_eq!(group_len(&p, "wigner"), Some((RowKind::Inequality, wigner_rows)));
    assert_eq!(p.inequalities.len(), wigner_rows);

    // Pauli words on three qubits; stabilizer count checked against a Clifford orbit elsewhere.
    let paulis = 4usize.pow(3);
    assert_eq!(paulis, 64);
    let inst = haar(2, 2, 0.5, 1.0, OperationClass::Cspo);
    let p = build_primal(&inst, &assemble_qr(&inst).unwrap()).unwrap();
    assert_eq!(group_len(&p, "stabilizer_cone"), Some((RowKind::Equality, paulis)));
    assert_eq!(p.nonneg_len, 1080);
}

#[test]
fn unsupported_configurations_are_rejected() {
    let inst = haar(2, 3, 0.5, 1.0, OperationClass::Cspo);
    let qr = assemble_qr(&inst).unwrap();
    assert!(build_program(&inst, &qr, &BuildOptions::default()).is_err());
    let inst = haar(2, 4, 0.5, 1.0, OperationClass::Cspo);
    let qr = assemble_qr(&inst).unwrap();
    assert!(build_program(&inst, &qr, &BuildOptions::full()).is_err());
}

#[test]
fn dump_round_trip_of_built_program() {
    let inst = haar(2, 2, 0.3, 0.5, OperationClass::Cspo);
    let p = build_primal(&inst, &assemble_qr(&inst).unwrap()).unwrap();
    let back = ConicProblem::parse(&p.dump()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn toy_lp_lower_bound() {
    let mut p = ConicProblem::new(Sense::Minimize);
    p.nonneg_len = 2;
    p.objective.add_nonneg(0, 1.0);
    let mut fix = LinearFunctional::new();
    fix.add_nonneg(1, 1.0);
    p.push_equalities("fix", vec![(fix, 1.0)]);
    let mut g = LinearFunctional::new();
    g.add_nonneg(0, 1.0);
    g.add_nonneg(1, -3.0);
    p.push_inequalities("lower", vec![g]);
    let r = solve(&p, &SolverOptions::default()).unwrap();
    assert!((r.primal_value - 3.0).abs() < 1e-7);
}

#[test]
fn theorem_examples() {
    assert!((fidelity(&haar(2, 2, 0.5, 1.0, OperationClass::Cspo)) - 0.75).abs() < 1e-6);
    assert!((fidelity(&haar(3, 2, 0.3, 0.5, OperationClass::Cpwp)) - 0.8).abs() < 1e-6);
}

#[test]
fn noiseless_inputs_give_unit_fidelity() {
    for (d, class) in [
        (2, OperationClass::Cptn),
        (2, OperationClass::Cspo),
        (3, OperationClass::Cptn),
        (3, OperationClass::Cpwp),
    ] {
        for p in [0.3, 1.0] {
            let f = fidelity(&haar(d, 2, 0.0, p, class));
            assert!((f - 1.0).abs() < 1e-6, "d={d} {class} p={p}: {f}");
        }
    }
}

#[test]
fn fig2_qubit_limits() {
    let (qubit, _) = fig2_ensembles();
    for p in [0.1, 0.5, 0.6] {
        let mk = |class| PurificationInstance::new(2, 2, 0.999, p, qubit.clone(), class).unwrap();
        let cptn = fidelity(&mk(OperationClass::Cptn));
        let cspo = fidelity(&mk(OperationClass::Cspo));
        assert!((cptn - (2.0 + 2f64.sqrt()) / 4.0).abs() < 1e-2, "p={p} cptn {cptn}");
        assert!((cspo - 0.75).abs() < 1e-2, "p={p} cspo {cspo}");
    }
}

#[test]
fn class_inclusion_and_p_independence() {
    for delta in [0.2, 0.6, 0.9] {
        let mut restricted = Vec::new();
        for p in [0.1, 0.5, 1.0] {
            let cptn2 = fidelity(&haar(2, 2, delta, p, OperationClass::Cptn));
            let cspo = fidelity(&haar(2, 2, delta, p, OperationClass::Cspo));
            let cptn3 = fidelity(&haar(3, 2, delta, p, OperationClass::Cptn));
            let cpwp = fidelity(&haar(3, 2, delta, p, OperationClass::Cpwp));
            assert!(cptn2 >= cspo - 2.0 * TOL);
            assert!(cptn3 >= cpwp - 2.0 * TOL);
            let base2 = baseline_fidelity(&haar(2, 2, delta, p, OperationClass::Cptn));
            let base3 = baseline_fidelity(&haar(3, 2, delta, p, OperationClass::Cptn));
            assert!(cspo >= base2 - TOL && cpwp >= base3 - TOL);
            restricted.push((cspo, cpwp));
        }
        for w in restricted.windows(2) {
            assert!((w[0].0 - w[1].0).abs() <= 2.0 * TOL, "delta={delta} {restricted:?}");
            assert!((w[0].1 - w[1].1).abs() <= 2.0 * TOL, "delta={delta} {restricted:?}");
        }
    }
}

#[test]
fn real_and_complex_choi_blocks_agree() {
    let (qubit, _) = fig2_ensembles();
    for (inst, class) in [
        (haar(2, 2, 0.4, 0.5, OperationClass::Cptn), "haar cptn"),
        (
            PurificationInstance::new(2, 2, 0.7, 0.3, qubit, OperationClass::Cptn).unwrap(),
            "qubit cptn",
        ),
        (haar(2, 2, 0.4, 0.5, OperationClass::Cspo), "haar cspo"),
    ] {
        let qr = assemble_qr(&inst).unwrap();
        let solve_with = |real| {
            let opts = BuildOptions {
                real_choi: Some(real),
                ..BuildOptions::default()
            };
            let prog = build_program(&inst, &qr, &opts).unwrap();
            assert_eq!(prog.real_choi, real);
            solve_program(prog, &SolverOptions::default()).unwrap().fidelity
        };
        let (re, cx) = (solve_with(true), solve_with(false));
        assert!((re - cx).abs() <= 2.0 * TOL, "{class}: {re} vs {cx}");
    }
}

#[test]
fn reduced_and_full_wigner_rows_agree() {
    let (_, qutrit) = fig2_ensembles();
    let inst = PurificationInstance::new(3, 2, 0.5, 0.6, qutrit, OperationClass::Cpwp).unwrap();
    let qr = assemble_qr(&inst).unwrap();
    let solve_with = |opts: BuildOptions| {
        solve_program(build_program(&inst, &qr, &opts).unwrap(), &SolverOptions::default())
            .unwrap()
            .fidelity
    };
    let reduced = solve_with(BuildOptions::default());
    let full = solve_with(BuildOptions::full());
    assert!((reduced - full).abs() <= 2.0 * TOL, "{reduced} vs {full}");
}

#[test]
fn solver_duals_are_feasible() {
    for inst in [
        haar(2, 2, 0.5, 0.5, OperationClass::Cptn),
        haar(2, 2, 0.5, 0.5, OperationClass::Cspo),
        haar(3, 2, 0.3, 0.5, OperationClass::Cpwp),
    ] {
        let sol = solve_fidelity_with(&inst, &FidelityOptions::default()).unwrap();
        let dual = sol.dual_point().unwrap();
        let res = dual_residuals(&sol.program, &dual, sol.fidelity).unwrap();
        assert!(res.max() <= 1e-7, "{inst:?}: {res:?}");
    }
}

#[test]
fn analytic_duals_are_feasible_and_perturbations_are_caught() {
    for p in [1.0, 0.5] {
        let delta = 0.4;
        let inst = haar(3, 2, delta, p, OperationClass::Cpwp);
        let prog = build_program(&inst, &assemble_qr(&inst).unwrap(), &BuildOptions::default()).unwrap();
        let dual = cpwp_dual_point(&build_cpwp_certificate(3, delta).unwrap()).unwrap();
        let res = dual_residuals(&prog, &dual, lambda0(3, delta)).unwrap();
        assert!(res.max() <= 1e-9, "cpwp p={p}: {res:?}");
        let bumped = DualPoint { x: dual.x + 0.1, ..dual };
        assert!(dual_residuals(&prog, &bumped, lambda0(3, delta)).unwrap().max() > 0.05);

        let inst = haar(2, 2, delta, p, OperationClass::Cspo);
        let prog = build_program(&inst, &assemble_qr(&inst).unwrap(), &BuildOptions::default()).unwrap();
        let dual = cspo_dual_point(&build_cspo_certificate(delta).unwrap());
        let res = dual_residuals(&prog, &dual, lambda0(2, delta)).unwrap();
        assert!(res.max() <= 1e-9, "cspo p={p}: {res:?}");
        let bumped = DualPoint { x: dual.x + 0.1, ..dual };
        assert!(dual_residuals(&prog, &bumped, lambda0(2, delta)).unwrap().max() > 0.05);
    }
}

#[test]
fn small_success_probability() {
    let f = fidelity(&haar(3, 2, 0.5, 1e-3, OperationClass::Cpwp));
    assert!((f - lambda0(3, 0.5)).abs() < 1e-5, "{f}");
}

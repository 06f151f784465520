//! Analytic dual certificates for the two-copy no-go results and their
//! numerical verification.
//!
//! Both certificates take `x = −λ0`, `Y = 0` and a class operator built from
//! three-site permutation operators,
//! `C = 2αI − α(P(123) + P(132))`, with `α` specialised to `β` at `d = 2`.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matops::{
    kron_all, min_eigenvalue, partial_transpose, permutation_operator, CMat, HermitianOperator,
    MonomialMatrix, SitePermutation,
};
use crate::phase_space::{
    is_odd_prime, triple_product_phase, wigner_constraint_rows, PhasePoint, PhasePointBasis,
};
use crate::purification::{
    assemble_qr, keep_first_copy_choi, objective_and_probability, Ensemble, OperationClass,
    PurificationInstance, QrPair,
};
use crate::sdp::build::{solve_fidelity_with, ClassDual, DualPoint, FidelityOptions};
use crate::sdp::solver::SolveStatus;
use crate::stabilizer::{pauli_matrix, stabilizer_cone_block, PauliOperator, StabilizerSet};

/// Tolerance on the minimum eigenvalue of the certificate operator.
pub const EIGEN_TOL: f64 = 1e-9;
/// Tolerance on sign conditions of expansion coefficients.
pub const COEFF_TOL: f64 = 1e-12;
/// Tolerance on closed-form comparisons.
pub const CLOSED_FORM_TOL: f64 = 1e-10;
/// `|F − λ0|` accepted as a no-go confirmation.
pub const NO_GO_TOL: f64 = 1e-5;

/// `1 − (d−1)δ/d`.
pub fn lambda0(d: usize, delta: f64) -> f64 {
    1.0 - (d as f64 - 1.0) * delta / d as f64
}

/// `α = (1−δ)δ(d(δ−1)−δ) / (d³(d+1))`.
pub fn alpha(d: usize, delta: f64) -> f64 {
    let d = d as f64;
    (1.0 - delta) * delta * (d * (delta - 1.0) - delta) / (d.powi(3) * (d + 1.0))
}

/// `β = α` at `d = 2`, `(1−δ)δ(δ−2)/24`.
pub fn beta(delta: f64) -> f64 {
    (1.0 - delta) * delta * (delta - 2.0) / 24.0
}

/// `t = (d−1)(1−δ) + 2αd(d²−1)`.
pub fn normalizer(d: usize, delta: f64) -> f64 {
    let df = d as f64;
    (df - 1.0) * (1.0 - delta) + 2.0 * alpha(d, delta) * df * (df * df - 1.0)
}

/// Closed forms of `s₊` and `s₋`.
pub fn eggeling_closed_form(d: usize, delta: f64) -> (f64, f64) {
    let d = d as f64;
    let den = 2.0 * d * d + 4.0 * d * (delta - 1.0) * delta - 4.0 * delta * delta;
    let plus = (d * d * ((delta - 2.0) * delta + 2.0) + d * delta * delta - 2.0 * delta * delta) / den;
    let minus = -(d - 2.0) * delta * (d * delta - 2.0 * d - delta) / den;
    (plus, minus)
}

fn cycle_sum(d: usize) -> CMat {
    let c123 = SitePermutation::from_cycles(3, &[&[1, 2, 3]]).expect("valid cycle");
    let c132 = SitePermutation::from_cycles(3, &[&[1, 3, 2]]).expect("valid cycle");
    permutation_operator(&c123, d) + permutation_operator(&c132, d)
}

/// `2aI − a(P(123) + P(132))` on three sites of dimension `d`.
pub fn cyclic_operator(d: usize, a: f64) -> HermitianOperator {
    let side = d * d * d;
    let m = CMat::identity(side, side) * Complex64::new(2.0 * a, 0.0) - cycle_sum(d) * Complex64::new(a, 0.0);
    HermitianOperator::new(vec![d; 3], m).expect("permutation sum is Hermitian")
}

/// `λ0 Rᵀ³ − Qᵀ³ + Cᵀ³` for two Haar-universal copies.
pub fn certificate_operator(d: usize, delta: f64, c: &HermitianOperator) -> Result<HermitianOperator> {
    let inst = PurificationInstance::new(d, 2, delta, 1.0, Ensemble::haar(d), OperationClass::Cptn)?;
    let qr = assemble_qr(&inst)?;
    let l0 = lambda0(d, delta);
    let m = &(&qr.r.scaled(l0) - &qr.q) + c;
    partial_transpose(&m, &[3])
}

#[derive(Debug, Clone)]
pub struct CpwpCertificate {
    pub d: usize,
    pub delta: f64,
    pub alpha: f64,
    pub x_dual: f64,
    pub c: HermitianOperator,
    pub t: f64,
}

pub fn build_cpwp_certificate(d: usize, delta: f64) -> Result<CpwpCertificate> {
    if !is_odd_prime(d) {
        return Err(Error::NotOddPrime(d));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange(format!("noise δ = {delta} outside [0, 1]")));
    }
    let a = alpha(d, delta);
    Ok(CpwpCertificate {
        d,
        delta,
        alpha: a,
        x_dual: -lambda0(d, delta),
        c: cyclic_operator(d, a),
        t: normalizer(d, delta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EggelingCoefficients {
    pub s_plus: f64,
    pub s_minus: f64,
    pub s0: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

/// The operators `I`, `X = P((23))ᵀ³`, `V = P((12))` on three sites.
pub fn eggeling_generators(d: usize) -> (CMat, CMat, CMat) {
    let side = d * d * d;
    let swap23 = SitePermutation::from_cycles(3, &[&[2, 3]]).expect("valid cycle");
    let swap12 = SitePermutation::from_cycles(3, &[&[1, 2]]).expect("valid cycle");
    let x = crate::matops::partial_transpose_mat(&permutation_operator(&swap23, d), &[d; 3], &[3])
        .expect("three sites");
    (CMat::identity(side, side), x, permutation_operator(&swap12, d))
}

/// `[S₊, S₋, S₀, S₁, S₂, S₃]`.
pub fn eggeling_basis(d: usize) -> [CMat; 6] {
    let (id, x, v) = eggeling_generators(d);
    let df = d as f64;
    let c = |z: f64| Complex64::new(z, 0.0);
    let sym = (&id + &v) * c(0.5);
    let anti = (&id - &v) * c(0.5);
    let s_plus = &sym * (&id - &x * c(2.0 / (df + 1.0))) * &sym;
    let s_minus = &anti * (&id - &x * c(2.0 / (df - 1.0))) * &anti;
    let vxv = &v * &x * &v;
    let xv = &x * &v;
    let vx = &v * &x;
    let k = 1.0 / (df * df - 1.0);
    let s0 = ((&x + &vxv) * c(df) - (&xv + &vx)) * c(k);
    let s1 = ((&xv + &vx) * c(df) - (&x + &vxv)) * c(k);
    let s2 = (&x - &vxv) * c(k.sqrt());
    let s3 = (&xv - &vx) * Complex64::new(0.0, k.sqrt());
    [s_plus, s_minus, s0, s1, s2, s3]
}

pub fn eggeling_coefficients(omega: &HermitianOperator, d: usize) -> EggelingCoefficients {
    let s: Vec<f64> = eggeling_basis(d)
        .iter()
        .map(|b| (omega.matrix() * b).trace().re)
        .collect();
    EggelingCoefficients {
        s_plus: s[0],
        s_minus: s[1],
        s0: s[2],
        s1: s[3],
        s2: s[4],
        s3: s[5],
    }
}

/// `c_{r,w,v} = (2α/d³)(1 − Re tr[A^w A^v A^r])` through the phase formula.
pub fn c_coefficient_phase(d: usize, a: f64, r: &PhasePoint, w: &PhasePoint, v: &PhasePoint) -> Result<f64> {
    let tr = triple_product_phase(w, v, r)?;
    Ok(2.0 * a / (d as f64).powi(3) * (1.0 - tr.re))
}

/// All `d⁶` coefficients `tr[(A^r⊗A^w⊗A^v) C] / d³`, indexed `(r·d² + w)·d² + v`.
pub fn c_coefficients_trace(c: &HermitianOperator, d: usize) -> Result<Vec<f64>> {
    let basis = PhasePointBasis::new(d, 3)?;
    let norm = (d as f64).powi(3);
    Ok((0..basis.len())
        .into_par_iter()
        .map(|i| basis.monomial(i).trace_with(c.matrix()).re / norm)
        .collect())
}

pub fn c_coefficients_phase(d: usize, a: f64) -> Result<Vec<f64>> {
    let dd = d * d;
    let pts: Vec<PhasePoint> = (0..dd).map(|i| PhasePoint::from_index(d, 1, i)).collect();
    let mut out = Vec::with_capacity(dd * dd * dd);
    for r in &pts {
        for w in &pts {
            for v in &pts {
                out.push(c_coefficient_phase(d, a, r, w, v)?);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    AtMost,
    AtLeast,
}

/// One named comparison `value ≤ threshold` or `value ≥ threshold`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            relation: Relation::AtMost,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            threshold,
            relation: Relation::AtLeast,
            pass: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub label: String,
    pub delta: f64,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let op = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
            };
            writeln!(
                f,
                "{} {} delta={} {} value={:.6e} {op} {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                self.label,
                self.delta,
                c.name,
                c.value,
                c.threshold
            )?;
        }
        Ok(())
    }
}

fn abs_max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs every check on a CPWP certificate.
pub fn verify_cpwp_certificate(cert: &CpwpCertificate) -> Result<VerificationReport> {
    let (d, delta) = (cert.d, cert.delta);
    let df = d as f64;
    let mut checks = Vec::new();

    let alt = (1.0 - delta) * delta * (df * delta - df - delta) / (df.powi(3) * (df + 1.0));
    checks.push(Check::at_most("alpha_forms_agree", (cert.alpha - alt).abs(), COEFF_TOL));
    checks.push(Check::at_most("alpha_nonpositive", cert.alpha, COEFF_TOL));
    checks.push(Check::at_least("t_nonnegative", cert.t, -COEFF_TOL));
    let t_factored = (df - 1.0) * (1.0 - delta) * (df * df + 2.0 * df * (delta - 1.0) * delta - 2.0 * delta * delta)
        / (df * df);
    checks.push(Check::at_most("t_forms_agree", (cert.t - t_factored).abs(), CLOSED_FORM_TOL));

    let op = certificate_operator(d, delta, &cert.c)?;
    checks.push(Check::at_least("min_eigenvalue", min_eigenvalue(&op), -EIGEN_TOL));
    checks.push(Check::at_most("t_matches_trace", (op.trace() - cert.t).abs(), CLOSED_FORM_TOL));

    let phase = c_coefficients_phase(d, cert.alpha)?;
    let trace = c_coefficients_trace(&cert.c, d)?;
    let max = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most("c_max_phase", max(&phase), COEFF_TOL));
    checks.push(Check::at_most("c_max_trace", max(&trace), COEFF_TOL));
    checks.push(Check::at_most("c_phase_vs_trace", abs_max_diff(&phase, &trace), COEFF_TOL));

    if cert.t > CLOSED_FORM_TOL {
        let omega = op.scaled(1.0 / cert.t);
        let s = eggeling_coefficients(&omega, d);
        let (plus, minus) = eggeling_closed_form(d, delta);
        checks.push(Check::at_most("s_plus_closed_form", (s.s_plus - plus).abs(), CLOSED_FORM_TOL));
        checks.push(Check::at_most("s_minus_closed_form", (s.s_minus - minus).abs(), CLOSED_FORM_TOL));
        checks.push(Check::at_least("s_plus_nonnegative", s.s_plus, -CLOSED_FORM_TOL));
        checks.push(Check::at_least("s_minus_nonnegative", s.s_minus, -CLOSED_FORM_TOL));
        for (name, v) in [("s0_zero", s.s0), ("s1_zero", s.s1), ("s2_zero", s.s2), ("s3_zero", s.s3)] {
            checks.push(Check::at_most(name, v.abs(), CLOSED_FORM_TOL));
        }
        checks.push(Check::at_most(
            "s_sum_one",
            (s.s_plus + s.s_minus + s.s0 - 1.0).abs(),
            CLOSED_FORM_TOL,
        ));
    } else {
        // At t = 0 the operator itself must vanish.
        checks.push(Check::at_most("degenerate_operator_zero", op.matrix().norm(), CLOSED_FORM_TOL));
    }
    Ok(VerificationReport {
        label: format!("cpwp d={d}"),
        delta,
        checks,
    })
}

/// Dual point `x = −λ0`, `Y = 0`, `c` from the phase formula, for `n = 2`.
pub fn cpwp_dual_point(cert: &CpwpCertificate) -> Result<DualPoint> {
    Ok(DualPoint {
        x: cert.x_dual,
        y_op: HermitianOperator::zeros(vec![cert.d; 2]),
        class: ClassDual::Cpwp {
            coefficients: c_coefficients_phase(cert.d, cert.alpha)?,
        },
    })
}

#[derive(Debug, Clone)]
pub struct CspoCertificate {
    pub delta: f64,
    pub beta: f64,
    pub d_op: HermitianOperator,
    /// `y_{r,w,v}` at Pauli index `16r + 4w + v`.
    pub y: Vec<f64>,
}

fn kron(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn y_sign(k: usize) -> f64 {
    if k == 2 {
        -1.0
    } else {
        1.0
    }
}

/// Closed form of `y_{r,w,v}` with Pauli labels `0..4` for `I, X, Y, Z`.
pub fn cspo_y_closed_form(b: f64, r: usize, w: usize, v: usize) -> f64 {
    3.0 * b * kron(r, 0) * kron(w, 0) * kron(v, 0)
        - 0.5
            * b
            * (kron(r, w) * kron(v, 0)
                + y_sign(w) * kron(r, 0) * kron(w, v)
                + y_sign(r) * kron(w, 0) * kron(r, v))
}

/// `y_i = tr[P_iᵀ¹² D] / 8` by matrix traces.
pub fn cspo_y_trace(d_op: &HermitianOperator) -> Result<Vec<f64>> {
    (0..64)
        .map(|i| {
            let p = pauli_matrix(&PauliOperator::from_index(3, i));
            let pt = partial_transpose(&p, &[1, 2])?;
            Ok(pt.inner(d_op) / 8.0)
        })
        .collect()
}

pub fn build_cspo_certificate(delta: f64) -> Result<CspoCertificate> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange(format!("noise δ = {delta} outside [0, 1]")));
    }
    let b = beta(delta);
    let y = (0..64).map(|i| cspo_y_closed_form(b, i / 16, (i / 4) % 4, i % 4)).collect();
    Ok(CspoCertificate {
        delta,
        beta: b,
        d_op: cyclic_operator(2, b),
        y,
    })
}

/// Values `Σ_i y_i G_ij` over the stabilizer columns.
pub fn cspo_column_values(y: &[f64], stab: &StabilizerSet) -> Vec<f64> {
    stab.columns()
        .iter()
        .map(|col| col.iter().map(|&(i, s)| y[i as usize] * s as f64).sum())
        .collect()
}

pub fn verify_cspo_certificate(cert: &CspoCertificate, stab3: &StabilizerSet) -> Result<VerificationReport> {
    if stab3.n_qubits() != 3 {
        return Err(Error::Invalid(format!(
            "the CSPO certificate needs 3-qubit stabilizer states, got {}",
            stab3.n_qubits()
        )));
    }
    let delta = cert.delta;
    let b = cert.beta;
    let mut checks = Vec::new();
    checks.push(Check::at_most("beta_nonpositive", b, COEFF_TOL));
    checks.push(Check::at_most("beta_equals_alpha_d2", (b - alpha(2, delta)).abs(), COEFF_TOL));

    let op = certificate_operator(2, delta, &cert.d_op)?;
    checks.push(Check::at_least("min_eigenvalue", min_eigenvalue(&op), -EIGEN_TOL));

    let traced = cspo_y_trace(&cert.d_op)?;
    checks.push(Check::at_most("y_closed_form_vs_trace", abs_max_diff(&cert.y, &traced), COEFF_TOL));

    let values = cspo_column_values(&cert.y, stab3);
    let worst = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    checks.push(Check::at_most("column_values_nonpositive", worst, COEFF_TOL));
    let allowed = [3.0 * b, 2.0 * b, 1.5 * b, b, 0.0];
    let off_set = values
        .iter()
        .map(|v| allowed.iter().map(|a| (v - a).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    checks.push(Check::at_most("column_values_in_set", off_set, CLOSED_FORM_TOL));
    Ok(VerificationReport {
        label: "cspo d=2".into(),
        delta,
        checks,
    })
}

/// Dual point `x = −λ0`, `Y = 0`, `y` from the closed form, for `n = 2`.
pub fn cspo_dual_point(cert: &CspoCertificate) -> DualPoint {
    DualPoint {
        x: -lambda0(2, cert.delta),
        y_op: HermitianOperator::zeros(vec![2; 2]),
        class: ClassDual::Cspo { y: cert.y.clone() },
    }
}

/// The identity-then-discard point evaluated on an instance.
#[derive(Debug, Clone)]
pub struct FeasiblePoint {
    pub value: f64,
    pub probability: f64,
    pub in_class: bool,
    pub choi: HermitianOperator,
}

/// Objective of `J = p·tr_{A_O}[J^𝓘]`, with its success probability and
/// class membership.
pub fn primal_feasible_value(inst: &PurificationInstance, qr: &QrPair) -> Result<FeasiblePoint> {
    let j = keep_first_copy_choi(inst.d, inst.n, inst.p);
    let (value, probability) = objective_and_probability(&j, qr, inst.p)?;
    let in_class = match inst.op_class {
        OperationClass::Cptn => true,
        OperationClass::Cpwp => wigner_constraint_rows(inst.n, inst.d)?
            .iter()
            .all(|row| row.evaluate(&j) >= -COEFF_TOL),
        OperationClass::Cspo => {
            let n_q = inst.n + 1;
            let block = stabilizer_cone_block(n_q, n_q == 4)?;
            block.membership(&j, inst.d_in() as f64)?.satisfiable
        }
    };
    Ok(FeasiblePoint {
        value,
        probability,
        in_class,
        choi: j,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct NoGoCell {
    pub delta: f64,
    pub p: f64,
    pub fidelity: f64,
    pub baseline: f64,
    pub status: SolveStatus,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NoGoVerdict {
    pub d: usize,
    pub n: usize,
    pub op_class: OperationClass,
    pub cells: Vec<NoGoCell>,
    pub confirmed: bool,
}

/// Solves every `(δ, p)` cell on Haar-universal inputs and compares with `λ0`.
pub fn no_go_verdict(
    d: usize,
    n: usize,
    delta_grid: &[f64],
    p_grid: &[f64],
    op_class: OperationClass,
    opts: &FidelityOptions,
) -> Result<NoGoVerdict> {
    let grid: Vec<(f64, f64)> = delta_grid
        .iter()
        .flat_map(|&dl| p_grid.iter().map(move |&p| (dl, p)))
        .collect();
    let insts = grid
        .iter()
        .map(|&(dl, p)| PurificationInstance::new(d, n, dl, p, Ensemble::haar(d), op_class))
        .collect::<Result<Vec<_>>>()?;
    let cells = insts
        .par_iter()
        .map(|inst| {
            let sol = solve_fidelity_with(inst, opts)?;
            let baseline = lambda0(d, inst.delta);
            let ok = sol.report.status == SolveStatus::Optimal;
            Ok(NoGoCell {
                delta: inst.delta,
                p: inst.p,
                fidelity: sol.fidelity,
                baseline,
                status: sol.report.status,
                pass: ok && (sol.fidelity - baseline).abs() <= NO_GO_TOL,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let confirmed = cells.iter().all(|c| c.pass);
    Ok(NoGoVerdict {
        d,
        n,
        op_class,
        cells,
        confirmed,
    })
}

/// `(A^r)ᵀ ⊗ A^w ⊗ A^v` style helper for tests: the dense three-site tensor of single-site monomials.
pub fn three_site_dense(parts: [&MonomialMatrix; 3]) -> CMat {
    kron_all(&parts.map(|m| HermitianOperator::new(vec![m.side()], m.to_dense()).expect("Hermitian")))
        .into_matrix()
}

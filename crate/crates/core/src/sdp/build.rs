//! The fidelity programs for the three operation classes and the map from a
//! solver dual to the dual program
//!
//! `min −x − tr[Y]/p  s.t.  Qᵀ + xRᵀ + Y⊗I ⪯ K,  Y ⪯ 0`
//!
//! where `K = Σ c_{u,v} (A^u)ᵀ⊗A^v` with `c ≤ 0` for CPWP, `K = Σ y_i P_i` with
//! `Σ_i y_i G_ij ≤ 0` for CSPO and `K = 0` for CPTN. Transposes act on the
//! input sites only.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matops::{
    max_eigenvalue, partial_transpose, permutation_operator, CMat, HermitianOperator,
    SitePermutation, ONE,
};
use crate::phase_space::{wigner_constraint_rows, wigner_row_orbits, WignerRow};
use crate::purification::{assemble_qr, OperationClass, PurificationInstance, QrPair};
use crate::sdp::problem::{ConicProblem, LinearFunctional, RowKind, Sense};
use crate::sdp::solver::{solve, SolveReport, SolverOptions};
use crate::stabilizer::{stabilizer_cone_block, PauliOperator, StabilizerConeBlock};

/// Block index of the Choi operator.
pub const CHOI_BLOCK: usize = 0;
/// Block index of the slack in `tr_out J + S = I`.
pub const SLACK_BLOCK: usize = 1;

/// Imaginary parts below this make `Q`, `R` count as real.
const REAL_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Replace the Wigner rows by their averages over input-site permutations.
    pub reduce_wigner: bool,
    /// Real symmetric Choi block; `None` picks it when `Q` and `R` are real.
    pub real_choi: Option<bool>,
    /// Allow the 4-qubit stabilizer set (CSPO with three copies).
    pub extended: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            reduce_wigner: true,
            real_choi: None,
            extended: false,
        }
    }
}

impl BuildOptions {
    /// Every Wigner row and a complex Choi block.
    pub fn full() -> Self {
        Self {
            reduce_wigner: false,
            real_choi: Some(false),
            extended: true,
        }
    }
}

/// A conic program together with what is needed to read its solution back.
#[derive(Debug, Clone)]
pub struct FidelityProgram {
    pub inst: PurificationInstance,
    pub qr: QrPair,
    pub problem: ConicProblem,
    pub real_choi: bool,
    /// Members of each Wigner row, as indices into [`wigner_constraint_rows`].
    pub wigner_members: Vec<Vec<usize>>,
    pub cone: Option<StabilizerConeBlock>,
}

fn is_real(x: &HermitianOperator) -> bool {
    x.matrix().iter().all(|z| z.im.abs() <= REAL_TOL)
}

fn input_sites(n: usize) -> Vec<usize> {
    (1..=n).collect()
}

/// `Qᵀ` and `Rᵀ` with the transpose on the input sites.
pub fn transposed_qr(qr: &QrPair, n: usize) -> Result<(HermitianOperator, HermitianOperator)> {
    let sites = input_sites(n);
    Ok((partial_transpose(&qr.q, &sites)?, partial_transpose(&qr.r, &sites)?))
}

fn trace_link_rows(d_in: usize, d: usize, complex: bool) -> Vec<(LinearFunctional, f64)> {
    let mut rows = Vec::new();
    for a in 0..d_in {
        for b in a..d_in {
            let mut parts = vec![(ONE, if a == b { 1.0 } else { 0.0 })];
            if complex && a != b {
                parts.push((Complex64::new(0.0, -1.0), 0.0));
            }
            for (w, rhs) in parts {
                let mut f = LinearFunctional::new();
                for o in 0..d {
                    f.add(CHOI_BLOCK, b * d + o, a * d + o, w);
                }
                f.add(SLACK_BLOCK, b, a, w);
                rows.push((f, rhs));
            }
        }
    }
    rows
}

fn wigner_functional(rows: &[WignerRow], members: &[usize]) -> LinearFunctional {
    let scale = 1.0 / members.len() as f64;
    let mut f = LinearFunctional::new();
    for &k in members {
        for (r, c, ph) in rows[k].op.entries() {
            f.add(CHOI_BLOCK, r, c, ph * scale);
        }
    }
    f
}

fn check_class(inst: &PurificationInstance, extended: bool) -> Result<()> {
    if inst.op_class == OperationClass::Cspo {
        match inst.n {
            2 => {}
            3 if extended => {}
            3 => {
                return Err(Error::Unsupported(
                    "CSPO with three copies needs the extended stabilizer set".into(),
                ))
            }
            n => return Err(Error::Unsupported(format!("CSPO with {n} copies is out of scope"))),
        }
    }
    Ok(())
}

/// Builds the program with the given options.
pub fn build_program(inst: &PurificationInstance, qr: &QrPair, opts: &BuildOptions) -> Result<FidelityProgram> {
    check_class(inst, opts.extended)?;
    let (d, n) = (inst.d, inst.n);
    let d_in = inst.d_in();
    let side = d_in * d;
    if qr.q.side() != side || qr.r.side() != side {
        return Err(Error::DimensionMismatch {
            dims: qr.q.dims().to_vec(),
            side,
        });
    }
    let real_choi = opts
        .real_choi
        .unwrap_or_else(|| is_real(&qr.q) && is_real(&qr.r));
    if real_choi && !(is_real(&qr.q) && is_real(&qr.r)) {
        return Err(Error::Invalid("a real Choi block needs real Q and R".into()));
    }
    let (qt, rt) = transposed_qr(qr, n)?;

    let mut problem = ConicProblem::new(Sense::Maximize);
    problem.add_block(side, !real_choi);
    problem.add_block(d_in, !real_choi);
    problem.objective.add_dense(CHOI_BLOCK, qt.matrix(), 1.0 / inst.p);

    let mut prob = LinearFunctional::new();
    prob.add_dense(CHOI_BLOCK, rt.matrix(), 1.0);
    problem.push_equalities("probability", vec![(prob, inst.p)]);
    problem.push_equalities("trace_link", trace_link_rows(d_in, d, !real_choi));

    let mut wigner_members = Vec::new();
    let mut cone = None;
    match inst.op_class {
        OperationClass::Cptn => {}
        OperationClass::Cpwp => {
            let rows = wigner_constraint_rows(n, d)?;
            wigner_members = if opts.reduce_wigner {
                wigner_row_orbits(n, d)
            } else {
                (0..rows.len()).map(|k| vec![k]).collect()
            };
            let fs = wigner_members.iter().map(|m| wigner_functional(&rows, m)).collect();
            problem.push_inequalities("wigner", fs);
        }
        OperationClass::Cspo => {
            let block = stabilizer_cone_block(n + 1, opts.extended)?;
            problem.nonneg_len = block.n_vars();
            problem.push_equalities("stabilizer_cone", block.rows(CHOI_BLOCK, 0, d_in as f64));
            cone = Some(block);
        }
    }
    Ok(FidelityProgram {
        inst: inst.clone(),
        qr: qr.clone(),
        problem,
        real_choi,
        wigner_members,
        cone,
    })
}

/// The primal program with every class constraint spelled out and a complex
/// Choi block.
pub fn build_primal(inst: &PurificationInstance, qr: &QrPair) -> Result<ConicProblem> {
    Ok(build_program(inst, qr, &BuildOptions::full())?.problem)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FidelityOptions {
    pub solver: SolverOptions,
    pub build: BuildOptions,
}

impl FidelityOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            solver: SolverOptions::with_tol(tol),
            ..Self::default()
        }
    }

    pub fn extended(mut self, extended: bool) -> Self {
        self.build.extended = extended;
        self
    }
}

#[derive(Debug, Clone)]
pub struct FidelitySolution {
    pub fidelity: f64,
    pub report: SolveReport,
    pub program: FidelityProgram,
}

impl FidelitySolution {
    pub fn dual_point(&self) -> Result<DualPoint> {
        DualPoint::from_report(&self.program, &self.report)
    }
}

/// Maximal fidelity with default options.
pub fn solve_fidelity(inst: &PurificationInstance) -> Result<(f64, SolveReport)> {
    let sol = solve_fidelity_with(inst, &FidelityOptions::default())?;
    Ok((sol.fidelity, sol.report))
}

pub fn solve_fidelity_with(inst: &PurificationInstance, opts: &FidelityOptions) -> Result<FidelitySolution> {
    let qr = assemble_qr(inst)?;
    solve_program(build_program(inst, &qr, &opts.build)?, &opts.solver)
}

/// Solves a built program and attaches the Choi operator to the report.
pub fn solve_program(program: FidelityProgram, opts: &SolverOptions) -> Result<FidelitySolution> {
    let mut report = solve(&program.problem, opts)?;
    let m = &report.blocks[CHOI_BLOCK];
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut j = HermitianOperator::new(vec![program.inst.d; program.inst.n + 1], herm)?;
    if program.inst.op_class == OperationClass::Cpwp && program.wigner_members.iter().any(|m| m.len() > 1) {
        j = symmetrize_inputs(&j, program.inst.n, program.inst.d);
    }
    report.j_opt = Some(j);
    Ok(FidelitySolution {
        fidelity: report.primal_value,
        report,
        program,
    })
}

/// Average of `J` over permutations of the input sites.
pub fn symmetrize_inputs(j: &HermitianOperator, n: usize, d: usize) -> HermitianOperator {
    let perms = SitePermutation::all(n);
    let mut acc = CMat::zeros(j.side(), j.side());
    for perm in &perms {
        let mut images: Vec<usize> = (0..n).map(|k| perm.apply(k) + 1).collect();
        images.push(n + 1);
        let full = SitePermutation::from_one_line(&images).expect("bijection");
        let p = permutation_operator(&full, d);
        acc += &p * j.matrix() * p.adjoint();
    }
    acc /= Complex64::new(perms.len() as f64, 0.0);
    HermitianOperator::new(j.dims().to_vec(), acc).expect("conjugation keeps hermiticity")
}

/// Class-specific part of a dual point.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassDual {
    Cptn,
    /// `c_{u,v}` indexed like [`wigner_constraint_rows`].
    Cpwp { coefficients: Vec<f64> },
    /// `y_i` indexed by Pauli index on `n+1` qubits.
    Cspo { y: Vec<f64> },
}

/// A point of the dual program.
#[derive(Debug, Clone)]
pub struct DualPoint {
    pub x: f64,
    /// `Y` on the input sites.
    pub y_op: HermitianOperator,
    pub class: ClassDual,
}

fn conjugate_point_index(idx: usize, d: usize, sites: usize) -> usize {
    let dd = d * d;
    let mut out = 0;
    let mut stride = 1;
    let mut rest = idx;
    for _ in 0..sites {
        let digit = rest % dd;
        rest /= dd;
        let (a1, a2) = (digit / d, digit % d);
        out += (((d - a1) % d) * d + a2) * stride;
        stride *= dd;
    }
    out
}

fn odd_y(word: &str) -> bool {
    word.bytes().filter(|&b| b == b'Y').count() % 2 == 1
}

impl DualPoint {
    /// Dual objective `−x − tr[Y]/p`.
    pub fn objective(&self, p: f64) -> f64 {
        -self.x - self.y_op.trace() / p
    }

    /// `K` in `Qᵀ + xRᵀ + Y⊗I ⪯ K`.
    pub fn class_operator(&self, d: usize, n: usize) -> Result<CMat> {
        let side = d.pow(n as u32 + 1);
        let mut k = CMat::zeros(side, side);
        match &self.class {
            ClassDual::Cptn => {}
            ClassDual::Cpwp { coefficients } => {
                let rows = wigner_constraint_rows(n, d)?;
                if rows.len() != coefficients.len() {
                    return Err(Error::Invalid(format!(
                        "{} Wigner coefficients for {} rows",
                        coefficients.len(),
                        rows.len()
                    )));
                }
                for (row, &c) in rows.iter().zip(coefficients) {
                    if c != 0.0 {
                        // tr[W J] = Σ W_rc J_cr, so W itself is the dense operator.
                        for (r, col, ph) in row.op.entries() {
                            k[(r, col)] += ph * c;
                        }
                    }
                }
            }
            ClassDual::Cspo { y } => {
                if y.len() != side * side {
                    return Err(Error::Invalid(format!("{} Pauli coefficients for {} qubits", y.len(), n + 1)));
                }
                for (i, &yi) in y.iter().enumerate() {
                    if yi != 0.0 {
                        for (r, col, ph) in PauliOperator::from_index(n + 1, i).monomial().entries() {
                            k[(r, col)] += ph * yi;
                        }
                    }
                }
            }
        }
        Ok(k)
    }

    /// Reads the dual of a solved program back into dual-program form.
    pub fn from_report(program: &FidelityProgram, report: &SolveReport) -> Result<Self> {
        let inst = &program.inst;
        let (d, n, p) = (inst.d, inst.n, inst.p);
        let d_in = inst.d_in();
        let problem = &program.problem;
        let group = |name: &str| {
            problem
                .group(name)
                .ok_or_else(|| Error::Invalid(format!("program has no {name} rows")))
        };
        if report.y.len() != problem.equalities.len() || report.z.len() != problem.inequalities.len() {
            return Err(Error::Invalid("report does not belong to this program".into()));
        }

        let prob = group("probability")?;
        let x = -p * report.y[prob.start];

        let link = group("trace_link")?;
        let mut y_link = CMat::zeros(d_in, d_in);
        for r in link.start..link.start + link.len {
            y_link += problem.equalities[r].0.block_matrix(SLACK_BLOCK, d_in) * Complex64::new(report.y[r], 0.0);
        }
        let y_op = HermitianOperator::new(vec![d; n], y_link * Complex64::new(-p, 0.0))?;

        let class = match inst.op_class {
            OperationClass::Cptn => ClassDual::Cptn,
            OperationClass::Cpwp => {
                let g = group("wigner")?;
                debug_assert_eq!(g.kind, RowKind::Inequality);
                let total: usize = program.wigner_members.iter().map(Vec::len).sum();
                let mut c = vec![0.0; total];
                for (k, members) in program.wigner_members.iter().enumerate() {
                    let share = -p * report.z[g.start + k] / members.len() as f64;
                    for &m in members {
                        c[m] = share;
                    }
                }
                if program.real_choi {
                    let dd = d * d;
                    let sym: Vec<f64> = (0..total)
                        .map(|idx| {
                            let (ui, vi) = (idx / dd, idx % dd);
                            let conj = conjugate_point_index(ui, d, n) * dd + conjugate_point_index(vi, d, 1);
                            0.5 * (c[idx] + c[conj])
                        })
                        .collect();
                    c = sym;
                }
                ClassDual::Cpwp { coefficients: c }
            }
            OperationClass::Cspo => {
                let g = group("stabilizer_cone")?;
                let n_q = n + 1;
                let y = (0..g.len)
                    .map(|i| {
                        if program.real_choi && odd_y(&PauliOperator::from_index(n_q, i).word()) {
                            0.0
                        } else {
                            -p * report.y[g.start + i] / d_in as f64
                        }
                    })
                    .collect();
                ClassDual::Cspo { y }
            }
        };
        Ok(DualPoint { x, y_op, class })
    }
}

/// Largest violation of each dual constraint family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualResiduals {
    /// Positive part of `λ_max(Qᵀ + xRᵀ + Y⊗I − K)`.
    pub psd: f64,
    /// Positive part of `λ_max(Y)`.
    pub y_nsd: f64,
    /// Positive part of the largest `c_{u,v}` or `Σ_i y_i G_ij`.
    pub class_sign: f64,
    /// `|dual objective − primal value|`; a gap below zero means infeasibility.
    pub objective_gap: f64,
}

impl DualResiduals {
    pub fn max(&self) -> f64 {
        self.psd.max(self.y_nsd).max(self.class_sign).max(self.objective_gap)
    }
}

/// Checks a dual point against the program and a primal value.
pub fn dual_residuals(program: &FidelityProgram, dual: &DualPoint, primal_value: f64) -> Result<DualResiduals> {
    let inst = &program.inst;
    let (d, n) = (inst.d, inst.n);
    let (qt, rt) = transposed_qr(&program.qr, n)?;
    let k = dual.class_operator(d, n)?;
    let y_full = crate::matops::kron_mat(dual.y_op.matrix(), &CMat::identity(d, d));
    let m = qt.matrix() + rt.matrix() * Complex64::new(dual.x, 0.0) + y_full - k;
    let m = HermitianOperator::new(vec![d; n + 1], (&m + m.adjoint()) * Complex64::new(0.5, 0.0))?;

    let class_sign = match (&dual.class, &program.cone) {
        (ClassDual::Cptn, _) => 0.0,
        (ClassDual::Cpwp { coefficients }, _) => coefficients.iter().copied().fold(0.0, f64::max),
        (ClassDual::Cspo { y }, Some(cone)) => cone
            .set
            .columns()
            .iter()
            .map(|col| col.iter().map(|&(i, s)| y[i as usize] * s as f64).sum::<f64>())
            .fold(0.0, f64::max),
        (ClassDual::Cspo { .. }, None) => {
            return Err(Error::Invalid("CSPO dual for a program without a stabilizer cone".into()))
        }
    };
    Ok(DualResiduals {
        psd: max_eigenvalue(&m).max(0.0),
        y_nsd: max_eigenvalue(&dual.y_op).max(0.0),
        class_sign,
        objective_gap: (dual.objective(inst.p) - primal_value).abs(),
    })
}

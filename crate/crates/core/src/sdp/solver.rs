//! Homogeneous self-dual interior-point method for problems over products of
//! real symmetric PSD cones and the nonnegative orthant.
//!
//! Complex Hermitian blocks enter through `X ↦ [[Re X, −Im X], [Im X, Re X]]`,
//! with functionals carrying a factor 1/2 so that values are unchanged. Search
//! directions use Nesterov–Todd scaling and Mehrotra's predictor–corrector.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::problem::{ConicProblem, LinearFunctional, Sense};
use crate::error::Result;
use crate::matops::{CMat, HermitianOperator};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Relative duality gap `|p − d| / (1 + |p|)` accepted as optimal.
    pub tol: f64,
    /// Relative primal and dual residual accepted as feasible.
    pub feas_tol: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            feas_tol: 1e-8,
            max_iter: 120,
            verbose: false,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            feas_tol: tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Primal or dual infeasibility certificate found.
    Infeasible,
    MaxIter,
    NumericalTrouble,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::NumericalTrouble => "numerical_trouble",
        }
    }
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Outcome of a solve, in the sense of the original problem.
///
/// Dual variables follow the convention: for a maximization with rows
/// `⟨F_i,X⟩ = b_i` and `⟨G_k,X⟩ ≥ 0`, the dual is `min bᵀy` subject to
/// `Σ y_i F_i − Σ z_k G_k − c ∈ K*`, `z ≥ 0`; for a minimization, subject to
/// `c − Σ y_i F_i − Σ z_k G_k ∈ K*`.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub primal_value: f64,
    pub dual_value: f64,
    /// Relative duality gap `|p − d| / (1 + |p|)`.
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub iterations: usize,
    pub seconds: f64,
    /// Primal PSD blocks, complex Hermitian or real symmetric as declared.
    pub blocks: Vec<CMat>,
    /// Nonnegative primal vector.
    pub x_opt: Vec<f64>,
    /// Dual slack blocks.
    pub dual_blocks: Vec<CMat>,
    /// Equality multipliers.
    pub y: Vec<f64>,
    /// Inequality multipliers, nonnegative.
    pub z: Vec<f64>,
    /// Choi operator of the optimal map, set by the fidelity layer.
    pub j_opt: Option<HermitianOperator>,
}

/// Symmetric sparse matrix with both triangles listed.
#[derive(Debug, Clone, Default)]
struct SparseSym {
    rows: Vec<u32>,
    cols: Vec<u32>,
    lin: Vec<u32>,
    vals: Vec<f64>,
}

impl SparseSym {
    fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn dot(&self, x: &DMatrix<f64>) -> f64 {
        let s = x.as_slice();
        self.lin
            .iter()
            .zip(&self.vals)
            .map(|(&k, &v)| v * s[k as usize])
            .sum()
    }

    fn scatter(&self, out: &mut DMatrix<f64>, scale: f64) {
        let s = out.as_mut_slice();
        for (&k, &v) in self.lin.iter().zip(&self.vals) {
            s[k as usize] += scale * v;
        }
    }
}

/// Problem in the form `min cᵀx, Ax = b, x ∈ K`.
struct StandardForm {
    sides: Vec<usize>,
    complex: Vec<bool>,
    /// Per block, the rows touching it in increasing row order.
    block_rows: Vec<Vec<(usize, SparseSym)>>,
    c_blocks: Vec<DMatrix<f64>>,
    /// Column-compressed nonnegative part: original variables then inequality slacks.
    lin_cols: Vec<Vec<(usize, f64)>>,
    c_lin: Vec<f64>,
    b: DVector<f64>,
    n_eq: usize,
    nonneg_len: usize,
    sign: f64,
}

fn embed_term(entries: &[(usize, usize, Complex64)], side: usize, complex: bool) -> SparseSym {
    let mut herm: Vec<(usize, usize, Complex64)> = Vec::with_capacity(2 * entries.len());
    for &(i, j, v) in entries {
        herm.push((i, j, v * 0.5));
        herm.push((j, i, v.conj() * 0.5));
    }
    herm.sort_by_key(|&(i, j, _)| (i, j));
    let mut merged: Vec<(usize, usize, Complex64)> = Vec::with_capacity(herm.len());
    for (i, j, v) in herm {
        match merged.last_mut() {
            Some(last) if last.0 == i && last.1 == j => last.2 += v,
            _ => merged.push((i, j, v)),
        }
    }
    let real_side = if complex { 2 * side } else { side };
    let mut sp = SparseSym::default();
    let mut push = |r: usize, c: usize, v: f64| {
        if v != 0.0 {
            sp.rows.push(r as u32);
            sp.cols.push(c as u32);
            sp.lin.push((c * real_side + r) as u32);
            sp.vals.push(v);
        }
    };
    for (i, j, h) in merged {
        if complex {
            push(i, j, h.re * 0.5);
            push(i + side, j + side, h.re * 0.5);
            push(i + side, j, h.im * 0.5);
            push(i, j + side, -h.im * 0.5);
        } else {
            push(i, j, h.re);
        }
    }
    sp
}

impl StandardForm {
    fn new(p: &ConicProblem) -> Result<Self> {
        p.validate()?;
        let sign = match p.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let sides: Vec<usize> = p
            .psd_blocks
            .iter()
            .map(|b| if b.complex { 2 * b.side } else { b.side })
            .collect();
        let complex: Vec<bool> = p.psd_blocks.iter().map(|b| b.complex).collect();
        let n_eq = p.equalities.len();
        let m = n_eq + p.inequalities.len();
        let lin_len = p.nonneg_len + p.inequalities.len();

        let mut block_rows: Vec<Vec<(usize, SparseSym)>> = vec![Vec::new(); sides.len()];
        let mut lin_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lin_len];
        let mut b = DVector::zeros(m);
        let rows = p
            .equalities
            .iter()
            .map(|(f, rhs)| (f, *rhs))
            .chain(p.inequalities.iter().map(|f| (f, 0.0)));
        for (row, (f, rhs)) in rows.enumerate() {
            b[row] = rhs;
            for (blk, blk_decl) in p.psd_blocks.iter().enumerate() {
                let entries: Vec<_> = f
                    .blocks
                    .iter()
                    .filter(|t| t.block == blk)
                    .flat_map(|t| t.entries.iter().copied())
                    .collect();
                if entries.is_empty() {
                    continue;
                }
                let sp = embed_term(&entries, blk_decl.side, blk_decl.complex);
                if sp.nnz() > 0 {
                    block_rows[blk].push((row, sp));
                }
            }
            let mut lin: Vec<(usize, f64)> = f.nonneg.clone();
            lin.sort_by_key(|&(k, _)| k);
            let mut last: Option<usize> = None;
            for (k, a) in lin {
                if last == Some(k) {
                    lin_cols[k].last_mut().unwrap().1 += a;
                } else {
                    lin_cols[k].push((row, a));
                }
                last = Some(k);
            }
            if row >= n_eq {
                lin_cols[p.nonneg_len + row - n_eq].push((row, -1.0));
            }
        }

        let c_blocks = p
            .psd_blocks
            .iter()
            .enumerate()
            .map(|(blk, decl)| {
                let entries: Vec<_> = p
                    .objective
                    .blocks
                    .iter()
                    .filter(|t| t.block == blk)
                    .flat_map(|t| t.entries.iter().copied())
                    .collect();
                let mut m = DMatrix::zeros(sides[blk], sides[blk]);
                embed_term(&entries, decl.side, decl.complex).scatter(&mut m, sign);
                m
            })
            .collect();
        let mut c_lin = vec![0.0; lin_len];
        for &(k, a) in &p.objective.nonneg {
            c_lin[k] += sign * a;
        }
        Ok(Self {
            sides,
            complex,
            block_rows,
            c_blocks,
            lin_cols,
            c_lin,
            b,
            n_eq,
            nonneg_len: p.nonneg_len,
            sign,
        })
    }

    fn m(&self) -> usize {
        self.b.len()
    }

    fn degree(&self) -> f64 {
        (self.sides.iter().sum::<usize>() + self.lin_cols.len()) as f64
    }

    fn apply_a(&self, x: &Point) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        for (blk, rows) in self.block_rows.iter().enumerate() {
            for (row, sp) in rows {
                out[*row] += sp.dot(&x.blocks[blk]);
            }
        }
        for (k, col) in self.lin_cols.iter().enumerate() {
            for &(row, a) in col {
                out[row] += a * x.lin[k];
            }
        }
        out
    }

    fn apply_at(&self, y: &DVector<f64>) -> Point {
        let blocks = self
            .block_rows
            .iter()
            .zip(&self.sides)
            .map(|(rows, &n)| {
                let mut m = DMatrix::zeros(n, n);
                for (row, sp) in rows {
                    sp.scatter(&mut m, y[*row]);
                }
                m
            })
            .collect();
        let lin = self
            .lin_cols
            .iter()
            .map(|col| col.iter().map(|&(row, a)| a * y[row]).sum())
            .collect();
        Point { blocks, lin }
    }

    fn c_point(&self) -> Point {
        Point {
            blocks: self.c_blocks.clone(),
            lin: self.c_lin.clone(),
        }
    }

    /// Schur complement `M_ij = ⟨A_i, W A_j W⟩`.
    fn schur(&self, sc: &Scaling) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(m, m);
        for (blk, rows) in self.block_rows.iter().enumerate() {
            let w = &sc.blocks[blk].w;
            let n = self.sides[blk];
            let cols: Vec<Vec<f64>> = (0..rows.len())
                .into_par_iter()
                .map(|pj| {
                    let aj = &rows[pj].1;
                    let f = if aj.nnz() >= n {
                        let mut u = DMatrix::zeros(n, n);
                        for k in 0..aj.nnz() {
                            let (r, c, v) = (aj.rows[k] as usize, aj.cols[k] as usize, aj.vals[k]);
                            let mut dst = u.column_mut(c);
                            dst.axpy(v, &w.column(r), 1.0);
                        }
                        &u * w
                    } else {
                        let mut f = DMatrix::zeros(n, n);
                        for k in 0..aj.nnz() {
                            let (r, c, v) = (aj.rows[k] as usize, aj.cols[k] as usize, aj.vals[k]);
                            f.ger(v, &w.column(r), &w.column(c), 1.0);
                        }
                        f
                    };
                    (0..=pj).map(|pi| rows[pi].1.dot(&f)).collect()
                })
                .collect();
            for (pj, col) in cols.iter().enumerate() {
                let j = rows[pj].0;
                for (pi, &v) in col.iter().enumerate() {
                    let i = rows[pi].0;
                    out[(i, j)] += v;
                    if i != j {
                        out[(j, i)] += v;
                    }
                }
            }
        }
        for (k, col) in self.lin_cols.iter().enumerate() {
            let w2 = sc.lin_w[k] * sc.lin_w[k];
            for &(i, ai) in col {
                for &(j, aj) in col {
                    out[(i, j)] += ai * aj * w2;
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone)]
struct Point {
    blocks: Vec<DMatrix<f64>>,
    lin: Vec<f64>,
}

impl Point {
    fn identity(sf: &StandardForm) -> Self {
        Self {
            blocks: sf.sides.iter().map(|&n| DMatrix::identity(n, n)).collect(),
            lin: vec![1.0; sf.lin_cols.len()],
        }
    }

    fn dot(&self, other: &Point) -> f64 {
        let b: f64 = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.dot(b))
            .sum();
        b + self
            .lin
            .iter()
            .zip(&other.lin)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// `self = a·self + b·other`.
    fn axpby(&mut self, a: f64, b: f64, other: &Point) {
        for (x, y) in self.blocks.iter_mut().zip(&other.blocks) {
            for (xi, yi) in x.as_mut_slice().iter_mut().zip(y.as_slice()) {
                *xi = a * *xi + b * yi;
            }
        }
        for (x, y) in self.lin.iter_mut().zip(&other.lin) {
            *x = a * *x + b * y;
        }
    }

    fn combine(a: f64, x: &Point, b: f64, y: &Point) -> Point {
        let mut out = x.clone();
        out.axpby(a, b, y);
        out
    }

    fn symmetrize(&mut self) {
        for m in &mut self.blocks {
            let t = m.transpose();
            *m += t;
            *m *= 0.5;
        }
    }
}

struct BlockScaling {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: DVector<f64>,
}

struct Scaling {
    blocks: Vec<BlockScaling>,
    lin_w: Vec<f64>,
    lin_lambda: Vec<f64>,
}

impl Scaling {
    fn new(x: &Point, s: &Point) -> Option<Self> {
        let blocks = x
            .blocks
            .iter()
            .zip(&s.blocks)
            .map(|(xb, sb)| {
                let lx = Cholesky::new(xb.clone())?.l();
                let ls = Cholesky::new(sb.clone())?.l();
                let svd = (ls.transpose() * &lx).svd(true, true);
                let v = svd.v_t.as_ref()?.transpose();
                let lambda = svd.singular_values.clone();
                if lambda.iter().any(|&l| l.is_nan() || l <= 0.0 || !l.is_finite()) {
                    return None;
                }
                let inv_sqrt = lambda.map(|l| 1.0 / l.sqrt());
                let sqrt = lambda.map(f64::sqrt);
                let mut g = &lx * &v;
                for (j, f) in inv_sqrt.iter().enumerate() {
                    g.column_mut(j).scale_mut(*f);
                }
                // G⁻¹ = Σ^{1/2} Vᵀ L_x⁻¹ = (L_x⁻ᵀ V Σ^{1/2})ᵀ.
                let mut t = lx.transpose().solve_upper_triangular(&v)?;
                for (j, f) in sqrt.iter().enumerate() {
                    t.column_mut(j).scale_mut(*f);
                }
                let ginv = t.transpose();
                let w = &g * g.transpose();
                Some(BlockScaling { g, ginv, w, lambda })
            })
            .collect::<Option<Vec<_>>>()?;
        let mut lin_w = Vec::with_capacity(x.lin.len());
        let mut lin_lambda = Vec::with_capacity(x.lin.len());
        for (&xi, &si) in x.lin.iter().zip(&s.lin) {
            if !(xi > 0.0 && si > 0.0) {
                return None;
            }
            lin_w.push((xi / si).sqrt());
            lin_lambda.push((xi * si).sqrt());
        }
        Some(Self {
            blocks,
            lin_w,
            lin_lambda,
        })
    }

    /// `W P W`.
    fn apply_w(&self, p: &Point) -> Point {
        Point {
            blocks: self
                .blocks
                .iter()
                .zip(&p.blocks)
                .map(|(sc, m)| &sc.w * m * &sc.w)
                .collect(),
            lin: self
                .lin_w
                .iter()
                .zip(&p.lin)
                .map(|(w, v)| w * w * v)
                .collect(),
        }
    }

    /// Scaled primal direction `G⁻¹ dX G⁻ᵀ`.
    fn scale_primal(&self, dx: &Point) -> Point {
        Point {
            blocks: self
                .blocks
                .iter()
                .zip(&dx.blocks)
                .map(|(sc, m)| &sc.ginv * m * sc.ginv.transpose())
                .collect(),
            lin: self.lin_w.iter().zip(&dx.lin).map(|(w, v)| v / w).collect(),
        }
    }

    /// Scaled dual direction `Gᵀ dS G`.
    fn scale_dual(&self, ds: &Point) -> Point {
        Point {
            blocks: self
                .blocks
                .iter()
                .zip(&ds.blocks)
                .map(|(sc, m)| sc.g.transpose() * m * &sc.g)
                .collect(),
            lin: self.lin_w.iter().zip(&ds.lin).map(|(w, v)| v * w).collect(),
        }
    }

    /// `G (λ ⋄ r) Gᵀ`, where `λ ∘ (λ ⋄ r) = r`.
    fn unscale_complementarity(&self, r: &Point) -> Point {
        Point {
            blocks: self
                .blocks
                .iter()
                .zip(&r.blocks)
                .map(|(sc, rm)| {
                    let l = &sc.lambda;
                    let z = DMatrix::from_fn(rm.nrows(), rm.ncols(), |i, j| {
                        2.0 * rm[(i, j)] / (l[i] + l[j])
                    });
                    &sc.g * z * sc.g.transpose()
                })
                .collect(),
            lin: self
                .lin_w
                .iter()
                .zip(&self.lin_lambda)
                .zip(&r.lin)
                .map(|((w, l), rv)| w * rv / l)
                .collect(),
        }
    }

    /// `−λ∘λ`, optionally plus `σμ e`.
    fn target(&self, shift: f64) -> Point {
        Point {
            blocks: self
                .blocks
                .iter()
                .map(|sc| DMatrix::from_diagonal(&sc.lambda.map(|l| shift - l * l)))
                .collect(),
            lin: self.lin_lambda.iter().map(|l| shift - l * l).collect(),
        }
    }

    /// Largest step keeping `λ + α d` in the cone.
    fn max_step(&self, d: &Point) -> f64 {
        let mut alpha = f64::INFINITY;
        for (sc, m) in self.blocks.iter().zip(&d.blocks) {
            let l = &sc.lambda;
            let n = DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
                m[(i, j)] / (l[i] * l[j]).sqrt()
            });
            let n = (&n + n.transpose()) * 0.5;
            let e = n.symmetric_eigenvalues().min();
            if e < 0.0 {
                alpha = alpha.min(-1.0 / e);
            }
        }
        for (l, v) in self.lin_lambda.iter().zip(&d.lin) {
            if *v < 0.0 {
                alpha = alpha.min(-l / v);
            }
        }
        alpha
    }
}

fn jordan(a: &Point, b: &Point) -> Point {
    Point {
        blocks: a
            .blocks
            .iter()
            .zip(&b.blocks)
            .map(|(x, y)| {
                let p = x * y;
                (&p + p.transpose()) * 0.5
            })
            .collect(),
        lin: a.lin.iter().zip(&b.lin).map(|(x, y)| x * y).collect(),
    }
}

struct Direction {
    dx: Point,
    ds: Point,
    dy: DVector<f64>,
    dtau: f64,
    dkappa: f64,
}

struct Residuals {
    rp: DVector<f64>,
    rd: Point,
    rg: f64,
}

/// Factorization of the Schur complement with the auxiliary solve `M q = u + b`.
struct Newton<'a> {
    sf: &'a StandardForm,
    sc: &'a Scaling,
    chol: Cholesky<f64, nalgebra::Dyn>,
    m: DMatrix<f64>,
    c: Point,
    wcw: Point,
    u: DVector<f64>,
    c_w: f64,
    q: DVector<f64>,
}

impl<'a> Newton<'a> {
    fn new(sf: &'a StandardForm, sc: &'a Scaling) -> Option<Self> {
        let m = sf.schur(sc);
        let chol = factor(&m)?;
        let c = sf.c_point();
        let wcw = sc.apply_w(&c);
        let u = sf.apply_a(&wcw);
        let c_w = c.dot(&wcw);
        let mut newton = Self {
            sf,
            sc,
            chol,
            m,
            c,
            wcw,
            u,
            c_w,
            q: DVector::zeros(0),
        };
        let rhs = &newton.u + &sf.b;
        newton.q = newton.solve(&rhs);
        Some(newton)
    }

    /// Cholesky solve with two rounds of iterative refinement.
    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        let mut x = self.chol.solve(rhs);
        for _ in 0..2 {
            let r = rhs - &self.m * &x;
            x += self.chol.solve(&r);
        }
        x
    }

    fn direction(
        &self,
        res: &Residuals,
        rc: &Point,
        r_tau: f64,
        eta: f64,
        tau: f64,
        kappa: f64,
    ) -> Direction {
        let sf = self.sf;
        let r = self.sc.unscale_complementarity(rc);
        let wrdw = self.sc.apply_w(&res.rd);
        let r1 = eta * &res.rp - sf.apply_a(&r) + eta * sf.apply_a(&wrdw);
        let r2 = eta * res.rg + self.c.dot(&r) - eta * self.wcw.dot(&res.rd) + r_tau / tau;
        let p = self.solve(&r1);
        let bu = &sf.b - &self.u;
        let dtau = (r2 - bu.dot(&p)) / (bu.dot(&self.q) + self.c_w + kappa / tau);
        let dy = &p + &self.q * dtau;
        let aty = sf.apply_at(&dy);
        let mut ds = Point::combine(eta, &res.rd, -1.0, &aty);
        ds.axpby(1.0, dtau, &self.c);
        ds.symmetrize();
        let mut dx = Point::combine(1.0, &r, -1.0, &self.sc.apply_w(&ds));
        dx.symmetrize();
        let dkappa = (r_tau - kappa * dtau) / tau;
        Direction {
            dx,
            ds,
            dy,
            dtau,
            dkappa,
        }
    }
}

fn factor(m: &DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    if let Some(c) = Cholesky::new(m.clone()) {
        return Some(c);
    }
    let scale = m
        .diagonal()
        .iter()
        .fold(0.0_f64, |a, &v| a.max(v.abs()))
        .max(1e-300);
    let mut eps = 1e-14 * scale;
    for _ in 0..8 {
        let mut reg = m.clone();
        for i in 0..reg.nrows() {
            reg[(i, i)] += eps;
        }
        if let Some(c) = Cholesky::new(reg) {
            return Some(c);
        }
        eps *= 100.0;
    }
    None
}

fn step_length(
    sc: &Scaling,
    dir: &Direction,
    dxs: &Point,
    dss: &Point,
    tau: f64,
    kappa: f64,
) -> f64 {
    let mut a = sc.max_step(dxs).min(sc.max_step(dss));
    if dir.dtau < 0.0 {
        a = a.min(-tau / dir.dtau);
    }
    if dir.dkappa < 0.0 {
        a = a.min(-kappa / dir.dkappa);
    }
    a
}

/// Extra steps taken after convergence; kept only when they improve the iterate.
const POLISH_STEPS: usize = 1;

struct Snapshot {
    x: Point,
    s: Point,
    y: DVector<f64>,
    tau: f64,
    summary: (f64, f64, f64, f64, f64),
    iterations: usize,
    score: f64,
}

/// Solves a conic problem.
pub fn solve(problem: &ConicProblem, opts: &SolverOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let sf = StandardForm::new(problem)?;
    let nu = sf.degree();
    let c = sf.c_point();
    let b_norm = sf.b.norm();
    let c_norm = c.norm();

    let mut x = Point::identity(&sf);
    let mut s = Point::identity(&sf);
    let mut y = DVector::zeros(sf.m());
    let (mut tau, mut kappa) = (1.0_f64, 1.0_f64);

    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;
    let mut small_steps = 0;
    let mut summary = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut best: Option<Snapshot> = None;
    let mut polished = 0;

    for iter in 0..=opts.max_iter {
        iterations = iter;
        let ax = sf.apply_a(&x);
        let aty = sf.apply_at(&y);
        let rp = &sf.b * tau - &ax;
        let mut rd = Point::combine(tau, &c, -1.0, &aty);
        rd.axpby(1.0, -1.0, &s);
        let cx = c.dot(&x);
        let by = sf.b.dot(&y);
        let rg = kappa + cx - by;

        let pres = rp.norm() / tau / (1.0 + b_norm);
        let dres = rd.norm() / tau / (1.0 + c_norm);
        let pobj = cx / tau;
        let dobj = by / tau;
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        summary = (pobj, dobj, gap, pres, dres);
        if opts.verbose {
            eprintln!(
                "{iter:3} pobj {pobj:+.10e} dobj {dobj:+.10e} gap {gap:.2e} pres {pres:.2e} dres {dres:.2e} tau {tau:.2e} kappa {kappa:.2e}"
            );
        }
        if !(pobj.is_finite() && dobj.is_finite() && tau.is_finite()) {
            status = SolveStatus::NumericalTrouble;
            break;
        }
        let score = (pres / opts.feas_tol).max(dres / opts.feas_tol).max(gap / opts.tol);
        let improved = best.as_ref().is_none_or(|b| score < b.score);
        if improved {
            best = Some(Snapshot {
                x: x.clone(),
                s: s.clone(),
                y: y.clone(),
                tau,
                summary,
                iterations: iter,
                score,
            });
        }
        let reached = best.as_ref().is_some_and(|b| b.score <= 1.0);
        if reached {
            if score > 1.0 || !improved || polished == POLISH_STEPS {
                status = SolveStatus::Optimal;
                break;
            }
            polished += 1;
        }
        if kappa > tau {
            let mut aty_s = aty.clone();
            aty_s.axpby(1.0, 1.0, &s);
            let primal_infeasible = by > 0.0 && aty_s.norm() / by <= opts.feas_tol * (1.0 + c_norm);
            let dual_infeasible = cx < 0.0 && ax.norm() / (-cx) <= opts.feas_tol * (1.0 + b_norm);
            if primal_infeasible || dual_infeasible {
                status = SolveStatus::Infeasible;
                break;
            }
        }
        if iter == opts.max_iter {
            break;
        }

        let Some(sc) = Scaling::new(&x, &s) else {
            status = SolveStatus::NumericalTrouble;
            break;
        };
        let Some(newton) = Newton::new(&sf, &sc) else {
            status = SolveStatus::NumericalTrouble;
            break;
        };
        let res = Residuals { rp, rd, rg };
        let mu = (x.dot(&s) + tau * kappa) / (nu + 1.0);

        let aff = newton.direction(&res, &sc.target(0.0), -tau * kappa, 1.0, tau, kappa);
        let dxs_a = sc.scale_primal(&aff.dx);
        let dss_a = sc.scale_dual(&aff.ds);
        let alpha_aff = step_length(&sc, &aff, &dxs_a, &dss_a, tau, kappa).min(1.0);
        let sigma = (1.0 - alpha_aff).powi(3).clamp(0.0, 1.0);

        let mut rc = sc.target(sigma * mu);
        rc.axpby(1.0, -1.0, &jordan(&dxs_a, &dss_a));
        let r_tau = -tau * kappa + sigma * mu - aff.dtau * aff.dkappa;
        let dir = newton.direction(&res, &rc, r_tau, 1.0 - sigma, tau, kappa);
        let dxs = sc.scale_primal(&dir.dx);
        let dss = sc.scale_dual(&dir.ds);
        let alpha = (0.99 * step_length(&sc, &dir, &dxs, &dss, tau, kappa)).min(1.0);
        if !alpha.is_finite() {
            status = SolveStatus::NumericalTrouble;
            break;
        }
        if alpha < 1e-8 {
            small_steps += 1;
            if small_steps >= 3 {
                status = SolveStatus::NumericalTrouble;
                break;
            }
        } else {
            small_steps = 0;
        }

        x.axpby(1.0, alpha, &dir.dx);
        s.axpby(1.0, alpha, &dir.ds);
        x.symmetrize();
        s.symmetrize();
        y.axpy(alpha, &dir.dy, 1.0);
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }

    // Fall back to the best iterate unless the run ended with an infeasibility certificate.
    if let Some(b) = best.filter(|_| status != SolveStatus::Infeasible) {
        if b.score <= 1.0 {
            status = SolveStatus::Optimal;
        }
        (x, s, y, tau, summary, iterations) = (b.x, b.s, b.y, b.tau, b.summary, b.iterations);
    }
    let (pobj, dobj, gap, pres, dres) = summary;
    let inv_tau = 1.0 / tau;
    let recover = |blocks: &[DMatrix<f64>], primal: bool| -> Vec<CMat> {
        blocks
            .iter()
            .zip(&sf.complex)
            .map(|(m, &cplx)| {
                if cplx {
                    let n = m.nrows() / 2;
                    let f = if primal { 0.5 } else { 1.0 };
                    CMat::from_fn(n, n, |i, j| {
                        Complex64::new(
                            f * (m[(i, j)] + m[(i + n, j + n)]),
                            f * (m[(i + n, j)] - m[(i, j + n)]),
                        ) * inv_tau
                    })
                } else {
                    m.map(|v| Complex64::new(v * inv_tau, 0.0))
                }
            })
            .collect()
    };
    let y_scaled: Vec<f64> = y.iter().map(|v| v * inv_tau).collect();
    Ok(SolveReport {
        status,
        primal_value: sf.sign * pobj,
        dual_value: sf.sign * dobj,
        gap,
        primal_residual: pres,
        dual_residual: dres,
        iterations,
        seconds: start.elapsed().as_secs_f64(),
        blocks: recover(&x.blocks, true),
        x_opt: x.lin[..sf.nonneg_len].iter().map(|v| v * inv_tau).collect(),
        dual_blocks: recover(&s.blocks, false),
        y: y_scaled[..sf.n_eq].iter().map(|v| v * sf.sign).collect(),
        z: y_scaled[sf.n_eq..].to_vec(),
        j_opt: None,
    })
}

/// Solves `min ‖x‖₁ s.t. Σ_j a_ij x_j = b_i` through the split `x = x⁺ − x⁻`.
/// Columns are given sparse: `columns[j]` lists `(i, a_ij)`.
pub fn l1_min(
    columns: &[Vec<(usize, f64)>],
    b: &[f64],
    opts: &SolverOptions,
) -> Result<(Vec<f64>, SolveReport)> {
    let n = columns.len();
    let mut p = ConicProblem::new(Sense::Minimize);
    p.nonneg_len = 2 * n;
    for k in 0..2 * n {
        p.objective.add_nonneg(k, 1.0);
    }
    let mut rows: Vec<(LinearFunctional, f64)> =
        b.iter().map(|&bi| (LinearFunctional::new(), bi)).collect();
    for (j, col) in columns.iter().enumerate() {
        for &(i, a) in col {
            rows[i].0.add_nonneg(j, a);
            rows[i].0.add_nonneg(n + j, -a);
        }
    }
    p.push_equalities("decomposition", rows);
    let report = solve(&p, opts)?;
    let x = (0..n)
        .map(|j| report.x_opt[j] - report.x_opt[n + j])
        .collect();
    Ok((x, report))
}

//! Dense complex linear algebra with tensor-factor bookkeeping.
//!
//! Sites are numbered from 1, leftmost tensor factor first. A basis index of a
//! multi-site operator is the row-major mixed-radix number formed by the site
//! digits, so site 1 is the most significant digit.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix.
pub type CMat = DMatrix<Complex64>;

/// Asymmetry accepted (and removed) when constructing a Hermitian operator.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Hermitian operator on a tensor product of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dims: Vec<usize>,
    mat: CMat,
}

impl HermitianOperator {
    /// Builds an operator, symmetrizing `(X + X†)/2`. Inputs whose asymmetry
    /// exceeds [`HERMITIAN_TOL`] (relative to the largest entry, floored at 1)
    /// are rejected.
    pub fn new(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        check_shape(&dims, &mat)?;
        let asym = max_asymmetry(&mat);
        let scale = mat.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        if asym > HERMITIAN_TOL * scale {
            return Err(Error::NotHermitian { asymmetry: asym });
        }
        Ok(Self {
            dims,
            mat: hermitian_part(&mat),
        })
    }

    /// Symmetrizes without checking. Used where the input is Hermitian by
    /// construction up to rounding that may accumulate past [`HERMITIAN_TOL`].
    pub(crate) fn from_hermitian_parts(dims: Vec<usize>, mat: CMat) -> Self {
        debug_assert_eq!(mat.nrows(), dims.iter().product::<usize>());
        Self {
            dims,
            mat: hermitian_part(&mat),
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            mat: CMat::identity(n, n),
        }
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let n = dims.iter().product();
        Self {
            dims,
            mat: CMat::zeros(n, n),
        }
    }

    /// `|ψ⟩⟨ψ|` for an (unnormalized) ket.
    pub fn from_ket(dims: Vec<usize>, ket: &[Complex64]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if ket.len() != n {
            return Err(Error::DimensionMismatch {
                dims,
                side: ket.len(),
            });
        }
        let mat = CMat::from_fn(n, n, |i, j| ket[i] * ket[j].conj());
        Ok(Self { dims, mat })
    }

    /// Real diagonal operator.
    pub fn diagonal(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let n: usize = dims.iter().product();
        if diag.len() != n {
            return Err(Error::DimensionMismatch {
                dims,
                side: diag.len(),
            });
        }
        let mut mat = CMat::zeros(n, n);
        for (i, &v) in diag.iter().enumerate() {
            mat[(i, i)] = Complex64::new(v, 0.0);
        }
        Ok(Self { dims, mat })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn side(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat {
        self.mat
    }

    pub fn trace(&self) -> f64 {
        self.mat.diagonal().iter().map(|z| z.re).sum()
    }

    /// `Re tr(self · other)`, the real Hilbert–Schmidt inner product.
    pub fn inner(&self, other: &HermitianOperator) -> f64 {
        hs_inner(&self.mat, &other.mat)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dims: self.dims.clone(),
            mat: self.mat.map(|z| z * factor),
        }
    }

    pub fn frobenius_distance(&self, other: &HermitianOperator) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        kron(self, other)
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        partial_trace(self, keep)
    }

    pub fn partial_transpose(&self, sites: &[usize]) -> Result<Self> {
        partial_transpose(self, sites)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .mat
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// Conjugation `U X U†` by an arbitrary matrix with matching side.
    pub fn conjugate_by(&self, u: &CMat) -> Self {
        let m = u * &self.mat * u.adjoint();
        Self::from_hermitian_parts(self.dims.clone(), m)
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;

    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dims, rhs.dims, "site structure mismatch");
        HermitianOperator {
            dims: self.dims.clone(),
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;

    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dims, rhs.dims, "site structure mismatch");
        HermitianOperator {
            dims: self.dims.clone(),
            mat: &self.mat - &rhs.mat,
        }
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;

    fn mul(self, rhs: f64) -> HermitianOperator {
        self.scaled(rhs)
    }
}

fn check_shape(dims: &[usize], mat: &CMat) -> Result<()> {
    let n: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || mat.nrows() != n || mat.ncols() != n {
        return Err(Error::DimensionMismatch {
            dims: dims.to_vec(),
            side: mat.nrows(),
        });
    }
    Ok(())
}

pub(crate) fn max_asymmetry(mat: &CMat) -> f64 {
    let n = mat.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_part(mat: &CMat) -> CMat {
    let mut out = mat.clone();
    let n = mat.nrows();
    for i in 0..n {
        out[(i, i)] = Complex64::new(mat[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (mat[(i, j)] + mat[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// `Re tr(A B)` for square matrices of equal side.
pub fn hs_inner(a: &CMat, b: &CMat) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..n {
            let x = a[(i, j)];
            let y = b[(j, i)];
            acc += x.re * y.re - x.im * y.im;
        }
    }
    acc
}

/// Row-major strides: site 1 is the most significant digit.
pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut st = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        st[k] = st[k + 1] * dims[k + 1];
    }
    st
}

fn check_sites(sites: &[usize], n_sites: usize) -> Result<Vec<usize>> {
    let mut out = Vec::with_capacity(sites.len());
    for &s in sites {
        if s == 0 || s > n_sites {
            return Err(Error::InvalidSite {
                index: s,
                sites: n_sites,
            });
        }
        if !out.contains(&(s - 1)) {
            out.push(s - 1);
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Kronecker product of raw matrices.
pub fn kron_mat(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn kron(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    HermitianOperator {
        dims,
        mat: a.mat.kronecker(&b.mat),
    }
}

/// Kronecker product of a list of operators, left to right.
pub fn kron_all(ops: &[HermitianOperator]) -> HermitianOperator {
    let mut it = ops.iter();
    let first = it
        .next()
        .expect("kron_all needs at least one operator")
        .clone();
    it.fold(first, |acc, op| kron(&acc, op))
}

/// Partial trace of a raw matrix keeping the listed sites (1-based).
pub fn partial_trace_mat(mat: &CMat, dims: &[usize], keep: &[usize]) -> Result<(CMat, Vec<usize>)> {
    let keep0 = check_sites(keep, dims.len())?;
    let st = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|s| !keep0.contains(s)).collect();
    let kept_dims: Vec<usize> = keep0.iter().map(|&s| dims[s]).collect();
    let offsets = |sites: &[usize]| -> Vec<usize> {
        let sub_dims: Vec<usize> = sites.iter().map(|&s| dims[s]).collect();
        let total: usize = sub_dims.iter().product();
        let sub_st = strides(&sub_dims);
        (0..total)
            .map(|idx| {
                sites
                    .iter()
                    .enumerate()
                    .map(|(k, &s)| ((idx / sub_st[k]) % sub_dims[k]) * st[s])
                    .sum()
            })
            .collect()
    };
    let off_keep = offsets(&keep0);
    let off_tr = offsets(&traced);
    let n = off_keep.len();
    let mut out = CMat::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let mut acc = ZERO;
            for &t in &off_tr {
                acc += mat[(off_keep[i] + t, off_keep[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok((out, kept_dims))
}

/// Partial trace keeping the listed sites (1-based), in ascending site order.
pub fn partial_trace(x: &HermitianOperator, keep: &[usize]) -> Result<HermitianOperator> {
    let (mat, dims) = partial_trace_mat(&x.mat, &x.dims, keep)?;
    Ok(HermitianOperator { dims, mat })
}

/// Transposes the listed tensor factors of a raw matrix.
pub fn partial_transpose_mat(mat: &CMat, dims: &[usize], sites: &[usize]) -> Result<CMat> {
    let sites0 = check_sites(sites, dims.len())?;
    let st = strides(dims);
    let n = mat.nrows();
    let sel: Vec<usize> = (0..n)
        .map(|idx| {
            sites0
                .iter()
                .map(|&s| ((idx / st[s]) % dims[s]) * st[s])
                .sum()
        })
        .collect();
    Ok(CMat::from_fn(n, n, |i, j| {
        let ii = i - sel[i] + sel[j];
        let jj = j - sel[j] + sel[i];
        mat[(ii, jj)]
    }))
}

pub fn partial_transpose(x: &HermitianOperator, sites: &[usize]) -> Result<HermitianOperator> {
    let mat = partial_transpose_mat(&x.mat, &x.dims, sites)?;
    Ok(HermitianOperator {
        dims: x.dims.clone(),
        mat,
    })
}

/// Smallest eigenvalue of a Hermitian operator.
pub fn min_eigenvalue(x: &HermitianOperator) -> f64 {
    x.mat
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of a Hermitian operator.
pub fn max_eigenvalue(x: &HermitianOperator) -> f64 {
    x.mat
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// A permutation of `n` tensor slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SitePermutation {
    images: Vec<usize>,
}

impl SitePermutation {
    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// One-line form, 1-based: `images[k-1] = σ(k)`.
    pub fn from_one_line(images: &[usize]) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::with_capacity(n);
        for &im in images {
            if im == 0 || im > n || seen[im - 1] {
                return Err(Error::InvalidPermutation(format!(
                    "{images:?} is not a bijection on 1..={n}"
                )));
            }
            seen[im - 1] = true;
            out.push(im - 1);
        }
        Ok(Self { images: out })
    }

    /// Product of disjoint cycles on `n` slots, 1-based; `(1 2 3)` sends 1→2→3→1.
    pub fn from_cycles(n: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..n).collect();
        let mut touched = vec![false; n];
        for cycle in cycles {
            for (k, &a) in cycle.iter().enumerate() {
                let b = cycle[(k + 1) % cycle.len()];
                if a == 0 || a > n || b == 0 || b > n || touched[a - 1] {
                    return Err(Error::InvalidPermutation(format!(
                        "bad cycle {cycle:?} on {n} slots"
                    )));
                }
                touched[a - 1] = true;
                images[a - 1] = b - 1;
            }
        }
        Ok(Self { images })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// Image of slot `k` (0-based).
    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &SitePermutation) -> SitePermutation {
        assert_eq!(self.len(), other.len());
        SitePermutation {
            images: other.images.iter().map(|&k| self.images[k]).collect(),
        }
    }

    pub fn inverse(&self) -> SitePermutation {
        let mut inv = vec![0; self.len()];
        for (k, &im) in self.images.iter().enumerate() {
            inv[im] = k;
        }
        SitePermutation { images: inv }
    }

    /// All `n!` permutations in lexicographic order of their one-line form.
    pub fn all(n: usize) -> Vec<SitePermutation> {
        fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<SitePermutation>) {
            let n = used.len();
            if prefix.len() == n {
                out.push(SitePermutation {
                    images: prefix.clone(),
                });
                return;
            }
            for k in 0..n {
                if !used[k] {
                    used[k] = true;
                    prefix.push(k);
                    rec(prefix, used, out);
                    prefix.pop();
                    used[k] = false;
                }
            }
        }
        let mut out = Vec::new();
        rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
        out
    }
}

/// Unitary that moves the ket in slot `k` to slot `σ(k)`, so that
/// `P(σ)P(τ) = P(σ∘τ)`.
pub fn permutation_operator(perm: &SitePermutation, d: usize) -> CMat {
    let n = perm.len();
    let dims = vec![d; n];
    let st = strides(&dims);
    let total = d.pow(n as u32);
    let mut out = CMat::zeros(total, total);
    for i in 0..total {
        let mut j = 0;
        for k in 0..n {
            j += ((i / st[k]) % d) * st[perm.apply(k)];
        }
        out[(j, i)] = ONE;
    }
    out
}

/// Dimension of the symmetric subspace of `n` copies of `C^d`.
pub fn symmetric_dimension(n: usize, d: usize) -> usize {
    binomial(n + d - 1, n)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Projector onto the symmetric subspace: the average of all slot permutations.
pub fn symmetric_projector(n: usize, d: usize) -> HermitianOperator {
    assert!(n >= 1 && d >= 1);
    let dims = vec![d; n];
    let st = strides(&dims);
    let total = d.pow(n as u32);
    let perms = SitePermutation::all(n);
    let w = 1.0 / perms.len() as f64;
    let mut mat = CMat::zeros(total, total);
    for perm in &perms {
        for i in 0..total {
            let mut j = 0;
            for k in 0..n {
                j += ((i / st[k]) % d) * st[perm.apply(k)];
            }
            mat[(j, i)].re += w;
        }
    }
    HermitianOperator { dims, mat }
}

/// Sparse matrix with exactly one nonzero per row: row `r` holds `phases[r]`
/// in column `cols[r]`. Phase-point operators and Pauli strings have this form.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialMatrix {
    pub cols: Vec<usize>,
    pub phases: Vec<Complex64>,
}

impl MonomialMatrix {
    pub fn side(&self) -> usize {
        self.cols.len()
    }

    pub fn kron(&self, other: &MonomialMatrix) -> MonomialMatrix {
        let nb = other.side();
        let mut cols = Vec::with_capacity(self.side() * nb);
        let mut phases = Vec::with_capacity(self.side() * nb);
        for (r, (&c, &p)) in self.cols.iter().zip(&self.phases).enumerate() {
            let _ = r;
            for (&c2, &p2) in other.cols.iter().zip(&other.phases) {
                cols.push(c * nb + c2);
                phases.push(p * p2);
            }
        }
        MonomialMatrix { cols, phases }
    }

    pub fn transpose(&self) -> MonomialMatrix {
        let n = self.side();
        let mut cols = vec![0; n];
        let mut phases = vec![ZERO; n];
        for r in 0..n {
            cols[self.cols[r]] = r;
            phases[self.cols[r]] = self.phases[r];
        }
        MonomialMatrix { cols, phases }
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.side();
        let mut m = CMat::zeros(n, n);
        for r in 0..n {
            m[(r, self.cols[r])] = self.phases[r];
        }
        m
    }

    /// `tr(self · X)` for a dense `X`.
    pub fn trace_with(&self, x: &CMat) -> Complex64 {
        let mut acc = ZERO;
        for r in 0..self.side() {
            acc += self.phases[r] * x[(self.cols[r], r)];
        }
        acc
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        self.cols
            .iter()
            .zip(&self.phases)
            .enumerate()
            .map(|(r, (&c, &p))| (r, c, p))
    }
}

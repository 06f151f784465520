//! Purification instances: noise model, input ensembles and the operators
//! `Q` and `R` entering the fidelity programs.
//!
//! For an ensemble `Ψ` and `n` copies, with every input copy depolarized,
//!
//! * `Q = (𝒟_δ^{⊗n} ⊗ 𝓘)(avg ψ^{⊗(n+1)})`,
//! * `R = 𝒟_δ^{⊗n}(avg ψ^{⊗n}) ⊗ I`.
//!
//! For Haar-random inputs the averages are `Π_k / D(k, d)`.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matops::{
    kron, partial_trace, partial_transpose, strides, symmetric_dimension, symmetric_projector, CMat,
    HermitianOperator, ONE, ZERO,
};
use crate::phase_space::is_odd_prime;

/// Free-operation class of the purification protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperationClass {
    /// Any completely positive trace-non-increasing map.
    Cptn,
    /// Completely positive Wigner-preserving maps (odd prime `d`).
    Cpwp,
    /// Completely stabilizer-preserving operations (qubits).
    Cspo,
}

impl OperationClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            OperationClass::Cptn => "cptn",
            OperationClass::Cpwp => "cpwp",
            OperationClass::Cspo => "cspo",
        }
    }
}

impl fmt::Display for OperationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperationClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cptn" => Ok(OperationClass::Cptn),
            "cpwp" => Ok(OperationClass::Cpwp),
            "cspo" => Ok(OperationClass::Cspo),
            other => Err(Error::Invalid(format!("unknown operation class {other:?}"))),
        }
    }
}

/// Set of pure input states, finite or Haar distributed.
#[derive(Debug, Clone, PartialEq)]
pub enum Ensemble {
    Discrete { d: usize, states: Vec<Vec<Complex64>> },
    HaarUniversal { d: usize },
}

#[derive(Serialize, Deserialize)]
struct EnsembleFile {
    d: usize,
    states: Vec<Vec<[f64; 2]>>,
}

/// Normalization accepted for ensemble states.
pub const NORM_TOL: f64 = 1e-10;

impl Ensemble {
    pub fn haar(d: usize) -> Self {
        Ensemble::HaarUniversal { d }
    }

    /// Validates dimension and normalization of every state.
    pub fn discrete(d: usize, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange(format!("ensemble dimension must be at least 2, got {d}")));
        }
        if states.is_empty() {
            return Err(Error::Invalid("ensemble has no states".into()));
        }
        for (k, s) in states.iter().enumerate() {
            if s.len() != d {
                return Err(Error::Invalid(format!(
                    "state {k} has {} amplitudes, expected {d}",
                    s.len()
                )));
            }
            let norm: f64 = s.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Invalid(format!("state {k} is not normalized (norm {norm:.15})")));
            }
        }
        Ok(Ensemble::Discrete { d, states })
    }

    pub fn d(&self) -> usize {
        match self {
            Ensemble::Discrete { d, .. } | Ensemble::HaarUniversal { d } => *d,
        }
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, Ensemble::HaarUniversal { .. })
    }

    /// `avg ψ^{⊗k}` over the ensemble.
    pub fn moment(&self, k: usize) -> HermitianOperator {
        match self {
            Ensemble::HaarUniversal { d } => {
                symmetric_projector(k, *d).scaled(1.0 / symmetric_dimension(k, *d) as f64)
            }
            Ensemble::Discrete { d, states } => {
                let side = d.pow(k as u32);
                let mut acc = CMat::zeros(side, side);
                for s in states {
                    let mut ket = vec![ONE];
                    for _ in 0..k {
                        ket = ket.iter().flat_map(|a| s.iter().map(move |b| a * b)).collect();
                    }
                    for j in 0..side {
                        let cj = ket[j].conj();
                        for i in 0..side {
                            acc[(i, j)] += ket[i] * cj;
                        }
                    }
                }
                acc /= Complex64::new(states.len() as f64, 0.0);
                HermitianOperator::from_hermitian_parts(vec![*d; k], acc)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnsembleFile = serde_json::from_str(text)?;
        let states = file
            .states
            .into_iter()
            .map(|s| s.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        Self::discrete(file.d, states)
    }

    pub fn to_json(&self) -> Result<String> {
        match self {
            Ensemble::Discrete { d, states } => {
                let file = EnsembleFile {
                    d: *d,
                    states: states
                        .iter()
                        .map(|s| s.iter().map(|z| [z.re, z.im]).collect())
                        .collect(),
                };
                Ok(serde_json::to_string_pretty(&file)?)
            }
            Ensemble::HaarUniversal { .. } => Err(Error::Unsupported(
                "the Haar ensemble has no finite state list to save".into(),
            )),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// One fidelity problem.
#[derive(Debug, Clone, PartialEq)]
pub struct PurificationInstance {
    pub d: usize,
    pub n: usize,
    pub delta: f64,
    pub p: f64,
    pub ensemble: Ensemble,
    pub op_class: OperationClass,
}

impl PurificationInstance {
    pub fn new(
        d: usize,
        n: usize,
        delta: f64,
        p: f64,
        ensemble: Ensemble,
        op_class: OperationClass,
    ) -> Result<Self> {
        if n < 2 {
            return Err(Error::OutOfRange(format!("need at least 2 copies, got {n}")));
        }
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::OutOfRange(format!("noise δ = {delta} outside [0, 1]")));
        }
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::OutOfRange(format!("success probability p = {p} outside (0, 1]")));
        }
        if ensemble.d() != d {
            return Err(Error::Invalid(format!(
                "ensemble dimension {} does not match d = {d}",
                ensemble.d()
            )));
        }
        match op_class {
            OperationClass::Cpwp if !is_odd_prime(d) => return Err(Error::NotOddPrime(d)),
            OperationClass::Cspo if d != 2 => {
                return Err(Error::Unsupported(format!("CSPO needs qubits, got d = {d}")))
            }
            _ => {}
        }
        Ok(Self {
            d,
            n,
            delta,
            p,
            ensemble,
            op_class,
        })
    }

    /// Dimension of all input copies together.
    pub fn d_in(&self) -> usize {
        self.d.pow(self.n as u32)
    }

    pub fn with_delta_p(&self, delta: f64, p: f64) -> Result<Self> {
        Self::new(self.d, self.n, delta, p, self.ensemble.clone(), self.op_class)
    }
}

#[derive(Debug, Clone)]
pub struct QrPair {
    pub q: HermitianOperator,
    pub r: HermitianOperator,
}

/// `X ↦ δ_{i_s j_s} X_{ī j̄} / d`: places `I/d` at `site` (1-based) of an operator
/// whose remaining sites are given by `x`.
fn insert_maximally_mixed(x: &HermitianOperator, site: usize, d: usize) -> HermitianOperator {
    let mut dims = x.dims().to_vec();
    dims.insert(site - 1, d);
    let st = strides(&dims);
    let side: usize = dims.iter().product();
    let s = site - 1;
    let reduce = |i: usize| -> usize {
        let high = i / (st[s] * d);
        let low = i % st[s];
        high * st[s] + low
    };
    let digit = |i: usize| (i / st[s]) % d;
    let inv_d = 1.0 / d as f64;
    let src = x.matrix();
    let m = CMat::from_fn(side, side, |i, j| {
        if digit(i) == digit(j) {
            src[(reduce(i), reduce(j))] * inv_d
        } else {
            ZERO
        }
    });
    HermitianOperator::from_hermitian_parts(dims, m)
}

/// `(1−δ)X + δ · tr_site(X) ⊗ I/d` on one site.
pub fn depolarize(x: &HermitianOperator, site: usize, delta: f64) -> Result<HermitianOperator> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::OutOfRange(format!("noise δ = {delta} outside [0, 1]")));
    }
    let n_sites = x.dims().len();
    if site == 0 || site > n_sites {
        return Err(Error::InvalidSite {
            index: site,
            sites: n_sites,
        });
    }
    let d = x.dims()[site - 1];
    if n_sites == 1 {
        let mixed = HermitianOperator::identity(vec![d]).scaled(x.trace() / d as f64);
        return Ok(&x.scaled(1.0 - delta) + &mixed.scaled(delta));
    }
    let keep: Vec<usize> = (1..=n_sites).filter(|&k| k != site).collect();
    let reduced = partial_trace(x, &keep)?;
    let mixed = insert_maximally_mixed(&reduced, site, d);
    Ok(&x.scaled(1.0 - delta) + &mixed.scaled(delta))
}

/// Builds `Q` and `R` for an instance.
pub fn assemble_qr(inst: &PurificationInstance) -> Result<QrPair> {
    let d = inst.d;
    let n = inst.n;
    let mut q = inst.ensemble.moment(n + 1);
    let mut r = inst.ensemble.moment(n);
    for site in 1..=n {
        q = depolarize(&q, site, inst.delta)?;
        r = depolarize(&r, site, inst.delta)?;
    }
    let r = kron(&r, &HermitianOperator::identity(vec![d]));
    Ok(QrPair { q, r })
}

/// Fidelity without purification, `avg tr[𝒟_δ(ψ) ψ]`.
pub fn baseline_fidelity(inst: &PurificationInstance) -> f64 {
    let d = inst.d as f64;
    match &inst.ensemble {
        Ensemble::HaarUniversal { .. } => 1.0 - (d - 1.0) * inst.delta / d,
        Ensemble::Discrete { d: dim, states } => {
            let total: f64 = states
                .iter()
                .map(|s| {
                    let psi = HermitianOperator::from_ket(vec![*dim], s).expect("validated ket");
                    let noisy = depolarize(&psi, 1, inst.delta).expect("validated δ");
                    noisy.inner(&psi)
                })
                .sum();
            total / states.len() as f64
        }
    }
}

/// The qubit and qutrit ensembles used for fixed-ensemble comparisons:
/// `{|0⟩, |+⟩}` and `{|𝕊⟩, |ℕ⟩, |T⟩, |H₊⟩}`.
pub fn fig2_ensembles() -> (Ensemble, Ensemble) {
    let c = |re: f64| Complex64::new(re, 0.0);
    let h = 1.0 / 2f64.sqrt();
    let qubit = Ensemble::discrete(2, vec![vec![c(1.0), c(0.0)], vec![c(h), c(h)]]).expect("exact states");

    let s6 = 1.0 / 6f64.sqrt();
    let s3 = 1.0 / 3f64.sqrt();
    let r3 = 3f64.sqrt();
    let hn = 1.0 / (6.0 + 2.0 * r3).sqrt();
    let phase = Complex64::from_polar(1.0, 2.0 * PI / 9.0);
    let strange = vec![c(0.0), c(h), c(-h)];
    let norrell = vec![c(-s6), c(2.0 * s6), c(-s6)];
    let t = vec![phase * s3, c(s3), phase.conj() * s3];
    let h_plus = vec![c((1.0 + r3) * hn), c(hn), c(hn)];
    let qutrit = Ensemble::discrete(3, vec![strange, norrell, t, h_plus]).expect("exact states");
    (qubit, qutrit)
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn haar_random_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Choi operator `Σ_ij |i⟩⟨j| ⊗ U|i⟩⟨j|U†` of a unitary conjugation.
pub fn choi_of_unitary(u: &CMat, dims_in: Vec<usize>) -> Result<HermitianOperator> {
    let d = u.nrows();
    if dims_in.iter().product::<usize>() != d || u.ncols() != d {
        return Err(Error::DimensionMismatch { dims: dims_in, side: d });
    }
    let mut ket = vec![ZERO; d * d];
    for i in 0..d {
        for k in 0..d {
            ket[i * d + k] = u[(k, i)];
        }
    }
    let mut dims = dims_in.clone();
    dims.extend_from_slice(&dims_in);
    HermitianOperator::from_ket(dims, &ket)
}

/// `p ·` Choi of the map that keeps input copy 1 and discards the others,
/// on sites `(in_1, …, in_n, out)`.
pub fn keep_first_copy_choi(d: usize, n: usize, p: f64) -> HermitianOperator {
    let side = d.pow(n as u32 + 1);
    let rest = d.pow(n as u32 - 1);
    let mut m = CMat::zeros(side, side);
    // Index of |i⟩_{in1} |k⟩_{rest} |o⟩_{out} is (i·rest + k)·d + o.
    for i in 0..d {
        for j in 0..d {
            for k in 0..rest {
                m[((i * rest + k) * d + i, (j * rest + k) * d + j)] = Complex64::new(p, 0.0);
            }
        }
    }
    HermitianOperator::from_hermitian_parts(vec![d; n + 1], m)
}

/// `(1/p) tr[J Q^{T_in}]` and `tr[J R^{T_in}]` for a candidate Choi operator.
pub fn objective_and_probability(j: &HermitianOperator, qr: &QrPair, p: f64) -> Result<(f64, f64)> {
    let n_in: Vec<usize> = (1..qr.q.dims().len()).collect();
    let qt = partial_transpose(&qr.q, &n_in)?;
    let rt = partial_transpose(&qr.r, &n_in)?;
    Ok((j.inner(&qt) / p, j.inner(&rt)))
}

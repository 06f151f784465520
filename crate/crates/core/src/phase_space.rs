//! Discrete phase space of odd prime qudits.
//!
//! Weyl operators `T_u = τ^{-a₁a₂} Z^{a₁} X^{a₂}` with `τ = e^{(d+1)πi/d}`,
//! phase-point operators `A^u = T_u A^0 T_u†` and `A^0 = Σ_k |k⟩⟨−k|`.
//! Every phase-point operator is monomial: `A^{(a₁,a₂)} = Σ_k ω^{2a₁k} |k+a₂⟩⟨a₂−k|`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matops::{strides, CMat, HermitianOperator, MonomialMatrix, ZERO};

pub fn is_odd_prime(d: usize) -> bool {
    d >= 3
        && d % 2 == 1
        && (3..)
            .step_by(2)
            .take_while(|k| k * k <= d)
            .all(|k| !d.is_multiple_of(k))
}

fn require_odd_prime(d: usize) -> Result<()> {
    if is_odd_prime(d) {
        Ok(())
    } else {
        Err(Error::NotOddPrime(d))
    }
}

fn root_of_unity(d: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(d as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / d as f64)
}

/// Point of `(ℤ_d × ℤ_d)^sites`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PhasePoint {
    d: usize,
    components: Vec<(usize, usize)>,
}

impl PhasePoint {
    /// Components are reduced mod `d`.
    pub fn new(d: usize, components: &[(i64, i64)]) -> Result<Self> {
        require_odd_prime(d)?;
        let m = d as i64;
        Ok(Self {
            d,
            components: components
                .iter()
                .map(|&(a, b)| (a.rem_euclid(m) as usize, b.rem_euclid(m) as usize))
                .collect(),
        })
    }

    pub fn single(d: usize, a1: i64, a2: i64) -> Result<Self> {
        Self::new(d, &[(a1, a2)])
    }

    /// Inverse of [`PhasePoint::index`].
    pub fn from_index(d: usize, sites: usize, mut index: usize) -> Self {
        let mut components = vec![(0, 0); sites];
        for c in components.iter_mut().rev() {
            let s = index % (d * d);
            index /= d * d;
            *c = (s / d, s % d);
        }
        Self { d, components }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[(usize, usize)] {
        &self.components
    }

    /// Row-major index with per-site digit `a₁·d + a₂`, site 1 most significant.
    pub fn index(&self) -> usize {
        self.components
            .iter()
            .fold(0, |acc, &(a1, a2)| acc * self.d * self.d + a1 * self.d + a2)
    }

    /// Concatenation `u ⊕ v`.
    pub fn concat(&self, other: &PhasePoint) -> PhasePoint {
        assert_eq!(self.d, other.d);
        let mut components = self.components.clone();
        components.extend_from_slice(&other.components);
        PhasePoint {
            d: self.d,
            components,
        }
    }
}

/// Single-site Weyl operator `τ^{-a₁a₂} Z^{a₁} X^{a₂}`.
pub fn weyl_operator(u: &PhasePoint) -> Result<CMat> {
    if u.sites() != 1 {
        return Err(Error::Invalid(format!(
            "Weyl operator needs a single-site point, got {} sites",
            u.sites()
        )));
    }
    let d = u.d;
    let (a1, a2) = u.components[0];
    // τ = ω^{(d+1)/2}, so τ^{-a₁a₂} = ω^{-(d+1)a₁a₂/2}.
    let tau_pow = -(d.div_ceil(2) as i64) * (a1 * a2) as i64;
    let mut m = CMat::zeros(d, d);
    for j in 0..d {
        let row = (j + a2) % d;
        m[(row, j)] = root_of_unity(d, tau_pow + (a1 * row) as i64);
    }
    Ok(m)
}

fn single_site_monomial(d: usize, a1: usize, a2: usize) -> MonomialMatrix {
    let mut cols = vec![0; d];
    let mut phases = vec![ZERO; d];
    for r in 0..d {
        let k = (r + d - a2) % d;
        cols[r] = (2 * a2 + d - r) % d;
        phases[r] = root_of_unity(d, (2 * a1 * k) as i64);
    }
    MonomialMatrix { cols, phases }
}

/// Phase-point operator `A^u` as a Hermitian operator on `u.sites()` qudits.
pub fn phase_point_operator(u: &PhasePoint) -> Result<HermitianOperator> {
    require_odd_prime(u.d)?;
    let m = u
        .components
        .iter()
        .map(|&(a1, a2)| single_site_monomial(u.d, a1, a2))
        .reduce(|acc, m| acc.kron(&m))
        .ok_or_else(|| Error::Invalid("phase point with no sites".into()))?;
    Ok(HermitianOperator::from_hermitian_parts(
        vec![u.d; u.sites()],
        m.to_dense(),
    ))
}

/// All phase-point operators for a fixed dimension and site count.
#[derive(Debug, Clone)]
pub struct PhasePointBasis {
    d: usize,
    sites: usize,
    single: Vec<MonomialMatrix>,
}

impl PhasePointBasis {
    pub fn new(d: usize, sites: usize) -> Result<Self> {
        require_odd_prime(d)?;
        if sites == 0 {
            return Err(Error::OutOfRange(
                "phase-point basis needs at least one site".into(),
            ));
        }
        let single = (0..d * d)
            .map(|i| single_site_monomial(d, i / d, i % d))
            .collect();
        Ok(Self { d, sites, single })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// Number of phase-space points, `d^{2·sites}`.
    pub fn len(&self) -> usize {
        (self.d * self.d).pow(self.sites as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.len()).map(|i| PhasePoint::from_index(self.d, self.sites, i))
    }

    /// Sparse form of `A^u` for the point with the given index.
    pub fn monomial(&self, index: usize) -> MonomialMatrix {
        let p = PhasePoint::from_index(self.d, self.sites, index);
        self.monomial_of(&p)
    }

    fn monomial_of(&self, p: &PhasePoint) -> MonomialMatrix {
        p.components
            .iter()
            .map(|&(a1, a2)| self.single[a1 * self.d + a2].clone())
            .reduce(|acc, m| acc.kron(&m))
            .expect("at least one site")
    }

    pub fn operator(&self, u: &PhasePoint) -> Result<HermitianOperator> {
        self.check_point(u)?;
        let m = self.monomial_of(u).to_dense();
        Ok(HermitianOperator::from_hermitian_parts(
            vec![self.d; self.sites],
            m,
        ))
    }

    fn check_point(&self, u: &PhasePoint) -> Result<()> {
        if u.d != self.d || u.sites() != self.sites {
            return Err(Error::Invalid(format!(
                "point of dimension {} on {} sites does not belong to basis of dimension {} on {} sites",
                u.d,
                u.sites(),
                self.d,
                self.sites
            )));
        }
        Ok(())
    }
}

/// Discrete Wigner function, values indexed by [`PhasePoint::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction {
    pub d: usize,
    pub sites: usize,
    pub values: Vec<f64>,
}

impl WignerFunction {
    pub fn get(&self, u: &PhasePoint) -> f64 {
        self.values[u.index()]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_u W(u) A^u`, which recovers the source operator.
    pub fn reconstruct(&self, basis: &PhasePointBasis) -> HermitianOperator {
        let side = self.d.pow(self.sites as u32);
        let mut m = CMat::zeros(side, side);
        for (i, &w) in self.values.iter().enumerate() {
            for (r, c, z) in basis.monomial(i).entries() {
                m[(r, c)] += z * w;
            }
        }
        HermitianOperator::from_hermitian_parts(vec![self.d; self.sites], m)
    }
}

/// `W(u) = tr[A^u ρ] / d^{sites}`.
pub fn wigner_of_state(rho: &HermitianOperator, basis: &PhasePointBasis) -> Result<WignerFunction> {
    if rho.dims().iter().any(|&k| k != basis.d) || rho.dims().len() != basis.sites {
        return Err(Error::DimensionMismatch {
            dims: rho.dims().to_vec(),
            side: basis.d.pow(basis.sites as u32),
        });
    }
    let norm = (basis.d as f64).powi(basis.sites as i32);
    let values = (0..basis.len())
        .map(|i| basis.monomial(i).trace_with(rho.matrix()).re / norm)
        .collect();
    Ok(WignerFunction {
        d: basis.d,
        sites: basis.sites,
        values,
    })
}

/// `tr[A^r A^w A^v] = e^{4πi f/d}` for single-site points.
pub fn triple_product_phase(r: &PhasePoint, w: &PhasePoint, v: &PhasePoint) -> Result<Complex64> {
    if r.d != w.d || r.d != v.d {
        return Err(Error::Invalid(format!(
            "mismatched dimensions {}, {}, {}",
            r.d, w.d, v.d
        )));
    }
    if r.sites() != 1 || w.sites() != 1 || v.sites() != 1 {
        return Err(Error::Invalid(
            "triple product phase takes single-site points".into(),
        ));
    }
    let (r1, r2) = (r.components[0].0 as i64, r.components[0].1 as i64);
    let (w1, w2) = (w.components[0].0 as i64, w.components[0].1 as i64);
    let (v1, v2) = (v.components[0].0 as i64, v.components[0].1 as i64);
    let f = r1 * (v2 - w2) + w1 * (r2 - v2) + v1 * (w2 - r2);
    Ok(root_of_unity(r.d, 2 * f))
}

/// `tr[A^r A^w A^v]` by explicit matrix products.
pub fn triple_product_trace(r: &PhasePoint, w: &PhasePoint, v: &PhasePoint) -> Result<Complex64> {
    let a = phase_point_operator(r)?;
    let b = phase_point_operator(w)?;
    let c = phase_point_operator(v)?;
    Ok((a.matrix() * b.matrix() * c.matrix()).trace())
}

/// One Wigner-positivity functional `J ↦ tr[((A^u)ᵀ ⊗ A^v) J]` on Choi operators
/// with `n_in` input sites followed by one output site.
#[derive(Debug, Clone)]
pub struct WignerRow {
    pub u: PhasePoint,
    pub v: PhasePoint,
    pub op: MonomialMatrix,
}

impl WignerRow {
    pub fn evaluate(&self, j: &HermitianOperator) -> f64 {
        self.op.trace_with(j.matrix()).re
    }
}

/// All `d^{2n_in}·d²` functionals, ordered by `(u, v)` index.
pub fn wigner_constraint_rows(n_in: usize, d: usize) -> Result<Vec<WignerRow>> {
    let in_basis = PhasePointBasis::new(d, n_in)?;
    let single: Vec<MonomialMatrix> = (0..d * d)
        .map(|i| single_site_monomial(d, i / d, i % d))
        .collect();
    let rows = (0..in_basis.len())
        .into_par_iter()
        .flat_map_iter(|ui| {
            let u = PhasePoint::from_index(d, n_in, ui);
            let au_t = in_basis.monomial(ui).transpose();
            single.iter().enumerate().map(move |(vi, av)| WignerRow {
                u: u.clone(),
                v: PhasePoint::from_index(d, 1, vi),
                op: au_t.kron(av),
            })
        })
        .collect();
    Ok(rows)
}

/// Orbits of the input point under permutations of the `n_in` input sites,
/// keyed by the sorted multiset of single-site indices. Returns, for each
/// orbit, the indices into [`wigner_constraint_rows`] output sharing one
/// output point `v`.
pub fn wigner_row_orbits(n_in: usize, d: usize) -> Vec<Vec<usize>> {
    use std::collections::BTreeMap;
    let dd = d * d;
    let n_u = dd.pow(n_in as u32);
    let st = strides(&vec![dd; n_in]);
    let mut groups: BTreeMap<(Vec<usize>, usize), Vec<usize>> = BTreeMap::new();
    for ui in 0..n_u {
        let mut key: Vec<usize> = (0..n_in).map(|k| (ui / st[k]) % dd).collect();
        key.sort_unstable();
        for vi in 0..dd {
            groups
                .entry((key.clone(), vi))
                .or_default()
                .push(ui * dd + vi);
        }
    }
    groups.into_values().collect()
}

/// Exact `A^0` from the Weyl-operator average `(1/d) Σ_u T_u`.
pub fn parity_from_weyl(d: usize) -> Result<CMat> {
    require_odd_prime(d)?;
    let mut acc = CMat::zeros(d, d);
    for a1 in 0..d {
        for a2 in 0..d {
            acc += weyl_operator(&PhasePoint::single(d, a1 as i64, a2 as i64)?)?;
        }
    }
    Ok(acc / Complex64::new(d as f64, 0.0))
}

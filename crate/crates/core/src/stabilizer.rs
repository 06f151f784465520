//! Multi-qubit Pauli operators and pure stabilizer states.
//!
//! Pauli words are indexed in base 4 with `I=0, X=1, Y=2, Z=3`, leftmost qubit
//! most significant. Stabilizer states are enumerated from reduced row-echelon
//! generator matrices over GF(2) that are isotropic under the symplectic form,
//! one state per choice of generator signs.

use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matops::{partial_trace, HermitianOperator, MonomialMatrix, ONE, ZERO};
use crate::sdp::{ConicProblem, LinearFunctional, Sense, SolveReport, SolveStatus, SolverOptions};

/// Largest qubit count accepted by the enumerator; 4 requires the extended flag.
pub const MAX_QUBITS: usize = 4;

const LETTERS: [char; 4] = ['I', 'X', 'Y', 'Z'];

/// Tensor product of single-qubit Pauli letters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    letters: Vec<u8>,
}

impl PauliOperator {
    pub fn new(word: &str) -> Result<Self> {
        let letters = word
            .chars()
            .map(|ch| match ch.to_ascii_uppercase() {
                'I' => Ok(0),
                'X' => Ok(1),
                'Y' => Ok(2),
                'Z' => Ok(3),
                other => Err(Error::Invalid(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        if letters.is_empty() {
            return Err(Error::Invalid("empty Pauli word".into()));
        }
        Ok(Self { letters })
    }

    pub fn from_index(n_qubits: usize, mut index: usize) -> Self {
        let mut letters = vec![0; n_qubits];
        for l in letters.iter_mut().rev() {
            *l = (index % 4) as u8;
            index /= 4;
        }
        Self { letters }
    }

    /// Letter on qubit `k` from the bits `x_k`, `z_k` of two masks (bit `k` is qubit `k`).
    fn from_xz(n_qubits: usize, x: u64, z: u64) -> Self {
        let letters = (0..n_qubits)
            .map(|k| match ((x >> k) & 1, (z >> k) & 1) {
                (0, 0) => 0,
                (1, 0) => 1,
                (1, 1) => 2,
                _ => 3,
            })
            .collect();
        Self { letters }
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, &l| acc * 4 + l as usize)
    }

    pub fn word(&self) -> String {
        self.letters.iter().map(|&l| LETTERS[l as usize]).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&l| l == 0)
    }

    pub fn monomial(&self) -> MonomialMatrix {
        self.letters
            .iter()
            .map(|&l| letter_monomial(l))
            .reduce(|acc, m| acc.kron(&m))
            .expect("nonempty word")
    }
}

fn letter_monomial(l: u8) -> MonomialMatrix {
    let i = Complex64::new(0.0, 1.0);
    match l {
        0 => MonomialMatrix {
            cols: vec![0, 1],
            phases: vec![ONE, ONE],
        },
        1 => MonomialMatrix {
            cols: vec![1, 0],
            phases: vec![ONE, ONE],
        },
        2 => MonomialMatrix {
            cols: vec![1, 0],
            phases: vec![-i, i],
        },
        _ => MonomialMatrix {
            cols: vec![0, 1],
            phases: vec![ONE, -ONE],
        },
    }
}

pub fn pauli_matrix(p: &PauliOperator) -> HermitianOperator {
    HermitianOperator::from_hermitian_parts(vec![2; p.n_qubits()], p.monomial().to_dense())
}

/// A ket with its sparse `G` column.
type KetColumn = (Vec<Complex64>, Vec<(u32, i8)>);

/// Closed-form count `2^n Π_{k=1..n} (2^k + 1)`.
pub fn stabilizer_count(n_qubits: usize) -> usize {
    (1..=n_qubits).fold(1 << n_qubits, |acc, k| acc * ((1 << k) + 1))
}

/// Pure stabilizer states with their Pauli-expectation columns.
#[derive(Debug, Clone)]
pub struct StabilizerSet {
    n_qubits: usize,
    kets: Vec<Vec<Complex64>>,
    /// Column `j` of `G`: Pauli index and sign of each nonzero expectation.
    columns: Vec<Vec<(u32, i8)>>,
}

impl StabilizerSet {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn ket(&self, j: usize) -> &[Complex64] {
        &self.kets[j]
    }

    pub fn projector(&self, j: usize) -> HermitianOperator {
        HermitianOperator::from_ket(vec![2; self.n_qubits], &self.kets[j])
            .expect("ket length matches")
    }

    /// Sparse column `j` of `G`.
    pub fn column(&self, j: usize) -> &[(u32, i8)] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<(u32, i8)>] {
        &self.columns
    }

    /// One line per state with interleaved real and imaginary amplitudes,
    /// after a `# stab n=<n> count=<c>` header.
    pub fn dump(&self) -> String {
        let mut out = format!("# stab n={} count={}\n", self.n_qubits, self.len());
        for ket in &self.kets {
            let line: Vec<String> = ket
                .iter()
                .flat_map(|z| [format!("{:e}", z.re), format!("{:e}", z.im)])
                .collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        out
    }
}

/// Reads the kets back from [`StabilizerSet::dump`] output.
pub fn parse_dump(text: &str) -> Result<(usize, Vec<Vec<Complex64>>)> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Invalid("empty dump".into()))?;
    let field = |key: &str| -> Result<usize> {
        header
            .split_whitespace()
            .find_map(|t| t.strip_prefix(key))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Invalid(format!("header lacks {key}")))
    };
    if !header.starts_with("# stab") {
        return Err(Error::Invalid("missing '# stab' header".into()));
    }
    let n = field("n=")?;
    let count = field("count=")?;
    let mut kets = Vec::with_capacity(count);
    for (k, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Invalid(format!("state {k}: {e}")))?;
        if vals.len() != 2 << n {
            return Err(Error::Invalid(format!(
                "state {k}: expected {} numbers, got {}",
                2 << n,
                vals.len()
            )));
        }
        kets.push(vals.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect());
    }
    if kets.len() != count {
        return Err(Error::Invalid(format!(
            "header says {count} states, found {}",
            kets.len()
        )));
    }
    Ok((n, kets))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Isotropic reduced row-echelon generator matrices with the given pivots.
/// Column `c < n` is the X bit of qubit `c`, column `n + c` its Z bit.
fn isotropic_echelon_forms(n: usize, pivots: &[usize]) -> Vec<Vec<(u64, u64)>> {
    let free: Vec<Vec<usize>> = pivots
        .iter()
        .map(|&p| ((p + 1)..2 * n).filter(|c| !pivots.contains(c)).collect())
        .collect();
    let total_free: usize = free.iter().map(Vec::len).sum();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << total_free) {
        let mut bit = 0;
        let mut rows = Vec::with_capacity(n);
        for (r, &p) in pivots.iter().enumerate() {
            let mut v: u64 = 1 << p;
            for &c in &free[r] {
                if (mask >> bit) & 1 == 1 {
                    v |= 1 << c;
                }
                bit += 1;
            }
            rows.push(v);
        }
        let xz: Vec<(u64, u64)> = rows.iter().map(|&v| (v & ((1 << n) - 1), v >> n)).collect();
        let isotropic = (0..n).all(|a| {
            ((a + 1)..n).all(|b| {
                let (xa, za) = xz[a];
                let (xb, zb) = xz[b];
                ((xa & zb) ^ (za & xb)).count_ones() % 2 == 0
            })
        });
        if isotropic {
            out.push(xz);
        }
    }
    out
}

/// `Π_k (I + s_k g_k)/2 |b⟩` normalized, for the first basis vector `b` it does not annihilate.
fn stabilizer_ket(n: usize, gens: &[MonomialMatrix], signs: &[f64]) -> Vec<Complex64> {
    let dim = 1 << n;
    for b in 0..dim {
        let mut v = vec![ZERO; dim];
        v[b] = ONE;
        for (g, &s) in gens.iter().zip(signs) {
            let mut gv = vec![ZERO; dim];
            for (r, c, ph) in g.entries() {
                gv[r] += ph * v[c];
            }
            for (vi, gi) in v.iter_mut().zip(&gv) {
                *vi = (*vi + gi * s) * 0.5;
            }
        }
        let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
    unreachable!("a stabilizer projector has nonzero overlap with some basis vector")
}

/// All Pauli expectations `⟨ψ|P_i|ψ⟩`, rounded to `{−1, 0, 1}`.
fn pauli_column(ket: &[Complex64], paulis: &[MonomialMatrix]) -> Result<Vec<(u32, i8)>> {
    let mut col = Vec::new();
    for (i, p) in paulis.iter().enumerate() {
        let mut e = ZERO;
        for (r, c, ph) in p.entries() {
            e += ket[r].conj() * ph * ket[c];
        }
        let rounded = e.re.round();
        if (e.re - rounded).abs() > 1e-9 || e.im.abs() > 1e-9 || rounded.abs() > 1.0 {
            return Err(Error::Invalid(format!(
                "Pauli expectation {e} is not in {{-1,0,1}}"
            )));
        }
        if rounded != 0.0 {
            col.push((i as u32, rounded as i8));
        }
    }
    Ok(col)
}

/// Enumerates every pure `n`-qubit stabilizer state; `n = 4` needs `extended`.
pub fn enumerate_stabilizer_states(n_qubits: usize, extended: bool) -> Result<StabilizerSet> {
    let cap = if extended { MAX_QUBITS } else { 3 };
    if n_qubits == 0 || n_qubits > cap {
        return Err(Error::OutOfRange(format!(
            "stabilizer enumeration supports 1..={cap} qubits{}, got {n_qubits}",
            if extended {
                ""
            } else {
                " without the extended flag"
            }
        )));
    }
    let n = n_qubits;
    let paulis: Vec<MonomialMatrix> = (0..1usize << (2 * n))
        .map(|i| PauliOperator::from_index(n, i).monomial())
        .collect();
    let per_pattern: Vec<Result<Vec<KetColumn>>> = combinations(2 * n, n)
        .into_par_iter()
        .map(|pivots| {
            let mut found = Vec::new();
            for xz in isotropic_echelon_forms(n, &pivots) {
                let gens: Vec<MonomialMatrix> = xz
                    .iter()
                    .map(|&(x, z)| PauliOperator::from_xz(n, x, z).monomial())
                    .collect();
                for sign_mask in 0..(1usize << n) {
                    let signs: Vec<f64> = (0..n)
                        .map(|k| if (sign_mask >> k) & 1 == 1 { -1.0 } else { 1.0 })
                        .collect();
                    let ket = stabilizer_ket(n, &gens, &signs);
                    let col = pauli_column(&ket, &paulis)?;
                    found.push((ket, col));
                }
            }
            Ok(found)
        })
        .collect();
    let mut kets = Vec::with_capacity(stabilizer_count(n));
    let mut columns = Vec::with_capacity(stabilizer_count(n));
    for chunk in per_pattern {
        for (ket, col) in chunk? {
            kets.push(ket);
            columns.push(col);
        }
    }
    Ok(StabilizerSet {
        n_qubits: n,
        kets,
        columns,
    })
}

/// Shared enumerations, computed once per qubit count.
pub fn stabilizer_set_cached(n_qubits: usize, extended: bool) -> Result<Arc<StabilizerSet>> {
    static CACHE: [OnceLock<Arc<StabilizerSet>>; MAX_QUBITS + 1] = [
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
        OnceLock::new(),
    ];
    if n_qubits == 0 || n_qubits > MAX_QUBITS || (n_qubits == MAX_QUBITS && !extended) {
        // Reuse the range error of the enumerator.
        return enumerate_stabilizer_states(n_qubits, extended).map(Arc::new);
    }
    if let Some(set) = CACHE[n_qubits].get() {
        return Ok(set.clone());
    }
    let set = Arc::new(enumerate_stabilizer_states(n_qubits, extended)?);
    Ok(CACHE[n_qubits].get_or_init(|| set).clone())
}

/// Dense `4^n × |STAB_n|` matrix `G_ij = tr[P_i φ_j]`.
pub fn build_g(set: &StabilizerSet) -> DMatrix<f64> {
    let rows = 1 << (2 * set.n_qubits);
    let mut g = DMatrix::zeros(rows, set.len());
    for (j, col) in set.columns.iter().enumerate() {
        for &(i, s) in col {
            g[(i as usize, j)] = s as f64;
        }
    }
    g
}

/// Pauli vector `b_i = tr[P_i ρ]` of an operator on `n` qubits.
pub fn pauli_vector(rho: &HermitianOperator) -> Result<Vec<f64>> {
    let n = rho.dims().len();
    if rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch {
            dims: rho.dims().to_vec(),
            side: rho.side(),
        });
    }
    Ok((0..1usize << (2 * n))
        .map(|i| {
            PauliOperator::from_index(n, i)
                .monomial()
                .trace_with(rho.matrix())
                .re
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct RobustnessResult {
    /// Optimal `‖x‖₁`.
    pub value: f64,
    /// Nonzero coefficients `(state index, x_j)`.
    pub decomposition: Vec<(usize, f64)>,
    pub report: SolveReport,
}

/// A stalled robustness LP is still accepted when its best iterate is this close.
const STALL_TOL: f64 = 1e-8;

fn robustness_options() -> SolverOptions {
    SolverOptions {
        tol: 1e-9,
        feas_tol: 1e-9,
        ..SolverOptions::default()
    }
}

/// Solves `min Σ(x⁺ + x⁻)` subject to `G(x⁺ − x⁻) = b` and, for each extra row
/// set, `Σ_j h_j x±_j = 0` separately for both signs.
fn split_l1(set: &StabilizerSet, b: &[f64], zero_rows: &[usize]) -> Result<RobustnessResult> {
    let n = set.len();
    let mut p = ConicProblem::new(Sense::Minimize);
    p.nonneg_len = 2 * n;
    for k in 0..2 * n {
        p.objective.add_nonneg(k, 1.0);
    }
    let mut rows: Vec<(LinearFunctional, f64)> =
        b.iter().map(|&bi| (LinearFunctional::new(), bi)).collect();
    let slot: std::collections::HashMap<usize, usize> =
        zero_rows.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let mut plus_rows: Vec<(LinearFunctional, f64)> =
        vec![(LinearFunctional::new(), 0.0); zero_rows.len()];
    let mut minus_rows = plus_rows.clone();
    for (j, col) in set.columns.iter().enumerate() {
        for &(i, s) in col {
            let a = s as f64;
            rows[i as usize].0.add_nonneg(j, a);
            rows[i as usize].0.add_nonneg(n + j, -a);
            if let Some(&k) = slot.get(&(i as usize)) {
                plus_rows[k].0.add_nonneg(j, a);
                minus_rows[k].0.add_nonneg(n + j, a);
            }
        }
    }
    p.push_equalities("pauli", rows);
    if !zero_rows.is_empty() {
        p.push_equalities("marginal_plus", plus_rows);
        p.push_equalities("marginal_minus", minus_rows);
    }
    let report = crate::sdp::solve(&p, &robustness_options())?;
    let stalled_close = report.status == SolveStatus::NumericalTrouble
        && report.gap.max(report.primal_residual).max(report.dual_residual) <= STALL_TOL;
    if report.status != SolveStatus::Optimal && !stalled_close {
        return Err(Error::Solver(format!(
            "robustness LP ended with status {}",
            report.status
        )));
    }
    let decomposition = (0..n)
        .map(|j| (j, report.x_opt[j] - report.x_opt[n + j]))
        .filter(|(_, x)| x.abs() > 1e-9)
        .collect();
    Ok(RobustnessResult {
        value: report.primal_value,
        decomposition,
        report,
    })
}

/// Robustness of magic `min { ‖x‖₁ : Σ_j x_j φ_j = ρ }`.
pub fn robustness_of_state(
    rho: &HermitianOperator,
    set: &StabilizerSet,
) -> Result<RobustnessResult> {
    if rho.dims().len() != set.n_qubits || rho.dims().iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch {
            dims: rho.dims().to_vec(),
            side: 1 << set.n_qubits,
        });
    }
    split_l1(set, &pauli_vector(rho)?, &[])
}

/// Channel robustness of a Choi operator `J` (input sites first, `tr_out J = I`):
/// the minimal `‖x‖₁` over decompositions `J/d_in = ρ₊ − ρ₋` into stabilizer
/// mixtures whose input marginals are proportional to the identity.
pub fn channel_robustness(
    choi: &HermitianOperator,
    in_dims: &[usize],
    out_dims: &[usize],
    set: &StabilizerSet,
) -> Result<RobustnessResult> {
    let mut dims = in_dims.to_vec();
    dims.extend_from_slice(out_dims);
    if choi.dims() != dims.as_slice() || dims.iter().any(|&d| d != 2) || dims.len() != set.n_qubits
    {
        return Err(Error::DimensionMismatch {
            dims: choi.dims().to_vec(),
            side: choi.side(),
        });
    }
    let n_in = in_dims.len();
    let keep: Vec<usize> = (1..=n_in).collect();
    let marginal = partial_trace(choi, &keep)?;
    let dev = marginal.frobenius_distance(&HermitianOperator::identity(in_dims.to_vec()));
    if dev > 1e-8 {
        return Err(Error::Invalid(format!(
            "Choi operator is not trace preserving: ‖tr_out J − I‖ = {dev:.3e}"
        )));
    }
    let d_in = (1usize << n_in) as f64;
    let b: Vec<f64> = pauli_vector(choi)?.into_iter().map(|v| v / d_in).collect();
    // Paulis acting as a non-identity on the input and as the identity on the output.
    let n_out = out_dims.len();
    let zero_rows: Vec<usize> = (1..1usize << (2 * n_in))
        .map(|a| a << (2 * n_out))
        .collect();
    split_l1(set, &b, &zero_rows)
}

/// The coupling `Σ_j G_ij x_j = tr[P_i J]/d_in` between a Choi block and a
/// nonnegative stabilizer-coefficient vector.
#[derive(Debug, Clone)]
pub struct StabilizerConeBlock {
    pub set: Arc<StabilizerSet>,
}

#[derive(Debug, Clone)]
pub struct ConeMembership {
    pub satisfiable: bool,
    /// Robustness of `J/d_in`; equals `tr J/d_in` exactly when satisfiable.
    pub robustness: f64,
    pub trace: f64,
}

impl StabilizerConeBlock {
    pub fn n_qubits(&self) -> usize {
        self.set.n_qubits()
    }

    pub fn n_rows(&self) -> usize {
        1 << (2 * self.set.n_qubits())
    }

    pub fn n_vars(&self) -> usize {
        self.set.len()
    }

    /// Rows `Σ_j G_ij x_j − tr[P_i J]/d_in = 0` for a complex block `j_block`
    /// and nonnegative variables starting at `x_offset`.
    pub fn rows(&self, j_block: usize, x_offset: usize, d_in: f64) -> Vec<(LinearFunctional, f64)> {
        let n = self.set.n_qubits();
        let mut rows: Vec<(LinearFunctional, f64)> = (0..self.n_rows())
            .map(|i| {
                let mut f = LinearFunctional::new();
                for (r, c, ph) in PauliOperator::from_index(n, i).monomial().entries() {
                    // tr[P J] = Σ_r P_{r,c} J_{c,r}.
                    f.add(j_block, r, c, -ph / d_in);
                }
                (f, 0.0)
            })
            .collect();
        for (j, col) in self.set.columns().iter().enumerate() {
            for &(i, s) in col {
                rows[i as usize].0.add_nonneg(x_offset + j, s as f64);
            }
        }
        rows
    }

    /// Whether `x ≥ 0` exists with `Gx = (tr[P_i J]/d_in)_i`.
    pub fn membership(&self, j: &HermitianOperator, d_in: f64) -> Result<ConeMembership> {
        let b: Vec<f64> = pauli_vector(j)?.into_iter().map(|v| v / d_in).collect();
        let r = split_l1(&self.set, &b, &[])?;
        let trace = b[0];
        Ok(ConeMembership {
            satisfiable: r.value <= trace + 1e-7 * (1.0 + trace.abs()),
            robustness: r.value,
            trace,
        })
    }
}

/// Coupling block for `n_qubits_total` qubits (inputs plus output).
pub fn stabilizer_cone_block(n_qubits_total: usize, extended: bool) -> Result<StabilizerConeBlock> {
    Ok(StabilizerConeBlock {
        set: stabilizer_set_cached(n_qubits_total, extended)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_words() {
        assert_eq!(
            pauli_matrix(&PauliOperator::new("II").unwrap()).matrix(),
            &crate::matops::CMat::identity(4, 4)
        );
        let zz = pauli_matrix(&PauliOperator::new("ZZ").unwrap());
        let diag: Vec<f64> = zz.matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
        let xy = pauli_matrix(&PauliOperator::new("XY").unwrap());
        let sq = xy.matrix() * xy.matrix();
        assert!((sq - crate::matops::CMat::identity(4, 4)).norm() < 1e-15);
        assert_eq!(PauliOperator::new("XZ").unwrap().index(), 4 + 3);
        assert_eq!(PauliOperator::from_index(3, 27).word(), "XYZ");
        assert!(PauliOperator::new("XQ").is_err());
    }

    #[test]
    fn counts() {
        assert_eq!(stabilizer_count(1), 6);
        assert_eq!(stabilizer_count(2), 60);
        assert_eq!(stabilizer_count(3), 1080);
        assert_eq!(stabilizer_count(4), 36720);
        for n in 1..=3 {
            assert_eq!(
                enumerate_stabilizer_states(n, false).unwrap().len(),
                stabilizer_count(n)
            );
        }
        assert!(enumerate_stabilizer_states(4, false).is_err());
        assert!(enumerate_stabilizer_states(0, true).is_err());
        assert!(enumerate_stabilizer_states(5, true).is_err());
    }

    #[test]
    fn zero_state_column() {
        let set = enumerate_stabilizer_states(1, false).unwrap();
        let g = build_g(&set);
        let zero = (0..set.len())
            .find(|&j| (set.ket(j)[0].norm() - 1.0).abs() < 1e-12)
            .unwrap();
        assert_eq!(
            g.column(zero).iter().copied().collect::<Vec<_>>(),
            vec![1.0, 0.0, 0.0, 1.0]
        );
    }

    #[test]
    fn dump_round_trip() {
        let set = enumerate_stabilizer_states(2, false).unwrap();
        let (n, kets) = parse_dump(&set.dump()).unwrap();
        assert_eq!(n, 2);
        assert_eq!(kets.len(), 60);
        for (j, ket) in kets.iter().enumerate() {
            for (a, b) in ket.iter().zip(set.ket(j)) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn marginal_rows_are_input_paulis() {
        // One input qubit, one output qubit: XI, YI, ZI.
        let zero_rows: Vec<usize> = (1..4usize).map(|a| a << 2).collect();
        let words: Vec<String> = zero_rows
            .iter()
            .map(|&i| PauliOperator::from_index(2, i).word())
            .collect();
        assert_eq!(words, vec!["XI", "YI", "ZI"]);
    }
}

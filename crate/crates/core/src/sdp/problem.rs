use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matops::CMat;

/// A positive-semidefinite matrix variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PsdBlock {
    pub side: usize,
    /// Complex Hermitian when set, real symmetric otherwise.
    pub complex: bool,
}

/// Entries `F_ij` of the matrix `F` in a functional `X ↦ Re tr(F X)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BlockTerm {
    pub block: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
}

/// Real linear functional `Σ_b Re tr(F_b X_b) + Σ_k a_k x_k` over all blocks.
///
/// Only the Hermitian part of each `F_b` matters, so callers may list a single
/// entry of a conjugate pair with the combined weight.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearFunctional {
    pub blocks: Vec<BlockTerm>,
    pub nonneg: Vec<(usize, f64)>,
}

impl LinearFunctional {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, block: usize, i: usize, j: usize, value: Complex64) {
        match self.blocks.iter_mut().find(|t| t.block == block) {
            Some(t) => t.entries.push((i, j, value)),
            None => self.blocks.push(BlockTerm {
                block,
                entries: vec![(i, j, value)],
            }),
        }
    }

    /// Adds every nonzero entry of a dense matrix.
    pub fn add_dense(&mut self, block: usize, f: &CMat, scale: f64) {
        for j in 0..f.ncols() {
            for i in 0..f.nrows() {
                let v = f[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    self.add(block, i, j, v * scale);
                }
            }
        }
    }

    pub fn add_nonneg(&mut self, k: usize, value: f64) {
        self.nonneg.push((k, value));
    }

    pub fn nnz(&self) -> usize {
        self.blocks.iter().map(|t| t.entries.len()).sum::<usize>() + self.nonneg.len()
    }

    /// Value on Hermitian block matrices and a nonnegative vector.
    pub fn evaluate(&self, blocks: &[CMat], nonneg: &[f64]) -> f64 {
        let mut acc = 0.0;
        for t in &self.blocks {
            let x = &blocks[t.block];
            for &(i, j, f) in &t.entries {
                let v = x[(j, i)];
                acc += f.re * v.re - f.im * v.im;
            }
        }
        for &(k, a) in &self.nonneg {
            acc += a * nonneg[k];
        }
        acc
    }

    /// Hermitian matrix `(F + F†)/2` for one block.
    pub fn block_matrix(&self, block: usize, side: usize) -> CMat {
        let mut m = CMat::zeros(side, side);
        for t in self.blocks.iter().filter(|t| t.block == block) {
            for &(i, j, f) in &t.entries {
                m[(i, j)] += f * 0.5;
                m[(j, i)] += f.conj() * 0.5;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Equality,
    Inequality,
}

/// Named contiguous range of constraint rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowGroup {
    pub name: String,
    pub kind: RowKind,
    pub start: usize,
    pub len: usize,
}

/// Conic program over PSD blocks and a nonnegative vector:
///
/// optimize `⟨c, X⟩` s.t. `⟨F_i, X⟩ = b_i`, `⟨G_k, X⟩ ≥ 0`, `X ∈ K`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConicProblem {
    pub psd_blocks: Vec<PsdBlock>,
    pub nonneg_len: usize,
    pub sense: Sense,
    pub objective: LinearFunctional,
    pub equalities: Vec<(LinearFunctional, f64)>,
    pub inequalities: Vec<LinearFunctional>,
    pub groups: Vec<RowGroup>,
}

impl ConicProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            psd_blocks: Vec::new(),
            nonneg_len: 0,
            sense,
            objective: LinearFunctional::new(),
            equalities: Vec::new(),
            inequalities: Vec::new(),
            groups: Vec::new(),
        }
    }

    pub fn add_block(&mut self, side: usize, complex: bool) -> usize {
        self.psd_blocks.push(PsdBlock { side, complex });
        self.psd_blocks.len() - 1
    }

    /// Appends equality rows under a group name.
    pub fn push_equalities(&mut self, name: &str, rows: Vec<(LinearFunctional, f64)>) {
        self.groups.push(RowGroup {
            name: name.to_string(),
            kind: RowKind::Equality,
            start: self.equalities.len(),
            len: rows.len(),
        });
        self.equalities.extend(rows);
    }

    /// Appends `≥ 0` rows under a group name.
    pub fn push_inequalities(&mut self, name: &str, rows: Vec<LinearFunctional>) {
        self.groups.push(RowGroup {
            name: name.to_string(),
            kind: RowKind::Inequality,
            start: self.inequalities.len(),
            len: rows.len(),
        });
        self.inequalities.extend(rows);
    }

    pub fn group(&self, name: &str) -> Option<&RowGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    /// Checks that every functional references declared variables only.
    pub fn validate(&self) -> Result<()> {
        let check = |f: &LinearFunctional, what: &str| -> Result<()> {
            for t in &f.blocks {
                let blk = self.psd_blocks.get(t.block).ok_or_else(|| {
                    Error::Invalid(format!("{what}: undeclared block {}", t.block))
                })?;
                for &(i, j, v) in &t.entries {
                    if i >= blk.side || j >= blk.side {
                        return Err(Error::Invalid(format!(
                            "{what}: entry ({i},{j}) outside block {} of side {}",
                            t.block, blk.side
                        )));
                    }
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::Invalid(format!("{what}: non-finite coefficient")));
                    }
                }
            }
            for &(k, a) in &f.nonneg {
                if k >= self.nonneg_len || !a.is_finite() {
                    return Err(Error::Invalid(format!("{what}: bad nonnegative entry {k}")));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, (f, b)) in self.equalities.iter().enumerate() {
            check(f, &format!("equality {i}"))?;
            if !b.is_finite() {
                return Err(Error::Invalid(format!("equality {i}: non-finite rhs")));
            }
        }
        for (i, f) in self.inequalities.iter().enumerate() {
            check(f, &format!("inequality {i}"))?;
        }
        Ok(())
    }

    /// Largest violation of the constraints at a candidate point.
    pub fn primal_violation(&self, blocks: &[CMat], nonneg: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for (f, b) in &self.equalities {
            worst = worst.max((f.evaluate(blocks, nonneg) - b).abs());
        }
        for f in &self.inequalities {
            worst = worst.max(-f.evaluate(blocks, nonneg));
        }
        for x in nonneg {
            worst = worst.max(-x);
        }
        worst
    }

    /// Text dump: header `CONIC v1`, declarations, then one triplet per line.
    pub fn dump(&self) -> String {
        let mut out = String::from("CONIC v1\n");
        let sense = match self.sense {
            Sense::Minimize => "min",
            Sense::Maximize => "max",
        };
        writeln!(out, "sense {sense}").unwrap();
        for (b, blk) in self.psd_blocks.iter().enumerate() {
            let kind = if blk.complex { "complex" } else { "real" };
            writeln!(out, "psd {b} {} {kind}", blk.side).unwrap();
        }
        writeln!(out, "nonneg {}", self.nonneg_len).unwrap();
        for g in &self.groups {
            let kind = match g.kind {
                RowKind::Equality => "eq",
                RowKind::Inequality => "ineq",
            };
            writeln!(out, "group {} {kind} {} {}", g.name, g.start, g.len).unwrap();
        }
        let write_fn = |out: &mut String, header: String, f: &LinearFunctional| {
            out.push_str(&header);
            out.push('\n');
            for t in &f.blocks {
                for &(i, j, v) in &t.entries {
                    writeln!(out, "t {} {i} {j} {:e} {:e}", t.block, v.re, v.im).unwrap();
                }
            }
            for &(k, a) in &f.nonneg {
                writeln!(out, "n {k} {a:e}").unwrap();
            }
        };
        write_fn(&mut out, "objective".into(), &self.objective);
        for (f, b) in &self.equalities {
            write_fn(&mut out, format!("eq {b:e}"), f);
        }
        for f in &self.inequalities {
            write_fn(&mut out, "ineq".into(), f);
        }
        out.push_str("end\n");
        out
    }

    /// Inverse of [`ConicProblem::dump`].
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |n: usize, msg: &str| Error::Invalid(format!("line {}: {msg}", n + 1));
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, "CONIC v1")) => {}
            _ => return Err(Error::Invalid("missing CONIC v1 header".into())),
        }
        let mut prob = ConicProblem::new(Sense::Minimize);
        enum Target {
            None,
            Objective,
            Eq,
            Ineq,
        }
        let mut target = Target::None;
        let mut current = LinearFunctional::new();
        let mut rhs = 0.0;
        let flush = |prob: &mut ConicProblem, target: &Target, f: LinearFunctional, rhs: f64| {
            match target {
                Target::None => {}
                Target::Objective => prob.objective = f,
                Target::Eq => prob.equalities.push((f, rhs)),
                Target::Ineq => prob.inequalities.push(f),
            }
        };
        let num = |n: usize, s: Option<&str>| -> Result<f64> {
            s.and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| bad(n, "expected a number"))
        };
        let idx = |n: usize, s: Option<&str>| -> Result<usize> {
            s.and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| bad(n, "expected an index"))
        };
        for (n, line) in lines {
            let mut tok = line.split_whitespace();
            match tok.next() {
                Some("sense") => {
                    prob.sense = match tok.next() {
                        Some("min") => Sense::Minimize,
                        Some("max") => Sense::Maximize,
                        _ => return Err(bad(n, "sense must be min or max")),
                    }
                }
                Some("psd") => {
                    let b = idx(n, tok.next())?;
                    if b != prob.psd_blocks.len() {
                        return Err(bad(n, "blocks must be declared in order"));
                    }
                    let side = idx(n, tok.next())?;
                    let complex = match tok.next() {
                        Some("complex") => true,
                        Some("real") => false,
                        _ => return Err(bad(n, "block kind must be complex or real")),
                    };
                    prob.add_block(side, complex);
                }
                Some("nonneg") => prob.nonneg_len = idx(n, tok.next())?,
                Some("group") => {
                    let name = tok
                        .next()
                        .ok_or_else(|| bad(n, "missing group name"))?
                        .to_string();
                    let kind = match tok.next() {
                        Some("eq") => RowKind::Equality,
                        Some("ineq") => RowKind::Inequality,
                        _ => return Err(bad(n, "group kind must be eq or ineq")),
                    };
                    let start = idx(n, tok.next())?;
                    let len = idx(n, tok.next())?;
                    prob.groups.push(RowGroup {
                        name,
                        kind,
                        start,
                        len,
                    });
                }
                Some(head @ ("objective" | "eq" | "ineq" | "end")) => {
                    flush(&mut prob, &target, std::mem::take(&mut current), rhs);
                    target = match head {
                        "objective" => Target::Objective,
                        "eq" => {
                            rhs = num(n, tok.next())?;
                            Target::Eq
                        }
                        "ineq" => Target::Ineq,
                        _ => Target::None,
                    };
                }
                Some("t") => {
                    let b = idx(n, tok.next())?;
                    let i = idx(n, tok.next())?;
                    let j = idx(n, tok.next())?;
                    let re = num(n, tok.next())?;
                    let im = num(n, tok.next())?;
                    current.add(b, i, j, Complex64::new(re, im));
                }
                Some("n") => {
                    let k = idx(n, tok.next())?;
                    let a = num(n, tok.next())?;
                    current.add_nonneg(k, a);
                }
                None => {}
                Some(other) => return Err(bad(n, &format!("unknown record {other:?}"))),
            }
        }
        prob.validate()?;
        Ok(prob)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_uses_hermitian_part() {
        let mut f = LinearFunctional::new();
        f.add(0, 0, 1, c(0.0, 1.0));
        let x = CMat::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -2.0), c(0.0, 2.0), c(1.0, 0.0)]);
        // Re(i · X_10) = Re(i · 2i) = −2.
        assert!((f.evaluate(std::slice::from_ref(&x), &[]) + 2.0).abs() < 1e-15);
        let h = f.block_matrix(0, 2);
        assert!((crate::matops::hs_inner(&h, &x) + 2.0).abs() < 1e-15);
    }

    #[test]
    fn dump_round_trip() {
        let mut p = ConicProblem::new(Sense::Maximize);
        p.add_block(2, true);
        p.add_block(3, false);
        p.nonneg_len = 2;
        p.objective.add(0, 0, 1, c(0.5, -0.25));
        p.objective.add_nonneg(1, 3.0);
        let mut e = LinearFunctional::new();
        e.add(1, 2, 2, c(1.0, 0.0));
        e.add_nonneg(0, -1.0);
        p.push_equalities("link", vec![(e, 0.1)]);
        let mut g = LinearFunctional::new();
        g.add(0, 1, 1, c(1.0 / 3.0, 0.0));
        p.push_inequalities("sign", vec![g]);
        let q = ConicProblem::parse(&p.dump()).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn validate_catches_out_of_range() {
        let mut p = ConicProblem::new(Sense::Minimize);
        p.add_block(2, false);
        p.objective.add(0, 2, 0, c(1.0, 0.0));
        assert!(p.validate().is_err());
        let mut p = ConicProblem::new(Sense::Minimize);
        p.objective.add_nonneg(0, 1.0);
        assert!(p.validate().is_err());
        assert!(ConicProblem::parse("CONIC v2\n").is_err());
    }
}

//! Writes a purification program in the plain-text conic format, parses it
//! back and solves the parsed copy.
//!
//! ```bash
//! cargo run -p magic-purify --example conic_dump -- program.conic
//! ```

use magic_purify::purification::assemble_qr;
use magic_purify::sdp::{build_primal, solve, ConicProblem, SolverOptions};
use magic_purify::{Ensemble, OperationClass, PurificationInstance};

fn main() -> magic_purify::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "program.conic".into());
    let inst = PurificationInstance::new(2, 2, 0.5, 1.0, Ensemble::haar(2), OperationClass::Cspo)?;
    let problem = build_primal(&inst, &assemble_qr(&inst)?)?;
    std::fs::write(&path, problem.dump())?;

    let parsed = ConicProblem::parse(&std::fs::read_to_string(&path)?)?;
    println!(
        "{path}: {} PSD blocks, {} nonnegative, {} equalities, {} inequalities",
        parsed.psd_blocks.len(),
        parsed.nonneg_len,
        parsed.equalities.len(),
        parsed.inequalities.len()
    );
    for g in &parsed.groups {
        println!("  {:<16} {:?} × {}", g.name, g.kind, g.len);
    }
    let report = solve(&parsed, &SolverOptions::default())?;
    println!("optimum {:.10} ({}, {} iterations)", report.primal_value, report.status, report.iterations);
    Ok(())
}

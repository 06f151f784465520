//! Reads a dual point back from a solve and checks it against the dual program.
//!
//! Also feeds the analytic CPWP certificate through the same residual check,
//! then nudges it to show the check catching an infeasible point.
//!
//! ```bash
//! cargo run -p magic-purify --example dual_check
//! ```

use magic_purify::certificates::{build_cpwp_certificate, cpwp_dual_point, lambda0};
use magic_purify::purification::assemble_qr;
use magic_purify::sdp::{
    build_program, dual_residuals, solve_fidelity_with, BuildOptions, DualPoint, FidelityOptions,
};
use magic_purify::{Ensemble, OperationClass, PurificationInstance};

fn main() -> magic_purify::Result<()> {
    let inst = PurificationInstance::new(3, 2, 0.3, 0.5, Ensemble::haar(3), OperationClass::Cpwp)?;
    let sol = solve_fidelity_with(&inst, &FidelityOptions::default())?;
    let dual = sol.dual_point()?;
    println!("solver: F = {:.10}, x = {:.10}", sol.fidelity, dual.x);
    println!("  {:?}", dual_residuals(&sol.program, &dual, sol.fidelity)?);

    let program = build_program(&inst, &assemble_qr(&inst)?, &BuildOptions::default())?;
    let analytic = cpwp_dual_point(&build_cpwp_certificate(3, inst.delta)?)?;
    let target = lambda0(3, inst.delta);
    println!("analytic: objective = {:.10}", analytic.objective(inst.p));
    println!("  {:?}", dual_residuals(&program, &analytic, target)?);

    let nudged = DualPoint {
        x: analytic.x + 0.1,
        ..analytic
    };
    println!("x + 0.1:");
    println!("  {:?}", dual_residuals(&program, &nudged, target)?);
    Ok(())
}

//! Haar-universal purification under the two free-operation classes.
//!
//! Solves the two-copy grid for CSPO on qubits and CPWP on qutrits and prints
//! each optimum next to the no-purification baseline `λ0`.
//!
//! ```bash
//! cargo run -p magic-purify --example universal_no_go
//! ```

use magic_purify::certificates::no_go_verdict;
use magic_purify::sdp::FidelityOptions;
use magic_purify::OperationClass;

fn main() -> magic_purify::Result<()> {
    let deltas = [0.1, 0.3, 0.5, 0.7, 0.9];
    let ps = [0.1, 0.5, 1.0];
    for (d, class) in [(2, OperationClass::Cspo), (3, OperationClass::Cpwp)] {
        let verdict = no_go_verdict(d, 2, &deltas, &ps, class, &FidelityOptions::default())?;
        println!("d={d} n=2 {class}");
        for c in &verdict.cells {
            println!(
                "  δ={:.1} p={:.1}  F={:.10}  λ0={:.10}  {}",
                c.delta,
                c.p,
                c.fidelity,
                c.baseline,
                if c.pass { "=" } else { "≠" }
            );
        }
        println!("  confirmed: {}", verdict.confirmed);
    }
    Ok(())
}

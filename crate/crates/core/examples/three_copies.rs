//! Three-copy no-go cells: CPWP on qutrits and, with the 4-qubit stabilizer
//! set, CSPO on qubits. Each qutrit solve takes tens of seconds.
//!
//! ```bash
//! cargo run --release -p magic-purify --example three_copies
//! ```

use magic_purify::certificates::lambda0;
use magic_purify::sdp::{solve_fidelity_with, FidelityOptions};
use magic_purify::{Ensemble, OperationClass, PurificationInstance};

fn main() -> magic_purify::Result<()> {
    let cells = [
        (3, OperationClass::Cpwp, 0.5, 0.5),
        (3, OperationClass::Cpwp, 0.8, 1.0),
        (2, OperationClass::Cspo, 0.5, 1.0),
    ];
    let opts = FidelityOptions::default().extended(true);
    for (d, class, delta, p) in cells {
        let inst = PurificationInstance::new(d, 3, delta, p, Ensemble::haar(d), class)?;
        let sol = solve_fidelity_with(&inst, &opts)?;
        println!(
            "d={d} n=3 {class} δ={delta} p={p}: F = {:.8}, λ0 = {:.8}, {:.1}s",
            sol.fidelity,
            lambda0(d, delta),
            sol.report.seconds
        );
    }
    Ok(())
}

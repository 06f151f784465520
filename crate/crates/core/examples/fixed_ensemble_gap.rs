//! Fidelity curves for two fixed input ensembles.
//!
//! The qubit ensemble `{|0⟩, |+⟩}` is compared under CPTN and CSPO, the qutrit
//! ensemble `{|𝕊⟩, |ℕ⟩, |T⟩, |H₊⟩}` under CPTN and CPWP. Output is CSV on stdout,
//! one row per noise level, ready for plotting.
//!
//! ```bash
//! cargo run -p magic-purify --example fixed_ensemble_gap > curves.csv
//! ```

use magic_purify::purification::{baseline_fidelity, fig2_ensembles};
use magic_purify::sdp::{solve_fidelity_with, FidelityOptions};
use magic_purify::{OperationClass, PurificationInstance};

fn main() -> magic_purify::Result<()> {
    let (qubit, qutrit) = fig2_ensembles();
    let opts = FidelityOptions::default();
    println!("ensemble,p,delta,baseline,cptn,restricted,gap");
    for (label, ens, restricted) in [
        ("qubit", &qubit, OperationClass::Cspo),
        ("qutrit", &qutrit, OperationClass::Cpwp),
    ] {
        for p in [0.1, 0.6] {
            for k in 0..=10 {
                let delta = 0.099 * k as f64;
                let inst = |class| PurificationInstance::new(ens.d(), 2, delta, p, ens.clone(), class);
                let full = solve_fidelity_with(&inst(OperationClass::Cptn)?, &opts)?.fidelity;
                let free = solve_fidelity_with(&inst(restricted)?, &opts)?.fidelity;
                let base = baseline_fidelity(&inst(restricted)?);
                println!(
                    "{label},{p},{delta:.3},{base:.8},{full:.8},{free:.8},{:.3e}",
                    full - free
                );
            }
        }
    }
    Ok(())
}

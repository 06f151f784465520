//! Discrete Wigner functions of qutrit states.
//!
//! Prints the 3×3 table for each state of the fixed qutrit ensemble together
//! with its negativity, the total weight of negative entries.
//!
//! ```bash
//! cargo run -p magic-purify --example wigner_negativity
//! ```

use magic_purify::phase_space::{wigner_of_state, PhasePoint, PhasePointBasis};
use magic_purify::purification::fig2_ensembles;
use magic_purify::{Ensemble, HermitianOperator};

fn main() -> magic_purify::Result<()> {
    let basis = PhasePointBasis::new(3, 1)?;
    let (_, qutrit) = fig2_ensembles();
    let Ensemble::Discrete { states, .. } = qutrit else {
        unreachable!("built-in ensemble is discrete")
    };
    for (name, psi) in ["strange", "norrell", "T", "H+"].iter().zip(&states) {
        let rho = HermitianOperator::from_ket(vec![3], psi)?;
        let w = wigner_of_state(&rho, &basis)?;
        let negativity: f64 = w.values.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
        println!("{name}: negativity {negativity:.6}");
        for a1 in 0..3 {
            let row: Vec<String> = (0..3)
                .map(|a2| format!("{:+.5}", w.get(&PhasePoint::single(3, a1, a2).expect("qutrit"))))
                .collect();
            println!("  {}", row.join("  "));
        }
    }
    Ok(())
}

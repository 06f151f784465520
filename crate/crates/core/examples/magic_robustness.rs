//! Robustness of magic for a few qubit states.
//!
//! Stabilizer states and their mixtures sit at 1; the T and H states need
//! negative weight on stabilizer projectors.
//!
//! ```bash
//! cargo run -p magic-purify --example magic_robustness
//! ```

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};

use magic_purify::matops::kron;
use magic_purify::stabilizer::{enumerate_stabilizer_states, robustness_of_state};
use magic_purify::HermitianOperator;
use num_complex::Complex64;

fn ket(a: f64, b: Complex64) -> HermitianOperator {
    HermitianOperator::from_ket(vec![2], &[Complex64::new(a, 0.0), b]).expect("qubit ket")
}

fn main() -> magic_purify::Result<()> {
    let one = enumerate_stabilizer_states(1, false)?;
    let two = enumerate_stabilizer_states(2, false)?;

    let zero = ket(1.0, Complex64::new(0.0, 0.0));
    let t = ket(FRAC_1_SQRT_2, Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4));
    let h = ket(FRAC_PI_8.cos(), Complex64::new(FRAC_PI_8.sin(), 0.0));
    let mixed = HermitianOperator::identity(vec![2]).scaled(0.5);

    for (name, rho) in [("|0⟩", &zero), ("I/2", &mixed), ("T", &t), ("H", &h)] {
        let r = robustness_of_state(rho, &one)?;
        println!("{name:>6}  R = {:.10}  ({} stabilizer terms)", r.value, r.decomposition.len());
    }
    let tt = kron(&t, &t);
    println!("{:>6}  R = {:.10}", "T⊗T", robustness_of_state(&tt, &two)?.value);
    Ok(())
}

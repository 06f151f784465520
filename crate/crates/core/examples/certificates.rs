//! Builds the analytic dual certificates and runs every check on a δ grid.
//!
//! ```bash
//! cargo run -p magic-purify --example certificates
//! ```

use magic_purify::certificates::{
    build_cpwp_certificate, build_cspo_certificate, verify_cpwp_certificate,
    verify_cspo_certificate,
};
use magic_purify::stabilizer::enumerate_stabilizer_states;

fn main() -> magic_purify::Result<()> {
    let grid: Vec<f64> = (0..=10).map(|k| k as f64 / 10.0).collect();

    for d in [3, 5, 7] {
        let mut checks = 0;
        for &delta in &grid {
            let cert = build_cpwp_certificate(d, delta)?;
            let report = verify_cpwp_certificate(&cert)?;
            checks += report.checks.len();
            for fail in report.failures() {
                println!("FAIL cpwp d={d} δ={delta} {}", fail.name);
            }
        }
        println!("cpwp d={d}: {checks} checks");
    }

    // A single grid point in full.
    let cert = build_cpwp_certificate(3, 0.5)?;
    println!("\nα = {:.6e}, t = {:.6}", cert.alpha, cert.t);
    print!("{}", verify_cpwp_certificate(&cert)?);

    let stab = enumerate_stabilizer_states(3, false)?;
    let cert = build_cspo_certificate(0.5)?;
    println!("\nβ = {:.6e}", cert.beta);
    print!("{}", verify_cspo_certificate(&cert, &stab)?);
    Ok(())
}

//! Enumerates pure stabilizer states and writes them in the text dump format.
//!
//! ```bash
//! cargo run -p magic-purify --example stabilizer_enumeration -- 3 stab3.txt
//! ```

use magic_purify::stabilizer::{enumerate_stabilizer_states, parse_dump, stabilizer_count};

fn main() -> magic_purify::Result<()> {
    let mut args = std::env::args().skip(1);
    let qubits: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(2);
    let out = args.next();

    for n in 1..=qubits.min(3) {
        println!("n={n}: {} states", stabilizer_count(n));
    }
    let set = enumerate_stabilizer_states(qubits, qubits == 4)?;
    let text = set.dump();
    let (_, kets) = parse_dump(&text)?;
    assert_eq!(kets.len(), set.len());
    println!("enumerated {} states on {qubits} qubits", set.len());
    if let Some(path) = out {
        std::fs::write(&path, text)?;
        println!("wrote {path}");
    }
    Ok(())
}

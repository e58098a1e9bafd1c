// The three-qubit cloning circuit, the optimal comb and the low-memory
// isometry scheme give the same channel for every phase.

use std::error::Error;

use combopt::circuits::{
    average_clone_fidelity, clone_circuit, clone_circuit_channel, comb_inserted_channel, isometry_realization,
    isometry_realization_channel, phase_clone_comb,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for op in clone_circuit(0.0) {
        println!("{:?} on {:?}", op.kind, op.wires);
    }
    let comb = phase_clone_comb()?;
    let mut worst = 0.0_f64;
    for k in 0..12 {
        let phi = 0.3 + k as f64 * 0.5;
        let a = clone_circuit_channel(phi)?;
        let b = comb_inserted_channel(&comb, phi)?;
        let c = isometry_realization_channel(phi)?;
        worst = worst.max(a.op.distance(&b.op)?).max(a.op.distance(&c.op)?);
    }
    println!("max distance between the three channels: {worst:.2e}");
    let sim = isometry_realization(1.0)?;
    println!("isometry scheme: {} Kraus operators, completeness {:.1e}", sim.kraus.len(), sim.completeness_residual());
    let f = average_clone_fidelity(64, clone_circuit_channel)?;
    println!("averaged fidelity {f:.12} vs (3+2√2)/8 = {:.12}", (3.0 + 2.0 * 2f64.sqrt()) / 8.0);
    assert!(worst < 1e-9);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

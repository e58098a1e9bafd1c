// Converts a representation with repeated irreps into one without, and
// back, using a memory as large as the largest multiplicity.

use std::error::Error;

use combopt::choi::{choi_of_unitary, UnitaryGate};
use combopt::combs::{insert_channel, insert_gate, multiplicity_conversion_combs, H0, H3};
use combopt::groups::{ConcreteRep, GroupElement, Irrep};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let w = |k| Irrep::U1 { weight: k };
    let with = ConcreteRep::direct_sum(vec![w(0), w(1), w(0), w(1), w(2)])?;
    let without = ConcreteRep::direct_sum(vec![w(0), w(1), w(2)])?;
    let conv = multiplicity_conversion_combs(&with, &without, &[w(0), w(1), w(2)])?;
    println!("memory dimension {}", conv.memory_dim);
    for k in 0..5 {
        let g = GroupElement::Phase(0.7 * k as f64);
        let (u, up) = (with.matrix(&g)?, without.matrix(&g)?);
        let fwd = insert_gate(&conv.forward, &u)?;
        let want = choi_of_unitary(&UnitaryGate::new(up, H0, H3)?)?;
        let round = insert_channel(&conv.backward, &fwd)?;
        let back = choi_of_unitary(&UnitaryGate::new(u, H0, H3)?)?;
        let (d1, d2) = (fwd.op.distance(&want.op)?, round.op.distance(&back.op)?);
        println!("phase {:.1}: forward {d1:.1e}, round trip {d2:.1e}", 0.7 * k as f64);
        assert!(d1 < 1e-9 && d2 < 1e-9);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Composes two qubit gates through the link product and checks the result
// against the matrix product.

use std::error::Error;

use combopt::choi::{channel_fidelity, choi_of_unitary, compose, UnitaryGate};
use combopt::linalg::{c, cr, Mat};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let s = cr(std::f64::consts::FRAC_1_SQRT_2);
    let h = Mat::from_row_slice(2, 2, &[s, s, s, -s]);
    let t = Mat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), c(0.0, 1.0)]);

    let first = choi_of_unitary(&UnitaryGate::new(h.clone(), "a", "b")?)?;
    let second = choi_of_unitary(&UnitaryGate::new(t.clone(), "b", "c")?)?;
    let linked = compose(&first, &second)?;

    let direct = choi_of_unitary(&UnitaryGate::new(&t * &h, "a", "c")?)?;
    let dist = linked.op.distance(&direct.op)?;
    println!("link product vs matrix product: {dist:.2e}");
    println!("fidelity with T·H: {:.12}", channel_fidelity(&linked, &direct)?);
    assert!(dist < 1e-12);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

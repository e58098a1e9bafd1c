// Random sequential networks are deterministic combs; a random positive
// operator is not.

use std::error::Error;

use combopt::combs::{random_deterministic_comb, verify_comb, CombSpec};
use combopt::linalg::random_density;
use combopt::tensor::{LabeledOperator, Subsystem};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let spec = CombSpec::two_comb(2, 2);
    for seed in 0..3 {
        let r = random_deterministic_comb(&spec, &[4], seed)?;
        let res = verify_comb(&r, &spec)?;
        println!("seed {seed}: levels {:?}, min eigenvalue {:.1e}", res.levels, res.min_eigenvalue);
        assert!(res.passes(1e-9));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let labels: Vec<Subsystem> = spec.labels();
    let junk = LabeledOperator::new(labels, random_density(16, &mut rng) * combopt::linalg::cr(4.0))?;
    let res = verify_comb(&junk, &spec)?;
    println!("random positive operator: worst residual {:.3}", res.max_residual());
    assert!(!res.passes(1e-3));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

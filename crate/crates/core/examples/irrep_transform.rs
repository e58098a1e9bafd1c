// Optimal transformation of spin β into spin a, compared with the closed
// form (2β+1)/((2a+1)(2|a−β|+1)).

use std::error::Error;

use combopt::reduced::{irrep_transform_fidelity, irrep_transform_problem, solve};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("{:>5} {:>5} {:>12} {:>12}", "beta", "a", "solver", "formula");
    for two_beta in [1u32, 2, 3] {
        for two_a in 1..=6u32 {
            let r = solve(&irrep_transform_problem(two_beta, two_a)?, 1e-10, 100_000)?;
            let (b, a) = (two_beta as f64 / 2.0, two_a as f64 / 2.0);
            let want = irrep_transform_fidelity(b, a);
            println!("{b:>5} {a:>5} {:>12.9} {want:>12.9}", r.phi_star);
            assert!((r.phi_star - want).abs() < 1e-8);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// Splits a covariant comb into a preprocessing channel, one parallel use of
// the gate and a postprocessing channel.

use std::error::Error;

use combopt::builder::{build_optimal_comb, Task};
use combopt::combs::{covariantize, decompose_parallel, insert_gate, random_deterministic_comb};
use combopt::groups::{haar_nodes, Quadrature};
use combopt::reduced::solve;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let task = Task::su2_clone(2)?;
    let r = solve(&task.problem, 1e-12, 200_000)?;
    let optimal = build_optimal_comb(&task, &r.p_star)?.r;
    let random = random_deterministic_comb(&task.action.spec(), &[8], 3)?;
    let averaged = covariantize(&random, &task.action, task.exact_quadrature())?;

    for (name, comb) in [("optimal", optimal), ("covariantized random", averaged)] {
        let par = decompose_parallel(&comb, &task.action)?;
        let mut worst = 0.0_f64;
        for node in haar_nodes(task.action.group(), Quadrature::MonteCarlo { samples: 10, seed: 2 }) {
            let u = task.action.input.matrix(&node.element)?;
            worst = worst.max(par.apply(&u)?.op.distance(&insert_gate(&comb, &u)?.op)?);
        }
        println!("{name}: memory {}, max deviation {worst:.2e}", par.memory_dim);
        assert!(worst < 1e-9);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

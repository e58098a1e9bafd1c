// 1→N cloning of qubit unitaries: optimal fidelity and the chain
// variables x_K of the optimal assignment.

use std::error::Error;

use combopt::builder::{build_optimal_comb, fidelity_block_exact, Task};
use combopt::reduced::{solve, su2_clone_chain, su2_clone_problem};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for n in 1..=8 {
        let prob = su2_clone_problem(n)?;
        let r = solve(&prob, 1e-10, 200_000)?;
        let chain: Vec<String> = su2_clone_chain(&prob, &r.p_star).iter().map(|(k, x)| format!("{k}:{x:.3}")).collect();
        println!("N={n:<2} F={:.10}  x = [{}]", r.phi_star, chain.join(" "));
    }

    // The explicit comb for N = 2 reproduces the same value.
    let task = Task::su2_clone(2)?;
    let r = solve(&task.problem, 1e-12, 200_000)?;
    let comb = build_optimal_comb(&task, &r.p_star)?;
    let f = fidelity_block_exact(&comb).value;
    println!("explicit N=2 comb: F={f:.12}, residual {:.1e}", comb.verify(&task)?.max_residual());
    assert!((f - r.phi_star).abs() < 1e-10);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

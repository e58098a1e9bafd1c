// 1→N cloning of phase gates, checked with an exact angular quadrature on
// the explicit comb for small N.

use std::error::Error;

use combopt::builder::{build_optimal_comb, fidelity_haar, Task};
use combopt::reduced::{phase_clone_chain, phase_clone_problem, solve};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for n in 1..=8 {
        let prob = phase_clone_problem(n)?;
        let r = solve(&prob, 1e-10, 200_000)?;
        let x: Vec<String> = phase_clone_chain(&prob, &r.p_star).iter().map(|v| format!("{v:.3}")).collect();
        println!("N={n:<2} F={:.10}  x = [{}]", r.phi_star, x.join(" "));
    }
    for n in 2..=3 {
        let task = Task::phase_clone(n)?;
        let r = solve(&task.problem, 1e-12, 200_000)?;
        let comb = build_optimal_comb(&task, &r.p_star)?;
        let h = fidelity_haar(&task, &comb.r, task.exact_quadrature())?;
        println!("N={n} quadrature F={:.12} solver {:.12}", h.value, r.phi_star);
        assert!((h.value - r.phi_star).abs() < 1e-10);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

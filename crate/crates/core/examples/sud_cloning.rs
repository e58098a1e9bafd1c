// 1→2 cloning of SU(d): the q table and the optimum (√d₊+√d₋)²/d⁴.

use std::error::Error;

use combopt::reduced::{solve, sud_clone_problem};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    for d in 2..=5usize {
        let prob = sud_clone_problem(d)?;
        let d4 = (d as u64).pow(4);
        for (ia, a) in prob.a_list.iter().enumerate() {
            let row: Vec<String> = (0..prob.num_k())
                .map(|ik| {
                    let (num, den) = prob.q_rational(ia, ik);
                    format!("{}={}/{}", prob.k_list[ik], num * d4, den)
                })
                .collect();
            println!("d={d} a={} d^4 q: {}", a.irrep, row.join("  "));
        }
        let r = solve(&prob, 1e-10, 100_000)?;
        let (dp, dm) = ((d * (d + 1) / 2) as f64, (d * (d - 1) / 2) as f64);
        let want = (dp.sqrt() + dm.sqrt()).powi(2) / d4 as f64;
        println!("d={d} F={:.10} (closed form {want:.10})", r.phi_star);
        assert!((r.phi_star - want).abs() < 1e-8);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

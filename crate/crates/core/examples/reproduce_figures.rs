// Writes the figure data to a directory (first argument, default a
// temporary directory) and prints the cloning curves.

use std::error::Error;
use std::path::PathBuf;

use combopt::pipeline::{reproduce_figures, RunConfig, TaskConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    run_in(std::env::temp_dir().join("combopt-figures"))
}

fn run_in(dir: PathBuf) -> Result<(), Box<dyn Error>> {
    let mut cfg = RunConfig::new(TaskConfig::ReproduceFigures);
    cfg.output = Some(dir);
    let figs = reproduce_figures(&cfg)?;
    for f in &figs.files {
        println!("wrote {}", f.display());
    }
    let (su2, phase) = (figs.curve("fig2_su2").unwrap(), figs.curve("fig2_phase").unwrap());
    println!("{:>3} {:>12} {:>12}", "N", "su2", "phase");
    for (s, p) in su2.rows.iter().zip(&phase.rows) {
        println!("{:>3} {:>12.9} {:>12.9}", s.0, s.1, p.1);
    }
    assert!(figs.passed(), "{:?}", figs.failures);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    match std::env::args().nth(1) {
        Some(dir) => run_in(PathBuf::from(dir)),
        None => run_example(),
    }
}

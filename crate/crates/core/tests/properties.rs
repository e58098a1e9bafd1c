use combopt::builder::{build_optimal_comb, fidelity_block_exact, Task};
use combopt::choi::{choi_of_kraus, compose, link_product};
use combopt::linalg::{haar_isometry, Mat};
use combopt::reduced::{phase_clone_problem, phi, solve, su2_clone_problem, ProbabilityAssignment};
use combopt::tensor::Subsystem;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn channel(d_in: usize, d_out: usize, rank: usize, i: &str, o: &str, seed: u64) -> combopt::choi::ChoiOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = haar_isometry(d_out * rank, d_in, &mut rng);
    let kraus: Vec<Mat> = (0..rank).map(|k| Mat::from_fn(d_out, d_in, |r, c| v[(r * rank + k, c)])).collect();
    choi_of_kraus(&kraus, Subsystem::new(i, d_in), Subsystem::new(o, d_out)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_beats_random_points(n in 1usize..7, phase in any::<bool>(), seed in any::<u64>()) {
        let prob = if phase { phase_clone_problem(n).unwrap() } else { su2_clone_problem(n).unwrap() };
        let best = solve(&prob, 1e-10, 200_000).unwrap().phi_star;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let p = ProbabilityAssignment::random(&prob, &mut rng);
            prop_assert!(phi(&p, &prob).unwrap() <= best + 1e-12);
        }
    }

    #[test]
    fn central_identity_on_random_points(seed in any::<u64>()) {
        let task = Task::phase_clone(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ProbabilityAssignment::random(&task.problem, &mut rng);
        let comb = build_optimal_comb(&task, &p).unwrap();
        prop_assert!((fidelity_block_exact(&comb).value - phi(&p, &task.problem).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn link_product_is_associative(seed in any::<u64>(), r1 in 1usize..4, r2 in 2usize..4, r3 in 1usize..4) {
        let a = channel(2, 3, r1, "x", "y", seed);
        let b = channel(3, 2, r2, "y", "z", seed.wrapping_add(1));
        let c = channel(2, 2, r3, "z", "w", seed.wrapping_add(2));
        let left = link_product(&link_product(&a.op, &b.op).unwrap(), &c.op).unwrap();
        let right = link_product(&a.op, &link_product(&b.op, &c.op).unwrap()).unwrap();
        prop_assert!(left.distance(&right).unwrap() < 1e-12);
        let composed = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        prop_assert!(composed.normalization_residual().unwrap() < 1e-10);
    }
}

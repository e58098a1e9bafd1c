//! The reduced concave program over irrep probabilities
//! `Φ(p) = Σ_K (Σ_a √(q^a_K p^a_K))²`, one probability simplex per target irrep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::{
    decompose_tensor_with_conjugate, su2_power_decomposition, u1_power_decomposition, GroupId, Irrep, RepSpec,
    SudTag,
};

const FEASIBILITY_TOL: f64 = 1e-9;
const GRAD_EPS: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetIrrep {
    pub irrep: Irrep,
    pub m: usize,
    pub d: usize,
}

/// Coefficient tables of the reduced program.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedProblem {
    pub group: GroupId,
    pub a_list: Vec<TargetIrrep>,
    pub betas: Vec<Irrep>,
    pub k_list: Vec<Irrep>,
    /// `mult[a][β][K] = m^{a,β}_K`, including the factor `m_a`.
    pub mult: Vec<Vec<Vec<usize>>>,
    pub s: Vec<Vec<usize>>,
    pub q: Vec<Vec<f64>>,
    pub h: Vec<Vec<f64>>,
    pub d0: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityAssignment {
    /// `p[a][K]`.
    pub p: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub p_star: ProbabilityAssignment,
    pub phi_star: f64,
    pub kkt_residual: f64,
    pub iterations: usize,
}

fn order_key(x: &Irrep) -> (i64, u8) {
    match *x {
        Irrep::U1 { weight } => (weight, 0),
        Irrep::SU2 { two_j } => (two_j as i64, 0),
        Irrep::SUd { tag, .. } => (0, tag as u8),
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Analytic tensor product of two multiplicity-free irrep lists.
fn tensor_content(x: &RepSpec, y: &RepSpec) -> Result<RepSpec> {
    let mut content: Vec<(Irrep, usize)> = Vec::new();
    let mut push = |k: Irrep, m: usize| match content.iter_mut().find(|(z, _)| *z == k) {
        Some((_, c)) => *c += m,
        None => content.push((k, m)),
    };
    for (a, ma) in &x.content {
        for (b, mb) in &y.content {
            match (*a, *b) {
                (Irrep::U1 { weight: p }, Irrep::U1 { weight: q }) => push(Irrep::U1 { weight: p + q }, ma * mb),
                (Irrep::SU2 { two_j: p }, Irrep::SU2 { two_j: q }) => {
                    let mut t = p.abs_diff(q);
                    while t <= p + q {
                        push(Irrep::SU2 { two_j: t }, ma * mb);
                        t += 2;
                    }
                }
                (Irrep::SUd { d, tag: SudTag::Defining }, Irrep::SUd { tag: SudTag::Defining, .. }) => {
                    push(Irrep::SUd { d, tag: SudTag::Sym }, ma * mb);
                    push(Irrep::SUd { d, tag: SudTag::Antisym }, ma * mb);
                }
                (Irrep::SUd { tag: SudTag::Trivial, .. }, z) | (z, Irrep::SUd { tag: SudTag::Trivial, .. }) => {
                    push(z, ma * mb)
                }
                _ => return Err(Error::UnsupportedGroup(format!("tensor product {a} ⊗ {b}"))),
            }
        }
    }
    RepSpec::new(x.group, content)
}

/// Builds the coefficient tables for transforming the tensor product of
/// `inputs` into `target`. Input multiplicities are stripped first.
pub fn build_reduced_problem(inputs: &[RepSpec], target: &RepSpec) -> Result<ReducedProblem> {
    let first = inputs.first().ok_or_else(|| Error::InvalidConfig("no input representation".into()))?;
    for r in inputs.iter().chain(std::iter::once(target)) {
        if r.group != target.group {
            return Err(Error::UnsupportedGroup(format!("{} vs {}", r.group, target.group)));
        }
    }
    let mut input = first.clone();
    for r in &inputs[1..] {
        input = tensor_content(&input, r)?;
    }
    let input = input.multiplicity_free();
    let betas: Vec<Irrep> = input.content.iter().map(|(x, _)| *x).collect();
    let d0 = target.total_dim();

    let comps: Vec<_> = betas.iter().map(|b| decompose_tensor_with_conjugate(target, b)).collect::<Result<_>>()?;
    let mut k_list: Vec<Irrep> = Vec::new();
    for c in comps.iter().flatten() {
        if !k_list.contains(&c.k) {
            k_list.push(c.k);
        }
    }
    k_list.sort_by_key(order_key);

    let a_list: Vec<TargetIrrep> =
        target.content.iter().map(|(x, m)| TargetIrrep { irrep: *x, m: *m, d: x.dim() }).collect();
    let (na, nb, nk) = (a_list.len(), betas.len(), k_list.len());
    let mut mult = vec![vec![vec![0usize; nk]; nb]; na];
    for (ib, comp) in comps.iter().enumerate() {
        for c in comp {
            let ik = k_list.iter().position(|k| *k == c.k).unwrap();
            for (a, m) in &c.per_a {
                let ia = a_list.iter().position(|t| t.irrep == *a).unwrap();
                mult[ia][ib][ik] += m;
            }
        }
    }
    let mut s = vec![vec![0usize; nk]; na];
    let mut q = vec![vec![0.0; nk]; na];
    let mut h = vec![vec![0.0; nk]; na];
    for ia in 0..na {
        let (ma, da) = (a_list[ia].m as f64, a_list[ia].d as f64);
        for ik in 0..nk {
            s[ia][ik] = (0..nb).map(|ib| mult[ia][ib][ik] * betas[ib].dim()).sum();
            let dk = k_list[ik].dim() as f64;
            let sv = s[ia][ik] as f64;
            q[ia][ik] = ma * da * sv / (dk * (d0 * d0) as f64);
            h[ia][ik] = dk * dk * sv / (ma * da);
        }
    }
    Ok(ReducedProblem { group: target.group, a_list, betas, k_list, mult, s, q, h, d0 })
}

impl ReducedProblem {
    pub fn num_a(&self) -> usize {
        self.a_list.len()
    }

    pub fn num_k(&self) -> usize {
        self.k_list.len()
    }

    pub fn k_index(&self, k: &Irrep) -> Option<usize> {
        self.k_list.iter().position(|x| x == k)
    }

    pub fn a_index(&self, a: &Irrep) -> Option<usize> {
        self.a_list.iter().position(|x| x.irrep == *a)
    }

    pub fn beta_index(&self, b: &Irrep) -> Option<usize> {
        self.betas.iter().position(|x| x == b)
    }

    /// `q^a_K` as a reduced fraction `(numerator, denominator)`.
    pub fn q_rational(&self, ia: usize, ik: usize) -> (u64, u64) {
        let t = &self.a_list[ia];
        let num = (t.m * t.d * self.s[ia][ik]) as u64;
        let den = (self.k_list[ik].dim() * self.d0 * self.d0) as u64;
        if num == 0 {
            return (0, 1);
        }
        let g = gcd(num, den);
        (num / g, den / g)
    }

    /// Largest violation of `Σ_K q^a_K d_K² = (m_a d_a)² Σ_β d_β² / d0²`.
    pub fn sum_rule_residual(&self) -> f64 {
        let db2: f64 = self.betas.iter().map(|b| (b.dim() * b.dim()) as f64).sum();
        let d02 = (self.d0 * self.d0) as f64;
        (0..self.num_a())
            .map(|ia| {
                let lhs: f64 = (0..self.num_k()).map(|ik| self.q[ia][ik] * (self.k_list[ik].dim().pow(2)) as f64).sum();
                let t = &self.a_list[ia];
                let rhs = ((t.m * t.d) as f64).powi(2) * db2 / d02;
                (lhs - rhs).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Number of K's whose irrep sits inside `U^{[γ]*} ⊗ V^{[d]}` for some `d`.
    pub fn k_gamma(&self, ib: usize) -> usize {
        (0..self.num_k()).filter(|&ik| (0..self.num_a()).any(|ia| self.mult[ia][ib][ik] > 0)).count()
    }

    fn support(&self, ia: usize) -> Vec<usize> {
        (0..self.num_k()).filter(|&ik| self.q[ia][ik] > 0.0).collect()
    }
}

impl ProbabilityAssignment {
    pub fn uniform_on_support(prob: &ReducedProblem) -> Self {
        let p = (0..prob.num_a())
            .map(|ia| {
                let sup = prob.support(ia);
                let mut row = vec![0.0; prob.num_k()];
                for &ik in &sup {
                    row[ik] = 1.0 / sup.len() as f64;
                }
                row
            })
            .collect();
        Self { p }
    }

    /// Largest violation of nonnegativity or of the per-row normalization.
    pub fn feasibility_residual(&self) -> f64 {
        self.p
            .iter()
            .map(|row| {
                let neg = row.iter().fold(0.0_f64, |acc, &x| acc.max(-x));
                let sum: f64 = row.iter().sum();
                neg.max((sum - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }

    /// Feasible means one probability vector per target irrep, supported on
    /// the K's with `q^a_K > 0`.
    pub fn check(&self, prob: &ReducedProblem) -> Result<()> {
        if self.p.len() != prob.num_a() || self.p.iter().any(|r| r.len() != prob.num_k()) {
            return Err(Error::Infeasible("shape does not match the problem".into()));
        }
        let r = self.feasibility_residual();
        if r > FEASIBILITY_TOL {
            return Err(Error::Infeasible(format!("constraint violation {r:.3e}")));
        }
        for (ia, row) in self.p.iter().enumerate() {
            for (ik, &x) in row.iter().enumerate() {
                if prob.q[ia][ik] == 0.0 && x.abs() > FEASIBILITY_TOL {
                    return Err(Error::Infeasible(format!(
                        "p[{ia}][{ik}] = {x:.3e} but {} does not occur for {}",
                        prob.k_list[ik], prob.a_list[ia].irrep
                    )));
                }
            }
        }
        Ok(())
    }

    /// Random point of the feasible set: independent flat Dirichlet draws
    /// on each support.
    pub fn random<R: rand::Rng + ?Sized>(prob: &ReducedProblem, rng: &mut R) -> Self {
        let p = (0..prob.num_a())
            .map(|ia| {
                let w: Vec<f64> = (0..prob.num_k())
                    .map(|ik| if prob.q[ia][ik] > 0.0 { -(1.0 - rng.random::<f64>()).ln() } else { 0.0 })
                    .collect();
                let s: f64 = w.iter().sum();
                w.iter().map(|x| x / s).collect()
            })
            .collect();
        Self { p }
    }
}

fn phi_raw(prob: &ReducedProblem, p: &[Vec<f64>]) -> f64 {
    (0..prob.num_k())
        .map(|ik| {
            let s: f64 = (0..prob.num_a()).map(|ia| (prob.q[ia][ik] * p[ia][ik].max(0.0)).sqrt()).sum();
            s * s
        })
        .sum()
}

/// `Φ(p) = Σ_K (Σ_a √(q^a_K p^a_K))²`.
pub fn phi(p: &ProbabilityAssignment, prob: &ReducedProblem) -> Result<f64> {
    p.check(prob)?;
    Ok(phi_raw(prob, &p.p))
}

fn gradient(prob: &ReducedProblem, p: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let (na, nk) = (prob.num_a(), prob.num_k());
    let sums: Vec<f64> =
        (0..nk).map(|ik| (0..na).map(|ia| (prob.q[ia][ik] * p[ia][ik].max(0.0)).sqrt()).sum()).collect();
    (0..na)
        .map(|ia| {
            (0..nk)
                .map(|ik| {
                    let q = prob.q[ia][ik];
                    if q == 0.0 {
                        0.0
                    } else {
                        sums[ik] * (q / (p[ia][ik].max(0.0) + GRAD_EPS)).sqrt()
                    }
                })
                .collect()
        })
        .collect()
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Max-norm of the gradient projected on the tangent cone of one simplex.
fn tangent_residual(g: &[f64], x: &[f64]) -> f64 {
    if g.is_empty() {
        return 0.0;
    }
    let zero: Vec<bool> = x.iter().map(|&v| v <= 0.0).collect();
    let dir = |mu: f64| -> Vec<f64> {
        g.iter().zip(&zero).map(|(&gk, &z)| if z { (gk - mu).max(0.0) } else { gk - mu }).collect()
    };
    let total = |mu: f64| -> f64 { dir(mu).iter().sum() };
    let (mut lo, mut hi) = (
        g.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0,
        g.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1.0,
    );
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    dir(0.5 * (lo + hi)).iter().fold(0.0_f64, |acc, d| acc.max(d.abs()))
}

/// KKT residual of `p` for the reduced program; variables with `q = 0` are
/// excluded.
pub fn kkt_residual(prob: &ReducedProblem, p: &ProbabilityAssignment) -> f64 {
    let g = gradient(prob, &p.p);
    (0..prob.num_a())
        .map(|ia| {
            let sup = prob.support(ia);
            let gs: Vec<f64> = sup.iter().map(|&ik| g[ia][ik]).collect();
            let xs: Vec<f64> = sup.iter().map(|&ik| p.p[ia][ik]).collect();
            tangent_residual(&gs, &xs)
        })
        .fold(0.0, f64::max)
}

/// Maximizes Φ by projected gradient ascent with Barzilai–Borwein steps and
/// Armijo backtracking. Target irreps that share no K with any other are
/// solved exactly at the lowest-index maximizer of `q^a_K`.
pub fn solve(prob: &ReducedProblem, tol: f64, max_iter: usize) -> Result<SolveReport> {
    let (na, nk) = (prob.num_a(), prob.num_k());
    for ia in 0..na {
        if prob.support(ia).is_empty() {
            return Err(Error::Infeasible(format!("target irrep {} has no positive q", prob.a_list[ia].irrep)));
        }
    }
    let supports: Vec<Vec<usize>> = (0..na).map(|ia| prob.support(ia)).collect();
    let exclusive: Vec<bool> = (0..na)
        .map(|ia| supports[ia].iter().all(|ik| (0..na).all(|ib| ib == ia || prob.q[ib][*ik] == 0.0)))
        .collect();

    let mut x = ProbabilityAssignment::uniform_on_support(prob).p;
    for ia in (0..na).filter(|&ia| exclusive[ia]) {
        let best = supports[ia].iter().copied().fold(supports[ia][0], |b, ik| if prob.q[ia][ik] > prob.q[ia][b] { ik } else { b });
        x[ia] = vec![0.0; nk];
        x[ia][best] = 1.0;
    }
    let free: Vec<usize> = (0..na).filter(|&ia| !exclusive[ia]).collect();

    let project = |y: &mut Vec<Vec<f64>>| {
        for &ia in &free {
            let vals: Vec<f64> = supports[ia].iter().map(|&ik| y[ia][ik]).collect();
            let proj = project_simplex(&vals);
            for (j, &ik) in supports[ia].iter().enumerate() {
                y[ia][ik] = proj[j];
            }
        }
    };
    let dot = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 {
        free.iter().flat_map(|&ia| supports[ia].iter().map(move |&ik| a[ia][ik] * b[ia][ik])).sum()
    };
    let diff = |a: &[Vec<f64>], b: &[Vec<f64>]| -> Vec<Vec<f64>> {
        a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(u, v)| u - v).collect()).collect()
    };

    let mut f = phi_raw(prob, &x);
    let mut g = gradient(prob, &x);
    let mut step = 1.0;
    let mut iterations = 0;
    let mut residual = kkt_residual(prob, &ProbabilityAssignment { p: x.clone() });
    while residual > tol && iterations < max_iter && !free.is_empty() {
        iterations += 1;
        let mut t = step;
        let (xn, fnew) = loop {
            let mut y: Vec<Vec<f64>> = x.clone();
            for &ia in &free {
                for &ik in &supports[ia] {
                    y[ia][ik] += t * g[ia][ik];
                }
            }
            project(&mut y);
            let fy = phi_raw(prob, &y);
            let s = diff(&y, &x);
            if fy >= f + 1e-4 * dot(&g, &s) || t < 1e-20 {
                break (y, fy);
            }
            t *= 0.5;
        };
        let gn = gradient(prob, &xn);
        let s = diff(&xn, &x);
        let yv = diff(&gn, &g);
        let sy = dot(&s, &yv);
        let ss = dot(&s, &s);
        step = if sy < 0.0 { (-ss / sy).clamp(1e-12, 1e6) } else { 1e3 };
        if ss == 0.0 {
            break;
        }
        x = xn;
        f = fnew;
        g = gn;
        residual = kkt_residual(prob, &ProbabilityAssignment { p: x.clone() });
    }
    let p_star = ProbabilityAssignment { p: x };
    let phi_star = phi_raw(prob, &p_star.p);
    if residual > tol {
        return Err(Error::NoConvergence { residual, iterations });
    }
    Ok(SolveReport { p_star, phi_star, kkt_residual: residual, iterations })
}

/// Closed-form optimum for transforming spin β into spin a.
pub fn irrep_transform_fidelity(beta: f64, a: f64) -> f64 {
    (2.0 * beta + 1.0) / ((2.0 * a + 1.0) * (2.0 * (a - beta).abs() + 1.0))
}

pub fn irrep_transform_problem(two_beta: u32, two_a: u32) -> Result<ReducedProblem> {
    build_reduced_problem(
        &[RepSpec::irrep(Irrep::SU2 { two_j: two_beta })],
        &RepSpec::irrep(Irrep::SU2 { two_j: two_a }),
    )
}

/// 1→N cloning of qubit unitaries.
pub fn su2_clone_problem(n: usize) -> Result<ReducedProblem> {
    build_reduced_problem(&[RepSpec::irrep(Irrep::spin(0.5))], &su2_power_decomposition(n))
}

/// 1→N cloning of qubit phase gates `diag(1, e^{iφ})`.
pub fn phase_clone_problem(n: usize) -> Result<ReducedProblem> {
    let input = RepSpec::new(GroupId::U1, vec![(Irrep::U1 { weight: 0 }, 1), (Irrep::U1 { weight: 1 }, 1)])?;
    build_reduced_problem(&[input], &u1_power_decomposition(n))
}

/// 1→2 cloning of SU(d) unitaries.
pub fn sud_clone_problem(d: usize) -> Result<ReducedProblem> {
    let x = |tag| Irrep::SUd { d, tag };
    let target = RepSpec::new(GroupId::SUd(d), vec![(x(SudTag::Sym), 1), (x(SudTag::Antisym), 1)])?;
    build_reduced_problem(&[RepSpec::irrep(x(SudTag::Defining))], &target)
}

/// Chain variables of the SU(2) cloning problem: `(K, x_K = p^{K−1/2}_K)`
/// for every K reached from `a = K − 1/2`.
pub fn su2_clone_chain(prob: &ReducedProblem, p: &ProbabilityAssignment) -> Vec<(f64, f64)> {
    prob.k_list
        .iter()
        .enumerate()
        .filter_map(|(ik, k)| {
            let Irrep::SU2 { two_j } = *k else { return None };
            let a = Irrep::SU2 { two_j: two_j.checked_sub(1)? };
            let ia = prob.a_index(&a)?;
            Some((two_j as f64 / 2.0, p.p[ia][ik]))
        })
        .collect()
}

/// Chain variables of the phase cloning problem: `x_K = p^K_K` for K = 0…N.
pub fn phase_clone_chain(prob: &ReducedProblem, p: &ProbabilityAssignment) -> Vec<f64> {
    prob.a_list
        .iter()
        .enumerate()
        .filter_map(|(ia, t)| {
            let ik = prob.k_index(&t.irrep)?;
            Some(p.p[ia][ik])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_feasible(prob: &ReducedProblem, rng: &mut ChaCha8Rng) -> ProbabilityAssignment {
        ProbabilityAssignment::random(prob, rng)
    }

    #[test]
    fn sud_table_times_d4() {
        for d in 2..6u64 {
            let prob = sud_clone_problem(d as usize).unwrap();
            let (dp, dm) = (d * (d + 1) / 2, d * (d - 1) / 2);
            let d4 = d.pow(4);
            let scaled = |ia, ik| {
                let (n, den) = prob.q_rational(ia, ik);
                let g = gcd(n * d4, den);
                (n * d4 / g, den / g)
            };
            let red = |n: u64, den: u64| {
                if n == 0 {
                    return (0, 1);
                }
                let g = gcd(n, den);
                (n / g, den / g)
            };
            assert_eq!(scaled(0, 0), (dp, 1));
            assert_eq!(scaled(0, 1), red(dp, dp - 1));
            assert_eq!(scaled(1, 0), (dm, 1));
            if d > 2 {
                assert_eq!(scaled(0, 2), (0, 1));
                assert_eq!(scaled(1, 1), (0, 1));
                assert_eq!(scaled(1, 2), red(dm, dm - 1));
            } else {
                assert_eq!(prob.num_k(), 2);
                assert_eq!(scaled(1, 1), (0, 1));
            }
            assert!(prob.sum_rule_residual() < 1e-14);
        }
    }

    #[test]
    fn irrep_transform_q_table() {
        let prob = irrep_transform_problem(2, 3).unwrap();
        for (ik, k) in prob.k_list.iter().enumerate() {
            let kk = k.j().unwrap();
            let expect = 3.0 / (4.0 * (2.0 * kk + 1.0));
            assert!((prob.q[0][ik] - expect).abs() < 1e-15);
        }
        assert_eq!(prob.k_list.iter().map(|k| k.j().unwrap()).collect::<Vec<_>>(), vec![0.5, 1.5, 2.5]);
    }

    #[test]
    fn phase_q_table() {
        let n = 5;
        let prob = phase_clone_problem(n).unwrap();
        let c = |k: i64| crate::groups::binomial_f64(n as u64, k as u64);
        let d0sq = 4f64.powi(n as i32);
        for (ik, k) in prob.k_list.iter().enumerate() {
            let Irrep::U1 { weight: k } = *k else { panic!() };
            for (ia, t) in prob.a_list.iter().enumerate() {
                let Irrep::U1 { weight: a } = t.irrep else { panic!() };
                let expect = if a == k || a == k + 1 { c(a).powi(2) / d0sq } else { 0.0 };
                assert!((prob.q[ia][ik] - expect).abs() < 1e-15);
            }
        }
        assert!(prob.sum_rule_residual() < 1e-12);
    }

    #[test]
    fn phi_examples() {
        let prob = irrep_transform_problem(2, 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = random_feasible(&prob, &mut rng);
        let linear: f64 = (0..prob.num_k()).map(|ik| prob.q[0][ik] * p.p[0][ik]).sum();
        assert!((phi(&p, &prob).unwrap() - linear).abs() < 1e-15);

        let d = 3usize;
        let prob = sud_clone_problem(d).unwrap();
        let mut p = ProbabilityAssignment { p: vec![vec![0.0; 3]; 2] };
        p.p[0][0] = 1.0;
        p.p[1][0] = 1.0;
        let (dp, dm) = (6f64, 3f64);
        let expect = (dp.sqrt() + dm.sqrt()).powi(2) / 81.0;
        assert!((phi(&p, &prob).unwrap() - expect).abs() < 1e-15);

        let bad = ProbabilityAssignment { p: vec![vec![0.5, 0.0, 0.0], vec![1.0, 0.0, 0.0]] };
        assert!(matches!(phi(&bad, &prob), Err(Error::Infeasible(_))));
    }

    #[test]
    fn concavity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for prob in [su2_clone_problem(5).unwrap(), phase_clone_problem(4).unwrap(), sud_clone_problem(3).unwrap()] {
            for _ in 0..200 {
                let (p, r) = (random_feasible(&prob, &mut rng), random_feasible(&prob, &mut rng));
                let l: f64 = rng.random();
                let mix = ProbabilityAssignment {
                    p: p.p.iter().zip(&r.p).map(|(a, b)| a.iter().zip(b).map(|(x, y)| l * x + (1.0 - l) * y).collect()).collect(),
                };
                let lhs = phi(&mix, &prob).unwrap();
                let rhs = l * phi(&p, &prob).unwrap() + (1.0 - l) * phi(&r, &prob).unwrap();
                assert!(lhs >= rhs - 1e-12);
            }
        }
    }

    #[test]
    fn solver_on_closed_forms() {
        let r = solve(&irrep_transform_problem(2, 1).unwrap(), 1e-10, 100_000).unwrap();
        assert!((r.phi_star - 0.75).abs() < 1e-12);
        let r = solve(&sud_clone_problem(2).unwrap(), 1e-10, 100_000).unwrap();
        assert!((r.phi_star - (3f64.sqrt() + 1.0).powi(2) / 16.0).abs() < 1e-9);
        assert!((r.p_star.p[0][0] - 1.0).abs() < 1e-9 && (r.p_star.p[1][0] - 1.0).abs() < 1e-9);
        let r = solve(&phase_clone_problem(2).unwrap(), 1e-10, 100_000).unwrap();
        assert!((r.phi_star - (3.0 + 2.0 * 2f64.sqrt()) / 8.0).abs() < 1e-9);
        let x = phase_clone_chain(&phase_clone_problem(2).unwrap(), &r.p_star);
        assert!((x[0] - 1.0).abs() < 1e-6 && (x[1] - 0.5).abs() < 1e-6 && x[2].abs() < 1e-6);
    }

    #[test]
    fn single_a_vertex() {
        let prob = irrep_transform_problem(3, 6).unwrap();
        let r = solve(&prob, 1e-10, 1000).unwrap();
        let best = prob.q[0].iter().cloned().fold(0.0, f64::max);
        assert!((r.phi_star - best).abs() < 1e-15);
        assert_eq!(r.p_star.p[0].iter().filter(|&&x| x == 1.0).count(), 1);
    }

    #[test]
    fn trivial_fidelities() {
        assert_eq!(irrep_transform_fidelity(1.5, 1.5), 1.0);
        assert!((irrep_transform_fidelity(1.0, 2.0) - 0.2).abs() < 1e-15);
        assert_eq!(irrep_transform_fidelity(2.5, 0.0), 1.0);
        let r = solve(&su2_clone_problem(1).unwrap(), 1e-10, 1000).unwrap();
        assert!((r.phi_star - 1.0).abs() < 1e-12);
        let r = solve(&phase_clone_problem(1).unwrap(), 1e-10, 100_000).unwrap();
        assert!((r.phi_star - 1.0).abs() < 1e-9);
    }
}

//! Explicit optimal combs built from irrep probabilities, their normalization
//! conditions and fidelity evaluation.

use serde::{Deserialize, Serialize};

use crate::combs::{random_deterministic_comb, verify_comb, CombAction, CombResidual};
use crate::error::{Error, Result};
use crate::groups::{
    decompose_with_conjugate, haar_nodes, su2_power_decomposition, u1_power_decomposition, ConcreteRep, GroupId,
    HaarNode, Irrep, Quadrature, RepFactor, RepSpec, SectorDecomposition, SudTag,
};
use crate::linalg::{apply_kron_left, cr, hermitian_part, min_eigenvalue, pairwise_sum, Mat, Vector, C64};
use crate::reduced::{
    build_reduced_problem, solve, ProbabilityAssignment, ReducedProblem,
};
use crate::tensor::LabeledOperator;

/// Largest comb dimension assembled as a dense matrix.
pub const MAX_EXPLICIT_DIM: usize = 4096;

/// A transformation task: concrete target and input representations with
/// their reduced program and sector decomposition.
#[derive(Clone, Debug)]
pub struct Task {
    pub name: String,
    pub action: CombAction,
    pub problem: ReducedProblem,
    pub sectors: SectorDecomposition,
}

impl Task {
    pub fn new(name: impl Into<String>, target: ConcreteRep, target_spec: RepSpec, input: ConcreteRep) -> Result<Self> {
        let input_irreps: Vec<Irrep> = input.factors.iter().flat_map(|f| f.irreps.iter().copied()).collect();
        if input.factors.len() != 1 || input.factors[0].conjugate {
            return Err(Error::InvalidConfig("the input must be a single direct sum of irreps".into()));
        }
        let input_spec = RepSpec::new(input.group, input_irreps.iter().map(|x| (*x, 1)).collect())?;
        if input_spec.content.len() != input_irreps.len() {
            return Err(Error::InvalidConfig(
                "input irreps must be multiplicity-free; convert with multiplicity_conversion_combs first".into(),
            ));
        }
        if target_spec.total_dim() != target.dim() {
            return Err(Error::IrrepMismatch(format!(
                "target content has dimension {} but the representation {}",
                target_spec.total_dim(),
                target.dim()
            )));
        }
        let problem = build_reduced_problem(&[input_spec], &target_spec)?;
        let targets: Vec<Irrep> = problem.a_list.iter().map(|t| t.irrep).collect();
        let sectors = decompose_with_conjugate(&target, &input, &targets, &problem.betas, &problem.k_list)?;
        for (ia, (a, m)) in sectors.targets.iter().enumerate() {
            if *a != targets[ia] || *m != problem.a_list[ia].m {
                return Err(Error::IrrepMismatch(format!("target block {a} (×{m}) vs {}", targets[ia])));
            }
        }
        for (ik, k) in problem.k_list.iter().enumerate() {
            for ia in 0..problem.num_a() {
                for ib in 0..problem.betas.len() {
                    let got = sectors.sector_multiplicity(k, ia, ib);
                    if got != problem.mult[ia][ib][ik] {
                        return Err(Error::IrrepMismatch(format!(
                            "sector ({ia},{ib}) holds {got} copies of {k}, expected {}",
                            problem.mult[ia][ib][ik]
                        )));
                    }
                }
            }
        }
        Ok(Self { name: name.into(), action: CombAction::new(target, input)?, problem, sectors })
    }

    /// Spin β → spin a.
    pub fn irrep_transform(two_beta: u32, two_a: u32) -> Result<Self> {
        let (b, a) = (Irrep::SU2 { two_j: two_beta }, Irrep::SU2 { two_j: two_a });
        Self::new(
            format!("irrep-transform {b} -> {a}"),
            ConcreteRep::direct_sum(vec![a])?,
            RepSpec::irrep(a),
            ConcreteRep::direct_sum(vec![b])?,
        )
    }

    pub fn su2_clone(n: usize) -> Result<Self> {
        let q = ConcreteRep::direct_sum(vec![Irrep::spin(0.5)])?;
        Self::new(format!("clone-su2 N={n}"), q.power(n), su2_power_decomposition(n), q)
    }

    pub fn phase_clone(n: usize) -> Result<Self> {
        let q = ConcreteRep::direct_sum(vec![Irrep::U1 { weight: 0 }, Irrep::U1 { weight: 1 }])?;
        Self::new(format!("clone-phase N={n}"), q.power(n), u1_power_decomposition(n), q)
    }

    pub fn sud_clone(d: usize) -> Result<Self> {
        let def = Irrep::SUd { d, tag: SudTag::Defining };
        let q = ConcreteRep::new(GroupId::SUd(d), vec![RepFactor { irreps: vec![def], conjugate: false }])?;
        let spec = RepSpec::new(
            GroupId::SUd(d),
            vec![(Irrep::SUd { d, tag: SudTag::Sym }, 1), (Irrep::SUd { d, tag: SudTag::Antisym }, 1)],
        )?;
        Self::new(format!("clone-sud d={d}"), q.power(2), spec, q)
    }

    pub fn d0(&self) -> usize {
        self.action.target.dim()
    }

    pub fn comb_dim(&self) -> usize {
        let n = self.action.target.dim() * self.action.input.dim();
        n * n
    }

    /// Quadrature that integrates the averaged fidelity exactly, where one exists.
    pub fn exact_quadrature(&self) -> Quadrature {
        Quadrature::Exact { degree: self.action.exact_degree().unwrap_or(0) }
    }
}

/// Multiplicity-space ingredients of the optimal comb for a probability
/// assignment; feasibility is not required.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzBlocks {
    pub p: ProbabilityAssignment,
    pub k_dims: Vec<usize>,
    /// Sector `(a, β)` of every copy of each K, ordered by a, then β.
    pub copy_sectors: Vec<Vec<(usize, usize)>>,
    pub beta_dims: Vec<usize>,
    /// `h^a_K`, indexed `[a][K]`.
    pub h: Vec<Vec<f64>>,
    /// `k^γ`: number of L with `P^γ_L ≠ 0`.
    pub k_gamma: Vec<usize>,
    /// `ψ_K` on `C^{m_K} ⊗ C^{m_K}`.
    pub psi: Vec<Vec<f64>>,
    /// `D^β_K`, diagonal in the copy basis, indexed `[K][β]`.
    pub d_terms: Vec<Vec<Vec<f64>>>,
    /// `Δ^γ_L`, diagonal in the copy basis, indexed `[L][γ]`.
    pub delta_terms: Vec<Vec<Vec<f64>>>,
}

impl AnsatzBlocks {
    pub fn new(prob: &ReducedProblem, p: &ProbabilityAssignment) -> Result<Self> {
        if p.p.len() != prob.num_a() || p.p.iter().any(|r| r.len() != prob.num_k()) {
            return Err(Error::Infeasible("shape does not match the problem".into()));
        }
        let (na, nb, nk) = (prob.num_a(), prob.betas.len(), prob.num_k());
        let beta_dims: Vec<usize> = prob.betas.iter().map(Irrep::dim).collect();
        let k_dims: Vec<usize> = prob.k_list.iter().map(Irrep::dim).collect();
        let copy_sectors: Vec<Vec<(usize, usize)>> = (0..nk)
            .map(|ik| {
                let mut v = Vec::new();
                for ia in 0..na {
                    for ib in 0..nb {
                        v.extend(std::iter::repeat_n((ia, ib), prob.mult[ia][ib][ik]));
                    }
                }
                v
            })
            .collect();
        let k_gamma: Vec<usize> = (0..nb).map(|ib| prob.k_gamma(ib)).collect();
        let ratio = |ia: usize, ik: usize| if prob.h[ia][ik] > 0.0 { p.p[ia][ik] / prob.h[ia][ik] } else { 0.0 };

        let mut psi = Vec::with_capacity(nk);
        let mut d_terms = Vec::with_capacity(nk);
        let mut delta_terms = Vec::with_capacity(nk);
        for ik in 0..nk {
            let m = copy_sectors[ik].len();
            let mut v = vec![0.0; m * m];
            for (mu, &(ia, ib)) in copy_sectors[ik].iter().enumerate() {
                let db = beta_dims[ib] as f64;
                v[mu * m + mu] = (ratio(ia, ik).max(0.0) * db * db).sqrt();
            }
            psi.push(v);
            let dk = k_dims[ik] as f64;
            d_terms.push(
                (0..nb)
                    .map(|ib| {
                        copy_sectors[ik]
                            .iter()
                            .map(|&(ia, b)| if b == ib { dk * beta_dims[ib] as f64 * ratio(ia, ik) } else { 0.0 })
                            .collect()
                    })
                    .collect(),
            );
            delta_terms.push(
                (0..nb)
                    .map(|ib| {
                        let count = copy_sectors[ik].iter().filter(|s| s.1 == ib).count();
                        copy_sectors[ik]
                            .iter()
                            .map(|&(_, b)| {
                                if b == ib {
                                    beta_dims[ib] as f64 / (count as f64 * dk * k_gamma[ib] as f64)
                                } else {
                                    0.0
                                }
                            })
                            .collect()
                    })
                    .collect(),
            );
        }
        Ok(Self { p: p.clone(), k_dims, copy_sectors, beta_dims, h: prob.h.clone(), k_gamma, psi, d_terms, delta_terms })
    }

    pub fn multiplicity(&self, ik: usize) -> usize {
        self.copy_sectors[ik].len()
    }

    /// `R^{KL} = δ_KL |ψ_K⟩⟨ψ_K| + Σ_β D^β_K ⊗ Σ_{γ≠β} Δ^γ_L` on `C^{m_K} ⊗ C^{m_L}`.
    pub fn block(&self, ik: usize, il: usize) -> Mat {
        let (mk, ml) = (self.multiplicity(ik), self.multiplicity(il));
        let mut out = Mat::zeros(mk * ml, mk * ml);
        if ik == il {
            let v = Vector::from_iterator(mk * mk, self.psi[ik].iter().map(|&x| cr(x)));
            out += &v * v.adjoint();
        }
        let nb = self.beta_dims.len();
        for b in 0..nb {
            let d = &self.d_terms[ik][b];
            for g in (0..nb).filter(|&g| g != b) {
                let e = &self.delta_terms[il][g];
                for mu in 0..mk {
                    for nu in 0..ml {
                        let i = mu * ml + nu;
                        out[(i, i)] += cr(d[mu] * e[nu]);
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnsatzResiduals {
    /// Largest deviation of `Σ_{L,d} (d_L/d_γ) Tr_{m_L}[R^{KL} P^{γ,d}_L]` from `S^K`.
    pub link_residual: f64,
    /// Largest deviation of `Σ_{K,β} (d_K/(d_a m_a)) Tr[S^K P^{a,β}_K]` from 1.
    pub normalization_residual: f64,
    pub positive: bool,
}

impl AnsatzResiduals {
    pub fn max(&self) -> f64 {
        self.link_residual.max(self.normalization_residual)
    }
}

/// Evaluates the two normalization conditions of the ansatz from the blocks.
pub fn verify_ansatz_normalization(blocks: &AnsatzBlocks, prob: &ReducedProblem) -> AnsatzResiduals {
    let nk = blocks.k_dims.len();
    let nb = blocks.beta_dims.len();
    let s: Vec<Vec<f64>> = (0..nk)
        .map(|ik| (0..blocks.multiplicity(ik)).map(|mu| (0..nb).map(|b| blocks.d_terms[ik][b][mu]).sum()).collect())
        .collect();
    let mut link: f64 = 0.0;
    for ik in 0..nk {
        let mk = blocks.multiplicity(ik);
        for g in 0..nb {
            let dg = blocks.beta_dims[g] as f64;
            let mut lhs = Mat::zeros(mk, mk);
            for il in 0..nk {
                let ml = blocks.multiplicity(il);
                let r = blocks.block(ik, il);
                let w = blocks.k_dims[il] as f64 / dg;
                for mu in 0..mk {
                    for mup in 0..mk {
                        for (nu, sec) in blocks.copy_sectors[il].iter().enumerate() {
                            if sec.1 == g {
                                lhs[(mu, mup)] += r[(mu * ml + nu, mup * ml + nu)] * w;
                            }
                        }
                    }
                }
            }
            let target = Mat::from_diagonal(&Vector::from_iterator(mk, s[ik].iter().map(|&x| cr(x))));
            link = link.max((lhs - target).norm());
        }
    }
    let mut norm: f64 = 0.0;
    for (ia, t) in prob.a_list.iter().enumerate() {
        let mut total = 0.0;
        for ik in 0..nk {
            let dk = blocks.k_dims[ik] as f64;
            for (mu, sec) in blocks.copy_sectors[ik].iter().enumerate() {
                if sec.0 == ia {
                    total += dk / (t.d * t.m) as f64 * s[ik][mu];
                }
            }
        }
        norm = norm.max((total - 1.0).abs());
    }
    let positive = blocks.p.p.iter().flatten().all(|&x| x >= 0.0);
    AnsatzResiduals { link_residual: link, normalization_residual: norm, positive }
}

/// The optimal comb for a probability assignment, as an explicit operator on
/// `H0 ⊗ H1 ⊗ H2 ⊗ H3` together with its multiplicity-space blocks.
#[derive(Clone, Debug)]
pub struct OptimalComb {
    pub r: LabeledOperator,
    pub blocks: AnsatzBlocks,
    pub d0: usize,
}

/// Change of basis from the block basis `(K, i, μ)` to `H0 ⊗ H1` and `H2 ⊗ H3`.
fn block_bases(task: &Task) -> Result<(Mat, Mat)> {
    let e = task.sectors.joint.basis_change();
    let (dv, du) = (task.sectors.target_dim, task.sectors.input_dim);
    let mut swap = Mat::zeros(du * dv, dv * du);
    for v in 0..dv {
        for u in 0..du {
            swap[(u * dv + v, v * du + u)] = cr(1.0);
        }
    }
    Ok((e.map(|z| z.conj()), swap * e))
}

pub fn build_optimal_comb(task: &Task, p: &ProbabilityAssignment) -> Result<OptimalComb> {
    let prob = &task.problem;
    p.check(prob)?;
    let n2 = task.comb_dim();
    if n2 > MAX_EXPLICIT_DIM {
        return Err(Error::InvalidDimensions(format!("comb dimension {n2} exceeds {MAX_EXPLICIT_DIM}")));
    }
    let blocks = AnsatzBlocks::new(prob, p)?;
    let joint = &task.sectors.joint;
    for (ik, k) in prob.k_list.iter().enumerate() {
        let b = joint.block(k).ok_or_else(|| Error::MissingProjector(format!("{k}")))?;
        let got: Vec<(usize, usize)> = b.copies.iter().map(|c| c.sector).collect();
        if got != blocks.copy_sectors[ik] {
            return Err(Error::MissingProjector(format!("copies of {k} are not ordered by sector")));
        }
    }
    let n = joint.dim;
    let offsets = joint.offsets();
    let mut rt = Mat::zeros(n * n, n * n);
    let nk = prob.num_k();
    for ik in 0..nk {
        let (dk, mk) = (blocks.k_dims[ik], blocks.multiplicity(ik));
        for il in 0..nk {
            let (dl, ml) = (blocks.k_dims[il], blocks.multiplicity(il));
            let r = blocks.block(ik, il);
            if r.iter().all(|z| *z == C64::new(0.0, 0.0)) {
                continue;
            }
            for i in 0..dk {
                for j in 0..dl {
                    for mu in 0..mk {
                        for nu in 0..ml {
                            let row = (offsets[ik] + i * mk + mu) * n + offsets[il] + j * ml + nu;
                            for mup in 0..mk {
                                for nup in 0..ml {
                                    let z = r[(mu * ml + nu, mup * ml + nup)];
                                    if z != C64::new(0.0, 0.0) {
                                        let col = (offsets[ik] + i * mk + mup) * n + offsets[il] + j * ml + nup;
                                        rt[(row, col)] = z;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let (ta, tb) = block_bases(task)?;
    let x = apply_kron_left(&ta, &tb, &rt);
    let m = apply_kron_left(&ta, &tb, &x.adjoint());
    let r = LabeledOperator::new(task.action.spec().labels(), hermitian_part(&m))?;
    Ok(OptimalComb { r, blocks, d0: task.d0() })
}

impl OptimalComb {
    pub fn verify(&self, task: &Task) -> Result<CombResidual> {
        verify_comb(&self.r, &task.action.spec())
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(self.r.matrix())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FidelityMethod {
    BlockExact,
    HaarQuadrature,
    HaarMc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub method: FidelityMethod,
}

/// `F = Σ_K (d_K/d0²) ⟨⟨I|R^{KK}|I⟩⟩`.
pub fn fidelity_block_exact(comb: &OptimalComb) -> FidelityEstimate {
    let b = &comb.blocks;
    let d02 = (comb.d0 * comb.d0) as f64;
    let terms: Vec<f64> = (0..b.k_dims.len())
        .map(|ik| {
            let m = b.multiplicity(ik);
            let r = b.block(ik, ik);
            let mut s = C64::new(0.0, 0.0);
            for mu in 0..m {
                for mup in 0..m {
                    s += r[(mu * m + mu, mup * m + mup)];
                }
            }
            b.k_dims[ik] as f64 / d02 * s.re
        })
        .collect();
    FidelityEstimate { value: pairwise_sum(&terms), std_error: 0.0, method: FidelityMethod::BlockExact }
}

/// Group-averaged fidelity of any 2-comb, with the per-node vectors
/// `w_g[i0,i1,i2,i3] = conj(U_g[i2,i1]) V_g[i3,i0]` precomputed.
#[derive(Clone, Debug)]
pub struct HaarFidelity {
    d0: usize,
    exact: bool,
    weights: Vec<f64>,
    vectors: Vec<Vector>,
    average: Mat,
}

impl HaarFidelity {
    pub fn new(action: &CombAction, nodes: &[HaarNode], exact: bool) -> Result<Self> {
        let (d0, du) = (action.target.dim(), action.input.dim());
        let n = d0 * du * du * d0;
        let mut vectors = Vec::with_capacity(nodes.len());
        let mut weights = Vec::with_capacity(nodes.len());
        let mut average = Mat::zeros(n, n);
        for node in nodes {
            let u = action.input.matrix(&node.element)?;
            let v = action.target.matrix(&node.element)?;
            let w = Vector::from_fn(n, |idx, _| {
                let i3 = idx % d0;
                let i2 = (idx / d0) % du;
                let i1 = (idx / (d0 * du)) % du;
                let i0 = idx / (d0 * du * du);
                u[(i2, i1)].conj() * v[(i3, i0)]
            });
            if exact {
                average += &w * w.adjoint() * cr(node.weight);
            }
            weights.push(node.weight);
            vectors.push(w);
        }
        Ok(Self { d0, exact, weights, vectors, average })
    }

    pub fn for_task(task: &Task, quadrature: Quadrature) -> Result<Self> {
        let exact = quadrature.is_exact() && task.action.exact_degree().is_some();
        let nodes = haar_nodes(task.action.group(), quadrature);
        Self::new(&task.action, &nodes, exact)
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn estimate(&self, r: &LabeledOperator) -> Result<FidelityEstimate> {
        let names = [crate::combs::H0, crate::combs::H1, crate::combs::H2, crate::combs::H3];
        let r = r.permuted(&names)?;
        let m = r.matrix();
        if m.nrows() != self.vectors.first().map_or(0, |v| v.len()) {
            return Err(Error::LabelMismatch("comb dimensions do not match the task".into()));
        }
        let d02 = (self.d0 * self.d0) as f64;
        if self.exact {
            let value = m.component_mul(&self.average.transpose()).sum().re / d02;
            return Ok(FidelityEstimate { value, std_error: 0.0, method: FidelityMethod::HaarQuadrature });
        }
        let samples: Vec<f64> = self.vectors.iter().map(|w| (w.adjoint() * m * w)[(0, 0)].re / d02).collect();
        let weighted: Vec<f64> = samples.iter().zip(&self.weights).map(|(f, w)| f * w).collect();
        let value = pairwise_sum(&weighted);
        let n = samples.len() as f64;
        let var = samples.iter().map(|f| (f - value).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Ok(FidelityEstimate { value, std_error: (var / n).sqrt(), method: FidelityMethod::HaarMc })
    }
}

pub fn fidelity_haar(task: &Task, r: &LabeledOperator, quadrature: Quadrature) -> Result<FidelityEstimate> {
    HaarFidelity::for_task(task, quadrature)?.estimate(r)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub phi_star: f64,
    /// Fidelity of the optimal comb, evaluated as trial 0.
    pub optimal_trial: FidelityEstimate,
    pub max_random: f64,
    pub max_random_std_error: f64,
    /// Largest `F − Φ* − 3σ` over the random trials.
    pub worst_excess: f64,
    pub trials: usize,
}

/// Draws random deterministic 2-combs with a memory of dimension
/// `d0 · d_input` and compares their group-averaged fidelity to Φ*.
pub fn random_comb_bound_check(task: &Task, n_trials: usize, seed: u64, quadrature: Quadrature) -> Result<BoundCheck> {
    let report = solve(&task.problem, 1e-10, 200_000)?;
    let eval = HaarFidelity::for_task(task, quadrature)?;
    let comb = build_optimal_comb(task, &report.p_star)?;
    let optimal_trial = eval.estimate(&comb.r)?;
    let spec = task.action.spec();
    let mem = task.d0() * task.action.input.dim();
    let results: Vec<FidelityEstimate> = {
        use rayon::prelude::*;
        (0..n_trials)
            .into_par_iter()
            .map(|i| {
                let r = random_deterministic_comb(&spec, &[mem], seed.wrapping_add(i as u64))?;
                eval.estimate(&r)
            })
            .collect::<Result<_>>()?
    };
    let max_random = results.iter().map(|e| e.value).fold(f64::NEG_INFINITY, f64::max);
    let max_random_std_error = results.iter().map(|e| e.std_error).fold(0.0, f64::max);
    let worst_excess = results
        .iter()
        .map(|e| e.value - report.phi_star - 3.0 * e.std_error)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(BoundCheck {
        phi_star: report.phi_star,
        optimal_trial,
        max_random,
        max_random_std_error,
        worst_excess,
        trials: n_trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn central_identity_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for task in [
            Task::irrep_transform(1, 2).unwrap(),
            Task::su2_clone(2).unwrap(),
            Task::phase_clone(2).unwrap(),
            Task::sud_clone(2).unwrap(),
        ] {
            for _ in 0..3 {
                let p = ProbabilityAssignment::random(&task.problem, &mut rng);
                let comb = build_optimal_comb(&task, &p).unwrap();
                let f = fidelity_block_exact(&comb).value;
                let phi = crate::reduced::phi(&p, &task.problem).unwrap();
                assert!((f - phi).abs() < 1e-10, "{}: {f} vs {phi}", task.name);
                let res = comb.verify(&task).unwrap();
                assert!(res.passes(1e-9), "{}: {res:?}", task.name);
                let q = fidelity_haar(&task, &comb.r, task.exact_quadrature()).unwrap();
                assert!((q.value - f).abs() < 1e-8, "{}: haar {} vs {f}", task.name, q.value);
                let an = verify_ansatz_normalization(&comb.blocks, &task.problem);
                assert!(an.max() < 1e-10 && an.positive);
            }
        }
    }

    #[test]
    fn ansatz_detects_bad_p() {
        let task = Task::phase_clone(2).unwrap();
        let mut p = ProbabilityAssignment { p: vec![vec![0.0; 4]; 3] };
        p.p[0][1] = 1.0;
        p.p[1][1] = 0.9;
        p.p[2][2] = 1.0;
        let blocks = AnsatzBlocks::new(&task.problem, &p).unwrap();
        let an = verify_ansatz_normalization(&blocks, &task.problem);
        assert!((an.normalization_residual - 0.1).abs() < 1e-12);
        p.p[1][1] = 1.1;
        p.p[1][2] = -0.1;
        assert!(!verify_ansatz_normalization(&AnsatzBlocks::new(&task.problem, &p).unwrap(), &task.problem).positive);
        assert!(matches!(build_optimal_comb(&task, &p), Err(Error::Infeasible(_))));
    }

    #[test]
    fn phase_clone_optimum() {
        let task = Task::phase_clone(2).unwrap();
        let p = ProbabilityAssignment {
            p: vec![vec![0.0, 1.0, 0.0, 0.0], vec![0.0, 0.5, 0.5, 0.0], vec![0.0, 0.0, 1.0, 0.0]],
        };
        let comb = build_optimal_comb(&task, &p).unwrap();
        let want = (3.0 + 2.0 * 2f64.sqrt()) / 8.0;
        assert!((fidelity_block_exact(&comb).value - want).abs() < 1e-12);
        let h = fidelity_haar(&task, &comb.r, Quadrature::Exact { degree: 63 }).unwrap();
        assert!((h.value - want).abs() < 1e-12);
    }

    #[test]
    fn sud_d2_value() {
        let task = Task::sud_clone(2).unwrap();
        let p = ProbabilityAssignment { p: vec![vec![1.0, 0.0], vec![1.0, 0.0]] };
        let comb = build_optimal_comb(&task, &p).unwrap();
        let want = (3f64.sqrt() + 1.0).powi(2) / 16.0;
        assert!((fidelity_block_exact(&comb).value - want).abs() < 1e-12);
    }
}

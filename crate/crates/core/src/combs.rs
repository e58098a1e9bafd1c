//! Deterministic quantum combs: verification, random construction, group
//! averaging, the parallel realization of covariant combs and the
//! multiplicity-conversion combs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::choi::{choi_of_unitary, link_chain, link_product, ChoiOperator, UnitaryGate};
use crate::groups::{haar_nodes, isotypic_projectors, ConcreteRep, GroupElement, GroupId, HaarNode, Irrep, Quadrature};
use crate::linalg::{
    apply_kron_left, cr, haar_isometry, hermitian_part, identity, kernel_basis, min_eigenvalue, pairwise_sum_mat,
    psd_pinv_sqrt, psd_sqrt, Mat,
};
use crate::tensor::{max_entangled_projector, DoubleKet, LabeledOperator, Subsystem};

/// Target input, unknown-gate input, unknown-gate output, target output.
pub const H0: &str = "H0";
pub const H1: &str = "H1";
pub const H2: &str = "H2";
pub const H3: &str = "H3";

/// Ordered teeth `(H_{2j−2}, H_{2j−1})` of an N-comb.
#[derive(Clone, Debug, PartialEq)]
pub struct CombSpec {
    pub teeth: Vec<(Subsystem, Subsystem)>,
}

impl CombSpec {
    pub fn new(teeth: Vec<(Subsystem, Subsystem)>) -> Result<Self> {
        let spec = Self { teeth };
        let mut names = spec.names();
        names.sort_unstable();
        let n = names.len();
        names.dedup();
        if names.len() != n {
            return Err(Error::DuplicateLabel("comb labels must be distinct".into()));
        }
        Ok(spec)
    }

    /// The 2-comb `H0 → H1 ⇝ H2 → H3`.
    pub fn two_comb(d_target: usize, d_input: usize) -> Self {
        Self {
            teeth: vec![
                (Subsystem::new(H0, d_target), Subsystem::new(H1, d_input)),
                (Subsystem::new(H2, d_input), Subsystem::new(H3, d_target)),
            ],
        }
    }

    /// `H0, H1, …, H_{2N−1}`.
    pub fn labels(&self) -> Vec<Subsystem> {
        self.teeth.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect()
    }

    pub fn names(&self) -> Vec<&str> {
        self.teeth.iter().flat_map(|(a, b)| [a.name.as_str(), b.name.as_str()]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CombResidual {
    /// Frobenius residual of `Tr_{2j−1} R^{(j)} = I_{2j−2} ⊗ R^{(j−1)}` for j = N…1.
    pub levels: Vec<f64>,
    pub min_eigenvalue: f64,
}

impl CombResidual {
    pub fn max_residual(&self) -> f64 {
        self.levels.iter().copied().fold((-self.min_eigenvalue).max(0.0), f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

/// Checks the recursive normalization of a deterministic comb and its
/// positivity.
pub fn verify_comb(r: &LabeledOperator, spec: &CombSpec) -> Result<CombResidual> {
    let levels = comb_normalization_residuals(r, spec)?;
    Ok(CombResidual { levels, min_eigenvalue: min_eigenvalue(r.matrix()) })
}

/// The trace conditions of `verify_comb` without the positivity check, top
/// level first.
pub fn comb_normalization_residuals(r: &LabeledOperator, spec: &CombSpec) -> Result<Vec<f64>> {
    let labels = spec.labels();
    let names = spec.names();
    if r.labels().len() != labels.len() {
        return Err(Error::LabelMismatch(format!("{:?} vs {:?}", r.label_names(), names)));
    }
    let mut cur = r.permuted(&names).map_err(|_| Error::LabelMismatch(format!("{:?} vs {:?}", r.label_names(), names)))?;
    if cur.labels() != labels.as_slice() {
        return Err(Error::LabelMismatch("subsystem dimensions differ from the comb spec".into()));
    }
    let mut levels = Vec::with_capacity(spec.teeth.len());
    for (input, output) in spec.teeth.iter().rev() {
        let t = cur.partial_trace(&[&output.name])?;
        if t.labels().len() == 1 {
            let id = LabeledOperator::identity(vec![input.clone()])?;
            levels.push(t.distance(&id)?);
            break;
        }
        let below = t.partial_trace(&[&input.name])?.scale(cr(1.0 / input.dim as f64));
        let expect = below.tensor(&LabeledOperator::identity(vec![input.clone()])?)?;
        levels.push(t.distance(&expect)?);
        cur = below;
    }
    Ok(levels)
}

fn isometry_channel(
    ins: Vec<Subsystem>,
    outs: Vec<Subsystem>,
    rng: &mut ChaCha8Rng,
) -> Result<LabeledOperator> {
    let din: usize = ins.iter().map(|l| l.dim).product();
    let dout: usize = outs.iter().map(|l| l.dim).product();
    let env = din.div_ceil(dout);
    let v = haar_isometry(dout * env, din, rng);
    let mut labels = outs.clone();
    labels.extend(ins.iter().cloned());
    let n = dout * din;
    let mut m = Mat::zeros(n, n);
    for e in 0..env {
        let k = Mat::from_fn(dout, din, |o, i| v[(o * env + e, i)]);
        let ket = DoubleKet::from_matrix(outs.clone(), ins.clone(), &k)?;
        m += &ket.vector * ket.vector.adjoint();
    }
    LabeledOperator::new(labels, m)
}

/// Links N random isometry channels through memories of the given
/// dimensions (one fewer than the number of teeth). Each channel gets the
/// smallest environment that admits an isometric dilation.
pub fn random_deterministic_comb(spec: &CombSpec, ancilla_dims: &[usize], seed: u64) -> Result<LabeledOperator> {
    let n = spec.teeth.len();
    if ancilla_dims.len() + 1 != n || ancilla_dims.contains(&0) {
        return Err(Error::InvalidDimensions(format!("{n} teeth need {} positive memory dimensions", n - 1)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mem = |j: usize| Subsystem::new(format!("#mem{j}"), ancilla_dims[j]);
    let mut parts = Vec::with_capacity(n);
    for (j, (input, output)) in spec.teeth.iter().enumerate() {
        let mut ins = vec![input.clone()];
        if j > 0 {
            ins.push(mem(j - 1));
        }
        let mut outs = vec![output.clone()];
        if j + 1 < n {
            outs.push(mem(j));
        }
        parts.push(isometry_channel(ins, outs, &mut rng)?);
    }
    link_chain(&parts)?.permuted(&spec.names())
}

/// Target representation `V` and input representation `U` acting on a
/// 2-comb; the comb symmetry is `(V*_h ⊗ U_h)_{01} ⊗ (U*_g ⊗ V_g)_{23}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CombAction {
    pub target: ConcreteRep,
    pub input: ConcreteRep,
}

impl CombAction {
    pub fn new(target: ConcreteRep, input: ConcreteRep) -> Result<Self> {
        if target.group != input.group {
            return Err(Error::UnsupportedGroup(format!("{} vs {}", target.group, input.group)));
        }
        Ok(Self { target, input })
    }

    pub fn group(&self) -> GroupId {
        self.target.group
    }

    pub fn spec(&self) -> CombSpec {
        CombSpec::two_comb(self.target.dim(), self.input.dim())
    }

    /// `V*_h ⊗ U_h` on `H0 ⊗ H1`.
    pub fn left(&self, h: &GroupElement) -> Result<Mat> {
        Ok(self.target.matrix(h)?.map(|z| z.conj()).kronecker(&self.input.matrix(h)?))
    }

    /// `U*_g ⊗ V_g` on `H2 ⊗ H3`.
    pub fn right(&self, g: &GroupElement) -> Result<Mat> {
        Ok(self.input.matrix(g)?.map(|z| z.conj()).kronecker(&self.target.matrix(g)?))
    }

    /// Quadrature degree that averages `X R X†` exactly.
    pub fn exact_degree(&self) -> Option<usize> {
        let deg = self.target.degree() + self.input.degree();
        match self.group() {
            GroupId::U1 => Some(deg),
            GroupId::SU2 | GroupId::SUd(2) => Some(2 * deg),
            GroupId::SUd(_) => None,
        }
    }

    /// Largest commutator norm of `r` with the symmetry over the nodes.
    pub fn commutator_norm(&self, r: &LabeledOperator, nodes: &[HaarNode]) -> Result<f64> {
        let r = r.permuted(&[H0, H1, H2, H3])?;
        let mut worst: f64 = 0.0;
        for (i, a) in nodes.iter().enumerate() {
            let b = &nodes[(i * 7 + 3) % nodes.len()];
            let x = self.left(&a.element)?.kronecker(&self.right(&b.element)?);
            worst = worst.max(crate::linalg::commutator_norm(&x, r.matrix()));
        }
        Ok(worst)
    }
}

const CHUNK: usize = 16;

fn average(m: &Mat, nodes: &[HaarNode], f: impl Fn(&GroupElement, &Mat) -> Result<Mat> + Sync) -> Result<Mat> {
    let n = m.nrows();
    let partial: Vec<Mat> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = Mat::zeros(n, n);
            for node in chunk {
                acc += f(&node.element, m)? * cr(node.weight);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum_mat(&partial, n, n))
}

/// Group average of a 2-comb over both sides of the symmetry.
pub fn covariantize(r: &LabeledOperator, action: &CombAction, quadrature: Quadrature) -> Result<LabeledOperator> {
    if let Quadrature::Exact { degree } = quadrature {
        match action.exact_degree() {
            Some(need) if degree < need => {
                return Err(Error::QuadratureInsufficient(need as f64));
            }
            _ => {}
        }
    }
    let spec = action.spec();
    let r = r.permuted(&spec.names())?;
    if r.labels() != spec.labels().as_slice() {
        return Err(Error::LabelMismatch("comb dimensions do not match the action".into()));
    }
    let nodes = haar_nodes(action.group(), quadrature);
    let (da, db) = (action.target.dim() * action.input.dim(), action.input.dim() * action.target.dim());
    let (ia, ib) = (identity(da), identity(db));
    let conj = |x: &Mat, m: &Mat, left: bool| -> Mat {
        let xm = if left { apply_kron_left(x, &ib, m) } else { apply_kron_left(&ia, x, m) };
        let y = xm.adjoint();
        if left {
            apply_kron_left(x, &ib, &y)
        } else {
            apply_kron_left(&ia, x, &y)
        }
    };
    let m = average(r.matrix(), &nodes, |h, m| Ok(conj(&action.left(h)?, m, true)))?;
    let m = average(&m, &nodes, |g, m| Ok(conj(&action.right(g)?, m, false)))?;
    LabeledOperator::new(spec.labels(), hermitian_part(&m))
}

/// `R * |U⟩⟩⟨⟨U|` for a 2-comb: the channel `H0 → H3` obtained by plugging a
/// gate from `H1` to `H2`.
pub fn insert_gate(r: &LabeledOperator, u: &Mat) -> Result<ChoiOperator> {
    let gate = UnitaryGate::new(u.clone(), H1, H2)?;
    insert_channel(r, &choi_of_unitary(&gate)?)
}

/// `R * C` for a single-input single-output channel `C`, wired `H1 → H2`.
pub fn insert_channel(r: &LabeledOperator, c: &ChoiOperator) -> Result<ChoiOperator> {
    if c.inputs.len() != 1 || c.outputs.len() != 1 {
        return Err(Error::LabelMismatch("expected a channel with one input and one output".into()));
    }
    let c = c.relabel(&[(c.inputs[0].as_str(), "#in"), (c.outputs[0].as_str(), "#out")])?;
    let c = c.op.relabel_many(&[("#in", H1), ("#out", H2)])?;
    let out = link_product(r, &c)?.permuted(&[H3, H0])?;
    ChoiOperator::new(out, &[H0], &[H3])
}

const E0: &str = "E0";
const E1: &str = "E1";
const E2: &str = "E2";
const SUPPORT_CUTOFF: f64 = 1e-10;

/// Sequential realization `C1 → gate → C2` of a covariant 2-comb. `C1` maps
/// `H0` to `E0 ⊗ E1 ⊗ E2`; `E2` carries the gate and `E0 ⊗ E1` is the memory.
#[derive(Clone, Debug)]
pub struct ParallelRealization {
    pub c1: ChoiOperator,
    pub c2: ChoiOperator,
    pub memory_dim: usize,
}

impl ParallelRealization {
    /// `C1 * |U⟩⟩⟨⟨U| * C2` as a channel `H0 → H3`.
    pub fn apply(&self, u: &Mat) -> Result<ChoiOperator> {
        let gate = UnitaryGate::new(u.clone(), "#gin", E2)?;
        let c1 = self.c1.op.relabel(E2, "#gin")?;
        let out = link_chain(&[c1, choi_of_unitary(&gate)?.op, self.c2.op.clone()])?.permuted(&[H3, H0])?;
        ChoiOperator::new(out, &[H0], &[H3])
    }
}

/// Splits a covariant deterministic 2-comb into two channels linked by a
/// memory, reproducing `R * |U_g⟩⟩⟨⟨U_g|` on every group element.
pub fn decompose_parallel(r: &LabeledOperator, action: &CombAction) -> Result<ParallelRealization> {
    let spec = action.spec();
    let res = verify_comb(r, &spec)?;
    if !res.passes(1e-8) {
        return Err(Error::NotAComb(res.max_residual()));
    }
    let nodes = haar_nodes(action.group(), Quadrature::MonteCarlo { samples: 8, seed: 17 });
    let comm = action.commutator_norm(r, &nodes)?;
    if comm > 1e-8 {
        return Err(Error::NotCovariant(comm));
    }
    let r = r.permuted(&spec.names())?;
    let labels = spec.labels();
    let (d0, du, d3) = (labels[0].dim, labels[1].dim, labels[3].dim);
    let s = r.partial_trace(&[H3])?;
    let sm = hermitian_part(s.matrix());
    let half = psd_sqrt(&sm)?;
    let (inv_half, proj) = psd_pinv_sqrt(&sm, SUPPORT_CUTOFF);
    let env = vec![Subsystem::new(E0, d0), Subsystem::new(E1, du), Subsystem::new(E2, du)];

    let ket = DoubleKet::from_matrix(s.labels().to_vec(), env.clone(), &half)?;
    let wire = max_entangled_projector(Subsystem::new(H2, du), Subsystem::new(H1, du))?;
    let c1 = link_product(&ket.projector(), &wire)?.permuted(&[E0, E1, E2, H0])?;
    let c1 = ChoiOperator::new(c1, &[H0], &[E0, E1, E2])?;

    let n = d0 * du * du;
    let conj = apply_kron_left(&inv_half, &identity(d3), r.matrix());
    let conj = apply_kron_left(&inv_half, &identity(d3), &conj.adjoint());
    let fill = (identity(n) - proj).kronecker(&identity(d3)) * cr(1.0 / d3 as f64);
    let mut c2_labels = env;
    c2_labels.push(labels[3].clone());
    let c2 = LabeledOperator::new(c2_labels, hermitian_part(&(conj + fill)))?;
    let c2 = ChoiOperator::new(c2, &[E0, E1, E2], &[H3])?;
    Ok(ParallelRealization { c1, c2, memory_dim: d0 * du })
}

/// Matrix `M` with `M ρ'(X) = ρ(X) M` for every generator `X`, normalized to
/// a unitary; `ρ` and `ρ'` are equivalent irreducible actions.
fn intertwiner(rho: &[Mat], rho_p: &[Mat]) -> Result<Mat> {
    let d = rho.first().map_or(1, |m| m.nrows());
    let id = identity(d);
    let mut rows: Vec<Mat> = Vec::new();
    for (a, b) in rho.iter().zip(rho_p) {
        // vec_row(M ρ' − ρ M) = (I ⊗ ρ'ᵀ − ρ ⊗ I) vec_row(M)
        rows.push(id.kronecker(&b.transpose()) - a.kronecker(&id));
    }
    let m = if rows.is_empty() {
        return Ok(id);
    } else {
        let total: usize = rows.iter().map(|r| r.nrows()).sum();
        let mut stacked = Mat::zeros(total, d * d);
        let mut off = 0;
        for r in &rows {
            stacked.view_mut((off, 0), (r.nrows(), d * d)).copy_from(r);
            off += r.nrows();
        }
        stacked
    };
    let k = kernel_basis(&m, 1e-8);
    if k.ncols() != 1 {
        return Err(Error::IrrepMismatch(format!("intertwiner space has dimension {}", k.ncols())));
    }
    let q = Mat::from_fn(d, d, |i, j| k[(i * d + j, 0)]);
    let scale = ((q.adjoint() * &q).trace().re / d as f64).sqrt();
    Ok(q / cr(scale))
}

fn restricted_generators(action: &crate::groups::LieAction, basis: &Mat) -> Vec<Mat> {
    let adj = basis.adjoint();
    action.cartan.iter().chain(&action.raising).chain(&action.lowering).map(|x| &adj * x * basis).collect()
}

/// The two conversion combs between a representation with multiplicities and
/// its multiplicity-free reduction.
#[derive(Clone, Debug)]
pub struct MultiplicityConversion {
    /// Converts uses of the representation with multiplicities into the
    /// multiplicity-free one.
    pub forward: LabeledOperator,
    /// Converts back, using a memory of dimension `memory_dim`.
    pub backward: LabeledOperator,
    pub memory_dim: usize,
}

fn completion(kraus: &Mat, out: Vec<Subsystem>, ins: Vec<Subsystem>) -> Result<LabeledOperator> {
    let dout: usize = out.iter().map(|l| l.dim).product();
    let din: usize = ins.iter().map(|l| l.dim).product();
    let ket = DoubleKet::from_matrix(out.clone(), ins.clone(), kraus)?;
    let rest = identity(din) - kraus.adjoint() * kraus;
    let depol = identity(dout).kronecker(&rest.transpose()) * cr(1.0 / dout as f64);
    let mut labels = out;
    labels.extend(ins);
    LabeledOperator::new(labels, hermitian_part(&(&ket.vector * ket.vector.adjoint() + depol)))
}

pub fn multiplicity_conversion_combs(
    with_mult: &ConcreteRep,
    without_mult: &ConcreteRep,
    candidates: &[Irrep],
) -> Result<MultiplicityConversion> {
    let big = isotypic_projectors(with_mult, candidates)?;
    let small = isotypic_projectors(without_mult, candidates)?;
    let names = |d: &crate::groups::IsotypicDecomposition| d.blocks.iter().map(|b| b.irrep).collect::<Vec<_>>();
    let mut a = names(&big);
    let mut b = names(&small);
    a.sort_by_key(|x| format!("{x}"));
    b.sort_by_key(|x| format!("{x}"));
    if a != b {
        return Err(Error::IrrepMismatch(format!("{a:?} vs {b:?}")));
    }
    if small.blocks.iter().any(|blk| blk.multiplicity() != 1) {
        return Err(Error::IrrepMismatch("the reduced representation must be multiplicity-free".into()));
    }
    let (n, np) = (big.dim, small.dim);
    let (ga, gb) = (with_mult.lie_action()?, without_mult.lie_action()?);
    let memory_dim = big.blocks.iter().map(|blk| blk.multiplicity()).max().unwrap_or(1);

    let mut x = Mat::zeros(n, np);
    let mut xt = Mat::zeros(np * memory_dim, n);
    for blk in &small.blocks {
        let bp = &blk.copies[0].basis;
        let copies = &big.block(&blk.irrep).unwrap().copies;
        let m = intertwiner(
            &restricted_generators(&ga, &copies[0].basis),
            &restricted_generators(&gb, bp),
        )?;
        x += &copies[0].basis * &m * bp.adjoint();
        let back = bp * m.adjoint();
        for (mu, c) in copies.iter().enumerate() {
            let mut e = Mat::zeros(memory_dim, 1);
            e[(mu, 0)] = cr(1.0);
            xt += back.kronecker(&e) * c.basis.adjoint();
        }
    }
    let sys = |name: &str, d: usize| Subsystem::new(name, d);
    let mem = sys("#M", memory_dim);

    let xc = DoubleKet::from_matrix(vec![sys(H1, n)], vec![sys(H0, np)], &x)?.projector();
    let yc = completion(&x.adjoint(), vec![sys(H3, np)], vec![sys(H2, n)])?;
    let forward = xc.tensor(&yc)?.permuted(&[H0, H1, H2, H3])?;

    let xtc = DoubleKet::from_matrix(vec![sys(H1, np), mem.clone()], vec![sys(H0, n)], &xt)?.projector();
    let ytc = completion(&xt.adjoint(), vec![sys(H3, n)], vec![sys(H2, np), mem])?;
    let backward = link_product(&xtc, &ytc)?.permuted(&[H0, H1, H2, H3])?;
    Ok(MultiplicityConversion { forward, backward, memory_dim })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_special_unitary, haar_unitary, random_density};

    #[test]
    fn identity_channel_is_a_one_comb() {
        let spec = CombSpec::new(vec![(Subsystem::new("a", 3), Subsystem::new("b", 3))]).unwrap();
        let r = max_entangled_projector(Subsystem::new("b", 3), Subsystem::new("a", 3)).unwrap();
        let res = verify_comb(&r, &spec).unwrap();
        assert!(res.levels[0] < 1e-14 && res.passes(1e-12));
    }

    #[test]
    fn product_of_channels_is_a_two_comb() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = crate::choi::UnitaryGate::new(haar_unitary(2, &mut rng), "H0", "H1").unwrap();
        let w = crate::choi::UnitaryGate::new(haar_unitary(2, &mut rng), "H2", "H3").unwrap();
        let r = choi_of_unitary(&u).unwrap().op.tensor(&choi_of_unitary(&w).unwrap().op).unwrap();
        let res = verify_comb(&r, &CombSpec::two_comb(2, 2)).unwrap();
        assert!(res.passes(1e-12), "{res:?}");
    }

    #[test]
    fn random_psd_fails() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = CombSpec::two_comb(2, 2);
        let r = LabeledOperator::new(spec.labels(), random_density(16, &mut rng) * cr(4.0)).unwrap();
        let res = verify_comb(&r, &spec).unwrap();
        assert!(!res.passes(1e-3));
        let bad = LabeledOperator::new(
            vec![Subsystem::new("x", 4), Subsystem::new("H1", 2), Subsystem::new("H2", 2)],
            identity(16),
        )
        .unwrap();
        assert!(matches!(verify_comb(&bad, &spec), Err(Error::LabelMismatch(_))));
    }

    #[test]
    fn random_combs_pass_and_repeat() {
        let spec = CombSpec::two_comb(2, 2);
        for seed in 0..50 {
            let r = random_deterministic_comb(&spec, &[2], seed).unwrap();
            assert_eq!(r.dim(), 16);
            assert!(verify_comb(&r, &spec).unwrap().passes(1e-9));
        }
        let three = CombSpec::new(vec![
            (Subsystem::new("a", 2), Subsystem::new("b", 3)),
            (Subsystem::new("c", 2), Subsystem::new("d", 2)),
            (Subsystem::new("e", 3), Subsystem::new("f", 1)),
        ])
        .unwrap();
        let r = random_deterministic_comb(&three, &[2, 3], 9).unwrap();
        assert!(verify_comb(&r, &three).unwrap().passes(1e-9));
        assert_eq!(random_deterministic_comb(&spec, &[2], 11).unwrap(), random_deterministic_comb(&spec, &[2], 11).unwrap());
        let one = CombSpec::new(vec![(Subsystem::new("a", 2), Subsystem::new("b", 2))]).unwrap();
        let r = random_deterministic_comb(&one, &[], 4).unwrap();
        let ev = r.eigenvalues();
        assert!((ev[3] - 2.0).abs() < 1e-12 && ev[2].abs() < 1e-12);
    }

    fn phase_action() -> CombAction {
        let q = ConcreteRep::direct_sum(vec![Irrep::U1 { weight: 0 }, Irrep::U1 { weight: 1 }]).unwrap();
        CombAction::new(q.clone(), q).unwrap()
    }

    #[test]
    fn covariantize_u1() {
        let action = phase_action();
        let spec = action.spec();
        let r = random_deterministic_comb(&spec, &[3], 5).unwrap();
        let quad = Quadrature::Exact { degree: action.exact_degree().unwrap() };
        let rc = covariantize(&r, &action, quad).unwrap();
        let nodes = haar_nodes(GroupId::U1, Quadrature::MonteCarlo { samples: 20, seed: 1 });
        assert!(action.commutator_norm(&rc, &nodes).unwrap() < 1e-12);
        assert!(action.commutator_norm(&r, &nodes).unwrap() > 1e-3);
        assert!(verify_comb(&rc, &spec).unwrap().passes(1e-10));
        let again = covariantize(&rc, &action, quad).unwrap();
        assert!(again.distance(&rc).unwrap() < 1e-12);
        assert!(matches!(
            covariantize(&r, &action, Quadrature::Exact { degree: 1 }),
            Err(Error::QuadratureInsufficient(_))
        ));
    }

    #[test]
    fn parallel_on_direct_wiring() {
        let action = phase_action();
        let spec = action.spec();
        let wire = max_entangled_projector(Subsystem::new(H1, 2), Subsystem::new(H0, 2)).unwrap();
        let wire2 = max_entangled_projector(Subsystem::new(H3, 2), Subsystem::new(H2, 2)).unwrap();
        let r = wire.tensor(&wire2).unwrap().permuted(&spec.names()).unwrap();
        let par = decompose_parallel(&r, &action).unwrap();
        assert_eq!(par.memory_dim, 4);
        assert!(par.c1.normalization_residual().unwrap() < 1e-10);
        assert!(par.c2.normalization_residual().unwrap() < 1e-10);
        for k in 0..5 {
            let phi = 0.7 * k as f64;
            let u = action.input.matrix(&GroupElement::Phase(phi)).unwrap();
            let lhs = insert_gate(&r, &u).unwrap();
            let rhs = par.apply(&u).unwrap();
            assert!(lhs.op.distance(&rhs.op).unwrap() < 1e-10);
            let direct = choi_of_unitary(&UnitaryGate::new(u, H0, H3).unwrap()).unwrap();
            assert!(lhs.op.distance(&direct.op).unwrap() < 1e-12);
        }
    }

    #[test]
    fn parallel_on_covariantized_random_comb() {
        let action = phase_action();
        let r = random_deterministic_comb(&action.spec(), &[2], 21).unwrap();
        assert!(matches!(decompose_parallel(&r, &action), Err(Error::NotCovariant(_))));
        let rc = covariantize(&r, &action, Quadrature::Exact { degree: 2 }).unwrap();
        let par = decompose_parallel(&rc, &action).unwrap();
        for k in 0..20 {
            let u = action.input.matrix(&GroupElement::Phase(0.31 * k as f64)).unwrap();
            assert!(insert_gate(&rc, &u).unwrap().op.distance(&par.apply(&u).unwrap().op).unwrap() < 1e-9);
        }
    }

    fn check_conversion(with: &ConcreteRep, without: &ConcreteRep, cands: &[Irrep], samples: Vec<GroupElement>) {
        let conv = multiplicity_conversion_combs(with, without, cands).unwrap();
        let f = CombSpec::two_comb(without.dim(), with.dim());
        let b = CombSpec::two_comb(with.dim(), without.dim());
        for (r, spec) in [(&conv.forward, &f), (&conv.backward, &b)] {
            assert!(comb_normalization_residuals(r, spec).unwrap().iter().all(|&x| x < 1e-10));
            if r.dim() <= 1024 {
                assert!(r.min_eigenvalue() > -1e-10);
            }
        }
        for g in samples {
            let (u, up) = (with.matrix(&g).unwrap(), without.matrix(&g).unwrap());
            let got = insert_gate(&conv.forward, &u).unwrap();
            let want = choi_of_unitary(&UnitaryGate::new(up.clone(), H0, H3).unwrap()).unwrap();
            assert!(got.op.distance(&want.op).unwrap() < 1e-9);
            let back = insert_gate(&conv.backward, &up).unwrap();
            let want = choi_of_unitary(&UnitaryGate::new(u.clone(), H0, H3).unwrap()).unwrap();
            assert!(back.op.distance(&want.op).unwrap() < 1e-9);
            let round = insert_channel(&conv.backward, &got.relabel(&[(H0, "x"), (H3, "y")]).unwrap()).unwrap();
            assert!(round.op.distance(&want.op).unwrap() < 1e-9);
        }
    }

    #[test]
    fn conversion_su2_three_qubits() {
        let q = ConcreteRep::direct_sum(vec![Irrep::spin(0.5)]).unwrap();
        let small = ConcreteRep::direct_sum(vec![Irrep::spin(1.5), Irrep::spin(0.5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let samples = (0..20).map(|_| GroupElement::su2(haar_special_unitary(2, &mut rng)).unwrap()).collect();
        check_conversion(&q.power(3), &small, &[Irrep::spin(1.5), Irrep::spin(0.5)], samples);
        let conv = multiplicity_conversion_combs(&q.power(3), &small, &[Irrep::spin(1.5), Irrep::spin(0.5)]).unwrap();
        assert_eq!(conv.memory_dim, 2);
    }

    #[test]
    fn conversion_u1_and_trivial() {
        let w = |k| Irrep::U1 { weight: k };
        let with = ConcreteRep::direct_sum(vec![w(0), w(1), w(0), w(1)]).unwrap();
        let without = ConcreteRep::direct_sum(vec![w(0), w(1)]).unwrap();
        let samples = (0..20).map(|k| GroupElement::Phase(0.4 * k as f64)).collect::<Vec<_>>();
        check_conversion(&with, &without, &[w(0), w(1)], samples.clone());
        check_conversion(&without, &without, &[w(0), w(1)], samples);
        let other = ConcreteRep::direct_sum(vec![w(0), w(2)]).unwrap();
        assert!(matches!(
            multiplicity_conversion_combs(&with, &other, &[w(0), w(1), w(2)]),
            Err(Error::IrrepMismatch(_))
        ));
    }
}

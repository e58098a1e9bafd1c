use crate::error::{Error, Result};
use crate::linalg::{cr, pairwise_sum_mat, Mat};

use super::haar::HaarNode;
use super::lie::{highest_weight_spaces, LieAction, WordBasis};
use super::{irrep_matrix, ConcreteRep, Irrep};

/// One copy of an irrep: an isometry from the irrep space into the ambient
/// space, tagged with the `(target irrep, input irrep)` sector it lives in.
#[derive(Clone, Debug)]
pub struct IrrepCopy {
    pub sector: (usize, usize),
    pub basis: Mat,
}

#[derive(Clone, Debug)]
pub struct IrrepBlock {
    pub irrep: Irrep,
    pub copies: Vec<IrrepCopy>,
}

impl IrrepBlock {
    pub fn multiplicity(&self) -> usize {
        self.copies.len()
    }

    /// Copy indices belonging to a sector.
    pub fn sector_copies(&self, sector: (usize, usize)) -> Vec<usize> {
        (0..self.copies.len()).filter(|&i| self.copies[i].sector == sector).collect()
    }

    /// `Π_K ⊗ I_{m_K}` on the ambient space.
    pub fn projector(&self) -> Mat {
        let n = self.copies[0].basis.nrows();
        let mut p = Mat::zeros(n, n);
        for c in &self.copies {
            p += &c.basis * c.basis.adjoint();
        }
        p
    }

    /// `Π_K ⊗ P` on the ambient space for a diagonal multiplicity operator
    /// with entries `diag`.
    pub fn projector_weighted(&self, diag: &[f64]) -> Mat {
        let n = self.copies[0].basis.nrows();
        let mut p = Mat::zeros(n, n);
        for (c, &w) in self.copies.iter().zip(diag) {
            if w != 0.0 {
                p += &c.basis * c.basis.adjoint() * cr(w);
            }
        }
        p
    }
}

/// Splitting of a representation space into irrep blocks with consistent
/// bases on every copy of the same irrep.
#[derive(Clone, Debug)]
pub struct IsotypicDecomposition {
    pub dim: usize,
    pub blocks: Vec<IrrepBlock>,
}

impl IsotypicDecomposition {
    pub fn block(&self, k: &Irrep) -> Option<&IrrepBlock> {
        self.blocks.iter().find(|b| &b.irrep == k)
    }

    pub fn multiplicity(&self, k: &Irrep) -> usize {
        self.block(k).map_or(0, IrrepBlock::multiplicity)
    }

    pub fn projector(&self, k: &Irrep) -> Result<Mat> {
        self.block(k).map(IrrepBlock::projector).ok_or_else(|| Error::MissingProjector(format!("{k}")))
    }

    /// Unitary whose columns run over blocks, then irrep components, then copies.
    pub fn basis_change(&self) -> Mat {
        let mut cols = Vec::with_capacity(self.dim);
        for b in &self.blocks {
            for i in 0..b.irrep.dim() {
                for c in &b.copies {
                    cols.push(c.basis.column(i).into_owned());
                }
            }
        }
        Mat::from_columns(&cols)
    }

    /// Column range of each block in [`basis_change`](Self::basis_change).
    pub fn offsets(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.blocks.len());
        let mut off = 0;
        for b in &self.blocks {
            out.push(off);
            off += b.irrep.dim() * b.multiplicity();
        }
        out
    }

    /// Span of all copies of `k` as one isometry (copy-major columns).
    pub fn isotypic_isometry(&self, k: &Irrep) -> Result<Mat> {
        let b = self.block(k).ok_or_else(|| Error::MissingProjector(format!("{k}")))?;
        let cols: Vec<_> = b.copies.iter().flat_map(|c| c.basis.column_iter().map(|v| v.into_owned())).collect();
        Ok(Mat::from_columns(&cols))
    }
}

fn decompose_in(
    action: &LieAction,
    sectors: &[((usize, usize), Option<Mat>)],
    group: super::GroupId,
    candidates: &[Irrep],
    dim: usize,
) -> Result<IsotypicDecomposition> {
    let mut found: Vec<(Irrep, Vec<((usize, usize), crate::linalg::Vector)>)> = Vec::new();
    for (sector, sub) in sectors {
        for space in highest_weight_spaces(action, sub.as_ref())? {
            let k = Irrep::from_highest_weight(group, &space.weight, candidates)?;
            let slot = match found.iter().position(|(x, _)| *x == k) {
                Some(i) => i,
                None => {
                    found.push((k, Vec::new()));
                    found.len() - 1
                }
            };
            for v in space.vectors.column_iter() {
                found[slot].1.push((*sector, v.into_owned()));
            }
        }
    }
    let rank = |x: &Irrep| candidates.iter().position(|c| c == x).unwrap_or(usize::MAX);
    found.sort_by(|(x, _), (y, _)| rank(x).cmp(&rank(y)).then(y.highest_weight().cmp(&x.highest_weight())));
    let mut blocks = Vec::with_capacity(found.len());
    for (k, hws) in found {
        let words = WordBasis::from_reference(action, &hws[0].1, k.dim())?;
        let copies = hws.iter().map(|(sector, v)| IrrepCopy { sector: *sector, basis: words.apply(action, v) }).collect();
        blocks.push(IrrepBlock { irrep: k, copies });
    }
    let total: usize = blocks.iter().map(|b| b.irrep.dim() * b.multiplicity()).sum();
    if total != dim {
        return Err(Error::VerificationFailed(format!("decomposition covers {total} of {dim} dimensions")));
    }
    Ok(IsotypicDecomposition { dim, blocks })
}

/// Isotypic decomposition of a concrete representation. Irreps are named by
/// the first candidate with matching highest weight.
pub fn isotypic_projectors(rep: &ConcreteRep, candidates: &[Irrep]) -> Result<IsotypicDecomposition> {
    let action = rep.lie_action()?;
    decompose_in(&action, &[((0, 0), None)], rep.group, candidates, rep.dim())
}

/// Decomposition of `V ⊗ U*` on `H_V ⊗ H_U`, split by sectors `(a, β)` of
/// target irrep `a` and input irrep `β`.
#[derive(Clone, Debug)]
pub struct SectorDecomposition {
    /// Target irreps with multiplicities `m_a`.
    pub targets: Vec<(Irrep, usize)>,
    /// Input irreps with multiplicities `m_β`.
    pub inputs: Vec<(Irrep, usize)>,
    pub target: IsotypicDecomposition,
    pub input: IsotypicDecomposition,
    pub joint: IsotypicDecomposition,
    pub target_dim: usize,
    pub input_dim: usize,
}

impl SectorDecomposition {
    pub fn sector_multiplicity(&self, k: &Irrep, a: usize, beta: usize) -> usize {
        self.joint.block(k).map_or(0, |b| b.sector_copies((a, beta)).len())
    }
}

pub fn decompose_with_conjugate(
    target: &ConcreteRep,
    input: &ConcreteRep,
    target_candidates: &[Irrep],
    input_candidates: &[Irrep],
    joint_candidates: &[Irrep],
) -> Result<SectorDecomposition> {
    if target.group != input.group {
        return Err(Error::UnsupportedGroup(format!("{} vs {}", target.group, input.group)));
    }
    let tdec = isotypic_projectors(target, target_candidates)?;
    let idec = isotypic_projectors(input, input_candidates)?;
    let joint_rep = target.tensor(&input.conjugate())?;
    let action = joint_rep.lie_action()?;
    let mut sectors = Vec::new();
    for (ia, a) in tdec.blocks.iter().enumerate() {
        let pa = tdec.isotypic_isometry(&a.irrep)?;
        for (ib, b) in idec.blocks.iter().enumerate() {
            let pb = idec.isotypic_isometry(&b.irrep)?.map(|z| z.conj());
            sectors.push(((ia, ib), Some(pa.kronecker(&pb))));
        }
    }
    let joint = decompose_in(&action, &sectors, target.group, joint_candidates, joint_rep.dim())?;
    Ok(SectorDecomposition {
        targets: tdec.blocks.iter().map(|b| (b.irrep, b.multiplicity())).collect(),
        inputs: idec.blocks.iter().map(|b| (b.irrep, b.multiplicity())).collect(),
        target: tdec,
        input: idec,
        joint,
        target_dim: target.dim(),
        input_dim: input.dim(),
    })
}

/// Character-weighted group average `d_K Σ_g w_g χ_K(g)* W_g`.
pub fn character_projector(rep: &ConcreteRep, k: &Irrep, nodes: &[HaarNode]) -> Result<Mat> {
    let n = rep.dim();
    let terms: Vec<Mat> = nodes
        .iter()
        .map(|node| {
            let chi = irrep_matrix(k, &node.element)?.trace();
            Ok(rep.matrix(&node.element)? * (chi.conj() * node.weight * k.dim() as f64))
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum_mat(&terms, n, n))
}

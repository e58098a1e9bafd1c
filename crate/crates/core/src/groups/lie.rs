use crate::error::{Error, Result};
use crate::linalg::{cr, hermitian_eigen, kernel_basis, lowdin, Mat, Vector};

use super::irrep::su2_power_generator;
use super::{ConcreteRep, GroupId, Irrep, RepFactor, SudTag};

/// Complexified Lie-algebra action of a concrete representation: Cartan
/// generators plus simple raising and lowering operators.
#[derive(Clone, Debug)]
pub struct LieAction {
    pub dim: usize,
    pub cartan: Vec<Mat>,
    pub raising: Vec<Mat>,
    pub lowering: Vec<Mat>,
}

fn unit(n: usize, i: usize, j: usize) -> Mat {
    let mut m = Mat::zeros(n, n);
    m[(i, j)] = cr(1.0);
    m
}

fn block_diag(blocks: &[Mat]) -> Mat {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = Mat::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    m
}

fn rank(group: GroupId) -> (usize, usize) {
    match group {
        GroupId::U1 => (1, 0),
        GroupId::SU2 => (1, 1),
        GroupId::SUd(d) => (d - 1, d - 1),
    }
}

fn irrep_generators(x: &Irrep) -> Result<(Vec<Mat>, Vec<Mat>, Vec<Mat>)> {
    match *x {
        Irrep::U1 { weight } => Ok((vec![Mat::from_element(1, 1, cr(weight as f64))], vec![], vec![])),
        Irrep::SU2 { two_j } => {
            let n = two_j as usize;
            let sz = Mat::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)]);
            Ok((
                vec![su2_power_generator(&sz, n)],
                vec![su2_power_generator(&unit(2, 0, 1), n)],
                vec![su2_power_generator(&unit(2, 1, 0), n)],
            ))
        }
        Irrep::SUd { d, tag } => {
            let r = d - 1;
            match tag {
                SudTag::Trivial => {
                    let z = || vec![Mat::zeros(1, 1); r];
                    Ok((z(), z(), z()))
                }
                SudTag::Defining | SudTag::Conjugate => {
                    let cartan: Vec<Mat> = (0..r).map(|i| unit(d, i, i) - unit(d, i + 1, i + 1)).collect();
                    let raising: Vec<Mat> = (0..r).map(|i| unit(d, i, i + 1)).collect();
                    let lowering: Vec<Mat> = (0..r).map(|i| unit(d, i + 1, i)).collect();
                    if tag == SudTag::Conjugate {
                        let dual = |v: Vec<Mat>| v.into_iter().map(|m| -m.transpose()).collect();
                        Ok((dual(cartan), dual(raising), dual(lowering)))
                    } else {
                        Ok((cartan, raising, lowering))
                    }
                }
                _ => Err(Error::UnsupportedGroup(format!("no direct generators for {x}"))),
            }
        }
    }
}

impl LieAction {
    fn of_factor(group: GroupId, f: &RepFactor) -> Result<Self> {
        let (nc, nr) = rank(group);
        let mut cartan = vec![Vec::new(); nc];
        let mut raising = vec![Vec::new(); nr];
        let mut lowering = vec![Vec::new(); nr];
        for x in &f.irreps {
            let (c, r, l) = irrep_generators(x)?;
            for (k, m) in c.into_iter().enumerate() {
                cartan[k].push(m);
            }
            for (k, m) in r.into_iter().enumerate() {
                raising[k].push(m);
            }
            for (k, m) in l.into_iter().enumerate() {
                lowering[k].push(m);
            }
        }
        let finish = |v: Vec<Vec<Mat>>| -> Vec<Mat> {
            v.iter()
                .map(|blocks| {
                    let m = block_diag(blocks);
                    if f.conjugate {
                        -m.transpose()
                    } else {
                        m
                    }
                })
                .collect()
        };
        let dim = f.irreps.iter().map(Irrep::dim).sum();
        Ok(Self { dim, cartan: finish(cartan), raising: finish(raising), lowering: finish(lowering) })
    }

    fn trivial(group: GroupId) -> Self {
        let (nc, nr) = rank(group);
        let z = |k| vec![Mat::zeros(1, 1); k];
        Self { dim: 1, cartan: z(nc), raising: z(nr), lowering: z(nr) }
    }

    /// Action on `self ⊗ other`: `X ⊗ I + I ⊗ Y` for each generator.
    pub fn tensor(&self, other: &Self) -> Self {
        let (ia, ib) = (Mat::identity(self.dim, self.dim), Mat::identity(other.dim, other.dim));
        let join = |a: &[Mat], b: &[Mat]| -> Vec<Mat> {
            a.iter().zip(b).map(|(x, y)| x.kronecker(&ib) + ia.kronecker(y)).collect()
        };
        Self {
            dim: self.dim * other.dim,
            cartan: join(&self.cartan, &other.cartan),
            raising: join(&self.raising, &other.raising),
            lowering: join(&self.lowering, &other.lowering),
        }
    }

    pub fn of_rep(rep: &ConcreteRep) -> Result<Self> {
        let mut acc = Self::trivial(rep.group);
        for f in &rep.factors {
            acc = acc.tensor(&Self::of_factor(rep.group, f)?);
        }
        Ok(acc)
    }
}

/// Orthonormal highest-weight vectors sharing one weight.
#[derive(Clone, Debug)]
pub struct WeightSpace {
    pub weight: Vec<i64>,
    pub vectors: Mat,
}

const GENERIC: [f64; 8] = [1.0, std::f64::consts::SQRT_2, 1.732_050_807_568_877, 2.236_067_977_499_79,
    2.645_751_311_064_591, 3.316_624_790_355_4, 3.605_551_275_463_989, 4.123_105_625_617_661];

/// Highest-weight vectors of `action` inside the invariant subspace spanned
/// by the orthonormal columns of `sub` (whole space when `None`), grouped by
/// weight, highest weight first.
pub fn highest_weight_spaces(action: &LieAction, sub: Option<&Mat>) -> Result<Vec<WeightSpace>> {
    let s = sub.cloned().unwrap_or_else(|| Mat::identity(action.dim, action.dim));
    if s.nrows() != action.dim {
        return Err(Error::InvalidDimensions(format!("subspace rows {} vs rep dim {}", s.nrows(), action.dim)));
    }
    let hw = if action.raising.is_empty() {
        s.clone()
    } else {
        let n = s.ncols();
        let blocks: Vec<Mat> = action.raising.iter().map(|e| e * &s).collect();
        let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
        let mut stack = Mat::zeros(rows, n);
        let mut off = 0;
        for b in &blocks {
            stack.view_mut((off, 0), (b.nrows(), n)).copy_from(b);
            off += b.nrows();
        }
        &s * kernel_basis(&stack, 1e-6)
    };
    if hw.ncols() == 0 {
        return Ok(Vec::new());
    }
    if action.cartan.len() > GENERIC.len() {
        return Err(Error::UnsupportedGroup("rank too large for the weight engine".into()));
    }
    let restricted: Vec<Mat> = action.cartan.iter().map(|h| hw.adjoint() * h * &hw).collect();
    let mut generic = Mat::zeros(hw.ncols(), hw.ncols());
    for (h, t) in restricted.iter().zip(GENERIC) {
        generic += h * cr(t);
    }
    let (_, vecs) = hermitian_eigen(&generic);
    let mut spaces: Vec<WeightSpace> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::new();
    for k in 0..vecs.ncols() {
        let v = vecs.column(k);
        let mut weight = Vec::with_capacity(restricted.len());
        for h in &restricted {
            let w = (v.adjoint() * h * v)[(0, 0)].re;
            if (w - w.round()).abs() > 1e-6 {
                return Err(Error::VerificationFailed(format!("non-integral weight {w}")));
            }
            weight.push(w.round() as i64);
        }
        match spaces.iter().position(|s| s.weight == weight) {
            Some(i) => members[i].push(k),
            None => {
                spaces.push(WeightSpace { weight, vectors: Mat::zeros(0, 0) });
                members.push(vec![k]);
            }
        }
    }
    for (space, cols) in spaces.iter_mut().zip(&members) {
        let sel = Mat::from_fn(vecs.nrows(), cols.len(), |i, j| vecs[(i, cols[j])]);
        space.vectors = &hw * sel;
    }
    spaces.sort_by(|a, b| b.weight.cmp(&a.weight));
    Ok(spaces)
}

/// A fixed set of lowering words and a Löwdin matrix turning any normalized
/// highest-weight vector of one irrep into an orthonormal basis of its
/// orbit. Applying the same words and matrix to different copies yields
/// identical representing matrices on every copy.
#[derive(Clone, Debug)]
pub struct WordBasis {
    pub words: Vec<Vec<usize>>,
    pub lowdin: Mat,
}

fn apply_word(action: &LieAction, word: &[usize], hw: &Vector) -> Vector {
    word.iter().fold(hw.clone(), |v, &l| &action.lowering[l] * v)
}

impl WordBasis {
    pub fn from_reference(action: &LieAction, hw: &Vector, dim: usize) -> Result<Self> {
        let mut words: Vec<Vec<usize>> = vec![Vec::new()];
        let mut vectors: Vec<Vector> = vec![hw.clone()];
        let mut ortho: Vec<Vector> = vec![hw.normalize()];
        let mut head = 0;
        while words.len() < dim && head < words.len() {
            for l in 0..action.lowering.len() {
                if words.len() == dim {
                    break;
                }
                let v = &action.lowering[l] * &vectors[head];
                let norm = v.norm();
                if norm < 1e-10 {
                    continue;
                }
                let mut r = v.clone();
                for q in &ortho {
                    let overlap = q.dotc(&r);
                    r -= q * overlap;
                }
                if r.norm() > 1e-8 * norm {
                    ortho.push(r.normalize());
                    let mut w = words[head].clone();
                    w.push(l);
                    words.push(w);
                    vectors.push(v);
                }
            }
            head += 1;
        }
        if words.len() != dim {
            return Err(Error::VerificationFailed(format!(
                "orbit of highest-weight vector spans {} dimensions, expected {dim}",
                words.len()
            )));
        }
        let w = Mat::from_columns(&vectors);
        Ok(Self { words, lowdin: lowdin(&w) })
    }

    pub fn apply(&self, action: &LieAction, hw: &Vector) -> Mat {
        let cols: Vec<Vector> = self.words.iter().map(|w| apply_word(action, w, hw)).collect();
        Mat::from_columns(&cols) * &self.lowdin
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{irrep_matrix, GroupElement};
    use crate::linalg::{haar_special_unitary, is_isometry};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn su2_two_qubits() {
        let q = ConcreteRep::direct_sum(vec![Irrep::spin(0.5)]).unwrap().power(2);
        let a = q.lie_action().unwrap();
        let spaces = highest_weight_spaces(&a, None).unwrap();
        let w: Vec<_> = spaces.iter().map(|s| (s.weight.clone(), s.vectors.ncols())).collect();
        assert_eq!(w, vec![(vec![2], 1), (vec![0], 1)]);
    }

    #[test]
    fn copies_share_representing_matrices() {
        let q = ConcreteRep::direct_sum(vec![Irrep::spin(0.5)]).unwrap().power(3);
        let a = q.lie_action().unwrap();
        let spaces = highest_weight_spaces(&a, None).unwrap();
        let half = spaces.iter().find(|s| s.weight == vec![1]).unwrap();
        assert_eq!(half.vectors.ncols(), 2);
        let v0 = half.vectors.column(0).into_owned();
        let v1 = half.vectors.column(1).into_owned();
        let wb = WordBasis::from_reference(&a, &v0, 2).unwrap();
        let (b0, b1) = (wb.apply(&a, &v0), wb.apply(&a, &v1));
        assert!(is_isometry(&b0, 1e-12) && is_isometry(&b1, 1e-12));
        assert!((b0.adjoint() * &b1).norm() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = GroupElement::su2(haar_special_unitary(2, &mut rng)).unwrap();
        let m = q.matrix(&g).unwrap();
        let (r0, r1) = (b0.adjoint() * &m * &b0, b1.adjoint() * &m * &b1);
        assert!((&r0 - &r1).norm() < 1e-10);
        assert!((r0 - irrep_matrix(&Irrep::spin(0.5), &g).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn sud_sym_times_conjugate() {
        for d in 2..5 {
            let def = Irrep::SUd { d, tag: SudTag::Defining };
            let rep = ConcreteRep::new(
                GroupId::SUd(d),
                vec![
                    RepFactor { irreps: vec![def], conjugate: false },
                    RepFactor { irreps: vec![def], conjugate: false },
                    RepFactor { irreps: vec![def], conjugate: true },
                ],
            )
            .unwrap();
            let a = rep.lie_action().unwrap();
            let spaces = highest_weight_spaces(&a, None).unwrap();
            let total: usize = spaces
                .iter()
                .map(|s| {
                    let x = Irrep::from_highest_weight(GroupId::SUd(d), &s.weight, &[]).unwrap();
                    x.dim() * s.vectors.ncols()
                })
                .sum();
            assert_eq!(total, d * d * d);
        }
    }
}

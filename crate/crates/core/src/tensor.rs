//! Label-indexed dense operators: tensor products, partial traces, partial
//! transposes, reordering and the operator/double-ket correspondence.
//!
//! Every operator carries an ordered list of named subsystems. The matrix is
//! indexed in row-major Kronecker order: the first label is the most
//! significant digit of a flat index. All transposes refer to the
//! computational basis of each subsystem.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{cr, Mat, Vector, C64};

/// A named Hilbert space factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subsystem {
    pub name: String,
    pub dim: usize,
}

impl Subsystem {
    pub fn new(name: impl Into<String>, dim: usize) -> Self {
        assert!(dim >= 1, "subsystem dimension must be positive");
        Self { name: name.into(), dim }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.dim)
    }
}

/// A square complex matrix acting on an ordered tensor product of subsystems.
#[derive(Clone, Debug, PartialEq)]
pub struct LabeledOperator {
    labels: Vec<Subsystem>,
    matrix: Mat,
}

fn total_dim(labels: &[Subsystem]) -> usize {
    labels.iter().map(|l| l.dim).product()
}

fn check_unique(labels: &[Subsystem]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l.name.as_str()) {
            return Err(Error::DuplicateLabel(l.name.clone()));
        }
    }
    Ok(())
}

/// Flat-index map for a reordering: `map[new_index] = old_index`, where the
/// new order lists positions of the old labels.
fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let n: usize = dims.iter().product();
    let mut old_strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        old_strides[k] = old_strides[k + 1] * dims[k + 1];
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut map = vec![0usize; n];
    let mut digits = vec![0usize; perm.len()];
    for (idx, slot) in map.iter_mut().enumerate() {
        let mut rem = idx;
        for k in (0..perm.len()).rev() {
            digits[k] = rem % new_dims[k];
            rem /= new_dims[k];
        }
        *slot = perm.iter().zip(&digits).map(|(&p, &d)| d * old_strides[p]).sum();
    }
    map
}

impl LabeledOperator {
    pub fn new(labels: Vec<Subsystem>, matrix: Mat) -> Result<Self> {
        check_unique(&labels)?;
        let n = total_dim(&labels);
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidDimensions(format!(
                "matrix is {}x{} but labels span dimension {n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { labels, matrix })
    }

    pub fn identity(labels: Vec<Subsystem>) -> Result<Self> {
        let n = total_dim(&labels);
        Self::new(labels, Mat::identity(n, n))
    }

    /// A 1×1 operator on no subsystems.
    pub fn scalar(value: C64) -> Self {
        Self { labels: Vec::new(), matrix: Mat::from_element(1, 1, value) }
    }

    pub fn labels(&self) -> &[Subsystem] {
        &self.labels
    }

    pub fn label_names(&self) -> Vec<&str> {
        self.labels.iter().map(|l| l.name.as_str()).collect()
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn has_label(&self, name: &str) -> bool {
        self.labels.iter().any(|l| l.name == name)
    }

    pub fn label(&self, name: &str) -> Result<&Subsystem> {
        Ok(&self.labels[self.position(name)?])
    }

    pub fn dim_of(&self, names: &[&str]) -> Result<usize> {
        names.iter().map(|n| self.label(n).map(|l| l.dim)).product()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { labels: self.labels.clone(), matrix: &self.matrix * s }
    }

    pub fn adjoint(&self) -> Self {
        Self { labels: self.labels.clone(), matrix: self.matrix.adjoint() }
    }

    /// Sum of two operators on the same label set; `other` is aligned first.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let aligned = other.aligned_to(self)?;
        Ok(Self { labels: self.labels.clone(), matrix: &self.matrix + aligned.matrix })
    }

    /// `other` reordered to this operator's label order.
    pub fn aligned_to(&self, reference: &Self) -> Result<Self> {
        let names = reference.label_names();
        let out = self.permuted(&names)?;
        if out.labels != reference.labels {
            return Err(Error::LabelMismatch(format!(
                "{:?} vs {:?}",
                self.label_names(),
                reference.label_names()
            )));
        }
        Ok(out)
    }

    /// Frobenius distance after aligning label orders.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        let aligned = other.aligned_to(self)?;
        Ok((&self.matrix - aligned.matrix).norm())
    }

    pub fn relabel(&self, from: &str, to: &str) -> Result<Self> {
        let pos = self.position(from)?;
        let mut labels = self.labels.clone();
        labels[pos].name = to.to_string();
        check_unique(&labels)?;
        Ok(Self { labels, matrix: self.matrix.clone() })
    }

    pub fn relabel_many(&self, pairs: &[(&str, &str)]) -> Result<Self> {
        let mut labels = self.labels.clone();
        for (from, to) in pairs {
            let pos = self.position(from)?;
            labels[pos].name = to.to_string();
        }
        check_unique(&labels)?;
        Ok(Self { labels, matrix: self.matrix.clone() })
    }

    /// Reorders the tensor factors; `new_order` must list every label exactly once.
    pub fn permuted(&self, new_order: &[&str]) -> Result<Self> {
        if new_order.len() != self.labels.len() {
            return Err(Error::NotAPermutation);
        }
        let mut perm = Vec::with_capacity(new_order.len());
        let mut seen = HashSet::new();
        for name in new_order {
            let p = self.position(name)?;
            if !seen.insert(p) {
                return Err(Error::NotAPermutation);
            }
            perm.push(p);
        }
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return Ok(self.clone());
        }
        let dims: Vec<usize> = self.labels.iter().map(|l| l.dim).collect();
        let map = permutation_map(&dims, &perm);
        let n = self.dim();
        let matrix = Mat::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        Ok(Self { labels, matrix })
    }

    /// Kronecker product `self ⊗ other`; label sets must be disjoint.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        check_unique(&labels)?;
        Ok(Self { labels, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Partial trace over the named subsystems; remaining labels keep their
    /// relative order.
    pub fn partial_trace(&self, over: &[&str]) -> Result<Self> {
        for name in over {
            self.position(name)?;
        }
        let keep: Vec<&str> =
            self.labels.iter().map(|l| l.name.as_str()).filter(|n| !over.contains(n)).collect();
        let mut order = keep.clone();
        order.extend(over.iter().copied());
        let p = self.permuted(&order)?;
        let dk: usize = keep.iter().map(|n| self.label(n).unwrap().dim).product();
        let dt = self.dim() / dk;
        let matrix = Mat::from_fn(dk, dk, |i, j| {
            (0..dt).map(|t| p.matrix[(i * dt + t, j * dt + t)]).sum::<C64>()
        });
        let labels = keep.iter().map(|n| self.label(n).unwrap().clone()).collect();
        Ok(Self { labels, matrix })
    }

    /// Transposition on the named factors only.
    pub fn partial_transpose(&self, over: &[&str]) -> Result<Self> {
        let positions: Vec<usize> = over.iter().map(|n| self.position(n)).collect::<Result<_>>()?;
        if positions.is_empty() {
            return Ok(self.clone());
        }
        let dims: Vec<usize> = self.labels.iter().map(|l| l.dim).collect();
        let k = dims.len();
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        let n = self.dim();
        let digit = |idx: usize, pos: usize| (idx / strides[pos]) % dims[pos];
        let matrix = Mat::from_fn(n, n, |i, j| {
            let (mut si, mut sj) = (i, j);
            for &pos in &positions {
                let (di, dj) = (digit(i, pos), digit(j, pos));
                si = si - di * strides[pos] + dj * strides[pos];
                sj = sj - dj * strides[pos] + di * strides[pos];
            }
            self.matrix[(si, sj)]
        });
        Ok(Self { labels: self.labels.clone(), matrix })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).norm() <= tol
    }

    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_eigenvalue(&self.matrix)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        crate::linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// Vectorization `Σ ⟨n|A|m⟩ |n⟩|m⟩` with row labels then column labels.
    pub fn double_ket(&self, column_labels: Vec<Subsystem>) -> Result<DoubleKet> {
        DoubleKet::from_operator(self, column_labels)
    }
}

/// A vectorized operator `|A⟩⟩`, carrying the row-space and column-space labels.
#[derive(Clone, Debug, PartialEq)]
pub struct DoubleKet {
    pub rows: Vec<Subsystem>,
    pub cols: Vec<Subsystem>,
    pub vector: Vector,
}

impl DoubleKet {
    /// Builds `|A⟩⟩` for a (possibly rectangular) matrix. Row index is the most
    /// significant digit.
    pub fn from_matrix(rows: Vec<Subsystem>, cols: Vec<Subsystem>, a: &Mat) -> Result<Self> {
        let (dr, dc) = (total_dim(&rows), total_dim(&cols));
        if a.nrows() != dr || a.ncols() != dc {
            return Err(Error::InvalidDimensions(format!(
                "matrix {}x{} vs labels {dr}x{dc}",
                a.nrows(),
                a.ncols()
            )));
        }
        let mut all = rows.clone();
        all.extend(cols.iter().cloned());
        check_unique(&all)?;
        let vector = Vector::from_fn(dr * dc, |k, _| a[(k / dc, k % dc)]);
        Ok(Self { rows, cols, vector })
    }

    /// `|A⟩⟩` for a square labeled operator whose column space is renamed to `column_labels`.
    pub fn from_operator(a: &LabeledOperator, column_labels: Vec<Subsystem>) -> Result<Self> {
        let dims_a: Vec<usize> = a.labels.iter().map(|l| l.dim).collect();
        let dims_c: Vec<usize> = column_labels.iter().map(|l| l.dim).collect();
        if dims_a != dims_c {
            return Err(Error::LabelMismatch("column labels must mirror the row labels".into()));
        }
        Self::from_matrix(a.labels.clone(), column_labels, &a.matrix)
    }

    /// Inverse of the vectorization.
    pub fn to_matrix(&self) -> Mat {
        let (dr, dc) = (total_dim(&self.rows), total_dim(&self.cols));
        Mat::from_fn(dr, dc, |i, j| self.vector[i * dc + j])
    }

    /// Inverse of the vectorization for a square operator, keeping the row labels.
    pub fn to_operator(&self) -> Result<LabeledOperator> {
        LabeledOperator::new(self.rows.clone(), self.to_matrix())
    }

    /// The rank-one operator `|A⟩⟩⟨⟨A|` on rows ⊗ cols.
    pub fn projector(&self) -> LabeledOperator {
        let mut labels = self.rows.clone();
        labels.extend(self.cols.iter().cloned());
        let matrix = &self.vector * self.vector.adjoint();
        LabeledOperator { labels, matrix }
    }
}

/// `|I⟩⟩⟨⟨I|` between two equally sized subsystems.
pub fn max_entangled_projector(a: Subsystem, b: Subsystem) -> Result<LabeledOperator> {
    if a.dim != b.dim {
        return Err(Error::DimMismatch { name: format!("{}/{}", a.name, b.name), left: a.dim, right: b.dim });
    }
    let id = Mat::identity(a.dim, a.dim);
    Ok(DoubleKet::from_matrix(vec![a], vec![b], &id)?.projector())
}

/// Convenience: operator on a single subsystem.
pub fn single(name: &str, m: Mat) -> Result<LabeledOperator> {
    let d = m.nrows();
    LabeledOperator::new(vec![Subsystem::new(name, d)], m)
}

pub fn zeros(labels: Vec<Subsystem>) -> Result<LabeledOperator> {
    let n = total_dim(&labels);
    LabeledOperator::new(labels, Mat::from_element(n, n, cr(0.0)))
}

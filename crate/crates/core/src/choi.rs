//! Choi operators, the link product and channel-level utilities.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::linalg::{cr, hermitian_eigenvalues, is_unitary, psd_sqrt, Mat, PSD_TOL};
use crate::tensor::{DoubleKet, LabeledOperator, Subsystem};

/// A unitary matrix with named input and output wires.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryGate {
    pub matrix: Mat,
    pub input: Subsystem,
    pub output: Subsystem,
}

impl UnitaryGate {
    pub fn new(matrix: Mat, input: &str, output: &str) -> Result<Self> {
        let dev = (matrix.adjoint() * &matrix - Mat::identity(matrix.ncols(), matrix.ncols())).norm();
        if !matrix.is_square() || dev > PSD_TOL {
            return Err(Error::NotUnitary(dev));
        }
        let d = matrix.nrows();
        Ok(Self { matrix, input: Subsystem::new(input, d), output: Subsystem::new(output, d) })
    }
}

/// A Choi operator together with its input/output partition of labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ChoiOperator {
    pub op: LabeledOperator,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl ChoiOperator {
    pub fn new(op: LabeledOperator, inputs: &[&str], outputs: &[&str]) -> Result<Self> {
        let mut all: Vec<&str> = inputs.to_vec();
        all.extend_from_slice(outputs);
        if all.len() != op.labels().len() {
            return Err(Error::LabelMismatch("inputs and outputs must partition the labels".into()));
        }
        for name in &all {
            op.position(name)?;
        }
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::LabelMismatch("inputs and outputs overlap".into()));
        }
        Ok(Self {
            op,
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
        })
    }

    fn names(list: &[String]) -> Vec<&str> {
        list.iter().map(String::as_str).collect()
    }

    pub fn input_names(&self) -> Vec<&str> {
        Self::names(&self.inputs)
    }

    pub fn output_names(&self) -> Vec<&str> {
        Self::names(&self.outputs)
    }

    pub fn input_dim(&self) -> usize {
        self.op.dim_of(&self.input_names()).unwrap_or(1)
    }

    pub fn output_dim(&self) -> usize {
        self.op.dim_of(&self.output_names()).unwrap_or(1)
    }

    /// Frobenius norm of `Tr_out[C] − I_in`.
    pub fn normalization_residual(&self) -> Result<f64> {
        let reduced = self.op.partial_trace(&self.output_names())?.permuted(&self.input_names())?;
        let n = reduced.dim();
        Ok((reduced.matrix() - Mat::identity(n, n)).norm())
    }

    pub fn is_channel(&self, tol: f64) -> bool {
        self.op.min_eigenvalue() >= -tol && self.normalization_residual().map(|r| r <= tol).unwrap_or(false)
    }

    pub fn relabel(&self, pairs: &[(&str, &str)]) -> Result<Self> {
        let op = self.op.relabel_many(pairs)?;
        let map: HashMap<&str, &str> = pairs.iter().copied().collect();
        let rename = |v: &[String]| -> Vec<String> {
            v.iter().map(|s| map.get(s.as_str()).map_or_else(|| s.clone(), |t| t.to_string())).collect()
        };
        Ok(Self { op, inputs: rename(&self.inputs), outputs: rename(&self.outputs) })
    }
}

/// `|U⟩⟩⟨⟨U|` on out ⊗ in.
pub fn choi_of_unitary(u: &UnitaryGate) -> Result<ChoiOperator> {
    if !is_unitary(&u.matrix, PSD_TOL) {
        let n = u.matrix.ncols();
        return Err(Error::NotUnitary((u.matrix.adjoint() * &u.matrix - Mat::identity(n, n)).norm()));
    }
    let ket = DoubleKet::from_matrix(vec![u.output.clone()], vec![u.input.clone()], &u.matrix)?;
    ChoiOperator::new(ket.projector(), &[&u.input.name], &[&u.output.name])
}

/// `Σ_i |K_i⟩⟩⟨⟨K_i|` on out ⊗ in.
pub fn choi_of_kraus(kraus: &[Mat], input: Subsystem, output: Subsystem) -> Result<ChoiOperator> {
    let n = output.dim * input.dim;
    let mut m = Mat::zeros(n, n);
    for k in kraus {
        let ket = DoubleKet::from_matrix(vec![output.clone()], vec![input.clone()], k)?;
        m += &ket.vector * ket.vector.adjoint();
    }
    let (i, o) = (input.name.clone(), output.name.clone());
    ChoiOperator::new(LabeledOperator::new(vec![output, input], m)?, &[&i], &[&o])
}

/// `Tr_in[(I_out ⊗ ρᵀ) C]`.
pub fn apply_channel(c: &ChoiOperator, rho: &LabeledOperator) -> Result<LabeledOperator> {
    let mut want = c.input_names();
    want.sort_unstable();
    let mut have = rho.label_names();
    have.sort_unstable();
    if want != have {
        return Err(Error::LabelMismatch(format!("state labels {have:?} vs channel inputs {want:?}")));
    }
    let out = link_product(rho, &c.op)?;
    out.permuted(&c.output_names())
}

/// Link product `M * N = Tr_S[(I ⊗ M^{T_S})(I ⊗ N)]` over the labels `S`
/// shared by name. The result carries M's remaining labels followed by N's.
pub fn link_product(m: &LabeledOperator, n: &LabeledOperator) -> Result<LabeledOperator> {
    let mut shared = Vec::new();
    for l in m.labels() {
        if let Ok(other) = n.label(&l.name) {
            if other.dim != l.dim {
                return Err(Error::DimMismatch { name: l.name.clone(), left: l.dim, right: other.dim });
            }
            shared.push(l.name.as_str());
        }
    }
    let mx: Vec<&str> = m.label_names().into_iter().filter(|x| !shared.contains(x)).collect();
    let ny: Vec<&str> = n.label_names().into_iter().filter(|x| !shared.contains(x)).collect();

    let mut m_order = mx.clone();
    m_order.extend(&shared);
    let mut n_order: Vec<&str> = shared.clone();
    n_order.extend(&ny);
    let ma = m.permuted(&m_order)?;
    let nb = n.permuted(&n_order)?;

    let ds: usize = shared.iter().map(|s| m.label(s).unwrap().dim).product();
    let dx = ma.dim() / ds;
    let dy = nb.dim() / ds;
    let (mm, nm) = (ma.matrix(), nb.matrix());

    // A[(x,x'),(s',s)] = M[(x,s'),(x',s)],  B[(s',s),(y,y')] = N[(s',y),(s,y')]
    let a = Mat::from_fn(dx * dx, ds * ds, |r, col| {
        let (x, xp) = (r / dx, r % dx);
        let (sp, s) = (col / ds, col % ds);
        mm[(x * ds + sp, xp * ds + s)]
    });
    let b = Mat::from_fn(ds * ds, dy * dy, |r, col| {
        let (sp, s) = (r / ds, r % ds);
        let (y, yp) = (col / dy, col % dy);
        nm[(sp * dy + y, s * dy + yp)]
    });
    let ab = a * b;
    let out = Mat::from_fn(dx * dy, dx * dy, |r, col| {
        let (x, y) = (r / dy, r % dy);
        let (xp, yp) = (col / dy, col % dy);
        ab[(x * dx + xp, y * dy + yp)]
    });
    let mut labels: Vec<Subsystem> = mx.iter().map(|s| m.label(s).unwrap().clone()).collect();
    labels.extend(ny.iter().map(|s| n.label(s).unwrap().clone()));
    LabeledOperator::new(labels, out)
}

/// Left-to-right link product of a list; rejects labels shared by three or
/// more operators.
pub fn link_chain(ops: &[LabeledOperator]) -> Result<LabeledOperator> {
    let mut count: HashMap<&str, usize> = HashMap::new();
    for op in ops {
        for l in op.labels() {
            *count.entry(l.name.as_str()).or_default() += 1;
        }
    }
    if let Some((name, _)) = count.iter().find(|(_, &c)| c > 2) {
        return Err(Error::TripleSharedLabel(name.to_string()));
    }
    let mut acc = LabeledOperator::scalar(cr(1.0));
    for op in ops {
        acc = link_product(&acc, op)?;
    }
    Ok(acc)
}

/// Choi operator of the sequential composition `second ∘ first`. Outputs of
/// `first` are connected positionally to inputs of `second`.
pub fn compose(first: &ChoiOperator, second: &ChoiOperator) -> Result<ChoiOperator> {
    if first.outputs.len() != second.inputs.len() {
        return Err(Error::LabelMismatch("output/input wire count differs".into()));
    }
    let wires: Vec<String> = (0..first.outputs.len()).map(|k| format!("#link{k}")).collect();
    let f_pairs: Vec<(&str, &str)> =
        first.outputs.iter().zip(&wires).map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let s_pairs: Vec<(&str, &str)> =
        second.inputs.iter().zip(&wires).map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let f = first.op.relabel_many(&f_pairs)?;
    let s = second.op.relabel_many(&s_pairs)?;
    let joined = link_product(&f, &s)?;
    let mut order = second.output_names();
    order.extend(first.input_names());
    ChoiOperator::new(joined.permuted(&order)?, &first.input_names(), &second.output_names())
}

/// Equal classical mixture of the two causal orders, `½ C∘D + ½ D∘C`.
pub fn switch_mixture(c: &ChoiOperator, d: &ChoiOperator) -> Result<ChoiOperator> {
    if c.inputs != d.inputs || c.outputs != d.outputs {
        return Err(Error::LabelMismatch("switch needs channels on the same wires".into()));
    }
    let cd = compose(d, c)?;
    let dc = compose(c, d)?;
    let sum = cd.op.add(&dc.op)?.scale(cr(0.5));
    ChoiOperator::new(sum, &c.input_names(), &c.output_names())
}

/// Eigenvalues below this fraction of the largest are treated as rounding
/// noise when taking the outer square root.
const ROUNDING_FLOOR: f64 = 1e-14;

/// Channel fidelity `(Tr √(√C D √C))² / d₀²` with `d₀` the input dimension.
pub fn channel_fidelity(c: &ChoiOperator, d: &ChoiOperator) -> Result<f64> {
    let dd = d.op.aligned_to(&c.op)?;
    let sc = psd_sqrt(c.op.matrix())?;
    psd_sqrt(dd.matrix())?;
    let inner = &sc * dd.matrix() * &sc;
    let values = hermitian_eigenvalues(&inner);
    let top = values.last().copied().unwrap_or(0.0).max(0.0);
    let root: f64 = values.iter().filter(|&&v| v > ROUNDING_FLOOR * top).map(|v| v.sqrt()).sum();
    let d0 = c.input_dim() as f64;
    Ok(root.powi(2) / (d0 * d0))
}

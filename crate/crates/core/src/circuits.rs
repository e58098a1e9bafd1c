//! Kraus-level simulation of the 1→2 phase-gate cloning circuit and of the
//! low-memory isometry realization, plus the comb they both implement.
//!
//! Wires are named subsystems. A simulated network is tracked as a list of
//! Kraus operators from the input wires to the current register, so
//! measurements, discarded wires and classically controlled isometries all
//! stay exact.

use crate::builder::{build_optimal_comb, OptimalComb, Task};
use crate::choi::{channel_fidelity, choi_of_kraus, choi_of_unitary, ChoiOperator, UnitaryGate};
use crate::combs::{insert_gate, H0, H1, H3};
use crate::error::{Error, Result};
use crate::linalg::{c, cr, identity, is_isometry, kron, pairwise_sum, Mat};
use crate::reduced::{phase_clone_problem, solve};
use crate::tensor::Subsystem;

/// Columns of every isometry must be orthonormal to this tolerance.
pub const ISOMETRY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum GateKind {
    Hadamard,
    /// Wires: control, target.
    Cnot,
    /// Wires: control, target.
    Cz,
    /// Wires: control, control, target.
    Toffoli,
    /// Wires: control, target.
    ControlledHadamard,
    /// `diag(1, e^{iφ})`.
    PhaseGate(f64),
    /// Fresh wire prepared in `|0⟩`.
    Prepare(usize),
    /// Computational-basis measurement; the wire stays as a classical record.
    Measure,
    /// Trace out the wires.
    Discard,
    /// Isometry from the listed wires onto `out`.
    Isometry { matrix: Mat, out: Vec<Subsystem> },
    /// First wire selects branch `i`; each branch is an isometry from the
    /// remaining wires onto `out`.
    Select { branches: Vec<Mat>, out: Vec<Subsystem> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub wires: Vec<String>,
}

impl GateOp {
    pub fn new(kind: GateKind, wires: &[&str]) -> Self {
        Self { kind, wires: wires.iter().map(|w| w.to_string()).collect() }
    }

    pub fn isometry(matrix: Mat, wires: &[&str], out: Vec<Subsystem>) -> Result<Self> {
        check_isometry(&matrix, &out)?;
        Ok(Self::new(GateKind::Isometry { matrix, out }, wires))
    }

    pub fn select(branches: Vec<Mat>, wires: &[&str], out: Vec<Subsystem>) -> Result<Self> {
        for b in &branches {
            check_isometry(b, &out)?;
        }
        Ok(Self::new(GateKind::Select { branches, out }, wires))
    }
}

fn check_isometry(m: &Mat, out: &[Subsystem]) -> Result<()> {
    let rows: usize = out.iter().map(|s| s.dim).product();
    if m.nrows() != rows {
        return Err(Error::InvalidDimensions(format!("isometry has {} rows, outputs need {rows}", m.nrows())));
    }
    if !is_isometry(m, ISOMETRY_TOL) {
        let n = m.ncols();
        return Err(Error::NotUnitary((m.adjoint() * m - identity(n)).norm()));
    }
    Ok(())
}

/// A channel given by Kraus operators between ordered wire lists.
#[derive(Clone, Debug)]
pub struct SimulatedChannel {
    pub kraus: Vec<Mat>,
    pub input: Vec<Subsystem>,
    pub output: Vec<Subsystem>,
}

impl SimulatedChannel {
    /// Frobenius norm of `Σ K†K − I`.
    pub fn completeness_residual(&self) -> f64 {
        let n: usize = self.input.iter().map(|s| s.dim).product();
        let mut sum = -identity(n);
        for k in &self.kraus {
            sum += k.adjoint() * k;
        }
        sum.norm()
    }

    /// Choi operator with the input wires merged into `input` and the output
    /// wires merged into `output`.
    pub fn choi(&self, input: &str, output: &str) -> Result<ChoiOperator> {
        let din = self.input.iter().map(|s| s.dim).product();
        let dout = self.output.iter().map(|s| s.dim).product();
        choi_of_kraus(&self.kraus, Subsystem::new(input, din), Subsystem::new(output, dout))
    }
}

fn hadamard() -> Mat {
    let s = cr(std::f64::consts::FRAC_1_SQRT_2);
    Mat::from_row_slice(2, 2, &[s, s, s, -s])
}

fn phase_gate(phi: f64) -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(1.0), c(phi.cos(), phi.sin())]))
}

fn controlled(u: &Mat, controls: u32) -> Mat {
    let n = 1usize << controls;
    let d = u.nrows();
    let mut m = identity(n * d);
    m.view_mut(((n - 1) * d, (n - 1) * d), (d, d)).copy_from(u);
    m
}

fn pauli_x() -> Mat {
    Mat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

fn pauli_z() -> Mat {
    Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![cr(1.0), cr(-1.0)]))
}

/// `P[new, old] = 1` for the reordering of `dims` that lists old positions `order`.
fn reorder(dims: &[usize], order: &[usize]) -> Mat {
    let n: usize = dims.iter().product();
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let mut p = Mat::zeros(n, n);
    for new in 0..n {
        let mut rem = new;
        let mut old = 0;
        for &pos in order.iter().rev() {
            old += (rem % dims[pos]) * strides[pos];
            rem /= dims[pos];
        }
        p[(new, old)] = cr(1.0);
    }
    p
}

struct Register {
    wires: Vec<Subsystem>,
    kraus: Vec<Mat>,
}

impl Register {
    fn position(&self, name: &str) -> Result<usize> {
        self.wires.iter().position(|w| w.name == name).ok_or_else(|| Error::UnknownLabel(name.into()))
    }

    /// Reorders so that `names` come first, in that order.
    fn bring_front(&mut self, names: &[String]) -> Result<()> {
        let mut order = Vec::with_capacity(self.wires.len());
        for n in names {
            let p = self.position(n)?;
            if order.contains(&p) {
                return Err(Error::DuplicateLabel(n.clone()));
            }
            order.push(p);
        }
        let rest: Vec<usize> = (0..self.wires.len()).filter(|i| !order.contains(i)).collect();
        order.extend(rest);
        let dims: Vec<usize> = self.wires.iter().map(|w| w.dim).collect();
        let p = reorder(&dims, &order);
        self.kraus = self.kraus.iter().map(|k| &p * k).collect();
        self.wires = order.iter().map(|&i| self.wires[i].clone()).collect();
        Ok(())
    }

    fn rest_dim(&self, front: usize) -> usize {
        self.wires[front..].iter().map(|w| w.dim).product()
    }

    /// Applies `m` to the front `front` wires, replacing them by `out`.
    fn apply_front(&mut self, m: &Mat, front: usize, out: Vec<Subsystem>) {
        let big = kron(m, &identity(self.rest_dim(front)));
        self.kraus = self.kraus.iter().map(|k| &big * k).collect();
        let mut wires = out;
        wires.extend(self.wires.drain(front..));
        self.wires = wires;
    }

    fn apply(&mut self, op: &GateOp) -> Result<()> {
        let names = &op.wires;
        let fixed = |m: Mat, arity: usize| -> Result<(Mat, usize)> {
            if names.len() != arity {
                return Err(Error::InvalidDimensions(format!("{:?} acts on {arity} wires", op.kind)));
            }
            Ok((m, arity))
        };
        let unitary = match &op.kind {
            GateKind::Hadamard => Some(fixed(hadamard(), 1)?),
            GateKind::Cnot => Some(fixed(controlled(&pauli_x(), 1), 2)?),
            GateKind::Cz => Some(fixed(controlled(&pauli_z(), 1), 2)?),
            GateKind::Toffoli => Some(fixed(controlled(&pauli_x(), 2), 3)?),
            GateKind::ControlledHadamard => Some(fixed(controlled(&hadamard(), 1), 2)?),
            GateKind::PhaseGate(phi) => Some(fixed(phase_gate(*phi), 1)?),
            _ => None,
        };
        if let Some((u, arity)) = unitary {
            self.bring_front(names)?;
            if self.wires[..arity].iter().any(|w| w.dim != 2) {
                return Err(Error::InvalidDimensions(format!("{:?} needs qubit wires", op.kind)));
            }
            let out = self.wires[..arity].to_vec();
            self.apply_front(&u, arity, out);
            return Ok(());
        }
        match &op.kind {
            GateKind::Prepare(dim) => {
                let [name] = names.as_slice() else {
                    return Err(Error::InvalidDimensions("prepare takes one wire".into()));
                };
                if self.position(name).is_ok() {
                    return Err(Error::DuplicateLabel(name.clone()));
                }
                let mut ket = Mat::zeros(*dim, 1);
                ket[(0, 0)] = cr(1.0);
                self.apply_front(&ket, 0, vec![Subsystem::new(name.clone(), *dim)]);
            }
            GateKind::Measure => {
                for name in names {
                    self.bring_front(std::slice::from_ref(name))?;
                    let d = self.wires[0].dim;
                    let rest = identity(self.rest_dim(1));
                    let mut next = Vec::with_capacity(self.kraus.len() * d);
                    for i in 0..d {
                        let mut proj = Mat::zeros(d, d);
                        proj[(i, i)] = cr(1.0);
                        let big = kron(&proj, &rest);
                        next.extend(self.kraus.iter().map(|k| &big * k));
                    }
                    self.kraus = next;
                }
            }
            GateKind::Discard => {
                for name in names {
                    self.bring_front(std::slice::from_ref(name))?;
                    let d = self.wires[0].dim;
                    let rest = identity(self.rest_dim(1));
                    let mut next = Vec::with_capacity(self.kraus.len() * d);
                    for i in 0..d {
                        let mut bra = Mat::zeros(1, d);
                        bra[(0, i)] = cr(1.0);
                        let big = kron(&bra, &rest);
                        next.extend(self.kraus.iter().map(|k| &big * k));
                    }
                    self.kraus = next;
                    self.wires.remove(0);
                }
            }
            GateKind::Isometry { matrix, out } => {
                self.bring_front(names)?;
                let din: usize = self.wires[..names.len()].iter().map(|w| w.dim).product();
                if din != matrix.ncols() {
                    return Err(Error::InvalidDimensions(format!("isometry takes {} not {din}", matrix.ncols())));
                }
                self.apply_front(matrix, names.len(), out.clone());
            }
            GateKind::Select { branches, out } => {
                self.bring_front(names)?;
                let d = self.wires[0].dim;
                if branches.len() != d {
                    return Err(Error::InvalidDimensions(format!("{} branches for a {d}-outcome wire", branches.len())));
                }
                let din: usize = self.wires[1..names.len()].iter().map(|w| w.dim).product();
                let dout: usize = out.iter().map(|s| s.dim).product();
                let mut block = Mat::zeros(d * dout, d * din);
                for (i, b) in branches.iter().enumerate() {
                    if b.ncols() != din {
                        return Err(Error::InvalidDimensions(format!("branch takes {} not {din}", b.ncols())));
                    }
                    block.view_mut((i * dout, i * din), (dout, din)).copy_from(b);
                }
                let mut wires = vec![self.wires[0].clone()];
                wires.extend(out.iter().cloned());
                self.apply_front(&block, names.len(), wires);
            }
            _ => unreachable!(),
        }
        Ok(())
    }
}

/// Runs `ops` on the input wires and returns the channel onto `output`.
/// Every other wire must have been discarded.
pub fn simulate(input: &[Subsystem], ops: &[GateOp], output: &[&str]) -> Result<SimulatedChannel> {
    let n: usize = input.iter().map(|s| s.dim).product();
    let mut reg = Register { wires: input.to_vec(), kraus: vec![identity(n)] };
    for op in ops {
        reg.apply(op)?;
    }
    if reg.wires.len() != output.len() {
        let left: Vec<&str> = reg.wires.iter().map(|w| w.name.as_str()).collect();
        return Err(Error::LabelMismatch(format!("register {left:?} vs outputs {output:?}")));
    }
    let names: Vec<String> = output.iter().map(|s| s.to_string()).collect();
    reg.bring_front(&names)?;
    let kraus = reg.kraus.into_iter().filter(|k| k.norm() > 0.0).collect();
    Ok(SimulatedChannel { kraus, input: input.to_vec(), output: reg.wires })
}

/// Gate list of the three-qubit cloning circuit. Top and middle wires carry
/// the two clones; the ancilla is prepared in `|0⟩` and traced out.
pub fn clone_circuit(phi: f64) -> Vec<GateOp> {
    use GateKind::*;
    vec![
        GateOp::new(Prepare(2), &["anc"]),
        GateOp::new(ControlledHadamard, &["mid", "anc"]),
        GateOp::new(ControlledHadamard, &["top", "anc"]),
        GateOp::new(Toffoli, &["top", "mid", "anc"]),
        GateOp::new(PhaseGate(phi), &["anc"]),
        GateOp::new(Cnot, &["mid", "anc"]),
        GateOp::new(Cnot, &["top", "anc"]),
        GateOp::new(Measure, &["anc"]),
        GateOp::new(Discard, &["anc"]),
    ]
}

fn qubit_wires() -> Vec<Subsystem> {
    vec![Subsystem::new("top", 2), Subsystem::new("mid", 2)]
}

/// Choi operator on `H3 ⊗ H0` of the simulated cloning circuit.
pub fn clone_circuit_channel(phi: f64) -> Result<ChoiOperator> {
    simulate(&qubit_wires(), &clone_circuit(phi), &["top", "mid"])?.choi(H0, H3)
}

/// `R * |U_φ⟩⟩⟨⟨U_φ|` with `U_φ = diag(1, e^{iφ})`.
pub fn comb_inserted_channel(comb: &OptimalComb, phi: f64) -> Result<ChoiOperator> {
    let dims = (comb.r.dim_of(&[H0])?, comb.r.dim_of(&[H1])?);
    if dims != (4, 2) {
        return Err(Error::InvalidDimensions(format!("expected the two-copy phase comb, got {dims:?}")));
    }
    insert_gate(&comb.r, &phase_gate(phi))
}

/// The optimal two-copy phase-cloning comb from the solver's assignment.
pub fn phase_clone_comb() -> Result<OptimalComb> {
    let task = Task::phase_clone(2)?;
    let report = solve(&phase_clone_problem(2)?, 1e-12, 100_000)?;
    build_optimal_comb(&task, &report.p_star)
}

fn basis(d: usize, i: usize) -> Mat {
    let mut v = Mat::zeros(d, 1);
    v[(i, 0)] = cr(1.0);
    v
}

/// `|x⟩⟨y|` for basis states of the given product spaces.
fn ket_bra(out: &[(usize, usize)], inp: &[(usize, usize)]) -> Mat {
    let k = out.iter().fold(Mat::from_element(1, 1, cr(1.0)), |acc, &(d, i)| kron(&acc, &basis(d, i)));
    let b = inp.iter().fold(Mat::from_element(1, 1, cr(1.0)), |acc, &(d, i)| kron(&acc, &basis(d, i)));
    k * b.adjoint()
}

/// `V : H0 → B ⊗ A ⊗ 1`, with `B` a qubit and `A` a qutrit.
pub fn isometry_v() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = |b, a, w, x| ket_bra(&[(2, b), (3, a), (2, w)], &[(4, x)]);
    t(0, 0, 0, 0) + (t(0, 1, 1, 1) + t(0, 2, 1, 2)) * cr(s) + t(1, 0, 1, 3) + (t(1, 1, 0, 1) + t(1, 2, 0, 2)) * cr(s)
}

/// `Q_i : 2 ⊗ A → C ⊗ H3`, with `C` four-dimensional.
pub fn isometry_q(i: usize) -> Mat {
    let t = |cc, out, w, a| ket_bra(&[(4, cc), (4, out)], &[(2, w), (3, a)]);
    match i {
        0 => t(0, 0, 0, 0) + t(0, 1, 1, 1) + t(0, 2, 1, 2) + t(1, 3, 1, 0) + t(2, 0, 0, 1) + t(3, 0, 0, 2),
        _ => t(0, 3, 1, 0) + t(0, 1, 0, 1) + t(0, 2, 0, 2) + t(1, 0, 0, 0) + t(2, 3, 1, 1) + t(3, 3, 1, 2),
    }
}

/// Gate list of the low-memory realization: `V`, measurement of `B`, the
/// phase gate from wire 1 to wire 2, then `Q_B` and a discarded `C`.
pub fn isometry_scheme(phi: f64) -> Result<Vec<GateOp>> {
    let (b, a, w1, w2) = (Subsystem::new("B", 2), Subsystem::new("A", 3), Subsystem::new("1", 2), Subsystem::new("2", 2));
    Ok(vec![
        GateOp::isometry(isometry_v(), &[H0], vec![b, a, w1])?,
        GateOp::new(GateKind::Measure, &["B"]),
        GateOp::isometry(phase_gate(phi), &["1"], vec![w2])?,
        GateOp::select(
            vec![isometry_q(0), isometry_q(1)],
            &["B", "2", "A"],
            vec![Subsystem::new("C", 4), Subsystem::new("out", 4)],
        )?,
        GateOp::new(GateKind::Discard, &["C", "B"]),
    ])
}

pub fn isometry_realization(phi: f64) -> Result<SimulatedChannel> {
    simulate(&[Subsystem::new(H0, 4)], &isometry_scheme(phi)?, &["out"])
}

/// Choi operator on `H3 ⊗ H0` of the isometry realization.
pub fn isometry_realization_channel(phi: f64) -> Result<ChoiOperator> {
    isometry_realization(phi)?.choi(H0, H3)
}

/// Channel fidelity against `U_φ ⊗ U_φ`.
pub fn clone_fidelity(channel: &ChoiOperator, phi: f64) -> Result<f64> {
    let u = phase_gate(phi);
    let target = choi_of_unitary(&UnitaryGate::new(kron(&u, &u), H0, H3)?)?;
    channel_fidelity(channel, &target)
}

/// Average of `clone_fidelity` over `points` equally spaced angles. The rule
/// is exact for trigonometric polynomials of degree below `points`.
pub fn average_clone_fidelity(points: usize, channel: impl Fn(f64) -> Result<ChoiOperator>) -> Result<f64> {
    let values = (0..points)
        .map(|k| {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
            clone_fidelity(&channel(phi)?, phi)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum(&values) / points as f64)
}

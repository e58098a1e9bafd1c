//! Representations of U(1), SU(2) and the SU(d) family used by the cloning
//! problems: irreps, concrete tensor-product representations, analytic
//! decomposition rules, a highest-weight decomposition engine and Haar
//! integration rules.

mod decomposition;
mod haar;
mod irrep;
mod lie;

pub use decomposition::{
    character_projector, decompose_with_conjugate, isotypic_projectors, IrrepBlock, IrrepCopy,
    IsotypicDecomposition, SectorDecomposition,
};
pub use haar::{gauss_legendre, haar_nodes, HaarNode, Quadrature};
pub use irrep::{irrep_matrix, sud_irrep_isometry, su2_power_matrix, GroupElement};
pub use lie::{highest_weight_spaces, LieAction, WeightSpace, WordBasis};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    U1,
    SU2,
    SUd(usize),
}

impl GroupId {
    pub fn validate(self) -> Result<Self> {
        match self {
            GroupId::SUd(d) if d < 2 => Err(Error::UnsupportedGroup(format!("SU({d})"))),
            g => Ok(g),
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupId::U1 => write!(f, "U(1)"),
            GroupId::SU2 => write!(f, "SU(2)"),
            GroupId::SUd(d) => write!(f, "SU({d})"),
        }
    }
}

/// Named SU(d) irreps appearing in the 1→2 cloning problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SudTag {
    Trivial,
    Defining,
    Conjugate,
    Sym,
    Antisym,
    AlphaHat,
    BetaHat,
    GammaHat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Irrep {
    U1 { weight: i64 },
    /// Spin `two_j / 2`.
    SU2 { two_j: u32 },
    SUd { d: usize, tag: SudTag },
}

impl Irrep {
    pub fn spin(j: f64) -> Self {
        Irrep::SU2 { two_j: (2.0 * j).round() as u32 }
    }

    pub fn group(&self) -> GroupId {
        match self {
            Irrep::U1 { .. } => GroupId::U1,
            Irrep::SU2 { .. } => GroupId::SU2,
            Irrep::SUd { d, .. } => GroupId::SUd(*d),
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Irrep::U1 { .. } => 1,
            Irrep::SU2 { two_j } => two_j as usize + 1,
            Irrep::SUd { d, tag } => {
                let (dp, dm) = (d * (d + 1) / 2, d * (d - 1) / 2);
                match tag {
                    SudTag::Trivial => 1,
                    SudTag::Defining | SudTag::Conjugate | SudTag::AlphaHat => d,
                    SudTag::Sym => dp,
                    SudTag::Antisym => dm,
                    SudTag::BetaHat => d * (dp - 1),
                    SudTag::GammaHat => d * dm.saturating_sub(1),
                }
            }
        }
    }

    /// Highest weight: the U(1) charge, twice the spin, or Dynkin labels.
    pub fn highest_weight(&self) -> Vec<i64> {
        match *self {
            Irrep::U1 { weight } => vec![weight],
            Irrep::SU2 { two_j } => vec![two_j as i64],
            Irrep::SUd { d, tag } => {
                let r = d - 1;
                let omega = |k: usize| -> Vec<i64> {
                    let mut v = vec![0; r];
                    if (1..=r).contains(&k) {
                        v[k - 1] = 1;
                    }
                    v
                };
                let add = |x: Vec<i64>, y: Vec<i64>| -> Vec<i64> { x.iter().zip(&y).map(|(a, b)| a + b).collect() };
                match tag {
                    SudTag::Trivial => vec![0; r],
                    SudTag::Defining | SudTag::AlphaHat => omega(1),
                    SudTag::Conjugate => omega(r),
                    SudTag::Sym => add(omega(1), omega(1)),
                    SudTag::Antisym => omega(2),
                    SudTag::BetaHat => add(add(omega(1), omega(1)), omega(r)),
                    SudTag::GammaHat => add(omega(2), omega(r)),
                }
            }
        }
    }

    /// Finds the irrep of `group` with the given highest weight, preferring
    /// the first match in `candidates`.
    pub fn from_highest_weight(group: GroupId, weight: &[i64], candidates: &[Irrep]) -> Result<Irrep> {
        if let Some(x) = candidates.iter().find(|x| x.group() == group && x.highest_weight() == weight) {
            return Ok(*x);
        }
        match group {
            GroupId::U1 => Ok(Irrep::U1 { weight: weight[0] }),
            GroupId::SU2 if weight[0] >= 0 => Ok(Irrep::SU2 { two_j: weight[0] as u32 }),
            GroupId::SUd(d) => {
                let tags = [
                    SudTag::Trivial,
                    SudTag::Defining,
                    SudTag::Conjugate,
                    SudTag::Sym,
                    SudTag::Antisym,
                    SudTag::BetaHat,
                    SudTag::GammaHat,
                ];
                tags.iter()
                    .map(|&tag| Irrep::SUd { d, tag })
                    .find(|x| x.dim() > 0 && x.highest_weight() == weight)
                    .ok_or_else(|| Error::UnsupportedGroup(format!("no named SU({d}) irrep with weight {weight:?}")))
            }
            _ => Err(Error::UnsupportedGroup(format!("weight {weight:?} for {group}"))),
        }
    }

    /// Spin value for SU(2) irreps.
    pub fn j(&self) -> Option<f64> {
        match self {
            Irrep::SU2 { two_j } => Some(*two_j as f64 / 2.0),
            _ => None,
        }
    }
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Irrep::U1 { weight } => write!(f, "{weight}"),
            Irrep::SU2 { two_j } if two_j % 2 == 0 => write!(f, "{}", two_j / 2),
            Irrep::SU2 { two_j } => write!(f, "{two_j}/2"),
            Irrep::SUd { tag, .. } => {
                let s = match tag {
                    SudTag::Trivial => "trivial",
                    SudTag::Defining => "defining",
                    SudTag::Conjugate => "conjugate",
                    SudTag::Sym => "+",
                    SudTag::Antisym => "-",
                    SudTag::AlphaHat => "alpha",
                    SudTag::BetaHat => "beta",
                    SudTag::GammaHat => "gamma",
                };
                write!(f, "{s}")
            }
        }
    }
}

/// A representation given by its irrep content `⊕_x U^{[x]} ⊗ I_{m_x}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    pub group: GroupId,
    pub content: Vec<(Irrep, usize)>,
}

impl RepSpec {
    pub fn new(group: GroupId, content: Vec<(Irrep, usize)>) -> Result<Self> {
        group.validate()?;
        if let Some((x, _)) = content.iter().find(|(x, _)| x.group() != group) {
            return Err(Error::UnsupportedGroup(format!("irrep {x} is not a {group} irrep")));
        }
        Ok(Self { group, content })
    }

    pub fn irrep(x: Irrep) -> Self {
        Self { group: x.group(), content: vec![(x, 1)] }
    }

    pub fn total_dim(&self) -> usize {
        self.content.iter().map(|(x, m)| x.dim() * m).sum()
    }

    pub fn multiplicity(&self, x: &Irrep) -> usize {
        self.content.iter().filter(|(y, _)| y == x).map(|(_, m)| m).sum()
    }

    /// Same irreps, every multiplicity set to one.
    pub fn multiplicity_free(&self) -> Self {
        let mut content: Vec<(Irrep, usize)> = Vec::new();
        for (x, _) in &self.content {
            if !content.iter().any(|(y, _)| y == x) {
                content.push((*x, 1));
            }
        }
        Self { group: self.group, content }
    }
}

/// One tensor factor of a concrete representation: a direct sum of irreps,
/// optionally complex conjugated.
#[derive(Clone, Debug, PartialEq)]
pub struct RepFactor {
    pub irreps: Vec<Irrep>,
    pub conjugate: bool,
}

/// A representation realized as explicit matrices on `⊗_k (⊕ irreps)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcreteRep {
    pub group: GroupId,
    pub factors: Vec<RepFactor>,
}

impl ConcreteRep {
    pub fn new(group: GroupId, factors: Vec<RepFactor>) -> Result<Self> {
        group.validate()?;
        for f in &factors {
            for x in &f.irreps {
                if x.group() != group {
                    return Err(Error::UnsupportedGroup(format!("irrep {x} is not a {group} irrep")));
                }
                if let Irrep::SUd { tag, .. } = x {
                    if !matches!(tag, SudTag::Trivial | SudTag::Defining | SudTag::Conjugate) {
                        return Err(Error::UnsupportedGroup(format!(
                            "concrete SU(d) factors are built from trivial, defining and conjugate irreps, not {x}"
                        )));
                    }
                }
            }
        }
        Ok(Self { group, factors })
    }

    /// A single factor holding the direct sum of `irreps`.
    pub fn direct_sum(irreps: Vec<Irrep>) -> Result<Self> {
        let group = irreps.first().map(|x| x.group()).ok_or(Error::InvalidDimensions("empty rep".into()))?;
        Self::new(group, vec![RepFactor { irreps, conjugate: false }])
    }

    /// `n` tensor copies of `self`.
    pub fn power(&self, n: usize) -> Self {
        let mut factors = Vec::new();
        for _ in 0..n {
            factors.extend(self.factors.iter().cloned());
        }
        Self { group: self.group, factors }
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::UnsupportedGroup(format!("{} vs {}", self.group, other.group)));
        }
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Ok(Self { group: self.group, factors })
    }

    pub fn conjugate(&self) -> Self {
        let factors = self
            .factors
            .iter()
            .map(|f| RepFactor { irreps: f.irreps.clone(), conjugate: !f.conjugate })
            .collect();
        Self { group: self.group, factors }
    }

    pub fn factor_dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.irreps.iter().map(Irrep::dim).sum()).collect()
    }

    pub fn dim(&self) -> usize {
        self.factor_dims().iter().product()
    }

    /// Largest SU(2) "degree" Σ 2j or U(1) |weight| entering a matrix element.
    pub fn degree(&self) -> usize {
        self.factors
            .iter()
            .map(|f| {
                f.irreps
                    .iter()
                    .map(|x| match *x {
                        Irrep::U1 { weight } => weight.unsigned_abs() as usize,
                        Irrep::SU2 { two_j } => two_j as usize,
                        Irrep::SUd { .. } => 1,
                    })
                    .max()
                    .unwrap_or(0)
            })
            .sum()
    }

    /// The representing matrix at `g`.
    pub fn matrix(&self, g: &GroupElement) -> Result<Mat> {
        let mut out = Mat::from_element(1, 1, crate::linalg::cr(1.0));
        for f in &self.factors {
            let blocks: Vec<Mat> = f.irreps.iter().map(|x| irrep_matrix(x, g)).collect::<Result<_>>()?;
            let n: usize = blocks.iter().map(|b| b.nrows()).sum();
            let mut m = Mat::zeros(n, n);
            let mut off = 0;
            for b in &blocks {
                m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
                off += b.nrows();
            }
            if f.conjugate {
                m = m.map(|z| z.conj());
            }
            out = out.kronecker(&m);
        }
        Ok(out)
    }

    pub fn lie_action(&self) -> Result<LieAction> {
        LieAction::of_rep(self)
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn binomial_f64(n: u64, k: u64) -> f64 {
    binomial(n, k) as f64
}

/// Content of `U^{⊗N}` for the qubit defining representation of SU(2),
/// highest spin first.
pub fn su2_power_decomposition(n: usize) -> RepSpec {
    let n64 = n as u64;
    let mut content = Vec::new();
    let mut t = n as i64;
    while t >= 0 {
        let tu = t as u64;
        let m = 2 * (tu as u128 + 1) * binomial(n64, (n64 + tu) / 2) / (n64 + tu + 2) as u128;
        content.push((Irrep::SU2 { two_j: tu as u32 }, m as usize));
        t -= 2;
    }
    RepSpec { group: GroupId::SU2, content }
}

/// Content of `U^{⊗N}` for the qubit phase gate `diag(1, e^{iφ})`.
pub fn u1_power_decomposition(n: usize) -> RepSpec {
    let content = (0..=n).map(|a| (Irrep::U1 { weight: a as i64 }, binomial(n as u64, a as u64) as usize)).collect();
    RepSpec { group: GroupId::U1, content }
}

/// Irreps `K` of `V^{[a]} ⊗ U^{[β]*}` for each target irrep `a`, with total
/// multiplicity `m^{a,β}_K = m_a c^{a,β}_K`.
#[derive(Clone, Debug, PartialEq)]
pub struct KComponent {
    pub k: Irrep,
    /// `(a, m^{a,β}_K)` pairs with nonzero multiplicity.
    pub per_a: Vec<(Irrep, usize)>,
}

/// Clebsch–Gordan content of a single `x ⊗ ξ*`.
pub fn coupling(x: &Irrep, xi: &Irrep) -> Result<Vec<(Irrep, usize)>> {
    match (*x, *xi) {
        (Irrep::U1 { weight: a }, Irrep::U1 { weight: b }) => Ok(vec![(Irrep::U1 { weight: a - b }, 1)]),
        (Irrep::SU2 { two_j: a }, Irrep::SU2 { two_j: b }) => {
            let lo = a.abs_diff(b);
            Ok((0..=(a + b - lo) / 2).map(|k| (Irrep::SU2 { two_j: lo + 2 * k }, 1)).collect())
        }
        (Irrep::SUd { d, tag: t }, Irrep::SUd { d: d2, tag: u }) if d == d2 => {
            let k = |tag| Irrep::SUd { d, tag };
            let out = match (t, u) {
                (t, SudTag::Trivial) => vec![(k(t), 1)],
                (SudTag::Trivial, SudTag::Defining) => vec![(k(SudTag::Conjugate), 1)],
                (SudTag::Trivial, SudTag::Conjugate) => vec![(k(SudTag::Defining), 1)],
                (SudTag::Sym, SudTag::Defining) => vec![(k(SudTag::AlphaHat), 1), (k(SudTag::BetaHat), 1)],
                (SudTag::Antisym, SudTag::Defining) if d == 2 => vec![(k(SudTag::AlphaHat), 1)],
                (SudTag::Antisym, SudTag::Defining) => vec![(k(SudTag::AlphaHat), 1), (k(SudTag::GammaHat), 1)],
                _ => {
                    return Err(Error::UnsupportedGroup(format!("SU({d}) coupling {} ⊗ ({})*", k(t), k(u))));
                }
            };
            Ok(out)
        }
        _ => Err(Error::UnsupportedGroup(format!("coupling {x} ⊗ ({xi})* across groups"))),
    }
}

/// Decomposition of `V ⊗ U^{[β]*}` for the target representation `V`.
pub fn decompose_tensor_with_conjugate(target: &RepSpec, beta: &Irrep) -> Result<Vec<KComponent>> {
    if beta.group() != target.group {
        return Err(Error::UnsupportedGroup(format!("{} vs {}", beta.group(), target.group)));
    }
    let mut out: Vec<KComponent> = Vec::new();
    for (a, m_a) in &target.content {
        for (k, c) in coupling(a, beta)? {
            let entry = match out.iter_mut().position(|e| e.k == k) {
                Some(i) => &mut out[i],
                None => {
                    out.push(KComponent { k, per_a: Vec::new() });
                    out.last_mut().unwrap()
                }
            };
            match entry.per_a.iter_mut().find(|(x, _)| x == a) {
                Some((_, m)) => *m += m_a * c,
                None => entry.per_a.push((*a, m_a * c)),
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_decomposition_examples() {
        let r = su2_power_decomposition(1);
        assert_eq!(r.content, vec![(Irrep::spin(0.5), 1)]);
        let r = su2_power_decomposition(3);
        assert_eq!(r.content, vec![(Irrep::spin(1.5), 1), (Irrep::spin(0.5), 2)]);
        assert_eq!(r.total_dim(), 8);
        let r = su2_power_decomposition(4);
        assert_eq!(r.content, vec![(Irrep::spin(2.0), 1), (Irrep::spin(1.0), 3), (Irrep::spin(0.0), 2)]);
        assert_eq!(r.total_dim(), 16);
        for n in 1..=14 {
            assert_eq!(su2_power_decomposition(n).total_dim(), 1 << n);
            assert_eq!(u1_power_decomposition(n).total_dim(), 1 << n);
        }
    }

    #[test]
    fn su2_coupling_rule() {
        let ks = decompose_tensor_with_conjugate(&RepSpec::irrep(Irrep::spin(0.5)), &Irrep::spin(0.5)).unwrap();
        let labels: Vec<_> = ks.iter().map(|c| (c.k, c.per_a.clone())).collect();
        assert_eq!(
            labels,
            vec![(Irrep::spin(0.0), vec![(Irrep::spin(0.5), 1)]), (Irrep::spin(1.0), vec![(Irrep::spin(0.5), 1)])]
        );
    }

    #[test]
    fn u1_coupling_rule() {
        let n = 4;
        let target = u1_power_decomposition(n);
        let ks0 = decompose_tensor_with_conjugate(&target, &Irrep::U1 { weight: 0 }).unwrap();
        let ks1 = decompose_tensor_with_conjugate(&target, &Irrep::U1 { weight: 1 }).unwrap();
        for c in &ks0 {
            let Irrep::U1 { weight } = c.k else { panic!() };
            assert_eq!(c.per_a, vec![(Irrep::U1 { weight }, binomial(n as u64, weight as u64) as usize)]);
        }
        let mut all: Vec<i64> = ks0.iter().chain(&ks1).map(|c| c.k.highest_weight()[0]).collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all, (-1..=n as i64).collect::<Vec<_>>());
    }

    #[test]
    fn dimension_conservation() {
        let check = |target: &RepSpec, beta: &Irrep| {
            let ks = decompose_tensor_with_conjugate(target, beta).unwrap();
            for (a, m_a) in &target.content {
                let lhs: usize = ks
                    .iter()
                    .flat_map(|c| c.per_a.iter().filter(|(x, _)| x == a).map(|(_, m)| m * c.k.dim()))
                    .sum();
                assert_eq!(lhs, m_a * a.dim() * beta.dim(), "{a} ⊗ {beta}*");
            }
        };
        for n in 1..8 {
            check(&su2_power_decomposition(n), &Irrep::spin(0.5));
            check(&u1_power_decomposition(n), &Irrep::U1 { weight: 1 });
        }
        for d in 2..7 {
            let t = RepSpec::new(
                GroupId::SUd(d),
                vec![(Irrep::SUd { d, tag: SudTag::Sym }, 1), (Irrep::SUd { d, tag: SudTag::Antisym }, 1)],
            )
            .unwrap();
            check(&t, &Irrep::SUd { d, tag: SudTag::Defining });
        }
    }

    #[test]
    fn sud_dims_and_weights() {
        for d in 2..7 {
            let dp = d * (d + 1) / 2;
            let dm = d * (d - 1) / 2;
            let x = |tag| Irrep::SUd { d, tag };
            assert_eq!(x(SudTag::Sym).dim(), dp);
            assert_eq!(x(SudTag::Antisym).dim(), dm);
            assert_eq!(x(SudTag::BetaHat).dim(), d * (dp - 1));
            assert_eq!(x(SudTag::GammaHat).dim(), d * (dm - 1));
            assert_eq!(x(SudTag::BetaHat).highest_weight().len(), d - 1);
        }
        assert_eq!(Irrep::SUd { d: 2, tag: SudTag::BetaHat }.highest_weight(), vec![3]);
    }
}

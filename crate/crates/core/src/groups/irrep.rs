use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::linalg::{cr, is_unitary, Mat, C64};

use super::lie::{highest_weight_spaces, LieAction, WordBasis};
use super::{ConcreteRep, GroupId, Irrep, RepFactor, SudTag};

/// A group element stored by its parameterization.
#[derive(Clone, Debug, PartialEq)]
pub enum GroupElement {
    /// `e^{iφ}` in U(1).
    Phase(f64),
    /// A 2×2 special unitary.
    SU2(Mat),
    /// A d×d special unitary.
    SUd(Mat),
}

impl GroupElement {
    /// `e^{-iασz/2} e^{-iβσy/2} e^{-iγσz/2}`.
    pub fn euler(alpha: f64, beta: f64, gamma: f64) -> Self {
        let rz = |t: f64| {
            Mat::from_row_slice(2, 2, &[C64::from_polar(1.0, -t / 2.0), cr(0.0), cr(0.0), C64::from_polar(1.0, t / 2.0)])
        };
        let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let ry = Mat::from_row_slice(2, 2, &[cr(cb), cr(-sb), cr(sb), cr(cb)]);
        GroupElement::SU2(rz(alpha) * ry * rz(gamma))
    }

    pub fn su2(m: Mat) -> Result<Self> {
        check_special_unitary(&m, 2)?;
        Ok(GroupElement::SU2(m))
    }

    pub fn sud(m: Mat) -> Result<Self> {
        let d = m.nrows();
        check_special_unitary(&m, d)?;
        Ok(GroupElement::SUd(m))
    }

    pub fn group(&self) -> GroupId {
        match self {
            GroupElement::Phase(_) => GroupId::U1,
            GroupElement::SU2(_) => GroupId::SU2,
            GroupElement::SUd(m) => GroupId::SUd(m.nrows()),
        }
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (GroupElement::Phase(a), GroupElement::Phase(b)) => Ok(GroupElement::Phase(a + b)),
            (GroupElement::SU2(a), GroupElement::SU2(b)) => Ok(GroupElement::SU2(a * b)),
            (GroupElement::SUd(a), GroupElement::SUd(b)) if a.nrows() == b.nrows() => Ok(GroupElement::SUd(a * b)),
            _ => Err(Error::BadParameterization("elements of different groups".into())),
        }
    }
}

fn check_special_unitary(m: &Mat, d: usize) -> Result<()> {
    if m.nrows() != d || m.ncols() != d || !is_unitary(m, 1e-10) {
        return Err(Error::BadParameterization(format!("expected a {d}×{d} unitary")));
    }
    if (m.determinant() - cr(1.0)).norm() > 1e-10 {
        return Err(Error::BadParameterization("determinant is not 1".into()));
    }
    Ok(())
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients (indexed by the power of y) of `(u x + v y)^p`.
fn linear_power(u: C64, v: C64, p: usize) -> Vec<C64> {
    let mut out = vec![cr(1.0)];
    for _ in 0..p {
        let mut next = vec![cr(0.0); out.len() + 1];
        for (k, z) in out.iter().enumerate() {
            next[k] += z * u;
            next[k + 1] += z * v;
        }
        out = next;
    }
    out
}

fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![cr(0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Spin-`n/2` matrix of a 2×2 matrix `g`, acting on homogeneous polynomials
/// by `x ↦ g₀₀x + g₁₀y`, `y ↦ g₀₁x + g₁₁y`. Basis `√C(n,k) x^{n−k}y^k`,
/// highest `m` first.
pub fn su2_power_matrix(g: &Mat, n: usize) -> Mat {
    let mut out = Mat::zeros(n + 1, n + 1);
    for k in 0..=n {
        let px = linear_power(g[(0, 0)], g[(1, 0)], n - k);
        let py = linear_power(g[(0, 1)], g[(1, 1)], k);
        let img = poly_mul(&px, &py);
        for (kp, z) in img.iter().enumerate() {
            out[(kp, k)] = z * (binom(n, k) / binom(n, kp)).sqrt();
        }
    }
    out
}

/// Spin-`n/2` image of the Lie-algebra element `x` (a derivation on polynomials).
pub fn su2_power_generator(x: &Mat, n: usize) -> Mat {
    let mut out = Mat::zeros(n + 1, n + 1);
    for k in 0..=n {
        let (p, q) = (n - k, k);
        // p x^{p-1} y^q (x00 x + x10 y)
        if p > 0 {
            out[(k, k)] += x[(0, 0)] * cr(p as f64);
            if k < n {
                out[(k + 1, k)] += x[(1, 0)] * cr(p as f64);
            }
        }
        // q x^p y^{q-1} (x01 x + x11 y)
        if q > 0 {
            out[(k - 1, k)] += x[(0, 1)] * cr(q as f64);
            out[(k, k)] += x[(1, 1)] * cr(q as f64);
        }
    }
    for r in 0..=n {
        for col in 0..=n {
            out[(r, col)] *= (binom(n, col) / binom(n, r)).sqrt();
        }
    }
    out
}

fn sym_antisym_isometry(d: usize, symmetric: bool) -> Mat {
    let mut cols: Vec<Vec<(usize, C64)>> = Vec::new();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        for j in i..d {
            if i == j {
                if symmetric {
                    cols.push(vec![(i * d + i, cr(1.0))]);
                }
            } else if symmetric {
                cols.push(vec![(i * d + j, cr(h)), (j * d + i, cr(h))]);
            } else {
                cols.push(vec![(i * d + j, cr(h)), (j * d + i, cr(-h))]);
            }
        }
    }
    let mut m = Mat::zeros(d * d, cols.len());
    for (k, col) in cols.iter().enumerate() {
        for &(r, z) in col {
            m[(r, k)] = z;
        }
    }
    m
}

type IsometryCache = Mutex<HashMap<(usize, SudTag), (ConcreteRep, Mat)>>;

fn cache() -> &'static IsometryCache {
    static CACHE: OnceLock<IsometryCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Realizes a named SU(d) irrep inside a tensor product of defining and
/// conjugate factors. Returns the host representation and an isometry whose
/// columns carry the irrep.
pub fn sud_irrep_isometry(d: usize, tag: SudTag) -> Result<(ConcreteRep, Mat)> {
    if d < 2 {
        return Err(Error::UnsupportedGroup(format!("SU({d})")));
    }
    if let Some(hit) = cache().lock().unwrap().get(&(d, tag)) {
        return Ok(hit.clone());
    }
    let g = GroupId::SUd(d);
    let x = |tag| Irrep::SUd { d, tag };
    let plain = |tag| RepFactor { irreps: vec![x(tag)], conjugate: false };
    let result = match tag {
        SudTag::Trivial | SudTag::Defining | SudTag::Conjugate => {
            let rep = ConcreteRep::new(g, vec![plain(tag)])?;
            let n = rep.dim();
            (rep, Mat::identity(n, n))
        }
        SudTag::AlphaHat => {
            let rep = ConcreteRep::new(g, vec![plain(SudTag::Defining)])?;
            (rep, Mat::identity(d, d))
        }
        SudTag::Sym | SudTag::Antisym => {
            let rep = ConcreteRep::new(g, vec![plain(SudTag::Defining), plain(SudTag::Defining)])?;
            (rep, sym_antisym_isometry(d, tag == SudTag::Sym))
        }
        SudTag::BetaHat | SudTag::GammaHat => {
            if x(tag).dim() == 0 {
                return Err(Error::UnsupportedGroup(format!("{} is empty for d = {d}", x(tag))));
            }
            let host = if tag == SudTag::BetaHat { SudTag::Sym } else { SudTag::Antisym };
            let rep = ConcreteRep::new(
                g,
                vec![plain(SudTag::Defining), plain(SudTag::Defining), plain(SudTag::Conjugate)],
            )?;
            let action = LieAction::of_rep(&rep)?;
            let sub = sym_antisym_isometry(d, host == SudTag::Sym).kronecker(&Mat::identity(d, d));
            let want = x(tag).highest_weight();
            let spaces = highest_weight_spaces(&action, Some(&sub))?;
            let space = spaces
                .iter()
                .find(|s| s.weight == want)
                .ok_or_else(|| Error::UnsupportedGroup(format!("{} not found", x(tag))))?;
            let hw = space.vectors.column(0).into_owned();
            let words = WordBasis::from_reference(&action, &hw, x(tag).dim())?;
            let iso = words.apply(&action, &hw);
            (rep, iso)
        }
    };
    cache().lock().unwrap().insert((d, tag), result.clone());
    Ok(result)
}

/// The representing matrix `U^{[x]}_g`.
pub fn irrep_matrix(x: &Irrep, g: &GroupElement) -> Result<Mat> {
    match (x, g) {
        (Irrep::U1 { weight }, GroupElement::Phase(phi)) => {
            Ok(Mat::from_element(1, 1, C64::from_polar(1.0, *weight as f64 * phi)))
        }
        (Irrep::SU2 { two_j }, GroupElement::SU2(m)) => Ok(su2_power_matrix(m, *two_j as usize)),
        (Irrep::SUd { d, tag }, GroupElement::SUd(m)) if m.nrows() == *d => match tag {
            SudTag::Trivial => Ok(Mat::identity(1, 1)),
            SudTag::Defining | SudTag::AlphaHat => Ok(m.clone()),
            SudTag::Conjugate => Ok(m.map(|z| z.conj())),
            _ => {
                let (rep, iso) = sud_irrep_isometry(*d, *tag)?;
                Ok(iso.adjoint() * rep.matrix(g)? * iso)
            }
        },
        _ => Err(Error::BadParameterization(format!("{} element for irrep {x} of {}", g.group(), x.group()))),
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::haar_special_unitary;

use super::{GroupElement, GroupId};

#[derive(Clone, Debug, PartialEq)]
pub struct HaarNode {
    pub element: GroupElement,
    pub weight: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Quadrature {
    /// Exact for matrix elements of total degree up to `degree`: the largest
    /// |charge| for U(1), the sum of 2j over the factors for SU(2).
    Exact { degree: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Quadrature {
    pub fn is_exact(&self) -> bool {
        matches!(self, Quadrature::Exact { .. })
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm = if n <= 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// Integration nodes for the normalized Haar measure.
///
/// U(1): `degree + 1` equispaced angles. SU(2): equispaced Euler angles α, γ
/// over [0, 4π) times Gauss–Legendre in cos β. SU(d) with d > 2 has no exact
/// rule here; an exact request falls back to 4096 Monte Carlo samples.
pub fn haar_nodes(group: GroupId, rule: Quadrature) -> Vec<HaarNode> {
    match (group, rule) {
        (GroupId::U1, Quadrature::Exact { degree }) => {
            let n = degree + 1;
            (0..n)
                .map(|k| HaarNode {
                    element: GroupElement::Phase(2.0 * std::f64::consts::PI * k as f64 / n as f64),
                    weight: 1.0 / n as f64,
                })
                .collect()
        }
        (GroupId::SU2, Quadrature::Exact { degree }) => {
            let na = degree + 1;
            let gl = gauss_legendre(degree / 2 + 1);
            let mut out = Vec::with_capacity(na * na * gl.len());
            for ia in 0..na {
                let alpha = 4.0 * std::f64::consts::PI * ia as f64 / na as f64;
                for &(x, wb) in &gl {
                    let beta = x.acos();
                    for ig in 0..na {
                        let gamma = 4.0 * std::f64::consts::PI * ig as f64 / na as f64;
                        out.push(HaarNode {
                            element: GroupElement::euler(alpha, beta, gamma),
                            weight: wb / 2.0 / (na * na) as f64,
                        });
                    }
                }
            }
            out
        }
        (GroupId::SUd(2), Quadrature::Exact { degree }) => haar_nodes(GroupId::SU2, Quadrature::Exact { degree })
            .into_iter()
            .map(|n| match n.element {
                GroupElement::SU2(m) => HaarNode { element: GroupElement::SUd(m), weight: n.weight },
                _ => unreachable!(),
            })
            .collect(),
        (g, Quadrature::Exact { .. }) => haar_nodes(g, Quadrature::MonteCarlo { samples: 4096, seed: 0 }),
        (g, Quadrature::MonteCarlo { samples, seed }) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = 1.0 / samples as f64;
            (0..samples)
                .map(|_| {
                    let element = match g {
                        GroupId::U1 => {
                            let u: f64 = rand::Rng::random(&mut rng);
                            GroupElement::Phase(2.0 * std::f64::consts::PI * u)
                        }
                        GroupId::SU2 => GroupElement::SU2(haar_special_unitary(2, &mut rng)),
                        GroupId::SUd(d) => GroupElement::SUd(haar_special_unitary(d, &mut rng)),
                    };
                    HaarNode { element, weight: w }
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{irrep_matrix, Irrep};
    use crate::linalg::{cr, Mat};
    use crate::tensor::{max_entangled_projector, Subsystem};

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..12 {
            let rule = gauss_legendre(n);
            for k in 0..(2 * n) {
                let got: f64 = rule.iter().map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!((got - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn u1_fourier_exactness() {
        let nodes = haar_nodes(GroupId::U1, Quadrature::Exact { degree: 4 });
        assert!(nodes.len() >= 5);
        for k in -4i64..=4 {
            let s: crate::linalg::C64 = nodes
                .iter()
                .map(|n| {
                    let GroupElement::Phase(p) = n.element else { panic!() };
                    crate::linalg::C64::from_polar(n.weight, k as f64 * p)
                })
                .sum();
            let expect = if k == 0 { 1.0 } else { 0.0 };
            assert!((s - cr(expect)).norm() < 1e-14);
        }
    }

    #[test]
    fn su2_character_orthogonality() {
        let nodes = haar_nodes(GroupId::SU2, Quadrature::Exact { degree: 8 });
        let chi = |two_j: u32, g: &GroupElement| irrep_matrix(&Irrep::SU2 { two_j }, g).unwrap().trace();
        for a in 0..5u32 {
            for b in 0..5u32 {
                let s: crate::linalg::C64 =
                    nodes.iter().map(|n| chi(a, &n.element) * chi(b, &n.element).conj() * n.weight).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((s - cr(expect)).norm() < 1e-10, "{a} {b}");
            }
        }
    }

    #[test]
    fn sud_schur_average() {
        let d = 3;
        let n = 4000;
        let nodes = haar_nodes(GroupId::SUd(d), Quadrature::MonteCarlo { samples: n, seed: 3 });
        let mut mean = Mat::zeros(d * d, d * d);
        let mut sq = Mat::zeros(d * d, d * d);
        for node in &nodes {
            let GroupElement::SUd(u) = &node.element else { panic!() };
            let x = u.kronecker(&u.map(|z| z.conj()));
            sq += x.map(|z| cr(z.norm_sqr())) * cr(node.weight);
            mean += x * cr(node.weight);
        }
        let target = max_entangled_projector(Subsystem::new("a", d), Subsystem::new("b", d)).unwrap();
        let target = target.matrix() / cr(d as f64);
        for i in 0..d * d {
            for j in 0..d * d {
                let var = (sq[(i, j)].re - mean[(i, j)].norm_sqr()).max(0.0);
                let sigma = (var / n as f64).sqrt().max(1e-12);
                assert!((mean[(i, j)] - target[(i, j)]).norm() <= 3.0 * sigma * 2f64.sqrt() + 1e-12);
            }
        }
    }
}

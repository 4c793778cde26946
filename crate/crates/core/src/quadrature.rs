//! Gauss rules from the Golub–Welsch eigenvalue problem, and the θ-rule
//! used by the generalized translation.

use crate::error::{domain, Result};
use crate::special::{gamma_pos, BesselIndex};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Nodes and weights on [−1, 1] for the weight (1−t)^a (1+t)^b.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return domain("Gauss rule needs at least one node");
        }
        if !(a > -1.0 && b > -1.0) {
            return domain(format!("Jacobi exponents must exceed -1, got ({a}, {b})"));
        }
        let mut m = DMatrix::<f64>::zeros(n, n);
        let ab = a + b;
        for i in 0..n {
            let k = i as f64;
            let s = 2.0 * k + ab;
            m[(i, i)] = if i == 0 {
                (b - a) / (ab + 2.0)
            } else {
                (b * b - a * a) / (s * (s + 2.0))
            };
            if i + 1 < n {
                let k1 = k + 1.0;
                let s1 = 2.0 * k1 + ab;
                let off = if i == 0 {
                    // the (1+a+b) factors cancel at the first step
                    (4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))).sqrt()
                } else {
                    (4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + ab)
                        / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0)))
                        .sqrt()
                };
                m[(i, i + 1)] = off;
                m[(i + 1, i)] = off;
            }
        }
        let mu0 = 2f64.powf(ab + 1.0) * gamma_pos(a + 1.0) * gamma_pos(b + 1.0) / gamma_pos(ab + 2.0);
        let eig = SymmetricEigen::new(m);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mu0 * v0 * v0)
            })
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn legendre(n: usize) -> Result<Self> {
        Self::jacobi(n, 0.0, 0.0)
    }

    /// ∫_lo^hi f for a rule with unit weight function.
    pub fn integrate(&self, lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (hi + lo);
        let h = 0.5 * (hi - lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(c + h * t))
            .sum::<f64>()
            * h
    }
}

/// C_α = Γ(α+1) / (√π Γ(α+1/2)).
pub fn c_alpha(alpha: f64) -> f64 {
    gamma_pos(alpha + 1.0) / (PI.sqrt() * gamma_pos(alpha + 0.5))
}

/// Quadrature for C_α ∫_0^π g(θ) sin^{2α}θ dθ, built from the Gauss–Jacobi
/// rule with exponents (α−1/2, α−1/2) after t = cos θ.
#[derive(Debug, Clone)]
pub struct JacobiRule {
    pub alpha: f64,
    pub order: usize,
    /// θ-abscissae in (0, π)
    pub nodes: Vec<f64>,
    /// cos θ at each node
    pub cos_nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub c_alpha: f64,
}

pub const DEFAULT_THETA_ORDER: usize = 64;

impl JacobiRule {
    pub fn new(alpha: BesselIndex, order: usize) -> Result<Self> {
        let a = alpha.value();
        let g = GaussRule::jacobi(order, a - 0.5, a - 0.5)?;
        let nodes = g.nodes.iter().map(|t| t.acos()).collect();
        Ok(JacobiRule {
            alpha: a,
            order,
            nodes,
            cos_nodes: g.nodes,
            weights: g.weights,
            c_alpha: c_alpha(a),
        })
    }

    /// Weights already multiplied by C_α, so they sum to one.
    pub fn normalized_weights(&self) -> impl Iterator<Item = f64> + '_ {
        self.weights.iter().map(move |w| w * self.c_alpha)
    }

    /// C_α ∫_0^π g(cos θ) sin^{2α}θ dθ.
    pub fn average(&self, mut g: impl FnMut(f64) -> f64) -> f64 {
        self.cos_nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * g(t))
            .sum::<f64>()
            * self.c_alpha
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let g = GaussRule::legendre(8).unwrap();
        // degree 15 is exact
        let v = g.integrate(-1.0, 2.0, |x| x.powi(15) - 3.0 * x.powi(4));
        let exact = (2f64.powi(16) - 1.0) / 16.0 - 3.0 * (32.0 + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
        let s: f64 = g.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments_match_beta_integrals() {
        // ∫ t^{2k} (1−t²)^{c} dt = B(k+1/2, c+1)
        for &c in &[-0.45, 0.0, 0.5, 1.7] {
            let g = GaussRule::jacobi(20, c, c).unwrap();
            for k in 0..10 {
                let num: f64 = g.nodes.iter().zip(&g.weights).map(|(t, w)| w * t.powi(2 * k)).sum();
                let kf = k as f64;
                let exact = gamma_pos(kf + 0.5) * gamma_pos(c + 1.0) / gamma_pos(kf + c + 1.5);
                assert!((num - exact).abs() < 1e-13 * exact, "c={c} k={k}");
            }
        }
    }

    #[test]
    fn asymmetric_jacobi() {
        // ∫_{-1}^{1} (1−t)^{0.5}(1+t)^{-0.3} dt against the Beta function
        let g = GaussRule::jacobi(12, 0.5, -0.3).unwrap();
        let s: f64 = g.weights.iter().sum();
        let exact = 2f64.powf(1.2) * gamma_pos(1.5) * gamma_pos(0.7) / gamma_pos(2.2);
        assert!((s - exact).abs() < 1e-13);
        assert!(GaussRule::jacobi(4, -1.0, 0.0).is_err());
    }

    #[test]
    fn theta_rule_normalization() {
        for &a in &[-0.45, -0.2, 0.0, 0.5, 1.0, 2.5, 6.0] {
            let r = JacobiRule::new(BesselIndex::new(a).unwrap(), DEFAULT_THETA_ORDER).unwrap();
            let s: f64 = r.normalized_weights().sum();
            assert!((s - 1.0).abs() < 1e-12, "alpha={a}: {s}");
            assert!(r.nodes.iter().all(|&t| t > 0.0 && t < PI));
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
    }

    #[test]
    fn theta_rule_against_direct_integral() {
        // α = 1: C_1 = 2/π, ∫ cos²θ sin²θ dθ = π/8
        let r = JacobiRule::new(BesselIndex::new(1.0).unwrap(), 16).unwrap();
        assert!((r.c_alpha - 2.0 / PI).abs() < 1e-14);
        let v = r.average(|t| t * t);
        assert!((v - 0.25).abs() < 1e-14);
    }
}

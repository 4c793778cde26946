//! Midpoint rule on (0, R] for integrands x^{2α+1} g(x²) j_α(x y), with
//! endpoint corrections on the first few nodes.
//!
//! The plain midpoint rule applied to x^s g(x²) j_α(xy), s = 2α+1, has an error
//! expansion driven by the non-smooth factor |x|^s at the origin. Writing
//! g(x²) = Σ_i g_i x^{2i} and integrating each |x|^{s+2i} j_α(θx) exactly
//! gives the generalized-zeta error Z_{s+2i}(θ) per monomial. The corrections
//! fit g_i from the first P samples and subtract those errors. For
//! half-integer α every Z vanishes and the rule is the plain midpoint rule.

use crate::special::{dirichlet_eta, gamma_pos, j_nu};
use std::f64::consts::PI;

/// Number of near-origin nodes carrying corrections.
pub const CORRECTION_ORDER: usize = 8;

/// Midpoint-rule error for |x|^ν j_α(θx) at unit spacing (θ ∈ [0, π]).
pub fn midpoint_error(alpha: f64, nu: f64, theta: f64) -> f64 {
    let s = sin_half_pi(nu);
    if s == 0.0 {
        return 0.0;
    }
    let two_pi = 2.0 * PI;
    let ratio = theta * theta / (two_pi * two_pi);
    // g_j = Γ(ν+1+j)/j! · M_j θ^j (2π)^{−(ν+1+j)}, M_j the normalized Jacobi moments of t^j
    let mut g = gamma_pos(nu + 1.0) * two_pi.powf(-(nu + 1.0));
    let mut total = 0.0;
    let mut j = 0usize;
    loop {
        let jf = j as f64;
        let term = g * dirichlet_eta(nu + 1.0 + jf);
        total += term;
        if (jf > nu + 10.0 && term.abs() < 1e-18 * total.abs()) || j > 800 || g == 0.0 {
            break;
        }
        g *= (nu + jf + 1.0) * (nu + jf + 2.0) / ((jf + 1.0) * (jf + 2.0)) * ratio * (jf + 1.0)
            / (2.0 * alpha + 2.0 + jf);
        j += 2;
    }
    2.0 * s * total
}

/// sin(πν/2), exactly zero when ν is an even integer.
fn sin_half_pi(nu: f64) -> f64 {
    let half = 0.5 * nu;
    if half.fract() == 0.0 {
        0.0
    } else {
        (PI * half).sin()
    }
}

/// Coefficients c[i][j] with g_i ≈ Σ_j c[i][j] g((j+½)²) at unit spacing:
/// the monomial coefficients of the Lagrange basis on t_j = (j+½)².
fn lagrange_monomials(p: usize) -> Vec<Vec<f64>> {
    let t: Vec<f64> = (0..p).map(|j| (j as f64 + 0.5).powi(2)).collect();
    let mut c = vec![vec![0.0; p]; p];
    for j in 0..p {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for (m, &tm) in t.iter().enumerate() {
            if m == j {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (k, &a) in poly.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= tm * a;
            }
            poly = next;
            denom *= t[j] - tm;
        }
        for i in 0..p {
            c[i][j] = poly[i] / denom;
        }
    }
    c
}

/// Corrected midpoint rule on nodes (j+½)h, j = 0..n.
#[derive(Debug, Clone)]
pub struct RadialRule {
    pub alpha: f64,
    pub h: f64,
    pub nodes: Vec<f64>,
    order: usize,
    lagrange: Vec<Vec<f64>>,
}

impl RadialRule {
    pub fn new(alpha: f64, n: usize, h: f64) -> Self {
        let order = CORRECTION_ORDER.min(n);
        RadialRule {
            alpha,
            h,
            nodes: (0..n).map(|j| (j as f64 + 0.5) * h).collect(),
            order,
            lagrange: lagrange_monomials(order),
        }
    }

    fn s(&self) -> f64 {
        2.0 * self.alpha + 1.0
    }

    /// Per-node correction for target frequency y (length = order).
    fn correction(&self, y: f64) -> Vec<f64> {
        let theta = y * self.h;
        let mut out = vec![0.0; self.order];
        if theta > PI * (1.0 + 1e-12) {
            // beyond the grid's Nyquist frequency the expansion does not apply
            return out;
        }
        let s = self.s();
        let scale = self.h.powf(s + 1.0);
        for i in 0..self.order {
            let z = midpoint_error(self.alpha, s + 2.0 * i as f64, theta);
            if z == 0.0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o -= scale * z * self.lagrange[i][j];
            }
        }
        out
    }

    /// Row of the rule for ∫ x^s f(x) j_α(x y) dx ≈ Σ_j row[j] f(x_j).
    pub fn row(&self, y: f64) -> Vec<f64> {
        let s = self.s();
        let mut row: Vec<f64> = self
            .nodes
            .iter()
            .map(|&x| self.h * x.powf(s) * j_nu(self.alpha, x * y))
            .collect();
        for (j, c) in self.correction(y).into_iter().enumerate() {
            row[j] += c;
        }
        row
    }

    /// Weights for ∫ x^s f(x) dx.
    pub fn weights(&self) -> Vec<f64> {
        self.row(0.0)
    }

    /// Row-major matrix, one row per target.
    pub fn matrix(&self, targets: &[f64]) -> Vec<f64> {
        use rayon::prelude::*;
        let n = self.nodes.len();
        let mut m = vec![0.0; targets.len() * n];
        m.par_chunks_mut(n)
            .zip(targets.par_iter())
            .for_each(|(dst, &y)| dst.copy_from_slice(&self.row(y)));
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussRule;

    /// Midpoint error by brute force: alternating Hurwitz-type sum under a Jacobi
    /// average, summed with pairwise averaging of partial sums.
    fn midpoint_error_direct(alpha: f64, nu: f64, theta: f64) -> f64 {
        let g = GaussRule::jacobi(60, alpha - 0.5, alpha - 0.5).unwrap();
        let ca = crate::quadrature::c_alpha(alpha);
        let mut acc = 0.0;
        for (&t, &w) in g.nodes.iter().zip(&g.weights) {
            let u = theta * t;
            let mut partial = 0.0;
            let mut prev = 0.0;
            let nmax = 20000;
            for n in 1..=nmax {
                let nn = 2.0 * PI * n as f64;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                prev = partial;
                partial += sign * ((nn - u).powf(-nu - 1.0) + (nn + u).powf(-nu - 1.0));
            }
            acc += w * 0.5 * (partial + prev);
        }
        -gamma_pos(nu + 1.0) * (PI * nu / 2.0).sin() * ca * acc
    }

    #[test]
    fn series_matches_direct_sum() {
        for &(a, nu, th) in &[(1.0, 3.0, 0.0), (1.0, 3.0, 2.0), (1.0, 7.0, 3.0), (0.25, 5.5, 1.0), (2.0, 5.0, 3.1)] {
            let s = midpoint_error(a, nu, th);
            let d = midpoint_error_direct(a, nu, th);
            assert!((s - d).abs() < 1e-10 * d.abs().max(1e-12), "{a} {nu} {th}: {s} vs {d}");
        }
    }

    #[test]
    fn origin_value_is_hurwitz_zeta() {
        // Z_ν(0) = ζ(−ν, ½) = (2^{−ν} − 1) ζ(−ν); ζ(−3) = 1/120
        let z = midpoint_error(1.0, 3.0, 0.0);
        assert!((z - (0.125 - 1.0) / 120.0).abs() < 1e-16);
    }

    #[test]
    fn half_integer_rule_is_plain_midpoint() {
        let r = RadialRule::new(0.5, 32, 0.25);
        let w = r.weights();
        for (j, &x) in r.nodes.iter().enumerate() {
            assert_eq!(w[j], 0.25 * x * x);
        }
    }

    #[test]
    fn lagrange_fit_is_exact_on_polynomials() {
        let c = lagrange_monomials(4);
        // g(t) = 2 − t + 0.5 t³ sampled at t_j = (j+½)²
        let samples: Vec<f64> = (0..4)
            .map(|j| {
                let t = (j as f64 + 0.5).powi(2);
                2.0 - t + 0.5 * t * t * t
            })
            .collect();
        let coef: Vec<f64> = (0..4).map(|i| (0..4).map(|j| c[i][j] * samples[j]).sum()).collect();
        for (a, b) in coef.iter().zip([2.0, -1.0, 0.0, 0.5]) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn corrected_weights_integrate_gaussian_moments() {
        // ∫_0^∞ x^{2α+1} e^{−x²/2} dx = 2^α Γ(α+1)
        for &a in &[-0.3, 0.0, 0.25, 1.0, 2.0, 3.3] {
            let r = RadialRule::new(a, 128, 12.0 / 128.0);
            let w = r.weights();
            assert!(w.iter().all(|&v| v > 0.0), "alpha={a}");
            let v: f64 = r.nodes.iter().zip(&w).map(|(x, w)| w * (-0.5 * x * x).exp()).sum();
            let exact = 2f64.powf(a) * gamma_pos(a + 1.0);
            assert!((v / exact - 1.0).abs() < 1e-10, "alpha={a}: {v} vs {exact}");
        }
    }

    #[test]
    fn corrected_rows_reproduce_hankel_pairs() {
        // ∫ x^{2α+1} e^{−x²/2} j_α(xy) dx = 2^α Γ(α+1) e^{−y²/2}
        let n = 256;
        let r = RadialRule::new(1.0, n, 12.0 / n as f64);
        for k in [0usize, 7, 40, 120, 255] {
            let y = (k as f64 + 0.5) * PI / 12.0;
            let row = r.row(y);
            let v: f64 = r.nodes.iter().zip(&row).map(|(x, w)| w * (-0.5 * x * x).exp()).sum();
            let exact = 2.0 * (-0.5 * y * y).exp();
            assert!((v - exact).abs() < 1e-13, "k={k}: {v} vs {exact}");
        }
    }
}

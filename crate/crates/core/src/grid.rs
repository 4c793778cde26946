//! Parameters, the measure μ_α and tensor grids with their spectral duals.

use crate::error::{Error, Result};
use crate::radial::RadialRule;
use crate::special::{gamma_pos, BesselIndex};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeinsteinParams {
    pub d: usize,
    pub alpha: BesselIndex,
}

impl WeinsteinParams {
    pub fn new(d: usize, alpha: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("lateral dimension d must be at least 1".into()));
        }
        Ok(WeinsteinParams { d, alpha: BesselIndex::new(alpha)? })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.value()
    }

    /// Hankel order of the radial reduction, α + d/2.
    pub fn nu(&self) -> f64 {
        self.alpha() + 0.5 * self.d as f64
    }

    /// 2α + d + 2: the dilation exponent of φ_a and of the scale measure.
    pub fn homogeneity(&self) -> f64 {
        2.0 * self.alpha() + self.d as f64 + 2.0
    }

    /// Constant in front of x_{d+1}^{2α+1} dx along the radial axis.
    pub fn radial_constant(&self) -> f64 {
        1.0 / (2f64.powf(self.alpha()) * gamma_pos(self.alpha() + 1.0))
    }

    /// Constant per lateral axis.
    pub fn lateral_constant(&self) -> f64 {
        1.0 / (2.0 * PI).sqrt()
    }

    /// dμ_α = measure_constant · x_{d+1}^{2α+1} dx.
    pub fn measure_constant(&self) -> f64 {
        self.lateral_constant().powi(self.d as i32) * self.radial_constant()
    }

    /// a_α = 1/(2^{α+d/2} Γ(α+d/2+1)), the constant of the radial reduction.
    pub fn radial_reduction_constant(&self) -> f64 {
        let nu = self.nu();
        1.0 / (2f64.powf(nu) * gamma_pos(nu + 1.0))
    }
}

/// Tensor grid: d uniform lateral axes on [−L, L) and the radial midpoint
/// axis on (0, R], with the matching spectral grid.
#[derive(Debug, Clone)]
pub struct Grid {
    pub params: WeinsteinParams,
    pub n_lat: usize,
    pub lateral_extent: f64,
    pub n_rad: usize,
    pub radial_extent: f64,
    pub lateral_nodes: Vec<f64>,
    pub radial_nodes: Vec<f64>,
    pub lateral_freqs: Vec<f64>,
    pub radial_freqs: Vec<f64>,
    /// radial μ_α weights including the radial constant
    pub radial_weights: Vec<f64>,
    pub spectral_radial_weights: Vec<f64>,
    forward_radial: Arc<Vec<f64>>,
    inverse_radial: Arc<Vec<f64>>,
}

impl Grid {
    pub fn new(params: WeinsteinParams, n_lat: usize, l: f64, n_rad: usize, r: f64) -> Result<Self> {
        if n_lat < 8 || n_lat % 2 != 0 {
            return Err(Error::Config(format!("n_lat must be even and at least 8, got {n_lat}")));
        }
        if n_rad < 8 {
            return Err(Error::Config(format!("n_rad must be at least 8, got {n_rad}")));
        }
        if !(l > 0.0 && l.is_finite() && r > 0.0 && r.is_finite()) {
            return Err(Error::Config(format!("extents must be positive, got L={l}, R={r}")));
        }
        let h = 2.0 * l / n_lat as f64;
        let lateral_nodes = (0..n_lat).map(|i| -l + i as f64 * h).collect();
        let dl = PI / l;
        let half = (n_lat / 2) as f64;
        let lateral_freqs = (0..n_lat).map(|j| (j as f64 - half) * dl).collect();

        let alpha = params.alpha();
        let cr = params.radial_constant();
        let spatial = RadialRule::new(alpha, n_rad, r / n_rad as f64);
        let spectral = RadialRule::new(alpha, n_rad, PI / r);
        let radial_nodes = spatial.nodes.clone();
        let radial_freqs = spectral.nodes.clone();
        let scale = |v: Vec<f64>| v.into_iter().map(|w| w * cr).collect::<Vec<_>>();
        let forward = scale(spatial.matrix(&radial_freqs));
        let inverse = scale(spectral.matrix(&radial_nodes));
        Ok(Grid {
            params,
            n_lat,
            lateral_extent: l,
            n_rad,
            radial_extent: r,
            lateral_nodes,
            radial_nodes,
            lateral_freqs,
            radial_freqs,
            radial_weights: scale(spatial.weights()),
            spectral_radial_weights: scale(spectral.weights()),
            forward_radial: Arc::new(forward),
            inverse_radial: Arc::new(inverse),
        })
    }

    /// Same node sets and parameters.
    pub fn same_layout(&self, other: &Grid) -> bool {
        self.params == other.params
            && self.n_lat == other.n_lat
            && self.n_rad == other.n_rad
            && self.lateral_extent == other.lateral_extent
            && self.radial_extent == other.radial_extent
    }

    pub fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::Dimension("fields live on different grids".into()))
        }
    }

    pub fn d(&self) -> usize {
        self.params.d
    }

    pub fn lateral_spacing(&self) -> f64 {
        2.0 * self.lateral_extent / self.n_lat as f64
    }

    pub fn radial_spacing(&self) -> f64 {
        self.radial_extent / self.n_rad as f64
    }

    pub fn lateral_freq_spacing(&self) -> f64 {
        PI / self.lateral_extent
    }

    pub fn radial_freq_spacing(&self) -> f64 {
        PI / self.radial_extent
    }

    /// Λ_max = π N_rad / R.
    pub fn radial_freq_extent(&self) -> f64 {
        PI * self.n_rad as f64 / self.radial_extent
    }

    pub fn lateral_count(&self) -> usize {
        self.n_lat.pow(self.d() as u32)
    }

    pub fn len(&self) -> usize {
        self.lateral_count() * self.n_rad
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Lateral multi-index of a flat lateral position (first axis slowest).
    pub fn lateral_index(&self, mut flat: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = flat % self.n_lat;
            flat /= self.n_lat;
        }
    }

    fn fill_point(&self, idx: usize, lat: &[f64], rad: &[f64], out: &mut [f64]) {
        let d = self.d();
        let mut flat = idx / self.n_rad;
        for m in (0..d).rev() {
            out[m] = lat[flat % self.n_lat];
            flat /= self.n_lat;
        }
        out[d] = rad[idx % self.n_rad];
    }

    pub fn node_into(&self, idx: usize, out: &mut [f64]) {
        self.fill_point(idx, &self.lateral_nodes, &self.radial_nodes, out)
    }

    pub fn freq_into(&self, idx: usize, out: &mut [f64]) {
        self.fill_point(idx, &self.lateral_freqs, &self.radial_freqs, out)
    }

    pub fn node(&self, idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.d() + 1];
        self.node_into(idx, &mut p);
        p
    }

    pub fn freq(&self, idx: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.d() + 1];
        self.freq_into(idx, &mut p);
        p
    }

    /// μ_α quadrature weight of spatial node `idx`.
    pub fn mu_weight(&self, idx: usize) -> f64 {
        self.lateral_cell() * self.radial_weights[idx % self.n_rad]
    }

    /// μ_α quadrature weight of spectral node `idx`.
    pub fn spectral_weight(&self, idx: usize) -> f64 {
        self.spectral_lateral_cell() * self.spectral_radial_weights[idx % self.n_rad]
    }

    fn lateral_cell(&self) -> f64 {
        (self.lateral_spacing() * self.params.lateral_constant()).powi(self.d() as i32)
    }

    fn spectral_lateral_cell(&self) -> f64 {
        (self.lateral_freq_spacing() * self.params.lateral_constant()).powi(self.d() as i32)
    }

    pub fn mu_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.mu_weight(i)).collect()
    }

    pub fn spectral_weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.spectral_weight(i)).collect()
    }

    /// Row-major N_rad × N_rad matrix taking radial samples to radial spectra.
    pub fn forward_radial(&self) -> &[f64] {
        &self.forward_radial
    }

    pub fn inverse_radial(&self) -> &[f64] {
        &self.inverse_radial
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64) -> WeinsteinParams {
        WeinsteinParams::new(1, alpha).unwrap()
    }

    #[test]
    fn small_grid_layout() {
        let g = Grid::new(p(0.5), 16, 8.0, 16, 8.0).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.lateral_spacing(), 1.0);
        for k in 0..16 {
            assert_eq!(g.radial_nodes[k], (k as f64 + 0.5) * 0.5);
        }
        // weights follow x₂² for α = 1/2 (no corrections)
        let c = g.params.measure_constant();
        for idx in 0..g.len() {
            let x = g.node(idx);
            let expect = c * 1.0 * 0.5 * x[1] * x[1];
            assert!((g.mu_weight(idx) - expect).abs() < 1e-15 * expect);
        }
        assert_eq!(g.lateral_nodes[0], -8.0);
        assert_eq!(g.lateral_freqs[8], 0.0);
        assert!((g.radial_freq_extent() - PI * 2.0).abs() < 1e-15);
    }

    #[test]
    fn lateral_nodes_symmetric() {
        let g = Grid::new(p(1.0), 32, 5.0, 8, 5.0).unwrap();
        // x_{N−i} = −x_i for i ≥ 1 (x_0 = −L has its mirror at the excluded endpoint)
        for i in 1..32 {
            assert!((g.lateral_nodes[32 - i] + g.lateral_nodes[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn invalid_sizes() {
        assert!(matches!(Grid::new(p(0.5), 7, 1.0, 8, 1.0), Err(Error::Config(_))));
        assert!(Grid::new(p(0.5), 6, 1.0, 8, 1.0).is_err());
        assert!(Grid::new(p(0.5), 8, 1.0, 4, 1.0).is_err());
        assert!(Grid::new(p(0.5), 8, -1.0, 8, 1.0).is_err());
        assert!(WeinsteinParams::new(0, 0.5).is_err());
        assert!(WeinsteinParams::new(1, -0.5).is_err());
    }

    #[test]
    fn weights_positive_and_multi_index() {
        let params = WeinsteinParams::new(2, 0.3).unwrap();
        let g = Grid::new(params, 8, 3.0, 8, 3.0).unwrap();
        assert!(g.mu_weights().iter().all(|&w| w > 0.0));
        assert!(g.spectral_weights().iter().all(|&w| w > 0.0));
        let idx = (3 * 8 + 5) * 8 + 2;
        let x = g.node(idx);
        assert_eq!(x[0], g.lateral_nodes[3]);
        assert_eq!(x[1], g.lateral_nodes[5]);
        assert_eq!(x[2], g.radial_nodes[2]);
        let mut mi = [0; 2];
        g.lateral_index(3 * 8 + 5, &mut mi);
        assert_eq!(mi, [3, 5]);
    }

    #[test]
    fn radial_reduction_constant_matches_measure() {
        // a_α ∫ r^{2ν+1} e^{−r²/2} dr = 1
        for &a in &[0.0, 0.5, 1.0, 2.5] {
            let w = WeinsteinParams::new(1, a).unwrap();
            let nu = w.nu();
            let moment = 2f64.powf(nu) * gamma_pos(nu + 1.0);
            assert!((w.radial_reduction_constant() * moment - 1.0).abs() < 1e-14);
        }
    }
}

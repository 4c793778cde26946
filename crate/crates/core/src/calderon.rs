//! The Calderón multiplier K_{γ,δ} and the scale-truncated reconstruction
//! f_{γ,δ}, by the spectral multiplier and by the direct double integral.

use crate::error::{domain, Error, Result};
use crate::field::{inner_values, Field};
use crate::grid::Grid;
use crate::quadrature::JacobiRule;
use crate::transform::{forward, inverse, Spectrum};
use crate::translation::convolve_direct;
use crate::wavelet::{dilated_spectrum, ScaleGrid, WaveletPair};
use num_complex::Complex64 as C64;
use serde::Serialize;

/// Tolerance below which C_{φ,ψ} counts as zero, relative to √(C_φ C_ψ).
const ZERO_CONSTANT: f64 = 1e-12;

/// Relative integrand mass above which a spectral node counts as active.
/// Below it K sits at the level of the signed endpoint weights' round-off.
pub const ACTIVE_MASS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalderonWindow {
    pub gamma: f64,
    pub delta: f64,
}

impl CalderonWindow {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !(gamma > 0.0 && delta > gamma && delta.is_finite()) {
            return domain(format!("window must satisfy 0 < gamma < delta < inf, got ({gamma}, {delta})"));
        }
        Ok(CalderonWindow { gamma, delta })
    }
}

/// K_{γ,δ} on the spectral nodes.
#[derive(Debug, Clone)]
pub struct MultiplierProfile {
    pub window: CalderonWindow,
    pub values: Vec<C64>,
    /// Σ_s |w_s| |F(φ)(a_s λ) F(ψ)(a_s λ)| / |C_{φ,ψ}|, the integrand mass per node
    pub mass: Vec<f64>,
}

impl MultiplierProfile {
    /// Nodes whose integrand mass exceeds `rel` times the largest.
    pub fn active(&self, rel: f64) -> Vec<usize> {
        let top = self.mass.iter().cloned().fold(0.0, f64::max);
        (0..self.values.len()).filter(|&i| self.mass[i] > rel * top && self.mass[i] > 0.0).collect()
    }
}

/// Enforces the two-wavelet hypotheses: admissible pair with probe-independent
/// constants and C_{φ,ψ} ≠ 0.
pub fn check_assumptions(pair: &WaveletPair) -> Result<C64> {
    pair.check_two_wavelet()
        .map_err(|e| Error::Assumption(format!("(A1) not a two-wavelet pair: {e}")))?;
    let c = pair.c_phi_psi.mean;
    let scale = (pair.c_phi.mean.re * pair.c_psi.mean.re).sqrt();
    if c.norm() <= ZERO_CONSTANT * scale {
        return Err(Error::Assumption(format!("(A2) two-wavelet constant vanishes: C_phi_psi = {c}")));
    }
    Ok(c)
}

/// K_{γ,δ}(λ) = (1/C_{φ,ψ}) ∫_γ^δ conj(F(φ)(aλ)) F(ψ)(aλ) da/a.
pub fn multiplier(pair: &WaveletPair, window: CalderonWindow, grid: &Grid, scales: &ScaleGrid) -> Result<MultiplierProfile> {
    Ok(multipliers(pair, &[window], grid, scales)?.remove(0))
}

/// K for several windows at once; each scale's spectra are evaluated once.
pub fn multipliers(pair: &WaveletPair, windows: &[CalderonWindow], grid: &Grid, scales: &ScaleGrid) -> Result<Vec<MultiplierProfile>> {
    let c = check_assumptions(pair)?;
    let weights: Vec<Vec<f64>> = windows.iter().map(|w| scales.window_weights(w.gamma, w.delta)).collect::<Result<_>>()?;
    let mut values = vec![vec![C64::new(0.0, 0.0); grid.len()]; windows.len()];
    let mut mass = vec![vec![0.0; grid.len()]; windows.len()];
    for (s, &a) in scales.nodes.iter().enumerate() {
        if weights.iter().all(|w| w[s] == 0.0) {
            continue;
        }
        let p = dilated_spectrum(&pair.phi, a, grid)?;
        let q = dilated_spectrum(&pair.psi, a, grid)?;
        let t: Vec<C64> = p.values.iter().zip(&q.values).map(|(u, v)| u.conj() * v).collect();
        for (k, w) in weights.iter().enumerate() {
            let ws = w[s];
            if ws == 0.0 {
                continue;
            }
            for (i, ti) in t.iter().enumerate() {
                values[k][i] += ti * ws;
                mass[k][i] += ti.norm() * ws.abs();
            }
        }
    }
    let cn = c.norm();
    Ok(windows
        .iter()
        .zip(values.into_iter().zip(mass))
        .map(|(&window, (mut v, mut m))| {
            v.iter_mut().for_each(|x| *x /= c);
            m.iter_mut().for_each(|x| *x /= cn);
            MultiplierProfile { window, values: v, mass: m }
        })
        .collect())
}

/// f_{γ,δ} = F⁻¹[K_{γ,δ} · F f].
pub fn reconstruct_spectral(f: &Field, pair: &WaveletPair, window: CalderonWindow, grid: &Grid, scales: &ScaleGrid) -> Result<Field> {
    let k = multiplier(pair, window, grid, scales)?;
    let s = forward(f, grid)?;
    let values = s.values.iter().zip(&k.values).map(|(a, b)| a * b).collect();
    inverse(&Spectrum::new(grid, values)?, grid)
}

/// f_{γ,δ} = (1/C_{φ,ψ}) ∫_γ^δ (f̌ ∗ φ̄_a)̌ ∗ ψ_a da/a with both convolutions by
/// direct quadrature. Oracle-size grids only; scales are summed in ascending order.
pub fn reconstruct_direct(
    f: &Field,
    pair: &WaveletPair,
    window: CalderonWindow,
    grid: &Grid,
    scales: &ScaleGrid,
    rule: &JacobiRule,
) -> Result<Field> {
    let c = check_assumptions(pair)?;
    let w = scales.window_weights(window.gamma, window.delta)?;
    let f_check = f.check().sample(grid)?;
    let mut acc = vec![C64::new(0.0, 0.0); grid.len()];
    for (&a, &ws) in scales.nodes.iter().zip(&w) {
        if ws == 0.0 {
            continue;
        }
        let phi_bar = pair.phi.dilate(a)?.conj();
        let inner = convolve_direct(&phi_bar, &f_check, grid, rule)?.check();
        let term = convolve_direct(&pair.psi.dilate(a)?, &inner, grid, rule)?;
        let tv = &term.as_sampled().expect("sampled").values;
        for (x, t) in acc.iter_mut().zip(tv) {
            *x += t * ws;
        }
    }
    acc.iter_mut().for_each(|v| *v /= c);
    Field::from_values(grid, acc)
}

/// Largest ratio ‖F((f̌∗φ̄_a)̌∗ψ_a)‖₂ / (‖f‖₂ ‖F φ‖_∞ ‖F ψ‖_∞) over the scales,
/// evaluated on the spectral side.
pub fn scale_term_bound_ratio(f: &Field, pair: &WaveletPair, grid: &Grid, scales: &ScaleGrid) -> Result<f64> {
    let fh = forward(f, grid)?;
    let nf = f.norm_p(grid, 2.0)?;
    let sup_p = dilated_spectrum(&pair.phi, 1.0, grid)?.max_abs();
    let sup_q = dilated_spectrum(&pair.psi, 1.0, grid)?.max_abs();
    let bound = nf * sup_p * sup_q;
    let mut worst: f64 = 0.0;
    for &a in &scales.nodes {
        let p = dilated_spectrum(&pair.phi, a, grid)?;
        let q = dilated_spectrum(&pair.psi, a, grid)?;
        let t: Vec<C64> = (0..grid.len()).map(|i| fh.values[i] * p.values[i].conj() * q.values[i]).collect();
        let n = Spectrum::new(grid, t)?.norm2();
        if bound > 0.0 {
            worst = worst.max(n / bound);
        } else if n > 0.0 {
            worst = f64::INFINITY;
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    pub delta: f64,
    pub l2_error: f64,
    pub relative_error: f64,
    pub k_min: f64,
    pub k_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub f_norm: f64,
    pub monotone: bool,
    pub final_relative_error: f64,
    pub pass: bool,
}

pub const SWEEP_SLACK: f64 = 1e-9;
pub const SWEEP_FINAL_TOLERANCE: f64 = 1e-3;

/// Windows (2^{−k}, 2^{k}) for k = 0..=k_max; k = 0 is the empty window.
pub fn dyadic_windows(k_max: u32) -> Vec<(f64, f64)> {
    (0..=k_max).map(|k| (0.5f64.powi(k as i32), 2f64.powi(k as i32))).collect()
}

/// ‖f_{γ,δ} − f‖₂ for nested windows, by the spectral route. A window with
/// γ = δ is empty: f_{γ,δ} = 0.
pub fn convergence_sweep(f: &Field, pair: &WaveletPair, windows: &[(f64, f64)], grid: &Grid, scales: &ScaleGrid) -> Result<SweepReport> {
    check_assumptions(pair)?;
    if windows.is_empty() {
        return domain("sweep needs at least one window");
    }
    for &(g, d) in windows {
        if !(g > 0.0 && d >= g && d.is_finite()) {
            return domain(format!("invalid window ({g}, {d})"));
        }
    }
    for w in windows.windows(2) {
        if w[1].0 > w[0].0 || w[1].1 < w[0].1 {
            return domain("sweep windows must be nested: gamma nonincreasing, delta nondecreasing");
        }
    }
    let fv = f.values_on(grid)?;
    let f_norm = inner_values(grid, &fv, &fv).re.sqrt();
    let proper: Vec<CalderonWindow> = windows.iter().filter(|w| w.0 < w.1).map(|&(g, d)| CalderonWindow::new(g, d)).collect::<Result<_>>()?;
    let mut profiles = multipliers(pair, &proper, grid, scales)?.into_iter();
    let s = forward(f, grid)?;
    let mut rows = Vec::with_capacity(windows.len());
    for &(g, d) in windows {
        let (l2, kmin, kmax) = if g == d {
            (f_norm, 0.0, 0.0)
        } else {
            let k = profiles.next().expect("one profile per proper window");
            let prod = s.values.iter().zip(&k.values).map(|(a, b)| a * b).collect();
            let rec = inverse(&Spectrum::new(grid, prod)?, grid)?;
            let rv = &rec.as_sampled().expect("sampled").values;
            let diff: Vec<C64> = rv.iter().zip(&fv).map(|(a, b)| a - b).collect();
            let act = k.active(ACTIVE_MASS);
            let kmin = act.iter().map(|&i| k.values[i].re).fold(f64::INFINITY, f64::min);
            let kmax = act.iter().map(|&i| k.values[i].re).fold(f64::NEG_INFINITY, f64::max);
            (inner_values(grid, &diff, &diff).re.sqrt(), kmin, kmax)
        };
        let rel = if f_norm > 0.0 { l2 / f_norm } else { 0.0 };
        rows.push(SweepRow { gamma: g, delta: d, l2_error: l2, relative_error: rel, k_min: kmin, k_max: kmax });
    }
    let monotone = rows.windows(2).all(|w| w[1].l2_error <= w[0].l2_error + SWEEP_SLACK);
    let final_relative_error = rows.last().map(|r| r.relative_error).unwrap_or(0.0);
    let pass = monotone && (rows.len() == 1 || final_relative_error <= SWEEP_FINAL_TOLERANCE);
    Ok(SweepReport { rows, f_norm, monotone, final_relative_error, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WeinsteinParams;
    use crate::quadrature::DEFAULT_THETA_ORDER;
    use crate::special::{regularized_lower_gamma, BesselIndex};
    use crate::wavelet::default_probes;

    fn hermite_pair(p: WeinsteinParams, s: &ScaleGrid) -> WaveletPair {
        WaveletPair::new(Field::spectral_hermite(p, 1).unwrap(), Field::spectral_hermite(p, 2).unwrap(), s, &default_probes(p.d)).unwrap()
    }

    #[test]
    fn window_validation() {
        assert!(CalderonWindow::new(1.0, 1.0).is_err());
        assert!(CalderonWindow::new(0.0, 1.0).is_err());
        assert!(CalderonWindow::new(2.0, f64::INFINITY).is_err());
        assert!(CalderonWindow::new(0.5, 2.0).is_ok());
    }

    #[test]
    fn multiplier_matches_incomplete_gamma() {
        let p = WeinsteinParams::new(1, 1.0).unwrap();
        let g = Grid::new(p, 64, 12.0, 64, 12.0).unwrap();
        let s = ScaleGrid::default();
        let pair = hermite_pair(p, &s);
        let win = CalderonWindow::new(0.25, 4.0).unwrap();
        let k = multiplier(&pair, win, &g, &s).unwrap();
        for i in 0..g.len() {
            let l = g.freq(i);
            let r2: f64 = l.iter().map(|v| v * v).sum();
            let exact = regularized_lower_gamma(3.0, 16.0 * r2).unwrap() - regularized_lower_gamma(3.0, r2 / 16.0).unwrap();
            assert!((k.values[i] - exact).norm() < 1e-6, "{l:?}");
        }
    }

    #[test]
    fn vanishing_cross_constant_is_an_assumption_violation() {
        let p = WeinsteinParams::new(1, 1.0).unwrap();
        let s = ScaleGrid::new(1.0 / 64.0, 0.5, 513).unwrap();
        let pr = crate::wavelet::probes(1, 16.0, 48.0, 8);
        let pair = WaveletPair::new(Field::spectral_bump(p, 1.0, 2.0).unwrap(), Field::spectral_bump(p, 3.0, 4.0).unwrap(), &s, &pr).unwrap();
        assert!(pair.is_two_wavelet(), "{:?} {:?} {}", pair.c_phi, pair.c_psi, pair.constancy_spread);
        let g = Grid::new(p, 16, 6.0, 16, 6.0).unwrap();
        let win = CalderonWindow::new(0.1, 0.2).unwrap();
        assert!(matches!(multiplier(&pair, win, &g, &s), Err(Error::Assumption(_))));
        let f = Field::gaussian(p, 1.0).unwrap();
        assert!(matches!(convergence_sweep(&f, &pair, &[(0.1, 0.2)], &g, &s), Err(Error::Assumption(_))));
    }

    #[test]
    fn zero_field_reconstructs_to_zero() {
        let p = WeinsteinParams::new(1, 0.5).unwrap();
        let g = Grid::new(p, 16, 6.0, 16, 6.0).unwrap();
        let s = ScaleGrid::default();
        let pair = hermite_pair(p, &s);
        let win = CalderonWindow::new(0.5, 2.0).unwrap();
        let r = reconstruct_spectral(&Field::zero(p), &pair, win, &g, &s).unwrap();
        assert!(r.is_zero());
    }

    #[test]
    fn sweep_rejects_non_nested_windows() {
        let p = WeinsteinParams::new(1, 0.5).unwrap();
        let g = Grid::new(p, 16, 6.0, 16, 6.0).unwrap();
        let s = ScaleGrid::default();
        let pair = hermite_pair(p, &s);
        let f = Field::gaussian(p, 1.0).unwrap();
        assert!(convergence_sweep(&f, &pair, &[(0.25, 4.0), (0.5, 8.0)], &g, &s).is_err());
        let one = convergence_sweep(&f, &pair, &[(0.25, 4.0)], &g, &s).unwrap();
        assert_eq!(one.rows.len(), 1);
    }

    #[test]
    fn direct_and_spectral_reconstruction_agree_on_small_grid() {
        let p = WeinsteinParams::new(1, 1.0).unwrap();
        let g = Grid::new(p, 32, 8.0, 32, 8.0).unwrap();
        let s = ScaleGrid::new(0.5, 2.0, 9).unwrap();
        let pair = hermite_pair(p, &ScaleGrid::default());
        let rule = JacobiRule::new(BesselIndex::new(1.0).unwrap(), DEFAULT_THETA_ORDER).unwrap();
        let f = Field::gaussian(p, 1.0).unwrap();
        let win = CalderonWindow::new(0.5, 2.0).unwrap();
        let a = reconstruct_spectral(&f, &pair, win, &g, &s).unwrap();
        let b = reconstruct_direct(&f, &pair, win, &g, &s, &rule).unwrap();
        let (a, b) = (&a.as_sampled().unwrap().values, &b.as_sampled().unwrap().values);
        let dev = a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-3, "{dev}");
    }
}

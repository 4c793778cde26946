//! Dilations, wavelet atoms, the continuous wavelet transform and the
//! admissibility constants of single wavelets and two-wavelet pairs.

use crate::error::{domain, Error, Result};
use crate::field::{inner_values, reflect_lateral, Field};
use crate::grid::Grid;
use crate::quadrature::{GaussRule, JacobiRule};
use crate::transform::{forward, inverse_values, Spectrum};
use crate::translation::{contract, translate, TranslationTable};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;

/// Relative probe spread accepted as "constant for almost all ξ".
pub const SPREAD_TOLERANCE: f64 = 1e-4;
const WINDOW_STENCIL: usize = 8;

/// Log-uniform scales on [a_min, a_max] with trapezoid weights for ∫ da/a.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaleGrid {
    pub a_min: f64,
    pub a_max: f64,
    pub n_scales: usize,
    pub nodes: Vec<f64>,
    pub log_weights: Vec<f64>,
}

impl Default for ScaleGrid {
    fn default() -> Self {
        ScaleGrid::new(1.0 / 64.0, 64.0, 129).expect("valid defaults")
    }
}

impl ScaleGrid {
    pub fn new(a_min: f64, a_max: f64, n_scales: usize) -> Result<Self> {
        if !(a_min > 0.0 && a_max > a_min && a_max.is_finite()) {
            return domain(format!("scale range must satisfy 0 < a_min < a_max, got [{a_min}, {a_max}]"));
        }
        if n_scales < 2 {
            return domain("scale grid needs at least 2 nodes");
        }
        let (u0, u1) = (a_min.ln(), a_max.ln());
        let du = (u1 - u0) / (n_scales - 1) as f64;
        let mut nodes: Vec<f64> = (0..n_scales).map(|i| (u0 + i as f64 * du).exp()).collect();
        nodes[0] = a_min;
        nodes[n_scales - 1] = a_max;
        let mut log_weights = vec![du; n_scales];
        log_weights[0] *= 0.5;
        log_weights[n_scales - 1] *= 0.5;
        Ok(ScaleGrid { a_min, a_max, n_scales, nodes, log_weights })
    }

    pub fn log_step(&self) -> f64 {
        (self.a_max / self.a_min).ln() / (self.n_scales - 1) as f64
    }

    /// Weights for ∫_γ^δ g(a) da/a: the exact integral over [ln γ, ln δ] of the
    /// piecewise degree-7 interpolant of g in ln a. Additive in the window.
    pub fn window_weights(&self, gamma: f64, delta: f64) -> Result<Vec<f64>> {
        if !(gamma > 0.0 && delta > gamma) {
            return domain(format!("window must satisfy 0 < gamma < delta, got ({gamma}, {delta})"));
        }
        let slack = 1e-12;
        if gamma < self.a_min * (1.0 - slack) || delta > self.a_max * (1.0 + slack) {
            return domain(format!(
                "window ({gamma}, {delta}) exceeds the scale grid [{}, {}]",
                self.a_min, self.a_max
            ));
        }
        let n = self.n_scales;
        let u0 = self.a_min.ln();
        let du = self.log_step();
        let ua = gamma.ln().max(u0);
        let ub = delta.ln().min(self.a_max.ln());
        let stencil = WINDOW_STENCIL.min(n);
        let gl = GaussRule::legendre(WINDOW_STENCIL)?;
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let (left, right) = (u0 + i as f64 * du, u0 + (i + 1) as f64 * du);
            let (s, t) = (ua.max(left), ub.min(right));
            if t <= s {
                continue;
            }
            let lo = (i + 1).saturating_sub(stencil / 2).min(n - stencil);
            for (&z, &gw) in gl.nodes.iter().zip(&gl.weights) {
                let u = 0.5 * (s + t) + 0.5 * (t - s) * z;
                let q = 0.5 * (t - s) * gw;
                let x = (u - u0) / du;
                for a in lo..lo + stencil {
                    let mut l = 1.0;
                    for b in lo..lo + stencil {
                        if b != a {
                            l *= (x - b as f64) / (a as f64 - b as f64);
                        }
                    }
                    w[a] += q * l;
                }
            }
        }
        Ok(w)
    }
}

/// φ_a(x) = a^{−(2α+d+2)} φ(x/a).
pub fn dilate(phi: &Field, a: f64) -> Result<Field> {
    phi.dilate(a)
}

/// φ_{a,x} = a^{α+1+d/2} τ_x φ_a, sampled on the grid.
pub fn wavelet_atom(phi: &Field, a: f64, x: &[f64], rule: &JacobiRule, grid: &Grid) -> Result<Field> {
    let phi_a = phi.dilate(a)?;
    let t = translate(&phi_a, x, rule, grid)?;
    Ok(t.scaled(C64::new(a.powf(0.5 * phi.params.homogeneity()), 0.0)))
}

/// F_W(φ_a) on the spectral nodes: closed form for analytic φ, the grid
/// transform of the resampled dilation otherwise.
pub fn dilated_spectrum(phi: &Field, a: f64, grid: &Grid) -> Result<Spectrum> {
    let phi_a = phi.dilate(a)?;
    if phi_a.as_analytic().is_some() {
        Spectrum::of_analytic(&phi_a, grid)
    } else {
        forward(&phi_a, grid)
    }
}

/// Φ_φ(f)(a, x) on scales × grid nodes, scale-major.
#[derive(Debug, Clone)]
pub struct CwtMatrix {
    pub scale_grid: ScaleGrid,
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl CwtMatrix {
    pub fn row(&self, s: usize) -> &[C64] {
        let n = self.grid.len();
        &self.values[s * n..(s + 1) * n]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// One scale of the fast path: a^{n/2} F⁻¹[F f · conj F(φ_a)] at −x'.
pub(crate) fn cwt_row(f_hat: &Spectrum, phi: &Field, a: f64, grid: &Grid) -> Result<Vec<C64>> {
    let phi_hat = dilated_spectrum(phi, a, grid)?;
    let mut v: Vec<C64> = f_hat.values.iter().zip(&phi_hat.values).map(|(x, y)| x * y.conj()).collect();
    inverse_values(grid, &mut v);
    let c = a.powf(0.5 * phi.params.homogeneity());
    let mut out = reflect_lateral(grid, &v);
    out.iter_mut().for_each(|z| *z *= c);
    Ok(out)
}

/// Continuous wavelet transform by the spectral convolution route, one
/// scale at a time.
pub fn cwt(f: &Field, phi: &Field, scale_grid: &ScaleGrid, grid: &Grid) -> Result<CwtMatrix> {
    let f_hat = forward(f, grid)?;
    let rows: Result<Vec<Vec<C64>>> = scale_grid
        .nodes
        .par_iter()
        .map(|&a| cwt_row(&f_hat, phi, a, grid))
        .collect();
    Ok(CwtMatrix { scale_grid: scale_grid.clone(), grid: grid.clone(), values: rows?.concat() })
}

/// Φ_φ(f)(a, x) = ⟨f, φ_{a,x}⟩ by direct quadrature of the inner product,
/// the atoms built by θ-quadrature of the translation. Oracle-size grids only.
pub fn cwt_direct(f: &Field, phi: &Field, scale_grid: &ScaleGrid, grid: &Grid, rule: &JacobiRule) -> Result<CwtMatrix> {
    let fv = f.values_on(grid)?;
    if phi.params != grid.params {
        return Err(Error::Dimension("wavelet and grid have different parameters".into()));
    }
    let origin = -2.0 * grid.lateral_extent;
    let n = phi.params.homogeneity();
    let mut values = Vec::with_capacity(scale_grid.n_scales * grid.len());
    for &a in &scale_grid.nodes {
        let conj_atom = phi.dilate(a)?.conj();
        let table = TranslationTable::build(&conj_atom, grid, origin, rule)?;
        let c = a.powf(0.5 * n);
        values.extend(contract(grid, &table, &fv, true).into_iter().map(|z| z * c));
    }
    Ok(CwtMatrix { scale_grid: scale_grid.clone(), grid: grid.clone(), values })
}

/// Probe frequencies: `count` magnitudes geometric in [lo, hi] along every
/// lateral axis (both signs), the radial axis and one oblique direction.
pub fn probes(d: usize, lo: f64, hi: f64, count: usize) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for i in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d + 1];
            v[i] = s;
            dirs.push(v);
        }
    }
    let mut radial = vec![0.0; d + 1];
    radial[d] = 1.0;
    dirs.push(radial);
    let c = 1.0 / ((d + 1) as f64).sqrt();
    dirs.push(vec![c; d + 1]);
    let mags: Vec<f64> = (0..count)
        .map(|k| {
            let t = if count == 1 { 0.0 } else { k as f64 / (count - 1) as f64 };
            lo * (hi / lo).powf(t)
        })
        .collect();
    dirs.iter()
        .flat_map(|dv| mags.iter().map(move |&m| dv.iter().map(|x| x * m).collect()))
        .collect()
}

/// Default probe set: 8 magnitudes in [1/8, 1/2].
pub fn default_probes(d: usize) -> Vec<Vec<f64>> {
    probes(d, 0.125, 0.5, 8)
}

/// Per-probe values of a scale integral and their agreement.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantEstimate {
    pub mean: C64,
    /// max over probes of |value − mean|
    pub spread: f64,
    pub per_probe: Vec<C64>,
}

impl ConstantEstimate {
    fn from_values(per_probe: Vec<C64>) -> Self {
        let mean = per_probe.iter().sum::<C64>() / per_probe.len() as f64;
        let spread = per_probe.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
        ConstantEstimate { mean, spread, per_probe }
    }

    pub fn relative_spread(&self) -> f64 {
        if self.mean.norm() == 0.0 {
            if self.spread == 0.0 { 0.0 } else { f64::INFINITY }
        } else {
            self.spread / self.mean.norm()
        }
    }
}

fn check_probes(probes: &[Vec<f64>], d: usize) -> Result<()> {
    if probes.is_empty() {
        return domain("at least one probe frequency is required");
    }
    for p in probes {
        if p.len() != d + 1 {
            return Err(Error::Dimension(format!("probe needs {} coordinates", d + 1)));
        }
        if p.iter().all(|&v| v == 0.0) {
            return domain("probe frequencies must be nonzero");
        }
    }
    Ok(())
}

/// Rows F(φ)(a_s ξ) for every probe ξ and scale a_s.
fn probe_spectra(phi: &Field, scales: &ScaleGrid, probes: &[Vec<f64>]) -> Result<Vec<Vec<C64>>> {
    probes
        .par_iter()
        .map(|xi| {
            scales
                .nodes
                .iter()
                .map(|&a| {
                    let l: Vec<f64> = xi.iter().map(|v| v * a).collect();
                    phi.spectrum_at(&l)
                })
                .collect()
        })
        .collect()
}

fn ensure_nonvanishing(rows: &[Vec<C64>], name: &str) -> Result<()> {
    if rows.iter().all(|r| r.iter().all(|v| *v == C64::new(0.0, 0.0))) {
        return Err(Error::Admissibility(format!("spectrum of {name} vanishes on every probe")));
    }
    Ok(())
}

/// C_φ = ∫ |F_W(φ)(aξ)|² da/a per probe, by the log-trapezoid rule.
pub fn admissibility_constant(phi: &Field, scales: &ScaleGrid, probes: &[Vec<f64>]) -> Result<ConstantEstimate> {
    check_probes(probes, phi.params.d)?;
    let rows = probe_spectra(phi, scales, probes)?;
    ensure_nonvanishing(&rows, "the wavelet")?;
    let vals = rows
        .iter()
        .map(|r| C64::new(r.iter().zip(&scales.log_weights).map(|(v, w)| v.norm_sqr() * w).sum(), 0.0))
        .collect();
    Ok(ConstantEstimate::from_values(vals))
}

/// C_{φ,ψ} = ∫ F_W(ψ)(aξ) conj(F_W(φ)(aξ)) da/a per probe.
pub fn two_wavelet_constant(phi: &Field, psi: &Field, scales: &ScaleGrid, probes: &[Vec<f64>]) -> Result<ConstantEstimate> {
    check_probes(probes, phi.params.d)?;
    if phi.params != psi.params {
        return Err(Error::Dimension("wavelets have different parameters".into()));
    }
    let rp = probe_spectra(phi, scales, probes)?;
    let rq = probe_spectra(psi, scales, probes)?;
    ensure_nonvanishing(&rp, "phi")?;
    ensure_nonvanishing(&rq, "psi")?;
    let vals = rp
        .iter()
        .zip(&rq)
        .map(|(a, b)| {
            a.iter()
                .zip(b)
                .zip(&scales.log_weights)
                .map(|((x, y), w)| y * x.conj() * *w)
                .sum()
        })
        .collect();
    Ok(ConstantEstimate::from_values(vals))
}

/// Two wavelets with their admissibility and cross constants.
#[derive(Debug, Clone)]
pub struct WaveletPair {
    pub phi: Field,
    pub psi: Field,
    pub c_phi: ConstantEstimate,
    pub c_psi: ConstantEstimate,
    pub c_phi_psi: ConstantEstimate,
    /// max over probes of |C_{φ,ψ}(ξ) − mean|
    pub constancy_spread: f64,
    pub spread_tolerance: f64,
}

impl WaveletPair {
    pub fn new(phi: Field, psi: Field, scales: &ScaleGrid, probes: &[Vec<f64>]) -> Result<Self> {
        let c_phi = admissibility_constant(&phi, scales, probes)?;
        let c_psi = admissibility_constant(&psi, scales, probes)?;
        let c_phi_psi = two_wavelet_constant(&phi, &psi, scales, probes)?;
        let constancy_spread = c_phi_psi.spread;
        Ok(WaveletPair { phi, psi, c_phi, c_psi, c_phi_psi, constancy_spread, spread_tolerance: SPREAD_TOLERANCE })
    }

    /// Both wavelets admissible and every constant probe-independent; the
    /// cross spread is measured against √(C_φ C_ψ) since C_{φ,ψ} may vanish.
    pub fn check_two_wavelet(&self) -> Result<()> {
        let (cp, cq) = (self.c_phi.mean.re, self.c_psi.mean.re);
        if !(cp > 0.0 && cq > 0.0) {
            return Err(Error::Admissibility("C_phi and C_psi must be positive".into()));
        }
        let tol = self.spread_tolerance;
        if self.c_phi.relative_spread() > tol || self.c_psi.relative_spread() > tol {
            return Err(Error::Admissibility(format!(
                "admissibility constants vary across probes (relative spreads {:.3e}, {:.3e})",
                self.c_phi.relative_spread(),
                self.c_psi.relative_spread()
            )));
        }
        if self.constancy_spread > tol * (cp * cq).sqrt() {
            return Err(Error::Admissibility(format!(
                "two-wavelet constant varies across probes (spread {:.3e})",
                self.constancy_spread
            )));
        }
        Ok(())
    }

    pub fn is_two_wavelet(&self) -> bool {
        self.check_two_wavelet().is_ok()
    }

    /// |C_{φ,ψ}| ≤ √(C_φ C_ψ).
    pub fn cauchy_schwarz_ratio(&self) -> f64 {
        self.c_phi_psi.mean.norm() / (self.c_phi.mean.re * self.c_psi.mean.re).sqrt()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ParsevalReport {
    pub lhs: C64,
    pub rhs: C64,
    pub c_phi_psi: C64,
    /// |LHS − RHS| / |RHS|, infinite when RHS = 0 and LHS ≠ 0
    pub relative_deviation: f64,
    /// |LHS| / (‖f‖₂ ‖g‖₂ ‖φ‖₂ ‖ψ‖₂)
    pub normalized_lhs: f64,
    pub max_abs_phi_f: f64,
    pub max_abs_psi_g: f64,
    /// ‖f‖₂‖φ‖₂ and ‖g‖₂‖ψ‖₂, the CWT sup bounds
    pub bound_phi_f: f64,
    pub bound_psi_g: f64,
}

/// L² norm of a field on the grid; analytic fields use their spectral samples,
/// which avoids sampling expensive spatial profiles.
pub fn l2_norm(f: &Field, grid: &Grid) -> Result<f64> {
    if f.as_analytic().is_some() {
        Ok(Spectrum::of_analytic(f, grid)?.norm2())
    } else {
        f.norm_p(grid, 2.0)
    }
}

/// Both sides of ∫∫ Φ_φ f · conj(Φ_ψ g) dμ_α(a,x) = C_{φ,ψ} ⟨f, g⟩, the left
/// side by quadrature over scales and grid nodes, streaming one scale at a time.
pub fn parseval_cross_check(f: &Field, g: &Field, pair: &WaveletPair, scales: &ScaleGrid, grid: &Grid) -> Result<ParsevalReport> {
    pair.check_two_wavelet().map_err(|e| Error::Precondition(format!("invalid wavelet pair: {e}")))?;
    let f_hat = forward(f, grid)?;
    let g_hat = forward(g, grid)?;
    let n = f.params.homogeneity();
    let per_scale: Result<Vec<(C64, f64, f64)>> = scales
        .nodes
        .par_iter()
        .zip(&scales.log_weights)
        .map(|(&a, &lw)| {
            let u = cwt_row(&f_hat, &pair.phi, a, grid)?;
            let v = cwt_row(&g_hat, &pair.psi, a, grid)?;
            let s = inner_values(grid, &u, &v) * (a.powf(-n) * lw);
            let mu = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let mv = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok((s, mu, mv))
        })
        .collect();
    let per_scale = per_scale?;
    // fixed ascending-scale reduction order
    let lhs: C64 = per_scale.iter().map(|t| t.0).sum();
    let max_abs_phi_f = per_scale.iter().map(|t| t.1).fold(0.0, f64::max);
    let max_abs_psi_g = per_scale.iter().map(|t| t.2).fold(0.0, f64::max);
    let inner_fg = f.inner(g, grid)?;
    let c = pair.c_phi_psi.mean;
    let rhs = c * inner_fg;
    let relative_deviation = if rhs.norm() > 0.0 {
        (lhs - rhs).norm() / rhs.norm()
    } else if lhs.norm() == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let (nf, ng) = (f.norm_p(grid, 2.0)?, g.norm_p(grid, 2.0)?);
    let (np, nq) = (l2_norm(&pair.phi, grid)?, l2_norm(&pair.psi, grid)?);
    let denom = nf * ng * np * nq;
    let normalized_lhs = if denom > 0.0 { lhs.norm() / denom } else { 0.0 };
    Ok(ParsevalReport {
        lhs,
        rhs,
        c_phi_psi: c,
        relative_deviation,
        normalized_lhs,
        max_abs_phi_f,
        max_abs_psi_g,
        bound_phi_f: nf * np,
        bound_psi_g: ng * nq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::WeinsteinParams;
    use crate::quadrature::DEFAULT_THETA_ORDER;
    use crate::special::{regularized_lower_gamma, BesselIndex};

    fn params(a: f64) -> WeinsteinParams {
        WeinsteinParams::new(1, a).unwrap()
    }

    #[test]
    fn scale_grid_basics() {
        let s = ScaleGrid::default();
        let total: f64 = s.log_weights.iter().sum();
        assert!((total - (4096f64).ln()).abs() < 1e-12);
        assert!(s.nodes.windows(2).all(|w| w[1] > w[0]));
        assert!(ScaleGrid::new(2.0, 1.0, 10).is_err());
        assert!(ScaleGrid::new(0.0, 1.0, 10).is_err());
        assert!(s.window_weights(1.0, 1.0).is_err());
        assert!(s.window_weights(1e-3, 1.0).is_err());
    }

    #[test]
    fn window_weights_integrate_smooth_functions() {
        let s = ScaleGrid::default();
        // ∫_γ^δ a^4 e^{−a²} da/a = (γ(2, δ²) − γ(2, γ²))/2
        for (g, d) in [(0.25, 4.0), (0.3, 3.3), (1.0, 1.1), (1.0 / 64.0, 64.0)] {
            let w = s.window_weights(g, d).unwrap();
            let v: f64 = s.nodes.iter().zip(&w).map(|(a, w)| w * a.powi(4) * (-a * a).exp()).sum();
            let exact = 0.5 * (regularized_lower_gamma(2.0, d * d).unwrap() - regularized_lower_gamma(2.0, g * g).unwrap());
            assert!((v - exact).abs() < 1e-6, "({g}, {d}): {v} vs {exact}");
        }
        let total: f64 = s.window_weights(0.5, 2.0).unwrap().iter().sum();
        assert!((total - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn window_weights_are_additive() {
        let s = ScaleGrid::default();
        let a = s.window_weights(0.2, 3.7).unwrap();
        let b = s.window_weights(0.2, 1.3).unwrap();
        let c = s.window_weights(1.3, 3.7).unwrap();
        for i in 0..s.n_scales {
            assert!((a[i] - b[i] - c[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_admissibility_constants() {
        let p = params(1.0);
        let s = ScaleGrid::default();
        let pr = default_probes(1);
        let h1 = Field::spectral_hermite(p, 1).unwrap();
        let h2 = Field::spectral_hermite(p, 2).unwrap();
        let c1 = admissibility_constant(&h1, &s, &pr).unwrap();
        assert!((c1.mean.re - 0.5).abs() < 1e-8, "{:?}", c1.mean);
        assert!(c1.relative_spread() < 1e-8);
        let c12 = two_wavelet_constant(&h1, &h2, &s, &pr).unwrap();
        assert!((c12.mean - C64::new(1.0, 0.0)).norm() < 1e-8);
        let same = two_wavelet_constant(&h1, &h1, &s, &pr).unwrap();
        assert!((same.mean - c1.mean).norm() < 1e-15);
        let pair = WaveletPair::new(h1, h2, &s, &pr).unwrap();
        assert!(pair.is_two_wavelet());
        assert!(pair.cauchy_schwarz_ratio() <= 1.0 + 1e-8);
    }

    #[test]
    fn gaussian_is_not_admissible() {
        let p = params(1.0);
        let s = ScaleGrid::default();
        let g = Field::gaussian(p, 1.0).unwrap();
        let c = admissibility_constant(&g, &s, &default_probes(1)).unwrap();
        assert!(c.relative_spread() > SPREAD_TOLERANCE);
        let z = admissibility_constant(&Field::zero(p), &s, &default_probes(1));
        assert!(matches!(z, Err(Error::Admissibility(_))));
    }

    #[test]
    fn disjoint_supports_give_zero_cross_constant() {
        let p = params(1.0);
        let s = ScaleGrid::default();
        let a = Field::band_limited(p, 1.0, 2.0).unwrap();
        let b = Field::band_limited(p, 3.0, 4.0).unwrap();
        let c = two_wavelet_constant(&a, &b, &s, &default_probes(1)).unwrap();
        assert!(c.mean.norm() < 1e-10);
    }

    #[test]
    fn atom_at_unit_scale_and_origin_is_the_wavelet() {
        let p = params(1.0);
        let g = Grid::new(p, 16, 6.0, 16, 6.0).unwrap();
        let rule = JacobiRule::new(BesselIndex::new(1.0).unwrap(), DEFAULT_THETA_ORDER).unwrap();
        let h = Field::spectral_hermite(p, 1).unwrap();
        let atom = wavelet_atom(&h, 1.0, &[0.0, 0.0], &rule, &g).unwrap();
        assert_eq!(atom.as_analytic(), h.as_analytic());
        assert!(dilate(&h, -1.0).is_err());
    }

    #[test]
    fn cwt_fast_path_matches_inner_products() {
        let p = params(1.0);
        let g = Grid::new(p, 32, 8.0, 32, 8.0).unwrap();
        let rule = JacobiRule::new(BesselIndex::new(1.0).unwrap(), DEFAULT_THETA_ORDER).unwrap();
        let f = Field::gaussian(p, 1.0).unwrap().modulated(&[0.4]).unwrap();
        let h = Field::spectral_hermite(p, 1).unwrap();
        let s = ScaleGrid::new(0.7, 1.4, 3).unwrap();
        let fast = cwt(&f, &h, &s, &g).unwrap();
        let direct = cwt_direct(&f, &h, &s, &g, &rule).unwrap();
        let dev = fast.values.iter().zip(&direct.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-4, "{dev}");
        // spot-check one coefficient against an explicit atom
        let x = g.node(5 * g.n_rad + 3);
        let atom = wavelet_atom(&h, s.nodes[1], &x, &rule, &g).unwrap();
        let v = f.inner(&atom, &g).unwrap();
        assert!((v - fast.row(1)[5 * g.n_rad + 3]).norm() < 1e-4);
    }

    #[test]
    fn cwt_is_linear_and_zero_in_zero_out() {
        let p = params(0.5);
        let g = Grid::new(p, 32, 8.0, 32, 8.0).unwrap();
        let h = Field::spectral_hermite(p, 1).unwrap();
        let s = ScaleGrid::new(0.5, 2.0, 4).unwrap();
        let f1 = Field::gaussian(p, 1.0).unwrap().sample(&g).unwrap();
        let f2 = Field::gaussian(p, 0.7).unwrap().modulated(&[1.0]).unwrap().sample(&g).unwrap();
        let (c1, c2) = (C64::new(0.3, -1.2), C64::new(2.0, 0.5));
        let v1 = &f1.as_sampled().unwrap().values;
        let v2 = &f2.as_sampled().unwrap().values;
        let comb = Field::from_values(&g, v1.iter().zip(v2).map(|(a, b)| a * c1 + b * c2).collect()).unwrap();
        let (m1, m2, m) = (cwt(&f1, &h, &s, &g).unwrap(), cwt(&f2, &h, &s, &g).unwrap(), cwt(&comb, &h, &s, &g).unwrap());
        for i in 0..m.values.len() {
            assert!((m.values[i] - m1.values[i] * c1 - m2.values[i] * c2).norm() < 1e-10);
        }
        let z = cwt(&Field::zero(p), &h, &s, &g).unwrap();
        assert_eq!(z.max_abs(), 0.0);
    }
}

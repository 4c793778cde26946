//! Functions on ℝ^d × (0, ∞), even in the last variable: closed-form
//! families and sampled arrays on a grid.

use crate::error::{domain, Error, Result};
use crate::grid::{Grid, WeinsteinParams};
use crate::quadrature::GaussRule;
use crate::radial::RadialRule;
use crate::special::{j_nu, laguerre};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// Radial profile sampled at increasing radii; interpolated cubically in r².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialTable {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if r.len() != values.len() || r.len() < 4 {
            return domain("radial table needs at least 4 (r, value) pairs of equal length");
        }
        if r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return domain("radial table abscissae must be nonnegative and strictly increasing");
        }
        Ok(RadialTable { r, values })
    }

    /// Uniform table of `f` on [0, r_max] with n points.
    pub fn from_fn(r_max: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let r: Vec<f64> = (0..n).map(|i| r_max * i as f64 / (n - 1) as f64).collect();
        let values = r.iter().map(|&x| f(x)).collect();
        RadialTable::new(r, values)
    }

    pub fn eval(&self, r: f64) -> f64 {
        let n = self.r.len();
        if r > self.r[n - 1] {
            return 0.0;
        }
        let t = r * r;
        let k = self.r.partition_point(|&x| x * x <= t);
        let lo = k.saturating_sub(2).min(n - 4);
        let ts: Vec<f64> = self.r[lo..lo + 4].iter().map(|x| x * x).collect();
        lagrange4(&ts, &self.values[lo..lo + 4], t)
    }

    fn support(&self) -> f64 {
        self.r[self.r.len() - 1]
    }
}

fn lagrange4(ts: &[f64], vs: &[f64], t: f64) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        let mut l = 1.0;
        for j in 0..4 {
            if j != i {
                l *= (t - ts[j]) / (ts[i] - ts[j]);
            }
        }
        s += l * vs[i];
    }
    s
}

/// Base radial profiles P(|x|) with Weinstein spectra FP(|λ|).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// e^{−r²/2}, self-dual
    Gaussian,
    /// spectrum ρ^{2m} e^{−ρ²/2}
    SpectralHermite { m: u32 },
    /// spectrum 1 on lo ≤ ρ ≤ hi
    BandLimited { lo: f64, hi: f64 },
    /// exp(1 − 1/(1 − r²)) on r < 1
    Bump,
    /// spectrum exp(1 − 1/(1 − t²)), t = (2ρ − lo − hi)/(hi − lo), on lo < ρ < hi
    SpectralBump { lo: f64, hi: f64 },
    Tabulated(RadialTable),
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::BandLimited { lo, hi } if !(*lo >= 0.0 && hi > lo && hi.is_finite()) => {
                domain(format!("band-limited interval must satisfy 0 <= lo < hi, got [{lo}, {hi}]"))
            }
            Family::SpectralBump { lo, hi } if !(*lo >= 0.0 && hi > lo && hi.is_finite()) => {
                domain(format!("spectral bump interval must satisfy 0 <= lo < hi, got [{lo}, {hi}]"))
            }
            Family::Tabulated(t) => RadialTable::new(t.r.clone(), t.values.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn profile(&self, params: &WeinsteinParams, r: f64) -> f64 {
        match self {
            Family::Gaussian => (-0.5 * r * r).exp(),
            Family::SpectralHermite { m } => {
                let m = *m as usize;
                let c: f64 = (1..=m).map(|k| 2.0 * k as f64).product();
                c * laguerre(m, params.nu(), 0.5 * r * r) * (-0.5 * r * r).exp()
            }
            Family::BandLimited { lo, hi } => {
                let nu = params.nu();
                let e = 2.0 * nu + 2.0;
                let a = params.radial_reduction_constant();
                let upper = hi.powf(e) * j_nu(nu + 1.0, r * hi);
                let lower = if *lo > 0.0 { lo.powf(e) * j_nu(nu + 1.0, r * lo) } else { 0.0 };
                a / e * (upper - lower)
            }
            Family::Bump => {
                if r < 1.0 {
                    (1.0 - 1.0 / (1.0 - r * r)).exp()
                } else {
                    0.0
                }
            }
            Family::SpectralBump { lo, hi } => {
                radial_hankel_range(params, *lo, *hi, r, |rho| self.spectral_profile(params, rho))
            }
            Family::Tabulated(t) => t.eval(r),
        }
    }

    pub fn spectral_profile(&self, params: &WeinsteinParams, rho: f64) -> f64 {
        match self {
            Family::Gaussian => (-0.5 * rho * rho).exp(),
            Family::SpectralHermite { m } => rho.powi(2 * *m as i32) * (-0.5 * rho * rho).exp(),
            Family::BandLimited { lo, hi } => {
                if rho >= *lo && rho <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            Family::SpectralBump { lo, hi } => {
                let t = (2.0 * rho - lo - hi) / (hi - lo);
                if t.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
            Family::Bump => radial_hankel(params, 1.0, rho, |r| self.profile(params, r)),
            Family::Tabulated(t) => radial_hankel(params, t.support(), rho, |r| t.eval(r)),
        }
    }

    /// Whether the spectrum is real and nonnegative.
    pub fn nonnegative_spectrum(&self) -> bool {
        matches!(
            self,
            Family::Gaussian
                | Family::SpectralHermite { .. }
                | Family::BandLimited { .. }
                | Family::SpectralBump { .. }
        )
    }
}

fn gauss16() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::legendre(16).expect("valid rule"))
}

/// a_α ∫_0^{support} P(r) j_ν(rρ) r^{2ν+1} dr by Gauss–Legendre panels.
pub fn radial_hankel(params: &WeinsteinParams, support: f64, rho: f64, p: impl Fn(f64) -> f64) -> f64 {
    radial_hankel_range(params, 0.0, support, rho, p)
}

/// The same integral over [from, to].
pub fn radial_hankel_range(params: &WeinsteinParams, from: f64, to: f64, rho: f64, p: impl Fn(f64) -> f64) -> f64 {
    let nu = params.nu();
    let panels = (64.0f64).max(((to - from) * rho).ceil()) as usize;
    let width = (to - from) / panels as f64;
    let g = gauss16();
    let mut total = 0.0;
    for k in 0..panels {
        let lo = from + k as f64 * width;
        total += g.integrate(lo, lo + width, |r| p(r) * j_nu(nu, r * rho) * r.powf(2.0 * nu + 1.0));
    }
    params.radial_reduction_constant() * total
}

/// c · e^{i<k,x'>} · P(|x|/s).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub family: Family,
    pub scale: f64,
    pub amplitude: C64,
    pub wave: Vec<f64>,
}

impl Analytic {
    fn eval(&self, params: &WeinsteinParams, x: &[f64]) -> C64 {
        let d = params.d;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let p = self.family.profile(params, r2.sqrt() / self.scale);
        let phase: f64 = self.wave.iter().zip(&x[..d]).map(|(k, v)| k * v).sum();
        if phase == 0.0 {
            return self.amplitude * p;
        }
        self.amplitude * C64::from_polar(1.0, phase) * p
    }

    fn spectrum(&self, params: &WeinsteinParams, lambda: &[f64]) -> C64 {
        let d = params.d;
        let mut r2 = lambda[d] * lambda[d];
        for i in 0..d {
            let v = lambda[i] - self.wave[i];
            r2 += v * v;
        }
        let n = params.homogeneity();
        self.amplitude * self.scale.powf(n) * self.family.spectral_profile(params, self.scale * r2.sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// no off-grid evaluation
    None,
    /// cubic in each lateral axis and cubic in r² radially, zero outside the grid
    Cubic,
}

#[derive(Debug, Clone)]
pub struct Sampled {
    pub grid: Grid,
    pub values: Vec<C64>,
    pub interpolation: Interpolation,
}

#[derive(Debug, Clone)]
pub enum Repr {
    Analytic(Analytic),
    Sampled(Sampled),
}

#[derive(Debug, Clone)]
pub struct Field {
    pub params: WeinsteinParams,
    pub repr: Repr,
}

impl Field {
    pub fn analytic(params: WeinsteinParams, family: Family, scale: f64) -> Result<Self> {
        family.validate()?;
        if !(scale > 0.0 && scale.is_finite()) {
            return domain(format!("scale must be positive, got {scale}"));
        }
        Ok(Field {
            params,
            repr: Repr::Analytic(Analytic {
                family,
                scale,
                amplitude: C64::new(1.0, 0.0),
                wave: vec![0.0; params.d],
            }),
        })
    }

    /// exp(−‖x‖²/2σ²).
    pub fn gaussian(params: WeinsteinParams, sigma: f64) -> Result<Self> {
        Self::analytic(params, Family::Gaussian, sigma)
    }

    pub fn spectral_hermite(params: WeinsteinParams, m: u32) -> Result<Self> {
        Self::analytic(params, Family::SpectralHermite { m }, 1.0)
    }

    pub fn band_limited(params: WeinsteinParams, lo: f64, hi: f64) -> Result<Self> {
        Self::analytic(params, Family::BandLimited { lo, hi }, 1.0)
    }

    pub fn spectral_bump(params: WeinsteinParams, lo: f64, hi: f64) -> Result<Self> {
        Self::analytic(params, Family::SpectralBump { lo, hi }, 1.0)
    }

    /// Smooth compactly supported bump of the given radius.
    pub fn bump(params: WeinsteinParams, radius: f64) -> Result<Self> {
        Self::analytic(params, Family::Bump, radius)
    }

    pub fn tabulated(params: WeinsteinParams, table: RadialTable) -> Result<Self> {
        Self::analytic(params, Family::Tabulated(table), 1.0)
    }

    pub fn zero(params: WeinsteinParams) -> Self {
        Field {
            params,
            repr: Repr::Analytic(Analytic {
                family: Family::Gaussian,
                scale: 1.0,
                amplitude: C64::new(0.0, 0.0),
                wave: vec![0.0; params.d],
            }),
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} values for the grid, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field {
            params: grid.params,
            repr: Repr::Sampled(Sampled { grid: grid.clone(), values, interpolation: Interpolation::Cubic }),
        })
    }

    pub fn with_interpolation(mut self, method: Interpolation) -> Self {
        if let Repr::Sampled(s) = &mut self.repr {
            s.interpolation = method;
        }
        self
    }

    pub fn as_analytic(&self) -> Option<&Analytic> {
        match &self.repr {
            Repr::Analytic(a) => Some(a),
            Repr::Sampled(_) => None,
        }
    }

    pub fn as_sampled(&self) -> Option<&Sampled> {
        match &self.repr {
            Repr::Sampled(s) => Some(s),
            Repr::Analytic(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Analytic(a) => a.amplitude == C64::new(0.0, 0.0),
            Repr::Sampled(s) => s.values.iter().all(|v| *v == C64::new(0.0, 0.0)),
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.params.d + 1 {
            return Err(Error::Dimension(format!(
                "points need {} coordinates, got {}",
                self.params.d + 1,
                x.len()
            )));
        }
        Ok(())
    }

    /// Pointwise value; the last coordinate enters through its absolute value.
    pub fn eval(&self, x: &[f64]) -> Result<C64> {
        self.check_point(x)?;
        match &self.repr {
            Repr::Analytic(a) => Ok(a.eval(&self.params, x)),
            Repr::Sampled(s) => s.interpolate(x),
        }
    }

    /// Weinstein transform at an arbitrary frequency. Closed form for analytic
    /// fields; direct quadrature over the grid for sampled ones.
    pub fn spectrum_at(&self, lambda: &[f64]) -> Result<C64> {
        self.check_point(lambda)?;
        match &self.repr {
            Repr::Analytic(a) => Ok(a.spectrum(&self.params, lambda)),
            Repr::Sampled(s) => Ok(s.direct_spectrum(lambda)),
        }
    }

    pub fn has_nonnegative_spectrum(&self) -> bool {
        match &self.repr {
            Repr::Analytic(a) => {
                a.family.nonnegative_spectrum()
                    && a.wave.iter().all(|&k| k == 0.0)
                    && a.amplitude.im == 0.0
                    && a.amplitude.re >= 0.0
            }
            Repr::Sampled(_) => false,
        }
    }

    /// Values on the nodes of `grid`.
    pub fn values_on(&self, grid: &Grid) -> Result<Vec<C64>> {
        if grid.params != self.params {
            return Err(Error::Dimension("field and grid have different parameters".into()));
        }
        match &self.repr {
            Repr::Analytic(a) => Ok((0..grid.len())
                .into_par_iter()
                .map_init(
                    || vec![0.0; grid.d() + 1],
                    |buf, i| {
                        grid.node_into(i, buf);
                        a.eval(&self.params, buf)
                    },
                )
                .collect()),
            Repr::Sampled(s) => {
                grid.ensure_same(&s.grid)?;
                Ok(s.values.clone())
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<Field> {
        Field::from_values(grid, self.values_on(grid)?)
    }

    /// Multiply by a complex constant.
    pub fn scaled(&self, c: C64) -> Field {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Analytic(a) => a.amplitude *= c,
            Repr::Sampled(s) => s.values.iter_mut().for_each(|v| *v *= c),
        }
        out
    }

    /// Multiply by e^{i<k,x'>}; exact for analytic fields.
    pub fn modulated(&self, k: &[f64]) -> Result<Field> {
        if k.len() != self.params.d {
            return Err(Error::Dimension("modulation needs one wavenumber per lateral axis".into()));
        }
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Analytic(a) => a.wave.iter_mut().zip(k).for_each(|(w, v)| *w += v),
            Repr::Sampled(s) => {
                let grid = s.grid.clone();
                let mut buf = vec![0.0; grid.d() + 1];
                for (i, v) in s.values.iter_mut().enumerate() {
                    grid.node_into(i, &mut buf);
                    let phase: f64 = k.iter().zip(&buf).map(|(a, b)| a * b).sum();
                    *v *= C64::from_polar(1.0, phase);
                }
            }
        }
        Ok(out)
    }

    /// f̌(y) = f(−y', y_{d+1}).
    pub fn check(&self) -> Field {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Analytic(a) => a.wave.iter_mut().for_each(|w| *w = -*w),
            Repr::Sampled(s) => s.values = reflect_lateral(&s.grid, &s.values),
        }
        out
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Field {
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Analytic(a) => {
                a.amplitude = a.amplitude.conj();
                a.wave.iter_mut().for_each(|w| *w = -*w);
            }
            Repr::Sampled(s) => s.values.iter_mut().for_each(|v| *v = v.conj()),
        }
        out
    }

    /// φ_a(x) = a^{−(2α+d+2)} φ(x/a). Exact on analytic fields; sampled
    /// fields are resampled through their interpolant.
    pub fn dilate(&self, a: f64) -> Result<Field> {
        if !(a > 0.0 && a.is_finite()) {
            return domain(format!("dilation factor must be positive, got {a}"));
        }
        let n = self.params.homogeneity();
        let mut out = self.clone();
        match &mut out.repr {
            Repr::Analytic(an) => {
                an.scale *= a;
                an.wave.iter_mut().for_each(|w| *w /= a);
                an.amplitude /= a.powf(n);
            }
            Repr::Sampled(s) => {
                let src = s.clone();
                let grid = s.grid.clone();
                let c = a.powf(-n);
                let values: Result<Vec<C64>> = (0..grid.len())
                    .into_par_iter()
                    .map(|i| {
                        let x: Vec<f64> = grid.node(i).iter().map(|v| v / a).collect();
                        src.interpolate(&x).map(|v| v * c)
                    })
                    .collect();
                s.values = values?;
            }
        }
        Ok(out)
    }

    /// Σ f(node) μ(node) ≈ ∫ f dμ_α.
    pub fn integrate(&self, grid: &Grid) -> Result<C64> {
        let v = self.values_on(grid)?;
        Ok(v.iter().enumerate().map(|(i, x)| x * grid.mu_weight(i)).sum())
    }

    /// Weighted Lᵖ norm; p = ∞ takes the max over nodes.
    pub fn norm_p(&self, grid: &Grid, p: f64) -> Result<f64> {
        let v = self.values_on(grid)?;
        norm_p_values(grid, &v, p)
    }

    /// ⟨f, g⟩ = ∫ f ḡ dμ_α.
    pub fn inner(&self, other: &Field, grid: &Grid) -> Result<C64> {
        let a = self.values_on(grid)?;
        let b = other.values_on(grid)?;
        Ok(inner_values(grid, &a, &b))
    }
}

pub fn norm_p_values(grid: &Grid, v: &[C64], p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(v.iter().map(|x| x.norm()).fold(0.0, f64::max));
    }
    if !(p >= 1.0) {
        return domain(format!("norm exponent must be >= 1, got {p}"));
    }
    let s: f64 = v.iter().enumerate().map(|(i, x)| x.norm().powf(p) * grid.mu_weight(i)).sum();
    Ok(s.powf(1.0 / p))
}

pub fn inner_values(grid: &Grid, a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).enumerate().map(|(i, (x, y))| x * y.conj() * grid.mu_weight(i)).sum()
}

/// Lateral reflection x' ↦ −x' on grid values (index i ↦ (N − i) mod N per axis).
pub fn reflect_lateral(grid: &Grid, values: &[C64]) -> Vec<C64> {
    let d = grid.d();
    let n = grid.n_lat;
    let nr = grid.n_rad;
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    let mut mi = vec![0usize; d];
    for flat in 0..grid.lateral_count() {
        grid.lateral_index(flat, &mut mi);
        let mut target = 0;
        for &i in &mi {
            target = target * n + (n - i) % n;
        }
        out[target * nr..(target + 1) * nr].copy_from_slice(&values[flat * nr..(flat + 1) * nr]);
    }
    out
}

impl Sampled {
    fn interpolate(&self, x: &[f64]) -> Result<C64> {
        if self.interpolation == Interpolation::None {
            return Err(Error::Capability(
                "sampled field has no interpolation method for off-grid evaluation".into(),
            ));
        }
        let g = &self.grid;
        let d = g.d();
        let r = x[d].abs();
        if r > g.radial_extent {
            return Ok(C64::new(0.0, 0.0));
        }
        // radial stencil in t = r², starting index and weights
        let h = g.radial_spacing();
        let n = g.n_rad;
        let k = ((r / h - 0.5).floor().max(0.0) as usize).min(n - 1);
        let k0 = k.saturating_sub(1).min(n - 4);
        let ts: Vec<f64> = (k0..k0 + 4).map(|j| g.radial_nodes[j].powi(2)).collect();
        let rw = lagrange4_weights(&ts, r * r);
        // lateral stencils
        let hl = g.lateral_spacing();
        let mut lat_start = vec![0usize; d];
        let mut lat_w = vec![[0.0; 4]; d];
        for m in 0..d {
            let u = (x[m] + g.lateral_extent) / hl;
            if u < 0.0 || u > (g.n_lat - 1) as f64 {
                return Ok(C64::new(0.0, 0.0));
            }
            let i = (u.floor() as usize).min(g.n_lat - 2);
            let i0 = i.saturating_sub(1).min(g.n_lat - 4);
            let us: Vec<f64> = (i0..i0 + 4).map(|j| j as f64).collect();
            lat_start[m] = i0;
            lat_w[m] = lagrange4_weights(&us, u);
        }
        let mut acc = C64::new(0.0, 0.0);
        let combos = 4usize.pow(d as u32);
        for c in 0..combos {
            let mut flat = 0;
            let mut w = 1.0;
            let mut cc = c;
            for m in 0..d {
                let o = cc % 4;
                cc /= 4;
                flat = flat * g.n_lat + lat_start[m] + o;
                w *= lat_w[m][o];
            }
            let base = flat * n;
            for (j, &rwj) in rw.iter().enumerate() {
                acc += self.values[base + k0 + j] * (w * rwj);
            }
        }
        Ok(acc)
    }

    fn direct_spectrum(&self, lambda: &[f64]) -> C64 {
        let g = &self.grid;
        let d = g.d();
        let rule = RadialRule::new(g.params.alpha(), g.n_rad, g.radial_spacing());
        let row = rule.row(lambda[d]);
        let cr = g.params.radial_constant();
        let lat = (g.lateral_spacing() * g.params.lateral_constant()).powi(d as i32);
        let mut mi = vec![0usize; d];
        let mut acc = C64::new(0.0, 0.0);
        for flat in 0..g.lateral_count() {
            g.lateral_index(flat, &mut mi);
            let phase: f64 = mi.iter().zip(lambda).map(|(&i, l)| g.lateral_nodes[i] * l).sum();
            let e = C64::from_polar(1.0, -phase);
            let radial: C64 = (0..g.n_rad).map(|k| self.values[flat * g.n_rad + k] * row[k]).sum();
            acc += e * radial;
        }
        acc * (cr * lat)
    }
}

fn lagrange4_weights(ts: &[f64], t: f64) -> [f64; 4] {
    let mut w = [0.0; 4];
    for i in 0..4 {
        let mut l = 1.0;
        for j in 0..4 {
            if j != i {
                l *= (t - ts[j]) / (ts[i] - ts[j]);
            }
        }
        w[i] = l;
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(alpha: f64) -> WeinsteinParams {
        WeinsteinParams::new(1, alpha).unwrap()
    }

    #[test]
    fn table_interpolation_is_exact_on_cubics_in_r2() {
        let t = RadialTable::from_fn(3.0, 13, |r| 1.0 - r * r + 0.25 * r.powi(6)).unwrap();
        for r in [0.0f64, 0.1, 1.37, 2.9, 3.0] {
            let exact = 1.0 - r * r + 0.25 * r.powi(6);
            assert!((t.eval(r) - exact).abs() < 1e-11, "r={r}");
        }
        assert_eq!(t.eval(3.01), 0.0);
        assert!(RadialTable::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.0; 4]).is_err());
    }

    #[test]
    fn hermite_profile_low_order() {
        let p = params(1.0);
        let nu = p.nu();
        let f = Family::SpectralHermite { m: 1 };
        for r in [0.0, 0.7, 2.0] {
            let exact = 2.0 * (nu + 1.0 - 0.5 * r * r) * (-0.5 * r * r as f64).exp();
            assert!((f.profile(&p, r) - exact).abs() < 1e-14);
        }
    }

    #[test]
    fn analytic_spectra_match_radial_hankel() {
        // the closed-form spectra agree with direct 1-D Hankel quadrature of the profiles
        for &a in &[0.5, 1.0] {
            let p = params(a);
            for fam in [Family::Gaussian, Family::SpectralHermite { m: 1 }, Family::SpectralHermite { m: 2 }] {
                for rho in [0.0, 0.5, 1.3, 3.0] {
                    let q = radial_hankel(&p, 14.0, rho, |r| fam.profile(&p, r));
                    let exact = fam.spectral_profile(&p, rho);
                    assert!((q - exact).abs() < 1e-12, "{fam:?} a={a} rho={rho}: {q} vs {exact}");
                }
            }
        }
    }

    #[test]
    fn spectral_bump_profile_against_legendre() {
        let p = params(1.0);
        let f = Family::SpectralBump { lo: 1.0, hi: 2.0 };
        let g = GaussRule::legendre(200).unwrap();
        let nu = p.nu();
        for r in [0.0, 0.7, 4.0, 11.0] {
            let q = p.radial_reduction_constant()
                * g.integrate(1.0, 2.0, |rho| f.spectral_profile(&p, rho) * j_nu(nu, r * rho) * rho.powf(2.0 * nu + 1.0));
            assert!((q - f.profile(&p, r)).abs() < 1e-12, "r={r}");
        }
        assert!(Family::SpectralBump { lo: 2.0, hi: 1.0 }.validate().is_err());
    }

    #[test]
    fn band_limited_profile_inverts_indicator() {
        // P(r) = a_α ∫_lo^hi j_ν(rρ) ρ^{2ν+1} dρ
        let p = params(1.0);
        let f = Family::BandLimited { lo: 1.0, hi: 2.5 };
        let g = GaussRule::legendre(40).unwrap();
        let nu = p.nu();
        for r in [0.0, 0.4, 3.0, 7.5] {
            let q = p.radial_reduction_constant()
                * g.integrate(1.0, 2.5, |rho| j_nu(nu, r * rho) * rho.powf(2.0 * nu + 1.0));
            assert!((q - f.profile(&p, r)).abs() < 1e-13, "r={r}");
        }
    }

    #[test]
    fn dilation_and_modulation_are_exact() {
        let p = params(0.5);
        let f = Field::gaussian(p, 1.0).unwrap().modulated(&[0.7]).unwrap();
        let fa = f.dilate(2.0).unwrap();
        let n = p.homogeneity();
        for x in [[0.3, 0.2], [-1.5, 2.0], [4.0, 0.1]] {
            let direct = f.eval(&[x[0] / 2.0, x[1] / 2.0]).unwrap() / 2f64.powf(n);
            let v = fa.eval(&x).unwrap();
            assert!((v - direct).norm() < 1e-15);
        }
        // F(φ_a)(ξ) = F(φ)(aξ)
        for xi in [[0.5, 0.1], [-0.2, 1.4]] {
            let lhs = fa.spectrum_at(&xi).unwrap();
            let rhs = f.spectrum_at(&[2.0 * xi[0], 2.0 * xi[1]]).unwrap();
            assert!((lhs - rhs).norm() < 1e-15);
        }
        assert!(f.dilate(0.0).is_err());
        assert!(f.dilate(-1.0).is_err());
    }

    #[test]
    fn check_and_conj() {
        let p = params(1.0);
        let f = Field::gaussian(p, 1.0).unwrap().modulated(&[1.0]).unwrap();
        let c = f.check();
        let x = [0.4, 1.1];
        let lhs = c.eval(&x).unwrap();
        let rhs = f.eval(&[-0.4, 1.1]).unwrap();
        assert!((lhs - rhs).norm() < 1e-16);
        let back = c.check();
        assert_eq!(back.eval(&x).unwrap(), f.eval(&x).unwrap());
        let cj = f.conj();
        assert!((cj.eval(&x).unwrap() - f.eval(&x).unwrap().conj()).norm() < 1e-16);
    }

    #[test]
    fn sampled_reflection_is_involution() {
        let p = params(0.5);
        let g = Grid::new(p, 16, 4.0, 8, 4.0).unwrap();
        let f = Field::gaussian(p, 1.0).unwrap().modulated(&[0.5]).unwrap().sample(&g).unwrap();
        let c = f.check();
        let cc = c.check();
        assert_eq!(cc.as_sampled().unwrap().values, f.as_sampled().unwrap().values);
        // against the analytic reflection on interior nodes
        let ref_vals = Field::gaussian(p, 1.0).unwrap().modulated(&[-0.5]).unwrap().values_on(&g).unwrap();
        let cv = &c.as_sampled().unwrap().values;
        for i in g.n_rad..g.len() {
            assert!((cv[i] - ref_vals[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn sampled_interpolation_accuracy() {
        let p = params(1.0);
        let g = Grid::new(p, 128, 8.0, 128, 8.0).unwrap();
        let f = Field::gaussian(p, 1.0).unwrap();
        let s = f.sample(&g).unwrap();
        for x in [[0.01, 0.013], [1.234, 0.7], [-2.2, 3.3], [0.0, 5.5]] {
            let v = s.eval(&x).unwrap();
            assert!((v - f.eval(&x).unwrap()).norm() < 2e-5, "{x:?}");
        }
        assert_eq!(s.eval(&[0.0, 9.0]).unwrap(), C64::new(0.0, 0.0));
        let none = s.clone().with_interpolation(Interpolation::None);
        assert!(matches!(none.eval(&[0.1, 0.1]), Err(Error::Capability(_))));
    }

    #[test]
    fn gaussian_integral_and_norm() {
        // ∫ e^{−|x|²/2} dμ_α = 1 and ‖e^{−|x|²/2}‖₂² = 2^{−(α+d/2+1)}
        for &a in &[0.5, 1.0] {
            let p = params(a);
            let g = Grid::new(p, 256, 12.0, 256, 12.0).unwrap();
            let f = Field::gaussian(p, 1.0).unwrap();
            let v = f.integrate(&g).unwrap();
            assert!((v.re - 1.0).abs() < 1e-12 && v.im == 0.0, "alpha={a}: {v}");
            let n2 = f.norm_p(&g, 2.0).unwrap();
            assert_relative_eq!(n2 * n2, 2f64.powf(-(p.nu() + 1.0)), max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_field_and_bad_exponent() {
        let p = params(0.5);
        let g = Grid::new(p, 16, 4.0, 16, 4.0).unwrap();
        let z = Field::zero(p);
        assert_eq!(z.integrate(&g).unwrap(), C64::new(0.0, 0.0));
        assert_eq!(z.norm_p(&g, 2.0).unwrap(), 0.0);
        assert!(z.norm_p(&g, 0.5).is_err());
        assert!(z.eval(&[1.0]).is_err());
    }
}

//! The Weinstein kernel and the forward/inverse transform on a grid: a DFT
//! across each lateral axis composed with a dense radial Bessel matrix.

use crate::error::{Error, Result};
use crate::field::{inner_values, reflect_lateral, Field};
use crate::grid::{Grid, WeinsteinParams};
use crate::special::j_nu;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

/// Λ(λ, x) = e^{−i<x',λ'>} j_α(x_{d+1} λ_{d+1}).
pub fn kernel(params: &WeinsteinParams, lambda: &[f64], x: &[f64]) -> C64 {
    let d = params.d;
    let phase: f64 = lambda[..d].iter().zip(&x[..d]).map(|(a, b)| a * b).sum();
    C64::from_polar(1.0, -phase) * j_nu(params.alpha(), x[d] * lambda[d])
}

/// Transform values on the spectral nodes of a grid.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub params: WeinsteinParams,
    pub grid: Grid,
    pub values: Vec<C64>,
}

impl Spectrum {
    pub fn new(grid: &Grid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!(
                "expected {} spectral values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Spectrum { params: grid.params, grid: grid.clone(), values })
    }

    /// Spectral samples of an analytic field, from its closed-form spectrum.
    pub fn of_analytic(f: &Field, grid: &Grid) -> Result<Self> {
        if f.as_analytic().is_none() {
            return Err(Error::Capability("closed-form spectra exist only for analytic fields".into()));
        }
        let values: Result<Vec<C64>> = (0..grid.len())
            .into_par_iter()
            .map(|i| f.spectrum_at(&grid.freq(i)))
            .collect();
        Spectrum::new(grid, values?)
    }

    pub fn norm2(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v.norm_sqr() * self.grid.spectral_weight(i))
            .sum::<f64>()
            .sqrt()
    }

    pub fn inner(&self, other: &Spectrum) -> Result<C64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .enumerate()
            .map(|(i, (a, b))| a * b.conj() * self.grid.spectral_weight(i))
            .sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise product with m(λ).
    pub fn multiply(&self, m: impl Fn(&[f64]) -> C64 + Sync) -> Spectrum {
        let g = &self.grid;
        let values = self
            .values
            .par_iter()
            .enumerate()
            .map(|(i, v)| v * m(&g.freq(i)))
            .collect();
        Spectrum { params: self.params, grid: g.clone(), values }
    }

    pub fn mul(&self, other: &Spectrum) -> Result<Spectrum> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Spectrum { params: self.params, grid: self.grid.clone(), values })
    }

    /// λ' ↦ −λ' on the spectral nodes.
    pub fn reflect(&self) -> Spectrum {
        Spectrum {
            params: self.params,
            grid: self.grid.clone(),
            values: reflect_lateral(&self.grid, &self.values),
        }
    }
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = FftPlanner::new();
    if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    }
}

/// DFT across every lateral axis in place. Forward maps x_i = −L + ih to
/// λ_j = (j − N/2)π/L with kernel e^{−iλx}; inverse is its exact inverse.
fn lateral_dft(grid: &Grid, values: &mut [C64], inverse: bool) {
    let n = grid.n_lat;
    let d = grid.d();
    let fft = plan(n, inverse);
    let half = n / 2;
    let scale = if inverse {
        grid.lateral_freq_spacing() * grid.params.lateral_constant()
    } else {
        grid.lateral_spacing() * grid.params.lateral_constant()
    };
    let sign = |j: usize| if (j + half) % 2 == 0 { 1.0 } else { -1.0 };
    let total = values.len();
    for axis in 0..d {
        let stride = n.pow((d - 1 - axis) as u32) * grid.n_rad;
        let block = stride * n;
        let lines: Vec<usize> = (0..total / block)
            .flat_map(|outer| (0..stride).map(move |inner| outer * block + inner))
            .collect();
        let src: &[C64] = values;
        let transformed: Vec<Vec<C64>> = lines
            .par_iter()
            .map(|&start| {
                let mut buf: Vec<C64> = vec![C64::new(0.0, 0.0); n];
                if inverse {
                    for j in 0..n {
                        buf[(j + half) % n] = src[start + j * stride] * sign(j);
                    }
                    fft.process(&mut buf);
                    buf.iter_mut().for_each(|v| *v *= scale);
                    buf
                } else {
                    for (i, b) in buf.iter_mut().enumerate() {
                        *b = src[start + i * stride];
                    }
                    fft.process(&mut buf);
                    (0..n).map(|j| buf[(j + half) % n] * (scale * sign(j))).collect()
                }
            })
            .collect();
        for (&start, line) in lines.iter().zip(&transformed) {
            for (i, v) in line.iter().enumerate() {
                values[start + i * stride] = *v;
            }
        }
    }
}

fn radial_apply(grid: &Grid, values: &mut [C64], matrix: &[f64]) {
    let n = grid.n_rad;
    let rows = values.len() / n;
    let input = values.to_vec();
    let src = input.as_ptr() as *const f64;
    let dst = values.as_mut_ptr() as *mut f64;
    let row = (2 * n) as isize;
    // Real and imaginary parts as two strided real products V·Mᵀ.
    for part in 0..2 {
        // SAFETY: Complex64 is repr(C) {re, im}; every index stays inside the
        // rows × n complex buffers, and input and values do not alias.
        unsafe {
            matrixmultiply::dgemm(
                rows, n, n, 1.0,
                src.add(part), row, 2,
                matrix.as_ptr(), 1, n as isize,
                0.0,
                dst.add(part), row, 2,
            );
        }
    }
}

/// F_W(f)(λ) = ∫ f(x) Λ(x, λ) dμ_α(x) on the spectral nodes of `grid`.
pub fn forward(f: &Field, grid: &Grid) -> Result<Spectrum> {
    let mut v = f.values_on(grid)?;
    forward_values(grid, &mut v);
    Spectrum::new(grid, v)
}

pub(crate) fn forward_values(grid: &Grid, v: &mut [C64]) {
    lateral_dft(grid, v, false);
    radial_apply(grid, v, grid.forward_radial());
}

/// f(x) = ∫ F(λ) Λ(−x, λ) dμ_α(λ) on the spatial nodes.
pub fn inverse(s: &Spectrum, grid: &Grid) -> Result<Field> {
    grid.ensure_same(&s.grid)?;
    let mut v = s.values.clone();
    inverse_values(grid, &mut v);
    Field::from_values(grid, v)
}

pub(crate) fn inverse_values(grid: &Grid, v: &mut [C64]) {
    radial_apply(grid, v, grid.inverse_radial());
    lateral_dft(grid, v, true);
}

/// Deviations of F(f̄)(λ) = conj(F(f̃)(λ)) and F(f)(λ) = F(f̃)(−λ) on the grid,
/// f̃ being the lateral reflection.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugationReport {
    pub conjugate_deviation: f64,
    pub reflection_deviation: f64,
}

impl ConjugationReport {
    pub fn max_deviation(&self) -> f64 {
        self.conjugate_deviation.max(self.reflection_deviation)
    }
}

pub fn conjugation_identity_check(f: &Field, grid: &Grid) -> Result<ConjugationReport> {
    let tilde = f.check();
    let f_bar = forward(&f.conj(), grid)?;
    let f_tilde = forward(&tilde, grid)?;
    let f_hat = forward(f, grid)?;
    let conj_dev = f_bar
        .values
        .iter()
        .zip(&f_tilde.values)
        .map(|(a, b)| (a - b.conj()).norm())
        .fold(0.0, f64::max);
    let refl = f_tilde.reflect();
    let refl_dev = f_hat
        .values
        .iter()
        .zip(&refl.values)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    Ok(ConjugationReport { conjugate_deviation: conj_dev, reflection_deviation: refl_dev })
}

/// ‖F_W f‖₂ / ‖f‖₂ on the grid.
pub fn plancherel_ratio(f: &Field, grid: &Grid) -> Result<f64> {
    let v = f.values_on(grid)?;
    let nf = inner_values(grid, &v, &v).re.sqrt();
    let s = forward(f, grid)?;
    Ok(s.norm2() / nf)
}

/// ‖F⁻¹F f − f‖₂ / ‖f‖₂.
pub fn round_trip_error(f: &Field, grid: &Grid) -> Result<f64> {
    let v = f.values_on(grid)?;
    let back = inverse(&forward(f, grid)?, grid)?;
    let b = &back.as_sampled().expect("inverse yields samples").values;
    let diff: Vec<C64> = v.iter().zip(b).map(|(a, b)| a - b).collect();
    let num = inner_values(grid, &diff, &diff).re.sqrt();
    let den = inner_values(grid, &v, &v).re.sqrt();
    Ok(num / den)
}

//! Generalized translation τ_x and Weinstein convolution, each by direct
//! θ-quadrature and by the spectral route.

use crate::error::{domain, Error, Result};
use crate::field::{norm_p_values, Field};
use crate::grid::Grid;
use crate::quadrature::JacobiRule;
use crate::transform::{forward, inverse, inverse_values, kernel, Spectrum};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::HashMap;

/// Largest node count per axis accepted by the direct-quadrature oracles.
pub const ORACLE_MAX_NODES: usize = 64;
const ORACLE_MAX_TABLE: usize = 1 << 26;

fn check_point(f: &Field, x: &[f64]) -> Result<()> {
    if x.len() != f.params.d + 1 {
        return Err(Error::Dimension(format!(
            "points need {} coordinates, got {}",
            f.params.d + 1,
            x.len()
        )));
    }
    Ok(())
}

/// √(x² + y² + 2xy cos θ).
#[inline]
fn law_of_cosines(x: f64, y: f64, c: f64) -> f64 {
    (x * x + y * y + 2.0 * x * y * c).max(0.0).sqrt()
}

/// τ_x f(y) = C_α ∫_0^π f(x'+y', √(x_r²+y_r²+2x_r y_r cos θ)) sin^{2α}θ dθ.
pub fn translate_at(f: &Field, x: &[f64], y: &[f64], rule: &JacobiRule) -> Result<C64> {
    check_point(f, x)?;
    check_point(f, y)?;
    let d = f.params.d;
    let mut p: Vec<f64> = x[..d].iter().zip(&y[..d]).map(|(a, b)| a + b).collect();
    p.push(0.0);
    let (xr, yr) = (x[d].abs(), y[d].abs());
    let mut acc = C64::new(0.0, 0.0);
    for (&c, w) in rule.cos_nodes.iter().zip(rule.normalized_weights()) {
        p[d] = law_of_cosines(xr, yr, c);
        acc += f.eval(&p)? * w;
    }
    Ok(acc)
}

/// τ_x f sampled on `grid`. τ_0 returns f itself.
pub fn translate(f: &Field, x: &[f64], rule: &JacobiRule, grid: &Grid) -> Result<Field> {
    check_point(f, x)?;
    if x.iter().all(|&v| v == 0.0) {
        return Ok(f.clone());
    }
    if grid.params != f.params {
        return Err(Error::Dimension("field and grid have different parameters".into()));
    }
    let values: Result<Vec<C64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| translate_at(f, x, &grid.node(i), rule))
        .collect();
    Field::from_values(grid, values?)
}

/// Λ(−x, λ): the spectral multiplier of τ_x.
pub fn translation_multiplier<'a>(grid: &'a Grid, x: &[f64]) -> impl Fn(&[f64]) -> C64 + Sync + 'a {
    let d = grid.d();
    let mut neg: Vec<f64> = x[..d].iter().map(|v| -v).collect();
    neg.push(x[d]);
    move |lambda: &[f64]| kernel(&grid.params, lambda, &neg)
}

/// F⁻¹[Λ(−x,·) F f].
pub fn translate_spectral(f: &Field, x: &[f64], grid: &Grid) -> Result<Field> {
    check_point(f, x)?;
    let s = forward(f, grid)?;
    inverse(&s.multiply(translation_multiplier(grid, x)), grid)
}

/// F_W(f)·F_W(g) on the spectral nodes.
pub fn convolve_spectrum(f: &Field, g: &Field, grid: &Grid) -> Result<Spectrum> {
    forward(f, grid)?.mul(&forward(g, grid)?)
}

/// f ∗ g by the spectral route.
pub fn convolve(f: &Field, g: &Field, grid: &Grid) -> Result<Field> {
    let mut v = convolve_spectrum(f, g, grid)?.values;
    inverse_values(grid, &mut v);
    Field::from_values(grid, v)
}

/// θ-averages of f over lateral offsets o₀ + m·h (m = 0..2N−1 per axis) and
/// radial node pairs, T[m][i][j] = C_α ∫ f(o, √(r_i²+r_j²+2r_i r_j cos θ)) sin^{2α}θ dθ.
pub(crate) struct TranslationTable {
    offsets_per_axis: usize,
    n_rad: usize,
    values: Vec<C64>,
}

impl TranslationTable {
    pub(crate) fn build(f: &Field, grid: &Grid, origin: f64, rule: &JacobiRule) -> Result<Self> {
        if grid.n_lat > ORACLE_MAX_NODES || grid.n_rad > ORACLE_MAX_NODES {
            return Err(Error::Capability(format!(
                "direct-quadrature oracle is limited to {ORACLE_MAX_NODES} nodes per axis"
            )));
        }
        let d = grid.d();
        let m = 2 * grid.n_lat - 1;
        let nr = grid.n_rad;
        let lat = m.pow(d as u32);
        if lat * nr * nr > ORACLE_MAX_TABLE {
            return Err(Error::Capability("direct-quadrature oracle table too large".into()));
        }
        let h = grid.lateral_spacing();
        let pairs: Vec<(usize, usize)> = (0..nr).flat_map(|i| (i..nr).map(move |j| (i, j))).collect();
        // Unmodulated analytic fields are even in every lateral coordinate, so
        // offsets ±o share a row whenever the offsets sit on multiples of h.
        let steps = origin / h;
        let mirror = f.as_analytic().is_some_and(|a| a.wave.iter().all(|&k| k == 0.0)) && (steps - steps.round()).abs() < 1e-9;
        let base = steps.round() as i64;
        let key = |flat: usize| -> Vec<i64> {
            let mut rem = flat;
            let mut k = vec![0i64; d];
            for axis in (0..d).rev() {
                let idx = (rem % m) as i64;
                k[axis] = if mirror { (base + idx).abs() } else { idx };
                rem /= m;
            }
            k
        };
        let mut slot_of_key: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut reps: Vec<usize> = Vec::new();
        let slots: Vec<usize> = (0..lat)
            .map(|flat| {
                *slot_of_key.entry(key(flat)).or_insert_with(|| {
                    reps.push(flat);
                    reps.len() - 1
                })
            })
            .collect();
        let rows: Result<Vec<Vec<C64>>> = reps
            .into_par_iter()
            .map(|flat| {
                let mut p = vec![0.0; d + 1];
                let mut rem = flat;
                for axis in (0..d).rev() {
                    p[axis] = origin + (rem % m) as f64 * h;
                    rem /= m;
                }
                let mut row = vec![C64::new(0.0, 0.0); nr * nr];
                for &(i, j) in &pairs {
                    let (ri, rj) = (grid.radial_nodes[i], grid.radial_nodes[j]);
                    let mut acc = C64::new(0.0, 0.0);
                    for (&c, w) in rule.cos_nodes.iter().zip(rule.normalized_weights()) {
                        p[d] = law_of_cosines(ri, rj, c);
                        acc += f.eval(&p)? * w;
                    }
                    row[i * nr + j] = acc;
                    row[j * nr + i] = acc;
                }
                Ok(row)
            })
            .collect();
        let rows = rows?;
        let mut values = Vec::with_capacity(lat * nr * nr);
        for &s in &slots {
            values.extend_from_slice(&rows[s]);
        }
        Ok(TranslationTable { offsets_per_axis: m, n_rad: nr, values })
    }

    #[inline]
    pub(crate) fn get(&self, lateral: usize, i: usize, j: usize) -> C64 {
        self.values[(lateral * self.n_rad + i) * self.n_rad + j]
    }

    /// Flat offset index for lateral multi-indices combined as a ± b.
    pub(crate) fn offset_index(&self, a: &[usize], b: &[usize], n: usize, sum: bool) -> usize {
        let mut flat = 0;
        for (&ia, &ib) in a.iter().zip(b) {
            let k = if sum { ia + ib } else { ia + n - 1 - ib };
            flat = flat * self.offsets_per_axis + k;
        }
        flat
    }
}

/// f ∗ g(x) = ∫ τ_x f(−y) g(y) dμ_α(y) by direct quadrature on the grid.
/// f is evaluated off-grid (analytic or interpolated); g only at nodes.
pub fn convolve_direct(f: &Field, g: &Field, grid: &Grid, rule: &JacobiRule) -> Result<Field> {
    let gv = g.values_on(grid)?;
    if grid.params != f.params {
        return Err(Error::Dimension("field and grid have different parameters".into()));
    }
    let origin = -((grid.n_lat - 1) as f64) * grid.lateral_spacing();
    let table = TranslationTable::build(f, grid, origin, rule)?;
    Field::from_values(grid, contract(grid, &table, &gv, false))
}

/// out(x) = Σ_y μ(y) v(y) T[x' ∓ y'][x_r][y_r]; `sum` selects x' + y'.
pub(crate) fn contract(grid: &Grid, table: &TranslationTable, v: &[C64], sum: bool) -> Vec<C64> {
    let d = grid.d();
    let nr = grid.n_rad;
    let n = grid.n_lat;
    let weighted: Vec<C64> = v.iter().enumerate().map(|(i, x)| x * grid.mu_weight(i)).collect();
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    out.par_chunks_mut(nr).enumerate().for_each(|(xf, slab)| {
        let mut xi = vec![0usize; d];
        let mut yi = vec![0usize; d];
        grid.lateral_index(xf, &mut xi);
        for yf in 0..grid.lateral_count() {
            grid.lateral_index(yf, &mut yi);
            let off = table.offset_index(&xi, &yi, n, sum);
            let src = &weighted[yf * nr..(yf + 1) * nr];
            for (kx, o) in slab.iter_mut().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for (ky, w) in src.iter().enumerate() {
                    acc += table.get(off, kx, ky) * w;
                }
                *o += acc;
            }
        }
    });
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct YoungReport {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

pub const YOUNG_SLACK: f64 = 5e-3;

/// ‖f ∗ g‖_r ≤ ‖f‖_p ‖g‖_q with 1/p + 1/q − 1/r = 1, both sides on the grid.
pub fn young_inequality_check(f: &Field, g: &Field, p: f64, q: f64, r: f64, grid: &Grid) -> Result<YoungReport> {
    let inv = |e: f64| if e.is_infinite() { 0.0 } else { 1.0 / e };
    for e in [p, q, r] {
        if !(e >= 1.0) {
            return domain(format!("Young exponents must be >= 1, got {e}"));
        }
    }
    if (inv(p) + inv(q) - inv(r) - 1.0).abs() > 1e-12 {
        return domain(format!("exponents ({p}, {q}, {r}) violate 1/p + 1/q − 1/r = 1"));
    }
    let conv = convolve(f, g, grid)?;
    let cv = &conv.as_sampled().expect("convolution yields samples").values;
    let lhs = norm_p_values(grid, cv, r)?;
    let rhs = f.norm_p(grid, p)? * g.norm_p(grid, q)?;
    let ratio = if rhs == 0.0 {
        if lhs == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        lhs / rhs
    };
    Ok(YoungReport { p, q, r, lhs, rhs, ratio, pass: ratio <= 1.0 + YOUNG_SLACK })
}

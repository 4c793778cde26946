//! The acceptance suite: twelve numbered checks across the transform,
//! translation, wavelet and reconstruction layers, each reduced to a list of
//! measured values against limits.

use crate::calderon::{self, CalderonWindow};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, WeinsteinParams};
use crate::quadrature::{GaussRule, JacobiRule, DEFAULT_THETA_ORDER};
use crate::special::{regularized_lower_gamma, BesselIndex};
use crate::transform::{forward, kernel, plancherel_ratio, round_trip_error};
use crate::translation::{convolve, convolve_direct, convolve_spectrum, translate, translate_spectral, young_inequality_check};
use crate::wavelet::{self, cwt, cwt_direct, default_probes, parseval_cross_check, ScaleGrid, WaveletPair};
use num_complex::Complex64 as C64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Every threshold the suite applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub kernel_bound: f64,
    pub kernel_symmetry: f64,
    pub plancherel: f64,
    pub round_trip: f64,
    pub self_duality: f64,
    pub mass: f64,
    pub translation_routes: f64,
    pub translation_norm: f64,
    pub convolution_routes: f64,
    pub young_slack: f64,
    pub admissibility: f64,
    pub spread: f64,
    pub parseval: f64,
    pub orthogonality: f64,
    pub multiplier_bound: f64,
    pub multiplier_closed_form: f64,
    pub additivity: f64,
    pub reconstruction_routes: f64,
    pub sweep_slack: f64,
    pub sweep_final: f64,
    pub cwt_bound: f64,
    pub cwt_routes: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kernel_bound: 1e-12,
            kernel_symmetry: 1e-12,
            plancherel: 1e-5,
            round_trip: 1e-6,
            self_duality: 1e-5,
            mass: 1e-5,
            translation_routes: 1e-4,
            translation_norm: 1e-6,
            convolution_routes: 1e-3,
            young_slack: 5e-3,
            admissibility: 1e-6,
            spread: 1e-4,
            parseval: 1e-2,
            orthogonality: 1e-6,
            multiplier_bound: 1e-8,
            multiplier_closed_form: 1e-6,
            additivity: 1e-10,
            reconstruction_routes: 1e-3,
            sweep_slack: 1e-9,
            sweep_final: 1e-3,
            cwt_bound: 1e-6,
            cwt_routes: 1e-4,
        }
    }
}

/// Grid sizes, sample counts and the seed of the suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub alphas: Vec<f64>,
    pub n: usize,
    pub extent: f64,
    pub oracle_n: usize,
    pub oracle_extent: f64,
    pub kernel_samples: usize,
    pub translation_samples: usize,
    pub quadrature_nodes: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            alphas: vec![0.5, 1.0],
            n: 256,
            extent: 12.0,
            oracle_n: 64,
            oracle_extent: 12.0,
            kernel_samples: 10_000,
            translation_samples: 50,
            quadrature_nodes: 64,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    AtMost,
    Above,
}

/// One measured quantity and its limit.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    pub fn pass(&self) -> bool {
        match self.bound {
            Bound::AtMost => self.value <= self.limit,
            Bound::Above => self.value > self.limit,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub seconds: f64,
}

impl CriterionResult {
    /// Worst check by distance to its limit, for one-line summaries.
    pub fn summary(&self) -> String {
        if let Some(e) = &self.error {
            return e.clone();
        }
        let failing: Vec<&Check> = self.checks.iter().filter(|c| !c.pass()).collect();
        let shown = if failing.is_empty() { self.checks.iter().collect::<Vec<_>>() } else { failing };
        let worst = shown.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b)));
        match worst {
            Some(c) => {
                let op = if c.bound == Bound::AtMost { "<=" } else { ">" };
                format!("{} = {:.3e} ({op} {:.1e}), {} checks", c.name, c.value, c.limit, self.checks.len())
            }
            None => "no checks".into(),
        }
    }
}

fn ratio(c: &Check) -> f64 {
    match c.bound {
        Bound::AtMost if c.limit > 0.0 => c.value / c.limit,
        Bound::AtMost => c.value,
        Bound::Above => -c.value,
    }
}

pub const CRITERIA: [(u32, &str); 12] = [
    (1, "kernel bound and symmetry"),
    (2, "Plancherel"),
    (3, "round trip"),
    (4, "Gaussian self-duality"),
    (5, "generalized translation"),
    (6, "convolution"),
    (7, "admissibility constants"),
    (8, "Parseval formula and orthogonality"),
    (9, "Calderon multiplier"),
    (10, "direct vs spectral reconstruction"),
    (11, "nested-window convergence"),
    (12, "CWT bound and oracle"),
];

struct Checks(Vec<Check>);

impl Checks {
    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Check { name: name.into(), value, limit, bound: Bound::AtMost });
    }
    fn above(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Check { name: name.into(), value, limit, bound: Bound::Above });
    }
}

/// Runs one criterion; errors turn into a failing result.
pub fn run_criterion(id: u32, cfg: &SuiteConfig, tol: &Tolerances) -> CriterionResult {
    let name = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown").to_string();
    let start = Instant::now();
    let mut checks = Checks(Vec::new());
    let outcome = match id {
        1 => kernel_checks(cfg, tol, &mut checks),
        2 => plancherel_checks(cfg, tol, &mut checks),
        3 => round_trip_checks(cfg, tol, &mut checks),
        4 => self_duality_checks(cfg, tol, &mut checks),
        5 => translation_checks(cfg, tol, &mut checks),
        6 => convolution_checks(cfg, tol, &mut checks),
        7 => admissibility_checks(cfg, tol, &mut checks),
        8 => parseval_checks(cfg, tol, &mut checks),
        9 => multiplier_checks(cfg, tol, &mut checks),
        10 => reconstruction_checks(cfg, tol, &mut checks),
        11 => sweep_checks(cfg, tol, &mut checks),
        12 => cwt_checks(cfg, tol, &mut checks),
        _ => Err(Error::Config(format!("no criterion {id}"))),
    };
    let checks = checks.0;
    let error = outcome.err().map(|e| e.to_string());
    let pass = error.is_none() && !checks.is_empty() && checks.iter().all(Check::pass);
    CriterionResult { id, name, pass, checks, error, seconds: start.elapsed().as_secs_f64() }
}

pub fn run_all(cfg: &SuiteConfig, tol: &Tolerances) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run_criterion(c.0, cfg, tol)).collect()
}

fn params(alpha: f64) -> Result<WeinsteinParams> {
    WeinsteinParams::new(1, alpha)
}

fn main_grid(cfg: &SuiteConfig, p: WeinsteinParams) -> Result<Grid> {
    Grid::new(p, cfg.n, cfg.extent, cfg.n, cfg.extent)
}

fn oracle_grid(cfg: &SuiteConfig, p: WeinsteinParams) -> Result<Grid> {
    Grid::new(p, cfg.oracle_n, cfg.oracle_extent, cfg.oracle_n, cfg.oracle_extent)
}

fn theta_rule(alpha: f64) -> Result<JacobiRule> {
    JacobiRule::new(BesselIndex::new(alpha)?, DEFAULT_THETA_ORDER)
}

fn max_dev(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

fn samples(f: &Field) -> &[C64] {
    &f.as_sampled().expect("sampled field").values
}

fn hermite_pair(p: WeinsteinParams, scales: &ScaleGrid) -> Result<WaveletPair> {
    WaveletPair::new(Field::spectral_hermite(p, 1)?, Field::spectral_hermite(p, 2)?, scales, &default_probes(p.d))
}

/// Sum of laterally shifted, modulated Gaussian lumps with seeded random
/// centres, widths, frequencies and complex amplitudes. Its spectrum is a sum
/// of Gaussian lumps, negligible beyond the grid band.
pub fn random_lump_field(grid: &Grid, seed: u64) -> Result<Field> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = grid.d();
    let lumps: Vec<(Vec<f64>, Vec<f64>, f64, C64)> = (0..4)
        .map(|_| {
            let centre = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let freq = (0..d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let width = rng.random_range(0.7..1.5);
            let amp = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            (centre, freq, width, amp)
        })
        .collect();
    let values = (0..grid.len())
        .map(|i| {
            let x = grid.node(i);
            lumps
                .iter()
                .map(|(c, k, s, a)| {
                    let mut r2 = x[d] * x[d];
                    let mut phase = 0.0;
                    for j in 0..d {
                        r2 += (x[j] - c[j]).powi(2);
                        phase += k[j] * x[j];
                    }
                    a * C64::from_polar((-r2 / (2.0 * s * s)).exp(), phase)
                })
                .sum()
        })
        .collect();
    Field::from_values(grid, values)
}

fn test_fields(cfg: &SuiteConfig, p: WeinsteinParams, grid: &Grid) -> Result<Vec<(&'static str, Field)>> {
    Ok(vec![
        ("gaussian", Field::gaussian(p, 1.0)?),
        ("spectral_hermite_1", Field::spectral_hermite(p, 1)?),
        ("random_lumps", random_lump_field(grid, cfg.seed)?),
    ])
}

fn kernel_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let (mut bound, mut sym): (f64, f64) = (0.0, 0.0);
        for _ in 0..cfg.kernel_samples {
            let l = [rng.random_range(-50.0..50.0), rng.random_range(0.0..50.0)];
            let x = [rng.random_range(-50.0..50.0), rng.random_range(0.0..50.0)];
            let a = kernel(&p, &l, &x);
            bound = bound.max(a.norm() - 1.0);
            sym = sym.max((a - kernel(&p, &x, &l)).norm());
        }
        out.at_most(format!("alpha={alpha}: max |Lambda| - 1"), bound, tol.kernel_bound);
        out.at_most(format!("alpha={alpha}: max |Lambda(l,x) - Lambda(x,l)|"), sym, tol.kernel_symmetry);
    }
    Ok(())
}

fn plancherel_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        for (name, f) in test_fields(cfg, p, &g)? {
            let r = plancherel_ratio(&f, &g)?;
            out.at_most(format!("alpha={alpha} {name}: |ratio - 1|"), (r - 1.0).abs(), tol.plancherel);
        }
    }
    Ok(())
}

fn round_trip_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        for (name, f) in test_fields(cfg, p, &g)? {
            let e = round_trip_error(&f, &g)?;
            out.at_most(format!("alpha={alpha} {name}: relative L2 error"), e, tol.round_trip);
        }
    }
    Ok(())
}

/// ∫ f(x) Λ(λ, x) dμ(x) by a tensor Gauss–Legendre rule on [−L, L] × [0, L].
fn direct_transform(f: impl Fn(&[f64]) -> f64, p: &WeinsteinParams, lambda: &[f64], extent: f64, rule: &GaussRule) -> C64 {
    let two_a1 = 2.0 * p.alpha() + 1.0;
    let mut acc = C64::new(0.0, 0.0);
    for (&tx, &wx) in rule.nodes.iter().zip(&rule.weights) {
        let x0 = extent * tx;
        for (&tr, &wr) in rule.nodes.iter().zip(&rule.weights) {
            let r = 0.5 * extent * (tr + 1.0);
            let x = [x0, r];
            acc += kernel(p, lambda, &x) * (f(&x) * r.powf(two_a1) * wx * wr);
        }
    }
    acc * (p.measure_constant() * extent * 0.5 * extent)
}

fn self_duality_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let rule = GaussRule::legendre(cfg.quadrature_nodes)?;
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        let s = forward(&Field::gaussian(p, 1.0)?, &g)?;
        let exact = |l: &[f64]| (-0.5 * l.iter().map(|v| v * v).sum::<f64>()).exp();
        let dev = (0..g.len()).map(|i| (s.values[i] - exact(&g.freq(i))).norm()).fold(0.0, f64::max);
        out.at_most(format!("alpha={alpha}: max node deviation"), dev, tol.self_duality);

        // 20 spectral nodes with |λ| ≤ 3, spread over both axes
        let mut picked: Vec<usize> = (0..g.len()).filter(|&i| g.freq(i).iter().map(|v| v * v).sum::<f64>() <= 9.0).collect();
        let stride = (picked.len() / 20).max(1);
        picked = picked.into_iter().step_by(stride).take(20).collect();
        let gauss = |x: &[f64]| (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp();
        let ext = 0.85 * cfg.extent;
        let mut worst: f64 = 0.0;
        let mut worst_exact: f64 = 0.0;
        for &i in &picked {
            let l = g.freq(i);
            let q = direct_transform(gauss, &p, &l, ext, &rule);
            worst = worst.max((q - s.values[i]).norm());
            worst_exact = worst_exact.max((q - exact(&l)).norm());
        }
        out.at_most(format!("alpha={alpha}: quadrature vs grid at {} probes", picked.len()), worst, tol.self_duality);
        out.at_most(format!("alpha={alpha}: quadrature vs closed form"), worst_exact, tol.self_duality);
    }
    Ok(())
}

fn translation_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5);
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let rule = theta_rule(alpha)?;
        let og = oracle_grid(cfg, p)?;
        let f = Field::gaussian(p, 1.0)?;
        let fs = f.sample(&og)?;
        let id = translate(&fs, &[0.0, 0.0], &rule, &og)?;
        let exact = samples(&id) == samples(&fs);
        out.at_most(format!("alpha={alpha}: tau_0 f != f"), if exact { 0.0 } else { 1.0 }, 0.0);

        let x = [0.75, 1.25];
        let direct = translate(&f, &x, &rule, &og)?;
        let spectral = translate_spectral(&f, &x, &og)?;
        out.at_most(format!("alpha={alpha}: direct vs spectral max-abs"), max_dev(samples(&direct), samples(&spectral)), tol.translation_routes);
        let m0 = f.integrate(&og)?;
        let m1 = direct.integrate(&og)?;
        out.at_most(format!("alpha={alpha}: mass change (relative)"), (m1 - m0).norm() / m0.norm(), tol.mass);

        let g = main_grid(cfg, p)?;
        let h = random_lump_field(&g, cfg.seed)?;
        let base = h.norm_p(&g, 2.0)?;
        let mut worst: f64 = 0.0;
        for _ in 0..cfg.translation_samples {
            let x = [rng.random_range(-3.0..3.0), rng.random_range(0.0..3.0)];
            let t = translate_spectral(&h, &x, &g)?;
            worst = worst.max(t.norm_p(&g, 2.0)? / base);
        }
        out.at_most(format!("alpha={alpha}: max ||tau_x f||/||f|| - 1"), worst - 1.0, tol.translation_norm);
    }
    Ok(())
}

fn convolution_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        let f = random_lump_field(&g, cfg.seed)?;
        let k = Field::gaussian(p, 0.8)?;
        let prod = convolve_spectrum(&f, &k, &g)?;
        let (ff, fk) = (forward(&f, &g)?, forward(&k, &g)?);
        let exact = prod.values.iter().zip(ff.values.iter().zip(&fk.values)).all(|(c, (a, b))| *c == a * b);
        out.at_most(format!("alpha={alpha}: F(f*g) != Ff.Fg on the fast path"), if exact { 0.0 } else { 1.0 }, 0.0);

        let og = oracle_grid(cfg, p)?;
        let rule = theta_rule(alpha)?;
        let a = Field::gaussian(p, 1.0)?;
        let b = Field::spectral_hermite(p, 1)?;
        let direct = convolve_direct(&a, &b, &og, &rule)?;
        let spectral = convolve(&a, &b, &og)?;
        out.at_most(format!("alpha={alpha}: direct vs spectral max-abs"), max_dev(samples(&direct), samples(&spectral)), tol.convolution_routes);

        for (pp, q, r) in [(1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (2.0, 2.0, f64::INFINITY)] {
            let y = young_inequality_check(&a, &k, pp, q, r, &g)?;
            out.at_most(format!("alpha={alpha}: Young ratio (p,q,r)=({pp},{q},{r})"), y.ratio, 1.0 + tol.young_slack);
        }
    }
    Ok(())
}

/// ½ [γ(s, (a_max ρ)²) − γ(s, (a_min ρ)²)]: the truncated scale integral of
/// SpectralHermite(m₁) against SpectralHermite(m₂), s = m₁ + m₂.
pub fn hermite_constant(m_sum: u32, rho: f64, scales: &ScaleGrid) -> Result<f64> {
    let s = m_sum as f64;
    let g = crate::special::gamma(s)?;
    let hi = regularized_lower_gamma(s, (scales.a_max * rho).powi(2))?;
    let lo = regularized_lower_gamma(s, (scales.a_min * rho).powi(2))?;
    Ok(0.5 * g * (hi - lo))
}

fn admissibility_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let scales = ScaleGrid::default();
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let pr = default_probes(p.d);
        let h1 = Field::spectral_hermite(p, 1)?;
        let h2 = Field::spectral_hermite(p, 2)?;
        let c = wavelet::admissibility_constant(&h1, &scales, &pr)?;
        let cx = wavelet::two_wavelet_constant(&h1, &h2, &scales, &pr)?;
        out.at_most(format!("alpha={alpha}: |C_phi - 1/2|"), (c.mean - 0.5).norm(), tol.admissibility);
        out.at_most(format!("alpha={alpha}: |C_phi_psi - 1|"), (cx.mean - 1.0).norm(), tol.admissibility);
        out.at_most(format!("alpha={alpha}: C_phi probe spread"), c.relative_spread(), tol.spread);
        out.at_most(format!("alpha={alpha}: C_phi_psi probe spread"), cx.relative_spread(), tol.spread);
        let mut worst: f64 = 0.0;
        for (k, probe) in pr.iter().enumerate() {
            let rho = probe.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max((c.per_probe[k] - hermite_constant(2, rho, &scales)?).norm());
            worst = worst.max((cx.per_probe[k] - hermite_constant(3, rho, &scales)?).norm());
        }
        out.at_most(format!("alpha={alpha}: per-probe vs incomplete gamma"), worst, tol.admissibility);
    }
    Ok(())
}

/// Scale grid and probes on which the disjoint-band bump pair is certified.
pub fn bump_pair(p: WeinsteinParams) -> Result<(WaveletPair, ScaleGrid)> {
    let scales = ScaleGrid::new(1.0 / 64.0, 0.5, 513)?;
    let pr = wavelet::probes(p.d, 16.0, 48.0, 8);
    let pair = WaveletPair::new(Field::spectral_bump(p, 1.0, 2.0)?, Field::spectral_bump(p, 3.0, 4.0)?, &scales, &pr)?;
    Ok((pair, scales))
}

fn parseval_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let scales = ScaleGrid::default();
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        let h1 = Field::spectral_hermite(p, 1)?;
        let same = WaveletPair::new(h1.clone(), h1, &scales, &default_probes(p.d))?;
        let f = Field::gaussian(p, 1.0)?.sample(&g)?;
        let r = parseval_cross_check(&f, &f, &same, &scales, &g)?;
        out.at_most(format!("alpha={alpha}: f=g gaussian, phi=psi=H1 deviation"), r.relative_deviation, tol.parseval);

        let cross = hermite_pair(p, &scales)?;
        let u = random_lump_field(&g, cfg.seed)?;
        let v = Field::gaussian(p, 1.5)?.sample(&g)?;
        let r = parseval_cross_check(&u, &v, &cross, &scales, &g)?;
        out.at_most(format!("alpha={alpha}: random f, gaussian g, (H1,H2) deviation"), r.relative_deviation, tol.parseval);

        let (bp, bs) = bump_pair(p)?;
        let r = parseval_cross_check(&u, &v, &bp, &bs, &g)?;
        out.at_most(format!("alpha={alpha}: disjoint-band pair normalized |LHS|"), r.normalized_lhs, tol.orthogonality);
    }
    Ok(())
}

fn multiplier_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let scales = ScaleGrid::default();
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        let pair = hermite_pair(p, &scales)?;
        let (gamma, mid, delta) = (0.25, 1.0, 4.0);
        let k = calderon::multiplier(&pair, CalderonWindow::new(gamma, delta)?, &g, &scales)?;
        let bound = (pair.c_phi.mean.re * pair.c_psi.mean.re).sqrt() / pair.c_phi_psi.mean.re;
        let active = k.active(calderon::ACTIVE_MASS);
        let kmin = active.iter().map(|&i| k.values[i].re).fold(f64::INFINITY, f64::min);
        let kmax = active.iter().map(|&i| k.values[i].re).fold(f64::NEG_INFINITY, f64::max);
        out.above(format!("alpha={alpha}: min K over {} active nodes", active.len()), kmin, 0.0);
        out.at_most(format!("alpha={alpha}: max K - sqrt(C_phi C_psi)/C_phi_psi"), kmax - bound, tol.multiplier_bound);

        let mut worst: f64 = 0.0;
        for i in 0..g.len() {
            let r2: f64 = g.freq(i).iter().map(|v| v * v).sum();
            let exact = regularized_lower_gamma(3.0, delta * delta * r2)? - regularized_lower_gamma(3.0, gamma * gamma * r2)?;
            worst = worst.max((k.values[i] - exact).norm());
        }
        out.at_most(format!("alpha={alpha}: quadrature vs incomplete gamma"), worst, tol.multiplier_closed_form);

        let k1 = calderon::multiplier(&pair, CalderonWindow::new(gamma, mid)?, &g, &scales)?;
        let k2 = calderon::multiplier(&pair, CalderonWindow::new(mid, delta)?, &g, &scales)?;
        let add = (0..g.len()).map(|i| (k.values[i] - k1.values[i] - k2.values[i]).norm()).fold(0.0, f64::max);
        out.at_most(format!("alpha={alpha}: window additivity"), add, tol.additivity);
    }
    Ok(())
}

/// Scale grid whose window (1/2, 2) holds exactly 33 nodes.
pub fn reconstruction_scales() -> Result<ScaleGrid> {
    ScaleGrid::new(1.0 / 64.0, 64.0, 193)
}

fn reconstruction_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let scales = reconstruction_scales()?;
    let window = CalderonWindow::new(0.5, 2.0)?;
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let og = oracle_grid(cfg, p)?;
        let pair = hermite_pair(p, &scales)?;
        let f = Field::gaussian(p, 1.0)?;
        let a = calderon::reconstruct_spectral(&f, &pair, window, &og, &scales)?;
        let b = calderon::reconstruct_direct(&f, &pair, window, &og, &scales, &theta_rule(alpha)?)?;
        out.at_most(format!("alpha={alpha}: direct vs spectral max-abs"), max_dev(samples(&a), samples(&b)), tol.reconstruction_routes);
    }
    Ok(())
}

fn sweep_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let scales = ScaleGrid::default();
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        let pair = hermite_pair(p, &scales)?;
        let f = Field::gaussian(p, 1.0)?;
        let rep = calderon::convergence_sweep(&f, &pair, &calderon::dyadic_windows(6), &g, &scales)?;
        let rise = rep.rows.windows(2).map(|w| w[1].l2_error - w[0].l2_error).fold(f64::NEG_INFINITY, f64::max);
        out.at_most(format!("alpha={alpha}: largest error increase over {} windows", rep.rows.len()), rise, tol.sweep_slack);
        out.at_most(format!("alpha={alpha}: final relative error"), rep.final_relative_error, tol.sweep_final);
    }
    Ok(())
}

fn cwt_checks(cfg: &SuiteConfig, tol: &Tolerances, out: &mut Checks) -> Result<()> {
    let scales = ScaleGrid::default();
    for &alpha in &cfg.alphas {
        let p = params(alpha)?;
        let g = main_grid(cfg, p)?;
        let h1 = Field::spectral_hermite(p, 1)?;
        let f = random_lump_field(&g, cfg.seed)?;
        let m = cwt(&f, &h1, &scales, &g)?;
        let bound = f.norm_p(&g, 2.0)? * wavelet::l2_norm(&h1, &g)?;
        out.at_most(format!("alpha={alpha}: N={} max|Phi| / (||f|| ||phi||) - 1", cfg.n), m.max_abs() / bound - 1.0, tol.cwt_bound);

        let og = oracle_grid(cfg, p)?;
        let local = ScaleGrid::new(0.5, 2.0, 9)?;
        let fg = Field::gaussian(p, 1.0)?;
        let fast = cwt(&fg, &h1, &local, &og)?;
        let direct = cwt_direct(&fg, &h1, &local, &og, &theta_rule(alpha)?)?;
        out.at_most(format!("alpha={alpha}: N={} fast vs inner-product oracle", cfg.oracle_n), max_dev(&fast.values, &direct.values), tol.cwt_routes);
        let bound = wavelet::l2_norm(&fg, &og)? * wavelet::l2_norm(&h1, &og)?;
        let top = fast.max_abs().max(direct.max_abs());
        out.at_most(format!("alpha={alpha}: N={} max|Phi| / (||f|| ||phi||) - 1", cfg.oracle_n), top / bound - 1.0, tol.cwt_bound);
    }
    Ok(())
}

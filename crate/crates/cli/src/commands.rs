//! One function per subcommand. Each builds its inputs from the config,
//! writes its tables into the output directory and returns the checks it ran
//! plus a JSON summary.

use crate::config::{ExperimentConfig, FieldSpec};
use serde_json::{json, Value};
use std::path::Path;
use wwl::calderon::{self, CalderonWindow, ACTIVE_MASS};
use wwl::quadrature::{JacobiRule, DEFAULT_THETA_ORDER};
use wwl::selftest::{self, Bound, Check, Tolerances};
use wwl::special::BesselIndex;
use wwl::transform::{forward, plancherel_ratio, round_trip_error};
use wwl::translation::{convolve, convolve_direct, convolve_spectrum, young_inequality_check};
use wwl::wavelet::{cwt, cwt_direct, l2_norm, parseval_cross_check, ConstantEstimate, WaveletPair};
use wwl::{Error, Field, Grid, Result, C64};

pub struct Flags {
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub sweep: Option<u32>,
    pub oracle: bool,
}

pub struct Outcome {
    pub checks: Vec<Check>,
    pub results: Value,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Check { name: name.into(), value, limit, bound: Bound::AtMost });
    }
    fn above(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.0.push(Check { name: name.into(), value, limit, bound: Bound::Above });
    }
}

/// Everything a subcommand needs, resolved once.
pub struct Context<'a> {
    pub cfg: &'a ExperimentConfig,
    pub tol: &'a Tolerances,
    pub base: &'a Path,
    pub out: &'a Path,
    pub grid: Grid,
}

impl<'a> Context<'a> {
    pub fn new(cfg: &'a ExperimentConfig, base: &'a Path, out: &'a Path) -> Result<Self> {
        Ok(Context { cfg, tol: &cfg.tolerances, base, out, grid: cfg.build_grid()? })
    }

    fn field(&self, spec: &FieldSpec) -> Result<Field> {
        spec.build(self.grid.params, &self.grid, self.cfg.seed, self.base)
    }

    fn pair(&self) -> Result<WaveletPair> {
        let mut pair = WaveletPair::new(
            self.field(&self.cfg.wavelets.phi)?,
            self.field(&self.cfg.wavelets.psi)?,
            &self.cfg.scale_grid()?,
            &self.cfg.probe_set()?,
        )?;
        pair.spread_tolerance = self.tol.spread;
        Ok(pair)
    }

    fn rule(&self) -> Result<JacobiRule> {
        JacobiRule::new(BesselIndex::new(self.cfg.params.alpha)?, DEFAULT_THETA_ORDER)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn samples(f: &Field) -> &[C64] {
    &f.as_sampled().expect("sampled field").values
}

fn max_dev(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max)
}

fn estimate(c: &ConstantEstimate) -> Value {
    json!({
        "mean": [c.mean.re, c.mean.im],
        "spread": c.spread,
        "relative_spread": c.relative_spread(),
        "per_probe": c.per_probe.iter().map(|v| [v.re, v.im]).collect::<Vec<_>>(),
    })
}

pub fn transform(cx: &Context) -> Result<Outcome> {
    let mut ch = Checks::default();
    let f = cx.field(&cx.cfg.input)?;
    let s = forward(&f, &cx.grid)?;
    let header = wwl::io::write_spectrum(cx.out, "spectrum", &s)?;
    let ratio = plancherel_ratio(&f, &cx.grid)?;
    let rt = round_trip_error(&f, &cx.grid)?;
    ch.at_most("|Plancherel ratio - 1|", (ratio - 1.0).abs(), cx.tol.plancherel);
    ch.at_most("round-trip relative L2 error", rt, cx.tol.round_trip);
    Ok(Outcome {
        checks: ch.0,
        results: json!({
            "plancherel_ratio": ratio,
            "round_trip_error": rt,
            "spectrum_norm": s.norm2(),
            "spectrum_max_abs": s.max_abs(),
            "spectrum_dump": header.file_name().map(|n| n.to_string_lossy().into_owned()),
        }),
    })
}

pub fn convolve_cmd(cx: &Context, flags: &Flags) -> Result<Outcome> {
    let mut ch = Checks::default();
    let (f, g) = (cx.field(&cx.cfg.input)?, cx.field(&cx.cfg.second)?);
    let grid = &cx.grid;
    let h = convolve(&f, &g, grid)?;
    wwl::io::write_field(cx.out, "convolution", &h, grid)?;
    let prod = convolve_spectrum(&f, &g, grid)?;
    let (ff, fg) = (forward(&f, grid)?, forward(&g, grid)?);
    let exact = prod.values.iter().zip(ff.values.iter().zip(&fg.values)).all(|(c, (a, b))| *c == a * b);
    ch.at_most("F(f*g) differs from Ff.Fg", if exact { 0.0 } else { 1.0 }, 0.0);
    let mut young = Vec::new();
    for (p, q, r) in [(1.0, 1.0, 1.0), (2.0, 1.0, 2.0), (2.0, 2.0, f64::INFINITY)] {
        let y = young_inequality_check(&f, &g, p, q, r, grid)?;
        ch.at_most(format!("Young ratio (p,q,r)=({p},{q},{r})"), y.ratio, 1.0 + cx.tol.young_slack);
        young.push(json!({"p": p, "q": q, "r": if r.is_infinite() { json!("inf") } else { json!(r) }, "lhs": y.lhs, "rhs": y.rhs, "ratio": y.ratio}));
    }
    let mut oracle = Value::Null;
    if flags.oracle {
        let direct = convolve_direct(&f, &g, grid, &cx.rule()?)?;
        let dev = max_dev(samples(&direct), samples(&h));
        ch.at_most("direct vs spectral max-abs", dev, cx.tol.convolution_routes);
        oracle = json!({"max_abs_deviation": dev});
    }
    Ok(Outcome { checks: ch.0, results: json!({"young": young, "oracle": oracle, "max_abs": samples(&h).iter().map(|v| v.norm()).fold(0.0, f64::max)}) })
}

pub fn cwt_cmd(cx: &Context, flags: &Flags) -> Result<Outcome> {
    let mut ch = Checks::default();
    let grid = &cx.grid;
    let scales = cx.cfg.scale_grid()?;
    let f = cx.field(&cx.cfg.input)?;
    let phi = cx.field(&cx.cfg.wavelets.phi)?;
    let m = cwt(&f, &phi, &scales, grid)?;
    let d = grid.d();
    let mut header: Vec<String> = vec!["scale".into()];
    header.extend((1..=d + 1).map(|k| format!("x{k}")));
    header.extend(["re".into(), "im".into()]);
    let hdr: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = scales.nodes.iter().enumerate().flat_map(|(s, &a)| {
        let row = m.row(s);
        (0..grid.len()).map(move |i| {
            let mut r = vec![a.to_string()];
            r.extend(grid.node(i).iter().map(|v| v.to_string()));
            r.push(row[i].re.to_string());
            r.push(row[i].im.to_string());
            r
        })
    });
    write_table(&cx.out.join("cwt.csv"), &hdr, rows)?;
    let bound = l2_norm(&f, grid)? * l2_norm(&phi, grid)?;
    ch.at_most("max|Phi| / (||f|| ||phi||) - 1", m.max_abs() / bound - 1.0, cx.tol.cwt_bound);
    let mut oracle = Value::Null;
    if flags.oracle {
        let direct = cwt_direct(&f, &phi, &scales, grid, &cx.rule()?)?;
        let dev = max_dev(&m.values, &direct.values);
        ch.at_most("fast vs inner-product oracle max-abs", dev, cx.tol.cwt_routes);
        oracle = json!({"max_abs_deviation": dev});
    }
    Ok(Outcome {
        checks: ch.0,
        results: json!({"n_scales": scales.n_scales, "max_abs": m.max_abs(), "bound": bound, "oracle": oracle}),
    })
}

/// SpectralHermite order of an unscaled, unmodulated Hermite spec.
fn plain_hermite(spec: &FieldSpec) -> Option<u32> {
    match spec {
        FieldSpec::SpectralHermite { m, scale, wave } if *scale == 1.0 && wave.iter().all(|&w| w == 0.0) => Some(*m),
        _ => None,
    }
}

pub fn admissibility(cx: &Context) -> Result<Outcome> {
    let mut ch = Checks::default();
    let pair = cx.pair()?;
    let tol = cx.tol.spread;
    let cross_scale = (pair.c_phi.mean.re * pair.c_psi.mean.re).sqrt();
    ch.above("C_phi", pair.c_phi.mean.re, 0.0);
    ch.above("C_psi", pair.c_psi.mean.re, 0.0);
    ch.at_most("C_phi relative probe spread", pair.c_phi.relative_spread(), tol);
    ch.at_most("C_psi relative probe spread", pair.c_psi.relative_spread(), tol);
    ch.at_most("C_phi_psi probe spread / sqrt(C_phi C_psi)", pair.constancy_spread / cross_scale, tol);
    ch.at_most("|C_phi_psi| / sqrt(C_phi C_psi) - 1", pair.cauchy_schwarz_ratio() - 1.0, 1e-8);
    let mut closed = Value::Null;
    if let (Some(m1), Some(m2)) = (plain_hermite(&cx.cfg.wavelets.phi), plain_hermite(&cx.cfg.wavelets.psi)) {
        let scales = cx.cfg.scale_grid()?;
        let probes = cx.cfg.probe_set()?;
        let mut worst: f64 = 0.0;
        for (k, p) in probes.iter().enumerate() {
            let rho = p.iter().map(|v| v * v).sum::<f64>().sqrt();
            worst = worst.max((pair.c_phi.per_probe[k] - selftest::hermite_constant(2 * m1, rho, &scales)?).norm());
            worst = worst.max((pair.c_psi.per_probe[k] - selftest::hermite_constant(2 * m2, rho, &scales)?).norm());
            worst = worst.max((pair.c_phi_psi.per_probe[k] - selftest::hermite_constant(m1 + m2, rho, &scales)?).norm());
        }
        ch.at_most("per-probe deviation from the incomplete-gamma closed form", worst, cx.tol.admissibility);
        closed = json!({"max_deviation": worst});
    }
    Ok(Outcome {
        checks: ch.0,
        results: json!({
            "c_phi": estimate(&pair.c_phi),
            "c_psi": estimate(&pair.c_psi),
            "c_phi_psi": estimate(&pair.c_phi_psi),
            "cauchy_schwarz_ratio": pair.cauchy_schwarz_ratio(),
            "closed_form": closed,
        }),
    })
}

pub fn parseval(cx: &Context) -> Result<Outcome> {
    let mut ch = Checks::default();
    let pair = cx.pair()?;
    let (f, g) = (cx.field(&cx.cfg.input)?, cx.field(&cx.cfg.second)?);
    let r = parseval_cross_check(&f, &g, &pair, &cx.cfg.scale_grid()?, &cx.grid)?;
    let cross_scale = (pair.c_phi.mean.re * pair.c_psi.mean.re).sqrt();
    if pair.c_phi_psi.mean.norm() <= 1e-12 * cross_scale {
        ch.at_most("normalized |LHS| for an orthogonal pair", r.normalized_lhs, cx.tol.orthogonality);
    } else {
        ch.at_most("|LHS - C<f,g>| / |C<f,g>|", r.relative_deviation, cx.tol.parseval);
    }
    ch.at_most("max|Phi_phi f| / (||f|| ||phi||) - 1", r.max_abs_phi_f / r.bound_phi_f - 1.0, cx.tol.cwt_bound);
    ch.at_most("max|Phi_psi g| / (||g|| ||psi||) - 1", r.max_abs_psi_g / r.bound_psi_g - 1.0, cx.tol.cwt_bound);
    Ok(Outcome {
        checks: ch.0,
        results: json!({
            "lhs": [r.lhs.re, r.lhs.im],
            "rhs": [r.rhs.re, r.rhs.im],
            "c_phi_psi": [r.c_phi_psi.re, r.c_phi_psi.im],
            "relative_deviation": r.relative_deviation,
            "normalized_lhs": r.normalized_lhs,
        }),
    })
}

fn window_list(cx: &Context, flags: &Flags) -> Result<Vec<(f64, f64)>> {
    if let Some(k) = flags.sweep {
        return Ok(calderon::dyadic_windows(k));
    }
    match (flags.gamma, flags.delta) {
        (None, None) => Ok(cx.cfg.calderon_windows()?.iter().map(|w| (w.gamma, w.delta)).collect()),
        (g, d) => {
            let first = cx.cfg.windows.first().copied().unwrap_or([0.25, 4.0]);
            let w = CalderonWindow::new(g.unwrap_or(first[0]), d.unwrap_or(first[1]))?;
            Ok(vec![(w.gamma, w.delta)])
        }
    }
}

pub fn calderon_cmd(cx: &Context, flags: &Flags) -> Result<Outcome> {
    let mut ch = Checks::default();
    let grid = &cx.grid;
    let scales = cx.cfg.scale_grid()?;
    let pair = cx.pair()?;
    let f = cx.field(&cx.cfg.input)?;
    let windows = window_list(cx, flags)?;
    if windows.is_empty() {
        return Err(Error::Config("no Calderon windows configured".into()));
    }
    let sweep = calderon::convergence_sweep(&f, &pair, &windows, grid, &scales)?;
    let rows = sweep.rows.iter().map(|r| {
        vec![r.gamma.to_string(), r.delta.to_string(), r.l2_error.to_string(), r.relative_error.to_string(), r.k_min.to_string(), r.k_max.to_string()]
    });
    write_table(&cx.out.join("calderon.csv"), &["gamma", "delta", "l2_error", "relative_error", "k_min", "k_max"], rows)?;
    if sweep.rows.len() > 1 {
        let rise = sweep.rows.windows(2).map(|w| w[1].l2_error - w[0].l2_error).fold(f64::NEG_INFINITY, f64::max);
        ch.at_most("largest error increase between nested windows", rise, cx.tol.sweep_slack);
        ch.at_most("relative error at the widest window", sweep.final_relative_error, cx.tol.sweep_final);
    }

    // multiplier bound and the widest window's reconstruction
    let &(g, d) = windows.last().expect("nonempty");
    let mut oracle = Value::Null;
    if g < d {
        let win = CalderonWindow::new(g, d)?;
        let k = calderon::multiplier(&pair, win, grid, &scales)?;
        if pair.phi.has_nonnegative_spectrum() && pair.psi.has_nonnegative_spectrum() && pair.c_phi_psi.mean.re > 0.0 {
            let bound = (pair.c_phi.mean.re * pair.c_psi.mean.re).sqrt() / pair.c_phi_psi.mean.re;
            let active = k.active(ACTIVE_MASS);
            let kmin = active.iter().map(|&i| k.values[i].re).fold(f64::INFINITY, f64::min);
            let kmax = active.iter().map(|&i| k.values[i].re).fold(f64::NEG_INFINITY, f64::max);
            ch.above("min K over active nodes", kmin, 0.0);
            ch.at_most("max K - sqrt(C_phi C_psi)/C_phi_psi", kmax - bound, cx.tol.multiplier_bound);
        }
        let ratio = calderon::scale_term_bound_ratio(&f, &pair, grid, &scales)?;
        ch.at_most("per-scale term / (||f|| ||Fphi||_inf ||Fpsi||_inf) - 1", ratio - 1.0, 1e-6);
        let rec = calderon::reconstruct_spectral(&f, &pair, win, grid, &scales)?;
        wwl::io::write_field(cx.out, "reconstruction", &rec, grid)?;
        if flags.oracle {
            let direct = calderon::reconstruct_direct(&f, &pair, win, grid, &scales, &cx.rule()?)?;
            let dev = max_dev(samples(&direct), samples(&rec));
            ch.at_most("direct vs spectral reconstruction max-abs", dev, cx.tol.reconstruction_routes);
            oracle = json!({"max_abs_deviation": dev});
        }
    }
    Ok(Outcome {
        checks: ch.0,
        results: json!({
            "f_norm": sweep.f_norm,
            "rows": sweep.rows,
            "monotone": sweep.monotone,
            "final_relative_error": sweep.final_relative_error,
            "oracle": oracle,
        }),
    })
}

pub fn selftest_cmd(cx: &Context) -> Result<Outcome> {
    let results = selftest::run_all(&cx.cfg.suite, cx.tol);
    let mut checks = Vec::new();
    let mut rows = Vec::new();
    for r in &results {
        for c in &r.checks {
            checks.push(Check { name: format!("criterion {}: {}", r.id, c.name), ..c.clone() });
            rows.push(vec![r.id.to_string(), r.name.clone(), c.name.clone(), c.value.to_string(), c.limit.to_string(), c.pass().to_string()]);
        }
        if let Some(e) = &r.error {
            checks.push(Check { name: format!("criterion {}: {e}", r.id), value: 1.0, limit: 0.0, bound: Bound::AtMost });
            rows.push(vec![r.id.to_string(), r.name.clone(), e.clone(), "1".into(), "0".into(), "false".into()]);
        }
    }
    write_table(&cx.out.join("selftest.csv"), &["criterion", "name", "check", "value", "limit", "pass"], rows)?;
    Ok(Outcome { checks, results: json!({ "criteria": results }) })
}

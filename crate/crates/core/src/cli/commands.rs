//! The four subcommands, as library functions returning typed rows.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use super::grammar::PortSpec;
use super::output::Output;
use super::CliError;
use crate::analytic::{
    example_cat_f_max_saturated, example_squeezed_f_max, f_loss, f_loss_matched_photons,
    f_loss_small_r, f_max, f_unbalanced, f_unbalanced_from_moments, pmc_satisfied, r_critical,
    var_jz_product, AnalyticInputs, LossParams, PmcVerdict,
};
use crate::fock::{wrap_angle, ModeMoments, ModeSpec};
use crate::interferometer::{generator, InterferometerSpec};
use crate::linalg::{C64, I};
use crate::loss::{apply_loss_mode, LossSpec};
use crate::qfi::{qfi_product, qfi_pure};
use crate::two_mode::{tensor, Dims};

/// Rows whose numeric and analytic values differ by more than this carry a
/// warning flag.
pub const WARN_REL: f64 = 1e-4;

/// Phase-matching tolerance for moments measured on truncated states.
pub const MEASURED_PMC_TOL: f64 = 1e-6;

/// Tolerance for reporting that the QFI sits at its phase-matched maximum.
pub const AT_MAX_REL: f64 = 1e-6;

/// `|numeric - analytic| / max(|analytic|, 1)`: relative above unit scale,
/// absolute below it.
pub fn rel_err(numeric: f64, analytic: f64) -> f64 {
    (numeric - analytic).abs() / analytic.abs().max(1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct Evaluation {
    pub numeric: f64,
    /// Closed form, when one applies to the inputs.
    pub analytic: Option<f64>,
    /// Closed form with phases matched (lossless, parity-definite port B).
    pub f_max: Option<f64>,
    /// Moments of the states entering the interferometer.
    pub inputs: AnalyticInputs,
    pub pmc: PmcVerdict,
    pub dims: Dims,
}

impl Evaluation {
    pub fn rel_err(&self) -> Option<f64> {
        self.analytic.map(|f| rel_err(self.numeric, f))
    }

    pub fn warning(&self) -> bool {
        self.rel_err().is_some_and(|e| e > WARN_REL)
    }
}

pub fn resolve_dims(
    a: &PortSpec,
    b: &PortSpec,
    global: Option<(usize, usize)>,
) -> crate::Result<Dims> {
    let pick = |p: &PortSpec, g: Option<usize>| match p.dim.or(g) {
        Some(d) => Ok(d),
        None => p.mode.auto_dim(),
    };
    Ok(Dims::new(
        pick(a, global.map(|g| g.0))?,
        pick(b, global.map(|g| g.1))?,
    ))
}

/// `(alpha, phi)` when port A is `|i alpha e^{i phi}>` and port B the even
/// cat `|alpha>_+`.
fn lossy_scheme(a: &ModeSpec, b: &ModeSpec) -> Option<(C64, f64)> {
    match (*a, *b) {
        (ModeSpec::Coherent(beta), ModeSpec::EvenCat(alpha))
            if alpha.norm() > 0.0 && (beta.norm() - alpha.norm()).abs() <= 1e-12 * alpha.norm() =>
        {
            Some((alpha, wrap_angle(beta.arg() - alpha.arg() - FRAC_PI_2)))
        }
        _ => None,
    }
}

fn is_balanced(tau: f64) -> bool {
    (tau.rem_euclid(2.0 * PI) - FRAC_PI_2).abs() < 1e-12
}

/// Numerical QFI of `a (x) b` (optionally after equal loss on both modes)
/// with the matching closed form.
pub fn evaluate(
    a: &ModeSpec,
    b: &ModeSpec,
    dims: Dims,
    tau: f64,
    loss_t: Option<f64>,
) -> crate::Result<Evaluation> {
    let sa = a.build(dims.a)?;
    let sb = b.build(dims.b)?;
    let g = generator(&InterferometerSpec::new(tau, 0.0), dims)?;
    let (numeric, inputs, analytic, fm) = match loss_t {
        None => {
            let numeric = qfi_pure(&tensor(&sa, &sb), &g)?.value;
            let inputs = AnalyticInputs::from_moments(&sa.moments(), &sb.moments());
            // closed forms need a port B of definite parity
            let (analytic, fm) = match sb.parity() {
                Some(_) => {
                    let var_jz = var_jz_product(sa.moments().var_n, sb.moments().var_n);
                    (
                        f_unbalanced_from_moments(tau, &inputs),
                        Some(f_unbalanced(tau, var_jz, f_max(&inputs) / 4.0)),
                    )
                }
                None => (None, None),
            };
            (numeric, inputs, analytic, fm)
        }
        Some(t) => {
            let spec = LossSpec::new(t)?;
            let rho_a = apply_loss_mode(&sa.density(), &spec)?;
            let rho_b = apply_loss_mode(&sb.density(), &spec)?;
            let numeric = qfi_product(&rho_a, &rho_b, &g)?.value;
            let inputs = AnalyticInputs::from_moments(
                &ModeMoments::from_density(&rho_a),
                &ModeMoments::from_density(&rho_b),
            );
            let analytic = lossy_scheme(a, b)
                .filter(|_| is_balanced(tau))
                .map(|(alpha, phi)| f_loss(&LossParams::new(alpha, phi, t)));
            (numeric, inputs, analytic, None)
        }
    };
    Ok(Evaluation {
        numeric,
        analytic,
        f_max: fm,
        inputs,
        pmc: pmc_satisfied(inputs.a2, inputs.b2, MEASURED_PMC_TOL),
        dims,
    })
}

fn dims_meta(meta: &mut Map<String, Value>, dims: Dims) {
    meta.insert("dims".into(), json!([dims.a, dims.b]));
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_points(points: usize) -> Result<(), CliError> {
    if points < 2 {
        return Err(usage(format!("--points must be at least 2, got {points}")));
    }
    Ok(())
}

/// `n` points on `[lo, hi)`, for periodic variables.
pub fn periodic_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(|i| lo + i as f64 * h).collect()
}

/// `n` points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let h = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * h })
        .collect()
}

// ---------------------------------------------------------------- qfi

#[derive(Clone, Debug)]
pub struct QfiConfig {
    pub a: PortSpec,
    pub b: PortSpec,
    pub tau: f64,
    pub loss_t: Option<f64>,
    pub dims: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct QfiRow {
    pub f_numeric: f64,
    pub f_analytic: Option<f64>,
    pub rel_err: Option<f64>,
    pub f_max: Option<f64>,
    pub at_max: Option<bool>,
    pub pmc_residual: Option<f64>,
    pub pmc_vacuous: bool,
    pub nbar_a: f64,
    pub nbar_b: f64,
    pub dim_a: usize,
    pub dim_b: usize,
    pub warning: bool,
}

pub fn cmd_qfi(cfg: &QfiConfig) -> Result<Output<QfiRow>, CliError> {
    let dims = resolve_dims(&cfg.a, &cfg.b, cfg.dims)?;
    let ev = evaluate(&cfg.a.mode, &cfg.b.mode, dims, cfg.tau, cfg.loss_t)?;
    let row = QfiRow {
        f_numeric: ev.numeric,
        f_analytic: ev.analytic,
        rel_err: ev.rel_err(),
        f_max: ev.f_max,
        at_max: ev.f_max.map(|m| rel_err(ev.numeric, m) <= AT_MAX_REL),
        pmc_residual: ev.pmc.residual(),
        pmc_vacuous: ev.pmc == PmcVerdict::Vacuous,
        nbar_a: ev.inputs.nbar_a,
        nbar_b: ev.inputs.nbar_b,
        dim_a: dims.a,
        dim_b: dims.b,
        warning: ev.warning(),
    };
    let mut meta = Map::new();
    dims_meta(&mut meta, dims);
    meta.insert("tau".into(), json!(cfg.tau));
    meta.insert("loss_T".into(), json!(cfg.loss_t));
    let mut summary = Map::new();
    let warnings = ev.inputs.warnings();
    if !warnings.is_empty() {
        summary.insert("moment_warning".into(), json!(warnings));
    }
    Ok(Output {
        meta,
        rows: vec![row],
        summary,
    })
}

// ---------------------------------------------------------------- pmc-scan

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum PhaseScan {
    /// Rotate the phase of the port A parameter.
    #[default]
    PhaseA,
    /// Rotate the phase of the port B parameter.
    PhaseB,
    /// Lossy scheme: port A `|i alpha e^{i phi}>`, port B `cat+:alpha`.
    LossyPhase,
}

#[derive(Clone, Debug)]
pub struct PmcScanConfig {
    pub a: Option<PortSpec>,
    pub b: PortSpec,
    pub tau: f64,
    pub loss_t: Option<f64>,
    pub scan: PhaseScan,
    pub points: usize,
    pub range: Option<(f64, f64)>,
    pub dims: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub phi: f64,
    pub f_numeric: f64,
    pub f_analytic: Option<f64>,
    pub rel_err: Option<f64>,
    pub pmc_residual: Option<f64>,
    pub warning: bool,
}

pub fn cmd_pmc_scan(cfg: &PmcScanConfig) -> Result<Output<PhaseRow>, CliError> {
    check_points(cfg.points)?;
    let (lo, hi) = cfg.range.unwrap_or((0.0, PI));
    let grid = periodic_grid(lo, hi, cfg.points);

    type Ports<'a> = Box<dyn Fn(f64) -> (ModeSpec, ModeSpec) + Sync + 'a>;
    let (ports, base): (Ports, (PortSpec, PortSpec)) = match cfg.scan {
        PhaseScan::PhaseA | PhaseScan::PhaseB => {
            let a = cfg
                .a
                .ok_or_else(|| usage("--a is required for this scan"))?;
            let b = cfg.b;
            let f: Ports = if cfg.scan == PhaseScan::PhaseA {
                Box::new(move |phi| (a.mode.with_phase(phi), b.mode))
            } else {
                Box::new(move |phi| (a.mode, b.mode.with_phase(phi)))
            };
            (f, (a, b))
        }
        PhaseScan::LossyPhase => {
            let ModeSpec::EvenCat(alpha) = cfg.b.mode else {
                return Err(usage("lossy-phase needs --b cat+:ALPHA"));
            };
            if cfg.loss_t.is_none() {
                return Err(usage("lossy-phase needs --loss-T"));
            }
            let port_a = move |phi: f64| ModeSpec::Coherent(I * alpha * C64::from_polar(1.0, phi));
            let a = PortSpec {
                mode: port_a(0.0),
                dim: cfg.a.and_then(|p| p.dim),
            };
            let b = cfg.b;
            (Box::new(move |phi| (port_a(phi), b.mode)), (a, b))
        }
    };
    // rotations keep |param|, so one cutoff serves the whole grid
    let dims = resolve_dims(&base.0, &base.1, cfg.dims)?;
    let evals = grid
        .par_iter()
        .map(|&phi| {
            let (a, b) = ports(phi);
            evaluate(&a, &b, dims, cfg.tau, cfg.loss_t)
        })
        .collect::<crate::Result<Vec<_>>>()?;

    let rows: Vec<PhaseRow> = grid
        .iter()
        .zip(&evals)
        .map(|(&phi, ev)| PhaseRow {
            phi,
            f_numeric: ev.numeric,
            f_analytic: ev.analytic,
            rel_err: ev.rel_err(),
            pmc_residual: ev.pmc.residual(),
            warning: ev.warning(),
        })
        .collect();

    let argmax = argmax_by(&rows, |r| r.f_numeric);
    let predicted = match cfg.scan {
        PhaseScan::LossyPhase => Some(0.0),
        _ => {
            let best = rows
                .iter()
                .filter_map(|r| r.pmc_residual.map(|res| (r.phi, res)))
                .min_by(|x, y| x.1.total_cmp(&y.1));
            best.map(|(phi, _)| phi)
        }
    };
    let period = hi - lo;
    let step = period / cfg.points as f64;
    let mut summary = Map::new();
    summary.insert("argmax_phi".into(), json!(rows[argmax].phi));
    summary.insert("argmax_f".into(), json!(rows[argmax].f_numeric));
    summary.insert("grid_step".into(), json!(step));
    summary.insert("predicted_phi".into(), json!(predicted));
    summary.insert(
        "argmax_residual".into(),
        json!(predicted.map(|p| periodic_distance(rows[argmax].phi, p, period))),
    );
    summary.insert(
        "warnings".into(),
        json!(rows.iter().filter(|r| r.warning).count()),
    );
    let mut meta = Map::new();
    dims_meta(&mut meta, dims);
    meta.insert("tau".into(), json!(cfg.tau));
    meta.insert("loss_T".into(), json!(cfg.loss_t));
    meta.insert("range".into(), json!([lo, hi]));
    Ok(Output {
        meta,
        rows,
        summary,
    })
}

/// Distance between two phases on a grid that repeats every `period`.
pub fn periodic_distance(x: f64, y: f64, period: f64) -> f64 {
    let d = (x - y).rem_euclid(period);
    d.min(period - d)
}

fn argmax_by<T>(xs: &[T], key: impl Fn(&T) -> f64) -> usize {
    xs.iter()
        .enumerate()
        .max_by(|a, b| key(a.1).total_cmp(&key(b.1)).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

// ---------------------------------------------------------------- loss-scan

#[derive(Clone, Debug)]
pub struct LossScanConfig {
    pub b: PortSpec,
    pub points: usize,
    pub range: Option<(f64, f64)>,
    pub dims: Option<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LossRow {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub f_numeric: f64,
    /// Closed form at the scanned transmission.
    pub f_closed: f64,
    /// Same, written with the input photon numbers.
    pub f_matched: f64,
    /// First order in `R`.
    pub f_first_order: f64,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "R_c")]
    pub r_c: f64,
    pub above_shot_noise: bool,
    pub rel_err: f64,
    pub warning: bool,
}

pub fn cmd_loss_scan(cfg: &LossScanConfig) -> Result<Output<LossRow>, CliError> {
    check_points(cfg.points)?;
    let ModeSpec::EvenCat(alpha) = cfg.b.mode else {
        return Err(usage("loss-scan needs --b cat+:ALPHA"));
    };
    let (lo, hi) = cfg.range.unwrap_or((0.0, 1.0));
    if lo < 0.0 || hi > 1.0 {
        return Err(usage("transmission range must lie in [0, 1]"));
    }
    let a = PortSpec {
        mode: ModeSpec::Coherent(I * alpha),
        dim: None,
    };
    let dims = resolve_dims(&a, &cfg.b, cfg.dims)?;
    let grid = linspace(lo, hi, cfg.points);
    let evals = grid
        .par_iter()
        .map(|&t| evaluate(&a.mode, &cfg.b.mode, dims, FRAC_PI_2, Some(t)))
        .collect::<crate::Result<Vec<_>>>()?;

    let p0 = LossParams::new(alpha, 0.0, 1.0);
    let (nbar_a, n) = (p0.nbar_a(), p0.total_photons());
    let r_c = r_critical(nbar_a, n);
    let rows: Vec<LossRow> = grid
        .iter()
        .zip(&evals)
        .map(|(&t, ev)| {
            let p = LossParams::new(alpha, 0.0, t);
            let closed = f_loss(&p);
            LossRow {
                t,
                r: p.r(),
                f_numeric: ev.numeric,
                f_closed: closed,
                f_matched: f_loss_matched_photons(&p),
                f_first_order: f_loss_small_r(nbar_a, n, p.r()),
                n,
                r_c,
                above_shot_noise: ev.numeric > n,
                rel_err: rel_err(ev.numeric, closed),
                warning: rel_err(ev.numeric, closed) > WARN_REL,
            }
        })
        .collect();

    let nearest = |f: &dyn Fn(&LossRow) -> f64| {
        rows.iter()
            .min_by(|x, y| f(x).abs().total_cmp(&f(y).abs()))
            .map(|r| r.t)
    };
    let mut summary = Map::new();
    summary.insert("r_critical".into(), json!(r_c));
    summary.insert("t_critical".into(), json!(1.0 - r_c));
    summary.insert(
        "first_order_crossing_T".into(),
        json!(nearest(&|r: &LossRow| r.f_first_order - r.n)),
    );
    summary.insert(
        "numeric_crossing_T".into(),
        json!(nearest(&|r: &LossRow| r.f_numeric - r.n)),
    );
    summary.insert(
        "warnings".into(),
        json!(rows.iter().filter(|r| r.warning).count()),
    );
    let mut meta = Map::new();
    dims_meta(&mut meta, dims);
    meta.insert("alpha".into(), json!([alpha.re, alpha.im]));
    meta.insert("range".into(), json!([lo, hi]));
    Ok(Output {
        meta,
        rows,
        summary,
    })
}

// ---------------------------------------------------------------- heatmap

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum HeatmapExample {
    /// Coherent state and squeezed vacuum.
    #[default]
    Squeezed,
    /// Coherent state and even cat with `tanh|alpha|^2 = 1`.
    Cat,
}

#[derive(Clone, Debug)]
pub struct HeatmapConfig {
    pub example: HeatmapExample,
    pub points: usize,
    pub range: Option<(f64, f64)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatmapRow {
    pub nbar_a: f64,
    pub nbar_b: f64,
    #[serde(rename = "N")]
    pub n: f64,
    pub f_max: f64,
    /// `F_m / N^2`, empty at `N = 0`.
    pub ratio: Option<f64>,
    pub above_heisenberg: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AntiDiagonal {
    #[serde(rename = "N")]
    pub n: f64,
    pub argmax_nbar_a: f64,
    pub argmax_nbar_b: f64,
    pub ratio: f64,
    /// Grid cells between the argmax and the line `nA = nB`.
    pub cells_from_diagonal: f64,
    pub cells_above_heisenberg: usize,
}

pub fn heatmap_rows(cfg: &HeatmapConfig) -> Result<Vec<HeatmapRow>, CliError> {
    check_points(cfg.points)?;
    let (lo, hi) = cfg.range.unwrap_or((0.0, 20.0));
    if lo < 0.0 {
        return Err(usage("photon numbers must be non-negative"));
    }
    let f = match cfg.example {
        HeatmapExample::Squeezed => example_squeezed_f_max,
        HeatmapExample::Cat => example_cat_f_max_saturated,
    };
    let axis = linspace(lo, hi, cfg.points);
    Ok(axis
        .iter()
        .flat_map(|&na| axis.iter().map(move |&nb| (na, nb)))
        .map(|(na, nb)| {
            let n = na + nb;
            let fm = f(na, nb);
            let ratio = (n > 0.0).then(|| fm / (n * n));
            HeatmapRow {
                nbar_a: na,
                nbar_b: nb,
                n,
                f_max: fm,
                ratio,
                above_heisenberg: fm > n * n,
            }
        })
        .collect())
}

/// Per-anti-diagonal argmax of [`heatmap_rows`] output (row-major, `nA` outer).
pub fn anti_diagonals(rows: &[HeatmapRow], points: usize) -> Vec<AntiDiagonal> {
    (0..=2 * (points - 1))
        .filter_map(|s| {
            let cells: Vec<(usize, &HeatmapRow)> = (s.saturating_sub(points - 1)
                ..=s.min(points - 1))
                .map(|i| (i, &rows[i * points + (s - i)]))
                .filter(|(_, r)| r.ratio.is_some())
                .collect();
            let (i, best) = *cells
                .iter()
                .max_by(|x, y| x.1.ratio.unwrap().total_cmp(&y.1.ratio.unwrap()))?;
            Some(AntiDiagonal {
                n: best.n,
                argmax_nbar_a: best.nbar_a,
                argmax_nbar_b: best.nbar_b,
                ratio: best.ratio.unwrap(),
                cells_from_diagonal: (2.0 * i as f64 - s as f64).abs() / 2.0,
                cells_above_heisenberg: cells.iter().filter(|(_, r)| r.above_heisenberg).count(),
            })
        })
        .collect()
}

pub fn cmd_heatmap(cfg: &HeatmapConfig) -> Result<Output<HeatmapRow>, CliError> {
    let rows = heatmap_rows(cfg)?;
    let diagonals = anti_diagonals(&rows, cfg.points);
    let (lo, hi) = cfg.range.unwrap_or((0.0, 20.0));
    let mut meta = Map::new();
    meta.insert("range".into(), json!([lo, hi]));
    meta.insert("points".into(), json!(cfg.points));
    let mut summary = Map::new();
    summary.insert("antidiagonal".into(), serde_json::to_value(&diagonals)?);
    Ok(Output {
        meta,
        rows,
        summary,
    })
}

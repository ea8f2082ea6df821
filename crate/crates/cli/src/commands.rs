//! The six subcommands. Each returns its files as strings so runs can be
//! compared byte for byte; nothing touches the disk here.

use kgmp::asymptotics::{
    beta_for_mu, bubble, phase_ratio, pohozaev_terms, profile_mass, sphere_solution, BubbleSpec,
    PohozaevReport,
};
use kgmp::energy::{aubin_quotient, aubin_test_function, mp_threshold, sobolev_kn};
use kgmp::gauge::{continuity_check, solve_gauge};
use kgmp::mountainpass::{mountain_pass, SolveReport};
use kgmp::{build_grid, Field, Geometry, KgmpError, Params, RadialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{ExperimentConfig, Shape};
use crate::output::{to_json, Artifacts, Cell, Table};
use crate::{CliError, ExitStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub artifacts: Artifacts,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
    pub status: ExitStatus,
}

fn grid_for(cfg: &ExperimentConfig, geometry: Geometry) -> Result<RadialGrid, CliError> {
    build_grid(geometry, cfg.grid.intervals, cfg.grid.grading).map_err(|e| CliError::Config(e.to_string()))
}

fn geometry_with_dim(cfg: &ExperimentConfig, n: usize) -> Result<Geometry, CliError> {
    let geometry = match cfg.geometry.kind {
        Shape::Sphere => Geometry::sphere(n),
        Shape::Ball => Geometry::ball(n, cfg.geometry.r_max),
    };
    geometry.map_err(|e| CliError::Config(e.to_string()))
}

/// `(m1, q)` from the params block, `(1, 1)` without one.
fn gauge_constants(cfg: &ExperimentConfig) -> (f64, f64) {
    cfg.params.as_ref().map_or((1.0, 1.0), |p| (p.m1, p.q))
}

#[derive(Debug, Serialize)]
struct SolveOutput<'a> {
    geometry: Geometry,
    intervals: usize,
    grading: f64,
    params: Params,
    seed_mu: f64,
    accepted: bool,
    report: &'a SolveReport,
}

pub fn run_solve(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let params = cfg.params()?;
    let geometry = cfg.geometry.build()?;
    let grid = grid_for(cfg, geometry)?;
    let spec = BubbleSpec::new(cfg.solve.seed_mu, geometry.n).map_err(|e| CliError::Config(e.to_string()))?;
    let seed = bubble(&grid, &spec);
    let report = mountain_pass(&grid, &params, &seed, &cfg.solver)?;

    let mut profile = Table::new(&["r", "u", "v"]);
    for (i, r) in grid.nodes.iter().enumerate() {
        profile.push(vec![(*r).into(), report.u[i].into(), report.v[i].into()]);
    }
    let mut artifacts = Artifacts::default();
    artifacts.add(
        "solve.json",
        to_json(&SolveOutput {
            geometry,
            intervals: cfg.grid.intervals,
            grading: cfg.grid.grading,
            params,
            seed_mu: cfg.solve.seed_mu,
            accepted: report.is_accepted(),
            report: &report,
        }),
    );
    artifacts.add("solve_profile.csv", profile.to_csv());
    let summary = vec![
        format!("level_c = {:.12e}", report.level_c),
        format!("max u = {:.12e}, min u = {:.12e}", report.u.max(), report.min_u),
        format!(
            "residuals = {:.3e}, {:.3e} after {} Newton steps",
            report.residual1, report.residual2, report.newton_iters
        ),
    ];
    Ok(Outcome {
        artifacts,
        summary,
        status: ExitStatus::Success,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub n: usize,
    pub p: f64,
    pub m0: f64,
    pub m1: f64,
    pub q: f64,
    pub omega: f64,
    pub intervals: usize,
    pub grading: f64,
    /// `ok`, `no_convergence` or `refused`.
    pub status: String,
    pub level_c: Option<f64>,
    pub max_u: Option<f64>,
    pub min_u: Option<f64>,
    pub residual1: Option<f64>,
    pub residual2: Option<f64>,
    pub newton_iters: Option<usize>,
    pub message: String,
}

const SWEEP_HEADER: [&str; 16] = [
    "n", "p", "m0", "m1", "q", "omega", "intervals", "grading", "status", "level_c", "max_u", "min_u",
    "residual1", "residual2", "newton_iters", "message",
];

impl ResultRow {
    fn cells(&self) -> Vec<Cell> {
        vec![
            self.n.into(),
            self.p.into(),
            self.m0.into(),
            self.m1.into(),
            self.q.into(),
            self.omega.into(),
            self.intervals.into(),
            self.grading.into(),
            self.status.as_str().into(),
            self.level_c.into(),
            self.max_u.into(),
            self.min_u.into(),
            self.residual1.into(),
            self.residual2.into(),
            self.newton_iters.map_or(Cell::Text(String::new()), Cell::from),
            self.message.as_str().into(),
        ]
    }
}

#[derive(Debug, Serialize)]
struct SweepSummary<'a> {
    rows: &'a [ResultRow],
    all_ok: bool,
    max_over_median: Option<f64>,
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    Some(if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    })
}

/// `max(max_u) / median(max_u)` over the ok rows.
pub fn max_over_median(rows: &[ResultRow]) -> Option<f64> {
    let values: Vec<f64> = rows.iter().filter_map(|r| r.max_u).collect();
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    median(&values).map(|m| top / m)
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let base = cfg.params()?;
    let block = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("missing [sweep] block".into()))?;
    let omegas = block.omegas(base.m0)?;
    let geometry = cfg.geometry.build()?;
    let grid = grid_for(cfg, geometry)?;
    let spec = BubbleSpec::new(cfg.solve.seed_mu, geometry.n).map_err(|e| CliError::Config(e.to_string()))?;
    let seed = bubble(&grid, &spec);

    let rows: Vec<ResultRow> = omegas
        .par_iter()
        .map(|&omega| {
            let params = Params { omega, ..base };
            let mut row = ResultRow {
                n: params.n,
                p: params.p,
                m0: params.m0,
                m1: params.m1,
                q: params.q,
                omega,
                intervals: cfg.grid.intervals,
                grading: cfg.grid.grading,
                status: "ok".into(),
                level_c: None,
                max_u: None,
                min_u: None,
                residual1: None,
                residual2: None,
                newton_iters: None,
                message: String::new(),
            };
            match mountain_pass(&grid, &params, &seed, &cfg.solver) {
                Ok(r) => {
                    row.level_c = Some(r.level_c);
                    row.max_u = Some(r.u.max());
                    row.min_u = Some(r.min_u);
                    row.residual1 = Some(r.residual1);
                    row.residual2 = Some(r.residual2);
                    row.newton_iters = Some(r.newton_iters);
                }
                Err(e) => {
                    row.status = match e {
                        KgmpError::HypothesisViolated(_) => "refused",
                        _ => "no_convergence",
                    }
                    .into();
                    row.message = e.to_string();
                }
            }
            row
        })
        .collect();

    let mut table = Table::new(&SWEEP_HEADER);
    for row in &rows {
        table.push(row.cells());
    }
    let all_ok = rows.iter().all(|r| r.status == "ok");
    let ratio = max_over_median(&rows);
    let mut artifacts = Artifacts::default();
    artifacts.add("sweep.csv", table.to_csv());
    artifacts.add(
        "sweep.json",
        to_json(&SweepSummary {
            rows: &rows,
            all_ok,
            max_over_median: ratio,
        }),
    );
    let mut summary: Vec<String> = rows
        .iter()
        .map(|r| match r.max_u {
            Some(m) => format!("omega = {:+.4}: max u = {m:.10e}", r.omega),
            None => format!("omega = {:+.4}: {} ({})", r.omega, r.status, r.message),
        })
        .collect();
    if let Some(x) = ratio {
        summary.push(format!("max/median of max u = {x:.6}"));
    }
    let status = if rows.iter().any(|r| r.status == "no_convergence") {
        ExitStatus::SolverFailure
    } else if !all_ok {
        ExitStatus::Refused
    } else {
        ExitStatus::Success
    };
    Ok(Outcome {
        artifacts,
        summary,
        status,
    })
}

/// Keeps the first occurrence of each value; returns the duplicates dropped.
fn dedup(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut kept: Vec<f64> = Vec::new();
    let mut dropped = Vec::new();
    for &v in values {
        if kept.contains(&v) {
            dropped.push(v);
        } else {
            kept.push(v);
        }
    }
    (kept, dropped)
}

#[derive(Debug, Serialize)]
struct PhaseRatioRow {
    n: usize,
    mu: f64,
    q: f64,
    m1: f64,
    intervals: usize,
    ratio: f64,
    core_nodes: usize,
    warning: String,
}

#[derive(Debug, Serialize)]
struct Trend {
    n: usize,
    increasing: bool,
    decreasing: bool,
}

#[derive(Debug, Serialize)]
struct PhaseRatioSummary<'a> {
    rows: &'a [PhaseRatioRow],
    trends: Vec<Trend>,
    warnings: Vec<String>,
}

pub fn run_phase_ratio(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let block = &cfg.phase_ratio;
    if block.mus.is_empty() || block.dims.is_empty() {
        return Err(CliError::Config("phase_ratio needs dims and mus".into()));
    }
    let (mus, dropped) = dedup(&block.mus);
    let mut warnings: Vec<String> = dropped
        .iter()
        .map(|m| format!("duplicate mu {m} ignored"))
        .collect();
    let (m1, q) = gauge_constants(cfg);
    let jobs: Vec<(usize, f64)> = block
        .dims
        .iter()
        .flat_map(|&n| mus.iter().map(move |&mu| (n, mu)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, mu)| {
            let params = Params::critical(n, 1.0, m1, q, 0.0)?;
            let r = phase_ratio(&params, mu, block.intervals)?;
            Ok(PhaseRatioRow {
                n,
                mu,
                q,
                m1,
                intervals: r.intervals,
                ratio: r.ratio,
                core_nodes: r.core_nodes,
                warning: r.warning.unwrap_or_default(),
            })
        })
        .collect::<Result<Vec<_>, KgmpError>>()?;
    warnings.extend(rows.iter().filter(|r| !r.warning.is_empty()).map(|r| r.warning.clone()));

    let mut trends = Vec::new();
    for &n in &block.dims {
        // Ordered by decreasing mu.
        let mut series: Vec<(f64, f64)> = rows.iter().filter(|r| r.n == n).map(|r| (r.mu, r.ratio)).collect();
        series.sort_by(|a, b| b.0.total_cmp(&a.0));
        trends.push(Trend {
            n,
            increasing: series.windows(2).all(|w| w[1].1 > w[0].1),
            decreasing: series.windows(2).all(|w| w[1].1 < w[0].1),
        });
    }
    let mut table = Table::new(&["n", "mu", "q", "m1", "intervals", "ratio", "core_nodes", "warning"]);
    for r in &rows {
        table.push(vec![
            r.n.into(),
            r.mu.into(),
            r.q.into(),
            r.m1.into(),
            r.intervals.into(),
            r.ratio.into(),
            r.core_nodes.into(),
            r.warning.as_str().into(),
        ]);
    }
    let mut summary: Vec<String> = rows
        .iter()
        .map(|r| format!("n = {}, mu = {:e}: ratio = {:.10}", r.n, r.mu, r.ratio))
        .collect();
    summary.extend(warnings.iter().map(|w| format!("warning: {w}")));
    let mut artifacts = Artifacts::default();
    artifacts.add("phase_ratio.csv", table.to_csv());
    artifacts.add(
        "phase_ratio.json",
        to_json(&PhaseRatioSummary {
            rows: &rows,
            trends,
            warnings,
        }),
    );
    Ok(Outcome {
        artifacts,
        summary,
        status: ExitStatus::Success,
    })
}

#[derive(Debug, Serialize)]
struct AubinSummary {
    n: usize,
    lambda: f64,
    threshold: f64,
    min_quotient: f64,
    best_eps: f64,
    below_threshold: bool,
    note: String,
}

pub fn run_aubin_scan(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let block = &cfg.aubin;
    if block.eps.is_empty() {
        return Err(CliError::Config("aubin.eps is empty".into()));
    }
    let geometry = cfg.geometry.build()?;
    let grid = grid_for(cfg, geometry)?;
    let n = geometry.n;
    let kn = sobolev_kn(n)?;
    let threshold = 1.0 / (kn * kn);
    let quotients = block
        .eps
        .iter()
        .map(|&eps| {
            let u = aubin_test_function(&grid, eps, block.rho0)?;
            aubin_quotient(&grid, block.lambda, &u)
        })
        .collect::<Result<Vec<f64>, KgmpError>>()?;
    let mut table = Table::new(&["n", "lambda", "eps", "quotient", "threshold", "below"]);
    for (&eps, &value) in block.eps.iter().zip(&quotients) {
        table.push(vec![
            n.into(),
            block.lambda.into(),
            eps.into(),
            value.into(),
            threshold.into(),
            (value < threshold).into(),
        ]);
    }
    let (best_eps, min_quotient) = block
        .eps
        .iter()
        .copied()
        .zip(quotients.iter().copied())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty scan");
    let below = min_quotient < threshold;
    let note = if below {
        format!("quotient {min_quotient:.10} < 1/K^2 = {threshold:.10} at eps = {best_eps}")
    } else {
        "no sub-threshold eps found within range".to_string()
    };
    let mut artifacts = Artifacts::default();
    artifacts.add("aubin_scan.csv", table.to_csv());
    artifacts.add(
        "aubin_scan.json",
        to_json(&AubinSummary {
            n,
            lambda: block.lambda,
            threshold,
            min_quotient,
            best_eps,
            below_threshold: below,
            note: note.clone(),
        }),
    );
    let mut summary = vec![format!("1/K_{n}^2 = {threshold:.12}, 1/(n K^n) = {:.12}", mp_threshold(n)?)];
    summary.extend(
        block
            .eps
            .iter()
            .zip(&quotients)
            .map(|(e, v)| format!("eps = {e:e}: quotient = {v:.12}")),
    );
    summary.push(note);
    Ok(Outcome {
        artifacts,
        summary,
        status: ExitStatus::Success,
    })
}

#[derive(Debug, Serialize)]
pub struct PohozaevRow {
    pub n: usize,
    pub mu: f64,
    pub beta: f64,
    pub intervals: usize,
    pub grading: f64,
    pub report: PohozaevReport,
    /// `lhs_mass / (-C_n mu^2)`; absent below dimension 5.
    pub mass_ratio: Option<f64>,
    pub r_tilde_over_mu2: f64,
}

/// Exact sphere solutions at `m0^2 = n(n-2)/4`, `omega = 0`, with their
/// Pohozaev terms.
pub fn pohozaev_rows(cfg: &ExperimentConfig) -> Result<Vec<PohozaevRow>, CliError> {
    if cfg.geometry.kind != Shape::Sphere {
        return Err(CliError::Config("pohozaev runs on the sphere".into()));
    }
    if cfg.pohozaev.mus.is_empty() {
        return Err(CliError::Config("pohozaev.mus is empty".into()));
    }
    let n = cfg.geometry.n;
    let nf = n as f64;
    let (m1, q) = gauge_constants(cfg);
    let params = Params::critical(n, (0.25 * nf * (nf - 2.0)).sqrt(), m1, q, 0.0)?;
    let grid = grid_for(cfg, Geometry::sphere(n)?)?;
    let cn = if n >= 5 { Some(profile_mass(n)?) } else { None };
    cfg.pohozaev
        .mus
        .par_iter()
        .map(|&mu| {
            let beta = beta_for_mu(n, mu)?;
            let u = sphere_solution(&grid, beta)?;
            let v = solve_gauge(&grid, &params, &u)?.v;
            let report = pohozaev_terms(&grid, &params, &u, &v, cfg.pohozaev.r0)?;
            Ok(PohozaevRow {
                n,
                mu,
                beta,
                intervals: cfg.grid.intervals,
                grading: cfg.grid.grading,
                mass_ratio: cn.map(|c| report.lhs_mass / (-c * mu * mu)),
                r_tilde_over_mu2: report.r_tilde / (mu * mu),
                report,
            })
        })
        .collect::<Result<Vec<_>, KgmpError>>()
        .map_err(CliError::from)
}

pub fn run_pohozaev(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let rows = pohozaev_rows(cfg)?;
    let mut table = Table::new(&[
        "n",
        "mu",
        "beta",
        "intervals",
        "grading",
        "r0",
        "lhs_mass",
        "lhs_curv",
        "r_tilde",
        "q1",
        "q2",
        "q3",
        "nonlinear_defect",
        "balance_residual",
        "mass_ratio",
        "r_tilde_over_mu2",
        "note",
    ]);
    for r in &rows {
        let p = &r.report;
        table.push(vec![
            r.n.into(),
            r.mu.into(),
            r.beta.into(),
            r.intervals.into(),
            r.grading.into(),
            p.r0.into(),
            p.lhs_mass.into(),
            p.lhs_curv.into(),
            p.r_tilde.into(),
            p.q1.into(),
            p.q2.into(),
            p.q3.into(),
            p.nonlinear_defect.into(),
            p.balance_residual.into(),
            r.mass_ratio.into(),
            r.r_tilde_over_mu2.into(),
            p.note.clone().unwrap_or_default().into(),
        ]);
    }
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "mu = {:e}: lhs_mass = {:.8e}, mass ratio = {}, R/mu^2 = {:.6e}, balance = {:.3e}",
                r.mu,
                r.report.lhs_mass,
                r.mass_ratio.map_or("-".to_string(), |x| format!("{x:.6}")),
                r.r_tilde_over_mu2,
                r.report.balance_residual
            )
        })
        .collect();
    let mut artifacts = Artifacts::default();
    artifacts.add("pohozaev.csv", table.to_csv());
    artifacts.add("pohozaev.json", to_json(&rows));
    Ok(Outcome {
        artifacts,
        summary,
        status: ExitStatus::Success,
    })
}

/// Smooth random field: four cosine modes with a random overall scale.
pub fn random_field(grid: &RadialGrid, rng: &mut ChaCha8Rng) -> Field {
    let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
    let scale = 10f64.powf(rng.random_range(-1.0..1.5));
    let rmax = grid.geometry.r_max;
    Field::from_fn(grid, |r| {
        let s: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (k as f64 * std::f64::consts::PI * r / rmax).cos())
            .sum();
        scale * s
    })
}

#[derive(Debug, Serialize)]
struct GaugeCheckSummary {
    seed: u64,
    bound_checks: usize,
    bound_passes: usize,
    continuity_checks: usize,
    continuity_passes: usize,
}

pub fn run_gauge_check(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let block = &cfg.gauge_check;
    if block.dims.is_empty() || block.charges.is_empty() {
        return Err(CliError::Config("gauge_check needs dims and charges".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let grids = block
        .dims
        .iter()
        .map(|&n| grid_for(cfg, geometry_with_dim(cfg, n)?))
        .collect::<Result<Vec<_>, CliError>>()?;
    let combos = block.dims.len() * block.charges.len();
    let pick = |k: usize| (k % block.dims.len(), (k / block.dims.len()) % block.charges.len());

    let mut bounds = Table::new(&["sample", "n", "q", "m1", "min_v", "max_v", "inv_q", "ok"]);
    let mut bound_passes = 0;
    for k in 0..block.fields {
        let (d, c) = pick(k % combos);
        let (grid, q) = (&grids[d], block.charges[c]);
        let params = Params::critical(grid.dim(), 1.0, block.m1, q, 0.0)?;
        let u = random_field(grid, &mut rng);
        let g = solve_gauge(grid, &params, &u)?;
        let ok = g.min_v >= -1e-10 && g.max_v <= 1.0 / q + 1e-10;
        bound_passes += usize::from(ok);
        bounds.push(vec![
            k.into(),
            grid.dim().into(),
            q.into(),
            block.m1.into(),
            g.min_v.into(),
            g.max_v.into(),
            (1.0 / q).into(),
            ok.into(),
        ]);
    }

    let mut continuity = Table::new(&["sample", "n", "q", "m1", "lhs", "rhs", "ok"]);
    let mut continuity_passes = 0;
    for k in 0..block.pairs {
        let (d, c) = pick(k % combos);
        let (grid, q) = (&grids[d], block.charges[c]);
        let params = Params::critical(grid.dim(), 1.0, block.m1, q, 0.0)?;
        let u1 = random_field(grid, &mut rng);
        let u2 = random_field(grid, &mut rng);
        let check = continuity_check(grid, &params, &u1, &u2)?;
        let ok = check.holds(1e-8);
        continuity_passes += usize::from(ok);
        continuity.push(vec![
            k.into(),
            grid.dim().into(),
            q.into(),
            block.m1.into(),
            check.lhs.into(),
            check.rhs.into(),
            ok.into(),
        ]);
    }

    let summary_data = GaugeCheckSummary {
        seed: cfg.seed,
        bound_checks: block.fields,
        bound_passes,
        continuity_checks: block.pairs,
        continuity_passes,
    };
    let all = bound_passes == block.fields && continuity_passes == block.pairs;
    let mut artifacts = Artifacts::default();
    artifacts.add("gauge_bounds.csv", bounds.to_csv());
    artifacts.add("gauge_continuity.csv", continuity.to_csv());
    artifacts.add("gauge_check.json", to_json(&summary_data));
    Ok(Outcome {
        artifacts,
        summary: vec![
            format!("bounds: {bound_passes}/{} pass", block.fields),
            format!("continuity: {continuity_passes}/{} pass", block.pairs),
        ],
        status: if all {
            ExitStatus::Success
        } else {
            ExitStatus::SolverFailure
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_toml(text).unwrap()
    }

    const S3: &str = "[geometry]\nkind = \"sphere\"\nn = 3\nr_max = 1.0\n[grid]\nintervals = 120\ngrading = 1.0\n\
                      [params]\np = 4.0\nm0 = 1.0\nm1 = 1.0\nq = 1.0\nomega = 0.5\n";

    #[test]
    fn solve_writes_report_and_profile() {
        let out = run_solve(&config(S3)).unwrap();
        assert_eq!(out.status, ExitStatus::Success);
        let csv = out.artifacts.get("solve_profile.csv").unwrap();
        assert_eq!(csv.lines().count(), 122);
        assert!(out.artifacts.get("solve.json").unwrap().contains("\"accepted\": true"));
    }

    #[test]
    fn solve_refuses_large_phase() {
        let text = S3.replace("omega = 0.5", "omega = 1.0");
        assert!(matches!(run_solve(&config(&text)), Err(CliError::Refused(_))));
    }

    #[test]
    fn sweep_records_refusals_per_row() {
        let text = format!("{S3}[sweep]\nfrom = 0.0\nto = 1.2\npoints = 3\n");
        let out = run_sweep(&config(&text)).unwrap();
        let csv = out.artifacts.get("sweep.csv").unwrap();
        let statuses: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(8).unwrap()).collect();
        assert_eq!(statuses, ["ok", "ok", "refused"]);
        assert_eq!(out.status, ExitStatus::Refused);
    }

    #[test]
    fn phase_ratio_deduplicates() {
        let text = "[phase_ratio]\ndims = [3]\nmus = [0.1, 0.1, 0.01]\nintervals = 400\n";
        let out = run_phase_ratio(&config(text)).unwrap();
        assert_eq!(out.artifacts.get("phase_ratio.csv").unwrap().lines().count(), 3);
        assert!(out.summary.iter().any(|l| l.contains("duplicate mu")));
    }

    #[test]
    fn aubin_scan_reports_sharp_side() {
        let base = "[geometry]\nkind = \"sphere\"\nn = 5\nr_max = 1.0\n[grid]\nintervals = 2000\ngrading = 2.0\n";
        let below = run_aubin_scan(&config(&format!("{base}[aubin]\nlambda = 1.0\neps = [0.3, 0.1]\nrho0 = 1.0\n"))).unwrap();
        assert!(below.artifacts.get("aubin_scan.json").unwrap().contains("\"below_threshold\": true"));
        let sharp = run_aubin_scan(&config(&format!("{base}[aubin]\nlambda = 3.75\neps = [0.3, 0.1]\nrho0 = 1.0\n"))).unwrap();
        assert_eq!(sharp.status, ExitStatus::Success);
        assert!(sharp.summary.last().unwrap().contains("no sub-threshold"));
        let empty = config(&format!("{base}[aubin]\nlambda = 1.0\neps = []\nrho0 = 1.0\n"));
        assert!(matches!(run_aubin_scan(&empty), Err(CliError::Config(_))));
    }

    #[test]
    fn gauge_check_is_seeded() {
        let text = "seed = 11\n[grid]\nintervals = 60\ngrading = 1.0\n[gauge_check]\ndims = [3, 5]\ncharges = [1.0]\nfields = 6\npairs = 4\nm1 = 0.5\n";
        let a = run_gauge_check(&config(text)).unwrap();
        let b = run_gauge_check(&config(text)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.status, ExitStatus::Success);
        let c = run_gauge_check(&config(&text.replace("seed = 11", "seed = 12"))).unwrap();
        assert_ne!(a.artifacts, c.artifacts);
    }

    #[test]
    fn pohozaev_needs_sphere() {
        let text = "[geometry]\nkind = \"ball\"\nn = 5\nr_max = 1.0\n";
        assert!(matches!(run_pohozaev(&config(text)), Err(CliError::Config(_))));
    }
}

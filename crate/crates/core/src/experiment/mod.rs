//! Experiment orchestration: validated configurations, per-kind dispatch
//! into the library, deterministic parallel scheduling, and CSV/JSON
//! report assembly.

pub mod fit;
pub mod pool;
pub mod report;
pub mod rng;

use crate::arith::{self, Constants};
use crate::moment::{self, MomentMode};
use crate::short_interval;
use crate::sign_scan::{self, OmegaParams};
use crate::voronoi;
use crate::{ensure, Result};
use report::{CellValue, Row};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// The experiment kinds the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Delta,
    Diff,
    Voronoi,
    Moment,
    Cramer,
    Jutila,
    Maxdiff,
    Signs,
    Persist,
    Largeval,
    Tsang,
    Omega,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 12] = [
        ExperimentKind::Delta,
        ExperimentKind::Diff,
        ExperimentKind::Voronoi,
        ExperimentKind::Moment,
        ExperimentKind::Cramer,
        ExperimentKind::Jutila,
        ExperimentKind::Maxdiff,
        ExperimentKind::Signs,
        ExperimentKind::Persist,
        ExperimentKind::Largeval,
        ExperimentKind::Tsang,
        ExperimentKind::Omega,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentKind::Delta => "delta",
            ExperimentKind::Diff => "diff",
            ExperimentKind::Voronoi => "voronoi",
            ExperimentKind::Moment => "moment",
            ExperimentKind::Cramer => "cramer",
            ExperimentKind::Jutila => "jutila",
            ExperimentKind::Maxdiff => "maxdiff",
            ExperimentKind::Signs => "signs",
            ExperimentKind::Persist => "persist",
            ExperimentKind::Largeval => "largeval",
            ExperimentKind::Tsang => "tsang",
            ExperimentKind::Omega => "omega",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<ExperimentKind> {
        ExperimentKind::ALL
            .iter()
            .find(|k| k.as_str() == s)
            .copied()
            .ok_or_else(|| {
                crate::Error::InvalidParameter(format!(
                    "unknown experiment kind '{s}' (expected one of: {})",
                    ExperimentKind::ALL.map(|k| k.as_str()).join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<OutputFormat> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(crate::Error::InvalidParameter(format!(
                "unknown output format '{s}' (expected csv or json)"
            ))),
        }
    }
}

fn default_seed() -> u64 {
    42
}

fn default_workers() -> usize {
    1
}

/// A fully-specified run: the kind, its numeric parameters (only those the
/// kind uses need to be present), the seed, worker count, and output
/// destination. Serializes losslessly; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_terms: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_len: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_thresh: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples_per_unit: Option<u32>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub worker_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            t: None,
            h: None,
            u: None,
            n_terms: None,
            k: None,
            beta: None,
            c: None,
            min_len: None,
            v_thresh: None,
            delta: None,
            epsilon: None,
            samples_per_unit: None,
            seed: default_seed(),
            worker_count: default_workers(),
            out: None,
            format: OutputFormat::Csv,
        }
    }

    /// Required numeric parameters for each kind (defaults cover the rest).
    fn required(&self) -> &'static [&'static str] {
        use ExperimentKind::*;
        match self.kind {
            Delta | Voronoi | Cramer | Tsang => &["t"],
            Diff => &["t", "u"],
            Moment | Signs | Persist => &["t", "h"],
            Jutila | Maxdiff | Omega => &["t", "h", "u"],
            Largeval => &["t", "u", "v_thresh"],
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.worker_count >= 1,
            "config: worker_count must be >= 1, got {}",
            self.worker_count
        );
        let missing: Vec<&str> = self
            .required()
            .iter()
            .filter(|&&name| match name {
                "t" => self.t.is_none(),
                "h" => self.h.is_none(),
                "u" => self.u.is_none(),
                "v_thresh" => self.v_thresh.is_none(),
                _ => false,
            })
            .copied()
            .collect();
        ensure!(
            missing.is_empty(),
            "config: kind '{}' is missing required parameter(s): {}",
            self.kind.as_str(),
            missing.join(", ")
        );
        for (name, v) in [
            ("t", self.t),
            ("h", self.h),
            ("u", self.u),
            ("k", self.k),
            ("beta", self.beta),
            ("c", self.c),
            ("min_len", self.min_len),
            ("v_thresh", self.v_thresh),
            ("delta", self.delta),
            ("epsilon", self.epsilon),
        ] {
            if let Some(v) = v {
                ensure!(v.is_finite(), "config: parameter '{name}' must be finite");
            }
        }
        Ok(())
    }
}

/// A completed run: the config echo, library version, wall time, and the
/// result rows. Serialized output pins elapsed times to 0 so reports are
/// byte-identical across reruns.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub version: &'static str,
    pub wall_ms: u64,
    pub rows: Vec<Row>,
}

/// Decades 10⁵, 10⁶, … up to and including t.
fn decade_grid(t: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut v = 1e5;
    while v <= t * (1.0 + 1e-12) {
        grid.push(v);
        v *= 10.0;
    }
    grid
}

fn base_row(cfg: &ExperimentConfig, op: &'static str) -> Row {
    Row {
        experiment: cfg.kind.as_str(),
        t: None,
        h: None,
        u: None,
        n: None,
        k: None,
        seed: cfg.seed,
        value: 0.0,
        aux1: None,
        aux2: None,
        error_bound: None,
        op,
        ext: Vec::new(),
    }
}

fn dispatch(cfg: &ExperimentConfig) -> Result<Vec<Row>> {
    use ExperimentKind::*;
    match cfg.kind {
        Delta => {
            let t = cfg.t.unwrap();
            let mut row = base_row(cfg, "arith::delta");
            row.t = Some(t);
            row.value = arith::delta(t)?;
            row.aux1 = Some(arith::delta_psi(t)?);
            row.aux2 = Some(arith::divisor_sum(t.floor() as u64)? as f64);
            Ok(vec![row])
        }
        Diff => {
            let (t, u) = (cfg.t.unwrap(), cfg.u.unwrap());
            let mut row = base_row(cfg, "arith::delta_diff");
            row.t = Some(t);
            row.u = Some(u);
            row.value = arith::delta_diff(t, u)?;
            row.aux1 = Some(arith::delta(t)?);
            row.aux2 = Some(arith::delta(t + u)?);
            Ok(vec![row])
        }
        Voronoi => {
            let t = cfg.t.unwrap();
            let n = cfg.n_terms.unwrap_or(1000);
            ensure!(n <= 100_000_000, "voronoi: n_terms {n} exceeds 10^8");
            let vs = voronoi::voronoi_delta(t, n as u32)?;
            let exact = arith::delta(t)?;
            let mut row = base_row(cfg, "voronoi::voronoi_delta");
            row.t = Some(t);
            row.n = Some(n);
            row.value = vs.value;
            row.aux1 = Some(exact);
            row.aux2 = Some(vs.value - exact);
            row.error_bound = Some(vs.tail_bound);
            Ok(vec![row])
        }
        Moment => {
            let (t, h) = (cfg.t.unwrap(), cfg.h.unwrap());
            let k = cfg.k.unwrap_or(2.0);
            let rep = moment::integrate_moment(t, t + h, k, MomentMode::Absolute)?;
            let mut row = base_row(cfg, "moment::integrate_moment");
            row.t = Some(t);
            row.h = Some(h);
            row.k = Some(k);
            row.value = rep.value;
            row.aux1 = Some(rep.value / (h * t.powf(k / 4.0)));
            row.aux2 = Some(rep.segment_count as f64);
            row.error_bound = Some(rep.error_bound);
            row.ext = vec![("mode", CellValue::Text(rep.mode.as_str()))];
            Ok(vec![row])
        }
        Cramer => {
            let t = cfg.t.unwrap();
            ensure!(t >= 1e5, "cramer: T must be >= 10^5 for the decade grid");
            let grid = decade_grid(t);
            pool::parallel_map(&grid, cfg.worker_count, |&ti| {
                let dev = moment::cramer_deviation(ti)?;
                let c = Constants::STANDARD.cramer_constant.to_f64();
                let main = c * ti.powf(1.5);
                let f = main + dev;
                let mut row = base_row(cfg, "moment::cramer_deviation");
                row.t = Some(ti);
                row.value = f;
                row.aux1 = Some(f / ti.powf(1.25));
                row.aux2 = Some(f / main);
                Ok(row)
            })
        }
        Jutila => {
            let (t, h, u) = (cfg.t.unwrap(), cfg.h.unwrap(), cfg.u.unwrap());
            let est = short_interval::jutila_compare(t, h, u)?;
            let mut row = base_row(cfg, "short_interval::jutila_compare");
            row.t = Some(t);
            row.h = Some(h);
            row.u = Some(u);
            row.n = Some(est.n_terms);
            row.value = est.ratio;
            row.aux1 = Some(est.lhs);
            row.aux2 = Some(est.rhs_main);
            row.error_bound = Some(est.quadrature_error);
            row.ext = vec![("predicted_error", CellValue::Num(est.predicted_error))];
            Ok(vec![row])
        }
        Maxdiff => {
            let (t, h, u) = (cfg.t.unwrap(), cfg.h.unwrap(), cfg.u.unwrap());
            let spu = cfg.samples_per_unit.unwrap_or(4);
            let rep = moment::maxdiff_integral(t, h, u, spu)?;
            let mut row = base_row(cfg, "moment::maxdiff_integral");
            row.t = Some(t);
            row.h = Some(h);
            row.u = Some(u);
            row.value = rep.integral_value;
            row.aux1 = Some(rep.integral_value / (h * u * t.ln().powi(5)));
            row.aux2 = Some(rep.max_observed);
            row.ext = vec![
                ("argmax_x", CellValue::Num(rep.argmax_x)),
                ("samples_per_unit", CellValue::Int(rep.samples_per_unit as u64)),
            ];
            Ok(vec![row])
        }
        Signs => {
            let (t, h) = (cfg.t.unwrap(), cfg.h.unwrap());
            let changes = sign_scan::scan_sign_changes(t, t + h)?;
            let mut rows = Vec::with_capacity(changes.len());
            let mut prev: Option<f64> = None;
            for ch in changes {
                let mut row = base_row(cfg, "sign_scan::scan_sign_changes");
                row.t = Some(t);
                row.h = Some(h);
                row.value = ch.location;
                row.aux1 = prev.map(|p| ch.location - p);
                row.error_bound = Some(1e-12);
                row.ext = vec![
                    ("kind", CellValue::Text(ch.kind.as_str())),
                    ("segment", CellValue::Int(ch.segment)),
                ];
                rows.push(row);
                prev = Some(ch.location);
            }
            Ok(rows)
        }
        Persist => {
            let (t, h) = (cfg.t.unwrap(), cfg.h.unwrap());
            let c = cfg.c.unwrap_or(0.1);
            let l = cfg.min_len.unwrap_or(1.0);
            let rep = sign_scan::persistent_intervals(t, h, c, l)?;
            let mk = |side: &'static str, count: usize, list: &[(f64, f64)]| {
                let mut row = base_row(cfg, "sign_scan::persistent_intervals");
                row.t = Some(t);
                row.h = Some(h);
                row.value = count as f64;
                row.aux1 = Some(count as f64 * l / h);
                row.aux2 = Some(list.iter().map(|&(s, e)| e - s).sum());
                row.ext = vec![
                    ("side", CellValue::Text(side)),
                    ("c", CellValue::Num(c)),
                    ("min_len", CellValue::Num(l)),
                ];
                row
            };
            Ok(vec![
                mk("plus", rep.plus_count, &rep.plus_intervals),
                mk("minus", rep.minus_count, &rep.minus_intervals),
            ])
        }
        Largeval => {
            let (t, u, v) = (cfg.t.unwrap(), cfg.u.unwrap(), cfg.v_thresh.unwrap());
            let spu = cfg.samples_per_unit.unwrap_or(1);
            ensure!(spu >= 1, "largeval: samples_per_unit must be >= 1");
            let step = v / spu as f64;
            let rep = short_interval::large_value_scan(t, u, v, step)?;
            let rows = rep
                .points
                .iter()
                .enumerate()
                .map(|(i, &p)| {
                    let mut row = base_row(cfg, "short_interval::large_value_scan");
                    row.t = Some(t);
                    row.u = Some(u);
                    row.value = p;
                    row.aux1 = Some(i as f64);
                    row.aux2 = Some(rep.count as f64);
                    row.ext = vec![
                        ("v_thresh", CellValue::Num(v)),
                        ("step", CellValue::Num(step)),
                    ];
                    row
                })
                .collect();
            Ok(rows)
        }
        Tsang => {
            let t = cfg.t.unwrap();
            ensure!(t >= 1e5, "tsang: T must be >= 10^5 for the decade grid");
            let beta = cfg.beta.unwrap_or(0.6);
            let grid = decade_grid(t);
            pool::parallel_map(&grid, cfg.worker_count, |&ti| {
                let ratio = moment::tsang_ratio(ti, beta)?;
                let hi = ti.powf(beta);
                let mut row = base_row(cfg, "moment::tsang_ratio");
                row.t = Some(ti);
                row.value = ratio;
                row.aux1 = Some(hi);
                row.aux2 = Some(ratio * hi * ti.powf(0.25));
                row.ext = vec![("beta", CellValue::Num(beta))];
                Ok(row)
            })
        }
        Omega => {
            let (t, h, u) = (cfg.t.unwrap(), cfg.h.unwrap(), cfg.u.unwrap());
            let delta = cfg.delta.unwrap_or(0.01);
            let spu = cfg.samples_per_unit.unwrap_or(1);
            let samples = ((h * spu as f64).ceil() as u64).max(1000);
            let params = OmegaParams { u, delta };
            let measure = sign_scan::omega_positive_measure(t, h, params, samples)?;
            let mut row = base_row(cfg, "sign_scan::omega_positive_measure");
            row.t = Some(t);
            row.h = Some(h);
            row.u = Some(u);
            row.value = measure;
            row.aux1 = Some(measure / h);
            row.aux2 = Some(samples as f64);
            row.error_bound = Some(h / samples as f64);
            row.ext = vec![("delta", CellValue::Num(delta))];
            Ok(vec![row])
        }
    }
}

/// Validates the config, dispatches to the library, and (when an output
/// path is configured) writes the rendered report. Nothing is written when
/// any stage fails, so a failed run leaves no partial files.
pub fn run(config: &ExperimentConfig) -> Result<RunReport> {
    config.validate()?;
    let start = std::time::Instant::now();
    let rows = dispatch(config)?;
    let rpt = RunReport {
        config: config.clone(),
        version: env!("CARGO_PKG_VERSION"),
        wall_ms: start.elapsed().as_millis() as u64,
        rows,
    };
    if let Some(path) = &config.out {
        report::write_to_path(&rpt, Path::new(path))?;
    }
    Ok(rpt)
}

use std::fmt::Write as _;

use crate::{Error, Result};

use super::fit::{coefficient_ratios, fit_leading, loglog_exponent, Fit, Form};
use super::run::run_seed;
use super::{Algo, ExperimentConfig};

/// Documented palette constant of the defective levels: every level's
/// palette stays within `C_D * p^2` colors.
pub const DEFECTIVE_COLOR_CONSTANT: f64 = 16.0;

/// Seed-averaged measurements at one degree cap.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub dmax: u32,
    /// Mean measured maximum degree.
    pub delta: f64,
    pub max_awake: f64,
    pub clock_rounds: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSweep {
    pub algo: Algo,
    pub points: Vec<SweepPoint>,
    pub awake_fit: Fit,
    pub clock_fit: Fit,
    pub clock_exponent: f64,
    /// Ratios of consecutive local awake coefficients against the awake form.
    pub awake_ratios: Vec<f64>,
    /// Ratios of consecutive local clock coefficients against the clock form.
    pub clock_ratios: Vec<f64>,
}

/// Expected leading terms of the three coloring algorithms.
pub fn growth_forms(algo: Algo, eps: f64) -> (Form, Form) {
    match algo {
        Algo::Kw31 => (Form::LogSquared, Form::DeltaLog),
        Algo::Batched32 => (Form::Log, Form::Power(1.0 + eps)),
        _ => (Form::LogSquared, Form::Linear),
    }
}

pub fn fit_sweep(algo: Algo, eps: f64, points: Vec<SweepPoint>) -> Result<AlgoSweep> {
    let (awake_form, clock_form) = growth_forms(algo, eps);
    let awake: Vec<(f64, f64)> = points.iter().map(|p| (p.delta, p.max_awake)).collect();
    let clock: Vec<(f64, f64)> = points.iter().map(|p| (p.delta, p.clock_rounds)).collect();
    Ok(AlgoSweep {
        algo,
        awake_fit: fit_leading(&awake, awake_form)?,
        clock_fit: fit_leading(&clock, clock_form)?,
        clock_exponent: loglog_exponent(&clock)?,
        awake_ratios: coefficient_ratios(&awake, awake_form),
        clock_ratios: coefficient_ratios(&clock, clock_form),
        points,
    })
}

#[derive(Debug, Clone)]
pub struct TradeoffReport {
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub sweeps: Vec<AlgoSweep>,
    /// Largest defective-level palette seen, in units of `p^2`.
    pub max_color_factor: f64,
    /// Orderings of the fitted curves that disagree with the expected ranking.
    pub flags: Vec<String>,
}

impl TradeoffReport {
    pub fn sweep(&self, algo: Algo) -> Option<&AlgoSweep> {
        self.sweeps.iter().find(|s| s.algo == algo)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.config;
        writeln!(out, "# tradeoff report, config {}", self.config_hash).unwrap();
        writeln!(
            out,
            "# family={} n={} seeds={:?} eps={}",
            c.family, c.n, c.seeds, c.eps
        )
        .unwrap();
        for s in &self.sweeps {
            writeln!(out, "\n[{}]", s.algo).unwrap();
            writeln!(out, "dmax,delta,max_awake,clock_rounds,valid").unwrap();
            for p in &s.points {
                writeln!(
                    out,
                    "{},{:.2},{:.2},{:.2},{}",
                    p.dmax, p.delta, p.max_awake, p.clock_rounds, p.valid
                )
                .unwrap();
            }
            for (what, fit, ratios) in [
                ("awake", &s.awake_fit, &s.awake_ratios),
                ("clock", &s.clock_fit, &s.clock_ratios),
            ] {
                let res: Vec<String> = fit.residuals.iter().map(|r| format!("{r:.2}")).collect();
                let ratios: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
                writeln!(
                    out,
                    "{what} ~ {:.4} * {}  (relative rms {:.3}; residuals [{}]; local coefficient ratios [{}])",
                    fit.coefficient,
                    fit.form,
                    fit.relative_rms,
                    res.join(", "),
                    ratios.join(", ")
                )
                .unwrap();
            }
            writeln!(out, "clock log-log exponent {:.3}", s.clock_exponent).unwrap();
        }
        writeln!(
            out,
            "\ndefective levels: max palette {:.2} p^2 (documented constant C_D = {DEFECTIVE_COLOR_CONSTANT})",
            self.max_color_factor
        )
        .unwrap();
        if self.flags.is_empty() {
            writeln!(out, "ordering: consistent").unwrap();
        }
        for f in &self.flags {
            writeln!(out, "ordering flag: {f}").unwrap();
        }
        out
    }
}

/// Compares fitted curves at the largest swept degree: clock should rank
/// hstar <= kw31 <= batched32 and awake should rank batched32 lowest.
pub fn ordering_flags(sweeps: &[AlgoSweep]) -> Vec<String> {
    let at_max = |algo: Algo, clock: bool| {
        sweeps.iter().find(|s| s.algo == algo).map(|s| {
            let delta = s.points.iter().map(|p| p.delta).fold(0.0, f64::max);
            let fit = if clock { &s.clock_fit } else { &s.awake_fit };
            fit.coefficient * fit.form.eval(delta)
        })
    };
    let mut flags = Vec::new();
    let pairs = [
        (Algo::Hstar, Algo::Kw31, true),
        (Algo::Kw31, Algo::Batched32, true),
        (Algo::Batched32, Algo::Kw31, false),
        (Algo::Batched32, Algo::Hstar, false),
    ];
    for (low, high, clock) in pairs {
        if let (Some(a), Some(b)) = (at_max(low, clock), at_max(high, clock)) {
            if a > b {
                let what = if clock { "clock" } else { "awake" };
                flags.push(format!("{what}: {low} fitted {a:.1} exceeds {high} fitted {b:.1} at the largest degree"));
            }
        }
    }
    flags
}

/// Sweeps `config.sweep` for kw31, batched32 and hstar and fits each.
pub fn cmd_report_tradeoff(config: &ExperimentConfig) -> Result<TradeoffReport> {
    config.validate()?;
    if config.sweep.len() < 3 {
        return Err(Error::Config(format!(
            "a sweep needs at least 3 degrees, got {}",
            config.sweep.len()
        )));
    }
    let mut sweeps = Vec::new();
    let mut max_color_factor: f64 = 0.0;
    for algo in [Algo::Kw31, Algo::Batched32, Algo::Hstar] {
        let mut points = Vec::new();
        for &dmax in &config.sweep {
            let cfg = ExperimentConfig {
                algo,
                dmax,
                trace: false,
                ..config.clone()
            };
            let (mut delta, mut awake, mut clock, mut valid) = (0.0, 0.0, 0.0, true);
            for &seed in &cfg.seeds {
                let run = run_seed(&cfg, seed)?;
                delta += run.graph.max_degree() as f64;
                awake += crate::sim::awake_complexity(&run.metrics) as f64;
                clock += run.metrics.clock_rounds as f64;
                valid &= run.valid;
                for level in &run.levels {
                    max_color_factor = max_color_factor.max(level.color_factor);
                }
            }
            let k = cfg.seeds.len() as f64;
            points.push(SweepPoint {
                dmax,
                delta: delta / k,
                max_awake: awake / k,
                clock_rounds: clock / k,
                valid,
            });
        }
        sweeps.push(fit_sweep(algo, config.eps.as_f64(), points)?);
    }
    let flags = ordering_flags(&sweeps);
    Ok(TradeoffReport {
        config_hash: config.hash(),
        config: config.clone(),
        sweeps,
        max_color_factor,
        flags,
    })
}

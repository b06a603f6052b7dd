//! Parameter sweeps written as `axis,scheme,engine,value,ci95` CSV.

use std::io::Write;

use clap::ValueEnum;
use fdrelay::alpha::{instantaneous_rate, optimum_rate_at};
use fdrelay::beamforming::{end_to_end_sinr, pair_for};
use fdrelay::model::draw_channel;
use fdrelay::montecarlo::{
    estimate_delay_throughput, estimate_outage, estimate_throughput, optimal_alpha_delay_mc, AlphaPolicy,
};
use fdrelay::outage::{delay_throughput, has_exact, optimal_alpha_delay, outage_exact, OutageQuery};
use fdrelay::{RngStream, Scheme, SystemConfig};
use rayon::prelude::*;

use crate::config::Scenario;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Instantaneous throughput on one seeded draw (analytic) and its
    /// ergodic mean (mc), against α.
    ThroughputVsAlpha,
    /// Outage probability against the source power in dBm.
    OutageVsPs,
    /// Delay-constrained throughput against α.
    DelayVsAlpha,
    /// Delay-constrained throughput at the best α, against LI strength in dBm.
    DelayVsLi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Analytic,
    Mc,
    Both,
}

impl Engine {
    fn includes(self, other: Engine) -> bool {
        self == Engine::Both || self == other
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: Family,
    pub grid: Vec<f64>,
    pub schemes: Vec<Scheme>,
    pub engine: Engine,
    pub n_trials: u64,
    pub seed: u64,
    /// Fixed time split for the outage family.
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub axis: f64,
    pub scheme: Scheme,
    pub engine: &'static str,
    pub value: f64,
    pub ci95: f64,
}

pub fn default_grid(family: Family) -> Vec<f64> {
    let steps = |lo: f64, step: f64, n: usize| (0..n).map(|k| lo + step * k as f64).collect();
    match family {
        Family::ThroughputVsAlpha | Family::DelayVsAlpha => (1..100).map(|k| k as f64 / 100.0).collect(),
        Family::OutageVsPs => steps(0.0, 2.0, 16),
        Family::DelayVsLi => steps(-90.0, 5.0, 17),
    }
}

/// Parses `lo:hi:step` or a comma-separated list.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("invalid grid `{text}`"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid: Vec<f64> = if let [lo, hi, step] = text.split(':').collect::<Vec<_>>()[..] {
        let (lo, hi, step) = (num(lo)?, num(hi)?, num(step)?);
        if step.is_nan() || step <= 0.0 {
            return Err(bad());
        }
        let n = ((hi - lo) / step + 1e-9).floor();
        if n.is_nan() || n < 0.0 {
            return Err(bad());
        }
        (0..=n as usize).map(|k| lo + step * k as f64).collect()
    } else {
        text.split(',').map(num).collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|x| !x.is_finite()) {
        return Err(CliError::Usage(format!("grid `{text}` must be non-empty and strictly increasing")));
    }
    Ok(grid)
}

/// Drops schemes the antenna configuration cannot support, with a warning.
pub fn feasible_schemes(schemes: &[Scheme], cfg: &SystemConfig) -> Vec<Scheme> {
    schemes
        .iter()
        .copied()
        .filter(|s| match s.check_feasible(cfg.m_r, cfg.m_t) {
            Ok(()) => true,
            Err(e) => {
                eprintln!("warning: {e}; rows omitted");
                false
            }
        })
        .collect()
}

type Job = (f64, Scheme, Engine);

pub fn run_sweep(spec: &SweepSpec, scenario: &Scenario) -> Result<Vec<Row>, CliError> {
    let base = scenario.system()?;
    let schemes = feasible_schemes(&spec.schemes, &base);
    let mut jobs: Vec<Job> = Vec::new();
    for &x in &spec.grid {
        for &s in &schemes {
            for e in [Engine::Analytic, Engine::Mc] {
                if spec.engine.includes(e) {
                    jobs.push((x, s, e));
                }
            }
        }
    }
    // Analytic rows that have no closed form are skipped once, loudly.
    if spec.engine.includes(Engine::Analytic) {
        for &s in &schemes {
            if let Some(why) = analytic_gap(spec.family, s, &base) {
                eprintln!("warning: no analytic {s} rows: {why}");
            }
        }
    }
    let results: Vec<Option<Row>> = jobs
        .par_iter()
        .map(|&(x, s, e)| evaluate(spec, scenario, x, s, e))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<Row> = results.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.axis
            .total_cmp(&b.axis)
            .then_with(|| a.scheme.name().cmp(b.scheme.name()))
            .then_with(|| a.engine.cmp(b.engine))
    });
    Ok(rows)
}

fn analytic_gap(family: Family, s: Scheme, cfg: &SystemConfig) -> Option<&'static str> {
    match family {
        Family::ThroughputVsAlpha => None,
        Family::OutageVsPs | Family::DelayVsAlpha | Family::DelayVsLi if !has_exact(s, cfg) => {
            Some("closed-form outage exists only for TZF, RZF and MRC/MRT with a single antenna on one side")
        }
        _ => None,
    }
}

fn evaluate(spec: &SweepSpec, scenario: &Scenario, x: f64, s: Scheme, e: Engine) -> Result<Option<Row>, CliError> {
    let mut sc = scenario.clone();
    match spec.family {
        Family::OutageVsPs => sc.p_s_dbm = x,
        Family::DelayVsLi => sc.li_dbm = x,
        Family::ThroughputVsAlpha | Family::DelayVsAlpha => {}
    }
    let cfg = sc.system()?;
    if e == Engine::Analytic && analytic_gap(spec.family, s, &cfg).is_some() {
        return Ok(None);
    }
    let (n, seed) = (spec.n_trials, spec.seed);
    let (value, ci95) = match (spec.family, e) {
        (Family::ThroughputVsAlpha, Engine::Analytic) => {
            let ch = draw_channel(&cfg, &mut RngStream::new(seed, 0));
            let rate = match s {
                Scheme::Optimum => optimum_rate_at(&ch, &cfg, x)?.0,
                _ => {
                    let link = cfg.link(x)?;
                    instantaneous_rate(x, end_to_end_sinr(&pair_for(s, &ch, &link)?, &ch, &link)?.end_to_end)
                }
            };
            (rate, 0.0)
        }
        (Family::ThroughputVsAlpha, _) => {
            let m = estimate_throughput(s, &cfg, AlphaPolicy::Fixed(x), n, seed)?;
            (m.mean, m.ci_halfwidth_95)
        }
        (Family::OutageVsPs, Engine::Analytic) => {
            (outage_exact(&OutageQuery::new(s, cfg.clone(), spec.alpha))?, 0.0)
        }
        (Family::OutageVsPs, _) => {
            let m = estimate_outage(s, &cfg, spec.alpha, cfg.gamma_th(), n, seed)?;
            (m.mean, m.ci_halfwidth_95)
        }
        (Family::DelayVsAlpha, Engine::Analytic) => {
            let p = outage_exact(&OutageQuery::new(s, cfg.clone(), x))?;
            (delay_throughput(x, cfg.r_c, p), 0.0)
        }
        (Family::DelayVsAlpha, _) => {
            let m = estimate_delay_throughput(s, &cfg, x, n, seed)?;
            (m.mean, m.ci_halfwidth_95)
        }
        (Family::DelayVsLi, Engine::Analytic) => (optimal_alpha_delay(s, &cfg)?.1, 0.0),
        (Family::DelayVsLi, _) => {
            let (a, v) = optimal_alpha_delay_mc(s, &cfg, n, seed)?;
            (v, estimate_delay_throughput(s, &cfg, a, n, seed)?.ci_halfwidth_95)
        }
    };
    Ok(Some(Row {
        axis: x,
        scheme: s,
        engine: if e == Engine::Analytic { "analytic" } else { "mc" },
        value,
        ci95,
    }))
}

pub fn write_csv<W: Write>(rows: &[Row], out: W) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["axis", "scheme", "engine", "value", "ci95"]).map_err(io)?;
    for r in rows {
        w.write_record([
            r.axis.to_string(),
            r.scheme.name().to_string(),
            r.engine.to_string(),
            r.value.to_string(),
            r.ci95.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

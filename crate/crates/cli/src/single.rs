//! One-shot verbs. Output is `key=value` lines; each value key carries its
//! provenance as a suffix (`.exact`, `.closed_form`, `.asymptotic`, `.search`,
//! `.mc`).

use std::fmt::Display;

use fdrelay::alpha::{
    equal_power_best, joint_optimum, optimal_alpha, optimize_power_split, AlphaCoefficients, JointMethod,
};
use fdrelay::beamforming::{end_to_end_sinr, pair_for};
use fdrelay::linalg::CVector;
use fdrelay::model::draw_channel;
use fdrelay::montecarlo::{estimate_delay_throughput, estimate_outage, estimate_throughput, AlphaPolicy};
use fdrelay::outage::{
    delay_throughput, has_exact, optimal_alpha_delay, outage_asymptotic, outage_exact, OutageQuery,
};
use fdrelay::sdr::optimum_transmit;
use fdrelay::{ChannelRealization, RngStream, Scheme, SystemConfig};

use crate::config::dbm_to_watts;
use crate::sweep::Engine;
use crate::CliError;

#[derive(Default)]
pub struct Report(Vec<(String, String)>);

impl Report {
    pub fn put(&mut self, key: impl Into<String>, value: impl Display) {
        self.0.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

fn vector(v: &CVector) -> String {
    v.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect::<Vec<_>>().join(";")
}

/// The draw used by the single-realization verbs: substream 0 of `seed`.
pub fn seeded_channel(cfg: &SystemConfig, seed: u64) -> ChannelRealization {
    draw_channel(cfg, &mut RngStream::new(seed, 0))
}

fn header(r: &mut Report, scheme: Scheme, cfg: &SystemConfig) -> Result<(), CliError> {
    scheme.check_feasible(cfg.m_r, cfg.m_t)?;
    r.put("scheme", scheme);
    Ok(())
}

pub fn beamform(scheme: Scheme, cfg: &SystemConfig, alpha: f64, seed: u64) -> Result<Report, CliError> {
    let mut r = Report::default();
    header(&mut r, scheme, cfg)?;
    let ch = seeded_channel(cfg, seed);
    let link = cfg.link(alpha)?;
    let pair = pair_for(scheme, &ch, &link)?;
    let sinr = end_to_end_sinr(&pair, &ch, &link)?;
    r.put("alpha", alpha);
    r.put("seed", seed);
    if scheme == Scheme::Optimum {
        let sol = optimum_transmit(&ch, &link)?;
        r.put("case", format!("{:?}", sol.case));
        r.put("rank", format!("{:?}", sol.rank_flag));
        r.put("t_star.exact", sol.t_star);
    }
    r.put("degenerate", pair.degenerate);
    r.put("first_hop_sinr.exact", sinr.first_hop);
    r.put("second_hop_sinr.exact", sinr.second_hop);
    r.put("sinr.exact", sinr.end_to_end);
    r.put("rate.exact", (1.0 - alpha) * (1.0 + sinr.end_to_end).log2());
    r.put("w_r", vector(&pair.w_r));
    r.put("w_t", vector(&pair.w_t));
    Ok(r)
}

pub struct OpaRequest {
    pub p_max_dbm: f64,
    pub grid: usize,
}

pub fn alpha(
    scheme: Scheme,
    cfg: &SystemConfig,
    seed: u64,
    method: JointMethod,
    opa: Option<OpaRequest>,
) -> Result<Report, CliError> {
    let mut r = Report::default();
    header(&mut r, scheme, cfg)?;
    r.put("seed", seed);
    let ch = seeded_channel(cfg, seed);
    if let Some(opa) = opa {
        let best = optimize_power_split(scheme, &ch, cfg, dbm_to_watts(opa.p_max_dbm), opa.grid)?;
        let (epa_alpha, epa_rate) = equal_power_best(scheme, &ch, cfg, opa.grid)?;
        let to_dbm = |w: f64| 10.0 * (w * 1e3).log10();
        r.put("alpha.search", best.alpha);
        r.put("energy_split.search", best.split);
        r.put("p_e_dbm.search", to_dbm(best.p_e));
        r.put("p_i_dbm.search", to_dbm(best.p_i));
        r.put("rate.search", best.rate);
        r.put("epa_alpha.search", epa_alpha);
        r.put("epa_rate.search", epa_rate);
        return Ok(r);
    }
    match scheme {
        Scheme::Optimum => {
            let j = joint_optimum(&ch, cfg, method)?;
            r.put("method", format!("{method:?}"));
            r.put("alpha_star.search", j.alpha);
            r.put("rate.search", j.rate);
            r.put("converged", j.converged);
            r.put("w_t", vector(&j.w_t));
        }
        _ => {
            let res = optimal_alpha(&AlphaCoefficients::for_scheme(scheme, &ch, cfg)?);
            r.put("alpha_star.closed_form", res.alpha_star);
            r.put("rate.closed_form", res.rate_at_star);
            r.put("branch", format!("{:?}", res.branch));
        }
    }
    Ok(r)
}

pub struct McRequest {
    pub engine: Engine,
    pub trials: u64,
    pub seed: u64,
}

impl McRequest {
    fn analytic(&self) -> bool {
        matches!(self.engine, Engine::Analytic | Engine::Both)
    }

    fn mc(&self) -> bool {
        matches!(self.engine, Engine::Mc | Engine::Both)
    }
}

pub fn outage(scheme: Scheme, cfg: &SystemConfig, alpha: f64, gamma_th: f64, mc: &McRequest) -> Result<Report, CliError> {
    let mut r = Report::default();
    header(&mut r, scheme, cfg)?;
    r.put("alpha", alpha);
    r.put("gamma_th", gamma_th);
    let q = OutageQuery::new(scheme, cfg.clone(), alpha).with_gamma_th(gamma_th);
    if mc.analytic() {
        if has_exact(scheme, cfg) {
            r.put("outage.exact", outage_exact(&q)?);
            if let Ok(a) = outage_asymptotic(&q) {
                r.put("outage.asymptotic", a);
            }
        } else if mc.engine == Engine::Analytic {
            return Err(CliError::Usage(format!(
                "no closed-form outage for {scheme} with M_R = {}, M_T = {}; use --engine mc",
                cfg.m_r, cfg.m_t
            )));
        } else {
            eprintln!("warning: no closed-form outage for {scheme}; reporting simulation only");
        }
    }
    if mc.mc() {
        let m = estimate_outage(scheme, cfg, alpha, gamma_th, mc.trials, mc.seed)?;
        r.put("outage.mc", m.mean);
        r.put("outage.mc.ci95", m.ci_halfwidth_95);
        r.put("trials", m.n_trials);
        r.put("seed", m.seed);
    }
    Ok(r)
}

/// Delay-constrained throughput (analytic and simulated) and the simulated
/// ergodic throughput. Without `alpha`, every quantity uses its own optimal α.
pub fn throughput(scheme: Scheme, cfg: &SystemConfig, alpha: Option<f64>, mc: &McRequest) -> Result<Report, CliError> {
    let mut r = Report::default();
    header(&mut r, scheme, cfg)?;
    if let Some(a) = alpha {
        r.put("alpha", a);
    }
    let mut delay_alpha = alpha;
    if mc.analytic() {
        if has_exact(scheme, cfg) {
            let (a, v) = match alpha {
                Some(a) => (a, delay_throughput(a, cfg.r_c, outage_exact(&OutageQuery::new(scheme, cfg.clone(), a))?)),
                None => optimal_alpha_delay(scheme, cfg)?,
            };
            delay_alpha = Some(a);
            r.put("delay_alpha.exact", a);
            r.put("delay_throughput.exact", v);
        } else {
            eprintln!("warning: no closed-form outage for {scheme}; delay-constrained throughput is simulated only");
        }
    }
    if mc.mc() {
        let (a, v, ci) = match delay_alpha {
            Some(a) => {
                let m = estimate_delay_throughput(scheme, cfg, a, mc.trials, mc.seed)?;
                (a, m.mean, m.ci_halfwidth_95)
            }
            None => {
                let (a, _) = fdrelay::montecarlo::optimal_alpha_delay_mc(scheme, cfg, mc.trials, mc.seed)?;
                let m = estimate_delay_throughput(scheme, cfg, a, mc.trials, mc.seed)?;
                (a, m.mean, m.ci_halfwidth_95)
            }
        };
        r.put("delay_alpha.mc", a);
        r.put("delay_throughput.mc", v);
        r.put("delay_throughput.mc.ci95", ci);
        let policy = alpha.map_or(AlphaPolicy::PerDrawOptimal, AlphaPolicy::Fixed);
        let e = estimate_throughput(scheme, cfg, policy, mc.trials, mc.seed)?;
        r.put("ergodic_throughput.mc", e.mean);
        r.put("ergodic_throughput.mc.ci95", e.ci_halfwidth_95);
        r.put("flagged", e.flagged);
        r.put("trials", e.n_trials);
        r.put("seed", e.seed);
    }
    Ok(r)
}

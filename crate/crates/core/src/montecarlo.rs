//! Monte Carlo estimators over independent channel draws.
//!
//! Trial `i` always uses the substream `(seed, i)` and trials are reduced in
//! fixed-size chunks merged in index order, so estimates are bit-identical for
//! any number of worker threads.

use rayon::prelude::*;

use crate::alpha::{instantaneous_rate, joint_optimum, optimal_alpha, AlphaCoefficients, JointMethod};
use crate::beamforming::{end_to_end_sinr, max_min_objective, pair_for};
use crate::error::{Error, Result};
use crate::model::{draw_channel, ChannelRealization, Scheme, SystemConfig};
use crate::outage::{delay_throughput, maximize_over_alpha};
use crate::rng::RngStream;
use crate::sdr::{optimum_achieves, optimum_transmit};

const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    /// `1.96·sqrt(var/n)` with the unbiased sample variance.
    pub ci_halfwidth_95: f64,
    pub n_trials: u64,
    pub seed: u64,
    /// Trials whose per-draw optimization hit an iteration cap.
    pub flagged: u64,
}

impl McEstimate {
    /// Binomial standard error `sqrt(p(1−p)/n)` of an indicator mean.
    pub fn binomial_se(&self) -> f64 {
        (self.mean * (1.0 - self.mean) / self.n_trials as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
    flagged: u64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Welford) -> Welford {
        if self.n == 0 {
            return Welford { flagged: self.flagged + o.flagged, ..o };
        }
        if o.n == 0 {
            return Welford { flagged: self.flagged + o.flagged, ..self };
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
            flagged: self.flagged + o.flagged,
        }
    }
}

/// One trial's contribution and whether it was flagged.
pub struct Sample {
    pub value: f64,
    pub flagged: bool,
}

impl From<f64> for Sample {
    fn from(value: f64) -> Self {
        Sample { value, flagged: false }
    }
}

/// Runs `n` trials of `f(trial_rng, channel)` with channels drawn from `cfg`.
pub fn run_trials<F>(cfg: &SystemConfig, n: u64, seed: u64, f: F) -> Result<McEstimate>
where
    F: Fn(&ChannelRealization) -> Result<Sample> + Sync,
{
    if n == 0 {
        return Err(Error::Domain("at least one trial is required".into()));
    }
    cfg.validate()?;
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Welford> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Welford::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let mut rng = RngStream::new(seed, i);
                let ch = draw_channel(cfg, &mut rng);
                let s = f(&ch)?;
                acc.push(s.value);
                acc.flagged += s.flagged as u64;
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let acc = parts.into_iter().fold(Welford::default(), Welford::merge);
    let var = if acc.n > 1 { acc.m2 / (acc.n - 1) as f64 } else { 0.0 };
    Ok(McEstimate {
        mean: acc.mean,
        ci_halfwidth_95: 1.96 * (var / acc.n as f64).sqrt(),
        n_trials: acc.n,
        seed,
        flagged: acc.flagged,
    })
}

/// End-to-end SINR of `scheme` on one draw at time split `alpha`.
pub fn scheme_sinr(scheme: Scheme, ch: &ChannelRealization, cfg: &SystemConfig, alpha: f64) -> Result<f64> {
    let link = cfg.link(alpha)?;
    match scheme {
        Scheme::Optimum => {
            let w = optimum_transmit(ch, &link)?.recovered_w_t;
            Ok(max_min_objective(&w, ch, &link))
        }
        _ => Ok(end_to_end_sinr(&pair_for(scheme, ch, &link)?, ch, &link)?.end_to_end),
    }
}

/// Fraction of draws with SINR below `gamma_th`.
pub fn estimate_outage(
    scheme: Scheme,
    cfg: &SystemConfig,
    alpha: f64,
    gamma_th: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    scheme.check_feasible(cfg.m_r, cfg.m_t)?;
    let link = cfg.link(alpha)?;
    run_trials(cfg, n, seed, |ch| {
        let out = match scheme {
            Scheme::Optimum => !optimum_achieves(ch, &link, gamma_th)?,
            _ => end_to_end_sinr(&pair_for(scheme, ch, &link)?, ch, &link)?.end_to_end < gamma_th,
        };
        Ok(if out { 1.0 } else { 0.0 }.into())
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaPolicy {
    Fixed(f64),
    /// α re-optimized on every draw (alternating method for the optimum scheme).
    PerDrawOptimal,
}

/// Mean instantaneous rate.
pub fn estimate_throughput(
    scheme: Scheme,
    cfg: &SystemConfig,
    policy: AlphaPolicy,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    scheme.check_feasible(cfg.m_r, cfg.m_t)?;
    if let AlphaPolicy::Fixed(a) = policy {
        cfg.link(a)?;
    }
    run_trials(cfg, n, seed, |ch| match policy {
        AlphaPolicy::Fixed(a) => Ok(instantaneous_rate(a, scheme_sinr(scheme, ch, cfg, a)?).into()),
        AlphaPolicy::PerDrawOptimal => match scheme {
            Scheme::Optimum => {
                let j = joint_optimum(ch, cfg, JointMethod::Alternating)?;
                Ok(Sample {
                    value: j.rate,
                    flagged: !j.converged,
                })
            }
            _ => Ok(optimal_alpha(&AlphaCoefficients::for_scheme(scheme, ch, cfg)?)
                .rate_at_star
                .into()),
        },
    })
}

/// `(1 − P̂_out)·R_c·(1 − α)` with the outage estimated at `γ_th = 2^{R_c} − 1`.
pub fn estimate_delay_throughput(
    scheme: Scheme,
    cfg: &SystemConfig,
    alpha: f64,
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    let p = estimate_outage(scheme, cfg, alpha, cfg.gamma_th(), n, seed)?;
    let scale = cfg.r_c * (1.0 - alpha);
    Ok(McEstimate {
        mean: delay_throughput(alpha, cfg.r_c, p.mean),
        ci_halfwidth_95: scale * p.ci_halfwidth_95,
        ..p
    })
}

/// α maximizing the simulated delay-constrained throughput. Every α reuses the
/// same draws, so the objective is a deterministic function of α.
pub fn optimal_alpha_delay_mc(scheme: Scheme, cfg: &SystemConfig, n: u64, seed: u64) -> Result<(f64, f64)> {
    maximize_over_alpha(|a| Ok(estimate_delay_throughput(scheme, cfg, a, n, seed)?.mean))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_serial_welford() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.1).collect();
        let mut all = Welford::default();
        xs.iter().for_each(|&x| all.push(x));
        let mut a = Welford::default();
        let mut b = Welford::default();
        xs[..313].iter().for_each(|&x| a.push(x));
        xs[313..].iter().for_each(|&x| b.push(x));
        let m = a.merge(b);
        assert!((m.mean - all.mean).abs() < 1e-12);
        assert!((m.m2 - all.m2).abs() < 1e-9 * all.m2);
    }

    #[test]
    fn zero_threshold_never_outage() {
        let cfg = SystemConfig::default();
        for s in Scheme::ALL {
            let e = estimate_outage(s, &cfg, 0.5, 0.0, 200, 1).unwrap();
            assert_eq!(e.mean, 0.0);
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let cfg = SystemConfig::default();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_outage(Scheme::Tzf, &cfg, 0.5, 30.0, 10_000, 3).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.ci_halfwidth_95.to_bits(), b.ci_halfwidth_95.to_bits());
    }

    #[test]
    fn fixed_zero_alpha_has_zero_rate() {
        let cfg = SystemConfig::default();
        let e = estimate_throughput(Scheme::MrcMrt, &cfg, AlphaPolicy::Fixed(0.0), 100, 2).unwrap();
        assert_eq!(e.mean, 0.0);
    }
}

//! Scenario parameters, channel draws and the energy-harvesting quantities.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CMatrix, CVector};
use crate::rng::RngStream;

/// Scenario parameters in SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Source transmit power (W).
    pub p_s: f64,
    /// Relay noise variance (W).
    pub sigma2_r: f64,
    /// Destination noise variance (W).
    pub sigma2_d: f64,
    /// Variance of the residual loop-interference channel entries.
    pub sigma2_rr: f64,
    pub d1: f64,
    pub d2: f64,
    /// Path-loss exponent.
    pub tau: f64,
    /// Energy-conversion efficiency.
    pub eta: f64,
    pub m_r: usize,
    pub m_t: usize,
    /// Delay-constrained rate (bits/s/Hz).
    pub r_c: f64,
}

impl Default for SystemConfig {
    /// 10 dBm source, −70 dBm noise, LI 20 dB above the relay noise floor,
    /// 3×3 relay at 20 m / 10 m with τ = 3, η = 0.5, R_c = 2.
    fn default() -> Self {
        Self {
            p_s: 1e-2,
            sigma2_r: 1e-10,
            sigma2_d: 1e-10,
            sigma2_rr: 100.0,
            d1: 20.0,
            d2: 10.0,
            tau: 3.0,
            eta: 0.5,
            m_r: 3,
            m_t: 3,
            r_c: 2.0,
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Config(what.to_string()))
            }
        };
        check(self.p_s > 0.0 && self.p_s.is_finite(), "P_S must be positive")?;
        check(self.sigma2_r > 0.0 && self.sigma2_r.is_finite(), "sigma2_R must be positive")?;
        check(self.sigma2_d > 0.0 && self.sigma2_d.is_finite(), "sigma2_D must be positive")?;
        check(self.sigma2_rr >= 0.0 && self.sigma2_rr.is_finite(), "sigma2_RR must be nonnegative")?;
        check(self.d1 > 0.0 && self.d1.is_finite(), "d1 must be positive")?;
        check(self.d2 > 0.0 && self.d2.is_finite(), "d2 must be positive")?;
        check(self.tau >= 2.0 && self.tau.is_finite(), "tau must be at least 2")?;
        check(self.eta > 0.0 && self.eta <= 1.0, "eta must lie in (0, 1]")?;
        check(self.m_r >= 1 && self.m_t >= 1, "antenna counts must be positive")?;
        check(self.r_c >= 0.0 && self.r_c.is_finite(), "R_c must be nonnegative")?;
        Ok(())
    }

    pub fn rho1(&self) -> f64 {
        self.p_s / self.sigma2_r
    }

    pub fn rho2(&self) -> f64 {
        self.p_s / self.sigma2_d
    }

    /// `d1^τ`
    pub fn pl1(&self) -> f64 {
        self.d1.powf(self.tau)
    }

    /// `d2^τ`
    pub fn pl2(&self) -> f64 {
        self.d2.powf(self.tau)
    }

    /// Outage threshold `2^{R_c} − 1`.
    pub fn gamma_th(&self) -> f64 {
        self.r_c.exp2() - 1.0
    }

    pub fn link(&self, alpha: f64) -> Result<LinkBudget> {
        LinkBudget::new(self, alpha)
    }
}

/// `κ = ηα/(1−α)`.
pub fn kappa(alpha: f64, eta: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} outside [0, 1)")));
    }
    Ok(eta * alpha / (1.0 - alpha))
}

/// Relay transmit power `(κ/d1^τ) P_S ‖h_SR‖²`.
pub fn relay_power(cfg: &SystemConfig, ch: &ChannelRealization, alpha: f64) -> Result<f64> {
    Ok(kappa(alpha, cfg.eta)? / cfg.pl1() * cfg.p_s * norm_sqr(&ch.h_sr))
}

/// Per-block link constants that every SINR expression is written in terms of.
///
/// With equal power in both phases these are `ρ_i = P_S/σ_i²` and `κ = ηα/(1−α)`.
/// Unequal phase powers are folded in by scaling `κ`, which keeps a single code
/// path for the power-split search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub rho1: f64,
    pub rho2: f64,
    pub kappa: f64,
    pub pl1: f64,
    pub pl2: f64,
}

impl LinkBudget {
    pub fn new(cfg: &SystemConfig, alpha: f64) -> Result<Self> {
        Ok(Self {
            rho1: cfg.rho1(),
            rho2: cfg.rho2(),
            kappa: kappa(alpha, cfg.eta)?,
            pl1: cfg.pl1(),
            pl2: cfg.pl2(),
        })
    }

    /// Harvesting-phase power `p_e`, information-phase power `p_i`.
    pub fn with_phase_powers(cfg: &SystemConfig, alpha: f64, p_e: f64, p_i: f64) -> Result<Self> {
        if !(p_e >= 0.0 && p_i > 0.0) {
            return Err(Error::Domain(format!("phase powers ({p_e}, {p_i})")));
        }
        Ok(Self {
            rho1: p_i / cfg.sigma2_r,
            rho2: p_i / cfg.sigma2_d,
            kappa: kappa(alpha, cfg.eta)? * p_e / p_i,
            pl1: cfg.pl1(),
            pl2: cfg.pl2(),
        })
    }

    /// Interference-free first-hop SINR `ρ1‖h_SR‖²/d1^τ`.
    pub fn first_hop_ceiling(&self, ch: &ChannelRealization) -> f64 {
        self.rho1 * norm_sqr(&ch.h_sr) / self.pl1
    }

    /// `(κρ1/d1^τ)‖h_SR‖²`: loop-interference gain per unit `|w_r†H w_t|²`.
    pub fn li_gain(&self, ch: &ChannelRealization) -> f64 {
        self.kappa * self.rho1 / self.pl1 * norm_sqr(&ch.h_sr)
    }

    /// `(κρ2/(d1^τ d2^τ))‖h_SR‖²`: second-hop SNR per unit `|h_RD w_t|²`.
    pub fn hop2_gain(&self, ch: &ChannelRealization) -> f64 {
        self.kappa * self.rho2 / (self.pl1 * self.pl2) * norm_sqr(&ch.h_sr)
    }
}

/// One fading realization. `h_rd` has row-vector semantics: the second-hop
/// gain is `h_RD w_t = Σ h_rd[i]·w_t[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h_sr: CVector,
    pub h_rd: CVector,
    /// `M_R × M_T`
    pub h_rr: CMatrix,
}

impl ChannelRealization {
    pub fn new(h_sr: CVector, h_rd: CVector, h_rr: CMatrix) -> Result<Self> {
        if h_rr.rows() != h_sr.len() || h_rr.cols() != h_rd.len() {
            return Err(Error::Dimension(format!(
                "H_RR is {}x{} but h_SR has {} and h_RD has {} entries",
                h_rr.rows(),
                h_rr.cols(),
                h_sr.len(),
                h_rd.len()
            )));
        }
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite(&h_sr) || !finite(&h_rd) || !h_rr.is_finite() {
            return Err(Error::Domain("non-finite channel entry".into()));
        }
        Ok(Self { h_sr, h_rd, h_rr })
    }

    pub fn m_r(&self) -> usize {
        self.h_sr.len()
    }

    pub fn m_t(&self) -> usize {
        self.h_rd.len()
    }

    pub fn check_dims(&self, cfg: &SystemConfig) -> Result<()> {
        if self.m_r() != cfg.m_r || self.m_t() != cfg.m_t {
            return Err(Error::Dimension(format!(
                "channel is {}x{}, config expects {}x{}",
                self.m_r(),
                self.m_t(),
                cfg.m_r,
                cfg.m_t
            )));
        }
        Ok(())
    }
}

/// Rayleigh draw: unit-variance `h_SR`, `h_RD`; `H_RR` entries with variance `σ_RR²`.
pub fn draw_channel(cfg: &SystemConfig, rng: &mut RngStream) -> ChannelRealization {
    let h_sr: CVector = (0..cfg.m_r).map(|_| rng.next_cn()).collect();
    let h_rd: CVector = (0..cfg.m_t).map(|_| rng.next_cn()).collect();
    let s = cfg.sigma2_rr.sqrt();
    let h_rr = CMatrix::from_fn(cfg.m_r, cfg.m_t, |_, _| {
        let z = rng.next_cn();
        if s == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            z * s
        }
    });
    ChannelRealization { h_sr, h_rd, h_rr }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Optimum,
    Tzf,
    Rzf,
    MrcMrt,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Optimum, Scheme::Tzf, Scheme::Rzf, Scheme::MrcMrt];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Optimum => "opt",
            Scheme::Tzf => "tzf",
            Scheme::Rzf => "rzf",
            Scheme::MrcMrt => "mrc",
        }
    }

    /// TZF needs a spare transmit antenna, RZF a spare receive antenna.
    pub fn check_feasible(self, m_r: usize, m_t: usize) -> Result<()> {
        let ok = match self {
            Scheme::Tzf => m_t > 1,
            Scheme::Rzf => m_r > 1,
            Scheme::Optimum | Scheme::MrcMrt => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::SchemeInfeasible {
                scheme: self.name(),
                m_r,
                m_t,
            })
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "opt" | "optimum" => Ok(Scheme::Optimum),
            "tzf" => Ok(Scheme::Tzf),
            "rzf" => Ok(Scheme::Rzf),
            "mrc" | "mrc-mrt" | "mrcmrt" => Ok(Scheme::MrcMrt),
            other => Err(Error::Config(format!("unknown scheme '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(0.0, 0.5).unwrap(), 0.0);
        assert_eq!(kappa(0.5, 0.5).unwrap(), 0.5);
        assert!((kappa(0.9, 0.5).unwrap() - 4.5).abs() < 1e-12);
        assert!(kappa(1.0, 0.5).is_err());
        assert!(kappa(-0.1, 0.5).is_err());
    }

    #[test]
    fn kappa_monotone() {
        let mut prev = -1.0;
        for i in 0..1000 {
            let k = kappa(i as f64 / 1000.0, 0.7).unwrap();
            assert!(k > prev);
            prev = k;
        }
    }

    #[test]
    fn relay_power_hand_value() {
        let cfg = SystemConfig {
            p_s: 1.0,
            d1: 1.0,
            tau: 3.0,
            eta: 0.5,
            m_r: 2,
            m_t: 1,
            ..SystemConfig::default()
        };
        let one = Complex64::new(1.0, 0.0);
        let ch = ChannelRealization::new(vec![one, one], vec![one], CMatrix::zeros(2, 1)).unwrap();
        assert!((relay_power(&cfg, &ch, 0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(relay_power(&cfg, &ch, 0.0).unwrap(), 0.0);
        let zero = ChannelRealization::new(vec![Complex64::default(); 2], vec![one], CMatrix::zeros(2, 1))
            .unwrap();
        assert_eq!(relay_power(&cfg, &zero, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn draw_is_deterministic_and_li_free_when_zero() {
        let cfg = SystemConfig {
            sigma2_rr: 0.0,
            ..SystemConfig::default()
        };
        let a = draw_channel(&cfg, &mut RngStream::new(3, 17));
        let b = draw_channel(&cfg, &mut RngStream::new(3, 17));
        assert_eq!(a, b);
        assert!(a.h_rr.as_slice().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn validation() {
        assert!(SystemConfig::default().validate().is_ok());
        let bad = SystemConfig {
            tau: 1.5,
            ..SystemConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn scheme_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!(Scheme::Tzf.check_feasible(3, 1).is_err());
        assert!(Scheme::Rzf.check_feasible(1, 3).is_err());
    }
}

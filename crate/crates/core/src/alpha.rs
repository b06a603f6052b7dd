//! Time-split optimization: instantaneous rate, closed-form optimal α per
//! scheme, the joint (α, w_t) search for the optimum scheme, and the
//! two-dimensional power-split search.

use std::f64::consts::E;

use crate::beamforming::{
    end_to_end_sinr, max_min_objective, mrc_mrt_pair, pair_for, rzf_pair, tzf_pair,
};
use crate::error::Result;
use crate::linalg::{dot, norm_sqr, projection_d, row_mul, CVector};
use crate::model::{ChannelRealization, LinkBudget, Scheme, SystemConfig};
use crate::sdr::optimum_transmit;
use crate::specfun::lambert_w0;

/// `(1−α)·log2(1 + sinr)`.
pub fn instantaneous_rate(alpha: f64, sinr: f64) -> f64 {
    (1.0 - alpha) * sinr.ln_1p() / std::f64::consts::LN_2
}

/// Scheme-specific scalars that reduce the rate to a function of `x = α/(1−α)`.
///
/// * Optimum: `SINR = f·min(1 − x b1/(1 + x b2), x b0)`
/// * TZF: `SINR = min(1/a2, x a1)`
/// * RZF: `SINR = min(1/a4, x a3)`
/// * MRC/MRT: `SINR = b3·min(1/(η x b4 + b5), η x)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlphaCoefficients {
    Optimum { b0: f64, b1: f64, b2: f64, f: f64 },
    Tzf { a1: f64, a2: f64 },
    Rzf { a3: f64, a4: f64 },
    MrcMrt { b3: f64, b4: f64, b5: f64, eta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Interior stationary point given by the Lambert-W formula.
    Lambert,
    /// The point where the two hops balance.
    Boundary,
    /// Zero rate for every α; α* = 0 by convention.
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaResult {
    pub alpha_star: f64,
    pub rate_at_star: f64,
    pub branch: Branch,
}

impl AlphaCoefficients {
    /// Coefficients of the optimum scheme for a fixed transmit vector.
    pub fn optimum(ch: &ChannelRealization, cfg: &SystemConfig, w_t: &[num_complex::Complex64]) -> Self {
        let (rho1, rho2) = (cfg.rho1(), cfg.rho2());
        let (pl1, pl2) = (cfg.pl1(), cfg.pl2());
        let s = norm_sqr(&ch.h_sr);
        let u = ch.h_rr.mul_vec(w_t);
        let e = cfg.eta;
        AlphaCoefficients::Optimum {
            b0: rho2 / rho1 * e / pl2 * row_mul(&ch.h_rd, w_t).norm_sqr(),
            b1: e * rho1 / pl1 * dot(&ch.h_sr, &u).norm_sqr(),
            b2: e * rho1 / pl1 * s * norm_sqr(&u),
            f: rho1 * s / pl1,
        }
    }

    pub fn tzf(ch: &ChannelRealization, cfg: &SystemConfig) -> Result<Self> {
        let p = tzf_pair(ch)?;
        let s = norm_sqr(&ch.h_sr);
        Ok(AlphaCoefficients::Tzf {
            a1: cfg.eta * cfg.rho2() * s / (cfg.pl1() * cfg.pl2()) * row_mul(&ch.h_rd, &p.w_t).norm_sqr(),
            a2: cfg.pl1() / (cfg.rho1() * s),
        })
    }

    pub fn rzf(ch: &ChannelRealization, cfg: &SystemConfig) -> Result<Self> {
        rzf_pair(ch)?;
        let s = norm_sqr(&ch.h_sr);
        let dh = projection_d(ch).mul_vec(&ch.h_sr);
        Ok(AlphaCoefficients::Rzf {
            a3: cfg.eta * cfg.rho2() * s / (cfg.pl1() * cfg.pl2()) * norm_sqr(&ch.h_rd),
            a4: cfg.pl1() / (cfg.rho1() * norm_sqr(&dh)),
        })
    }

    pub fn mrc(ch: &ChannelRealization, cfg: &SystemConfig) -> Self {
        let s = norm_sqr(&ch.h_sr);
        let gg = norm_sqr(&ch.h_rd);
        let hg = dot(&ch.h_sr, &ch.h_rr.mul_vec(&crate::linalg::conj(&ch.h_rd))).norm_sqr();
        let k = cfg.rho2() / (cfg.pl1() * cfg.pl2());
        AlphaCoefficients::MrcMrt {
            b3: k * s * gg,
            b4: k * hg,
            b5: cfg.rho2() / cfg.rho1() * gg / cfg.pl2(),
            eta: cfg.eta,
        }
    }

    pub fn for_scheme(scheme: Scheme, ch: &ChannelRealization, cfg: &SystemConfig) -> Result<Self> {
        match scheme {
            Scheme::Tzf => Self::tzf(ch, cfg),
            Scheme::Rzf => Self::rzf(ch, cfg),
            Scheme::MrcMrt => Ok(Self::mrc(ch, cfg)),
            Scheme::Optimum => {
                let w = optimum_transmit(ch, &cfg.link(0.5)?)?.recovered_w_t;
                Ok(Self::optimum(ch, cfg, &w))
            }
        }
    }

    /// End-to-end SINR at time split `alpha`.
    pub fn sinr(&self, alpha: f64) -> f64 {
        let x = alpha / (1.0 - alpha);
        match *self {
            AlphaCoefficients::Optimum { b0, b1, b2, f } => {
                f * (1.0 - x * b1 / (1.0 + x * b2)).min(x * b0)
            }
            AlphaCoefficients::Tzf { a1, a2 } => (1.0 / a2).min(x * a1),
            AlphaCoefficients::Rzf { a3, a4 } => (1.0 / a4).min(x * a3),
            AlphaCoefficients::MrcMrt { b3, b4, b5, eta } => {
                b3 * (1.0 / (eta * x * b4 + b5)).min(eta * x)
            }
        }
    }

    pub fn rate(&self, alpha: f64) -> f64 {
        instantaneous_rate(alpha, self.sinr(alpha))
    }

    /// `f̃ = f·b0` (optimum scheme only).
    pub fn f_tilde(&self) -> Option<f64> {
        match *self {
            AlphaCoefficients::Optimum { b0, f, .. } => Some(f * b0),
            _ => None,
        }
    }

    /// Hop-balance point in `x = α/(1−α)`, or infinity when the hops never cross.
    /// For the optimum scheme this is `α0`; for the others it is `1/α_i`.
    pub fn crossing_x(&self) -> f64 {
        match *self {
            AlphaCoefficients::Optimum { b0, b1, b2, .. } => {
                // b0 b2 x² + (b0 + b1 − b2) x − 1 = 0, positive root in stable form.
                let a = b0 * b2;
                let b = b0 + b1 - b2;
                let den = b + (b * b + 4.0 * a).sqrt();
                if b0 <= 0.0 || !(den > 0.0) {
                    f64::INFINITY
                } else {
                    2.0 / den
                }
            }
            AlphaCoefficients::Tzf { a1, a2 } => 1.0 / (a1 * a2),
            AlphaCoefficients::Rzf { a3, a4 } => 1.0 / (a3 * a4),
            AlphaCoefficients::MrcMrt { b4, b5, eta, .. } => 1.0 / alpha3(b4, b5, eta),
        }
    }

    /// Slope `a` of the second-hop SINR in `x`, i.e. the Lambert coefficient.
    pub fn lambert_coefficient(&self) -> f64 {
        match *self {
            AlphaCoefficients::Optimum { b0, f, .. } => f * b0,
            AlphaCoefficients::Tzf { a1, .. } => a1,
            AlphaCoefficients::Rzf { a3, .. } => a3,
            AlphaCoefficients::MrcMrt { b3, eta, .. } => eta * b3,
        }
    }
}

/// `α3 = 2ηb4/(−b5 + √(b5² + 4b4))`, rationalized to `η(b5 + √(b5² + 4b4))/2`
/// so that `b4 → 0` gives the finite limit `η b5`.
pub fn alpha3(b4: f64, b5: f64, eta: f64) -> f64 {
    0.5 * eta * (b5 + (b5 * b5 + 4.0 * b4).sqrt())
}

/// Maximizer of `(1−α)·log(1 + aα/(1−α))`:
/// `α = (e^{W((a−1)/e)+1} − 1)/(a − 1 + e^{W((a−1)/e)+1})`. Returns `(α, e^{W+1})`.
pub fn lambert_alpha(a: f64) -> (f64, f64) {
    let w = lambert_w0((a - 1.0) / E).unwrap_or(-1.0);
    let ew1 = (w + 1.0).exp();
    ((ew1 - 1.0) / (a - 1.0 + ew1), ew1)
}

fn two_branch(co: &AlphaCoefficients) -> AlphaResult {
    let a = co.lambert_coefficient();
    if !(a > 0.0) || !a.is_finite() {
        return AlphaResult {
            alpha_star: 0.0,
            rate_at_star: 0.0,
            branch: Branch::Degenerate,
        };
    }
    let xc = co.crossing_x();
    let (alpha_l, ew1) = lambert_alpha(a);
    // 1 + a·x_c is the second-hop SNR (plus one) where the hops balance.
    let (alpha, branch) = if !xc.is_finite() || ew1 < a * xc + 1.0 {
        (alpha_l, Branch::Lambert)
    } else {
        (xc / (1.0 + xc), Branch::Boundary)
    };
    AlphaResult {
        alpha_star: alpha,
        rate_at_star: co.rate(alpha),
        branch,
    }
}

/// Optimal α for the optimum scheme with a fixed transmit vector.
pub fn optimal_alpha_optimum(co: &AlphaCoefficients) -> AlphaResult {
    debug_assert!(matches!(co, AlphaCoefficients::Optimum { .. }));
    two_branch(co)
}

pub fn optimal_alpha_tzf(co: &AlphaCoefficients) -> AlphaResult {
    debug_assert!(matches!(co, AlphaCoefficients::Tzf { .. }));
    two_branch(co)
}

pub fn optimal_alpha_rzf(co: &AlphaCoefficients) -> AlphaResult {
    debug_assert!(matches!(co, AlphaCoefficients::Rzf { .. }));
    two_branch(co)
}

pub fn optimal_alpha_mrc(co: &AlphaCoefficients) -> AlphaResult {
    debug_assert!(matches!(co, AlphaCoefficients::MrcMrt { .. }));
    two_branch(co)
}

pub fn optimal_alpha(co: &AlphaCoefficients) -> AlphaResult {
    two_branch(co)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JointMethod {
    LineSearch,
    Alternating,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointResult {
    pub w_t: CVector,
    pub alpha: f64,
    pub rate: f64,
    /// False when the alternating loop hit its iteration cap.
    pub converged: bool,
}

/// Rate of the optimum scheme at `alpha` with the transmit vector re-optimized.
pub fn optimum_rate_at(ch: &ChannelRealization, cfg: &SystemConfig, alpha: f64) -> Result<(f64, CVector)> {
    let link = cfg.link(alpha)?;
    let w = optimum_transmit(ch, &link)?.recovered_w_t;
    Ok((instantaneous_rate(alpha, max_min_objective(&w, ch, &link)), w))
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[a, b]` down to width `tol`.
pub fn golden_max(mut f: impl FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// Joint optimization of the time split and the optimum transmit vector.
pub fn joint_optimum(ch: &ChannelRealization, cfg: &SystemConfig, method: JointMethod) -> Result<JointResult> {
    match method {
        JointMethod::LineSearch => {
            let n = 1000;
            let mut best = (0.0, f64::NEG_INFINITY);
            for k in 1..n {
                let a = k as f64 / n as f64;
                let r = optimum_rate_at(ch, cfg, a)?.0;
                if r > best.1 {
                    best = (a, r);
                }
            }
            let step = 1.0 / n as f64;
            let lo = (best.0 - step).max(1e-9);
            let hi = (best.0 + step).min(1.0 - 1e-9);
            let (a, r) = golden_max(|a| Ok(optimum_rate_at(ch, cfg, a)?.0), lo, hi, 1e-7)?;
            let (alpha, rate) = if r >= best.1 { (a, r) } else { best };
            let (rate_check, w) = optimum_rate_at(ch, cfg, alpha)?;
            Ok(JointResult {
                w_t: w,
                alpha,
                rate: rate.max(rate_check),
                converged: true,
            })
        }
        JointMethod::Alternating => {
            // Start from the maximum-ratio solution's α.
            let mut alpha = optimal_alpha(&AlphaCoefficients::mrc(ch, cfg)).alpha_star;
            if !(alpha > 0.0 && alpha < 1.0) {
                alpha = 0.5;
            }
            let (mut rate, mut w) = optimum_rate_at(ch, cfg, alpha)?;
            let mut best = JointResult {
                w_t: w.clone(),
                alpha,
                rate,
                converged: false,
            };
            for _ in 0..50 {
                let res = optimal_alpha_optimum(&AlphaCoefficients::optimum(ch, cfg, &w));
                if res.branch == Branch::Degenerate {
                    best.converged = true;
                    break;
                }
                alpha = res.alpha_star;
                let (new_rate, new_w) = optimum_rate_at(ch, cfg, alpha)?;
                if new_rate > best.rate {
                    best = JointResult {
                        w_t: new_w.clone(),
                        alpha,
                        rate: new_rate,
                        converged: false,
                    };
                }
                let change = (new_rate - rate).abs();
                rate = new_rate;
                w = new_w;
                if change < 1e-8 * rate.max(1.0) {
                    best.converged = true;
                    break;
                }
            }
            // Block-coordinate ascent can stall at the kink where the two hops
            // balance; finish with a bracketed search on the re-optimized rate.
            let (a, r) = golden_max(
                |a| Ok(optimum_rate_at(ch, cfg, a)?.0),
                0.5 * best.alpha,
                0.5 * (1.0 + best.alpha),
                1e-7 * best.alpha.min(1.0 - best.alpha),
            )?;
            if r > best.rate {
                let (rate, w_t) = optimum_rate_at(ch, cfg, a)?;
                best = JointResult { w_t, alpha: a, rate, ..best };
            }
            Ok(best)
        }
    }
}

/// Optimal α and rate for a scheme on one realization (closed form for the
/// suboptimum schemes, alternating optimization for the optimum one).
pub fn scheme_optimal_alpha(scheme: Scheme, ch: &ChannelRealization, cfg: &SystemConfig) -> Result<AlphaResult> {
    match scheme {
        Scheme::Optimum => {
            let j = joint_optimum(ch, cfg, JointMethod::Alternating)?;
            Ok(AlphaResult {
                alpha_star: j.alpha,
                rate_at_star: j.rate,
                branch: Branch::Lambert,
            })
        }
        _ => Ok(optimal_alpha(&AlphaCoefficients::for_scheme(scheme, ch, cfg)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub alpha: f64,
    /// Fraction of the block energy budget spent in the harvesting phase.
    pub split: f64,
    pub p_e: f64,
    pub p_i: f64,
    pub rate: f64,
}

fn split_rate(
    scheme: Scheme,
    ch: &ChannelRealization,
    cfg: &SystemConfig,
    p_max: f64,
    alpha: f64,
    split: f64,
) -> Result<Option<PowerSplit>> {
    if !(alpha > 0.0 && alpha < 1.0 && split > 0.0 && split < 1.0) {
        return Ok(None);
    }
    let p_e = split * cfg.p_s / alpha;
    let p_i = (1.0 - split) * cfg.p_s / (1.0 - alpha);
    let cap = p_max * (1.0 + 1e-12);
    if p_e > cap || p_i > cap {
        return Ok(None);
    }
    let link = LinkBudget::with_phase_powers(cfg, alpha, p_e, p_i)?;
    let pair = pair_for(scheme, ch, &link)?;
    let sinr = end_to_end_sinr(&pair, ch, &link)?.end_to_end;
    Ok(Some(PowerSplit {
        alpha,
        split,
        p_e,
        p_i,
        rate: instantaneous_rate(alpha, sinr),
    }))
}

/// Two-dimensional search over the time split α and the energy split β.
///
/// The source spends `β·P_S·T` in the harvesting phase and the remainder in
/// the information phase, i.e. `α P_e + (1−α) P_i = P_S` with both phase powers
/// capped at `p_max`. Equal power allocation is the diagonal `β = α`, which is
/// always part of the grid. The best grid point is then refined locally.
pub fn optimize_power_split(
    scheme: Scheme,
    ch: &ChannelRealization,
    cfg: &SystemConfig,
    p_max: f64,
    grid: usize,
) -> Result<PowerSplit> {
    scheme.check_feasible(ch.m_r(), ch.m_t())?;
    let n = grid.max(2);
    let mut best: Option<PowerSplit> = None;
    let consider = |c: Option<PowerSplit>, best: &mut Option<PowerSplit>| {
        if let Some(c) = c {
            if best.is_none_or(|b| c.rate > b.rate) {
                *best = Some(c);
            }
        }
    };
    for i in 1..n {
        let alpha = i as f64 / n as f64;
        consider(split_rate(scheme, ch, cfg, p_max, alpha, alpha)?, &mut best);
        for j in 1..n {
            let split = j as f64 / n as f64;
            consider(split_rate(scheme, ch, cfg, p_max, alpha, split)?, &mut best);
        }
    }
    let mut best = best.expect("equal allocation is always feasible");
    let mut h = 1.0 / n as f64;
    for _ in 0..30 {
        h *= 0.5;
        let centre = best;
        for da in [-1.0, 0.0, 1.0] {
            for db in [-1.0, 0.0, 1.0] {
                let c = split_rate(scheme, ch, cfg, p_max, centre.alpha + da * h, centre.split + db * h)?;
                if let Some(c) = c {
                    if c.rate > best.rate {
                        best = c;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Best equal-power rate on the same α grid used by [`optimize_power_split`].
pub fn equal_power_best(scheme: Scheme, ch: &ChannelRealization, cfg: &SystemConfig, grid: usize) -> Result<(f64, f64)> {
    let n = grid.max(2);
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 1..n {
        let alpha = i as f64 / n as f64;
        let link = cfg.link(alpha)?;
        let sinr = end_to_end_sinr(&pair_for(scheme, ch, &link)?, ch, &link)?.end_to_end;
        let r = instantaneous_rate(alpha, sinr);
        if r > best.1 {
            best = (alpha, r);
        }
    }
    Ok(best)
}

/// Rate of the MRC/MRT pair for a given α (convenience for sweeps).
pub fn mrc_rate(ch: &ChannelRealization, cfg: &SystemConfig, alpha: f64) -> Result<f64> {
    let link = cfg.link(alpha)?;
    Ok(instantaneous_rate(alpha, end_to_end_sinr(&mrc_mrt_pair(ch), ch, &link)?.end_to_end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{f1, f2};
    use crate::model::draw_channel;
    use crate::rng::RngStream;

    fn grid_max(f: impl Fn(f64) -> f64, n: usize) -> f64 {
        (1..n).map(|k| f(k as f64 / n as f64)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn log2p(x: f64) -> f64 {
        (1.0 + x).log2()
    }

    #[test]
    fn lambert_alpha_is_stationary() {
        for &a in &[0.05, 0.7, 1.0, 3.0, 1e3, 1e8] {
            let (al, _) = lambert_alpha(a);
            let g = |t: f64| (1.0 - t) * (1.0 + a * t / (1.0 - t)).ln();
            let h = 1e-6 * al.min(1.0 - al);
            let d = (g(al + h) - g(al - h)) / (2.0 * h);
            assert!(al > 0.0 && al < 1.0);
            assert!(d.abs() < 1e-5 * g(al).max(1e-3), "a={a} d={d}");
        }
    }

    #[test]
    fn closed_forms_beat_grid() {
        let mut rng = RngStream::new(11, 0);
        for _ in 0..300 {
            let u = |r: &mut RngStream| (10f64).powf(6.0 * r.next_f64() - 3.0);
            let (a1, a2) = (u(&mut rng), u(&mut rng));
            let tz = optimal_alpha(&AlphaCoefficients::Tzf { a1, a2 });
            let oracle = grid_max(|t| (1.0 - t) * log2p((1.0 / a2).min(t / (1.0 - t) * a1)), 10_000);
            assert!(tz.rate_at_star >= oracle - 1e-6, "{tz:?} {oracle}");

            let (b3, b4, b5, eta) = (u(&mut rng), u(&mut rng), u(&mut rng), 0.3 + 0.6 * rng.next_f64());
            let m = optimal_alpha(&AlphaCoefficients::MrcMrt { b3, b4, b5, eta });
            let oracle = grid_max(
                |t| {
                    let x = t / (1.0 - t);
                    (1.0 - t) * log2p(b3 * (1.0 / (eta * x * b4 + b5)).min(eta * x))
                },
                10_000,
            );
            assert!(m.rate_at_star >= oracle - 1e-6, "{m:?} {oracle}");

            let b2 = u(&mut rng);
            let b1 = b2 * rng.next_f64();
            let (b0, f) = (u(&mut rng), u(&mut rng));
            let o = optimal_alpha(&AlphaCoefficients::Optimum { b0, b1, b2, f });
            let oracle = grid_max(
                |t| {
                    let x = t / (1.0 - t);
                    (1.0 - t) * log2p(f * (1.0 - x * b1 / (1.0 + x * b2)).min(x * b0))
                },
                10_000,
            );
            assert!(o.rate_at_star >= oracle - 1e-6, "{o:?} {oracle}");
        }
    }

    #[test]
    fn mrc_without_loop_coupling_matches_tzf_form() {
        let (b3, b5, eta) = (40.0, 2.0, 0.5);
        let m = optimal_alpha(&AlphaCoefficients::MrcMrt { b3, b4: 0.0, b5, eta });
        let t = optimal_alpha(&AlphaCoefficients::Tzf { a1: eta * b3, a2: b5 / b3 });
        assert!((m.alpha_star - t.alpha_star).abs() < 1e-12);
        assert!((alpha3(0.0, b5, eta) - eta * b5).abs() < 1e-15);
    }

    #[test]
    fn degenerate_channel_gives_zero() {
        let r = optimal_alpha(&AlphaCoefficients::Tzf { a1: 0.0, a2: 1.0 });
        assert_eq!(r.branch, Branch::Degenerate);
        assert_eq!(r.alpha_star, 0.0);
    }

    #[test]
    fn coefficients_reproduce_beamformer_sinr() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(5, 0);
        for _ in 0..20 {
            let ch = draw_channel(&cfg, &mut rng);
            for &alpha in &[0.2, 0.5, 0.8] {
                let link = cfg.link(alpha).unwrap();
                for scheme in [Scheme::Tzf, Scheme::Rzf, Scheme::MrcMrt] {
                    let co = AlphaCoefficients::for_scheme(scheme, &ch, &cfg).unwrap();
                    let direct = end_to_end_sinr(&pair_for(scheme, &ch, &link).unwrap(), &ch, &link)
                        .unwrap()
                        .end_to_end;
                    assert!((co.sinr(alpha) - direct).abs() <= 1e-9 * direct, "{scheme} {alpha}");
                }
                let w = crate::beamforming::w_mrt(&ch);
                let co = AlphaCoefficients::optimum(&ch, &cfg, &w);
                let direct = f1(&w, &ch, &link).min(f2(&w, &ch, &link));
                assert!((co.sinr(alpha) - direct).abs() <= 1e-9 * direct);
            }
        }
    }

    #[test]
    fn alternating_close_to_line_search() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(8, 0);
        for _ in 0..3 {
            let ch = draw_channel(&cfg, &mut rng);
            let ls = joint_optimum(&ch, &cfg, JointMethod::LineSearch).unwrap();
            let alt = joint_optimum(&ch, &cfg, JointMethod::Alternating).unwrap();
            assert!(alt.rate >= ls.rate * (1.0 - 1e-3), "{} {}", alt.rate, ls.rate);
            assert!(ls.rate >= alt.rate * (1.0 - 1e-6));
        }
    }

    #[test]
    fn power_split_dominates_equal_allocation() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(9, 0);
        let ch = draw_channel(&cfg, &mut rng);
        for scheme in [Scheme::Tzf, Scheme::MrcMrt] {
            let opa = optimize_power_split(scheme, &ch, &cfg, 10.0 * cfg.p_s, 40).unwrap();
            let epa = equal_power_best(scheme, &ch, &cfg, 40).unwrap();
            assert!(opa.rate >= epa.1 * (1.0 - 1e-9));
            let same = optimize_power_split(scheme, &ch, &cfg, cfg.p_s, 40).unwrap();
            assert!((same.p_e - cfg.p_s).abs() < 1e-12 && (same.p_i - cfg.p_s).abs() < 1e-12);
        }
    }
}

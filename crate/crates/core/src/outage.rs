//! Outage probability of the suboptimum schemes: exact CDFs by quadrature,
//! high-SNR approximations, the MRC/MRT floor, and delay-constrained throughput.

use crate::error::{Error, Result};
use crate::model::{Scheme, SystemConfig};
use crate::quad::{integrate_log, Tolerance};
use crate::specfun::{
    bessel_k, digamma_int, expint_en, gamma_lower_reg, gamma_upper_reg, ln_gamma,
    BetaGammaProduct,
};

#[derive(Debug, Clone, PartialEq)]
pub struct OutageQuery {
    pub scheme: Scheme,
    pub cfg: SystemConfig,
    pub alpha: f64,
    /// SINR threshold `2^{R_c} − 1` unless overridden.
    pub gamma_th: f64,
}

impl OutageQuery {
    pub fn new(scheme: Scheme, cfg: SystemConfig, alpha: f64) -> Self {
        Self {
            scheme,
            gamma_th: cfg.gamma_th(),
            cfg,
            alpha,
        }
    }

    pub fn with_gamma_th(mut self, gamma_th: f64) -> Self {
        self.gamma_th = gamma_th;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Exact,
    Asymptotic,
    MonteCarlo,
}

/// Derived scalars shared by all the formulas.
#[derive(Debug, Clone, Copy)]
struct Params {
    m_r: usize,
    m_t: usize,
    z: f64,
    /// `d1^τ z/ρ1`
    l: f64,
    /// `d1^τ d2^τ z/(κρ2)`
    cz: f64,
    /// `cz/l = ρ1 d2^τ/(κρ2)`
    r: f64,
    /// `κ σ_RR²`
    k_li: f64,
    /// `ρ1/d1^τ`, `κρ1σ_RR²/d1^τ`, `κρ2/(d1^τ d2^τ)`
    c1: f64,
    c2: f64,
    c3: f64,
}

/// Outcome of the trivial-range checks: `Some(p)` when the answer is known.
fn params(q: &OutageQuery) -> Result<(Params, Option<f64>)> {
    q.cfg.validate()?;
    if !(q.gamma_th >= 0.0) {
        return Err(Error::Domain(format!("gamma_th = {}", q.gamma_th)));
    }
    let link = q.cfg.link(q.alpha)?;
    let z = q.gamma_th;
    let p = Params {
        m_r: q.cfg.m_r,
        m_t: q.cfg.m_t,
        z,
        l: link.pl1 * z / link.rho1,
        cz: link.pl1 * link.pl2 * z / (link.kappa * link.rho2),
        r: link.pl2 * link.rho1 / (link.kappa * link.rho2),
        k_li: link.kappa * q.cfg.sigma2_rr,
        c1: link.rho1 / link.pl1,
        c2: link.kappa * link.rho1 * q.cfg.sigma2_rr / link.pl1,
        c3: link.kappa * link.rho2 / (link.pl1 * link.pl2),
    };
    let known = if z == 0.0 {
        Some(0.0)
    } else if z.is_infinite() || link.kappa == 0.0 {
        Some(1.0)
    } else {
        None
    };
    Ok((p, known))
}

fn tol() -> Tolerance {
    Tolerance {
        abs: 1e-300,
        rel: 1e-11,
        max_intervals: 4000,
    }
}

/// `x^{m−1} e^{−x}/Γ(m)`
fn gamma_pdf(m: usize, x: f64) -> f64 {
    let m = m as f64;
    ((m - 1.0) * x.ln() - x - ln_gamma(m)).exp()
}

/// Upper integration limit beyond which `e^{−x}` tails are negligible.
fn upper(l: f64, m_r: usize) -> f64 {
    l + 50.0 + 10.0 * m_r as f64
}

fn p_reg(a: f64, x: f64) -> f64 {
    gamma_lower_reg(a, x).unwrap_or(f64::NAN)
}

fn q_reg(a: f64, x: f64) -> f64 {
    gamma_upper_reg(a, x).unwrap_or(f64::NAN)
}

fn check(scheme: Scheme, cfg: &SystemConfig, wanted: Scheme) -> Result<()> {
    if scheme != wanted {
        return Err(Error::Domain(format!(
            "query is for {scheme}, formula is for {wanted}"
        )));
    }
    wanted.check_feasible(cfg.m_r, cfg.m_t)
}

/// `P(M_R, L) + (1/Γ(M_R)) ∫_L^∞ P(M_T−1, cz/x) x^{M_R−1} e^{−x} dx`.
pub fn outage_tzf_exact(q: &OutageQuery) -> Result<f64> {
    check(q.scheme, &q.cfg, Scheme::Tzf)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let a = (p.m_t - 1) as f64;
    let head = p_reg(p.m_r as f64, p.l);
    let tail = integrate_log(
        |x| p_reg(a, p.cz / x) * gamma_pdf(p.m_r, x),
        p.l,
        upper(p.l, p.m_r),
        tol(),
    );
    Ok((head + tail.value).clamp(0.0, 1.0))
}

/// High-SNR approximation; diversity `min(M_R, M_T − 1)`.
pub fn outage_tzf_asymptotic(q: &OutageQuery) -> Result<f64> {
    check(q.scheme, &q.cfg, Scheme::Tzf)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let (m, n) = (p.m_r, p.m_t);
    let mf = m as f64;
    let v = if n < m + 1 {
        // Second hop dominates.
        let a = (n - 1) as f64;
        (ln_gamma(mf - a) - ln_gamma(n as f64) - ln_gamma(mf)).exp() * p.cz.powf(a)
    } else if n == m + 1 {
        let inner = (-(p.l.ln()) + digamma_int(1)) * p.r.powi(m as i32) / (ln_gamma(mf)).exp();
        (1.0 + inner) * p.l.powi(m as i32) / ln_gamma(mf + 1.0).exp()
    } else {
        // Resummed series: L^M [1/Γ(M+1) + (r^M γ(a−M, r) − γ(a, r))/(M Γ(a) Γ(M))].
        let a = (n - 1) as f64;
        let low = |s: f64| p_reg(s, p.r) * ln_gamma(s).exp();
        let bracket = 1.0 / ln_gamma(mf + 1.0).exp()
            + (p.r.powi(m as i32) * low(a - mf) - low(a))
                / (mf * ln_gamma(a).exp() * ln_gamma(mf).exp());
        bracket * p.l.powi(m as i32)
    };
    Ok(v.clamp(0.0, 1.0))
}

/// Exact RZF outage: with `‖D h_SR‖² ~ Γ(M_R−1)` and an independent unit
/// exponential completing `‖h_SR‖²`,
/// `P(M_R, L) + (1/Γ(M_R))[∫ P(M_T, cz/x) x^{M_R−1}e^{−x} + L^{M_R−1} ∫ Q(M_T, cz/x) e^{−x}]`.
pub fn outage_rzf_exact(q: &OutageQuery) -> Result<f64> {
    check(q.scheme, &q.cfg, Scheme::Rzf)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let n = p.m_t as f64;
    let u = upper(p.l, p.m_r);
    let head = p_reg(p.m_r as f64, p.l);
    let t1 = integrate_log(|x| p_reg(n, p.cz / x) * gamma_pdf(p.m_r, x), p.l, u, tol());
    let lm = (p.l.ln() * (p.m_r - 1) as f64 - ln_gamma(p.m_r as f64)).exp();
    let t2 = integrate_log(|x| q_reg(n, p.cz / x) * (-x).exp(), p.l, u, tol());
    Ok((head + t1.value + lm * t2.value).clamp(0.0, 1.0))
}

/// High-SNR approximation; diversity `min(M_R − 1, M_T)`.
pub fn outage_rzf_asymptotic(q: &OutageQuery) -> Result<f64> {
    check(q.scheme, &q.cfg, Scheme::Rzf)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let (m, n) = (p.m_r, p.m_t);
    let mf = m as f64;
    let g_m = ln_gamma(mf).exp();
    let v = if m < n + 1 {
        p.l.powi(m as i32 - 1) / g_m
    } else if m == n + 1 {
        (1.0 + p.r.powi(n as i32) / ln_gamma(n as f64 + 1.0).exp()) * p.l.powi(n as i32) / g_m
    } else {
        let nf = n as f64;
        (ln_gamma(mf - nf) - ln_gamma(mf) - ln_gamma(nf + 1.0)).exp() * p.cz.powi(n as i32)
    };
    Ok(v.clamp(0.0, 1.0))
}

fn mrc_case(q: &OutageQuery, case: u8) -> Result<()> {
    check(q.scheme, &q.cfg, Scheme::MrcMrt)?;
    let ok = match case {
        1 => q.cfg.m_t == 1 && q.cfg.m_r >= 2,
        _ => q.cfg.m_r == 1,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "MRC/MRT case {case} formula does not apply to M_R = {}, M_T = {}",
            q.cfg.m_r, q.cfg.m_t
        )))
    }
}

/// Exact MRC/MRT outage for `M_T = 1`, `M_R ≥ 2`.
pub fn outage_mrc_case1_exact(q: &OutageQuery) -> Result<f64> {
    mrc_case(q, 1)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let x2 = BetaGammaProduct::new(p.m_r as u32)?;
    let head = p_reg(p.m_r as f64, p.l);
    // Outage given ‖h_SR‖² = y > L: 1 − F_X2(u)·e^{−z/(c3 y)}, written without cancellation.
    let tail = integrate_log(
        |y| {
            let u = if p.c2 > 0.0 {
                (p.c1 / p.z - 1.0 / y) / p.c2
            } else {
                f64::INFINITY
            };
            let (cdf, sf) = if u.is_infinite() {
                (1.0, 0.0)
            } else {
                (x2.cdf(u).value, x2.sf(u).value)
            };
            (sf + cdf * -(-p.z / (p.c3 * y)).exp_m1()) * gamma_pdf(p.m_r, y)
        },
        p.l,
        upper(p.l, p.m_r),
        tol(),
    );
    Ok((head + tail.value).clamp(0.0, 1.0))
}

/// Second-hop success `P(‖h_SR‖²|h_RD|² > cz) = (2/Γ(M_R)) w^{M_R/2} K_{M_R}(2√w)`.
fn product_sf(m: usize, w: f64) -> Result<f64> {
    if w == 0.0 {
        return Ok(1.0);
    }
    let mf = m as f64;
    let k = bessel_k(m as u32, 2.0 * w.sqrt())?;
    Ok((2.0_f64.ln() + 0.5 * mf * w.ln() - ln_gamma(mf)).exp() * k)
}

/// High-SNR MRC/MRT outage for `M_T = 1` (first-hop noise neglected).
pub fn outage_mrc_case1_asymptotic(q: &OutageQuery) -> Result<f64> {
    mrc_case(q, 1)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let first = li_success(p.m_r, p.k_li, p.z)?;
    Ok((1.0 - first * product_sf(p.m_r, p.cz)?).clamp(0.0, 1.0))
}

/// `F_X2(1/(κσ_RR² z))`: probability that loop interference alone does not cause outage.
fn li_success(m_r: usize, k_li: f64, z: f64) -> Result<f64> {
    if k_li == 0.0 {
        return Ok(1.0);
    }
    let t = 1.0 / (k_li * z);
    if m_r >= 2 {
        Ok(BetaGammaProduct::new(m_r as u32)?.cdf(t).value)
    } else {
        Ok(-(-t).exp_m1())
    }
}

/// SNR-independent outage floor of MRC/MRT with `M_T = 1`: `1 − F_X2(1/(κσ_RR² z))`.
pub fn outage_mrc_floor(q: &OutageQuery) -> Result<f64> {
    mrc_case(q, 1)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    Ok((1.0 - li_success(p.m_r, p.k_li, p.z)?).clamp(0.0, 1.0))
}

/// Exact MRC/MRT outage for `M_R = 1`:
/// `1 − e^{−L} + ∫_L^∞ (A + B − AB) e^{−x} dx`, with `A = e^{−(c1x/z − 1)/(c2x)}`
/// the loop-interference outage and `B = P(M_T, z/(c3 x))` the second-hop outage.
pub fn outage_mrc_case2_exact(q: &OutageQuery) -> Result<f64> {
    mrc_case(q, 2)?;
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let n = p.m_t as f64;
    let head = -(-p.l).exp_m1();
    let tail = integrate_log(
        |x| {
            let a = if p.c2 > 0.0 {
                (-(p.c1 * x / p.z - 1.0) / (p.c2 * x)).exp()
            } else {
                0.0
            };
            let b = p_reg(n, p.z / (p.c3 * x));
            (a + b - a * b) * (-x).exp()
        },
        p.l,
        upper(p.l, 1),
        tol(),
    );
    Ok((head + tail.value).clamp(0.0, 1.0))
}

/// High-SNR MRC/MRT outage for `M_R = 1`, series truncated after `k_max`
/// (`k_max = 0` is the compact single-term form).
pub fn outage_mrc_case2_asymptotic(q: &OutageQuery, k_max: usize) -> Result<f64> {
    mrc_case(q, 2)?;
    if k_max > 10 {
        return Err(Error::Domain(format!("k_max = {k_max} > 10")));
    }
    let (p, known) = params(q)?;
    if let Some(v) = known {
        return Ok(v);
    }
    let n = p.m_t;
    let mut sum = 0.0;
    let mut fact = 1.0;
    for k in 0..=k_max {
        if k > 0 {
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let e = expint_en((n + k) as u32, p.l)?;
        sum += sign / (fact * (n + k) as f64) * p.r.powi((n + k) as i32) * e;
    }
    let hop2 = (-p.l).exp() - p.l * sum / ln_gamma(n as f64).exp();
    let first = -(-1.0 / (p.k_li * p.z)).exp_m1();
    let first = if p.k_li == 0.0 { 1.0 } else { first };
    Ok((1.0 - first * hop2).clamp(0.0, 1.0))
}

/// Exact outage for whichever closed form covers the query.
pub fn outage_exact(q: &OutageQuery) -> Result<f64> {
    match q.scheme {
        Scheme::Tzf => outage_tzf_exact(q),
        Scheme::Rzf => outage_rzf_exact(q),
        Scheme::MrcMrt if q.cfg.m_t == 1 && q.cfg.m_r >= 2 => outage_mrc_case1_exact(q),
        Scheme::MrcMrt if q.cfg.m_r == 1 => outage_mrc_case2_exact(q),
        s => Err(Error::Domain(format!(
            "no closed-form outage for {s} with M_R = {}, M_T = {}",
            q.cfg.m_r, q.cfg.m_t
        ))),
    }
}

/// Whether [`outage_exact`] covers this scheme and antenna configuration.
pub fn has_exact(scheme: Scheme, cfg: &SystemConfig) -> bool {
    match scheme {
        Scheme::Tzf => cfg.m_t > 1,
        Scheme::Rzf => cfg.m_r > 1,
        Scheme::MrcMrt => cfg.m_t == 1 || cfg.m_r == 1,
        Scheme::Optimum => false,
    }
}

/// High-SNR approximation for whichever formula covers the query.
pub fn outage_asymptotic(q: &OutageQuery) -> Result<f64> {
    match q.scheme {
        Scheme::Tzf => outage_tzf_asymptotic(q),
        Scheme::Rzf => outage_rzf_asymptotic(q),
        Scheme::MrcMrt if q.cfg.m_t == 1 && q.cfg.m_r >= 2 => outage_mrc_case1_asymptotic(q),
        Scheme::MrcMrt if q.cfg.m_r == 1 => outage_mrc_case2_asymptotic(q, 10),
        s => Err(Error::Domain(format!(
            "no high-SNR outage formula for {s} with M_R = {}, M_T = {}",
            q.cfg.m_r, q.cfg.m_t
        ))),
    }
}

/// `(1 − p_out)·R_c·(1 − α)`.
pub fn delay_throughput(alpha: f64, r_c: f64, p_out: f64) -> f64 {
    (1.0 - p_out) * r_c * (1.0 - alpha)
}

/// Maximizes `f` over `α ∈ (0, 1)`: grid step 0.01, then golden section to 1e−5
/// around the best grid point. Ties go to the lowest α.
pub fn maximize_over_alpha(mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut best = (0.0, f64::NEG_INFINITY);
    for k in 1..100 {
        let a = k as f64 / 100.0;
        let v = f(a)?;
        if v > best.1 {
            best = (a, v);
        }
    }
    let lo = (best.0 - 0.01).max(1e-6);
    let hi = (best.0 + 0.01).min(1.0 - 1e-6);
    let (a, v) = crate::alpha::golden_max(&mut f, lo, hi, 1e-5)?;
    Ok(if v > best.1 { (a, v) } else { best })
}

/// α maximizing the analytic delay-constrained throughput.
pub fn optimal_alpha_delay(scheme: Scheme, cfg: &SystemConfig) -> Result<(f64, f64)> {
    if !has_exact(scheme, cfg) {
        return Err(Error::Domain(format!(
            "no closed-form outage for {scheme}; use the Monte Carlo variant"
        )));
    }
    maximize_over_alpha(|a| {
        let p = outage_exact(&OutageQuery::new(scheme, cfg.clone(), a))?;
        Ok(delay_throughput(a, cfg.r_c, p))
    })
}

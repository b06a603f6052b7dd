//! Receive/transmit beamformer construction for the four relay schemes and the
//! end-to-end SINR they produce.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, backward_subst_adjoint, cholesky, conj, dot, forward_subst, hermitian_eig, norm_sqr,
    normalized, phase_normalize, projection_b, projection_d, row_mul, CMatrix, CVector,
};
use crate::model::{ChannelRealization, LinkBudget, Scheme};

#[derive(Debug, Clone, PartialEq)]
pub struct BeamformerPair {
    pub w_r: CVector,
    pub w_t: CVector,
    pub scheme: Scheme,
    /// Set when a zero channel forced the `e_1` convention.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrBreakdown {
    pub first_hop: f64,
    pub second_hop: f64,
    pub end_to_end: f64,
}

impl SinrBreakdown {
    fn new(first_hop: f64, second_hop: f64) -> Self {
        Self {
            first_hop,
            second_hop,
            end_to_end: first_hop.min(second_hop),
        }
    }
}

/// Unit vector along `v` with canonical phase, or `e_1` when `v` vanishes.
fn unit_or_e1(v: &[Complex64]) -> (CVector, bool) {
    match normalized(v) {
        Some(mut u) => {
            phase_normalize(&mut u);
            (u, false)
        }
        None => (linalg::basis(v.len(), 0), true),
    }
}

/// End-to-end SINR of a beamformer pair, evaluated term by term.
pub fn end_to_end_sinr(
    pair: &BeamformerPair,
    ch: &ChannelRealization,
    link: &LinkBudget,
) -> Result<SinrBreakdown> {
    if pair.w_r.len() != ch.m_r() || pair.w_t.len() != ch.m_t() {
        return Err(Error::Dimension(format!(
            "pair is ({}, {}) for a {}x{} channel",
            pair.w_r.len(),
            pair.w_t.len(),
            ch.m_r(),
            ch.m_t()
        )));
    }
    let signal = dot(&pair.w_r, &ch.h_sr).norm_sqr();
    let leak = dot(&pair.w_r, &ch.h_rr.mul_vec(&pair.w_t)).norm_sqr();
    let first = link.rho1 / link.pl1 * signal / (link.li_gain(ch) * leak + 1.0);
    let second = link.hop2_gain(ch) * row_mul(&ch.h_rd, &pair.w_t).norm_sqr();
    Ok(SinrBreakdown::new(first, second))
}

/// Best receive combiner for a given transmit vector: `(k·H w w†H† + I)^{−1} h_SR`,
/// applied through the Sherman-Morrison identity.
pub fn optimum_receive(w_t: &[Complex64], ch: &ChannelRealization, link: &LinkBudget) -> CVector {
    let k1 = link.li_gain(ch);
    let u = ch.h_rr.mul_vec(w_t);
    let uu = norm_sqr(&u);
    let w: CVector = if k1 > 0.0 && uu > linalg::DEGENERATE_NORM_SQR {
        // Split h into parts along and orthogonal to u; only the former is shrunk.
        let c = dot(&u, &ch.h_sr) / uu;
        let shrink = 1.0 / (1.0 + k1 * uu);
        ch.h_sr
            .iter()
            .zip(&u)
            .map(|(h, ui)| (h - ui * c) + ui * c * shrink)
            .collect()
    } else {
        ch.h_sr.clone()
    };
    unit_or_e1(&w).0
}

/// First-hop SINR with the optimum combiner, as a function of the transmit vector.
pub fn f1(w_t: &[Complex64], ch: &ChannelRealization, link: &LinkBudget) -> f64 {
    let s = norm_sqr(&ch.h_sr);
    let k1 = link.li_gain(ch);
    let u = ch.h_rr.mul_vec(w_t);
    let uu = norm_sqr(&u);
    // S‖u‖² − |h†u|² = S‖u_⊥‖² with u_⊥ the part of u orthogonal to h.
    let perp = if s > 0.0 {
        let c = dot(&ch.h_sr, &u) / s;
        u.iter()
            .zip(&ch.h_sr)
            .map(|(ui, h)| (ui - h * c).norm_sqr())
            .sum::<f64>()
    } else {
        0.0
    };
    link.rho1 / link.pl1 * s * (1.0 + k1 * perp) / (1.0 + k1 * uu)
}

/// Second-hop SNR `(κρ2/(d1^τ d2^τ))‖h_SR‖²|h_RD w_t|²`.
pub fn f2(w_t: &[Complex64], ch: &ChannelRealization, link: &LinkBudget) -> f64 {
    link.hop2_gain(ch) * row_mul(&ch.h_rd, w_t).norm_sqr()
}

/// `min(f1, f2)`: the end-to-end SINR achieved by `w_t` with its best combiner.
pub fn max_min_objective(w_t: &[Complex64], ch: &ChannelRealization, link: &LinkBudget) -> f64 {
    f1(w_t, ch, link).min(f2(w_t, ch, link))
}

/// Maximum-ratio transmit vector `h_RD†/‖h_RD‖`.
pub fn w_mrt(ch: &ChannelRealization) -> CVector {
    unit_or_e1(&conj(&ch.h_rd)).0
}

/// Transmit vector maximizing `f1`: the generalized minimum eigenvector of
/// `(H†h h†H, I + k H†H)`. The minimum eigenvalue is usually repeated, in which
/// case the vector of that eigenspace with the largest `f2` is returned.
pub fn w_min_sinr(ch: &ChannelRealization, link: &LinkBudget) -> CVector {
    let m_t = ch.m_t();
    if m_t == 1 {
        return vec![Complex64::new(1.0, 0.0)];
    }
    let k1 = link.li_gain(ch);
    let gram = ch.h_rr.adjoint().matmul(&ch.h_rr);
    let r = CMatrix::identity(m_t).add(&gram.scale(k1));
    let v = ch.h_rr.adjoint_mul_vec(&ch.h_sr);
    let l = match cholesky(&r) {
        Ok(l) => l,
        Err(_) => return w_mrt(ch),
    };
    // C = L^{-1} v v† L^{-†}
    let y = forward_subst(&l, &v);
    let c = CMatrix::outer(&y, &y);
    let eig = match hermitian_eig(&c) {
        Ok(e) => e,
        Err(_) => return w_mrt(ch),
    };
    let lmax = eig.values[m_t - 1].abs().max(f64::MIN_POSITIVE);
    let lmin = eig.values[0];
    let tol = 1e-10 * lmax;
    let mut span: Vec<CVector> = Vec::new();
    for k in 0..m_t {
        if eig.values[k] > lmin + tol {
            break;
        }
        let mut w = backward_subst_adjoint(&l, &eig.vector(k));
        for b in &span {
            let p = dot(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= bi * p;
            }
        }
        if let Some(u) = normalized(&w) {
            span.push(u);
        }
    }
    let g = conj(&ch.h_rd);
    let mut proj = vec![Complex64::new(0.0, 0.0); m_t];
    for b in &span {
        let p = dot(b, &g);
        for (pi, bi) in proj.iter_mut().zip(b) {
            *pi += bi * p;
        }
    }
    let pick = match normalized(&proj) {
        Some(p) if norm_sqr(&proj) > 1e-24 * norm_sqr(&g) => p,
        _ => span
            .first()
            .cloned()
            .unwrap_or_else(|| linalg::basis(m_t, 0)),
    };
    let mut w = pick;
    phase_normalize(&mut w);
    w
}

/// Maximum-ratio combining and transmission.
pub fn mrc_mrt_pair(ch: &ChannelRealization) -> BeamformerPair {
    let (w_r, d1) = unit_or_e1(&ch.h_sr);
    let (w_t, d2) = unit_or_e1(&conj(&ch.h_rd));
    BeamformerPair {
        w_r,
        w_t,
        scheme: Scheme::MrcMrt,
        degenerate: d1 || d2,
    }
}

/// MRC receive with a transmit vector that nulls the loop interference.
pub fn tzf_pair(ch: &ChannelRealization) -> Result<BeamformerPair> {
    Scheme::Tzf.check_feasible(ch.m_r(), ch.m_t())?;
    let (w_r, d1) = unit_or_e1(&ch.h_sr);
    let b = projection_b(ch);
    let (w_t, d2) = unit_or_e1(&b.mul_vec(&conj(&ch.h_rd)));
    let w_t = if d2 { null_direction(&b) } else { w_t };
    Ok(BeamformerPair {
        w_r,
        w_t,
        scheme: Scheme::Tzf,
        degenerate: d1 || d2,
    })
}

/// MRT transmit with a receive combiner that nulls the loop interference.
pub fn rzf_pair(ch: &ChannelRealization) -> Result<BeamformerPair> {
    Scheme::Rzf.check_feasible(ch.m_r(), ch.m_t())?;
    let (w_t, d1) = unit_or_e1(&conj(&ch.h_rd));
    let d = projection_d(ch);
    let (w_r, d2) = unit_or_e1(&d.mul_vec(&ch.h_sr));
    let w_r = if d2 { null_direction(&d) } else { w_r };
    Ok(BeamformerPair {
        w_r,
        w_t,
        scheme: Scheme::Rzf,
        degenerate: d1 || d2,
    })
}

/// Some unit vector in the range of a projector (its best-conditioned column).
fn null_direction(p: &CMatrix) -> CVector {
    let n = p.cols();
    let best = (0..n)
        .max_by(|&i, &j| norm_sqr(&p.column(i)).total_cmp(&norm_sqr(&p.column(j))))
        .unwrap_or(0);
    unit_or_e1(&p.column(best)).0
}

/// The optimum pair: optimum transmit vector plus its matched combiner.
pub fn optimum_pair(ch: &ChannelRealization, link: &LinkBudget) -> Result<BeamformerPair> {
    let sol = crate::sdr::optimum_transmit(ch, link)?;
    let w_r = optimum_receive(&sol.recovered_w_t, ch, link);
    let degenerate = norm_sqr(&ch.h_sr) == 0.0 || norm_sqr(&ch.h_rd) == 0.0;
    Ok(BeamformerPair {
        w_r,
        w_t: sol.recovered_w_t,
        scheme: Scheme::Optimum,
        degenerate,
    })
}

pub fn pair_for(scheme: Scheme, ch: &ChannelRealization, link: &LinkBudget) -> Result<BeamformerPair> {
    match scheme {
        Scheme::Optimum => optimum_pair(ch, link),
        Scheme::Tzf => tzf_pair(ch),
        Scheme::Rzf => rzf_pair(ch),
        Scheme::MrcMrt => Ok(mrc_mrt_pair(ch)),
    }
}

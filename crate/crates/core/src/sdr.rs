//! Optimum transmit beamformer: closed-form cases, a semidefinite feasibility
//! test solved by a log-barrier method, bisection on the target SINR, and
//! rank-one recovery.

use num_complex::Complex64;

use crate::beamforming::{f1, f2, max_min_objective, w_mrt, w_min_sinr};
use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, conj, hermitian_eig, inverse_hermitian_pd, norm_sqr, phase_normalize, CMatrix,
    CVector,
};
use crate::model::{ChannelRealization, LinkBudget};

/// Feasibility is declared when the best normalized constraint slack reaches this.
pub const FEASIBILITY_MARGIN: f64 = -1e-8;
const BISECTION_MAX_ITER: usize = 60;
const BISECTION_REL_WIDTH: f64 = 1e-6;

/// Channel-derived data of the max-min problem for one realization and link.
#[derive(Debug, Clone)]
pub struct SdrProblem {
    /// `H†h h†H`
    pub a: CMatrix,
    /// `I + k1 H†H`
    pub r: CMatrix,
    /// `h_RD† h_RD`
    pub g: CMatrix,
    /// `ρ1/d1^τ`
    pub c1: f64,
    /// `‖h_SR‖²`
    pub s: f64,
    /// `(κρ1/d1^τ)‖h_SR‖²`
    pub k1: f64,
    /// `(κρ2/(d1^τ d2^τ))‖h_SR‖²`
    pub c3: f64,
    /// `‖h_RD‖²`
    pub g_norm_sqr: f64,
}

impl SdrProblem {
    pub fn new(ch: &ChannelRealization, link: &LinkBudget) -> Self {
        let m_t = ch.m_t();
        let v = ch.h_rr.adjoint_mul_vec(&ch.h_sr);
        let gram = ch.h_rr.adjoint().matmul(&ch.h_rr);
        let k1 = link.li_gain(ch);
        let gd = conj(&ch.h_rd);
        Self {
            a: CMatrix::outer(&v, &v),
            r: CMatrix::identity(m_t).add(&gram.scale(k1)),
            g: CMatrix::outer(&gd, &gd),
            c1: link.rho1 / link.pl1,
            s: norm_sqr(&ch.h_sr),
            k1,
            c3: link.hop2_gain(ch),
            g_norm_sqr: norm_sqr(&ch.h_rd),
        }
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    /// Upper bound on the achievable max-min SINR.
    pub fn t_upper_bound(&self) -> f64 {
        (self.c1 * self.s).min(self.c3 * self.g_norm_sqr)
    }

    /// `R^{−1/2}`.
    pub fn whitening(&self) -> CMatrix {
        let n = self.dim();
        let eig = hermitian_eig(&self.r).expect("R is Hermitian");
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            let v = eig.vector(k);
            out = out.add(&CMatrix::outer(&v, &v).scale(1.0 / eig.values[k].max(1.0).sqrt()));
        }
        out
    }

    /// `(C1, C2)` with the constraints reading `tr(W C_i) ≥ 0` at target `t`.
    pub fn constraint_matrices(&self, t: f64) -> (CMatrix, CMatrix) {
        let n = self.dim();
        let c1m = self.r.lin_comb(self.c1 * self.s - t, &self.a, -self.c1 * self.k1);
        let c2m = self.g.lin_comb(self.c3, &CMatrix::identity(n), -t);
        (c1m, c2m)
    }

    /// `(f1, f2)` of the relaxed problem evaluated at a matrix `W`.
    pub fn objectives(&self, w: &CMatrix) -> (f64, f64) {
        let y = w.trace_product_re(&self.r);
        let f1v = self.c1 * (self.s - self.k1 * w.trace_product_re(&self.a) / y);
        let f2v = self.c3 * w.trace_product_re(&self.g);
        (f1v, f2v)
    }
}

/// Upper bound on the max-min SINR: `min(ρ1‖h_SR‖²/d1^τ, (κρ2/(d1^τ d2^τ))‖h_SR‖²‖h_RD‖²)`.
pub fn t_upper_bound(prob: &SdrProblem) -> f64 {
    prob.t_upper_bound()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankFlag {
    RankOne,
    RecoveredFromHigherRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransmitCase {
    /// Single transmit antenna: nothing to optimize.
    Trivial,
    /// The first hop limits even at its own maximizer.
    MinSinr,
    /// The second hop limits even at maximum-ratio transmission.
    Mrt,
    /// Neither closed form applies; solved by bisection over the relaxation.
    Relaxation,
}

#[derive(Debug, Clone)]
pub struct SdrSolution {
    /// Hermitian PSD, unit trace.
    pub w_mat: CMatrix,
    /// Optimal value of the relaxation (the closed-form value outside the relaxation case).
    pub t_star: f64,
    pub recovered_w_t: CVector,
    pub rank_flag: RankFlag,
    pub case: TransmitCase,
}

impl SdrSolution {
    fn rank_one(w: CVector, t: f64, case: TransmitCase) -> Self {
        Self {
            w_mat: CMatrix::outer(&w, &w),
            t_star: t,
            recovered_w_t: w,
            rank_flag: RankFlag::RankOne,
            case,
        }
    }
}

/// Real orthonormal coordinates of Hermitian `n×n` matrices: diagonal entries,
/// then `√2·Re`, `√2·Im` of each strictly-upper entry.
struct HermBasis {
    n: usize,
}

impl HermBasis {
    fn len(&self) -> usize {
        self.n * self.n
    }

    fn coords(&self, m: &CMatrix) -> Vec<f64> {
        let n = self.n;
        let mut x = Vec::with_capacity(n * n);
        for i in 0..n {
            x.push(m[(i, i)].re);
        }
        let r2 = std::f64::consts::SQRT_2;
        for i in 0..n {
            for j in (i + 1)..n {
                x.push(r2 * m[(i, j)].re);
                x.push(r2 * m[(i, j)].im);
            }
        }
        x
    }

    fn matrix(&self, x: &[f64]) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(x[i], 0.0);
        }
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut k = n;
        for i in 0..n {
            for j in (i + 1)..n {
                let z = Complex64::new(x[k] * h, x[k + 1] * h);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
                k += 2;
            }
        }
        m
    }

    /// The `k`-th basis matrix.
    fn element(&self, k: usize) -> CMatrix {
        let mut e = vec![0.0; self.len()];
        e[k] = 1.0;
        self.matrix(&e)
    }
}

/// Outcome of the max-slack barrier solve.
#[derive(Debug, Clone)]
pub struct SlackSolution {
    pub w_mat: CMatrix,
    /// `min(f1 − t, f2 − t)/t_ub` at `w_mat`.
    pub slack: f64,
    /// Certified upper bound; below the margin means `t` is infeasible.
    pub slack_upper: f64,
}

impl SlackSolution {
    pub fn feasible(&self) -> bool {
        self.slack >= FEASIBILITY_MARGIN
    }
}

fn dotv(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximizes `min_i tr(W C_i)/t_ub` over `W ⪰ 0, tr W = 1`. With `early_exit`, stops as soon
/// as the sign of the optimum relative to the feasibility margin is certain.
pub fn max_slack(prob: &SdrProblem, t: f64, early_exit: bool) -> Result<SlackSolution> {
    let n = prob.dim();
    let basis = HermBasis { n };
    let nn = basis.len();
    let (m1, m2) = prob.constraint_matrices(t);
    // Work in V = R^{1/2} W R^{1/2} with tr V = 1. R = I + k1 H†H can be
    // arbitrarily ill-conditioned at strong loop interference; in V-coordinates
    // the first slack is exactly (f1 − t)/ub and the second (f2 − t)·tr(W)/ub
    // with tr(W) ≤ tr(V), so both constraints stay O(1).
    let ub = prob.t_upper_bound();
    let unit = if ub > 0.0 { 1.0 / ub } else { 1.0 };
    let wh = prob.whitening();
    let sandwich = |m: &CMatrix| wh.matmul(m).matmul(&wh).scale(unit);
    let cons = [basis.coords(&sandwich(&m1)), basis.coords(&sandwich(&m2))];
    let to_w = |x: &[f64]| {
        let w = wh.matmul(&basis.matrix(x)).matmul(&wh);
        let tr = w.trace().re;
        w.scale(1.0 / tr)
    };
    // The barrier slack certifies infeasibility; feasibility is judged on the
    // exact relative margins of the returned W.
    let finish = |x: &[f64], upper: f64| {
        let w_mat = to_w(x);
        let (f1v, f2v) = prob.objectives(&w_mat);
        SlackSolution {
            slack: (f1v - t).min(f2v - t) * unit,
            w_mat,
            slack_upper: upper,
        }
    };
    let elements: Vec<CMatrix> = (0..nn).map(|k| basis.element(k)).collect();

    let mut x = basis.coords(&CMatrix::identity(n).scale(1.0 / n as f64));
    let mut s = cons.iter().map(|c| dotv(c, &x)).fold(f64::INFINITY, f64::min) - 1.0;

    // Barrier value; None outside the domain.
    let phi = |x: &[f64], s: f64, tb: f64| -> Option<f64> {
        let mut v = -tb * s;
        for c in &cons {
            let sl = dotv(c, x) - s;
            if !(sl > 0.0) {
                return None;
            }
            v -= sl.ln();
        }
        let l = cholesky(&basis.matrix(x)).ok()?;
        let logdet: f64 = (0..n).map(|i| 2.0 * l[(i, i)].re.ln()).sum();
        Some(v - logdet)
    };

    let mut tb = 1.0;
    let m_barrier = (2 + n) as f64;
    let mut total_newton = 0usize;
    loop {
        for _ in 0..200 {
            total_newton += 1;
            let w = basis.matrix(&x);
            let winv = inverse_hermitian_pd(&w).map_err(|_| {
                Error::NoConvergence("barrier iterate left the PSD cone".into())
            })?;
            let sl: Vec<f64> = cons.iter().map(|c| dotv(c, &x) - s).collect();
            let dim = nn + 1;
            let mut grad = vec![0.0; dim];
            let ycoords = basis.coords(&winv);
            for k in 0..nn {
                grad[k] = -ycoords[k];
            }
            grad[nn] = -tb;
            let mut hess = vec![0.0; dim * dim];
            for (c, &sli) in cons.iter().zip(&sl) {
                let mut a = c.clone();
                a.push(-1.0);
                for k in 0..dim {
                    grad[k] -= a[k] / sli;
                    for l in 0..dim {
                        hess[k * dim + l] += a[k] * a[l] / (sli * sli);
                    }
                }
            }
            for k in 0..nn {
                let mk = winv.matmul(&elements[k]).matmul(&winv);
                let row = basis.coords(&mk);
                for l in 0..nn {
                    hess[k * dim + l] += row[l];
                }
            }
            // KKT system with the trace constraint Σ_i x_ii = 1 (kept exactly).
            let kd = dim + 1;
            let mut kkt = vec![0.0; kd * kd];
            for k in 0..dim {
                for l in 0..dim {
                    kkt[k * kd + l] = hess[k * dim + l];
                }
            }
            for i in 0..n {
                kkt[i * kd + dim] = 1.0;
                kkt[dim * kd + i] = 1.0;
            }
            let mut rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            rhs.push(0.0);
            let sol = match crate::linalg::solve_real_dense(kkt, rhs) {
                Ok(sol) => sol,
                // Late on the path the Hessian can overflow when W approaches a
                // rank-deficient face; the last interior iterate is kept.
                Err(_) if tb > 1.0 => return Ok(finish(&x, s + m_barrier / tb)),
                Err(_) => return Err(Error::NoConvergence("singular Newton system".into())),
            };
            let dz = &sol[..dim];
            let decrement = -dotv(&grad, dz);
            if decrement / 2.0 <= 1e-12 {
                break;
            }
            let f0 = phi(&x, s, tb).ok_or_else(|| Error::NoConvergence("infeasible iterate".into()))?;
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..80 {
                let xn: Vec<f64> = x.iter().zip(dz).map(|(a, d)| a + step * d).collect();
                let sn = s + step * dz[nn];
                if let Some(fv) = phi(&xn, sn, tb) {
                    if fv <= f0 - 0.25 * step * decrement {
                        // Homogeneous constraints: rescaling (W, s) removes trace
                        // drift without touching feasibility.
                        let tr: f64 = xn[..n].iter().sum();
                        x = xn.iter().map(|v| v / tr).collect();
                        s = sn / tr;
                        accepted = true;
                        break;
                    }
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
            if early_exit && s >= 0.0 {
                break;
            }
        }
        let gap = m_barrier / tb;
        let done = gap < 1e-11 || (early_exit && (s >= 0.0 || s + gap < FEASIBILITY_MARGIN));
        if done {
            return Ok(finish(&x, s + gap));
        }
        if total_newton > 5000 {
            return Err(Error::NoConvergence(format!(
                "barrier method exceeded its iteration cap at t = {t}"
            )));
        }
        tb *= 10.0;
    }
}

/// Feasibility of the relaxed problem at target `t`; `Ok(None)` when infeasible.
pub fn solve_feasibility(prob: &SdrProblem, t: f64) -> Result<Option<SdrSolution>> {
    let sol = max_slack(prob, t, false)?;
    if !sol.feasible() {
        return Ok(None);
    }
    let (w, flag) = rank_one_recover(&sol.w_mat, prob);
    Ok(Some(SdrSolution {
        w_mat: sol.w_mat,
        t_star: t,
        recovered_w_t: w,
        rank_flag: flag,
        case: TransmitCase::Relaxation,
    }))
}

/// Extracts a unit transmit vector from a relaxed solution: the principal
/// eigenvector when `W` is numerically rank one, otherwise the eigenvector in
/// the support of `W` with the largest second-hop gain.
pub fn rank_one_recover(w: &CMatrix, prob: &SdrProblem) -> (CVector, RankFlag) {
    let n = w.rows();
    let herm = w.add(&w.adjoint()).scale(0.5);
    let eig = hermitian_eig(&herm).expect("symmetrized matrix is Hermitian");
    let l1 = eig.values[n - 1];
    let l2 = if n > 1 { eig.values[n - 2] } else { 0.0 };
    let (mut v, flag) = if n == 1 || l2 <= 1e-6 * l1 {
        (eig.vector(n - 1), RankFlag::RankOne)
    } else {
        let best = (0..n)
            .filter(|&k| eig.values[k] > 1e-9)
            .max_by(|&i, &j| {
                prob.g
                    .quad_form(&eig.vector(i))
                    .total_cmp(&prob.g.quad_form(&eig.vector(j)))
            })
            .unwrap_or(n - 1);
        (eig.vector(best), RankFlag::RecoveredFromHigherRank)
    };
    phase_normalize(&mut v);
    (v, flag)
}

/// Optimum transmit beamformer for one realization.
pub fn optimum_transmit(ch: &ChannelRealization, link: &LinkBudget) -> Result<SdrSolution> {
    let m_t = ch.m_t();
    if m_t == 1 {
        let w = vec![Complex64::new(1.0, 0.0)];
        let t = max_min_objective(&w, ch, link);
        return Ok(SdrSolution::rank_one(w, t, TransmitCase::Trivial));
    }
    let wmin = w_min_sinr(ch, link);
    let wm = w_mrt(ch);
    let (a1, a2) = (f1(&wmin, ch, link), f2(&wmin, ch, link));
    let (b1, b2) = (f1(&wm, ch, link), f2(&wm, ch, link));
    let case_i = a1 <= a2;
    let case_ii = b2 <= b1;
    match (case_i, case_ii) {
        (true, true) => {
            return Ok(if a1.min(a2) >= b1.min(b2) {
                SdrSolution::rank_one(wmin, a1.min(a2), TransmitCase::MinSinr)
            } else {
                SdrSolution::rank_one(wm, b1.min(b2), TransmitCase::Mrt)
            })
        }
        (true, false) => return Ok(SdrSolution::rank_one(wmin, a1, TransmitCase::MinSinr)),
        (false, true) => return Ok(SdrSolution::rank_one(wm, b2, TransmitCase::Mrt)),
        (false, false) => {}
    }
    let prob = SdrProblem::new(ch, link);
    let candidates = [wmin, wm];
    relaxation_solve(&prob, ch, link, &candidates)
}

/// Bisection over `t` followed by rank-one recovery; the returned vector is
/// never worse than any of the `candidates`.
pub fn relaxation_solve(
    prob: &SdrProblem,
    ch: &ChannelRealization,
    link: &LinkBudget,
    candidates: &[CVector],
) -> Result<SdrSolution> {
    let (mut best_w, mut lo) = candidates
        .iter()
        .map(|w| (w.clone(), max_min_objective(w, ch, link)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or_else(|| (w_mrt(ch), 0.0));
    let mut hi = prob.t_upper_bound() * (1.0 + 1e-12);
    let mut iters = 0;
    while iters < BISECTION_MAX_ITER && hi - lo > BISECTION_REL_WIDTH * hi {
        let mid = 0.5 * (lo + hi);
        if max_slack(prob, mid, true)?.feasible() {
            lo = mid;
        } else {
            hi = mid;
        }
        iters += 1;
    }
    let sol = max_slack(prob, lo, false)?;
    let (mut w, flag) = rank_one_recover(&sol.w_mat, prob);
    let mut t_rec = max_min_objective(&w, ch, link);
    if t_rec < lo * (1.0 - 1e-12) {
        if let Some((wp, tp)) = polish(prob, ch, link, t_rec, hi) {
            if tp > t_rec {
                w = wp;
                t_rec = tp;
            }
        }
    }
    let best_candidate = max_min_objective(&best_w, ch, link);
    let rank_flag = if t_rec >= best_candidate {
        best_w = w;
        flag
    } else {
        RankFlag::RankOne
    };
    Ok(SdrSolution {
        w_mat: sol.w_mat,
        t_star: lo,
        recovered_w_t: best_w,
        rank_flag,
        case: TransmitCase::Relaxation,
    })
}

/// Best unit vector for `max f2 s.t. f1 ≥ t`: the principal eigenvector of
/// `c3 G + μ C1(t)` at the smallest `μ ≥ 0` meeting the first-hop constraint.
fn constrained_vector(prob: &SdrProblem, t: f64) -> Option<CVector> {
    let ub = prob.t_upper_bound();
    let (c1m, _) = prob.constraint_matrices(t);
    let c1m = c1m.scale(1.0 / ub);
    let gm = prob.g.scale(prob.c3 / ub);
    let n = prob.dim();
    let top = |mu: f64| {
        let e = hermitian_eig(&gm.add(&c1m.scale(mu))).ok()?;
        Some(e.vector(n - 1))
    };
    let ok = |w: &CVector| c1m.quad_form(w) >= 0.0;
    let w0 = top(0.0)?;
    if ok(&w0) {
        return Some(w0);
    }
    let mut hi = 1.0;
    let mut w_hi = top(hi)?;
    let mut doublings = 0;
    while !ok(&w_hi) {
        hi *= 4.0;
        doublings += 1;
        if doublings > 60 {
            return None;
        }
        w_hi = top(hi)?;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let w = top(mid)?;
        if ok(&w) {
            hi = mid;
            w_hi = w;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(w_hi)
}

/// Primal bisection on `t ∈ [t_lo, t_hi]` using [`constrained_vector`]; every
/// accepted step is certified by an explicit vector.
fn polish(
    prob: &SdrProblem,
    ch: &ChannelRealization,
    link: &LinkBudget,
    t_lo: f64,
    t_hi: f64,
) -> Option<(CVector, f64)> {
    let (mut lo, mut hi) = (t_lo, t_hi * (1.0 + 1e-12));
    let mut best: Option<(CVector, f64)> = None;
    for _ in 0..60 {
        if hi - lo <= 1e-12 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let achieved = constrained_vector(prob, mid).map(|mut w| {
            phase_normalize(&mut w);
            let v = max_min_objective(&w, ch, link);
            (w, v)
        });
        match achieved {
            Some((w, v)) if v >= mid * (1.0 - 1e-13) => {
                lo = v.max(mid);
                best = Some((w, v));
            }
            _ => hi = mid,
        }
    }
    best
}

/// Whether the optimum scheme reaches SINR `t` on this realization. Cheaper
/// than [`optimum_transmit`] because at most one feasibility solve is needed.
pub fn optimum_achieves(ch: &ChannelRealization, link: &LinkBudget, t: f64) -> Result<bool> {
    if t <= 0.0 {
        return Ok(true);
    }
    if ch.m_t() == 1 {
        let w = [Complex64::new(1.0, 0.0)];
        return Ok(max_min_objective(&w, ch, link) >= t);
    }
    let prob = SdrProblem::new(ch, link);
    if t > prob.t_upper_bound() {
        return Ok(false);
    }
    let wmin = w_min_sinr(ch, link);
    let wm = w_mrt(ch);
    let (a1, a2) = (f1(&wmin, ch, link), f2(&wmin, ch, link));
    let (b1, b2) = (f1(&wm, ch, link), f2(&wm, ch, link));
    if a1.min(a2) >= t || b1.min(b2) >= t {
        return Ok(true);
    }
    if a1 <= a2 || b2 <= b1 {
        // A closed-form case applies and its value is below t.
        return Ok(false);
    }
    Ok(max_slack(&prob, t, true)?.feasible())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{draw_channel, SystemConfig};
    use crate::rng::RngStream;

    fn instance(seed: u64, alpha: f64) -> (ChannelRealization, LinkBudget) {
        let cfg = SystemConfig {
            sigma2_rr: 1.0,
            ..SystemConfig::default()
        };
        let ch = draw_channel(&cfg, &mut RngStream::new(seed, 0));
        (ch, cfg.link(alpha).unwrap())
    }

    #[test]
    fn basis_round_trip() {
        let b = HermBasis { n: 3 };
        let mut rng = RngStream::new(1, 1);
        let g = CMatrix::from_fn(3, 3, |_, _| rng.next_cn());
        let h = g.add(&g.adjoint());
        let back = b.matrix(&b.coords(&h));
        assert!(back.sub(&h).frobenius_norm() < 1e-14);
        for k in 0..9 {
            for l in 0..9 {
                let ip = b.element(k).trace_product_re(&b.element(l));
                assert!((ip - if k == l { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn upper_bound_degenerate_cases() {
        let (mut ch, link) = instance(2, 0.5);
        ch.h_rd = vec![Complex64::new(0.0, 0.0); 3];
        assert_eq!(SdrProblem::new(&ch, &link).t_upper_bound(), 0.0);
        let (ch, _) = instance(2, 0.5);
        let cfg = SystemConfig::default();
        assert_eq!(SdrProblem::new(&ch, &cfg.link(0.0).unwrap()).t_upper_bound(), 0.0);
    }

    #[test]
    fn feasibility_at_zero_and_above_bound() {
        for seed in 0..5 {
            let (ch, link) = instance(seed, 0.5);
            let prob = SdrProblem::new(&ch, &link);
            let sol = solve_feasibility(&prob, 0.0).unwrap().expect("t = 0 is feasible");
            assert!((sol.w_mat.trace().re - 1.0).abs() < 1e-8);
            let ub = prob.t_upper_bound();
            assert!(solve_feasibility(&prob, ub * 1.001).unwrap().is_none());
        }
    }

    #[test]
    fn feasible_solution_satisfies_constraints() {
        let (ch, link) = instance(7, 0.5);
        let prob = SdrProblem::new(&ch, &link);
        let t = 0.5 * prob.t_upper_bound();
        if let Some(sol) = solve_feasibility(&prob, t).unwrap() {
            let (c1, c2) = prob.constraint_matrices(t);
            let ub = prob.t_upper_bound();
            assert!(sol.w_mat.trace_product_re(&c1) / ub >= -1e-8);
            assert!(sol.w_mat.trace_product_re(&c2) / ub >= -1e-8);
            let eig = hermitian_eig(&sol.w_mat).unwrap();
            assert!(eig.values[0] >= -1e-9);
        }
    }

    #[test]
    fn recover_rank_one_and_identity() {
        let (ch, link) = instance(3, 0.5);
        let prob = SdrProblem::new(&ch, &link);
        let v = crate::linalg::normalized(&ch.h_sr).unwrap();
        let (w, flag) = rank_one_recover(&CMatrix::outer(&v, &v), &prob);
        assert_eq!(flag, RankFlag::RankOne);
        let mut vv = v.clone();
        phase_normalize(&mut vv);
        for (a, b) in w.iter().zip(&vv) {
            assert!((a - b).norm() < 1e-10);
        }
        let mut ch2 = ch.clone();
        ch2.h_rd = crate::linalg::basis(3, 0);
        let prob2 = SdrProblem::new(&ch2, &link);
        let (w, flag) = rank_one_recover(&CMatrix::identity(3).scale(1.0 / 3.0), &prob2);
        assert_eq!(flag, RankFlag::RecoveredFromHigherRank);
        assert!((w[0].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_feasibility() {
        let (ch, link) = instance(11, 0.6);
        let prob = SdrProblem::new(&ch, &link);
        let ub = prob.t_upper_bound();
        let mut seen_infeasible = false;
        for i in 0..=20 {
            let t = ub * i as f64 / 20.0;
            let feas = max_slack(&prob, t, true).unwrap().feasible();
            if seen_infeasible {
                assert!(!feas);
            }
            seen_infeasible |= !feas;
        }
    }

    #[test]
    fn trivial_and_no_li_cases() {
        let cfg = SystemConfig {
            m_t: 1,
            ..SystemConfig::default()
        };
        let ch = draw_channel(&cfg, &mut RngStream::new(1, 0));
        let sol = optimum_transmit(&ch, &cfg.link(0.5).unwrap()).unwrap();
        assert_eq!(sol.case, TransmitCase::Trivial);
        assert_eq!(sol.recovered_w_t, vec![Complex64::new(1.0, 0.0)]);

        let (mut ch, link) = instance(4, 0.5);
        ch.h_rr = CMatrix::zeros(3, 3);
        let sol = optimum_transmit(&ch, &link).unwrap();
        let m = w_mrt(&ch);
        for (a, b) in sol.recovered_w_t.iter().zip(&m) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn achieves_matches_full_solve() {
        for seed in 0..30 {
            let (ch, link) = instance(seed, 0.3 + 0.02 * seed as f64);
            let sol = optimum_transmit(&ch, &link).unwrap();
            let v = max_min_objective(&sol.recovered_w_t, &ch, &link);
            assert!(optimum_achieves(&ch, &link, v * (1.0 - 1e-5)).unwrap());
            assert!(!optimum_achieves(&ch, &link, v * (1.0 + 1e-4)).unwrap());
        }
    }
}

//! Closed-form and quadrature terms of the outage decomposition.

use std::f64::consts::{FRAC_PI_2, LN_2};

use crate::analytic::quartic::Curves;
use crate::specfun::{binomial, gamma_q_int, ln_bessel_k_int, ln_factorial, ChebyshevNodes};

/// Outer gain `V ~ Gamma(m_own, θ_own)`, inner gain `W ~ Gamma(m_other, θ_other)`.
///
/// P2 uses `(X, Y)`; P3 the swapped pair.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LinkPair {
    pub m_own: u32,
    pub th_own: f64,
    pub m_other: u32,
    pub th_other: f64,
}

impl LinkPair {
    pub fn swapped(self) -> Self {
        Self {
            m_own: self.m_other,
            th_own: self.th_other,
            m_other: self.m_own,
            th_other: self.th_own,
        }
    }

    #[inline]
    fn ln_pdf_own(&self, x: f64) -> f64 {
        let m = self.m_own as f64;
        (m - 1.0) * x.ln() - x / self.th_own - ln_factorial(self.m_own - 1) - m * self.th_own.ln()
    }

    /// `f_V(x) · Q(m_other, t/θ_other)`, the integrand of the joint-term
    /// quadratures.
    #[inline]
    fn joint_integrand(&self, x: f64, t: f64, ln_weight: f64) -> f64 {
        let tail = gamma_q_int(self.m_other, t / self.th_other).unwrap_or(f64::NAN);
        if tail == 0.0 {
            return 0.0;
        }
        (self.ln_pdf_own(x) + ln_weight).exp() * tail
    }
}

/// Scenario constants the terms need.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TermConstants {
    pub rho: f64,
    pub gamma_th: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
}

/// Raw relaying-link outage `Pr(γ_r < γ_th)` from the Bessel triple sum.
pub(crate) fn relay_link_outage(k: &TermConstants, link: LinkPair) -> f64 {
    let g = k.gamma_th;
    let alpha = k.i4 * g / link.th_other;
    let beta = k.i2 * k.i4 * k.rho * g / link.th_other + 1.0 / link.th_own;
    let arg = 2.0 * (alpha * beta).sqrt();
    let ln_alpha = alpha.ln();
    let ln_ratio = ln_alpha - beta.ln();
    let ln_i2rho = (k.i2 * k.rho).ln();
    let ln_i3 = k.i3.ln();
    let ma = link.m_own as i64;

    let ln_prefactor = LN_2
        - ln_factorial(link.m_own - 1)
        - link.m_own as f64 * link.th_own.ln()
        - k.i3 * k.i4 * g / link.th_other;
    let mut sum = 0.0;
    for l in 0..link.m_other as u64 {
        let s_max = if k.i2 > 0.0 { l } else { 0 };
        for s in 0..=s_max {
            for t in 0..=(l - s) {
                let nu = s as i64 + ma - t as i64;
                let ln_bessel = match ln_bessel_k_int(nu.unsigned_abs() as u32, arg) {
                    Ok(v) => v,
                    Err(_) => return f64::NAN,
                };
                let mut ln_term = (binomial(l, s) as f64).ln() + (binomial(l - s, t) as f64).ln()
                    - ln_factorial(l as u32)
                    + l as f64 * ln_alpha
                    + 0.5 * nu as f64 * ln_ratio
                    + ln_bessel;
                if s > 0 {
                    ln_term += s as f64 * ln_i2rho;
                }
                if l - s - t > 0 {
                    ln_term += (l - s - t) as f64 * ln_i3;
                }
                sum += (ln_prefactor + ln_term).exp();
            }
        }
    }
    1.0 - sum
}

/// `Ξ5`: the exact tail `∫_{x_in}^∞ f_V(x) Σ_l (x/θ_w)^l/l! e^{-x/θ_w} dx`
/// via upper incomplete gammas.
pub(crate) fn xi5(link: LinkPair, x_in: f64) -> f64 {
    let mu = 1.0 / link.th_own + 1.0 / link.th_other;
    let ln_base = -ln_factorial(link.m_own - 1) - link.m_own as f64 * link.th_own.ln();
    (0..link.m_other)
        .map(|l| {
            let n = l + link.m_own;
            let tail = gamma_q_int(n, mu * x_in).unwrap_or(f64::NAN);
            if tail == 0.0 {
                return 0.0;
            }
            let ln = ln_base - ln_factorial(l) - l as f64 * link.th_other.ln() - n as f64 * mu.ln()
                + ln_factorial(n - 1);
            ln.exp() * tail
        })
        .sum()
}

/// `Ξ2`/`Ξ3`: Gauss–Chebyshev approximation of
/// `∫_lo^hi f_V(x) Q(m_w, Q(x)/θ_w) dx`.
pub(crate) fn q_curve_quadrature(
    link: LinkPair,
    curves: &Curves,
    lo: f64,
    hi: f64,
    nodes: &ChebyshevNodes,
) -> f64 {
    nodes.integrate(lo, hi, |x| link.joint_integrand(x, curves.q(x), 0.0))
}

/// `Ξ4`: `∫_phi^∞ f_V(x) Q(m_w, G(x)/θ_w) dx` after `x = phi + tan t`.
pub(crate) fn g_curve_tail(
    link: LinkPair,
    curves: &Curves,
    phi: f64,
    nodes: &ChebyshevNodes,
) -> f64 {
    nodes.integrate(0.0, FRAC_PI_2, |t| {
        let x = phi + t.tan();
        let ln_sec2 = -2.0 * t.cos().ln();
        link.joint_integrand(x, curves.g(x), ln_sec2)
    })
}

/// Joint relaying outage when the curves meet only at `x_in`.
pub(crate) fn joint_one_root(
    pair: LinkPair,
    curves: &Curves,
    x_in: f64,
    nodes: &ChebyshevNodes,
) -> f64 {
    let other = pair.swapped();
    1.0 - xi5(pair, x_in)
        - q_curve_quadrature(pair, curves, 0.0, x_in, nodes)
        - xi5(other, x_in)
        - q_curve_quadrature(other, curves, 0.0, x_in, nodes)
}

/// The gated bracket of the three-intersection form.
pub(crate) fn joint_three_roots_bracket(
    pair: LinkPair,
    curves: &Curves,
    x_in: f64,
    phi1: f64,
    phi2: f64,
    nodes: &ChebyshevNodes,
) -> f64 {
    let other = pair.swapped();
    1.0 + xi5(pair, x_in) + xi5(other, x_in)
        - q_curve_quadrature(pair, curves, x_in, phi1, nodes)
        - q_curve_quadrature(other, curves, x_in, phi2, nodes)
        - g_curve_tail(pair, curves, phi1, nodes)
        - g_curve_tail(other, curves, phi2, nodes)
}

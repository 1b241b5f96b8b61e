//! Closed-form system outage probability.
//!
//! The system is in outage unless both terminals decode, and each terminal
//! selection-combines the direct and relayed paths, so
//! `P_out = P1 · (P2 + P3 - P4)` with
//!
//! * `P1 = Pr(γ_d < γ_th)`, direct link,
//! * `P2 = Pr(γ_ra < γ_th)`, `P3 = Pr(γ_rb < γ_th)`, relaying links,
//! * `P4 = Pr(γ_ra < γ_th, γ_rb < γ_th)`, joint relaying outage.
//!
//! Hardware impairments cap the direct SNDR at `1/(k1²+k2²)` and the relaying
//! SNDRs at `I1/I2`; the two relaying links cannot both succeed once
//! `γ_th ≥ I1/(2 I2)`.

pub mod quartic;
mod terms;

pub use quartic::{quartic_analysis, Curves, QuarticAnalysis, RootCase};

use crate::error::{domain, evaluation, Result};
use crate::specfun::{chebyshev_nodes, gamma_p_int};
use crate::system::{derive_constants, DerivedConstants, SystemParams};
use terms::{LinkPair, TermConstants};

/// Window by which the exact closed forms may leave `[0, 1]`.
const EXACT_WINDOW: f64 = 1e-9;
/// Window allowed for quadrature-based terms.
const QUADRATURE_WINDOW: f64 = 2e-3;

/// Which branch of the piecewise law applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `γ_th < I1/(2 I2)`: relay and direct link both contribute.
    Cooperative,
    /// `I1/(2 I2) ≤ γ_th < 1/(k1²+k2²)`: the relay cannot serve both
    /// terminals, outage is decided by the direct link.
    DirectOnly,
    /// `γ_th ≥ 1/(k1²+k2²)`: outage is certain.
    FullOutage,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::Cooperative => "Cooperative",
            Regime::DirectOnly => "DirectOnly",
            Regime::FullOutage => "FullOutage",
        }
    }
}

/// How the joint relaying term was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum P4Case {
    /// `γ_th ≥ I1/I2`, so `P4 = 1`.
    NotApplicable,
    /// `I1/(2 I2) ≤ γ_th < I1/I2`: the success regions cannot overlap and
    /// `P4 = P2 + P3 - 1`.
    NoIntersection,
    OneRoot,
    ThreeRootsGateHigh,
    ThreeRootsGateLow,
}

impl P4Case {
    pub fn name(self) -> &'static str {
        match self {
            P4Case::NotApplicable => "NotApplicable",
            P4Case::NoIntersection => "NoIntersection",
            P4Case::OneRoot => "OneRoot",
            P4Case::ThreeRootsGateHigh => "ThreeRootsGateHigh",
            P4Case::ThreeRootsGateLow => "ThreeRootsGateLow",
        }
    }
}

/// Unclamped component values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawComponents {
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
}

/// System outage with all components.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
    pub p4: f64,
    pub p_out: f64,
    pub regime: Regime,
    pub p4_case: P4Case,
    pub quadrature_n: usize,
    pub raw: RawComponents,
}

fn checked(component: &'static str, raw: f64, window: f64) -> Result<f64> {
    if !raw.is_finite() {
        return Err(evaluation(component, format!("non-finite value {raw}")));
    }
    if raw < -window || raw > 1.0 + window {
        return Err(evaluation(
            component,
            format!("value {raw} outside [0, 1] by more than {window}"),
        ));
    }
    Ok(raw.clamp(0.0, 1.0))
}

fn link_pair(p: &SystemParams) -> Result<LinkPair> {
    Ok(LinkPair {
        m_own: p.ch_a.integer_shape()?,
        th_own: p.ch_a.scale(),
        m_other: p.ch_b.integer_shape()?,
        th_other: p.ch_b.scale(),
    })
}

fn term_constants(p: &SystemParams, c: &DerivedConstants) -> Option<TermConstants> {
    c.i4.map(|i4| TermConstants {
        rho: p.rho,
        gamma_th: c.gamma_th,
        i2: c.i2,
        i3: c.i3,
        i4,
    })
}

/// Direct-link outage `Pr(γ_d < γ_th)`.
pub fn p1(p: &SystemParams) -> Result<f64> {
    let c = derive_constants(p)?;
    let u = p.impairment();
    if c.gamma_th >= c.osc_threshold {
        return Ok(1.0);
    }
    let m = p.ch_d.integer_shape()?;
    let arg = c.gamma_th / (p.ch_d.scale() * p.rho * (1.0 - c.gamma_th * u));
    checked("P1", gamma_p_int(m, arg)?, EXACT_WINDOW)
}

fn relay_outage(p: &SystemParams, swap: bool, component: &'static str) -> Result<(f64, f64)> {
    let c = derive_constants(p)?;
    let Some(k) = term_constants(p, &c) else {
        return Ok((1.0, 1.0));
    };
    let pair = link_pair(p)?;
    let raw = terms::relay_link_outage(&k, if swap { pair.swapped() } else { pair });
    Ok((checked(component, raw, EXACT_WINDOW)?, raw))
}

/// Outage `Pr(γ_ra < γ_th)` of the relaying link into S_a.
pub fn p2(p: &SystemParams) -> Result<f64> {
    relay_outage(p, false, "P2").map(|v| v.0)
}

/// Outage `Pr(γ_rb < γ_th)` of the relaying link into S_b.
pub fn p3(p: &SystemParams) -> Result<f64> {
    relay_outage(p, true, "P3").map(|v| v.0)
}

/// Joint relaying outage `Pr(γ_ra < γ_th, γ_rb < γ_th)` and the branch used.
pub fn p4(p: &SystemParams) -> Result<(f64, P4Case)> {
    let (v, _, case) = p4_raw(p)?;
    Ok((v, case))
}

fn p4_raw(p: &SystemParams) -> Result<(f64, f64, P4Case)> {
    if p.quadrature_n == 0 {
        return Err(domain("p4", "quadrature order must be >= 1"));
    }
    let c = derive_constants(p)?;
    if c.gamma_th >= c.relay_cutoff {
        return Ok((1.0, 1.0, P4Case::NotApplicable));
    }
    if c.gamma_th >= c.rcc_threshold {
        let raw = p2(p)? + p3(p)? - 1.0;
        return Ok((
            checked("P4", raw, QUADRATURE_WINDOW)?,
            raw,
            P4Case::NoIntersection,
        ));
    }
    let qa = quartic_analysis(p)?;
    let (raw, case) = p4_raw_given_analysis(p, &qa)?;
    Ok((checked("P4", raw, QUADRATURE_WINDOW)?, raw, case))
}

/// Joint relaying outage evaluated on a given intersection analysis.
///
/// [`p4`] obtains the analysis from [`quartic_analysis`]; this entry point
/// exists to exercise every branch with hand-built layouts.
pub fn p4_given_analysis(p: &SystemParams, qa: &QuarticAnalysis) -> Result<(f64, P4Case)> {
    let (raw, case) = p4_raw_given_analysis(p, qa)?;
    Ok((checked("P4", raw, QUADRATURE_WINDOW)?, case))
}

fn p4_raw_given_analysis(p: &SystemParams, qa: &QuarticAnalysis) -> Result<(f64, P4Case)> {
    let nodes = chebyshev_nodes(p.quadrature_n)?;
    let pair = link_pair(p)?;
    let one_root = terms::joint_one_root(pair, &qa.curves, qa.x_in, &nodes);
    match (qa.case, qa.phi1, qa.phi2, qa.gate) {
        (RootCase::OneRoot, ..) => Ok((one_root, P4Case::OneRoot)),
        (RootCase::ThreeRoots, Some(phi1), Some(phi2), Some((k1, k2))) => {
            if k1 - k2 > 0.0 {
                let v =
                    terms::joint_three_roots_bracket(pair, &qa.curves, qa.x_in, phi1, phi2, &nodes);
                Ok((v, P4Case::ThreeRootsGateHigh))
            } else {
                Ok((one_root, P4Case::ThreeRootsGateLow))
            }
        }
        _ => Err(evaluation(
            "P4",
            "three-root analysis without Φ1, Φ2 and gate values",
        )),
    }
}

/// Regime of the piecewise outage law. Boundaries belong to the more
/// degraded regime.
pub fn classify_regime(p: &SystemParams) -> Result<Regime> {
    let c = derive_constants(p)?;
    Ok(regime_of(&c))
}

fn regime_of(c: &DerivedConstants) -> Regime {
    if c.gamma_th >= c.osc_threshold {
        Regime::FullOutage
    } else if c.gamma_th >= c.rcc_threshold {
        Regime::DirectOnly
    } else {
        Regime::Cooperative
    }
}

/// System outage probability and its components.
pub fn system_outage(p: &SystemParams) -> Result<OutageResult> {
    let c = derive_constants(p)?;
    let regime = regime_of(&c);
    let p1 = p1(p)?;
    let (p2, p2_raw) = relay_outage(p, false, "P2")?;
    let (p3, p3_raw) = relay_outage(p, true, "P3")?;
    let (p4, p4_raw, p4_case) = p4_raw(p)?;
    let p_out = match regime {
        Regime::FullOutage => 1.0,
        Regime::DirectOnly => p1,
        // The union of the two relay outages is a probability; quadrature error
        // in P4 can push it just past 1.
        Regime::Cooperative => p1 * checked("P2 + P3 - P4", p2 + p3 - p4, QUADRATURE_WINDOW)?,
    };
    Ok(OutageResult {
        p1,
        p2,
        p3,
        p4,
        p_out,
        regime,
        p4_case,
        quadrature_n: p.quadrature_n,
        raw: RawComponents {
            p2: p2_raw,
            p3: p3_raw,
            p4: p4_raw,
        },
    })
}

/// Asymptotic diversity order: `m_d` below the overall ceiling, else 0.
pub fn diversity_gain(p: &SystemParams) -> Result<u32> {
    let c = derive_constants(p)?;
    let m_d = p.ch_d.integer_shape()?;
    Ok(if c.gamma_th < c.osc_threshold { m_d } else { 0 })
}

/// Impairment levels `k1 = k2 = k` at which the scenario's threshold hits the
/// relay cooperation ceiling and the overall ceiling: `(k_rcc, k_osc)`.
pub fn hi_ceiling_levels(p: &SystemParams) -> Result<(f64, f64)> {
    p.validate()?;
    Ok(hi_ceiling_levels_for(
        p.gamma_threshold(crate::system::Protocol::Tdbc),
    ))
}

/// [`hi_ceiling_levels`] for an explicit threshold; `+∞` for both when
/// `gamma_th ≤ 0`.
pub fn hi_ceiling_levels_for(gamma_th: f64) -> (f64, f64) {
    if !(gamma_th > 0.0) {
        return (f64::INFINITY, f64::INFINITY);
    }
    // γ = 1/(2u(2+u)) with u = 2k², solved as u = a / (1 + √(1 + a)), a = 1/(2γ).
    let a = 0.5 / gamma_th;
    let u_rcc = a / (1.0 + (1.0 + a).sqrt());
    ((0.5 * u_rcc).sqrt(), a.sqrt())
}

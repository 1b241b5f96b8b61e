//! Scenario parameters, derived constants and per-draw SNDRs.

use crate::channel::{channel_from_geometry, FadingDraw, GammaChannel};
use crate::error::{domain, invalid, Result};

/// Two-way relaying protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Protocol {
    /// Three-phase time-division broadcast with a usable direct link.
    Tdbc,
    /// Two-phase multiple-access broadcast, relay only.
    Mabc,
    /// Two-phase direct exchange, relay unused.
    Direct,
}

impl Protocol {
    pub fn phases(self) -> u32 {
        match self {
            Protocol::Tdbc => 3,
            Protocol::Mabc | Protocol::Direct => 2,
        }
    }

    /// Transmit power relative to TDBC at equal per-terminal energy.
    ///
    /// Two-phase protocols send for `T/2` instead of `T/3`, hence `2/3`.
    pub fn power_factor(self) -> f64 {
        match self {
            Protocol::Tdbc => 1.0,
            Protocol::Mabc | Protocol::Direct => 2.0 / 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Protocol::Tdbc => "TDBC",
            Protocol::Mabc => "MABC",
            Protocol::Direct => "Direct",
        }
    }
}

/// Receiving terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Terminal {
    A,
    B,
}

/// Node placement used to build the channels from path loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub d_ar: f64,
    pub d_br: f64,
    pub d_ab: f64,
    /// Path-loss exponent of the relay links.
    pub alpha1: f64,
    /// Path-loss exponent of the direct link.
    pub alpha2: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            d_ar: 5.0,
            d_br: 5.0,
            d_ab: 10.0,
            alpha1: 2.7,
            alpha2: 3.0,
        }
    }
}

/// All scenario inputs. Every quantity is linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Transmitter impairment level.
    pub k1: f64,
    /// Receiver impairment level.
    pub k2: f64,
    /// Energy conversion efficiency η.
    pub eta: f64,
    /// Power-splitting ratio β.
    pub beta: f64,
    /// Input SNR `P_o / σ²`.
    pub rho: f64,
    pub sigma2: f64,
    /// Block duration.
    pub t_block: f64,
    /// Rate threshold in bit/s/Hz.
    pub r_th: f64,
    pub ch_a: GammaChannel,
    pub ch_b: GammaChannel,
    pub ch_d: GammaChannel,
    pub quadrature_n: usize,
    /// Placement the channels were built from, if any.
    pub geometry: Option<Geometry>,
}

impl Default for SystemParams {
    /// η = 0.6, β = 0.8, T = 1, k1 = k2 = 0.1, ρ = 10⁵, R_th = 1,
    /// shapes (2, 2, 1) on the default [`Geometry`].
    fn default() -> Self {
        let geometry = Geometry::default();
        let ch_a =
            channel_from_geometry(geometry.d_ar, geometry.alpha1, 2.0).expect("default channel");
        let ch_b =
            channel_from_geometry(geometry.d_br, geometry.alpha1, 2.0).expect("default channel");
        let ch_d =
            channel_from_geometry(geometry.d_ab, geometry.alpha2, 1.0).expect("default channel");
        Self {
            k1: 0.1,
            k2: 0.1,
            eta: 0.6,
            beta: 0.8,
            rho: 1e5,
            sigma2: 1.0,
            t_block: 1.0,
            r_th: 1.0,
            ch_a,
            ch_b,
            ch_d,
            quadrature_n: 32,
            geometry: Some(geometry),
        }
    }
}

impl SystemParams {
    /// Sets `k1 = k2 = k`.
    pub fn with_k_ave(mut self, k: f64) -> Self {
        self.k1 = k;
        self.k2 = k;
        self
    }

    /// Changes the three fading shapes, keeping each link's average power.
    pub fn with_shapes(mut self, m_a: f64, m_b: f64, m_d: f64) -> Result<Self> {
        self.ch_a = self.ch_a.with_shape(m_a)?;
        self.ch_b = self.ch_b.with_shape(m_b)?;
        self.ch_d = self.ch_d.with_shape(m_d)?;
        Ok(self)
    }

    /// Rebuilds all three channels from `geometry`, keeping their shapes.
    pub fn with_geometry(mut self, geometry: Geometry) -> Result<Self> {
        self.ch_a = channel_from_geometry(geometry.d_ar, geometry.alpha1, self.ch_a.shape())?;
        self.ch_b = channel_from_geometry(geometry.d_br, geometry.alpha1, self.ch_b.shape())?;
        self.ch_d = channel_from_geometry(geometry.d_ab, geometry.alpha2, self.ch_d.shape())?;
        self.geometry = Some(geometry);
        Ok(self)
    }

    /// Moves the relay along the S_a–S_b segment: `d_br = d_ab - d_ar`.
    pub fn with_relay_position(self, d_ar: f64) -> Result<Self> {
        let g = self.geometry.unwrap_or_default();
        if !(d_ar > 0.0 && d_ar < g.d_ab) {
            return Err(invalid(
                "d_ar",
                format!("must lie in (0, {}), got {d_ar}", g.d_ab),
            ));
        }
        self.with_geometry(Geometry {
            d_ar,
            d_br: g.d_ab - d_ar,
            ..g
        })
    }

    /// Sets the rate threshold from a target TDBC SNDR threshold.
    pub fn with_gamma_th(mut self, gamma_th: f64) -> Result<Self> {
        if !(gamma_th > 0.0) || gamma_th.is_infinite() {
            return Err(invalid(
                "gamma_th",
                format!("must be finite and > 0, got {gamma_th}"),
            ));
        }
        self.r_th = self.t_block * (1.0 + gamma_th).log2() / Protocol::Tdbc.phases() as f64;
        Ok(self)
    }

    /// `k1² + k2²`.
    pub fn impairment(&self) -> f64 {
        self.k1 * self.k1 + self.k2 * self.k2
    }

    /// Transmit power `P_o = ρσ²`.
    pub fn tx_power(&self) -> f64 {
        self.rho * self.sigma2
    }

    /// SNDR threshold `2^{phases·R_th/T} - 1` of `protocol`.
    pub fn gamma_threshold(&self, protocol: Protocol) -> f64 {
        (protocol.phases() as f64 * self.r_th / self.t_block).exp2() - 1.0
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, name: &'static str, v: f64, what: &str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(invalid(name, format!("{what}, got {v}")))
            }
        }
        check(
            self.k1 >= 0.0 && self.k1.is_finite(),
            "k1",
            self.k1,
            "must be finite and >= 0",
        )?;
        check(
            self.k2 >= 0.0 && self.k2.is_finite(),
            "k2",
            self.k2,
            "must be finite and >= 0",
        )?;
        check(
            self.eta > 0.0 && self.eta < 1.0,
            "eta",
            self.eta,
            "must lie in (0, 1)",
        )?;
        check(
            self.beta > 0.0 && self.beta < 1.0,
            "beta",
            self.beta,
            "must lie in (0, 1)",
        )?;
        check(
            self.rho > 0.0 && self.rho.is_finite(),
            "rho",
            self.rho,
            "must be finite and > 0",
        )?;
        check(
            self.sigma2 > 0.0 && self.sigma2.is_finite(),
            "sigma2",
            self.sigma2,
            "must be finite and > 0",
        )?;
        check(
            self.t_block > 0.0 && self.t_block.is_finite(),
            "T",
            self.t_block,
            "must be finite and > 0",
        )?;
        check(
            self.r_th > 0.0 && self.r_th.is_finite(),
            "R_th",
            self.r_th,
            "must be finite and > 0",
        )?;
        if self.quadrature_n == 0 {
            return Err(invalid("quadrature_N", "must be >= 1"));
        }
        Ok(())
    }
}

/// Constants shared by all closed-form terms of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    pub i1: f64,
    pub i2: f64,
    pub i3: f64,
    /// `1 / ((I1 - γ_th I2) ρ)`, present only when `γ_th < I1/I2`.
    pub i4: Option<f64>,
    pub gamma_th: f64,
    /// `I1 / (2 I2)`; above it the relaying link cannot help.
    pub rcc_threshold: f64,
    /// `I1 / I2`, the supremum of the relaying SNDR.
    pub relay_cutoff: f64,
    /// `1 / (k1² + k2²)`, the supremum of the direct SNDR.
    pub osc_threshold: f64,
}

/// Constants for the TDBC closed forms.
pub fn derive_constants(p: &SystemParams) -> Result<DerivedConstants> {
    derive_constants_for(p, Protocol::Tdbc)
}

/// Constants with the threshold of `protocol`. The SNR is taken as given.
pub fn derive_constants_for(p: &SystemParams, protocol: Protocol) -> Result<DerivedConstants> {
    if !(p.beta > 0.0 && p.beta < 1.0) {
        return Err(domain(
            "derive_constants",
            format!("beta must lie in (0, 1), got {}", p.beta),
        ));
    }
    p.validate()?;
    let u = p.impairment();
    let eb = p.eta * p.beta;
    let i1 = eb / (1.0 + u);
    let i2 = eb * (u / (1.0 + u) + u);
    let i3 = 2.0 * eb / ((1.0 - p.beta) * (1.0 + u));
    let gamma_th = p.gamma_threshold(protocol);
    let (rcc_threshold, relay_cutoff) = if i2 > 0.0 {
        (i1 / (2.0 * i2), i1 / i2)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    let osc_threshold = if u > 0.0 { 1.0 / u } else { f64::INFINITY };
    let i4 = if gamma_th < relay_cutoff {
        let v = 1.0 / ((i1 - gamma_th * i2) * p.rho);
        (v > 0.0 && v.is_finite()).then_some(v)
    } else {
        None
    };
    Ok(DerivedConstants {
        i1,
        i2,
        i3,
        i4,
        gamma_th,
        rcc_threshold,
        relay_cutoff,
        osc_threshold,
    })
}

/// Precomputed SNDR evaluator for one scenario and protocol.
///
/// For two-phase protocols the SNR is scaled by [`Protocol::power_factor`].
#[derive(Debug, Clone, Copy)]
pub struct SndrModel {
    protocol: Protocol,
    rho: f64,
    u: f64,
    i1: f64,
    i2: f64,
    /// I3 coefficient as it appears in the denominator.
    i3_eff: f64,
}

impl SndrModel {
    pub fn new(p: &SystemParams, protocol: Protocol) -> Result<Self> {
        let c = derive_constants_for(p, protocol)?;
        let i3_eff = match protocol {
            Protocol::Mabc => 0.5 * c.i3,
            Protocol::Tdbc | Protocol::Direct => c.i3,
        };
        Ok(Self {
            protocol,
            rho: p.rho * protocol.power_factor(),
            u: p.impairment(),
            i1: c.i1,
            i2: c.i2,
            i3_eff,
        })
    }

    pub fn protocol(&self) -> Protocol {
        self.protocol
    }

    #[inline]
    pub fn direct(&self, z: f64) -> f64 {
        let s = self.rho * z;
        s / (self.u * s + 1.0)
    }

    /// Relaying-link SNDR at `terminal` (the own gain is x for A, y for B).
    #[inline]
    pub fn relay(&self, draw: &FadingDraw, terminal: Terminal) -> f64 {
        let own = match terminal {
            Terminal::A => draw.x,
            Terminal::B => draw.y,
        };
        let num = self.i1 * self.rho * draw.x * draw.y;
        if num == 0.0 {
            return 0.0;
        }
        num / (self.i2 * self.rho * own * (draw.x + draw.y) + self.i3_eff * own + 1.0)
    }

    /// Selection-combined SNDRs `(γ_a, γ_b)`.
    #[inline]
    pub fn end_to_end(&self, draw: &FadingDraw) -> (f64, f64) {
        let d = self.direct(draw.z);
        (
            d.max(self.relay(draw, Terminal::A)),
            d.max(self.relay(draw, Terminal::B)),
        )
    }
}

/// Direct-link SNDR `ρz / ((k1²+k2²)ρz + 1)`.
pub fn sndr_direct(z: f64, p: &SystemParams) -> f64 {
    let s = p.rho * z;
    s / (p.impairment() * s + 1.0)
}

/// TDBC relaying-link SNDR.
pub fn sndr_relay_tdbc(draw: &FadingDraw, terminal: Terminal, p: &SystemParams) -> Result<f64> {
    relay_with(draw, terminal, p, 1.0)
}

/// MABC relaying-link SNDR (the relay noise term is halved).
pub fn sndr_relay_mabc(draw: &FadingDraw, terminal: Terminal, p: &SystemParams) -> Result<f64> {
    relay_with(draw, terminal, p, 0.5)
}

fn relay_with(
    draw: &FadingDraw,
    terminal: Terminal,
    p: &SystemParams,
    i3_factor: f64,
) -> Result<f64> {
    let c = derive_constants(p)?;
    let model = SndrModel {
        protocol: Protocol::Tdbc,
        rho: p.rho,
        u: p.impairment(),
        i1: c.i1,
        i2: c.i2,
        i3_eff: i3_factor * c.i3,
    };
    Ok(model.relay(draw, terminal))
}

/// TDBC selection-combined SNDRs `(γ_a, γ_b)`.
pub fn end_to_end_sndrs(draw: &FadingDraw, p: &SystemParams) -> Result<(f64, f64)> {
    Ok(SndrModel::new(p, Protocol::Tdbc)?.end_to_end(draw))
}

/// Relay transmit power `ηβP_o(x + y)`.
pub fn relay_power(draw: &FadingDraw, p: &SystemParams) -> f64 {
    p.eta * p.beta * p.tx_power() * (draw.x + draw.y)
}

/// Energy harvested during the two uplink phases, `(T/3)·P_r`.
pub fn harvested_energy(draw: &FadingDraw, p: &SystemParams) -> f64 {
    p.t_block / 3.0 * relay_power(draw, p)
}

/// Relay amplification `√(P_r / ((1-β)(1+k1²+k2²)P_o(x+y)))`.
///
/// The draw cancels, leaving `√(ηβ / ((1-β)(1+k1²+k2²)))`.
pub fn amplification_gain(draw: &FadingDraw, p: &SystemParams) -> Result<f64> {
    let sum = draw.x + draw.y;
    if !(sum > 0.0) {
        return Err(domain(
            "amplification_gain",
            "relay received no power (x + y = 0)",
        ));
    }
    let pr = relay_power(draw, p);
    Ok((pr / ((1.0 - p.beta) * (1.0 + p.impairment()) * p.tx_power() * sum)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal() -> SystemParams {
        SystemParams::default().with_k_ave(0.0)
    }

    #[test]
    fn derived_constants_example() {
        let c = derive_constants(&SystemParams::default()).unwrap();
        assert!((c.i1 - 0.470_588_235_294_117_6).abs() < 1e-12);
        assert!((c.i2 - 0.019_011_764_705_882_35).abs() < 1e-12);
        assert!((c.i3 - 4.705_882_352_941_177).abs() < 1e-12);
        assert!((c.relay_cutoff - 24.752_475_247_524_75).abs() < 1e-9);
        assert!((c.rcc_threshold - 12.376_237_623_762_38).abs() < 1e-9);
        assert!((c.osc_threshold - 50.0).abs() < 1e-9);
        assert_eq!(c.gamma_th, 7.0);
        let i4 = c.i4.unwrap();
        assert!((i4 - 1.0 / ((c.i1 - 7.0 * c.i2) * 1e5)).abs() < 1e-18);
    }

    #[test]
    fn ideal_hardware_removes_ceilings() {
        let c = derive_constants(&ideal()).unwrap();
        assert_eq!(c.i2, 0.0);
        assert_eq!(c.osc_threshold, f64::INFINITY);
        assert_eq!(c.relay_cutoff, f64::INFINITY);
        assert!(c.i4.is_some());
    }

    #[test]
    fn i4_absent_above_relay_cutoff() {
        let p = SystemParams {
            r_th: 1.6,
            ..SystemParams::default()
        };
        let c = derive_constants(&p).unwrap();
        assert!(c.gamma_th >= c.relay_cutoff);
        assert_eq!(c.i4, None);
    }

    #[test]
    fn beta_out_of_range_is_domain_error() {
        for beta in [0.0, 1.0, 1.5] {
            let p = SystemParams {
                beta,
                ..SystemParams::default()
            };
            assert!(matches!(
                derive_constants(&p),
                Err(crate::Error::Domain { .. })
            ));
        }
    }

    #[test]
    fn relay_cutoff_identity() {
        for k in [0.01, 0.05, 0.1, 0.3] {
            let p = SystemParams::default().with_k_ave(k);
            let c = derive_constants(&p).unwrap();
            let u = p.impairment();
            assert!((c.relay_cutoff * u * (2.0 + u) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn direct_examples() {
        let p = SystemParams::default();
        assert_eq!(sndr_direct(0.0, &p), 0.0);
        let q = SystemParams {
            rho: 100.0,
            ..ideal()
        };
        assert!((sndr_direct(0.01, &q) - 1.0).abs() < 1e-15);
        let big = SystemParams { rho: 1e15, ..p };
        let v = sndr_direct(0.3, &big);
        assert!(v < 50.0 && v > 50.0 - 1e-9);
    }

    #[test]
    fn relay_examples() {
        let p = SystemParams::default();
        assert_eq!(
            sndr_relay_tdbc(&FadingDraw::new(0.0, 0.4, 1.0), Terminal::A, &p).unwrap(),
            0.0
        );
        assert_eq!(
            sndr_relay_mabc(&FadingDraw::new(0.0, 0.4, 1.0), Terminal::B, &p).unwrap(),
            0.0
        );

        let big = SystemParams {
            rho: 1e14,
            ..p.clone()
        };
        let v = sndr_relay_tdbc(&FadingDraw::new(0.2, 0.2, 0.0), Terminal::A, &big).unwrap();
        assert!((v - 12.376_237_623_762_38).abs() < 1e-6);

        let q = SystemParams {
            rho: 1000.0,
            ..ideal()
        };
        let d = FadingDraw::new(0.01, 0.01, 0.0);
        let t = sndr_relay_tdbc(&d, Terminal::A, &q).unwrap();
        let m = sndr_relay_mabc(&d, Terminal::A, &q).unwrap();
        assert!((t - 0.048 / 1.048).abs() < 1e-15);
        assert!((m - 0.048 / 1.024).abs() < 1e-15);
        assert!(m > t);
    }

    #[test]
    fn selection_combining() {
        let p = SystemParams::default();
        let dead_relay = FadingDraw::new(0.0, 0.0, 0.05);
        let (a, b) = end_to_end_sndrs(&dead_relay, &p).unwrap();
        assert_eq!(a, sndr_direct(0.05, &p));
        assert_eq!(b, a);
        let dead_direct = FadingDraw::new(0.01, 0.02, 0.0);
        let (a, b) = end_to_end_sndrs(&dead_direct, &p).unwrap();
        assert_eq!(a, sndr_relay_tdbc(&dead_direct, Terminal::A, &p).unwrap());
        assert_eq!(b, sndr_relay_tdbc(&dead_direct, Terminal::B, &p).unwrap());
    }

    #[test]
    fn power_examples() {
        let p = SystemParams {
            rho: 1.0,
            ..SystemParams::default()
        };
        assert_eq!(relay_power(&FadingDraw::new(0.0, 0.0, 0.3), &p), 0.0);
        let d = FadingDraw::new(0.005, 0.015, 0.0);
        assert!((relay_power(&d, &p) - 0.0096).abs() < 1e-15);
        let half = SystemParams {
            beta: 0.4,
            ..p.clone()
        };
        assert!((relay_power(&d, &p) - 2.0 * relay_power(&d, &half)).abs() < 1e-15);
        assert!((harvested_energy(&d, &p) - 0.0032).abs() < 1e-15);
    }

    #[test]
    fn amplification_gain_cancels_draw() {
        let p = ideal();
        let g1 = amplification_gain(&FadingDraw::new(0.01, 0.02, 0.0), &p).unwrap();
        let g2 = amplification_gain(&FadingDraw::new(3.0, 0.5, 1.0), &p).unwrap();
        assert!((g1 - 1.549_193_338_482_966_7).abs() < 1e-12);
        assert!((g1 - g2).abs() < 1e-14);
        assert!(amplification_gain(&FadingDraw::new(0.0, 0.0, 1.0), &p).is_err());
        let tiny = SystemParams { beta: 1e-12, ..p };
        assert!(amplification_gain(&FadingDraw::new(1.0, 1.0, 1.0), &tiny).unwrap() < 1e-5);
    }

    #[test]
    fn gamma_th_helper_roundtrips() {
        let p = SystemParams::default().with_gamma_th(21.627).unwrap();
        assert!((p.gamma_threshold(Protocol::Tdbc) - 21.627).abs() < 1e-12);
        assert_eq!(SystemParams::default().gamma_threshold(Protocol::Mabc), 3.0);
    }

    #[test]
    fn relay_position_keeps_total_distance() {
        let p = SystemParams::default().with_relay_position(3.0).unwrap();
        let g = p.geometry.unwrap();
        assert_eq!((g.d_ar, g.d_br), (3.0, 7.0));
        assert!((p.ch_a.average_power() - 3f64.powf(-2.7)).abs() < 1e-15);
        assert!(SystemParams::default().with_relay_position(10.0).is_err());
    }
}

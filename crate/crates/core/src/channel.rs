//! Squared-Nakagami (gamma) channel gains.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, invalid, Result};
use crate::specfun::{gamma_p_int, ln_factorial};

/// Smallest shape accepted by the sampler.
pub const MIN_SHAPE: f64 = 0.5;

/// Gamma distribution of a link's power gain `|h|^2`, with `Ω = m·θ`.
///
/// Real shapes are accepted for sampling; the closed forms need an integer
/// shape, see [`GammaChannel::integer_shape`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaChannel {
    shape: f64,
    scale: f64,
}

impl GammaChannel {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape >= MIN_SHAPE) || !shape.is_finite() {
            return Err(invalid(
                "shape",
                format!("must be finite and >= {MIN_SHAPE}, got {shape}"),
            ));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(invalid(
                "scale",
                format!("must be finite and > 0, got {scale}"),
            ));
        }
        Ok(Self { shape, scale })
    }

    /// Builds the channel from its average power `Ω`, so `θ = Ω / m`.
    pub fn from_average_power(shape: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(invalid(
                "average_power",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        Self::new(shape, omega / shape)
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn average_power(&self) -> f64 {
        self.shape * self.scale
    }

    /// Same average power with a different shape.
    pub fn with_shape(&self, shape: f64) -> Result<Self> {
        Self::from_average_power(shape, self.average_power())
    }

    /// Same shape with average power scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.shape, self.scale * factor)
    }

    /// The shape as an integer, or an error if it is not one.
    pub fn integer_shape(&self) -> Result<u32> {
        if self.shape.fract() == 0.0 && self.shape <= u32::MAX as f64 {
            Ok(self.shape as u32)
        } else {
            Err(domain(
                "integer_shape",
                format!("closed forms need an integer shape, got {}", self.shape),
            ))
        }
    }

    /// A reusable sampler for this distribution.
    pub fn sampler(&self) -> GainSampler {
        GainSampler {
            // Parameters were validated at construction.
            unit: Gamma::new(self.shape, 1.0).expect("validated gamma shape"),
            scale: self.scale,
        }
    }
}

/// Draws `θ·G` with `G ~ Gamma(m, 1)`.
#[derive(Debug, Clone, Copy)]
pub struct GainSampler {
    unit: Gamma<f64>,
    scale: f64,
}

impl GainSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * self.unit.sample(rng)
    }
}

/// One realization of the three link gains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingDraw {
    /// `|h_ar|^2`
    pub x: f64,
    /// `|h_br|^2`
    pub y: f64,
    /// `|h_ab|^2`
    pub z: f64,
}

impl FadingDraw {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Density `v^{m-1} e^{-v/θ} / (Γ(m) θ^m)`. Requires an integer shape.
pub fn gain_pdf(ch: &GammaChannel, v: f64) -> Result<f64> {
    if !(v > 0.0) || v.is_infinite() {
        return Err(domain(
            "gain_pdf",
            format!("argument must be finite and > 0, got {v}"),
        ));
    }
    let m = ch.integer_shape()?;
    let t = ch.scale;
    let ln = (m as f64 - 1.0) * v.ln() - v / t - ln_factorial(m - 1) - m as f64 * t.ln();
    Ok(ln.exp())
}

/// Distribution function `γ(m, v/θ) / Γ(m)`. Requires an integer shape.
pub fn gain_cdf(ch: &GammaChannel, v: f64) -> Result<f64> {
    if !(v >= 0.0) {
        return Err(domain(
            "gain_cdf",
            format!("argument must be >= 0, got {v}"),
        ));
    }
    let m = ch.integer_shape()?;
    if v.is_infinite() {
        return Ok(1.0);
    }
    gamma_p_int(m, v / ch.scale)
}

/// One gain draw. Prefer [`GammaChannel::sampler`] in loops.
pub fn sample_gain<R: Rng + ?Sized>(ch: &GammaChannel, rng: &mut R) -> f64 {
    ch.sampler().sample(rng)
}

/// Path-loss channel: `Ω = d^{-α}`, `θ = Ω / m`.
pub fn channel_from_geometry(distance: f64, alpha: f64, shape: f64) -> Result<GammaChannel> {
    if !(distance > 0.0) || distance.is_infinite() {
        return Err(domain(
            "channel_from_geometry",
            format!("distance must be finite and > 0, got {distance}"),
        ));
    }
    if !(alpha > 0.0) || alpha.is_infinite() {
        return Err(domain(
            "channel_from_geometry",
            format!("path-loss exponent must be finite and > 0, got {alpha}"),
        ));
    }
    GammaChannel::from_average_power(shape, distance.powf(-alpha))
}

/// Generator for substream `stream` of a run seeded with `seed`.
///
/// ChaCha is counter based, so the k-th output of a stream depends only on
/// `(seed, stream, k)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

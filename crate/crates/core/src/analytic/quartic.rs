//! Intersections of the two outage boundary curves.
//!
//! The boundary of `{γ_ra < γ_th}` is `y = Q(x)` and the boundary of
//! `{γ_rb < γ_th}` is its mirror image `x = Q(y)`. Their intersections are
//! the positive roots of a quartic.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::system::{derive_constants, SystemParams};

const MAX_ITERATIONS: usize = 500;
const IMAG_TOL: f64 = 1e-9;
const POSITIVE_TOL: f64 = 1e-12;
const COINCIDENT_TOL: f64 = 1e-7;
const POLISH_CLUSTER_TOL: f64 = 1e-5;
const RESIDUAL_TOL: f64 = 1e-9;
const XIN_MATCH_TOL: f64 = 1e-6;

/// `Q(x) = c·x + e + f/x` and the lower branch of its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Curves {
    /// `ρ γ_th I2 I4`
    pub c: f64,
    /// `γ_th I3 I4`
    pub e: f64,
    /// `γ_th I4`
    pub f: f64,
}

impl Curves {
    pub fn new(rho: f64, gamma_th: f64, i2: f64, i3: f64, i4: f64) -> Self {
        Self {
            c: rho * gamma_th * i2 * i4,
            e: gamma_th * i3 * i4,
            f: gamma_th * i4,
        }
    }

    /// `Q(x) = I4 γ_th (ρ I2 x + I3 + 1/x)`.
    #[inline]
    pub fn q(&self, x: f64) -> f64 {
        self.c * x + self.e + self.f / x
    }

    /// `G(x)`, the smaller solution `t` of `Q(t) = x`; NaN where it does not
    /// exist.
    ///
    /// Evaluated in the rationalized form `2f / (d + √(d² - 4cf))`, `d = x - e`,
    /// which stays accurate as `c → 0`.
    #[inline]
    pub fn g(&self, x: f64) -> f64 {
        let d = x - self.e;
        let disc = d * d - 4.0 * self.c * self.f;
        if d <= 0.0 || disc < 0.0 {
            return f64::NAN;
        }
        2.0 * self.f / (d + disc.sqrt())
    }
}

/// Number of distinct positive intersections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RootCase {
    OneRoot,
    ThreeRoots,
}

/// Result of the intersection analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticAnalysis {
    /// `c0..c4`, ascending powers.
    pub coefficients: [f64; 5],
    pub positive_real_roots: Vec<f64>,
    /// The on-diagonal intersection `Q(x_in) = x_in`.
    pub x_in: f64,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    /// `max{x1, x2}`
    pub phi1: Option<f64>,
    /// `max{Q(x1), Q(x2)}`
    pub phi2: Option<f64>,
    pub case: RootCase,
    pub curves: Curves,
    /// `(K1, K2) = (G(m), Q(m))` at `m = (x_in + Φ1)/2`.
    pub gate: Option<(f64, f64)>,
}

/// Coefficients `c0..c4` of the intersection quartic.
pub fn quartic_coefficients(rho: f64, gamma_th: f64, i2: f64, i3: f64, i4: f64) -> [f64; 5] {
    let g = gamma_th;
    let c = rho * g * i2 * i4;
    [
        rho * i2 * i4 * i4 * g * g * g,
        i3 * i4 * g * g * (1.0 + 2.0 * c),
        i4 * g * g * (c * i3 * i3 + 2.0 * g * i4 * rho * rho * i2 * i2 + i3 * i3),
        i3 * g * (2.0 * c * c + c - 1.0),
        rho * g * i2 * (c * c - 1.0),
    ]
}

/// Closed-form on-diagonal intersection
/// `(-I3γ - √((I3γ)² - 4ργ(2I2γ - I1))) / (2ρ(2I2γ - I1))`.
pub fn x_in_closed_form(rho: f64, gamma_th: f64, i1: f64, i2: f64, i3: f64) -> f64 {
    let a = 2.0 * i2 * gamma_th - i1;
    let b = i3 * gamma_th;
    (-b - (b * b - 4.0 * rho * gamma_th * a).sqrt()) / (2.0 * rho * a)
}

/// Evaluates `Σ a_k x^k` (ascending coefficients) by Horner's rule.
pub fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn eval_complex(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of `Σ a_k x^k` by Aberth–Ehrlich simultaneous
/// iteration, with multiplicity.
///
/// Exact zero leading coefficients lower the degree; exact zero trailing
/// coefficients contribute roots at 0.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Quartic("non-finite coefficient".into()));
    }
    let hi = coeffs
        .iter()
        .rposition(|&c| c != 0.0)
        .ok_or_else(|| Error::Quartic("zero polynomial".into()))?;
    let lo = coeffs.iter().position(|&c| c != 0.0).unwrap_or(0);
    let mut roots = vec![Complex64::new(0.0, 0.0); lo];
    let core = &coeffs[lo..=hi];
    let n = core.len() - 1;
    if n == 0 {
        return Ok(roots);
    }

    // Substitute x = s·w so the roots are of order one.
    let s = (core[0].abs() / core[n].abs()).powf(1.0 / n as f64);
    let mut scaled: Vec<f64> = core
        .iter()
        .enumerate()
        .map(|(k, &a)| a * s.powi(k as i32))
        .collect();
    let norm = scaled.iter().fold(0.0f64, |m, a| m.max(a.abs()));
    scaled.iter_mut().for_each(|a| *a /= norm);

    let mut w: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..MAX_ITERATIONS {
        let mut largest = 0.0f64;
        for j in 0..n {
            let (p, dp) = eval_complex(&scaled, w[j]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&k| k != j)
                .map(|k| 1.0 / (w[j] - w[k]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                w[j] -= step;
                largest = largest.max(step.norm() / w[j].norm().max(1e-300));
            }
        }
        if largest < 1e-15 {
            break;
        }
    }

    let unscaled: Vec<Complex64> = w.iter().map(|&wj| wj * s).collect();
    // Simultaneous iteration resolves a k-fold root only to about eps^(1/k),
    // so candidate clusters are formed with a looser tolerance here.
    for (center, members) in cluster(&unscaled, POLISH_CLUSTER_TOL) {
        let k = members.len();
        let mut d = core.to_vec();
        for _ in 1..k {
            d = derivative(&d);
        }
        // A k-fold root is a simple root of the (k-1)-th derivative.
        let z = newton(&d, center);
        let merged_residual = eval_complex(core, z).0.norm();
        let separate: Vec<Complex64> = members.iter().map(|&m| newton(core, m)).collect();
        let separate_residual = separate
            .iter()
            .map(|&m| eval_complex(core, m).0.norm())
            .fold(0.0, f64::max);
        if k == 1 || merged_residual > separate_residual {
            roots.extend(separate);
        } else {
            roots.extend(std::iter::repeat_n(z, k));
        }
    }
    Ok(roots)
}

fn newton(coeffs: &[f64], start: Complex64) -> Complex64 {
    let mut z = start;
    for _ in 0..4 {
        let (p, dp) = eval_complex(coeffs, z);
        let step = p / dp;
        if !step.is_finite() || step.norm() > 1e-6 * z.norm() {
            break;
        }
        z -= step;
    }
    z
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &a)| k as f64 * a)
        .collect()
}

/// Groups roots within relative distance `tol`; returns cluster means and
/// members.
fn cluster(roots: &[Complex64], tol: f64) -> Vec<(Complex64, Vec<Complex64>)> {
    let mut clusters: Vec<(Complex64, Vec<Complex64>)> = Vec::new();
    for &r in roots {
        match clusters
            .iter_mut()
            .find(|(c, _)| (r - *c).norm() <= tol * r.norm().max(c.norm()))
        {
            Some((c, members)) => {
                members.push(r);
                *c = members.iter().sum::<Complex64>() / members.len() as f64;
            }
            None => clusters.push((r, vec![r])),
        }
    }
    clusters
}

/// Distinct real positive roots, sorted. Roots closer than the coincidence
/// tolerance count once.
pub fn positive_real_roots(roots: &[Complex64]) -> Vec<f64> {
    let mut out: Vec<f64> = cluster(roots, COINCIDENT_TOL)
        .into_iter()
        .map(|(r, _)| r)
        .filter(|r| r.im.abs() <= IMAG_TOL * (1.0 + r.re.abs()) && r.re > POSITIVE_TOL)
        .map(|r| r.re)
        .collect();
    out.sort_by(f64::total_cmp);
    out
}

/// Intersection analysis of the two boundary curves.
///
/// Only defined when `γ_th < I1/(2 I2)`.
pub fn quartic_analysis(p: &SystemParams) -> Result<QuarticAnalysis> {
    let c = derive_constants(p)?;
    if c.gamma_th >= c.rcc_threshold {
        return Err(domain(
            "quartic_analysis",
            format!(
                "needs gamma_th < I1/(2 I2) = {}, got {}",
                c.rcc_threshold, c.gamma_th
            ),
        ));
    }
    let i4 = c.i4.ok_or_else(|| Error::Quartic("I4 undefined".into()))?;
    let coefficients = quartic_coefficients(p.rho, c.gamma_th, c.i2, c.i3, i4);
    let curves = Curves::new(p.rho, c.gamma_th, c.i2, c.i3, i4);
    let x_in_ref = x_in_closed_form(p.rho, c.gamma_th, c.i1, c.i2, c.i3);
    analyze(coefficients, curves, x_in_ref)
}

pub(crate) fn analyze(
    coefficients: [f64; 5],
    curves: Curves,
    x_in_ref: f64,
) -> Result<QuarticAnalysis> {
    let roots = polynomial_roots(&coefficients)?;
    let positive = positive_real_roots(&roots);

    let scale = coefficients.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    for &r in &positive {
        let residual = eval_poly(&coefficients, r).abs();
        if residual > RESIDUAL_TOL * scale * r.powi(4).max(1.0) {
            return Err(Error::Quartic(format!("root {r} has residual {residual}")));
        }
    }

    let (idx, x_in) = positive
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| (a.1 - x_in_ref).abs().total_cmp(&(b.1 - x_in_ref).abs()))
        .ok_or_else(|| Error::Quartic("no positive real root".into()))?;
    if (x_in - x_in_ref).abs() > XIN_MATCH_TOL * x_in_ref.abs() {
        return Err(Error::Quartic(format!(
            "closed-form x_in {x_in_ref} not among the roots (nearest {x_in})"
        )));
    }

    let others: Vec<f64> = positive
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != idx)
        .map(|(_, &r)| r)
        .collect();
    match others.as_slice() {
        [] => Ok(QuarticAnalysis {
            coefficients,
            positive_real_roots: positive,
            x_in,
            x1: None,
            x2: None,
            phi1: None,
            phi2: None,
            case: RootCase::OneRoot,
            curves,
            gate: None,
        }),
        &[x1, x2] => {
            let phi1 = x1.max(x2);
            let phi2 = curves.q(x1).max(curves.q(x2));
            let mid = 0.5 * (x_in + phi1);
            Ok(QuarticAnalysis {
                coefficients,
                positive_real_roots: positive,
                x_in,
                x1: Some(x1),
                x2: Some(x2),
                phi1: Some(phi1),
                phi2: Some(phi2),
                case: RootCase::ThreeRoots,
                curves,
                gate: Some((curves.g(mid), curves.q(mid))),
            })
        }
        _ => Err(Error::Quartic(format!(
            "unexpected positive root count {}",
            positive.len()
        ))),
    }
}

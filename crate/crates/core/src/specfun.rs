//! Special-function kernel for the closed-form outage expressions.
//!
//! Everything here is restricted to the integer shapes and orders that the
//! finite-sum closed forms need: incomplete gamma functions of integer shape,
//! modified Bessel functions of the second kind of integer order, binomial
//! coefficients and Gauss–Chebyshev nodes.

use std::f64::consts::PI;

use crate::error::{domain, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `n!` as a float. Exact for `n <= 22`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `ln(n!)`.
pub fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Binomial coefficient `C(n, k)`, exact for every `n <= 64`.
///
/// Returns 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc == C(n, i) here, and C(n, i) * (n - i) is divisible by i + 1.
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).unwrap_or(u64::MAX)
}

fn check_gamma_args(func: &'static str, m: u32, z: f64) -> Result<()> {
    if m == 0 {
        return Err(domain(func, "shape must be a positive integer"));
    }
    if !(z >= 0.0) || z.is_infinite() {
        return Err(domain(
            func,
            format!("argument must be finite and >= 0, got {z}"),
        ));
    }
    Ok(())
}

/// Regularized upper incomplete gamma `Q(m, z) = Γ(m, z) / Γ(m)`:
/// `e^{-z} Σ_{l<m} z^l / l!`.
pub fn gamma_q_int(m: u32, z: f64) -> Result<f64> {
    check_gamma_args("gamma_q_int", m, z)?;
    Ok(q_unchecked(m, z))
}

fn q_unchecked(m: u32, z: f64) -> f64 {
    if z < m as f64 + 1.0 {
        1.0 - p_unchecked(m, z)
    } else {
        q_finite_sum(m, z)
    }
}

/// Regularized lower incomplete gamma `P(m, z) = γ(m, z) / Γ(m)`.
pub fn gamma_p_int(m: u32, z: f64) -> Result<f64> {
    check_gamma_args("gamma_p_int", m, z)?;
    Ok(p_unchecked(m, z))
}

fn q_finite_sum(m: u32, z: f64) -> f64 {
    if z == 0.0 {
        return 1.0;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for l in 1..m {
        term *= z / l as f64;
        sum += term;
    }
    // Keeps e^{-z} * sum representable when both factors are extreme.
    if z > 700.0 {
        (sum.ln() - z).exp()
    } else {
        (-z).exp() * sum
    }
}

fn p_unchecked(m: u32, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let mf = m as f64;
    if z >= mf + 1.0 {
        return 1.0 - q_finite_sum(m, z);
    }
    // z^m e^{-z} / m! * Σ_k z^k / ((m+1)...(m+k)); the finite-sum complement
    // cancels catastrophically in this range.
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut denom = mf;
    for _ in 0..500 {
        denom += 1.0;
        term *= z / denom;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    let log_prefactor = mf * z.ln() - z - ln_factorial(m);
    (log_prefactor + sum.ln()).exp().min(1.0)
}

/// Lower incomplete gamma `γ(m, z) = ∫_0^z u^{m-1} e^{-u} du` for integer `m`.
pub fn lower_incomplete_gamma_int(m: u32, z: f64) -> Result<f64> {
    check_gamma_args("lower_incomplete_gamma_int", m, z)?;
    Ok(factorial(m - 1) * p_unchecked(m, z))
}

/// Upper incomplete gamma `Γ(m, z) = (m-1)! e^{-z} Σ_{l<m} z^l / l!`.
pub fn upper_incomplete_gamma_int(m: u32, z: f64) -> Result<f64> {
    check_gamma_args("upper_incomplete_gamma_int", m, z)?;
    Ok(factorial(m - 1) * q_unchecked(m, z))
}

/// Exponentially scaled `e^z K_0(z)` and `e^z K_1(z)`.
fn bessel_k01_scaled(z: f64) -> (f64, f64) {
    if z <= 2.0 {
        let (k0, k1) = bessel_k01_series(z);
        let s = z.exp();
        (k0 * s, k1 * s)
    } else {
        bessel_k01_steed(z)
    }
}

/// Power series with logarithmic term, used on `(0, 2]`.
fn bessel_k01_series(z: f64) -> (f64, f64) {
    let y = 0.25 * z * z;
    let log_half = (0.5 * z).ln();

    // t0 = y^k / (k!)^2, t1 = y^k / (k! (k+1)!)
    let mut t0 = 1.0;
    let mut t1 = 1.0;
    let mut i0 = 1.0;
    let mut i1_sum = 1.0;
    let mut harmonic = 0.0;
    let mut k0_tail = 0.0;
    // psi(k+1) + psi(k+2) at k = 0
    let mut k1_tail = 1.0 - 2.0 * EULER_GAMMA;
    for k in 1..100u32 {
        let kf = k as f64;
        t0 *= y / (kf * kf);
        t1 *= y / (kf * (kf + 1.0));
        harmonic += 1.0 / kf;
        i0 += t0;
        i1_sum += t1;
        k0_tail += harmonic * t0;
        k1_tail += (2.0 * harmonic + 1.0 / (kf + 1.0) - 2.0 * EULER_GAMMA) * t1;
        if t0 < 1e-18 * i0 && t1 < 1e-18 * i1_sum {
            break;
        }
    }
    let i1 = 0.5 * z * i1_sum;
    let k0 = -(log_half + EULER_GAMMA) * i0 + k0_tail;
    let k1 = 1.0 / z + log_half * i1 - 0.25 * z * k1_tail;
    (k0, k1)
}

/// Steed's evaluation of the second continued fraction for order 0,
/// returning scaled values; used on `(2, ∞)`.
fn bessel_k01_steed(z: f64) -> (f64, f64) {
    const A1: f64 = 0.25;
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut h = d;
    let mut delh = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = A1;
    let mut c = A1;
    let mut a = -A1;
    let mut s = 1.0 + q * delh;
    for i in 2..10_000u32 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < 1e-16 {
            break;
        }
    }
    h *= A1;
    let k0 = (PI / (2.0 * z)).sqrt() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    (k0, k1)
}

fn check_bessel_arg(func: &'static str, z: f64) -> Result<()> {
    if !(z > 0.0) || z.is_infinite() {
        return Err(domain(
            func,
            format!("argument must be finite and > 0, got {z}"),
        ));
    }
    Ok(())
}

/// Exponentially scaled modified Bessel function `e^z K_n(z)`.
///
/// Orders above 1 come from upward recurrence, which is stable for `K`.
pub fn bessel_k_int_scaled(n: u32, z: f64) -> Result<f64> {
    check_bessel_arg("bessel_k_int_scaled", z)?;
    let (k0, k1) = bessel_k01_scaled(z);
    if n == 0 {
        return Ok(k0);
    }
    let (mut lo, mut hi) = (k0, k1);
    for j in 1..n {
        let next = lo + (2.0 * j as f64 / z) * hi;
        lo = hi;
        hi = next;
    }
    Ok(hi)
}

/// Modified Bessel function of the second kind `K_n(z)` of integer order.
pub fn bessel_k_int(n: u32, z: f64) -> Result<f64> {
    check_bessel_arg("bessel_k_int", z)?;
    let scaled = bessel_k_int_scaled(n, z)?;
    Ok(if z < 700.0 {
        scaled * (-z).exp()
    } else {
        (scaled.ln() - z).exp()
    })
}

/// `ln K_n(z)`, finite for any representable `z > 0`.
pub fn ln_bessel_k_int(n: u32, z: f64) -> Result<f64> {
    check_bessel_arg("ln_bessel_k_int", z)?;
    Ok(bessel_k_int_scaled(n, z)?.ln() - z)
}

/// Nodes `v_n = cos((2n-1)π / 2N)`, `n = 1..N`, of an `N`-point
/// Gauss–Chebyshev rule.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevNodes {
    order: usize,
    nodes: Vec<f64>,
}

impl ChebyshevNodes {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Strictly decreasing in `n`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Approximates `∫_a^b f(x) dx` as
    /// `(b-a)/2 · π/N · Σ √(1-v_n²) f((b-a)/2 · v_n + (b+a)/2)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let sum: f64 = self
            .nodes
            .iter()
            .map(|&v| (1.0 - v * v).sqrt() * f(half * v + mid))
            .sum();
        half * PI / self.order as f64 * sum
    }
}

pub fn chebyshev_nodes(order: usize) -> Result<ChebyshevNodes> {
    if order == 0 {
        return Err(domain("chebyshev_nodes", "order must be >= 1"));
    }
    let nf = order as f64;
    let nodes = (1..=order)
        .map(|n| {
            let v = ((2 * n - 1) as f64 * PI / (2.0 * nf)).cos();
            // cos(π/2) is 6e-17 in floating point; the midpoint is exactly 0.
            if 2 * n - 1 == order {
                0.0
            } else {
                v
            }
        })
        .collect();
    Ok(ChebyshevNodes { order, nodes })
}

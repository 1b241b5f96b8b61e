#![allow(dead_code)]

//! Independent numerical oracles shared by the integration tests.

/// Adaptive Simpson quadrature with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // Probe a few interior points so a narrow bump is not missed.
    let probe: f64 = (1..16)
        .map(|i| f(a + (b - a) * i as f64 / 16.0).abs())
        .sum::<f64>()
        * (b - a)
        / 16.0;
    let tol = rel_tol * whole.abs().max(probe).max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `∫_a^b f` split at the given interior breakpoints.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: &F, points: &[f64], rel_tol: f64) -> f64 {
    points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| adaptive_simpson(f, w[0], w[1], rel_tol))
        .sum()
}

/// `ln Γ(m)` for positive integer `m`.
pub fn ln_gamma_int(m: u32) -> f64 {
    (1..m).map(|k| (k as f64).ln()).sum()
}

/// `∫_0^z u^{m-1} e^{-u} du` by quadrature.
pub fn lower_gamma_oracle(m: u32, z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    let f = |u: f64| {
        if u == 0.0 {
            if m == 1 {
                1.0
            } else {
                0.0
            }
        } else {
            ((m as f64 - 1.0) * u.ln() - u).exp()
        }
    };
    adaptive_simpson(&f, 0.0, z, 1e-13)
}

/// `e^z K_n(z) = ∫_0^∞ e^{-z(cosh t - 1)} cosh(nt) dt` by quadrature.
pub fn scaled_bessel_k_oracle(n: u32, z: f64) -> f64 {
    let nf = n as f64;
    let expo = |t: f64| nf * t - z * (t.cosh() - 1.0);
    let t_star = (nf / z).asinh();
    let peak = expo(t_star).max(0.0);
    let mut t_end = t_star + 1.0;
    while expo(t_end) > peak - 60.0 {
        t_end += 0.25;
    }
    let f = |t: f64| {
        let a = -z * (t.cosh() - 1.0);
        0.5 * ((a + nf * t - peak).exp() + (a - nf * t - peak).exp())
    };
    integrate_pieces(&f, &[0.0, t_star, t_end], 1e-13) * peak.exp()
}

/// Gamma density and distribution function for integer shape.
#[derive(Clone, Copy, Debug)]
pub struct Gam {
    pub m: u32,
    pub theta: f64,
}

impl Gam {
    pub fn pdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return if self.m == 1 { 1.0 / self.theta } else { 0.0 };
        }
        let m = self.m as f64;
        ((m - 1.0) * v.ln() - v / self.theta - ln_gamma_int(self.m) - m * self.theta.ln()).exp()
    }

    /// Distribution function from the finite series, computed independently
    /// of the crate.
    pub fn cdf(&self, v: f64) -> f64 {
        if v <= 0.0 {
            return 0.0;
        }
        if !v.is_finite() {
            return 1.0;
        }
        let z = v / self.theta;
        if z < self.m as f64 + 1.0 {
            // Series z^m e^{-z}/m! Σ z^k/((m+1)..(m+k))
            let mut term = 1.0;
            let mut sum = 1.0;
            let mut d = self.m as f64;
            for _ in 0..400 {
                d += 1.0;
                term *= z / d;
                sum += term;
            }
            (self.m as f64 * z.ln() - z - ln_gamma_int(self.m + 1)).exp() * sum
        } else {
            let mut term = 1.0;
            let mut sum = 1.0;
            for l in 1..self.m {
                term *= z / l as f64;
                sum += term;
            }
            1.0 - (-z).exp() * sum
        }
    }

    /// Upper end beyond which the density is negligible.
    pub fn support_end(&self) -> f64 {
        self.theta * (self.m as f64 + 80.0)
    }
}

/// Unit-scale gamma distribution function of any shape `a > 0` at ascending
/// points. The density is integrated between neighbours in `t = u^a`, where
/// it becomes `e^{-t^{1/a}}` (no singularity at 0 for `a < 1`).
pub fn unit_gamma_cdf_sorted(a: f64, sorted: &[f64]) -> Vec<f64> {
    let g = |t: f64| (-t.powf(1.0 / a)).exp();
    let total = integrate_pieces(
        &g,
        &[0.0, 1.0, (a + 10.0).powf(a), (a + 80.0).powf(a)],
        1e-12,
    );
    let mut acc = 0.0;
    let mut prev = 0.0;
    sorted
        .iter()
        .map(|&v| {
            let t = v.max(0.0).powf(a);
            if t > prev {
                acc += adaptive_simpson(&g, prev, t, 1e-10);
                prev = t;
            }
            (acc / total).min(1.0)
        })
        .collect()
}

/// Kolmogorov–Smirnov distance of ascending samples from distribution
/// values at those samples.
pub fn ks_distance(cdf_at_sorted: &[f64]) -> f64 {
    let n = cdf_at_sorted.len() as f64;
    cdf_at_sorted
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs()))
        .fold(0.0, f64::max)
}

/// Constants of the relaying-link boundary `y = Q(x)`.
#[derive(Clone, Copy, Debug)]
pub struct Boundary {
    pub c: f64,
    pub e: f64,
    pub f: f64,
}

impl Boundary {
    pub fn from_params(p: &hiswipt::SystemParams) -> Option<Self> {
        let k = hiswipt::system::derive_constants(p).ok()?;
        let i4 = k.i4?;
        let g = k.gamma_th;
        Some(Self {
            c: p.rho * g * k.i2 * i4,
            e: g * k.i3 * i4,
            f: g * i4,
        })
    }

    pub fn q(&self, x: f64) -> f64 {
        self.c * x + self.e + self.f / x
    }

    /// Solutions of `Q(y) = x` as `(lower, upper)`; `None` when `Q(y) > x`
    /// for every `y`.
    pub fn inverse(&self, x: f64) -> Option<(f64, f64)> {
        let d = x - self.e;
        if self.c == 0.0 {
            return (d > 0.0).then(|| (self.f / d, f64::INFINITY));
        }
        let disc = d * d - 4.0 * self.c * self.f;
        if d <= 0.0 || disc <= 0.0 {
            return None;
        }
        let s = disc.sqrt();
        Some((2.0 * self.f / (d + s), (d + s) / (2.0 * self.c)))
    }
}

fn breakpoints(x: Gam, extra: &[f64]) -> Vec<f64> {
    let mut pts = vec![0.0, x.theta * (x.m as f64 - 1.0).max(0.1), x.support_end()];
    pts.extend(
        extra
            .iter()
            .copied()
            .filter(|v| v.is_finite() && *v > 0.0 && *v < x.support_end()),
    );
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// `Pr(Y < Q(X))` by quadrature.
pub fn relay_outage_oracle(x: Gam, y: Gam, b: Boundary) -> f64 {
    let f = |v: f64| {
        if v <= 0.0 {
            0.0
        } else {
            x.pdf(v) * y.cdf(b.q(v))
        }
    };
    let x_star = (b.f / b.c).sqrt();
    integrate_pieces(&f, &breakpoints(x, &[x_star, 0.5 * x_star]), 1e-11)
}

/// `Pr(Y < Q(X), X < Q(Y))` by quadrature over the exact region.
pub fn joint_outage_oracle(x: Gam, y: Gam, b: Boundary, x_in: f64) -> f64 {
    let f = |v: f64| {
        if v <= 0.0 {
            return 0.0;
        }
        let upper = b.q(v);
        let inner = match b.inverse(v) {
            None => y.cdf(upper),
            Some((lo, hi)) => y.cdf(upper.min(lo)) + (y.cdf(upper) - y.cdf(hi)).max(0.0),
        };
        x.pdf(v) * inner
    };
    let kink = b.e + 2.0 * (b.c * b.f).sqrt();
    integrate_pieces(
        &f,
        &breakpoints(x, &[x_in, kink, 0.5 * x_in, 2.0 * x_in]),
        1e-11,
    )
}

/// Property-test configuration without on-disk regression files.
pub fn prop_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases,
        failure_persistence: None,
        ..Default::default()
    }
}

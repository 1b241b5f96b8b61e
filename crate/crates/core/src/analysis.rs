//! Sweeps, optimizers and derived metrics on top of the two engines.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{classify_regime, system_outage, Regime};
use crate::error::{invalid, Error, Result};
use crate::montecarlo::estimate_outage_tdbc;
use crate::system::SystemParams;

/// Parameter swept by [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    Rho,
    Beta,
    KAve,
    GammaTh,
    /// Relay position; `d_br = d_ab - d_ar`.
    DAr,
    RTh,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 6] = [
        SweepAxis::Rho,
        SweepAxis::Beta,
        SweepAxis::KAve,
        SweepAxis::GammaTh,
        SweepAxis::DAr,
        SweepAxis::RTh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Rho => "rho",
            SweepAxis::Beta => "beta",
            SweepAxis::KAve => "k_ave",
            SweepAxis::GammaTh => "gamma_th",
            SweepAxis::DAr => "d_ar",
            SweepAxis::RTh => "R_th",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SweepAxis::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid("axis", format!("unknown axis `{s}`")))
    }
}

/// Which engines a sweep runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Engine {
    #[default]
    Analytic,
    Mc,
    Both,
}

impl Engine {
    pub fn analytic(self) -> bool {
        matches!(self, Engine::Analytic | Engine::Both)
    }

    pub fn mc(self) -> bool {
        matches!(self, Engine::Mc | Engine::Both)
    }
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Engine::Analytic),
            "mc" => Ok(Engine::Mc),
            "both" => Ok(Engine::Both),
            _ => Err(invalid(
                "engine",
                format!("expected analytic, mc or both, got `{s}`"),
            )),
        }
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub p_out_analytic: Option<f64>,
    pub p_out_mc: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub regime: Option<Regime>,
    pub extras: BTreeMap<String, f64>,
    /// Set when this point could not be evaluated.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(axis: SweepAxis, axis_value: f64, err: Error) -> Self {
        Self {
            axis,
            axis_value,
            p_out_analytic: None,
            p_out_mc: None,
            mc_stderr: None,
            regime: None,
            extras: BTreeMap::new(),
            error: Some(err.to_string()),
        }
    }
}

/// `p` with `axis` set to `value`.
pub fn apply_axis(p: &SystemParams, axis: SweepAxis, value: f64) -> Result<SystemParams> {
    if !value.is_finite() {
        return Err(invalid(
            "axis_value",
            format!("must be finite, got {value}"),
        ));
    }
    let q = match axis {
        SweepAxis::Rho => SystemParams {
            rho: value,
            ..p.clone()
        },
        SweepAxis::Beta => SystemParams {
            beta: value,
            ..p.clone()
        },
        SweepAxis::KAve => p.clone().with_k_ave(value),
        SweepAxis::GammaTh => p.clone().with_gamma_th(value)?,
        SweepAxis::DAr => p.clone().with_relay_position(value)?,
        SweepAxis::RTh => SystemParams {
            r_th: value,
            ..p.clone()
        },
    };
    q.validate()?;
    Ok(q)
}

fn sweep_point(
    p: &SystemParams,
    axis: SweepAxis,
    value: f64,
    engine: Engine,
    mc_n: u64,
    seed: u64,
) -> Result<SweepRow> {
    let q = apply_axis(p, axis, value)?;
    let mut row = SweepRow {
        axis,
        axis_value: value,
        p_out_analytic: None,
        p_out_mc: None,
        mc_stderr: None,
        regime: Some(classify_regime(&q)?),
        extras: BTreeMap::new(),
        error: None,
    };
    if engine.analytic() {
        let r = system_outage(&q)?;
        row.p_out_analytic = Some(r.p_out);
        row.extras.insert("ee".into(), ee_from_outage(&q, r.p_out));
        if r.p_out < 1e-7 && engine.mc() {
            log::warn!(
                "{axis}={value}: analytic outage {} is below Monte Carlo resolution",
                r.p_out
            );
        }
    }
    if engine.mc() {
        let e = estimate_outage_tdbc(&q, mc_n, seed)?;
        row.p_out_mc = Some(e.p_hat);
        row.mc_stderr = Some(e.stderr);
    }
    Ok(row)
}

/// Evaluates the engines at every grid point, in grid order.
///
/// A point that fails yields a row with `error` set; the sweep continues.
/// All points share `seed`.
pub fn sweep(
    p: &SystemParams,
    axis: SweepAxis,
    grid: &[f64],
    engine: Engine,
    mc_n: u64,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(invalid("grid", "must contain at least one point"));
    }
    Ok(grid
        .par_iter()
        .map(|&v| {
            sweep_point(p, axis, v, engine, mc_n, seed)
                .unwrap_or_else(|e| SweepRow::failed(axis, v, e))
        })
        .collect())
}

/// Outcome of [`optimal_beta`].
#[derive(Debug, Clone, PartialEq)]
pub struct BetaOptimum {
    /// `None` when the outage does not depend on β.
    pub beta_opt: Option<f64>,
    pub p_out_min: f64,
    pub degenerate: bool,
    /// `(β, p_out)` of the coarse grid.
    pub coarse: Vec<(f64, f64)>,
}

const BETA_LO: f64 = 0.01;
const BETA_HI: f64 = 0.99;
const BETA_TOL: f64 = 1e-5;

/// Minimizes the analytic outage over β: a coarse grid of `resolution`
/// points on `[0.01, 0.99]`, then golden-section search on the bracket
/// around the best grid point.
pub fn optimal_beta(p: &SystemParams, resolution: usize) -> Result<BetaOptimum> {
    if resolution < 16 {
        return Err(invalid(
            "resolution",
            format!("must be >= 16, got {resolution}"),
        ));
    }
    let at = |beta: f64| -> Result<f64> {
        Ok(system_outage(&apply_axis(p, SweepAxis::Beta, beta)?)?.p_out)
    };

    // The ceilings do not depend on β, so neither does the regime.
    let regime = classify_regime(p)?;
    if regime != Regime::Cooperative {
        return Ok(BetaOptimum {
            beta_opt: None,
            p_out_min: at(p.beta)?,
            degenerate: true,
            coarse: Vec::new(),
        });
    }

    let step = (BETA_HI - BETA_LO) / (resolution - 1) as f64;
    let betas: Vec<f64> = (0..resolution).map(|i| BETA_LO + step * i as f64).collect();
    let coarse = betas
        .par_iter()
        .map(|&b| at(b).map(|v| (b, v)))
        .collect::<Result<Vec<_>>>()?;
    let best = (0..coarse.len())
        .min_by(|&a, &b| coarse[a].1.total_cmp(&coarse[b].1))
        .expect("nonempty grid");

    let mut lo = coarse[best.saturating_sub(1)].0;
    let mut hi = coarse[(best + 1).min(coarse.len() - 1)].0;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (at(c)?, at(d)?);
    while hi - lo > BETA_TOL {
        if fc <= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = at(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = at(d)?;
        }
    }
    let (mut beta_opt, mut p_min) = if fc <= fd { (c, fc) } else { (d, fd) };
    if coarse[best].1 < p_min {
        (beta_opt, p_min) = coarse[best];
    }
    Ok(BetaOptimum {
        beta_opt: Some(beta_opt),
        p_out_min: p_min,
        degenerate: false,
        coarse,
    })
}

/// Outcome of [`diversity_slope`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiversityFit {
    /// Negated least-squares slope of `log10 p_out` against `log10 ρ`.
    pub slope: f64,
    /// Outage was certain over the whole window.
    pub full_outage: bool,
    /// `(ρ, p_out)` of the fitted points.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Negated log-log slope of `(ρ, p)` samples.
pub fn fit_diversity(points: &[(f64, f64)]) -> Result<f64> {
    if points.iter().any(|&(r, v)| !(r > 0.0) || !(v > 0.0)) {
        return Err(Error::Undefined(
            "log-log fit needs positive SNR and outage values".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    Ok(-least_squares_slope(&xs, &ys))
}

/// Empirical diversity order from the analytic outage at `points`
/// log-spaced SNRs in `[lo, hi]`.
pub fn diversity_slope(
    p: &SystemParams,
    rho_window: (f64, f64),
    points: usize,
) -> Result<DiversityFit> {
    let (lo, hi) = rho_window;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(invalid(
            "rho_window",
            format!("need 0 < lo < hi, got ({lo}, {hi})"),
        ));
    }
    if points < 4 {
        return Err(invalid("points", format!("must be >= 4, got {points}")));
    }
    let (llo, lhi) = (lo.log10(), hi.log10());
    let samples = (0..points)
        .into_par_iter()
        .map(|i| {
            let rho = 10f64.powf(llo + (lhi - llo) * i as f64 / (points - 1) as f64);
            system_outage(&SystemParams { rho, ..p.clone() }).map(|r| (rho, r.p_out))
        })
        .collect::<Result<Vec<_>>>()?;
    if samples.iter().all(|&(_, v)| v == 1.0) {
        return Ok(DiversityFit {
            slope: 0.0,
            full_outage: true,
            points: samples,
        });
    }
    Ok(DiversityFit {
        slope: fit_diversity(&samples)?,
        full_outage: false,
        points: samples,
    })
}

fn ee_from_outage(p: &SystemParams, p_out: f64) -> f64 {
    3.0 * (1.0 - p_out) * p.r_th / (2.0 * p.tx_power())
}

/// Energy efficiency `3(1 - P_out) R_th / (2 P_o)` from the analytic outage.
pub fn energy_efficiency(p: &SystemParams) -> Result<f64> {
    Ok(ee_from_outage(p, system_outage(p)?.p_out))
}

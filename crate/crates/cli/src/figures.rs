//! Figure presets: each pins its caption parameters, then sweeps one axis for
//! a handful of series.

use anyhow::Result;
use clap::ValueEnum;
use hiswipt::analysis::{optimal_beta, sweep, SweepRow};
use hiswipt::analytic::{diversity_gain, system_outage};
use hiswipt::montecarlo::{estimate_outage_with, relative_error, Execution};
use hiswipt::{Engine, Protocol, SweepAxis, SystemParams};
use rayon::prelude::*;

use crate::config::{db_to_linear, ScenarioConfig};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum FigureId {
    #[value(name = "fig4a")]
    Fig4a,
    #[value(name = "fig4b")]
    Fig4b,
    #[value(name = "fig5")]
    Fig5,
    #[value(name = "fig6")]
    Fig6,
    #[value(name = "fig7")]
    Fig7,
    #[value(name = "fig8")]
    Fig8,
    #[value(name = "fig9")]
    Fig9,
    #[value(name = "fig10")]
    Fig10,
    #[value(name = "fig11")]
    Fig11,
    #[value(name = "fig12")]
    Fig12,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig4a => "fig4a",
            FigureId::Fig4b => "fig4b",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
            FigureId::Fig10 => "fig10",
            FigureId::Fig11 => "fig11",
            FigureId::Fig12 => "fig12",
        }
    }

    /// Parameters fixed by the caption, applied beneath user settings.
    pub fn preset(self) -> &'static [(&'static str, &'static str)] {
        match self {
            FigureId::Fig4a | FigureId::Fig4b => {
                &[("k_ave", "0.1"), ("m_a", "2"), ("m_b", "2"), ("m_d", "1")]
            }
            FigureId::Fig5 => &[("R_th", "0.5")],
            FigureId::Fig6 => &[("k_ave", "0.1")],
            FigureId::Fig7 | FigureId::Fig10 => &[("R_th", "0.5"), ("rho_db", "50")],
            FigureId::Fig8 => &[("R_th", "1.5"), ("rho_db", "50")],
            FigureId::Fig9 => &[("rho_db", "50")],
            FigureId::Fig11 => &[("k_ave", "0.1"), ("R_th", "0.5"), ("rho_db", "50")],
            FigureId::Fig12 => &[("m_a", "2"), ("m_b", "2"), ("m_d", "1")],
        }
    }

    /// Engine used when none is configured.
    pub fn default_engine(self) -> Engine {
        match self {
            FigureId::Fig4a | FigureId::Fig4b | FigureId::Fig5 => Engine::Both,
            _ => Engine::Analytic,
        }
    }
}

/// Run controls resolved from flags and config.
#[derive(Debug, Clone, Copy)]
pub struct RunControls {
    pub engine: Engine,
    pub mc_n: u64,
    pub seed: u64,
}

/// A figure's table plus the grid points that failed.
#[derive(Debug)]
pub struct FigureOutput {
    pub table: Table,
    pub errors: Vec<String>,
}

fn lin(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn with(p: &SystemParams, k: Option<f64>, shapes: Option<(f64, f64, f64)>) -> Result<SystemParams> {
    let mut q = p.clone();
    if let Some(k) = k {
        q = q.with_k_ave(k);
    }
    if let Some((a, b, d)) = shapes {
        q = q.with_shapes(a, b, d)?;
    }
    Ok(q)
}

fn shape_cells(p: &SystemParams) -> Vec<Cell> {
    vec![
        Cell::Real(p.ch_a.shape()),
        Cell::Real(p.ch_b.shape()),
        Cell::Real(p.ch_d.shape()),
    ]
}

fn outcome_cells(r: &SweepRow) -> Vec<Cell> {
    vec![
        Cell::opt(r.p_out_analytic),
        Cell::opt(r.p_out_mc),
        Cell::opt(r.mc_stderr),
        r.regime.map_or(Cell::Empty, |g| Cell::label(g.name())),
    ]
}

const OUTCOME_COLUMNS: [&str; 4] = ["p_out_analytic", "p_out_mc", "mc_stderr", "regime"];

struct Builder {
    table: Table,
    errors: Vec<String>,
}

impl Builder {
    fn new(columns: &[&str]) -> Self {
        Self {
            table: Table::new(columns.iter().copied()),
            errors: Vec::new(),
        }
    }

    /// Sweeps `axis` for one series and appends `lead ++ axis_cells ++ outcome ++ tail` rows.
    #[allow(clippy::too_many_arguments)]
    fn outage_series(
        &mut self,
        p: &SystemParams,
        lead: &[Cell],
        axis: SweepAxis,
        grid: &[f64],
        axis_cells: impl Fn(f64, &SystemParams) -> Vec<Cell>,
        tail: impl Fn(&SweepRow, &SystemParams) -> Vec<Cell>,
        rc: RunControls,
    ) -> Result<()> {
        for row in sweep(p, axis, grid, rc.engine, rc.mc_n, rc.seed)? {
            if let Some(e) = &row.error {
                self.errors.push(format!("{axis}={}: {e}", row.axis_value));
                continue;
            }
            let q = hiswipt::analysis::apply_axis(p, axis, row.axis_value)?;
            let mut cells = lead.to_vec();
            cells.extend(axis_cells(row.axis_value, &q));
            cells.extend(outcome_cells(&row));
            cells.extend(tail(&row, &q));
            self.table.push(cells);
        }
        Ok(())
    }

    fn finish(self) -> FigureOutput {
        FigureOutput {
            table: self.table,
            errors: self.errors,
        }
    }
}

fn rho_cells(rho: f64, _: &SystemParams) -> Vec<Cell> {
    vec![Cell::Real(10.0 * rho.log10()), Cell::Real(rho)]
}

fn rho_grid(lo_db: f64, hi_db: f64, step_db: f64) -> Vec<f64> {
    let n = ((hi_db - lo_db) / step_db).round() as usize + 1;
    lin(lo_db, hi_db, n).into_iter().map(db_to_linear).collect()
}

fn columns<'a>(lead: &[&'a str], outcome: bool, tail: &[&'a str]) -> Vec<&'a str> {
    let mut c = lead.to_vec();
    if outcome {
        c.extend(OUTCOME_COLUMNS);
    }
    c.extend(tail);
    c
}

/// Base parameters of a figure: defaults, then its preset, then `user`.
pub fn figure_params(id: FigureId, user: &ScenarioConfig) -> Result<SystemParams> {
    let mut cfg = ScenarioConfig::default();
    cfg.apply_preset(id.name(), id.preset())?;
    cfg.overlay(user);
    cfg.params()
}

const FIG4A_RATES: [f64; 4] = [1.0, 1.25, 1.5, 2.0];
const FIG4B_RATES: [f64; 3] = [0.5, 0.75, 1.0];
const FIG4B_ORDERS: [usize; 10] = [2, 4, 6, 8, 12, 16, 24, 32, 48, 64];

pub fn run_figure(id: FigureId, user: &ScenarioConfig, rc: RunControls) -> Result<FigureOutput> {
    let base = figure_params(id, user)?;
    let none = |_: &SweepRow, _: &SystemParams| Vec::new();
    match id {
        FigureId::Fig4a => {
            let mut b = Builder::new(&columns(&["R_th", "rho_db", "rho"], true, &[]));
            for r in FIG4A_RATES {
                let p = SystemParams {
                    r_th: r,
                    ..base.clone()
                };
                b.outage_series(
                    &p,
                    &[Cell::Real(r)],
                    SweepAxis::Rho,
                    &rho_grid(0.0, 60.0, 5.0),
                    rho_cells,
                    none,
                    rc,
                )?;
            }
            Ok(b.finish())
        }
        FigureId::Fig4b => fig4b(&base, rc),
        FigureId::Fig5 => fig5(&base, rc),
        FigureId::Fig6 => {
            let mut b = Builder::new(&columns(
                &["R_th", "m_d", "rho_db", "rho"],
                true,
                &["diversity_gain"],
            ));
            for r in [0.5, 1.5, 2.5] {
                for m_d in [1.0, 2.0] {
                    let p = SystemParams {
                        r_th: r,
                        ..with(&base, None, Some((2.0, 2.0, m_d)))?
                    };
                    let gain = |_: &SweepRow, q: &SystemParams| {
                        vec![diversity_gain(q).map_or(Cell::Empty, |g| Cell::Int(g as i64))]
                    };
                    let lead = [Cell::Real(r), Cell::Real(m_d)];
                    b.outage_series(
                        &p,
                        &lead,
                        SweepAxis::Rho,
                        &rho_grid(0.0, 80.0, 5.0),
                        rho_cells,
                        gain,
                        rc,
                    )?;
                }
            }
            Ok(b.finish())
        }
        FigureId::Fig7 => {
            let mut b = Builder::new(&columns(&["k_ave", "m_a", "m_b", "m_d", "beta"], true, &[]));
            for k in [0.0, 0.1, 0.15] {
                for shapes in [(2.0, 2.0, 1.0), (3.0, 3.0, 1.0)] {
                    let p = with(&base, Some(k), Some(shapes))?;
                    let mut lead = vec![Cell::Real(k)];
                    lead.extend(shape_cells(&p));
                    let axis = |v: f64, _: &SystemParams| vec![Cell::Real(v)];
                    b.outage_series(
                        &p,
                        &lead,
                        SweepAxis::Beta,
                        &lin(0.02, 0.98, 49),
                        axis,
                        none,
                        rc,
                    )?;
                }
            }
            Ok(b.finish())
        }
        FigureId::Fig8 => {
            let mut b = Builder::new(&columns(&["m_a", "m_b", "m_d", "k_ave"], true, &[]));
            for shapes in [
                (1.0, 1.0, 1.0),
                (2.0, 2.0, 1.0),
                (2.0, 2.0, 2.0),
                (3.0, 3.0, 2.0),
            ] {
                let p = with(&base, None, Some(shapes))?;
                let axis = |v: f64, _: &SystemParams| vec![Cell::Real(v)];
                b.outage_series(
                    &p,
                    &shape_cells(&p),
                    SweepAxis::KAve,
                    &lin(0.0, 0.2, 41),
                    axis,
                    none,
                    rc,
                )?;
            }
            Ok(b.finish())
        }
        FigureId::Fig9 => {
            let mut b = Builder::new(&columns(
                &["k_ave", "gamma_th_db", "gamma_th", "R_th"],
                true,
                &[],
            ));
            let grid: Vec<f64> = lin(-10.0, 30.0, 41).into_iter().map(db_to_linear).collect();
            for k in [0.0, 0.15, 0.2] {
                let p = with(&base, Some(k), None)?;
                let axis = |g: f64, q: &SystemParams| {
                    vec![
                        Cell::Real(10.0 * g.log10()),
                        Cell::Real(g),
                        Cell::Real(q.r_th),
                    ]
                };
                b.outage_series(
                    &p,
                    &[Cell::Real(k)],
                    SweepAxis::GammaTh,
                    &grid,
                    axis,
                    none,
                    rc,
                )?;
            }
            Ok(b.finish())
        }
        FigureId::Fig10 => {
            let mut b = Builder::new(&columns(
                &["k_ave", "m_a", "m_b", "m_d", "d_ar", "d_br"],
                true,
                &[],
            ));
            for k in [0.1, 0.2] {
                for shapes in [(2.0, 2.0, 1.0), (1.0, 3.0, 1.0), (3.0, 1.0, 1.0)] {
                    let p = with(&base, Some(k), Some(shapes))?;
                    let mut lead = vec![Cell::Real(k)];
                    lead.extend(shape_cells(&p));
                    let axis = |v: f64, q: &SystemParams| {
                        vec![Cell::Real(v), Cell::opt(q.geometry.map(|g| g.d_br))]
                    };
                    b.outage_series(
                        &p,
                        &lead,
                        SweepAxis::DAr,
                        &lin(0.5, 9.5, 37),
                        axis,
                        none,
                        rc,
                    )?;
                }
            }
            Ok(b.finish())
        }
        FigureId::Fig11 => fig11(&base),
        FigureId::Fig12 => fig12(&base, rc),
    }
}

fn fig4b(base: &SystemParams, rc: RunControls) -> Result<FigureOutput> {
    let mut b = Builder::new(&[
        "N",
        "R_th",
        "delta",
        "p_out_analytic",
        "p_out_mc",
        "mc_stderr",
    ]);
    for r in FIG4B_RATES {
        let p = SystemParams {
            r_th: r,
            ..base.clone()
        };
        let mc = if rc.engine.mc() {
            Some(estimate_outage_with(
                &p,
                Protocol::Tdbc,
                rc.mc_n,
                rc.seed,
                Execution::Parallel,
            )?)
        } else {
            None
        };
        for n in FIG4B_ORDERS {
            let q = SystemParams {
                quadrature_n: n,
                ..p.clone()
            };
            let analytic = match system_outage(&q) {
                Ok(res) => res.p_out,
                Err(e) => {
                    b.errors.push(format!("R_th={r} N={n}: {e}"));
                    continue;
                }
            };
            let delta = mc.as_ref().and_then(|m| relative_error(analytic, m).ok());
            b.table.push(vec![
                Cell::Int(n as i64),
                Cell::Real(r),
                Cell::opt(delta),
                Cell::Real(analytic),
                Cell::opt(mc.map(|m| m.p_hat)),
                Cell::opt(mc.map(|m| m.stderr)),
            ]);
        }
    }
    Ok(b.finish())
}

fn fig5(base: &SystemParams, rc: RunControls) -> Result<FigureOutput> {
    let mut b = Builder::new(&[
        "k_ave",
        "m_a",
        "m_b",
        "m_d",
        "protocol",
        "rho_db",
        "rho",
        "p_out_analytic",
        "p_out_mc",
        "mc_stderr",
    ]);
    let grid = rho_grid(0.0, 60.0, 5.0);
    for k in [0.0, 0.1] {
        for shapes in [(2.0, 2.0, 1.0), (3.0, 3.0, 1.0)] {
            let p = with(base, Some(k), Some(shapes))?;
            for protocol in [Protocol::Tdbc, Protocol::Mabc, Protocol::Direct] {
                let rows: Vec<Result<Vec<Cell>>> = grid
                    .par_iter()
                    .map(|&rho| {
                        let q = SystemParams { rho, ..p.clone() };
                        let analytic = match protocol {
                            Protocol::Tdbc if rc.engine.analytic() => {
                                Some(system_outage(&q)?.p_out)
                            }
                            _ => None,
                        };
                        let mc = if rc.engine.mc() {
                            Some(estimate_outage_with(
                                &q,
                                protocol,
                                rc.mc_n,
                                rc.seed,
                                Execution::Parallel,
                            )?)
                        } else {
                            None
                        };
                        let mut cells = vec![Cell::Real(k)];
                        cells.extend(shape_cells(&q));
                        cells.push(Cell::label(protocol.name()));
                        cells.extend(rho_cells(rho, &q));
                        cells.extend([
                            Cell::opt(analytic),
                            Cell::opt(mc.map(|m| m.p_hat)),
                            Cell::opt(mc.map(|m| m.stderr)),
                        ]);
                        Ok(cells)
                    })
                    .collect();
                for (rho, row) in grid.iter().zip(rows) {
                    match row {
                        Ok(cells) => b.table.push(cells),
                        Err(e) => b
                            .errors
                            .push(format!("{} rho={rho}: {e:#}", protocol.name())),
                    }
                }
            }
        }
    }
    Ok(b.finish())
}

fn fig11(base: &SystemParams) -> Result<FigureOutput> {
    let mut b = Builder::new(&[
        "eta",
        "m_a",
        "m_b",
        "m_d",
        "d_ar",
        "beta_opt",
        "p_out_min",
        "degenerate",
    ]);
    let grid = lin(1.0, 9.0, 17);
    for eta in [0.3, 0.6, 0.9] {
        for shapes in [(2.0, 2.0, 1.0), (3.0, 3.0, 1.0)] {
            let p = SystemParams {
                eta,
                ..with(base, None, Some(shapes))?
            };
            let rows: Vec<_> = grid
                .par_iter()
                .map(|&d| {
                    let q = hiswipt::analysis::apply_axis(&p, SweepAxis::DAr, d)?;
                    Ok::<_, anyhow::Error>((q.clone(), optimal_beta(&q, 64)?))
                })
                .collect();
            for (d, row) in grid.iter().zip(rows) {
                match row {
                    Ok((q, opt)) => {
                        let mut cells = vec![Cell::Real(eta)];
                        cells.extend(shape_cells(&q));
                        cells.extend([
                            Cell::Real(*d),
                            Cell::opt(opt.beta_opt),
                            Cell::Real(opt.p_out_min),
                            Cell::flag(opt.degenerate),
                        ]);
                        b.table.push(cells);
                    }
                    Err(e) => b.errors.push(format!("eta={eta} d_ar={d}: {e:#}")),
                }
            }
        }
    }
    Ok(b.finish())
}

fn fig12(base: &SystemParams, rc: RunControls) -> Result<FigureOutput> {
    let mut b = Builder::new(&columns(
        &["R_th", "k_ave", "rho_db", "rho"],
        true,
        &["ee", "ee_mc"],
    ));
    for r in [0.5, 1.0] {
        for k in [0.0, 0.1] {
            let p = SystemParams {
                r_th: r,
                ..with(base, Some(k), None)?
            };
            let ee = |row: &SweepRow, q: &SystemParams| {
                let from = |v: f64| 3.0 * (1.0 - v) * q.r_th / (2.0 * q.tx_power());
                vec![
                    Cell::opt(row.p_out_analytic.map(from)),
                    Cell::opt(row.p_out_mc.map(from)),
                ]
            };
            b.outage_series(
                &p,
                &[Cell::Real(r), Cell::Real(k)],
                SweepAxis::Rho,
                &rho_grid(0.0, 60.0, 2.0),
                rho_cells,
                ee,
                rc,
            )?;
        }
    }
    Ok(b.finish())
}

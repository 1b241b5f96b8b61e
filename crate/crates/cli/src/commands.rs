//! Subcommand implementations.

use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use hiswipt::analysis::{diversity_slope, energy_efficiency, optimal_beta, sweep};
use hiswipt::analytic::{diversity_gain, system_outage};
use hiswipt::montecarlo::{estimate_outage_with, estimate_t2t, relative_error, Execution};
use hiswipt::{Engine, McEstimate, Protocol, SystemParams, T2tLink};

use crate::cli::{Command, CommonArgs};
use crate::config::{parse_grid, parse_protocol, ScenarioConfig};
use crate::figures::{run_figure, RunControls};
use crate::table::{format_real, Cell, Table};

pub const DEFAULT_MC_N: u64 = 200_000;
pub const DEFAULT_SEED: u64 = 1;

/// Config file, then `--set` entries, then flags.
pub fn resolve_config(common: &CommonArgs) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    let mut sets = ScenarioConfig::default();
    sets.apply_sets(&common.sets)?;
    cfg.overlay(&sets);
    let mut flags = ScenarioConfig::default();
    flags.quadrature_n = common.quadrature_n;
    flags.engine = common.engine;
    flags.mc_n = common.mc_n;
    flags.seed = common.seed;
    flags.out = common.out.clone();
    cfg.overlay(&flags);
    Ok(cfg)
}

fn controls(cfg: &ScenarioConfig, default_engine: Engine) -> Result<RunControls> {
    let mc_n = cfg.mc_n.unwrap_or(DEFAULT_MC_N);
    let engine = cfg.engine.unwrap_or(default_engine);
    if engine.mc() && mc_n == 0 {
        bail!("mc_n must be >= 1");
    }
    Ok(RunControls {
        engine,
        mc_n,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
    })
}

/// `key = value` lines for a human reader.
struct Report<W: Write> {
    out: W,
}

impl<W: Write> Report<W> {
    fn line(&mut self, key: &str, value: impl std::fmt::Display) -> Result<()> {
        writeln!(self.out, "{key} = {value}")?;
        Ok(())
    }

    fn real(&mut self, key: &str, v: f64) -> Result<()> {
        self.line(key, format_real(v))
    }
}

fn report() -> Report<std::io::StdoutLock<'static>> {
    Report {
        out: std::io::stdout().lock(),
    }
}

/// Runs the command: `Ok(true)` when every component evaluated cleanly.
pub fn run(common: &CommonArgs, command: &Command) -> Result<bool> {
    let cfg = resolve_config(common)?;
    let out = cfg.out.clone();
    let out = out.as_deref();
    match command {
        Command::Outage { protocol } => outage(&cfg, protocol.as_deref(), out),
        Command::Sweep { axis, grid } => run_sweep(&cfg, *axis, grid.as_deref(), out),
        Command::Figure { id } => {
            let rc = controls(&cfg, id.default_engine())?;
            let fig = run_figure(*id, &cfg, rc)?;
            fig.table.emit(out)?;
            for e in &fig.errors {
                log::error!("{}: {e}", id.name());
            }
            Ok(fig.errors.is_empty())
        }
        Command::OptimizeBeta { resolution } => {
            let p = cfg.params()?;
            let opt = optimal_beta(&p, *resolution)?;
            let mut r = report();
            match opt.beta_opt {
                Some(b) => r.real("beta_opt", b)?,
                None => r.line("beta_opt", "undefined")?,
            }
            r.real("p_out_min", opt.p_out_min)?;
            r.line("degenerate", opt.degenerate)?;
            let mut t = Table::new(["beta_opt", "p_out_min", "degenerate", "resolution"]);
            t.push(vec![
                Cell::opt(opt.beta_opt),
                Cell::Real(opt.p_out_min),
                Cell::flag(opt.degenerate),
                Cell::Int(*resolution as i64),
            ]);
            emit_record(&t, out)?;
            Ok(true)
        }
        Command::Diversity {
            rho_min,
            rho_max,
            points,
        } => {
            let p = cfg.params()?;
            let hi = rho_max.unwrap_or_else(|| match (cfg.axis, &cfg.grid) {
                (Some(hiswipt::SweepAxis::Rho), Some(g)) => {
                    g.iter().copied().fold(f64::MIN, f64::max)
                }
                _ => 1e6,
            });
            let lo = rho_min.unwrap_or(hi / 10f64.powf(1.5));
            let fit = diversity_slope(&p, (lo, hi), *points)?;
            let predicted = diversity_gain(&p)?;
            let mut r = report();
            r.real("slope", fit.slope)?;
            r.line("diversity_gain", predicted)?;
            r.line("full_outage", fit.full_outage)?;
            let mut t = Table::new([
                "rho_min",
                "rho_max",
                "points",
                "slope",
                "diversity_gain",
                "full_outage",
            ]);
            t.push(vec![
                Cell::Real(lo),
                Cell::Real(hi),
                Cell::Int(*points as i64),
                Cell::Real(fit.slope),
                Cell::Int(predicted as i64),
                Cell::flag(fit.full_outage),
            ]);
            emit_record(&t, out)?;
            Ok(true)
        }
        Command::Ee => {
            let p = cfg.params()?;
            let res = system_outage(&p)?;
            let ee = energy_efficiency(&p)?;
            let mut r = report();
            r.real("p_out", res.p_out)?;
            r.real("ee", ee)?;
            let mut t = Table::new(["rho", "R_th", "p_out", "ee"]);
            t.push(vec![
                Cell::Real(p.rho),
                Cell::Real(p.r_th),
                Cell::Real(res.p_out),
                Cell::Real(ee),
            ]);
            emit_record(&t, out)?;
            Ok(true)
        }
        Command::Validate => validate(&cfg, out),
    }
}

/// Single-record commands print a report; the CSV goes to `--out` only.
fn emit_record(t: &Table, out: Option<&Path>) -> Result<()> {
    if out.is_some() {
        t.emit(out)?;
    }
    Ok(())
}

fn outage(cfg: &ScenarioConfig, protocol_flag: Option<&str>, out: Option<&Path>) -> Result<bool> {
    let p = cfg.params()?;
    let protocol = match protocol_flag {
        Some(s) => parse_protocol(s)?,
        None => cfg.protocol.unwrap_or(Protocol::Tdbc),
    };
    let default_engine = if protocol == Protocol::Tdbc {
        Engine::Analytic
    } else {
        Engine::Mc
    };
    let rc = controls(cfg, default_engine)?;
    if protocol != Protocol::Tdbc && rc.engine.analytic() {
        bail!(
            "the closed form covers tdbc only; use --engine mc for {}",
            protocol.name()
        );
    }
    let analytic = if rc.engine.analytic() {
        Some(system_outage(&p).context("analytic outage")?)
    } else {
        None
    };
    let mc = if rc.engine.mc() {
        Some(estimate_outage_with(
            &p,
            protocol,
            rc.mc_n,
            rc.seed,
            Execution::Parallel,
        )?)
    } else {
        None
    };
    let delta = match (&analytic, &mc) {
        (Some(a), Some(m)) => match relative_error(a.p_out, m) {
            Ok(d) => Some(d),
            Err(e) => {
                log::warn!("delta: {e}");
                None
            }
        },
        _ => None,
    };

    let mut r = report();
    r.line("protocol", protocol.name())?;
    if let Some(a) = &analytic {
        r.real("p1", a.p1)?;
        r.real("p2", a.p2)?;
        r.real("p3", a.p3)?;
        r.real("p4", a.p4)?;
        r.real("p_out", a.p_out)?;
        r.line("regime", a.regime.name())?;
        r.line("p4_case", a.p4_case.name())?;
        r.line("quadrature_N", a.quadrature_n)?;
    }
    if let Some(m) = &mc {
        r.real("p_out_mc", m.p_hat)?;
        r.real("mc_stderr", m.stderr)?;
        r.line("mc_n", m.n_samples)?;
        r.line("outages", m.outages)?;
        r.line("seed", m.seed)?;
    }
    if let Some(d) = delta {
        r.real("delta", d)?;
    }

    let mut t = Table::new([
        "protocol",
        "p1",
        "p2",
        "p3",
        "p4",
        "p_out",
        "regime",
        "p4_case",
        "quadrature_N",
        "p_out_mc",
        "mc_stderr",
        "mc_n",
        "outages",
        "seed",
        "delta",
    ]);
    let a = analytic.as_ref();
    t.push(vec![
        Cell::label(protocol.name()),
        Cell::opt(a.map(|a| a.p1)),
        Cell::opt(a.map(|a| a.p2)),
        Cell::opt(a.map(|a| a.p3)),
        Cell::opt(a.map(|a| a.p4)),
        Cell::opt(a.map(|a| a.p_out)),
        a.map_or(Cell::Empty, |a| Cell::label(a.regime.name())),
        a.map_or(Cell::Empty, |a| Cell::label(a.p4_case.name())),
        a.map_or(Cell::Empty, |a| Cell::Int(a.quadrature_n as i64)),
        Cell::opt(mc.map(|m| m.p_hat)),
        Cell::opt(mc.map(|m| m.stderr)),
        mc.map_or(Cell::Empty, |m| Cell::Int(m.n_samples as i64)),
        mc.map_or(Cell::Empty, |m| Cell::Int(m.outages as i64)),
        mc.map_or(Cell::Empty, |m| Cell::Int(m.seed as i64)),
        Cell::opt(delta),
    ]);
    emit_record(&t, out)?;
    Ok(true)
}

fn run_sweep(
    cfg: &ScenarioConfig,
    axis: Option<hiswipt::SweepAxis>,
    grid: Option<&str>,
    out: Option<&Path>,
) -> Result<bool> {
    let p = cfg.params()?;
    let Some(axis) = axis.or(cfg.axis) else {
        bail!("sweep needs an axis (--axis or `axis =` in the config)");
    };
    let grid = match grid {
        Some(g) => parse_grid(g).context("--grid")?,
        None => cfg
            .grid
            .clone()
            .context("sweep needs a grid (--grid or `grid =` in the config)")?,
    };
    let rc = controls(cfg, Engine::Analytic)?;
    let rows = sweep(&p, axis, &grid, rc.engine, rc.mc_n, rc.seed)?;
    let mut t = Table::new([
        axis.name(),
        "p_out_analytic",
        "p_out_mc",
        "mc_stderr",
        "regime",
        "ee",
        "status",
    ]);
    let mut clean = true;
    for row in &rows {
        if let Some(e) = &row.error {
            log::error!("{axis}={}: {e}", row.axis_value);
            clean = false;
        }
        t.push(vec![
            Cell::Real(row.axis_value),
            Cell::opt(row.p_out_analytic),
            Cell::opt(row.p_out_mc),
            Cell::opt(row.mc_stderr),
            row.regime.map_or(Cell::Empty, |r| Cell::label(r.name())),
            Cell::opt(row.extras.get("ee").copied()),
            Cell::label(if row.error.is_some() { "error" } else { "ok" }),
        ]);
    }
    t.emit(out)?;
    Ok(clean)
}

/// A fixed set of scenarios covering every regime and asymmetric channels.
pub fn validation_scenarios() -> Vec<(&'static str, SystemParams)> {
    let d = SystemParams::default;
    let shaped = |k: f64, rho: f64, beta: f64, m: (f64, f64, f64), r: f64| SystemParams {
        rho,
        beta,
        r_th: r,
        ..d()
            .with_k_ave(k)
            .with_shapes(m.0, m.1, m.2)
            .expect("integer shapes")
    };
    vec![
        ("defaults", d()),
        ("direct_only", SystemParams { r_th: 1.4, ..d() }),
        ("full_outage", SystemParams { r_th: 2.0, ..d() }),
        (
            "ideal_hardware",
            shaped(0.0, 1e3, 0.5, (1.0, 3.0, 2.0), 1.0),
        ),
        (
            "strong_impairment",
            shaped(0.15, 1e4, 0.3, (3.0, 1.0, 1.0), 0.5),
        ),
        ("low_snr", shaped(0.05, 1e2, 0.8, (2.0, 3.0, 1.0), 0.5)),
    ]
}

/// Agreement budget `max(3σ, 1% of the estimate, 1e-4)`.
pub fn agreement_tolerance(mc: &McEstimate) -> f64 {
    (3.0 * mc.stderr).max(0.01 * mc.p_hat).max(1e-4)
}

fn validate(cfg: &ScenarioConfig, out: Option<&Path>) -> Result<bool> {
    let rc = controls(cfg, Engine::Both)?;
    let mut t = Table::new([
        "check",
        "analytic",
        "mc",
        "mc_stderr",
        "tolerance",
        "status",
    ]);
    let mut all = true;
    let mut push = |t: &mut Table, name: String, analytic: f64, mc: &McEstimate| {
        let tol = agreement_tolerance(mc);
        let ok = (analytic - mc.p_hat).abs() <= tol;
        all &= ok;
        t.push(vec![
            Cell::label(name),
            Cell::Real(analytic),
            Cell::Real(mc.p_hat),
            Cell::Real(mc.stderr),
            Cell::Real(tol),
            Cell::label(if ok { "pass" } else { "FAIL" }),
        ]);
    };
    for (name, base) in validation_scenarios() {
        let p = SystemParams {
            quadrature_n: cfg.quadrature_n.unwrap_or(base.quadrature_n),
            ..base
        };
        let res = system_outage(&p).with_context(|| format!("{name}: analytic outage"))?;
        let mc = estimate_outage_with(&p, Protocol::Tdbc, rc.mc_n, rc.seed, Execution::Parallel)?;
        push(&mut t, format!("{name}.p_out"), res.p_out, &mc);
        if name == "ideal_hardware" {
            for (link, label, v) in [
                (T2tLink::DirectLink, "p1", res.p1),
                (T2tLink::RelayToA, "p2", res.p2),
                (T2tLink::RelayToB, "p3", res.p3),
                (T2tLink::JointRelay, "p4", res.p4),
            ] {
                let m = estimate_t2t(&p, link, rc.mc_n, rc.seed)?;
                push(&mut t, format!("{name}.{label}"), v, &m);
            }
        }
    }
    // The pass/fail table always goes to the terminal.
    print!("{}", t.to_csv_string()?);
    if out.is_some() {
        t.emit(out)?;
    }
    Ok(all)
}

//! Flat `key = value` scenario files.
//!
//! Settings arrive in layers (figure preset, config file, `--set` entries,
//! flags). A later layer overrides an earlier one; within one layer a
//! setting may appear only once.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use hiswipt::{Engine, Geometry, Protocol, SweepAxis, SystemParams};

/// Where a setting came from, for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line { file: String, line: usize },
    Set,
    Preset(&'static str),
}

impl std::fmt::Display for Origin {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Origin::Line { file, line } => write!(f, "{file}:{line}"),
            Origin::Set => f.write_str("--set"),
            Origin::Preset(id) => write!(f, "preset {id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Rate {
    Bits(f64),
    Sndr(f64),
}

/// Accumulated scenario settings. `None` means "use the default".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScenarioConfig {
    k1: Option<f64>,
    k2: Option<f64>,
    eta: Option<f64>,
    beta: Option<f64>,
    rho: Option<f64>,
    sigma2: Option<f64>,
    t_block: Option<f64>,
    rate: Option<Rate>,
    m_a: Option<f64>,
    m_b: Option<f64>,
    m_d: Option<f64>,
    d_ar: Option<f64>,
    d_br: Option<f64>,
    d_ab: Option<f64>,
    alpha1: Option<f64>,
    alpha2: Option<f64>,
    pub quadrature_n: Option<usize>,
    pub engine: Option<Engine>,
    pub mc_n: Option<u64>,
    pub seed: Option<u64>,
    pub protocol: Option<Protocol>,
    pub axis: Option<SweepAxis>,
    pub grid: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
}

/// Recognised keys, for error messages.
pub const KEYS: &[&str] = &[
    "k1",
    "k2",
    "k_ave",
    "eta",
    "beta",
    "rho",
    "rho_db",
    "sigma2",
    "T",
    "R_th",
    "gamma_th",
    "gamma_th_db",
    "m_a",
    "m_b",
    "m_d",
    "d_ar",
    "d_br",
    "d_ab",
    "alpha1",
    "alpha2",
    "quadrature_N",
    "engine",
    "mc_n",
    "seed",
    "protocol",
    "axis",
    "grid",
    "out",
];

fn number(value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| anyhow!("`{value}` is not a number"))?;
    if !v.is_finite() {
        bail!("`{value}` is not finite");
    }
    Ok(v)
}

fn integer<T: std::str::FromStr>(value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| anyhow!("`{value}` is not a non-negative integer"))
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn parse_protocol(value: &str) -> Result<Protocol> {
    match value {
        "tdbc" => Ok(Protocol::Tdbc),
        "mabc" => Ok(Protocol::Mabc),
        "direct" => Ok(Protocol::Direct),
        _ => bail!("expected tdbc, mabc or direct, got `{value}`"),
    }
}

/// Grid syntax: `v1, v2, ...`, `lin:start:stop:count` or `log:start:stop:count`
/// (logarithmic spacing between two positive values).
pub fn parse_grid(value: &str) -> Result<Vec<f64>> {
    let spaced = |kind: &str, rest: &str| -> Result<Vec<f64>> {
        let parts: Vec<&str> = rest.split(':').map(str::trim).collect();
        let [a, b, n] = parts[..] else {
            bail!("`{kind}:` grids take start:stop:count");
        };
        let (a, b, n) = (number(a)?, number(b)?, integer::<usize>(n)?);
        if n == 0 {
            bail!("grid count must be >= 1");
        }
        if kind == "log" && !(a > 0.0 && b > 0.0) {
            bail!("log grid bounds must be > 0");
        }
        Ok((0..n)
            .map(|i| {
                let t = if n == 1 {
                    0.0
                } else {
                    i as f64 / (n - 1) as f64
                };
                if kind == "log" {
                    10f64.powf(a.log10() + t * (b.log10() - a.log10()))
                } else {
                    a + t * (b - a)
                }
            })
            .collect())
    };
    let value = value.trim();
    if let Some(rest) = value.strip_prefix("lin:") {
        return spaced("lin", rest);
    }
    if let Some(rest) = value.strip_prefix("log:") {
        return spaced("log", rest);
    }
    let grid = value
        .split(',')
        .map(|v| number(v.trim()))
        .collect::<Result<Vec<_>>>()?;
    if grid.is_empty() {
        bail!("grid is empty");
    }
    Ok(grid)
}

impl ScenarioConfig {
    /// Applies one `key = value` setting. Returns the slot it wrote so callers
    /// can detect repeats.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<&'static str> {
        let value = value.trim();
        let slot = match key {
            "k1" => {
                self.k1 = Some(number(value)?);
                "k1"
            }
            "k2" => {
                self.k2 = Some(number(value)?);
                "k2"
            }
            "k_ave" => {
                let k = number(value)?;
                self.k1 = Some(k);
                self.k2 = Some(k);
                "k_ave"
            }
            "eta" => {
                self.eta = Some(number(value)?);
                "eta"
            }
            "beta" => {
                self.beta = Some(number(value)?);
                "beta"
            }
            "rho" => {
                self.rho = Some(number(value)?);
                "rho"
            }
            "rho_db" => {
                self.rho = Some(db_to_linear(number(value)?));
                "rho"
            }
            "sigma2" => {
                self.sigma2 = Some(number(value)?);
                "sigma2"
            }
            "T" => {
                self.t_block = Some(number(value)?);
                "T"
            }
            "R_th" => {
                self.rate = Some(Rate::Bits(number(value)?));
                "rate"
            }
            "gamma_th" => {
                self.rate = Some(Rate::Sndr(number(value)?));
                "rate"
            }
            "gamma_th_db" => {
                self.rate = Some(Rate::Sndr(db_to_linear(number(value)?)));
                "rate"
            }
            "m_a" => {
                self.m_a = Some(number(value)?);
                "m_a"
            }
            "m_b" => {
                self.m_b = Some(number(value)?);
                "m_b"
            }
            "m_d" => {
                self.m_d = Some(number(value)?);
                "m_d"
            }
            "d_ar" => {
                self.d_ar = Some(number(value)?);
                "d_ar"
            }
            "d_br" => {
                self.d_br = Some(number(value)?);
                "d_br"
            }
            "d_ab" => {
                self.d_ab = Some(number(value)?);
                "d_ab"
            }
            "alpha1" => {
                self.alpha1 = Some(number(value)?);
                "alpha1"
            }
            "alpha2" => {
                self.alpha2 = Some(number(value)?);
                "alpha2"
            }
            "quadrature_N" => {
                self.quadrature_n = Some(integer(value)?);
                "quadrature_N"
            }
            "engine" => {
                self.engine = Some(value.parse()?);
                "engine"
            }
            "mc_n" => {
                self.mc_n = Some(integer(value)?);
                "mc_n"
            }
            "seed" => {
                self.seed = Some(integer(value)?);
                "seed"
            }
            "protocol" => {
                self.protocol = Some(parse_protocol(value)?);
                "protocol"
            }
            "axis" => {
                self.axis = Some(value.parse()?);
                "axis"
            }
            "grid" => {
                self.grid = Some(parse_grid(value)?);
                "grid"
            }
            "out" => {
                self.out = Some(PathBuf::from(value));
                "out"
            }
            _ => bail!("unknown key `{key}` (known keys: {})", KEYS.join(", ")),
        };
        Ok(slot)
    }

    /// Applies every `key = value` line of `text`. `name` labels errors.
    pub fn apply_text(&mut self, name: &str, text: &str) -> Result<()> {
        let mut seen: HashMap<&'static str, usize> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let origin = Origin::Line {
                file: name.to_string(),
                line,
            };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| anyhow!("{origin}: expected `key = value`, got `{body}`"))?;
            let key = key.trim();
            let slot = self
                .apply(key, value)
                .with_context(|| format!("{origin}: key `{key}`"))?;
            if let Some(first) = seen.insert(slot, line) {
                bail!("{origin}: `{key}` sets `{slot}` again (first set on line {first})");
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        self.apply_text(&path.display().to_string(), &text)
    }

    /// Applies `key=value` overrides, as given to `--set`.
    pub fn apply_sets(&mut self, sets: &[String]) -> Result<()> {
        let mut seen = HashMap::new();
        for s in sets {
            let (key, value) = s
                .split_once('=')
                .ok_or_else(|| anyhow!("--set expects key=value, got `{s}`"))?;
            let key = key.trim();
            let slot = self
                .apply(key, value)
                .with_context(|| format!("{}: key `{key}`", Origin::Set))?;
            if seen.insert(slot, ()).is_some() {
                bail!("--set: `{key}` sets `{slot}` more than once");
            }
        }
        Ok(())
    }

    /// Applies preset entries.
    pub fn apply_preset(&mut self, id: &'static str, entries: &[(&str, &str)]) -> Result<()> {
        for (k, v) in entries {
            self.apply(k, v)
                .with_context(|| format!("{}: key `{k}`", Origin::Preset(id)))?;
        }
        Ok(())
    }

    /// Layers `other` on top of `self`.
    pub fn overlay(&mut self, other: &ScenarioConfig) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(
            k1,
            k2,
            eta,
            beta,
            rho,
            sigma2,
            t_block,
            rate,
            m_a,
            m_b,
            m_d,
            d_ar,
            d_br,
            d_ab,
            alpha1,
            alpha2,
            quadrature_n,
            engine,
            mc_n,
            seed,
            protocol,
            axis,
            grid,
            out
        );
    }

    /// The system parameters described by these settings.
    ///
    /// When `d_ar` is given without `d_br`, the relay moves along the
    /// terminal segment: `d_br = d_ab - d_ar`.
    pub fn params(&self) -> Result<SystemParams> {
        let base = SystemParams::default();
        let g0 = Geometry::default();
        let d_ab = self.d_ab.unwrap_or(g0.d_ab);
        let d_ar = self.d_ar.unwrap_or(g0.d_ar);
        let d_br = match (self.d_br, self.d_ar) {
            (Some(v), _) => v,
            (None, Some(ar)) => d_ab - ar,
            (None, None) => g0.d_br,
        };
        let geometry = Geometry {
            d_ar,
            d_br,
            d_ab,
            alpha1: self.alpha1.unwrap_or(g0.alpha1),
            alpha2: self.alpha2.unwrap_or(g0.alpha2),
        };
        let mut p = SystemParams {
            k1: self.k1.unwrap_or(base.k1),
            k2: self.k2.unwrap_or(base.k2),
            eta: self.eta.unwrap_or(base.eta),
            beta: self.beta.unwrap_or(base.beta),
            rho: self.rho.unwrap_or(base.rho),
            sigma2: self.sigma2.unwrap_or(base.sigma2),
            t_block: self.t_block.unwrap_or(base.t_block),
            quadrature_n: self.quadrature_n.unwrap_or(base.quadrature_n),
            ..base.clone()
        }
        .with_shapes(
            self.m_a.unwrap_or(base.ch_a.shape()),
            self.m_b.unwrap_or(base.ch_b.shape()),
            self.m_d.unwrap_or(base.ch_d.shape()),
        )?
        .with_geometry(geometry)?;
        match self.rate {
            Some(Rate::Bits(r)) => p.r_th = r,
            Some(Rate::Sndr(g)) => p = p.with_gamma_th(g)?,
            None => {}
        }
        p.validate()?;
        Ok(p)
    }
}

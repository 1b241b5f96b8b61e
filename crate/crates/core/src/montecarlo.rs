//! Monte Carlo outage estimators.
//!
//! Draws are grouped in chunks of [`CHUNK_SIZE`]. Each link of each chunk
//! reads its own counter-based substream, so a run's outcome depends only on
//! `(params, n, seed)`: never on the worker count, and never on whether the
//! other links were sampled at all.

use rayon::prelude::*;

use crate::channel::{stream_rng, FadingDraw, GainSampler};
use crate::error::{Error, Result};
use crate::system::{derive_constants_for, Protocol, SndrModel, SystemParams, Terminal};

pub const CHUNK_SIZE: u64 = 1 << 16;

/// Below this many counted outages the estimate is reported as dominated by
/// its standard error.
pub const MIN_RESOLVED_EVENTS: u64 = 10;

/// Individual terms of the outage decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum T2tLink {
    /// `γ_ra < γ_th`
    RelayToA,
    /// `γ_rb < γ_th`
    RelayToB,
    /// `γ_d < γ_th`
    DirectLink,
    /// `γ_ra < γ_th` and `γ_rb < γ_th`
    JointRelay,
}

/// Whether chunks are fanned out over the rayon pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Serial,
}

/// Empirical outage probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub p_hat: f64,
    /// `√(p̂(1-p̂)/n)`
    pub stderr: f64,
    pub n_samples: u64,
    pub outages: u64,
    pub seed: u64,
    pub protocol: Protocol,
    /// Fewer than [`MIN_RESOLVED_EVENTS`] outages were observed.
    pub stderr_dominated: bool,
}

impl McEstimate {
    pub fn from_counts(outages: u64, n_samples: u64, seed: u64, protocol: Protocol) -> Self {
        let p_hat = outages as f64 / n_samples as f64;
        Self {
            p_hat,
            stderr: (p_hat * (1.0 - p_hat) / n_samples as f64).sqrt(),
            n_samples,
            outages,
            seed,
            protocol,
            stderr_dominated: outages < MIN_RESOLVED_EVENTS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Event {
    System(Protocol),
    Term(T2tLink),
}

#[derive(Debug, Clone, Copy)]
struct Needs {
    relay: bool,
    direct: bool,
}

impl Event {
    fn protocol(self) -> Protocol {
        match self {
            Event::System(p) => p,
            Event::Term(_) => Protocol::Tdbc,
        }
    }

    fn needs(self) -> Needs {
        match self {
            Event::System(Protocol::Tdbc) => Needs {
                relay: true,
                direct: true,
            },
            Event::System(Protocol::Mabc) => Needs {
                relay: true,
                direct: false,
            },
            Event::System(Protocol::Direct) | Event::Term(T2tLink::DirectLink) => Needs {
                relay: false,
                direct: true,
            },
            Event::Term(_) => Needs {
                relay: true,
                direct: false,
            },
        }
    }
}

struct Kernel {
    event: Event,
    needs: Needs,
    model: SndrModel,
    gamma_th: f64,
    x: GainSampler,
    y: GainSampler,
    z: GainSampler,
}

impl Kernel {
    fn new(p: &SystemParams, event: Event) -> Result<Self> {
        let protocol = event.protocol();
        Ok(Self {
            event,
            needs: event.needs(),
            model: SndrModel::new(p, protocol)?,
            gamma_th: derive_constants_for(p, protocol)?.gamma_th,
            x: p.ch_a.sampler(),
            y: p.ch_b.sampler(),
            z: p.ch_d.sampler(),
        })
    }

    #[inline]
    fn is_outage(&self, d: &FadingDraw) -> bool {
        let g = self.gamma_th;
        match self.event {
            Event::System(Protocol::Tdbc) => {
                let (a, b) = self.model.end_to_end(d);
                a.min(b) < g
            }
            Event::System(Protocol::Mabc) => {
                self.model
                    .relay(d, Terminal::A)
                    .min(self.model.relay(d, Terminal::B))
                    < g
            }
            Event::System(Protocol::Direct) | Event::Term(T2tLink::DirectLink) => {
                self.model.direct(d.z) < g
            }
            Event::Term(T2tLink::RelayToA) => self.model.relay(d, Terminal::A) < g,
            Event::Term(T2tLink::RelayToB) => self.model.relay(d, Terminal::B) < g,
            Event::Term(T2tLink::JointRelay) => {
                self.model
                    .relay(d, Terminal::A)
                    .max(self.model.relay(d, Terminal::B))
                    < g
            }
        }
    }

    fn count_chunk(&self, seed: u64, chunk: u64, len: u64) -> u64 {
        let mut rx = stream_rng(seed, 3 * chunk);
        let mut ry = stream_rng(seed, 3 * chunk + 1);
        let mut rz = stream_rng(seed, 3 * chunk + 2);
        let mut hits = 0;
        for _ in 0..len {
            let (x, y) = if self.needs.relay {
                (self.x.sample(&mut rx), self.y.sample(&mut ry))
            } else {
                (0.0, 0.0)
            };
            let z = if self.needs.direct {
                self.z.sample(&mut rz)
            } else {
                0.0
            };
            hits += u64::from(self.is_outage(&FadingDraw { x, y, z }));
        }
        hits
    }
}

fn estimate(
    p: &SystemParams,
    event: Event,
    n: u64,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(crate::error::invalid("mc_n", "sample count must be >= 1"));
    }
    let kernel = Kernel::new(p, event)?;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let len = |c: u64| CHUNK_SIZE.min(n - c * CHUNK_SIZE);
    let outages: u64 = match exec {
        Execution::Parallel => (0..chunks)
            .into_par_iter()
            .map(|c| kernel.count_chunk(seed, c, len(c)))
            .sum(),
        Execution::Serial => (0..chunks)
            .map(|c| kernel.count_chunk(seed, c, len(c)))
            .sum(),
    };
    let est = McEstimate::from_counts(outages, n, seed, event.protocol());
    if est.stderr_dominated {
        log::warn!(
            "{:?}: only {} outages in {} draws; estimate is dominated by its standard error",
            event,
            outages,
            n
        );
    }
    Ok(est)
}

/// System outage of TDBC with selection combining at both terminals.
pub fn estimate_outage_tdbc(p: &SystemParams, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(
        p,
        Event::System(Protocol::Tdbc),
        n,
        seed,
        Execution::Parallel,
    )
}

/// System outage of two-phase MABC relaying at equal per-terminal energy.
pub fn estimate_outage_mabc(p: &SystemParams, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(
        p,
        Event::System(Protocol::Mabc),
        n,
        seed,
        Execution::Parallel,
    )
}

/// System outage of two-phase direct exchange at equal per-terminal energy.
pub fn estimate_outage_direct(p: &SystemParams, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(
        p,
        Event::System(Protocol::Direct),
        n,
        seed,
        Execution::Parallel,
    )
}

/// One term of the TDBC outage decomposition.
pub fn estimate_t2t(p: &SystemParams, link: T2tLink, n: u64, seed: u64) -> Result<McEstimate> {
    estimate(p, Event::Term(link), n, seed, Execution::Parallel)
}

/// System outage of `protocol` with explicit execution mode.
pub fn estimate_outage_with(
    p: &SystemParams,
    protocol: Protocol,
    n: u64,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    estimate(p, Event::System(protocol), n, seed, exec)
}

/// `δ = |analytic - p̂| / p̂`.
pub fn relative_error(analytic: f64, mc: &McEstimate) -> Result<f64> {
    if !(mc.p_hat > 0.0) {
        return Err(Error::Undefined(
            "relative error against a zero Monte Carlo estimate".into(),
        ));
    }
    Ok((analytic - mc.p_hat).abs() / mc.p_hat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn defaults() -> SystemParams {
        SystemParams::default()
    }

    #[test]
    fn certain_outage_above_ceiling() {
        let p = SystemParams {
            r_th: 2.0,
            ..defaults()
        };
        let e = estimate_outage_tdbc(&p, 5000, 1).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.stderr, 0.0);
    }

    #[test]
    fn vanishing_outage_without_impairments() {
        let p = SystemParams {
            rho: 1e12,
            ..defaults().with_k_ave(0.0)
        };
        let e = estimate_outage_tdbc(&p, 100_000, 2).unwrap();
        assert!(e.p_hat < 1e-4);
        assert!(e.stderr_dominated);
    }

    #[test]
    fn stderr_formula() {
        let e = McEstimate::from_counts(250, 1000, 0, Protocol::Tdbc);
        assert_eq!(e.p_hat, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 1000.0).sqrt()).abs() < 1e-18);
        assert!(!e.stderr_dominated);
    }

    #[test]
    fn relative_error_examples() {
        let half = McEstimate::from_counts(500, 1000, 0, Protocol::Tdbc);
        assert_eq!(relative_error(0.5, &half).unwrap(), 0.0);
        assert!((relative_error(0.505, &half).unwrap() - 0.01).abs() < 1e-14);
        let zero = McEstimate::from_counts(0, 1000, 0, Protocol::Tdbc);
        assert!(matches!(
            relative_error(0.1, &zero),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn serial_and_parallel_counts_match() {
        let p = defaults();
        let n = 3 * CHUNK_SIZE + 17;
        for protocol in [Protocol::Tdbc, Protocol::Mabc, Protocol::Direct] {
            let a = estimate_outage_with(&p, protocol, n, 11, Execution::Parallel).unwrap();
            let b = estimate_outage_with(&p, protocol, n, 11, Execution::Serial).unwrap();
            assert_eq!(a.outages, b.outages);
        }
    }

    #[test]
    fn direct_ignores_relay_parameters() {
        let p = defaults();
        let q = SystemParams {
            beta: 0.3,
            eta: 0.9,
            ..defaults().with_shapes(1.0, 3.0, 1.0).unwrap()
        };
        let a = estimate_outage_direct(&p, 200_000, 5).unwrap();
        let b = estimate_outage_direct(&q, 200_000, 5).unwrap();
        assert_eq!(a.outages, b.outages);
    }

    #[test]
    fn selection_combining_dominates_direct_link() {
        let p = defaults();
        let sys = estimate_outage_tdbc(&p, 200_000, 8).unwrap();
        let direct = estimate_t2t(&p, T2tLink::DirectLink, 200_000, 8).unwrap();
        assert!(sys.outages <= direct.outages);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(estimate_outage_tdbc(&defaults(), 0, 1).is_err());
    }
}

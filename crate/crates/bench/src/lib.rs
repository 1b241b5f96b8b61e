//! Shared fixtures for the benchmarks.

use hiswipt::SystemParams;

/// Cooperative scenario with symmetric relaying links.
pub fn cooperative() -> SystemParams {
    SystemParams::default()
}

/// Cooperative scenario with unequal relaying shapes and an off-center relay.
pub fn asymmetric() -> SystemParams {
    SystemParams {
        r_th: 0.5,
        ..SystemParams::default()
            .with_relay_position(3.0)
            .unwrap()
            .with_shapes(1.0, 3.0, 2.0)
            .unwrap()
    }
}

/// Scenario decided by the direct link alone.
pub fn direct_only() -> SystemParams {
    SystemParams {
        r_th: 1.5,
        ..SystemParams::default()
    }
}

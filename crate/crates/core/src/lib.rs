//! Euler–Maruyama schemes with randomised drift evaluation for additive-noise
//! SDEs `dX = f(t, X) dt + dB` on [0, 1] with Hölder drift, stratified
//! randomised quadrature, and the Monte Carlo machinery to measure their
//! strong convergence orders.
//!
//! The crate is `no_std` with `alloc`. Monte Carlo loops are generic over an
//! [`Executor`]; [`Sequential`] runs them on the calling thread.
//!
//! ```
//! use sde_rand_em_core::{run_ladder, DriftSpec, LadderConfig, Scheme, Sequential, fit_order};
//!
//! let drift = DriftSpec::product(0.5, 1.0, 1.0, 1).unwrap();
//! let cfg = LadderConfig::new(drift, vec![4, 8, 16], 40, 7);
//! let ladder = run_ladder(&cfg, Scheme::RandomisedEm, &Sequential).unwrap();
//! let fit = fit_order(&ladder).unwrap();
//! assert!(fit.slope.is_finite());
//! ```

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod brownian;
pub mod drift;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod fit;
pub mod grid;
pub mod integrate;
pub mod offsets;
pub mod quadrature;
pub mod rng;
pub mod stats;

pub use brownian::BrownianPath;
pub use drift::{
    DriftFamily, DriftSpec, ObservableKind, ObservableSpec, DEFAULT_ANCHOR, DEFAULT_TRUNCATION,
};
pub use error::{Error, Result};
pub use exec::{Executor, Sequential};
pub use experiments::{
    compare_schemes, fit_order, fit_probe, measure_i1, measure_i1_scalar, measure_i2, probe_sample,
    run_ladder, strong_error_estimate, ErrorLadder, IProbeResult, LadderConfig, LadderPoint,
    ProbeConfig, ProbeKind, SchemeComparison,
};
pub use fit::{fit_power_law, FitStatus, OrderFit, SLOPE_BAND_SLACK};
pub use grid::{kappa, kappa_tau, TimeGrid};
pub use integrate::{
    extend_continuous, satisfies_boundedness, simulate_randomised_em, simulate_reference,
    simulate_scheme, simulate_standard_em, sup_node_distance, ContinuousExtension,
    DiscreteTrajectory, Scheme, REFERENCE_FACTOR,
};
pub use offsets::RandomOffsets;
pub use quadrature::{
    integral_oracle, leftpoint_quadrature, martingale_diagnostic, quadrature_order_experiment,
    randomised_quadrature, MartingaleReport, QuadratureOrderReport, QuadratureRun, TestFunction,
};
pub use rng::{Purpose, RngStream};

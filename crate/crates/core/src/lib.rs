//! Simulator and optimization library for a multi-user MIMO downlink assisted
//! by a modulating intelligent surface (MIS).
//!
//! The surface plays two roles at once: it passively beamforms the base
//! station's precoded signals towards one set of users, and it phase-modulates
//! a carrier sent by the base station to embed data for a second set of users.
//! Both roles are driven by the same per-symbol phase-shift matrix, which is
//! optimized jointly with the transmit precoder and the receive scaling
//! factors under a sum-MMSE criterion.
//!
//! Crate layout:
//! - [`model`]: configuration, multipath channel generation, CSI error model;
//! - [`oovamp`]: the max-sum matrix VAMP engine (linear MAP estimator,
//!   extrinsic exchange, separable projector interface);
//! - [`projectors`]: entry-wise MAP projectors for the phase-shift
//!   constraints (unimodular and reactive-load);
//! - [`optimizer`]: the alternating joint optimizer (phase shifts via VAMP,
//!   precoder and scaling factors in closed form);
//! - [`metrics`]: exact-model per-user MMSE and sum-rate;
//! - [`harness`]: seeded Monte-Carlo trials, parameter sweeps, aggregation.
//!
//! Monte-Carlo trials run in parallel through rayon when the default
//! `parallel` feature is enabled; per-trial seeds are derived by counter so
//! results are identical to the sequential fallback.

pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod oovamp;
pub mod optimizer;
pub mod projectors;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;
/// Dense dynamically-sized complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense dynamically-sized complex column vector.
pub type CVector = nalgebra::DVector<C64>;

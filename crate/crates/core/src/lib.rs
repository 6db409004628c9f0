//! Scaling laws for functional communities: cities, datacentres and other
//! networks of cooperating agents.
//!
//! The crate has four layers:
//!
//! * [`meanfield`]: the closed-form volume/yield model and the predicted
//!   scaling exponent of every dependency class.
//! * [`promisegraph`]: a typed, polarized promise graph with bindings,
//!   conditional reduction, superagent aggregation and valuation.
//! * [`uslkit`]: the Universal Scalability Law, Amdahl-style serial time
//!   models and the single-queue response time.
//! * [`ensemble`]: deterministic synthetic ensembles and log-log power-law
//!   fitting, plus comparison against [`observed`] exponents.
//!
//! ```
//! use commscale::meanfield::{predicted_exponent, ScalingClass, ScalingParams};
//!
//! let params = ScalingParams::new(2, 1.into()).unwrap();
//! let beta = predicted_exponent(ScalingClass::Interaction, &params, true).unwrap();
//! assert_eq!(beta, num_rational::Ratio::new(7, 6));
//! ```

#![forbid(unsafe_code)]
#![warn(rust_2018_idioms, missing_debug_implementations)]
// `!(x > 0.0)` style guards are deliberate: they reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod format;
pub mod meanfield;
pub mod observed;
pub mod promisegraph;
pub mod uslkit;

pub use ensemble::{EnsembleSample, EnsembleSpec, PowerLawFit};
pub use meanfield::{Exponent, Population, ScalingClass, ScalingParams};
pub use promisegraph::{AgentId, Binding, Polarity, Promise, PromiseGraph, TypeTag};
pub use uslkit::{QueueParams, SerialModel, UslParams};

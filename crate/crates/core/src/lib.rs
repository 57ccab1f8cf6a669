//! Robust server-count/speed configuration for an M/M/m cloud platform.
//!
//! The crate is organised bottom-up:
//!
//! * [`queueing`] — exact and closed-form M/M/m analytics.
//! * [`economics`] — revenue, power/cost and profit models.
//! * [`boundary`] — performance level sets in the `(m, s)` plane.
//! * [`radius`] — shortest distance from a working point to a level set.
//! * [`optim`] — DBO, DE and PSO maximizing that distance.
//! * [`simulate`] — discrete-event M/M/m simulation used as an oracle.
//!
//! All money and time quantities are in abstract model units.

pub mod boundary;
pub mod economics;
mod error;
pub mod fmt;
pub mod optim;
pub mod queueing;
pub mod radius;
pub mod simulate;

pub use boundary::{BoundaryCurve, FeasibleSide, Metric, ModelForm, Platform, Polyline, SearchBox, WorkingPoint};
pub use economics::{EconomicParams, ProfitBreakdown};
pub use error::{Error, Result};
pub use queueing::{QueueMetrics, QueueParams};
pub use radius::{RadiusResult, RadiusSearchParams};

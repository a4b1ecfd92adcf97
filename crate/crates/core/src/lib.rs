//! Two cavity modes coupled by all-optical feedback: exact reduced dynamics of
//! the source mode, a brute-force two-mode integrator to check it against, and
//! the dataset runners behind the `cavity-feedback` binary.
//!
//! ```
//! use cavity_feedback::channel::{apply_channel, ChannelSnapshot};
//! use cavity_feedback::feedback::{DecayEnvelope, FeedbackParams};
//! use cavity_feedback::fock::{make_state, StateSpec, C64};
//!
//! let params = FeedbackParams::from_ratio(1.0, 1e-3, 0.95, -1.0)?;
//! let env = DecayEnvelope::new(params);
//! let cat = StateSpec::cat(C64::new(0.0, 2.0), 0.0);
//! let rho0 = make_state(&cat, cat.default_space())?;
//! let rho = apply_channel(&rho0, ChannelSnapshot::at(&env, 0.25)?)?;
//! assert!(rho.mean_photon_number()? < rho0.mean_photon_number()?);
//! # Ok::<(), cavity_feedback::Error>(())
//! ```

pub mod channel;
pub mod error;
pub mod experiments;
pub mod feedback;
pub mod fock;
pub mod oracle;

pub use error::{Error, Result};

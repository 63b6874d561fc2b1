//! Time-domain acoustic scattering from a moving point source and
//! direct-sampling reconstruction of the scatterers.
//!
//! The crate is organized bottom-up: [`scene`] describes the geometry and
//! the emitter, [`incident`] evaluates the field of the moving source,
//! [`forward`] produces scattered data, [`imaging`] turns data into
//! indicator images and [`runner`] drives complete experiments.

mod error;

pub mod forward;
pub mod imaging;
pub mod incident;
pub mod runner;
pub mod scene;

pub use error::{Error, Result};

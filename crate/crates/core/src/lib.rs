//! Simulation of an entangled-photon signalling construction: two-photon
//! state vectors, three gate designs, the windowed decoding protocol and the
//! checks that tie them to their closed forms.

pub mod diffraction;
pub mod error;
pub mod hom;
pub mod is_gate;
pub mod nogo;
pub mod output;
pub mod pipeline;
pub mod protocol;
pub mod quantum;
pub mod verify;

pub use error::{Error, Result};

//! Covert transmit/reflect beamforming for IRS-assisted MISO links.
//!
//! The crate is organised bottom-up: [`numerics`] and [`sdp`] provide the
//! linear algebra and the interior-point solver, [`channel`] and
//! [`detection`] model the links and the warden, and [`perfect`],
//! [`discrete`] and [`robust`] implement the beamformer designs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
mod complex_serde;
pub mod design;
pub mod discrete;
pub mod detection;
pub mod numerics;
pub mod perfect;
pub mod robust;
pub mod sdp;
pub mod seeding;
pub mod units;

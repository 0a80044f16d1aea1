//! Platoon simulation and multi-model identification of communication-fault
//! takeovers.
//!
//! A comm loss at vehicle `k` hands that vehicle to a human driver, who
//! brakes at a safe deceleration while tracking the predecessor's speed. The
//! [`identifier`] recovers `k` and the driver class from the tail vehicle's
//! measurements alone by running a bank of hypothesis simulations; the
//! [`blender`] reaches the same answer with two boundary models plus a
//! two-hypothesis driver check.

// `!(x >= 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blender;
pub mod driver;
pub mod error;
pub mod identifier;
pub mod lti;
pub mod platoon;
pub mod scenario;
pub mod verify;

pub use error::{Error, Result};

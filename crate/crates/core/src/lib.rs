//! Simulation of redundant pointer-state records in a central electron spin
//! decohered by a nuclear spin bath, with the adaptive dynamical-decoupling
//! filter design used to address individual nuclei.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod axy;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod numfmt;
pub mod qmath;

pub use error::{Error, Result};

//! Weight sequences, associated functions, optimal flat functions on sectors
//! and the moment-kernel extension operator for Carleman-Roumieu
//! ultraholomorphic classes.
//!
//! Everything here is `no_std` with `alloc`. Sequences live in the log
//! domain: a [`WeightSequence`] stores `ln m_p` and `ln M_p` on a finite
//! prefix plus an optional closed-form [`TailModel`].
//!
//! ```
//! use ultraflat_core::{gevrey, Property, check_property};
//!
//! let seq = gevrey(1.0, 64).unwrap();
//! let cert = check_property(&seq, Property::Mg);
//! assert!(cert.fitted_constant <= 2.0);
//! ```
#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod fmath;

pub mod assoc;
pub mod borel;
pub mod flat;
pub mod harmonic;
pub mod quad;
pub mod report;
pub mod weight_seq;

pub use assoc::{AssociatedFunctions, FnWeight, Nu, Omega, Weight};
pub use borel::{
    borel_transform, extend, kernel_from_flat, moments, series_norm, verify_asymptotics, AsymptoticReport,
    ExtendConfig, ExtensionOperator, FormalSeries, Kernel, MomentKernel,
};
pub use error::{Error, Result};
pub use flat::{
    flat_halfplane, flat_product, flat_q_gevrey_s2, flat_q_gevrey_sgamma, flat_ramified, reference_exp,
    verify_flatness, FlatFunction, FlatKind, FlatnessConfig, FlatnessGrid, FlatnessReport, Polar, Sector,
};
pub use fmath::log_grid;
pub use harmonic::{langenbruch_fit, HarmonicEvaluator};
pub use quad::{QuadConfig, QuadEstimate};
pub use report::{FitReport, GridDescriptor};
pub use weight_seq::{
    almost_increasing_constant, bang_h, bang_rn, check_property, check_property_with, check_seq, convolve,
    from_log_terms, gamma_condition, gamma_estimate, gamma_estimate_capped, gevrey, hat, m_alpha_beta, power, q_gevrey,
    strictify_quotients, BangSum, CertificateConfig, GammaEstimate, Property, PropertyCertificate, TailModel, Verdict,
    WeightSequence,
};

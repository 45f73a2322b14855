#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus_norms;
pub mod cli;
pub mod error;
pub mod functional_calculus_eval;
pub mod integral_conditions;
pub mod kernels;
pub mod linalg;
pub mod norm_engine;
pub mod quadrature;
pub mod rate_lab;
pub mod spectral_models;

pub use error::{Error, Result};

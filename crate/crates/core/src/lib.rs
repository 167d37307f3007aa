#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod chain;
pub mod cli;
pub mod config;
pub mod error;
pub mod expansive;
pub mod ifs;
pub mod io;
pub mod maps;
pub mod metrics;
pub mod perturb;
pub mod shadowing;
pub mod space;

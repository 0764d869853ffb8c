//! Exact computational algebra for affine Hecke algebras.
//!
//! The crate is `no_std` with `alloc`. Enabling the `std` feature only adds
//! `std::error::Error` impls for the error types.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod rational;
pub mod scalars;
pub mod linalg;
pub mod cover_model;
pub mod finite_groups;
pub mod geometry;
pub mod hecke_abstract;
pub mod polyhedra;
pub mod reflections;
pub mod report;
pub mod rootdata;

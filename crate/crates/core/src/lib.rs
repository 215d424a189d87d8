//! Exact computation of asymptotic flats for algebraic sets and of the
//! closure of their images in compact real and complex tori.
//!
//! Everything here is rational arithmetic: number field elements are
//! vectors of rationals over a fixed minimal polynomial, series have
//! rational exponents and field coefficients, and distances come out as
//! exact squared rationals. Floating point appears only as a seed for
//! certified root isolation.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod interval;
pub mod lattice;
pub mod asymptotics;
pub mod closure;
pub mod linalg;
pub mod newton;
pub mod numberfield;
pub mod poly;
pub mod puiseux;
pub mod qpoly;
pub mod rat;
pub mod rng;
pub mod verify;

//! Chebyshev–Halley root-finding iterations applied to `z^n - 1`, studied as
//! rational maps of the Riemann sphere.
//!
//! The numerical core ([`maps`], [`polyroots`], [`dynamics`]) is generic over
//! the real scalar type through [`Real`]; the aliases below fix it to `f64`
//! or `f32`. Lemma checks ([`verify`]) and image output ([`render`]) work in
//! `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod maps;
pub mod poly;
pub mod polyroots;
pub mod render;
pub mod report;
pub mod scalar;
pub mod sphere;
pub mod verify;

pub use error::{Error, Result};
pub use maps::{ch_step, degenerate_check, Family, MapSpec, MobiusMap};
pub use poly::Polynomial;
pub use polyroots::{deflate, find_roots, preimages, RootSet};
pub use scalar::Real;
pub use sphere::ExtendedComplex;

pub use num_complex::{Complex, Complex32, Complex64};

pub type Point64 = ExtendedComplex<f64>;
pub type Point32 = ExtendedComplex<f32>;
pub type Polynomial64 = Polynomial<f64>;
pub type Polynomial32 = Polynomial<f32>;
pub type MapSpec64 = MapSpec<f64>;
pub type MapSpec32 = MapSpec<f32>;
pub type MobiusMap64 = MobiusMap<f64>;
pub type RootSet64 = RootSet<f64>;
pub type GridWindow64 = dynamics::GridWindow<f64>;
pub type OrbitOutcome64 = dynamics::OrbitOutcome<f64>;
pub type ClassificationGrid64 = dynamics::ClassificationGrid<f64>;
pub type ClassificationGrid32 = dynamics::ClassificationGrid<f32>;

//! Exact computations with lines on cubic fourfolds that have a single node
//! or a cyclic cusp.
//!
//! Coefficients live in [`field`]; polynomials in [`poly`]. [`fourfold`] holds
//! the models and fixtures, [`lines`] the line and scheme types with the
//! Plücker chart, [`fanomaps`] the residual-line map and its inverse,
//! [`localmodel`] the chart and blowup computations, [`lattice`] the divisor
//! arithmetic, and [`symmetry`] the order three action. [`suite`] runs the
//! named checks and builds reports.

pub mod fanomaps;
pub mod field;
pub mod fourfold;
pub mod lattice;
pub mod linalg;
pub mod lines;
pub mod localmodel;
pub mod modp;
pub mod poly;
pub mod suite;
pub mod symmetry;

//! Diagrammatic triangulations of knot exteriors and normal surfaces from
//! colored Kauffman states.
//!
//! A knot diagram is given as a weighted planar graph: every edge is a twist
//! region whose weight is the signed number of crossings. From it the crate
//! builds an octahedral ideal triangulation, inflates it to a genuine
//! triangulation of the exterior, writes down Q-matching equations, assigns
//! normal surfaces to colored Kauffman states and compares homological
//! gradings with boundary slopes. An exact Temperley-Lieb / colored Jones
//! oracle and an n = 1 Khovanov homology checker back the comparison.

pub mod cli;
pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod normal;
pub mod skein;
pub mod slope;
pub mod states;
pub mod triangulation;

pub use error::{Error, Result};
